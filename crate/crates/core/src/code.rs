//! CSS codes built from cell complexes.
//!
//! With qubits on the `i`-cells, X checks come from `(i-1)`-cells and Z checks
//! from `(i+1)`-cells. Every cell in the closure of the rough (`E`) labels is
//! removed first, which truncates the checks next to rough boundaries and
//! leaves smooth boundaries as generated by the geometry.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::complex::{BoundaryLabel, CellComplex};
use crate::distance::DistanceKind;
use crate::error::{parse_err, Error, Result};
use crate::gf2::{solve, EchelonBasis, Gf2Matrix, Gf2Vector, SparseMatrix};
use crate::homology::betti_relative_e;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    pub x: Gf2Vector,
    pub z: Gf2Vector,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            x: Gf2Vector::zeros(n),
            z: Gf2Vector::zeros(n),
        }
    }

    pub fn x_type(x: Gf2Vector) -> Self {
        let z = Gf2Vector::zeros(x.len());
        Self { x, z }
    }

    pub fn z_type(z: Gf2Vector) -> Self {
        let x = Gf2Vector::zeros(z.len());
        Self { x, z }
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.x.weight() + self.z.weight() - self.x.overlap(&self.z)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.x.dot(&other.z) == self.z.dot(&other.x)
    }

    pub fn is_x_type(&self) -> bool {
        self.z.is_zero()
    }

    pub fn is_z_type(&self) -> bool {
        self.x.is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PauliType {
    X,
    Z,
}

#[derive(Clone, Debug)]
pub struct CssCode {
    n_qubits: usize,
    grading: usize,
    hx: SparseMatrix,
    hz: SparseMatrix,
    qubit_cell: Vec<usize>,
    x_check_cell: Vec<usize>,
    z_check_cell: Vec<usize>,
    complex: Option<Arc<CellComplex>>,
    preferred_x: Option<Vec<Gf2Vector>>,
}

impl CssCode {
    /// Code from explicit check matrices. Qubit and check cell maps default
    /// to the identity.
    pub fn new(hx: SparseMatrix, hz: SparseMatrix) -> Result<Self> {
        if hx.cols() != hz.cols() {
            return Err(Error::Dimension(format!(
                "HX has {} columns and HZ has {}",
                hx.cols(),
                hz.cols()
            )));
        }
        let n = hx.cols();
        let code = Self {
            n_qubits: n,
            grading: 1,
            qubit_cell: (0..n).collect(),
            x_check_cell: (0..hx.rows()).collect(),
            z_check_cell: (0..hz.rows()).collect(),
            hx,
            hz,
            complex: None,
            preferred_x: None,
        };
        code.check_orthogonal()?;
        Ok(code)
    }

    pub fn with_grading(mut self, i: usize) -> Self {
        self.grading = i;
        self
    }

    /// Fixes the X logical representatives returned by `logical_basis`.
    pub fn with_preferred_x_logicals(mut self, xs: Vec<Gf2Vector>) -> Result<Self> {
        let hz = self.hz.to_dense();
        let sx = EchelonBasis::from_matrix(&self.hx.to_dense());
        for (j, x) in xs.iter().enumerate() {
            if x.len() != self.n_qubits || !hz.mul_vec(x)?.is_zero() || sx.contains(x) {
                return Err(Error::InvalidParameter(format!(
                    "preferred X logical {j} is not a nontrivial logical"
                )));
            }
        }
        self.preferred_x = Some(xs);
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn grading(&self) -> usize {
        self.grading
    }

    pub fn hx(&self) -> &SparseMatrix {
        &self.hx
    }

    pub fn hz(&self) -> &SparseMatrix {
        &self.hz
    }

    pub fn qubit_cell(&self) -> &[usize] {
        &self.qubit_cell
    }

    pub fn x_check_cell(&self) -> &[usize] {
        &self.x_check_cell
    }

    pub fn z_check_cell(&self) -> &[usize] {
        &self.z_check_cell
    }

    pub fn complex(&self) -> Option<&Arc<CellComplex>> {
        self.complex.as_ref()
    }

    pub fn checks(&self, t: PauliType) -> &SparseMatrix {
        match t {
            PauliType::X => &self.hx,
            PauliType::Z => &self.hz,
        }
    }

    pub fn check_orthogonal(&self) -> Result<()> {
        let cols = self.hz.column_lists();
        for (r, row) in self.hx.iter_rows().enumerate() {
            let mut acc = vec![0u8; self.hz.rows()];
            for &q in row {
                for &z in &cols[q] {
                    acc[z] ^= 1;
                }
            }
            if let Some(z) = acc.iter().position(|&a| a == 1) {
                return Err(Error::Inconsistent(format!(
                    "X check {r} and Z check {z} overlap oddly"
                )));
            }
        }
        Ok(())
    }

    /// Qubits touched by no check at all.
    pub fn dangling_qubits(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n_qubits];
        for row in self.hx.iter_rows().chain(self.hz.iter_rows()) {
            for &q in row {
                seen[q] = true;
            }
        }
        (0..self.n_qubits).filter(|&q| !seen[q]).collect()
    }

    /// The same qubits with the roles of X and Z exchanged.
    pub fn swap_xz(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            grading: self.grading,
            hx: self.hz.clone(),
            hz: self.hx.clone(),
            qubit_cell: self.qubit_cell.clone(),
            x_check_cell: self.z_check_cell.clone(),
            z_check_cell: self.x_check_cell.clone(),
            complex: None,
            preferred_x: None,
        }
    }

    /// Qubit index of the `i`-cell with the given id.
    pub fn qubit_of_cell(&self, cell: usize) -> Option<usize> {
        self.qubit_cell.binary_search(&cell).ok()
    }

    /// Tests that `v` is a nontrivial logical of the given type.
    pub fn is_logical(&self, t: PauliType, v: &Gf2Vector) -> Result<bool> {
        let (opp, same) = match t {
            PauliType::X => (&self.hz, &self.hx),
            PauliType::Z => (&self.hx, &self.hz),
        };
        if v.len() != self.n_qubits {
            return Err(Error::Dimension(
                "operator length differs from qubit count".into(),
            ));
        }
        if !opp.mul_vec(v).is_zero() {
            return Ok(false);
        }
        Ok(solve(&same.to_dense().transpose(), v)?.is_none())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "csscode v1").unwrap();
        writeln!(s, "nqubits {} i {}", self.n_qubits, self.grading).unwrap();
        s.push_str("HX\n");
        s.push_str(&self.hx.to_dense().to_text());
        s.push_str("HZ\n");
        s.push_str(&self.hz.to_dense().to_text());
        s.push_str("qubitmap\n");
        for (q, c) in self.qubit_cell.iter().enumerate() {
            writeln!(s, "q {q} -> cell {c}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim() == "csscode v1" => {}
            _ => return Err(parse_err(1, "expected `csscode v1`")),
        }
        let (n, head) = lines.next().ok_or_else(|| parse_err(2, "missing header"))?;
        let t: Vec<&str> = head.split_whitespace().collect();
        if t.len() != 4 || t[0] != "nqubits" || t[2] != "i" {
            return Err(parse_err(n + 1, "expected `nqubits <n> i <i>`"));
        }
        let nq: usize = t[1]
            .parse()
            .map_err(|_| parse_err(n + 1, "bad qubit count"))?;
        let grading: usize = t[3].parse().map_err(|_| parse_err(n + 1, "bad grading"))?;
        let mut block = |tag: &str| -> Result<Gf2Matrix> {
            match lines.next() {
                Some((_, l)) if l.trim() == tag => Gf2Matrix::read_lines(&mut lines),
                Some((n, _)) => Err(parse_err(n + 1, format!("expected `{tag}`"))),
                None => Err(parse_err(0, format!("missing `{tag}`"))),
            }
        };
        let hx = block("HX")?;
        let hz = block("HZ")?;
        if hx.cols() != nq || hz.cols() != nq {
            return Err(parse_err(0, "matrix width differs from qubit count"));
        }
        let mut qubit_cell = vec![usize::MAX; nq];
        match lines.next() {
            Some((_, l)) if l.trim() == "qubitmap" => {}
            Some((n, _)) => return Err(parse_err(n + 1, "expected `qubitmap`")),
            None => return Err(parse_err(0, "missing `qubitmap`")),
        }
        for (n, l) in lines {
            if l.trim().is_empty() {
                continue;
            }
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 5 || t[0] != "q" || t[2] != "->" || t[3] != "cell" {
                return Err(parse_err(n + 1, "expected `q <qubit> -> cell <id>`"));
            }
            let q: usize = t[1].parse().map_err(|_| parse_err(n + 1, "bad qubit"))?;
            let c: usize = t[4].parse().map_err(|_| parse_err(n + 1, "bad cell"))?;
            if q >= nq {
                return Err(parse_err(n + 1, "qubit out of range"));
            }
            qubit_cell[q] = c;
        }
        if qubit_cell.contains(&usize::MAX) {
            return Err(parse_err(0, "qubit map is incomplete"));
        }
        let mut code = CssCode::new(SparseMatrix::from_dense(&hx), SparseMatrix::from_dense(&hz))?;
        code.grading = grading;
        code.qubit_cell = qubit_cell;
        Ok(code)
    }
}

/// Mask of the closure of every rough cell.
pub fn rough_closure(c: &CellComplex) -> Vec<Vec<bool>> {
    c.closure(&c.label_mask(BoundaryLabel::is_e))
}

pub fn css_from_complex(c: Arc<CellComplex>, i: usize) -> Result<CssCode> {
    let n = c.dim();
    if i == 0 || i >= n {
        return Err(Error::InvalidParameter(format!(
            "grading {i} outside 1..={}",
            n.saturating_sub(1)
        )));
    }
    let removed = rough_closure(&c);
    let qubit_cell: Vec<usize> = (0..c.count(i)).filter(|&x| !removed[i][x]).collect();
    let mut q_of = vec![usize::MAX; c.count(i)];
    for (q, &cell) in qubit_cell.iter().enumerate() {
        q_of[cell] = q;
    }
    let nq = qubit_cell.len();

    let mut x_rows = vec![Vec::new(); c.count(i - 1)];
    for cell in c.cells(i) {
        let q = q_of[cell.id];
        if q == usize::MAX {
            continue;
        }
        for &f in &cell.boundary {
            x_rows[f].push(q);
        }
    }
    let mut hx = SparseMatrix::new(nq);
    let mut x_check_cell = Vec::new();
    for (f, row) in x_rows.into_iter().enumerate() {
        if !removed[i - 1][f] && !row.is_empty() {
            hx.push_row(row);
            x_check_cell.push(f);
        }
    }

    let mut hz = SparseMatrix::new(nq);
    let mut z_check_cell = Vec::new();
    for cell in c.cells(i + 1) {
        if removed[i + 1][cell.id] {
            continue;
        }
        let row: Vec<usize> = cell
            .boundary
            .iter()
            .map(|&f| q_of[f])
            .filter(|&q| q != usize::MAX)
            .collect();
        if !row.is_empty() {
            hz.push_row(row);
            z_check_cell.push(cell.id);
        }
    }
    let code = CssCode {
        n_qubits: nq,
        grading: i,
        hx,
        hz,
        qubit_cell,
        x_check_cell,
        z_check_cell,
        complex: Some(c),
        preferred_x: None,
    };
    code.check_orthogonal()?;
    Ok(code)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeParams {
    pub n_qubits: usize,
    pub k: usize,
    pub d_z: Option<(usize, DistanceKind)>,
    pub d_x: Option<(usize, DistanceKind)>,
}

/// `n - rank(HX) - rank(HZ)`.
pub fn logical_count(code: &CssCode) -> usize {
    code.n_qubits - code.hx.to_dense().rank() - code.hz.to_dense().rank()
}

/// Logical count from check ranks, cross-checked against the relative
/// homology of the source complex when there is one.
pub fn code_params(code: &CssCode) -> Result<CodeParams> {
    let k = logical_count(code);
    if let Some(c) = &code.complex {
        let b = betti_relative_e(c, code.grading)?;
        if b != k {
            return Err(Error::Inconsistent(format!(
                "rank count k={k} but homology gives {b}"
            )));
        }
    }
    Ok(CodeParams {
        n_qubits: code.n_qubits,
        k,
        d_z: None,
        d_x: None,
    })
}

fn logical_candidates(kernel_of: &SparseMatrix, modulo: &SparseMatrix) -> Vec<Gf2Vector> {
    let mut basis = EchelonBasis::from_matrix(&modulo.to_dense());
    crate::gf2::kernel_basis(&kernel_of.to_dense())
        .into_iter()
        .filter(|v| basis.insert(v.clone()))
        .collect()
}

/// `k` Z logicals and `k` X logicals whose overlap matrix is the identity.
pub fn logical_basis(code: &CssCode) -> Result<(Vec<PauliOperator>, Vec<PauliOperator>)> {
    let mut z = logical_candidates(&code.hx, &code.hz);
    let k = z.len();
    if k == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let x = if let Some(pref) = &code.preferred_x {
        if pref.len() != k {
            return Err(Error::InvalidParameter(format!(
                "{} preferred X logicals for k={k}",
                pref.len()
            )));
        }
        // Keep the X representatives and take the dual Z basis.
        let mut m = Gf2Matrix::zeros(k, k);
        for (a, za) in z.iter().enumerate() {
            for (b, xb) in pref.iter().enumerate() {
                m.set(b, a, za.dot(xb));
            }
        }
        let mut dual = Vec::with_capacity(k);
        for b in 0..k {
            let c = solve(&m, &Gf2Vector::unit(k, b))?
                .ok_or_else(|| Error::Inconsistent("preferred X logicals are dependent".into()))?;
            let mut v = Gf2Vector::zeros(code.n_qubits);
            for a in c.iter_ones() {
                v.xor_assign(&z[a]);
            }
            dual.push(v);
        }
        z = dual;
        pref.clone()
    } else {
        let mut x = logical_candidates(&code.hz, &code.hx);
        if x.len() != k {
            return Err(Error::Inconsistent("X and Z logical counts differ".into()));
        }
        for a in 0..k {
            let j = match (a..k).find(|&j| z[a].dot(&x[j])) {
                Some(j) => j,
                None => {
                    let (i, j) = (a + 1..k)
                        .flat_map(|i| (a..k).map(move |j| (i, j)))
                        .find(|&(i, j)| z[i].dot(&x[j]))
                        .ok_or_else(|| Error::Inconsistent("degenerate logical pairing".into()))?;
                    z.swap(a, i);
                    j
                }
            };
            x.swap(a, j);
            for j in 0..k {
                if j != a && z[a].dot(&x[j]) {
                    let xa = x[a].clone();
                    x[j].xor_assign(&xa);
                }
            }
            for i in 0..k {
                if i != a && z[i].dot(&x[a]) {
                    let za = z[a].clone();
                    z[i].xor_assign(&za);
                }
            }
        }
        x
    };
    Ok((
        z.into_iter().map(PauliOperator::z_type).collect(),
        x.into_iter().map(PauliOperator::x_type).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_lattice, build_surface_layout, Background};

    fn code(c: CellComplex) -> CssCode {
        css_from_complex(Arc::new(c), 1).unwrap()
    }

    #[test]
    fn toric_code() {
        let c = code(build_lattice(2, 3, Background::Torus).unwrap());
        assert_eq!(c.n_qubits(), 18);
        assert_eq!(code_params(&c).unwrap().k, 2);
    }

    #[test]
    fn surface_codes() {
        let s2 = code(build_surface_layout(2, 3).unwrap());
        assert_eq!(s2.n_qubits(), 13);
        assert_eq!(code_params(&s2).unwrap().k, 1);
        let p2 = code(build_lattice(2, 3, Background::OpenCube).unwrap());
        assert_eq!(code_params(&p2).unwrap().k, 1);
        let s3 = code(build_lattice(3, 2, Background::OpenCube).unwrap());
        assert_eq!(code_params(&s3).unwrap().k, 1);
    }

    #[test]
    fn grading_range() {
        let c = Arc::new(build_lattice(2, 2, Background::Torus).unwrap());
        assert!(css_from_complex(c.clone(), 0).is_err());
        assert!(css_from_complex(c, 2).is_err());
    }

    #[test]
    fn logical_pairing_is_identity() {
        let c = code(build_lattice(2, 2, Background::Torus).unwrap());
        let (z, x) = logical_basis(&c).unwrap();
        assert_eq!((z.len(), x.len()), (2, 2));
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(z[a].z.dot(&x[b].x), a == b);
            }
            assert!(c.is_logical(PauliType::Z, &z[a].z).unwrap());
            assert!(c.is_logical(PauliType::X, &x[a].x).unwrap());
        }
    }

    #[test]
    fn text_round_trip() {
        let c = code(build_surface_layout(2, 2).unwrap());
        let t = c.to_text();
        let r = CssCode::from_text(&t).unwrap();
        assert_eq!(r.to_text(), t);
    }

    #[test]
    fn trivial_code_has_no_logicals() {
        let hx = SparseMatrix::from_rows(1, vec![vec![0]]);
        let hz = SparseMatrix::new(1);
        let c = CssCode::new(hx, hz).unwrap();
        let (z, x) = logical_basis(&c).unwrap();
        assert!(z.is_empty() && x.is_empty());
    }
}
