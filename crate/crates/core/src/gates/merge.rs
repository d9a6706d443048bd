//! Merging two codes along facing rough boundaries.
//!
//! Both codes come from cell complexes whose rough face cells were removed.
//! The merge puts a fresh qubit on every paired face edge, adds an X check
//! at every paired face vertex and completes the truncated Z checks of both
//! codes with the interface qubit they lost. Measuring the new X checks
//! measures the product of the two X logicals.

use std::collections::BTreeMap;

use crate::code::{logical_basis, logical_count, CssCode};
use crate::complex::{BoundaryLabel, CellComplex};
use crate::error::{Error, Result};
use crate::gf2::{solve, Gf2Matrix, Gf2Vector, SparseMatrix};

/// Pairs of cells, one from each complex, per grade 0, 1 and 2.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MergeInterface {
    pub pairs: [Vec<(usize, usize)>; 3],
}

impl MergeInterface {
    /// Pairs the top rough face of `a` with the bottom rough face of `b`
    /// along the last axis, matching cells by their other coordinates.
    pub fn facing(a: &CellComplex, b: &CellComplex) -> Result<Self> {
        let n = a.dim();
        if b.dim() != n || n < 2 {
            return Err(Error::Dimension(format!(
                "merging dimensions {n} and {}",
                b.dim()
            )));
        }
        let top = BoundaryLabel::OuterE(2 * (n as u32 - 1) + 1);
        let bottom = BoundaryLabel::OuterE(2 * (n as u32 - 1));
        let mut pairs: [Vec<(usize, usize)>; 3] = Default::default();
        for k in 0..3.min(n) {
            let key = |c: &crate::complex::Cell| c.coords[..n - 1].to_vec();
            let from_b: BTreeMap<Vec<i32>, usize> = b
                .cells(k)
                .iter()
                .filter(|c| c.label == bottom)
                .map(|c| (key(c), c.id))
                .collect();
            let from_a: Vec<_> = a.cells(k).iter().filter(|c| c.label == top).collect();
            if from_a.len() != from_b.len() {
                return Err(Error::Precondition(format!(
                    "rough faces have {} and {} cells of grade {k}",
                    from_a.len(),
                    from_b.len()
                )));
            }
            for c in from_a {
                let &id_b = from_b.get(&key(c)).ok_or_else(|| {
                    Error::Precondition(format!(
                        "no partner for {k}-cell {} of the first code",
                        c.id
                    ))
                })?;
                pairs[k].push((c.id, id_b));
            }
        }
        Ok(Self { pairs })
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.iter().all(|p| p.is_empty())
    }
}

#[derive(Clone, Debug)]
pub struct MergeOutcome {
    /// Qubits of `a`, then of `b`, then the interface.
    pub code: CssCode,
    pub k_a: usize,
    pub k_b: usize,
    pub k_merged: usize,
    /// Rows of the merged X checks added at the interface.
    pub interface_x_rows: Vec<usize>,
    /// Whether the product of the interface X checks equals the product of
    /// the two X logicals up to old X checks.
    pub parity_identity: bool,
}

impl MergeOutcome {
    /// Splitting along the interface again drops its qubits and checks and
    /// gives back `k_a + k_b` logical qubits.
    pub fn k_after_split(&self) -> usize {
        self.k_a + self.k_b
    }
}

fn complex_of(code: &CssCode) -> Result<&CellComplex> {
    code.complex()
        .map(|c| c.as_ref())
        .ok_or_else(|| Error::Precondition("merging needs codes built from complexes".into()))
}

pub fn merge_rough(a: &CssCode, b: &CssCode, interface: &MergeInterface) -> Result<MergeOutcome> {
    if interface.is_empty() {
        return Err(Error::EmptySelection);
    }
    if a.grading() != 1 || b.grading() != 1 {
        return Err(Error::Unsupported(
            "merging codes with qubits off edges".into(),
        ));
    }
    let (ca, cb) = (complex_of(a)?, complex_of(b)?);
    let (na, nb) = (a.n_qubits(), b.n_qubits());
    let edge_pairs = &interface.pairs[1];
    let ni = edge_pairs.len();
    let n = na + nb + ni;
    let iq_of_a: BTreeMap<usize, usize> = edge_pairs
        .iter()
        .enumerate()
        .map(|(k, &(ea, _))| (ea, na + nb + k))
        .collect();
    let iq_of_b: BTreeMap<usize, usize> = edge_pairs
        .iter()
        .enumerate()
        .map(|(k, &(_, eb))| (eb, na + nb + k))
        .collect();
    for &(ea, eb) in edge_pairs {
        if a.qubit_of_cell(ea).is_some() || b.qubit_of_cell(eb).is_some() {
            return Err(Error::Precondition(format!(
                "interface edge ({ea}, {eb}) already holds a qubit"
            )));
        }
    }

    let mut hx = SparseMatrix::new(n);
    for row in a.hx().iter_rows() {
        hx.push_row(row.to_vec());
    }
    for row in b.hx().iter_rows() {
        hx.push_row(row.iter().map(|&q| q + na).collect());
    }
    let old_x = hx.rows();
    let mut interface_x_rows = Vec::new();
    for &(va, vb) in &interface.pairs[0] {
        let mut row = Vec::new();
        for e in ca.cells(1) {
            if e.boundary.contains(&va) {
                if let Some(q) = a.qubit_of_cell(e.id) {
                    row.push(q);
                } else if let Some(&q) = iq_of_a.get(&e.id) {
                    row.push(q);
                }
            }
        }
        for e in cb.cells(1) {
            if e.boundary.contains(&vb) {
                if let Some(q) = b.qubit_of_cell(e.id) {
                    row.push(na + q);
                }
            }
        }
        if !row.is_empty() {
            interface_x_rows.push(hx.rows());
            hx.push_row(row);
        }
    }

    let mut hz = SparseMatrix::new(n);
    let extend = |code: &CssCode,
                  c: &CellComplex,
                  iq: &BTreeMap<usize, usize>,
                  shift: usize,
                  hz: &mut SparseMatrix| {
        for (r, row) in code.hz().iter_rows().enumerate() {
            let cell = &c.cells(2)[code.z_check_cell()[r]];
            let mut row: Vec<usize> = row.iter().map(|&q| q + shift).collect();
            row.extend(cell.boundary.iter().filter_map(|f| iq.get(f)));
            hz.push_row(row);
        }
    };
    extend(a, ca, &iq_of_a, 0, &mut hz);
    extend(b, cb, &iq_of_b, na, &mut hz);
    for &(fa, _) in &interface.pairs[2] {
        let row: Vec<usize> = ca.cells(2)[fa]
            .boundary
            .iter()
            .filter_map(|e| iq_of_a.get(e))
            .copied()
            .collect();
        if !row.is_empty() {
            hz.push_row(row);
        }
    }
    let code = CssCode::new(hx, hz)?;

    let (_, xa) = logical_basis(a)?;
    let (_, xb) = logical_basis(b)?;
    let parity_identity = match (xa.first(), xb.first()) {
        (Some(la), Some(lb)) => {
            let mut target = Gf2Vector::zeros(n);
            for &r in &interface_x_rows {
                for &q in code.hx().row(r) {
                    target.flip(q);
                }
            }
            for q in la.x.iter_ones() {
                target.flip(q);
            }
            for q in lb.x.iter_ones() {
                target.flip(na + q);
            }
            let old = Gf2Matrix::from_supports(
                n,
                &(0..old_x)
                    .map(|r| code.hx().row(r).to_vec())
                    .collect::<Vec<_>>(),
            );
            solve(&old.transpose(), &target)?.is_some()
        }
        _ => false,
    };
    Ok(MergeOutcome {
        k_a: logical_count(a),
        k_b: logical_count(b),
        k_merged: logical_count(&code),
        code,
        interface_x_rows,
        parity_identity,
    })
}
