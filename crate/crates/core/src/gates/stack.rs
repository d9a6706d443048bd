//! Three aligned 3D codes on the edges of a cubic box, built so that the
//! transversal CCZ is a logical gate.
//!
//! Copy 0 is the cubic toric code (vertex stars, plaquettes). Copies 1 and
//! 2 place X checks on the 12 edges of the even, respectively odd, cubes of
//! a checkerboard, with Z checks on the triangles of the resulting fcc
//! graph. All three live on a periodic lattice first; measuring out the
//! sites outside the box cuts each copy down to a box with one rough axis,
//! which is `z`, `x` and `y` for the three copies. Optional holes remove
//! the six edges of each hole vertex from every copy.

use std::collections::BTreeSet;

use super::StackAlignment;
use crate::code::CssCode;
use crate::complex::{fractal_holes, BoundaryKind, FractalSpec};
use crate::error::{Error, Result};
use crate::gf2::{kernel_basis, EchelonBasis, Gf2Matrix, Gf2Vector, SparseMatrix};

const E_AXIS: [usize; 3] = [2, 0, 1];

#[derive(Clone, Debug)]
pub struct VbStack {
    pub side: usize,
    pub codes: [CssCode; 3],
    pub align: StackAlignment,
    /// Per copy and X check row: whether the check was cut by a hole.
    pub hole_boundary: [Vec<bool>; 3],
    /// Doubled coordinates of each site, lowest dangling edges at `-1`.
    pub sites: Vec<[i32; 3]>,
    /// Sites removed by holes.
    pub hole_sites: Vec<[i32; 3]>,
}

impl VbStack {
    pub fn code(&self, copy: usize) -> &CssCode {
        &self.codes[copy]
    }

    pub fn has_holes(&self) -> bool {
        !self.hole_sites.is_empty()
    }
}

struct Torus {
    period: i32,
    index: Vec<usize>,
    coords: Vec<[i32; 3]>,
}

impl Torus {
    fn new(n: i32) -> Self {
        let period = 2 * n;
        let p = period as usize;
        let mut index = vec![usize::MAX; p * p * p];
        let mut coords = Vec::new();
        for x in 0..period {
            for y in 0..period {
                for z in 0..period {
                    if (x & 1) + (y & 1) + (z & 1) == 1 {
                        index[((x as usize) * p + y as usize) * p + z as usize] = coords.len();
                        coords.push([x, y, z]);
                    }
                }
            }
        }
        Self {
            period,
            index,
            coords,
        }
    }

    fn wrap(&self, c: [i32; 3]) -> [i32; 3] {
        c.map(|v| v.rem_euclid(self.period))
    }

    fn edge(&self, c: [i32; 3]) -> usize {
        let [x, y, z] = self.wrap(c);
        let p = self.period as usize;
        let i = self.index[((x as usize) * p + y as usize) * p + z as usize];
        debug_assert!(i != usize::MAX);
        i
    }

    fn signed(&self, c: [i32; 3]) -> [i32; 3] {
        c.map(|v| {
            if v >= self.period - 2 {
                v - self.period
            } else {
                v
            }
        })
    }

    fn points(&self, pred: impl Fn([i32; 3]) -> bool) -> Vec<[i32; 3]> {
        let mut out = Vec::new();
        for x in 0..self.period {
            for y in 0..self.period {
                for z in 0..self.period {
                    if pred([x, y, z]) {
                        out.push([x, y, z]);
                    }
                }
            }
        }
        out
    }

    fn toric(&self) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let units = unit_vectors();
        let stars = self
            .points(|c| c.iter().all(|v| v % 2 == 0))
            .into_iter()
            .map(|v| {
                units
                    .iter()
                    .flat_map(|u| [1, -1].map(|s| self.edge(add(v, scale(*u, s)))))
                    .collect()
            })
            .collect();
        let plaquettes = self
            .points(|c| c.iter().filter(|v| *v % 2 == 1).count() == 2)
            .into_iter()
            .map(|f| {
                (0..3)
                    .filter(|&a| f[a] % 2 == 1)
                    .flat_map(|a| [1, -1].map(|s| self.edge(add(f, scale(units[a], s)))))
                    .collect()
            })
            .collect();
        (stars, plaquettes)
    }

    /// Cube checks on one checkerboard class and triangles of the fcc graph
    /// joining its cubes.
    fn cubic(&self, parity: i32) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let class = |c: [i32; 3]| {
            c.iter().all(|v| v % 2 == 1)
                && c.iter().map(|v| (v - 1) / 2).sum::<i32>().rem_euclid(2) == parity
        };
        let offsets = fcc_offsets();
        let cubes = self.points(class);
        let cubes_x = cubes
            .iter()
            .map(|&c| {
                offsets
                    .iter()
                    .map(|&d| self.edge(add(c, half(d))))
                    .collect()
            })
            .collect();
        let mut triangles = BTreeSet::new();
        for &c in &cubes {
            for (i, &d1) in offsets.iter().enumerate() {
                for &d2 in &offsets[i + 1..] {
                    if !offsets.contains(&sub(d2, d1)) {
                        continue;
                    }
                    let mut t = [
                        self.edge(add(c, half(d1))),
                        self.edge(add(c, half(d2))),
                        self.edge(add(add(c, d1), half(sub(d2, d1)))),
                    ];
                    t.sort_unstable();
                    triangles.insert(t);
                }
            }
        }
        (cubes_x, triangles.into_iter().map(|t| t.to_vec()).collect())
    }
}

fn unit_vectors() -> [[i32; 3]; 3] {
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
}

fn fcc_offsets() -> Vec<[i32; 3]> {
    let mut out = Vec::new();
    for zero in 0..3 {
        for s1 in [2, -2] {
            for s2 in [2, -2] {
                let mut d = [0; 3];
                let others: Vec<usize> = (0..3).filter(|&a| a != zero).collect();
                d[others[0]] = s1;
                d[others[1]] = s2;
                out.push(d);
            }
        }
    }
    out
}

fn add(a: [i32; 3], b: [i32; 3]) -> [i32; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: [i32; 3], b: [i32; 3]) -> [i32; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: [i32; 3], s: i32) -> [i32; 3] {
    a.map(|v| v * s)
}

fn half(a: [i32; 3]) -> [i32; 3] {
    a.map(|v| v / 2)
}

/// Elements of the row space of `rows` vanishing on `avoid`, as a generating
/// set. Rows already avoiding it come first and keep their identity; the
/// rest are the fewest combinations needed to span. Each output carries the
/// rows it was summed from.
fn avoiding_subgroup(
    rows: &[Vec<usize>],
    n: usize,
    avoid: &[bool],
) -> Vec<(Vec<usize>, Vec<usize>)> {
    let to_vec = |r: &[usize]| Gf2Vector::from_support(n, r.iter().copied());
    let full = Gf2Matrix::from_supports(n, rows);
    let avoid_cols: Vec<usize> = (0..n).filter(|&s| avoid[s]).collect();
    let target = full.rank() - full.select_columns(&avoid_cols).rank();
    let mut basis = EchelonBasis::new(n);
    let mut out = Vec::new();
    let mut touching = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        if row.iter().any(|&s| avoid[s]) {
            touching.push(r);
        } else {
            basis.insert(to_vec(row));
            out.push((row.clone(), vec![r]));
        }
    }
    if basis.rank() < target {
        let m = Gf2Matrix::from_supports(
            n,
            &touching
                .iter()
                .map(|&r| rows[r].clone())
                .collect::<Vec<_>>(),
        )
        .select_columns(&avoid_cols);
        let mut combos = kernel_basis(&m.transpose());
        combos.sort_by_key(|c| c.weight());
        for c in combos {
            if basis.rank() == target {
                break;
            }
            let pre: Vec<usize> = c.iter_ones().map(|i| touching[i]).collect();
            let mut v = Gf2Vector::zeros(n);
            for &r in &pre {
                v.xor_assign(&to_vec(&rows[r]));
            }
            if basis.insert(v.clone()) {
                out.push((v.support(), pre));
            }
        }
    }
    out
}

/// Builds the stack on an `side`-cube of vertices. Holes, when given, are
/// read off a fractal on the same vertex grid and must all be `M`.
pub fn build_vasmer_browne_stack(side: usize, holes: Option<&FractalSpec>) -> Result<VbStack> {
    if side < 2 {
        return Err(Error::InvalidParameter(format!(
            "stack side {side} is below 2"
        )));
    }
    let l = side as i32;
    let mut hole_vertices = Vec::new();
    if let Some(spec) = holes {
        spec.validate()?;
        if spec.n != 3 {
            return Err(Error::InvalidParameter(
                "stack holes need a 3D fractal".into(),
            ));
        }
        let (hole_of, count) = fractal_holes(3, side, spec.p, spec.q, spec.level)?;
        for h in 0..count as u32 {
            if spec.holes.kind(h) == BoundaryKind::E {
                return Err(Error::Unsupported(format!("hole {h} has an E boundary")));
            }
        }
        for (idx, &h) in hole_of.iter().enumerate() {
            if h != u32::MAX {
                let (x, y, z) = (idx / (side * side), (idx / side) % side, idx % side);
                hole_vertices.push([2 * x as i32, 2 * y as i32, 2 * z as i32]);
            }
        }
    }
    let mut n_torus = l + 2;
    n_torus += n_torus % 2;
    let torus = Torus::new(n_torus);
    let n = torus.coords.len();

    let in_range = |c: [i32; 3], a: usize| {
        if c[a] % 2 != 0 {
            (-1..=2 * l - 1).contains(&c[a])
        } else {
            (0..=2 * l - 2).contains(&c[a])
        }
    };
    let mut hole_site = vec![false; n];
    for &v in &hole_vertices {
        for u in unit_vectors() {
            for s in [1, -1] {
                hole_site[torus.edge(add(v, scale(u, s)))] = true;
            }
        }
    }
    let signed: Vec<[i32; 3]> = torus.coords.iter().map(|&c| torus.signed(c)).collect();
    let inside: Vec<bool> = signed
        .iter()
        .map(|&c| (0..3).all(|a| in_range(c, a)))
        .collect();
    let mut box_sites: Vec<usize> = (0..n).filter(|&s| inside[s] && !hole_site[s]).collect();
    box_sites.sort_by_key(|&s| signed[s]);
    let mut box_index = vec![usize::MAX; n];
    for (i, &s) in box_sites.iter().enumerate() {
        box_index[s] = i;
    }
    let nb = box_sites.len();

    let sources = [torus.toric(), torus.cubic(0), torus.cubic(1)];
    let mut codes = Vec::with_capacity(3);
    let mut hole_boundary: Vec<Vec<bool>> = Vec::with_capacity(3);
    for (copy, (hx, hz)) in sources.iter().enumerate() {
        let e = E_AXIS[copy];
        let z_measured: Vec<bool> = (0..n)
            .map(|s| !inside[s] && !in_range(signed[s], e))
            .collect();
        let x_measured: Vec<bool> = (0..n)
            .map(|s| hole_site[s] || (!inside[s] && !z_measured[s]))
            .collect();
        let restrict = |rows: Vec<(Vec<usize>, Vec<usize>)>| {
            let mut seen = BTreeSet::new();
            let mut kept = Vec::new();
            for (row, pre) in rows {
                let r: Vec<usize> = row
                    .iter()
                    .filter(|&&s| box_index[s] != usize::MAX)
                    .map(|&s| box_index[s])
                    .collect();
                if !r.is_empty() && seen.insert(r.clone()) {
                    kept.push((r, pre));
                }
            }
            kept
        };
        let xs = restrict(avoiding_subgroup(hx, n, &z_measured));
        let zs = restrict(avoiding_subgroup(hz, n, &x_measured));
        hole_boundary.push(
            xs.iter()
                .map(|(_, pre)| pre.iter().any(|&r| hx[r].iter().any(|&s| hole_site[s])))
                .collect(),
        );
        let hx_box = SparseMatrix::from_rows(nb, xs.into_iter().map(|(r, _)| r).collect());
        let hz_box = SparseMatrix::from_rows(nb, zs.into_iter().map(|(r, _)| r).collect());
        let code = CssCode::new(hx_box, hz_box)?;
        let sites: Vec<[i32; 3]> = box_sites.iter().map(|&s| signed[s]).collect();
        let logical =
            Gf2Vector::from_support(nb, (0..nb).filter(|&i| preferred_logical(copy, sites[i])));
        codes.push(code.with_preferred_x_logicals(vec![logical])?);
    }
    let codes: [CssCode; 3] = codes
        .try_into()
        .map_err(|_| Error::Inconsistent("copy count".into()))?;
    let hole_boundary: [Vec<bool>; 3] = hole_boundary
        .try_into()
        .map_err(|_| Error::Inconsistent("copy count".into()))?;
    let mut hole_sites: Vec<[i32; 3]> = (0..n)
        .filter(|&s| hole_site[s])
        .map(|s| signed[s])
        .collect();
    hole_sites.sort_unstable();
    Ok(VbStack {
        side,
        align: StackAlignment::identity(nb, 3)?,
        codes,
        hole_boundary,
        sites: box_sites.iter().map(|&s| signed[s]).collect(),
        hole_sites,
    })
}

/// X logical membranes: bottom dangling `z` edges for copy 0, the `x = 0`
/// face for copy 1 and the `y = 0` face for copy 2.
fn preferred_logical(copy: usize, c: [i32; 3]) -> bool {
    let odd = |a: usize| c[a] % 2 != 0;
    match copy {
        0 => odd(2) && c[2] == -1,
        1 => c[0] == 0 && (odd(1) || odd(2)),
        _ => c[1] == 0 && (odd(0) || odd(2)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::logical_count;
    use crate::gates::check_transversal_ccz;

    fn weights(code: &CssCode) -> BTreeSet<usize> {
        code.hx().iter_rows().map(|r| r.len()).collect()
    }

    #[test]
    fn stack_without_holes() {
        for side in [2, 3] {
            let st = build_vasmer_browne_stack(side, None).unwrap();
            for c in &st.codes {
                assert_eq!(logical_count(c), 1, "side {side}");
            }
            let r =
                check_transversal_ccz(&st.codes[0], &st.codes[1], &st.codes[2], &st.align).unwrap();
            assert!(r.passed(), "side {side}\n{r}");
            assert!(st.hole_boundary.iter().flatten().all(|b| !b));
        }
    }

    #[test]
    fn bulk_star_weight() {
        let st = build_vasmer_browne_stack(2, None).unwrap();
        assert!(weights(&st.codes[0]).contains(&6));
    }

    #[test]
    fn central_hole() {
        let spec = FractalSpec::new(3, 3, 1, 1);
        let st = build_vasmer_browne_stack(3, Some(&spec)).unwrap();
        assert_eq!(st.hole_sites.len(), 6);
        assert!(weights(&st.codes[0]).contains(&5));
        for c in &st.codes {
            assert_eq!(logical_count(c), 1);
        }
    }

    #[test]
    fn conjugated_stars() {
        use crate::code::PauliOperator;
        use crate::gates::{classify_cz_part, conjugate_by_ccz, CzClass};
        let spec = FractalSpec::new(3, 3, 1, 1);
        let st = build_vasmer_browne_stack(3, Some(&spec)).unwrap();
        let codes = [&st.codes[0], &st.codes[1], &st.codes[2]];
        let hx = st.codes[0].hx();
        let row = |want_hole: bool, w: usize| {
            (0..hx.rows())
                .find(|&r| st.hole_boundary[0][r] == want_hole && hx.row(r).len() == w)
                .unwrap()
        };
        let n = st.align.n_sites();
        let op = |r: usize| {
            let s = PauliOperator::x_type(hx.row_vector(r));
            conjugate_by_ccz(&s, 0, &st.align).unwrap()
        };
        let bulk = op(row(false, 6));
        assert_eq!(bulk.quadratic.len(), 6);
        assert_eq!(
            classify_cz_part(&bulk, 0, codes, &st.align).unwrap(),
            CzClass::Identity
        );
        let cut = op(row(true, 5));
        assert!(matches!(
            classify_cz_part(&cut, 0, codes, &st.align).unwrap(),
            CzClass::NotIdentity(_)
        ));
        assert_eq!(cut.x_sites(0, n).len(), 5);
    }

    #[test]
    fn rejects_small_side_and_e_holes() {
        assert!(build_vasmer_browne_stack(1, None).is_err());
        let spec = FractalSpec::new(3, 3, 1, 1)
            .with_holes(crate::complex::HoleAssignment::Uniform(BoundaryKind::E));
        assert!(build_vasmer_browne_stack(3, Some(&spec)).is_err());
    }
}
