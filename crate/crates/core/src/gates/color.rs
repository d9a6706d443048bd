//! The 2D hexagonal color code on a patch with two pairs of opposite
//! boundaries, its transversal S check and its two shrunk lattices.
//!
//! Faces of the honeycomb are points of a triangular lattice and qubits are
//! its triangles. Points `(i, j)` are colored `(i - j) mod 3`, with colors
//! `C = 0`, `A = 1` and `B = 2`. Boundary faces are virtual points, one per
//! side: `a_left`, `a_right`, `b_bottom` and `b_top`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{CondStatus, Condition, GateCheckReport, Witness};
use crate::code::{CssCode, PauliType};
use crate::complex::{Background, BoundaryLabel, Cell, CellComplex};
use crate::error::{Error, Result};
use crate::gf2::{Gf2Vector, SparseMatrix};

const COLOR_A: u8 = 1;
const COLOR_B: u8 = 2;

const VIRTUAL_NAMES: [&str; 4] = ["a_left", "a_right", "b_bottom", "b_top"];
const VIRTUAL_COLORS: [u8; 4] = [COLOR_A, COLOR_A, COLOR_B, COLOR_B];

#[derive(Clone, Debug)]
pub struct ColorCode2D {
    /// Real face points; virtual points follow them in vertex numbering.
    pub points: Vec<(i32, i32)>,
    pub colors: Vec<u8>,
    /// Qubits as vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Qubit side of the bipartition; `true` receives S, `false` S dagger.
    pub part: Vec<bool>,
    pub code: CssCode,
    /// Supports of the stars of `b_bottom` and `a_left`.
    pub logical_strings: [Vec<usize>; 2],
}

impl ColorCode2D {
    pub fn n_real(&self) -> usize {
        self.points.len()
    }

    pub fn vertex_color(&self, v: usize) -> u8 {
        if v < self.points.len() {
            self.colors[v]
        } else {
            VIRTUAL_COLORS[v - self.points.len()]
        }
    }

    /// `(i, j)` for real points, the side name for virtual ones.
    pub fn vertex_name(&self, v: usize) -> String {
        match self.points.get(v) {
            Some(p) => format!("{p:?}"),
            None => VIRTUAL_NAMES[v - self.points.len()].to_string(),
        }
    }

    fn star(&self, v: usize) -> Vec<usize> {
        (0..self.triangles.len())
            .filter(|&t| self.triangles[t].contains(&v))
            .collect()
    }
}

fn color(p: (i32, i32)) -> u8 {
    (p.0 - p.1).rem_euclid(3) as u8
}

/// Patch whose faces are the triangular lattice points with
/// `0 <= 2i + j <= 3L + 1` and `2 <= j - i <= 3(L + 1)`.
pub fn build_color_code_2d(side: usize) -> Result<ColorCode2D> {
    if side == 0 {
        return Err(Error::InvalidParameter("color code patch size 0".into()));
    }
    let (m1, m2) = (side as i32, side as i32 + 1);
    let (s_max, t_min, t_max) = (3 * m1 + 1, 2, 3 * m2);
    let inside = |p: (i32, i32)| {
        let (s, t) = (2 * p.0 + p.1, p.1 - p.0);
        (0..=s_max).contains(&s) && (t_min..=t_max).contains(&t)
    };
    let span = s_max + t_max + 2;
    let shapes: [[(i32, i32); 3]; 2] = [[(0, 0), (1, 0), (0, 1)], [(0, 0), (1, 0), (1, -1)]];
    let mut real_tris = BTreeSet::new();
    for i in -span..=span {
        for j in -span..=span {
            for shape in &shapes {
                let t = shape.map(|(di, dj)| (i + di, j + dj));
                if t.iter().all(|&p| inside(p)) {
                    let mut t = t;
                    t.sort_unstable();
                    real_tris.insert(t);
                }
            }
        }
    }
    let points: Vec<(i32, i32)> = real_tris
        .iter()
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<(i32, i32), usize> =
        points.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let nr = points.len();
    let mut triangles: Vec<[usize; 3]> = real_tris.iter().map(|t| t.map(|p| index[&p])).collect();

    let mut edge_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in &triangles {
        for (u, v) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            *edge_count.entry((u.min(v), u.max(v))).or_insert(0) += 1;
        }
    }
    let mut virtual_of: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (&(u, v), &c) in &edge_count {
        if c != 1 {
            continue;
        }
        let third = 3 - color(points[u]) - color(points[v]);
        let (pu, pv) = (points[u], points[v]);
        let virt = match third {
            COLOR_A => {
                if (2 * pu.0 + pu.1) + (2 * pv.0 + pv.1) < s_max {
                    0
                } else {
                    1
                }
            }
            COLOR_B => {
                if (pu.1 - pu.0) + (pv.1 - pv.0) < t_min + t_max {
                    2
                } else {
                    3
                }
            }
            _ => {
                return Err(Error::Inconsistent(format!(
                    "boundary edge {pu:?}-{pv:?} needs a C boundary"
                )))
            }
        };
        triangles.push([u, v, nr + virt]);
        virtual_of.entry(u).or_default().insert(virt);
        virtual_of.entry(v).or_default().insert(virt);
    }
    for (&v, virts) in &virtual_of {
        let vs: Vec<usize> = virts.iter().copied().collect();
        match vs.len() {
            1 => {}
            2 => triangles.push([v, nr + vs[0], nr + vs[1]]),
            _ => {
                return Err(Error::Inconsistent(format!(
                    "point {:?} meets three sides",
                    points[v]
                )))
            }
        }
    }

    let part = bipartition(&triangles)?;
    let nq = triangles.len();
    let stars: Vec<Vec<usize>> = (0..nr)
        .map(|v| (0..nq).filter(|&t| triangles[t].contains(&v)).collect())
        .collect();
    let code = CssCode::new(
        SparseMatrix::from_rows(nq, stars.clone()),
        SparseMatrix::from_rows(nq, stars),
    )?;
    let mut cc = ColorCode2D {
        colors: points.iter().map(|&p| color(p)).collect(),
        points,
        triangles,
        part,
        code,
        logical_strings: [Vec::new(), Vec::new()],
    };
    cc.logical_strings = [cc.star(nr + 2), cc.star(nr)];
    let [l1, l2] = &cc.logical_strings;
    let to_vec = |s: &[usize]| Gf2Vector::from_support(nq, s.iter().copied());
    cc.code = cc
        .code
        .clone()
        .with_preferred_x_logicals(vec![to_vec(l1), to_vec(l2)])?;
    Ok(cc)
}

/// Two-coloring of the qubits so that triangles sharing an edge differ.
fn bipartition(triangles: &[[usize; 3]]) -> Result<Vec<bool>> {
    let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (k, t) in triangles.iter().enumerate() {
        for (u, v) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            by_edge.entry((u.min(v), u.max(v))).or_default().push(k);
        }
    }
    let mut adj = vec![Vec::new(); triangles.len()];
    for ts in by_edge.values() {
        for &a in ts {
            for &b in ts {
                if a != b {
                    adj[a].push(b);
                }
            }
        }
    }
    let mut side: Vec<Option<bool>> = vec![None; triangles.len()];
    for start in 0..triangles.len() {
        if side[start].is_some() {
            continue;
        }
        side[start] = Some(true);
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            let s = side[a].unwrap_or(true);
            for &b in &adj[a] {
                match side[b] {
                    None => {
                        side[b] = Some(!s);
                        queue.push_back(b);
                    }
                    Some(t) if t == s => {
                        return Err(Error::Precondition(format!(
                            "qubits {a} and {b} share an edge and a side"
                        )))
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(side.into_iter().map(|s| s.unwrap_or(true)).collect())
}

/// Phase exponent, in units of `i`, picked up by an X operator on `support`
/// under S on one side and S dagger on the other.
fn s_phase(cc: &ColorCode2D, support: &[usize]) -> i64 {
    let a = support.iter().filter(|&&q| cc.part[q]).count() as i64;
    (2 * a - support.len() as i64).rem_euclid(4)
}

/// Checks that S on one side of the bipartition and S dagger on the other
/// maps every X face check to itself times the matching Z check, and maps
/// each X logical to itself times the Z logical of the other qubit.
pub fn check_transversal_s_colorcode(cc: &ColorCode2D) -> Result<GateCheckReport> {
    if cc.part.len() != cc.triangles.len() {
        return Err(Error::Dimension(
            "bipartition does not cover the qubits".into(),
        ));
    }
    let mut faces = Vec::new();
    for (r, row) in cc.code.checks(PauliType::X).iter_rows().enumerate() {
        let phase = s_phase(cc, row);
        if phase != 0 {
            faces.push(Witness {
                ids: vec![format!("F{r}")],
                parity: phase as u8,
            });
        }
    }
    let nq = cc.triangles.len();
    let to_vec = |s: &[usize]| Gf2Vector::from_support(nq, s.iter().copied());
    let xs = cc.logical_strings.clone();
    let x_checks = cc.code.checks(PauliType::X);
    let mut logical = Vec::new();
    for j in 0..2 {
        // The image of X(l_j) carries Z on the same support, which must act
        // as the Z logical of the other qubit.
        let z_part = to_vec(&xs[j]);
        let commutes_with_checks = x_checks.mul_vec(&z_part).is_zero();
        let pairs_right = (0..2).all(|m| to_vec(&xs[m]).dot(&z_part) == (m != j));
        let phase = s_phase(cc, &xs[j]);
        if !commutes_with_checks || !pairs_right || phase % 2 != 0 {
            logical.push(Witness {
                ids: vec![format!("L{j}")],
                parity: phase as u8,
            });
        }
    }
    Ok(GateCheckReport {
        conditions: vec![
            Condition {
                id: "s.face".into(),
                status: if faces.is_empty() {
                    CondStatus::Pass
                } else {
                    CondStatus::Fail
                },
                witnesses: faces,
            },
            Condition {
                id: "s.logical".into(),
                status: if logical.is_empty() {
                    CondStatus::Pass
                } else {
                    CondStatus::Fail
                },
                witnesses: logical,
            },
        ],
    })
}

/// Shrinks the A faces (first lattice) or the B faces (second lattice) to
/// points. Edges of a shrunk lattice are the edges between the two other
/// colors and its faces are their real points. The virtual points of the
/// shrunk color become rough vertices.
pub fn shrunk_lattices(cc: &ColorCode2D) -> Result<(CellComplex, CellComplex)> {
    Ok((shrink(cc, COLOR_A)?, shrink(cc, COLOR_B)?))
}

fn shrink(cc: &ColorCode2D, shrunk: u8) -> Result<CellComplex> {
    let nr = cc.n_real();
    let n_all = nr + VIRTUAL_COLORS.len();
    let coords_of = |v: usize| -> Vec<i32> {
        if v < nr {
            vec![cc.points[v].0, cc.points[v].1]
        } else {
            vec![-1 - (v - nr) as i32, -1]
        }
    };
    let mut vertex_of = vec![usize::MAX; n_all];
    let mut vertices = Vec::new();
    for v in 0..n_all {
        if cc.vertex_color(v) == shrunk {
            vertex_of[v] = vertices.len();
            let label = if v < nr {
                BoundaryLabel::Bulk
            } else {
                BoundaryLabel::OuterE((v - nr) as u32)
            };
            vertices.push(Cell {
                id: vertices.len(),
                coords: coords_of(v),
                label,
                boundary: Vec::new(),
            });
        }
    }
    let mut opposite: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for t in &cc.triangles {
        let Some(k) = (0..3).find(|&k| cc.vertex_color(t[k]) == shrunk) else {
            continue;
        };
        let (u, v) = (t[(k + 1) % 3], t[(k + 2) % 3]);
        opposite
            .entry((u.min(v), u.max(v)))
            .or_default()
            .push(vertex_of[t[k]]);
    }
    let mut edges = Vec::new();
    let mut edges_at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&(u, v), ends) in &opposite {
        if ends.len() != 2 {
            continue;
        }
        let id = edges.len();
        let mut boundary = if ends[0] == ends[1] {
            Vec::new()
        } else {
            ends.clone()
        };
        boundary.sort_unstable();
        let (cu, cv) = (coords_of(u), coords_of(v));
        edges.push(Cell {
            id,
            coords: vec![cu[0] + cv[0], cu[1] + cv[1]],
            label: BoundaryLabel::Bulk,
            boundary,
        });
        edges_at.entry(u).or_default().push(id);
        edges_at.entry(v).or_default().push(id);
    }
    let mut faces = Vec::new();
    for v in 0..nr {
        if cc.vertex_color(v) == shrunk {
            continue;
        }
        faces.push(Cell {
            id: faces.len(),
            coords: coords_of(v),
            label: BoundaryLabel::Bulk,
            boundary: edges_at.get(&v).cloned().unwrap_or_default(),
        });
    }
    CellComplex::from_cells(Background::OpenCube, vec![vertices, edges, faces])
}
