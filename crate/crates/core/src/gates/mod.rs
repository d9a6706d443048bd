//! Transversal gate conditions on aligned stacks of CSS codes.
//!
//! Codes in a stack share a site set; the alignment maps each site to one
//! qubit per code. A transversal CZ (two copies) or CCZ (three copies) acts
//! site by site, and whether it is a logical gate reduces to parities of
//! pairwise or triple overlaps of X-type generators.

mod color;
mod merge;
mod phasepoly;
mod stack;

pub use color::{build_color_code_2d, check_transversal_s_colorcode, shrunk_lattices, ColorCode2D};
pub use merge::{merge_rough, MergeInterface, MergeOutcome};
pub use phasepoly::{
    check_conjugated_commutation, classify_cz_part, conjugate_by_ccz, conjugated_stabilizers,
    CzClass, PhasePolyOperator,
};
pub use stack::{build_vasmer_browne_stack, VbStack};

use std::collections::HashMap;
use std::fmt;

use crate::code::{logical_basis, CssCode, PauliType};
use crate::error::{Error, Result};
use crate::gf2::Gf2Vector;

/// Site-to-qubit maps for two or three codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackAlignment {
    n_sites: usize,
    maps: Vec<Vec<usize>>,
}

impl StackAlignment {
    /// `maps[c][s]` is the qubit of code `c` sitting at site `s`.
    pub fn new(n_sites: usize, maps: Vec<Vec<usize>>) -> Result<Self> {
        if !(2..=3).contains(&maps.len()) {
            return Err(Error::InvalidParameter(format!(
                "{} copies in a stack",
                maps.len()
            )));
        }
        for (c, m) in maps.iter().enumerate() {
            if m.len() != n_sites {
                return Err(Error::Dimension(format!(
                    "copy {c} maps {} sites, expected {n_sites}",
                    m.len()
                )));
            }
            let mut seen = vec![false; n_sites];
            for &q in m {
                if q >= n_sites || std::mem::replace(&mut seen[q], true) {
                    return Err(Error::InvalidParameter(format!(
                        "copy {c} does not map sites bijectively"
                    )));
                }
            }
        }
        Ok(Self { n_sites, maps })
    }

    pub fn identity(n_sites: usize, copies: usize) -> Result<Self> {
        Self::new(n_sites, vec![(0..n_sites).collect(); copies])
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn copies(&self) -> usize {
        self.maps.len()
    }

    pub fn qubit(&self, copy: usize, site: usize) -> usize {
        self.maps[copy][site]
    }

    /// Inverse map for one copy.
    pub fn site_of_qubit(&self, copy: usize) -> Vec<usize> {
        let mut inv = vec![0; self.n_sites];
        for (s, &q) in self.maps[copy].iter().enumerate() {
            inv[q] = s;
        }
        inv
    }

    pub fn check_codes(&self, codes: &[&CssCode]) -> Result<()> {
        if codes.len() != self.maps.len() {
            return Err(Error::Dimension(format!(
                "{} codes for an alignment of {} copies",
                codes.len(),
                self.maps.len()
            )));
        }
        for (c, code) in codes.iter().enumerate() {
            if code.n_qubits() != self.n_sites {
                return Err(Error::Dimension(format!(
                    "code {c} has {} qubits, alignment has {} sites",
                    code.n_qubits(),
                    self.n_sites
                )));
            }
        }
        Ok(())
    }

    /// Qubit vector of `copy` moved to site indexing.
    pub fn to_sites(&self, copy: usize, v: &Gf2Vector) -> Gf2Vector {
        let inv = self.site_of_qubit(copy);
        Gf2Vector::from_support(self.n_sites, v.iter_ones().map(|q| inv[q]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CondStatus {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for CondStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CondStatus::Pass => "PASS",
            CondStatus::Fail => "FAIL",
            CondStatus::NotApplicable => "NA",
        })
    }
}

/// Generators involved in a failing check. Ids are `X<row>` for stabilizer
/// rows, `L<j>` for X logicals and `F<face>` for color-code faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub ids: Vec<String>,
    pub parity: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub id: String,
    pub status: CondStatus,
    pub witnesses: Vec<Witness>,
}

impl Condition {
    fn from_witnesses(id: &str, witnesses: Vec<Witness>) -> Self {
        let status = if witnesses.is_empty() {
            CondStatus::Pass
        } else {
            CondStatus::Fail
        };
        Self {
            id: id.to_string(),
            status,
            witnesses,
        }
    }

    fn not_applicable(id: &str) -> Self {
        Self {
            id: id.to_string(),
            status: CondStatus::NotApplicable,
            witnesses: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GateCheckReport {
    pub conditions: Vec<Condition>,
}

impl GateCheckReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.status != CondStatus::Fail)
    }

    pub fn condition(&self, id: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &Witness)> {
        self.conditions
            .iter()
            .flat_map(|c| c.witnesses.iter().map(move |w| (c.id.as_str(), w)))
    }

    /// One `COND` line per passing or inapplicable condition and one per
    /// witness of a failing one.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.conditions {
            if c.witnesses.is_empty() {
                out.push_str(&format!("COND {} {}\n", c.id, c.status));
            }
            for w in &c.witnesses {
                let names = ["a", "b", "c"];
                let ids: Vec<String> = w
                    .ids
                    .iter()
                    .zip(names)
                    .map(|(id, n)| format!("{n}={id}"))
                    .collect();
                out.push_str(&format!(
                    "COND {} {} witness: {} parity={}\n",
                    c.id,
                    c.status,
                    ids.join(" "),
                    w.parity
                ));
            }
        }
        out
    }
}

impl fmt::Display for GateCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// X-type generator of one copy in site coordinates.
#[derive(Clone, Debug)]
pub(crate) struct Generator {
    pub id: String,
    pub logical: Option<usize>,
    pub sites: Vec<usize>,
}

/// Stabilizer rows followed by the X logicals of `code`, in site indexing.
pub(crate) fn x_generators(
    code: &CssCode,
    align: &StackAlignment,
    copy: usize,
) -> Result<Vec<Generator>> {
    let inv = align.site_of_qubit(copy);
    let to_sites = |qs: &mut dyn Iterator<Item = usize>| -> Vec<usize> {
        let mut s: Vec<usize> = qs.map(|q| inv[q]).collect();
        s.sort_unstable();
        s
    };
    let mut gens: Vec<Generator> = code
        .checks(PauliType::X)
        .iter_rows()
        .enumerate()
        .map(|(r, row)| Generator {
            id: format!("X{r}"),
            logical: None,
            sites: to_sites(&mut row.iter().copied()),
        })
        .collect();
    let (_, xs) = logical_basis(code)?;
    for (j, x) in xs.iter().enumerate() {
        gens.push(Generator {
            id: format!("L{j}"),
            logical: Some(j),
            sites: to_sites(&mut x.x.iter_ones()),
        });
    }
    Ok(gens)
}

fn incidence(gens: &[Generator], n_sites: usize) -> Vec<Vec<u32>> {
    let mut inc = vec![Vec::new(); n_sites];
    for (g, gen) in gens.iter().enumerate() {
        for &s in &gen.sites {
            inc[s].push(g as u32);
        }
    }
    inc
}

/// Overlap counts of every pair of generators that share a site.
fn pair_overlaps(a: &[Generator], b: &[Generator], n_sites: usize) -> HashMap<(u32, u32), u32> {
    let (ia, ib) = (incidence(a, n_sites), incidence(b, n_sites));
    let mut counts = HashMap::new();
    for s in 0..n_sites {
        for &x in &ia[s] {
            for &y in &ib[s] {
                *counts.entry((x, y)).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Overlap counts of every triple of generators that share a site.
pub(crate) fn triple_overlaps(
    gens: [&[Generator]; 3],
    n_sites: usize,
) -> HashMap<(u32, u32, u32), u32> {
    let inc = gens.map(|g| incidence(g, n_sites));
    let mut counts = HashMap::new();
    for s in 0..n_sites {
        for &x in &inc[0][s] {
            for &y in &inc[1][s] {
                for &z in &inc[2][s] {
                    *counts.entry((x, y, z)).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

fn sorted_witnesses(mut w: Vec<(Vec<u32>, Witness)>) -> Vec<Witness> {
    w.sort_by(|a, b| a.0.cmp(&b.0));
    w.into_iter().map(|(_, w)| w).collect()
}

/// Conditions for transversal CZ between two aligned codes: stabilizer
/// pairs overlap evenly, stabilizers overlap the other code's X logicals
/// evenly, and the X logical overlap matrix is the identity.
pub fn check_transversal_cz(
    a: &CssCode,
    b: &CssCode,
    align: &StackAlignment,
) -> Result<GateCheckReport> {
    align.check_codes(&[a, b])?;
    let n = align.n_sites();
    let ga = x_generators(a, align, 0)?;
    let gb = x_generators(b, align, 1)?;
    let counts = pair_overlaps(&ga, &gb, n);
    let (mut ss, mut sl) = (Vec::new(), Vec::new());
    for (&(x, y), &c) in &counts {
        let (p, q) = (&ga[x as usize], &gb[y as usize]);
        if c % 2 == 1 && (p.logical.is_none() || q.logical.is_none()) {
            let w = Witness {
                ids: vec![p.id.clone(), q.id.clone()],
                parity: 1,
            };
            let key = vec![x, y];
            if p.logical.is_none() && q.logical.is_none() {
                ss.push((key, w));
            } else {
                sl.push((key, w));
            }
        }
    }
    let mut conditions = vec![
        Condition::from_witnesses("cz.i", sorted_witnesses(ss)),
        Condition::from_witnesses("cz.ii", sorted_witnesses(sl)),
    ];
    let la: Vec<usize> = (0..ga.len()).filter(|&g| ga[g].logical.is_some()).collect();
    let lb: Vec<usize> = (0..gb.len()).filter(|&g| gb[g].logical.is_some()).collect();
    if la.is_empty() || lb.is_empty() {
        conditions.push(Condition::not_applicable("cz.iii"));
    } else {
        let mut w = Vec::new();
        for &x in &la {
            for &y in &lb {
                let c = counts.get(&(x as u32, y as u32)).copied().unwrap_or(0);
                let want = ga[x].logical == gb[y].logical;
                if (c % 2 == 1) != want {
                    w.push(Witness {
                        ids: vec![ga[x].id.clone(), gb[y].id.clone()],
                        parity: (c % 2) as u8,
                    });
                }
            }
        }
        conditions.push(Condition::from_witnesses("cz.iii", w));
    }
    Ok(GateCheckReport { conditions })
}

/// Conditions for transversal CCZ on three aligned codes. Every triple of
/// X generators with at least one stabilizer must overlap evenly, sorted by
/// how many logicals it contains, and the triple overlaps of X logicals
/// must be odd exactly on the diagonal.
pub fn check_transversal_ccz(
    a: &CssCode,
    b: &CssCode,
    c: &CssCode,
    align: &StackAlignment,
) -> Result<GateCheckReport> {
    align.check_codes(&[a, b, c])?;
    let n = align.n_sites();
    let gens = [
        x_generators(a, align, 0)?,
        x_generators(b, align, 1)?,
        x_generators(c, align, 2)?,
    ];
    let counts = triple_overlaps([&gens[0], &gens[1], &gens[2]], n);
    let mut by_class: [Vec<(Vec<u32>, Witness)>; 3] = Default::default();
    for (&(x, y, z), &cnt) in &counts {
        if cnt % 2 == 0 {
            continue;
        }
        let g = [
            &gens[0][x as usize],
            &gens[1][y as usize],
            &gens[2][z as usize],
        ];
        let logicals = g.iter().filter(|g| g.logical.is_some()).count();
        if logicals == 3 {
            continue;
        }
        by_class[logicals].push((
            vec![x, y, z],
            Witness {
                ids: g.iter().map(|g| g.id.clone()).collect(),
                parity: 1,
            },
        ));
    }
    let [sss, ssl, sll] = by_class;
    let mut conditions = vec![
        Condition::from_witnesses("ccz.sss", sorted_witnesses(sss)),
        Condition::from_witnesses("ccz.ssl", sorted_witnesses(ssl)),
        Condition::from_witnesses("ccz.sll", sorted_witnesses(sll)),
    ];
    let logical_idx: Vec<Vec<usize>> = gens
        .iter()
        .map(|g| (0..g.len()).filter(|&i| g[i].logical.is_some()).collect())
        .collect();
    if logical_idx.iter().any(|l| l.is_empty()) {
        conditions.push(Condition::not_applicable("ccz.lll"));
    } else {
        let mut w = Vec::new();
        for &x in &logical_idx[0] {
            for &y in &logical_idx[1] {
                for &z in &logical_idx[2] {
                    let cnt = counts
                        .get(&(x as u32, y as u32, z as u32))
                        .copied()
                        .unwrap_or(0);
                    let (j, l, m) = (gens[0][x].logical, gens[1][y].logical, gens[2][z].logical);
                    let want = j == l && l == m;
                    if (cnt % 2 == 1) != want {
                        w.push(Witness {
                            ids: vec![
                                gens[0][x].id.clone(),
                                gens[1][y].id.clone(),
                                gens[2][z].id.clone(),
                            ],
                            parity: (cnt % 2) as u8,
                        });
                    }
                }
            }
        }
        conditions.push(Condition::from_witnesses("ccz.lll", w));
    }
    Ok(GateCheckReport { conditions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::css_from_complex;
    use crate::complex::build_surface_layout;
    use crate::gf2::SparseMatrix;
    use std::sync::Arc;

    fn surface() -> CssCode {
        css_from_complex(Arc::new(build_surface_layout(2, 3).unwrap()), 1).unwrap()
    }

    #[test]
    fn alignment_validation() {
        assert!(StackAlignment::new(3, vec![vec![0, 1, 2], vec![0, 0, 2]]).is_err());
        assert!(StackAlignment::new(3, vec![vec![0, 1, 2]]).is_err());
        assert!(StackAlignment::new(3, vec![vec![2, 0, 1], vec![0, 1]]).is_err());
        let a = StackAlignment::new(3, vec![vec![2, 0, 1], vec![0, 1, 2]]).unwrap();
        assert_eq!(a.site_of_qubit(0), vec![1, 2, 0]);
    }

    #[test]
    fn cz_on_rotated_pair() {
        let a = surface();
        let b = a.swap_xz();
        let al = StackAlignment::identity(a.n_qubits(), 2).unwrap();
        let r = check_transversal_cz(&a, &b, &al).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.condition("cz.iii").unwrap().status, CondStatus::Pass);
    }

    #[test]
    fn cz_on_identical_copies_fails() {
        let a = surface();
        let al = StackAlignment::identity(a.n_qubits(), 2).unwrap();
        let r = check_transversal_cz(&a, &a, &al).unwrap();
        assert!(!r.passed());
        assert!(r.failures().all(|(_, w)| w.ids.len() == 2));
        assert!(r.to_text().contains("FAIL witness: a="));
    }

    #[test]
    fn cz_vacuous_without_stabilizers() {
        let n = 4;
        let t = CssCode::new(SparseMatrix::new(n), SparseMatrix::new(n)).unwrap();
        let al = StackAlignment::identity(n, 2).unwrap();
        let r = check_transversal_cz(&t, &t, &al).unwrap();
        assert_eq!(r.condition("cz.i").unwrap().status, CondStatus::Pass);
        assert_eq!(r.condition("cz.ii").unwrap().status, CondStatus::Pass);
    }

    #[test]
    fn ccz_na_without_logicals() {
        let hx = SparseMatrix::from_rows(2, vec![vec![0], vec![1]]);
        let z = CssCode::new(hx, SparseMatrix::new(2)).unwrap();
        let al = StackAlignment::identity(2, 3).unwrap();
        let r = check_transversal_ccz(&z, &z, &z, &al).unwrap();
        assert_eq!(
            r.condition("ccz.lll").unwrap().status,
            CondStatus::NotApplicable
        );
        assert!(r.to_text().contains("COND ccz.lll NA"));
    }

    #[test]
    fn mismatched_alignment() {
        let a = surface();
        let al = StackAlignment::identity(a.n_qubits() + 1, 2).unwrap();
        assert!(check_transversal_cz(&a, &a, &al).is_err());
    }
}
