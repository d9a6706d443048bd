//! Pauli operators conjugated by a transversal CCZ, kept as an X part times
//! a diagonal phase polynomial of degree at most two.
//!
//! Qubits of a three-copy stack are indexed globally as
//! `copy * n_sites + site`.

use std::collections::BTreeSet;

use super::{triple_overlaps, x_generators, CondStatus, Condition, StackAlignment, Witness};
use crate::code::{CssCode, PauliOperator, PauliType};
use crate::error::{Error, Result};
use crate::gf2::Gf2Vector;

/// `sign * X^x_support * (-1)^(linear_z . z + sum over pairs z_i z_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePolyOperator {
    pub x_support: Gf2Vector,
    pub linear_z: Gf2Vector,
    /// Unordered pairs stored as `(i, j)` with `i < j`.
    pub quadratic: BTreeSet<(usize, usize)>,
    pub sign: i8,
}

impl PhasePolyOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            x_support: Gf2Vector::zeros(n),
            linear_z: Gf2Vector::zeros(n),
            quadratic: BTreeSet::new(),
            sign: 1,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.x_support.len()
    }

    /// Adds a CZ on `i, j`; a repeated pair cancels.
    pub fn toggle_cz(&mut self, i: usize, j: usize) -> Result<()> {
        if i == j {
            return Err(Error::InvalidParameter(format!("CZ on a single qubit {i}")));
        }
        let p = (i.min(j), i.max(j));
        if !self.quadratic.remove(&p) {
            self.quadratic.insert(p);
        }
        Ok(())
    }

    /// Change of the phase polynomial under `z -> z + shift`, as a linear
    /// form and a constant.
    fn derivative(&self, shift: &Gf2Vector) -> (BTreeSet<usize>, bool) {
        let mut linear = BTreeSet::new();
        let mut toggle = |k: usize| {
            if !linear.remove(&k) {
                linear.insert(k);
            }
        };
        let mut constant = self.linear_z.dot(shift);
        for &(i, j) in &self.quadratic {
            let (si, sj) = (shift.get(i), shift.get(j));
            if si {
                toggle(j);
            }
            if sj {
                toggle(i);
            }
            constant ^= si && sj;
        }
        (linear, constant)
    }

    /// Two such operators commute iff moving each X part through the other
    /// diagonal part changes the phases identically.
    pub fn commutes_with(&self, other: &Self) -> bool {
        self.derivative(&other.x_support) == other.derivative(&self.x_support)
    }

    /// Sites of `copy` in the X part.
    pub fn x_sites(&self, copy: usize, n_sites: usize) -> Vec<usize> {
        self.x_support
            .iter_ones()
            .filter(|&g| g / n_sites == copy)
            .map(|g| g % n_sites)
            .collect()
    }
}

/// Conjugates a CSS operator on `copy` by the transversal CCZ. Each X site
/// picks up a CZ between the other two copies at that site; Z operators are
/// unchanged.
pub fn conjugate_by_ccz(
    s: &PauliOperator,
    copy: usize,
    align: &StackAlignment,
) -> Result<PhasePolyOperator> {
    if align.copies() != 3 || copy >= 3 {
        return Err(Error::InvalidParameter(format!(
            "copy {copy} of a {}-copy stack",
            align.copies()
        )));
    }
    let n = align.n_sites();
    if s.n_qubits() != n {
        return Err(Error::Dimension(format!(
            "operator on {} qubits, stack has {n} sites",
            s.n_qubits()
        )));
    }
    if !s.is_x_type() && !s.is_z_type() {
        return Err(Error::Unsupported("mixed X and Z operator".into()));
    }
    let inv = align.site_of_qubit(copy);
    let mut out = PhasePolyOperator::identity(3 * n);
    let (b, c) = ((copy + 1) % 3, (copy + 2) % 3);
    for q in s.x.iter_ones() {
        let t = inv[q];
        out.x_support.set(copy * n + t, true);
        out.toggle_cz(b * n + t, c * n + t)?;
    }
    for q in s.z.iter_ones() {
        out.linear_z.set(copy * n + inv[q], true);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CzClass {
    /// Every X generator pair of the other two copies meets the CZ support
    /// evenly.
    Identity,
    /// Ids are the generators of the two other copies and the odd overlap.
    NotIdentity(Witness),
}

/// Decides whether the CZ part of `op`, which came from `copy`, acts as the
/// logical identity on the other two codes.
pub fn classify_cz_part(
    op: &PhasePolyOperator,
    copy: usize,
    codes: [&CssCode; 3],
    align: &StackAlignment,
) -> Result<CzClass> {
    align.check_codes(&codes)?;
    let n = align.n_sites();
    let (b, c) = ((copy + 1) % 3, (copy + 2) % 3);
    let mut sites = BTreeSet::new();
    for &(i, j) in &op.quadratic {
        let (ci, cj) = (i / n, j / n);
        if i % n != j % n || ![ci, cj].contains(&b) || ![ci, cj].contains(&c) {
            return Err(Error::Precondition(format!(
                "CZ pair ({i}, {j}) is not a stacked pair"
            )));
        }
        sites.insert(i % n);
    }
    let region = [super::Generator {
        id: "cz".into(),
        logical: None,
        sites: sites.into_iter().collect(),
    }];
    let gb = x_generators(codes[b], align, b)?;
    let gc = x_generators(codes[c], align, c)?;
    let counts = triple_overlaps([&region, &gb, &gc], n);
    let odd = counts
        .iter()
        .filter(|(_, &k)| k % 2 == 1)
        .map(|(&(_, y, z), _)| (y, z))
        .min();
    Ok(match odd {
        None => CzClass::Identity,
        Some((y, z)) => CzClass::NotIdentity(Witness {
            ids: vec![gb[y as usize].id.clone(), gc[z as usize].id.clone()],
            parity: 1,
        }),
    })
}

/// Every X and Z check of the three codes conjugated by the transversal
/// CCZ, tagged with its copy and an id such as `X4` or `Z0`.
pub fn conjugated_stabilizers(
    codes: [&CssCode; 3],
    align: &StackAlignment,
) -> Result<Vec<(usize, String, PhasePolyOperator)>> {
    align.check_codes(&codes)?;
    let mut out = Vec::new();
    for (copy, code) in codes.iter().enumerate() {
        for (t, tag) in [(PauliType::X, 'X'), (PauliType::Z, 'Z')] {
            for (r, row) in code.checks(t).iter_rows().enumerate() {
                let v = Gf2Vector::from_support(code.n_qubits(), row.iter().copied());
                let p = match t {
                    PauliType::X => PauliOperator::x_type(v),
                    PauliType::Z => PauliOperator::z_type(v),
                };
                out.push((
                    copy,
                    format!("{tag}{r}"),
                    conjugate_by_ccz(&p, copy, align)?,
                ));
            }
        }
    }
    Ok(out)
}

/// Condition `ccz.commute`: the conjugated checks commute pairwise. Ids
/// in witnesses are prefixed by the copy, as in `1:X4`.
pub fn check_conjugated_commutation(
    codes: [&CssCode; 3],
    align: &StackAlignment,
) -> Result<Condition> {
    let ops = conjugated_stabilizers(codes, align)?;
    let mut witnesses = Vec::new();
    for (i, (ca, ia, a)) in ops.iter().enumerate() {
        for (cb, ib, b) in &ops[i + 1..] {
            if !a.commutes_with(b) {
                witnesses.push(Witness {
                    ids: vec![format!("{ca}:{ia}"), format!("{cb}:{ib}")],
                    parity: 1,
                });
            }
        }
    }
    Ok(Condition {
        id: "ccz.commute".into(),
        status: if witnesses.is_empty() {
            CondStatus::Pass
        } else {
            CondStatus::Fail
        },
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(n: usize, x: &[usize], lin: &[usize], quad: &[(usize, usize)]) -> PhasePolyOperator {
        let mut o = PhasePolyOperator::identity(n);
        o.x_support = Gf2Vector::from_support(n, x.iter().copied());
        o.linear_z = Gf2Vector::from_support(n, lin.iter().copied());
        for &(i, j) in quad {
            o.toggle_cz(i, j).unwrap();
        }
        o
    }

    #[test]
    fn pauli_commutation_is_recovered() {
        let x = op(3, &[0, 1], &[], &[]);
        let z1 = op(3, &[], &[0], &[]);
        let z2 = op(3, &[], &[0, 1], &[]);
        assert!(!x.commutes_with(&z1));
        assert!(x.commutes_with(&z2));
    }

    #[test]
    fn cz_against_x() {
        // X_0 and CZ_01 anticommute up to a Z_1, so they do not commute.
        let x0 = op(2, &[0], &[], &[]);
        let cz = op(2, &[], &[], &[(0, 1)]);
        assert!(!x0.commutes_with(&cz));
        let xx = op(2, &[0, 1], &[], &[]);
        assert!(!xx.commutes_with(&cz));
    }

    #[test]
    fn conjugation_shapes() {
        let al = StackAlignment::identity(4, 3).unwrap();
        let s = PauliOperator::x_type(Gf2Vector::from_support(4, [0, 2]));
        let c = conjugate_by_ccz(&s, 1, &al).unwrap();
        assert_eq!(c.x_support.support(), vec![4, 6]);
        let pairs: Vec<_> = c.quadratic.iter().copied().collect();
        assert_eq!(pairs, vec![(0, 8), (2, 10)]);
        let z = PauliOperator::z_type(Gf2Vector::from_support(4, [1]));
        let cz = conjugate_by_ccz(&z, 0, &al).unwrap();
        assert!(cz.quadratic.is_empty() && cz.x_support.is_zero());
        let mut mixed = PauliOperator::identity(4);
        mixed.x.set(0, true);
        mixed.z.set(1, true);
        assert!(conjugate_by_ccz(&mixed, 0, &al).is_err());
    }
}
