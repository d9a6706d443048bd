//! Z2 homology and cohomology of cell complexes, absolute and relative.
//!
//! Relative groups `H_i(L, B)` are computed as the homology of the quotient
//! `L/B`, where `B` is the closure of the cells carrying the requested
//! labels. The two agree for `i > 0`; at `i = 0` the quotient counts one
//! extra component and the result is flagged.

use crate::complex::{BoundaryLabel, CellComplex};
use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;

#[derive(Clone, Debug)]
pub struct HomologyRequest<'a> {
    pub complex: &'a CellComplex,
    pub grade: usize,
    /// Empty means absolute homology.
    pub relative_labels: Vec<BoundaryLabel>,
}

impl<'a> HomologyRequest<'a> {
    pub fn absolute(complex: &'a CellComplex, grade: usize) -> Self {
        Self {
            complex,
            grade,
            relative_labels: Vec::new(),
        }
    }

    pub fn relative(complex: &'a CellComplex, grade: usize, labels: Vec<BoundaryLabel>) -> Self {
        Self {
            complex,
            grade,
            relative_labels: labels,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Betti {
    pub value: usize,
    /// Set for grade 0 on a quotient, where the value is one more than the
    /// reduced relative group.
    pub reduced_caveat: bool,
}

fn check_grade(c: &CellComplex, i: usize) -> Result<()> {
    if i > c.dim() {
        return Err(Error::InvalidParameter(format!(
            "grade {i} exceeds dimension {}",
            c.dim()
        )));
    }
    Ok(())
}

fn boundary_rank(c: &CellComplex, k: usize) -> usize {
    if k == 0 || k > c.dim() {
        0
    } else {
        c.boundary_matrix(k).rank()
    }
}

/// `dim H_i` of a complex with no relative part.
pub fn absolute_betti(c: &CellComplex, i: usize) -> usize {
    c.count(i) - boundary_rank(c, i) - boundary_rank(c, i + 1)
}

/// `dim H^i` from the transposed maps.
pub fn absolute_cobetti(c: &CellComplex, i: usize) -> usize {
    let rank_t = |k: usize| {
        if k == 0 || k > c.dim() {
            0
        } else {
            c.boundary_matrix(k).transpose().rank()
        }
    };
    c.count(i) - rank_t(i + 1) - rank_t(i)
}

fn relative_space(c: &CellComplex, labels: &[BoundaryLabel]) -> Result<Option<CellComplex>> {
    if labels.is_empty() {
        return Ok(None);
    }
    let mask = c.closure(&c.label_mask(|l| labels.contains(&l)));
    if !mask.iter().flatten().any(|&b| b) {
        return Ok(None);
    }
    c.quotient_mask(&mask).map(Some)
}

pub fn betti(req: &HomologyRequest<'_>) -> Result<Betti> {
    check_grade(req.complex, req.grade)?;
    Ok(match relative_space(req.complex, &req.relative_labels)? {
        None => Betti {
            value: absolute_betti(req.complex, req.grade),
            reduced_caveat: false,
        },
        Some(q) => Betti {
            value: absolute_betti(&q, req.grade),
            reduced_caveat: req.grade == 0,
        },
    })
}

pub fn cobetti(req: &HomologyRequest<'_>) -> Result<Betti> {
    check_grade(req.complex, req.grade)?;
    Ok(match relative_space(req.complex, &req.relative_labels)? {
        None => Betti {
            value: absolute_cobetti(req.complex, req.grade),
            reduced_caveat: false,
        },
        Some(q) => Betti {
            value: absolute_cobetti(&q, req.grade),
            reduced_caveat: req.grade == 0,
        },
    })
}

/// Shorthand for the homology of a complex relative to all its rough
/// (`E`) cells, which is what a CSS code on it encodes.
pub fn betti_relative_e(c: &CellComplex, i: usize) -> Result<usize> {
    let labels: Vec<BoundaryLabel> = c
        .labels_present()
        .into_iter()
        .filter(|l| l.is_e())
        .collect();
    Ok(betti(&HomologyRequest::relative(c, i, labels))?.value)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LefschetzReport {
    pub grade: usize,
    /// `dim H_i(L, B_e)`.
    pub lhs: usize,
    /// `dim H_(n-i)(L, B_m)`.
    pub rhs: usize,
    /// `dim H^(n-i)(L, B_m)` from cochains vanishing on `B_m`.
    pub rhs_cochain: usize,
    pub holds: bool,
}

impl std::fmt::Display for LefschetzReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "grade {} lhs {} rhs {} rhs_cochain {} {}",
            self.grade,
            self.lhs,
            self.rhs,
            self.rhs_cochain,
            if self.holds { "PASS" } else { "FAIL" }
        )
    }
}

/// Compares `H_i(L, B_e)` with `H_(n-i)(L, B_m)`. The dual side is
/// computed on the same cellulation, where it equals the homology of the
/// dual lattice relative to the dual of `B_m`.
pub fn verify_lefschetz(
    c: &CellComplex,
    i: usize,
    labels_e: &[BoundaryLabel],
    labels_m: &[BoundaryLabel],
) -> Result<LefschetzReport> {
    check_grade(c, i)?;
    if let Some(l) = labels_e.iter().find(|l| labels_m.contains(l)) {
        return Err(Error::InvalidParameter(format!(
            "label {l} is in both sets"
        )));
    }
    if let Some(l) = c
        .labels_present()
        .into_iter()
        .find(|l| *l != BoundaryLabel::Bulk && !labels_e.contains(l) && !labels_m.contains(l))
    {
        return Err(Error::Precondition(format!(
            "boundary label {l} is not assigned"
        )));
    }
    let n = c.dim();
    // The quotient adds the collapsed point as one extra grade-0 class.
    let relative = |b: Betti| b.value - usize::from(b.reduced_caveat);
    let lhs = relative(betti(&HomologyRequest::relative(c, i, labels_e.to_vec()))?);
    let rhs = relative(betti(&HomologyRequest::relative(
        c,
        n - i,
        labels_m.to_vec(),
    ))?);
    let rhs_cochain = relative_cochain_dim(c, n - i, labels_m);
    Ok(LefschetzReport {
        grade: i,
        lhs,
        rhs,
        rhs_cochain,
        holds: lhs == rhs && rhs == rhs_cochain,
    })
}

/// Cohomology of the cochains supported away from the closure of the
/// labelled cells.
fn relative_cochain_dim(c: &CellComplex, j: usize, labels: &[BoundaryLabel]) -> usize {
    let mask = c.closure(&c.label_mask(|l| labels.contains(&l)));
    let free: Vec<Vec<usize>> = mask
        .iter()
        .map(|m| (0..m.len()).filter(|&x| !m[x]).collect())
        .collect();
    // Coboundary from grade k to k+1 restricted to free cells.
    let cob_rank = |k: usize| -> usize {
        if k >= c.dim() {
            return 0;
        }
        let b = c.boundary_matrix(k + 1);
        let rows: Gf2Matrix = b.select_rows(&free[k]).select_columns(&free[k + 1]);
        rows.transpose().rank()
    };
    let below = if j == 0 { 0 } else { cob_rank(j - 1) };
    free[j].len() - cob_rank(j) - below
}
