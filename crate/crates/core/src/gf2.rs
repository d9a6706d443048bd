//! Bit-packed linear algebra over GF(2).
//!
//! Matrices are row-major with 64 columns per word. Elimination is a full
//! forward and backward pass that always picks the first row carrying a
//! one in the current column, so kernels and solutions are reproducible.

use std::fmt;

use crate::error::{parse_err, Error, Result};

const W: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(W)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Gf2Vector {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Vector with ones at the given positions. Repeated positions cancel.
    pub fn from_support(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in idx {
            v.flip(i);
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        Self::from_support(len, [i])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / W] >> (i % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % W);
        if b {
            self.words[i / W] |= m;
        } else {
            self.words[i / W] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / W] ^= 1u64 << (i % W);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Parity of the overlap.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "vector length mismatch");
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    pub fn overlap(&self, other: &Self) -> usize {
        assert_eq!(self.len, other.len, "vector length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut v = self.clone();
        v.xor_assign(other);
        v
    }

    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "vector length mismatch");
        Self {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * W + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * W + t)
            })
        })
    }

    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }
}

impl fmt::Display for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Gf2Vector]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, v) in rows.iter().enumerate() {
            if v.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {r} has length {} but matrix has {cols} columns",
                    v.len()
                )));
            }
            m.row_words_mut(r).copy_from_slice(v.words());
        }
        Ok(m)
    }

    /// Rows given as lists of column indices. Repeated indices cancel.
    pub fn from_supports(cols: usize, rows: &[Vec<usize>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, s) in rows.iter().enumerate() {
            for &c in s {
                m.flip(r, c);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / W] >> (c % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let m = 1u64 << (c % W);
        let w = &mut self.data[r * self.stride + c / W];
        if b {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / W] ^= 1u64 << (c % W);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> Gf2Vector {
        Gf2Vector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn row_vectors(&self) -> Vec<Gf2Vector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn column(&self, c: usize) -> Gf2Vector {
        let mut v = Gf2Vector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (x, y) = self.data.split_at_mut(hi * s);
        x[lo * s..(lo + 1) * s].swap_with_slice(&mut y[..s]);
    }

    /// dst ^= src, touching only words from `from_word` on.
    #[inline]
    fn xor_row_into(&mut self, src: usize, dst: usize, from_word: usize) {
        let s = self.stride;
        if src < dst {
            let (x, y) = self.data.split_at_mut(dst * s);
            let a = &x[src * s + from_word..(src + 1) * s];
            for (d, v) in y[from_word..s].iter_mut().zip(a) {
                *d ^= v;
            }
        } else {
            let (x, y) = self.data.split_at_mut(src * s);
            let a = &y[from_word..s];
            for (d, v) in x[dst * s + from_word..(dst + 1) * s].iter_mut().zip(a) {
                *d ^= v;
            }
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for (wi, &w) in self.row_words(r).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let c = wi * W + w.trailing_zeros() as usize;
                    w &= w - 1;
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &Gf2Vector) -> Result<Gf2Vector> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let mut out = Gf2Vector::zeros(self.rows);
        for r in 0..self.rows {
            let mut acc = 0u32;
            for (a, b) in self.row_words(r).iter().zip(v.words()) {
                acc ^= (a & b).count_ones();
            }
            if acc & 1 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let s = out.stride;
                    let src = other.row_words(k).to_vec();
                    for (d, v) in out.data[r * s..(r + 1) * s].iter_mut().zip(&src) {
                        *d ^= v;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    m.set(r, j, true);
                }
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), self.cols);
        for (j, &r) in rows.iter().enumerate() {
            m.row_words_mut(j).copy_from_slice(self.row_words(r));
        }
        m
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Dimension("vstack column mismatch".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            data,
        })
    }

    /// In-place elimination. Returns pivot columns in row order. With
    /// `full` the result is reduced row echelon form. `aug` receives the
    /// same row operations.
    fn eliminate(&mut self, full: bool, mut aug: Option<&mut Gf2Vector>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let wi = c / W;
            let bit = 1u64 << (c % W);
            let Some(p) = (r..self.rows).find(|&i| self.data[i * self.stride + wi] & bit != 0)
            else {
                continue;
            };
            self.swap_rows(r, p);
            if let Some(a) = aug.as_deref_mut() {
                let (x, y) = (a.get(r), a.get(p));
                a.set(r, y);
                a.set(p, x);
            }
            let start = if full { 0 } else { r + 1 };
            for i in start..self.rows {
                if i != r && self.data[i * self.stride + wi] & bit != 0 {
                    self.xor_row_into(r, i, wi);
                    if let Some(a) = aug.as_deref_mut() {
                        if a.get(r) {
                            a.flip(i);
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let p = m.eliminate(true, None);
        (m, p)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.eliminate(false, None).len()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("gf2matrix v1\n{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                s.push(if self.get(r, c) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        Self::read_lines(&mut lines)
    }

    pub(crate) fn read_lines<'a>(
        lines: &mut impl Iterator<Item = (usize, &'a str)>,
    ) -> Result<Self> {
        let (n, head) = lines.next().ok_or_else(|| parse_err(0, "missing header"))?;
        if head.trim() != "gf2matrix v1" {
            return Err(parse_err(n + 1, "expected `gf2matrix v1`"));
        }
        let (n, dims) = lines
            .next()
            .ok_or_else(|| parse_err(n + 1, "missing dimensions"))?;
        let mut it = dims.split_whitespace().map(str::parse::<usize>);
        let (Some(Ok(rows)), Some(Ok(cols)), None) = (it.next(), it.next(), it.next()) else {
            return Err(parse_err(n + 1, "expected `<rows> <cols>`"));
        };
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            let (n, line) = lines
                .next()
                .ok_or_else(|| parse_err(n + 1, format!("missing row {r}")))?;
            let line = line.trim_end();
            if line.len() != cols {
                return Err(parse_err(n + 1, format!("row has {} entries", line.len())));
            }
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(r, c, true),
                    _ => return Err(parse_err(n + 1, format!("bad character {ch:?}"))),
                }
            }
        }
        Ok(m)
    }
}

pub fn rank(m: &Gf2Matrix) -> usize {
    m.rank()
}

/// Basis of the right null space, one vector per free column in
/// increasing column order.
pub fn kernel_basis(m: &Gf2Matrix) -> Vec<Gf2Vector> {
    let (r, pivots) = m.rref();
    let mut is_pivot = vec![false; m.cols()];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for f in (0..m.cols()).filter(|&c| !is_pivot[c]) {
        let mut v = Gf2Vector::zeros(m.cols());
        v.set(f, true);
        for (row, &p) in pivots.iter().enumerate() {
            if r.get(row, f) {
                v.set(p, true);
            }
        }
        out.push(v);
    }
    out
}

/// Some `x` with `m x = b`, free variables set to zero.
pub fn solve(m: &Gf2Matrix, b: &Gf2Vector) -> Result<Option<Gf2Vector>> {
    if b.len() != m.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            m.rows()
        )));
    }
    let mut a = m.clone();
    let mut rhs = b.clone();
    let pivots = a.eliminate(true, Some(&mut rhs));
    if (pivots.len()..m.rows()).any(|r| rhs.get(r)) {
        return Ok(None);
    }
    let mut x = Gf2Vector::zeros(m.cols());
    for (row, &p) in pivots.iter().enumerate() {
        if rhs.get(row) {
            x.set(p, true);
        }
    }
    Ok(Some(x))
}

/// `rank(space) - rank(subspace)` after checking row-span containment.
pub fn quotient_dim(space: &Gf2Matrix, subspace: &Gf2Matrix) -> Result<usize> {
    if space.cols() != subspace.cols() {
        return Err(Error::Dimension(format!(
            "{} columns against {}",
            space.cols(),
            subspace.cols()
        )));
    }
    let mut basis = EchelonBasis::new(space.cols());
    for r in 0..space.rows() {
        basis.insert(space.row(r));
    }
    for r in 0..subspace.rows() {
        if !basis.reduce(&subspace.row(r)).is_zero() {
            return Err(Error::NotContained { row: r });
        }
    }
    Ok(basis.rank() - subspace.rank())
}

/// Incrementally built, fully reduced basis of a row space.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    len: usize,
    rows: Vec<Gf2Vector>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_matrix(m: &Gf2Matrix) -> Self {
        let mut b = Self::new(m.cols());
        for r in 0..m.rows() {
            b.insert(m.row(r));
        }
        b
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.len
    }

    pub fn reduce(&self, v: &Gf2Vector) -> Gf2Vector {
        let mut v = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
        v
    }

    pub fn contains(&self, v: &Gf2Vector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: Gf2Vector) -> bool {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        let v = self.reduce(&v);
        let Some(p) = v.first_one() else {
            return false;
        };
        for row in &mut self.rows {
            if row.get(p) {
                row.xor_assign(&v);
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    pub fn rows(&self) -> &[Gf2Vector] {
        &self.rows
    }
}

/// Row-list sparse matrix used for stabilizers and boundary maps.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SparseMatrix {
    cols: usize,
    rows: Vec<Vec<usize>>,
}

impl SparseMatrix {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<usize>>) -> Self {
        let mut m = Self::new(cols);
        for r in rows {
            m.push_row(r);
        }
        m
    }

    /// Appends a row, sorting it and cancelling repeated columns.
    pub fn push_row(&mut self, mut row: Vec<usize>) {
        row.sort_unstable();
        let mut out: Vec<usize> = Vec::with_capacity(row.len());
        for c in row {
            assert!(c < self.cols, "column {c} out of range");
            if out.last() == Some(&c) {
                out.pop();
            } else {
                out.push(c);
            }
        }
        self.rows.push(out);
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[usize]> {
        self.rows.iter().map(|r| r.as_slice())
    }

    pub fn row_vector(&self, r: usize) -> Gf2Vector {
        Gf2Vector::from_support(self.cols, self.rows[r].iter().copied())
    }

    pub fn to_dense(&self) -> Gf2Matrix {
        Gf2Matrix::from_supports(self.cols, &self.rows)
    }

    pub fn from_dense(m: &Gf2Matrix) -> Self {
        Self {
            cols: m.cols(),
            rows: (0..m.rows()).map(|r| m.row(r).support()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = vec![Vec::new(); self.cols];
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row {
                t[c].push(r);
            }
        }
        Self {
            cols: self.rows.len(),
            rows: t,
        }
    }

    /// Column incidence lists: for each column, the rows touching it.
    pub fn column_lists(&self) -> Vec<Vec<usize>> {
        self.transpose().rows
    }

    pub fn mul_vec(&self, v: &Gf2Vector) -> Gf2Vector {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = Gf2Vector::zeros(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            if row.iter().filter(|&&c| v.get(c)).count() % 2 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> Gf2Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut out = Gf2Matrix::zeros(rows.len(), cols);
        for (r, s) in rows.iter().enumerate() {
            for (c, ch) in s.chars().enumerate() {
                out.set(r, c, ch == '1');
            }
        }
        out
    }

    #[test]
    fn identity_and_ones() {
        assert_eq!(rank(&Gf2Matrix::identity(3)), 3);
        assert_eq!(rank(&m(&["11", "11"])), 1);
        assert!(kernel_basis(&Gf2Matrix::identity(3)).is_empty());
        let k = kernel_basis(&m(&["11"]));
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].support(), vec![0, 1]);
    }

    #[test]
    fn solve_rules() {
        let x = solve(&Gf2Matrix::identity(3), &Gf2Vector::unit(3, 2))
            .unwrap()
            .unwrap();
        assert_eq!(x.support(), vec![2]);
        let x = solve(&m(&["11"]), &Gf2Vector::unit(1, 0)).unwrap().unwrap();
        assert_eq!(x.to_string(), "10");
        assert_eq!(
            solve(&Gf2Matrix::zeros(2, 2), &Gf2Vector::unit(2, 0)).unwrap(),
            None
        );
        assert!(solve(&Gf2Matrix::zeros(2, 2), &Gf2Vector::zeros(3)).is_err());
    }

    #[test]
    fn quotient() {
        let id = Gf2Matrix::identity(3);
        assert_eq!(quotient_dim(&id, &id.select_rows(&[0])).unwrap(), 2);
        assert_eq!(quotient_dim(&id, &id).unwrap(), 0);
        let sp = id.select_rows(&[0, 1]);
        let err = quotient_dim(&sp, &id).unwrap_err();
        assert_eq!(err, Error::NotContained { row: 2 });
    }

    #[test]
    fn text_round_trip() {
        let a = m(&["101", "011"]);
        let t = a.to_text();
        assert_eq!(t, "gf2matrix v1\n2 3\n101\n011\n");
        assert_eq!(Gf2Matrix::from_text(&t).unwrap(), a);
        assert!(Gf2Matrix::from_text("gf2matrix v1\n1 2\n12\n").is_err());
    }

    #[test]
    fn wide_matrices_cross_word_boundaries() {
        let mut a = Gf2Matrix::zeros(3, 130);
        a.set(0, 0, true);
        a.set(0, 129, true);
        a.set(1, 64, true);
        a.set(1, 129, true);
        a.set(2, 0, true);
        a.set(2, 64, true);
        assert_eq!(a.rank(), 2);
        assert_eq!(a.transpose().rank(), 2);
        assert_eq!(kernel_basis(&a).len(), 128);
        for v in kernel_basis(&a) {
            assert!(a.mul_vec(&v).unwrap().is_zero());
        }
    }

    #[test]
    fn echelon_basis_membership() {
        let mut b = EchelonBasis::new(4);
        assert!(b.insert(Gf2Vector::from_support(4, [0, 1])));
        assert!(b.insert(Gf2Vector::from_support(4, [1, 2])));
        assert!(!b.insert(Gf2Vector::from_support(4, [0, 2])));
        assert!(b.contains(&Gf2Vector::from_support(4, [0, 2])));
        assert!(!b.contains(&Gf2Vector::from_support(4, [3])));
        assert_eq!(b.rank(), 2);
    }

    #[test]
    fn sparse_rows_cancel_duplicates() {
        let s = SparseMatrix::from_rows(4, vec![vec![2, 0, 2, 3]]);
        assert_eq!(s.row(0), &[0, 3]);
        assert_eq!(s.to_dense().row(0).support(), vec![0, 3]);
        assert_eq!(s.transpose().transpose(), s);
    }
}
