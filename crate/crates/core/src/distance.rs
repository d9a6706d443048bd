//! Code distances.
//!
//! For qubits on edges (`i = 1`) the Z distance is a shortest path between
//! distinct rough boundary components, or a shortest odd-winding cycle on
//! periodic axes, and the X distance on an open cube with two rough
//! components is a minimum edge cut. Any code can be searched exhaustively
//! over connected supports up to a weight bound.

use std::collections::VecDeque;
use std::fmt;

use crate::code::{rough_closure, CssCode, PauliOperator, PauliType};
use crate::complex::{AxisKind, CellComplex};
use crate::error::{Error, Result};
use crate::gf2::{EchelonBasis, Gf2Vector};

/// Default node limit for `exhaustive_low_weight`.
pub const DEFAULT_BUDGET: u64 = 50_000_000;
pub const BUDGET_ENV: &str = "FRACTALCSS_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    Exact,
    UpperBound,
    /// No logical of weight at most this value exists.
    CertifiedAbove(usize),
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceKind::Exact => write!(f, "exact"),
            DistanceKind::UpperBound => write!(f, "upper_bound"),
            DistanceKind::CertifiedAbove(w) => write!(f, "certified_above_{w}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceResult {
    pub value: usize,
    pub kind: DistanceKind,
    pub witness: Option<PauliOperator>,
}

impl DistanceResult {
    /// Re-checks that the witness is a nontrivial logical of the stated weight.
    pub fn verify(&self, code: &CssCode) -> Result<bool> {
        let Some(w) = &self.witness else {
            return Ok(matches!(self.kind, DistanceKind::CertifiedAbove(_)));
        };
        let (t, v) = if w.is_z_type() {
            (PauliType::Z, &w.z)
        } else if w.is_x_type() {
            (PauliType::X, &w.x)
        } else {
            return Ok(false);
        };
        Ok(v.weight() == self.value && code.is_logical(t, v)?)
    }
}

struct EdgeGraph {
    /// Endpoints of each 1-cell with two distinct faces.
    ends: Vec<Option<(usize, usize)>>,
    /// Qubit index of each 1-cell, if it carries one.
    qubit: Vec<Option<usize>>,
    adj: Vec<Vec<(usize, usize)>>,
    /// Rough component of each vertex.
    comp: Vec<Option<usize>>,
    n_comps: usize,
}

impl EdgeGraph {
    fn new(code: &CssCode, c: &CellComplex) -> Self {
        let removed = rough_closure(c);
        let nv = c.count(0);
        let mut qubit = vec![None; c.count(1)];
        for (q, &cell) in code.qubit_cell().iter().enumerate() {
            qubit[cell] = Some(q);
        }
        let mut ends = Vec::with_capacity(c.count(1));
        let mut adj = vec![Vec::new(); nv];
        for e in c.cells(1) {
            if let [a, b] = e.boundary[..] {
                ends.push(Some((a, b)));
                adj[a].push((b, e.id));
                adj[b].push((a, e.id));
            } else {
                ends.push(None);
            }
        }
        let mut comp = vec![None; nv];
        let mut n_comps = 0;
        for s in 0..nv {
            if !removed[0][s] || comp[s].is_some() {
                continue;
            }
            comp[s] = Some(n_comps);
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &(v, e) in &adj[u] {
                    if removed[1][e] && comp[v].is_none() {
                        comp[v] = Some(n_comps);
                        stack.push(v);
                    }
                }
            }
            n_comps += 1;
        }
        Self {
            ends,
            qubit,
            adj,
            comp,
            n_comps,
        }
    }

    fn weight(&self, e: usize) -> usize {
        usize::from(self.qubit[e].is_some())
    }
}

fn require_edges(code: &CssCode) -> Result<&CellComplex> {
    if code.grading() != 1 {
        return Err(Error::Precondition(format!(
            "path distances need qubits on edges, grading is {}",
            code.grading()
        )));
    }
    code.complex()
        .map(|c| c.as_ref())
        .ok_or_else(|| Error::Precondition("code carries no complex".into()))
}

fn witness_from_edges(
    code: &CssCode,
    g: &EdgeGraph,
    edges: &[usize],
    t: PauliType,
) -> PauliOperator {
    let v = Gf2Vector::from_support(code.n_qubits(), edges.iter().filter_map(|&e| g.qubit[e]));
    match t {
        PauliType::X => PauliOperator::x_type(v),
        PauliType::Z => PauliOperator::z_type(v),
    }
}

/// Exact Z distance for edge qubits from shortest rough-to-rough paths and,
/// on periodic axes, shortest odd-winding cycles.
pub fn dz_shortest_path(code: &CssCode) -> Result<DistanceResult> {
    let c = require_edges(code)?;
    let g = EdgeGraph::new(code, c);
    let periodic: Vec<usize> = (0..c.dim())
        .filter(|&a| c.axes()[a] == AxisKind::Periodic)
        .collect();
    if g.n_comps < 2 && periodic.is_empty() {
        return Err(Error::Precondition(
            "need two rough components or a periodic axis".into(),
        ));
    }
    let mut best: Option<(usize, Vec<usize>)> = None;
    if g.n_comps >= 2 {
        best = between_components(&g);
    }
    for &axis in &periodic {
        if let Some(found) = odd_winding_cycle(c, &g, axis) {
            if best.as_ref().is_none_or(|b| found.0 < b.0) {
                best = Some(found);
            }
        }
    }
    let (_, edges) = best.ok_or_else(|| Error::Inconsistent("no relative cycle found".into()))?;
    let witness = witness_from_edges(code, &g, &edges, PauliType::Z);
    let k = crate::code::logical_count(code);
    let expected = g.n_comps.saturating_sub(1) + periodic.len();
    Ok(DistanceResult {
        value: witness.z.weight(),
        kind: if k == expected {
            DistanceKind::Exact
        } else {
            DistanceKind::UpperBound
        },
        witness: Some(witness),
    })
}

/// Multi-source 0-1 BFS from every rough vertex; the best crossing edge
/// between two Voronoi cells of different components gives the distance.
fn between_components(g: &EdgeGraph) -> Option<(usize, Vec<usize>)> {
    let nv = g.adj.len();
    let mut dist = vec![usize::MAX; nv];
    let mut owner = vec![usize::MAX; nv];
    let mut parent = vec![usize::MAX; nv];
    let mut dq = VecDeque::new();
    for v in 0..nv {
        if let Some(k) = g.comp[v] {
            dist[v] = 0;
            owner[v] = k;
            dq.push_back(v);
        }
    }
    while let Some(u) = dq.pop_front() {
        for &(v, e) in &g.adj[u] {
            let w = g.weight(e);
            if dist[u] + w < dist[v] {
                dist[v] = dist[u] + w;
                owner[v] = owner[u];
                parent[v] = e;
                if w == 0 {
                    dq.push_front(v);
                } else {
                    dq.push_back(v);
                }
            }
        }
    }
    let mut best: Option<(usize, usize)> = None;
    for (e, ends) in g.ends.iter().enumerate() {
        let Some((a, b)) = *ends else { continue };
        if dist[a] == usize::MAX || dist[b] == usize::MAX || owner[a] == owner[b] {
            continue;
        }
        let total = dist[a] + dist[b] + g.weight(e);
        if best.is_none_or(|(t, _)| total < t) {
            best = Some((total, e));
        }
    }
    let (total, e) = best?;
    let (a, b) = g.ends[e].unwrap();
    let mut edges = vec![e];
    for mut v in [a, b] {
        while parent[v] != usize::MAX {
            let pe = parent[v];
            edges.push(pe);
            let (x, y) = g.ends[pe].unwrap();
            v = if x == v { y } else { x };
        }
    }
    Some((total, edges))
}

/// Shortest closed walk crossing the seam of `axis` an odd number of times,
/// searched in the two-sheeted cover from every vertex on the seam plane.
fn odd_winding_cycle(c: &CellComplex, g: &EdgeGraph, axis: usize) -> Option<(usize, Vec<usize>)> {
    let top = 2 * c.side() as i32 - 1;
    let seam: Vec<bool> = c.cells(1).iter().map(|e| e.coords[axis] == top).collect();
    let nv = g.adj.len();
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut dist = vec![usize::MAX; 2 * nv];
    let mut parent = vec![usize::MAX; 2 * nv];
    for s in (0..nv).filter(|&v| c.cells(0)[v].coords[axis] == 0) {
        dist.fill(usize::MAX);
        parent.fill(usize::MAX);
        let mut dq = VecDeque::new();
        dist[2 * s] = 0;
        dq.push_back(2 * s);
        while let Some(st) = dq.pop_front() {
            let (u, par) = (st / 2, st % 2);
            if best.as_ref().is_some_and(|b| dist[st] >= b.0) {
                break;
            }
            for &(v, e) in &g.adj[u] {
                let np = par ^ usize::from(seam[e]);
                let ns = 2 * v + np;
                let w = g.weight(e);
                if dist[st] + w < dist[ns] {
                    dist[ns] = dist[st] + w;
                    parent[ns] = e;
                    if w == 0 {
                        dq.push_front(ns);
                    } else {
                        dq.push_back(ns);
                    }
                }
            }
        }
        let goal = 2 * s + 1;
        if dist[goal] == usize::MAX || best.as_ref().is_some_and(|b| dist[goal] >= b.0) {
            continue;
        }
        let mut edges = Vec::new();
        let mut st = goal;
        while st != 2 * s {
            let e = parent[st];
            edges.push(e);
            let (x, y) = g.ends[e].unwrap();
            let u = st / 2;
            let prev = if x == u { y } else { x };
            st = 2 * prev + ((st % 2) ^ usize::from(seam[e]));
        }
        best = Some((dist[goal], edges));
    }
    best
}

/// Exact X distance for edge qubits on an open cube with two rough
/// components, as a unit-capacity minimum cut.
pub fn dx_min_cut(code: &CssCode) -> Result<DistanceResult> {
    let c = require_edges(code)?;
    if c.axes().contains(&AxisKind::Periodic) {
        return Err(Error::Precondition("min-cut needs an open cube".into()));
    }
    let g = EdgeGraph::new(code, c);
    if g.n_comps != 2 {
        return Err(Error::Precondition(format!(
            "min-cut needs exactly two rough components, found {}",
            g.n_comps
        )));
    }
    let k = crate::code::logical_count(code);
    if k != 1 {
        return Err(Error::Precondition(format!(
            "min-cut needs k = 1, found {k}"
        )));
    }
    let nv = g.adj.len();
    let (src, sink) = (nv, nv + 1);
    let node = |v: usize| match g.comp[v] {
        Some(0) => src,
        Some(_) => sink,
        None => v,
    };
    let mut flow = Dinic::new(nv + 2);
    let mut arcs = Vec::new();
    for (e, ends) in g.ends.iter().enumerate() {
        let Some((a, b)) = *ends else { continue };
        if g.qubit[e].is_none() {
            continue;
        }
        let (u, v) = (node(a), node(b));
        if u != v {
            arcs.push((e, u, v));
            flow.add_undirected(u, v);
        }
    }
    let value = flow.max_flow(src, sink);
    let reach = flow.residual_reach(src);
    let cut: Vec<usize> = arcs
        .iter()
        .filter(|&&(_, u, v)| reach[u] != reach[v])
        .map(|&(e, _, _)| e)
        .collect();
    let witness = witness_from_edges(code, &g, &cut, PauliType::X);
    if witness.x.weight() != value {
        return Err(Error::Inconsistent(format!(
            "cut of weight {} for flow {value}",
            witness.x.weight()
        )));
    }
    Ok(DistanceResult {
        value,
        kind: DistanceKind::Exact,
        witness: Some(witness),
    })
}

/// Unit-capacity Dinic on undirected edges.
pub struct Dinic {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u32>,
    level: Vec<i32>,
    it: Vec<usize>,
}

impl Dinic {
    pub fn new(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
            level: vec![0; n],
            it: vec![0; n],
        }
    }

    pub fn add_undirected(&mut self, u: usize, v: usize) {
        let e = self.to.len();
        self.to.extend([v, u]);
        self.cap.extend([1, 1]);
        self.adj[u].push(e);
        self.adj[v].push(e + 1);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    q.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut stack = vec![s];
        let mut path: Vec<usize> = Vec::new();
        while let Some(&u) = stack.last() {
            if u == t {
                for &e in &path {
                    self.cap[e] -= 1;
                    self.cap[e ^ 1] += 1;
                }
                return true;
            }
            let mut advanced = false;
            while self.it[u] < self.adj[u].len() {
                let e = self.adj[u][self.it[u]];
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] == self.level[u] + 1 {
                    stack.push(v);
                    path.push(e);
                    advanced = true;
                    break;
                }
                self.it[u] += 1;
            }
            if !advanced {
                stack.pop();
                self.level[u] = -1;
                if path.pop().is_some() {
                    let p = *stack.last().unwrap();
                    self.it[p] += 1;
                }
            }
        }
        false
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut total = 0;
        while self.bfs(s, t) {
            self.it.fill(0);
            while self.augment(s, t) {
                total += 1;
            }
        }
        total
    }

    /// Nodes reachable from `s` through arcs with spare capacity.
    pub fn residual_reach(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

pub fn budget_from_env() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// Smallest logical of type `t` with weight at most `w_max`.
///
/// Only supports connected through shared opposite-type checks are visited.
/// A minimum-weight logical is always connected in this sense, since a
/// disconnected one splits into two commuting parts and one of them is a
/// lighter logical, so the search is complete.
pub fn exhaustive_low_weight(code: &CssCode, t: PauliType, w_max: usize) -> Result<DistanceResult> {
    exhaustive_with_budget(code, t, w_max, budget_from_env())
}

pub fn exhaustive_with_budget(
    code: &CssCode,
    t: PauliType,
    w_max: usize,
    budget: u64,
) -> Result<DistanceResult> {
    if w_max == 0 {
        return Err(Error::InvalidParameter("w_max must be at least 1".into()));
    }
    let (opp, same) = match t {
        PauliType::X => (code.hz(), code.hx()),
        PauliType::Z => (code.hx(), code.hz()),
    };
    let n = code.n_qubits();
    let checks_of = opp.column_lists();
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for row in opp.iter_rows() {
        for &a in row {
            for &b in row {
                if a != b {
                    nbrs[a].push(b);
                }
            }
        }
    }
    for l in &mut nbrs {
        l.sort_unstable();
        l.dedup();
    }
    let stabs = EchelonBasis::from_matrix(&same.to_dense());
    let mut search = Esu {
        nbrs: &nbrs,
        checks_of: &checks_of,
        syndrome: vec![0; opp.rows()],
        odd: 0,
        near: vec![0; n],
        sub: Vec::new(),
        stabs: &stabs,
        n,
        nodes: 0,
        budget,
        found: None,
    };
    for w in 1..=w_max {
        for v in 0..n {
            search.push(v);
            let ext: Vec<usize> = nbrs[v].iter().copied().filter(|&u| u > v).collect();
            search.extend(ext, v, w)?;
            search.pop(v);
            if let Some(s) = search.found.take() {
                let vec = Gf2Vector::from_support(n, s);
                let witness = match t {
                    PauliType::X => PauliOperator::x_type(vec),
                    PauliType::Z => PauliOperator::z_type(vec),
                };
                return Ok(DistanceResult {
                    value: w,
                    kind: DistanceKind::Exact,
                    witness: Some(witness),
                });
            }
        }
    }
    Ok(DistanceResult {
        value: w_max + 1,
        kind: DistanceKind::CertifiedAbove(w_max),
        witness: None,
    })
}

/// Enumeration of connected vertex subsets, each visited once.
struct Esu<'a> {
    nbrs: &'a [Vec<usize>],
    checks_of: &'a [Vec<usize>],
    syndrome: Vec<u8>,
    odd: usize,
    /// Members of the subset or their neighbours, counted with multiplicity.
    near: Vec<u32>,
    sub: Vec<usize>,
    stabs: &'a EchelonBasis,
    n: usize,
    nodes: u64,
    budget: u64,
    found: Option<Vec<usize>>,
}

impl Esu<'_> {
    fn toggle(&mut self, v: usize) {
        for &c in &self.checks_of[v] {
            self.syndrome[c] ^= 1;
            if self.syndrome[c] == 1 {
                self.odd += 1;
            } else {
                self.odd -= 1;
            }
        }
    }

    fn push(&mut self, v: usize) {
        self.sub.push(v);
        self.toggle(v);
        self.near[v] += 1;
        for &u in &self.nbrs[v] {
            self.near[u] += 1;
        }
    }

    fn pop(&mut self, v: usize) {
        self.sub.pop();
        self.toggle(v);
        self.near[v] -= 1;
        for &u in &self.nbrs[v] {
            self.near[u] -= 1;
        }
    }

    fn extend(&mut self, mut ext: Vec<usize>, root: usize, w: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget { limit: self.budget });
        }
        if self.sub.len() == w {
            if self.odd == 0 {
                let v = Gf2Vector::from_support(self.n, self.sub.iter().copied());
                if !self.stabs.contains(&v) {
                    self.found = Some(self.sub.clone());
                }
            }
            return Ok(());
        }
        while let Some(x) = ext.pop() {
            let mut next = ext.clone();
            for &u in &self.nbrs[x] {
                if u > root && self.near[u] == 0 {
                    next.push(u);
                }
            }
            self.push(x);
            let r = self.extend(next, root, w);
            self.pop(x);
            r?;
            if self.found.is_some() {
                return Ok(());
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub points: Vec<(f64, f64)>,
    pub exponent: f64,
    pub intercept: f64,
    /// Residual sum of squares in log-log space.
    pub residual: f64,
}

/// Least-squares line through `(ln L, ln d)`.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    if points.iter().any(|&(l, d)| !(l > 0.0 && d > 0.0)) {
        return Err(Error::InvalidParameter("points must be positive".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - exponent * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - exponent * x).powi(2))
        .sum();
    Ok(ScalingFit {
        points: points.to_vec(),
        exponent,
        intercept,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::css_from_complex;
    use crate::complex::{build_lattice, build_surface_layout, Background};
    use std::sync::Arc;

    fn code(c: CellComplex) -> CssCode {
        css_from_complex(Arc::new(c), 1).unwrap()
    }

    #[test]
    fn surface_code_distances() {
        let c = code(build_surface_layout(3, 3).unwrap());
        let dz = dz_shortest_path(&c).unwrap();
        assert_eq!((dz.value, dz.kind), (3, DistanceKind::Exact));
        assert!(dz.verify(&c).unwrap());
        let dx = dx_min_cut(&c).unwrap();
        assert_eq!(dx.value, 9);
        assert!(dx.verify(&c).unwrap());
    }

    #[test]
    fn toric_distances() {
        let c = code(build_lattice(2, 3, Background::Torus).unwrap());
        let dz = dz_shortest_path(&c).unwrap();
        assert_eq!((dz.value, dz.kind), (3, DistanceKind::Exact));
        assert!(dz.verify(&c).unwrap());
        let ex = exhaustive_low_weight(&c, PauliType::Z, 3).unwrap();
        assert_eq!((ex.value, ex.kind), (3, DistanceKind::Exact));
        assert!(dx_min_cut(&c).is_err());
    }

    #[test]
    fn certification() {
        let c = code(build_surface_layout(3, 2).unwrap());
        let r = exhaustive_low_weight(&c, PauliType::Z, 1).unwrap();
        assert_eq!(r.kind, DistanceKind::CertifiedAbove(1));
        assert!(exhaustive_with_budget(&c, PauliType::X, 4, 10).is_err());
    }

    #[test]
    fn fits() {
        let f = fit_scaling(&[(3.0, 8.0), (9.0, 64.0), (27.0, 512.0)]).unwrap();
        assert!((f.exponent - 8f64.ln() / 3f64.ln()).abs() < 1e-9);
        assert!(f.residual < 1e-20);
        let f = fit_scaling(&[(3.0, 3.0), (3.0, 3.0)]).unwrap();
        assert_eq!((f.exponent, f.residual), (0.0, 0.0));
        assert!(fit_scaling(&[(1.0, 0.0), (2.0, 1.0)]).is_err());
        assert!(fit_scaling(&[(1.0, 1.0)]).is_err());
    }
}
