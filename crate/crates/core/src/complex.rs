//! Hypercubic cell complexes with punched holes.
//!
//! Cells live on a doubled integer grid. Along each axis a coordinate is
//! either vertex-type or edge-type and the grade of a cell is its number of
//! edge-type coordinates. Three axis kinds exist:
//!
//! * `Primal`: coordinates `0..=2L`, even is vertex-type. A cell is present
//!   when it bounds at least one surviving voxel.
//! * `Dual`: coordinates `1..=2L-1`, odd is vertex-type (a voxel centre).
//!   A cell is present only when every voxel it touches survives.
//! * `Periodic`: primal rule with coordinates taken mod `2L`.
//!
//! On mixed grids a cell is kept when some choice of adjacent voxels along
//! the primal axes works for every choice along the dual axes. This set is
//! closed under taking faces.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{parse_err, Error, Result};
use crate::gf2::{Gf2Matrix, SparseMatrix};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Background {
    OpenCube,
    Torus,
    Sphere,
}

impl Background {
    pub fn as_str(self) -> &'static str {
        match self {
            Background::OpenCube => "open",
            Background::Torus => "torus",
            Background::Sphere => "sphere",
        }
    }
}

impl std::str::FromStr for Background {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" | "open-cube" => Ok(Background::OpenCube),
            "torus" => Ok(Background::Torus),
            "sphere" => Ok(Background::Sphere),
            _ => Err(Error::InvalidParameter(format!("unknown background {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxisKind {
    Primal,
    Dual,
    Periodic,
}

impl AxisKind {
    fn range(self, side: usize) -> (i32, i32) {
        let l = side as i32;
        match self {
            AxisKind::Primal => (0, 2 * l + 1),
            AxisKind::Dual => (1, 2 * l - 1),
            AxisKind::Periodic => (0, 2 * l),
        }
    }

    #[inline]
    fn is_edge(self, c: i32) -> bool {
        match self {
            AxisKind::Primal | AxisKind::Periodic => c & 1 == 1,
            AxisKind::Dual => c & 1 == 0,
        }
    }

    fn swapped(self) -> Self {
        match self {
            AxisKind::Primal => AxisKind::Dual,
            AxisKind::Dual => AxisKind::Primal,
            AxisKind::Periodic => AxisKind::Periodic,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            AxisKind::Primal => "primal",
            AxisKind::Dual => "dual",
            AxisKind::Periodic => "periodic",
        }
    }

    /// Voxel indices along this axis touched by coordinate `c`.
    fn voxels(self, c: i32, side: usize) -> ([usize; 2], usize) {
        let l = side as i32;
        if self.is_edge(c) != (self == AxisKind::Dual) {
            // Single voxel: primal edge-type or dual vertex-type.
            return ([((c - 1) / 2) as usize, 0], 1);
        }
        match self {
            AxisKind::Primal | AxisKind::Dual => {
                let (a, b) = (c / 2 - 1, c / 2);
                match (a >= 0, b < l) {
                    (true, true) => ([a as usize, b as usize], 2),
                    (true, false) => ([a as usize, 0], 1),
                    (false, true) => ([b as usize, 0], 1),
                    (false, false) => ([0, 0], 0),
                }
            }
            AxisKind::Periodic => {
                let a = ((c / 2 - 1).rem_euclid(l)) as usize;
                let b = ((c / 2).rem_euclid(l)) as usize;
                if a == b {
                    ([a, 0], 1)
                } else {
                    ([a, b], 2)
                }
            }
        }
    }
}

/// Boundary condensation type: rough (`E`) or smooth (`M`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryKind {
    E,
    M,
}

impl std::str::FromStr for BoundaryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "E" => Ok(BoundaryKind::E),
            "m" | "M" => Ok(BoundaryKind::M),
            _ => Err(Error::InvalidParameter(format!(
                "unknown boundary type {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryLabel {
    Bulk,
    OuterE(u32),
    OuterM(u32),
    HoleE(u32),
    HoleM(u32),
}

impl BoundaryLabel {
    pub fn is_e(self) -> bool {
        matches!(self, BoundaryLabel::OuterE(_) | BoundaryLabel::HoleE(_))
    }

    pub fn is_m(self) -> bool {
        matches!(self, BoundaryLabel::OuterM(_) | BoundaryLabel::HoleM(_))
    }

    pub fn is_outer(self) -> bool {
        matches!(self, BoundaryLabel::OuterE(_) | BoundaryLabel::OuterM(_))
    }

    pub fn is_hole(self) -> bool {
        matches!(self, BoundaryLabel::HoleE(_) | BoundaryLabel::HoleM(_))
    }

    fn rank(self) -> u8 {
        match self {
            BoundaryLabel::HoleE(_) => 4,
            BoundaryLabel::OuterE(_) => 3,
            BoundaryLabel::HoleM(_) => 2,
            BoundaryLabel::OuterM(_) => 1,
            BoundaryLabel::Bulk => 0,
        }
    }
}

impl fmt::Display for BoundaryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryLabel::Bulk => write!(f, "bulk"),
            BoundaryLabel::OuterE(x) => write!(f, "oe:{x}"),
            BoundaryLabel::OuterM(x) => write!(f, "om:{x}"),
            BoundaryLabel::HoleE(x) => write!(f, "he:{x}"),
            BoundaryLabel::HoleM(x) => write!(f, "hm:{x}"),
        }
    }
}

impl std::str::FromStr for BoundaryLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "bulk" {
            return Ok(BoundaryLabel::Bulk);
        }
        let bad = || Error::InvalidParameter(format!("bad label {s:?}"));
        let (tag, id) = s.split_once(':').ok_or_else(bad)?;
        let id: u32 = id.parse().map_err(|_| bad())?;
        match tag {
            "oe" => Ok(BoundaryLabel::OuterE(id)),
            "om" => Ok(BoundaryLabel::OuterM(id)),
            "he" => Ok(BoundaryLabel::HoleE(id)),
            "hm" => Ok(BoundaryLabel::HoleM(id)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub id: usize,
    /// Doubled lattice coordinates. The point added by a quotient has all -1.
    pub coords: Vec<i32>,
    pub label: BoundaryLabel,
    /// Ids of the (k-1)-cells in the boundary.
    pub boundary: Vec<usize>,
}

/// Voxel occupancy and boundary assignments a complex was generated from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub side: usize,
    pub axes: Vec<AxisKind>,
    /// Boundary type of the two outer faces perpendicular to each axis.
    pub outer: Vec<BoundaryKind>,
    /// Hole id per voxel, `u32::MAX` when occupied. Axis 0 is slowest.
    pub hole_of: Vec<u32>,
    pub hole_kinds: Vec<BoundaryKind>,
    pub background: Background,
}

impl Grid {
    fn new(
        n: usize,
        side: usize,
        axes: Vec<AxisKind>,
        outer: Vec<BoundaryKind>,
        bg: Background,
    ) -> Self {
        Self {
            side,
            axes,
            outer,
            hole_of: vec![NONE; side.pow(n as u32)],
            hole_kinds: Vec::new(),
            background: bg,
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn hole_count(&self) -> usize {
        self.hole_kinds.len()
    }

    pub fn occupied_voxels(&self) -> usize {
        self.hole_of.iter().filter(|&&h| h == NONE).count()
    }

    fn voxel_index(&self, v: &[usize]) -> usize {
        v.iter().fold(0, |acc, &x| acc * self.side + x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HoleAssignment {
    Uniform(BoundaryKind),
    PerHole {
        default: BoundaryKind,
        kinds: BTreeMap<u32, BoundaryKind>,
    },
}

impl HoleAssignment {
    pub fn kind(&self, hole: u32) -> BoundaryKind {
        match self {
            HoleAssignment::Uniform(k) => *k,
            HoleAssignment::PerHole { default, kinds } => *kinds.get(&hole).unwrap_or(default),
        }
    }
}

/// Parameters of a deterministic fractal: FC(p,q) in `n` dimensions
/// iterated `level` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractalSpec {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub level: usize,
    pub background: Background,
    pub holes: HoleAssignment,
    /// Dimension of the cells carrying qubits.
    pub i: usize,
}

impl FractalSpec {
    pub fn new(n: usize, p: usize, q: usize, level: usize) -> Self {
        Self {
            n,
            p,
            q,
            level,
            background: Background::OpenCube,
            holes: HoleAssignment::Uniform(BoundaryKind::M),
            i: 1,
        }
    }

    pub fn with_background(mut self, bg: Background) -> Self {
        self.background = bg;
        self
    }

    pub fn with_holes(mut self, holes: HoleAssignment) -> Self {
        self.holes = holes;
        self
    }

    pub fn with_grading(mut self, i: usize) -> Self {
        self.i = i;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.n) {
            return Err(Error::InvalidParameter(format!(
                "dimension {} not in 2..=4",
                self.n
            )));
        }
        if self.q == 0 || self.q >= self.p {
            return Err(Error::InvalidParameter(format!(
                "need 0 < q < p, got p={} q={}",
                self.p, self.q
            )));
        }
        if !(self.p - self.q).is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "p - q = {} is odd so holes cannot be centred",
                self.p - self.q
            )));
        }
        Ok(())
    }

    /// Side length at unit cell size `u`.
    pub fn side(&self, u: usize) -> usize {
        self.p.pow(self.level as u32) * u
    }

    pub fn hausdorff_dimension(&self) -> f64 {
        hausdorff_dimension(self.n, self.p, self.q)
    }
}

/// `ln(p^n - q^n) / ln p`, evaluated without forming `p^n`.
pub fn hausdorff_dimension(n: usize, p: usize, q: usize) -> f64 {
    hausdorff_dimension_gap(n, p as f64, (p - q) as f64)
}

/// Same as `hausdorff_dimension` with `q = p - gap`, for `p` too large for
/// an integer. The gap is kept exact so the result stays accurate when
/// `q / p` rounds to one.
pub fn hausdorff_dimension_gap(n: usize, p: f64, gap: f64) -> f64 {
    let r = 1.0 - gap / p;
    let series: f64 = (0..n).map(|j| r.powi(j as i32)).sum();
    (gap.ln() + (n as f64 - 1.0) * p.ln() + series.ln()) / p.ln()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplex {
    dim: usize,
    background: Background,
    side: usize,
    axes: Vec<AxisKind>,
    cells: Vec<Vec<Cell>>,
    grid: Option<Arc<Grid>>,
}

fn check_dim_side(n: usize, side: usize) -> Result<()> {
    if !(1..=4).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "dimension {n} not supported"
        )));
    }
    if side == 0 {
        return Err(Error::InvalidParameter(
            "side length must be positive".into(),
        ));
    }
    Ok(())
}

/// Hypercubic lattice of side `side`. On the open cube the two faces
/// perpendicular to the last axis are rough and the others smooth. The
/// sphere is the open cube with its whole outer boundary collapsed.
pub fn build_lattice(n: usize, side: usize, background: Background) -> Result<CellComplex> {
    check_dim_side(n, side)?;
    let axes = match background {
        Background::Torus => vec![AxisKind::Periodic; n],
        _ => vec![AxisKind::Primal; n],
    };
    let mut outer = vec![BoundaryKind::M; n];
    outer[n - 1] = BoundaryKind::E;
    Ok(CellComplex::from_grid(Grid::new(
        n, side, axes, outer, background,
    )))
}

/// Open cube whose last axis is primal with rough end faces and whose
/// other axes are dual with smooth side faces. Both logical directions
/// then have the textbook weights `L` and `L^(n-1)`.
pub fn build_surface_layout(n: usize, side: usize) -> Result<CellComplex> {
    check_dim_side(n, side)?;
    if n < 2 {
        return Err(Error::InvalidParameter(
            "surface layout needs n >= 2".into(),
        ));
    }
    let mut axes = vec![AxisKind::Dual; n];
    axes[n - 1] = AxisKind::Primal;
    let mut outer = vec![BoundaryKind::M; n];
    outer[n - 1] = BoundaryKind::E;
    Ok(CellComplex::from_grid(Grid::new(
        n,
        side,
        axes,
        outer,
        Background::OpenCube,
    )))
}

/// Voxel hole ids produced by `level` rounds of centred `q`-block removal.
pub fn fractal_holes(
    n: usize,
    side: usize,
    p: usize,
    q: usize,
    level: usize,
) -> Result<(Vec<u32>, usize)> {
    let pl = p.pow(level as u32);
    if !side.is_multiple_of(pl) {
        return Err(Error::InvalidParameter(format!(
            "side {side} is not a multiple of p^level = {pl}"
        )));
    }
    let total = side.pow(n as u32);
    let mut hole_of = vec![NONE; total];
    let mut count = 0u32;
    let off = (p - q) / 2;
    let mut block = side;
    for _ in 0..level {
        let sub = block / p;
        let per_axis = side / block;
        let blocks = per_axis.pow(n as u32);
        let before = hole_of.clone();
        for b in 0..blocks {
            let mut anchor = vec![0usize; n];
            let mut r = b;
            for a in (0..n).rev() {
                anchor[a] = (r % per_axis) * block;
                r /= per_axis;
            }
            let idx = anchor.iter().fold(0, |acc, &x| acc * side + x);
            if before[idx] != NONE {
                continue;
            }
            let hole_side = q * sub;
            for t in 0..hole_side.pow(n as u32) {
                let mut v = vec![0usize; n];
                let mut r = t;
                for a in (0..n).rev() {
                    v[a] = anchor[a] + off * sub + r % hole_side;
                    r /= hole_side;
                }
                let i = v.iter().fold(0, |acc, &x| acc * side + x);
                hole_of[i] = count;
            }
            count += 1;
        }
        block = sub;
    }
    Ok((hole_of, count as usize))
}

/// Axis-aligned voxel box to remove, used for holes outside the fractal
/// families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoleBox {
    pub lo: Vec<usize>,
    pub size: Vec<usize>,
    pub kind: BoundaryKind,
}

/// Builds the complex for a fractal spec at unit size `u`. Open cubes with
/// only smooth holes use the surface layout, everything else the primal
/// lattice.
pub fn build_fractal(spec: &FractalSpec, u: usize) -> Result<CellComplex> {
    spec.validate()?;
    if u == 0 {
        return Err(Error::InvalidParameter("unit size must be positive".into()));
    }
    let side = spec.side(u);
    let (_, count) = fractal_holes(spec.n, side, spec.p, spec.q, spec.level)?;
    let all_m = (0..count as u32).all(|h| spec.holes.kind(h) == BoundaryKind::M);
    let base = if spec.background == Background::OpenCube && all_m {
        build_surface_layout(spec.n, side)?
    } else {
        build_lattice(spec.n, side, spec.background)?
    };
    punch_fractal(&base, spec)
}

/// Removes the fractal hole pattern of `spec` from a generated lattice.
pub fn punch_fractal(base: &CellComplex, spec: &FractalSpec) -> Result<CellComplex> {
    spec.validate()?;
    let grid = base
        .grid
        .as_deref()
        .ok_or_else(|| Error::Unsupported("complex carries no voxel grid".into()))?;
    if spec.n != base.dim {
        return Err(Error::InvalidParameter(format!(
            "spec dimension {} against complex dimension {}",
            spec.n, base.dim
        )));
    }
    let (holes, count) = fractal_holes(spec.n, grid.side, spec.p, spec.q, spec.level)?;
    let mut g = grid.clone();
    let first = g.hole_kinds.len() as u32;
    for (slot, h) in g.hole_of.iter_mut().zip(holes) {
        if h != NONE && *slot == NONE {
            *slot = first + h;
        }
    }
    for h in 0..count as u32 {
        g.hole_kinds.push(spec.holes.kind(h));
    }
    Ok(CellComplex::from_grid(g))
}

/// Removes arbitrary voxel boxes, one hole per box.
pub fn punch_boxes(base: &CellComplex, boxes: &[HoleBox]) -> Result<CellComplex> {
    let grid = base
        .grid
        .as_deref()
        .ok_or_else(|| Error::Unsupported("complex carries no voxel grid".into()))?;
    let n = grid.dim();
    let mut g = grid.clone();
    for b in boxes {
        if b.lo.len() != n || b.size.len() != n {
            return Err(Error::InvalidParameter(
                "hole box dimension mismatch".into(),
            ));
        }
        if b.lo
            .iter()
            .zip(&b.size)
            .any(|(&l, &s)| s == 0 || l + s > grid.side)
        {
            return Err(Error::InvalidParameter("hole box outside the grid".into()));
        }
        let id = g.hole_kinds.len() as u32;
        let vol: usize = b.size.iter().product();
        for t in 0..vol {
            let mut v = vec![0usize; n];
            let mut r = t;
            for a in (0..n).rev() {
                v[a] = b.lo[a] + r % b.size[a];
                r /= b.size[a];
            }
            let i = g.voxel_index(&v);
            if g.hole_of[i] != NONE {
                return Err(Error::InvalidParameter("hole boxes overlap".into()));
            }
            g.hole_of[i] = id;
        }
        g.hole_kinds.push(b.kind);
    }
    Ok(CellComplex::from_grid(g))
}

struct BoxIndex {
    lo: Vec<i32>,
    count: Vec<i32>,
    total: usize,
}

impl BoxIndex {
    fn new(axes: &[AxisKind], side: usize) -> Self {
        let (lo, count): (Vec<i32>, Vec<i32>) = axes.iter().map(|a| a.range(side)).unzip();
        let total = count.iter().map(|&c| c as usize).product();
        Self { lo, count, total }
    }

    fn coords(&self, mut pos: usize, out: &mut [i32]) {
        for a in (0..out.len()).rev() {
            let c = self.count[a] as usize;
            out[a] = self.lo[a] + (pos % c) as i32;
            pos /= c;
        }
    }

    fn pos(&self, c: &[i32]) -> usize {
        c.iter().enumerate().fold(0, |acc, (a, &x)| {
            acc * self.count[a] as usize + (x - self.lo[a]) as usize
        })
    }

    /// Neighbour along axis `a`, wrapping on periodic axes.
    fn step(&self, axes: &[AxisKind], c: &[i32], a: usize, d: i32, out: &mut Vec<i32>) -> bool {
        out.clear();
        out.extend_from_slice(c);
        let mut x = c[a] + d;
        if axes[a] == AxisKind::Periodic {
            x = x.rem_euclid(self.count[a]);
        } else if x < self.lo[a] || x >= self.lo[a] + self.count[a] {
            return false;
        }
        out[a] = x;
        true
    }
}

impl CellComplex {
    fn from_grid(grid: Grid) -> Self {
        let n = grid.dim();
        let side = grid.side;
        let axes = grid.axes.clone();
        let bx = BoxIndex::new(&axes, side);
        let any_holes = grid.hole_of.iter().any(|&h| h != NONE);

        let mut kept = vec![true; bx.total];
        let mut deleted_hole = vec![NONE; bx.total];
        let mut grade_of = vec![0u8; bx.total];
        let mut c = vec![0i32; n];
        let mut by_grade: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for pos in 0..bx.total {
            bx.coords(pos, &mut c);
            let g = (0..n).filter(|&a| axes[a].is_edge(c[a])).count();
            grade_of[pos] = g as u8;
            by_grade[g].push(pos);
            if any_holes {
                let (k, h) = keep_rule(&grid, &c);
                kept[pos] = k;
                if !k {
                    deleted_hole[pos] = h;
                }
            }
        }

        // Hole surfaces, top down: a cell touches a hole when one of its
        // cofaces is deleted or itself touches a hole.
        let mut mark = vec![NONE; bx.total];
        let mut nb = Vec::with_capacity(n);
        if any_holes {
            for g in (0..n).rev() {
                for &pos in &by_grade[g] {
                    if !kept[pos] {
                        continue;
                    }
                    bx.coords(pos, &mut c);
                    let mut m = NONE;
                    for a in 0..n {
                        if axes[a].is_edge(c[a]) {
                            continue;
                        }
                        for d in [-1, 1] {
                            if bx.step(&axes, &c, a, d, &mut nb) {
                                let t = bx.pos(&nb);
                                let h = if kept[t] { mark[t] } else { deleted_hole[t] };
                                m = m.min(h);
                            }
                        }
                    }
                    mark[pos] = m;
                }
            }
        }

        let mut id_of = vec![NONE; bx.total];
        let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); n + 1];
        for pos in 0..bx.total {
            if !kept[pos] {
                continue;
            }
            let g = grade_of[pos] as usize;
            bx.coords(pos, &mut c);
            let label = label_for(&grid, &bx, &c, mark[pos]);
            id_of[pos] = cells[g].len() as u32;
            let id = cells[g].len();
            cells[g].push(Cell {
                id,
                coords: c.clone(),
                label,
                boundary: Vec::new(),
            });
        }
        for cells_g in cells.iter_mut().skip(1) {
            for cell in cells_g.iter_mut() {
                let mut b = Vec::with_capacity(2 * n);
                for a in 0..n {
                    if !axes[a].is_edge(cell.coords[a]) {
                        continue;
                    }
                    for d in [-1, 1] {
                        if bx.step(&axes, &cell.coords, a, d, &mut nb) {
                            let f = id_of[bx.pos(&nb)];
                            debug_assert_ne!(f, NONE, "kept set is not closed");
                            b.push(f as usize);
                        }
                    }
                }
                cell.boundary = cancel_pairs(b);
            }
        }
        let background = grid.background;
        let mut cx = CellComplex {
            dim: n,
            background,
            side,
            axes,
            cells,
            grid: Some(Arc::new(grid)),
        };
        if background == Background::Sphere {
            let mask = cx.outer_mask();
            let grid = cx.grid.clone();
            cx = cx
                .quotient_mask(&mask)
                .expect("outer boundary is closed and nonempty");
            cx.background = Background::Sphere;
            cx.grid = grid;
        }
        cx
    }

    /// Complex from explicit cells, one list per grade. Ids must match
    /// positions and boundaries must square to zero.
    pub fn from_cells(background: Background, cells: Vec<Vec<Cell>>) -> Result<CellComplex> {
        if cells.is_empty() {
            return Err(Error::InvalidParameter("no grades given".into()));
        }
        let dim = cells.len() - 1;
        for (k, cs) in cells.iter().enumerate() {
            for (i, c) in cs.iter().enumerate() {
                if c.id != i || c.coords.len() != dim {
                    return Err(Error::InvalidParameter(format!(
                        "{k}-cell {i} is malformed"
                    )));
                }
                let bad = if k == 0 {
                    !c.boundary.is_empty()
                } else {
                    c.boundary.iter().any(|&f| f >= cells[k - 1].len())
                };
                if bad {
                    return Err(Error::InvalidParameter(format!(
                        "{k}-cell {i} has a bad boundary"
                    )));
                }
            }
        }
        let cx = CellComplex {
            dim,
            background,
            side: 0,
            axes: vec![AxisKind::Primal; dim],
            cells,
            grid: None,
        };
        cx.check_boundary_squared()?;
        Ok(cx)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn background(&self) -> Background {
        self.background
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn axes(&self) -> &[AxisKind] {
        &self.axes
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.grid.as_deref()
    }

    pub fn hole_count(&self) -> usize {
        self.grid.as_ref().map_or(0, |g| g.hole_count())
    }

    pub fn cells(&self, k: usize) -> &[Cell] {
        &self.cells[k]
    }

    pub fn count(&self, k: usize) -> usize {
        self.cells.get(k).map_or(0, Vec::len)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k % 2 == 0 {
                    c.len() as i64
                } else {
                    -(c.len() as i64)
                }
            })
            .sum()
    }

    /// Dense matrix of the boundary map from grade `k` to grade `k-1`.
    pub fn boundary_matrix(&self, k: usize) -> Gf2Matrix {
        if k == 0 || k > self.dim {
            return Gf2Matrix::zeros(self.count(k.saturating_sub(1)), self.count(k));
        }
        self.boundary_sparse(k).transpose().to_dense()
    }

    /// Boundary map as one row per `k`-cell listing its faces.
    pub fn boundary_sparse(&self, k: usize) -> SparseMatrix {
        let cols = if k == 0 { 0 } else { self.count(k - 1) };
        SparseMatrix::from_rows(
            cols,
            self.cells[k].iter().map(|c| c.boundary.clone()).collect(),
        )
    }

    /// For each `k`-cell, the `(k+1)`-cells having it as a face.
    pub fn cofaces(&self, k: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count(k)];
        if k < self.dim {
            for c in &self.cells[k + 1] {
                for &f in &c.boundary {
                    out[f].push(c.id);
                }
            }
        }
        out
    }

    /// Checks that every boundary of a boundary cancels.
    pub fn check_boundary_squared(&self) -> Result<()> {
        for k in 2..=self.dim {
            let mut acc = vec![0u8; self.count(k - 2)];
            for c in &self.cells[k] {
                for &f in &c.boundary {
                    for &g in &self.cells[k - 1][f].boundary {
                        acc[g] ^= 1;
                    }
                }
                if let Some(g) = acc.iter().position(|&x| x != 0) {
                    return Err(Error::Inconsistent(format!(
                        "boundary of boundary of {k}-cell {} contains {}-cell {g}",
                        c.id,
                        k - 2
                    )));
                }
            }
        }
        Ok(())
    }

    /// Marks cells whose label satisfies `pred`.
    pub fn label_mask(&self, pred: impl Fn(BoundaryLabel) -> bool) -> Vec<Vec<bool>> {
        self.cells
            .iter()
            .map(|cs| cs.iter().map(|c| pred(c.label)).collect())
            .collect()
    }

    /// Marks cells geometrically lying on an outer face.
    pub fn outer_mask(&self) -> Vec<Vec<bool>> {
        self.cells
            .iter()
            .map(|cs| {
                cs.iter()
                    .map(|c| self.outer_faces(&c.coords).next().is_some())
                    .collect()
            })
            .collect()
    }

    /// Outer face ids (`2*axis + side`) containing a cell.
    pub fn outer_faces<'a>(&'a self, coords: &'a [i32]) -> impl Iterator<Item = u32> + 'a {
        let side = self.side;
        self.axes.iter().enumerate().flat_map(move |(a, kind)| {
            let (lo, count) = kind.range(side);
            let hit = |s: u32, x: i32| {
                (*kind != AxisKind::Periodic && coords[a] == x).then_some(2 * a as u32 + s)
            };
            hit(0, lo).into_iter().chain(hit(1, lo + count - 1))
        })
    }

    /// Smallest set containing `mask` closed under taking faces.
    pub fn closure(&self, mask: &[Vec<bool>]) -> Vec<Vec<bool>> {
        let mut out = mask.to_vec();
        for k in (1..=self.dim).rev() {
            for c in &self.cells[k] {
                if out[k][c.id] {
                    for &f in &c.boundary {
                        out[k - 1][f] = true;
                    }
                }
            }
        }
        out
    }

    /// Distinct labels present on cells.
    pub fn labels_present(&self) -> Vec<BoundaryLabel> {
        let mut v: Vec<BoundaryLabel> = self.cells.iter().flatten().map(|c| c.label).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Collapses the cells carrying any of `labels` to a single new vertex.
    pub fn quotient_to_point(&self, labels: &[BoundaryLabel]) -> Result<CellComplex> {
        let mask = self.label_mask(|l| labels.contains(&l));
        self.quotient_mask(&mask)
    }

    /// Collapses a selection closed under faces to a new vertex appended
    /// last among the 0-cells.
    pub fn quotient_mask(&self, mask: &[Vec<bool>]) -> Result<CellComplex> {
        if mask.len() != self.dim + 1
            || mask
                .iter()
                .zip(&self.cells)
                .any(|(m, c)| m.len() != c.len())
        {
            return Err(Error::Dimension(
                "selection shape does not match complex".into(),
            ));
        }
        if !mask.iter().flatten().any(|&b| b) {
            return Err(Error::EmptySelection);
        }
        for k in 1..=self.dim {
            for c in &self.cells[k] {
                if mask[k][c.id] && c.boundary.iter().any(|&f| !mask[k - 1][f]) {
                    return Err(Error::NotClosed {
                        grade: k,
                        cell: c.id,
                    });
                }
            }
        }
        let mut new_id: Vec<Vec<usize>> = Vec::with_capacity(self.dim + 1);
        let mut cells: Vec<Vec<Cell>> = Vec::with_capacity(self.dim + 1);
        for k in 0..=self.dim {
            let mut ids = vec![usize::MAX; self.count(k)];
            let mut out = Vec::new();
            for c in &self.cells[k] {
                if mask[k][c.id] {
                    continue;
                }
                ids[c.id] = out.len();
                let boundary = match k {
                    0 => Vec::new(),
                    1 => {
                        let point = self.cells[0].iter().filter(|v| !mask[0][v.id]).count();
                        cancel_pairs(
                            c.boundary
                                .iter()
                                .map(|&f| if mask[0][f] { point } else { new_id[0][f] })
                                .collect(),
                        )
                    }
                    _ => c
                        .boundary
                        .iter()
                        .filter(|&&f| !mask[k - 1][f])
                        .map(|&f| new_id[k - 1][f])
                        .collect(),
                };
                out.push(Cell {
                    id: out.len(),
                    coords: c.coords.clone(),
                    label: c.label,
                    boundary,
                });
            }
            if k == 0 {
                out.push(Cell {
                    id: out.len(),
                    coords: vec![-1; self.dim],
                    label: BoundaryLabel::Bulk,
                    boundary: Vec::new(),
                });
            }
            new_id.push(ids);
            cells.push(out);
        }
        Ok(CellComplex {
            dim: self.dim,
            background: self.background,
            side: self.side,
            axes: self.axes.clone(),
            cells,
            grid: None,
        })
    }

    /// Swaps grades `k` and `n-k` and transposes every boundary map.
    pub fn dual(&self) -> CellComplex {
        let n = self.dim;
        let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); n + 1];
        for k in 0..=n {
            let cof = self.cofaces(k);
            cells[n - k] = self.cells[k]
                .iter()
                .zip(cof)
                .map(|(c, b)| Cell {
                    id: c.id,
                    coords: c.coords.clone(),
                    label: c.label,
                    boundary: b,
                })
                .collect();
        }
        CellComplex {
            dim: n,
            background: self.background,
            side: self.side,
            axes: self.axes.iter().map(|a| a.swapped()).collect(),
            cells,
            grid: None,
        }
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        writeln!(s, "cellcomplex v1").unwrap();
        writeln!(
            s,
            "dim {} background {}",
            self.dim,
            self.background.as_str()
        )
        .unwrap();
        let axes: Vec<&str> = self.axes.iter().map(|a| a.as_str()).collect();
        writeln!(s, "layout side {} axes {}", self.side, axes.join(" ")).unwrap();
        for k in 0..=self.dim {
            writeln!(s, "grade {k} count {}", self.count(k)).unwrap();
            for c in &self.cells[k] {
                write!(s, "cell {k} {} {}", c.id, c.label).unwrap();
                for x in &c.coords {
                    write!(s, " {x}").unwrap();
                }
                s.push_str(" :");
                for b in &c.boundary {
                    write!(s, " {b}").unwrap();
                }
                s.push('\n');
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<CellComplex> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let mut next = |what: &str| {
            lines
                .next()
                .map(|(n, l)| (n + 1, l))
                .ok_or_else(|| parse_err(0, format!("missing {what}")))
        };
        let (ln, head) = next("header")?;
        if head.trim() != "cellcomplex v1" {
            return Err(parse_err(ln, "expected `cellcomplex v1`"));
        }
        let (ln, l) = next("dimension line")?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 4 || t[0] != "dim" || t[2] != "background" {
            return Err(parse_err(ln, "expected `dim <n> background <bg>`"));
        }
        let dim: usize = t[1].parse().map_err(|_| parse_err(ln, "bad dimension"))?;
        let background: Background = t[3].parse().map_err(|_| parse_err(ln, "bad background"))?;
        let (mut ln, mut l) = next("grade line")?;
        let mut side = 0;
        let mut axes = vec![AxisKind::Primal; dim];
        if l.starts_with("layout") {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 4 + dim || t[1] != "side" || t[3] != "axes" {
                return Err(parse_err(ln, "bad layout line"));
            }
            side = t[2].parse().map_err(|_| parse_err(ln, "bad side"))?;
            for (a, tok) in t[4..].iter().enumerate() {
                axes[a] = match *tok {
                    "primal" => AxisKind::Primal,
                    "dual" => AxisKind::Dual,
                    "periodic" => AxisKind::Periodic,
                    _ => return Err(parse_err(ln, "bad axis kind")),
                };
            }
            (ln, l) = next("grade line")?;
        }
        let mut cells: Vec<Vec<Cell>> = Vec::with_capacity(dim + 1);
        for k in 0..=dim {
            if k > 0 {
                (ln, l) = next("grade line")?;
            }
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 4 || t[0] != "grade" || t[1] != k.to_string() || t[2] != "count" {
                return Err(parse_err(ln, format!("expected `grade {k} count <m>`")));
            }
            let m: usize = t[3].parse().map_err(|_| parse_err(ln, "bad count"))?;
            let mut out = Vec::with_capacity(m);
            for id in 0..m {
                let (ln, l) = next("cell line")?;
                let (left, right) = l
                    .rsplit_once(':')
                    .ok_or_else(|| parse_err(ln, "missing `:`"))?;
                let t: Vec<&str> = left.split_whitespace().collect();
                if t.len() != 4 + dim
                    || t[0] != "cell"
                    || t[1] != k.to_string()
                    || t[2] != id.to_string()
                {
                    return Err(parse_err(ln, format!("expected cell {k} {id}")));
                }
                let label: BoundaryLabel = t[3].parse().map_err(|_| parse_err(ln, "bad label"))?;
                let coords = t[4..]
                    .iter()
                    .map(|x| x.parse::<i32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| parse_err(ln, "bad coordinate"))?;
                let boundary = right
                    .split_whitespace()
                    .map(|x| x.parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| parse_err(ln, "bad boundary id"))?;
                if k == 0 && !boundary.is_empty() {
                    return Err(parse_err(ln, "vertices have no boundary"));
                }
                if k > 0 && boundary.iter().any(|&b| b >= cells[k - 1].len()) {
                    return Err(parse_err(ln, "boundary id out of range"));
                }
                out.push(Cell {
                    id,
                    coords,
                    label,
                    boundary,
                });
            }
            cells.push(out);
        }
        Ok(CellComplex {
            dim,
            background,
            side,
            axes,
            cells,
            grid: None,
        })
    }
}

fn cancel_pairs(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    let mut out: Vec<usize> = Vec::with_capacity(v.len());
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Keep decision for a doubled coordinate and, for deleted cells, the
/// smallest hole id among the voxels it touches.
fn keep_rule(grid: &Grid, c: &[i32]) -> (bool, u32) {
    let n = c.len();
    let mut opts: Vec<([usize; 2], usize)> = Vec::with_capacity(n);
    for a in 0..n {
        opts.push(grid.axes[a].voxels(c[a], grid.side));
    }
    let primal: Vec<usize> = (0..n).filter(|&a| grid.axes[a] != AxisKind::Dual).collect();
    let dual: Vec<usize> = (0..n).filter(|&a| grid.axes[a] == AxisKind::Dual).collect();
    let np: usize = primal.iter().map(|&a| opts[a].1).product();
    let nd: usize = dual.iter().map(|&a| opts[a].1).product();
    let mut v = vec![0usize; n];
    let mut kept = false;
    'outer: for pc in 0..np {
        let mut r = pc;
        for &a in &primal {
            v[a] = opts[a].0[r % opts[a].1];
            r /= opts[a].1;
        }
        for dc in 0..nd {
            let mut r = dc;
            for &a in &dual {
                v[a] = opts[a].0[r % opts[a].1];
                r /= opts[a].1;
            }
            if grid.hole_of[grid.voxel_index(&v)] != NONE {
                continue 'outer;
            }
        }
        kept = true;
        break;
    }
    if kept {
        return (true, NONE);
    }
    let all: usize = opts.iter().map(|o| o.1).product();
    let mut h = NONE;
    for t in 0..all {
        let mut r = t;
        for a in 0..n {
            v[a] = opts[a].0[r % opts[a].1];
            r /= opts[a].1;
        }
        h = h.min(grid.hole_of[grid.voxel_index(&v)]);
    }
    (false, h)
}

fn label_for(grid: &Grid, bx: &BoxIndex, c: &[i32], hole: u32) -> BoundaryLabel {
    let mut best = BoundaryLabel::Bulk;
    let mut offer = |l: BoundaryLabel| {
        if l.rank() > best.rank() {
            best = l;
        }
    };
    if hole != NONE {
        offer(match grid.hole_kinds[hole as usize] {
            BoundaryKind::E => BoundaryLabel::HoleE(hole),
            BoundaryKind::M => BoundaryLabel::HoleM(hole),
        });
    }
    for a in 0..c.len() {
        if grid.axes[a] == AxisKind::Periodic {
            continue;
        }
        let ends = [bx.lo[a], bx.lo[a] + bx.count[a] - 1];
        for (s, &x) in ends.iter().enumerate() {
            if c[a] == x {
                let f = 2 * a as u32 + s as u32;
                offer(match grid.outer[a] {
                    BoundaryKind::E => BoundaryLabel::OuterE(f),
                    BoundaryKind::M => BoundaryLabel::OuterM(f),
                });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_counts() {
        let c = build_lattice(2, 2, Background::OpenCube).unwrap();
        assert_eq!(c.counts(), vec![9, 12, 4]);
        let t = build_lattice(2, 2, Background::Torus).unwrap();
        assert_eq!(t.counts(), vec![4, 8, 4]);
        assert_eq!(t.euler_characteristic(), 0);
        let t3 = build_lattice(3, 3, Background::Torus).unwrap();
        assert_eq!(t3.counts(), vec![27, 81, 81, 27]);
    }

    #[test]
    fn boundary_squares_to_zero() {
        for bg in [Background::OpenCube, Background::Torus, Background::Sphere] {
            for n in 2..=3 {
                let c = build_lattice(n, 3, bg).unwrap();
                c.check_boundary_squared().unwrap();
            }
        }
        build_surface_layout(3, 3)
            .unwrap()
            .check_boundary_squared()
            .unwrap();
    }

    #[test]
    fn fractal_top_cells() {
        let s = FractalSpec::new(3, 3, 1, 1);
        let c = punch_fractal(&build_lattice(3, 3, Background::OpenCube).unwrap(), &s).unwrap();
        assert_eq!(c.count(3), 26);
        let s = FractalSpec::new(2, 3, 1, 2);
        let c = punch_fractal(&build_lattice(2, 9, Background::OpenCube).unwrap(), &s).unwrap();
        assert_eq!(c.count(2), 64);
        assert_eq!(c.hole_count(), 9);
        c.check_boundary_squared().unwrap();
    }

    #[test]
    fn level_zero_is_identity() {
        let base = build_lattice(2, 3, Background::OpenCube).unwrap();
        let c = punch_fractal(&base, &FractalSpec::new(2, 3, 1, 0)).unwrap();
        assert_eq!(c, base);
    }

    #[test]
    fn rejects_bad_specs() {
        let base = build_lattice(2, 4, Background::OpenCube).unwrap();
        assert!(punch_fractal(&base, &FractalSpec::new(2, 3, 1, 1)).is_err());
        assert!(punch_fractal(&base, &FractalSpec::new(2, 4, 1, 1)).is_err());
        assert!(build_lattice(2, 0, Background::OpenCube).is_err());
        assert!(build_lattice(5, 2, Background::OpenCube).is_err());
    }

    #[test]
    fn hole_labels() {
        let s = FractalSpec::new(2, 3, 1, 1);
        let c = punch_fractal(&build_lattice(2, 3, Background::OpenCube).unwrap(), &s).unwrap();
        let hm: Vec<_> = c
            .cells(1)
            .iter()
            .filter(|x| x.label == BoundaryLabel::HoleM(0))
            .collect();
        assert_eq!(hm.len(), 4);
        let oe = c
            .cells(0)
            .iter()
            .filter(|x| matches!(x.label, BoundaryLabel::OuterE(_)))
            .count();
        assert_eq!(oe, 8);
    }

    #[test]
    fn dual_transposes() {
        let c = build_lattice(3, 2, Background::Torus).unwrap();
        let d = c.dual();
        assert_eq!(d.boundary_matrix(2), c.boundary_matrix(2).transpose());
        assert_eq!(d.dual().counts(), c.counts());
        let t = build_lattice(2, 3, Background::Torus).unwrap();
        assert_eq!(t.dual().count(0), 9);
    }

    #[test]
    fn quotient_rules() {
        let c = build_lattice(2, 2, Background::OpenCube).unwrap();
        assert_eq!(c.quotient_to_point(&[]).unwrap_err(), Error::EmptySelection);
        let q = c.quotient_to_point(&[BoundaryLabel::OuterE(2), BoundaryLabel::OuterE(3)]);
        let q = q.unwrap();
        assert_eq!(q.count(0), 4);
        assert_eq!(q.cells(0)[3].coords, vec![-1, -1]);
        q.check_boundary_squared().unwrap();
        let mut m = c.label_mask(|_| false);
        m[1][0] = true;
        assert!(matches!(
            c.quotient_mask(&m),
            Err(Error::NotClosed { grade: 1, .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        let s = FractalSpec::new(2, 3, 1, 1);
        let c = build_fractal(&s, 1).unwrap();
        let t = c.to_text();
        let r = CellComplex::from_text(&t).unwrap();
        assert_eq!(r.to_text(), t);
        assert_eq!(r.counts(), c.counts());
    }

    #[test]
    fn hausdorff_values() {
        assert!((hausdorff_dimension(3, 3, 1) - 26f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!((hausdorff_dimension(3, 100, 98) - 2.385).abs() < 1e-3);
    }
}
