use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use fractalcss::code::{code_params, css_from_complex, logical_count, CssCode, PauliType};
use fractalcss::complex::{BoundaryLabel, CellComplex, FractalSpec};
use fractalcss::distance::{dx_min_cut, dz_shortest_path, exhaustive_low_weight, DistanceResult};
use fractalcss::gates::{
    build_color_code_2d, build_vasmer_browne_stack, check_conjugated_commutation,
    check_transversal_ccz, check_transversal_cz, check_transversal_s_colorcode, merge_rough,
    GateCheckReport, MergeInterface, StackAlignment,
};
use fractalcss::homology::{betti, cobetti, verify_lefschetz, HomologyRequest};
use fractalcss::Error;
use rayon::prelude::*;

use crate::geometry::{GeomArgs, InputArgs};
use crate::Common;

/// Writes `text` to `--out`, or to standard output when it is absent or `-`.
pub fn emit(common: &Common, text: &str) -> anyhow::Result<()> {
    match common.out.as_deref() {
        None | Some("-") => print!("{text}"),
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}"))?,
    }
    Ok(())
}

fn summary(c: &CellComplex) -> String {
    let mut s = String::new();
    for k in 0..=c.dim() {
        let _ = writeln!(s, "grade {k} cells {}", c.count(k));
    }
    let _ = writeln!(s, "holes {}", c.hole_count());
    s
}

pub fn gen(g: &GeomArgs, common: &Common) -> anyhow::Result<i32> {
    let spec = g.spec()?;
    let c = g.complex()?;
    let text = format!("{}D_H={:.4}\n", summary(&c), spec.hausdorff_dimension());
    match common.out.as_deref() {
        None => print!("{text}"),
        Some("-") => {
            eprint!("{text}");
            print!("{}", c.to_text());
        }
        Some(_) => {
            emit(common, &c.to_text())?;
            print!("{text}");
        }
    }
    Ok(0)
}

pub fn code(i: &InputArgs, common: &Common) -> anyhow::Result<i32> {
    let code = i.code()?;
    eprintln!(
        "qubits {} x_checks {} z_checks {}",
        code.n_qubits(),
        code.hx().rows(),
        code.hz().rows()
    );
    emit(common, &code.to_text())?;
    Ok(0)
}

pub fn params(i: &InputArgs, common: &Common) -> anyhow::Result<i32> {
    let code = i.code()?;
    let p = code_params(&code)?;
    let mut s = format!("n_qubits={}\nk={}\n", p.n_qubits, p.k);
    if code.complex().is_some() {
        s.push_str("homology_check=PASS\n");
    }
    emit(common, &s)?;
    Ok(0)
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum DistType {
    Z,
    X,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum Method {
    /// Shortest path or min-cut where they apply, exhaustive search otherwise.
    Auto,
    Path,
    Cut,
    Exhaustive,
}

#[derive(Args, Debug)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long = "type", value_enum, default_value_t = DistType::Both)]
    pub kind: DistType,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Weight bound for exhaustive search.
    #[arg(long, default_value_t = 2)]
    pub w_max: usize,
}

/// Graph method for the type, falling back to exhaustive search when the
/// geometry does not allow it.
pub fn auto_distance(
    code: &CssCode,
    t: PauliType,
    w_max: usize,
) -> fractalcss::Result<DistanceResult> {
    let graph = match t {
        PauliType::Z => dz_shortest_path(code),
        PauliType::X => dx_min_cut(code),
    };
    match graph {
        Err(Error::Precondition(_)) | Err(Error::Unsupported(_)) => {
            exhaustive_low_weight(code, t, w_max)
        }
        r => r,
    }
}

fn one_distance(
    code: &CssCode,
    t: PauliType,
    method: Method,
    w_max: usize,
) -> fractalcss::Result<DistanceResult> {
    match (method, t) {
        (Method::Auto, _) => auto_distance(code, t, w_max),
        (Method::Path, PauliType::Z) => dz_shortest_path(code),
        (Method::Cut, PauliType::X) => dx_min_cut(code),
        (Method::Exhaustive, _) => exhaustive_low_weight(code, t, w_max),
        (m, t) => Err(Error::InvalidParameter(format!(
            "method {m:?} does not give {t:?} distances"
        ))),
    }
}

pub fn distance(d: &DistanceArgs, common: &Common) -> anyhow::Result<i32> {
    let code = d.input.code()?;
    let mut s = String::new();
    for (t, name) in [(PauliType::Z, "dz"), (PauliType::X, "dx")] {
        let wanted = matches!(
            (d.kind, t),
            (DistType::Both, _) | (DistType::Z, PauliType::Z) | (DistType::X, PauliType::X)
        );
        if !wanted {
            continue;
        }
        let r = one_distance(&code, t, d.method, d.w_max)?;
        let _ = writeln!(
            s,
            "{name}={} kind={} verified={}",
            r.value,
            r.kind,
            r.verify(&code)?
        );
    }
    emit(common, &s)?;
    Ok(0)
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum Relative {
    None,
    E,
    M,
}

#[derive(Args, Debug)]
pub struct HomologyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Grade; defaults to the qubit grade `--i`.
    #[arg(long)]
    pub grade: Option<usize>,
    #[arg(long, value_enum, default_value_t = Relative::E)]
    pub relative: Relative,
    /// Also compare with the dual grade relative to the other boundary type;
    /// the comparison assumes an all-primal cellulation (`--primal`).
    #[arg(long)]
    pub lefschetz: bool,
}

pub fn homology(h: &HomologyArgs, common: &Common) -> anyhow::Result<i32> {
    let Some(c) = h.input.complex()? else {
        bail!(Error::InvalidParameter(
            "homology needs a complex, not a code".into()
        ));
    };
    let grade = h.grade.unwrap_or(h.input.geom.i);
    let labels = c.labels_present();
    let pick = |f: fn(&BoundaryLabel) -> bool| labels.iter().copied().filter(f).collect::<Vec<_>>();
    let (e, m) = (pick(|l| l.is_e()), pick(|l| l.is_m()));
    let rel = match h.relative {
        Relative::None => Vec::new(),
        Relative::E => e.clone(),
        Relative::M => m.clone(),
    };
    let b = betti(&HomologyRequest::relative(&c, grade, rel.clone()))?;
    let cb = cobetti(&HomologyRequest::relative(&c, grade, rel))?;
    let mut s = format!("grade={grade}\nbetti={}\ncobetti={}\n", b.value, cb.value);
    if b.reduced_caveat {
        s.push_str("note=grade 0 of a quotient counts one extra component\n");
    }
    if h.lefschetz {
        let _ = writeln!(s, "lefschetz {}", verify_lefschetz(&c, grade, &e, &m)?);
    }
    emit(common, &s)?;
    Ok(0)
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum GateOp {
    Cz,
    Ccz,
    S,
}

#[derive(Args, Debug)]
pub struct GateArgs {
    #[arg(value_enum)]
    pub op: GateOp,
    /// Three-copy cubic stack.
    #[arg(long)]
    pub vb: bool,
    /// Hexagonal color code patch.
    #[arg(long)]
    pub colorcode: bool,
    /// Lattice size.
    #[arg(long = "L", default_value_t = 2)]
    pub side: usize,
    /// none, center, or fractal:<p>,<q>,<level> on the stack's vertex grid.
    #[arg(long, default_value = "none")]
    pub hole: String,
}

fn stack_holes(hole: &str, side: usize) -> anyhow::Result<Option<FractalSpec>> {
    if hole == "none" {
        return Ok(None);
    }
    if hole == "center" {
        if side.is_multiple_of(2) || side < 3 {
            bail!(Error::InvalidParameter(format!(
                "a centred unit hole needs an odd side of at least 3, got {side}"
            )));
        }
        return Ok(Some(FractalSpec::new(3, side, 1, 1)));
    }
    if let Some(rest) = hole.strip_prefix("fractal:") {
        let v: Vec<usize> = rest
            .split(',')
            .map(|x| x.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| Error::InvalidParameter(format!("bad hole spec {hole:?}")))?;
        if let [p, q, level] = v[..] {
            return Ok(Some(FractalSpec::new(3, p, q, level)));
        }
    }
    bail!(Error::InvalidParameter(format!(
        "unknown hole option {hole:?}"
    )))
}

pub fn gate_check(g: &GateArgs, common: &Common) -> anyhow::Result<i32> {
    let report: GateCheckReport = match g.op {
        GateOp::Ccz => {
            if !g.vb {
                bail!(Error::InvalidParameter(
                    "ccz checks run on the --vb stack".into()
                ));
            }
            let holes = stack_holes(&g.hole, g.side)?;
            let st = build_vasmer_browne_stack(g.side, holes.as_ref())?;
            let codes = [&st.codes[0], &st.codes[1], &st.codes[2]];
            let mut r = check_transversal_ccz(codes[0], codes[1], codes[2], &st.align)?;
            r.conditions
                .push(check_conjugated_commutation(codes, &st.align)?);
            let hb = r
                .failures()
                .filter(|(_, w)| {
                    w.ids.iter().enumerate().any(|(c, id)| {
                        id.strip_prefix('X')
                            .and_then(|x| x.parse::<usize>().ok())
                            .is_some_and(|row| st.hole_boundary.get(c).is_some_and(|h| h[row]))
                    })
                })
                .count();
            eprintln!(
                "sites {} failures {} on hole-boundary checks {}",
                st.align.n_sites(),
                r.failures().count(),
                hb
            );
            r
        }
        GateOp::Cz => {
            let a = css_from_complex(
                Arc::new(fractalcss::complex::build_surface_layout(2, g.side)?),
                1,
            )?;
            let b = a.swap_xz();
            let al = StackAlignment::identity(a.n_qubits(), 2)?;
            check_transversal_cz(&a, &b, &al)?
        }
        GateOp::S => {
            if !g.colorcode {
                bail!(Error::InvalidParameter(
                    "s checks run on the --colorcode patch".into()
                ));
            }
            let cc = build_color_code_2d(g.side)?;
            check_transversal_s_colorcode(&cc)?
        }
    };
    emit(common, &report.to_text())?;
    Ok(if report.passed() { 0 } else { 4 })
}

pub fn merge(g: &GeomArgs, common: &Common) -> anyhow::Result<i32> {
    let a = g.code()?;
    let b = g.code()?;
    let (ca, cb) = (
        a.complex().expect("built from a complex"),
        b.complex().expect("built from a complex"),
    );
    let iface = MergeInterface::facing(ca, cb)?;
    let m = merge_rough(&a, &b, &iface)?;
    let s = format!(
        "k_a={}\nk_b={}\nk_merged={}\ninterface_qubits={}\ninterface_x_checks={}\nparity_identity={}\nk_after_split={}\n",
        m.k_a,
        m.k_b,
        m.k_merged,
        iface.pairs[1].len(),
        m.interface_x_rows.len(),
        if m.parity_identity { "PASS" } else { "FAIL" },
        m.k_after_split()
    );
    emit(common, &s)?;
    Ok(0)
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub geom: GeomArgs,
    /// Inclusive level range such as `1..2`; overrides `--level`.
    #[arg(long)]
    pub levels: Option<String>,
    /// Weight bound for exhaustive searches.
    #[arg(long, default_value_t = 2)]
    pub w_max: usize,
    /// Fill the `seconds` column; without it the CSV is reproducible byte for byte.
    #[arg(long)]
    pub timing: bool,
}

pub fn parse_levels(s: &str) -> anyhow::Result<(usize, usize)> {
    let bad = || Error::InvalidParameter(format!("bad level range {s:?}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let (a, b): (usize, usize) = (
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    );
    if a > b {
        bail!(bad());
    }
    Ok((a, b))
}

pub const SCAN_HEADER: &str = "n,p,q,level,L,k,dz,dz_kind,dx,dx_kind,seconds";

pub fn scan_row(g: &GeomArgs, w_max: usize, timing: bool) -> anyhow::Result<String> {
    let start = Instant::now();
    let spec = g.spec()?;
    let code = g.code().with_context(|| format!("level {}", g.level))?;
    let k = logical_count(&code);
    let dz = auto_distance(&code, PauliType::Z, w_max)
        .with_context(|| format!("Z distance at level {}", g.level))?;
    let dx = auto_distance(&code, PauliType::X, w_max)
        .with_context(|| format!("X distance at level {}", g.level))?;
    let secs = if timing {
        format!("{:.3}", start.elapsed().as_secs_f64())
    } else {
        String::new()
    };
    Ok(format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        g.dim,
        g.p,
        g.q,
        g.level,
        spec.side(g.u),
        k,
        dz.value,
        dz.kind,
        dx.value,
        dx.kind,
        secs
    ))
}

pub fn scan(s: &ScanArgs, common: &Common) -> anyhow::Result<i32> {
    let (lo, hi) = match &s.levels {
        Some(r) => parse_levels(r)?,
        None => (s.geom.level, s.geom.level),
    };
    let rows: Vec<anyhow::Result<String>> = (lo..=hi)
        .into_par_iter()
        .map(|level| {
            let mut g = s.geom.clone();
            g.level = level;
            scan_row(&g, s.w_max, s.timing)
        })
        .collect();
    let mut out = format!("{SCAN_HEADER}\n");
    for r in rows {
        out.push_str(&r?);
        out.push('\n');
    }
    emit(common, &out)?;
    Ok(0)
}

pub fn export(g: &GeomArgs, common: &Common) -> anyhow::Result<i32> {
    let Some(dir) = common.out.as_deref().filter(|d| *d != "-") else {
        bail!(Error::InvalidParameter(
            "export needs --out <directory>".into()
        ));
    };
    let dir = Path::new(dir);
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let spec = g.spec()?;
    let c = g.complex()?;
    let code = css_from_complex(Arc::new(c.clone()), g.i)?;
    let p = code_params(&code)?;
    let write = |name: &str, text: String| -> anyhow::Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    };
    write("complex.txt", c.to_text())?;
    write("code.txt", code.to_text())?;
    write("hx.txt", code.hx().to_dense().to_text())?;
    write("hz.txt", code.hz().to_dense().to_text())?;
    write(
        "params.txt",
        format!(
            "{}D_H={:.4}\nn_qubits={}\nk={}\n",
            summary(&c),
            spec.hausdorff_dimension(),
            p.n_qubits,
            p.k
        ),
    )?;
    println!("wrote {}", dir.display());
    Ok(0)
}
