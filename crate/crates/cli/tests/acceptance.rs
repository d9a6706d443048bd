//! One line per acceptance criterion, then a single assertion over all of them.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fractalcss::code::{code_params, css_from_complex, logical_count, CssCode, PauliType};
use fractalcss::complex::{
    build_fractal, build_lattice, fractal_holes, punch_boxes, punch_fractal, Background,
    BoundaryKind, BoundaryLabel, CellComplex, FractalSpec, HoleAssignment, HoleBox,
};
use fractalcss::distance::{
    dx_min_cut, dz_shortest_path, exhaustive_low_weight, fit_scaling, DistanceKind,
};
use fractalcss::gates::{
    build_color_code_2d, build_vasmer_browne_stack, check_conjugated_commutation,
    check_transversal_ccz, check_transversal_s_colorcode, merge_rough, shrunk_lattices, CondStatus,
    MergeInterface,
};
use fractalcss::gf2::{kernel_basis, Gf2Matrix};
use fractalcss::homology::{betti, cobetti, verify_lefschetz, HomologyRequest};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn code_of(c: CellComplex, i: usize) -> Result<CssCode, String> {
    css_from_complex(Arc::new(c), i).map_err(err)
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure!(t <= limit, "{what} took {t:?}, limit {limit:?}");
    Ok(())
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fractalcss"))
}

const TABLE1: &[(&str, f64, f64)] = &[
    ("FC(3;1)", 2.965, 1.893),
    ("FC(4;2)", 2.904, 1.792),
    ("FC(5;3)", 2.849, 1.723),
    ("FC(6;4)", 2.804, 1.672),
    ("FC(7;3)", 2.958, 1.896),
    ("FC(7;5)", 2.767, 1.633),
    ("FC(10;8)", 2.688, 1.556),
    ("FC(15;13)", 2.611, 1.486),
    ("FC(30;28)", 2.507, 1.398),
    ("FC(100;98)", 2.385, 1.299),
    ("FC(500;498)", 2.288, 1.223),
    ("FC(5000;4998)", 2.210, 1.163),
    ("FC(10^5)", 2.156, 1.120),
    ("FC(10^10)", 2.078, 1.060),
    ("FC(10^20)", 2.039, 1.030),
    ("FC(10^80)", 2.0097, 1.0075),
    ("surface3d", 3.0, 2.0),
    ("surface2d", 2.0, 1.0),
];

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let out = bin().arg("table1").output().map_err(err)?;
    within(start, Duration::from_secs(1), "table1")?;
    ensure!(out.status.success(), "table1 exited with {}", out.status);
    let text = String::from_utf8(out.stdout).map_err(err)?;
    let mut worst = 0f64;
    for &(family, dh, ex) in TABLE1 {
        let line = text
            .lines()
            .find(|l| l.split(',').next() == Some(family))
            .ok_or_else(|| format!("no row {family}"))?;
        let f: Vec<&str> = line.split(',').collect();
        let got_dh: f64 = f[4].parse().map_err(err)?;
        let got_ex: f64 = f[5].parse().map_err(err)?;
        let dev = (got_dh - dh).abs().max((got_ex - ex).abs());
        ensure!(dev <= 1e-3, "{family}: {got_dh}/{got_ex} against {dh}/{ex}");
        worst = worst.max(dev);
    }
    Ok(format!("{} rows, max deviation {worst:.1e}", TABLE1.len()))
}

fn fc(level: usize) -> FractalSpec {
    FractalSpec::new(3, 3, 1, level)
}

fn criterion_2() -> Outcome {
    let limit = Duration::from_secs(30);
    let cases: Vec<(&str, FractalSpec, usize)> = vec![
        (
            "punctured sphere",
            fc(1).with_background(Background::Sphere),
            0,
        ),
        (
            "punctured 3-torus",
            fc(1).with_background(Background::Torus),
            3,
        ),
        ("fractal surface code level 0", fc(0), 1),
        ("fractal surface code level 1", fc(1), 1),
        ("fractal surface code level 2", fc(2), 1),
    ];
    for (name, spec, want) in &cases {
        let start = Instant::now();
        let code = code_of(build_fractal(spec, 1).map_err(err)?, 1)?;
        let p = code_params(&code).map_err(|e| format!("{name}: {e}"))?;
        ensure!(p.k == *want, "{name}: k = {} instead of {want}", p.k);
        within(start, limit, name)?;
    }
    Ok(format!(
        "{} instances, k matches homology on each",
        cases.len()
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut pts = Vec::new();
    let mut seen = Vec::new();
    for (level, dz_want, dx_want) in [(1, 3, 8), (2, 9, 64)] {
        let code = code_of(build_fractal(&fc(level), 1).map_err(err)?, 1)?;
        let dz = dz_shortest_path(&code).map_err(err)?;
        let dx = dx_min_cut(&code).map_err(err)?;
        ensure!(
            dz.kind == DistanceKind::Exact && dx.kind == DistanceKind::Exact,
            "level {level}: inexact distances"
        );
        ensure!(
            (dz.value, dx.value) == (dz_want, dx_want),
            "level {level}: dz={} dx={}",
            dz.value,
            dx.value
        );
        ensure!(
            dz.verify(&code).map_err(err)? && dx.verify(&code).map_err(err)?,
            "level {level}: witness rejected"
        );
        pts.push((3f64.powi(level as i32), dx.value as f64));
        seen.push(format!(
            "L={} dz={} dx={}",
            3usize.pow(level as u32),
            dz.value,
            dx.value
        ));
    }
    let fit = fit_scaling(&pts).map_err(err)?.exponent;
    ensure!((fit - 1.8928).abs() <= 5e-3, "fitted exponent {fit}");
    within(start, Duration::from_secs(60), "level 2 distances")?;
    Ok(format!("{}, fit {fit:.4}", seen.join(", ")))
}

/// Lightest nontrivial logical of weight one or two by direct enumeration.
fn brute_low_weight(code: &CssCode, t: PauliType) -> Option<usize> {
    let (same, opp) = match t {
        PauliType::X => (code.hx(), code.hz()),
        PauliType::Z => (code.hz(), code.hx()),
    };
    let n = code.n_qubits();
    let cols = opp.column_lists();
    let rows: Vec<Vec<usize>> = same.iter_rows().map(|r| r.to_vec()).collect();
    let base = Gf2Matrix::from_supports(n, &rows).rank();
    let nontrivial = |support: &[usize]| {
        let mut r = rows.clone();
        r.push(support.to_vec());
        Gf2Matrix::from_supports(n, &r).rank() > base
    };
    if (0..n).any(|q| cols[q].is_empty() && nontrivial(&[q])) {
        return Some(1);
    }
    for a in 0..n {
        for b in a + 1..n {
            if cols[a] == cols[b] && nontrivial(&[a, b]) {
                return Some(2);
            }
        }
    }
    None
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut pts = Vec::new();
    for level in 1..=3 {
        let spec = FractalSpec::new(2, 3, 1, level);
        let code = code_of(build_fractal(&spec, 1).map_err(err)?, 1)?;
        let oracle = brute_low_weight(&code, PauliType::X)
            .ok_or_else(|| format!("level {level}: oracle finds nothing"))?;
        let r = exhaustive_low_weight(&code, PauliType::X, 2).map_err(err)?;
        ensure!(
            r.kind == DistanceKind::Exact,
            "level {level}: search kind {}",
            r.kind
        );
        ensure!(
            r.value == oracle,
            "level {level}: search {} against oracle {oracle}",
            r.value
        );
        ensure!(
            r.verify(&code).map_err(err)?,
            "level {level}: witness rejected"
        );
        pts.push((3f64.powi(level as i32), r.value as f64));
    }
    let fit = fit_scaling(&pts).map_err(err)?.exponent;
    ensure!(fit < 0.1, "fitted exponent {fit}");
    within(start, Duration::from_secs(120), "carpet levels 1..3")?;
    let ds: Vec<String> = pts.iter().map(|p| p.1.to_string()).collect();
    Ok(format!(
        "dx = {} at levels 1..3, fit {fit:.3}",
        ds.join(",")
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let spec = fc(2).with_holes(HoleAssignment::Uniform(BoundaryKind::E));
    let (_, n_h) = fractal_holes(3, spec.side(1), 3, 1, 2).map_err(err)?;
    let code = code_of(build_fractal(&spec, 1).map_err(err)?, 1)?;
    let r = exhaustive_low_weight(&code, PauliType::Z, 2).map_err(err)?;
    ensure!(
        r.kind == DistanceKind::Exact && r.value <= 2,
        "Z search gave {} {}",
        r.value,
        r.kind
    );
    ensure!(r.verify(&code).map_err(err)?, "witness rejected");
    let k = code_params(&code).map_err(err)?.k;
    ensure!(k == n_h + 1, "k = {k} with {n_h} holes");
    within(start, Duration::from_secs(120), "e-hole level 2")?;
    Ok(format!("dz={} k={k} N_h={n_h}", r.value))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let torus = build_lattice(4, 2, Background::Torus).map_err(err)?;
    let k0 = logical_count(&code_of(torus.clone(), 2)?);
    ensure!(k0 == 6, "unpunctured k = {k0}");
    let mut ks = Vec::new();
    for kind in [BoundaryKind::E, BoundaryKind::M] {
        let hole = HoleBox {
            lo: vec![0; 4],
            size: vec![1; 4],
            kind,
        };
        let code = code_of(punch_boxes(&torus, &[hole]).map_err(err)?, 2)?;
        let k = code_params(&code).map_err(err)?.k;
        for t in [PauliType::Z, PauliType::X] {
            let r = exhaustive_low_weight(&code, t, 2).map_err(err)?;
            ensure!(
                r.kind == DistanceKind::CertifiedAbove(2),
                "{kind:?} hole: {t:?} search gave {} {}",
                r.value,
                r.kind
            );
        }
        ks.push(k);
    }
    ensure!(ks == [6, 6], "k with E and M holes: {ks:?}");
    within(start, Duration::from_secs(600), "4D torus")?;
    Ok("k = 6 without a hole and with either hole type, distances above 2".into())
}

fn split_labels(c: &CellComplex) -> (Vec<BoundaryLabel>, Vec<BoundaryLabel>) {
    let l = c.labels_present();
    (
        l.iter().copied().filter(|l| l.is_e()).collect(),
        l.iter().copied().filter(|l| l.is_m()).collect(),
    )
}

fn primal(spec: &FractalSpec) -> Result<CellComplex, String> {
    let base = build_lattice(spec.n, spec.side(1), spec.background).map_err(err)?;
    punch_fractal(&base, spec).map_err(err)
}

fn criterion_7() -> Outcome {
    let specs = [
        fc(1).with_background(Background::Sphere),
        fc(1).with_background(Background::Torus),
        fc(0),
        fc(1),
        fc(2),
    ];
    let mut checks = 0;
    for spec in &specs {
        let c = primal(spec)?;
        let (e, m) = split_labels(&c);
        for i in 0..=3 {
            let r = verify_lefschetz(&c, i, &e, &m).map_err(err)?;
            ensure!(r.holds, "{:?} level {}: {r}", spec.background, spec.level);
            checks += 1;
        }
    }
    Ok(format!(
        "{checks} grade checks on {} geometries",
        specs.len()
    ))
}

fn hole_boundary_only() -> Result<(usize, usize), String> {
    let st = build_vasmer_browne_stack(3, Some(&FractalSpec::new(3, 3, 1, 1))).map_err(err)?;
    let r =
        check_transversal_ccz(&st.codes[0], &st.codes[1], &st.codes[2], &st.align).map_err(err)?;
    let mut n = 0;
    for (_, w) in r.failures() {
        let hits = w.ids.iter().enumerate().any(|(c, id)| {
            id.strip_prefix('X')
                .and_then(|x| x.parse::<usize>().ok())
                .is_some_and(|row| st.hole_boundary[c][row])
        });
        ensure!(hits, "bulk witness {:?}", w.ids);
        n += 1;
    }
    ensure!(n > 0, "the holed stack reports no failures");
    Ok((n, st.hole_sites.len()))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    for side in [2, 3] {
        let st = build_vasmer_browne_stack(side, None).map_err(err)?;
        let r = check_transversal_ccz(&st.codes[0], &st.codes[1], &st.codes[2], &st.align)
            .map_err(err)?;
        ensure!(r.passed(), "L={side}: {}", r.to_text());
        ensure!(r.failures().count() == 0, "L={side}: failures reported");
    }
    let (n, sites) = hole_boundary_only()?;
    within(start, Duration::from_secs(60), "stack checks")?;
    Ok(format!(
        "L=2,3 pass; central hole ({sites} sites) gives {n} failures, all on hole-boundary checks"
    ))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let st = build_vasmer_browne_stack(3, Some(&FractalSpec::new(3, 3, 1, 1))).map_err(err)?;
    let cond = check_conjugated_commutation([&st.codes[0], &st.codes[1], &st.codes[2]], &st.align)
        .map_err(err)?;
    ensure!(
        cond.status == CondStatus::Pass,
        "{:?}",
        cond.witnesses.first()
    );
    within(start, Duration::from_secs(60), "commutation")?;
    Ok("all conjugated stabilizers commute".into())
}

fn criterion_10() -> Outcome {
    let mut notes = Vec::new();
    for side in [1, 2] {
        let cc = build_color_code_2d(side).map_err(err)?;
        let r = check_transversal_s_colorcode(&cc).map_err(err)?;
        for id in ["s.face", "s.logical"] {
            let c = r
                .condition(id)
                .ok_or_else(|| format!("no condition {id}"))?;
            ensure!(c.status == CondStatus::Pass, "L={side}: {id} {}", c.status);
        }
        let (a, b) = shrunk_lattices(&cc).map_err(err)?;
        for (name, c) in [("A", a), ("B", b)] {
            let k = code_params(&code_of(c, 1)?).map_err(err)?.k;
            ensure!(k == 1, "L={side}: shrunk lattice {name} has k = {k}");
        }
        notes.push(format!("L={side} n={}", cc.n_real()));
    }
    Ok(format!(
        "{}: S checks pass, shrunk lattices k=1",
        notes.join(", ")
    ))
}

fn criterion_11() -> Outcome {
    let start = Instant::now();
    let pairs = [
        (
            "cubic L=2",
            build_lattice(3, 2, Background::OpenCube).map_err(err)?,
        ),
        ("FC(3,1,1)", build_fractal(&fc(1), 1).map_err(err)?),
    ];
    for (name, c) in pairs {
        let a = code_of(c, 1)?;
        let iface =
            MergeInterface::facing(a.complex().unwrap(), a.complex().unwrap()).map_err(err)?;
        let m = merge_rough(&a, &a, &iface).map_err(err)?;
        ensure!(m.k_merged == 1, "{name}: k_merged = {}", m.k_merged);
        ensure!(
            m.k_merged + 1 == m.k_a + m.k_b,
            "{name}: k drops by {}",
            m.k_a + m.k_b - m.k_merged
        );
        ensure!(m.parity_identity, "{name}: parity identity fails");
    }
    within(start, Duration::from_secs(30), "merges")?;
    Ok("k_merged = 1 and parity identity on both pairs".into())
}

fn structural(c: &CellComplex) -> Result<(), String> {
    c.check_boundary_squared().map_err(err)?;
    for k in 0..=c.dim() {
        let b = betti(&HomologyRequest::absolute(c, k)).map_err(err)?.value;
        let cb = cobetti(&HomologyRequest::absolute(c, k))
            .map_err(err)?
            .value;
        ensure!(b == cb, "grade {k}: betti {b} cobetti {cb}");
        if k > 0 {
            let m = c.boundary_matrix(k);
            let nullity = kernel_basis(&m).len();
            ensure!(
                m.rank() + nullity == c.count(k),
                "rank-nullity fails at grade {k}"
            );
        }
    }
    let (e, _) = split_labels(c);
    for k in 0..=c.dim() {
        let b = betti(&HomologyRequest::relative(c, k, e.clone()))
            .map_err(err)?
            .value;
        let cb = cobetti(&HomologyRequest::relative(c, k, e.clone()))
            .map_err(err)?
            .value;
        ensure!(b == cb, "relative grade {k}: betti {b} cobetti {cb}");
    }
    for i in 1..c.dim() {
        let code = code_of(c.clone(), i)?;
        code.check_orthogonal().map_err(err)?;
        code_params(&code).map_err(err)?;
    }
    Ok(())
}

fn criterion_12() -> Outcome {
    let mut shipped: Vec<CellComplex> = vec![
        build_lattice(2, 3, Background::OpenCube).map_err(err)?,
        build_lattice(2, 3, Background::Torus).map_err(err)?,
        build_lattice(3, 2, Background::Sphere).map_err(err)?,
        build_lattice(3, 3, Background::Torus).map_err(err)?,
        build_fractal(&FractalSpec::new(2, 3, 1, 2), 1).map_err(err)?,
        build_fractal(
            &fc(1).with_holes(HoleAssignment::Uniform(BoundaryKind::E)),
            1,
        )
        .map_err(err)?,
        primal(&fc(1))?,
    ];
    for l in 0..=2 {
        shipped.push(build_fractal(&fc(l), 1).map_err(err)?);
    }
    for c in &shipped {
        structural(c)?;
    }
    for level in 1..=2 {
        let code = code_of(build_fractal(&fc(level), 1).map_err(err)?, 1)?;
        for r in [
            dz_shortest_path(&code).map_err(err)?,
            dx_min_cut(&code).map_err(err)?,
        ] {
            ensure!(
                r.verify(&code).map_err(err)?,
                "level {level}: witness rejected"
            );
        }
    }

    let seed = [0x5eu8; 32];
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: 200,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::from_seed(RngAlgorithm::ChaCha, &seed),
    );
    let geometry = (
        2usize..=3,
        1usize..=3,
        0usize..3,
        prop_oneof![Just('m'), Just('e')],
        any::<bool>(),
    );
    let cases = std::cell::Cell::new(0);
    runner
        .run(&geometry, |(n, side, bg, holes, punch)| {
            let bg = [Background::OpenCube, Background::Torus, Background::Sphere][bg];
            let mut c =
                build_lattice(n, side + 1, bg).map_err(|e| TestCaseError::fail(e.to_string()))?;
            if punch && side + 1 >= 3 {
                let kind = if holes == 'm' {
                    BoundaryKind::M
                } else {
                    BoundaryKind::E
                };
                let hole = HoleBox {
                    lo: vec![1; n],
                    size: vec![1; n],
                    kind,
                };
                c = punch_boxes(&c, &[hole]).map_err(|e| TestCaseError::fail(e.to_string()))?;
            }
            structural(&c).map_err(TestCaseError::fail)?;
            let code = code_of(c, 1).map_err(TestCaseError::fail)?;
            let z = exhaustive_low_weight(&code, PauliType::Z, 2)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(z
                .verify(&code)
                .map_err(|e| TestCaseError::fail(e.to_string()))?);
            cases.set(cases.get() + 1);
            Ok(())
        })
        .map_err(err)?;
    Ok(format!(
        "{} shipped geometries, {} randomized instances",
        shipped.len(),
        cases.get()
    ))
}

/// Written to the stderr handle directly so the lines show without `--nocapture`.
fn report(line: String) {
    use std::io::Write;
    let _ = writeln!(std::io::stderr(), "{line}");
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Outcome); 12] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
    ];
    let mut failed = Vec::new();
    for (n, f) in criteria {
        let start = Instant::now();
        match f() {
            Ok(msg) => report(format!("criterion {n:>2}: PASS ({msg}; {:.2?})", start.elapsed())),
            Err(msg) => {
                report(format!("criterion {n:>2}: FAIL ({msg})"));
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
