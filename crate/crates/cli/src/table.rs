use std::fmt::Write as _;
use std::sync::Arc;

use clap::Args;
use fractalcss::code::{css_from_complex, PauliType};
use fractalcss::complex::{
    build_fractal, build_surface_layout, hausdorff_dimension_gap, FractalSpec,
};
use fractalcss::distance::{fit_scaling, DistanceKind};
use rayon::prelude::*;

use crate::commands::{auto_distance, emit};
use crate::Common;

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Levels measured for the small families.
    #[arg(long, default_value_t = 2)]
    pub measure_levels: usize,
    /// Largest p whose family is measured.
    #[arg(long, default_value_t = 3)]
    pub measure_max_p: usize,
    /// Weight bound for exhaustive fallbacks.
    #[arg(long, default_value_t = 2)]
    pub w_max: usize,
}

pub const TABLE_HEADER: &str = "family,n,p,q,D_H,dx_exponent,L,dz,dx,dx_fit,deviation";

enum Row {
    Fractal {
        label: String,
        p: f64,
        gap: f64,
        exact: Option<(usize, usize)>,
    },
    Surface {
        n: usize,
    },
}

fn rows() -> Vec<Row> {
    let mut v: Vec<Row> = [
        (3, 1),
        (4, 2),
        (5, 3),
        (6, 4),
        (7, 3),
        (7, 5),
        (10, 8),
        (15, 13),
        (30, 28),
        (100, 98),
        (500, 498),
        (5000, 4998),
    ]
    .into_iter()
    .map(|(p, q)| Row::Fractal {
        label: format!("FC({p};{q})"),
        p: p as f64,
        gap: (p - q) as f64,
        exact: Some((p, q)),
    })
    .collect();
    for e in [5, 10, 20, 80] {
        v.push(Row::Fractal {
            label: format!("FC(10^{e})"),
            p: 10f64.powi(e),
            gap: 2.0,
            exact: None,
        });
    }
    v.push(Row::Surface { n: 3 });
    v.push(Row::Surface { n: 2 });
    v
}

fn join(xs: &[usize]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Sides, Z distances and X distances, one entry per measured size.
type Measured = (Vec<usize>, Vec<usize>, Vec<usize>);

fn measure(
    sizes: &[usize],
    code_of: impl Fn(usize) -> anyhow::Result<fractalcss::code::CssCode> + Sync,
    w_max: usize,
) -> anyhow::Result<Option<Measured>> {
    let got: Vec<anyhow::Result<Option<(usize, usize, usize)>>> = sizes
        .par_iter()
        .map(|&l| {
            let code = code_of(l)?;
            let dz = auto_distance(&code, PauliType::Z, w_max)?;
            let dx = auto_distance(&code, PauliType::X, w_max)?;
            let exact = dz.kind == DistanceKind::Exact && dx.kind == DistanceKind::Exact;
            Ok(exact.then_some((l, dz.value, dx.value)))
        })
        .collect();
    let mut m: Measured = Default::default();
    for g in got {
        match g? {
            Some((l, z, x)) => {
                m.0.push(l);
                m.1.push(z);
                m.2.push(x);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(m))
}

fn measured_cells(m: Option<Measured>, expected: f64) -> anyhow::Result<String> {
    let Some((ls, dz, dx)) = m else {
        return Ok(",,,,".into());
    };
    let pts: Vec<(f64, f64)> = ls
        .iter()
        .zip(&dx)
        .map(|(&l, &d)| (l as f64, d as f64))
        .collect();
    let fit = fit_scaling(&pts)?.exponent;
    Ok(format!(
        "{},{},{},{fit:.4},{:.4}",
        join(&ls),
        join(&dz),
        join(&dx),
        (fit - expected).abs()
    ))
}

pub fn table1(t: &TableArgs, common: &Common) -> anyhow::Result<i32> {
    let mut out = format!("{TABLE_HEADER}\n");
    for row in rows() {
        match row {
            Row::Fractal {
                label,
                p,
                gap,
                exact,
            } => {
                let dh = hausdorff_dimension_gap(3, p, gap);
                let ex = hausdorff_dimension_gap(2, p, gap);
                let (ps, qs) = match exact {
                    Some((p, q)) => (p.to_string(), q.to_string()),
                    None => {
                        let e = label.trim_start_matches("FC(").trim_end_matches(')');
                        (e.to_string(), format!("{e}-{gap}"))
                    }
                };
                let m = match exact {
                    Some((p, q)) if p <= t.measure_max_p && t.measure_levels >= 2 => {
                        let levels: Vec<usize> = (1..=t.measure_levels).collect();
                        let sides: Vec<usize> = levels.iter().map(|&l| p.pow(l as u32)).collect();
                        measure(
                            &sides,
                            |side| {
                                let level = sides
                                    .iter()
                                    .position(|&s| s == side)
                                    .map_or(1, |i| levels[i]);
                                let c = build_fractal(&FractalSpec::new(3, p, q, level), 1)?;
                                Ok(css_from_complex(Arc::new(c), 1)?)
                            },
                            t.w_max,
                        )?
                    }
                    _ => None,
                };
                let _ = writeln!(
                    out,
                    "{label},3,{ps},{qs},{dh:.4},{ex:.4},{}",
                    measured_cells(m, ex)?
                );
            }
            Row::Surface { n } => {
                let sizes: Vec<usize> = (2..=1 + t.measure_levels.max(2)).collect();
                let m = measure(
                    &sizes,
                    |side| {
                        Ok(css_from_complex(
                            Arc::new(build_surface_layout(n, side)?),
                            1,
                        )?)
                    },
                    t.w_max,
                )?;
                let ex = (n - 1) as f64;
                let _ = writeln!(
                    out,
                    "surface{n}d,{n},,,{:.4},{ex:.4},{}",
                    n as f64,
                    measured_cells(m, ex)?
                );
            }
        }
    }
    emit(common, &out)?;
    Ok(0)
}
