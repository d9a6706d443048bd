use std::collections::BTreeMap;
use std::io::Read;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::Args;
use fractalcss::code::{css_from_complex, CssCode};
use fractalcss::complex::{
    build_fractal, build_lattice, punch_fractal, Background, BoundaryKind, CellComplex,
    FractalSpec, HoleAssignment,
};

#[derive(Args, Debug, Clone)]
pub struct GeomArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    /// open, torus or sphere.
    #[arg(long, default_value = "open")]
    pub background: String,
    /// m, e or mixed:<file> with lines `hole <id> {e|m}`.
    #[arg(long, default_value = "m")]
    pub holes: String,
    /// Dimension of the cells carrying qubits.
    #[arg(long, default_value_t = 1)]
    pub i: usize,
    /// Side of the smallest cube, in lattice units.
    #[arg(long, default_value_t = 1)]
    pub u: usize,
    /// Use the all-primal cubic cellulation even where a mixed layout exists.
    #[arg(long)]
    pub primal: bool,
}

impl GeomArgs {
    pub fn spec(&self) -> anyhow::Result<FractalSpec> {
        let background: Background = self.background.parse()?;
        let spec = FractalSpec::new(self.dim, self.p, self.q, self.level)
            .with_background(background)
            .with_holes(parse_holes(&self.holes)?)
            .with_grading(self.i);
        spec.validate()?;
        Ok(spec)
    }

    pub fn complex(&self) -> anyhow::Result<CellComplex> {
        let spec = self.spec()?;
        if self.primal {
            let base = build_lattice(self.dim, spec.side(self.u), spec.background)?;
            return Ok(punch_fractal(&base, &spec)?);
        }
        Ok(build_fractal(&spec, self.u)?)
    }

    pub fn code(&self) -> anyhow::Result<CssCode> {
        Ok(css_from_complex(Arc::new(self.complex()?), self.i)?)
    }
}

pub fn parse_holes(s: &str) -> anyhow::Result<HoleAssignment> {
    if let Some(path) = s.strip_prefix("mixed:") {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        let mut kinds = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["hole", id, kind] => {
                    let id: u32 = id.parse().map_err(|_| fractalcss::Error::Parse {
                        line: n + 1,
                        msg: format!("bad hole id {id:?}"),
                    })?;
                    kinds.insert(id, kind.parse::<BoundaryKind>()?);
                }
                _ => {
                    return Err(fractalcss::Error::Parse {
                        line: n + 1,
                        msg: "expected `hole <id> {e|m}`".into(),
                    }
                    .into())
                }
            }
        }
        return Ok(HoleAssignment::PerHole {
            default: BoundaryKind::M,
            kinds,
        });
    }
    Ok(HoleAssignment::Uniform(s.parse()?))
}

/// Where a command gets its code or complex from.
#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// `cellcomplex v1` file, or `-` for standard input.
    #[arg(long, conflicts_with = "code")]
    pub complex: Option<String>,
    /// `csscode v1` file, or `-` for standard input.
    #[arg(long)]
    pub code: Option<String>,
    #[command(flatten)]
    pub geom: GeomArgs,
}

pub fn read_input(path: &str) -> anyhow::Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

impl InputArgs {
    /// The complex, when the input has one.
    pub fn complex(&self) -> anyhow::Result<Option<CellComplex>> {
        if let Some(path) = &self.complex {
            return Ok(Some(CellComplex::from_text(&read_input(path)?)?));
        }
        if self.code.is_some() {
            return Ok(None);
        }
        Ok(Some(self.geom.complex()?))
    }

    pub fn code(&self) -> anyhow::Result<CssCode> {
        if let Some(path) = &self.code {
            return Ok(CssCode::from_text(&read_input(path)?)?);
        }
        match self.complex()? {
            Some(c) => Ok(css_from_complex(Arc::new(c), self.geom.i)?),
            None => bail!("no input"),
        }
    }
}
