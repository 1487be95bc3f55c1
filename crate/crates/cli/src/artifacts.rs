//! On-disk formats: snapshots, run metadata and report files.
//!
//! Floats are written as `{:.16e}` so every value round-trips exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use gbo_core::diagnostics::ClassifyConfig;
use gbo_core::evolution::HaltReason;
use gbo_core::Field;
use ini::Ini;

use crate::config::{Basis, GridSpec};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `# basis=<b> N=<n> L=<l> t=<t>` header, `x,u` column line, one row per node.
pub fn write_snapshot(path: &Path, field: &Field, t: f64) -> Result<()> {
    let spec = GridSpec::of(field.grid());
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    writeln!(w, "# basis={} N={} L={} t={}", spec.basis, spec.n, num(spec.l), num(t))?;
    writeln!(w, "x,u")?;
    for (x, u) in field.nodes().iter().zip(field.values()) {
        writeln!(w, "{},{}", num(*x), num(*u))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(Field, f64)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| anyhow!("{}: empty snapshot", path.display()))??;
    let fields = header
        .strip_prefix("# ")
        .ok_or_else(|| anyhow!("{}: missing snapshot header", path.display()))?;
    let (mut basis, mut n, mut l, mut t) = (None, None, None, None);
    for item in fields.split_whitespace() {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("bad header item {item:?}"))?;
        match k {
            "basis" => basis = Some(v.to_string()),
            "N" => n = Some(v.parse::<usize>()?),
            "L" => l = Some(v.parse::<f64>()?),
            "t" => t = Some(v.parse::<f64>()?),
            _ => bail!("unknown header key {k:?}"),
        }
    }
    let (n, l, t) = match (n, l, t) {
        (Some(n), Some(l), Some(t)) => (n, l, t),
        _ => bail!("{}: incomplete snapshot header", path.display()),
    };
    let basis: Basis = basis
        .ok_or_else(|| anyhow!("{}: snapshot header lacks a basis", path.display()))?
        .parse()?;
    let grid = GridSpec { basis, n, l }.build()?;
    if lines.next().transpose()?.as_deref() != Some("x,u") {
        bail!("{}: missing column line", path.display());
    }
    let mut values = Vec::with_capacity(grid.len());
    for line in lines {
        let line = line?;
        let (_, u) = line
            .split_once(',')
            .ok_or_else(|| anyhow!("{}: malformed row {line:?}", path.display()))?;
        values.push(
            u.parse::<f64>()
                .with_context(|| format!("{}: row {line:?}", path.display()))?,
        );
    }
    let field = Field::new(grid, values).with_context(|| format!("reading {}", path.display()))?;
    Ok((field, t))
}

/// Everything the offline classifier needs besides the series and field.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub command: String,
    pub m: u32,
    pub grid: GridSpec,
    pub integrator: String,
    pub dt: f64,
    pub initial: String,
    pub halt: HaltReason,
    pub t_final: f64,
    pub steps: usize,
    pub x_c: Option<f64>,
    pub seed: Option<u64>,
    pub classify: ClassifyConfig,
}

impl RunMeta {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut ini = Ini::new();
        ini.with_section(Some("run"))
            .set("command", self.command.as_str())
            .set("m", self.m.to_string())
            .set("basis", self.grid.basis.to_string())
            .set("N", self.grid.n.to_string())
            .set("L", num(self.grid.l))
            .set("integrator", self.integrator.as_str())
            .set("dt", num(self.dt))
            .set("initial", self.initial.as_str())
            .set("halt", self.halt.to_string())
            .set("t_final", num(self.t_final))
            .set("steps", self.steps.to_string());
        if let Some(x) = self.x_c {
            ini.with_section(Some("run")).set("x_c", num(x));
        }
        if let Some(s) = self.seed {
            ini.with_section(Some("run")).set("seed", s.to_string());
        }
        let c = &self.classify;
        ini.with_section(Some("classify"))
            .set("plateau", num(c.plateau))
            .set("residual", num(c.residual))
            .set("fit_window", num(c.fit_window))
            .set("blowup_window", c.blowup_window.to_string())
            .set("min_samples", c.min_samples.to_string());
        ini.write_to_file(path)
            .with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let ini = Ini::load_from_file(path).with_context(|| format!("reading {}", path.display()))?;
        let get = |section: &str, key: &str| {
            ini.get_from(Some(section), key)
                .ok_or_else(|| anyhow!("{}: missing [{section}] {key}", path.display()))
        };
        let parse_f = |section: &str, key: &str| -> Result<f64> { Ok(get(section, key)?.parse()?) };
        let parse_u = |section: &str, key: &str| -> Result<usize> { Ok(get(section, key)?.parse()?) };
        Ok(Self {
            command: get("run", "command")?.to_string(),
            m: get("run", "m")?.parse()?,
            grid: GridSpec {
                basis: get("run", "basis")?.parse()?,
                n: parse_u("run", "N")?,
                l: parse_f("run", "L")?,
            },
            integrator: get("run", "integrator")?.to_string(),
            dt: parse_f("run", "dt")?,
            initial: get("run", "initial")?.to_string(),
            halt: get("run", "halt")?.parse()?,
            t_final: parse_f("run", "t_final")?,
            steps: parse_u("run", "steps")?,
            x_c: ini.get_from(Some("run"), "x_c").map(str::parse).transpose()?,
            seed: ini.get_from(Some("run"), "seed").map(str::parse).transpose()?,
            classify: ClassifyConfig {
                plateau: parse_f("classify", "plateau")?,
                residual: parse_f("classify", "residual")?,
                fit_window: parse_f("classify", "fit_window")?,
                blowup_window: parse_u("classify", "blowup_window")?,
                min_samples: parse_u("classify", "min_samples")?,
            },
        })
    }
}

pub fn write_lines(path: &Path, lines: &[String]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for l in lines {
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    Ok(())
}
