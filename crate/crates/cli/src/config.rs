//! INI experiment configuration.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use gbo_core::diagnostics::ClassifyConfig;
use gbo_core::evolution::{DispersionSign, Integrator};
use gbo_core::initial::InitialData;
use gbo_core::thresholds::ProfileFamily;
use gbo_core::Grid;
use ini::Ini;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Fourier,
    Rational,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Fourier => "fourier",
            Basis::Rational => "rational",
        })
    }
}

impl FromStr for Basis {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fourier" => Ok(Basis::Fourier),
            "rational" => Ok(Basis::Rational),
            _ => bail!("unknown basis {s:?} (fourier or rational)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub basis: Basis,
    pub n: usize,
    pub l: f64,
}

impl GridSpec {
    pub fn of(grid: &Grid) -> Self {
        Self {
            basis: match grid {
                Grid::Fourier(_) => Basis::Fourier,
                Grid::Rational(_) => Basis::Rational,
            },
            n: grid.n(),
            l: grid.length_scale(),
        }
    }

    pub fn build(&self) -> Result<Grid> {
        Ok(match self.basis {
            Basis::Fourier => Grid::fourier(self.n, self.l)?,
            Basis::Rational => Grid::rational(self.n, self.l)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Named(InitialData),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorSpec {
    pub kind: Option<Integrator>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub record_every: Option<usize>,
    pub dealias: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSpec {
    pub ms: Vec<u32>,
    pub profiles: Vec<ProfileFamily>,
    /// Grid for the profile functionals.
    pub functional_grid: GridSpec,
    pub bracket: Option<(f64, f64)>,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub grid: Option<GridSpec>,
    pub m: u32,
    pub initial: Option<InitialSpec>,
    pub integrator: IntegratorSpec,
    pub stop_amplitude_factor: f64,
    pub stop_drift: f64,
    pub output_dir: Option<PathBuf>,
    pub snapshot_times: Vec<f64>,
    pub gs_tolerance: f64,
    pub gs_max_iterations: usize,
    pub classify: ClassifyConfig,
    pub sign: DispersionSign,
    pub thresholds: ThresholdSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let classify = ClassifyConfig::default();
        Self {
            grid: None,
            m: 2,
            initial: None,
            integrator: IntegratorSpec {
                kind: None,
                dt: None,
                t_end: None,
                record_every: None,
                dealias: false,
            },
            stop_amplitude_factor: 10.0,
            stop_drift: 1e-4,
            output_dir: None,
            snapshot_times: Vec::new(),
            gs_tolerance: 1e-12,
            gs_max_iterations: 10_000,
            classify,
            sign: DispersionSign::Gbo,
            thresholds: ThresholdSpec {
                ms: vec![4, 5],
                profiles: ProfileFamily::ALL.to_vec(),
                functional_grid: GridSpec {
                    basis: Basis::Rational,
                    n: 4096,
                    l: 20.0,
                },
                bracket: None,
                width: 0.01,
            },
        }
    }
}

const KEYS: &[(&str, &[&str])] = &[
    ("grid", &["basis", "N", "L"]),
    ("equation", &["m"]),
    ("initial", &["data", "file"]),
    ("integrator", &["kind", "dt", "t_end", "record_every", "dealias"]),
    ("stop", &["amplitude_factor", "drift"]),
    ("output", &["dir", "snapshots"]),
    ("ground_state", &["tolerance", "max_iterations"]),
    (
        "classify",
        &["plateau", "residual", "fit_window", "blowup_window", "min_samples"],
    ),
    ("comoving", &["sign"]),
    ("thresholds", &["m", "profiles", "basis", "N", "L", "bracket", "width"]),
];

/// Drops a trailing `; ...` or `# ...` comment.
fn strip_comment(v: &str) -> &str {
    let cut = v
        .char_indices()
        .find(|&(i, c)| (c == ';' || c == '#') && (i == 0 || v[..i].ends_with(char::is_whitespace)))
        .map_or(v.len(), |(i, _)| i);
    v[..cut].trim()
}

/// Flattened `section.key -> value` view that tracks unknown keys.
struct Table {
    values: HashMap<(String, String), String>,
}

impl Table {
    fn from_ini(ini: &Ini) -> Result<Self> {
        let mut values = HashMap::new();
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((k, _)) = props.iter().next() {
                    bail!("key `{k}` outside any section");
                }
                continue;
            };
            let allowed = KEYS
                .iter()
                .find(|(s, _)| *s == section)
                .ok_or_else(|| anyhow!("unknown section [{section}]"))?
                .1;
            for (k, v) in props.iter() {
                if !allowed.contains(&k) {
                    bail!("unknown key `{k}` in [{section}]");
                }
                values.insert((section.to_string(), k.to_string()), strip_comment(v).to_string());
            }
        }
        Ok(Self { values })
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.values
            .get(&(section.to_string(), key.to_string()))
            .map(String::as_str)
    }

    fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(section, key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("[{section}] {key} = {v:?}: {e}")))
            .transpose()
    }

    fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(section, key)
            .map(|v| {
                v.split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| {
                        s.trim()
                            .parse::<T>()
                            .map_err(|e| anyhow!("[{section}] {key} = {v:?}: {e}"))
                    })
                    .collect()
            })
            .transpose()
    }
}

pub fn parse_integrator(s: &str) -> Result<Integrator> {
    match s {
        "rk4" => Ok(Integrator::Rk4),
        "etdrk4" => Ok(Integrator::Etdrk4),
        _ => bail!("unknown integrator {s:?} (rk4 or etdrk4)"),
    }
}

fn parse_sign(s: &str) -> Result<DispersionSign> {
    match s {
        "gbo" => Ok(DispersionSign::Gbo),
        "reversed" => Ok(DispersionSign::Reversed),
        _ => bail!("unknown sign {s:?} (gbo or reversed)"),
    }
}

fn grid_spec(t: &Table, section: &str, fallback: Option<GridSpec>) -> Result<Option<GridSpec>> {
    let basis = t.raw(section, "basis").map(str::parse::<Basis>).transpose()?;
    let n = t.get::<usize>(section, "N")?;
    let l = t.get::<f64>(section, "L")?;
    if basis.is_none() && n.is_none() && l.is_none() {
        return Ok(fallback);
    }
    let base = fallback.unwrap_or(GridSpec {
        basis: Basis::Rational,
        n: 4096,
        l: 20.0,
    });
    let spec = GridSpec {
        basis: basis.unwrap_or(base.basis),
        n: n.unwrap_or(base.n),
        l: l.unwrap_or(base.l),
    };
    if !spec.n.is_power_of_two() {
        bail!("[{section}] N must be a power of two, got {}", spec.n);
    }
    if !(spec.l.is_finite() && spec.l > 0.0) {
        bail!("[{section}] L must be positive, got {}", spec.l);
    }
    Ok(Some(spec))
}

impl ExperimentConfig {
    /// Parses INI text; relative file paths resolve against `base`.
    pub fn from_ini_str(text: &str, base: &Path) -> Result<Self> {
        let ini = Ini::load_from_str(text).context("parsing config")?;
        let t = Table::from_ini(&ini)?;
        let mut c = ExperimentConfig {
            grid: grid_spec(&t, "grid", None)?,
            ..ExperimentConfig::default()
        };
        if let Some(m) = t.get::<u32>("equation", "m")? {
            c.m = m;
        }
        if c.m < 2 {
            bail!("[equation] m must be at least 2, got {}", c.m);
        }
        c.initial = match (t.raw("initial", "data"), t.raw("initial", "file")) {
            (Some(_), Some(_)) => bail!("[initial] takes either data or file, not both"),
            (Some(d), None) => Some(InitialSpec::Named(d.parse()?)),
            (None, Some(f)) => {
                let p = base.join(f);
                if !p.is_file() {
                    bail!("[initial] file {} does not exist", p.display());
                }
                Some(InitialSpec::File(p))
            }
            (None, None) => None,
        };

        c.integrator.kind = t.raw("integrator", "kind").map(parse_integrator).transpose()?;
        c.integrator.dt = t.get("integrator", "dt")?;
        c.integrator.t_end = t.get("integrator", "t_end")?;
        c.integrator.record_every = t.get("integrator", "record_every")?;
        c.integrator.dealias = t.get("integrator", "dealias")?.unwrap_or(false);
        if let Some(dt) = c.integrator.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                bail!("[integrator] dt must be positive, got {dt}");
            }
        }

        c.stop_amplitude_factor = t.get("stop", "amplitude_factor")?.unwrap_or(c.stop_amplitude_factor);
        c.stop_drift = t.get("stop", "drift")?.unwrap_or(c.stop_drift);

        c.output_dir = t.raw("output", "dir").map(|d| base.join(d));
        c.snapshot_times = t.list("output", "snapshots")?.unwrap_or_default();

        c.gs_tolerance = t.get("ground_state", "tolerance")?.unwrap_or(c.gs_tolerance);
        c.gs_max_iterations = t.get("ground_state", "max_iterations")?.unwrap_or(c.gs_max_iterations);

        let k = &mut c.classify;
        k.plateau = t.get("classify", "plateau")?.unwrap_or(k.plateau);
        k.residual = t.get("classify", "residual")?.unwrap_or(k.residual);
        k.fit_window = t.get("classify", "fit_window")?.unwrap_or(k.fit_window);
        k.blowup_window = t.get("classify", "blowup_window")?.unwrap_or(k.blowup_window);
        k.min_samples = t.get("classify", "min_samples")?.unwrap_or(k.min_samples);

        if let Some(s) = t.raw("comoving", "sign") {
            c.sign = parse_sign(s)?;
        }

        let th = &mut c.thresholds;
        if let Some(ms) = t.list::<u32>("thresholds", "m")? {
            th.ms = ms;
        }
        if let Some(p) = t.list::<ProfileFamily>("thresholds", "profiles")? {
            th.profiles = p;
        }
        th.functional_grid = grid_spec(&t, "thresholds", Some(th.functional_grid))?.unwrap_or(th.functional_grid);
        if let Some(b) = t.list::<f64>("thresholds", "bracket")? {
            match b.as_slice() {
                [lo, hi] => th.bracket = Some((*lo, *hi)),
                _ => bail!("[thresholds] bracket takes two values"),
            }
        }
        th.width = t.get("thresholds", "width")?.unwrap_or(th.width);
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_ini_str(&text, base).with_context(|| format!("in {}", path.display()))
    }
}
