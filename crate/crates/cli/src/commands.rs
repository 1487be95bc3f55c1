use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::thread;

use anyhow::{bail, Context, Result};
use gbo_core::diagnostics::{classify, classify_series, read_series_csv, write_series_csv};
use gbo_core::evolution::{
    comoving_evolve, evolve, linear_spectral_radius, Discretization, EvolutionConfig, Integrator,
};
use gbo_core::ground_state::{
    bo_soliton, default_grid, gn_constant, petviashvili_solve, pohozaev_errors, GroundState, PetviashviliConfig,
};
use gbo_core::initial::InitialData;
use gbo_core::thresholds::{
    bisect_at, probe, profile_functionals_refined, solve_a_mass, solve_ae, Bisection, ProbeConfig, ProfileFamily,
    ThresholdConstants, ThresholdReport, THRESHOLD_HEADER,
};
use gbo_core::{Field, Grid};
use ini::Ini;

use crate::artifacts::{num, read_snapshot, write_lines, write_snapshot, RunMeta};
use crate::config::{Basis, ExperimentConfig, GridSpec, InitialSpec};

/// Settings shared by every subcommand.
pub struct Session {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

impl Session {
    /// `--out` wins over `[output] dir`; the directory must already exist.
    pub fn new(config: Option<&Path>, out: Option<PathBuf>, seed: Option<u64>) -> Result<Self> {
        let config = match config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        let out = out
            .or_else(|| config.output_dir.clone())
            .context("no output directory (pass --out or set [output] dir)")?;
        if !out.is_dir() {
            bail!("output directory {} does not exist", out.display());
        }
        Ok(Self { config, out, seed })
    }
}

fn solve_ground_state(config: &ExperimentConfig, m: u32, grid: &Grid) -> Result<GroundState> {
    let pc = PetviashviliConfig {
        tolerance: config.gs_tolerance,
        max_iterations: config.gs_max_iterations,
        initial_guess: None,
    };
    let gs = petviashvili_solve(&pc, m, grid).with_context(|| format!("ground state for m = {m}"))?;
    log::info!(
        "ground state m={m}: {} iterations, last update {:e}",
        gs.iterations,
        gs.final_delta
    );
    Ok(gs)
}

pub fn ground_state(ctx: &Session) -> Result<String> {
    let c = &ctx.config;
    let grid = match c.grid {
        Some(g) => g.build()?,
        None => default_grid(c.m)?,
    };
    let gs = solve_ground_state(c, c.m, &grid)?;
    write_snapshot(&ctx.out.join("profile.csv"), &gs.profile, 0.0)?;

    let (e1, e2) = pohozaev_errors(&gs);
    let spec = GridSpec::of(&grid);
    let mut ini = Ini::new();
    ini.with_section(Some("ground_state"))
        .set("m", c.m.to_string())
        .set("basis", spec.basis.to_string())
        .set("N", spec.n.to_string())
        .set("L", num(spec.l))
        .set("tolerance", num(c.gs_tolerance))
        .set("iterations", gs.iterations.to_string())
        .set("final_delta", num(gs.final_delta));
    ini.with_section(Some("pohozaev")).set("e1", num(e1)).set("e2", num(e2));
    ini.with_section(Some("invariants"))
        .set("mass", num(gs.mass))
        .set("seminorm", num(gs.seminorm))
        .set("potential", num(gs.potential))
        .set("energy", num(gs.energy))
        .set("gn_constant", num(gn_constant(&gs)))
        .set("peak", num(gs.profile.sup_norm()));
    let mut summary = format!(
        "m={} iterations={} e1={:.3e} e2={:.3e} mass={:.12} energy={:.12}",
        c.m, gs.iterations, e1, e2, gs.mass, gs.energy
    );
    if c.m == 2 {
        let exact = Field::from_fn(grid, bo_soliton);
        let err = gs.profile.sup_distance(&exact);
        ini.with_section(Some("exact")).set("sup_error", num(err));
        summary.push_str(&format!(" sup_error={err:.3e}"));
    }
    let path = ctx.out.join("report.ini");
    ini.write_to_file(&path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Lab,
    Comoving,
}

impl Frame {
    fn name(self) -> &'static str {
        match self {
            Frame::Lab => "evolve",
            Frame::Comoving => "comoving",
        }
    }

    fn default_grid(self) -> GridSpec {
        match self {
            Frame::Lab => GridSpec {
                basis: Basis::Fourier,
                n: 1 << 14,
                l: 200.0,
            },
            Frame::Comoving => GridSpec {
                basis: Basis::Rational,
                n: 1024,
                l: 20.0,
            },
        }
    }

    fn default_initial(self) -> InitialData {
        match self {
            Frame::Lab => InitialData::ExactSoliton { c: 1.0, shift: -25.0 },
            Frame::Comoving => InitialData::ScaledGroundState { a: 1.0 },
        }
    }
}

/// Initial field and a printable description of where it came from.
fn initial_field(c: &ExperimentConfig, frame: Frame) -> Result<(Field, String)> {
    match &c.initial {
        Some(InitialSpec::File(path)) => {
            let (u0, _) = read_snapshot(path)?;
            if let Some(spec) = c.grid {
                if !spec.build()?.same_as(u0.grid()) {
                    bail!("[grid] does not match the grid stored in {}", path.display());
                }
            }
            Ok((u0, format!("file:{}", path.display())))
        }
        named => {
            let data = match named {
                Some(InitialSpec::Named(d)) => *d,
                _ => frame.default_initial(),
            };
            let grid = c.grid.unwrap_or(frame.default_grid()).build()?;
            let gs = if data.needs_ground_state(c.m) {
                Some(solve_ground_state(c, c.m, &default_grid(c.m)?)?)
            } else {
                None
            };
            Ok((data.sample(&grid, c.m, gs.as_ref())?, data.to_string()))
        }
    }
}

/// RK4 step that keeps `dt ρ` inside the stability interval, capped at 0.01.
fn default_dt(grid: &Grid, integrator: Integrator) -> f64 {
    match integrator {
        Integrator::Etdrk4 => 1e-2,
        Integrator::Rk4 => (2.5 / linear_spectral_radius(grid)).min(1e-2),
    }
}

fn integrator_name(i: Integrator) -> &'static str {
    match i {
        Integrator::Rk4 => "rk4",
        Integrator::Etdrk4 => "etdrk4",
    }
}

/// `evolve` and `comoving`: runs, writes artifacts and returns the outcome line.
pub fn dynamics(ctx: &Session, frame: Frame) -> Result<String> {
    let c = &ctx.config;
    let (u0, initial) = initial_field(c, frame)?;
    let grid = u0.grid().clone();
    let disc = Discretization::of(&grid);
    let integrator = c.integrator.kind.unwrap_or(match disc {
        Discretization::Fourier => Integrator::Etdrk4,
        Discretization::Rational => Integrator::Rk4,
    });
    let dt = c.integrator.dt.unwrap_or_else(|| default_dt(&grid, integrator));
    let mut ec = EvolutionConfig::new(c.m, disc, integrator, dt, c.integrator.t_end.unwrap_or(10.0));
    ec.record_every = c
        .integrator
        .record_every
        .unwrap_or_else(|| ((0.1 / dt).round() as usize).max(1));
    ec.stop_amplitude_factor = c.stop_amplitude_factor;
    ec.stop_drift = c.stop_drift;
    ec.snapshot_times = c.snapshot_times.clone();
    ec.dealias = c.integrator.dealias;

    let run = match frame {
        Frame::Lab => evolve(&u0, &ec)?,
        Frame::Comoving => comoving_evolve(&u0, &ec, c.sign)?,
    };
    log::info!(
        "{}: {} after {} steps at t = {}",
        frame.name(),
        run.halt,
        run.steps,
        run.t_final
    );

    let out = &ctx.out;
    let series_path = out.join("series.csv");
    let w = BufWriter::new(File::create(&series_path).with_context(|| format!("creating {}", series_path.display()))?);
    write_series_csv(w, &run.series)?;
    for (k, (t, field)) in run.snapshots.iter().enumerate() {
        write_snapshot(&out.join(format!("snapshot_{k:03}.csv")), field, *t)?;
    }
    write_snapshot(&out.join("final.csv"), &run.final_field, run.t_final)?;
    RunMeta {
        command: frame.name().into(),
        m: c.m,
        grid: GridSpec::of(&grid),
        integrator: integrator_name(integrator).into(),
        dt,
        initial,
        halt: run.halt,
        t_final: run.t_final,
        steps: run.steps,
        x_c: run.x_c,
        seed: ctx.seed,
        classify: c.classify,
    }
    .write(&out.join("run.ini"))?;

    let line = classify(&run, &c.classify).to_string();
    write_lines(&out.join("outcome.txt"), std::slice::from_ref(&line))?;
    Ok(line)
}

/// Reclassifies a finished run from `run.ini`, `series.csv` and `final.csv`.
pub fn fit(dir: &Path) -> Result<String> {
    let meta = RunMeta::read(&dir.join("run.ini"))?;
    let series_path = dir.join("series.csv");
    let file = File::open(&series_path).with_context(|| format!("opening {}", series_path.display()))?;
    let series = read_series_csv(BufReader::new(file)).with_context(|| format!("reading {}", series_path.display()))?;
    let (field, _) = read_snapshot(&dir.join("final.csv"))?;
    if GridSpec::of(field.grid()) != meta.grid {
        bail!("final.csv grid does not match run.ini");
    }
    Ok(classify_series(&series, meta.halt, meta.m, Some(&field), &meta.classify).to_string())
}

struct Row {
    profile: ProfileFamily,
    m: u32,
    /// Full report for `m > 3`.
    report: Option<ThresholdReport>,
    /// Mass threshold `(M[Q]/M_v)^{1/2}`, `m = 3` only.
    a_mass: Option<f64>,
    ae: f64,
    at: Option<f64>,
}

impl Row {
    fn csv(&self) -> String {
        match self.report {
            Some(r) => ThresholdReport { at: self.at, ..r }.csv_row(),
            None => format!(
                "{},{},,,,{},{}",
                self.profile,
                self.m,
                num(self.ae),
                self.at.map(num).unwrap_or_default()
            ),
        }
    }

    /// Lower end of the default bisection bracket.
    fn lower(&self) -> f64 {
        self.report.map(|r| r.a0_minus).or(self.a_mass).unwrap_or(0.5 * self.ae)
    }

    fn dir_name(&self) -> String {
        format!("bisect_{}_m{}", self.profile, self.m)
    }
}

fn probe_config(c: &ExperimentConfig, m: u32) -> Result<ProbeConfig> {
    let grid = c
        .grid
        .unwrap_or(GridSpec {
            basis: Basis::Rational,
            n: 1024,
            l: 20.0,
        })
        .build()?;
    let disc = Discretization::of(&grid);
    let integrator = c.integrator.kind.unwrap_or(Integrator::Rk4);
    let dt = c.integrator.dt.unwrap_or(2e-4);
    let mut evolution = EvolutionConfig::new(m, disc, integrator, dt, c.integrator.t_end.unwrap_or(20.0));
    evolution.record_every = c
        .integrator
        .record_every
        .unwrap_or_else(|| ((0.5 / dt).round() as usize).max(1));
    evolution.stop_amplitude_factor = c.stop_amplitude_factor;
    evolution.stop_drift = c.stop_drift;
    evolution.dealias = c.integrator.dealias;
    evolution.validate(&grid)?;
    Ok(ProbeConfig {
        grid,
        evolution,
        classify: c.classify,
    })
}

fn write_bisection(dir: &Path, b: &Bisection) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut lines = vec!["amplitude,outcome".to_string()];
    lines.extend(b.probes.iter().map(|(a, k)| format!("{},{k}", num(*a))));
    write_lines(&dir.join("probes.csv"), &lines)?;
    let mut ini = Ini::new();
    ini.with_section(Some("bisection"))
        .set("a_t", num(b.a_t))
        .set("lo", num(b.lo))
        .set("hi", num(b.hi))
        .set("uncertainty", num(b.uncertainty));
    let path = dir.join("bisection.ini");
    ini.write_to_file(&path)
        .with_context(|| format!("writing {}", path.display()))
}

/// Threshold table for every requested `(m, profile)`; `bisect` adds the
/// empirical `A_T`, one worker thread per row.
pub fn thresholds(ctx: &Session, bisect: bool) -> Result<String> {
    let c = &ctx.config;
    let th = &c.thresholds;
    let fgrid = th.functional_grid.build()?;
    let mut rows = Vec::new();
    for &m in &th.ms {
        if m < 3 {
            bail!("threshold tables need m >= 3, got {m}");
        }
        let gs = solve_ground_state(c, m, &default_grid(m)?)?;
        let consts = if m > 3 {
            Some(ThresholdConstants::from_ground_state(&gs)?)
        } else {
            None
        };
        for &profile in &th.profiles {
            let f = profile_functionals_refined(profile, m, &fgrid)
                .with_context(|| format!("functionals of {profile} for m = {m}"))?;
            let report = consts.map(|k| ThresholdReport::new(profile, &k, &f)).transpose()?;
            if let Some(r) = &report {
                if !r.ordering_check {
                    log::warn!("{profile} m={m}: thresholds are not ordered A0- < A1 < A0+ < AE");
                }
            }
            let a_mass = (m == 3).then(|| solve_a_mass(&gs, &f));
            if let Some(a) = a_mass {
                log::info!("{profile} m=3: mass threshold {a:.6}");
            }
            rows.push(Row {
                profile,
                m,
                report,
                a_mass,
                ae: solve_ae(&f, m),
                at: None,
            });
        }
    }

    if bisect {
        let results: Vec<Result<Bisection>> = thread::scope(|s| {
            let handles: Vec<_> = rows
                .iter()
                .map(|row| {
                    s.spawn(move || -> Result<Bisection> {
                        let pc = probe_config(c, row.m)?;
                        let bracket = th.bracket.unwrap_or((row.lower(), row.ae));
                        let b = bisect_at(bracket, th.width, |a| probe(row.profile, a, &pc).map(|o| o.kind))
                            .with_context(|| format!("bisecting {} m = {}", row.profile, row.m))?;
                        write_bisection(&ctx.out.join(row.dir_name()), &b)?;
                        Ok(b)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("bisection worker panicked"))
                .collect()
        });
        for (row, b) in rows.iter_mut().zip(results) {
            row.at = Some(b?.a_t);
        }
    }

    let mut lines = vec![THRESHOLD_HEADER.to_string()];
    lines.extend(rows.iter().map(Row::csv));
    write_lines(&ctx.out.join("thresholds.csv"), &lines)?;
    Ok(lines.join("\n"))
}
