use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ini::Ini;
use tempfile::TempDir;

fn gbo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gbo"))
        .args(args)
        .env("RUST_BACKTRACE", "0")
        .output()
        .expect("failed to launch gbo")
}

fn ok(args: &[&str]) -> String {
    let out = gbo(args);
    assert!(
        out.status.success(),
        "gbo {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Writes `config.ini` and an `out/` directory inside a fresh tempdir.
fn workspace(config: &str) -> (TempDir, String, String) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.ini");
    fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    fs::create_dir(&out).unwrap();
    let (cfg, out) = (p(&cfg).to_string(), p(&out).to_string());
    (dir, cfg, out)
}

fn report_value(ini: &Ini, section: &str, key: &str) -> f64 {
    ini.get_from(Some(section), key).unwrap().parse().unwrap()
}

fn series_rows(dir: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(dir.join("series.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

const SOLITON: &str = "[grid]\nbasis = fourier\nN = 1024\nL = 50\n\
                       [initial]\ndata = exact_soliton(1, -10)\n\
                       [integrator]\nt_end = 2\n[output]\nsnapshots = 1\n";

#[test]
fn ground_state_m2_matches_the_explicit_soliton() {
    let (_d, cfg, out) = workspace("");
    ok(&["ground-state", "--config", &cfg, "--out", &out]);
    let report = Ini::load_from_file(Path::new(&out).join("report.ini")).unwrap();
    assert!(report_value(&report, "exact", "sup_error") <= 1e-10);
    assert!(report_value(&report, "pohozaev", "e1") <= 1e-10);
    assert!(report_value(&report, "pohozaev", "e2") <= 1e-10);
    let mass = report_value(&report, "invariants", "mass");
    assert!((mass / (8.0 * std::f64::consts::PI) - 1.0).abs() <= 1e-7);
    assert!(Path::new(&out).join("profile.csv").is_file());
}

#[test]
fn ground_state_m5_converges_on_the_narrow_map() {
    let (_d, cfg, out) = workspace("[equation]\nm = 5\n");
    ok(&["ground-state", "--config", &cfg, "--out", &out]);
    let report = Ini::load_from_file(Path::new(&out).join("report.ini")).unwrap();
    assert_eq!(report.get_from(Some("ground_state"), "L"), Some("1.0000000000000000e1"));
    assert!(report_value(&report, "pohozaev", "e1") <= 1e-10);
    assert!(report_value(&report, "pohozaev", "e2") <= 1e-10);
}

#[test]
fn missing_output_directory_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope");
    let out = gbo(&["ground-state", "--out", p(&missing)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not exist"));
    assert!(!gbo(&["evolve"]).status.success());
}

#[test]
fn evolve_moves_the_soliton_right_and_replays_exactly() {
    let (_d, cfg, out) = workspace(SOLITON);
    let line = ok(&["evolve", "--config", &cfg, "--out", &out, "--seed", "11"]);
    assert!(line.starts_with("SolitonResolution,"), "{line}");
    let dir = Path::new(&out);
    assert_eq!(fs::read_to_string(dir.join("outcome.txt")).unwrap(), line);
    assert_eq!(ok(&["fit", &out]), line);

    let rows = series_rows(dir);
    let (first, last) = (&rows[0], rows.last().unwrap());
    assert_eq!(last[0], 2.0);
    assert!(
        (last[4] - first[4] - 2.0).abs() < 1e-3,
        "x_c {} -> {}",
        first[4],
        last[4]
    );
    assert!(dir.join("snapshot_000.csv").is_file());
    let meta = Ini::load_from_file(dir.join("run.ini")).unwrap();
    assert_eq!(meta.get_from(Some("run"), "seed"), Some("11"));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let (_d, cfg, out) = workspace(SOLITON);
    ok(&["evolve", "--config", &cfg, "--out", &out]);
    let first = fs::read(Path::new(&out).join("series.csv")).unwrap();
    let other = Path::new(&out).parent().unwrap().join("again");
    fs::create_dir(&other).unwrap();
    ok(&["evolve", "--config", &cfg, "--out", p(&other)]);
    assert_eq!(fs::read(other.join("series.csv")).unwrap(), first);
    assert_eq!(
        fs::read(other.join("final.csv")).unwrap(),
        fs::read(Path::new(&out).join("final.csv")).unwrap()
    );
}

#[test]
fn zero_data_gives_an_all_zero_series() {
    let (_d, cfg, out) =
        workspace("[grid]\nbasis = fourier\nN = 64\nL = 10\n[initial]\ndata = zero\n[integrator]\nt_end = 1\n");
    ok(&["evolve", "--config", &cfg, "--out", &out]);
    for row in series_rows(Path::new(&out)) {
        assert!(row[1..8].iter().all(|&v| v == 0.0), "{row:?}");
    }
}

#[test]
fn evolve_restarts_from_a_stored_snapshot() {
    let (d, cfg, out) = workspace(SOLITON);
    ok(&["evolve", "--config", &cfg, "--out", &out]);
    let restart = d.path().join("restart.ini");
    fs::write(&restart, "[initial]\nfile = out/final.csv\n[integrator]\nt_end = 1\n").unwrap();
    let out2 = d.path().join("out2");
    fs::create_dir(&out2).unwrap();
    ok(&["evolve", "--config", p(&restart), "--out", p(&out2)]);
    let rows = series_rows(&out2);
    assert!((rows[0][4] + 8.0).abs() < 1e-3, "{}", rows[0][4]);
    assert!((rows.last().unwrap()[4] + 7.0).abs() < 1e-3);
}

#[test]
fn etdrk4_on_the_rational_grid_is_rejected() {
    let (_d, cfg, out) = workspace("[grid]\nbasis = rational\nN = 64\nL = 5\n[integrator]\nkind = etdrk4\n");
    let res = gbo(&["evolve", "--config", &cfg, "--out", &out]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("ETDRK4"));
}

#[test]
fn comoving_ground_state_is_stationary() {
    let (_d, cfg, out) = workspace("[grid]\nbasis = rational\nN = 512\nL = 20\n[integrator]\nt_end = 0.5\n");
    ok(&["comoving", "--config", &cfg, "--out", &out]);
    let rows = series_rows(Path::new(&out));
    for row in &rows {
        assert!((row[8] - 1.0).abs() <= 1e-3, "b = {}", row[8]);
        assert!((row[3] - rows[0][3]).abs() <= 1e-9, "linf drifts");
    }
    let meta = Ini::load_from_file(Path::new(&out).join("run.ini")).unwrap();
    let x_c: f64 = meta.get_from(Some("run"), "x_c").unwrap().parse().unwrap();
    assert!((x_c - 0.5).abs() < 1e-3, "{x_c}");
}

#[test]
fn comoving_rejects_invalid_input() {
    let (_d, cfg, out) = workspace("[equation]\nm = 1\n");
    assert!(!gbo(&["comoving", "--config", &cfg, "--out", &out]).status.success());
    let (_d, cfg, out) = workspace("[grid]\nbasis = fourier\nN = 64\nL = 5\n");
    assert!(!gbo(&["comoving", "--config", &cfg, "--out", &out]).status.success());
}

#[test]
fn single_threshold_row_matches_the_table() {
    let (_d, cfg, out) = workspace("[thresholds]\nm = 4\nprofiles = exp_x2\n");
    let table = ok(&["thresholds", "--config", &cfg, "--out", &out]);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "profile,m,A0_minus,A0_plus,A1,AE,AT");
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&cols[..2], &["exp_x2", "4"]);
    let got: Vec<f64> = cols[2..6].iter().map(|v| v.parse().unwrap()).collect();
    for (g, want) in got.iter().zip([1.6518, 2.2462, 1.8428, 2.3279]) {
        assert!((g - want).abs() <= 2e-3, "{g} vs {want}");
    }
    assert_eq!(cols[6], "");
    assert_eq!(
        fs::read_to_string(Path::new(&out).join("thresholds.csv")).unwrap(),
        table
    );
}

#[test]
fn coarse_bisection_writes_its_own_subdirectory() {
    let (_d, cfg, out) = workspace(
        "[grid]\nbasis = rational\nN = 256\nL = 20\n\
         [integrator]\ndt = 2e-3\nt_end = 10\nrecord_every = 250\n\
         [thresholds]\nm = 4\nprofiles = exp_x2\nbracket = 1.5, 2.5\nwidth = 0.1\n",
    );
    let table = ok(&["thresholds", "--bisect", "--config", &cfg, "--out", &out]);
    let at: f64 = table
        .lines()
        .nth(1)
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((1.5..2.5).contains(&at), "{at}");
    let sub = Path::new(&out).join("bisect_exp_x2_m4");
    let probes = fs::read_to_string(sub.join("probes.csv")).unwrap();
    assert!(probes.lines().count() >= 4);
    assert!(sub.join("bisection.ini").is_file());
}

#[test]
fn fit_rejects_damaged_artifacts() {
    let (_d, cfg, out) = workspace(SOLITON);
    ok(&["evolve", "--config", &cfg, "--out", &out]);
    let series = Path::new(&out).join("series.csv");
    let text = fs::read_to_string(&series).unwrap();
    fs::write(&series, &text[..text.len() - 9]).unwrap();
    assert!(!gbo(&["fit", &out]).status.success());
    fs::write(&series, &text).unwrap();
    let final_csv = Path::new(&out).join("final.csv");
    let snap = fs::read_to_string(&final_csv).unwrap();
    fs::write(&final_csv, snap.lines().take(20).collect::<Vec<_>>().join("\n")).unwrap();
    assert!(!gbo(&["fit", &out]).status.success());
}
