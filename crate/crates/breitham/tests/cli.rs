use std::path::Path;
use std::process::{Command, Output};

use breitham::format::{
    parse_critical, parse_distribution, parse_fit, parse_levels, parse_scan, write_points, Meta,
};

fn breitham(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_breitham"))
        .args(args)
        .env_remove("BREITHAM_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = breitham(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn basis_counts() {
    assert_eq!(stdout(&["basis", "--dim", "3", "--N", "3"]), "6\n");
    assert_eq!(stdout(&["basis", "--dim", "3", "--N", "4"]), "21\n");
    assert_eq!(stdout(&["basis", "--dim", "1", "--N", "11"]), "56\n");
}

#[test]
fn exit_codes() {
    assert_eq!(
        breitham(&["basis", "--dim", "0", "--N", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(breitham(&["basis", "--dim", "3"]).status.code(), Some(2));
    assert_eq!(breitham(&["basis", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        breitham(&["spectrum", "--dim", "3", "--N", "3", "--lambda", "0.01"])
            .status
            .code(),
        Some(2)
    );
    let no_bracket = breitham(&[
        "critical",
        "--dim",
        "3",
        "--N",
        "4",
        "--lambda",
        "0.01",
        "--bracket-start",
        "0.01",
        "--bracket-steps",
        "2",
    ]);
    assert_eq!(no_bracket.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&no_bracket.stderr).contains("no sign change"));
    let too_few = breitham(&[
        "fit",
        "--dim",
        "3",
        "--N",
        "4",
        "--lambda",
        "0.01",
        "--kappas",
        "0.1,0.11",
        "--kappa-crit",
        "0.123",
    ]);
    assert_eq!(too_few.status.code(), Some(3));
}

#[test]
fn spectrum_examples() {
    let free = parse_levels(&stdout(&[
        "spectrum", "--dim", "3", "--N", "3", "--m0-sq", "0", "--g0", "0",
    ]))
    .unwrap();
    assert!(free[0].mass_sq.abs() < 1e-12);
    let sym = parse_levels(&stdout(&[
        "spectrum",
        "--dim",
        "3",
        "--N",
        "4",
        "--lambda",
        "0.00345739",
        "--kappa",
        "0.124",
    ]))
    .unwrap();
    assert!(sym[0].mass_sq > 0.0);
    assert_eq!(sym[0].parity, -1);
    let one = parse_levels(&stdout(&[
        "spectrum", "--dim", "3", "--N", "1", "--m0-sq", "1", "--g0", "2",
    ]))
    .unwrap();
    assert_eq!(one.len(), 1);
}

#[test]
fn operator_dump_is_row_major() {
    let text = stdout(&[
        "spectrum",
        "--dim",
        "3",
        "--N",
        "3",
        "--m0-sq",
        "-0.5",
        "--g0",
        "4",
        "--operator",
    ]);
    let dump = breitham::format::parse_operator(&text).unwrap();
    assert_eq!(dump.dim, 6);
    assert!(dump
        .entries
        .windows(2)
        .all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
    assert!(dump.entries.iter().all(|e| e.0 <= e.1));
}

#[test]
fn critical_example() {
    let rows = parse_critical(&stdout(&[
        "critical", "--lambda", "0.01", "--dim", "3", "--N", "4", "--tol", "1e-6",
    ]))
    .unwrap();
    assert!(rows[0].width <= 1e-6);
    assert!((rows[0].kappa_crit - 0.12642).abs() / 0.12642 < 0.03);
    assert_eq!(rows[0].kappa_ref, 0.126968);
}

#[test]
fn distribution_free_delta() {
    let rows = parse_distribution(&stdout(&[
        "distribution",
        "--dim",
        "1",
        "--N",
        "11",
        "--m0",
        "3",
        "--g0",
        "0",
    ]))
    .unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].x, rows[0].f_bar), (1.0, 1.0));
}

#[test]
fn fit_recovers_synthetic_amplitude() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("points.csv");
    let kc = 0.125;
    let pts: Vec<(f64, f64)> = (1..=12)
        .map(|i| {
            let tau = 0.004 * f64::from(i);
            (
                kc * (1.0 - tau),
                2.0 * tau.sqrt() * tau.ln().abs().powf(-1.0 / 6.0),
            )
        })
        .collect();
    std::fs::write(&input, write_points(&pts, &Meta::default(), 17)).unwrap();
    let fit = parse_fit(&stdout(&[
        "fit",
        "--dim",
        "3",
        "--N",
        "4",
        "--input",
        input.to_str().unwrap(),
        "--kappa-crit",
        "0.125",
        "--window-lo",
        "0",
        "--window-hi",
        "10",
    ]))
    .unwrap();
    assert!((fit.amplitude - 2.0).abs() < 1e-10);
    assert_eq!(fit.points_used, 12);
    assert!(fit.log_corrected_rms <= fit.power_rms);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# lattice\ndim=3\nN=4\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(stdout(&["basis", "--config", c]), "21\n");
    assert_eq!(stdout(&["basis", "--config", c, "--N", "3"]), "6\n");
    std::fs::write(&cfg, "dim=3\nN=4\nflavour=up\n").unwrap();
    assert_eq!(breitham(&["basis", "--config", c]).status.code(), Some(2));
}

fn entries(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn writes_only_the_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let o = breitham(&[
        "scan",
        "--dim",
        "3",
        "--N",
        "3",
        "--lambda",
        "0.01",
        "--kappa-min",
        "0.11",
        "--kappa-max",
        "0.13",
        "--kappa-steps",
        "5",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(entries(dir.path()), vec!["scan.csv".to_string()]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# lattice: d=3 N=3 dk=1\n"));
    assert!(text.contains("# mK_sq="));
    assert!(!text.contains('\r'));
    let rows = parse_scan(&text).unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0].energies.len(), 3);
}

#[test]
fn worker_count_does_not_change_bytes() {
    let run = |w: &str, args: &[&str]| {
        let mut a = args.to_vec();
        a.extend(["--workers", w]);
        stdout(&a)
    };
    let scan = [
        "scan",
        "--dim",
        "3",
        "--N",
        "4",
        "--lambda",
        "0.00345739",
        "--kappa-min",
        "0.11",
        "--kappa-max",
        "0.13",
        "--kappa-steps",
        "9",
    ];
    let dist = [
        "distribution",
        "--dim",
        "1",
        "--N",
        "11",
        "--m0",
        "3",
        "--g0-max",
        "60",
        "--g0-steps",
        "7",
    ];
    for args in [&scan[..], &dist[..]] {
        let one = run("1", args);
        assert_eq!(one, run("2", args));
        assert_eq!(one, run("8", args));
    }
    let env = Command::new(env!("CARGO_BIN_EXE_breitham"))
        .args(dist)
        .env("BREITHAM_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(env.stdout).unwrap(), run("1", &dist));
}
