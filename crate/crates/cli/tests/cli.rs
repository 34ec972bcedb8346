use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use tempfile::TempDir;
use udwi::config::{
    DetectorConfig, InterferometerConfig, ModeSetting, PulseConfig, SweepConfig, SweepVariable,
    SwitchingConfig,
};
use udwi::ScenarioConfig;

const BIN: &str = env!("CARGO_BIN_EXE_udwi");

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.toml"))
}

fn udwi(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    match threads {
        Some(n) => cmd.env("UDWI_THREADS", n),
        None => cmd.env_remove("UDWI_THREADS"),
    };
    cmd.output().expect("binary runs")
}

struct Csv {
    comment: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn parse(text: &str) -> Self {
        let mut lines = text.lines();
        let comment = lines.next().unwrap().to_string();
        let header = lines.next().unwrap().split(',').map(String::from).collect();
        let rows = lines
            .map(|l| l.split(',').map(String::from).collect())
            .collect();
        Csv {
            comment,
            header,
            rows,
        }
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let i = self.header.iter().position(|h| h == name).unwrap();
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }

    fn labels(&self, name: &str) -> Vec<String> {
        let i = self.header.iter().position(|h| h == name).unwrap();
        self.rows.iter().map(|r| r[i].clone()).collect()
    }
}

fn run_csv(cmd: &str, config: &Path, extra: &[&str]) -> Csv {
    let mut args = vec![cmd, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = udwi(&args, None);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    Csv::parse(&String::from_utf8(out.stdout).unwrap())
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn edited(name: &str, edits: &[(&str, &str)]) -> String {
    let mut text = std::fs::read_to_string(scenario(name)).unwrap();
    for (from, to) in edits {
        assert!(text.contains(from), "{from}");
        text = text.replace(from, to);
    }
    text
}

#[test]
fn columns_are_exact() {
    let expect = [
        ("classical", "sweep_value,p_d1,p_d2,visibility_envelope"),
        (
            "udw",
            "sweep_value,k_star,a0_sq,p_d1,p_d2,sum_rule_residual",
        ),
        (
            "ensemble",
            "sweep_value,p_d1,p_d2,visibility,k_medstar,regime",
        ),
        ("povm", "sweep_value,p_i,p_ii,p_iii,completeness_residual"),
        (
            "goldenrule",
            "sweep_value,naive_d1,naive_d2,quantum_d1,classical_d1,modulation_factor",
        ),
    ];
    for (cmd, header) in expect {
        let csv = run_csv(cmd, &scenario(cmd), &[]);
        assert_eq!(csv.header.join(","), header);
        assert!(csv
            .comment
            .starts_with(&format!("# udwi {cmd} config_sha256=")));
        assert!(csv.comment.ends_with("mode=corrected"));
        assert!(csv.rows.iter().all(|r| r.len() == csv.header.len()));
    }
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    for cmd in ["classical", "ensemble", "povm"] {
        let cfg = scenario(cmd);
        let mut outputs = Vec::new();
        for threads in ["1", "3", "8"] {
            let path = dir.path().join(format!("{cmd}-{threads}.csv"));
            let out = udwi(
                &[
                    cmd,
                    "--config",
                    cfg.to_str().unwrap(),
                    "--out",
                    path.to_str().unwrap(),
                ],
                Some(threads),
            );
            assert!(out.status.success());
            assert!(out.stdout.is_empty());
            outputs.push(std::fs::read(&path).unwrap());
        }
        outputs.push(udwi(&[cmd, "--config", cfg.to_str().unwrap()], None).stdout);
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{cmd}");
    }
}

#[test]
fn classical_columns() {
    let csv = run_csv("classical", &scenario("classical"), &[]);
    let dl = csv.column("sweep_value");
    let p1 = csv.column("p_d1");
    let p2 = csv.column("p_d2");
    assert_eq!(dl[0], 0.0);
    assert_eq!(p1[0], 1.0);
    let env = csv.column("visibility_envelope");
    for i in 0..dl.len() {
        let x = dl[i] / (2.0 * 2f64.sqrt());
        assert!((env[i] - (-x * x).exp()).abs() <= 1e-15);
        assert!((p1[i] + p2[i] - 1.0).abs() <= 1e-15);
    }
}

#[test]
fn udw_columns() {
    let csv = run_csv("udw", &scenario("udw"), &[]);
    assert!(csv
        .column("sum_rule_residual")
        .iter()
        .all(|r| r.abs() <= 1e-14));
    // Path difference is 20 coherence widths and the modulation is still full.
    let p1 = csv.column("p_d1");
    let max = p1.iter().cloned().fold(f64::MIN, f64::max);
    let min = p1.iter().cloned().fold(f64::MAX, f64::min);
    assert!((max - min) / (max + min) > 0.99);

    let dir = TempDir::new().unwrap();
    let doubled = write_config(
        &dir,
        "g.toml",
        &edited("udw", &[("coupling = 0.01", "coupling = 0.02")]),
    );
    let a = csv.column("a0_sq");
    let b = run_csv("udw", &doubled, &[]).column("a0_sq");
    for (x, y) in a.iter().zip(&b) {
        assert!((y / x - 4.0).abs() < 1e-14);
    }
}

#[test]
fn ensemble_columns() {
    let csv = run_csv("ensemble", &scenario("ensemble"), &[]);
    let vis = csv.column("visibility");
    assert!(vis.windows(2).all(|w| w[1] >= w[0]));
    // Regime thresholds: v0 delta_chi against delta / 50 and 50 max(delta, |dl|).
    let (delta, dl) = (1.0f64, 3.0f64);
    let v0 = 20.0 / 20.0f64.hypot(0.0);
    let labels = csv.labels("regime");
    for (dchi, label) in csv.column("sweep_value").iter().zip(&labels) {
        let len = v0 * dchi;
        let expect = if len >= 50.0 * delta.max(dl) {
            "quantum"
        } else if len <= delta / 50.0 {
            "classical"
        } else {
            "intermediate"
        };
        assert_eq!(label, expect, "delta_chi {dchi}");
    }
    assert_eq!(labels.first().unwrap(), "classical");
    assert_eq!(labels.last().unwrap(), "quantum");
}

#[test]
fn modes_differ_by_switching_rescaling() {
    let dir = TempDir::new().unwrap();
    let quarter = write_config(
        &dir,
        "q.toml",
        &edited(
            "ensemble",
            &[
                ("start = 0.001", "start = 0.00025"),
                ("stop = 200.0", "stop = 50.0"),
            ],
        ),
    );
    let corrected = run_csv("ensemble", &scenario("ensemble"), &[]);
    let paper = run_csv("ensemble", &quarter, &["--mode", "paper_verbatim"]);
    assert!(paper.comment.ends_with("mode=paper_verbatim"));
    for (a, b) in corrected
        .column("visibility")
        .iter()
        .zip(paper.column("visibility"))
    {
        assert!((a - b).abs() <= 1e-10);
    }
}

#[test]
fn povm_columns() {
    let csv = run_csv("povm", &scenario("povm"), &[]);
    assert!(csv
        .column("completeness_residual")
        .iter()
        .all(|r| r.abs() <= 1e-12));
    let udw = run_csv("udw", &scenario("povm"), &[]);
    // Compared on the scale of the pattern, |A0|^2, since dark rows are ~0.
    let scale = udw.column("a0_sq");
    for ((a, b), s) in csv.column("p_i").iter().zip(udw.column("p_d1")).zip(scale) {
        assert!((a - b).abs() <= 1e-12 * s);
    }
    let dir = TempDir::new().unwrap();
    let off = write_config(
        &dir,
        "off.toml",
        &edited("povm", &[("coupling = 0.01", "coupling = 0.0")]),
    );
    assert!(run_csv("povm", &off, &[])
        .column("p_iii")
        .iter()
        .all(|&p| p == 1.0));
}

#[test]
fn goldenrule_columns() {
    let csv = run_csv("goldenrule", &scenario("goldenrule"), &[]);
    let naive = csv.column("naive_d1");
    let m = csv.column("modulation_factor");
    for (n, m) in naive.iter().zip(&m) {
        assert!((n - m / 4.0).abs() < 1e-15);
    }
    // The classical column loses its fringes while the naive one keeps them.
    let c = csv.column("classical_d1");
    let tail = &c[c.len() - 10..];
    assert!(tail.iter().all(|p| (p - 0.5).abs() < 1e-3));
    assert!(naive.iter().cloned().fold(f64::MAX, f64::min) < 1e-3);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario("classical");
    let cfg = cfg.to_str().unwrap();
    let code = |args: &[&str]| udwi(args, None).status.code().unwrap();

    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["classical", "--config", cfg]), 0);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["classical"]), 1);
    assert_eq!(code(&["classical", "--config", cfg, "--mode", "eight"]), 1);

    let typo = write_config(
        &dir,
        "typo.toml",
        &edited("classical", &[("theta = 0.0", "theeta = 0.0")]),
    );
    let out = udwi(&["classical", "--config", typo.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theeta"));

    let bad = write_config(
        &dir,
        "bad.toml",
        &edited("classical", &[("delta = 1.0", "delta = 0.0")]),
    );
    let out = udwi(&["classical", "--config", bad.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pulse.delta"));

    assert_eq!(code(&["ensemble", "--config", cfg]), 1);
    let missing = dir.path().join("missing.toml");
    assert_eq!(
        code(&["classical", "--config", missing.to_str().unwrap()]),
        3
    );
    let unwritable = dir.path().join("no/such/dir/out.csv");
    assert_eq!(
        code(&[
            "classical",
            "--config",
            cfg,
            "--out",
            unwritable.to_str().unwrap()
        ]),
        3
    );

    assert_eq!(
        udwi(&["classical", "--config", cfg], Some("zero"))
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn verify_reports_and_fails_on_injected_coefficient() {
    let ok = udwi(&["verify", "--quiet"], None);
    assert_eq!(ok.status.code(), Some(0));
    let report = String::from_utf8(ok.stdout).unwrap();
    assert!(report.contains("time-integral exponent coefficient (measured): 0.50000000"));
    assert!(!report.contains("FAIL"));
    assert!(ok.stderr.is_empty());

    let bad = udwi(&["verify", "--inject-coefficient", "8"], None);
    assert_eq!(bad.status.code(), Some(2));
    let report = String::from_utf8(bad.stdout).unwrap();
    assert!(report
        .lines()
        .any(|l| l.starts_with("FAIL discrepancy_probe")));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("discrepancy_probe"));
}

#[test]
fn help_hides_the_test_hook() {
    let out = udwi(&["verify", "--help"], None);
    assert!(!String::from_utf8_lossy(&out.stdout).contains("inject"));
}

fn finite(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    lo..hi
}

fn arb_config() -> impl Strategy<Value = ScenarioConfig> {
    let switching = prop_oneof![
        Just(SwitchingConfig::Eternal {}),
        (finite(-50.0, 50.0), finite(0.01, 100.0))
            .prop_map(|(t_chi, delta_chi)| SwitchingConfig::Gaussian { t_chi, delta_chi }),
    ];
    let mode = prop_oneof![
        Just(None),
        Just(Some(ModeSetting::Corrected)),
        Just(Some(ModeSetting::PaperVerbatim)),
    ];
    (
        mode,
        (finite(5.0, 40.0), finite(1.0, 3.0), finite(0.0, 2.0)),
        (finite(1.0, 50.0), finite(1.0, 50.0), finite(-7.0, 7.0)),
        (finite(0.0, 40.0), finite(0.0, 0.05), switching),
        (finite(-3.0, 3.0), finite(-3.0, 3.0), 2usize..500),
    )
        .prop_map(
            |(mode, (k0, delta, mass), (l1, l2, theta), (gap, g, switching), (a, b, steps))| {
                ScenarioConfig {
                    mode,
                    pulse: PulseConfig { k0, delta, mass },
                    interferometer: InterferometerConfig { l1, l2, theta },
                    detector: DetectorConfig {
                        energy_gap: gap,
                        coupling: g,
                        switching,
                    },
                    sweep: SweepConfig {
                        variable: SweepVariable::Theta,
                        start: a,
                        stop: b,
                        steps,
                    },
                }
            },
        )
}

proptest! {
    #[test]
    fn config_round_trip(cfg in arb_config()) {
        let text = cfg.to_toml();
        let parsed = ScenarioConfig::parse(&text).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(ScenarioConfig::parse(&parsed.to_toml()).unwrap(), parsed);
    }
}
