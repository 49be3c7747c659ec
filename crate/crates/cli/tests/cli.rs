use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_symreg");

fn symreg(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .env_remove("NHANES_DATA_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = symreg(dir, args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    symreg(dir, args).status.code().unwrap()
}

struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next()
    }
}

/// Writes survey-shaped tables for `n` people; `fat` maps (weight, height,
/// male, noise) to the target.
fn survey(dir: &Path, n: usize, min_age: f64, fat: impl Fn(f64, f64, bool, f64) -> f64) -> PathBuf {
    let mut rng = Lcg(42);
    let mut demo = String::from("SEQN,RIAGENDR,RIDAGEYR,RIDEXPRG\n");
    let mut bmx = String::from("SEQN,BMXWT,BMXHT,BMXLEG,BMXARML,BMXARMC,BMXWAIST,BMXHIP\n");
    let mut dxx = String::from("SEQN,DXDTOPF\n");
    for i in 0..n {
        let male = rng.next() < 0.5;
        let age = rng.range(min_age, 80.0).round();
        let ht = rng.range(150.0, 190.0);
        let wt = rng.range(45.0, 130.0);
        let waist = 0.6 * wt + rng.range(30.0, 50.0);
        let hip = 0.4 * wt + rng.range(60.0, 75.0);
        let leg = 0.22 * ht + rng.range(0.0, 5.0);
        let arml = 0.21 * ht + rng.range(0.0, 4.0);
        let armc = 0.2 * wt + rng.range(15.0, 20.0);
        let y = fat(wt, ht, male, rng.range(-2.0, 2.0));
        demo += &format!("{i},{},{age},\n", if male { 1 } else { 2 });
        bmx += &format!("{i},{wt},{ht},{leg},{arml},{armc},{waist},{hip}\n");
        dxx += &format!("{i},{y}\n");
    }
    let data = dir.join("nhanes");
    fs::create_dir_all(&data).unwrap();
    fs::write(data.join("DEMO_J.csv"), demo).unwrap();
    fs::write(data.join("BMX_J.csv"), bmx).unwrap();
    fs::write(data.join("DXX_J.csv"), dxx).unwrap();
    data
}

fn plausible(wt: f64, ht: f64, male: bool, noise: f64) -> f64 {
    let bmi = wt / (0.01 * ht).powi(2);
    1.2 * bmi - if male { 10.0 } else { 0.0 } + noise
}

fn affine_csv(dir: &Path) -> PathBuf {
    let mut rng = Lcg(7);
    let mut s = String::from("x,z,y\n");
    for _ in 0..120 {
        let (x, z) = (rng.range(-5.0, 5.0), rng.range(-5.0, 5.0));
        s += &format!("{x},{z},{}\n", 2.5 * x + 1.0);
    }
    let p = dir.join("affine.csv");
    fs::write(&p, s).unwrap();
    p
}

#[test]
fn help_lists_every_flag() {
    let dir = tempfile::tempdir().unwrap();
    let top = ok(dir.path(), &["--help"]);
    for flag in ["--data-dir", "--out-dir", "--seed", "--config", "--train-fraction"] {
        assert!(top.contains(flag), "{flag}");
    }
    let search = [
        "--population-size",
        "--generations",
        "--max-complexity",
        "--mode",
        "--parsimony",
        "--operators",
        "--set",
        "--quiet",
    ];
    let cases: &[(&str, &[&str])] = &[
        ("stats", &[]),
        ("fit-baseline", &[]),
        ("evolve", &["--csv", "--features", "--categorical", "--target"]),
        ("eval", &["--at", "--csv", "--target", "--output"]),
        ("diff", &["--wrt", "--at", "--affine", "--output"]),
        ("expand", &["--terms", "--output"]),
        ("simplify", &["--output"]),
        ("complexity", &[]),
        (
            "sweep",
            &["--wrt", "--range", "--steps", "--at", "--derivative", "--output"],
        ),
        (
            "modules",
            &["--depth", "--split", "--f-path", "--csv", "--label", "--output"],
        ),
        ("dot", &["--output"]),
        ("reproduce", &["--seeds", "--baselines-only"]),
    ];
    for (sub, flags) in cases {
        let help = ok(dir.path(), &[sub, "--help"]);
        assert!(top.contains(sub), "{sub} missing from top-level help");
        let mut want: Vec<&str> = flags.to_vec();
        if *sub == "evolve" || *sub == "reproduce" {
            want.extend(search);
        }
        for flag in want.iter().chain(&["--data-dir", "--out-dir", "--seed", "--config"]) {
            assert!(help.contains(flag), "{sub} --help lacks {flag}");
        }
        // Every long flag in the help text is one we expect.
        for word in help.split_whitespace().filter(|w| w.starts_with("--")) {
            let f = word.trim_end_matches(|c: char| !c.is_ascii_alphanumeric());
            let f = f.split(['=', '<', ' ']).next().unwrap();
            assert!(
                want.contains(&f)
                    || [
                        "--data-dir",
                        "--out-dir",
                        "--seed",
                        "--config",
                        "--train-fraction",
                        "--help"
                    ]
                    .contains(&f),
                "{sub}: undocumented flag {f}"
            );
        }
    }
}

#[test]
fn formula_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(ok(d, &["complexity", "sr3"]), "12\n");
    assert_eq!(ok(d, &["complexity", "SR Model 4"]), "17\n");
    assert_eq!(ok(d, &["diff", "x^2", "--wrt", "x"]), "2*x\n");
    assert_eq!(ok(d, &["simplify", "x + 0"]), "x\n");
    assert_eq!(ok(d, &["expand", "(x + 1)*(x - 1)"]), "x^2 - 1\n");
    let b1: f64 = ok(d, &["eval", "b1", "--at", "BMXWT=79.7,BMXHT=166.6"])
        .trim()
        .parse()
        .unwrap();
    assert!(b1.is_finite());
    let dot = ok(d, &["dot", "b3"]);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 13);
    let modules = ok(d, &["modules", "sr4", "--depth", "2"]);
    assert!(modules.lines().any(|l| l.starts_with(".\t17\t")));
    assert!(modules.lines().any(|l| l.starts_with("1.1\t")));
    assert!(d.join("out/modules.manifest.json").exists());
}

#[test]
fn parse_errors_exit_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let o = symreg(dir.path(), &["complexity", "2*(x+"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("byte 5"), "{err}");
    assert!(err.contains("     ^"), "{err}");
    assert_eq!(code(dir.path(), &["diff", "cases{a: 1}(G)", "--wrt", "G"]), 2);
    assert_eq!(code(dir.path(), &["eval", "x + y", "--at", "x=1"]), 2);
}

fn affine_of(d: &Path, at: &str) -> (f64, f64) {
    let out = ok(d, &["diff", "sr4", "--wrt", "BMXWAIST", "--at", at, "--affine"]);
    let v: Vec<f64> = out.split_whitespace().map(|t| t.parse().unwrap()).collect();
    (v[0], v[1])
}

const FEMALE: &str = "BMXWT=73.95,BMXHT=160.46,BMXARMC=31.87,BMXHIP=106.13,GENDER=Female";
const MALE: &str = "BMXWT=85.97,BMXHT=173.19,BMXARMC=34.33,BMXHIP=102.95,GENDER=Male";

#[test]
fn waist_derivative_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (fs_, fi) = affine_of(d, FEMALE);
    let (ms, mi) = affine_of(d, MALE);
    assert!((fs_ + 0.0053).abs() <= 2e-4 && (fi - 0.866).abs() <= 2e-2, "{fs_} {fi}");
    assert!((ms + 0.0058).abs() <= 2e-4 && (mi - 0.882).abs() <= 2e-2, "{ms} {mi}");

    let sweep = |at: &str, name: &str| {
        ok(
            d,
            &[
                "sweep",
                "sr4",
                "--wrt",
                "BMXWAIST",
                "--range",
                "56.4:154.9",
                "--steps",
                "50",
                "--at",
                at,
                "--derivative",
                "-o",
                name,
            ],
        );
        let text = fs::read_to_string(d.join(name)).unwrap();
        assert!(text.starts_with("x,value\n"));
        text.lines()
            .skip(1)
            .map(|l| {
                let (a, b) = l.split_once(',').unwrap();
                (a.parse::<f64>().unwrap(), b.parse::<f64>().unwrap())
            })
            .collect::<Vec<_>>()
    };
    let female = sweep(FEMALE, "female.csv");
    let male = sweep(MALE, "male.csv");
    assert_eq!(female.len(), 50);
    assert_eq!((female[0].0, female[49].0), (56.4, 154.9));
    for ((x, f), (_, m)) in female.iter().zip(&male) {
        assert!((f - (fs_ * x + fi)).abs() <= 1e-9 * f.abs().max(1.0));
        assert!(f > m);
    }
    let manifest = fs::read_to_string(d.join("out/sweep.manifest.json")).unwrap();
    assert!(manifest.contains("male.csv"));
}

#[test]
fn sr4_modules_scatter() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let text = ok(d, &["modules", "sr4", "--split", "1.1", "--f-path", "1.1.0.0.1"]);
    assert!(text.starts_with("f = (0.0306655*BMXHIP - 5.21981)*"), "{text}");
    assert!(text.contains("coefficient = 1"));
    let mut csv = String::from("BMXWT,BMXHT,BMXARMC,BMXWAIST,BMXHIP,GENDER\n");
    csv += "70,160,30,90,100,Female\n80,175,33,95,101,Male\n";
    fs::write(d.join("rows.csv"), csv).unwrap();
    let scatter = ok(
        d,
        &[
            "modules",
            "sr4",
            "--split",
            "1.1",
            "--f-path",
            "1.1.0.0.1",
            "--csv",
            "rows.csv",
        ],
    );
    let lines: Vec<&str> = scatter.lines().collect();
    assert_eq!(lines[0], "f,g,gender");
    assert!(lines[1].ends_with(",Female") && lines[2].ends_with(",Male"));
}

#[test]
fn cohort_commands_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(d, &["stats"]), 2);
    assert_eq!(code(d, &["stats", "--data-dir", "nowhere"]), 2);

    let data = survey(d, 150, 10.0, plausible);
    let data = data.to_str().unwrap();
    let a = ok(d, &["stats", "--data-dir", data, "--out-dir", "a"]);
    ok(d, &["stats", "--data-dir", data, "--out-dir", "b"]);
    assert!(a.contains("BMXWAIST"));
    for f in ["cohort.csv", "stats.csv", "stats.txt"] {
        assert_eq!(
            fs::read(d.join("a").join(f)).unwrap(),
            fs::read(d.join("b").join(f)).unwrap(),
            "{f} differs between runs"
        );
    }
    let manifest: String = fs::read_to_string(d.join("a/stats.manifest.json")).unwrap();
    assert_eq!(manifest.matches("\"sha256\"").count(), 3);

    let report = ok(d, &["fit-baseline", "3", "--data-dir", data]);
    assert!(report.contains("complexity  13"), "{report}");
    let report = ok(d, &["fit-baseline", "2", "--data-dir", data]);
    assert!(report.contains("complexity  4"), "{report}");
    assert!(d.join("out/baseline-2.json").exists());
    assert_eq!(ok(d, &["complexity", "out/baseline-3.json"]), "13\n");

    let empty = tempfile::tempdir().unwrap();
    let kids = survey(empty.path(), 40, 1.0, plausible);
    let demo = fs::read_to_string(kids.join("DEMO_J.csv")).unwrap();
    let young: String = demo
        .lines()
        .enumerate()
        .map(|(i, l)| {
            if i == 0 {
                format!("{l}\n")
            } else {
                let mut f: Vec<&str> = l.split(',').collect();
                f[2] = "5";
                format!("{}\n", f.join(","))
            }
        })
        .collect();
    fs::write(kids.join("DEMO_J.csv"), young).unwrap();
    assert_eq!(code(d, &["stats", "--data-dir", kids.to_str().unwrap()]), 3);

    let flat = tempfile::tempdir().unwrap();
    let flat_data = survey(flat.path(), 60, 20.0, |_, _, _, _| 30.0);
    assert_eq!(
        code(d, &["fit-baseline", "1", "--data-dir", flat_data.to_str().unwrap()]),
        4
    );
}

#[test]
fn custom_search_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    affine_csv(d);
    let args = |out: &'static str| {
        vec![
            "evolve",
            "custom",
            "--csv",
            "affine.csv",
            "--features",
            "x,z",
            "--population-size",
            "200",
            "--generations",
            "15",
            "--max-complexity",
            "3",
            "--quiet",
            "--seed",
            "3",
            "--out-dir",
            out,
        ]
    };
    ok(d, &args("one"));
    ok(d, &args("two"));
    for f in ["sr-custom.json", "sr-custom-front.csv", "sr-custom-history.csv"] {
        assert_eq!(
            fs::read(d.join("one").join(f)).unwrap(),
            fs::read(d.join("two").join(f)).unwrap(),
            "{f}"
        );
    }
    let front = fs::read_to_string(d.join("one/sr-custom-front.csv")).unwrap();
    let rows: Vec<(usize, f64)> = front
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.splitn(3, ',');
            (it.next().unwrap().parse().unwrap(), it.next().unwrap().parse().unwrap())
        })
        .collect();
    assert!(!rows.is_empty());
    // Sorted by complexity with strictly falling error: no member dominates another.
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1), "{front}");
    assert!(rows.iter().all(|r| r.0 <= 3));

    let eval = symreg(
        d,
        &["eval", "one/sr-custom.json", "--csv", "affine.csv", "--target", "y"],
    );
    assert!(eval.status.success());
    assert_eq!(stdout(&eval).lines().count(), 121);
    assert!(String::from_utf8_lossy(&eval.stderr).starts_with("R2 "));
}

#[test]
fn all_invalid_search_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut s = String::from("x,y\n");
    for i in 0..10 {
        s += &format!(",{i}\n");
    }
    fs::write(d.join("bad.csv"), s).unwrap();
    let codes: Vec<i32> = (0..40)
        .map(|seed| {
            let seed = seed.to_string();
            code(
                d,
                &[
                    "evolve",
                    "custom",
                    "--csv",
                    "bad.csv",
                    "--features",
                    "x",
                    "--operators",
                    "log",
                    "--population-size",
                    "1",
                    "--generations",
                    "1",
                    "--set",
                    "tournament_size=1",
                    "--set",
                    "elitism_count=0",
                    "--set",
                    "init_max_depth=2",
                    "--set",
                    "constant_range=-5,-1",
                    "--quiet",
                    "--seed",
                    &seed,
                ],
            )
        })
        .collect();
    assert!(codes.iter().all(|c| *c == 0 || *c == 5), "{codes:?}");
    assert!(codes.contains(&5));
}

#[test]
fn reproduce_shape() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let data = survey(d, 200, 10.0, plausible);
    let o = symreg(
        d,
        &[
            "reproduce",
            "--data-dir",
            data.to_str().unwrap(),
            "--seeds",
            "0,1",
            "--population-size",
            "30",
            "--generations",
            "2",
        ],
    );
    // Synthetic data cannot meet the reference checks, so violations are flagged.
    assert_eq!(o.status.code(), Some(4));
    let summary = fs::read_to_string(d.join("out/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 9);
    assert!(summary.lines().nth(1).unwrap().starts_with("Baseline 1,3,"));
    assert!(summary.lines().nth(5).unwrap().starts_with("SR Model 1,"));
    let runs = fs::read_to_string(d.join("out/runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 2 * 8);
    let checks = fs::read_to_string(d.join("out/checks.txt")).unwrap();
    assert!(checks.lines().any(|l| l.starts_with("FAIL cohort size")));
    assert!(d.join("out/reproduce.manifest.json").exists());
}
