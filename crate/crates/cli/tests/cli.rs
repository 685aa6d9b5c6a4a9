use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use bagopen::harness::{aggregate, read_run};
use bagopen::{Label, SegMask};

fn bagopen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bagopen")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = bagopen(&["run-trials", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn help_exits_zero() {
    assert_eq!(bagopen(&["--help"]).status.code(), Some(0));
}

#[test]
fn metrics_of_a_circle_rim() {
    let dir = tempfile::tempdir().unwrap();
    let r = 40;
    let mut m = SegMask::new(100, 100);
    for y in 0..100 {
        for x in 0..100 {
            let d = (((x - 50) * (x - 50) + (y - 50) * (y - 50)) as f64).sqrt();
            if d > r as f64 - 0.8 && d <= r as f64 + 0.2 {
                m.set(x, y, Label::Rim);
            }
        }
    }
    let (mask, cal) = (dir.path().join("ring.pgm"), dir.path().join("cal.txt"));
    m.save(&mask).unwrap();
    std::fs::write(&cal, format!("max_hull_area = {}\nmax_bag_area = 1e6\n", PI * (r * r) as f64)).unwrap();
    let o = bagopen(&["metrics", "--mask", p(&mask), "--calibration", p(&cal)]);
    assert!(o.status.success());
    let out = stdout(&o);
    let get = |k: &str| -> f64 {
        let line = out.lines().find(|l| l.starts_with(k)).unwrap();
        line.split('=').nth(1).unwrap().trim().parse().unwrap()
    };
    assert!((get("a_ch") - 1.0).abs() < 0.02, "{out}");
    assert!((get("e_ch") - 1.0).abs() < 0.05, "{out}");
    assert!(get("hull_vertices") >= 8.0);
}

#[test]
fn run_trials_is_byte_reproducible_and_report_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("det.cfg");
    std::fs::write(&cfg, "sim.deterministic = true\n").unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let args = |out: &Path| {
        bagopen(&["run-trials", "--tier", "1", "--trials", "6", "--seed", "3", "--config", p(&cfg), "--out", p(out)])
    };
    let (oa, ob) = (args(&a), args(&b));
    assert!(oa.status.success() && ob.status.success());
    assert_eq!(oa.stdout, ob.stdout);
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 8);
    for n in &names {
        assert_eq!(std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap(), "{n:?}");
    }

    let expect = aggregate(&read_run(&a).unwrap()).unwrap();
    let text = bagopen(&["report", "--in", p(&a)]);
    assert_eq!(stdout(&text), expect.to_text());
    assert_eq!(stdout(&text), stdout(&oa));
    let csv = bagopen(&["report", "--in", p(&a), "--format", "csv"]);
    assert_eq!(stdout(&csv), expect.to_csv());
    assert!(stdout(&oa).contains("6/6"));
}

#[test]
fn label_uv_writes_a_mask() {
    let dir = tempfile::tempdir().unwrap();
    let regular = image::RgbImage::from_fn(20, 10, |x, _| image::Rgb(if x < 15 { [220, 200, 150] } else { [40, 40, 40] }));
    let uv = image::RgbImage::from_fn(20, 10, |x, y| {
        image::Rgb(match (x, y) {
            (2..=6, 2..=4) => [255, 30, 30],
            (9..=12, 5..=8) => [30, 255, 60],
            _ => [10, 10, 20],
        })
    });
    let (rp, up, out) = (dir.path().join("reg.png"), dir.path().join("uv.png"), dir.path().join("out.pgm"));
    regular.save(&rp).unwrap();
    uv.save(&up).unwrap();
    let ranges = dir.path().join("ranges.txt");
    std::fs::write(&ranges, "dilation_radius = 0\nmin_component = 1\n").unwrap();
    let o = bagopen(&["label-uv", "--regular", p(&rp), "--uv", p(&up), "--ranges", p(&ranges), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = SegMask::load(&out).unwrap();
    assert_eq!(m.count(Label::Rim), 15);
    assert_eq!(m.count(Label::Handle), 16);
    assert_eq!(m.get(16, 0), Label::Background);
    assert_eq!(m.get(0, 0), Label::Bag);
}

#[test]
fn bad_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "policy.budget = many\n").unwrap();
    let o = bagopen(&["run-trials", "--tier", "1", "--config", p(&cfg), "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_file_exits_two() {
    let o = bagopen(&["metrics", "--mask", "/nonexistent/mask.pgm"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bagopen(&["report", "--in", "/nonexistent/run"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_dumps_masks() {
    let dir = tempfile::tempdir().unwrap();
    let o = bagopen(&["simulate", "--tier", "1", "--deterministic", "--out", p(dir.path())]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.ends_with("opened=true placed=2 contained=2 failure=none\n"), "{out}");
    assert!(dir.path().join("step_000.pgm").exists());
    assert!(dir.path().join("trial.jsonl").exists());
}

#[test]
fn config_docs_lists_keys() {
    let out = stdout(&bagopen(&["config-docs"]));
    assert!(out.contains("`sim.deterministic`") && out.contains("`policy.budget`"));
}
