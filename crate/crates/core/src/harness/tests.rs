use super::*;
use crate::policy::Stage;
use crate::simulator::SimEvent;

fn blank(id: &str) -> TrialRecord {
    TrialRecord {
        trial_id: id.into(),
        tier: 1,
        variant: Variant::AutoBag,
        seed: 0,
        steps: Vec::new(),
        insertion: None,
        outcome: Outcome { n_objects: 2, ..Outcome::default() },
        failure_class: FailureClass::None,
        anomaly: None,
    }
}

fn with_outcome(placed: usize, contained: usize) -> TrialRecord {
    let mut r = blank("x");
    r.outcome.opened_bag = true;
    r.outcome.lifted = true;
    r.outcome.n_placed = placed;
    r.outcome.n_contained = contained;
    r.outcome.success_n1 = contained >= 1;
    r.outcome.success_n2 = contained >= 2;
    r
}

#[test]
fn classify_examples() {
    assert_eq!(classify_failure(&with_outcome(2, 0)), FailureClass::D);
    assert_eq!(classify_failure(&with_outcome(2, 2)), FailureClass::None);
    let mut r = with_outcome(2, 2);
    r.outcome.off_workspace = true;
    assert_eq!(classify_failure(&r), FailureClass::B);
    assert_eq!(classify_failure(&blank("a")), FailureClass::A);
}

#[test]
fn population_std_formatting() {
    let rs: Vec<TrialRecord> = [2, 2, 1, 2, 1, 0].iter().map(|&p| with_outcome(p, 0)).collect();
    let row = &aggregate(&rs).unwrap().rows[0];
    // mean 8/6, population variance 14/6 - (8/6)^2 = 5/9
    assert!((row.placed_mean - 4.0 / 3.0).abs() < 1e-12);
    assert!((row.placed_std - (5.0f64 / 9.0).sqrt()).abs() < 1e-12);
    assert_eq!(row.cells()[1], "1.3±0.7");
    assert_eq!(format_pm(1.55, 0.74), "1.6±0.7");
}

#[test]
fn single_success_row() {
    let row = &aggregate(&[with_outcome(2, 2)]).unwrap().rows[0];
    assert_eq!(row.cells(), ["1/1", "2.0±0.0", "2.0±0.0", "1/1", "1/1"].map(String::from));
    assert!(matches!(aggregate(&[]), Err(Error::EmptyInput)));
}

#[test]
fn deterministic_tier1_succeeds() {
    let cfg = RunConfig::deterministic();
    let r = run_trial(1, Variant::AutoBag, 0, &cfg).unwrap();
    assert!(r.outcome.opened_bag, "{:?}", r.anomaly);
    assert_eq!(r.outcome.n_contained, 2);
    assert_eq!(r.failure_class, FailureClass::None);
    check_record(&r, cfg.policy.budget).unwrap();
}

#[test]
fn zero_budget_is_failure_a() {
    let mut cfg = RunConfig::deterministic();
    cfg.policy.budget = 0;
    let r = run_trial(1, Variant::AutoBag, 3, &cfg).unwrap();
    assert!(!r.outcome.opened_bag);
    assert_eq!(r.failure_class, FailureClass::A);
}

#[test]
fn trials_are_reproducible() {
    let cfg = RunConfig::default();
    for seed in 0..4 {
        let a = run_trial(2, Variant::AutoBag, seed, &cfg).unwrap();
        let b = run_trial(2, Variant::AutoBag, seed, &cfg).unwrap();
        assert_eq!(log_text(&a), log_text(&b));
        check_record(&a, cfg.policy.budget).unwrap();
    }
}

#[test]
fn recenter_is_free() {
    let cfg = RunConfig::default();
    for seed in 0..20 {
        let r = run_trial(3, Variant::AutoBag, seed, &cfg).unwrap();
        let mut used = 0;
        for s in &r.steps {
            if s.action.is_some_and(|a| a.kind() != crate::primitives::ActionKind::Recenter) {
                used += 1;
            }
            assert_eq!(s.steps_used, used, "seed {seed} step {}", s.step_index);
        }
    }
}

#[test]
fn log_round_trip_and_truncation() {
    let r = run_trial(1, Variant::AutoBag, 5, &RunConfig::default()).unwrap();
    let text = log_text(&r);
    let (lines, skipped) = parse_log(&text);
    assert_eq!(skipped, 0);
    assert_eq!(record_from_lines(&lines).as_ref(), Some(&r));

    let cut = &text[..text.len() - 7];
    let (lines, skipped) = parse_log(cut);
    assert_eq!(skipped, 1);
    assert_eq!(lines.len(), text.lines().count() - 1);
    assert!(record_from_lines(&lines).is_none());
}

#[test]
fn parallel_matches_serial() {
    let mut cfg = RunConfig::default();
    cfg.trial.threads = 4;
    let par = run_cell(1, Variant::AbP, 8, 100, &cfg).unwrap();
    cfg.trial.threads = 1;
    let ser = run_cell(1, Variant::AbP, 8, 100, &cfg).unwrap();
    assert_eq!(par, ser);
    assert_eq!(par[3].seed, 103);
    assert_eq!(par[3].trial_id, "t1-ab-p-003");
}

#[test]
fn run_directory_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::default();
    let recs = run_cell(1, Variant::AutoBag, 3, 0, &cfg).unwrap();
    let rep = write_run(dir.path(), &recs).unwrap();
    let back = read_run(dir.path()).unwrap();
    assert_eq!(back, recs);
    assert_eq!(aggregate(&back).unwrap(), rep);
    let txt = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert_eq!(txt, rep.to_text());
}

#[test]
fn opened_flag_matches_trace() {
    let cfg = RunConfig::default();
    for seed in 0..10 {
        let r = run_trial(1, Variant::AbE, seed, &cfg).unwrap();
        let adv = r.steps.iter().any(|s| s.advance == Some(Stage::Insertion));
        assert_eq!(adv, r.outcome.opened_bag);
        assert!(r.outcome.n_contained <= r.outcome.n_placed);
        if r.has_event(SimEvent::BumpedOffWorkspace) {
            assert_eq!(r.failure_class, FailureClass::B);
        }
    }
}

#[test]
fn dataset_split_and_diversity() {
    let cfg = RunConfig::default();
    let m = collect_dataset(&cfg, 500, 9, None).unwrap();
    assert_eq!((m.n_train, m.n_val), (400, 100));
    assert_eq!(m.entries.iter().filter(|e| e.split == Split::Val).count(), 100);
    assert!(m.stats.opening_dir.values().all(|&c| c > 0), "{:?}", m.stats.opening_dir);
    assert!(m.stats.surface_fraction_min <= 0.3 && m.stats.surface_fraction_max >= 0.9, "{:?}", m.stats);
    let again = collect_dataset(&cfg, 500, 9, None).unwrap();
    assert_eq!(serde_json::to_string(&m).unwrap(), serde_json::to_string(&again).unwrap());
}

#[test]
fn dataset_files_written() {
    let dir = tempfile::tempdir().unwrap();
    let m = collect_dataset(&RunConfig::default(), 12, 1, Some(dir.path())).unwrap();
    for e in &m.entries {
        let mask = crate::mask::SegMask::load(&dir.path().join(&e.mask)).unwrap();
        assert!(mask.bag_region_count() > 0);
        assert!(dir.path().join(&e.image).exists());
    }
    assert!(dir.path().join("manifest.json").exists());
}
