use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::mask::SegMask;
use crate::policy::{
    autobag_step, recenter_if_needed, run_insertion, Decision, InsertionReport, Observation,
    PolicyState, Stage, Variant,
};
use crate::primitives::{Action, ActionKind};
use crate::rng::{stream, Purpose};
use crate::simulator::{ObjectStatus, SimEvent, Simulator};

/// Failure classes of a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FailureClass {
    /// Action budget ran out before the bag was open.
    A,
    /// The bag left the workspace.
    B,
    /// An object missed the opening.
    C,
    /// Objects fell out during a completed lift.
    D,
    /// A grasp slipped and the bag was never lifted.
    E,
    #[serde(rename = "none")]
    None,
}

impl FailureClass {
    pub const FAILURES: [FailureClass; 5] =
        [FailureClass::A, FailureClass::B, FailureClass::C, FailureClass::D, FailureClass::E];

    pub fn name(self) -> &'static str {
        match self {
            FailureClass::A => "A",
            FailureClass::B => "B",
            FailureClass::C => "C",
            FailureClass::D => "D",
            FailureClass::E => "E",
            FailureClass::None => "none",
        }
    }
}

/// One loop iteration of a trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step_index: usize,
    /// Digest of the observed (segmented) mask.
    pub observation: String,
    pub a_ch: f64,
    pub e_ch: f64,
    pub bag_fraction: f64,
    /// Bag-region hull metrics, which the perception-free variant compares.
    pub bag_a_ch: f64,
    pub bag_e_ch: f64,
    pub stage: Stage,
    /// Executed action, absent on a stage advance.
    pub action: Option<Action>,
    pub advance: Option<Stage>,
    /// Non-Recenter actions used after this step.
    pub steps_used: u32,
    pub events: Vec<SimEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Outcome {
    pub opened_bag: bool,
    pub n_placed: usize,
    pub n_contained: usize,
    pub success_n1: bool,
    pub success_n2: bool,
    pub budget_exhausted: bool,
    pub off_workspace: bool,
    pub insertion_attempted: bool,
    pub n_objects: usize,
    pub lifted: bool,
    pub lift_slipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: String,
    pub tier: u8,
    pub variant: Variant,
    pub seed: u64,
    pub steps: Vec<StepRecord>,
    pub insertion: Option<InsertionReport>,
    pub outcome: Outcome,
    pub failure_class: FailureClass,
    /// In-trial anomaly that ended the loop early, if any.
    pub anomaly: Option<String>,
}

impl TrialRecord {
    pub fn has_event(&self, e: SimEvent) -> bool {
        self.steps.iter().any(|s| s.events.contains(&e))
            || self.insertion.as_ref().is_some_and(|i| {
                i.pinpulls.iter().any(|(_, ev)| ev.contains(&e)) || i.lift.events.contains(&e)
            })
    }
}

/// Failure class with precedence B > A > C > E > D.
pub fn classify_failure(r: &TrialRecord) -> FailureClass {
    let o = &r.outcome;
    if o.off_workspace || r.has_event(SimEvent::BumpedOffWorkspace) {
        FailureClass::B
    } else if !o.opened_bag {
        FailureClass::A
    } else if o.n_placed < o.n_objects {
        FailureClass::C
    } else if o.lift_slipped || !o.lifted {
        FailureClass::E
    } else if o.n_contained < o.n_placed {
        FailureClass::D
    } else {
        FailureClass::None
    }
}

pub fn trial_id(tier: u8, variant: Variant, index: usize) -> String {
    format!("t{tier}-{variant}-{index:03}")
}

/// Runs one end-to-end trial: open, insert, lift.
pub fn run_trial(tier: u8, variant: Variant, seed: u64, cfg: &RunConfig) -> Result<TrialRecord> {
    run_trial_with_id(trial_id(tier, variant, 0), tier, variant, seed, cfg)
}

pub fn run_trial_with_id(
    trial_id: String,
    tier: u8,
    variant: Variant,
    seed: u64,
    cfg: &RunConfig,
) -> Result<TrialRecord> {
    run_trial_observed(trial_id, tier, variant, seed, cfg, &mut |_, _| {})
}

/// As [`run_trial_with_id`], handing each rendered ground-truth mask to
/// `on_frame` with the index of the step record it precedes.
pub fn run_trial_observed(
    trial_id: String,
    tier: u8,
    variant: Variant,
    seed: u64,
    cfg: &RunConfig,
    on_frame: &mut dyn FnMut(usize, &SegMask),
) -> Result<TrialRecord> {
    cfg.validate()?;
    let cal = cfg.calibration();
    let mut sim_cfg = cfg.sim;
    sim_cfg.rng_seed = seed;
    let mut sim = Simulator::new(tier, sim_cfg, cfg.workspace, cal, seed)?;
    sim.set_objects(cfg.trial.n_objects);
    let seg = cfg.segmenter.build(seed);
    let mut ctx = cfg.policy_context();
    ctx.config.variant = variant;
    let mut ps = PolicyState::new(variant, cfg.policy.budget);
    let mut rng = stream(seed, Purpose::Policy, 0);

    let mut rec = TrialRecord {
        trial_id,
        tier,
        variant,
        seed,
        steps: Vec::new(),
        insertion: None,
        outcome: Outcome { n_objects: cfg.trial.n_objects, ..Outcome::default() },
        failure_class: FailureClass::None,
        anomaly: None,
    };
    // Recenters are free; this only guarantees termination.
    let max_recenters = 2 * cfg.policy.budget as usize + 4;
    let mut recenters = 0;
    let mut call = 0u64;

    'trial: loop {
        if sim.state.off_workspace {
            rec.outcome.off_workspace = true;
            break;
        }
        let truth = match sim.render() {
            Ok(m) => m,
            Err(Error::StateOutOfWorkspace) => {
                rec.outcome.off_workspace = true;
                break;
            }
            Err(e) => return Err(e),
        };
        on_frame(rec.steps.len(), &truth);
        let obs = Observation::new(seg.segment(&truth, call), &cal, ctx.config.min_handle_component);
        call += 1;

        let push = |rec: &mut TrialRecord, stage, decision: Decision, used, events| {
            rec.steps.push(StepRecord {
                step_index: rec.steps.len(),
                observation: obs.mask.digest(),
                a_ch: obs.metrics.a_ch,
                e_ch: obs.metrics.e_ch,
                bag_fraction: obs.bag_fraction,
                bag_a_ch: obs.bag_metrics.a_ch,
                bag_e_ch: obs.bag_metrics.e_ch,
                stage,
                action: match decision {
                    Decision::Act(a) => Some(a),
                    Decision::Advance(_) => None,
                },
                advance: match decision {
                    Decision::Advance(s) => Some(s),
                    Decision::Act(_) => None,
                },
                steps_used: used,
                events,
            });
        };

        if recenters < max_recenters {
            if let Some(a) = recenter_if_needed(&obs, &cfg.workspace, ctx.config.recenter_radius) {
                recenters += 1;
                let ev = sim.step(&a)?;
                push(&mut rec, ps.stage, Decision::Act(a), ps.steps_used, ev);
                continue;
            }
        }

        // Stage advances re-use the same observation.
        loop {
            match autobag_step(&obs, &ps, &ctx, &mut rng) {
                Ok((d @ Decision::Advance(Stage::Insertion), next)) => {
                    push(&mut rec, ps.stage, d, next.steps_used, Vec::new());
                    ps = next;
                    rec.outcome.opened_bag = true;
                    insert(&mut rec, &obs, &mut sim, cfg)?;
                    break 'trial;
                }
                Ok((d @ Decision::Advance(_), next)) => {
                    push(&mut rec, ps.stage, d, next.steps_used, Vec::new());
                    ps = next;
                }
                Ok((d @ Decision::Act(a), next)) => {
                    debug_assert_ne!(a.kind(), ActionKind::Recenter);
                    let ev = sim.step(&a)?;
                    push(&mut rec, ps.stage, d, next.steps_used, ev);
                    ps = next;
                    continue 'trial;
                }
                Err(Error::StepBudgetExhausted(_)) => {
                    rec.outcome.budget_exhausted = true;
                    break 'trial;
                }
                Err(e) => {
                    rec.anomaly = Some(e.to_string());
                    break 'trial;
                }
            }
        }
    }
    debug_assert!(ps.steps_used <= ps.budget);
    rec.failure_class = classify_failure(&rec);
    Ok(rec)
}

fn insert(rec: &mut TrialRecord, obs: &Observation, sim: &mut Simulator, cfg: &RunConfig) -> Result<()> {
    rec.outcome.insertion_attempted = true;
    // Without rim perception the bag region stands in for the opening.
    let bag_view;
    let obs = if rec.variant == Variant::AbP {
        bag_view = Observation { metrics: obs.bag_metrics.clone(), ..obs.clone() };
        &bag_view
    } else {
        obs
    };
    match run_insertion(obs, cfg.trial.n_objects, sim, cfg.policy.pin_inset) {
        Ok(report) => {
            let count = |st| sim.state.objects.iter().filter(|o| o.status == st).count();
            rec.outcome.n_contained = count(ObjectStatus::ContainedAfterLift);
            rec.outcome.n_placed = report
                .placements
                .iter()
                .filter(|p| p.event == SimEvent::ObjectPlacedInOpening)
                .count();
            rec.outcome.lifted = report.lift.lifted;
            rec.outcome.lift_slipped = report.lift.events.contains(&SimEvent::LiftSlip);
            rec.outcome.success_n1 = rec.outcome.n_contained >= 1;
            rec.outcome.success_n2 = rec.outcome.n_contained >= 2;
            rec.outcome.off_workspace |= sim.state.off_workspace;
            rec.insertion = Some(report);
            Ok(())
        }
        Err(Error::ClosedOpening) => {
            rec.anomaly = Some(Error::ClosedOpening.to_string());
            Ok(())
        }
        Err(e) => Err(e),
    }
}

/// Sanity checks every record must satisfy.
pub fn check_record(r: &TrialRecord, budget: u32) -> std::result::Result<(), String> {
    let o = &r.outcome;
    if o.n_contained > o.n_placed {
        return Err("n_contained exceeds n_placed".into());
    }
    if o.success_n2 && !o.success_n1 {
        return Err("n=2 success without n>=1 success".into());
    }
    let advanced = r
        .steps
        .iter()
        .any(|s| s.advance == Some(Stage::Insertion));
    if advanced != o.opened_bag {
        return Err("opened_bag disagrees with the trace".into());
    }
    let used = r
        .steps
        .iter()
        .filter(|s| s.action.is_some_and(|a| a.kind() != ActionKind::Recenter))
        .count();
    if used > budget as usize {
        return Err(format!("{used} actions exceed the budget of {budget}"));
    }
    Ok(())
}
