use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::perception::render_pseudo_images;
use crate::policy::{collect_policy, Observation};
use crate::primitives::ActionKind;
use crate::rng::{stream, Purpose};
use crate::simulator::{OpeningDir, Simulator};

/// Actions per collection episode before the bag is reset.
pub const EPISODE_LEN: usize = 20;
const HIST_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub index: usize,
    pub image: String,
    pub mask: String,
    pub split: Split,
    pub episode: usize,
    pub tier: u8,
    pub action: Option<ActionKind>,
    pub surface_fraction: f64,
    pub opening_dir: OpeningDir,
    pub opening_fraction: f64,
}

/// Histograms over `[0, 1]` in ten equal bins, plus direction counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityStats {
    pub surface_fraction_hist: Vec<usize>,
    pub opening_fraction_hist: Vec<usize>,
    pub opening_dir: BTreeMap<String, usize>,
    pub surface_fraction_min: f64,
    pub surface_fraction_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub n_images: usize,
    pub n_train: usize,
    pub n_val: usize,
    pub entries: Vec<DatasetEntry>,
    pub stats: DiversityStats,
}

fn bin(x: f64) -> usize {
    ((x.clamp(0.0, 1.0) * HIST_BINS as f64) as usize).min(HIST_BINS - 1)
}

fn dir_name(d: OpeningDir) -> &'static str {
    match d {
        OpeningDir::Up => "up",
        OpeningDir::Down => "down",
        OpeningDir::Sideways => "sideways",
    }
}

/// Drives the collection sampler through the simulator and records every
/// observed configuration. With `out`, writes `images/NNNNN.png` (synthetic
/// regular-light image), `masks/NNNNN.pgm` and `manifest.json`.
pub fn collect_dataset(cfg: &RunConfig, n_images: usize, seed: u64, out: Option<&Path>) -> Result<Manifest> {
    cfg.validate()?;
    if let Some(dir) = out {
        for sub in ["images", "masks"] {
            let p = dir.join(sub);
            std::fs::create_dir_all(&p).map_err(|e| Error::io(&p, e))?;
        }
    }
    let cal = cfg.calibration();
    let ctx = cfg.policy_context();
    let mut entries = Vec::with_capacity(n_images);
    let mut episode = 0usize;
    // Every episode yields at least its initial frame, so this terminates.
    while entries.len() < n_images {
        let mut ep_rng = stream(seed, Purpose::Dataset, episode as u64);
        let tier = ep_rng.gen_range(1..=3u8);
        let sim_seed: u64 = ep_rng.gen();
        let mut sim = Simulator::new(tier, cfg.sim, cfg.workspace, cal, sim_seed)?;
        let mut last = None;
        for _ in 0..=EPISODE_LEN {
            let Ok(mask) = sim.render() else { break };
            let index = entries.len();
            let (image, mask_name) = (format!("images/{index:05}.png"), format!("masks/{index:05}.pgm"));
            if let Some(dir) = out {
                let p = dir.join(&image);
                render_pseudo_images(&mask).0.save(&p).map_err(|e| Error::io(&p, e))?;
                mask.save(&dir.join(&mask_name))?;
            }
            let s = &sim.state;
            entries.push(DatasetEntry {
                index,
                image,
                mask: mask_name,
                split: Split::Train,
                episode,
                tier,
                action: last,
                surface_fraction: s.surface_fraction,
                opening_dir: s.opening_dir,
                opening_fraction: s.opening_fraction,
            });
            if entries.len() == n_images {
                break;
            }
            let obs = Observation::new(mask, &cal, ctx.config.min_handle_component);
            let Ok(a) = collect_policy(&obs, last, &ctx, &mut ep_rng) else { break };
            if sim.step(&a).is_err() {
                break;
            }
            last = Some(a.kind());
        }
        episode += 1;
    }

    let mut order: Vec<usize> = (0..n_images).collect();
    order.shuffle(&mut stream(seed, Purpose::Split, 0));
    let n_val = n_images / 5;
    for &i in &order[..n_val] {
        entries[i].split = Split::Val;
    }

    let mut stats = DiversityStats {
        surface_fraction_hist: vec![0; HIST_BINS],
        opening_fraction_hist: vec![0; HIST_BINS],
        opening_dir: ["up", "down", "sideways"].iter().map(|d| (d.to_string(), 0)).collect(),
        surface_fraction_min: f64::INFINITY,
        surface_fraction_max: f64::NEG_INFINITY,
    };
    for e in &entries {
        stats.surface_fraction_hist[bin(e.surface_fraction)] += 1;
        stats.opening_fraction_hist[bin(e.opening_fraction)] += 1;
        *stats.opening_dir.entry(dir_name(e.opening_dir).into()).or_default() += 1;
        stats.surface_fraction_min = stats.surface_fraction_min.min(e.surface_fraction);
        stats.surface_fraction_max = stats.surface_fraction_max.max(e.surface_fraction);
    }
    let manifest = Manifest {
        seed,
        n_images,
        n_train: n_images - n_val,
        n_val,
        entries,
        stats,
    };
    if let Some(dir) = out {
        let p = dir.join("manifest.json");
        let body = serde_json::to_string_pretty(&manifest).expect("manifest serialises") + "\n";
        std::fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
    }
    Ok(manifest)
}
