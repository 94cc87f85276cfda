//! Throughput report: the software analog of the one-datapoint-per-clock
//! hardware figure, measured as train steps and classifications per second.

use std::fmt;
use std::time::Instant;

use anyhow::Result;

use otm_core::data::Dataset;
use otm_core::fault::{FaultPlan, MachineDims};
use otm_core::rng::Randomizer;
use otm_core::tm::{TmConfig, TsetlinMachine};

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub classes: usize,
    pub clauses: usize,
    pub features: usize,
    pub train_steps: u64,
    pub train_steps_per_sec: f64,
    pub classifications: u64,
    pub classifications_per_sec: f64,
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "machine: {} classes x {} clauses x {} features",
            self.classes, self.clauses, self.features
        )?;
        writeln!(
            f,
            "train:    {:>12.0} steps/s  ({} steps)",
            self.train_steps_per_sec, self.train_steps
        )?;
        write!(
            f,
            "classify: {:>12.0} points/s ({} points)",
            self.classifications_per_sec, self.classifications
        )
    }
}

/// Times training and classification over the dataset for roughly
/// `target_steps` operations each.
pub fn bench(
    config: &TmConfig,
    dataset: &Dataset,
    target_steps: u64,
    seed: u64,
) -> Result<BenchReport> {
    let mut machine = TsetlinMachine::new(config.clone())?;
    let plan = FaultPlan::fault_free(MachineDims::of(config));
    let mut rng = Randomizer::new(seed);

    // Warm-up pass so the measured machine is in a trained regime.
    for p in &dataset.points {
        machine.train_step(&p.features, p.label, config.s_offline, &mut rng, &plan)?;
    }

    let t0 = Instant::now();
    let mut steps = 0u64;
    'train: loop {
        for p in &dataset.points {
            machine.train_step(&p.features, p.label, config.s_offline, &mut rng, &plan)?;
            steps += 1;
            if steps >= target_steps {
                break 'train;
            }
        }
    }
    let train_elapsed = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let mut classifications = 0u64;
    let mut sink = 0usize;
    'infer: loop {
        for p in &dataset.points {
            sink = sink.wrapping_add(machine.classify(&p.features, &plan));
            classifications += 1;
            if classifications >= target_steps {
                break 'infer;
            }
        }
    }
    let infer_elapsed = t1.elapsed().as_secs_f64();
    std::hint::black_box(sink);

    Ok(BenchReport {
        classes: config.num_classes_max,
        clauses: config.num_clauses_active,
        features: config.num_features,
        train_steps: steps,
        train_steps_per_sec: steps as f64 / train_elapsed,
        classifications,
        classifications_per_sec: classifications as f64 / infer_elapsed,
    })
}
