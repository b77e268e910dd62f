//! Experiment generators, ceilings, metrics and sweeps.

mod ceiling;
mod generate;
mod metrics;

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{ConfigError, Model, ModelConfig, StepReport};
use crate::memory::Symbol;
use crate::scalar::Scalar;

pub use ceiling::{
    ceiling, empirical_ceiling, variable_order_accuracy, CeilingEstimate, CeilingMethod,
};
pub use generate::{default_alphabet, generate, templates, GeneratorSpec, Setting};
pub use metrics::{final_quarter_accuracy, tail_accuracy, windowed_accuracy, AccuracySeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid generator spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("sweep ranges must be nonempty")]
    EmptyRange,
}

/// Feeds the generated sequence through a fresh model, one report per symbol.
pub fn run_experiment<T: Scalar>(
    cfg: &ModelConfig<T>,
    spec: &GeneratorSpec,
) -> Result<Vec<StepReport>, LabError> {
    let seq = generate(spec)?;
    let mut model = Model::new(cfg.clone())?;
    Ok(seq.iter().map(|s| model.step(s)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub m: usize,
    pub k: usize,
    pub final_accuracy: f64,
    pub ceiling: f64,
}

/// Setting-2 runs over every `(m, k)` pair, row-major in `m`. Each cell
/// reports the mean accuracy over its final quarter of steps.
pub fn sweep<T: Scalar>(
    cfg: &ModelConfig<T>,
    m_values: &[usize],
    k_values: &[usize],
    n: usize,
    alphabet: &[Symbol],
    seed: u64,
) -> Result<Vec<SweepCell>, LabError> {
    if m_values.is_empty() || k_values.is_empty() {
        return Err(LabError::EmptyRange);
    }
    cfg.validate()?;
    let grid: Vec<(usize, usize)> = m_values
        .iter()
        .flat_map(|&m| k_values.iter().map(move |&k| (m, k)))
        .collect();
    grid.par_iter()
        .map(|&(m, k)| {
            let spec = GeneratorSpec {
                setting: Setting::Variable,
                m,
                k,
                p: 0,
                n,
                alphabet: alphabet.to_vec(),
                seed,
            };
            let reports = run_experiment(cfg, &spec)?;
            Ok(SweepCell {
                m,
                k,
                final_accuracy: final_quarter_accuracy(&reports),
                ceiling: ceiling(&spec).value,
            })
        })
        .collect()
}
