use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LabError;
use crate::memory::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    /// A constant sub-sequence repeated.
    Constant,
    /// Constant interior with variable first and last characters.
    Variable,
    /// As [`Setting::Variable`] followed by random characters.
    Noisy,
}

impl Setting {
    pub fn number(self) -> u8 {
        match self {
            Setting::Constant => 1,
            Setting::Variable => 2,
            Setting::Noisy => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Setting::Constant),
            2 => Some(Setting::Variable),
            3 => Some(Setting::Noisy),
            _ => None,
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Letters `A..Z` then `a..z`.
pub fn default_alphabet() -> Vec<Symbol> {
    ('A'..='Z').chain('a'..='z').map(Symbol::from).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub setting: Setting,
    /// Sub-sequence length.
    pub m: usize,
    /// Number of sampled variable pairs (settings 2 and 3).
    pub k: usize,
    /// Random characters appended per repetition (setting 3).
    pub p: usize,
    /// Number of repetitions.
    pub n: usize,
    pub alphabet: Vec<Symbol>,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            setting: Setting::Constant,
            m: 6,
            k: 2,
            p: 4,
            n: 100,
            alphabet: default_alphabet(),
            seed: 0,
        }
    }
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<(), LabError> {
        if self.m < 2 {
            return Err(LabError::Spec("m must be at least 2".into()));
        }
        if self.k < 1 {
            return Err(LabError::Spec("k must be at least 1".into()));
        }
        if self.n < 1 {
            return Err(LabError::Spec("n must be at least 1".into()));
        }
        let distinct: BTreeSet<&Symbol> = self.alphabet.iter().collect();
        if distinct.len() != self.alphabet.len() {
            return Err(LabError::Spec("alphabet contains duplicate symbols".into()));
        }
        let needed = self.required_symbols();
        if self.alphabet.len() < needed {
            return Err(LabError::Spec(format!(
                "alphabet has {} symbols but setting {} with m={} k={} needs {}",
                self.alphabet.len(),
                self.setting,
                self.m,
                self.k,
                needed
            )));
        }
        Ok(())
    }

    /// Distinct symbols needed for constants and variables.
    pub fn required_symbols(&self) -> usize {
        match self.setting {
            Setting::Constant => self.m,
            Setting::Variable | Setting::Noisy => self.m - 2 + 2 * self.k,
        }
    }

    /// Symbols per repetition.
    pub fn period(&self) -> usize {
        match self.setting {
            Setting::Noisy => self.m + self.p,
            _ => self.m,
        }
    }

    pub fn len(&self) -> usize {
        self.period() * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The sub-sequences a spec draws its repetitions from, before any random
/// suffix. Setting 1 yields a single template.
pub fn templates(spec: &GeneratorSpec) -> Result<Vec<Vec<Symbol>>, LabError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(draw_templates(spec, &mut rng))
}

fn draw_templates(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<Symbol>> {
    if spec.setting == Setting::Constant {
        return vec![spec.alphabet[..spec.m].to_vec()];
    }
    let mut pool = spec.alphabet.clone();
    pool.shuffle(rng);
    let interior = spec.m - 2;
    let constants = &pool[..interior];
    let firsts = &pool[interior..interior + spec.k];
    let lasts = &pool[interior + spec.k..interior + 2 * spec.k];
    (0..spec.k)
        .map(|i| {
            let mut t = Vec::with_capacity(spec.m);
            t.push(firsts[i].clone());
            t.extend_from_slice(constants);
            t.push(lasts[i].clone());
            t
        })
        .collect()
}

pub fn generate(spec: &GeneratorSpec) -> Result<Vec<Symbol>, LabError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let templates = draw_templates(spec, &mut rng);
    let mut out = Vec::with_capacity(spec.len());
    for _ in 0..spec.n {
        let pick = if templates.len() == 1 {
            0
        } else {
            rng.gen_range(0..templates.len())
        };
        out.extend_from_slice(&templates[pick]);
        if spec.setting == Setting::Noisy {
            for _ in 0..spec.p {
                out.push(spec.alphabet[rng.gen_range(0..spec.alphabet.len())].clone());
            }
        }
    }
    Ok(out)
}
