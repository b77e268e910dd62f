//! Run configuration: defaults, flat `key = value` files and flag overrides.

use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use nalseq::lab::{GeneratorSpec, Setting};
use nalseq::{Config, NodeSelection, Symbol, Truth};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Config,
    pub spec: GeneratorSpec,
    pub accuracy_csv: PathBuf,
    pub dot: PathBuf,
    pub window: usize,
    pub dot_min_expectation: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: Config::default(),
            spec: GeneratorSpec::default(),
            accuracy_csv: PathBuf::from("accuracy.csv"),
            dot: PathBuf::from("network.dot"),
            window: 50,
            dot_min_expectation: 0.6,
        }
    }
}

type Getter = fn(&RunConfig) -> String;
type Setter = fn(&mut RunConfig, &str) -> Result<(), &'static str>;

/// One configurable key: its name, help text, and how to read and write it.
pub struct Field {
    pub key: &'static str,
    pub help: &'static str,
    get: Getter,
    set: Setter,
}

fn num<T: FromStr>(v: &str, expected: &'static str) -> Result<T, &'static str> {
    v.parse().map_err(|_| expected)
}

const UINT: &str = "an unsigned integer";
const REAL: &str = "a real number";

fn set_perceptual(cfg: &mut RunConfig, f: f64, c: f64) -> Result<(), &'static str> {
    cfg.model.perceptual_truth = Truth::new(f, c).map_err(|_| "a real number in range")?;
    Ok(())
}

pub static FIELDS: &[Field] = &[
    Field {
        key: "nodes_per_column",
        help: "Event nodes created per column",
        get: |c| c.model.nodes_per_column.to_string(),
        set: |c, v| {
            c.model.nodes_per_column = num(v, UINT)?;
            Ok(())
        },
    },
    Field {
        key: "max_new_links_per_step",
        help: "Cap on links hypothesized in one step",
        get: |c| c.model.max_new_links_per_step.to_string(),
        set: |c, v| {
            c.model.max_new_links_per_step = num(v, UINT)?;
            Ok(())
        },
    },
    Field {
        key: "hypothesis_sample_size",
        help: "Nodes sampled from a fully active column",
        get: |c| c.model.hypothesis_sample_size.to_string(),
        set: |c, v| {
            c.model.hypothesis_sample_size = num(v, UINT)?;
            Ok(())
        },
    },
    Field {
        key: "link_capacity_per_column",
        help: "Outgoing links a column may own",
        get: |c| c.model.link_capacity_per_column.to_string(),
        set: |c, v| {
            c.model.link_capacity_per_column = num(v, UINT)?;
            Ok(())
        },
    },
    Field {
        key: "anticipation_threshold",
        help: "Expectation an anticipation must exceed",
        get: |c| c.model.anticipation_threshold.to_string(),
        set: |c, v| {
            c.model.anticipation_threshold = num(v, REAL)?;
            Ok(())
        },
    },
    Field {
        key: "perceptual_frequency",
        help: "Frequency of perceived input events",
        get: |c| c.model.perceptual_truth.frequency().to_string(),
        set: |c, v| {
            let conf = c.model.perceptual_truth.confidence();
            set_perceptual(c, num(v, REAL)?, conf)
        },
    },
    Field {
        key: "perceptual_confidence",
        help: "Confidence of perceived input events",
        get: |c| c.model.perceptual_truth.confidence().to_string(),
        set: |c, v| {
            let freq = c.model.perceptual_truth.frequency();
            set_perceptual(c, freq, num(v, REAL)?)
        },
    },
    Field {
        key: "initial_link_priority",
        help: "Priority of a freshly hypothesized link",
        get: |c| c.model.initial_link_priority.to_string(),
        set: |c, v| {
            c.model.initial_link_priority = num(v, REAL)?;
            Ok(())
        },
    },
    Field {
        key: "link_durability",
        help: "Per-step priority retention of links",
        get: |c| c.model.link_durability.to_string(),
        set: |c, v| {
            c.model.link_durability = num(v, REAL)?;
            Ok(())
        },
    },
    Field {
        key: "node_durability",
        help: "Per-step priority retention of nodes",
        get: |c| c.model.node_durability.to_string(),
        set: |c, v| {
            c.model.node_durability = num(v, REAL)?;
            Ok(())
        },
    },
    Field {
        key: "evidential_horizon",
        help: "Evidential horizon of the truth functions",
        get: |c| c.model.evidential_horizon.to_string(),
        set: |c, v| {
            c.model.evidential_horizon = num(v, UINT)?;
            Ok(())
        },
    },
    Field {
        key: "node_selection",
        help: "Burst-column node selection: winners or uniform",
        get: |c| match c.model.node_selection {
            NodeSelection::Winners => "winners".into(),
            NodeSelection::Uniform => "uniform".into(),
        },
        set: |c, v| {
            c.model.node_selection = match v {
                "winners" => NodeSelection::Winners,
                "uniform" => NodeSelection::Uniform,
                _ => return Err("one of winners, uniform"),
            };
            Ok(())
        },
    },
    Field {
        key: "rng_seed",
        help: "Seed of the model's random choices",
        get: |c| c.model.rng_seed.to_string(),
        set: |c, v| {
            c.model.rng_seed = num(v, UINT)?;
            Ok(())
        },
    },
    Field {
        key: "setting",
        help: "Generator setting: 1, 2 or 3",
        get: |c| c.spec.setting.to_string(),
        set: |c, v| {
            c.spec.setting = v
                .parse()
                .ok()
                .and_then(Setting::from_number)
                .ok_or("one of 1, 2, 3")?;
            Ok(())
        },
    },
    Field {
        key: "m",
        help: "Sub-sequence length",
        get: |c| c.spec.m.to_string(),
        set: |c, v| {
            c.spec.m = num(v, UINT)?;
            Ok(())
        },
    },
    Field {
        key: "k",
        help: "Number of variable sub-sequences",
        get: |c| c.spec.k.to_string(),
        set: |c, v| {
            c.spec.k = num(v, UINT)?;
            Ok(())
        },
    },
    Field {
        key: "p",
        help: "Random characters after each repetition",
        get: |c| c.spec.p.to_string(),
        set: |c, v| {
            c.spec.p = num(v, UINT)?;
            Ok(())
        },
    },
    Field {
        key: "n",
        help: "Number of repetitions",
        get: |c| c.spec.n.to_string(),
        set: |c, v| {
            c.spec.n = num(v, UINT)?;
            Ok(())
        },
    },
    Field {
        key: "alphabet",
        help: "Symbols: one per character, or comma separated",
        get: |c| render_alphabet(&c.spec.alphabet),
        set: |c, v| {
            c.spec.alphabet = parse_alphabet(v)?;
            Ok(())
        },
    },
    Field {
        key: "seed",
        help: "Seed of the sequence generator",
        get: |c| c.spec.seed.to_string(),
        set: |c, v| {
            c.spec.seed = num(v, UINT)?;
            Ok(())
        },
    },
    Field {
        key: "accuracy_csv",
        help: "Per-step accuracy CSV output",
        get: |c| c.accuracy_csv.display().to_string(),
        set: |c, v| {
            c.accuracy_csv = path(v)?;
            Ok(())
        },
    },
    Field {
        key: "dot",
        help: "Network DOT output",
        get: |c| c.dot.display().to_string(),
        set: |c, v| {
            c.dot = path(v)?;
            Ok(())
        },
    },
    Field {
        key: "window",
        help: "Window of the accuracy series",
        get: |c| c.window.to_string(),
        set: |c, v| {
            c.window = num(v, UINT)?;
            Ok(())
        },
    },
    Field {
        key: "dot_min_expectation",
        help: "Hide links whose forward expectation is lower",
        get: |c| c.dot_min_expectation.to_string(),
        set: |c, v| {
            c.dot_min_expectation = num(v, REAL)?;
            Ok(())
        },
    },
];

fn path(v: &str) -> Result<PathBuf, &'static str> {
    if v.is_empty() {
        Err("a nonempty path")
    } else {
        Ok(PathBuf::from(v))
    }
}

fn render_alphabet(alphabet: &[Symbol]) -> String {
    let single = alphabet
        .iter()
        .all(|s| s.as_str().chars().count() == 1 && s.as_str() != ",");
    let parts: Vec<&str> = alphabet.iter().map(Symbol::as_str).collect();
    parts.join(if single { "" } else { "," })
}

fn parse_alphabet(v: &str) -> Result<Vec<Symbol>, &'static str> {
    let expected = "a symbol list";
    if v.contains(',') {
        v.split(',')
            .map(|s| Symbol::new(s).map_err(|_| expected))
            .collect()
    } else {
        Ok(v.chars().map(Symbol::from).collect())
    }
}

pub fn field(key: &str) -> Option<&'static Field> {
    FIELDS.iter().find(|f| f.key == key)
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let f = field(key).ok_or_else(|| CliError::UnknownKey(key.to_string()))?;
        (f.set)(self, value).map_err(|expected| CliError::InvalidValue {
            key: f.key,
            value: value.to_string(),
            expected,
        })
    }

    pub fn get(&self, key: &str) -> Option<String> {
        field(key).map(|f| (f.get)(self))
    }

    /// Flat `key = value` text that [`parse_config`] reads back unchanged.
    pub fn render(&self) -> String {
        FIELDS
            .iter()
            .map(|f| format!("{} = {}\n", f.key, (f.get)(self)))
            .collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |e: &dyn Display| CliError::Invalid(e.to_string());
        self.model.validate().map_err(|e| usage(&e))?;
        self.spec.validate().map_err(|e| usage(&e))?;
        if self.window == 0 {
            return Err(CliError::Invalid("window must be at least 1".into()));
        }
        Ok(())
    }
}

/// Applies config-file entries over the defaults, then `flags` over those.
/// Keys may be written with dashes or underscores.
pub fn parse_config(flags: &[(String, String)], file: Option<&str>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(text) = file {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(CliError::Syntax { line: i + 1 })?;
            cfg.set(&key.trim().replace('-', "_"), value.trim())?;
        }
    }
    for (key, value) in flags {
        cfg.set(&key.replace('-', "_"), value)?;
    }
    Ok(cfg)
}
