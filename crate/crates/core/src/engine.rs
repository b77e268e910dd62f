//! The perception cycle.
//!
//! Each call to [`Model::step`] scores the standing prediction against the
//! incoming symbol, activates the symbol's column, revises the links that
//! the transition gives evidence for, hypothesizes new links between the
//! previous and current columns, recycles over-full columns, decays budgets
//! and finally deduces the anticipations that form the next prediction.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::memory::{ColumnId, LinkId, MemoryError, Network, NetworkConfig, NodeId, Symbol};
use crate::scalar::Scalar;
use crate::truth::{
    decay_budget, deduce, expectation, revise, unit_evidence, TruthValue, DEFAULT_HORIZON,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid value for {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

/// How hypothesizing picks nodes from a fully active (burst) column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NodeSelection {
    /// Fresh uniform sample without replacement on both sides of every
    /// hypothesis.
    Uniform,
    /// A burst column picks its representatives once and reuses them as
    /// sources on the next step. Targets skip nodes the sources already
    /// link to, then favour the nodes with the fewest unrefuted inbound
    /// links; ties are drawn uniformly. A fully active predecessor only
    /// grows links onto anticipated nodes that hold no hypothesis from it.
    ///
    /// A burst grows nothing when the previous nodes already hold a
    /// confirmed, never refuted link into the column: that link will
    /// anticipate next time, and its targets become the representatives.
    /// When neither column had context, targets that already lead somewhere
    /// win ties, so a context-free entry reuses the column's existing exit.
    #[default]
    Winners,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig<T> {
    pub nodes_per_column: usize,
    pub max_new_links_per_step: usize,
    pub hypothesis_sample_size: usize,
    pub link_capacity_per_column: usize,
    /// Strict lower bound on an anticipation's expectation.
    pub anticipation_threshold: T,
    pub perceptual_truth: TruthValue<T>,
    pub initial_link_priority: T,
    pub link_durability: T,
    pub node_durability: T,
    pub evidential_horizon: u32,
    pub node_selection: NodeSelection,
    pub rng_seed: u64,
}

impl<T: Scalar> Default for ModelConfig<T> {
    fn default() -> Self {
        Self {
            nodes_per_column: 16,
            max_new_links_per_step: 16,
            hypothesis_sample_size: 2,
            link_capacity_per_column: 64,
            anticipation_threshold: T::half(),
            perceptual_truth: TruthValue::new(T::one(), T::from_f64_lossy(0.9))
                .expect("constant in range"),
            initial_link_priority: T::from_f64_lossy(0.8),
            link_durability: T::from_f64_lossy(0.9),
            node_durability: T::from_f64_lossy(0.9),
            evidential_horizon: DEFAULT_HORIZON,
            node_selection: NodeSelection::default(),
            rng_seed: 0,
        }
    }
}

impl<T: Scalar> ModelConfig<T> {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = |field, v: T| {
            if v >= T::zero() && v <= T::one() {
                Ok(())
            } else {
                Err(invalid(field, format!("{v} outside [0, 1]")))
            }
        };
        let open_unit = |field, v: T| {
            if v > T::zero() && v < T::one() {
                Ok(())
            } else {
                Err(invalid(field, format!("{v} outside (0, 1)")))
            }
        };
        if self.nodes_per_column == 0 {
            return Err(invalid("nodes_per_column", "must be at least 1"));
        }
        if self.hypothesis_sample_size == 0 {
            return Err(invalid("hypothesis_sample_size", "must be at least 1"));
        }
        if self.hypothesis_sample_size > self.nodes_per_column {
            return Err(invalid(
                "hypothesis_sample_size",
                format!(
                    "{} exceeds nodes_per_column {}",
                    self.hypothesis_sample_size, self.nodes_per_column
                ),
            ));
        }
        if self.evidential_horizon == 0 {
            return Err(invalid("evidential_horizon", "must be at least 1"));
        }
        unit("anticipation_threshold", self.anticipation_threshold)?;
        unit("initial_link_priority", self.initial_link_priority)?;
        open_unit("link_durability", self.link_durability)?;
        open_unit("node_durability", self.node_durability)?;
        Ok(())
    }

    fn network_config(&self) -> NetworkConfig<T> {
        NetworkConfig {
            nodes_per_column: self.nodes_per_column,
            initial_link_priority: self.initial_link_priority,
            link_durability: self.link_durability,
            node_durability: self.node_durability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StepReport {
    pub step_index: usize,
    pub input: Symbol,
    /// Top-1 prediction standing when the input arrived.
    pub predicted: Option<Symbol>,
    pub correct: bool,
    /// Columns holding a pre-active node when the input arrived, sorted.
    pub anticipated_columns: Vec<Symbol>,
    pub burst: bool,
    pub new_links: usize,
    pub evicted_links: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Activation {
    pub column: ColumnId,
    /// Activated nodes in roster order.
    pub nodes: Vec<NodeId>,
    pub burst: bool,
}

/// Which evidence a transition provided to a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvidenceCase {
    /// Source then target: positive for all three predictions.
    Confirmed,
    /// Source without target: negative for forward and equivalence.
    Unfulfilled,
    /// Target without source: negative for backward and equivalence.
    Unexplained,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Revision {
    pub cases: Vec<(LinkId, EvidenceCase)>,
}

impl Revision {
    /// Number of individual predictions that received evidence.
    pub fn predictions(&self) -> usize {
        self.cases
            .iter()
            .map(|(_, c)| match c {
                EvidenceCase::Confirmed => 3,
                EvidenceCase::Unfulfilled | EvidenceCase::Unexplained => 2,
            })
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct Model<T> {
    net: Network<T>,
    cfg: ModelConfig<T>,
    rng: ChaCha8Rng,
    horizon: T,
    step_index: usize,
    standing: Option<Symbol>,
    anticipated: BTreeSet<Symbol>,
    pre_active: Vec<NodeId>,
    active: Vec<NodeId>,
    prev_active: Vec<NodeId>,
    prev_column: Option<ColumnId>,
    /// Representatives of the most recently activated column.
    winners: Vec<NodeId>,
    last_revision: Revision,
}

impl<T: Scalar> Model<T> {
    pub fn new(cfg: ModelConfig<T>) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let net = Network::new(cfg.network_config()).map_err(|e| match e {
            MemoryError::Truth(t) => invalid("link budget", t.to_string()),
            other => invalid("network", other.to_string()),
        })?;
        Ok(Self {
            net,
            rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
            horizon: T::from_f64_lossy(f64::from(cfg.evidential_horizon)),
            cfg,
            step_index: 0,
            standing: None,
            anticipated: BTreeSet::new(),
            pre_active: Vec::new(),
            active: Vec::new(),
            prev_active: Vec::new(),
            prev_column: None,
            winners: Vec::new(),
            last_revision: Revision::default(),
        })
    }

    pub fn config(&self) -> &ModelConfig<T> {
        &self.cfg
    }

    pub fn network(&self) -> &Network<T> {
        &self.net
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    /// The standing top-1 prediction for the next input.
    pub fn prediction(&self) -> Option<&Symbol> {
        self.standing.as_ref()
    }

    pub fn active_nodes(&self) -> &[NodeId] {
        &self.active
    }

    pub fn previous_active_nodes(&self) -> &[NodeId] {
        &self.prev_active
    }

    pub fn pre_active_nodes(&self) -> &[NodeId] {
        &self.pre_active
    }

    /// Evidence applied during the most recent step.
    pub fn last_revision(&self) -> &Revision {
        &self.last_revision
    }

    pub fn step(&mut self, input: &Symbol) -> StepReport {
        let predicted = self.standing.take();
        let correct = predicted.as_ref() == Some(input);
        let anticipated_columns: Vec<Symbol> =
            std::mem::take(&mut self.anticipated).into_iter().collect();

        let activation = self.activate(input);
        let prev_active = std::mem::take(&mut self.prev_active);
        let curr_active = activation.nodes.clone();

        self.last_revision = self.revise_links(&prev_active, &curr_active);

        let mut new_links = 0;
        let mut touched = Vec::new();
        let mut picked = Vec::new();
        if let Some(prev_col) = self.prev_column {
            let (created, targets) = self.hypothesize_with_targets(
                prev_col,
                activation.column,
                &prev_active,
                &curr_active,
            );
            new_links = created;
            picked = targets;
            if new_links > 0 {
                touched.push(prev_col);
            }
        }
        self.winners = if !activation.burst {
            curr_active.clone()
        } else if !picked.is_empty() {
            picked
        } else {
            let roster = self
                .net
                .column(activation.column)
                .expect("active column")
                .nodes
                .clone();
            let k = self.cfg.hypothesis_sample_size;
            self.sample_targets(&roster, k, &[], true)
        };
        let evicted_links = self.recycle(&touched);

        self.decay_budgets();

        self.compute_anticipations(&curr_active);
        self.standing = self.predict_next();

        // Roll activation flags.
        for &n in &prev_active {
            if let Some(node) = self.net.node_mut(n) {
                node.active_prev = false;
            }
        }
        for &n in &curr_active {
            if let Some(node) = self.net.node_mut(n) {
                node.active_prev = true;
                node.active_now = false;
            }
        }
        self.prev_active = curr_active;
        self.active.clear();
        self.prev_column = Some(activation.column);

        let report = StepReport {
            step_index: self.step_index,
            input: input.clone(),
            predicted,
            correct,
            anticipated_columns,
            burst: activation.burst,
            new_links,
            evicted_links,
        };
        self.step_index += 1;
        report
    }

    /// Activates the column of `input`: only its pre-active nodes if it has
    /// any, otherwise every node (a burst).
    pub fn activate(&mut self, input: &Symbol) -> Activation {
        let column = self.net.get_or_create_column(input);
        let roster = self.net.column(column).expect("just created").nodes.clone();
        let anticipated: Vec<NodeId> = roster
            .iter()
            .copied()
            .filter(|&n| self.net.node(n).is_some_and(|node| node.pre_active))
            .collect();
        let burst = anticipated.is_empty();
        let nodes = if burst { roster } else { anticipated };
        let perceived = self.cfg.perceptual_truth;
        for &n in &nodes {
            let node = self.net.node_mut(n).expect("roster node");
            node.active_now = true;
            node.truth = perceived;
            node.budget.set_priority(T::one());
        }
        self.active = nodes.clone();
        Activation {
            column,
            nodes,
            burst,
        }
    }

    fn membership(&self, set: &[NodeId]) -> Vec<bool> {
        let mut mask = vec![false; self.net.nodes().len()];
        for &n in set {
            if let Some(slot) = mask.get_mut(n.index()) {
                *slot = true;
            }
        }
        mask
    }

    /// Applies one unit of evidence per link according to the transition
    /// from `prev_active` (time t-1) to `curr_active` (time t).
    pub fn revise_links(&mut self, prev_active: &[NodeId], curr_active: &[NodeId]) -> Revision {
        let prev = self.membership(prev_active);
        let curr = self.membership(curr_active);
        let mut cases = Vec::new();

        for (i, _) in prev.iter().enumerate().filter(|(_, &on)| on) {
            for &l in self.net.links_from(NodeId(i as u32)).unwrap_or(&[]) {
                let target = self.net.link(l).expect("live link").target;
                let case = if curr[target.index()] {
                    EvidenceCase::Confirmed
                } else {
                    EvidenceCase::Unfulfilled
                };
                cases.push((l, case));
            }
        }
        for (i, _) in curr.iter().enumerate().filter(|(_, &on)| on) {
            for &l in self.net.links_into(NodeId(i as u32)).unwrap_or(&[]) {
                let source = self.net.link(l).expect("live link").source;
                if !prev[source.index()] {
                    cases.push((l, EvidenceCase::Unexplained));
                }
            }
        }

        let pos = unit_evidence(true, self.horizon);
        let neg = unit_evidence(false, self.horizon);
        for &(l, case) in &cases {
            let link = self.net.link_mut(l).expect("live link");
            match case {
                EvidenceCase::Confirmed => {
                    link.forward = revise(link.forward, pos);
                    link.backward = revise(link.backward, pos);
                    link.equivalence = revise(link.equivalence, pos);
                }
                EvidenceCase::Unfulfilled => {
                    link.forward = revise(link.forward, neg);
                    link.equivalence = revise(link.equivalence, neg);
                }
                EvidenceCase::Unexplained => {
                    link.backward = revise(link.backward, neg);
                    link.equivalence = revise(link.equivalence, neg);
                }
            }
            let q = expectation(link.forward);
            link.budget.set_quality(q);
        }
        Revision { cases }
    }

    /// Builds hypothetical links between two columns activated in
    /// succession. Returns the number of links created.
    pub fn hypothesize(
        &mut self,
        prev_col: ColumnId,
        curr_col: ColumnId,
        prev_active: &[NodeId],
        curr_active: &[NodeId],
    ) -> usize {
        self.hypothesize_with_targets(prev_col, curr_col, prev_active, curr_active)
            .0
    }

    /// As [`Model::hypothesize`], also returning the nodes sampled from a
    /// fully active current column.
    fn hypothesize_with_targets(
        &mut self,
        prev_col: ColumnId,
        curr_col: ColumnId,
        prev_active: &[NodeId],
        curr_active: &[NodeId],
    ) -> (usize, Vec<NodeId>) {
        if prev_col == curr_col {
            return (0, Vec::new());
        }
        let (Some(prev_roster), Some(curr_roster)) = (
            self.net.column(prev_col).map(|c| c.nodes.clone()),
            self.net.column(curr_col).map(|c| c.nodes.clone()),
        ) else {
            return (0, Vec::new());
        };
        let in_roster = |roster: &[NodeId], set: &[NodeId]| -> Vec<NodeId> {
            let members: BTreeSet<NodeId> = set.iter().copied().collect();
            roster
                .iter()
                .copied()
                .filter(|n| members.contains(n))
                .collect()
        };
        let prev_on = in_roster(&prev_roster, prev_active);
        let curr_on = in_roster(&curr_roster, curr_active);
        if prev_on.is_empty() || curr_on.is_empty() {
            return (0, Vec::new());
        }
        let prev_full = prev_on.len() == prev_roster.len();
        let curr_full = curr_on.len() == curr_roster.len();
        let k = self.cfg.hypothesis_sample_size;

        if curr_full && self.cfg.node_selection == NodeSelection::Winners {
            // A confirmed, never refuted link from the previous nodes means the
            // burst only reflected its immaturity; it anticipates next time.
            let maturing = self.maturing_targets(&prev_on, curr_col);
            if !maturing.is_empty() {
                return (0, maturing);
            }
        }

        let (sources, targets) = match (prev_full, curr_full) {
            (false, false) => return (0, Vec::new()),
            (false, true) => {
                let t = self.sample_targets(&curr_roster, k, &prev_on, false);
                (prev_on, t)
            }
            (true, false) => {
                let targets = if self.cfg.node_selection == NodeSelection::Winners {
                    // Targets anticipated from this column already hold a
                    // hypothesis from it; only unexplained ones get new links.
                    curr_on
                        .into_iter()
                        .filter(|&t| !self.has_link_from(t, prev_col))
                        .collect()
                } else {
                    curr_on
                };
                if targets.is_empty() {
                    return (0, Vec::new());
                }
                (self.sample_sources(&prev_roster, k), targets)
            }
            (true, true) => {
                let s = self.sample_sources(&prev_roster, k);
                let t = self.sample_targets(&curr_roster, k, &s, true);
                (s, t)
            }
        };

        let cap = self.cfg.max_new_links_per_step;
        let mut created = 0;
        'outer: for &s in &sources {
            for &t in &targets {
                if created >= cap {
                    break 'outer;
                }
                if let Ok((_, true)) = self.net.create_link(s, t) {
                    created += 1;
                }
            }
        }
        let picked = if curr_full { targets } else { Vec::new() };
        (created, picked)
    }

    fn maturing_targets(&self, sources: &[NodeId], column: ColumnId) -> Vec<NodeId> {
        let threshold = self.cfg.anticipation_threshold;
        let mut out = BTreeSet::new();
        for &s in sources {
            for &l in self.net.links_from(s).unwrap_or(&[]) {
                let Some(link) = self.net.link(l) else {
                    continue;
                };
                let in_column = self
                    .net
                    .node(link.target)
                    .is_some_and(|t| t.column == column);
                if in_column
                    && link.forward.frequency() == T::one()
                    && expectation(link.forward) > threshold
                {
                    out.insert(link.target);
                }
            }
        }
        out.into_iter().collect()
    }

    fn has_link_from(&self, target: NodeId, column: ColumnId) -> bool {
        self.net.links_into(target).unwrap_or(&[]).iter().any(|&l| {
            self.net
                .link(l)
                .and_then(|l| self.net.node(l.source))
                .is_some_and(|src| src.column == column)
        })
    }

    fn sample_sources(&mut self, roster: &[NodeId], k: usize) -> Vec<NodeId> {
        if self.cfg.node_selection == NodeSelection::Winners {
            let remembered: Vec<NodeId> = self
                .winners
                .iter()
                .copied()
                .filter(|n| roster.contains(n))
                .collect();
            if !remembered.is_empty() {
                return remembered;
            }
        }
        self.sample(roster, k)
    }

    fn sample(&mut self, roster: &[NodeId], k: usize) -> Vec<NodeId> {
        roster.choose_multiple(&mut self.rng, k).copied().collect()
    }

    /// Picks `k` target nodes. In winners mode, nodes that already hold a
    /// link from one of `sources` go last, then the least used come first.
    fn sample_targets(
        &mut self,
        roster: &[NodeId],
        k: usize,
        sources: &[NodeId],
        leading: bool,
    ) -> Vec<NodeId> {
        match self.cfg.node_selection {
            NodeSelection::Uniform => self.sample(roster, k),
            NodeSelection::Winners => {
                let threshold = self.cfg.anticipation_threshold;
                let inbound = |n: NodeId| {
                    self.net
                        .links_into(n)
                        .unwrap_or(&[])
                        .iter()
                        .filter(|&&l| {
                            self.net
                                .link(l)
                                .is_some_and(|l| expectation(l.forward) >= threshold)
                        })
                        .count()
                };
                let tried = |n: NodeId| sources.iter().any(|&s| self.net.find_link(s, n).is_some());
                let leads = |n: NodeId| {
                    self.net.links_from(n).unwrap_or(&[]).iter().any(|&l| {
                        self.net
                            .link(l)
                            .is_some_and(|l| expectation(l.forward) >= threshold)
                    })
                };
                let mut by_use: BTreeMap<(bool, usize, bool), Vec<NodeId>> = BTreeMap::new();
                for &n in roster {
                    let key = (tried(n), inbound(n), leading && !leads(n));
                    by_use.entry(key).or_default().push(n);
                }
                let mut picked = Vec::with_capacity(k);
                for (_, tier) in by_use {
                    let need = k - picked.len();
                    if need == 0 {
                        break;
                    }
                    picked.extend(tier.choose_multiple(&mut self.rng, need).copied());
                }
                picked
            }
        }
    }

    /// Enforces the per-column link capacity on `touched` columns.
    pub fn recycle(&mut self, touched: &[ColumnId]) -> usize {
        let cap = self.cfg.link_capacity_per_column;
        touched
            .iter()
            .map(|&c| self.net.evict_excess(c, cap).unwrap_or(0))
            .sum()
    }

    fn decay_budgets(&mut self) {
        for link in self.net.links_mut() {
            link.budget = decay_budget(link.budget);
        }
        for node in self.net.nodes_mut() {
            node.budget = decay_budget(node.budget);
        }
    }

    /// Deduces anticipations from the links leaving `curr_active`, keeping
    /// per target node the candidate with the highest expectation. Nodes
    /// whose anticipation clears the threshold become pre-active; every
    /// other pre-activation is cleared.
    pub fn compute_anticipations(
        &mut self,
        curr_active: &[NodeId],
    ) -> Vec<(NodeId, TruthValue<T>)> {
        for n in std::mem::take(&mut self.pre_active) {
            if let Some(node) = self.net.node_mut(n) {
                node.pre_active = false;
            }
        }
        self.anticipated.clear();

        let sources: BTreeSet<NodeId> = curr_active.iter().copied().collect();
        let mut best: BTreeMap<NodeId, TruthValue<T>> = BTreeMap::new();
        for n in sources {
            let Some(node) = self.net.node(n) else {
                continue;
            };
            let belief = node.truth;
            for &l in self.net.links_from(n).unwrap_or(&[]) {
                let link = self.net.link(l).expect("live link");
                let candidate = deduce(belief, link.forward);
                best.entry(link.target)
                    .and_modify(|held| {
                        if expectation(candidate) > expectation(*held) {
                            *held = candidate;
                        }
                    })
                    .or_insert(candidate);
            }
        }

        let threshold = self.cfg.anticipation_threshold;
        let mut out = Vec::new();
        for (n, truth) in best {
            if expectation(truth) > threshold {
                let node = self.net.node_mut(n).expect("link target exists");
                node.pre_active = true;
                node.anticipation = truth;
                let column = node.column;
                self.pre_active.push(n);
                let symbol = self.net.column(column).expect("node column").symbol.clone();
                self.anticipated.insert(symbol);
                out.push((n, truth));
            }
        }
        out
    }

    /// Top-1 symbol among columns with pre-active nodes, scored by the best
    /// anticipation expectation in each column. Ties are broken uniformly at
    /// random.
    pub fn predict_next(&mut self) -> Option<Symbol> {
        let mut scores: BTreeMap<ColumnId, T> = BTreeMap::new();
        for &n in &self.pre_active {
            let node = self.net.node(n).expect("pre-active node");
            let e = expectation(node.anticipation);
            scores
                .entry(node.column)
                .and_modify(|s| *s = s.max_of(e))
                .or_insert(e);
        }
        let top = scores.values().copied().reduce(|a, b| a.max_of(b))?;
        let leaders: Vec<ColumnId> = scores
            .iter()
            .filter(|(_, &s)| s == top)
            .map(|(&c, _)| c)
            .collect();
        let pick = if leaders.len() == 1 {
            leaders[0]
        } else {
            leaders[self.rng.gen_range(0..leaders.len())]
        };
        self.net.column(pick).map(|c| c.symbol.clone())
    }

    /// Forgets all transient activity so the next input starts a fresh
    /// context. Learned links are kept.
    pub fn clear_activity(&mut self) {
        for node in self.net.nodes_mut() {
            node.active_now = false;
            node.active_prev = false;
            node.pre_active = false;
        }
        self.pre_active.clear();
        self.active.clear();
        self.prev_active.clear();
        self.prev_column = None;
        self.winners.clear();
        self.standing = None;
        self.anticipated.clear();
    }

    /// Replays `context` from a clean slate on a copy of the model and
    /// returns the prediction it leaves standing.
    pub fn probe(&self, context: &[Symbol]) -> Option<Symbol> {
        let mut scratch = self.clone();
        scratch.clear_activity();
        for s in context {
            scratch.step(s);
        }
        scratch.standing
    }
}
