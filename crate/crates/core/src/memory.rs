//! The network store: columns of event nodes joined by truth-valued links.
//!
//! Each symbol owns one [`Column`] with a fixed roster of [`Node`]s. A
//! [`Link`] joins two nodes of different columns and carries the predictive
//! implication, the retrospective implication and the predictive
//! equivalence between them, plus a [`Budget`] used for recycling.
//!
//! Links count against the column of their source node. Link ids are never
//! reused, so id order is insertion order.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::scalar::Scalar;
use crate::truth::{expectation, Budget, TruthError, TruthValue};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MemoryError {
    #[error("intra-column link")]
    IntraColumn,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown column {0}")]
    UnknownColumn(ColumnId),
    #[error("symbol label must be nonempty")]
    EmptySymbol,
    #[error(transparent)]
    Truth(#[from] TruthError),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(label: impl Into<String>) -> Result<Self, MemoryError> {
        let label = label.into();
        if label.is_empty() {
            return Err(MemoryError::EmptySymbol);
        }
        Ok(Symbol(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<char> for Symbol {
    fn from(c: char) -> Self {
        Symbol(c.to_string())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "'{}'", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(ColumnId, "c");
id_type!(NodeId, "n");
id_type!(LinkId, "l");

#[derive(Debug, Clone)]
pub struct Column {
    pub symbol: Symbol,
    pub nodes: Vec<NodeId>,
}

#[derive(Debug, Clone)]
pub struct Node<T> {
    pub id: NodeId,
    pub column: ColumnId,
    /// Position within the column roster.
    pub slot: usize,
    pub truth: TruthValue<T>,
    pub budget: Budget<T>,
    pub active_now: bool,
    pub active_prev: bool,
    pub pre_active: bool,
    /// Deduced truth of the pending anticipation; meaningful only when `pre_active`.
    pub anticipation: TruthValue<T>,
}

#[derive(Debug, Clone)]
pub struct Link<T> {
    pub source: NodeId,
    pub target: NodeId,
    /// Predictive implication, source then target.
    pub forward: TruthValue<T>,
    /// Retrospective implication, target preceded by source.
    pub backward: TruthValue<T>,
    /// Predictive equivalence.
    pub equivalence: TruthValue<T>,
    pub budget: Budget<T>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NetworkStats {
    pub column_count: usize,
    pub node_count: usize,
    pub link_count: usize,
    /// Owned-link count per column, in column order.
    pub links_per_column: Vec<(ColumnId, usize)>,
}

#[derive(Debug, Clone, Copy)]
pub struct NetworkConfig<T> {
    pub nodes_per_column: usize,
    pub initial_link_priority: T,
    pub link_durability: T,
    pub node_durability: T,
}

impl<T: Scalar> Default for NetworkConfig<T> {
    fn default() -> Self {
        Self {
            nodes_per_column: 16,
            initial_link_priority: T::from_f64_lossy(0.8),
            link_durability: T::from_f64_lossy(0.9),
            node_durability: T::from_f64_lossy(0.9),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Network<T> {
    cfg: NetworkConfig<T>,
    columns: Vec<Column>,
    by_symbol: HashMap<Symbol, ColumnId>,
    nodes: Vec<Node<T>>,
    links: Vec<Option<Link<T>>>,
    pairs: HashMap<(NodeId, NodeId), LinkId>,
    outgoing: Vec<Vec<LinkId>>,
    incoming: Vec<Vec<LinkId>>,
    owned: Vec<usize>,
    live: usize,
}

impl<T: Scalar> Network<T> {
    pub fn new(cfg: NetworkConfig<T>) -> Result<Self, MemoryError> {
        // Validate the budgets we will hand out.
        Budget::new(cfg.initial_link_priority, cfg.link_durability, T::zero())?;
        Budget::new(T::zero(), cfg.node_durability, T::zero())?;
        Ok(Self {
            cfg,
            columns: Vec::new(),
            by_symbol: HashMap::new(),
            nodes: Vec::new(),
            links: Vec::new(),
            pairs: HashMap::new(),
            outgoing: Vec::new(),
            incoming: Vec::new(),
            owned: Vec::new(),
            live: 0,
        })
    }

    pub fn config(&self) -> &NetworkConfig<T> {
        &self.cfg
    }

    pub fn get_or_create_column(&mut self, symbol: &Symbol) -> ColumnId {
        if let Some(&id) = self.by_symbol.get(symbol) {
            return id;
        }
        let cid = ColumnId(self.columns.len() as u32);
        let node_budget = Budget::new(T::zero(), self.cfg.node_durability, T::zero())
            .expect("validated in Network::new");
        let mut roster = Vec::with_capacity(self.cfg.nodes_per_column);
        for slot in 0..self.cfg.nodes_per_column {
            let id = NodeId(self.nodes.len() as u32);
            self.nodes.push(Node {
                id,
                column: cid,
                slot,
                truth: TruthValue::unknown(),
                budget: node_budget,
                active_now: false,
                active_prev: false,
                pre_active: false,
                anticipation: TruthValue::unknown(),
            });
            self.outgoing.push(Vec::new());
            self.incoming.push(Vec::new());
            roster.push(id);
        }
        self.columns.push(Column {
            symbol: symbol.clone(),
            nodes: roster,
        });
        self.owned.push(0);
        self.by_symbol.insert(symbol.clone(), cid);
        cid
    }

    pub fn column_of(&self, symbol: &Symbol) -> Option<ColumnId> {
        self.by_symbol.get(symbol).copied()
    }

    pub fn column(&self, id: ColumnId) -> Option<&Column> {
        self.columns.get(id.index())
    }

    pub fn columns(&self) -> impl Iterator<Item = (ColumnId, &Column)> {
        self.columns
            .iter()
            .enumerate()
            .map(|(i, c)| (ColumnId(i as u32), c))
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node<T>> {
        self.nodes.get(id.index())
    }

    pub fn node_mut(&mut self, id: NodeId) -> Option<&mut Node<T>> {
        self.nodes.get_mut(id.index())
    }

    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub(crate) fn nodes_mut(&mut self) -> &mut [Node<T>] {
        &mut self.nodes
    }

    pub fn link(&self, id: LinkId) -> Option<&Link<T>> {
        self.links.get(id.index()).and_then(Option::as_ref)
    }

    pub fn link_mut(&mut self, id: LinkId) -> Option<&mut Link<T>> {
        self.links.get_mut(id.index()).and_then(Option::as_mut)
    }

    pub fn find_link(&self, source: NodeId, target: NodeId) -> Option<LinkId> {
        self.pairs.get(&(source, target)).copied()
    }

    /// Live links in insertion order.
    pub fn links(&self) -> impl Iterator<Item = (LinkId, &Link<T>)> {
        self.links
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.as_ref().map(|l| (LinkId(i as u32), l)))
    }

    pub(crate) fn links_mut(&mut self) -> impl Iterator<Item = &mut Link<T>> {
        self.links.iter_mut().filter_map(Option::as_mut)
    }

    pub fn link_count(&self) -> usize {
        self.live
    }

    /// Number of links whose source node lies in `column`.
    pub fn owned_links(&self, column: ColumnId) -> usize {
        self.owned.get(column.index()).copied().unwrap_or(0)
    }

    /// Creates the link `source -> target` with evidence-free predictions.
    ///
    /// Returns the link and whether it was newly created; an existing pair
    /// is returned untouched.
    pub fn create_link(
        &mut self,
        source: NodeId,
        target: NodeId,
    ) -> Result<(LinkId, bool), MemoryError> {
        let src_col = self
            .node(source)
            .ok_or(MemoryError::UnknownNode(source))?
            .column;
        let dst_col = self
            .node(target)
            .ok_or(MemoryError::UnknownNode(target))?
            .column;
        if src_col == dst_col {
            return Err(MemoryError::IntraColumn);
        }
        if let Some(id) = self.find_link(source, target) {
            return Ok((id, false));
        }
        let budget = Budget::new(
            self.cfg.initial_link_priority,
            self.cfg.link_durability,
            T::zero(),
        )
        .expect("validated in Network::new");
        let id = LinkId(self.links.len() as u32);
        self.links.push(Some(Link {
            source,
            target,
            forward: TruthValue::unknown(),
            backward: TruthValue::unknown(),
            equivalence: TruthValue::unknown(),
            budget,
        }));
        self.pairs.insert((source, target), id);
        self.outgoing[source.index()].push(id);
        self.incoming[target.index()].push(id);
        self.owned[src_col.index()] += 1;
        self.live += 1;
        Ok((id, true))
    }

    pub fn links_from(&self, node: NodeId) -> Result<&[LinkId], MemoryError> {
        self.outgoing
            .get(node.index())
            .map(Vec::as_slice)
            .ok_or(MemoryError::UnknownNode(node))
    }

    pub fn links_into(&self, node: NodeId) -> Result<&[LinkId], MemoryError> {
        self.incoming
            .get(node.index())
            .map(Vec::as_slice)
            .ok_or(MemoryError::UnknownNode(node))
    }

    fn remove_link(&mut self, id: LinkId) {
        let Some(link) = self.links[id.index()].take() else {
            return;
        };
        self.pairs.remove(&(link.source, link.target));
        self.outgoing[link.source.index()].retain(|&l| l != id);
        self.incoming[link.target.index()].retain(|&l| l != id);
        let col = self.nodes[link.source.index()].column;
        self.owned[col.index()] -= 1;
        self.live -= 1;
    }

    /// Drops the weakest links owned by `column` until at most `cap` remain.
    ///
    /// Removal order is ascending priority, then ascending quality, then
    /// insertion order.
    pub fn evict_excess(&mut self, column: ColumnId, cap: usize) -> Result<usize, MemoryError> {
        let col = self
            .columns
            .get(column.index())
            .ok_or(MemoryError::UnknownColumn(column))?;
        let owned = self.owned[column.index()];
        if owned <= cap {
            return Ok(0);
        }
        let mut candidates: Vec<LinkId> = col
            .nodes
            .iter()
            .flat_map(|n| self.outgoing[n.index()].iter().copied())
            .collect();
        candidates.sort_by(|a, b| {
            let la = self.links[a.index()].as_ref().expect("live link");
            let lb = self.links[b.index()].as_ref().expect("live link");
            la.budget
                .priority()
                .total_cmp_lossy(&lb.budget.priority())
                .then(la.budget.quality().total_cmp_lossy(&lb.budget.quality()))
                .then(a.cmp(b))
        });
        let excess = owned - cap;
        for &id in &candidates[..excess] {
            self.remove_link(id);
        }
        Ok(excess)
    }

    pub fn stats(&self) -> NetworkStats {
        NetworkStats {
            column_count: self.columns.len(),
            node_count: self.nodes.len(),
            link_count: self.live,
            links_per_column: self
                .owned
                .iter()
                .enumerate()
                .map(|(i, &n)| (ColumnId(i as u32), n))
                .collect(),
        }
    }

    /// Renders links whose forward expectation is at least `min_expectation`
    /// as a DOT digraph, one cluster per column.
    pub fn export_dot(&self, min_expectation: T) -> String {
        let edges: Vec<&Link<T>> = self
            .links()
            .map(|(_, l)| l)
            .filter(|l| expectation(l.forward) >= min_expectation)
            .collect();
        let mut shown = vec![false; self.nodes.len()];
        for l in &edges {
            shown[l.source.index()] = true;
            shown[l.target.index()] = true;
        }

        let mut out = String::new();
        out.push_str("digraph network {\n");
        out.push_str("  rankdir=LR;\n");
        out.push_str("  node [shape=circle];\n");
        for (cid, col) in self.columns() {
            let label = escape_dot(col.symbol.as_str());
            let _ = writeln!(out, "  subgraph cluster_{} {{", cid.0);
            let _ = writeln!(out, "    label=\"{label}\";");
            for &n in &col.nodes {
                if shown[n.index()] {
                    let slot = self.nodes[n.index()].slot;
                    let _ = writeln!(out, "    {n} [label=\"{label}{slot}\"];");
                }
            }
            out.push_str("  }\n");
        }
        for l in edges {
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"{}\"];",
                l.source, l.target, l.forward
            );
        }
        out.push_str("}\n");
        out
    }
}

fn escape_dot(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' | '\\' => {
                out.push('\\');
                out.push(ch);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(ch),
        }
    }
    out
}
