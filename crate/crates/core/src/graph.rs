//! Weighted directed graph over news-source domains.
//!
//! Nodes are canonical domain identifiers. Edges carry raw hyperlink tallies;
//! [`SourceGraph::normalize`] derives two proportion tables from them:
//!
//! * the outbound weight `w(s, s')`, the share of all links in `s` that point
//!   at `s'` (each row sums to one), and
//! * the inbound share `w_s(s')`, the share of all links arriving at `s'` that
//!   originate in `s` (each column sums to one).
//!
//! Normalization also renumbers nodes into lexicographic order, so two graphs
//! built from the same counts in any order are identical down to the bit.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Canonical domain name of a news source, e.g. `nytimes.com`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SourceId(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid source id {value:?}: {reason}")]
pub struct InvalidSourceId {
    pub value: String,
    pub reason: &'static str,
}

impl SourceId {
    /// Accepts an already-canonical domain and rejects anything else.
    pub fn new(value: impl Into<String>) -> Result<Self, InvalidSourceId> {
        let value = value.into();
        let fail = |reason| {
            Err(InvalidSourceId {
                value: value.clone(),
                reason,
            })
        };
        if value.is_empty() {
            return fail("empty");
        }
        if value.chars().any(char::is_whitespace) {
            return fail("contains whitespace");
        }
        if value.chars().any(char::is_uppercase) {
            return fail("contains uppercase characters");
        }
        if value.contains(['/', ':', '@', '?', '#', '\\']) {
            return fail("contains scheme, path, port or credential characters");
        }
        if value.starts_with("www.") {
            return fail("leading \"www.\" must be stripped");
        }
        if value.starts_with('.') || value.ends_with('.') || value.contains("..") {
            return fail("empty domain label");
        }
        Ok(Self(value))
    }

    /// Lenient constructor for user-supplied domains: trims, lowercases and
    /// strips a leading `www.`. Full URLs are reduced to their host.
    pub fn canonicalize(raw: &str) -> Result<Self, InvalidSourceId> {
        let raw = raw.trim();
        if raw.contains("://") {
            return crate::ingest::extract_domain(raw).map_err(|_| InvalidSourceId {
                value: raw.to_owned(),
                reason: "URL without a host",
            });
        }
        let lowered = raw.to_lowercase();
        let host = lowered.trim_end_matches('.');
        let host = host.strip_prefix("www.").unwrap_or(host);
        Self::new(host)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for SourceId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl FromStr for SourceId {
    type Err = InvalidSourceId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl TryFrom<String> for SourceId {
    type Error = InvalidSourceId;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<SourceId> for String {
    fn from(id: SourceId) -> Self {
        id.0
    }
}

/// Whether links from a source to itself become edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelfLinks {
    #[default]
    Drop,
    Keep,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    InvalidSource(#[from] InvalidSourceId),
    #[error("link count must be at least 1")]
    ZeroCount,
    #[error("self-link {0} -> {0} rejected (self-links are dropped)")]
    SelfLink(SourceId),
    #[error("link count overflow on {src} -> {dst}")]
    CountOverflow { src: SourceId, dst: SourceId },
    #[error("cannot merge graphs with different self-link policies")]
    PolicyMismatch,
    #[error("graph weights are stale; call normalize first")]
    NotNormalized,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Interned node identifiers shared between a graph and the score maps
/// computed from it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeTable {
    ids: Vec<SourceId>,
    index: HashMap<SourceId, u32>,
}

impl NodeTable {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[SourceId] {
        &self.ids
    }

    pub fn position(&self, id: &SourceId) -> Option<usize> {
        self.index.get(id).map(|&i| i as usize)
    }

    fn intern(&mut self, id: SourceId) -> u32 {
        if let Some(&i) = self.index.get(&id) {
            return i;
        }
        let i = u32::try_from(self.ids.len()).expect("more than u32::MAX nodes");
        self.index.insert(id.clone(), i);
        self.ids.push(id);
        i
    }
}

/// Compressed adjacency derived from the counts. Both directions are kept so
/// forward and reverse sweeps read contiguous memory.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Adjacency {
    pub out_offsets: Vec<usize>,
    pub out_targets: Vec<u32>,
    pub out_counts: Vec<u64>,
    /// `w(s, t)` for the edge `s -> t`.
    pub out_weights: Vec<f64>,
    /// `w_s(t)` for the edge `s -> t`: the share of `t`'s inbound links from `s`.
    pub out_inbound_shares: Vec<f64>,
    pub in_offsets: Vec<usize>,
    pub in_sources: Vec<u32>,
    /// `w(s', t)` for the edge `s' -> t`, indexed by inbound position.
    pub in_weights: Vec<f64>,
    /// `w_{s'}(t)` for the edge `s' -> t`, indexed by inbound position.
    pub in_shares: Vec<f64>,
}

impl Adjacency {
    fn build(node_count: usize, counts: &HashMap<(u32, u32), u64>) -> Self {
        let mut edges: Vec<(u32, u32, u64)> = counts.iter().map(|(&(s, d), &c)| (s, d, c)).collect();
        edges.sort_unstable();

        let mut out_totals = vec![0u64; node_count];
        let mut in_totals = vec![0u64; node_count];
        let mut out_offsets = vec![0usize; node_count + 1];
        let mut in_offsets = vec![0usize; node_count + 1];
        for &(s, d, c) in &edges {
            out_totals[s as usize] += c;
            in_totals[d as usize] += c;
            out_offsets[s as usize + 1] += 1;
            in_offsets[d as usize + 1] += 1;
        }
        for i in 0..node_count {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }

        let m = edges.len();
        let mut out_targets = Vec::with_capacity(m);
        let mut out_counts = Vec::with_capacity(m);
        let mut out_weights = Vec::with_capacity(m);
        let mut out_inbound_shares = Vec::with_capacity(m);
        for &(s, d, c) in &edges {
            out_targets.push(d);
            out_counts.push(c);
            out_weights.push(c as f64 / out_totals[s as usize] as f64);
            out_inbound_shares.push(c as f64 / in_totals[d as usize] as f64);
        }

        // Edges are sorted by source, so filling inbound slots in that order
        // leaves every inbound list sorted by source as well.
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0u32; m];
        let mut in_weights = vec![0.0; m];
        let mut in_shares = vec![0.0; m];
        for (e, &(s, d, _)) in edges.iter().enumerate() {
            let slot = cursor[d as usize];
            cursor[d as usize] += 1;
            in_sources[slot] = s;
            in_weights[slot] = out_weights[e];
            in_shares[slot] = out_inbound_shares[e];
        }

        Self {
            out_offsets,
            out_targets,
            out_counts,
            out_weights,
            out_inbound_shares,
            in_offsets,
            in_sources,
            in_weights,
            in_shares,
        }
    }

    pub fn outbound(&self, node: usize) -> std::ops::Range<usize> {
        self.out_offsets[node]..self.out_offsets[node + 1]
    }

    pub fn inbound(&self, node: usize) -> std::ops::Range<usize> {
        self.in_offsets[node]..self.in_offsets[node + 1]
    }
}

/// One outbound edge as seen from its source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutEdge<'a> {
    pub target: &'a SourceId,
    pub count: u64,
    pub weight: f64,
    pub inbound_share: f64,
}

#[derive(Debug, Clone)]
pub struct SourceGraph {
    self_links: SelfLinks,
    nodes: Arc<NodeTable>,
    counts: HashMap<(u32, u32), u64>,
    adjacency: Option<Arc<Adjacency>>,
}

impl PartialEq for SourceGraph {
    fn eq(&self, other: &Self) -> bool {
        self.self_links == other.self_links
            && self.nodes == other.nodes
            && self.counts == other.counts
            && self.adjacency == other.adjacency
    }
}

impl Default for SourceGraph {
    fn default() -> Self {
        Self::new(SelfLinks::default())
    }
}

impl SourceGraph {
    pub fn new(self_links: SelfLinks) -> Self {
        Self {
            self_links,
            nodes: Arc::default(),
            counts: HashMap::new(),
            adjacency: None,
        }
    }

    pub fn self_links(&self) -> SelfLinks {
        self.self_links
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.counts.len()
    }

    /// Node identifiers in index order. After normalization this is sorted.
    pub fn nodes(&self) -> &[SourceId] {
        self.nodes.ids()
    }

    pub(crate) fn node_table(&self) -> &Arc<NodeTable> {
        &self.nodes
    }

    pub fn position(&self, id: &SourceId) -> Option<usize> {
        self.nodes.position(id)
    }

    pub fn contains(&self, id: &SourceId) -> bool {
        self.nodes.position(id).is_some()
    }

    pub fn is_normalized(&self) -> bool {
        self.adjacency.is_some()
    }

    /// Registers a node without edges (a source whose articles link nowhere
    /// else, or a pure link target).
    pub fn add_node(&mut self, id: SourceId) -> usize {
        if self.nodes.position(&id).is_none() {
            self.adjacency = None;
        }
        Arc::make_mut(&mut self.nodes).intern(id) as usize
    }

    pub fn add_links(&mut self, src: SourceId, dst: SourceId, count: u64) -> Result<(), GraphError> {
        if count == 0 {
            return Err(GraphError::ZeroCount);
        }
        if src == dst && self.self_links == SelfLinks::Drop {
            return Err(GraphError::SelfLink(src));
        }
        let table = Arc::make_mut(&mut self.nodes);
        let s = table.intern(src);
        let d = table.intern(dst);
        let slot = self.counts.entry((s, d)).or_insert(0);
        *slot = slot.checked_add(count).ok_or_else(|| GraphError::CountOverflow {
            src: table.ids[s as usize].clone(),
            dst: table.ids[d as usize].clone(),
        })?;
        self.adjacency = None;
        Ok(())
    }

    /// Builder-style variant of [`add_links`](Self::add_links).
    pub fn with_links(mut self, src: SourceId, dst: SourceId, count: u64) -> Result<Self, GraphError> {
        self.add_links(src, dst, count)?;
        Ok(self)
    }

    /// Recomputes both weight tables from the counts and renumbers nodes in
    /// lexicographic order. Idempotent.
    pub fn normalize(&mut self) {
        let mut order: Vec<u32> = (0..self.nodes.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| self.nodes.ids[a as usize].cmp(&self.nodes.ids[b as usize]));
        let mut remap = vec![0u32; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old as usize] = new as u32;
        }
        let ids: Vec<SourceId> = order.iter().map(|&old| self.nodes.ids[old as usize].clone()).collect();
        let index = ids.iter().enumerate().map(|(i, id)| (id.clone(), i as u32)).collect();
        let counts = self
            .counts
            .iter()
            .map(|(&(s, d), &c)| ((remap[s as usize], remap[d as usize]), c))
            .collect();
        self.nodes = Arc::new(NodeTable { ids, index });
        self.counts = counts;
        self.adjacency = Some(Arc::new(Adjacency::build(self.nodes.len(), &self.counts)));
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub(crate) fn adjacency(&self) -> Result<&Adjacency, GraphError> {
        self.adjacency.as_deref().ok_or(GraphError::NotNormalized)
    }

    pub fn out_count(&self, src: &SourceId, dst: &SourceId) -> u64 {
        match (self.position(src), self.position(dst)) {
            (Some(s), Some(d)) => self.counts.get(&(s as u32, d as u32)).copied().unwrap_or(0),
            _ => 0,
        }
    }

    /// `w(src, dst)`; `None` when there is no edge or the graph is stale.
    pub fn out_weight(&self, src: &SourceId, dst: &SourceId) -> Option<f64> {
        let adj = self.adjacency.as_deref()?;
        let s = self.position(src)?;
        let d = self.position(dst)? as u32;
        let range = adj.outbound(s);
        let i = adj.out_targets[range.clone()].binary_search(&d).ok()?;
        Some(adj.out_weights[range.start + i])
    }

    /// `w_src(dst)`: share of `dst`'s inbound links that come from `src`.
    pub fn in_weight(&self, dst: &SourceId, src: &SourceId) -> Option<f64> {
        let adj = self.adjacency.as_deref()?;
        let d = self.position(dst)?;
        let s = self.position(src)? as u32;
        let range = adj.inbound(d);
        let i = adj.in_sources[range.clone()].binary_search(&s).ok()?;
        Some(adj.in_shares[range.start + i])
    }

    /// Outbound edges of `src` in target order. Requires a normalized graph.
    pub fn outbound(&self, src: &SourceId) -> Result<Vec<OutEdge<'_>>, GraphError> {
        let adj = self.adjacency()?;
        let Some(s) = self.position(src) else {
            return Ok(Vec::new());
        };
        Ok(adj
            .outbound(s)
            .map(|e| OutEdge {
                target: &self.nodes.ids[adj.out_targets[e] as usize],
                count: adj.out_counts[e],
                weight: adj.out_weights[e],
                inbound_share: adj.out_inbound_shares[e],
            })
            .collect())
    }

    /// All edges with their counts, sorted by `(src, dst)` name.
    pub fn edges(&self) -> Vec<(&SourceId, &SourceId, u64)> {
        let ids = self.nodes.ids();
        let mut edges: Vec<_> = self
            .counts
            .iter()
            .map(|(&(s, d), &c)| (&ids[s as usize], &ids[d as usize], c))
            .collect();
        edges.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        edges
    }

    /// Count-level union of several graphs, normalized.
    pub fn merge<'a, I>(graphs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = &'a SourceGraph>,
    {
        let mut merged: Option<SourceGraph> = None;
        for g in graphs {
            let acc = merged.get_or_insert_with(|| SourceGraph::new(g.self_links));
            if acc.self_links != g.self_links {
                return Err(GraphError::PolicyMismatch);
            }
            for id in g.nodes() {
                acc.add_node(id.clone());
            }
            for (src, dst, count) in g.edges() {
                acc.add_links(src.clone(), dst.clone(), count)?;
            }
        }
        Ok(merged.unwrap_or_default().normalized())
    }

    /// Writes `src<TAB>dst<TAB>count` lines sorted by `(src, dst)`.
    pub fn save_edges<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (src, dst, count) in self.edges() {
            writeln!(out, "{src}\t{dst}\t{count}")?;
        }
        out.flush()
    }

    /// Writes `src<TAB>dst<TAB>weight` lines; weights use the shortest
    /// decimal that parses back to the same `f64`.
    pub fn save_weights<W: Write>(&self, mut out: W) -> Result<(), GraphError> {
        let adj = self.adjacency()?;
        let ids = self.nodes.ids();
        // Normalized ids are sorted, so index order is name order.
        for s in 0..ids.len() {
            for e in adj.outbound(s) {
                writeln!(
                    out,
                    "{}\t{}\t{}",
                    ids[s], ids[adj.out_targets[e] as usize], adj.out_weights[e]
                )?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Parses an edge list and returns the normalized graph.
    pub fn load_edges<R: BufRead>(input: R, self_links: SelfLinks) -> Result<Self, GraphError> {
        let mut graph = SourceGraph::new(self_links);
        for (i, line) in input.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| GraphError::Parse { line: line_no, message };
            let fields: Vec<&str> = line.split('\t').collect();
            let [src, dst, count] = fields[..] else {
                return Err(parse_err(format!(
                    "expected 3 tab-separated fields, found {}",
                    fields.len()
                )));
            };
            let src = SourceId::new(src).map_err(|e| parse_err(e.to_string()))?;
            let dst = SourceId::new(dst).map_err(|e| parse_err(e.to_string()))?;
            let count: u64 = count
                .parse()
                .map_err(|_| parse_err(format!("count {count:?} is not a positive integer")))?;
            if graph.out_count(&src, &dst) > 0 {
                return Err(parse_err(format!("duplicate edge {src} -> {dst}")));
            }
            graph.add_links(src, dst, count).map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(graph.normalized())
    }
}
