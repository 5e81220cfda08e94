//! Ground-truth reliability labels, rewards and experiment sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{SourceGraph, SourceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReliabilityLabel {
    Reliable,
    Mixed,
    Unreliable,
}

impl fmt::Display for ReliabilityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Reliable => "reliable",
            Self::Mixed => "mixed",
            Self::Unreliable => "unreliable",
        })
    }
}

impl FromStr for ReliabilityLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "reliable" => Ok(Self::Reliable),
            "mixed" => Ok(Self::Mixed),
            "unreliable" => Ok(Self::Unreliable),
            _ => Err(LabelError::UnknownLabel(s.to_owned())),
        }
    }
}

#[derive(Debug, Error)]
pub enum LabelError {
    #[error("unknown label {0:?} (expected reliable, mixed or unreliable)")]
    UnknownLabel(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("duplicate domains: {}", .0.join(", "))]
    Duplicates(Vec<String>),
    #[error("no labeled domain is present in the graph")]
    EmptyExpset,
    #[error("expected header `{expected}`, found `{found}`")]
    Header { expected: &'static str, found: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledEntry {
    pub label: ReliabilityLabel,
    pub origin: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub reliable: usize,
    pub mixed: usize,
    pub unreliable: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.reliable + self.mixed + self.unreliable
    }
}

impl fmt::Display for ClassCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} reliable / {} mixed / {} unreliable",
            self.reliable, self.mixed, self.unreliable
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub name: String,
    pub entries: BTreeMap<SourceId, LabeledEntry>,
}

impl LabeledDataset {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            entries: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn label(&self, id: &SourceId) -> Option<ReliabilityLabel> {
        self.entries.get(id).map(|e| e.label)
    }

    pub fn insert(&mut self, id: SourceId, label: ReliabilityLabel, origin: impl Into<String>) {
        self.entries.insert(
            id,
            LabeledEntry {
                label,
                origin: origin.into(),
            },
        );
    }

    pub fn class_counts(&self) -> ClassCounts {
        let mut counts = ClassCounts::default();
        for entry in self.entries.values() {
            match entry.label {
                ReliabilityLabel::Reliable => counts.reliable += 1,
                ReliabilityLabel::Mixed => counts.mixed += 1,
                ReliabilityLabel::Unreliable => counts.unreliable += 1,
            }
        }
        counts
    }

    pub fn origins(&self) -> BTreeSet<&str> {
        self.entries.values().map(|e| e.origin.as_str()).collect()
    }

    /// Subset restricted to the given domains.
    pub fn subset<'a, I>(&self, ids: I) -> LabeledDataset
    where
        I: IntoIterator<Item = &'a SourceId>,
    {
        let entries = ids
            .into_iter()
            .filter_map(|id| self.entries.get(id).map(|e| (id.clone(), e.clone())))
            .collect();
        LabeledDataset {
            name: self.name.clone(),
            entries,
        }
    }
}

/// Reads a `domain,label[,origin]` CSV. Rows without an origin column are
/// tagged with `name`.
pub fn load_labels<R: Read>(input: R, name: &str) -> Result<LabeledDataset, LabelError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let cols: Vec<String> = headers.iter().map(str::to_ascii_lowercase).collect();
    let has_origin = match cols.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["domain", "label"] => false,
        ["domain", "label", "origin"] => true,
        _ => {
            return Err(LabelError::Header {
                expected: "domain,label[,origin]",
                found: headers.iter().collect::<Vec<_>>().join(","),
            })
        }
    };

    let mut dataset = LabeledDataset::new(name);
    let mut duplicates = BTreeSet::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let parse_err = |message: String| LabelError::Parse { line, message };
        let expected = if has_origin { 3 } else { 2 };
        if row.len() != expected {
            return Err(parse_err(format!("expected {expected} fields, found {}", row.len())));
        }
        let id = SourceId::canonicalize(&row[0]).map_err(|e| parse_err(e.to_string()))?;
        let label: ReliabilityLabel = row[1].parse().map_err(|e: LabelError| parse_err(e.to_string()))?;
        let origin = if has_origin { row[2].to_owned() } else { name.to_owned() };
        if dataset.entries.contains_key(&id) {
            duplicates.insert(id.to_string());
            continue;
        }
        dataset.insert(id, label, origin);
    }
    if !duplicates.is_empty() {
        return Err(LabelError::Duplicates(duplicates.into_iter().collect()));
    }
    Ok(dataset)
}

pub const DEFAULT_PRECEDENCE: [&str; 4] = ["newsguard", "fakenews", "wikipedia", "mbfc"];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeReport {
    /// Domains whose constituent labels disagreed.
    pub conflicts: usize,
    pub precedence: Vec<String>,
}

/// Unions datasets. When a domain appears more than once, the entry whose
/// origin comes first in `precedence` wins; origins missing from the list
/// rank after all listed ones, in name order.
pub fn merge_datasets(datasets: &[LabeledDataset], precedence: &[&str], name: &str) -> (LabeledDataset, MergeReport) {
    let rank = |origin: &str| -> (usize, String) {
        let pos = precedence
            .iter()
            .position(|p| p.eq_ignore_ascii_case(origin))
            .unwrap_or(precedence.len());
        (pos, origin.to_owned())
    };
    let mut merged = LabeledDataset::new(name);
    let mut conflicted = BTreeSet::new();
    for dataset in datasets {
        for (id, entry) in &dataset.entries {
            match merged.entries.get_mut(id) {
                None => {
                    merged.entries.insert(id.clone(), entry.clone());
                }
                Some(current) => {
                    if current.label != entry.label {
                        conflicted.insert(id.clone());
                    }
                    if rank(&entry.origin) < rank(&current.origin) {
                        *current = entry.clone();
                    }
                }
            }
        }
    }
    let report = MergeReport {
        conflicts: conflicted.len(),
        precedence: precedence.iter().map(|s| s.to_string()).collect(),
    };
    (merged, report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Reward {
    Negative = -1,
    Neutral = 0,
    Positive = 1,
}

impl Reward {
    pub fn value(self) -> f64 {
        self as i8 as f64
    }
}

/// How the `mixed` class maps onto rewards.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardPolicy {
    /// mixed -> 0
    Strict,
    /// mixed -> -1
    #[default]
    Merged,
}

impl FromStr for RewardPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(Self::Strict),
            "merged" => Ok(Self::Merged),
            _ => Err(format!("unknown reward policy {s:?} (strict|merged)")),
        }
    }
}

/// Rewards per domain; every domain not listed has reward 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewardAssignment {
    rewards: BTreeMap<SourceId, Reward>,
}

impl RewardAssignment {
    pub fn get(&self, id: &SourceId) -> Reward {
        self.rewards.get(id).copied().unwrap_or(Reward::Neutral)
    }

    pub fn set(&mut self, id: SourceId, reward: Reward) {
        if reward == Reward::Neutral {
            self.rewards.remove(&id);
        } else {
            self.rewards.insert(id, reward);
        }
    }

    /// Non-zero entries.
    pub fn iter(&self) -> impl Iterator<Item = (&SourceId, Reward)> {
        self.rewards.iter().map(|(id, &r)| (id, r))
    }

    pub fn count(&self, reward: Reward) -> usize {
        self.rewards.values().filter(|&&r| r == reward).count()
    }

    /// Copy with the listed domains reset to 0.
    pub fn without<'a, I>(&self, ids: I) -> RewardAssignment
    where
        I: IntoIterator<Item = &'a SourceId>,
    {
        let mut out = self.clone();
        for id in ids {
            out.rewards.remove(id);
        }
        out
    }

    /// Dense reward vector aligned with `graph.nodes()`. Domains outside the
    /// graph are ignored.
    pub fn vector_for(&self, graph: &SourceGraph) -> Vec<f64> {
        graph.nodes().iter().map(|id| self.get(id).value()).collect()
    }
}

impl FromIterator<(SourceId, Reward)> for RewardAssignment {
    fn from_iter<T: IntoIterator<Item = (SourceId, Reward)>>(iter: T) -> Self {
        let mut out = RewardAssignment::default();
        for (id, r) in iter {
            out.set(id, r);
        }
        out
    }
}

pub fn reward_for(label: ReliabilityLabel, policy: RewardPolicy) -> Reward {
    match (label, policy) {
        (ReliabilityLabel::Reliable, _) => Reward::Positive,
        (ReliabilityLabel::Unreliable, _) => Reward::Negative,
        (ReliabilityLabel::Mixed, RewardPolicy::Strict) => Reward::Neutral,
        (ReliabilityLabel::Mixed, RewardPolicy::Merged) => Reward::Negative,
    }
}

pub fn to_rewards(dataset: &LabeledDataset, policy: RewardPolicy) -> RewardAssignment {
    dataset
        .entries
        .iter()
        .map(|(id, e)| (id.clone(), reward_for(e.label, policy)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpsetMode {
    /// Mixed merged into unreliable, as for the smaller legacy dataset.
    A,
    /// Mixed merged into unreliable.
    B,
    /// Mixed dropped.
    BMinus,
}

impl FromStr for ExpsetMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Self::A),
            "b" => Ok(Self::B),
            "b-minus" | "bminus" | "b-" => Ok(Self::BMinus),
            _ => Err(format!("unknown expset {s:?} (a|b|b-minus)")),
        }
    }
}

impl fmt::Display for ExpsetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A => "a",
            Self::B => "b",
            Self::BMinus => "b-minus",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpsetSummary {
    pub mode: ExpsetMode,
    pub reliable: usize,
    pub unreliable: usize,
    pub mixed_relabeled: usize,
    pub mixed_dropped: usize,
    pub outside_graph: usize,
}

/// Binary experiment set: labeled domains present in the graph, with mixed
/// relabeled as unreliable (A, B) or dropped (B-minus).
pub fn build_expset(
    dataset: &LabeledDataset,
    graph: &SourceGraph,
    mode: ExpsetMode,
) -> Result<(LabeledDataset, ExpsetSummary), LabelError> {
    let mut summary = ExpsetSummary {
        mode,
        reliable: 0,
        unreliable: 0,
        mixed_relabeled: 0,
        mixed_dropped: 0,
        outside_graph: 0,
    };
    let mut out = LabeledDataset::new(format!("{}:{mode}", dataset.name));
    for (id, entry) in &dataset.entries {
        if !graph.contains(id) {
            summary.outside_graph += 1;
            continue;
        }
        let label = match (entry.label, mode) {
            (ReliabilityLabel::Mixed, ExpsetMode::BMinus) => {
                summary.mixed_dropped += 1;
                continue;
            }
            (ReliabilityLabel::Mixed, _) => {
                summary.mixed_relabeled += 1;
                ReliabilityLabel::Unreliable
            }
            (label, _) => label,
        };
        match label {
            ReliabilityLabel::Reliable => summary.reliable += 1,
            _ => summary.unreliable += 1,
        }
        out.insert(id.clone(), label, entry.origin.clone());
    }
    if out.is_empty() {
        return Err(LabelError::EmptyExpset);
    }
    Ok((out, summary))
}

/// NewsGuard-style journalist scores, `domain,score` with score in [0, 100].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub scores: BTreeMap<SourceId, f64>,
}

pub fn load_scores<R: Read>(input: R) -> Result<ScoreTable, LabelError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.len() != 2 || !headers[0].eq_ignore_ascii_case("domain") || !headers[1].eq_ignore_ascii_case("score") {
        return Err(LabelError::Header {
            expected: "domain,score",
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut table = ScoreTable::default();
    let mut duplicates = BTreeSet::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let parse_err = |message: String| LabelError::Parse { line, message };
        let id = SourceId::canonicalize(&row[0]).map_err(|e| parse_err(e.to_string()))?;
        let score: f64 = row[1]
            .parse()
            .map_err(|_| parse_err(format!("score {:?} is not a number", &row[1])))?;
        if !(0.0..=100.0).contains(&score) {
            return Err(parse_err(format!("score {score} outside [0, 100]")));
        }
        if table.scores.insert(id.clone(), score).is_some() {
            duplicates.insert(id.to_string());
        }
    }
    if !duplicates.is_empty() {
        return Err(LabelError::Duplicates(duplicates.into_iter().collect()));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> SourceId {
        SourceId::new(s).unwrap()
    }

    #[test]
    fn loads_simple_rows() {
        let ds = load_labels("domain,label\nbbc.co.uk,reliable\nWWW.X.com,MIXED\n".as_bytes(), "t").unwrap();
        assert_eq!(ds.label(&id("bbc.co.uk")), Some(ReliabilityLabel::Reliable));
        assert_eq!(ds.label(&id("x.com")), Some(ReliabilityLabel::Mixed));
        assert_eq!(ds.entries[&id("x.com")].origin, "t");
    }

    #[test]
    fn rejects_unknown_label() {
        let err = load_labels("domain,label\nx.com,bogus\n".as_bytes(), "t").unwrap_err();
        assert!(matches!(err, LabelError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_duplicates_listing_all() {
        let input = "domain,label\na.com,reliable\nb.com,mixed\nwww.a.com,reliable\nb.com,mixed\n";
        match load_labels(input.as_bytes(), "t").unwrap_err() {
            LabelError::Duplicates(d) => assert_eq!(d, vec!["a.com", "b.com"]),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn origin_column() {
        let ds = load_labels("domain,label,origin\na.com,unreliable,fakenews\n".as_bytes(), "t").unwrap();
        assert_eq!(ds.entries[&id("a.com")].origin, "fakenews");
    }

    #[test]
    fn class_tallies_survive_loading() {
        let mut csv = String::from("domain,label\n");
        for i in 0..1630 {
            csv.push_str(&format!("r{i}.com,reliable\n"));
        }
        for i in 0..166 {
            csv.push_str(&format!("u{i}.com,Unreliable\n"));
        }
        let counts = load_labels(csv.as_bytes(), "t").unwrap().class_counts();
        assert_eq!((counts.reliable, counts.mixed, counts.unreliable), (1630, 0, 166));
    }

    #[test]
    fn precedence_resolves_conflicts() {
        let mut mbfc = LabeledDataset::new("mbfc");
        mbfc.insert(id("x.com"), ReliabilityLabel::Mixed, "mbfc");
        mbfc.insert(id("y.com"), ReliabilityLabel::Reliable, "mbfc");
        let mut fake = LabeledDataset::new("fakenews");
        fake.insert(id("x.com"), ReliabilityLabel::Unreliable, "fakenews");

        let (merged, report) = merge_datasets(&[mbfc.clone(), fake.clone()], &["fakenews", "mbfc"], "all");
        assert_eq!(merged.label(&id("x.com")), Some(ReliabilityLabel::Unreliable));
        assert_eq!(merged.len(), 2);
        assert_eq!(report.conflicts, 1);

        let (reversed, _) = merge_datasets(&[fake, mbfc], &["fakenews", "mbfc"], "all");
        assert_eq!(reversed.entries, merged.entries);
    }

    #[test]
    fn merge_is_idempotent() {
        let mut a = LabeledDataset::new("a");
        a.insert(id("x.com"), ReliabilityLabel::Mixed, "mbfc");
        let (m, report) = merge_datasets(&[a.clone(), a.clone()], &DEFAULT_PRECEDENCE, "a");
        assert_eq!(m.entries, a.entries);
        assert_eq!(report.conflicts, 0);
    }

    #[test]
    fn reward_mapping() {
        let mut ds = LabeledDataset::new("t");
        ds.insert(id("r.com"), ReliabilityLabel::Reliable, "t");
        ds.insert(id("m.com"), ReliabilityLabel::Mixed, "t");
        ds.insert(id("u.com"), ReliabilityLabel::Unreliable, "t");
        let strict = to_rewards(&ds, RewardPolicy::Strict);
        assert_eq!(strict.get(&id("r.com")), Reward::Positive);
        assert_eq!(strict.get(&id("m.com")), Reward::Neutral);
        assert_eq!(strict.get(&id("u.com")), Reward::Negative);
        assert_eq!(strict.get(&id("absent.com")), Reward::Neutral);
        let merged = to_rewards(&ds, RewardPolicy::Merged);
        assert_eq!(merged.get(&id("m.com")), Reward::Negative);
        assert_eq!(merged.count(Reward::Positive), 1);
    }

    #[test]
    fn expsets() {
        let graph = SourceGraph::default()
            .with_links(id("r.com"), id("m.com"), 1)
            .unwrap()
            .with_links(id("m.com"), id("u.com"), 1)
            .unwrap()
            .normalized();
        let mut ds = LabeledDataset::new("t");
        ds.insert(id("r.com"), ReliabilityLabel::Reliable, "t");
        ds.insert(id("m.com"), ReliabilityLabel::Mixed, "t");
        ds.insert(id("u.com"), ReliabilityLabel::Unreliable, "t");
        ds.insert(id("gone.com"), ReliabilityLabel::Reliable, "t");

        let (b, sb) = build_expset(&ds, &graph, ExpsetMode::B).unwrap();
        assert_eq!((sb.reliable, sb.unreliable, sb.outside_graph), (1, 2, 1));
        assert_eq!(b.label(&id("m.com")), Some(ReliabilityLabel::Unreliable));

        let (bm, sbm) = build_expset(&ds, &graph, ExpsetMode::BMinus).unwrap();
        assert_eq!((sbm.reliable, sbm.unreliable, sbm.mixed_dropped), (1, 1, 1));
        assert!(bm.label(&id("m.com")).is_none());
        assert_eq!(sbm.unreliable + sbm.mixed_dropped, sb.unreliable);

        let mut only_mixed = LabeledDataset::new("m");
        only_mixed.insert(id("m.com"), ReliabilityLabel::Mixed, "m");
        assert!(matches!(
            build_expset(&only_mixed, &graph, ExpsetMode::BMinus),
            Err(LabelError::EmptyExpset)
        ));
    }

    #[test]
    fn score_table() {
        let t = load_scores("domain,score\nbbc.co.uk,100\nx.com,7.5\n".as_bytes()).unwrap();
        assert_eq!(t.scores[&id("x.com")], 7.5);
        assert!(load_scores("domain,score\nx.com,101\n".as_bytes()).is_err());
        assert!(load_scores("domain,value\nx.com,1\n".as_bytes()).is_err());
    }
}
