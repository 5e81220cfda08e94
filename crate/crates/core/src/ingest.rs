//! Source graph construction from pre-extracted article records.
//!
//! Input is JSON lines, one article per line:
//!
//! ```text
//! {"url": "https://www.nytimes.com/2020/a.html", "links": ["https://cnn.com/x", ...]}
//! ```
//!
//! Every article contributes its hyperlinks to the link list of its domain;
//! each distinct target domain in that list becomes an edge whose count is
//! the number of links pointing at it. Repeated links are counted every time
//! they occur.

use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

use crate::graph::{GraphError, SelfLinks, SourceGraph, SourceId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub url: String,
    #[serde(default)]
    pub links: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DomainError {
    #[error("{0:?} is not an absolute URL")]
    NotAbsolute(String),
    #[error("{0:?} has no host")]
    MissingHost(String),
    #[error("{url:?}: {source}")]
    InvalidHost {
        url: String,
        source: crate::graph::InvalidSourceId,
    },
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("reading article records: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Host of an absolute URL, lowercased, without port, credentials or a
/// leading `www.`.
pub fn extract_domain(url: &str) -> Result<SourceId, DomainError> {
    let parsed = Url::parse(url.trim()).map_err(|_| DomainError::NotAbsolute(url.to_owned()))?;
    let host = parsed
        .host_str()
        .filter(|h| !h.is_empty())
        .ok_or_else(|| DomainError::MissingHost(url.to_owned()))?;
    let host = host.to_lowercase();
    let host = host.trim_end_matches('.');
    let host = host.strip_prefix("www.").unwrap_or(host);
    SourceId::new(host).map_err(|source| DomainError::InvalidHost {
        url: url.to_owned(),
        source,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestConfig {
    pub self_links: SelfLinks,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub articles_read: u64,
    /// Lines that were not valid records or whose own URL had no usable host.
    pub records_skipped: u64,
    pub links_parsed: u64,
    pub links_skipped: u64,
    /// Parsed links whose target is the article's own domain, dropped under
    /// the default self-link policy. Included in `links_parsed`.
    pub self_links_dropped: u64,
    pub distinct_sources: u64,
}

impl IngestStats {
    fn absorb(&mut self, other: &IngestStats) {
        self.articles_read += other.articles_read;
        self.records_skipped += other.records_skipped;
        self.links_parsed += other.links_parsed;
        self.links_skipped += other.links_skipped;
        self.self_links_dropped += other.self_links_dropped;
    }
}

/// Incremental graph builder; feed it records, then call [`finish`](Self::finish).
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    config: IngestConfig,
    graph: SourceGraph,
    stats: IngestStats,
    sources: std::collections::HashSet<SourceId>,
}

impl GraphBuilder {
    pub fn new(config: IngestConfig) -> Self {
        Self {
            config,
            graph: SourceGraph::new(config.self_links),
            stats: IngestStats::default(),
            sources: Default::default(),
        }
    }

    pub fn add_record(&mut self, record: &ArticleRecord) -> Result<(), GraphError> {
        let Ok(src) = extract_domain(&record.url) else {
            self.stats.records_skipped += 1;
            self.stats.links_skipped += record.links.len() as u64;
            return Ok(());
        };
        self.stats.articles_read += 1;
        self.graph.add_node(src.clone());
        self.sources.insert(src.clone());
        for link in &record.links {
            let Ok(dst) = extract_domain(link) else {
                self.stats.links_skipped += 1;
                continue;
            };
            self.stats.links_parsed += 1;
            if dst == src && self.config.self_links == SelfLinks::Drop {
                self.stats.self_links_dropped += 1;
                continue;
            }
            self.graph.add_links(src.clone(), dst, 1)?;
        }
        Ok(())
    }

    /// Parses one JSON line; malformed lines are tallied, not fatal.
    pub fn add_json_line(&mut self, line: &str) -> Result<(), GraphError> {
        if line.trim().is_empty() {
            return Ok(());
        }
        match serde_json::from_str::<ArticleRecord>(line) {
            Ok(record) => self.add_record(&record),
            Err(e) => {
                log::debug!("skipping malformed record: {e}");
                self.stats.records_skipped += 1;
                Ok(())
            }
        }
    }

    pub fn read_jsonl<R: BufRead>(&mut self, input: R) -> Result<(), IngestError> {
        for line in input.lines() {
            self.add_json_line(&line?)?;
        }
        Ok(())
    }

    /// Combines two partial builds over disjoint parts of a stream.
    pub fn absorb(&mut self, other: GraphBuilder) -> Result<(), GraphError> {
        self.graph = SourceGraph::merge([&self.graph, &other.graph])?;
        self.stats.absorb(&other.stats);
        self.sources.extend(other.sources);
        Ok(())
    }

    pub fn finish(self) -> (SourceGraph, IngestStats) {
        let mut stats = self.stats;
        stats.distinct_sources = self.sources.len() as u64;
        (self.graph.normalized(), stats)
    }
}

/// Builds the normalized graph from an in-memory record sequence.
pub fn build_graph<'a, I>(records: I, config: IngestConfig) -> Result<(SourceGraph, IngestStats), GraphError>
where
    I: IntoIterator<Item = &'a ArticleRecord>,
{
    let mut builder = GraphBuilder::new(config);
    for record in records {
        builder.add_record(record)?;
    }
    Ok(builder.finish())
}

/// Builds the normalized graph from a JSON-lines stream.
pub fn build_graph_jsonl<R: BufRead>(
    input: R,
    config: IngestConfig,
) -> Result<(SourceGraph, IngestStats), IngestError> {
    let mut builder = GraphBuilder::new(config);
    builder.read_jsonl(input)?;
    Ok(builder.finish())
}
