use std::collections::BTreeMap;
use std::io::Read;

use super::EvalError;
use crate::estimators::{EstimateError, Prediction, ReliabilityScores};
use crate::graph::SourceId;

/// Reliable only where both inputs say reliable.
pub fn ensemble_vote(
    a: &BTreeMap<SourceId, Prediction>,
    b: &BTreeMap<SourceId, Prediction>,
) -> Result<BTreeMap<SourceId, Prediction>, EvalError> {
    let mismatched =
        a.keys().filter(|k| !b.contains_key(*k)).count() + b.keys().filter(|k| !a.contains_key(*k)).count();
    if mismatched > 0 {
        return Err(EvalError::KeyMismatch(mismatched));
    }
    Ok(a.iter()
        .map(|(id, &pa)| {
            let vote = if pa == Prediction::Reliable && b[id] == Prediction::Reliable {
                Prediction::Reliable
            } else {
                Prediction::Unreliable
            };
            (id.clone(), vote)
        })
        .collect())
}

/// Reads `domain,prediction` rows.
pub fn load_predictions<R: Read>(input: R) -> Result<BTreeMap<SourceId, Prediction>, EvalError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.len() != 2
        || !headers[0].eq_ignore_ascii_case("domain")
        || !headers[1].eq_ignore_ascii_case("prediction")
    {
        return Err(EvalError::Parse {
            line: 1,
            message: format!(
                "expected header domain,prediction, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut out = BTreeMap::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let parse_err = |message: String| EvalError::Parse { line, message };
        let id = SourceId::canonicalize(&row[0]).map_err(|e| parse_err(e.to_string()))?;
        let pred: Prediction = row[1].parse().map_err(parse_err)?;
        if out.insert(id.clone(), pred).is_some() {
            return Err(parse_err(format!("duplicate domain {id}")));
        }
    }
    Ok(out)
}

/// Componentwise mean of two score maps over the same nodes.
pub fn average_strategies(a: &ReliabilityScores, b: &ReliabilityScores) -> Result<ReliabilityScores, EstimateError> {
    a.average(b)
}
