//! Serializable run records.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dp::{Solution, Stats};
use crate::terrain::Problem;

/// The result of one solver call at a fixed `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub problem: Problem,
    pub n: usize,
    pub k: usize,
    pub decision: bool,
    /// Per-vertex colors of the witness; empty when `decision` is false.
    pub colors: Vec<usize>,
    pub stats: Stats,
}

impl SolveRecord {
    pub fn new(problem: Problem, n: usize, sol: &Solution) -> Self {
        SolveRecord {
            problem,
            n,
            k: sol.k,
            decision: sol.coloring.is_some(),
            colors: sol.coloring.as_ref().map(|c| c.colors().to_vec()).unwrap_or_default(),
            stats: sol.stats,
        }
    }
}

/// Everything one command run produced, in a fixed field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// Hex SHA-256 of the input file bytes, when there is an input.
    pub input_digest: Option<String>,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub decision: Option<bool>,
    pub result: Value,
    pub witness: Option<Vec<usize>>,
    pub stats: Value,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport {
            command: command.into(),
            input_digest: None,
            parameters: Value::Object(Default::default()),
            seed: None,
            decision: None,
            result: Value::Null,
            witness: None,
            stats: Value::Object(Default::default()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// `key: value` lines for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        if let Some(d) = &self.input_digest {
            let _ = writeln!(out, "input: sha256 {d}");
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed: {seed}");
        }
        write_object(&mut out, "", &self.parameters);
        if let Some(d) = self.decision {
            let _ = writeln!(out, "decision: {d}");
        }
        write_object(&mut out, "", &self.result);
        if let Some(w) = &self.witness {
            let _ = writeln!(out, "witness: {}", w.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
        }
        write_object(&mut out, "stats.", &self.stats);
        out
    }
}

fn write_object(out: &mut String, prefix: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) => write_object(out, &format!("{prefix}{k}."), v),
                    Value::String(s) => {
                        let _ = writeln!(out, "{prefix}{k}: {s}");
                    }
                    other => {
                        let _ = writeln!(out, "{prefix}{k}: {other}");
                    }
                }
            }
        }
        Value::Null => {}
        other => {
            let _ = writeln!(out, "{}: {other}", prefix.trim_end_matches('.'));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfc::solve_cfc_with_stats;
    use crate::graph::Graph;
    use serde_json::json;

    #[test]
    fn solve_record_fields() {
        let sol = solve_cfc_with_stats(&Graph::cycle(4), 2).unwrap();
        let rec = SolveRecord::new(Problem::Cfc, 4, &sol);
        let v = serde_json::to_value(&rec).unwrap();
        assert_eq!(v["problem"], "cfc");
        assert_eq!(v["decision"], true);
        assert_eq!(v["colors"].as_array().unwrap().len(), 4);
        for key in ["nodes", "states_evaluated", "millis"] {
            assert!(v["stats"][key].is_u64());
        }
        let back: SolveRecord = serde_json::from_value(v).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn report_round_trips() {
        let mut r = RunReport::new("solve");
        r.input_digest = Some("ab".repeat(32));
        r.parameters = json!({"problem": "scfc", "k": 2});
        r.seed = Some(7);
        r.decision = Some(false);
        r.result = json!({"k": 2, "nested": {"x": [1, 2]}});
        r.witness = Some(vec![0, 1, 2]);
        r.stats = json!({"millis": 3});
        assert_eq!(RunReport::from_json(&r.to_json()).unwrap(), r);
        let text = r.to_text();
        assert!(text.contains("problem: scfc\n"));
        assert!(text.contains("nested.x: [1,2]\n"));
        assert!(text.contains("stats.millis: 3\n"));
        assert!(text.contains("witness: 0 1 2\n"));
    }
}
