use serde::{Deserialize, Serialize};

use super::guard::{GuardColoring, GuardMode};
use super::peel::onion_peeling;
use super::Terrain;
use crate::cfc::solve_cfc_on;
use crate::decomposition::{make_nice, min_fill_decomposition};
use crate::dp::Stats;
use crate::error::{Error, Result};
use crate::scfc::solve_scfc_on;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Cfc,
    Scfc,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Cfc => "cfc",
            Problem::Scfc => "scfc",
        }
    }

    pub fn guard_mode(self) -> GuardMode {
        match self {
            Problem::Cfc => GuardMode::ConflictFree,
            Problem::Scfc => GuardMode::Strong,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub problem: Problem,
    pub k: usize,
    pub coloring: GuardColoring,
    pub p: usize,
    pub width: usize,
    pub budget: usize,
    /// One entry per tried `k`, from 1 up.
    pub runs: Vec<Stats>,
}

/// Smallest number of guard colors for `t` found by the exact dynamic
/// program on its visibility graph, trying `k = 1, 2, …` up to the layered
/// budget (`p + 1` weak, `2p` strong).
pub fn pipeline(t: &Terrain, problem: Problem) -> Result<PipelineResult> {
    let g = t.visibility_graph();
    let p = onion_peeling(t).p();
    let budget = problem.guard_mode().budget(p);
    let td = min_fill_decomposition(&g);
    let width = td.width();
    let ntd = make_nice(&g, &td)?;
    let mut runs = Vec::new();
    for k in 1..=budget {
        let sol = match problem {
            Problem::Cfc => solve_cfc_on(&g, ntd.clone(), k)?,
            Problem::Scfc => solve_scfc_on(&g, ntd.clone(), k)?,
        };
        runs.push(sol.stats);
        if let Some(c) = sol.coloring {
            return Ok(PipelineResult {
                problem,
                k,
                coloring: GuardColoring::new(c.into_colors()),
                p,
                width,
                budget,
                runs,
            });
        }
    }
    Err(Error::Internal(format!(
        "no {} guarding within {budget} colors on a terrain with {p} layers",
        problem.name()
    )))
}
