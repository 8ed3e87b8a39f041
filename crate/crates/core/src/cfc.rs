//! Dynamic program for conflict-free coloring with at most `k` colors.
//!
//! Each bag vertex `v` carries its color `c(v)` (0 for uncolored) and the
//! color `γ(v)` that is to appear exactly once in its closed neighborhood.
//! A label records whether that happens already in the subgraph below.

use smallvec::{smallvec, SmallVec};

use crate::decomposition::{make_nice, min_fill_decomposition, validate_nice, NiceTreeDecomposition};
use crate::dp::{self, encode, Filled, Pairs, Rules, Solution};
use crate::error::{Error, Result};
use crate::graph::{degeneracy, Coloring, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CfcLabel {
    /// Colored, and `γ(v)` already appears exactly once around `v`.
    B,
    /// Colored, and `γ(v)` does not appear around `v` yet.
    C,
    /// Uncolored, and `γ(v)` already appears exactly once around `v`.
    W,
    /// Uncolored, and `γ(v)` does not appear around `v` yet.
    R,
}

const LABELS: [CfcLabel; 4] = [CfcLabel::B, CfcLabel::C, CfcLabel::W, CfcLabel::R];

/// One table key: parallel sequences over the sorted bag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CfcState {
    pub color: Vec<usize>,
    pub dominator: Vec<usize>,
    pub label: Vec<CfcLabel>,
}

impl CfcState {
    pub fn empty() -> Self {
        CfcState {
            color: Vec::new(),
            dominator: Vec::new(),
            label: Vec::new(),
        }
    }
}

fn valid_triple(k: usize, c: usize, gamma: usize, f: CfcLabel) -> bool {
    if c > k || gamma == 0 || gamma > k {
        return false;
    }
    match f {
        CfcLabel::B => c != 0,
        CfcLabel::C => c != 0 && c != gamma,
        CfcLabel::W | CfcLabel::R => c == 0,
    }
}

pub fn is_valid_state(bag: &[usize], s: &CfcState, k: usize) -> bool {
    s.color.len() == bag.len()
        && s.dominator.len() == bag.len()
        && s.label.len() == bag.len()
        && (0..bag.len()).all(|i| valid_triple(k, s.color[i], s.dominator[i], s.label[i]))
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct CfcRules {
    k: usize,
}

impl CfcRules {
    fn code(&self, f: CfcLabel, c: usize, gamma: usize) -> u32 {
        (((f as usize * (self.k + 1)) + c) * self.k + (gamma - 1)) as u32
    }

    fn decode(&self, code: u32) -> (CfcLabel, usize, usize) {
        let code = code as usize;
        let gamma = code % self.k + 1;
        let rest = code / self.k;
        (LABELS[rest / (self.k + 1)], rest % (self.k + 1), gamma)
    }

    fn relabel(&self, code: u32, f: CfcLabel) -> u32 {
        let (_, c, gamma) = self.decode(code);
        self.code(f, c, gamma)
    }

    /// Top-down join relation: consistent child pairs for a parent code.
    #[cfg(test)]
    fn join_pairs(&self, parent: u32) -> Vec<(u32, u32)> {
        use CfcLabel::*;
        let (f, c, gamma) = self.decode(parent);
        let pairs: &[(CfcLabel, CfcLabel)] = match f {
            B if c == gamma => &[(B, C), (C, B), (B, B)],
            B => &[(B, C), (C, B)],
            C => &[(C, C)],
            R => &[(R, R)],
            W => &[(W, R), (R, W)],
        };
        pairs
            .iter()
            .filter(|(f1, f2)| valid_triple(self.k, c, gamma, *f1) && valid_triple(self.k, c, gamma, *f2))
            .map(|&(f1, f2)| (self.code(f1, c, gamma), self.code(f2, c, gamma)))
            .collect()
    }
}

impl Rules for CfcRules {
    fn k(&self) -> usize {
        self.k
    }

    fn code_count(&self) -> u32 {
        (4 * (self.k + 1) * self.k) as u32
    }

    fn is_valid(&self, code: u32) -> bool {
        let (f, c, gamma) = self.decode(code);
        valid_triple(self.k, c, gamma, f)
    }

    fn color(&self, code: u32) -> usize {
        self.decode(code).1
    }

    fn introduce_ok(&self, code: u32) -> bool {
        let (f, c, gamma) = self.decode(code);
        self.is_valid(code)
            && match f {
                CfcLabel::C | CfcLabel::R => true,
                CfcLabel::B => c == gamma,
                CfcLabel::W => false,
            }
    }

    fn forget_ok(&self, code: u32) -> bool {
        let (f, ..) = self.decode(code);
        self.is_valid(code) && matches!(f, CfcLabel::B | CfcLabel::W)
    }

    fn edge_children(&self, u: u32, v: u32) -> Pairs {
        let (fu, cu, gu) = self.decode(u);
        let (fv, cv, gv) = self.decode(v);
        if !valid_triple(self.k, cu, gu, fu) || !valid_triple(self.k, cv, gv, fv) {
            return Pairs::new();
        }
        // an endpoint whose dominator color sits on the other endpoint had
        // that domination created by this edge
        let rewrite = |f: CfcLabel, hit: bool| -> Option<CfcLabel> {
            if !hit {
                return Some(f);
            }
            match f {
                CfcLabel::B => Some(CfcLabel::C),
                CfcLabel::W => Some(CfcLabel::R),
                CfcLabel::C | CfcLabel::R => None,
            }
        };
        let (Some(nu), Some(nv)) = (rewrite(fu, cv != 0 && cv == gu), rewrite(fv, cu != 0 && cu == gv)) else {
            return Pairs::new();
        };
        if !valid_triple(self.k, cu, gu, nu) || !valid_triple(self.k, cv, gv, nv) {
            return Pairs::new();
        }
        smallvec![(self.code(nu, cu, gu), self.code(nv, cv, gv))]
    }

    fn edge_candidates(&self, code: u32) -> SmallVec<[u32; 8]> {
        match self.decode(code).0 {
            CfcLabel::C => smallvec![code, self.relabel(code, CfcLabel::B)],
            CfcLabel::R => smallvec![code, self.relabel(code, CfcLabel::W)],
            _ => smallvec![code],
        }
    }

    fn join_partners(&self, code: u32) -> Vec<(u32, u32)> {
        use CfcLabel::*;
        let (f, c, gamma) = self.decode(code);
        let options: &[(CfcLabel, CfcLabel)] = match f {
            B if c == gamma => &[(B, B)],
            B => &[(C, B)],
            C => &[(B, B), (C, C)],
            W => &[(R, W)],
            R => &[(W, W), (R, R)],
        };
        options
            .iter()
            .filter(|(f2, fp)| valid_triple(self.k, c, gamma, *f2) && valid_triple(self.k, c, gamma, *fp))
            .map(|&(f2, fp)| (self.code(f2, c, gamma), self.code(fp, c, gamma)))
            .collect()
    }

    fn alive(&self, code: u32, pending: &[u32], open: bool) -> bool {
        let (f, _, gamma) = self.decode(code);
        let hits = pending.iter().filter(|&&w| self.decode(w).1 == gamma).count();
        match f {
            CfcLabel::B | CfcLabel::W => hits == 0,
            CfcLabel::C | CfcLabel::R => hits == 1 || (hits == 0 && open),
        }
    }
}

/// Filled tables for one decomposition, queryable per node.
pub struct CfcTables {
    rules: CfcRules,
    filled: Filled,
    ntd: NiceTreeDecomposition,
    n: usize,
}

impl CfcTables {
    /// The complete tables: every entry the recurrence makes true.
    pub fn build(g: &Graph, ntd: NiceTreeDecomposition, k: usize) -> Result<Self> {
        Self::fill(g, ntd, k, false)
    }

    /// Tables restricted to states that extend to a solution. Decisions and
    /// witnesses agree with [`CfcTables::build`], at a fraction of the size.
    pub fn build_pruned(g: &Graph, ntd: NiceTreeDecomposition, k: usize) -> Result<Self> {
        Self::fill(g, ntd, k, true)
    }

    fn fill(g: &Graph, ntd: NiceTreeDecomposition, k: usize, prune: bool) -> Result<Self> {
        check_k(k)?;
        validate_nice(g, &ntd).map_err(|v| Error::InvalidDecomposition(v.to_string()))?;
        let rules = CfcRules { k };
        let filled = dp::fill(&rules, g, &ntd, prune)?;
        Ok(CfcTables {
            rules,
            filled,
            ntd,
            n: g.n(),
        })
    }

    pub fn decomposition(&self) -> &NiceTreeDecomposition {
        &self.ntd
    }

    /// The table entry of `node` at `state`; invalid states are false.
    pub fn entry(&self, node: usize, state: &CfcState) -> bool {
        let bag = &self.ntd.node(node).bag;
        if !is_valid_state(bag, state, self.rules.k) {
            return false;
        }
        let codes: Vec<u32> = (0..bag.len())
            .map(|i| self.rules.code(state.label[i], state.color[i], state.dominator[i]))
            .collect();
        self.filled.contains(node, encode(&codes, self.filled.bits()))
    }

    /// Number of true entries at `node`.
    pub fn true_entries(&self, node: usize) -> usize {
        self.filled.table_len(node)
    }

    pub fn decision(&self) -> bool {
        self.filled.decided(&self.ntd)
    }

    pub fn solution(&self) -> Result<Solution> {
        Ok(Solution {
            k: self.rules.k,
            coloring: self.filled.extract(&self.rules, &self.ntd, self.n)?,
            stats: self.filled.stats,
        })
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidArgument("k must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Runs the program on a caller-supplied nice decomposition.
pub fn solve_cfc_on(g: &Graph, ntd: NiceTreeDecomposition, k: usize) -> Result<Solution> {
    CfcTables::build_pruned(g, ntd, k)?.solution()
}

/// Runs the program on a min-fill decomposition of `g`.
pub fn solve_cfc_with_stats(g: &Graph, k: usize) -> Result<Solution> {
    check_k(k)?;
    let ntd = make_nice(g, &min_fill_decomposition(g))?;
    solve_cfc_on(g, ntd, k)
}

/// A conflict-free coloring of `g` with at most `k` colors, if one exists.
pub fn solve_cfc(g: &Graph, k: usize) -> Result<Option<Coloring>> {
    Ok(solve_cfc_with_stats(g, k)?.coloring)
}

/// The smallest `k` admitting a conflict-free coloring, with a witness.
/// The search never goes past `degeneracy(g) + 1`.
pub fn cf_number(g: &Graph) -> Result<Solution> {
    let bound = degeneracy(g).0 + 1;
    let ntd = make_nice(g, &min_fill_decomposition(g))?;
    for k in 1..=bound {
        let sol = solve_cfc_on(g, ntd.clone(), k)?;
        if sol.coloring.is_some() {
            return Ok(sol);
        }
    }
    Err(Error::Internal(format!("no conflict-free coloring with {bound} colors")))
}
