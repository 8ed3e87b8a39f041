//! Dynamic program for strong conflict-free coloring with at most `k`
//! colors.
//!
//! Each bag vertex carries its color and a mark per color describing how
//! that color meets its closed neighborhood: never, once in the subgraph
//! below, or once somewhere not yet introduced.

use smallvec::{smallvec, SmallVec};

use crate::decomposition::{make_nice, min_fill_decomposition, validate_nice, NiceTreeDecomposition};
use crate::dp::{self, encode, Filled, Pairs, Rules, Solution};
use crate::error::{Error, Result};
use crate::graph::{degeneracy, Coloring, Graph};

/// Largest `k` the program accepts; the per-vertex state count grows as `3^k`.
pub const SCFC_MAX_K: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    Absent,
    Present,
    /// Present in the final coloring but not in the subgraph below.
    Promised,
}

const MARKS: [Mark; 3] = [Mark::Absent, Mark::Present, Mark::Promised];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScfcLabel {
    /// Colored.
    B,
    /// Uncolored, with some color already present around it.
    W,
    /// Uncolored, with nothing present around it yet.
    R,
}

const LABELS: [ScfcLabel; 3] = [ScfcLabel::B, ScfcLabel::W, ScfcLabel::R];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScfcState {
    pub color: Vec<usize>,
    /// `marks[i][j]` describes color `j + 1` around bag vertex `i`.
    pub marks: Vec<Vec<Mark>>,
    pub label: Vec<ScfcLabel>,
}

impl ScfcState {
    pub fn empty() -> Self {
        ScfcState {
            color: Vec::new(),
            marks: Vec::new(),
            label: Vec::new(),
        }
    }
}

fn valid_vertex(k: usize, c: usize, marks: &[Mark], f: ScfcLabel) -> bool {
    if c > k || marks.len() != k {
        return false;
    }
    match f {
        ScfcLabel::B => c != 0 && marks[c - 1] == Mark::Present,
        ScfcLabel::R => c == 0 && !marks.contains(&Mark::Present),
        ScfcLabel::W => c == 0 && marks.contains(&Mark::Present),
    }
}

pub fn is_valid_state(bag: &[usize], s: &ScfcState, k: usize) -> bool {
    s.color.len() == bag.len()
        && s.marks.len() == bag.len()
        && s.label.len() == bag.len()
        && (0..bag.len()).all(|i| valid_vertex(k, s.color[i], &s.marks[i], s.label[i]))
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ScfcRules {
    k: usize,
    pow: u32,
}

#[derive(Debug, Clone, Copy)]
struct Vertex {
    f: ScfcLabel,
    c: usize,
    marks: u32,
}

impl ScfcRules {
    fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if k > SCFC_MAX_K {
            return Err(Error::InstanceTooLarge(format!(
                "k = {k} exceeds the strong solver limit of {SCFC_MAX_K}"
            )));
        }
        Ok(ScfcRules {
            k,
            pow: 3u32.pow(k as u32),
        })
    }

    fn code(&self, v: Vertex) -> u32 {
        (v.f as u32 * (self.k as u32 + 1) + v.c as u32) * self.pow + v.marks
    }

    fn decode(&self, code: u32) -> Vertex {
        let marks = code % self.pow;
        let rest = code / self.pow;
        Vertex {
            f: LABELS[(rest / (self.k as u32 + 1)) as usize],
            c: (rest % (self.k as u32 + 1)) as usize,
            marks,
        }
    }

    /// Mark of color `i` (1-based).
    fn mark(&self, marks: u32, i: usize) -> Mark {
        MARKS[(marks / 3u32.pow(i as u32 - 1) % 3) as usize]
    }

    fn with_mark(&self, marks: u32, i: usize, m: Mark) -> u32 {
        let p = 3u32.pow(i as u32 - 1);
        marks - (marks / p % 3) * p + m as u32 * p
    }

    fn mark_vec(&self, marks: u32) -> Vec<Mark> {
        (1..=self.k).map(|i| self.mark(marks, i)).collect()
    }

    fn pack_marks(&self, marks: &[Mark]) -> u32 {
        marks.iter().rev().fold(0, |acc, &m| acc * 3 + m as u32)
    }

    fn vertex_ok(&self, v: Vertex) -> bool {
        valid_vertex(self.k, v.c, &self.mark_vec(v.marks), v.f)
    }

    /// The label the color and marks force.
    fn implied(&self, c: usize, marks: u32) -> ScfcLabel {
        if c != 0 {
            ScfcLabel::B
        } else if (1..=self.k).any(|i| self.mark(marks, i) == Mark::Present) {
            ScfcLabel::W
        } else {
            ScfcLabel::R
        }
    }

    fn relation_ok(parent: ScfcLabel, a: ScfcLabel, b: ScfcLabel) -> bool {
        use ScfcLabel::*;
        matches!((parent, a, b), (B, B, B) | (W, W, R) | (W, R, W) | (W, W, W) | (R, R, R))
    }

    /// Top-down join relation: consistent child pairs for a parent code.
    #[cfg(test)]
    fn join_pairs(&self, parent: u32) -> Vec<(u32, u32)> {
        let p = self.decode(parent);
        if !self.vertex_ok(p) {
            return Vec::new();
        }
        let mut splits: Vec<(u32, u32)> = vec![(0, 0)];
        for i in 1..=self.k {
            let options: &[(Mark, Mark)] = match self.mark(p.marks, i) {
                Mark::Absent => &[(Mark::Absent, Mark::Absent)],
                Mark::Present if p.f == ScfcLabel::B && p.c == i => &[(Mark::Present, Mark::Present)],
                Mark::Present => &[(Mark::Present, Mark::Promised), (Mark::Promised, Mark::Present)],
                Mark::Promised => &[(Mark::Promised, Mark::Promised)],
            };
            splits = splits
                .into_iter()
                .flat_map(|(a, b)| {
                    options
                        .iter()
                        .map(move |&(ma, mb)| (self.with_mark(a, i, ma), self.with_mark(b, i, mb)))
                })
                .collect();
        }
        let mut out = Vec::new();
        for (ma, mb) in splits {
            for fa in LABELS {
                for fb in LABELS {
                    let a = Vertex { f: fa, c: p.c, marks: ma };
                    let b = Vertex { f: fb, c: p.c, marks: mb };
                    if Self::relation_ok(p.f, fa, fb) && self.vertex_ok(a) && self.vertex_ok(b) {
                        out.push((self.code(a), self.code(b)));
                    }
                }
            }
        }
        out
    }
}

impl Rules for ScfcRules {
    fn k(&self) -> usize {
        self.k
    }

    fn code_count(&self) -> u32 {
        3 * (self.k as u32 + 1) * self.pow
    }

    fn is_valid(&self, code: u32) -> bool {
        let v = self.decode(code);
        let ok = self.vertex_ok(v);
        debug_assert!(!ok || v.f == self.implied(v.c, v.marks));
        ok
    }

    fn color(&self, code: u32) -> usize {
        self.decode(code).c
    }

    fn introduce_ok(&self, code: u32) -> bool {
        let v = self.decode(code);
        self.is_valid(code)
            && match v.f {
                ScfcLabel::B => (1..=self.k).all(|i| i == v.c || self.mark(v.marks, i) != Mark::Present),
                ScfcLabel::R => true,
                ScfcLabel::W => false,
            }
    }

    fn forget_ok(&self, code: u32) -> bool {
        let v = self.decode(code);
        self.is_valid(code)
            && v.f != ScfcLabel::R
            && (1..=self.k).all(|i| self.mark(v.marks, i) != Mark::Promised)
    }

    fn edge_children(&self, u: u32, v: u32) -> Pairs {
        let (a, b) = (self.decode(u), self.decode(v));
        if !self.vertex_ok(a) || !self.vertex_ok(b) {
            return Pairs::new();
        }
        let mut out = Pairs::new();
        match (a.f == ScfcLabel::B, b.f == ScfcLabel::B) {
            (false, false) => out.push((u, v)),
            (true, true) => {
                if self.mark(b.marks, a.c) == Mark::Present && self.mark(a.marks, b.c) == Mark::Present {
                    let na = Vertex {
                        marks: self.with_mark(a.marks, b.c, Mark::Promised),
                        ..a
                    };
                    let nb = Vertex {
                        marks: self.with_mark(b.marks, a.c, Mark::Promised),
                        ..b
                    };
                    if self.vertex_ok(na) && self.vertex_ok(nb) {
                        out.push((self.code(na), self.code(nb)));
                    }
                }
            }
            (ab, _) => {
                let (colored, plain) = if ab { (a, b) } else { (b, a) };
                if plain.f == ScfcLabel::W && self.mark(plain.marks, colored.c) == Mark::Present {
                    let marks = self.with_mark(plain.marks, colored.c, Mark::Promised);
                    for f in [ScfcLabel::R, ScfcLabel::W] {
                        let child = Vertex { f, c: 0, marks };
                        if self.vertex_ok(child) {
                            let child = self.code(child);
                            out.push(if ab { (u, child) } else { (child, v) });
                        }
                    }
                }
            }
        }
        out
    }

    fn edge_candidates(&self, code: u32) -> SmallVec<[u32; 8]> {
        let v = self.decode(code);
        let mut out: SmallVec<[u32; 8]> = smallvec![code];
        for i in 1..=self.k {
            if self.mark(v.marks, i) == Mark::Promised {
                let marks = self.with_mark(v.marks, i, Mark::Present);
                out.push(self.code(Vertex {
                    f: self.implied(v.c, marks),
                    c: v.c,
                    marks,
                }));
            }
        }
        out
    }

    fn join_partners(&self, code: u32) -> Vec<(u32, u32)> {
        let v = self.decode(code);
        if !self.vertex_ok(v) {
            return Vec::new();
        }
        // (partner marks, parent marks) per color, expanded as a product
        let mut splits: Vec<(u32, u32)> = vec![(0, 0)];
        for i in 1..=self.k {
            let options: &[(Mark, Mark)] = match self.mark(v.marks, i) {
                Mark::Absent => &[(Mark::Absent, Mark::Absent)],
                Mark::Present if v.f == ScfcLabel::B && v.c == i => &[(Mark::Present, Mark::Present)],
                Mark::Present => &[(Mark::Promised, Mark::Present)],
                Mark::Promised => &[(Mark::Present, Mark::Present), (Mark::Promised, Mark::Promised)],
            };
            splits = splits
                .into_iter()
                .flat_map(|(o, p)| {
                    options
                        .iter()
                        .map(move |&(mo, mp)| (self.with_mark(o, i, mo), self.with_mark(p, i, mp)))
                })
                .collect();
        }
        splits
            .into_iter()
            .filter_map(|(om, pm)| {
                let other = Vertex {
                    f: self.implied(v.c, om),
                    c: v.c,
                    marks: om,
                };
                let parent = Vertex {
                    f: self.implied(v.c, pm),
                    c: v.c,
                    marks: pm,
                };
                (self.vertex_ok(other) && self.vertex_ok(parent) && Self::relation_ok(parent.f, v.f, other.f))
                    .then(|| (self.code(other), self.code(parent)))
            })
            .collect()
    }

    fn alive(&self, code: u32, pending: &[u32], open: bool) -> bool {
        let v = self.decode(code);
        let mut promised = false;
        for i in 1..=self.k {
            let hits = pending.iter().filter(|&&w| self.decode(w).c == i).count();
            let ok = match self.mark(v.marks, i) {
                Mark::Absent | Mark::Present => hits == 0,
                Mark::Promised => {
                    promised = true;
                    hits == 1 || (hits == 0 && open)
                }
            };
            if !ok {
                return false;
            }
        }
        v.f != ScfcLabel::R || promised
    }
}

/// Filled tables for one decomposition, queryable per node.
pub struct ScfcTables {
    rules: ScfcRules,
    filled: Filled,
    ntd: NiceTreeDecomposition,
    n: usize,
}

impl ScfcTables {
    /// The complete tables: every entry the recurrence makes true.
    pub fn build(g: &Graph, ntd: NiceTreeDecomposition, k: usize) -> Result<Self> {
        Self::fill(g, ntd, k, false)
    }

    /// Tables restricted to states that extend to a solution. Decisions and
    /// witnesses agree with [`ScfcTables::build`], at a fraction of the size.
    pub fn build_pruned(g: &Graph, ntd: NiceTreeDecomposition, k: usize) -> Result<Self> {
        Self::fill(g, ntd, k, true)
    }

    fn fill(g: &Graph, ntd: NiceTreeDecomposition, k: usize, prune: bool) -> Result<Self> {
        let rules = ScfcRules::new(k)?;
        validate_nice(g, &ntd).map_err(|v| Error::InvalidDecomposition(v.to_string()))?;
        let filled = dp::fill(&rules, g, &ntd, prune)?;
        Ok(ScfcTables {
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
    pub fn entry(&self, node: usize, state: &ScfcState) -> bool {
        let bag = &self.ntd.node(node).bag;
        if !is_valid_state(bag, state, self.rules.k) {
            return false;
        }
        let codes: Vec<u32> = (0..bag.len())
            .map(|i| {
                self.rules.code(Vertex {
                    f: state.label[i],
                    c: state.color[i],
                    marks: self.rules.pack_marks(&state.marks[i]),
                })
            })
            .collect();
        self.filled.contains(node, encode(&codes, self.filled.bits()))
    }

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

pub fn solve_scfc_on(g: &Graph, ntd: NiceTreeDecomposition, k: usize) -> Result<Solution> {
    ScfcTables::build_pruned(g, ntd, k)?.solution()
}

pub fn solve_scfc_with_stats(g: &Graph, k: usize) -> Result<Solution> {
    ScfcRules::new(k)?;
    let ntd = make_nice(g, &min_fill_decomposition(g))?;
    solve_scfc_on(g, ntd, k)
}

/// A strong conflict-free coloring of `g` with at most `k` colors, if one
/// exists.
pub fn solve_scfc(g: &Graph, k: usize) -> Result<Option<Coloring>> {
    Ok(solve_scfc_with_stats(g, k)?.coloring)
}

/// The smallest `k` admitting a strong conflict-free coloring, searched up
/// to `degeneracy(g) + 1` since a proper coloring is always strong.
pub fn scf_number(g: &Graph) -> Result<Solution> {
    let bound = degeneracy(g).0 + 1;
    let ntd = make_nice(g, &min_fill_decomposition(g))?;
    for k in 1..=bound {
        let sol = solve_scfc_on(g, ntd.clone(), k)?;
        if sol.coloring.is_some() {
            return Ok(sol);
        }
    }
    Err(Error::Internal(format!("no strong conflict-free coloring with {bound} colors")))
}
