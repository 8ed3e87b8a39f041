use serde::{Deserialize, Serialize};

use super::peel::{onion_peeling, upper_hull};
use super::Terrain;
use crate::error::{Error, Result};
use crate::graph::{verify_conflict_free, verify_strong_conflict_free, Coloring, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuardMode {
    Strong,
    ConflictFree,
}

impl GuardMode {
    /// The two colors used by sub-terrains at recursion depth `depth >= 1`.
    pub fn depth_colors(self, depth: usize) -> (usize, usize) {
        match self {
            GuardMode::Strong => (2 * depth - 1, 2 * depth),
            GuardMode::ConflictFree => (depth, depth + 1),
        }
    }

    /// Colors the layered scheme may use on a terrain with `p` layers.
    pub fn budget(self, p: usize) -> usize {
        match self {
            GuardMode::Strong => 2 * p,
            GuardMode::ConflictFree => p + 1,
        }
    }
}

/// Guard colors per terrain vertex; 0 marks a vertex without a guard.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardColoring {
    #[serde(rename = "K")]
    pub k: usize,
    pub colors: Vec<usize>,
}

impl GuardColoring {
    pub fn new(colors: Vec<usize>) -> Self {
        let k = colors.iter().copied().max().unwrap_or(0);
        GuardColoring { k, colors }
    }

    pub fn guards(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.colors.iter().copied().enumerate().filter(|&(_, c)| c != 0)
    }

    pub fn to_coloring(&self) -> Result<Coloring> {
        Coloring::new(self.k.max(1), self.colors.clone())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardStats {
    pub p: usize,
    /// Deepest sub-terrain level visited, starting at 1.
    pub depth: usize,
    pub budget: usize,
    pub depth_exceeded: bool,
    pub over_budget: bool,
    /// Hull vertices the layered pass could not satisfy safely.
    pub stuck: usize,
    /// Vertices satisfied by the final repair pass.
    pub repaired: usize,
    /// Vertices still unsatisfied at the end.
    pub unsatisfied: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardOutcome {
    pub coloring: GuardColoring,
    pub stats: GuardStats,
}

struct Level {
    depth: usize,
    parts: Vec<Vec<usize>>,
}

/// Splits a sub-terrain into the runs strictly between consecutive hull
/// vertices, skipping empty runs.
fn gaps(part: &[usize], hull: &[usize]) -> Vec<Vec<usize>> {
    hull.windows(2)
        .map(|w| part.iter().copied().filter(|&i| w[0] < i && i < w[1]).collect::<Vec<_>>())
        .filter(|g| !g.is_empty())
        .collect()
}

/// Position in `hull` of its highest vertex, leftmost among ties.
fn apex(t: &Terrain, hull: &[usize]) -> usize {
    let mut best = 0;
    for (pos, &v) in hull.iter().enumerate() {
        if t.vertex(v).1 > t.vertex(hull[best]).1 {
            best = pos;
        }
    }
    best
}

fn levels(t: &Terrain, mut visit: impl FnMut(usize, &[usize], &[usize])) -> usize {
    let mut level = Level {
        depth: 1,
        parts: vec![(0..t.len()).collect()],
    };
    let mut deepest = 0;
    while !level.parts.is_empty() {
        deepest = level.depth;
        let mut next = Vec::new();
        for part in &level.parts {
            let hull = upper_hull(t, part);
            visit(level.depth, part, &hull);
            next.extend(gaps(part, &hull));
        }
        level = Level {
            depth: level.depth + 1,
            parts: next,
        };
    }
    deepest
}

/// The recursive layered scheme exactly as drawn: each sub-terrain guards
/// its apex with the first color of its depth pair and sweeps both hull
/// directions, placing a guard of the alternate color at every hull vertex
/// the most recent guard cannot see. The result can violate the verifiers;
/// [`strong_guard`] and [`cf_guard`] are the checked variants.
pub fn layered_guard(t: &Terrain, mode: GuardMode) -> GuardOutcome {
    let vis = t.visibility_matrix();
    let mut colors = vec![0usize; t.len()];
    let depth = levels(t, |d, _, hull| {
        let (a, b) = mode.depth_colors(d);
        let top = apex(t, hull);
        colors[hull[top]] = a;
        let right: Vec<usize> = hull[top + 1..].to_vec();
        let left: Vec<usize> = hull[..top].iter().rev().copied().collect();
        for side in [right, left] {
            let (mut last, mut color) = (hull[top], a);
            for v in side {
                if !vis[last][v] {
                    color = if color == a { b } else { a };
                    colors[v] = color;
                    last = v;
                }
            }
        }
    });
    finish(t, mode, colors, depth, 0, 0)
}

/// Colors seen around every vertex, kept incrementally.
struct Board {
    mode: GuardMode,
    closed: Vec<Vec<usize>>,
    colors: Vec<usize>,
    count: Vec<Vec<u32>>,
    total: Vec<u32>,
    unique: Vec<u32>,
    repeated: Vec<u32>,
}

impl Board {
    fn new(t: &Terrain, mode: GuardMode) -> Self {
        let vis = t.visibility_matrix();
        let n = t.len();
        Board {
            mode,
            closed: (0..n).map(|v| (0..n).filter(|&u| vis[v][u]).collect()).collect(),
            colors: vec![0; n],
            count: vec![Vec::new(); n],
            total: vec![0; n],
            unique: vec![0; n],
            repeated: vec![0; n],
        }
    }

    fn bump(&mut self, u: usize, c: usize, up: bool) {
        let counts = &mut self.count[u];
        if counts.len() <= c {
            counts.resize(c + 1, 0);
        }
        let before = counts[c];
        if up {
            counts[c] += 1;
            self.total[u] += 1;
            match before {
                0 => self.unique[u] += 1,
                1 => {
                    self.unique[u] -= 1;
                    self.repeated[u] += 1;
                }
                _ => {}
            }
        } else {
            counts[c] -= 1;
            self.total[u] -= 1;
            match before {
                1 => self.unique[u] -= 1,
                2 => {
                    self.repeated[u] -= 1;
                    self.unique[u] += 1;
                }
                _ => {}
            }
        }
    }

    fn recolor(&mut self, g: usize, c: usize) {
        let old = self.colors[g];
        for i in 0..self.closed[g].len() {
            let u = self.closed[g][i];
            if old != 0 {
                self.bump(u, old, false);
            }
            if c != 0 {
                self.bump(u, c, true);
            }
        }
        self.colors[g] = c;
    }

    fn satisfied(&self, v: usize) -> bool {
        match self.mode {
            GuardMode::Strong => self.total[v] > 0 && self.repeated[v] == 0,
            GuardMode::ConflictFree => self.unique[v] > 0,
        }
    }

    /// Whether giving `g` color `c` leaves every vertex around `g` free of
    /// conflicts (strong: no repeated color; weak: a unique color whenever
    /// anything is seen).
    fn safe(&mut self, g: usize, c: usize) -> bool {
        let old = self.colors[g];
        self.recolor(g, c);
        let good = self.closed[g].iter().all(|&u| match self.mode {
            GuardMode::Strong => self.repeated[u] == 0,
            GuardMode::ConflictFree => self.total[u] == 0 || self.unique[u] > 0,
        });
        self.recolor(g, old);
        good
    }

    fn place(&mut self, v: usize, prefer: usize, pair: (usize, usize)) -> bool {
        let other = if prefer == pair.0 { pair.1 } else { pair.0 };
        for c in [prefer, other] {
            if self.safe(v, c) {
                self.recolor(v, c);
                return true;
            }
        }
        false
    }
}

fn guard_checked(t: &Terrain, mode: GuardMode) -> GuardOutcome {
    let p = onion_peeling(t).p();
    let budget = mode.budget(p);
    let mut board = Board::new(t, mode);
    let mut stuck = 0;
    let depth = levels(t, |d, _, hull| {
        let (a, b) = mode.depth_colors(d);
        let top = apex(t, hull);
        let peak = hull[top];
        if !board.satisfied(peak) && !board.place(peak, a, (a, b)) {
            stuck += 1;
        }
        let right: Vec<usize> = hull[top + 1..].to_vec();
        let left: Vec<usize> = hull[..top].iter().rev().copied().collect();
        for side in [right, left] {
            let mut color = if board.colors[peak] != 0 { board.colors[peak] } else { a };
            for v in side {
                if board.satisfied(v) {
                    continue;
                }
                let want = if color == a { b } else { a };
                if board.place(v, want, (a, b)) {
                    color = board.colors[v];
                } else {
                    stuck += 1;
                }
            }
        }
    });

    let mut repaired = 0;
    for v in 0..t.len() {
        if board.satisfied(v) {
            continue;
        }
        'search: for i in 0..board.closed[v].len() {
            let g = board.closed[v][i];
            if board.colors[g] != 0 {
                continue;
            }
            for c in 1..=budget {
                if board.safe(g, c) {
                    board.recolor(g, c);
                    if board.satisfied(v) {
                        repaired += 1;
                        break 'search;
                    }
                    board.recolor(g, 0);
                }
            }
        }
    }
    finish(t, mode, board.colors, depth, stuck, repaired)
}

fn finish(t: &Terrain, mode: GuardMode, colors: Vec<usize>, depth: usize, stuck: usize, repaired: usize) -> GuardOutcome {
    let p = onion_peeling(t).p();
    let coloring = GuardColoring::new(colors);
    let graph = t.visibility_graph();
    let closed = |v: usize| graph.neighbors(v).iter().copied().chain(std::iter::once(v));
    let unsatisfied = (0..t.len())
        .filter(|&v| {
            let seen: Vec<usize> = closed(v).map(|u| coloring.colors[u]).filter(|&c| c != 0).collect();
            let once = |c: usize| seen.iter().filter(|&&x| x == c).count() == 1;
            match mode {
                GuardMode::Strong => seen.is_empty() || !seen.iter().all(|&c| once(c)),
                GuardMode::ConflictFree => !seen.iter().any(|&c| once(c)),
            }
        })
        .count();
    let budget = mode.budget(p);
    GuardOutcome {
        stats: GuardStats {
            p,
            depth,
            budget,
            depth_exceeded: depth > p,
            over_budget: coloring.k > budget,
            stuck,
            repaired,
            unsatisfied,
        },
        coloring,
    }
}

/// Layered strong guarding with colors `2d - 1, 2d` at depth `d`. A guard
/// is placed only where a hull vertex is still unsatisfied, and its color
/// is chosen from the depth pair so that no vertex already guarded sees a
/// repeated color. A final pass guards any vertex left over with a safe
/// color within `2p`.
pub fn strong_guard(t: &Terrain) -> GuardOutcome {
    guard_checked(t, GuardMode::Strong)
}

/// Layered conflict-free guarding with colors `d, d + 1` at depth `d`,
/// placed under the same safety rule as [`strong_guard`].
pub fn cf_guard(t: &Terrain) -> GuardOutcome {
    guard_checked(t, GuardMode::ConflictFree)
}

pub fn verify_guarding(t: &Terrain, gc: &GuardColoring, mode: GuardMode) -> Result<Verdict> {
    if gc.colors.len() != t.len() {
        return Err(Error::InvalidArgument(format!(
            "{} guard colors for a terrain of {} vertices",
            gc.colors.len(),
            t.len()
        )));
    }
    let g = t.visibility_graph();
    let coloring = gc.to_coloring()?;
    match mode {
        GuardMode::Strong => verify_strong_conflict_free(&g, &coloring),
        GuardMode::ConflictFree => verify_conflict_free(&g, &coloring),
    }
}

/// Whether any two guards of equal color see disjoint vertex sets.
pub fn same_color_guards_disjoint(t: &Terrain, gc: &GuardColoring) -> bool {
    let vis = t.visibility_matrix();
    let guards: Vec<(usize, usize)> = gc.guards().collect();
    guards.iter().enumerate().all(|(i, &(g1, c1))| {
        guards[i + 1..]
            .iter()
            .filter(|&&(_, c2)| c2 == c1)
            .all(|&(g2, _)| (0..t.len()).all(|v| !(vis[g1][v] && vis[g2][v])))
    })
}
