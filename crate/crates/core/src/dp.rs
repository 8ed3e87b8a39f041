//! Bottom-up table fill shared by both coloring programs.
//!
//! A table holds only the states whose entry is true. Each bag vertex is
//! described by a small integer code and a state packs the codes of the
//! sorted bag into a `u128`. A problem supplies its recurrences through
//! [`Rules`]; the engine turns each of them into a forward step from child
//! states to parent states.

use std::time::Instant;

use indexmap::IndexMap;
use rustc_hash::{FxBuildHasher, FxHashMap};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::decomposition::{NiceTreeDecomposition, NodeKind};
use crate::error::{Error, Result};
use crate::graph::{Coloring, Graph};

pub(crate) type Pairs = SmallVec<[(u32, u32); 4]>;

pub(crate) trait Rules {
    fn k(&self) -> usize;
    fn code_count(&self) -> u32;
    fn is_valid(&self, code: u32) -> bool;
    fn color(&self, code: u32) -> usize;
    /// An introduce-vertex node copies its child for this code of `v`.
    fn introduce_ok(&self, code: u32) -> bool;
    /// A forget node may drop a vertex with this code.
    fn forget_ok(&self, code: u32) -> bool;
    /// Child codes `(u, v)` an introduce-edge entry with parent codes
    /// `(u, v)` is the OR of. Empty means false.
    fn edge_children(&self, u: u32, v: u32) -> Pairs;
    /// Every parent code that can yield `code` in [`Rules::edge_children`].
    fn edge_candidates(&self, code: u32) -> SmallVec<[u32; 8]>;
    /// `(code2, parent)` such that children `(code, code2)` form a consistent
    /// pair for `parent`. The relation must be symmetric in the children.
    fn join_partners(&self, code: u32) -> Vec<(u32, u32)>;
    /// Whether a vertex with `code` can still be completed, given the codes
    /// of the bag vertices it will later be joined to by an edge and whether
    /// it also has such pending neighbors outside the bag.
    fn alive(&self, code: u32, pending: &[u32], open: bool) -> bool;
}

/// For each node and bag position: bag positions of neighbors whose edge is
/// not introduced below the node, and whether any such neighbor is outside
/// the bag.
struct Horizon {
    pending: Vec<Vec<SmallVec<[u8; 8]>>>,
    open: Vec<Vec<bool>>,
}

impl Horizon {
    fn new(g: &Graph, ntd: &NiceTreeDecomposition, order: &[usize]) -> Self {
        let count = ntd.len();
        let mut rank = vec![0usize; count];
        for (i, &t) in order.iter().enumerate() {
            rank[t] = i;
        }
        // post-order ranks of a subtree form the interval [first, rank]
        let mut first = vec![0usize; count];
        for &t in order {
            first[t] = ntd.node(t).children.iter().map(|&c| first[c]).min().unwrap_or(rank[t]);
        }
        let mut edge_rank: FxHashMap<(usize, usize), usize> = FxHashMap::default();
        for (node, &r) in ntd.nodes().iter().zip(&rank) {
            if let NodeKind::IntroduceEdge(u, v) = node.kind {
                edge_rank.insert((u.min(v), u.max(v)), r);
            }
        }
        let mut pending = Vec::with_capacity(count);
        let mut open = Vec::with_capacity(count);
        for t in 0..count {
            let bag = &ntd.node(t).bag;
            let below = |u: usize, v: usize| {
                let r = edge_rank[&(u.min(v), u.max(v))];
                first[t] <= r && r <= rank[t]
            };
            let mut node_pending = Vec::with_capacity(bag.len());
            let mut node_open = Vec::with_capacity(bag.len());
            for &v in bag {
                let mut here = SmallVec::new();
                let mut outside = false;
                for &w in g.neighbors(v) {
                    if below(v, w) {
                        continue;
                    }
                    match bag.binary_search(&w) {
                        Ok(pos) => here.push(pos as u8),
                        Err(_) => outside = true,
                    }
                }
                node_pending.push(here);
                node_open.push(outside);
            }
            pending.push(node_pending);
            open.push(node_open);
        }
        Horizon { pending, open }
    }

    fn alive<R: Rules>(&self, rules: &R, p: Packing, t: usize, key: u128) -> bool {
        let mut codes: SmallVec<[u32; 8]> = SmallVec::new();
        (0..self.open[t].len()).all(|i| {
            codes.clear();
            codes.extend(self.pending[t][i].iter().map(|&j| p.get(key, j as usize)));
            rules.alive(p.get(key, i), &codes, self.open[t][i])
        })
    }
}

/// Counters for one solver run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub nodes: usize,
    pub states_evaluated: u64,
    pub millis: u64,
}

/// Decision, witness and counters for one run at a fixed `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub k: usize,
    pub coloring: Option<Coloring>,
    pub stats: Stats,
}

const NONE: u32 = u32::MAX;

type Table = IndexMap<u128, (u32, u32), FxBuildHasher>;

pub(crate) struct Filled {
    tables: Vec<Table>,
    bits: u32,
    pub(crate) stats: Stats,
}

fn shl(x: u128, s: u32) -> u128 {
    if s >= 128 {
        0
    } else {
        x << s
    }
}

fn shr(x: u128, s: u32) -> u128 {
    if s >= 128 {
        0
    } else {
        x >> s
    }
}

fn low_mask(s: u32) -> u128 {
    if s >= 128 {
        u128::MAX
    } else {
        (1u128 << s) - 1
    }
}

#[derive(Clone, Copy)]
struct Packing {
    bits: u32,
}

impl Packing {
    fn get(self, key: u128, pos: usize) -> u32 {
        (shr(key, pos as u32 * self.bits) & low_mask(self.bits)) as u32
    }

    fn set(self, key: u128, pos: usize, code: u32) -> u128 {
        let s = pos as u32 * self.bits;
        (key & !shl(low_mask(self.bits), s)) | shl(code as u128, s)
    }

    fn insert(self, key: u128, pos: usize, code: u32) -> u128 {
        let s = pos as u32 * self.bits;
        let low = key & low_mask(s);
        let high = shr(key, s);
        shl(high, s + self.bits) | shl(code as u128, s) | low
    }

    fn remove(self, key: u128, pos: usize) -> (u128, u32) {
        let s = pos as u32 * self.bits;
        let code = self.get(key, pos);
        let low = key & low_mask(s);
        let high = shr(key, s + self.bits);
        (shl(high, s) | low, code)
    }
}

pub(crate) fn encode(codes: &[u32], bits: u32) -> u128 {
    let p = Packing { bits };
    codes.iter().enumerate().fold(0, |key, (i, &c)| p.set(key, i, c))
}

fn bits_for(count: u32) -> u32 {
    (32 - count.saturating_sub(1).leading_zeros()).max(1)
}

impl Filled {
    pub(crate) fn bits(&self) -> u32 {
        self.bits
    }

    pub(crate) fn contains(&self, node: usize, key: u128) -> bool {
        self.tables[node].contains_key(&key)
    }

    pub(crate) fn table_len(&self, node: usize) -> usize {
        self.tables[node].len()
    }

    pub(crate) fn decided(&self, ntd: &NiceTreeDecomposition) -> bool {
        self.contains(ntd.root(), 0)
    }

    /// Walks the recorded origins down from the root entry; each forget node
    /// fixes the color of the vertex it drops.
    pub(crate) fn extract<R: Rules>(&self, rules: &R, ntd: &NiceTreeDecomposition, n: usize) -> Result<Option<Coloring>> {
        let Some(root_idx) = self.tables[ntd.root()].get_index_of(&0) else {
            return Ok(None);
        };
        let p = Packing { bits: self.bits };
        let mut colors = vec![0usize; n];
        let mut stack = vec![(ntd.root(), root_idx)];
        while let Some((t, idx)) = stack.pop() {
            let node = ntd.node(t);
            let (_, &(a, b)) = self.tables[t]
                .get_index(idx)
                .ok_or_else(|| Error::Internal(format!("dangling origin at node {t}")))?;
            if let NodeKind::Forget(w) = node.kind {
                let child = node.children[0];
                let (&key, _) = self.tables[child].get_index(a as usize).expect("origin in range");
                let pos = ntd.node(child).bag.binary_search(&w).expect("forgotten vertex in child bag");
                colors[w] = rules.color(p.get(key, pos));
            }
            for (i, &c) in node.children.iter().enumerate() {
                stack.push((c, if i == 0 { a } else { b } as usize));
            }
        }
        Coloring::new(rules.k(), colors).map(Some)
    }
}

/// Fills every table bottom-up. With `prune`, states that can no longer be
/// completed are dropped, so tables hold only states that extend to a
/// solution of the whole graph.
pub(crate) fn fill<R: Rules>(rules: &R, g: &Graph, ntd: &NiceTreeDecomposition, prune: bool) -> Result<Filled> {
    let start = Instant::now();
    let bits = bits_for(rules.code_count());
    let widest = ntd.nodes().iter().map(|n| n.bag.len()).max().unwrap_or(0);
    if widest as u32 * bits > 128 {
        return Err(Error::InstanceTooLarge(format!(
            "bags of {widest} vertices with {} codes each do not fit a packed state",
            rules.code_count()
        )));
    }
    let p = Packing { bits };
    let fresh: Vec<u32> = (0..rules.code_count()).filter(|&c| rules.introduce_ok(c)).collect();
    let mut partners: FxHashMap<u32, Vec<(u32, u32)>> = FxHashMap::default();
    let mut tables: Vec<Table> = (0..ntd.len()).map(|_| Table::default()).collect();
    let mut evaluated = 0u64;
    let order = ntd.post_order();
    let horizon = prune.then(|| Horizon::new(g, ntd, &order));
    let keep = |t: usize, key: u128| horizon.as_ref().is_none_or(|h| h.alive(rules, p, t, key));

    for &t in &order {
        let node = ntd.node(t);
        let mut out = Table::default();
        match node.kind {
            NodeKind::Leaf => {
                evaluated += 1;
                out.insert(0, (NONE, NONE));
            }
            NodeKind::IntroduceVertex(v) => {
                let pos = node.bag.binary_search(&v).expect("introduced vertex in bag");
                for (i, &key) in tables[node.children[0]].keys().enumerate() {
                    for &code in &fresh {
                        evaluated += 1;
                        let parent = p.insert(key, pos, code);
                        if keep(t, parent) {
                            out.entry(parent).or_insert((i as u32, NONE));
                        }
                    }
                }
            }
            NodeKind::Forget(w) => {
                let child = node.children[0];
                let pos = ntd.node(child).bag.binary_search(&w).expect("forgotten vertex in child bag");
                for (i, &key) in tables[child].keys().enumerate() {
                    evaluated += 1;
                    let (rest, code) = p.remove(key, pos);
                    if rules.forget_ok(code) {
                        out.entry(rest).or_insert((i as u32, NONE));
                    }
                }
            }
            NodeKind::IntroduceEdge(u, v) => {
                let pu = node.bag.binary_search(&u).expect("edge endpoint in bag");
                let pv = node.bag.binary_search(&v).expect("edge endpoint in bag");
                for (i, &key) in tables[node.children[0]].keys().enumerate() {
                    let (cu, cv) = (p.get(key, pu), p.get(key, pv));
                    for a in rules.edge_candidates(cu) {
                        for b in rules.edge_candidates(cv) {
                            evaluated += 1;
                            if rules.edge_children(a, b).contains(&(cu, cv)) {
                                let parent = p.set(p.set(key, pu, a), pv, b);
                                if keep(t, parent) {
                                    out.entry(parent).or_insert((i as u32, NONE));
                                }
                            }
                        }
                    }
                }
            }
            NodeKind::Join => {
                let (l, r) = (node.children[0], node.children[1]);
                let swap = tables[r].len() < tables[l].len();
                let (small, large) = if swap { (r, l) } else { (l, r) };
                let width = node.bag.len();
                for (i, &key) in tables[small].keys().enumerate() {
                    for pos in 0..width {
                        let code = p.get(key, pos);
                        partners.entry(code).or_insert_with(|| rules.join_partners(code));
                    }
                    let lists: SmallVec<[&[(u32, u32)]; 16]> =
                        (0..width).map(|pos| partners[&p.get(key, pos)].as_slice()).collect();
                    if lists.iter().any(|l| l.is_empty()) {
                        continue;
                    }
                    let mut choice = vec![0usize; width];
                    loop {
                        evaluated += 1;
                        let mut other = 0u128;
                        let mut parent = 0u128;
                        for pos in 0..width {
                            let (c2, pc) = lists[pos][choice[pos]];
                            other = p.set(other, pos, c2);
                            parent = p.set(parent, pos, pc);
                        }
                        if let Some(j) = tables[large].get_index_of(&other) {
                            let origin = if swap { (j as u32, i as u32) } else { (i as u32, j as u32) };
                            if keep(t, parent) {
                                out.entry(parent).or_insert(origin);
                            }
                        }
                        let mut pos = 0;
                        loop {
                            if pos == width {
                                break;
                            }
                            choice[pos] += 1;
                            if choice[pos] < lists[pos].len() {
                                break;
                            }
                            choice[pos] = 0;
                            pos += 1;
                        }
                        if pos == width {
                            break;
                        }
                    }
                }
            }
        }
        tables[t] = out;
    }
    Ok(Filled {
        tables,
        bits,
        stats: Stats {
            nodes: ntd.len(),
            states_evaluated: evaluated,
            millis: start.elapsed().as_millis() as u64,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_round_trips() {
        let p = Packing { bits: 7 };
        let key = encode(&[3, 100, 5], 7);
        assert_eq!((0..3).map(|i| p.get(key, i)).collect::<Vec<_>>(), vec![3, 100, 5]);
        let wider = p.insert(key, 1, 9);
        assert_eq!((0..4).map(|i| p.get(wider, i)).collect::<Vec<_>>(), vec![3, 9, 100, 5]);
        assert_eq!(p.remove(wider, 1), (key, 9));
        let end = p.insert(key, 3, 1);
        assert_eq!(p.remove(end, 3), (key, 1));
    }

    #[test]
    fn packing_uses_full_width() {
        let p = Packing { bits: 64 };
        let key = p.insert(p.insert(0, 0, u32::MAX), 1, 7);
        assert_eq!(p.get(key, 0), u32::MAX);
        assert_eq!(p.get(key, 1), 7);
        assert_eq!(p.remove(key, 0).0, 7);
    }

    #[test]
    fn code_bits() {
        assert_eq!(bits_for(1), 1);
        assert_eq!(bits_for(2), 1);
        assert_eq!(bits_for(3), 2);
        assert_eq!(bits_for(48), 6);
        assert_eq!(bits_for(64), 6);
        assert_eq!(bits_for(65), 7);
    }
}
