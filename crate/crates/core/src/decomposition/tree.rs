use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// An unrooted tree decomposition: one sorted bag per node plus the tree
/// edges between nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    adj: Vec<Vec<usize>>,
}

impl TreeDecomposition {
    /// Builds a decomposition from bags and tree edges. Bags are sorted and
    /// deduplicated; the decomposition axioms are not checked here, see
    /// [`validate`].
    pub fn new(bags: Vec<Vec<usize>>, edges: &[(usize, usize)]) -> Result<Self> {
        let count = bags.len();
        let mut adj = vec![Vec::new(); count];
        for &(a, b) in edges {
            if a >= count || b >= count || a == b {
                return Err(Error::InvalidDecomposition(format!("bad tree edge {a}-{b}")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let bags = bags
            .into_iter()
            .map(|b| b.into_iter().collect::<BTreeSet<_>>().into_iter().collect())
            .collect();
        Ok(TreeDecomposition { bags, adj })
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn bag(&self, node: usize) -> &[usize] {
        &self.bags[node]
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    /// Largest bag size minus one (0 for decompositions without vertices).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// The first decomposition axiom a [`TreeDecomposition`] fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TdViolation {
    NotATree,
    BagVertexOutOfRange { node: usize, vertex: usize },
    VertexCoverage(usize),
    EdgeCoverage(usize, usize),
    Connectivity(usize),
}

impl fmt::Display for TdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdViolation::NotATree => write!(f, "decomposition nodes do not form a tree"),
            TdViolation::BagVertexOutOfRange { node, vertex } => {
                write!(f, "bag of node {node} holds unknown vertex {vertex}")
            }
            TdViolation::VertexCoverage(v) => write!(f, "vertex-coverage: vertex {v} is in no bag"),
            TdViolation::EdgeCoverage(u, v) => write!(f, "edge-coverage: no bag holds edge {u}-{v}"),
            TdViolation::Connectivity(v) => {
                write!(f, "connectivity: bags holding vertex {v} are not connected")
            }
        }
    }
}

/// Checks the tree shape and then the three decomposition axioms, in order.
pub fn validate(g: &Graph, td: &TreeDecomposition) -> std::result::Result<(), TdViolation> {
    let count = td.len();
    if count == 0 {
        return if g.n() == 0 { Ok(()) } else { Err(TdViolation::VertexCoverage(0)) };
    }
    if td.edge_count() != count - 1 || component_size(td, 0, |_| true) != count {
        return Err(TdViolation::NotATree);
    }
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (node, bag) in td.bags().iter().enumerate() {
        for &v in bag {
            if v >= g.n() {
                return Err(TdViolation::BagVertexOutOfRange { node, vertex: v });
            }
            holders[v].push(node);
        }
    }
    if let Some(v) = holders.iter().position(Vec::is_empty) {
        return Err(TdViolation::VertexCoverage(v));
    }
    for &(u, v) in g.edges() {
        let covered = holders[u].iter().any(|&t| td.bag(t).binary_search(&v).is_ok());
        if !covered {
            return Err(TdViolation::EdgeCoverage(u, v));
        }
    }
    for (v, nodes) in holders.iter().enumerate() {
        let reached = component_size(td, nodes[0], |t| td.bag(t).binary_search(&v).is_ok());
        if reached != nodes.len() {
            return Err(TdViolation::Connectivity(v));
        }
    }
    Ok(())
}

fn component_size(td: &TreeDecomposition, start: usize, keep: impl Fn(usize) -> bool) -> usize {
    let mut seen = vec![false; td.len()];
    let mut stack = vec![start];
    seen[start] = true;
    let mut size = 0;
    while let Some(t) = stack.pop() {
        size += 1;
        for &s in td.neighbors(t) {
            if !seen[s] && keep(s) {
                seen[s] = true;
                stack.push(s);
            }
        }
    }
    size
}

/// Min-fill elimination ordering: pick the vertex whose elimination adds the
/// fewest fill edges, then the smallest current degree, then the smallest id.
pub fn min_fill_ordering(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (fill_in(&adj, v), adj[v].len(), v))
            .expect("a vertex remains");
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in nbrs.iter().enumerate() {
            adj[a].remove(&v);
            for &b in &nbrs[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj[v].clear();
        alive[v] = false;
        order.push(v);
    }
    order
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Tree decomposition from an elimination ordering: one bag `{v} ∪ N⁺(v)` per
/// vertex, attached to the bag of the earliest-eliminated vertex of `N⁺(v)`.
/// Bags contained in a neighboring bag are merged away afterwards, and node
/// 0 is the bag of the last eliminated vertex.
pub fn decomposition_from_ordering(g: &Graph, order: &[usize]) -> Result<TreeDecomposition> {
    let n = g.n();
    if order.len() != n || order.iter().collect::<BTreeSet<_>>().len() != n || order.iter().any(|&v| v >= n) {
        return Err(Error::InvalidArgument("elimination ordering is not a permutation".into()));
    }
    if n == 0 {
        return TreeDecomposition::new(vec![Vec::new()], &[]);
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    // node i is the bag of order[n - 1 - i]
    let node_of = |v: usize| n - 1 - pos[v];
    let mut bags = vec![Vec::new(); n];
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for &v in order {
        let later: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in later.iter().enumerate() {
            adj[a].remove(&v);
            for &b in &later[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        let mut bag = later.clone();
        bag.push(v);
        bag.sort_unstable();
        bags[node_of(v)] = bag;
        match later.iter().min_by_key(|&&u| pos[u]) {
            Some(&p) => edges.push((node_of(v), node_of(p))),
            None => roots.push(node_of(v)),
        }
    }
    roots.sort_unstable();
    for pair in roots.windows(2) {
        edges.push((pair[0], pair[1]));
    }
    let td = TreeDecomposition::new(bags, &edges)?;
    Ok(contract_redundant(td))
}

/// Heuristic decomposition via [`min_fill_ordering`].
pub fn min_fill_decomposition(g: &Graph) -> TreeDecomposition {
    decomposition_from_ordering(g, &min_fill_ordering(g)).expect("min-fill yields a permutation")
}

/// Merges every node whose bag is a subset of an adjacent bag into that
/// neighbor, keeping node order otherwise stable.
fn contract_redundant(td: TreeDecomposition) -> TreeDecomposition {
    let count = td.len();
    let bags: Vec<BTreeSet<usize>> = td.bags.iter().map(|b| b.iter().copied().collect()).collect();
    let mut adj: Vec<BTreeSet<usize>> = td.adj.iter().map(|a| a.iter().copied().collect()).collect();
    let mut alive = vec![true; count];
    loop {
        let mut merged = false;
        for a in 0..count {
            if !alive[a] {
                continue;
            }
            let target = adj[a].iter().copied().find(|&b| bags[a].is_subset(&bags[b]));
            if let Some(b) = target {
                let others: Vec<usize> = adj[a].iter().copied().filter(|&x| x != b).collect();
                for x in others {
                    adj[x].remove(&a);
                    adj[x].insert(b);
                    adj[b].insert(x);
                }
                adj[b].remove(&a);
                adj[a].clear();
                alive[a] = false;
                merged = true;
            }
        }
        if !merged {
            break;
        }
    }
    let mut index = vec![usize::MAX; count];
    let mut new_bags = Vec::new();
    for t in (0..count).filter(|&t| alive[t]) {
        index[t] = new_bags.len();
        new_bags.push(bags[t].iter().copied().collect::<Vec<_>>());
    }
    let mut edges = Vec::new();
    for t in (0..count).filter(|&t| alive[t]) {
        for &s in adj[t].iter().filter(|&&s| s > t) {
            edges.push((index[t], index[s]));
        }
    }
    TreeDecomposition::new(new_bags, &edges).expect("contraction keeps a tree")
}

/// Largest graph [`exact_treewidth`] accepts.
pub const EXACT_TREEWIDTH_LIMIT: usize = 15;

/// Exact treewidth by dynamic programming over vertex subsets (the best
/// elimination ordering). `TW(S) = min_v max(TW(S - v), |Q(S - v, v)|)`, where
/// `Q(S, v)` are the vertices outside `S ∪ {v}` reachable from `v` through `S`.
pub fn exact_treewidth(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > EXACT_TREEWIDTH_LIMIT {
        return Err(Error::InstanceTooLarge(format!(
            "exact treewidth supports at most {EXACT_TREEWIDTH_LIMIT} vertices, got {n}"
        )));
    }
    if n == 0 {
        return Ok(0);
    }
    let nbr: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let full = (1u32 << n) - 1;
    let q_size = |s: u32, v: usize| -> u32 {
        let inside = s | (1 << v);
        let mut reached = 1u32 << v;
        let mut frontier = reached;
        while frontier != 0 {
            let mut next = 0;
            let mut f = frontier;
            while f != 0 {
                let w = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= nbr[w];
            }
            let new_inside = next & s & !reached;
            reached |= next & inside;
            frontier = new_inside;
        }
        // neighbors of the reached region that lie outside `inside`
        let mut boundary = 0u32;
        let mut r = reached;
        while r != 0 {
            let w = r.trailing_zeros() as usize;
            r &= r - 1;
            boundary |= nbr[w];
        }
        (boundary & full & !inside).count_ones()
    };
    let mut tw = vec![i32::MAX; 1 << n];
    tw[0] = -1;
    for s in 1..=full {
        let mut best = i32::MAX;
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = s & !(1 << v);
            let cand = tw[rest as usize].max(q_size(rest, v) as i32);
            best = best.min(cand);
        }
        tw[s as usize] = best;
    }
    Ok(tw[full as usize].max(0) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_graph;

    #[test]
    fn min_fill_widths() {
        let td = min_fill_decomposition(&Graph::empty(3));
        assert_eq!(td.width(), 0);
        assert!(validate(&Graph::empty(3), &td).is_ok());
        let tree = Graph::new(6, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]).unwrap();
        assert_eq!(min_fill_decomposition(&tree).width(), 1);
        assert_eq!(min_fill_decomposition(&Graph::complete(4)).width(), 3);
        assert_eq!(min_fill_decomposition(&Graph::cycle(6)).width(), 2);
    }

    #[test]
    fn min_fill_is_valid_on_random_graphs() {
        for seed in 0..200 {
            let g = random_graph(2 + (seed as usize % 12), 0.35, seed).unwrap();
            let td = min_fill_decomposition(&g);
            assert_eq!(validate(&g, &td), Ok(()), "seed {seed}");
        }
    }

    #[test]
    fn validate_reports_each_axiom() {
        let p2 = Graph::path(2);
        let td = TreeDecomposition::new(vec![vec![0], vec![1]], &[(0, 1)]).unwrap();
        assert_eq!(validate(&p2, &td), Err(TdViolation::EdgeCoverage(0, 1)));

        let td = TreeDecomposition::new(vec![vec![0], vec![1], vec![0]], &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(validate(&Graph::empty(2), &td), Err(TdViolation::Connectivity(0)));

        let td = TreeDecomposition::new(vec![vec![0]], &[]).unwrap();
        assert_eq!(validate(&Graph::empty(2), &td), Err(TdViolation::VertexCoverage(1)));

        let td = TreeDecomposition::new(vec![vec![0], vec![1]], &[]).unwrap();
        assert_eq!(validate(&Graph::empty(2), &td), Err(TdViolation::NotATree));
    }

    #[test]
    fn exact_treewidth_examples() {
        assert_eq!(exact_treewidth(&Graph::path(7)).unwrap(), 1);
        assert_eq!(exact_treewidth(&Graph::star(5)).unwrap(), 1);
        assert_eq!(exact_treewidth(&Graph::cycle(5)).unwrap(), 2);
        assert_eq!(exact_treewidth(&Graph::complete(5)).unwrap(), 4);
        assert_eq!(exact_treewidth(&Graph::empty(4)).unwrap(), 0);
        assert!(exact_treewidth(&Graph::empty(16)).is_err());
    }

    #[test]
    fn exact_treewidth_never_exceeds_min_fill() {
        for seed in 0..60 {
            let g = random_graph(4 + (seed as usize % 7), 0.45, seed).unwrap();
            assert!(exact_treewidth(&g).unwrap() <= min_fill_decomposition(&g).width());
        }
    }
}
