use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::decomposition::tree::{validate, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf,
    IntroduceVertex(usize),
    /// Edge `(u, v)` with `u < v`.
    IntroduceEdge(usize, usize),
    Forget(usize),
    Join,
}

impl NodeKind {
    fn name(self) -> &'static str {
        match self {
            NodeKind::Leaf => "leaf",
            NodeKind::IntroduceVertex(_) => "introduce-vertex",
            NodeKind::IntroduceEdge(..) => "introduce-edge",
            NodeKind::Forget(_) => "forget",
            NodeKind::Join => "join",
        }
    }

    fn arity(self) -> usize {
        match self {
            NodeKind::Leaf => 0,
            NodeKind::Join => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NodeKind,
    pub children: Vec<usize>,
    /// Sorted.
    pub bag: Vec<usize>,
}

/// A rooted nice tree decomposition. Nodes produced by [`make_nice`] are
/// numbered in post-order, so children always precede their parent and the
/// root is the last node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    nodes: Vec<NiceNode>,
    root: usize,
}

impl NiceTreeDecomposition {
    /// Assembles a decomposition from node kinds and child links, deriving
    /// every bag from the kind chain below it. Structural problems that make
    /// bags underivable (a forget of an absent vertex, a join over differing
    /// bags, cycles) are errors; everything else is left to [`validate_nice`].
    pub fn from_kinds(spec: Vec<(NodeKind, Vec<usize>)>, root: usize) -> Result<Self> {
        let count = spec.len();
        if root >= count {
            return Err(Error::InvalidDecomposition(format!("root {root} out of range")));
        }
        let mut bags: Vec<Option<Vec<usize>>> = vec![None; count];
        let order = post_order_of(root, |t| spec.get(t).map(|s| s.1.as_slice()).unwrap_or(&[]), count)
            .ok_or_else(|| Error::InvalidDecomposition("child links do not form a tree".into()))?;
        for t in order {
            let (kind, children) = &spec[t];
            if children.len() != kind.arity() {
                return Err(Error::InvalidDecomposition(format!(
                    "node {t} ({}) has {} children",
                    kind.name(),
                    children.len()
                )));
            }
            let child_bag = |i: usize| bags[children[i]].clone().expect("post-order");
            let bag = match *kind {
                NodeKind::Leaf => Vec::new(),
                NodeKind::IntroduceVertex(v) => {
                    let mut b = child_bag(0);
                    match b.binary_search(&v) {
                        Ok(_) => {
                            return Err(Error::InvalidDecomposition(format!(
                                "node {t} introduces {v}, already present"
                            )))
                        }
                        Err(p) => b.insert(p, v),
                    }
                    b
                }
                NodeKind::Forget(v) => {
                    let mut b = child_bag(0);
                    match b.binary_search(&v) {
                        Ok(p) => {
                            b.remove(p);
                        }
                        Err(_) => {
                            return Err(Error::InvalidDecomposition(format!(
                                "node {t} forgets absent vertex {v}"
                            )))
                        }
                    }
                    b
                }
                NodeKind::IntroduceEdge(..) => child_bag(0),
                NodeKind::Join => {
                    let (a, b) = (child_bag(0), child_bag(1));
                    if a != b {
                        return Err(Error::InvalidDecomposition(format!(
                            "join node {t} has children with different bags"
                        )));
                    }
                    a
                }
            };
            bags[t] = Some(bag);
        }
        let nodes = spec
            .into_iter()
            .zip(bags)
            .map(|((kind, children), bag)| NiceNode {
                kind,
                children,
                bag: bag.unwrap_or_default(),
            })
            .collect();
        Ok(NiceTreeDecomposition { nodes, root })
    }

    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &NiceNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Node ids with every child before its parent.
    pub fn post_order(&self) -> Vec<usize> {
        post_order_of(self.root, |t| &self.nodes[t].children, self.nodes.len())
            .expect("decomposition is a tree")
    }

    /// One line per node:
    /// `node <id> <kind> <payload> children=[..] bag=[..]`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (id, node) in self.nodes.iter().enumerate() {
            let payload = match node.kind {
                NodeKind::Leaf | NodeKind::Join => "-".to_string(),
                NodeKind::IntroduceVertex(v) | NodeKind::Forget(v) => v.to_string(),
                NodeKind::IntroduceEdge(u, v) => format!("{u},{v}"),
            };
            let _ = writeln!(
                out,
                "node {id} {} {payload} children=[{}] bag=[{}]",
                node.kind.name(),
                join_ids(&node.children),
                join_ids(&node.bag)
            );
        }
        out
    }
}

fn join_ids(ids: &[usize]) -> String {
    ids.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Iterative post-order from `root`; `None` when some node is reached twice
/// or a child id is out of range.
fn post_order_of<'a>(
    root: usize,
    children: impl Fn(usize) -> &'a [usize],
    count: usize,
) -> Option<Vec<usize>> {
    let mut seen = vec![false; count];
    let mut out = Vec::with_capacity(count);
    let mut stack = vec![(root, false)];
    seen[root] = true;
    while let Some((t, expanded)) = stack.pop() {
        if expanded {
            out.push(t);
            continue;
        }
        stack.push((t, true));
        for &c in children(t).iter().rev() {
            if c >= count || std::mem::replace(&mut seen[c], true) {
                return None;
            }
            stack.push((c, false));
        }
    }
    Some(out)
}

/// Where introduce-edge nodes are placed in [`make_nice_with`].
///
/// Both placements keep every join bag independent in the subgraph below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgePlacement {
    /// Directly below the first forget of either endpoint, at the top of the
    /// region where both endpoints share bags.
    #[default]
    Lazy,
    /// As low as possible: right above the node where the second endpoint
    /// enters the shared region, or right above the topmost join whose bag
    /// holds both endpoints.
    Early,
}

/// [`make_nice_with`] using [`EdgePlacement::Lazy`].
pub fn make_nice(g: &Graph, td: &TreeDecomposition) -> Result<NiceTreeDecomposition> {
    make_nice_with(g, td, EdgePlacement::default())
}

/// Converts a valid tree decomposition, rooted at node 0, into a nice one.
/// Nodes with more than two children are joined left-deep.
pub fn make_nice_with(
    g: &Graph,
    td: &TreeDecomposition,
    placement: EdgePlacement,
) -> Result<NiceTreeDecomposition> {
    validate(g, td).map_err(|v| Error::InvalidDecomposition(v.to_string()))?;
    let mut skeleton = Skeleton::default();
    let root = if td.is_empty() {
        skeleton.push(NodeKind::Leaf, vec![], vec![])
    } else {
        skeleton.build(td)
    };
    let parent = skeleton.parents(root);

    let mut above: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &(u, v) in g.edges() {
        let holds = |t: usize| {
            let bag = &skeleton.nodes[t].bag;
            bag.binary_search(&u).is_ok() && bag.binary_search(&v).is_ok()
        };
        let top = (0..skeleton.nodes.len())
            .find(|&t| holds(t) && parent[t].is_none_or(|p| !holds(p)))
            .ok_or_else(|| Error::Internal(format!("no bag holds edge {u}-{v}")))?;
        let target = match placement {
            EdgePlacement::Lazy => top,
            EdgePlacement::Early => {
                let mut x = top;
                loop {
                    let node = &skeleton.nodes[x];
                    if node.kind == NodeKind::Join {
                        break x;
                    }
                    match node.children.first() {
                        Some(&c) if holds(c) => x = c,
                        _ => break x,
                    }
                }
            }
        };
        above.entry(target).or_default().push((u, v));
    }

    // re-emit in post-order, stacking edge nodes above their targets
    let order = post_order_of(root, |t| &skeleton.nodes[t].children, skeleton.nodes.len())
        .expect("skeleton is a tree");
    let mut remap = vec![usize::MAX; skeleton.nodes.len()];
    let mut nodes: Vec<NiceNode> = Vec::new();
    for t in order {
        let node = &skeleton.nodes[t];
        let children = node.children.iter().map(|&c| remap[c]).collect();
        nodes.push(NiceNode {
            kind: node.kind,
            children,
            bag: node.bag.clone(),
        });
        let mut top = nodes.len() - 1;
        for &(u, v) in above.get(&t).map(Vec::as_slice).unwrap_or(&[]) {
            nodes.push(NiceNode {
                kind: NodeKind::IntroduceEdge(u, v),
                children: vec![top],
                bag: node.bag.clone(),
            });
            top = nodes.len() - 1;
        }
        remap[t] = top;
    }
    let root = remap[root];
    Ok(NiceTreeDecomposition { nodes, root })
}

#[derive(Default)]
struct Skeleton {
    nodes: Vec<NiceNode>,
}

impl Skeleton {
    fn push(&mut self, kind: NodeKind, children: Vec<usize>, bag: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, children, bag });
        self.nodes.len() - 1
    }

    /// Forgets `from \ to`, then introduces `to \ from`, both ascending.
    fn adapt(&mut self, mut top: usize, to: &[usize]) -> usize {
        let from = self.nodes[top].bag.clone();
        let mut bag = from.clone();
        for &v in from.iter().filter(|v| to.binary_search(v).is_err()) {
            bag.retain(|&x| x != v);
            top = self.push(NodeKind::Forget(v), vec![top], bag.clone());
        }
        for &v in to.iter().filter(|v| from.binary_search(v).is_err()) {
            let p = bag.binary_search(&v).unwrap_err();
            bag.insert(p, v);
            top = self.push(NodeKind::IntroduceVertex(v), vec![top], bag.clone());
        }
        top
    }

    fn build(&mut self, td: &TreeDecomposition) -> usize {
        // BFS from node 0, then handle nodes children-first
        let count = td.len();
        let mut parent = vec![usize::MAX; count];
        let mut order = vec![0];
        let mut seen = vec![false; count];
        seen[0] = true;
        let mut i = 0;
        while i < order.len() {
            let t = order[i];
            i += 1;
            for &s in td.neighbors(t) {
                if !seen[s] {
                    seen[s] = true;
                    parent[s] = t;
                    order.push(s);
                }
            }
        }
        let mut top = vec![usize::MAX; count];
        for &t in order.iter().rev() {
            let bag = td.bag(t).to_vec();
            let kids: Vec<usize> = td.neighbors(t).iter().copied().filter(|&s| parent[s] == t).collect();
            let mut cur = if kids.is_empty() {
                let leaf = self.push(NodeKind::Leaf, vec![], vec![]);
                self.adapt(leaf, &bag)
            } else {
                self.adapt(top[kids[0]], &bag)
            };
            for &s in kids.iter().skip(1) {
                let other = self.adapt(top[s], &bag);
                cur = self.push(NodeKind::Join, vec![cur, other], bag.clone());
            }
            top[t] = cur;
        }
        self.adapt(top[0], &[])
    }

    fn parents(&self, root: usize) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.nodes.len()];
        for (t, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                parent[c] = Some(t);
            }
        }
        parent[root] = None;
        parent
    }
}

/// The first structural property a [`NiceTreeDecomposition`] fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NiceViolation {
    NotATree,
    RootBagNotEmpty,
    LeafBagNotEmpty(usize),
    WrongArity(usize),
    BagMismatch(usize),
    EdgeOutsideBag(usize),
    UnknownEdge(usize, usize),
    EdgeMultiplicity { edge: (usize, usize), count: usize },
    JoinIndependence { node: usize, edge: (usize, usize) },
    ForgetCount { vertex: usize, count: usize },
    Reappears { vertex: usize, node: usize },
}

impl fmt::Display for NiceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NiceViolation::NotATree => write!(f, "child links do not form a tree"),
            NiceViolation::RootBagNotEmpty => write!(f, "root bag is not empty"),
            NiceViolation::LeafBagNotEmpty(t) => write!(f, "leaf {t} has a non-empty bag"),
            NiceViolation::WrongArity(t) => write!(f, "node {t} has the wrong number of children"),
            NiceViolation::BagMismatch(t) => write!(f, "bag of node {t} does not match its kind"),
            NiceViolation::EdgeOutsideBag(t) => {
                write!(f, "introduce-edge node {t} bag lacks an endpoint")
            }
            NiceViolation::UnknownEdge(u, v) => write!(f, "introduced pair {u}-{v} is not an edge"),
            NiceViolation::EdgeMultiplicity { edge, count } => {
                write!(f, "edge-multiplicity: edge {}-{} introduced {count} times", edge.0, edge.1)
            }
            NiceViolation::JoinIndependence { node, edge } => write!(
                f,
                "join-independence: edge {}-{} introduced below join {node}",
                edge.0, edge.1
            ),
            NiceViolation::ForgetCount { vertex, count } => {
                write!(f, "vertex {vertex} forgotten {count} times")
            }
            NiceViolation::Reappears { vertex, node } => {
                write!(f, "vertex {vertex} reappears in node {node} after being forgotten")
            }
        }
    }
}

/// Checks every nice-decomposition invariant the dynamic programs rely on.
pub fn validate_nice(g: &Graph, ntd: &NiceTreeDecomposition) -> std::result::Result<(), NiceViolation> {
    let nodes = ntd.nodes();
    let count = nodes.len();
    if ntd.root() >= count {
        return Err(NiceViolation::NotATree);
    }
    let order = post_order_of(ntd.root(), |t| &nodes[t].children, count).ok_or(NiceViolation::NotATree)?;
    if order.len() != count {
        return Err(NiceViolation::NotATree);
    }
    if !nodes[ntd.root()].bag.is_empty() {
        return Err(NiceViolation::RootBagNotEmpty);
    }

    let mut introduced: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut forgets = vec![0usize; g.n()];
    for &t in &order {
        let node = &nodes[t];
        if node.children.len() != node.kind.arity() {
            return Err(NiceViolation::WrongArity(t));
        }
        let child = |i: usize| &nodes[node.children[i]].bag;
        let expected: Vec<usize> = match node.kind {
            NodeKind::Leaf => {
                if !node.bag.is_empty() {
                    return Err(NiceViolation::LeafBagNotEmpty(t));
                }
                Vec::new()
            }
            NodeKind::IntroduceVertex(v) => {
                if child(0).contains(&v) {
                    return Err(NiceViolation::BagMismatch(t));
                }
                let mut b = child(0).clone();
                b.push(v);
                b.sort_unstable();
                b
            }
            NodeKind::Forget(v) => {
                if !child(0).contains(&v) || v >= g.n() {
                    return Err(NiceViolation::BagMismatch(t));
                }
                forgets[v] += 1;
                child(0).iter().copied().filter(|&x| x != v).collect()
            }
            NodeKind::IntroduceEdge(u, v) => {
                if node.bag.binary_search(&u).is_err() || node.bag.binary_search(&v).is_err() {
                    return Err(NiceViolation::EdgeOutsideBag(t));
                }
                let key = (u.min(v), u.max(v));
                if !g.has_edge(key.0, key.1) {
                    return Err(NiceViolation::UnknownEdge(key.0, key.1));
                }
                *introduced.entry(key).or_default() += 1;
                child(0).clone()
            }
            NodeKind::Join => {
                if child(0) != child(1) {
                    return Err(NiceViolation::BagMismatch(t));
                }
                child(0).clone()
            }
        };
        if expected != node.bag {
            return Err(NiceViolation::BagMismatch(t));
        }
    }
    for &e in g.edges() {
        let count = introduced.get(&e).copied().unwrap_or(0);
        if count != 1 {
            return Err(NiceViolation::EdgeMultiplicity { edge: e, count });
        }
    }
    if let Some((v, &c)) = forgets.iter().enumerate().find(|(_, &c)| c != 1) {
        return Err(NiceViolation::ForgetCount { vertex: v, count: c });
    }

    // nothing may reappear above its forget
    let mut forgotten_below: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); count];
    for &t in &order {
        let node = &nodes[t];
        let mut set = BTreeSet::new();
        for &c in &node.children {
            set.extend(std::mem::take(&mut forgotten_below[c]));
        }
        if let Some(&v) = node.bag.iter().find(|v| set.contains(v)) {
            return Err(NiceViolation::Reappears { vertex: v, node: t });
        }
        if let NodeKind::Forget(v) = node.kind {
            set.insert(v);
        }
        forgotten_below[t] = set;
    }

    // bottom-up sets of introduced edges, checked at every join
    let mut edges_below: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); count];
    for &t in &order {
        let node = &nodes[t];
        let mut set = BTreeSet::new();
        for &c in &node.children {
            let below = std::mem::take(&mut edges_below[c]);
            if set.is_empty() {
                set = below;
            } else {
                set.extend(below);
            }
        }
        if node.kind == NodeKind::Join {
            if let Some(&e) = set
                .iter()
                .find(|(u, v)| node.bag.binary_search(u).is_ok() && node.bag.binary_search(v).is_ok())
            {
                return Err(NiceViolation::JoinIndependence { node: t, edge: e });
            }
        }
        if let NodeKind::IntroduceEdge(u, v) = node.kind {
            set.insert((u.min(v), u.max(v)));
        }
        edges_below[t] = set;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::tree::min_fill_decomposition;
    use crate::graph::random_graph;

    fn nice(g: &Graph, placement: EdgePlacement) -> NiceTreeDecomposition {
        make_nice_with(g, &min_fill_decomposition(g), placement).unwrap()
    }

    #[test]
    fn single_vertex_chain() {
        let g = Graph::empty(1);
        let ntd = nice(&g, EdgePlacement::Lazy);
        let kinds: Vec<NodeKind> = ntd.nodes().iter().map(|n| n.kind).collect();
        assert_eq!(kinds, vec![NodeKind::Leaf, NodeKind::IntroduceVertex(0), NodeKind::Forget(0)]);
        assert_eq!(ntd.root(), 2);
        assert!(ntd.node(2).bag.is_empty());
    }

    #[test]
    fn single_edge_introduced_once_below_first_forget() {
        let g = Graph::path(2);
        for placement in [EdgePlacement::Lazy, EdgePlacement::Early] {
            let ntd = nice(&g, placement);
            let edge_nodes: Vec<usize> = (0..ntd.len())
                .filter(|&t| matches!(ntd.node(t).kind, NodeKind::IntroduceEdge(0, 1)))
                .collect();
            assert_eq!(edge_nodes.len(), 1);
            let first_forget = (0..ntd.len())
                .find(|&t| matches!(ntd.node(t).kind, NodeKind::Forget(_)))
                .unwrap();
            assert_eq!(ntd.node(first_forget).children, vec![edge_nodes[0]]);
        }
    }

    #[test]
    fn empty_graph_is_a_single_leaf() {
        let g = Graph::empty(0);
        let ntd = make_nice(&g, &min_fill_decomposition(&g)).unwrap();
        assert_eq!(ntd.len(), 1);
        assert_eq!(validate_nice(&g, &ntd), Ok(()));
    }

    #[test]
    fn random_graphs_pass_both_placements() {
        for seed in 0..200u64 {
            let g = random_graph(1 + (seed as usize % 11), 0.4, seed).unwrap();
            let td = min_fill_decomposition(&g);
            for placement in [EdgePlacement::Lazy, EdgePlacement::Early] {
                let ntd = make_nice_with(&g, &td, placement).unwrap();
                assert_eq!(validate_nice(&g, &ntd), Ok(()), "seed {seed} {placement:?}");
                assert_eq!(ntd.width(), td.width());
                let mut labels: Vec<(usize, usize)> = ntd
                    .nodes()
                    .iter()
                    .filter_map(|n| match n.kind {
                        NodeKind::IntroduceEdge(u, v) => Some((u, v)),
                        _ => None,
                    })
                    .collect();
                labels.sort_unstable();
                assert_eq!(labels, g.edges());
            }
        }
    }

    #[test]
    fn rejects_invalid_input_decomposition() {
        let g = Graph::path(2);
        let td = TreeDecomposition::new(vec![vec![0], vec![1]], &[(0, 1)]).unwrap();
        assert!(matches!(make_nice(&g, &td), Err(Error::InvalidDecomposition(_))));
    }

    #[test]
    fn detects_edge_introduced_twice() {
        use NodeKind::*;
        let g = Graph::path(2);
        let ntd = NiceTreeDecomposition::from_kinds(
            vec![
                (Leaf, vec![]),
                (IntroduceVertex(0), vec![0]),
                (IntroduceVertex(1), vec![1]),
                (IntroduceEdge(0, 1), vec![2]),
                (IntroduceEdge(0, 1), vec![3]),
                (Forget(0), vec![4]),
                (Forget(1), vec![5]),
            ],
            6,
        )
        .unwrap();
        assert_eq!(
            validate_nice(&g, &ntd),
            Err(NiceViolation::EdgeMultiplicity { edge: (0, 1), count: 2 })
        );
    }

    #[test]
    fn detects_join_over_introduced_edge() {
        use NodeKind::*;
        let g = Graph::path(2);
        let ntd = NiceTreeDecomposition::from_kinds(
            vec![
                (Leaf, vec![]),
                (IntroduceVertex(0), vec![0]),
                (IntroduceVertex(1), vec![1]),
                (IntroduceEdge(0, 1), vec![2]),
                (Leaf, vec![]),
                (IntroduceVertex(0), vec![4]),
                (IntroduceVertex(1), vec![5]),
                (Join, vec![3, 6]),
                (Forget(0), vec![7]),
                (Forget(1), vec![8]),
            ],
            9,
        )
        .unwrap();
        assert_eq!(
            validate_nice(&g, &ntd),
            Err(NiceViolation::JoinIndependence { node: 7, edge: (0, 1) })
        );
    }

    #[test]
    fn dump_format() {
        let ntd = nice(&Graph::path(2), EdgePlacement::Early);
        let dump = ntd.dump();
        assert!(dump.starts_with("node 0 leaf - children=[] bag=[]\n"));
        assert!(dump.contains("introduce-edge 0,1 children=["));
        assert_eq!(dump.lines().count(), ntd.len());
    }
}
