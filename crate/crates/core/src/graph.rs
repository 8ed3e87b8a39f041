//! Simple undirected graphs with colorings and their verifiers.
//!
//! The verifiers are the ground truth every solver in this crate is checked
//! against. A [`Coloring`] is partial: color `0` means "uncolored", colors
//! `1..=k` are real colors.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Error, Result};

/// Simple undirected graph on vertices `0..n`.
///
/// Edges are stored once, as `(u, v)` with `u < v`, in sorted order. The
/// adjacency lists are sorted and symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and
    /// out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidArgument(format!("duplicate edge {a}-{b}")));
            }
        }
        Ok(Self::from_sorted_edges(n, set.into_iter().collect()))
    }

    fn from_sorted_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_edges(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::from_sorted_edges(n, edges)
    }

    pub fn path(n: usize) -> Self {
        Self::from_sorted_edges(n, (1..n).map(|v| (v - 1, v)).collect())
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle is simple")
    }

    /// Star with center `0` and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_sorted_edges(leaves + 1, (1..=leaves).map(|v| (0, v)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// `{v} ∪ N(v)`, sorted.
    pub fn closed_neighborhood(&self, v: usize) -> Result<Vec<usize>> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        let mut out = self.adj[v].clone();
        let pos = out.binary_search(&v).unwrap_err();
        out.insert(pos, v);
        Ok(out)
    }

    /// Applies a vertex permutation: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::InvalidArgument("permutation length differs from n".into()));
        }
        Graph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    /// Parses the line-oriented text format: a header `p <n> <m>` followed by
    /// exactly `m` lines `e <u> <v>` with 1-based vertex ids. Blank lines are
    /// skipped; anything else is an error.
    pub fn parse(text: &str) -> Result<Graph> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match (fields[0], header) {
                ("p", None) => {
                    if fields.len() != 3 {
                        return Err(parse_err(line_no, "expected `p <n> <m>`"));
                    }
                    header = Some((num(fields[1], line_no)?, num(fields[2], line_no)?));
                }
                ("p", Some(_)) => return Err(parse_err(line_no, "duplicate `p` line")),
                ("e", Some((n, _))) => {
                    if fields.len() != 3 {
                        return Err(parse_err(line_no, "expected `e <u> <v>`"));
                    }
                    let u = num(fields[1], line_no)?;
                    let v = num(fields[2], line_no)?;
                    if u == 0 || v == 0 || u > n || v > n {
                        return Err(parse_err(line_no, format!("vertex id out of range 1..={n}")));
                    }
                    edges.push((u - 1, v - 1));
                }
                ("e", None) => return Err(parse_err(line_no, "edge before `p` line")),
                (other, _) => return Err(parse_err(line_no, format!("unknown line type `{other}`"))),
            }
        }
        let (n, m) = header.ok_or_else(|| parse_err(0, "missing `p` line"))?;
        if edges.len() != m {
            return Err(parse_err(0, format!("header announces {m} edges, found {}", edges.len())));
        }
        Graph::new(n, edges).map_err(|e| parse_err(0, e.to_string()))
    }

    /// Writes the text format with edges in sorted order and LF line endings.
    pub fn to_text(&self) -> String {
        let mut out = format!("p {} {}\n", self.n, self.m());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "e {} {}", u + 1, v + 1);
        }
        out
    }

    /// Graphviz source with vertices named by their 0-based ids.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.n {
            let _ = writeln!(out, "  {v};");
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

fn num(s: &str, line: usize) -> Result<usize> {
    s.parse()
        .map_err(|_| parse_err(line, format!("`{s}` is not a non-negative integer")))
}

/// Erdős–Rényi graph `G(n, p)`, deterministic for a fixed seed.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_sorted_edges(n, edges))
}

/// A uniformly seeded random tree: vertex `v > 0` hangs off a random
/// earlier vertex.
pub fn random_tree(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (1..n).map(|v| (rng.gen_range(0..v), v));
    Graph::new(n, edges).expect("tree edges are distinct")
}

/// A random graph of treewidth at most `w`: a `w`-tree grown by attaching
/// each new vertex to a random `w`-clique, keeping each edge with
/// probability `keep`.
pub fn random_partial_ktree(n: usize, w: usize, keep: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&keep) {
        return Err(Error::InvalidArgument(format!("keep probability {keep} outside [0, 1]")));
    }
    if w == 0 {
        return Ok(Graph::empty(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = n.min(w + 1);
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let mut edges = BTreeSet::new();
    for u in 0..base {
        for v in u + 1..base {
            edges.insert((u, v));
        }
    }
    if base == w + 1 {
        for skip in 0..base {
            cliques.push((0..base).filter(|&x| x != skip).collect());
        }
    }
    for v in base..n {
        let clique = cliques[rng.gen_range(0..cliques.len())].clone();
        for &u in &clique {
            edges.insert((u, v));
        }
        for skip in 0..clique.len() {
            let mut next: Vec<usize> = clique.iter().copied().filter(|&x| x != clique[skip]).collect();
            next.push(v);
            cliques.push(next);
        }
    }
    let kept: Vec<(usize, usize)> = edges.into_iter().filter(|_| rng.gen_bool(keep)).collect();
    Ok(Graph::from_sorted_edges(n, kept))
}

/// A partial coloring: `colors[v] == 0` leaves `v` uncolored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    k: usize,
    colors: Vec<usize>,
}

impl Coloring {
    pub fn new(k: usize, colors: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("a coloring needs k >= 1".into()));
        }
        if let Some((v, &c)) = colors.iter().enumerate().find(|(_, &c)| c > k) {
            return Err(Error::InvalidArgument(format!("vertex {v} has color {c} > k = {k}")));
        }
        Ok(Coloring { k, colors })
    }

    pub fn uncolored(k: usize, n: usize) -> Result<Self> {
        Self::new(k, vec![0; n])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Number of distinct nonzero colors that actually occur.
    pub fn distinct_colors(&self) -> usize {
        self.colors
            .iter()
            .filter(|&&c| c != 0)
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn into_colors(self) -> Vec<usize> {
        self.colors
    }
}

/// Outcome of a verifier. `Violation` carries the smallest offending vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Violation(usize),
}

impl Verdict {
    pub fn is_ok(self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

fn check_shape(g: &Graph, col: &Coloring) -> Result<()> {
    if col.len() != g.n() {
        return Err(Error::InvalidArgument(format!(
            "coloring has {} entries, graph has {} vertices",
            col.len(),
            g.n()
        )));
    }
    Ok(())
}

/// Every closed neighborhood contains a nonzero color that occurs exactly
/// once in it.
pub fn verify_conflict_free(g: &Graph, col: &Coloring) -> Result<Verdict> {
    check_shape(g, col)?;
    let mut count = vec![0usize; col.k() + 1];
    for v in 0..g.n() {
        let nbhd = std::iter::once(v).chain(g.neighbors(v).iter().copied());
        for u in nbhd.clone() {
            count[col.color(u)] += 1;
        }
        let unique = nbhd.clone().any(|u| col.color(u) != 0 && count[col.color(u)] == 1);
        for u in nbhd {
            count[col.color(u)] = 0;
        }
        if !unique {
            return Ok(Verdict::Violation(v));
        }
    }
    Ok(Verdict::Ok)
}

/// Every closed neighborhood contains at least one colored vertex, and its
/// colored vertices carry pairwise distinct colors.
pub fn verify_strong_conflict_free(g: &Graph, col: &Coloring) -> Result<Verdict> {
    check_shape(g, col)?;
    let mut seen = vec![false; col.k() + 1];
    for v in 0..g.n() {
        let nbhd = std::iter::once(v).chain(g.neighbors(v).iter().copied());
        let mut ok = true;
        let mut any = false;
        for u in nbhd.clone() {
            let c = col.color(u);
            if c == 0 {
                continue;
            }
            any = true;
            if std::mem::replace(&mut seen[c], true) {
                ok = false;
            }
        }
        for u in nbhd {
            seen[col.color(u)] = false;
        }
        if !(ok && any) {
            return Ok(Verdict::Violation(v));
        }
    }
    Ok(Verdict::Ok)
}

/// Degeneracy and the elimination order that witnesses it: repeatedly remove
/// a vertex of minimum remaining degree, smallest id on ties.
pub fn degeneracy(g: &Graph) -> (usize, Vec<usize>) {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut d = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (deg[v], v))
            .expect("a vertex remains");
        d = d.max(deg[v]);
        removed[v] = true;
        order.push(v);
        for &u in g.neighbors(v) {
            if !removed[u] {
                deg[u] -= 1;
            }
        }
    }
    (d, order)
}

/// Proper coloring of every vertex along the reverse degeneracy order. Uses
/// at most `degeneracy + 1` colors, and being proper it is both conflict-free
/// and strong conflict-free.
pub fn greedy_color_bound(g: &Graph) -> Coloring {
    let (d, order) = degeneracy(g);
    let mut colors = vec![0usize; g.n()];
    let mut taken = vec![false; d + 2];
    for &v in order.iter().rev() {
        for &u in g.neighbors(v) {
            taken[colors[u]] = true;
        }
        colors[v] = (1..).find(|&c| !taken[c]).expect("a free color exists");
        for &u in g.neighbors(v) {
            taken[colors[u]] = false;
        }
    }
    Coloring::new(d + 1, colors).expect("greedy stays within d + 1 colors")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(k: usize, c: &[usize]) -> Coloring {
        Coloring::new(k, c.to_vec()).unwrap()
    }

    #[test]
    fn closed_neighborhoods() {
        assert_eq!(Graph::empty(3).closed_neighborhood(1).unwrap(), vec![1]);
        assert_eq!(Graph::star(3).closed_neighborhood(0).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(Graph::path(3).closed_neighborhood(1).unwrap(), vec![0, 1, 2]);
        assert!(matches!(
            Graph::path(3).closed_neighborhood(3),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        ));
    }

    #[test]
    fn rejects_non_simple_input() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
    }

    #[test]
    fn conflict_free_examples() {
        assert_eq!(verify_conflict_free(&Graph::empty(1), &col(1, &[1])).unwrap(), Verdict::Ok);
        assert_eq!(
            verify_conflict_free(&Graph::path(4), &col(1, &[1, 0, 0, 1])).unwrap(),
            Verdict::Ok
        );
        assert_eq!(
            verify_conflict_free(&Graph::cycle(4), &col(1, &[1, 0, 1, 0])).unwrap(),
            Verdict::Violation(1)
        );
    }

    #[test]
    fn strong_examples() {
        assert_eq!(
            verify_strong_conflict_free(&Graph::complete(3), &col(1, &[1, 0, 0])).unwrap(),
            Verdict::Ok
        );
        assert_eq!(
            verify_strong_conflict_free(&Graph::cycle(4), &col(2, &[1, 0, 2, 0])).unwrap(),
            Verdict::Ok
        );
        assert_eq!(
            verify_strong_conflict_free(&Graph::cycle(4), &col(1, &[1, 0, 1, 0])).unwrap(),
            Verdict::Violation(1)
        );
    }

    #[test]
    fn verifier_rejects_wrong_length() {
        assert!(verify_conflict_free(&Graph::path(3), &col(1, &[1])).is_err());
    }

    #[test]
    fn degeneracy_examples() {
        assert_eq!(degeneracy(&Graph::empty(4)).0, 0);
        assert_eq!(degeneracy(&Graph::path(5)).0, 1);
        assert_eq!(degeneracy(&Graph::star(4)).0, 1);
        assert_eq!(degeneracy(&Graph::cycle(5)).0, 2);
        assert_eq!(degeneracy(&Graph::complete(5)).0, 4);
        // ties go to the smallest id
        assert_eq!(degeneracy(&Graph::empty(3)).1, vec![0, 1, 2]);
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(greedy_color_bound(&Graph::empty(1)).distinct_colors(), 1);
        let p3 = greedy_color_bound(&Graph::path(3));
        assert!(p3.distinct_colors() <= 2);
        let c5 = Graph::cycle(5);
        let g = greedy_color_bound(&c5);
        assert!(g.distinct_colors() <= 3);
        for &(u, v) in c5.edges() {
            assert_ne!(g.color(u), g.color(v));
        }
    }

    #[test]
    fn random_graph_extremes_and_determinism() {
        assert_eq!(random_graph(5, 0.0, 9).unwrap().m(), 0);
        assert_eq!(random_graph(4, 1.0, 3).unwrap(), Graph::complete(4));
        assert_eq!(random_graph(8, 0.5, 1).unwrap(), random_graph(8, 0.5, 1).unwrap());
        assert!(random_graph(3, 1.5, 0).is_err());
    }

    #[test]
    fn random_trees_and_partial_ktrees() {
        let t = random_tree(30, 4);
        assert_eq!(t.m(), 29);
        assert_eq!(degeneracy(&t).0, 1);
        let full = random_partial_ktree(12, 3, 1.0, 2).unwrap();
        assert_eq!(full.m(), 6 + 3 * 8);
        assert_eq!(degeneracy(&full).0, 3);
        assert!(random_partial_ktree(20, 3, 0.6, 2).unwrap().m() < 6 + 3 * 17);
        assert_eq!(random_partial_ktree(5, 0, 1.0, 1).unwrap().m(), 0);
        assert_eq!(random_partial_ktree(2, 3, 1.0, 1).unwrap(), Graph::complete(2));
    }

    #[test]
    fn dot_output() {
        assert_eq!(Graph::path(2).to_dot(), "graph G {\n  0;\n  1;\n  0 -- 1;\n}\n");
    }

    #[test]
    fn text_format() {
        let g = Graph::cycle(4);
        let text = g.to_text();
        assert_eq!(text, "p 4 4\ne 1 2\ne 1 4\ne 2 3\ne 3 4\n");
        assert_eq!(Graph::parse(&text).unwrap(), g);
        assert!(Graph::parse("p 2 1\ne 1 2\nx 1\n").is_err());
        assert!(Graph::parse("p 2 2\ne 1 2\n").is_err());
        assert!(Graph::parse("e 1 2\n").is_err());
        assert!(Graph::parse("p 2 1\ne 1 3\n").is_err());
    }
}
