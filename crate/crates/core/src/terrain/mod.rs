//! 1.5D terrains: visibility, convex layers and chromatic guarding.

mod guard;
mod peel;
mod pipeline;
mod svg;

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Error, Result};
use crate::graph::Graph;

pub use guard::{
    cf_guard, layered_guard, same_color_guards_disjoint, strong_guard, verify_guarding, GuardColoring, GuardMode,
    GuardOutcome, GuardStats,
};
pub use peel::{onion_peeling, upper_hull, OnionPeeling};
pub use pipeline::{pipeline, PipelineResult, Problem};
pub use svg::to_svg;

/// Bound on coordinate magnitude; keeps orientation products inside `i128`.
pub const COORD_LIMIT: i64 = 1 << 47;

static REFERENCE: &str = include_str!("../../fixtures/reference.terrain");

/// An x-monotone chain of integer vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Terrain {
    vertices: Vec<(i64, i64)>,
}

impl Terrain {
    pub fn new(vertices: Vec<(i64, i64)>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidArgument("a terrain needs at least one vertex".into()));
        }
        for (i, &(x, y)) in vertices.iter().enumerate() {
            if x.abs() > COORD_LIMIT || y.abs() > COORD_LIMIT {
                return Err(Error::InvalidArgument(format!("vertex {i} exceeds the coordinate limit")));
            }
            if i > 0 && vertices[i - 1].0 >= x {
                return Err(Error::InvalidArgument(format!("x does not increase at vertex {i}")));
            }
        }
        Ok(Terrain { vertices })
    }

    /// The bundled 21-vertex reference terrain, at four times its
    /// drawing scale so every coordinate is an integer.
    pub fn reference() -> Self {
        Terrain::parse(REFERENCE).expect("bundled fixture parses")
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[(i64, i64)] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> (i64, i64) {
        self.vertices[i]
    }

    /// Index of the vertex at `(x, y)`.
    pub fn index_of(&self, x: i64, y: i64) -> Option<usize> {
        self.vertices.iter().position(|&v| v == (x, y))
    }

    /// One `x y` pair per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let mut coord = |what: &str| -> Result<i64> {
                parts
                    .next()
                    .ok_or_else(|| parse_err(no + 1, format!("missing {what}")))?
                    .parse()
                    .map_err(|_| parse_err(no + 1, format!("bad {what}")))
            };
            let (x, y) = (coord("x")?, coord("y")?);
            if parts.next().is_some() {
                return Err(parse_err(no + 1, "trailing tokens"));
            }
            vertices.push((x, y));
        }
        Terrain::new(vertices).map_err(|e| match e {
            Error::InvalidArgument(m) => parse_err(0, m),
            other => other,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for &(x, y) in &self.vertices {
            let _ = writeln!(out, "{x} {y}");
        }
        out
    }

    fn check(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            Err(Error::VertexOutOfRange { vertex: i, n: self.len() })
        } else {
            Ok(())
        }
    }

    /// Whether the segment between vertices `i` and `j` stays on or above
    /// the chain.
    pub fn sees(&self, i: usize, j: usize) -> Result<bool> {
        self.check(i)?;
        self.check(j)?;
        Ok(self.sees_unchecked(i, j))
    }

    fn sees_unchecked(&self, i: usize, j: usize) -> bool {
        let (a, b) = (i.min(j), i.max(j));
        let (p, q) = (self.vertices[a], self.vertices[b]);
        (a + 1..b).all(|m| cross(p, q, self.vertices[m]) <= 0)
    }

    pub fn visibility_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.len();
        let mut vis = vec![vec![false; n]; n];
        for i in 0..n {
            vis[i][i] = true;
            // sweep right from i keeping the steepest blocking direction
            let mut best: Option<usize> = None;
            for j in i + 1..n {
                let visible = best.is_none_or(|m| cross(self.vertices[i], self.vertices[m], self.vertices[j]) >= 0);
                if visible {
                    vis[i][j] = true;
                    vis[j][i] = true;
                    best = Some(j);
                }
            }
        }
        vis
    }

    pub fn visibility_graph(&self) -> Graph {
        let vis = self.visibility_matrix();
        let n = self.len();
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| vis[i][j]);
        Graph::new(n, edges.collect::<Vec<_>>()).expect("pairs are distinct")
    }
}

/// Twice the signed area of `o a b`; positive when `b` lies left of `o -> a`.
pub fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i128 {
    let (ox, oy) = (o.0 as i128, o.1 as i128);
    (a.0 as i128 - ox) * (b.1 as i128 - oy) - (a.1 as i128 - oy) * (b.0 as i128 - ox)
}

/// `x = 0, 1, …, n-1` with heights drawn uniformly from `y_min..=y_max`.
pub fn random_terrain(n: usize, y_min: i64, y_max: i64, seed: u64) -> Result<Terrain> {
    if y_min > y_max {
        return Err(Error::InvalidArgument(format!("empty height range {y_min}..={y_max}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Terrain::new((0..n as i64).map(|x| (x, rng.gen_range(y_min..=y_max))).collect())
}
