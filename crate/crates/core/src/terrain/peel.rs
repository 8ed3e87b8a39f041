use serde::{Deserialize, Serialize};

use super::{cross, Terrain};

/// Upper convex hull of the vertices `indices` (ascending), by a monotone
/// chain scan. Points on a hull edge stay in the hull.
pub fn upper_hull(t: &Terrain, indices: &[usize]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(indices.len());
    for &i in indices {
        while hull.len() >= 2
            && cross(t.vertex(hull[hull.len() - 2]), t.vertex(hull[hull.len() - 1]), t.vertex(i)) > 0
        {
            hull.pop();
        }
        hull.push(i);
    }
    hull
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OnionPeeling {
    /// Layer `i` holds vertex indices in ascending order.
    pub layers: Vec<Vec<usize>>,
}

impl OnionPeeling {
    /// The onion peeling number.
    pub fn p(&self) -> usize {
        self.layers.len()
    }

    /// Layer number (1-based) of every vertex.
    pub fn layer_of(&self, n: usize) -> Vec<usize> {
        let mut out = vec![0; n];
        for (d, layer) in self.layers.iter().enumerate() {
            for &v in layer {
                out[v] = d + 1;
            }
        }
        out
    }
}

pub fn onion_peeling(t: &Terrain) -> OnionPeeling {
    let mut rest: Vec<usize> = (0..t.len()).collect();
    let mut layers = Vec::new();
    while !rest.is_empty() {
        let hull = upper_hull(t, &rest);
        rest.retain(|v| hull.binary_search(v).is_err());
        layers.push(hull);
    }
    OnionPeeling { layers }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::random_terrain;

    #[test]
    fn convex_up_chain_is_one_layer() {
        let t = Terrain::new(vec![(0, 0), (1, 3), (2, 4), (3, 3), (4, 0)]).unwrap();
        assert_eq!(onion_peeling(&t).p(), 1);
    }

    #[test]
    fn valley_vertex_peels_second() {
        let t = Terrain::new(vec![(0, 0), (1, -5), (2, 0)]).unwrap();
        assert_eq!(onion_peeling(&t).layers, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn collinear_points_stay_on_the_layer() {
        let t = Terrain::new(vec![(0, 0), (1, 1), (2, 2), (3, 0)]).unwrap();
        assert_eq!(onion_peeling(&t).layers, vec![vec![0, 1, 2, 3]]);
        let flat = random_terrain(9, 4, 4, 0).unwrap();
        assert_eq!(onion_peeling(&flat).p(), 1);
    }

    #[test]
    fn reference_layers() {
        let land = Terrain::reference();
        let peel = onion_peeling(&land);
        let first: Vec<(i64, i64)> = peel.layers[0].iter().map(|&i| land.vertex(i)).collect();
        assert_eq!(first, vec![(0, 0), (4, 12), (26, 24), (32, 25), (52, 18), (62, 10), (66, 4)]);
        assert_eq!(peel.p(), 4);
    }

    #[test]
    fn layers_partition_and_repeel() {
        for seed in 0..100u64 {
            let t = random_terrain(1 + seed as usize % 40, 0, 30, seed).unwrap();
            let peel = onion_peeling(&t);
            let mut all: Vec<usize> = peel.layers.concat();
            all.sort_unstable();
            assert_eq!(all, (0..t.len()).collect::<Vec<_>>());
            let mut rest: Vec<usize> = (0..t.len()).collect();
            for layer in &peel.layers {
                assert_eq!(layer.first(), rest.first());
                assert_eq!(layer.last(), rest.last());
                assert_eq!(&upper_hull(&t, &rest), layer);
                rest.retain(|v| !layer.contains(v));
            }
        }
    }
}
