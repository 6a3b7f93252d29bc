//! Random instances for tests and benchmarks.
//!
//! Planar globally balanced maps come from medial graphs: a 2-edge-connected
//! plane graph with as many faces as vertices has a 4-regular medial graph
//! whose faces, one per vertex and one per face of the original, alternate in
//! color and come in equal numbers. Random contractions then produce corners
//! of higher degree.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::balance::OrientedMap;
use crate::charge::ChargeGraph;
use crate::ops::edge_contract;
use crate::surface_map::Map;

/// A plane graph as a rotation system under construction.
struct PlaneGraph {
    rots: Vec<Vec<usize>>,
    alpha: Vec<usize>,
}

impl PlaneGraph {
    fn cycle(k: usize) -> Self {
        // edge i joins vertex i to i + 1; darts 2i at i, 2i + 1 at i + 1
        let mut rots = vec![Vec::new(); k];
        let mut alpha = Vec::new();
        for i in 0..k {
            alpha.push(2 * i + 1);
            alpha.push(2 * i);
            rots[i].push(2 * i);
            rots[(i + 1) % k].push(2 * i + 1);
        }
        PlaneGraph { rots, alpha }
    }

    fn map(&self) -> Map {
        Map::from_rotations(&self.rots, self.alpha.clone()).expect("plane graph stays valid")
    }

    fn new_edge(&mut self) -> (usize, usize) {
        let a = self.alpha.len();
        self.alpha.extend([a + 1, a]);
        (a, a + 1)
    }

    /// Inserts `x` into the corner that follows dart `d` at its vertex.
    fn insert_after(&mut self, v: usize, d: usize, x: usize) {
        let r = &mut self.rots[v];
        let i = r.iter().position(|&y| y == d).expect("dart at vertex");
        r.insert(i + 1, x);
    }

    /// Two darts of face `f` at distinct vertices, if the face has two vertices.
    fn pick_corners<R: Rng>(map: &Map, f: usize, rng: &mut R) -> Option<(usize, usize)> {
        let darts = map.face(f);
        for _ in 0..16 {
            let d1 = *darts.choose(rng)?;
            let d2 = *darts.choose(rng)?;
            if map.vertex_of(d1) != map.vertex_of(d2) {
                return Some((d1, d2));
            }
        }
        None
    }

    fn add_chord<R: Rng>(&mut self, rng: &mut R) -> bool {
        let map = self.map();
        let f = rng.gen_range(0..map.face_count());
        let Some((d1, d2)) = Self::pick_corners(&map, f, rng) else { return false };
        let (x, y) = self.new_edge();
        self.insert_after(map.vertex_of(d1), d1, x);
        self.insert_after(map.vertex_of(d2), d2, y);
        true
    }

    fn add_ear<R: Rng>(&mut self, rng: &mut R) -> bool {
        let map = self.map();
        let f = rng.gen_range(0..map.face_count());
        let Some((d1, d2)) = Self::pick_corners(&map, f, rng) else { return false };
        let (x1, y1) = self.new_edge();
        let (x2, y2) = self.new_edge();
        self.insert_after(map.vertex_of(d1), d1, x1);
        self.insert_after(map.vertex_of(d2), d2, x2);
        self.rots.push(vec![y1, y2]);
        true
    }
}

/// Medial map of `g`: one 4-valent vertex per edge of `g`. Dart `x` of `g`
/// gives darts `2x` and `2x + 1`.
pub fn medial(g: &Map) -> Map {
    let n = g.dart_count();
    let mut sigma = vec![0; 2 * n];
    let mut alpha = vec![0; 2 * n];
    for x in 0..n {
        sigma[2 * x] = 2 * x + 1;
        sigma[2 * x + 1] = 2 * g.alpha(x);
        alpha[2 * x] = 2 * g.sigma(x) + 1;
        alpha[2 * g.sigma(x) + 1] = 2 * x;
    }
    Map::new(sigma, alpha).expect("medial of a connected map is a map")
}

/// A random plane graph with `v` vertices and `v` faces, without bridges or loops.
fn random_plane_graph<R: Rng>(v: usize, rng: &mut R) -> Map {
    let k = rng.gen_range(2..=v.max(2));
    let mut g = PlaneGraph::cycle(k);
    // a chord raises faces minus vertices by one; an ear with a new vertex keeps it
    let mut chords = k - 2;
    let mut ears = v.saturating_sub(k);
    while chords + ears > 0 {
        let chord = ears == 0 || (chords > 0 && rng.gen_bool(0.5));
        if chord {
            if g.add_chord(rng) {
                chords -= 1;
            }
        } else if g.add_ear(rng) {
            ears -= 1;
        }
    }
    g.map()
}

/// A random planar globally balanced map of degree `d` (`d ≥ 2`), followed
/// by up to `contractions` random edge contractions and a random color choice.
pub fn random_planar_balanced<R: Rng>(d: usize, contractions: usize, rng: &mut R) -> OrientedMap {
    let g = random_plane_graph(d.max(2), rng);
    let mut om = OrientedMap::from_map(medial(&g)).expect("medial maps are two-colorable");
    for _ in 0..contractions {
        let mut darts: Vec<usize> = (0..om.map.dart_count()).collect();
        darts.shuffle(rng);
        match darts.into_iter().find_map(|x| edge_contract(&om, x).ok()) {
            Some(c) => om = c.map,
            None => break,
        }
    }
    if rng.gen_bool(0.5) {
        om = om.flipped();
    }
    om
}

fn random_rational<R: Rng>(rng: &mut R) -> BigRational {
    let den: i64 = rng.gen_range(1..=12);
    let num: i64 = rng.gen_range(1..=3 * den);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A random feasible charge graph with capacity `capacity` and `interior`
/// interior vertices on each side.
///
/// Interior weights are `capacity` times a combination of random permutation
/// matrices with coefficients summing below one; each interior vertex passes
/// its remaining capacity to one or two terminals.
pub fn random_charge_graph<R: Rng>(interior: usize, capacity: i64, rng: &mut R) -> ChargeGraph {
    let n = interior.max(1);
    let cap = BigRational::from_integer(BigInt::from(capacity));
    let layers = rng.gen_range(1..=3);
    let raw: Vec<BigRational> = (0..layers).map(|_| random_rational(rng)).collect();
    let total: BigRational = raw.iter().fold(BigRational::zero(), |s, x| s + x);
    // scale so the coefficients sum to a random fraction in (0, 1)
    let target = BigRational::new(BigInt::from(rng.gen_range(1..=9)), BigInt::from(10));
    let coeffs: Vec<BigRational> = raw.iter().map(|x| x * &target / &total).collect();
    let mut w = vec![vec![BigRational::zero(); n]; n];
    for c in &coeffs {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(rng);
        for (x, &y) in p.iter().enumerate() {
            w[x][y] += c * &cap;
        }
    }
    let slack = &cap * (BigRational::one() - &target);
    // X = interior 0..n then inputs; Y = interior 0..n then outputs
    let mut g = ChargeGraph::new(n, n, cap);
    for (x, row) in w.iter().enumerate() {
        for (y, weight) in row.iter().enumerate() {
            if !weight.is_zero() {
                g.add_edge(x, y, weight.clone());
            }
        }
    }
    let split = |rng: &mut R| -> Vec<BigRational> {
        if rng.gen_bool(0.5) {
            vec![slack.clone()]
        } else {
            let t = BigRational::new(BigInt::from(rng.gen_range(1..=9)), BigInt::from(10));
            vec![&slack * &t, &slack * (BigRational::one() - t)]
        }
    };
    for y in 0..n {
        for part in split(rng) {
            let input = g.x_count;
            g.x_count += 1;
            g.inputs.insert(input);
            g.add_edge(input, y, part);
        }
    }
    for x in 0..n {
        for part in split(rng) {
            let output = g.y_count;
            g.y_count += 1;
            g.outputs.insert(output);
            g.add_edge(x, output, part);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::is_globally_balanced;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_maps_are_globally_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..50 {
            let d = 2 + i % 4;
            let om = random_planar_balanced(d, i % 3, &mut rng);
            let t = is_globally_balanced(&om.map).unwrap();
            assert_eq!((t.g, t.d), (0, d));
        }
    }

    #[test]
    fn random_charge_graphs_are_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 1..20 {
            let g = random_charge_graph(i % 5 + 1, 7, &mut rng);
            g.check_feasible().unwrap();
            let (a, b) = g.charge_io();
            assert_eq!(a, b);
        }
    }
}
