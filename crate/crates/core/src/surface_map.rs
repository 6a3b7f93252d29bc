//! Rotation systems for oriented cellular maps.
//!
//! A map on `2E` darts is given by two permutations: `sigma`, the
//! counterclockwise successor of a dart around its vertex, and `alpha`, the
//! fixed-point-free involution pairing the two darts of each edge.
//!
//! Faces are the orbits of `phi(d) = sigma^{-1}(alpha(d))`. With this
//! convention the face of a dart is the face lying on its left, and walking a
//! `phi`-orbit traverses that face counterclockwise.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Validation failures for rotation systems.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum MapError {
    #[error("map has no darts")]
    Empty,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("{which} is not a permutation of the dart set")]
    NotPermutation { which: &'static str },
    #[error("alpha is not an involution at dart {dart}")]
    NotInvolution { dart: usize },
    #[error("alpha fixes dart {dart}")]
    FixedPointInAlpha { dart: usize },
    #[error("sigma and alpha do not act transitively on the darts")]
    Disconnected,
    #[error("vertex_of is not constant exactly on sigma-orbits: {0}")]
    InconsistentVertexMap(String),
    #[error("Euler characteristic {chi} is odd or exceeds 2")]
    OddEulerDefect { chi: i64 },
}

/// An oriented combinatorial map. Immutable once built.
#[derive(Clone, PartialEq, Eq)]
pub struct Map {
    sigma: Vec<usize>,
    sigma_inv: Vec<usize>,
    alpha: Vec<usize>,
    vertex_of: Vec<usize>,
    vertices: Vec<Vec<usize>>,
    face_of: Vec<usize>,
    faces: Vec<Vec<usize>>,
}

impl fmt::Debug for Map {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Map")
            .field("V", &self.vertex_count())
            .field("E", &self.edge_count())
            .field("F", &self.face_count())
            .field("sigma", &self.sigma)
            .field("alpha", &self.alpha)
            .finish()
    }
}

fn check_perm(p: &[usize], which: &'static str) -> Result<(), MapError> {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return Err(MapError::NotPermutation { which });
        }
        seen[x] = true;
    }
    Ok(())
}

fn orbits(n: usize, next: impl Fn(usize) -> usize) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut id = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if id[start] != usize::MAX {
            continue;
        }
        let k = out.len();
        let mut orbit = Vec::new();
        let mut d = start;
        loop {
            id[d] = k;
            orbit.push(d);
            d = next(d);
            if d == start {
                break;
            }
        }
        out.push(orbit);
    }
    (id, out)
}

impl Map {
    /// Builds a map from `sigma` and `alpha`, numbering vertices by their least dart.
    pub fn new(sigma: Vec<usize>, alpha: Vec<usize>) -> Result<Self, MapError> {
        if sigma.len() != alpha.len() {
            return Err(MapError::LengthMismatch(format!(
                "sigma has {} entries, alpha has {}",
                sigma.len(),
                alpha.len()
            )));
        }
        check_perm(&sigma, "sigma")?;
        let (vertex_of, _) = orbits(sigma.len(), |d| sigma[d]);
        Self::build(sigma, alpha, vertex_of)
    }

    /// Builds a map with an explicit vertex assignment, which must agree with the sigma-orbits.
    pub fn with_vertices(
        vertex_count: usize,
        sigma: Vec<usize>,
        alpha: Vec<usize>,
        vertex_of: Vec<usize>,
    ) -> Result<Self, MapError> {
        if sigma.len() != alpha.len() || sigma.len() != vertex_of.len() {
            return Err(MapError::LengthMismatch(format!(
                "sigma {}, alpha {}, vertex_of {}",
                sigma.len(),
                alpha.len(),
                vertex_of.len()
            )));
        }
        check_perm(&sigma, "sigma")?;
        let (orbit_id, orbit_list) = orbits(sigma.len(), |d| sigma[d]);
        if orbit_list.len() != vertex_count {
            return Err(MapError::InconsistentVertexMap(format!(
                "{} sigma-orbits but {} vertices declared",
                orbit_list.len(),
                vertex_count
            )));
        }
        let mut vertex_to_orbit = vec![usize::MAX; vertex_count];
        for d in 0..sigma.len() {
            let v = vertex_of[d];
            if v >= vertex_count {
                return Err(MapError::InconsistentVertexMap(format!("dart {d} has vertex {v}")));
            }
            match vertex_to_orbit[v] {
                x if x == usize::MAX => vertex_to_orbit[v] = orbit_id[d],
                x if x != orbit_id[d] => {
                    return Err(MapError::InconsistentVertexMap(format!(
                        "vertex {v} spans several sigma-orbits"
                    )))
                }
                _ => {}
            }
        }
        for orbit in &orbit_list {
            let v = vertex_of[orbit[0]];
            if orbit.iter().any(|&d| vertex_of[d] != v) {
                return Err(MapError::InconsistentVertexMap(format!(
                    "sigma-orbit of dart {} carries several vertices",
                    orbit[0]
                )));
            }
        }
        Self::build(sigma, alpha, vertex_of)
    }

    fn build(sigma: Vec<usize>, alpha: Vec<usize>, vertex_of: Vec<usize>) -> Result<Self, MapError> {
        let n = sigma.len();
        if n == 0 {
            return Err(MapError::Empty);
        }
        for (d, &a) in alpha.iter().enumerate() {
            if a >= n {
                return Err(MapError::NotPermutation { which: "alpha" });
            }
            if a == d {
                return Err(MapError::FixedPointInAlpha { dart: d });
            }
            if alpha[a] != d {
                return Err(MapError::NotInvolution { dart: d });
            }
        }
        let mut sigma_inv = vec![0; n];
        for (d, &s) in sigma.iter().enumerate() {
            sigma_inv[s] = d;
        }
        // transitivity
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(d) = queue.pop_front() {
            for e in [sigma[d], alpha[d]] {
                if !seen[e] {
                    seen[e] = true;
                    count += 1;
                    queue.push_back(e);
                }
            }
        }
        if count != n {
            return Err(MapError::Disconnected);
        }
        let vertex_count = vertex_of.iter().max().map_or(0, |&m| m + 1);
        let mut vertices = vec![Vec::new(); vertex_count];
        for v_darts in orbits(n, |d| sigma[d]).1 {
            // start each rotation at its least dart
            let v = vertex_of[v_darts[0]];
            vertices[v] = v_darts;
        }
        let (face_of, faces) = orbits(n, |d| sigma_inv[alpha[d]]);
        let map = Map { sigma, sigma_inv, alpha, vertex_of, vertices, face_of, faces };
        let chi = map.euler_characteristic();
        if chi > 2 || chi.rem_euclid(2) != 0 {
            return Err(MapError::OddEulerDefect { chi });
        }
        Ok(map)
    }

    /// Builds a map from per-vertex counterclockwise dart lists and an edge pairing.
    pub fn from_rotations(rotations: &[Vec<usize>], alpha: Vec<usize>) -> Result<Self, MapError> {
        let n = alpha.len();
        let mut sigma = vec![usize::MAX; n];
        let mut vertex_of = vec![usize::MAX; n];
        for (v, rot) in rotations.iter().enumerate() {
            if rot.is_empty() {
                return Err(MapError::InconsistentVertexMap(format!("vertex {v} has no darts")));
            }
            for (i, &d) in rot.iter().enumerate() {
                if d >= n || sigma[d] != usize::MAX {
                    return Err(MapError::NotPermutation { which: "rotation" });
                }
                sigma[d] = rot[(i + 1) % rot.len()];
                vertex_of[d] = v;
            }
        }
        if sigma.iter().any(|&s| s == usize::MAX) {
            return Err(MapError::NotPermutation { which: "rotation" });
        }
        Self::with_vertices(rotations.len(), sigma, alpha, vertex_of)
    }

    pub fn dart_count(&self) -> usize {
        self.sigma.len()
    }
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
    pub fn edge_count(&self) -> usize {
        self.sigma.len() / 2
    }
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }
    pub fn sigma(&self, d: usize) -> usize {
        self.sigma[d]
    }
    pub fn sigma_inv(&self, d: usize) -> usize {
        self.sigma_inv[d]
    }
    pub fn alpha(&self, d: usize) -> usize {
        self.alpha[d]
    }
    /// Next dart along the boundary of the face left of `d`.
    pub fn phi(&self, d: usize) -> usize {
        self.sigma_inv[self.alpha[d]]
    }
    pub fn sigma_slice(&self) -> &[usize] {
        &self.sigma
    }
    pub fn alpha_slice(&self) -> &[usize] {
        &self.alpha
    }
    pub fn vertex_of(&self, d: usize) -> usize {
        self.vertex_of[d]
    }
    pub fn vertex_of_slice(&self) -> &[usize] {
        &self.vertex_of
    }
    /// Counterclockwise dart list of vertex `v`, starting at its least dart.
    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.vertices[v]
    }
    pub fn degree(&self, v: usize) -> usize {
        self.vertices[v].len()
    }
    /// Face on the left of dart `d`.
    pub fn face_of(&self, d: usize) -> usize {
        self.face_of[d]
    }
    /// Face on the right of dart `d`.
    pub fn right_face(&self, d: usize) -> usize {
        self.face_of[self.alpha[d]]
    }
    /// Boundary darts of face `f` in counterclockwise order, starting at its least dart.
    pub fn face(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }
    pub fn face_degree(&self, f: usize) -> usize {
        self.faces[f].len()
    }
    /// Vertices met along the boundary of `f`, one per boundary dart.
    pub fn face_vertices(&self, f: usize) -> Vec<usize> {
        self.faces[f].iter().map(|&d| self.vertex_of[d]).collect()
    }
    /// Edge index of a dart: darts `d` and `alpha(d)` share `min(d, alpha(d))`.
    pub fn edge_of(&self, d: usize) -> usize {
        d.min(self.alpha[d])
    }
    /// One representative dart per edge, in increasing order.
    pub fn edge_darts(&self) -> Vec<usize> {
        (0..self.dart_count()).filter(|&d| d < self.alpha[d]).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    /// Genus `(2 - V + E - F) / 2`.
    pub fn genus(&self) -> usize {
        ((2 - self.euler_characteristic()) / 2) as usize
    }

    /// Corners are vertices of degree at least three.
    pub fn corners(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.degree(v) >= 3).collect()
    }

    /// The dual map. Dual vertices are faces; the dual dart of `d` starts in the face left of `d`.
    pub fn dual(&self) -> Map {
        let sigma: Vec<usize> = (0..self.dart_count()).map(|d| self.phi(d)).collect();
        Map::with_vertices(self.face_count(), sigma, self.alpha.clone(), self.face_of.clone())
            .expect("dual of a valid map is valid")
    }

    /// The mirror image: same edges, reversed rotations.
    pub fn mirror(&self) -> Map {
        Map::with_vertices(
            self.vertex_count(),
            self.sigma_inv.clone(),
            self.alpha.clone(),
            self.vertex_of.clone(),
        )
        .expect("mirror of a valid map is valid")
    }

    /// Relabels darts by `perm` (new id of dart `d` is `perm[d]`), keeping vertex ids.
    pub fn relabel(&self, perm: &[usize]) -> Map {
        let n = self.dart_count();
        let mut sigma = vec![0; n];
        let mut alpha = vec![0; n];
        let mut vertex_of = vec![0; n];
        for d in 0..n {
            sigma[perm[d]] = perm[self.sigma[d]];
            alpha[perm[d]] = perm[self.alpha[d]];
            vertex_of[perm[d]] = self.vertex_of[d];
        }
        Map::with_vertices(self.vertex_count(), sigma, alpha, vertex_of).expect("relabeling preserves validity")
    }

    /// Canonical form under orientation-preserving isomorphism.
    pub fn canonical_form(&self) -> CanonicalForm {
        canonical_form_by(self, |_| 0)
    }

    /// Canonical form respecting vertex labels.
    pub fn canonical_form_labeled<L: Ord + Clone>(&self, labels: &[L]) -> CanonicalForm {
        let mut sorted: Vec<L> = labels.to_vec();
        sorted.sort();
        sorted.dedup();
        let rank: Vec<u64> = labels
            .iter()
            .map(|l| sorted.binary_search(l).expect("label present") as u64 + 1)
            .collect();
        canonical_form_by(self, |d| rank[self.vertex_of[d]])
    }

    pub fn is_isomorphic(&self, other: &Map) -> bool {
        self.dart_count() == other.dart_count() && self.canonical_form() == other.canonical_form()
    }

    pub fn to_json(&self) -> MapJson {
        MapJson {
            vertices: self.vertex_count(),
            sigma: self.sigma.clone(),
            alpha: self.alpha.clone(),
            vertex_of: self.vertex_of.clone(),
            labels: None,
            coloring: None,
        }
    }
}

/// Lexicographically least BFS dart code over all roots.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(pub Vec<u64>);

impl CanonicalForm {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(|x| x.to_le_bytes()).collect()
    }
}

/// Canonical form where each dart additionally carries `key(d)`; isomorphisms must preserve keys.
pub fn canonical_form_by(map: &Map, key: impl Fn(usize) -> u64) -> CanonicalForm {
    let n = map.dart_count();
    let mut best: Option<Vec<u64>> = None;
    let mut num = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut code = Vec::with_capacity(3 * n + 1);
    for root in 0..n {
        num.iter_mut().for_each(|x| *x = usize::MAX);
        order.clear();
        code.clear();
        code.push(n as u64);
        num[root] = 0;
        order.push(root);
        let mut head = 0;
        let mut worse = false;
        let mut decided_better = best.is_none();
        while head < order.len() {
            let d = order[head];
            head += 1;
            for e in [map.sigma(d), map.alpha(d)] {
                if num[e] == usize::MAX {
                    num[e] = order.len();
                    order.push(e);
                }
            }
            let chunk = [num[map.sigma(d)] as u64, num[map.alpha(d)] as u64, key(d)];
            for x in chunk {
                if !decided_better {
                    let b = &best.as_ref().unwrap()[code.len()];
                    if x > *b {
                        worse = true;
                        break;
                    }
                    if x < *b {
                        decided_better = true;
                    }
                }
                code.push(x);
            }
            if worse {
                break;
            }
        }
        if !worse && decided_better {
            best = Some(code.clone());
        }
    }
    CanonicalForm(best.expect("nonempty map"))
}

/// JSON interchange format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub vertices: usize,
    pub sigma: Vec<usize>,
    pub alpha: Vec<usize>,
    pub vertex_of: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<Vec<String>>,
}

impl MapJson {
    pub fn to_map(&self) -> Result<Map, MapError> {
        Map::with_vertices(self.vertices, self.sigma.clone(), self.alpha.clone(), self.vertex_of.clone())
    }
}

/// Incrementally assembles a map from vertices and edges given in rotation order.
///
/// Each call to [`MapBuilder::add_edge`] returns the two darts of the new edge;
/// [`MapBuilder::set_rotation`] then fixes the counterclockwise order at a vertex.
#[derive(Debug, Clone, Default)]
pub struct MapBuilder {
    alpha: Vec<usize>,
    rotations: Vec<Vec<usize>>,
}

impl MapBuilder {
    pub fn new(vertex_count: usize) -> Self {
        MapBuilder { alpha: Vec::new(), rotations: vec![Vec::new(); vertex_count] }
    }
    pub fn add_vertex(&mut self) -> usize {
        self.rotations.push(Vec::new());
        self.rotations.len() - 1
    }
    /// Adds an edge and returns `(dart at u, dart at v)` without placing them in rotations.
    pub fn add_edge(&mut self) -> (usize, usize) {
        let a = self.alpha.len();
        self.alpha.push(a + 1);
        self.alpha.push(a);
        (a, a + 1)
    }
    pub fn set_rotation(&mut self, v: usize, darts: Vec<usize>) {
        self.rotations[v] = darts;
    }
    pub fn push_dart(&mut self, v: usize, dart: usize) {
        self.rotations[v].push(dart);
    }
    pub fn build(self) -> Result<Map, MapError> {
        Map::from_rotations(&self.rotations, self.alpha)
    }
}

/// Small maps used throughout tests and examples.
pub mod examples {
    use super::*;

    /// A single edge on the sphere.
    pub fn single_edge() -> Map {
        Map::from_rotations(&[vec![0], vec![1]], vec![1, 0]).unwrap()
    }

    /// A cycle of length `n` on the sphere: two faces.
    pub fn cycle(n: usize) -> Map {
        // edge i joins vertex i to vertex i+1; dart 2i at i, 2i+1 at i+1
        let mut alpha = vec![0; 2 * n];
        for i in 0..n {
            alpha[2 * i] = 2 * i + 1;
            alpha[2 * i + 1] = 2 * i;
        }
        let rotations: Vec<Vec<usize>> = (0..n).map(|i| vec![2 * i, (2 * (i + n) - 1) % (2 * n)]).collect();
        Map::from_rotations(&rotations, alpha).unwrap()
    }

    /// `k` parallel edges between two vertices (a `k`-fold bundle on the sphere).
    pub fn bundle(k: usize) -> Map {
        let mut alpha = vec![0; 2 * k];
        for i in 0..k {
            alpha[2 * i] = 2 * i + 1;
            alpha[2 * i + 1] = 2 * i;
        }
        let u: Vec<usize> = (0..k).map(|i| 2 * i).collect();
        let v: Vec<usize> = (0..k).rev().map(|i| 2 * i + 1).collect();
        Map::from_rotations(&[u, v], alpha).unwrap()
    }

    /// The tetrahedron as a planar map.
    pub fn tetrahedron() -> Map {
        // outer triangle 0,1,2 counterclockwise with 3 in the middle
        let mut b = MapBuilder::new(4);
        let (a01, a10) = b.add_edge();
        let (a12, a21) = b.add_edge();
        let (a20, a02) = b.add_edge();
        let (a03, a30) = b.add_edge();
        let (a13, a31) = b.add_edge();
        let (a23, a32) = b.add_edge();
        // positions: 0 at angle 90, 1 at 210, 2 at 330, 3 at center
        b.set_rotation(0, vec![a01, a03, a02]);
        b.set_rotation(1, vec![a12, a13, a10]);
        b.set_rotation(2, vec![a20, a23, a21]);
        b.set_rotation(3, vec![a30, a31, a32]);
        b.build().unwrap()
    }

    /// The `p x q` square grid on the torus (all vertices of degree 4).
    pub fn torus_grid(p: usize, q: usize) -> Map {
        let idx = |i: usize, j: usize| (i % p) * q + (j % q);
        let mut b = MapBuilder::new(p * q);
        let mut east = vec![(0, 0); p * q];
        let mut north = vec![(0, 0); p * q];
        for i in 0..p {
            for j in 0..q {
                east[idx(i, j)] = b.add_edge();
                north[idx(i, j)] = b.add_edge();
            }
        }
        for i in 0..p {
            for j in 0..q {
                let v = idx(i, j);
                // east edge from (i,j) to (i+1,j), north edge from (i,j) to (i,j+1)
                let e_out = east[v].0;
                let n_out = north[v].0;
                let w_in = east[idx(i + p - 1, j)].1;
                let s_in = north[idx(i, j + q - 1)].1;
                b.set_rotation(v, vec![e_out, n_out, w_in, s_in]);
            }
        }
        b.build().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    #[test]
    fn single_edge_counts() {
        let m = single_edge();
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count(), m.genus()), (2, 1, 1, 0));
    }

    #[test]
    fn torus_grid_counts() {
        let m = torus_grid(2, 2);
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count()), (4, 8, 4));
        assert_eq!(m.genus(), 1);
    }

    #[test]
    fn tetrahedron_is_planar_and_self_dual() {
        let t = tetrahedron();
        assert_eq!((t.vertex_count(), t.edge_count(), t.face_count(), t.genus()), (4, 6, 4, 0));
        assert!(t.dual().is_isomorphic(&t));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(Map::new(vec![0, 1], vec![0, 1]).unwrap_err(), MapError::FixedPointInAlpha { dart: 0 });
        assert!(matches!(Map::new(vec![0, 1, 2], vec![1, 2, 0]), Err(MapError::NotInvolution { .. })));
        assert_eq!(Map::new(vec![0, 1, 2, 3], vec![1, 0, 3, 2]).unwrap_err(), MapError::Disconnected);
        assert!(matches!(
            Map::with_vertices(2, vec![1, 0], vec![1, 0], vec![0, 1]),
            Err(MapError::InconsistentVertexMap(_))
        ));
    }

    #[test]
    fn faces_cover_every_dart_once() {
        let m = torus_grid(3, 2);
        let mut seen = vec![0; m.dart_count()];
        for f in m.faces() {
            for &d in f {
                seen[d] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn dual_of_cycle_is_bundle() {
        let c = cycle(5);
        assert_eq!(c.face_count(), 2);
        assert!(c.dual().is_isomorphic(&bundle(5)));
    }
}
