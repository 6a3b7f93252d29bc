//! Alternating face colorings, edge orientation and the balance conditions.
//!
//! An [`OrientedMap`] directs every edge so that its A face lies on the left.
//! A positive cycle is a vertex-simple directed cycle. A cobordant multicycle
//! is a set of pairwise vertex-disjoint positive cycles together with a
//! component `R` of the surface cut along them, such that `R` contains the face
//! left of every cycle edge and none of the faces on their right.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::surface_map::{canonical_form_by, CanonicalForm, Map, MapError, MapJson};

/// Default number of candidate cycle sets examined by the multicycle search.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "BALANCED_MAPS_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Color {
    A,
    B,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::A => Color::B,
            Color::B => Color::A,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::A => "A",
            Color::B => "B",
        })
    }
}

/// Why a map fails global balance.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum BalanceFailure {
    #[error("odd number of faces ({faces})")]
    OddFaces { faces: usize },
    #[error("dual graph is not bipartite")]
    NotBipartiteDual,
    #[error("{a} faces of color A but {b} of color B")]
    UnequalColors { a: usize, b: usize },
    #[error("boundary of face {face} is not a Jordan curve")]
    NonJordanFace { face: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum BalanceError {
    #[error("dual graph is not bipartite")]
    NotBipartiteDual,
    #[error("coloring does not alternate across edge of dart {dart}")]
    NotAlternating { dart: usize },
    #[error("coloring has {got} entries for {faces} faces")]
    ColoringLength { got: usize, faces: usize },
    #[error("map is not globally balanced: {0}")]
    NotGloballyBalanced(BalanceFailure),
    #[error("the planar criterion needs genus 0, got genus {genus}")]
    NotPlanar { genus: usize },
    #[error("a cobordant multicycle encloses {} A and {} B faces", witness.a_faces, witness.b_faces)]
    NotLocallyBalanced { witness: Box<Multicycle> },
    #[error("multicycle search exceeded its budget of {budget} candidate sets")]
    CombinatorialBudgetExceeded { budget: u64 },
}

/// Face colors, indexed by face id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coloring(pub Vec<Color>);

impl Coloring {
    pub fn color(&self, face: usize) -> Color {
        self.0[face]
    }
    pub fn count(&self, c: Color) -> usize {
        self.0.iter().filter(|&&x| x == c).count()
    }
    pub fn flipped(&self) -> Coloring {
        Coloring(self.0.iter().map(|c| c.other()).collect())
    }
}

/// Alternating 2-coloring with the face containing dart 0 colored A.
pub fn two_color(map: &Map) -> Result<Coloring, BalanceError> {
    two_color_rooted(map, map.face_of(0))
}

/// Alternating 2-coloring with `root` colored A.
pub fn two_color_rooted(map: &Map, root: usize) -> Result<Coloring, BalanceError> {
    let mut color: Vec<Option<Color>> = vec![None; map.face_count()];
    color[root] = Some(Color::A);
    let mut queue = VecDeque::from([root]);
    while let Some(f) = queue.pop_front() {
        let c = color[f].unwrap();
        for &d in map.face(f) {
            let g = map.right_face(d);
            match color[g] {
                None => {
                    color[g] = Some(c.other());
                    queue.push_back(g);
                }
                Some(x) if x == c => return Err(BalanceError::NotBipartiteDual),
                _ => {}
            }
        }
    }
    Ok(Coloring(color.into_iter().map(|c| c.expect("connected dual")).collect()))
}

/// A map with an alternating coloring; every edge is directed with its A face on the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedMap {
    pub map: Map,
    pub coloring: Coloring,
}

impl OrientedMap {
    pub fn new(map: Map, coloring: Coloring) -> Result<Self, BalanceError> {
        if coloring.0.len() != map.face_count() {
            return Err(BalanceError::ColoringLength { got: coloring.0.len(), faces: map.face_count() });
        }
        for d in 0..map.dart_count() {
            if coloring.color(map.face_of(d)) == coloring.color(map.right_face(d)) {
                return Err(BalanceError::NotAlternating { dart: d });
            }
        }
        Ok(OrientedMap { map, coloring })
    }

    /// Colors `map` with the default root.
    pub fn from_map(map: Map) -> Result<Self, BalanceError> {
        let coloring = two_color(&map)?;
        Ok(OrientedMap { map, coloring })
    }

    pub fn flipped(&self) -> OrientedMap {
        OrientedMap { map: self.map.clone(), coloring: self.coloring.flipped() }
    }

    /// Whether dart `d` points along its edge's direction (its left face is A).
    pub fn is_forward(&self, d: usize) -> bool {
        self.coloring.color(self.map.face_of(d)) == Color::A
    }

    /// The forward dart of the edge containing `d`.
    pub fn forward_dart(&self, d: usize) -> usize {
        if self.is_forward(d) {
            d
        } else {
            self.map.alpha(d)
        }
    }

    /// Directed edges as `(tail, head)` pairs, one per forward dart, in dart order.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        (0..self.map.dart_count())
            .filter(|&d| self.is_forward(d))
            .map(|d| (self.map.vertex_of(d), self.map.vertex_of(self.map.alpha(d))))
            .collect()
    }

    /// Canonical form under color-preserving orientation-preserving isomorphism.
    pub fn canonical_form(&self) -> CanonicalForm {
        canonical_form_by(&self.map, |d| self.is_forward(d) as u64)
    }

    /// Whether the two maps are isomorphic by a map preserving orientation and colors.
    pub fn is_isomorphic(&self, other: &OrientedMap) -> bool {
        self.map.dart_count() == other.map.dart_count() && self.canonical_form() == other.canonical_form()
    }

    /// Color of the face left of dart `d`.
    pub fn dart_color(&self, d: usize) -> Color {
        self.coloring.color(self.map.face_of(d))
    }

    pub fn faces_of_color(&self, c: Color) -> Vec<usize> {
        (0..self.map.face_count()).filter(|&f| self.coloring.color(f) == c).collect()
    }
}

/// Reading an oriented map from its JSON form.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum ImportError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Balance(#[from] BalanceError),
    #[error("unknown face color {0:?}, expected A or B")]
    UnknownColor(String),
}

impl OrientedMap {
    /// JSON form with the face colors as `"A"`/`"B"`.
    pub fn to_json(&self) -> MapJson {
        let mut j = self.map.to_json();
        j.coloring = Some(self.coloring.0.iter().map(|c| c.to_string()).collect());
        j
    }

    /// Reads a map and its coloring; without a coloring the face of dart 0 is A.
    pub fn from_json(j: &MapJson) -> Result<Self, ImportError> {
        let map = j.to_map()?;
        match &j.coloring {
            None => Ok(OrientedMap::from_map(map)?),
            Some(cs) => {
                let colors = cs
                    .iter()
                    .map(|c| match c.trim() {
                        "A" | "a" => Ok(Color::A),
                        "B" | "b" => Ok(Color::B),
                        other => Err(ImportError::UnknownColor(other.to_string())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(OrientedMap::new(map, Coloring(colors))?)
            }
        }
    }
}

/// `(g, d, m)`: genus, degree (half the face count) and number of corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BalanceType {
    pub g: usize,
    pub d: usize,
    pub m: usize,
}

impl fmt::Display for BalanceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.g, self.d, self.m)
    }
}

/// The first face whose boundary is not a Jordan curve, if any.
///
/// A boundary fails when it meets some vertex twice; loops are rejected too.
pub fn non_jordan_face(map: &Map) -> Option<usize> {
    for d in 0..map.dart_count() {
        if map.vertex_of(d) == map.vertex_of(map.alpha(d)) {
            return Some(map.face_of(d));
        }
    }
    let mut mark = vec![usize::MAX; map.vertex_count()];
    for f in 0..map.face_count() {
        for &d in map.face(f) {
            let v = map.vertex_of(d);
            if mark[v] == f {
                return Some(f);
            }
            mark[v] = f;
        }
    }
    None
}

/// Global balance: alternating coloring, `d` faces of each color and Jordan faces.
pub fn is_globally_balanced(map: &Map) -> Result<BalanceType, BalanceFailure> {
    if map.face_count() % 2 == 1 {
        return Err(BalanceFailure::OddFaces { faces: map.face_count() });
    }
    let coloring = two_color(map).map_err(|_| BalanceFailure::NotBipartiteDual)?;
    let (a, b) = (coloring.count(Color::A), coloring.count(Color::B));
    if a != b {
        return Err(BalanceFailure::UnequalColors { a, b });
    }
    if let Some(face) = non_jordan_face(map) {
        return Err(BalanceFailure::NonJordanFace { face });
    }
    Ok(BalanceType { g: map.genus(), d: a, m: map.corners().len() })
}

/// A vertex-simple directed cycle, as the sequence of its forward darts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Cycle {
    pub darts: Vec<usize>,
}

impl Cycle {
    pub fn vertices(&self, map: &Map) -> Vec<usize> {
        self.darts.iter().map(|&d| map.vertex_of(d)).collect()
    }
}

/// All positive cycles, each rooted at its least vertex, in depth-first order.
pub fn positive_cycles(om: &OrientedMap) -> Vec<Cycle> {
    positive_cycles_bounded(om, u64::MAX).expect("unbounded search")
}

fn positive_cycles_bounded(om: &OrientedMap, limit: u64) -> Result<Vec<Cycle>, BalanceError> {
    let map = &om.map;
    let n = map.vertex_count();
    let out_darts: Vec<Vec<usize>> = (0..n)
        .map(|v| map.rotation(v).iter().copied().filter(|&d| om.is_forward(d)).collect())
        .collect();
    let mut cycles = Vec::new();
    let mut on_path = vec![false; n];
    let mut path: Vec<usize> = Vec::new();
    for s in 0..n {
        on_path[s] = true;
        // iterative depth-first search over (vertex, next out-dart index)
        let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, i) = *top;
            if i >= out_darts[v].len() {
                stack.pop();
                on_path[v] = false;
                if !stack.is_empty() {
                    path.pop();
                }
                continue;
            }
            top.1 += 1;
            let d = out_darts[v][i];
            let w = map.vertex_of(map.alpha(d));
            if w == s {
                let mut darts = path.clone();
                darts.push(d);
                cycles.push(Cycle { darts });
                if cycles.len() as u64 > limit {
                    return Err(BalanceError::CombinatorialBudgetExceeded { budget: limit });
                }
            } else if w > s && !on_path[w] {
                on_path[w] = true;
                path.push(d);
                stack.push((w, 0));
            }
        }
    }
    Ok(cycles)
}

/// A cobordant multicycle and its interior.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Multicycle {
    pub cycles: Vec<Cycle>,
    /// Faces of the interior component `R`, sorted.
    pub interior: Vec<usize>,
    pub a_faces: usize,
    pub b_faces: usize,
}

/// Union-find over faces with the edges of `cut` severed; returns a component id per face.
fn face_components(map: &Map, severed: &[bool]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..map.face_count()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for d in 0..map.dart_count() {
        if d < map.alpha(d) && !severed[map.edge_of(d)] {
            let (a, b) = (find(&mut parent, map.face_of(d)), find(&mut parent, map.right_face(d)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..map.face_count()).map(|f| find(&mut parent, f)).collect()
}

struct CycleData {
    cycle: Cycle,
    vertices: Vec<usize>,
    /// Faces of the left component when the cycle alone separates.
    left: Option<Vec<bool>>,
    /// Faces on either side of the cycle's edges.
    touching: Vec<usize>,
}

/// Search options for the multicycle enumeration.
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        let budget = std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET);
        SearchOptions { budget }
    }
}

fn cycle_data(om: &OrientedMap, cycles: Vec<Cycle>) -> Vec<CycleData> {
    let map = &om.map;
    cycles
        .into_iter()
        .map(|cycle| {
            let mut severed = vec![false; map.dart_count()];
            for &d in &cycle.darts {
                severed[map.edge_of(d)] = true;
            }
            let comp = face_components(map, &severed);
            let l = comp[map.face_of(cycle.darts[0])];
            let separating = cycle.darts.iter().all(|&d| comp[map.right_face(d)] != l);
            let left = separating.then(|| comp.iter().map(|&c| c == l).collect());
            let mut touching: Vec<usize> =
                cycle.darts.iter().flat_map(|&d| [map.face_of(d), map.right_face(d)]).collect();
            touching.sort_unstable();
            touching.dedup();
            let mut vertices = cycle.vertices(map);
            vertices.sort_unstable();
            CycleData { cycle, vertices, left, touching }
        })
        .collect()
}

fn compatible(a: &CycleData, b: &CycleData) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.vertices.len() && j < b.vertices.len() {
        match a.vertices[i].cmp(&b.vertices[j]) {
            std::cmp::Ordering::Equal => return false,
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    // a separating cycle confines the interior, hence every other cycle, to its left side
    let inside = |x: &CycleData, y: &CycleData| match &x.left {
        Some(left) => y.touching.iter().all(|&f| left[f]),
        None => true,
    };
    inside(a, b) && inside(b, a)
}

/// Interior of a candidate cycle set, if it is a cobordant multicycle.
fn interior_of(om: &OrientedMap, set: &[&CycleData]) -> Option<Vec<usize>> {
    let map = &om.map;
    let mut severed = vec![false; map.dart_count()];
    for c in set {
        for &d in &c.cycle.darts {
            severed[map.edge_of(d)] = true;
        }
    }
    let comp = face_components(map, &severed);
    let r = comp[map.face_of(set[0].cycle.darts[0])];
    for c in set {
        for &d in &c.cycle.darts {
            if comp[map.face_of(d)] != r || comp[map.right_face(d)] == r {
                return None;
            }
        }
    }
    Some((0..map.face_count()).filter(|&f| comp[f] == r).collect())
}

/// Visits every cobordant multicycle until `visit` returns `false`.
fn for_each_multicycle(
    om: &OrientedMap,
    opts: SearchOptions,
    mut visit: impl FnMut(Multicycle) -> bool,
) -> Result<(), BalanceError> {
    let data = cycle_data(om, positive_cycles_bounded(om, opts.budget)?);
    let n = data.len();
    let compat: Vec<Vec<bool>> =
        (0..n).map(|i| (0..n).map(|j| i != j && compatible(&data[i], &data[j])).collect()).collect();
    let mut candidates: u64 = 0;
    let mut chosen: Vec<usize> = Vec::new();
    // depth-first enumeration of pairwise compatible sets in increasing index order
    fn rec(
        om: &OrientedMap,
        data: &[CycleData],
        compat: &[Vec<bool>],
        chosen: &mut Vec<usize>,
        start: usize,
        candidates: &mut u64,
        budget: u64,
        visit: &mut dyn FnMut(Multicycle) -> bool,
    ) -> Result<bool, BalanceError> {
        for i in start..data.len() {
            if !chosen.iter().all(|&j| compat[i][j]) {
                continue;
            }
            chosen.push(i);
            *candidates += 1;
            if *candidates > budget {
                return Err(BalanceError::CombinatorialBudgetExceeded { budget });
            }
            let set: Vec<&CycleData> = chosen.iter().map(|&j| &data[j]).collect();
            if let Some(interior) = interior_of(om, &set) {
                let a = interior.iter().filter(|&&f| om.coloring.color(f) == Color::A).count();
                let mc = Multicycle {
                    cycles: set.iter().map(|c| c.cycle.clone()).collect(),
                    b_faces: interior.len() - a,
                    a_faces: a,
                    interior,
                };
                if !visit(mc) {
                    chosen.pop();
                    return Ok(false);
                }
            }
            if !rec(om, data, compat, chosen, i + 1, candidates, budget, visit)? {
                chosen.pop();
                return Ok(false);
            }
            chosen.pop();
        }
        Ok(true)
    }
    rec(om, &data, &compat, &mut chosen, 0, &mut candidates, opts.budget, &mut visit)?;
    Ok(())
}

/// All cobordant multicycles, in enumeration order.
pub fn cobordant_multicycles(om: &OrientedMap) -> Result<Vec<Multicycle>, BalanceError> {
    cobordant_multicycles_with(om, SearchOptions::default())
}

pub fn cobordant_multicycles_with(om: &OrientedMap, opts: SearchOptions) -> Result<Vec<Multicycle>, BalanceError> {
    let mut out = Vec::new();
    for_each_multicycle(om, opts, |mc| {
        out.push(mc);
        true
    })?;
    Ok(out)
}

/// Verdict of a local balance check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalVerdict {
    pub balanced: bool,
    /// A multicycle whose interior does not carry more A than B faces.
    pub witness: Option<Multicycle>,
}

/// Local balance: every cobordant multicycle encloses strictly more A than B faces.
pub fn is_locally_balanced(om: &OrientedMap) -> Result<LocalVerdict, BalanceError> {
    is_locally_balanced_with(om, SearchOptions::default())
}

pub fn is_locally_balanced_with(om: &OrientedMap, opts: SearchOptions) -> Result<LocalVerdict, BalanceError> {
    is_globally_balanced(&om.map).map_err(BalanceError::NotGloballyBalanced)?;
    let mut witness = None;
    for_each_multicycle(om, opts, |mc| {
        if mc.a_faces <= mc.b_faces {
            witness = Some(mc);
            false
        } else {
            true
        }
    })?;
    Ok(LocalVerdict { balanced: witness.is_none(), witness })
}

/// Planar criterion: the left side of every positive cycle carries more A than B faces.
pub fn is_locally_balanced_thurston(om: &OrientedMap) -> Result<LocalVerdict, BalanceError> {
    let genus = om.map.genus();
    if genus != 0 {
        return Err(BalanceError::NotPlanar { genus });
    }
    is_globally_balanced(&om.map).map_err(BalanceError::NotGloballyBalanced)?;
    let map = &om.map;
    for cycle in positive_cycles(om) {
        let mut severed = vec![false; map.dart_count()];
        for &d in &cycle.darts {
            severed[map.edge_of(d)] = true;
        }
        let comp = face_components(map, &severed);
        let l = comp[map.face_of(cycle.darts[0])];
        let interior: Vec<usize> = (0..map.face_count()).filter(|&f| comp[f] == l).collect();
        let a = interior.iter().filter(|&&f| om.coloring.color(f) == Color::A).count();
        let b = interior.len() - a;
        if a <= b {
            return Ok(LocalVerdict {
                balanced: false,
                witness: Some(Multicycle { cycles: vec![cycle], interior, a_faces: a, b_faces: b }),
            });
        }
    }
    Ok(LocalVerdict { balanced: true, witness: None })
}

/// Global and local balance together, for the given coloring.
pub fn is_balanced(om: &OrientedMap) -> Result<BalanceType, BalanceError> {
    let t = is_globally_balanced(&om.map).map_err(BalanceError::NotGloballyBalanced)?;
    match is_locally_balanced(om)?.witness {
        None => Ok(t),
        Some(w) => Err(BalanceError::NotLocallyBalanced { witness: Box::new(w) }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface_map::examples::*;

    #[test]
    fn two_colorings() {
        assert_eq!(two_color(&single_edge()), Err(BalanceError::NotBipartiteDual));
        let c = two_color(&cycle(2)).unwrap();
        assert_eq!(c.0, vec![Color::A, Color::B]);
    }

    #[test]
    fn two_gon_has_one_positive_cycle_and_is_balanced() {
        let om = OrientedMap::from_map(cycle(2)).unwrap();
        assert_eq!(positive_cycles(&om).len(), 1);
        let v = is_locally_balanced(&om).unwrap();
        assert!(v.balanced);
        let mcs = cobordant_multicycles(&om).unwrap();
        assert_eq!(mcs.len(), 1);
        assert_eq!((mcs[0].a_faces, mcs[0].b_faces), (1, 0));
    }

    #[test]
    fn torus_grid_is_globally_balanced() {
        let t = is_globally_balanced(&torus_grid(2, 2)).unwrap();
        assert_eq!(t, BalanceType { g: 1, d: 2, m: 4 });
    }
}
