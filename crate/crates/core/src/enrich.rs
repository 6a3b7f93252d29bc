//! From a balanced map to monodromy data.
//!
//! Every face receives `m − e_F` dots, where `e_F` counts the vertices on its
//! boundary. Dots of edge-adjacent faces of opposite colors are paired by a
//! perfect matching, and each pair becomes a new degree-2 vertex on a shared
//! edge. Afterwards every face has exactly `m` boundary vertices, labels are
//! propagated along the edge orientation, and the labeled map yields a
//! passport and a constellation of permutations of the A faces.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::balance::{is_globally_balanced, BalanceError, Color, OrientedMap};
use crate::ops::{carry_colors, Editor, OpError};
use crate::perm::{self, Perm};
use crate::surface_map::MapError;

/// Default cap on the number of enrichments tried by the searching pipeline.
pub const DEFAULT_ENRICHMENT_LIMIT: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum EnrichError {
    #[error("m = {m} is smaller than the largest face boundary ({needed} vertices)")]
    MTooSmall { m: usize, needed: usize },
    #[error("no perfect matching of dots: {witness}")]
    NoPerfectMatching { witness: HallWitness },
    #[error("{a} A dots but {b} B dots")]
    UnequalDots { a: usize, b: usize },
    #[error("matched dots in faces {a_face} and {b_face} share no edge")]
    NoFreeSharedEdge { a_face: usize, b_face: usize },
    #[error("label propagation reached vertex {vertex} with {got} after assigning {expected}")]
    InconsistentPropagation { vertex: usize, expected: usize, got: usize },
    #[error("labeling is not admissible: {0}")]
    NotAdmissible(String),
    #[error("monodromy check failed: {0}")]
    MonodromyMismatch(String),
    #[error("none of the {tried} enrichments examined was accepted")]
    NoAcceptableEnrichment { tried: usize },
    #[error("map is not globally balanced: {0}")]
    NotBalanced(String),
    #[error("map rebuild failed: {0}")]
    Rebuild(String),
}

impl From<OpError> for EnrichError {
    fn from(e: OpError) -> Self {
        EnrichError::Rebuild(e.to_string())
    }
}

impl From<MapError> for EnrichError {
    fn from(e: MapError) -> Self {
        EnrichError::Rebuild(e.to_string())
    }
}

impl From<BalanceError> for EnrichError {
    fn from(e: BalanceError) -> Self {
        EnrichError::NotBalanced(e.to_string())
    }
}

/// Number of distinct vertices on the boundary of each face.
pub fn boundary_vertex_counts(om: &OrientedMap) -> Vec<usize> {
    let map = &om.map;
    (0..map.face_count())
        .map(|f| map.face_vertices(f).into_iter().collect::<BTreeSet<_>>().len())
        .collect()
}

/// A balanced map with `dots[f] = m − e_F` dots in each face `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DottedMap {
    pub om: OrientedMap,
    pub m: usize,
    pub dots: Vec<usize>,
}

impl DottedMap {
    pub fn dot_count(&self, c: Color) -> usize {
        self.om.faces_of_color(c).iter().map(|&f| self.dots[f]).sum()
    }
}

/// Places dots in every face. Without `m`, uses the larger of the corner count
/// and the largest face boundary.
pub fn insert_dots(om: &OrientedMap, m: Option<usize>) -> Result<DottedMap, EnrichError> {
    is_globally_balanced(&om.map).map_err(|e| EnrichError::NotBalanced(e.to_string()))?;
    let counts = boundary_vertex_counts(om);
    let needed = counts.iter().copied().max().unwrap_or(0);
    let m = m.unwrap_or_else(|| om.map.corners().len().max(needed));
    if m < needed {
        return Err(EnrichError::MTooSmall { m, needed });
    }
    Ok(DottedMap { om: om.clone(), m, dots: counts.iter().map(|&e| m - e).collect() })
}

/// Bipartite graph on dots: an A dot sees every B dot of an edge-adjacent face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotGraph {
    /// Face of each A dot, dots ordered by `(face, slot)`.
    pub a_dots: Vec<usize>,
    /// Face of each B dot, dots ordered by `(face, slot)`.
    pub b_dots: Vec<usize>,
    /// B dots adjacent to each A dot, ascending.
    pub adj: Vec<Vec<usize>>,
}

impl DotGraph {
    pub fn new(dm: &DottedMap) -> Self {
        let map = &dm.om.map;
        let mut face_adj = vec![BTreeSet::new(); map.face_count()];
        for d in 0..map.dart_count() {
            if dm.om.is_forward(d) {
                face_adj[map.face_of(d)].insert(map.right_face(d));
            }
        }
        let expand = |c: Color| -> Vec<usize> {
            dm.om.faces_of_color(c).into_iter().flat_map(|f| std::iter::repeat(f).take(dm.dots[f])).collect()
        };
        let a_dots = expand(Color::A);
        let b_dots = expand(Color::B);
        let adj = a_dots
            .iter()
            .map(|&fa| (0..b_dots.len()).filter(|&j| face_adj[fa].contains(&b_dots[j])).collect())
            .collect();
        DotGraph { a_dots, b_dots, adj }
    }

    /// Dot graph from explicit sides; used for hand-built instances.
    pub fn from_parts(a_dots: Vec<usize>, b_dots: Vec<usize>, adj: Vec<Vec<usize>>) -> Self {
        DotGraph { a_dots, b_dots, adj }
    }

    fn b_adj(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.b_dots.len()];
        for (i, nb) in self.adj.iter().enumerate() {
            for &j in nb {
                out[j].push(i);
            }
        }
        out
    }
}

/// A set of same-colored faces whose dots outnumber their neighbouring dots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HallWitness {
    pub color: Color,
    pub faces: Vec<usize>,
    pub dots: usize,
    pub neighbours: usize,
}

impl std::fmt::Display for HallWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} faces {:?} hold {} dots but see only {}", self.color, self.faces, self.dots, self.neighbours)
    }
}

/// Face subsets are enumerated exhaustively up to this many dotted faces per side.
const EXHAUSTIVE_FACES: usize = 20;

/// A set of dots violating Hall's condition on either side, or `None` when both
/// sides can be covered.
pub fn hall_violating_set(dg: &DotGraph) -> Option<HallWitness> {
    if let Some(w) = hall_side(&dg.a_dots, &dg.adj, Color::A) {
        return Some(w);
    }
    hall_side(&dg.b_dots, &dg.b_adj(), Color::B)
}

fn hall_side(dots: &[usize], adj: &[Vec<usize>], color: Color) -> Option<HallWitness> {
    // dots of one face share their neighbourhood, so face subsets suffice
    let faces: Vec<usize> = dots.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if faces.len() > EXHAUSTIVE_FACES {
        return alternating_witness(dots, adj, color);
    }
    let per_face: Vec<(usize, BTreeSet<usize>)> = faces
        .iter()
        .map(|&f| {
            let members: Vec<usize> = (0..dots.len()).filter(|&i| dots[i] == f).collect();
            (members.len(), adj[members[0]].iter().copied().collect())
        })
        .collect();
    let mut best: Option<HallWitness> = None;
    for mask in 1u32..(1 << faces.len()) {
        let mut count = 0;
        let mut nb = BTreeSet::new();
        for (i, (c, n)) in per_face.iter().enumerate() {
            if mask & (1 << i) != 0 {
                count += c;
                nb.extend(n.iter().copied());
            }
        }
        if nb.len() < count {
            let chosen: Vec<usize> = (0..faces.len()).filter(|&i| mask & (1 << i) != 0).map(|i| faces[i]).collect();
            let better = best.as_ref().is_none_or(|b| chosen.len() < b.faces.len());
            if better {
                best = Some(HallWitness { color, faces: chosen, dots: count, neighbours: nb.len() });
            }
        }
    }
    best
}

/// Hall witness from a maximum matching: dots reachable by alternating paths
/// from an unmatched dot.
fn alternating_witness(dots: &[usize], adj: &[Vec<usize>], color: Color) -> Option<HallWitness> {
    let right = adj.iter().flatten().copied().max().map_or(0, |x| x + 1);
    let order: Vec<usize> = (0..dots.len()).collect();
    let (mate_l, mate_r) = kuhn(adj, right, &order);
    let free = (0..dots.len()).find(|&i| mate_l[i].is_none())?;
    let mut seen_l = vec![false; dots.len()];
    let mut seen_r = vec![false; right];
    let mut stack = vec![free];
    seen_l[free] = true;
    while let Some(i) = stack.pop() {
        for &j in &adj[i] {
            if !seen_r[j] {
                seen_r[j] = true;
                if let Some(k) = mate_r[j] {
                    if !seen_l[k] {
                        seen_l[k] = true;
                        stack.push(k);
                    }
                }
            }
        }
    }
    let faces: BTreeSet<usize> = (0..dots.len()).filter(|&i| seen_l[i]).map(|i| dots[i]).collect();
    Some(HallWitness {
        color,
        faces: faces.into_iter().collect(),
        dots: seen_l.iter().filter(|&&x| x).count(),
        neighbours: seen_r.iter().filter(|&&x| x).count(),
    })
}

type Mates = (Vec<Option<usize>>, Vec<Option<usize>>);

fn kuhn(adj: &[Vec<usize>], right: usize, order: &[usize]) -> Mates {
    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], ml: &mut [Option<usize>], mr: &mut [Option<usize>]) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if mr[j].is_none_or(|k| augment(k, adj, seen, ml, mr)) {
                ml[i] = Some(j);
                mr[j] = Some(i);
                return true;
            }
        }
        false
    }
    let mut ml = vec![None; adj.len()];
    let mut mr = vec![None; right];
    for &i in order {
        let mut seen = vec![false; right];
        augment(i, adj, &mut seen, &mut ml, &mut mr);
    }
    (ml, mr)
}

/// Perfect matching by augmenting paths over A dots in `(face, slot)` order.
/// Pairs are `(A dot, B dot)` indices.
pub fn perfect_matching(dg: &DotGraph) -> Result<Vec<(usize, usize)>, EnrichError> {
    let order: Vec<usize> = (0..dg.a_dots.len()).collect();
    matching_with_order(dg, &order)
}

/// Perfect matching with the A dots and their neighbour lists shuffled by `seed`.
pub fn perfect_matching_seeded(dg: &DotGraph, seed: u64) -> Result<Vec<(usize, usize)>, EnrichError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..dg.a_dots.len()).collect();
    order.shuffle(&mut rng);
    let mut shuffled = dg.clone();
    for nb in &mut shuffled.adj {
        nb.shuffle(&mut rng);
    }
    matching_with_order(&shuffled, &order)
}

fn matching_with_order(dg: &DotGraph, order: &[usize]) -> Result<Vec<(usize, usize)>, EnrichError> {
    if dg.a_dots.len() != dg.b_dots.len() {
        return Err(EnrichError::UnequalDots { a: dg.a_dots.len(), b: dg.b_dots.len() });
    }
    let (ml, _) = kuhn(&dg.adj, dg.b_dots.len(), order);
    if ml.iter().any(Option::is_none) {
        let witness = hall_violating_set(dg).unwrap_or(HallWitness {
            color: Color::A,
            faces: Vec::new(),
            dots: dg.a_dots.len(),
            neighbours: ml.iter().flatten().count(),
        });
        return Err(EnrichError::NoPerfectMatching { witness });
    }
    Ok(ml.into_iter().enumerate().map(|(i, j)| (i, j.unwrap())).collect())
}

/// New degree-2 vertices per edge, indexed by the edge's forward dart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Enrichment {
    pub counts: Vec<(usize, usize)>,
}

/// Turns a matching into per-edge counts, spreading the pairs of one face pair
/// over their shared edges in dart order.
pub fn enrichment_from_matching(dm: &DottedMap, dg: &DotGraph, matching: &[(usize, usize)]) -> Result<Enrichment, EnrichError> {
    let map = &dm.om.map;
    let mut per_pair = std::collections::BTreeMap::<(usize, usize), usize>::new();
    for &(i, j) in matching {
        *per_pair.entry((dg.a_dots[i], dg.b_dots[j])).or_default() += 1;
    }
    let mut counts = std::collections::BTreeMap::<usize, usize>::new();
    for ((fa, fb), n) in per_pair {
        let shared: Vec<usize> = map
            .face(fa)
            .iter()
            .copied()
            .filter(|&d| map.right_face(d) == fb)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if shared.is_empty() {
            return Err(EnrichError::NoFreeSharedEdge { a_face: fa, b_face: fb });
        }
        for k in 0..n {
            *counts.entry(shared[k % shared.len()]).or_default() += 1;
        }
    }
    Ok(Enrichment { counts: counts.into_iter().collect() })
}

/// Visits every enrichment, as per-edge counts whose sum around each face
/// equals its dots, in lexicographic order of the edge list.
pub fn for_each_enrichment(dm: &DottedMap, mut visit: impl FnMut(&Enrichment) -> ControlFlow<()>) {
    let map = &dm.om.map;
    let edges: Vec<usize> = (0..map.dart_count()).filter(|&d| dm.om.is_forward(d)).collect();
    let ends: Vec<(usize, usize)> = edges.iter().map(|&d| (map.face_of(d), map.right_face(d))).collect();
    let mut last = vec![usize::MAX; map.face_count()];
    for (i, &(a, b)) in ends.iter().enumerate() {
        last[a] = i;
        last[b] = i;
    }
    if last.iter().enumerate().any(|(f, &l)| l == usize::MAX && dm.dots[f] > 0) {
        return;
    }
    let mut left = dm.dots.clone();
    let mut counts = vec![0usize; edges.len()];

    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        edges: &[usize],
        ends: &[(usize, usize)],
        last: &[usize],
        left: &mut [usize],
        counts: &mut [usize],
        visit: &mut dyn FnMut(&Enrichment) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if i == edges.len() {
            let e = Enrichment {
                counts: edges.iter().zip(counts.iter()).filter(|(_, &c)| c > 0).map(|(&d, &c)| (d, c)).collect(),
            };
            return visit(&e);
        }
        let (a, b) = ends[i];
        let hi = left[a].min(left[b]);
        let must_a = last[a] == i;
        let must_b = last[b] == i;
        for n in 0..=hi {
            if (must_a && n != left[a]) || (must_b && n != left[b]) {
                continue;
            }
            left[a] -= n;
            left[b] -= n;
            counts[i] = n;
            let r = rec(i + 1, edges, ends, last, left, counts, visit);
            left[a] += n;
            left[b] += n;
            r?;
        }
        ControlFlow::Continue(())
    }
    let _ = rec(0, &edges, &ends, &last, &mut left, &mut counts, &mut visit);
}

/// Visits enrichments through candidate labelings of the original vertices.
///
/// An edge from `u` to `v` receives `(label(v) − label(u) − 1) mod m` new
/// vertices, and a labeling is kept when every face then has exactly `m`
/// boundary vertices. Every enrichment produced this way labels consistently.
/// With `distinct_corners`, corners must carry pairwise distinct labels.
pub fn for_each_labeled_enrichment(
    dm: &DottedMap,
    distinct_corners: bool,
    mut visit: impl FnMut(&Enrichment) -> ControlFlow<()>,
) {
    let map = &dm.om.map;
    let m = dm.m;
    if map.vertex_count() == 0 || m == 0 {
        return;
    }
    let mut order = vec![0];
    let mut seen = vec![false; map.vertex_count()];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        for &d in map.rotation(order[i]) {
            let w = map.vertex_of(map.alpha(d));
            if !seen[w] {
                seen[w] = true;
                order.push(w);
            }
        }
        i += 1;
    }
    let mut pos = vec![0; map.vertex_count()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // forward darts closing at each step: edges whose later endpoint is order[i]
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); order.len()];
    let mut face_edges = vec![0usize; map.face_count()];
    for d in 0..map.dart_count() {
        if dm.om.is_forward(d) {
            let (u, v) = (map.vertex_of(d), map.vertex_of(map.alpha(d)));
            closing[pos[u].max(pos[v])].push(d);
            face_edges[map.face_of(d)] += 1;
            face_edges[map.right_face(d)] += 1;
        }
    }
    let is_corner: Vec<bool> = (0..map.vertex_count()).map(|v| map.degree(v) >= 3).collect();

    struct State<'a> {
        dm: &'a DottedMap,
        order: Vec<usize>,
        closing: Vec<Vec<usize>>,
        face_edges: Vec<usize>,
        is_corner: Vec<bool>,
        distinct: bool,
        label: Vec<usize>,
        used: Vec<bool>,
        sum: Vec<usize>,
        done: Vec<usize>,
    }

    fn rec(i: usize, st: &mut State, visit: &mut dyn FnMut(&Enrichment) -> ControlFlow<()>) -> ControlFlow<()> {
        let map = &st.dm.om.map;
        let m = st.dm.m;
        if i == st.order.len() {
            let mut counts = Vec::new();
            for d in 0..map.dart_count() {
                if st.dm.om.is_forward(d) {
                    let (u, v) = (map.vertex_of(d), map.vertex_of(map.alpha(d)));
                    let n = (st.label[v] + 2 * m - st.label[u] - 1) % m;
                    if n > 0 {
                        counts.push((d, n));
                    }
                }
            }
            return visit(&Enrichment { counts });
        }
        let v = st.order[i];
        let choices: Vec<usize> = if i == 0 { vec![0] } else { (0..m).collect() };
        for l in choices {
            if st.distinct && st.is_corner[v] && st.used[l] {
                continue;
            }
            st.label[v] = l;
            let mut ok = true;
            let mut applied = Vec::new();
            for &d in &st.closing[i] {
                let (u, w) = (map.vertex_of(d), map.vertex_of(map.alpha(d)));
                let step = (st.label[w] + 2 * m - st.label[u] - 1) % m + 1;
                applied.push((d, step));
                for f in [map.face_of(d), map.right_face(d)] {
                    st.sum[f] += step;
                    st.done[f] += 1;
                    if st.sum[f] > m || (st.done[f] == st.face_edges[f] && st.sum[f] != m) {
                        ok = false;
                    }
                }
            }
            if ok {
                if st.is_corner[v] {
                    st.used[l] = true;
                }
                let r = rec(i + 1, st, visit);
                if st.is_corner[v] {
                    st.used[l] = false;
                }
                if r.is_break() {
                    return r;
                }
            }
            for (d, step) in applied {
                for f in [map.face_of(d), map.right_face(d)] {
                    st.sum[f] -= step;
                    st.done[f] -= 1;
                }
            }
        }
        ControlFlow::Continue(())
    }

    let mut st = State {
        dm,
        order,
        closing,
        face_edges,
        is_corner,
        distinct: distinct_corners,
        label: vec![0; map.vertex_count()],
        used: vec![false; m],
        sum: vec![0; map.face_count()],
        done: vec![0; map.face_count()],
    };
    let _ = rec(0, &mut st, &mut visit);
}

/// Subdivides edges by new degree-2 vertices; dart ids of the input are kept.
pub fn enrich(om: &OrientedMap, enrichment: &Enrichment) -> Result<OrientedMap, EnrichError> {
    let mut ed = Editor::from_map(&om.map);
    for &(e, k) in &enrichment.counts {
        if k == 0 {
            continue;
        }
        let f = ed.alpha[e];
        let mut fresh = Vec::with_capacity(2 * k);
        for _ in 0..k {
            let (x, y) = ed.new_edge();
            fresh.push(x);
            fresh.push(y);
        }
        let mut prev = e;
        for i in 0..k {
            let (b, c) = (fresh[2 * i], fresh[2 * i + 1]);
            ed.new_vertex(vec![b, c]);
            ed.pair(prev, b);
            prev = c;
        }
        ed.pair(prev, f);
    }
    let (map, image) = ed.finish()?;
    Ok(carry_colors(om, map, |d| image[d])?)
}

/// Vertex labels in `0..m`, shown to users as `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Labeling {
    pub m: usize,
    pub labels: Vec<usize>,
}

/// An enriched map with an admissible labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMap {
    pub om: OrientedMap,
    pub labeling: Labeling,
}

/// Propagates labels from `seed` so that every edge raises the label by one
/// modulo the common face length.
pub fn propagate_labels(om: &OrientedMap, seed: usize) -> Result<Labeling, EnrichError> {
    let map = &om.map;
    let m = map.face_degree(0);
    if let Some(f) = (0..map.face_count()).find(|&f| map.face_degree(f) != m) {
        return Err(EnrichError::NotAdmissible(format!(
            "face {f} has {} boundary vertices, expected {m}",
            map.face_degree(f)
        )));
    }
    let mut label = vec![usize::MAX; map.vertex_count()];
    label[seed] = 0;
    let mut stack = vec![seed];
    while let Some(v) = stack.pop() {
        for &d in map.rotation(v) {
            let w = map.vertex_of(map.alpha(d));
            let want = if om.is_forward(d) { (label[v] + 1) % m } else { (label[v] + m - 1) % m };
            if label[w] == usize::MAX {
                label[w] = want;
                stack.push(w);
            } else if label[w] != want {
                return Err(EnrichError::InconsistentPropagation { vertex: w, expected: label[w], got: want });
            }
        }
    }
    Ok(Labeling { m, labels: label })
}

/// Labels an enriched map, then drops labels carried only by degree-2 vertices
/// by smoothing those vertices and renumbering the remaining labels.
pub fn admissible_labeling(om: &OrientedMap) -> Result<LabeledMap, EnrichError> {
    admissible_labeling_from(om, 0)
}

pub fn admissible_labeling_from(om: &OrientedMap, seed: usize) -> Result<LabeledMap, EnrichError> {
    let lab = propagate_labels(om, seed)?;
    let map = &om.map;
    let mut used = vec![false; lab.m];
    for v in map.corners() {
        used[lab.labels[v]] = true;
    }
    let out = if !used.iter().any(|&u| u) || used.iter().all(|&u| u) {
        LabeledMap { om: om.clone(), labeling: lab }
    } else {
        let rank: Vec<usize> = used.iter().scan(0, |r, &u| {
            let x = *r;
            *r += usize::from(u);
            Some(x)
        }).collect();
        let m_eff = used.iter().filter(|&&u| u).count();
        let mut ed = Editor::from_map(map);
        for v in 0..map.vertex_count() {
            if used[lab.labels[v]] {
                continue;
            }
            let rot = std::mem::take(&mut ed.rots[v]);
            let (b, c) = (rot[0], rot[1]);
            let (x, y) = (ed.alpha[b], ed.alpha[c]);
            ed.pair(x, y);
        }
        let (new_map, image) = ed.finish()?;
        let new_om = carry_colors(om, new_map, |d| image[d])?;
        let mut labels = vec![0; new_om.map.vertex_count()];
        for v in 0..map.vertex_count() {
            if used[lab.labels[v]] {
                let nv = new_om.map.vertex_of(image[map.rotation(v)[0]].expect("kept vertex"));
                labels[nv] = rank[lab.labels[v]];
            }
        }
        LabeledMap { om: new_om, labeling: Labeling { m: m_eff, labels } }
    };
    check_admissible(&out)?;
    Ok(out)
}

/// Checks that labels run `0..m` cyclically around every face, increasing with
/// the edge orientation, and that each label's half-degrees sum to `d`.
pub fn check_admissible(lm: &LabeledMap) -> Result<(), EnrichError> {
    let map = &lm.om.map;
    let Labeling { m, labels } = &lm.labeling;
    let m = *m;
    for f in 0..map.face_count() {
        if map.face_degree(f) != m {
            return Err(EnrichError::NotAdmissible(format!("face {f} has {} vertices, m = {m}", map.face_degree(f))));
        }
        let mut seen = vec![false; m];
        for &d in map.face(f) {
            let (u, w) = (map.vertex_of(d), map.vertex_of(map.alpha(d)));
            let (tail, head) = if lm.om.is_forward(d) { (u, w) } else { (w, u) };
            if (labels[tail] + 1) % m != labels[head] {
                return Err(EnrichError::NotAdmissible(format!("edge of dart {d} does not raise the label")));
            }
            seen[labels[u]] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(EnrichError::NotAdmissible(format!("face {f} misses a label")));
        }
    }
    let d = map.face_count() / 2;
    let mut half = vec![0; m];
    for v in 0..map.vertex_count() {
        half[labels[v]] += map.degree(v) / 2;
    }
    if let Some(j) = half.iter().position(|&h| h != d) {
        return Err(EnrichError::NotAdmissible(format!("label {} has half-degree sum {}, d = {d}", j + 1, half[j])));
    }
    Ok(())
}

/// One partition of `d` per label, parts in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Passport {
    pub d: usize,
    pub partitions: Vec<Vec<usize>>,
}

impl Passport {
    pub fn from_labeled(lm: &LabeledMap) -> Passport {
        let map = &lm.om.map;
        let mut partitions = vec![Vec::new(); lm.labeling.m];
        for v in 0..map.vertex_count() {
            partitions[lm.labeling.labels[v]].push(map.degree(v) / 2);
        }
        for p in &mut partitions {
            p.sort_unstable_by(|a, b| b.cmp(a));
        }
        Passport { d: map.face_count() / 2, partitions }
    }

    /// `1 − d + ½ Σ (part − 1)`, or `None` when that is negative or not an integer.
    pub fn genus(&self) -> Option<usize> {
        passport_genus(&self.partitions, self.d)
    }

    /// Whether every partition sums to `d` and has some part above 1.
    pub fn is_valid(&self) -> bool {
        self.partitions.iter().all(|p| p.iter().sum::<usize>() == self.d && p.iter().any(|&x| x > 1))
    }
}

/// Genus of a passport: `1 − d + ½ Σ (part − 1)`, or `None` when negative or fractional.
pub fn passport_genus(partitions: &[Vec<usize>], d: usize) -> Option<usize> {
    let excess: usize = partitions.iter().flatten().map(|&x| x.saturating_sub(1)).sum();
    if excess % 2 == 1 {
        return None;
    }
    let g = 1 + excess as i64 / 2 - d as i64;
    usize::try_from(g).ok()
}

/// Permutations of the A faces, one per label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constellation {
    pub d: usize,
    pub perms: Vec<Perm>,
}

impl Constellation {
    /// Around each vertex labelled `j`, `g_j` sends each A face to the next A
    /// face counterclockwise. A faces are numbered in face-id order.
    pub fn from_labeled(lm: &LabeledMap) -> Constellation {
        let om = &lm.om;
        let map = &om.map;
        let a_faces = om.faces_of_color(Color::A);
        let mut sheet = vec![usize::MAX; map.face_count()];
        for (i, &f) in a_faces.iter().enumerate() {
            sheet[f] = i;
        }
        let d = a_faces.len();
        let mut perms = vec![perm::identity(d); lm.labeling.m];
        for v in 0..map.vertex_count() {
            let wedges: Vec<usize> =
                map.rotation(v).iter().map(|&x| map.face_of(x)).filter(|&f| sheet[f] != usize::MAX).collect();
            let g = &mut perms[lm.labeling.labels[v]];
            for (i, &f) in wedges.iter().enumerate() {
                g[sheet[f]] = sheet[wedges[(i + 1) % wedges.len()]];
            }
        }
        Constellation { d, perms }
    }

    /// `g_1` applied first, then `g_2`, up to `g_m`.
    pub fn product(&self) -> Perm {
        self.perms.iter().fold(perm::identity(self.d), |acc, g| perm::then(&acc, g))
    }

    /// Product identity, transitivity, cycle types against `passport`, and
    /// Riemann–Hurwitz against the genus of the surface.
    pub fn verify(&self, passport: &Passport, genus: usize) -> Result<(), EnrichError> {
        if !perm::is_identity(&self.product()) {
            return Err(EnrichError::MonodromyMismatch(format!(
                "product is {}, not the identity",
                perm::cycle_notation(&self.product())
            )));
        }
        if !perm::is_transitive(self.d, &self.perms) {
            return Err(EnrichError::MonodromyMismatch("group is not transitive".into()));
        }
        for (j, (g, p)) in self.perms.iter().zip(&passport.partitions).enumerate() {
            if &perm::cycle_type(g) != p {
                return Err(EnrichError::MonodromyMismatch(format!(
                    "g_{} has cycle type {:?}, passport has {:?}",
                    j + 1,
                    perm::cycle_type(g),
                    p
                )));
            }
        }
        let ramification: usize = self.perms.iter().flat_map(|g| perm::cycle_type(g)).map(|e| e - 1).sum();
        if 2 * self.d + 2 * genus != 2 + ramification {
            return Err(EnrichError::MonodromyMismatch(format!(
                "Riemann-Hurwitz fails: d = {}, ramification {ramification}, genus {genus}",
                self.d
            )));
        }
        Ok(())
    }

    pub fn cycle_notation(&self) -> Vec<String> {
        self.perms.iter().map(|g| perm::cycle_notation(g)).collect()
    }
}

/// Everything produced by a successful run of the pipeline.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub m: usize,
    pub dots_a: usize,
    pub dots_b: usize,
    pub enrichment: Enrichment,
    pub enriched: OrientedMap,
    pub labeled: LabeledMap,
    pub passport: Passport,
    pub constellation: Constellation,
    /// Enrichments examined before one was accepted.
    pub tried: usize,
}

/// Dots, matching, enrichment, labeling and monodromy, with every check applied.
/// When the default matching gives an inconsistent labeling, other enrichments
/// are searched.
pub fn pipeline(om: &OrientedMap, m: Option<usize>) -> Result<PipelineReport, EnrichError> {
    pipeline_where(om, m, |_| true, false, DEFAULT_ENRICHMENT_LIMIT)
}

/// Pipeline for maps whose corners can all receive distinct labels, such as
/// real generic graphs; the passport is then generic.
pub fn generic_pipeline(om: &OrientedMap) -> Result<PipelineReport, EnrichError> {
    pipeline_where(om, None, is_generic_passport, true, DEFAULT_ENRICHMENT_LIMIT)
}

/// Like [`pipeline`], but keeps searching enrichments until `accept` holds for
/// the passport. The search only visits labelings with distinct corner labels
/// when `distinct_corners` is set.
pub fn pipeline_where(
    om: &OrientedMap,
    m: Option<usize>,
    accept: impl Fn(&Passport) -> bool,
    distinct_corners: bool,
    limit: usize,
) -> Result<PipelineReport, EnrichError> {
    let dm = insert_dots(om, m)?;
    let dg = DotGraph::new(&dm);
    if let Some(witness) = hall_violating_set(&dg) {
        return Err(EnrichError::NoPerfectMatching { witness });
    }
    let matching = perfect_matching(&dg)?;
    let first = enrichment_from_matching(&dm, &dg, &matching)?;
    let genus = om.map.genus();
    let attempt = |e: &Enrichment| -> Result<Option<PipelineReport>, EnrichError> {
        let enriched = enrich(om, e)?;
        let labeled = match admissible_labeling(&enriched) {
            Ok(l) => l,
            Err(EnrichError::InconsistentPropagation { .. }) => return Ok(None),
            Err(err) => return Err(err),
        };
        let passport = Passport::from_labeled(&labeled);
        if !accept(&passport) {
            return Ok(None);
        }
        let constellation = Constellation::from_labeled(&labeled);
        constellation.verify(&passport, genus)?;
        Ok(Some(PipelineReport {
            m: dm.m,
            dots_a: dm.dot_count(Color::A),
            dots_b: dm.dot_count(Color::B),
            enrichment: e.clone(),
            enriched,
            labeled,
            passport,
            constellation,
            tried: 0,
        }))
    };
    if let Some(mut r) = attempt(&first)? {
        r.tried = 1;
        return Ok(r);
    }
    let mut tried = 1;
    let mut found = Ok(None);
    for_each_labeled_enrichment(&dm, distinct_corners, |e| {
        if tried >= limit {
            return ControlFlow::Break(());
        }
        tried += 1;
        match attempt(e) {
            Ok(None) => ControlFlow::Continue(()),
            other => {
                found = other;
                ControlFlow::Break(())
            }
        }
    });
    match found? {
        Some(mut r) => {
            r.tried = tried;
            Ok(r)
        }
        None => Err(EnrichError::NoAcceptableEnrichment { tried }),
    }
}

/// Whether every label has exactly one critical point, of local degree 2.
pub fn is_generic_passport(p: &Passport) -> bool {
    p.partitions.iter().all(|part| part.first() == Some(&2) && part.iter().skip(1).all(|&x| x == 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noncrossing_matchings;
    use crate::real_enum::real_gb_graph;
    use crate::surface_map::examples;

    #[test]
    fn passport_genus_values() {
        assert_eq!(passport_genus(&[vec![2, 1], vec![2, 1], vec![2, 1], vec![2, 1]], 3), Some(0));
        assert_eq!(passport_genus(&[vec![3, 3, 3], vec![3, 3, 3], vec![2, 2, 2, 2, 1]], 9), Some(0));
        assert_eq!(passport_genus(&[vec![2, 1]], 3), None);
    }

    #[test]
    fn real_cubic_graph_pipeline() {
        let m = noncrossing_matchings(3).next().unwrap();
        let om = real_gb_graph(&m);
        let dm = insert_dots(&om, None).unwrap();
        assert_eq!(dm.m, 4);
        assert_eq!(dm.dot_count(Color::A), dm.dot_count(Color::B));
        let r = generic_pipeline(&om).unwrap();
        assert_eq!(r.passport.partitions, vec![vec![2, 1]; 4]);
        assert_eq!(r.passport.genus(), Some(0));
    }

    #[test]
    fn cycle_needs_no_dots() {
        let om = OrientedMap::from_map(examples::cycle(2)).unwrap();
        let r = pipeline(&om, None).unwrap();
        assert_eq!(r.labeled.labeling.labels.len(), 2);
        assert_ne!(r.labeled.labeling.labels[0], r.labeled.labeling.labels[1]);
    }
}
