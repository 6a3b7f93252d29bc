//! Operations between balanced graphs.
//!
//! Every operation validates its input, rebuilds the rotation system, carries
//! the face colors across and then re-checks global balance and the expected
//! type `(g, d, n)` of the result. A failed re-check surfaces as
//! [`OpError::OperationBrokeBalance`]. When the input is locally balanced the
//! result must be too, otherwise the operation fails with
//! [`OpError::LocalBalanceLost`] carrying the offending multicycle.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::balance::{self, is_globally_balanced, is_locally_balanced, BalanceError, BalanceType, Color, Multicycle, OrientedMap};
use crate::surface_map::{CanonicalForm, Map, MapError};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum OpError {
    #[error("dart {0} does not exist")]
    NoSuchDart(usize),
    #[error("vertex {0} does not exist")]
    NoSuchVertex(usize),
    #[error("the saddle-connection of dart {dart} is splitting")]
    SplittingEdge { dart: usize },
    #[error("contracting dart {dart} would create a loop")]
    WouldCreateLoop { dart: usize },
    #[error("vertex {vertex} has degree {degree}, too small for this operation")]
    DegreeTooSmall { vertex: usize, degree: usize },
    #[error("part of size {size} is even")]
    EvenPart { size: usize },
    #[error("part is not contiguous in the rotation of vertex {vertex}")]
    NonContiguousPart { vertex: usize },
    #[error("the corners {u} and {v} of the piece share a face outside it")]
    SplittingPiece { u: usize, v: usize },
    #[error("removing the piece leaves nothing of degree {remaining}")]
    PieceIsWholeSphere { remaining: i64 },
    #[error("not a simple piece of this map")]
    NotAPiece,
    #[error("the glued faces would not alternate in color")]
    ColorClash,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("corners {p1} and {p2} are not joined by exactly one non-splitting edge")]
    NotUniquelyJoined { p1: usize, p2: usize },
    #[error("the arcs do not lie on the two faces of the joining edge")]
    ArcFaceMismatch,
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("the curve does not separate the surface")]
    NonSeparating,
    #[error("the curve goes around a single vertex")]
    SingleVertexLoop,
    #[error("side {side} of the cut has {a} A and {b} B whole faces")]
    ColorCountMismatch { side: usize, a: usize, b: usize },
    #[error("both rectangles lie on faces of the same color")]
    SameColorFaces,
    #[error("invalid rectangle: {0}")]
    InvalidRectangle(String),
    #[error("result failed verification: {0}")]
    OperationBrokeBalance(String),
    #[error("result is not locally balanced: a positive multicycle bounds {} A and {} B faces", witness.a_faces, witness.b_faces)]
    LocalBalanceLost { witness: Multicycle },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Balance(#[from] BalanceError),
}

/// A rotation system under construction. Darts absent from every rotation are deleted.
#[derive(Debug, Clone)]
pub(crate) struct Editor {
    pub(crate) rots: Vec<Vec<usize>>,
    pub(crate) alpha: Vec<usize>,
}

impl Editor {
    pub(crate) fn from_map(map: &Map) -> Self {
        Editor {
            rots: (0..map.vertex_count()).map(|v| map.rotation(v).to_vec()).collect(),
            alpha: map.alpha_slice().to_vec(),
        }
    }

    /// Disjoint union of two maps; darts of the second are shifted by the dart count of the first.
    pub(crate) fn union(a: &Map, b: &Map) -> Self {
        let mut e = Editor::from_map(a);
        let shift = a.dart_count();
        for v in 0..b.vertex_count() {
            e.rots.push(b.rotation(v).iter().map(|&d| d + shift).collect());
        }
        e.alpha.extend(b.alpha_slice().iter().map(|&d| d + shift));
        e
    }

    pub(crate) fn new_edge(&mut self) -> (usize, usize) {
        let a = self.alpha.len();
        self.alpha.push(a + 1);
        self.alpha.push(a);
        (a, a + 1)
    }

    pub(crate) fn new_vertex(&mut self, rot: Vec<usize>) -> usize {
        self.rots.push(rot);
        self.rots.len() - 1
    }

    pub(crate) fn pair(&mut self, a: usize, b: usize) {
        self.alpha[a] = b;
        self.alpha[b] = a;
    }

    /// Splits into connected components and renumbers each. Returns the maps and,
    /// per old dart, `(component, new dart)` when the dart survives.
    pub(crate) fn finish_components(&self) -> Result<(Vec<Map>, Vec<Option<(usize, usize)>>), OpError> {
        let n = self.alpha.len();
        let mut vertex_of = vec![usize::MAX; n];
        for (v, rot) in self.rots.iter().enumerate() {
            for &d in rot {
                vertex_of[d] = v;
            }
        }
        let live_vertices: Vec<usize> = (0..self.rots.len()).filter(|&v| !self.rots[v].is_empty()).collect();
        for &v in &live_vertices {
            for &d in &self.rots[v] {
                if vertex_of[self.alpha[d]] == usize::MAX {
                    return Err(OpError::OperationBrokeBalance(format!("dart {d} lost its partner")));
                }
            }
        }
        // components of vertices
        let mut comp = vec![usize::MAX; self.rots.len()];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for &s in &live_vertices {
            if comp[s] != usize::MAX {
                continue;
            }
            let c = comps.len();
            comp[s] = c;
            let mut stack = vec![s];
            let mut members = Vec::new();
            while let Some(v) = stack.pop() {
                members.push(v);
                for &d in &self.rots[v] {
                    let w = vertex_of[self.alpha[d]];
                    if comp[w] == usize::MAX {
                        comp[w] = c;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        // surviving darts keep their relative order, so operations that delete nothing keep dart ids
        let mut image = vec![None; n];
        let mut maps = Vec::new();
        for (c, members) in comps.iter().enumerate() {
            let mut darts: Vec<usize> = members.iter().flat_map(|&v| self.rots[v].iter().copied()).collect();
            darts.sort_unstable();
            for (i, &d) in darts.iter().enumerate() {
                image[d] = Some((c, i));
            }
            let mut alpha = vec![0; darts.len()];
            for &d in &darts {
                alpha[image[d].unwrap().1] = image[self.alpha[d]].unwrap().1;
            }
            let rots: Vec<Vec<usize>> =
                members.iter().map(|&v| self.rots[v].iter().map(|&d| image[d].unwrap().1).collect()).collect();
            maps.push(Map::from_rotations(&rots, alpha)?);
        }
        Ok((maps, image))
    }

    pub(crate) fn finish(&self) -> Result<(Map, Vec<Option<usize>>), OpError> {
        let (mut maps, image) = self.finish_components()?;
        if maps.len() != 1 {
            return Err(OpError::OperationBrokeBalance("result is disconnected".into()));
        }
        Ok((maps.pop().unwrap(), image.into_iter().map(|x| x.map(|p| p.1)).collect()))
    }
}

/// Colors `map` so that every surviving dart keeps the color of its left face.
pub(crate) fn carry_colors(
    old: &OrientedMap,
    map: Map,
    image: impl Fn(usize) -> Option<usize>,
) -> Result<OrientedMap, OpError> {
    let coloring = balance::two_color(&map).map_err(|_| OpError::OperationBrokeBalance("dual is not bipartite".into()))?;
    let mut om = OrientedMap { map, coloring };
    let mut flip = None;
    for d in 0..old.map.dart_count() {
        if let Some(nd) = image(d) {
            let same = om.dart_color(nd) == old.dart_color(d);
            match flip {
                None => flip = Some(!same),
                Some(f) if f == same => {
                    return Err(OpError::OperationBrokeBalance(format!("color of dart {d} changed")));
                }
                _ => {}
            }
        }
    }
    if flip == Some(true) {
        om = om.flipped();
    }
    Ok(om)
}

/// Checks global balance and the expected type of an operation's output.
fn verify(om: &OrientedMap, expected: BalanceType) -> Result<(), OpError> {
    let t = is_globally_balanced(&om.map).map_err(|e| OpError::OperationBrokeBalance(e.to_string()))?;
    if t != expected {
        return Err(OpError::OperationBrokeBalance(format!("expected type {expected}, got {t}")));
    }
    Ok(())
}

/// Fails when `out` is not locally balanced although every input is. A search
/// that runs out of budget is not treated as a failure.
fn verify_local(inputs: &[&OrientedMap], out: &OrientedMap) -> Result<(), OpError> {
    let witness = match is_locally_balanced(out) {
        Ok(v) => match v.witness {
            Some(w) => w,
            None => return Ok(()),
        },
        Err(_) => return Ok(()),
    };
    let inputs_balanced = inputs.iter().all(|om| matches!(is_locally_balanced(om), Ok(v) if v.balanced));
    if inputs_balanced {
        Err(OpError::LocalBalanceLost { witness })
    } else {
        Ok(())
    }
}

fn type_of(om: &OrientedMap) -> Result<BalanceType, OpError> {
    is_globally_balanced(&om.map).map_err(|e| OpError::Balance(BalanceError::NotGloballyBalanced(e)))
}

fn check_dart(map: &Map, d: usize) -> Result<(), OpError> {
    if d >= map.dart_count() {
        return Err(OpError::NoSuchDart(d));
    }
    Ok(())
}

/// A saddle-connection traversed from a corner: its darts (each leaving its vertex) and its far corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaddlePath {
    pub darts: Vec<usize>,
    pub start: usize,
    pub end: usize,
    /// The dart of the last edge at the far corner.
    pub end_dart: usize,
}

impl SaddlePath {
    /// Vertices strictly inside the path, all of degree 2.
    pub fn interior_vertices(&self, map: &Map) -> Vec<usize> {
        self.darts[1..].iter().map(|&d| map.vertex_of(d)).collect()
    }
}

/// Follows the saddle-connection of `d` through degree-2 vertices. `None` for a cycle without corners.
pub fn saddle_path(map: &Map, d: usize) -> Option<SaddlePath> {
    let mut d = d;
    let mut guard = 0;
    while map.degree(map.vertex_of(d)) == 2 {
        d = map.alpha(map.sigma(d));
        guard += 1;
        if guard > map.dart_count() {
            return None;
        }
    }
    let start = map.vertex_of(d);
    let mut darts = vec![d];
    let mut x = map.alpha(d);
    while map.degree(map.vertex_of(x)) == 2 {
        let next = map.sigma(x);
        darts.push(next);
        x = map.alpha(next);
        if darts.len() > map.dart_count() {
            return None;
        }
    }
    Some(SaddlePath { darts, start, end: map.vertex_of(x), end_dart: x })
}

fn faces_at(map: &Map, v: usize) -> Vec<usize> {
    let mut f: Vec<usize> = map.rotation(v).iter().map(|&d| map.face_of(d)).collect();
    f.sort_unstable();
    f.dedup();
    f
}

/// Whether the saddle-connection of `d` is non-splitting and contractible without creating a loop.
pub fn contraction_obstruction(map: &Map, d: usize) -> Option<OpError> {
    let path = match saddle_path(map, d) {
        Some(p) => p,
        None => return Some(OpError::WouldCreateLoop { dart: d }),
    };
    let (u, v) = (path.start, path.end);
    if u == v {
        return Some(OpError::WouldCreateLoop { dart: d });
    }
    let sides = [map.face_of(path.darts[0]), map.right_face(path.darts[0])];
    let fu = faces_at(map, u);
    let fv = faces_at(map, v);
    if fu.iter().any(|f| fv.contains(f) && !sides.contains(f)) {
        return Some(OpError::SplittingEdge { dart: d });
    }
    for &x in map.rotation(u) {
        if x != path.darts[0] {
            if let Some(p) = saddle_path(map, x) {
                if p.end == v {
                    return Some(OpError::WouldCreateLoop { dart: d });
                }
            }
        }
    }
    None
}

/// Result of [`edge_contract`]: the map, the merged vertex, and the darts it inherited from the first corner.
#[derive(Debug, Clone)]
pub struct Contracted {
    pub map: OrientedMap,
    pub vertex: usize,
    pub part: Vec<usize>,
}

/// Contracts the saddle-connection of dart `d` to a point.
pub fn edge_contract(om: &OrientedMap, d: usize) -> Result<Contracted, OpError> {
    let map = &om.map;
    check_dart(map, d)?;
    let before = type_of(om)?;
    if let Some(e) = contraction_obstruction(map, d) {
        return Err(e);
    }
    let path = saddle_path(map, d).expect("checked above");
    let (u, v) = (path.start, path.end);
    let first = path.darts[0];
    let mut ed = Editor::from_map(map);
    let rot_after = |vert: usize, dart: usize| -> Vec<usize> {
        let r = map.rotation(vert);
        let i = r.iter().position(|&x| x == dart).unwrap();
        (1..r.len()).map(|k| r[(i + k) % r.len()]).collect()
    };
    let from_u = rot_after(u, first);
    let mut merged = from_u.clone();
    merged.extend(rot_after(v, path.end_dart));
    for w in path.interior_vertices(map) {
        ed.rots[w].clear();
    }
    ed.rots[v].clear();
    ed.rots[u] = merged;
    let (new_map, image) = ed.finish()?;
    let out = carry_colors(om, new_map, |x| image[x])?;
    let u_corner = map.degree(u) >= 3;
    let v_corner = map.degree(v) >= 3;
    let merged_deg = map.degree(u) + map.degree(v) - 2;
    let m = before.m + usize::from(merged_deg >= 3) - usize::from(u_corner) - usize::from(v_corner);
    verify(&out, BalanceType { m, ..before })?;
    verify_local(&[om], &out)?;
    let vertex = out.map.vertex_of(image[from_u[0]].unwrap());
    let part = from_u.iter().map(|&x| image[x].unwrap()).collect();
    Ok(Contracted { map: out, vertex, part })
}

/// Number of distinct vertex expansions of a corner of even degree `deg`.
pub fn count_vertex_expansions(deg: usize) -> usize {
    if deg < 6 {
        0
    } else {
        deg * (deg - 4) / 4
    }
}

/// Every admissible first part of a vertex expansion of `v`, one per unordered bipartition.
///
/// Parts are contiguous odd runs of at least three darts leaving at least three;
/// of the two complementary runs the one avoiding the first dart of the rotation is listed.
pub fn vertex_expansions(map: &Map, v: usize) -> Vec<Vec<usize>> {
    let r = map.rotation(v);
    let m = r.len();
    let mut out = Vec::new();
    if m < 6 || m % 2 == 1 {
        return out;
    }
    for s in (3..=m - 3).step_by(2) {
        for k in 1..m {
            if k + s <= m {
                out.push(r[k..k + s].to_vec());
            }
        }
    }
    out
}

/// Result of [`vertex_expand`]: the map and a dart of the new edge, which leaves the vertex holding the part.
#[derive(Debug, Clone)]
pub struct Expanded {
    pub map: OrientedMap,
    pub edge: usize,
}

/// Splits corner `v` into two corners joined by a new edge; `part` goes to the first of them.
pub fn vertex_expand(om: &OrientedMap, v: usize, part: &[usize]) -> Result<Expanded, OpError> {
    let map = &om.map;
    if v >= map.vertex_count() {
        return Err(OpError::NoSuchVertex(v));
    }
    let before = type_of(om)?;
    let r = map.rotation(v);
    let m = r.len();
    if m < 6 {
        return Err(OpError::DegreeTooSmall { vertex: v, degree: m });
    }
    let s = part.len();
    if s % 2 == 0 || (m - s.min(m)) % 2 == 0 {
        return Err(OpError::EvenPart { size: if s % 2 == 0 { s } else { m - s } });
    }
    if s < 3 || s + 3 > m {
        return Err(OpError::InvalidPartition(format!("parts must have at least 3 darts, got {s} and {}", m - s.min(m))));
    }
    let k = r.iter().position(|&x| x == part[0]).ok_or(OpError::NonContiguousPart { vertex: v })?;
    if (0..s).any(|i| r[(k + i) % m] != part[i]) {
        return Err(OpError::NonContiguousPart { vertex: v });
    }
    let a_part: Vec<usize> = (0..s).map(|i| r[(k + i) % m]).collect();
    let b_part: Vec<usize> = (s..m).map(|i| r[(k + i) % m]).collect();
    let mut ed = Editor::from_map(map);
    let (x, y) = ed.new_edge();
    let mut ra = a_part;
    ra.push(x);
    let mut rb = b_part;
    rb.push(y);
    ed.rots[v] = ra;
    ed.new_vertex(rb);
    let (new_map, image) = ed.finish()?;
    let out = carry_colors(om, new_map, |d| image[d])?;
    verify(&out, BalanceType { m: before.m + 1, ..before })?;
    verify_local(&[om], &out)?;
    Ok(Expanded { edge: image[x].unwrap(), map: out })
}

/// A bundle of `2f + 1` consecutive parallel saddle-connections between corners `u < v`
/// enclosing `2f` lunes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimplePiece {
    pub u: usize,
    pub v: usize,
    /// Darts at `u`, in counterclockwise order.
    pub darts: Vec<usize>,
    /// The enclosed faces, in the same order.
    pub faces: Vec<usize>,
    pub f: usize,
}

fn is_lune(map: &Map, d: usize) -> bool {
    // the face in the wedge (d, sigma d) is bounded by exactly these two saddle-connections
    let e = map.sigma(d);
    match (saddle_path(map, d), saddle_path(map, e)) {
        (Some(p), Some(q)) => {
            p.end == q.end && p.end != p.start && map.face_degree(map.face_of(d)) == p.darts.len() + q.darts.len()
        }
        _ => false,
    }
}

/// All simple pieces. Maximal odd runs give one piece; even runs of at least four give two.
pub fn find_simple_pieces(map: &Map) -> Vec<SimplePiece> {
    let mut out = Vec::new();
    for u in 0..map.vertex_count() {
        let r = map.rotation(u);
        let m = r.len();
        if m < 3 {
            continue;
        }
        let links: Vec<bool> = (0..m).map(|i| is_lune(map, r[i])).collect();
        if links.iter().all(|&l| l) {
            continue;
        }
        for s in 0..m {
            if links[(s + m - 1) % m] || !links[s] {
                continue;
            }
            let mut len = 0;
            while links[(s + len) % m] {
                len += 1;
            }
            let darts: Vec<usize> = (0..=len).map(|i| r[(s + i) % m]).collect();
            let v = saddle_path(map, darts[0]).unwrap().end;
            if v < u {
                continue;
            }
            let k = darts.len();
            let runs: Vec<&[usize]> = if k % 2 == 1 {
                vec![&darts[..]]
            } else if k >= 4 {
                vec![&darts[..k - 1], &darts[1..]]
            } else {
                vec![]
            };
            for run in runs {
                let faces = run[..run.len() - 1].iter().map(|&d| map.face_of(d)).collect();
                out.push(SimplePiece { u, v, darts: run.to_vec(), faces, f: (run.len() - 1) / 2 });
            }
        }
    }
    out
}

/// Where to glue a simple piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum InsertSite {
    /// Subdivide the edge of this dart and insert at the new point.
    Edge { dart: usize },
    /// Split vertex `vertex`; the `size` darts starting at rotation position `start` go to the first new corner.
    Corner { vertex: usize, start: usize, size: usize },
}

/// Result of [`face_collapse`]: the map and the site at which [`face_insert`] undoes it.
#[derive(Debug, Clone)]
pub struct Collapsed {
    pub map: OrientedMap,
    pub site: InsertSite,
}

/// Whether merging the corners of `piece` keeps every face boundary a Jordan curve:
/// apart from the piece and the two faces flanking it, no face meets both corners.
pub fn collapse_obstruction(map: &Map, piece: &SimplePiece) -> Option<OpError> {
    let first = piece.darts[0];
    let last = *piece.darts.last()?;
    let mut allowed = piece.faces.clone();
    allowed.extend([map.face_of(last), map.right_face(first)]);
    let fv = faces_at(map, piece.v);
    let splitting = faces_at(map, piece.u).iter().any(|f| fv.contains(f) && !allowed.contains(f));
    splitting.then_some(OpError::SplittingPiece { u: piece.u, v: piece.v })
}

/// Removes a simple piece, merging its two corners.
pub fn face_collapse(om: &OrientedMap, piece: &SimplePiece) -> Result<Collapsed, OpError> {
    let map = &om.map;
    if !find_simple_pieces(map).contains(piece) {
        return Err(OpError::NotAPiece);
    }
    if let Some(e) = collapse_obstruction(map, piece) {
        return Err(e);
    }
    let before = type_of(om)?;
    let remaining = before.d as i64 - piece.f as i64;
    if remaining <= 0 {
        return Err(OpError::PieceIsWholeSphere { remaining });
    }
    let (u, v) = (piece.u, piece.v);
    let paths: Vec<SaddlePath> = piece.darts.iter().map(|&d| saddle_path(map, d).unwrap()).collect();
    let ru = map.rotation(u);
    let k = piece.darts.len();
    let iu = ru.iter().position(|&x| x == piece.darts[k - 1]).unwrap();
    let a: Vec<usize> = (1..=ru.len() - k).map(|i| ru[(iu + i) % ru.len()]).collect();
    let rv = map.rotation(v);
    let q1 = paths[0].end_dart;
    let iv = rv.iter().position(|&x| x == q1).unwrap();
    let b: Vec<usize> = (1..=rv.len() - k).map(|i| rv[(iv + i) % rv.len()]).collect();
    let mut ed = Editor::from_map(map);
    for p in &paths {
        for w in p.interior_vertices(map) {
            ed.rots[w].clear();
        }
    }
    ed.rots[v].clear();
    let smooth = a.len() == 1 && b.len() == 1;
    if smooth {
        let (pa, pb) = (map.alpha(a[0]), map.alpha(b[0]));
        if pa == b[0] {
            return Err(OpError::PieceIsWholeSphere { remaining });
        }
        ed.rots[u].clear();
        ed.pair(pa, pb);
    } else {
        let mut merged = a.clone();
        merged.extend(b.iter().copied());
        ed.rots[u] = merged;
    }
    let (new_map, image) = ed.finish()?;
    let out = carry_colors(om, new_map, |x| image[x])?;
    let merged_deg = a.len() + b.len();
    let m = before.m - 2 + usize::from(merged_deg >= 3 && !smooth);
    verify(&out, BalanceType { g: before.g, d: before.d - piece.f, m })?;
    verify_local(&[om], &out)?;
    let site = if smooth {
        InsertSite::Edge { dart: image[map.alpha(a[0])].unwrap() }
    } else {
        let w = out.map.vertex_of(image[a[0]].unwrap());
        let rw = out.map.rotation(w);
        let start = rw.iter().position(|&x| x == image[a[0]].unwrap()).unwrap();
        InsertSite::Corner { vertex: w, start, size: a.len() }
    };
    Ok(Collapsed { map: out, site })
}

/// Glues a simple piece with `2f + 1` edges at `site`.
pub fn face_insert(om: &OrientedMap, site: &InsertSite, f: usize) -> Result<OrientedMap, OpError> {
    let map = &om.map;
    if f == 0 {
        return Err(OpError::InvalidPartition("a piece needs f >= 1".into()));
    }
    let before = type_of(om)?;
    let mut ed = Editor::from_map(map);
    let (w, a, b, was_corner) = match *site {
        InsertSite::Edge { dart } => {
            check_dart(map, dart)?;
            // subdivide: the new point carries one dart toward the head and one toward the tail
            let far = map.alpha(dart);
            let (to_head, to_tail) = ed.new_edge();
            ed.pair(dart, to_tail);
            ed.pair(far, to_head);
            let w = ed.new_vertex(vec![to_head, to_tail]);
            (w, vec![to_head], vec![to_tail], false)
        }
        InsertSite::Corner { vertex, start, size } => {
            if vertex >= map.vertex_count() {
                return Err(OpError::NoSuchVertex(vertex));
            }
            let r = map.rotation(vertex);
            let m = r.len();
            if start >= m || size == 0 || size >= m {
                return Err(OpError::InvalidPartition(format!("start {start}, size {size} at degree {m}")));
            }
            if size % 2 == 0 || m % 2 == 1 {
                return Err(OpError::ColorClash);
            }
            let a = (0..size).map(|i| r[(start + i) % m]).collect();
            let b = (size..m).map(|i| r[(start + i) % m]).collect();
            (vertex, a, b, m >= 3)
        }
    };
    let k = 2 * f + 1;
    let edges: Vec<(usize, usize)> = (0..k).map(|_| ed.new_edge()).collect();
    let mut ru: Vec<usize> = edges.iter().map(|e| e.0).collect();
    ru.extend(a.iter().copied());
    let mut rv: Vec<usize> = edges.iter().rev().map(|e| e.1).collect();
    rv.extend(b.iter().copied());
    ed.rots[w] = ru;
    ed.new_vertex(rv);
    let (new_map, image) = ed.finish()?;
    let out = carry_colors(om, new_map, |x| image[x])?;
    let m = before.m + 2 - usize::from(was_corner);
    verify(&out, BalanceType { g: before.g, d: before.d + f, m })?;
    verify_local(&[om], &out)?;
    Ok(out)
}

/// Exchanges endpoints across the edge of dart `s1`, which must join two distinct corners.
///
/// The dart after `s1` at its tail moves to the head, just before `alpha(s1)`, and the
/// dart after `alpha(s1)` moves to the tail, just before `s1`. The mirror move uses the
/// darts before and inserts just after; each undoes the other.
pub fn balanced_move_at(om: &OrientedMap, s1: usize, mirror: bool) -> Result<OrientedMap, OpError> {
    let map = &om.map;
    check_dart(map, s1)?;
    let before = type_of(om)?;
    let s2 = map.alpha(s1);
    let (p1, p2) = (map.vertex_of(s1), map.vertex_of(s2));
    if p1 == p2 || map.degree(p1) < 3 || map.degree(p2) < 3 {
        return Err(OpError::NotUniquelyJoined { p1, p2 });
    }
    let joins = map.rotation(p1).iter().filter(|&&x| map.vertex_of(map.alpha(x)) == p2).count();
    if joins != 1 || contraction_obstruction(map, s1).is_some() {
        return Err(OpError::NotUniquelyJoined { p1, p2 });
    }
    let (arc1, arc2) = if mirror { (map.sigma_inv(s1), map.sigma_inv(s2)) } else { (map.sigma(s1), map.sigma(s2)) };
    if arc1 == s1 || arc2 == s2 {
        return Err(OpError::DegreeTooSmall { vertex: p1, degree: map.degree(p1) });
    }
    let mut ed = Editor::from_map(map);
    let place = |rot: &[usize], remove: usize, anchor: usize, moved: usize| -> Vec<usize> {
        let mut out: Vec<usize> = rot.iter().copied().filter(|&x| x != remove).collect();
        let i = out.iter().position(|&x| x == anchor).unwrap();
        out.insert(if mirror { i + 1 } else { i }, moved);
        out
    };
    ed.rots[p1] = place(map.rotation(p1), arc1, s1, arc2);
    ed.rots[p2] = place(map.rotation(p2), arc2, s2, arc1);
    let (new_map, image) = ed.finish()?;
    // the joining edge now borders the faces behind the moved arcs, so it reverses direction
    let out = carry_colors(om, new_map, |x| if x == s1 || x == s2 { None } else { image[x] })?;
    verify(&out, before)?;
    verify_local(&[om], &out)?;
    Ok(out)
}

/// The balanced move between corners `p1` and `p2` with the given arcs.
///
/// `arc1` must sit at `p1` and `arc2` at `p2`, both next to the joining edge on its two
/// faces: either both right after it in counterclockwise order, or both right before it.
pub fn balanced_move(om: &OrientedMap, p1: usize, p2: usize, arc1: usize, arc2: usize) -> Result<OrientedMap, OpError> {
    let map = &om.map;
    if p1 >= map.vertex_count() {
        return Err(OpError::NoSuchVertex(p1));
    }
    check_dart(map, arc1)?;
    check_dart(map, arc2)?;
    let joining: Vec<usize> =
        map.rotation(p1).iter().copied().filter(|&x| map.vertex_of(map.alpha(x)) == p2).collect();
    if joining.len() != 1 {
        return Err(OpError::NotUniquelyJoined { p1, p2 });
    }
    let s1 = joining[0];
    let s2 = map.alpha(s1);
    if arc1 == map.sigma(s1) && arc2 == map.sigma(s2) {
        balanced_move_at(om, s1, false)
    } else if arc1 == map.sigma_inv(s1) && arc2 == map.sigma_inv(s2) {
        balanced_move_at(om, s1, true)
    } else {
        Err(OpError::ArcFaceMismatch)
    }
}

/// Puts the crossed edges of a closed curve in order: `left(c[i]) == right(c[i + 1])`.
pub fn order_curve(map: &Map, darts: &[usize]) -> Option<Vec<usize>> {
    let mut out = vec![darts[0]];
    let mut used = vec![false; darts.len()];
    used[0] = true;
    while out.len() < darts.len() {
        let last = *out.last().unwrap();
        let i = (0..darts.len()).find(|&i| !used[i] && map.right_face(darts[i]) == map.face_of(last))?;
        used[i] = true;
        out.push(darts[i]);
    }
    (map.face_of(*out.last().unwrap()) == map.right_face(out[0])).then_some(out)
}

fn validate_curve(map: &Map, curve: &[usize]) -> Result<(), OpError> {
    let k = curve.len();
    if k < 2 || k % 2 == 1 {
        return Err(OpError::InvalidCurve(format!("a closed curve crosses an even number of edges, got {k}")));
    }
    for &d in curve {
        check_dart(map, d)?;
    }
    let mut edges = HashSet::new();
    for i in 0..k {
        let (c, n) = (curve[i], curve[(i + 1) % k]);
        if map.face_of(c) != map.right_face(n) {
            return Err(OpError::InvalidCurve(format!("darts {c} and {n} do not share the face between them")));
        }
        if !edges.insert(map.edge_of(c)) {
            return Err(OpError::InvalidCurve(format!("edge of dart {c} is crossed twice")));
        }
    }
    Ok(())
}

/// Severs the crossed edges; returns the editor, the cap rotations for both sides, and the side of each vertex.
struct Severed {
    ed: Editor,
    /// New darts on the left (tail) side, in reverse curve order, and on the right side, in curve order.
    caps: [Vec<usize>; 2],
    side_of_vertex: Vec<usize>,
    /// Whole faces of each color on each side: `[side][color]`.
    whole: [[usize; 2]; 2],
}

fn sever(om: &OrientedMap, curve: &[usize]) -> Result<Severed, OpError> {
    let map = &om.map;
    validate_curve(map, curve)?;
    let mut ed = Editor::from_map(map);
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &c in curve {
        let h = map.alpha(c);
        let (t_new, h_new) = ed.new_edge();
        ed.pair(c, t_new);
        ed.pair(h, h_new);
        left.push(t_new);
        right.push(h_new);
    }
    left.reverse();
    // sides of vertices: flood from tails without crossing severed edges
    let mut crossed = vec![false; map.dart_count()];
    for &c in curve {
        crossed[c] = true;
        crossed[map.alpha(c)] = true;
    }
    let mut side = vec![usize::MAX; map.vertex_count()];
    for (s, seeds) in [(0usize, curve.iter().map(|&c| map.vertex_of(c)).collect::<Vec<_>>()),
        (1usize, curve.iter().map(|&c| map.vertex_of(map.alpha(c))).collect())]
    {
        for seed in seeds {
            if side[seed] == usize::MAX {
                side[seed] = s;
                let mut stack = vec![seed];
                while let Some(v) = stack.pop() {
                    for &d in map.rotation(v) {
                        if crossed[d] {
                            continue;
                        }
                        let w = map.vertex_of(map.alpha(d));
                        if side[w] == usize::MAX {
                            side[w] = s;
                            stack.push(w);
                        } else if side[w] != s {
                            return Err(OpError::NonSeparating);
                        }
                    }
                }
            } else if side[seed] != s {
                return Err(OpError::NonSeparating);
            }
        }
    }
    if side.iter().any(|&s| s == usize::MAX) {
        return Err(OpError::NonSeparating);
    }
    for s in 0..2 {
        if side.iter().filter(|&&x| x == s).count() == 1 {
            return Err(OpError::SingleVertexLoop);
        }
    }
    let crossed_faces: HashSet<usize> = curve.iter().map(|&c| map.face_of(c)).collect();
    let mut whole = [[0usize; 2]; 2];
    for f in 0..map.face_count() {
        if crossed_faces.contains(&f) {
            continue;
        }
        let s = side[map.vertex_of(map.face(f)[0])];
        let c = usize::from(om.coloring.color(f) == Color::B);
        whole[s][c] += 1;
    }
    // A face crossed several times splits into several regions. Each side closes
    // k/2 wedges of each color, so a side with fewer distinct regions than wedges
    // of a color holds correspondingly fewer faces of that color.
    for &f in &crossed_faces {
        let c = usize::from(om.coloring.color(f) == Color::B);
        let passages = crossed_regions(map, curve, f, &side);
        for s in 0..2 {
            let held = whole[s][c] + passages.regions[s];
            whole[s][c] = held.saturating_sub(passages.wedges);
            if held < passages.wedges {
                return Err(OpError::InvalidCurve(format!("face {f} is split inconsistently")));
            }
        }
    }
    Ok(Severed { ed, caps: [left, right], side_of_vertex: side, whole })
}

struct FaceRegions {
    /// Passages of the curve through the face; each leaves one wedge per side.
    wedges: usize,
    /// Distinct regions of the face on each side.
    regions: [usize; 2],
}

/// Regions of face `f` cut out by the passages of `curve`. A passage runs from
/// the crossing dart `curve[i]` to the reverse of `curve[i + 1]`, both on `f`.
fn crossed_regions(map: &Map, curve: &[usize], f: usize, side: &[usize]) -> FaceRegions {
    let k = curve.len();
    let boundary = map.face(f);
    let chords: Vec<(usize, usize)> =
        (0..k).filter(|&i| map.face_of(curve[i]) == f).map(|i| (curve[i], map.alpha(curve[(i + 1) % k]))).collect();
    // segments of the boundary, each named by the chord endpoint it follows
    let ends: Vec<usize> = boundary.iter().copied().filter(|&d| chords.iter().any(|&(x, y)| d == x || d == y)).collect();
    let index = |d: usize| ends.iter().position(|&e| e == d).unwrap();
    let before = |d: usize| (index(d) + ends.len() - 1) % ends.len();
    let mut parent: Vec<usize> = (0..ends.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(x, y) in &chords {
        for (a, b) in [(index(x), before(y)), (index(y), before(x))] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let mut seen = HashSet::new();
    let mut regions = [0; 2];
    for (i, &e) in ends.iter().enumerate() {
        let r = find(&mut parent, i);
        if seen.insert(r) {
            regions[side[map.vertex_of(map.alpha(e))]] += 1;
        }
    }
    FaceRegions { wedges: chords.len(), regions }
}

fn split_sides(om: &OrientedMap, sev: &Severed, ed: &Editor) -> Result<(OrientedMap, OrientedMap), OpError> {
    let (maps, image) = ed.finish_components()?;
    if maps.len() != 2 {
        return Err(OpError::NonSeparating);
    }
    let map = &om.map;
    let comp_of_side = |s: usize| {
        let v = sev.side_of_vertex.iter().position(|&x| x == s).unwrap();
        image[map.rotation(v)[0]].unwrap().0
    };
    let mut out = Vec::new();
    for s in 0..2 {
        let c = comp_of_side(s);
        let m = maps[c].clone();
        out.push(carry_colors(om, m, |d| {
            if d < map.dart_count() {
                image[d].filter(|p| p.0 == c).map(|p| p.1)
            } else {
                None
            }
        })?);
    }
    let r = out.pop().unwrap();
    let l = out.pop().unwrap();
    Ok((l, r))
}

/// Cuts along a separating curve whose sides hold equally many whole faces of each color.
///
/// `curve` lists the crossed edges by darts pointing from the left side to the right
/// side, ordered so that the face left of each dart is the face right of the next.
/// Each side is closed by a vertex joined to its stubs; with two stubs they are joined directly.
pub fn balanced_cut(om: &OrientedMap, curve: &[usize]) -> Result<(OrientedMap, OrientedMap), OpError> {
    let sev = sever(om, curve)?;
    for s in 0..2 {
        let [a, b] = sev.whole[s];
        if a != b {
            return Err(OpError::ColorCountMismatch { side: s, a, b });
        }
    }
    let mut ed = sev.ed.clone();
    for cap in &sev.caps {
        close_cap(&mut ed, cap.clone());
    }
    let (l, r) = split_sides(om, &sev, &ed)?;
    verify_local(&[om], &l)?;
    verify_local(&[om], &r)?;
    let total = type_of(om)?;
    let (tl, tr) = (type_of(&l).map_err(|e| OpError::OperationBrokeBalance(e.to_string()))?, type_of(&r).map_err(|e| OpError::OperationBrokeBalance(e.to_string()))?);
    if tl.d + tr.d != total.d + curve.len() / 2 || tl.g + tr.g != total.g {
        return Err(OpError::OperationBrokeBalance(format!("cut of {total} gave {tl} and {tr}")));
    }
    Ok((l, r))
}

/// Closes a side: a vertex on the stubs, or a single edge when there are two.
fn close_cap(ed: &mut Editor, cap: Vec<usize>) {
    if cap.len() == 2 {
        let (a, b) = (ed.alpha[cap[0]], ed.alpha[cap[1]]);
        ed.pair(a, b);
    } else if !cap.is_empty() {
        ed.new_vertex(cap);
    }
}

/// Cuts along a separating curve with a one-face color surplus on each side.
///
/// On the side with an extra A face the stubs bracketing the first B wedge are joined,
/// merging the two A wedges around it; symmetrically on the other side. Remaining
/// stubs are closed as in [`balanced_cut`].
pub fn tangle_cut(om: &OrientedMap, curve: &[usize]) -> Result<(OrientedMap, OrientedMap), OpError> {
    if curve.len() < 4 {
        return Err(OpError::InvalidCurve("a tangle cut crosses at least four edges".into()));
    }
    let sev = sever(om, curve)?;
    let mut ed = sev.ed.clone();
    for s in 0..2 {
        let [a, b] = sev.whole[s];
        let surplus = if a == b + 1 {
            Color::A
        } else if b == a + 1 {
            Color::B
        } else {
            return Err(OpError::ColorCountMismatch { side: s, a, b });
        };
        let cap = &sev.caps[s];
        let k = cap.len();
        // wedge j lies between cap[j] and cap[j + 1] and is part of a crossed face
        let wedge_color = |j: usize| -> Color {
            if s == 0 {
                om.dart_color(curve[k - 1 - j]).other()
            } else {
                om.dart_color(curve[j])
            }
        };
        let j = (0..k).find(|&j| wedge_color(j) != surplus).unwrap();
        let (x, y) = (cap[j], cap[(j + 1) % k]);
        let (px, py) = (ed.alpha[x], ed.alpha[y]);
        ed.pair(px, py);
        let rest: Vec<usize> = (2..k).map(|i| cap[(j + i) % k]).collect();
        close_cap(&mut ed, rest);
    }
    let (l, r) = split_sides(om, &sev, &ed)?;
    verify_local(&[om], &l)?;
    verify_local(&[om], &r)?;
    let total = type_of(om)?;
    let tl = type_of(&l).map_err(|e| OpError::OperationBrokeBalance(e.to_string()))?;
    let tr = type_of(&r).map_err(|e| OpError::OperationBrokeBalance(e.to_string()))?;
    if tl.d + tr.d != total.d + curve.len() / 2 - 1 || tl.g + tr.g != total.g {
        return Err(OpError::OperationBrokeBalance(format!("tangle cut of {total} gave {tl} and {tr}")));
    }
    Ok((l, r))
}

/// Two boundary edges of one face, given by darts having that face on their left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rectangle {
    pub e1: usize,
    pub e2: usize,
}

/// Result of [`murasugi_sum`]: the sum and the seam, a tangle-cut curve separating the summands.
#[derive(Debug, Clone)]
pub struct Summed {
    pub map: OrientedMap,
    pub seam: Vec<usize>,
}

fn check_rectangle(map: &Map, r: Rectangle) -> Result<usize, OpError> {
    check_dart(map, r.e1)?;
    check_dart(map, r.e2)?;
    if map.face_of(r.e1) != map.face_of(r.e2) {
        return Err(OpError::InvalidRectangle("darts lie on different faces".into()));
    }
    if map.edge_of(r.e1) == map.edge_of(r.e2) {
        return Err(OpError::InvalidRectangle("darts lie on the same edge".into()));
    }
    Ok(map.face_of(r.e1))
}

/// Murasugi sum: pinches the rectangle's face in each map into a 4-valent vertex and glues the two vertices.
pub fn murasugi_sum(om1: &OrientedMap, rect1: Rectangle, om2: &OrientedMap, rect2: Rectangle) -> Result<Summed, OpError> {
    let x = check_rectangle(&om1.map, rect1)?;
    let y = check_rectangle(&om2.map, rect2)?;
    if om1.coloring.color(x) == om2.coloring.color(y) {
        return Err(OpError::SameColorFaces);
    }
    let t1 = type_of(om1)?;
    let t2 = type_of(om2)?;
    let (m1, m2) = (&om1.map, &om2.map);
    let shift = m1.dart_count();
    let p = [rect1.e1, m1.alpha(rect1.e1), rect1.e2, m1.alpha(rect1.e2)];
    let q = [rect2.e1 + shift, m2.alpha(rect2.e1) + shift, rect2.e2 + shift, m2.alpha(rect2.e2) + shift];
    let expected = BalanceType { g: t1.g + t2.g, d: t1.d + t2.d - 1, m: t1.m + t2.m };
    let mut last_err = None;
    for t in 0..4 {
        let mut ed = Editor::union(m1, m2);
        for i in 0..4 {
            ed.pair(p[i], q[(t + 4 - i) % 4]);
        }
        let (new_map, image) = match ed.finish() {
            Ok(r) => r,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        if new_map.genus() != expected.g {
            continue;
        }
        let glued = |d: usize| -> Option<usize> { image[d] };
        let c1 = match carry_colors(om1, new_map.clone(), glued) {
            Ok(c) => c,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let agrees = (0..m2.dart_count()).all(|d| c1.dart_color(image[d + shift].unwrap()) == om2.dart_color(d));
        if !agrees {
            continue;
        }
        if let Err(e) = verify(&c1, expected).and_then(|_| verify_local(&[om1, om2], &c1)) {
            last_err = Some(e);
            continue;
        }
        let crossing: Vec<usize> = p.iter().map(|&d| image[d].unwrap()).collect();
        let seam = order_curve(&c1.map, &crossing)
            .ok_or_else(|| OpError::OperationBrokeBalance("seam is not a closed curve".into()))?;
        return Ok(Summed { map: c1, seam });
    }
    Err(last_err.unwrap_or_else(|| OpError::OperationBrokeBalance("no gluing preserves colors".into())))
}

/// One step of the operation groupoid, for random sampling and the command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Operation {
    Contract { dart: usize },
    Expand { vertex: usize, part: Vec<usize> },
    Collapse { piece: SimplePiece },
    Insert { site: InsertSite, f: usize },
    Move { dart: usize, mirror: bool },
}

impl Operation {
    pub fn name(&self) -> &'static str {
        match self {
            Operation::Contract { .. } => "contract",
            Operation::Expand { .. } => "expand",
            Operation::Collapse { .. } => "collapse",
            Operation::Insert { .. } => "insert",
            Operation::Move { .. } => "move",
        }
    }

    pub fn apply(&self, om: &OrientedMap) -> Result<OrientedMap, OpError> {
        match self {
            Operation::Contract { dart } => edge_contract(om, *dart).map(|c| c.map),
            Operation::Expand { vertex, part } => vertex_expand(om, *vertex, part).map(|e| e.map),
            Operation::Collapse { piece } => face_collapse(om, piece).map(|c| c.map),
            Operation::Insert { site, f } => face_insert(om, site, *f),
            Operation::Move { dart, mirror } => balanced_move_at(om, *dart, *mirror),
        }
    }
}

/// Every contraction, expansion, collapse and move applicable to `om`, plus unit-size insertions.
pub fn applicable_operations(om: &OrientedMap) -> Vec<Operation> {
    let map = &om.map;
    let mut ops = Vec::new();
    for d in 0..map.dart_count() {
        if om.is_forward(d) && map.degree(map.vertex_of(d)) >= 3 && contraction_obstruction(map, d).is_none() {
            ops.push(Operation::Contract { dart: d });
        }
    }
    for v in 0..map.vertex_count() {
        for part in vertex_expansions(map, v) {
            ops.push(Operation::Expand { vertex: v, part });
        }
    }
    if let Ok(t) = is_globally_balanced(map) {
        for piece in find_simple_pieces(map) {
            if piece.f < t.d && collapse_obstruction(map, &piece).is_none() {
                ops.push(Operation::Collapse { piece });
            }
        }
    }
    for d in 0..map.dart_count() {
        if om.is_forward(d) {
            ops.push(Operation::Insert { site: InsertSite::Edge { dart: d }, f: 1 });
        }
        let (p1, p2) = (map.vertex_of(d), map.vertex_of(map.alpha(d)));
        if p1 < p2 && map.degree(p1) >= 3 && map.degree(p2) >= 3 {
            let joins = map.rotation(p1).iter().filter(|&&x| map.vertex_of(map.alpha(x)) == p2).count();
            if joins == 1 && contraction_obstruction(map, d).is_none() {
                ops.push(Operation::Move { dart: d, mirror: false });
                ops.push(Operation::Move { dart: d, mirror: true });
            }
        }
    }
    for v in 0..map.vertex_count() {
        let deg = map.degree(v);
        if deg >= 4 {
            for size in (1..deg).step_by(2) {
                ops.push(Operation::Insert { site: InsertSite::Corner { vertex: v, start: 0, size }, f: 1 });
            }
        }
    }
    ops
}

/// All maps reachable from `roots` by non-splitting contractions, one per color-preserving isomorphism class.
///
/// The breadth-first search expands each frontier in parallel and keeps results in discovery order.
pub fn contraction_closure(roots: &[OrientedMap], include_roots: bool) -> Vec<OrientedMap> {
    let mut seen: HashSet<CanonicalForm> = HashSet::new();
    let mut out = Vec::new();
    let mut frontier: Vec<OrientedMap> = Vec::new();
    for r in roots {
        if seen.insert(r.canonical_form()) {
            if include_roots {
                out.push(r.clone());
            }
            frontier.push(r.clone());
        }
    }
    while !frontier.is_empty() {
        let children: Vec<Vec<(CanonicalForm, OrientedMap)>> = frontier
            .par_iter()
            .map(|om| {
                let mut local: Vec<(CanonicalForm, OrientedMap)> = Vec::new();
                for d in 0..om.map.dart_count() {
                    if !om.is_forward(d) || om.map.degree(om.map.vertex_of(d)) < 3 {
                        continue;
                    }
                    if let Ok(c) = edge_contract(om, d) {
                        let key = c.map.canonical_form();
                        if !local.iter().any(|(k, _)| *k == key) {
                            local.push((key, c.map));
                        }
                    }
                }
                local
            })
            .collect();
        let mut next = Vec::new();
        for (key, om) in children.into_iter().flatten() {
            if seen.insert(key) {
                out.push(om.clone());
                next.push(om);
            }
        }
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real_enum::{noncrossing_matchings, real_gb_graph};

    fn real(d: usize, i: usize) -> OrientedMap {
        real_gb_graph(&noncrossing_matchings(d).nth(i).unwrap())
    }

    #[test]
    fn contract_real_cubic_graph() {
        let om = real(3, 0);
        let mut ok = 0;
        for d in 0..om.map.dart_count() {
            match edge_contract(&om, d) {
                Ok(c) => {
                    ok += 1;
                    let t = is_globally_balanced(&c.map.map).unwrap();
                    assert_eq!(t, BalanceType { g: 0, d: 3, m: 3 });
                }
                Err(OpError::SplittingEdge { .. }) | Err(OpError::WouldCreateLoop { .. }) => {}
                Err(e) => panic!("unexpected {e}"),
            }
        }
        assert!(ok > 0);
    }

    #[test]
    fn expansion_counts() {
        for m in [6, 8, 10, 12] {
            let parts = vertex_expansions(&crate::surface_map::examples::bundle(m), 0);
            assert_eq!(parts.len(), count_vertex_expansions(m), "m = {m}");
        }
        assert_eq!(count_vertex_expansions(6), 3);
        assert_eq!(count_vertex_expansions(8), 8);
    }

    #[test]
    fn move_then_mirror_restores() {
        let om = real(4, 1);
        let mut tried = 0;
        for d in 0..om.map.dart_count() {
            if let Ok(moved) = balanced_move_at(&om, d, false) {
                tried += 1;
                let back = balanced_move_at(&moved, d, true).unwrap();
                assert_eq!(back, om);
            }
        }
        assert!(tried > 0);
    }
}
