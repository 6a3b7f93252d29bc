//! Real generic balanced graphs and their enumeration by noncrossing matchings.
//!
//! The `2d - 2` vertices sit on the real circle at positions `0..2d-2`. Each
//! matched pair is joined by an arc in the upper half plane and by its mirror
//! image in the lower half plane; consecutive positions are joined by the real
//! edges, the last one passing through infinity.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::balance::{self, BalanceError, OrientedMap};
use crate::ops;
use crate::surface_map::{Map, MapBuilder};

/// `C(2d - 2, d - 1) / d`, the number of noncrossing perfect matchings of `2d - 2` points.
pub fn catalan_rho(d: u32) -> BigUint {
    assert!(d >= 1, "degree must be positive");
    let n = 2 * d - 2;
    let k = d - 1;
    let mut num = BigUint::one();
    for i in 0..k {
        num *= BigUint::from(n - i);
        num /= BigUint::from(i + 1);
    }
    num / BigUint::from(d)
}

/// A noncrossing perfect matching of the points `0..2d-2` (displayed 1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NoncrossingMatching {
    pub d: usize,
    /// Pairs `(i, j)` with `i < j`, sorted by `i`.
    pub pairs: Vec<(usize, usize)>,
}

impl NoncrossingMatching {
    pub fn new(d: usize, mut pairs: Vec<(usize, usize)>) -> Option<Self> {
        let n = 2 * d - 2;
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        let mut seen = vec![false; n];
        for &(i, j) in &pairs {
            if j >= n || i == j || seen[i] || seen[j] {
                return None;
            }
            seen[i] = true;
            seen[j] = true;
        }
        if seen.iter().any(|s| !s) {
            return None;
        }
        for &(i, j) in &pairs {
            for &(k, l) in &pairs {
                if i < k && k < j && j < l {
                    return None;
                }
            }
        }
        Some(NoncrossingMatching { d, pairs })
    }

    pub fn points(&self) -> usize {
        2 * self.d - 2
    }

    /// Partner of each point.
    pub fn partner(&self) -> Vec<usize> {
        let mut p = vec![0; self.points()];
        for &(i, j) in &self.pairs {
            p[i] = j;
            p[j] = i;
        }
        p
    }
}

fn matchings_of(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
    // matchings of the points lo..hi (hi exclusive)
    if lo >= hi {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut j = lo + 1;
    while j < hi {
        for inner in matchings_of(lo + 1, j) {
            for outer in matchings_of(j + 1, hi) {
                let mut m = vec![(lo, j)];
                m.extend(inner.iter().copied());
                m.extend(outer.iter().copied());
                m.sort_unstable();
                out.push(m);
            }
        }
        j += 2;
    }
    out
}

/// All noncrossing perfect matchings of `2d - 2` points, in a fixed order.
pub fn noncrossing_matchings(d: usize) -> impl Iterator<Item = NoncrossingMatching> {
    assert!(d >= 1);
    matchings_of(0, 2 * d - 2).into_iter().map(move |pairs| NoncrossingMatching { d, pairs })
}

/// Dart bookkeeping of a real graph, useful for labeling and drawing.
#[derive(Debug, Clone)]
pub struct RealLayout {
    /// Real edge `i` joins position `i` to `i + 1` (the last one through infinity): `(dart at i, dart at i+1)`.
    pub real: Vec<(usize, usize)>,
    /// Upper arc per matched pair, as `(dart at i, dart at j)`.
    pub upper: Vec<(usize, usize)>,
    /// Lower arc per matched pair, as `(dart at i, dart at j)`.
    pub lower: Vec<(usize, usize)>,
}

/// The map of a real graph whose vertex `i` sits at position `i` on the real circle.
///
/// `arcs` lists the upper arcs as position pairs `(i, j)`, `i < j`; they must be
/// noncrossing. The lower arcs mirror them.
pub fn real_arc_map(points: usize, arcs: &[(usize, usize)]) -> (Map, RealLayout) {
    let n = points;
    let mut b = MapBuilder::new(n);
    let real: Vec<(usize, usize)> = (0..n).map(|_| b.add_edge()).collect();
    let upper: Vec<(usize, usize)> = arcs.iter().map(|_| b.add_edge()).collect();
    let lower: Vec<(usize, usize)> = arcs.iter().map(|_| b.add_edge()).collect();
    // The rotation at v: right real edge, upper arcs, left real edge, lower arcs.
    let mut rotations: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        let mut right: Vec<(usize, usize, usize)> = Vec::new(); // (span, upper dart, lower dart)
        let mut left: Vec<(usize, usize, usize)> = Vec::new();
        for (k, &(i, j)) in arcs.iter().enumerate() {
            if i == v {
                right.push((j - i, upper[k].0, lower[k].0));
            }
            if j == v {
                left.push((j - i, upper[k].1, lower[k].1));
            }
        }
        // Leaving v upwards and counterclockwise from the positive real direction, nested arcs to the
        // right appear innermost first, then arcs to the left appear outermost first.
        right.sort_unstable();
        left.sort_unstable_by(|a, b| b.cmp(a));
        let mut rot = vec![real[v].0];
        rot.extend(right.iter().map(|r| r.1));
        rot.extend(left.iter().map(|l| l.1));
        rot.push(real[(v + n - 1) % n].1);
        // lower half, continuing counterclockwise from the negative real direction
        rot.extend(left.iter().rev().map(|l| l.2));
        rot.extend(right.iter().rev().map(|r| r.2));
        rotations[v] = rot;
    }
    for (v, rot) in rotations.into_iter().enumerate() {
        b.set_rotation(v, rot);
    }
    (b.build().expect("real arc systems are valid maps"), RealLayout { real, upper, lower })
}

/// The real generic balanced graph of a noncrossing matching, colored from its default root.
pub fn real_gb_graph(m: &NoncrossingMatching) -> OrientedMap {
    let (map, _) = real_arc_map(m.points(), &m.pairs);
    OrientedMap::from_map(map).expect("real graphs are two-colorable")
}

/// A real arc system: `points` vertices on the real circle and the upper arcs between them,
/// parallel arcs listed repeatedly. Each vertex carries at least one arc.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArcSystem {
    pub points: usize,
    pub arcs: Vec<(usize, usize)>,
}

impl ArcSystem {
    /// Generic systems are perfect matchings: every vertex is 4-valent.
    pub fn is_generic(&self) -> bool {
        let mut deg = vec![0; self.points];
        for &(i, j) in &self.arcs {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg.iter().all(|&x| x == 1)
    }

    pub fn graph(&self) -> OrientedMap {
        let (map, _) = real_arc_map(self.points, &self.arcs);
        OrientedMap::from_map(map).expect("real graphs are two-colorable")
    }
}

fn crosses(a: (usize, usize), b: (usize, usize)) -> bool {
    (a.0 < b.0 && b.0 < a.1 && a.1 < b.1) || (b.0 < a.0 && a.0 < b.1 && b.1 < a.1)
}

/// Every real arc system of degree `d`: `d - 1` noncrossing arcs, possibly parallel, covering all points.
pub fn real_arc_systems(d: usize) -> Vec<ArcSystem> {
    assert!(d >= 2);
    let arcs_total = d - 1;
    let mut out = Vec::new();
    for n in 2..=2 * d - 2 {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        // distinct noncrossing arc sets covering every point, then multiplicities
        fn rec(
            pairs: &[(usize, usize)],
            start: usize,
            chosen: &mut Vec<(usize, usize)>,
            max: usize,
            n: usize,
            sets: &mut Vec<Vec<(usize, usize)>>,
        ) {
            let mut covered = vec![false; n];
            for &(i, j) in chosen.iter() {
                covered[i] = true;
                covered[j] = true;
            }
            if covered.iter().all(|&c| c) {
                sets.push(chosen.clone());
            }
            if chosen.len() == max {
                return;
            }
            for k in start..pairs.len() {
                if chosen.iter().all(|&c| !crosses(c, pairs[k])) {
                    chosen.push(pairs[k]);
                    rec(pairs, k + 1, chosen, max, n, sets);
                    chosen.pop();
                }
            }
        }
        let mut sets = Vec::new();
        rec(&pairs, 0, &mut Vec::new(), arcs_total, n, &mut sets);
        for set in sets {
            // compositions of arcs_total into set.len() positive parts
            fn compose(k: usize, total: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if k == 1 {
                    cur.push(total);
                    out.push(cur.clone());
                    cur.pop();
                    return;
                }
                for x in 1..=total - (k - 1) {
                    cur.push(x);
                    compose(k - 1, total - x, cur, out);
                    cur.pop();
                }
            }
            if set.len() > arcs_total {
                continue;
            }
            let mut comps = Vec::new();
            compose(set.len(), arcs_total, &mut Vec::new(), &mut comps);
            for mult in comps {
                let arcs = set.iter().zip(&mult).flat_map(|(&a, &m)| std::iter::repeat(a).take(m)).collect();
                out.push(ArcSystem { points: n, arcs });
            }
        }
    }
    out
}

/// Outcome of searching contraction sequences from generic real graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReachReport {
    pub d: usize,
    /// Non-generic real arc systems of this degree.
    pub candidates: usize,
    /// Those that are globally and locally balanced.
    pub balanced: usize,
    /// Balanced candidates isomorphic to a contraction descendant of a generic graph.
    pub reached: usize,
    /// Balanced candidates that were not reached.
    pub missing: Vec<ArcSystem>,
}

/// Checks that every balanced non-generic real graph arises from a generic one by contractions.
pub fn nongeneric_reachability(d: usize) -> Result<ReachReport, BalanceError> {
    let mut roots = Vec::new();
    for m in noncrossing_matchings(d) {
        let om = real_gb_graph(&m);
        roots.push(om.flipped());
        roots.push(om);
    }
    let closure: std::collections::HashSet<_> =
        ops::contraction_closure(&roots, true).iter().map(|om| om.canonical_form()).collect();
    let mut report = ReachReport { d, candidates: 0, balanced: 0, reached: 0, missing: Vec::new() };
    for sys in real_arc_systems(d).into_iter().filter(|s| !s.is_generic()) {
        report.candidates += 1;
        let om = sys.graph();
        if balance::is_globally_balanced(&om.map).is_err() || !balance::is_locally_balanced(&om)?.balanced {
            continue;
        }
        report.balanced += 1;
        if closure.contains(&om.canonical_form()) {
            report.reached += 1;
        } else {
            report.missing.push(sys);
        }
    }
    Ok(report)
}

/// Counts from checking the real theorem and its corollary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealReport {
    pub d: usize,
    pub graphs: usize,
    pub locally_balanced: usize,
    pub descendants: usize,
    pub descendants_balanced: usize,
}

/// Checks local balance on every real generic graph of degree `d`, in both colorings,
/// and optionally on every edge-contraction descendant.
pub fn verify_real_theorem(d: usize, descendants: bool) -> Result<RealReport, BalanceError> {
    let mut report = RealReport { d, graphs: 0, locally_balanced: 0, descendants: 0, descendants_balanced: 0 };
    let mut roots = Vec::new();
    for m in noncrossing_matchings(d) {
        let om = real_gb_graph(&m);
        report.graphs += 1;
        if balance::is_locally_balanced(&om)?.balanced && balance::is_locally_balanced(&om.flipped())?.balanced {
            report.locally_balanced += 1;
        }
        roots.push(om);
    }
    if descendants {
        for om in ops::contraction_closure(&roots, false) {
            report.descendants += 1;
            if balance::is_locally_balanced(&om)?.balanced && balance::is_locally_balanced(&om.flipped())?.balanced {
                report.descendants_balanced += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_values() {
        let v: Vec<u64> = (2..=8).map(|d| catalan_rho(d).try_into().unwrap()).collect();
        assert_eq!(v, vec![1, 2, 5, 14, 42, 132, 429]);
    }

    #[test]
    fn d2_graph_shape() {
        let m = noncrossing_matchings(2).next().unwrap();
        let om = real_gb_graph(&m);
        assert_eq!((om.map.vertex_count(), om.map.edge_count(), om.map.face_count()), (2, 4, 4));
    }

    #[test]
    fn rejects_crossing_pairs() {
        assert!(NoncrossingMatching::new(3, vec![(0, 2), (1, 3)]).is_none());
        assert!(NoncrossingMatching::new(3, vec![(0, 3), (1, 2)]).is_some());
    }
}
