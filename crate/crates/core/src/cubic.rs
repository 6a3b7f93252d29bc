//! The cubic family `φ_a(z) = (a z³ + (1 − 2a) z²) / ((2 − a) z − 1)`.
//!
//! Each `φ_a` has critical points `0`, `1`, `∞` and `c(a) = (2a − 1)/(a(2 − a))`
//! and a single finite pole `z∞ = 1/(2 − a)`. The pullback of the real line
//! by a real `φ_a` is a balanced map on the sphere with four corners at the
//! critical points. [`classify_real`] predicts it from the position of `c`
//! and the coefficient branch; [`trace_pullback`] and [`trace_curve`] compute
//! it numerically.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::balance::OrientedMap;
use crate::ops::{carry_colors, Editor};
use crate::real_enum::real_arc_map;
use crate::surface_map::{canonical_form_by, CanonicalForm, Map};

/// Parameters closer than this to the excluded set are rejected.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Default marching-squares resolution.
pub const DEFAULT_GRID: usize = 800;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum CubicError {
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("the real tracer needs real a, got {0}")]
    NotReal(String),
    #[error("grid too coarse: {0}")]
    ResolutionTooCoarse(String),
    #[error("critical points {0} and {1} fall within two grid cells")]
    CriticalPointsNotResolved(String, String),
    #[error("invalid post-critical curve: {0}")]
    InvalidCurve(String),
    #[error("path lifting failed: {0}")]
    PathLifting(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Branch {
    Alpha,
    Beta,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Alpha => "alpha",
            Branch::Beta => "beta",
        })
    }
}

/// `c(a) = (2a − 1)/(a(2 − a))`.
pub fn c_of_a(a: Complex64) -> Complex64 {
    (2.0 * a - 1.0) / (a * (2.0 - a))
}

/// The pole `1/(2 − a)`.
pub fn z_inf(a: Complex64) -> Complex64 {
    1.0 / (2.0 - a)
}

fn check_a(a: Complex64) -> Result<(), CubicError> {
    for bad in [-1.0, 0.0, 0.5, 1.0, 2.0] {
        if (a - bad).norm() < DEGENERACY_TOL {
            return Err(CubicError::DegenerateParameter(format!("a = {a} lies in {{-1, 0, 1/2, 1, 2}}")));
        }
    }
    Ok(())
}

fn coeff(c: Complex64, sign: f64) -> Result<Complex64, CubicError> {
    if c.norm() < DEGENERACY_TOL {
        return Err(CubicError::DegenerateParameter("c = 0".into()));
    }
    let root = (c * c - c + 1.0).sqrt();
    let a = (sign * root - 1.0 + c) / c;
    check_a(a)?;
    Ok(a)
}

/// `α(c) = (√(c² − c + 1) − 1 + c)/c` with the principal square root.
pub fn alpha_coeff(c: Complex64) -> Result<Complex64, CubicError> {
    coeff(c, 1.0)
}

/// `β(c) = (−√(c² − c + 1) − 1 + c)/c` with the principal square root.
pub fn beta_coeff(c: Complex64) -> Result<Complex64, CubicError> {
    coeff(c, -1.0)
}

pub fn branch_coeff(branch: Branch, c: Complex64) -> Result<Complex64, CubicError> {
    match branch {
        Branch::Alpha => alpha_coeff(c),
        Branch::Beta => beta_coeff(c),
    }
}

/// Whether the two branches agree at `c`, which happens exactly when `c² − c + 1 = 0`.
pub fn branches_coincide(c: Complex64) -> bool {
    (c * c - c + 1.0).norm() <= 1e-12 * (1.0 + c.norm_sqr())
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    /// Chordal distance.
    pub fn chordal(self, other: SpherePoint) -> f64 {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
            (SpherePoint::Finite(z), SpherePoint::Infinity) | (SpherePoint::Infinity, SpherePoint::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
            }
        }
    }
}

/// A valid coefficient `a`, optionally tagged with the branch it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicParams {
    pub a: Complex64,
    pub branch: Option<Branch>,
}

impl CubicParams {
    pub fn new(a: Complex64) -> Result<Self, CubicError> {
        check_a(a)?;
        Ok(CubicParams { a, branch: None })
    }

    pub fn from_c(branch: Branch, c: Complex64) -> Result<Self, CubicError> {
        Ok(CubicParams { a: branch_coeff(branch, c)?, branch: Some(branch) })
    }

    pub fn c(&self) -> Complex64 {
        c_of_a(self.a)
    }

    pub fn z_inf(&self) -> Complex64 {
        z_inf(self.a)
    }

    pub fn is_real(&self) -> bool {
        self.a.im.abs() < 1e-12
    }

    /// `φ_a(c) = a²c³`.
    pub fn critical_value(&self) -> Complex64 {
        let c = self.c();
        self.a * self.a * c * c * c
    }

    pub fn eval(&self, z: SpherePoint) -> SpherePoint {
        phi_eval(self.a, z)
    }
}

/// `φ_a(z)`, with the pole and infinity sent to [`SpherePoint::Infinity`].
pub fn phi_eval(a: Complex64, z: SpherePoint) -> SpherePoint {
    match z {
        SpherePoint::Infinity => SpherePoint::Infinity,
        SpherePoint::Finite(z) => {
            let den = (2.0 - a) * z - 1.0;
            if den == Complex64::new(0.0, 0.0) {
                return SpherePoint::Infinity;
            }
            SpherePoint::Finite((a * z * z * z + (1.0 - 2.0 * a) * z * z) / den)
        }
    }
}

/// `φ_a(c(a))`.
pub fn phi_critical_value(a: Complex64) -> Complex64 {
    CubicParams { a, branch: None }.critical_value()
}

/// One of the three intervals of real `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Interval {
    Negative,
    Unit,
    AboveOne,
}

impl Interval {
    pub fn of(c: f64) -> Option<Interval> {
        if c < 0.0 {
            Some(Interval::Negative)
        } else if c > 0.0 && c < 1.0 {
            Some(Interval::Unit)
        } else if c > 1.0 {
            Some(Interval::AboveOne)
        } else {
            None
        }
    }

    pub fn contains(self, c: f64) -> bool {
        Interval::of(c) == Some(self)
    }
}

impl std::str::FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "alpha" | "α" | "a" => Ok(Branch::Alpha),
            "beta" | "β" | "b" => Ok(Branch::Beta),
            other => Err(format!("unknown branch {other:?}, expected alpha or beta")),
        }
    }
}

impl std::str::FromStr for Interval {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        match t.as_str() {
            "(-inf,0)" | "(-∞,0)" | "<0" | "negative" => Ok(Interval::Negative),
            "(0,1)" | "unit" => Ok(Interval::Unit),
            "(1,inf)" | "(1,∞)" | ">1" | "above-one" => Ok(Interval::AboveOne),
            _ => Err(format!("unknown interval {s:?}, expected (-inf,0), (0,1) or (1,inf)")),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Interval::Negative => "(-inf,0)",
            Interval::Unit => "(0,1)",
            Interval::AboveOne => "(1,inf)",
        })
    }
}

/// A branch and an interval of real `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RealConfig {
    pub branch: Branch,
    pub interval: Interval,
}

impl RealConfig {
    pub fn all() -> [RealConfig; 6] {
        let mut out = [RealConfig { branch: Branch::Alpha, interval: Interval::Negative }; 6];
        let mut i = 0;
        for branch in [Branch::Alpha, Branch::Beta] {
            for interval in [Interval::Negative, Interval::Unit, Interval::AboveOne] {
                out[i] = RealConfig { branch, interval };
                i += 1;
            }
        }
        out
    }

    /// A representative value of `c` in the interval.
    pub fn sample_c(self) -> f64 {
        match self.interval {
            Interval::Negative => -2.0,
            Interval::Unit => 0.5,
            Interval::AboveOne => 3.0,
        }
    }
}

impl fmt::Display for RealConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} c in {}", self.branch, self.interval)
    }
}

/// The four critical points as vertex labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CriticalLabel {
    C,
    Zero,
    One,
    Infinity,
}

impl fmt::Display for CriticalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CriticalLabel::C => "c",
            CriticalLabel::Zero => "0",
            CriticalLabel::One => "1",
            CriticalLabel::Infinity => "inf",
        })
    }
}

/// A balanced map whose vertices are the four critical points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicModel {
    pub om: OrientedMap,
    pub labels: Vec<CriticalLabel>,
}

impl CubicModel {
    /// Canonical form under isomorphisms preserving orientation, colors and vertex labels.
    pub fn labeled_form(&self) -> CanonicalForm {
        let map = &self.om.map;
        canonical_form_by(map, |d| 2 * self.labels[map.vertex_of(d)] as u64 + self.om.is_forward(d) as u64)
    }

    pub fn is_labeled_isomorphic(&self, other: &CubicModel) -> bool {
        self.om.map.dart_count() == other.om.map.dart_count() && self.labeled_form() == other.labeled_form()
    }

    /// Directed edges as `(tail label, head label)`, sorted.
    pub fn labeled_edges(&self) -> Vec<(CriticalLabel, CriticalLabel)> {
        let mut e: Vec<_> =
            self.om.directed_edges().into_iter().map(|(u, v)| (self.labels[u], self.labels[v])).collect();
        e.sort_unstable();
        e
    }

    pub fn vertex(&self, label: CriticalLabel) -> usize {
        self.labels.iter().position(|&l| l == label).expect("all four labels present")
    }
}

/// Real critical points in circular order on the extended real line, infinity last.
fn circle_order(c: f64) -> Vec<CriticalLabel> {
    let mut finite = vec![(c, CriticalLabel::C), (0.0, CriticalLabel::Zero), (1.0, CriticalLabel::One)];
    finite.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
    let mut out: Vec<CriticalLabel> = finite.into_iter().map(|x| x.1).collect();
    out.push(CriticalLabel::Infinity);
    out
}

/// Builds the real model from its upper arcs, given as label pairs. The real
/// edge leaving `0` in the increasing direction is forward iff `zero_edge_forward`.
fn real_model(c: f64, arcs: &[(CriticalLabel, CriticalLabel)], zero_edge_forward: bool) -> CubicModel {
    let order = circle_order(c);
    let pos = |l: CriticalLabel| order.iter().position(|&x| x == l).unwrap();
    let pairs: Vec<(usize, usize)> = arcs
        .iter()
        .map(|&(x, y)| {
            let (i, j) = (pos(x), pos(y));
            (i.min(j), i.max(j))
        })
        .collect();
    let (map, layout) = real_arc_map(4, &pairs);
    let mut om = OrientedMap::from_map(map).expect("real graphs are two-colorable");
    if om.is_forward(layout.real[pos(CriticalLabel::Zero)].0) != zero_edge_forward {
        om = om.flipped();
    }
    CubicModel { om, labels: order }
}

/// The predicted pullback of the real line for a real configuration.
///
/// The pole lies between two consecutive critical points `B`, `C`, which are
/// joined by a pair of conjugate arcs; the other two critical points, also
/// consecutive on the circle, form the second pair. The real edge from `0`
/// towards larger values is directed away from `0` exactly when
/// `2a − 1 > 0`, so that A faces are preimages of the upper half-plane.
pub fn classify_real(config: RealConfig) -> CubicModel {
    use CriticalLabel::*;
    let c = config.sample_c();
    let (pole_pair, other_pair) = match (config.branch, config.interval) {
        (Branch::Alpha, Interval::Negative) => ((Zero, One), (C, Infinity)),
        (Branch::Alpha, Interval::Unit) => ((C, One), (Zero, Infinity)),
        (Branch::Alpha, Interval::AboveOne) => ((One, C), (Zero, Infinity)),
        (Branch::Beta, Interval::Negative) => ((C, Zero), (One, Infinity)),
        (Branch::Beta, Interval::Unit) => ((Zero, C), (One, Infinity)),
        (Branch::Beta, Interval::AboveOne) => ((Zero, One), (C, Infinity)),
    };
    let forward = matches!(
        (config.branch, config.interval),
        (Branch::Alpha, Interval::Unit | Interval::AboveOne) | (Branch::Beta, Interval::Negative)
    );
    real_model(c, &[pole_pair, other_pair], forward)
}

/// Homogeneous numerator and denominator of `φ_a` at `z = N/D`, with
/// `N = i(1 + w)` and `D = 1 − w` for the disk coordinate `w`.
fn cayley_parts(a: Complex64, w: Complex64) -> (Complex64, Complex64) {
    let n = Complex64::i() * (1.0 + w);
    let d = 1.0 - w;
    let p = a * n * n * n + (1.0 - 2.0 * a) * n * n * d;
    let q = (2.0 - a) * n * d * d - d * d * d;
    (p, q)
}

/// `w = (z − i)/(z + i)`, sending the upper half-plane to the unit disk.
pub fn cayley(z: SpherePoint) -> Complex64 {
    match z {
        SpherePoint::Infinity => Complex64::new(1.0, 0.0),
        SpherePoint::Finite(z) => (z - Complex64::i()) / (z + Complex64::i()),
    }
}

/// `z = i(1 + w)/(1 − w)`.
pub fn cayley_inv(w: Complex64) -> Complex64 {
    Complex64::i() * (1.0 + w) / (1.0 - w)
}

/// A function on the unit disk whose sign is that of `Im φ_a(z)` and whose
/// zero set is the preimage of the real line off the real line itself.
fn disk_function(a: Complex64, w: Complex64) -> f64 {
    let (p, q) = cayley_parts(a, w);
    (p * q.conj()).im / (1.0 - w.norm_sqr())
}

/// Result of the grid tracer.
#[derive(Debug, Clone)]
pub struct Traced {
    pub model: CubicModel,
    /// Zero-set segments in the upper half-plane, for drawing.
    pub segments: Vec<[Complex64; 2]>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Traces the preimage of the real line for real `a` by marching squares on
/// the unit disk, the Cayley image of the upper half-plane. Lower arcs follow
/// by conjugation. Arc endpoints are snapped to the critical points.
pub fn trace_pullback(params: &CubicParams, grid: usize) -> Result<Traced, CubicError> {
    if !params.is_real() {
        return Err(CubicError::NotReal(params.a.to_string()));
    }
    let a = Complex64::new(params.a.re, 0.0);
    let c = params.c().re;
    let n = grid.max(8);
    let lo = -1.02;
    let h = 2.04 / n as f64;
    let crit = [
        (CriticalLabel::C, cayley(SpherePoint::Finite(Complex64::new(c, 0.0)))),
        (CriticalLabel::Zero, cayley(SpherePoint::Finite(Complex64::new(0.0, 0.0)))),
        (CriticalLabel::One, cayley(SpherePoint::Finite(Complex64::new(1.0, 0.0)))),
        (CriticalLabel::Infinity, cayley(SpherePoint::Infinity)),
    ];
    let snap = 2.0 * h * std::f64::consts::SQRT_2;
    for i in 0..4 {
        for j in i + 1..4 {
            if (crit[i].1 - crit[j].1).norm() < snap {
                return Err(CubicError::CriticalPointsNotResolved(crit[i].0.to_string(), crit[j].0.to_string()));
            }
        }
    }
    let node = |i: usize, j: usize| Complex64::new(lo + i as f64 * h, lo + j as f64 * h);
    let values: Vec<Vec<f64>> = (0..=n)
        .into_par_iter()
        .map(|j| {
            (0..=n)
                .map(|i| {
                    let w = node(i, j);
                    if w.norm() < 1.0 - 0.5 * h {
                        disk_function(a, w)
                    } else {
                        f64::NAN
                    }
                })
                .collect()
        })
        .collect();
    let val = |i: usize, j: usize| values[j][i];
    let valid = |i: usize, j: usize| [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)].iter().all(|&(x, y)| !val(x, y).is_nan());
    let cross = |p: f64, q: f64| (p >= 0.0) != (q >= 0.0);
    let cell = |i: usize, j: usize| j * n + i;
    let mut uf = UnionFind((0..n * n).collect());
    let mut active = vec![false; n * n];
    let mut segments = Vec::new();
    let interp = |(i0, j0): (usize, usize), (i1, j1): (usize, usize)| {
        let (p, q) = (val(i0, j0), val(i1, j1));
        let t = p / (p - q);
        node(i0, j0) + (node(i1, j1) - node(i0, j0)) * t
    };
    for j in 0..n {
        for i in 0..n {
            if !valid(i, j) {
                continue;
            }
            let sides = [((i, j), (i + 1, j)), ((i + 1, j), (i + 1, j + 1)), ((i, j + 1), (i + 1, j + 1)), ((i, j), (i, j + 1))];
            let hits: Vec<usize> = (0..4).filter(|&k| cross(val(sides[k].0 .0, sides[k].0 .1), val(sides[k].1 .0, sides[k].1 .1))).collect();
            if hits.is_empty() {
                continue;
            }
            active[cell(i, j)] = true;
            let pts: Vec<Complex64> = hits.iter().map(|&k| interp(sides[k].0, sides[k].1)).collect();
            if pts.len() == 2 {
                segments.push([cayley_inv(pts[0]), cayley_inv(pts[1])]);
            } else if pts.len() == 4 {
                segments.push([cayley_inv(pts[0]), cayley_inv(pts[1])]);
                segments.push([cayley_inv(pts[2]), cayley_inv(pts[3])]);
            }
            // neighbours across crossed sides: bottom, right, top, left
            if hits.contains(&0) && j > 0 && valid(i, j - 1) {
                uf.union(cell(i, j), cell(i, j - 1));
            }
            if hits.contains(&1) && i + 1 < n && valid(i + 1, j) {
                uf.union(cell(i, j), cell(i + 1, j));
            }
        }
    }
    let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for k in 0..n * n {
        if active[k] {
            comps.entry(uf.find(k)).or_default().push(k);
        }
    }
    let center = |k: usize| Complex64::new(lo + ((k % n) as f64 + 0.5) * h, lo + ((k / n) as f64 + 0.5) * h);
    let mut arcs = Vec::new();
    for cells in comps.values() {
        let ends: Vec<CriticalLabel> = crit
            .iter()
            .filter(|(_, wc)| cells.iter().any(|&k| (center(k) - wc).norm() <= snap))
            .map(|(l, _)| *l)
            .collect();
        if ends.len() != 2 {
            return Err(CubicError::ResolutionTooCoarse(format!(
                "a zero-set component of {} cells meets {} critical points",
                cells.len(),
                ends.len()
            )));
        }
        arcs.push((ends[0], ends[1]));
    }
    let mut touched: Vec<CriticalLabel> = arcs.iter().flat_map(|&(x, y)| [x, y]).collect();
    touched.sort_unstable();
    touched.dedup();
    if arcs.len() != 2 || touched.len() != 4 {
        return Err(CubicError::ResolutionTooCoarse(format!("upper arcs {arcs:?} do not pair the critical points")));
    }
    let order = circle_order(c);
    let zero_pos = order.iter().position(|&l| l == CriticalLabel::Zero).unwrap();
    let next = order[zero_pos + 1];
    let next_x = if next == CriticalLabel::C { c } else { 1.0 };
    let x = 0.5 * next_x;
    let eps = 1e-7 * (1.0 + x.abs());
    let up = match phi_eval(a, SpherePoint::Finite(Complex64::new(x, eps))) {
        SpherePoint::Finite(v) => v.im > 0.0,
        SpherePoint::Infinity => return Err(CubicError::ResolutionTooCoarse("pole on the real probe".into())),
    };
    let model = real_model(c, &arcs, up);
    check_model(&model.om.map).map_err(CubicError::ResolutionTooCoarse)?;
    Ok(Traced { model, segments })
}

/// Four vertices of degree 4, eight edges, six faces and genus 0.
fn check_model(map: &Map) -> Result<(), String> {
    let degrees_ok = (0..map.vertex_count()).all(|v| map.degree(v) == 4);
    if map.vertex_count() != 4 || map.edge_count() != 8 || map.face_count() != 6 || map.genus() != 0 || !degrees_ok {
        return Err(format!(
            "traced map has V={} E={} F={} genus {}",
            map.vertex_count(),
            map.edge_count(),
            map.face_count(),
            map.genus()
        ));
    }
    Ok(())
}

/// A piecewise-linear Jordan curve through the critical values, traversed as
/// `∞ → points[0] → … → points[k−1] → ∞`. The first and last pieces are
/// rays leaving the end points in the directions `first_ray` and `last_ray`.
/// Preimages of the region on the left of the traversal are colored A.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PostCriticalCurve {
    pub points: Vec<Complex64>,
    pub first_ray: Complex64,
    pub last_ray: Complex64,
}

impl PostCriticalCurve {
    /// The extended real line traversed in increasing order.
    pub fn real_line(params: &CubicParams) -> Self {
        let mut pts = vec![0.0, 1.0, params.critical_value().re];
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
        PostCriticalCurve {
            points: pts.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
            first_ray: Complex64::new(-1.0, 0.0),
            last_ray: Complex64::new(1.0, 0.0),
        }
    }
}

fn cubic_roots(a: Complex64, v: Complex64, start: [Complex64; 3]) -> Option<[Complex64; 3]> {
    // a z³ + (1 − 2a) z² − v(2 − a) z + v, made monic
    let c2 = (1.0 - 2.0 * a) / a;
    let c1 = -v * (2.0 - a) / a;
    let c0 = v / a;
    let f = |z: Complex64| ((z + c2) * z + c1) * z + c0;
    let mut r = start;
    for _ in 0..200 {
        let mut delta: f64 = 0.0;
        for i in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= r[i] - r[j];
                }
            }
            if den.norm() == 0.0 {
                return None;
            }
            let step = f(r[i]) / den;
            r[i] -= step;
            delta = delta.max(step.norm() / (1.0 + r[i].norm()));
        }
        if delta < 1e-15 {
            return Some(r);
        }
    }
    let scale = r.iter().map(|z| 1.0 + z.norm()).fold(0.0, f64::max);
    r.iter().all(|&z| f(z).norm() < 1e-9 * scale.powi(3)).then_some(r)
}

fn fresh_roots(a: Complex64, v: Complex64) -> Option<[Complex64; 3]> {
    let s = 1.0 + v.norm().sqrt();
    let seed = Complex64::new(0.4, 0.9);
    cubic_roots(a, v, [seed * s, seed * seed * s, seed * seed * seed * s])
}

/// Tracks the three preimages of `path(t)` from `t0` to `t1`, returning the
/// tracked points for each root.
fn track(
    a: Complex64,
    path: &dyn Fn(f64) -> Complex64,
    t0: f64,
    t1: f64,
    start: [Complex64; 3],
) -> Result<[Vec<Complex64>; 3], CubicError> {
    let mut t = t0;
    let mut r = start;
    let mut out = [vec![r[0]], vec![r[1]], vec![r[2]]];
    let mut h = (t1 - t0) / 64.0;
    while (t1 - t) * h.signum() > 0.0 {
        let step = if (t + h - t1) * h.signum() > 0.0 { t1 - t } else { h };
        let sep = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).map(|(i, j)| (r[i] - r[j]).norm()).fold(f64::INFINITY, f64::min);
        match cubic_roots(a, path(t + step), r) {
            Some(nr) if (0..3).all(|i| (nr[i] - r[i]).norm() < 0.2 * sep) => {
                t += step;
                r = nr;
                for i in 0..3 {
                    out[i].push(r[i]);
                }
                h *= 1.5;
            }
            _ => {
                h *= 0.5;
                if h.abs() < 1e-13 * (t1 - t0).abs() {
                    return Err(CubicError::PathLifting(format!("step size collapsed at t = {t}")));
                }
            }
        }
    }
    Ok(out)
}

/// Lifts a piecewise-linear post-critical curve through `φ_a` by root tracking
/// and returns the pullback with its degree-2 vertices smoothed away.
pub fn trace_curve(params: &CubicParams, curve: &PostCriticalCurve) -> Result<CubicModel, CubicError> {
    let a = params.a;
    let cp = params.c();
    let cv = params.critical_value();
    let finite = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), cv];
    if curve.points.len() != 3 {
        return Err(CubicError::InvalidCurve("expected the three finite critical values".into()));
    }
    let mut matched = [false; 3];
    for p in &curve.points {
        match (0..3).find(|&i| !matched[i] && (finite[i] - p).norm() < 1e-9 * (1.0 + p.norm())) {
            Some(i) => matched[i] = true,
            None => return Err(CubicError::InvalidCurve(format!("{p} is not a critical value"))),
        }
    }
    if curve.first_ray.norm() == 0.0 || curve.last_ray.norm() == 0.0 {
        return Err(CubicError::InvalidCurve("ray directions must be non-zero".into()));
    }
    // vertices: each critical point, then the simple preimage of its value
    let sum = -(1.0 - 2.0 * a) / a;
    let mut verts: Vec<(SpherePoint, Option<CriticalLabel>)> = Vec::new();
    let mut preimages = Vec::new();
    for (label, z) in [(CriticalLabel::Zero, Complex64::new(0.0, 0.0)), (CriticalLabel::One, Complex64::new(1.0, 0.0)), (CriticalLabel::C, cp)] {
        let k = verts.len();
        verts.push((SpherePoint::Finite(z), Some(label)));
        verts.push((SpherePoint::Finite(sum - 2.0 * z), None));
        preimages.push((k, k + 1));
    }
    let k = verts.len();
    verts.push((SpherePoint::Infinity, Some(CriticalLabel::Infinity)));
    verts.push((SpherePoint::Finite(params.z_inf()), None));
    let inf_pre = (k, k + 1);
    let value_pre = |v: SpherePoint| -> (usize, usize) {
        match v {
            SpherePoint::Infinity => inf_pre,
            SpherePoint::Finite(z) => {
                let i = (0..3).min_by(|&i, &j| (finite[i] - z).norm().partial_cmp(&(finite[j] - z).norm()).unwrap()).unwrap();
                preimages[i]
            }
        }
    };
    let scale = 1.0 + curve.points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let big = 1e10 * scale;
    // pieces as (start value, end value, path on [0, 1])
    type Path = Box<dyn Fn(f64) -> Complex64>;
    let mut pieces: Vec<(SpherePoint, SpherePoint, Path)> = Vec::new();
    let log_big = big.ln();
    let p0 = curve.points[0];
    let u0 = curve.first_ray / curve.first_ray.norm();
    pieces.push((SpherePoint::Infinity, SpherePoint::Finite(p0), Box::new(move |t: f64| p0 + u0 * ((log_big * (1.0 - t)).exp() - 1.0))));
    for w in curve.points.windows(2) {
        let (p, q) = (w[0], w[1]);
        pieces.push((SpherePoint::Finite(p), SpherePoint::Finite(q), Box::new(move |t: f64| p + (q - p) * t)));
    }
    let pk = curve.points[2];
    let uk = curve.last_ray / curve.last_ray.norm();
    pieces.push((SpherePoint::Finite(pk), SpherePoint::Infinity, Box::new(move |t: f64| pk + uk * ((log_big * t).exp() - 1.0))));

    // arcs: (tail vertex, head vertex, point near tail, point near head)
    let mut arcs: Vec<(usize, usize, SpherePoint, SpherePoint)> = Vec::new();
    let end_gap = 1e-9;
    for (from, to, path) in &pieces {
        let start = fresh_roots(a, path(0.5)).ok_or_else(|| CubicError::PathLifting("no roots at a segment midpoint".into()))?;
        let back = track(a, path.as_ref(), 0.5, end_gap, start)?;
        let fwd = track(a, path.as_ref(), 0.5, 1.0 - end_gap, start)?;
        let (fp, tp) = (value_pre(*from), value_pre(*to));
        for i in 0..3 {
            let near_tail = SpherePoint::Finite(*back[i].last().unwrap());
            let near_head = SpherePoint::Finite(*fwd[i].last().unwrap());
            let pick = |pair: (usize, usize), z: SpherePoint| {
                if verts[pair.0].0.chordal(z) <= verts[pair.1].0.chordal(z) {
                    pair.0
                } else {
                    pair.1
                }
            };
            arcs.push((pick(fp, near_tail), pick(tp, near_head), near_tail, near_head));
        }
    }
    let mut degree = vec![0usize; verts.len()];
    for &(u, v, _, _) in &arcs {
        degree[u] += 1;
        degree[v] += 1;
    }
    for (i, &(_, label)) in verts.iter().enumerate() {
        let want = if label.is_some() { 4 } else { 2 };
        if degree[i] != want {
            return Err(CubicError::PathLifting(format!("vertex {i} received {} arcs, expected {want}", degree[i])));
        }
    }
    // rotation by departure angle in a local coordinate, 1/z at infinity
    let angle = |v: usize, z: SpherePoint| -> f64 {
        let SpherePoint::Finite(z) = z else { return 0.0 };
        let local = match verts[v].0 {
            SpherePoint::Infinity => 1.0 / z,
            SpherePoint::Finite(c) => z - c,
        };
        local.arg()
    };
    let mut at: Vec<Vec<(f64, usize)>> = vec![Vec::new(); verts.len()];
    let mut alpha = vec![0; 2 * arcs.len()];
    for (e, &(u, v, nu, nv)) in arcs.iter().enumerate() {
        let (x, y) = (2 * e, 2 * e + 1);
        alpha[x] = y;
        alpha[y] = x;
        at[u].push((angle(u, nu), x));
        at[v].push((angle(v, nv), y));
    }
    let rotations: Vec<Vec<usize>> = at
        .into_iter()
        .map(|mut r| {
            r.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(Ordering::Equal));
            r.into_iter().map(|x| x.1).collect()
        })
        .collect();
    let map = Map::from_rotations(&rotations, alpha).map_err(|e| CubicError::PathLifting(e.to_string()))?;
    if map.genus() != 0 || map.face_count() != 6 {
        return Err(CubicError::PathLifting(format!("lifted map has genus {} and {} faces", map.genus(), map.face_count())));
    }
    let mut om = OrientedMap::from_map(map).map_err(|e| CubicError::PathLifting(e.to_string()))?;
    if !om.is_forward(0) {
        om = om.flipped();
    }
    if (0..arcs.len()).any(|e| !om.is_forward(2 * e)) {
        return Err(CubicError::PathLifting("lifted arcs do not keep one color on their left".into()));
    }
    // smooth the simple preimages
    let mut ed = Editor::from_map(&om.map);
    for (v, &(_, label)) in verts.iter().enumerate() {
        if label.is_none() {
            let rot = std::mem::take(&mut ed.rots[v]);
            let (x, y) = (ed.alpha[rot[0]], ed.alpha[rot[1]]);
            ed.pair(x, y);
        }
    }
    let (smoothed, image) = ed.finish().map_err(|e| CubicError::PathLifting(e.to_string()))?;
    let om2 = carry_colors(&om, smoothed, |d| image[d]).map_err(|e| CubicError::PathLifting(e.to_string()))?;
    let mut labels = vec![CriticalLabel::C; om2.map.vertex_count()];
    for (v, &(_, label)) in verts.iter().enumerate() {
        if let Some(l) = label {
            labels[om2.map.vertex_of(image[om.map.rotation(v)[0]].expect("corner survives"))] = l;
        }
    }
    check_model(&om2.map).map_err(CubicError::PathLifting)?;
    Ok(CubicModel { om: om2, labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use CriticalLabel::*;

    #[test]
    fn alpha_negative_edge_multiset() {
        let m = classify_real(RealConfig { branch: Branch::Alpha, interval: Interval::Negative });
        let mut want = vec![(Zero, One), (Zero, One), (One, Zero), (C, Zero), (One, Infinity), (Infinity, C), (Infinity, C), (C, Infinity)];
        want.sort_unstable();
        assert_eq!(m.labeled_edges(), want);
    }

    #[test]
    fn six_models_are_distinct() {
        let models: Vec<CubicModel> = RealConfig::all().iter().map(|&c| classify_real(c)).collect();
        for i in 0..6 {
            for j in i + 1..6 {
                assert!(!models[i].is_labeled_isomorphic(&models[j]), "{i} {j}");
            }
        }
    }

    #[test]
    fn trace_matches_model_at_c3() {
        let p = CubicParams::from_c(Branch::Alpha, Complex64::new(3.0, 0.0)).unwrap();
        let t = trace_pullback(&p, 200).unwrap();
        let want = classify_real(RealConfig { branch: Branch::Alpha, interval: Interval::AboveOne });
        assert!(t.model.is_labeled_isomorphic(&want));
    }

    #[test]
    fn degenerate_a_rejected() {
        assert!(CubicParams::new(Complex64::new(0.5, 0.0)).is_err());
        assert!(alpha_coeff(Complex64::new(1.0, 0.0)).is_err());
    }
}
