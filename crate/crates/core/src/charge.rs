//! Chargeable bipartite graphs with exact rational weights.
//!
//! Vertices split into sides X and Y. Inputs are terminal vertices of X,
//! outputs are terminal vertices of Y, and every other vertex is interior. A
//! weighting is feasible when all weights are positive and the weights at each
//! interior vertex sum to its capacity. The input value sums the weights of
//! edges at inputs, the output value those at outputs. With a constant
//! capacity `M` they differ by `M·(|Y_int| − |X_int|)`, so they agree when both
//! sides have as many interior vertices.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Side {
    X,
    Y,
}

/// An interior vertex whose incident weights miss its capacity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub side: Side,
    pub vertex: usize,
    /// Sum of incident weights, as an exact fraction.
    pub sum: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum ChargeError {
    #[error("edge {edge} joins a vertex outside the graph")]
    InvalidEdge { edge: usize },
    #[error("edge {edge} has non-positive weight")]
    NonPositiveWeight { edge: usize },
    #[error("edge {edge} joins an input directly to an output")]
    TerminalEdge { edge: usize },
    #[error("interior vertices miss their capacity: {violations:?}")]
    InfeasibleWeighting { violations: Vec<Violation> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeEdge {
    pub x: usize,
    pub y: usize,
    pub weight: BigRational,
}

/// A bipartite graph with terminals, a constant capacity and edge weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeGraph {
    pub x_count: usize,
    pub y_count: usize,
    /// Input vertices, a subset of X.
    pub inputs: BTreeSet<usize>,
    /// Output vertices, a subset of Y.
    pub outputs: BTreeSet<usize>,
    pub capacity: BigRational,
    pub edges: Vec<ChargeEdge>,
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl ChargeGraph {
    pub fn new(x_count: usize, y_count: usize, capacity: BigRational) -> Self {
        ChargeGraph { x_count, y_count, inputs: BTreeSet::new(), outputs: BTreeSet::new(), capacity, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, x: usize, y: usize, weight: BigRational) -> usize {
        self.edges.push(ChargeEdge { x, y, weight });
        self.edges.len() - 1
    }

    /// One interior edge `x–y` of weight `k`, inputs of weights `a`, `b` at `y`
    /// and outputs of weights `alpha`, `beta` at `x`, with capacity `a + b + k`.
    pub fn minimal(a: BigRational, b: BigRational, k: BigRational, alpha: BigRational, beta: BigRational) -> Self {
        let capacity = &a + &b + &k;
        // X = {x, input a, input b}, Y = {y, output alpha, output beta}
        let mut g = ChargeGraph::new(3, 3, capacity);
        g.inputs.extend([1, 2]);
        g.outputs.extend([1, 2]);
        g.add_edge(0, 0, k);
        g.add_edge(1, 0, a);
        g.add_edge(2, 0, b);
        g.add_edge(0, 1, alpha);
        g.add_edge(0, 2, beta);
        g
    }

    pub fn interior(&self, side: Side) -> Vec<usize> {
        match side {
            Side::X => (0..self.x_count).filter(|x| !self.inputs.contains(x)).collect(),
            Side::Y => (0..self.y_count).filter(|y| !self.outputs.contains(y)).collect(),
        }
    }

    /// `(input value, output value)`.
    pub fn charge_io(&self) -> (BigRational, BigRational) {
        let mut input = BigRational::zero();
        let mut output = BigRational::zero();
        for e in &self.edges {
            if self.inputs.contains(&e.x) {
                input += &e.weight;
            }
            if self.outputs.contains(&e.y) {
                output += &e.weight;
            }
        }
        (input, output)
    }

    /// `M·(|Y_int| − |X_int|)`, the value of `input − output` for any feasible weighting.
    pub fn conservation_defect(&self) -> BigRational {
        let diff = self.interior(Side::Y).len() as i64 - self.interior(Side::X).len() as i64;
        &self.capacity * BigRational::from_integer(BigInt::from(diff))
    }

    /// Positive weights, no input–output edge, and capacity met at every interior vertex.
    pub fn check_feasible(&self) -> Result<(), ChargeError> {
        let mut sx = vec![BigRational::zero(); self.x_count];
        let mut sy = vec![BigRational::zero(); self.y_count];
        for (i, e) in self.edges.iter().enumerate() {
            if e.x >= self.x_count || e.y >= self.y_count {
                return Err(ChargeError::InvalidEdge { edge: i });
            }
            if !e.weight.is_positive() {
                return Err(ChargeError::NonPositiveWeight { edge: i });
            }
            if self.inputs.contains(&e.x) && self.outputs.contains(&e.y) {
                return Err(ChargeError::TerminalEdge { edge: i });
            }
            sx[e.x] += &e.weight;
            sy[e.y] += &e.weight;
        }
        let mut violations = Vec::new();
        for x in self.interior(Side::X) {
            if sx[x] != self.capacity {
                violations.push(Violation { side: Side::X, vertex: x, sum: sx[x].to_string() });
            }
        }
        for y in self.interior(Side::Y) {
            if sy[y] != self.capacity {
                violations.push(Violation { side: Side::Y, vertex: y, sum: sy[y].to_string() });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ChargeError::InfeasibleWeighting { violations })
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.check_feasible().is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_case_conserves() {
        let g = ChargeGraph::minimal(rational(2, 1), rational(3, 2), rational(1, 3), rational(5, 2), rational(1, 1));
        assert!(g.is_feasible());
        let (i, o) = g.charge_io();
        assert_eq!(i, o);
        assert_eq!(i, rational(7, 2));
    }

    #[test]
    fn infeasible_lists_vertices() {
        let mut g = ChargeGraph::minimal(rational(1, 1), rational(1, 1), rational(1, 1), rational(1, 1), rational(1, 1));
        g.edges[3].weight = rational(2, 1);
        match g.check_feasible() {
            Err(ChargeError::InfeasibleWeighting { violations }) => {
                assert_eq!(violations.len(), 1);
                assert_eq!((violations[0].side, violations[0].vertex), (Side::X, 0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn no_interior_returns_raw_sums() {
        let mut g = ChargeGraph::new(1, 1, rational(7, 1));
        g.inputs.insert(0);
        g.add_edge(0, 0, rational(3, 1));
        let (i, o) = g.charge_io();
        assert_eq!((i, o), (rational(3, 1), BigRational::zero()));
        assert_eq!(g.conservation_defect(), rational(7, 1));
    }
}
