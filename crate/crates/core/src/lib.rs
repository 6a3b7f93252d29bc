//! Oriented cellular maps on closed surfaces and the theory of balanced graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`surface_map`]: rotation systems, faces, genus, duality, canonical forms.
//! * [`balance`]: alternating colorings, global and local balance.
//! * [`enrich`]: dots, Hall matchings, enrichment, admissible labelings, passports, monodromy.
//! * [`charge`]: chargeable bipartite graphs and exact charge conservation.
//! * [`ops`]: contractions, expansions, simple pieces, moves, cuts and sums.
//! * [`real_enum`]: noncrossing matchings and real generic balanced graphs.
//! * [`cubic`]: the cubic normal form, its real models and a numerical pullback tracer.

pub mod balance;
pub mod charge;
pub mod cubic;
pub mod enrich;
pub mod export;
pub mod gen;
pub mod ops;
pub mod perm;
pub mod real_enum;
pub mod surface_map;

pub use balance::{
    is_globally_balanced, is_locally_balanced, is_locally_balanced_thurston, two_color, BalanceError,
    BalanceFailure, BalanceType, Color, Coloring, Multicycle, OrientedMap,
};
pub use charge::{ChargeError, ChargeGraph};
pub use cubic::{Branch, CubicError, CubicModel, CubicParams, Interval, RealConfig};
pub use enrich::{Constellation, DotGraph, DottedMap, EnrichError, LabeledMap, Labeling, Passport, PipelineReport};
pub use ops::{OpError, Operation};
pub use real_enum::{catalan_rho, noncrossing_matchings, real_gb_graph, NoncrossingMatching};
pub use surface_map::{CanonicalForm, Map, MapError};
