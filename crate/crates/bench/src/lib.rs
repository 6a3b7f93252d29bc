//! Fixtures shared by the benchmarks.

use balanced_maps::balance::{is_balanced, OrientedMap};
use balanced_maps::gen::random_planar_balanced;
use balanced_maps::real_enum::{noncrossing_matchings, real_gb_graph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Every real balanced graph of degree `d`.
pub fn real_graphs(d: usize) -> Vec<OrientedMap> {
    noncrossing_matchings(d).map(|m| real_gb_graph(&m)).collect()
}

/// `count` random planar balanced maps of degree `d`, each with `contractions`
/// edges contracted. Maps that fail the balance check are skipped.
pub fn random_balanced(d: usize, contractions: usize, count: usize, seed: u64) -> Vec<OrientedMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let om = random_planar_balanced(d, contractions, &mut rng);
        if is_balanced(&om).is_ok() {
            out.push(om);
        }
    }
    out
}
