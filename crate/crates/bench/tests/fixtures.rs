use balanced_maps::balance::is_balanced;
use balanced_maps_bench::{random_balanced, real_graphs};

#[test]
fn real_graph_counts_follow_catalan() {
    let counts: Vec<usize> = (2..=6).map(|d| real_graphs(d).len()).collect();
    assert_eq!(counts, [1, 2, 5, 14, 42]);
}

#[test]
fn random_fixtures_are_balanced_and_reproducible() {
    let a = random_balanced(4, 2, 6, 3);
    let b = random_balanced(4, 2, 6, 3);
    assert_eq!(a.len(), 6);
    assert!(a.iter().all(|om| is_balanced(om).unwrap().d == 4));
    assert_eq!(a, b);
}
