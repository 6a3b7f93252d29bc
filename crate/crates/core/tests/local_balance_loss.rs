//! Operations whose result loses local balance although the input is balanced.
//! The operations report these cases instead of returning the unbalanced map.

use balanced_maps::balance::{is_balanced, OrientedMap};
use balanced_maps::ops::{applicable_operations, balanced_move_at, contraction_obstruction, edge_contract, OpError, Operation};
use balanced_maps::surface_map::Map;

fn paired(n: usize) -> Vec<usize> {
    (0..n).map(|d| d ^ 1).collect()
}

/// Builds the map and picks the coloring in which the darts of `forward` point forward.
fn oriented(rots: &[Vec<usize>], forward: &[usize]) -> OrientedMap {
    let n = rots.iter().map(Vec::len).sum();
    let om = OrientedMap::from_map(Map::from_rotations(rots, paired(n)).unwrap()).unwrap();
    let om = if om.is_forward(forward[0]) { om } else { om.flipped() };
    assert!((0..n).all(|d| om.is_forward(d) == forward.contains(&d)));
    om
}

#[test]
fn contraction_of_a_non_splitting_edge_can_lose_local_balance() {
    let om = oriented(
        &[vec![8, 11, 13, 20], vec![1, 15, 2, 9], vec![3, 16, 4, 10], vec![5, 18, 6, 12], vec![0, 21, 7, 19, 17, 14]],
        &[0, 3, 4, 7, 9, 11, 12, 15, 17, 18, 20],
    );
    let t = is_balanced(&om).unwrap();
    assert_eq!((t.g, t.d, t.m), (0, 4, 5));
    assert!(contraction_obstruction(&om.map, 11).is_none());
    assert!(applicable_operations(&om).contains(&Operation::Contract { dart: 11 }));
    match edge_contract(&om, 11) {
        Err(OpError::LocalBalanceLost { witness }) => assert_eq!((witness.a_faces, witness.b_faces), (2, 2)),
        other => panic!("expected loss of local balance, got {other:?}"),
    }
}

#[test]
fn balanced_move_can_lose_local_balance() {
    let om = oriented(
        &[vec![0, 9, 6, 21], vec![2, 11, 22, 18], vec![3, 19, 4, 13], vec![5, 16, 20, 14], vec![7, 10, 12, 15], vec![1, 17, 23, 8]],
        &[0, 2, 5, 6, 8, 10, 13, 15, 17, 19, 20, 22],
    );
    is_balanced(&om).unwrap();
    assert!(matches!(balanced_move_at(&om, 14, true), Err(OpError::LocalBalanceLost { .. })));
}
