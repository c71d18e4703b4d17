#![allow(dead_code)]

use std::sync::Arc;

use fglab::cocycle::OrbitModel;
use fglab::group::FiniteGroupTable;
use fglab::VirtZData;

/// `Z` as an extension of `Z/4` by `4Z`: `f(x,y) = 1` when `x + y >= 4`.
pub fn carry4() -> VirtZData {
    let f = (0..4).map(|x| (0..4).map(|y| i64::from(x + y >= 4)).collect()).collect();
    VirtZData::new(FiniteGroupTable::cyclic(4), f, vec![1; 4]).unwrap()
}

/// `Z ⋊ (Z/2 x Z/2)` with the first factor acting by `-1`.
pub fn klein_dihedral() -> VirtZData {
    let q = FiniteGroupTable::cyclic(2).product(&FiniteGroupTable::cyclic(2));
    VirtZData::semidirect(q, vec![1, 1, -1, -1]).unwrap()
}

/// Orbit models on the infinite dihedral group, `Z` over `2Z`, `Z` over
/// `4Z` with a nonzero cocycle, and a Klein-four semidirect product with a
/// nontrivial stabilizer.
pub fn models() -> Vec<OrbitModel> {
    vec![
        OrbitModel::new(Arc::new(VirtZData::infinite_dihedral()), &[]).unwrap(),
        OrbitModel::new(Arc::new(VirtZData::integers_over_even()), &[]).unwrap(),
        OrbitModel::new(Arc::new(carry4()), &[]).unwrap(),
        OrbitModel::new(Arc::new(klein_dihedral()), &[(0, 1)]).unwrap(),
    ]
}
