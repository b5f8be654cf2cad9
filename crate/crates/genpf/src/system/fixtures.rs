//! Named test systems used throughout the crate and its guide.

use crate::numeric::{rat, rat_int};
use crate::system::GainSystem;

/// 2 x 4 nonsquare system where every hidden square subsystem is the same:
/// supporters `[[1,1,0,0],[0,0,1,1]]`, repressors `[[0,0,4,4],[1,1,0,0]]`.
/// Its optimum is `beta = 1/2` with active-support ratio `x(0)/x(2) = 2`.
pub fn sys_a() -> GainSystem {
    GainSystem::from_signed_ints(&[vec![1, 1, -4, -4], vec![-1, -1, 1, 1]]).unwrap()
}

/// 2 x 3 weakly square system with supporters `[[1/2,0,0],[0,4,4]]` and
/// repressors `[[0,2,1],[1,0,0]]`. Entity 1 chooses between affectors 1
/// and 2; the optimum is `beta = sqrt(2)` through affector 2.
pub fn sys_b() -> GainSystem {
    GainSystem::from_split(
        vec![
            vec![rat(1, 2), rat_int(0), rat_int(0)],
            vec![rat_int(0), rat_int(4), rat_int(4)],
        ],
        vec![
            vec![rat_int(0), rat_int(2), rat_int(1)],
            vec![rat_int(1), rat_int(0), rat_int(0)],
        ],
    )
    .unwrap()
}

/// 2 x 2 square system with identity supporters and repressors
/// `[[0,2],[1,0]]`; the classical Perron root is `sqrt(2)`.
pub fn sys_c() -> GainSystem {
    GainSystem::from_signed_ints(&[vec![1, -2], vec![-1, 1]]).unwrap()
}

/// 2 x 3 reducible system: entity 0 may pick affector 0 or 1 but only
/// affector 0 represses entity 1, so the selection through affector 1
/// disconnects the constraint graph.
pub fn sys_d() -> GainSystem {
    GainSystem::from_signed_ints(&[vec![1, 1, -1], vec![-1, 0, 1]]).unwrap()
}
