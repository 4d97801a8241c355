use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};

/// Tower of 2s: `2^(0) = 1`, `2^(k) = 2^(2^(k-1))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerValue {
    pub height: u32,
    #[serde(serialize_with = "crate::report::ser_biguint")]
    pub value: BigUint,
}

pub const MAX_TOWER_HEIGHT: u32 = 4;

pub fn tower(k: u32) -> Result<TowerValue> {
    if k > MAX_TOWER_HEIGHT {
        return Err(Error::Unmaterializable { height: k });
    }
    let mut v = BigUint::from(1u32);
    for _ in 0..k {
        let e = u64::try_from(&v).expect("tower exponent fits for k <= 4");
        v = BigUint::from(1u32) << e;
    }
    Ok(TowerValue { height: k, value: v })
}

/// `2^(k)` as u64 for `k <= 4`.
pub fn tower_u64(k: u32) -> Result<u64> {
    match k {
        0 => Ok(1),
        1 => Ok(2),
        2 => Ok(4),
        3 => Ok(16),
        4 => Ok(65536),
        _ => Err(Error::Unmaterializable { height: k }),
    }
}
