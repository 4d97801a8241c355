use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub const MAX_PARTITION_INDEX: usize = 10_000;

/// `p(0), ..., p(n_max)` via Euler's pentagonal-number recurrence.
pub fn partition_numbers(n_max: usize) -> Result<Vec<num_bigint::BigUint>> {
    if n_max > MAX_PARTITION_INDEX {
        return Err(Error::Domain(format!("partition table limited to n <= {MAX_PARTITION_INDEX}, got {n_max}")));
    }
    let mut p: Vec<BigInt> = Vec::with_capacity(n_max + 1);
    p.push(BigInt::from(1));
    for n in 1..=n_max {
        let mut acc = BigInt::zero();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let sign_pos = k % 2 == 1;
            let mut term = p[n - g1].clone();
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= n {
                term += &p[n - g2];
            }
            if sign_pos {
                acc += term;
            } else {
                acc -= term;
            }
        }
        debug_assert!(!acc.is_negative());
        p.push(acc);
    }
    Ok(p.into_iter().map(|v| v.to_biguint().expect("partition numbers are positive")).collect())
}

/// `ln p(n) < pi * sqrt(2n/3)`; the classical upper estimate used for tail bounds.
pub fn partition_log_upper(n: f64) -> f64 {
    std::f64::consts::PI * (2.0 * n / 3.0).sqrt()
}
