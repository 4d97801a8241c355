use serde::Serialize;

use crate::error::Result;
use crate::graph::GraphOracle;
use crate::measure::WeightFamily;
use crate::numerics::{ExactRational, Poly, SymbolicRational};

use super::kernel::{kernel_row_exact, ExactKernelRow};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReversibilityReport {
    pub cap: u64,
    pub holds: bool,
    pub pairs_checked: u64,
    /// Pairs whose rows carry an unmaterialized remainder on at least one side.
    pub symbolic_pairs: u64,
    pub max_violation: f64,
    pub first_failure: Option<(u64, u64)>,
}

/// `w(i) = Q(i) (S_i + u_i)` in the row's own remainder symbol.
fn weight(row: &ExactKernelRow) -> SymbolicRational {
    let q = row.delta.pow(row.source);
    let num = if row.normalizer.symbolic {
        Poly::linear(&q * &row.normalizer.known, q)
    } else {
        Poly::constant(q * &row.normalizer.known)
    };
    SymbolicRational::new(num, Poly::constant(ExactRational::one()))
}

/// Checks `w(i) K(i,j) = w(j) K(j,i)` exactly for all `i, j <= cap`, with
/// unnormalized `w(i) = Q(i) Q(N(i))`. Each side is reduced in its own row's
/// remainder symbol; the identity holds when both reduce to the same constant.
pub fn check_reversibility(g: &GraphOracle, w: &WeightFamily, cap: u64) -> Result<ReversibilityReport> {
    let xs: Vec<u64> = (0..=cap).collect();
    let rows: Vec<Result<ExactKernelRow>> = crate::par::map(&xs, |&x| {
        let wide = if x == 0 { cap } else { cap.max(g.parent(x)?) };
        kernel_row_exact(g, w, x, wide)
    });
    let rows: Vec<ExactKernelRow> = rows.into_iter().collect::<Result<_>>()?;
    let weights: Vec<SymbolicRational> = rows.iter().map(weight).collect();

    // per source i: (pairs, symbolic pairs, worst violation, first failing j)
    let per_row = crate::par::map(&xs, |&i| {
        let ri = &rows[i as usize];
        let mut symbolic = 0u64;
        let mut worst = 0.0f64;
        let mut failure = None;
        for j in (i + 1)..=cap {
            let rj = &rows[j as usize];
            let fwd = weights[i as usize].mul(&ri.entry(j));
            let back = weights[j as usize].mul(&rj.entry(i));
            if ri.normalizer.symbolic || rj.normalizer.symbolic {
                symbolic += 1;
            }
            let ok = match (fwd.as_constant(), back.as_constant()) {
                (Some(a), Some(b)) => {
                    let same = a == b;
                    if !same {
                        worst = worst.max((a - b).abs().to_f64());
                    }
                    same
                }
                _ => {
                    let mid = |r: &ExactKernelRow, f: &SymbolicRational| f.eval_f64(r.normalizer.remainder.to_f64() / 2.0);
                    worst = worst.max((mid(ri, &fwd) - mid(rj, &back)).abs());
                    false
                }
            };
            if !ok && failure.is_none() {
                failure = Some((i, j));
            }
        }
        (cap - i, symbolic, worst, failure)
    });

    let mut report = ReversibilityReport {
        cap,
        holds: true,
        pairs_checked: 0,
        symbolic_pairs: 0,
        max_violation: 0.0,
        first_failure: None,
    };
    for (pairs, symbolic, worst, failure) in per_row {
        report.pairs_checked += pairs;
        report.symbolic_pairs += symbolic;
        report.max_violation = report.max_violation.max(worst);
        if failure.is_some() && report.first_failure.is_none() {
            report.first_failure = failure;
        }
    }
    report.holds = report.first_failure.is_none() && report.max_violation == 0.0;
    Ok(report)
}
