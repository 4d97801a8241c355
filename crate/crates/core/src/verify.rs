//! The acceptance suite: ten numbered checks, each producing a status line.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::{check_reversibility, drift_sweep, kernel_row_exact, MixingTime, TvEngine, DEFAULT_TOWER_CAP};
use crate::graph::{estimate_prob_b, prob_b_product, prob_b_series, GraphOracle};
use crate::hardy::{
    convergence_check, gap_bounds, hardy_sandwich, path_series, path_sum, random_measured_tree, random_parent_chain,
    random_prefix_chain,
};
use crate::measure::WeightFamily;
use crate::numerics::{tower_u64, ExactRational};
use crate::spectral::{
    cheeger_constant, cheeger_sandwich_check, counterexample_eps, counterexample_generator, dirichlet_eigenvalue,
    pruned_tree_generator, random_reversible_generator, spanning_tree_iota_max, truncate_chain, CheegerStrategy,
    SpanningMode, Truncation,
};
use crate::{Error, Result};

pub const GENERATOR_COUNT: u64 = 100;
pub const GENERATOR_MAX_SIZE: usize = 12;
pub const HARDY_TREE_COUNT: u64 = 100;
pub const CONVERGENCE_TREE_COUNT: u64 = 20;
pub const CONVERGENCE_PAIRS: usize = 1000;
pub const RADO_CHEEGER_A_MAX: u64 = 1 << 12;
pub const SERIES_ACCURACY: f64 = 1e-12;
/// `2^-2 + 2^-3 + 2^-14`; the next term is `2^-253`.
pub const SERIES_AT_HALF: f64 = 0.375_061_035_156_25;
pub const CHAINS_PER_DELTA: usize = 1000;
pub const CHAIN_DELTAS: [f64; 5] = [0.3, 0.5, 0.7, std::f64::consts::FRAC_1_SQRT_2, 0.9];
pub const EIGEN_CAP: u64 = 1 << 10;
pub const REVERSIBILITY_CAP: u64 = 256;
pub const PROB_B_AGREEMENT: f64 = 1e-10;
/// Euler's function at 1/2.
pub const PROB_B_AT_HALF: f64 = 0.288_788_095_086_602_4;
pub const MONTE_CARLO_SEEDS: u64 = 10_000;
pub const MONTE_CARLO_N_MAX: u64 = 64;
pub const MONTE_CARLO_Z: f64 = 3.0;
pub const MIXING_THRESHOLD: f64 = 0.25;
pub const MIXING_MAX_STEPS: u64 = 200;
pub const CURVE_STEPS: u64 = 120;
pub const FIT_MIN_R_SQUARED: f64 = 0.9;
/// TV lower bound at step `k` from `2^(k)`, frozen from the first passing run
/// (measured 0.56495 for `k = 1..4` at cap `2^17`).
pub const TV_LOWER_BASELINE: f64 = 0.5649;
/// Mixing time from the root at cap `2^17`, frozen the same way.
pub const ROOT_MIXING_BASELINE: u64 = 6;
pub const DRIFT_RANGE: (u64, u64) = (2, 1 << 16);
pub const DRIFT_CAP: u64 = 1 << 17;
pub const DRIFT_THRESHOLD: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Undetermined,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Undetermined => "UNDETERMINED",
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl CriterionReport {
    /// One table line: `[id] STATUS title (time) detail`.
    pub fn line(&self) -> String {
        format!("[{:>2}] {:<12} {} ({:.2}s / {:.0}s) {}", self.id, self.status.label(), self.title, self.seconds, self.budget_seconds, self.detail)
    }
}

pub const CRITERIA: [(u8, &str, f64); 10] = [
    (1, "two-layer counterexample family", 10.0),
    (2, "Cheeger sandwich on random generators", 60.0),
    (3, "Hardy sandwich on random trees", 60.0),
    (4, "truncation convergence of Hardy constants", 60.0),
    (5, "Cheeger constant of the Rado parent tree", 120.0),
    (6, "path series, path sums and gap bounds", 60.0),
    (7, "exact reversibility and kernel rows", 120.0),
    (8, "probability that every vertex has a smaller neighbor", 120.0),
    (9, "mixing from tower starts", 600.0),
    (10, "log-star drift sweep", 300.0),
];

/// Runs criterion `id`. Computation errors become failures, exhausted search
/// budgets become undetermined results.
pub fn run_criterion(id: u8) -> Result<CriterionReport> {
    let &(_, title, budget) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::Domain(format!("no criterion {id}; expected 1..=10")))?;
    let start = Instant::now();
    let outcome = match id {
        1 => counterexample_family(),
        2 => cheeger_sandwich(),
        3 => hardy_sandwiches(),
        4 => truncation_convergence(),
        5 => rado_tree_cheeger(),
        6 => rado_constants(),
        7 => exact_identities(),
        8 => smaller_neighbor_event(),
        9 => tower_mixing(),
        _ => drift(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (mut status, mut detail) = match outcome {
        Ok(v) => v,
        Err(e @ (Error::BudgetExhausted { .. } | Error::EnumerationCap { .. })) => (Status::Undetermined, e.to_string()),
        Err(e) => (Status::Fail, format!("error: {e}")),
    };
    if seconds > budget && status == Status::Pass {
        status = Status::Fail;
        detail.push_str("; over the time budget");
    }
    Ok(CriterionReport { id, title, status, detail, seconds, budget_seconds: budget })
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| run_criterion(c.0).expect("listed criterion")).collect()
}

type Outcome = Result<(Status, String)>;

fn counterexample_family() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 2..=6usize {
        let eps = counterexample_eps(n);
        let l = counterexample_generator(n, &eps)?;
        let iota = cheeger_constant(&l, CheegerStrategy::Exhaustive)?.iota;
        let mode = if n <= 3 { SpanningMode::Exhaustive } else { SpanningMode::Witness { samples: 300, seed: n as u64 } };
        let rep = spanning_tree_iota_max(&l, mode)?;
        let ratio = rep.upper_bound.checked_div(&iota)?;
        let bound = ExactRational::ratio(1, n as i64);
        let good = iota == ExactRational::ratio(1, 4) && rep.upper_bound <= eps && ratio <= bound;
        ok &= good;
        let how = if rep.exact { "exhaustive" } else { "witness" };
        parts.push(format!("n={n} iota={iota} tree-max<={} ({how}, {} trees)", rep.upper_bound, rep.trees_examined));
    }
    Ok((Status::from_bool(ok), parts.join("; ")))
}

fn cheeger_sandwich() -> Outcome {
    let mut passed = 0;
    let mut worst_low = f64::INFINITY;
    for seed in 0..GENERATOR_COUNT {
        let n = 2 + (seed as usize % (GENERATOR_MAX_SIZE - 1));
        let l = random_reversible_generator(n, 0.35, 1000 + seed)?;
        let s = cheeger_sandwich_check(&l, CheegerStrategy::Exhaustive)?;
        passed += u64::from(s.pass);
        worst_low = worst_low.min(s.lambda / s.lower);
    }
    let detail = format!("{passed}/{GENERATOR_COUNT} generators; min lambda / lower bound = {worst_low:.3}");
    Ok((Status::from_bool(passed == GENERATOR_COUNT), detail))
}

fn hardy_sandwiches() -> Outcome {
    let (mut literal, mut every_top) = (0, 0);
    let mut worst = 0.0f64;
    for seed in 0..HARDY_TREE_COUNT {
        let n = 1 + (seed as usize * 7) % 29;
        let t = random_measured_tree(n, 3.0, 5000 + seed)?;
        let s = hardy_sandwich(&t)?;
        literal += u64::from(s.pass);
        every_top += u64::from(s.pass_all_tops);
        worst = worst.max(s.ratio);
    }
    let detail = format!(
        "root-child tops {literal}/{HARDY_TREE_COUNT} (worst c/b = {worst:.2}); every top {every_top}/{HARDY_TREE_COUNT}"
    );
    Ok((Status::from_bool(literal == HARDY_TREE_COUNT), detail))
}

fn truncation_convergence() -> Outcome {
    let samples = CONVERGENCE_PAIRS / CONVERGENCE_TREE_COUNT as usize;
    let (mut c_ok, mut b_ok, mut pairs, mut nu_bad, mut mu_bad, mut passed) = (0, 0, 0, 0, 0, 0);
    for seed in 0..CONVERGENCE_TREE_COUNT {
        let t = random_measured_tree(30, 3.0, 700 + seed)?;
        let chain = random_prefix_chain(&t, 5, seed);
        let rep = convergence_check(&t, &chain, samples, seed)?;
        c_ok += u64::from(rep.c_nondecreasing && rep.terminal_match);
        b_ok += u64::from(rep.b_below_full);
        pairs += rep.comparison_pairs;
        nu_bad += rep.nu_violations;
        mu_bad += rep.mu_violations;
        passed += u64::from(rep.pass);
    }
    let n = CONVERGENCE_TREE_COUNT;
    let detail = format!(
        "c monotone and terminal {c_ok}/{n}; b_n <= b {b_ok}/{n}; {pairs} pairs, nu comparison broken {nu_bad}, mu comparison broken {mu_bad}"
    );
    Ok((Status::from_bool(passed == n && pairs == CONVERGENCE_PAIRS), detail))
}

fn rado_tree_cheeger() -> Outcome {
    let rep = crate::spectral::tree_cheeger_rado(&GraphOracle::binary(), &WeightFamily::half(), RADO_CHEEGER_A_MAX)?;
    let ok = rep.holds && rep.inf_lower >= ExactRational::ratio(1, 2);
    let detail = format!(
        "inf over a <= {} >= {:.6} at a = {} (bracket upper {:.6})",
        rep.a_max,
        rep.inf_lower.to_f64(),
        rep.argmin,
        rep.upper_at_argmin.to_f64()
    );
    Ok((Status::from_bool(ok), detail))
}

fn rado_constants() -> Outcome {
    let c = path_series(0.5)?;
    let series_ok = c.tail_bound <= SERIES_ACCURACY
        && (c.value - SERIES_AT_HALF).abs() <= SERIES_ACCURACY
        && c.value + c.tail_bound <= 2.0
        && c.closed_form_bound == 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut chains_ok = true;
    let mut worst = 0.0f64;
    for delta in CHAIN_DELTAS {
        let s = path_series(delta)?;
        for _ in 0..CHAINS_PER_DELTA {
            let sum = path_sum(delta, &random_parent_chain(&mut rng, 6))?;
            chains_ok &= sum <= s.value + s.tail_bound;
            worst = worst.max(sum / s.value);
        }
    }
    let mut gaps_ok = true;
    let mut gap_parts = Vec::new();
    for delta in [0.5, 0.9] {
        let w = WeightFamily::geometric(ExactRational::from_f64(delta)?)?;
        let gb = gap_bounds(delta)?;
        let tree = dirichlet_eigenvalue(&pruned_tree_generator(&w, EIGEN_CAP)?)?.lambda;
        let walk = dirichlet_eigenvalue(&truncate_chain(&GraphOracle::binary(), &w, EIGEN_CAP, Truncation::PinnedRoot)?)?.lambda;
        let tree_bound = gb.cheeger.max(gb.hardy).max(gb.hardy_chained);
        gaps_ok &= tree_bound <= tree && tree_bound * gb.walk_factor <= walk;
        gap_parts.push(format!(
            "delta={delta}: cheeger {:.4e}, hardy {:.4e}, chained {:.4e} vs tree {tree:.4} / walk {walk:.4}",
            gb.cheeger, gb.hardy, gb.hardy_chained
        ));
    }
    let detail = format!(
        "C(1/2) = {:.14} (tail {:.1e}); {} chains, max B/C = {worst:.4}; {}",
        c.value,
        c.tail_bound,
        CHAINS_PER_DELTA * CHAIN_DELTAS.len(),
        gap_parts.join("; ")
    );
    Ok((Status::from_bool(series_ok && chains_ok && gaps_ok), detail))
}

fn exact_identities() -> Outcome {
    let g = GraphOracle::binary();
    let w = WeightFamily::half();
    let rev = check_reversibility(&g, &w, REVERSIBILITY_CAP)?;
    let rows: Vec<u64> = (0..=REVERSIBILITY_CAP).collect();
    let mut rows_ok = 0;
    for &x in &rows {
        rows_ok += u64::from(kernel_row_exact(&g, &w, x, REVERSIBILITY_CAP)?.sums_to_one());
    }
    let k01 = kernel_row_exact(&g, &w, 0, 16)?.entry_value(1);
    let k_ok = k01 == Some(ExactRational::ratio(3, 4));
    let ok = rev.holds && rev.max_violation == 0.0 && rows_ok == rows.len() as u64 && k_ok;
    let detail = format!(
        "{} pairs reversible ({} symbolic), max violation {}; {rows_ok}/{} rows sum to 1; K(0,1) = {}",
        rev.pairs_checked,
        rev.symbolic_pairs,
        rev.max_violation,
        rows.len(),
        k01.map_or("unmaterialized".into(), |v| v.to_string())
    );
    Ok((Status::from_bool(ok), detail))
}

fn smaller_neighbor_event() -> Outcome {
    let prod = prob_b_product(0.5)?;
    let series = prob_b_series(0.5)?;
    let mc = estimate_prob_b(0.5, MONTE_CARLO_N_MAX, MONTE_CARLO_SEEDS)?;
    let agree = (prod.mid - series.mid).abs() <= PROB_B_AGREEMENT && (series.mid - PROB_B_AT_HALF).abs() <= PROB_B_AGREEMENT;
    let ok = agree && prod.lo() >= 0.25 && mc.z_score <= MONTE_CARLO_Z;
    let detail = format!(
        "product {:.12}, series {:.12}; Monte Carlo {:.4} vs {:.4} on [1, {}] (truncation correction <= {:.1e}), z = {:.2}",
        prod.mid,
        series.mid,
        mc.estimate,
        mc.finite_product,
        MONTE_CARLO_N_MAX,
        // the finite product exceeds the infinite one by at most sum_{x > n} 2^-x
        0.5f64.powi(MONTE_CARLO_N_MAX as i32),
        mc.z_score
    );
    Ok((Status::from_bool(ok), detail))
}

fn tower_mixing() -> Outcome {
    let engine = TvEngine::new(&GraphOracle::binary(), &WeightFamily::half(), DEFAULT_TOWER_CAP)?;
    let mut taus = Vec::new();
    let mut undetermined = false;
    let mut fits_ok = true;
    let mut lower_ok = true;
    let mut min_lower = f64::INFINITY;
    let mut worst_r2 = 1.0f64;
    for k in 1..=4u32 {
        let x0 = tower_u64(k)?;
        match engine.mixing_time(x0, MIXING_THRESHOLD, MIXING_MAX_STEPS)? {
            MixingTime::Determined { steps } => taus.push(steps),
            MixingTime::Undetermined { .. } => undetermined = true,
        }
        let curve = engine.curve(x0, CURVE_STEPS)?;
        match &curve.fit {
            Some(f) => {
                fits_ok &= f.slope < 0.0 && f.r_squared >= FIT_MIN_R_SQUARED;
                worst_r2 = worst_r2.min(f.r_squared);
            }
            None => fits_ok = false,
        }
        let lo = curve.points[k as usize].lo;
        min_lower = min_lower.min(lo);
        lower_ok &= lo > TV_LOWER_BASELINE;
    }
    let root = match engine.mixing_time(0, MIXING_THRESHOLD, MIXING_MAX_STEPS)? {
        MixingTime::Determined { steps } => steps.to_string(),
        other => format!("{other:?}"),
    };
    let detail = format!(
        "tau = {taus:?} (root {root}, baseline {ROOT_MIXING_BASELINE}); worst fit R^2 = {worst_r2:.6}; min TV lower at step k = {min_lower:.5} vs baseline {TV_LOWER_BASELINE}"
    );
    if undetermined {
        return Ok((Status::Undetermined, detail));
    }
    let monotone = taus.windows(2).all(|w| w[0] <= w[1]) && taus[3] > taus[0];
    Ok((Status::from_bool(monotone && fits_ok && lower_ok), detail))
}

fn drift() -> Outcome {
    let s = drift_sweep(&GraphOracle::binary(), &WeightFamily::half(), DRIFT_RANGE.0, DRIFT_RANGE.1, DRIFT_CAP, 2.0, DRIFT_THRESHOLD)?;
    let ok = s.crossover < s.to && s.max_beyond < DRIFT_THRESHOLD;
    let detail = format!(
        "crossover j0 = {}, max beyond = {:.6}, ceiling (3 + 2/e)/4 = {:.6}",
        s.crossover, s.max_beyond, s.ceiling
    );
    Ok((Status::from_bool(ok), detail))
}
