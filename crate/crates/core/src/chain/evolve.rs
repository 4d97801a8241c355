use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::GraphOracle;
use crate::measure::{stationary, NeighborhoodMode, WeightFamily};
use crate::numerics::{block_mass_f64, log_star, ExactRational, LogStarConvention};

use super::distribution::{tv_from_parts, SparseDistribution, TvInterval};
use super::kernel::{kernel_row, kernel_row_exact};

/// Dense float transition operator on the window `[0, cap]`.
///
/// Row `x` sends `Q(j) / U(x)` to each neighbor `j <= cap`, where `U(x)` bounds
/// `Q(N(x))` from above; everything else is booked as escaped mass.
pub struct FloatChain {
    cap: u64,
    q: Vec<f64>,
    norm: Vec<f64>,
    escape_frac: Vec<f64>,
    /// `None` for the binary model, whose rows are enumerated on the fly.
    explicit: Option<Vec<Vec<(u32, f64)>>>,
    /// Past this index `Q(j)` is zero in f64.
    q_limit: u64,
}

impl FloatChain {
    pub fn new(g: &GraphOracle, w: &WeightFamily, cap: u64) -> Result<Self> {
        if cap >= u32::MAX as u64 {
            return Err(Error::Domain(format!("window cap {cap} too large for the dense engine")));
        }
        let n = cap as usize + 1;
        let q: Vec<f64> = (0..=cap).map(|j| w.q_f64(j)).collect();
        let q_limit = q.iter().rposition(|&v| v > 0.0).unwrap_or(0) as u64;
        let binary = g.is_binary() && w.delta().is_some();
        let mut norm = vec![0.0; n];
        let mut escape_frac = vec![0.0; n];
        let mut explicit = None;
        if binary {
            let d = w.delta_f64().expect("geometric");
            for x in 0..=cap {
                let mut u = 0.0;
                for b in 0..64u64.min(x) {
                    if (x >> b) & 1 == 1 {
                        u += d.powi(b as i32);
                    }
                }
                if x < 64 {
                    u += block_mass_f64(d, x as u32);
                }
                let mut inside = 0.0;
                for_each_binary_neighbor(x, cap.min(q_limit), |j| inside += q[j as usize]);
                norm[x as usize] = u;
                escape_frac[x as usize] = (1.0 - inside / u).max(0.0);
            }
        } else {
            let rows = build_rows(g, w, cap, &q)?;
            for (x, (u, row)) in rows.iter().enumerate() {
                norm[x] = *u;
                let inside: f64 = row.iter().map(|e| e.1).sum();
                escape_frac[x] = (1.0 - inside).max(0.0);
            }
            explicit = Some(rows.into_iter().map(|r| r.1).collect());
        }
        Ok(Self { cap, q, norm, escape_frac, explicit, q_limit })
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// One step of the dense distribution `d`; returns the mass that escaped.
    pub fn step_dense(&self, d: &[f64], out: &mut [f64]) -> f64 {
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut escaped = 0.0;
        let lim = self.cap.min(self.q_limit);
        for (x, &m) in d.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            escaped += m * self.escape_frac[x];
            match &self.explicit {
                Some(rows) => {
                    for &(j, k) in &rows[x] {
                        out[j as usize] += m * k;
                    }
                }
                None => {
                    let f = m / self.norm[x];
                    for_each_binary_neighbor(x as u64, lim, |j| out[j as usize] += f * self.q[j as usize]);
                }
            }
        }
        escaped
    }
}

fn for_each_binary_neighbor(x: u64, cap: u64, mut f: impl FnMut(u64)) {
    for b in 0..64u64.min(x) {
        if (x >> b) & 1 == 1 && b <= cap {
            f(b);
        }
    }
    if x < 63 && (1u64 << x) <= cap {
        let width = 1u64 << x;
        let mut base = width;
        while base <= cap {
            let end = (base + width - 1).min(cap);
            for j in base..=end {
                f(j);
            }
            base += 2 * width;
        }
    }
}

#[allow(clippy::type_complexity)]
fn build_rows(g: &GraphOracle, w: &WeightFamily, cap: u64, q: &[f64]) -> Result<Vec<(f64, Vec<(u32, f64)>)>> {
    let one = |x: u64| -> Result<(f64, Vec<(u32, f64)>)> {
        let h = cap.max(x).saturating_add(w.float_horizon().min(1 << 12));
        let n = crate::measure::q_neighborhood_f64(g, w, x, NeighborhoodMode::Truncated { cap: h })?;
        let u = n.upper();
        let row = g.neighbors_up_to(x, cap).into_iter().map(|j| (j as u32, q[j as usize] / u)).collect();
        Ok((u, row))
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..=cap).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..=cap).map(one).collect()
    }
}

/// One float step of an arbitrary sparse distribution, rows computed on demand.
pub fn step(g: &GraphOracle, w: &WeightFamily, d: &SparseDistribution<f64>, cap: u64) -> Result<SparseDistribution<f64>> {
    let mut out = vec![0.0; cap as usize + 1];
    let mut escaped = d.escaped;
    for (&x, &m) in &d.masses {
        let row_cap = row_cap(g, x, cap)?;
        let row = kernel_row(g, w, x, row_cap)?;
        let mut inside = 0.0;
        for &(j, k) in &row.entries {
            if j <= cap {
                out[j as usize] += m * k;
                inside += k;
            }
        }
        escaped += m * (1.0 - inside).max(0.0);
    }
    Ok(SparseDistribution::from_dense(&out, escaped))
}

fn row_cap(g: &GraphOracle, x: u64, cap: u64) -> Result<u64> {
    if x == 0 {
        return Ok(cap);
    }
    Ok(cap.max(g.parent(x)?))
}

/// `steps` float steps from the point mass at `x0`.
pub fn evolve(g: &GraphOracle, w: &WeightFamily, x0: u64, steps: u64, cap: u64) -> Result<SparseDistribution<f64>> {
    let chain = FloatChain::new(g, w, cap)?;
    let mut d = SparseDistribution::point(x0);
    let mut done = 0;
    if x0 > cap && steps > 0 {
        d = step(g, w, &d, cap)?;
        done = 1;
    }
    if x0 > cap && steps == 0 {
        return Ok(d);
    }
    let mut dense = d.to_dense(cap);
    let mut escaped = d.escaped;
    let mut buf = vec![0.0; dense.len()];
    for _ in done..steps {
        escaped += chain.step_dense(&dense, &mut buf);
        std::mem::swap(&mut dense, &mut buf);
    }
    Ok(SparseDistribution::from_dense(&dense, escaped))
}

/// Exact evolution. Each row contributes its rational lower bounds
/// `Q(j) / (S + r)`; the shortfall, together with mass leaving `[0, cap]`, is
/// added to `escaped`, so `tracked + escaped = 1` holds exactly.
pub fn evolve_exact(
    g: &GraphOracle,
    w: &WeightFamily,
    x0: u64,
    steps: u64,
    cap: u64,
) -> Result<SparseDistribution<ExactRational>> {
    let mut d = SparseDistribution::point(x0);
    let mut rows = HashMap::new();
    for _ in 0..steps {
        d = step_exact_cached(g, w, &d, cap, &mut rows)?;
    }
    Ok(d)
}

pub fn step_exact(
    g: &GraphOracle,
    w: &WeightFamily,
    d: &SparseDistribution<ExactRational>,
    cap: u64,
) -> Result<SparseDistribution<ExactRational>> {
    step_exact_cached(g, w, d, cap, &mut HashMap::new())
}

/// Normalizers wider than this many bits are rounded up before use in `evolve_exact`.
pub const NORMALIZER_BITS: u64 = 256;

/// Rounds `u` up to a multiple of `2^-192` when it is wide. Distinct wide normalizers
/// otherwise multiply into every accumulated mass.
fn coarse_upper(u: ExactRational) -> ExactRational {
    if u.bits() <= NORMALIZER_BITS {
        return u;
    }
    let scale = ExactRational::from_integer(num_bigint::BigInt::from(1u8) << 192u32);
    let scaled = &u * &scale;
    let up = -(-scaled).floor();
    ExactRational::from_integer(up) / scale
}

/// Window targets of a row, `1 / U` and the in-window mass `sum Q(j) / U`.
struct CachedRow {
    targets: Vec<u64>,
    inv_upper: ExactRational,
    inside: ExactRational,
}

fn step_exact_cached(
    g: &GraphOracle,
    w: &WeightFamily,
    d: &SparseDistribution<ExactRational>,
    cap: u64,
    rows: &mut HashMap<u64, CachedRow>,
) -> Result<SparseDistribution<ExactRational>> {
    let delta = w.require_delta()?;
    // acc[j] collects sum of m(x) / U(x); the common factor Q(j) is applied once at the end
    let mut acc: std::collections::BTreeMap<u64, ExactRational> = Default::default();
    let mut escaped = d.escaped.clone();
    for (&x, m) in &d.masses {
        let row = match rows.entry(x) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => {
                let row = kernel_row_exact(g, w, x, row_cap(g, x, cap)?)?;
                let targets: Vec<u64> = row.window.iter().copied().filter(|&j| j <= cap).collect();
                let inv_upper = coarse_upper(row.normalizer.upper()).recip()?;
                let q_sum: ExactRational = targets.iter().map(|&j| delta.pow(j)).sum();
                let inside = &q_sum * &inv_upper;
                e.insert(CachedRow { targets, inv_upper, inside })
            }
        };
        let row = &*row;
        let c = m * &row.inv_upper;
        for &j in &row.targets {
            *acc.entry(j).or_insert_with(ExactRational::zero) += &c;
        }
        escaped += m * &(ExactRational::one() - &row.inside);
    }
    let masses = acc.into_iter().map(|(j, a)| (j, a * delta.pow(j))).collect();
    Ok(SparseDistribution { masses, escaped })
}

/// Lower bounds on `pi` over the window, with the missing mass as escaped.
#[derive(Debug, Clone)]
pub struct StationaryReference {
    pub pi_lower: Vec<f64>,
    pub escaped: f64,
}

impl StationaryReference {
    pub fn new(g: &GraphOracle, w: &WeightFamily, cap: u64) -> Result<Self> {
        let s = stationary(g, w, cap)?;
        let pi_lower = s.pi_lower();
        let tracked: f64 = pi_lower.iter().sum();
        Ok(Self { pi_lower, escaped: (1.0 - tracked).max(0.0) })
    }

    pub fn tv(&self, dense: &[f64], escaped: f64) -> TvInterval<f64> {
        let l1: f64 = dense.iter().zip(&self.pi_lower).map(|(a, b)| (a - b).abs()).sum();
        tv_from_parts(l1, escaped, self.escaped)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvPoint {
    pub step: u64,
    pub lo: f64,
    pub hi: f64,
    pub escaped: f64,
}

/// Log-linear fit `ln tv_hi ~ intercept + slope * step` over the decaying part
/// of the running-minimum envelope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub first_step: u64,
    pub last_step: u64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `-slope`, the empirical rate `B`.
    pub rate: f64,
    /// `exp(intercept - log*(x0))`, the empirical prefactor `A`.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TvCurve {
    pub start: u64,
    pub cap: u64,
    pub points: Vec<TvPoint>,
    pub fit: Option<DecayFit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum MixingTime {
    Determined { steps: u64 },
    /// Some interval straddled the threshold before (or without) a certified crossing.
    Undetermined { lower: u64, upper: Option<u64> },
}

/// Float chain and stationary reference on one window, reusable across starts.
pub struct TvEngine {
    pub chain: FloatChain,
    pub reference: StationaryReference,
    g: GraphOracle,
    w: WeightFamily,
}

/// Envelope range used for the decay fit: above the float floor, below the plateau.
const FIT_CEILING: f64 = 0.5;
const FIT_FLOOR: f64 = 1e-8;

impl TvEngine {
    pub fn new(g: &GraphOracle, w: &WeightFamily, cap: u64) -> Result<Self> {
        Ok(Self {
            chain: FloatChain::new(g, w, cap)?,
            reference: StationaryReference::new(g, w, cap)?,
            g: g.clone(),
            w: w.clone(),
        })
    }

    /// Calls `visit` with the TV interval at steps `0..=max_steps` until it returns false.
    fn walk(&self, x0: u64, max_steps: u64, mut visit: impl FnMut(u64, &TvInterval<f64>, f64) -> bool) -> Result<()> {
        let cap = self.chain.cap();
        let mut d = SparseDistribution::point(x0);
        let mut dense = d.to_dense(cap);
        let mut escaped = 0.0;
        if x0 > cap {
            escaped = 1.0;
        }
        if !visit(0, &self.reference.tv(&dense, escaped), escaped) {
            return Ok(());
        }
        let mut start = 1;
        if x0 > cap && max_steps > 0 {
            d = step(&self.g, &self.w, &d, cap)?;
            dense = d.to_dense(cap);
            escaped = d.escaped;
            if !visit(1, &self.reference.tv(&dense, escaped), escaped) {
                return Ok(());
            }
            start = 2;
        }
        let mut buf = vec![0.0; dense.len()];
        for l in start..=max_steps {
            escaped += self.chain.step_dense(&dense, &mut buf);
            std::mem::swap(&mut dense, &mut buf);
            if !visit(l, &self.reference.tv(&dense, escaped), escaped) {
                break;
            }
        }
        Ok(())
    }

    pub fn curve(&self, x0: u64, max_steps: u64) -> Result<TvCurve> {
        let mut points = Vec::new();
        self.walk(x0, max_steps, |l, tv, e| {
            points.push(TvPoint { step: l, lo: tv.lo, hi: tv.hi, escaped: e });
            true
        })?;
        let fit = fit_decay(&points, x0);
        Ok(TvCurve { start: x0, cap: self.chain.cap(), points, fit })
    }

    pub fn mixing_time(&self, x0: u64, threshold: f64, max_steps: u64) -> Result<MixingTime> {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::Domain(format!("threshold must lie in (0,1], got {threshold}")));
        }
        let mut straddle: Option<u64> = None;
        let mut crossed: Option<u64> = None;
        self.walk(x0, max_steps, |l, tv, _| {
            if tv.hi <= threshold {
                crossed = Some(l);
                return false;
            }
            if tv.lo <= threshold && straddle.is_none() {
                straddle = Some(l);
            }
            true
        })?;
        Ok(match (straddle, crossed) {
            (None, Some(l)) => MixingTime::Determined { steps: l },
            (Some(s), c) => MixingTime::Undetermined { lower: s, upper: c },
            (None, None) => MixingTime::Undetermined { lower: max_steps + 1, upper: None },
        })
    }
}

fn fit_decay(points: &[TvPoint], x0: u64) -> Option<DecayFit> {
    let mut env = f64::INFINITY;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for p in points {
        env = env.min(p.hi);
        if (FIT_FLOOR..=FIT_CEILING).contains(&env) {
            xs.push(p.step as f64);
            ys.push(env.ln());
        }
    }
    if xs.len() < 3 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    let ls = log_star(x0 as f64, 2.0, LogStarConvention::AtMostOne).unwrap_or(0) as f64;
    Some(DecayFit {
        first_step: xs[0] as u64,
        last_step: *xs.last().expect("nonempty") as u64,
        slope,
        intercept,
        r_squared,
        rate: -slope,
        amplitude: (intercept - ls).exp(),
    })
}

pub fn tv_decay_curve(g: &GraphOracle, w: &WeightFamily, x0: u64, max_steps: u64, cap: u64) -> Result<TvCurve> {
    TvEngine::new(g, w, cap)?.curve(x0, max_steps)
}

pub fn mixing_time(
    g: &GraphOracle,
    w: &WeightFamily,
    x0: u64,
    threshold: f64,
    cap: u64,
    max_steps: u64,
) -> Result<MixingTime> {
    TvEngine::new(g, w, cap)?.mixing_time(x0, threshold, max_steps)
}
