use num_bigint::BigUint;
use proptest::prelude::*;
use rado_walk::numerics::*;
use rado_walk::Error;

/// Independent partition count: coin-change DP over part sizes.
fn partitions_oracle(n: usize) -> Vec<u128> {
    let mut ways = vec![0u128; n + 1];
    ways[0] = 1;
    for part in 1..=n {
        for m in part..=n {
            ways[m] += ways[m - part];
        }
    }
    ways
}

/// `log*_2(x)` with the at-most-one threshold is the least k with `x <= 2^(k)`.
fn log_star_oracle(x: f64) -> u32 {
    let towers = [1.0, 2.0, 4.0, 16.0, 65536.0, f64::INFINITY];
    towers.iter().position(|&t| x <= t).unwrap() as u32
}

#[test]
fn partition_numbers_known_values() {
    let p = partition_numbers(100).unwrap();
    assert_eq!(p[5], BigUint::from(7u32));
    assert_eq!(p[10], BigUint::from(42u32));
    assert_eq!(p[100], BigUint::from(190_569_292u64));
}

#[test]
fn partition_numbers_match_coin_change() {
    let p = partition_numbers(120).unwrap();
    let q = partitions_oracle(120);
    for n in 0..=120 {
        assert_eq!(p[n], BigUint::from(q[n]), "p({n})");
    }
}

#[test]
fn partition_numbers_respect_growth_bound() {
    let p = partition_numbers(2000).unwrap();
    for (n, v) in p.iter().enumerate().skip(1) {
        let ln = (v.bits() as f64 - 1.0) * std::f64::consts::LN_2;
        assert!(ln < partition_log_upper(n as f64), "n = {n}");
    }
}

#[test]
fn partition_table_is_capped() {
    assert!(partition_numbers(10_001).is_err());
    assert_eq!(partition_numbers(10_000).unwrap().len(), 10_001);
}

#[test]
fn log_star_examples() {
    assert_eq!(log_star(65536.0, 2.0, LogStarConvention::AtMostOne).unwrap(), 4);
    assert_eq!(log_star(1.0, 2.0, LogStarConvention::AtMostOne).unwrap(), 0);
    assert_eq!(log_star(0.0, 2.0, LogStarConvention::AtMostOne).unwrap(), 0);
    assert_eq!(log_star(0.0, 1.2, LogStarConvention::AtMostOne).unwrap(), 0);
    // the stricter threshold costs exactly one more step on a tower
    assert_eq!(log_star(65536.0, 2.0, LogStarConvention::Nonpositive).unwrap(), 5);
}

#[test]
fn log_star_rejects_bad_input() {
    assert!(matches!(log_star(2.0, 1.0, LogStarConvention::AtMostOne), Err(Error::Domain(_))));
    assert!(matches!(log_star(2.0, 0.5, LogStarConvention::AtMostOne), Err(Error::Domain(_))));
    assert!(log_star(f64::NAN, 2.0, LogStarConvention::AtMostOne).is_err());
    assert!(log_star(-1.0, 2.0, LogStarConvention::AtMostOne).is_err());
}

#[test]
fn log_star_matches_tower_characterization() {
    for x in 1..=70_000u32 {
        assert_eq!(log_star(x as f64, 2.0, LogStarConvention::AtMostOne).unwrap(), log_star_oracle(x as f64), "x = {x}");
    }
}

#[test]
fn log_star_power_recursion() {
    for x in 2..=(1u32 << 20) {
        let lhs = log_star_pow2(x as f64, 2.0, LogStarConvention::AtMostOne).unwrap();
        let rhs = log_star(x as f64, 2.0, LogStarConvention::AtMostOne).unwrap();
        assert_eq!(lhs, rhs + 1, "x = {x}");
    }
}

#[test]
fn fixed_points_at_critical_base() {
    let (y, x) = fixed_points(critical_base()).unwrap();
    assert_eq!((y, x), (std::f64::consts::E, std::f64::consts::E));
    assert!(fixed_points(1.5).is_err());
    assert!(fixed_points(1.0).is_err());
}

#[test]
fn fixed_points_residuals() {
    for a in [1.01, 1.05, 1.2, 1.4, 1.44] {
        let (y, x) = fixed_points(a).unwrap();
        assert!(y < x, "a = {a}");
        assert!(fixed_point_residual(a, y) < 1e-12, "a = {a}: {}", fixed_point_residual(a, y));
        assert!(fixed_point_residual(a, x) < 1e-12, "a = {a}: {}", fixed_point_residual(a, x));
    }
    let (y, _) = fixed_points(1.01).unwrap();
    assert!(y > 1.0 && y < 1.02);
}

#[test]
fn log_star_fixed_point_branch() {
    let a = 1.2;
    let (_, xa) = fixed_points(a).unwrap();
    assert_eq!(log_star(xa, a, LogStarConvention::AtMostOne).unwrap(), 0);
    // from above, iterates contract toward x_a with factor 1/(x_a ln a)
    let n = log_star(xa + 0.5, a, LogStarConvention::AtMostOne).unwrap();
    let mut v = xa + 0.5;
    for _ in 0..n {
        v = v.ln() / a.ln();
    }
    assert!(v <= xa * (1.0 + FIXED_POINT_SLACK));
    assert!(n > 1);
}

#[test]
fn towers() {
    let v: Vec<u64> = (0..=4).map(|k| u64::try_from(&tower(k).unwrap().value).unwrap()).collect();
    assert_eq!(v, vec![1, 2, 4, 16, 65536]);
    assert_eq!(tower(5), Err(Error::Unmaterializable { height: 5 }));
    assert!(tower(5).unwrap_err().to_string().contains('5'));
}

#[test]
fn block_sum_closed_form() {
    assert_eq!(geometric_block_sum(0).unwrap(), ExactRational::ratio(1, 3));
    // bit 1 set: j = 2,3,6,7,... -> 2^-3 + 2^-4 + 2^-7 + 2^-8 + ... = (3/16) / (1 - 1/16) = 1/5
    assert_eq!(geometric_block_sum(1).unwrap(), ExactRational::ratio(1, 5));
}

#[test]
fn block_sum_against_truncated_sum() {
    for i in 0..=20u32 {
        let closed = geometric_block_sum(i).unwrap();
        // at delta = 1/2 the block sum is 1 / (2^(2^i) + 1)
        let denom = (BigUint::from(1u32) << (1u64 << i)) + 1u32;
        assert_eq!(closed.numer(), &1.into(), "i = {i}");
        assert_eq!(closed.denom().magnitude(), &denom, "i = {i}");
        // truncated sum of 2^-(j+1) over j <= stop with bit i set, as num / 2^(stop+1);
        // the tail past stop is at most 2^-(stop+1)
        let stop = (1u64 << (i + 1)) + 64;
        let mut num = BigUint::from(0u32);
        for j in 0..=stop {
            if (j >> i) & 1 == 1 {
                num.set_bit(stop - j, true);
            }
        }
        let scale = BigUint::from(1u32) << (stop + 1);
        assert!(&num * &denom <= scale, "i = {i}: truncated sum exceeds closed form");
        assert!(scale <= (&num + 1u32) * &denom, "i = {i}: closed form exceeds truncation plus tail");
        let f = block_mass_f64(0.5, i) * 0.5;
        assert!((f - closed.to_f64()).abs() <= 1e-15 * f.max(1e-300), "i = {i}");
    }
}

#[test]
fn exact_power_budget() {
    assert!(exact_power(&ExactRational::ratio(1, 2), 1 << 20).is_ok());
    assert!(matches!(exact_power(&ExactRational::ratio(1, 2), 1 << 30), Err(Error::Overflow(_))));
}

#[test]
fn rational_display_and_parse() {
    let r = ExactRational::ratio(6, -8);
    assert_eq!(r.to_string(), "-3/4");
    assert_eq!("-3/4".parse::<ExactRational>().unwrap(), r);
    assert_eq!("0.375".parse::<ExactRational>().unwrap(), ExactRational::ratio(3, 8));
    assert_eq!("5".parse::<ExactRational>().unwrap().to_string(), "5");
    assert!("1/0".parse::<ExactRational>().is_err());
    let j = serde_json::to_string(&ExactRational::ratio(3, 4)).unwrap();
    assert_eq!(j, "\"3/4\"");
}

#[test]
fn rational_to_f64_far_outside_range() {
    let tiny = ExactRational::ratio(1, 2).pow(5000);
    assert_eq!(tiny.to_f64(), 0.0);
    let small = ExactRational::ratio(3, 2).pow(1500) * ExactRational::ratio(1, 2).pow(1500);
    let expect = (1500.0 * 0.75f64.ln()).exp();
    assert!((small.to_f64() / expect - 1.0).abs() < 1e-12);
    let huge_ratio = ExactRational::ratio(1, 2).pow(3000) / ExactRational::ratio(1, 2).pow(2999);
    assert_eq!(huge_ratio.to_f64(), 0.5);
}

#[test]
fn zeta_bracket_contains_known_values() {
    let z2 = zeta(2.0, 10_000).unwrap();
    assert!(z2.contains(std::f64::consts::PI.powi(2) / 6.0));
    assert!(z2.radius < 1e-7);
    let z4 = zeta(4.0, 1000).unwrap();
    assert!(z4.contains(std::f64::consts::PI.powi(4) / 90.0));
    assert!(zeta(1.0, 10).is_err());
}

#[test]
fn interval_arithmetic_encloses() {
    let a = ErrorBoundedReal::new(1.0, 0.1);
    let b = ErrorBoundedReal::new(2.0, 0.2);
    for (x, y) in [(0.9, 1.8), (1.1, 2.2), (0.95, 2.1)] {
        assert!((a + b).contains(x + y));
        assert!((a - b).contains(x - y));
        assert!((a * b).contains(x * y));
        assert!(a.div(b).unwrap().contains(x / y));
    }
    assert!(ErrorBoundedReal::new(0.0, 1.0).recip().is_none());
}

#[test]
fn symbolic_constant_detection() {
    // (c (S + u)) / (S + u) reduces to c
    let s = ExactRational::ratio(3, 7);
    let c = ExactRational::ratio(5, 11);
    let den = Poly::linear(s.clone(), ExactRational::one());
    let f = SymbolicRational::new(den.scale(&c), den.clone());
    assert_eq!(f.as_constant(), Some(c.clone()));
    let g = SymbolicRational::new(Poly::constant(c), den);
    assert!(g.is_symbolic());
    assert!((g.eval_f64(0.0) - (5.0 / 11.0) / (3.0 / 7.0)).abs() < 1e-15);
}

fn small_rational() -> impl Strategy<Value = ExactRational> {
    (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| ExactRational::ratio(n, d))
}

proptest! {
    #[test]
    fn rational_field_laws(a in small_rational(), b in small_rational(), c in small_rational()) {
        prop_assert_eq!((&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!((&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !b.is_zero() {
            prop_assert_eq!((&a / &b) * &b, a.clone());
        }
        // lowest terms with positive denominator
        let g = num_integer::Integer::gcd(a.numer(), a.denom());
        prop_assert!(a.is_zero() || g == 1.into());
        prop_assert!(a.denom() > &0.into());
    }

    #[test]
    fn log_star_is_monotone(x in 0.0f64..1e300, y in 0.0f64..1e300, base in prop::sample::select(vec![2.0, 16.0])) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let a = log_star(lo, base, LogStarConvention::AtMostOne).unwrap();
        let b = log_star(hi, base, LogStarConvention::AtMostOne).unwrap();
        prop_assert!(a <= b);
    }

    #[test]
    fn rational_f64_roundtrip(v in -1e200f64..1e200) {
        let r = ExactRational::from_f64(v).unwrap();
        prop_assert_eq!(r.to_f64(), v);
    }
}
