use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rado_walk::graph::GraphOracle;
use rado_walk::measure::WeightFamily;
use rado_walk::numerics::ExactRational;
use rado_walk::spectral::*;

fn r(n: i64, d: i64) -> ExactRational {
    ExactRational::ratio(n, d)
}

/// Number of eigenvalues of `s` below `t` via the signs of LDL^T pivots.
fn count_below(s: &[Vec<f64>], t: f64) -> usize {
    let n = s.len();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| s[i][j] - if i == j { t } else { 0.0 }).collect()).collect();
    let mut neg = 0;
    for k in 0..n {
        let mut p = a[k][k];
        if p == 0.0 {
            p = -1e-300;
        }
        if p < 0.0 {
            neg += 1;
        }
        for i in (k + 1)..n {
            let f = a[i][k] / p;
            for j in (k + 1)..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    neg
}

/// Smallest eigenvalue of the symmetrized `-L` by bisection on the inertia count.
fn bisection_lambda(l: &SubMarkovGenerator<f64>) -> f64 {
    let n = l.size();
    let s: Vec<Vec<f64>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| if x == y { -l.rate(x, x) } else { -(l.rate(x, y) * l.rate(y, x)).sqrt() })
                .collect()
        })
        .collect();
    let bound: f64 = (0..n).map(|x| (0..n).map(|y| s[x][y].abs()).sum::<f64>()).fold(0.0, f64::max);
    let (mut lo, mut hi) = (-bound - 1.0, bound + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(&s, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn markovian_generator_has_zero_constants() {
    // two-state chain, no killing
    let l = SubMarkovGenerator::new(vec![vec![-1.0, 1.0], vec![2.0, -2.0]], vec![2.0, 1.0]).unwrap();
    assert!(l.is_markovian());
    let e = dirichlet_eigenvalue(&l).unwrap();
    assert!(e.lambda.abs() < 1e-12);
    let c = cheeger_constant(&l, CheegerStrategy::Exhaustive).unwrap();
    assert_eq!(c.iota, 0.0);
    assert_eq!(c.argmin, vec![0, 1]);
    let s = cheeger_sandwich_check(&l, CheegerStrategy::Exhaustive).unwrap();
    assert!(s.pass);
}

#[test]
fn single_state_with_killing() {
    let l = SubMarkovGenerator::new(vec![vec![r(-3, 7)]], vec![r(1, 1)]).unwrap();
    assert_eq!(cheeger_constant(&l, CheegerStrategy::Exhaustive).unwrap().iota, r(3, 7));
    assert!((dirichlet_eigenvalue(&l).unwrap().lambda - 3.0 / 7.0).abs() < 1e-15);
}

#[test]
fn construction_rejects_bad_input() {
    assert!(SubMarkovGenerator::new(vec![vec![-1.0, 1.0], vec![1.0, -1.0]], vec![1.0, 2.0]).is_err());
    assert!(SubMarkovGenerator::new(vec![vec![-1.0, 2.0], vec![1.0, -1.0]], vec![1.0, 2.0]).is_err());
    assert!(SubMarkovGenerator::new(vec![vec![1.0]], vec![1.0]).is_err());
    assert!(SubMarkovGenerator::new(vec![vec![r(-1, 1), r(-1, 2)], vec![r(1, 2), r(-1, 1)]], vec![r(1, 1), r(1, 1)]).is_err());
}

#[test]
fn eigenvalue_matches_inertia_bisection() {
    for seed in 0..20 {
        let l = random_reversible_generator(8, 0.4, seed).unwrap();
        let e = dirichlet_eigenvalue(&l).unwrap();
        let oracle = bisection_lambda(&l);
        assert!((e.lambda - oracle).abs() < 1e-9, "seed {seed}: {} vs {oracle}", e.lambda);
        assert!(e.residual < 1e-9);
    }
}

#[test]
fn random_search_never_beats_eigenvalue() {
    let l = random_reversible_generator(8, 0.5, 77).unwrap();
    let e = dirichlet_eigenvalue(&l).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut best = f64::INFINITY;
    for _ in 0..100_000 {
        let f: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        best = best.min(rayleigh_quotient(&l, &f));
    }
    assert!(best >= e.lambda - 1e-9);
    // the eigenvector, mapped back to ordinary coordinates, attains it
    let f: Vec<f64> = e.ground_state.iter().zip(l.pi()).map(|(v, p)| v / p.sqrt()).collect();
    assert!((rayleigh_quotient(&l, &f) - e.lambda).abs() < 1e-9);
}

#[test]
fn eigenvalue_is_permutation_invariant() {
    let l = random_reversible_generator(10, 0.3, 5).unwrap();
    let base = dirichlet_eigenvalue(&l).unwrap().lambda;
    let perm = [3, 7, 0, 9, 1, 4, 8, 2, 6, 5];
    let p = l.permuted(&perm).unwrap();
    assert!((dirichlet_eigenvalue(&p).unwrap().lambda - base).abs() < 1e-9);
    let c0 = cheeger_constant(&l, CheegerStrategy::Exhaustive).unwrap().iota;
    let c1 = cheeger_constant(&p, CheegerStrategy::Exhaustive).unwrap().iota;
    assert!((c0 - c1).abs() < 1e-12);
}

#[test]
fn exhaustive_matches_definition() {
    // independent evaluation of every subset ratio from the edge measure
    let l = random_reversible_generator(7, 0.5, 11).unwrap();
    let em = l.edge_measure();
    let mut best = f64::INFINITY;
    for set in 1u32..(1 << 7) {
        let inside = |x: usize| (set >> x) & 1 == 1;
        let b: f64 = em.interior.iter().filter(|(x, y, _)| inside(*x) != inside(*y)).map(|e| e.2).sum::<f64>()
            + em.killing.iter().filter(|(x, _)| inside(*x)).map(|e| e.1).sum::<f64>();
        let p: f64 = (0..7).filter(|&x| inside(x)).map(|x| l.pi()[x]).sum();
        best = best.min(b / p);
    }
    let c = cheeger_constant(&l, CheegerStrategy::Exhaustive).unwrap();
    assert!((c.iota - best).abs() < 1e-12 * best.max(1.0));
}

#[test]
fn subtree_strategy_agrees_on_trees() {
    for seed in 0..30 {
        let n = 2 + (seed as usize % 15);
        let l = random_tree_generator(n, seed).unwrap();
        let a = cheeger_constant(&l, CheegerStrategy::Exhaustive).unwrap();
        let b = cheeger_constant(&l, CheegerStrategy::Subtree).unwrap();
        assert!((a.iota - b.iota).abs() <= 1e-10 * a.iota.max(1e-12), "seed {seed}: {} vs {}", a.iota, b.iota);
    }
    let dense = random_reversible_generator(6, 1.0, 3).unwrap();
    assert!(cheeger_constant(&dense, CheegerStrategy::Subtree).is_err());
}

#[test]
fn sandwich_on_random_generators() {
    for seed in 0..100u64 {
        let n = 2 + (seed as usize % 11);
        let l = random_reversible_generator(n, 0.35, 1000 + seed).unwrap();
        let s = cheeger_sandwich_check(&l, CheegerStrategy::Exhaustive).unwrap();
        assert!(s.pass, "seed {seed}: {s:?}");
        assert!(s.residual <= 1e-9);
    }
}

#[test]
fn l1_characterization() {
    let l = random_reversible_generator(10, 0.3, 21).unwrap();
    let rep = l1_characterization_check(&l, 10_000, 4).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert_eq!(rep.violations, 0);
    assert!(rep.min_ratio >= rep.iota - 1e-9);
}

#[test]
fn counterexample_family_exact() {
    for n in 1..=5usize {
        for eps in [r(1, 100), r(1, 7 * n as i64), counterexample_eps(n)] {
            let l = counterexample_generator(n, &eps).unwrap();
            assert!(l.pi().iter().all(|p| *p == r(1, 2 * n as i64)));
            let c = cheeger_constant(&l, CheegerStrategy::Exhaustive).unwrap();
            assert_eq!(c.iota, &eps * &ExactRational::from(n as u64), "n = {n}, eps = {eps}");
        }
        let c = cheeger_constant(&counterexample_generator(n, &counterexample_eps(n)).unwrap(), CheegerStrategy::Exhaustive).unwrap();
        assert_eq!(c.iota, r(1, 4));
    }
    assert!(counterexample_generator(2, &r(1, 4)).is_err());
    assert!(counterexample_generator(3, &r(1, 5)).is_err());
}

/// Spanning trees counted by testing every edge subset of the right size for acyclicity.
fn brute_tree_count<S: rado_walk::numerics::Scalar>(l: &SubMarkovGenerator<S>) -> u64 {
    let n = l.size();
    let mut edges = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            if *l.rate(x, y) > S::zero() {
                edges.push((x, y));
            }
        }
        if l.killing(x) > S::zero() {
            edges.push((x, n));
        }
    }
    let mut count = 0;
    for mask in 0u32..(1 << edges.len()) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let mut comp: Vec<usize> = (0..=n).collect();
        let mut ok = true;
        for (i, &(a, b)) in edges.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                let (ca, cb) = (comp[a], comp[b]);
                if ca == cb {
                    ok = false;
                    break;
                }
                for c in comp.iter_mut() {
                    if *c == cb {
                        *c = ca;
                    }
                }
            }
        }
        count += ok as u64;
    }
    count
}

#[test]
fn spanning_tree_counts() {
    for n in 1..=3 {
        let l = counterexample_generator(n, &counterexample_eps(n)).unwrap();
        let trees = enumerate_spanning_trees(&l).unwrap();
        assert_eq!(trees.len() as u64, brute_tree_count(&l));
        assert_eq!(matrix_tree_count(&l), brute_tree_count(&l));
    }
    let l = random_reversible_generator(6, 0.5, 2).unwrap();
    assert_eq!(matrix_tree_count(&l), brute_tree_count(&l));
}

#[test]
fn spanning_tree_bound_on_family() {
    let l = counterexample_generator(2, &r(1, 8)).unwrap();
    let rep = spanning_tree_iota_max(&l, SpanningMode::Exhaustive).unwrap();
    assert!(rep.exact);
    assert!(rep.upper_bound <= r(1, 8), "{}", rep.upper_bound);
    let l3 = counterexample_generator(3, &counterexample_eps(3)).unwrap();
    let rep3 = spanning_tree_iota_max(&l3, SpanningMode::Exhaustive).unwrap();
    assert!(rep3.upper_bound <= counterexample_eps(3));
    for n in 2..=6usize {
        let eps = counterexample_eps(n);
        let l = counterexample_generator(n, &eps).unwrap();
        let rep = spanning_tree_iota_max(&l, SpanningMode::Witness { samples: 300, seed: n as u64 }).unwrap();
        assert!(rep.leaf_witness_everywhere);
        let iota = cheeger_constant(&l, CheegerStrategy::Exhaustive).unwrap().iota;
        let ratio = &rep.upper_bound / &iota;
        assert!(ratio <= r(1, n as i64), "n = {n}: {ratio}");
    }
}

#[test]
fn tree_restriction_lowers_cheeger_constant() {
    for seed in 0..10 {
        let l = random_reversible_generator(7, 0.6, seed).unwrap();
        let full = cheeger_constant(&l, CheegerStrategy::Exhaustive).unwrap().iota;
        let trees = enumerate_spanning_trees(&l).unwrap();
        for t in trees.iter().step_by(1 + trees.len() / 40) {
            let lt = l.restrict_to_edges(t).unwrap();
            let sub = cheeger_constant(&lt, CheegerStrategy::Exhaustive).unwrap().iota;
            assert!(sub <= full + 1e-12, "seed {seed}");
        }
    }
}

#[test]
fn truncation_by_hand_at_cap_two() {
    let g = GraphOracle::binary();
    let w = WeightFamily::half();
    let l = truncate_chain_exact(&g, &w, 2, Truncation::Window).unwrap();
    // Q(N(0)) = 2/3, Q(N(1)) = 1 + 2/5, Q(N(2)) = 1/2 + 2/17
    let expect = [[r(-1, 1), r(3, 4), r(0, 1)], [r(5, 7), r(-1, 1), r(5, 28)], [r(0, 1), r(17, 21), r(-1, 1)]];
    for x in 0..3 {
        for y in 0..3 {
            assert_eq!(*l.rate(x, y), expect[x][y], "({x},{y})");
        }
    }
    let total = r(2, 3) + r(7, 10) + r(21, 136);
    assert_eq!(l.pi()[0], &r(2, 3) / &total);
    let f = truncate_chain(&g, &w, 2, Truncation::Window).unwrap();
    for x in 0..3 {
        for y in 0..3 {
            assert!((f.rate(x, y) - expect[x][y].to_f64()).abs() < 1e-15);
        }
    }
}

#[test]
fn truncated_chains_are_sub_markovian() {
    let g = GraphOracle::binary();
    let w = WeightFamily::half();
    let exact = truncate_chain_exact(&g, &w, 12, Truncation::Window).unwrap();
    assert!(!exact.is_markovian());
    // at delta = 1/2 the killing beyond cap 200 is ~2^-200, invisible in f64 row sums
    let slow = WeightFamily::geometric(r(9, 10)).unwrap();
    for kind in [Truncation::Window, Truncation::PinnedRoot] {
        let l = truncate_chain(&g, &slow, 200, kind).unwrap();
        assert!((0..l.size()).any(|x| l.killing(x) > 0.0));
        assert_eq!(l.ell(), 1.0);
    }
    assert!(truncate_chain(&g, &w, 1, Truncation::Window).is_err());
    let rg = GraphOracle::random(0.5, 4).unwrap();
    let l = truncate_chain(&rg, &w, 100, Truncation::PinnedRoot).unwrap();
    assert!(l.is_irreducible());
}

#[test]
fn pruned_tree_sandwich_at_cap_1024() {
    for (delta, w) in [(0.5, WeightFamily::half()), (0.9, WeightFamily::geometric(r(9, 10)).unwrap())] {
        let l = pruned_tree_generator(&w, 1 << 10).unwrap();
        let s = cheeger_sandwich_check(&l, CheegerStrategy::Subtree).unwrap();
        assert!(s.pass, "delta {delta}: {s:?}");
        // tree Cheeger constant of the pruned problem is at least 1 - delta
        assert!(s.iota >= 1.0 - delta - 1e-12, "delta {delta}: {s:?}");
    }
}

#[test]
fn subtree_matches_exhaustive_on_small_pruned_tree() {
    let w = WeightFamily::geometric(r(3, 5)).unwrap();
    let l = pruned_tree_generator(&w, 14).unwrap();
    let a = cheeger_constant(&l, CheegerStrategy::Exhaustive).unwrap();
    let b = cheeger_constant(&l, CheegerStrategy::Subtree).unwrap();
    assert!((a.iota - b.iota).abs() < 1e-10 * a.iota);
}

#[test]
fn rado_tree_cheeger() {
    let g = GraphOracle::binary();
    let w = WeightFamily::half();
    let rep = tree_cheeger_rado(&g, &w, 1 << 12).unwrap();
    assert!(rep.holds, "{rep:?}");
    assert_eq!(rep.x1, 0);
    assert!(rep.inf_lower >= r(1, 2));
    assert!(rep.inf_lower <= rep.upper_at_argmin);
}

/// `mu(T_a)` restricted to `x <= m`, by walking each vertex's path to the root.
fn subtree_mass_by_paths(a: u64, m: u64, delta: f64) -> f64 {
    let p = |x: u64| x.trailing_zeros() as u64;
    (1..=m)
        .filter(|&x| {
            let mut y = x;
            while y != 0 && y != a {
                y = p(y);
            }
            y == a
        })
        .map(|x| delta.powi((x + p(x)) as i32))
        .sum()
}

#[test]
fn rado_tree_brackets_contain_path_sums() {
    let g = GraphOracle::binary();
    let w = WeightFamily::geometric(r(3, 4)).unwrap();
    let rep = tree_cheeger_rado(&g, &w, 40).unwrap();
    assert!(rep.holds, "{rep:?}");
    // at the argmin, the truncated subtree mass equals the path-walk sum
    let a = rep.argmin;
    let p = a.trailing_zeros() as u64;
    let nu = 0.75f64.powi((a + p) as i32);
    let walk = subtree_mass_by_paths(a, rep.truncation, 0.75);
    assert!((nu / walk - rep.upper_at_argmin.to_f64()).abs() < 1e-12);
}

#[test]
fn random_model_tree_cheeger_past_threshold() {
    let w = WeightFamily::half();
    let g = GraphOracle::random(0.5, 12).unwrap();
    let rep = tree_cheeger_rado(&g, &w, 512).unwrap();
    assert!(rep.holds, "{rep:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sandwich_holds(seed in 0u64..10_000, n in 2usize..10, density in 0.0f64..1.0) {
        let l = random_reversible_generator(n, density, seed).unwrap();
        let s = cheeger_sandwich_check(&l, CheegerStrategy::Exhaustive).unwrap();
        prop_assert!(s.pass, "{:?}", s);
    }

    #[test]
    fn tree_generators_agree(seed in 0u64..10_000, n in 1usize..12) {
        let l = random_tree_generator(n, seed).unwrap();
        let a = cheeger_constant(&l, CheegerStrategy::Exhaustive).unwrap().iota;
        let b = cheeger_constant(&l, CheegerStrategy::Subtree).unwrap().iota;
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-12));
    }
}
