use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rado_walk::hardy::*;
use rado_walk::measure::WeightFamily;
use rado_walk::numerics::ExactRational;

fn r(n: i64, d: i64) -> ExactRational {
    ExactRational::ratio(n, d)
}

fn path(len: usize, mu: f64, nu: f64) -> MeasuredTree<f64> {
    let parent = (0..=len).map(|x| x.checked_sub(1)).collect();
    let mut m = vec![mu; len + 1];
    let mut n = vec![nu; len + 1];
    m[0] = 0.0;
    n[0] = 0.0;
    MeasuredTree::new(parent, m, n).unwrap()
}

fn random_exact_tree(n: usize, seed: u64) -> MeasuredTree<ExactRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parent = vec![None];
    let mut mu = vec![r(0, 1)];
    let mut nu = vec![r(0, 1)];
    for x in 1..=n {
        // bias toward recent vertices for some depth
        let lo = x.saturating_sub(4);
        parent.push(Some(rng.random_range(lo..x)));
        mu.push(r(rng.random_range(1..20), rng.random_range(1..20)));
        nu.push(r(rng.random_range(1..20), rng.random_range(1..20)));
    }
    MeasuredTree::new(parent, mu, nu).unwrap()
}

#[test]
fn tree_validation() {
    assert!(MeasuredTree::new(vec![None], vec![0.0], vec![0.0]).is_err());
    assert!(MeasuredTree::new(vec![None, Some(1)], vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
    assert!(MeasuredTree::new(vec![None, Some(0)], vec![0.0, 0.0], vec![0.0, 1.0]).is_err());
    assert!(MeasuredTree::new(vec![Some(0), Some(0)], vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
    let t = path(2, 1.0, 1.0);
    assert!(AdmissibleSubtree::new(&t, &[0, 1]).is_err());
    assert!(AdmissibleSubtree::new(&t, &[]).is_err());
    // 1 has children 2 and 3; keeping only one of them is not allowed
    let star = MeasuredTree::new(vec![None, Some(0), Some(1), Some(1)], vec![0.0, 1.0, 1.0, 1.0], vec![0.0, 1.0, 1.0, 1.0]).unwrap();
    assert!(AdmissibleSubtree::new(&star, &[1, 2]).is_err());
    assert!(AdmissibleSubtree::new(&star, &[2, 3]).is_err());
    assert!(AdmissibleSubtree::new(&star, &[1, 2, 3]).is_ok());
}

#[test]
fn three_vertex_path() {
    let t = path(2, 1.0, 1.0);
    let all = admissible_subtrees(&t, 1, 100).unwrap();
    assert_eq!(all.len(), 2);
    let single = AdmissibleSubtree::new(&t, &[1]).unwrap();
    let both = AdmissibleSubtree::new(&t, &[1, 2]).unwrap();
    assert_eq!(t_star(&t, &single), vec![1, 2]);
    assert_eq!(t_star(&t, &both), vec![2]);
    assert_eq!(nu_functional(&t, &single), 1.0);
    assert_eq!(nu_functional(&t, &both), 0.5);
    let b = hardy_b(&t, TopScope::RootChildren, 100).unwrap();
    assert_eq!(b.value, 2.0);
    let c = hardy_c(&t).unwrap();
    assert!((c.c - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    assert!(c.residual < 1e-12);
}

#[test]
fn single_edge() {
    let t = path(1, 1.0, 1.0);
    assert!((hardy_c(&t).unwrap().c - 1.0).abs() < 1e-15);
    let t = path(1, 3.0, 0.5);
    assert_eq!(hardy_b(&t, TopScope::RootChildren, 10).unwrap().value, 6.0);
    assert!((hardy_c(&t).unwrap().c - 6.0).abs() < 1e-12);
}

#[test]
fn star_unfolds_once() {
    let nu = [r(0, 1), r(2, 1), r(1, 3), r(1, 5), r(3, 7)];
    let mu = vec![r(0, 1), r(1, 1), r(1, 1), r(1, 1), r(1, 1)];
    let t = MeasuredTree::new(vec![None, Some(0), Some(1), Some(1), Some(1)], mu, nu.to_vec()).unwrap();
    let full = AdmissibleSubtree::new(&t, &[1, 2, 3, 4]).unwrap();
    let sum = &(&nu[2] + &nu[3]) + &nu[4];
    let expect = (nu[1].recip().unwrap() + sum.recip().unwrap()).recip().unwrap();
    assert_eq!(nu_functional(&t, &full), expect);
    assert_eq!(t_star(&t, &full), vec![2, 3, 4]);
    let top = AdmissibleSubtree::new(&t, &[1]).unwrap();
    assert_eq!(t_star(&t, &top), vec![1, 2, 3, 4]);
    let leaf = AdmissibleSubtree::new(&t, &[3]).unwrap();
    assert_eq!(t_star(&t, &leaf), vec![3]);
}

/// Conductance from the parent of the top to the grounded leaves, by solving
/// Kirchhoff's equations exactly.
fn kirchhoff(t: &MeasuredTree<ExactRational>, s: &AdmissibleSubtree) -> ExactRational {
    let inner: Vec<usize> = s.members().iter().copied().filter(|x| !s.leaves().contains(x)).collect();
    if inner.is_empty() {
        return t.nu(s.top()).clone();
    }
    let idx = |x: usize| inner.iter().position(|&y| y == x);
    let k = inner.len();
    let mut a = vec![vec![r(0, 1); k + 1]; k];
    for (i, &x) in inner.iter().enumerate() {
        let mut diag = t.nu(x).clone();
        match idx(t.parent(x).unwrap()) {
            Some(j) => a[i][j] = &a[i][j] - t.nu(x),
            None => a[i][k] = t.nu(x).clone(), // parent of the top sits at potential 1
        }
        for &c in t.children(x) {
            diag = &diag + t.nu(c);
            if let Some(j) = idx(c) {
                a[i][j] = &a[i][j] - t.nu(c);
            }
        }
        a[i][i] = &a[i][i] + &diag;
    }
    for col in 0..k {
        let piv = (col..k).find(|&row| !a[row][col].is_zero()).unwrap();
        a.swap(col, piv);
        for row in 0..k {
            if row != col && !a[row][col].is_zero() {
                let f = &a[row][col] / &a[col][col];
                for j in col..=k {
                    let v = &f * &a[col][j];
                    a[row][j] = &a[row][j] - &v;
                }
            }
        }
    }
    let top = idx(s.top()).unwrap();
    let v_top = &a[top][k] / &a[top][top];
    t.nu(s.top()) * &(ExactRational::one() - v_top)
}

#[test]
fn nu_recursion_matches_kirchhoff() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..20 {
        let t = random_exact_tree(15, seed);
        for _ in 0..10 {
            let top = rng.random_range(1..t.size());
            let s = random_admissible(&t, top, 0.7, &mut rng).unwrap();
            assert_eq!(nu_functional(&t, &s), kirchhoff(&t, &s), "seed {seed}, {s:?}");
        }
    }
}

#[test]
fn t_star_by_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for seed in 0..20 {
        let t = random_measured_tree(25, 3.0, seed).unwrap();
        for _ in 0..10 {
            let top = rng.random_range(1..t.size());
            let s = random_admissible(&t, top, 0.6, &mut rng).unwrap();
            // descendants of the top, minus members, plus leaves
            let below_top: Vec<usize> = (1..t.size())
                .filter(|&y| {
                    let mut z = Some(y);
                    while let Some(v) = z {
                        if v == top {
                            return true;
                        }
                        z = t.parent(v);
                    }
                    false
                })
                .collect();
            let expect: Vec<usize> = below_top.into_iter().filter(|y| !s.contains(*y) || s.leaves().contains(y)).collect();
            assert_eq!(t_star(&t, &s), expect);
        }
    }
}

fn brute_b(t: &MeasuredTree<f64>, scope: TopScope) -> f64 {
    (1..t.size())
        .filter(|&m| scope == TopScope::All || t.parent(m) == Some(0))
        .flat_map(|m| admissible_subtrees(t, m, 1 << 20).unwrap())
        .map(|s| t.mu_of(&t_star(t, &s)) / nu_functional(t, &s))
        .fold(0.0, f64::max)
}

#[test]
fn pruned_search_matches_enumeration() {
    for seed in 0..40 {
        let t = random_measured_tree(14, 3.0, seed).unwrap();
        let all = hardy_b(&t, TopScope::All, DEFAULT_ENUMERATION_CAP).unwrap();
        let slow_all = brute_b(&t, TopScope::All);
        assert!((all.value - slow_all).abs() <= 1e-12 * slow_all, "seed {seed}: {} vs {slow_all}", all.value);
        let fast = hardy_b(&t, TopScope::RootChildren, DEFAULT_ENUMERATION_CAP).unwrap();
        let slow = brute_b(&t, TopScope::RootChildren);
        assert!((fast.value - slow).abs() <= 1e-12 * slow, "seed {seed}: {} vs {slow}", fast.value);
        assert!(fast.value <= all.value);
        // the reported witness attains the value
        let members: Vec<usize> = fast.leaves.iter().flat_map(|&l| {
            let mut path = vec![];
            let mut z = l;
            while z != fast.top {
                path.push(z);
                z = t.parent(z).unwrap();
            }
            path.push(fast.top);
            path
        }).collect();
        let mut members = members;
        members.sort_unstable();
        members.dedup();
        let mut closed = members.clone();
        for &x in &members {
            if t.children(x).iter().any(|c| members.contains(c)) {
                closed.extend_from_slice(t.children(x));
            }
        }
        let s = AdmissibleSubtree::new(&t, &closed).unwrap();
        let ratio = t.mu_of(&t_star(&t, &s)) / nu_functional(&t, &s);
        assert!((ratio - fast.value).abs() <= 1e-12 * ratio);
    }
}

#[test]
fn enumeration_cap_reports_floor() {
    let t = random_measured_tree(28, 1.0, 5).unwrap();
    match hardy_b(&t, TopScope::RootChildren, 3) {
        Err(rado_walk::Error::EnumerationCap { cap, partial_lower_bound }) => {
            assert_eq!(cap, 3);
            assert!(partial_lower_bound > 0.0);
            assert!(partial_lower_bound <= hardy_b(&t, TopScope::RootChildren, DEFAULT_ENUMERATION_CAP).unwrap().value);
        }
        other => panic!("expected cap error, got {other:?}"),
    }
}

/// Number of eigenvalues below `s` of the pencil (A, M) via LDL^T of A - sM.
fn pencil_count_below(t: &MeasuredTree<f64>, s: f64) -> usize {
    let n = t.size() - 1;
    let mut a = vec![vec![0.0; n]; n];
    for x in 1..t.size() {
        let i = x - 1;
        a[i][i] += t.nu(x) - s * t.mu(x);
        let p = t.parent(x).unwrap();
        if p > 0 {
            let j = p - 1;
            a[j][j] += t.nu(x);
            a[i][j] -= t.nu(x);
            a[j][i] -= t.nu(x);
        }
    }
    let mut neg = 0;
    for k in 0..n {
        let p = if a[k][k] == 0.0 { -1e-300 } else { a[k][k] };
        neg += usize::from(p < 0.0);
        for i in (k + 1)..n {
            let f = a[i][k] / p;
            if f != 0.0 {
                for j in (k + 1)..n {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
    }
    neg
}

#[test]
fn best_constant_matches_pencil_bisection() {
    for seed in 0..15 {
        let t = random_measured_tree(20, 1.0, 100 + seed).unwrap();
        let c = hardy_c(&t).unwrap();
        let (mut lo, mut hi) = (0.0, 1e6);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if pencil_count_below(&t, mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let oracle = 2.0 / (lo + hi);
        assert!((c.c - oracle).abs() <= 1e-9 * oracle, "seed {seed}: {} vs {oracle}", c.c);
    }
}

#[test]
fn best_constant_dominates_random_functions() {
    let t = random_measured_tree(30, 3.0, 42).unwrap();
    let c = hardy_c(&t).unwrap();
    assert!((hardy_ratio(&t, &c.maximizer) - c.c).abs() <= 1e-9 * c.c);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let mut f: Vec<f64> = (0..t.size()).map(|_| rng.random_range(-1.0..1.0)).collect();
        f[0] = 0.0;
        assert!(hardy_ratio(&t, &f) <= c.c * (1.0 + 1e-9));
    }
}

#[test]
fn homogeneity() {
    for seed in 0..10 {
        let t = random_measured_tree(20, 2.0, seed).unwrap();
        let b = hardy_b(&t, TopScope::RootChildren, DEFAULT_ENUMERATION_CAP).unwrap();
        let c = hardy_c(&t).unwrap().c;
        for f in [0.5, 2.0] {
            let tm = t.scale(&f, &1.0);
            assert!((hardy_c(&tm).unwrap().c - f * c).abs() <= 1e-9 * f * c);
            let tn = t.scale(&1.0, &f);
            let bn = hardy_b(&tn, TopScope::RootChildren, DEFAULT_ENUMERATION_CAP).unwrap();
            assert!((bn.value * f - b.value).abs() <= 1e-12 * b.value);
            assert_eq!((bn.top, &bn.leaves), (b.top, &b.leaves));
            let s = random_admissible(&t, t.children(0)[0], 0.5, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert!((nu_functional(&tn, &s) - f * nu_functional(&t, &s)).abs() <= 1e-12 * nu_functional(&tn, &s));
        }
    }
}

#[test]
fn sandwich_with_every_top() {
    for seed in 0..100u64 {
        let n = 1 + (seed as usize * 7) % 29;
        let t = random_measured_tree(n, 3.0, 5000 + seed).unwrap();
        let s = hardy_sandwich(&t).unwrap();
        assert!(s.pass_all_tops, "seed {seed}: {s:?}");
        assert!(s.b <= s.c * (1.0 + SANDWICH_TOLERANCE));
        assert!(s.residual <= 1e-9);
    }
}

#[test]
fn root_child_tops_miss_a_weak_inner_edge() {
    // 0 - 1, with 1 holding a heavy child behind a weak edge and a light child
    // behind a strong one. The weak edge alone makes c about 10^6, while every
    // subtree topped at 1 keeps the strong edge in parallel.
    let t = MeasuredTree::new(
        vec![None, Some(0), Some(1), Some(1)],
        vec![0.0, 1e-3, 1e3, 1e-3],
        vec![0.0, 1.0, 1e-3, 1e3],
    )
    .unwrap();
    let s = hardy_sandwich(&t).unwrap();
    assert!(s.c >= 1e6);
    assert!(s.b < 1.1e3);
    assert!(!s.pass);
    assert!(s.pass_all_tops);
    let b = hardy_b(&t, TopScope::All, 100).unwrap();
    assert_eq!((b.top, b.leaves.as_slice()), (2, &[2][..]));
}

#[test]
fn truncation_basics() {
    let t = random_measured_tree(25, 2.0, 9).unwrap();
    let all: Vec<usize> = (0..t.size()).collect();
    let (same, labels) = truncated_measures(&t, &all).unwrap();
    assert_eq!(labels, all);
    for x in 1..t.size() {
        assert_eq!(same.mu(x), t.mu(x));
    }
    let chain = random_prefix_chain(&t, 5, 2);
    let total = t.mu_of(&all[1..]);
    for p in &chain {
        let (small, _) = truncated_measures(&t, p).unwrap();
        let rest: Vec<usize> = (1..small.size()).collect();
        assert!((small.mu_of(&rest) - total).abs() <= 1e-12 * total);
    }
    assert!(truncated_measures(&t, &[0]).is_err() || t.children(0).is_empty());
    let disconnected: Vec<usize> = std::iter::once(0).chain(t.children(0).iter().copied()).chain([t.size() - 1]).collect();
    if !disconnected.iter().any(|&x| x == t.parent(t.size() - 1).unwrap()) {
        assert!(truncated_measures(&t, &disconnected).is_err());
    }
}

#[test]
fn convergence_along_prefix_chains() {
    let mut pairs = 0;
    for seed in 0..20 {
        let t = random_measured_tree(30, 3.0, 700 + seed).unwrap();
        let chain = random_prefix_chain(&t, 5, seed);
        let rep = convergence_check(&t, &chain, 50, seed).unwrap();
        assert!(rep.c_nondecreasing && rep.terminal_match, "seed {seed}: {rep:?}");
        assert_eq!(rep.mu_violations, 0, "seed {seed}");
        pairs += rep.comparison_pairs;
    }
    assert_eq!(pairs, 1000);
}

#[test]
fn completion_can_raise_nu() {
    // 1 has children 2 and 3; the prefix keeps only 2
    let t = MeasuredTree::new(vec![None, Some(0), Some(1), Some(1)], vec![0.0, 1.0, 1.0, 1.0], vec![0.0, 1.0, 1.0, 1.0]).unwrap();
    let (small, labels) = truncated_measures(&t, &[0, 1, 2]).unwrap();
    assert_eq!(small.mu(1), &2.0);
    let s = AdmissibleSubtree::new(&small, &[1, 2]).unwrap();
    let full = completion(&t, &labels, &small, &s).unwrap();
    assert_eq!(full.members(), &[1, 2, 3]);
    assert_eq!(nu_functional(&small, &s), 0.5);
    assert!((nu_functional(&t, &full) - 2.0 / 3.0).abs() < 1e-15);
    // the mass comparison still goes the stated way
    assert!(small.mu_of(&t_star(&small, &s)) <= t.mu_of(&t_star(&t, &full)));
}

#[test]
fn prefix_b_can_exceed_full_b() {
    // found by scanning seeds; b of a truncation is not monotone in the prefix
    let mut found = false;
    for seed in 0..300u64 {
        let t = random_measured_tree(1 + (seed as usize * 7) % 29, 3.0, seed).unwrap();
        let b = hardy_b(&t, TopScope::All, DEFAULT_ENUMERATION_CAP).unwrap().value;
        for p in random_prefix_chain(&t, 5, seed) {
            let (small, _) = truncated_measures(&t, &p).unwrap();
            found |= hardy_b(&small, TopScope::All, DEFAULT_ENUMERATION_CAP).unwrap().value > b * 1.01;
        }
        if found {
            break;
        }
    }
    assert!(found);
}

#[test]
fn path_series_at_half() {
    let c = path_series(0.5).unwrap();
    let hand = 0.25 + 0.125 + 2f64.powi(-14);
    assert!((c.value - hand).abs() < 1e-12);
    assert!(c.tail_bound < 1e-60);
    assert!(c.value <= 2.0);
    assert_eq!(c.closed_form_bound, 2.0);
    let c9 = path_series(0.9).unwrap();
    let hand9 = 0.81 + 0.729 + 0.9f64.powi(14) + 0.9f64.powi(253);
    assert!((c9.value - hand9).abs() < 1e-12);
    assert!(c9.value <= c9.closed_form_bound);
    for d in [0.1, 0.3, 0.6, 0.7071, 0.75, 0.95, 0.99, 0.999] {
        let c = path_series(d).unwrap();
        assert!(c.value + c.tail_bound <= c.closed_form_bound, "delta {d}");
    }
    assert!(path_series(1.0).is_err());
    assert!(path_series(0.0).is_err());
}

#[test]
fn path_sums_stay_below_series() {
    assert_eq!(path_sum(0.5, &[0, 1]).unwrap(), 0.25);
    assert!(path_sum(0.5, &[0, 2]).is_err());
    assert!(path_sum(0.5, &[1, 2]).is_err());
    assert!(path_sum(0.5, &[0, 3, 8]).is_ok());
    assert!(path_sum(0.5, &[0, 3, 16]).is_err());
    let greedy = smallest_child_chain();
    assert_eq!(greedy, vec![0, 1, 2, 4, 16, 65536]);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for delta in [0.3, 0.5, 0.7, std::f64::consts::FRAC_1_SQRT_2, 0.9] {
        let c = path_series(delta).unwrap();
        let g = path_sum(delta, &greedy).unwrap();
        assert!(g <= c.value, "delta {delta}");
        // the first three series terms are exactly the greedy chain's
        let head: f64 = [2.0, 3.0, 14.0].iter().map(|e| delta.powf(*e)).sum();
        assert!((g - head).abs() < 1e-12 + delta.powi(253));
        for _ in 0..1000 {
            let z = random_parent_chain(&mut rng, 6);
            assert!(path_sum(delta, &z).unwrap() <= c.value + c.tail_bound);
        }
    }
}

#[test]
fn gap_bound_values() {
    let g = gap_bounds(0.5).unwrap();
    assert_eq!(g.cheeger, 0.125);
    assert_eq!(g.hardy, 0.5 / 32.0);
    assert!(g.cheeger > g.hardy);
    let g = gap_bounds(0.99).unwrap();
    assert!(g.hardy > g.cheeger);
    assert!((g.hardy - 0.01 / 48.0).abs() < 1e-15);
    let g = gap_bounds(0.9).unwrap();
    assert!(g.hardy_chained < g.hardy);
}

#[test]
fn rado_tree_brackets() {
    for delta in [0.3, 0.5, 0.7, 0.9] {
        let br = rado_hardy_bracket(delta, 3, 16).unwrap();
        assert!(br.lower <= br.upper, "{br:?}");
        assert!(br.witness_top % 2 == 1);
        let w = WeightFamily::geometric(ExactRational::from_f64(delta).unwrap()).unwrap();
        let rt = rado_measured_tree(&w, 3, 16).unwrap();
        // singletons under the root stay below 1/(1 - delta)
        let masses = rt.tree.subtree_masses();
        for &m in rt.tree.children(0) {
            assert!(masses[m] / rt.tree.nu(m) <= 1.0 / (1.0 - delta) + 1e-12);
        }
        assert_eq!(rt.labels[1], 1);
        assert_eq!(rt.labels[rt.tree.children(1)[0]], 2);
    }
    assert!(rado_hardy_bracket(0.5, 6, 16).is_err());
    assert!(rado_hardy_bracket(0.5, 3, 65).is_err());
    // polynomial weights build a tree for the b and c experiments
    let t = rado_measured_tree(&WeightFamily::polynomial(3.0).unwrap(), 2, 8).unwrap();
    assert!(hardy_sandwich(&t.tree).unwrap().pass_all_tops);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sandwich_holds(seed in 0u64..100_000, n in 1usize..30) {
        let t = random_measured_tree(n, 3.0, seed).unwrap();
        let s = hardy_sandwich(&t).unwrap();
        prop_assert!(s.pass_all_tops, "{:?}", s);
    }

    #[test]
    fn nested_prefixes_raise_c(seed in 0u64..100_000) {
        let t = random_measured_tree(20, 2.0, seed).unwrap();
        let chain = random_prefix_chain(&t, 4, seed);
        let cs: Vec<f64> = chain.iter().map(|p| hardy_c(&truncated_measures(&t, p).unwrap().0).unwrap().c).collect();
        for w in cs.windows(2) {
            prop_assert!(w[1] >= w[0] * (1.0 - 1e-9));
        }
    }
}
