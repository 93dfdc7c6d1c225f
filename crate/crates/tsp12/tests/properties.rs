use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use tsp12::gen;
use tsp12::instance::tour_cost;
use tsp12::lp::separation::{cut_value, exhaustive_min, separate, Values};
use tsp12::lp::{solve_ser, solve_ser_plus};
use tsp12::matching::{run_algorithm1_on, unit_matching};
use tsp12::rational::{self, frac, int, Rational};
use tsp12::tour::complete_to_tour;
use tsp12::verify::{exact_opt, min_components, unit_hamiltonian_cycle, wolsey_check};
use tsp12::{Instance, Kind, Tour};

fn kind_of(asym: bool) -> Kind {
    if asym {
        Kind::Asymmetric
    } else {
        Kind::Symmetric
    }
}

fn instance(asym: bool, n: usize, p: f64, seed: u64) -> Instance {
    gen::random_instance(kind_of(asym), n, p, &mut gen::rng(seed))
}

/// Random 2-factor: a permutation cut into cycles of length at least
/// `min_len`, returned as successor pairs.
fn two_factor(n: usize, min_len: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let rest = n - start;
        let len = if rest < 2 * min_len { rest } else { rng.gen_range(min_len..=rest - min_len) };
        let cyc = &perm[start..start + len];
        for i in 0..len {
            out.push((cyc[i], cyc[(i + 1) % len]));
        }
        start += len;
    }
    out
}

/// Convex combination of random 2-factors; satisfies the degree equations.
fn degree_feasible(kind: Kind, n: usize, parts: usize, seed: u64) -> Values {
    let mut rng = gen::rng(seed);
    let min_len = if kind == Kind::Symmetric { 3 } else { 2 };
    let mut x = Values::new();
    let w = frac(1, parts as i64);
    for _ in 0..parts {
        for (u, v) in two_factor(n, min_len, &mut rng) {
            *x.entry(kind.key(u, v)).or_insert_with(|| int(0)) += w.clone();
        }
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instance_text_round_trip(asym: bool, n in 3usize..14, p in 0.0f64..1.0, seed: u64) {
        let inst = instance(asym, n, p, seed);
        prop_assert_eq!(Instance::parse(&inst.to_text()).unwrap(), inst);
    }

    #[test]
    fn rational_text_round_trip(num in -10_000i64..10_000, den in 1i64..10_000) {
        let q = frac(num, den);
        prop_assert_eq!(rational::parse(&rational::to_frac_string(&q)), Some(q));
    }

    #[test]
    fn tour_cost_ignores_rotation(asym: bool, n in 3usize..14, p in 0.0f64..1.0, seed: u64, shift in 0usize..14) {
        let inst = instance(asym, n, p, seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut gen::rng(seed ^ 1));
        let base = tour_cost(&inst, &Tour::new(order.clone()).unwrap()).unwrap();
        order.rotate_left(shift % n);
        prop_assert_eq!(tour_cost(&inst, &Tour::new(order.clone()).unwrap()).unwrap(), base);
        if !asym {
            order.reverse();
            prop_assert_eq!(tour_cost(&inst, &Tour::new(order).unwrap()).unwrap(), base);
        }
        prop_assert!(base >= n as u64 && base <= 2 * n as u64);
    }

    #[test]
    fn separation_agrees_with_enumeration(asym: bool, n in 4usize..=10, parts in 1usize..4, seed: u64) {
        let kind = kind_of(asym);
        let x = degree_feasible(kind, n, parts, seed);
        let (min, _) = exhaustive_min(kind, n, &x);
        let need = if asym { int(1) } else { int(2) };
        match separate(kind, n, &x).unwrap() {
            Some(set) => {
                prop_assert!(min < need);
                prop_assert!(cut_value(kind, &x, &set, n) < need);
            }
            None => prop_assert!(min >= need),
        }
    }

    #[test]
    fn oracle_identities(asym: bool, n in 3usize..=9, p in 0.0f64..0.5, seed: u64) {
        let inst = instance(asym, n, p, seed);
        let opt = exact_opt(&inst).unwrap();
        let k = min_components(&inst).unwrap();
        if k >= 2 {
            prop_assert_eq!(opt, (n + k) as u64);
        }
        prop_assert_eq!(opt == n as u64, unit_hamiltonian_cycle(&inst).unwrap());
        prop_assert!(opt <= n as u64 + k as u64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ser_is_feasible_and_below_opt(asym: bool, n in 3usize..=9, p in 0.0f64..0.6, seed: u64) {
        let inst = instance(asym, n, p, seed);
        let x = solve_ser(&inst).unwrap();
        let plus = solve_ser_plus(&inst, &x).unwrap();
        prop_assert!(x.is_feasible().unwrap());
        prop_assert!(plus.objective >= x.objective);
        prop_assert_eq!(plus.objective.clone(), Rational::from_integer(rational::ceil(&x.objective)));
        prop_assert!(plus.objective <= int(exact_opt(&inst).unwrap() as i64));
    }

    #[test]
    fn wolsey_holds_on_connected_sets(n in 4usize..=9, p in 0.1f64..0.7, seed: u64) {
        let inst = instance(false, n, p, seed);
        let x = solve_ser(&inst).unwrap();
        let sup = x.support();
        let mut rng = gen::rng(seed ^ 7);
        for _ in 0..20 {
            // Random BFS growth inside the support.
            let target = rng.gen_range(1..n);
            let mut set = vec![rng.gen_range(0..n)];
            let mut frontier = set.clone();
            while set.len() < target && !frontier.is_empty() {
                let i = rng.gen_range(0..frontier.len());
                let v = frontier.swap_remove(i);
                for &w in &sup.nbrs[v] {
                    if set.len() < target && !set.contains(&w) {
                        set.push(w);
                        frontier.push(w);
                    }
                }
            }
            prop_assert!(wolsey_check(&x, &set).unwrap());
        }
    }

    #[test]
    fn algorithm_fixpoints(n in 4usize..=10, p in 0.1f64..0.6, seed: u64) {
        let inst = instance(false, n, p, seed);
        let x = solve_ser_plus(&inst, &solve_ser(&inst).unwrap()).unwrap();
        let run = run_algorithm1_on(&x).unwrap();
        let mut prev = unit_matching(&x).unwrap().potential();
        for s in &run.steps {
            prop_assert!(s.potential < prev);
            prev = s.potential;
        }
        prop_assert!(run.steps.len() <= 5 * n * n);
        prop_assert!(run.matching.within(&x.support()));
        let c = run.matching.components().len();
        let tour = complete_to_tour(&run.matching, &inst).unwrap();
        let cost = tour_cost(&inst, &tour).unwrap();
        if c >= 2 {
            prop_assert!(cost <= (n + c) as u64);
        }
        prop_assert!(cost >= exact_opt(&inst).unwrap());
    }
}
