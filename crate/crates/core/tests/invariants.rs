//! Cross-module invariants: random instances through proptest, exhaustive
//! sweeps where the domain is small.

use std::sync::OnceLock;

use cwilf_core::asymptotics::{nonoverlap_construct, sandwich_check};
use cwilf_core::bigmath::factorial;
use cwilf_core::clusterengine::ClusterEngine;
use cwilf_core::clusterposet::{
    build_poset, count_linear_extensions, feasible_marks, nonoverlapping_poset, poset_dual, MarkSet,
};
use cwilf_core::equivalence::{
    check_ks_hypothesis, check_necessary, classify, profile, EquivalenceReport, Level,
};
use cwilf_core::gfseries::{cluster_gf, extract_a, pattern_gf};
use cwilf_core::oracle::enumerate_stats;
use cwilf_core::permcore::{is_nonoverlapping, overlap_set};
use cwilf_core::{BigUint, Permutation};
use proptest::prelude::*;

fn perm(m: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=m).collect::<Vec<usize>>()).prop_shuffle().prop_map(|w| Permutation::new(w).unwrap())
}

fn perm_in(lo: usize, hi: usize) -> impl Strategy<Value = Permutation> {
    (lo..=hi).prop_flat_map(perm)
}

fn subsets(slots: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << slots).map(move |bits| (1..=slots).filter(|i| bits >> (i - 1) & 1 == 1).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dual_has_the_same_count(pi in perm_in(3, 5), extra in 0usize..7) {
        let n = pi.len() + extra;
        for set in feasible_marks(&pi, n) {
            if let Ok(poset) = build_poset(&pi, &set) {
                prop_assert_eq!(
                    count_linear_extensions(&poset_dual(&poset)).unwrap(),
                    count_linear_extensions(&poset).unwrap()
                );
                prop_assert_eq!(build_poset(&pi.complement(), &set).unwrap(), poset.dual());
                if n <= 9 {
                    prop_assert_eq!(count_linear_extensions(&poset).unwrap(), BigUint::from(poset.brute_force_extensions()));
                }
            }
        }
    }

    #[test]
    fn r_equals_b_on_cluster_sets(pi in perm_in(3, 5), extra in 0usize..6) {
        let engine = ClusterEngine::new(&pi);
        let n = pi.len() + extra;
        for set in feasible_marks(&pi, n) {
            prop_assert_eq!(
                engine.refined_cluster_number(n, set.marks()).unwrap(),
                engine.b_count(n, set.marks()).unwrap()
            );
        }
    }

    #[test]
    fn exact_sets_partition_sn(pi in perm_in(2, 4), extra in 0usize..5) {
        let engine = ClusterEngine::new(&pi);
        let n = pi.len() + extra;
        let slots = n - pi.len() + 1;
        let mut by_k = vec![BigUint::from(0u32); slots + 1];
        for marks in subsets(slots) {
            by_k[marks.len()] += engine.a_refined(n, &marks).unwrap();
        }
        prop_assert_eq!(by_k.iter().sum::<BigUint>(), factorial(n));
        for (k, v) in by_k.iter().enumerate() {
            prop_assert_eq!(v, &engine.a_count(n, k).unwrap());
        }
    }

    #[test]
    fn two_mark_clusters_detect_overlaps(pi in perm_in(2, 6)) {
        let m = pi.len();
        let overlaps = overlap_set(&pi).unwrap();
        let engine = ClusterEngine::new(&pi);
        for i in 1..m {
            let r = engine.cluster_number(i + m, 2).unwrap();
            prop_assert_eq!(r != BigUint::from(0u32), overlaps.contains(i));
        }
    }

    #[test]
    fn series_rows_are_nonnegative_and_sum_to_factorial(pi in perm_in(2, 6)) {
        let series = pattern_gf(&pi, 11).unwrap();
        for n in 0..=11 {
            let total: BigUint = (0..=n).map(|k| extract_a(&series, n, k).unwrap()).sum();
            prop_assert_eq!(total, factorial(n));
        }
    }

    #[test]
    fn strong_profiles_match_series(pi in perm(4), tau in perm(4)) {
        let same_r = cluster_gf(&pi, 10).unwrap() == cluster_gf(&tau, 10).unwrap();
        let same_f = pattern_gf(&pi, 10).unwrap() == pattern_gf(&tau, 10).unwrap();
        let same_profile = profile(&pi, Level::Strong, 10).unwrap() == profile(&tau, Level::Strong, 10).unwrap();
        prop_assert_eq!(same_r, same_f);
        prop_assert_eq!(same_r, same_profile);
    }
}

#[test]
fn oracle_tables_match_engine() {
    for m in 2..=4 {
        for pi in Permutation::all(m) {
            let engine = ClusterEngine::new(&pi);
            for n in m..=8 {
                let stats = enumerate_stats(&pi, n).unwrap();
                for marks in subsets(n - m + 1) {
                    assert_eq!(
                        BigUint::from(stats.a(&marks)),
                        engine.a_refined(n, &marks).unwrap(),
                        "{pi} n={n} {marks:?}"
                    );
                }
            }
            let series = pattern_gf(&pi, 9).unwrap();
            let stats = enumerate_stats(&pi, 9).unwrap();
            assert_eq!(BigUint::from(stats.by_k[0]), extract_a(&series, 9, 0).unwrap());
        }
    }
}

#[test]
fn oracle_cluster_numbers_match_posets() {
    use cwilf_core::oracle::brute_r;
    for pi in Permutation::all(4) {
        let engine = ClusterEngine::new(&pi);
        for n in 4..=9 {
            for set in feasible_marks(&pi, n) {
                assert_eq!(
                    brute_r(&pi, n, set.marks()).unwrap(),
                    engine.refined_cluster_number(n, set.marks()).unwrap(),
                    "{pi} n={n} {:?}",
                    set.marks()
                );
            }
        }
    }
}

#[test]
fn nonoverlapping_counts_depend_on_end_letters_only() {
    for m in 4..=6 {
        let mut by_ends: std::collections::BTreeMap<(usize, usize), Vec<Permutation>> = Default::default();
        for pi in Permutation::all(m).filter(|q| is_nonoverlapping(q).unwrap()) {
            by_ends.entry((pi.first(), pi.last())).or_default().push(pi);
        }
        for ((a, b), pats) in by_ends {
            for k in 1..=3 {
                let set = MarkSet::chained(k, m);
                let counts: Vec<BigUint> = pats
                    .iter()
                    .map(|p| count_linear_extensions(&build_poset(p, &set).unwrap()).unwrap())
                    .collect();
                assert!(counts.windows(2).all(|w| w[0] == w[1]), "m={m} a={a} b={b} k={k}");
                if a < b && a + b <= m + 1 {
                    assert_eq!(counts[0], count_linear_extensions(&nonoverlapping_poset(m, a, b, k).unwrap()).unwrap());
                }
            }
        }
    }
}

#[test]
fn sandwich_holds_up_to_length_nine() {
    for m in 3..=9 {
        for a in 1..m {
            for b in a + 1..=m {
                if a + b <= m + 1 {
                    sandwich_check(m, a, b, 12).unwrap();
                }
            }
        }
    }
    // two realizations of the same ends agree
    let x = nonoverlap_construct(7, 2, 4).unwrap();
    let y: Permutation = "2561374".parse().unwrap();
    assert!(is_nonoverlapping(&y).unwrap() && x != y);
    for k in 1..=4 {
        let set = MarkSet::chained(k, 7);
        assert_eq!(
            count_linear_extensions(&build_poset(&x, &set).unwrap()).unwrap(),
            count_linear_extensions(&build_poset(&y, &set).unwrap()).unwrap()
        );
    }
}

fn reports(m: usize) -> &'static [EquivalenceReport; 3] {
    static R4: OnceLock<[EquivalenceReport; 3]> = OnceLock::new();
    static R5: OnceLock<[EquivalenceReport; 3]> = OnceLock::new();
    let cell = if m == 4 { &R4 } else { &R5 };
    cell.get_or_init(|| Level::ALL.map(|l| classify(m, l, 13).unwrap()))
}

fn refines(fine: &EquivalenceReport, coarse: &EquivalenceReport) -> bool {
    fine.classes.iter().all(|c| {
        let target = coarse.class_of(&c.members[0]);
        c.members.iter().all(|p| coarse.class_of(p) == target)
    })
}

#[test]
fn levels_refine_each_other() {
    for m in [4, 5] {
        let [cwilf, strong, sup] = reports(m);
        assert!(refines(sup, strong) && refines(strong, cwilf), "m={m}");
    }
}

#[test]
fn classes_are_closed_under_their_symmetries() {
    for m in [4, 5] {
        let [cwilf, strong, sup] = reports(m);
        for report in [cwilf, strong] {
            for c in &report.classes {
                for p in &c.members {
                    for img in [p.reverse(), p.complement(), p.reverse_complement()] {
                        assert!(c.members.contains(&img), "{} class of {p} misses {img}", report.level);
                    }
                }
            }
        }
        for c in &sup.classes {
            for p in &c.members {
                assert!(c.members.contains(&p.complement()));
            }
        }
    }
}

#[test]
fn sufficient_conditions_land_in_one_class() {
    for m in [4, 5] {
        let [_, strong, sup] = reports(m);
        let all: Vec<Permutation> = Permutation::all(m).collect();
        for p in &all {
            if is_nonoverlapping(p).unwrap() {
                assert_eq!(sup.class_of(p), sup.class_of(&p.reverse()), "{p}");
            }
            for q in &all {
                if check_ks_hypothesis(p, q) {
                    assert_eq!(sup.class_of(p), sup.class_of(q), "{p} {q}");
                }
                if check_necessary(p, q).unwrap().certified_inequivalent() {
                    assert_ne!(strong.class_of(p), strong.class_of(q), "{p} {q}");
                }
            }
        }
    }
}
