//! Regression suite over the published worked examples. Each check prints
//! one PASS/FAIL line; the slow tier adds brute-force confirmations over
//! `S_12`.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use clap::ValueEnum;
use cwilf_core::asymptotics::{nonoverlap_construct, recover_difference, sandwich_check};
use cwilf_core::bigmath::factorial;
use cwilf_core::clusterengine::{a_refined, b_count, cluster_number, refined_cluster_number};
use cwilf_core::clusterposet::{
    build_poset, count_linear_extensions, feasible_marks, nonoverlapping_poset, poset_isomorphic, MarkSet,
};
use cwilf_core::equivalence::{
    check_ks_hypothesis, check_maxmin_hypothesis, check_necessary, classify, probe_pair, profile, Level,
};
use cwilf_core::gfseries::{cluster_gf, extract_a, pattern_gf};
use cwilf_core::oracle::Oracle;
use cwilf_core::permcore::{is_nonoverlapping, occurrences, overlap_set, standardize};
use cwilf_core::{BigInt, BigUint, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Tier {
    Fast,
    Slow,
}

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn p(s: &str) -> Permutation {
    s.parse().expect("literal permutation")
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn marks(pi: &Permutation, n: usize, s: &[usize]) -> MarkSet {
    MarkSet::new(n, pi.len(), s.to_vec(), &overlap_set(pi).unwrap()).unwrap()
}

fn words() -> Outcome {
    ensure!(standardize(&[8, 1, 5, 6, 7]).unwrap() == p("51234"), "st(81567)");
    ensure!(occurrences(&p("231"), &p("245361")).positions == [2, 4], "Em(231, 245361)");
    ensure!(p("513624").inverse() == p("253614"), "inverse of 513624");
    ensure!(p("1423").reverse() == p("3241"), "reverse of 1423");
    Ok("st(81567)=51234, Em(231,245361)={2,4}, 513624^-1=253614, 1423^R=3241".into())
}

fn overlaps() -> Outcome {
    ensure!(overlap_set(&p("2143")).unwrap().indices() == [2, 3], "O(2143)");
    ensure!(overlap_set(&p("16358472")).unwrap().indices() == [7], "O(16358472)");
    ensure!(is_nonoverlapping(&p("16358472")).unwrap(), "16358472 non-overlapping");
    ensure!(!is_nonoverlapping(&p("2143")).unwrap(), "2143 overlapping");
    let pi = p("16358472");
    for k in 1..=3 {
        let sets = feasible_marks(&pi, 1 + 7 * k);
        ensure!(sets == [MarkSet::chained(k, 8)], "k={k}: cluster sets {sets:?}");
    }
    Ok("O(2143)={2,3}, O(16358472)={7}; only chained marks fit 1+7k letters".into())
}

fn posets() -> Outcome {
    let pi = p("513624");
    let poset = build_poset(&pi, &marks(&pi, 12, &[1, 4, 7])).unwrap();
    for chain in [[2, 5, 3, 6, 1, 4], [5, 8, 6, 9, 4, 7], [8, 11, 9, 12, 7, 10]] {
        ensure!(chain.windows(2).all(|w| poset.less_than(w[0] - 1, w[1] - 1)), "chain {chain:?}");
    }
    let template = nonoverlapping_poset(8, 3, 5, 3).unwrap();
    let x = p("34671285");
    ensure!(
        poset_isomorphic(&template, &build_poset(&x, &MarkSet::chained(3, 8)).unwrap()).unwrap(),
        "template (8,3,5,3) vs 34671285"
    );
    let a = build_poset(&p("13425"), &marks(&p("13425"), 12, &[1, 4, 8])).unwrap();
    let b = build_poset(&p("52431"), &marks(&p("52431"), 12, &[1, 4, 8])).unwrap();
    ensure!(!poset_isomorphic(&a, &b).unwrap() && !poset_isomorphic(&a, &b.dual()).unwrap(), "13425 vs 52431");
    let y = p("23567184");
    let left = build_poset(&y, &marks(&y, 15, &[1, 8])).unwrap();
    let right = build_poset(&x, &marks(&x, 15, &[1, 8])).unwrap();
    let counts = (count_linear_extensions(&left).unwrap(), count_linear_extensions(&right).unwrap());
    ensure!(counts == (big(840), big(840)), "extensions {counts:?}");
    Ok("three chains of 513624 at {1,4,7}; template matches; 13425/52431 neither isomorphic nor dual; 840=840".into())
}

fn refined_clusters() -> Outcome {
    let a = refined_cluster_number(&p("23514"), 12, &[1, 4, 8]).unwrap();
    let b = refined_cluster_number(&p("25134"), 12, &[1, 4, 8]).unwrap();
    ensure!(a == big(148) && b == big(180), "got {a}, {b}");
    Ok(format!("r(23514)={a} != r(25134)={b} at n=12, S={{1,4,8}}"))
}

fn clusters() -> Outcome {
    let (x, y) = (p("23567184"), p("34671285"));
    let k2 = (cluster_number(&x, 15, 2).unwrap(), cluster_number(&y, 15, 2).unwrap());
    ensure!(k2 == (big(840), big(840)), "k=2 {k2:?}");
    // three chained marks need 1+3*7 = 22 letters
    let k3 = (cluster_number(&x, 22, 3).unwrap(), cluster_number(&y, 22, 3).unwrap());
    ensure!(k3 == (big(11_642_400), big(12_153_960)), "k=3 {k3:?}");
    let q = p("2143");
    ensure!(cluster_number(&q, 6, 2).unwrap() != big(0) && cluster_number(&q, 5, 2).unwrap() == big(0), "2143 pairs");
    Ok(format!("k=2: 840=840; k=3 (22 letters): {} < {}; r(2143,6,2)>0=r(2143,5,2)", k3.0, k3.1))
}

fn block_product() -> Outcome {
    let pi = p("3142");
    let b = b_count(&pi, 30, &[2, 4, 7, 12, 14, 19, 22]).unwrap();
    let blocks = [
        (refined_cluster_number(&pi, 9, &[1, 3, 6]).unwrap(), 9),
        (refined_cluster_number(&pi, 6, &[1, 3]).unwrap(), 6),
        (refined_cluster_number(&pi, 7, &[1, 4]).unwrap(), 7),
    ];
    let mut num = factorial(30);
    let mut den = big(1);
    for (r, len) in &blocks {
        num *= r;
        den *= factorial(*len);
    }
    ensure!(&num % &den == big(0) && num / den == b, "b={b}");
    Ok(format!("b(3142, 30, 7 marks) = 30! * 54/9! * 2/6! * 9/7! = {b}"))
}

fn exact_sets() -> Outcome {
    let a = a_refined(&p("1423"), 9, &[1, 3, 6]).unwrap();
    let b = a_refined(&p("3241"), 9, &[1, 3, 6]).unwrap();
    ensure!(a == big(10) && b == big(6), "got {a}, {b}");
    let f = pattern_gf(&p("1342"), 10).unwrap();
    let g = pattern_gf(&p("1432"), 10).unwrap();
    for n in 0..=10 {
        ensure!(extract_a(&f, n, 0).unwrap() == extract_a(&g, n, 0).unwrap(), "avoiders differ at n={n}");
    }
    let r = cluster_gf(&p("23567184"), 15).unwrap();
    ensure!(r.get(15, 2) == BigInt::from(840), "z^15 t^2 coefficient {}", r.get(15, 2));
    Ok("a(1423)=10, a(3241)=6 at S={1,3,6}; 1342 and 1432 avoiders agree to n=10; [z^15 t^2]=840".into())
}

fn profiles() -> Outcome {
    ensure!(
        profile(&p("1342"), Level::Strong, 10).unwrap() == profile(&p("1432"), Level::Strong, 10).unwrap(),
        "1342 vs 1432 strong"
    );
    let (x, y) = (p("1423"), p("3241"));
    ensure!(profile(&x, Level::Strong, 9).unwrap() == profile(&y, Level::Strong, 9).unwrap(), "1423 vs 3241 strong");
    ensure!(
        profile(&x, Level::Superstrong, 9).unwrap() != profile(&y, Level::Superstrong, 9).unwrap(),
        "1423 vs 3241 super-strong"
    );
    Ok("1342~1432 strong; 1423~3241 strong but not super-strong".into())
}

fn classes() -> Outcome {
    let counts = [(3, 10, 2, 2), (4, 13, 7, 8), (5, 13, 25, 39)];
    for (m, horizon, strong, sup) in counts {
        let s = classify(m, Level::Strong, horizon).unwrap();
        let ss = classify(m, Level::Superstrong, horizon).unwrap();
        ensure!(s.classes.len() == strong && ss.classes.len() == sup, "m={m}: {} and {}", s.classes.len(), ss.classes.len());
        if m == 4 {
            let split = s.class_of(&p("1423")).unwrap();
            ensure!(s.classes[split].members.len() == 4, "class of 1423");
            ensure!(ss.class_of(&p("1423")) != ss.class_of(&p("3241")), "1423 and 3241 super-strong");
        }
        if m == 5 {
            let splits = s
                .classes
                .iter()
                .filter(|c| c.members.iter().any(|q| ss.class_of(q) != ss.class_of(&c.members[0])))
                .count();
            ensure!(splits == 14, "{splits} splitting classes");
        }
    }
    Ok("strong/super-strong: m=3 2/2, m=4 7/8, m=5 25/39 with 14 splits".into())
}

fn conditions() -> Outcome {
    let family = ["1734526", "1735426", "1743526", "1745326", "1753426", "1754326"].map(p);
    for x in &family {
        for y in &family {
            ensure!(check_ks_hypothesis(x, y), "{x} {y}");
        }
    }
    ensure!(!check_ks_hypothesis(&p("123546"), &p("124536")), "123546 vs 124536");
    ensure!(check_necessary(&p("23567184"), &p("35671284")).unwrap().certified_inequivalent(), "23567184 vs 35671284");
    ensure!(check_maxmin_hypothesis(&p("13425")) && check_maxmin_hypothesis(&p("12435")), "max-min hypothesis");
    let sup = classify(5, Level::Superstrong, 13).unwrap();
    ensure!(sup.class_of(&p("13425")) == sup.class_of(&p("52431")), "13425 vs 52431 super-strong");
    Ok("six-pattern family pairwise; 123546/124536 fails; 23567184/35671284 certified apart; 13425, 12435".into())
}

fn asymptotics() -> Outcome {
    let x = nonoverlap_construct(8, 3, 5).unwrap();
    let y = nonoverlap_construct(8, 2, 4).unwrap();
    ensure!(x == p("34671285") && y == p("23567184"), "constructed {x}, {y}");
    let triples = sandwich_check(8, 2, 4, 3).unwrap();
    ensure!(triples.iter().any(|t| t.k == 3 && t.actual == big(11_642_400)), "(8,2,4) at k=3");
    let row = probe_pair(&y, &x, 3).unwrap().ok_or("no probe row")?;
    ensure!(row.equal_at == [2] && row.witness_k == Some(3), "probe {row:?}");
    let r = recover_difference(&x, 30).unwrap();
    ensure!(r.bracket_contains_true, "bracket {:?}", r.integer_bracket);
    Ok(format!(
        "(8,3,5)->34671285, (8,2,4)->23567184; equal at k=2, apart at k=3; difference bracket {:?}",
        r.integer_bracket
    ))
}

fn brute_force() -> Outcome {
    let oracle = Oracle { limit: 12 };
    let a = oracle.brute_r(&p("23514"), 12, &[1, 4, 8]).unwrap();
    let b = oracle.brute_r(&p("25134"), 12, &[1, 4, 8]).unwrap();
    ensure!(a == big(148) && b == big(180), "got {a}, {b}");
    Ok("S_12 enumeration: 148 and 180".into())
}

/// Runs the checks for `tier`, returning whether all passed.
pub fn run(out: &mut impl Write, tier: Tier) -> std::io::Result<bool> {
    let mut checks: Vec<(&str, fn() -> Outcome)> = vec![
        ("words", words),
        ("overlap sets", overlaps),
        ("cluster posets", posets),
        ("refined cluster numbers", refined_clusters),
        ("cluster numbers", clusters),
        ("block factorization", block_product),
        ("exact-set counts and series", exact_sets),
        ("profiles", profiles),
        ("class counts", classes),
        ("sufficient and necessary conditions", conditions),
        ("construction and bounds", asymptotics),
    ];
    if tier == Tier::Slow {
        checks.push(("brute-force refined cluster numbers", brute_force));
    }
    let mut passed = 0;
    for (name, check) in &checks {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => {
                passed += 1;
                writeln!(out, "PASS {name} ({ms} ms): {detail}")?;
            }
            Err(why) => writeln!(out, "FAIL {name} ({ms} ms): {why}")?,
        }
    }
    writeln!(out, "{passed} of {} checks passed", checks.len())?;
    Ok(passed == checks.len())
}
