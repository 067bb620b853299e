//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p cwilf-core --test acceptance`.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use cwilf_core::asymptotics::{nonoverlap_construct, recover_difference, sandwich_check};
use cwilf_core::bigmath::factorial;
use cwilf_core::clusterengine::{a_refined, cluster_number, refined_cluster_number, ClusterEngine};
use cwilf_core::clusterposet::{
    build_poset, count_linear_extensions, feasible_marks, nonoverlapping_poset, MarkSet,
};
use cwilf_core::equivalence::{classify, EquivalenceReport, Level};
use cwilf_core::gfseries::{extract_a, pattern_gf};
use cwilf_core::oracle::{block_reverse_bijection, enumerate_stats};
use cwilf_core::permcore::{is_nonoverlapping, occurrences, overlap_set, standardize};
use cwilf_core::{BigUint, Permutation};

fn p(s: &str) -> Permutation {
    s.parse().unwrap()
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn basics() -> Result<String, String> {
    ensure!(occurrences(&p("231"), &p("245361")).positions == [2, 4], "Em(231, 245361)");
    ensure!(overlap_set(&p("2143")).unwrap().indices() == [2, 3], "O(2143)");
    ensure!(overlap_set(&p("16358472")).unwrap().indices() == [7], "O(16358472)");
    ensure!(standardize(&[8, 1, 5, 6, 7]).unwrap() == p("51234"), "st(81567)");
    Ok("Em(231,245361)={2,4}, O(2143)={2,3}, O(16358472)={7}, st(81567)=51234".into())
}

fn refined() -> Result<String, String> {
    let a = refined_cluster_number(&p("23514"), 12, &[1, 4, 8]).unwrap();
    let b = refined_cluster_number(&p("25134"), 12, &[1, 4, 8]).unwrap();
    ensure!(a == big(148) && b == big(180), "got {a} and {b}");
    Ok(format!("r(23514)={a}, r(25134)={b} at n=12, S={{1,4,8}}"))
}

fn cluster_numbers() -> Result<String, String> {
    let (pi, tau) = (p("23567184"), p("34671285"));
    let r2 = (cluster_number(&pi, 15, 2).unwrap(), cluster_number(&tau, 15, 2).unwrap());
    ensure!(r2 == (big(840), big(840)), "k=2: {r2:?}");
    // three marks span 1+3*7 = 22 letters; the three-mark values live there
    let r3 = (cluster_number(&pi, 22, 3).unwrap(), cluster_number(&tau, 22, 3).unwrap());
    ensure!(r3 == (big(11_642_400), big(12_153_960)), "k=3: {r3:?}");
    ensure!(cluster_number(&pi, 15, 3).unwrap() == big(0), "no 3-mark cluster fits in 15 letters");
    Ok(format!("k=2: {} = {}; k=3 (n=22): {} < {}", r2.0, r2.1, r3.0, r3.1))
}

fn exact_sets() -> Result<String, String> {
    let mut parts = Vec::new();
    for (pi, expected) in [("1423", 10u64), ("3241", 6)] {
        let inversion = a_refined(&p(pi), 9, &[1, 3, 6]).unwrap();
        let oracle = enumerate_stats(&p(pi), 9).unwrap().a(&[1, 3, 6]);
        ensure!(inversion == big(expected) && big(oracle) == inversion, "{pi}: inversion {inversion}, oracle {oracle}");
        parts.push(format!("a({pi})={inversion}"));
    }
    Ok(format!("{} at n=9, S={{1,3,6}}; inversion and oracle agree", parts.join(", ")))
}

/// Strong classes of length 3, 4 and 5, each split into its super-strong
/// parts with `|`.
const TABLE: &[(usize, &[&str])] = &[
    (3, &["123,321", "132,312,231,213"]),
    (
        4,
        &[
            "1234,4321",
            "2413,3142",
            "2143,3412",
            "1324,4231",
            "1423,4132|2314,3241",
            "1342,4213,2431,3124,1432,4123,2341,3214",
            "1243,4312,3421,2134",
        ],
    ),
    (
        5,
        &[
            "12345,54321",
            "23514,43152|41532,25134",
            "24153,42513,35142,31524,25143,41523,34152,32514",
            "14253,52413|35241,31425",
            "14523,52143|32541,34125",
            "15243,51423|34251,32415",
            "12534,54132|43521,23145",
            "13425,53241,52431,14235",
            "24513,42153|31542,35124",
            "15324,51342|42351,24315",
            "21354,45312",
            "13254,53412|45231,21435",
            "21453,45213|35412,31254",
            "15423,51243|32451,34215",
            "25314,41352",
            "13452,53214,25431,41235,13542,53124,24531,42135,14352,52314,25341,41325,\
             14532,52134,23541,43125,15342,51324,24351,42315,15432,51234,23451,43215",
            "21534,45132,43512,23154",
            "21543,45123|34512,32154",
            "12453,54213,35421,31245,12543,54123,34521,32145",
            "13524,53142|42531,24135",
            "25413,41253|31452,35214",
            "15234,51432|43251,23415",
            "14325,52341",
            "12435,54231,53421,13245",
            "12354,54312,45321,21345",
        ],
    ),
];

fn parse_set(s: &str) -> BTreeSet<Permutation> {
    s.split(',').map(|x| p(x.trim())).collect()
}

fn partition(report: &EquivalenceReport) -> BTreeSet<BTreeSet<Permutation>> {
    report.classes.iter().map(|c| c.members.iter().cloned().collect()).collect()
}

fn classification() -> Result<String, String> {
    let mut summary = Vec::new();
    for &(m, rows) in TABLE {
        let strong_expected: BTreeSet<BTreeSet<Permutation>> =
            rows.iter().map(|r| parse_set(&r.replace('|', ","))).collect();
        let super_expected: BTreeSet<BTreeSet<Permutation>> =
            rows.iter().flat_map(|r| r.split('|').map(parse_set)).collect();
        let splits = rows.iter().filter(|r| r.contains('|')).count();
        let covered: usize = strong_expected.iter().map(BTreeSet::len).sum();
        ensure!(covered == (1..=m).product::<usize>(), "table for m={m} covers {covered} patterns");
        let strong = classify(m, Level::Strong, 13).unwrap();
        let sup = classify(m, Level::Superstrong, 13).unwrap();
        ensure!(partition(&strong) == strong_expected, "m={m}: strong classes differ from the table");
        ensure!(partition(&sup) == super_expected, "m={m}: super-strong classes differ from the table");
        summary.push(format!("m={m}: {} strong, {} super-strong, {splits} splits", strong.classes.len(), sup.classes.len()));
    }
    ensure!(summary[0] == "m=3: 2 strong, 2 super-strong, 0 splits", "{}", summary[0]);
    ensure!(summary[1] == "m=4: 7 strong, 8 super-strong, 1 splits", "{}", summary[1]);
    ensure!(summary[2] == "m=5: 25 strong, 39 super-strong, 14 splits", "{}", summary[2]);
    Ok(format!("{} (N=13, memberships match)", summary.join("; ")))
}

fn cluster_method() -> Result<String, String> {
    let mut checked = 0;
    for m in 3..=4 {
        for pi in Permutation::all(m) {
            let series = pattern_gf(&pi, 9).unwrap();
            for n in 0..=9 {
                let stats = enumerate_stats(&pi, n).unwrap();
                let mut total = big(0);
                for k in 0..=n {
                    let a = extract_a(&series, n, k).unwrap();
                    let expected = big(stats.by_k.get(k).copied().unwrap_or(0));
                    ensure!(a == expected, "{pi} n={n} k={k}: series {a}, oracle {expected}");
                    total += a;
                }
                ensure!(total == factorial(n), "{pi} n={n}: sum {total}");
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (pattern, n) pairs over S_3 and S_4, n <= 9"))
}

fn sandwich() -> Result<String, String> {
    let mut triples = 0;
    let mut cross = 0;
    for m in 5..=8 {
        for a in 1..m {
            for b in a + 1..m {
                if a + b > m + 1 {
                    continue;
                }
                let rows = sandwich_check(m, a, b, 10).map_err(|e| e.to_string())?;
                for t in &rows {
                    ensure!(t.lower <= t.actual && t.actual <= t.upper, "m={m} a={a} b={b} k={}", t.k);
                    triples += 1;
                    if t.k <= 4 {
                        let pi = nonoverlap_construct(m, a, b).unwrap();
                        let poset = build_poset(&pi, &MarkSet::chained(t.k, m)).unwrap();
                        let generic = count_linear_extensions(&poset).unwrap();
                        let template = count_linear_extensions(&nonoverlapping_poset(m, a, b, t.k).unwrap()).unwrap();
                        ensure!(generic == t.actual && template == t.actual, "m={m} a={a} b={b} k={}", t.k);
                        cross += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{triples} triples with l <= r <= u; {cross} spine values matched by the downset DP"))
}

fn subsets(slots: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << slots).map(move |bits| (1..=slots).filter(|i| bits >> (i - 1) & 1 == 1).collect())
}

fn symmetry() -> Result<String, String> {
    let mut posets = 0;
    for pi in Permutation::all(4) {
        let c = pi.complement();
        let engine = ClusterEngine::new(&pi);
        let engine_c = ClusterEngine::new(&c);
        for n in 4..=10 {
            for set in feasible_marks(&pi, n) {
                let r = engine.refined_cluster_number(n, set.marks()).unwrap();
                let rc = engine_c.refined_cluster_number(n, set.marks()).unwrap();
                ensure!(r == rc, "r differs for {pi} and its complement at n={n}, S={:?}", set.marks());
                match (build_poset(&pi, &set), build_poset(&c, &set)) {
                    (Ok(a), Ok(b)) => ensure!(a.dual() == b, "posets of {pi}, {c} not dual at {:?}", set.marks()),
                    (Err(_), Err(_)) => {}
                    _ => return Err(format!("feasibility differs for {pi} and {c} at {:?}", set.marks())),
                }
                posets += 1;
            }
        }
    }
    let mut sets = 0;
    for pi in Permutation::all(5).filter(|q| is_nonoverlapping(q).unwrap()) {
        let engine = ClusterEngine::new(&pi);
        let engine_r = ClusterEngine::new(&pi.reverse());
        for n in 5..=9 {
            for marks in subsets(n - 4) {
                let a = engine.a_refined(n, &marks).unwrap();
                let ar = engine_r.a_refined(n, &marks).unwrap();
                ensure!(a == ar, "a differs for {pi} and its reversal at n={n}, S={marks:?}");
                sets += 1;
            }
        }
    }
    let mut pairs = 0;
    for m in 3..=4 {
        for pi in Permutation::all(m).filter(|q| is_nonoverlapping(q).unwrap()) {
            let rev = pi.reverse();
            for n in m..=8 {
                for (from, to) in [(&pi, &rev), (&rev, &pi)] {
                    for sigma in Permutation::all(n) {
                        let em = occurrences(from, &sigma).positions;
                        for bits in 0u32..1 << em.len() {
                            let marks: Vec<usize> =
                                em.iter().enumerate().filter(|(j, _)| bits >> j & 1 == 1).map(|(_, &i)| i).collect();
                            let image = block_reverse_bijection(&sigma, from, &marks).unwrap();
                            let em_image = occurrences(to, &image);
                            ensure!(marks.iter().all(|&i| em_image.contains(i)), "{sigma} -> {image} loses marks");
                            let back = block_reverse_bijection(&image, to, &marks).unwrap();
                            ensure!(back == sigma, "{sigma} -> {image} -> {back}");
                            pairs += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{posets} complement pairs (equal r, dual posets), {sets} reversal a-values, {pairs} bijection round trips"
    ))
}

fn construction() -> Result<String, String> {
    let x = nonoverlap_construct(8, 3, 5).unwrap();
    let y = nonoverlap_construct(8, 2, 4).unwrap();
    ensure!(x == p("34671285") && y == p("23567184"), "got {x}, {y}");
    ensure!(is_nonoverlapping(&x).unwrap() && is_nonoverlapping(&y).unwrap(), "overlap found");
    Ok(format!("(8,3,5) -> {}, (8,2,4) -> {}, both non-overlapping", x.to_compact(), y.to_compact()))
}

fn recovery() -> Result<String, String> {
    let r = recover_difference(&p("34671285"), 30).map_err(|e| e.to_string())?;
    ensure!(r.contains_actual, "l <= r <= u fails");
    ensure!(r.log_lower <= r.log_actual && r.log_actual <= r.log_upper, "log bracket");
    ensure!(r.bracket_contains_true, "integer bracket {:?} misses {}", r.integer_bracket, r.true_difference);
    Ok(format!(
        "k=30: rates [{:.4}, {:.4}] contain {:.4}; difference in [{:.4}, {:.4}], integers {:?} contain {}",
        r.log_lower, r.log_upper, r.log_actual, r.difference_low, r.difference_high, r.integer_bracket, r.true_difference
    ))
}

fn main() {
    let criteria: [(&str, Check, Duration); 10] = [
        ("occurrence and overlap basics", basics, Duration::from_secs(1)),
        ("refined cluster numbers", refined, Duration::from_secs(1)),
        ("cluster numbers", cluster_numbers, Duration::from_secs(5)),
        ("exact-set counts", exact_sets, Duration::from_secs(60)),
        ("classification against the table", classification, Duration::from_secs(600)),
        ("cluster-method identity", cluster_method, Duration::from_secs(300)),
        ("sandwich bounds", sandwich, Duration::from_secs(300)),
        ("symmetry and duality", symmetry, Duration::from_secs(600)),
        ("construction fidelity", construction, Duration::from_secs(1)),
        ("asymptotic recovery", recovery, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
