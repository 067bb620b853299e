//! Partitioning `S_m` into c-Wilf, strong and super-strong classes up to a
//! finite horizon, and the sufficient and necessary conditions that certify
//! or refute membership.
//!
//! Profiles compared at each level:
//! - c-Wilf: avoider counts `a_{n,0}`, `n <= N`;
//! - strong: cluster numbers `r_{n,k}`, which determine every `a_{n,k}`;
//! - super-strong: refined cluster numbers `r_{n,S}`, which determine
//!   every `a_{n,S}`.
//!
//! Equal profiles only show that no separation exists up to `N`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::CountCache;
use crate::clusterengine::ClusterEngine;
use crate::clusterposet::{feasible_marks, CountConfig, SpinePoset};
use crate::error::Budget;
use crate::gfseries::extract_a;
use crate::permcore::{overlap_set_unchecked, to_standard_form, Permutation};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Cwilf,
    Strong,
    Superstrong,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Cwilf, Level::Strong, Level::Superstrong];
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Cwilf => "cwilf",
            Level::Strong => "strong",
            Level::Superstrong => "superstrong",
        })
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "cwilf" => Ok(Level::Cwilf),
            "strong" => Ok(Level::Strong),
            "superstrong" => Ok(Level::Superstrong),
            _ => Err(Error::invalid(format!("unknown level `{s}`; expected cwilf, strong or superstrong"))),
        }
    }
}

/// Canonical data compared at one level; zero entries are omitted so that
/// equal profiles mean equal counts everywhere up to the horizon.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Profile {
    Cwilf(Vec<BigUint>),
    Strong(Vec<Vec<BigUint>>),
    Superstrong(Vec<(usize, Vec<usize>, BigUint)>),
}

pub fn profile(pattern: &Permutation, level: Level, horizon: usize) -> Result<Profile> {
    profile_with(&ClusterEngine::new(pattern), level, horizon)
}

pub fn profile_with(engine: &ClusterEngine, level: Level, horizon: usize) -> Result<Profile> {
    match level {
        Level::Cwilf => {
            let series = engine.pattern_series(horizon)?;
            Ok(Profile::Cwilf((0..=horizon).map(|n| extract_a(&series, n, 0)).collect::<Result<_>>()?))
        }
        Level::Strong => {
            let mut rows = engine.cluster_numbers_upto(horizon)?;
            for row in &mut rows {
                while row.last().is_some_and(Zero::is_zero) {
                    row.pop();
                }
            }
            Ok(Profile::Strong(rows))
        }
        Level::Superstrong => {
            let mut entries = Vec::new();
            for n in 0..=horizon {
                for set in feasible_marks(engine.pattern(), n) {
                    let r = engine.refined_cluster_number(n, set.marks())?;
                    if !r.is_zero() {
                        entries.push((n, set.marks().to_vec(), r));
                    }
                }
            }
            entries.sort();
            Ok(Profile::Superstrong(entries))
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    /// Largest pattern length accepted.
    pub max_len: usize,
    pub config: CountConfig,
    pub cache: Option<Arc<CountCache>>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { max_len: 6, config: CountConfig::default(), cache: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceClass {
    /// Sorted; the first member is the representative.
    pub members: Vec<Permutation>,
    pub representative: Permutation,
    /// Least member in standard form, if any member is.
    pub standard_form_representative: Option<Permutation>,
    /// Members are linked by complements and pairs meeting the
    /// prefix/suffix-set hypothesis, so the class is certified super-strong.
    pub satisfies_ks_hypothesis: bool,
    /// Some member has first letter 1, last letter m and two overlaps, so
    /// it is certified super-strongly equivalent to its reversal.
    pub satisfies_maxmin_hypothesis: bool,
    pub all_nonoverlapping: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub m: usize,
    pub level: Level,
    pub horizon: usize,
    pub classes: Vec<EquivalenceClass>,
    pub certification: String,
}

/// Default horizon `3(m-1)+1`.
pub fn default_horizon(m: usize) -> usize {
    3 * m.saturating_sub(1) + 1
}

pub fn classify(m: usize, level: Level, horizon: usize) -> Result<EquivalenceReport> {
    classify_with(m, level, horizon, &ClassifyOptions::default())
}

pub fn classify_with(m: usize, level: Level, horizon: usize, opts: &ClassifyOptions) -> Result<EquivalenceReport> {
    if m > opts.max_len {
        return Err(Error::Resource { budget: Budget::ClassifyLength, limit: opts.max_len as u64 });
    }
    if m < 2 {
        return Err(Error::invalid("classification needs m >= 2"));
    }
    let patterns: Vec<Permutation> = Permutation::all(m).collect();
    let profiles: Vec<Profile> = patterns
        .par_iter()
        .map(|p| {
            let engine = ClusterEngine::with_config(p, opts.config, opts.cache.clone());
            profile_with(&engine, level, horizon)
        })
        .collect::<Result<_>>()?;
    let mut groups: HashMap<&Profile, Vec<Permutation>> = HashMap::new();
    for (p, prof) in patterns.iter().zip(&profiles) {
        groups.entry(prof).or_default().push(p.clone());
    }
    let mut classes: Vec<EquivalenceClass> = groups.into_values().map(build_class).collect();
    classes.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(EquivalenceReport {
        m,
        level,
        horizon,
        classes,
        certification: format!(
            "no separation found up to N={horizon}; equality beyond N is not certified"
        ),
    })
}

fn build_class(mut members: Vec<Permutation>) -> EquivalenceClass {
    members.sort();
    let representative = members[0].clone();
    let standard_form_representative = members.iter().find(|p| p.is_standard_form()).cloned();
    // union-find over members linked by complement or the set hypothesis
    let n = members.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if members[i].complement() == members[j] || check_ks_hypothesis(&members[i], &members[j]) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let roots = (0..n).filter(|&i| find(&mut parent, i) == i).count();
    EquivalenceClass {
        satisfies_ks_hypothesis: roots == 1,
        satisfies_maxmin_hypothesis: members.iter().any(check_maxmin_hypothesis),
        all_nonoverlapping: members.iter().all(|p| overlap_set_unchecked(p).is_minimal()),
        standard_form_representative,
        representative,
        members,
    }
}

impl EquivalenceReport {
    /// One class per line, members comma-separated.
    pub fn to_text(&self) -> String {
        let mut out = format!("# m={} level={} classes={} ({})\n", self.m, self.level, self.classes.len(), self.certification);
        for c in &self.classes {
            out.push_str(&join(&c.members));
            out.push('\n');
        }
        out
    }

    pub fn class_of(&self, p: &Permutation) -> Option<usize> {
        self.classes.iter().position(|c| c.members.contains(p))
    }
}

fn join(ps: &[Permutation]) -> String {
    ps.iter().map(Permutation::to_compact).collect::<Vec<_>>().join(", ")
}

/// Strong classes, one per line, with their super-strong parts separated
/// by ` | `.
pub fn render_table(strong: &EquivalenceReport, superstrong: &EquivalenceReport) -> String {
    let mut out = format!(
        "# m={} strong={} superstrong={} ({})\n",
        strong.m,
        strong.classes.len(),
        superstrong.classes.len(),
        strong.certification
    );
    for c in &strong.classes {
        let mut parts: BTreeMap<usize, Vec<Permutation>> = BTreeMap::new();
        for p in &c.members {
            let idx = superstrong.class_of(p).unwrap_or(usize::MAX);
            parts.entry(idx).or_default().push(p.clone());
        }
        let cells: Vec<String> = parts.values().map(|ps| join(ps)).collect();
        out.push_str(&cells.join(" | "));
        out.push('\n');
    }
    out
}

/// Same overlap set, and for every overlap `i` the first `m-i` letters and
/// the last `m-i` letters agree as sets.
pub fn check_ks_hypothesis(pi: &Permutation, tau: &Permutation) -> bool {
    let m = pi.len();
    if tau.len() != m {
        return false;
    }
    let o = overlap_set_unchecked(pi);
    if o != overlap_set_unchecked(tau) {
        return false;
    }
    let same_set = |a: &[usize], b: &[usize]| {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        a.sort_unstable();
        b.sort_unstable();
        a == b
    };
    let (p, t) = (pi.as_slice(), tau.as_slice());
    o.indices().iter().all(|&i| same_set(&p[..m - i], &t[..m - i]) && same_set(&p[i..], &t[i..]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NecessaryReport {
    pub overlap_equal: bool,
    pub difference_equal: bool,
    pub standard_forms: (Permutation, Permutation),
}

impl NecessaryReport {
    /// Failing either condition certifies the pair is not strongly equivalent.
    pub fn certified_inequivalent(&self) -> bool {
        !(self.overlap_equal && self.difference_equal)
    }
}

pub fn check_necessary(pi: &Permutation, tau: &Permutation) -> Result<NecessaryReport> {
    if pi.len() != tau.len() {
        return Err(Error::invalid("patterns of different lengths"));
    }
    let (sp, _) = to_standard_form(pi)?;
    let (st, _) = to_standard_form(tau)?;
    Ok(NecessaryReport {
        overlap_equal: overlap_set_unchecked(pi) == overlap_set_unchecked(tau),
        difference_equal: sp.last() - sp.first() == st.last() - st.first(),
        standard_forms: (sp, st),
    })
}

/// `pi_1 = 1`, `pi_m = m` and exactly two overlaps.
pub fn check_maxmin_hypothesis(pi: &Permutation) -> bool {
    let m = pi.len();
    m >= 2 && pi.first() == 1 && pi.last() == m && overlap_set_unchecked(pi).indices().len() == 2
}

/// Result of comparing `r_{1+k(m-1),k}` for two end-letter pairs with the
/// same difference; these numbers depend on `(pi_1, pi_m)` alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeRow {
    pub m: usize,
    /// `(pi_1, pi_m)` and `(tau_1, tau_m)`, with `pi_1 < tau_1`.
    pub pi_ends: (usize, usize),
    pub tau_ends: (usize, usize),
    /// Least `k <= kmax` with `r^pi_k < r^tau_k`.
    pub witness_k: Option<usize>,
    /// `k` values with `r^pi_k = r^tau_k`.
    pub equal_at: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub m: usize,
    pub kmax: usize,
    pub rows: Vec<ProbeRow>,
}

impl ProbeReport {
    pub fn failures(&self) -> impl Iterator<Item = &ProbeRow> {
        self.rows.iter().filter(|r| r.witness_k.is_none())
    }
}

fn probe_ends(m: usize, pe: (usize, usize), te: (usize, usize), kmax: usize) -> Result<ProbeRow> {
    let mut row = ProbeRow { m, pi_ends: pe, tau_ends: te, witness_k: None, equal_at: Vec::new() };
    for k in 2..=kmax {
        let rp = SpinePoset::nonoverlapping(m, pe.0, pe.1, k)?.count();
        let rt = SpinePoset::nonoverlapping(m, te.0, te.1, k)?.count();
        if rp == rt {
            row.equal_at.push(k);
        } else if rp < rt {
            row.witness_k = Some(k);
            break;
        }
    }
    Ok(row)
}

/// The probe for one pair; `None` when the pair is not two standard forms
/// with equal end differences of at least 2 and `pi_1 < tau_1`.
pub fn probe_pair(pi: &Permutation, tau: &Permutation, kmax: usize) -> Result<Option<ProbeRow>> {
    let m = pi.len();
    if tau.len() != m || !pi.is_standard_form() || !tau.is_standard_form() {
        return Ok(None);
    }
    let (pe, te) = ((pi.first(), pi.last()), (tau.first(), tau.last()));
    if pe.1 - pe.0 != te.1 - te.0 || pe.1 - pe.0 < 2 || pe.0 >= te.0 {
        return Ok(None);
    }
    probe_ends(m, pe, te, kmax).map(Some)
}

/// Every end-letter pair admissible for length `m`, searched up to `kmax`.
/// Experimental: witnesses and failures are reported, nothing is asserted.
pub fn conjecture_probe(m: usize, kmax: usize) -> Result<ProbeReport> {
    let mut pairs = Vec::new();
    for d in 2..m {
        let starts: Vec<usize> = (1..=m).filter(|&a| a + d <= m && 2 * a + d <= m + 1).collect();
        for (i, &a) in starts.iter().enumerate() {
            for &c in &starts[i + 1..] {
                pairs.push(((a, a + d), (c, c + d)));
            }
        }
    }
    let rows = pairs
        .into_par_iter()
        .map(|(pe, te)| probe_ends(m, pe, te, kmax))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeReport { m, kmax, rows })
}
