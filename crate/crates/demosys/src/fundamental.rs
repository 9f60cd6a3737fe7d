//! Fundamental functions and democracy diagnostics.
//!
//! The fundamental function phi(m) is the supremum over index sets of size m
//! of the norm of the normalized sum; the dual fundamental function phi*(m)
//! weights the dual functionals by the primal norms and measures in the
//! conjugate space. By exchangeability, only the level profile (how many
//! indices are taken per level) matters, so every search here runs over
//! profiles rather than explicit index sets.
//!
//! The supremum over an infinite system is not computable; searches run over
//! a stated space: all profiles within a level cap (exhaustively for small m,
//! through a candidate family otherwise) together with a deep-level witness
//! family evaluated in log-domain arithmetic. Every result records that
//! space, so values are reproducible claims about it rather than assertions
//! about the true sup.

use crate::error::{Error, Result};
use crate::logdomain::LogNum;
use crate::rademacher::{rademacher_sum_norm, EngineConfig, ForcedPath, Method, WeightedLevelGroup};
use crate::system::{single_norm, NormExponent, SystemParams};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Counts of selected indices per level; the canonical argument of every
/// set-norm computation.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelProfile {
    counts: BTreeMap<u32, u64>,
}

fn level_capacity(n: u32) -> u64 {
    if n >= 63 {
        u64::MAX
    } else {
        1u64 << n
    }
}

impl LevelProfile {
    pub fn new() -> Self {
        LevelProfile::default()
    }

    pub fn from_pairs(pairs: &[(u32, u64)]) -> Result<Self> {
        let mut p = LevelProfile::new();
        for &(n, count) in pairs {
            p.add(n, count)?;
        }
        Ok(p)
    }

    /// Adds `count` indices at level n (accumulating).
    pub fn add(&mut self, n: u32, count: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::LevelOutOfRange(0));
        }
        if count == 0 {
            return Ok(());
        }
        let entry = self.counts.entry(n).or_insert(0);
        let new = entry.saturating_add(count);
        if new > level_capacity(n) {
            return Err(Error::ProfileOverCapacity { n, count: new });
        }
        *entry = new;
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.counts.iter().map(|(&n, &c)| (n, c))
    }

    pub fn max_level(&self) -> Option<u32> {
        self.counts.keys().next_back().copied()
    }
}

impl std::fmt::Display for LevelProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.counts.is_empty() {
            return write!(f, "-");
        }
        let parts: Vec<String> = self
            .counts
            .iter()
            .map(|(n, c)| format!("{n}:{c}"))
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// Which fundamental function a search targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiKind {
    /// phi: normalized elements measured in L^p.
    Primal,
    /// phi*: primal-norm-weighted functionals measured in L^p'.
    Dual,
}

/// How a phi value was searched.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMethod {
    Exhaustive,
    CandidateFamily,
}

impl SearchMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            SearchMethod::Exhaustive => "exhaustive",
            SearchMethod::CandidateFamily => "candidate-family",
        }
    }
}

/// Search-space configuration for phi and democracy searches.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Level cap is ceil(log2 m) + delta.
    pub level_cap_delta: u32,
    /// Deep single-level witness candidates appended to every search.
    pub deep_levels: Vec<u32>,
    /// Searches with m at most this run exhaustively (within the cap below).
    pub exhaustive_m_max: u64,
    pub exhaustive_level_cap: u32,
    pub engine: EngineConfig,
}

pub const DEFAULT_DEEP_LEVELS: [u32; 8] = [16, 24, 32, 48, 64, 96, 128, 200];

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            level_cap_delta: 4,
            deep_levels: DEFAULT_DEEP_LEVELS.to_vec(),
            exhaustive_m_max: 12,
            exhaustive_level_cap: 8,
            engine: EngineConfig::default(),
        }
    }
}

impl SearchConfig {
    pub fn level_cap(&self, m: u64) -> u32 {
        let base = 64 - m.max(1).leading_zeros();
        let base = if m.is_power_of_two() { base - 1 } else { base };
        (base + self.level_cap_delta).max(self.level_cap_delta).max(1)
    }
}

/// Norm of the profile together with the engine path of its right half.
#[derive(Clone, Copy, Debug)]
pub struct ProfileNorm {
    pub norm: LogNum,
    pub method: Method,
}

/// L^q norm of the normalized (primal) or norm-weighted (dual) sum over any
/// index set realizing the profile.
///
/// Primal: coefficients 1/|c_{n,l}|_p, measured in L^p. Dual: coefficients
/// |c_{n,l}|_p, measured in L^{p'}. Left half is an exact disjoint-support
/// sum in log arithmetic; right half goes through the sign-sum engine.
pub fn profile_norm(
    profile: &LevelProfile,
    params: &SystemParams,
    p: NormExponent,
    kind: PhiKind,
    engine: &EngineConfig,
) -> Result<ProfileNorm> {
    if profile.is_empty() {
        return Ok(ProfileNorm {
            norm: LogNum::ZERO,
            method: Method::ExactConvolution { atoms: 1 },
        });
    }
    let q = match kind {
        PhiKind::Primal => p,
        PhiKind::Dual => p.conjugate()?,
    };
    let qv = q.get();
    let l = params.l();

    let mut left = LogNum::ZERO;
    let mut groups = Vec::new();
    for (n, count) in profile.iter() {
        let gamma_log2 = match kind {
            PhiKind::Primal => -single_norm(n, params, p).log2(),
            PhiKind::Dual => single_norm(n, params, p).log2(),
        };
        let nf = n as f64;
        let log2_base = (-(-nf / l).exp2()).ln_1p() / std::f64::consts::LN_2;
        left += LogNum::from_log2(
            (count as f64).log2() + qv * gamma_log2 + (qv / 2.0) * log2_base + nf * (qv - 2.0),
        );
        groups.push(WeightedLevelGroup::new(
            (gamma_log2 - nf / (2.0 * l)).exp2(),
            count,
        ));
    }
    let right = rademacher_sum_norm(&groups, qv, engine)?;
    Ok(ProfileNorm {
        norm: (left + right.moment).powf(1.0 / qv),
        method: right.method,
    })
}

/// One computed fundamental-function value, with the search space on record.
#[derive(Clone, Debug)]
pub struct PhiEntry {
    pub m: u64,
    pub value: LogNum,
    pub profile: LevelProfile,
    pub method: SearchMethod,
    pub level_cap: u32,
    pub deep_levels: Vec<u32>,
}

/// Table m -> phi(m) (or phi*(m)) with the maximizing profiles.
#[derive(Clone, Debug)]
pub struct FundamentalTable {
    pub kind: PhiKind,
    pub entries: Vec<PhiEntry>,
}

impl FundamentalTable {
    /// Values must be nondecreasing in m (sup over nested families).
    pub fn is_nondecreasing(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| w[0].m > w[1].m || w[0].value.log2() <= w[1].value.log2() + 1e-9)
    }
}

// ---------------------------------------------------------------------------
// Profile enumeration and the candidate family
// ---------------------------------------------------------------------------

/// All profiles with total exactly m over levels 1..=cap (m_n <= 2^n).
fn enumerate_profiles(m: u64, cap: u32) -> Vec<LevelProfile> {
    let mut out = Vec::new();
    let mut stack: Vec<(u32, u64)> = Vec::new();
    fn rec(level: u32, cap: u32, rem: u64, stack: &mut Vec<(u32, u64)>, out: &mut Vec<LevelProfile>) {
        if rem == 0 {
            out.push(LevelProfile::from_pairs(stack).expect("enumerated profile valid"));
            return;
        }
        if level > cap {
            return;
        }
        // Remaining capacity check prunes dead branches.
        let tail_capacity: u64 = (level..=cap)
            .map(level_capacity)
            .fold(0u64, |a, b| a.saturating_add(b));
        if tail_capacity < rem {
            return;
        }
        let top = level_capacity(level).min(rem);
        for take in (0..=top).rev() {
            if take > 0 {
                stack.push((level, take));
            }
            rec(level + 1, cap, rem - take, stack, out);
            if take > 0 {
                stack.pop();
            }
        }
    }
    rec(1, cap, m, &mut stack, &mut out);
    out
}

/// The candidate family for m beyond exhaustive range: greedy low-first fill,
/// greedy high-first fill within the cap, single-level blocks, two-level
/// splits of dyadic m, plus the deep-level family.
fn candidate_profiles<F: Fn(u32) -> bool>(
    m: u64,
    cap: u32,
    deep_levels: &[u32],
    allowed: F,
) -> Vec<LevelProfile> {
    let mut out: Vec<LevelProfile> = Vec::new();

    // (a) low-first fill; may run past the cap if restricted classes lack
    // capacity below it.
    {
        let mut prof = LevelProfile::new();
        let mut rem = m;
        let mut n = 1u32;
        while rem > 0 && n <= cap + 64 {
            if allowed(n) {
                let take = level_capacity(n).min(rem);
                prof.add(n, take).expect("capacity respected");
                rem -= take;
            }
            n += 1;
        }
        if rem == 0 {
            out.push(prof);
        }
    }

    // (b) high-first fill within the cap.
    {
        let mut prof = LevelProfile::new();
        let mut rem = m;
        for n in (1..=cap).rev() {
            if rem == 0 {
                break;
            }
            if allowed(n) {
                let take = level_capacity(n).min(rem);
                prof.add(n, take).expect("capacity respected");
                rem -= take;
            }
        }
        if rem == 0 {
            out.push(prof);
        }
    }

    // (c) single-level blocks {n: min(m, 2^n)}.
    for n in 1..=cap {
        if allowed(n) {
            let take = level_capacity(n).min(m);
            out.push(LevelProfile::from_pairs(&[(n, take)]).expect("block fits"));
        }
    }

    // (d) two-level splits of dyadic m.
    if m.is_power_of_two() && m >= 2 {
        let mut cuts = vec![m / 2];
        if m <= 1024 && m >= 4 {
            cuts.push(m / 4);
        }
        for c in cuts {
            let rest = m - c;
            for n1 in 1..=cap {
                for n2 in n1 + 1..=cap {
                    if !allowed(n1) || !allowed(n2) {
                        continue;
                    }
                    for (c1, c2) in [(c, rest), (rest, c)] {
                        if c1 <= level_capacity(n1) && c2 <= level_capacity(n2) {
                            out.push(
                                LevelProfile::from_pairs(&[(n1, c1), (n2, c2)])
                                    .expect("split fits"),
                            );
                        }
                    }
                }
            }
        }
    }

    // (e) deep single levels beyond the cap.
    for &deep in deep_levels {
        if deep > cap && allowed(deep) && level_capacity(deep) >= m {
            out.push(LevelProfile::from_pairs(&[(deep, m)]).expect("deep level fits"));
        }
    }

    out.sort();
    out.dedup();
    out
}

/// Evaluates profiles in parallel and keeps the extremes. Ties break toward
/// the lexicographically smallest profile, independent of schedule.
fn search_extremes(
    profiles: Vec<LevelProfile>,
    params: &SystemParams,
    p: NormExponent,
    kind: PhiKind,
    engine: &EngineConfig,
) -> Result<Option<((LogNum, LevelProfile), (LogNum, LevelProfile))>> {
    let evaluated: Result<Vec<(LogNum, LevelProfile)>> = profiles
        .into_par_iter()
        .map(|prof| {
            let v = profile_norm(&prof, params, p, kind, engine)?;
            Ok((v.norm, prof))
        })
        .collect();
    let evaluated = evaluated?;
    let mut best: Option<(LogNum, LevelProfile)> = None;
    let mut worst: Option<(LogNum, LevelProfile)> = None;
    for (v, prof) in evaluated {
        let replace_best = match &best {
            None => true,
            Some((bv, bp)) => {
                v.log2() > bv.log2() || (v.log2() == bv.log2() && prof < *bp)
            }
        };
        if replace_best {
            best = Some((v, prof.clone()));
        }
        let replace_worst = match &worst {
            None => true,
            Some((wv, wp)) => v.log2() < wv.log2() || (v.log2() == wv.log2() && prof < *wp),
        };
        if replace_worst {
            worst = Some((v, prof));
        }
    }
    Ok(best.zip(worst))
}

/// Fundamental (or dual fundamental) function at m over the configured search
/// space: profiles of total <= m within the cap plus the deep-level family.
/// The sup is attained at total = m (adding disjoint mass only increases the
/// norm); sub-total single-level blocks are still scored, never winners.
pub fn phi(
    m: u64,
    params: &SystemParams,
    p: NormExponent,
    kind: PhiKind,
    search: &SearchConfig,
) -> Result<PhiEntry> {
    if m == 0 {
        return Err(Error::OutOfDomain {
            name: "m",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let exhaustive = m <= search.exhaustive_m_max;
    let cap = if exhaustive {
        search.exhaustive_level_cap
    } else {
        search.level_cap(m)
    };
    let mut profiles = if exhaustive {
        enumerate_profiles(m, cap)
    } else {
        candidate_profiles(m, cap, &search.deep_levels, |_| true)
    };
    // The deep-level family is part of the stated search space either way.
    for &deep in &search.deep_levels {
        if deep > cap && level_capacity(deep) >= m {
            profiles.push(LevelProfile::from_pairs(&[(deep, m)])?);
        }
    }
    profiles.sort();
    profiles.dedup();

    let extremes = search_extremes(profiles, params, p, kind, &search.engine)?;
    let (best, _) = extremes.expect("nonempty profile space");
    Ok(PhiEntry {
        m,
        value: best.0,
        profile: best.1,
        method: if exhaustive {
            SearchMethod::Exhaustive
        } else {
            SearchMethod::CandidateFamily
        },
        level_cap: cap,
        deep_levels: search.deep_levels.clone(),
    })
}

/// phi over a list of sizes, as a table.
pub fn phi_table(
    ms: &[u64],
    params: &SystemParams,
    p: NormExponent,
    kind: PhiKind,
    search: &SearchConfig,
) -> Result<FundamentalTable> {
    let entries: Result<Vec<PhiEntry>> =
        ms.iter().map(|&m| phi(m, params, p, kind, search)).collect();
    Ok(FundamentalTable {
        kind,
        entries: entries?,
    })
}

/// Extremes of the profile norm at exact total m, and their ratio D(m).
#[derive(Clone, Debug)]
pub struct DemocracyEntry {
    pub m: u64,
    pub max: LogNum,
    pub min: LogNum,
    pub argmax: LevelProfile,
    pub argmin: LevelProfile,
    pub method: SearchMethod,
}

impl DemocracyEntry {
    pub fn ratio(&self) -> f64 {
        (self.max.log2() - self.min.log2()).exp2()
    }
}

/// Max and min of the normalized-set norm over profiles with total exactly m
/// (same search space as [`phi`], restricted to exact totals).
pub fn democracy_ratio(
    m: u64,
    params: &SystemParams,
    p: NormExponent,
    search: &SearchConfig,
) -> Result<DemocracyEntry> {
    if m == 0 {
        return Err(Error::OutOfDomain {
            name: "m",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let exhaustive = m <= search.exhaustive_m_max;
    let cap = if exhaustive {
        search.exhaustive_level_cap
    } else {
        search.level_cap(m)
    };
    let mut profiles = if exhaustive {
        enumerate_profiles(m, cap)
    } else {
        candidate_profiles(m, cap, &search.deep_levels, |_| true)
    };
    for &deep in &search.deep_levels {
        if deep > cap && level_capacity(deep) >= m {
            profiles.push(LevelProfile::from_pairs(&[(deep, m)])?);
        }
    }
    profiles.retain(|prof| prof.total() == m);
    profiles.sort();
    profiles.dedup();

    let extremes = search_extremes(profiles, params, p, PhiKind::Primal, &search.engine)?;
    let ((max, argmax), (min, argmin)) = extremes.expect("nonempty profile space");
    Ok(DemocracyEntry {
        m,
        max,
        min,
        argmax,
        argmin,
        method: if exhaustive {
            SearchMethod::Exhaustive
        } else {
            SearchMethod::CandidateFamily
        },
    })
}

/// Norm of the normalized full level n (the set B_n of all 2^n indices at
/// level n), measured in L^r.
pub fn witness_bn(
    n: u32,
    params: &SystemParams,
    r: NormExponent,
    engine: &EngineConfig,
) -> Result<LogNum> {
    let profile = LevelProfile::from_pairs(&[(n, level_capacity(n))])?;
    Ok(profile_norm(&profile, params, r, PhiKind::Primal, engine)?.norm)
}

/// Norm of the normalized deep witness set (2^n indices at level n^2),
/// measured in L^r. Equal cardinality to B_n, but the deep level drains the
/// left-half mass, leaving only the sign-sum part.
pub fn witness_bstar(
    n: u32,
    params: &SystemParams,
    r: NormExponent,
    engine: &EngineConfig,
) -> Result<LogNum> {
    if n == 0 || n > 200 {
        return Err(Error::LevelOutOfRange(n));
    }
    let deep = n
        .checked_mul(n)
        .ok_or(Error::LevelOutOfRange(n))?;
    let count = level_capacity(n);
    let profile = LevelProfile::from_pairs(&[(deep, count)])?;
    Ok(profile_norm(&profile, params, r, PhiKind::Primal, engine)?.norm)
}

/// One point of the bidemocracy product profile.
#[derive(Clone, Debug)]
pub struct BidemPoint {
    pub m: u64,
    pub phi: PhiEntry,
    pub phi_star: PhiEntry,
}

impl BidemPoint {
    /// log2 of phi(m) phi*(m) / m, the quantity whose boundedness defines
    /// bidemocracy.
    pub fn product_over_m_log2(&self) -> f64 {
        self.phi.value.log2() + self.phi_star.value.log2() - (self.m as f64).log2()
    }
}

/// phi(m) phi*(m) / m over a list of sizes.
pub fn bidemocracy_profile(
    ms: &[u64],
    params: &SystemParams,
    p: NormExponent,
    search: &SearchConfig,
) -> Result<Vec<BidemPoint>> {
    p.conjugate()?; // dual side requires p > 1
    ms.iter()
        .map(|&m| {
            Ok(BidemPoint {
                m,
                phi: phi(m, params, p, PhiKind::Primal, search)?,
                phi_star: phi(m, params, p, PhiKind::Dual, search)?,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Partition sandwich
// ---------------------------------------------------------------------------

/// A partition of all levels into classes by residue mod `modulus`.
///
/// Class j receives every level whose residue lies in `classes[j]`; the
/// residue lists must cover 0..modulus exactly once.
#[derive(Clone, Debug)]
pub struct LevelPartition {
    modulus: u32,
    classes: Vec<Vec<u32>>,
}

impl LevelPartition {
    pub fn new(modulus: u32, classes: Vec<Vec<u32>>) -> Result<Self> {
        if modulus == 0 || classes.is_empty() {
            return Err(Error::InvalidPartition("empty partition".into()));
        }
        let mut seen = vec![false; modulus as usize];
        for class in &classes {
            for &r in class {
                if r >= modulus {
                    return Err(Error::InvalidPartition(format!(
                        "residue {r} out of range mod {modulus}"
                    )));
                }
                if seen[r as usize] {
                    return Err(Error::InvalidPartition(format!(
                        "residue {r} assigned to two classes"
                    )));
                }
                seen[r as usize] = true;
            }
        }
        if let Some(r) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidPartition(format!(
                "residue {r} not covered"
            )));
        }
        Ok(LevelPartition { modulus, classes })
    }

    /// Odd and even levels as two classes.
    pub fn odd_even() -> Self {
        LevelPartition::new(2, vec![vec![1], vec![0]]).expect("static partition valid")
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn contains(&self, class: usize, level: u32) -> bool {
        self.classes[class].contains(&(level % self.modulus))
    }
}

/// Result of the partition comparison at one m.
#[derive(Clone, Debug)]
pub struct SandwichReport {
    pub m: u64,
    pub per_class: Vec<PhiEntry>,
    pub phi_tilde: LogNum,
    pub phi_full: LogNum,
    pub holds: bool,
}

/// Computes per-class fundamental functions (searching only profiles within
/// each class), their max phi_tilde, and the full phi, then checks
/// (1/nu) phi(m) <= phi_tilde(m) <= phi(m).
pub fn partition_sandwich(
    partition: &LevelPartition,
    m: u64,
    params: &SystemParams,
    p: NormExponent,
    search: &SearchConfig,
) -> Result<SandwichReport> {
    let nu = partition.num_classes() as f64;
    let mut per_class = Vec::with_capacity(partition.num_classes());
    for class in 0..partition.num_classes() {
        let cap = if m <= search.exhaustive_m_max {
            search.exhaustive_level_cap
        } else {
            search.level_cap(m)
        };
        let mut profiles = if m <= search.exhaustive_m_max {
            let mut all = enumerate_profiles(m, cap);
            all.retain(|prof| prof.iter().all(|(n, _)| partition.contains(class, n)));
            all
        } else {
            candidate_profiles(m, cap, &search.deep_levels, |n| {
                partition.contains(class, n)
            })
        };
        for &deep in &search.deep_levels {
            if deep > cap && partition.contains(class, deep) && level_capacity(deep) >= m {
                profiles.push(LevelProfile::from_pairs(&[(deep, m)])?);
            }
        }
        profiles.sort();
        profiles.dedup();
        let value = match search_extremes(profiles, params, p, PhiKind::Primal, &search.engine)? {
            Some(((v, prof), _)) => PhiEntry {
                m,
                value: v,
                profile: prof,
                method: if m <= search.exhaustive_m_max {
                    SearchMethod::Exhaustive
                } else {
                    SearchMethod::CandidateFamily
                },
                level_cap: cap,
                deep_levels: search.deep_levels.clone(),
            },
            None => PhiEntry {
                m,
                value: LogNum::ZERO,
                profile: LevelProfile::new(),
                method: SearchMethod::CandidateFamily,
                level_cap: cap,
                deep_levels: search.deep_levels.clone(),
            },
        };
        per_class.push(value);
    }
    let phi_tilde = per_class
        .iter()
        .map(|e| e.value)
        .fold(LogNum::ZERO, LogNum::max);
    let phi_full = phi(m, params, p, PhiKind::Primal, search)?.value;
    // Tolerate float rounding at the boundaries of the two inequalities.
    let tol = 1e-9;
    let holds = phi_tilde.log2() <= phi_full.log2() + tol
        && phi_full.log2() <= phi_tilde.log2() + nu.log2() + tol;
    Ok(SandwichReport {
        m,
        per_class,
        phi_tilde,
        phi_full,
        holds,
    })
}

// ---------------------------------------------------------------------------
// Exhaustive oracle
// ---------------------------------------------------------------------------

pub const BRUTE_FORCE_M_MAX: u64 = 12;
pub const BRUTE_FORCE_CAP_MAX: u32 = 8;

/// Exhaustive phi over every profile with total m within the level cap,
/// evaluated through the exact convolution path only. This is the validation
/// oracle for the candidate-family search; limits are hard.
pub fn brute_force_phi(
    m: u64,
    params: &SystemParams,
    p: NormExponent,
    level_cap: u32,
    kind: PhiKind,
    engine: &EngineConfig,
) -> Result<PhiEntry> {
    let (max, _) = brute_force_extremes(m, params, p, level_cap, kind, engine)?;
    Ok(max)
}

/// Exhaustive max and min over profiles with total exactly m.
pub fn brute_force_extremes(
    m: u64,
    params: &SystemParams,
    p: NormExponent,
    level_cap: u32,
    kind: PhiKind,
    engine: &EngineConfig,
) -> Result<(PhiEntry, PhiEntry)> {
    if m > BRUTE_FORCE_M_MAX || level_cap > BRUTE_FORCE_CAP_MAX {
        return Err(Error::SearchLimits {
            m,
            m_max: BRUTE_FORCE_M_MAX,
            cap: level_cap,
            cap_max: BRUTE_FORCE_CAP_MAX,
        });
    }
    let engine = EngineConfig {
        force: Some(ForcedPath::ExactConvolution),
        ..*engine
    };
    let profiles = enumerate_profiles(m, level_cap);
    let extremes = search_extremes(profiles, params, p, kind, &engine)?;
    let ((max, argmax), (min, argmin)) = extremes.expect("profiles exist for m >= 1");
    let entry = |value: LogNum, profile: LevelProfile| PhiEntry {
        m,
        value,
        profile,
        method: SearchMethod::Exhaustive,
        level_cap,
        deep_levels: Vec::new(),
    };
    Ok((entry(max, argmax), entry(min, argmin)))
}
