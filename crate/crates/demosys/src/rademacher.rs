//! Exact Rademacher evaluation and absolute moments of weighted sign sums.
//!
//! The right half of every norm in this crate is an integral of
//! |Σ a_k r_k(t)|^p over [0,1], i.e. the p-th absolute moment of a weighted
//! sum of independent signs. Within one construction level all weights agree,
//! so the sum collapses to a per-level binomial: a·(m - 2B) with
//! B ~ Binomial(m, 1/2). This module carries those finite distributions
//! explicitly and computes moments by exact convolution where the state space
//! allows, falling back to tolerance-merged convolution with a tracked error
//! bound, and finally to seeded Monte Carlo. Even integer exponents are
//! handled by an exact moment recursion that avoids materializing atoms at
//! all.

use crate::error::{Error, Result};
use crate::indexing::FlatIndex;
use crate::logdomain::LogNum;
use crate::util::{Fnv1a, KahanSum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

/// Evaluates the k-th Rademacher function at t in [0,1].
///
/// Convention: +1 if floor(2^k t) is even, -1 if odd (the dyadic-step sign,
/// equal a.e. to sign(sin 2^k pi t)); dyadic points, including t = 1, take +1.
/// The computation is exact for every f64 input: t is decomposed into its
/// integer mantissa and exponent, so no rounding ever flips a sign.
pub fn rademacher_eval(k: FlatIndex, t: f64) -> Result<i8> {
    if k.0 == 0 {
        return Err(Error::ZeroFlatIndex);
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfDomain {
            name: "t",
            value: t,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if t == 0.0 {
        return Ok(1);
    }
    // t = mantissa * 2^exp exactly.
    let bits = t.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if raw_exp == 0 {
        (frac, -1074i64) // subnormal
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    };
    // floor(2^k t) = floor(mantissa * 2^(k + exp)).
    let shift = k.0 as i128 + exp as i128;
    let parity_odd = if shift >= 1 {
        false // mantissa << shift is even
    } else if shift == 0 {
        mantissa & 1 == 1
    } else {
        let s = -shift;
        if s >= 64 {
            false // floor is 0
        } else {
            (mantissa >> s) & 1 == 1
        }
    };
    Ok(if parity_odd { -1 } else { 1 })
}

/// A block of `count` distinct Rademacher indices sharing one coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedLevelGroup {
    pub coefficient: f64,
    pub count: u64,
}

impl WeightedLevelGroup {
    pub fn new(coefficient: f64, count: u64) -> Self {
        WeightedLevelGroup { coefficient, count }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// Finite atomic distribution of a weighted sign sum, symmetric about 0.
///
/// `merge_error` bounds how far any atom may have been displaced from its
/// exact position by tolerance merging; 0 means the distribution is exact.
#[derive(Clone, Debug)]
pub struct SignSumDistribution {
    atoms: Vec<Atom>,
    exact: bool,
    merge_error: f64,
}

impl SignSumDistribution {
    /// The unit of convolution: a single atom at 0.
    pub fn point_mass() -> Self {
        SignSumDistribution {
            atoms: vec![Atom {
                value: 0.0,
                prob: 1.0,
            }],
            exact: true,
            merge_error: 0.0,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn merge_error(&self) -> f64 {
        self.merge_error
    }

    pub fn max_abs_value(&self) -> f64 {
        match (self.atoms.first(), self.atoms.last()) {
            (Some(a), Some(b)) => a.value.abs().max(b.value.abs()),
            _ => 0.0,
        }
    }

    /// Checks the structural invariants: positive probabilities summing to 1
    /// within 1e-12, strictly increasing values, symmetry about 0 within 1e-12.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.atoms.is_empty() {
            return Err("distribution has no atoms".into());
        }
        let mut total = KahanSum::new();
        for w in self.atoms.windows(2) {
            if w[0].value >= w[1].value {
                return Err(format!(
                    "atom values not strictly increasing: {} then {}",
                    w[0].value, w[1].value
                ));
            }
        }
        for a in &self.atoms {
            if a.prob <= 0.0 {
                return Err(format!("nonpositive probability {} at {}", a.prob, a.value));
            }
            total.add(a.prob);
        }
        if (total.value() - 1.0).abs() > 1e-12 {
            return Err(format!("probabilities sum to {}", total.value()));
        }
        let n = self.atoms.len();
        for i in 0..n {
            let a = &self.atoms[i];
            let b = &self.atoms[n - 1 - i];
            if (a.value + b.value).abs() > 1e-12 * self.max_abs_value().max(1.0)
                || (a.prob - b.prob).abs() > 1e-12
            {
                return Err(format!(
                    "not symmetric: atom ({}, {}) vs ({}, {})",
                    a.value, a.prob, b.value, b.prob
                ));
            }
        }
        Ok(())
    }
}

/// Distribution of a·(m - 2B), B ~ Binomial(m, 1/2): the sign sum of one group.
pub fn group_distribution(g: &WeightedLevelGroup) -> SignSumDistribution {
    let m = g.count;
    let a = g.coefficient;
    if m == 0 || a == 0.0 {
        return SignSumDistribution::point_mass();
    }
    // log-pmf recurrence avoids overflow of C(m, b) for large m; the far tails
    // may underflow to zero probability and are dropped (mass < 1e-300, far
    // below every tolerance used here).
    let mut log_pmf = Vec::with_capacity(m as usize + 1);
    let mut lp = -(m as f64) * std::f64::consts::LN_2;
    log_pmf.push(lp);
    for b in 0..m {
        lp += ((m - b) as f64).ln() - ((b + 1) as f64).ln();
        log_pmf.push(lp);
    }
    let mut atoms: Vec<Atom> = Vec::with_capacity(m as usize + 1);
    // Ascending values: b from m down to 0 for a > 0, reversed for a < 0.
    let order: Box<dyn Iterator<Item = u64>> = if a > 0.0 {
        Box::new((0..=m).rev())
    } else {
        Box::new(0..=m)
    };
    for b in order {
        let prob = log_pmf[b as usize].exp();
        if prob > 0.0 {
            atoms.push(Atom {
                value: a * (m as f64 - 2.0 * b as f64),
                prob,
            });
        }
    }
    // Normalize so the mass sums to 1 despite recurrence rounding.
    let mut total = KahanSum::new();
    for at in &atoms {
        total.add(at.prob);
    }
    let norm = total.value();
    for at in &mut atoms {
        at.prob /= norm;
    }
    SignSumDistribution {
        atoms,
        exact: true,
        merge_error: 0.0,
    }
}

/// Convolution of two independent sign-sum distributions.
///
/// Atoms closer than `merge_tol` are merged to their probability-weighted
/// mean; exactly equal values always merge losslessly. The accumulated
/// merge-error bound grows additively: any atom of the result sits within
/// `d1.merge_error + d2.merge_error + merge_tol` of its exact position.
pub fn convolve(
    d1: &SignSumDistribution,
    d2: &SignSumDistribution,
    merge_tol: f64,
) -> SignSumDistribution {
    let mut products: Vec<Atom> = Vec::with_capacity(d1.atoms.len() * d2.atoms.len());
    for a in &d1.atoms {
        for b in &d2.atoms {
            let prob = a.prob * b.prob;
            // Tail products can underflow to exactly zero; such atoms carry
            // no representable mass and would poison weighted means.
            if prob > 0.0 {
                products.push(Atom {
                    value: a.value + b.value,
                    prob,
                });
            }
        }
    }
    products.sort_by(|x, y| x.value.total_cmp(&y.value));

    let mut atoms: Vec<Atom> = Vec::new();
    let mut lossy_merge = false;
    let mut i = 0;
    while i < products.len() {
        let start = products[i].value;
        let mut value_sum = KahanSum::new();
        let mut prob_sum = KahanSum::new();
        let mut all_equal = true;
        let mut j = i;
        while j < products.len()
            && (products[j].value == start || products[j].value - start <= merge_tol)
        {
            if products[j].value != start {
                all_equal = false;
            }
            prob_sum.add(products[j].prob);
            value_sum.add(products[j].prob * products[j].value);
            j += 1;
        }
        let prob = prob_sum.value();
        let value = if all_equal { start } else { value_sum.value() / prob };
        if !all_equal {
            lossy_merge = true;
        }
        atoms.push(Atom { value, prob });
        i = j;
    }
    // Weighted means of nearly-equal floats can collapse onto a neighbor;
    // fold any such duplicates so values stay strictly increasing.
    atoms.dedup_by(|b, a| {
        if a.value == b.value {
            a.prob += b.prob;
            true
        } else {
            false
        }
    });
    SignSumDistribution {
        atoms,
        exact: d1.exact && d2.exact && !lossy_merge,
        merge_error: d1.merge_error + d2.merge_error + if lossy_merge { merge_tol } else { 0.0 },
    }
}

/// An absolute moment together with the error bound induced by any merging.
#[derive(Clone, Copy, Debug)]
pub struct MomentEstimate {
    /// E|X|^p as a log-domain value.
    pub value: LogNum,
    /// Absolute bound on the moment error from atom merging (0 when exact).
    pub abs_error_bound: f64,
}

/// E|X|^p over the atoms; p >= 1.
///
/// When the distribution carries a nonzero merge-error bound, the returned
/// bound is the Lipschitz transport of that displacement through |x|^p on the
/// atom range. Accumulation switches to log-domain arithmetic when p-th
/// powers leave the comfortable f64 range.
pub fn absolute_moment(d: &SignSumDistribution, p: f64) -> Result<MomentEstimate> {
    if p < 1.0 {
        return Err(Error::ExponentTooSmall { p, min: 1.0 });
    }
    let vmax = d.max_abs_value();
    let value = if vmax > 0.0 && p * vmax.log2() > 512.0 {
        let mut acc = LogNum::ZERO;
        for a in &d.atoms {
            if a.value != 0.0 {
                acc += LogNum::from_log2(a.prob.log2() + p * a.value.abs().log2());
            }
        }
        acc
    } else {
        let mut acc = KahanSum::new();
        for a in &d.atoms {
            acc.add(a.prob * a.value.abs().powf(p));
        }
        LogNum::from_f64(acc.value())
    };
    let abs_error_bound = if d.merge_error > 0.0 {
        let reach = vmax + d.merge_error;
        p * reach.powf(p - 1.0) * d.merge_error
    } else {
        0.0
    };
    Ok(MomentEstimate {
        value,
        abs_error_bound,
    })
}

/// How the sum-norm engine arrived at its answer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    /// Exact moment recursion for even integer p; no atoms materialized.
    EvenMoment,
    /// Full convolution with zero merge tolerance.
    ExactConvolution { atoms: usize },
    /// Tolerance-merged convolution; the moment error bound is absolute.
    MergedConvolution {
        atoms: usize,
        moment_error_bound: f64,
    },
    /// Seeded sampling; `rel_stderr` is the relative standard error of the moment.
    MonteCarlo {
        seed: u64,
        samples: u64,
        rel_stderr: f64,
    },
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::EvenMoment => "exact-moments",
            Method::ExactConvolution { .. } => "exact-convolution",
            Method::MergedConvolution { .. } => "merged-convolution",
            Method::MonteCarlo { .. } => "monte-carlo",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::EvenMoment => write!(f, "exact-moments"),
            Method::ExactConvolution { atoms } => write!(f, "exact-convolution(atoms={atoms})"),
            Method::MergedConvolution {
                atoms,
                moment_error_bound,
            } => write!(
                f,
                "merged-convolution(atoms={atoms},moment_err<={moment_error_bound:.3e})"
            ),
            Method::MonteCarlo {
                seed,
                samples,
                rel_stderr,
            } => write!(
                f,
                "monte-carlo(seed={seed},samples={samples},rel_stderr={rel_stderr:.3e})"
            ),
        }
    }
}

/// Forces the engine down one path; used by tests and diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ForcedPath {
    EvenMoment,
    ExactConvolution,
    MergedConvolution,
    MonteCarlo,
}

/// Knobs of the sum-norm engine.
#[derive(Clone, Copy, Debug)]
pub struct EngineConfig {
    /// Maximum product-state count for the exact convolution path.
    pub exact_budget: u64,
    /// Merge tolerance for the merged path; `None` derives 1e-12 x atom range.
    pub merge_tol: Option<f64>,
    /// Intermediate atom cap for the merged path before falling back to MC.
    pub merged_max_atoms: usize,
    /// Monte Carlo sample count.
    pub mc_samples: u64,
    /// Base seed; per-call substreams are derived from it and the arguments.
    pub mc_seed: u64,
    /// Allow the exact even-integer-p moment recursion.
    pub even_shortcut: bool,
    pub force: Option<ForcedPath>,
}

pub const DEFAULT_EXACT_BUDGET: u64 = 2_000_000;
pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_MC_SEED: u64 = 0x5eed_ba5e_d00d_0001;

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            exact_budget: DEFAULT_EXACT_BUDGET,
            merge_tol: None,
            merged_max_atoms: DEFAULT_EXACT_BUDGET as usize,
            mc_samples: DEFAULT_MC_SAMPLES,
            mc_seed: DEFAULT_MC_SEED,
            even_shortcut: true,
            force: None,
        }
    }
}

/// Result of [`rademacher_sum_norm`].
#[derive(Clone, Copy, Debug)]
pub struct SumNormOutcome {
    /// (E|Σ a_n S_n|^p)^(1/p), the L^p([0,1]) norm of the sign sum.
    pub norm: LogNum,
    /// The underlying p-th moment E|Σ a_n S_n|^p.
    pub moment: LogNum,
    pub method: Method,
}

fn substream_seed(groups: &[WeightedLevelGroup], p: f64, base: u64) -> u64 {
    let mut sorted: Vec<_> = groups.to_vec();
    sorted.sort_by(|a, b| {
        a.coefficient
            .total_cmp(&b.coefficient)
            .then(a.count.cmp(&b.count))
    });
    let mut h = Fnv1a::new();
    h.write_u64(base);
    h.write_f64(p);
    for g in &sorted {
        h.write_f64(g.coefficient);
        h.write_u64(g.count);
    }
    h.finish()
}

/// Exact E S^(2q) for S = Σ a_n (m_n - 2 B_n) via the moment recursion for
/// independent symmetric summands: only even moments survive, and
/// E(X+Y)^(2t) = Σ C(2t,2i) EX^(2i) EY^(2t-2i).
pub fn even_moment(groups: &[WeightedLevelGroup], q: u32) -> LogNum {
    // moments[i] = E T^(2i) of the partial sum T.
    let mut moments: Vec<LogNum> = vec![LogNum::ZERO; q as usize + 1];
    moments[0] = LogNum::ONE;

    for g in groups {
        if g.count == 0 || g.coefficient == 0.0 {
            continue;
        }
        let group = group_even_moments(g, q);
        // Binomial coefficients over even split points: C(2t, 2i).
        let mut next: Vec<LogNum> = vec![LogNum::ZERO; q as usize + 1];
        for t in 0..=q as usize {
            let mut acc = LogNum::ZERO;
            for i in 0..=t {
                let c = binomial_f64(2 * t as u64, 2 * i as u64);
                acc += LogNum::from_f64(c) * moments[i] * group[t - i];
            }
            next[t] = acc;
        }
        moments = next;
    }
    moments[q as usize]
}

/// Even moments E X^(2i), i = 0..=q, of one group X = a (m - 2B).
fn group_even_moments(g: &WeightedLevelGroup, q: u32) -> Vec<LogNum> {
    let m = g.count;
    let a = g.coefficient.abs();
    let top_log2 = 2.0 * q as f64 * (a * m as f64).max(f64::MIN_POSITIVE).log2();
    let use_log = top_log2 > 500.0 || top_log2 < -500.0;

    let mut log_pmf = Vec::with_capacity(m as usize + 1);
    let mut lp = -(m as f64) * std::f64::consts::LN_2;
    log_pmf.push(lp);
    for b in 0..m {
        lp += ((m - b) as f64).ln() - ((b + 1) as f64).ln();
        log_pmf.push(lp);
    }

    let mut result = Vec::with_capacity(q as usize + 1);
    for i in 0..=q {
        if i == 0 {
            result.push(LogNum::ONE);
            continue;
        }
        let e = 2 * i;
        if use_log {
            let mut acc = LogNum::ZERO;
            for b in 0..=m {
                let v = a * (m as f64 - 2.0 * b as f64);
                if v != 0.0 {
                    acc += LogNum::from_log2(
                        log_pmf[b as usize] / std::f64::consts::LN_2
                            + e as f64 * v.abs().log2(),
                    );
                }
            }
            result.push(acc);
        } else {
            let mut acc = KahanSum::new();
            for b in 0..=m {
                let v = a * (m as f64 - 2.0 * b as f64);
                acc.add(log_pmf[b as usize].exp() * v.powi(e as i32));
            }
            result.push(LogNum::from_f64(acc.value().max(0.0)));
        }
    }
    result
}

fn binomial_f64(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0f64;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Exact convolution of all groups (merge tolerance 0).
pub fn convolve_groups(groups: &[WeightedLevelGroup], merge_tol: f64) -> SignSumDistribution {
    let mut dists: Vec<SignSumDistribution> = groups
        .iter()
        .filter(|g| g.count > 0 && g.coefficient != 0.0)
        .map(group_distribution)
        .collect();
    dists.sort_by_key(|d| d.atoms.len());
    let mut acc = SignSumDistribution::point_mass();
    for d in dists {
        acc = convolve(&acc, &d, merge_tol);
    }
    acc
}

fn merged_convolution(
    groups: &[WeightedLevelGroup],
    p: f64,
    cfg: &EngineConfig,
) -> Option<(MomentEstimate, usize)> {
    let full_range: f64 = 2.0
        * groups
            .iter()
            .map(|g| g.coefficient.abs() * g.count as f64)
            .sum::<f64>();
    let tol = cfg.merge_tol.unwrap_or(1e-12 * full_range);
    let mut dists: Vec<SignSumDistribution> = groups
        .iter()
        .filter(|g| g.count > 0 && g.coefficient != 0.0)
        .map(group_distribution)
        .collect();
    dists.sort_by_key(|d| d.atoms.len());
    let mut acc = SignSumDistribution::point_mass();
    for d in dists {
        if acc.atoms.len().saturating_mul(d.atoms.len()) > cfg.merged_max_atoms.saturating_mul(64)
        {
            return None; // intermediate product too large to materialize
        }
        acc = convolve(&acc, &d, tol);
        if acc.atoms.len() > cfg.merged_max_atoms {
            return None;
        }
    }
    let est = absolute_moment(&acc, p).ok()?;
    Some((est, acc.atoms.len()))
}

fn monte_carlo_moment(
    groups: &[WeightedLevelGroup],
    p: f64,
    cfg: &EngineConfig,
) -> (LogNum, u64, f64) {
    let seed = substream_seed(groups, p, cfg.mc_seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Sample in canonical group order so the draw sequence (and therefore the
    // result) does not depend on how the caller happened to order the groups.
    let mut sorted: Vec<WeightedLevelGroup> = groups
        .iter()
        .filter(|g| g.count > 0 && g.coefficient != 0.0)
        .copied()
        .collect();
    sorted.sort_by(|a, b| {
        a.coefficient
            .total_cmp(&b.coefficient)
            .then(a.count.cmp(&b.count))
    });
    let active: Vec<(f64, u64, Binomial)> = sorted
        .iter()
        .map(|g| {
            (
                g.coefficient,
                g.count,
                Binomial::new(g.count, 0.5).expect("binomial parameters"),
            )
        })
        .collect();
    let scale: f64 = active.iter().map(|(a, m, _)| a.abs() * *m as f64).sum();
    if scale == 0.0 {
        return (LogNum::ZERO, cfg.mc_samples, 0.0);
    }
    // Accumulate (|S|/scale)^p <= 1 to keep powers in range; Welford for the
    // standard error.
    let n = cfg.mc_samples.max(1);
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    for i in 0..n {
        let mut s = 0.0f64;
        for (a, m, bin) in &active {
            let b = bin.sample(&mut rng) as f64;
            s += a * (*m as f64 - 2.0 * b);
        }
        let z = (s.abs() / scale).powf(p);
        let delta = z - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (z - mean);
    }
    let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    let stderr = (var / n as f64).sqrt();
    let rel_stderr = if mean > 0.0 { stderr / mean } else { 0.0 };
    let moment = LogNum::from_f64(mean) * LogNum::from_f64(scale).powf(p);
    (moment, n, rel_stderr)
}

/// L^p([0,1]) norm of Σ over groups of a_n · (sign sum of count_n terms).
///
/// An exact path is used whenever affordable: the even-moment recursion for
/// even integer p, or full convolution when the product state count fits the
/// budget. Otherwise the engine merges atoms under a tracked error bound, and
/// as a last resort samples with a recorded, argument-derived seed so results
/// are reproducible regardless of call order.
pub fn rademacher_sum_norm(
    groups: &[WeightedLevelGroup],
    p: f64,
    cfg: &EngineConfig,
) -> Result<SumNormOutcome> {
    if p < 1.0 {
        return Err(Error::ExponentTooSmall { p, min: 1.0 });
    }
    let active: Vec<WeightedLevelGroup> = groups
        .iter()
        .filter(|g| g.count > 0 && g.coefficient != 0.0)
        .copied()
        .collect();
    if active.is_empty() {
        return Ok(SumNormOutcome {
            norm: LogNum::ZERO,
            moment: LogNum::ZERO,
            method: Method::ExactConvolution { atoms: 1 },
        });
    }

    let is_even = p.fract() == 0.0 && (p as u64) % 2 == 0 && p <= 64.0;
    let state_count: u128 = active
        .iter()
        .map(|g| g.count as u128 + 1)
        .try_fold(1u128, |acc, c| acc.checked_mul(c))
        .unwrap_or(u128::MAX);

    let path = match cfg.force {
        Some(f) => f,
        None => {
            if cfg.even_shortcut && is_even {
                ForcedPath::EvenMoment
            } else if state_count <= cfg.exact_budget as u128 {
                ForcedPath::ExactConvolution
            } else {
                ForcedPath::MergedConvolution // falls through to MC on blowup
            }
        }
    };

    match path {
        ForcedPath::EvenMoment => {
            assert!(is_even, "even-moment path requires an even integer p");
            let moment = even_moment(&active, (p as u32) / 2);
            Ok(SumNormOutcome {
                norm: moment.powf(1.0 / p),
                moment,
                method: Method::EvenMoment,
            })
        }
        ForcedPath::ExactConvolution => {
            let dist = convolve_groups(&active, 0.0);
            let est = absolute_moment(&dist, p)?;
            Ok(SumNormOutcome {
                norm: est.value.powf(1.0 / p),
                moment: est.value,
                method: Method::ExactConvolution {
                    atoms: dist.atoms.len(),
                },
            })
        }
        ForcedPath::MergedConvolution => match merged_convolution(&active, p, cfg) {
            Some((est, atoms)) => Ok(SumNormOutcome {
                norm: est.value.powf(1.0 / p),
                moment: est.value,
                method: Method::MergedConvolution {
                    atoms,
                    moment_error_bound: est.abs_error_bound,
                },
            }),
            None => {
                let (moment, samples, rel_stderr) = monte_carlo_moment(&active, p, cfg);
                Ok(SumNormOutcome {
                    norm: moment.powf(1.0 / p),
                    moment,
                    method: Method::MonteCarlo {
                        seed: substream_seed(&active, p, cfg.mc_seed),
                        samples,
                        rel_stderr,
                    },
                })
            }
        },
        ForcedPath::MonteCarlo => {
            let (moment, samples, rel_stderr) = monte_carlo_moment(&active, p, cfg);
            Ok(SumNormOutcome {
                norm: moment.powf(1.0 / p),
                moment,
                method: Method::MonteCarlo {
                    seed: substream_seed(&active, p, cfg.mc_seed),
                    samples,
                    rel_stderr,
                },
            })
        }
    }
}
