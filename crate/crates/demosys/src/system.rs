//! The orthonormal family itself.
//!
//! Each member is a scaled dyadic step on the left half of [-1,1] glued to a
//! scaled Rademacher function on the right half:
//!
//!   f_k = sqrt(1 - 2^(-n/l)) * 2^n * 1_{support}   on [-1, 0),
//!   f_k = 2^(-n/(2l)) * r_k                        on [0, 1],
//!
//! where n is the level of k. Left supports are pairwise disjoint and right
//! factors are independent signs, so every L^p norm of a finite span splits
//! into an exact disjoint-support sum plus an absolute moment of a weighted
//! sign sum. This module provides pointwise evaluation, the closed-form
//! single-function norm, exact norms of finite combinations, inner products,
//! and the per-index norm-product diagnostic ||f_k||_p * ||f_k||_p'.

use crate::error::{Error, Result};
use crate::indexing::{support_interval, to_flat, to_level, FlatIndex, LevelPosition};
use crate::logdomain::LogNum;
use crate::precision;
use crate::rademacher::{rademacher_eval, EngineConfig, Method, WeightedLevelGroup};
use dashmap::DashMap;
use serde::{Deserialize, Serialize};

/// Shape parameter and working precision of the family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    l: f64,
    precision_bits: u32,
}

pub const DEFAULT_PRECISION_BITS: u32 = 53;

impl SystemParams {
    pub fn new(l: f64) -> Result<Self> {
        Self::with_precision(l, DEFAULT_PRECISION_BITS)
    }

    pub fn with_precision(l: f64, precision_bits: u32) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidShape(l));
        }
        if precision_bits < 24 {
            return Err(Error::PrecisionTooLow(precision_bits));
        }
        Ok(SystemParams { l, precision_bits })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }
}

/// A norm exponent p in [1, 64]; the cap keeps p-th powers well-conditioned.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormExponent {
    p: f64,
}

impl NormExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !(1.0..=64.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidExponent(p));
        }
        Ok(NormExponent { p })
    }

    pub fn get(&self) -> f64 {
        self.p
    }

    /// Conjugate exponent p' = p/(p-1); requires p > 1 and p' within the cap.
    pub fn conjugate(&self) -> Result<NormExponent> {
        if self.p <= 1.0 {
            return Err(Error::ExponentTooSmall {
                p: self.p,
                min: 1.0,
            });
        }
        NormExponent::new(self.p / (self.p - 1.0))
    }
}

/// Pointwise value of f_k at x in [-1, 1].
pub fn eval_f(k: FlatIndex, x: f64, params: &SystemParams) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain {
            name: "x",
            value: x,
            lo: -1.0,
            hi: 1.0,
        });
    }
    let pos = to_level(k)?;
    let n = pos.level;
    if x < 0.0 {
        let support = support_interval(pos);
        if support.contains(x) {
            let weight = (1.0 - (-(n as f64) / params.l).exp2()).sqrt();
            Ok(weight * (n as f64).exp2())
        } else {
            Ok(0.0)
        }
    } else {
        let sign = rademacher_eval(k, x)? as f64;
        Ok((-(n as f64) / (2.0 * params.l)).exp2() * sign)
    }
}

/// log2 of the p-th power of the single-function norm,
/// 2^(n(p-2)) (1 - 2^(-n/l))^(p/2) + 2^(-np/(2l)).
fn single_norm_pth_power_log2(n: u32, params: &SystemParams, p: f64) -> f64 {
    if params.precision_bits > 53 {
        return precision::single_norm_pth_power_log2(n, params.l, p, params.precision_bits);
    }
    let nf = n as f64;
    let l = params.l;
    // log2(1 - 2^(-n/l)) through ln_1p for accuracy near 0.
    let log2_base = (-(-nf / l).exp2()).ln_1p() / std::f64::consts::LN_2;
    let t1 = nf * (p - 2.0) + (p / 2.0) * log2_base;
    let t2 = -nf * p / (2.0 * l);
    (LogNum::from_log2(t1) + LogNum::from_log2(t2)).log2()
}

/// |c_{n,l}|: the L^p[-1,1] norm shared by every member of level n.
pub fn single_norm(n: u32, params: &SystemParams, p: NormExponent) -> LogNum {
    LogNum::from_log2(single_norm_pth_power_log2(n, params, p.get()) / p.get())
}

/// Memoizing cache of single-function norms, keyed by level, shape, exponent
/// and precision. Concurrent population is idempotent (identical values), so
/// last-write-wins is safe.
#[derive(Debug, Default)]
pub struct NormTable {
    cache: DashMap<(u32, u64, u64, u32), f64>,
}

impl NormTable {
    pub fn new() -> Self {
        NormTable::default()
    }

    /// |c_{n,l}| in L^p.
    pub fn c(&self, n: u32, params: &SystemParams, p: NormExponent) -> LogNum {
        let key = (n, params.l.to_bits(), p.get().to_bits(), params.precision_bits);
        if let Some(v) = self.cache.get(&key) {
            return LogNum::from_log2(*v);
        }
        let v = single_norm(n, params, p);
        self.cache.insert(key, v.log2());
        v
    }

    /// |b_{k,l}|: the same value addressed by flat index.
    pub fn b(&self, k: FlatIndex, params: &SystemParams, p: NormExponent) -> Result<LogNum> {
        let pos = to_level(k)?;
        Ok(self.c(pos.level, params, p))
    }

    pub fn len(&self) -> usize {
        self.cache.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cache.is_empty()
    }
}

/// A finite linear combination Σ c_k f_k with distinct indices.
#[derive(Clone, Debug)]
pub struct Combination {
    terms: Vec<(FlatIndex, f64)>,
}

impl Combination {
    pub fn new(terms: Vec<(FlatIndex, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyCombination);
        }
        let mut seen = std::collections::HashSet::new();
        for (k, _) in &terms {
            if k.0 == 0 {
                return Err(Error::ZeroFlatIndex);
            }
            if !seen.insert(k.0) {
                return Err(Error::DuplicateIndex(k.0));
            }
        }
        Ok(Combination { terms })
    }

    /// Builds a combination from per-level groups (n, count, coeff), assigning
    /// explicit positions left to right. By exchangeability the norm does not
    /// depend on which positions are chosen.
    pub fn from_groups(groups: &[(u32, u64, f64)]) -> Result<Self> {
        let mut used: std::collections::HashMap<u32, u64> = std::collections::HashMap::new();
        let mut terms = Vec::new();
        for &(n, count, coeff) in groups {
            let start = used.entry(n).or_insert(0);
            let capacity = 1u64
                .checked_shl(n)
                .ok_or(Error::LevelOutOfRange(n))?;
            if *start + count > capacity {
                return Err(Error::ProfileOverCapacity {
                    n,
                    count: *start + count,
                });
            }
            for j in *start + 1..=*start + count {
                terms.push((to_flat(LevelPosition::new(n, j)?), coeff));
            }
            *start += count;
        }
        Combination::new(terms)
    }

    pub fn terms(&self) -> &[(FlatIndex, f64)] {
        &self.terms
    }

    /// Groups terms by (level, coefficient value); the sufficient statistic
    /// for every norm here.
    pub fn level_groups(&self) -> Result<Vec<(u32, f64, u64)>> {
        let mut map: std::collections::BTreeMap<(u32, u64), u64> = std::collections::BTreeMap::new();
        for (k, c) in &self.terms {
            let n = to_level(*k)?.level;
            let c = if *c == 0.0 { 0.0 } else { *c };
            *map.entry((n, c.to_bits())).or_insert(0) += 1;
        }
        Ok(map
            .into_iter()
            .map(|((n, cbits), count)| (n, f64::from_bits(cbits), count))
            .collect())
    }
}

/// Outcome of a combination norm: the value plus the engine path that
/// produced the right-half moment.
#[derive(Clone, Copy, Debug)]
pub struct CombinationNorm {
    pub norm: LogNum,
    pub method: Method,
}

/// Exact L^p[-1,1] norm of Σ c_k f_k.
///
/// Left half: disjoint supports make the integral a plain sum,
/// Σ |c_k|^p (1-2^(-n/l))^(p/2) 2^(n(p-2)). Right half: the p-th absolute
/// moment of the weighted Rademacher sum with weights c_k 2^(-n/(2l)).
pub fn combination_norm(
    comb: &Combination,
    params: &SystemParams,
    p: NormExponent,
    engine: &EngineConfig,
) -> Result<CombinationNorm> {
    let pv = p.get();
    let l = params.l;
    let mut left = LogNum::ZERO;
    for (k, c) in comb.terms() {
        if *c == 0.0 {
            continue;
        }
        let n = to_level(*k)?.level as f64;
        let log2_base = (-(-n / l).exp2()).ln_1p() / std::f64::consts::LN_2;
        left += LogNum::from_log2(
            pv * c.abs().log2() + (pv / 2.0) * log2_base + n * (pv - 2.0),
        );
    }
    let groups: Vec<WeightedLevelGroup> = comb
        .level_groups()?
        .into_iter()
        .map(|(n, c, count)| {
            WeightedLevelGroup::new(c * (-(n as f64) / (2.0 * l)).exp2(), count)
        })
        .collect();
    let right = crate::rademacher::rademacher_sum_norm(&groups, pv, engine)?;
    Ok(CombinationNorm {
        norm: (left + right.moment).powf(1.0 / pv),
        method: right.method,
    })
}

/// Closed-form inner product <f_k, f_m> on [-1,1].
///
/// Identical indices contribute left mass (1 - 2^(-n/l)) plus right mass
/// 2^(-n/l); distinct indices have disjoint left supports and orthogonal
/// Rademacher factors.
pub fn inner_product(k: FlatIndex, m: FlatIndex, _params: &SystemParams) -> Result<f64> {
    to_level(k)?;
    to_level(m)?;
    Ok(if k == m { 1.0 } else { 0.0 })
}

/// ||f_k||_p * ||f_k||_p' under the L^2 pairing; bounded over k exactly when
/// the pair is bidemocratic, so its growth in the level is the computable
/// non-bidemocracy certificate.
pub fn norm_product(k: FlatIndex, params: &SystemParams, p: NormExponent) -> Result<LogNum> {
    let q = p.conjugate()?;
    let n = to_level(k)?.level;
    Ok(single_norm(n, params, p) * single_norm(n, params, q))
}

// ---------------------------------------------------------------------------
// JSON schema for combination specs
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermSpec {
    pub n: u32,
    pub j: u64,
    pub coeff: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupSpec {
    pub n: u32,
    pub count: u64,
    pub coeff: f64,
}

/// On-disk combination format: either explicit terms or per-level groups.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CombinationSpec {
    pub l: f64,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<GroupSpec>,
}

impl CombinationSpec {
    pub fn to_combination(&self) -> Result<Combination> {
        match (self.terms.is_empty(), self.groups.is_empty()) {
            (false, true) => {
                let mut terms = Vec::with_capacity(self.terms.len());
                for t in &self.terms {
                    terms.push((to_flat(LevelPosition::new(t.n, t.j)?), t.coeff));
                }
                Combination::new(terms)
            }
            (true, false) => {
                let groups: Vec<(u32, u64, f64)> =
                    self.groups.iter().map(|g| (g.n, g.count, g.coeff)).collect();
                Combination::from_groups(&groups)
            }
            _ => Err(Error::EmptyCombination),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indexing::level_boundary;
    use crate::oracle;
    use proptest::prelude::*;

    fn params(l: f64) -> SystemParams {
        SystemParams::new(l).unwrap()
    }

    fn p(v: f64) -> NormExponent {
        NormExponent::new(v).unwrap()
    }

    #[test]
    fn param_validation() {
        assert!(SystemParams::new(0.0).is_err());
        assert!(SystemParams::new(-1.0).is_err());
        assert!(SystemParams::new(f64::NAN).is_err());
        assert!(SystemParams::with_precision(1.0, 16).is_err());
        assert!(NormExponent::new(0.5).is_err());
        assert!(NormExponent::new(65.0).is_err());
        assert!(NormExponent::new(1.0).unwrap().conjugate().is_err());
        let q = p(4.0).conjugate().unwrap();
        assert!((q.get() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn eval_examples() {
        let pr = params(1.0);
        let v = eval_f(FlatIndex(1), -0.9, &pr).unwrap();
        assert!((v - 0.5f64.sqrt() * 2.0).abs() < 1e-12);
        assert_eq!(eval_f(FlatIndex(1), -0.6, &pr).unwrap(), 0.0);
        let v = eval_f(FlatIndex(1), 0.3, &pr).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(eval_f(FlatIndex(1), 1.2, &pr).is_err());
        // x = -1 lies outside every left-open support interval.
        assert_eq!(eval_f(FlatIndex(1), -1.0, &pr).unwrap(), 0.0);
    }

    #[test]
    fn single_norm_examples() {
        assert!((single_norm(1, &params(1.0), p(2.0)).to_f64() - 1.0).abs() < 1e-12);
        let v = single_norm(1, &params(1.0), p(4.0)).to_f64();
        assert!((v - 1.057_371_263_440_564_1).abs() < 1e-12);
        let v = single_norm(2, &params(1.0), p(4.0)).to_f64();
        assert!((v - 1.735_050_040_978_090_6).abs() < 1e-12);
    }

    #[test]
    fn single_norm_matches_quadrature_grid() {
        for l in [0.5, 1.0, 2.0] {
            let pr = params(l);
            for n in 1..=6u32 {
                for pe in [1.0, 1.5, 2.0, 2.5, 4.0, 7.0] {
                    let fast = single_norm(n, &pr, p(pe)).to_f64();
                    let slow = oracle::single_norm_by_quadrature(n, &pr, pe).unwrap();
                    let rel = (fast - slow).abs() / slow;
                    assert!(rel < 1e-10, "n={n} l={l} p={pe}: {fast} vs {slow}");
                }
            }
        }
    }

    #[test]
    fn single_norm_deep_levels_stay_finite() {
        // Levels around 1000 must remain queryable through the log branch.
        let v = single_norm(1000, &params(1.0), p(4.0));
        assert!((v.log2() - 500.0).abs() < 0.01); // 2^(n(p-2)/p) dominates
        let v = single_norm(600, &params(4.0), p(64.0));
        assert!(v.log2().is_finite());
    }

    #[test]
    fn high_precision_path_agrees_with_f64() {
        let hp = SystemParams::with_precision(1.0, 256).unwrap();
        for n in [1u32, 2, 7, 40] {
            let a = single_norm(n, &params(1.0), p(4.0)).log2();
            let b = single_norm(n, &hp, p(4.0)).log2();
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn combination_single_term_consistency() {
        let engine = EngineConfig::default();
        for l in [0.5, 1.0, 2.0] {
            let pr = params(l);
            for n in 1..=5u32 {
                let k = to_flat(LevelPosition::new(n, 1).unwrap());
                let comb = Combination::new(vec![(k, 1.0)]).unwrap();
                for pe in [1.5, 2.0, 4.0] {
                    let c = combination_norm(&comb, &pr, p(pe), &engine).unwrap();
                    let s = single_norm(n, &pr, p(pe));
                    assert!((c.norm.log2() - s.log2()).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn combination_examples() {
        let engine = EngineConfig::default();
        let pr = params(1.0);
        // Orthonormal pair at p = 2.
        let comb = Combination::new(vec![(FlatIndex(1), 1.0), (FlatIndex(2), 1.0)]).unwrap();
        let v = combination_norm(&comb, &pr, p(2.0), &engine).unwrap();
        assert!((v.norm.to_f64() - 2.0f64.sqrt()).abs() < 1e-12);
        // Normalized level-1 pair at p = 4: norm^4 = 3.2.
        let c11 = single_norm(1, &pr, p(4.0)).to_f64();
        let comb =
            Combination::new(vec![(FlatIndex(1), 1.0 / c11), (FlatIndex(2), 1.0 / c11)]).unwrap();
        let v = combination_norm(&comb, &pr, p(4.0), &engine).unwrap();
        assert!((v.norm.to_f64() - 1.337_480_609_952_844).abs() < 1e-12);
    }

    #[test]
    fn combination_rejects_duplicates_and_empty() {
        assert!(matches!(
            Combination::new(vec![(FlatIndex(3), 1.0), (FlatIndex(3), 2.0)]),
            Err(Error::DuplicateIndex(3))
        ));
        assert!(matches!(
            Combination::new(vec![]),
            Err(Error::EmptyCombination)
        ));
        assert!(Combination::from_groups(&[(2, 5, 1.0)]).is_err()); // 5 > 2^2
    }

    #[test]
    fn inner_product_examples() {
        let pr = params(1.0);
        assert_eq!(inner_product(FlatIndex(1), FlatIndex(1), &pr).unwrap(), 1.0);
        assert_eq!(inner_product(FlatIndex(1), FlatIndex(2), &pr).unwrap(), 0.0);
        let pr2 = params(2.0);
        assert_eq!(inner_product(FlatIndex(1), FlatIndex(7), &pr2).unwrap(), 0.0);
    }

    #[test]
    fn orthonormality_against_quadrature() {
        for l in [0.5, 1.0, 2.0, 4.0] {
            let pr = params(l);
            for a in 1u64..=12 {
                for b in a..=12 {
                    let fast = inner_product(FlatIndex(a), FlatIndex(b), &pr).unwrap();
                    let slow =
                        oracle::inner_product_by_quadrature(FlatIndex(a), FlatIndex(b), &pr)
                            .unwrap();
                    assert!((fast - slow).abs() < 1e-10, "l={l} ({a},{b}): {fast} vs {slow}");
                }
            }
        }
    }

    #[test]
    fn norm_product_examples() {
        let pr = params(1.0);
        for k in [1u64, 5, 30, 200] {
            let v = norm_product(FlatIndex(k), &pr, p(2.0)).unwrap().to_f64();
            assert!((v - 1.0).abs() < 1e-12);
        }
        let v = norm_product(FlatIndex(1), &pr, p(4.0)).unwrap().to_f64();
        assert!((v - 1.078_562_509_760_167).abs() < 1e-12);
        assert!(norm_product(FlatIndex(1), &pr, p(1.0)).is_err());
    }

    #[test]
    fn norm_product_grows_past_dual_boundary() {
        // For l > p/(2(p-2)) the per-index product grows without bound in the
        // level; check monotone growth along n = 5, 10, 20, 40.
        let pr = params(4.0);
        let mut last = f64::NEG_INFINITY;
        for n in [5u32, 10, 20, 40] {
            let k = level_boundary(n - 1).0 + 1;
            let v = norm_product(FlatIndex(k), &pr, p(4.0)).unwrap().log2();
            assert!(v > last, "product not increasing at n={n}");
            last = v;
        }
        assert!(last > 10.0);
    }

    #[test]
    fn norm_table_is_consistent() {
        let table = NormTable::new();
        let pr = params(2.0);
        for k in 1u64..=62 {
            let b = table.b(FlatIndex(k), &pr, p(4.0)).unwrap();
            let n = to_level(FlatIndex(k)).unwrap().level;
            let c = table.c(n, &pr, p(4.0));
            assert_eq!(b.log2(), c.log2());
        }
        assert_eq!(table.len(), 5); // levels 1..=5 cover k <= 62
    }

    #[test]
    fn spec_json_both_forms() {
        let spec: CombinationSpec = serde_json::from_str(
            r#"{"l": 1.0, "p": 4.0, "terms": [{"n": 1, "j": 1, "coeff": 0.5}, {"n": 2, "j": 3, "coeff": -1.0}]}"#,
        )
        .unwrap();
        let comb = spec.to_combination().unwrap();
        assert_eq!(comb.terms().len(), 2);

        let spec: CombinationSpec = serde_json::from_str(
            r#"{"l": 1.0, "p": 4.0, "groups": [{"n": 3, "count": 5, "coeff": 1.0}]}"#,
        )
        .unwrap();
        let comb = spec.to_combination().unwrap();
        assert_eq!(comb.terms().len(), 5);
        assert_eq!(comb.level_groups().unwrap(), vec![(3, 1.0, 5)]);

        let bad: CombinationSpec =
            serde_json::from_str(r#"{"l": 1.0, "p": 4.0}"#).unwrap();
        assert!(bad.to_combination().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn combination_norm_matches_quadrature(
            picks in proptest::collection::vec((1u64..=30, -1.5f64..1.5), 1..7),
            pe in 1.0f64..7.0,
            l in 0.5f64..3.0,
        ) {
            let mut seen = std::collections::HashSet::new();
            let terms: Vec<(FlatIndex, f64)> = picks
                .into_iter()
                .filter(|(k, _)| seen.insert(*k))
                .map(|(k, c)| (FlatIndex(k), c))
                .collect();
            prop_assume!(!terms.is_empty());
            prop_assume!(terms.iter().any(|(_, c)| *c != 0.0));
            let pr = params(l);
            let comb = Combination::new(terms).unwrap();
            let engine = EngineConfig::default();
            let fast = combination_norm(&comb, &pr, p(pe), &engine).unwrap().norm.to_f64();
            let slow = oracle::combination_norm_by_quadrature(&comb, &pr, pe).unwrap();
            let rel = (fast - slow).abs() / slow.max(1e-30);
            prop_assert!(rel < 1e-10, "p={pe} l={l}: {fast} vs {slow}");
        }

        #[test]
        fn positions_never_change_the_norm(
            n in 2u32..6,
            offset in 0u64..4,
            c1 in 0.2f64..1.4,
            pe in 1.0f64..6.0,
        ) {
            // Exchangeability: the same level profile at shifted positions.
            let offset = offset % ((1u64 << n) - 1);
            let pr = params(1.0);
            let engine = EngineConfig::default();
            let a = Combination::new(vec![
                (to_flat(LevelPosition::new(n, 1).unwrap()), c1),
                (to_flat(LevelPosition::new(n, 2).unwrap()), c1),
            ]).unwrap();
            let b = Combination::new(vec![
                (to_flat(LevelPosition::new(n, 1 + offset).unwrap()), c1),
                (to_flat(LevelPosition::new(n, 2 + offset).unwrap()), c1),
            ]).unwrap();
            let va = combination_norm(&a, &pr, p(pe), &engine).unwrap().norm.to_f64();
            let vb = combination_norm(&b, &pr, p(pe), &engine).unwrap().norm.to_f64();
            prop_assert!((va - vb).abs() < 1e-12 * va.max(1.0));
        }
    }
}
