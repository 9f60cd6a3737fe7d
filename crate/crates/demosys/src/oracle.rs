//! Brute-force reference implementations.
//!
//! Everything here recomputes quantities from the pointwise definition of the
//! system: piecewise integration against `eval_f` on the left half, full sign
//! enumeration or dyadic-grid summation on the right half. None of it touches
//! the closed-form norm formulas or the convolution engine, so these routines
//! serve as independent oracles for the fast paths. They are exponential-cost
//! by design and guarded accordingly.

use crate::error::Result;
use crate::indexing::{support_interval, to_level, FlatIndex};
use crate::rademacher::WeightedLevelGroup;
use crate::system::{eval_f, Combination, SystemParams};
use crate::util::KahanSum;

/// E|Σ ε_i a_i|^p by enumerating all 2^n sign vectors.
pub fn sign_moment_by_enumeration(coeffs: &[f64], p: f64) -> f64 {
    let n = coeffs.len();
    assert!(n <= 24, "sign enumeration limited to 24 terms, got {n}");
    if n == 0 {
        return 0.0;
    }
    let mut acc = KahanSum::new();
    for mask in 0u64..(1u64 << n) {
        let mut s = 0.0;
        for (i, a) in coeffs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s += a;
            } else {
                s -= a;
            }
        }
        acc.add(s.abs().powf(p));
    }
    acc.value() / (1u64 << n) as f64
}

/// Expands level groups into one coefficient per index.
pub fn expand_groups(groups: &[WeightedLevelGroup]) -> Vec<f64> {
    let mut out = Vec::new();
    for g in groups {
        for _ in 0..g.count {
            out.push(g.coefficient);
        }
    }
    out
}

/// L^p[-1,1] norm of a combination, straight from the definition: exact
/// piecewise integration on [-1,0) (the integrand is constant between
/// support-interval endpoints) plus 2^|A| sign enumeration on [0,1].
pub fn combination_norm_by_quadrature(
    comb: &Combination,
    params: &SystemParams,
    p: f64,
) -> Result<f64> {
    // Left half: breakpoints are the support endpoints of every term.
    let mut cuts: Vec<f64> = vec![-1.0, 0.0];
    for (k, _) in comb.terms() {
        let d = support_interval(to_level(*k)?);
        cuts.push(d.left());
        cuts.push(d.right());
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut left = KahanSum::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let mut v = 0.0;
        for (k, c) in comb.terms() {
            v += c * eval_f(*k, mid, params)?;
        }
        left.add((b - a) * v.abs().powf(p));
    }

    // Right half: weights c_k 2^(-n_k/(2l)) over independent signs.
    let mut weights = Vec::with_capacity(comb.terms().len());
    for (k, c) in comb.terms() {
        let n = to_level(*k)?.level as f64;
        weights.push(c * (-n / (2.0 * params.l())).exp2());
    }
    let right = sign_moment_by_enumeration(&weights, p);

    Ok((left.value() + right).powf(1.0 / p))
}

/// Single-function norm from the definition (a one-term combination).
pub fn single_norm_by_quadrature(n: u32, params: &SystemParams, p: f64) -> Result<f64> {
    let k = crate::indexing::to_flat(crate::indexing::LevelPosition::new(n, 1)?);
    let comb = Combination::new(vec![(k, 1.0)])?;
    combination_norm_by_quadrature(&comb, params, p)
}

/// <f_k, f_m> from the definition, with both halves evaluated through
/// `eval_f` on exact grids. The right half uses the dyadic grid of mesh
/// 2^(-K), K = max(k, m), on which both Rademacher factors are constant,
/// so the midpoint sum is the exact integral. Cost is O(2^K): keep K small.
pub fn inner_product_by_quadrature(k: FlatIndex, m: FlatIndex, params: &SystemParams) -> Result<f64> {
    assert!(k.0.max(m.0) <= 20, "eval-grid oracle limited to index 20");
    let left = left_inner_integral(k, m, params)?;
    let kk = k.0.max(m.0) as u32;
    let cells = 1u64 << kk;
    let mesh = (-(kk as f64)).exp2();
    let mut right = KahanSum::new();
    for i in 0..cells {
        let t = (i as f64 + 0.5) * mesh;
        right.add(eval_f(k, t, params)? * eval_f(m, t, params)? * mesh);
    }
    Ok(left + right.value())
}

/// <f_k, f_m> with the right half reduced to an exact integer sum over the
/// dyadic grid: the sign of r_k on cell i is the parity of i >> (K - k).
/// Handles indices up to 30 in about a second; the signed cell count is exact
/// integer arithmetic.
pub fn inner_product_by_bit_grid(k: FlatIndex, m: FlatIndex, params: &SystemParams) -> Result<f64> {
    assert!(k.0.max(m.0) <= 30, "bit-grid oracle limited to index 30");
    let left = left_inner_integral(k, m, params)?;
    let kk = k.0.max(m.0) as u32;
    let cells = 1u64 << kk;
    let (sa, sb) = (kk as u64 - k.0, kk as u64 - m.0);
    let mut signed: i64 = 0;
    for i in 0..cells {
        let pa = (i >> sa) & 1;
        let pb = (i >> sb) & 1;
        signed += if pa == pb { 1 } else { -1 };
    }
    let na = to_level(k)?.level as f64;
    let nb = to_level(m)?.level as f64;
    let amp = (-(na + nb) / (2.0 * params.l())).exp2();
    Ok(left + amp * signed as f64 / cells as f64)
}

/// Exact left-half integral of f_k f_m via piecewise evaluation.
fn left_inner_integral(k: FlatIndex, m: FlatIndex, params: &SystemParams) -> Result<f64> {
    let dk = support_interval(to_level(k)?);
    let dm = support_interval(to_level(m)?);
    let mut cuts = vec![-1.0, 0.0, dk.left(), dk.right(), dm.left(), dm.right()];
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut acc = KahanSum::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        acc.add((b - a) * eval_f(k, mid, params)? * eval_f(m, mid, params)?);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indexing::{to_flat, LevelPosition};
    use crate::rademacher::rademacher_eval;

    #[test]
    fn enumeration_basics() {
        // E|e1 + e2|^4 = (16 + 16 + 0 + 0)/4 = 8.
        assert!((sign_moment_by_enumeration(&[1.0, 1.0], 4.0) - 8.0).abs() < 1e-12);
        // Parseval at p = 2.
        assert!((sign_moment_by_enumeration(&[0.5, 2.0, 1.5], 2.0) - 6.5).abs() < 1e-12);
        assert_eq!(sign_moment_by_enumeration(&[], 3.0), 0.0);
    }

    #[test]
    fn bit_grid_signs_match_rademacher_eval() {
        // The parity rule used by the bit-grid oracle is the same dyadic-step
        // convention as rademacher_eval.
        for k in 1u64..=10 {
            let kk = 12u32;
            let cells = 1u64 << kk;
            for i in (0..cells).step_by(37) {
                let t = (i as f64 + 0.5) / cells as f64;
                let expected = if (i >> (kk as u64 - k)) & 1 == 0 { 1 } else { -1 };
                assert_eq!(rademacher_eval(FlatIndex(k), t).unwrap(), expected);
            }
        }
    }

    #[test]
    fn two_inner_product_oracles_agree() {
        let params = SystemParams::new(1.0).unwrap();
        for (a, b) in [(1u64, 1u64), (1, 2), (3, 7), (5, 5), (2, 14)] {
            let x = inner_product_by_quadrature(FlatIndex(a), FlatIndex(b), &params).unwrap();
            let y = inner_product_by_bit_grid(FlatIndex(a), FlatIndex(b), &params).unwrap();
            assert!((x - y).abs() < 1e-12, "mismatch at ({a},{b}): {x} vs {y}");
        }
    }

    #[test]
    fn quadrature_orthonormality_spot() {
        let params = SystemParams::new(2.0).unwrap();
        for a in 1u64..=10 {
            for b in a..=10 {
                let v = inner_product_by_quadrature(FlatIndex(a), FlatIndex(b), &params).unwrap();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-11, "({a},{b}) -> {v}");
            }
        }
    }

    #[test]
    fn single_norm_quadrature_p2_is_one() {
        let params = SystemParams::new(1.0).unwrap();
        for n in 1..=5 {
            let v = single_norm_by_quadrature(n, &params, 2.0).unwrap();
            assert!((v - 1.0).abs() < 1e-12, "n={n}: {v}");
        }
    }

    #[test]
    fn exchangeability_within_level() {
        // Moving a term to a different position in its level leaves the norm
        // unchanged.
        let params = SystemParams::new(1.0).unwrap();
        let c1 = Combination::new(vec![
            (to_flat(LevelPosition::new(2, 1).unwrap()), 0.7),
            (to_flat(LevelPosition::new(2, 2).unwrap()), -1.3),
        ])
        .unwrap();
        let c2 = Combination::new(vec![
            (to_flat(LevelPosition::new(2, 4).unwrap()), 0.7),
            (to_flat(LevelPosition::new(2, 2).unwrap()), -1.3),
        ])
        .unwrap();
        let v1 = combination_norm_by_quadrature(&c1, &params, 3.0).unwrap();
        let v2 = combination_norm_by_quadrature(&c2, &params, 3.0).unwrap();
        assert!((v1 - v2).abs() < 1e-12);
    }
}
