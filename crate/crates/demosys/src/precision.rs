//! Extended working precision for the closed-form scalar paths.
//!
//! `SystemParams` carries a working precision in bits (default 53). Above 53
//! the closed-form norm formulas are evaluated with arbitrary-precision
//! arithmetic at the requested bit count (plus guard bits) and the result is
//! rounded back to f64. The combinatorial engine (convolutions, searches,
//! sampling) always runs in binary64; the precision switch governs the scalar
//! formulas where cancellation could actually bite.

use astro_float::{BigFloat, Consts, RoundingMode};

const GUARD_BITS: usize = 32;
const RM: RoundingMode = RoundingMode::ToEven;

fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((words, _len, sign, exp, _inexact)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    // value = sign * (mantissa / 2^(64 * nwords)) * 2^exp, words little-endian.
    let n = words.len();
    let top = words[n - 1] as u128;
    let second = if n >= 2 { words[n - 2] as u128 } else { 0 };
    let mant = (top << 64) | second;
    // Apply the exponent in two steps so neither scale factor under/overflows
    // before the product does.
    let e = exp as i64 - 128;
    let (e1, e2) = (e / 2, e - e / 2);
    let v = mant as f64 * (e1 as f64).exp2() * (e2 as f64).exp2();
    if sign.is_negative() {
        -v
    } else {
        v
    }
}

/// log2 of the closed-form p-th power norm
/// 2^(n(p-2)) (1 - 2^(-n/l))^(p/2) + 2^(-np/(2l)), evaluated at `bits`
/// working precision and rounded to f64.
pub fn single_norm_pth_power_log2(n: u32, l: f64, p: f64, bits: u32) -> f64 {
    let prec = bits as usize + GUARD_BITS;
    let mut cc = Consts::new().expect("constants cache");
    let two = BigFloat::from_u64(2, prec);
    let one = BigFloat::from_u64(1, prec);
    let nn = BigFloat::from_u64(n as u64, prec);
    let pp = BigFloat::from_f64(p, prec);
    let ll = BigFloat::from_f64(l, prec);

    // 2^(n(p-2)) * (1 - 2^(-n/l))^(p/2)
    let e1 = nn.mul(&pp.sub(&two, prec, RM), prec, RM);
    let x = two.pow(&nn.div(&ll, prec, RM).neg(), prec, RM, &mut cc);
    let base = one.sub(&x, prec, RM);
    let half_p = pp.div(&two, prec, RM);
    let term1 = two
        .pow(&e1, prec, RM, &mut cc)
        .mul(&base.pow(&half_p, prec, RM, &mut cc), prec, RM);

    // 2^(-np/(2l))
    let e2 = nn
        .mul(&pp, prec, RM)
        .div(&two.mul(&ll, prec, RM), prec, RM)
        .neg();
    let term2 = two.pow(&e2, prec, RM, &mut cc);

    let total = term1.add(&term2, prec, RM);
    to_f64(&total.log2(prec, RM, &mut cc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_f64_path_at_moderate_scale() {
        // n=2, l=1, p=4: closed form is 16 * 0.75^2 + 2^-4 = 9.0625.
        let log2 = single_norm_pth_power_log2(2, 1.0, 4.0, 128);
        assert!((log2 - 9.0625f64.log2()).abs() < 1e-13);
    }

    #[test]
    fn conversion_roundtrip() {
        for &v in &[1.0, 0.5, 9.0625, 1e300, 1e-300, -3.25] {
            let b = BigFloat::from_f64(v, 192);
            assert_eq!(to_f64(&b), v);
        }
    }
}
