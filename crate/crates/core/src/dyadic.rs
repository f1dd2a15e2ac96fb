//! Fixed-point approximations of the real radicals with exact error control.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cell::RefCell;
use std::collections::HashMap;

thread_local! {
    static CBRT_CACHE: RefCell<HashMap<(u64, u64), BigInt>> = RefCell::new(HashMap::new());
}

/// `⌊∛n · 2^k⌋`, so that `∛n ∈ [r, r + 1] / 2^k`.
pub fn cbrt_floor_scaled(n: u64, k: u64) -> BigInt {
    CBRT_CACHE.with(|cache| {
        cache
            .borrow_mut()
            .entry((n, k))
            .or_insert_with(|| (BigInt::from(n) << (3 * k) as usize).cbrt())
            .clone()
    })
}

/// Drops cached radicals, e.g. between survey chunks.
pub fn clear_cache() {
    CBRT_CACHE.with(|cache| cache.borrow_mut().clear());
}

/// `v / 2^k` as an f64, accurate to a couple of ulps.
pub fn scaled_to_f64(v: &BigInt, k: u64) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let bits = v.bits();
    let shift = bits.saturating_sub(64);
    let head = (v >> shift as usize).to_f64().unwrap_or(0.0);
    head * pow2(shift as i64 - k as i64)
}

pub fn pow2(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e < -1074 {
        0.0
    } else {
        2f64.powi(e as i32)
    }
}

/// Bit length of the largest absolute value among `vs`.
pub fn max_bits<'a>(vs: impl IntoIterator<Item = &'a BigInt>) -> u64 {
    vs.into_iter().map(|v| v.bits()).max().unwrap_or(0)
}

/// Sign of `A + B·∛m + C·∛n` by interval evaluation at escalating precision.
/// The caller guarantees the value is nonzero.
pub fn interval_sign(a: &BigInt, b: &BigInt, c: &BigInt, m: u64, n: u64) -> i8 {
    let mut k = 64.max(max_bits([b, c]) + 32);
    loop {
        let rm = cbrt_floor_scaled(m, k);
        let rn = cbrt_floor_scaled(n, k);
        let base: BigInt = (a << k as usize) + b * &rm + c * &rn;
        // each radical contributes an error in [0, coeff]
        let mut lo = base.clone();
        let mut hi = base;
        for coeff in [b, c] {
            if coeff.is_positive() {
                hi += coeff;
            } else {
                lo += coeff;
            }
        }
        if lo.is_positive() {
            return 1;
        }
        if hi.is_negative() {
            return -1;
        }
        k *= 2;
    }
}

/// Float evaluation with a rigorous error bound; `None` when inconclusive.
pub fn filtered_sign(a: f64, b: f64, c: f64, rm: f64, rn: f64) -> Option<i8> {
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return None;
    }
    let v = a + b * rm + c * rn;
    let mag = a.abs() + b.abs() * rm + c.abs() * rn;
    // inputs carry one rounding each, radicals one, products and sums a few more
    let bound = mag * 16.0 * f64::EPSILON + f64::MIN_POSITIVE;
    if v > bound {
        Some(1)
    } else if v < -bound {
        Some(-1)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root_brackets() {
        let r = cbrt_floor_scaled(2, 64);
        let lo = &r * &r * &r;
        let hi = (&r + 1) * (&r + 1) * (&r + 1);
        let target = BigInt::from(2) << 192;
        assert!(lo <= target && target < hi);
        assert!((scaled_to_f64(&r, 64) - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn interval_sign_small_cases() {
        let one = BigInt::from(1);
        let zero = BigInt::from(0);
        assert_eq!(interval_sign(&one, &-&one, &zero, 2, 4), -1);
        // 3 - 2∛3 = 3 - 2.884 > 0
        assert_eq!(interval_sign(&BigInt::from(3), &BigInt::from(-2), &zero, 3, 9), 1);
    }

    #[test]
    fn scaled_conversion_of_huge_values() {
        let v = BigInt::from(3) << 2000usize;
        assert!((scaled_to_f64(&v, 2000) - 3.0).abs() < 1e-15);
        assert_eq!(scaled_to_f64(&BigInt::from(0), 10), 0.0);
    }
}
