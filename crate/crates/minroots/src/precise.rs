//! High-precision rational enclosures, used only by verification code.
//!
//! Provides an independent route to values like `2cos(pi*k/L)`: pi comes
//! from Machin's formula and cosine from its Taylor series, both evaluated
//! in fixed-point integer arithmetic with explicit outward error tracking.
//! Nothing here touches the ring arithmetic it is used to check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A closed rational interval guaranteed to contain the exact value.
#[derive(Debug, Clone)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn point(v: BigRational) -> Self {
        RatInterval { lo: v.clone(), hi: v }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    fn mul(&self, other: &RatInterval) -> RatInterval {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        RatInterval { lo, hi }
    }

}

pub fn rat_interval_one() -> RatInterval {
    RatInterval::point(BigRational::one())
}

/// Fixed-point interval: value in [lo, hi] / 2^scale_bits.
struct Fixed {
    lo: BigInt,
    hi: BigInt,
    scale_bits: u64,
}

impl Fixed {
    fn to_rational(&self) -> RatInterval {
        let den = BigInt::one() << self.scale_bits;
        RatInterval {
            lo: BigRational::new(self.lo.clone(), den.clone()),
            hi: BigRational::new(self.hi.clone(), den),
        }
    }
}

/// atan(1/x) in fixed point, by the alternating series with floor-division
/// error counted one unit per term.
fn atan_inv(x: u64, scale_bits: u64) -> Fixed {
    let scale = BigInt::one() << scale_bits;
    let xx = BigInt::from(x) * BigInt::from(x);
    let mut power = BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut units: i64 = 0;
    let mut j: u64 = 0;
    loop {
        let term = &scale / (BigInt::from(2 * j + 1) * &power);
        let stop = term.is_zero();
        if j % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        units += 1;
        if stop {
            break;
        }
        power *= &xx;
        j += 1;
    }
    // Floor errors plus the truncated tail (below one unit when we stop).
    let slack = BigInt::from(units + 2);
    Fixed { lo: &sum - &slack, hi: sum + slack, scale_bits }
}

/// pi by Machin's formula: pi = 16 atan(1/5) - 4 atan(1/239).
fn pi_fixed(scale_bits: u64) -> Fixed {
    let a = atan_inv(5, scale_bits);
    let b = atan_inv(239, scale_bits);
    Fixed {
        lo: 16 * &a.lo - 4 * &b.hi,
        hi: 16 * &a.hi - 4 * &b.lo,
        scale_bits,
    }
}

/// Interval for 2cos(pi * num / den) of width below 2^-bits, for
/// 0 <= num <= den.
pub fn two_cos_pi_frac(num: u32, den: u32, bits: u64) -> RatInterval {
    assert!(num <= den && den > 0);
    let k = bits + 200;
    let pi = pi_fixed(k);
    // x = pi * num / den, rounded outward.
    let xlo = floor_div(&(&pi.lo * BigInt::from(num)), &BigInt::from(den));
    let xhi = ceil_div(&(&pi.hi * BigInt::from(num)), &BigInt::from(den));
    let scale = BigInt::one() << k;

    // x^2 as a nonnegative fixed-point interval.
    let x2lo = floor_div(&(&xlo * &xlo), &scale);
    let x2hi = ceil_div(&(&xhi * &xhi), &scale);

    // cos x = sum (-1)^j x^(2j) / (2j)!, terms as nonnegative intervals.
    let mut term_lo = scale.clone();
    let mut term_hi = scale.clone();
    let mut sum_lo = scale.clone();
    let mut sum_hi = scale.clone();
    let mut j: u64 = 1;
    loop {
        let d = BigInt::from((2 * j - 1) * (2 * j));
        term_lo = floor_div(&(&term_lo * &x2lo), &(&scale * &d));
        term_hi = ceil_div(&(&term_hi * &x2hi), &(&scale * &d));
        if term_lo.is_negative() {
            term_lo = BigInt::zero();
        }
        if j % 2 == 1 {
            sum_lo -= &term_hi;
            sum_hi -= &term_lo;
        } else {
            sum_lo += &term_lo;
            sum_hi += &term_hi;
        }
        // Terms decrease once (2j+1)(2j+2) exceeds x^2 (which is below 10);
        // after that the truncated tail is below the next term.
        if j > 2 && term_hi < BigInt::from(2) {
            break;
        }
        j += 1;
        assert!(j < 10_000, "cosine series failed to converge");
    }
    let slack = BigInt::from(4);
    let fixed = Fixed { lo: 2 * (&sum_lo - &slack), hi: 2 * (&sum_hi + &slack), scale_bits: k };
    let out = fixed.to_rational();
    assert!(
        out.width() < BigRational::new(BigInt::one(), BigInt::one() << bits),
        "requested enclosure width not reached"
    );
    out
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = num_integer_div_rem(a, b);
    if r.is_negative() {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = num_integer_div_rem(a, b);
    if r.is_positive() {
        q + 1
    } else {
        q
    }
}

fn num_integer_div_rem(a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    (a / b, a % b)
}

/// Interval Horner evaluation of an integer polynomial over an interval.
///
/// Works in scaled integers (outward-rounded at each step) to avoid
/// rational normalization costs; the returned interval is a guaranteed
/// enclosure of the exact image.
pub fn eval_interval(coeffs: &[i128], x: &RatInterval) -> (BigRational, BigRational) {
    let k: u64 = 1400;
    let scale = BigInt::one() << k;
    let xlo = floor_div(&(x.lo.numer() * &scale), x.lo.denom());
    let xhi = ceil_div(&(x.hi.numer() * &scale), x.hi.denom());
    let mut alo = BigInt::zero();
    let mut ahi = BigInt::zero();
    for &c in coeffs.iter().rev() {
        let products = [&alo * &xlo, &alo * &xhi, &ahi * &xlo, &ahi * &xhi];
        let mut plo = products[0].clone();
        let mut phi = products[0].clone();
        for p in &products[1..] {
            if *p < plo {
                plo = p.clone();
            }
            if *p > phi {
                phi = p.clone();
            }
        }
        let cc = BigInt::from(c) << k;
        alo = floor_div(&plo, &scale) + &cc;
        ahi = ceil_div(&phi, &scale) + cc;
    }
    let den = BigInt::one() << k;
    (BigRational::new(alo, den.clone()), BigRational::new(ahi, den))
}

/// Multiply an interval-coefficient polynomial by (x - root).
pub fn poly_mul_linear(poly: &[RatInterval], root: &RatInterval) -> Vec<RatInterval> {
    let zero = RatInterval::point(BigRational::zero());
    let mut out = vec![zero; poly.len() + 1];
    for (i, c) in poly.iter().enumerate() {
        // x * c contributes at degree i+1.
        out[i + 1].lo = &out[i + 1].lo + &c.lo;
        out[i + 1].hi = &out[i + 1].hi + &c.hi;
        // -root * c contributes at degree i.
        let m = c.mul(root);
        out[i].lo = &out[i].lo - m.hi;
        out[i].hi = &out[i].hi - m.lo;
    }
    out
}

/// Round interval coefficients to the unique integer each contains.
pub fn round_poly(poly: &[RatInterval]) -> Option<Vec<i64>> {
    let one = BigRational::one();
    poly.iter()
        .map(|c| {
            if c.width() >= one {
                return None;
            }
            let cand = ((&c.lo + &c.hi) / BigRational::from_integer(BigInt::from(2))).round();
            if cand < c.lo || cand > c.hi {
                return None;
            }
            let i: BigInt = cand.to_integer();
            i64::try_from(&i).ok()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(r: &RatInterval) -> f64 {
        let mid = (&r.lo + &r.hi) / BigRational::from_integer(BigInt::from(2));
        let num = mid.numer();
        let den = mid.denom();
        // Crude but fine for a sanity check.
        let scale = BigInt::one() << 64;
        let scaled: BigInt = num * &scale / den;
        let digits = scaled.magnitude().to_u64_digits();
        let mut v = 0.0;
        for &d in digits.iter().rev() {
            v = v * 1.8446744073709552e19 + d as f64;
        }
        if scaled.is_negative() {
            v = -v;
        }
        v / 1.8446744073709552e19
    }

    #[test]
    fn cosine_enclosures_match_f64() {
        for (num, den) in [(1u32, 3u32), (1, 4), (1, 5), (1, 7), (1, 12), (5, 12), (1, 60), (59, 60)] {
            let enc = two_cos_pi_frac(num, den, 120);
            let expected = 2.0 * (std::f64::consts::PI * num as f64 / den as f64).cos();
            assert!(
                (approx(&enc) - expected).abs() < 1e-9,
                "2cos(pi*{num}/{den}): {} vs {expected}",
                approx(&enc)
            );
        }
    }

    #[test]
    fn known_exact_points() {
        // 2cos(pi/3) = 1 exactly; the enclosure must contain it.
        let enc = two_cos_pi_frac(1, 3, 200);
        assert!(enc.lo < BigRational::one() && BigRational::one() < enc.hi);
        // 2cos(pi/2) = 0.
        let enc = two_cos_pi_frac(1, 2, 200);
        assert!(enc.lo.is_negative() && enc.hi.is_positive());
    }

    #[test]
    fn round_poly_detects_ambiguity() {
        let wide = RatInterval {
            lo: BigRational::from_integer(BigInt::from(0)),
            hi: BigRational::from_integer(BigInt::from(2)),
        };
        assert_eq!(round_poly(&[wide]), None);
    }
}
