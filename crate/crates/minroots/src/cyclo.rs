//! Exact arithmetic in the real cyclotomic rings Z[2cos(pi/L)].
//!
//! Elements are integer coefficient vectors reduced modulo the minimal
//! polynomial of `c = 2cos(pi/L)`.  The ring provides exact sign
//! determination: a fast floating-point path with a rigorous error radius,
//! falling back to exact rational interval refinement of an isolating
//! interval for `c`.  All coefficient arithmetic is overflow-checked.

use crate::error::{BuildError, ParseError};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

#[cfg(not(feature = "wide"))]
pub type Coeff = i64;
#[cfg(feature = "wide")]
pub type Coeff = i128;

fn cadd(a: Coeff, b: Coeff) -> Result<Coeff, BuildError> {
    a.checked_add(b).ok_or(BuildError::Overflow)
}

fn cmul(a: Coeff, b: Coeff) -> Result<Coeff, BuildError> {
    a.checked_mul(b).ok_or(BuildError::Overflow)
}

/// An element of a [`BaseRing`]: a polynomial in `c` of degree below the
/// ring degree, with integer coefficients.  Canonical by construction, so
/// equality of coefficient vectors is equality in the ring.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RingElem {
    coeffs: Vec<Coeff>,
}

impl RingElem {
    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// True when the element is the constant polynomial with value `n`.
    pub fn is_const(&self, n: Coeff) -> bool {
        self.coeffs[0] == n && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Constant term if the element is constant.
    pub fn as_const(&self) -> Option<Coeff> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }
}

/// The ring Z[2cos(pi/L)] for a fixed level `L`.
///
/// Holds the minimal polynomial of `c = 2cos(pi/L)`, precomputed reduction
/// rows, and an isolating interval for `c` among the roots of the minimal
/// polynomial.  Immutable and freely shareable; `sign` refines a local copy
/// of the interval.
#[derive(Debug, Clone)]
pub struct BaseRing {
    level: u32,
    psi: Vec<Coeff>,
    degree: usize,
    /// red[k] = x^(degree+k) reduced mod psi, for k in 0..degree-1.
    red: Vec<Vec<Coeff>>,
    /// Exact isolating interval for c as a dyadic bracket
    /// [lo, hi] / 2^bits: psi(lo) < 0 < psi(hi) for degree >= 2, with c
    /// the only root inside.
    iso: Dyadic,
    /// Midpoint-radius enclosure of c in f64, rounded outward.
    c_mid: f64,
    c_rad: f64,
}

/// Dyadic interval [lo, hi] / 2^bits.  All refinement is shift-based, so
/// no rational normalization ever happens.
#[derive(Debug, Clone)]
struct Dyadic {
    lo: BigInt,
    hi: BigInt,
    bits: u64,
}

impl Dyadic {
    /// Halve the bracket, keeping the sign invariant of `poly` at the
    /// endpoints (negative below the isolated root, positive above).
    fn bisect(&mut self, poly: &[Coeff]) {
        if (&self.lo + &self.hi).bit(0) {
            self.lo = &self.lo << 1;
            self.hi = &self.hi << 1;
            self.bits += 1;
        }
        let mid: BigInt = (&self.lo + &self.hi) >> 1;
        if eval_sign_dyadic(poly, &mid, self.bits) < 0 {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    fn width_below(&self, neg_log2: u64) -> bool {
        let diff: BigInt = &self.hi - &self.lo;
        self.bits >= neg_log2 && diff.bits() <= self.bits - neg_log2
    }
}

/// Sign of an integer polynomial at the dyadic point num / 2^bits, exactly.
fn eval_sign_dyadic(poly: &[Coeff], num: &BigInt, bits: u64) -> i32 {
    let d = poly.len() - 1;
    let mut acc = BigInt::zero();
    for (i, &c) in poly.iter().enumerate().rev() {
        acc = acc * num + (BigInt::from(c) << (bits * (d - i) as u64));
    }
    if acc.is_positive() {
        1
    } else if acc.is_negative() {
        -1
    } else {
        0
    }
}

/// Enclosure of an integer polynomial over a dyadic interval, as a dyadic
/// pair at the same scale (outward-rounded shifts only).
fn eval_interval_dyadic(poly: &[Coeff], iv: &Dyadic) -> (BigInt, BigInt) {
    let shift = iv.bits;
    let mut alo = BigInt::zero();
    let mut ahi = BigInt::zero();
    for &c in poly.iter().rev() {
        let products = [&alo * &iv.lo, &alo * &iv.hi, &ahi * &iv.lo, &ahi * &iv.hi];
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
        // Floor and ceiling shifts keep the enclosure valid.
        let cc = BigInt::from(c) << shift;
        alo = (plo >> shift) + &cc;
        ahi = -((-phi) >> shift) + cc;
    }
    (alo, ahi)
}

fn dyadic_to_f64(n: &BigInt, bits: u64) -> f64 {
    let (sign, digits) = n.to_u64_digits();
    let mut v = 0.0f64;
    for &d in digits.iter().rev() {
        v = v * 1.8446744073709552e19 + d as f64;
    }
    if sign == num_bigint::Sign::Minus {
        v = -v;
    }
    v / 2.0f64.powi(bits as i32)
}

/// Minimal polynomial of `2cos(pi/L)`, monic, as a coefficient vector
/// (constant term first).
///
/// Computed exactly: build the cyclotomic polynomial of order `2L` by the
/// integer division recursion, then rewrite the palindromic result as a
/// polynomial in `x = z + 1/z`.  Levels 1 and 3 both give `x - 1`, the
/// degenerate integer ring.
pub fn minimal_polynomial(level: u32) -> Vec<Coeff> {
    if level <= 1 {
        return vec![-1, 1];
    }
    let phi = cyclotomic(2 * level as usize);
    fold_palindrome(&phi)
}

/// Cyclotomic polynomial of order n over the integers: x^n - 1 divided by
/// the cyclotomic polynomials of all proper divisors, built bottom-up.
fn cyclotomic(n: usize) -> Vec<Coeff> {
    let mut divisors: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
    divisors.sort_unstable();
    let mut memo: std::collections::HashMap<usize, Vec<Coeff>> = std::collections::HashMap::new();
    for &d in &divisors {
        let mut poly = vec![0 as Coeff; d + 1];
        poly[0] = -1;
        poly[d] = 1;
        for &e in &divisors {
            if e < d && d % e == 0 {
                poly = poly_exact_div(&poly, &memo[&e]);
            }
        }
        memo.insert(d, poly);
    }
    memo.remove(&n).unwrap()
}

/// Exact division of integer polynomials (panics on non-exact division,
/// which cannot happen for cyclotomic factors).
fn poly_exact_div(num: &[Coeff], den: &[Coeff]) -> Vec<Coeff> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    assert!(*den.last().unwrap() == 1, "divisor must be monic");
    let mut rem = num.to_vec();
    let mut quot = vec![0 as Coeff; dn - dd + 1];
    for k in (0..=dn - dd).rev() {
        let q = rem[k + dd];
        quot[k] = q;
        if q != 0 {
            for (i, &dc) in den.iter().enumerate() {
                rem[k + i] -= q * dc;
            }
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "division was not exact");
    quot
}

/// Rewrite a palindromic polynomial P(z) of even degree 2d as a monic
/// polynomial in x = z + 1/z: P(z)/z^d = p_d + sum p_{d+k} (z^k + z^-k),
/// and z^k + z^-k is the Chebyshev-like D_k(x) with D_0 = 2, D_1 = x.
fn fold_palindrome(p: &[Coeff]) -> Vec<Coeff> {
    let deg = p.len() - 1;
    assert!(deg % 2 == 0, "cyclotomic polynomial of order >= 3 has even degree");
    let d = deg / 2;
    for k in 0..=deg {
        assert_eq!(p[k], p[deg - k], "input must be palindromic");
    }
    let mut result = vec![0 as Coeff; d + 1];
    result[0] = p[d];
    // D_k(x) by recurrence, accumulated with weight p_{d+k}.
    let mut d_prev: Vec<Coeff> = vec![2];
    let mut d_cur: Vec<Coeff> = vec![0, 1];
    for k in 1..=d {
        let w = p[d + k];
        if w != 0 {
            for (i, &c) in d_cur.iter().enumerate() {
                result[i] += w * c;
            }
        }
        if k < d {
            // D_{k+1} = x*D_k - D_{k-1}
            let mut next = vec![0 as Coeff; k + 2];
            for (i, &c) in d_cur.iter().enumerate() {
                next[i + 1] = c;
            }
            for (i, &c) in d_prev.iter().enumerate() {
                next[i] -= c;
            }
            d_prev = d_cur;
            d_cur = next;
        }
    }
    result
}

/// Rounding slack for the floating sign fast path; generous against the
/// true f64 unit roundoff so the radius arithmetic itself is covered.
const EPS: f64 = 3e-16;
const TINY: f64 = 1e-300;

#[derive(Clone, Copy)]
struct Ball {
    v: f64,
    r: f64,
}

impl Ball {
    fn from_coeff(c: Coeff) -> Ball {
        let v = c as f64;
        Ball { v, r: EPS * v.abs() + TINY }
    }

    fn add(self, o: Ball) -> Ball {
        let v = self.v + o.v;
        Ball { v, r: self.r + o.r + EPS * v.abs() + TINY }
    }

    fn mul(self, o: Ball) -> Ball {
        let v = self.v * o.v;
        let r = self.v.abs() * o.r + o.v.abs() * self.r + self.r * o.r + EPS * v.abs() + TINY;
        Ball { v, r }
    }
}

impl BaseRing {
    /// Construct the ring of level `L >= 1`.
    pub fn new(level: u32) -> BaseRing {
        let psi = minimal_polynomial(level);
        let degree = psi.len() - 1;

        // Reduction rows: x^(degree+k) mod psi.
        let mut red: Vec<Vec<Coeff>> = Vec::with_capacity(degree.saturating_sub(1));
        if degree >= 1 {
            let base: Vec<Coeff> = psi[..degree].iter().map(|&c| -c).collect();
            let mut row = base.clone();
            for _ in 0..degree.saturating_sub(1) {
                red.push(row.clone());
                // multiply row by x and reduce the overflowing term
                let top = row[degree - 1];
                let mut next = vec![0 as Coeff; degree];
                for i in (1..degree).rev() {
                    next[i] = row[i - 1];
                }
                if top != 0 {
                    for i in 0..degree {
                        next[i] += top * base[i];
                    }
                }
                row = next;
            }
        }

        let (iso, c_mid, c_rad) = if degree == 1 {
            // c is the rational root of x - psi0.
            let c = BigInt::from(-psi[0]);
            (Dyadic { lo: c.clone(), hi: c, bits: 0 }, -psi[0] as f64, 0.0)
        } else {
            Self::isolate_largest_root(level, &psi)
        };

        BaseRing { level, psi, degree, red, iso, c_mid, c_rad }
    }

    /// Exact isolating interval for 2cos(pi/L), the largest root of psi.
    ///
    /// The second-largest candidate root is 2cos(2pi/L), so the rational
    /// point (2L^2-10)/L^2 lies strictly between it and the largest root
    /// for every L >= 2 (10 exceeds pi^2 and stays below the separation of
    /// the two leading cosines).  Bisection on the sign of psi then narrows
    /// the bracket; no transcendental evaluation is involved.
    fn isolate_largest_root(level: u32, psi: &[Coeff]) -> (Dyadic, f64, f64) {
        // Dyadic floor of (2L^2-10)/L^2 with enough bits that flooring
        // cannot drop below the next root down.
        let bits = 8 + 2 * (64 - u64::from(level).leading_zeros() as u64).max(6);
        let l2 = BigInt::from(level) * BigInt::from(level);
        let lo = ((2 * &l2 - 10) << bits) / &l2;
        let hi = BigInt::from(2) << bits;
        let mut iso = Dyadic { lo, hi, bits };
        assert!(
            eval_sign_dyadic(psi, &iso.lo, iso.bits) < 0,
            "lower bracket must sit below the largest root"
        );
        assert!(eval_sign_dyadic(psi, &iso.hi, iso.bits) > 0, "2 must sit above the largest root");
        while !iso.width_below(100) {
            iso.bisect(psi);
        }
        let lo_f = dyadic_to_f64(&iso.lo, iso.bits);
        let hi_f = dyadic_to_f64(&iso.hi, iso.bits);
        let mid = 0.5 * (lo_f + hi_f);
        let rad = (hi_f - lo_f) + EPS * mid.abs() + TINY;
        (iso, mid, rad)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn psi(&self) -> &[Coeff] {
        &self.psi
    }

    pub fn zero(&self) -> RingElem {
        RingElem { coeffs: vec![0; self.degree] }
    }

    pub fn one(&self) -> RingElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: Coeff) -> RingElem {
        let mut coeffs = vec![0; self.degree];
        coeffs[0] = n;
        RingElem { coeffs }
    }

    /// The ring generator c = 2cos(pi/L) itself.
    pub fn gen(&self) -> RingElem {
        if self.degree == 1 {
            self.from_int(-self.psi[0])
        } else {
            let mut coeffs = vec![0; self.degree];
            coeffs[1] = 1;
            RingElem { coeffs }
        }
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> Result<RingElem, BuildError> {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| cadd(x, y))
            .collect::<Result<_, _>>()?;
        Ok(RingElem { coeffs })
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> Result<RingElem, BuildError> {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| x.checked_sub(y).ok_or(BuildError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(RingElem { coeffs })
    }

    pub fn neg(&self, a: &RingElem) -> Result<RingElem, BuildError> {
        let coeffs = a
            .coeffs
            .iter()
            .map(|&x| x.checked_neg().ok_or(BuildError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(RingElem { coeffs })
    }

    pub fn scale(&self, a: &RingElem, k: Coeff) -> Result<RingElem, BuildError> {
        let coeffs = a.coeffs.iter().map(|&x| cmul(x, k)).collect::<Result<_, _>>()?;
        Ok(RingElem { coeffs })
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> Result<RingElem, BuildError> {
        let d = self.degree;
        if d == 1 {
            return Ok(RingElem { coeffs: vec![cmul(a.coeffs[0], b.coeffs[0])?] });
        }
        let mut prod = vec![0 as Coeff; 2 * d - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                if y != 0 {
                    prod[i + j] = cadd(prod[i + j], cmul(x, y)?)?;
                }
            }
        }
        let mut out = prod[..d].to_vec();
        for k in d..2 * d - 1 {
            let c = prod[k];
            if c != 0 {
                for (i, &rc) in self.red[k - d].iter().enumerate() {
                    if rc != 0 {
                        out[i] = cadd(out[i], cmul(c, rc)?)?;
                    }
                }
            }
        }
        Ok(RingElem { coeffs: out })
    }

    /// The constant 2cos(pi/m) embedded in this ring, for finite `m`
    /// dividing the level.  This is D_{L/m}(c) where D_k tracks
    /// z^k + z^-k.
    pub fn embed(&self, m: u32) -> Result<RingElem, BuildError> {
        if m == 0 || self.level % m != 0 {
            return Err(BuildError::Invariant(format!(
                "embed: order {m} does not divide ring level {}",
                self.level
            )));
        }
        self.d_poly(self.level / m)
    }

    /// D_k(c) with D_0 = 2, D_1 = c, D_{k+1} = c*D_k - D_{k-1}, so that
    /// D_k(2cos t) = 2cos(k t).
    pub fn d_poly(&self, k: u32) -> Result<RingElem, BuildError> {
        let mut prev = self.from_int(2);
        if k == 0 {
            return Ok(prev);
        }
        let mut cur = self.gen();
        for _ in 1..k {
            let next = self.sub(&self.mul(&self.gen(), &cur)?, &prev)?;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// Exact sign of the real value of `a`: -1, 0, or +1.
    ///
    /// Zero is syntactic (canonical representation).  Otherwise a rigorous
    /// floating enclosure usually decides; when it straddles zero the
    /// isolating interval is refined with exact rational arithmetic until
    /// the value interval excludes zero, which terminates because a nonzero
    /// reduced element cannot vanish at a root of the minimal polynomial.
    pub fn sign(&self, a: &RingElem) -> i32 {
        debug_assert_eq!(a.coeffs.len(), self.degree);
        if a.is_zero() {
            return 0;
        }
        if self.degree == 1 {
            return sgn(a.coeffs[0]);
        }
        if let Some(s) = self.sign_f64(a) {
            return s;
        }
        self.sign_exact(a)
    }

    fn sign_f64(&self, a: &RingElem) -> Option<i32> {
        let c = Ball { v: self.c_mid, r: self.c_rad };
        let mut acc = Ball::from_coeff(a.coeffs[self.degree - 1]);
        for k in (0..self.degree - 1).rev() {
            acc = acc.mul(c).add(Ball::from_coeff(a.coeffs[k]));
        }
        let r = acc.r * 1.0001 + TINY;
        if acc.v > r {
            Some(1)
        } else if acc.v < -r {
            Some(-1)
        } else {
            None
        }
    }

    fn sign_exact(&self, a: &RingElem) -> i32 {
        let mut iv = self.iso.clone();
        loop {
            let (vlo, vhi) = eval_interval_dyadic(&a.coeffs, &iv);
            if vlo.is_positive() {
                return 1;
            }
            if vhi.is_negative() {
                return -1;
            }
            for _ in 0..16 {
                iv.bisect(&self.psi);
            }
        }
    }

    /// Total order by real value: sign of a - b.
    pub fn cmp_elems(&self, a: &RingElem, b: &RingElem) -> std::cmp::Ordering {
        if a == b {
            return std::cmp::Ordering::Equal;
        }
        let diff = self.sub(a, b).expect("comparison never overflows on canonical table data");
        self.sign(&diff).cmp(&0)
    }

    /// Approximate real value, for reporting only.
    pub fn to_f64(&self, a: &RingElem) -> f64 {
        let mut acc = 0.0;
        for &c in a.coeffs.iter().rev() {
            acc = acc * self.c_mid + c as f64;
        }
        acc
    }

    /// Canonical text rendering: a bare integer for constants, otherwise
    /// `poly{L}:a0,a1,...` listing all degree coefficients.
    pub fn render(&self, a: &RingElem) -> String {
        if let Some(c) = a.as_const() {
            return c.to_string();
        }
        let body: Vec<String> = a.coeffs.iter().map(|c| c.to_string()).collect();
        format!("poly{}:{}", self.level, body.join(","))
    }

    /// Parse a rendering produced by [`BaseRing::render`] against this ring.
    pub fn parse_elem(&self, tok: &str) -> Result<RingElem, ParseError> {
        match parse_rendered(tok)? {
            Rendered::Constant(c) => Ok(self.from_int(c)),
            Rendered::Poly { level, coeffs } => {
                if level != self.level {
                    return Err(ParseError::other(format!(
                        "coefficient of level {level} in a level-{} table",
                        self.level
                    )));
                }
                if coeffs.len() != self.degree {
                    return Err(ParseError::other(format!(
                        "coefficient with {} entries in a degree-{} ring",
                        coeffs.len(),
                        self.degree
                    )));
                }
                Ok(RingElem { coeffs })
            }
        }
    }

    /// Map an element of `from` into this ring.  Requires the source level
    /// to divide this ring's level, except that constants (in particular
    /// everything from a degenerate integer ring) lift into any ring.
    pub fn lift(&self, a: &RingElem, from: &BaseRing) -> Result<RingElem, BuildError> {
        if let Some(c) = a.as_const() {
            return Ok(self.from_int(c));
        }
        if self.level % from.level != 0 {
            return Err(BuildError::Invariant(format!(
                "lift: level {} does not divide level {}",
                from.level, self.level
            )));
        }
        let image = self.d_poly(self.level / from.level)?;
        // Horner in the target ring.
        let mut acc = self.from_int(a.coeffs[from.degree - 1]);
        for k in (0..from.degree - 1).rev() {
            acc = self.add(&self.mul(&acc, &image)?, &self.from_int(a.coeffs[k]))?;
        }
        Ok(acc)
    }
}

/// Parsed form of a rendered coefficient.
pub enum Rendered {
    Constant(Coeff),
    Poly { level: u32, coeffs: Vec<Coeff> },
}

pub fn parse_rendered(tok: &str) -> Result<Rendered, ParseError> {
    if let Some(rest) = tok.strip_prefix("poly") {
        let (lvl, body) = rest
            .split_once(':')
            .ok_or_else(|| ParseError::other(format!("malformed coefficient {tok:?}")))?;
        let level: u32 = lvl
            .parse()
            .map_err(|_| ParseError::other(format!("malformed ring level in {tok:?}")))?;
        let coeffs = body
            .split(',')
            .map(|p| p.parse::<Coeff>().map_err(|_| ParseError::other(format!("malformed coefficient {tok:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Rendered::Poly { level, coeffs })
    } else {
        let c: Coeff = tok
            .parse()
            .map_err(|_| ParseError::other(format!("malformed coefficient {tok:?}")))?;
        Ok(Rendered::Constant(c))
    }
}

fn sgn(c: Coeff) -> i32 {
    match c.cmp(&0) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    }
}
