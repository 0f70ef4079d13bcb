//! Certified interval arithmetic on dyadic numbers.
//!
//! Values are midpoint/radius pairs whose components are exact dyadics
//! (`BigInt` mantissa times a power of two). Addition and multiplication of
//! dyadics are exact, so composite interval operations need no directed
//! rounding; approximation enters only at leaf constants (rationals, π,
//! cos, sin), where a conservative error bound in ulps is carried along.
//! Enclosures are therefore rigorous: the true value always lies within
//! `mid ± rad`, and radii shrink geometrically as the precision parameter
//! grows.

use num::bigint::Sign;
use num::traits::Euclid;
use num::{BigInt, BigRational, One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

/// Exact dyadic number `m · 2^e`.
#[derive(Clone, Debug)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    pub fn new(m: BigInt, e: i64) -> Self {
        Dyadic { m, e }
    }

    pub fn zero() -> Self {
        Dyadic { m: BigInt::zero(), e: 0 }
    }

    pub fn from_integer(n: i64) -> Self {
        Dyadic { m: BigInt::from(n), e: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.sign() == Sign::Minus
    }

    pub fn neg(&self) -> Self {
        Dyadic { m: -&self.m, e: self.e }
    }

    pub fn abs(&self) -> Self {
        Dyadic { m: self.m.abs(), e: self.e }
    }

    pub fn add(&self, other: &Self) -> Self {
        let e = self.e.min(other.e);
        let a = &self.m << u64::try_from(self.e - e).unwrap();
        let b = &other.m << u64::try_from(other.e - e).unwrap();
        Dyadic { m: a + b, e }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Dyadic { m: &self.m * &other.m, e: self.e + other.e }
    }

    pub fn cmp(&self, other: &Self) -> Ordering {
        let e = self.e.min(other.e);
        let a = &self.m << u64::try_from(self.e - e).unwrap();
        let b = &other.m << u64::try_from(other.e - e).unwrap();
        a.cmp(&b)
    }

    /// Approximate `f64` value, for display only.
    pub fn to_f64(&self) -> f64 {
        let bits = self.m.bits() as i64;
        if bits <= 52 {
            use num::ToPrimitive;
            self.m.to_f64().unwrap_or(f64::NAN) * 2f64.powi(self.e as i32)
        } else {
            let shift = bits - 52;
            use num::ToPrimitive;
            let top = (&self.m >> u64::try_from(shift).unwrap()).to_f64().unwrap_or(f64::NAN);
            top * 2f64.powi((self.e + shift) as i32)
        }
    }
}

/// Real enclosure `mid ± rad` with `rad ≥ 0`.
#[derive(Clone, Debug)]
pub struct RealInterval {
    pub mid: Dyadic,
    pub rad: Dyadic,
}

impl RealInterval {
    pub fn exact(d: Dyadic) -> Self {
        RealInterval { mid: d, rad: Dyadic::zero() }
    }

    pub fn zero() -> Self {
        Self::exact(Dyadic::zero())
    }

    /// Encloses a rational within one ulp at `prec` fractional bits.
    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let scaled = (q.numer() << u64::from(prec)).div_euclid(q.denom());
        RealInterval {
            mid: Dyadic::new(scaled, -i64::from(prec)),
            rad: Dyadic::new(BigInt::one(), -i64::from(prec)),
        }
    }

    pub fn neg(&self) -> Self {
        RealInterval { mid: self.mid.neg(), rad: self.rad.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        RealInterval { mid: self.mid.add(&other.mid), rad: self.rad.add(&other.rad) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        // (m1 ± r1)(m2 ± r2) ⊆ m1·m2 ± (|m1|r2 + |m2|r1 + r1·r2), all exact.
        let mid = self.mid.mul(&other.mid);
        let rad = self
            .mid
            .abs()
            .mul(&other.rad)
            .add(&other.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&other.rad));
        RealInterval { mid, rad }
    }

    /// Certified sign: `Some(±1)` when the enclosure excludes zero,
    /// `Some(0)` only for the exact zero interval, `None` when undecided.
    pub fn sign(&self) -> Option<i32> {
        if self.mid.is_zero() && self.rad.is_zero() {
            return Some(0);
        }
        if self.mid.abs().cmp(&self.rad) == Ordering::Greater {
            Some(if self.mid.is_negative() { -1 } else { 1 })
        } else {
            None
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs().cmp(&self.rad) != Ordering::Greater
    }
}

/// Rectangular complex enclosure.
#[derive(Clone, Debug)]
pub struct ComplexInterval {
    pub re: RealInterval,
    pub im: RealInterval,
}

impl ComplexInterval {
    pub fn zero() -> Self {
        ComplexInterval { re: RealInterval::zero(), im: RealInterval::zero() }
    }

    pub fn from_real(re: RealInterval) -> Self {
        ComplexInterval { re, im: RealInterval::zero() }
    }

    pub fn add(&self, other: &Self) -> Self {
        ComplexInterval { re: self.re.add(&other.re), im: self.im.add(&other.im) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        ComplexInterval {
            re: self.re.mul(&other.re).sub(&self.im.mul(&other.im)),
            im: self.re.mul(&other.im).add(&self.im.mul(&other.re)),
        }
    }

    pub fn neg(&self) -> Self {
        ComplexInterval { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn contains(&self, re: &RealInterval, im: &RealInterval) -> bool {
        overlaps(&self.re, re) && overlaps(&self.im, im)
    }

    pub fn to_string_approx(&self) -> String {
        format!(
            "({:.6} ± {:.1e}) + ({:.6} ± {:.1e})i",
            self.re.mid.to_f64(),
            self.re.rad.to_f64(),
            self.im.mid.to_f64(),
            self.im.rad.to_f64()
        )
    }
}

/// Whether two real enclosures intersect.
pub fn overlaps(a: &RealInterval, b: &RealInterval) -> bool {
    // |m1 − m2| ≤ r1 + r2
    a.mid.sub(&b.mid).abs().cmp(&a.rad.add(&b.rad)) != Ordering::Greater
}

// Guard bits appended to every requested precision before running the scaled
// integer trigonometric series; the accumulated ulp error stays far below 2^GUARD.
const GUARD: u32 = 64;

/// Scaled value with a conservative error bound in ulps of the same scale.
struct Scaled {
    v: BigInt,
    err: u64,
}

/// arctan(1/x) · 2^bits by the alternating Taylor series, floor divisions.
fn atan_inv_scaled(x: u64, bits: u32) -> Scaled {
    let scale = BigInt::one() << u64::from(bits);
    let xx = BigInt::from(x) * BigInt::from(x);
    let mut power = BigInt::from(x);
    let mut acc = BigInt::zero();
    let mut k: u64 = 0;
    let mut terms: u64 = 0;
    loop {
        let term = &scale / (&power * BigInt::from(2 * k + 1));
        if term.is_zero() {
            break;
        }
        if k % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
        power *= &xx;
        k += 1;
        terms += 1;
    }
    // One ulp per floor division, plus the alternating-series tail.
    Scaled { v: acc, err: terms + 2 }
}

/// 2π · 2^bits via Machin's formula.
fn two_pi_scaled(bits: u32) -> Scaled {
    let a = atan_inv_scaled(5, bits);
    let b = atan_inv_scaled(239, bits);
    Scaled { v: BigInt::from(32) * a.v - BigInt::from(8) * b.v, err: 32 * a.err + 8 * b.err }
}

/// cos and sin of `t ∈ [0, π/2)` given scaled at 2^bits.
fn cos_sin_scaled(t: &Scaled, bits: u32) -> (Scaled, Scaled) {
    let scale = BigInt::one() << u64::from(bits);
    // t² with |t| < 2·scale, so t²'s relative position keeps |t²|/scale < 4.
    let t2 = (&t.v * &t.v) / &scale;
    let t2_err = 4 * t.err + 2;

    let run = |start: BigInt, start_err: u64, odd: bool| -> Scaled {
        let mut acc = start.clone();
        let mut acc_err = start_err;
        let mut term = start;
        let mut term_err = start_err;
        let mut k: u64 = 0;
        loop {
            let m = if odd { (2 * k + 2) * (2 * k + 3) } else { (2 * k + 1) * (2 * k + 2) };
            let num = (&term * &t2) / &scale;
            // |term| ≤ scale and |t²| < 4·scale bound the propagated error.
            let num_err = t2_err + 4 * term_err + 2;
            let next = &num / BigInt::from(m);
            term_err = num_err / m + 1;
            term = -next;
            if term.is_zero() && term_err <= 1 {
                acc_err += 2;
                break;
            }
            acc += &term;
            acc_err += term_err;
            if term.is_zero() {
                // The remaining tail is dominated by the term's error bound.
                acc_err += term_err + 2;
                break;
            }
            k += 1;
        }
        Scaled { v: acc, err: acc_err }
    };

    let cos = run(scale.clone(), 0, false);
    let sin = run(t.v.clone(), t.err, true);
    (cos, sin)
}

fn interval_from_scaled(s: &Scaled, bits: u32) -> RealInterval {
    RealInterval {
        mid: Dyadic::new(s.v.clone(), -i64::from(bits)),
        rad: Dyadic::new(BigInt::from(s.err + 2), -i64::from(bits)),
    }
}

/// Certified enclosure of `e^{2πi·j/d}`, cached per `(d, prec)`.
pub fn root_of_unity(d: u64, j: u64, prec: u32) -> ComplexInterval {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Vec<ComplexInterval>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    let table = guard.entry((d, prec)).or_insert_with(|| {
        let bits = prec + GUARD;
        let two_pi = two_pi_scaled(bits);
        (0..d).map(|k| root_of_unity_uncached(&two_pi, d, k, bits)).collect()
    });
    table[usize::try_from(j % d).unwrap()].clone()
}

fn root_of_unity_uncached(two_pi: &Scaled, d: u64, j: u64, bits: u32) -> ComplexInterval {
    // Reduce 2π·j/d to a quadrant angle in [0, π/2).
    let q = (4 * j) / d;
    let num = 4 * j - q * d;
    let t = Scaled {
        v: (&two_pi.v * BigInt::from(num)) / BigInt::from(4 * d),
        err: two_pi.err + 1,
    };
    let (c, s) = cos_sin_scaled(&t, bits);
    let (c, s) = (interval_from_scaled(&c, bits), interval_from_scaled(&s, bits));
    match q {
        0 => ComplexInterval { re: c, im: s },
        1 => ComplexInterval { re: s.neg(), im: c },
        2 => ComplexInterval { re: c.neg(), im: s.neg() },
        _ => ComplexInterval { re: s, im: c.neg() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rad_below(iv: &RealInterval, bits: i64) -> bool {
        iv.rad.cmp(&Dyadic::new(BigInt::one(), -bits)) == Ordering::Less
    }

    #[test]
    fn dyadic_arithmetic_is_exact() {
        let a = Dyadic::new(BigInt::from(3), -1); // 1.5
        let b = Dyadic::new(BigInt::from(5), -2); // 1.25
        assert_eq!(a.add(&b).to_f64(), 2.75);
        assert_eq!(a.mul(&b).to_f64(), 1.875);
        assert_eq!(a.sub(&b).to_f64(), 0.25);
        assert_eq!(a.cmp(&b), Ordering::Greater);
    }

    #[test]
    fn two_pi_matches_reference() {
        // 2π to 40 digits, as a rational approximation with denominator 10^40.
        let digits = "62831853071795864769252867665590057683943";
        let num: BigInt = digits.parse().unwrap();
        let den = BigInt::from(10u32).pow(40);
        let reference = BigRational::new(num, den);
        let s = two_pi_scaled(256);
        let iv = interval_from_scaled(&s, 256);
        // The reference is truncated after 40 decimals; widen it accordingly.
        let mut t = RealInterval::from_rational(&reference, 512);
        t.rad = t.rad.add(&RealInterval::from_rational(&BigRational::new(BigInt::one(), BigInt::from(10u32).pow(40)), 512).mid);
        assert!(overlaps(&iv, &t), "2π enclosure misses reference");
        assert!(rad_below(&iv, 200));
    }

    #[test]
    fn eighth_root_matches_sqrt2_over_2() {
        // cos(π/4) = √2/2; oracle from the integer square root of 2·4^prec.
        let prec: u32 = 300;
        let root = (BigInt::from(2) << u64::from(4 * prec)).sqrt();
        let sqrt2_half = RealInterval {
            mid: Dyadic::new(root, -i64::from(2 * prec) - 1),
            rad: Dyadic::new(BigInt::from(2), -i64::from(2 * prec) - 1),
        };
        let z = root_of_unity(8, 1, 256);
        assert!(overlaps(&z.re, &sqrt2_half));
        assert!(overlaps(&z.im, &sqrt2_half));
        assert!(rad_below(&z.re, 220));
    }

    #[test]
    fn quadrants_have_correct_signs() {
        for (j, re_sign, im_sign) in [(1u64, 1, 1), (4, -1, 1), (7, -1, -1), (11, 1, -1)] {
            let z = root_of_unity(12, j, 128);
            assert_eq!(z.re.sign(), Some(re_sign), "re sign at j={j}");
            assert_eq!(z.im.sign(), Some(im_sign), "im sign at j={j}");
        }
    }

    #[test]
    fn fourth_roots_are_tightly_pinned() {
        let z = root_of_unity(4, 1, 128); // i
        assert!(z.re.contains_zero());
        let one = RealInterval::exact(Dyadic::from_integer(1));
        assert!(overlaps(&z.im, &one));
        let z2 = root_of_unity(4, 2, 128); // −1
        assert!(overlaps(&z2.re, &RealInterval::exact(Dyadic::from_integer(-1))));
        assert!(z2.im.contains_zero());
    }

    #[test]
    fn radius_shrinks_geometrically() {
        for &(p, floor) in &[(64u32, 40i64), (128, 100), (256, 220)] {
            let z = root_of_unity(16, 3, p);
            assert!(rad_below(&z.re, floor), "radius too large at prec {p}");
        }
    }

    #[test]
    fn interval_multiplication_contains_products() {
        // (ζ_8)·(ζ_8^3) = ζ_8^4 = −1.
        let a = root_of_unity(8, 1, 128);
        let b = root_of_unity(8, 3, 128);
        let c = a.mul(&b);
        assert!(overlaps(&c.re, &RealInterval::exact(Dyadic::from_integer(-1))));
        assert!(c.im.contains_zero());
    }
}
