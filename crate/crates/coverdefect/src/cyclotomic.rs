//! Exact arithmetic in the cyclotomic field Q(ζ_d).
//!
//! Elements are rational coefficient vectors of length φ(d) on the power
//! basis 1, ζ, ..., ζ^{φ(d)−1}, kept reduced modulo the d-th cyclotomic
//! polynomial Φ_d. Reduction is canonical, so equality is coefficient
//! equality. The conjugation ζ ↦ ζ^{−1} (restriction of complex
//! conjugation under any embedding) is available as [`CyclotomicElement::involution`];
//! its fixed field is the maximal real subfield Q(ζ + ζ^{−1}).
//!
//! Φ_d is computed by iterated exact division of x^d − 1 by the cyclotomic
//! polynomials of the proper divisors of d, and cached. Certified numeric
//! embeddings send ζ_d to exp(2πi/d) with interval enclosures at any
//! requested precision; the sign of a nonzero real element is decided by
//! doubling the precision until the enclosure excludes zero.

use crate::interval::{ComplexInterval, RealInterval};
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::de::Error as DeError;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycError {
    /// Coefficient vector length does not equal φ(d).
    BadLength { expected: usize, got: usize },
    /// d must be at least 1.
    BadConductor,
    /// Inversion of zero.
    DivisionByZero,
    /// Operation requires a real element (fixed by the involution).
    NotReal,
    /// Target conductor is not a multiple (or divisor) of the source.
    IncompatibleConductor,
    /// Element does not lie in the requested subfield.
    NotInSubfield,
}

impl fmt::Display for CycError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CycError::BadLength { expected, got } => {
                write!(f, "coefficient vector has length {got}, expected {expected}")
            }
            CycError::BadConductor => write!(f, "conductor must be ≥ 1"),
            CycError::DivisionByZero => write!(f, "division by zero"),
            CycError::NotReal => write!(f, "element is not fixed by the involution"),
            CycError::IncompatibleConductor => write!(f, "incompatible conductor"),
            CycError::NotInSubfield => write!(f, "element lies outside the requested subfield"),
        }
    }
}

impl std::error::Error for CycError {}

pub fn euler_phi(d: u64) -> u64 {
    let mut n = d;
    let mut result = d;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn divisors(d: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = 1;
    while k * k <= d {
        if d % k == 0 {
            small.push(k);
            if k != d / k {
                large.push(d / k);
            }
        }
        k += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Coefficients of Φ_d, ascending, monic, length φ(d) + 1.
pub fn cyclotomic_polynomial(d: u64) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&d) {
        return hit.clone();
    }
    // x^d − 1 divided by Φ_e for every proper divisor e of d.
    let mut poly = vec![BigInt::zero(); usize::try_from(d).unwrap() + 1];
    poly[0] = -BigInt::one();
    *poly.last_mut().unwrap() = BigInt::one();
    for e in divisors(d) {
        if e == d {
            continue;
        }
        let phi_e = cyclotomic_polynomial(e);
        poly = exact_div_monic(&poly, &phi_e);
    }
    let arc = Arc::new(poly);
    cache.lock().unwrap().insert(d, arc.clone());
    arc
}

/// Exact division of integer polynomials by a monic divisor.
fn exact_div_monic(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let da = a.len() - 1;
    assert!(da >= db);
    let mut quot = vec![BigInt::zero(); da - db + 1];
    for k in (0..=da - db).rev() {
        let c = rem[k + db].clone();
        if c.is_zero() {
            continue;
        }
        quot[k] = c.clone();
        for i in 0..=db {
            let delta = &c * &b[i];
            rem[k + i] -= delta;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "division was not exact");
    quot
}

/// Element of Q(ζ_d) in reduced power-basis form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicElement {
    d: u64,
    coeffs: Vec<Rat>,
}

impl CyclotomicElement {
    pub fn new(d: u64, coeffs: Vec<Rat>) -> Result<Self, CycError> {
        if d == 0 {
            return Err(CycError::BadConductor);
        }
        let expected = usize::try_from(euler_phi(d)).unwrap();
        if coeffs.len() != expected {
            return Err(CycError::BadLength { expected, got: coeffs.len() });
        }
        Ok(CyclotomicElement { d, coeffs })
    }

    pub fn zero(d: u64) -> Self {
        let phi = usize::try_from(euler_phi(d)).unwrap();
        CyclotomicElement { d, coeffs: vec![Rat::zero(); phi] }
    }

    pub fn one(d: u64) -> Self {
        Self::from_rational(d, Rat::one())
    }

    pub fn from_rational(d: u64, q: Rat) -> Self {
        let mut z = Self::zero(d);
        z.coeffs[0] = q;
        z
    }

    pub fn from_integer(d: u64, n: i64) -> Self {
        Self::from_rational(d, Rat::from_integer(BigInt::from(n)))
    }

    /// ζ_d^k for any integer exponent, reduced.
    pub fn zeta_power(d: u64, k: i64) -> Self {
        let di = i64::try_from(d).unwrap();
        let e = usize::try_from(k.rem_euclid(di)).unwrap();
        let mut raw = vec![Rat::zero(); e + 1];
        raw[e] = Rat::one();
        Self::from_unreduced(d, raw)
    }

    pub fn zeta(d: u64) -> Self {
        Self::zeta_power(d, 1)
    }

    fn from_unreduced(d: u64, mut raw: Vec<Rat>) -> Self {
        let phi = usize::try_from(euler_phi(d)).unwrap();
        let phi_poly = cyclotomic_polynomial(d);
        // Reduce by the monic Φ_d from the top down.
        let mut k = raw.len();
        while k > phi {
            k -= 1;
            let c = std::mem::replace(&mut raw[k], Rat::zero());
            if c.is_zero() {
                continue;
            }
            let base = k - phi;
            for i in 0..phi {
                let delta = &c * Rat::from_integer(phi_poly[i].clone());
                raw[base + i] -= delta;
            }
        }
        raw.resize(phi, Rat::zero());
        CyclotomicElement { d, coeffs: raw }
    }

    pub fn conductor(&self) -> u64 {
        self.d
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value when the element is a constant.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn assert_same_field(&self, other: &Self) {
        assert_eq!(self.d, other.d, "mixed conductors {} and {}", self.d, other.d);
    }

    pub fn invert(&self) -> Result<Self, CycError> {
        if self.is_zero() {
            return Err(CycError::DivisionByZero);
        }
        // Extended Euclid on (self, Φ_d): u·a + v·Φ_d = g with g a nonzero
        // constant, since Φ_d is irreducible over Q and deg a < deg Φ_d.
        let phi_poly: Vec<Rat> = cyclotomic_polynomial(self.d)
            .iter()
            .map(|c| Rat::from_integer(c.clone()))
            .collect();
        let mut r_prev = phi_poly;
        let mut r = trim(self.coeffs.clone());
        let mut u_prev = vec![];
        let mut u = vec![Rat::one()];
        while !r.is_empty() {
            let (q, rem) = poly_divmod(&r_prev, &r);
            let u_next = poly_sub(&u_prev, &poly_mul(&q, &u));
            r_prev = std::mem::replace(&mut r, rem);
            u_prev = std::mem::replace(&mut u, u_next);
        }
        assert_eq!(r_prev.len(), 1, "cyclotomic polynomial split unexpectedly");
        let g = r_prev[0].clone();
        let inv_coeffs: Vec<Rat> = u_prev.iter().map(|c| c / &g).collect();
        Ok(Self::from_unreduced(self.d, inv_coeffs))
    }

    pub fn div(&self, other: &Self) -> Result<Self, CycError> {
        Ok(self * &other.invert()?)
    }

    pub fn pow(&self, n: i64) -> Result<Self, CycError> {
        if n < 0 {
            return self.invert()?.pow(-n);
        }
        let mut acc = Self::one(self.d);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        Ok(acc)
    }

    /// The field involution ζ ↦ ζ^{−1}.
    pub fn involution(&self) -> Self {
        let dd = usize::try_from(self.d).unwrap();
        let mut raw = vec![Rat::zero(); dd.max(1)];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (self.d - u64::try_from(j).unwrap()) % self.d;
            raw[usize::try_from(e).unwrap()] += c;
        }
        Self::from_unreduced(self.d, raw)
    }

    /// Fixed by the involution, i.e. lies in the real subfield Q(ζ + ζ^{−1}).
    pub fn is_real(&self) -> bool {
        *self == self.involution()
    }

    pub fn norm_to_real(&self) -> Self {
        self * &self.involution()
    }

    /// Certified enclosure of the image under ζ_d ↦ exp(2πi/d).
    pub fn embed(&self, prec: u32) -> ComplexInterval {
        let mut acc = ComplexInterval::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let root = crate::interval::root_of_unity(self.d, u64::try_from(j).unwrap(), prec);
            let scaled = ComplexInterval::from_real(RealInterval::from_rational(c, prec)).mul(&root);
            acc = acc.add(&scaled);
        }
        acc
    }

    /// Sign of a real element, certified by interval refinement.
    ///
    /// Terminates for every input: a nonzero element has nonzero absolute
    /// value, and the enclosure radius shrinks geometrically in the
    /// precision, so some refinement excludes zero.
    pub fn sign_real(&self) -> Result<i32, CycError> {
        if !self.is_real() {
            return Err(CycError::NotReal);
        }
        if self.is_zero() {
            return Ok(0);
        }
        let mut prec: u32 = 64;
        loop {
            let iv = self.embed(prec);
            if let Some(s) = iv.re.sign() {
                return Ok(s);
            }
            prec = prec.checked_mul(2).expect("sign determination exceeded precision cap");
        }
    }

    /// Image in Q(ζ_D) for d | D, sending ζ_d to ζ_D^{D/d}.
    pub fn to_conductor(&self, target: u64) -> Result<Self, CycError> {
        if target == 0 || target % self.d != 0 {
            return Err(CycError::IncompatibleConductor);
        }
        let k = usize::try_from(target / self.d).unwrap();
        let mut raw = vec![Rat::zero(); self.coeffs.len() * k.max(1)];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                raw[j * k] = c.clone();
            }
        }
        Ok(Self::from_unreduced(target, raw))
    }

    /// Preimage in Q(ζ_e) for e | d, when the element lies in that subfield.
    pub fn restrict_to_conductor(&self, e: u64) -> Result<Self, CycError> {
        if e == 0 || self.d % e != 0 {
            return Err(CycError::IncompatibleConductor);
        }
        let phi_e = usize::try_from(euler_phi(e)).unwrap();
        let k = i64::try_from(self.d / e).unwrap();
        // Solve Σ_j x_j · ζ_d^{kj} = self over Q by Gaussian elimination.
        let basis: Vec<CyclotomicElement> = (0..phi_e)
            .map(|j| Self::zeta_power(self.d, k * i64::try_from(j).unwrap()))
            .collect();
        let rows = self.coeffs.len();
        let mut aug: Vec<Vec<Rat>> = (0..rows)
            .map(|r| {
                let mut row: Vec<Rat> = basis.iter().map(|b| b.coeffs[r].clone()).collect();
                row.push(self.coeffs[r].clone());
                row
            })
            .collect();
        let cols = phi_e;
        let mut pivot_row = 0usize;
        let mut pivots = Vec::new();
        for col in 0..cols {
            let Some(pr) = (pivot_row..rows).find(|&r| !aug[r][col].is_zero()) else {
                continue;
            };
            aug.swap(pivot_row, pr);
            let inv = aug[pivot_row][col].recip();
            for x in aug[pivot_row].iter_mut() {
                *x = &*x * &inv;
            }
            for r in 0..rows {
                if r != pivot_row && !aug[r][col].is_zero() {
                    let f = aug[r][col].clone();
                    for c2 in 0..=cols {
                        let delta = &f * &aug[pivot_row][c2];
                        aug[r][c2] -= delta;
                    }
                }
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
        // Inconsistent rows mean the element is outside the subfield.
        for r in pivot_row..rows {
            if !aug[r][cols].is_zero() {
                return Err(CycError::NotInSubfield);
            }
        }
        let mut x = vec![Rat::zero(); cols];
        for (pr, pc) in pivots {
            x[pc] = aug[pr][cols].clone();
        }
        Self::new(e, x)
    }
}

impl Add for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn add(self, rhs: Self) -> CyclotomicElement {
        self.assert_same_field(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        CyclotomicElement { d: self.d, coeffs }
    }
}

impl Sub for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn sub(self, rhs: Self) -> CyclotomicElement {
        self.assert_same_field(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        CyclotomicElement { d: self.d, coeffs }
    }
}

impl Neg for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn neg(self) -> CyclotomicElement {
        CyclotomicElement { d: self.d, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn mul(self, rhs: Self) -> CyclotomicElement {
        self.assert_same_field(rhs);
        let n = self.coeffs.len();
        let mut raw = vec![Rat::zero(); 2 * n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                raw[i + j] += a * b;
            }
        }
        CyclotomicElement::from_unreduced(self.d, raw)
    }
}

fn trim(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn poly_divmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let lead = b.last().unwrap();
    if rem.len() <= db {
        return (vec![], trim(rem));
    }
    let mut quot = vec![Rat::zero(); rem.len() - db];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + db] / lead;
        if c.is_zero() {
            continue;
        }
        for i in 0..=db {
            let delta = &c * &b[i];
            rem[k + i] -= delta;
        }
        quot[k] = c;
    }
    (trim(quot), trim(rem))
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

pub fn format_rat(q: &Rat) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = n.trim().parse().map_err(|e| format!("bad numerator {n:?}: {e}"))?;
    let den: BigInt = d.trim().parse().map_err(|e| format!("bad denominator {d:?}: {e}"))?;
    if den.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(Rat::new(num, den))
}

impl Serialize for CyclotomicElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CyclotomicElement", 2)?;
        st.serialize_field("d", &self.d)?;
        let coeffs: Vec<String> = self.coeffs.iter().map(format_rat).collect();
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CyclotomicElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            d: u64,
            coeffs: Vec<String>,
        }
        let w = Wire::deserialize(deserializer)?;
        let coeffs: Result<Vec<Rat>, String> = w.coeffs.iter().map(|s| parse_rat(s)).collect();
        let coeffs = coeffs.map_err(DeError::custom)?;
        CyclotomicElement::new(w.d, coeffs).map_err(|e| DeError::custom(e.to_string()))
    }
}

impl fmt::Display for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let show_coeff = j == 0 || !mag.is_one();
            if show_coeff {
                if mag.denom().is_one() {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "{}/{}", mag.numer(), mag.denom())?;
                }
            }
            if j > 0 {
                if show_coeff {
                    write!(f, "·")?;
                }
                if j == 1 {
                    write!(f, "ζ{}", self.d)?;
                } else {
                    write!(f, "ζ{}^{}", self.d, j)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclotomicElement({self})")
    }
}
