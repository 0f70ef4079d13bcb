//! Norm residue symbols at odd primes, norm tests for Q(i)/Q, Pell
//! solutions, and the dual-prime sequence.
//!
//! The symbol (a, b)_p for an odd prime p is the tame Hilbert symbol
//!
//! ```text
//! (a, b)_p = ((−1)^{v(a)v(b)} · a^{v(b)} / b^{v(a)})^{(p−1)/2}  in Z_p,
//! ```
//!
//! valued in ±1, symmetric and bilinear. It is computed exactly on rational
//! inputs by modular arithmetic; p = 2 is rejected. Whether a rational is a
//! norm from Q(i) is decided by factoring: x = z·z̄ for some z ∈ Q(i) iff
//! x > 0 and every prime ≡ 3 (mod 4) divides x to even order.
//!
//! Factoring uses trial division below 10⁶ followed by Brent's variant of
//! Pollard rho under an explicit iteration budget; exhausting the budget is
//! a distinct, reportable outcome, never a silent wrong answer.

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::fmt;

pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NtError {
    /// The symbol and norm machinery requires an odd prime.
    NotOddPrime(BigInt),
    /// A symbol or valuation argument was zero.
    ZeroArgument,
    /// The factorization budget ran out; the result is unknown, not false.
    BudgetExhausted,
}

impl fmt::Display for NtError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NtError::NotOddPrime(p) => write!(f, "{p} is not an odd prime"),
            NtError::ZeroArgument => write!(f, "zero argument"),
            NtError::BudgetExhausted => write!(f, "factorization budget exhausted"),
        }
    }
}

impl std::error::Error for NtError {}

/// Iteration allowance shared across the factorizations of one computation.
#[derive(Debug, Clone)]
pub struct FactorBudget {
    remaining: u64,
}

impl FactorBudget {
    pub fn new(iterations: u64) -> Self {
        FactorBudget { remaining: iterations }
    }

    /// Ample for everything exercised here; desk-scale inputs factor in
    /// well under a second.
    pub fn standard() -> Self {
        FactorBudget::new(8_000_000)
    }

    fn spend(&mut self, n: u64) -> Result<(), NtError> {
        if self.remaining < n {
            self.remaining = 0;
            return Err(NtError::BudgetExhausted);
        }
        self.remaining -= n;
        Ok(())
    }
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Miller–Rabin with the first twelve prime bases; deterministic for
/// n < 3.3·10²⁴, far beyond anything produced here.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if n <= &BigInt::one() {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let pb = BigInt::from(p);
        if n == &pb {
            return true;
        }
        if (n % &pb).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap();
    let d = &n_minus_1 >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigInt::from(2u32), n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigInt, budget: &mut FactorBudget) -> Result<BigInt, NtError> {
    // Brent's cycle detection; deterministic restart constants.
    let one = BigInt::one();
    for c in 1u64..64 {
        let cc = BigInt::from(c);
        let mut y = BigInt::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &cc) % n;
            }
            let mut k: u64 = 0;
            while k < r && g == one {
                ys = y.clone();
                let m = 128.min(r - k);
                budget.spend(m)?;
                for _ in 0..m {
                    y = (&y * &y + &cc) % n;
                    let diff = (&x - &y).abs();
                    if !diff.is_zero() {
                        q = (&q * diff) % n;
                    }
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if g == *n {
            // Backtrack one step at a time.
            loop {
                budget.spend(1)?;
                ys = (&ys * &ys + &cc) % n;
                let diff = (&x - &ys).abs();
                g = diff.gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if g > one && g < *n {
            return Ok(g);
        }
    }
    Err(NtError::BudgetExhausted)
}

/// Prime factorization of n ≥ 1, ascending, with multiplicities.
pub fn factor(n: &BigInt, budget: &mut FactorBudget) -> Result<Vec<(BigInt, u32)>, NtError> {
    assert!(n.sign() == Sign::Plus, "factor requires a positive integer");
    let mut rest = n.clone();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let push = |p: BigInt, k: u32, out: &mut Vec<(BigInt, u32)>| {
        if let Some(last) = out.iter_mut().find(|(q, _)| *q == p) {
            last.1 += k;
        } else {
            out.push((p, k));
        }
    };
    let mut p = 2u64;
    while p < TRIAL_LIMIT {
        let pb = BigInt::from(p);
        if &pb * &pb > rest {
            break;
        }
        if (&rest % &pb).is_zero() {
            let mut k = 0;
            while (&rest % &pb).is_zero() {
                rest /= &pb;
                k += 1;
            }
            push(pb, k, &mut out);
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            push(m, 1, &mut out);
            continue;
        }
        let f = pollard_rho(&m, budget)?;
        stack.push(&m / &f);
        stack.push(f);
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(x: &Rat, p: &BigInt) -> Result<i64, NtError> {
    if x.is_zero() {
        return Err(NtError::ZeroArgument);
    }
    let count = |mut n: BigInt| -> i64 {
        n = n.abs();
        let mut v = 0;
        while (&n % p).is_zero() {
            n /= p;
            v += 1;
        }
        v
    };
    Ok(count(x.numer().clone()) - count(x.denom().clone()))
}

/// The unit part of x in Z_p, reduced mod p, with its sign folded in.
fn unit_mod_p(x: &Rat, p: &BigInt) -> BigInt {
    let strip = |mut n: BigInt| -> BigInt {
        while (&n % p).is_zero() {
            n /= p;
        }
        n
    };
    let num = strip(x.numer().clone());
    let den = strip(x.denom().clone());
    let den_inv = mod_inverse(&den, p);
    (num * den_inv).mod_floor(p)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "no modular inverse");
    e.x.mod_floor(m)
}

fn legendre(u: &BigInt, p: &BigInt) -> i8 {
    let e = (p - BigInt::one()) >> 1;
    let r = u.modpow(&e, p);
    if r.is_one() {
        1
    } else if r == p - BigInt::one() {
        -1
    } else {
        panic!("legendre symbol of a non-unit");
    }
}

/// The norm residue symbol (a, b)_p at an odd prime p, valued in ±1.
pub fn norm_residue_symbol(a: &Rat, b: &Rat, p: &BigInt) -> Result<i8, NtError> {
    if (p % BigInt::from(2u32)).is_zero() || !is_probable_prime(p) {
        return Err(NtError::NotOddPrime(p.clone()));
    }
    if a.is_zero() || b.is_zero() {
        return Err(NtError::ZeroArgument);
    }
    let va = valuation(a, p)?;
    let vb = valuation(b, p)?;
    let ua = unit_mod_p(a, p);
    let ub = unit_mod_p(b, p);
    // u = (−1)^{v(a)v(b)} · a^{v(b)} · b^{−v(a)}, a p-adic unit congruent to
    // (−1)^{v(a)v(b)} · ua^{v(b)} · ub^{−v(a)} mod p.
    let mut u = BigInt::one();
    if (va * vb) % 2 != 0 {
        u = p - u;
    }
    let pow = |base: &BigInt, e: i64| -> BigInt {
        let bb = if e >= 0 { base.clone() } else { mod_inverse(base, p) };
        bb.modpow(&BigInt::from(e.unsigned_abs()), p)
    };
    u = (u * pow(&ua, vb)) % p;
    u = (u * pow(&ub, -va)) % p;
    Ok(legendre(&u, p))
}

/// A recorded symbol evaluation, displayed as `(a, b)_p = ±1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolCertificate {
    pub a: Rat,
    pub b: Rat,
    pub p: BigInt,
    pub value: i8,
}

impl SymbolCertificate {
    pub fn evaluate(a: Rat, b: Rat, p: BigInt) -> Result<Self, NtError> {
        let value = norm_residue_symbol(&a, &b, &p)?;
        Ok(SymbolCertificate { a, b, p, value })
    }
}

impl fmt::Display for SymbolCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |q: &Rat| -> String {
            if q.denom().is_one() {
                q.numer().to_string()
            } else {
                format!("{}/{}", q.numer(), q.denom())
            }
        };
        write!(f, "({}, {})_{} = {:+}", show(&self.a), show(&self.b), self.p, self.value)
    }
}

impl Serialize for SymbolCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SymbolCertificate", 4)?;
        st.serialize_field("a", &crate::cyclotomic::format_rat(&self.a))?;
        st.serialize_field("b", &crate::cyclotomic::format_rat(&self.b))?;
        st.serialize_field("p", &self.p.to_string())?;
        st.serialize_field("value", &self.value)?;
        st.end()
    }
}

/// Whether x = z·z̄ for some z ∈ Q(i): positive, and every prime ≡ 3 (mod 4)
/// divides it to even order.
pub fn is_norm_from_qi(x: &Rat, budget: &mut FactorBudget) -> Result<bool, NtError> {
    if x.is_zero() {
        return Err(NtError::ZeroArgument);
    }
    if x.is_negative() {
        return Ok(false);
    }
    let three = BigInt::from(3u32);
    let four = BigInt::from(4u32);
    for part in [x.numer().abs(), x.denom().abs()] {
        for (p, k) in factor(&part, budget)? {
            if k % 2 == 1 && &p % &four == three {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether x and y differ by a norm from Q(i).
pub fn norm_class_equal(x: &Rat, y: &Rat, budget: &mut FactorBudget) -> Result<bool, NtError> {
    if x.is_zero() || y.is_zero() {
        return Err(NtError::ZeroArgument);
    }
    is_norm_from_qi(&(x / y), budget)
}

/// Canonical representative of x modulo norms from Q(i): ±∏ of the primes
/// ≡ 3 (mod 4) dividing x to odd order, with the sign of x.
pub fn qi_class_canonical(x: &Rat, budget: &mut FactorBudget) -> Result<BigInt, NtError> {
    if x.is_zero() {
        return Err(NtError::ZeroArgument);
    }
    let three = BigInt::from(3u32);
    let four = BigInt::from(4u32);
    let mut rep = BigInt::one();
    let combined = x.numer().abs() * x.denom().abs();
    for (p, k) in factor(&combined, budget)? {
        if k % 2 == 1 && &p % &four == three {
            rep *= p;
        }
    }
    if x.is_negative() {
        rep = -rep;
    }
    Ok(rep)
}

/// Canonical representative of x modulo nonzero rational squares: its
/// signed squarefree part.
pub fn square_class_canonical(x: &Rat, budget: &mut FactorBudget) -> Result<BigInt, NtError> {
    if x.is_zero() {
        return Err(NtError::ZeroArgument);
    }
    let mut rep = BigInt::one();
    let combined = x.numer().abs() * x.denom().abs();
    for (p, k) in factor(&combined, budget)? {
        if k % 2 == 1 {
            rep *= p;
        }
    }
    if x.is_negative() {
        rep = -rep;
    }
    Ok(rep)
}

/// First `count` positive solutions of x² = 2y² + 1, ascending.
pub fn pell_solutions(count: usize) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::with_capacity(count);
    let mut x = BigInt::from(3u32);
    let mut y = BigInt::from(2u32);
    for _ in 0..count {
        out.push((x.clone(), y.clone()));
        let nx = BigInt::from(3u32) * &x + BigInt::from(4u32) * &y;
        let ny = BigInt::from(2u32) * &x + BigInt::from(3u32) * &y;
        x = nx;
        y = ny;
    }
    out
}

/// Smallest odd multiple a = kq of q such that 2a² + 1 is not a perfect
/// square. The spacing of Pell solutions guarantees k = 1 or k = 3 works;
/// the loop is exact regardless.
pub fn non_square_multiple(q: &BigInt) -> BigInt {
    assert!(q.sign() == Sign::Plus);
    let mut k = BigInt::one();
    loop {
        let a = &k * q;
        let m = BigInt::from(2u32) * &a * &a + BigInt::one();
        if m.sqrt().pow(2) != m {
            return a;
        }
        k += BigInt::from(2u32);
    }
}

/// The sequence (a_i, p_i) of coefficients and dual primes.
///
/// a_1 = 1, p_1 = 3. For n > 1, a_n is the smallest odd non-square-producing
/// multiple of ∏_{j<n} (2a_j²+1)(2a_j⁴+4a_j²+1), and p_n is the smallest
/// prime ≡ 3 (mod 4) dividing 2a_n²+1 to odd order. Such a prime exists
/// because 2a²+1 ≡ 3 (mod 8) for odd a. On budget exhaustion the sequence
/// is returned truncated with the flag set.
#[derive(Debug, Clone)]
pub struct DualSequence {
    pub pairs: Vec<(BigInt, BigInt)>,
    pub truncated: bool,
}

pub fn dual_sequence(count: usize, budget: &mut FactorBudget) -> DualSequence {
    let mut pairs: Vec<(BigInt, BigInt)> = Vec::new();
    if count == 0 {
        return DualSequence { pairs, truncated: false };
    }
    pairs.push((BigInt::one(), BigInt::from(3u32)));
    while pairs.len() < count {
        let mut q = BigInt::one();
        for (a, _) in &pairs {
            let f1 = BigInt::from(2u32) * a.pow(2) + 1;
            let f2 = BigInt::from(2u32) * a.pow(4) + BigInt::from(4u32) * a.pow(2) + 1;
            q *= f1 * f2;
        }
        let a = non_square_multiple(&q);
        let m = BigInt::from(2u32) * a.pow(2) + 1;
        let factors = match factor(&m, budget) {
            Ok(fs) => fs,
            Err(NtError::BudgetExhausted) => {
                return DualSequence { pairs, truncated: true };
            }
            Err(e) => unreachable!("factor: {e}"),
        };
        let three = BigInt::from(3u32);
        let four = BigInt::from(4u32);
        let p = factors
            .iter()
            .find(|(p, k)| k % 2 == 1 && p % &four == three)
            .map(|(p, _)| p.clone())
            .expect("2a²+1 ≡ 3 (mod 8) forces an odd-order prime ≡ 3 (mod 4)");
        pairs.push((a, p));
    }
    DualSequence { pairs, truncated: false }
}

/// The two defining symbol families of the sequence, evaluated directly:
/// at p_i the factor 2a_i²+1 has symbol −1 against −1 and 2a_i⁴+4a_i²+1 has
/// symbol +1; at p_j with j ≠ i both factors of index i have symbol +1.
pub fn dual_sequence_certificates(
    seq: &DualSequence,
) -> Result<(Vec<SymbolCertificate>, bool), NtError> {
    let mut certs = Vec::new();
    let mut ok = true;
    let minus_one = Rat::from_integer(BigInt::from(-1));
    for (i, (a_i, _)) in seq.pairs.iter().enumerate() {
        let f1 = Rat::from_integer(BigInt::from(2u32) * a_i.pow(2) + 1);
        let f2 = Rat::from_integer(
            BigInt::from(2u32) * a_i.pow(4) + BigInt::from(4u32) * a_i.pow(2) + 1,
        );
        for (j, (_, p_j)) in seq.pairs.iter().enumerate() {
            let c1 = SymbolCertificate::evaluate(f1.clone(), minus_one.clone(), p_j.clone())?;
            let c2 = SymbolCertificate::evaluate(f2.clone(), minus_one.clone(), p_j.clone())?;
            let expect1: i8 = if i == j { -1 } else { 1 };
            if c1.value != expect1 || c2.value != 1 {
                ok = false;
            }
            certs.push(c1);
            certs.push(c2);
        }
    }
    Ok((certs, ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64) -> Rat {
        Rat::from_integer(BigInt::from(n))
    }

    fn ratio(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn primality_knowns() {
        assert!(is_probable_prime(&BigInt::from(883u32)));
        assert!(is_probable_prime(&BigInt::from(1_000_003u64)));
        assert!(!is_probable_prime(&BigInt::from(1_000_001u64))); // 101 · 9901
        assert!(is_probable_prime(&"170141183460469231731687303715884105727".parse().unwrap()));
    }

    #[test]
    fn factor_recovers_known_products() {
        let mut b = FactorBudget::standard();
        let n = BigInt::from(2u32).pow(5) * BigInt::from(883u32) * BigInt::from(1_000_003u64).pow(2);
        let fs = factor(&n, &mut b).unwrap();
        assert_eq!(
            fs,
            vec![
                (BigInt::from(2u32), 5),
                (BigInt::from(883u32), 1),
                (BigInt::from(1_000_003u64), 2)
            ]
        );
    }

    #[test]
    fn factor_reports_budget_exhaustion() {
        // Product of two 30-digit primes; a tiny budget cannot split it.
        let p: BigInt = "618970019642690137449562111".parse().unwrap(); // 2^89 − 1
        let q: BigInt = "162259276829213363391578010288127".parse().unwrap(); // 2^107 − 1
        let n = p * q;
        let mut b = FactorBudget::new(64);
        assert_eq!(factor(&n, &mut b), Err(NtError::BudgetExhausted));
    }

    #[test]
    fn valuations_of_rationals() {
        let three = BigInt::from(3u32);
        assert_eq!(valuation(&ratio(18, 5), &three).unwrap(), 2);
        assert_eq!(valuation(&ratio(5, 27), &three).unwrap(), -3);
        assert_eq!(valuation(&ratio(-7, 11), &three).unwrap(), 0);
    }

    #[test]
    fn symbol_known_values() {
        let p3 = BigInt::from(3u32);
        let p5 = BigInt::from(5u32);
        let p7 = BigInt::from(7u32);
        // (x, −1)_p = −1 exactly when v_p(x) is odd and p ≡ 3 (mod 4).
        assert_eq!(norm_residue_symbol(&rat(3), &rat(-1), &p3).unwrap(), -1);
        assert_eq!(norm_residue_symbol(&rat(21), &rat(-1), &p3).unwrap(), -1);
        assert_eq!(norm_residue_symbol(&rat(9), &rat(-1), &p3).unwrap(), 1);
        assert_eq!(norm_residue_symbol(&rat(5), &rat(-1), &p5).unwrap(), 1);
        assert_eq!(norm_residue_symbol(&rat(7), &rat(-1), &p7).unwrap(), -1);
        assert_eq!(norm_residue_symbol(&rat(10), &rat(-1), &p7).unwrap(), 1);
        // Two p-adic units pair trivially at an odd prime.
        assert_eq!(norm_residue_symbol(&rat(2), &rat(5), &p3).unwrap(), 1);
        // p = 2 and non-primes are rejected.
        assert!(matches!(
            norm_residue_symbol(&rat(3), &rat(5), &BigInt::from(2u32)),
            Err(NtError::NotOddPrime(_))
        ));
        assert!(matches!(
            norm_residue_symbol(&rat(3), &rat(5), &BigInt::from(15u32)),
            Err(NtError::NotOddPrime(_))
        ));
    }

    #[test]
    fn norm_test_matches_sum_of_two_squares() {
        let mut b = FactorBudget::standard();
        let brute = |n: i64| -> bool {
            let mut x = 0i64;
            while x * x <= n {
                let rest = n - x * x;
                let y = (rest as f64).sqrt() as i64;
                for yy in [y - 1, y, y + 1] {
                    if yy >= 0 && yy * yy == rest {
                        return true;
                    }
                }
                x += 1;
            }
            false
        };
        for n in 1..=300i64 {
            assert_eq!(
                is_norm_from_qi(&rat(n), &mut b).unwrap(),
                brute(n),
                "norm test disagrees at {n}"
            );
        }
        assert!(!is_norm_from_qi(&rat(-4), &mut b).unwrap());
        assert!(is_norm_from_qi(&ratio(9, 2), &mut b).unwrap());
        assert!(!is_norm_from_qi(&ratio(3, 5), &mut b).unwrap());
        assert!(norm_class_equal(&rat(6), &rat(3), &mut b).unwrap());
        assert!(!norm_class_equal(&rat(21), &rat(3), &mut b).unwrap());
    }

    #[test]
    fn canonical_class_representatives() {
        let mut b = FactorBudget::standard();
        assert_eq!(qi_class_canonical(&rat(105), &mut b).unwrap(), BigInt::from(21u32));
        assert_eq!(qi_class_canonical(&rat(50), &mut b).unwrap(), BigInt::one());
        assert_eq!(qi_class_canonical(&ratio(-3, 49), &mut b).unwrap(), BigInt::from(-3));
        assert_eq!(square_class_canonical(&ratio(18, 5), &mut b).unwrap(), BigInt::from(10u32));
    }

    #[test]
    fn pell_matches_exhaustive_search() {
        let mut brute = Vec::new();
        for y in 1i64..=10_000 {
            let m = 2 * y * y + 1;
            let x = (m as f64).sqrt() as i64;
            for xx in [x - 1, x, x + 1] {
                if xx > 0 && xx * xx == m {
                    brute.push((BigInt::from(xx), BigInt::from(y)));
                }
            }
        }
        assert_eq!(pell_solutions(brute.len()), brute);
        assert_eq!(pell_solutions(2), vec![(BigInt::from(3u32), BigInt::from(2u32)), (BigInt::from(17u32), BigInt::from(12u32))]);
    }

    #[test]
    fn non_square_multiples() {
        assert_eq!(non_square_multiple(&BigInt::one()), BigInt::one());
        assert_eq!(non_square_multiple(&BigInt::from(21u32)), BigInt::from(21u32));
    }

    #[test]
    fn dual_sequence_first_two_terms() {
        let mut b = FactorBudget::standard();
        let seq = dual_sequence(2, &mut b);
        assert!(!seq.truncated);
        assert_eq!(seq.pairs[0], (BigInt::one(), BigInt::from(3u32)));
        // q₂ = 3·7 = 21; 2·21²+1 = 883 is prime and ≡ 3 (mod 4).
        assert_eq!(seq.pairs[1], (BigInt::from(21u32), BigInt::from(883u32)));
        let (certs, ok) = dual_sequence_certificates(&seq).unwrap();
        assert!(ok, "defining symbol conditions failed");
        assert_eq!(certs.len(), 8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn symbol_is_symmetric_and_bilinear(
            an in prop_oneof![1i64..=60, -60i64..=-1],
            bn in prop_oneof![1i64..=60, -60i64..=-1],
            cn in prop_oneof![1i64..=60, -60i64..=-1],
            p in prop_oneof![Just(3i64), Just(5), Just(7), Just(11), Just(19)],
        ) {
            let p = BigInt::from(p);
            let (a, b, c) = (rat(an), rat(bn), rat(cn));
            let s_ab = norm_residue_symbol(&a, &b, &p).unwrap();
            let s_ba = norm_residue_symbol(&b, &a, &p).unwrap();
            prop_assert_eq!(s_ab, s_ba);
            let s_acb = norm_residue_symbol(&(&a * &c), &b, &p).unwrap();
            let s_cb = norm_residue_symbol(&c, &b, &p).unwrap();
            prop_assert_eq!(s_acb, s_ab * s_cb);
        }

        #[test]
        fn symbol_ignores_square_factors(
            an in prop_oneof![1i64..=40, -40i64..=-1],
            bn in prop_oneof![1i64..=40, -40i64..=-1],
            sq in 1i64..=12,
            p in prop_oneof![Just(3i64), Just(7), Just(11)],
        ) {
            let p = BigInt::from(p);
            let (a, b) = (rat(an), rat(bn));
            let scaled = &a * rat(sq * sq);
            prop_assert_eq!(
                norm_residue_symbol(&scaled, &b, &p).unwrap(),
                norm_residue_symbol(&a, &b, &p).unwrap()
            );
        }

        #[test]
        fn minus_one_symbol_formula(
            xn in prop_oneof![1i64..=200, -200i64..=-1],
            p in prop_oneof![Just(3i64), Just(5), Just(7), Just(11), Just(13), Just(19)],
        ) {
            let pb = BigInt::from(p);
            let x = rat(xn);
            let s = norm_residue_symbol(&x, &rat(-1), &pb).unwrap();
            let v = valuation(&x, &pb).unwrap();
            let expected = if v % 2 != 0 && p % 4 == 3 { -1 } else { 1 };
            prop_assert_eq!(s, expected);
        }
    }
}
