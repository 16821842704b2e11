//! The bigraded coefficient ring `R_p = F_p[tau, rho]`.
//!
//! `tau` sits in bidegree `(0,1)` and `rho` in `(1,1)`, so the monomial
//! `tau^a rho^b` has bidegree `(b, a+b)`. Elements are stored sparsely with
//! residues normalized to `0..p-1`; zero residues are never kept. A base mode
//! can specialize `rho` or `tau` to zero at construction time, modeling base
//! fields with a square root of -1 (rho = 0) or of characteristic 2 (tau = 0).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A pair (first degree, weight) with componentwise addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Bidegree {
    pub d: i64,
    pub w: i64,
}

impl Bidegree {
    pub const ZERO: Bidegree = Bidegree { d: 0, w: 0 };

    pub fn new(d: i64, w: i64) -> Self {
        Bidegree { d, w }
    }
}

impl std::ops::Add for Bidegree {
    type Output = Bidegree;
    fn add(self, rhs: Bidegree) -> Bidegree {
        Bidegree::new(self.d + rhs.d, self.w + rhs.w)
    }
}

impl std::ops::Sub for Bidegree {
    type Output = Bidegree;
    fn sub(self, rhs: Bidegree) -> Bidegree {
        Bidegree::new(self.d - rhs.d, self.w - rhs.w)
    }
}

impl std::iter::Sum for Bidegree {
    fn sum<I: Iterator<Item = Bidegree>>(iter: I) -> Bidegree {
        iter.fold(Bidegree::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.d, self.w)
    }
}

/// Which of tau, rho are specialized to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseMode {
    /// Both tau and rho are free polynomial generators.
    #[serde(rename = "generic")]
    Generic,
    /// rho = 0 (base field contains sqrt(-1), or any odd prime in practice).
    #[serde(rename = "rho0")]
    RhoZero,
    /// tau = 0 (characteristic-2 base field).
    #[serde(rename = "char2")]
    Char2TauZero,
}

impl BaseMode {
    pub fn kills_rho(self) -> bool {
        self == BaseMode::RhoZero
    }

    pub fn kills_tau(self) -> bool {
        self == BaseMode::Char2TauZero
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseMode::Generic => "generic",
            BaseMode::RhoZero => "rho0",
            BaseMode::Char2TauZero => "char2",
        }
    }
}

impl std::str::FromStr for BaseMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generic" => Ok(BaseMode::Generic),
            "rho0" | "rho-zero" => Ok(BaseMode::RhoZero),
            "char2" | "char2-tau-zero" => Ok(BaseMode::Char2TauZero),
            other => Err(Error::contract(format!("unknown base mode '{other}'"))),
        }
    }
}

impl fmt::Display for BaseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Homogeneity status of a coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    Zero,
    Homogeneous(Bidegree),
    Mixed,
}

impl Homogeneity {
    pub fn bidegree(self) -> Option<Bidegree> {
        match self {
            Homogeneity::Homogeneous(bd) => Some(bd),
            Homogeneity::Zero => Some(Bidegree::ZERO),
            Homogeneity::Mixed => None,
        }
    }
}

/// A sparse element of `F_p[tau, rho]` under a fixed prime and base mode.
///
/// Keys are `(tau exponent, rho exponent)`; values are residues in `1..p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coeff {
    prime: u32,
    mode: BaseMode,
    terms: BTreeMap<(u32, u32), u32>,
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Coeff {
    pub fn zero(prime: u32, mode: BaseMode) -> Self {
        debug_assert!(is_prime(prime));
        Coeff {
            prime,
            mode,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(prime: u32, mode: BaseMode) -> Self {
        Coeff::scalar(1, prime, mode)
    }

    pub fn scalar(c: u64, prime: u32, mode: BaseMode) -> Self {
        Coeff::monomial(c, 0, 0, prime, mode)
    }

    pub fn tau(prime: u32, mode: BaseMode) -> Self {
        Coeff::monomial(1, 1, 0, prime, mode)
    }

    pub fn rho(prime: u32, mode: BaseMode) -> Self {
        Coeff::monomial(1, 0, 1, prime, mode)
    }

    /// `c * tau^a * rho^b`, normalized; terms killed by the mode vanish here.
    pub fn monomial(c: u64, a: u32, b: u32, prime: u32, mode: BaseMode) -> Self {
        debug_assert!(is_prime(prime));
        let mut out = Coeff::zero(prime, mode);
        let r = (c % prime as u64) as u32;
        if r == 0 || (a > 0 && mode.kills_tau()) || (b > 0 && mode.kills_rho()) {
            return out;
        }
        out.terms.insert((a, b), r);
        out
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn mode(&self) -> BaseMode {
        self.mode
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&(0, 0)) == Some(&1)
    }

    /// Iterator over `(tau exp, rho exp, residue)`.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        self.terms.iter().map(|(&(a, b), &r)| (a, b, r))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn check_compat(&self, other: &Coeff) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::contract(format!(
                "prime mismatch: {} vs {}",
                self.prime, other.prime
            )));
        }
        if self.mode != other.mode {
            return Err(Error::contract(format!(
                "base mode mismatch: {} vs {}",
                self.mode, other.mode
            )));
        }
        Ok(())
    }

    pub(crate) fn add_monomial(&mut self, a: u32, b: u32, r: u64) {
        if (a > 0 && self.mode.kills_tau()) || (b > 0 && self.mode.kills_rho()) {
            return;
        }
        let p = self.prime as u64;
        let entry = self.terms.entry((a, b)).or_insert(0);
        let v = (*entry as u64 + r % p) % p;
        if v == 0 {
            self.terms.remove(&(a, b));
        } else {
            *entry = v as u32;
        }
    }

    pub(crate) fn add_assign(&mut self, other: &Coeff) {
        debug_assert_eq!(self.prime, other.prime);
        debug_assert_eq!(self.mode, other.mode);
        for (a, b, r) in other.terms() {
            self.add_monomial(a, b, r as u64);
        }
    }

    pub fn checked_add(&self, other: &Coeff) -> Result<Coeff> {
        self.check_compat(other)?;
        let mut out = self.clone();
        out.add_assign(other);
        Ok(out)
    }

    /// Exact product; the public entry point validating prime/mode.
    pub fn checked_mul(&self, other: &Coeff) -> Result<Coeff> {
        self.check_compat(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Coeff) -> Coeff {
        debug_assert_eq!(self.prime, other.prime);
        debug_assert_eq!(self.mode, other.mode);
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let p = self.prime as u64;
        let mut out = Coeff::zero(self.prime, self.mode);
        for (a1, b1, r1) in self.terms() {
            for (a2, b2, r2) in other.terms() {
                out.add_monomial(a1 + a2, b1 + b2, (r1 as u64 * r2 as u64) % p);
            }
        }
        out
    }

    pub fn neg(&self) -> Coeff {
        let p = self.prime;
        let mut out = Coeff::zero(self.prime, self.mode);
        for (a, b, r) in self.terms() {
            out.terms.insert((a, b), p - r);
        }
        out
    }

    pub fn scale(&self, c: u64) -> Coeff {
        let p = self.prime as u64;
        let c = c % p;
        let mut out = Coeff::zero(self.prime, self.mode);
        if c == 0 {
            return out;
        }
        for (a, b, r) in self.terms() {
            let v = (r as u64 * c) % p;
            if v != 0 {
                out.terms.insert((a, b), v as u32);
            }
        }
        out
    }

    /// Bidegree of `tau^a rho^b` is `(b, a+b)`.
    pub fn monomial_bidegree(a: u32, b: u32) -> Bidegree {
        Bidegree::new(b as i64, a as i64 + b as i64)
    }

    pub fn bidegree(&self) -> Homogeneity {
        let mut it = self.terms();
        let first = match it.next() {
            None => return Homogeneity::Zero,
            Some((a, b, _)) => Coeff::monomial_bidegree(a, b),
        };
        for (a, b, _) in it {
            if Coeff::monomial_bidegree(a, b) != first {
                return Homogeneity::Mixed;
            }
        }
        Homogeneity::Homogeneous(first)
    }

    /// Evaluate at numeric `(tau, rho)`; used by the specialization oracles.
    pub fn eval(&self, tau: u32, rho: u32) -> u32 {
        let p = self.prime as u64;
        let mut acc = 0u64;
        for (a, b, r) in self.terms() {
            let mut v = r as u64;
            v = v * pow_mod(tau as u64, a, p) % p;
            v = v * pow_mod(rho as u64, b, p) % p;
            acc = (acc + v) % p;
        }
        acc as u32
    }

    /// Exact division in `F_p[tau,rho]`; `None` when the division is not exact.
    /// Fraction-free elimination only ever divides by earlier pivots, so a
    /// `None` there indicates a bug, not bad input.
    pub fn exact_div(&self, divisor: &Coeff) -> Option<Coeff> {
        debug_assert_eq!(self.prime, divisor.prime);
        debug_assert_eq!(self.mode, divisor.mode);
        if divisor.is_zero() {
            return None;
        }
        let p = self.prime as u64;
        let mut rem = self.clone();
        let mut quot = Coeff::zero(self.prime, self.mode);
        // lex-leading term of the divisor
        let (&(da, db), &dr) = divisor.terms.iter().next_back().unwrap();
        let dr_inv = pow_mod(dr as u64, p as u32 - 2, p);
        while let Some((&(ra, rb), &rr)) = rem.terms.iter().next_back() {
            if ra < da || rb < db {
                return None;
            }
            let (qa, qb) = (ra - da, rb - db);
            let qr = rr as u64 * dr_inv % p;
            quot.add_monomial(qa, qb, qr);
            // rem -= q_term * divisor
            for (a2, b2, r2) in divisor.terms() {
                let v = qr * r2 as u64 % p;
                rem.add_monomial(qa + a2, qb + b2, (p - v) % p);
            }
        }
        Some(quot)
    }
}

fn pow_mod(mut base: u64, mut exp: u32, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Canonical printing: residue, then tau power, then rho power, with `1*`
/// and `^1` suppressed. A zero coefficient prints as `0`.
impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut monos: Vec<(u32, u32, u32)> = self.terms().collect();
        monos.sort_by_key(|&(a, b, _)| (a + b, std::cmp::Reverse(a)));
        let rendered: Vec<String> = monos
            .into_iter()
            .map(|(a, b, r)| display_coeff_monomial(a, b, r))
            .collect();
        f.write_str(&rendered.join(" + "))
    }
}

pub(crate) fn display_coeff_monomial(a: u32, b: u32, r: u32) -> String {
    let mut parts: Vec<String> = Vec::new();
    if r != 1 || (a == 0 && b == 0) {
        parts.push(r.to_string());
    }
    if a > 0 {
        parts.push(if a == 1 {
            "tau".to_string()
        } else {
            format!("tau^{a}")
        });
    }
    if b > 0 {
        parts.push(if b == 1 {
            "rho".to_string()
        } else {
            format!("rho^{b}")
        });
    }
    parts.join("*")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(prime: u32, mode: BaseMode) -> (Coeff, Coeff) {
        (Coeff::tau(prime, mode), Coeff::rho(prime, mode))
    }

    #[test]
    fn tau_times_rho() {
        let (tau, rho) = c(2, BaseMode::Generic);
        let prod = tau.checked_mul(&rho).unwrap();
        assert_eq!(prod, Coeff::monomial(1, 1, 1, 2, BaseMode::Generic));
        assert_eq!(
            prod.bidegree(),
            Homogeneity::Homogeneous(Bidegree::new(1, 2))
        );
    }

    #[test]
    fn freshmans_dream_at_p2() {
        let (tau, rho) = c(2, BaseMode::Generic);
        let sum = tau.checked_add(&rho).unwrap();
        let sq = sum.checked_mul(&sum).unwrap();
        let mut expect = Coeff::monomial(1, 2, 0, 2, BaseMode::Generic);
        expect.add_assign(&Coeff::monomial(1, 0, 2, 2, BaseMode::Generic));
        assert_eq!(sq, expect);
    }

    #[test]
    fn rho_zero_mode_kills_rho() {
        let (tau, rho) = c(2, BaseMode::RhoZero);
        assert!(rho.is_zero());
        assert!(rho.checked_mul(&tau).unwrap().is_zero());
    }

    #[test]
    fn bidegrees_of_generators() {
        let (tau, rho) = c(2, BaseMode::Generic);
        assert_eq!(
            tau.bidegree(),
            Homogeneity::Homogeneous(Bidegree::new(0, 1))
        );
        let rho2 = rho.checked_mul(&rho).unwrap();
        assert_eq!(
            rho2.bidegree(),
            Homogeneity::Homogeneous(Bidegree::new(2, 2))
        );
        assert_eq!(
            Coeff::one(2, BaseMode::Generic).bidegree(),
            Homogeneity::Homogeneous(Bidegree::ZERO)
        );
    }

    #[test]
    fn inhomogeneous_detected() {
        let (tau, rho) = c(3, BaseMode::Generic);
        let sum = tau.checked_add(&rho).unwrap();
        assert_eq!(sum.bidegree(), Homogeneity::Mixed);
    }

    #[test]
    fn prime_mismatch_rejected() {
        let a = Coeff::tau(2, BaseMode::Generic);
        let b = Coeff::tau(3, BaseMode::Generic);
        assert!(a.checked_mul(&b).is_err());
        let c = Coeff::tau(2, BaseMode::RhoZero);
        assert!(a.checked_mul(&c).is_err());
    }

    #[test]
    fn printing_is_canonical() {
        let mut x = Coeff::monomial(3, 2, 1, 5, BaseMode::Generic);
        assert_eq!(x.to_string(), "3*tau^2*rho");
        x.add_assign(&Coeff::one(5, BaseMode::Generic));
        assert_eq!(x.to_string(), "1 + 3*tau^2*rho");
        assert_eq!(Coeff::zero(5, BaseMode::Generic).to_string(), "0");
        assert_eq!(Coeff::tau(5, BaseMode::Generic).to_string(), "tau");
    }

    #[test]
    fn exact_division_roundtrip() {
        let p = 5;
        let m = BaseMode::Generic;
        let mut f = Coeff::monomial(2, 3, 1, p, m);
        f.add_assign(&Coeff::monomial(4, 1, 2, p, m));
        let mut g = Coeff::monomial(3, 1, 0, p, m);
        g.add_assign(&Coeff::monomial(1, 0, 1, p, m));
        let fg = f.mul_unchecked(&g);
        assert_eq!(fg.exact_div(&g).unwrap(), f);
        assert_eq!(fg.exact_div(&f).unwrap(), g);
        // non-exact division fails
        let h = Coeff::monomial(1, 5, 5, p, m);
        assert!(h.exact_div(&g).is_none());
    }
}
