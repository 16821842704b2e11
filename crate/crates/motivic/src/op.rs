//! The motivic Steenrod algebra `A^{*,*}` in the Milnor basis.
//!
//! A basis operation is indexed by the same `(E, R)` data as the dual
//! monomial it pairs to 1 against; everything else pairs to 0. Products of
//! operations are computed *only* by dualizing the coproduct of `A_{*,*}`:
//! the coefficient of a basis operation in `a*b` is the pairing of the
//! corresponding Milnor monomial's coproduct against `a (x) b`. Adem
//! relations are never encoded; any relation table is a derived artifact.
//!
//! Products compose right-to-left: `a*b` means "apply `b`, then `a`".
//!
//! Coefficients act on operations with the *additive* degree convention:
//! `deg(c * th) = deg(c) + deg(th)`, dual to the subtraction convention on
//! `A_{*,*}`. Right multiplication by a coefficient (an operation composed
//! with cup product by a base class) is again computed by duality, through
//! the right unit `eta_R`; this is where `Sq^1 * tau = rho + tau * Sq^1`
//! comes from.

use crate::coeff::{BaseMode, Bidegree, Coeff, Homogeneity};
use crate::dual::{format_tensor_terms, format_terms, Algebra, DualElement, Monomial};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Finite `F_p[tau,rho]`-linear combination of Milnor-basis operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpElement {
    prime: u32,
    mode: BaseMode,
    terms: BTreeMap<Monomial, Coeff>,
}

impl OpElement {
    pub fn zero(prime: u32, mode: BaseMode) -> Self {
        OpElement {
            prime,
            mode,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(prime: u32, mode: BaseMode) -> Self {
        let mut out = Self::zero(prime, mode);
        out.add_term(Monomial::one(), &Coeff::one(prime, mode));
        out
    }

    pub fn basis(m: Monomial, prime: u32, mode: BaseMode) -> Self {
        let mut out = Self::zero(prime, mode);
        out.add_term(m, &Coeff::one(prime, mode));
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&Coeff> {
        self.terms.get(m)
    }

    pub fn add_term(&mut self, m: Monomial, c: &Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign(c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &OpElement) {
        for (m, c) in other.terms() {
            self.add_term(m.clone(), c);
        }
    }

    pub fn scale(&self, c: &Coeff) -> OpElement {
        let mut out = OpElement::zero(self.prime, self.mode);
        for (m, cm) in self.terms() {
            out.add_term(m.clone(), &cm.mul_unchecked(c));
        }
        out
    }

    pub fn neg(&self) -> OpElement {
        let mut out = OpElement::zero(self.prime, self.mode);
        for (m, cm) in self.terms() {
            out.add_term(m.clone(), &cm.neg());
        }
        out
    }

    pub fn sub(&self, other: &OpElement) -> OpElement {
        let mut out = self.clone();
        out.add_assign(&other.neg());
        out
    }

    /// Bidegrees of all (coefficient monomial, basis) pairs; the additive
    /// convention `deg(c*th) = deg(c) + deg(th)`.
    pub fn term_bidegrees(&self) -> BTreeSet<Bidegree> {
        let mut out = BTreeSet::new();
        for (m, c) in self.terms() {
            let mbd = m.bidegree(self.prime);
            for (a, b, _) in c.terms() {
                out.insert(mbd + Coeff::monomial_bidegree(a, b));
            }
        }
        out
    }

    pub fn bidegree(&self) -> Homogeneity {
        let degs = self.term_bidegrees();
        match degs.len() {
            0 => Homogeneity::Zero,
            1 => Homogeneity::Homogeneous(*degs.iter().next().unwrap()),
            _ => Homogeneity::Mixed,
        }
    }

    /// Largest generator index appearing in the support.
    pub fn max_index(&self) -> Option<u8> {
        self.terms.keys().filter_map(|m| m.max_index()).max()
    }

    pub fn max_first_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| m.bidegree(self.prime).d)
            .max()
            .unwrap_or(0)
    }
}

/// Canonical name for a basis operation: `Qi` for a single tau-dual,
/// `QE{..}` for several, `Pi` for `xi_1^i`-duals, `qt` for a single
/// higher xi-dual, otherwise the underlying monomial.
pub fn op_name(m: &Monomial) -> String {
    if m.is_one() {
        return "1".to_string();
    }
    let taus: Vec<u8> = m.tau_indices().collect();
    let xis = m.xi_exponents();
    if xis.is_empty() {
        if taus.len() == 1 {
            return format!("Q{}", taus[0]);
        }
        let list: Vec<String> = taus.iter().map(|i| i.to_string()).collect();
        return format!("QE{{{}}}", list.join(","));
    }
    if taus.is_empty() && xis.len() == 1 {
        let (j, r) = xis[0];
        if j == 1 {
            return format!("P{r}");
        }
        if r == 1 {
            return format!("q{j}");
        }
    }
    m.to_string()
}

impl fmt::Display for OpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_terms(f, self.prime, self.terms.iter(), op_name)
    }
}

/// An element of `A^{*,*} (x)_H A^{*,*}` in canonical form (coefficients on
/// the left of the left factor).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpTensor {
    prime: u32,
    mode: BaseMode,
    terms: BTreeMap<(Monomial, Monomial), Coeff>,
}

impl OpTensor {
    pub fn zero(prime: u32, mode: BaseMode) -> Self {
        OpTensor {
            prime,
            mode,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(prime: u32, mode: BaseMode) -> Self {
        let mut out = Self::zero(prime, mode);
        out.add_term(Monomial::one(), Monomial::one(), &Coeff::one(prime, mode));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Monomial), &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, x: &Monomial, y: &Monomial) -> Option<&Coeff> {
        self.terms.get(&(x.clone(), y.clone()))
    }

    pub fn add_term(&mut self, x: Monomial, y: Monomial, c: &Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((x, y)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign(c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &OpTensor) {
        for ((x, y), c) in other.terms() {
            self.add_term(x.clone(), y.clone(), c);
        }
    }
}

impl fmt::Display for OpTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_tensor_terms(f, self.prime, self.terms.iter(), op_name)
    }
}

/// The closed Cartan forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CartanKind {
    /// `P^i` at any prime (at p = 2 this is the even square `Sq^{2i}`).
    P,
    /// `Sq^{2i}` (p = 2 only).
    SqEven,
    /// `Sq^{2i+1}` (p = 2 only).
    SqOdd,
    /// The Bockstein.
    Beta,
}

impl Algebra {
    // ------------------------------------------------------------------
    // named classes

    /// `Q_E`: the operation dual to the square-free tau monomial on `E`.
    pub fn q_class(&self, indices: &[u8]) -> OpElement {
        OpElement::basis(Monomial::tau_set(indices), self.prime(), self.mode())
    }

    /// `Q_t`, the Milnor primitive dual to `tau_t`.
    pub fn milnor_primitive(&self, t: u8) -> OpElement {
        OpElement::basis(Monomial::tau(t), self.prime(), self.mode())
    }

    /// The Bockstein `Q_0`.
    pub fn bockstein(&self) -> OpElement {
        self.milnor_primitive(0)
    }

    /// `P^i`, dual to `xi_1^i`; `P^0` is the identity.
    pub fn p_power(&self, i: u32) -> OpElement {
        OpElement::basis(Monomial::xi(1, i), self.prime(), self.mode())
    }

    /// `(0,...,0,1)` with the 1 in slot `t`: the operation dual to `xi_t`.
    pub fn q_lower(&self, t: u8) -> OpElement {
        OpElement::basis(Monomial::xi(t, 1), self.prime(), self.mode())
    }

    /// `Sq^n` at p = 2: `Sq^{2i} = P^i` and `Sq^{2i+1} = beta P^i`.
    pub fn sq(&self, n: u32) -> Result<OpElement> {
        if self.prime() != 2 {
            return Err(Error::contract("Sq is only defined at p = 2"));
        }
        if n % 2 == 0 {
            Ok(self.p_power(n / 2))
        } else {
            self.op_mul(&self.bockstein(), &self.p_power(n / 2))
        }
    }

    /// The monomial class `M_k = P^{p^{k-1}} ... P^p P^1` as a composite
    /// product (`M_0` is the identity).
    pub fn m_class(&self, k: u8) -> Result<OpElement> {
        let mut acc = OpElement::unit(self.prime(), self.mode());
        for e in (0..k).rev() {
            let power = crate::dual::pow_u32(self.prime(), e);
            acc = self.op_mul(&acc, &self.p_power(power))?;
        }
        Ok(acc)
    }

    pub fn op_bidegree_of_basis(&self, m: &Monomial) -> Bidegree {
        m.bidegree(self.prime())
    }

    // ------------------------------------------------------------------
    // pairing

    /// The duality pairing `A_{*,*} x A^{*,*} -> F_p[tau,rho]`: Kronecker
    /// delta on basis pairs, coefficients multiplying out.
    pub fn pair(&self, x: &DualElement, th: &OpElement) -> Result<Coeff> {
        self.check_element(x.prime(), x.mode())?;
        self.check_element(th.prime, th.mode)?;
        let mut out = self.coeff_zero();
        for (m, cx) in x.terms() {
            if let Some(ct) = th.terms.get(m) {
                out.add_assign(&cx.mul_unchecked(ct));
            }
        }
        Ok(out)
    }

    // ------------------------------------------------------------------
    // products by dualization

    /// Basis operations whose coefficient can be nonzero in an element of
    /// bidegree `bd` (coefficients add degree on the operation side).
    fn op_candidates(&self, bd: Bidegree) -> Vec<Monomial> {
        let mut out = Vec::new();
        if bd.d < 0 || bd.w < 0 {
            return out;
        }
        for b in 0..=bd.d {
            if b > 0 && self.mode().kills_rho() {
                break;
            }
            let mut a = 0i64;
            while a + b <= bd.w {
                if a > 0 && self.mode().kills_tau() {
                    break;
                }
                let target = Bidegree::new(bd.d - b, bd.w - a - b);
                out.extend(self.dual_basis(target).iter().cloned());
                a += 1;
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn window_check(&self, bd: Bidegree, what: &str) -> Result<()> {
        if bd.d > self.max_d() {
            return Err(Error::window(format!(
                "{what} at bidegree {bd} exceeds max first degree {}",
                self.max_d()
            )));
        }
        Ok(())
    }

    /// Product of two basis operations, cached.
    fn op_mul_basis(&self, m1: &Monomial, m2: &Monomial) -> Result<Arc<OpElement>> {
        if let Some(inner) = self.op_mul_cache().read().unwrap().get(m1) {
            if let Some(hit) = inner.get(m2) {
                return Ok(hit.clone());
            }
        }
        let bd = m1.bidegree(self.prime()) + m2.bidegree(self.prime());
        self.window_check(bd, "operation product")?;
        let mut out = OpElement::zero(self.prime(), self.mode());
        for k in self.op_candidates(bd) {
            let phi = self.coproduct_mono(&k);
            if let Some(c) = phi.coefficient(m1, m2) {
                out.add_term(k, c);
            }
        }
        let out = Arc::new(out);
        self.op_mul_cache()
            .write()
            .unwrap()
            .entry(m1.clone())
            .or_default()
            .insert(m2.clone(), out.clone());
        Ok(out)
    }

    /// `a * b = a . b`: on basis operations, the unique element pairing
    /// against every Milnor monomial the way `phi_*` pairs against
    /// `a (x) b`. Coefficients on the right factor cross through the right
    /// unit, `a . (c b) = (a * c) . b`, which is what keeps composition
    /// associative; coefficients on the left pull straight out.
    pub fn op_mul(&self, a: &OpElement, b: &OpElement) -> Result<OpElement> {
        self.check_element(a.prime, a.mode)?;
        self.check_element(b.prime, b.mode)?;
        let mut out = OpElement::zero(self.prime(), self.mode());
        for (m2, c2) in b.terms() {
            let left = self.op_right_mul(a, c2)?;
            for (m1, c1) in left.terms() {
                let prod = self.op_mul_basis(m1, m2)?;
                for (m, cm) in prod.terms() {
                    out.add_term(m.clone(), &cm.mul_unchecked(c1));
                }
            }
        }
        Ok(out)
    }

    /// Right multiplication of an operation by a coefficient: the composite
    /// `th . (c cup -)`. Determined by duality through the right unit:
    /// `<w, th*c> = <w * eta_R(c), th>`.
    pub fn op_right_mul(&self, th: &OpElement, c: &Coeff) -> Result<OpElement> {
        self.check_element(th.prime, th.mode)?;
        self.check_element(c.prime(), c.mode())?;
        let mut out = OpElement::zero(self.prime(), self.mode());
        for (a, b, r) in c.terms() {
            let cm = Coeff::monomial(r as u64, a, b, self.prime(), self.mode());
            if a == 0 || self.prime() != 2 || self.mode() != BaseMode::Generic {
                // central coefficient
                out.add_assign(&th.scale(&cm));
                continue;
            }
            let eta = self.eta_r(&cm);
            let shift = Coeff::monomial_bidegree(a, b);
            for pd in th.term_bidegrees() {
                let bd = pd + shift;
                self.window_check(bd, "coefficient twist")?;
            }
            let mut degs: BTreeSet<Bidegree> = BTreeSet::new();
            for pd in th.term_bidegrees() {
                degs.insert(pd + shift);
            }
            let mut candidates: BTreeSet<Monomial> = BTreeSet::new();
            for bd in degs {
                candidates.extend(self.op_candidates(bd));
            }
            for k in candidates {
                let w = DualElement::monomial(k.clone(), self.coeff_one());
                let twisted = self.dual_mul(&w, &eta)?;
                let ck = self.pair(&twisted, th)?;
                out.add_term(k, &ck);
            }
        }
        Ok(out)
    }

    // ------------------------------------------------------------------
    // comultiplication

    /// `psi*(th)`: dualize the product of `A_{*,*}`. Satisfies
    /// `<x*y, th> = <x (x) y, psi*(th)>` for all basis `x`, `y`.
    pub fn op_coproduct(&self, th: &OpElement) -> Result<OpTensor> {
        self.check_element(th.prime, th.mode)?;
        let mut out = OpTensor::zero(self.prime(), self.mode());
        if th.is_zero() {
            return Ok(out);
        }
        let degs = th.term_bidegrees();
        let dmax = degs.iter().map(|bd| bd.d).max().unwrap();
        let wmax = degs.iter().map(|bd| bd.w).max().unwrap();
        self.window_check(Bidegree::new(dmax, wmax), "operation coproduct")?;
        let all = self.basis_bidegrees_up_to(dmax);
        for (bd1, basis1) in &all {
            if bd1.w > wmax {
                continue;
            }
            for (bd2, basis2) in &all {
                if bd1.d + bd2.d > dmax || bd1.w + bd2.w > wmax {
                    continue;
                }
                for m1 in basis1.iter() {
                    for m2 in basis2.iter() {
                        let prod = self.mono_mul(m1, m2);
                        let mut c = self.coeff_zero();
                        for (m, cm) in prod.terms() {
                            if let Some(ct) = th.terms.get(m) {
                                c.add_assign(&cm.mul_unchecked(ct));
                            }
                        }
                        out.add_term(m1.clone(), m2.clone(), &c);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Canonical form of `c * (a (x) b)`. Scalar coefficients are central
    /// across the tensor sign (they pull out of a smash product), so this
    /// is a plain bilinear expansion.
    pub fn op_tensor_from(&self, a: &OpElement, b: &OpElement, c: &Coeff) -> Result<OpTensor> {
        let mut out = OpTensor::zero(self.prime(), self.mode());
        for (mb, cb) in b.terms() {
            for (ma, ca) in a.terms() {
                let cc = ca.mul_unchecked(cb).mul_unchecked(c);
                out.add_term(ma.clone(), mb.clone(), &cc);
            }
        }
        Ok(out)
    }

    /// Componentwise product of operation tensors with the Koszul sign on
    /// the first grading. A scalar on the *right operand* must pass through
    /// the left operand's operations, which is a composition and therefore
    /// twists: `(a1 (x) b1) . c = (a1 * c) (x) b1`. Scalars emerging from
    /// the factor products are already plain and pull straight out.
    pub fn op_tensor_mul(&self, t1: &OpTensor, t2: &OpTensor) -> Result<OpTensor> {
        let mut out = OpTensor::zero(self.prime(), self.mode());
        for ((a1, b1), c1) in t1.terms() {
            for ((a2, b2), c2) in t2.terms() {
                let mut c = c1.clone();
                if self.prime() != 2 && b1.odd_first_degree() && a2.odd_first_degree() {
                    c = c.neg();
                }
                let a1c2 = self.op_right_mul(
                    &OpElement::basis(a1.clone(), self.prime(), self.mode()),
                    c2,
                )?;
                let left = self.op_mul(
                    &a1c2,
                    &OpElement::basis(a2.clone(), self.prime(), self.mode()),
                )?;
                let right = self.op_mul_basis(b1, b2)?;
                for (mr, cr) in right.terms() {
                    for (ml, cl) in left.terms() {
                        let cc = cl.mul_unchecked(cr).mul_unchecked(&c);
                        out.add_term(ml.clone(), mr.clone(), &cc);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Apply `psi*` to an element, `H`-linearly on the left.
    pub fn op_coproduct_element(&self, th: &OpElement) -> Result<OpTensor> {
        self.op_coproduct(th)
    }

    // ------------------------------------------------------------------
    // Cartan closed forms

    /// The right-hand side of the Cartan formula as an explicit tensor.
    pub fn cartan_closed_form(&self, i: u32, kind: CartanKind) -> Result<OpTensor> {
        let p = self.prime();
        let one = self.coeff_one();
        match kind {
            CartanKind::Beta => {
                let beta = self.bockstein();
                let unit = OpElement::unit(p, self.mode());
                let mut out = self.op_tensor_from(&beta, &unit, &one)?;
                out.add_assign(&self.op_tensor_from(&unit, &beta, &one)?);
                Ok(out)
            }
            CartanKind::P if p != 2 => {
                let mut out = OpTensor::zero(p, self.mode());
                for r in 0..=i {
                    out.add_assign(&self.op_tensor_from(
                        &self.p_power(r),
                        &self.p_power(i - r),
                        &one,
                    )?);
                }
                Ok(out)
            }
            CartanKind::P | CartanKind::SqEven => {
                if p != 2 {
                    return Err(Error::contract("Sq Cartan forms require p = 2"));
                }
                let tau = Coeff::tau(p, self.mode());
                let mut out = OpTensor::zero(p, self.mode());
                for r in 0..=i {
                    out.add_assign(&self.op_tensor_from(
                        &self.sq(2 * r)?,
                        &self.sq(2 * i - 2 * r)?,
                        &one,
                    )?);
                }
                for s in 0..i {
                    out.add_assign(&self.op_tensor_from(
                        &self.sq(2 * s + 1)?,
                        &self.sq(2 * i - 2 * s - 1)?,
                        &tau,
                    )?);
                }
                Ok(out)
            }
            CartanKind::SqOdd => {
                if p != 2 {
                    return Err(Error::contract("Sq Cartan forms require p = 2"));
                }
                let rho = Coeff::rho(p, self.mode());
                let mut out = OpTensor::zero(p, self.mode());
                for r in 0..=i {
                    out.add_assign(&self.op_tensor_from(
                        &self.sq(2 * r + 1)?,
                        &self.sq(2 * i - 2 * r)?,
                        &one,
                    )?);
                    out.add_assign(&self.op_tensor_from(
                        &self.sq(2 * r)?,
                        &self.sq(2 * i - 2 * r + 1)?,
                        &one,
                    )?);
                }
                for s in 0..i {
                    out.add_assign(&self.op_tensor_from(
                        &self.sq(2 * s + 1)?,
                        &self.sq(2 * i - 2 * s - 1)?,
                        &rho,
                    )?);
                }
                Ok(out)
            }
        }
    }

    /// Closed form of `psi*(Q_t)`: primitive at odd primes, with rho-dusted
    /// `Q_I (x) Q_J` corrections at p = 2.
    pub fn qt_coproduct_closed_form(&self, t: u8) -> OpTensor {
        let p = self.prime();
        let one = self.coeff_one();
        let mut out = OpTensor::zero(p, self.mode());
        out.add_term(Monomial::tau(t), Monomial::one(), &one);
        out.add_term(Monomial::one(), Monomial::tau(t), &one);
        if p != 2 {
            return out;
        }
        for h in 1..=t {
            let pinned = t - h;
            let free: Vec<u8> = (pinned + 1..t).collect();
            let rho_h = Coeff::monomial(1, 0, h as u32, p, self.mode());
            for mask in 0..(1u32 << free.len()) {
                let mut i_set = vec![pinned];
                let mut j_set = vec![pinned];
                for (pos, &idx) in free.iter().enumerate() {
                    if mask >> pos & 1 == 1 {
                        i_set.push(idx);
                    } else {
                        j_set.push(idx);
                    }
                }
                let qi = Monomial::tau_set(&i_set);
                let qj = Monomial::tau_set(&j_set);
                out.add_term(qi, qj, &rho_h);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::Gen;

    fn alg(p: u32) -> Algebra {
        Algebra::new(p, BaseMode::Generic).unwrap()
    }

    fn dual_one_term(a: &Algebra, factors: &[(Gen, u32)]) -> DualElement {
        a.dual_from_factors(factors, &a.coeff_one())
    }

    #[test]
    fn pairing_examples() {
        let a = alg(2);
        let t0 = dual_one_term(&a, &[(Gen::Tau(0), 1)]);
        let xi1 = dual_one_term(&a, &[(Gen::Xi(1), 1)]);
        let q0 = a.bockstein();
        assert!(a.pair(&t0, &q0).unwrap().is_one());
        assert!(a.pair(&xi1, &q0).unwrap().is_zero());
        let tau_xi1 = xi1.scale(&Coeff::tau(2, BaseMode::Generic));
        assert!(a.pair(&tau_xi1, &q0).unwrap().is_zero());
    }

    #[test]
    fn bockstein_squares_to_zero() {
        for p in [2u32, 3] {
            let a = alg(p);
            let q0 = a.bockstein();
            assert!(a.op_mul(&q0, &q0).unwrap().is_zero());
        }
    }

    #[test]
    fn p0_is_the_identity() {
        let a = alg(3);
        let p0 = a.p_power(0);
        let mut th = a.milnor_primitive(1);
        th.add_assign(&a.p_power(2).scale(&Coeff::tau(3, BaseMode::Generic)));
        assert_eq!(a.op_mul(&p0, &th).unwrap(), th);
        assert_eq!(a.op_mul(&th, &p0).unwrap(), th);
    }

    #[test]
    fn commutator_identity_p2() {
        // Q_1 = Q_0 q_1 + q_1 Q_0 (a sum in characteristic 2)
        let a = alg(2);
        let q0 = a.bockstein();
        let q1_lower = a.q_lower(1);
        let mut sum = a.op_mul(&q0, &q1_lower).unwrap();
        sum.add_assign(&a.op_mul(&q1_lower, &q0).unwrap());
        assert_eq!(sum, a.milnor_primitive(1));
    }

    #[test]
    fn commutator_orientation_at_odd_primes() {
        // with products composing right-to-left the classical orientation is
        // Q_t = q_t Q_0 - Q_0 q_t at odd primes
        let a = alg(3);
        for t in 1..=2u8 {
            let q0 = a.bockstein();
            let qt_lower = a.q_lower(t);
            let lhs = a
                .op_mul(&qt_lower, &q0)
                .unwrap()
                .sub(&a.op_mul(&q0, &qt_lower).unwrap());
            assert_eq!(lhs, a.milnor_primitive(t), "t={t}");
        }
    }

    #[test]
    fn adem_anchor_p1_p1_at_p3() {
        // P^1 P^1 = 2 P^2 in the Milnor basis, the classical anchor value
        let a = alg(3);
        let p1 = a.p_power(1);
        let prod = a.op_mul(&p1, &p1).unwrap();
        let want = a.p_power(2).scale(&Coeff::scalar(2, 3, BaseMode::Generic));
        assert_eq!(prod, want);
    }

    #[test]
    fn coproduct_of_primitives() {
        let a3 = alg(3);
        let psi = a3.op_coproduct(&a3.milnor_primitive(1)).unwrap();
        assert_eq!(psi.to_string(), "Q1(x)1 + 1(x)Q1");

        let a2 = alg(2);
        let psi = a2.op_coproduct(&a2.milnor_primitive(1)).unwrap();
        assert_eq!(psi.to_string(), "Q1(x)1 + 1(x)Q1 + rho*Q0(x)Q0");

        let unit = OpElement::unit(2, BaseMode::Generic);
        let psi = a2.op_coproduct(&unit).unwrap();
        assert_eq!(psi.to_string(), "1(x)1");
    }

    #[test]
    fn qt_closed_form_matches_dualization() {
        for p in [2u32, 3] {
            let a = alg(p);
            for t in 0..=2u8 {
                let got = a.op_coproduct(&a.milnor_primitive(t)).unwrap();
                let want = a.qt_coproduct_closed_form(t);
                assert_eq!(got, want, "psi*(Q_{t}) at p={p}");
            }
        }
    }

    #[test]
    fn cartan_examples() {
        let a3 = alg(3);
        let t = a3.cartan_closed_form(1, CartanKind::P).unwrap();
        assert_eq!(t.to_string(), "P1(x)1 + 1(x)P1");
        assert_eq!(t, a3.op_coproduct(&a3.p_power(1)).unwrap());

        let a2 = alg(2);
        let sq2 = a2.cartan_closed_form(1, CartanKind::SqEven).unwrap();
        assert_eq!(sq2.to_string(), "P1(x)1 + 1(x)P1 + tau*Q0(x)Q0");
        assert_eq!(sq2, a2.op_coproduct(&a2.p_power(1)).unwrap());

        let sq1 = a2.cartan_closed_form(0, CartanKind::SqOdd).unwrap();
        assert_eq!(sq1.to_string(), "Q0(x)1 + 1(x)Q0");
    }

    #[test]
    fn twisted_coefficient_action() {
        // Sq^1 * tau = rho * 1 + tau * Sq^1
        let a = alg(2);
        let sq1 = a.bockstein();
        let got = a.op_right_mul(&sq1, &Coeff::tau(2, BaseMode::Generic)).unwrap();
        let mut want = OpElement::unit(2, BaseMode::Generic).scale(&Coeff::rho(2, BaseMode::Generic));
        want.add_assign(&sq1.scale(&Coeff::tau(2, BaseMode::Generic)));
        assert_eq!(got, want);
    }

    #[test]
    fn psi_is_an_algebra_map_where_the_twist_matters() {
        // psi*(Sq^1 Sq^2) = psi*(Sq^1) psi*(Sq^2) requires the twisted
        // coefficient action; the tau-term of psi*(Sq^2) meets Sq^1.
        let a = alg(2);
        let sq1 = a.sq(1).unwrap();
        let sq2 = a.sq(2).unwrap();
        let lhs = a.op_coproduct(&a.op_mul(&sq1, &sq2).unwrap()).unwrap();
        let rhs = a
            .op_tensor_mul(
                &a.op_coproduct(&sq1).unwrap(),
                &a.op_coproduct(&sq2).unwrap(),
            )
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn named_bidegrees() {
        let a2 = alg(2);
        assert_eq!(
            a2.op_bidegree_of_basis(&Monomial::tau(2)),
            Bidegree::new(7, 3)
        );
        assert_eq!(
            a2.op_bidegree_of_basis(&Monomial::tau(0)),
            Bidegree::new(1, 0)
        );
        let a3 = alg(3);
        assert_eq!(
            a3.op_bidegree_of_basis(&Monomial::tau(1)),
            Bidegree::new(5, 2)
        );
    }

    #[test]
    fn pairing_matrix_is_identity() {
        let a = alg(2);
        for (bd, basis) in a.basis_bidegrees_up_to(12) {
            for (i, m1) in basis.iter().enumerate() {
                for (j, m2) in basis.iter().enumerate() {
                    let x = DualElement::monomial(m1.clone(), a.coeff_one());
                    let th = OpElement::basis(m2.clone(), 2, BaseMode::Generic);
                    let v = a.pair(&x, &th).unwrap();
                    assert_eq!(v.is_one(), i == j, "pairing at {bd}");
                    assert_eq!(v.is_zero(), i != j);
                }
            }
        }
    }

    #[test]
    fn window_error_fires() {
        let a = Algebra::new(2, BaseMode::Generic).unwrap().with_window(6);
        let p4 = a.p_power(4); // degree (8,4)
        match a.op_mul(&p4, &p4) {
            Err(Error::Window(_)) => {}
            other => panic!("expected window error, got {other:?}"),
        }
    }
}
