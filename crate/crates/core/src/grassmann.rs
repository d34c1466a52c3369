//! Finite exterior algebra with [`Jet2`] coefficients.
//!
//! Elements are sparse sums of monomials in anticommuting generators; each
//! monomial is the ordered product of its generators in configuration order
//! and carries a jet coefficient. The body (the coefficient of the empty
//! monomial) is an ordinary jet; everything else is the nilpotent soul.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::{Jet2, Var};

/// Generator index of `theta+` in every configuration built here.
pub const THETA_PLUS: usize = 0;
/// Generator index of `theta-`.
pub const THETA_MINUS: usize = 1;

/// Ordered odd generator set together with the Hermitian pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraConfig {
    names: Vec<String>,
    pairing: Vec<usize>,
}

impl AlgebraConfig {
    pub fn new(names: Vec<String>, pairing: Vec<usize>) -> Result<Self> {
        let g = names.len();
        if g > 8 {
            return Err(Error::Config(format!("at most 8 generators, got {g}")));
        }
        if pairing.len() != g {
            return Err(Error::Config("pairing must cover every generator".into()));
        }
        for (i, &j) in pairing.iter().enumerate() {
            if j >= g || pairing[j] != i {
                return Err(Error::Config("pairing must be an involution".into()));
            }
        }
        Ok(AlgebraConfig { names, pairing })
    }

    /// `{theta+, theta-}` with the conjugation theta+ <-> theta-.
    pub fn thetas() -> Arc<Self> {
        Arc::new(
            AlgebraConfig::new(vec!["theta+".into(), "theta-".into()], vec![1, 0]).expect("valid"),
        )
    }

    /// `{theta+, theta-, eps_1, eps~_1, ...}` with eps_i <-> eps~_i.
    pub fn with_epsilons(count: usize) -> Result<Arc<Self>> {
        let mut names = vec!["theta+".to_string(), "theta-".to_string()];
        let mut pairing = vec![1usize, 0usize];
        for i in 1..=count {
            names.push(format!("eps_{i}"));
            names.push(format!("eps~_{i}"));
            let a = pairing.len();
            pairing.push(a + 1);
            pairing.push(a);
        }
        Ok(Arc::new(AlgebraConfig::new(names, pairing)?))
    }

    /// Index of the i-th auxiliary odd generator (1-based).
    pub fn epsilon(i: usize) -> usize {
        2 * i
    }

    pub fn epsilon_bar(i: usize) -> usize {
        2 * i + 1
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn paired(&self, i: usize) -> usize {
        self.pairing[i]
    }
}

/// Base point and truncation shared by every jet coefficient of a value.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct JetShape {
    pub base: Complex64,
    pub orders: (usize, usize),
}

impl JetShape {
    pub fn new(base: Complex64, orders: (usize, usize)) -> Self {
        JetShape { base, orders }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Sign of merging two ordered generator subsets: (-1)^(transposition count).
fn merge_sign(m1: u8, m2: u8) -> f64 {
    let mut swaps = 0u32;
    let mut rest = m2;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (m1 >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Element of the exterior algebra over jets.
#[derive(Clone, Debug)]
pub struct Supernumber {
    algebra: Arc<AlgebraConfig>,
    shape: JetShape,
    terms: BTreeMap<u8, Jet2>,
}

impl Supernumber {
    pub fn zero(algebra: Arc<AlgebraConfig>, shape: JetShape) -> Self {
        Supernumber {
            algebra,
            shape,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_jet(algebra: Arc<AlgebraConfig>, jet: Jet2) -> Self {
        let shape = JetShape::new(jet.base_point(), jet.orders());
        let mut s = Supernumber::zero(algebra, shape);
        s.insert_term(0, jet);
        s
    }

    pub fn constant(algebra: Arc<AlgebraConfig>, v: Complex64, shape: JetShape) -> Self {
        Supernumber::from_jet(algebra, Jet2::constant(v, shape.base, shape.orders))
    }

    pub fn one(algebra: Arc<AlgebraConfig>, shape: JetShape) -> Self {
        Supernumber::constant(algebra, Complex64::ONE, shape)
    }

    /// A single odd generator.
    pub fn generator(algebra: Arc<AlgebraConfig>, idx: usize, shape: JetShape) -> Self {
        assert!(idx < algebra.len(), "generator index out of range");
        let mut s = Supernumber::zero(algebra, shape);
        s.insert_term(1 << idx, Jet2::one(shape.base, shape.orders));
        s
    }

    /// Monomial with an explicit generator subset.
    pub fn monomial(algebra: Arc<AlgebraConfig>, mask: u8, jet: Jet2) -> Self {
        let shape = JetShape::new(jet.base_point(), jet.orders());
        let mut s = Supernumber::zero(algebra, shape);
        s.insert_term(mask, jet);
        s
    }

    fn insert_term(&mut self, mask: u8, jet: Jet2) {
        if !jet.is_exactly_zero() {
            self.terms.insert(mask, jet);
        }
    }

    fn accumulate(&mut self, mask: u8, jet: Jet2) {
        match self.terms.remove(&mask) {
            Some(existing) => {
                let sum = existing.add(&jet).expect("shapes agree");
                self.insert_term(mask, sum);
            }
            None => self.insert_term(mask, jet),
        }
    }

    pub fn algebra(&self) -> &Arc<AlgebraConfig> {
        &self.algebra
    }

    pub fn shape(&self) -> JetShape {
        self.shape
    }

    pub fn orders(&self) -> (usize, usize) {
        self.shape.orders
    }

    pub fn term(&self, mask: u8) -> Option<&Jet2> {
        self.terms.get(&mask)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u8, &Jet2)> {
        self.terms.iter().map(|(m, j)| (*m, j))
    }

    /// The coefficient jet of the empty monomial.
    pub fn body(&self) -> Jet2 {
        self.terms
            .get(&0)
            .cloned()
            .unwrap_or_else(|| Jet2::zero(self.shape.base, self.shape.orders))
    }

    /// Largest sampled value among the nilpotent terms.
    pub fn soul_value_max(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(m, _)| **m != 0)
            .map(|(_, j)| j.value().norm())
            .fold(0.0, f64::max)
    }

    /// Largest sampled value over every monomial (residual magnitude at the
    /// base point).
    pub fn value_max(&self) -> f64 {
        self.terms
            .values()
            .map(|j| j.value().norm())
            .fold(0.0, f64::max)
    }

    /// Largest jet coefficient over every monomial.
    pub fn coeff_max(&self) -> f64 {
        self.terms.values().map(|j| j.max_abs()).fold(0.0, f64::max)
    }

    pub fn parity(&self) -> Option<Parity> {
        let mut even = false;
        let mut odd = false;
        for m in self.terms.keys() {
            if m.count_ones() % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (true, true) => None,
            (false, true) => Some(Parity::Odd),
            _ => Some(Parity::Even),
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Some(Parity::Even)
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == Some(Parity::Odd)
    }

    fn check_compatible(&self, other: &Supernumber) -> Result<()> {
        if !Arc::ptr_eq(&self.algebra, &other.algebra) && self.algebra != other.algebra {
            return Err(Error::Mismatch("algebra configurations differ".into()));
        }
        if self.shape != other.shape {
            return Err(Error::Mismatch(format!(
                "jet shapes differ: {:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Supernumber) -> Result<Supernumber> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, j) in &other.terms {
            out.accumulate(*m, j.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Supernumber) -> Result<Supernumber> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Supernumber {
        let mut out = self.clone();
        for j in out.terms.values_mut() {
            *j = j.neg();
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Supernumber {
        let mut out = Supernumber::zero(self.algebra.clone(), self.shape);
        for (m, j) in &self.terms {
            out.insert_term(*m, j.scale(s));
        }
        out
    }

    /// Multiplication by an even (empty-monomial) jet factor.
    pub fn scale_jet(&self, jet: &Jet2) -> Result<Supernumber> {
        let mut out = Supernumber::zero(self.algebra.clone(), self.shape);
        for (m, j) in &self.terms {
            out.accumulate(*m, j.mul(jet)?);
        }
        Ok(out)
    }

    /// Graded product.
    pub fn mul(&self, other: &Supernumber) -> Result<Supernumber> {
        self.check_compatible(other)?;
        let mut out = Supernumber::zero(self.algebra.clone(), self.shape);
        for (m1, j1) in &self.terms {
            for (m2, j2) in &other.terms {
                if m1 & m2 != 0 {
                    continue; // repeated generator squares to zero
                }
                let sign = merge_sign(*m1, *m2);
                let prod = j1.mul(j2)?.scale(Complex64::new(sign, 0.0));
                out.accumulate(m1 | m2, prod);
            }
        }
        Ok(out)
    }

    /// Hermitian conjugation: reverse each monomial, replace generators by
    /// their pairing partners and conjugate the jet coefficient.
    pub fn dagger(&self) -> Result<Supernumber> {
        let mut out = Supernumber::zero(self.algebra.clone(), self.shape);
        for (m, j) in &self.terms {
            // Conjugate sequence: paired generators in reversed order.
            let mut seq: Vec<usize> = (0..self.algebra.len() as u32)
                .filter(|i| m & (1 << i) != 0)
                .map(|i| self.algebra.paired(i as usize))
                .collect();
            seq.reverse();
            // Sort into canonical order, counting inversions.
            let mut swaps = 0usize;
            for i in 1..seq.len() {
                let mut k = i;
                while k > 0 && seq[k - 1] > seq[k] {
                    seq.swap(k - 1, k);
                    swaps += 1;
                    k -= 1;
                }
            }
            let sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
            let mask = seq.iter().fold(0u8, |acc, g| acc | (1 << g));
            out.accumulate(mask, j.dagger()?.scale(Complex64::new(sign, 0.0)));
        }
        Ok(out)
    }

    /// Left derivative with respect to one odd generator.
    pub fn theta_derivative(&self, gen: usize) -> Supernumber {
        let bit = 1u8 << gen;
        let mut out = Supernumber::zero(self.algebra.clone(), self.shape);
        for (m, j) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let preceding = (m & (bit - 1)).count_ones();
            let sign = if preceding % 2 == 0 { 1.0 } else { -1.0 };
            out.accumulate(m & !bit, j.scale(Complex64::new(sign, 0.0)));
        }
        out
    }

    /// Derivative in `x+` or `x-` applied to every jet coefficient; reduces
    /// the truncation order in that variable by one.
    pub fn x_partial(&self, which: Var) -> Result<Supernumber> {
        let orders = match which {
            Var::Plus => {
                if self.shape.orders.0 == 0 {
                    return Err(Error::Truncation("x+ order exhausted".into()));
                }
                (self.shape.orders.0 - 1, self.shape.orders.1)
            }
            Var::Minus => {
                if self.shape.orders.1 == 0 {
                    return Err(Error::Truncation("x- order exhausted".into()));
                }
                (self.shape.orders.0, self.shape.orders.1 - 1)
            }
        };
        let mut out = Supernumber::zero(self.algebra.clone(), JetShape::new(self.shape.base, orders));
        for (m, j) in &self.terms {
            out.insert_term(*m, j.partial(which)?);
        }
        Ok(out)
    }

    /// Restriction to lower jet orders.
    pub fn truncated(&self, orders: (usize, usize)) -> Result<Supernumber> {
        if orders == self.shape.orders {
            return Ok(self.clone());
        }
        let mut out =
            Supernumber::zero(self.algebra.clone(), JetShape::new(self.shape.base, orders));
        for (m, j) in &self.terms {
            out.insert_term(*m, j.truncated(orders)?);
        }
        Ok(out)
    }

    fn even_checked(&self, what: &str) -> Result<()> {
        if self.terms.keys().any(|m| m.count_ones() % 2 == 1) {
            return Err(Error::Parity(format!("{what} requires an even element")));
        }
        Ok(())
    }

    /// Inverse via the finite Neumann series over the nilpotent soul.
    pub fn inv(&self) -> Result<Supernumber> {
        self.even_checked("inverse")?;
        let body_inv = self.body().inv()?;
        let binv = Supernumber::from_jet(self.algebra.clone(), body_inv);
        let mut soul = self.clone();
        soul.terms.remove(&0);
        // t = soul * body^{-1}; inverse = body^{-1} sum (-t)^k.
        let t = soul.mul(&binv)?;
        let mut acc = Supernumber::one(self.algebra.clone(), self.shape);
        let mut pow = Supernumber::one(self.algebra.clone(), self.shape);
        for k in 1..=self.algebra.len() {
            pow = pow.mul(&t)?;
            if pow.terms.is_empty() {
                break;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc = acc.add(&pow.scale(Complex64::new(sign, 0.0)))?;
        }
        acc.mul(&binv)
    }

    /// Logarithm: `ln(body) + log1p(soul/body)` with a finite series.
    pub fn ln(&self) -> Result<Supernumber> {
        self.even_checked("logarithm")?;
        let body_ln = Supernumber::from_jet(self.algebra.clone(), self.body().ln()?);
        let binv = Supernumber::from_jet(self.algebra.clone(), self.body().inv()?);
        let mut soul = self.clone();
        soul.terms.remove(&0);
        let t = soul.mul(&binv)?;
        let mut acc = body_ln;
        let mut pow = Supernumber::one(self.algebra.clone(), self.shape);
        for k in 1..=self.algebra.len() {
            pow = pow.mul(&t)?;
            if pow.terms.is_empty() {
                break;
            }
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            acc = acc.add(&pow.scale(Complex64::new(sign / k as f64, 0.0)))?;
        }
        Ok(acc)
    }

    /// Largest coefficient distance after truncating both to common orders.
    pub fn max_abs_diff(&self, other: &Supernumber) -> f64 {
        let orders = (
            self.shape.orders.0.min(other.shape.orders.0),
            self.shape.orders.1.min(other.shape.orders.1),
        );
        let a = self.truncated(orders).expect("shrinking");
        let b = other.truncated(orders).expect("shrinking");
        match a.sub(&b) {
            Ok(d) => d.coeff_max(),
            Err(_) => f64::INFINITY,
        }
    }
}

/// Truncates both operands to their common jet orders.
pub fn aligned(a: &Supernumber, b: &Supernumber) -> Result<(Supernumber, Supernumber)> {
    let (ao, bo) = (a.orders(), b.orders());
    let orders = (ao.0.min(bo.0), ao.1.min(bo.1));
    Ok((a.truncated(orders)?, b.truncated(orders)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape() -> JetShape {
        JetShape::new(Complex64::new(0.4, 0.3), (2, 2))
    }

    fn theta(idx: usize) -> Supernumber {
        Supernumber::generator(AlgebraConfig::thetas(), idx, shape())
    }

    #[test]
    fn nilpotency_and_anticommutation() {
        let tp = theta(THETA_PLUS);
        let tm = theta(THETA_MINUS);
        assert_eq!(tp.mul(&tp).unwrap().coeff_max(), 0.0);

        let pm = tp.mul(&tm).unwrap();
        let mp = tm.mul(&tp).unwrap();
        assert!(pm.add(&mp).unwrap().coeff_max() < 1e-15);
        assert!(pm.term(0b11).unwrap().value() == Complex64::ONE);

        // (1 + theta+ theta-)(1 - theta+ theta-) = 1.
        let one = Supernumber::one(AlgebraConfig::thetas(), shape());
        let a = one.add(&pm).unwrap();
        let b = one.sub(&pm).unwrap();
        assert!(a.mul(&b).unwrap().max_abs_diff(&one) < 1e-15);
    }

    #[test]
    fn dagger_pairs_generators() {
        let tp = theta(THETA_PLUS);
        let tm = theta(THETA_MINUS);
        assert!(tp.dagger().unwrap().max_abs_diff(&tm) < 1e-15);

        // (i theta+ c)^dagger = -i theta- c^dagger for an even jet c.
        let c = Jet2::variable(Var::Plus, shape().base, shape().orders)
            .unwrap()
            .mul(&Jet2::variable(Var::Minus, shape().base, shape().orders).unwrap())
            .unwrap();
        let lhs = tp
            .scale_jet(&c)
            .unwrap()
            .scale(Complex64::I)
            .dagger()
            .unwrap();
        let rhs = tm
            .scale_jet(&c.dagger().unwrap())
            .unwrap()
            .scale(-Complex64::I);
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);

        // (theta+ theta-)^dagger = theta- ^d theta+ ^d = theta+ theta-.
        let pm = tp.mul(&tm).unwrap();
        assert!(pm.dagger().unwrap().max_abs_diff(&pm) < 1e-15);
    }

    #[test]
    fn theta_derivatives() {
        let tp = theta(THETA_PLUS);
        let tm = theta(THETA_MINUS);
        let one = Supernumber::one(AlgebraConfig::thetas(), shape());

        assert!(tp.theta_derivative(THETA_PLUS).max_abs_diff(&one) < 1e-15);
        assert_eq!(tp.theta_derivative(THETA_MINUS).coeff_max(), 0.0);

        // d/dtheta+ (theta- theta+) = -theta-.
        let mp = tm.mul(&tp).unwrap();
        assert!(mp.theta_derivative(THETA_PLUS).max_abs_diff(&tm.neg()) < 1e-15);
    }

    #[test]
    fn nilpotent_inverse_and_log() {
        let alg = AlgebraConfig::thetas();
        let one = Supernumber::one(alg.clone(), shape());
        let pm = theta(THETA_PLUS).mul(&theta(THETA_MINUS)).unwrap();
        let a = one.add(&pm).unwrap();
        let expect = one.sub(&pm).unwrap();
        assert!(a.inv().unwrap().max_abs_diff(&expect) < 1e-15);

        assert!(one.ln().unwrap().coeff_max() < 1e-15);

        assert!(theta(THETA_PLUS).inv().is_err());
    }

    #[test]
    fn parity_classification() {
        let tp = theta(THETA_PLUS);
        assert_eq!(tp.parity(), Some(Parity::Odd));
        let one = Supernumber::one(AlgebraConfig::thetas(), shape());
        assert_eq!(one.parity(), Some(Parity::Even));
        assert_eq!(one.add(&tp).unwrap().parity(), None);
    }
}
