//! Truncated bivariate Taylor jets in the complex variables `x+` and `x-`.
//!
//! A [`Jet2`] stores the Taylor coefficients of a complex-valued function at
//! the base point `(p, conj(p))`, truncated to a pair of orders `(d+, d-)`.
//! All arithmetic is exact within the truncation, so coefficient `(a, b)` is
//! always `1/(a! b!) d^a_{x+} d^b_{x-} f` of the true function the jet was
//! built from.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Bodies with modulus at or below this are treated as singular on inversion.
pub const SINGULAR_EPS: f64 = 1e-12;

/// The two independent complex variables of the jet.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Var {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    base: Complex64,
    orders: (usize, usize),
    /// Row-major `(d+ + 1) x (d- + 1)`; entry `[a][b]` is the coefficient of
    /// `(x+ - p)^a (x- - conj(p))^b`.
    coeffs: Vec<Complex64>,
}

impl Jet2 {
    fn with_coeffs(base: Complex64, orders: (usize, usize), coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), (orders.0 + 1) * (orders.1 + 1));
        Jet2 {
            base,
            orders,
            coeffs,
        }
    }

    pub fn zero(base: Complex64, orders: (usize, usize)) -> Self {
        let coeffs = vec![Complex64::ZERO; (orders.0 + 1) * (orders.1 + 1)];
        Jet2::with_coeffs(base, orders, coeffs)
    }

    /// Jet of the constant function `v`.
    pub fn constant(v: Complex64, base: Complex64, orders: (usize, usize)) -> Self {
        let mut jet = Jet2::zero(base, orders);
        jet.coeffs[0] = v;
        jet
    }

    pub fn one(base: Complex64, orders: (usize, usize)) -> Self {
        Jet2::constant(Complex64::ONE, base, orders)
    }

    /// Jet of `x+` or `x-` at the base point.
    pub fn variable(which: Var, base: Complex64, orders: (usize, usize)) -> Result<Self> {
        match which {
            Var::Plus if orders.0 == 0 => {
                return Err(Error::Truncation("jet of x+ needs d+ >= 1".into()))
            }
            Var::Minus if orders.1 == 0 => {
                return Err(Error::Truncation("jet of x- needs d- >= 1".into()))
            }
            _ => {}
        }
        let mut jet = Jet2::zero(base, orders);
        match which {
            Var::Plus => {
                jet.coeffs[0] = base;
                let idx = jet.index(1, 0);
                jet.coeffs[idx] = Complex64::ONE;
            }
            Var::Minus => {
                jet.coeffs[0] = base.conj();
                let idx = jet.index(0, 1);
                jet.coeffs[idx] = Complex64::ONE;
            }
        }
        Ok(jet)
    }

    #[inline]
    fn index(&self, a: usize, b: usize) -> usize {
        a * (self.orders.1 + 1) + b
    }

    pub fn base_point(&self) -> Complex64 {
        self.base
    }

    pub fn orders(&self) -> (usize, usize) {
        self.orders
    }

    pub fn coeff(&self, a: usize, b: usize) -> Complex64 {
        self.coeffs[self.index(a, b)]
    }

    /// Value of the underlying function at the base point.
    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn check_compatible(&self, other: &Jet2) -> Result<()> {
        if self.base != other.base {
            return Err(Error::Mismatch(format!(
                "base points differ: {} vs {}",
                self.base, other.base
            )));
        }
        if self.orders != other.orders {
            return Err(Error::Mismatch(format!(
                "orders differ: {:?} vs {:?}",
                self.orders, other.orders
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet2) -> Result<Jet2> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Jet2::with_coeffs(self.base, self.orders, coeffs))
    }

    pub fn sub(&self, other: &Jet2) -> Result<Jet2> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Jet2::with_coeffs(self.base, self.orders, coeffs))
    }

    pub fn neg(&self) -> Jet2 {
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        Jet2::with_coeffs(self.base, self.orders, coeffs)
    }

    pub fn scale(&self, s: Complex64) -> Jet2 {
        let coeffs = self.coeffs.iter().map(|c| c * s).collect();
        Jet2::with_coeffs(self.base, self.orders, coeffs)
    }

    /// Cauchy product truncated to the common orders.
    pub fn mul(&self, other: &Jet2) -> Result<Jet2> {
        self.check_compatible(other)?;
        let (dp, dm) = self.orders;
        let mut out = Jet2::zero(self.base, self.orders);
        for a1 in 0..=dp {
            for b1 in 0..=dm {
                let c1 = self.coeffs[self.index(a1, b1)];
                if c1 == Complex64::ZERO {
                    continue;
                }
                for a2 in 0..=(dp - a1) {
                    for b2 in 0..=(dm - b1) {
                        let c2 = other.coeffs[other.index(a2, b2)];
                        if c2 == Complex64::ZERO {
                            continue;
                        }
                        let idx = out.index(a1 + a2, b1 + b2);
                        out.coeffs[idx] += c1 * c2;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Soul part: the jet with its constant coefficient removed.
    fn soul(&self) -> Jet2 {
        let mut s = self.clone();
        s.coeffs[0] = Complex64::ZERO;
        s
    }

    fn body_checked(&self, what: &str) -> Result<Complex64> {
        let b = self.coeffs[0];
        if b.norm() <= SINGULAR_EPS {
            return Err(Error::Singular(format!(
                "{what}: |body| = {} at base {}",
                b.norm(),
                self.base
            )));
        }
        Ok(b)
    }

    /// Applies a power series `sum_k series_coeff(k) * t^k` to `t = soul/body`.
    /// The series terminates because the soul is nilpotent within truncation.
    fn soul_series(&self, body: Complex64, head: Complex64, coeff: impl Fn(usize) -> Complex64) -> Jet2 {
        let nil = self.orders.0 + self.orders.1; // t^(nil+1) vanishes
        let t = self.soul().scale(body.inv());
        let mut acc = Jet2::constant(head, self.base, self.orders);
        let mut pow = Jet2::one(self.base, self.orders);
        for k in 1..=nil {
            pow = pow.mul(&t).expect("shapes match");
            acc = acc.add(&pow.scale(coeff(k))).expect("shapes match");
        }
        acc
    }

    /// Multiplicative inverse, exact within truncation.
    pub fn inv(&self) -> Result<Jet2> {
        let b = self.body_checked("jet inverse")?;
        let series = self.soul_series(b, Complex64::ONE, |k| {
            if k % 2 == 0 {
                Complex64::ONE
            } else {
                -Complex64::ONE
            }
        });
        Ok(series.scale(b.inv()))
    }

    pub fn div(&self, other: &Jet2) -> Result<Jet2> {
        self.mul(&other.inv()?)
    }

    /// Principal-branch logarithm: `ln(body) + log1p(soul/body)` as a finite series.
    pub fn ln(&self) -> Result<Jet2> {
        let b = self.body_checked("jet log")?;
        let series = self.soul_series(b, Complex64::ZERO, |k| {
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            Complex64::new(sign / k as f64, 0.0)
        });
        Ok(series.add(&Jet2::constant(b.ln(), self.base, self.orders))?)
    }

    /// Exponential: `exp(body) * exp(soul)` with the soul series finite.
    pub fn exp(&self) -> Jet2 {
        let b = self.coeffs[0];
        let nil = self.orders.0 + self.orders.1;
        let s = self.soul();
        let mut acc = Jet2::one(self.base, self.orders);
        let mut pow = Jet2::one(self.base, self.orders);
        let mut fact = 1.0;
        for k in 1..=nil {
            pow = pow.mul(&s).expect("shapes match");
            fact *= k as f64;
            acc = acc
                .add(&pow.scale(Complex64::new(1.0 / fact, 0.0)))
                .expect("shapes match");
        }
        acc.scale(b.exp())
    }

    /// Derivative with respect to one variable; the result loses one order in
    /// that variable.
    pub fn partial(&self, which: Var) -> Result<Jet2> {
        let (dp, dm) = self.orders;
        match which {
            Var::Plus => {
                if dp == 0 {
                    return Err(Error::Truncation("d/dx+ of a jet with d+ = 0".into()));
                }
                let orders = (dp - 1, dm);
                let mut out = Jet2::zero(self.base, orders);
                for a in 0..dp {
                    for b in 0..=dm {
                        let idx = out.index(a, b);
                        out.coeffs[idx] = self.coeff(a + 1, b) * (a as f64 + 1.0);
                    }
                }
                Ok(out)
            }
            Var::Minus => {
                if dm == 0 {
                    return Err(Error::Truncation("d/dx- of a jet with d- = 0".into()));
                }
                let orders = (dp, dm - 1);
                let mut out = Jet2::zero(self.base, orders);
                for a in 0..=dp {
                    for b in 0..dm {
                        let idx = out.index(a, b);
                        out.coeffs[idx] = self.coeff(a, b + 1) * (b as f64 + 1.0);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Hermitian conjugate: swaps the roles of `x+` and `x-` and conjugates.
    /// Requires a square truncation so the swap is closed.
    pub fn dagger(&self) -> Result<Jet2> {
        let (dp, dm) = self.orders;
        if dp != dm {
            return Err(Error::Mismatch(format!(
                "dagger needs a square truncation, got {:?}",
                self.orders
            )));
        }
        let mut out = Jet2::zero(self.base, self.orders);
        for a in 0..=dp {
            for b in 0..=dm {
                let idx = out.index(a, b);
                out.coeffs[idx] = self.coeff(b, a).conj();
            }
        }
        Ok(out)
    }

    /// Restriction to lower truncation orders.
    pub fn truncated(&self, orders: (usize, usize)) -> Result<Jet2> {
        if orders.0 > self.orders.0 || orders.1 > self.orders.1 {
            return Err(Error::Truncation(format!(
                "cannot extend truncation {:?} to {:?}",
                self.orders, orders
            )));
        }
        if orders == self.orders {
            return Ok(self.clone());
        }
        let mut out = Jet2::zero(self.base, orders);
        for a in 0..=orders.0 {
            for b in 0..=orders.1 {
                let idx = out.index(a, b);
                out.coeffs[idx] = self.coeff(a, b);
            }
        }
        Ok(out)
    }

    /// Maximum coefficient distance after truncating both jets to the common
    /// orders. Test and residual helper.
    pub fn max_abs_diff(&self, other: &Jet2) -> f64 {
        let orders = (
            self.orders.0.min(other.orders.0),
            self.orders.1.min(other.orders.1),
        );
        let a = self.truncated(orders).expect("shrinking");
        let b = other.truncated(orders).expect("shrinking");
        a.sub(&b).map(|d| d.max_abs()).unwrap_or(f64::INFINITY)
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::ZERO)
    }
}

/// Jet of `1 + x+ x-` (that is `1 + |x|^2` on the Euclidean slice).
pub fn one_plus_norm2(base: Complex64, orders: (usize, usize)) -> Result<Jet2> {
    let xp = Jet2::variable(Var::Plus, base, orders)?;
    let xm = Jet2::variable(Var::Minus, base, orders)?;
    Jet2::one(base, orders).add(&xp.mul(&xm)?)
}
