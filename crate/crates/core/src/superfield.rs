//! CP^{N-1} superfield vectors and matrices: curve constructors, inner
//! products, the orthogonalization tower, rank-one projectors and the odd
//! superspace operators.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::{AlgebraConfig, JetShape, Supernumber, THETA_MINUS, THETA_PLUS};
use crate::jet::{Jet2, Var};

fn square_orders(orders: (usize, usize)) -> usize {
    orders.0.min(orders.1)
}

/// Superderivative `-i d_theta(+-) + theta(+-) d_x(+-)`.
///
/// The result is truncated to a square order one lower than the operand so
/// repeated applications and conjugations stay well defined.
pub fn super_partial(a: &Supernumber, which: Var) -> Result<Supernumber> {
    odd_operator(a, which, -Complex64::I)
}

/// Supercharge `+i d_theta(+-) + theta(+-) d_x(+-)`.
pub fn supercharge(a: &Supernumber, which: Var) -> Result<Supernumber> {
    odd_operator(a, which, Complex64::I)
}

fn odd_operator(a: &Supernumber, which: Var, theta_factor: Complex64) -> Result<Supernumber> {
    let q = square_orders(a.orders());
    if q == 0 {
        return Err(Error::Truncation("superspace derivative needs order >= 1".into()));
    }
    let target = (q - 1, q - 1);
    let gen = match which {
        Var::Plus => THETA_PLUS,
        Var::Minus => THETA_MINUS,
    };
    let shape = JetShape::new(a.shape().base, target);
    let theta = Supernumber::generator(a.algebra().clone(), gen, shape);
    let t1 = a.theta_derivative(gen).scale(theta_factor).truncated(target)?;
    let t2 = theta.mul(&a.x_partial(which)?.truncated(target)?)?;
    t1.add(&t2)
}

/// N-tuple of supernumbers sharing one algebra and jet shape.
#[derive(Clone, Debug)]
pub struct SuperVector {
    entries: Vec<Supernumber>,
}

impl SuperVector {
    pub fn new(entries: Vec<Supernumber>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Config("empty supervector".into()));
        }
        let shape = entries[0].shape();
        if entries.iter().any(|e| e.shape() != shape) {
            return Err(Error::Mismatch("supervector entries disagree on jet shape".into()));
        }
        Ok(SuperVector { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize) -> &Supernumber {
        &self.entries[i]
    }

    pub fn entries(&self) -> &[Supernumber] {
        &self.entries
    }

    pub fn shape(&self) -> JetShape {
        self.entries[0].shape()
    }

    pub fn orders(&self) -> (usize, usize) {
        self.entries[0].orders()
    }

    pub fn algebra(&self) -> &Arc<AlgebraConfig> {
        self.entries[0].algebra()
    }

    pub fn map(&self, f: impl Fn(&Supernumber) -> Result<Supernumber>) -> Result<SuperVector> {
        SuperVector::new(self.entries.iter().map(f).collect::<Result<Vec<_>>>()?)
    }

    pub fn add(&self, other: &SuperVector) -> Result<SuperVector> {
        if self.dim() != other.dim() {
            return Err(Error::Mismatch("supervector dimensions differ".into()));
        }
        let orders = common_orders(self.orders(), other.orders());
        SuperVector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.truncated(orders)?.add(&b.truncated(orders)?))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn sub(&self, other: &SuperVector) -> Result<SuperVector> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SuperVector {
        SuperVector {
            entries: self.entries.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> SuperVector {
        SuperVector {
            entries: self.entries.iter().map(|e| e.scale(s)).collect(),
        }
    }

    /// Right multiplication by a scalar supernumber: entries `v_i * s`.
    pub fn scale_sn(&self, s: &Supernumber) -> Result<SuperVector> {
        let orders = common_orders(self.orders(), s.orders());
        let st = s.truncated(orders)?;
        self.map(|e| e.truncated(orders)?.mul(&st))
    }

    pub fn dagger(&self) -> Result<SuperVector> {
        self.map(|e| e.dagger())
    }

    /// Entrywise x-derivative, truncated back to a square order.
    pub fn x_partial_sq(&self, which: Var) -> Result<SuperVector> {
        let q = square_orders(self.orders());
        if q == 0 {
            return Err(Error::Truncation("x derivative needs order >= 1".into()));
        }
        self.map(|e| e.x_partial(which)?.truncated((q - 1, q - 1)))
    }

    pub fn super_partial(&self, which: Var) -> Result<SuperVector> {
        self.map(|e| super_partial(e, which))
    }

    pub fn supercharge(&self, which: Var) -> Result<SuperVector> {
        self.map(|e| supercharge(e, which))
    }

    pub fn truncated(&self, orders: (usize, usize)) -> Result<SuperVector> {
        self.map(|e| e.truncated(orders))
    }

    pub fn value_max(&self) -> f64 {
        self.entries.iter().map(|e| e.value_max()).fold(0.0, f64::max)
    }

    pub fn coeff_max(&self) -> f64 {
        self.entries.iter().map(|e| e.coeff_max()).fold(0.0, f64::max)
    }
}

fn common_orders(a: (usize, usize), b: (usize, usize)) -> (usize, usize) {
    (a.0.min(b.0), a.1.min(b.1))
}

/// Sesquilinear inner product `sum_k a_k^dagger b_k`.
pub fn inner(a: &SuperVector, b: &SuperVector) -> Result<Supernumber> {
    if a.dim() != b.dim() {
        return Err(Error::Mismatch("inner product dimensions differ".into()));
    }
    let orders = common_orders(a.orders(), b.orders());
    let mut acc = Supernumber::zero(a.algebra().clone(), JetShape::new(a.shape().base, orders));
    for (x, y) in a.entries.iter().zip(&b.entries) {
        let term = x
            .truncated(orders)?
            .dagger()?
            .mul(&y.truncated(orders)?)?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

pub fn norm2(a: &SuperVector) -> Result<Supernumber> {
    inner(a, a)
}

/// One application of the orthogonalization operator
/// `P+ w = d+ w - (w^dagger d+ w / |w|^2) w`.
pub fn p_plus(w: &SuperVector) -> Result<SuperVector> {
    let dw = w.x_partial_sq(Var::Plus)?;
    let wt = w.truncated(dw.orders())?;
    let ninv = norm2(&wt)?.inv()?;
    let coef = inner(&wt, &dw)?.mul(&ninv)?;
    dw.sub(&wt.scale_sn(&coef)?)
}

/// k-fold application of the orthogonalization operator.
pub fn p_plus_k(w: &SuperVector, k: usize) -> Result<SuperVector> {
    let mut v = w.clone();
    for _ in 0..k {
        v = p_plus(&v)?;
    }
    Ok(v)
}

/// N x N matrix of supernumbers.
#[derive(Clone, Debug)]
pub struct SuperMatrix {
    n: usize,
    entries: Vec<Supernumber>,
}

impl SuperMatrix {
    pub fn from_entries(n: usize, entries: Vec<Supernumber>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Config("matrix entry count mismatch".into()));
        }
        let shape = entries[0].shape();
        if entries.iter().any(|e| e.shape() != shape) {
            return Err(Error::Mismatch("matrix entries disagree on jet shape".into()));
        }
        Ok(SuperMatrix { n, entries })
    }

    pub fn identity(algebra: Arc<AlgebraConfig>, n: usize, shape: JetShape) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    entries.push(Supernumber::one(algebra.clone(), shape));
                } else {
                    entries.push(Supernumber::zero(algebra.clone(), shape));
                }
            }
        }
        SuperMatrix { n, entries }
    }

    pub fn zero(algebra: Arc<AlgebraConfig>, n: usize, shape: JetShape) -> Self {
        let entries = vec![Supernumber::zero(algebra, shape); n * n];
        SuperMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &Supernumber {
        &self.entries[i * self.n + j]
    }

    pub fn shape(&self) -> JetShape {
        self.entries[0].shape()
    }

    pub fn orders(&self) -> (usize, usize) {
        self.entries[0].orders()
    }

    pub fn algebra(&self) -> &Arc<AlgebraConfig> {
        self.entries[0].algebra()
    }

    fn map(&self, f: impl Fn(&Supernumber) -> Result<Supernumber>) -> Result<SuperMatrix> {
        SuperMatrix::from_entries(
            self.n,
            self.entries.iter().map(f).collect::<Result<Vec<_>>>()?,
        )
    }

    /// Binary entrywise combination; operands are truncated to common orders.
    fn zip(
        &self,
        other: &SuperMatrix,
        f: impl Fn(&Supernumber, &Supernumber) -> Result<Supernumber>,
    ) -> Result<SuperMatrix> {
        if self.n != other.n {
            return Err(Error::Mismatch("matrix dimensions differ".into()));
        }
        let orders = common_orders(self.orders(), other.orders());
        SuperMatrix::from_entries(
            self.n,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(&a.truncated(orders)?, &b.truncated(orders)?))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn add(&self, other: &SuperMatrix) -> Result<SuperMatrix> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &SuperMatrix) -> Result<SuperMatrix> {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> SuperMatrix {
        SuperMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> SuperMatrix {
        SuperMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e.scale(s)).collect(),
        }
    }

    pub fn matmul(&self, other: &SuperMatrix) -> Result<SuperMatrix> {
        if self.n != other.n {
            return Err(Error::Mismatch("matrix dimensions differ".into()));
        }
        let orders = common_orders(self.orders(), other.orders());
        let a = self.truncated(orders)?;
        let b = other.truncated(orders)?;
        let shape = JetShape::new(a.shape().base, orders);
        let mut out = SuperMatrix::zero(a.algebra().clone(), self.n, shape);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = Supernumber::zero(a.algebra().clone(), shape);
                for k in 0..self.n {
                    acc = acc.add(&a.entry(i, k).mul(b.entry(k, j))?)?;
                }
                out.entries[i * self.n + j] = acc;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &SuperVector) -> Result<SuperVector> {
        if self.n != v.dim() {
            return Err(Error::Mismatch("matrix/vector dimensions differ".into()));
        }
        let orders = common_orders(self.orders(), v.orders());
        let m = self.truncated(orders)?;
        let vt = v.truncated(orders)?;
        let shape = JetShape::new(m.shape().base, orders);
        let mut entries = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut acc = Supernumber::zero(m.algebra().clone(), shape);
            for k in 0..self.n {
                acc = acc.add(&m.entry(i, k).mul(vt.entry(k))?)?;
            }
            entries.push(acc);
        }
        SuperVector::new(entries)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Result<SuperMatrix> {
        let mut entries = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                entries.push(self.entry(j, i).dagger()?);
            }
        }
        SuperMatrix::from_entries(self.n, entries)
    }

    pub fn trace(&self) -> Result<Supernumber> {
        let mut acc = Supernumber::zero(self.algebra().clone(), self.shape());
        for i in 0..self.n {
            acc = acc.add(self.entry(i, i))?;
        }
        Ok(acc)
    }

    pub fn x_partial_sq(&self, which: Var) -> Result<SuperMatrix> {
        let q = square_orders(self.orders());
        if q == 0 {
            return Err(Error::Truncation("x derivative needs order >= 1".into()));
        }
        self.map(|e| e.x_partial(which)?.truncated((q - 1, q - 1)))
    }

    pub fn super_partial(&self, which: Var) -> Result<SuperMatrix> {
        self.map(|e| super_partial(e, which))
    }

    pub fn supercharge(&self, which: Var) -> Result<SuperMatrix> {
        self.map(|e| supercharge(e, which))
    }

    pub fn truncated(&self, orders: (usize, usize)) -> Result<SuperMatrix> {
        self.map(|e| e.truncated(orders))
    }

    pub fn value_max(&self) -> f64 {
        self.entries.iter().map(|e| e.value_max()).fold(0.0, f64::max)
    }

    pub fn coeff_max(&self) -> f64 {
        self.entries.iter().map(|e| e.coeff_max()).fold(0.0, f64::max)
    }
}

pub fn commutator(a: &SuperMatrix, b: &SuperMatrix) -> Result<SuperMatrix> {
    a.matmul(b)?.sub(&b.matmul(a)?)
}

/// Canonical rank-one projector `w w^dagger / |w|^2`.
pub fn projector(w: &SuperVector) -> Result<SuperMatrix> {
    let ninv = norm2(w)?.inv()?;
    let n = w.dim();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(w.entry(i).mul(&w.entry(j).dagger()?)?.mul(&ninv)?);
        }
    }
    SuperMatrix::from_entries(n, entries)
}

/// Projector of the k-th member of the orthogonalization tower.
pub fn projector_k(w: &SuperVector, k: usize) -> Result<SuperMatrix> {
    projector(&p_plus_k(w, k)?)
}

/// Complex polynomial in `x+`, used for bosonic component functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn constant(c: Complex64) -> Self {
        Poly(vec![c])
    }

    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == Complex64::ZERO)
    }

    /// Evaluates the polynomial to a jet in `x+` by Horner's rule.
    pub fn eval_jet(&self, base: Complex64, orders: (usize, usize)) -> Result<Jet2> {
        if self.0.is_empty() {
            return Ok(Jet2::zero(base, orders));
        }
        if self.0.len() == 1 {
            return Ok(Jet2::constant(self.0[0], base, orders));
        }
        let x = Jet2::variable(Var::Plus, base, orders)?;
        let mut acc = Jet2::constant(*self.0.last().unwrap(), base, orders);
        for c in self.0.iter().rev().skip(1) {
            acc = acc.mul(&x)?.add(&Jet2::constant(*c, base, orders))?;
        }
        Ok(acc)
    }
}

/// Odd component function: a polynomial in `x+` times one odd generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OddPoly {
    /// Generator index in the algebra configuration (an epsilon generator).
    pub gen: usize,
    pub poly: Poly,
}

impl OddPoly {
    pub fn eval(&self, algebra: &Arc<AlgebraConfig>, shape: JetShape) -> Result<Supernumber> {
        if self.gen >= algebra.len() {
            return Err(Error::Config(format!(
                "odd generator index {} outside algebra of {} generators",
                self.gen,
                algebra.len()
            )));
        }
        let jet = self.poly.eval_jet(shape.base, shape.orders)?;
        Ok(Supernumber::monomial(algebra.clone(), 1 << self.gen, jet))
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// The Veronese curve `(sqrt(C(N-1,r)) x+^r)_{r=0..N-1}` as a purely even,
/// holomorphic supervector.
pub fn veronese(
    algebra: &Arc<AlgebraConfig>,
    n: usize,
    base: Complex64,
    orders: (usize, usize),
) -> Result<SuperVector> {
    if n < 2 {
        return Err(Error::Config("Veronese curve needs N >= 2".into()));
    }
    let x = Jet2::variable(Var::Plus, base, orders)?;
    let mut entries = Vec::with_capacity(n);
    let mut power = Jet2::one(base, orders);
    for r in 0..n {
        let c = binomial(n - 1, r).sqrt();
        entries.push(Supernumber::from_jet(
            algebra.clone(),
            power.scale(Complex64::new(c, 0.0)),
        ));
        if r + 1 < n {
            power = power.mul(&x)?;
        }
    }
    SuperVector::new(entries)
}

/// Declarative curve description, shared by the checkers and the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveSpec {
    pub n: usize,
    pub kind: CurveKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum CurveKind {
    /// Plain bosonic Veronese curve.
    Veronese,
    /// `w = u + i theta+ (xi1 / sqrt(N-1)) d+ u` with `u` the Veronese curve.
    Gsv { xi1: OddPoly },
    /// `w = u + i theta+ sum_i phi_i d+^i u`; `u` defaults to Veronese.
    Custom {
        u: Option<Vec<Poly>>,
        /// Pairs `(i, phi_i)` with `i >= 1` (`phi_0 = 0` by gauge choice).
        phis: Vec<(usize, OddPoly)>,
    },
}

impl CurveSpec {
    pub fn veronese(n: usize) -> Self {
        CurveSpec {
            n,
            kind: CurveKind::Veronese,
        }
    }

    pub fn gsv(n: usize, xi1: OddPoly) -> Self {
        CurveSpec {
            n,
            kind: CurveKind::Gsv { xi1 },
        }
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            CurveKind::Veronese => "veronese",
            CurveKind::Gsv { .. } => "gsv",
            CurveKind::Custom { .. } => "custom",
        }
    }

    pub fn build(
        &self,
        algebra: &Arc<AlgebraConfig>,
        base: Complex64,
        orders: (usize, usize),
    ) -> Result<SuperVector> {
        let phis: Vec<(usize, OddPoly)> = match &self.kind {
            CurveKind::Veronese => vec![],
            CurveKind::Gsv { xi1 } => {
                let scale = 1.0 / ((self.n - 1) as f64).sqrt();
                let poly = Poly(xi1.poly.0.iter().map(|c| c * scale).collect());
                vec![(
                    1,
                    OddPoly {
                        gen: xi1.gen,
                        poly,
                    },
                )]
            }
            CurveKind::Custom { phis, .. } => phis.clone(),
        };
        let u = match &self.kind {
            CurveKind::Custom { u: Some(polys), .. } => {
                if polys.len() != self.n {
                    return Err(Error::Config("custom curve has wrong dimension".into()));
                }
                SuperVector::new(
                    polys
                        .iter()
                        .map(|p| {
                            Ok(Supernumber::from_jet(
                                algebra.clone(),
                                p.eval_jet(base, orders)?,
                            ))
                        })
                        .collect::<Result<Vec<_>>>()?,
                )?
            }
            _ => veronese(algebra, self.n, base, orders)?,
        };
        build_odd_extension(&u, &phis)
    }
}

/// `w = u + i theta+ sum phi_i d+^i u` for a bosonic holomorphic `u`.
pub fn build_odd_extension(u: &SuperVector, phis: &[(usize, OddPoly)]) -> Result<SuperVector> {
    let mut max_i = 0;
    for (i, phi) in phis {
        if *i == 0 {
            return Err(Error::Config("phi_0 must vanish by gauge choice".into()));
        }
        if !phi.poly.is_zero() && phi.gen < 2 {
            // theta generators are reserved for the superspace expansion
            return Err(Error::Config("odd component functions must use epsilon generators".into()));
        }
        max_i = max_i.max(*i);
    }
    let q0 = square_orders(u.orders());
    if q0 < max_i {
        return Err(Error::Truncation("curve derivatives exhaust the jet order".into()));
    }
    let target = (q0 - max_i, q0 - max_i);
    let shape = JetShape::new(u.shape().base, target);
    let algebra = u.algebra().clone();
    let theta = Supernumber::generator(algebra.clone(), THETA_PLUS, shape);

    let mut w = u.truncated(target)?;
    let mut derivative = u.clone();
    let mut current = 0usize;
    for (i, phi) in phis {
        while current < *i {
            derivative = derivative.x_partial_sq(Var::Plus)?;
            current += 1;
        }
        if phi.poly.is_zero() {
            continue;
        }
        let phi_sn = phi.eval(&algebra, shape)?;
        let factor = theta.mul(&phi_sn)?.scale(Complex64::I);
        let term = derivative
            .truncated(target)?
            .map(|e| factor.mul(e))?;
        w = w.add(&term)?;
    }
    Ok(w)
}

/// SUSY translation: applies the nilpotent Taylor step
/// `A + i theta+ (xi1/sqrt(N-1)) d+ A + i theta- (xi1^dag/sqrt(N-1)) d- A
///  - theta+ theta- (|xi1|^2/(N-1)) d+ d- A` entrywise.
///
/// For holomorphic input the minus-derivative terms vanish and this reduces
/// to the two-term shift generating the invariant holomorphic solutions.
pub fn susy_shift(v: &SuperVector, xi1: &Supernumber, n: usize) -> Result<SuperVector> {
    if !xi1.is_odd() && xi1.coeff_max() > 0.0 {
        return Err(Error::Parity("SUSY shift parameter must be odd".into()));
    }
    let q = square_orders(v.orders());
    if q == 0 {
        return Err(Error::Truncation("SUSY shift needs order >= 1".into()));
    }
    let target = (q - 1, q - 1);
    let shape = JetShape::new(v.shape().base, target);
    let algebra = v.algebra().clone();
    let scale = 1.0 / ((n - 1) as f64).sqrt();

    let xi = xi1.truncated(target)?;
    let xid = xi.dagger()?;
    let theta_p = Supernumber::generator(algebra.clone(), THETA_PLUS, shape);
    let theta_m = Supernumber::generator(algebra.clone(), THETA_MINUS, shape);

    let dp = v.x_partial_sq(Var::Plus)?.truncated(target)?;
    let dm = v.x_partial_sq(Var::Minus)?.truncated(target)?;
    let dpdm = v
        .map(|e| e.x_partial(Var::Plus)?.x_partial(Var::Minus)?.truncated(target))?;

    let f1 = theta_p.mul(&xi)?.scale(Complex64::I * scale);
    let f2 = theta_m.mul(&xid)?.scale(Complex64::I * scale);
    let f3 = theta_p
        .mul(&theta_m)?
        .mul(&xid.mul(&xi)?)?
        .scale(-Complex64::ONE * scale * scale);

    let mut out = v.truncated(target)?;
    out = out.add(&dp.map(|e| f1.mul(e))?)?;
    out = out.add(&dm.map(|e| f2.mul(e))?)?;
    out = out.add(&dpdm.map(|e| f3.mul(e))?)?;
    Ok(out)
}

/// Determinant of a matrix of commuting (even) supernumbers by Laplace
/// expansion. Intended for the small wedge/minor computations.
pub fn det_even(rows: &[Vec<Supernumber>]) -> Result<Supernumber> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config("determinant needs a square matrix".into()));
    }
    if n == 1 {
        return Ok(rows[0][0].clone());
    }
    let mut acc: Option<Supernumber> = None;
    for (j, pivot) in rows[0].iter().enumerate() {
        let minor: Vec<Vec<Supernumber>> = rows[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let mut term = pivot.mul(&det_even(&minor)?)?;
        if j % 2 == 1 {
            term = term.neg();
        }
        acc = Some(match acc {
            Some(a) => a.add(&term)?,
            None => term,
        });
    }
    Ok(acc.expect("n >= 1"))
}

/// Anti-holomorphic dual of a holomorphic supervector: the Hodge dual of
/// `w* ^ d- w* ^ ... ^ d-^{N-2} w*`, proportional to the top of the
/// orthogonalization tower but exactly annihilated by the plus
/// superderivative.
pub fn antiholomorphic_dual(w: &SuperVector) -> Result<SuperVector> {
    let n = w.dim();
    if n < 2 {
        return Err(Error::Config("dual needs N >= 2".into()));
    }
    let mut rows: Vec<SuperVector> = vec![w.dagger()?];
    for _ in 1..(n - 1) {
        rows.push(rows.last().unwrap().x_partial_sq(Var::Minus)?);
    }
    let orders = rows.last().unwrap().orders();
    let rows: Vec<SuperVector> = rows
        .into_iter()
        .map(|r| r.truncated(orders))
        .collect::<Result<Vec<_>>>()?;

    let mut entries = Vec::with_capacity(n);
    for m in 0..n {
        let minor: Vec<Vec<Supernumber>> = rows
            .iter()
            .map(|r| {
                (0..n)
                    .filter(|c| *c != m)
                    .map(|c| r.entry(c).clone())
                    .collect()
            })
            .collect();
        let mut d = det_even(&minor)?;
        if m % 2 == 1 {
            d = d.neg();
        }
        entries.push(d);
    }
    SuperVector::new(entries)
}
