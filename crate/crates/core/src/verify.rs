//! Theorem-level checkers. Each checker turns one claim about the model
//! into residual computations at seeded sample points and returns a
//! structured report; negative controls are required to exceed a separation
//! threshold so a silently trivialized check cannot pass.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    body_matrix, conservation_residual, curvature, curvature_holomorphic, el_residual, embed,
    expected_curvature, metric_pp, su_basis, surface_x, Curvature,
};
use crate::grassmann::{AlgebraConfig, JetShape, Supernumber, THETA_PLUS};
use crate::jet::{one_plus_norm2, Jet2, Var};
use crate::superfield::{
    antiholomorphic_dual, inner, norm2, p_plus_k, projector, projector_k, super_partial,
    CurveKind, CurveSpec, OddPoly, Poly, SuperMatrix, SuperVector,
};

pub const RES_TOL: f64 = 1e-9;
pub const CURV_REL_TOL: f64 = 1e-8;
pub const SOUL_TOL: f64 = 1e-8;
pub const CP1_TOL: f64 = 1e-10;
pub const SPHERE_TOL: f64 = 1e-10;
pub const CP1_COORD_TOL: f64 = 1e-12;
pub const DET_A_TOL: f64 = 1e-12;
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Negative controls must exceed this; two decades above the positive
/// tolerances so truncation noise cannot blur the separation.
pub const NEG_THRESHOLD: f64 = 1e-4;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 10;

/// Per-run overrides shared by all checkers. `orders` replaces the automatic
/// jet truncation orders; `tol` replaces the primary tolerance of a check
/// (auxiliary tolerances such as the soul bound stay pinned).
#[derive(Clone, Copy, Debug, Default)]
pub struct CheckOptions {
    pub orders: Option<(usize, usize)>,
    pub tol: Option<f64>,
}

impl CheckOptions {
    fn orders_for(&self, n: usize) -> (usize, usize) {
        self.orders.unwrap_or_else(|| auto_orders(n))
    }

    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

const R_MIN: f64 = 0.2;
const R_MAX: f64 = 2.0;

/// Truncation orders used when none are requested: the tower consumes N-1
/// derivatives, the metric one more, the curvature two, conservation one.
pub fn auto_orders(n: usize) -> (usize, usize) {
    (n + 3, n + 3)
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct ComplexRecord {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexRecord {
    fn from(z: Complex64) -> Self {
        ComplexRecord { re: z.re, im: z.im }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CurvatureRecord {
    pub body: ComplexRecord,
    pub soul_max: f64,
}

impl From<&Curvature> for CurvatureRecord {
    fn from(k: &Curvature) -> Self {
        CurvatureRecord {
            body: k.body.into(),
            soul_max: k.soul_max,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SampleRecord {
    pub point: ComplexRecord,
    pub residuals: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub curvature: Option<CurvatureRecord>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CheckParams {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub curve: Option<String>,
    pub seed: u64,
    pub jet_orders: [usize; 2],
    pub samples: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct VerificationReport {
    pub name: String,
    pub params: CheckParams,
    pub samples: Vec<SampleRecord>,
    pub verdict: String,
    pub tolerance: f64,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

/// Reference curvature for checks that record one, keyed by check name.
pub fn expected_for(report: &VerificationReport) -> Option<f64> {
    match report.name.as_str() {
        "constant_curvature" => Some(expected_curvature(report.params.n?, report.params.k?)),
        "cp1_holomorphic" => Some(4.0),
        "gsv_uniqueness" => Some(expected_curvature(report.params.n?, report.params.k?)),
        _ => None,
    }
}

/// Report under construction; positive residuals must stay within their
/// tolerance at every sample, negative controls must exceed the separation
/// threshold at some sample.
struct Check {
    name: String,
    params: CheckParams,
    samples: Vec<SampleRecord>,
    tolerance: f64,
    ok: bool,
    neg_max: BTreeMap<String, f64>,
    started: Instant,
}

impl Check {
    fn new(name: &str, params: CheckParams, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            params,
            samples: Vec::new(),
            tolerance,
            ok: true,
            neg_max: BTreeMap::new(),
            started: Instant::now(),
        }
    }

    fn sample(&mut self, point: Complex64) -> Sample<'_> {
        self.samples.push(SampleRecord {
            point: point.into(),
            residuals: BTreeMap::new(),
            curvature: None,
        });
        Sample { check: self }
    }

    fn finish(mut self) -> VerificationReport {
        for v in self.neg_max.values() {
            if !(*v > NEG_THRESHOLD) {
                self.ok = false;
            }
        }
        VerificationReport {
            name: self.name,
            params: self.params,
            samples: self.samples,
            verdict: if self.ok { "pass" } else { "fail" }.to_string(),
            tolerance: self.tolerance,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        }
    }
}

struct Sample<'a> {
    check: &'a mut Check,
}

impl Sample<'_> {
    fn record(&mut self) -> &mut SampleRecord {
        self.check.samples.last_mut().expect("sample pushed")
    }

    fn positive(&mut self, key: &str, value: f64) -> &mut Self {
        self.positive_tol(key, value, self.check.tolerance)
    }

    fn positive_tol(&mut self, key: &str, value: f64, tol: f64) -> &mut Self {
        self.record().residuals.insert(key.to_string(), value);
        if !(value <= tol) {
            self.check.ok = false;
        }
        self
    }

    fn negative(&mut self, key: &str, value: f64) -> &mut Self {
        let key = format!("neg_{key}");
        self.record().residuals.insert(key.clone(), value);
        let m = self.check.neg_max.entry(key).or_insert(0.0);
        if value > *m {
            *m = value;
        }
        self
    }

    fn curvature(&mut self, k: &Curvature) -> &mut Self {
        self.record().curvature = Some(k.into());
        self
    }
}

fn params(
    n: Option<usize>,
    k: Option<usize>,
    curve: Option<String>,
    seed: u64,
    orders: (usize, usize),
    samples: usize,
) -> CheckParams {
    CheckParams {
        n,
        k,
        curve,
        seed,
        jet_orders: [orders.0, orders.1],
        samples,
    }
}

/// Seeded sample points, area-uniform in the annulus `R_MIN <= |p| <= R_MAX`.
pub fn sample_points(seed: u64, count: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let t: f64 = rng.random();
            let r = (R_MIN * R_MIN + t * (R_MAX * R_MAX - R_MIN * R_MIN)).sqrt();
            let angle: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            Complex64::from_polar(r, angle)
        })
        .collect()
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> Poly {
    Poly((0..=deg).map(|_| random_coeff(rng)).collect())
}

/// Random holomorphic supervector: polynomial body plus, when requested, an
/// `i theta+ eps_1` polynomial part. The leading entry is offset away from
/// zero so bodies stay invertible on the sampled annulus.
fn random_holomorphic(
    rng: &mut ChaCha8Rng,
    algebra: &Arc<AlgebraConfig>,
    n: usize,
    shape: JetShape,
    with_odd: bool,
) -> Result<SuperVector> {
    let odd_mask: u8 = (1 << THETA_PLUS) | (1 << AlgebraConfig::epsilon(1));
    let mut entries = Vec::with_capacity(n);
    for i in 0..n {
        let mut poly = random_poly(rng, 2);
        if i == 0 {
            poly.0[0] += Complex64::new(4.0, 0.0);
        }
        let mut e = Supernumber::from_jet(algebra.clone(), poly.eval_jet(shape.base, shape.orders)?);
        if with_odd {
            let odd = random_poly(rng, 1).eval_jet(shape.base, shape.orders)?;
            e = e.add(&Supernumber::monomial(
                algebra.clone(),
                odd_mask,
                odd.scale(Complex64::I),
            ))?;
        }
        entries.push(e);
    }
    SuperVector::new(entries)
}

fn gsv_xi1() -> OddPoly {
    OddPoly {
        gen: AlgebraConfig::epsilon(1),
        poly: Poly(vec![
            Complex64::new(0.8, 0.3),
            Complex64::new(0.4, -0.2),
        ]),
    }
}

/// Default curve used by checks that need one GSV representative.
pub fn default_gsv(n: usize) -> CurveSpec {
    CurveSpec::gsv(n, gsv_xi1())
}

fn algebra_for(spec: &CurveSpec) -> Result<Arc<AlgebraConfig>> {
    match &spec.kind {
        CurveKind::Veronese => Ok(AlgebraConfig::thetas()),
        _ => AlgebraConfig::with_epsilons(1),
    }
}

/// Largest base-point value among monomials containing theta+.
fn theta_plus_component_max(s: &Supernumber) -> f64 {
    s.terms()
        .filter(|(m, _)| m & (1 << THETA_PLUS) != 0)
        .map(|(_, j)| j.value().norm())
        .fold(0.0, f64::max)
}

fn xi_vector(w: &SuperVector) -> Result<SuperVector> {
    w.map(|e| Ok(e.theta_derivative(THETA_PLUS).scale(-Complex64::I)))
}

fn unit_scaled(v: &SuperVector) -> Result<SuperVector> {
    let n2 = norm2(v)?.body().value().re;
    if n2 <= 0.0 {
        return Err(Error::Singular("vector has vanishing body norm".into()));
    }
    Ok(v.scale(Complex64::new(1.0 / n2.sqrt(), 0.0)))
}

// ---------------------------------------------------------------------------
// operator algebra

fn random_supernumber(
    rng: &mut ChaCha8Rng,
    algebra: &Arc<AlgebraConfig>,
    shape: JetShape,
) -> Result<Supernumber> {
    let mut s = Supernumber::zero(algebra.clone(), shape);
    for mask in 0..(1u16 << algebra.len()) as u16 {
        let jet = random_poly(rng, 1)
            .eval_jet(shape.base, shape.orders)?
            .mul(
                &Jet2::variable(Var::Minus, shape.base, shape.orders)?
                    .scale(random_coeff(rng))
                    .add(&Jet2::one(shape.base, shape.orders))?,
            )?;
        s = s.add(&Supernumber::monomial(algebra.clone(), mask as u8, jet))?;
    }
    Ok(s)
}

/// The superspace operator algebra on random mixed elements:
/// `{D-, D+} = 0`, `D(+-)^2 = -i d(+-)`, `{Q-, Q+} = 0`, `Q(+-)^2 = i d(+-)`,
/// `{Q(+-), D(+-)} = 0` and the mixed pairs.
pub fn check_operator_algebra(
    seed: u64,
    trials: usize,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    let orders = opts.orders.unwrap_or((4, 4));
    let mut check = Check::new(
        "operator_algebra",
        params(None, None, None, seed, orders, trials),
        opts.tol_or(ALGEBRA_TOL),
    );
    let algebra = AlgebraConfig::with_epsilons(1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = sample_points(seed ^ 0x5eed, trials);
    for p in points {
        let shape = JetShape::new(p, orders);
        let a = random_supernumber(&mut rng, &algebra, shape)?;
        type Op = fn(&Supernumber, Var) -> Result<Supernumber>;
        let d: Op = super_partial;
        let q: Op = crate::superfield::supercharge;

        let anti = |f: Op, g: Op, x: Var, y: Var| -> Result<f64> {
            let t1 = f(&g(&a, y)?, x)?;
            let t2 = g(&f(&a, x)?, y)?;
            Ok(t1.add(&t2)?.coeff_max())
        };

        let sq = |op: Op, x: Var, sign: f64| -> Result<f64> {
            let lhs = op(&op(&a, x)?, x)?;
            let rhs = a.x_partial(x)?.scale(Complex64::I * sign);
            Ok(lhs.max_abs_diff(&rhs))
        };

        let mut s = check.sample(p);
        s.positive("anti_d_d", anti(d, d, Var::Plus, Var::Minus)?);
        s.positive("anti_q_q", anti(q, q, Var::Plus, Var::Minus)?);
        s.positive("anti_q_d_plus", anti(q, d, Var::Plus, Var::Plus)?);
        s.positive("anti_q_d_minus", anti(q, d, Var::Minus, Var::Minus)?);
        s.positive("anti_q_d_mixed_pm", anti(q, d, Var::Plus, Var::Minus)?);
        s.positive("anti_q_d_mixed_mp", anti(q, d, Var::Minus, Var::Plus)?);
        s.positive("d_plus_sq", sq(d, Var::Plus, -1.0)?);
        s.positive("d_minus_sq", sq(d, Var::Minus, -1.0)?);
        s.positive("q_plus_sq", sq(q, Var::Plus, 1.0)?);
        s.positive("q_minus_sq", sq(q, Var::Minus, 1.0)?);
    }
    Ok(check.finish())
}

// ---------------------------------------------------------------------------
// curvature

/// Constant curvature of the k-th tower member over a curve family.
pub fn check_constant_curvature(
    spec: &CurveSpec,
    k: usize,
    samples: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    let n = spec.n;
    if k >= n {
        return Err(Error::Config(format!("k = {k} outside tower of CP^{}", n - 1)));
    }
    let orders = opts.orders_for(n);
    let mut check = Check::new(
        "constant_curvature",
        params(
            Some(n),
            Some(k),
            Some(spec.label().to_string()),
            seed,
            orders,
            samples,
        ),
        opts.tol_or(CURV_REL_TOL),
    );
    let algebra = algebra_for(spec)?;
    let expected = expected_curvature(n, k);
    for p in sample_points(seed, samples) {
        let w = spec.build(&algebra, p, orders)?;
        let kappa = curvature(&w, k)?;
        let rel = (kappa.body - expected).norm() / expected;
        let mut s = check.sample(p);
        s.curvature(&kappa)
            .positive("curvature_rel_err", rel)
            .positive_tol("soul_max", kappa.soul_max, SOUL_TOL)
            .positive_tol("g_pp", metric_pp(&p_plus_k(&w, k)?)?.value_max(), SOUL_TOL);
    }
    Ok(check.finish())
}

/// CP^1: every holomorphic superfield gives curvature 4, by the metric route
/// and by the closed tower formula.
pub fn check_cp1_holomorphic(
    curves: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    let orders = opts.orders_for(2);
    let mut check = Check::new(
        "cp1_holomorphic",
        params(Some(2), Some(0), Some("random".into()), seed, orders, curves),
        opts.tol_or(CP1_TOL),
    );
    let algebra = AlgebraConfig::with_epsilons(1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in sample_points(seed, curves) {
        let shape = JetShape::new(p, orders);
        let w = random_holomorphic(&mut rng, &algebra, 2, shape, true)?;
        let km = curvature(&w, 0)?;
        let kf = curvature_holomorphic(&w)?;
        let dev = |k: &Curvature| -> Result<f64> {
            let four = Supernumber::constant(
                algebra.clone(),
                Complex64::new(4.0, 0.0),
                k.value.shape(),
            );
            Ok(k.value.sub(&four)?.value_max())
        };
        let mut s = check.sample(p);
        s.curvature(&km)
            .positive("k_metric_dev", dev(&km)?)
            .positive("k_form_dev", dev(&kf)?);
    }
    Ok(check.finish())
}

// ---------------------------------------------------------------------------
// Euler-Lagrange and conservation

/// Euler-Lagrange, super-conservation and current conservation for the k-th
/// tower projector of a curve family.
pub fn check_el(
    spec: &CurveSpec,
    k: usize,
    samples: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    let n = spec.n;
    let orders = opts.orders_for(n);
    let mut check = Check::new(
        "el_conservation",
        params(
            Some(n),
            Some(k),
            Some(spec.label().to_string()),
            seed,
            orders,
            samples,
        ),
        opts.tol_or(RES_TOL),
    );
    let algebra = algebra_for(spec)?;
    for p in sample_points(seed, samples) {
        let w = spec.build(&algebra, p, orders)?;
        let pr = projector_k(&w, k)?;
        let mut s = check.sample(p);
        s.positive("el", el_residual(&pr)?.value_max())
            .positive("susycons", susycons_residual(&pr)?.value_max())
            .positive("conservation", conservation_residual(&pr)?.value_max());
    }
    Ok(check.finish())
}

/// `D+ [D- P, P] - D- [D+ P, P]`.
fn susycons_residual(p: &SuperMatrix) -> Result<SuperMatrix> {
    let comm = |x: Var| -> Result<SuperMatrix> {
        let dp = p.super_partial(x)?;
        let pt = p.truncated(dp.orders())?;
        dp.matmul(&pt)?.sub(&pt.matmul(&dp)?)
    };
    comm(Var::Minus)?
        .super_partial(Var::Plus)?
        .sub(&comm(Var::Plus)?.super_partial(Var::Minus)?)
}

/// Negative control: odd part along `d+^{N-1} u` (outside span{d+ u}) breaks
/// the Euler-Lagrange equation of the mixed projector.
pub fn check_el_negative(
    n: usize,
    samples: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    let orders = opts.orders_for(n);
    let mut check = Check::new(
        "el_negative_control",
        params(Some(n), Some(1), Some("off_span".into()), seed, orders, samples),
        opts.tol_or(RES_TOL),
    );
    let algebra = AlgebraConfig::with_epsilons(1)?;
    let odd_mask: u8 = (1 << THETA_PLUS) | (1 << AlgebraConfig::epsilon(1));
    for p in sample_points(seed, samples) {
        let w = off_span_curve(&algebra, n, p, orders, odd_mask)?;
        let pr = projector_k(&w, 1)?;
        let mut s = check.sample(p);
        s.negative("el", el_residual(&pr)?.value_max());
    }
    Ok(check.finish())
}

/// `w = u + i theta+ eps_1 e_{N-1}`: constant odd part proportional to
/// `d+^{N-1} u`, which no GSV gauge can remove.
fn off_span_curve(
    algebra: &Arc<AlgebraConfig>,
    n: usize,
    p: Complex64,
    orders: (usize, usize),
    odd_mask: u8,
) -> Result<SuperVector> {
    let u = crate::superfield::veronese(algebra, n, p, orders)?;
    let shape = u.shape();
    let bump = Supernumber::monomial(
        algebra.clone(),
        odd_mask,
        Jet2::constant(Complex64::I, shape.base, shape.orders),
    );
    let mut entries: Vec<Supernumber> = u.entries().to_vec();
    let last = entries.len() - 1;
    entries[last] = entries[last].add(&bump)?;
    SuperVector::new(entries)
}

// ---------------------------------------------------------------------------
// GSV uniqueness

/// Uniqueness obstruction: phi_2 != 0 shows up in the theta+ component of
/// the curvature of the first mixed tower member; the biharmonic equation
/// for `h` and the triangular change-of-basis determinant round it out.
pub fn check_gsv_uniqueness(
    n: usize,
    samples: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    if n < 3 {
        return Err(Error::Config("uniqueness check needs N >= 3".into()));
    }
    let orders = opts.orders_for(n);
    let mut check = Check::new(
        "gsv_uniqueness",
        params(Some(n), Some(1), Some("gsv".into()), seed, orders, samples),
        opts.tol_or(RES_TOL),
    );
    let algebra = AlgebraConfig::with_epsilons(1)?;
    let eps = AlgebraConfig::epsilon(1);
    let good = default_gsv(n);
    let bad = CurveSpec {
        n,
        kind: CurveKind::Custom {
            u: None,
            phis: vec![(
                2,
                OddPoly {
                    gen: eps,
                    poly: Poly::constant(Complex64::ONE),
                },
            )],
        },
    };
    let expected_det = factorial(n - 1).powf(n as f64 / 2.0);
    for p in sample_points(seed, samples) {
        let wg = good.build(&algebra, p, orders)?;
        let kg = curvature(&wg, 1)?;
        let wb = bad.build(&algebra, p, orders)?;
        let kb = curvature(&wb, 1)?;

        let det = det_a(&algebra, n, p)?;
        let h_res = h_biharmonic_residual(&wg, n)?;

        let mut s = check.sample(p);
        s.curvature(&kg)
            .positive("k1_theta_component", theta_plus_component_max(&kg.value))
            .positive("h_biharmonic", h_res)
            .positive_tol("det_a_err", (det - expected_det).norm() / expected_det, DET_A_TOL)
            .negative("k1_theta_component", theta_plus_component_max(&kb.value));
    }
    Ok(check.finish())
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product::<f64>().max(1.0)
}

/// Determinant of `A = (u, d+ u, ..., d+^{N-1} u)`; constant in x by
/// triangularity.
fn det_a(algebra: &Arc<AlgebraConfig>, n: usize, p: Complex64) -> Result<Complex64> {
    let u = crate::superfield::veronese(algebra, n, p, (n, n))?;
    let mut col = u;
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        for r in 0..n {
            m[(r, j)] = col.entry(r).body().value();
        }
        if j + 1 < n {
            col = col.x_partial_sq(Var::Plus)?;
        }
    }
    Ok(m.determinant())
}

/// `d+^2 d-^2 [ (1+|x|^2)^{2-N} u^dag xi ]` for the odd part xi of `w`.
fn h_biharmonic_residual(w: &SuperVector, n: usize) -> Result<f64> {
    let orders = w.orders();
    let algebra = w.algebra().clone();
    let u = w.map(|e| {
        Ok(Supernumber::from_jet(algebra.clone(), e.body()))
    })?;
    let xi = xi_vector(w)?;
    let a1 = inner(&u, &xi)?;
    let mut pref = Jet2::one(w.shape().base, orders);
    if n > 2 {
        let inv = one_plus_norm2(w.shape().base, orders)?.inv()?;
        for _ in 0..(n - 2) {
            pref = pref.mul(&inv)?;
        }
    }
    let h = a1.scale_jet(&pref)?;
    let res = h
        .x_partial(Var::Plus)?
        .x_partial(Var::Plus)?
        .x_partial(Var::Minus)?
        .x_partial(Var::Minus)?;
    Ok(res.value_max())
}

// ---------------------------------------------------------------------------
// Propositions 1 and 2

/// Gram-Schmidt tower `w_i = (I - P^{(i-1)}) phi_i` for given holomorphic
/// supervectors.
fn orthogonal_tower(phis: &[SuperVector]) -> Result<Vec<SuperVector>> {
    let mut ws: Vec<SuperVector> = Vec::new();
    for phi in phis {
        let mut v = phi.clone();
        for w in &ws {
            let coef = inner(w, phi)?.mul(&norm2(w)?.inv()?)?;
            v = v.sub(&w.scale_sn(&coef)?)?;
        }
        ws.push(v);
    }
    Ok(ws)
}

fn sum_projectors(ws: &[SuperVector]) -> Result<SuperMatrix> {
    let mut acc: Option<SuperMatrix> = None;
    for w in ws {
        let p = projector(w)?;
        acc = Some(match acc {
            Some(a) => a.add(&p)?,
            None => p,
        });
    }
    acc.ok_or_else(|| Error::Config("empty projector sum".into()))
}

/// Proposition: the rank-(m+1) projector over unrestricted holomorphic
/// supervectors is a holomorphic Grassmannian solution,
/// `P^{(m)} D- P^{(m)} = D- P^{(m)}`.
pub fn check_prop1(
    n: usize,
    m: usize,
    samples: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    if m + 1 > n {
        return Err(Error::Config("rank exceeds dimension".into()));
    }
    let orders = opts.orders_for(n);
    let mut check = Check::new(
        "prop1_grassmann_holomorphic",
        params(Some(n), Some(m), Some("random".into()), seed, orders, samples),
        opts.tol_or(RES_TOL),
    );
    let algebra = AlgebraConfig::with_epsilons(1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in sample_points(seed, samples) {
        let shape = JetShape::new(p, orders);
        let phis: Vec<SuperVector> = (0..=m)
            .map(|_| random_holomorphic(&mut rng, &algebra, n, shape, true))
            .collect::<Result<Vec<_>>>()?;
        let ws = orthogonal_tower(&phis)?;
        let ws: Vec<SuperVector> = ws.iter().map(unit_scaled).collect::<Result<Vec<_>>>()?;
        let pm = sum_projectors(&ws)?;
        let dp = pm.super_partial(Var::Minus)?;
        let res = pm.truncated(dp.orders())?.matmul(&dp)?.sub(&dp)?;
        let mut s = check.sample(p);
        s.positive("prop1", res.value_max());
    }
    Ok(check.finish())
}

/// The mixed-solution criterion: for `xi = phi_1 d+ u` every constraint
/// `(P+^j w)^dag xi = 0` (j = 2..N-1) holds, the induced condition
/// `(D- P^(0)) P_1 = D- P^(0)` holds, and the first mixed projector solves
/// the model; `xi = phi_1 d+^2 u` violates the j = 2 constraint.
pub fn check_prop2(
    n: usize,
    samples: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    if n < 3 {
        return Err(Error::Config("prop2 check needs N >= 3".into()));
    }
    let orders = opts.orders_for(n);
    let mut check = Check::new(
        "prop2_xi_constraint",
        params(Some(n), Some(1), Some("gsv".into()), seed, orders, samples),
        opts.tol_or(RES_TOL),
    );
    let algebra = AlgebraConfig::with_epsilons(1)?;
    let eps = AlgebraConfig::epsilon(1);
    let good = CurveSpec {
        n,
        kind: CurveKind::Custom {
            u: None,
            phis: vec![(
                1,
                OddPoly {
                    gen: eps,
                    poly: Poly(vec![Complex64::new(0.6, -0.3), Complex64::new(0.2, 0.5)]),
                },
            )],
        },
    };
    let bad = CurveSpec {
        n,
        kind: CurveKind::Custom {
            u: None,
            phis: vec![(
                2,
                OddPoly {
                    gen: eps,
                    poly: Poly::constant(Complex64::ONE),
                },
            )],
        },
    };
    for p in sample_points(seed, samples) {
        let wg = good.build(&algebra, p, orders)?;
        let xi = xi_vector(&wg)?;
        let mut s = check.sample(p);
        for j in 2..n {
            let tower = unit_scaled(&p_plus_k(&wg, j)?)?;
            s.positive(&format!("constraint_j{j}"), inner(&tower, &xi)?.value_max());
        }
        drop(s);

        let p0 = projector_k(&wg, 0)?;
        let p1 = projector_k(&wg, 1)?;
        let dp0 = p0.super_partial(Var::Minus)?;
        let condisol = dp0.matmul(&p1.truncated(dp0.orders())?)?.sub(&dp0)?;
        let el = el_residual(&p1)?;

        let wb = bad.build(&algebra, p, orders)?;
        let xib = xi_vector(&wb)?;
        let towerb = unit_scaled(&p_plus_k(&wb, 2)?)?;

        let mut s = self_sample(&mut check);
        s.positive("condisol", condisol.value_max())
            .positive("el_p1", el.value_max())
            .negative("constraint_j2", inner(&towerb, &xib)?.value_max());
    }
    Ok(check.finish())
}

// continues the residual map of the sample pushed last
fn self_sample(check: &mut Check) -> Sample<'_> {
    Sample { check }
}

// ---------------------------------------------------------------------------
// G(2,N) theorem

/// G(2,N) mixed solutions: `w = u + i theta+ eps_1 sum a_i d+^i u` with the
/// anti-holomorphic dual alpha. Asserts alpha^dag w = 0, alpha^dag D+ w = 0,
/// D+ alpha = 0, the Euler-Lagrange equation for `P_0 + P_{N-1}` and the
/// complementary projector, and the agreement of the wedge dual with the
/// top of the tower.
pub fn check_g2n(
    n: usize,
    a: &[Poly],
    samples: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    if n < 3 {
        return Err(Error::Config("G(2,N) check needs N >= 3".into()));
    }
    if a.len() != n - 2 {
        return Err(Error::Config(format!(
            "expected {} coefficient functions a_i, got {}",
            n - 2,
            a.len()
        )));
    }
    let orders = opts.orders_for(n);
    let mut check = Check::new(
        "g2n_theorem",
        params(Some(n), None, Some("g2n".into()), seed, orders, samples),
        opts.tol_or(RES_TOL),
    );
    let algebra = AlgebraConfig::with_epsilons(1)?;
    let eps = AlgebraConfig::epsilon(1);
    let spec = CurveSpec {
        n,
        kind: CurveKind::Custom {
            u: None,
            phis: a
                .iter()
                .enumerate()
                .map(|(i, poly)| {
                    (
                        i + 1,
                        OddPoly {
                            gen: eps,
                            poly: poly.clone(),
                        },
                    )
                })
                .collect(),
        },
    };
    // out-of-span control: odd part along d+^{N-1} u
    let bad = CurveSpec {
        n,
        kind: CurveKind::Custom {
            u: None,
            phis: vec![(
                n - 1,
                OddPoly {
                    gen: eps,
                    poly: Poly::constant(Complex64::ONE),
                },
            )],
        },
    };
    for p in sample_points(seed, samples) {
        let w = spec.build(&algebra, p, orders)?;
        let alpha = unit_scaled(&antiholomorphic_dual(&w)?)?;
        let dw = w.super_partial(Var::Plus)?;
        let wu = unit_scaled(&w)?;

        let p0 = projector_k(&w, 0)?;
        let ptop = projector(&alpha)?;
        let su = p0.add(&ptop)?;
        let el = el_residual(&su)?;
        let id = SuperMatrix::identity(algebra.clone(), n, su.shape());
        let complement = id.sub(&su)?;
        let el_comp = el_residual(&complement)?;
        let rela = el_comp.sub(&el)?;

        let tower_top = projector_k(&w, n - 1)?;
        let tower_vs_wedge = tower_top.sub(&ptop)?;

        let wb = bad.build(&algebra, p, orders)?;
        let alphab = unit_scaled(&antiholomorphic_dual(&wb)?)?;
        let dwb = wb.super_partial(Var::Plus)?;

        let mut s = check.sample(p);
        s.positive("alpha_dag_w", inner(&alpha, &wu)?.value_max())
            .positive("alpha_dag_dw", inner(&alpha, &dw)?.value_max())
            .positive("antihol", alpha.super_partial(Var::Plus)?.value_max())
            .positive("el_g2n", el.value_max())
            .positive("el_complement", el_comp.value_max())
            .positive("rela_duality", rela.value_max())
            .positive("tower_vs_wedge", tower_vs_wedge.value_max())
            .negative("alpha_dag_dw", inner(&alphab, &dwb)?.value_max());
        drop(s);

        if n == 3 {
            // determinant form of alpha^dag D+ w on the generic control curve
            let det = g2n_det_form(&wb)?;
            let direct = inner(&antiholomorphic_dual(&wb)?, &dwb)?;
            let scale = 1.0 + direct.coeff_max();
            let mut s = self_sample(&mut check);
            s.positive("det_form_cross", det.max_abs_diff(&direct.neg()) / scale);
        }
    }
    Ok(check.finish())
}

/// For N = 3 in the gauge `w = (1, W_1, W_2)`:
/// `alpha^dag D+ w = det [[xi_1, xi_2], [d+ W_1, d+ W_2]]` up to the overall
/// orientation of the wedge, which here contributes a factor -1.
fn g2n_det_form(w: &SuperVector) -> Result<Supernumber> {
    let xi = xi_vector(w)?;
    let q = w.orders().0.min(w.orders().1) - 1;
    let dw = w.x_partial_sq(Var::Plus)?;
    let xi1 = xi.entry(1).truncated((q, q))?;
    let xi2 = xi.entry(2).truncated((q, q))?;
    xi1.mul(dw.entry(2))?.sub(&xi2.mul(dw.entry(1))?)
}

// ---------------------------------------------------------------------------
// sphere embedding

/// Body surfaces live on the sphere of radius sqrt((1/2)(1-1/N)) inside
/// su(N) = R^{N^2-1}; for N = 2 the coordinates match the closed CP^1 forms.
pub fn check_sphere_embedding(
    n: usize,
    samples: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    let orders = opts.orders_for(n);
    let mut check = Check::new(
        "sphere_embedding",
        params(Some(n), Some(0), Some("random".into()), seed, orders, samples),
        opts.tol_or(SPHERE_TOL),
    );
    let algebra = AlgebraConfig::with_epsilons(1)?;
    let basis = su_basis(n);
    let expected = 0.5 * (1.0 - 1.0 / n as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in sample_points(seed, samples) {
        let shape = JetShape::new(p, orders);
        let w = random_holomorphic(&mut rng, &algebra, n, shape, true)?;
        let x = surface_x(&projector(&w)?)?;
        let xb = body_matrix(&x);
        let (coords, imag) = embed(&xb, &basis);
        let r2: f64 = coords.iter().map(|v| v * v).sum();
        let mut s = check.sample(p);
        s.positive("norm_sq_err", (r2 - expected).abs())
            .positive("hermiticity", imag);
        drop(s);

        if n == 2 {
            // closed CP^1 forms in the gauge W = w_1 / w_0
            let big_w = w.entry(1).body().value() / w.entry(0).body().value();
            let denom = 1.0 + big_w.norm_sqr();
            let closed = [
                (1.0 - big_w.norm_sqr()) / (2.0 * denom),
                big_w.re / denom,
                big_w.im / denom,
            ];
            let err = coords
                .iter()
                .zip(closed.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let mut s = self_sample(&mut check);
            s.positive_tol("cp1_closed_form", err, CP1_COORD_TOL);
        }
    }
    Ok(check.finish())
}

// ---------------------------------------------------------------------------
// suite

/// Every checker at its acceptance-scale parameters, for 2 <= N <= n_max.
pub fn suite(
    n_max: usize,
    samples: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<Vec<VerificationReport>> {
    let n_max = n_max.max(2);
    let mut reports = Vec::new();
    reports.push(check_operator_algebra(seed, 100, opts)?);
    for n in 2..=n_max {
        for k in 0..n {
            reports.push(check_constant_curvature(
                &CurveSpec::veronese(n),
                k,
                samples,
                seed,
                opts,
            )?);
            reports.push(check_constant_curvature(&default_gsv(n), k, samples, seed, opts)?);
        }
    }
    reports.push(check_cp1_holomorphic(5, seed, opts)?);
    if n_max >= 3 {
        reports.push(check_el(&CurveSpec::veronese(3), 1, samples, seed, opts)?);
        reports.push(check_el(&default_gsv(3), 1, samples, seed, opts)?);
        reports.push(check_el_negative(3, samples, seed, opts)?);
    }
    if n_max >= 4 {
        reports.push(check_el(&default_gsv(4), 0, samples, seed, opts)?);
    }
    for n in 3..=n_max.min(5) {
        reports.push(check_gsv_uniqueness(n, samples, seed, opts)?);
    }
    if n_max >= 4 {
        for m in 0..=2 {
            reports.push(check_prop1(4, m, samples, seed, opts)?);
        }
    } else {
        reports.push(check_prop1(n_max, 0, samples, seed, opts)?);
    }
    for n in 3..=n_max.min(4) {
        reports.push(check_prop2(n, samples, seed, opts)?);
    }
    if n_max >= 3 {
        reports.push(check_g2n(3, &[Poly::constant(Complex64::ONE)], samples, seed, opts)?);
    }
    if n_max >= 4 {
        reports.push(check_g2n(
            4,
            &[
                Poly(vec![Complex64::ZERO, Complex64::ONE]),
                Poly::constant(Complex64::ONE),
            ],
            samples,
            seed,
            opts,
        )?);
    }
    for n in 2..=n_max {
        reports.push(check_sphere_embedding(n, samples, seed, opts)?);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_deterministic_and_in_annulus() {
        let a = sample_points(42, 10);
        let b = sample_points(42, 10);
        assert_eq!(a, b);
        for p in &a {
            assert!(p.norm() >= R_MIN && p.norm() <= R_MAX);
        }
        assert_ne!(sample_points(43, 10), a);
    }

    #[test]
    fn operator_algebra_passes() {
        let r = check_operator_algebra(42, 10, &CheckOptions::default()).unwrap();
        assert!(r.passed(), "{:?}", r.samples.first());
    }

    #[test]
    fn curvature_checks_pass() {
        for n in 2..=3 {
            for k in 0..n {
                let r = check_constant_curvature(&CurveSpec::veronese(n), k, 4, 42, &CheckOptions::default()).unwrap();
                assert!(r.passed(), "veronese n={n} k={k}: {:?}", r.samples.first());
                let r = check_constant_curvature(&default_gsv(n), k, 4, 42, &CheckOptions::default()).unwrap();
                assert!(r.passed(), "gsv n={n} k={k}: {:?}", r.samples.first());
            }
        }
    }

    #[test]
    fn cp1_check_passes() {
        let r = check_cp1_holomorphic(5, 42, &CheckOptions::default()).unwrap();
        assert!(r.passed(), "{:?}", r.samples.first());
    }

    #[test]
    fn el_checks() {
        let r = check_el(&default_gsv(3), 1, 4, 42, &CheckOptions::default()).unwrap();
        assert!(r.passed(), "{:?}", r.samples.first());
        let r = check_el_negative(3, 4, 42, &CheckOptions::default()).unwrap();
        assert!(r.passed(), "negative control did not fire: {:?}", r.samples.first());
    }

    #[test]
    fn gsv_uniqueness_check() {
        let r = check_gsv_uniqueness(3, 4, 42, &CheckOptions::default()).unwrap();
        assert!(r.passed(), "{:?}", r.samples.first());
    }

    #[test]
    fn prop1_check() {
        for m in 0..=1 {
            let r = check_prop1(3, m, 3, 42, &CheckOptions::default()).unwrap();
            assert!(r.passed(), "m={m}: {:?}", r.samples.first());
        }
    }

    #[test]
    fn prop2_check() {
        let r = check_prop2(3, 3, 42, &CheckOptions::default()).unwrap();
        assert!(r.passed(), "{:?}", r.samples.first());
    }

    #[test]
    fn g2n_check() {
        let r = check_g2n(3, &[Poly::constant(Complex64::ONE)], 3, 42, &CheckOptions::default()).unwrap();
        assert!(r.passed(), "{:?}", r.samples.first());
    }

    #[test]
    fn sphere_check() {
        let r = check_sphere_embedding(2, 4, 42, &CheckOptions::default()).unwrap();
        assert!(r.passed(), "{:?}", r.samples.first());
        let r = check_sphere_embedding(3, 3, 42, &CheckOptions::default()).unwrap();
        assert!(r.passed(), "{:?}", r.samples.first());
    }
}
