//! Induced metric, Gaussian curvature, the conserved current of the model
//! and the embedding of the surface into su(N).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grassmann::Supernumber;
use crate::jet::Var;
use crate::superfield::{inner, norm2, p_plus, p_plus_k, SuperMatrix, SuperVector};

/// Gaussian curvature of the induced metric, kept as a full supernumber so
/// the nilpotent sector can be inspected separately from the body.
#[derive(Clone, Debug)]
pub struct Curvature {
    pub value: Supernumber,
    /// Value of the body jet at the base point.
    pub body: Complex64,
    /// Largest nilpotent coefficient value at the base point.
    pub soul_max: f64,
}

impl Curvature {
    fn new(value: Supernumber) -> Self {
        let body = value.body().value();
        let soul_max = value.soul_value_max();
        Curvature {
            value,
            body,
            soul_max,
        }
    }
}

/// Predicted curvature of the k-th tower member over the Veronese curve.
pub fn expected_curvature(n: usize, k: usize) -> f64 {
    4.0 / ((n - 1) as f64 + 2.0 * (k * (n - 1 - k)) as f64)
}

fn projected_pairing(
    z: &SuperVector,
    da: &SuperVector,
    db: &SuperVector,
    n2inv: &Supernumber,
) -> Result<Supernumber> {
    // d_a z^dag (1 - P) d_b z written with inner products only
    let direct = inner(da, db)?;
    let through = inner(da, z)?.mul(n2inv)?.mul(&inner(z, db)?)?;
    direct.sub(&through)
}

/// Mixed metric component `(2|z|^2)^{-1} (d+ z^dag (1-P) d- z + c.c.)`.
///
/// Here `d+ z^dag` differentiates the conjugated entries, so as a bra it is
/// `(d- z)^dag`; the pairings below are written in that form.
pub fn metric_pm(z: &SuperVector) -> Result<Supernumber> {
    let dp = z.x_partial_sq(Var::Plus)?;
    let dm = z.x_partial_sq(Var::Minus)?;
    let zt = z.truncated(dp.orders())?;
    let n2inv = norm2(&zt)?.inv()?;
    let a = projected_pairing(&zt, &dm, &dm, &n2inv)?;
    let b = projected_pairing(&zt, &dp, &dp, &n2inv)?;
    Ok(a.add(&b)?.mul(&n2inv)?.scale(Complex64::new(0.5, 0.0)))
}

/// Holomorphic metric component `-|z|^{-2} d+ z^dag (1-P) d+ z`; it vanishes
/// on the surfaces built from holomorphic data.
pub fn metric_pp(z: &SuperVector) -> Result<Supernumber> {
    let dp = z.x_partial_sq(Var::Plus)?;
    let dm = z.x_partial_sq(Var::Minus)?;
    let zt = z.truncated(dp.orders())?;
    let n2inv = norm2(&zt)?.inv()?;
    projected_pairing(&zt, &dm, &dp, &n2inv)?
        .mul(&n2inv)
        .map(|s| s.neg())
}

/// Gaussian curvature `K = -(1/g) d+ d- ln g` of a conformal metric factor.
pub fn curvature_from_metric(g: &Supernumber) -> Result<Curvature> {
    if !g.is_even() {
        return Err(Error::Parity("metric factor must be even".into()));
    }
    let lap = g.ln()?.x_partial(Var::Plus)?.x_partial(Var::Minus)?;
    let q = lap.orders().0.min(lap.orders().1);
    let lap = lap.truncated((q, q))?;
    let ginv = g.truncated((q, q))?.inv()?;
    Ok(Curvature::new(lap.mul(&ginv)?.neg()))
}

/// Curvature of the surface spanned by the k-th tower member of `w`.
pub fn curvature(w: &SuperVector, k: usize) -> Result<Curvature> {
    let z = p_plus_k(w, k)?;
    curvature_from_metric(&metric_pm(&z)?)
}

/// Closed curvature form for a holomorphic supervector:
/// `K = 4 - 2 |w|^2 |P+^2 w|^2 / |P+ w|^4`.
pub fn curvature_holomorphic(w: &SuperVector) -> Result<Curvature> {
    let p1 = p_plus(w)?;
    let p2 = p_plus(&p1)?;
    let orders = p2.orders();
    let n0 = norm2(&w.truncated(orders)?)?;
    let n1 = norm2(&p1.truncated(orders)?)?;
    let n2 = norm2(&p2)?;
    let ratio = n0
        .mul(&n2)?
        .mul(&n1.mul(&n1)?.inv()?)?
        .scale(Complex64::new(2.0, 0.0));
    let four = Supernumber::constant(
        w.algebra().clone(),
        Complex64::new(4.0, 0.0),
        ratio.shape(),
    );
    Ok(Curvature::new(four.sub(&ratio)?))
}

/// Residual of the Euler-Lagrange equation `[D+ D- P, P]` for a projector.
pub fn el_residual(p: &SuperMatrix) -> Result<SuperMatrix> {
    let ddp = p.super_partial(Var::Minus)?.super_partial(Var::Plus)?;
    let pt = p.truncated(ddp.orders())?;
    ddp.matmul(&pt)?.sub(&pt.matmul(&ddp)?)
}

/// Conserved current `L = [d- P, P] - 2i (D- P)^2`.
pub fn current(p: &SuperMatrix) -> Result<SuperMatrix> {
    let dp = p.x_partial_sq(Var::Minus)?;
    let pt = p.truncated(dp.orders())?;
    let comm = dp.matmul(&pt)?.sub(&pt.matmul(&dp)?)?;
    let sd = p.super_partial(Var::Minus)?;
    let sq = sd.matmul(&sd)?.scale(Complex64::new(0.0, 2.0));
    comm.sub(&sq)
}

/// Residual of the conservation law `d+ L - d- L^dag`.
pub fn conservation_residual(p: &SuperMatrix) -> Result<SuperMatrix> {
    let l = current(p)?;
    l.x_partial_sq(Var::Plus)?
        .sub(&l.dagger()?.x_partial_sq(Var::Minus)?)
}

/// Traceless surface field `X = P - I/N`.
pub fn surface_x(p: &SuperMatrix) -> Result<SuperMatrix> {
    let n = p.dim();
    let id = SuperMatrix::identity(p.algebra().clone(), n, p.shape());
    p.sub(&id.scale(Complex64::new(1.0 / n as f64, 0.0)))
}

/// Body values of every entry at the base point.
pub fn body_matrix(m: &SuperMatrix) -> DMatrix<Complex64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m.entry(i, j).body().value())
}

/// Orthonormal su(N) basis under the pairing `(A, B) = Tr(AB)/2`:
/// diagonal generators first, then the real and imaginary off-diagonal
/// pairs in row-major order.
pub fn su_basis(n: usize) -> Vec<DMatrix<Complex64>> {
    let mut basis = Vec::with_capacity(n * n - 1);
    for i in 1..n {
        let c = (2.0 / (i as f64 * (i + 1) as f64)).sqrt();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..i {
            m[(j, j)] = Complex64::new(c, 0.0);
        }
        m[(i, i)] = Complex64::new(-(i as f64) * c, 0.0);
        basis.push(m);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut re = DMatrix::zeros(n, n);
            re[(i, j)] = Complex64::ONE;
            re[(j, i)] = Complex64::ONE;
            basis.push(re);
            let mut im = DMatrix::zeros(n, n);
            im[(i, j)] = -Complex64::I;
            im[(j, i)] = Complex64::I;
            basis.push(im);
        }
    }
    basis
}

/// Coordinates of a Hermitian traceless matrix in the su(N) basis,
/// `c_a = Re Tr(X K_a) / 2`, together with the largest imaginary residue
/// (nonzero only if the input fails to be Hermitian).
pub fn embed(x: &DMatrix<Complex64>, basis: &[DMatrix<Complex64>]) -> (Vec<f64>, f64) {
    let mut coords = Vec::with_capacity(basis.len());
    let mut imag_max = 0.0f64;
    for k in basis {
        let t = (x * k).trace() * 0.5;
        coords.push(t.re);
        imag_max = imag_max.max(t.im.abs());
    }
    (coords, imag_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::AlgebraConfig;
    use crate::superfield::{projector, projector_k, veronese, CurveSpec, OddPoly, Poly};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gsv3(p: Complex64, orders: usize) -> SuperVector {
        let alg = AlgebraConfig::with_epsilons(1).unwrap();
        CurveSpec::gsv(
            3,
            OddPoly {
                gen: AlgebraConfig::epsilon(1),
                poly: Poly(vec![c(0.3, -0.2), c(0.1, 0.4)]),
            },
        )
        .build(&alg, p, (orders, orders))
        .unwrap()
    }

    #[test]
    fn veronese_curvatures() {
        let alg = AlgebraConfig::thetas();
        let p = c(0.7, -0.4);
        let w = veronese(&alg, 3, p, (7, 7)).unwrap();
        let k0 = curvature(&w, 0).unwrap();
        assert!((k0.body - c(2.0, 0.0)).norm() < 1e-10);
        assert!(k0.soul_max < 1e-12);
        let k1 = curvature(&w, 1).unwrap();
        assert!((k1.body - c(1.0, 0.0)).norm() < 1e-9);

        let w2 = veronese(&alg, 2, p, (5, 5)).unwrap();
        let k = curvature(&w2, 0).unwrap();
        assert!((k.body - c(4.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn expected_curvature_table() {
        assert_eq!(expected_curvature(2, 0), 4.0);
        assert_eq!(expected_curvature(3, 0), 2.0);
        assert_eq!(expected_curvature(3, 1), 1.0);
        assert_eq!(expected_curvature(3, 2), 2.0);
        assert!((expected_curvature(5, 2) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn holomorphic_curvature_form_agrees() {
        let w = gsv3(c(0.5, 0.6), 7);
        let a = curvature(&w, 0).unwrap();
        let b = curvature_holomorphic(&w).unwrap();
        assert!(a.value.max_abs_diff(&b.value) < 1e-8);
    }

    #[test]
    fn metric_pp_vanishes_on_holomorphic_curves() {
        let w = gsv3(c(0.9, -0.3), 6);
        assert!(metric_pp(&w).unwrap().value_max() < 1e-12);
    }

    #[test]
    fn el_residual_vanishes_on_gsv() {
        let w = gsv3(c(0.4, 0.8), 7);
        let p = projector(&w).unwrap();
        assert!(el_residual(&p).unwrap().value_max() < 1e-9);
    }

    #[test]
    fn conservation_on_tower() {
        let w = gsv3(c(0.6, -0.5), 8);
        for k in 0..3 {
            let p = projector_k(&w, k).unwrap();
            let r = conservation_residual(&p).unwrap();
            assert!(r.value_max() < 1e-8, "current not conserved at k={k}");
        }
    }

    #[test]
    fn bosonic_current_is_minus_dminus_p() {
        let alg = AlgebraConfig::thetas();
        let w = veronese(&alg, 2, c(0.8, 0.1), (5, 5)).unwrap();
        let p = projector(&w).unwrap();
        let l = current(&p).unwrap();
        let dp = p.x_partial_sq(Var::Minus).unwrap();
        assert!(l.add(&dp).unwrap().value_max() < 1e-10);
    }

    #[test]
    fn surface_field_is_traceless_hermitian() {
        let w = gsv3(c(0.3, 0.7), 6);
        let x = surface_x(&projector(&w).unwrap()).unwrap();
        assert!(x.trace().unwrap().coeff_max() < 1e-11);
        assert!(x.dagger().unwrap().sub(&x).unwrap().coeff_max() < 1e-11);
    }

    #[test]
    fn su_basis_orthonormal() {
        for n in 2..=5 {
            let basis = su_basis(n);
            assert_eq!(basis.len(), n * n - 1);
            for (a, ka) in basis.iter().enumerate() {
                assert!(ka.trace().norm() < 1e-14);
                assert!((ka.adjoint() - ka).norm() < 1e-14);
                for (b, kb) in basis.iter().enumerate() {
                    let ip = ((ka * kb).trace() * 0.5).re;
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((ip - expect).abs() < 1e-13, "n={n} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn cp1_embedding_radius() {
        let alg = AlgebraConfig::thetas();
        let w = veronese(&alg, 2, c(0.4, -0.9), (4, 4)).unwrap();
        let x = surface_x(&projector(&w).unwrap()).unwrap();
        let (coords, imag) = embed(&body_matrix(&x), &su_basis(2));
        assert!(imag < 1e-13);
        let r2: f64 = coords.iter().map(|v| v * v).sum();
        assert!((r2 - 0.25).abs() < 1e-12);
    }
}
