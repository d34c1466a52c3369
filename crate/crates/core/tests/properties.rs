//! Property tests for the jet ring and the Grassmann algebra layer.

use num_complex::Complex64;
use proptest::prelude::*;

use supercurv_core::grassmann::{AlgebraConfig, JetShape, Supernumber};
use supercurv_core::jet::{Jet2, Var};

const ORDERS: (usize, usize) = (3, 3);
const TOL: f64 = 1e-7;

fn complex() -> impl Strategy<Value = Complex64> {
    (-0.25f64..0.25, -0.25f64..0.25).prop_map(|(re, im)| Complex64::new(re, im))
}

fn base_point() -> impl Strategy<Value = Complex64> {
    (0.3f64..1.2, -3.0f64..3.0).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

/// Jet of a degree-(2,2) polynomial in (x+, x-) with the given coefficients.
fn poly_jet(coeffs: &[Complex64; 9], base: Complex64) -> Jet2 {
    let xp = Jet2::variable(Var::Plus, base, ORDERS).unwrap();
    let xm = Jet2::variable(Var::Minus, base, ORDERS).unwrap();
    let mut acc = Jet2::zero(base, ORDERS);
    let mut idx = 0;
    for i in 0..3 {
        for j in 0..3 {
            let mut term = Jet2::constant(coeffs[idx], base, ORDERS);
            for _ in 0..i {
                term = term.mul(&xp).unwrap();
            }
            for _ in 0..j {
                term = term.mul(&xm).unwrap();
            }
            acc = acc.add(&term).unwrap();
            idx += 1;
        }
    }
    acc
}

fn jet_inputs() -> impl Strategy<Value = (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>, Complex64)>
{
    (
        prop::collection::vec(complex(), 9),
        prop::collection::vec(complex(), 9),
        prop::collection::vec(complex(), 9),
        base_point(),
    )
}

fn arr(v: &[Complex64]) -> [Complex64; 9] {
    v.try_into().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_ring_axioms((ca, cb, cc, base) in jet_inputs()) {
        let a = poly_jet(&arr(&ca), base);
        let b = poly_jet(&arr(&cb), base);
        let c = poly_jet(&arr(&cc), base);

        let comm = a.mul(&b).unwrap().max_abs_diff(&b.mul(&a).unwrap());
        prop_assert!(comm < TOL, "commutativity: {comm}");

        let assoc = a.mul(&b).unwrap().mul(&c).unwrap()
            .max_abs_diff(&a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert!(assoc < TOL, "associativity: {assoc}");

        let distr = a.mul(&b.add(&c).unwrap()).unwrap()
            .max_abs_diff(&a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert!(distr < TOL, "distributivity: {distr}");
    }

    #[test]
    fn jet_inverse_and_log_exp((ca, _, _, base) in jet_inputs()) {
        let mut a = poly_jet(&arr(&ca), base);
        // push the body away from zero so inv and ln are defined, and pin its
        // imaginary part so ln(exp(a)) stays on the principal branch
        a = a.add(&Jet2::constant(Complex64::new(6.0, 0.0), base, ORDERS)).unwrap();
        a = a.sub(&Jet2::constant(Complex64::new(0.0, a.value().im), base, ORDERS)).unwrap();

        let one = Jet2::one(base, ORDERS);
        let inv_err = a.mul(&a.inv().unwrap()).unwrap().max_abs_diff(&one);
        prop_assert!(inv_err < TOL, "a * a^-1 = 1: {inv_err}");

        let log_exp = a.exp().ln().unwrap().max_abs_diff(&a);
        prop_assert!(log_exp < TOL, "ln(exp(a)) = a: {log_exp}");

        let exp_log = a.ln().unwrap().exp().max_abs_diff(&a);
        prop_assert!(exp_log < TOL, "exp(ln(a)) = a: {exp_log}");
    }

    #[test]
    fn jet_dagger_is_an_antiautomorphism((ca, cb, _, base) in jet_inputs()) {
        let a = poly_jet(&arr(&ca), base);
        let b = poly_jet(&arr(&cb), base);
        let lhs = a.mul(&b).unwrap().dagger().unwrap();
        let rhs = a.dagger().unwrap().mul(&b.dagger().unwrap()).unwrap();
        let err = lhs.max_abs_diff(&rhs);
        prop_assert!(err < TOL, "(ab)^dag = a^dag b^dag: {err}");

        let invol = a.dagger().unwrap().dagger().unwrap().max_abs_diff(&a);
        prop_assert!(invol < TOL, "dagger involution: {invol}");
    }

    #[test]
    fn graded_commutativity(
        (ca, cb, _, base) in jet_inputs(),
        ma in 0u8..16,
        mb in 0u8..16,
    ) {
        let algebra = AlgebraConfig::with_epsilons(1).unwrap();
        let a = Supernumber::monomial(algebra.clone(), ma, poly_jet(&arr(&ca), base));
        let b = Supernumber::monomial(algebra.clone(), mb, poly_jet(&arr(&cb), base));
        let sign = if ma.count_ones() % 2 == 1 && mb.count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        let lhs = a.mul(&b).unwrap();
        let rhs = b.mul(&a).unwrap().scale(Complex64::new(sign, 0.0));
        let err = lhs.max_abs_diff(&rhs);
        prop_assert!(err < TOL, "ab = (-1)^|a||b| ba: {err}");
    }

    #[test]
    fn supernumber_dagger_reverses_products(
        (ca, cb, _, base) in jet_inputs(),
        ma in 0u8..16,
        mb in 0u8..16,
    ) {
        let algebra = AlgebraConfig::with_epsilons(1).unwrap();
        let a = Supernumber::monomial(algebra.clone(), ma, poly_jet(&arr(&ca), base));
        let b = Supernumber::monomial(algebra.clone(), mb, poly_jet(&arr(&cb), base));
        let lhs = a.mul(&b).unwrap().dagger().unwrap();
        let rhs = b.dagger().unwrap().mul(&a.dagger().unwrap()).unwrap();
        let err = lhs.max_abs_diff(&rhs);
        prop_assert!(err < TOL, "(ab)^dag = b^dag a^dag: {err}");

        let invol = a.dagger().unwrap().dagger().unwrap().max_abs_diff(&a);
        prop_assert!(invol < TOL, "dagger involution: {invol}");
    }

    #[test]
    fn theta_derivative_is_a_graded_derivation(
        (ca, cb, _, base) in jet_inputs(),
        ma in 0u8..16,
        mb in 0u8..16,
        gen in 0usize..4,
    ) {
        let algebra = AlgebraConfig::with_epsilons(1).unwrap();
        let a = Supernumber::monomial(algebra.clone(), ma, poly_jet(&arr(&ca), base));
        let b = Supernumber::monomial(algebra.clone(), mb, poly_jet(&arr(&cb), base));
        let sign = if ma.count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        let lhs = a.mul(&b).unwrap().theta_derivative(gen);
        let rhs = a
            .theta_derivative(gen)
            .mul(&b)
            .unwrap()
            .add(&a.mul(&b.theta_derivative(gen)).unwrap().scale(Complex64::new(sign, 0.0)))
            .unwrap();
        let err = lhs.max_abs_diff(&rhs);
        prop_assert!(err < TOL, "graded Leibniz rule: {err}");
    }

    #[test]
    fn even_supernumber_inverse((ca, cb, _, base) in jet_inputs()) {
        let algebra = AlgebraConfig::with_epsilons(1).unwrap();
        let shape = JetShape::new(base, ORDERS);
        let body = poly_jet(&arr(&ca), base)
            .add(&Jet2::constant(Complex64::new(6.0, 0.0), base, ORDERS))
            .unwrap();
        // even element: invertible body plus a theta+ theta- soul
        let s = Supernumber::from_jet(algebra.clone(), body)
            .add(&Supernumber::monomial(algebra.clone(), 0b11, poly_jet(&arr(&cb), base)))
            .unwrap();
        let one = Supernumber::constant(algebra, Complex64::ONE, shape);
        let err = s.mul(&s.inv().unwrap()).unwrap().max_abs_diff(&one);
        prop_assert!(err < TOL, "s * s^-1 = 1: {err}");
    }
}
