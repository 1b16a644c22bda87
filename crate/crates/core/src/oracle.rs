//! Independent brute-force verification of candidate orderings.
//!
//! Test functions are nonnegative combinations of truncated-power splines
//! `(x - t)_+^n` plus a polynomial part of degree <= n; all of them are
//! n-convex, and the splines generate the whole class. Expectations are
//! computed straight from the measures' moments, never through the H-cascade,
//! so the oracle catches bugs correlated across the cascade routes. It
//! falsifies or corroborates; only the exact engines certify.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::measure::SignedMeasure;
use crate::ordering::Witness;
use crate::par;

/// Knots per sampled test function.
pub const DEFAULT_KNOTS: usize = 8;

/// An n-convex test function
/// `f(x) = sum_j w_j (x - t_j)_+^n + sum_{k<=n} c_k x^k` with `w_j >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    order: u32,
    knots: Vec<f64>,
    spline_weights: Vec<f64>,
    poly_coeffs: Vec<f64>,
}

/// Which generating family a test function belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestFunctionKind {
    Spline,
    Polynomial,
    Mixture,
}

impl TestFunction {
    pub fn new(order: u32, knots: Vec<f64>, spline_weights: Vec<f64>, poly_coeffs: Vec<f64>) -> Self {
        assert_eq!(knots.len(), spline_weights.len());
        assert!(spline_weights.iter().all(|&w| w >= 0.0), "spline weights must be nonnegative");
        assert!(poly_coeffs.len() <= order as usize + 1, "polynomial part must have degree <= n");
        TestFunction { order, knots, spline_weights, poly_coeffs }
    }

    /// Single spline `(x - knot)_+^n`.
    pub fn spline(order: u32, knot: f64) -> Self {
        TestFunction::new(order, vec![knot], vec![1.0], vec![])
    }

    /// `sign * x^degree` (degree <= n, so n-convex for either sign).
    pub fn monomial(order: u32, degree: u32, sign: f64) -> Self {
        assert!(degree <= order);
        let mut coeffs = vec![0.0; degree as usize + 1];
        coeffs[degree as usize] = sign;
        TestFunction::new(order, vec![], vec![], coeffs)
    }

    /// The concrete function named by a `NotOrdered` witness.
    pub fn from_witness(witness: &Witness, order: u32) -> Self {
        match *witness {
            Witness::Monomial { degree, sign } => TestFunction::monomial(order, degree, sign),
            Witness::SplineKnot { knot } => TestFunction::spline(order, knot),
        }
    }

    pub fn kind(&self) -> TestFunctionKind {
        match (self.knots.is_empty(), self.poly_coeffs.is_empty()) {
            (false, true) => TestFunctionKind::Spline,
            (true, _) => TestFunctionKind::Polynomial,
            (false, false) => TestFunctionKind::Mixture,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (t, w) in self.knots.iter().zip(&self.spline_weights) {
            let d = x - t;
            if d > 0.0 {
                acc += w * d.powi(self.order as i32);
            }
        }
        let mut pow = 1.0;
        for &c in &self.poly_coeffs {
            acc += c * pow;
            pow *= x;
        }
        acc
    }

    /// Random mixture: knots uniform in the support, weights |N(0,1)|,
    /// polynomial coefficients N(0,1).
    pub fn sample<R: Rng>(rng: &mut R, support: (f64, f64), order: u32, knot_count: usize) -> Self {
        let (a, b) = support;
        let knots: Vec<f64> = (0..knot_count).map(|_| rng.random_range(a..b)).collect();
        let spline_weights: Vec<f64> = (0..knot_count)
            .map(|_| {
                let g: f64 = StandardNormal.sample(rng);
                g.abs()
            })
            .collect();
        let poly_coeffs: Vec<f64> = (0..=order as usize)
            .map(|_| StandardNormal.sample(rng))
            .collect();
        TestFunction { order, knots, spline_weights, poly_coeffs }
    }
}

/// `int f dmu` via the measure's truncated and plain moments; exact up to
/// floating arithmetic and linear in both arguments.
pub fn expectation(f: &TestFunction, mu: &SignedMeasure) -> f64 {
    let mut acc = 0.0;
    for (t, w) in f.knots.iter().zip(&f.spline_weights) {
        acc += w * mu.truncated_moment(*t, f.order);
    }
    for (k, &c) in f.poly_coeffs.iter().enumerate() {
        if c != 0.0 {
            acc += c * mu.moment(k as u32);
        }
    }
    acc
}

/// Expectation gap `int f dmu1 - int f dmu2`; positive means `f` violates
/// the ordering of `mu1` below `mu2`.
pub fn expectation_gap(f: &TestFunction, mu1: &SignedMeasure, mu2: &SignedMeasure) -> f64 {
    expectation(f, mu1) - expectation(f, mu2)
}

/// Direct check of the moment equalities (orders 0..n) and the pointwise
/// truncated-moment dominance on a uniform grid. An implementation path
/// independent of the H-cascade.
pub fn grid_condition_check(
    mu1: &SignedMeasure,
    mu2: &SignedMeasure,
    n: u32,
    grid_size: usize,
    tol: f64,
) -> Result<bool> {
    assert!(grid_size >= 101, "grid_size must be at least 101");
    let (a, b) = mu1.support();
    for k in 0..=n {
        let m1 = mu1.moment(k);
        let m2 = mu2.moment(k);
        let scale = m1.abs().max(m2.abs()).max(1.0);
        if (m1 - m2).abs() > tol * scale {
            return Ok(false);
        }
    }
    let xs: Vec<f64> = (0..grid_size)
        .map(|i| a + (b - a) * i as f64 / (grid_size - 1) as f64)
        .collect();
    let failures = par::count_slice(&xs, |&x| {
        let t1 = mu1.truncated_moment(x, n);
        let t2 = mu2.truncated_moment(x, n);
        let scale = t1.abs().max(t2.abs()).max(1.0);
        t1 > t2 + tol * scale
    });
    Ok(failures == 0)
}

/// Samples n-convex test functions and counts how many violate
/// `E f(mu1) <= E f(mu2)` beyond tolerance. The whole sample sequence is
/// generated up front from the seed, so the count is identical across
/// thread counts and to [`random_nconvex_suite_seq`].
pub fn random_nconvex_suite(
    mu1: &SignedMeasure,
    mu2: &SignedMeasure,
    n: u32,
    trials: u32,
    seed: u64,
    tol: f64,
) -> Result<u32> {
    let fns = sample_suite(mu1.support(), n, trials, seed);
    Ok(par::count_slice(&fns, |f| violates(f, mu1, mu2, tol)) as u32)
}

/// Sequential reference for [`random_nconvex_suite`].
pub fn random_nconvex_suite_seq(
    mu1: &SignedMeasure,
    mu2: &SignedMeasure,
    n: u32,
    trials: u32,
    seed: u64,
    tol: f64,
) -> Result<u32> {
    let fns = sample_suite(mu1.support(), n, trials, seed);
    Ok(fns.iter().filter(|f| violates(f, mu1, mu2, tol)).count() as u32)
}

fn sample_suite(support: (f64, f64), n: u32, trials: u32, seed: u64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| TestFunction::sample(&mut rng, support, n, DEFAULT_KNOTS))
        .collect()
}

fn violates(f: &TestFunction, mu1: &SignedMeasure, mu2: &SignedMeasure, tol: f64) -> bool {
    let e1 = expectation(f, mu1);
    let e2 = expectation(f, mu2);
    let scale = e1.abs().max(e2.abs()).max(1.0);
    e1 > e2 + tol * scale
}

/// True when the witness function genuinely violates the ordering of `mu1`
/// below `mu2` by more than the tolerance.
pub fn confirms_violation(
    witness: &Witness,
    mu1: &SignedMeasure,
    mu2: &SignedMeasure,
    n: u32,
    tol: f64,
) -> bool {
    let f = TestFunction::from_witness(witness, n);
    let e1 = expectation(&f, mu1);
    let e2 = expectation(&f, mu2);
    let scale = e1.abs().max(e2.abs()).max(1.0);
    e1 - e2 > tol * scale
}
