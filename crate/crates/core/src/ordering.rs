//! Decision engines for (n+1)-convex stochastic ordering.
//!
//! For measures `mu1`, `mu2` on `[a, b]` with distribution functions `F_1`,
//! `F_2`, build the cascade
//!
//! ```text
//! H_0 = F_2 - F_1,        H_k(x) = int_a^x H_{k-1}(t) dt    (k = 1..n)
//! ```
//!
//! The ordering `int f dmu1 <= int f dmu2` for every continuous n-convex `f`
//! holds exactly when `H_k(b) = 0` for `k = 0..n` and `(-1)^{n+1} H_n >= 0`
//! on `(a, b)`. Two routes produce `H_n`: iterated antiderivatives of `H_0`,
//! and the truncated-power representation
//! `H_n(x) = (-1)^{n+1} int (t-x)_+^n / n! d(F_2 - F_1)`; when moments up to
//! order n disagree the routes differ by an explicit moment polynomial (see
//! [`route_defect`]).
//!
//! [`global_check`] decides through the global minimum of `(-1)^{n+1} H_n`.
//! [`crossing_decision`] decides through the sign-change catalogue of
//! `H_{n-1}`: an even crossing count refutes the ordering, an odd count
//! reduces it to finitely many checkpoint evaluations of `H_n` at the
//! even-indexed crossings. Classical order-1 criteria (single crossing,
//! endpoint/integral conditions, and the alternating-area test) are exposed
//! as their own entry points.

use std::fmt;

use crate::error::{Error, Result};
use crate::jsonfmt;
use crate::measure::SignedMeasure;
use crate::par;
use crate::piecewise::{PiecewisePolynomial, SignChangeCatalogue};

/// Highest supported cascade order.
pub const MAX_ORDER: u32 = 8;

/// A concrete n-convex function certifying that an ordering fails.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Witness {
    /// `f(t) = sign * t^degree` (a polynomial of degree <= n is both n-convex
    /// and n-concave, so either sign is admissible).
    Monomial { degree: u32, sign: f64 },
    /// `f(t) = (t - knot)_+^n`.
    SplineKnot { knot: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InconclusiveReason {
    /// The single-crossing criterion saw more than one crossing; an exact
    /// engine must decide instead.
    MultipleCrossings,
    /// Endpoint/moment preconditions of the crossing procedure fail.
    MomentMismatch,
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrderingVerdict {
    Holds,
    HoldsReversed,
    NotOrdered(Witness),
    Inconclusive(InconclusiveReason),
}

impl OrderingVerdict {
    pub fn holds_forward(&self) -> bool {
        matches!(self, OrderingVerdict::Holds)
    }

    pub fn json_name(&self) -> &'static str {
        match self {
            OrderingVerdict::Holds => "holds",
            OrderingVerdict::HoldsReversed => "holds_reversed",
            OrderingVerdict::NotOrdered(_) => "not_ordered",
            OrderingVerdict::Inconclusive(_) => "inconclusive",
        }
    }
}

/// `(-1)^{n+1} H_n` evaluated at an even-indexed crossing of `H_{n-1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Checkpoint {
    pub x: f64,
    pub value: f64,
}

/// Verdict plus the diagnostics every engine reports.
#[derive(Clone, Debug)]
pub struct Decision {
    pub order: u32,
    pub verdict: OrderingVerdict,
    /// Sign-change points of `H_{n-1}`.
    pub crossings: Vec<f64>,
    pub checkpoints: Vec<Checkpoint>,
    /// `|H_k(b)|` for `k = 0..n`.
    pub endpoint_residuals: Vec<f64>,
}

impl Decision {
    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Deterministic JSON report; reals carry 17 significant digits.
    pub fn to_json(&self) -> String {
        let checkpoints: Vec<String> = self
            .checkpoints
            .iter()
            .map(|c| {
                format!(
                    "{{\"x\":{},\"value\":{}}}",
                    jsonfmt::float17(c.x),
                    jsonfmt::float17(c.value)
                )
            })
            .collect();
        let witness = match &self.verdict {
            OrderingVerdict::NotOrdered(Witness::Monomial { degree, sign }) => format!(
                "{{\"kind\":\"monomial\",\"param\":{},\"sign\":{}}}",
                degree,
                jsonfmt::float17(*sign)
            ),
            OrderingVerdict::NotOrdered(Witness::SplineKnot { knot }) => {
                format!("{{\"kind\":\"spline\",\"param\":{}}}", jsonfmt::float17(*knot))
            }
            _ => "null".to_string(),
        };
        let reason = match &self.verdict {
            OrderingVerdict::Inconclusive(InconclusiveReason::MultipleCrossings) => {
                ",\"reason\":\"multiple_crossings\"".to_string()
            }
            OrderingVerdict::Inconclusive(InconclusiveReason::MomentMismatch) => {
                ",\"reason\":\"moment_mismatch\"".to_string()
            }
            _ => String::new(),
        };
        format!(
            "{{\"order_n\":{},\"verdict\":\"{}\",\"crossings\":{},\"m\":{},\"checkpoints\":[{}],\"endpoint_residuals\":{},\"witness\":{}{}}}",
            self.order,
            self.verdict.json_name(),
            jsonfmt::float_array(&self.crossings),
            self.crossings.len(),
            checkpoints.join(","),
            jsonfmt::float_array(&self.endpoint_residuals),
            witness,
            reason,
        )
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "order:     {}", self.order)?;
        writeln!(f, "verdict:   {}", self.verdict.json_name())?;
        write!(f, "crossings: m = {}", self.crossings.len())?;
        if !self.crossings.is_empty() {
            write!(f, " at {:?}", self.crossings)?;
        }
        writeln!(f)?;
        for c in &self.checkpoints {
            writeln!(f, "checkpoint: x = {:+.6e}  value = {:+.6e}", c.x, c.value)?;
        }
        writeln!(f, "endpoint residuals: {:?}", self.endpoint_residuals)?;
        match &self.verdict {
            OrderingVerdict::NotOrdered(Witness::Monomial { degree, sign }) => {
                writeln!(f, "witness:   f(t) = {:+} * t^{}", sign, degree)
            }
            OrderingVerdict::NotOrdered(Witness::SplineKnot { knot }) => {
                writeln!(f, "witness:   f(t) = (t - {:+.6e})_+^{}", knot, self.order)
            }
            OrderingVerdict::Inconclusive(r) => writeln!(f, "reason:    {:?}", r),
            _ => writeln!(f, "witness:   none"),
        }
    }
}

/// The full cascade `H_0..H_n` with its diagnostics.
#[derive(Clone, Debug)]
pub struct HProfile {
    pub n: u32,
    /// `h[k]` is `H_k`; `h[0]` carries the jumps of the cdf difference.
    pub h: Vec<PiecewisePolynomial>,
    pub endpoint_residuals: Vec<f64>,
    /// `moment(mu2, k) - moment(mu1, k)` for `k = 0..n`.
    pub moment_gaps: Vec<f64>,
    /// Sign changes of `H_{n-1}`.
    pub catalogue: SignChangeCatalogue,
    /// `(-1)^{n+1} H_n` at the even-indexed crossings `x_2, x_4, ...`.
    pub checkpoints: Vec<Checkpoint>,
    support: (f64, f64),
    /// Per-k magnitude floor derived from the measures' total variation;
    /// guards endpoint checks when the whole cascade is noise-level.
    tv_scale: Vec<f64>,
}

impl HProfile {
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// `(-1)^{n+1}` as a float.
    pub fn orientation(&self) -> f64 {
        if self.n % 2 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    fn endpoint_scale(&self, k: usize) -> f64 {
        self.h[k].sup_estimate().max(self.tv_scale[k])
    }
}

fn check_compatible(mu1: &SignedMeasure, mu2: &SignedMeasure) -> Result<(f64, f64)> {
    let (a1, b1) = mu1.support();
    let (a2, b2) = mu2.support();
    let span = (b1 - a1).max(b2 - a2);
    if (a1 - a2).abs() > 1e-9 * span || (b1 - b2).abs() > 1e-9 * span {
        return Err(Error::SupportMismatch(a1, b1, a2, b2));
    }
    Ok((a1, b1))
}

fn check_order(n: u32) -> Result<()> {
    if !(1..=MAX_ORDER).contains(&n) {
        return Err(Error::OrderOverflow(n));
    }
    Ok(())
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// `H_n` by the truncated-power route:
/// `H_n(x) = (-1)^{n+1} int (t-x)_+^n / n! d(F_2 - F_1)`, assembled exactly
/// as a piecewise polynomial with breakpoints at every atom and density
/// boundary of either measure. For purely atomic measures this is
/// `(-1)^{n+1} sum_i w_i (t_i - x)_+^n / n!` with the signed weights of
/// `mu2 - mu1`.
pub fn h_function(
    mu1: &SignedMeasure,
    mu2: &SignedMeasure,
    n: u32,
) -> Result<PiecewisePolynomial> {
    let (a, b) = check_compatible(mu1, mu2)?;
    check_order(n)?;
    let span = b - a;
    let snap = 1e-13 * span;

    let mut atoms: Vec<(f64, f64)> = Vec::new();
    atoms.extend(mu2.atoms().iter().map(|at| (at.location, at.weight)));
    atoms.extend(mu1.atoms().iter().map(|at| (at.location, -at.weight)));
    let dens: Vec<(&crate::measure::DensityPiece, f64)> = mu2
        .density_pieces()
        .iter()
        .map(|p| (p, 1.0))
        .chain(mu1.density_pieces().iter().map(|p| (p, -1.0)))
        .collect();

    let mut grid = vec![a, b];
    grid.extend(atoms.iter().map(|&(t, _)| t));
    for (p, _) in &dens {
        grid.push(p.lo);
        grid.push(p.hi);
    }
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
    grid.dedup_by(|next, prev| (*next - *prev).abs() <= snap);
    let m = grid.len() - 1;
    grid[0] = a;
    grid[m] = b;

    let orientation = if n % 2 == 1 { 1.0 } else { -1.0 };
    let factor = orientation / factorial(n);

    let mut pieces = Vec::with_capacity(m);
    for i in 0..m {
        let lo = grid[i];
        let hi = grid[i + 1];
        let mut acc = crate::poly::Poly::zero();
        for &(t, w) in &atoms {
            if t > lo + snap {
                // w * ((t - lo) - u)^n in the local variable u = x - lo.
                let d = t - lo;
                let mut c = vec![0.0; n as usize + 1];
                for (k, ck) in c.iter_mut().enumerate() {
                    let k_u = k as u32;
                    let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
                    *ck = w * sgn * binomial(n, k_u) * d.powi((n - k_u) as i32);
                }
                acc = acc.add(&crate::poly::Poly::new(c));
            }
        }
        for &(p, sg) in &dens {
            if p.hi <= lo + snap {
                continue;
            }
            let q_local = crate::poly::Poly::new(p.coeffs.clone()).shifted(lo).scale(sg);
            let w_hi = p.hi - lo;
            if p.lo >= hi - snap {
                // Piece entirely to the right: expand (t - x)^n binomially
                // into plain moments about `lo`.
                let w_lo = p.lo - lo;
                let mut moments = vec![0.0; n as usize + 1];
                let mut running = q_local.clone();
                for mj in moments.iter_mut() {
                    // int_{w_lo}^{w_hi} q_local(u) u^j du via antiderivative
                    let ad = running.antiderivative();
                    *mj = ad.eval(w_hi) - ad.eval(w_lo);
                    running = running.mul(&crate::poly::Poly::new(vec![0.0, 1.0]));
                }
                let mut c = vec![0.0; n as usize + 1];
                for (k, ck) in c.iter_mut().enumerate() {
                    let k_u = k as u32;
                    let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
                    *ck = sgn * binomial(n, k_u) * moments[(n - k_u) as usize];
                }
                acc = acc.add(&crate::poly::Poly::new(c));
            } else {
                // Piece covering this interval: R_0(u) = int_u^{w_hi} q,
                // R_k(u) = k * int_u^{w_hi} R_{k-1}; then R_n is the exact
                // truncated-power contribution.
                let ad0 = q_local.antiderivative();
                let mut r = crate::poly::Poly::constant(ad0.eval(w_hi)).sub(&ad0);
                for k in 1..=n {
                    let ad = r.antiderivative();
                    r = crate::poly::Poly::constant(ad.eval(w_hi)).sub(&ad).scale(k as f64);
                }
                acc = acc.add(&r);
            }
        }
        pieces.push(acc.scale(factor));
    }
    let terminal = pieces[m - 1].eval(b - grid[m - 1]);
    PiecewisePolynomial::from_parts(grid, pieces, vec![false; m - 1], terminal)
}

/// Pointwise truncated-power route, straight from the measures' truncated
/// moments; shares no code with the piecewise assembly.
pub fn truncated_power_route(mu1: &SignedMeasure, mu2: &SignedMeasure, n: u32, x: f64) -> f64 {
    let orientation = if n % 2 == 1 { 1.0 } else { -1.0 };
    orientation * (mu2.truncated_moment(x, n) - mu1.truncated_moment(x, n)) / factorial(n)
}

/// Polynomial by which the iterated-integral route exceeds the
/// truncated-power route: `(1/n!) int (x - t)^n d(F_2 - F_1)(t)`. Identically
/// zero exactly when moments of order 0..n agree.
pub fn route_defect(mu1: &SignedMeasure, mu2: &SignedMeasure, n: u32) -> Result<PiecewisePolynomial> {
    let (a, b) = check_compatible(mu1, mu2)?;
    check_order(n)?;
    let mut global = vec![0.0; n as usize + 1];
    for k in 0..=n {
        let gap = mu2.moment(k) - mu1.moment(k);
        let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
        global[(n - k) as usize] = sgn * binomial(n, k) * gap / factorial(n);
    }
    PiecewisePolynomial::from_global_coeffs(a, b, &global)
}

/// Builds the full cascade by iterated antiderivatives of `H_0`, checks it
/// against the derivative route `H_{k-1} = H_k'`, and catalogues the sign
/// changes of `H_{n-1}` together with the checkpoint values of `H_n`.
pub fn h_sequence(
    mu1: &SignedMeasure,
    mu2: &SignedMeasure,
    n: u32,
    tol: f64,
) -> Result<HProfile> {
    let (a, b) = check_compatible(mu1, mu2)?;
    check_order(n)?;
    let span = b - a;

    let h0 = mu2.cdf().sub(&mu1.cdf())?;
    let mut h = vec![h0];
    for _ in 1..=n {
        let next = h.last().unwrap().antiderivative()?;
        h.push(next);
    }

    let mut endpoint_residuals = Vec::with_capacity(n as usize + 1);
    for hk in &h {
        endpoint_residuals.push(hk.evaluate(b)?.abs());
    }
    let moment_gaps: Vec<f64> = (0..=n).map(|k| mu2.moment(k) - mu1.moment(k)).collect();

    let tv = mu1.total_variation() + mu2.total_variation();
    let tv_scale: Vec<f64> = (0..=n)
        .map(|k| tv * span.powi(k as i32) / factorial(k))
        .collect();

    // Derivative-route reconciliation: differentiating H_k must reproduce
    // H_{k-1} at breakpoints and piece midpoints.
    for k in (1..=n as usize).rev() {
        let d = h[k].differentiate()?;
        let reference = &h[k - 1];
        let scale = reference.sup_estimate().max(tv_scale[k - 1]).max(1e-300);
        let bps = h[k].breakpoints().to_vec();
        let mut samples = Vec::with_capacity(2 * bps.len());
        for w in bps.windows(2) {
            samples.push(w[0]);
            samples.push(0.5 * (w[0] + w[1]));
        }
        for &x in &samples {
            let dv = d.evaluate(x)?;
            let rv = reference.evaluate(x)?;
            if (dv - rv).abs() > 1e-10 * scale {
                return Err(Error::CascadeInconsistent { x, iterated: rv, derivative: dv });
            }
        }
    }

    let catalogue = h[n as usize - 1].sign_changes(tol);
    let orientation = if n % 2 == 1 { 1.0 } else { -1.0 };
    let mut checkpoints = Vec::new();
    for (idx, &x) in catalogue.points.iter().enumerate() {
        if idx % 2 == 1 {
            // 1-based even index: x_2, x_4, ...
            checkpoints.push(Checkpoint { x, value: orientation * h[n as usize].evaluate(x)? });
        }
    }

    Ok(HProfile {
        n,
        h,
        endpoint_residuals,
        moment_gaps,
        catalogue,
        checkpoints,
        support: (a, b),
        tv_scale,
    })
}

/// Outcome of the endpoint conditions `H_k(b) = 0`, `k = 0..n`.
#[derive(Clone, Debug)]
pub struct EndpointReport {
    pub passed: bool,
    pub residuals: Vec<f64>,
    /// First violated order together with the moment gap
    /// `int x^k d(mu2 - mu1)`.
    pub first_violation: Option<(u32, f64)>,
}

/// Checks `|H_k(b)| <= tol * scale_k` for every `k`; equivalent to equality
/// of masses and of moments 1..n.
pub fn check_endpoint_conditions(profile: &HProfile, tol: f64) -> EndpointReport {
    for k in 0..=profile.n as usize {
        let r = profile.endpoint_residuals[k];
        if r > tol * profile.endpoint_scale(k) {
            return EndpointReport {
                passed: false,
                residuals: profile.endpoint_residuals.clone(),
                first_violation: Some((k as u32, profile.moment_gaps[k])),
            };
        }
    }
    EndpointReport {
        passed: true,
        residuals: profile.endpoint_residuals.clone(),
        first_violation: None,
    }
}

fn monomial_witness(k: u32, gap: f64) -> Witness {
    // f(t) = sign * t^k violates when sign * (m_k(mu1) - m_k(mu2)) > 0.
    let sign = if -gap >= 0.0 { 1.0 } else { -1.0 };
    Witness::Monomial { degree: k, sign }
}

fn decision_skeleton(profile: &HProfile, verdict: OrderingVerdict) -> Decision {
    Decision {
        order: profile.n,
        verdict,
        crossings: profile.catalogue.points.clone(),
        checkpoints: profile.checkpoints.clone(),
        endpoint_residuals: profile.endpoint_residuals.clone(),
    }
}

/// Exact necessary-and-sufficient test via the global minimum of
/// `(-1)^{n+1} H_n`. Total: always returns Holds, HoldsReversed, or
/// NotOrdered with a confirmed witness.
pub fn global_check(
    mu1: &SignedMeasure,
    mu2: &SignedMeasure,
    n: u32,
    tol: f64,
) -> Result<Decision> {
    let profile = h_sequence(mu1, mu2, n, tol)?;
    global_check_profile(&profile, tol)
}

/// [`global_check`] on a prebuilt cascade.
pub fn global_check_profile(profile: &HProfile, tol: f64) -> Result<Decision> {
    let ep = check_endpoint_conditions(profile, tol);
    if let Some((k, gap)) = ep.first_violation {
        return Ok(decision_skeleton(profile, OrderingVerdict::NotOrdered(monomial_witness(k, gap))));
    }
    let (a, b) = profile.support;
    let g = profile.h[profile.n as usize].scale(profile.orientation());
    let threshold = tol * profile.h[profile.n as usize].sup_estimate();
    let (xmin, vmin) = g.global_min(a, b)?;
    if vmin >= -threshold {
        return Ok(decision_skeleton(profile, OrderingVerdict::Holds));
    }
    let (_, vmax) = g.global_max(a, b)?;
    if vmax <= threshold {
        return Ok(decision_skeleton(profile, OrderingVerdict::HoldsReversed));
    }
    Ok(decision_skeleton(
        profile,
        OrderingVerdict::NotOrdered(Witness::SplineKnot { knot: xmin }),
    ))
}

/// Crossing-count decision procedure over the sign changes of `H_{n-1}`.
///
/// Requires the endpoint conditions (otherwise `Inconclusive`, the caller
/// should consult [`global_check`], which refutes by moment witness). When
/// `(-1)^{n+1} H_{n-1}` starts negative the swapped pair is decided and a
/// holding verdict is reported as `HoldsReversed`.
pub fn crossing_decision(
    mu1: &SignedMeasure,
    mu2: &SignedMeasure,
    n: u32,
    tol: f64,
) -> Result<Decision> {
    let profile = h_sequence(mu1, mu2, n, tol)?;
    crossing_decision_profile(&profile, tol)
}

/// [`crossing_decision`] on a prebuilt cascade.
pub fn crossing_decision_profile(profile: &HProfile, tol: f64) -> Result<Decision> {
    let ep = check_endpoint_conditions(profile, tol);
    if !ep.passed {
        return Ok(decision_skeleton(
            profile,
            OrderingVerdict::Inconclusive(InconclusiveReason::MomentMismatch),
        ));
    }
    let (a, b) = profile.support;
    let n = profile.n as usize;
    let orientation = profile.orientation();
    let g = profile.h[n].scale(orientation);
    let scale = profile.h[n].sup_estimate();
    let threshold = tol * scale;

    // sigma: sign of (-1)^{n+1} H_{n-1} on (a, x_1).
    let sigma = orientation * profile.catalogue.initial_sign as f64;

    if profile.catalogue.is_empty() {
        // No crossings. A one-signed H_{n-1} makes (-1)^{n+1} H_n monotone
        // from H_n(a) = 0, so its global sign is sigma's; all-zero means
        // equality.
        let verdict = if sigma > 0.0 || profile.catalogue.initial_sign == 0 {
            OrderingVerdict::Holds
        } else {
            OrderingVerdict::HoldsReversed
        };
        return Ok(decision_skeleton(profile, verdict));
    }

    let m = profile.catalogue.count();
    if m % 2 == 0 {
        // Even crossing count: refuted in both directions; the argmin of
        // (-1)^{n+1} H_n supplies the witness for the called direction.
        let (xmin, _) = g.global_min(a, b)?;
        return Ok(decision_skeleton(
            profile,
            OrderingVerdict::NotOrdered(Witness::SplineKnot { knot: xmin }),
        ));
    }

    // Odd m: the local minima of sigma * (-1)^{n+1} H_n sit exactly at the
    // even-indexed crossings; checking them decides.
    for cp in &profile.checkpoints {
        if sigma * cp.value < -threshold {
            let witness = if sigma > 0.0 {
                Witness::SplineKnot { knot: cp.x }
            } else {
                let (xmin, _) = g.global_min(a, b)?;
                Witness::SplineKnot { knot: xmin }
            };
            return Ok(decision_skeleton(profile, OrderingVerdict::NotOrdered(witness)));
        }
    }
    let verdict = if sigma > 0.0 {
        OrderingVerdict::Holds
    } else {
        OrderingVerdict::HoldsReversed
    };
    Ok(decision_skeleton(profile, verdict))
}

/// Single-crossing criterion for the convex order (n = 1): equal masses and
/// means plus one crossing of the cdf difference starting nonnegative.
/// Returns `Inconclusive(MultipleCrossings)` when more than one crossing is
/// seen; callers then fall back to an exact engine.
pub fn ohlin_check(mu1: &SignedMeasure, mu2: &SignedMeasure, tol: f64) -> Result<Decision> {
    let profile = h_sequence(mu1, mu2, 1, tol)?;
    let ep = check_endpoint_conditions(&profile, tol);
    if let Some((k, gap)) = ep.first_violation {
        return Ok(decision_skeleton(&profile, OrderingVerdict::NotOrdered(monomial_witness(k, gap))));
    }
    let verdict = match (profile.catalogue.count(), profile.catalogue.initial_sign) {
        (0, _) => OrderingVerdict::Holds,
        (1, s) if s >= 0 => OrderingVerdict::Holds,
        (1, _) => OrderingVerdict::HoldsReversed,
        _ => OrderingVerdict::Inconclusive(InconclusiveReason::MultipleCrossings),
    };
    Ok(decision_skeleton(&profile, verdict))
}

/// Endpoint/integral criterion for the convex order (n = 1): `F_1(b) =
/// F_2(b)`, equal integrals of the cdfs, and one-sided dominance of the
/// integrated difference. Exact and total, like [`global_check`] at n = 1.
pub fn levin_steckin_check(
    mu1: &SignedMeasure,
    mu2: &SignedMeasure,
    tol: f64,
) -> Result<Decision> {
    let (a, b) = check_compatible(mu1, mu2)?;
    let h0 = mu2.cdf().sub(&mu1.cdf())?;
    let h1 = h0.antiderivative()?;
    let span = b - a;
    let tv = mu1.total_variation() + mu2.total_variation();

    let r0 = h0.evaluate(b)?.abs();
    let r1 = h0.integral().abs();
    let residuals = vec![r0, r1];
    let catalogue = h0.sign_changes(tol);
    let skeleton = |verdict: OrderingVerdict, checkpoints: Vec<Checkpoint>| Decision {
        order: 1,
        verdict,
        crossings: catalogue.points.clone(),
        checkpoints,
        endpoint_residuals: residuals.clone(),
    };

    if r0 > tol * h0.sup_estimate().max(tv) {
        return Ok(skeleton(
            OrderingVerdict::NotOrdered(monomial_witness(0, mu2.total_mass() - mu1.total_mass())),
            vec![],
        ));
    }
    if r1 > tol * h1.sup_estimate().max(tv * span) {
        return Ok(skeleton(
            OrderingVerdict::NotOrdered(monomial_witness(1, mu2.moment(1) - mu1.moment(1))),
            vec![],
        ));
    }
    let threshold = tol * h1.sup_estimate();
    let (xmin, vmin) = h1.global_min(a, b)?;
    if vmin >= -threshold {
        return Ok(skeleton(OrderingVerdict::Holds, vec![]));
    }
    let (_, vmax) = h1.global_max(a, b)?;
    if vmax <= threshold {
        return Ok(skeleton(OrderingVerdict::HoldsReversed, vec![]));
    }
    Ok(skeleton(OrderingVerdict::NotOrdered(Witness::SplineKnot { knot: xmin }), vec![]))
}

/// Alternating-area report of the order-1 crossing criterion.
#[derive(Clone, Debug)]
pub struct SzostokReport {
    pub decision: Decision,
    /// `A_i = int_{x_i}^{x_{i+1}} |F|` with `x_0 = a`, `x_{m+1} = b`.
    pub areas: Vec<f64>,
    /// Alternating partial sums `A_0 - A_1`, `A_0 - A_1 + A_2 - A_3`, ...
    /// (equal to `H_1` at the even-indexed crossings).
    pub partial_sums: Vec<f64>,
}

/// Crossing criterion for the convex order via the areas `A_i` between
/// consecutive crossings of `F = F_2 - F_1`: with an odd crossing count the
/// ordering holds iff every alternating partial sum of the `A_i` is
/// nonnegative. Mirrors the checkpoint procedure and must agree with
/// [`levin_steckin_check`].
pub fn szostok_check(mu1: &SignedMeasure, mu2: &SignedMeasure, tol: f64) -> Result<SzostokReport> {
    let (a, b) = check_compatible(mu1, mu2)?;
    let profile = h_sequence(mu1, mu2, 1, tol)?;
    let h0 = &profile.h[0];
    let h1 = &profile.h[1];

    let ep = check_endpoint_conditions(&profile, tol);
    if let Some((k, gap)) = ep.first_violation {
        return Ok(SzostokReport {
            decision: decision_skeleton(&profile, OrderingVerdict::NotOrdered(monomial_witness(k, gap))),
            areas: vec![],
            partial_sums: vec![],
        });
    }

    // Areas are orientation-free; compute them for any crossing pattern.
    let mut nodes = vec![a];
    nodes.extend(profile.catalogue.points.iter().copied());
    nodes.push(b);
    let mut areas = Vec::with_capacity(nodes.len() - 1);
    for w in nodes.windows(2) {
        areas.push(h0.integral_abs_on(w[0], w[1], tol)?);
    }

    let sigma = profile.catalogue.initial_sign as f64;
    let m = profile.catalogue.count();
    let scale = h1.sup_estimate();
    let threshold = tol * scale;

    let verdict = if m == 0 {
        if sigma < 0.0 {
            OrderingVerdict::HoldsReversed
        } else {
            OrderingVerdict::Holds
        }
    } else if m % 2 == 0 {
        let (xmin, _) = h1.scale(sigma).global_min(a, b)?;
        OrderingVerdict::NotOrdered(Witness::SplineKnot { knot: xmin })
    } else {
        // Alternating partial sums (in the sigma orientation); the j-th one
        // telescopes to sigma * H_1(x_{2j}).
        let mut failing: Option<usize> = None;
        let mut sums = Vec::new();
        let mut acc = 0.0;
        for (i, &area) in areas.iter().enumerate().take(m) {
            let sgn = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc += sgn * area;
            if i % 2 == 1 {
                sums.push(acc);
                if acc < -threshold && failing.is_none() {
                    failing = Some(i);
                }
            }
        }
        let verdict = match failing {
            Some(i) => {
                let witness = if sigma >= 0.0 {
                    Witness::SplineKnot { knot: profile.catalogue.points[i] }
                } else {
                    let (xmin, _) = h1.global_min(a, b)?;
                    Witness::SplineKnot { knot: xmin }
                };
                OrderingVerdict::NotOrdered(witness)
            }
            None => {
                if sigma < 0.0 {
                    OrderingVerdict::HoldsReversed
                } else {
                    OrderingVerdict::Holds
                }
            }
        };
        return Ok(SzostokReport {
            decision: decision_skeleton(&profile, verdict),
            areas,
            partial_sums: sums,
        });
    };
    Ok(SzostokReport {
        decision: decision_skeleton(&profile, verdict),
        areas,
        partial_sums: vec![],
    })
}

/// Batch verification; pure per-pair computation, so the parallel and
/// sequential routes return identical vectors.
pub mod batch {
    use super::*;

    /// Runs [`global_check`] over every pair; parallel when the `parallel`
    /// feature is enabled.
    pub fn global_check_all(
        pairs: &[(SignedMeasure, SignedMeasure)],
        n: u32,
        tol: f64,
    ) -> Result<Vec<Decision>> {
        par::map_slice(pairs, |(m1, m2)| global_check(m1, m2, n, tol))
            .into_iter()
            .collect()
    }

    /// Sequential reference for [`global_check_all`].
    pub fn global_check_all_seq(
        pairs: &[(SignedMeasure, SignedMeasure)],
        n: u32,
        tol: f64,
    ) -> Result<Vec<Decision>> {
        pairs.iter().map(|(m1, m2)| global_check(m1, m2, n, tol)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_TOL;
    use approx::assert_relative_eq;

    fn chebyshev3() -> SignedMeasure {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        SignedMeasure::from_atoms(
            (-1.0, 1.0),
            &[(-c, 1.0 / 3.0), (0.0, 1.0 / 3.0), (c, 1.0 / 3.0)],
        )
        .unwrap()
    }

    fn lobatto4() -> SignedMeasure {
        let s = 5.0f64.sqrt() / 5.0;
        SignedMeasure::from_atoms(
            (-1.0, 1.0),
            &[(-1.0, 1.0 / 12.0), (-s, 5.0 / 12.0), (s, 5.0 / 12.0), (1.0, 1.0 / 12.0)],
        )
        .unwrap()
    }

    fn midpoint() -> SignedMeasure {
        SignedMeasure::dirac((-1.0, 1.0), 0.0).unwrap()
    }

    fn trapezoid() -> SignedMeasure {
        SignedMeasure::from_atoms((-1.0, 1.0), &[(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    fn uniform() -> SignedMeasure {
        SignedMeasure::uniform(-1.0, 1.0)
    }

    /// 1/72 + sqrt(5)/360 - sqrt(2)/72, the flagship checkpoint value.
    fn flagship_checkpoint() -> f64 {
        1.0 / 72.0 + 5.0f64.sqrt() / 360.0 - 2.0f64.sqrt() / 72.0
    }

    #[test]
    fn h_function_of_equal_measures_is_zero() {
        let m = chebyshev3();
        for n in 1..=4 {
            let h = h_function(&m, &m, n).unwrap();
            assert!(h.sup_estimate() <= 1e-15);
        }
    }

    #[test]
    fn h_function_flagship_values() {
        let h3 = h_function(&chebyshev3(), &lobatto4(), 3).unwrap();
        assert_relative_eq!(h3.evaluate(0.0).unwrap(), flagship_checkpoint(), epsilon = 1e-15);
        assert!(h3.evaluate(-1.0).unwrap().abs() <= 1e-15);
        assert!(h3.evaluate(1.0).unwrap().abs() <= 1e-15);
    }

    #[test]
    fn h_function_matches_pointwise_truncated_moments() {
        let m1 = SignedMeasure::new(
            (-1.0, 1.0),
            vec![crate::measure::Atom { location: -0.4, weight: 0.7 }],
            vec![crate::measure::DensityPiece { lo: -0.8, hi: 0.3, coeffs: vec![0.2, 0.4] }],
        )
        .unwrap();
        let m2 = uniform();
        for n in 1..=4u32 {
            let h = h_function(&m1, &m2, n).unwrap();
            for i in 0..=40 {
                let x = -1.0 + 0.05 * i as f64;
                assert_relative_eq!(
                    h.evaluate(x).unwrap(),
                    truncated_power_route(&m1, &m2, n, x),
                    max_relative = 1e-11,
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn h_sequence_equals_h_function_plus_defect() {
        // Unmatched pair: the two routes differ by the moment polynomial.
        let m1 = midpoint();
        let m2 = SignedMeasure::from_atoms((-1.0, 1.0), &[(-0.3, 0.4), (0.8, 0.6)]).unwrap();
        for n in 1..=4u32 {
            let profile = h_sequence(&m1, &m2, n, DEFAULT_TOL).unwrap();
            let spline = h_function(&m1, &m2, n).unwrap();
            let defect = route_defect(&m1, &m2, n).unwrap();
            for i in 0..=50 {
                let x = -1.0 + 0.04 * i as f64;
                let iterated = profile.h[n as usize].evaluate(x).unwrap();
                let direct = spline.evaluate(x).unwrap() + defect.evaluate(x).unwrap();
                assert_relative_eq!(iterated, direct, max_relative = 1e-10, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn h_sequence_midpoint_vs_uniform() {
        let profile = h_sequence(&midpoint(), &uniform(), 1, DEFAULT_TOL).unwrap();
        assert_eq!(profile.catalogue.count(), 1);
        assert_relative_eq!(profile.catalogue.points[0], 0.0, epsilon = 1e-12);
        assert_eq!(profile.catalogue.initial_sign, 1);
        assert!(profile.endpoint_residuals[1] <= 1e-15);
    }

    #[test]
    fn h_sequence_flagship_catalogue() {
        let profile = h_sequence(&chebyshev3(), &lobatto4(), 3, DEFAULT_TOL).unwrap();
        let expected = 1.0 + 5.0f64.sqrt() - 2.0 * 2.0f64.sqrt();
        assert_eq!(profile.catalogue.count(), 3);
        assert_relative_eq!(profile.catalogue.points[0], -expected, epsilon = 1e-9);
        assert!(profile.catalogue.points[1].abs() <= 1e-9);
        assert_relative_eq!(profile.catalogue.points[2], expected, epsilon = 1e-9);
        assert_eq!(profile.checkpoints.len(), 1);
        assert_relative_eq!(profile.checkpoints[0].value, flagship_checkpoint(), epsilon = 1e-12);
    }

    #[test]
    fn h_sequence_identical_measures() {
        let m = lobatto4();
        let profile = h_sequence(&m, &m, 3, DEFAULT_TOL).unwrap();
        assert!(profile.endpoint_residuals.iter().all(|&r| r == 0.0));
        assert!(profile.catalogue.is_empty());
    }

    #[test]
    fn endpoint_conditions_examples() {
        let profile = h_sequence(&chebyshev3(), &lobatto4(), 3, DEFAULT_TOL).unwrap();
        assert!(check_endpoint_conditions(&profile, DEFAULT_TOL).passed);

        let d0 = SignedMeasure::dirac((-1.0, 1.5), 0.0).unwrap();
        let d1 = SignedMeasure::dirac((-1.0, 1.5), 1.0).unwrap();
        let profile = h_sequence(&d0, &d1, 1, DEFAULT_TOL).unwrap();
        let report = check_endpoint_conditions(&profile, DEFAULT_TOL);
        assert!(!report.passed);
        let (k, gap) = report.first_violation.unwrap();
        assert_eq!(k, 1);
        assert_relative_eq!(gap, 1.0, epsilon = 1e-15);

        let m = chebyshev3();
        assert!(check_endpoint_conditions(&h_sequence(&m, &m, 3, DEFAULT_TOL).unwrap(), DEFAULT_TOL).passed);
    }

    #[test]
    fn global_check_flagship() {
        let d = global_check(&chebyshev3(), &lobatto4(), 3, DEFAULT_TOL).unwrap();
        assert_eq!(d.verdict, OrderingVerdict::Holds);
        let rev = global_check(&lobatto4(), &chebyshev3(), 3, DEFAULT_TOL).unwrap();
        assert_eq!(rev.verdict, OrderingVerdict::HoldsReversed);
    }

    #[test]
    fn global_check_hermite_hadamard_chain() {
        let d1 = global_check(&midpoint(), &uniform(), 1, DEFAULT_TOL).unwrap();
        assert_eq!(d1.verdict, OrderingVerdict::Holds);
        let d2 = global_check(&uniform(), &trapezoid(), 1, DEFAULT_TOL).unwrap();
        assert_eq!(d2.verdict, OrderingVerdict::Holds);
    }

    #[test]
    fn crossing_decision_flagship() {
        let d = crossing_decision(&chebyshev3(), &lobatto4(), 3, DEFAULT_TOL).unwrap();
        assert_eq!(d.verdict, OrderingVerdict::Holds);
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.checkpoints.len(), 1);
        assert!(d.checkpoints[0].x.abs() <= 1e-9);
        assert_relative_eq!(d.checkpoints[0].value, flagship_checkpoint(), epsilon = 1e-12);
    }

    #[test]
    fn crossing_decision_even_crossings_not_ordered() {
        // Equal mass and mean, two crossings of the cdf difference.
        let m1 = SignedMeasure::from_atoms((-1.0, 4.5), &[(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        let m2 = SignedMeasure::from_atoms((-1.0, 4.5), &[(-0.5, 0.9), (4.5, 0.1)]).unwrap();
        assert_relative_eq!(m1.moment(1), m2.moment(1), epsilon = 1e-15);
        let d = crossing_decision(&m1, &m2, 1, DEFAULT_TOL).unwrap();
        assert_eq!(d.crossing_count() % 2, 0);
        assert!(matches!(d.verdict, OrderingVerdict::NotOrdered(_)));
        let g = global_check(&m1, &m2, 1, DEFAULT_TOL).unwrap();
        assert!(matches!(g.verdict, OrderingVerdict::NotOrdered(_)));
    }

    #[test]
    fn crossing_decision_equal_measures_hold() {
        let m = chebyshev3();
        let d = crossing_decision(&m, &m, 3, DEFAULT_TOL).unwrap();
        assert_eq!(d.verdict, OrderingVerdict::Holds);
        assert_eq!(d.crossing_count(), 0);
    }

    #[test]
    fn crossing_decision_moment_mismatch_is_inconclusive() {
        let d = crossing_decision(&midpoint(), &trapezoid(), 2, DEFAULT_TOL).unwrap();
        assert_eq!(
            d.verdict,
            OrderingVerdict::Inconclusive(InconclusiveReason::MomentMismatch)
        );
    }

    #[test]
    fn ohlin_examples() {
        let d = ohlin_check(&midpoint(), &uniform(), DEFAULT_TOL).unwrap();
        assert_eq!(d.verdict, OrderingVerdict::Holds);
        let d = ohlin_check(&uniform(), &trapezoid(), DEFAULT_TOL).unwrap();
        assert_eq!(d.verdict, OrderingVerdict::Holds);

        // Three atoms against gauss2: more than one crossing.
        let three = SignedMeasure::from_atoms(
            (-1.0, 1.0),
            &[(-1.0, 1.0 / 3.0), (0.0, 1.0 / 3.0), (1.0, 1.0 / 3.0)],
        )
        .unwrap();
        let g = 1.0 / 3.0f64.sqrt();
        let gauss2 = SignedMeasure::from_atoms((-1.0, 1.0), &[(-g, 0.5), (g, 0.5)]).unwrap();
        let d = ohlin_check(&three, &gauss2, DEFAULT_TOL).unwrap();
        assert_eq!(
            d.verdict,
            OrderingVerdict::Inconclusive(InconclusiveReason::MultipleCrossings)
        );
        assert!(d.crossing_count() > 1);
    }

    #[test]
    fn levin_steckin_examples() {
        let d = levin_steckin_check(&midpoint(), &uniform(), DEFAULT_TOL).unwrap();
        assert_eq!(d.verdict, OrderingVerdict::Holds);

        let d0 = SignedMeasure::dirac((-1.0, 1.0), 0.0).unwrap();
        let dh = SignedMeasure::dirac((-1.0, 1.0), 0.5).unwrap();
        let d = levin_steckin_check(&d0, &dh, DEFAULT_TOL).unwrap();
        assert!(matches!(
            d.verdict,
            OrderingVerdict::NotOrdered(Witness::Monomial { degree: 1, .. })
        ));
    }

    #[test]
    fn szostok_single_crossing_holds() {
        let r = szostok_check(&midpoint(), &uniform(), DEFAULT_TOL).unwrap();
        assert_eq!(r.decision.verdict, OrderingVerdict::Holds);
        assert_eq!(r.areas.len(), 2);
        assert!(r.partial_sums.is_empty());
    }

    #[test]
    fn szostok_symmetric_step_boundary_case() {
        // F = +1 on (0,1), -1 on (1,2): A0 = A1 = 1, equality boundary.
        let m1 = SignedMeasure::from_atoms((0.0, 2.0), &[(1.0, 2.0)]).unwrap();
        let m2 = SignedMeasure::from_atoms((0.0, 2.0), &[(0.0, 1.0), (2.0, 1.0)]).unwrap();
        let r = szostok_check(&m1, &m2, DEFAULT_TOL).unwrap();
        assert_eq!(r.decision.verdict, OrderingVerdict::Holds);
        assert_eq!(r.areas.len(), 2);
        assert_relative_eq!(r.areas[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(r.areas[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn decision_json_schema() {
        let d = global_check(&chebyshev3(), &lobatto4(), 3, DEFAULT_TOL).unwrap();
        let json = d.to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["order_n"], 3);
        assert_eq!(v["verdict"], "holds");
        assert_eq!(v["m"], 3);
        assert_eq!(v["crossings"].as_array().unwrap().len(), 3);
        assert_eq!(v["checkpoints"][0]["value"].as_f64().unwrap(), flagship_checkpoint());
        assert!(v["witness"].is_null());
    }

    #[test]
    fn route_defect_vanishes_for_matched_pairs() {
        let defect = route_defect(&chebyshev3(), &lobatto4(), 3).unwrap();
        assert!(defect.sup_estimate() <= 1e-14);
    }
}
