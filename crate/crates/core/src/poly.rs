//! Dense univariate polynomials over f64: arithmetic, Sturm sequences, and
//! real-root isolation on an interval.
//!
//! Everything here is crate-internal plumbing for the piecewise layer. Roots
//! are isolated with a Sturm chain built on the square-free part, narrowed by
//! bisection, and polished with Newton steps.

/// Relative threshold below which a remainder in the Sturm recursion is
/// treated as zero (a nontrivial gcd was reached).
const REMAINDER_EPS: f64 = 1e-10;
/// Relative threshold for trimming spurious leading coefficients before
/// root work.
const TRIM_EPS: f64 = 1e-13;

/// Coefficients in ascending degree; the zero polynomial is an empty vec.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct Poly {
    pub(crate) c: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Poly { c: coeffs };
        p.trim_exact();
        p
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn constant(v: f64) -> Self {
        if v == 0.0 {
            Self::zero()
        } else {
            Poly { c: vec![v] }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.c.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.c.iter().fold(0.0, |m, &c| m.max(c.abs()))
    }

    fn trim_exact(&mut self) {
        while matches!(self.c.last(), Some(&c) if c == 0.0) {
            self.c.pop();
        }
    }

    /// Drops leading coefficients that are negligible relative to the largest
    /// one. Used before root isolation so a numerically degenerate leading
    /// term does not inflate the degree.
    pub fn trimmed_relative(&self) -> Poly {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return Poly::zero();
        }
        let mut c = self.c.clone();
        while matches!(c.last(), Some(&t) if t.abs() <= TRIM_EPS * scale) {
            c.pop();
        }
        Poly::new(c)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        let mut c = vec![0.0; n];
        for (i, v) in c.iter_mut().enumerate() {
            *v = self.c.get(i).copied().unwrap_or(0.0) + other.c.get(i).copied().unwrap_or(0.0);
        }
        Poly::new(c)
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly::new(self.c.iter().map(|&c| c * k).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![0.0; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in other.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.c[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (i + 1) as f64)
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = Vec::with_capacity(self.c.len() + 1);
        c.push(0.0);
        for (i, &v) in self.c.iter().enumerate() {
            c.push(v / (i + 1) as f64);
        }
        Poly::new(c)
    }

    /// Taylor shift: returns q with q(u) = p(u + delta).
    pub fn shifted(&self, delta: f64) -> Poly {
        if delta == 0.0 || self.is_zero() {
            return self.clone();
        }
        let mut c = self.c.clone();
        let n = c.len();
        for i in 0..n.saturating_sub(1) {
            for k in (i..n - 1).rev() {
                c[k] += delta * c[k + 1];
            }
        }
        Poly::new(c)
    }

    /// Returns q with q(u) = p(alpha * u + beta).
    pub fn compose_linear(&self, alpha: f64, beta: f64) -> Poly {
        let lin = Poly::new(vec![beta, alpha]);
        let mut acc = Poly::zero();
        for &c in self.c.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c));
        }
        acc
    }

    fn normalized(&self) -> Poly {
        let m = self.max_abs_coeff();
        if m == 0.0 {
            Poly::zero()
        } else {
            self.scale(1.0 / m)
        }
    }
}

/// Euclidean division: returns (quotient, remainder) with a = q*b + r.
fn divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    debug_assert!(!b.is_zero(), "division by zero polynomial");
    let db = b.degree().unwrap();
    if a.degree().map_or(true, |da| da < db) {
        return (Poly::zero(), a.clone());
    }
    let da = a.degree().unwrap();
    let lead = b.c[db];
    let mut rem = a.c.clone();
    let mut quot = vec![0.0; da - db + 1];
    for k in (0..=da - db).rev() {
        let q = rem[k + db] / lead;
        quot[k] = q;
        if q != 0.0 {
            for j in 0..=db {
                rem[k + j] -= q * b.c[j];
            }
        }
        rem[k + db] = 0.0;
    }
    rem.truncate(db);
    (Poly::new(quot), Poly::new(rem))
}

/// Sturm chain of the square-free part of a polynomial. Counts and isolates
/// distinct real roots; multiplicity parity is recovered later from sign
/// context by the piecewise layer.
pub(crate) struct Sturm {
    chain: Vec<Poly>,
}

impl Sturm {
    pub fn new(p: &Poly) -> Sturm {
        let p0 = p.normalized().trimmed_relative();
        Sturm::build(p0, 0)
    }

    fn build(p0: Poly, depth: usize) -> Sturm {
        if p0.degree().map_or(true, |d| d == 0) || depth > 32 {
            return Sturm { chain: vec![p0] };
        }
        let mut chain = vec![p0.clone(), p0.derivative().normalized()];
        loop {
            let n = chain.len();
            let (_, r) = divrem(&chain[n - 2], &chain[n - 1]);
            if r.max_abs_coeff() <= REMAINDER_EPS {
                // Nontrivial gcd: p0 has repeated roots. Restart on the
                // square-free part so the chain counts distinct roots.
                let gcd = &chain[n - 1];
                if gcd.degree().map_or(false, |d| d >= 1) {
                    let (sq_free, _) = divrem(&p0, gcd);
                    return Sturm::build(sq_free.normalized().trimmed_relative(), depth + 1);
                }
                break;
            }
            chain.push(r.scale(-1.0).normalized());
            if chain.last().unwrap().degree().map_or(true, |d| d == 0) {
                break;
            }
        }
        Sturm { chain }
    }

    /// The square-free polynomial the chain was built on.
    pub fn square_free(&self) -> &Poly {
        &self.chain[0]
    }

    fn variations(&self, x: f64) -> usize {
        let mut count = 0;
        let mut last = 0.0f64;
        for p in &self.chain {
            let v = p.eval(x);
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && (v < 0.0) != (last < 0.0) {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Number of distinct real roots in (lo, hi].
    pub fn count_in(&self, lo: f64, hi: f64) -> usize {
        self.variations(lo).saturating_sub(self.variations(hi))
    }
}

/// All distinct real roots of `p` in (lo, hi], ascending, refined to roughly
/// machine precision. Isolation narrows each interval to 1e-10 of the span,
/// then at most 60 bisection steps and a short Newton polish finish the job.
pub(crate) fn distinct_roots_in(p: &Poly, lo: f64, hi: f64) -> Vec<f64> {
    if !(lo < hi) {
        return Vec::new();
    }
    let sturm = Sturm::new(p);
    if sturm.square_free().degree().map_or(true, |d| d == 0) {
        return Vec::new();
    }
    let mut intervals = Vec::new();
    isolate(&sturm, lo, hi, sturm.count_in(lo, hi), 1e-10 * (hi - lo), &mut intervals, 0);
    let q = sturm.square_free();
    let mut roots: Vec<f64> = intervals
        .into_iter()
        .map(|(l, h)| refine(q, l, h))
        .collect();
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

fn isolate(
    sturm: &Sturm,
    lo: f64,
    hi: f64,
    count: usize,
    width_target: f64,
    out: &mut Vec<(f64, f64)>,
    depth: usize,
) {
    if count == 0 {
        return;
    }
    if (count == 1 && hi - lo <= width_target) || depth > 80 {
        out.push((lo, hi));
        return;
    }
    let mut mid = 0.5 * (lo + hi);
    // Avoid splitting exactly on a root of the square-free part.
    if sturm.square_free().eval(mid) == 0.0 {
        mid += (hi - lo) * 1e-3;
    }
    let left = sturm.count_in(lo, mid);
    isolate(sturm, lo, mid, left, width_target, out, depth + 1);
    isolate(sturm, mid, hi, count.saturating_sub(left), width_target, out, depth + 1);
}

/// Bisection (at most 60 steps) followed by Newton polishing on the
/// square-free polynomial.
fn refine(q: &Poly, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = q.eval(lo);
    let fhi = q.eval(hi);
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    if (flo < 0.0) == (fhi < 0.0) {
        // No sign flip across the isolation interval (tight cluster or
        // boundary effect): fall back to the in-interval minimizer of |q|.
        let mut best = (lo, flo.abs());
        for i in 1..=64 {
            let x = lo + (hi - lo) * i as f64 / 64.0;
            let v = q.eval(x).abs();
            if v < best.1 {
                best = (x, v);
            }
        }
        return newton_polish(q, best.0, lo, hi);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = q.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    newton_polish(q, 0.5 * (lo + hi), lo, hi)
}

fn newton_polish(q: &Poly, mut x: f64, lo: f64, hi: f64) -> f64 {
    let dq = q.derivative();
    for _ in 0..8 {
        let f = q.eval(x);
        if f == 0.0 {
            break;
        }
        let d = dq.eval(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - f / d;
        if !next.is_finite() || next < lo || next > hi {
            break;
        }
        if (next - x).abs() <= f64::EPSILON * x.abs().max(1.0) {
            x = next;
            break;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn poly(c: &[f64]) -> Poly {
        Poly::new(c.to_vec())
    }

    #[test]
    fn eval_and_arith() {
        let p = poly(&[1.0, -2.0, 1.0]); // (x-1)^2
        assert_eq!(p.eval(1.0), 0.0);
        assert_eq!(p.eval(3.0), 4.0);
        let q = p.add(&p.scale(-1.0));
        assert!(q.is_zero());
        assert_eq!(p.derivative().c, vec![-2.0, 2.0]);
        assert_eq!(p.antiderivative().derivative(), p);
    }

    #[test]
    fn shift_is_exact_for_squares() {
        let p = poly(&[0.0, 0.0, 1.0]); // x^2
        let s = p.shifted(1.0); // (u+1)^2
        assert_eq!(s.c, vec![1.0, 2.0, 1.0]);
        let back = s.shifted(-1.0);
        assert_eq!(back.c, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn compose_linear_matches_eval() {
        let p = poly(&[2.0, -1.0, 0.5, 3.0]);
        let q = p.compose_linear(2.0, -0.25);
        for i in 0..20 {
            let u = -1.0 + 0.1 * i as f64;
            assert_relative_eq!(q.eval(u), p.eval(2.0 * u - 0.25), max_relative = 1e-13, epsilon = 1e-13);
        }
    }

    #[test]
    fn divrem_reconstructs() {
        let a = poly(&[1.0, 2.0, -4.0, 0.5, 1.0]);
        let b = poly(&[-1.0, 1.0, 2.0]);
        let (q, r) = divrem(&a, &b);
        let recon = q.mul(&b).add(&r);
        for (x, y) in recon.c.iter().zip(a.c.iter()) {
            assert_relative_eq!(x, y, epsilon = 1e-12);
        }
        assert!(r.degree().unwrap_or(0) < b.degree().unwrap());
    }

    #[test]
    fn sturm_counts_simple_roots() {
        // (x+0.5)(x-0.25)(x-0.75)
        let p = poly(&[-0.5, 0.25, 1.0]).mul(&poly(&[-0.75, 1.0]));
        let s = Sturm::new(&p);
        assert_eq!(s.count_in(-1.0, 1.0), 3);
        assert_eq!(s.count_in(0.0, 1.0), 2);
        assert_eq!(s.count_in(-1.0, 0.0), 1);
    }

    #[test]
    fn sturm_handles_multiple_roots() {
        // x^2 * (x - 0.5)^2: two distinct roots, both double.
        let p = poly(&[0.0, 0.0, 1.0]).mul(&poly(&[0.25, -1.0, 1.0]));
        let s = Sturm::new(&p);
        assert_eq!(s.count_in(-1.0, 1.0), 2);
        let roots = distinct_roots_in(&p, -1.0, 1.0);
        assert_eq!(roots.len(), 2);
        assert_relative_eq!(roots[0], 0.0, epsilon = 1e-9);
        assert_relative_eq!(roots[1], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn roots_of_quadratic() {
        let p = poly(&[-0.25, 0.0, 1.0]); // x^2 - 1/4
        let roots = distinct_roots_in(&p, -1.0, 1.0);
        assert_eq!(roots.len(), 2);
        assert_relative_eq!(roots[0], -0.5, epsilon = 1e-12);
        assert_relative_eq!(roots[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn roots_interval_is_half_open() {
        let p = poly(&[0.0, 1.0]); // x
        assert_eq!(distinct_roots_in(&p, 0.0, 1.0).len(), 0); // root at lo excluded
        assert_eq!(distinct_roots_in(&p, -1.0, 0.0).len(), 1); // root at hi included
    }

    #[test]
    fn sturm_count_matches_root_list_on_random_polynomials() {
        // Seeded LCG keeps this test dependency-free and deterministic.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..500 {
            let deg = 1 + (next().abs() * 6.0) as usize;
            let mut c: Vec<f64> = (0..=deg).map(|_| next()).collect();
            if c[deg] == 0.0 {
                c[deg] = 0.5;
            }
            let p = Poly::new(c);
            let s = Sturm::new(&p);
            let count = s.count_in(-1.0, 1.0);
            let roots = distinct_roots_in(&p, -1.0, 1.0);
            assert_eq!(
                roots.len(),
                count,
                "count mismatch for {:?}",
                p.c
            );
            for r in &roots {
                assert!(p.eval(*r).abs() <= 1e-7 * p.max_abs_coeff().max(1.0));
            }
        }
    }
}
