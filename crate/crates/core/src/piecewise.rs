//! Piecewise polynomials with jump semantics.
//!
//! A [`PiecewisePolynomial`] lives on a breakpoint grid `b0 < ... < bM`. Piece
//! `i` holds coefficients in the local variable `u = x - b_i` and owns the
//! half-open interval `[b_i, b_{i+1})`; evaluation is right-continuous at
//! interior breakpoints, and an explicit terminal value covers `x = bM` (a
//! distribution function with an atom at the right endpoint jumps there).
//!
//! On top of evaluation and calculus the module provides exact root
//! isolation per piece and the sign-change catalogue used by the ordering
//! engines: strict sign alternations, with tolerance-level zero stretches
//! discarded.

use crate::error::{Error, Result};
use crate::jsonfmt;
use crate::poly::{distinct_roots_in, Poly};

/// Degree cap for pieces; antiderivatives past this fail with `DegreeOverflow`.
pub const MAX_PIECE_DEGREE: usize = 24;

/// Relative snap used when merging breakpoint grids.
const GRID_SNAP_REL: f64 = 1e-13;
/// Relative slack accepted outside the domain before `OutOfDomain` fires.
const DOMAIN_SLACK_REL: f64 = 1e-9;

/// Whether the sign flips across a root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootParity {
    Odd,
    Even,
}

/// Catalogue of strict sign changes: crossing abscissae plus the sign taken
/// left of the first crossing. Zero-valued stretches contribute no term.
#[derive(Clone, Debug, PartialEq)]
pub struct SignChangeCatalogue {
    pub points: Vec<f64>,
    pub initial_sign: i8,
}

impl SignChangeCatalogue {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    lo: f64,
    hi: f64,
    sign: i8,
}

#[derive(Clone, Debug)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<f64>,
    pieces: Vec<Poly>,
    /// Jump flag per interior breakpoint `b_1..b_{M-1}`.
    jump: Vec<bool>,
    /// Value at `x = bM`; differs from the last piece's limit only when the
    /// function jumps at the right endpoint.
    terminal: f64,
}

impl PiecewisePolynomial {
    pub(crate) fn from_parts(
        breakpoints: Vec<f64>,
        pieces: Vec<Poly>,
        jump: Vec<bool>,
        terminal: f64,
    ) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidPiecewise("need at least two breakpoints".into()));
        }
        if pieces.len() + 1 != breakpoints.len() || jump.len() + 2 != breakpoints.len() {
            return Err(Error::InvalidPiecewise("piece/flag counts do not match grid".into()));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || !terminal.is_finite() {
            return Err(Error::InvalidPiecewise("non-finite data".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPiecewise("breakpoints not strictly increasing".into()));
        }
        for p in &pieces {
            if p.c.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidPiecewise("non-finite coefficient".into()));
            }
            if p.degree().unwrap_or(0) > MAX_PIECE_DEGREE {
                return Err(Error::DegreeOverflow(p.degree().unwrap(), MAX_PIECE_DEGREE));
            }
        }
        Ok(PiecewisePolynomial { breakpoints, pieces, jump, terminal })
    }

    /// Constant function on `[a, b]`.
    pub fn constant(a: f64, b: f64, value: f64) -> Self {
        PiecewisePolynomial {
            breakpoints: vec![a, b],
            pieces: vec![Poly::constant(value)],
            jump: Vec::new(),
            terminal: value,
        }
    }

    /// Single piece on `[a, b]` given coefficients of `sum c_k x^k` in the
    /// global variable.
    pub fn from_global_coeffs(a: f64, b: f64, coeffs: &[f64]) -> Result<Self> {
        let local = Poly::new(coeffs.to_vec()).shifted(a);
        let terminal = local.eval(b - a);
        Self::from_parts(vec![a, b], vec![local], Vec::new(), terminal)
    }

    /// Piecewise function from per-piece global coefficients. Interior
    /// breakpoints are flagged as jumps when left and right values disagree.
    pub fn from_global_pieces(breakpoints: &[f64], coeffs: &[Vec<f64>]) -> Result<Self> {
        if breakpoints.len() != coeffs.len() + 1 {
            return Err(Error::InvalidPiecewise("grid/piece count mismatch".into()));
        }
        let pieces: Vec<Poly> = coeffs
            .iter()
            .zip(breakpoints.iter())
            .map(|(c, &lo)| Poly::new(c.clone()).shifted(lo))
            .collect();
        let mut jump = Vec::with_capacity(breakpoints.len().saturating_sub(2));
        let mut scale: f64 = 1.0;
        for p in &pieces {
            scale = scale.max(p.max_abs_coeff());
        }
        for i in 1..breakpoints.len() - 1 {
            let left = pieces[i - 1].eval(breakpoints[i] - breakpoints[i - 1]);
            let right = pieces[i].eval(0.0);
            jump.push((left - right).abs() > 1e-9 * scale);
        }
        let last = pieces.len() - 1;
        let terminal = pieces[last].eval(breakpoints[last + 1] - breakpoints[last]);
        Self::from_parts(breakpoints.to_vec(), pieces, jump, terminal)
    }

    /// Step function: `values[i]` on `[breakpoints[i], breakpoints[i+1])`,
    /// terminal value `values.last()`.
    pub fn step(breakpoints: &[f64], values: &[f64]) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidPiecewise("grid/value count mismatch".into()));
        }
        let pieces = values.iter().map(|&v| Poly::constant(v)).collect();
        let jump = values.windows(2).map(|w| w[0] != w[1]).collect();
        Self::from_parts(breakpoints.to_vec(), pieces, jump, *values.last().unwrap())
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn terminal_value(&self) -> f64 {
        self.terminal
    }

    /// Local (shifted) coefficients of piece `i`.
    pub fn piece_coeffs(&self, i: usize) -> &[f64] {
        &self.pieces[i].c
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    /// True when the interior breakpoint at index `i` (i.e. `breakpoints[i+1]`)
    /// carries a jump.
    pub fn is_jump_at(&self, i: usize) -> bool {
        self.jump[i]
    }

    pub fn has_jump(&self) -> bool {
        self.jump.iter().any(|&j| j) || self.terminal_jump_magnitude() != 0.0
    }

    fn span(&self) -> f64 {
        let (a, b) = self.support();
        b - a
    }

    fn terminal_jump_magnitude(&self) -> f64 {
        let (_, b) = self.support();
        let last = self.pieces.len() - 1;
        let limit = self.pieces[last].eval(b - self.breakpoints[last]);
        let scale = self.terminal.abs().max(limit.abs()).max(1.0);
        if (self.terminal - limit).abs() <= 1e-11 * scale {
            0.0
        } else {
            self.terminal - limit
        }
    }

    fn clamp_domain(&self, x: f64) -> Result<f64> {
        let (a, b) = self.support();
        let slack = DOMAIN_SLACK_REL * self.span();
        if x < a - slack || x > b + slack {
            return Err(Error::OutOfDomain { x, lo: a, hi: b });
        }
        Ok(x.clamp(a, b))
    }

    fn piece_index(&self, x: f64) -> usize {
        let n = self.pieces.len();
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        idx.saturating_sub(1).min(n - 1)
    }

    /// Right-continuous evaluation; `x = bM` yields the terminal value.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let x = self.clamp_domain(x)?;
        let (_, b) = self.support();
        if x == b {
            return Ok(self.terminal);
        }
        let i = self.piece_index(x);
        Ok(self.pieces[i].eval(x - self.breakpoints[i]))
    }

    /// Left limit at `x`; at the left endpoint (where no left side exists)
    /// this is the value itself.
    pub fn evaluate_left_limit(&self, x: f64) -> Result<f64> {
        let x = self.clamp_domain(x)?;
        let (a, _) = self.support();
        if x == a {
            return self.evaluate(a);
        }
        let idx = self.breakpoints.partition_point(|&b| b < x);
        let i = idx.saturating_sub(1).min(self.pieces.len() - 1);
        Ok(self.pieces[i].eval(x - self.breakpoints[i]))
    }

    /// Scales by a constant.
    pub fn scale(&self, k: f64) -> Self {
        let pieces = self.pieces.iter().map(|p| p.scale(k)).collect();
        let jump = if k == 0.0 {
            vec![false; self.jump.len()]
        } else {
            self.jump.clone()
        };
        PiecewisePolynomial {
            breakpoints: self.breakpoints.clone(),
            pieces,
            jump,
            terminal: self.terminal * k,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// Pointwise sum; the breakpoint grids are merged.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let (a1, b1) = self.support();
        let (a2, b2) = other.support();
        let span = (b1 - a1).max(b2 - a2);
        if (a1 - a2).abs() > 1e-9 * span || (b1 - b2).abs() > 1e-9 * span {
            return Err(Error::SupportMismatch(a1, b1, a2, b2));
        }
        let snap = GRID_SNAP_REL * span;
        let mut grid: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .collect();
        grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
        grid.dedup_by(|next, prev| (*next - *prev).abs() <= snap);
        let m = grid.len() - 1;
        grid[0] = a1;
        grid[m] = b1;

        let mut pieces = Vec::with_capacity(m);
        for i in 0..m {
            let lo = grid[i];
            let mid = 0.5 * (grid[i] + grid[i + 1]);
            let pi = self.piece_index(mid);
            let qi = other.piece_index(mid.clamp(a2, b2));
            let p = self.pieces[pi].shifted(lo - self.breakpoints[pi]);
            let q = other.pieces[qi].shifted(lo - other.breakpoints[qi]);
            pieces.push(p.add(&q));
        }
        let jump: Vec<bool> = grid[1..m]
            .iter()
            .map(|&bp| self.jumps_near(bp, snap) || other.jumps_near(bp, snap))
            .collect();
        Self::from_parts(grid, pieces, jump, self.terminal + other.terminal)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    fn jumps_near(&self, x: f64, snap: f64) -> bool {
        self.jump
            .iter()
            .enumerate()
            .any(|(i, &j)| j && (self.breakpoints[i + 1] - x).abs() <= snap)
    }

    /// Antiderivative anchored at the left endpoint: continuous, vanishes at
    /// `b0`, and integrates across jumps (which contribute nothing).
    pub fn antiderivative(&self) -> Result<Self> {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut acc = 0.0f64;
        for (i, p) in self.pieces.iter().enumerate() {
            if p.degree().unwrap_or(0) + 1 > MAX_PIECE_DEGREE {
                return Err(Error::DegreeOverflow(p.degree().unwrap() + 1, MAX_PIECE_DEGREE));
            }
            let ad = p.antiderivative();
            let width = self.breakpoints[i + 1] - self.breakpoints[i];
            let end = ad.eval(width);
            pieces.push(ad.add(&Poly::constant(acc)));
            acc += end;
        }
        PiecewisePolynomial::from_parts(
            self.breakpoints.clone(),
            pieces,
            vec![false; self.jump.len()],
            acc,
        )
    }

    /// Piecewise derivative. Fails on any jump: differentiating across a
    /// discontinuity is undefined here.
    pub fn differentiate(&self) -> Result<Self> {
        if let Some(i) = self.jump.iter().position(|&j| j) {
            return Err(Error::JumpDifferentiation(self.breakpoints[i + 1]));
        }
        if self.terminal_jump_magnitude() != 0.0 {
            return Err(Error::JumpDifferentiation(self.support().1));
        }
        let pieces: Vec<Poly> = self.pieces.iter().map(|p| p.derivative()).collect();
        let mut scale: f64 = 1.0;
        for p in &pieces {
            scale = scale.max(p.max_abs_coeff());
        }
        let mut jump = Vec::with_capacity(self.jump.len());
        for i in 1..self.breakpoints.len() - 1 {
            let left = pieces[i - 1].eval(self.breakpoints[i] - self.breakpoints[i - 1]);
            let right = pieces[i].eval(0.0);
            jump.push((left - right).abs() > 1e-11 * scale);
        }
        let last = pieces.len() - 1;
        let terminal = pieces[last].eval(self.breakpoints[last + 1] - self.breakpoints[last]);
        PiecewisePolynomial::from_parts(self.breakpoints.clone(), pieces, jump, terminal)
    }

    /// Estimate of `sup |p|`: breakpoint values from both sides, the terminal
    /// value, and every interior critical point of every piece.
    pub fn sup_estimate(&self) -> f64 {
        let mut m = self.terminal.abs();
        for (i, p) in self.pieces.iter().enumerate() {
            let width = self.breakpoints[i + 1] - self.breakpoints[i];
            m = m.max(p.eval(0.0).abs()).max(p.eval(width).abs());
            for r in distinct_roots_in(&p.derivative(), 0.0, width) {
                m = m.max(p.eval(r).abs());
            }
        }
        m
    }

    /// Integral over the whole support.
    pub fn integral(&self) -> f64 {
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                p.antiderivative()
                    .eval(self.breakpoints[i + 1] - self.breakpoints[i])
            })
            .sum()
    }

    /// Integral over `[lo, hi]`.
    pub fn integral_on(&self, lo: f64, hi: f64) -> Result<f64> {
        let lo = self.clamp_domain(lo)?;
        let hi = self.clamp_domain(hi)?;
        let mut acc = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            let plo = self.breakpoints[i];
            let phi = self.breakpoints[i + 1];
            let l = lo.max(plo);
            let h = hi.min(phi);
            if l < h {
                let ad = p.antiderivative();
                acc += ad.eval(h - plo) - ad.eval(l - plo);
            }
        }
        Ok(acc)
    }

    /// Integral of `|p|` over `[lo, hi]`, resolved exactly on constant-sign
    /// stretches between roots.
    pub fn integral_abs_on(&self, lo: f64, hi: f64, tol: f64) -> Result<f64> {
        let lo = self.clamp_domain(lo)?;
        let hi = self.clamp_domain(hi)?;
        let mut acc = 0.0;
        for seg in self.sign_segments(lo, hi, tol) {
            acc += self.integral_on(seg.lo, seg.hi)?.abs();
        }
        Ok(acc)
    }

    /// All roots in the open interval `(lo, hi)` with their sign-flip parity.
    pub fn real_roots_on(&self, lo: f64, hi: f64, tol: f64) -> Vec<(f64, RootParity)> {
        let (a, b) = self.support();
        let lo = lo.max(a);
        let hi = hi.min(b);
        if !(lo < hi) {
            return Vec::new();
        }
        let span = self.span();
        let snap = 1e-11 * span;
        let z = tol * self.zero_scale();

        let mut roots: Vec<f64> = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let plo = self.breakpoints[i];
            let phi = self.breakpoints[i + 1];
            let l = lo.max(plo);
            let h = hi.min(phi);
            if l >= h {
                continue;
            }
            let trimmed = p.trimmed_relative();
            if trimmed.degree().map_or(true, |d| d == 0) {
                continue;
            }
            for r in distinct_roots_in(p, l - plo, h - plo) {
                roots.push(plo + r);
            }
            // distinct_roots_in works on a half-open interval that excludes
            // the left edge; catch a root sitting exactly there.
            if p.eval(l - plo) == 0.0 {
                roots.push(l);
            }
        }
        roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // Cluster duplicates produced by adjacent pieces sharing a root.
        let mut merged: Vec<f64> = Vec::new();
        for r in roots {
            match merged.last() {
                Some(&last) if (r - last).abs() <= snap => {
                    let n = merged.len();
                    merged[n - 1] = 0.5 * (last + r);
                }
                _ => merged.push(r),
            }
        }
        // Keep the open interval only, and drop pseudo-roots where a piece
        // limit touches zero at a jump but the function value does not.
        merged.retain(|&r| r > lo + snap && r < hi - snap);
        merged.retain(|&r| {
            let at_jump = self
                .jump
                .iter()
                .enumerate()
                .any(|(i, &j)| j && (self.breakpoints[i + 1] - r).abs() <= snap);
            !at_jump || self.evaluate(r).map_or(false, |v| v.abs() <= z)
        });

        let segments = self.sign_segments(lo, hi, tol);
        merged
            .into_iter()
            .map(|r| {
                let left = segments
                    .iter()
                    .rev()
                    .find(|s| s.sign != 0 && s.hi <= r + snap)
                    .map(|s| s.sign)
                    .unwrap_or(0);
                let right = segments
                    .iter()
                    .find(|s| s.sign != 0 && s.lo >= r - snap)
                    .map(|s| s.sign)
                    .unwrap_or(0);
                let parity = if left != 0 && right != 0 && left != right {
                    RootParity::Odd
                } else {
                    RootParity::Even
                };
                (r, parity)
            })
            .collect()
    }

    fn zero_scale(&self) -> f64 {
        self.sup_estimate().max(1.0)
    }

    /// Constant-sign decomposition of `[lo, hi]`. Cuts sit at breakpoints and
    /// at every piece root; each open stretch is classified +, -, or 0 (all
    /// samples within `tol * scale` of zero). Adjacent stretches with equal
    /// sign are merged. The isolated value at the right endpoint (terminal
    /// jump) affects no open stretch and is ignored.
    fn sign_segments(&self, lo: f64, hi: f64, tol: f64) -> Vec<Segment> {
        let z = tol * self.zero_scale();
        let snap = 1e-11 * self.span();

        let mut cuts: Vec<f64> = vec![lo, hi];
        for &bp in &self.breakpoints {
            if bp > lo + snap && bp < hi - snap {
                cuts.push(bp);
            }
        }
        for (i, p) in self.pieces.iter().enumerate() {
            let plo = self.breakpoints[i];
            let phi = self.breakpoints[i + 1];
            let l = lo.max(plo);
            let h = hi.min(phi);
            if l >= h {
                continue;
            }
            for r in distinct_roots_in(p, l - plo, h - plo) {
                let x = plo + r;
                if x > lo + snap && x < hi - snap {
                    cuts.push(x);
                }
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup_by(|next, prev| (*next - *prev).abs() <= snap);

        let mut segments: Vec<Segment> = Vec::new();
        for w in cuts.windows(2) {
            let (l, h) = (w[0], w[1]);
            let mut best = 0.0f64;
            for frac in [0.5, 0.25, 0.75] {
                let v = self.evaluate(l + (h - l) * frac).unwrap_or(0.0);
                if v.abs() > best.abs() {
                    best = v;
                }
            }
            let sign = if best.abs() <= z {
                0
            } else if best > 0.0 {
                1
            } else {
                -1
            };
            match segments.last_mut() {
                Some(prev) if prev.sign == sign => prev.hi = h,
                _ => segments.push(Segment { lo: l, hi: h, sign }),
            }
        }
        segments
    }

    /// Catalogue of strict sign alternations over the support. Jumps whose
    /// left/right signs differ count as crossings at the jump point; a zero
    /// stretch between opposite signs contributes one crossing at its
    /// midpoint and no sign term of its own.
    pub fn sign_changes(&self, tol: f64) -> SignChangeCatalogue {
        let (a, b) = self.support();
        let segments = self.sign_segments(a, b, tol);
        let mut points = Vec::new();
        let mut initial_sign = 0i8;
        let mut prev: Option<&Segment> = None;
        for seg in &segments {
            if seg.sign == 0 {
                continue;
            }
            if initial_sign == 0 {
                initial_sign = seg.sign;
            }
            if let Some(p) = prev {
                if p.sign != seg.sign {
                    // Adjacent stretches alternate at the shared cut; a zero
                    // gap reports its midpoint.
                    if (seg.lo - p.hi).abs() <= 1e-11 * self.span() {
                        points.push(p.hi);
                    } else {
                        points.push(0.5 * (p.hi + seg.lo));
                    }
                }
            }
            prev = Some(seg);
        }
        SignChangeCatalogue { points, initial_sign }
    }

    /// Exact global minimum of a continuous piecewise polynomial over
    /// `[lo, hi]`: endpoints, breakpoints, and all interior critical points
    /// are examined. Ties resolve to the leftmost abscissa.
    pub fn global_min(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        if let Some(i) = self.jump.iter().position(|&j| j) {
            let bp = self.breakpoints[i + 1];
            if bp > lo && bp < hi {
                return Err(Error::JumpDifferentiation(bp));
            }
        }
        let lo = self.clamp_domain(lo)?;
        let hi = self.clamp_domain(hi)?;
        let mut candidates: Vec<f64> = vec![lo, hi];
        for &bp in &self.breakpoints {
            if bp > lo && bp < hi {
                candidates.push(bp);
            }
        }
        for (i, p) in self.pieces.iter().enumerate() {
            let plo = self.breakpoints[i];
            let l = lo.max(plo);
            let h = hi.min(self.breakpoints[i + 1]);
            if l >= h {
                continue;
            }
            for r in distinct_roots_in(&p.derivative(), l - plo, h - plo) {
                candidates.push(plo + r);
            }
        }
        candidates.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut best = (lo, self.evaluate(lo)?);
        for x in candidates {
            let v = self.evaluate(x)?;
            if v < best.1 {
                best = (x, v);
            }
        }
        Ok(best)
    }

    pub fn global_max(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        let (x, v) = self.neg().global_min(lo, hi)?;
        Ok((x, -v))
    }

    /// JSON dump: `{"breakpoints":[...],"pieces":[[c0,c1,...],...],"jumps":[...]}`.
    /// Piece coefficients are in the local variable `x - b_i`; `jumps` holds
    /// the value jump at each interior breakpoint (0 where continuous).
    pub fn dump_json(&self) -> String {
        let pieces: Vec<String> = self
            .pieces
            .iter()
            .map(|p| {
                if p.c.is_empty() {
                    jsonfmt::float_array(&[0.0])
                } else {
                    jsonfmt::float_array(&p.c)
                }
            })
            .collect();
        let jumps: Vec<f64> = self
            .jump
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                if j {
                    let bp = self.breakpoints[i + 1];
                    self.evaluate(bp).unwrap() - self.evaluate_left_limit(bp).unwrap()
                } else {
                    0.0
                }
            })
            .collect();
        format!(
            "{{\"breakpoints\":{},\"pieces\":[{}],\"jumps\":{}}}",
            jsonfmt::float_array(&self.breakpoints),
            pieces.join(","),
            jsonfmt::float_array(&jumps),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TOL: f64 = 1e-9;

    fn unit_step() -> PiecewisePolynomial {
        PiecewisePolynomial::step(&[-1.0, 0.0, 1.0], &[0.0, 1.0]).unwrap()
    }

    #[test]
    fn step_evaluation_is_right_continuous() {
        let s = unit_step();
        assert_eq!(s.evaluate(0.0).unwrap(), 1.0);
        assert_eq!(s.evaluate_left_limit(0.0).unwrap(), 0.0);
        assert_eq!(s.evaluate(-0.5).unwrap(), 0.0);
        assert_eq!(s.evaluate(1.0).unwrap(), 1.0);
    }

    #[test]
    fn single_piece_square() {
        let p = PiecewisePolynomial::from_global_coeffs(-1.0, 2.0, &[0.0, 0.0, 1.0]).unwrap();
        assert_relative_eq!(p.evaluate(2.0).unwrap(), 4.0, epsilon = 1e-12);
        assert_relative_eq!(p.evaluate(-0.5).unwrap(), 0.25, epsilon = 1e-12);
        assert!(p.evaluate(3.0).is_err());
    }

    #[test]
    fn antiderivative_of_step() {
        let s = unit_step();
        let a = s.antiderivative().unwrap();
        assert_eq!(a.evaluate(-1.0).unwrap(), 0.0);
        assert_eq!(a.evaluate(0.0).unwrap(), 0.0);
        assert_relative_eq!(a.evaluate(0.5).unwrap(), 0.5, epsilon = 1e-14);
        assert_relative_eq!(a.evaluate(1.0).unwrap(), 1.0, epsilon = 1e-14);
        assert!(!a.has_jump());
    }

    #[test]
    fn antiderivative_of_zero_and_constant() {
        let z = PiecewisePolynomial::constant(-1.0, 1.0, 0.0);
        let az = z.antiderivative().unwrap();
        assert_eq!(az.evaluate(0.7).unwrap(), 0.0);

        let half = PiecewisePolynomial::constant(-1.0, 1.0, 0.5);
        let a = half.antiderivative().unwrap();
        for i in 0..=10 {
            let x = -1.0 + 0.2 * i as f64;
            assert_relative_eq!(a.evaluate(x).unwrap(), (x + 1.0) / 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn differentiate_linear_ramp() {
        let ramp = PiecewisePolynomial::from_global_coeffs(-1.0, 1.0, &[0.5, 0.5]).unwrap();
        let d = ramp.differentiate().unwrap();
        assert_relative_eq!(d.evaluate(0.3).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn differentiate_rejects_jumps() {
        let s = unit_step();
        assert!(matches!(s.differentiate(), Err(Error::JumpDifferentiation(x)) if x == 0.0));
    }

    #[test]
    fn differentiate_two_smooth_pieces() {
        // x^2 on [0,1], 2x-1 on [1,2]: continuous, derivative {2x, 2}.
        let p = PiecewisePolynomial::from_global_pieces(
            &[0.0, 1.0, 2.0],
            &[vec![0.0, 0.0, 1.0], vec![-1.0, 2.0]],
        )
        .unwrap();
        assert!(!p.has_jump());
        let d = p.differentiate().unwrap();
        assert_relative_eq!(d.evaluate(0.25).unwrap(), 0.5, epsilon = 1e-13);
        assert_relative_eq!(d.evaluate(1.5).unwrap(), 2.0, epsilon = 1e-13);
    }

    #[test]
    fn derivative_inverts_antiderivative() {
        let p = PiecewisePolynomial::from_global_pieces(
            &[-1.0, 0.2, 1.0],
            &[vec![1.0, -2.0, 3.0], vec![0.76, 1.0, 0.0, 0.5]],
        )
        .unwrap();
        let round = p.antiderivative().unwrap().differentiate().unwrap();
        for i in 0..=100 {
            let x = -1.0 + 0.02 * i as f64;
            assert_relative_eq!(
                round.evaluate(x).unwrap(),
                p.evaluate(x).unwrap(),
                max_relative = 1e-10,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn add_cancels_and_merges_grids() {
        let s = unit_step();
        let z = s.add(&s.scale(-1.0)).unwrap();
        for i in 0..=20 {
            let x = -1.0 + 0.1 * i as f64;
            assert_eq!(z.evaluate(x).unwrap(), 0.0);
        }
        let t = PiecewisePolynomial::step(&[-1.0, 0.5, 1.0], &[0.0, 2.0]).unwrap();
        let sum = s.add(&t).unwrap();
        assert_eq!(sum.evaluate(-0.7).unwrap(), 0.0);
        assert_eq!(sum.evaluate(0.2).unwrap(), 1.0);
        assert_eq!(sum.evaluate(0.8).unwrap(), 3.0);
        assert_eq!(sum.breakpoints().len(), 4);
    }

    #[test]
    fn scale_commutes_with_evaluate() {
        let ramp = PiecewisePolynomial::from_global_coeffs(-1.0, 1.0, &[0.5, 0.5]).unwrap();
        let scaled = ramp.scale(2.0);
        assert_relative_eq!(scaled.evaluate(0.0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn roots_of_shifted_square() {
        let p = PiecewisePolynomial::from_global_coeffs(-1.0, 1.0, &[-0.25, 0.0, 1.0]).unwrap();
        let roots = p.real_roots_on(-1.0, 1.0, TOL);
        assert_eq!(roots.len(), 2);
        assert_relative_eq!(roots[0].0, -0.5, epsilon = 1e-10);
        assert_relative_eq!(roots[1].0, 0.5, epsilon = 1e-10);
        assert_eq!(roots[0].1, RootParity::Odd);
        assert_eq!(roots[1].1, RootParity::Odd);
    }

    #[test]
    fn touching_root_is_even() {
        let p = PiecewisePolynomial::from_global_coeffs(-1.0, 1.0, &[0.0, 0.0, 1.0]).unwrap();
        let roots = p.real_roots_on(-1.0, 1.0, TOL);
        assert_eq!(roots.len(), 1);
        assert_relative_eq!(roots[0].0, 0.0, epsilon = 1e-10);
        assert_eq!(roots[0].1, RootParity::Even);
    }

    #[test]
    fn root_at_interior_breakpoint_reported_once() {
        // Continuous ramp crossing zero exactly at the breakpoint.
        let p = PiecewisePolynomial::from_global_pieces(
            &[-1.0, 0.0, 1.0],
            &[vec![0.0, 1.0], vec![0.0, 2.0]],
        )
        .unwrap();
        let roots = p.real_roots_on(-1.0, 1.0, TOL);
        assert_eq!(roots.len(), 1);
        assert_relative_eq!(roots[0].0, 0.0, epsilon = 1e-10);
        assert_eq!(roots[0].1, RootParity::Odd);
    }

    #[test]
    fn sign_changes_of_step() {
        let s = PiecewisePolynomial::step(&[-1.0, 0.0, 1.0], &[1.0, -1.0]).unwrap();
        let cat = s.sign_changes(TOL);
        assert_eq!(cat.count(), 1);
        assert_eq!(cat.initial_sign, 1);
        assert_relative_eq!(cat.points[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn sign_changes_ignore_even_roots() {
        let p = PiecewisePolynomial::from_global_coeffs(-1.0, 1.0, &[0.0, 0.0, 1.0]).unwrap();
        let cat = p.sign_changes(TOL);
        assert_eq!(cat.count(), 0);
        assert_eq!(cat.initial_sign, 1);
    }

    #[test]
    fn zero_plateau_reports_midpoint_crossing() {
        // +1 on [-1,-0.5), 0 on [-0.5,0.5), -1 on [0.5,1]
        let s = PiecewisePolynomial::step(&[-1.0, -0.5, 0.5, 1.0], &[1.0, 0.0, -1.0]).unwrap();
        let cat = s.sign_changes(TOL);
        assert_eq!(cat.count(), 1);
        assert_relative_eq!(cat.points[0], 0.0, epsilon = 1e-12);
        assert_eq!(cat.initial_sign, 1);
    }

    #[test]
    fn zero_plateau_same_sign_is_not_a_crossing() {
        let s = PiecewisePolynomial::step(&[-1.0, -0.5, 0.5, 1.0], &[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(s.sign_changes(TOL).count(), 0);
    }

    #[test]
    fn global_min_of_square() {
        let p = PiecewisePolynomial::from_global_coeffs(-1.0, 1.0, &[0.0, 0.0, 1.0]).unwrap();
        let (x, v) = p.global_min(-1.0, 1.0).unwrap();
        assert_relative_eq!(x, 0.0, epsilon = 1e-10);
        assert!(v.abs() <= 1e-18);
    }

    #[test]
    fn global_min_of_ramp_is_left_endpoint() {
        let ramp = PiecewisePolynomial::from_global_coeffs(-1.0, 1.0, &[0.5, 0.5]).unwrap();
        let (x, v) = ramp.global_min(-1.0, 1.0).unwrap();
        assert_eq!(x, -1.0);
        assert!(v.abs() <= 1e-15);
    }

    #[test]
    fn global_min_rejects_jumps() {
        let s = unit_step();
        assert!(s.global_min(-1.0, 1.0).is_err());
    }

    #[test]
    fn integral_abs_splits_at_roots() {
        let ramp = PiecewisePolynomial::from_global_coeffs(-1.0, 1.0, &[0.0, 1.0]).unwrap();
        assert_relative_eq!(ramp.integral_abs_on(-1.0, 1.0, TOL).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(ramp.integral_on(-1.0, 1.0).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn dump_json_layout() {
        let s = unit_step();
        let json = s.dump_json();
        assert!(json.starts_with("{\"breakpoints\":["));
        assert!(json.contains("\"pieces\":[["));
        assert!(json.contains("\"jumps\":[1.0000000000000000e0]"));
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["breakpoints"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn terminal_jump_is_respected() {
        // Constant 0 with a jump to 1 at the right endpoint.
        let p = PiecewisePolynomial::from_parts(
            vec![-1.0, 1.0],
            vec![crate::poly::Poly::zero()],
            vec![],
            1.0,
        )
        .unwrap();
        assert_eq!(p.evaluate(1.0).unwrap(), 1.0);
        assert_eq!(p.evaluate_left_limit(1.0).unwrap(), 0.0);
        assert_eq!(p.evaluate(0.999).unwrap(), 0.0);
        // The isolated endpoint value contributes no sign stretch.
        assert_eq!(p.sign_changes(TOL).count(), 0);
    }
}
