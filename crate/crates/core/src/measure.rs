//! Finite signed measures of bounded variation on a compact interval:
//! point masses plus piecewise-polynomial densities, with their distribution
//! functions and (truncated) moments in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::PiecewisePolynomial;
use crate::poly::Poly;

/// Atoms closer than this (relative to the support width) are merged.
const ATOM_MERGE_REL: f64 = 1e-14;
/// Density polynomials above this degree are rejected; keeps root isolation
/// downstream well-conditioned.
pub const MAX_DENSITY_DEGREE: usize = 8;

/// A signed point mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// Absolutely continuous part on `[lo, hi]` with density
/// `q(x) = coeffs[0] + coeffs[1] x + ...` in the global variable.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityPiece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl DensityPiece {
    fn poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    /// `\int_lo^hi t^k q(t) dt`, exact.
    fn integral_pow(&self, k: u32) -> f64 {
        self.integral_pow_from(self.lo, k)
    }

    /// `\int_from^hi t^k q(t) dt`, exact.
    fn integral_pow_from(&self, from: f64, k: u32) -> f64 {
        let from = from.max(self.lo);
        if from >= self.hi {
            return 0.0;
        }
        let mut acc = 0.0;
        for (j, &c) in self.coeffs.iter().enumerate() {
            let p = k + j as u32 + 1;
            acc += c * (self.hi.powi(p as i32) - from.powi(p as i32)) / p as f64;
        }
        acc
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// A finite signed measure on `[a, b]`: sorted atoms plus density pieces with
/// pairwise-disjoint interiors. Values are immutable after construction and
/// all operations are pure, so sharing across threads is safe.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedMeasure {
    support: (f64, f64),
    atoms: Vec<Atom>,
    pieces: Vec<DensityPiece>,
}

impl SignedMeasure {
    pub fn new(support: (f64, f64), atoms: Vec<Atom>, pieces: Vec<DensityPiece>) -> Result<Self> {
        let (a, b) = support;
        if !a.is_finite() || !b.is_finite() || !(a < b) {
            return Err(Error::InvalidMeasure(format!("bad support [{a}, {b}]")));
        }
        let span = b - a;
        let slack = 1e-12 * span;
        for at in &atoms {
            if !at.location.is_finite() || !at.weight.is_finite() {
                return Err(Error::InvalidMeasure("non-finite atom".into()));
            }
            if at.location < a - slack || at.location > b + slack {
                return Err(Error::InvalidMeasure(format!(
                    "atom at {} outside [{a}, {b}]",
                    at.location
                )));
            }
        }
        let mut atoms: Vec<Atom> = atoms
            .into_iter()
            .filter(|at| at.weight != 0.0)
            .map(|at| Atom { location: at.location.clamp(a, b), weight: at.weight })
            .collect();
        atoms.sort_by(|x, y| x.location.partial_cmp(&y.location).unwrap());
        let merge = ATOM_MERGE_REL * span;
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for at in atoms {
            match merged.last_mut() {
                Some(prev) if (at.location - prev.location).abs() <= merge => {
                    prev.weight += at.weight;
                }
                _ => merged.push(at),
            }
        }
        merged.retain(|at| at.weight != 0.0);

        let mut pieces = pieces;
        pieces.sort_by(|x, y| x.lo.partial_cmp(&y.lo).unwrap());
        for p in &pieces {
            if !(p.lo < p.hi) {
                return Err(Error::InvalidMeasure(format!("empty density piece [{}, {}]", p.lo, p.hi)));
            }
            if p.lo < a - slack || p.hi > b + slack {
                return Err(Error::InvalidMeasure("density piece outside support".into()));
            }
            if p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidMeasure("non-finite density coefficient".into()));
            }
            if p.coeffs.len() > MAX_DENSITY_DEGREE + 1 {
                return Err(Error::DegreeOverflow(p.coeffs.len() - 1, MAX_DENSITY_DEGREE));
            }
        }
        for w in pieces.windows(2) {
            if w[1].lo < w[0].hi - slack {
                return Err(Error::InvalidMeasure("density pieces overlap".into()));
            }
        }
        Ok(SignedMeasure { support, atoms: merged, pieces })
    }

    /// Purely atomic measure from `(location, weight)` pairs.
    pub fn from_atoms(support: (f64, f64), atoms: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            support,
            atoms.iter().map(|&(location, weight)| Atom { location, weight }).collect(),
            Vec::new(),
        )
    }

    /// Unit point mass at `x`.
    pub fn dirac(support: (f64, f64), x: f64) -> Result<Self> {
        Self::from_atoms(support, &[(x, 1.0)])
    }

    /// Uniform probability measure on `[a, b]` (density `1/(b-a)`).
    pub fn uniform(a: f64, b: f64) -> Self {
        SignedMeasure {
            support: (a, b),
            atoms: Vec::new(),
            pieces: vec![DensityPiece { lo: a, hi: b, coeffs: vec![1.0 / (b - a)] }],
        }
    }

    /// Empty (zero) measure.
    pub fn empty(support: (f64, f64)) -> Result<Self> {
        Self::new(support, Vec::new(), Vec::new())
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density_pieces(&self) -> &[DensityPiece] {
        &self.pieces
    }

    /// Total mass; equals `F(b)` of the induced distribution function.
    pub fn total_mass(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.weight).sum();
        let densities: f64 = self.pieces.iter().map(|p| p.integral_pow(0)).sum();
        atoms + densities
    }

    /// Total variation: `sum |weights| + int |density|`.
    pub fn total_variation(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.weight.abs()).sum();
        let mut dens = 0.0;
        for p in &self.pieces {
            let poly = p.poly();
            let mut cuts = vec![p.lo, p.hi];
            cuts.extend(crate::poly::distinct_roots_in(&poly, p.lo, p.hi));
            cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for w in cuts.windows(2) {
                let seg = DensityPiece { lo: w[0], hi: w[1], coeffs: p.coeffs.clone() };
                dens += seg.integral_pow(0).abs();
            }
        }
        atoms + dens
    }

    /// `\int x^k d\mu`, exact for polynomial pieces.
    pub fn moment(&self, k: u32) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .map(|a| a.weight * a.location.powi(k as i32))
            .sum();
        let densities: f64 = self.pieces.iter().map(|p| p.integral_pow(k)).sum();
        atoms + densities
    }

    /// Truncated power moment `\int (t - x)_+^n d\mu(t)`.
    ///
    /// Callers must keep `x` within the support and `n >= 1`; both are
    /// contract violations rather than runtime errors.
    pub fn truncated_moment(&self, x: f64, n: u32) -> f64 {
        assert!(n >= 1, "truncated_moment needs n >= 1");
        let (a, b) = self.support;
        debug_assert!(
            x >= a - 1e-9 * (b - a) && x <= b + 1e-9 * (b - a),
            "abscissa {x} outside support"
        );
        let mut acc = 0.0;
        for at in &self.atoms {
            let d = at.location - x;
            if d > 0.0 {
                acc += at.weight * d.powi(n as i32);
            }
        }
        for p in &self.pieces {
            if p.hi <= x {
                continue;
            }
            let from = p.lo.max(x);
            // Expand (t - x)^n binomially into plain power integrals.
            let mut piece_acc = 0.0;
            for k in 0..=n {
                piece_acc += binomial(n, k)
                    * (-x).powi((n - k) as i32)
                    * p.integral_pow_from(from, k);
            }
            acc += piece_acc;
        }
        acc
    }

    /// Distribution function `F(x) = mu([a, x])` as a piecewise polynomial:
    /// right-continuous, jumping exactly at atom locations. An atom at the
    /// right endpoint shows up as the terminal jump, so `F(b)` always equals
    /// the total mass.
    pub fn cdf(&self) -> PiecewisePolynomial {
        let (a, b) = self.support;
        let mut grid = vec![a, b];
        grid.extend(self.atoms.iter().map(|at| at.location));
        for p in &self.pieces {
            grid.push(p.lo);
            grid.push(p.hi);
        }
        grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
        grid.dedup_by(|next, prev| (*next - *prev).abs() <= ATOM_MERGE_REL * (b - a));
        let m = grid.len() - 1;
        grid[0] = a;
        grid[m] = b;

        let merge = ATOM_MERGE_REL * (b - a);
        let mut pieces_out: Vec<Poly> = Vec::with_capacity(m);
        let mut jump_flags: Vec<bool> = Vec::with_capacity(m.saturating_sub(1));
        let mut atom_idx = 0usize;
        let mut atom_sum = 0.0f64;
        let mut density_base = 0.0f64;

        for i in 0..m {
            let lo = grid[i];
            let hi = grid[i + 1];
            // Atoms at `lo` enter the running sum: right continuity.
            while atom_idx < self.atoms.len() && self.atoms[atom_idx].location <= lo + merge {
                atom_sum += self.atoms[atom_idx].weight;
                atom_idx += 1;
            }
            let mid = 0.5 * (lo + hi);
            let covering = self.pieces.iter().find(|p| p.lo <= mid && mid < p.hi);
            let base = Poly::constant(atom_sum + density_base);
            let piece = match covering {
                Some(p) => {
                    // Local antiderivative of the density, zero at `lo`.
                    let local = p.poly().shifted(lo).antiderivative();
                    density_base += local.eval(hi - lo);
                    base.add(&local)
                }
                None => base,
            };
            pieces_out.push(piece);
        }
        for bp in &grid[1..m] {
            jump_flags.push(self.atoms.iter().any(|at| (at.location - bp).abs() <= merge));
        }
        PiecewisePolynomial::from_parts(grid, pieces_out, jump_flags, self.total_mass())
            .expect("cdf construction preserves invariants")
    }

    /// Image measure under `x -> scale * x + shift`; weights are unchanged
    /// and densities transform by exact change of variables, so all moments
    /// transform consistently.
    pub fn pushforward_affine(&self, scale: f64, shift: f64) -> Result<SignedMeasure> {
        if scale == 0.0 {
            return Err(Error::ZeroScale);
        }
        let (a, b) = self.support;
        let (na, nb) = if scale > 0.0 {
            (scale * a + shift, scale * b + shift)
        } else {
            (scale * b + shift, scale * a + shift)
        };
        let atoms = self
            .atoms
            .iter()
            .map(|at| Atom { location: scale * at.location + shift, weight: at.weight })
            .collect();
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                // density_new(y) = density((y - shift) / scale) / |scale|
                let composed = p
                    .poly()
                    .compose_linear(1.0 / scale, -shift / scale)
                    .scale(1.0 / scale.abs());
                let (lo, hi) = if scale > 0.0 {
                    (scale * p.lo + shift, scale * p.hi + shift)
                } else {
                    (scale * p.hi + shift, scale * p.lo + shift)
                };
                DensityPiece { lo, hi, coeffs: composed.c }
            })
            .collect();
        SignedMeasure::new((na, nb), atoms, pieces)
    }
}

/// JSON measure spec:
/// `{"support":[a,b], "atoms":[{"x":..,"w":..}], "density":[{"from":..,"to":..,"coeffs":[..]}]}`.
/// Only `support` is required; missing arrays mean empty.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub support: [f64; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<AtomSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub density: Vec<DensitySpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomSpec {
    pub x: f64,
    pub w: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensitySpec {
    pub from: f64,
    pub to: f64,
    pub coeffs: Vec<f64>,
}

impl MeasureSpec {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::ParseError(e.to_string()))
    }

    pub fn to_measure(&self) -> Result<SignedMeasure> {
        SignedMeasure::new(
            (self.support[0], self.support[1]),
            self.atoms.iter().map(|a| Atom { location: a.x, weight: a.w }).collect(),
            self.density
                .iter()
                .map(|d| DensityPiece { lo: d.from, hi: d.to, coeffs: d.coeffs.clone() })
                .collect(),
        )
    }

    pub fn from_measure(m: &SignedMeasure) -> Self {
        let (a, b) = m.support();
        MeasureSpec {
            support: [a, b],
            atoms: m.atoms().iter().map(|at| AtomSpec { x: at.location, w: at.weight }).collect(),
            density: m
                .density_pieces()
                .iter()
                .map(|p| DensitySpec { from: p.lo, to: p.hi, coeffs: p.coeffs.clone() })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure spec serialization cannot fail")
    }
}
