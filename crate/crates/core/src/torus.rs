//! Oscillatory-integral deformation of R^d actions evaluated exactly on
//! trigonometric polynomials: the quantum torus calibration of the machinery.
//!
//! On plane waves the double oscillatory integral collapses by delta-function
//! calculus to a pure phase; with the normalization that makes the zero mode
//! a two-sided unit the product is
//!     e_m * e_n = exp(i theta m.Jn) e_{m+n},
//! i.e. the convention constant kappa equals 1 exactly. The regularized
//! Gaussian oracle in the tests re-derives this phase without assuming it.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::math;
use crate::Cx;

/// Convention constant of the mode product phase exp(i kappa theta m.Jn),
/// fixed by requiring e_0 to be the unit; pinned by the regularized-integral
/// golden test.
pub const KAPPA: f64 = 1.0;

/// Lattice mode of the d-torus.
pub type Mode = Vec<i64>;

/// Antisymmetric deformation matrix J in so(R^d); antisymmetry is exact.
#[derive(Clone, Debug)]
pub struct DeformationMatrix {
    d: usize,
    j: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TorusError {
    NotAntisymmetric { row: usize, col: usize },
    DimensionMismatch { expected: usize, got: usize },
}

impl core::fmt::Display for TorusError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TorusError::NotAntisymmetric { row, col } => {
                write!(f, "deformation matrix not antisymmetric at ({row},{col})")
            }
            TorusError::DimensionMismatch { expected, got } => {
                write!(f, "mode dimension {got}, expected {expected}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TorusError {}

impl DeformationMatrix {
    pub fn new(d: usize, entries: &[f64]) -> Result<Self, TorusError> {
        assert_eq!(entries.len(), d * d);
        for r in 0..d {
            for c in 0..d {
                if entries[r * d + c] != -entries[c * d + r] {
                    return Err(TorusError::NotAntisymmetric { row: r, col: c });
                }
            }
        }
        Ok(DeformationMatrix {
            d,
            j: entries.to_vec(),
        })
    }

    /// Standard symplectic J for d = 2: [[0, 1], [-1, 0]].
    pub fn standard2() -> Self {
        DeformationMatrix::new(2, &[0.0, 1.0, -1.0, 0.0]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// m . (J n) over the lattice.
    pub fn pairing(&self, m: &Mode, n: &Mode) -> f64 {
        let mut s = 0.0;
        for r in 0..self.d {
            for c in 0..self.d {
                s += m[r] as f64 * self.j[r * self.d + c] * n[c] as f64;
            }
        }
        s
    }
}

/// Finitely supported mode expansion sum_m c_m e_m of a function on T^d.
#[derive(Clone, Debug, Default)]
pub struct TrigPolynomial {
    pub coef: BTreeMap<Mode, Cx>,
}

impl TrigPolynomial {
    pub fn zero() -> Self {
        TrigPolynomial {
            coef: BTreeMap::new(),
        }
    }

    pub fn one(d: usize) -> Self {
        let m: Mode = core::iter::repeat(0).take(d).collect();
        Self::monomial(m, Cx::new(1.0, 0.0))
    }

    pub fn monomial(m: Mode, c: Cx) -> Self {
        let mut coef = BTreeMap::new();
        coef.insert(m, c);
        TrigPolynomial { coef }
    }

    pub fn add_term(&mut self, m: Mode, c: Cx) {
        *self.coef.entry(m).or_insert(Cx::new(0.0, 0.0)) += c;
    }

    pub fn add(&self, o: &TrigPolynomial) -> TrigPolynomial {
        let mut out = self.clone();
        for (m, c) in &o.coef {
            *out.coef.entry(m.clone()).or_insert(Cx::new(0.0, 0.0)) += *c;
        }
        out
    }

    pub fn sub(&self, o: &TrigPolynomial) -> TrigPolynomial {
        self.add(&o.scale(Cx::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Cx) -> TrigPolynomial {
        TrigPolynomial {
            coef: self.coef.iter().map(|(m, c)| (m.clone(), *c * s)).collect(),
        }
    }

    /// Involution: coefficient of m maps to the conjugate at -m.
    pub fn star(&self) -> TrigPolynomial {
        TrigPolynomial {
            coef: self
                .coef
                .iter()
                .map(|(m, c)| (m.iter().map(|k| -k).collect(), c.conj()))
                .collect(),
        }
    }

    /// Normalized integral over the torus: the zero-mode coefficient.
    pub fn trace(&self) -> Cx {
        for (m, c) in &self.coef {
            if m.iter().all(|&k| k == 0) {
                return *c;
            }
        }
        Cx::new(0.0, 0.0)
    }

    pub fn sup_coef_diff(&self, o: &TrigPolynomial) -> f64 {
        let mut m = 0.0;
        for (k, c) in &self.coef {
            let d = (*c - o.coef.get(k).copied().unwrap_or(Cx::new(0.0, 0.0))).norm();
            m = math::fmax(m, d);
        }
        for (k, c) in &o.coef {
            if !self.coef.contains_key(k) {
                m = math::fmax(m, c.norm());
            }
        }
        m
    }
}

/// Phase and output mode of e_m * e_n: (exp(i kappa theta m.Jn), m + n).
pub fn mode_product(
    m: &Mode,
    n: &Mode,
    theta: f64,
    j: &DeformationMatrix,
) -> Result<(Cx, Mode), TorusError> {
    if m.len() != j.dim() || n.len() != j.dim() {
        return Err(TorusError::DimensionMismatch {
            expected: j.dim(),
            got: if m.len() != j.dim() { m.len() } else { n.len() },
        });
    }
    let ph = KAPPA * theta * j.pairing(m, n);
    let phase = Cx::new(math::cos(ph), math::sin(ph));
    let sum = m.iter().zip(n.iter()).map(|(a, b)| a + b).collect();
    Ok((phase, sum))
}

/// Bilinear extension of the mode product; exact (no quadrature).
pub fn star_theta(
    a: &TrigPolynomial,
    b: &TrigPolynomial,
    theta: f64,
    j: &DeformationMatrix,
) -> Result<TrigPolynomial, TorusError> {
    let mut out = TrigPolynomial::zero();
    for (m, cm) in &a.coef {
        for (n, cn) in &b.coef {
            let (phase, sum) = mode_product(m, n, theta, j)?;
            *out.coef.entry(sum).or_insert(Cx::new(0.0, 0.0)) += *cm * *cn * phase;
        }
    }
    Ok(out)
}

/// Exact Poisson bracket on modes: {e_m, e_n} = -(m.Jn) e_{m+n}, the bracket
/// the product deforms along. Mirrors the sampled-grid bracket in `poisson`.
pub fn poisson_bracket_modes(
    a: &TrigPolynomial,
    b: &TrigPolynomial,
    j: &DeformationMatrix,
) -> TrigPolynomial {
    let mut out = TrigPolynomial::zero();
    for (m, cm) in &a.coef {
        for (n, cn) in &b.coef {
            let p = -j.pairing(m, n);
            if p != 0.0 {
                let sum: Mode = m.iter().zip(n.iter()).map(|(x, y)| x + y).collect();
                *out.coef.entry(sum).or_insert(Cx::new(0.0, 0.0)) += *cm * *cn * p;
            }
        }
    }
    out
}

/// Result of the first-order calibration: the fitted ratio between the
/// theta-slope of the star commutator and the Poisson bracket.
#[derive(Clone, Copy, Debug)]
pub struct FirstOrderFit {
    /// Fitted complex ratio (expected -2i kappa).
    pub ratio: Cx,
    /// Largest deviation of per-mode ratios from the fit.
    pub mode_spread: f64,
    /// Largest deviation across the theta refits.
    pub theta_spread: f64,
}

/// Fit the leading linear-in-theta term of the star commutator against the
/// Poisson bracket by Richardson extrapolation over pairs of small thetas.
pub fn first_order_check(
    a: &TrigPolynomial,
    b: &TrigPolynomial,
    j: &DeformationMatrix,
) -> Result<FirstOrderFit, TorusError> {
    let br = poisson_bracket_modes(a, b, j);
    let thetas = [1e-1, 1e-2, 1e-3, 1e-4];
    let mut fits: Vec<(f64, f64, f64)> = Vec::new();
    for w in 0..thetas.len() - 1 {
        let (t1, t2) = (thetas[w], thetas[w + 1]);
        let c1 = commutator(a, b, t1, j)?;
        let c2 = commutator(a, b, t2, j)?;
        // Richardson: slope = (t1^2 (c2/t2) - t2^2 (c1/t1)) / (t1^2 - t2^2)
        let s1 = t1 * t1 / (t1 * t1 - t2 * t2);
        let s2 = t2 * t2 / (t1 * t1 - t2 * t2);
        let num = c2
            .scale(Cx::new(s1 / t2, 0.0))
            .sub(&c1.scale(Cx::new(s2 / t1, 0.0)));
        let mut ratio = Cx::new(0.0, 0.0);
        let mut count = 0.0;
        let mut ratios: Vec<Cx> = Vec::new();
        for (m, c) in &br.coef {
            if c.norm() > 1e-12 {
                let slope = num.coef.get(m).copied().unwrap_or(Cx::new(0.0, 0.0));
                let rr = slope / c;
                ratios.push(rr);
                ratio += rr;
                count += 1.0;
            }
        }
        if count == 0.0 {
            // bracket identically zero: the commutator must vanish too
            let z1 = c1.sup_coef_diff(&TrigPolynomial::zero());
            return Ok(FirstOrderFit {
                ratio: Cx::new(0.0, 0.0),
                mode_spread: z1,
                theta_spread: 0.0,
            });
        }
        ratio /= count;
        let mut spread = 0.0;
        for rr in &ratios {
            spread = math::fmax(spread, (rr - ratio).norm());
        }
        fits.push((ratio.re, ratio.im, spread));
    }
    let last = fits[fits.len() - 1];
    let mut theta_spread = 0.0;
    // only the small-theta refits are inside the asymptotic regime
    for f in &fits[1..] {
        theta_spread = math::fmax(theta_spread, math::hypot(f.0 - last.0, f.1 - last.1));
    }
    Ok(FirstOrderFit {
        ratio: Cx::new(last.0, last.1),
        mode_spread: last.2,
        theta_spread,
    })
}

fn commutator(
    a: &TrigPolynomial,
    b: &TrigPolynomial,
    theta: f64,
    j: &DeformationMatrix,
) -> Result<TrigPolynomial, TorusError> {
    Ok(star_theta(a, b, theta, j)?.sub(&star_theta(b, a, theta, j)?))
}
