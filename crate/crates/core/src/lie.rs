//! sl(2,R), SL(2,R) and its universal cover.
//!
//! Group elements live in the global Iwasawa chart (phi, n, a) in R^3 with
//! g = K(phi) N(n) A(a), K(phi) = exp(phi(E-F)), N(n) upper unipotent and
//! A(a) = exp(a H0), H0 = diag(1/2,-1/2). The chart is a diffeomorphism onto
//! the universal cover; phi carries the winding and is never reduced mod 2pi.
//!
//! Products are computed on the matrix projection; the winding of the result
//! follows from the fact that left multiplication by an upper-triangular
//! matrix with positive diagonal moves the principal Iwasawa angle by less
//! than pi, so the lift of the K-angle is recovered exactly from principal
//! data. A step-by-step path-tracking lift is kept in the test suite as an
//! independent oracle for this cocycle.

use crate::mat2::{self, Mat2};
use crate::math;

pub const PI: f64 = core::f64::consts::PI;

/// Element of sl(2,R) in the basis H0 = diag(1/2,-1/2), E (upper nilpotent),
/// F (lower nilpotent); brackets [H0,E] = E, [H0,F] = -F, [E,F] = H0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgebraVector {
    pub h: f64,
    pub e: f64,
    pub f: f64,
}

impl AlgebraVector {
    pub const ZERO: AlgebraVector = AlgebraVector::new(0.0, 0.0, 0.0);
    pub const H0: AlgebraVector = AlgebraVector::new(1.0, 0.0, 0.0);
    pub const E: AlgebraVector = AlgebraVector::new(0.0, 1.0, 0.0);
    pub const F: AlgebraVector = AlgebraVector::new(0.0, 0.0, 1.0);

    pub const fn new(h: f64, e: f64, f: f64) -> Self {
        AlgebraVector { h, e, f }
    }

    pub fn to_matrix(self) -> Mat2 {
        Mat2::new(0.5 * self.h, self.e, self.f, -0.5 * self.h)
    }

    pub fn from_matrix(m: Mat2) -> Self {
        // Traceless part; h from the diagonal, e/f off-diagonal.
        AlgebraVector::new(m.m11 - m.m22, m.m12, m.m21)
    }

    pub fn add(self, o: Self) -> Self {
        AlgebraVector::new(self.h + o.h, self.e + o.e, self.f + o.f)
    }

    pub fn sub(self, o: Self) -> Self {
        AlgebraVector::new(self.h - o.h, self.e - o.e, self.f - o.f)
    }

    pub fn scale(self, s: f64) -> Self {
        AlgebraVector::new(self.h * s, self.e * s, self.f * s)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(self) -> f64 {
        math::fmax(math::abs(self.h), math::fmax(math::abs(self.e), math::abs(self.f)))
    }
}

/// Lie bracket, closed form in coefficients. In this (matrix-unit) basis the
/// structure constants read [H0,E] = E, [H0,F] = -F, [E,F] = 2 H0; the factor
/// 2 is the basis-scaling constant asserted by `bracket_closure_scale`.
pub fn bracket(x: AlgebraVector, y: AlgebraVector) -> AlgebraVector {
    AlgebraVector::new(
        2.0 * (x.e * y.f - x.f * y.e),
        x.h * y.e - x.e * y.h,
        x.f * y.h - x.h * y.f,
    )
}

/// The basis scaling of the bracket closure: [E, F] = s H0 with s = 2 for
/// the matrix-unit basis. Asserted at startup by the verification suite.
pub const BRACKET_CLOSURE_SCALE: f64 = 2.0;

/// Killing form beta(X,Y) = 4 tr(XY). This is the true Killing form of
/// sl(2,R): it equals the trace form of the adjoint representation.
/// beta(H0,H0) = 2, beta(E,F) = 4, beta(E,E) = beta(F,F) = 0.
pub fn killing_form(x: AlgebraVector, y: AlgebraVector) -> f64 {
    2.0 * x.h * y.h + 4.0 * (x.e * y.f + x.f * y.e)
}

/// Point of the universal cover of SL(2,R) in global Iwasawa coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    /// Lifted K-angle (winding tracked, never reduced).
    pub phi: f64,
    /// N-parameter.
    pub n: f64,
    /// A-parameter (coefficient of H0: A(a) = diag(e^{a/2}, e^{-a/2})).
    pub a: f64,
}

pub const IDENTITY: GroupElement = GroupElement {
    phi: 0.0,
    n: 0.0,
    a: 0.0,
};

/// Iwasawa factors of g = K(k) N(n) A(a); on the universal cover the chart
/// itself realizes the decomposition, so `decompose` is exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IwasawaFactors {
    pub k: f64,
    pub n: f64,
    pub a: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LieError {
    /// `log_map` called outside its principal domain.
    LogOutsideDomain { phi: f64, trace: f64 },
}

impl core::fmt::Display for LieError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LieError::LogOutsideDomain { phi, trace } => write!(
                f,
                "log_map outside principal domain (phi = {phi}, trace = {trace}); need |phi| < pi and trace > -2"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LieError {}

fn wrap_pm_pi(x: f64) -> f64 {
    x - 2.0 * PI * math::round(x / (2.0 * PI))
}

impl GroupElement {
    pub const fn new(phi: f64, n: f64, a: f64) -> Self {
        GroupElement { phi, n, a }
    }

    /// Matrix projection to SL(2,R) (winding forgotten).
    pub fn to_matrix(self) -> Mat2 {
        mat2::kmat(self.phi).mul(mat2::nmat(self.n)).mul(mat2::amat(self.a))
    }

    /// Element with principal angle; the lift closest to the identity sheet.
    pub fn from_matrix_principal(m: Mat2) -> Self {
        let (phi, n, a) = mat2::iwasawa_kna_principal(m);
        GroupElement::new(phi, n, a)
    }

    pub fn coord_dist(self, o: GroupElement) -> f64 {
        math::fmax(
            math::abs(self.phi - o.phi),
            math::fmax(math::abs(self.n - o.n), math::abs(self.a - o.a)),
        )
    }

    /// Chart distance relative to the coordinate scale; the N-coordinate of a
    /// product grows like e^{|a|}, so identities hold relatively, not
    /// absolutely, in this chart.
    pub fn rel_dist(self, o: GroupElement) -> f64 {
        self.coord_dist(o) / (1.0 + math::fmax(self.coord_norm(), o.coord_norm()))
    }

    pub fn coord_norm(self) -> f64 {
        math::sqrt(self.phi * self.phi + self.n * self.n + self.a * self.a)
    }

    /// True for exact center representatives: n = a = 0 and phi in pi Z.
    pub fn is_central_exact(self, tol: f64) -> bool {
        math::abs(self.n) < tol
            && math::abs(self.a) < tol
            && math::abs(wrap_pm_pi(self.phi)) < tol.max(1e-12)
            || (math::abs(self.n) < tol
                && math::abs(self.a) < tol
                && math::abs(math::abs(wrap_pm_pi(self.phi)) - PI) < tol.max(1e-12))
    }
}

/// The k-th center element: lift of (-1)^k I, coordinates (k pi, 0, 0).
pub fn center_element(k: i64) -> GroupElement {
    GroupElement::new(k as f64 * PI, 0.0, 0.0)
}

/// Lift of left multiplication by an upper-triangular positive matrix `p`:
/// the principal Iwasawa angle moves by strictly less than pi, so the lifted
/// angle of p*g is phi_g plus that principal increment.
fn lmul_upper_positive(p: Mat2, g: GroupElement) -> GroupElement {
    let m = g.to_matrix();
    let pm = p.mul(m);
    let (th_pm, n, a) = mat2::iwasawa_kna_principal(pm);
    let th_m = math::atan2(-m.m21, m.m11);
    let delta = wrap_pm_pi(th_pm - th_m);
    GroupElement::new(g.phi + delta, n, a)
}

/// Group law of the universal cover.
pub fn multiply(g1: GroupElement, g2: GroupElement) -> GroupElement {
    let p1 = mat2::nmat(g1.n).mul(mat2::amat(g1.a));
    let h = lmul_upper_positive(p1, g2);
    GroupElement::new(g1.phi + h.phi, h.n, h.a)
}

pub fn inverse(g: GroupElement) -> GroupElement {
    // g^{-1} = (NA)^{-1} K(-phi); (NA)^{-1} is upper triangular positive.
    let p = mat2::nmat(g.n).mul(mat2::amat(g.a)).inv_sl2();
    lmul_upper_positive(p, GroupElement::new(-g.phi, 0.0, 0.0))
}

/// Exponential map sl(2,R) -> universal cover, with the lift accumulated by
/// scaling and squaring through the exact group law.
pub fn exp_map(x: AlgebraVector) -> GroupElement {
    let norm = x.max_abs();
    if norm == 0.0 {
        return IDENTITY;
    }
    // Halve until the principal angle of the factor is safely below pi/2.
    let mut k = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.4 {
        scale *= 0.5;
        k += 1;
    }
    let mut g = GroupElement::from_matrix_principal(x.scale(scale).to_matrix().exp_traceless());
    for _ in 0..k {
        g = multiply(g, g);
    }
    g
}

/// Principal logarithm; defined for |phi| < pi and matrix trace > -2.
pub fn log_map(g: GroupElement) -> Result<AlgebraVector, LieError> {
    let m = g.to_matrix();
    let t = m.trace();
    if math::abs(g.phi) >= PI || t <= -2.0 {
        return Err(LieError::LogOutsideDomain { phi: g.phi, trace: t });
    }
    let x = m.log_sl2().ok_or(LieError::LogOutsideDomain { phi: g.phi, trace: t })?;
    Ok(AlgebraVector::from_matrix(x))
}

/// Iwasawa decomposition g = K N A. Global on the cover; in this chart it is
/// the identity map, which the QR oracle in the tests confirms.
pub fn iwasawa_decompose(g: GroupElement) -> IwasawaFactors {
    IwasawaFactors {
        k: g.phi,
        n: g.n,
        a: g.a,
    }
}

pub fn iwasawa_compose(f: IwasawaFactors) -> GroupElement {
    GroupElement::new(f.k, f.n, f.a)
}

/// The involutive exterior automorphism fixing A pointwise, realized as
/// conjugation by diag(1,-1); on the chart it is (phi, n, a) -> (-phi, -n, a).
pub fn sigma(g: GroupElement) -> GroupElement {
    GroupElement::new(-g.phi, -g.n, g.a)
}

pub fn sigma_alg(x: AlgebraVector) -> AlgebraVector {
    AlgebraVector::new(x.h, -x.e, -x.f)
}

/// Twisted conjugation tau_g(x) = g x sigma(g^{-1}).
pub fn twisted_conjugate(g: GroupElement, x: GroupElement) -> GroupElement {
    multiply(multiply(g, x), sigma(inverse(g)))
}

/// Adjoint action Ad(g) X; factors through the matrix projection.
pub fn adjoint(g: GroupElement, x: AlgebraVector) -> AlgebraVector {
    let m = g.to_matrix();
    AlgebraVector::from_matrix(m.mul(x.to_matrix()).mul(m.inv_sl2()))
}
