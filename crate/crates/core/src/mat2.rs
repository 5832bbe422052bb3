//! Real 2x2 matrices — the defining representation of SL(2,R) and sl(2,R).

use crate::math;

/// Row-major 2x2 real matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

pub const ID: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

impl Mat2 {
    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Mat2 { m11, m12, m21, m22 }
    }

    pub fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }

    pub fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 + o.m11,
            self.m12 + o.m12,
            self.m21 + o.m21,
            self.m22 + o.m22,
        )
    }

    pub fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 - o.m11,
            self.m12 - o.m12,
            self.m21 - o.m21,
            self.m22 - o.m22,
        )
    }

    pub fn scale(self, s: f64) -> Mat2 {
        Mat2::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    pub fn det(self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(self) -> f64 {
        self.m11 + self.m22
    }

    /// Inverse assuming det = 1 (SL(2,R) elements); exact adjugate.
    pub fn inv_sl2(self) -> Mat2 {
        Mat2::new(self.m22, -self.m12, -self.m21, self.m11)
    }

    pub fn inv(self) -> Mat2 {
        let d = self.det();
        Mat2::new(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d)
    }

    /// Commutator [self, o].
    pub fn comm(self, o: Mat2) -> Mat2 {
        self.mul(o).sub(o.mul(self))
    }

    /// Frobenius norm, used for residual reporting.
    pub fn frob(self) -> f64 {
        math::sqrt(
            self.m11 * self.m11 + self.m12 * self.m12 + self.m21 * self.m21 + self.m22 * self.m22,
        )
    }

    pub fn max_abs_diff(self, o: Mat2) -> f64 {
        let d = self.sub(o);
        math::fmax(
            math::fmax(math::abs(d.m11), math::abs(d.m12)),
            math::fmax(math::abs(d.m21), math::abs(d.m22)),
        )
    }

    /// Matrix exponential of a traceless matrix, closed form:
    /// with q = det(X), exp(X) = c I + s X where
    /// q < 0: c = cosh r, s = sinh(r)/r, r = sqrt(-q)
    /// q > 0: c = cos r,  s = sin(r)/r,  r = sqrt(q)
    /// q = 0: c = 1, s = 1.
    pub fn exp_traceless(self) -> Mat2 {
        let q = self.det();
        let (c, s) = if q < -1e-300 {
            let r = math::sqrt(-q);
            (math::cosh(r), math::sinh(r) / r)
        } else if q > 1e-300 {
            let r = math::sqrt(q);
            (math::cos(r), math::sin(r) / r)
        } else {
            (1.0, 1.0)
        };
        Mat2::new(
            c + s * self.m11,
            s * self.m12,
            s * self.m21,
            c + s * self.m22,
        )
    }

    /// Principal logarithm of an SL(2,R) matrix with trace > -2, inverse of
    /// `exp_traceless` on its principal domain. Returns `None` outside.
    pub fn log_sl2(self) -> Option<Mat2> {
        let t = self.trace();
        if t <= -2.0 {
            return None;
        }
        // exp(X) = c I + s X with c^2 + q s^2 = 1, trace = 2c.
        let c = 0.5 * t;
        let x = self.sub(ID.scale(c)); // = s X
        if c >= 1.0 {
            // hyperbolic or identity: c = cosh r
            let r = math::acosh(math::fmax(c, 1.0));
            let s = if r < 1e-8 { 1.0 } else { math::sinh(r) / r };
            Some(x.scale(1.0 / s))
        } else {
            // elliptic: c = cos r with r in (0, pi)
            let r = math::atan2(math::sqrt(math::fmax(1.0 - c * c, 0.0)), c);
            let s = if r < 1e-8 { 1.0 } else { math::sin(r) / r };
            Some(x.scale(1.0 / s))
        }
    }
}

/// Rotation K(phi) = exp(phi (E - F)).
pub fn kmat(phi: f64) -> Mat2 {
    let (c, s) = (math::cos(phi), math::sin(phi));
    Mat2::new(c, s, -s, c)
}

/// Upper unipotent N(n).
pub fn nmat(n: f64) -> Mat2 {
    Mat2::new(1.0, n, 0.0, 1.0)
}

/// Lower unipotent Nbar(n).
pub fn nbarmat(n: f64) -> Mat2 {
    Mat2::new(1.0, 0.0, n, 1.0)
}

/// Split Cartan A(c) = exp(c H0) = diag(e^{c/2}, e^{-c/2}) with
/// H0 = diag(1/2, -1/2).
pub fn amat(c: f64) -> Mat2 {
    Mat2::new(math::exp(0.5 * c), 0.0, 0.0, math::exp(-0.5 * c))
}

/// Principal Iwasawa data of an SL(2,R) matrix: g = K(phi) N(n) A(c) with
/// phi in (-pi, pi]. The decomposition reads the first column of g, which
/// equals e^{c/2} (cos phi, -sin phi).
pub fn iwasawa_kna_principal(g: Mat2) -> (f64, f64, f64) {
    let r = math::hypot(g.m11, g.m21);
    let phi = math::atan2(-g.m21, g.m11);
    let c = 2.0 * math::ln(r);
    // K(-phi) g = N(n) A(c); read n from the (1,2) entry: n * e^{-c/2}.
    let (cp, sp) = (math::cos(phi), math::sin(phi));
    let top12 = cp * g.m12 - sp * g.m22;
    let n = top12 * math::exp(0.5 * c);
    (phi, n, c)
}

/// Principal decomposition g = K(phi) Nbar(u) A(c) (lower-unipotent flavour),
/// phi in (-pi, pi]. Reads the second column: e^{-c/2} (sin phi, cos phi).
pub fn iwasawa_knbara_principal(g: Mat2) -> (f64, f64, f64) {
    let r = math::hypot(g.m12, g.m22);
    let phi = math::atan2(g.m12, g.m22);
    let c = -2.0 * math::ln(r);
    let (cp, sp) = (math::cos(phi), math::sin(phi));
    // K(-phi) g = Nbar(u) A(c); read u from the (2,1) entry: u * e^{c/2}.
    let bot21 = sp * g.m11 + cp * g.m21;
    let u = bot21 * math::exp(-0.5 * c);
    (phi, u, c)
}

/// Decomposition g = A(c) N(n) K(phi) with phi in (-pi, pi] ("ANK order").
/// Reads the bottom row of g, which equals e^{-c/2} (-sin phi, cos phi).
pub fn iwasawa_ank_principal(g: Mat2) -> (f64, f64, f64) {
    let r = math::hypot(g.m21, g.m22);
    let phi = math::atan2(-g.m21, g.m22);
    let c = -2.0 * math::ln(r);
    // g K(-phi) = A(c) N(n); (1,2) entry is n e^{c/2}.
    let (cp, sp) = (math::cos(phi), math::sin(phi));
    let top12 = -sp * g.m11 + cp * g.m12;
    let n = top12 * math::exp(-0.5 * c);
    (phi, n, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        math::abs(a - b) < tol
    }

    #[test]
    fn exp_log_roundtrip() {
        let x = Mat2::new(0.3, -0.7, 0.45, -0.3);
        let g = x.exp_traceless();
        assert!(close(g.det(), 1.0, 1e-14), "det {}", g.det());
        let y = g.log_sl2().unwrap();
        assert!(x.max_abs_diff(y) < 1e-12);
    }

    #[test]
    fn exp_rotation_matches_kmat() {
        // exp(s(E-F)) is rotation by s
        let s = 0.9;
        let x = Mat2::new(0.0, s, -s, 0.0);
        assert!(x.exp_traceless().max_abs_diff(kmat(s)) < 1e-14);
    }

    #[test]
    fn iwasawa_kna_reconstructs() {
        let g = kmat(2.3).mul(nmat(-1.4)).mul(amat(0.8));
        let (phi, n, c) = iwasawa_kna_principal(g);
        let h = kmat(phi).mul(nmat(n)).mul(amat(c));
        assert!(g.max_abs_diff(h) < 1e-12, "{:?} vs {:?}", g, h);
        assert!(close(phi, 2.3, 1e-12) && close(n, -1.4, 1e-12) && close(c, 0.8, 1e-12));
    }

    #[test]
    fn iwasawa_ank_reconstructs() {
        let g = amat(-0.6).mul(nmat(0.9)).mul(kmat(-2.0));
        let (phi, n, c) = iwasawa_ank_principal(g);
        let h = amat(c).mul(nmat(n)).mul(kmat(phi));
        assert!(g.max_abs_diff(h) < 1e-12);
        assert!(close(phi, -2.0, 1e-12) && close(n, 0.9, 1e-12) && close(c, -0.6, 1e-12));
    }

    #[test]
    fn iwasawa_knbara_reconstructs() {
        let g = kmat(0.4).mul(nbarmat(1.7)).mul(amat(-1.1));
        let (phi, u, c) = iwasawa_knbara_principal(g);
        let h = kmat(phi).mul(nbarmat(u)).mul(amat(c));
        assert!(g.max_abs_diff(h) < 1e-12);
        assert!(close(phi, 0.4, 1e-12) && close(u, 1.7, 1e-12) && close(c, -1.1, 1e-12));
    }
}
