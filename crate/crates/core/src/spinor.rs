//! Deformed spinor modules and the Dirac operator on a spinless extension
//! domain.
//!
//! The domain is charted as transversal slices times the R-window, indexed
//! so that the window point y corresponds to x(y) = tau_{gamma(y)^{-1}}(base)
//! (the alpha-pullback convention: sampling a function of the domain at x(y)
//! realizes alpha^{base}). In this indexing the module formula
//!     Psi * a = int K(e,g,h) alpha_h(a) . alpha^S_g(Psi) dg dh
//! reduces to window star products with explicit spin weights: with
//! rho(g) the spin cocycle (the sigma-image of g in the defining
//! representation) and V(y) = rho(gamma(iota y))^{-1},
//!     (Psi * a)(y) = V(iota y)^{-1}... see `star_right_scalar`.
//! The fields commuting with the deformation action appear here as the
//! transvection fields d/da and e^a d/dl, under whose diagonal flow the
//! kernel is invariant — these are the honest star derivations; the
//! right-invariant model fields are the negative controls.
//!
//! The Dirac operator is built in the left-invariant orthonormal frame of
//! the ambient group, where the Levi-Civita connection of the bi-invariant
//! metric is (1/2)[.,.] and the spin connection coefficients are constant.
//! Spinor components are taken in that gauge, in which the spin lift of the
//! isometric action is the constant matrix cocycle rho.

use alloc::vec;
use alloc::vec::Vec;

use crate::bhtz::{a_elem, twisted_decompose};
use crate::grid::{Grid2, SampledFn};
use crate::lie::{bracket, multiply, twisted_conjugate, AlgebraVector, GroupElement};
use crate::mat2::Mat2;
use crate::math;
use crate::poisson::spectral_gradient;
use crate::starprod::{star, StarConfig, StarError};
use crate::symsym::SymPoint;
use crate::udf::AnElement;
use crate::Cx;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpinorError {
    Star(StarError),
    OutsideDomain,
    FrameDegenerate { at: usize },
    NotHamiltonian { loop_integral: f64 },
    GridMismatch,
}

impl From<StarError> for SpinorError {
    fn from(e: StarError) -> Self {
        SpinorError::Star(e)
    }
}

impl core::fmt::Display for SpinorError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SpinorError::Star(e) => write!(f, "{e}"),
            SpinorError::OutsideDomain => write!(f, "point left the extension domain chart"),
            SpinorError::FrameDegenerate { at } => {
                write!(f, "frame degenerates near the domain boundary (index {at})")
            }
            SpinorError::NotHamiltonian { loop_integral } => {
                write!(f, "field is not Hamiltonian (loop integral {loop_integral:e})")
            }
            SpinorError::GridMismatch => write!(f, "operands live on different grids"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SpinorError {}

// ---------------------------------------------------------------------------
// Clifford data
// ---------------------------------------------------------------------------

/// Frame metric signs: eta = diag(+1, +1, -1) for the orthonormal frame
/// {H, E+F, E-F} of the curvature -1 metric.
pub const ETA: [f64; 3] = [1.0, 1.0, -1.0];

/// Real gamma matrices for signature (2,1): gamma_a gamma_b + gamma_b gamma_a
/// = 2 eta_ab. Pinned as a golden choice; any conjugate works equally.
pub fn gamma_matrices() -> [Mat2; 3] {
    [
        Mat2::new(1.0, 0.0, 0.0, -1.0),
        Mat2::new(0.0, 1.0, 1.0, 0.0),
        Mat2::new(0.0, 1.0, -1.0, 0.0),
    ]
}

/// Orthonormal frame of the ambient algebra: X_1 = H, X_2 = E+F, X_3 = E-F.
pub fn frame_vectors() -> [AlgebraVector; 3] {
    [
        AlgebraVector::new(2.0, 0.0, 0.0),
        AlgebraVector::new(0.0, 1.0, 1.0),
        AlgebraVector::new(0.0, 1.0, -1.0),
    ]
}

/// Spin-connection endomorphisms Omega_a = 1/4 omega_abc gamma^b gamma^c,
/// computed from the bi-invariant connection (1/2)[.,.]; constant matrices.
pub fn spin_connection() -> [Mat2; 3] {
    let xs = frame_vectors();
    let gs = gamma_matrices();
    let ghat = |x: AlgebraVector, y: AlgebraVector| crate::bhtz::ghat_alg(x, y);
    let mut out = [Mat2::new(0.0, 0.0, 0.0, 0.0); 3];
    for a in 0..3 {
        let mut acc = Mat2::new(0.0, 0.0, 0.0, 0.0);
        for b in 0..3 {
            for c in 0..3 {
                // omega_abc = ghat(1/2 [X_a, X_b], X_c) (lowered indices)
                let w = 0.5 * ghat(bracket(xs[a], xs[b]), xs[c]) / (ETA[c] * ETA[c]).max(1.0);
                // note eta_cc^2 = 1; kept for clarity of the lowering
                let gb = gs[b].scale(ETA[b]);
                let gc = gs[c].scale(ETA[c]);
                acc = acc.add(gb.mul(gc).scale(0.25 * w));
            }
        }
        out[a] = acc;
    }
    out
}

/// Spin cocycle of an AN element: the sigma image in the defining
/// representation, rho(A(t) N(s)) = matrix of A(t) N(-s).
pub fn spin_rho(r: AnElement) -> Mat2 {
    let et = math::exp(r.t);
    Mat2::new(et, -r.s * et, 0.0, 1.0 / et)
}

// ---------------------------------------------------------------------------
// domain chart
// ---------------------------------------------------------------------------

/// Spinless extension domain sliced along the transversal, each slice an
/// R-window in the alpha-indexed chart.
#[derive(Clone, Debug)]
pub struct SpinDomain {
    pub mass: f64,
    pub orbit_sign: i8,
    /// Transversal slices (uniform, inclusive endpoints).
    pub n_w: usize,
    pub w_lo: f64,
    pub w_hi: f64,
    pub window: Grid2,
    /// Frame components per grid point: m[a][c] = component of the frame
    /// field X_a along chart direction c (w, window-a, window-l).
    frame: Vec<[[f64; 3]; 3]>,
    /// Volume density per grid point (metric volume in chart coordinates).
    vol: Vec<f64>,
    /// Points where the chart coordinates overflow f64 and the frame is
    /// unavailable; fields must vanish there.
    dead: Vec<bool>,
}

/// gamma(y): the AN element whose model point is y.
fn gamma_of(y: SymPoint) -> AnElement {
    AnElement::from_model(y.a, y.l)
}

/// Model inversion: iota(y) = model point of gamma(y)^{-1}.
pub fn iota(y: SymPoint) -> SymPoint {
    let g = gamma_of(y).inv();
    let (tm, mu) = g.to_model();
    SymPoint::new(tm, mu)
}

impl SpinDomain {
    pub fn w_step(&self) -> f64 {
        (self.w_hi - self.w_lo) / (self.n_w - 1) as f64
    }
    pub fn w_at(&self, iw: usize) -> f64 {
        self.w_lo + self.w_step() * iw as f64
    }
    pub fn point_count(&self) -> usize {
        self.n_w * self.window.count()
    }
    pub fn idx(&self, iw: usize, iy: usize, il: usize) -> usize {
        (iw * self.window.x.n + iy) * self.window.y.n + il
    }

    /// Base point of the slice at transversal w.
    pub fn base(&self, w: f64) -> GroupElement {
        let nbar = GroupElement::from_matrix_principal(crate::mat2::nbarmat(self.orbit_sign as f64));
        twisted_conjugate(nbar, a_elem(w))
    }

    /// Domain point of (w, y): x = tau_{gamma(y)^{-1}}(base(w)).
    pub fn chart(&self, w: f64, y: SymPoint) -> GroupElement {
        let r = gamma_of(y).inv();
        twisted_conjugate(r.to_group(), self.base(w))
    }

    /// Inverse chart, closed form: the transversal from the trace of
    /// x sigma(x) = g exp(2wH) g^{-1}, the coset from its eigenvectors, the
    /// fiber coordinates from the triangular reduction. Sign and column
    /// ambiguities are resolved by re-running the forward chart; the Newton
    /// twisted decomposition remains as a fallback.
    pub fn chart_inv(&self, x: GroupElement) -> Result<(f64, SymPoint), SpinorError> {
        let m = x.to_matrix();
        let sm = Mat2::new(m.m11, -m.m12, -m.m21, m.m22);
        let y = m.mul(sm);
        let tr = y.trace();
        if tr > 2.0 + 1e-13 {
            let wmag = 0.5 * math::acosh(0.5 * tr);
            for &w in &[wmag, -wmag] {
                let lam = math::exp(2.0 * w);
                let v1 = eigvec2(y, lam);
                let v2 = eigvec2(y, 1.0 / lam);
                let det = v1.0 * v2.1 - v1.1 * v2.0;
                if math::abs(det) < 1e-12 {
                    continue;
                }
                let sc = 1.0 / math::sqrt(math::abs(det));
                let sg = if det > 0.0 { 1.0 } else { -1.0 };
                for &flip in &[1.0, -1.0] {
                    let rep = Mat2::new(
                        v1.0 * sc * flip,
                        v2.0 * sc * sg * flip,
                        v1.1 * sc * flip,
                        v2.1 * sc * sg * flip,
                    );
                    if let Some((ww, yy)) = self.coords_from_rep(w, rep) {
                        let back = self.chart(ww, yy);
                        if back.rel_dist(x) < 1e-7 {
                            return Ok((ww, yy));
                        }
                    }
                }
            }
        }
        // fallback: Newton twisted decomposition
        let tc = twisted_decompose(x).map_err(|_| SpinorError::OutsideDomain)?;
        let rep = tc.coset.rep().to_matrix();
        self.coords_from_rep(tc.a, rep)
            .ok_or(SpinorError::OutsideDomain)
    }

    /// Fiber coordinates from a coset representative matrix (any right-A,
    /// center-sign lift of it).
    fn coords_from_rep(&self, w: f64, rep: Mat2) -> Option<(f64, SymPoint)> {
        let u0 = self.orbit_sign as f64;
        let q = rep.m21 * rep.m22 / u0;
        if q <= 0.0 {
            return None;
        }
        let t = -0.5 * math::ln(q);
        let ratio = rep.m21 / (u0 * rep.m22);
        if ratio <= 0.0 {
            return None;
        }
        let lam = 0.5 * math::ln(ratio);
        let eps = if rep.m22 > 0.0 { 1.0 } else { -1.0 };
        let s = eps * rep.m12 * math::exp(lam - t);
        // x = tau_r(base) with r = (t, s); alpha index y = model(r^{-1})
        let (tm, mu) = AnElement::new(t, s).inv().to_model();
        Some((w, SymPoint::new(tm, mu)))
    }

    pub fn new(
        mass: f64,
        orbit_sign: i8,
        n_w: usize,
        w_lo: f64,
        w_hi: f64,
        window: Grid2,
    ) -> Result<Self, SpinorError> {
        assert!(n_w >= 5, "need at least 5 transversal slices for the stencil");
        let mut dom = SpinDomain {
            mass,
            orbit_sign,
            n_w,
            w_lo,
            w_hi,
            window,
            frame: Vec::new(),
            vol: Vec::new(),
            dead: Vec::new(),
        };
        let xs = frame_vectors();
        let h = 1e-5;
        let mut frame = Vec::with_capacity(dom.point_count());
        let mut vol = Vec::with_capacity(dom.point_count());
        let mut dead = Vec::with_capacity(dom.point_count());
        let mut dead_count = 0usize;
        for iw in 0..n_w {
            let w = dom.w_at(iw);
            for iy in 0..window.x.n {
                for il in 0..window.y.n {
                    let (a, l) = window.point(iy, il);
                    let x = dom.chart(w, SymPoint::new(a, l));
                    let mut m = [[0.0; 3]; 3];
                    let mut ok = true;
                    for (ai, xa) in xs.iter().enumerate() {
                        let step = crate::lie::exp_map(xa.scale(h));
                        let back = crate::lie::exp_map(xa.scale(-h));
                        match (
                            dom.chart_inv(multiply(x, step)),
                            dom.chart_inv(multiply(x, back)),
                        ) {
                            (Ok((wp, yp)), Ok((wm, ym))) => {
                                m[ai][0] = (wp - wm) / (2.0 * h);
                                m[ai][1] = (yp.a - ym.a) / (2.0 * h);
                                m[ai][2] = (yp.l - ym.l) / (2.0 * h);
                            }
                            _ => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    let det = det3(&m);
                    if !ok || math::abs(det) < 1e-10 || !det.is_finite() {
                        // frame degenerates where the chart coordinates blow
                        // up exponentially; fields are required to vanish
                        // there, so the point is flagged rather than fatal
                        frame.push([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
                        vol.push(1.0);
                        dead.push(true);
                        dead_count += 1;
                        continue;
                    }
                    frame.push(m);
                    vol.push(1.0 / math::abs(det));
                    dead.push(false);
                }
            }
        }
        // a usable domain must be mostly alive
        if dead_count * 4 > dom.point_count() {
            return Err(SpinorError::FrameDegenerate { at: dead_count });
        }
        dom.frame = frame;
        dom.vol = vol;
        dom.dead = dead;
        Ok(dom)
    }

    pub fn frame_at(&self, i: usize) -> &[[f64; 3]; 3] {
        &self.frame[i]
    }
    pub fn vol_at(&self, i: usize) -> f64 {
        self.vol[i]
    }
    pub fn is_dead(&self, i: usize) -> bool {
        self.dead[i]
    }
}

fn eigvec2(y: Mat2, lam: f64) -> (f64, f64) {
    let r1 = (y.m12, lam - y.m11);
    let r2 = (lam - y.m22, y.m21);
    if math::hypot(r1.0, r1.1) > math::hypot(r2.0, r2.1) {
        r1
    } else {
        r2
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

// ---------------------------------------------------------------------------
// fields
// ---------------------------------------------------------------------------

/// Two-component spinor samples on one window slice.
#[derive(Clone, Debug)]
pub struct WindowSpinor {
    pub grid: Grid2,
    pub vals: Vec<[Cx; 2]>,
}

impl WindowSpinor {
    pub fn zeros(grid: Grid2) -> Self {
        WindowSpinor {
            grid,
            vals: vec![[Cx::new(0.0, 0.0); 2]; grid.count()],
        }
    }
    pub fn sample(grid: Grid2, f: impl Fn(f64, f64) -> [Cx; 2]) -> Self {
        let mut vals = Vec::with_capacity(grid.count());
        for i in 0..grid.x.n {
            for j in 0..grid.y.n {
                let (a, l) = grid.point(i, j);
                vals.push(f(a, l));
            }
        }
        WindowSpinor { grid, vals }
    }
    pub fn component(&self, c: usize) -> SampledFn {
        SampledFn {
            grid: self.grid,
            vals: self.vals.iter().map(|v| v[c]).collect(),
        }
    }
    pub fn from_components(a: SampledFn, b: SampledFn) -> Self {
        WindowSpinor {
            grid: a.grid,
            vals: a.vals.iter().zip(&b.vals).map(|(x, y)| [*x, *y]).collect(),
        }
    }
    pub fn sup_norm(&self) -> f64 {
        let mut m = 0.0;
        for v in &self.vals {
            m = math::fmax(m, math::hypot(v[0].norm(), v[1].norm()));
        }
        m
    }
    pub fn sup_diff(&self, o: &WindowSpinor) -> f64 {
        let mut m = 0.0;
        for (x, y) in self.vals.iter().zip(&o.vals) {
            m = math::fmax(
                m,
                math::hypot((x[0] - y[0]).norm(), (x[1] - y[1]).norm()),
            );
        }
        m
    }
}

/// 2x2 endomorphism samples on one window slice.
#[derive(Clone, Debug)]
pub struct WindowEndo {
    pub grid: Grid2,
    pub vals: Vec<[[Cx; 2]; 2]>,
}

impl WindowEndo {
    pub fn sample(grid: Grid2, f: impl Fn(f64, f64) -> [[Cx; 2]; 2]) -> Self {
        let mut vals = Vec::with_capacity(grid.count());
        for i in 0..grid.x.n {
            for j in 0..grid.y.n {
                let (a, l) = grid.point(i, j);
                vals.push(f(a, l));
            }
        }
        WindowEndo { grid, vals }
    }
    pub fn entry(&self, r: usize, c: usize) -> SampledFn {
        SampledFn {
            grid: self.grid,
            vals: self.vals.iter().map(|v| v[r][c]).collect(),
        }
    }
}

/// The integration-slot weight rho(gamma(y)) entering the module
/// reductions, evaluated on the grid: with x ranging over the fiber as
/// x(y) = tau_{gamma(y)^{-1}}(base), the spin cocycle of the integration
/// variable collapses to this pointwise factor.
fn slot_weight(grid: Grid2) -> Vec<Mat2> {
    let mut out = Vec::with_capacity(grid.count());
    for i in 0..grid.x.n {
        for j in 0..grid.y.n {
            let (a, l) = grid.point(i, j);
            out.push(spin_rho(gamma_of(SymPoint::new(a, l))));
        }
    }
    out
}

/// The outer factor V(y) = rho(gamma(y)^{-1}) = rho(gamma(y))^{-1} at grid
/// points.
fn outer_weight(grid: Grid2) -> Vec<Mat2> {
    let mut out = Vec::with_capacity(grid.count());
    for i in 0..grid.x.n {
        for j in 0..grid.y.n {
            let (a, l) = grid.point(i, j);
            out.push(spin_rho(gamma_of(SymPoint::new(a, l))).inv());
        }
    }
    out
}

fn apply_weight(w: &[Mat2], psi: &WindowSpinor, inverse: bool) -> WindowSpinor {
    let mut out = psi.clone();
    for (v, m) in out.vals.iter_mut().zip(w) {
        let mm = if inverse { m.inv() } else { *m };
        let a = v[0] * mm.m11 + v[1] * mm.m12;
        let b = v[0] * mm.m21 + v[1] * mm.m22;
        *v = [a, b];
    }
    out
}

/// Deformed right action of a scalar on a window spinor:
/// (Psi * a)(y0) = rho(gamma(y0))^{-1} . star_components( rho(gamma(.)) Psi, a )(y0).
pub fn star_right_scalar(
    psi: &WindowSpinor,
    a: &SampledFn,
    theta: f64,
    cfg: &StarConfig,
) -> Result<WindowSpinor, SpinorError> {
    if psi.grid != a.grid {
        return Err(SpinorError::GridMismatch);
    }
    let sw = slot_weight(psi.grid);
    let weighted = apply_weight(&sw, psi, false);
    let c0 = star(&weighted.component(0), a, theta, cfg)?.0;
    let c1 = star(&weighted.component(1), a, theta, cfg)?.0;
    let raw = WindowSpinor::from_components(c0, c1);
    let ow = outer_weight(psi.grid);
    Ok(apply_weight(&ow, &raw, false))
}

/// Deformed left action of a scalar: (a * Psi) with the scalar in the first
/// kernel slot.
pub fn star_left_scalar(
    a: &SampledFn,
    psi: &WindowSpinor,
    theta: f64,
    cfg: &StarConfig,
) -> Result<WindowSpinor, SpinorError> {
    if psi.grid != a.grid {
        return Err(SpinorError::GridMismatch);
    }
    let sw = slot_weight(psi.grid);
    let weighted = apply_weight(&sw, psi, false);
    let c0 = star(a, &weighted.component(0), theta, cfg)?.0;
    let c1 = star(a, &weighted.component(1), theta, cfg)?.0;
    let raw = WindowSpinor::from_components(c0, c1);
    let ow = outer_weight(psi.grid);
    Ok(apply_weight(&ow, &raw, false))
}

/// Conjugate an endo field by the slot weight: rho(gamma(y)) G(y) rho(gamma(y))^{-1}.
fn conjugate_endo(g: &WindowEndo) -> WindowEndo {
    let grid = g.grid;
    let sw = slot_weight(grid);
    let mut vals = Vec::with_capacity(grid.count());
    for (v, m) in g.vals.iter().zip(&sw) {
        let mi = m.inv();
        // m * v * mi, complex entries with real m
        let mut out = [[Cx::new(0.0, 0.0); 2]; 2];
        let mv = [
            [
                v[0][0] * m.m11 + v[1][0] * m.m12,
                v[0][1] * m.m11 + v[1][1] * m.m12,
            ],
            [
                v[0][0] * m.m21 + v[1][0] * m.m22,
                v[0][1] * m.m21 + v[1][1] * m.m22,
            ],
        ];
        for r in 0..2 {
            out[r][0] = mv[r][0] * mi.m11 + mv[r][1] * mi.m21;
            out[r][1] = mv[r][0] * mi.m12 + mv[r][1] * mi.m22;
        }
        vals.push(out);
    }
    WindowEndo { grid, vals }
}

/// Left action of a deformed endomorphism on a window spinor:
/// (gamma * Psi)(y) = V(y) sum_j star( (V gamma V^{-1})_{ij}, (V Psi)_j ).
pub fn star_left_endo(
    g: &WindowEndo,
    psi: &WindowSpinor,
    theta: f64,
    cfg: &StarConfig,
) -> Result<WindowSpinor, SpinorError> {
    if psi.grid != g.grid {
        return Err(SpinorError::GridMismatch);
    }
    let sw = slot_weight(psi.grid);
    let wpsi = apply_weight(&sw, psi, false);
    let cg = conjugate_endo(g);
    let mut comps = [SampledFn::zeros(psi.grid), SampledFn::zeros(psi.grid)];
    for i in 0..2 {
        for j in 0..2 {
            let p = star(&cg.entry(i, j), &wpsi.component(j), theta, cfg)?.0;
            for (acc, v) in comps[i].vals.iter_mut().zip(&p.vals) {
                *acc += v;
            }
        }
    }
    let raw = WindowSpinor::from_components(comps[0].clone(), comps[1].clone());
    let ow = outer_weight(psi.grid);
    Ok(apply_weight(&ow, &raw, false))
}

/// Right action of a deformed endomorphism (the spinor in the first slot):
/// used by the Dirac commutator identity Psi * (Da).
pub fn star_right_endo(
    psi: &WindowSpinor,
    g: &WindowEndo,
    theta: f64,
    cfg: &StarConfig,
) -> Result<WindowSpinor, SpinorError> {
    if psi.grid != g.grid {
        return Err(SpinorError::GridMismatch);
    }
    let sw = slot_weight(psi.grid);
    let wpsi = apply_weight(&sw, psi, false);
    let cg = conjugate_endo(g);
    let mut comps = [SampledFn::zeros(psi.grid), SampledFn::zeros(psi.grid)];
    for i in 0..2 {
        for j in 0..2 {
            let p = star(&wpsi.component(j), &cg.entry(i, j), theta, cfg)?.0;
            for (acc, v) in comps[i].vals.iter_mut().zip(&p.vals) {
                *acc += v;
            }
        }
    }
    let raw = WindowSpinor::from_components(comps[0].clone(), comps[1].clone());
    let ow = outer_weight(psi.grid);
    Ok(apply_weight(&ow, &raw, false))
}

// ---------------------------------------------------------------------------
// derivation checks
// ---------------------------------------------------------------------------

/// Window vector fields used in the derivation checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowField {
    /// d/da — transvection (boost) field; commutes with the deformation
    /// action in this indexing.
    Boost,
    /// e^a d/dl — the other transvection field; commutes as well.
    ShearPlus,
    /// d/dl — right-invariant model field; does not commute (control).
    ControlDl,
    /// d/da + l d/dl — right-invariant model field (control).
    ControlScaling,
}

impl WindowField {
    pub fn coeffs(self, a: f64, l: f64) -> (f64, f64) {
        match self {
            WindowField::Boost => (1.0, 0.0),
            WindowField::ShearPlus => (0.0, math::exp(a)),
            WindowField::ControlDl => (0.0, 1.0),
            WindowField::ControlScaling => (1.0, l),
        }
    }
    pub fn commutes(self) -> bool {
        matches!(self, WindowField::Boost | WindowField::ShearPlus)
    }
}

/// X.u for a window field, spectral derivatives.
pub fn apply_field(x: WindowField, u: &SampledFn) -> SampledFn {
    let (ua, ul) = spectral_gradient(u);
    let g = u.grid;
    let mut out = SampledFn::zeros(g);
    for i in 0..g.x.n {
        for j in 0..g.y.n {
            let (a, l) = g.point(i, j);
            let (ca, cl) = x.coeffs(a, l);
            out.vals[g.idx(i, j)] = ua.vals[g.idx(i, j)] * ca + ul.vals[g.idx(i, j)] * cl;
        }
    }
    out
}

/// Relative defect of X.(u*v) - (X.u)*v - u*(X.v).
pub fn derivation_defect(
    x: WindowField,
    u: &SampledFn,
    v: &SampledFn,
    theta: f64,
    cfg: &StarConfig,
) -> Result<f64, SpinorError> {
    let (uv, _) = star(u, v, theta, cfg)?;
    let lhs = apply_field(x, &uv);
    let (xu_v, _) = star(&apply_field(x, u), v, theta, cfg)?;
    let (u_xv, _) = star(u, &apply_field(x, v), theta, cfg)?;
    let mut worst = 0.0f64;
    let scale = lhs.sup_norm().max(xu_v.sup_norm()).max(1e-300);
    for i in 0..lhs.vals.len() {
        let d = (lhs.vals[i] - xu_v.vals[i] - u_xv.vals[i]).norm();
        worst = math::fmax(worst, d);
    }
    Ok(worst / scale)
}

// ---------------------------------------------------------------------------
// Dirac operator
// ---------------------------------------------------------------------------

/// Spinor field over the sliced domain (L-frame gauge components).
#[derive(Clone, Debug)]
pub struct Spinor3 {
    pub slices: Vec<WindowSpinor>,
}

/// Scalar field over the sliced domain.
#[derive(Clone, Debug)]
pub struct Scalar3 {
    pub slices: Vec<SampledFn>,
}

impl Spinor3 {
    pub fn sup_diff(&self, o: &Spinor3) -> f64 {
        let mut m = 0.0;
        for (a, b) in self.slices.iter().zip(&o.slices) {
            m = math::fmax(m, a.sup_diff(b));
        }
        m
    }
    pub fn sup_norm(&self) -> f64 {
        let mut m = 0.0;
        for a in &self.slices {
            m = math::fmax(m, a.sup_norm());
        }
        m
    }
}

/// Derivatives of a 3-d scalar along the frame fields; the transversal
/// direction uses 4th-order finite differences over the slices, the window
/// directions are spectral.
fn frame_derivs_scalar(dom: &SpinDomain, f: &Scalar3) -> [Scalar3; 3] {
    let nw = dom.n_w;
    let g = dom.window;
    // chart derivatives per slice
    let mut dw: Vec<SampledFn> = Vec::with_capacity(nw);
    let h = dom.w_step();
    for iw in 0..nw {
        let mut s = SampledFn::zeros(g);
        for idx in 0..g.count() {
            let v = |k: i64| -> Cx {
                let kk = (iw as i64 + k).clamp(0, nw as i64 - 1) as usize;
                f.slices[kk].vals[idx]
            };
            // 4th order central where possible, one-sided at the rim
            let d = if iw >= 2 && iw + 2 < nw {
                (v(-2) - v(2) + (v(1) - v(-1)) * 8.0) / (12.0 * h)
            } else if iw == 0 {
                (v(1) - v(0)) / h
            } else if iw == nw - 1 {
                (v(0) - v(-1)) / h
            } else {
                (v(1) - v(-1)) / (2.0 * h)
            };
            s.vals[idx] = d;
        }
        dw.push(s);
    }
    let mut da: Vec<SampledFn> = Vec::with_capacity(nw);
    let mut dl: Vec<SampledFn> = Vec::with_capacity(nw);
    for iw in 0..nw {
        let (ga, gl) = spectral_gradient(&f.slices[iw]);
        da.push(ga);
        dl.push(gl);
    }
    // contract with frame components
    let mut out = [
        Scalar3 { slices: Vec::new() },
        Scalar3 { slices: Vec::new() },
        Scalar3 { slices: Vec::new() },
    ];
    for (ai, o) in out.iter_mut().enumerate() {
        for iw in 0..nw {
            let mut s = SampledFn::zeros(g);
            for iy in 0..g.x.n {
                for il in 0..g.y.n {
                    let gi = g.idx(iy, il);
                    let m = dom.frame_at(dom.idx(iw, iy, il));
                    s.vals[gi] = dw[iw].vals[gi] * m[ai][0]
                        + da[iw].vals[gi] * m[ai][1]
                        + dl[iw].vals[gi] * m[ai][2];
                }
            }
            o.slices.push(s);
        }
    }
    out
}

fn frame_derivs_spinor(dom: &SpinDomain, psi: &Spinor3) -> [Spinor3; 3] {
    let comp = |c: usize| Scalar3 {
        slices: psi.slices.iter().map(|s| s.component(c)).collect(),
    };
    let d0 = frame_derivs_scalar(dom, &comp(0));
    let d1 = frame_derivs_scalar(dom, &comp(1));
    let mut out: Vec<Spinor3> = Vec::with_capacity(3);
    for a in 0..3 {
        let slices = d0[a]
            .slices
            .iter()
            .zip(&d1[a].slices)
            .map(|(x, y)| WindowSpinor::from_components(x.clone(), y.clone()))
            .collect();
        out.push(Spinor3 { slices });
    }
    let mut it = out.into_iter();
    [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
}

fn mat_apply(m: Mat2, v: [Cx; 2]) -> [Cx; 2] {
    [v[0] * m.m11 + v[1] * m.m12, v[0] * m.m21 + v[1] * m.m22]
}

/// Dirac operator D = sum_a eta^aa gamma_a (X_a + Omega_a) in the
/// left-invariant orthonormal frame.
pub fn dirac(dom: &SpinDomain, psi: &Spinor3) -> Spinor3 {
    let derivs = frame_derivs_spinor(dom, psi);
    let gs = gamma_matrices();
    let oms = spin_connection();
    let nw = dom.n_w;
    let g = dom.window;
    let mut out = Spinor3 {
        slices: (0..nw).map(|_| WindowSpinor::zeros(g)).collect(),
    };
    for iw in 0..nw {
        for idx in 0..g.count() {
            let mut acc = [Cx::new(0.0, 0.0); 2];
            for a in 0..3 {
                let ga = gs[a].scale(ETA[a]); // gamma^a
                // nabla_a psi = X_a.psi + Omega_a psi
                let xpsi = derivs[a].slices[iw].vals[idx];
                let opsi = mat_apply(oms[a], psi.slices[iw].vals[idx]);
                let term = mat_apply(ga, [xpsi[0] + opsi[0], xpsi[1] + opsi[1]]);
                acc[0] += term[0];
                acc[1] += term[1];
            }
            out.slices[iw].vals[idx] = acc;
        }
    }
    out
}

/// Clifford action of the frame-gradient of a scalar: Da = gamma^a (X_a.a),
/// an endomorphism field per slice.
pub fn clifford_gradient(dom: &SpinDomain, a: &Scalar3) -> Vec<WindowEndo> {
    let derivs = frame_derivs_scalar(dom, a);
    let gs = gamma_matrices();
    let g = dom.window;
    let mut out = Vec::with_capacity(dom.n_w);
    for iw in 0..dom.n_w {
        let mut vals = Vec::with_capacity(g.count());
        for idx in 0..g.count() {
            let mut m = [[Cx::new(0.0, 0.0); 2]; 2];
            for ai in 0..3 {
                let ga = gs[ai].scale(ETA[ai]);
                let d = derivs[ai].slices[iw].vals[idx];
                m[0][0] += d * ga.m11;
                m[0][1] += d * ga.m12;
                m[1][0] += d * ga.m21;
                m[1][1] += d * ga.m22;
            }
            vals.push(m);
        }
        out.push(WindowEndo { grid: g, vals });
    }
    out
}

/// Defect of the Dirac commutator identity
/// || D(Psi * a) - (D Psi) * a - Psi * (Da) ||_sup / scale.
pub fn dirac_commutator_defect(
    dom: &SpinDomain,
    psi: &Spinor3,
    a: &Scalar3,
    theta: f64,
    cfg: &StarConfig,
) -> Result<f64, SpinorError> {
    // Psi * a per slice
    let mut psia = Spinor3 { slices: Vec::new() };
    for iw in 0..dom.n_w {
        psia.slices
            .push(star_right_scalar(&psi.slices[iw], &a.slices[iw], theta, cfg)?);
    }
    let lhs = dirac(dom, &psia);
    let dpsi = dirac(dom, psi);
    let mut dpsia = Spinor3 { slices: Vec::new() };
    for iw in 0..dom.n_w {
        dpsia
            .slices
            .push(star_right_scalar(&dpsi.slices[iw], &a.slices[iw], theta, cfg)?);
    }
    let da = clifford_gradient(dom, a);
    let mut psida = Spinor3 { slices: Vec::new() };
    for iw in 0..dom.n_w {
        psida
            .slices
            .push(star_right_endo(&psi.slices[iw], &da[iw], theta, cfg)?);
    }
    let mut worst = 0.0f64;
    // ignore the two outermost slices (one-sided transversal stencils)
    for iw in 2..dom.n_w - 2 {
        for idx in 0..dom.window.count() {
            let l = lhs.slices[iw].vals[idx];
            let r1 = dpsia.slices[iw].vals[idx];
            let r2 = psida.slices[iw].vals[idx];
            let d = math::hypot(
                (l[0] - r1[0] - r2[0]).norm(),
                (l[1] - r1[1] - r2[1]).norm(),
            );
            worst = math::fmax(worst, d);
        }
    }
    let scale = dpsia.sup_norm().max(psida.sup_norm()).max(1e-300);
    Ok(worst / scale)
}

/// L2-type pairing <Psi, Phi> = int Psi^dag B Phi dvol with B the timelike
/// gamma; the Dirac operator is formally symmetric for it.
pub fn spinor_pairing(dom: &SpinDomain, psi: &Spinor3, phi: &Spinor3) -> Cx {
    let b = gamma_matrices()[2];
    let g = dom.window;
    let mut acc = Cx::new(0.0, 0.0);
    let wh = dom.w_step();
    let cell = g.cell_area();
    for iw in 0..dom.n_w {
        // trapezoid in w
        let wt = if iw == 0 || iw == dom.n_w - 1 { 0.5 } else { 1.0 };
        for iy in 0..g.x.n {
            for il in 0..g.y.n {
                let idx3 = dom.idx(iw, iy, il);
                let i2 = g.idx(iy, il);
                let p = psi.slices[iw].vals[i2];
                let q = mat_apply(b, phi.slices[iw].vals[i2]);
                acc += (p[0].conj() * q[0] + p[1].conj() * q[1])
                    * (dom.vol_at(idx3) * wt * wh * cell);
            }
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// deformed covariant derivative (Hamiltonian fields)
// ---------------------------------------------------------------------------

/// Hamiltonian data of a vertical field on the window: X = (dl/dl-part ...)
/// with i_X omega = d lambda for omega = da ^ dl; X = (d_l lambda, -d_a lambda).
pub struct HamiltonianField {
    pub lambda: SampledFn,
}

impl HamiltonianField {
    /// Accept a vector field given by closures, reconstruct lambda by line
    /// integration of i_X omega from the window origin, and reject fields
    /// whose loop integrals do not vanish.
    pub fn from_field(
        grid: Grid2,
        xa: impl Fn(f64, f64) -> f64,
        xl: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, SpinorError> {
        // i_X omega = X_a dl - X_l da; lambda(p) = int_path, axis-aligned
        let quad = |a0: f64, l0: f64, a1: f64, l1: f64| -> f64 {
            // first along a at l0, then along l at a1
            let n = 64;
            let mut s = 0.0;
            for k in 0..n {
                let t = (k as f64 + 0.5) / n as f64;
                let a = a0 + t * (a1 - a0);
                s += -xl(a, l0) * (a1 - a0) / n as f64;
            }
            for k in 0..n {
                let t = (k as f64 + 0.5) / n as f64;
                let l = l0 + t * (l1 - l0);
                s += xa(a1, l) * (l1 - l0) / n as f64;
            }
            s
        };
        // closedness: compare the two axis orders around random rectangles
        let mut rng = crate::rng::Rng::new(0x4a11);
        for _ in 0..16 {
            let a0 = rng.range(grid.x.lo * 0.8, grid.x.hi * 0.8);
            let l0 = rng.range(grid.y.lo * 0.8, grid.y.hi * 0.8);
            let a1 = rng.range(grid.x.lo * 0.8, grid.x.hi * 0.8);
            let l1 = rng.range(grid.y.lo * 0.8, grid.y.hi * 0.8);
            let one = quad(a0, l0, a1, l1);
            // other corner order
            let n = 64;
            let mut two = 0.0;
            for k in 0..n {
                let t = (k as f64 + 0.5) / n as f64;
                let l = l0 + t * (l1 - l0);
                two += xa(a0, l) * (l1 - l0) / n as f64;
            }
            for k in 0..n {
                let t = (k as f64 + 0.5) / n as f64;
                let a = a0 + t * (a1 - a0);
                two += -xl(a, l1) * (a1 - a0) / n as f64;
            }
            if math::abs(one - two) > 1e-6 * (1.0 + math::abs(one)) {
                return Err(SpinorError::NotHamiltonian {
                    loop_integral: one - two,
                });
            }
        }
        let lambda = SampledFn::sample(grid, |a, l| Cx::new(quad(0.0, 0.0, a, l), 0.0));
        Ok(HamiltonianField { lambda })
    }
}

/// Deformed covariant derivative of Remark-type:
/// (nabla_X)^theta Psi = lambda * Psi - Psi * lambda + Psi * Gamma(X),
/// with Gamma(X) the frame expansion of the connection endomorphism.
pub fn deformed_covariant_derivative(
    dom: &SpinDomain,
    iw: usize,
    lam: &HamiltonianField,
    gamma_x: &WindowEndo,
    psi: &WindowSpinor,
    theta: f64,
    cfg: &StarConfig,
) -> Result<WindowSpinor, SpinorError> {
    let _ = (dom, iw);
    let l_psi = star_left_scalar(&lam.lambda, psi, theta, cfg)?;
    let psi_l = star_right_scalar(psi, &lam.lambda, theta, cfg)?;
    let psi_g = star_right_endo(psi, gamma_x, theta, cfg)?;
    let grid = psi.grid;
    let mut out = WindowSpinor::zeros(grid);
    for i in 0..grid.count() {
        out.vals[i] = [
            l_psi.vals[i][0] - psi_l.vals[i][0] + psi_g.vals[i][0],
            l_psi.vals[i][1] - psi_l.vals[i][1] + psi_g.vals[i][1],
        ];
    }
    Ok(out)
}

/// Connection endomorphism of a vertical window field at a slice: the frame
/// expansion Gamma(X) = sum_a c_a Omega_a with X = sum_a c_a X_a; the
/// components come from inverting the cached frame matrix.
pub fn connection_endo(
    dom: &SpinDomain,
    iw: usize,
    xa: impl Fn(f64, f64) -> f64,
    xl: impl Fn(f64, f64) -> f64,
) -> WindowEndo {
    let g = dom.window;
    let oms = spin_connection();
    WindowEndo::sample(g, |a, l| {
        // chart vector (0, xa, xl) -> frame components c = M^{-1} v
        let iy = ((a - g.x.lo) / g.x.step()) as usize % g.x.n;
        let il = ((l - g.y.lo) / g.y.step()) as usize % g.y.n;
        let m = dom.frame_at(dom.idx(iw, iy, il));
        let v = [0.0, xa(a, l), xl(a, l)];
        let c = solve3x3(m, v);
        let mut e = [[Cx::new(0.0, 0.0); 2]; 2];
        for ai in 0..3 {
            e[0][0] += Cx::new(c[ai] * oms[ai].m11, 0.0);
            e[0][1] += Cx::new(c[ai] * oms[ai].m12, 0.0);
            e[1][0] += Cx::new(c[ai] * oms[ai].m21, 0.0);
            e[1][1] += Cx::new(c[ai] * oms[ai].m22, 0.0);
        }
        e
    })
}

fn solve3x3(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    // rows of m are frame fields: v = sum_a c_a m[a], solve the transpose
    let a = [
        [m[0][0], m[1][0], m[2][0]],
        [m[0][1], m[1][1], m[2][1]],
        [m[0][2], m[1][2], m[2][2]],
    ];
    let det = det3(&a);
    let mut out = [0.0; 3];
    for col in 0..3 {
        let mut ac = a;
        for r in 0..3 {
            ac[r][col] = v[r];
        }
        out[col] = det3(&ac) / det;
    }
    out
}
