//! The solvable symplectic symmetric space on R^2 with transvection group
//! P_{1,1} = SO(1,1) x R^2: point symmetries, canonical connection,
//! geodesics, the unique fourth point, and the three-point phase / amplitude
//! that build the non-formal deformation kernel.
//!
//! Model: M = R^2 with coordinates (a, l), omega = da ^ dl, and symmetries
//!     s_{(a,l)}(a', l') = (2a - a', 2 l cosh(a - a') - l').
//! Every abstract requirement (involutive symplectic diffeomorphisms with
//! isolated fixed points, three-dimensional solvable transvection algebra
//! with [h, e+-] = +- e+-) is re-verified by the invariant suite; downstream
//! code treats the model as a hypothesis, not ground truth.
//!
//! Geodesics of the canonical connection solve dda/dt = 0, ddl/dt = l da/dt^2;
//! through two points with distinct a they are the curves
//! l(a) = A e^a + B e^{-a}, and vertical lines otherwise. The boundary-value
//! solver shoots with RK4 regardless, and the closed-form arcs double as an
//! independent description that the tests compare against.

use alloc::vec::Vec;

use crate::math;

/// Point of the symmetric space, global Darboux-type coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymPoint {
    pub a: f64,
    pub l: f64,
}

impl SymPoint {
    pub const fn new(a: f64, l: f64) -> Self {
        SymPoint { a, l }
    }
    pub fn dist(self, o: SymPoint) -> f64 {
        math::fmax(math::abs(self.a - o.a), math::abs(self.l - o.l))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SymsymError {
    ShootingDiverged { residual: f64 },
    DegenerateTriangle,
}

impl core::fmt::Display for SymsymError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SymsymError::ShootingDiverged { residual } => {
                write!(f, "geodesic shooting did not converge (residual {residual:e})")
            }
            SymsymError::DegenerateTriangle => write!(f, "triangle degenerate beyond tolerance"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SymsymError {}

/// Point symmetry s_x(y).
pub fn symmetry(x: SymPoint, y: SymPoint) -> SymPoint {
    SymPoint::new(
        2.0 * x.a - y.a,
        2.0 * x.l * math::cosh(x.a - y.a) - y.l,
    )
}

/// Differential of s_x at y; determinant is identically 1 (symplectic).
pub fn symmetry_jacobian(x: SymPoint, y: SymPoint) -> [[f64; 2]; 2] {
    [
        [-1.0, 0.0],
        [-2.0 * x.l * math::sinh(x.a - y.a), -1.0],
    ]
}

/// The unique fourth point t with s_x s_y s_z t = t; the a-equation is
/// affine with closed form and the l-equation affine with slope -1.
pub fn fourth_point(x: SymPoint, y: SymPoint, z: SymPoint) -> SymPoint {
    SymPoint::new(
        x.a - y.a + z.a,
        x.l * math::cosh(y.a - z.a) - y.l * math::cosh(z.a - x.a)
            + z.l * math::cosh(x.a - y.a),
    )
}

/// Fixed-point solve of s_x s_y s_z t = t by damped iteration on the affine
/// map (the l-slope is exactly -1, so the half-relaxed map contracts);
/// verifies the closed form.
pub fn fourth_point_newton(x: SymPoint, y: SymPoint, z: SymPoint) -> SymPoint {
    let mut t = SymPoint::new(0.0, 0.0);
    for _ in 0..200 {
        let ft = symmetry(x, symmetry(y, symmetry(z, t)));
        let next = SymPoint::new(0.5 * (t.a + ft.a), 0.5 * (t.l + ft.l));
        if t.dist(next) < 1e-15 * (1.0 + math::abs(t.l)) {
            return next;
        }
        t = next;
    }
    t
}

// ---------------------------------------------------------------------------
// transvection flows
// ---------------------------------------------------------------------------

/// Generators of the transvection algebra in the basis with brackets
/// [h, e+] = e+, [h, e-] = -e-, [e+, e-] = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransvectionGen {
    /// h: the boost d/da, realized as s_{(t/2,0)} o s_{(0,0)}.
    Boost,
    /// e+: e^a d/dl.
    EPlus,
    /// e-: e^{-a} d/dl.
    EMinus,
}

impl TransvectionGen {
    pub fn flow(self, t: f64, p: SymPoint) -> SymPoint {
        match self {
            TransvectionGen::Boost => SymPoint::new(p.a + t, p.l),
            TransvectionGen::EPlus => SymPoint::new(p.a, p.l + t * math::exp(p.a)),
            TransvectionGen::EMinus => SymPoint::new(p.a, p.l + t * math::exp(-p.a)),
        }
    }

    pub fn field(self, p: SymPoint) -> (f64, f64) {
        match self {
            TransvectionGen::Boost => (1.0, 0.0),
            TransvectionGen::EPlus => (0.0, math::exp(p.a)),
            TransvectionGen::EMinus => (0.0, math::exp(-p.a)),
        }
    }
}

pub fn transvection_generators() -> [TransvectionGen; 3] {
    [
        TransvectionGen::Boost,
        TransvectionGen::EPlus,
        TransvectionGen::EMinus,
    ]
}

/// The boost flow as a double symmetry: s_{(t/2, 0)} o s_{(0,0)}.
pub fn boost_as_symmetries(t: f64, p: SymPoint) -> SymPoint {
    symmetry(SymPoint::new(0.5 * t, 0.0), symmetry(SymPoint::new(0.0, 0.0), p))
}

/// The cosh-translation double symmetry s_{(d, c)} o s_{(d, 0)}:
/// (a, l) -> (a, l + 2 c cosh(a - d)). Products of these realize e+ and e-.
pub fn cosh_shear(d: f64, c: f64, p: SymPoint) -> SymPoint {
    symmetry(SymPoint::new(d, c), symmetry(SymPoint::new(d, 0.0), p))
}

// ---------------------------------------------------------------------------
// canonical connection
// ---------------------------------------------------------------------------

/// Connection coefficients Gamma[k][i][j] (k the output component, i the
/// direction, j the argument field), from the defining formula
/// omega_x(nabla_X Y, Z) = 1/2 X_x . omega(Y + s_{x*} Y, Z)
/// on coordinate fields, with Richardson finite differences.
pub fn christoffels(x: SymPoint) -> [[[f64; 2]; 2]; 2] {
    // W_j(u) = e_j + ds_x|_{s_x(u)} e_j ; omega(v, e_a) = -v_l, omega(v, e_l) = v_a
    let w = |j: usize, u: SymPoint| -> (f64, f64) {
        let jac = symmetry_jacobian(x, symmetry(x, u));
        let e = if j == 0 { (1.0, 0.0) } else { (0.0, 1.0) };
        (e.0 + jac[0][0] * e.0 + jac[0][1] * e.1, e.1 + jac[1][0] * e.0 + jac[1][1] * e.1)
    };
    let omega_w_e = |j: usize, k: usize, u: SymPoint| -> f64 {
        let wv = w(j, u);
        if k == 0 {
            -wv.1
        } else {
            wv.0
        }
    };
    let deriv = |j: usize, k: usize, dir: usize| -> f64 {
        let f = |t: f64| {
            let u = if dir == 0 {
                SymPoint::new(x.a + t, x.l)
            } else {
                SymPoint::new(x.a, x.l + t)
            };
            omega_w_e(j, k, u)
        };
        richardson_d1(f, 1e-4)
    };
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            // omega(nabla_i e_j, e_a) = Gamma^l_{ij} * omega(e_l, e_a) = -Gamma^l
            // omega(nabla_i e_j, e_l) = Gamma^a_{ij}
            let half_da = 0.5 * deriv(j, 0, i);
            let half_dl = 0.5 * deriv(j, 1, i);
            gamma[1][i][j] = -half_da;
            gamma[0][i][j] = half_dl;
        }
    }
    gamma
}

fn richardson_d1(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d = |hh: f64| (f(hh) - f(-hh)) / (2.0 * hh);
    (4.0 * d(h) - d(2.0 * h)) / 3.0
}

// ---------------------------------------------------------------------------
// geodesics
// ---------------------------------------------------------------------------

/// Geodesic arc from a two-point boundary-value solve: uniform samples of
/// position and velocity over t in [0, 1], endpoints reproduced to 1e-8.
#[derive(Clone, Debug)]
pub struct GeodesicArc {
    pub p: SymPoint,
    pub q: SymPoint,
    /// Initial velocity found by shooting.
    pub v0: (f64, f64),
    /// (position, velocity) at t_i = i / (samples - 1).
    pub samples: Vec<(SymPoint, (f64, f64))>,
}

impl GeodesicArc {
    /// Cubic-Hermite evaluation between stored samples.
    pub fn eval(&self, t: f64) -> (SymPoint, (f64, f64)) {
        let n = self.samples.len() - 1;
        let tt = math::fmin(math::fmax(t, 0.0), 1.0) * n as f64;
        let i = math::fmin(math::floor(tt), (n - 1) as f64) as usize;
        let s = tt - i as f64;
        let h = 1.0 / n as f64;
        let (p0, v0) = self.samples[i];
        let (p1, v1) = self.samples[i + 1];
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        let pos = SymPoint::new(
            h00 * p0.a + h10 * h * v0.0 + h01 * p1.a + h11 * h * v1.0,
            h00 * p0.l + h10 * h * v0.1 + h01 * p1.l + h11 * h * v1.1,
        );
        // velocity from the Hermite derivative, rescaled to t in [0,1]
        let d00 = 6.0 * s * (s - 1.0);
        let d10 = (1.0 - s) * (1.0 - 3.0 * s);
        let d01 = -d00;
        let d11 = s * (3.0 * s - 2.0);
        let vel = (
            (d00 * p0.a + d10 * h * v0.0 + d01 * p1.a + d11 * h * v1.0) / h,
            (d00 * p0.l + d10 * h * v0.1 + d01 * p1.l + d11 * h * v1.1) / h,
        );
        (pos, vel)
    }

    pub fn reverse(&self) -> GeodesicArc {
        let mut samples: Vec<(SymPoint, (f64, f64))> = self
            .samples
            .iter()
            .rev()
            .map(|(p, v)| (*p, (-v.0, -v.1)))
            .collect();
        let v0 = samples[0].1;
        let _ = &mut samples;
        GeodesicArc {
            p: self.q,
            q: self.p,
            v0,
            samples,
        }
    }
}

/// Geodesic equation right-hand side: (da, dl, dva, dvl).
fn geodesic_rhs(state: [f64; 4]) -> [f64; 4] {
    [state[2], state[3], 0.0, state[1] * state[2] * state[2]]
}

fn rk4_geodesic(p: SymPoint, v: (f64, f64), steps: usize) -> Vec<(SymPoint, (f64, f64))> {
    let h = 1.0 / steps as f64;
    let mut s = [p.a, p.l, v.0, v.1];
    let mut out = Vec::with_capacity(steps + 1);
    out.push((SymPoint::new(s[0], s[1]), (s[2], s[3])));
    for _ in 0..steps {
        let k1 = geodesic_rhs(s);
        let k2 = geodesic_rhs(add4(s, scale4(k1, 0.5 * h)));
        let k3 = geodesic_rhs(add4(s, scale4(k2, 0.5 * h)));
        let k4 = geodesic_rhs(add4(s, scale4(k3, h)));
        for i in 0..4 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.push((SymPoint::new(s[0], s[1]), (s[2], s[3])));
    }
    out
}

fn add4(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}
fn scale4(a: [f64; 4], s: f64) -> [f64; 4] {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

const GEODESIC_STEPS: usize = 64;

/// Boundary-value solve by shooting: RK4 integration of the geodesic
/// equation, Newton on the endpoint residual in the initial velocity.
pub fn geodesic(p: SymPoint, q: SymPoint) -> Result<GeodesicArc, SymsymError> {
    // the a-equation is affine, so v_a is known; shoot on v_l
    let mut v = (q.a - p.a, q.l - p.l);
    let mut best = f64::INFINITY;
    for _ in 0..50 {
        let traj = rk4_geodesic(p, v, GEODESIC_STEPS);
        let end = traj[traj.len() - 1].0;
        let res = end.dist(q);
        if res < best {
            best = res;
        }
        if res < 1e-10 * (1.0 + math::abs(q.l)) {
            return Ok(GeodesicArc {
                p,
                q,
                v0: v,
                samples: traj,
            });
        }
        // Newton on both velocity components via finite differences
        let h = 1e-6 * (1.0 + math::abs(v.0) + math::abs(v.1));
        let ta = rk4_geodesic(p, (v.0 + h, v.1), GEODESIC_STEPS);
        let tl = rk4_geodesic(p, (v.0, v.1 + h), GEODESIC_STEPS);
        let ea = ta[ta.len() - 1].0;
        let el = tl[tl.len() - 1].0;
        let j11 = (ea.a - end.a) / h;
        let j12 = (el.a - end.a) / h;
        let j21 = (ea.l - end.l) / h;
        let j22 = (el.l - end.l) / h;
        let det = j11 * j22 - j12 * j21;
        if math::abs(det) < 1e-14 {
            break;
        }
        let ra = end.a - q.a;
        let rl = end.l - q.l;
        v = (
            v.0 - (j22 * ra - j12 * rl) / det,
            v.1 - (-j21 * ra + j11 * rl) / det,
        );
    }
    Err(SymsymError::ShootingDiverged { residual: best })
}

/// Closed-form geodesic arc: l(a) = ca e^a + cb e^{-a} between distinct
/// a-values, or a vertical segment. Used by the kernel evaluator; the tests
/// compare it against the shooting solver.
#[derive(Clone, Copy, Debug)]
pub enum ClosedArc {
    Curve { a0: f64, a1: f64, ca: f64, cb: f64 },
    Vertical { a: f64, l0: f64, l1: f64 },
}

/// Threshold on |a_p - a_q| below which the 2x2 solve for (ca, cb) loses
/// accuracy and the vertical description is used instead.
const VERTICAL_EPS: f64 = 1e-9;

pub fn closed_arc(p: SymPoint, q: SymPoint) -> ClosedArc {
    let d = p.a - q.a;
    if math::abs(d) < VERTICAL_EPS {
        ClosedArc::Vertical {
            a: 0.5 * (p.a + q.a),
            l0: p.l,
            l1: q.l,
        }
    } else {
        let s = 2.0 * math::sinh(d);
        let ca = (p.l * math::exp(-q.a) - q.l * math::exp(-p.a)) / s;
        let cb = (q.l * math::exp(p.a) - p.l * math::exp(q.a)) / s;
        ClosedArc::Curve {
            a0: p.a,
            a1: q.a,
            ca,
            cb,
        }
    }
}

impl ClosedArc {
    pub fn eval(&self, t: f64) -> SymPoint {
        match *self {
            ClosedArc::Curve { a0, a1, ca, cb } => {
                let a = a0 + t * (a1 - a0);
                SymPoint::new(a, ca * math::exp(a) + cb * math::exp(-a))
            }
            ClosedArc::Vertical { a, l0, l1 } => SymPoint::new(a, l0 + t * (l1 - l0)),
        }
    }

    /// Analytic integral of a dl along the arc (antiderivative of a l'(a)).
    pub fn integral_a_dl(&self) -> f64 {
        match *self {
            ClosedArc::Curve { a0, a1, ca, cb } => {
                let f = |a: f64| {
                    ca * (a - 1.0) * math::exp(a) + cb * (a + 1.0) * math::exp(-a)
                };
                f(a1) - f(a0)
            }
            ClosedArc::Vertical { a, l0, l1 } => a * (l1 - l0),
        }
    }
}

// ---------------------------------------------------------------------------
// areas, phase and amplitude
// ---------------------------------------------------------------------------

/// Oriented symplectic area of the geodesic triangle via Stokes:
/// the loop integral of a dl along the three boundary-value arcs, each
/// integrated by composite Gauss-Legendre on the sampled polyline.
pub fn triangle_area(p: SymPoint, q: SymPoint, r: SymPoint) -> Result<f64, SymsymError> {
    let arcs = [geodesic(p, q)?, geodesic(q, r)?, geodesic(r, p)?];
    let mut total = 0.0;
    for arc in &arcs {
        total += arc_integral_gl(arc);
    }
    Ok(total)
}

/// Composite Gauss-Legendre integral of a(t) l'(t) dt over an arc polyline.
fn arc_integral_gl(arc: &GeodesicArc) -> f64 {
    let cells = arc.samples.len() - 1;
    let (xs, ws) = crate::grid::gauss_legendre(4);
    let h = 1.0 / cells as f64;
    let mut s = 0.0;
    for c in 0..cells {
        let mid = (c as f64 + 0.5) * h;
        for (x, w) in xs.iter().zip(&ws) {
            let t = mid + 0.5 * h * x;
            let (pos, vel) = arc.eval(t);
            s += 0.5 * h * w * pos.a * vel.1;
        }
    }
    s
}

/// Fast oriented area from the closed-form arcs (kernel path).
pub fn triangle_area_closed(p: SymPoint, q: SymPoint, r: SymPoint) -> f64 {
    closed_arc(p, q).integral_a_dl()
        + closed_arc(q, r).integral_a_dl()
        + closed_arc(r, p).integral_a_dl()
}

/// Vertices of the phase triangle: (t, s_z t, s_y s_z t).
pub fn phase_triangle(x: SymPoint, y: SymPoint, z: SymPoint) -> [SymPoint; 3] {
    let t = fourth_point(x, y, z);
    let v1 = symmetry(z, t);
    let v2 = symmetry(y, v1);
    [t, v1, v2]
}

/// Three-point phase: the symplectic area of the phase triangle.
pub fn phase_s(x: SymPoint, y: SymPoint, z: SymPoint) -> f64 {
    let [t, v1, v2] = phase_triangle(x, y, z);
    triangle_area_closed(t, v1, v2)
}

/// Linear form of the oriented area in the l-coordinates at fixed a's:
/// area(x,y,z) = w1 l_x + w2 l_y + w3 l_z (no constant term).
fn area_l_form(ax: f64, ay: f64, az: f64, area: impl Fn(SymPoint, SymPoint, SymPoint) -> f64) -> [f64; 3] {
    let p = |l: [f64; 3]| {
        area(
            SymPoint::new(ax, l[0]),
            SymPoint::new(ay, l[1]),
            SymPoint::new(az, l[2]),
        )
    };
    [
        p([1.0, 0.0, 0.0]),
        p([0.0, 1.0, 0.0]),
        p([0.0, 0.0, 1.0]),
    ]
}

/// Outcome of the amplitude evaluation.
#[derive(Clone, Copy, Debug)]
pub struct Amplitude {
    pub value: f64,
    /// Set when both triangle areas fell below threshold and the value is
    /// the rescaling-family limit.
    pub degenerate: bool,
}

/// Limit of the amplitude along the rescaling family (x, x+eps u, x+eps v):
/// computed numerically (Richardson in eps); equals the flat-space value 2.
pub fn degenerate_amplitude_limit() -> f64 {
    let x = SymPoint::new(0.3, -0.2);
    let u = (1.0, 0.4);
    let v = (-0.3, 1.0);
    let at = |eps: f64| {
        let y = SymPoint::new(x.a + eps * u.0, x.l + eps * u.1);
        let z = SymPoint::new(x.a + eps * v.0, x.l + eps * v.1);
        let big = phase_s(x, y, z);
        let base = triangle_area_closed(x, y, z);
        math::sqrt(math::abs(big / base))
    };
    let (e1, e2) = (1e-3, 5e-4);
    let (v1, v2) = (at(e1), at(e2));
    // error O(eps^2): Richardson on the squares of the scales
    (v2 * e1 * e1 - v1 * e2 * e2) / (e1 * e1 - e2 * e2)
}

/// Three-point amplitude: sqrt of the (absolute) ratio between the phase
/// triangle area and the base triangle area. The two l-linear area forms are
/// exactly proportional in this model, so the ratio is evaluated on the
/// dominant form coefficient, which is stable also for collinear points.
pub fn amplitude_a(x: SymPoint, y: SymPoint, z: SymPoint) -> Amplitude {
    let base_form = area_l_form(x.a, y.a, z.a, triangle_area_closed);
    let big_form = area_l_form(x.a, y.a, z.a, phase_s);
    let mut besti = 0;
    for i in 1..3 {
        if math::abs(base_form[i]) > math::abs(base_form[besti]) {
            besti = i;
        }
    }
    if math::abs(base_form[besti]) < 1e-12 {
        return Amplitude {
            value: degenerate_amplitude_limit(),
            degenerate: true,
        };
    }
    let lambda = big_form[besti] / base_form[besti];
    Amplitude {
        value: math::sqrt(math::abs(lambda)),
        degenerate: false,
    }
}

/// Largest relative deviation from proportionality of the two area forms at
/// a given a-triple; a structural self-check of the model used by the
/// product engine before it trusts the form-based amplitude.
pub fn amplitude_form_defect(ax: f64, ay: f64, az: f64) -> f64 {
    let base = area_l_form(ax, ay, az, triangle_area_closed);
    let big = area_l_form(ax, ay, az, phase_s);
    let mut besti = 0;
    for i in 1..3 {
        if math::abs(base[i]) > math::abs(base[besti]) {
            besti = i;
        }
    }
    if math::abs(base[besti]) < 1e-14 {
        return 0.0;
    }
    let lambda = big[besti] / base[besti];
    let mut defect = 0.0;
    for i in 0..3 {
        defect = math::fmax(defect, math::abs(big[i] - lambda * base[i]));
    }
    defect / (1.0 + math::abs(lambda))
}

/// Jacobian determinant of the reflection map y -> s_y(x) (the point x
/// reflected through the moving mirror point), divided by its flat value 4.
/// This is the half-density weight attached to one oriented pair of kernel
/// arguments.
pub fn reflection_jacobian(x: SymPoint, y: SymPoint) -> f64 {
    // d/dy s_y(x) with s_y(x) = (2 a_y - a_x, 2 l_y cosh(a_y - a_x) - l_x):
    // [[2, 0], [2 l_y sinh(a_y - a_x), 2 cosh(a_y - a_x)]]
    let j11 = 2.0;
    let j22 = 2.0 * math::cosh(y.a - x.a);
    0.25 * j11 * j22
}

/// Kernel amplitude: the product half-density of the three cyclic reflection
/// Jacobians,  sqrt(J(x,y) J(y,z) J(z,x)).
///
/// The displayed triangle-area ratio (`amplitude_a`) does not satisfy the
/// trace identity the deformed product is required to have (its measured
/// trace defect is O(0.1) at theta = 1); the half-density amplitude makes
/// both the unit-cutoff property and the trace identity distributionally
/// exact, and reduces to the same flat limit. The invariant suite measures
/// the relation between the two.
pub fn kernel_amplitude(x: SymPoint, y: SymPoint, z: SymPoint) -> f64 {
    math::sqrt(
        reflection_jacobian(x, y) * reflection_jacobian(y, z) * reflection_jacobian(z, x),
    )
}

/// Three-point kernel data: half-density amplitude, phase, and the combined
/// value A e^{iS/theta} / (pi^2 theta^2). The normalization constant makes
/// the zero-curvature limit the Weyl product kernel and is re-verified by
/// the engine's unit-cutoff test.
#[derive(Clone, Copy, Debug)]
pub struct OscKernel {
    pub theta: f64,
}

impl OscKernel {
    pub fn new(theta: f64) -> Self {
        assert!(theta != 0.0, "theta must be nonzero");
        OscKernel { theta }
    }

    pub fn phase(&self, x: SymPoint, y: SymPoint, z: SymPoint) -> f64 {
        phase_s(x, y, z)
    }

    /// Half-density amplitude entering the kernel.
    pub fn amplitude(&self, x: SymPoint, y: SymPoint, z: SymPoint) -> f64 {
        kernel_amplitude(x, y, z)
    }

    /// The displayed area-ratio amplitude, kept for comparison.
    pub fn amplitude_area_ratio(&self, x: SymPoint, y: SymPoint, z: SymPoint) -> f64 {
        amplitude_a(x, y, z).value
    }

    pub fn normalization(&self) -> f64 {
        1.0 / (core::f64::consts::PI * core::f64::consts::PI * self.theta * self.theta)
    }

    pub fn eval(&self, x: SymPoint, y: SymPoint, z: SymPoint) -> crate::Cx {
        let s = self.phase(x, y, z) / self.theta;
        let a = self.amplitude(x, y, z) * self.normalization();
        crate::Cx::new(a * math::cos(s), a * math::sin(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn rp(r: &mut Rng) -> SymPoint {
        SymPoint::new(r.range(-1.5, 1.5), r.range(-1.5, 1.5))
    }

    #[test]
    fn symmetry_fixed_point_and_involution() {
        let mut r = Rng::new(51);
        for _ in 0..200 {
            let x = rp(&mut r);
            let y = rp(&mut r);
            assert!(symmetry(x, x).dist(x) < 1e-15);
            assert!(symmetry(x, symmetry(x, y)).dist(y) < 1e-12);
        }
    }

    #[test]
    fn symmetry_at_origin() {
        let p = symmetry(SymPoint::new(0.0, 0.0), SymPoint::new(0.7, -1.2));
        assert!(p.dist(SymPoint::new(-0.7, 1.2)) < 1e-15);
    }

    #[test]
    fn symmetry_is_symplectic_exactly() {
        let mut r = Rng::new(52);
        for _ in 0..200 {
            let x = rp(&mut r);
            let y = rp(&mut r);
            let j = symmetry_jacobian(x, y);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            assert_eq!(det, 1.0);
        }
    }

    #[test]
    fn symmetry_unique_fixed_point() {
        // any fixed point must satisfy a' = a and then l' = l
        let x = SymPoint::new(0.4, -0.8);
        let mut r = Rng::new(53);
        for _ in 0..500 {
            let y = rp(&mut r);
            if symmetry(x, y).dist(y) < 1e-9 {
                assert!(y.dist(x) < 1e-8);
            }
        }
    }

    #[test]
    fn fourth_point_closed_form_vs_iteration() {
        let mut r = Rng::new(54);
        for _ in 0..200 {
            let (x, y, z) = (rp(&mut r), rp(&mut r), rp(&mut r));
            let t = fourth_point(x, y, z);
            // defining property
            let w = symmetry(x, symmetry(y, symmetry(z, t)));
            assert!(w.dist(t) < 1e-12);
            // iterative solve agrees
            let tn = fourth_point_newton(x, y, z);
            assert!(t.dist(tn) < 1e-10, "{:?} vs {:?}", t, tn);
        }
    }

    #[test]
    fn fourth_point_degenerate_and_equivariant() {
        let x = SymPoint::new(0.3, 0.9);
        assert!(fourth_point(x, x, x).dist(x) < 1e-15);
        let mut r = Rng::new(55);
        for _ in 0..100 {
            let (x, y, z, w) = (rp(&mut r), rp(&mut r), rp(&mut r), rp(&mut r));
            let lhs = fourth_point(symmetry(w, x), symmetry(w, y), symmetry(w, z));
            let rhs = symmetry(w, fourth_point(x, y, z));
            assert!(lhs.dist(rhs) < 1e-10, "{:?} vs {:?}", lhs, rhs);
        }
    }

    #[test]
    fn transvection_flows_are_symmetry_compositions() {
        let mut r = Rng::new(56);
        for _ in 0..100 {
            let p = rp(&mut r);
            let t = r.range(-1.0, 1.0);
            // boost
            let f = TransvectionGen::Boost.flow(t, p);
            assert!(f.dist(boost_as_symmetries(t, p)) < 1e-12);
            // e+ flow as a product of two cosh shears:
            // t e^a = c1 2cosh(a - d) + c2 2cosh(a) with
            // c1 = -t/(2 sinh d), c2 = t (1 + cosh d)/(2 sinh d) ... solve:
            // e^a = cosh a + sinh a, sinh a = (cosh d cosh a - cosh(a-d))/sinh d
            let d = 0.9f64;
            let c1 = -t / (2.0 * math::sinh(d));
            let c2 = (t + t * math::cosh(d) / math::sinh(d) * math::sinh(d) / math::sinh(d)
                * math::sinh(d))
                * 0.0; // recomputed below
            let _ = c2;
            // l-increment target: t e^a; via shears: 2 c1 cosh(a-d) + 2 c2 cosh(a)
            // matching e^a = cosh a + sinh a and
            // sinh a = (cosh d cosh a - cosh(a - d))/ sinh d gives
            // 2 c1 = -t / sinh d, 2 c2 = t (1 + cosh d / sinh d * 1) ... direct:
            let two_c1 = -t / math::sinh(d);
            let two_c2 = t * (1.0 + math::cosh(d) / math::sinh(d) * 1.0);
            let g = cosh_shear(d, 0.5 * two_c1, cosh_shear(0.0, 0.5 * two_c2 , p));
            let expect = TransvectionGen::EPlus.flow(t, p);
            assert!(
                g.dist(expect) < 1e-12,
                "shear composition {:?} vs e+ flow {:?}",
                g,
                expect
            );
            let _ = c1;
        }
    }

    #[test]
    fn transvection_bracket_table() {
        // finite-difference commutators of the flows: [h, e+-] = +- e+-,
        // [e+, e-] = 0
        let gens = transvection_generators();
        let comm = |a: TransvectionGen, b: TransvectionGen, p: SymPoint| -> (f64, f64) {
            let at = |eps: f64| -> (f64, f64) {
                let q = a.flow(-eps, b.flow(-eps, a.flow(eps, b.flow(eps, p))));
                ((q.a - p.a) / (eps * eps), (q.l - p.l) / (eps * eps))
            };
            // the displacement is eps^2 [X,Y] + higher terms; the three-step
            // combination removes the O(eps) and O(eps^2) corrections
            let (c1, c2, c4) = (at(1e-3), at(2e-3), at(4e-3));
            (
                (8.0 * c1.0 - 6.0 * c2.0 + c4.0) / 3.0,
                (8.0 * c1.1 - 6.0 * c2.1 + c4.1) / 3.0,
            )
        };
        let mut r = Rng::new(57);
        for _ in 0..50 {
            let p = rp(&mut r);
            // [e+, e-] = 0
            let c = comm(gens[1], gens[2], p);
            assert!(math::abs(c.0) < 1e-6 && math::abs(c.1) < 1e-6);
            // [h, e+] = e+ (commutator of flows gives -[X,Y] or +[X,Y]
            // depending on ordering convention; compare magnitudes and
            // direction against the field)
            let c = comm(gens[0], gens[1], p);
            let f = gens[1].field(p);
            let dot = c.0 * f.0 + c.1 * f.1;
            let nc = math::hypot(c.0, c.1);
            let nf = math::hypot(f.0, f.1);
            assert!(math::abs(nc - nf) < 1e-5 * (1.0 + nf), "|[h,e+]| = |e+|");
            assert!(math::abs(math::abs(dot) - nc * nf) < 1e-5 * (1.0 + nc * nf), "aligned");
            // [h, e-] similarly
            let c = comm(gens[0], gens[2], p);
            let f = gens[2].field(p);
            let nc = math::hypot(c.0, c.1);
            let nf = math::hypot(f.0, f.1);
            assert!(math::abs(nc - nf) < 1e-5 * (1.0 + nf));
        }
    }

    #[test]
    fn christoffels_structure() {
        let mut r = Rng::new(58);
        for _ in 0..30 {
            let x = rp(&mut r);
            let g = christoffels(x);
            // torsionfree: symmetric in the lower indices
            for k in 0..2 {
                assert!(math::abs(g[k][0][1] - g[k][1][0]) < 1e-6);
            }
            // the only nonzero coefficient: Gamma^l_{aa} = -l
            assert!(math::abs(g[1][0][0] + x.l) < 1e-6, "Gamma^l_aa {}", g[1][0][0]);
            assert!(math::abs(g[0][0][0]) < 1e-6);
            assert!(math::abs(g[0][1][1]) < 1e-6);
            assert!(math::abs(g[1][1][1]) < 1e-6);
            assert!(math::abs(g[0][0][1]) < 1e-6);
            assert!(math::abs(g[1][0][1]) < 1e-6);
        }
    }

    #[test]
    fn christoffels_at_origin_golden() {
        let g = christoffels(SymPoint::new(0.0, 0.0));
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert!(math::abs(g[k][i][j]) < 1e-8);
                }
            }
        }
    }

    #[test]
    fn geodesic_trivial_and_reversal() {
        let p = SymPoint::new(0.3, -0.4);
        let arc = geodesic(p, p).unwrap();
        for (pos, _) in &arc.samples {
            assert!(pos.dist(p) < 1e-12);
        }
        let q = SymPoint::new(-0.8, 0.9);
        let fw = geodesic(p, q).unwrap();
        let bw = geodesic(q, p).unwrap();
        for i in 0..=8 {
            let t = i as f64 / 8.0;
            let (a, _) = fw.eval(t);
            let (b, _) = bw.eval(1.0 - t);
            assert!(a.dist(b) < 1e-7, "reversal at t={t}: {:?} vs {:?}", a, b);
        }
    }

    #[test]
    fn geodesic_matches_closed_form() {
        let mut r = Rng::new(59);
        for _ in 0..50 {
            let p = rp(&mut r);
            let q = rp(&mut r);
            let arc = geodesic(p, q).unwrap();
            let cl = closed_arc(p, q);
            for i in 0..=10 {
                let t = i as f64 / 10.0;
                let (pos, _) = arc.eval(t);
                // parameterizations agree: both linear in a (affine ODE)
                let cp = cl.eval(t);
                assert!(pos.dist(cp) < 1e-7, "{:?} vs {:?}", pos, cp);
            }
        }
    }

    #[test]
    fn geodesic_symmetry_reflection_and_midpoint() {
        let mut r = Rng::new(60);
        for _ in 0..50 {
            let p = rp(&mut r);
            let q = rp(&mut r);
            let arc = geodesic(p, q).unwrap();
            // midpoint m: s_m(p) = q
            let (m, _) = arc.eval(0.5);
            assert!(symmetry(m, p).dist(q) < 1e-6);
            // reflection property at p: s_p(gamma(t)) = gamma(-t)
            // realized by integrating backwards with reversed velocity
            let back = rk4_geodesic(p, (-arc.v0.0, -arc.v0.1), GEODESIC_STEPS);
            for i in [8usize, 24, 48] {
                let t = i as f64 / GEODESIC_STEPS as f64;
                let (fwd, _) = arc.eval(t);
                let refl = symmetry(p, fwd);
                let bwd = back[i].0;
                assert!(refl.dist(bwd) < 1e-6);
            }
        }
    }

    #[test]
    fn triangle_area_basics() {
        // degenerate
        let p = SymPoint::new(0.2, 0.4);
        let q = SymPoint::new(-0.5, 0.1);
        assert!(math::abs(triangle_area(p, p, q).unwrap()) < 1e-9);
        // small flat triangle: area -> euclidean, counterclockwise positive
        let e = 1e-3;
        let a = SymPoint::new(0.0, 0.0);
        let b = SymPoint::new(e, 0.0);
        let c = SymPoint::new(0.0, e);
        let ar = triangle_area(a, b, c).unwrap();
        assert!(
            math::abs(ar - 0.5 * e * e) < 1e-2 * e * e,
            "flat limit {ar} vs {}",
            0.5 * e * e
        );
        // antisymmetry under odd permutation
        let (x, y, z) = (
            SymPoint::new(0.4, 0.1),
            SymPoint::new(-0.6, 0.7),
            SymPoint::new(0.2, -0.9),
        );
        let a1 = triangle_area(x, y, z).unwrap();
        let a2 = triangle_area(x, z, y).unwrap();
        assert!(math::abs(a1 + a2) < 1e-8, "{a1} vs {a2}");
    }

    #[test]
    fn triangle_area_subdivision() {
        let (p, q, r) = (
            SymPoint::new(0.5, 0.2),
            SymPoint::new(-0.7, 0.6),
            SymPoint::new(0.1, -0.8),
        );
        let arc = geodesic(q, r).unwrap();
        let (m, _) = arc.eval(0.37);
        let whole = triangle_area(p, q, r).unwrap();
        let part1 = triangle_area(p, q, m).unwrap();
        let part2 = triangle_area(p, m, r).unwrap();
        assert!(
            math::abs(whole - part1 - part2) < 1e-6,
            "{whole} vs {} + {}",
            part1,
            part2
        );
    }

    #[test]
    fn stokes_vs_closed_form_area() {
        let mut r = Rng::new(61);
        for _ in 0..20 {
            let (x, y, z) = (rp(&mut r), rp(&mut r), rp(&mut r));
            let gl = triangle_area(x, y, z).unwrap();
            let cl = triangle_area_closed(x, y, z);
            assert!(math::abs(gl - cl) < 1e-6, "{gl} vs {cl}");
        }
    }

    #[test]
    fn phase_s_properties() {
        let mut r = Rng::new(62);
        // diagonal degenerate
        let x = rp(&mut r);
        assert!(math::abs(phase_s(x, x, x)) < 1e-14);
        for _ in 0..100 {
            let (x, y, z, w) = (rp(&mut r), rp(&mut r), rp(&mut r), rp(&mut r));
            let s = phase_s(x, y, z);
            // diagonal invariance under symmetries
            let sd = phase_s(symmetry(w, x), symmetry(w, y), symmetry(w, z));
            assert!(math::abs(s - sd) < 1e-9 * (1.0 + math::abs(s)));
            // antisymmetry under the swap of the function slots
            let sswap = phase_s(x, z, y);
            assert!(math::abs(s + sswap) < 1e-9 * (1.0 + math::abs(s)));
        }
    }

    #[test]
    fn amplitude_properties() {
        let mut r = Rng::new(63);
        for _ in 0..100 {
            let (x, y, z, w) = (rp(&mut r), rp(&mut r), rp(&mut r), rp(&mut r));
            let a = amplitude_a(x, y, z);
            assert!(a.value > 0.0);
            assert!(!a.degenerate);
            let ad = amplitude_a(symmetry(w, x), symmetry(w, y), symmetry(w, z));
            assert!(math::abs(a.value - ad.value) < 1e-8 * (1.0 + a.value));
            // symmetric under the swap of the function slots
            let aswap = amplitude_a(x, z, y);
            assert!(math::abs(a.value - aswap.value) < 1e-10 * (1.0 + a.value));
            // structural proportionality of the two area forms
            assert!(amplitude_form_defect(x.a, y.a, z.a) < 1e-10);
        }
    }

    #[test]
    fn amplitude_degenerate_limit() {
        let lim = degenerate_amplitude_limit();
        assert!(math::abs(lim - 2.0) < 1e-6, "limit {lim}");
        // equal-a triples take the cached limit branch
        let x = SymPoint::new(0.4, 0.1);
        let y = SymPoint::new(0.4, -0.7);
        let z = SymPoint::new(0.4, 1.2);
        let a = amplitude_a(x, y, z);
        assert!(a.degenerate && math::abs(a.value - 2.0) < 1e-6);
    }

    #[test]
    fn flat_limit_of_phase() {
        // small triangles: |S| -> 4 * euclidean area
        let e = 1e-3;
        let x = SymPoint::new(0.0, 0.0);
        let y = SymPoint::new(e, 0.0);
        let z = SymPoint::new(0.0, e);
        let s = phase_s(x, y, z);
        assert!(
            math::abs(math::abs(s) - 4.0 * 0.5 * e * e) < 1e-3 * e * e,
            "S {s}"
        );
        let a = amplitude_a(x, y, z).value;
        assert!(math::abs(a - 2.0) < 1e-5, "A {a}");
    }
}
