//! Machine-checkable invariant suites. Each suite runs a set of named
//! checks at pinned tolerances and returns a structured report; the command
//! line front end prints them and the acceptance tests assert them. All
//! sampling is seeded, so reports are reproducible bit for bit.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bhtz::{
    a_elem, causal_character, component_id, in_horizon, in_singularity,
    metric_eval, modified_compose, modified_decompose, twisted_compose, twisted_decompose,
    CausalClass, ChartVec, CosetKN, KillingPair, RotParams, TwistedCoords,
};
use crate::grid::{composite_gl, Grid2, SampledFn};
use crate::lie::{
    self, inverse, iwasawa_compose, iwasawa_decompose, multiply, sigma,
    GroupElement, PI,
};
use crate::math;
use crate::poisson::{abelian_poisson, bfield_calibrate, bfield_residual, BFieldProfile};
use crate::rng::Rng;
use crate::spinor::{
    self, derivation_defect, dirac_commutator_defect, gamma_matrices, Scalar3, SpinDomain,
    Spinor3, WindowField, WindowSpinor, ETA,
};
use crate::starprod::{assoc_defect, gaussian_bump, star, trace_defect, StarConfig};
use crate::symsym::{
    self, amplitude_a, fourth_point, fourth_point_newton, geodesic, phase_s, phase_triangle,
    symmetry, SymPoint,
};
use crate::torus::{first_order_check, mode_product, star_theta, DeformationMatrix, TrigPolynomial};
use crate::udf::{
    covariance_defect, kernel_left_invariance_defect, sigma_swap_defect, z_invariance_defect_of,
    AnElement, BhtzAction,
};
use crate::{tol, Cx};

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    fn new(name: &str, defect: f64, tolerance: f64) -> Self {
        CheckResult {
            name: String::from(name),
            defect,
            tolerance,
            pass: defect.is_finite() && defect < tolerance,
        }
    }
    /// A check that passes when the defect EXCEEDS the bound (controls).
    fn floor(name: &str, defect: f64, bound: f64) -> Self {
        CheckResult {
            name: String::from(name),
            defect,
            tolerance: bound,
            pass: defect.is_finite() && defect > bound,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn random_element(r: &mut Rng) -> GroupElement {
    GroupElement::new(r.range(-5.0, 5.0), r.range(-3.0, 3.0), r.range(-3.0, 3.0))
}

// ---------------------------------------------------------------------------
// 1. group / decomposition suite
// ---------------------------------------------------------------------------

pub fn suite_group(seed: u64) -> SuiteReport {
    let mut r = Rng::new(seed);
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let g = random_element(&mut r);
        let f = iwasawa_decompose(g);
        worst = math::fmax(worst, iwasawa_compose(f).rel_dist(g));
        // QR route through the matrix projection
        let m = g.to_matrix();
        let (phi_pr, n, a) = crate::mat2::iwasawa_kna_principal(m);
        let wrap = (g.phi - phi_pr) / (2.0 * PI);
        let k = phi_pr + 2.0 * PI * math::round(wrap);
        let back = GroupElement::new(k, n, a);
        worst = math::fmax(worst, back.rel_dist(g));
    }
    checks.push(CheckResult::new("iwasawa roundtrip (1e3 points)", worst, 1e-8));

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let tc = TwistedCoords {
            a: r.range(-1.5, 1.5),
            coset: CosetKN {
                phi: r.range(-4.0, 4.0),
                n: r.range(-2.0, 2.0),
            },
        };
        let x = twisted_compose(&tc);
        match twisted_decompose(x) {
            Ok(back) => worst = math::fmax(worst, twisted_compose(&back).rel_dist(x)),
            Err(_) => worst = f64::INFINITY,
        }
    }
    checks.push(CheckResult::new("twisted-Iwasawa roundtrip (1e3 points)", worst, 1e-8));

    let mut worst = 0.0f64;
    let p = RotParams::new(0.45).unwrap();
    for _ in 0..1000 {
        let x = GroupElement::new(r.range(-6.0, 6.0), r.range(-3.0, 3.0), r.range(-3.0, 3.0));
        match modified_decompose(x, p) {
            Ok(f) => worst = math::fmax(worst, modified_compose(&f, p).rel_dist(x)),
            Err(_) => worst = f64::INFINITY,
        }
    }
    checks.push(CheckResult::new("modified-Iwasawa roundtrip (1e3 points)", worst, 1e-8));

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let g = random_element(&mut r);
        let h = random_element(&mut r);
        worst = math::fmax(worst, sigma(sigma(g)).rel_dist(g));
        worst = math::fmax(
            worst,
            sigma(multiply(g, h)).rel_dist(multiply(sigma(g), sigma(h))),
        );
    }
    checks.push(CheckResult::new("sigma automorphism + involution", worst, 1e-10));

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let g = random_element(&mut r);
        let h = random_element(&mut r);
        let k = random_element(&mut r);
        worst = math::fmax(
            worst,
            multiply(multiply(g, h), k).rel_dist(multiply(g, multiply(h, k))),
        );
        worst = math::fmax(worst, multiply(g, inverse(g)).coord_norm());
    }
    checks.push(CheckResult::new("group axioms (associativity, inverses)", worst, tol::GROUP_LAW));

    let z = GroupElement::new(2.0 * PI, 0.0, 0.0);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let g = random_element(&mut r);
        worst = math::fmax(worst, multiply(z, g).rel_dist(multiply(g, z)));
    }
    checks.push(CheckResult::new("center lift commutes", worst, tol::GROUP_LAW));

    SuiteReport {
        suite: String::from("group"),
        checks,
    }
}

// ---------------------------------------------------------------------------
// 2. metric suite
// ---------------------------------------------------------------------------

/// Bi-invariant metric through the chart by finite differences.
fn biinvariant_oracle(tc: &TwistedCoords, v: ChartVec, w: ChartVec) -> f64 {
    let h = 1e-5;
    let shift = |t: f64, d: &ChartVec| TwistedCoords {
        a: tc.a + t * d.da,
        coset: CosetKN {
            phi: tc.coset.phi + t * d.dp,
            n: tc.coset.n + t * d.dq,
        },
    };
    let vel = |d: &ChartVec| -> crate::mat2::Mat2 {
        let xp2 = twisted_compose(&shift(2.0 * h, d)).to_matrix();
        let xp1 = twisted_compose(&shift(h, d)).to_matrix();
        let xm1 = twisted_compose(&shift(-h, d)).to_matrix();
        let xm2 = twisted_compose(&shift(-2.0 * h, d)).to_matrix();
        let x0 = twisted_compose(tc).to_matrix();
        let d4 = xm2
            .sub(xp2)
            .add(xp1.sub(xm1).scale(8.0))
            .scale(1.0 / (12.0 * h));
        x0.inv_sl2().mul(d4)
    };
    let a = vel(&v);
    let b = vel(&w);
    // ghat = tr(XY)/2
    a.mul(b).trace() * 0.5
}

pub fn suite_metric(seed: u64) -> SuiteReport {
    let mut r = Rng::new(seed);
    let mut checks = Vec::new();
    let mut worst_rel = 0.0f64;
    let mut worst_cross = 0.0f64;
    for _ in 0..100 {
        let tc = TwistedCoords {
            a: r.range(-1.2, 1.2),
            coset: CosetKN {
                phi: r.range(-2.0, 2.0),
                n: r.range(-1.5, 1.5),
            },
        };
        let v = ChartVec {
            da: r.range(-1.0, 1.0),
            dp: r.range(-1.0, 1.0),
            dq: r.range(-1.0, 1.0),
        };
        let w = ChartVec {
            da: r.range(-1.0, 1.0),
            dp: r.range(-1.0, 1.0),
            dq: r.range(-1.0, 1.0),
        };
        let ours = metric_eval(&tc, v, w);
        let oracle = biinvariant_oracle(&tc, v, w);
        worst_rel = math::fmax(
            worst_rel,
            math::abs(ours - oracle) / (1.0 + math::abs(oracle)),
        );
        // cross terms of the oracle between transversal and coset directions
        let da = ChartVec { da: 1.0, dp: 0.0, dq: 0.0 };
        let dp = ChartVec { da: 0.0, dp: 1.0, dq: 0.0 };
        let dq = ChartVec { da: 0.0, dp: 0.0, dq: 1.0 };
        worst_cross = math::fmax(worst_cross, math::abs(biinvariant_oracle(&tc, da, dp)));
        worst_cross = math::fmax(worst_cross, math::abs(biinvariant_oracle(&tc, da, dq)));
        let block = metric_eval(&tc, da, dp).abs() + metric_eval(&tc, da, dq).abs();
        worst_cross = math::fmax(worst_cross, block);
    }
    checks.push(CheckResult::new(
        "metric vs bi-invariant oracle (1e2 points, relative)",
        worst_rel,
        tol::METRIC_REL,
    ));
    checks.push(CheckResult::new(
        "metric cross terms (chart and oracle)",
        worst_cross,
        tol::METRIC_REL,
    ));
    SuiteReport {
        suite: String::from("metric"),
        checks,
    }
}

// ---------------------------------------------------------------------------
// 3. causal structure suite
// ---------------------------------------------------------------------------

pub fn suite_causal(seed: u64) -> SuiteReport {
    let mut r = Rng::new(seed);
    let xi = KillingPair::spinless(1.0);
    let mut checks = Vec::new();
    let n = 10000usize;
    let mut sing_bad = 0usize;
    let mut hor_bad = 0usize;
    let mut memb_bad = 0usize;
    for i in 0..n {
        let z = lie::center_element(r.below(5) as i64 - 2);
        let an = multiply(a_elem(r.range(-1.5, 1.5)), GroupElement::new(0.0, r.range(-3.0, 3.0), 0.0));
        let nbar_m = crate::mat2::nbarmat(r.range(-3.0, 3.0))
            .mul(crate::mat2::amat(r.range(-3.0, 3.0)));
        let anb = GroupElement::from_matrix_principal(nbar_m);
        let lateral = if i % 2 == 0 { an } else { anb };
        let base = multiply(z, lateral);
        // singularity sample
        if !in_singularity(base) {
            memb_bad += 1;
        }
        match causal_character(&xi, base).unwrap() {
            CausalClass::NullSet | CausalClass::FixedPoint => {}
            _ => sing_bad += 1,
        }
        // horizon sample: J-translate
        let hor = multiply(GroupElement::new(0.5 * PI, 0.0, 0.0), base);
        if !in_horizon(hor) {
            memb_bad += 1;
        }
        match causal_character(&xi, hor).unwrap() {
            CausalClass::SpacelikeRegion => {}
            _ => hor_bad += 1,
        }
    }
    checks.push(CheckResult::new(
        "singularity samples classify null/fixed (1e4)",
        sing_bad as f64,
        0.5,
    ));
    checks.push(CheckResult::new(
        "horizon samples classify spacelike (1e4)",
        hor_bad as f64,
        0.5,
    ));
    checks.push(CheckResult::new(
        "lateral-class membership detected",
        memb_bad as f64,
        0.5,
    ));

    // component labels at references and their AN perturbations
    let mut comp_bad = 0usize;
    for k in -2i64..=2 {
        let jref = GroupElement::new((k as f64 + 0.5) * PI, 0.0, 0.0);
        if component_id(&xi, jref) != Ok(k) {
            comp_bad += 1;
        }
        let pert = multiply(
            jref,
            multiply(a_elem(0.04), GroupElement::new(0.0, 0.08, 0.0)),
        );
        if component_id(&xi, pert) != Ok(k) {
            comp_bad += 1;
        }
    }
    checks.push(CheckResult::new("component labels at references", comp_bad as f64, 0.5));

    // properness proxy: one z-step displaces every sampled point in AN terms
    let act = BhtzAction::Spinless {
        mass: 1.0,
        orbit_sign: 1,
        transversal: 0.3,
    };
    let mut min_disp = f64::INFINITY;
    for _ in 0..200 {
        let rr = AnElement::new(r.range(-1.0, 1.0), r.range(-1.0, 1.0));
        let x = act.act(rr, act.base_point());
        let moved = act.act(act.z_step(), x);
        min_disp = math::fmin(min_disp, moved.rel_dist(x) * (1.0 + x.coord_norm()));
    }
    checks.push(CheckResult::floor(
        "z-action displacement bounded below (properness proxy)",
        min_disp,
        1e-3,
    ));

    SuiteReport {
        suite: String::from("causal"),
        checks,
    }
}

// ---------------------------------------------------------------------------
// 4. B-field suite
// ---------------------------------------------------------------------------

pub fn suite_bfield(seed: u64) -> SuiteReport {
    let mut r = Rng::new(seed);
    let profile = BFieldProfile { c: 0.0 };
    let cal = bfield_calibrate(&profile);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let a_lie = r.range(-3.0, 3.0);
        let tc = TwistedCoords {
            a: 0.5 * a_lie,
            coset: CosetKN {
                phi: r.range(-3.0, 3.0),
                n: r.range(-2.0, 2.0),
            },
        };
        worst = math::fmax(worst, bfield_residual(&profile, cal, &tc));
    }
    let mut checks = Vec::new();
    checks.push(CheckResult::new(
        "calibrated tanh(a/2) residual over a in [-3,3]",
        worst,
        tol::BFIELD_RESIDUAL,
    ));
    // saturation
    let sat = math::fmax(
        math::abs(profile.eval(20.0) - 1.0),
        math::abs(profile.eval(-20.0) + 1.0),
    );
    checks.push(CheckResult::new("profile saturation at a = +-20", sat, 1e-8));
    SuiteReport {
        suite: String::from("bfield"),
        checks,
    }
}

// ---------------------------------------------------------------------------
// 5. quantum torus suite
// ---------------------------------------------------------------------------

pub fn suite_torus(seed: u64) -> SuiteReport {
    let mut r = Rng::new(seed);
    let j = DeformationMatrix::standard2();
    let mut checks = Vec::new();

    let mut worst_assoc = 0.0f64;
    let mut worst_unit = 0.0f64;
    let mut worst_inv = 0.0f64;
    let mut worst_trace = 0.0f64;
    let one = TrigPolynomial::one(2);
    for _ in 0..1000 {
        let m = alloc::vec![r.below(9) as i64 - 4, r.below(9) as i64 - 4];
        let n = alloc::vec![r.below(9) as i64 - 4, r.below(9) as i64 - 4];
        let p = alloc::vec![r.below(9) as i64 - 4, r.below(9) as i64 - 4];
        let theta = r.range(-2.0, 2.0);
        let em = TrigPolynomial::monomial(m, Cx::new(r.range(-1.0, 1.0), r.range(-1.0, 1.0)));
        let en = TrigPolynomial::monomial(n, Cx::new(r.range(-1.0, 1.0), r.range(-1.0, 1.0)));
        let ep = TrigPolynomial::monomial(p, Cx::new(r.range(-1.0, 1.0), r.range(-1.0, 1.0)));
        let lhs = star_theta(&star_theta(&em, &en, theta, &j).unwrap(), &ep, theta, &j).unwrap();
        let rhs = star_theta(&em, &star_theta(&en, &ep, theta, &j).unwrap(), theta, &j).unwrap();
        worst_assoc = math::fmax(worst_assoc, lhs.sup_coef_diff(&rhs));
        worst_unit = math::fmax(
            worst_unit,
            star_theta(&em, &one, theta, &j).unwrap().sup_coef_diff(&em),
        );
        let ab = star_theta(&em, &en, theta, &j).unwrap();
        let ba = star_theta(&en, &em, theta, &j).unwrap();
        worst_trace = math::fmax(worst_trace, (ab.trace() - ba.trace()).norm());
        let istar = ab.star();
        let irhs = star_theta(&en.star(), &em.star(), theta, &j).unwrap();
        worst_inv = math::fmax(worst_inv, istar.sup_coef_diff(&irhs));
    }
    checks.push(CheckResult::new("mode associativity (1e3 triples)", worst_assoc, tol::TORUS_EXACT));
    checks.push(CheckResult::new("unit element", worst_unit, tol::TORUS_EXACT));
    checks.push(CheckResult::new("involution antihomomorphism", worst_inv, tol::TORUS_EXACT));
    checks.push(CheckResult::new("trace property", worst_trace, tol::TORUS_EXACT));

    // pinned commutation relation u v = e^{2 i kappa theta} v u
    let theta = 0.37;
    let u = TrigPolynomial::monomial(alloc::vec![1, 0], Cx::new(1.0, 0.0));
    let v = TrigPolynomial::monomial(alloc::vec![0, 1], Cx::new(1.0, 0.0));
    let uv = star_theta(&u, &v, theta, &j).unwrap();
    let vu = star_theta(&v, &u, theta, &j).unwrap();
    let ph = 2.0 * crate::torus::KAPPA * theta;
    let rot = Cx::new(math::cos(ph), math::sin(ph));
    checks.push(CheckResult::new(
        "quantum commutation relation with pinned kappa",
        uv.sup_coef_diff(&vu.scale(rot)),
        tol::TORUS_EXACT,
    ));

    // first-order ratio constant over 10 pairs
    let mut worst_ratio = 0.0f64;
    let mut worst_spread = 0.0f64;
    for _ in 0..10 {
        let m = alloc::vec![r.below(7) as i64 - 3, r.below(7) as i64 - 3];
        let n = alloc::vec![r.below(7) as i64 - 3, r.below(7) as i64 - 3];
        if j.pairing(&m, &n) == 0.0 {
            continue;
        }
        let a = TrigPolynomial::monomial(m, Cx::new(1.0, 0.0));
        let b = TrigPolynomial::monomial(n, Cx::new(1.0, 0.0));
        let fit = first_order_check(&a, &b, &j).unwrap();
        worst_ratio = math::fmax(
            worst_ratio,
            (fit.ratio - Cx::new(0.0, -2.0 * crate::torus::KAPPA)).norm(),
        );
        worst_spread = math::fmax(worst_spread, math::fmax(fit.mode_spread, fit.theta_spread));
    }
    checks.push(CheckResult::new(
        "first-order commutator/Poisson ratio (10 pairs)",
        worst_ratio,
        tol::TORUS_FIRST_ORDER,
    ));
    checks.push(CheckResult::new(
        "first-order ratio theta-independence",
        worst_spread,
        tol::TORUS_FIRST_ORDER,
    ));

    // delta-oracle agreement for the phase on a fixed case
    let (pin, _) = mode_product(&alloc::vec![2, -1], &alloc::vec![1, 3], 0.3, &j).unwrap();
    let expected = Cx::new(math::cos(0.3 * j.pairing(&alloc::vec![2, -1], &alloc::vec![1, 3])), math::sin(0.3 * j.pairing(&alloc::vec![2, -1], &alloc::vec![1, 3])));
    checks.push(CheckResult::new(
        "pinned phase golden",
        (pin - expected).norm(),
        1e-15,
    ));

    SuiteReport {
        suite: String::from("torus"),
        checks,
    }
}

// ---------------------------------------------------------------------------
// 6. symmetric space suite
// ---------------------------------------------------------------------------

/// Interior 2-d quadrature of the phase-triangle area in geodesic cone
/// coordinates: P(s,t) = gamma_{v0 -> gamma_{v1 -> v2}(t)}(s).
fn interior_area(v0: SymPoint, v1: SymPoint, v2: SymPoint) -> f64 {
    let base = geodesic(v1, v2).expect("edge geodesic");
    let (nodes, weights) = composite_gl(0.0, 1.0, 8, 4);
    let mut total = 0.0;
    let h = 1e-5;
    for (t, wt) in nodes.iter().zip(&weights) {
        let (qt, _) = base.eval(*t);
        let (qtp, _) = base.eval((*t + h).min(1.0));
        let (qtm, _) = base.eval((*t - h).max(0.0));
        let cone = geodesic(v0, qt).expect("cone geodesic");
        let conep = geodesic(v0, qtp).expect("cone geodesic");
        let conem = geodesic(v0, qtm).expect("cone geodesic");
        let dtq = 1.0 / ((*t + h).min(1.0) - (*t - h).max(0.0));
        for (s, ws) in nodes.iter().zip(&weights) {
            let (p, vel_s) = cone.eval(*s);
            let (pp, _) = conep.eval(*s);
            let (pm, _) = conem.eval(*s);
            let dpt = ((pp.a - pm.a) * dtq, (pp.l - pm.l) * dtq);
            let det = vel_s.0 * dpt.1 - vel_s.1 * dpt.0;
            total += wt * ws * det;
            let _ = p;
        }
    }
    total
}

pub fn suite_symsym(seed: u64) -> SuiteReport {
    let mut r = Rng::new(seed);
    let mut checks = Vec::new();
    let rp = |r: &mut Rng| SymPoint::new(r.range(-1.5, 1.5), r.range(-1.5, 1.5));

    // model self-checks: exact involution, symplectic Jacobian, fixed point
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let x = rp(&mut r);
        let y = rp(&mut r);
        worst = math::fmax(worst, symmetry(x, symmetry(x, y)).dist(y));
        let j = symsym::symmetry_jacobian(x, y);
        worst = math::fmax(worst, math::abs(j[0][0] * j[1][1] - j[0][1] * j[1][0] - 1.0));
        worst = math::fmax(worst, symmetry(x, x).dist(x));
    }
    checks.push(CheckResult::new("model self-checks (involution, symplectic, fixed point)", worst, 1e-12));

    // transvection commutator table via the library generators
    let gens = symsym::transvection_generators();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = rp(&mut r);
        let comm = |a: symsym::TransvectionGen, b: symsym::TransvectionGen| -> (f64, f64) {
            let at = |eps: f64| {
                let q = a.flow(-eps, b.flow(-eps, a.flow(eps, b.flow(eps, p))));
                ((q.a - p.a) / (eps * eps), (q.l - p.l) / (eps * eps))
            };
            let (c1, c2, c4) = (at(1e-3), at(2e-3), at(4e-3));
            (
                (8.0 * c1.0 - 6.0 * c2.0 + c4.0) / 3.0,
                (8.0 * c1.1 - 6.0 * c2.1 + c4.1) / 3.0,
            )
        };
        // [e+, e-] = 0
        let c = comm(gens[1], gens[2]);
        worst = math::fmax(worst, math::hypot(c.0, c.1));
        // |[h, e+-]| = |e+-| with alignment
        for gi in [1usize, 2] {
            let c = comm(gens[0], gens[gi]);
            let f = gens[gi].field(p);
            worst = math::fmax(worst, math::abs(math::hypot(c.0, c.1) - math::hypot(f.0, f.1)));
        }
    }
    checks.push(CheckResult::new("transvection bracket table", worst, tol::SYMSYM_FD));

    // geodesic symmetry reflection on 1e2 geodesics
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = rp(&mut r);
        let q = rp(&mut r);
        let arc = geodesic(p, q).expect("geodesic");
        let (m, _) = arc.eval(0.5);
        worst = math::fmax(worst, symmetry(m, p).dist(q));
    }
    checks.push(CheckResult::new("geodesic symmetry (midpoint reflection, 1e2)", worst, tol::SYMSYM_FD));

    // fourth point closed form vs iterative solve
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (x, y, z) = (rp(&mut r), rp(&mut r), rp(&mut r));
        worst = math::fmax(worst, fourth_point(x, y, z).dist(fourth_point_newton(x, y, z)));
    }
    checks.push(CheckResult::new("fourth point closed form vs fixed-point solve", worst, tol::FOURTH_POINT));

    // S, A diagonal invariance
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (x, y, z, w) = (rp(&mut r), rp(&mut r), rp(&mut r), rp(&mut r));
        let s0 = phase_s(x, y, z);
        let s1 = phase_s(symmetry(w, x), symmetry(w, y), symmetry(w, z));
        worst = math::fmax(worst, math::abs(s0 - s1) / (1.0 + math::abs(s0)));
        let a0 = amplitude_a(x, y, z).value;
        let a1 = amplitude_a(symmetry(w, x), symmetry(w, y), symmetry(w, z)).value;
        worst = math::fmax(worst, math::abs(a0 - a1) / (1.0 + a0));
    }
    checks.push(CheckResult::new("S, A diagonal invariance (1e2 quadruples)", worst, tol::KERNEL_INVARIANCE));

    // dual-quadrature golden for S at x=(0,0), y=(1,0), z=(0,1)
    let x = SymPoint::new(0.0, 0.0);
    let y = SymPoint::new(1.0, 0.0);
    let z = SymPoint::new(0.0, 1.0);
    let [v0, v1, v2] = phase_triangle(x, y, z);
    let stokes = symsym::triangle_area(v0, v1, v2).expect("stokes area");
    let interior = interior_area(v0, v1, v2);
    let golden = -2.0 * math::sinh(1.0);
    checks.push(CheckResult::new(
        "phase golden: Stokes route vs pinned value",
        math::abs(stokes - golden),
        1e-6,
    ));
    checks.push(CheckResult::new(
        "phase golden: interior quadrature vs Stokes",
        math::abs(interior - stokes),
        1e-6,
    ));

    SuiteReport {
        suite: String::from("symsym"),
        checks,
    }
}

// ---------------------------------------------------------------------------
// 7. star product suite
// ---------------------------------------------------------------------------

pub struct StarSuiteConfig {
    pub theta: f64,
    pub base_n: usize,
    pub base_half: f64,
}

impl Default for StarSuiteConfig {
    fn default() -> Self {
        StarSuiteConfig {
            theta: 0.3,
            base_n: 24,
            base_half: 2.0,
        }
    }
}

pub fn suite_star(_seed: u64) -> SuiteReport {
    let sc = StarSuiteConfig::default();
    let cfg = StarConfig::default();
    let mut checks = Vec::new();

    let make = |n: usize, half: f64| -> (SampledFn, SampledFn, SampledFn) {
        let g = Grid2::square(n, -half, half);
        (
            gaussian_bump(g, 0.2, 0.1, 0.8),
            gaussian_bump(g, -0.15, -0.25, 0.8),
            gaussian_bump(g, 0.0, 0.3, 0.8),
        )
    };
    let (u, v, w) = make(sc.base_n, sc.base_half);
    let t24 = trace_defect(&u, &v, sc.theta, &cfg).unwrap_or(f64::INFINITY);
    let a24 = assoc_defect(&u, &v, &w, sc.theta, &cfg).unwrap_or(f64::INFINITY);
    checks.push(CheckResult::new("trace defect at default grid", t24, tol::STAR_TRACE_REL));
    checks.push(CheckResult::new("associativity defect at default grid", a24, tol::STAR_ASSOC_REL));

    // refinement: doubled window at fixed spacing (the truncation parameter
    // of this formulation; the sampled data are spectrally exact already)
    let (u2, v2, w2) = make(sc.base_n * 2, sc.base_half * 2.0);
    let t48 = trace_defect(&u2, &v2, sc.theta, &cfg).unwrap_or(f64::INFINITY);
    let a48 = assoc_defect(&u2, &v2, &w2, sc.theta, &cfg).unwrap_or(f64::INFINITY);
    let order_t = math::ln(t24 / t48) / math::ln(2.0);
    let order_a = math::ln(a24 / a48) / math::ln(2.0);
    checks.push(CheckResult::floor("trace defect decreasing under refinement (order)", order_t, 1.0));
    checks.push(CheckResult::floor("associativity defect decreasing under refinement (order)", order_a, 1.0));

    // commutative limit: defect scales linearly in theta
    let g32 = Grid2::square(32, -2.0, 2.0);
    let uu = gaussian_bump(g32, 0.15, 0.05, 0.8);
    let vv = gaussian_bump(g32, -0.1, -0.1, 0.8);
    let pw = uu.pointwise_mul(&vv);
    let d1 = {
        let (p, _) = star(&uu, &vv, 0.2, &cfg).unwrap();
        p.sup_diff(&pw) / pw.sup_norm()
    };
    let d2 = {
        let (p, _) = star(&uu, &vv, 0.1, &cfg).unwrap();
        p.sup_diff(&pw) / pw.sup_norm()
    };
    checks.push(CheckResult::new(
        "commutative limit rate |d(0.1)/d(0.2) - 1/2|",
        math::abs(d2 / d1 - 0.5),
        0.2,
    ));

    // Poisson direction: pinned first-order constant -i
    let j = [[0.0, 1.0], [-1.0, 0.0]];
    let br = abelian_poisson(&uu, &vv, j);
    let ratio_at = |theta: f64| -> Cx {
        let (uvp, _) = star(&uu, &vv, theta, &cfg).unwrap();
        let (vup, _) = star(&vv, &uu, theta, &cfg).unwrap();
        let comm = uvp.combine(&vup, |a, b| a - b);
        let mut num = Cx::new(0.0, 0.0);
        let mut den = 0.0;
        for i in 0..comm.vals.len() {
            num += comm.vals[i] * br.vals[i].conj();
            den += br.vals[i].norm_sqr();
        }
        num / den / theta
    };
    let r1 = ratio_at(0.1);
    let r2 = ratio_at(0.05);
    let lim = (r2 * 4.0 - r1) / 3.0;
    checks.push(CheckResult::new(
        "first-order Poisson constant (pinned -i)",
        (lim - Cx::new(0.0, -1.0)).norm(),
        0.05,
    ));

    SuiteReport {
        suite: String::from("star"),
        checks,
    }
}

// ---------------------------------------------------------------------------
// 8. universal deformation formula / BTZ suite
// ---------------------------------------------------------------------------

pub fn suite_udf(seed: u64) -> SuiteReport {
    let mut checks = Vec::new();
    let cfg = StarConfig::default();

    checks.push(CheckResult::new(
        "transported kernel left invariance",
        kernel_left_invariance_defect(0.7, 200, seed),
        tol::KERNEL_LEFT_INV,
    ));

    let act = BhtzAction::Spinless {
        mass: 1.0,
        orbit_sign: 1,
        transversal: 0.25,
    };
    let grid = Grid2::square(32, -4.0, 4.0);
    let cov = covariance_defect(act, grid, 0.3, &cfg, AnElement::new(-0.2, 0.3))
        .unwrap_or(f64::INFINITY);
    checks.push(CheckResult::new("R-covariance of the product", cov, tol::UDF_COVARIANCE));

    // Z-invariance preservation on periodic inputs
    let zdef = {
        let act = BhtzAction::Spinless {
            mass: 2.0,
            orbit_sign: 1,
            transversal: 0.2,
        };
        let z = act.z_step();
        let (tmz, _) = z.to_model();
        let period = math::abs(tmz);
        let halfwidth = 4.0 * period;
        let grid = Grid2::square(40, -halfwidth, halfwidth);
        let om = crate::grid::TAU / period;
        let mk = move |phase: f64| {
            move |x: GroupElement| -> Cx {
                match crate::udf::fiber_model_coords(&act, x) {
                    Some((tm, mu)) => {
                        let envelope = math::exp(-0.5 * mu * mu / 0.36);
                        Cx::new(envelope * math::cos(om * tm + phase), 0.0)
                    }
                    None => Cx::new(0.0, 0.0),
                }
            }
        };
        let f = mk(0.0);
        let g = mk(0.7);
        let zcfg = StarConfig {
            boundary_tol: 2.0,
            ..Default::default()
        };
        match act.fiber_star(grid, &f, &g, 0.3, &zcfg) {
            Ok((fg, _)) => z_invariance_defect_of(&fg, z, 2.0),
            Err(_) => f64::INFINITY,
        }
    };
    checks.push(CheckResult::new("Z-invariance preservation", zdef, tol::UDF_Z_INVARIANCE));

    let swap = sigma_swap_defect(1.0, 0.3, grid, 0.4, &cfg).unwrap_or(f64::INFINITY);
    checks.push(CheckResult::new("spinless two-orbit sigma-swap isomorphism", swap, 1e-5));

    // z-compatibility of both actions with the defining Z-action
    let zc1 = crate::udf::z_compatibility_defect(
        &BhtzAction::Spinless {
            mass: 1.7,
            orbit_sign: 1,
            transversal: 0.2,
        },
        50,
        seed ^ 1,
    );
    let zc2 = crate::udf::z_compatibility_defect(
        &BhtzAction::Rotating {
            alpha: 0.25,
            k_fiber: 0.4,
        },
        50,
        seed ^ 2,
    );
    checks.push(CheckResult::new(
        "Z-subaction sits inside R (both kinds)",
        math::fmax(zc1, zc2),
        tol::DECOMP_ROUNDTRIP,
    ));

    SuiteReport {
        suite: String::from("udf"),
        checks,
    }
}

// ---------------------------------------------------------------------------
// 9. spectral suite
// ---------------------------------------------------------------------------

pub fn suite_spectral(_seed: u64) -> SuiteReport {
    let mut checks = Vec::new();
    let cfg = StarConfig::default();

    // Clifford relations, exact
    let gs = gamma_matrices();
    let mut worst = 0.0f64;
    for a in 0..3 {
        for b in 0..3 {
            let anti = gs[a].mul(gs[b]).add(gs[b].mul(gs[a]));
            let expect = if a == b { 2.0 * ETA[a] } else { 0.0 };
            worst = math::fmax(worst, math::abs(anti.m11 - expect));
            worst = math::fmax(worst, math::abs(anti.m22 - expect));
            worst = math::fmax(worst, math::abs(anti.m12));
            worst = math::fmax(worst, math::abs(anti.m21));
        }
    }
    checks.push(CheckResult::new("Clifford relations", worst, 1e-15));

    // derivation identity + controls
    let g = Grid2::square(28, -3.0, 3.0);
    let u = gaussian_bump(g, 0.2, 0.1, 1.4);
    let v = gaussian_bump(g, -0.15, -0.2, 1.4);
    let mut commuting = 0.0f64;
    for f in [WindowField::Boost, WindowField::ShearPlus] {
        commuting = math::fmax(
            commuting,
            derivation_defect(f, &u, &v, 0.3, &cfg).unwrap_or(f64::INFINITY),
        );
    }
    checks.push(CheckResult::new(
        "derivation identity (commuting fields)",
        commuting,
        tol::DERIVATION_DEFECT,
    ));
    let mut control = f64::INFINITY;
    for f in [WindowField::ControlDl, WindowField::ControlScaling] {
        control = math::fmin(
            control,
            derivation_defect(f, &u, &v, 0.3, &cfg).unwrap_or(0.0),
        );
    }
    checks.push(CheckResult::floor("derivation negative control", control, 2e-2));

    // Dirac commutator identity at the default spectral grid, and coarser
    let dirac_at = |n: usize| -> f64 {
        let window = Grid2::square(n, -3.0, 3.0);
        let dom = match SpinDomain::new(1.0, 1, 7, 0.1, 0.4, window) {
            Ok(d) => d,
            Err(_) => return f64::INFINITY,
        };
        let mut psi = Spinor3 { slices: Vec::new() };
        let mut aa = Scalar3 { slices: Vec::new() };
        for iw in 0..dom.n_w {
            let wv = dom.w_at(iw);
            let envelope = math::exp(-0.5 * (wv - 0.25) * (wv - 0.25) / (0.15 * 0.15));
            psi.slices.push(WindowSpinor::sample(window, |x, y| {
                let s: f64 = 0.5;
                let e = envelope * math::exp(-0.5 * ((x - 0.1) * (x - 0.1) + y * y) / (s * s));
                [Cx::new(e, 0.0), Cx::new(0.4 * e, 0.2 * e)]
            }));
            aa.slices.push(SampledFn::sample(window, |x, y| {
                let s: f64 = 0.5;
                let e = (0.7 + 0.3 * math::sin(3.0 * wv))
                    * math::exp(-0.5 * ((x + 0.1) * (x + 0.1) + (y - 0.15) * (y - 0.15)) / (s * s));
                Cx::new(e, 0.0)
            }));
        }
        dirac_commutator_defect(&dom, &psi, &aa, 0.3, &cfg).unwrap_or(f64::INFINITY)
    };
    let d_default = dirac_at(28);
    let d_coarse = dirac_at(18);
    checks.push(CheckResult::new(
        "Dirac commutator identity at default grid",
        d_default,
        tol::DIRAC_DEFECT,
    ));
    checks.push(CheckResult::floor(
        "Dirac commutator defect decreasing under refinement",
        d_coarse / d_default,
        1.0,
    ));

    // deformed covariant derivative: Leibniz
    let dleib = {
        let dom = SpinDomain::new(1.0, 1, 7, 0.1, 0.4, g).unwrap();
        let psi = WindowSpinor::sample(g, |x, y| {
            let s: f64 = 0.5;
            let e = math::exp(-0.5 * ((x - 0.2) * (x - 0.2) + y * y) / (s * s));
            [Cx::new(e, 0.0), Cx::new(0.5 * e, -0.2 * e)]
        });
        let a = gaussian_bump(g, -0.1, 0.15, 1.4);
        let lamfn = |x: f64, y: f64| {
            let s: f64 = 0.6;
            math::exp(-0.5 * (x * x + y * y) / (s * s))
        };
        let lam = spinor::HamiltonianField {
            lambda: SampledFn::sample(g, |x, y| Cx::new(lamfn(x, y), 0.0)),
        };
        let h = 1e-5;
        let gx = spinor::connection_endo(
            &dom,
            3,
            move |x, y| (lamfn(x, y + h) - lamfn(x, y - h)) / (2.0 * h),
            move |x, y| -(lamfn(x + h, y) - lamfn(x - h, y)) / (2.0 * h),
        );
        let theta = 0.3;
        let apsi = spinor::star_left_scalar(&a, &psi, theta, &cfg).unwrap();
        let lhs =
            spinor::deformed_covariant_derivative(&dom, 3, &lam, &gx, &apsi, theta, &cfg).unwrap();
        let (la, _) = star(&lam.lambda, &a, theta, &cfg).unwrap();
        let (al, _) = star(&a, &lam.lambda, theta, &cfg).unwrap();
        let comm = la.combine(&al, |x, y| x - y);
        let t1 = spinor::star_left_scalar(&comm, &psi, theta, &cfg).unwrap();
        let np =
            spinor::deformed_covariant_derivative(&dom, 3, &lam, &gx, &psi, theta, &cfg).unwrap();
        let t2 = spinor::star_left_scalar(&a, &np, theta, &cfg).unwrap();
        let mut worst = 0.0f64;
        for i in 0..g.count() {
            let d0 = lhs.vals[i][0] - t1.vals[i][0] - t2.vals[i][0];
            let d1 = lhs.vals[i][1] - t1.vals[i][1] - t2.vals[i][1];
            worst = math::fmax(worst, math::hypot(d0.norm(), d1.norm()));
        }
        worst / lhs.sup_norm().max(1e-300)
    };
    checks.push(CheckResult::new(
        "deformed covariant derivative Leibniz",
        dleib,
        tol::DEFORMED_NABLA_DEFECT,
    ));

    SuiteReport {
        suite: String::from("spectral"),
        checks,
    }
}

/// Suite registry in acceptance order.
pub fn suite_names() -> [&'static str; 9] {
    [
        "group", "metric", "causal", "bfield", "torus", "symsym", "star", "udf", "spectral",
    ]
}

pub fn run_suite(name: &str, seed: u64) -> Option<SuiteReport> {
    Some(match name {
        "group" => suite_group(seed),
        "metric" => suite_metric(seed),
        "causal" => suite_causal(seed),
        "bfield" => suite_bfield(seed),
        "torus" => suite_torus(seed),
        "symsym" => suite_symsym(seed),
        "star" => suite_star(seed),
        "udf" => suite_udf(seed),
        "spectral" => suite_spectral(seed),
        _ => return None,
    })
}

/// One-line rendering used by the CLI and the acceptance log.
pub fn render_check(suite: &str, c: &CheckResult) -> String {
    format!(
        "[{}] {} {}: defect {:e} vs {} {:e}",
        if c.pass { "PASS" } else { "FAIL" },
        suite,
        c.name,
        c.defect,
        if c.tolerance >= 1.0 { "floor" } else { "tol" },
        c.tolerance
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_suites_pass() {
        for name in ["group", "metric", "bfield", "torus"] {
            let rep = run_suite(name, 12345).unwrap();
            for c in &rep.checks {
                assert!(c.pass, "{}", render_check(&rep.suite, c));
            }
        }
    }
}
