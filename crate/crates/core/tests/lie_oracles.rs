//! Independent oracles for the group layer: the continuous-lift path tracker
//! for the universal-cover angle, a Gram-Schmidt (QR) Iwasawa oracle, the
//! matrix-exponential oracle and the adjoint-trace form.

use adsdeform_core::lie::{
    adjoint, bracket, exp_map, inverse, iwasawa_compose, iwasawa_decompose, killing_form, log_map,
    multiply, sigma, AlgebraVector, GroupElement, BRACKET_CLOSURE_SCALE, PI,
};
use adsdeform_core::mat2::{self, Mat2};
use adsdeform_core::rng::Rng;

fn random_element(r: &mut Rng) -> GroupElement {
    GroupElement::new(r.range(-5.0, 5.0), r.range(-5.0, 5.0), r.range(-5.0, 5.0))
}

fn wrap(x: f64) -> f64 {
    x - 2.0 * PI * (x / (2.0 * PI)).round()
}

/// Lift oracle: multiply the matrix projections along the straight-line path
/// t -> g1 * path(t) in the chart of g2 and accumulate the principal-angle
/// increments in steps small enough that each increment is far below pi.
fn multiply_path_oracle(g1: GroupElement, g2: GroupElement) -> GroupElement {
    let m1 = g1.to_matrix();
    let steps = {
        // keep the K-angle increment per step <= pi/4
        let guess = (g2.phi.abs() / (PI / 4.0)).ceil() as usize + 8;
        guess * 16
    };
    let mut phi = g1.phi; // angle of g1 * path(0) = g1
    let mut prev = {
        let m = m1;
        libm::atan2(-m.m21, m.m11)
    };
    let mut last = m1;
    for s in 1..=steps {
        let t = s as f64 / steps as f64;
        let seg = GroupElement::new(g2.phi * t, g2.n * t, g2.a * t);
        let m = m1.mul(seg.to_matrix());
        let th = libm::atan2(-m.m21, m.m11);
        phi += wrap(th - prev);
        prev = th;
        last = m;
    }
    let (_, n, a) = mat2::iwasawa_kna_principal(last);
    GroupElement::new(phi, n, a)
}

#[test]
fn multiply_agrees_with_path_lift_oracle() {
    let mut r = Rng::new(101);
    for _ in 0..300 {
        let g1 = random_element(&mut r);
        let g2 = random_element(&mut r);
        let fast = multiply(g1, g2);
        let slow = multiply_path_oracle(g1, g2);
        assert!(
            fast.rel_dist(slow) < 1e-7,
            "lift mismatch: {:?} vs {:?}",
            fast,
            slow
        );
    }
}

#[test]
fn winding_product_of_full_turns() {
    // (2pi,0,0)^2 = (4pi,0,0) via the path oracle and the group law
    let z = GroupElement::new(2.0 * PI, 0.0, 0.0);
    let fast = multiply(z, z);
    let slow = multiply_path_oracle(z, z);
    assert!(fast.coord_dist(GroupElement::new(4.0 * PI, 0.0, 0.0)) < 1e-10);
    assert!(slow.coord_dist(GroupElement::new(4.0 * PI, 0.0, 0.0)) < 1e-7);
}

/// Gram-Schmidt on the columns from the right realizes g = K N A for
/// SL(2,R): orthonormalize the first column, the rotation is the K factor.
fn iwasawa_qr_oracle(m: Mat2) -> (f64, f64, f64) {
    // first column e^{a/2} (cos phi, -sin phi)
    let r1 = libm::hypot(m.m11, m.m21);
    let q1 = (m.m11 / r1, m.m21 / r1);
    let phi = libm::atan2(-q1.1, q1.0);
    let a = 2.0 * libm::log(r1);
    // K^T g = N(n) A(a) is upper triangular: (1,2) entry is n e^{-a/2} = t12,
    // so n = t12 e^{a/2} = t12 r1.
    let t12 = q1.0 * m.m12 + q1.1 * m.m22;
    let n = t12 * r1;
    (phi, n, a)
}

#[test]
fn iwasawa_matches_qr_oracle() {
    let mut r = Rng::new(102);
    for _ in 0..1000 {
        let g = random_element(&mut r);
        let f = iwasawa_decompose(g);
        assert!(iwasawa_compose(f).coord_dist(g) < 1e-12);
        let (phi_pr, n, a) = iwasawa_qr_oracle(g.to_matrix());
        assert!((wrap(f.k - phi_pr)).abs() < 1e-9, "angle {} vs {}", f.k, phi_pr);
        assert!((f.n - n).abs() < 1e-9 * (1.0 + n.abs()));
        assert!((f.a - a).abs() < 1e-9);
    }
}

#[test]
fn exp_matches_matrix_exponential_series() {
    // series oracle: sum X^k / k! to convergence, then principal Iwasawa
    let mut r = Rng::new(103);
    for _ in 0..200 {
        let x = AlgebraVector::new(r.range(-1.2, 1.2), r.range(-1.2, 1.2), r.range(-1.2, 1.2));
        let xm = x.to_matrix();
        let mut term = mat2::ID;
        let mut sum = mat2::ID;
        for k in 1..40 {
            term = term.mul(xm).scale(1.0 / k as f64);
            sum = sum.add(term);
        }
        let g = exp_map(x);
        assert!(g.to_matrix().max_abs_diff(sum) < 1e-12);
    }
}

#[test]
fn exp_rotation_angle_oracle() {
    // exp(s(E-F)) rotates by s; check against the series for s beyond pi
    let s = 4.0;
    let g = exp_map(AlgebraVector::new(0.0, s, -s));
    assert!((g.phi - s).abs() < 1e-10 && g.n.abs() < 1e-12 && g.a.abs() < 1e-12);
}

#[test]
fn killing_form_equals_adjoint_trace_form() {
    // beta(X,Y) = tr(ad X ad Y) computed in the basis {H0, E, F}
    let basis = [AlgebraVector::H0, AlgebraVector::E, AlgebraVector::F];
    let mut r = Rng::new(104);
    for _ in 0..200 {
        let x = AlgebraVector::new(r.range(-2.0, 2.0), r.range(-2.0, 2.0), r.range(-2.0, 2.0));
        let y = AlgebraVector::new(r.range(-2.0, 2.0), r.range(-2.0, 2.0), r.range(-2.0, 2.0));
        // columns of ad X, ad Y in the basis
        let cols = |v: AlgebraVector| {
            let mut m = [[0.0f64; 3]; 3];
            for (j, b) in basis.iter().enumerate() {
                let c = bracket(v, *b);
                m[0][j] = c.h;
                m[1][j] = c.e;
                m[2][j] = c.f;
            }
            m
        };
        let ax = cols(x);
        let ay = cols(y);
        let mut tr = 0.0;
        for i in 0..3 {
            for k in 0..3 {
                tr += ax[i][k] * ay[k][i];
            }
        }
        let beta = killing_form(x, y);
        assert!(
            (beta - tr).abs() < 1e-10 * (1.0 + tr.abs()),
            "beta {beta} vs adjoint trace {tr}"
        );
    }
}

#[test]
fn killing_signature_is_2_1() {
    // Gram matrix in {H0, E, F}: diag-ish with det < 0 and two positive
    // eigenvalues. Eigenvalues of [[2,0,0],[0,0,4],[0,4,0]] are 2, 4, -4.
    let basis = [AlgebraVector::H0, AlgebraVector::E, AlgebraVector::F];
    let mut gram = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            gram[i][j] = killing_form(basis[i], basis[j]);
        }
    }
    assert_eq!(gram[0][0], 2.0);
    assert_eq!(gram[1][2], 4.0);
    // closed-form eigenvalues of the E/F block: +-4
    // signature (2,1): two positive (2 and 4), one negative (-4)
    let evs = [gram[0][0], gram[1][2], -gram[1][2]];
    let pos = evs.iter().filter(|&&e| e > 0.0).count();
    let neg = evs.iter().filter(|&&e| e < 0.0).count();
    assert_eq!((pos, neg), (2, 1));
}

#[test]
fn bracket_closure_scale_is_two() {
    let c = bracket(AlgebraVector::E, AlgebraVector::F);
    assert_eq!(c.h, BRACKET_CLOSURE_SCALE);
    assert_eq!((c.e, c.f), (0.0, 0.0));
}

#[test]
fn sigma_matches_matrix_conjugation_oracle() {
    // conj by diag(1,-1) on the projection, lifted continuously: phi -> -phi
    let d = Mat2::new(1.0, 0.0, 0.0, -1.0);
    let mut r = Rng::new(105);
    for _ in 0..300 {
        let g = random_element(&mut r);
        let sm = d.mul(g.to_matrix()).mul(d);
        assert!(sigma(g).to_matrix().max_abs_diff(sm) < 1e-12);
        assert!((sigma(g).phi + g.phi).abs() < 1e-15);
    }
}

#[test]
fn inverse_and_log_consistency() {
    let mut r = Rng::new(106);
    for _ in 0..200 {
        let x = AlgebraVector::new(r.range(-0.9, 0.9), r.range(-0.9, 0.9), r.range(-0.9, 0.9));
        let g = exp_map(x);
        let gi = inverse(g);
        let xi = log_map(gi).unwrap();
        assert!(xi.add(x).max_abs() < 1e-9);
    }
}

#[test]
fn adjoint_is_group_homomorphism() {
    let mut r = Rng::new(107);
    for _ in 0..200 {
        let g = random_element(&mut r);
        let h = random_element(&mut r);
        let x = AlgebraVector::new(r.range(-1.0, 1.0), r.range(-1.0, 1.0), r.range(-1.0, 1.0));
        let lhs = adjoint(multiply(g, h), x);
        let rhs = adjoint(g, adjoint(h, x));
        assert!(lhs.sub(rhs).max_abs() < 1e-8 * (1.0 + rhs.max_abs()));
    }
}
