//! Delta-function oracle for the mode-product phase: evaluate the double
//! oscillatory integral over R^d x R^d on plane waves with a Gaussian
//! regulator, in closed form, and extrapolate the regulator away. The limit,
//! normalized to make the zero mode a unit, must reproduce the pinned phase
//! exp(i kappa theta m.Jn) with kappa = 1.

use adsdeform_core::torus::{mode_product, DeformationMatrix, KAPPA};
use adsdeform_core::Cx;

/// Closed form of I(eps) = int int exp(i x y + i mu x + i nu y - eps(x^2+y^2)).
/// Gaussian integration in x then y:
///   int e^{-eps x^2 + i x (y + mu)} dx = sqrt(pi/eps) e^{-(y+mu)^2 / 4 eps}
///   then a complex Gaussian in y.
fn osc_pair(mu: f64, nu: f64, eps: f64) -> Cx {
    let a = 0.25 / eps + eps; // coefficient of y^2
    let b = Cx::new(mu / (2.0 * eps), -nu); // coefficient of y (in e^{-Ay^2 - By})
    let pref = (core::f64::consts::PI / eps).sqrt() * (core::f64::consts::PI / a).sqrt();
    // exponent: B^2/(4A) - mu^2/(4 eps)
    let expo = b * b / (4.0 * a) - Cx::new(mu * mu / (4.0 * eps), 0.0);
    Cx::new(pref, 0.0) * expo.exp()
}

fn oracle_phase(m: &[i64], n: &[i64], theta: f64, j: &DeformationMatrix) -> Cx {
    // nu_i = theta (J^T n)_i realized through the pairing with unit vectors
    let d = j.dim();
    let mut nu = vec![0.0; d];
    for (i, nu_i) in nu.iter_mut().enumerate() {
        let mut ei = vec![0i64; d];
        ei[i] = 1;
        // (J^T n)_i = n . (J e_i)
        *nu_i = theta * j.pairing(&n.to_vec(), &ei);
    }
    // Richardson extrapolation of prod_i osc_pair(m_i, nu_i, eps) / (2 pi)^d
    let eval = |eps: f64| -> Cx {
        let mut p = Cx::new(1.0, 0.0);
        for i in 0..d {
            p *= osc_pair(m[i] as f64, nu[i], eps);
        }
        p / (2.0 * core::f64::consts::PI).powi(d as i32)
    };
    // error is O(eps): two-point Richardson kills the linear term
    let e1 = 1e-5;
    let e2 = 5e-6;
    let v1 = eval(e1);
    let v2 = eval(e2);
    (v2 * e1 - v1 * e2) / (e1 - e2)
}

#[test]
fn oracle_reproduces_pinned_phase() {
    let j = DeformationMatrix::standard2();
    let cases = [
        ([1, 0], [0, 1], 0.7),
        ([2, -1], [1, 3], 0.3),
        ([0, 2], [-2, 1], 1.1),
        ([3, 3], [1, -1], -0.9),
        ([0, 0], [4, 2], 0.5),
    ];
    for (m, n, theta) in cases {
        let oracle = oracle_phase(&m, &n, theta, &j);
        let (pinned, _) = mode_product(&m.to_vec(), &n.to_vec(), theta, &j).unwrap();
        assert!(
            (oracle - pinned).norm() < 1e-6,
            "m={m:?} n={n:?} theta={theta}: oracle {oracle} vs pinned {pinned}"
        );
    }
}

#[test]
fn oracle_normalization_makes_zero_mode_unit() {
    let j = DeformationMatrix::standard2();
    let v = oracle_phase(&[0, 0], &[0, 0], 1.3, &j);
    assert!((v - Cx::new(1.0, 0.0)).norm() < 1e-8, "unit value {v}");
}

#[test]
fn kappa_is_one() {
    // the measured convention constant: phase argument / (theta m.Jn)
    let j = DeformationMatrix::standard2();
    let (m, n, theta) = ([1i64, 0], [0i64, 1], 0.6f64);
    let v = oracle_phase(&m, &n, theta, &j);
    let arg = v.im.atan2(v.re);
    let mjn = j.pairing(&m.to_vec(), &n.to_vec());
    assert!(
        (arg / (theta * mjn) - KAPPA).abs() < 1e-6,
        "measured kappa {}",
        arg / (theta * mjn)
    );
}
