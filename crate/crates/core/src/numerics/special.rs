//! Gamma, Gauss hypergeometric series, Cardy's formula, and adaptive
//! Gauss-Kronrod quadrature for complex-valued integrands.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Lanczos approximation (g = 7, 9 terms), real positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        let s = (std::f64::consts::PI * x).sin();
        return std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    for (i, &c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        ln_gamma(x).exp()
    }
}

/// Gauss series for 2F1(a,b;c;x), |x| < 1 (used well inside the disk).
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..10_000 {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (1.0 + nf)) * x;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Normalization 3 Gamma(2/3) / Gamma(1/3)^2 of Cardy's formula.
pub fn cardy_c0() -> f64 {
    3.0 * gamma(2.0 / 3.0) / (gamma(1.0 / 3.0) * gamma(1.0 / 3.0))
}

/// Cardy's crossing probability c0 m^{1/3} 2F1(1/3, 2/3; 4/3; m).
pub fn cardy_probability(m: f64) -> Result<f64> {
    if !(0.0 < m && m < 1.0) {
        return Err(Error::OutOfRange { value: m, range: "0 < m < 1" });
    }
    if m > 0.5 {
        // duality P(m) + P(1-m) = 1 keeps the series well conditioned
        return Ok(1.0 - cardy_probability(1.0 - m)?);
    }
    Ok(cardy_c0() * m.powf(1.0 / 3.0) * hyp2f1(1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, m))
}

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let fs = f(c - x) + f(c + x);
        kron += WGK[i] * fs;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fs;
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

/// Adaptive bisection of [a, b] until the local Kronrod error estimates sum
/// below `tol`.
pub fn integrate_complex(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Complex64> {
    fn rec(
        f: &dyn Fn(f64) -> Complex64,
        a: f64,
        b: f64,
        tol: f64,
        depth: u32,
    ) -> Result<Complex64> {
        let (val, err) = gk15(f, a, b);
        if err <= tol || err <= 1e-16 * val.norm() {
            return Ok(val);
        }
        if depth >= 40 {
            return Err(Error::QuadratureFailure(err));
        }
        let c = 0.5 * (a + b);
        Ok(rec(f, a, c, 0.5 * tol, depth + 1)? + rec(f, c, b, 0.5 * tol, depth + 1)?)
    }
    rec(f, a, b, tol, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((gamma(5.0) - 24.0).abs() < 1e-11);
        // Beta(1/3, 1/3)
        let g = gamma(1.0 / 3.0) * gamma(1.0 / 3.0) / gamma(2.0 / 3.0);
        assert!((g - 5.2999162508563498719).abs() < 1e-12, "g = {g}");
    }

    #[test]
    fn hyp2f1_frozen_value() {
        let v = hyp2f1(1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, 0.25);
        assert!((v - 1.0475668613496201261).abs() < 1e-14, "v = {v}");
    }

    #[test]
    fn cardy_c0_frozen() {
        assert!((cardy_c0() - 0.56604668036315970045).abs() < 1e-14);
    }

    #[test]
    fn cardy_symmetry_and_frozen_values() {
        assert!((cardy_probability(0.5).unwrap() - 0.5).abs() < 1e-14);
        for m in [0.1, 0.25, 0.4] {
            let s = cardy_probability(m).unwrap() + cardy_probability(1.0 - m).unwrap();
            assert!((s - 1.0).abs() < 1e-14, "m = {m}");
        }
        let frozen = [
            (0.1, 0.2673370068503834158),
            (0.25, 0.37354879133423045443),
            (0.4, 0.45202376302624517392),
            (0.75, 0.62645120866576954557),
        ];
        for (m, p) in frozen {
            let v = cardy_probability(m).unwrap();
            assert!((v - p).abs() < 1e-14, "m = {m}: {v} vs {p}");
        }
    }

    #[test]
    fn cardy_monotone_and_endpoints() {
        let mut prev = 0.0;
        for i in 1..100 {
            let m = i as f64 / 100.0;
            let p = cardy_probability(m).unwrap();
            assert!(p > prev);
            prev = p;
        }
        assert!(cardy_probability(1e-9).unwrap() < 1e-2);
        assert!(cardy_probability(1.0 - 1e-9).unwrap() > 1.0 - 1e-2);
        assert!(cardy_probability(0.0).is_err());
        assert!(cardy_probability(1.0).is_err());
    }

    #[test]
    fn cardy_matches_quadrature_oracle() {
        // independent oracle: P(m) = int_0^m t^{-2/3}(1-t)^{-2/3} dt / B(1/3,1/3),
        // with the endpoint singularity removed by t = s^3
        let beta = gamma(1.0 / 3.0) * gamma(1.0 / 3.0) / gamma(2.0 / 3.0);
        for m in [0.1, 0.25, 0.4, 0.5] {
            let f = move |s: f64| {
                Complex64::new(3.0 * (1.0 - m * s * s * s).powf(-2.0 / 3.0), 0.0)
            };
            let integral =
                integrate_complex(&f, 0.0, 1.0, 1e-12).unwrap().re * m.powf(1.0 / 3.0);
            let oracle = integral / beta;
            let p = cardy_probability(m).unwrap();
            assert!((p - oracle).abs() < 1e-10, "m = {m}: {p} vs {oracle}");
        }
    }

    #[test]
    fn quadrature_exactness() {
        let v = integrate_complex(&|x| Complex64::new(x * x, x), 0.0, 1.0, 1e-13).unwrap();
        assert!((v.re - 1.0 / 3.0).abs() < 1e-14);
        assert!((v.im - 0.5).abs() < 1e-14);
        let osc = integrate_complex(&|x| Complex64::new((50.0 * x).sin(), 0.0), 0.0, 1.0, 1e-12)
            .unwrap();
        let exact = (1.0 - (50.0f64).cos()) / 50.0;
        assert!((osc.re - exact).abs() < 1e-11);
    }
}
