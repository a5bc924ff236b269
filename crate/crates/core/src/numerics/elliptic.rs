//! Jacobi theta functions, the elliptic sn map for rectangles, the truncated
//! Weierstrass product, and the doubly periodic two-pole kernel.

use crate::error::{Error, Result};
use num_complex::Complex64;

const MAX_TERMS: usize = 600;

/// theta_1(v | q) = 2 sum (-1)^n q^{(n+1/2)^2} sin((2n+1) v)
pub fn theta1(v: Complex64, q: Complex64) -> Complex64 {
    let lq = q.ln();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sign = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64 + 0.5;
        let term = (lq * nf * nf).exp() * ((2.0 * n as f64 + 1.0) * v).sin() * sign;
        sum += term;
        if n > 2 && term.norm() < 1e-18 * (1.0 + sum.norm()) {
            break;
        }
        sign = -sign;
    }
    2.0 * sum
}

pub fn theta2(v: Complex64, q: Complex64) -> Complex64 {
    let lq = q.ln();
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..MAX_TERMS {
        let nf = n as f64 + 0.5;
        let term = (lq * nf * nf).exp() * ((2.0 * n as f64 + 1.0) * v).cos();
        sum += term;
        if n > 2 && term.norm() < 1e-18 * (1.0 + sum.norm()) {
            break;
        }
    }
    2.0 * sum
}

pub fn theta3(v: Complex64, q: Complex64) -> Complex64 {
    let lq = q.ln();
    let mut sum = Complex64::new(1.0, 0.0);
    for n in 1..MAX_TERMS {
        let nf = n as f64;
        let term = (lq * nf * nf).exp() * (2.0 * nf * v).cos() * 2.0;
        sum += term;
        if n > 2 && term.norm() < 1e-18 * (1.0 + sum.norm()) {
            break;
        }
    }
    sum
}

pub fn theta4(v: Complex64, q: Complex64) -> Complex64 {
    let lq = q.ln();
    let mut sum = Complex64::new(1.0, 0.0);
    let mut sign = -1.0;
    for n in 1..MAX_TERMS {
        let nf = n as f64;
        let term = (lq * nf * nf).exp() * (2.0 * nf * v).cos() * 2.0 * sign;
        sum += term;
        if n > 2 && term.norm() < 1e-18 * (1.0 + sum.norm()) {
            break;
        }
        sign = -sign;
    }
    sum
}

/// theta_1'(0 | q)
pub fn theta1_dv0(q: Complex64) -> Complex64 {
    let lq = q.ln();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sign = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64 + 0.5;
        let m = 2.0 * n as f64 + 1.0;
        let term = (lq * nf * nf).exp() * m * sign;
        sum += term;
        if n > 2 && term.norm() < 1e-18 * (1.0 + sum.norm()) {
            break;
        }
        sign = -sign;
    }
    2.0 * sum
}

/// theta_1'''(0 | q)
pub fn theta1_d3v0(q: Complex64) -> Complex64 {
    let lq = q.ln();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sign = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64 + 0.5;
        let m = 2.0 * n as f64 + 1.0;
        let term = (lq * nf * nf).exp() * m * m * m * sign;
        sum += term;
        if n > 2 && term.norm() < 1e-18 * (1.0 + sum.norm()) {
            break;
        }
        sign = -sign;
    }
    -2.0 * sum
}

/// Jacobi elliptic parameters derived from a real nome q in (0,1).
#[derive(Debug, Clone, Copy)]
pub struct JacobiNome {
    pub q: f64,
    pub k: f64,
    pub big_k: f64,
    pub big_k_prime: f64,
}

impl JacobiNome {
    pub fn from_nome(q: f64) -> Result<Self> {
        if !(0.0 < q && q < 1.0) {
            return Err(Error::OutOfRange { value: q, range: "0 < q < 1" });
        }
        let qc = Complex64::new(q, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let t2 = theta2(zero, qc).re;
        let t3 = theta3(zero, qc).re;
        let k = (t2 / t3).powi(2);
        let big_k = std::f64::consts::FRAC_PI_2 * t3 * t3;
        let big_k_prime = big_k * (-q.ln()) / std::f64::consts::PI;
        Ok(JacobiNome { q, k, big_k, big_k_prime })
    }

    /// sn(u) = (theta_3 / theta_2) theta_1(v) / theta_4(v), v = pi u / (2K).
    pub fn sn(&self, u: Complex64) -> Complex64 {
        let qc = Complex64::new(self.q, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let v = u * std::f64::consts::PI / (2.0 * self.big_k);
        let t3 = theta3(zero, qc);
        let t2 = theta2(zero, qc);
        (t3 / t2) * theta1(v, qc) / theta4(v, qc)
    }
}

/// Complete elliptic integral K(k) by the arithmetic-geometric mean.
pub fn agm_big_k(k: f64) -> f64 {
    let kp = (1.0 - k * k).sqrt();
    let (mut a, mut g) = (1.0f64, kp);
    for _ in 0..60 {
        let an = 0.5 * (a + g);
        let gn = (a * g).sqrt();
        if (a - g).abs() < 1e-17 * a {
            break;
        }
        a = an;
        g = gn;
    }
    std::f64::consts::FRAC_PI_2 / a
}

/// Solves K(k') / K(k) = ratio for k by bisection.
pub fn modulus_from_ratio(ratio: f64) -> f64 {
    let f = |k: f64| {
        let kp = (1.0 - k * k).sqrt();
        agm_big_k(kp) / agm_big_k(k) - ratio
    };
    let (mut lo, mut hi) = (1e-15, 1.0 - 1e-15);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Truncated Weierstrass product over lattice points ja + kb, |j|,|k| <= M.
pub fn weierstrass_sigma(z: Complex64, a: Complex64, b: Complex64, m: u32) -> Complex64 {
    let mut acc = z;
    let mi = m as i32;
    for j in -mi..=mi {
        for k in -mi..=mi {
            if j == 0 && k == 0 {
                continue;
            }
            let w = a * j as f64 + b * k as f64;
            let r = z / w;
            acc *= (1.0 - r) * (r + r * r * 0.5).exp();
        }
    }
    acc
}

fn nome_of_periods(a: Complex64, b: Complex64) -> Result<(Complex64, Complex64)> {
    let tau = b / a;
    if tau.im.abs() < 1e-12 {
        return Err(Error::InvalidSpec("periods linearly dependent".into()));
    }
    let b = if tau.im < 0.0 { -b } else { b };
    let tau = b / a;
    let q = (Complex64::new(0.0, std::f64::consts::PI) * tau).exp();
    Ok((q, b))
}

/// Weierstrass sigma through theta_1 (exact quasi-periodicity; used as the
/// converged reference for the truncated product).
pub fn sigma_theta(z: Complex64, a: Complex64, b: Complex64) -> Result<Complex64> {
    let (q, _) = nome_of_periods(a, b)?;
    let d1 = theta1_dv0(q);
    let eta1 = -std::f64::consts::PI * std::f64::consts::PI / (6.0 * a) * theta1_d3v0(q) / d1;
    let v = z * std::f64::consts::PI / a;
    Ok(a / std::f64::consts::PI * (eta1 * z * z / a).exp() * theta1(v, q) / d1)
}

/// Doubly periodic kernel with two simple poles:
/// g(z) = sigma(z - s)^2 / (sigma(z - p1) sigma(z - p2)), s = (p1 + p2)/2.
#[derive(Debug, Clone, Copy)]
pub struct EllipticKernel {
    pub a: Complex64,
    pub b: Complex64,
    pub p1: Complex64,
    pub p2: Complex64,
    pub truncation_order: u32,
}

impl EllipticKernel {
    pub fn new(
        a: Complex64,
        b: Complex64,
        p1: Complex64,
        p2: Complex64,
        truncation_order: u32,
    ) -> Result<Self> {
        nome_of_periods(a, b)?;
        if (p1 - p2).norm() < 1e-12 {
            return Err(Error::InvalidSpec("kernel poles must be distinct".into()));
        }
        Ok(EllipticKernel { a, b, p1, p2, truncation_order })
    }

    /// Distance from z to the nearest pole, modulo the period lattice.
    pub fn pole_distance(&self, z: Complex64) -> f64 {
        let mut best = f64::INFINITY;
        for p in [self.p1, self.p2] {
            let d = z - p;
            // solve d = alpha a + beta b over the reals
            let det = self.a.re * self.b.im - self.a.im * self.b.re;
            let alpha = (d.re * self.b.im - d.im * self.b.re) / det;
            let beta = (self.a.re * d.im - self.a.im * d.re) / det;
            let fa = alpha - alpha.round();
            let fb = beta - beta.round();
            // scan the 3x3 neighborhood in case rounding picked a non-nearest cell
            for da in -1..=1 {
                for db in -1..=1 {
                    let r = self.a * (fa + da as f64) + self.b * (fb + db as f64);
                    best = best.min(r.norm());
                }
            }
        }
        best
    }

    /// Production evaluation: theta_1 quotient, exactly doubly periodic, equal
    /// to the infinite-product sigma quotient.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let d = self.pole_distance(z);
        if d < 1e-12 {
            return Err(Error::NearPole(d));
        }
        let (q, _) = nome_of_periods(self.a, self.b)?;
        let d1 = theta1_dv0(q);
        let eta1 =
            -std::f64::consts::PI * std::f64::consts::PI / (6.0 * self.a) * theta1_d3v0(q) / d1;
        let s = 0.5 * (self.p1 + self.p2);
        let scale = std::f64::consts::PI / self.a;
        let t_num = theta1((z - s) * scale, q);
        let t_d1 = theta1((z - self.p1) * scale, q);
        let t_d2 = theta1((z - self.p2) * scale, q);
        // 2(z-s)^2 - (z-p1)^2 - (z-p2)^2 = -(p1-p2)^2 / 2
        let dp = self.p1 - self.p2;
        let quad = (-eta1 * dp * dp / (2.0 * self.a)).exp();
        Ok(quad * t_num * t_num / (t_d1 * t_d2))
    }

    /// The spec's defining expression with the truncated product sigma.
    pub fn evaluate_product(&self, z: Complex64) -> Complex64 {
        let s = 0.5 * (self.p1 + self.p2);
        let num = weierstrass_sigma(z - s, self.a, self.b, self.truncation_order);
        let d1 = weierstrass_sigma(z - self.p1, self.a, self.b, self.truncation_order);
        let d2 = weierstrass_sigma(z - self.p2, self.a, self.b, self.truncation_order);
        num * num / (d1 * d2)
    }

    /// Residue at pole 0 or 1 via Richardson extrapolation of (z - p) g(z).
    pub fn residue(&self, which: usize) -> Result<Complex64> {
        let p = if which == 0 { self.p1 } else { self.p2 };
        let dir = (self.a + self.b) / (self.a + self.b).norm();
        let scale = self.a.norm().min(self.b.norm());
        let mut h = 0.05 * scale;
        let mut vals = Vec::new();
        for _ in 0..6 {
            let z = p + dir * h;
            vals.push(dir * h * self.evaluate(z)?);
            h *= 0.5;
        }
        // Neville extrapolation to h = 0 with nodes h, h/2, ...
        let n = vals.len();
        let hs: Vec<f64> = (0..n).map(|i| 0.05 * scale / (1 << i) as f64).collect();
        let mut table = vals.clone();
        for level in 1..n {
            for i in 0..n - level {
                let (h0, h1) = (hs[i], hs[i + level]);
                table[i] = (table[i + 1] * h0 - table[i] * h1) / (h0 - h1);
            }
        }
        Ok(table[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn frozen_sn_reference() {
        // q = e^{-0.682 pi}
        let j = JacobiNome::from_nome((-0.682 * std::f64::consts::PI).exp()).unwrap();
        assert!((j.k - 0.923200317617942518).abs() < TOL, "k = {}", j.k);
        assert!((j.big_k - 2.39615129109143142).abs() < TOL, "K = {}", j.big_k);
        let u = Complex64::new(0.3 * j.big_k, 0.2 * j.big_k);
        let v = j.sn(u);
        let want = Complex64::new(0.713284850884291381, 0.30396072513353971);
        assert!((v - want).norm() < 1e-12, "sn = {v}");
    }

    #[test]
    fn sn_rectangle_corners() {
        let j = JacobiNome::from_nome(0.05).unwrap();
        let k = j.big_k;
        let kp = j.big_k_prime;
        assert!((j.sn(Complex64::new(k, 0.0)) - 1.0).norm() < 1e-10);
        assert!((j.sn(Complex64::new(-k, 0.0)) + 1.0).norm() < 1e-10);
        assert!((j.sn(Complex64::new(k, kp)) - 1.0 / j.k).norm() < 1e-9);
        assert!((j.sn(Complex64::new(-k, kp)) + 1.0 / j.k).norm() < 1e-9);
        assert!(j.sn(Complex64::new(0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn agm_matches_theta_route() {
        for q in [0.01, 0.05, 0.2] {
            let j = JacobiNome::from_nome(q).unwrap();
            let k_agm = agm_big_k(j.k);
            assert!((k_agm - j.big_k).abs() < 1e-12, "q = {q}");
            let ratio = j.big_k_prime / j.big_k;
            let k2 = modulus_from_ratio(ratio);
            assert!((k2 - j.k).abs() < 1e-10, "q = {q}: {k2} vs {}", j.k);
        }
    }

    #[test]
    fn sigma_odd_and_leading() {
        let a = Complex64::new(1.0, 0.0);
        let b = Complex64::new(0.3, 1.1);
        for pt in 0..10 {
            let z = Complex64::new(0.04 * pt as f64 + 0.03, 0.05 * pt as f64 - 0.2);
            let s = weierstrass_sigma(z, a, b, 20);
            let sm = weierstrass_sigma(-z, a, b, 20);
            assert!((s + sm).norm() < 1e-12 * s.norm(), "z = {z}");
        }
        let tiny = Complex64::new(1e-8, 1e-8);
        let ratio = weierstrass_sigma(tiny, a, b, 20) / tiny;
        assert!((ratio - 1.0).norm() < 1e-7);
        assert!(weierstrass_sigma(Complex64::new(0.0, 0.0), a, b, 20).norm() == 0.0);
    }

    #[test]
    fn sigma_product_plateaus_toward_theta() {
        let a = Complex64::new(1.0, 0.0);
        let b = Complex64::new(0.2, 1.0);
        let z = Complex64::new(0.31, 0.17);
        let exact = sigma_theta(z, a, b).unwrap();
        let m20 = weierstrass_sigma(z, a, b, 20);
        let m40 = weierstrass_sigma(z, a, b, 40);
        let m80 = weierstrass_sigma(z, a, b, 80);
        let e20 = (m20 - exact).norm() / exact.norm();
        let e40 = (m40 - exact).norm() / exact.norm();
        let e80 = (m80 - exact).norm() / exact.norm();
        assert!(e40 < e20 && e80 < e40, "{e20} {e40} {e80}");
        // third-order lattice sums converge like 1/M^2
        assert!(e40 < 0.5 * e20 && e80 < 0.5 * e40);
        assert!(e80 < 1e-4);
    }

    #[test]
    fn kernel_periodicity_exact() {
        let a = Complex64::new(1.0, 0.0);
        let b = Complex64::new(0.25, 0.9);
        let ker = EllipticKernel::new(
            a,
            b,
            Complex64::new(0.21, 0.33),
            Complex64::new(0.62, 0.48),
            40,
        )
        .unwrap();
        for t in 0..20 {
            let z = Complex64::new(0.045 * t as f64 - 0.3, 0.06 * t as f64 - 0.4);
            if ker.pole_distance(z) < 0.05 {
                continue;
            }
            let g = ker.evaluate(z).unwrap();
            for period in [a, b] {
                let gp = ker.evaluate(z + period).unwrap();
                assert!((gp - g).norm() <= 1e-8 * g.norm(), "z = {z}: {g} vs {gp}");
            }
        }
    }

    #[test]
    fn kernel_matches_product_form() {
        let a = Complex64::new(1.0, 0.0);
        let b = Complex64::new(0.25, 0.9);
        let ker = EllipticKernel::new(
            a,
            b,
            Complex64::new(0.21, 0.33),
            Complex64::new(0.62, 0.48),
            80,
        )
        .unwrap();
        for t in 0..8 {
            let z = Complex64::new(0.09 * t as f64 - 0.3, 0.07 * t as f64 - 0.1);
            if ker.pole_distance(z) < 0.1 {
                continue;
            }
            let g = ker.evaluate(z).unwrap();
            let gp = ker.evaluate_product(z);
            assert!((gp - g).norm() < 2e-4 * g.norm(), "z = {z}: {g} vs {gp}");
        }
    }

    #[test]
    fn kernel_double_zero_and_residues() {
        let a = Complex64::new(1.0, 0.0);
        let b = Complex64::new(0.1, 1.2);
        let p1 = Complex64::new(0.2, 0.4);
        let p2 = Complex64::new(0.55, 0.7);
        let ker = EllipticKernel::new(a, b, p1, p2, 40).unwrap();
        let s = 0.5 * (p1 + p2);
        assert!(ker.evaluate(s).unwrap().norm() < 1e-10);
        let r1 = ker.residue(0).unwrap();
        let r2 = ker.residue(1).unwrap();
        assert!(r1.norm() > 1e-6 && r2.norm() > 1e-6);
        assert!((r1 + r2).norm() < 1e-6 * r1.norm().max(r2.norm()), "{r1} {r2}");
        // analytic residue: sigma((p1-p2)/2)^2 / sigma(p1-p2)
        let d = p1 - p2;
        let want = sigma_theta(d / 2.0, a, b).unwrap().powi(2) / sigma_theta(d, a, b).unwrap();
        assert!((r1 - want).norm() < 1e-7 * want.norm(), "{r1} vs {want}");
    }

    #[test]
    fn kernel_near_pole_rejected() {
        let ker = EllipticKernel::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.3, 0.3),
            Complex64::new(0.6, 0.6),
            20,
        )
        .unwrap();
        assert!(matches!(
            ker.evaluate(Complex64::new(0.3, 0.3) + Complex64::new(1.0, 1.0)),
            Err(Error::NearPole(_))
        ));
    }
}
