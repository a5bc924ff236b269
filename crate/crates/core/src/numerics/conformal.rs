//! Conformal limits: the half-plane to equilateral-triangle integral, the
//! half-annulus map, cross-ratios of 4-pointed catalog domains, and composed
//! map descriptors with marked-point bookkeeping.

use crate::error::{Error, Result};
use crate::geometry::{DomainKind, DomainSpec};
use crate::numerics::elliptic::JacobiNome;
use crate::numerics::special::{gamma, integrate_complex};
use num_complex::Complex64;
use std::f64::consts::PI;

/// tau = exp(2 pi i / 3)
pub fn tau() -> Complex64 {
    Complex64::new(-0.5, 0.5 * crate::geometry::SQRT3)
}

/// Side length G = Beta(1/3, 1/3) of the image triangle of the raw integral.
pub fn triangle_side() -> f64 {
    let g3 = gamma(1.0 / 3.0);
    g3 * g3 / gamma(2.0 / 3.0)
}

/// Apex G e^{i pi / 3} of the raw image triangle.
pub fn triangle_apex() -> Complex64 {
    Complex64::from_polar(triangle_side(), PI / 3.0)
}

/// z^p with the branch cut just below the negative real axis: negative real
/// arguments take argument +pi (upper-half-plane limit).
fn powu(z: Complex64, p: f64) -> Complex64 {
    if z.im == 0.0 && z.re < 0.0 {
        Complex64::from_polar((-z.re).powf(p), PI * p)
    } else if z.im == 0.0 {
        Complex64::new(z.re.powf(p), 0.0)
    } else {
        z.powf(p)
    }
}

/// z^p with negative real arguments taking argument -pi.
fn powl(z: Complex64, p: f64) -> Complex64 {
    if z.im == 0.0 && z.re < 0.0 {
        Complex64::from_polar((-z.re).powf(p), -PI * p)
    } else if z.im == 0.0 {
        Complex64::new(z.re.powf(p), 0.0)
    } else {
        z.powf(p)
    }
}

const SC_TOL: f64 = 1e-12;

/// F(w) = int_0^w t^{-2/3} (1 - t)^{-2/3} dt on the closed upper half plane,
/// mapping 0, 1, infinity to 0, G, G e^{i pi/3}.
///
/// Three charts remove the endpoint singularities by the substitution
/// t = w s^3 (and its counterparts anchored at 1 and infinity).
pub fn sc_integral(w: Complex64) -> Result<Complex64> {
    if !w.re.is_finite() || !w.im.is_finite() || w.norm() > 1e9 {
        // the vertex at infinity; genuine arguments this large only arise
        // from points within ~1e-9 of the corresponding domain corner
        return Ok(triangle_apex());
    }
    let w = if w.im < 0.0 {
        if w.im > -1e-9 {
            Complex64::new(w.re, 0.0)
        } else {
            return Err(Error::OutOfDomain);
        }
    } else {
        w
    };
    // the cube root at the finite vertices amplifies roundoff in w; snap
    // sub-roundoff arguments to the vertex itself
    if w.norm() < 1e-14 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if (w - 1.0).norm() < 1e-14 {
        return Ok(Complex64::new(triangle_side(), 0.0));
    }
    if w.norm() > 2.0 {
        // anchor at infinity
        let head = 3.0 * powu(w, 1.0 / 3.0) * powl(-w, -2.0 / 3.0);
        let tail = integrate_complex(
            &|u| {
                let t = 1.0 - u * u * u / w;
                powu(t, -2.0 / 3.0)
            },
            0.0,
            1.0,
            SC_TOL,
        )?;
        Ok(triangle_apex() - head * tail)
    } else if (w - 1.0).norm() <= w.norm() {
        // anchor at 1
        let head = 3.0 * powl(1.0 - w, 1.0 / 3.0);
        let tail = integrate_complex(
            &|s| {
                let t = 1.0 - (1.0 - w) * s * s * s;
                powu(t, -2.0 / 3.0)
            },
            0.0,
            1.0,
            SC_TOL,
        )?;
        Ok(Complex64::new(triangle_side(), 0.0) - head * tail)
    } else {
        // anchor at 0
        let head = 3.0 * powu(w, 1.0 / 3.0);
        let tail = integrate_complex(
            &|s| {
                let t = 1.0 - w * s * s * s;
                powl(t, -2.0 / 3.0)
            },
            0.0,
            1.0,
            SC_TOL,
        )?;
        Ok(head * tail)
    }
}

/// Normalized map onto the unit triangle T(0, 1, e^{i pi/3}).
pub fn sc_half_plane_to_triangle(w: Complex64) -> Result<Complex64> {
    Ok(sc_integral(w)? / triangle_side())
}

/// One primitive stage of a composed numerical conformal map.
#[derive(Debug, Clone, Copy)]
pub enum Stage {
    Affine { mul: Complex64, add: Complex64 },
    Log,
    /// z + 1/z
    Joukowski,
    Power { p: f64 },
    Mobius { a: Complex64, b: Complex64, c: Complex64, d: Complex64 },
    JacobiSn { nome: f64 },
    ScTriangle,
}

impl Stage {
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        Ok(match *self {
            Stage::Affine { mul, add } => mul * z + add,
            Stage::Log => z.ln(),
            Stage::Joukowski => z + 1.0 / z,
            Stage::Power { p } => powu(z, p),
            Stage::Mobius { a, b, c, d } => {
                if !z.re.is_finite() || !z.im.is_finite() {
                    a / c
                } else {
                    (a * z + b) / (c * z + d)
                }
            }
            Stage::JacobiSn { nome } => JacobiNome::from_nome(nome)?.sn(z),
            Stage::ScTriangle => sc_half_plane_to_triangle(z)?,
        })
    }
}

/// A composed numerical conformal map with marked-point correspondence.
#[derive(Debug, Clone)]
pub struct MapDescriptor {
    pub stages: Vec<Stage>,
    /// (domain marked point, image point) pairs.
    pub marked_correspondence: Vec<(Complex64, Complex64)>,
}

pub const TOL_MAP: f64 = 1e-8;

impl MapDescriptor {
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let mut w = z;
        for stage in &self.stages {
            w = stage.evaluate(w)?;
        }
        Ok(w)
    }

    /// Central finite-difference derivative.
    pub fn derivative(&self, z: Complex64, h: f64) -> Result<Complex64> {
        let hp = Complex64::new(h, 0.0);
        Ok((self.evaluate(z + hp)? - self.evaluate(z - hp)?) / (2.0 * h))
    }

    /// Finite-difference dbar / |dz| residual at z (conformality check).
    pub fn cauchy_riemann_residual(&self, z: Complex64, h: f64) -> Result<f64> {
        let fx = (self.evaluate(z + Complex64::new(h, 0.0))?
            - self.evaluate(z - Complex64::new(h, 0.0))?)
            / (2.0 * h);
        let fy = (self.evaluate(z + Complex64::new(0.0, h))?
            - self.evaluate(z - Complex64::new(0.0, h))?)
            / (2.0 * h);
        let dbar = (fx + Complex64::i() * fy) * 0.5;
        let dz = (fx - Complex64::i() * fy) * 0.5;
        Ok(dbar.norm() / dz.norm().max(1e-300))
    }

    /// Max deviation of evaluate(marked) from the stated image.
    pub fn marked_error(&self) -> f64 {
        self.marked_correspondence
            .iter()
            .map(|&(z, w)| self.evaluate(z).map(|v| (v - w).norm()).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

/// phi_{r,R}: half annulus {r <= |z| <= R, Im z >= 0} onto T(0, 1, e^{i pi/3})
/// sending -R, -r, R to e^{i pi/3}, 0, 1.
///
/// Route: z/R, log onto the rectangle [-L,0]x[0,pi], affine onto the sn
/// rectangle [-K,K]x[0,K'], sn onto the half plane, then a Moebius fixing the
/// three marked images followed by the triangle integral.
pub fn half_annulus_descriptor(r: f64, big_r: f64) -> Result<MapDescriptor> {
    if !(0.0 < r && r < big_r) {
        return Err(Error::OutOfRange { value: r, range: "0 < r < R" });
    }
    let l = (big_r / r).ln();
    let q = (-2.0 * PI * PI / l).exp();
    let j = JacobiNome::from_nome(q)?;
    let (k, big_k) = (j.k, j.big_k);
    let scale = 2.0 * big_k / l;
    let c1 = Complex64::new(1.0 - 1.0 / k, 0.0);
    let c2 = Complex64::new(1.0 + 1.0 / k, 0.0);
    let stages = vec![
        Stage::Affine { mul: Complex64::new(1.0 / big_r, 0.0), add: Complex64::new(0.0, 0.0) },
        Stage::Log,
        Stage::Affine { mul: Complex64::new(scale, 0.0), add: Complex64::new(big_k, 0.0) },
        Stage::JacobiSn { nome: q },
        // (w + 1/k)(1 - 1/k) / ((w - 1/k)(1 + 1/k)): -1/k, 1, 1/k -> 0, 1, inf
        Stage::Mobius { a: c1, b: c1 / k, c: c2, d: -c2 / k },
        Stage::ScTriangle,
    ];
    Ok(MapDescriptor {
        stages,
        marked_correspondence: vec![
            (Complex64::new(-big_r, 0.0), Complex64::from_polar(1.0, PI / 3.0)),
            (Complex64::new(-r, 0.0), Complex64::new(0.0, 0.0)),
            (Complex64::new(big_r, 0.0), Complex64::new(1.0, 0.0)),
        ],
    })
}

pub fn half_annulus_map(r: f64, big_r: f64, z: Complex64) -> Result<Complex64> {
    if z.im < -1e-9 || z.norm() < r * (1.0 - 1e-9) || z.norm() > big_r * (1.0 + 1e-9) {
        return Err(Error::OutOfDomain);
    }
    let z = if z.im < 0.0 { Complex64::new(z.re, 0.0) } else { z };
    half_annulus_descriptor(r, big_r)?.evaluate(z)
}

const INF_CUTOFF: f64 = 1e10;

/// Image of a domain (or boundary) point in the closed upper half plane, for
/// the kinds reducible by a single classical map.
pub fn upper_half_plane_image(spec: &DomainSpec, z: Complex64) -> Result<Complex64> {
    match spec.kind {
        DomainKind::Rectangle { aspect: a } => {
            // K'/K = 2/a, q = e^{-2 pi / a}
            let q = (-2.0 * PI / a).exp();
            let j = JacobiNome::from_nome(q)?;
            let u = Complex64::new(
                (2.0 * z.re / a - 1.0) * j.big_k,
                z.im * j.big_k_prime,
            );
            Ok(j.sn(u))
        }
        DomainKind::Disk { radius } => {
            // i (R - z) / (R + z): R -> 0, iR -> 1, -R -> inf
            Ok(Complex64::i() * (radius - z) / (radius + z))
        }
        DomainKind::HalfDisk { radius } => {
            // -(w + 1/w)/2 on w = z/R: R -> -1, 0 -> inf (two-sided), -R -> 1
            let w = z / radius;
            Ok(-(w + 1.0 / w) * 0.5)
        }
        DomainKind::HalfAnnulus { inner, outer } => {
            let l = (outer / inner).ln();
            let q = (-2.0 * PI * PI / l).exp();
            let j = JacobiNome::from_nome(q)?;
            let u = (z / outer).ln() * (2.0 * j.big_k / l) + j.big_k;
            Ok(j.sn(u))
        }
        DomainKind::Sector { angle } => {
            // open the corner with z^{pi/angle}, then the half-disk map
            let w = powu(z, PI / angle);
            Ok(-(w + 1.0 / w) * 0.5)
        }
        DomainKind::EquilateralTriangle { .. } => {
            Err(Error::UnsupportedDomain("no direct half-plane reduction for the triangle".into()))
        }
    }
}

/// Real boundary image with poles reported as +/- infinity magnitude.
fn boundary_real_image(spec: &DomainSpec, t: f64) -> Result<f64> {
    let w = upper_half_plane_image(spec, spec.boundary_point(t))?;
    if w.norm() > INF_CUTOFF || !w.re.is_finite() {
        return Ok(f64::INFINITY);
    }
    Ok(w.re)
}

fn cross_ratio_reals(w: [f64; 4]) -> f64 {
    let inf = |x: f64| !x.is_finite();
    let [a, b, c, d] = w;
    if inf(a) {
        (d - c) / (d - b)
    } else if inf(b) {
        -(d - c) / (c - a)
    } else if inf(c) {
        -(b - a) / (d - b)
    } else if inf(d) {
        (b - a) / (c - a)
    } else {
        ((b - a) * (d - c)) / ((c - a) * (d - b))
    }
}

/// Conformal cross-ratio in (0,1) of a 4-pointed catalog domain, normalized
/// so the AB <-> CD crossing probability increases with m.
pub fn cross_ratio(spec: &DomainSpec) -> Result<f64> {
    spec.validate()?;
    if spec.marked.len() != 4 {
        return Err(Error::WrongMarkedPointCount { expected: 4, found: spec.marked.len() });
    }
    let mut w = [0.0f64; 4];
    for (i, &t) in spec.marked.iter().enumerate() {
        w[i] = boundary_real_image(spec, t)?;
    }
    let m = cross_ratio_reals(w);
    if !(0.0 < m && m < 1.0) {
        return Err(Error::UnsupportedDomain(format!("cross ratio {m} outside (0,1)")));
    }
    Ok(m)
}

/// Normalized side coordinate of the fourth marked point under the map that
/// sends the first three to the triangle vertices (Carleson's form of the
/// crossing limit; equals cardy_probability(cross_ratio)).
pub fn carleson_coordinate(spec: &DomainSpec) -> Result<f64> {
    spec.validate()?;
    if spec.marked.len() != 4 {
        return Err(Error::WrongMarkedPointCount { expected: 4, found: spec.marked.len() });
    }
    let w: Vec<Complex64> = spec
        .marked
        .iter()
        .map(|&t| upper_half_plane_image(spec, spec.boundary_point(t)))
        .collect::<Result<_>>()?;
    // Moebius sending w0, w1, w2 -> 0, 1, inf; guard the poles of the chain
    let mu = |z: Complex64| -> Complex64 {
        let big = |x: Complex64| x.norm() > INF_CUTOFF;
        if big(w[0]) {
            (w[1] - w[2]) / (z - w[2])
        } else if big(w[1]) {
            (z - w[0]) / (z - w[2])
        } else if big(w[2]) {
            (z - w[0]) / (w[1] - w[0])
        } else if big(z) {
            (w[1] - w[2]) / (w[1] - w[0])
        } else {
            ((z - w[0]) * (w[1] - w[2])) / ((z - w[2]) * (w[1] - w[0]))
        }
    };
    let img = sc_half_plane_to_triangle(mu(w[3]))?;
    let apex = Complex64::from_polar(1.0, PI / 3.0);
    Ok((img - apex).norm() / apex.norm())
}

/// Map of a 3-pointed catalog domain onto the triangle T(1, tau, tau^2) with
/// marked points going to 1, tau, tau^2 in order.
pub fn triangle_map(spec: &DomainSpec) -> Result<MapDescriptor> {
    spec.validate()?;
    if spec.marked.len() != 3 {
        return Err(Error::WrongMarkedPointCount { expected: 3, found: spec.marked.len() });
    }
    let marked_pts: Vec<Complex64> = spec.marked.iter().map(|&t| spec.boundary_point(t)).collect();
    let images = [Complex64::new(1.0, 0.0), tau(), tau() * tau()];
    if let DomainKind::EquilateralTriangle { side } = spec.kind {
        let default = [0.0, 1.0 / 3.0, 2.0 / 3.0];
        let affine = spec
            .marked
            .iter()
            .zip(default)
            .all(|(&t, d)| (t - d).abs() < 1e-12);
        if affine {
            // corners map affinely: phi(z) = 1 + (tau - 1) z / side
            return Ok(MapDescriptor {
                stages: vec![Stage::Affine {
                    mul: (tau() - 1.0) / side,
                    add: Complex64::new(1.0, 0.0),
                }],
                marked_correspondence: marked_pts.into_iter().zip(images).collect(),
            });
        }
        return Err(Error::UnsupportedDomain(
            "triangle domain supports corner marked points only".into(),
        ));
    }
    let mut stages = match spec.kind {
        DomainKind::Rectangle { aspect: a } => {
            let q = (-2.0 * PI / a).exp();
            let j = JacobiNome::from_nome(q)?;
            let s = 2.0 * j.big_k / a;
            vec![
                Stage::Affine { mul: c64(s, 0.0), add: c64(-j.big_k, 0.0) },
                Stage::JacobiSn { nome: q },
            ]
        }
        DomainKind::Disk { radius } => vec![Stage::Mobius {
            a: -Complex64::i(),
            b: Complex64::i() * radius,
            c: c64(1.0, 0.0),
            d: c64(radius, 0.0),
        }],
        DomainKind::HalfDisk { radius } => vec![
            Stage::Affine { mul: c64(1.0 / radius, 0.0), add: c64(0.0, 0.0) },
            Stage::Joukowski,
            Stage::Affine { mul: c64(-0.5, 0.0), add: c64(0.0, 0.0) },
        ],
        DomainKind::HalfAnnulus { inner, outer } => {
            let l = (outer / inner).ln();
            let q = (-2.0 * PI * PI / l).exp();
            let j = JacobiNome::from_nome(q)?;
            vec![
                Stage::Affine { mul: c64(1.0 / outer, 0.0), add: c64(0.0, 0.0) },
                Stage::Log,
                Stage::Affine { mul: c64(2.0 * j.big_k / l, 0.0), add: c64(j.big_k, 0.0) },
                Stage::JacobiSn { nome: q },
            ]
        }
        DomainKind::Sector { angle } => vec![
            Stage::Power { p: PI / angle },
            Stage::Joukowski,
            Stage::Affine { mul: c64(-0.5, 0.0), add: c64(0.0, 0.0) },
        ],
        DomainKind::EquilateralTriangle { .. } => unreachable!(),
    };
    let prefix = MapDescriptor { stages: stages.clone(), marked_correspondence: vec![] };
    let w: Vec<Complex64> = marked_pts.iter().map(|&p| prefix.evaluate(p)).collect::<Result<_>>()?;
    let big = |x: Complex64| x.norm() > INF_CUTOFF;
    let zero = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    let mobius = if big(w[0]) {
        Stage::Mobius { a: zero, b: w[1] - w[2], c: one, d: -w[2] }
    } else if big(w[1]) {
        Stage::Mobius { a: one, b: -w[0], c: one, d: -w[2] }
    } else if big(w[2]) {
        Stage::Mobius { a: one, b: -w[0], c: zero, d: w[1] - w[0] }
    } else {
        Stage::Mobius {
            a: w[1] - w[2],
            b: -w[0] * (w[1] - w[2]),
            c: w[1] - w[0],
            d: -w[2] * (w[1] - w[0]),
        }
    };
    stages.push(mobius);
    stages.push(Stage::ScTriangle);
    stages.push(Stage::Affine { mul: tau() - 1.0, add: one });
    Ok(MapDescriptor {
        stages,
        marked_correspondence: marked_pts.into_iter().zip(images).collect(),
    })
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::special::cardy_probability;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sc_frozen_reference_values() {
        let cases = [
            (c(0.3, 0.4), c(2.29038816559931039, 0.945798530861347264)),
            (c(0.9, 0.05), c(3.84928496859871707, 0.239453379214257649)),
            (c(5.0, 3.0), c(3.19884538422375943, 2.97073998487382181)),
            (c(-2.5, 0.0), c(1.60712989450560296, 2.78363063164651419)),
            (c(3.0, 0.0), c(3.75945535785868072, 2.66815653374488672)),
            (c(1.7, 0.0), c(4.08688825325457284, 2.10102612284981606)),
            (c(-0.8, 0.0), c(1.25479022221245579, 2.17336041771261504)),
            (c(0.5, 0.0), c(2.64995812542817494, 0.0)),
            (c(0.1, 0.9), c(2.28463090312590704, 1.64639922855305503)),
            (c(0.0, 1.0), c(2.24931136464856752, 1.76126755224325081)),
        ];
        for (w, want) in cases {
            let v = sc_integral(w).unwrap();
            assert!((v - want).norm() < 1e-10, "w = {w}: {v} vs {want}");
        }
    }

    #[test]
    fn sc_vertices_and_midpoint() {
        assert!(sc_integral(c(0.0, 0.0)).unwrap().norm() < 1e-12);
        let g = triangle_side();
        assert!((sc_integral(c(1.0, 0.0)).unwrap() - g).norm() < 1e-10);
        assert!((g - 5.2999162508563498719).abs() < 1e-12);
        // w = 1/2 is the fixed point of the reflection symmetry
        let mid = sc_half_plane_to_triangle(c(0.5, 0.0)).unwrap();
        assert!((mid - 0.5).norm() < 1e-12, "mid = {mid}");
        assert!(sc_integral(c(0.0, -1.0)).is_err());
    }

    #[test]
    fn sc_vertex_angles() {
        // boundary tangents turn by 2pi/3 at each vertex (interior angle pi/3)
        let g = triangle_side();
        let apex = triangle_apex();
        let f = |w: Complex64| sc_integral(w).unwrap();
        // at 0: incoming from negative axis, outgoing along positive axis
        let t_in = f(c(-1e-4, 0.0)) - f(c(0.0, 0.0));
        let t_out = f(c(1e-4, 0.0)) - f(c(0.0, 0.0));
        let angle = (t_out / t_in).arg().abs();
        assert!((angle - PI / 3.0).abs() < 1e-3, "angle at 0: {angle}");
        // at 1
        let t_in = f(c(1.0 - 1e-4, 0.0)) - Complex64::new(g, 0.0);
        let t_out = f(c(1.0 + 1e-4, 0.0)) - Complex64::new(g, 0.0);
        let angle = (t_out / t_in).arg().abs();
        assert!((angle - PI / 3.0).abs() < 1e-3, "angle at 1: {angle}");
        // at infinity
        let t_in = f(c(1e4, 0.0)) - apex;
        let t_out = f(c(-1e4, 0.0)) - apex;
        let angle = (t_out / t_in).arg().abs();
        assert!((angle - PI / 3.0).abs() < 1e-3, "angle at inf: {angle}");
    }

    #[test]
    fn half_annulus_marked_points() {
        for (r, big_r) in [(0.5, 1.0), (0.1, 1.0), (0.02, 2.0)] {
            let map = half_annulus_descriptor(r, big_r).unwrap();
            assert!(map.marked_error() < TOL_MAP, "r = {r}, err = {}", map.marked_error());
        }
    }

    #[test]
    fn half_annulus_frozen_corner_ratios() {
        let table = [
            (1e-4, 1.4263482),
            (1e-3, 1.4263474),
            (1e-2, 1.4262668),
            (0.1, 1.4182202),
            (0.3, 1.3551885),
            (0.5, 1.2443152),
        ];
        for (r, want) in table {
            let phi = half_annulus_map(r, 1.0, c(r, 0.0)).unwrap();
            let ratio = phi.re / r.powf(1.0 / 3.0);
            assert!(phi.im.abs() < 1e-8, "r = {r}: {phi}");
            assert!((ratio - want).abs() < 1e-5, "r = {r}: {ratio} vs {want}");
        }
    }

    #[test]
    fn half_annulus_out_of_domain() {
        assert!(half_annulus_map(0.5, 1.0, c(0.2, 0.0)).is_err());
        assert!(half_annulus_map(0.5, 1.0, c(0.0, -0.7)).is_err());
    }

    #[test]
    fn half_annulus_conformal_and_boundary() {
        let map = half_annulus_descriptor(0.25, 1.0).unwrap();
        // Cauchy-Riemann residual at interior points
        let mut checked = 0;
        for ir in 0..5 {
            for ia in 1..10 {
                let rad = 0.30 + 0.13 * ir as f64;
                let ang = PI * ia as f64 / 10.0;
                let z = Complex64::from_polar(rad, ang);
                let res = map.cauchy_riemann_residual(z, 1e-5).unwrap();
                assert!(res < 1e-6, "z = {z}: residual {res}");
                checked += 1;
            }
        }
        assert!(checked >= 45);
        // boundary points map to the triangle boundary
        let spec = DomainSpec::new(
            DomainKind::HalfAnnulus { inner: 0.25, outer: 1.0 },
            vec![0.0, 0.25, 0.5, 0.75],
        )
        .unwrap();
        let apex = Complex64::from_polar(1.0, PI / 3.0);
        for i in 0..100 {
            let z = spec.boundary_point(i as f64 / 100.0);
            let z = Complex64::new(z.re, z.im.max(0.0));
            let w = map.evaluate(z).unwrap();
            // distance to the triangle sides [0,1], [1,apex], [apex,0]
            let seg_dist = |a: Complex64, b: Complex64| {
                let d = b - a;
                let t = ((w - a).re * d.re + (w - a).im * d.im) / d.norm_sqr();
                (w - (a + d * t.clamp(0.0, 1.0))).norm()
            };
            let dist = seg_dist(c(0.0, 0.0), c(1.0, 0.0))
                .min(seg_dist(c(1.0, 0.0), apex))
                .min(seg_dist(apex, c(0.0, 0.0)));
            assert!(dist < 1e-6, "t = {}: {w}, dist {dist}", i as f64 / 100.0);
        }
    }

    #[test]
    fn cross_ratio_square_symmetric() {
        let spec = DomainSpec::new(
            DomainKind::Rectangle { aspect: 1.0 },
            vec![0.125, 0.375, 0.625, 0.875],
        )
        .unwrap();
        let m = cross_ratio(&spec).unwrap();
        assert!((m - 0.5).abs() < 1e-10, "m = {m}");
    }

    #[test]
    fn cross_ratio_rect2_two_routes() {
        // corners of the aspect-2 rectangle; AB is the bottom edge
        let spec = DomainSpec::new(
            DomainKind::Rectangle { aspect: 2.0 },
            vec![0.0, 1.0 / 3.0, 0.5, 5.0 / 6.0],
        )
        .unwrap();
        let m = cross_ratio(&spec).unwrap();
        // independent route: AGM modulus for K'/K = 2/aspect, m = 4k/(1+k)^2
        let k = crate::numerics::elliptic::modulus_from_ratio(2.0 / 2.0);
        let m2 = 4.0 * k / ((1.0 + k) * (1.0 + k));
        assert!((m - m2).abs() < 1e-8, "{m} vs {m2}");
        // frozen: the hard-way cross ratio is 1 - m
        assert!((1.0 - m - 0.0294372515228594).abs() < 1e-8, "m = {m}");
        let p = cardy_probability(m).unwrap();
        assert!((p - (1.0 - 0.175646893801)).abs() < 1e-9, "p = {p}");
    }

    #[test]
    fn cross_ratio_errors() {
        let bad = DomainSpec {
            kind: DomainKind::Rectangle { aspect: 1.0 },
            marked: vec![0.1, 0.1, 0.5, 0.7],
        };
        assert!(cross_ratio(&bad).is_err());
        let tri = DomainSpec::new(
            DomainKind::EquilateralTriangle { side: 1.0 },
            vec![0.0, 0.25, 0.5, 0.75],
        )
        .unwrap();
        assert!(matches!(cross_ratio(&tri), Err(Error::UnsupportedDomain(_))));
    }

    #[test]
    fn carleson_matches_cardy() {
        let specs = [
            DomainSpec::new(
                DomainKind::Rectangle { aspect: 2.0 },
                vec![0.0, 1.0 / 3.0, 0.5, 5.0 / 6.0],
            )
            .unwrap(),
            DomainSpec::new(
                DomainKind::Rectangle { aspect: 1.0 },
                vec![0.125, 0.375, 0.625, 0.875],
            )
            .unwrap(),
            DomainSpec::new(DomainKind::Disk { radius: 1.0 }, vec![0.05, 0.3, 0.55, 0.7])
                .unwrap(),
            DomainSpec::new(
                DomainKind::HalfAnnulus { inner: 0.3, outer: 1.0 },
                vec![0.0, 0.25, 0.5, 0.75],
            )
            .unwrap(),
            DomainSpec::new(DomainKind::HalfDisk { radius: 1.0 }, vec![0.05, 0.35, 0.55, 0.8])
                .unwrap(),
        ];
        for spec in &specs {
            let m = cross_ratio(spec).unwrap();
            let p = cardy_probability(m).unwrap();
            let s = carleson_coordinate(spec).unwrap();
            assert!((p - s).abs() < 1e-8, "{spec:?}: cardy {p} vs carleson {s}");
        }
    }

    #[test]
    fn triangle_map_affine() {
        let spec = DomainSpec::new(
            DomainKind::EquilateralTriangle { side: 1.0 },
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
        )
        .unwrap();
        let map = triangle_map(&spec).unwrap();
        assert!(map.marked_error() < 1e-12);
        let mid = map.evaluate(c(0.5, 0.0)).unwrap();
        assert!((mid - (1.0 + tau()) * 0.5).norm() < 1e-12);
    }
}
