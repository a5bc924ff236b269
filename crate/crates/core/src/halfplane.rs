//! Arm and crossing estimators on the mesh-1 lattice restricted to an
//! angular sector with corner at the origin. Colors are generated lazily
//! from the counter RNG and cluster searches reuse an epoch-stamped grid,
//! so the cost per trial scales with the clusters actually visited rather
//! than with the region size.

use crate::engine::{has_alternating_arms, ArmSpec};
use crate::error::{Error, Result};
use crate::geometry::{SiteCoord, SQRT3};
use crate::rng::site_open;
use num_complex::Complex64;
use rayon::prelude::*;

const EPS: f64 = 1e-9;
/// Trials are split into this many independent chunks so results do not
/// depend on the rayon thread count.
const CHUNKS: u64 = 64;

/// Scratch state for one sector of angle theta in (0, 2pi] reaching out to
/// radius rmax.
pub struct SectorLattice {
    pub theta: f64,
    pub rmax: f64,
    sin_t: f64,
    cos_t: f64,
    imin: i32,
    jmin: i32,
    w: i32,
    h: i32,
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<SiteCoord>,
}

impl SectorLattice {
    pub fn new(theta: f64, rmax: f64) -> Result<SectorLattice> {
        if !(theta > 0.0 && theta <= 2.0 * std::f64::consts::PI + 1e-12) {
            return Err(Error::OutOfRange { value: theta, range: "theta in (0, 2pi]" });
        }
        if !(rmax >= 2.0 && rmax <= 1e6) {
            return Err(Error::OutOfRange { value: rmax, range: "2 <= rmax <= 1e6" });
        }
        let m = rmax + 3.0;
        let jmax = (2.0 * m / SQRT3).ceil() as i32 + 2;
        let jmin = if theta <= std::f64::consts::PI + 1e-12 { -2 } else { -jmax };
        let half_w = (m + 0.5 * jmax as f64).ceil() as i32 + 2;
        let (imin, w, h) = (-half_w, 2 * half_w + 1, jmax - jmin + 1);
        Ok(SectorLattice {
            theta,
            rmax,
            sin_t: theta.sin(),
            cos_t: theta.cos(),
            imin,
            jmin,
            w,
            h,
            stamp: vec![0; (w as usize) * (h as usize)],
            epoch: 0,
            queue: Vec::new(),
        })
    }

    #[inline]
    fn cell(&self, s: SiteCoord) -> Option<usize> {
        let (ci, cj) = (s.i - self.imin, s.j - self.jmin);
        if ci < 0 || ci >= self.w || cj < 0 || cj >= self.h {
            return None;
        }
        Some((cj as usize) * (self.w as usize) + ci as usize)
    }

    /// Angular containment arg(v) in [0, theta], by cross products.
    #[inline]
    pub fn in_range(&self, v: Complex64) -> bool {
        let upper = v.im >= -EPS;
        let before_ray = self.sin_t * v.re - self.cos_t * v.im >= -EPS;
        if self.theta <= std::f64::consts::PI + 1e-12 {
            upper && before_ray
        } else {
            upper || before_ray
        }
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// Open path from the origin site to distance rr, inside the sector.
    pub fn one_arm_trial(&mut self, seed: u64, trial: u64, rr: f64) -> bool {
        debug_assert!(rr <= self.rmax);
        if !site_open(seed, trial, 0, 0) {
            return false;
        }
        let e = self.next_epoch();
        let origin = SiteCoord::new(0, 0);
        let c0 = self.cell(origin).unwrap();
        self.stamp[c0] = e;
        self.queue.clear();
        self.queue.push(origin);
        while let Some(s) = self.queue.pop() {
            for nb in s.neighbors() {
                let q = nb.pos(1.0);
                if !self.in_range(q) {
                    continue;
                }
                if q.norm() >= rr - EPS {
                    self.queue.clear();
                    return true;
                }
                let c = self.cell(nb).unwrap();
                if self.stamp[c] != e && site_open(seed, trial, nb.i, nb.j) {
                    self.stamp[c] = e;
                    self.queue.push(nb);
                }
            }
        }
        false
    }

    #[inline]
    fn in_annulus(&self, p: Complex64, r: f64, rr: f64) -> bool {
        let n = p.norm();
        n >= r - EPS && n <= rr + EPS && self.in_range(p)
    }

    /// Sites of the annular sector carrying a lattice neighbor strictly
    /// inside radius r.
    fn inner_touch_sites(&self, r: f64, rr: f64) -> Vec<SiteCoord> {
        let lim = (r + 2.0).ceil() as i32;
        let mut out = Vec::new();
        for j in -lim..=lim {
            for i in -2 * lim..=2 * lim {
                let s = SiteCoord::new(i, j);
                let p = s.pos(1.0);
                if !self.in_annulus(p, r, rr) {
                    continue;
                }
                if s.neighbors().iter().any(|nb| nb.pos(1.0).norm() < r - EPS) {
                    out.push(s);
                }
            }
        }
        out
    }

    /// Open crossing of the annular sector between radii r and rr.
    pub fn crossing_trial(
        &mut self,
        seed: u64,
        trial: u64,
        inner: &[SiteCoord],
        r: f64,
        rr: f64,
    ) -> bool {
        let e = self.next_epoch();
        self.queue.clear();
        for &s in inner {
            if site_open(seed, trial, s.i, s.j) {
                let c = self.cell(s).unwrap();
                if self.stamp[c] != e {
                    self.stamp[c] = e;
                    self.queue.push(s);
                }
            }
        }
        while let Some(s) = self.queue.pop() {
            for nb in s.neighbors() {
                let q = nb.pos(1.0);
                if !self.in_annulus(q, r, rr) {
                    if q.norm() > rr + EPS && self.in_range(q) {
                        self.queue.clear();
                        return true;
                    }
                    continue;
                }
                let c = self.cell(nb).unwrap();
                if self.stamp[c] != e && site_open(seed, trial, nb.i, nb.j) {
                    self.stamp[c] = e;
                    self.queue.push(nb);
                }
            }
        }
        false
    }

    /// Arm event C^k_theta(r, rr): both-color clusters rooted on the inner
    /// circle are explored; crossing clusters yield (min inner angle, color)
    /// and the alternation scan decides the event.
    pub fn arm_trial(
        &mut self,
        seed: u64,
        trial: u64,
        inner: &[SiteCoord],
        spec: &ArmSpec,
    ) -> bool {
        let (r, rr) = (spec.inner_radius, spec.outer_radius);
        let e = self.next_epoch();
        let mut arms: Vec<(f64, bool)> = Vec::new();
        for &start in inner {
            let c0 = self.cell(start).unwrap();
            if self.stamp[c0] == e {
                continue;
            }
            let color = site_open(seed, trial, start.i, start.j);
            self.stamp[c0] = e;
            self.queue.clear();
            self.queue.push(start);
            let mut inner_angle = f64::INFINITY;
            let mut touches_outer = false;
            while let Some(s) = self.queue.pop() {
                let p = s.pos(1.0);
                for nb in s.neighbors() {
                    let q = nb.pos(1.0);
                    if !self.in_annulus(q, r, rr) {
                        let nq = q.norm();
                        if nq < r - EPS {
                            let a = p.im.atan2(p.re).rem_euclid(2.0 * std::f64::consts::PI);
                            inner_angle = inner_angle.min(a);
                        } else if nq > rr + EPS && self.in_range(q) {
                            touches_outer = true;
                        }
                        continue;
                    }
                    let c = self.cell(nb).unwrap();
                    if self.stamp[c] != e && site_open(seed, trial, nb.i, nb.j) == color {
                        self.stamp[c] = e;
                        self.queue.push(nb);
                    }
                }
            }
            if inner_angle.is_finite() && touches_outer {
                arms.push((inner_angle, color));
            }
        }
        arms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        has_alternating_arms(&arms, spec.k, spec.start_open, spec.is_full())
    }
}

fn chunked_count(
    trials: u64,
    make: impl Fn() -> Result<SectorLattice> + Sync,
    trial_fn: impl Fn(&mut SectorLattice, u64) -> bool + Sync,
) -> Result<u64> {
    make()?; // validate parameters before spawning workers
    let counts: Vec<u64> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let lo = trials * c / CHUNKS;
            let hi = trials * (c + 1) / CHUNKS;
            let mut lat = make().expect("validated");
            (lo..hi).filter(|&t| trial_fn(&mut lat, t)).count() as u64
        })
        .collect();
    Ok(counts.iter().sum())
}

/// P(0 <-> S_rr) in the sector, as (hits, trials).
pub fn one_arm_probability(
    theta: f64,
    rr: f64,
    trials: u64,
    seed: u64,
) -> Result<(u64, u64)> {
    let hits = chunked_count(
        trials,
        || SectorLattice::new(theta, rr),
        |lat, t| lat.one_arm_trial(seed, t, rr),
    )?;
    Ok((hits, trials))
}

/// P(S_r <-> S_rr) open crossing of the annular sector, as (hits, trials).
pub fn annulus_crossing_probability(
    theta: f64,
    r: f64,
    rr: f64,
    trials: u64,
    seed: u64,
) -> Result<(u64, u64)> {
    if !(r > 0.0 && r < rr) {
        return Err(Error::OutOfRange { value: r, range: "0 < r < R" });
    }
    let probe = SectorLattice::new(theta, rr)?;
    let inner = probe.inner_touch_sites(r, rr);
    if inner.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let hits = chunked_count(
        trials,
        || SectorLattice::new(theta, rr),
        |lat, t| lat.crossing_trial(seed, t, &inner, r, rr),
    )?;
    Ok((hits, trials))
}

/// P(C^k_theta(r, R)) for a spec centered at the origin, as (hits, trials).
pub fn arm_probability(spec: &ArmSpec, trials: u64, seed: u64) -> Result<(u64, u64)> {
    spec.validate()?;
    if spec.center.norm() > EPS {
        return Err(Error::OutOfRange { value: spec.center.norm(), range: "center = 0" });
    }
    let probe = SectorLattice::new(spec.theta, spec.outer_radius)?;
    let inner = probe.inner_touch_sites(spec.inner_radius, spec.outer_radius);
    if inner.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let hits = chunked_count(
        trials,
        || SectorLattice::new(spec.theta, spec.outer_radius),
        |lat, t| lat.arm_trial(seed, t, &inner, spec),
    )?;
    Ok((hits, trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn deterministic_counts() {
        let a = one_arm_probability(PI, 16.0, 2000, 7).unwrap();
        let b = one_arm_probability(PI, 16.0, 2000, 7).unwrap();
        assert_eq!(a, b);
        let c = one_arm_probability(PI, 16.0, 2000, 8).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn one_arm_decreases_with_radius() {
        let (h1, n) = one_arm_probability(PI, 8.0, 20_000, 3).unwrap();
        let (h2, _) = one_arm_probability(PI, 32.0, 20_000, 3).unwrap();
        assert!(h1 > h2, "{h1} vs {h2} of {n}");
    }

    #[test]
    fn crossing_agrees_with_one_open_arm() {
        // a single open arm event and the open crossing event coincide
        let spec = ArmSpec {
            center: Complex64::new(0.0, 0.0),
            inner_radius: 2.0,
            outer_radius: 6.0,
            theta: PI,
            k: 1,
            start_open: true,
        };
        let probe = SectorLattice::new(PI, 6.0).unwrap();
        let inner = probe.inner_touch_sites(2.0, 6.0);
        let mut a = SectorLattice::new(PI, 6.0).unwrap();
        let mut b = SectorLattice::new(PI, 6.0).unwrap();
        for t in 0..2000 {
            let x = a.crossing_trial(11, t, &inner, 2.0, 6.0);
            let y = b.arm_trial(11, t, &inner, &spec);
            assert_eq!(x, y, "trial {t}");
        }
    }

    #[test]
    fn crossing_matches_brute_force_enumeration() {
        // every site of the small annular sector enumerated explicitly
        let (r, rr) = (1.5, 3.4);
        let probe = SectorLattice::new(PI, rr).unwrap();
        let mut region = Vec::new();
        for j in -1..=5 {
            for i in -9..=9 {
                let s = SiteCoord::new(i, j);
                if probe.in_annulus(s.pos(1.0), r, rr) {
                    region.push(s);
                }
            }
        }
        let n = region.len();
        assert!((8..=22).contains(&n), "n = {n}");
        let mut hits = 0u64;
        for mask in 0u64..1 << n {
            let open = |s: SiteCoord| {
                region.iter().position(|&x| x == s).map_or(false, |k| mask >> k & 1 == 1)
            };
            // reachability from inner-touching open sites to an outer touch
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = (0..n)
                .filter(|&k| {
                    open(region[k])
                        && region[k].neighbors().iter().any(|nb| nb.pos(1.0).norm() < r - EPS)
                })
                .collect();
            for &k in &stack {
                seen[k] = true;
            }
            let mut ok = false;
            while let Some(k) = stack.pop() {
                for nb in region[k].neighbors() {
                    let q = nb.pos(1.0);
                    if let Some(t) = region.iter().position(|&x| x == nb) {
                        if !seen[t] && open(nb) {
                            seen[t] = true;
                            stack.push(t);
                        }
                    } else if q.norm() > rr + EPS && probe.in_range(q) {
                        ok = true;
                    }
                }
                if ok {
                    break;
                }
            }
            if ok {
                hits += 1;
            }
        }
        let exact = hits as f64 / (1u64 << n) as f64;
        let trials = 200_000u64;
        let (h, _) = annulus_crossing_probability(PI, r, rr, trials, 5).unwrap();
        let est = h as f64 / trials as f64;
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((est - exact).abs() < 4.0 * sigma, "{est} vs {exact} ({sigma})");
    }

    #[test]
    fn sector_angular_membership() {
        let lat = SectorLattice::new(PI / 2.0, 8.0).unwrap();
        assert!(lat.in_range(Complex64::new(1.0, 1.0)));
        assert!(lat.in_range(Complex64::new(1.0, 0.0)));
        assert!(lat.in_range(Complex64::new(0.0, 1.0)));
        assert!(!lat.in_range(Complex64::new(-1.0, 1.0)));
        assert!(!lat.in_range(Complex64::new(1.0, -1.0)));
        let wide = SectorLattice::new(3.0 * PI / 2.0, 8.0).unwrap();
        assert!(wide.in_range(Complex64::new(-1.0, -1.0)));
        assert!(!wide.in_range(Complex64::new(1.0, -1.0)));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(SectorLattice::new(-1.0, 16.0).is_err());
        assert!(SectorLattice::new(PI, 1.0).is_err());
        assert!(annulus_crossing_probability(PI, 5.0, 3.0, 10, 0).is_err());
        let spec = ArmSpec {
            center: Complex64::new(3.0, 0.0),
            inner_radius: 2.0,
            outer_radius: 8.0,
            theta: PI,
            k: 1,
            start_open: true,
        };
        assert!(arm_probability(&spec, 10, 0).is_err());
    }

    #[test]
    fn more_arms_are_rarer() {
        let mk = |k| ArmSpec {
            center: Complex64::new(0.0, 0.0),
            inner_radius: 4.0,
            outer_radius: 24.0,
            theta: PI,
            k,
            start_open: true,
        };
        let trials = 20_000;
        let (h1, _) = arm_probability(&mk(1), trials, 2).unwrap();
        let (h2, _) = arm_probability(&mk(2), trials, 2).unwrap();
        let (h3, _) = arm_probability(&mk(3), trials, 2).unwrap();
        assert!(h1 > h2 && h2 > h3, "{h1} {h2} {h3}");
    }
}
