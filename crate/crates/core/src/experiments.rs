//! Experiment drivers: convergence rates, arm exponents, the multiscale
//! half-plane construction, and exact identity checks. Every driver is a
//! pure function of its config, and Monte Carlo loops are split into a
//! fixed number of chunks so the outcome is independent of worker count.

use crate::engine::{crossing_occurs, enumerate_exact, sample_configuration, ArmSpec};
use crate::error::{Error, Result};
use crate::fit::{fit_power_law, FitPoint, FitResult};
use crate::geometry::{discretize, DiscreteDomain, DomainSpec};
use crate::halfplane::{annulus_crossing_probability, arm_probability, one_arm_probability};
use crate::numerics::conformal::{cross_ratio, half_annulus_map, triangle_map};
use crate::numerics::special::cardy_probability;
use crate::observable::{estimate_fields, modify_boundary, sup_deviation};
use crate::rng::point_seed;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const CHUNKS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Crossing,
    Observable,
    Arm,
    Onearm,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmParams {
    pub theta: f64,
    pub k: usize,
    pub start_open: bool,
    pub inner_radius: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiscaleParams {
    /// Exponent parameter in (0, 1/3); the schedule ratio is 1/(1-3c).
    pub c: f64,
    pub r0: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    /// Mesh sizes, strictly decreasing (convergence experiments).
    #[serde(default)]
    pub deltas: Option<Vec<f64>>,
    /// Outer radii in lattice units, strictly increasing (arm experiments).
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub arm: Option<ArmParams>,
    #[serde(default)]
    pub multiscale: Option<MultiscaleParams>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 100 {
            return Err(Error::ValidationError(format!(
                "trials = {} but at least 100 are required",
                self.trials
            )));
        }
        if let Some(d) = &self.deltas {
            if d.windows(2).any(|w| w[1] >= w[0]) || d.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::ValidationError(
                    "deltas must be positive and strictly decreasing".into(),
                ));
            }
        }
        if let Some(r) = &self.radii {
            if r.windows(2).any(|w| w[1] <= w[0]) || r.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::ValidationError(
                    "radii must be positive and strictly increasing".into(),
                ));
            }
        }
        if let Some(m) = &self.multiscale {
            if !(m.c > 0.0 && m.c < 1.0 / 3.0) {
                return Err(Error::ValidationError("multiscale c must lie in (0, 1/3)".into()));
            }
            if !(m.r0 >= 2.0) {
                return Err(Error::ValidationError("multiscale r0 must be >= 2".into()));
            }
        }
        if let Some(s) = &self.domain {
            s.validate()?;
        }
        Ok(())
    }
}

/// One measured scale point of an experiment.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalePoint {
    pub scale: f64,
    pub hits: u64,
    pub trials: u64,
    pub estimate: f64,
    pub stderr: f64,
}

fn binom_point(scale: f64, hits: u64, trials: u64) -> ScalePoint {
    let p = hits as f64 / trials as f64;
    ScalePoint {
        scale,
        hits,
        trials,
        estimate: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
    }
}

/// Monte Carlo open-crossing probability between arcs 0 and 2, chunked for
/// worker-count independence.
pub fn crossing_probability_mc(dd: &DiscreteDomain, trials: u64, seed: u64) -> Result<u64> {
    crossing_occurs(&sample_configuration(dd, seed, 0), 0, 2, true)?;
    let counts: Vec<u64> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let lo = trials * c / CHUNKS;
            let hi = trials * (c + 1) / CHUNKS;
            (lo..hi)
                .filter(|&t| {
                    let cfg = sample_configuration(dd, seed, t);
                    crossing_occurs(&cfg, 0, 2, true).expect("validated")
                })
                .count() as u64
        })
        .collect();
    Ok(counts.iter().sum())
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossingReport {
    pub limit: f64,
    pub points: Vec<ScalePoint>,
    pub deviations: Vec<f64>,
    pub fit: FitResult,
}

/// Crossing probability vs its conformal limit over a list of mesh sizes;
/// fits |P_delta - limit| ~ delta^c.
pub fn run_crossing_convergence(cfg: &ExperimentConfig) -> Result<CrossingReport> {
    cfg.validate()?;
    let spec = cfg.domain.as_ref().ok_or_else(|| {
        Error::ValidationError("crossing convergence needs a domain".into())
    })?;
    let deltas = cfg.deltas.as_ref().ok_or_else(|| {
        Error::ValidationError("crossing convergence needs a delta list".into())
    })?;
    if deltas.len() < 4 {
        return Err(Error::ValidationError("need at least 4 delta points".into()));
    }
    let limit = cardy_probability(cross_ratio(spec)?)?;
    let mut points = Vec::new();
    let mut deviations = Vec::new();
    for (idx, &delta) in deltas.iter().enumerate() {
        let dd = discretize(spec, delta)?;
        let hits = crossing_probability_mc(&dd, cfg.trials, point_seed(cfg.seed, idx as u64))?;
        let p = binom_point(delta, hits, cfg.trials);
        deviations.push((p.estimate - limit).abs());
        points.push(p);
    }
    let floored = points
        .iter()
        .zip(&deviations)
        .filter(|(p, d)| **d < 3.0 * p.stderr)
        .count();
    if 2 * floored >= points.len() {
        return Err(Error::StatisticalFloor(floored, points.len()));
    }
    let fit_pts: Vec<FitPoint> = points
        .iter()
        .zip(&deviations)
        .map(|(p, &d)| FitPoint { scale: p.scale, estimate: d.max(1e-300), stderr: p.stderr })
        .collect();
    let fit = fit_power_law(&fit_pts)?;
    Ok(CrossingReport { limit, points, deviations, fit })
}

#[derive(Debug, Clone, Serialize)]
pub struct ObservableReport {
    pub points: Vec<ScalePoint>,
    pub fit: FitResult,
}

/// Sup deviation of the modified observable from the triangle map over a
/// list of mesh sizes; fits deviation ~ delta^c.
pub fn run_observable_convergence(cfg: &ExperimentConfig) -> Result<ObservableReport> {
    cfg.validate()?;
    let spec = cfg.domain.as_ref().ok_or_else(|| {
        Error::ValidationError("observable convergence needs a domain".into())
    })?;
    let deltas = cfg.deltas.as_ref().ok_or_else(|| {
        Error::ValidationError("observable convergence needs a delta list".into())
    })?;
    if deltas.len() < 3 {
        return Err(Error::ValidationError("need at least 3 delta points".into()));
    }
    let map = triangle_map(spec)?;
    let sigma = (3.0 / (4.0 * cfg.trials as f64)).sqrt();
    let mut points = Vec::new();
    for (idx, &delta) in deltas.iter().enumerate() {
        let dd = discretize(spec, delta)?;
        let field = estimate_fields(&dd, cfg.trials, point_seed(cfg.seed, idx as u64))?;
        let modified = modify_boundary(&dd, &field.g_field())?;
        let sup = sup_deviation(&dd, &modified, &map)?;
        points.push(ScalePoint { scale: delta, hits: 0, trials: cfg.trials, estimate: sup, stderr: sigma });
    }
    let floored = points.iter().filter(|p| p.estimate < 3.0 * p.stderr).count();
    if 2 * floored >= points.len() {
        return Err(Error::StatisticalFloor(floored, points.len()));
    }
    let fit_pts: Vec<FitPoint> = points
        .iter()
        .map(|p| FitPoint { scale: p.scale, estimate: p.estimate, stderr: p.stderr })
        .collect();
    let fit = fit_power_law(&fit_pts)?;
    Ok(ObservableReport { points, fit })
}

#[derive(Debug, Clone, Serialize)]
pub struct ArmReport {
    pub points: Vec<ScalePoint>,
    /// Radii at which the event was never observed (point dropped).
    pub dropped: Vec<f64>,
    pub fit: FitResult,
    /// The decay exponent x in P ~ (r/R)^x, i.e. minus the fitted slope.
    pub exponent: f64,
}

/// Arm-event probability over a list of outer radii at fixed inner radius;
/// fits the decay exponent.
pub fn run_arm_exponent(cfg: &ExperimentConfig) -> Result<ArmReport> {
    cfg.validate()?;
    let arm = cfg
        .arm
        .ok_or_else(|| Error::ValidationError("arm experiment needs arm parameters".into()))?;
    let radii = cfg
        .radii
        .as_ref()
        .ok_or_else(|| Error::ValidationError("arm experiment needs a radius list".into()))?;
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    for (idx, &rr) in radii.iter().enumerate() {
        let spec = ArmSpec {
            center: Complex64::new(0.0, 0.0),
            inner_radius: arm.inner_radius,
            outer_radius: rr,
            theta: arm.theta,
            k: arm.k,
            start_open: arm.start_open,
        };
        let (hits, n) = arm_probability(&spec, cfg.trials, point_seed(cfg.seed, idx as u64))?;
        if hits == 0 {
            dropped.push(rr);
        } else {
            points.push(binom_point(rr, hits, n));
        }
    }
    let fit_pts: Vec<FitPoint> = points
        .iter()
        .map(|p| FitPoint { scale: p.scale, estimate: p.estimate, stderr: p.stderr })
        .collect();
    let fit = fit_power_law(&fit_pts)?;
    let exponent = -fit.slope;
    Ok(ArmReport { points, dropped, fit, exponent })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScheduleReport {
    pub c: f64,
    pub alpha: f64,
    pub radii: Vec<f64>,
    /// Half-annulus crossing estimates for consecutive schedule radii.
    pub crossings: Vec<ScalePoint>,
    /// (outer radius, product bound, product stderr) per direct radius.
    pub bounds: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OneArmReport {
    pub points: Vec<ScalePoint>,
    pub dropped: Vec<f64>,
    pub fit: FitResult,
    pub exponent: f64,
    pub schedule: Option<ScheduleReport>,
}

/// The multiscale radii r0^(alpha^k) with alpha = 1/(1-3c), clipped to rmax.
pub fn multiscale_schedule(ms: &MultiscaleParams, rmax: f64) -> Vec<f64> {
    let alpha = 1.0 / (1.0 - 3.0 * ms.c);
    let mut radii = vec![ms.r0];
    while *radii.last().unwrap() < rmax && radii.len() < 64 {
        let next = radii.last().unwrap().powf(alpha);
        radii.push(next.min(rmax));
    }
    radii
}

/// Direct half-plane one-arm decay, optionally with the multiscale product
/// upper bound from independent half-annulus crossings.
pub fn run_halfplane_onearm(cfg: &ExperimentConfig) -> Result<OneArmReport> {
    cfg.validate()?;
    let radii = cfg
        .radii
        .as_ref()
        .ok_or_else(|| Error::ValidationError("one-arm experiment needs a radius list".into()))?;
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    for (idx, &rr) in radii.iter().enumerate() {
        let (hits, n) = one_arm_probability(PI, rr, cfg.trials, point_seed(cfg.seed, idx as u64))?;
        if hits == 0 {
            dropped.push(rr);
        } else {
            points.push(binom_point(rr, hits, n));
        }
    }
    let fit_pts: Vec<FitPoint> = points
        .iter()
        .map(|p| FitPoint { scale: p.scale, estimate: p.estimate, stderr: p.stderr })
        .collect();
    let fit = fit_power_law(&fit_pts)?;
    let exponent = -fit.slope;
    let schedule = match &cfg.multiscale {
        None => None,
        Some(ms) => {
            let rmax = *radii.last().unwrap();
            let sched = multiscale_schedule(ms, rmax);
            let mut crossings = Vec::new();
            for (k, w) in sched.windows(2).enumerate() {
                let (hits, n) = annulus_crossing_probability(
                    PI,
                    w[0],
                    w[1],
                    cfg.trials,
                    point_seed(cfg.seed, 1_000 + k as u64),
                )?;
                crossings.push(binom_point(w[1], hits, n));
            }
            let mut bounds = Vec::new();
            for &rr in radii {
                let mut product = 1.0f64;
                let mut rel_var = 0.0f64;
                for c in crossings.iter().filter(|c| c.scale <= rr + 1e-9) {
                    product *= c.estimate;
                    if c.estimate > 0.0 {
                        rel_var += (c.stderr / c.estimate).powi(2);
                    }
                }
                bounds.push((rr, product, product * rel_var.sqrt()));
            }
            Some(ScheduleReport {
                c: ms.c,
                alpha: 1.0 / (1.0 - 3.0 * ms.c),
                radii: sched,
                crossings,
                bounds,
            })
        }
    };
    Ok(OneArmReport { points, dropped, fit, exponent, schedule })
}

/// |MC half-annulus crossing - map value| together with both quantities;
/// the map value is the image of the inner-circle endpoint r under the
/// half-annulus triangle map.
pub fn crossing_vs_map(r: f64, rr: f64, trials: u64, seed: u64) -> Result<(f64, f64, f64)> {
    let (hits, n) = annulus_crossing_probability(PI, r, rr, trials, seed)?;
    let p = hits as f64 / n as f64;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    let phi = half_annulus_map(r, rr, Complex64::new(r, 0.0))?;
    Ok((p, sigma, phi.re))
}

#[derive(Debug, Clone, Serialize)]
pub struct ColorSwitchReport {
    pub n_sites: usize,
    pub faces_checked: usize,
    /// Max over interior faces, directions and k of the absolute difference
    /// of the two exactly enumerated difference-event probabilities.
    pub max_discrepancy: f64,
}

const VERIFY_CAP: usize = 20;

/// Exact check of the color-switching identity: the probability that the
/// separating event for tau^k holds at z + eta but not at z equals the same
/// quantity for tau^(k+1) in the 120-degree-rotated direction.
pub fn verify_color_switching(spec: &DomainSpec, mesh: f64) -> Result<ColorSwitchReport> {
    let dd = discretize(spec, mesh)?;
    let n = dd.n_sites();
    if n > VERIFY_CAP {
        return Err(Error::TooManySites(n, VERIFY_CAP));
    }
    let fg = dd.face_graph()?;
    let nf = dd.dual_vertices.len();
    // counts[face][k][direction]: the difference event is detected by its
    // three-arm characterization; `adjacent_faces` lists the directions in
    // counter-clockwise order 120 degrees apart, so rotating a direction by
    // tau is stepping to the next index
    let mut counts = vec![[[0u64; 3]; 3]; nf];
    let (_, total) = enumerate_exact(&dd, |config| {
        for (f, slot) in counts.iter_mut().enumerate() {
            for k in 0..3 {
                for d in 0..3 {
                    if crate::engine::difference_event_occurs(&fg, config, k, f, d).unwrap() {
                        slot[k][d] += 1;
                    }
                }
            }
        }
        false
    })?;
    let mut max_disc = 0.0f64;
    for slot in &counts {
        for k in 0..3 {
            for d in 0..3 {
                // tau eta rotates to the next neighbor in CCW order
                let lhs = slot[k][d] as f64;
                let rhs = slot[(k + 1) % 3][(d + 1) % 3] as f64;
                max_disc = max_disc.max((lhs - rhs).abs() / total as f64);
            }
        }
    }
    Ok(ColorSwitchReport { n_sites: n, faces_checked: nf, max_discrepancy: max_disc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainKind;

    fn base_cfg(kind: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig {
            experiment: kind,
            domain: None,
            deltas: None,
            radii: None,
            trials: 1_000,
            seed: 12,
            arm: None,
            multiscale: None,
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = base_cfg(ExperimentKind::Arm);
        cfg.trials = 50;
        assert!(cfg.validate().is_err());
        cfg.trials = 100;
        cfg.deltas = Some(vec![0.25, 0.25]);
        assert!(cfg.validate().is_err());
        cfg.deltas = Some(vec![0.25, 0.125]);
        cfg.radii = Some(vec![4.0, 8.0, 16.0]);
        assert!(cfg.validate().is_ok());
        cfg.multiscale = Some(MultiscaleParams { c: 0.5, r0: 4.0 });
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn symmetric_square_hits_statistical_floor() {
        let mut cfg = base_cfg(ExperimentKind::Crossing);
        cfg.domain = Some(
            DomainSpec::new(
                DomainKind::Rectangle { aspect: 1.0 },
                vec![0.0, 0.25, 0.5, 0.75],
            )
            .unwrap(),
        );
        cfg.deltas = Some(vec![1.0 / 4.0, 1.0 / 6.0, 1.0 / 8.0, 1.0 / 10.0]);
        cfg.trials = 4_000;
        match run_crossing_convergence(&cfg) {
            Err(Error::StatisticalFloor(k, n)) => assert!(2 * k >= n),
            other => panic!("expected statistical floor, got {other:?}"),
        }
    }

    #[test]
    fn rectangle_crossing_converges_toward_limit() {
        let mut cfg = base_cfg(ExperimentKind::Crossing);
        // aspect 1/2 with corner-marked arcs: the 0-2 crossing joins the two
        // short sides across the long direction
        cfg.domain = Some(
            DomainSpec::new(
                DomainKind::Rectangle { aspect: 0.5 },
                vec![0.0, 1.0 / 6.0, 0.5, 2.0 / 3.0],
            )
            .unwrap(),
        );
        cfg.deltas = Some(vec![1.0 / 4.0, 1.0 / 6.0, 1.0 / 8.0, 1.0 / 12.0]);
        cfg.trials = 20_000;
        let rep = run_crossing_convergence(&cfg).unwrap();
        assert!((rep.limit - 0.175646893801).abs() < 1e-9);
        assert!(rep.fit.slope.is_finite());
        assert_eq!(rep.points.len(), 4);
    }

    #[test]
    fn observable_convergence_runs() {
        let mut cfg = base_cfg(ExperimentKind::Observable);
        cfg.domain = Some(
            DomainSpec::new(
                DomainKind::EquilateralTriangle { side: 1.0 },
                vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
            )
            .unwrap(),
        );
        cfg.deltas = Some(vec![1.0 / 4.0, 1.0 / 6.0, 1.0 / 8.0]);
        cfg.trials = 4_000;
        let rep = run_observable_convergence(&cfg).unwrap();
        assert_eq!(rep.points.len(), 3);
        assert!(rep.points.iter().all(|p| p.estimate > 0.0 && p.estimate < 1.0));
    }

    #[test]
    fn impossible_arm_counts_are_dropped() {
        let mut cfg = base_cfg(ExperimentKind::Arm);
        // a sector this thin is one site wide and cannot host six disjoint
        // alternating crossings, so every radius records zero hits
        cfg.radii = Some(vec![5.0, 7.0, 9.0]);
        cfg.arm = Some(ArmParams { theta: 0.25, k: 6, start_open: true, inner_radius: 2.0 });
        cfg.trials = 300;
        match run_arm_exponent(&cfg) {
            Err(Error::DegeneratePoints(_)) => {}
            other => panic!("expected all points dropped, got {other:?}"),
        }
    }

    #[test]
    fn one_arm_with_multiscale_schedule() {
        let mut cfg = base_cfg(ExperimentKind::Onearm);
        cfg.radii = Some(vec![4.0, 8.0, 16.0]);
        cfg.trials = 4_000;
        cfg.multiscale = Some(MultiscaleParams { c: 0.1, r0: 4.0 });
        let rep = run_halfplane_onearm(&cfg).unwrap();
        assert_eq!(rep.points.len(), 3);
        assert!(rep.exponent > 0.0);
        let sched = rep.schedule.unwrap();
        assert!((sched.alpha - 1.0 / 0.7).abs() < 1e-12);
        assert!(sched.radii.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*sched.radii.last().unwrap(), 16.0);
        // product bound dominates the direct estimate up to noise
        for (p, (rr, bound, bsig)) in rep.points.iter().zip(&sched.bounds) {
            assert_eq!(p.scale, *rr);
            assert!(*bound + 3.0 * (bsig + p.stderr) >= p.estimate, "{bound} vs {}", p.estimate);
        }
    }

    #[test]
    fn color_switching_identity_exact_on_symmetric_triangle() {
        let spec = DomainSpec::new(
            DomainKind::EquilateralTriangle { side: 1.0 },
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
        )
        .unwrap();
        // mesh equal to the side length yields the smallest discretization
        // whose site set has the full 3-fold symmetry, which is what makes
        // the identity exact
        let rep = verify_color_switching(&spec, 1.0).unwrap();
        assert!(rep.n_sites <= VERIFY_CAP);
        assert!(rep.faces_checked > 0);
        assert_eq!(rep.max_discrepancy, 0.0, "discrepancy {}", rep.max_discrepancy);
    }

    #[test]
    fn verify_rejects_large_domains() {
        let spec = DomainSpec::new(
            DomainKind::EquilateralTriangle { side: 1.0 },
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
        )
        .unwrap();
        match verify_color_switching(&spec, 0.1) {
            Err(Error::TooManySites(_, cap)) => assert_eq!(cap, VERIFY_CAP),
            other => panic!("expected TooManySites, got {other:?}"),
        }
    }
}
