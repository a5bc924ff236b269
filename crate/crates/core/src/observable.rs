//! Monte Carlo estimation of the separating-event fields H_{tau^k}, assembly
//! of the complex observable, boundary modification, interpolation over the
//! hexagonal faces, and deviation diagnostics.

use crate::engine::{sample_configuration, Configuration};
use crate::error::{Error, Result};
use crate::geometry::{incident_faces, DiscreteDomain, DualVertex, SiteCoord, SQRT3};
use crate::numerics::conformal::{tau, MapDescriptor};
use num_complex::Complex64;
use rayon::prelude::*;

/// Per-dual-vertex hit counters for the three separating events.
#[derive(Debug, Clone)]
pub struct ObservableField {
    pub domain: DiscreteDomain,
    /// One [k=0, k=1, k=2] counter triple per dual vertex.
    pub counts: Vec<[u64; 3]>,
    pub trials: u64,
    pub seed: u64,
}

/// Accumulates the three indicator fields over `trials` independent samples.
/// Counter addition is commutative, so the result is identical for any
/// worker count.
pub fn estimate_fields(dd: &DiscreteDomain, trials: u64, seed: u64) -> Result<ObservableField> {
    if dd.marked_count() != 3 {
        return Err(Error::WrongMarkedPointCount { expected: 3, found: dd.marked_count() });
    }
    if trials < 1 {
        return Err(Error::ValidationError("trials >= 1".into()));
    }
    let nf = dd.dual_vertices.len();
    let fg = dd.face_graph()?;
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || vec![[0u64; 3]; nf],
            |mut acc, t| {
                let cfg = sample_configuration(dd, seed, t);
                accumulate_trial(&fg, &cfg, &mut acc);
                acc
            },
        )
        .reduce(
            || vec![[0u64; 3]; nf],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    for k in 0..3 {
                        x[k] += y[k];
                    }
                }
                a
            },
        );
    Ok(ObservableField { domain: dd.clone(), counts, trials, seed })
}

fn accumulate_trial(fg: &crate::geometry::FaceGraph, cfg: &Configuration, acc: &mut [[u64; 3]]) {
    for k in 0..3 {
        let field =
            crate::engine::separating_indicator_field_with(fg, cfg, k).expect("3 marked points");
        for (slot, bit) in acc.iter_mut().zip(field) {
            if bit {
                slot[k] += 1;
            }
        }
    }
}

impl ObservableField {
    /// (H_1, H_tau, H_tau2) estimates at one dual vertex.
    pub fn h_hat(&self, face: usize) -> [f64; 3] {
        let t = self.trials as f64;
        self.counts[face].map(|c| c as f64 / t)
    }

    /// G = H_1 + tau H_tau + tau^2 H_tau2 per dual vertex.
    pub fn g_field(&self) -> Vec<Complex64> {
        let t = tau();
        let t2 = t * t;
        self.counts
            .iter()
            .map(|c| {
                let [h0, h1, h2] = c.map(|x| x as f64 / self.trials as f64);
                h0 + t * h1 + t2 * h2
            })
            .collect()
    }

    /// S = H_1 + H_tau + H_tau2 per dual vertex.
    pub fn s_field(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|c| c.iter().map(|&x| x as f64 / self.trials as f64).sum())
            .collect()
    }
}

fn project_to_segment(v: Complex64, a: Complex64, b: Complex64) -> Complex64 {
    let d = b - a;
    let t = ((v - a).re * d.re + (v - a).im * d.im) / d.norm_sqr();
    a + d * t.clamp(0.0, 1.0)
}

/// Boundary modification: dual vertices touching the marked site x(tau^k)
/// are pinned to tau^k; other vertices touching arc j project onto the
/// triangle side [tau^j, tau^{j+1}]; interior vertices are unchanged.
pub fn modify_boundary(dd: &DiscreteDomain, g: &[Complex64]) -> Result<Vec<Complex64>> {
    if dd.marked_count() != 3 {
        return Err(Error::WrongMarkedPointCount { expected: 3, found: dd.marked_count() });
    }
    let t = tau();
    let vertex = [Complex64::new(1.0, 0.0), t, t * t];
    let mut out = g.to_vec();
    for (f, v) in dd.dual_vertices.iter().enumerate() {
        let mut marked_k: Option<usize> = None;
        let mut arc: Option<usize> = None;
        for c in v.corners() {
            let Some(s) = dd.site_id(c) else { continue };
            for k in 0..3 {
                if dd.marked_sites[k] == s {
                    marked_k = Some(marked_k.map_or(k, |m| m.min(k)));
                }
            }
            let a = dd.arc_of_site[s as usize];
            if a != usize::MAX {
                arc = Some(arc.map_or(a, |x| x.min(a)));
            }
        }
        if let Some(k) = marked_k {
            out[f] = vertex[k];
        } else if let Some(j) = arc {
            out[f] = project_to_segment(g[f], vertex[j], vertex[(j + 1) % 3]);
        }
    }
    Ok(out)
}

/// The hexagon around a site, ordered counter-clockwise; None unless all six
/// faces exist.
pub fn hexagon(dd: &DiscreteDomain, s: SiteCoord) -> Option<[DualVertex; 6]> {
    let faces = incident_faces(s);
    if faces.iter().any(|f| dd.dual_id(*f).is_none()) {
        return None;
    }
    let center = s.pos(dd.mesh);
    let mut with_angle: Vec<(f64, DualVertex)> = faces
        .iter()
        .map(|&f| {
            let d = f.pos(dd.mesh) - center;
            (d.im.atan2(d.re), f)
        })
        .collect();
    with_angle.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out = [faces[0]; 6];
    for (i, (_, f)) in with_angle.into_iter().enumerate() {
        out[i] = f;
    }
    Some(out)
}

fn nearest_site(dd: &DiscreteDomain, p: Complex64) -> Option<SiteCoord> {
    let mesh = dd.mesh;
    let j0 = (2.0 * p.im / (SQRT3 * mesh)).floor() as i32;
    let mut best: Option<(f64, SiteCoord)> = None;
    for j in j0 - 1..=j0 + 2 {
        let i0 = (p.re / mesh - 0.5 * j as f64).floor() as i32;
        for i in i0 - 1..=i0 + 2 {
            let s = SiteCoord::new(i, j);
            if dd.site_id(s).is_none() {
                continue;
            }
            let d = (s.pos(mesh) - p).norm();
            if best.map_or(true, |(bd, bs)| (d, (s.j, s.i)) < (bd, (bs.j, bs.i))) {
                best = Some((d, s));
            }
        }
    }
    best.map(|(_, s)| s)
}

/// Piecewise-linear interpolation: each hexagonal face is fanned from its
/// lexicographically smallest vertex and the value is barycentric in the
/// containing fan triangle.
pub fn interpolate(dd: &DiscreteDomain, values: &[Complex64], p: Complex64) -> Result<Complex64> {
    let site = nearest_site(dd, p).ok_or(Error::OutsideCoveredRegion)?;
    let hex = hexagon(dd, site).ok_or(Error::OutsideCoveredRegion)?;
    let apex = *hex.iter().min().unwrap();
    let apex_pos = apex.pos(dd.mesh);
    let apex_val = values[dd.dual_id(apex).unwrap() as usize];
    let start = hex.iter().position(|&f| f == apex).unwrap();
    let mut best: Option<(f64, Complex64)> = None;
    for t in 1..5 {
        let a = hex[(start + t) % 6];
        let b = hex[(start + t + 1) % 6];
        let (pa, pb) = (a.pos(dd.mesh), b.pos(dd.mesh));
        let (va, vb) = (
            values[dd.dual_id(a).unwrap() as usize],
            values[dd.dual_id(b).unwrap() as usize],
        );
        let d1 = pa - apex_pos;
        let d2 = pb - apex_pos;
        let det = d1.re * d2.im - d1.im * d2.re;
        if det.abs() < 1e-300 {
            continue;
        }
        let r = p - apex_pos;
        let l1 = (r.re * d2.im - r.im * d2.re) / det;
        let l2 = (d1.re * r.im - d1.im * r.re) / det;
        let l0 = 1.0 - l1 - l2;
        let min_bary = l0.min(l1).min(l2);
        if best.map_or(true, |(m, _)| min_bary > m) {
            best = Some((min_bary, apex_val * l0 + va * l1 + vb * l2));
        }
    }
    match best {
        Some((m, v)) if m > -1e-9 => Ok(v),
        _ => Err(Error::OutsideCoveredRegion),
    }
}

/// dbar of the affine interpolant through the face's three dual neighbors
/// (zero on complex-affine fields, |.| = 1 on conj(z)).
pub fn discrete_dbar(
    dd: &DiscreteDomain,
    values: &[Complex64],
    face: DualVertex,
) -> Result<Complex64> {
    let adj = dd.face_adjacency(face)?;
    if adj.len() != 3 {
        return Err(Error::BoundaryFace);
    }
    let p: Vec<Complex64> = adj.iter().map(|(w, _)| w.pos(dd.mesh)).collect();
    let v: Vec<Complex64> = adj
        .iter()
        .map(|(w, _)| values[dd.dual_id(*w).unwrap() as usize])
        .collect();
    let d1 = p[1] - p[0];
    let d2 = p[2] - p[0];
    let u1 = v[1] - v[0];
    let u2 = v[2] - v[0];
    let denom = d1.conj() * d2 - d2.conj() * d1;
    Ok((u1 * d2 - u2 * d1) / denom)
}

/// Max over the dual vertices and complete hexagon centers of
/// |field - phi|.
pub fn sup_deviation(
    dd: &DiscreteDomain,
    values: &[Complex64],
    map: &MapDescriptor,
) -> Result<f64> {
    let mut sup = 0.0f64;
    for (f, v) in dd.dual_vertices.iter().enumerate() {
        let phi = map.evaluate(v.pos(dd.mesh))?;
        sup = sup.max((values[f] - phi).norm());
    }
    for s in &dd.sites {
        if hexagon(dd, *s).is_none() {
            continue;
        }
        let p = s.pos(dd.mesh);
        let val = interpolate(dd, values, p)?;
        let phi = map.evaluate(p)?;
        sup = sup.max((val - phi).norm());
    }
    Ok(sup)
}
