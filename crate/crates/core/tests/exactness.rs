//! Exhaustive agreement of the production event detectors with independent
//! brute-force oracles on small catalog domains: every configuration of each
//! domain is enumerated and the answers compared bit for bit.

use num_complex::Complex64;
use perclab::engine::{
    arm_event_occurs, crossing_occurs, separating_face_bits, ArmSpec, Configuration,
};
use perclab::geometry::{discretize, DiscreteDomain, DomainKind, DomainSpec, SiteCoord};

fn tri(mesh: f64) -> DiscreteDomain {
    let spec = DomainSpec::new(
        DomainKind::EquilateralTriangle { side: 1.0 },
        vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
    )
    .unwrap();
    discretize(&spec, mesh).unwrap()
}

fn rect2(mesh: f64) -> DiscreteDomain {
    let spec = DomainSpec::new(
        DomainKind::Rectangle { aspect: 2.0 },
        vec![0.0, 1.0 / 3.0, 0.5, 5.0 / 6.0],
    )
    .unwrap();
    discretize(&spec, mesh).unwrap()
}

/// Path-existence oracle: breadth-first search within one color from the
/// sites of one arc to the sites of the other.
fn oracle_crossing(cfg: &Configuration, arc_a: usize, arc_b: usize, color: bool) -> bool {
    let dd = cfg.domain;
    let n = dd.n_sites();
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for s in 0..n {
        if cfg.colors[s] == color && perclab::engine::arc_mask(dd, s as u32) & (1 << arc_a) != 0 {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        if perclab::engine::arc_mask(dd, s as u32) & (1 << arc_b) != 0 {
            return true;
        }
        for nb in dd.sites[s].neighbors() {
            if let Some(t) = dd.site_id(nb) {
                let t = t as usize;
                if cfg.colors[t] == color && !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
    }
    false
}

#[test]
fn crossing_agrees_with_bfs_oracle_on_catalog() {
    for dd in [tri(0.45), rect2(0.7)] {
        let n = dd.n_sites();
        assert!(n <= 18, "n = {n}");
        let m = dd.n_arcs();
        let pairs: Vec<(usize, usize)> =
            (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
        for mask in 0..1u32 << n {
            let cfg = Configuration::from_bits(&dd, mask);
            for &(a, b) in &pairs {
                for color in [true, false] {
                    assert_eq!(
                        crossing_occurs(&cfg, a, b, color).unwrap(),
                        oracle_crossing(&cfg, a, b, color),
                        "mask {mask:b} arcs {a},{b} color {color}"
                    );
                }
            }
        }
    }
}

#[test]
fn four_arc_crossing_duality_exhaustive() {
    let dd = rect2(0.7);
    let n = dd.n_sites();
    assert!(n <= 18, "n = {n}");
    for mask in 0..1u32 << n {
        let cfg = Configuration::from_bits(&dd, mask);
        let open = crossing_occurs(&cfg, 0, 2, true).unwrap();
        let closed = crossing_occurs(&cfg, 1, 3, false).unwrap();
        assert_ne!(open, closed, "mask {mask:b}");
    }
}

/// Separation oracle: enumerate every simple open path from arc (k+2)%3 to
/// arc k; for each path alone, flood the face graph from arc (k+1)%3 with an
/// edge impassable when all its in-domain endpoints lie on the path; a face
/// is separated iff some single path cuts it off. Compared against the
/// production cluster-based flood.
fn oracle_separating(
    fg: &perclab::geometry::FaceGraph,
    cfg: &Configuration,
    k: usize,
) -> Vec<bool> {
    let dd = cfg.domain;
    let n = dd.n_sites();
    let arc_a = (k + 2) % 3;
    let arc_b = k;
    let arc_t = (k + 1) % 3;
    let touches = |s: usize, arc: usize| !fg.arc_edges_of_site[s][arc].is_empty();
    let site_adj: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            dd.sites[s]
                .neighbors()
                .iter()
                .filter_map(|t| dd.site_id(*t))
                .map(|x| x as usize)
                .collect()
        })
        .collect();
    let nf = fg.faces.len();
    let mut separated = vec![false; nf];

    fn flood_unreached(
        fg: &perclab::geometry::FaceGraph,
        on_path: &[bool],
        arc_t: usize,
        out: &mut [bool],
    ) {
        let nf = fg.faces.len();
        let mut reached = vec![false; nf];
        let mut stack = Vec::new();
        for &f in &fg.arc_faces[arc_t] {
            if !reached[f as usize] {
                reached[f as usize] = true;
                stack.push(f);
            }
        }
        while let Some(f) = stack.pop() {
            for &(g, eid) in &fg.adjacency[f as usize] {
                let blocked = match fg.edge_sites[eid as usize] {
                    (Some(a), Some(b)) => on_path[a as usize] && on_path[b as usize],
                    (Some(a), None) | (None, Some(a)) => on_path[a as usize],
                    (None, None) => false,
                };
                if !reached[g as usize] && !blocked {
                    reached[g as usize] = true;
                    stack.push(g);
                }
            }
        }
        for (o, r) in out.iter_mut().zip(&reached) {
            *o |= !r;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        fg: &perclab::geometry::FaceGraph,
        cfg: &Configuration,
        site_adj: &[Vec<usize>],
        on_path: &mut Vec<bool>,
        path: &mut Vec<usize>,
        arc_b: usize,
        arc_t: usize,
        touches: &dyn Fn(usize, usize) -> bool,
        separated: &mut [bool],
    ) {
        let last = *path.last().unwrap();
        if touches(last, arc_b) {
            flood_unreached(fg, on_path, arc_t, separated);
        }
        for &nb in &site_adj[last] {
            if cfg.colors[nb] && !on_path[nb] {
                on_path[nb] = true;
                path.push(nb);
                dfs(fg, cfg, site_adj, on_path, path, arc_b, arc_t, touches, separated);
                path.pop();
                on_path[nb] = false;
            }
        }
    }

    let mut on_path = vec![false; n];
    let mut path = Vec::new();
    for start in 0..n {
        if !cfg.colors[start] || !touches(start, arc_a) {
            continue;
        }
        on_path[start] = true;
        path.push(start);
        dfs(fg, cfg, &site_adj, &mut on_path, &mut path, arc_b, arc_t, &touches, &mut separated);
        path.pop();
        on_path[start] = false;
    }
    separated
}

#[test]
fn separating_field_agrees_with_simple_path_oracle() {
    for dd in [tri(0.6), tri(1.0)] {
        let n = dd.n_sites();
        assert!(n <= 15, "n = {n}");
        let fg = dd.face_graph().unwrap();
        for mask in 0..1u32 << n {
            let cfg = Configuration::from_bits(&dd, mask);
            for k in 0..3 {
                let got = separating_face_bits(&fg, &cfg, k).unwrap();
                let want = oracle_separating(&fg, &cfg, k);
                assert_eq!(got, want, "mask {mask:b} k {k}");
            }
        }
    }
}

/// Disjoint-path oracle for the arm event: search directly for k vertex
/// disjoint crossings of the sector with the prescribed alternating colors,
/// ordered by the angle of their inner contact sites.
struct ArmOracle<'a> {
    dd: &'a DiscreteDomain,
    spec: &'a ArmSpec,
    region: Vec<usize>,
    in_region: Vec<bool>,
    angle: Vec<f64>,
    inner_touch: Vec<bool>,
    outer_touch: Vec<bool>,
}

impl<'a> ArmOracle<'a> {
    fn new(dd: &'a DiscreteDomain, spec: &'a ArmSpec) -> Self {
        let n = dd.n_sites();
        let mesh = dd.mesh;
        let region: Vec<usize> =
            (0..n).filter(|&s| spec.in_sector(dd.sites[s].pos(mesh))).collect();
        let mut in_region = vec![false; n];
        for &s in &region {
            in_region[s] = true;
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut angle = vec![0.0; n];
        let mut inner_touch = vec![false; n];
        let mut outer_touch = vec![false; n];
        for &s in &region {
            let p = dd.sites[s].pos(mesh) - spec.center;
            angle[s] = p.im.atan2(p.re).rem_euclid(two_pi);
            for nb in dd.sites[s].neighbors() {
                if let Some(t) = dd.site_id(nb) {
                    if in_region[t as usize] {
                        continue;
                    }
                }
                let q = nb.pos(mesh) - spec.center;
                if q.norm() < spec.inner_radius - 1e-9 {
                    inner_touch[s] = true;
                } else if q.norm() > spec.outer_radius + 1e-9 && in_range(spec, q) {
                    outer_touch[s] = true;
                }
            }
        }
        ArmOracle { dd, spec, region, in_region, angle, inner_touch, outer_touch }
    }

    /// True iff `k` disjoint crossings with alternating colors (first color
    /// `start_open`) exist whose inner contact angles strictly increase.
    fn event(&self, colors: &[bool]) -> bool {
        if self.spec.k == 0 {
            return true;
        }
        let mut used = vec![false; self.dd.n_sites()];
        self.place(colors, &mut used, self.spec.start_open, self.spec.k, -1.0)
    }

    fn place(
        &self,
        colors: &[bool],
        used: &mut Vec<bool>,
        color: bool,
        remaining: usize,
        min_angle: f64,
    ) -> bool {
        let mut starts: Vec<usize> = self
            .region
            .iter()
            .copied()
            .filter(|&s| {
                self.inner_touch[s] && !used[s] && colors[s] == color && self.angle[s] > min_angle
            })
            .collect();
        starts.sort_by(|&a, &b| self.angle[a].partial_cmp(&self.angle[b]).unwrap());
        for s in starts {
            used[s] = true;
            let mut path = vec![s];
            if self.extend(colors, used, &mut path, color, remaining, self.angle[s]) {
                used[s] = false;
                return true;
            }
            used[s] = false;
        }
        false
    }

    fn extend(
        &self,
        colors: &[bool],
        used: &mut Vec<bool>,
        path: &mut Vec<usize>,
        color: bool,
        remaining: usize,
        inner_angle: f64,
    ) -> bool {
        let last = *path.last().unwrap();
        if self.outer_touch[last] {
            if remaining == 1 {
                return true;
            }
            if self.place(colors, used, !color, remaining - 1, inner_angle) {
                return true;
            }
        }
        for nb in self.dd.sites[last].neighbors() {
            let Some(t) = self.dd.site_id(nb) else { continue };
            let t = t as usize;
            if self.in_region[t] && !used[t] && colors[t] == color {
                used[t] = true;
                path.push(t);
                if self.extend(colors, used, path, color, remaining, inner_angle) {
                    used[t] = false;
                    path.pop();
                    return true;
                }
                path.pop();
                used[t] = false;
            }
        }
        false
    }
}

fn in_range(spec: &ArmSpec, v: Complex64) -> bool {
    if spec.is_full() {
        return true;
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let a = v.im.atan2(v.re).rem_euclid(two_pi);
    a <= spec.theta + 1e-9 || a >= two_pi - 1e-9
}

#[test]
fn arm_event_agrees_with_disjoint_path_oracle() {
    let spec = DomainSpec::new(
        DomainKind::HalfAnnulus { inner: 1.2, outer: 2.9 },
        vec![0.0, 0.25, 0.5, 0.75],
    )
    .unwrap();
    let dd = discretize(&spec, 1.0).unwrap();
    let n = dd.n_sites();
    let arm_base = ArmSpec {
        center: Complex64::new(0.0, 0.0),
        inner_radius: 1.2,
        outer_radius: 2.9,
        theta: std::f64::consts::PI,
        k: 1,
        start_open: true,
    };
    let region: Vec<usize> =
        (0..n).filter(|&s| arm_base.in_sector(dd.sites[s].pos(dd.mesh))).collect();
    let r = region.len();
    assert!(r <= 14, "region = {r}");
    for mask in 0..1u32 << r {
        let mut colors = vec![false; n];
        for (b, &s) in region.iter().enumerate() {
            colors[s] = mask >> b & 1 == 1;
        }
        let cfg = Configuration {
            domain: &dd,
            colors,
            seed: 0,
            trial_index: mask as u64,
        };
        for k in 1..=3usize {
            for start_open in [true, false] {
                let arm = ArmSpec { k, start_open, ..arm_base };
                let oracle = ArmOracle::new(&dd, &arm);
                assert_eq!(
                    arm_event_occurs(&cfg, &arm).unwrap(),
                    oracle.event(&cfg.colors),
                    "mask {mask:b} k {k} start_open {start_open}"
                );
            }
        }
    }
}
