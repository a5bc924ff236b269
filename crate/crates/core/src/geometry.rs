//! Triangular lattice at mesh delta, its dual (triangle barycenters), and
//! discretization of the catalog Jordan domains with marked boundary points.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;

pub const SQRT3: f64 = 1.7320508075688772;

/// The six lattice steps of the triangular lattice in axial coordinates.
pub const STEPS: [(i32, i32); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteCoord {
    pub i: i32,
    pub j: i32,
}

impl SiteCoord {
    pub fn new(i: i32, j: i32) -> Self {
        SiteCoord { i, j }
    }

    /// Embedded position delta * (i + j/2, j*sqrt(3)/2).
    pub fn pos(&self, mesh: f64) -> Complex64 {
        embed(self.i as f64, self.j as f64, mesh)
    }

    pub fn neighbors(&self) -> [SiteCoord; 6] {
        STEPS.map(|(di, dj)| SiteCoord::new(self.i + di, self.j + dj))
    }
}

pub fn embed(i: f64, j: f64, mesh: f64) -> Complex64 {
    Complex64::new(mesh * (i + 0.5 * j), mesh * j * SQRT3 / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Up,
    Down,
}

/// Barycenter of one lattice triangle. Up(i,j) has corners (i,j), (i+1,j),
/// (i,j+1); Down(i,j) has corners (i+1,j), (i,j+1), (i+1,j+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualVertex {
    pub base: SiteCoord,
    pub orientation: Orientation,
}

impl DualVertex {
    pub fn up(i: i32, j: i32) -> Self {
        DualVertex { base: SiteCoord::new(i, j), orientation: Orientation::Up }
    }

    pub fn down(i: i32, j: i32) -> Self {
        DualVertex { base: SiteCoord::new(i, j), orientation: Orientation::Down }
    }

    pub fn corners(&self) -> [SiteCoord; 3] {
        let (i, j) = (self.base.i, self.base.j);
        match self.orientation {
            Orientation::Up => [
                SiteCoord::new(i, j),
                SiteCoord::new(i + 1, j),
                SiteCoord::new(i, j + 1),
            ],
            Orientation::Down => [
                SiteCoord::new(i + 1, j),
                SiteCoord::new(i, j + 1),
                SiteCoord::new(i + 1, j + 1),
            ],
        }
    }

    pub fn pos(&self, mesh: f64) -> Complex64 {
        let (i, j) = (self.base.i as f64, self.base.j as f64);
        match self.orientation {
            Orientation::Up => embed(i + 1.0 / 3.0, j + 1.0 / 3.0, mesh),
            Orientation::Down => embed(i + 2.0 / 3.0, j + 2.0 / 3.0, mesh),
        }
    }

    /// The <=3 face neighbors with the lattice edge separating the two faces.
    pub fn adjacent_faces(&self) -> [(DualVertex, (SiteCoord, SiteCoord)); 3] {
        let (i, j) = (self.base.i, self.base.j);
        match self.orientation {
            Orientation::Up => [
                (DualVertex::down(i, j), (SiteCoord::new(i + 1, j), SiteCoord::new(i, j + 1))),
                (DualVertex::down(i - 1, j), (SiteCoord::new(i, j), SiteCoord::new(i, j + 1))),
                (DualVertex::down(i, j - 1), (SiteCoord::new(i, j), SiteCoord::new(i + 1, j))),
            ],
            Orientation::Down => [
                (DualVertex::up(i, j), (SiteCoord::new(i + 1, j), SiteCoord::new(i, j + 1))),
                (DualVertex::up(i + 1, j), (SiteCoord::new(i + 1, j), SiteCoord::new(i + 1, j + 1))),
                (DualVertex::up(i, j + 1), (SiteCoord::new(i, j + 1), SiteCoord::new(i + 1, j + 1))),
            ],
        }
    }
}

/// Faces incident to a site (the site's hexagon, when all six exist).
pub fn incident_faces(s: SiteCoord) -> [DualVertex; 6] {
    let (i, j) = (s.i, s.j);
    [
        DualVertex::up(i, j),
        DualVertex::up(i - 1, j),
        DualVertex::up(i, j - 1),
        DualVertex::down(i - 1, j),
        DualVertex::down(i, j - 1),
        DualVertex::down(i - 1, j - 1),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainKind {
    EquilateralTriangle { side: f64 },
    Rectangle { aspect: f64 },
    HalfDisk { radius: f64 },
    HalfAnnulus { inner: f64, outer: f64 },
    Sector { angle: f64 },
    Disk { radius: f64 },
}

/// A catalog Jordan domain with 3 or 4 marked boundary points given as
/// arc-length parameters in [0,1), counter-clockwise.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DomainSpec {
    #[serde(flatten)]
    pub kind: DomainKind,
    pub marked: Vec<f64>,
}

/// One piece of a domain boundary, traversed counter-clockwise.
#[derive(Debug, Clone, Copy)]
enum Piece {
    Segment { a: Complex64, b: Complex64 },
    /// Circular arc about `center`; angle runs from `a0` to `a1` (either way).
    Arc { center: Complex64, radius: f64, a0: f64, a1: f64 },
}

impl Piece {
    fn len(&self) -> f64 {
        match self {
            Piece::Segment { a, b } => (b - a).norm(),
            Piece::Arc { radius, a0, a1, .. } => radius * (a1 - a0).abs(),
        }
    }

    fn point_at(&self, s: f64) -> Complex64 {
        match self {
            Piece::Segment { a, b } => a + (b - a) * s,
            Piece::Arc { center, radius, a0, a1 } => {
                let ang = a0 + (a1 - a0) * s;
                center + Complex64::from_polar(*radius, ang)
            }
        }
    }

    /// Unit tangent in the traversal direction at fraction s.
    fn dir_at(&self, s: f64) -> Complex64 {
        match self {
            Piece::Segment { a, b } => (b - a) / (b - a).norm(),
            Piece::Arc { a0, a1, .. } => {
                let ang = a0 + (a1 - a0) * s;
                Complex64::new(0.0, (a1 - a0).signum()) * Complex64::from_polar(1.0, ang)
            }
        }
    }

    /// (fraction along piece, distance) of the closest boundary point to p.
    fn project(&self, p: Complex64) -> (f64, f64) {
        match self {
            Piece::Segment { a, b } => {
                let d = b - a;
                let t = ((p - a).re * d.re + (p - a).im * d.im) / d.norm_sqr();
                let t = t.clamp(0.0, 1.0);
                (t, (p - (a + d * t)).norm())
            }
            Piece::Arc { center, radius, a0, a1 } => {
                let v = p - center;
                let ang = v.im.atan2(v.re);
                let span = a1 - a0;
                // progress along the traversal direction, wrapped to [0, 2pi)
                let d = ((ang - a0) * span.signum()).rem_euclid(2.0 * std::f64::consts::PI);
                if d <= span.abs() {
                    let s = d / span.abs();
                    (s, (v.norm() - radius).abs())
                } else {
                    let ea = center + Complex64::from_polar(*radius, *a0);
                    let eb = center + Complex64::from_polar(*radius, *a1);
                    let (da, db) = ((p - ea).norm(), (p - eb).norm());
                    if da <= db {
                        (0.0, da)
                    } else {
                        (1.0, db)
                    }
                }
            }
        }
    }
}

const EPS: f64 = 1e-9;

impl DomainSpec {
    pub fn new(kind: DomainKind, marked: Vec<f64>) -> Result<Self> {
        let spec = DomainSpec { kind, marked };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            DomainKind::EquilateralTriangle { side } if side <= 0.0 => {
                return Err(Error::InvalidSpec("triangle side must be positive".into()))
            }
            DomainKind::Rectangle { aspect } if aspect <= 0.0 => {
                return Err(Error::InvalidSpec("rectangle aspect must be positive".into()))
            }
            DomainKind::HalfDisk { radius } | DomainKind::Disk { radius } if radius <= 0.0 => {
                return Err(Error::InvalidSpec("radius must be positive".into()))
            }
            DomainKind::HalfAnnulus { inner, outer } if !(0.0 < inner && inner < outer) => {
                return Err(Error::InvalidSpec("half annulus needs 0 < inner < outer".into()))
            }
            DomainKind::Sector { angle }
                if !(angle > 0.0 && angle <= 2.0 * std::f64::consts::PI) =>
            {
                return Err(Error::InvalidSpec("sector angle must lie in (0, 2pi]".into()))
            }
            _ => {}
        }
        if self.marked.len() != 3 && self.marked.len() != 4 {
            return Err(Error::InvalidSpec(format!(
                "need 3 or 4 marked points, got {}",
                self.marked.len()
            )));
        }
        for w in self.marked.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidSpec(
                    "marked parameters must be strictly increasing in [0,1)".into(),
                ));
            }
        }
        if let Some(&first) = self.marked.first() {
            if !(0.0..1.0).contains(&first) || *self.marked.last().unwrap() >= 1.0 {
                return Err(Error::InvalidSpec("marked parameters must lie in [0,1)".into()));
            }
        }
        Ok(())
    }

    fn pieces(&self) -> Vec<Piece> {
        use std::f64::consts::PI;
        let c = |x: f64, y: f64| Complex64::new(x, y);
        match self.kind {
            DomainKind::EquilateralTriangle { side: s } => vec![
                Piece::Segment { a: c(0.0, 0.0), b: c(s, 0.0) },
                Piece::Segment { a: c(s, 0.0), b: c(s / 2.0, s * SQRT3 / 2.0) },
                Piece::Segment { a: c(s / 2.0, s * SQRT3 / 2.0), b: c(0.0, 0.0) },
            ],
            DomainKind::Rectangle { aspect: a } => vec![
                Piece::Segment { a: c(0.0, 0.0), b: c(a, 0.0) },
                Piece::Segment { a: c(a, 0.0), b: c(a, 1.0) },
                Piece::Segment { a: c(a, 1.0), b: c(0.0, 1.0) },
                Piece::Segment { a: c(0.0, 1.0), b: c(0.0, 0.0) },
            ],
            DomainKind::HalfDisk { radius: r } => vec![
                Piece::Segment { a: c(-r, 0.0), b: c(r, 0.0) },
                Piece::Arc { center: c(0.0, 0.0), radius: r, a0: 0.0, a1: PI },
            ],
            DomainKind::HalfAnnulus { inner: r, outer: big } => vec![
                Piece::Segment { a: c(r, 0.0), b: c(big, 0.0) },
                Piece::Arc { center: c(0.0, 0.0), radius: big, a0: 0.0, a1: PI },
                Piece::Segment { a: c(-big, 0.0), b: c(-r, 0.0) },
                Piece::Arc { center: c(0.0, 0.0), radius: r, a0: PI, a1: 0.0 },
            ],
            DomainKind::Sector { angle } => vec![
                Piece::Segment { a: c(0.0, 0.0), b: c(1.0, 0.0) },
                Piece::Arc { center: c(0.0, 0.0), radius: 1.0, a0: 0.0, a1: angle },
                Piece::Segment { a: Complex64::from_polar(1.0, angle), b: c(0.0, 0.0) },
            ],
            DomainKind::Disk { radius } => vec![Piece::Arc {
                center: c(0.0, 0.0),
                radius,
                a0: 0.0,
                a1: 2.0 * PI,
            }],
        }
    }

    pub fn perimeter(&self) -> f64 {
        self.pieces().iter().map(Piece::len).sum()
    }

    pub fn area(&self) -> f64 {
        use std::f64::consts::PI;
        match self.kind {
            DomainKind::EquilateralTriangle { side } => SQRT3 / 4.0 * side * side,
            DomainKind::Rectangle { aspect } => aspect,
            DomainKind::HalfDisk { radius } => PI * radius * radius / 2.0,
            DomainKind::HalfAnnulus { inner, outer } => PI * (outer * outer - inner * inner) / 2.0,
            DomainKind::Sector { angle } => angle / 2.0,
            DomainKind::Disk { radius } => PI * radius * radius,
        }
    }

    /// Point on the boundary at arc-length parameter t in [0,1), CCW.
    pub fn boundary_point(&self, t: f64) -> Complex64 {
        let pieces = self.pieces();
        let total: f64 = pieces.iter().map(Piece::len).sum();
        let mut s = t.rem_euclid(1.0) * total;
        for p in &pieces {
            let l = p.len();
            if s <= l || std::ptr::eq(p, pieces.last().unwrap()) {
                return p.point_at((s / l).min(1.0));
            }
            s -= l;
        }
        unreachable!()
    }

    /// (arc-length parameter, distance) of the boundary point nearest p.
    pub fn nearest_boundary(&self, p: Complex64) -> (f64, f64) {
        let pieces = self.pieces();
        let total: f64 = pieces.iter().map(Piece::len).sum();
        let mut best = (0.0, f64::INFINITY);
        let mut acc = 0.0;
        for piece in &pieces {
            let (s, d) = piece.project(p);
            if d < best.1 {
                best = ((acc + s * piece.len()) / total, d);
            }
            acc += piece.len();
        }
        (best.0.rem_euclid(1.0), best.1)
    }

    /// Boundary parameter used for arc labeling: `nearest_boundary`, except
    /// that points projecting exactly onto a corner are spread across the
    /// corner's outward normal wedge by an infinitesimal offset, so the
    /// cyclic order of the parameters matches the cyclic order of the sites
    /// around the boundary instead of collapsing at the corner.
    fn labeling_param(&self, p: Complex64) -> f64 {
        let pieces = self.pieces();
        let total: f64 = pieces.iter().map(Piece::len).sum();
        let (t, _) = self.nearest_boundary(p);
        let q = self.boundary_point(t);
        let rot_cw = |z: Complex64| Complex64::new(z.im, -z.re);
        let angle_ccw = |u: Complex64, v: Complex64| (v / u).arg().rem_euclid(2.0 * PI);
        let n = pieces.len();
        let mut acc = 0.0;
        for (idx, piece) in pieces.iter().enumerate() {
            let corner = piece.point_at(0.0);
            if (q - corner).norm() < 1e-9 * total {
                let prev = &pieces[(idx + n - 1) % n];
                // outward normals flanking the corner (domain lies to the
                // left of the counter-clockwise traversal)
                let n_in = rot_cw(prev.dir_at(1.0));
                let n_out = rot_cw(piece.dir_at(0.0));
                let wedge = angle_ccw(n_in, n_out);
                if wedge > 1e-9 && (p - corner).norm() > 1e-12 * total {
                    let mut a = angle_ccw(n_in, p - corner);
                    if a > PI + 0.5 * wedge {
                        a -= 2.0 * PI;
                    }
                    let f = (a / wedge).clamp(0.0, 1.0);
                    let t_c = acc / total;
                    return (t_c + 1e-7 * (f - 0.5)).rem_euclid(1.0);
                }
            }
            acc += piece.len();
        }
        t
    }

    /// Closed containment test (boundary points count as inside).
    pub fn contains(&self, p: Complex64) -> bool {
        let (x, y) = (p.re, p.im);
        match self.kind {
            DomainKind::EquilateralTriangle { side: s } => {
                y >= -EPS && y <= SQRT3 * x + EPS && y <= SQRT3 * (s - x) + EPS
            }
            DomainKind::Rectangle { aspect: a } => {
                x >= -EPS && x <= a + EPS && y >= -EPS && y <= 1.0 + EPS
            }
            DomainKind::HalfDisk { radius } => y >= -EPS && p.norm() <= radius + EPS,
            DomainKind::HalfAnnulus { inner, outer } => {
                let r = p.norm();
                y >= -EPS && r >= inner - EPS && r <= outer + EPS
            }
            DomainKind::Sector { angle } => {
                if p.norm() > 1.0 + EPS {
                    return false;
                }
                if p.norm() < EPS {
                    return true;
                }
                let a = y.atan2(x);
                let a = if a < -EPS { a + 2.0 * std::f64::consts::PI } else { a };
                a >= -EPS && a <= angle + EPS
            }
            DomainKind::Disk { radius } => p.norm() <= radius + EPS,
        }
    }

    fn bbox(&self) -> (f64, f64, f64, f64) {
        match self.kind {
            DomainKind::EquilateralTriangle { side: s } => (0.0, s, 0.0, s * SQRT3 / 2.0),
            DomainKind::Rectangle { aspect: a } => (0.0, a, 0.0, 1.0),
            DomainKind::HalfDisk { radius: r } => (-r, r, 0.0, r),
            DomainKind::HalfAnnulus { outer, .. } => (-outer, outer, 0.0, outer),
            DomainKind::Sector { .. } => (-1.0, 1.0, -1.0, 1.0),
            DomainKind::Disk { radius: r } => (-r, r, -r, r),
        }
    }
}

/// A Jordan domain discretized at mesh delta: the sites contained in the
/// domain or having a neighbor in it, the dual faces whose three corners are
/// all present, and arc labels on the boundary sites.
#[derive(Debug, Clone)]
pub struct DiscreteDomain {
    pub spec: DomainSpec,
    pub mesh: f64,
    /// Sorted by (j, i).
    pub sites: Vec<SiteCoord>,
    site_index: HashMap<(i32, i32), u32>,
    /// True for sites with at least one lattice neighbor outside `sites`.
    pub is_boundary: Vec<bool>,
    /// Arc index for boundary sites, usize::MAX sentinel elsewhere.
    pub arc_of_site: Vec<usize>,
    /// Snapped boundary site for each marked point.
    pub marked_sites: Vec<u32>,
    /// Sorted; every face has all three corners in `sites`.
    pub dual_vertices: Vec<DualVertex>,
    dual_index: HashMap<DualVertex, u32>,
}

impl DiscreteDomain {
    pub fn site_id(&self, s: SiteCoord) -> Option<u32> {
        self.site_index.get(&(s.i, s.j)).copied()
    }

    pub fn dual_id(&self, v: DualVertex) -> Option<u32> {
        self.dual_index.get(&v).copied()
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn n_arcs(&self) -> usize {
        self.spec.marked.len()
    }

    pub fn marked_count(&self) -> usize {
        self.spec.marked.len()
    }

    /// Face neighbors restricted to faces present in the domain.
    pub fn face_adjacency(
        &self,
        v: DualVertex,
    ) -> Result<Vec<(DualVertex, (SiteCoord, SiteCoord))>> {
        if self.dual_id(v).is_none() {
            return Err(Error::UnknownVertex((v.base.i, v.base.j, v.orientation == Orientation::Up)));
        }
        Ok(v.adjacent_faces()
            .into_iter()
            .filter(|(w, _)| self.dual_id(*w).is_some())
            .collect())
    }

    /// Boundary sites carrying the given arc label.
    pub fn arc_sites(&self, arc: usize) -> Result<Vec<u32>> {
        if arc >= self.n_arcs() {
            return Err(Error::UnknownArc(arc));
        }
        Ok((0..self.sites.len() as u32)
            .filter(|&s| self.arc_of_site[s as usize] == arc)
            .collect())
    }
}

/// Discretizes a catalog domain: all lattice sites inside the domain plus
/// their one-site neighborhood, marked points snapped to the nearest boundary
/// site (ties broken counter-clockwise), arcs labeled by boundary projection.
pub fn discretize(spec: &DomainSpec, mesh: f64) -> Result<DiscreteDomain> {
    spec.validate()?;
    if !(mesh > 0.0) {
        return Err(Error::InvalidSpec("mesh must be positive".into()));
    }
    let (xmin, xmax, ymin, ymax) = spec.bbox();
    let jmin = ((ymin / (mesh * SQRT3 / 2.0)).floor() as i32) - 2;
    let jmax = ((ymax / (mesh * SQRT3 / 2.0)).ceil() as i32) + 2;
    let mut inside: HashMap<(i32, i32), bool> = HashMap::new();
    for j in jmin..=jmax {
        let imin = ((xmin / mesh) - 0.5 * j as f64).floor() as i32 - 2;
        let imax = ((xmax / mesh) - 0.5 * j as f64).ceil() as i32 + 2;
        for i in imin..=imax {
            if spec.contains(SiteCoord::new(i, j).pos(mesh)) {
                inside.insert((i, j), true);
            }
        }
    }
    let mut all: Vec<SiteCoord> = Vec::new();
    let mut seen: HashMap<(i32, i32), bool> = HashMap::new();
    for &(i, j) in inside.keys() {
        let s = SiteCoord::new(i, j);
        for cand in std::iter::once(s).chain(s.neighbors()) {
            if seen.insert((cand.i, cand.j), true).is_none() {
                let in_dom = inside.contains_key(&(cand.i, cand.j));
                let has_in_neighbor =
                    cand.neighbors().iter().any(|n| inside.contains_key(&(n.i, n.j)));
                if in_dom || has_in_neighbor {
                    all.push(cand);
                }
            }
        }
    }
    all.sort_by_key(|s| (s.j, s.i));
    let site_index: HashMap<(i32, i32), u32> =
        all.iter().enumerate().map(|(k, s)| ((s.i, s.j), k as u32)).collect();

    let is_boundary: Vec<bool> = all
        .iter()
        .map(|s| s.neighbors().iter().any(|n| !site_index.contains_key(&(n.i, n.j))))
        .collect();

    let m = spec.marked.len();
    let mut t_of_site = vec![f64::NAN; all.len()];
    for (k, s) in all.iter().enumerate() {
        if is_boundary[k] {
            t_of_site[k] = spec.labeling_param(s.pos(mesh));
        }
    }

    // snap each marked point to the nearest boundary site, ties broken
    // counter-clockwise, then label arcs by the snapped parameters
    let mut marked_sites = Vec::with_capacity(m);
    for &tm in &spec.marked {
        let p = spec.boundary_point(tm);
        let mut best: Option<(f64, f64, u32)> = None;
        // distances equal up to rounding noise count as exact ties so the
        // counter-clockwise rule, not the noise, picks the site
        let tol = 1e-9 * mesh;
        for (k, s) in all.iter().enumerate() {
            if !is_boundary[k] {
                continue;
            }
            let d = (s.pos(mesh) - p).norm();
            let ccw = (t_of_site[k] - tm).rem_euclid(1.0);
            let better = match best {
                None => true,
                Some((bd, bc, _)) => d < bd - tol || (d <= bd + tol && ccw < bc),
            };
            if better {
                best = Some((d, ccw, k as u32));
            }
        }
        let (_, _, k) = best.ok_or_else(|| Error::InvalidSpec("no boundary sites".into()))?;
        marked_sites.push(k);
    }
    if marked_sites.iter().collect::<std::collections::HashSet<_>>().len() != m {
        return Err(Error::MeshTooCoarse { arc: 0, sites: 0 });
    }
    let snapped: Vec<f64> = marked_sites.iter().map(|&k| t_of_site[k as usize]).collect();
    let mut arc_of_site = vec![usize::MAX; all.len()];
    for (k, _) in all.iter().enumerate() {
        if !is_boundary[k] {
            continue;
        }
        let t = t_of_site[k];
        let mut arc = m - 1;
        for a in 0..m {
            let lo = snapped[a];
            let span = (snapped[(a + 1) % m] - lo).rem_euclid(1.0);
            let off = (t - lo).rem_euclid(1.0);
            if off < span || (a == m - 1 && arc == m - 1) {
                arc = a;
                break;
            }
        }
        arc_of_site[k] = arc;
    }
    for (a, &k) in marked_sites.iter().enumerate() {
        arc_of_site[k as usize] = a;
    }
    for a in 0..m {
        let count = arc_of_site.iter().filter(|&&x| x == a).count();
        if count < 2 {
            return Err(Error::MeshTooCoarse { arc: a, sites: count });
        }
    }

    let mut dual_vertices: Vec<DualVertex> = Vec::new();
    for s in &all {
        for v in [DualVertex::up(s.i, s.j), DualVertex::down(s.i, s.j)] {
            if v.corners().iter().all(|c| site_index.contains_key(&(c.i, c.j))) {
                dual_vertices.push(v);
            }
        }
    }
    dual_vertices.sort();
    dual_vertices.dedup();
    let dual_index: HashMap<DualVertex, u32> =
        dual_vertices.iter().enumerate().map(|(k, v)| (*v, k as u32)).collect();

    Ok(DiscreteDomain {
        spec: spec.clone(),
        mesh,
        sites: all,
        site_index,
        is_boundary,
        arc_of_site,
        marked_sites,
        dual_vertices,
        dual_index,
    })
}

/// The full face graph of the discretized domain, viewed as the hexagonal
/// lattice bounding the site hexagons: every lattice triangle with at least
/// one corner among the sites is a face vertex, two faces are adjacent when
/// their shared lattice edge has at least one endpoint in the site set, and
/// the boundary faces form a single cycle whose edges carry the arc labels.
///
/// Separation of a face from a boundary arc is connectivity in this graph
/// with selected lattice edges removed; the faces present here but absent
/// from `dual_vertices` realize the corridor along the domain boundary.
#[derive(Debug, Clone)]
pub struct FaceGraph {
    /// All faces, dual vertices first (in `dual_vertices` order) so a dual
    /// vertex index is also its face index.
    pub faces: Vec<DualVertex>,
    face_index: HashMap<DualVertex, u32>,
    /// Per face: (neighbor face, id of the shared lattice edge). Edges with
    /// both endpoints outside the site set are not traversable and omitted.
    pub adjacency: Vec<Vec<(u32, u32)>>,
    edge_index: HashMap<((i32, i32), (i32, i32)), u32>,
    /// Boundary faces in counter-clockwise order; boundary lattice edge e
    /// joins `cycle[e]` and `cycle[(e+1) % len]`.
    pub cycle: Vec<u32>,
    pub cycle_edges: Vec<u32>,
    /// Arc label of each boundary edge, indexed like `cycle_edges`.
    pub edge_arc: Vec<usize>,
    /// Boundary face nearest each marked point (counter-clockwise ties).
    pub marked_faces: Vec<u32>,
    /// Per site and arc: ids of the site's boundary edges on that arc.
    pub arc_edges_of_site: Vec<Vec<Vec<u32>>>,
    /// Per arc: boundary faces incident to at least one edge of the arc.
    pub arc_faces: Vec<Vec<u32>>,
    /// Boundary edge id -> (inside site, outside site).
    pub boundary_sites_of_edge: HashMap<u32, (SiteCoord, SiteCoord)>,
    /// Per edge id: site ids of the two endpoints, `None` for endpoints
    /// outside the site set.
    pub edge_sites: Vec<(Option<u32>, Option<u32>)>,
}

impl FaceGraph {
    pub fn face_id(&self, f: DualVertex) -> Option<u32> {
        self.face_index.get(&f).copied()
    }

    pub fn edge_id(&self, a: SiteCoord, b: SiteCoord) -> Option<u32> {
        self.edge_index.get(&edge_key(a, b)).copied()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_index.len()
    }
}

fn edge_key(a: SiteCoord, b: SiteCoord) -> ((i32, i32), (i32, i32)) {
    let (p, q) = ((a.i, a.j), (b.i, b.j));
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

fn common_neighbors(a: SiteCoord, b: SiteCoord) -> Vec<SiteCoord> {
    let bn: std::collections::HashSet<(i32, i32)> =
        b.neighbors().iter().map(|n| (n.i, n.j)).collect();
    a.neighbors().iter().filter(|n| bn.contains(&(n.i, n.j))).cloned().collect()
}

/// The face containing the three given corner sites.
pub fn face_of_corners(mut c: [SiteCoord; 3]) -> DualVertex {
    c.sort_by_key(|s| (s.j, s.i));
    if c[0].j == c[1].j {
        DualVertex::up(c[0].i, c[0].j)
    } else {
        DualVertex::down(c[0].i - 1, c[0].j)
    }
}

impl DiscreteDomain {
    /// Builds the extended face graph with the boundary cycle and arc labels
    /// on boundary edges. Deterministic for a given domain.
    pub fn face_graph(&self) -> Result<FaceGraph> {
        let dd = self;
        let n = dd.sites.len();
        let mesh = dd.mesh;
        let m = dd.marked_count();
        let mut edge_index: HashMap<((i32, i32), (i32, i32)), u32> = HashMap::new();
        let mut boundary_edges: Vec<(SiteCoord, SiteCoord)> = Vec::new();
        let mut seen_boundary: std::collections::HashSet<((i32, i32), (i32, i32))> =
            std::collections::HashSet::new();
        for s in &dd.sites {
            for t in s.neighbors() {
                let k = edge_key(*s, t);
                let next = edge_index.len() as u32;
                edge_index.entry(k).or_insert(next);
                if dd.site_id(t).is_none() && seen_boundary.insert(k) {
                    boundary_edges.push((*s, t));
                }
            }
        }
        // dual vertices first so indices coincide, then the boundary faces
        let mut faces: Vec<DualVertex> = dd.dual_vertices.clone();
        let mut face_index: HashMap<DualVertex, u32> =
            faces.iter().enumerate().map(|(k, f)| (*f, k as u32)).collect();
        for s in &dd.sites {
            for f in incident_faces(*s) {
                if !face_index.contains_key(&f) {
                    face_index.insert(f, faces.len() as u32);
                    faces.push(f);
                }
            }
        }
        let mut adjacency: Vec<Vec<(u32, u32)>> = vec![Vec::new(); faces.len()];
        for (fi, f) in faces.iter().enumerate() {
            for (nb, (a, b)) in f.adjacent_faces() {
                if let Some(&ni) = face_index.get(&nb) {
                    if let Some(&eid) = edge_index.get(&edge_key(a, b)) {
                        adjacency[fi].push((ni, eid));
                    }
                }
            }
        }
        // boundary cycle: every boundary face has exactly two boundary edges
        let mut bedges_of_face: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
        for (s, t) in &boundary_edges {
            let eid = edge_index[&edge_key(*s, *t)];
            let cn = common_neighbors(*s, *t);
            debug_assert_eq!(cn.len(), 2);
            let f1 = face_index[&face_of_corners([*s, *t, cn[0]])];
            let f2 = face_index[&face_of_corners([*s, *t, cn[1]])];
            bedges_of_face.entry(f1).or_default().push((eid, f2));
            bedges_of_face.entry(f2).or_default().push((eid, f1));
        }
        for v in bedges_of_face.values() {
            if v.len() != 2 {
                return Err(Error::UnsupportedDomain(
                    "boundary is not a single cycle".into(),
                ));
            }
        }
        let start = *bedges_of_face.keys().min().ok_or(Error::EmptyRegion)?;
        let mut cycle = vec![start];
        let mut cycle_edges = Vec::new();
        let (mut prev_e, mut cur) = bedges_of_face[&start][0];
        cycle_edges.push(prev_e);
        while cur != start {
            cycle.push(cur);
            let &(e2, f2) = bedges_of_face[&cur].iter().find(|(e, _)| *e != prev_e).unwrap();
            cycle_edges.push(e2);
            prev_e = e2;
            cur = f2;
        }
        if cycle.len() != boundary_edges.len() {
            return Err(Error::UnsupportedDomain("boundary has multiple cycles".into()));
        }
        // orient counter-clockwise
        let area: f64 = (0..cycle.len())
            .map(|e| {
                let p = faces[cycle[e] as usize].pos(mesh);
                let q = faces[cycle[(e + 1) % cycle.len()] as usize].pos(mesh);
                p.re * q.im - q.re * p.im
            })
            .sum();
        if area < 0.0 {
            cycle.reverse();
            cycle_edges.reverse();
            cycle_edges.rotate_left(1);
        }
        #[cfg(debug_assertions)]
        for e in 0..cycle.len() {
            let a = cycle[e] as usize;
            let b = cycle[(e + 1) % cycle.len()];
            debug_assert!(
                adjacency[a].iter().any(|&(ni, eid)| ni == b && eid == cycle_edges[e]),
                "boundary cycle misaligned at {e}"
            );
        }
        // marked faces: nearest boundary face, exact ties counter-clockwise
        let tol = 1e-9 * mesh;
        let mut marked_faces = Vec::with_capacity(m);
        for &tm in &dd.spec.marked {
            let p = dd.spec.boundary_point(tm);
            let mut best: Option<(f64, f64, u32)> = None;
            for &fi in &cycle {
                let c = faces[fi as usize].pos(mesh);
                let d = (c - p).norm();
                let t = dd.spec.nearest_boundary(c).0;
                let ccw = (t - tm).rem_euclid(1.0);
                let better = match best {
                    None => true,
                    Some((bd, bc, _)) => d < bd - tol || (d <= bd + tol && ccw < bc),
                };
                if better {
                    best = Some((d, ccw, fi));
                }
            }
            marked_faces.push(best.unwrap().2);
        }
        if marked_faces.iter().collect::<std::collections::HashSet<_>>().len() != m {
            return Err(Error::MeshTooCoarse { arc: 0, sites: 0 });
        }
        // rotate the cycle to start at marked face 0 and label edges by arc
        let p0 = cycle.iter().position(|&f| f == marked_faces[0]).unwrap();
        cycle.rotate_left(p0);
        cycle_edges.rotate_left(p0);
        let mut pos = vec![0usize; m];
        for (a, &mf) in marked_faces.iter().enumerate() {
            pos[a] = cycle.iter().position(|&f| f == mf).unwrap();
        }
        for a in 1..m {
            if pos[a] <= pos[a - 1] {
                return Err(Error::MeshTooCoarse { arc: a, sites: 0 });
            }
        }
        let mut edge_arc = vec![m - 1; cycle.len()];
        for e in 0..cycle.len() {
            for a in (0..m).rev() {
                if e >= pos[a] {
                    edge_arc[e] = a;
                    break;
                }
            }
        }
        let mut boundary_sites_of_edge: HashMap<u32, (SiteCoord, SiteCoord)> = HashMap::new();
        for (s, t) in &boundary_edges {
            boundary_sites_of_edge.insert(edge_index[&edge_key(*s, *t)], (*s, *t));
        }
        let mut edge_sites: Vec<(Option<u32>, Option<u32>)> =
            vec![(None, None); edge_index.len()];
        for (&(p, q), &eid) in &edge_index {
            edge_sites[eid as usize] =
                (dd.site_id(SiteCoord::new(p.0, p.1)), dd.site_id(SiteCoord::new(q.0, q.1)));
        }
        let mut arc_edges_of_site: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); m]; n];
        for (e, &eid) in cycle_edges.iter().enumerate() {
            let inside = dd.site_id(boundary_sites_of_edge[&eid].0).unwrap();
            arc_edges_of_site[inside as usize][edge_arc[e]].push(eid);
        }
        let mut arc_faces: Vec<Vec<u32>> = vec![Vec::new(); m];
        for a in 0..m {
            let mut set = std::collections::HashSet::new();
            for e in 0..cycle.len() {
                if edge_arc[e] == a {
                    set.insert(cycle[e]);
                    set.insert(cycle[(e + 1) % cycle.len()]);
                }
            }
            let mut v: Vec<u32> = set.into_iter().collect();
            v.sort();
            arc_faces[a] = v;
        }
        Ok(FaceGraph {
            faces,
            face_index,
            adjacency,
            edge_index,
            cycle,
            cycle_edges,
            edge_arc,
            marked_faces,
            arc_edges_of_site,
            arc_faces,
            boundary_sites_of_edge,
            edge_sites,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(side: f64) -> DomainSpec {
        DomainSpec::new(
            DomainKind::EquilateralTriangle { side },
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
        )
        .unwrap()
    }

    #[test]
    fn triangle_coarse_sanity() {
        let dd = discretize(&tri(1.0), 0.5).unwrap();
        assert!(dd.n_sites() >= 3);
        for a in 0..3 {
            assert!(!dd.arc_sites(a).unwrap().is_empty());
        }
    }

    #[test]
    fn half_annulus_site_count_matches_area() {
        let spec = DomainSpec::new(
            DomainKind::HalfAnnulus { inner: 0.5, outer: 1.0 },
            vec![0.0, 0.25, 0.5, 0.75],
        )
        .unwrap();
        let mesh = 1.0 / 64.0;
        let dd = discretize(&spec, mesh).unwrap();
        // density: one site per (sqrt(3)/2) * delta^2
        let expected = spec.area() / (SQRT3 / 2.0 * mesh * mesh);
        let n = dd.n_sites() as f64;
        assert!((n - expected).abs() < 0.10 * expected, "n={n} expected={expected}");
    }

    #[test]
    fn rectangle_marked_corners_distinct() {
        let spec = DomainSpec::new(
            DomainKind::Rectangle { aspect: 1.0 },
            vec![0.0, 0.25, 0.5, 0.75],
        )
        .unwrap();
        let dd = discretize(&spec, 0.125).unwrap();
        let mut seen = std::collections::HashSet::new();
        for (a, &s) in dd.marked_sites.iter().enumerate() {
            assert!(seen.insert(s));
            assert_eq!(dd.arc_of_site[s as usize], a);
        }
    }

    #[test]
    fn face_adjacency_symmetric_and_interior_degree() {
        let dd = discretize(&tri(1.0), 1.0 / 16.0).unwrap();
        let mut interior3 = 0;
        for &v in &dd.dual_vertices {
            let adj = dd.face_adjacency(v).unwrap();
            assert!(adj.len() <= 3);
            if adj.len() == 3 {
                interior3 += 1;
                let corners = v.corners();
                for (_, (a, b)) in &adj {
                    assert!(corners.contains(a) && corners.contains(b));
                }
            }
            for (w, _) in adj {
                let back = dd.face_adjacency(w).unwrap();
                assert!(back.iter().any(|(u, _)| *u == v));
            }
        }
        assert!(interior3 > 0);
    }

    #[test]
    fn unknown_vertex_rejected() {
        let dd = discretize(&tri(1.0), 0.25).unwrap();
        assert!(matches!(
            dd.face_adjacency(DualVertex::up(1000, 1000)),
            Err(Error::UnknownVertex(_))
        ));
    }

    #[test]
    fn discretize_deterministic() {
        let a = discretize(&tri(1.0), 1.0 / 32.0).unwrap();
        let b = discretize(&tri(1.0), 1.0 / 32.0).unwrap();
        assert_eq!(a.sites, b.sites);
        assert_eq!(a.dual_vertices, b.dual_vertices);
        assert_eq!(a.marked_sites, b.marked_sites);
        assert_eq!(a.arc_of_site, b.arc_of_site);
    }

    #[test]
    fn halving_mesh_quadruples_sites() {
        let specs = [
            tri(1.0),
            DomainSpec::new(DomainKind::Rectangle { aspect: 2.0 }, vec![0.0, 1.0 / 3.0, 0.5, 5.0 / 6.0])
                .unwrap(),
            DomainSpec::new(DomainKind::HalfDisk { radius: 1.0 }, vec![0.1, 0.3, 0.7]).unwrap(),
            DomainSpec::new(
                DomainKind::HalfAnnulus { inner: 0.5, outer: 1.0 },
                vec![0.0, 0.25, 0.5, 0.75],
            )
            .unwrap(),
            DomainSpec::new(DomainKind::Sector { angle: std::f64::consts::PI / 2.0 }, vec![0.05, 0.4, 0.8])
                .unwrap(),
            DomainSpec::new(DomainKind::Disk { radius: 1.0 }, vec![0.0, 0.25, 0.5, 0.75]).unwrap(),
        ];
        for spec in &specs {
            let coarse = discretize(spec, 1.0 / 64.0).unwrap().n_sites() as f64;
            let fine = discretize(spec, 1.0 / 128.0).unwrap().n_sites() as f64;
            let ratio = fine / coarse;
            assert!((3.6..=4.4).contains(&ratio), "{spec:?}: ratio {ratio}");
        }
    }

    #[test]
    fn invalid_marked_points_rejected() {
        assert!(DomainSpec::new(
            DomainKind::Rectangle { aspect: 1.0 },
            vec![0.0, 0.5, 0.25, 0.75]
        )
        .is_err());
        assert!(DomainSpec::new(DomainKind::Rectangle { aspect: 1.0 }, vec![0.0, 0.5, 0.5, 0.75])
            .is_err());
        assert!(DomainSpec::new(DomainKind::Rectangle { aspect: 1.0 }, vec![0.0, 0.5]).is_err());
    }

    #[test]
    fn arcs_are_contiguous_runs() {
        let spec = DomainSpec::new(
            DomainKind::Rectangle { aspect: 2.0 },
            vec![0.0, 1.0 / 3.0, 0.5, 5.0 / 6.0],
        )
        .unwrap();
        let dd = discretize(&spec, 1.0 / 16.0).unwrap();
        // walk boundary sites ordered by boundary parameter: labels must switch
        // exactly 4 times around the cycle
        let mut bs: Vec<(f64, usize)> = dd
            .sites
            .iter()
            .enumerate()
            .filter(|(k, _)| dd.is_boundary[*k])
            .map(|(k, s)| (dd.spec.nearest_boundary(s.pos(dd.mesh)).0, dd.arc_of_site[k]))
            .collect();
        bs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let switches = (0..bs.len())
            .filter(|&k| bs[k].1 != bs[(k + 1) % bs.len()].1)
            .count();
        assert_eq!(switches, 4);
    }
}
