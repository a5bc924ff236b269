//! Scratch probe: separating events on the extended face graph with the
//! hexagon-covering passage rule (a step between adjacent faces across a
//! lattice edge is passable iff some endpoint hexagon is a domain site not
//! on the separating path), plus an exhaustive color-switching scan.

use perclab::geometry::{discretize, DiscreteDomain, DomainKind, DomainSpec, DualVertex, SiteCoord};
use std::collections::{HashMap, HashSet};

type EdgeKey = ((i32, i32), (i32, i32));

fn edge_key(a: SiteCoord, b: SiteCoord) -> EdgeKey {
    let (p, q) = ((a.i, a.j), (b.i, b.j));
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

fn common_neighbors(a: SiteCoord, b: SiteCoord) -> Vec<SiteCoord> {
    let bn: HashSet<(i32, i32)> = b.neighbors().iter().map(|n| (n.i, n.j)).collect();
    a.neighbors().iter().filter(|n| bn.contains(&(n.i, n.j))).cloned().collect()
}

fn tri_of_corners(mut c: [SiteCoord; 3]) -> DualVertex {
    c.sort_by_key(|s| (s.j, s.i));
    // up triangle: two corners on the lower row; down: one
    if c[0].j == c[1].j {
        DualVertex::up(c[0].i, c[0].j)
    } else {
        DualVertex::down(c[0].i - 1, c[0].j)
    }
}

struct HexGraph {
    dd: DiscreteDomain,
    tris: Vec<DualVertex>,
    tidx: HashMap<DualVertex, usize>,
    // (neighbor face, edge id) for every shared lattice edge with >=1 endpoint in S
    adj: Vec<Vec<(usize, usize)>>,
    // endpoint site ids in S for each edge id (None = outside)
    edge_ends: Vec<[Option<usize>; 2]>,
    cyc: Vec<usize>,
    cyc_edge: Vec<usize>,
    edge_arc: Vec<usize>,
    marked_vtx: [usize; 3],
    touch: Vec<[Vec<usize>; 3]>,
    // faces flanking the boundary edges of each arc
    arc_faces: [Vec<usize>; 3],
    bedge_sites: HashMap<usize, (SiteCoord, SiteCoord)>,
}

fn build(dd: DiscreteDomain) -> HexGraph {
    let n = dd.sites.len();
    let mesh = dd.mesh;
    let mut edge_ids: HashMap<EdgeKey, usize> = HashMap::new();
    let mut edge_keys: Vec<EdgeKey> = Vec::new();
    let mut boundary_edges: Vec<(SiteCoord, SiteCoord)> = Vec::new(); // (in, out)
    for s in &dd.sites {
        for t in s.neighbors() {
            let k = edge_key(*s, t);
            if !edge_ids.contains_key(&k) {
                edge_ids.insert(k, edge_keys.len());
                edge_keys.push(k);
            }
            if dd.site_id(t).is_none()
                && !boundary_edges.iter().any(|(a, b)| edge_key(*a, *b) == k)
            {
                boundary_edges.push((*s, t));
            }
        }
    }
    let edge_ends: Vec<[Option<usize>; 2]> = edge_keys
        .iter()
        .map(|&((ai, aj), (bi, bj))| {
            [
                dd.site_id(SiteCoord::new(ai, aj)).map(|x| x as usize),
                dd.site_id(SiteCoord::new(bi, bj)).map(|x| x as usize),
            ]
        })
        .collect();
    let mut tris: Vec<DualVertex> = Vec::new();
    let mut tidx: HashMap<DualVertex, usize> = HashMap::new();
    for s in &dd.sites {
        for f in perclab::geometry::incident_faces(*s) {
            if !tidx.contains_key(&f) {
                tidx.insert(f, tris.len());
                tris.push(f);
            }
        }
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); tris.len()];
    for (ti, t) in tris.iter().enumerate() {
        for (nb, (a, b)) in t.adjacent_faces() {
            if let Some(&ni) = tidx.get(&nb) {
                if let Some(&eid) = edge_ids.get(&edge_key(a, b)) {
                    adj[ti].push((ni, eid));
                }
            }
        }
    }
    // boundary cycle over boundary triangles
    let mut bedges_of_tri: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (s, t) in &boundary_edges {
        let eid = edge_ids[&edge_key(*s, *t)];
        let cn = common_neighbors(*s, *t);
        assert_eq!(cn.len(), 2);
        let t1 = tidx[&tri_of_corners([*s, *t, cn[0]])];
        let t2 = tidx[&tri_of_corners([*s, *t, cn[1]])];
        bedges_of_tri.entry(t1).or_default().push((eid, t2));
        bedges_of_tri.entry(t2).or_default().push((eid, t1));
    }
    for (_, v) in &bedges_of_tri {
        assert_eq!(v.len(), 2, "boundary vertex without exactly 2 boundary edges");
    }
    let start = *bedges_of_tri.keys().min().unwrap();
    let mut cyc = vec![start];
    let mut cyc_edge = Vec::new();
    let (mut prev_e, mut cur) = bedges_of_tri[&start][0];
    cyc_edge.push(prev_e);
    while cur != start {
        cyc.push(cur);
        let &(e2, t2) = bedges_of_tri[&cur].iter().find(|(e, _)| *e != prev_e).unwrap();
        cyc_edge.push(e2);
        prev_e = e2;
        cur = t2;
    }
    assert_eq!(cyc.len(), boundary_edges.len());
    let area: f64 = (0..cyc.len())
        .map(|e| {
            let p = tris[cyc[e]].pos(mesh);
            let q = tris[cyc[(e + 1) % cyc.len()]].pos(mesh);
            p.re * q.im - q.re * p.im
        })
        .sum();
    if area < 0.0 {
        cyc.reverse();
        cyc_edge.reverse();
        cyc_edge.rotate_left(1);
        let last = cyc.pop().unwrap();
        cyc.insert(0, last);
        cyc_edge.rotate_right(1);
    }
    for e in 0..cyc.len() {
        let a = cyc[e];
        let b = cyc[(e + 1) % cyc.len()];
        assert!(
            adj[a].iter().any(|&(ni, eid)| ni == b && eid == cyc_edge[e]),
            "cycle edge misaligned at {e}"
        );
    }
    let tol = 1e-9 * mesh;
    let mut marked_vtx = [usize::MAX; 3];
    for a in 0..3 {
        let tm = dd.spec.marked[a];
        let p = dd.spec.boundary_point(tm);
        let mut best: Option<(f64, f64, usize)> = None;
        for &ti in &cyc {
            let c = tris[ti].pos(mesh);
            let d = (c - p).norm();
            let t = dd.spec.nearest_boundary(c).0;
            let ccw = (t - tm).rem_euclid(1.0);
            let better = match best {
                None => true,
                Some((bd, bc, _)) => d < bd - tol || (d <= bd + tol && ccw < bc),
            };
            if better {
                best = Some((d, ccw, ti));
            }
        }
        marked_vtx[a] = best.unwrap().2;
    }
    let p0 = cyc.iter().position(|&t| t == marked_vtx[0]).unwrap();
    cyc.rotate_left(p0);
    cyc_edge.rotate_left(p0);
    let p1 = cyc.iter().position(|&t| t == marked_vtx[1]).unwrap();
    let p2 = cyc.iter().position(|&t| t == marked_vtx[2]).unwrap();
    assert!(0 < p1 && p1 < p2, "marked vertices not in CCW order: 0 {p1} {p2}");
    let mut edge_arc = vec![0usize; cyc.len()];
    for e in 0..cyc.len() {
        edge_arc[e] = if e < p1 {
            0
        } else if e < p2 {
            1
        } else {
            2
        };
    }
    let mut touch: Vec<[Vec<usize>; 3]> = vec![Default::default(); n];
    for (s, t) in &boundary_edges {
        let eid = edge_ids[&edge_key(*s, *t)];
        let e = cyc_edge.iter().position(|&x| x == eid).unwrap();
        touch[dd.site_id(*s).unwrap() as usize][edge_arc[e]].push(eid);
    }
    let mut arc_faces: [Vec<usize>; 3] = Default::default();
    for a in 0..3 {
        let mut set = HashSet::new();
        for e in 0..cyc.len() {
            if edge_arc[e] == a {
                set.insert(cyc[e]);
                set.insert(cyc[(e + 1) % cyc.len()]);
            }
        }
        let mut v: Vec<usize> = set.into_iter().collect();
        v.sort();
        arc_faces[a] = v;
    }
    let mut bedge_sites = HashMap::new();
    for (s, t) in &boundary_edges {
        bedge_sites.insert(edge_ids[&edge_key(*s, *t)], (*s, *t));
    }
    HexGraph {
        dd,
        tris,
        tidx,
        adj,
        edge_ends,
        cyc,
        cyc_edge,
        edge_arc,
        marked_vtx,
        touch,
        arc_faces,
        bedge_sites,
    }
}

impl HexGraph {
    /// Flood from the target-arc faces; a step across a lattice edge is
    /// passable iff some endpoint is a domain site not in `in_path`.
    /// Returns the reached mask.
    fn flood(&self, in_path: &[bool], targets: &[usize]) -> Vec<bool> {
        let mut reached = vec![false; self.tris.len()];
        let mut queue: Vec<usize> = Vec::new();
        for &t in targets {
            if !reached[t] {
                reached[t] = true;
                queue.push(t);
            }
        }
        while let Some(t) = queue.pop() {
            for &(nb, eid) in &self.adj[t] {
                if reached[nb] {
                    continue;
                }
                let passable = self.edge_ends[eid]
                    .iter()
                    .any(|end| matches!(end, Some(s) if !in_path[*s]));
                if passable {
                    reached[nb] = true;
                    queue.push(nb);
                }
            }
        }
        reached
    }

    /// Oracle: union over all simple open paths from arc (k+2)%3 to arc k of
    /// the face sets they separate from arc (k+1)%3.
    fn oracle(&self, open: &[bool], k: usize) -> Vec<bool> {
        let arc_a = (k + 2) % 3;
        let arc_b = k;
        let arc_t = (k + 1) % 3;
        let n = self.dd.sites.len();
        let site_adj: Vec<Vec<usize>> = (0..n)
            .map(|s| {
                self.dd.sites[s]
                    .neighbors()
                    .iter()
                    .filter_map(|t| self.dd.site_id(*t))
                    .map(|x| x as usize)
                    .collect()
            })
            .collect();
        let mut sep = vec![false; self.tris.len()];
        let mut in_path = vec![false; n];
        let mut path: Vec<usize> = Vec::new();
        #[allow(clippy::too_many_arguments)]
        fn dfs(
            g: &HexGraph,
            path: &mut Vec<usize>,
            in_path: &mut Vec<bool>,
            site_adj: &[Vec<usize>],
            open: &[bool],
            arc_b: usize,
            arc_t: usize,
            sep: &mut [bool],
        ) {
            let last = *path.last().unwrap();
            if !g.touch[last][arc_b].is_empty() {
                let reached = g.flood(in_path, &g.arc_faces[arc_t]);
                for (i, r) in reached.iter().enumerate() {
                    if !r {
                        sep[i] = true;
                    }
                }
            }
            for &nb in &site_adj[last] {
                if open[nb] && !in_path[nb] {
                    in_path[nb] = true;
                    path.push(nb);
                    dfs(g, path, in_path, site_adj, open, arc_b, arc_t, sep);
                    path.pop();
                    in_path[nb] = false;
                }
            }
        }
        for start in 0..n {
            if !open[start] || self.touch[start][arc_a].is_empty() {
                continue;
            }
            in_path[start] = true;
            path.push(start);
            dfs(self, &mut path, &mut in_path, &site_adj, open, arc_b, arc_t, &mut sep);
            path.pop();
            in_path[start] = false;
        }
        sep
    }

    /// One separated-set bitmask per complete simple path (for the
    /// union-attainment question).
    #[allow(dead_code)]
    fn per_path_sets(&self, open: &[bool], k: usize) -> Vec<u64> {
        assert!(self.tris.len() <= 64);
        let arc_a = (k + 2) % 3;
        let arc_b = k;
        let arc_t = (k + 1) % 3;
        let n = self.dd.sites.len();
        let site_adj: Vec<Vec<usize>> = (0..n)
            .map(|s| {
                self.dd.sites[s]
                    .neighbors()
                    .iter()
                    .filter_map(|t| self.dd.site_id(*t))
                    .map(|x| x as usize)
                    .collect()
            })
            .collect();
        let mut out: Vec<u64> = Vec::new();
        let mut in_path = vec![false; n];
        let mut path: Vec<usize> = Vec::new();
        #[allow(clippy::too_many_arguments)]
        fn dfs(
            g: &HexGraph,
            path: &mut Vec<usize>,
            in_path: &mut Vec<bool>,
            site_adj: &[Vec<usize>],
            open: &[bool],
            arc_b: usize,
            arc_t: usize,
            out: &mut Vec<u64>,
        ) {
            let last = *path.last().unwrap();
            if !g.touch[last][arc_b].is_empty() {
                let reached = g.flood(in_path, &g.arc_faces[arc_t]);
                let mut bits = 0u64;
                for (i, r) in reached.iter().enumerate() {
                    if !r {
                        bits |= 1 << i;
                    }
                }
                out.push(bits);
            }
            for &nb in &site_adj[last] {
                if open[nb] && !in_path[nb] {
                    in_path[nb] = true;
                    path.push(nb);
                    dfs(g, path, in_path, site_adj, open, arc_b, arc_t, out);
                    path.pop();
                    in_path[nb] = false;
                }
            }
        }
        for start in 0..n {
            if !open[start] || self.touch[start][arc_a].is_empty() {
                continue;
            }
            in_path[start] = true;
            path.push(start);
            dfs(self, &mut path, &mut in_path, &site_adj, open, arc_b, arc_t, &mut out);
            path.pop();
            in_path[start] = false;
        }
        out
    }

    /// Extremal simple open path from arc (k+2)%3 to arc k, hugging one side
    /// (chir = +1 tries counter-clockwise-most turns first, -1 clockwise).
    fn extremal_path(&self, open: &[bool], k: usize, chir: i32) -> Option<Vec<usize>> {
        const DIRS: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
        let arc_a = (k + 2) % 3;
        let arc_b = k;
        let n = self.dd.sites.len();
        let ma = self.cyc.iter().position(|&t| t == self.marked_vtx[arc_a]).unwrap();
        let len = self.cyc.len();
        let mut starts: Vec<(usize, usize)> = Vec::new();
        let mut seen_start = vec![false; n];
        for off in 0..len {
            let e = (ma + off) % len;
            if self.edge_arc[e] != arc_a {
                continue;
            }
            let eid = self.cyc_edge[e];
            let (s, t) = self.bedge_sites[&eid];
            let si = self.dd.site_id(s).unwrap() as usize;
            if seen_start[si] {
                continue;
            }
            seen_start[si] = true;
            let d = DIRS
                .iter()
                .position(|&(di, dj)| (t.i + di, t.j + dj) == (s.i, s.j))
                .unwrap();
            starts.push((si, d));
        }
        let mut visited = vec![false; n];
        for &(start, d0) in &starts {
            if !open[start] || visited[start] {
                continue;
            }
            visited[start] = true;
            if !self.touch[start][arc_b].is_empty() {
                return Some(vec![start]);
            }
            let mut stack: Vec<(usize, usize, i32)> = vec![(start, d0, 1)];
            while let Some(&mut (cur, adir, ref mut off)) = stack.last_mut() {
                if *off > 5 {
                    stack.pop();
                    continue;
                }
                let back = (adir + 3) % 6;
                let d = ((back as i32 + chir * *off).rem_euclid(6)) as usize;
                *off += 1;
                let (di, dj) = DIRS[d];
                let s = self.dd.sites[cur];
                let nb = SiteCoord::new(s.i + di, s.j + dj);
                if let Some(ni) = self.dd.site_id(nb) {
                    let ni = ni as usize;
                    if open[ni] && !visited[ni] {
                        visited[ni] = true;
                        if !self.touch[ni][arc_b].is_empty() {
                            let mut path: Vec<usize> = stack.iter().map(|x| x.0).collect();
                            path.push(ni);
                            return Some(path);
                        }
                        stack.push((ni, d, 1));
                    }
                }
            }
        }
        None
    }

    fn extremal_field(&self, open: &[bool], k: usize, chir: i32) -> Vec<bool> {
        let n = self.dd.sites.len();
        match self.extremal_path(open, k, chir) {
            None => vec![false; self.tris.len()],
            Some(path) => {
                let mut in_path = vec![false; n];
                for &s in &path {
                    in_path[s] = true;
                }
                let reached = self.flood(&in_path, &self.arc_faces[(k + 1) % 3]);
                reached.iter().map(|r| !r).collect()
            }
        }
    }
}

fn check_domain(name: &str, spec: DomainSpec, mesh: f64, check_identity: bool) {
    let dd = match discretize(&spec, mesh) {
        Ok(dd) => dd,
        Err(e) => {
            println!("== {name}: skipped ({e:?})");
            return;
        }
    };
    let n = dd.sites.len();
    let g = build(dd);
    let nd = g.dd.dual_vertices.len();
    println!(
        "== {name}: sites {n}, tris {}, duals {nd}, arc edges {:?}",
        g.tris.len(),
        (0..3).map(|a| g.edge_arc.iter().filter(|&&x| x == a).count()).collect::<Vec<_>>()
    );
    // all-open sanity: separated faces vs arc incidence
    {
        let open = vec![true; n];
        for k in 0..3 {
            let sep = g.oracle(&open, k);
            let nsep = sep.iter().filter(|&&b| b).count();
            let nsep_dual =
                g.dd.dual_vertices.iter().filter(|z| sep[g.tidx[z]]).count();
            println!("  all-open k={k}: separated {nsep}/{} faces, {nsep_dual}/{nd} duals", g.tris.len());
        }
    }
    let mut cnt = vec![[[0u64; 3]; 3]; nd];
    let mut dnt = vec![[[0u64; 3]; 3]; nd];
    let mut mism = [0usize; 2];
    let mut total = 0usize;
    let mut ones = 0u64;
    for cfg in 0u64..(1u64 << n) {
        let open: Vec<bool> = (0..n).map(|s| cfg >> s & 1 == 1).collect();
        for k in 0..3 {
            let sep = g.oracle(&open, k);
            ones += sep.iter().filter(|&&b| b).count() as u64;
            for (ci, &chir) in [1i32, -1i32].iter().enumerate() {
                let fast = g.extremal_field(&open, k, chir);
                for z in &g.dd.dual_vertices {
                    let zt = g.tidx[z];
                    if ci == 0 {
                        total += 1;
                    }
                    if sep[zt] != fast[zt] {
                        mism[ci] += 1;
                        if mism[ci] <= 3 {
                            println!(
                                "  chir {chir} mismatch cfg={cfg:b} k={k} z={z:?}: oracle {} fast {}",
                                sep[zt], fast[zt]
                            );
                        }
                    }
                }
            }
            if check_identity {
                for (zi, z) in g.dd.dual_vertices.iter().enumerate() {
                    let zt = g.tidx[z];
                    for d in 0..3 {
                        let (nb, _) = z.adjacent_faces()[d];
                        let nt = g.tidx[&nb];
                        if sep[nt] && !sep[zt] {
                            cnt[zi][k][d] += 1;
                        }
                        if sep[zt] && !sep[nt] {
                            dnt[zi][k][d] += 1;
                        }
                    }
                }
            }
        }
    }
    println!("  total separated oracle bits over all cfgs: {ones}");
    println!("  oracle vs extremal-path mismatches: ccw {} cw {} of {total}", mism[0], mism[1]);
    if check_identity {
        for shift in [1usize, 2] {
            for swap in [false, true] {
                let mut nbad = 0usize;
                let mut max_diff = 0i64;
                for zi in 0..nd {
                    for k in 0..3 {
                        for d in 0..3 {
                            let x = cnt[zi][k][d] as i64;
                            let other = if swap { &dnt } else { &cnt };
                            let y = other[zi][(k + 1) % 3][(d + shift) % 3] as i64;
                            if x != y {
                                nbad += 1;
                                max_diff = max_diff.max((x - y).abs());
                            }
                        }
                    }
                }
                println!(
                    "  pairing shift {shift} swap {swap}: mismatched {nbad}/{}, max |diff| = {max_diff}",
                    nd * 9
                );
            }
        }
    }
}

fn main() {
    check_domain(
        "sym triangle mesh 1",
        DomainSpec::new(
            DomainKind::EquilateralTriangle { side: 1.0 },
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
        )
        .unwrap(),
        1.0,
        true,
    );
    check_domain(
        "asym triangle mesh 0.6",
        DomainSpec::new(
            DomainKind::EquilateralTriangle { side: 1.0 },
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
        )
        .unwrap(),
        0.6,
        true,
    );
    check_domain(
        "asym marks mesh 1",
        DomainSpec::new(
            DomainKind::EquilateralTriangle { side: 1.0 },
            vec![0.05, 0.40, 2.0 / 3.0],
        )
        .unwrap(),
        1.0,
        true,
    );
    check_domain(
        "square 3 marks mesh 0.55",
        DomainSpec::new(DomainKind::Rectangle { aspect: 1.0 }, vec![0.1, 0.45, 0.8]).unwrap(),
        0.55,
        true,
    );
}
