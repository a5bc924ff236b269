#![allow(dead_code)]
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

pub struct HexGraph {
    pub dd: DiscreteDomain,
    pub tris: Vec<DualVertex>,
    pub tidx: HashMap<DualVertex, usize>,
    // (neighbor face, edge id) for every shared lattice edge with >=1 endpoint in S
    pub adj: Vec<Vec<(usize, usize)>>,
    // endpoint site ids in S for each edge id (None = outside)
    pub edge_ends: Vec<[Option<usize>; 2]>,
    pub cyc: Vec<usize>,
    pub cyc_edge: Vec<usize>,
    pub edge_arc: Vec<usize>,
    pub marked_vtx: [usize; 3],
    pub touch: Vec<[Vec<usize>; 3]>,
    // faces flanking the boundary edges of each arc
    pub arc_faces: [Vec<usize>; 3],
    pub bedge_sites: HashMap<usize, (SiteCoord, SiteCoord)>,
}

pub fn build(dd: DiscreteDomain) -> HexGraph {
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
    pub fn flood(&self, in_path: &[bool], targets: &[usize]) -> Vec<bool> {
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
    pub fn oracle(&self, open: &[bool], k: usize) -> Vec<bool> {
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
                    // a face whose three corner hexagons all lie on the path
                    // is a degenerate pinch point, not a separated face
                    let pinch = g.tris[i].corners().iter().all(|c| {
                        matches!(g.dd.site_id(*c), Some(s) if in_path[s as usize])
                    });
                    if !r && !pinch {
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
    pub fn per_path_sets(&self, open: &[bool], k: usize) -> Vec<u64> {
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
    pub fn extremal_path(&self, open: &[bool], k: usize, chir: i32) -> Option<Vec<usize>> {
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

    pub fn extremal_field(&self, open: &[bool], k: usize, chir: i32) -> Vec<bool> {
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


impl HexGraph {
    /// Candidate production semantics: for each open cluster joining arc
    /// (k+2)%3 to arc k, flood the faces from the open target arc (k+1)%3
    /// (marked corner faces excluded when open_targets) with steps passable
    /// iff some endpoint hexagon is a domain site outside the cluster; a face
    /// is separated iff some crossing cluster leaves it unreached.
    pub fn oracle2(
        &self,
        open: &[bool],
        k: usize,
        per_cluster: bool,
        open_targets: bool,
    ) -> Vec<bool> {
        let arc_a = (k + 2) % 3;
        let arc_b = k;
        let arc_t = (k + 1) % 3;
        let n = self.dd.sites.len();
        // open clusters
        let mut label = vec![usize::MAX; n];
        let mut nlab = 0usize;
        for s in 0..n {
            if !open[s] || label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = nlab;
            while let Some(u) = stack.pop() {
                for t in self.dd.sites[u].neighbors() {
                    if let Some(ti) = self.dd.site_id(t) {
                        let ti = ti as usize;
                        if open[ti] && label[ti] == usize::MAX {
                            label[ti] = nlab;
                            stack.push(ti);
                        }
                    }
                }
            }
            nlab += 1;
        }
        let mut touches_a = vec![false; nlab];
        let mut touches_b = vec![false; nlab];
        for s in 0..n {
            if label[s] != usize::MAX {
                if !self.touch[s][arc_a].is_empty() {
                    touches_a[label[s]] = true;
                }
                if !self.touch[s][arc_b].is_empty() {
                    touches_b[label[s]] = true;
                }
            }
        }
        let crossing: Vec<usize> =
            (0..nlab).filter(|&c| touches_a[c] && touches_b[c]).collect();
        let mut sep = vec![false; self.tris.len()];
        if crossing.is_empty() {
            return sep;
        }
        let targets: Vec<usize> = if open_targets {
            self.arc_faces[arc_t]
                .iter()
                .cloned()
                .filter(|t| !self.marked_vtx.contains(t))
                .collect()
        } else {
            self.arc_faces[arc_t].clone()
        };
        let groups: Vec<Vec<usize>> = if per_cluster {
            crossing.iter().map(|&c| vec![c]).collect()
        } else {
            vec![crossing.clone()]
        };
        for grp in groups {
            let in_block: Vec<bool> = (0..n)
                .map(|s| label[s] != usize::MAX && grp.contains(&label[s]))
                .collect();
            let reached = self.flood(&in_block, &targets);
            for (i, r) in reached.iter().enumerate() {
                if !r {
                    sep[i] = true;
                }
            }
        }
        if std::env::var("NM").map(|v| v == "1").unwrap_or(false) {
            for &m in &self.marked_vtx {
                sep[m] = false;
            }
        }
        sep
    }
}

impl HexGraph {
    /// Spec detector semantics: flood faces from every face incident to the
    /// target arc; an edge may not be crossed iff both endpoints belong to an
    /// open cluster joining the two path arcs. Returns sep over all faces.
    pub fn oracle3(&self, open: &[bool], k: usize) -> Vec<bool> {
        let arc_a = (k + 2) % 3;
        let arc_b = k;
        let arc_t = (k + 1) % 3;
        let n = self.dd.sites.len();
        let mut label = vec![usize::MAX; n];
        let mut nlab = 0usize;
        for s in 0..n {
            if !open[s] || label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = nlab;
            while let Some(u) = stack.pop() {
                for t in self.dd.sites[u].neighbors() {
                    if let Some(ti) = self.dd.site_id(t) {
                        let ti = ti as usize;
                        if open[ti] && label[ti] == usize::MAX {
                            label[ti] = nlab;
                            stack.push(ti);
                        }
                    }
                }
            }
            nlab += 1;
        }
        let mut ta = vec![false; nlab];
        let mut tb = vec![false; nlab];
        for s in 0..n {
            if label[s] != usize::MAX {
                if !self.touch[s][arc_a].is_empty() {
                    ta[label[s]] = true;
                }
                if !self.touch[s][arc_b].is_empty() {
                    tb[label[s]] = true;
                }
            }
        }
        let in_block: Vec<bool> = (0..n)
            .map(|s| label[s] != usize::MAX && ta[label[s]] && tb[label[s]])
            .collect();
        let mut reached = vec![false; self.tris.len()];
        let mut stack: Vec<usize> = Vec::new();
        for &t in &self.arc_faces[arc_t] {
            if !reached[t] {
                reached[t] = true;
                stack.push(t);
            }
        }
        while let Some(t) = stack.pop() {
            for &(nb, eid) in &self.adj[t] {
                if reached[nb] {
                    continue;
                }
                let blocked = self.edge_ends[eid]
                    .iter()
                    .all(|end| matches!(end, Some(s) if in_block[*s]));
                if !blocked {
                    reached[nb] = true;
                    stack.push(nb);
                }
            }
        }
        reached.iter().map(|r| !r).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SepOpts {
    /// 0 = union of crossing clusters, 1 = each crossing cluster separately,
    /// 2 = union over all simple open arc-to-arc paths
    pub block: u8,
    /// clusters count as crossing when touching via marked-face corner sites too
    pub liberal_touch: bool,
    /// exclude marked faces from the flood seeds
    pub open_seeds: bool,
    /// true = edge blocked iff both endpoints in block set;
    /// false = edge passable iff some endpoint is a domain site outside block set
    pub edge_both: bool,
    /// force marked faces unseparated
    pub no_marked: bool,
}

impl HexGraph {
    fn flood_opts(&self, in_block: &[bool], targets: &[usize], edge_both: bool) -> Vec<bool> {
        let mut reached = vec![false; self.tris.len()];
        let mut stack: Vec<usize> = Vec::new();
        for &t in targets {
            if !reached[t] {
                reached[t] = true;
                stack.push(t);
            }
        }
        while let Some(t) = stack.pop() {
            for &(nb, eid) in &self.adj[t] {
                if reached[nb] {
                    continue;
                }
                let passable = if edge_both {
                    !self
                        .edge_ends[eid]
                        .iter()
                        .all(|end| matches!(end, Some(s) if in_block[*s]))
                } else {
                    self.edge_ends[eid]
                        .iter()
                        .any(|end| matches!(end, Some(s) if !in_block[*s]))
                };
                if passable {
                    reached[nb] = true;
                    stack.push(nb);
                }
            }
        }
        reached
    }

    pub fn oracle4(&self, open: &[bool], k: usize, o: SepOpts) -> Vec<bool> {
        let arc_a = (k + 2) % 3;
        let arc_b = k;
        let arc_t = (k + 1) % 3;
        let n = self.dd.sites.len();
        let targets: Vec<usize> = if o.open_seeds {
            self.arc_faces[arc_t]
                .iter()
                .cloned()
                .filter(|t| !self.marked_vtx.contains(t))
                .collect()
        } else {
            self.arc_faces[arc_t].clone()
        };
        let mut sep = vec![false; self.tris.len()];
        if o.block == 2 {
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
            let touches = |s: usize, arc: usize| -> bool {
                !self.touch[s][arc].is_empty()
                    || (o.liberal_touch
                        && self.marked_vtx.iter().any(|&m| {
                            let mk = &self.tris[m];
                            mk.corners().iter().any(|c| {
                                self.dd.site_id(*c) == Some(s as u32)
                            }) && self.marked_face_arcs(m).contains(&arc)
                        }))
            };
            let mut in_path = vec![false; n];
            let mut path: Vec<usize> = Vec::new();
            #[allow(clippy::too_many_arguments)]
            fn dfs(
                g: &HexGraph,
                path: &mut Vec<usize>,
                in_path: &mut Vec<bool>,
                site_adj: &[Vec<usize>],
                open: &[bool],
                touches: &dyn Fn(usize, usize) -> bool,
                arc_b: usize,
                targets: &[usize],
                edge_both: bool,
                sep: &mut Vec<bool>,
            ) {
                let last = *path.last().unwrap();
                if touches(last, arc_b) {
                    let reached = g.flood_opts(in_path, targets, edge_both);
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
                        dfs(g, path, in_path, site_adj, open, touches, arc_b, targets, edge_both, sep);
                        path.pop();
                        in_path[nb] = false;
                    }
                }
            }
            for start in 0..n {
                if !open[start] || !touches(start, arc_a) {
                    continue;
                }
                in_path[start] = true;
                path.push(start);
                dfs(
                    &self, &mut path, &mut in_path, &site_adj, open, &touches, arc_b,
                    &targets, o.edge_both, &mut sep,
                );
                path.pop();
                in_path[start] = false;
            }
        } else {
            let mut label = vec![usize::MAX; n];
            let mut nlab = 0usize;
            for s in 0..n {
                if !open[s] || label[s] != usize::MAX {
                    continue;
                }
                let mut stack = vec![s];
                label[s] = nlab;
                while let Some(u) = stack.pop() {
                    for t in self.dd.sites[u].neighbors() {
                        if let Some(ti) = self.dd.site_id(t) {
                            let ti = ti as usize;
                            if open[ti] && label[ti] == usize::MAX {
                                label[ti] = nlab;
                                stack.push(ti);
                            }
                        }
                    }
                }
                nlab += 1;
            }
            let mut ta = vec![false; nlab];
            let mut tb = vec![false; nlab];
            for s in 0..n {
                if label[s] == usize::MAX {
                    continue;
                }
                let mut hits_a = !self.touch[s][arc_a].is_empty();
                let mut hits_b = !self.touch[s][arc_b].is_empty();
                if o.liberal_touch {
                    for &m in &self.marked_vtx {
                        if self.tris[m]
                            .corners()
                            .iter()
                            .any(|c| self.dd.site_id(*c) == Some(s as u32))
                        {
                            let arcs = self.marked_face_arcs(m);
                            hits_a |= arcs.contains(&arc_a);
                            hits_b |= arcs.contains(&arc_b);
                        }
                    }
                }
                if hits_a {
                    ta[label[s]] = true;
                }
                if hits_b {
                    tb[label[s]] = true;
                }
            }
            let crossing: Vec<usize> =
                (0..nlab).filter(|&c| ta[c] && tb[c]).collect();
            let groups: Vec<Vec<usize>> = if o.block == 1 {
                crossing.iter().map(|&c| vec![c]).collect()
            } else {
                vec![crossing]
            };
            for grp in groups {
                if grp.is_empty() {
                    continue;
                }
                let in_block: Vec<bool> = (0..n)
                    .map(|s| label[s] != usize::MAX && grp.contains(&label[s]))
                    .collect();
                let reached = self.flood_opts(&in_block, &targets, o.edge_both);
                for (i, r) in reached.iter().enumerate() {
                    if !r {
                        sep[i] = true;
                    }
                }
            }
        }
        if o.no_marked {
            for &m in &self.marked_vtx {
                sep[m] = false;
            }
        }
        sep
    }

    /// Arcs delimited by a marked face: the arc labels of the boundary edges
    /// on either side of it along the cycle.
    pub fn marked_face_arcs(&self, m: usize) -> Vec<usize> {
        let pos = self.cyc.iter().position(|&f| f == m);
        let Some(pos) = pos else { return vec![] };
        let nb = self.cyc.len();
        vec![self.edge_arc[(pos + nb - 1) % nb], self.edge_arc[pos]]
    }
}

impl HexGraph {
    /// Dual formulation: face z is separated for color k iff no closed site
    /// among z's corners lies in a closed cluster reaching the target arc.
    /// liberal: clusters may reach the arc through a marked-corner hexagon.
    /// require_crossing: additionally demand an open cluster joining the two
    /// path arcs. out_blue: faces with a corner outside the domain are never
    /// separated.
    pub fn oracle5(
        &self,
        open: &[bool],
        k: usize,
        liberal: bool,
        require_crossing: bool,
        out_blue: bool,
    ) -> Vec<bool> {
        let arc_a = (k + 2) % 3;
        let arc_b = k;
        let arc_t = (k + 1) % 3;
        let n = self.dd.sites.len();
        let mut label = vec![usize::MAX; n];
        let mut nlab = 0usize;
        for s in 0..n {
            if open[s] || label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = nlab;
            while let Some(u) = stack.pop() {
                for t in self.dd.sites[u].neighbors() {
                    if let Some(ti) = self.dd.site_id(t) {
                        let ti = ti as usize;
                        if !open[ti] && label[ti] == usize::MAX {
                            label[ti] = nlab;
                            stack.push(ti);
                        }
                    }
                }
            }
            nlab += 1;
        }
        let mut reaches = vec![false; nlab];
        for s in 0..n {
            if label[s] == usize::MAX {
                continue;
            }
            let mut hit = !self.touch[s][arc_t].is_empty();
            if liberal && !hit {
                for &m in &self.marked_vtx {
                    if self.tris[m]
                        .corners()
                        .iter()
                        .any(|c| self.dd.site_id(*c) == Some(s as u32))
                        && self.marked_face_arcs(m).contains(&arc_t)
                    {
                        hit = true;
                    }
                }
            }
            if hit {
                reaches[label[s]] = true;
            }
        }
        let crossing_ok = if require_crossing {
            let mut olabel = vec![usize::MAX; n];
            let mut onlab = 0usize;
            for s in 0..n {
                if !open[s] || olabel[s] != usize::MAX {
                    continue;
                }
                let mut stack = vec![s];
                olabel[s] = onlab;
                while let Some(u) = stack.pop() {
                    for t in self.dd.sites[u].neighbors() {
                        if let Some(ti) = self.dd.site_id(t) {
                            let ti = ti as usize;
                            if open[ti] && olabel[ti] == usize::MAX {
                                olabel[ti] = onlab;
                                stack.push(ti);
                            }
                        }
                    }
                }
                onlab += 1;
            }
            let mut ta = vec![false; onlab];
            let mut tb = vec![false; onlab];
            for s in 0..n {
                if olabel[s] != usize::MAX {
                    if !self.touch[s][arc_a].is_empty() {
                        ta[olabel[s]] = true;
                    }
                    if !self.touch[s][arc_b].is_empty() {
                        tb[olabel[s]] = true;
                    }
                }
            }
            (0..onlab).any(|c| ta[c] && tb[c])
        } else {
            true
        };
        self.tris
            .iter()
            .map(|t| {
                if !crossing_ok {
                    return false;
                }
                let mut escape = false;
                for c in t.corners() {
                    match self.dd.site_id(c) {
                        Some(s) => {
                            let s = s as usize;
                            if !open[s] && reaches[label[s]] {
                                escape = true;
                            }
                        }
                        None => {
                            if out_blue {
                                escape = true;
                            }
                        }
                    }
                }
                !escape
            })
            .collect()
    }
}

impl HexGraph {
    /// For each marked point, the domain site whose hexagonal cell contains
    /// it (the nearest lattice site); None when the nearest lattice site is
    /// outside the domain.
    pub fn assigned_sites(&self) -> Vec<Option<usize>> {
        let mesh = self.dd.mesh;
        self.dd
            .spec
            .marked
            .iter()
            .map(|&t| {
                let x = self.dd.spec.boundary_point(t);
                let mut best_in: Option<(f64, usize)> = None;
                for (s, site) in self.dd.sites.iter().enumerate() {
                    let d = (site.pos(mesh) - x).norm();
                    if best_in.map_or(true, |(bd, _)| d < bd) {
                        best_in = Some((d, s));
                    }
                }
                let (din, s) = best_in.unwrap();
                // check no outside lattice site is closer
                let site = self.dd.sites[s];
                let closer_out = site.neighbors().iter().chain(
                    site.neighbors()
                        .iter()
                        .flat_map(|n| n.neighbors())
                        .collect::<Vec<_>>()
                        .iter(),
                )
                .any(|&n| {
                    self.dd.site_id(n).is_none() && (n.pos(mesh) - x).norm() < din
                });
                if closer_out {
                    None
                } else {
                    Some(s)
                }
            })
            .collect()
    }

    /// Does hexagon s contain points of arc `arc` (strict boundary edge, or
    /// s is the assigned hexagon of one of the arc endpoints)?
    pub fn touches_arc(&self, assigned: &[Option<usize>], s: usize, arc: usize) -> bool {
        if !self.touch[s][arc].is_empty() {
            return true;
        }
        let nm = self.dd.spec.marked.len();
        // arc j runs from marked point j to marked point (j+1)%nm
        let e0 = arc;
        let e1 = (arc + 1) % nm;
        assigned[e0] == Some(s) || assigned[e1] == Some(s)
    }

    /// Continuum-faithful per-path union semantics: paths anchored at any
    /// hexagon containing points of the source arcs; separation decided by a
    /// membership-blocked flood seeded at every face incident to a non-path
    /// hexagon containing target-arc points.
    pub fn oracle6(&self, open: &[bool], k: usize) -> Vec<bool> {
        let assigned = self.assigned_sites();
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
        let flood_and_union = |g: &HexGraph, in_path: &[bool], sep: &mut Vec<bool>| {
            let mut targets: Vec<usize> = Vec::new();
            for (i, t) in g.tris.iter().enumerate() {
                let hit = t.corners().iter().any(|c| {
                    matches!(g.dd.site_id(*c), Some(s)
                        if !in_path[s as usize]
                            && g.touches_arc(&assigned, s as usize, arc_t))
                });
                if hit {
                    targets.push(i);
                }
            }
            let reached = g.flood(in_path, &targets);
            for (i, r) in reached.iter().enumerate() {
                if !r {
                    sep[i] = true;
                }
            }
        };
        #[allow(clippy::too_many_arguments)]
        fn dfs(
            g: &HexGraph,
            path: &mut Vec<usize>,
            in_path: &mut Vec<bool>,
            site_adj: &[Vec<usize>],
            open: &[bool],
            assigned: &[Option<usize>],
            arc_b: usize,
            sep: &mut Vec<bool>,
            flood_and_union: &dyn Fn(&HexGraph, &[bool], &mut Vec<bool>),
        ) {
            let last = *path.last().unwrap();
            if g.touches_arc(assigned, last, arc_b) {
                flood_and_union(g, in_path, sep);
            }
            for &nb in &site_adj[last] {
                if open[nb] && !in_path[nb] {
                    in_path[nb] = true;
                    path.push(nb);
                    dfs(g, path, in_path, site_adj, open, assigned, arc_b, sep, flood_and_union);
                    path.pop();
                    in_path[nb] = false;
                }
            }
        }
        for start in 0..n {
            if !open[start] || !self.touches_arc(&assigned, start, arc_a) {
                continue;
            }
            in_path[start] = true;
            path.push(start);
            dfs(
                self, &mut path, &mut in_path, &site_adj, open, &assigned, arc_b,
                &mut sep, &flood_and_union,
            );
            path.pop();
            in_path[start] = false;
        }
        sep
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PathOpts {
    pub assigned_anchor: bool,
    pub assigned_seeds: bool,
    /// faces whose corners all lie on the path count as separated
    pub pinch_sep: bool,
    /// seed hexagons must lie off the path
    pub seed_nonpath: bool,
}

impl HexGraph {
    pub fn oracle7(&self, open: &[bool], k: usize, o: PathOpts) -> Vec<bool> {
        let assigned = self.assigned_sites();
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
        let anchor = |s: usize, arc: usize| -> bool {
            if o.assigned_anchor {
                self.touches_arc(&assigned, s, arc)
            } else {
                !self.touch[s][arc].is_empty()
            }
        };
        let seed_hex = |s: usize, arc: usize| -> bool {
            if o.assigned_seeds {
                self.touches_arc(&assigned, s, arc)
            } else {
                !self.touch[s][arc].is_empty()
            }
        };
        let mut sep = vec![false; self.tris.len()];
        let mut in_path = vec![false; n];
        let mut path: Vec<usize> = Vec::new();
        let flood_and_union = |in_path: &[bool], sep: &mut Vec<bool>| {
            let mut targets: Vec<usize> = Vec::new();
            for (i, t) in self.tris.iter().enumerate() {
                let hit = t.corners().iter().any(|c| {
                    matches!(self.dd.site_id(*c), Some(s)
                        if (!o.seed_nonpath || !in_path[s as usize])
                            && seed_hex(s as usize, arc_t))
                });
                if hit {
                    targets.push(i);
                }
            }
            let reached = self.flood(in_path, &targets);
            for (i, r) in reached.iter().enumerate() {
                if !r {
                    if !o.pinch_sep {
                        let pinch = self.tris[i].corners().iter().all(|c| {
                            matches!(self.dd.site_id(*c), Some(s) if in_path[s as usize])
                        });
                        if pinch {
                            continue;
                        }
                    }
                    sep[i] = true;
                }
            }
        };
        #[allow(clippy::too_many_arguments)]
        fn dfs(
            g: &HexGraph,
            path: &mut Vec<usize>,
            in_path: &mut Vec<bool>,
            site_adj: &[Vec<usize>],
            open: &[bool],
            anchor: &dyn Fn(usize, usize) -> bool,
            arc_b: usize,
            sep: &mut Vec<bool>,
            flood_and_union: &dyn Fn(&[bool], &mut Vec<bool>),
        ) {
            let last = *path.last().unwrap();
            if anchor(last, arc_b) {
                flood_and_union(in_path, sep);
            }
            for &nb in &site_adj[last] {
                if open[nb] && !in_path[nb] {
                    in_path[nb] = true;
                    path.push(nb);
                    dfs(g, path, in_path, site_adj, open, anchor, arc_b, sep, flood_and_union);
                    path.pop();
                    in_path[nb] = false;
                }
            }
        }
        for start in 0..n {
            if !open[start] || !anchor(start, arc_a) {
                continue;
            }
            in_path[start] = true;
            path.push(start);
            dfs(
                self, &mut path, &mut in_path, &site_adj, open, &anchor, arc_b,
                &mut sep, &flood_and_union,
            );
            path.pop();
            in_path[start] = false;
        }
        sep
    }
}
