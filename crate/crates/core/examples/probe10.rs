//! Three-arm characterization of the difference events, brute force, and the
//! color-switching identity check on it.

use perclab::geometry::{discretize, DomainKind, DomainSpec};

#[path = "common/probe_lib.rs"]
mod probe_lib;
use probe_lib::{build, HexGraph};

fn touches(g: &HexGraph, assigned: &[Option<usize>], s: usize, arc: usize) -> bool {
    g.touches_arc(assigned, s, arc)
}

/// Does some simple open path from arc (k+2)%3 to arc k pass through sites
/// (a, b) consecutively? order: 0 = either direction, 1 = a then b, 2 = b
/// then a (path listed from the arc (k+2)%3 end).
fn open_path_through(
    g: &HexGraph,
    assigned: &[Option<usize>],
    open: &[bool],
    k: usize,
    a: usize,
    b: usize,
    order: u8,
) -> bool {
    let arc_a = (k + 2) % 3;
    let arc_b = k;
    if !open[a] || !open[b] {
        return false;
    }
    let n = g.dd.sites.len();
    let site_adj: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            g.dd.sites[s]
                .neighbors()
                .iter()
                .filter_map(|t| g.dd.site_id(*t))
                .map(|x| x as usize)
                .collect()
        })
        .collect();
    let mut in_path = vec![false; n];
    let mut path: Vec<usize> = Vec::new();
    let mut found = false;
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        g: &HexGraph,
        assigned: &[Option<usize>],
        path: &mut Vec<usize>,
        in_path: &mut Vec<bool>,
        site_adj: &[Vec<usize>],
        open: &[bool],
        arc_b: usize,
        a: usize,
        b: usize,
        order: u8,
        found: &mut bool,
    ) {
        if *found {
            return;
        }
        let last = *path.last().unwrap();
        if touches(g, assigned, last, arc_b) {
            let hit = path.windows(2).any(|w| {
                (order != 2 && w[0] == a && w[1] == b)
                    || (order != 1 && w[0] == b && w[1] == a)
            });
            if hit {
                *found = true;
                return;
            }
        }
        for &nb in &site_adj[last] {
            if open[nb] && !in_path[nb] {
                in_path[nb] = true;
                path.push(nb);
                dfs(g, assigned, path, in_path, site_adj, open, arc_b, a, b, order, found);
                path.pop();
                in_path[nb] = false;
            }
        }
    }
    for start in 0..n {
        if found {
            break;
        }
        if !open[start] || !touches(g, assigned, start, arc_a) {
            continue;
        }
        in_path[start] = true;
        path.push(start);
        dfs(g, assigned, &mut path, &mut in_path, &site_adj, open, arc_b, a, b, order, &mut found);
        path.pop();
        in_path[start] = false;
    }
    found
}

/// Closed arm: site c is closed and its closed cluster touches arc t.
fn closed_arm(
    g: &HexGraph,
    assigned: &[Option<usize>],
    open: &[bool],
    c: usize,
    arc_t: usize,
) -> bool {
    if open[c] {
        return false;
    }
    let n = g.dd.sites.len();
    let mut seen = vec![false; n];
    let mut stack = vec![c];
    seen[c] = true;
    while let Some(s) = stack.pop() {
        if touches(g, assigned, s, arc_t) {
            return true;
        }
        for t in g.dd.sites[s].neighbors() {
            if let Some(ti) = g.dd.site_id(t) {
                let ti = ti as usize;
                if !open[ti] && !seen[ti] {
                    seen[ti] = true;
                    stack.push(ti);
                }
            }
        }
    }
    false
}

fn main() {
    let spec = DomainSpec::new(
        DomainKind::EquilateralTriangle { side: 1.0 },
        vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
    )
    .unwrap();
    let dd = discretize(&spec, 1.0).unwrap();
    let n = dd.sites.len();
    let g = build(dd);
    let assigned = g.assigned_sites();
    let nd = g.dd.dual_vertices.len();
    for order in [0u8, 1, 2] {
        let mut ta = vec![[[0u64; 3]; 3]; nd];
        for cfg in 0u64..(1u64 << n) {
            let open: Vec<bool> = (0..n).map(|s| cfg >> s & 1 == 1).collect();
            for (zi, z) in g.dd.dual_vertices.iter().enumerate() {
                let corners = z.corners();
                for k in 0..3 {
                    let arc_t = (k + 1) % 3;
                    for d in 0..3 {
                        let (_, (ea, eb)) = z.adjacent_faces()[d];
                        let a = g.dd.site_id(ea).unwrap() as usize;
                        let b = g.dd.site_id(eb).unwrap() as usize;
                        let ct = corners
                            .iter()
                            .map(|c| g.dd.site_id(*c).unwrap() as usize)
                            .find(|&c| c != a && c != b)
                            .unwrap();
                        if closed_arm(&g, &assigned, &open, ct, arc_t)
                            && open_path_through(&g, &assigned, &open, k, a, b, order)
                        {
                            ta[zi][k][d] += 1;
                        }
                    }
                }
            }
        }
        let mut nbad = 0usize;
        let mut max_diff = 0i64;
        for zi in 0..nd {
            for k in 0..3 {
                for d in 0..3 {
                    let x = ta[zi][k][d] as i64;
                    let y = ta[zi][(k + 1) % 3][(d + 1) % 3] as i64;
                    if x != y {
                        nbad += 1;
                        max_diff = max_diff.max((x - y).abs());
                    }
                }
            }
        }
        let tot: u64 = ta.iter().flatten().flatten().sum();
        println!("order {order}: identity mismatches {nbad}/{}, max diff {max_diff}, total count {tot}", nd * 9);
    }
}
