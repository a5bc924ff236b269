//! Per-config comparison: oracle E-field differences vs the three-arm event.

use perclab::geometry::{discretize, DomainKind, DomainSpec};

#[path = "common/probe_lib.rs"]
mod probe_lib;
use probe_lib::{build, HexGraph};

fn open_path_through(g: &HexGraph, open: &[bool], k: usize, a: usize, b: usize) -> bool {
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
        path: &mut Vec<usize>,
        in_path: &mut Vec<bool>,
        site_adj: &[Vec<usize>],
        open: &[bool],
        arc_b: usize,
        a: usize,
        b: usize,
        found: &mut bool,
    ) {
        if *found {
            return;
        }
        let last = *path.last().unwrap();
        if !g.touch[last][arc_b].is_empty()
            && path
                .windows(2)
                .any(|w| (w[0] == a && w[1] == b) || (w[0] == b && w[1] == a))
        {
            *found = true;
            return;
        }
        for &nb in &site_adj[last] {
            if open[nb] && !in_path[nb] {
                in_path[nb] = true;
                path.push(nb);
                dfs(g, path, in_path, site_adj, open, arc_b, a, b, found);
                path.pop();
                in_path[nb] = false;
            }
        }
    }
    for start in 0..n {
        if found {
            break;
        }
        if !open[start] || g.touch[start][arc_a].is_empty() {
            continue;
        }
        in_path[start] = true;
        path.push(start);
        dfs(g, &mut path, &mut in_path, &site_adj, open, arc_b, a, b, &mut found);
        path.pop();
        in_path[start] = false;
    }
    found
}

fn closed_arm(g: &HexGraph, open: &[bool], c: usize, arc_t: usize) -> bool {
    if open[c] {
        return false;
    }
    let n = g.dd.sites.len();
    let mut seen = vec![false; n];
    let mut stack = vec![c];
    seen[c] = true;
    while let Some(s) = stack.pop() {
        if !g.touch[s][arc_t].is_empty() {
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
    let pc = std::env::var("PC").map(|v| v == "1").unwrap_or(false);
    let ot = std::env::var("OT").map(|v| v == "1").unwrap_or(true);
    println!("per_cluster={pc} open_targets={ot}");
    let dual_set: std::collections::HashSet<usize> =
        g.dd.dual_vertices.iter().map(|z| g.tidx[z]).collect();
    let mut mism = [0u64; 2]; // [diff true/ta false, diff false/ta true]
    let mut by_class = [[0u64; 2]; 3]; // z_d class: dual, marked, corridor
    let mut shown = 0;
    for cfg in 0u64..(1u64 << n) {
        let open: Vec<bool> = (0..n).map(|s| cfg >> s & 1 == 1).collect();
        for k in 0..3 {
            let ob = std::env::var("OB").map(|v| v == "1").unwrap_or(false);
            let sep = g.oracle5(&open, k, false, false, ob);
            let arc_t = (k + 1) % 3;
            for z in &g.dd.dual_vertices {
                let zt = g.tidx[z];
                let corners = z.corners();
                for d in 0..3 {
                    let (nb, (ea, eb)) = z.adjacent_faces()[d];
                    let Some(&nt) = g.tidx.get(&nb) else { continue };
                    let diff = sep[nt] && !sep[zt];
                    let a = g.dd.site_id(ea).unwrap() as usize;
                    let b = g.dd.site_id(eb).unwrap() as usize;
                    let ct = corners
                        .iter()
                        .map(|c| g.dd.site_id(*c).unwrap() as usize)
                        .find(|&c| c != a && c != b)
                        .unwrap();
                    let ta = closed_arm(&g, &open, ct, arc_t)
                        && open_path_through(&g, &open, k, a, b);
                    if diff != ta {
                        let cls = if dual_set.contains(&nt) {
                            0
                        } else if g.marked_vtx.contains(&nt) {
                            1
                        } else {
                            2
                        };
                        by_class[cls][if diff { 0 } else { 1 }] += 1;
                        mism[if diff { 0 } else { 1 }] += 1;
                        if shown < 8 && cls == 0 {
                            shown += 1;
                            println!(
                                "cfg={cfg:012b} k={k} d={d} z={z:?}: E-diff {diff} three-arm {ta}"
                            );
                        }
                    }
                }
            }
        }
    }
    println!("mismatches: E-diff-only {} three-arm-only {}", mism[0], mism[1]);
    println!(
        "by z_d class (dual/marked/corridor): {:?} {:?} {:?}",
        by_class[0], by_class[1], by_class[2]
    );
}
