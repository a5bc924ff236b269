//! Inspect color-switching mismatches on the 12-site symmetric triangle.

use perclab::geometry::{discretize, DomainKind, DomainSpec};
use std::collections::HashSet;

#[path = "common/probe_lib.rs"]
mod probe_lib;
use probe_lib::build;

fn main() {
    let spec = DomainSpec::new(
        DomainKind::EquilateralTriangle { side: 1.0 },
        vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
    )
    .unwrap();
    let dd = discretize(&spec, 1.0).unwrap();
    let n = dd.sites.len();
    let g = build(dd);
    let nd = g.dd.dual_vertices.len();
    // per config, per k: dual separation bits
    let nc = 1usize << n;
    let mut bits = vec![[0u16; 3]; nc];
    for cfg in 0..nc {
        let open: Vec<bool> = (0..n).map(|s| cfg >> s & 1 == 1).collect();
        for k in 0..3 {
            let sep = g.oracle(&open, k);
            let mut b = 0u16;
            for (zi, z) in g.dd.dual_vertices.iter().enumerate() {
                if sep[g.tidx[&z]] {
                    b |= 1 << zi;
                }
            }
            bits[cfg][k] = b;
        }
    }
    // counts and first mismatching triple
    let dual_index = |v: &perclab::geometry::DualVertex| -> Option<usize> {
        g.dd.dual_vertices.iter().position(|x| x == v)
    };
    for (zi, z) in g.dd.dual_vertices.iter().enumerate() {
        for k in 0..3 {
            for d in 0..3 {
                let (nb1, _) = z.adjacent_faces()[d];
                let (nb2, _) = z.adjacent_faces()[(d + 1) % 3];
                let (Some(n1), Some(n2)) = (dual_index(&nb1), dual_index(&nb2)) else {
                    continue;
                };
                let k2 = (k + 1) % 3;
                let d1: HashSet<usize> = (0..nc)
                    .filter(|&c| bits[c][k] >> n1 & 1 == 1 && bits[c][k] >> zi & 1 == 0)
                    .collect();
                let d2: HashSet<usize> = (0..nc)
                    .filter(|&c| bits[c][k2] >> n2 & 1 == 1 && bits[c][k2] >> zi & 1 == 0)
                    .collect();
                if d1.len() != d2.len() {
                    println!(
                        "MISMATCH z={zi} {:?} k={k} d={d}: |D1|={} |D2|={}",
                        z,
                        d1.len(),
                        d2.len()
                    );
                    // smallest-popcount configs on each side
                    let mut v1: Vec<usize> = d1.difference(&d2).cloned().collect();
                    v1.sort_by_key(|c| c.count_ones());
                    let mut v2: Vec<usize> = d2.difference(&d1).cloned().collect();
                    v2.sort_by_key(|c| c.count_ones());
                    println!("  D1-only sample: {:?}", &v1[..v1.len().min(3)].iter().map(|c| format!("{c:012b}")).collect::<Vec<_>>());
                    println!("  D2-only sample: {:?}", &v2[..v2.len().min(3)].iter().map(|c| format!("{c:012b}")).collect::<Vec<_>>());
                    return;
                }
            }
        }
    }
    println!("no mismatches");
}
