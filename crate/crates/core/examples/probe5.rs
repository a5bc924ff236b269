//! Exact color-switching count test for the cluster-blocked flood detector.

use perclab::geometry::{discretize, DomainKind, DomainSpec};
use std::collections::HashMap;

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
    let nz = g.dd.dual_vertices.len();
    let mut cnt: HashMap<(usize, usize, usize), u64> = HashMap::new();
    for cfg in 0u64..(1u64 << n) {
        let open: Vec<bool> = (0..n).map(|s| cfg >> s & 1 == 1).collect();
        for k in 0..3 {
            let sep = g.oracle3(&open, k);
            for (zi, z) in g.dd.dual_vertices.iter().enumerate() {
                let zt = g.tidx[z];
                for d in 0..3 {
                    let (nb, _) = z.adjacent_faces()[d];
                    let Some(&nt) = g.tidx.get(&nb) else { continue };
                    if sep[nt] && !sep[zt] {
                        *cnt.entry((zi, k, d)).or_insert(0) += 1;
                    }
                }
            }
        }
    }
    let mut bad = 0u64;
    let mut total = 0u64;
    let mut shown = 0;
    for zi in 0..nz {
        for k in 0..3 {
            for d in 0..3 {
                let a = *cnt.get(&(zi, k, d)).unwrap_or(&0);
                let b = *cnt.get(&(zi, (k + 1) % 3, (d + 1) % 3)).unwrap_or(&0);
                total += a;
                if a != b {
                    bad += 1;
                    if shown < 12 {
                        shown += 1;
                        println!(
                            "zi={zi} z={:?} k={k} d={d}: {a} vs {b}",
                            g.dd.dual_vertices[zi]
                        );
                    }
                }
            }
        }
    }
    println!("identity mismatches: {bad}/108 total count {total}");
}
