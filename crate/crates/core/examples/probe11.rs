//! Identity count scan over per-path semantics variants.

use perclab::geometry::{discretize, DomainKind, DomainSpec};
use std::collections::HashMap;

#[path = "common/probe_lib.rs"]
mod probe_lib;
use probe_lib::{build, PathOpts};

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
    for assigned_anchor in [false, true] {
        for assigned_seeds in [false, true] {
            for pinch_sep in [false, true] {
                for seed_nonpath in [false, true] {
                    let o = PathOpts { assigned_anchor, assigned_seeds, pinch_sep, seed_nonpath };
                    let mut cnt: HashMap<(usize, usize, usize), u64> = HashMap::new();
                    for cfg in 0u64..(1u64 << n) {
                        let open: Vec<bool> = (0..n).map(|s| cfg >> s & 1 == 1).collect();
                        for k in 0..3 {
                            let sep = g.oracle7(&open, k, o);
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
                    for zi in 0..nz {
                        for k in 0..3 {
                            for d in 0..3 {
                                let a = *cnt.get(&(zi, k, d)).unwrap_or(&0);
                                let b = *cnt.get(&(zi, (k + 1) % 3, (d + 1) % 3)).unwrap_or(&0);
                                total += a;
                                if a != b {
                                    bad += 1;
                                }
                            }
                        }
                    }
                    println!("{o:?}: mismatches {bad}/108 total {total}");
                }
            }
        }
    }
}
