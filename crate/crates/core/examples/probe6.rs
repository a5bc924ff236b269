//! Identity count scan over separating-semantics conventions.

use perclab::geometry::{discretize, DomainKind, DomainSpec};
use std::collections::HashMap;

#[path = "common/probe_lib.rs"]
mod probe_lib;
use probe_lib::{build, SepOpts};

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
    for block in [0u8, 1, 2] {
        for liberal_touch in [false, true] {
            for open_seeds in [false, true] {
                for edge_both in [false, true] {
                    for no_marked in [false, true] {
                        let o = SepOpts { block, liberal_touch, open_seeds, edge_both, no_marked };
                        let mut cnt: HashMap<(usize, usize, usize), u64> = HashMap::new();
                        for cfg in 0u64..(1u64 << n) {
                            let open: Vec<bool> = (0..n).map(|s| cfg >> s & 1 == 1).collect();
                            for k in 0..3 {
                                let sep = g.oracle4(&open, k, o);
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
}
