//! Pointwise field vs map diagnostics at a coarse mesh.

use num_complex::Complex64;
use perclab::geometry::{discretize, DomainKind, DomainSpec};
use perclab::numerics::conformal::triangle_map;
use perclab::observable::{estimate_fields, modify_boundary};

fn main() {
    let spec = DomainSpec::new(
        DomainKind::EquilateralTriangle { side: 1.0 },
        vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
    )
    .unwrap();
    let dd = discretize(&spec, 1.0 / 8.0).unwrap();
    let map = triangle_map(&spec).unwrap();
    let f = estimate_fields(&dd, 20_000, 5).unwrap();
    let g = f.g_field();
    let modified = modify_boundary(&dd, &g).unwrap();
    println!("marked sites: {:?}", dd.marked_sites);
    for k in 0..3 {
        let s = dd.marked_sites[k];
        println!("marked {k}: site pos {}", dd.sites[s as usize].pos(dd.mesh));
    }
    // a few sample faces: nearest dual vertex to each of these probe points
    let probes = [
        Complex64::new(0.5, 0.29),
        Complex64::new(0.2, 0.1),
        Complex64::new(0.8, 0.1),
        Complex64::new(0.5, 0.75),
        Complex64::new(0.5, 0.1),
    ];
    for p in probes {
        let (fi, v) = dd
            .dual_vertices
            .iter()
            .enumerate()
            .min_by(|a, b| {
                let da = (a.1.pos(dd.mesh) - p).norm();
                let db = (b.1.pos(dd.mesh) - p).norm();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        let z = v.pos(dd.mesh);
        let h = f.h_hat(fi);
        let phi = map.evaluate(z).unwrap();
        println!(
            "z = {z:.3}: H = [{:.3} {:.3} {:.3}], G = {:.3}, mod = {:.3}, phi = {phi:.3}, |G-phi| = {:.3}",
            h[0], h[1], h[2], g[fi], modified[fi], (g[fi] - phi).norm()
        );
    }
}
