//! Diagnostics for assigned marked-point hexagons.

use perclab::geometry::{discretize, DomainKind, DomainSpec};

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
    let mesh = dd.mesh;
    let g = build(dd);
    let assigned = g.assigned_sites();
    for (m, &t) in g.dd.spec.marked.iter().enumerate() {
        let x = g.dd.spec.boundary_point(t);
        println!("mark {m} t={t} at {x:?} assigned {:?}", assigned[m]);
        if let Some(s) = assigned[m] {
            println!("   site {:?} pos {:?}", g.dd.sites[s], g.dd.sites[s].pos(mesh));
        }
    }
    for s in 0..g.dd.sites.len() {
        let arcs: Vec<usize> = (0..3).filter(|&a| !g.touch[s][a].is_empty()).collect();
        if !arcs.is_empty() {
            println!("site {s} {:?} strict arcs {:?}", g.dd.sites[s], arcs);
        }
    }
    println!("marked faces: {:?}", g.marked_vtx);
    for &m in &g.marked_vtx {
        println!("  face {m} corners {:?} arcs {:?}", g.tris[m].corners(), g.marked_face_arcs(m));
    }
}
