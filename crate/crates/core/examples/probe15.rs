//! Site counts for candidate small catalog domains.

use perclab::engine::ArmSpec;
use perclab::geometry::{discretize, DomainKind, DomainSpec};
use num_complex::Complex64;

fn main() {
    let tri3 = vec![0.0, 1.0 / 3.0, 2.0 / 3.0];
    let sq4 = vec![0.0, 0.25, 0.5, 0.75];
    let cases: Vec<(&str, DomainSpec, f64)> = vec![
        ("tri 0.45", DomainSpec::new(DomainKind::EquilateralTriangle { side: 1.0 }, tri3.clone()).unwrap(), 0.45),
        ("tri 0.6", DomainSpec::new(DomainKind::EquilateralTriangle { side: 1.0 }, tri3.clone()).unwrap(), 0.6),
        ("tri 1.0", DomainSpec::new(DomainKind::EquilateralTriangle { side: 1.0 }, tri3.clone()).unwrap(), 1.0),
        ("sq 0.45", DomainSpec::new(DomainKind::Rectangle { aspect: 1.0 }, sq4.clone()).unwrap(), 0.45),
        ("sq 0.5", DomainSpec::new(DomainKind::Rectangle { aspect: 1.0 }, sq4.clone()).unwrap(), 0.5),
        ("rect2 0.7", DomainSpec::new(DomainKind::Rectangle { aspect: 2.0 }, vec![0.0, 1.0 / 3.0, 0.5, 5.0 / 6.0]).unwrap(), 0.7),
        ("halfdisk 0.55", DomainSpec::new(DomainKind::HalfDisk { radius: 1.0 }, vec![0.1, 0.4, 0.7]).unwrap(), 0.55),
        ("halfdisk4 0.55", DomainSpec::new(DomainKind::HalfDisk { radius: 1.0 }, sq4.clone()).unwrap(), 0.55),
        ("halfann 0.5", DomainSpec::new(DomainKind::HalfAnnulus { inner: 0.5, outer: 1.0 }, sq4.clone()).unwrap(), 0.5),
        ("halfann 0.4", DomainSpec::new(DomainKind::HalfAnnulus { inner: 0.5, outer: 1.0 }, sq4.clone()).unwrap(), 0.4),
        ("disk 0.6", DomainSpec::new(DomainKind::Disk { radius: 1.0 }, tri3.clone()).unwrap(), 0.6),
    ];
    for (name, spec, mesh) in &cases {
        match discretize(spec, *mesh) {
            Ok(dd) => println!("{name}: n = {}, duals = {}", dd.n_sites(), dd.dual_vertices.len()),
            Err(e) => println!("{name}: error {e}"),
        }
    }
    // annulus region counts for the arm oracle on a half-annulus domain at mesh 1
    for (r, rr) in [(1.2, 3.4), (1.5, 3.5), (1.2, 2.9)] {
        let spec = DomainSpec::new(
            DomainKind::HalfAnnulus { inner: r, outer: rr },
            sq4.clone(),
        )
        .unwrap();
        match discretize(&spec, 1.0) {
            Ok(dd) => {
                let arm = ArmSpec {
                    center: Complex64::new(0.0, 0.0),
                    inner_radius: r,
                    outer_radius: rr,
                    theta: std::f64::consts::PI,
                    k: 1,
                    start_open: true,
                };
                let inside = (0..dd.n_sites())
                    .filter(|&s| arm.in_sector(dd.sites[s].pos(dd.mesh)))
                    .count();
                println!("halfann({r},{rr}) mesh 1: n = {}, region = {inside}", dd.n_sites());
            }
            Err(e) => println!("halfann({r},{rr}): error {e}"),
        }
    }
}
