//! Dump the rect2 mesh-0.7 domain and the duality-violating configuration.

use perclab::engine::{arc_mask, crossing_occurs, Configuration};
use perclab::geometry::{discretize, DomainKind, DomainSpec};

fn main() {
    let spec = DomainSpec::new(
        DomainKind::Rectangle { aspect: 2.0 },
        vec![0.0, 1.0 / 3.0, 0.5, 5.0 / 6.0],
    )
    .unwrap();
    let dd = discretize(&spec, 0.7).unwrap();
    println!("n = {}, marked = {:?}", dd.n_sites(), dd.marked_sites);
    for s in 0..dd.n_sites() {
        let c = dd.sites[s];
        println!(
            "site {s}: ({},{}) pos {:.2} arc {} mask {:04b}",
            c.i,
            c.j,
            c.pos(dd.mesh),
            dd.arc_of_site[s] as i64,
            arc_mask(&dd, s as u32)
        );
    }
    let mask: u32 = 0b100001000000001;
    let cfg = Configuration::from_bits(&dd, mask);
    println!("open sites: {:?}", (0..dd.n_sites()).filter(|&s| cfg.colors[s]).collect::<Vec<_>>());
    for (a, b, color) in [(0usize, 2usize, true), (1, 3, false)] {
        println!("crossing {a}<->{b} color {color}: {}", crossing_occurs(&cfg, a, b, color).unwrap());
    }
}
