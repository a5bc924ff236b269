use perclab::geometry::{discretize, DomainKind, DomainSpec};

fn main() {
    let spec = DomainSpec::new(
        DomainKind::EquilateralTriangle { side: 1.0 },
        vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
    )
    .unwrap();
    let dd = discretize(&spec, 1.0).unwrap();
    println!("{}", dd.n_sites());
}
