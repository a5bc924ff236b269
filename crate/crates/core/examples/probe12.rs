//! Observable convergence point diagnostics.

use perclab::experiments::{run_observable_convergence, ExperimentConfig, ExperimentKind};
use perclab::geometry::{DomainKind, DomainSpec};

fn main() {
    let mut cfg = ExperimentConfig {
        experiment: ExperimentKind::Observable,
        domain: Some(
            DomainSpec::new(
                DomainKind::EquilateralTriangle { side: 1.0 },
                vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
            )
            .unwrap(),
        ),
        deltas: Some(vec![1.0 / 4.0, 1.0 / 6.0, 1.0 / 8.0]),
        radii: None,
        trials: 4_000,
        seed: 12,
        arm: None,
        multiscale: None,
    };
    match run_observable_convergence(&cfg) {
        Ok(rep) => {
            for p in &rep.points {
                println!("delta {} sup {}", p.scale, p.estimate);
            }
            println!("slope {}", rep.fit.slope);
        }
        Err(e) => println!("error: {e}"),
    }
    cfg.deltas = Some(vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0]);
    match run_observable_convergence(&cfg) {
        Ok(rep) => {
            for p in &rep.points {
                println!("delta {} sup {}", p.scale, p.estimate);
            }
            println!("slope {}", rep.fit.slope);
        }
        Err(e) => println!("error: {e}"),
    }
}
