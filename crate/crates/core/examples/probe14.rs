//! Rectangle crossing deviation magnitudes per mesh.

use perclab::experiments::{run_crossing_convergence, ExperimentConfig, ExperimentKind};
use perclab::geometry::{DomainKind, DomainSpec};

fn main() {
    let cfg = ExperimentConfig {
        experiment: ExperimentKind::Crossing,
        domain: Some(
            DomainSpec::new(
                DomainKind::Rectangle { aspect: 0.5 },
                vec![0.0, 1.0 / 6.0, 0.5, 2.0 / 3.0],
            )
            .unwrap(),
        ),
        deltas: Some(vec![1.0 / 2.0, 1.0 / 3.0, 1.0 / 4.0, 1.0 / 6.0, 1.0 / 8.0, 1.0 / 12.0]),
        radii: None,
        trials: 80_000,
        seed: 12,
        arm: None,
        multiscale: None,
    };
    match run_crossing_convergence(&cfg) {
        Ok(rep) => {
            println!("limit {}", rep.limit);
            for (p, d) in rep.points.iter().zip(&rep.deviations) {
                println!("delta {} p {} dev {} 3sig {}", p.scale, p.estimate, d, 3.0 * p.stderr);
            }
            println!("slope {}", rep.fit.slope);
        }
        Err(e) => println!("error: {e}"),
    }
}
