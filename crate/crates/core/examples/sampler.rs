//! Exact Gibbs sampling of contact sets.

use pinlab::kernel::{InterArrivalLaw, DEFAULT_TAIL_TOL};
use pinlab::quenched::DisorderSample;
use pinlab::sampler::{contact_statistics, sample_paths, write_occupation_csv};

fn main() -> pinlab::Result<()> {
    let law = InterArrivalLaw::power_law(0.5, 0.0, 256, DEFAULT_TAIL_TOL)?;
    for h in [-1.0, 0.0, 0.5] {
        let disorder = DisorderSample::new(1.0, h, 3, 0, 400);
        let paths = sample_paths(&law, &disorder, 400, 500, 11)?;
        let stats = contact_statistics(&paths)?;
        println!(
            "beta=1 h={h}: contact fraction {:.4} +- {:.4}",
            stats.fraction_mean, stats.fraction_se
        );
    }
    let disorder = DisorderSample::new(1.0, 0.0, 3, 0, 60);
    let paths = sample_paths(&law, &disorder, 60, 5, 11)?;
    write_occupation_csv(std::io::stdout(), &paths).expect("stdout");
    Ok(())
}
