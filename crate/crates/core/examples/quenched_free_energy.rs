//! Quenched free energy by Monte Carlo, against the annealed bound.

use pinlab::kernel::{InterArrivalLaw, DEFAULT_TAIL_TOL};
use pinlab::quenched::{annealed_reference, free_energy_mc, log_partition, DisorderSample};

fn main() -> pinlab::Result<()> {
    let law = InterArrivalLaw::power_law(0.75, 0.0, 256, DEFAULT_TAIL_TOL)?;
    let beta = 1.0;

    let disorder = DisorderSample::new(beta, 0.0, 9, 0, 1024);
    let table = log_partition(&law, &disorder, 1024)?;
    println!("one replica at h=0, N=1024: log Zc={:.4} log Zf={:.4}", table.log_zc_end(), table.log_zf);

    println!("   h      F_mc       3se        certified lb   F_ann");
    for h in [-0.5, -0.2, 0.0, 0.2, 0.5] {
        let est = free_energy_mc(&law, beta, h, 2048, 32, 1)?;
        let ann = annealed_reference(&law, beta, h)?;
        println!(
            "{h:>5}  {:>9.5}  {:>9.5}  {:>12.5}  {:>8.5}",
            est.value,
            3.0 * est.std_error,
            est.lower_bound_certified,
            ann.f_ann
        );
    }
    Ok(())
}
