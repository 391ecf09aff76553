//! Inter-arrival laws, renewal functions and forward simulation.

use pinlab::kernel::{intersection_stats, renewal_function, sample_renewal, InterArrivalLaw, DEFAULT_TAIL_TOL};

fn main() -> pinlab::Result<()> {
    let law = InterArrivalLaw::power_law(0.5, 0.0, 256, DEFAULT_TAIL_TOL)?;
    println!(
        "alpha=0.5 pure power law: cK={:.6} mass={:.12} K(1)={:.6} K(1000)={:.3e}",
        law.c_k().unwrap(),
        law.total_mass(),
        law.k(1),
        law.k(1000)
    );

    let srw = InterArrivalLaw::simple_random_walk(512)?;
    println!("simple random walk returns: period {} K(2)={} K(4)={}", srw.period(), srw.k(2), srw.k(4));

    let terminating = InterArrivalLaw::power_law(0.7, 0.2, 128, DEFAULT_TAIL_TOL)?;
    let p = terminating.persistentize();
    println!(
        "terminating K(inf)=0.2 -> persistent law with h shift {:.6} (log 0.8 = {:.6})",
        p.h_shift,
        0.8f64.ln()
    );

    let u = renewal_function(&law, 4096).u;
    for n in [1usize, 10, 100, 1000, 4096] {
        println!("u_{n} = {:.6}   u_n sqrt(n) = {:.6}", u[n], u[n] * (n as f64).sqrt());
    }

    let path = sample_renewal(&law, 200, 42, 0);
    println!("one renewal path on [0, 200]: {:?}", path.points);

    let stats = intersection_stats(&InterArrivalLaw::power_law(0.3, 0.0, 256, DEFAULT_TAIL_TOL)?, 4096)?;
    println!("alpha=0.3: gamma2 = sum u_n^2 = {:.6}", stats.gamma2.unwrap());
    Ok(())
}
