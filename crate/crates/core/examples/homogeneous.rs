//! Pure (homogeneous) model: free energy, contact fraction, critical behaviour.

use pinlab::homogeneous::{critical_asymptotics, free_energy, grid, hc0, partition, Boundary};
use pinlab::kernel::{InterArrivalLaw, DEFAULT_TAIL_TOL};

fn main() -> pinlab::Result<()> {
    let geometric = InterArrivalLaw::geometric(0.5)?;
    let sol = free_energy(&geometric, 3f64.ln(), 1e-12)?;
    println!("K(n) = 2^-n at h = log 3: F = {:.15} (log 2 = {:.15})", sol.free_energy(), 2f64.ln());

    for alpha in [0.5, 2.0] {
        let law = InterArrivalLaw::power_law(alpha, 0.0, 256, DEFAULT_TAIL_TOL)?;
        let asym = critical_asymptotics(&law)?;
        println!("alpha={alpha}: hc0={} F(hc0+d) ~ {:.6} d^{}", hc0(&law), asym.constant, asym.exponent);
        for row in grid(&law, &[-0.1, 0.0, 0.01, 0.1, 0.5])? {
            println!(
                "  h={:>5}  F={:.6e}  contact fraction={:.6}  correlation length={:.3e}",
                row.h, row.free_energy, row.contact_fraction, row.correlation_length
            );
        }
    }

    let law = InterArrivalLaw::power_law(0.5, 0.0, 256, DEFAULT_TAIL_TOL)?;
    let zc = partition(&law, 0.1, 2000, Boundary::Constrained);
    let zf = partition(&law, 0.1, 2000, Boundary::Free);
    let f = free_energy(&law, 0.1, 1e-12)?.free_energy();
    println!(
        "h=0.1, N=2000: log Zc/N={:.6} log Zf/N={:.6} F={:.6}",
        zc[2000] / 2000.0,
        zf[2000] / 2000.0,
        f
    );
    Ok(())
}
