//! Fractional-moment delocalization certificates.

use pinlab::bounds::{certified_shift, grid_search, simple_certificate, simple_threshold};
use pinlab::kernel::{InterArrivalLaw, DEFAULT_TAIL_TOL};

fn main() -> pinlab::Result<()> {
    let law = InterArrivalLaw::power_law(0.5, 0.0, 256, DEFAULT_TAIL_TOL)?;
    for beta in [2.0, 4.0, 6.0] {
        let h = simple_threshold(&law, beta, 0.8)?;
        let cert = simple_certificate(&law, beta, h - 1e-6, 0.8)?;
        println!(
            "beta={beta}: simple test (gamma=0.8) certifies up to h={h:.4}, hc_ann={:.4}, rho={:.9}",
            -beta * beta / 2.0,
            cert.rho
        );
    }

    let g = grid_search(&law, 1.5, -1.3, Some(256), 100, 1, true)?;
    println!(
        "beta=1.5 h=-1.3: best statistical rho={:.4} (gamma {}, k {}), rigorous rho={:.4}",
        g.best_statistical.rho, g.best_statistical.gamma, g.best_statistical.k, g.best_rigorous.rho
    );

    let law = InterArrivalLaw::power_law(0.75, 0.0, 256, DEFAULT_TAIL_TOL)?;
    let s = certified_shift(&law, 1.0, &[0.005, 0.01], Some(4096), 100, 2)?;
    for r in &s.rows {
        println!(
            "alpha=0.75 beta=1 h=hc_ann+{}: statistical rho={:.4} (k={}) rigorous rho={:.4}",
            r.delta, r.statistical_rho, r.statistical_k, r.rigorous_rho
        );
    }
    Ok(())
}
