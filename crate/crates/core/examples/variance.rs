//! Second-moment diagnostics at and near the annealed critical point.

use pinlab::kernel::{InterArrivalLaw, DEFAULT_TAIL_TOL};
use pinlab::quenched::{flno_prediction, second_moment_window, variance_at_annealed_critical};

fn main() -> pinlab::Result<()> {
    let law = InterArrivalLaw::power_law(0.3, 0.0, 256, DEFAULT_TAIL_TOL)?;
    let v = variance_at_annealed_critical(&law, 0.2, 2048, 400, 3)?;
    println!(
        "alpha=0.3 beta=0.2 N=2048: Var Zf = {:.5} +- {:.5}, exact at this N {:.5}, limit {:.5}",
        v.mc_variance,
        v.mc_std_error,
        v.exact_finite_n,
        v.analytic_limit.unwrap()
    );
    println!("gamma2 = {:.5}, beta0 = {:.4}", v.gamma2.unwrap(), v.beta0.unwrap());

    let w = second_moment_window(&law, 0.2, 0.05, 2.0, 200, 3, 0.1)?;
    println!(
        "window delta=0.05: N0={} E Z/mean ratio {:.4} +- {:.4}, second moment bound {:.4}",
        w.n0, w.ratio_mc, w.ratio_se, w.bound
    );

    let flno = flno_prediction(&InterArrivalLaw::power_law(0.75, 0.0, 256, DEFAULT_TAIL_TOL)?, 0.3, 0.1)?;
    println!(
        "small-disorder expansion alpha=0.75 beta=0.3 delta=0.1: F ~ {:.6e} (pure {:.6e})",
        flno.prediction, flno.f0
    );
    Ok(())
}
