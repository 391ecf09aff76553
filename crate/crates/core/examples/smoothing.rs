//! Rare-stretch estimates and the quadratic smoothing check.

use pinlab::kernel::{InterArrivalLaw, DEFAULT_TAIL_TOL};
use pinlab::smoothing::{geometric_gaps, rare_stretch_lower_bound, rare_stretch_prob, smoothing_check, RareStretchConfig};

fn main() -> pinlab::Result<()> {
    let law = InterArrivalLaw::power_law(0.75, 0.0, 256, DEFAULT_TAIL_TOL)?;
    let cfg = RareStretchConfig {
        ell: 64,
        a: 0.9,
        delta: 0.2,
        beta: 1.0,
        h: 0.0,
        replicas: 2000,
    };
    let est = rare_stretch_prob(&law, &cfg, Some(0.1), 5)?;
    println!(
        "p_ell naive {:.4}+-{:.4}, importance {:.4}+-{:.4}, entropy floor {:.4}, entropy bound {:.2e}",
        est.p_ell, est.std_error, est.p_importance, est.std_error_importance, est.entropy_floor, est.entropy_bound
    );
    let gaps = geometric_gaps(&law, &cfg, 0.1, 4000, 5)?;
    println!(
        "gaps between successes: mean {:.3}+-{:.3}, geometric prediction {:.3}",
        gaps.mean_gap, gaps.mean_gap_se, gaps.geometric_mean_gap
    );
    let lb = rare_stretch_lower_bound(&law, cfg.a, cfg.ell, est.p_ell, 0.1)?;
    println!("rare-stretch lower bound on F(1, 0): {:.3e}", lb.lower_bound);

    let report = smoothing_check(&law, 1.0, (-0.5, -0.3), &[0.1, 0.2, 0.4], 1024, 32, 5)?;
    for r in &report.rows {
        println!(
            "h={:.2}: F={:.4}+-{:.4} bound {:.4} -> {:?}",
            r.h, r.f_mc, r.std_error, r.bound, r.verdict
        );
    }
    Ok(())
}
