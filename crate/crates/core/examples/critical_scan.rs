//! Finite-volume bracket on the quenched critical point.

use pinlab::kernel::{InterArrivalLaw, DEFAULT_TAIL_TOL};
use pinlab::quenched::critical_scan;

fn main() -> pinlab::Result<()> {
    let law = InterArrivalLaw::power_law(0.75, 0.0, 256, DEFAULT_TAIL_TOL)?;
    let grid: Vec<f64> = (0..=20).map(|i| -0.5 + 0.025 * i as f64).collect();
    let scan = critical_scan(&law, 1.0, &grid, 2048, 32, 3.0, 4, None)?;
    for r in &scan.rows {
        println!("h={:.3}  E log Zc={:>8.3} +- {:.3}  localized={}", r.h, r.mean_log_z, r.std_error, r.localized);
    }
    println!(
        "hc_ann={} <= hc(1) in [{}, {:?}] <= hc0={}",
        scan.hc_ann, scan.left, scan.right, scan.hc0
    );
    Ok(())
}
