//! Driving an experiment from a config file, as the binary does.

use pinlab::cli::{report_digest, run};
use pinlab::config::parse_config;

const SCAN: &str = r#"
mode = "scan"
seed = 17

[law]
alpha = 0.75
n_table = 256

[scan]
beta = 1.0
h_min = -0.5
h_max = 0.0
steps = 11
n = 1024
replicas = 16
"#;

fn main() {
    let config = parse_config(SCAN).expect("valid config");
    println!("canonical form:\n{}", config.to_canonical());
    let dir = std::env::temp_dir().join("pinlab-config-run");
    let outcome = run(&config, &dir).expect("run succeeds");
    for p in &outcome.artifacts {
        println!("wrote {}", p.display());
    }
    let json: Vec<_> = outcome.artifacts.into_iter().filter(|p| p.extension().is_some_and(|e| e == "json")).collect();
    print!("{}", report_digest(&json).expect("digest").text);
}
