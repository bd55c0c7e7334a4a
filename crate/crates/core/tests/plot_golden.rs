use std::path::PathBuf;

use mdsa_core::harness::{render_plot, sweep};
use mdsa_core::{Algorithm, SimConfig};

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/compare_n50_seed7.svg")
}

#[test]
fn comparison_plot_matches_golden() {
    let cfg = SimConfig::with_n(50, 7);
    let curves = vec![
        sweep(Algorithm::Mdsa, &cfg, 3, 0.1).unwrap(),
        sweep(Algorithm::Dsa1, &cfg, 3, 0.1).unwrap(),
    ];
    let svg = render_plot(&curves, "n=50 seed=7").unwrap();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(golden_path(), &svg).unwrap();
    }
    let golden = std::fs::read_to_string(golden_path()).unwrap();
    assert_eq!(svg, golden);
}
