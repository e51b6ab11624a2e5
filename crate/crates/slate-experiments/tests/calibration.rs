//! Manual calibration probe: prints the exact-oracle sweep metrics under
//! both cost-walk orders. Run with
//! `cargo test -p slate-experiments --test calibration -- --ignored --nocapture`.

use slate_experiments::sweep::{run_error_sweep_with, ErrorSpec, SweepSpec};
use slate_process::Variant;

#[test]
#[ignore = "diagnostic probe, run manually"]
fn exact_row_under_both_cost_orders() {
    for (label, reverse) in [("descending", false), ("ascending", true)] {
        let spec = SweepSpec {
            settings: vec![ErrorSpec::exact()],
            num_instances: 100,
            ..SweepSpec::default()
        };
        let start = std::time::Instant::now();
        let outcome = run_error_sweep_with(
            &spec,
            if reverse {
                Some(&|_: Variant, cfg: &mut slate_process::ProcessConfig| {
                    cfg.cost_list.reverse();
                })
            } else {
                None
            },
        )
        .unwrap();
        println!("=== cost order: {label} ({:?}) ===", start.elapsed());
        for cell in &outcome.cells {
            println!(
                "{:>8}: mean_u={:.3} p10={:.3} violations={} max_d(b=0)={:.4}",
                cell.variant.label(),
                cell.mean_utility,
                cell.mean_bottom_decile,
                cell.violation_count,
                cell.mean_max_d[0],
            );
        }
    }
}

#[test]
#[ignore = "diagnostic probe, run manually"]
fn noisy_row_beta_delta_one() {
    use num_rational::Ratio;
    use slate_synth::ErrorMode;
    let setting = ErrorSpec {
        beta: 1,
        gamma: Ratio::new(17, 20),
        delta: Ratio::from_integer(1),
        mu: Ratio::new(17, 20),
        mode: ErrorMode::Uniform,
    };
    for (label, reverse) in [("descending", false), ("ascending", true)] {
        let spec = SweepSpec {
            settings: vec![setting.clone()],
            num_instances: 100,
            ..SweepSpec::default()
        };
        let start = std::time::Instant::now();
        let outcome = run_error_sweep_with(
            &spec,
            if reverse {
                Some(&|_: Variant, cfg: &mut slate_process::ProcessConfig| {
                    cfg.cost_list.reverse();
                })
            } else {
                None
            },
        )
        .unwrap();
        println!("=== cost order: {label} ({:?}) ===", start.elapsed());
        for cell in &outcome.cells {
            println!(
                "{:>8}: mean_u={:.3} p10={:.3} violations={} max_d(b=0)={:.4}",
                cell.variant.label(),
                cell.mean_utility,
                cell.mean_bottom_decile,
                cell.violation_count,
                cell.mean_max_d[0],
            );
        }
    }
}
