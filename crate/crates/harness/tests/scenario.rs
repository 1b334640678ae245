//! Scenario-level behavior that spans the runner and the core pipeline.

use secwave_harness::config::ScenarioConfig;
use secwave_harness::runner::{run_scenario, Scheme};

fn base_cfg() -> ScenarioConfig {
    ScenarioConfig {
        num_draws: 6,
        epochs: 80,
        seed: 31,
        ..ScenarioConfig::default()
    }
}

#[test]
fn epsilon_extremes_bracket_the_secrecy_rate() {
    // At the loosest admissible target the rate collapses to the numerical
    // floor; at 0.4 the link still carries a usable secret rate.
    let degenerate = ScenarioConfig {
        epsilon_e: 0.5,
        delta: 1e-3,
        ..base_cfg()
    };
    let row = run_scenario(&degenerate, Scheme::Proposed, "epsilon_e", 0.5).unwrap();
    assert!(
        row.mean_secrecy_rate <= 1e-2,
        "degenerate rate {}",
        row.mean_secrecy_rate
    );

    let usable = ScenarioConfig {
        epsilon_e: 0.4,
        ..base_cfg()
    };
    let row = run_scenario(&usable, Scheme::Proposed, "epsilon_e", 0.4).unwrap();
    assert!(
        row.mean_secrecy_rate > 0.1,
        "usable rate {}",
        row.mean_secrecy_rate
    );
}

#[test]
fn proposed_rows_carry_the_anti_intercept_audit() {
    let cfg = base_cfg();
    let row = run_scenario(&cfg, Scheme::Proposed, "p_s", cfg.p_s_w).unwrap();
    assert!(row.anti_intercept_audit_pass);
    assert!(row.mean_ser_eve >= cfg.epsilon_e - cfg.delta);
}

#[test]
fn proposed_beats_mrt_below_the_binding_threshold() {
    // With a small cap the anti-intercept constraint stays slack, the
    // proposed scheme transmits at full power, and MRT's throttled
    // subcarriers cost it secrecy rate.
    let cfg = ScenarioConfig {
        p_s_w: 0.02,
        num_draws: 20,
        epochs: 120,
        seed: 5,
        ..ScenarioConfig::default()
    };
    let proposed = run_scenario(&cfg, Scheme::Proposed, "p_s", cfg.p_s_w).unwrap();
    let mrt = run_scenario(&cfg, Scheme::Mrt, "p_s", cfg.p_s_w).unwrap();
    assert!(
        proposed.mean_secrecy_rate > mrt.mean_secrecy_rate,
        "proposed {} vs mrt {}",
        proposed.mean_secrecy_rate,
        mrt.mean_secrecy_rate
    );
}

#[test]
fn standard_errors_shrink_with_draw_count() {
    // Quadrupling the draws should roughly halve the standard error; the
    // aggregation is scheme-agnostic, so the cheap baseline exercises it.
    let cfg100 = ScenarioConfig {
        num_draws: 100,
        ..base_cfg()
    };
    let cfg400 = ScenarioConfig {
        num_draws: 400,
        ..base_cfg()
    };
    let a = run_scenario(&cfg100, Scheme::Unencrypted, "p_s", cfg100.p_s_w).unwrap();
    let b = run_scenario(&cfg400, Scheme::Unencrypted, "p_s", cfg400.p_s_w).unwrap();
    let ratio = a.stderr_secrecy_rate / b.stderr_secrecy_rate;
    assert!(
        (ratio - 2.0).abs() / 2.0 <= 0.2,
        "stderr ratio {ratio} (expected ~2)"
    );
}

#[test]
fn amortized_mode_reuses_one_network() {
    use secwave_harness::config::TrainingMode;
    let cfg = ScenarioConfig {
        training_mode: TrainingMode::Amortized,
        num_draws: 4,
        epochs: 60,
        ..base_cfg()
    };
    let row = run_scenario(&cfg, Scheme::Proposed, "p_s", cfg.p_s_w).unwrap();
    assert_eq!(row.num_draws, 4);
    assert!(row.mean_secrecy_rate.is_finite());
}
