//! Equilibrium construction, pointwise criteria and admissibility.

use zpinch::equilibrium::{
    build_equilibrium, check_admissibility, interchange_criterion_scan, sausage_criterion_scan,
    taylor_axis_coefficients, BuildOptions, EquilibriumState, GridSpec, PressureProfile, Verdict,
};
use zpinch::Error;

fn build(profile: &PressureProfile, n: usize) -> EquilibriumState {
    build_equilibrium(profile, &GridSpec::graded(n), &BuildOptions::default()).unwrap()
}

#[test]
fn uniform_current_matches_closed_form() {
    let j0 = 3.0;
    let eq = build(&PressureProfile::uniform_current(j0, 1.0, 5.0 / 3.0), 256);
    for (i, &r) in eq.grid.iter().enumerate() {
        assert!((eq.b[i] - 0.5 * j0 * r).abs() < 1e-12, "B at r = {r}");
        assert!(
            (eq.p[i] - 0.25 * j0 * j0 * (1.0 - r * r)).abs() < 1e-12,
            "p at r = {r}"
        );
        assert!((eq.jz[i] - j0).abs() < 1e-9, "J_z at r = {r}");
    }
    // The vacuum field continues B_θ r₀ / r.
    assert!((eq.b_hat(1.5) - 0.5 * j0 / 1.5).abs() < 1e-12);
    assert!(eq.interface_pressure_jump().abs() < 1e-12);
}

#[test]
fn continuous_evaluation_agrees_with_nodes() {
    let eq = build(&PressureProfile::power_law(1.0, 2.0, 1.5), 512);
    for i in (0..eq.len()).step_by(37) {
        let pt = eq.at(eq.grid[i]);
        assert!((pt.p - eq.p[i]).abs() < 1e-12);
        assert!((pt.b2 - eq.b[i] * eq.b[i]).abs() < 1e-10);
    }
}

#[test]
fn force_balance_holds_for_closed_form_profiles() {
    let profiles = [
        PressureProfile::uniform_current(2.0, 1.0, 5.0 / 3.0),
        PressureProfile::power_law(1.0, 1.5, 5.0 / 3.0),
        PressureProfile::power_law(0.3, 3.0, 2.0),
        PressureProfile::exponential(1.0, 1.0, 5.0 / 3.0),
        PressureProfile::polynomial(vec![1.0, 0.0, -1.5, 0.5], 1.4),
        PressureProfile::plateau(1.0, 0.3, 0.8, 5.0 / 3.0),
    ];
    for profile in &profiles {
        let eq = build(profile, 512);
        let residual = eq.force_balance_residual();
        assert!(
            residual <= 1e-8,
            "{:?}: force balance residual {residual:.2e}",
            profile.kind
        );
    }
}

#[test]
fn nodal_force_balance_converges() {
    // A polynomial profile is balanced to rounding at every resolution; a
    // non-polynomial one shows the second-order difference error.
    let worst = |profile: &PressureProfile, n| {
        build(profile, n)
            .nodal_force_balance_residuals()
            .iter()
            .fold(0.0f64, |m, &(_, v)| m.max(v.abs()))
    };
    let polynomial = PressureProfile::polynomial(vec![1.0, 0.0, -1.5, 0.5], 5.0 / 3.0);
    assert!(worst(&polynomial, 64) <= 1e-9);
    let power = PressureProfile::power_law(1.0, 2.0, 1.5);
    let (coarse, fine) = (worst(&power, 64), worst(&power, 256));
    assert!(
        fine < coarse / 8.0,
        "nodal residual {coarse:.2e} -> {fine:.2e}"
    );
}

#[test]
fn axis_expansion_matches_current_density() {
    // p = 1 − 1.5 r² + 0.5 r³ has J_z′(0) ≠ 0.
    let eq = build(
        &PressureProfile::polynomial(vec![1.0, 0.0, -1.5, 0.5], 5.0 / 3.0),
        2048,
    );
    let ax = taylor_axis_coefficients(&eq).unwrap();
    // p′ = −3r + 1.5r² = −(J₀²/2) r − (5/6) J₀ J₁ r² gives J₀ = √6.
    assert!((ax.jz0 - 6f64.sqrt()).abs() < 1e-6);
    assert!((ax.dp_coefficients.1 - 1.5).abs() < 1e-4);
    assert!((ax.measured_b.0 - ax.b_coefficients.0).abs() < 1e-4);
    assert!((ax.measured_b.1 - ax.b_coefficients.1).abs() < 1e-4);
    assert!((ax.measured_dp.0 - ax.dp_coefficients.0).abs() < 1e-4);
    assert!((ax.measured_dp.1 - ax.dp_coefficients.1).abs() < 1e-4);
}

#[test]
fn sausage_criterion_finds_witness() {
    for profile in [
        PressureProfile::uniform_current(2.0, 1.0, 5.0 / 3.0),
        PressureProfile::power_law(1.0, 2.0, 3.0),
    ] {
        let report = sausage_criterion_scan(&build(&profile, 512)).unwrap();
        assert_eq!(report.verdict, Verdict::UnstableWitnessFound);
        assert!(report.witness_r.is_some());
    }
}

#[test]
fn interchange_sign_pattern_for_uniform_current() {
    let eq = build(&PressureProfile::uniform_current(2.0, 1.0, 5.0 / 3.0), 512);
    for m in 1..=5 {
        let report = interchange_criterion_scan(&eq, m).unwrap();
        for (&r, &v) in report.radii.iter().zip(&report.scan) {
            assert!((v - r * f64::from(m * m - 4)).abs() < 1e-10);
        }
        let expected = if m == 1 {
            Verdict::UnstableWitnessFound
        } else {
            Verdict::CriterionNonnegative
        };
        assert_eq!(report.verdict, expected, "m = {m}");
    }
    assert!(matches!(
        interchange_criterion_scan(&eq, 0),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn zero_pressure_is_inconclusive() {
    let eq = build(&PressureProfile::zero(5.0 / 3.0), 64);
    assert!(eq.b.iter().all(|&b| b == 0.0));
    assert_eq!(
        interchange_criterion_scan(&eq, 1).unwrap().verdict,
        Verdict::Inconclusive
    );
}

#[test]
fn admissibility_classification() {
    let admissible = PressureProfile::power_law(1.0, 2.0, 1.5);
    let report = check_admissibility(&admissible, &build(&admissible, 512));
    assert!(report.admissible, "{:?}", report.failures());
    let order = report.measured_order.unwrap();
    assert!(
        (order - 2.0).abs() < 0.05,
        "measured boundary order {order}"
    );

    let plateau = PressureProfile::plateau(1.0, 0.3, 0.8, 5.0 / 3.0);
    let report = check_admissibility(&plateau, &build(&plateau, 512));
    assert!(!report.admissible);
    assert!(report
        .failures()
        .iter()
        .any(|f| f.contains("vanishes inside")));

    let strict = BuildOptions {
        strict_admissibility: true,
        ..Default::default()
    };
    assert!(matches!(
        build_equilibrium(&plateau, &GridSpec::graded(512), &strict),
        Err(Error::AdmissibilityViolation(_))
    ));
}

#[test]
fn invalid_inputs_are_rejected() {
    let good = PressureProfile::uniform_current(2.0, 1.0, 5.0 / 3.0);
    let bad_gamma = PressureProfile::uniform_current(2.0, 1.0, 1.0);
    assert!(matches!(
        build_equilibrium(&bad_gamma, &GridSpec::graded(64), &BuildOptions::default()),
        Err(Error::InvalidInput(_))
    ));
    assert!(build_equilibrium(&good, &GridSpec::graded(4), &BuildOptions::default()).is_err());
    let inside_wall = BuildOptions {
        rw: Some(0.5),
        ..Default::default()
    };
    assert!(build_equilibrium(&good, &GridSpec::graded(64), &inside_wall).is_err());
}
