//! Eigensolvers, vacuum response and mode solves.

use zpinch::energy::{Form, ModeIndex, RandomSineField, TrialField};
use zpinch::equilibrium::{
    build_equilibrium, BuildOptions, EquilibriumState, GridSpec, PressureProfile,
};
use zpinch::spectrum::{
    assemble_operators, count_below, dense_spectrum, euler_lagrange_residual, mesh_with_axis,
    rayleigh_quotient, smallest_banded, smallest_dense, solve_mode, solve_on_mesh,
    solve_vacuum_fem, sweep_modes, vacuum_response, vacuum_response_with, SolveOptions, SolverKind,
};
use zpinch::Error;

fn build(profile: &PressureProfile, n: usize) -> EquilibriumState {
    build_equilibrium(profile, &GridSpec::graded(n), &BuildOptions::default()).unwrap()
}

fn uniform_current() -> PressureProfile {
    PressureProfile::uniform_current(2.0, 1.0, 5.0 / 3.0)
}

#[test]
fn dense_and_banded_solvers_agree() {
    let eq = build(&PressureProfile::power_law(1.0, 2.0, 1.5), 512);
    for (m, k) in [(0, 1), (0, 5), (1, 2), (-2, 3)] {
        let mesh = mesh_with_axis(&GridSpec::graded(48).nodes(eq.r0).unwrap());
        let ops = assemble_operators(&eq, ModeIndex::new(m, k), &mesh, Form::Completed).unwrap();
        let dense = smallest_dense(&ops.k, &ops.m, ops.boundary_dof()).unwrap();
        let banded = smallest_banded(&ops.k, &ops.m, ops.boundary_dof()).unwrap();
        let spectrum = dense_spectrum(&ops.k, &ops.m).unwrap();
        assert!(
            (dense.lambda - banded.lambda).abs() <= 1e-9 * dense.lambda.abs(),
            "({m}, {k}): {} vs {} vs {}",
            dense.lambda,
            banded.lambda,
            spectrum[0]
        );
        // The full spectrum comes straight from the transformed matrix.
        assert!((spectrum[0] - dense.lambda).abs() <= 1e-4 * dense.lambda.abs());
        // Inertia counts bracket the smallest eigenvalue.
        let gap = 1e-7 * dense.lambda.abs();
        assert_eq!(count_below(&ops.k, &ops.m, dense.lambda - gap), 0);
        assert_eq!(count_below(&ops.k, &ops.m, dense.lambda + gap), 1);
        assert!(
            count_below(
                &ops.k,
                &ops.m,
                spectrum[1] + 1e-3 * spectrum[1].abs().max(1.0)
            ) >= 2
        );
    }
}

#[test]
fn element_sums_match_matrix_quotient_on_uniform_meshes() {
    let eq = build(&uniform_current(), 512);
    for (m, k) in [(0, 2), (1, 1), (3, 4)] {
        let mode = ModeIndex::new(m, k);
        let mesh = mesh_with_axis(&GridSpec::uniform(64).nodes(eq.r0).unwrap());
        let ops = assemble_operators(&eq, mode, &mesh, Form::Completed).unwrap();
        let field = TrialField::interpolate(mode, mesh, &RandomSineField::new(7, 5, eq.r0, m != 0));
        let x = ops.coefficients(&field);
        let matrix = ops.k.bilinear(&x, &x) / ops.m.bilinear(&x, &x);
        let sums = rayleigh_quotient(&eq, &ops, &field).unwrap();
        assert!(
            (matrix - sums).abs() <= 1e-10 * sums.abs(),
            "({m}, {k}): {matrix} vs {sums}"
        );
    }
}

#[test]
fn minimum_bounds_every_trial_quotient() {
    let eq = build(&PressureProfile::power_law(1.0, 2.0, 1.5), 512);
    let mode = ModeIndex::new(0, 3);
    let mesh = mesh_with_axis(&GridSpec::graded(96).nodes(eq.r0).unwrap());
    let (ops, pair) = solve_on_mesh(&eq, mode, &mesh, Form::Completed, SolverKind::Auto).unwrap();
    for seed in 0..10 {
        let field = TrialField::interpolate(
            mode,
            mesh.clone(),
            &RandomSineField::new(seed, 6, eq.r0, false),
        );
        let q = rayleigh_quotient(&eq, &ops, &field).unwrap();
        assert!(
            q >= pair.lambda - 1e-9 * pair.lambda.abs(),
            "trial quotient {q} below minimum {}",
            pair.lambda
        );
    }
}

#[test]
fn refinement_lowers_the_eigenvalue() {
    // Graded grids are nested under doubling, so the discrete minimum is
    // monotone.
    let eq = build(&uniform_current(), 1024);
    let mode = ModeIndex::new(0, 2);
    let lambda = |n| {
        let mesh = mesh_with_axis(&GridSpec::graded(n).nodes(eq.r0).unwrap());
        solve_on_mesh(&eq, mode, &mesh, Form::Completed, SolverKind::Auto)
            .unwrap()
            .1
            .lambda
    };
    let values: Vec<f64> = [64, 128, 256, 512].into_iter().map(lambda).collect();
    for w in values.windows(2) {
        assert!(w[1] <= w[0] + 1e-12 * w[0].abs(), "{values:?}");
    }
}

#[test]
fn vacuum_k0_matches_euler_solution() {
    let (r0, rw) = (1.0, 2.0);
    for m in 1..=3 {
        let mf = f64::from(m);
        let resp = vacuum_response_with(ModeIndex::new(m, 0), r0, rw, 1.0, 8192).unwrap();
        // Q = A r^{m−1} + B r^{−m−1} with Q(1) = 1, Q(2) = 0.
        let b = 1.0 / (1.0 - rw.powf(-2.0 * mf));
        let a = 1.0 - b;
        let q = |r: f64| a * r.powf(mf - 1.0) + b * r.powf(-mf - 1.0);
        let exact_energy = -(a * mf - b * mf) / (mf * mf);
        assert!(
            (resp.unit_energy - exact_energy).abs() <= 1e-8 * exact_energy,
            "m = {m}"
        );
        for (&r, &v) in resp.mesh.iter().zip(&resp.q).step_by(512) {
            assert!(
                (v - q(r)).abs() <= 1e-6,
                "m = {m}, r = {r}: {v} vs {}",
                q(r)
            );
        }
        assert!(resp.c > 0.0);
    }
}

#[test]
fn vacuum_energy_converges_at_second_order() {
    let mode = ModeIndex::new(1, 3);
    let energies: Vec<f64> = [256, 512, 1024]
        .into_iter()
        .map(|n| solve_vacuum_fem(mode, 1.0, 2.0, n).unwrap().2)
        .collect();
    let ratio = (energies[0] - energies[1]) / (energies[1] - energies[2]);
    assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    assert!(matches!(
        solve_vacuum_fem(ModeIndex::new(0, 1), 1.0, 2.0, 64),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn closer_wall_stiffens_the_vacuum() {
    let mode = ModeIndex::new(2, 1);
    let near = vacuum_response_with(mode, 1.0, 1.2, 1.0, 4096).unwrap().c;
    let far = vacuum_response_with(mode, 1.0, 3.0, 1.0, 4096).unwrap().c;
    assert!(near > far);
}

#[test]
fn uniform_current_sausage_mode_converges() {
    let eq = build(&uniform_current(), 1024);
    let res = solve_mode(&eq, ModeIndex::new(0, 2), &SolveOptions::default()).unwrap();
    assert!(res.lambda < 0.0);
    assert!(res.last_change().unwrap() <= 1e-6 * res.lambda.abs());
    assert!((res.mu.unwrap() - (-res.lambda).sqrt()).abs() < 1e-15);
    assert!(res.eigen_residual < 1e-6, "{}", res.eigen_residual);
    let (el, bc) = euler_lagrange_residual(&eq, &res).unwrap();
    assert!((el - res.el_residual).abs() <= 1e-12 * el.max(1.0));
    assert!(bc <= 1e-6);
}

#[test]
fn sign_related_modes_share_eigenvalues() {
    let eq = build(&uniform_current(), 512);
    let options = SolveOptions::single(GridSpec::graded(256));
    let report = sweep_modes(&eq, -2..=2, -2..=2, &options);
    assert!(
        report.symmetry_violations.is_empty(),
        "{:?}",
        report.symmetry_violations
    );
    let (mode, mu) = report.sup_mu.unwrap();
    assert!(mu > 0.0);
    assert!(report.unstable().contains(&mode));
    // m = k = 0 is neutral.
    let neutral = report
        .entries
        .iter()
        .find(|e| e.mode == ModeIndex::new(0, 0))
        .unwrap();
    assert!(neutral.outcome.as_ref().unwrap().lambda.abs() < 1e-8);
}

#[test]
fn kink_is_unstable_and_m3_is_not_for_uniform_current() {
    let eq = build(&uniform_current(), 512);
    let options = SolveOptions::single(GridSpec::graded(512));
    for k in [1, 4] {
        assert!(
            solve_mode(&eq, ModeIndex::new(1, k), &options)
                .unwrap()
                .lambda
                < 0.0
        );
        assert!(
            solve_mode(&eq, ModeIndex::new(3, k), &options)
                .unwrap()
                .lambda
                >= -1e-8
        );
    }
}

#[test]
fn vacuum_response_uses_equilibrium_field() {
    let eq = build(&uniform_current(), 256);
    let mode = ModeIndex::new(1, 1);
    let resp = vacuum_response(&eq, mode).unwrap();
    assert!((resp.b_hat_r0 - 1.0).abs() < 1e-12);
    assert!((resp.interface_amplitude(0.5) - 0.5).abs() < 1e-12);
}
