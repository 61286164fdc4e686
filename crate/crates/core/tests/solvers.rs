use smw_core::linalg::{dense_eigenvalues, dense_lu_solve, spectral_radius};
use smw_core::problems::{
    cubic_spline_problem, demo4_problem, demo4_rank_one, linear_element_problem,
    mixed_formulation_problem, ProblemKind,
};
use smw_core::solvers::{
    block_gs_smw, block_jacobi_smw, esmw_iterate, gauss_seidel_iterate, gmres_solve, optimal_omega,
    smw_iterate,
};
use smw_core::splitting::{capacitance_radius, rank_one_eigenvalue};
use smw_core::{mtx, Criterion, NormKind, SolveOptions, Vector, C64};

fn inf_error(x: &Vector, y: &Vector) -> f64 {
    x.iter()
        .zip(y.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

#[test]
fn smw_agrees_with_dense_lu() {
    for p in [
        linear_element_problem(40).unwrap(),
        cubic_spline_problem(40).unwrap(),
        demo4_problem(),
    ] {
        let opts = SolveOptions::default().with_tol(1e-13);
        let r = smw_iterate(&p.splitting, &p.rhs, &opts).unwrap();
        assert!(r.converged, "{}", p.name);
        let direct = dense_lu_solve(&p.a.to_dense(), &p.rhs).unwrap();
        assert!(inf_error(&r.solution, &direct) < 1e-9, "{}", p.name);
        assert!(
            inf_error(&r.solution, &p.exact_solution) < 1e-9,
            "{}",
            p.name
        );
    }
}

#[test]
fn linear_counts_do_not_depend_on_n() {
    let opts = SolveOptions::default().with_criterion(Criterion::RelativeResidual, NormKind::Inf);
    let counts: Vec<(usize, usize)> = [100, 500, 2000, 7000]
        .into_iter()
        .map(|n| {
            let p = linear_element_problem(n).unwrap();
            let a = smw_iterate(&p.splitting, &p.rhs, &opts).unwrap();
            let b = esmw_iterate(&p.splitting, &p.rhs, &opts.clone().with_omega(1.2)).unwrap();
            (a.iterations, b.iterations)
        })
        .collect();
    assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
}

#[test]
fn linear_rho_is_independent_of_n() {
    let rho: Vec<f64> = [16, 64, 1024, 50_000]
        .into_iter()
        .map(|n| {
            linear_element_problem(n)
                .unwrap()
                .splitting
                .validate_nearly_m()
                .unwrap()
        })
        .collect();
    for r in &rho {
        assert!((r - rho[3]).abs() < 1e-6, "{rho:?}");
    }
}

#[test]
fn capacitance_radius_matches_dense_iteration_matrix() {
    for p in [linear_element_problem(24).unwrap(), demo4_problem()] {
        let fast = p.splitting.validate_nearly_m().unwrap();
        let dense =
            spectral_radius(&dense_eigenvalues(&p.splitting.iteration_matrix().unwrap()).unwrap());
        assert!(
            (fast - dense).abs() < 1e-10,
            "{}: {fast} vs {dense}",
            p.name
        );
    }
}

#[test]
fn published_linear_factors_still_give_a_contraction() {
    // the published U, V do not reproduce N, but V^T M^{-1} U is still small
    let p = linear_element_problem(16).unwrap();
    assert_eq!(p.published_factors_match, Some(false));
    let rho = capacitance_radius(p.splitting.m(), p.published_factors.as_ref().unwrap()).unwrap();
    assert!(rho < 1.0, "rho = {rho}");
}

#[test]
fn demo_rank_one_eigenvalue() {
    let p = demo4_problem();
    let lam = rank_one_eigenvalue(p.splitting.m(), &demo4_rank_one()).unwrap();
    assert!(lam.im.abs() < 1e-14);
    assert!(lam.re < 0.0 && lam.re > -1.0);
    let rho = p.splitting.validate_nearly_m().unwrap();
    assert!((rho - lam.norm()).abs() < 1e-12);
}

#[test]
fn optimal_omega_beats_plain_smw_on_demo() {
    // spectrum of M^{-1} A is {1 - lambda} with lambda in the spectrum of M^{-1} N
    let p = demo4_problem();
    let g = dense_eigenvalues(&p.splitting.iteration_matrix().unwrap()).unwrap();
    let shifted: Vec<f64> = g.iter().map(|l| 1.0 - l.re).collect();
    let lo = shifted.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = shifted.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w = optimal_omega(lo, hi).unwrap();
    let opts = SolveOptions::default().with_criterion(Criterion::Increment, NormKind::Inf);
    let plain = smw_iterate(&p.splitting, &p.rhs, &opts).unwrap();
    let best = esmw_iterate(&p.splitting, &p.rhs, &opts.with_omega(w)).unwrap();
    assert!(best.converged);
    assert!(
        best.iterations < plain.iterations,
        "{} vs {}",
        best.iterations,
        plain.iterations
    );
}

#[test]
fn gmres_residual_is_monotone_on_cubic() {
    let p = cubic_spline_problem(300).unwrap();
    let opts = SolveOptions::default().with_tol(1e-10).with_history();
    let r = gmres_solve(&p.a, &p.rhs, &opts).unwrap();
    assert!(r.converged);
    let h = r.metric_history.unwrap();
    assert!(h.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-10)));
    assert!(inf_error(&r.solution, &p.exact_solution) < 1e-6);
}

#[test]
fn complex_omega_is_accepted() {
    let p = linear_element_problem(50).unwrap();
    let opts = SolveOptions {
        omega: Some(C64::new(1.1, 0.05)),
        ..Default::default()
    };
    let r = esmw_iterate(&p.splitting, &p.rhs, &opts).unwrap();
    assert!(r.converged);
    assert!(inf_error(&r.solution, &p.exact_solution) < 1e-7);
}

#[test]
fn mixed_block_splittings_contract_but_iterations_do_not() {
    let p = mixed_formulation_problem(200).unwrap();
    let sys = &p.system;
    assert!(sys.s1.validate_nearly_m().unwrap() < 1.0);
    let opts = SolveOptions::default().with_criterion(Criterion::Increment, NormKind::Inf);
    assert!(block_jacobi_smw(sys, &opts).unwrap().diverged);
    assert!(block_gs_smw(sys, &opts).unwrap().diverged);
    assert!(
        gauss_seidel_iterate(&sys.assemble(), &sys.rhs(), &opts)
            .unwrap()
            .diverged
    );
    let gm = gmres_solve(&sys.assemble(), &sys.rhs(), &SolveOptions::default()).unwrap();
    assert!(gm.converged);
    assert!(inf_error(&gm.solution, &p.exact_solution) < 1e-5);
}

#[test]
fn problem_matrices_survive_matrix_market() {
    for kind in [ProblemKind::Linear, ProblemKind::Cubic, ProblemKind::Demo4] {
        let p = kind.build(30).unwrap();
        let text = mtx::to_matrix_market_string(&p.a);
        let back = mtx::read_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(back, p.a, "{kind}");
    }
}

#[test]
fn undersized_problems_are_rejected() {
    for kind in [ProblemKind::Linear, ProblemKind::Cubic] {
        assert!(kind.build(kind.min_n() - 1).is_err());
        assert!(kind.build(kind.min_n()).is_ok());
    }
    assert!(mixed_formulation_problem(4).is_err());
}
