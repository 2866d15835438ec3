//! Property tests for the splitting invariants on random quadratic instances.

use aadr::problems::{make_quadratic, QuadraticConsensusSpec, QuadraticOracle};
use aadr::splitting::{
    admm_step, admm_to_dr, combined_residual_dr, dr_step, merit_dre, merit_dre_oracle, merit_drp,
    normalize_residual, residuals_admm, AdmmState,
};
use aadr::{aadr_solve, MeritKind, Problem, SolverConfig, Termination, Vector};
use proptest::prelude::*;

fn vector(n: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-5.0..5.0f64, n).prop_map(Vector::from_vec)
}

/// Random consensus quadratic of dimension 1 to 6 with `beta = ratio * cf`.
fn quadratic_with(ratio: std::ops::Range<f64>) -> impl Strategy<Value = QuadraticOracle> {
    (1usize..=6)
        .prop_flat_map(move |n| {
            (
                vector(n),
                vector(n),
                0.1..10.0f64,
                0.1..10.0f64,
                ratio.clone(),
            )
        })
        .prop_map(|(a, b, cf, cg, ratio)| {
            make_quadratic(&QuadraticConsensusSpec {
                target_a: a,
                target_b: b,
                curvature_f: cf,
                curvature_g: cg,
                beta: ratio * cf,
            })
            .unwrap()
        })
}

fn quadratic() -> impl Strategy<Value = QuadraticOracle> {
    quadratic_with(0.1..10.0)
}

fn with_point() -> impl Strategy<Value = (QuadraticOracle, Vector)> {
    quadratic().prop_flat_map(|o| {
        let n = o.problem.dims().constraints;
        (Just(o), vector(n))
    })
}

fn with_state() -> impl Strategy<Value = (QuadraticOracle, AdmmState)> {
    state_for(quadratic())
}

fn state_for(
    problems: impl Strategy<Value = QuadraticOracle>,
) -> impl Strategy<Value = (QuadraticOracle, AdmmState)> {
    problems.prop_flat_map(|o| {
        let n = o.problem.dims().constraints;
        (Just(o), vector(n), vector(n), vector(n))
            .prop_map(|(o, x, y, z)| (o, AdmmState::new(x, y, z)))
    })
}

fn config(merit: MeritKind) -> SolverConfig {
    SolverConfig {
        merit,
        epsilon: 1e-10,
        k_max: 500,
        record_iterates: true,
        ..SolverConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// After one warm-up step, `A x_{k+1} - y_{k+1}` is the k-th DR iterate.
    #[test]
    fn dr_tracks_admm((o, start) in with_state()) {
        let p = &o.problem;
        let mut admm = admm_step(&start, p).unwrap();
        let (mut s, _, _) = admm_to_dr(&admm, p);
        for _ in 0..30 {
            let st = dr_step(&s, p).unwrap();
            let next = admm_step(&admm, p).unwrap();
            s = st.next();
            let (s_admm, _, _) = admm_to_dr(&next, p);
            prop_assert!((&s_admm - &s).amax() <= 1e-10 * s.amax().max(1.0));
            admm = next;
        }
    }

    #[test]
    fn dr_combined_residual_matches_admm((o, start) in with_state(), scale in 0.1..10.0f64) {
        let p = &o.problem;
        let curr = admm_step(&start, p).unwrap();
        let next = admm_step(&curr, p).unwrap();
        let (s, _, _) = admm_to_dr(&curr, p);
        let (rc, r) = combined_residual_dr(&dr_step(&s, p).unwrap(), p, scale).unwrap();
        let report = residuals_admm(&curr, &next, p, scale);
        prop_assert!((rc - report.combined).abs() <= 1e-9 * report.combined.max(1.0));
        prop_assert!((r - report.normalized).abs() <= 1e-9 * report.normalized.max(1.0));
    }

    #[test]
    fn normalized_residual_scaling(rc in 0.0..1e6f64, rows in 1usize..10_000, scale in 1e-3..1e3f64) {
        let r = normalize_residual(rc, rows, scale);
        prop_assert!((r * r * rows as f64 * scale * scale - rc).abs() <= 1e-12 * rc.max(1.0));
    }

    #[test]
    fn dre_matches_oracle((o, s) in with_point()) {
        let p = &o.problem;
        let st = dr_step(&s, p).unwrap();
        let a = merit_dre(&st, p);
        let b = merit_dre_oracle(&st, p).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn merits_at_fixed_point(o in quadratic()) {
        let p = &o.problem;
        let st = dr_step(&o.s_star, p).unwrap();
        let scale = o.s_star.amax().max(1.0);
        prop_assert!(merit_drp(&st) <= 1e-12 * scale);
        let fg = p.eval_f(&st.x_bar) + p.eval_g(&st.z_bar);
        prop_assert!((merit_dre(&st, p) - fg).abs() <= 1e-9 * fg.abs().max(1.0));
    }

    /// With `gamma = 1 / beta` below `1 / cf` every accepted step lowers the
    /// envelope, plain fallbacks included.
    #[test]
    fn dre_accepted_merits_decrease((o, start) in state_for(quadratic_with(2.0..20.0))) {
        let mut p = o.problem.clone();
        let out = aadr_solve(&mut p, &config(MeritKind::DrEnvelope), &start).unwrap();
        let merits = out.trace.accepted_merits();
        for w in merits.windows(2) {
            prop_assert!(w[1] <= w[0], "merit rose from {} to {}", w[0], w[1]);
        }
    }

    /// Converged solutions are primal feasible and stationary.
    #[test]
    fn solution_is_stationary((o, start) in with_state(), drp in any::<bool>()) {
        let merit = if drp { MeritKind::PrimalResidualNorm } else { MeritKind::DrEnvelope };
        let cfg = SolverConfig {
            termination: Termination::NormalizedCombinedResidual,
            ..config(merit)
        };
        let mut p = o.problem.clone();
        let out = aadr_solve(&mut p, &cfg, &start).unwrap();
        prop_assert!(out.converged);
        let rows = p.dims().constraints as f64;
        let gap = (p.apply_a(&out.x) - p.apply_b_shifted(&out.z)).norm();
        prop_assert!(gap <= 10.0 * cfg.epsilon * cfg.norm_scale * rows.sqrt(), "gap {gap}");
        let stat = p.grad_f(&out.x).unwrap() + p.apply_at(&out.y).unwrap() * p.beta();
        prop_assert!(stat.norm() <= 1e-6, "stationarity {}", stat.norm());
        prop_assert!((&out.x - &o.stationary.x).amax() <= 1e-6);
    }

    /// A rejected candidate is always followed by the plain DR image of the
    /// last accepted iterate.
    #[test]
    fn rejection_falls_back_to_dr_image((o, start) in with_state(), drp in any::<bool>()) {
        let merit = if drp { MeritKind::PrimalResidualNorm } else { MeritKind::DrEnvelope };
        let mut p = o.problem.clone();
        let out = aadr_solve(&mut p, &config(merit), &start).unwrap();
        let recs = &out.trace.records;
        let mut last = None;
        for (i, rec) in recs.iter().enumerate() {
            if rec.accepted {
                last = rec.iterate.clone();
                continue;
            }
            if let Some(next) = recs.get(i + 1) {
                let expected = dr_step(last.as_ref().unwrap(), &p).unwrap().next();
                prop_assert_eq!(next.iterate.as_ref(), Some(&expected));
            }
        }
    }
}
