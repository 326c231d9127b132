use super::*;
use crate::games::{builtin, game_polynomial, NonlocalGame};
use crate::relaxation::{build_npa, build_onesided, Constraint, SparseHermitian};

fn toy() -> SdpProblem<f64> {
    let mut a = SparseHermitian::new();
    a.push_real_part(0, 0, 0, 1.0);
    SdpProblem::new(vec![1], a.clone(), vec![Constraint { matrix: a, rhs: 1.0 }])
        .unwrap()
        .with_normalization(0)
        .unwrap()
}

fn min_eig(blocks: &[DMatrix<C<f64>>]) -> f64 {
    blocks
        .iter()
        .flat_map(|m| m.clone().symmetric_eigen().eigenvalues.iter().copied().collect::<Vec<_>>())
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn one_by_one_toy() {
    let opts = SolverOptions { gap_tol: 1e-10, feas_tol: 1e-10, max_iter: 200 };
    let s = solve(&toy(), &opts).unwrap();
    assert_eq!(s.status, SolveStatus::Optimal);
    assert!((s.primal[0][(0, 0)].re - 1.0).abs() < 1e-10);
    assert!(s.gap <= 1e-10, "{}", s.gap);
    assert!((s.dual_y[0] - 1.0).abs() < 1e-9);
    assert!(s.dual_slack[0][(0, 0)].norm() < 1e-9);
}

#[test]
fn chsh_npa_level_one_hits_tsirelson() {
    let gp = builtin("chsh").unwrap().target::<f64>().unwrap();
    let p = build_npa(&gp, 1).unwrap();
    let s = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(s.status, SolveStatus::Optimal);
    let t = (2.0 + 2f64.sqrt()) / 4.0;
    assert!((s.primal_obj - t).abs() < 1e-7, "{}", s.primal_obj);
    assert!((s.dual_obj - t).abs() < 1e-7);
    assert!(s.primal_residual <= 1e-8);
    assert!(min_eig(&s.dual_slack) >= -1e-7);
    assert!(min_eig(&s.primal) >= -1e-7);
}

#[test]
fn trivial_game_has_value_one() {
    let g = NonlocalGame::from_predicate("t", [2, 2, 2, 2], |_, _, _, _| true).unwrap();
    let gp = game_polynomial::<f64>(&g).unwrap();
    for p in [build_npa(&gp, 1).unwrap(), build_onesided(&gp, 1).unwrap()] {
        let s = solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.primal_obj - 1.0).abs() < 1e-8);
    }
}

#[test]
fn slack_is_the_dual_equation() {
    let gp = builtin("matching").unwrap().target::<f64>().unwrap();
    let p = build_onesided(&gp, 1).unwrap();
    let s = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(s.status, SolveStatus::Optimal);
    let z = p.dual_slack(&s.dual_y);
    for (a, b) in z.iter().zip(&s.dual_slack) {
        assert!((a - b).camax() <= 1e-12);
    }
    assert!((s.dual_obj - 6.0).abs() < 1e-6);
}

#[test]
fn runs_are_deterministic() {
    let gp = builtin("chsh").unwrap().target::<f64>().unwrap();
    let p = build_onesided(&gp, 2).unwrap();
    let a = solve(&p, &SolverOptions::default()).unwrap();
    let b = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(a.dual_y, b.dual_y);
    assert_eq!(a.primal, b.primal);
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn duplicate_rows_are_dropped() {
    let mut a = SparseHermitian::new();
    a.push_real_part(0, 0, 0, 1.0);
    let mut a2 = SparseHermitian::new();
    a2.push_real_part(0, 0, 0, 2.0);
    let p = SdpProblem::new(
        vec![1],
        a.clone(),
        vec![Constraint { matrix: a, rhs: 1.0 }, Constraint { matrix: a2.clone(), rhs: 2.0 }],
    )
    .unwrap();
    let s = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(s.dropped, vec![1]);
    assert_eq!(s.status, SolveStatus::Optimal);

    let p = SdpProblem::new(
        vec![1],
        SparseHermitian::new(),
        vec![
            Constraint { matrix: a2.clone(), rhs: 2.0 },
            Constraint { matrix: a2, rhs: 3.0 },
        ],
    )
    .unwrap();
    let s = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(s.status, SolveStatus::Infeasible);
}

#[test]
fn unbounded_primal_is_reported() {
    let mut c = SparseHermitian::new();
    c.push_real_part(0, 0, 0, 1.0);
    let mut a = SparseHermitian::new();
    a.push_real_part(0, 1, 1, 1.0);
    let p = SdpProblem::new(vec![2], c, vec![Constraint { matrix: a, rhs: 1.0 }]).unwrap();
    let s = solve(&p, &SolverOptions::default()).unwrap();
    assert_ne!(s.status, SolveStatus::Optimal);
}

#[test]
fn single_precision_solves_to_loose_tolerance() {
    let gp = builtin("chsh").unwrap().target::<f32>().unwrap();
    let p = build_npa(&gp, 1).unwrap();
    let opts = SolverOptions { gap_tol: 1e-3f32, feas_tol: 1e-3, max_iter: 100 };
    let s = solve(&p, &opts).unwrap();
    assert_eq!(s.status, SolveStatus::Optimal);
    assert!((s.primal_obj - 0.853_553_4).abs() < 5e-3);
}
