mod common;

use common::{vertex_enumeration, Lcg};
use maxinfer::lp::{solve, LpProblem, LpStatus, Sense};
use ndarray::Array2;

fn random_bounded_lp(rng: &mut Lcg, n: usize, m: usize) -> (LpProblem, Vec<Vec<f64>>, Vec<f64>) {
    let mut a = Array2::zeros((m, n));
    let mut rhs = Vec::new();
    let mut senses = Vec::new();
    for i in 0..m {
        let last = i + 1 == m;
        for j in 0..n {
            a[[i, j]] = if last { 1.0 } else { rng.uniform(-1.0, 1.0) };
        }
        if last {
            // keeps the region bounded
            rhs.push(rng.uniform(2.0, 5.0));
            senses.push(Sense::Le);
        } else if rng.next_f64() < 0.3 {
            rhs.push(rng.uniform(-1.0, 0.5));
            senses.push(Sense::Ge);
        } else {
            rhs.push(rng.uniform(-0.5, 2.0));
            senses.push(Sense::Le);
        }
    }
    let c: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    // oracle form: G x <= h including x >= 0
    let mut g = Vec::new();
    let mut h = Vec::new();
    for i in 0..m {
        let row: Vec<f64> = (0..n).map(|j| a[[i, j]]).collect();
        match senses[i] {
            Sense::Le => {
                g.push(row);
                h.push(rhs[i]);
            }
            Sense::Ge => {
                g.push(row.iter().map(|v| -v).collect());
                h.push(-rhs[i]);
            }
            Sense::Eq => unreachable!(),
        }
    }
    for j in 0..n {
        let mut row = vec![0.0; n];
        row[j] = -1.0;
        g.push(row);
        h.push(0.0);
    }
    (LpProblem::new(c, a, rhs, senses).unwrap(), g, h)
}

#[test]
fn random_lps_match_vertex_enumeration() {
    let mut rng = Lcg(99);
    let mut optimal = 0;
    let mut infeasible = 0;
    for _ in 0..300 {
        let (problem, g, h) = random_bounded_lp(&mut rng, 6, 6);
        let sol = solve(&problem, 10_000).unwrap();
        match vertex_enumeration(problem.objective(), &g, &h) {
            Some((best, _)) => {
                assert_eq!(sol.status, LpStatus::Optimal, "oracle found {best}");
                assert!(
                    (sol.objective_value - best).abs() < 1e-7,
                    "solver {} vs oracle {best}",
                    sol.objective_value
                );
                let bscale = 1.0 + problem.rhs().iter().fold(0.0f64, |m, v| m.max(v.abs()));
                assert!(sol.primal_residual <= 1e-8 * bscale);
                assert!(sol.dual_residual <= 1e-6);
                assert!(sol.duality_gap <= 1e-6 * (1.0 + sol.objective_value.abs()));
                optimal += 1;
            }
            None => {
                assert_eq!(sol.status, LpStatus::Infeasible);
                infeasible += 1;
            }
        }
    }
    assert!(optimal > 100, "only {optimal} optimal instances");
    eprintln!("{optimal} optimal, {infeasible} infeasible");
}

#[test]
fn solver_is_deterministic() {
    let mut rng = Lcg(5);
    let (problem, _, _) = random_bounded_lp(&mut rng, 6, 6);
    let a = solve(&problem, 1000).unwrap();
    let b = solve(&problem, 1000).unwrap();
    assert_eq!(a, b);
}
