//! The dense LP solver on a small diet-style problem.
use maxinfer::lp::{solve, LpProblem, Sense};
use ndarray::array;

fn main() -> maxinfer::error::Result<()> {
    // min 2x + 3y + z  s.t.  x + y >= 2,  y + z >= 3,  x + z = 2.5
    let problem = LpProblem::new(
        vec![2.0, 3.0, 1.0],
        array![[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 1.0]],
        vec![2.0, 3.0, 2.5],
        vec![Sense::Ge, Sense::Ge, Sense::Eq],
    )?;
    let sol = solve(&problem, 1000)?;
    println!("status {:?}, objective {:.4}", sol.status, sol.objective_value);
    println!("x = {:?}", sol.x);
    println!("duals = {:?}", sol.duals);
    println!("gap {:.2e}, primal residual {:.2e}, {} iterations", sol.duality_gap, sol.primal_residual, sol.iterations);
    print!("{}", problem.to_text());
    Ok(())
}
