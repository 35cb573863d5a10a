//! The interior-point kernel on its own: minimize a smooth convex objective
//! under nonlinear inequality constraints supplied as closures, with a
//! closed-form answer to check against.
//!
//! Minimizes x + y subject to x^2 + y^2 <= 2, whose optimum sits at
//! (-1, -1) with value -2.
//!
//! Run with `cargo run --example custom_kernel`.

use urc_offload::{
    find_strictly_feasible, kernel_solve, ClosureFn, ConvexSubproblem, Feasibility, KernelOptions,
    LinearFn,
};

fn main() {
    let disk = ClosureFn::new(
        2,
        |x: &[f64]| x[0] * x[0] + x[1] * x[1] - 2.0,
        |x: &[f64]| vec![2.0 * x[0], 2.0 * x[1]],
        |_: &[f64]| vec![2.0, 0.0, 0.0, 2.0],
    );
    let objective = LinearFn::new(vec![1.0, 1.0], 0.0);
    let problem = ConvexSubproblem::new(2, Box::new(objective), vec![Box::new(disk)]);

    let start = match find_strictly_feasible(&problem, &[1.9, 0.0], &KernelOptions::default()) {
        Ok(Feasibility::Feasible(x)) => x,
        other => panic!("phase one failed: {other:?}"),
    };
    println!("strictly feasible start: ({:.4}, {:.4})", start[0], start[1]);
    println!(
        "  disk constraint there: {:.4} (must be < 0)",
        start[0] * start[0] + start[1] * start[1] - 2.0
    );

    let solution = kernel_solve(&problem, &start, &KernelOptions::default()).unwrap();
    println!();
    println!(
        "optimum ({:.8}, {:.8}) with objective {:.8}",
        solution.x[0], solution.x[1], solution.objective
    );
    println!("closed form: (-1, -1) with objective -2");
    println!(
        "iterations {}, worst constraint violation {:.1e}",
        solution.diagnostics.iterations, solution.diagnostics.max_violation
    );
    let err = (solution.x[0] + 1.0).abs().max((solution.x[1] + 1.0).abs());
    println!("coordinate error {err:.1e}");
}
