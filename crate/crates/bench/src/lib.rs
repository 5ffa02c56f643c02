//! Fixtures shared by the benchmarks.

use pampa::io::{build_mesh, builtin, sample_initial_condition, Problem, ProblemDef, RunConfig};
use pampa::{Euler, Model, ScalarModel, Solution, Solver, SolverOptions};

/// A solver for a built-in problem on a generated mesh of size `h`, with
/// its sampled initial state.
pub fn fixture<Mo: Model<M>, const M: usize>(id: &str, def: ProblemDef<Mo, M>, h: f64, opts: SolverOptions) -> (Solver<Mo, M>, Solution<M>) {
    let mut cfg = RunConfig::for_problem(id);
    cfg.mesh.h = Some(h);
    let mesh = build_mesh(&cfg, &def.geometry).expect("mesh");
    let s = Solver::new(def.model.clone(), def.domain.clone(), mesh, &def.bc, opts).expect("solver");
    let u = sample_initial_condition(&s, &*def.initial).expect("initial state");
    (s, u)
}

pub fn scalar(id: &str, h: f64, opts: SolverOptions) -> (Solver<ScalarModel, 1>, Solution<1>) {
    match builtin(id, 1.4).expect("known problem") {
        Problem::Scalar(d) => fixture(id, d, h, opts),
        Problem::Euler(_) => panic!("{id} is not scalar"),
    }
}

pub fn euler(id: &str, h: f64, opts: SolverOptions) -> (Solver<Euler, 4>, Solution<4>) {
    match builtin(id, 1.4).expect("known problem") {
        Problem::Euler(d) => fixture(id, d, h, opts),
        Problem::Scalar(_) => panic!("{id} is not Euler"),
    }
}
