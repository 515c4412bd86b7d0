//! Load-stepped Newton iteration on the assembled saddle-point system.

use faer::linalg::solvers::Solve;
use faer::Col;

use crate::assembly::{
    assemble, compatibility_residual, min_jacobian, AssemblyMode, BoundaryConditions, DofLayout,
    MixedState,
};
use crate::error::{Error, Result};
use crate::material::NeoHookeanParams;
use crate::mesh::SimplicialMesh2D;
use crate::quadrature::{quadrature, QuadratureRule};
use crate::sparse::TripletMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub load_steps: usize,
    /// Relative tolerance; the absolute Newton tolerance is `tol · (1 + ‖f_ext‖)`.
    pub tol: f64,
    pub max_newton_iters: usize,
    /// Maximum number of step halvings in the line search.
    pub max_halvings: usize,
    /// A trial step is accepted when its residual is below this multiple of
    /// the current one (1 demands strict decrease).
    pub residual_growth: f64,
    /// Maximum consecutive halvings of a load increment.
    pub max_cutbacks: usize,
    pub line_search: LineSearch,
    pub quadrature_degree: usize,
}

/// Acceptance test for a damped Newton step `x + s·Δx` (after `J > 0` holds).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineSearch {
    /// Free residual norm below `residual_growth` times the current one.
    Residual,
    /// Natural monotonicity: the simplified Newton correction at the trial
    /// point, computed with the current factorization, must satisfy
    /// `‖Δx̄‖ ≤ (1 − s/4)‖Δx‖`. Unlike the residual norm this test is
    /// invariant to the scaling of the equations, which differs by orders of
    /// magnitude between the stress-like and kinematic rows.
    Monotonicity,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            load_steps: 8,
            tol: 1e-9,
            max_newton_iters: 25,
            max_halvings: 20,
            residual_growth: 10.0,
            max_cutbacks: 8,
            line_search: LineSearch::Monotonicity,
            quadrature_degree: 4,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.load_steps == 0 || self.max_newton_iters == 0 {
            return Err(Error::InvalidArgument(
                "load_steps and max_newton_iters must be at least 1".into(),
            ));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.residual_growth >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "residual growth factor must be at least 1, got {}",
                self.residual_growth
            )));
        }
        quadrature(self.quadrature_degree).map(|_| ())
    }
}

/// One row of the convergence history: the state entering iteration `iter`
/// of load step `step` has residual `residual_norm` and functional `energy`;
/// `step_length` is the line-search factor then applied (0 once converged).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub step: usize,
    pub iter: usize,
    pub residual_norm: f64,
    pub step_length: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepSummary {
    pub step: usize,
    pub load_factor: f64,
    pub iterations: usize,
    pub residual_norm: f64,
    pub energy: f64,
    /// Largest elementwise compatibility measure at the end of the step.
    pub compatibility: f64,
    pub newton_tol: f64,
    /// Number of increment halvings needed to reach this step.
    pub cutbacks: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveReport {
    /// Iterations of accepted load steps only.
    pub history: Vec<IterationRecord>,
    pub steps: Vec<StepSummary>,
    /// Load increments abandoned and retried with half the size.
    pub rejected_attempts: usize,
}

impl SolveReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,iter,residual_norm,step_length,energy\n");
        for r in &self.history {
            s.push_str(&format!(
                "{},{},{:.15e},{:.15e},{:.15e}\n",
                r.step, r.iter, r.residual_norm, r.step_length, r.energy
            ));
        }
        s
    }

    /// Residual norms of one load step, in iteration order.
    pub fn residuals(&self, step: usize) -> Vec<f64> {
        self.history
            .iter()
            .filter(|r| r.step == step)
            .map(|r| r.residual_norm)
            .collect()
    }

    pub fn total_iterations(&self) -> usize {
        self.steps.iter().map(|s| s.iterations).sum()
    }
}

/// Everything that defines a discrete boundary value problem.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub mesh: &'a SimplicialMesh2D,
    pub layout: &'a DofLayout,
    pub params: &'a NeoHookeanParams,
    pub bcs: &'a BoundaryConditions,
}

/// Newton directions only need to be accurate to well below the contraction
/// rate; near-singular rotational θ modes can keep the refined LU residual
/// slightly above the `linear_solve` bound on fine meshes.
const NEWTON_LINEAR_TOL: f64 = 1e-8;

/// A full Newton step this small relative to the state means the residual has
/// reached its round-off floor, which for large bulk moduli can sit above
/// the absolute tolerance.
const NEGLIGIBLE_UPDATE: f64 = 1e-12;

/// Sparse LU factorization (partial pivoting) of a square matrix, kept for
/// repeated solves. Works for symmetric indefinite systems.
pub struct SparseLu<'a> {
    matrix: &'a TripletMatrix,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
}

impl<'a> SparseLu<'a> {
    pub fn new(matrix: &'a TripletMatrix) -> Result<Self> {
        if matrix.dim() == 0 {
            return Err(Error::LinearSolveFailure("empty system".into()));
        }
        let lu = matrix
            .to_csc()?
            .sp_lu()
            .map_err(|e| Error::LinearSolveFailure(format!("factorization failed: {e:?}")))?;
        Ok(Self { matrix, lu })
    }

    fn raw(&self, rhs: &[f64]) -> Vec<f64> {
        let col = Col::<f64>::from_fn(rhs.len(), |i| rhs[i]);
        let x = self.lu.solve(&col);
        (0..rhs.len()).map(|i| x[i]).collect()
    }

    /// Solves with up to three steps of iterative refinement and checks
    /// `‖K x − b‖ ≤ 1e−10 ‖b‖`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.solve_to(b, 1e-10)
    }

    /// As [`solve`](Self::solve) with a caller-chosen relative residual bound.
    pub fn solve_to(&self, b: &[f64], rel_tol: f64) -> Result<Vec<f64>> {
        let n = self.matrix.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: b.len(),
            });
        }
        let b_norm = norm(b);
        if b_norm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let residual = |x: &[f64]| -> Vec<f64> {
            let kx = self.matrix.matvec(x);
            b.iter().zip(&kx).map(|(bi, ki)| bi - ki).collect()
        };
        let mut x = self.raw(b);
        let mut r = residual(&x);
        for _ in 0..3 {
            if !(norm(&r) > 1e-14 * b_norm) {
                break;
            }
            let dx = self.raw(&r);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
            r = residual(&x);
        }
        let rel = norm(&r) / b_norm;
        if !x.iter().all(|v| v.is_finite()) || !rel.is_finite() {
            return Err(Error::LinearSolveFailure("matrix is numerically singular".into()));
        }
        if rel > rel_tol {
            return Err(Error::LinearSolveFailure(format!(
                "relative residual {rel:.3e} after refinement"
            )));
        }
        Ok(x)
    }
}

/// Solves `K x = b` by sparse LU; see [`SparseLu`].
pub fn linear_solve(k: &TripletMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            actual: b.len(),
        });
    }
    if k.dim() == 0 {
        return Ok(Vec::new());
    }
    SparseLu::new(k)?.solve(b)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Global residual at `state`, or `None` when some quadrature point has `J ≤ 0`.
fn admissible_residual(
    problem: &Problem,
    state: &MixedState,
    load_factor: f64,
    quad: &QuadratureRule,
) -> Result<Option<Vec<f64>>> {
    if min_jacobian(problem.mesh, problem.layout, state, quad)? <= 0.0 {
        return Ok(None);
    }
    let sys = assemble(
        problem.mesh,
        problem.layout,
        state,
        problem.params,
        problem.bcs,
        load_factor,
        quad,
        AssemblyMode::Residual,
    )?;
    Ok(Some(sys.residual))
}

fn free_norm(v: &[f64], mask: &[bool]) -> f64 {
    v.iter()
        .zip(mask)
        .filter(|(_, &d)| !d)
        .map(|(x, _)| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Incremental-load Newton solve starting from `initial` (usually the identity).
///
/// Dirichlet and Neumann data are scaled by the load factor, which advances in
/// `load_steps` equal increments. A failed increment is retried from the last
/// converged state with half the size, at most `max_cutbacks` times in a row;
/// after a success the increment grows back towards the nominal size.
///
/// Each Newton iteration moves the Dirichlet DoFs towards their current
/// targets and solves the reduced system for the rest. The line search halves
/// the step until every quadrature point has `J > 0` and the [`LineSearch`]
/// test passes; failing that, the admissible trial with the best measure is
/// taken. A step converges when the free residual drops below
/// `tol · (1 + ‖f_ext‖)`, or when a full Newton update was negligible
/// relative to the state (round-off floor).
pub fn solve(
    problem: &Problem,
    config: &SolverConfig,
    initial: MixedState,
) -> Result<(MixedState, SolveReport)> {
    config.validate()?;
    let quad = quadrature(config.quadrature_degree)?;
    let (mesh, layout) = (problem.mesh, problem.layout);
    initial.check_len(layout)?;
    let ctx = Context {
        problem,
        config,
        quad: &quad,
        mask: problem.bcs.dirichlet_mask(layout),
        load_norm: norm(&problem.bcs.external_load(mesh, layout)),
    };
    let mut state = initial;
    let mut report = SolveReport::default();
    let nominal = 1.0 / config.load_steps as f64;
    let mut increment = nominal;
    let mut alpha = 0.0;
    let mut cutbacks = 0;
    while alpha < 1.0 {
        let step = report.steps.len() + 1;
        // Snap to 1 when within round-off of the end.
        let target = if alpha + increment > 1.0 - 1e-12 { 1.0 } else { alpha + increment };
        let mut trial = state.clone();
        let mut history = Vec::new();
        match ctx.newton(&mut trial, target, step, &mut history) {
            Ok((iterations, residual_norm, energy)) => {
                let compatibility = compatibility_residual(mesh, layout, &trial, &quad)?
                    .iter()
                    .map(|c| c.max_component())
                    .fold(0.0, f64::max);
                report.history.append(&mut history);
                report.steps.push(StepSummary {
                    step,
                    load_factor: target,
                    iterations,
                    residual_norm,
                    energy,
                    compatibility,
                    newton_tol: ctx.newton_tol(),
                    cutbacks,
                });
                state = trial;
                alpha = target;
                cutbacks = 0;
                increment = (2.0 * increment).min(nominal);
            }
            Err(e) if e.is_recoverable() && cutbacks < config.max_cutbacks => {
                report.rejected_attempts += 1;
                cutbacks += 1;
                increment *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    Ok((state, report))
}

struct Context<'a> {
    problem: &'a Problem<'a>,
    config: &'a SolverConfig,
    quad: &'a QuadratureRule,
    mask: Vec<bool>,
    load_norm: f64,
}

impl Context<'_> {
    fn newton_tol(&self) -> f64 {
        self.config.tol * (1.0 + self.load_norm)
    }

    /// Newton iteration at fixed load factor. Returns the iteration count,
    /// final residual and functional value.
    fn newton(
        &self,
        state: &mut MixedState,
        alpha: f64,
        step: usize,
        history: &mut Vec<IterationRecord>,
    ) -> Result<(usize, f64, f64)> {
        let (problem, config) = (self.problem, self.config);
        let (mesh, layout) = (problem.mesh, problem.layout);
        let newton_tol = self.newton_tol();
        let mut last = f64::NAN;
        let mut negligible_update = false;
        for iter in 0..config.max_newton_iters {
            let sys = assemble(
                mesh,
                layout,
                state,
                problem.params,
                problem.bcs,
                alpha,
                self.quad,
                AssemblyMode::Full,
            )?;
            let r_norm = sys.free_residual_norm(&self.mask);
            last = r_norm;
            if !r_norm.is_finite() {
                break;
            }
            let mut increment = vec![0.0; layout.len()];
            let mut gap = false;
            for d in &problem.bcs.dirichlet {
                let delta = d.target(alpha) - state.values[d.dof];
                increment[d.dof] = delta;
                gap |= delta != 0.0;
            }
            let mut record = IterationRecord {
                step,
                iter,
                residual_norm: r_norm,
                step_length: 0.0,
                energy: sys.value,
            };
            if !gap && (r_norm <= newton_tol || negligible_update) {
                history.push(record);
                return Ok((iter, r_norm, sys.value));
            }

            let reduced = sys.reduce(&self.mask, &increment)?;
            let lu = SparseLu::new(&reduced.tangent)?;
            let dx = lu.solve_to(&reduced.rhs, NEWTON_LINEAR_TOL)?;
            for (&g, v) in reduced.free.iter().zip(&dx) {
                increment[g] = *v;
            }
            let dx_norm = norm(&dx);
            let x_max = state.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let dx_max = increment.iter().fold(0.0f64, |m, v| m.max(v.abs()));

            let mut trial = state.clone();
            let mut best: Option<(f64, f64)> = None;
            let mut accepted = None;
            let mut s = 1.0;
            for _ in 0..=config.max_halvings {
                for (t, (x, dx)) in trial.values.iter_mut().zip(state.values.iter().zip(&increment)) {
                    *t = x + s * dx;
                }
                if s == 1.0 {
                    problem.bcs.apply_dirichlet(&mut trial, alpha);
                }
                if let Some(r) = admissible_residual(problem, &trial, alpha, self.quad)? {
                    // Smaller is better for both measures.
                    let (measure, threshold) = match config.line_search {
                        LineSearch::Residual => {
                            (free_norm(&r, &self.mask), config.residual_growth * r_norm)
                        }
                        LineSearch::Monotonicity => {
                            // Simplified Newton correction with the frozen
                            // factorization; the unapplied Dirichlet remainder
                            // stays on the right-hand side.
                            let mut rhs: Vec<f64> = reduced.free.iter().map(|&g| -r[g]).collect();
                            if gap && s < 1.0 {
                                let rest: Vec<f64> =
                                    increment.iter().map(|d| (1.0 - s) * d).collect();
                                let coupling = sys.reduce(&self.mask, &rest)?;
                                for ((out, c), g) in rhs.iter_mut().zip(&coupling.rhs).zip(&reduced.free) {
                                    *out += c + sys.residual[*g];
                                }
                            }
                            match lu.solve_to(&rhs, NEWTON_LINEAR_TOL) {
                                Ok(bar) => (norm(&bar), (1.0 - 0.25 * s) * dx_norm),
                                Err(_) => (f64::INFINITY, 0.0),
                            }
                        }
                    };
                    if measure < threshold || (gap && config.line_search == LineSearch::Residual) {
                        accepted = Some(s);
                        break;
                    }
                    if measure.is_finite() && best.is_none_or(|(_, b)| measure < b) {
                        best = Some((s, measure));
                    }
                }
                s *= 0.5;
            }
            let s = accepted
                .or(best.map(|(s, _)| s))
                .ok_or(Error::LineSearchExhausted { step, iteration: iter })?;
            for (x, dx) in state.values.iter_mut().zip(&increment) {
                *x += s * dx;
            }
            if s == 1.0 {
                problem.bcs.apply_dirichlet(state, alpha);
            }
            record.step_length = s;
            history.push(record);
            negligible_update = s == 1.0 && dx_max <= NEGLIGIBLE_UPDATE * x_max;
        }
        Err(Error::NoConvergence {
            step,
            iterations: config.max_newton_iters,
            residual: last,
        })
    }
}
