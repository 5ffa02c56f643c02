//! Three-stage SSP Runge–Kutta and the adaptive step loop.

use super::{Solution, Solver, StageDiag};
use crate::error::{Error, Result};
use crate::models::Model;

/// Summary of one accepted time step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub step: usize,
    /// Time at the end of the step.
    pub t: f64,
    pub dt: f64,
    /// Minimum and maximum of the model's report fields over all DoFs.
    pub min: [f64; 2],
    pub max: [f64; 2],
    /// Elements with θ_K < 1 (largest over the stages).
    pub damped_elements: usize,
    /// Edges whose flux blend is below one.
    pub limited_edges: usize,
    /// Point contributions with a blend below one.
    pub limited_points: usize,
    pub weight_fallbacks: usize,
    pub resets: usize,
    /// Attempts rejected by the low-order step bound before acceptance.
    pub rejections: usize,
    /// Smallest admissible low-order step seen in the stages.
    pub cap: f64,
    /// Mass per component that left through the boundary during the step.
    pub outflow: Vec<f64>,
}

#[derive(Default)]
struct Tally {
    damped: usize,
    edges: usize,
    points: usize,
    fallbacks: usize,
    resets: usize,
    cap: f64,
    outflow: Vec<f64>,
    last: StageDiag,
}

impl Tally {
    fn add(&mut self, d: &StageDiag, w: f64) {
        self.outflow.resize(d.boundary_flux.len(), 0.0);
        for (o, f) in self.outflow.iter_mut().zip(&d.boundary_flux) {
            *o += w * f;
        }
        let below = |v: &[f64]| v.iter().filter(|&&x| x < 1.0).count();
        self.damped = self.damped.max(below(&d.theta));
        self.edges = self.edges.max(below(&d.eta_edge));
        self.points = self.points.max(below(&d.eta_point));
        self.fallbacks = self.fallbacks.max(d.weight_fallbacks);
        self.resets += d.resets;
        self.cap = self.cap.min(d.cap);
    }

    fn finish(mut self, d: StageDiag, w: f64) -> Self {
        self.add(&d, w);
        self.last = d;
        self
    }
}

const MAX_REJECTIONS: usize = 40;

impl<Mo: Model<M>, const M: usize> Solver<Mo, M> {
    fn ssprk3(&self, u: &Solution<M>, t: f64, dt: f64) -> Result<(Solution<M>, Tally)> {
        let mut tally = Tally { cap: f64::INFINITY, ..Default::default() };
        // Stage weights of the equivalent Butcher form: 1/6, 1/6, 2/3.
        let (u1, d) = self.forward_euler_step(u, t, dt)?;
        tally.add(&d, dt / 6.0);
        let (v, d) = self.forward_euler_step(&u1, t + dt, dt)?;
        tally.add(&d, dt / 6.0);
        let u2 = u.combine(0.75, &v, 0.25);
        let (v, d) = self.forward_euler_step(&u2, t + 0.5 * dt, dt)?;
        Ok((u.combine(1.0 / 3.0, &v, 2.0 / 3.0), tally.finish(d, 2.0 * dt / 3.0)))
    }

    /// One SSP-RK3 step of size `dt` from time `t`.
    pub fn ssprk3_step(&self, u: &Solution<M>, t: f64, dt: f64) -> Result<Solution<M>> {
        self.ssprk3(u, t, dt).map(|r| r.0)
    }

    /// Range of the report fields over all DoFs.
    pub fn field_range(&self, u: &Solution<M>) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in u.iter() {
            let f = self.model.report_fields(v);
            for c in 0..2 {
                lo[c] = lo[c].min(f[c]);
                hi[c] = hi[c].max(f[c]);
            }
        }
        (lo, hi)
    }

    /// Advances `u0` to `t_end`, calling `observer` after every accepted
    /// step with the report, the new state and the diagnostics of the
    /// last stage. The last step is shortened to land on `t_end`.
    pub fn run(
        &self,
        u0: Solution<M>,
        t_end: f64,
        mut observer: impl FnMut(&StepReport, &Solution<M>, &StageDiag),
    ) -> Result<(Solution<M>, Vec<StepReport>)> {
        self.check_state(&u0)?;
        let mut u = u0;
        let mut t = 0.0;
        let mut reports = Vec::new();
        let mut hint = f64::INFINITY;
        while t < t_end {
            let mut dt = self
                .compute_dt(&u)
                .map_err(|e| Error::Aborted { step: reports.len() + 1, t, source: Box::new(e) })?
                .min(hint);
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::InvalidState(format!("time step {dt} at t = {t}")));
            }
            if t + dt >= t_end * (1.0 - 1e-12) {
                dt = t_end - t;
            }
            let mut rejections = 0;
            let (next, tally) = loop {
                match self.ssprk3(&u, t, dt) {
                    Ok(r) => break r,
                    Err(Error::StepTooLarge { cap, .. }) if rejections < MAX_REJECTIONS => {
                        rejections += 1;
                        dt = 0.9 * cap;
                    }
                    Err(e) => return Err(Error::Aborted { step: reports.len() + 1, t, source: Box::new(e) }),
                }
            };
            t = if dt == t_end - t { t_end } else { t + dt };
            u = next;
            if tally.cap.is_finite() {
                hint = 0.95 * tally.cap;
            }
            let (min, max) = self.field_range(&u);
            let rep = StepReport {
                step: reports.len() + 1,
                t,
                dt,
                min,
                max,
                damped_elements: tally.damped,
                limited_edges: tally.edges,
                limited_points: tally.points,
                weight_fallbacks: tally.fallbacks,
                resets: tally.resets,
                rejections,
                cap: tally.cap,
                outflow: tally.outflow.clone(),
            };
            observer(&rep, &u, &tally.last);
            reports.push(rep);
        }
        Ok((u, reports))
    }
}
