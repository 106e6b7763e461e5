use crate::error::{check_len, check_positive, Result};
use crate::target::Target;

/// Settings of the proximal ascent `x ← prox^t_g(x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapParams {
    /// Initial step `t`; halved whenever an iterate would lower the objective.
    pub step: f64,
    pub max_iters: usize,
    /// Stop once `|Δg| / max(|g|, 1)` drops below this.
    pub rel_tol: f64,
}

impl Default for MapParams {
    fn default() -> Self {
        Self {
            step: 1.0,
            max_iters: 5_000,
            rel_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MapResult {
    pub x: Vec<f64>,
    /// Objective after each accepted iterate, starting with the initial point.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// MAP estimate by repeated application of the target's prox.
///
/// For a composite target the prox is forward-backward, so this is proximal
/// gradient ascent; for an exact prox it is the proximal point method. Steps
/// that would decrease the objective are rejected and the step halved, so the
/// objective trace is non-decreasing.
pub fn map_estimate<T: Target + ?Sized>(
    target: &T,
    init: &[f64],
    params: &MapParams,
) -> Result<MapResult> {
    check_positive("step", params.step)?;
    check_len(target.dim(), init.len())?;
    let mut x = init.to_vec();
    let mut obj = target.log_density(&x);
    let mut trace = vec![obj];
    let mut step = params.step;
    let mut warm: Option<Vec<f64>> = None;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < params.max_iters {
        iterations += 1;
        let out = target.prox(&x, step, warm.as_deref())?;
        let cand = target.log_density(&out.point);
        if !(cand >= obj) {
            step *= 0.5;
            if step < params.step * 1e-12 {
                break;
            }
            continue;
        }
        let change = (cand - obj).abs() / obj.abs().max(1.0);
        x = out.point;
        obj = cand;
        trace.push(obj);
        if out.warm.is_some() {
            warm = out.warm;
        }
        if change < params.rel_tol {
            converged = true;
            break;
        }
    }
    Ok(MapResult {
        x,
        objective_trace: trace,
        iterations,
        converged,
    })
}
