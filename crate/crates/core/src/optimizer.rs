//! Derivative-free local optimizer with COBYLA's stepping contract.
//!
//! This is a linear-approximation trust-region method over a simplex of
//! n+1 interpolation points: the first evaluations are `x0` followed by
//! `x0 + rhobeg * e_i`, steps have length `rho`, and `rho` shrinks from
//! `rhobeg` toward `rhoend` when progress stalls. It is deterministic
//! given the starting point and objective. The constraint machinery of
//! full COBYLA is intentionally absent; only the unconstrained path the
//! experiments use is implemented.

use crate::{Error, Result};

/// Trust-region radii (radians for the circuit use case) and the
/// evaluation budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Initial trust-region radius; also the initial simplex spacing.
    pub rhobeg: f64,
    /// Final radius; the run terminates once the radius falls below it.
    pub rhoend: f64,
    /// Hard cap on objective evaluations.
    pub max_evals: usize,
}

impl OptimizerConfig {
    pub fn new(rhobeg: f64, max_evals: usize) -> Self {
        Self { rhobeg, rhoend: 1e-4, max_evals }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rhoend > 0.0 && self.rhoend <= self.rhobeg) {
            return Err(Error::InvalidOptimizerConfig {
                reason: format!("need 0 < rhoend <= rhobeg, got {} / {}", self.rhoend, self.rhobeg),
            });
        }
        if self.max_evals < 1 {
            return Err(Error::InvalidOptimizerConfig { reason: "max_evals must be >= 1".into() });
        }
        Ok(())
    }
}

/// Outcome of one optimization run with the full per-evaluation trace.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    pub trace: Vec<(Vec<f64>, f64)>,
}

const SHRINK_FACTOR: f64 = 0.5;
const STALL_LIMIT: usize = 3;
/// A vertex farther than this multiple of `rho` from the best vertex
/// triggers a geometry-repair step instead of a trust-region step.
const GEOMETRY_FACTOR: f64 = 2.1;

struct Run<F> {
    objective: F,
    trace: Vec<(Vec<f64>, f64)>,
    max_evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Run<F> {
    fn eval(&mut self, x: &[f64]) -> Result<Option<f64>> {
        if self.trace.len() >= self.max_evals {
            return Ok(None);
        }
        let value = (self.objective)(x);
        if !value.is_finite() {
            return Err(Error::NonFiniteObjective { params: x.to_vec() });
        }
        self.trace.push((x.to_vec(), value));
        Ok(Some(value))
    }
}

/// Minimizes an unconstrained objective from `x0`.
///
/// The first n+1 evaluations are `x0` and `x0 + rhobeg * e_i`; afterwards
/// each iteration takes one step of length `rho` along the negated
/// gradient of the linear interpolation model through the current
/// simplex. Every evaluated point is folded back into the simplex at the
/// position that best preserves its volume, so the model tracks the
/// current region even when a step fails to improve.
pub fn minimize(
    objective: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    cfg.validate()?;
    let dim = x0.len();
    let mut run = Run { objective, trace: Vec::new(), max_evals: cfg.max_evals };

    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    let mut values: Vec<f64> = Vec::with_capacity(dim + 1);
    if let Some(v) = run.eval(x0)? {
        vertices.push(x0.to_vec());
        values.push(v);
    }
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += cfg.rhobeg;
        match run.eval(&x)? {
            Some(v) => {
                vertices.push(x);
                values.push(v);
            }
            None => break,
        }
    }

    let mut rho = cfg.rhobeg;
    let mut stalls = 0usize;
    let mut poll_axis = 0usize;
    if vertices.len() == dim + 1 {
        loop {
            if run.trace.len() >= cfg.max_evals || rho < cfg.rhoend {
                break;
            }
            let best = argmin(&values);

            // geometry first: a vertex drifting far outside the trust
            // region (or a flat simplex) poisons the interpolation model,
            // so repair it with a point rho away from the best vertex
            // along the offending vertex's Lagrange gradient.
            let far = farthest_from(&vertices, best);
            let too_far = distance(&vertices[far], &vertices[best]) > GEOMETRY_FACTOR * rho;
            let gradient = model_gradient(&vertices, &values, best);
            if too_far || gradient.is_none() {
                let target = if too_far { far } else { argmax(&values) };
                let direction = match lagrange_gradient(&vertices, best, target) {
                    Some(d) => d,
                    None => poll_step(dim, 1.0, &mut poll_axis),
                };
                let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
                let sign = match &gradient {
                    // descend along the model if we have one
                    Some(g) => {
                        if g.iter().zip(&direction).map(|(a, b)| a * b).sum::<f64>() > 0.0 {
                            -1.0
                        } else {
                            1.0
                        }
                    }
                    None => 1.0,
                };
                let candidate: Vec<f64> = vertices[best]
                    .iter()
                    .zip(&direction)
                    .map(|(x, d)| x + sign * rho * d / norm.max(1e-300))
                    .collect();
                let Some(value) = run.eval(&candidate)? else { break };
                vertices[target] = candidate;
                values[target] = value;
                continue;
            }

            let g = gradient.expect("checked above");
            let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            let step: Vec<f64> = if gnorm <= 1e-14 {
                poll_step(dim, rho, &mut poll_axis)
            } else {
                g.iter().map(|v| -rho * v / gnorm).collect()
            };
            let candidate: Vec<f64> =
                vertices[best].iter().zip(&step).map(|(x, s)| x + s).collect();
            let Some(value) = run.eval(&candidate)? else { break };

            // swap the candidate in for the vertex whose replacement best
            // preserves simplex volume (largest barycentric weight),
            // protecting the incumbent best unless the candidate beats it
            let improved = value < values[best];
            let bary = barycentric(&vertices, best, &candidate);
            let replace = match &bary {
                Some(lambda) => (0..=dim)
                    .filter(|&t| improved || t != best)
                    .max_by(|&a, &b| lambda[a].abs().total_cmp(&lambda[b].abs())),
                None => {
                    let worst = argmax(&values);
                    (improved || value < values[worst]).then_some(worst)
                }
            };
            if let Some(t) = replace {
                vertices[t] = candidate;
                values[t] = value;
            }
            if improved {
                stalls = 0;
            } else {
                stalls += 1;
                if stalls >= STALL_LIMIT {
                    stalls = 0;
                    rho *= SHRINK_FACTOR;
                }
            }
        }
    }

    let (best_params, best_value) = run
        .trace
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(p, v)| (p.clone(), *v))
        .expect("at least one evaluation");
    Ok(OptimizationResult {
        best_params,
        best_value,
        evaluations: run.trace.len(),
        trace: run.trace,
    })
}

fn argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap()
}

fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn farthest_from(vertices: &[Vec<f64>], best: usize) -> usize {
    (0..vertices.len())
        .filter(|&i| i != best)
        .max_by(|&a, &b| {
            distance(&vertices[a], &vertices[best])
                .total_cmp(&distance(&vertices[b], &vertices[best]))
        })
        .unwrap()
}

/// Gradient of the Lagrange basis function of `target`: the affine
/// function that is 1 at `target`, 0 at every other vertex. Moving
/// `target` along it maximally regrows simplex volume.
fn lagrange_gradient(vertices: &[Vec<f64>], best: usize, target: usize) -> Option<Vec<f64>> {
    let dim = vertices[0].len();
    let mut a = Vec::with_capacity(dim * dim);
    let mut b = vec![0.0; dim];
    let mut row = 0;
    for (i, v) in vertices.iter().enumerate() {
        if i == best {
            continue;
        }
        for j in 0..dim {
            a.push(v[j] - vertices[best][j]);
        }
        if i == target {
            b[row] = 1.0;
        }
        row += 1;
    }
    solve_real(&mut a, &mut b, dim)
}

/// Barycentric coordinates of `x` with respect to the simplex, indexed
/// by vertex; `|lambda[t]|` is the volume ratio after swapping vertex `t`
/// for `x`.
fn barycentric(vertices: &[Vec<f64>], best: usize, x: &[f64]) -> Option<Vec<f64>> {
    let dim = vertices[0].len();
    // columns of the system are the edge vectors v_i - v_best
    let order: Vec<usize> = (0..vertices.len()).filter(|&i| i != best).collect();
    let mut a = vec![0.0; dim * dim];
    for (c, &i) in order.iter().enumerate() {
        for r in 0..dim {
            a[r * dim + c] = vertices[i][r] - vertices[best][r];
        }
    }
    let mut b: Vec<f64> = (0..dim).map(|r| x[r] - vertices[best][r]).collect();
    let partial = solve_real(&mut a, &mut b, dim)?;
    let mut lambda = vec![0.0; vertices.len()];
    for (c, &i) in order.iter().enumerate() {
        lambda[i] = partial[c];
    }
    lambda[best] = 1.0 - partial.iter().sum::<f64>();
    Some(lambda)
}

fn poll_step(dim: usize, rho: f64, axis: &mut usize) -> Vec<f64> {
    let mut s = vec![0.0; dim];
    s[*axis % dim] = rho;
    *axis += 1;
    s
}

/// Gradient of the affine interpolant through the simplex, from the
/// linear system (v_i - v_best) . g = f_i - f_best.
fn model_gradient(vertices: &[Vec<f64>], values: &[f64], best: usize) -> Option<Vec<f64>> {
    let dim = vertices[0].len();
    let mut a = Vec::with_capacity(dim * dim);
    let mut b = Vec::with_capacity(dim);
    for (i, v) in vertices.iter().enumerate() {
        if i == best {
            continue;
        }
        for j in 0..dim {
            a.push(v[j] - vertices[best][j]);
        }
        b.push(values[i] - values[best]);
    }
    solve_real(&mut a, &mut b, dim)
}

/// Dense real solve with partial pivoting; None on (near-)singularity.
fn solve_real(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    let scale = a.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let (p, pmag) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pmag < 1e-12 * scale {
            return None;
        }
        if p != col {
            for j in 0..n {
                a.swap(col * n + j, p * n + j);
            }
            b.swap(col, p);
        }
        for r in (col + 1)..n {
            let f = a[r * n + col] / a[col * n + col];
            for j in col..n {
                a[r * n + j] -= f * a[col * n + j];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in (row + 1)..n {
            acc -= a[row * n + j] * x[j];
        }
        x[row] = acc / a[row * n + row];
    }
    Some(x)
}
