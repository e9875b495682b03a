use crate::linalg::solve_dense;

use super::LocalResult;

/// Central finite-difference step.
pub const FD_STEP: f64 = 1e-4;
// a loose constant lets doubled steps sit at the stability edge and zig-zag
const ARMIJO: f64 = 0.3;
const GRAD_TOL: f64 = 1e-10;
const MAX_STEP: f64 = 1e3;
const RHO_BEG: f64 = 0.5;
const RHO_END: f64 = 1e-6;

struct Counted<'a> {
    f: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    evals: usize,
}

impl Counted<'_> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        self.evals += 1;
        let v = (self.f)(x);
        v.is_finite().then_some(v)
    }
}

fn axpy(x: &[f64], a: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi + a * di).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Steepest descent with central-difference gradients and Armijo
/// backtracking. The initial evaluation counts as the first iteration.
/// Returns `None` if the objective becomes non-finite.
pub fn gradient_descent(f: &(dyn Fn(&[f64]) -> f64 + Sync), x0: &[f64], maxiter: usize) -> Option<LocalResult> {
    let mut obj = Counted { f, evals: 0 };
    let mut x = x0.to_vec();
    let mut fx = obj.eval(&x)?;
    let mut history = vec![fx];
    let mut alpha: f64 = 1.0;
    let mut probe = x.clone();
    while history.len() < maxiter {
        let mut g = vec![0.0; x.len()];
        for i in 0..x.len() {
            probe[i] = x[i] + FD_STEP;
            let up = obj.eval(&probe)?;
            probe[i] = x[i] - FD_STEP;
            let down = obj.eval(&probe)?;
            probe[i] = x[i];
            g[i] = (up - down) / (2.0 * FD_STEP);
        }
        let gn2: f64 = g.iter().map(|v| v * v).sum();
        if gn2.sqrt() < GRAD_TOL {
            break;
        }
        let mut step = (2.0 * alpha).min(MAX_STEP);
        let accepted = loop {
            let trial = axpy(&x, -step, &g);
            let ft = obj.eval(&trial)?;
            if ft <= fx - ARMIJO * step * gn2 {
                break Some((trial, ft));
            }
            step *= 0.5;
            if step * gn2.sqrt() < 1e-14 {
                break None;
            }
        };
        let Some((xn, fnew)) = accepted else { break };
        x = xn;
        probe.clone_from(&x);
        fx = fnew;
        alpha = step;
        history.push(fx);
    }
    Some(LocalResult { params: x, energy: fx, iterations: history.len(), evaluations: obj.evals, history })
}

/// Derivative-free trust-region method driven by a linear model
/// interpolated on `dim + 1` points. The radius starts at 0.5 and halves
/// whenever a model step fails on a well-poised simplex; it stops at 1e-6
/// or after `maxiter` objective evaluations.
pub fn simplex_free(f: &(dyn Fn(&[f64]) -> f64 + Sync), x0: &[f64], maxiter: usize) -> Option<LocalResult> {
    let n = x0.len();
    let mut obj = Counted { f, evals: 0 };
    let mut x = x0.to_vec();
    let mut fx = obj.eval(&x)?;
    let mut history = vec![fx];
    let mut rho = RHO_BEG;
    let mut verts: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut rebuild = true;
    'outer: while obj.evals < maxiter {
        if rebuild {
            verts.clear();
            for i in 0..n {
                if obj.evals >= maxiter {
                    break 'outer;
                }
                let mut v = x.clone();
                v[i] += rho;
                let fv = obj.eval(&v)?;
                if fv < fx {
                    // keep the better point as the pivot and rebuild around it
                    verts.push((std::mem::replace(&mut x, v), std::mem::replace(&mut fx, fv)));
                } else {
                    verts.push((v, fv));
                }
                history.push(fx);
            }
            rebuild = false;
        }
        if obj.evals >= maxiter {
            break;
        }
        let d: Vec<Vec<f64>> = verts.iter().map(|(v, _)| v.iter().zip(&x).map(|(a, b)| a - b).collect()).collect();
        let r: Vec<f64> = verts.iter().map(|(_, fv)| fv - fx).collect();
        let Some(g) = solve_dense(d, r, 1e-3 * rho) else {
            rebuild = true;
            continue;
        };
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let far = verts.iter().map(|(v, _)| dist(v, &x)).fold(0.0, f64::max);
        if gn == 0.0 {
            rho *= 0.5;
            if rho < RHO_END {
                break;
            }
            rebuild = true;
            continue;
        }
        let trial = axpy(&x, -rho / gn, &g);
        let ft = obj.eval(&trial)?;
        if ft < fx {
            verts.push((std::mem::replace(&mut x, trial), std::mem::replace(&mut fx, ft)));
            let (idx, _) = verts
                .iter()
                .enumerate()
                .map(|(i, (v, _))| (i, dist(v, &x)))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty simplex");
            verts.swap_remove(idx);
        } else if far > 1.5 * rho {
            rebuild = true;
        } else {
            rho *= 0.5;
            if rho < RHO_END {
                history.push(fx);
                break;
            }
            rebuild = true;
        }
        history.push(fx);
    }
    Some(LocalResult { params: x, energy: fx, iterations: obj.evals, evaluations: obj.evals, history })
}
