//! Fixed-coefficient Nelder-Mead simplex minimizer with an iteration trace.
//!
//! Coefficients: reflection 1, expansion 2, contraction 0.5, shrink 0.5.
//! Convergence is declared when the residual spread across the simplex
//! drops below `spread_tol`.

/// One accepted iteration: best vertex so far.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub residual: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TraceRecord>,
}

pub struct SimplexOptions {
    pub max_iter: usize,
    pub spread_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_iter: 2000, spread_tol: 1e-12 }
    }
}

const ALPHA: f64 = 1.0; // reflection
const GAMMA: f64 = 2.0; // expansion
const BETA: f64 = 0.5; // contraction
const SIGMA: f64 = 0.5; // shrink

/// Minimize `f` from `x0`, building the initial simplex by stepping each
/// coordinate by `steps[i]`.
pub fn minimize(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    options: &SimplexOptions,
) -> SimplexResult {
    let dim = x0.len();
    assert_eq!(steps.len(), dim, "one initial step per coordinate");
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut trace = Vec::new();

    let mut iterations = 0;
    let mut converged = false;
    for iter in 0..options.max_iter {
        iterations = iter + 1;
        // order: best first
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let reorder: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let revalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reorder;
        values = revalues;

        trace.push(TraceRecord { iteration: iter, residual: values[0], x: simplex[0].clone() });
        if values[dim] - values[0] < options.spread_tol {
            converged = true;
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; dim];
        for v in &simplex[..dim] {
            for (c, &x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&worst)
            .map(|(&c, &w)| c + ALPHA * (c - w))
            .collect();
        let f_reflected = f(&reflected);

        if f_reflected < values[0] {
            let expanded: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(&c, &w)| c + GAMMA * (c - w))
                .collect();
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                simplex[dim] = expanded;
                values[dim] = f_expanded;
            } else {
                simplex[dim] = reflected;
                values[dim] = f_reflected;
            }
        } else if f_reflected < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = f_reflected;
        } else {
            // contract toward the better of worst/reflected
            let (base, f_base) = if f_reflected < values[dim] {
                (&reflected, f_reflected)
            } else {
                (&worst, values[dim])
            };
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(base)
                .map(|(&c, &b)| c + BETA * (b - c))
                .collect();
            let f_contracted = f(&contracted);
            if f_contracted < f_base {
                simplex[dim] = contracted;
                values[dim] = f_contracted;
            } else {
                // shrink toward the best vertex
                for i in 1..=dim {
                    let best = simplex[0].clone();
                    for (x, &b) in simplex[i].iter_mut().zip(&best) {
                        *x = b + SIGMA * (*x - b);
                    }
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..=dim).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let best = order[0];
    trace.push(TraceRecord { iteration: iterations, residual: values[best], x: simplex[best].clone() });
    SimplexResult { x: simplex[best].clone(), f: values[best], iterations, converged, trace }
}
