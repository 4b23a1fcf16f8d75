//! Derivative-free minimization with the Nelder–Mead simplex method.

use crate::error::{Error, Result};

/// Stopping rules and initial-simplex geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadConfig {
    pub max_evals: usize,
    /// Simplex diameter tolerance (max-norm from the best vertex).
    pub xtol: f64,
    /// Spread of function values across the simplex.
    pub ftol: f64,
    /// Relative step for non-zero start coordinates.
    pub rel_step: f64,
    /// Absolute step for zero start coordinates.
    pub zero_step: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        NelderMeadConfig {
            max_evals: 200,
            xtol: 1e-3,
            ftol: 1e-4,
            rel_step: 0.05,
            zero_step: 0.00025,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` from `x0`. Any non-finite function value aborts with a run error.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], cfg: &NelderMeadConfig) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let dim = x0.len();
    if dim == 0 {
        return Err(Error::invalid("cannot optimize over zero parameters"));
    }
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::Run(format!("objective returned {v} at {x:?}")));
        }
        Ok(v)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] = if v[i] != 0.0 {
            v[i] * (1.0 + cfg.rel_step)
        } else {
            cfg.zero_step
        };
        simplex.push(v);
    }
    let mut values = Vec::with_capacity(dim + 1);
    for v in &simplex {
        values.push(eval(v, &mut evals)?);
    }

    let mut converged = false;
    loop {
        // stable sort keeps earlier vertices first among equal values
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let fspread = values[1..].iter().map(|v| (v - values[0]).abs()).fold(0.0, f64::max);
        let xspread = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if fspread <= cfg.ftol && xspread <= cfg.xtol {
            converged = true;
            break;
        }
        if evals >= cfg.max_evals {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|v| v[k]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = along(REFLECT);
        let fr = eval(&xr, &mut evals)?;
        if fr < values[0] {
            let xe = along(REFLECT * EXPAND);
            let fe = eval(&xe, &mut evals)?;
            if fe < fr {
                simplex[dim] = xe;
                values[dim] = fe;
            } else {
                simplex[dim] = xr;
                values[dim] = fr;
            }
            continue;
        }
        if fr < values[dim - 1] {
            simplex[dim] = xr;
            values[dim] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < values[dim] {
            let xc = along(REFLECT * CONTRACT);
            let fc = eval(&xc, &mut evals)?;
            let ok = fc <= fr;
            (xc, fc, ok)
        } else {
            let xc = along(-CONTRACT);
            let fc = eval(&xc, &mut evals)?;
            let ok = fc < values[dim];
            (xc, fc, ok)
        };
        if accept {
            simplex[dim] = xc;
            values[dim] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=dim {
            simplex[i] = best
                .iter()
                .zip(&simplex[i])
                .map(|(b, v)| b + SHRINK * (v - b))
                .collect();
            values[i] = eval(&simplex[i], &mut evals)?;
        }
    }

    Ok(Minimum {
        x: simplex.swap_remove(0),
        f: values[0],
        evals,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let cfg = NelderMeadConfig {
            max_evals: 2000,
            xtol: 1e-8,
            ftol: 1e-12,
            ..Default::default()
        };
        let m = nelder_mead(
            |x| Ok((x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2)),
            &[0.0, 0.0],
            &cfg,
        )
        .unwrap();
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] + 2.0).abs() < 1e-4);
    }

    #[test]
    fn rosenbrock() {
        let cfg = NelderMeadConfig {
            max_evals: 5000,
            xtol: 1e-8,
            ftol: 1e-12,
            ..Default::default()
        };
        let f = |x: &[f64]| Ok(100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2));
        let m = nelder_mead(f, &[-1.2, 1.0], &cfg).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-3, "{:?}", m);
    }

    #[test]
    fn respects_eval_budget_and_never_worsens() {
        let cfg = NelderMeadConfig {
            max_evals: 30,
            ..Default::default()
        };
        let f = |x: &[f64]| Ok(x.iter().map(|v| v.sin() + 0.1 * v * v).sum::<f64>());
        let x0 = [2.0, -1.0, 0.5];
        let start = f(&x0).unwrap();
        let m = nelder_mead(f, &x0, &cfg).unwrap();
        // one iteration can spend up to dim + 2 evaluations past the check
        assert!(m.evals <= 30 + 5);
        assert!(m.f <= start);
    }

    #[test]
    fn non_finite_objective_is_an_error() {
        let err = nelder_mead(|_| Ok(f64::NAN), &[1.0], &NelderMeadConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Run(_)));
    }
}
