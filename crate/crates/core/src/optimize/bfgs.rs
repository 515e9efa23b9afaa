//! Quasi-Newton minimization with a strong-Wolfe line search.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BfgsOptions {
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iter: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f`, which returns the value and writes the gradient.
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &BfgsOptions) -> BfgsResult
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let mut g = DVector::zeros(n);
    let mut fx = f(x.as_slice(), g.as_mut_slice());
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut first = true;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let gn = g.amax();
        if gn <= opts.grad_tol || !fx.is_finite() {
            break;
        }
        iterations += 1;
        let mut p = -(&hinv * &g);
        if p.dot(&g) >= 0.0 {
            // lost descent: restart from steepest descent
            hinv = DMatrix::identity(n, n);
            p = -g.clone();
            first = true;
        }
        if first {
            // scale the first step to a unit-size move
            let s = 1.0 / p.amax().max(1.0);
            p *= s;
        }
        let Some((alpha, fnew, gnew)) = wolfe(&mut f, &x, fx, &g, &p) else {
            if first {
                break;
            }
            hinv = DMatrix::identity(n, n);
            first = true;
            continue;
        };
        let s = &p * alpha;
        let y = &gnew - &g;
        let sy = s.dot(&y);
        x += &s;
        fx = fnew;
        g = gnew;
        if sy > 1e-300 {
            if first {
                let yy = y.dot(&y);
                hinv = DMatrix::identity(n, n) * (sy / yy);
                first = false;
            }
            let rho = 1.0 / sy;
            let hy = &hinv * &y;
            let yhy = y.dot(&hy);
            // H+ = H - rho (s hy' + hy s') + (rho^2 yhy + rho) s s'
            hinv -= (&s * hy.transpose() + &hy * s.transpose()) * rho;
            hinv += (&s * s.transpose()) * (rho * rho * yhy + rho);
        }
    }
    let grad_norm = g.amax();
    BfgsResult {
        x: x.as_slice().to_vec(),
        f: fx,
        grad_norm,
        iterations,
        converged: grad_norm <= opts.grad_tol,
    }
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

type Probe = (f64, f64, DVector<f64>);

/// Step length satisfying the strong Wolfe conditions, by doubling then
/// bisection zoom. Falls back to the best sufficient-decrease point.
fn wolfe<F>(f: &mut F, x: &DVector<f64>, f0: f64, g0: &DVector<f64>, p: &DVector<f64>) -> Option<Probe>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let d0 = g0.dot(p);
    let n = x.len();
    let mut eval = |a: f64| -> Probe {
        let xt = x + p * a;
        let mut g = DVector::zeros(n);
        let v = f(xt.as_slice(), g.as_mut_slice());
        (a, v, g)
    };
    let armijo = |pr: &Probe| pr.1.is_finite() && pr.1 <= f0 + C1 * pr.0 * d0;
    let curvature = |pr: &Probe| pr.2.dot(p).abs() <= -C2 * d0;

    let mut prev: Option<Probe> = None;
    let mut a = 1.0;
    let (mut lo, mut hi): (Option<Probe>, f64) = (None, 0.0);
    let mut bracketed = false;
    for _ in 0..40 {
        let pr = eval(a);
        let worse = prev.as_ref().is_some_and(|q| pr.1 >= q.1);
        if !armijo(&pr) || worse {
            lo = prev;
            hi = a;
            bracketed = true;
            break;
        }
        if curvature(&pr) {
            return Some(pr);
        }
        if pr.2.dot(p) >= 0.0 {
            hi = lo.as_ref().map_or(0.0, |q| q.0);
            lo = Some(pr);
            bracketed = true;
            break;
        }
        lo = Some(pr.clone());
        prev = Some(pr);
        a *= 2.0;
    }
    if !bracketed {
        return lo;
    }
    let f_lo = |lo: &Option<Probe>| lo.as_ref().map_or(f0, |q| q.1);
    let a_lo = |lo: &Option<Probe>| lo.as_ref().map_or(0.0, |q| q.0);
    for _ in 0..60 {
        let a = 0.5 * (a_lo(&lo) + hi);
        if (hi - a_lo(&lo)).abs() < 1e-16 * hi.abs().max(1e-300) {
            break;
        }
        let pr = eval(a);
        if !armijo(&pr) || pr.1 >= f_lo(&lo) {
            hi = a;
        } else {
            if curvature(&pr) {
                return Some(pr);
            }
            if pr.2.dot(p) * (hi - a) >= 0.0 {
                hi = a_lo(&lo);
            }
            lo = Some(pr);
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let r = minimize(
            |x, g| {
                let (a, b) = (x[0], x[1]);
                g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
                g[1] = 200.0 * (b - a * a);
                (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
            },
            &[-1.2, 1.0],
            &BfgsOptions::default(),
        );
        assert!(r.converged, "{r:?}");
        assert!((r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn quadratic_is_solved_exactly() {
        let r = minimize(
            |x, g| {
                g[0] = 2.0 * (x[0] - 3.0);
                g[1] = 20.0 * (x[1] + 1.0);
                (x[0] - 3.0).powi(2) + 10.0 * (x[1] + 1.0).powi(2)
            },
            &[0.0, 0.0],
            &BfgsOptions::default(),
        );
        assert!(r.converged);
        assert!((r.x[0] - 3.0).abs() < 1e-10 && (r.x[1] + 1.0).abs() < 1e-10);
    }
}
