//! Powell-Hestenes-Rockafellar augmented Lagrangian for problems
//!
//! ```text
//! min f(x)  s.t.  c(x) = 0,  g(x) >= 0
//! ```
//!
//! with a BFGS inner solver. Multipliers follow the convention
//! `L = f + mu.c - nu.g`, `nu >= 0`.

use serde::{Deserialize, Serialize};

use super::bfgs::{minimize, BfgsOptions};

pub trait ConstrainedProblem {
    fn dim(&self) -> usize;
    fn n_eq(&self) -> usize;
    fn n_ineq(&self) -> usize;
    /// Objective value; writes its gradient into `grad`.
    fn objective(&self, x: &[f64], grad: &mut [f64]) -> f64;
    fn equalities(&self, x: &[f64], out: &mut [f64]);
    fn inequalities(&self, x: &[f64], out: &mut [f64]);
    /// `grad += sum_i w_i grad c_i(x)`.
    fn eq_jtv(&self, x: &[f64], w: &[f64], grad: &mut [f64]);
    /// `grad += sum_i w_i grad g_i(x)`.
    fn ineq_jtv(&self, x: &[f64], w: &[f64], grad: &mut [f64]);
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AugLagOptions {
    pub tol_eq: f64,
    pub tol_kkt: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub rho0: f64,
    pub rho_growth: f64,
    pub rho_max: f64,
}

impl Default for AugLagOptions {
    fn default() -> Self {
        Self {
            tol_eq: 1e-8,
            tol_kkt: 1e-6,
            max_outer: 60,
            max_inner: 2000,
            rho0: 10.0,
            rho_growth: 10.0,
            rho_max: 1e10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterStep {
    pub objective: f64,
    pub max_eq: f64,
    pub max_ineq: f64,
    pub kkt: f64,
    pub rho: f64,
    pub inner_iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AugLagResult {
    pub x: Vec<f64>,
    pub objective: f64,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub max_eq: f64,
    pub max_ineq: f64,
    pub kkt: f64,
    pub history: Vec<OuterStep>,
    pub converged: bool,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Largest violation of `g >= 0`.
fn max_violation(g: &[f64]) -> f64 {
    g.iter().fold(0.0, |m, x| m.max(-x))
}

struct Eval<'a, P: ConstrainedProblem> {
    p: &'a P,
    c: Vec<f64>,
    g: Vec<f64>,
}

impl<P: ConstrainedProblem> Eval<'_, P> {
    fn constraints(&mut self, x: &[f64]) {
        self.p.equalities(x, &mut self.c);
        self.p.inequalities(x, &mut self.g);
    }

    /// Infinity norm of the Lagrangian gradient, plus complementarity.
    fn kkt(&mut self, x: &[f64], mu: &[f64], nu: &[f64]) -> f64 {
        let mut grad = vec![0.0; self.p.dim()];
        self.p.objective(x, &mut grad);
        self.p.eq_jtv(x, mu, &mut grad);
        let neg: Vec<f64> = nu.iter().map(|v| -v).collect();
        self.p.ineq_jtv(x, &neg, &mut grad);
        self.constraints(x);
        let comp = nu.iter().zip(&self.g).fold(0.0f64, |m, (v, g)| m.max((v * g).abs()));
        max_abs(&grad).max(comp)
    }
}

pub fn solve<P: ConstrainedProblem>(p: &P, x0: &[f64], opts: &AugLagOptions) -> AugLagResult {
    let (ne, ni) = (p.n_eq(), p.n_ineq());
    let mut ev = Eval {
        p,
        c: vec![0.0; ne],
        g: vec![0.0; ni],
    };
    let mut x = x0.to_vec();
    let mut mu = vec![0.0; ne];
    let mut nu = vec![0.0; ni];
    let mut rho = opts.rho0;
    let mut history = Vec::new();
    ev.constraints(&x);
    let mut feas = max_abs(&ev.c).max(max_violation(&ev.g));
    let mut converged = false;

    for _ in 0..opts.max_outer {
        let kkt = ev.kkt(&x, &mu, &nu);
        if feas <= opts.tol_eq && kkt <= opts.tol_kkt {
            converged = true;
            break;
        }
        let inner_tol = (0.01 * opts.tol_kkt).max(1e-14);
        let res = {
            let (mu, nu) = (&mu, &nu);
            let mut c = vec![0.0; ne];
            let mut g = vec![0.0; ni];
            let mut w_eq = vec![0.0; ne];
            let mut w_in = vec![0.0; ni];
            minimize(
                |x, grad| {
                    let mut val = p.objective(x, grad);
                    p.equalities(x, &mut c);
                    p.inequalities(x, &mut g);
                    for i in 0..ne {
                        val += mu[i] * c[i] + 0.5 * rho * c[i] * c[i];
                        w_eq[i] = mu[i] + rho * c[i];
                    }
                    for i in 0..ni {
                        let t = (nu[i] - rho * g[i]).max(0.0);
                        val += (t * t - nu[i] * nu[i]) / (2.0 * rho);
                        w_in[i] = -t;
                    }
                    p.eq_jtv(x, &w_eq, grad);
                    p.ineq_jtv(x, &w_in, grad);
                    val
                },
                &x,
                &BfgsOptions {
                    grad_tol: inner_tol,
                    max_iter: opts.max_inner,
                },
            )
        };
        x = res.x;
        ev.constraints(&x);
        for (m, c) in mu.iter_mut().zip(&ev.c) {
            *m += rho * c;
        }
        for (v, g) in nu.iter_mut().zip(&ev.g) {
            *v = (*v - rho * g).max(0.0);
        }
        let new_feas = max_abs(&ev.c).max(max_violation(&ev.g));
        let mut scratch = vec![0.0; p.dim()];
        let objective = p.objective(&x, &mut scratch);
        let kkt = ev.kkt(&x, &mu, &nu);
        history.push(OuterStep {
            objective,
            max_eq: max_abs(&ev.c),
            max_ineq: max_violation(&ev.g),
            kkt,
            rho,
            inner_iterations: res.iterations,
        });
        if new_feas > 0.25 * feas && new_feas > opts.tol_eq {
            rho = (rho * opts.rho_growth).min(opts.rho_max);
        }
        feas = new_feas;
    }
    ev.constraints(&x);
    let kkt = ev.kkt(&x, &mu, &nu);
    let (max_eq, max_ineq) = (max_abs(&ev.c), max_violation(&ev.g));
    converged |= max_eq <= opts.tol_eq && max_ineq <= opts.tol_eq && kkt <= opts.tol_kkt;
    let mut scratch = vec![0.0; p.dim()];
    AugLagResult {
        objective: p.objective(&x, &mut scratch),
        x,
        mu,
        nu,
        max_eq,
        max_ineq,
        kkt,
        history,
        converged,
    }
}
