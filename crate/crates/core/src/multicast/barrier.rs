//! Log-barrier interior-point method for the SCA subproblem.
//!
//! Each covariance `K_T` is parameterized by `L²` real coordinates in an
//! orthonormal basis of the Hermitian matrices (diagonal entries, then
//! `√2·Re` and `√2·Im` of each upper off-diagonal entry), so that
//! `tr(X Y) = <coords(X), coords(Y)>` for Hermitian `X`, `Y`. Together with the
//! rate variable `R` this gives a real vector on which damped Newton steps are
//! taken along the central path of
//!
//! `-t·R - Σ ln(g_i(K) - R) - Σ_T ln|K_T| - ln(P - Σ tr K_T)`.
//!
//! Covariances are rescaled by `P_T` internally so the budget is one.

use std::f64::consts::LOG2_E;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::{cholesky_ln_det, hermitian_part, CMatrix};
use crate::error::{Error, Result};

use super::{ConvexSubproblem, CovarianceSet};

const MAX_CENTERING_STEPS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierOptions {
    /// Target duality gap on `R`, in bits.
    pub tol: f64,
    /// Barrier parameter growth per outer iteration.
    pub mu: f64,
    /// Total Newton step budget.
    pub max_newton: usize,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        BarrierOptions { tol: 1e-5, mu: 16.0, max_newton: 3000 }
    }
}

/// Solves the subproblem to a duality gap of `tol` bits.
///
/// Returns the covariances together with the subproblem objective
/// `min_i g_i(K)` at them. The expansion point is itself feasible with an
/// objective equal to its exact rate, so it is returned instead whenever the
/// interior-point answer does not improve on it.
pub fn solve_subproblem(sub: &ConvexSubproblem<'_>, tol: f64) -> Result<(CovarianceSet, f64)> {
    solve_subproblem_with(sub, &BarrierOptions { tol, ..BarrierOptions::default() })
}

pub fn solve_subproblem_with(sub: &ConvexSubproblem<'_>, opts: &BarrierOptions) -> Result<(CovarianceSet, f64)> {
    let fallback = sub.objective(&sub.expansion)?;
    let solver = Barrier::new(sub);
    let covs = match solver.run(opts) {
        Ok(c) => c,
        Err(reason) => return Err(Error::SolverFailure { reason, best: Some(Box::new(sub.expansion.clone())) }),
    };
    let value = sub.objective(&covs)?;
    if value >= fallback {
        Ok((covs, value))
    } else {
        Ok((sub.expansion.clone(), fallback))
    }
}

/// Hermitian basis element as a list of `(row, col, value)` entries.
type BasisElement = Vec<(usize, usize, Complex64)>;

fn hermitian_basis(l: usize) -> Vec<BasisElement> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis: Vec<BasisElement> = (0..l).map(|j| vec![(j, j, Complex64::new(1.0, 0.0))]).collect();
    for j in 0..l {
        for k in j + 1..l {
            basis.push(vec![(j, k, Complex64::new(s, 0.0)), (k, j, Complex64::new(s, 0.0))]);
            basis.push(vec![(j, k, Complex64::new(0.0, s)), (k, j, Complex64::new(0.0, -s))]);
        }
    }
    basis
}

fn write_coords(m: &CMatrix, out: &mut [f64]) {
    let l = m.nrows();
    let r2 = std::f64::consts::SQRT_2;
    for j in 0..l {
        out[j] = m[(j, j)].re;
    }
    let mut idx = l;
    for j in 0..l {
        for k in j + 1..l {
            // average the two triangles to absorb rounding asymmetry
            let z = (m[(j, k)] + m[(k, j)].conj()) * 0.5;
            out[idx] = r2 * z.re;
            out[idx + 1] = r2 * z.im;
            idx += 2;
        }
    }
}

fn from_coords(x: &[f64], l: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::zeros(l, l);
    for j in 0..l {
        m[(j, j)] = Complex64::new(x[j], 0.0);
    }
    let mut idx = l;
    for j in 0..l {
        for k in j + 1..l {
            let z = Complex64::new(x[idx] * s, x[idx + 1] * s);
            m[(j, k)] = z;
            m[(k, j)] = z.conj();
            idx += 2;
        }
    }
    m
}

struct Constraint {
    channel: CMatrix,
    weight: f64,
    logdet_groups: Vec<usize>,
    linear_groups: Vec<usize>,
    linear_coords: Vec<f64>,
    constant: f64,
}

struct Barrier {
    l: usize,
    g: usize,
    d: usize,
    groups: usize,
    n: usize,
    n0: f64,
    power: f64,
    constraints: Vec<Constraint>,
    basis: Vec<BasisElement>,
    identity_coords: Vec<f64>,
    expansion: Vec<f64>,
}

struct Eval {
    phi: f64,
    grad: DVector<f64>,
    hess: DMatrix<f64>,
}

impl Barrier {
    fn new(sub: &ConvexSubproblem<'_>) -> Self {
        let p = sub.problem;
        let (l, g) = (p.tx_dim(), p.rx_dim());
        let d = l * l;
        let groups = p.groups().len();
        let power = p.power();
        let root = power.sqrt();
        let constraints = sub
            .constraints
            .iter()
            .map(|c| {
                let mut linear_coords = vec![0.0; d];
                write_coords(&c.linear.scale(power), &mut linear_coords);
                Constraint {
                    channel: p.channel(c.user).scale(root),
                    weight: c.weight,
                    logdet_groups: c.logdet_groups.clone(),
                    linear_groups: c.linear_groups.clone(),
                    linear_coords,
                    constant: c.constant,
                }
            })
            .collect();
        let mut identity_coords = vec![0.0; d];
        write_coords(&CMatrix::identity(l, l), &mut identity_coords);
        let mut expansion = vec![0.0; groups * d];
        for (i, k) in sub.expansion.mats.iter().enumerate() {
            write_coords(&k.scale(1.0 / power), &mut expansion[i * d..(i + 1) * d]);
        }
        Barrier {
            l,
            g,
            d,
            groups,
            n: groups * d + 1,
            n0: p.n0(),
            power,
            constraints,
            basis: hermitian_basis(l),
            identity_coords,
            expansion,
        }
    }

    /// Barrier complexity: one per scalar inequality, `L` per PSD cone.
    fn theta(&self) -> f64 {
        (self.constraints.len() + 1 + self.groups * self.l) as f64
    }

    fn block<'x>(&self, x: &'x [f64], group: usize) -> &'x [f64] {
        &x[group * self.d..(group + 1) * self.d]
    }

    /// `Φ(W)_{ij} = tr(W B_i W B_j)`, the Hessian of `-ln|·|` at `W⁻¹`.
    fn quad_form(&self, w: &CMatrix) -> DMatrix<f64> {
        let (l, d) = (self.l, self.d);
        let mut phi = DMatrix::zeros(d, d);
        let mut coords = vec![0.0; d];
        for (i, b) in self.basis.iter().enumerate() {
            let mut c = CMatrix::zeros(l, l);
            for &(r, col, v) in b {
                for p in 0..l {
                    let left = w[(p, r)] * v;
                    for q in 0..l {
                        c[(p, q)] += left * w[(col, q)];
                    }
                }
            }
            write_coords(&c, &mut coords);
            for j in 0..d {
                phi[(i, j)] = coords[j];
            }
        }
        phi
    }

    /// Barrier value (and derivatives when asked); `None` outside the domain.
    fn eval(&self, x: &[f64], t: f64, derivs: bool) -> Option<Eval> {
        let (l, g, d, n) = (self.l, self.g, self.d, self.n);
        let r = x[n - 1];
        let mats: Vec<CMatrix> = (0..self.groups).map(|i| from_coords(self.block(x, i), l)).collect();

        let mut phi = -t * r;
        let mut grad = DVector::zeros(if derivs { n } else { 0 });
        let mut hess = DMatrix::zeros(if derivs { n } else { 0 }, if derivs { n } else { 0 });

        let mut trace = 0.0;
        for (i, k) in mats.iter().enumerate() {
            let (chol, ld) = cholesky_ln_det(k.clone())?;
            phi -= ld;
            trace += k.trace().re;
            if derivs {
                let kinv = hermitian_part(&chol.inverse());
                let mut coords = vec![0.0; d];
                write_coords(&kinv, &mut coords);
                let off = i * d;
                for j in 0..d {
                    grad[off + j] -= coords[j];
                }
                let q = self.quad_form(&kinv);
                let mut view = hess.view_mut((off, off), (d, d));
                view += q;
            }
        }

        let slack = 1.0 - trace;
        if slack.is_nan() || slack <= 0.0 {
            return None;
        }
        phi -= slack.ln();
        if derivs {
            // ∇slack = -coords(I) in every block
            let mut gs = DVector::zeros(n);
            for i in 0..self.groups {
                for j in 0..d {
                    gs[i * d + j] = -self.identity_coords[j];
                }
            }
            grad -= &gs / slack;
            hess.ger(1.0 / (slack * slack), &gs, &gs, 1.0);
        }

        // ⟨Ã, K_T⟩ per group is shared by constraints of the same user; cheap anyway
        let noise = CMatrix::identity(g, g).scale(self.n0);
        let mut grad_s = DVector::zeros(if derivs { n } else { 0 });
        for c in &self.constraints {
            let mut sum = CMatrix::zeros(l, l);
            for &grp in &c.logdet_groups {
                sum += &mats[grp];
            }
            let h = &c.channel;
            let m = &noise + hermitian_part(&(h * &sum * h.adjoint()));
            let (chol, ld) = cholesky_ln_det(m)?;
            let mut lin = 0.0;
            for &grp in &c.linear_groups {
                let blk = self.block(x, grp);
                lin += blk.iter().zip(&c.linear_coords).map(|(a, b)| a * b).sum::<f64>();
            }
            let value = c.weight * (ld * LOG2_E - lin + c.constant);
            let s = value - r;
            if !(s.is_finite() && s > 0.0) {
                return None;
            }
            phi -= s.ln();
            if derivs {
                let minv = chol.inverse();
                let w = hermitian_part(&(h.adjoint() * minv * h));
                let mut wc = vec![0.0; d];
                write_coords(&w, &mut wc);
                grad_s.fill(0.0);
                let scale = c.weight * LOG2_E;
                for &grp in &c.logdet_groups {
                    for j in 0..d {
                        grad_s[grp * d + j] += scale * wc[j];
                    }
                }
                for &grp in &c.linear_groups {
                    for j in 0..d {
                        grad_s[grp * d + j] -= c.weight * c.linear_coords[j];
                    }
                }
                grad_s[n - 1] = -1.0;
                grad -= &grad_s / s;
                hess.ger(1.0 / (s * s), &grad_s, &grad_s, 1.0);
                // -∇²g / s: g is concave with Hessian -scale·Φ(W) on every block pair
                let q = self.quad_form(&w) * (scale / s);
                for &a in &c.logdet_groups {
                    for &b in &c.logdet_groups {
                        let mut view = hess.view_mut((a * d, b * d), (d, d));
                        view += &q;
                    }
                }
            }
        }
        if derivs {
            grad[n - 1] -= t;
        }
        Some(Eval { phi, grad, hess })
    }

    fn constraint_min(&self, x: &[f64]) -> Option<f64> {
        let (l, g) = (self.l, self.g);
        let mats: Vec<CMatrix> = (0..self.groups).map(|i| from_coords(self.block(x, i), l)).collect();
        let noise = CMatrix::identity(g, g).scale(self.n0);
        let mut best = f64::INFINITY;
        for c in &self.constraints {
            let mut sum = CMatrix::zeros(l, l);
            for &grp in &c.logdet_groups {
                sum += &mats[grp];
            }
            let m = &noise + hermitian_part(&(&c.channel * &sum * c.channel.adjoint()));
            let (_, ld) = cholesky_ln_det(m)?;
            let mut lin = 0.0;
            for &grp in &c.linear_groups {
                lin += self.block(x, grp).iter().zip(&c.linear_coords).map(|(a, b)| a * b).sum::<f64>();
            }
            best = best.min(c.weight * (ld * LOG2_E - lin + c.constant));
        }
        Some(best)
    }

    /// Strictly feasible start: the expansion point pulled towards the
    /// scaled identity and shrunk inside the power budget.
    fn start(&self) -> Option<Vec<f64>> {
        let (d, groups) = (self.d, self.groups);
        let level = 0.9 / (groups * self.l) as f64;
        let mut x = vec![0.0; self.n];
        for i in 0..groups {
            for j in 0..d {
                x[i * d + j] = 0.9 * self.expansion[i * d + j] + 0.1 * level * self.identity_coords[j];
            }
        }
        let gmin = self.constraint_min(&x)?;
        x[self.n - 1] = gmin - 1.0_f64.max(0.1 * gmin.abs());
        Some(x)
    }

    fn newton_direction(&self, e: &Eval) -> Option<DVector<f64>> {
        let rhs = -&e.grad;
        if let Some(ch) = e.hess.clone().cholesky() {
            return Some(ch.solve(&rhs));
        }
        let diag_max = e.hess.diagonal().iter().copied().fold(0.0_f64, f64::max).max(1.0);
        let mut reg = 1e-12 * diag_max;
        for _ in 0..8 {
            let mut h = e.hess.clone();
            for i in 0..self.n {
                h[(i, i)] += reg;
            }
            if let Some(ch) = h.cholesky() {
                return Some(ch.solve(&rhs));
            }
            reg *= 100.0;
        }
        None
    }

    fn run(&self, opts: &BarrierOptions) -> std::result::Result<CovarianceSet, String> {
        let mut x = self.start().ok_or("expansion point outside the solver domain")?;
        let theta = self.theta();
        let mut t = theta / (1.0 + x[self.n - 1].abs());
        let mut steps = 0usize;
        loop {
            // centering
            for _ in 0..MAX_CENTERING_STEPS {
                let e = self.eval(&x, t, true).ok_or("iterate left the domain")?;
                let dx = self.newton_direction(&e).ok_or("singular Newton system")?;
                let slope = e.grad.dot(&dx);
                let decrement = -slope;
                if decrement.is_nan() || decrement <= 1e-9 {
                    break;
                }
                steps += 1;
                if steps > opts.max_newton {
                    return Err(format!("Newton budget of {} steps exhausted", opts.max_newton));
                }
                let mut alpha = 1.0;
                let mut accepted = None;
                while alpha > 1e-12 {
                    let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, b)| a + alpha * b).collect();
                    if let Some(v) = self.eval(&trial, t, false) {
                        if v.phi <= e.phi + 0.25 * alpha * slope {
                            accepted = Some((trial, v.phi));
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                let Some((trial, phi)) = accepted else { break };
                x = trial;
                // stalled by rounding in an ill-conditioned system
                if decrement < 1e-7 || e.phi - phi <= 1e-13 * (1.0 + e.phi.abs()) {
                    break;
                }
            }
            if theta / t <= opts.tol {
                break;
            }
            t *= opts.mu;
        }
        let mats = (0..self.groups)
            .map(|i| hermitian_part(&from_coords(self.block(&x, i), self.l)).scale(self.power))
            .collect();
        Ok(CovarianceSet { mats })
    }
}
