//! Discretized theta-scheme system for one anisotropic grid.
//!
//! Node order is row-major with the volatility axis last (stride one). Each
//! node carries a class and a block of precomputed stencil coefficients;
//! the coefficients depend only on the node state, never on time, so one
//! table serves every time level.
//!
//! Row classes:
//! - forward-rate boundary nodes are pinned to the terminal condition
//!   (Dirichlet) for all time levels;
//! - `V = 0` keeps only the convection terms, the diffusion and cross
//!   coefficients vanish there;
//! - `V = V_max` uses the ghost-point elimination of the zero Neumann
//!   condition: the volatility diffusion folds onto the inner neighbour
//!   with weight `2d` and the forward/volatility cross terms cancel.

use super::gauss_seidel::RowSystem;
use crate::error::Result;
use crate::grid::GridSpec;
use crate::model::{correlation, drift, ForwardState, Measure, SabrLmmParams};
use crate::pde::PdeProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NodeClass {
    Interior = 0,
    Dirichlet = 1,
    VolZero = 2,
    VolMax = 3,
}

/// Per-node coefficient block layout (see `offsets`):
/// `[diag0, d, b_0.., r_0.., a_0.., psi_0..]` where `diag0 = 2d + 2 sum b_i`.
pub(crate) struct ThetaSystem {
    n_forwards: usize,
    block: usize,
    coef: Vec<f64>,
    class: Vec<NodeClass>,
    strides: Vec<usize>,
    theta: f64,
}

/// The drift sums must stay inside the forwards the grid spans: the
/// terminal measure reaches the last tenor forward, the forward measure at
/// `a` reaches down to `a + 1`.
fn validate_measure_coverage(problem: &PdeProblem<'_>, n_forwards: usize) -> Result<()> {
    if n_forwards == 0 {
        return Ok(());
    }
    let first = problem.first_forward;
    let n = problem.tenor.forward_count();
    if first + n_forwards > n {
        return Err(crate::error::Error::InvalidInput(format!(
            "grid spans forwards {first}..{}, tenor has {n}",
            first + n_forwards
        )));
    }
    match problem.measure {
        Measure::Terminal => {
            if first + n_forwards != n {
                return Err(crate::error::Error::InvalidInput(format!(
                    "terminal-measure drift needs forwards up to {}, grid stops at {}",
                    n - 1,
                    first + n_forwards - 1
                )));
            }
        }
        Measure::ForwardAt(a) => {
            if a + 1 < first || a > first {
                return Err(crate::error::Error::InvalidInput(format!(
                    "forward measure at {a} incompatible with grid starting at forward {first}"
                )));
            }
        }
    }
    Ok(())
}

const DIAG0: usize = 0;
const VOL_DIFF: usize = 1;
const FWD_DIFF: usize = 2;

impl ThetaSystem {
    fn offset_drift(&self) -> usize {
        FWD_DIFF + self.n_forwards
    }

    fn offset_cross_fv(&self) -> usize {
        FWD_DIFF + 2 * self.n_forwards
    }

    fn offset_cross_ff(&self) -> usize {
        FWD_DIFF + 3 * self.n_forwards
    }

    pub fn build(problem: &PdeProblem<'_>, spec: &GridSpec, dt: f64, theta: f64) -> Result<Self> {
        let dims = spec.dimension();
        let n_forwards = dims - 1;
        let n_pairs = n_forwards * (n_forwards.saturating_sub(1)) / 2;
        let block = 2 + 3 * n_forwards + n_pairs;
        let nodes = spec.node_count();
        validate_measure_coverage(problem, n_forwards)?;

        let mut system = Self {
            n_forwards,
            block,
            coef: vec![0.0; nodes * block],
            class: vec![NodeClass::Interior; nodes],
            strides: spec.strides(),
            theta,
        };

        // Pairwise forward/forward correlations are node-independent.
        let first = problem.first_forward;
        let mut rho = vec![1.0; n_forwards * n_forwards];
        for p in 0..n_forwards {
            for q in 0..n_forwards {
                rho[p * n_forwards + q] = correlation(
                    problem.params.lambda,
                    problem.tenor.date(first + p),
                    problem.tenor.date(first + q),
                );
            }
        }

        let vol_points = spec.points(n_forwards);
        let mut coords = vec![0.0; dims];
        let mut result = Ok(());
        spec.for_each_node(|flat, index| {
            if result.is_err() {
                return;
            }
            let on_forward_boundary = (0..n_forwards)
                .any(|k| index[k] == 0 || index[k] == spec.points(k) - 1);
            let class = if on_forward_boundary {
                NodeClass::Dirichlet
            } else if index[n_forwards] == 0 {
                NodeClass::VolZero
            } else if index[n_forwards] == vol_points - 1 {
                NodeClass::VolMax
            } else {
                NodeClass::Interior
            };
            system.class[flat] = class;
            if class == NodeClass::Dirichlet {
                return;
            }
            for k in 0..dims {
                coords[k] = spec.coord(k, index[k]);
            }
            let out = &mut system.coef[flat * block..(flat + 1) * block];
            result = fill_coefficients(problem, spec, &coords, dt, &rho, out);
        });
        result?;
        Ok(system)
    }

    pub fn node_count(&self) -> usize {
        self.class.len()
    }

    pub(crate) fn class_of(&self, flat: usize) -> NodeClass {
        self.class[flat]
    }

    /// Spatial operator `L = dt * W` at one node, class-aware.
    #[inline]
    pub fn l_at(&self, x: &[f64], flat: usize) -> f64 {
        let c = &self.coef[flat * self.block..(flat + 1) * self.block];
        let nf = self.n_forwards;
        match self.class[flat] {
            NodeClass::Dirichlet => 0.0,
            NodeClass::VolZero => {
                let mut acc = 0.0;
                for i in 0..nf {
                    let s = self.strides[i];
                    acc += c[self.offset_drift() + i] * (x[flat + s] - x[flat - s]);
                }
                acc
            }
            NodeClass::VolMax => {
                let mut acc = 2.0 * c[VOL_DIFF] * x[flat - 1];
                for i in 0..nf {
                    let s = self.strides[i];
                    let b = c[FWD_DIFF + i];
                    let r = c[self.offset_drift() + i];
                    acc += (b - r) * x[flat - s] + (b + r) * x[flat + s];
                }
                let mut pair = self.offset_cross_ff();
                for i in 0..nf {
                    for j in i + 1..nf {
                        let psi = c[pair];
                        pair += 1;
                        if psi != 0.0 {
                            let si = self.strides[i];
                            let sj = self.strides[j];
                            acc += psi
                                * (x[flat - si - sj] + x[flat + si + sj]
                                    - x[flat - si + sj]
                                    - x[flat + si - sj]);
                        }
                    }
                }
                acc - c[DIAG0] * x[flat]
            }
            NodeClass::Interior => {
                let mut acc = c[VOL_DIFF] * (x[flat - 1] + x[flat + 1]);
                for i in 0..nf {
                    let s = self.strides[i];
                    let b = c[FWD_DIFF + i];
                    let r = c[self.offset_drift() + i];
                    acc += (b - r) * x[flat - s] + (b + r) * x[flat + s];
                }
                for i in 0..nf {
                    let a = c[self.offset_cross_fv() + i];
                    if a != 0.0 {
                        let s = self.strides[i];
                        acc += a
                            * (x[flat - s - 1] + x[flat + s + 1]
                                - x[flat - s + 1]
                                - x[flat + s - 1]);
                    }
                }
                let mut pair = self.offset_cross_ff();
                for i in 0..nf {
                    for j in i + 1..nf {
                        let psi = c[pair];
                        pair += 1;
                        if psi != 0.0 {
                            let si = self.strides[i];
                            let sj = self.strides[j];
                            acc += psi
                                * (x[flat - si - sj] + x[flat + si + sj]
                                    - x[flat - si + sj]
                                    - x[flat + si - sj]);
                        }
                    }
                }
                acc - c[DIAG0] * x[flat]
            }
        }
    }

    /// Right-hand side `(I + (1-theta) L) u` with Dirichlet rows pinned to
    /// the terminal condition.
    pub fn explicit_rhs(&self, u: &[f64], terminal: &[f64], rhs: &mut [f64]) {
        let theta_hat = 1.0 - self.theta;
        for flat in 0..self.node_count() {
            rhs[flat] = match self.class[flat] {
                NodeClass::Dirichlet => terminal[flat],
                _ => u[flat] + theta_hat * self.l_at(u, flat),
            };
        }
    }
}

impl RowSystem for ThetaSystem {
    fn len(&self) -> usize {
        self.node_count()
    }

    /// Implicit row `(I - theta L) x` at `row`; Dirichlet rows are identity.
    #[inline]
    fn apply_row(&self, x: &[f64], row: usize) -> f64 {
        match self.class[row] {
            NodeClass::Dirichlet => x[row],
            _ => x[row] - self.theta * self.l_at(x, row),
        }
    }

    #[inline]
    fn diagonal(&self, row: usize) -> f64 {
        match self.class[row] {
            NodeClass::Dirichlet => 1.0,
            _ => 1.0 + self.theta * self.coef[row * self.block + DIAG0],
        }
    }
}

/// Writes the stencil coefficient block for one node state.
///
/// `rho` is the precomputed pairwise correlation table of the spanned
/// forwards. The drift sum is evaluated in place (same formula as
/// `model::drift`) so the per-summand terms are shared across the block.
fn fill_coefficients(
    problem: &PdeProblem<'_>,
    spec: &GridSpec,
    coords: &[f64],
    dt: f64,
    rho: &[f64],
    out: &mut [f64],
) -> Result<()> {
    let params = problem.params;
    let nf = coords.len() - 1;
    let v = coords[nf];
    let v2 = v * v;
    let h_v = spec.mesh_width(nf);
    let first = problem.first_forward;
    let beta = params.beta;

    let pow_beta = |f: f64| if beta == 1.0 { f } else { f.powf(beta) };

    // Volatility diffusion d.
    out[VOL_DIFF] = dt * params.sigma * params.sigma * v2 / (2.0 * h_v * h_v);

    // Per-forward quantities shared by the drift sums: g_j = tau_j F_j^beta
    // alpha_j / (1 + tau_j F_j).
    let mut f_beta = vec![0.0; nf];
    let mut g = vec![0.0; nf];
    for k in 0..nf {
        let f = coords[k];
        let tau = problem.tenor.accrual(first + k);
        f_beta[k] = pow_beta(f);
        let factor = 1.0 + tau * f;
        if factor <= 0.0 {
            return Err(crate::error::Error::DegenerateForward {
                index: first + k,
                factor,
            });
        }
        g[k] = tau * f_beta[k] * params.alphas[first + k] / factor;
    }

    let mut diag0 = 0.0;
    for i in 0..nf {
        let alpha = params.alphas[first + i];
        let h_i = spec.mesh_width(i);
        let b = dt * v2 * alpha * alpha * f_beta[i] * f_beta[i] / (2.0 * h_i * h_i);
        out[FWD_DIFF + i] = b;
        diag0 += 2.0 * b;

        // Measure-dependent drift mu_i, same sums as model::drift but over
        // the precomputed g_j and rho table.
        let absolute = first + i;
        let mu = match problem.measure {
            Measure::Terminal => {
                let n = problem.tenor.forward_count();
                if absolute == n - 1 {
                    0.0
                } else {
                    let mut sum = 0.0;
                    for j in i + 1..n - first {
                        sum += g[j] * rho[i * nf + j];
                    }
                    -alpha * v2 * sum
                }
            }
            Measure::ForwardAt(a) => {
                if absolute == a {
                    0.0
                } else {
                    let lo = a + 1 - first;
                    let mut sum = 0.0;
                    for j in lo..=i {
                        sum += g[j] * rho[i * nf + j];
                    }
                    alpha * v2 * sum
                }
            }
        };
        out[2 + nf + i] = dt * mu * f_beta[i] / (2.0 * h_i);
        out[2 + 2 * nf + i] =
            dt * params.sigma * v2 * params.phis[absolute] * alpha * f_beta[i] / (4.0 * h_i * h_v);
    }
    out[DIAG0] = diag0 + 2.0 * out[VOL_DIFF];

    let mut pair = 2 + 3 * nf;
    for i in 0..nf {
        for j in i + 1..nf {
            let h_i = spec.mesh_width(i);
            let h_j = spec.mesh_width(j);
            out[pair] = dt
                * v2
                * rho[i * nf + j]
                * params.alphas[first + i]
                * params.alphas[first + j]
                * f_beta[i]
                * f_beta[j]
                / (4.0 * h_i * h_j);
            pair += 1;
        }
    }
    Ok(())
}

/// Coefficient formulas exposed for inspection and tests; the solver reads
/// the same values from its per-node table.
pub fn coefficients_at(
    problem: &PdeProblem<'_>,
    coords: &[f64],
    dt: f64,
    spec: &GridSpec,
) -> Result<super::PdeCoefficients> {
    let nf = coords.len() - 1;
    let n_pairs = nf * nf.saturating_sub(1) / 2;
    let first = problem.first_forward;
    let mut rho = vec![1.0; nf * nf];
    for p in 0..nf {
        for q in 0..nf {
            rho[p * nf + q] = correlation(
                problem.params.lambda,
                problem.tenor.date(first + p),
                problem.tenor.date(first + q),
            );
        }
    }
    let mut block = vec![0.0; 2 + 3 * nf + n_pairs];
    fill_coefficients(problem, spec, coords, dt, &rho, &mut block)?;
    Ok(super::PdeCoefficients {
        vol_diffusion: block[VOL_DIFF],
        forward_diffusion: block[FWD_DIFF..FWD_DIFF + nf].to_vec(),
        drift: block[2 + nf..2 + 2 * nf].to_vec(),
        forward_vol_cross: block[2 + 2 * nf..2 + 3 * nf].to_vec(),
        forward_forward_cross: block[2 + 3 * nf..].to_vec(),
    })
}
