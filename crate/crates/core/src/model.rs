//! SABR/LIBOR market model parameterization: correlation structure,
//! measure-dependent drifts and the joint forward/volatility correlation
//! matrix used by the simulator.

use crate::error::{Error, Result};
use crate::market::TenorStructure;

/// Model parameters of the forward-rate system
/// `dF_i = mu_i F_i^beta dt + alpha_i V F_i^beta dW_i`, `dV = sigma V dZ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SabrLmmParams {
    /// Local-volatility exponent in `[0, 1]`.
    pub beta: f64,
    /// Deterministic volatility coefficient per forward.
    pub alphas: Vec<f64>,
    /// Volatility of volatility.
    pub sigma: f64,
    /// Forward/volatility correlation per forward.
    pub phis: Vec<f64>,
    /// Correlation decay rate of `rho_ij = exp(-lambda |T_i - T_j|)`.
    pub lambda: f64,
    /// Initial volatility level, one unless overridden.
    pub v0: f64,
}

impl SabrLmmParams {
    pub fn new(
        beta: f64,
        alphas: Vec<f64>,
        sigma: f64,
        phis: Vec<f64>,
        lambda: f64,
    ) -> Result<Self> {
        let params = Self {
            beta,
            alphas,
            sigma,
            phis,
            lambda,
            v0: 1.0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_v0(mut self, v0: f64) -> Self {
        self.v0 = v0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidInput(format!(
                "beta outside [0,1]: {}",
                self.beta
            )));
        }
        if self.alphas.len() != self.phis.len() {
            return Err(Error::InvalidInput(
                "alphas and phis must have equal length".into(),
            ));
        }
        if self.alphas.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidInput(
                "alphas must be finite and non-negative".into(),
            ));
        }
        if self.phis.iter().any(|p| p.abs() > 1.0) {
            return Err(Error::InvalidInput("phis must lie in [-1,1]".into()));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidInput("sigma must be non-negative".into()));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidInput("lambda must be non-negative".into()));
        }
        if !(self.v0 > 0.0) || !self.v0.is_finite() {
            return Err(Error::InvalidInput("v0 must be positive".into()));
        }
        Ok(())
    }
}

/// Pricing measure selecting the drift formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// Numeraire `P(t, T_N)`.
    Terminal,
    /// Numeraire `P(t, T_a)`.
    ForwardAt(usize),
}

/// Time-independent forward/forward correlation `exp(-lambda |T_i - T_j|)`.
pub fn correlation(lambda: f64, t_i: f64, t_j: f64) -> f64 {
    (-lambda * (t_i - t_j).abs()).exp()
}

/// Forward rates visible to the drift evaluation: a contiguous block
/// `F_first..F_{first+len-1}` of the full forward vector.
#[derive(Debug, Clone, Copy)]
pub struct ForwardState<'a> {
    first: usize,
    rates: &'a [f64],
}

impl<'a> ForwardState<'a> {
    pub fn new(first: usize, rates: &'a [f64]) -> Self {
        Self { first, rates }
    }

    pub fn first(&self) -> usize {
        self.first
    }

    pub fn last(&self) -> usize {
        self.first + self.rates.len() - 1
    }

    fn get(&self, index: usize) -> Result<f64> {
        if index < self.first || index > self.last() {
            return Err(Error::InvalidInput(format!(
                "drift needs forward {index}, state covers {}..={}",
                self.first,
                self.last()
            )));
        }
        Ok(self.rates[index - self.first])
    }
}

/// Drift `mu_i` of forward `i` at volatility level `v` under `measure`.
///
/// Terminal measure: `-alpha_i V^2 sum_{j=i+1}^{N-1} tau_j F_j^beta rho_ij
/// alpha_j / (1 + tau_j F_j)`, zero at `i = N-1`. Forward measure at `a`:
/// zero at `i = a`, the analogous positive sum over `j = a+1..=i` for `i > a`.
pub fn drift(
    i: usize,
    state: ForwardState<'_>,
    v: f64,
    measure: Measure,
    params: &SabrLmmParams,
    tenor: &TenorStructure,
) -> Result<f64> {
    let n = tenor.forward_count();
    let (sign, lo, hi) = match measure {
        Measure::Terminal => {
            if i >= n {
                return Err(Error::InvalidInput(format!(
                    "forward index {i} outside tenor range 0..{n}"
                )));
            }
            if i == n - 1 {
                return Ok(0.0);
            }
            (-1.0, i + 1, n - 1)
        }
        Measure::ForwardAt(a) => {
            if i < a || i >= n {
                return Err(Error::InvalidInput(format!(
                    "forward index {i} outside measure range {a}..{n}"
                )));
            }
            if i == a {
                return Ok(0.0);
            }
            (1.0, a + 1, i)
        }
    };
    let t_i = tenor.date(i);
    let mut sum = 0.0;
    for j in lo..=hi {
        let f_j = state.get(j)?;
        let tau_j = tenor.accrual(j);
        let factor = 1.0 + tau_j * f_j;
        if factor <= 0.0 {
            return Err(Error::DegenerateForward { index: j, factor });
        }
        let rho = correlation(params.lambda, t_i, tenor.date(j));
        sum += tau_j * f_j.powf(params.beta) / factor * rho * params.alphas[j];
    }
    Ok(sign * params.alphas[i] * v * v * sum)
}

/// Dense symmetric matrix in row-major storage, sized for the joint
/// forward/volatility correlation (at most a handful of factors).
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    values: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![0.0; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.n + col] = value;
    }

    /// Lower-triangular Cholesky factor; fails on a non-positive pivot.
    pub fn cholesky(&self) -> Result<SquareMatrix> {
        let n = self.n;
        let mut lower = SquareMatrix::zeros(n);
        for row in 0..n {
            for col in 0..=row {
                let mut sum = self.get(row, col);
                for k in 0..col {
                    sum -= lower.get(row, k) * lower.get(col, k);
                }
                if row == col {
                    if sum <= 0.0 {
                        return Err(Error::NotPositiveDefinite { pivot: row });
                    }
                    lower.set(row, col, sum.sqrt());
                } else {
                    lower.set(row, col, sum / lower.get(col, col));
                }
            }
        }
        Ok(lower)
    }

    /// `y = self * x` for the lower-triangular case used by the simulator.
    pub fn lower_mul(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for row in 0..self.n {
            let mut acc = 0.0;
            for col in 0..=row {
                acc += self.get(row, col) * x[col];
            }
            y[row] = acc;
        }
    }
}

/// Joint correlation of the state block `F_first..F_{first+k-1}` and the
/// volatility factor: forwards block `rho_ij`, last row/column `phi_i`,
/// unit diagonal. Validated positive definite via Cholesky.
pub fn joint_correlation(
    params: &SabrLmmParams,
    tenor: &TenorStructure,
    first: usize,
    k: usize,
) -> Result<SquareMatrix> {
    if k < 1 || first + k > tenor.forward_count() {
        return Err(Error::InvalidInput(format!(
            "state block {first}..{} outside tenor forwards",
            first + k
        )));
    }
    let n = k + 1;
    let mut matrix = SquareMatrix::zeros(n);
    for p in 0..k {
        for q in 0..k {
            let rho = correlation(params.lambda, tenor.date(first + p), tenor.date(first + q));
            matrix.set(p, q, rho);
        }
        let phi = params.phis[first + p];
        matrix.set(p, k, phi);
        matrix.set(k, p, phi);
    }
    matrix.set(k, k, 1.0);
    matrix.cholesky()?;
    Ok(matrix)
}
