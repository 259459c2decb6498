//! Matrix-free Gauss-Seidel: the system exposes one row at a time, the
//! sweep updates in place in fixed lexicographic order so results are
//! deterministic.

use crate::error::{Error, Result};

/// A linear system `A x = rhs` evaluated row by row.
pub trait RowSystem {
    fn len(&self) -> usize;
    /// `(A x)_row` using the current contents of `x`.
    fn apply_row(&self, x: &[f64], row: usize) -> f64;
    /// Diagonal entry `A_{row,row}`, available in closed form.
    fn diagonal(&self, row: usize) -> f64;
}

/// Convergence report of a successful solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GsReport {
    pub sweeps: usize,
    pub last_update: f64,
}

/// Sweeps until the max-norm of the per-sweep update drops below
/// `tolerance`; `x` carries the initial guess in and the solution out.
pub fn gauss_seidel<S: RowSystem>(
    system: &S,
    rhs: &[f64],
    x: &mut [f64],
    tolerance: f64,
    max_sweeps: usize,
) -> Result<GsReport> {
    debug_assert_eq!(rhs.len(), system.len());
    debug_assert_eq!(x.len(), system.len());
    let mut last_update = f64::INFINITY;
    for sweep in 1..=max_sweeps {
        let mut max_update = 0.0f64;
        for row in 0..system.len() {
            let residual = rhs[row] - system.apply_row(x, row);
            let delta = residual / system.diagonal(row);
            x[row] += delta;
            let magnitude = delta.abs();
            if magnitude > max_update {
                max_update = magnitude;
            }
        }
        if max_update < tolerance {
            return Ok(GsReport {
                sweeps: sweep,
                last_update: max_update,
            });
        }
        last_update = max_update;
    }
    Err(Error::NonConvergence {
        iterations: max_sweeps,
        last_update,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dense {
        n: usize,
        a: Vec<f64>,
    }

    impl RowSystem for Dense {
        fn len(&self) -> usize {
            self.n
        }
        fn apply_row(&self, x: &[f64], row: usize) -> f64 {
            (0..self.n).map(|col| self.a[row * self.n + col] * x[col]).sum()
        }
        fn diagonal(&self, row: usize) -> f64 {
            self.a[row * self.n + row]
        }
    }

    /// Dense LU solve with partial pivoting, the oracle for small systems.
    fn lu_solve(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
        let mut m = a.to_vec();
        let mut x = b.to_vec();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| {
                    m[p * n + col]
                        .abs()
                        .partial_cmp(&m[q * n + col].abs())
                        .unwrap()
                })
                .unwrap();
            if pivot != col {
                for k in 0..n {
                    m.swap(col * n + k, pivot * n + k);
                }
                x.swap(col, pivot);
            }
            for row in col + 1..n {
                let factor = m[row * n + col] / m[col * n + col];
                for k in col..n {
                    m[row * n + k] -= factor * m[col * n + k];
                }
                x[row] -= factor * x[col];
            }
        }
        for row in (0..n).rev() {
            for k in row + 1..n {
                x[row] -= m[row * n + k] * x[k];
            }
            x[row] /= m[row * n + row];
        }
        x
    }

    fn identity(n: usize) -> Dense {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
        }
        Dense { n, a }
    }

    #[test]
    fn identity_system_returns_rhs() {
        let system = identity(4);
        let rhs = [1.0, -2.0, 3.5, 0.25];
        let mut x = [9.0; 4];
        gauss_seidel(&system, &rhs, &mut x, 1e-12, 10).unwrap();
        assert_eq!(x, rhs);
    }

    #[test]
    fn zero_rhs_zero_guess_is_fixed_point() {
        let system = identity(3);
        let mut x = [0.0; 3];
        let report = gauss_seidel(&system, &[0.0; 3], &mut x, 1e-12, 10).unwrap();
        assert_eq!(x, [0.0; 3]);
        assert_eq!(report.sweeps, 1);
    }

    fn random_dominant(n: usize, seed: u64) -> (Dense, Vec<f64>) {
        // Deterministic congruential fill, diagonally dominant by construction.
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut a = vec![0.0; n * n];
        for row in 0..n {
            let mut off = 0.0;
            for col in 0..n {
                if col != row {
                    let v = next();
                    a[row * n + col] = v;
                    off += v.abs();
                }
            }
            a[row * n + row] = off + 1.0 + next().abs();
        }
        let rhs: Vec<f64> = (0..n).map(|_| next() * 4.0).collect();
        (Dense { n, a }, rhs)
    }

    #[test]
    fn matches_dense_lu_oracle() {
        for seed in [7u64, 19, 1234] {
            let (system, rhs) = random_dominant(5, seed);
            let mut x = vec![0.0; 5];
            gauss_seidel(&system, &rhs, &mut x, 1e-12, 500).unwrap();
            let exact = lu_solve(&system.a, &rhs, 5);
            for i in 0..5 {
                assert!(
                    (x[i] - exact[i]).abs() < 1e-8,
                    "row {i}: {} vs {}",
                    x[i],
                    exact[i]
                );
            }
        }
    }

    #[test]
    fn result_independent_of_initial_guess() {
        let (system, rhs) = random_dominant(6, 99);
        let mut from_zero = vec![0.0; 6];
        gauss_seidel(&system, &rhs, &mut from_zero, 1e-10, 500).unwrap();
        let mut warm: Vec<f64> = rhs.iter().map(|v| v * 0.9).collect();
        gauss_seidel(&system, &rhs, &mut warm, 1e-10, 500).unwrap();
        for i in 0..6 {
            assert!((from_zero[i] - warm[i]).abs() <= 1e-9);
        }
    }

    #[test]
    fn reports_non_convergence() {
        let (system, rhs) = random_dominant(5, 3);
        let mut x = vec![0.0; 5];
        let err = gauss_seidel(&system, &rhs, &mut x, 1e-14, 2).unwrap_err();
        match err {
            Error::NonConvergence {
                iterations,
                last_update,
            } => {
                assert_eq!(iterations, 2);
                assert!(last_update.is_finite());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
