//! Anisotropic Cartesian grids: per-dimension refinement levels, value
//! fields in row-major node order and multilinear evaluation.

use crate::error::{Error, Result};

/// Per-dimension refinement levels `l_k >= 0`; the grid along dimension `k`
/// has mesh width `2^-l_k` times the domain length and `2^l_k + 1` points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn isotropic(dimension: usize, level: u32) -> Self {
        Self(vec![level; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn level(&self, dim: usize) -> u32 {
        self.0[dim]
    }

    /// `|l|_1`, the sum of the levels.
    pub fn l1_norm(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `|l|_inf`, the largest level.
    pub fn linf_norm(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

/// Axis-aligned box the grid discretizes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceDomain {
    bounds: Vec<(f64, f64)>,
}

/// Default upper bound of every forward-rate axis.
pub const DEFAULT_FORWARD_MAX: f64 = 0.1;
/// Default upper bound of the volatility axis.
pub const DEFAULT_VOL_MAX: f64 = 3.5;

impl SpaceDomain {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidInput("domain needs at least one axis".into()));
        }
        for (dim, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "domain bounds must satisfy lower < upper in dimension {dim}"
                )));
            }
        }
        Ok(Self { bounds })
    }

    /// `n_forwards` rate axes on `[0, 0.1]` followed by the volatility axis
    /// on `[0, 3.5]`.
    pub fn for_forwards(n_forwards: usize) -> Self {
        let mut bounds = vec![(0.0, DEFAULT_FORWARD_MAX); n_forwards];
        bounds.push((0.0, DEFAULT_VOL_MAX));
        Self { bounds }
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn lower(&self, dim: usize) -> f64 {
        self.bounds[dim].0
    }

    pub fn upper(&self, dim: usize) -> f64 {
        self.bounds[dim].1
    }

    pub fn length(&self, dim: usize) -> f64 {
        self.bounds[dim].1 - self.bounds[dim].0
    }
}

/// An anisotropic grid: refinement multi-index plus domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub levels: MultiIndex,
    pub domain: SpaceDomain,
}

impl GridSpec {
    pub fn new(levels: MultiIndex, domain: SpaceDomain) -> Result<Self> {
        if levels.dimension() != domain.dimension() {
            return Err(Error::InvalidInput(format!(
                "multi-index dimension {} does not match domain dimension {}",
                levels.dimension(),
                domain.dimension()
            )));
        }
        if levels.linf_norm() > 30 {
            return Err(Error::InvalidInput(
                "refinement level above 30 is not representable".into(),
            ));
        }
        Ok(Self { levels, domain })
    }

    pub fn dimension(&self) -> usize {
        self.levels.dimension()
    }

    /// Points along dimension `k`: `2^l_k + 1`.
    pub fn points(&self, dim: usize) -> usize {
        (1usize << self.levels.level(dim)) + 1
    }

    /// Mesh width along dimension `k`: `2^-l_k` times the domain length.
    pub fn mesh_width(&self, dim: usize) -> f64 {
        self.domain.length(dim) / (1u64 << self.levels.level(dim)) as f64
    }

    /// Coordinate of node index `i` along dimension `k`.
    pub fn coord(&self, dim: usize, index: usize) -> f64 {
        self.domain.lower(dim) + index as f64 * self.mesh_width(dim)
    }

    pub fn node_count(&self) -> usize {
        (0..self.dimension()).map(|k| self.points(k)).product()
    }

    /// Row-major strides, last dimension fastest.
    pub fn strides(&self) -> Vec<usize> {
        let d = self.dimension();
        let mut strides = vec![1usize; d];
        for k in (0..d.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.points(k + 1);
        }
        strides
    }

    /// Visits every node in flat (lexicographic) order with its multi-index.
    pub fn for_each_node<F: FnMut(usize, &[usize])>(&self, mut visit: F) {
        let d = self.dimension();
        let points: Vec<usize> = (0..d).map(|k| self.points(k)).collect();
        let mut index = vec![0usize; d];
        let total = self.node_count();
        for flat in 0..total {
            visit(flat, &index);
            for k in (0..d).rev() {
                index[k] += 1;
                if index[k] < points[k] {
                    break;
                }
                index[k] = 0;
            }
        }
    }
}

/// Values on the nodes of a grid, flat in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(spec: GridSpec) -> Self {
        let n = spec.node_count();
        Self {
            spec,
            values: vec![0.0; n],
        }
    }

    /// Samples `f` at every node coordinate.
    pub fn sample<F>(spec: GridSpec, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let d = spec.dimension();
        let mut values = vec![0.0; spec.node_count()];
        let mut coords = vec![0.0; d];
        let mut error = None;
        spec.for_each_node(|flat, index| {
            if error.is_some() {
                return;
            }
            for k in 0..d {
                coords[k] = spec.coord(k, index[k]);
            }
            match f(&coords) {
                Ok(v) => values[flat] = v,
                Err(e) => error = Some(e),
            }
        });
        match error {
            Some(e) => Err(e),
            None => Ok(Self { spec, values }),
        }
    }
}

/// Multilinear interpolation of a grid function at an interior point
/// (domain boundaries inclusive). Exact at nodes and on multilinear
/// functions.
pub fn multilinear_interpolate(grid: &GridFunction, point: &[f64]) -> Result<f64> {
    let spec = &grid.spec;
    let d = spec.dimension();
    if point.len() != d {
        return Err(Error::InvalidInput(format!(
            "point dimension {} does not match grid dimension {d}",
            point.len()
        )));
    }
    // Enclosing cell index and fractional offset per dimension.
    let mut cell = vec![0usize; d];
    let mut frac = vec![0.0f64; d];
    for k in 0..d {
        let x = point[k];
        if x < spec.domain.lower(k) || x > spec.domain.upper(k) {
            return Err(Error::OutsideDomain {
                dimension: k,
                value: x,
            });
        }
        let u = (x - spec.domain.lower(k)) / spec.mesh_width(k);
        let last_cell = spec.points(k) - 2;
        let c = (u.floor() as usize).min(last_cell);
        cell[k] = c;
        frac[k] = u - c as f64;
    }
    let strides = spec.strides();
    let base: usize = (0..d).map(|k| cell[k] * strides[k]).sum();
    let mut acc = 0.0;
    for corner in 0..(1usize << d) {
        let mut weight = 1.0;
        let mut offset = 0usize;
        for k in 0..d {
            if corner >> k & 1 == 1 {
                weight *= frac[k];
                offset += strides[k];
            } else {
                weight *= 1.0 - frac[k];
            }
        }
        if weight != 0.0 {
            acc += weight * grid.values[base + offset];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit_domain(d: usize) -> SpaceDomain {
        SpaceDomain::new(vec![(0.0, 1.0); d]).unwrap()
    }

    #[test]
    fn node_counts_match_level_formula() {
        let spec = GridSpec::new(MultiIndex::isotropic(2, 10), SpaceDomain::for_forwards(1)).unwrap();
        assert_eq!(spec.node_count(), 1050625);
        let spec = GridSpec::new(MultiIndex::isotropic(4, 3), SpaceDomain::for_forwards(3)).unwrap();
        assert_eq!(spec.node_count(), 6561);
        let spec = GridSpec::new(MultiIndex(vec![2, 0, 3]), unit_domain(3)).unwrap();
        assert_eq!(spec.node_count(), 5 * 2 * 9);
    }

    #[test]
    fn mesh_widths_and_coords() {
        let spec = GridSpec::new(MultiIndex(vec![3]), SpaceDomain::new(vec![(0.0, 3.5)]).unwrap())
            .unwrap();
        assert_abs_diff_eq!(spec.mesh_width(0), 3.5 / 8.0, epsilon = 1e-16);
        assert_abs_diff_eq!(spec.coord(0, 8), 3.5, epsilon = 1e-15);
        assert_eq!(spec.coord(0, 0), 0.0);
    }

    #[test]
    fn strides_are_row_major() {
        let spec = GridSpec::new(MultiIndex(vec![1, 2, 0]), unit_domain(3)).unwrap();
        // points: 3, 5, 2 -> strides: 10, 2, 1
        assert_eq!(spec.strides(), vec![10, 2, 1]);
    }

    #[test]
    fn for_each_node_is_lexicographic() {
        let spec = GridSpec::new(MultiIndex(vec![0, 1]), unit_domain(2)).unwrap();
        let mut seen = Vec::new();
        spec.for_each_node(|flat, idx| seen.push((flat, idx.to_vec())));
        assert_eq!(
            seen,
            vec![
                (0, vec![0, 0]),
                (1, vec![0, 1]),
                (2, vec![0, 2]),
                (3, vec![1, 0]),
                (4, vec![1, 1]),
                (5, vec![1, 2]),
            ]
        );
    }

    #[test]
    fn interpolation_reproduces_node_values() {
        let spec = GridSpec::new(MultiIndex(vec![2, 3]), unit_domain(2)).unwrap();
        let grid = GridFunction::sample(spec.clone(), |x| Ok(x[0].sin() + x[1].cos())).unwrap();
        let mut checked = 0;
        spec.for_each_node(|flat, idx| {
            let point = [spec.coord(0, idx[0]), spec.coord(1, idx[1])];
            let value = multilinear_interpolate(&grid, &point).unwrap();
            assert_abs_diff_eq!(value, grid.values[flat], epsilon = 1e-14);
            checked += 1;
        });
        assert_eq!(checked, spec.node_count());
    }

    #[test]
    fn interpolation_exact_on_affine() {
        let spec = GridSpec::new(MultiIndex(vec![2, 1, 3]), unit_domain(3)).unwrap();
        let f = |x: &[f64]| 0.3 + 1.7 * x[0] - 0.9 * x[1] + 0.25 * x[2];
        let grid = GridFunction::sample(spec, |x| Ok(f(x))).unwrap();
        for point in [[0.31, 0.77, 0.05], [0.0, 1.0, 0.5], [0.999, 0.001, 0.25]] {
            let value = multilinear_interpolate(&grid, &point).unwrap();
            assert_abs_diff_eq!(value, f(&point), epsilon = 1e-14);
        }
    }

    #[test]
    fn interpolation_exact_on_bilinear_product() {
        let spec = GridSpec::new(MultiIndex(vec![3, 2]), unit_domain(2)).unwrap();
        let grid = GridFunction::sample(spec, |x| Ok(x[0] * x[1])).unwrap();
        for point in [[0.11, 0.93], [0.62, 0.37], [1.0, 1.0], [0.875, 0.25]] {
            let value = multilinear_interpolate(&grid, &point).unwrap();
            assert_abs_diff_eq!(value, point[0] * point[1], epsilon = 1e-14);
        }
    }

    #[test]
    fn interpolation_rejects_outside_points() {
        let spec = GridSpec::new(MultiIndex(vec![2]), unit_domain(1)).unwrap();
        let grid = GridFunction::zeros(spec);
        let err = multilinear_interpolate(&grid, &[1.0 + 1e-9]).unwrap_err();
        assert!(matches!(err, Error::OutsideDomain { dimension: 0, .. }));
        assert!(multilinear_interpolate(&grid, &[-0.1]).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn interpolation_exact_on_random_affine(
                coeffs in proptest::collection::vec(-2.0f64..2.0, 3),
                px in 0.0f64..=1.0,
                py in 0.0f64..=1.0,
            ) {
                let spec = GridSpec::new(MultiIndex(vec![2, 4]), unit_domain(2)).unwrap();
                let f = move |x: &[f64]| coeffs[0] + coeffs[1] * x[0] + coeffs[2] * x[1];
                let grid = GridFunction::sample(spec, |x| Ok(f(x))).unwrap();
                let value = multilinear_interpolate(&grid, &[px, py]).unwrap();
                prop_assert!((value - f(&[px, py])).abs() <= 1e-12);
            }
        }
    }
}
