use crate::error::{ensure_finite, Error, Result};

use super::grid::GridSpec;

/// Real samples of a scalar function on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        ensure_finite(&values, "scalar field")?;
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::from_raw(grid, vec![0.0; grid.len()])
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self::from_raw(grid, vec![c; grid.len()])
    }

    /// Samples `f` at every grid point. `f` receives a `d`-length coordinate slice.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let d = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.point(i)[..d])).collect();
        Self::from_raw(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn check_finite(&self) -> Result<()> {
        ensure_finite(&self.values, "scalar field")
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Box L2 norm by the rectangle rule.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    /// Grid inner product `sum f g h^d`.
    pub fn inner(&self, other: &ScalarField) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>()
            * self.grid.cell_volume())
    }

    pub fn same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
        self.same_grid(other)?;
        Ok(Self::from_raw(
            self.grid,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> ScalarField {
        self.map(|v| s * v)
    }

    pub fn add_assign_scaled(&mut self, s: f64, other: &ScalarField) -> Result<()> {
        self.same_grid(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn mean_subtracted(&self) -> ScalarField {
        let m = self.mean();
        self.map(|v| v - m)
    }

    /// `||self - other||_2 / ||other||_2` on the box (absolute when `other` vanishes).
    pub fn relative_l2_error(&self, reference: &ScalarField) -> Result<f64> {
        let diff = self.sub(reference)?.l2_norm();
        let scale = reference.l2_norm();
        Ok(if scale > 0.0 { diff / scale } else { diff })
    }
}

/// `d` scalar components sharing one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("vector field needs components".into()))?;
        let grid = *first.grid();
        if components.len() != grid.dim() {
            return Err(Error::InvalidParameter(format!(
                "expected {} components, got {}",
                grid.dim(),
                components.len()
            )));
        }
        if components.iter().any(|c| *c.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { components })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { components: vec![ScalarField::zeros(grid); grid.dim()] }
    }

    /// Samples a vector-valued function; `f` writes `d` components into its output slice.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64], &mut [f64])) -> Self {
        let d = grid.dim();
        let mut comps = vec![vec![0.0; grid.len()]; d];
        let mut out = [0.0; 3];
        for i in 0..grid.len() {
            let x = grid.point(i);
            f(&x[..d], &mut out[..d]);
            for (c, &v) in comps.iter_mut().zip(&out[..d]) {
                c[i] = v;
            }
        }
        Self {
            components: comps.into_iter().map(|v| ScalarField::from_raw(grid, v)).collect(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [ScalarField] {
        &mut self.components
    }

    pub fn into_components(self) -> Vec<ScalarField> {
        self.components
    }

    pub fn check_finite(&self) -> Result<()> {
        self.components.iter().try_for_each(ScalarField::check_finite)
    }

    pub fn same_grid(&self, other: &VectorField) -> Result<()> {
        self.components[0].same_grid(&other.components[0])
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let grid = *self.grid();
        let values = (0..grid.len())
            .map(|i| self.components.iter().map(|c| c.values[i] * c.values[i]).sum::<f64>().sqrt())
            .collect();
        ScalarField::from_raw(grid, values)
    }

    pub fn max_abs(&self) -> f64 {
        self.magnitude().max_abs()
    }

    pub fn l2_norm(&self) -> f64 {
        self.components.iter().map(|c| c.l2_norm().powi(2)).sum::<f64>().sqrt()
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> VectorField {
        Self { components: self.components.iter().map(f).collect() }
    }

    pub fn zip_with(
        &self,
        other: &VectorField,
        f: impl Fn(&ScalarField, &ScalarField) -> Result<ScalarField>,
    ) -> Result<VectorField> {
        self.same_grid(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components })
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        self.zip_with(other, ScalarField::add)
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        self.zip_with(other, ScalarField::sub)
    }

    pub fn scale(&self, s: f64) -> VectorField {
        self.map_components(|c| c.scale(s))
    }

    pub fn relative_l2_error(&self, reference: &VectorField) -> Result<f64> {
        let diff = self.sub(reference)?.l2_norm();
        let scale = reference.l2_norm();
        Ok(if scale > 0.0 { diff / scale } else { diff })
    }
}

/// `d x d` scalar components, row-major: entry `(i, j)` at `i * d + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    dim: usize,
    components: Vec<ScalarField>,
}

impl TensorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("tensor field needs components".into()))?;
        let grid = *first.grid();
        let d = grid.dim();
        if components.len() != d * d {
            return Err(Error::InvalidParameter(format!(
                "expected {} components, got {}",
                d * d,
                components.len()
            )));
        }
        if components.iter().any(|c| *c.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { dim: d, components })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let d = grid.dim();
        Self { dim: d, components: vec![ScalarField::zeros(grid); d * d] }
    }

    /// `u (x) v` with entries `u_i v_j`.
    pub fn outer(u: &VectorField, v: &VectorField) -> Result<Self> {
        u.same_grid(v)?;
        let d = u.dim();
        let mut components = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                components.push(u.component(i).mul(v.component(j))?);
            }
        }
        Ok(Self { dim: d, components })
    }

    /// Sets entry `(i, j)`, keeping everything else.
    pub fn with_entry(mut self, i: usize, j: usize, f: ScalarField) -> Result<Self> {
        self.components[0].same_grid(&f)?;
        self.components[i * self.dim + j] = f;
        Ok(self)
    }

    pub fn grid(&self) -> &GridSpec {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarField {
        &self.components[i * self.dim + j]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn check_finite(&self) -> Result<()> {
        self.components.iter().try_for_each(ScalarField::check_finite)
    }

    pub fn transpose(&self) -> TensorField {
        let d = self.dim;
        let components = (0..d * d).map(|k| self.entry(k % d, k / d).clone()).collect();
        Self { dim: d, components }
    }

    pub fn zip_with(
        &self,
        other: &TensorField,
        f: impl Fn(&ScalarField, &ScalarField) -> Result<ScalarField>,
    ) -> Result<TensorField> {
        self.components[0].same_grid(&other.components[0])?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim: self.dim, components })
    }

    pub fn add(&self, other: &TensorField) -> Result<TensorField> {
        self.zip_with(other, ScalarField::add)
    }

    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        self.zip_with(other, ScalarField::sub)
    }

    pub fn scale(&self, s: f64) -> TensorField {
        Self { dim: self.dim, components: self.components.iter().map(|c| c.scale(s)).collect() }
    }

    /// `(T + T^T) / 2`.
    pub fn symmetrized(&self) -> TensorField {
        let t = self.transpose();
        self.zip_with(&t, |a, b| Ok(a.add(b)?.scale(0.5))).expect("same grid")
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.entry(i, j) == self.entry(j, i)))
    }

    /// Frobenius L2 norm on the box.
    pub fn l2_norm(&self) -> f64 {
        self.components.iter().map(|c| c.l2_norm().powi(2)).sum::<f64>().sqrt()
    }
}

/// Uniformly sampled snapshots on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<S> {
    horizon: f64,
    times: Vec<f64>,
    snapshots: Vec<S>,
}

impl<S> TimeSeries<S> {
    /// Snapshots at `t_k = k * interval`, `k = 0..len`.
    pub fn uniform(interval: f64, snapshots: Vec<S>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::InsufficientData("empty time series".into()));
        }
        if !(interval.is_finite() && interval > 0.0) {
            return Err(Error::InvalidParameter(format!("sampling interval {interval}")));
        }
        let times: Vec<f64> = (0..snapshots.len()).map(|k| k as f64 * interval).collect();
        let horizon = times[times.len() - 1].max(interval);
        Ok(Self { horizon, times, snapshots })
    }

    /// Snapshots with an explicit horizon; times are `k * T / len`.
    pub fn with_horizon(horizon: f64, snapshots: Vec<S>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::InsufficientData("empty time series".into()));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidParameter(format!("horizon {horizon}")));
        }
        let step = horizon / snapshots.len() as f64;
        let times = (0..snapshots.len()).map(|k| k as f64 * step).collect();
        Ok(Self { horizon, times, snapshots })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[S] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Spacing between consecutive snapshots.
    pub fn interval(&self) -> f64 {
        if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            self.horizon
        }
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> TimeSeries<T> {
        TimeSeries {
            horizon: self.horizon,
            times: self.times.clone(),
            snapshots: self.snapshots.iter().map(f).collect(),
        }
    }

    pub fn try_map<T>(&self, f: impl Fn(&S) -> Result<T>) -> Result<TimeSeries<T>> {
        Ok(TimeSeries {
            horizon: self.horizon,
            times: self.times.clone(),
            snapshots: self.snapshots.iter().map(f).collect::<Result<_>>()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::periodic_2pi(2, 16).unwrap()
    }

    #[test]
    fn rejects_non_finite() {
        let g = grid();
        let mut v = vec![0.0; g.len()];
        v[3] = f64::INFINITY;
        assert!(matches!(ScalarField::new(g, v), Err(Error::NonFinite(_))));
    }

    #[test]
    fn outer_product_is_exactly_symmetric() {
        let g = GridSpec::periodic_2pi(3, 8).unwrap();
        let u = VectorField::from_fn(g, |x, out| {
            out[0] = x[0].sin() * 1.3;
            out[1] = (x[1] + 0.1).cos() / 7.0;
            out[2] = x[2].exp();
        });
        let t = TensorField::outer(&u, &u).unwrap();
        assert!(t.is_symmetric());
    }

    #[test]
    fn grid_mismatch_detected() {
        let a = ScalarField::zeros(grid());
        let b = ScalarField::zeros(GridSpec::periodic_2pi(2, 32).unwrap());
        assert!(matches!(a.add(&b), Err(Error::GridMismatch)));
        assert!(matches!(VectorField::new(vec![a, b]), Err(Error::GridMismatch)));
    }

    #[test]
    fn uniform_series_times() {
        let s = TimeSeries::uniform(0.5, vec![1, 2, 3]).unwrap();
        assert_eq!(s.times(), &[0.0, 0.5, 1.0]);
        assert_eq!(s.horizon(), 1.0);
        assert!(TimeSeries::<i32>::uniform(0.5, vec![]).is_err());
    }
}
