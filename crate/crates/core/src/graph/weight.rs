use std::fmt::Debug;

use nalgebra::DMatrix;

/// Inversions whose estimated reciprocal condition number falls below this
/// are reported singular.
///
/// The estimate for an accumulated sum `S = Σ t_i` is
/// `1 / (‖S⁻¹‖₁ · Σ a_i ‖t_i‖₁)`, where `a_i ≥ 1` bounds how much rounding
/// error the factors of `t_i` already carry. Cancellation that leaves `S`
/// at the level of that error is treated as singularity.
pub const RCOND_THRESHOLD: f64 = 1e-14;

/// Values that can sit on the edges of a model graph: scalars for the trivial
/// partition, dense blocks otherwise. Multiplication need not commute.
pub trait EdgeWeight: Clone + Debug + Send + Sync + 'static {
    /// Running sum of signed terms.
    type Sum;

    /// The block `J[rows, cols]`.
    fn extract(j: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> Self;

    /// True when some entry exceeds `tol` in magnitude (`tol = 0` means exactly nonzero).
    fn exceeds(&self, tol: f64) -> bool;

    fn identity(dim: usize) -> Self;

    fn mul(&self, rhs: &Self) -> Self;

    fn norm1(&self) -> f64;

    fn to_dense(&self) -> DMatrix<f64>;

    fn transpose(&self) -> Self;

    fn new_sum(rows: usize, cols: usize) -> Self::Sum;

    /// Adds `±term`; `amplification` is the term's relative error in units of
    /// machine epsilon.
    fn add_term(sum: &mut Self::Sum, term: &Self, negate: bool, amplification: f64);

    /// The accumulated value and the amplification-weighted sum of the terms' 1-norms.
    fn finish(sum: Self::Sum) -> (Self, f64);

    /// Inverse and its condition estimate `‖m⁻¹‖₁ · max(‖m‖₁, scale)`, or
    /// `None` when that estimate exceeds `1 / RCOND_THRESHOLD`.
    fn invert(&self, scale: f64) -> Option<(Self, f64)>;
}

/// Neumaier-compensated scalar sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
    magnitude: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        self.add_weighted(x, 1.0);
    }

    /// Adds `x`, counting `weight · |x|` toward the magnitude.
    pub fn add_weighted(&mut self, x: f64, weight: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
        self.magnitude += weight * x.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }
}

impl EdgeWeight for f64 {
    type Sum = CompensatedSum;

    fn extract(j: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> Self {
        debug_assert!(rows.len() == 1 && cols.len() == 1);
        j[(rows[0], cols[0])]
    }

    fn exceeds(&self, tol: f64) -> bool {
        self.abs() > tol
    }

    fn identity(_dim: usize) -> Self {
        1.0
    }

    #[inline]
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn norm1(&self) -> f64 {
        self.abs()
    }

    fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, *self)
    }

    fn transpose(&self) -> Self {
        *self
    }

    fn new_sum(_rows: usize, _cols: usize) -> Self::Sum {
        CompensatedSum::default()
    }

    #[inline]
    fn add_term(sum: &mut Self::Sum, term: &Self, negate: bool, amplification: f64) {
        sum.add_weighted(if negate { -term } else { *term }, amplification);
    }

    fn finish(sum: Self::Sum) -> (Self, f64) {
        (sum.value(), sum.magnitude())
    }

    fn invert(&self, scale: f64) -> Option<(Self, f64)> {
        let scale = scale.max(self.abs());
        if !self.is_finite() || *self == 0.0 || self.abs() < RCOND_THRESHOLD * scale {
            return None;
        }
        Some((1.0 / self, scale / self.abs()))
    }
}

/// Dense block sum with a running 1-norm magnitude.
#[derive(Debug, Clone)]
pub struct BlockSum {
    sum: DMatrix<f64>,
    magnitude: f64,
}

impl EdgeWeight for DMatrix<f64> {
    type Sum = BlockSum;

    fn extract(j: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> Self {
        DMatrix::from_fn(rows.len(), cols.len(), |r, c| j[(rows[r], cols[c])])
    }

    fn exceeds(&self, tol: f64) -> bool {
        self.iter().any(|x| x.abs() > tol)
    }

    fn identity(dim: usize) -> Self {
        DMatrix::identity(dim, dim)
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn norm1(&self) -> f64 {
        norm1(self)
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }

    fn transpose(&self) -> Self {
        DMatrix::transpose(self)
    }

    fn new_sum(rows: usize, cols: usize) -> Self::Sum {
        BlockSum {
            sum: DMatrix::zeros(rows, cols),
            magnitude: 0.0,
        }
    }

    fn add_term(sum: &mut Self::Sum, term: &Self, negate: bool, amplification: f64) {
        if negate {
            sum.sum -= term;
        } else {
            sum.sum += term;
        }
        sum.magnitude += amplification * norm1(term);
    }

    fn finish(sum: Self::Sum) -> (Self, f64) {
        (sum.sum, sum.magnitude)
    }

    fn invert(&self, scale: f64) -> Option<(Self, f64)> {
        invert_block_with_condition(self, scale)
    }
}

/// Maximum absolute column sum.
pub fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU inverse with a reciprocal-condition check against `max(‖m‖₁, scale)`.
pub fn invert_block(m: &DMatrix<f64>, scale: f64) -> Option<DMatrix<f64>> {
    invert_block_with_condition(m, scale).map(|(inv, _)| inv)
}

/// [`invert_block`] that also returns the condition estimate.
pub fn invert_block_with_condition(m: &DMatrix<f64>, scale: f64) -> Option<(DMatrix<f64>, f64)> {
    if !m.is_square() || m.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let inv = m.clone().lu().try_inverse()?;
    let inv_norm = norm1(&inv);
    if !inv_norm.is_finite() {
        return None;
    }
    let condition = inv_norm * norm1(m).max(scale);
    if condition.is_nan() || condition > 1.0 / RCOND_THRESHOLD {
        return None;
    }
    Some((inv, condition))
}
