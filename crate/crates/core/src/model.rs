//! Canonical-form Gaussian model parameters and variable partitions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, PartitionError, Result};

/// Information (precision) matrix `J` with an optional potential vector `h`.
///
/// The density is proportional to `exp(-x'Jx/2 + h'x)`, so the covariance is
/// `J^{-1}` and the mean is `J^{-1} h`.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationModel {
    information: DMatrix<f64>,
    potential: Option<DVector<f64>>,
}

impl InformationModel {
    /// Wraps a dense matrix. `J` must be square, finite and exactly symmetric.
    pub fn new(information: DMatrix<f64>, potential: Option<DVector<f64>>) -> Result<Self> {
        let n = information.nrows();
        if n == 0 || information.ncols() != n {
            return Err(Error::Dimension(format!(
                "information matrix must be square and non-empty, got {}x{}",
                information.nrows(),
                information.ncols()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let v = information[(i, j)];
                if !v.is_finite() {
                    return Err(Error::Configuration(format!(
                        "non-finite entry at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                if j < i && v != information[(j, i)] {
                    return Err(Error::Asymmetric {
                        row: j + 1,
                        col: i + 1,
                        upper: information[(j, i)],
                        lower: v,
                    });
                }
            }
        }
        if let Some(h) = &potential {
            if h.len() != n {
                return Err(Error::Dimension(format!(
                    "potential has length {} but the model has {} variables",
                    h.len(),
                    n
                )));
            }
        }
        Ok(Self {
            information,
            potential,
        })
    }

    /// Builds a model from a matrix that may carry rounding asymmetry,
    /// replacing it by `(J + J') / 2`.
    pub fn symmetrized(information: DMatrix<f64>, potential: Option<DVector<f64>>) -> Result<Self> {
        let sym = (&information + information.transpose()) * 0.5;
        Self::new(sym, potential)
    }

    pub fn dim(&self) -> usize {
        self.information.nrows()
    }

    pub fn information(&self) -> &DMatrix<f64> {
        &self.information
    }

    pub fn potential(&self) -> Option<&DVector<f64>> {
        self.potential.as_ref()
    }

    pub fn with_potential(mut self, potential: DVector<f64>) -> Result<Self> {
        if potential.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "potential has length {} but the model has {} variables",
                potential.len(),
                self.dim()
            )));
        }
        self.potential = Some(potential);
        Ok(self)
    }

    /// First zero diagonal entry, if any (0-based).
    pub fn zero_diagonal(&self) -> Option<usize> {
        (0..self.dim()).find(|&i| self.information[(i, i)] == 0.0)
    }
}

/// Ordered disjoint index sets `I_1 .. I_B` covering `0..n`.
///
/// Each block is kept sorted; the block order is the order given by the caller
/// and defines the vertex ids of the block graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
    owner: Vec<usize>,
}

impl BlockPartition {
    /// Validates a partition given as 0-based index lists.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        if blocks.is_empty() {
            return Err(PartitionError::NoBlocks);
        }
        let mut owner = vec![usize::MAX; n];
        let mut sorted = Vec::with_capacity(blocks.len());
        for (b, mut block) in blocks.into_iter().enumerate() {
            if block.is_empty() {
                return Err(PartitionError::EmptyBlock { block: b });
            }
            block.sort_unstable();
            for &i in &block {
                if i >= n {
                    return Err(PartitionError::OutOfRange { index: i, n });
                }
                if owner[i] != usize::MAX {
                    return Err(PartitionError::Overlap { index: i });
                }
                owner[i] = b;
            }
            sorted.push(block);
        }
        if let Some(index) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(PartitionError::Missing { index });
        }
        Ok(Self {
            n,
            blocks: sorted,
            owner,
        })
    }

    /// Same as [`BlockPartition::new`] with 1-based indices.
    pub fn from_one_based(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let mut zero = Vec::with_capacity(blocks.len());
        for block in blocks {
            let mut out = Vec::with_capacity(block.len());
            for i in block {
                if i == 0 || i > n {
                    return Err(PartitionError::OutOfRange { index: i, n });
                }
                out.push(i - 1);
            }
            zero.push(out);
        }
        Self::new(n, zero)
    }

    /// The trivial partition into `n` singletons.
    pub fn singletons(n: usize) -> Self {
        Self {
            n,
            blocks: (0..n).map(|i| vec![i]).collect(),
            owner: (0..n).collect(),
        }
    }

    /// Consecutive blocks of the given sizes.
    pub fn contiguous(sizes: &[usize]) -> Result<Self, PartitionError> {
        let mut start = 0;
        let mut blocks = Vec::with_capacity(sizes.len());
        for &s in sizes {
            blocks.push((start..start + s).collect());
            start += s;
        }
        Self::new(start, blocks)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    /// Block that contains scalar index `i`.
    pub fn owner(&self, i: usize) -> usize {
        self.owner[i]
    }

    pub fn is_singletons(&self) -> bool {
        self.blocks.len() == self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_matrix() {
        let j = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.25, 1.0]);
        assert!(matches!(
            InformationModel::new(j, None),
            Err(Error::Asymmetric { .. })
        ));
    }

    #[test]
    fn rejects_potential_of_wrong_length() {
        let j = DMatrix::identity(3, 3);
        let h = DVector::zeros(2);
        assert!(matches!(
            InformationModel::new(j, Some(h)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn partition_errors() {
        assert_eq!(
            BlockPartition::new(3, vec![vec![0, 1], vec![1, 2]]),
            Err(PartitionError::Overlap { index: 1 })
        );
        assert_eq!(
            BlockPartition::new(3, vec![vec![0, 1]]),
            Err(PartitionError::Missing { index: 2 })
        );
        assert_eq!(
            BlockPartition::new(3, vec![vec![0, 1, 2], vec![]]),
            Err(PartitionError::EmptyBlock { block: 1 })
        );
        assert_eq!(
            BlockPartition::new(2, vec![vec![0, 5]]),
            Err(PartitionError::OutOfRange { index: 5, n: 2 })
        );
        assert_eq!(
            BlockPartition::new(2, vec![]),
            Err(PartitionError::NoBlocks)
        );
    }

    #[test]
    fn non_contiguous_blocks_are_sorted() {
        let p = BlockPartition::from_one_based(4, vec![vec![4, 1], vec![3, 2]]).unwrap();
        assert_eq!(p.block(0), &[0, 3]);
        assert_eq!(p.block(1), &[1, 2]);
        assert_eq!(p.owner(3), 0);
        assert!(!p.is_singletons());
        assert!(BlockPartition::singletons(4).is_singletons());
    }
}
