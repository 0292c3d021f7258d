//! Reference models and seeded random model generators.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{BlockPartition, InformationModel};

/// The 5-cycle with unit diagonal and coupling `r` between neighbours.
pub fn cycle_c5(r: f64) -> InformationModel {
    let mut j = DMatrix::identity(5, 5);
    for i in 0..5 {
        let k = (i + 1) % 5;
        j[(i, k)] = r;
        j[(k, i)] = r;
    }
    InformationModel::new(j, None).expect("symmetric by construction")
}

/// Self-loop block `L` of the 9-variable thin membrane.
pub fn membrane_self_block(a: f64, b: f64) -> DMatrix<f64> {
    let d = a + 5.0 * b;
    DMatrix::from_row_slice(3, 3, &[d, -b, 0.0, -b, d, -b, 0.0, -b, d])
}

/// Coupling block `E` of the 9-variable thin membrane.
pub fn membrane_edge_block(b: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[-b, -b, 0.0, -b, 0.0, -b, 0.0, -b, -b])
}

/// The 9x9 thin-membrane information matrix `[[L,E,E],[E,L,E],[E,E,L]]`,
/// positive definite for `a, b > 0`.
pub fn thin_membrane(a: f64, b: f64) -> InformationModel {
    let l = membrane_self_block(a, b);
    let e = membrane_edge_block(b);
    let mut j = DMatrix::zeros(9, 9);
    for p in 0..3 {
        for q in 0..3 {
            let block = if p == q { &l } else { &e };
            j.view_mut((3 * p, 3 * q), (3, 3)).copy_from(block);
        }
    }
    InformationModel::new(j, None).expect("symmetric by construction")
}

/// Partition of the thin membrane into the three rows of the grid.
pub fn thin_membrane_partition() -> BlockPartition {
    BlockPartition::contiguous(&[3, 3, 3]).expect("valid partition")
}

/// Graph Laplacian plus identity for an undirected edge list; always SPD.
pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> InformationModel {
    let mut j = DMatrix::identity(n, n);
    for &(u, v) in edges {
        j[(u, v)] = -1.0;
        j[(v, u)] = -1.0;
        j[(u, u)] += 1.0;
        j[(v, v)] += 1.0;
    }
    InformationModel::new(j, None).expect("symmetric by construction")
}

fn nonzero_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let x: f64 = rng.random_range(-1.0..1.0);
        if x.abs() > 1e-3 {
            return x;
        }
    }
}

/// Turns a symmetric coupling matrix into an SPD information matrix by
/// shifting its spectrum, then applies a random diagonal rescaling.
fn make_spd<R: Rng + ?Sized>(rng: &mut R, mut w: DMatrix<f64>) -> DMatrix<f64> {
    let n = w.nrows();
    let lambda_min = SymmetricEigen::new(w.clone()).eigenvalues.min();
    let shift = -lambda_min + rng.random_range(0.2..1.0);
    for i in 0..n {
        w[(i, i)] += shift + rng.random_range(0.0..0.5);
    }
    let scale: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let mut j = DMatrix::from_fn(n, n, |r, c| w[(r, c)] * scale[r] * scale[c]);
    j.fill_lower_triangle_with_upper_triangle();
    j
}

/// Random SPD model on `n` variables whose graph has each edge with
/// probability `density`. Off-diagonal couplings are uniform in [-1, 1], so
/// dense draws are frequently not walk-summable.
pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> InformationModel {
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in (i + 1)..n {
            if rng.random_bool(density.clamp(0.0, 1.0)) {
                let x = nonzero_uniform(rng);
                w[(i, k)] = x;
                w[(k, i)] = x;
            }
        }
    }
    InformationModel::new(make_spd(rng, w), None).expect("symmetric by construction")
}

/// Random SPD model with a random (generally non-contiguous) partition into
/// `blocks` groups. Off-diagonal blocks are present with probability
/// `density` and are themselves partially sparse.
pub fn random_block_spd<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    blocks: usize,
    density: f64,
) -> (InformationModel, BlockPartition) {
    assert!(blocks >= 1 && blocks <= n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    // every block gets one index, the rest are scattered
    let mut groups: Vec<Vec<usize>> = order[..blocks].iter().map(|&i| vec![i]).collect();
    for &i in &order[blocks..] {
        groups[rng.random_range(0..blocks)].push(i);
    }
    let partition = BlockPartition::new(n, groups).expect("valid partition");

    let mut w = DMatrix::zeros(n, n);
    for p in 0..blocks {
        let bp = partition.block(p).to_vec();
        for (x, &i) in bp.iter().enumerate() {
            for &k in &bp[x + 1..] {
                let v = nonzero_uniform(rng);
                w[(i, k)] = v;
                w[(k, i)] = v;
            }
        }
        for q in (p + 1)..blocks {
            if !rng.random_bool(density.clamp(0.0, 1.0)) {
                continue;
            }
            let bq = partition.block(q).to_vec();
            let mut any = false;
            for &i in &bp {
                for &k in &bq {
                    if rng.random_bool(0.7) {
                        let v = nonzero_uniform(rng);
                        w[(i, k)] = v;
                        w[(k, i)] = v;
                        any = true;
                    }
                }
            }
            if !any {
                let (i, k) = (bp[0], bq[0]);
                let v = nonzero_uniform(rng);
                w[(i, k)] = v;
                w[(k, i)] = v;
            }
        }
    }
    let model = InformationModel::new(make_spd(rng, w), None).expect("symmetric by construction");
    (model, partition)
}

/// Random spanning tree on `n` vertices with random labels.
pub fn random_tree_edges<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<(usize, usize)> {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    (1..n)
        .map(|i| (labels[rng.random_range(0..i)], labels[i]))
        .collect()
}

/// Random SPD model whose graph is a random spanning tree.
pub fn random_tree_spd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> InformationModel {
    let mut w = DMatrix::zeros(n, n);
    for (u, v) in random_tree_edges(rng, n) {
        let x = nonzero_uniform(rng);
        w[(u, v)] = x;
        w[(v, u)] = x;
    }
    InformationModel::new(make_spd(rng, w), None).expect("symmetric by construction")
}

/// Symmetric positive semidefinite `A A'` of the given rank (< n makes it singular).
pub fn random_low_rank<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> InformationModel {
    let a = DMatrix::from_fn(n, rank, |_, _| nonzero_uniform(rng));
    let mut j = &a * a.transpose();
    j.fill_lower_triangle_with_upper_triangle();
    InformationModel::new(j, None).expect("symmetric by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_models_are_positive_definite() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..8 {
            let m = random_spd(&mut rng, n, 0.5);
            assert!(m.information().clone().cholesky().is_some());
            let (m, p) = random_block_spd(&mut rng, n + 2, 3, 0.6);
            assert!(m.information().clone().cholesky().is_some());
            assert_eq!(p.num_blocks(), 3);
            let t = random_tree_spd(&mut rng, n);
            assert!(t.information().clone().cholesky().is_some());
        }
    }

    #[test]
    fn thin_membrane_matches_printed_layout() {
        let m = thin_membrane(1.0, 1.0);
        let j = m.information();
        assert_eq!(j[(0, 0)], 6.0);
        assert_eq!(j[(0, 3)], -1.0);
        assert_eq!(j[(0, 5)], 0.0);
        assert_eq!(j[(4, 8)], -1.0);
        assert_eq!(j[(2, 6)], 0.0);
        let nnz_row0 = (0..9).filter(|&c| c != 0 && j[(0, c)] != 0.0).count();
        assert_eq!(nnz_row0, 5);
    }
}
