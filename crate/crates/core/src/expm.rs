//! Exact evolution under a time-independent Hermitian Hamiltonian.
//!
//! The Hamiltonian is split into the connected components of its sparsity
//! graph (number sectors for the RWA hopping term) and each block is
//! diagonalised once; evolving for any duration is then two small dense
//! products per block.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::SparseOperator;

#[derive(Debug, Clone)]
struct Block {
    indices: Vec<usize>,
    eigenvalues: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

/// Reusable `exp(-i t H)` for a fixed Hermitian `H`.
#[derive(Debug, Clone)]
pub struct ConstantPropagator {
    dimension: usize,
    blocks: Vec<Block>,
    /// Diagonal-only basis states: `(index, energy)`.
    singles: Vec<(usize, f64)>,
}

impl ConstantPropagator {
    pub fn new(hamiltonian: &SparseOperator) -> Result<Self> {
        let scale = hamiltonian.max_abs().max(f64::MIN_POSITIVE);
        let defect = hamiltonian.hermiticity_defect();
        if defect > 1e-12 * scale {
            return Err(Error::Propagation(format!(
                "Hamiltonian is not Hermitian (defect {defect:.3e})"
            )));
        }
        let n = hamiltonian.dimension();
        let components = connected_components(hamiltonian);
        let mut blocks = Vec::new();
        let mut singles = Vec::new();
        for indices in components {
            if indices.len() == 1 {
                let i = indices[0];
                singles.push((i, hamiltonian.get(i, i).re));
                continue;
            }
            let size = indices.len();
            let mut local = DMatrix::from_element(size, size, Complex64::new(0.0, 0.0));
            for (a, &r) in indices.iter().enumerate() {
                for (b, &c) in indices.iter().enumerate() {
                    local[(a, b)] = hamiltonian.get(r, c);
                }
            }
            let eig = local.symmetric_eigen();
            blocks.push(Block {
                indices,
                eigenvalues: eig.eigenvalues.iter().copied().collect(),
                vectors: eig.eigenvectors,
            });
        }
        Ok(ConstantPropagator {
            dimension: n,
            blocks,
            singles,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Size of the largest block that needed a dense eigendecomposition.
    pub fn largest_block(&self) -> usize {
        self.blocks.iter().map(|b| b.indices.len()).max().unwrap_or(1)
    }

    /// Applies `exp(-i t H)` in place.
    pub fn apply(&self, state: &mut [Complex64], duration: f64) -> Result<()> {
        if state.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: state.len(),
            });
        }
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::domain(format!("evolution time {duration} must be non-negative")));
        }
        for &(i, e) in &self.singles {
            state[i] *= Complex64::from_polar(1.0, -e * duration);
        }
        for block in &self.blocks {
            let x = DVector::from_iterator(block.indices.len(), block.indices.iter().map(|&i| state[i]));
            let mut c = block.vectors.ad_mul(&x);
            for (ci, &e) in c.iter_mut().zip(&block.eigenvalues) {
                *ci *= Complex64::from_polar(1.0, -e * duration);
            }
            let y = &block.vectors * c;
            for (&i, v) in block.indices.iter().zip(y.iter()) {
                state[i] = *v;
            }
        }
        Ok(())
    }
}

fn connected_components(op: &SparseOperator) -> Vec<Vec<usize>> {
    let n = op.dimension();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (r, c, _) in op.triplets() {
        let (a, b) = (find(&mut parent, r), find(&mut parent, c));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        groups[root].push(i);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

/// Dense `exp(A)` by scaling and squaring of a Taylor series. Intended for
/// small matrices and as an independent reference in tests.
pub fn expm_dense(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm = a
        .row_iter()
        .map(|r| r.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / Complex64::new(2f64.powi(squarings), 0.0);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
        if term.iter().map(|v| v.norm()).fold(0.0, f64::max) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}
