//! Sparse operators on a [`FockSpace`].
//!
//! Hamiltonians are returned in angular-frequency units (`H/ħ`, rad/s), so a
//! propagator over a duration `τ` is `exp(-i τ H)`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chain::CouplingMatrix;
use crate::error::{Error, Result};
use crate::fock::FockSpace;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Lower,
    Raise,
}

/// Form of the Coulomb coupling between local modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HoppingForm {
    /// `(κ/2)(a_j† a_k + a_j a_k†)`, number conserving.
    #[default]
    Rwa,
    /// `(κ/2)(a_j† + a_j)(a_k† + a_k)`.
    Full,
}

/// Square matrix in compressed-sparse-row layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dimension: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseOperator {
    pub fn zero(dimension: usize) -> Self {
        SparseOperator {
            dimension,
            row_ptr: vec![0; dimension + 1],
            cols: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(dimension: usize) -> Self {
        Self::diagonal(&vec![1.0; dimension])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self::from_triplets(
            diag.len(),
            diag.iter().enumerate().map(|(i, &d)| (i, i, Complex64::new(d, 0.0))),
        )
    }

    /// Builds an operator from `(row, col, value)` entries; duplicates are
    /// summed and exact zeros dropped.
    pub fn from_triplets(dimension: usize, entries: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut map: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for (r, c, v) in entries {
            assert!(r < dimension && c < dimension, "entry ({r}, {c}) outside {dimension}");
            *map.entry((r, c)).or_insert(ZERO) += v;
        }
        let mut row_ptr = vec![0; dimension + 1];
        let mut cols = Vec::with_capacity(map.len());
        let mut values = Vec::with_capacity(map.len());
        for ((r, c), v) in map {
            if v == ZERO {
                continue;
            }
            row_ptr[r + 1] += 1;
            cols.push(c);
            values.push(v);
        }
        for r in 0..dimension {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseOperator {
            dimension,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dimension)
            .flat_map(move |r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |p| (r, self.cols[p], self.values[p])))
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(p) => self.values[range.start + p],
            Err(_) => ZERO,
        }
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = ZERO);
        self.apply_add(Complex64::new(1.0, 0.0), x, y);
    }

    /// `y += scale · A x`.
    pub fn apply_add(&self, scale: Complex64, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dimension);
        debug_assert_eq!(y.len(), self.dimension);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[p] * x[self.cols[p]];
            }
            *out += scale * acc;
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.dimension];
        self.apply(x, &mut y);
        y
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dimension, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }

    pub fn add(&self, other: &SparseOperator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_triplets(
            self.dimension,
            self.triplets().chain(other.triplets()),
        ))
    }

    pub fn mul(&self, other: &SparseOperator) -> Result<Self> {
        self.check_same(other)?;
        let mut entries = Vec::new();
        for (r, k, a) in self.triplets() {
            for p in other.row_ptr[k]..other.row_ptr[k + 1] {
                entries.push((r, other.cols[p], a * other.values[p]));
            }
        }
        Ok(Self::from_triplets(self.dimension, entries))
    }

    pub fn commutator(&self, other: &SparseOperator) -> Result<Self> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        ab.add(&ba.scale(-1.0))
    }

    /// Largest `|A_rc − conj(A_cr)|`; exactly zero for the builders here.
    pub fn hermiticity_defect(&self) -> f64 {
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dimension, self.dimension, ZERO);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Diagonal entries, if the operator has no off-diagonal ones.
    pub fn as_real_diagonal(&self) -> Option<Vec<f64>> {
        let mut diag = vec![0.0; self.dimension];
        for (r, c, v) in self.triplets() {
            if r != c || v.im != 0.0 {
                return None;
            }
            diag[r] = v.re;
        }
        Some(diag)
    }

    fn check_same(&self, other: &SparseOperator) -> Result<()> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: other.dimension,
            });
        }
        Ok(())
    }
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `a_mode` or `a_mode†` tensored with the identity on the other modes.
pub fn ladder_operator(space: &FockSpace, mode: usize, kind: LadderKind) -> Result<SparseOperator> {
    space.check_mode(mode)?;
    let stride = space.stride(mode);
    let entries = (0..space.dimension()).filter_map(|i| {
        let n = space.occupation(i, mode);
        match kind {
            LadderKind::Lower if n > 0 => Some((i - stride, i, real((n as f64).sqrt()))),
            LadderKind::Raise if n < space.cutoff() => Some((i + stride, i, real(((n + 1) as f64).sqrt()))),
            _ => None,
        }
    });
    Ok(SparseOperator::from_triplets(space.dimension(), entries))
}

pub fn number_operator(space: &FockSpace, mode: usize) -> Result<SparseOperator> {
    space.check_mode(mode)?;
    let diag: Vec<f64> = (0..space.dimension())
        .map(|i| space.occupation(i, mode) as f64)
        .collect();
    Ok(SparseOperator::diagonal(&diag))
}

pub fn total_number_operator(space: &FockSpace) -> SparseOperator {
    let diag: Vec<f64> = (0..space.dimension())
        .map(|i| space.total_occupation(i) as f64)
        .collect();
    SparseOperator::diagonal(&diag)
}

/// Coulomb hopping Hamiltonian `Σ_{j>k} (κ_{j,k}/2) · coupling(j, k)`.
pub fn hopping_hamiltonian(space: &FockSpace, couplings: &CouplingMatrix, form: HoppingForm) -> Result<SparseOperator> {
    if couplings.mode_count() != space.mode_count() {
        return Err(Error::DimensionMismatch {
            expected: space.mode_count(),
            found: couplings.mode_count(),
        });
    }
    let cutoff = space.cutoff();
    let mut entries = Vec::new();
    for (j, k) in couplings.pairs() {
        let half = couplings.get(j, k) / 2.0;
        if half == 0.0 {
            continue;
        }
        let (sj, sk) = (space.stride(j), space.stride(k));
        for i in 0..space.dimension() {
            let nj = space.occupation(i, j);
            let nk = space.occupation(i, k);
            // Each term is emitted together with its mirror so the result is
            // Hermitian entry by entry.
            // a_j† a_k
            if nk > 0 && nj < cutoff {
                let v = half * ((nj + 1) as f64).sqrt() * (nk as f64).sqrt();
                let target = i + sj - sk;
                entries.push((target, i, real(v)));
                entries.push((i, target, real(v)));
            }
            // a_j† a_k†
            if form == HoppingForm::Full && nj < cutoff && nk < cutoff {
                let v = half * ((nj + 1) as f64).sqrt() * ((nk + 1) as f64).sqrt();
                let target = i + sj + sk;
                entries.push((target, i, real(v)));
                entries.push((i, target, real(v)));
            }
        }
    }
    Ok(SparseOperator::from_triplets(space.dimension(), entries))
}

/// Pieces of the squared quadrature `(a† + a)²` acting on one mode:
/// `a†²`, `a²`, and the diagonal `a†a + a a†` (truncated at the cutoff).
#[derive(Debug, Clone)]
pub struct QuadratureParts {
    pub raise_sq: SparseOperator,
    pub lower_sq: SparseOperator,
    pub diagonal: Vec<f64>,
}

pub fn quadrature_parts(space: &FockSpace, mode: usize) -> Result<QuadratureParts> {
    space.check_mode(mode)?;
    let cutoff = space.cutoff();
    let stride = space.stride(mode);
    let mut raise = Vec::new();
    let mut diagonal = Vec::with_capacity(space.dimension());
    for i in 0..space.dimension() {
        let n = space.occupation(i, mode);
        let upper = if n < cutoff { (n + 1) as f64 } else { 0.0 };
        diagonal.push(n as f64 + upper);
        if n + 2 <= cutoff {
            let v = ((n + 1) as f64).sqrt() * ((n + 2) as f64).sqrt();
            raise.push((i + 2 * stride, i, real(v)));
        }
    }
    let raise_sq = SparseOperator::from_triplets(space.dimension(), raise);
    let lower_sq = raise_sq.adjoint();
    Ok(QuadratureParts {
        raise_sq,
        lower_sq,
        diagonal,
    })
}

/// Trap-modulation Hamiltonian `(Ω²/4ω₀)(a† + a)²` on one mode.
pub fn modulation_hamiltonian(
    space: &FockSpace,
    mode: usize,
    omega_sq_excess: f64,
    secular_frequency: f64,
) -> Result<SparseOperator> {
    if !(secular_frequency > 0.0) {
        return Err(Error::domain("secular frequency must be positive"));
    }
    let parts = quadrature_parts(space, mode)?;
    let c = omega_sq_excess / (4.0 * secular_frequency);
    if c == 0.0 {
        return Ok(SparseOperator::zero(space.dimension()));
    }
    let diag = SparseOperator::diagonal(&parts.diagonal);
    Ok(parts.raise_sq.add(&parts.lower_sq)?.add(&diag)?.scale(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_coupling_matrix, IonChainConfig};
    use proptest::prelude::*;

    fn one(v: f64) -> Complex64 {
        real(v)
    }

    #[test]
    fn ladder_matrix_elements() {
        let space = FockSpace::new(1, 2).unwrap();
        let a = ladder_operator(&space, 0, LadderKind::Lower).unwrap();
        let ad = ladder_operator(&space, 0, LadderKind::Raise).unwrap();
        assert_eq!(a.get(0, 1), one(1.0));
        assert_eq!(ad.get(2, 1), one(2f64.sqrt()));
        assert_eq!(ad, a.adjoint());
        // a† on |n_max> vanishes
        let mut top = vec![ZERO; 3];
        top[2] = one(1.0);
        assert!(ad.mul_vec(&top).iter().all(|v| *v == ZERO));
        assert!(ladder_operator(&space, 1, LadderKind::Lower).is_err());
    }

    #[test]
    fn ladder_acts_on_the_right_mode() {
        let space = FockSpace::new(3, 3).unwrap();
        let a1 = ladder_operator(&space, 1, LadderKind::Lower).unwrap();
        let from = space.index(&[2, 3, 1]).unwrap();
        let to = space.index(&[2, 2, 1]).unwrap();
        assert!((a1.get(to, from).re - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rwa_hopping_two_modes() {
        let space = FockSpace::new(2, 3).unwrap();
        let kappa = CouplingMatrix::from_fn(2, |_, _| 2.0);
        let h = hopping_hamiltonian(&space, &kappa, HoppingForm::Rwa).unwrap();
        // |n1, n0> = |0,1> and |1,0>
        let i01 = space.index(&[1, 0]).unwrap();
        let i10 = space.index(&[0, 1]).unwrap();
        assert_eq!(h.get(i10, i01), one(1.0));
        assert_eq!(h.hermiticity_defect(), 0.0);
        let n = total_number_operator(&space);
        assert_eq!(h.commutator(&n).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn full_hopping_has_pair_creation() {
        let space = FockSpace::new(2, 3).unwrap();
        let kappa = CouplingMatrix::from_fn(2, |_, _| 2.0);
        let h = hopping_hamiltonian(&space, &kappa, HoppingForm::Full).unwrap();
        let i00 = space.index(&[0, 0]).unwrap();
        let i11 = space.index(&[1, 1]).unwrap();
        assert_eq!(h.get(i11, i00), one(1.0));
        assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn hopping_rejects_mismatched_modes() {
        let space = FockSpace::new(2, 3).unwrap();
        assert!(hopping_hamiltonian(&space, &CouplingMatrix::zeros(3), HoppingForm::Rwa).is_err());
    }

    #[test]
    fn modulation_elements() {
        let space = FockSpace::new(1, 4).unwrap();
        let w0 = 3.0;
        let z = modulation_hamiltonian(&space, 0, 0.0, w0).unwrap();
        assert!(z.is_zero());
        let h = modulation_hamiltonian(&space, 0, 2.0, w0).unwrap();
        let c = 2.0 / (4.0 * w0);
        assert!((h.get(2, 0).re - c * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(h.hermiticity_defect(), 0.0);
        // Matches the square of the truncated position operator.
        let a = ladder_operator(&space, 0, LadderKind::Lower).unwrap();
        let x = a.add(&a.adjoint()).unwrap();
        let x2 = x.mul(&x).unwrap().scale(c);
        for r in 0..5 {
            for col in 0..5 {
                assert!((x2.get(r, col) - h.get(r, col)).norm() < 1e-14);
            }
        }
    }

    proptest! {
        #[test]
        fn builders_are_hermitian(modes in 1usize..4, cutoff in 1usize..5, full in any::<bool>(), om in -1e3f64..1e3) {
            let space = FockSpace::new(modes, cutoff).unwrap();
            let chain = IonChainConfig::equidistant(modes, 30e-6, 2.0 * std::f64::consts::PI * 2.2e6).unwrap();
            let kappa = build_coupling_matrix(&chain).unwrap();
            let form = if full { HoppingForm::Full } else { HoppingForm::Rwa };
            let h = hopping_hamiltonian(&space, &kappa, form).unwrap();
            prop_assert_eq!(h.hermiticity_defect(), 0.0);
            for m in 0..modes {
                let hm = modulation_hamiltonian(&space, m, om, 1.0).unwrap();
                prop_assert_eq!(hm.hermiticity_defect(), 0.0);
            }
        }
    }
}
