//! Finite-dimensional C*-algebras as direct sums of full matrix blocks.
//!
//! An algebra is described by its block dimensions `[n_1, ..., n_K]`; an
//! element is a list of complex `n_k x n_k` matrices. Pure states are
//! single-block vector states, which is the complete list of pure states for
//! such algebras; general states are finite convex mixtures of them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A finite-dimensional C*-algebra `M_{n_1} (+) ... (+) M_{n_K}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockAlgebra {
    block_dims: Vec<usize>,
}

impl BlockAlgebra {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() || block_dims.iter().any(|&n| n == 0) {
            return Err(Error::Config(
                "algebra needs at least one block, all of positive dimension".into(),
            ));
        }
        Ok(BlockAlgebra { block_dims })
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn block_count(&self) -> usize {
        self.block_dims.len()
    }

    pub fn dim(&self, block: usize) -> usize {
        self.block_dims[block]
    }

    /// Commutative exactly when every block is one-dimensional.
    pub fn is_commutative(&self) -> bool {
        self.block_dims.iter().all(|&n| n == 1)
    }

    /// Prime exactly when there is a single block; with two or more blocks
    /// the summands are disjoint nontrivial two-sided ideals.
    pub fn is_prime(&self) -> bool {
        self.block_dims.len() == 1
    }

    /// Compact label such as `C`, `M2`, `C(+)M2`.
    pub fn label(&self) -> String {
        self.block_dims
            .iter()
            .map(|&n| if n == 1 { "C".to_string() } else { format!("M{n}") })
            .collect::<Vec<_>>()
            .join("(+)")
    }
}

/// An element of a [`BlockAlgebra`]: one complex matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    algebra: BlockAlgebra,
    blocks: Vec<CMatrix>,
}

impl AlgebraElement {
    pub fn new(algebra: BlockAlgebra, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != algebra.block_count() {
            return Err(Error::BlockCountMismatch {
                expected: algebra.block_count(),
                got: blocks.len(),
            });
        }
        for (k, b) in blocks.iter().enumerate() {
            let n = algebra.dim(k);
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::ShapeMismatch {
                    block: k,
                    expected_rows: n,
                    expected_cols: n,
                    rows: b.nrows(),
                    cols: b.ncols(),
                });
            }
        }
        Ok(AlgebraElement { algebra, blocks })
    }

    pub fn zero(algebra: &BlockAlgebra) -> Self {
        let blocks = algebra
            .block_dims()
            .iter()
            .map(|&n| CMatrix::zeros(n, n))
            .collect();
        AlgebraElement {
            algebra: algebra.clone(),
            blocks,
        }
    }

    pub fn unit(algebra: &BlockAlgebra) -> Self {
        let blocks = algebra
            .block_dims()
            .iter()
            .map(|&n| CMatrix::identity(n, n))
            .collect();
        AlgebraElement {
            algebra: algebra.clone(),
            blocks,
        }
    }

    /// The matrix unit `e_{ij}` of one block, zero elsewhere.
    pub fn matrix_unit(algebra: &BlockAlgebra, block: usize, i: usize, j: usize) -> Self {
        let mut out = Self::zero(algebra);
        out.blocks[block][(i, j)] = c64(1.0, 0.0);
        out
    }

    /// Embeds a single matrix into the chosen block, zero elsewhere.
    pub fn from_block(algebra: &BlockAlgebra, block: usize, m: CMatrix) -> Result<Self> {
        let n = algebra.dim(block);
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::ShapeMismatch {
                block,
                expected_rows: n,
                expected_cols: n,
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let mut out = Self::zero(algebra);
        out.blocks[block] = m;
        Ok(out)
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMatrix {
        &self.blocks[k]
    }

    pub fn adjoint(&self) -> Self {
        AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b * s).collect(),
        }
    }

    /// C*-norm: the largest singular value over all blocks.
    pub fn operator_norm(&self) -> f64 {
        self.blocks.iter().map(|b| top_singular_value(b)).fold(0.0, f64::max)
    }

    pub fn self_adjoint_defect(&self) -> f64 {
        (self - &self.adjoint()).operator_norm()
    }

    pub fn symmetrized(&self) -> Self {
        let adj = self.adjoint();
        AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(adj.blocks.iter())
                .map(|(b, a)| (b + a) * c64(0.5, 0.0))
                .collect(),
        }
    }

    /// Positivity within the relative eigenvalue tolerance.
    pub fn is_positive(&self, eps_eig: f64) -> bool {
        let norm = self.operator_norm();
        if norm == 0.0 {
            return true;
        }
        if self.self_adjoint_defect() > 1e-8 * norm {
            return false;
        }
        match spectral_decomposition(self, 1e-8) {
            Ok(spec) => spec
                .blocks
                .iter()
                .flat_map(|b| b.eigenvalues.iter())
                .all(|&lambda| lambda >= -eps_eig * norm),
            Err(_) => false,
        }
    }

    pub fn same_algebra(&self, other: &AlgebraElement) -> bool {
        self.algebra == other.algebra
    }
}

fn binary_op(
    lhs: &AlgebraElement,
    rhs: &AlgebraElement,
    f: impl Fn(&CMatrix, &CMatrix) -> CMatrix,
) -> AlgebraElement {
    assert!(
        lhs.same_algebra(rhs),
        "algebra arithmetic across different algebras"
    );
    AlgebraElement {
        algebra: lhs.algebra.clone(),
        blocks: lhs
            .blocks
            .iter()
            .zip(rhs.blocks.iter())
            .map(|(a, b)| f(a, b))
            .collect(),
    }
}

impl std::ops::Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: Self) -> AlgebraElement {
        binary_op(self, rhs, |a, b| a + b)
    }
}

impl std::ops::Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: Self) -> AlgebraElement {
        binary_op(self, rhs, |a, b| a - b)
    }
}

impl std::ops::Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: Self) -> AlgebraElement {
        binary_op(self, rhs, |a, b| a * b)
    }
}

/// Largest singular value of a dense complex matrix.
pub fn top_singular_value(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0, |acc, &s| acc.max(s))
}

/// Eigendata of one block of a self-adjoint element, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct BlockSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `eigenvalues`.
    pub vectors: CMatrix,
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub blocks: Vec<BlockSpectrum>,
}

impl SpectralDecomposition {
    pub fn max_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .filter_map(|b| b.eigenvalues.first().copied())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Per-block eigendecomposition of a self-adjoint element.
///
/// The element is symmetrized first so numerical drift cannot poison the
/// eigenframes; inputs whose defect exceeds `tol_sa * |a|` are rejected.
pub fn spectral_decomposition(a: &AlgebraElement, tol_sa: f64) -> Result<SpectralDecomposition> {
    let norm = a.operator_norm();
    let defect = a.self_adjoint_defect();
    if norm > 0.0 && defect > tol_sa * norm {
        return Err(Error::NotSelfAdjoint {
            defect,
            limit: tol_sa * norm,
        });
    }
    let sym = a.symmetrized();
    let blocks = sym
        .blocks
        .iter()
        .map(|m| hermitian_eigen_desc(m))
        .collect();
    Ok(SpectralDecomposition { blocks })
}

/// Eigendecomposition of one Hermitian matrix, eigenvalues descending.
pub fn hermitian_eigen_desc(m: &CMatrix) -> BlockSpectrum {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    BlockSpectrum {
        eigenvalues,
        vectors,
    }
}

/// A pure state of the algebra: a unit vector in a single block.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    algebra: BlockAlgebra,
    block: usize,
    vector: CVector,
}

impl PureState {
    /// Builds the vector state, normalizing the vector. A (near-)zero vector
    /// is rejected.
    pub fn new(algebra: BlockAlgebra, block: usize, vector: CVector) -> Result<Self> {
        if block >= algebra.block_count() || vector.len() != algebra.dim(block) {
            return Err(Error::ShapeMismatch {
                block,
                expected_rows: algebra.block_dims().get(block).copied().unwrap_or(0),
                expected_cols: 1,
                rows: vector.len(),
                cols: 1,
            });
        }
        let norm = vector.norm();
        if norm < 1e-12 {
            return Err(Error::DegenerateSample);
        }
        Ok(PureState {
            algebra,
            block,
            vector: vector / c64(norm, 0.0),
        })
    }

    pub fn coordinate(algebra: &BlockAlgebra, block: usize, index: usize) -> Self {
        let n = algebra.dim(block);
        let mut v = CVector::zeros(n);
        v[index] = c64(1.0, 0.0);
        PureState {
            algebra: algebra.clone(),
            block,
            vector: v,
        }
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    /// rho(a) = <a_k xi, xi>.
    pub fn evaluate(&self, a: &AlgebraElement) -> Result<Complex64> {
        if *a.algebra() != self.algebra {
            return Err(Error::AlgebraMismatch);
        }
        let m = a.block(self.block);
        Ok(self.vector.dotc(&(m * &self.vector)))
    }
}

/// A state as a finite convex mixture of pure states.
#[derive(Debug, Clone)]
pub struct StateMixture {
    terms: Vec<(f64, PureState)>,
}

impl StateMixture {
    pub fn new(terms: Vec<(f64, PureState)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyInput);
        }
        let algebra = terms[0].1.algebra().clone();
        if terms.iter().any(|(_, p)| *p.algebra() != algebra) {
            return Err(Error::AlgebraMismatch);
        }
        if terms.iter().any(|(w, _)| *w <= 0.0 || *w > 1.0 + 1e-12) {
            return Err(Error::Config("mixture weights must lie in (0, 1]".into()));
        }
        let total: f64 = terms.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(StateMixture { terms })
    }

    pub fn pure(state: PureState) -> Self {
        StateMixture {
            terms: vec![(1.0, state)],
        }
    }

    pub fn terms(&self) -> &[(f64, PureState)] {
        &self.terms
    }

    pub fn evaluate(&self, a: &AlgebraElement) -> Result<Complex64> {
        let mut acc = c64(0.0, 0.0);
        for (w, p) in &self.terms {
            acc += p.evaluate(a)? * c64(*w, 0.0);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m2() -> BlockAlgebra {
        BlockAlgebra::new(vec![2]).unwrap()
    }

    fn mat(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
        CMatrix::from_fn(rows, cols, |i, j| c64(entries[i * cols + j], 0.0))
    }

    #[test]
    fn norm_of_zero_is_zero() {
        let a = AlgebraElement::zero(&BlockAlgebra::new(vec![1, 2]).unwrap());
        assert_eq!(a.operator_norm(), 0.0);
    }

    #[test]
    fn norm_of_jordan_block_pair() {
        // Blocks [[2]] and [[1,1],[0,1]]. The second block's top singular
        // value is the golden ratio; the oracle computes it from the
        // characteristic polynomial of a*a = [[1,1],[1,2]]:
        // lambda^2 - 3 lambda + 1 = 0.
        let alg = BlockAlgebra::new(vec![1, 2]).unwrap();
        let a = AlgebraElement::new(
            alg,
            vec![mat(1, 1, &[2.0]), mat(2, 2, &[1.0, 1.0, 0.0, 1.0])],
        )
        .unwrap();
        let oracle = ((3.0 + 5.0_f64.sqrt()) / 2.0).sqrt();
        assert!(oracle < 2.0);
        assert_relative_eq!(a.operator_norm(), 2.0, epsilon = 1e-12);

        let jordan = AlgebraElement::new(
            BlockAlgebra::new(vec![2]).unwrap(),
            vec![mat(2, 2, &[1.0, 1.0, 0.0, 1.0])],
        )
        .unwrap();
        assert_relative_eq!(jordan.operator_norm(), oracle, epsilon = 1e-12);
    }

    #[test]
    fn norm_of_diagonal() {
        let a = AlgebraElement::new(m2(), vec![mat(2, 2, &[1.0, 0.0, 0.0, 0.5])]).unwrap();
        assert_relative_eq!(a.operator_norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn spectral_diagonal() {
        let a = AlgebraElement::new(m2(), vec![mat(2, 2, &[1.0, 0.0, 0.0, 0.25])]).unwrap();
        let spec = spectral_decomposition(&a, 1e-8).unwrap();
        assert_relative_eq!(spec.blocks[0].eigenvalues[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(spec.blocks[0].eigenvalues[1], 0.25, epsilon = 1e-12);
        assert_relative_eq!(spec.blocks[0].vectors[(0, 0)].norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(spec.blocks[0].vectors[(1, 1)].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn spectral_swap_matrix() {
        let a = AlgebraElement::new(m2(), vec![mat(2, 2, &[0.0, 1.0, 1.0, 0.0])]).unwrap();
        let spec = spectral_decomposition(&a, 1e-8).unwrap();
        assert_relative_eq!(spec.blocks[0].eigenvalues[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(spec.blocks[0].eigenvalues[1], -1.0, epsilon = 1e-12);
        // Eigenvectors are (e1 +/- e2)/sqrt(2) up to phase.
        let v = spec.blocks[0].vectors.column(0);
        assert_relative_eq!(v[0].norm(), 0.5_f64.sqrt(), epsilon = 1e-10);
        assert_relative_eq!(v[1].norm(), 0.5_f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn spectral_rank_one_projector_doubled() {
        // [[1,1],[1,1]] has eigenvalues {2, 0}; oracle: direct 2x2
        // eigenproblem, trace 2 and determinant 0.
        let a = AlgebraElement::new(m2(), vec![mat(2, 2, &[1.0, 1.0, 1.0, 1.0])]).unwrap();
        let spec = spectral_decomposition(&a, 1e-8).unwrap();
        assert_relative_eq!(spec.blocks[0].eigenvalues[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(spec.blocks[0].eigenvalues[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn spectral_rejects_non_self_adjoint() {
        let a = AlgebraElement::new(m2(), vec![mat(2, 2, &[0.0, 1.0, 0.0, 0.0])]).unwrap();
        assert!(matches!(
            spectral_decomposition(&a, 1e-8),
            Err(Error::NotSelfAdjoint { .. })
        ));
    }

    #[test]
    fn spectral_reconstruction() {
        let alg = BlockAlgebra::new(vec![3]).unwrap();
        let h = mat(3, 3, &[2.0, 1.0, 0.5, 1.0, -1.0, 0.25, 0.5, 0.25, 0.75]);
        let a = AlgebraElement::new(alg, vec![h.clone()]).unwrap();
        let spec = spectral_decomposition(&a, 1e-8).unwrap();
        let b = &spec.blocks[0];
        let lambda = CMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c64(b.eigenvalues[i], 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        let rebuilt = &b.vectors * lambda * b.vectors.adjoint();
        let err = (&rebuilt - &h).map(|z| z.norm()).max();
        assert!(err <= 10.0 * 1e-9 * a.operator_norm());
    }

    #[test]
    fn state_coordinate_evaluation() {
        let a = AlgebraElement::new(m2(), vec![mat(2, 2, &[0.7, 0.0, 0.0, -0.3])]).unwrap();
        let rho = PureState::coordinate(a.algebra(), 0, 0);
        assert_relative_eq!(rho.evaluate(&a).unwrap().re, 0.7, epsilon = 1e-14);
    }

    #[test]
    fn state_mixture_symmetry() {
        let a = AlgebraElement::new(m2(), vec![mat(2, 2, &[1.0, 0.0, 0.0, -1.0])]).unwrap();
        let rho = StateMixture::new(vec![
            (0.5, PureState::coordinate(a.algebra(), 0, 0)),
            (0.5, PureState::coordinate(a.algebra(), 0, 1)),
        ])
        .unwrap();
        assert_relative_eq!(rho.evaluate(&a).unwrap().norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn state_superposition_on_nilpotent() {
        // omega_{(e1+e2)/sqrt2} on [[0,1],[0,0]] equals 1/2: direct inner
        // product <a v, v> with v = (1,1)/sqrt2 and a v = (1,0)/sqrt2.
        let a = AlgebraElement::new(m2(), vec![mat(2, 2, &[0.0, 1.0, 0.0, 0.0])]).unwrap();
        let v = CVector::from_vec(vec![c64(1.0, 0.0), c64(1.0, 0.0)]);
        let rho = PureState::new(a.algebra().clone(), 0, v).unwrap();
        let val = rho.evaluate(&a).unwrap();
        assert_relative_eq!(val.re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(val.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn state_rejects_algebra_mismatch() {
        let a = AlgebraElement::unit(&BlockAlgebra::new(vec![3]).unwrap());
        let rho = PureState::coordinate(&m2(), 0, 0);
        assert_eq!(rho.evaluate(&a), Err(Error::AlgebraMismatch));
    }

    #[test]
    fn commutativity_and_primeness() {
        assert!(BlockAlgebra::new(vec![1, 1, 1]).unwrap().is_commutative());
        assert!(!BlockAlgebra::new(vec![2]).unwrap().is_commutative());
        assert!(!BlockAlgebra::new(vec![1, 2]).unwrap().is_commutative());
        assert!(BlockAlgebra::new(vec![2]).unwrap().is_prime());
        assert!(!BlockAlgebra::new(vec![1, 1]).unwrap().is_prime());
    }

    #[test]
    fn labels() {
        assert_eq!(BlockAlgebra::new(vec![1]).unwrap().label(), "C");
        assert_eq!(BlockAlgebra::new(vec![1, 2]).unwrap().label(), "C(+)M2");
        assert_eq!(BlockAlgebra::new(vec![3]).unwrap().label(), "M3");
    }
}
