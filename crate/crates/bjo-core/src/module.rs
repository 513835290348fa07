//! Canonical full Hilbert modules over a block algebra.
//!
//! The module over `M_{n_1} (+) ... (+) M_{n_K}` with row dimensions
//! `[m_1, ..., m_K]` consists of block lists of complex `m_k x n_k` matrices,
//! with inner product `<x, y> = x* y` blockwise and the right action by block
//! multiplication. Taking `m_k = n_k` recovers the algebra as a module over
//! itself.

use num_complex::Complex64;

use crate::algebra::{c64, AlgebraElement, BlockAlgebra, CMatrix};
use crate::error::{Error, Result};

/// A module space: the algebra together with per-block row dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleSpace {
    algebra: BlockAlgebra,
    row_dims: Vec<usize>,
}

impl ModuleSpace {
    pub fn new(algebra: BlockAlgebra, row_dims: Vec<usize>) -> Result<Self> {
        if row_dims.len() != algebra.block_count() || row_dims.iter().any(|&m| m == 0) {
            return Err(Error::Config(format!(
                "row dimensions {:?} do not fit algebra with {} blocks",
                row_dims,
                algebra.block_count()
            )));
        }
        Ok(ModuleSpace { algebra, row_dims })
    }

    /// The algebra viewed as a full module over itself.
    pub fn self_module(algebra: BlockAlgebra) -> Self {
        let row_dims = algebra.block_dims().to_vec();
        ModuleSpace { algebra, row_dims }
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn row_dims(&self) -> &[usize] {
        &self.row_dims
    }

    pub fn rows(&self, block: usize) -> usize {
        self.row_dims[block]
    }

    pub fn label(&self) -> String {
        if self.row_dims == self.algebra.block_dims() {
            self.algebra.label()
        } else {
            format!("{} rows {:?}", self.algebra.label(), self.row_dims)
        }
    }
}

/// An element of a [`ModuleSpace`]: one `m_k x n_k` matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleElement {
    space: ModuleSpace,
    blocks: Vec<CMatrix>,
}

impl ModuleElement {
    pub fn new(space: ModuleSpace, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != space.algebra.block_count() {
            return Err(Error::BlockCountMismatch {
                expected: space.algebra.block_count(),
                got: blocks.len(),
            });
        }
        for (k, b) in blocks.iter().enumerate() {
            let (m, n) = (space.rows(k), space.algebra.dim(k));
            if b.nrows() != m || b.ncols() != n {
                return Err(Error::ShapeMismatch {
                    block: k,
                    expected_rows: m,
                    expected_cols: n,
                    rows: b.nrows(),
                    cols: b.ncols(),
                });
            }
        }
        Ok(ModuleElement { space, blocks })
    }

    pub fn zero(space: &ModuleSpace) -> Self {
        let blocks = space
            .algebra
            .block_dims()
            .iter()
            .zip(space.row_dims.iter())
            .map(|(&n, &m)| CMatrix::zeros(m, n))
            .collect();
        ModuleElement {
            space: space.clone(),
            blocks,
        }
    }

    /// The element with a single 1 at `(row, col)` of one block.
    pub fn basis(space: &ModuleSpace, block: usize, row: usize, col: usize) -> Self {
        let mut out = Self::zero(space);
        out.blocks[block][(row, col)] = c64(1.0, 0.0);
        out
    }

    /// Embeds a single matrix into the chosen block, zero elsewhere.
    pub fn from_block(space: &ModuleSpace, block: usize, m: CMatrix) -> Result<Self> {
        let mut out = Self::zero(space);
        let (rows, cols) = (space.rows(block), space.algebra.dim(block));
        if m.nrows() != rows || m.ncols() != cols {
            return Err(Error::ShapeMismatch {
                block,
                expected_rows: rows,
                expected_cols: cols,
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        out.blocks[block] = m;
        Ok(out)
    }

    pub fn space(&self) -> &ModuleSpace {
        &self.space
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMatrix {
        &self.blocks[k]
    }

    pub fn same_space(&self, other: &ModuleElement) -> bool {
        self.space == other.space
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ModuleElement {
            space: self.space.clone(),
            blocks: self.blocks.iter().map(|b| b * s).collect(),
        }
    }

    /// |x| = |<x,x>|^{1/2}, the largest singular value over blocks.
    pub fn module_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(crate::algebra::top_singular_value)
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self, eps: f64) -> bool {
        self.module_norm() <= eps
    }
}

impl std::ops::Add for &ModuleElement {
    type Output = ModuleElement;
    fn add(self, rhs: Self) -> ModuleElement {
        assert!(self.same_space(rhs), "module arithmetic across spaces");
        ModuleElement {
            space: self.space.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(rhs.blocks.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &ModuleElement {
    type Output = ModuleElement;
    fn sub(self, rhs: Self) -> ModuleElement {
        assert!(self.same_space(rhs), "module arithmetic across spaces");
        ModuleElement {
            space: self.space.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(rhs.blocks.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// The algebra-valued inner product `<x, y> = x* y`, conjugate-linear in `x`.
pub fn inner_product(x: &ModuleElement, y: &ModuleElement) -> Result<AlgebraElement> {
    if !x.same_space(y) {
        return Err(Error::SpaceMismatch);
    }
    let blocks: Vec<CMatrix> = x
        .blocks
        .iter()
        .zip(y.blocks.iter())
        .map(|(a, b)| a.adjoint() * b)
        .collect();
    AlgebraElement::new(x.space.algebra.clone(), blocks)
}

/// The right action `x a`, blockwise `x_k a_k`.
pub fn right_action(x: &ModuleElement, a: &AlgebraElement) -> Result<ModuleElement> {
    if x.space.algebra() != a.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    let blocks: Vec<CMatrix> = x
        .blocks
        .iter()
        .zip(a.blocks().iter())
        .map(|(xb, ab)| xb * ab)
        .collect();
    ModuleElement::new(x.space.clone(), blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m2_space() -> ModuleSpace {
        ModuleSpace::self_module(BlockAlgebra::new(vec![2]).unwrap())
    }

    fn mat(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
        CMatrix::from_fn(rows, cols, |i, j| c64(entries[i * cols + j], 0.0))
    }

    #[test]
    fn inner_product_identity() {
        let sp = m2_space();
        let x = ModuleElement::from_block(&sp, 0, CMatrix::identity(2, 2)).unwrap();
        let ip = inner_product(&x, &x).unwrap();
        assert_eq!(ip, AlgebraElement::unit(sp.algebra()));
    }

    #[test]
    fn inner_product_diag_with_matrix_unit() {
        // <diag(1,1/2), e12> = diag(1,1/2)* e12 = e12; oracle: direct
        // matrix product.
        let sp = m2_space();
        let x = ModuleElement::from_block(&sp, 0, mat(2, 2, &[1.0, 0.0, 0.0, 0.5])).unwrap();
        let y = ModuleElement::basis(&sp, 0, 0, 1);
        let ip = inner_product(&x, &y).unwrap();
        assert_relative_eq!(ip.block(0)[(0, 1)].re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(ip.block(0)[(0, 0)].norm(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(ip.block(0)[(1, 1)].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn disjoint_supports_have_zero_inner_product() {
        let sp = ModuleSpace::self_module(BlockAlgebra::new(vec![2, 3]).unwrap());
        let x = ModuleElement::basis(&sp, 0, 0, 0);
        let y = ModuleElement::basis(&sp, 1, 1, 2);
        let ip = inner_product(&x, &y).unwrap();
        assert_eq!(ip.operator_norm(), 0.0);
    }

    #[test]
    fn right_action_unit_and_zero() {
        let sp = m2_space();
        let x = ModuleElement::from_block(&sp, 0, mat(2, 2, &[1.0, 2.0, 3.0, 4.0])).unwrap();
        let unit = AlgebraElement::unit(sp.algebra());
        assert_eq!(right_action(&x, &unit).unwrap(), x);
        let zero = AlgebraElement::zero(sp.algebra());
        assert_eq!(
            right_action(&x, &zero).unwrap(),
            ModuleElement::zero(&sp)
        );
    }

    #[test]
    fn right_action_swap() {
        let sp = m2_space();
        let x = ModuleElement::from_block(&sp, 0, mat(2, 2, &[1.0, 0.0, 0.0, 0.5])).unwrap();
        let swap = AlgebraElement::new(
            sp.algebra().clone(),
            vec![mat(2, 2, &[0.0, 1.0, 1.0, 0.0])],
        )
        .unwrap();
        let xa = right_action(&x, &swap).unwrap();
        let expected = mat(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert_relative_eq!(
            (xa.block(0) - expected).map(|z| z.norm()).max(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn module_norm_examples() {
        let sp = m2_space();
        assert_eq!(ModuleElement::zero(&sp).module_norm(), 0.0);
        let x = ModuleElement::from_block(&sp, 0, mat(2, 2, &[1.0, 0.0, 0.0, 0.5])).unwrap();
        assert_relative_eq!(x.module_norm(), 1.0, epsilon = 1e-14);

        let c2 = ModuleSpace::self_module(BlockAlgebra::new(vec![1, 1]).unwrap());
        let ones = ModuleElement::new(
            c2.clone(),
            vec![mat(1, 1, &[1.0]), mat(1, 1, &[1.0])],
        )
        .unwrap();
        assert_relative_eq!(ones.module_norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let a = ModuleElement::zero(&m2_space());
        let b = ModuleElement::zero(&ModuleSpace::self_module(
            BlockAlgebra::new(vec![3]).unwrap(),
        ));
        assert_eq!(inner_product(&a, &b), Err(Error::SpaceMismatch));
    }

    #[test]
    fn fullness_matrix_units_from_rank_one_elements() {
        // <basis(k,0,p), basis(k,0,q)> is the matrix unit e_{pq} of block k,
        // so the inner products span the whole algebra.
        let sp = ModuleSpace::new(BlockAlgebra::new(vec![2, 3]).unwrap(), vec![2, 4]).unwrap();
        for k in 0..2 {
            let n = sp.algebra().dim(k);
            for p in 0..n {
                for q in 0..n {
                    let ip = inner_product(
                        &ModuleElement::basis(&sp, k, 0, p),
                        &ModuleElement::basis(&sp, k, 0, q),
                    )
                    .unwrap();
                    let expected = AlgebraElement::matrix_unit(sp.algebra(), k, p, q);
                    assert_relative_eq!(
                        (&ip - &expected).operator_norm(),
                        0.0,
                        epsilon = 1e-14
                    );
                }
            }
        }
    }
}
