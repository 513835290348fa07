//! Nested-array JSON encoding of complex matrices and module elements.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major nested
//! arrays; elements are lists of per-block matrices. The decoders reject
//! ragged or mismatched data with messages naming the offending block and
//! row.

use num_complex::Complex64;

use crate::algebra::{c64, AlgebraElement, BlockAlgebra, CMatrix};
use crate::error::{Error, Result};
use crate::module::{ModuleElement, ModuleSpace};

pub type NestedMatrix = Vec<Vec<[f64; 2]>>;
pub type NestedBlocks = Vec<NestedMatrix>;

pub fn complex_to_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn matrix_to_nested(m: &CMatrix) -> NestedMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_to_pair(m[(i, j)])).collect())
        .collect()
}

pub fn nested_to_matrix(label: &str, block: usize, rows: usize, cols: usize, data: &NestedMatrix) -> Result<CMatrix> {
    if data.len() != rows {
        return Err(Error::Config(format!(
            "{label} block {block}: expected {rows} rows, got {}",
            data.len()
        )));
    }
    for (i, row) in data.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Config(format!(
                "{label} block {block} row {i}: expected {cols} entries, got {}",
                row.len()
            )));
        }
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        c64(data[i][j][0], data[i][j][1])
    }))
}

pub fn module_element_to_nested(e: &ModuleElement) -> NestedBlocks {
    e.blocks().iter().map(matrix_to_nested).collect()
}

pub fn nested_to_module_element(
    label: &str,
    space: &ModuleSpace,
    data: &NestedBlocks,
) -> Result<ModuleElement> {
    if data.len() != space.algebra().block_count() {
        return Err(Error::Config(format!(
            "{label}: expected {} blocks, got {}",
            space.algebra().block_count(),
            data.len()
        )));
    }
    let blocks = data
        .iter()
        .enumerate()
        .map(|(k, m)| nested_to_matrix(label, k, space.rows(k), space.algebra().dim(k), m))
        .collect::<Result<Vec<_>>>()?;
    ModuleElement::new(space.clone(), blocks)
}

pub fn algebra_element_to_nested(e: &AlgebraElement) -> NestedBlocks {
    e.blocks().iter().map(matrix_to_nested).collect()
}

pub fn nested_to_algebra_element(
    label: &str,
    algebra: &BlockAlgebra,
    data: &NestedBlocks,
) -> Result<AlgebraElement> {
    if data.len() != algebra.block_count() {
        return Err(Error::Config(format!(
            "{label}: expected {} blocks, got {}",
            algebra.block_count(),
            data.len()
        )));
    }
    let blocks = data
        .iter()
        .enumerate()
        .map(|(k, m)| nested_to_matrix(label, k, algebra.dim(k), algebra.dim(k), m))
        .collect::<Result<Vec<_>>>()?;
    AlgebraElement::new(algebra.clone(), blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space_strategy() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
        prop::collection::vec(1usize..=3, 1..=3).prop_flat_map(|dims| {
            let len = dims.len();
            (Just(dims), prop::collection::vec(1usize..=3, len))
        })
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(
            (dims, rows) in space_strategy(),
            fill in prop::collection::vec(-1.0e3..1.0e3f64, 64),
        ) {
            let algebra = BlockAlgebra::new(dims).unwrap();
            let space = ModuleSpace::new(algebra, rows).unwrap();
            let mut cursor = 0usize;
            let mut next = || {
                cursor += 1;
                fill[cursor % fill.len()]
            };
            let blocks: Vec<CMatrix> = space
                .algebra()
                .block_dims()
                .iter()
                .zip(space.row_dims())
                .map(|(&n, &m)| CMatrix::from_fn(m, n, |_, _| c64(next(), next())))
                .collect();
            let element = ModuleElement::new(space.clone(), blocks).unwrap();
            let nested = module_element_to_nested(&element);
            let back = nested_to_module_element("x", &space, &nested).unwrap();
            prop_assert_eq!(element, back);
        }
    }

    #[test]
    fn ragged_rows_are_rejected_with_position() {
        let algebra = BlockAlgebra::new(vec![2]).unwrap();
        let space = ModuleSpace::self_module(algebra);
        let bad: NestedBlocks = vec![vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[1.0, 0.0]]]];
        let err = nested_to_module_element("x", &space, &bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("block 0"), "{msg}");
        assert!(msg.contains("row 1"), "{msg}");
    }
}
