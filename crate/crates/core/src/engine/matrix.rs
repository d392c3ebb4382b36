//! Transfer matrices over the (min, +) semiring and their balanced products.
//!
//! Entries are `Option<i64>` with `None` as infinity. Boolean matrices use
//! `Some(0)` for true, so one product serves both semirings.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::VertexId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Semiring {
    Boolean,
    Tropical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferMatrix {
    /// Leaf-side vertex set; rows are subsets of it as bitmasks.
    pub row_side: Vec<VertexId>,
    pub rows: Vec<u32>,
    /// Root-side vertex set; columns are subsets of it.
    pub col_side: Vec<VertexId>,
    pub cols: Vec<u32>,
    pub entries: Vec<Vec<Option<i64>>>,
    /// For products: index of the inner subset realizing each entry.
    pub witnesses: Option<Vec<Vec<Option<usize>>>>,
}

impl TransferMatrix {
    pub fn new(
        row_side: Vec<VertexId>,
        rows: Vec<u32>,
        col_side: Vec<VertexId>,
        cols: Vec<u32>,
        entries: Vec<Vec<Option<i64>>>,
    ) -> Self {
        assert_eq!(entries.len(), rows.len());
        assert!(entries.iter().all(|r| r.len() == cols.len()));
        TransferMatrix { row_side, rows, col_side, cols, entries, witnesses: None }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn get(&self, r: usize, c: usize) -> Option<i64> {
        self.entries[r][c]
    }

    pub fn multiply(&self, other: &TransferMatrix) -> Result<TransferMatrix> {
        if self.col_side != other.row_side || self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{:?}/{:?} against {:?}/{:?}",
                self.col_side, self.cols, other.row_side, other.rows
            )));
        }
        let mut entries = vec![vec![None; other.cols.len()]; self.rows.len()];
        let mut wit = vec![vec![None; other.cols.len()]; self.rows.len()];
        for r in 0..self.rows.len() {
            for c in 0..other.cols.len() {
                // strict improvement keeps the least middle index on ties
                for m in 0..self.cols.len() {
                    if let (Some(a), Some(b)) = (self.entries[r][m], other.entries[m][c]) {
                        let v = a + b;
                        if entries[r][c].is_none_or(|cur| v < cur) {
                            entries[r][c] = Some(v);
                            wit[r][c] = Some(m);
                        }
                    }
                }
            }
        }
        Ok(TransferMatrix {
            row_side: self.row_side.clone(),
            rows: self.rows.clone(),
            col_side: other.col_side.clone(),
            cols: other.cols.clone(),
            entries,
            witnesses: Some(wit),
        })
    }
}

fn subset_text(side: &[VertexId], mask: u32) -> String {
    let inner: Vec<String> =
        side.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).map(|(_, v)| v.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

impl fmt::Display for TransferMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self.cols.iter().map(|&c| subset_text(&self.col_side, c)).collect();
        write!(f, "cols {}", cols.join(" "))?;
        for (r, &row) in self.rows.iter().enumerate() {
            let vals: Vec<String> =
                self.entries[r].iter().map(|v| v.map_or("inf".to_string(), |x| x.to_string())).collect();
            write!(f, "; {} {}", subset_text(&self.row_side, row), vals.join(" "))?;
        }
        Ok(())
    }
}

/// Balanced product of a chain of matrices, keeping every partial product
/// so that entries can be traced back to one cell per factor.
#[derive(Clone, Debug)]
pub struct Product {
    pub matrix: TransferMatrix,
    pub split: Option<(Box<Product>, Box<Product>)>,
}

impl Product {
    /// Number of factors below this node.
    pub fn factors(&self) -> usize {
        match &self.split {
            None => 1,
            Some((l, r)) => l.factors() + r.factors(),
        }
    }

    /// The (row, column) cell of every factor, left to right, whose entries
    /// combine into entry `(r, c)` of the product.
    pub fn trace(&self, r: usize, c: usize) -> Result<Vec<(usize, usize)>> {
        let mut out = Vec::with_capacity(self.factors());
        self.trace_into(r, c, &mut out)?;
        Ok(out)
    }

    fn trace_into(&self, r: usize, c: usize, out: &mut Vec<(usize, usize)>) -> Result<()> {
        if self.matrix.entries.get(r).and_then(|row| row.get(c)).copied().flatten().is_none() {
            return Err(Error::CorruptLog(format!("dead entry ({r}, {c})")));
        }
        match &self.split {
            None => {
                out.push((r, c));
                Ok(())
            }
            Some((left, right)) => {
                let m = self.matrix.witnesses.as_ref().and_then(|w| w[r][c]).ok_or_else(|| {
                    Error::CorruptLog(format!("missing witness for ({r}, {c})"))
                })?;
                left.trace_into(r, m, out)?;
                right.trace_into(m, c, out)
            }
        }
    }
}

/// Product of `matrices` in the given order, evaluated on a balanced binary
/// tree.
pub fn semiring_product(matrices: &[TransferMatrix]) -> Result<Product> {
    match matrices.len() {
        0 => Err(Error::DimensionMismatch("empty product".into())),
        1 => Ok(Product { matrix: matrices[0].clone(), split: None }),
        n => {
            let (a, b) = matrices.split_at(n / 2);
            let left = semiring_product(a)?;
            let right = semiring_product(b)?;
            let matrix = left.matrix.multiply(&right.matrix)?;
            Ok(Product { matrix, split: Some((Box::new(left), Box::new(right))) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boolean(rows: &[&[u8]]) -> TransferMatrix {
        let n = rows.len() as u32;
        let m = rows[0].len() as u32;
        TransferMatrix::new(
            vec![0, 1],
            (0..n).collect(),
            vec![0, 1],
            (0..m).collect(),
            rows.iter().map(|r| r.iter().map(|&b| (b == 1).then_some(0)).collect()).collect(),
        )
    }

    #[test]
    fn permutation_product() {
        let p = semiring_product(&[boolean(&[&[1, 0], &[0, 1]]), boolean(&[&[0, 1], &[1, 0]])]).unwrap();
        assert_eq!(p.matrix.entries, boolean(&[&[0, 1], &[1, 0]]).entries);
        assert_eq!(p.trace(0, 1).unwrap(), vec![(0, 0), (0, 1)]);
    }

    #[test]
    fn tropical_identity() {
        let id = TransferMatrix::new(
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            vec![vec![Some(0), None], vec![None, Some(0)]],
        );
        let m = TransferMatrix::new(
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            vec![vec![Some(3), Some(-2)], vec![None, Some(5)]],
        );
        assert_eq!(id.multiply(&m).unwrap().entries, m.entries);
    }

    #[test]
    fn mismatch() {
        let a = boolean(&[&[1, 0]]);
        let b = boolean(&[&[1], &[0], &[1]]);
        assert!(matches!(a.multiply(&b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn ties_take_least_middle() {
        let a = boolean(&[&[1, 1]]);
        let b = boolean(&[&[1], &[1]]);
        assert_eq!(a.multiply(&b).unwrap().witnesses.unwrap()[0][0], Some(0));
    }
}
