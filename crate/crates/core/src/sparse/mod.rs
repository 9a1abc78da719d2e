//! Sparse symmetric operators in CSR form, graph Laplacians, and the graph
//! sources (random generation, file loading) that feed them.

mod io;
mod random;
mod signal;

pub use io::{load_graph, load_signal, parse_edge_list, write_edge_list, GraphFormat};
pub use random::erdos_renyi;
pub use signal::GraphSignal;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// Undirected weighted edge `(i, j, weight)` with 0-based node indices.
pub type Edge = (usize, usize, f64);

/// Which Laplacian to assemble from an edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LaplacianKind {
    /// `D - A`
    #[default]
    Combinatorial,
    /// `I - D^{-1/2} A D^{-1/2}`
    Normalized,
}

impl std::str::FromStr for LaplacianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "combinatorial" => Ok(LaplacianKind::Combinatorial),
            "normalized" => Ok(LaplacianKind::Normalized),
            other => Err(Error::InvalidArgument(format!(
                "unknown laplacian kind `{other}` (expected combinatorial|normalized)"
            ))),
        }
    }
}

/// Symmetric sparse matrix in compressed sparse row layout.
///
/// Both triangles are stored. Column indices are strictly increasing within a
/// row and no explicit zeros are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds a matrix from raw CSR arrays, checking every structural invariant.
    pub fn from_csr(
        n: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                found: row_ptr.len(),
            });
        }
        if col_idx.len() != values.len() || row_ptr[n] != col_idx.len() || row_ptr[0] != 0 {
            return Err(Error::InvalidArgument(
                "inconsistent CSR array lengths".into(),
            ));
        }
        for row in 0..n {
            let (start, end) = (row_ptr[row], row_ptr[row + 1]);
            if start > end {
                return Err(Error::InvalidArgument(format!(
                    "row pointer decreases at row {row}"
                )));
            }
            for k in start..end {
                if col_idx[k] >= n {
                    return Err(Error::IndexOutOfRange {
                        index: col_idx[k],
                        n,
                    });
                }
                if k > start && col_idx[k] <= col_idx[k - 1] {
                    return Err(Error::InvalidArgument(format!(
                        "columns not strictly increasing in row {row}"
                    )));
                }
                if values[k] == 0.0 || !values[k].is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "explicit zero or non-finite entry at ({row}, {})",
                        col_idx[k]
                    )));
                }
            }
        }
        let m = SparseSymMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        };
        if !m.is_symmetric() {
            return Err(Error::InvalidArgument("matrix is not symmetric".into()));
        }
        Ok(m)
    }

    /// The `n x n` zero matrix.
    pub fn zeros(n: usize) -> Self {
        SparseSymMatrix {
            n,
            row_ptr: vec![0; n + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseSymMatrix {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let cols = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match cols.binary_search(&j) {
            Ok(pos) => self.values[self.row_ptr[i] + pos],
            Err(_) => 0.0,
        }
    }

    /// Copy with every entry multiplied by `factor` (`factor` must be non-zero).
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(
            factor != 0.0 && factor.is_finite(),
            "scale factor must be finite and non-zero"
        );
        SparseSymMatrix {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// `y = M x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    /// `y = M x` into a caller-provided buffer. Each row is accumulated
    /// left to right, so the result is bit-reproducible.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: y.len(),
            });
        }
        for (row, out) in y.iter_mut().enumerate() {
            let (start, end) = (self.row_ptr[row], self.row_ptr[row + 1]);
            let mut acc = 0.0;
            for k in start..end {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc;
        }
        Ok(())
    }

    /// Transpose-compare: every stored `(i, j)` has a stored `(j, i)` with the same value.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).all(|k| {
                let j = self.col_idx[k];
                let cols = &self.col_idx[self.row_ptr[j]..self.row_ptr[j + 1]];
                match cols.binary_search(&i) {
                    Ok(pos) => self.values[self.row_ptr[j] + pos] == self.values[k],
                    Err(_) => false,
                }
            })
        })
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.values[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .sum()
            })
            .collect()
    }

    /// Gershgorin upper bound on the spectral radius: the largest absolute row sum.
    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                self.values[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n]; self.n];
        for (i, row) in dense.iter_mut().enumerate() {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                row[self.col_idx[k]] = self.values[k];
            }
        }
        dense
    }

    /// Hash of the dimension, sparsity structure and value bits.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.n.hash(&mut h);
        self.row_ptr.hash(&mut h);
        self.col_idx.hash(&mut h);
        for v in &self.values {
            v.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

/// Assembles a graph Laplacian from an undirected edge list.
///
/// Duplicate edges (in either orientation) are summed into a single weight.
/// Self-loops are rejected.
pub fn build_laplacian(edges: &[Edge], n: usize, kind: LaplacianKind) -> Result<SparseSymMatrix> {
    let mut pairs: Vec<(usize, usize, f64)> = Vec::with_capacity(edges.len());
    for &(i, j, w) in edges {
        for idx in [i, j] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, n });
            }
        }
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::NonPositiveWeight { i, j, weight: w });
        }
        pairs.push((i.min(j), i.max(j), w));
    }
    pairs.sort_by_key(|e| (e.0, e.1));

    // collapse duplicates
    let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(pairs.len());
    for (i, j, w) in pairs {
        match merged.last_mut() {
            Some(last) if last.0 == i && last.1 == j => last.2 += w,
            _ => merged.push((i, j, w)),
        }
    }

    let mut degree = vec![0.0; n];
    for &(i, j, w) in &merged {
        degree[i] += w;
        degree[j] += w;
    }
    if kind == LaplacianKind::Normalized {
        if let Some(iso) = degree.iter().position(|&d| d == 0.0) {
            return Err(Error::IsolatedNode(iso));
        }
    }
    let inv_sqrt: Vec<f64> = degree.iter().map(|d| 1.0 / d.sqrt()).collect();

    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(i, j, w) in &merged {
        let off = match kind {
            LaplacianKind::Combinatorial => -w,
            LaplacianKind::Normalized => -w * inv_sqrt[i] * inv_sqrt[j],
        };
        rows[i].push((j, off));
        rows[j].push((i, off));
    }
    for (i, row) in rows.iter_mut().enumerate() {
        let diag = match kind {
            LaplacianKind::Combinatorial => degree[i],
            LaplacianKind::Normalized => 1.0,
        };
        if diag != 0.0 {
            row.push((i, diag));
        }
        row.sort_by_key(|&(c, _)| c);
    }

    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(2 * merged.len() + n);
    let mut values = Vec::with_capacity(2 * merged.len() + n);
    row_ptr.push(0);
    for row in rows {
        for (c, v) in row {
            col_idx.push(c);
            values.push(v);
        }
        row_ptr.push(col_idx.len());
    }
    Ok(SparseSymMatrix {
        n,
        row_ptr,
        col_idx,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_both_kinds() {
        for kind in [LaplacianKind::Combinatorial, LaplacianKind::Normalized] {
            let l = build_laplacian(&[(0, 1, 1.0)], 2, kind).unwrap();
            assert_eq!(l.to_dense(), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        }
    }

    #[test]
    fn triangle_entries() {
        let l = build_laplacian(
            &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)],
            3,
            LaplacianKind::Combinatorial,
        )
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.get(i, j), if i == j { 2.0 } else { -1.0 });
            }
        }
    }

    #[test]
    fn duplicates_are_summed() {
        let l =
            build_laplacian(&[(0, 1, 1.0), (1, 0, 2.5)], 2, LaplacianKind::Combinatorial).unwrap();
        assert_eq!(l.get(0, 1), -3.5);
        assert_eq!(l.get(1, 1), 3.5);
    }

    #[test]
    fn construction_errors() {
        let c = LaplacianKind::Combinatorial;
        assert!(matches!(
            build_laplacian(&[(0, 2, 1.0)], 2, c),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        ));
        assert!(matches!(
            build_laplacian(&[(0, 1, 0.0)], 2, c),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            build_laplacian(&[(0, 1, -1.0)], 2, c),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            build_laplacian(&[(1, 1, 1.0)], 2, c),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            build_laplacian(&[(0, 1, 1.0)], 3, LaplacianKind::Normalized),
            Err(Error::IsolatedNode(2))
        ));
        // isolated nodes are fine for the combinatorial Laplacian
        let l = build_laplacian(&[(0, 1, 1.0)], 3, c).unwrap();
        assert_eq!(l.nnz(), 4);
    }

    #[test]
    fn matvec_examples() {
        let id = SparseSymMatrix::identity(4);
        let x = [1.0, -2.0, 3.5, 0.25];
        assert_eq!(id.matvec(&x).unwrap(), x.to_vec());

        let p2 = build_laplacian(&[(0, 1, 1.0)], 2, LaplacianKind::Combinatorial).unwrap();
        assert_eq!(p2.matvec(&[1.0, 0.0]).unwrap(), vec![1.0, -1.0]);

        let k3 = build_laplacian(
            &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)],
            3,
            LaplacianKind::Combinatorial,
        )
        .unwrap();
        assert_eq!(k3.matvec(&[1.0; 3]).unwrap(), vec![0.0; 3]);

        assert!(matches!(
            k3.matvec(&[1.0; 2]),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn from_csr_rejects_asymmetry() {
        let err = SparseSymMatrix::from_csr(2, vec![0, 1, 1], vec![1], vec![1.0]);
        assert!(err.is_err());
        let ok = SparseSymMatrix::from_csr(2, vec![0, 1, 2], vec![1, 0], vec![-1.0, -1.0]);
        assert!(ok.is_ok());
        let zero = SparseSymMatrix::from_csr(2, vec![0, 1, 2], vec![1, 0], vec![0.0, 0.0]);
        assert!(zero.is_err());
    }

    #[test]
    fn normalized_has_unit_diagonal() {
        let edges = [(0, 1, 2.0), (1, 2, 1.0), (2, 3, 4.0), (3, 0, 1.0)];
        let l = build_laplacian(&edges, 4, LaplacianKind::Normalized).unwrap();
        assert!(l.is_symmetric());
        for i in 0..4 {
            assert_eq!(l.get(i, i), 1.0);
        }
        // D^{1/2} 1 is in the kernel of the normalized Laplacian
        let deg = [3.0f64, 3.0, 5.0, 5.0];
        let v: Vec<f64> = deg.iter().map(|d| d.sqrt()).collect();
        for y in l.matvec(&v).unwrap() {
            assert!(y.abs() < 1e-12);
        }
    }
}
