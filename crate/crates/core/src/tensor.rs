//! Dense multi-index tensors at a point and the metric that pairs them.

use nalgebra::{DMatrix, DVector};

use crate::error::{MetricError, TensorError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Covariant,
    Contravariant,
}

impl Variance {
    fn flipped(self) -> Self {
        match self {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
        }
    }
}

/// Components of a rank-`k` tensor on an `n`-dimensional tangent space,
/// row-major in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    n: usize,
    variance: Vec<Variance>,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn zeros(n: usize, rank: usize) -> Self {
        DenseTensor {
            n,
            variance: vec![Variance::Covariant; rank],
            data: vec![0.0; n.pow(rank as u32)],
        }
    }

    pub fn with_variance(n: usize, variance: Vec<Variance>) -> Self {
        let rank = variance.len();
        DenseTensor {
            n,
            variance,
            data: vec![0.0; n.pow(rank as u32)],
        }
    }

    /// Fully covariant tensor from a component function.
    pub fn from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = DenseTensor::zeros(n, rank);
        let mut idx = vec![0; rank];
        for slot in t.data.iter_mut() {
            *slot = f(&idx);
            increment(&mut idx, n);
        }
        t
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        DenseTensor::from_fn(n, 2, |i| m[(i[0], i[1])])
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn offset(&self, idx: &[usize]) -> Option<usize> {
        if idx.len() != self.rank() || idx.iter().any(|&i| i >= self.n) {
            return None;
        }
        Some(idx.iter().fold(0, |acc, &i| acc * self.n + i))
    }

    pub fn get(&self, idx: &[usize]) -> Option<f64> {
        self.offset(idx).map(|o| self.data[o])
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx).expect("tensor index out of bounds");
        self.data[o] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut t = self.clone();
        t.data.iter_mut().for_each(|v| *v *= s);
        t
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &DenseTensor) -> Result<Self, TensorError> {
        self.check_same_shape(other)?;
        let mut t = self.clone();
        t.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += s * b);
        Ok(t)
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<Self, TensorError> {
        self.axpy(-1.0, other)
    }

    fn check_same_shape(&self, other: &DenseTensor) -> Result<(), TensorError> {
        if self.n != other.n {
            return Err(TensorError::DimensionMismatch(self.n, other.n));
        }
        if self.rank() != other.rank() {
            return Err(TensorError::RankMismatch(self.rank(), other.rank()));
        }
        if self.variance != other.variance {
            return Err(TensorError::VarianceMismatch);
        }
        Ok(())
    }

    /// `T'[.., a, ..] = Σ_b m[a][b] T[.., b, ..]` on one slot.
    pub fn transform_slot(&self, slot: usize, m: &DMatrix<f64>) -> Self {
        let n = self.n;
        let rank = self.rank();
        let stride = n.pow((rank - slot - 1) as u32);
        let block = stride * n;
        let mut out = vec![0.0; self.data.len()];
        for base in (0..self.data.len()).step_by(block) {
            for inner in 0..stride {
                for a in 0..n {
                    let mut acc = 0.0;
                    for b in 0..n {
                        acc += m[(a, b)] * self.data[base + b * stride + inner];
                    }
                    out[base + a * stride + inner] = acc;
                }
            }
        }
        DenseTensor {
            n,
            variance: self.variance.clone(),
            data: out,
        }
    }

    pub fn raise(&self, slot: usize, g: &MetricAtPoint) -> Self {
        assert_eq!(self.variance[slot], Variance::Covariant, "slot already raised");
        let mut t = self.transform_slot(slot, &g.g_inv);
        t.variance[slot] = Variance::Contravariant;
        t
    }

    pub fn lower(&self, slot: usize, g: &MetricAtPoint) -> Self {
        assert_eq!(self.variance[slot], Variance::Contravariant, "slot already lowered");
        let mut t = self.transform_slot(slot, &g.g);
        t.variance[slot] = Variance::Covariant;
        t
    }

    /// Every slot flipped through `g` / `g⁻¹`.
    pub fn dual(&self, g: &MetricAtPoint) -> Self {
        let mut t = self.clone();
        for s in 0..self.rank() {
            let m = match t.variance[s] {
                Variance::Covariant => &g.g_inv,
                Variance::Contravariant => &g.g,
            };
            t = t.transform_slot(s, m);
            t.variance[s] = t.variance[s].flipped();
        }
        t
    }

    /// Components in a new basis whose vectors are the columns of `frame`,
    /// for a fully covariant tensor: `T'(a, b, ..) = T(E_a, E_b, ..)`.
    pub fn in_frame(&self, frame: &DMatrix<f64>) -> Self {
        assert!(self.variance.iter().all(|v| *v == Variance::Covariant));
        let ft = frame.transpose();
        (0..self.rank()).fold(self.clone(), |t, s| t.transform_slot(s, &ft))
    }

    /// Contract the first slot with `v`.
    pub fn contract_first(&self, v: &[f64]) -> Self {
        let n = self.n;
        let inner = self.data.len() / n;
        let mut data = vec![0.0; inner];
        for (a, va) in v.iter().enumerate() {
            if *va == 0.0 {
                continue;
            }
            let row = &self.data[a * inner..(a + 1) * inner];
            data.iter_mut().zip(row).for_each(|(d, r)| *d += va * r);
        }
        DenseTensor {
            n,
            variance: self.variance[1..].to_vec(),
            data,
        }
    }

    /// Multilinear evaluation on one vector per slot.
    pub fn eval(&self, vectors: &[&[f64]]) -> f64 {
        assert_eq!(vectors.len(), self.rank(), "need one vector per slot");
        let mut t = self.clone();
        for v in vectors {
            t = t.contract_first(v);
        }
        t.data[0]
    }
}

fn increment(idx: &mut [usize], n: usize) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < n {
            return;
        }
        idx[k] = 0;
    }
}

/// Iterate over all index tuples of a rank-`rank` tensor in storage order.
pub fn index_tuples(n: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(rank as u32);
    let mut idx = vec![0; rank];
    (0..total).map(move |k| {
        if k > 0 {
            increment(&mut idx, n);
        }
        idx.clone()
    })
}

/// The metric and its inverse at one chart point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricAtPoint {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub point: Vec<f64>,
}

impl MetricAtPoint {
    pub fn new(g: DMatrix<f64>, point: Vec<f64>) -> Result<Self, MetricError> {
        let chol = g
            .clone()
            .cholesky()
            .ok_or_else(|| MetricError::NotPositiveDefinite { point: point.clone() })?;
        let mut g_inv = chol.inverse();
        // symmetrize against rounding in the triangular solves
        let n = g.nrows();
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (g_inv[(i, j)] + g_inv[(j, i)]);
                g_inv[(i, j)] = v;
                g_inv[(j, i)] = v;
            }
        }
        Ok(MetricAtPoint { g, g_inv, point })
    }

    pub fn euclidean(n: usize) -> Self {
        MetricAtPoint {
            g: DMatrix::identity(n, n),
            g_inv: DMatrix::identity(n, n),
            point: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn dot(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                s += ui * self.g[(i, j)] * vj;
            }
        }
        s
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        self.dot(u, u).max(0.0).sqrt()
    }

    /// A g-orthonormal basis (columns) from Gram–Schmidt on the coordinate
    /// basis.
    pub fn orthonormal_frame(&self) -> DMatrix<f64> {
        let n = self.dim();
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        let basis = self.gram_schmidt(&cols).expect("coordinate basis is independent");
        DMatrix::from_fn(n, n, |r, c| basis[c][r])
    }

    /// Gram–Schmidt in input order; `None` if the vectors are dependent.
    pub fn gram_schmidt(&self, vectors: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
        for v in vectors {
            let scale = self.norm(v);
            let mut w = v.clone();
            // two passes for numerical orthogonality
            for _ in 0..2 {
                for e in &out {
                    let c = self.dot(&w, e);
                    w.iter_mut().zip(e).for_each(|(a, b)| *a -= c * b);
                }
            }
            let nrm = self.norm(&w);
            if !(nrm > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
                return None;
            }
            w.iter_mut().for_each(|a| *a /= nrm);
            out.push(w);
        }
        Some(out)
    }

    pub fn lower_vector(&self, v: &[f64]) -> Vec<f64> {
        (&self.g * DVector::from_column_slice(v)).as_slice().to_vec()
    }

    pub fn raise_covector(&self, w: &[f64]) -> Vec<f64> {
        (&self.g_inv * DVector::from_column_slice(w)).as_slice().to_vec()
    }
}

/// Full contraction of `a` with `b`, pairing every slot through `g`.
pub fn inner_product(a: &DenseTensor, b: &DenseTensor, g: &MetricAtPoint) -> Result<f64, TensorError> {
    a.check_same_shape(b)?;
    if a.n != g.dim() {
        return Err(TensorError::DimensionMismatch(a.n, g.dim()));
    }
    let bd = b.dual(g);
    Ok(a.data.iter().zip(&bd.data).map(|(x, y)| x * y).sum())
}

pub fn frobenius_norm(a: &DenseTensor, g: &MetricAtPoint) -> f64 {
    inner_product(a, a, g).expect("same shape").max(0.0).sqrt()
}
