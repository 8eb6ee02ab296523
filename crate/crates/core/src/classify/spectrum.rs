//! Principal Ricci curvatures and directions.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{GeometryError, Result};
use crate::tensor::MetricAtPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct RicciCluster {
    /// Mean of the merged eigenvalues.
    pub value: f64,
    pub multiplicity: usize,
    /// g-orthonormal eigenvectors in chart coordinates.
    pub basis: Vec<Vec<f64>>,
}

/// Eigenvalues of the Ricci operator, clustered and sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciSpectrum {
    pub eigenvalues: Vec<f64>,
    pub clusters: Vec<RicciCluster>,
}

impl RicciSpectrum {
    pub fn values(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.value).collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.multiplicity).collect()
    }

    /// All eigenvectors as columns, cluster by cluster.
    pub fn frame(&self) -> DMatrix<f64> {
        let cols: Vec<&Vec<f64>> = self.clusters.iter().flat_map(|c| &c.basis).collect();
        let n = cols.len();
        DMatrix::from_fn(n, n, |r, c| cols[c][r])
    }

    /// Indices `(d, d_perp)` of the two clusters when there are exactly two;
    /// `d` has the smaller multiplicity, ties going to the first cluster.
    pub fn split(&self) -> Option<(usize, usize)> {
        match self.clusters.as_slice() {
            [a, b] if b.multiplicity < a.multiplicity => Some((1, 0)),
            [_, _] => Some((0, 1)),
            _ => None,
        }
    }
}

/// Diagonalize the Ricci operator `S^i_j` (g-self-adjoint) in a g-orthonormal
/// eigenbasis.
pub fn ricci_spectrum(s_op: &DMatrix<f64>, g: &MetricAtPoint, tol_cluster: f64) -> Result<RicciSpectrum> {
    let n = g.dim();
    if s_op.iter().any(|v| !v.is_finite()) {
        return Err(GeometryError::Eigen("non-finite Ricci operator".into()));
    }
    let chol = g
        .g
        .clone()
        .cholesky()
        .ok_or_else(|| GeometryError::Eigen("metric is not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| GeometryError::Eigen("singular Cholesky factor".into()))?;
    let s_cov = &g.g * s_op;
    let mut a = &l_inv * s_cov * l_inv.transpose();
    a = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(a, f64::EPSILON, 0)
        .ok_or_else(|| GeometryError::Eigen("symmetric eigensolver did not converge".into()))?;
    let back = l_inv.transpose();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| (&back * eig.eigenvectors.column(i)).as_slice().to_vec())
        .collect();

    let scale = 1.0 + eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match groups.last_mut() {
            Some(grp) if eigenvalues[*grp.last().unwrap()] - eigenvalues[i] <= tol_cluster * scale => grp.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let mut clusters = Vec::with_capacity(groups.len());
    for grp in groups {
        let value = grp.iter().map(|&i| eigenvalues[i]).sum::<f64>() / grp.len() as f64;
        let raw: Vec<Vec<f64>> = grp.iter().map(|&i| vectors[i].clone()).collect();
        let basis = g
            .gram_schmidt(&raw)
            .ok_or_else(|| GeometryError::Eigen("dependent eigenvectors".into()))?;
        clusters.push(RicciCluster {
            value,
            multiplicity: grp.len(),
            basis,
        });
    }
    Ok(RicciSpectrum { eigenvalues, clusters })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clusters_descending_and_orthonormal() {
        // g = diag(4, 1, 9), S = diag(0, 0, −2)·g in operator form
        let g = MetricAtPoint::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 1.0, 9.0])), vec![0.0; 3])
            .unwrap();
        let s_op = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, -2.0, 0.0]));
        let sp = ricci_spectrum(&s_op, &g, 1e-6).unwrap();
        assert_eq!(sp.multiplicities(), vec![2, 1]);
        assert!((sp.values()[1] + 2.0).abs() < 1e-14);
        assert_eq!(sp.split(), Some((1, 0)));
        let f = sp.frame();
        let gram = f.transpose() * &g.g * &f;
        assert!((gram - DMatrix::identity(3, 3)).abs().max() < 1e-12);
    }

    #[test]
    fn tie_goes_to_first_cluster() {
        let g = MetricAtPoint::euclidean(4);
        let s_op = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0, -1.0, 1.0]));
        let sp = ricci_spectrum(&s_op, &g, 1e-6).unwrap();
        assert_eq!(sp.values(), vec![1.0, -1.0]);
        assert_eq!(sp.split(), Some((0, 1)));
    }

    #[test]
    fn non_finite_input_is_an_error() {
        let g = MetricAtPoint::euclidean(2);
        let s_op = DMatrix::from_element(2, 2, f64::NAN);
        assert!(ricci_spectrum(&s_op, &g, 1e-6).is_err());
    }
}
