//! Orthonormal frames for linear subspaces and affine flats, and simplex
//! volumes from Gram determinants.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};

/// Tolerance on `|U^T U - I|_max` for a frame to count as orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

fn orthonormality_defect(u: &DMatrix<f64>) -> f64 {
    let g = u.transpose() * u;
    let k = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

/// A `k`-dimensional linear subspace, stored as a `d x k` orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSubspace {
    basis: DMatrix<f64>,
}

impl LinearSubspace {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        if basis.ncols() == 0 || basis.ncols() > basis.nrows() {
            return Err(Error::InvalidParams(format!(
                "subspace basis must be d x k with 1 <= k <= d, got {} x {}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        let defect = orthonormality_defect(&basis);
        if defect > ORTHONORMAL_TOL {
            return Err(Error::InvalidParams(format!("basis not orthonormal (defect {defect:e})")));
        }
        Ok(Self { basis })
    }

    /// Span of the given vectors, orthonormalized by Gram-Schmidt.
    pub fn span(vectors: &[Vec<f64>]) -> Result<Self> {
        let d = vectors.first().map_or(0, |v| v.len());
        let m = DMatrix::from_fn(d, vectors.len(), |i, j| vectors[j][i]);
        let q = orthonormalize(&m).ok_or_else(|| Error::InvalidParams("rank-deficient span".into()))?;
        Self::new(q)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Ambient point `U t` for in-plane coordinates `t`.
    pub fn point(&self, t: &[f64]) -> DVector<f64> {
        &self.basis * DVector::from_column_slice(t)
    }
}

/// A `k`-dimensional affine flat `{U t + y}` with `U^T y = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFlat {
    basis: DMatrix<f64>,
    offset: DVector<f64>,
}

impl AffineFlat {
    pub fn new(basis: DMatrix<f64>, offset: DVector<f64>) -> Result<Self> {
        let lin = LinearSubspace::new(basis)?;
        check_dim(lin.ambient_dim(), offset.len())?;
        let along = lin.basis.transpose() * &offset;
        if along.norm() > ORTHONORMAL_TOL * offset.norm().max(1.0) {
            return Err(Error::InvalidParams("flat offset must be orthogonal to its basis".into()));
        }
        Ok(Self { basis: lin.basis, offset })
    }

    /// The flat through `point` parallel to `subspace`.
    pub fn through(subspace: &LinearSubspace, point: &[f64]) -> Result<Self> {
        check_dim(subspace.ambient_dim(), point.len())?;
        let x = DVector::from_column_slice(point);
        let u = subspace.basis();
        let offset = &x - u * (u.transpose() * &x);
        Ok(Self { basis: u.clone(), offset })
    }

    pub fn linear(subspace: &LinearSubspace) -> Self {
        Self { basis: subspace.basis.clone(), offset: DVector::zeros(subspace.ambient_dim()) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn offset(&self) -> &DVector<f64> {
        &self.offset
    }

    pub fn point(&self, t: &[f64]) -> DVector<f64> {
        &self.basis * DVector::from_column_slice(t) + &self.offset
    }
}

/// Modified Gram-Schmidt with a second re-orthogonalization pass. `None`
/// if the columns are numerically dependent.
pub fn orthonormalize(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        let scale = q.column(j).norm();
        if !(scale > 0.0) || !scale.is_finite() {
            return None;
        }
        for _ in 0..2 {
            for i in 0..j {
                let dot = q.column(i).dot(&q.column(j));
                let qi = q.column(i).clone_owned();
                q.column_mut(j).axpy(-dot, &qi, 1.0);
            }
        }
        let norm = q.column(j).norm();
        if norm <= 1e-10 * scale {
            return None;
        }
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    Some(q)
}

fn factorial(k: usize) -> f64 {
    (2..=k).map(|i| i as f64).product()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `|conv(0, x_1, ..., x_k)| = sqrt(det(X^T X)) / k!` with the points as the
/// columns of `X`; rank-deficient input gives 0.
pub fn gram_volume_origin<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    let k = points.len();
    match k {
        0 => 1.0,
        1 => dot(points[0].as_ref(), points[0].as_ref()).sqrt(),
        2 => {
            let (a, b) = (points[0].as_ref(), points[1].as_ref());
            let det = dot(a, a) * dot(b, b) - dot(a, b).powi(2);
            0.5 * det.max(0.0).sqrt()
        }
        _ => {
            let g = DMatrix::from_fn(k, k, |i, j| dot(points[i].as_ref(), points[j].as_ref()));
            g.determinant().max(0.0).sqrt() / factorial(k)
        }
    }
}

/// `|conv(x_0, ..., x_k)|`, the Gram volume of the edges `x_i - x_0`.
pub fn gram_volume_affine<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    let Some((first, rest)) = points.split_first() else {
        return 0.0;
    };
    let x0 = first.as_ref();
    let edges: Vec<Vec<f64>> =
        rest.iter().map(|p| p.as_ref().iter().zip(x0).map(|(a, b)| a - b).collect()).collect();
    gram_volume_origin(&edges)
}
