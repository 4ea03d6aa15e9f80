//! Convex bodies with membership, exact volume, and exact volumes of their
//! sections by linear subspaces and affine flats.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{gram_volume_affine, AffineFlat, LinearSubspace};
use crate::kernel::kappa;
use crate::lp::{self, Constraints};
use crate::polytope::{self, Halfspaces};

/// Largest section dimension with an exact polytopal section volume.
pub const MAX_EXACT_SECTION_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBall {
    pub center: DVector<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: DVector<f64>,
    radius: f64,
}

/// `{x : (x - c)^T M (x - c) <= 1}` for symmetric positive-definite `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    center: DVector<f64>,
    shape: DMatrix<f64>,
    shape_inv: DMatrix<f64>,
    /// `T` with `T T^T = M^{-1}`: maps the unit ball onto the ellipsoid.
    transform: DMatrix<f64>,
    det: f64,
    max_semi_axis: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    lower: DVector<f64>,
    upper: DVector<f64>,
    halfspaces: Halfspaces,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    vertices: Vec<DVector<f64>>,
    halfspaces: Halfspaces,
    volume: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    halfspaces: Halfspaces,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    Ball(Ball),
    Ellipsoid(Ellipsoid),
    Box(AxisBox),
    Simplex(Simplex),
    Polytope(HPolytope),
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidBody("ball needs dimension >= 1".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidBody(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { center: DVector::from_vec(center), radius })
    }

    pub fn unit(d: usize) -> Result<Self> {
        Self::new(vec![0.0; d], 1.0)
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl Ellipsoid {
    pub fn new(center: Vec<f64>, shape: DMatrix<f64>) -> Result<Self> {
        let d = center.len();
        if d == 0 || shape.nrows() != d || shape.ncols() != d {
            return Err(Error::InvalidBody("ellipsoid shape must be d x d".into()));
        }
        let asym = (&shape - shape.transpose()).abs().max();
        if asym > 1e-12 * shape.abs().max() {
            return Err(Error::InvalidBody("ellipsoid shape must be symmetric".into()));
        }
        let chol = shape
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidBody("ellipsoid shape is not positive definite".into()))?;
        let l = chol.l();
        let det = l.diagonal().iter().map(|v| v * v).product::<f64>();
        let l_inv = l
            .solve_lower_triangular(&DMatrix::identity(d, d))
            .ok_or_else(|| Error::InvalidBody("singular ellipsoid shape".into()))?;
        let transform = l_inv.transpose();
        let shape_inv = &transform * transform.transpose();
        let min_eig = shape.clone().symmetric_eigenvalues().min();
        Ok(Self {
            center: DVector::from_vec(center),
            shape,
            shape_inv,
            transform,
            det,
            max_semi_axis: 1.0 / min_eig.sqrt(),
        })
    }

    /// Axis-aligned ellipsoid with the given semi-axes, `M = diag(1 / a_i^2)`.
    pub fn axis_aligned(center: Vec<f64>, semi_axes: &[f64]) -> Result<Self> {
        if semi_axes.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidBody("semi-axes must be positive".into()));
        }
        check_dim(center.len(), semi_axes.len())?;
        let m = DMatrix::from_diagonal(&DVector::from_iterator(
            semi_axes.len(),
            semi_axes.iter().map(|a| 1.0 / (a * a)),
        ));
        Self::new(center, m)
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    /// Linear map taking the unit ball onto the centered ellipsoid.
    pub fn transform(&self) -> &DMatrix<f64> {
        &self.transform
    }
}

fn box_halfspaces(lower: &DVector<f64>, upper: &DVector<f64>) -> Result<Halfspaces> {
    let d = lower.len();
    let mut a = DMatrix::zeros(2 * d, d);
    let mut b = DVector::zeros(2 * d);
    for i in 0..d {
        a[(2 * i, i)] = 1.0;
        b[2 * i] = upper[i];
        a[(2 * i + 1, i)] = -1.0;
        b[2 * i + 1] = -lower[i];
    }
    Halfspaces::new(a, b)
}

impl AxisBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::InvalidBody("box needs dimension >= 1".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite()) {
            return Err(Error::InvalidBody("box needs lower < upper in every coordinate".into()));
        }
        let (lower, upper) = (DVector::from_vec(lower), DVector::from_vec(upper));
        let halfspaces = box_halfspaces(&lower, &upper)?;
        Ok(Self { lower, upper, halfspaces })
    }

    /// `[-h, h]^d`.
    pub fn cube(d: usize, half: f64) -> Result<Self> {
        Self::new(vec![-half; d], vec![half; d])
    }

    pub fn lower(&self) -> &DVector<f64> {
        &self.lower
    }

    pub fn upper(&self) -> &DVector<f64> {
        &self.upper
    }
}

impl Simplex {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let d = vertices.first().map_or(0, |v| v.len());
        if d == 0 || vertices.len() != d + 1 {
            return Err(Error::InvalidBody("a d-simplex needs d + 1 vertices in R^d".into()));
        }
        for v in &vertices {
            check_dim(d, v.len())?;
        }
        let volume = gram_volume_affine(&vertices);
        let scale = vertices
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(1.0);
        if !(volume > 1e-12 * scale.powi(d as i32)) {
            return Err(Error::InvalidBody("simplex vertices are affinely dependent".into()));
        }
        let vertices: Vec<DVector<f64>> =
            vertices.into_iter().map(DVector::from_vec).collect();
        let edges = DMatrix::from_fn(d, d, |i, j| vertices[j + 1][i] - vertices[0][i]);
        let inv = edges
            .try_inverse()
            .ok_or_else(|| Error::InvalidBody("simplex vertices are affinely dependent".into()))?;
        // Barycentric coordinates lambda = inv (x - v0) must be >= 0 and sum to <= 1.
        let mut a = DMatrix::zeros(d + 1, d);
        let mut b = DVector::zeros(d + 1);
        for j in 0..d {
            let row = inv.row(j);
            for c in 0..d {
                a[(j, c)] = -row[c];
                a[(d, c)] += row[c];
            }
            b[j] = -row.dot(&vertices[0].transpose());
        }
        b[d] = 1.0 + (0..d).map(|c| a[(d, c)] * vertices[0][c]).sum::<f64>();
        Ok(Self { vertices, halfspaces: Halfspaces::new(a, b)?, volume })
    }

    /// `conv(0, e_1, ..., e_d)`.
    pub fn standard(d: usize) -> Result<Self> {
        let mut verts = vec![vec![0.0; d]];
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            verts.push(e);
        }
        Self::new(verts)
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }
}

impl HPolytope {
    /// Validates boundedness (by maximizing every `+-e_i`) and a non-empty
    /// interior.
    pub fn new(halfspaces: Halfspaces) -> Result<Self> {
        let (lower, upper) = halfspaces.bounding_box()?;
        let inr = halfspaces.inradius()?;
        let extent = lower.iter().zip(&upper).fold(0.0f64, |m, (l, u)| m.max(u - l));
        if !(inr > 1e-9 * extent.max(1.0)) {
            return Err(Error::InvalidBody("polytope has empty interior".into()));
        }
        Ok(Self { halfspaces, lower, upper })
    }

    pub fn halfspaces(&self) -> &Halfspaces {
        &self.halfspaces
    }

    /// Coordinate bounding box `(lower, upper)`.
    pub fn bounding_box(&self) -> (&[f64], &[f64]) {
        (&self.lower, &self.upper)
    }
}

impl fmt::Display for ConvexBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &DVector<f64>| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        match self {
            ConvexBody::Ball(b) => write!(f, "ball(d={}, r={}, c=[{}])", self.dim(), b.radius, list(&b.center)),
            ConvexBody::Ellipsoid(e) => write!(f, "ellipsoid(d={}, c=[{}])", self.dim(), list(&e.center)),
            ConvexBody::Box(b) => write!(f, "box(lower=[{}], upper=[{}])", list(&b.lower), list(&b.upper)),
            ConvexBody::Simplex(_) => write!(f, "simplex(d={})", self.dim()),
            ConvexBody::Polytope(p) => write!(f, "polytope(d={}, m={})", self.dim(), p.halfspaces.len()),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ConvexBody {
    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Ball(b) => b.center.len(),
            ConvexBody::Ellipsoid(e) => e.center.len(),
            ConvexBody::Box(b) => b.lower.len(),
            ConvexBody::Simplex(s) => s.vertices[0].len(),
            ConvexBody::Polytope(p) => p.halfspaces.dim(),
        }
    }

    pub fn unit_ball(d: usize) -> Result<Self> {
        Ok(ConvexBody::Ball(Ball::unit(d)?))
    }

    pub fn is_polytopal(&self) -> bool {
        self.halfspaces().is_some()
    }

    pub fn halfspaces(&self) -> Option<&Halfspaces> {
        match self {
            ConvexBody::Box(b) => Some(&b.halfspaces),
            ConvexBody::Simplex(s) => Some(&s.halfspaces),
            ConvexBody::Polytope(p) => Some(&p.halfspaces),
            _ => None,
        }
    }

    /// Closed-set membership: boundary points are inside.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.contains_unchecked(x))
    }

    pub(crate) fn contains_unchecked(&self, x: &[f64]) -> bool {
        match self {
            ConvexBody::Ball(b) => {
                let r2: f64 = x.iter().zip(b.center.iter()).map(|(p, c)| (p - c) * (p - c)).sum();
                r2 <= b.radius * b.radius
            }
            ConvexBody::Ellipsoid(e) => {
                let w = DVector::from_iterator(x.len(), x.iter().zip(e.center.iter()).map(|(p, c)| p - c));
                w.dot(&(&e.shape * &w)) <= 1.0
            }
            ConvexBody::Box(b) => x
                .iter()
                .zip(b.lower.iter().zip(b.upper.iter()))
                .all(|(v, (l, u))| *l <= *v && *v <= *u),
            ConvexBody::Simplex(s) => s.halfspaces.contains(x),
            ConvexBody::Polytope(p) => p.halfspaces.contains(x),
        }
    }

    /// `d`-dimensional volume; general polytopes only for `d <= 4`.
    pub fn exact_volume(&self) -> Result<f64> {
        let d = self.dim();
        match self {
            ConvexBody::Ball(b) => Ok(kappa(d as f64)? * b.radius.powi(d as i32)),
            ConvexBody::Ellipsoid(e) => Ok(kappa(d as f64)? / e.det.sqrt()),
            ConvexBody::Box(b) => Ok(b.upper.iter().zip(b.lower.iter()).map(|(u, l)| u - l).product()),
            ConvexBody::Simplex(s) => Ok(s.volume),
            ConvexBody::Polytope(p) => polytope::volume(&p.halfspaces),
        }
    }

    pub fn bounding_ball(&self) -> BoundingBall {
        match self {
            ConvexBody::Ball(b) => BoundingBall { center: b.center.clone(), radius: b.radius },
            ConvexBody::Ellipsoid(e) => BoundingBall { center: e.center.clone(), radius: e.max_semi_axis },
            ConvexBody::Box(b) => BoundingBall {
                center: (&b.lower + &b.upper) * 0.5,
                radius: 0.5 * (&b.upper - &b.lower).norm(),
            },
            ConvexBody::Simplex(s) => {
                let n = s.vertices.len() as f64;
                let c = s.vertices.iter().fold(DVector::zeros(self.dim()), |acc, v| acc + v) / n;
                let r = s.vertices.iter().map(|v| (v - &c).norm()).fold(0.0, f64::max);
                BoundingBall { center: c, radius: r }
            }
            ConvexBody::Polytope(p) => {
                let lo = DVector::from_column_slice(&p.lower);
                let hi = DVector::from_column_slice(&p.upper);
                BoundingBall { center: (&lo + &hi) * 0.5, radius: 0.5 * (&hi - &lo).norm() }
            }
        }
    }

    pub fn section_volume_linear(&self, subspace: &LinearSubspace) -> Result<f64> {
        check_dim(self.dim(), subspace.ambient_dim())?;
        self.section_volume(subspace.basis(), None)
    }

    /// Volume of the section by an affine flat; 0 when the flat misses.
    pub fn section_volume_affine(&self, flat: &AffineFlat) -> Result<f64> {
        check_dim(self.dim(), flat.ambient_dim())?;
        self.section_volume(flat.basis(), Some(flat.offset()))
    }

    fn section_volume(&self, u: &DMatrix<f64>, offset: Option<&DVector<f64>>) -> Result<f64> {
        let k = u.ncols();
        let d = self.dim();
        match self {
            ConvexBody::Ball(b) => {
                let w = match offset {
                    Some(y) => y - &b.center,
                    None => -&b.center,
                };
                let along = u.transpose() * &w;
                let dist2 = (w.norm_squared() - along.norm_squared()).max(0.0);
                let h2 = (b.radius * b.radius - dist2).max(0.0);
                Ok(kappa(k as f64)? * h2.powf(0.5 * k as f64))
            }
            ConvexBody::Ellipsoid(e) => {
                let w = match offset {
                    Some(y) => y - &e.center,
                    None => -&e.center,
                };
                let mu = &e.shape * u;
                let a = u.transpose() * &mu;
                let g = mu.transpose() * &w;
                let chol = a.cholesky().ok_or_else(|| {
                    Error::InvalidParams("degenerate section quadratic form".into())
                })?;
                let det_a: f64 = chol.l().diagonal().iter().map(|v| v * v).product();
                let solved = chol.solve(&g);
                let minval = w.dot(&(&e.shape * &w)) - g.dot(&solved);
                let h = (1.0 - minval).max(0.0);
                Ok(kappa(k as f64)? * h.powf(0.5 * k as f64) / det_a.sqrt())
            }
            _ => {
                if k == d && offset.is_none_or(|y| y.norm() == 0.0) {
                    let det = u.determinant().abs();
                    if (det - 1.0).abs() < 1e-9 {
                        return self.exact_volume();
                    }
                }
                if k > MAX_EXACT_SECTION_DIM {
                    return Err(Error::UnsupportedExactSection { k });
                }
                let hs = self.halfspaces().expect("polytopal body");
                let au = &hs.a * u;
                let rows: Vec<(Vec<f64>, f64)> = (0..hs.len())
                    .map(|i| {
                        let shift = offset.map_or(0.0, |y| dot(hs.a.row(i).transpose().as_slice(), y.as_slice()));
                        (au.row(i).iter().copied().collect(), hs.b[i] - shift)
                    })
                    .collect();
                Ok(polytope::volume_rows(&rows, k))
            }
        }
    }

    /// Whether some `x` in the body has `W^T x = y`, where the columns of `W`
    /// are orthonormal; equivalently whether the flat `{x : W^T x = y}` meets
    /// the body.
    pub fn projection_membership(&self, w: &DMatrix<f64>, y: &[f64]) -> Result<bool> {
        check_dim(self.dim(), w.nrows())?;
        check_dim(w.ncols(), y.len())?;
        let yv = DVector::from_column_slice(y);
        match self {
            ConvexBody::Ball(b) => Ok((yv - w.transpose() * &b.center).norm() <= b.radius),
            ConvexBody::Ellipsoid(e) => {
                let v = yv - w.transpose() * &e.center;
                let s = w.transpose() * &e.shape_inv * w;
                let chol = s
                    .cholesky()
                    .ok_or_else(|| Error::SolverFailure("degenerate projected ellipsoid".into()))?;
                Ok(v.dot(&chol.solve(&v)) <= 1.0)
            }
            _ => {
                let hs = self.halfspaces().expect("polytopal body");
                let mut cons: Constraints = hs.to_constraints();
                for (col, &yj) in w.column_iter().zip(y) {
                    cons.eq.push((col.iter().copied().collect(), yj));
                }
                lp::is_feasible(&cons)
            }
        }
    }

    /// Image under an orthogonal map `x -> R x`.
    pub fn rotated(&self, r: &DMatrix<f64>) -> Result<Self> {
        let d = self.dim();
        if r.nrows() != d || r.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: r.nrows() });
        }
        if (r.transpose() * r - DMatrix::<f64>::identity(d, d)).abs().max() > 1e-10 {
            return Err(Error::InvalidParams("rotation must be orthogonal".into()));
        }
        let to_vec = |v: DVector<f64>| v.iter().copied().collect::<Vec<f64>>();
        Ok(match self {
            ConvexBody::Ball(b) => ConvexBody::Ball(Ball::new(to_vec(r * &b.center), b.radius)?),
            ConvexBody::Ellipsoid(e) => {
                let m = r * &e.shape * r.transpose();
                let m = (&m + m.transpose()) * 0.5;
                ConvexBody::Ellipsoid(Ellipsoid::new(to_vec(r * &e.center), m)?)
            }
            ConvexBody::Simplex(s) => ConvexBody::Simplex(Simplex::new(
                s.vertices.iter().map(|v| to_vec(r * v)).collect(),
            )?),
            _ => {
                let hs = self.halfspaces().expect("polytopal body");
                ConvexBody::Polytope(HPolytope::new(Halfspaces::new(&hs.a * r.transpose(), hs.b.clone())?)?)
            }
        })
    }

    /// Image under `x -> lambda x`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParams("scale factor must be positive".into()));
        }
        let to_vec = |v: &DVector<f64>| v.iter().map(|x| x * lambda).collect::<Vec<f64>>();
        Ok(match self {
            ConvexBody::Ball(b) => ConvexBody::Ball(Ball::new(to_vec(&b.center), b.radius * lambda)?),
            ConvexBody::Ellipsoid(e) => ConvexBody::Ellipsoid(Ellipsoid::new(
                to_vec(&e.center),
                &e.shape / (lambda * lambda),
            )?),
            ConvexBody::Box(b) => ConvexBody::Box(AxisBox::new(to_vec(&b.lower), to_vec(&b.upper))?),
            ConvexBody::Simplex(s) => {
                ConvexBody::Simplex(Simplex::new(s.vertices.iter().map(to_vec).collect())?)
            }
            ConvexBody::Polytope(p) => ConvexBody::Polytope(HPolytope::new(Halfspaces::new(
                p.halfspaces.a.clone(),
                &p.halfspaces.b * lambda,
            )?)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn plane(vs: &[Vec<f64>]) -> LinearSubspace {
        LinearSubspace::span(vs).unwrap()
    }

    #[test]
    fn membership_examples() {
        let ball = ConvexBody::unit_ball(3).unwrap();
        assert!(ball.contains(&[0.5, 0.0, 0.0]).unwrap());
        assert!(ball.contains(&[1.0, 0.0, 0.0]).unwrap());
        let cube = ConvexBody::Box(AxisBox::cube(3, 1.0).unwrap());
        assert!(!cube.contains(&[1.01, 0.0, 0.0]).unwrap());
        assert!(cube.contains(&[1.0, -1.0, 1.0]).unwrap());
        let ell = ConvexBody::Ellipsoid(Ellipsoid::axis_aligned(vec![0.0; 2], &[1.0, 2.0]).unwrap());
        assert!(ell.contains(&[0.0, 1.9]).unwrap());
        assert!(!ell.contains(&[0.0, 2.1]).unwrap());
        assert!(matches!(ball.contains(&[0.0, 0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn volume_examples() {
        assert_relative_eq!(ConvexBody::unit_ball(3).unwrap().exact_volume().unwrap(), 4.0 * PI / 3.0, max_relative = 1e-13);
        let ell = ConvexBody::Ellipsoid(Ellipsoid::axis_aligned(vec![0.0; 3], &[1.0, 2.0, 3.0]).unwrap());
        assert_relative_eq!(ell.exact_volume().unwrap(), 8.0 * PI, max_relative = 1e-12);
        assert_eq!(ConvexBody::Box(AxisBox::cube(3, 1.0).unwrap()).exact_volume().unwrap(), 8.0);
        let s = ConvexBody::Simplex(Simplex::standard(3).unwrap());
        assert_relative_eq!(s.exact_volume().unwrap(), 1.0 / 6.0, max_relative = 1e-13);
    }

    #[test]
    fn invalid_bodies_rejected() {
        assert!(Ball::new(vec![0.0; 2], 0.0).is_err());
        assert!(AxisBox::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(Ellipsoid::new(vec![0.0; 2], m).is_err());
        // Unbounded: only x <= 1, y <= 1.
        let hs = Halfspaces::new(DMatrix::identity(2, 2), DVector::from_element(2, 1.0)).unwrap();
        assert_eq!(HPolytope::new(hs), Err(Error::UnboundedPolytope));
        // Flat: 0 <= x <= 0.
        let hs = Halfspaces::new(
            DMatrix::from_row_slice(4, 2, &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0]),
            DVector::from_vec(vec![0.0, 0.0, 1.0, 1.0]),
        )
        .unwrap();
        assert!(matches!(HPolytope::new(hs), Err(Error::InvalidBody(_))));
    }

    #[test]
    fn simplex_halfspaces_agree_with_vertices() {
        let s = Simplex::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 3.0], vec![1.0, 1.0, 1.0]])
            .unwrap();
        let body = ConvexBody::Simplex(s.clone());
        let centroid: Vec<f64> = (0..3).map(|i| s.vertices.iter().map(|v| v[i]).sum::<f64>() / 4.0).collect();
        assert!(body.contains(&centroid).unwrap());
        assert!(!body.contains(&[5.0, 5.0, 5.0]).unwrap());
        let poly = HPolytope::new(s.halfspaces.clone()).unwrap();
        assert_relative_eq!(
            ConvexBody::Polytope(poly).exact_volume().unwrap(),
            body.exact_volume().unwrap(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn linear_section_examples() {
        let ball = ConvexBody::unit_ball(3).unwrap();
        let l = plane(&[vec![1.0, 2.0, 0.0], vec![0.0, 1.0, -1.0]]);
        assert_relative_eq!(ball.section_volume_linear(&l).unwrap(), PI, max_relative = 1e-12);

        let square = ConvexBody::Box(AxisBox::cube(2, 1.0).unwrap());
        let diag = plane(&[vec![1.0, 1.0]]);
        assert_relative_eq!(square.section_volume_linear(&diag).unwrap(), 2.0 * 2f64.sqrt(), max_relative = 1e-12);

        let ell = ConvexBody::Ellipsoid(Ellipsoid::axis_aligned(vec![0.0; 3], &[1.0, 2.0, 3.0]).unwrap());
        let xy = plane(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        assert_relative_eq!(ell.section_volume_linear(&xy).unwrap(), 2.0 * PI, max_relative = 1e-12);

        let cube = ConvexBody::Box(AxisBox::cube(3, 1.0).unwrap());
        assert_relative_eq!(cube.section_volume_linear(&xy).unwrap(), 4.0, max_relative = 1e-12);
        // Diagonal plane x = y: rectangle 2 x 2 sqrt(2).
        let diag_plane = plane(&[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        assert_relative_eq!(cube.section_volume_linear(&diag_plane).unwrap(), 4.0 * 2f64.sqrt(), max_relative = 1e-12);
        // Plane orthogonal to (1,1,1): regular hexagon with side sqrt(2).
        let hex = plane(&[vec![1.0, -1.0, 0.0], vec![1.0, 1.0, -2.0]]);
        assert_relative_eq!(cube.section_volume_linear(&hex).unwrap(), 3.0 * 3f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn affine_section_examples() {
        let disk = ConvexBody::unit_ball(2).unwrap();
        let line = plane(&[vec![0.0, 1.0]]);
        let at = |t: f64| AffineFlat::through(&line, &[t, 0.0]).unwrap();
        assert_relative_eq!(disk.section_volume_affine(&at(0.6)).unwrap(), 1.6, max_relative = 1e-12);
        assert_eq!(disk.section_volume_affine(&at(2.0)).unwrap(), 0.0);

        let ball3 = ConvexBody::unit_ball(3).unwrap();
        let xy = plane(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        let far = AffineFlat::through(&xy, &[0.0, 0.0, 2.0]).unwrap();
        assert_eq!(ball3.section_volume_affine(&far).unwrap(), 0.0);

        let cube = ConvexBody::Box(AxisBox::cube(3, 1.0).unwrap());
        let z = AffineFlat::through(&xy, &[0.0, 0.0, 0.5]).unwrap();
        assert_relative_eq!(cube.section_volume_affine(&z).unwrap(), 4.0, max_relative = 1e-12);
        let miss = AffineFlat::through(&xy, &[0.0, 0.0, 1.5]).unwrap();
        assert_eq!(cube.section_volume_affine(&miss).unwrap(), 0.0);

        // Off-center ellipsoid: generic quadratic path agrees with the ball path.
        let c = vec![0.3, -0.2, 0.1];
        let e = ConvexBody::Ellipsoid(Ellipsoid::axis_aligned(c.clone(), &[1.0, 1.0, 1.0]).unwrap());
        let b = ConvexBody::Ball(Ball::new(c, 1.0).unwrap());
        let tilted = plane(&[vec![1.0, 2.0, 0.5], vec![0.0, 1.0, -1.0]]);
        let f = AffineFlat::through(&tilted, &[0.1, 0.4, -0.2]).unwrap();
        assert_relative_eq!(
            e.section_volume_affine(&f).unwrap(),
            b.section_volume_affine(&f).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn high_dim_polytope_section_unsupported() {
        let cube = ConvexBody::Box(AxisBox::cube(5, 1.0).unwrap());
        let l = LinearSubspace::new(DMatrix::identity(5, 4)).unwrap();
        assert_eq!(cube.section_volume_linear(&l), Err(Error::UnsupportedExactSection { k: 4 }));
        let ball = ConvexBody::unit_ball(5).unwrap();
        assert!(ball.section_volume_linear(&l).is_ok());
    }

    #[test]
    fn projection_membership_examples() {
        let ball = ConvexBody::unit_ball(3).unwrap();
        let w = plane(&[vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0]]);
        let w = w.basis().clone();
        assert!(ball.projection_membership(&w, &[0.9, 0.0]).unwrap());
        assert!(!ball.projection_membership(&w, &[1.1, 0.0]).unwrap());
        let cube = ConvexBody::Box(AxisBox::cube(3, 1.0).unwrap());
        assert!(cube.projection_membership(&w, &[0.0, 0.0]).unwrap());
        let e1 = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        assert!(cube.projection_membership(&e1, &[1.0]).unwrap());
        assert!(!cube.projection_membership(&e1, &[1.2]).unwrap());
        let diag = DMatrix::from_column_slice(3, 1, &[1.0, 1.0, 1.0]) / 3f64.sqrt();
        assert!(cube.projection_membership(&diag, &[3f64.sqrt() - 1e-9]).unwrap());
        assert!(!cube.projection_membership(&diag, &[3f64.sqrt() + 1e-6]).unwrap());
        let ell = ConvexBody::Ellipsoid(Ellipsoid::axis_aligned(vec![0.0; 3], &[1.0, 2.0, 3.0]).unwrap());
        let ez = DMatrix::from_column_slice(3, 1, &[0.0, 0.0, 1.0]);
        assert!(ell.projection_membership(&ez, &[2.9]).unwrap());
        assert!(!ell.projection_membership(&ez, &[3.1]).unwrap());
    }

    #[test]
    fn rotation_and_scale_images() {
        let t = 0.7f64;
        let r = DMatrix::from_row_slice(3, 3, &[t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0]);
        let cube = ConvexBody::Box(AxisBox::cube(3, 1.0).unwrap());
        let rc = cube.rotated(&r).unwrap();
        assert_relative_eq!(rc.exact_volume().unwrap(), 8.0, max_relative = 1e-10);
        let l = plane(&[vec![1.0, 0.3, 0.0], vec![0.2, 0.0, 1.0]]);
        let rl = LinearSubspace::new(&r * l.basis()).unwrap();
        assert_relative_eq!(
            rc.section_volume_linear(&rl).unwrap(),
            cube.section_volume_linear(&l).unwrap(),
            max_relative = 1e-9
        );
        let big = cube.scaled(2.0).unwrap();
        assert_relative_eq!(big.section_volume_linear(&l).unwrap(), 4.0 * cube.section_volume_linear(&l).unwrap(), max_relative = 1e-12);
    }
}
