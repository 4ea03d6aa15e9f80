//! H-polytopes `{x : A x <= b}`: vertex enumeration, boundedness and exact
//! volume in low dimension.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, Constraints, LpOutcome};

/// Slack allowed when testing a candidate vertex against the constraints.
pub const VERTEX_SLACK: f64 = 1e-9;
/// Max-norm distance under which two vertices are merged.
pub const VERTEX_DEDUP: f64 = 1e-9;
/// Largest dimension handled by [`volume`].
pub const MAX_VOLUME_DIM: usize = 4;
const MAX_ROWS: usize = 64;

/// Row-major halfspace system.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspaces {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

/// Serialized form `{"A": [[...], ...], "b": [...]}` of `A x <= b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceDocument {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl HalfspaceDocument {
    pub fn to_halfspaces(&self) -> Result<Halfspaces> {
        let cols = self.a.first().map_or(0, Vec::len);
        if let Some(row) = self.a.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, found: row.len() });
        }
        if self.a.iter().flatten().chain(&self.b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidBody("non-finite halfspace coefficient".into()));
        }
        let flat: Vec<f64> = self.a.iter().flatten().copied().collect();
        Halfspaces::new(DMatrix::from_row_slice(self.a.len(), cols, &flat), DVector::from_vec(self.b.clone()))
    }
}

impl From<&Halfspaces> for HalfspaceDocument {
    fn from(hs: &Halfspaces) -> Self {
        Self {
            a: hs.a.row_iter().map(|r| r.iter().copied().collect()).collect(),
            b: hs.b.iter().copied().collect(),
        }
    }
}

impl Halfspaces {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.len() });
        }
        if a.ncols() == 0 {
            return Err(Error::InvalidBody("halfspace system without variables".into()));
        }
        Ok(Self { a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn len(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.a.nrows() == 0
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        (0..self.len()).all(|i| {
            let s: f64 = (0..self.dim()).map(|j| self.a[(i, j)] * x[j]).sum();
            s <= self.b[i]
        })
    }

    pub fn to_constraints(&self) -> Constraints {
        let mut cons = Constraints::new(self.dim());
        for i in 0..self.len() {
            cons.ub.push((self.a.row(i).iter().copied().collect(), self.b[i]));
        }
        cons
    }

    /// Coordinate-wise bounding box via `2 d` linear programs; fails with
    /// [`Error::UnboundedPolytope`] when some direction is unbounded.
    pub fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let d = self.dim();
        let cons = self.to_constraints();
        let mut lo = vec![0.0; d];
        let mut hi = vec![0.0; d];
        for i in 0..d {
            for sign in [1.0, -1.0] {
                let mut c = vec![0.0; d];
                c[i] = sign;
                match lp::maximize(&c, &cons)? {
                    LpOutcome::Optimal { value, .. } => {
                        if sign > 0.0 {
                            hi[i] = value;
                        } else {
                            lo[i] = -value;
                        }
                    }
                    LpOutcome::Unbounded => return Err(Error::UnboundedPolytope),
                    LpOutcome::Infeasible => {
                        return Err(Error::InvalidBody("empty polytope".into()))
                    }
                }
            }
        }
        Ok((lo, hi))
    }

    /// Radius of the largest inscribed ball (Chebyshev center LP).
    pub fn inradius(&self) -> Result<f64> {
        let d = self.dim();
        let mut cons = Constraints::new(d + 1);
        for i in 0..self.len() {
            let row = self.a.row(i);
            let mut r: Vec<f64> = row.iter().copied().collect();
            r.push(row.norm());
            cons.ub.push((r, self.b[i]));
        }
        // Cap the radius so an unbounded system still yields a finite LP.
        let mut cap = vec![0.0; d + 1];
        cap[d] = 1.0;
        cons.ub.push((cap.clone(), 1e12));
        match lp::maximize(&cap, &cons)? {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Infeasible => Ok(0.0),
            LpOutcome::Unbounded => Err(Error::UnboundedPolytope),
        }
    }
}

/// Normalized rows with zero rows resolved: `None` when some constraint
/// reads `0 <= negative`.
fn normalize_rows(rows: &[(Vec<f64>, f64)]) -> Option<Vec<(Vec<f64>, f64)>> {
    let mut out: Vec<(Vec<f64>, f64)> = Vec::with_capacity(rows.len());
    for (a, b) in rows {
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-14 {
            if *b < -VERTEX_SLACK {
                return None;
            }
            continue;
        }
        let a: Vec<f64> = a.iter().map(|v| v / norm).collect();
        let b = b / norm;
        let dup = out.iter().any(|(oa, ob)| {
            (ob - b).abs() <= 1e-12 && oa.iter().zip(&a).all(|(x, y)| (x - y).abs() <= 1e-12)
        });
        if !dup {
            out.push((a, b));
        }
    }
    Some(out)
}

fn solve_square(rows: &[&[f64]], rhs: &[f64]) -> Option<Vec<f64>> {
    let k = rows.len();
    match k {
        1 => {
            let a = rows[0][0];
            (a.abs() > 1e-12).then(|| vec![rhs[0] / a])
        }
        2 => {
            let det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0];
            if det.abs() < 1e-12 {
                return None;
            }
            Some(vec![
                (rhs[0] * rows[1][1] - rows[0][1] * rhs[1]) / det,
                (rows[0][0] * rhs[1] - rhs[0] * rows[1][0]) / det,
            ])
        }
        _ => {
            let m = DMatrix::from_fn(k, k, |i, j| rows[i][j]);
            let lu = m.lu();
            let det = lu.determinant();
            if det.abs() < 1e-12 {
                return None;
            }
            lu.solve(&DVector::from_column_slice(rhs)).map(|v| v.iter().copied().collect())
        }
    }
}

fn feasible(rows: &[(Vec<f64>, f64)], x: &[f64]) -> bool {
    rows.iter().all(|(a, b)| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() <= b + VERTEX_SLACK)
}

fn combinations(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        let next = loop {
            if i == 0 {
                break None;
            }
            i -= 1;
            if idx[i] < m - k + i {
                break Some(i);
            }
        };
        let Some(i) = next else { return };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Vertices of `{x in R^k : rows}` without any boundedness check.
pub(crate) fn raw_vertices(rows: &[(Vec<f64>, f64)], k: usize) -> Vec<Vec<f64>> {
    let mut verts: Vec<Vec<f64>> = Vec::new();
    combinations(rows.len(), k, |sel| {
        let a: Vec<&[f64]> = sel.iter().map(|&i| rows[i].0.as_slice()).collect();
        let b: Vec<f64> = sel.iter().map(|&i| rows[i].1).collect();
        if let Some(x) = solve_square(&a, &b) {
            if feasible(rows, &x)
                && !verts
                    .iter()
                    .any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() <= VERTEX_DEDUP))
            {
                verts.push(x);
            }
        }
    });
    verts
}

/// All vertices of a bounded polytope `{x : A x <= b}` with `k <= 4`
/// variables and at most 64 rows.
pub fn vertex_enumeration(hs: &Halfspaces) -> Result<Vec<Vec<f64>>> {
    let k = hs.dim();
    if k > MAX_VOLUME_DIM || hs.len() > MAX_ROWS {
        return Err(Error::InvalidBody(format!(
            "vertex enumeration limited to dimension {MAX_VOLUME_DIM} and {MAX_ROWS} rows"
        )));
    }
    hs.bounding_box()?;
    let rows: Vec<(Vec<f64>, f64)> =
        (0..hs.len()).map(|i| (hs.a.row(i).iter().copied().collect(), hs.b[i])).collect();
    match normalize_rows(&rows) {
        None => Ok(Vec::new()),
        Some(rows) => Ok(raw_vertices(&rows, k)),
    }
}

/// Exact volume of `{t in R^dim : rows}` for `dim <= 4`. The set must be
/// bounded (or empty); unbounded input gives meaningless output.
pub(crate) fn volume_rows(rows: &[(Vec<f64>, f64)], dim: usize) -> f64 {
    let Some(rows) = normalize_rows(rows) else {
        return 0.0;
    };
    match dim {
        0 => 1.0,
        1 => {
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for (a, b) in &rows {
                if a[0] > 0.0 {
                    hi = hi.min(b / a[0]);
                } else {
                    lo = lo.max(b / a[0]);
                }
            }
            (hi - lo).max(0.0)
        }
        2 => polygon_area(&rows),
        _ => {
            // Pyramids over the facets from the origin, with signed heights.
            let mut total = 0.0;
            for (i, (ai, bi)) in rows.iter().enumerate() {
                let basis = complement_basis(ai);
                let foot: Vec<f64> = ai.iter().map(|v| v * bi).collect();
                let sub: Vec<(Vec<f64>, f64)> = rows
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, (aj, bj))| {
                        let row: Vec<f64> = basis
                            .iter()
                            .map(|col| aj.iter().zip(col).map(|(p, q)| p * q).sum())
                            .collect();
                        let shift: f64 = aj.iter().zip(&foot).map(|(p, q)| p * q).sum();
                        (row, bj - shift)
                    })
                    .collect();
                let facet = volume_rows(&sub, dim - 1);
                if facet > 0.0 {
                    total += bi * facet;
                }
            }
            (total / dim as f64).max(0.0)
        }
    }
}

fn polygon_area(rows: &[(Vec<f64>, f64)]) -> f64 {
    let verts = raw_vertices(rows, 2);
    if verts.len() < 3 {
        return 0.0;
    }
    let n = verts.len() as f64;
    let cx = verts.iter().map(|v| v[0]).sum::<f64>() / n;
    let cy = verts.iter().map(|v| v[1]).sum::<f64>() / n;
    let mut ordered: Vec<(f64, &Vec<f64>)> =
        verts.iter().map(|v| ((v[1] - cy).atan2(v[0] - cx), v)).collect();
    ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut twice = 0.0;
    for i in 0..ordered.len() {
        let p = ordered[i].1;
        let q = ordered[(i + 1) % ordered.len()].1;
        twice += p[0] * q[1] - p[1] * q[0];
    }
    0.5 * twice.abs()
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `a`.
fn complement_basis(a: &[f64]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    // Start from the coordinate axes least aligned with `a`.
    order.sort_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()));
    for &e in &order {
        if basis.len() == n - 1 {
            break;
        }
        let mut v = vec![0.0; n];
        v[e] = 1.0;
        for _ in 0..2 {
            for u in std::iter::once(a).chain(basis.iter().map(|b| b.as_slice())) {
                let dot: f64 = v.iter().zip(u).map(|(p, q)| p * q).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= dot * ui;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

/// Exact volume of a bounded polytope in dimension at most 4.
pub fn volume(hs: &Halfspaces) -> Result<f64> {
    let d = hs.dim();
    if d > MAX_VOLUME_DIM {
        return Err(Error::UnsupportedExactVolume { dim: d });
    }
    let rows: Vec<(Vec<f64>, f64)> =
        (0..hs.len()).map(|i| (hs.a.row(i).iter().copied().collect(), hs.b[i])).collect();
    Ok(volume_rows(&rows, d))
}
