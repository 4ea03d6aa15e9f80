//! Uniform points in bodies and sections, Haar-random subspaces, and
//! weighted affine flats whose weights realize the motion-invariant measure
//! on `A_{d,k}` (normalized so flats hitting the unit ball have measure
//! `kappa_{d-k}`).

use nalgebra::{DMatrix, DVector};

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::geometry::{orthonormalize, AffineFlat, LinearSubspace};
use crate::kernel::kappa;
use crate::rng::RandomStream;

/// Proposals without an acceptance after which a rejection sampler gives up.
pub const MAX_PROPOSALS: u64 = 100_000;

/// Uniform point in the ball of the given center and radius.
pub fn uniform_in_ball(center: &[f64], radius: f64, stream: &mut RandomStream) -> Vec<f64> {
    let d = center.len();
    let mut dir: Vec<f64> = (0..d).map(|_| stream.normal()).collect();
    let mut norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    while norm == 0.0 {
        dir.iter_mut().for_each(|v| *v = stream.normal());
        norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    let r = radius * stream.uniform().powf(1.0 / d as f64);
    dir.iter().zip(center).map(|(v, c)| c + v / norm * r).collect()
}

/// Uniform point in `body`, with the number of proposals it took (1 for the
/// exact samplers).
pub fn sample_uniform_counted(body: &ConvexBody, stream: &mut RandomStream) -> Result<(Vec<f64>, u64)> {
    let d = body.dim();
    match body {
        ConvexBody::Ball(b) => Ok((uniform_in_ball(b.center().as_slice(), b.radius(), stream), 1)),
        ConvexBody::Ellipsoid(e) => {
            let z = DVector::from_vec(uniform_in_ball(&vec![0.0; d], 1.0, stream));
            let x = e.transform() * z + e.center();
            Ok((x.iter().copied().collect(), 1))
        }
        ConvexBody::Box(b) => Ok((
            b.lower().iter().zip(b.upper().iter()).map(|(l, u)| l + (u - l) * stream.uniform()).collect(),
            1,
        )),
        ConvexBody::Simplex(s) => {
            let w: Vec<f64> = (0..=d).map(|_| stream.exponential()).collect();
            let total: f64 = w.iter().sum();
            let mut x = vec![0.0; d];
            for (wi, v) in w.iter().zip(s.vertices()) {
                for (xj, vj) in x.iter_mut().zip(v.iter()) {
                    *xj += wi / total * vj;
                }
            }
            Ok((x, 1))
        }
        ConvexBody::Polytope(p) => {
            let (lo, hi) = p.bounding_box();
            let mut x = vec![0.0; d];
            for attempt in 1..=MAX_PROPOSALS {
                for j in 0..d {
                    x[j] = lo[j] + (hi[j] - lo[j]) * stream.uniform();
                }
                if p.halfspaces().contains(&x) {
                    return Ok((x, attempt));
                }
            }
            Err(Error::RejectionStall { accepted: 0, proposals: MAX_PROPOSALS })
        }
    }
}

/// Uniform point in `body`. Exact for balls, ellipsoids, boxes and simplices;
/// rejection from the bounding box for general polytopes.
pub fn sample_uniform_in_body(body: &ConvexBody, stream: &mut RandomStream) -> Result<Vec<f64>> {
    sample_uniform_counted(body, stream).map(|(x, _)| x)
}

/// Empirical acceptance rate of the point sampler over `draws` draws.
pub fn acceptance_rate(body: &ConvexBody, draws: u64, stream: &mut RandomStream) -> Result<f64> {
    let mut proposals = 0;
    for _ in 0..draws {
        proposals += sample_uniform_counted(body, stream)?.1;
    }
    Ok(draws as f64 / proposals.max(1) as f64)
}

/// `d x cols` matrix whose columns are the first `cols` columns of a
/// Haar-distributed orthogonal matrix.
pub fn haar_frame(d: usize, cols: usize, stream: &mut RandomStream) -> DMatrix<f64> {
    loop {
        let g = DMatrix::from_fn(d, cols, |_, _| stream.normal());
        if let Some(q) = orthonormalize(&g) {
            return q;
        }
    }
}

/// Haar-random element of `G_{d,k}`.
pub fn sample_grassmannian(d: usize, k: usize, stream: &mut RandomStream) -> Result<LinearSubspace> {
    if k == 0 || k > d {
        return Err(Error::InvalidParams(format!("need 1 <= k <= d, got k={k}, d={d}")));
    }
    LinearSubspace::new(haar_frame(d, k, stream))
}

/// A proposed affine flat together with its measure weight.
#[derive(Debug, Clone)]
pub struct WeightedFlat {
    pub flat: AffineFlat,
    /// Orthonormal basis `W` of the orthogonal complement of the direction.
    pub complement: DMatrix<f64>,
    /// Offset coordinates `W^T x` shared by all points of the flat.
    pub coords: Vec<f64>,
    /// Volume of the offset proposal region, `kappa_{d-k} R^{d-k}`.
    pub weight: f64,
    /// Whether the flat meets the body.
    pub hit: bool,
}

/// Direction Haar on `G_{d,k}`, offset uniform in the `(d-k)`-ball of the
/// body's bounding radius `R` around the projected bounding center. For any
/// integrable `f` vanishing on flats that miss the body,
/// `E[weight * f(E)] = int f(E) mu(dE)`.
pub fn sample_affine_flat(body: &ConvexBody, k: usize, stream: &mut RandomStream) -> Result<WeightedFlat> {
    let d = body.dim();
    if k == 0 || k >= d {
        return Err(Error::InvalidParams(format!("affine flats need 1 <= k <= d-1, got k={k}, d={d}")));
    }
    let frame = haar_frame(d, d, stream);
    let u = frame.columns(0, k).clone_owned();
    let w = frame.columns(k, d - k).clone_owned();
    let bb = body.bounding_ball();
    let center = w.transpose() * &bb.center;
    let coords = uniform_in_ball(center.as_slice(), bb.radius, stream);
    let offset = &w * DVector::from_column_slice(&coords);
    let hit = body.projection_membership(&w, &coords)?;
    let weight = kappa((d - k) as f64)? * bb.radius.powi((d - k) as i32);
    Ok(WeightedFlat { flat: AffineFlat::new(u, offset)?, complement: w, coords, weight, hit })
}

/// Center (in flat coordinates) and radius of a ball containing the section
/// of `body` by `flat`; `None` if the flat misses the bounding ball.
pub fn section_bounding_disk(body: &ConvexBody, flat: &AffineFlat) -> Option<(Vec<f64>, f64)> {
    let bb = body.bounding_ball();
    let rel = &bb.center - flat.offset();
    let t = flat.basis().transpose() * &rel;
    let dist2 = (rel.norm_squared() - t.norm_squared()).max(0.0);
    let r2 = bb.radius * bb.radius - dist2;
    (r2 > 0.0).then(|| (t.iter().copied().collect(), r2.sqrt()))
}

/// Uniform point of `body ∩ flat`, in flat coordinates, by rejection inside
/// the section's bounding disk.
pub fn uniform_in_section(body: &ConvexBody, flat: &AffineFlat, stream: &mut RandomStream) -> Result<Vec<f64>> {
    let (center, radius) = section_bounding_disk(body, flat)
        .ok_or(Error::RejectionStall { accepted: 0, proposals: 0 })?;
    for _ in 0..MAX_PROPOSALS {
        let t = uniform_in_ball(&center, radius, stream);
        let x = flat.point(&t);
        if body.contains_unchecked(x.as_slice()) {
            return Ok(t);
        }
    }
    Err(Error::RejectionStall { accepted: 0, proposals: MAX_PROPOSALS })
}

/// Membership-counting estimate of the section volume, with its standard
/// error: `points` uniform draws in a cube enclosing the section.
pub fn section_volume_mc(
    body: &ConvexBody,
    flat: &AffineFlat,
    points: u64,
    stream: &mut RandomStream,
) -> (f64, f64) {
    let Some((center, radius)) = section_bounding_disk(body, flat) else {
        return (0.0, 0.0);
    };
    let k = flat.dim();
    let mut t = vec![0.0; k];
    let mut hits = 0u64;
    for _ in 0..points {
        for (tj, cj) in t.iter_mut().zip(&center) {
            *tj = cj + radius * (2.0 * stream.uniform() - 1.0);
        }
        if body.contains_unchecked(flat.point(&t).as_slice()) {
            hits += 1;
        }
    }
    let cube = (2.0 * radius).powi(k as i32);
    let f = hits as f64 / points as f64;
    (cube * f, cube * (f * (1.0 - f) / points as f64).sqrt())
}
