use nalgebra::DVector;
use proptest::prelude::*;
use sectio::body::{AxisBox, ConvexBody, Simplex};
use sectio::geometry::AffineFlat;
use sectio::kernel::kappa;
use sectio::rng::derive_substream;
use sectio::sampling::{
    haar_frame, sample_affine_flat, sample_grassmannian, sample_uniform_in_body, uniform_in_section,
};
use sectio::stats::{mc_mean, McConfig};
use statrs::distribution::{Beta, ContinuousCDF};

const GRID: [(usize, usize); 5] = [(3, 1), (3, 2), (4, 2), (5, 2), (6, 3)];
const KS_CRIT_1PCT: f64 = 1.628;

fn projections(d: usize, k: usize, seed: u64, n: u64, rotate: bool) -> Vec<f64> {
    let v = DVector::from_fn(d, |i, _| if i == 0 { 1.0 } else { 0.0 });
    let r = haar_frame(d, d, &mut derive_substream(999, 0));
    (0..n)
        .map(|i| {
            let u = sample_grassmannian(d, k, &mut derive_substream(seed, i)).unwrap().basis().clone();
            let u = if rotate { &r * u } else { u };
            (u.transpose() * &v).norm_squared()
        })
        .collect()
}

#[test]
fn haar_projection_is_beta() {
    let n = 10_000;
    for (d, k) in GRID {
        let beta = Beta::new(k as f64 / 2.0, (d - k) as f64 / 2.0).unwrap();
        let mut xs = projections(d, k, 31, n, false);
        xs.sort_by(f64::total_cmp);
        let nf = n as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = beta.cdf(x);
                (f - i as f64 / nf).max((i as f64 + 1.0) / nf - f)
            })
            .fold(0.0, f64::max);
        assert!(ks < KS_CRIT_1PCT / nf.sqrt(), "({d},{k}) D={ks}");
    }
}

#[test]
fn rotated_subspaces_have_the_same_law() {
    let n = 5_000;
    for (d, k) in GRID {
        let mut a = projections(d, k, 32, n, false);
        let mut b = projections(d, k, 33, n, true);
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut ks) = (0, 0, 0.0f64);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            ks = ks.max((i as f64 / n as f64 - j as f64 / n as f64).abs());
        }
        let crit = KS_CRIT_1PCT * (2.0 / n as f64).sqrt();
        assert!(ks < crit, "({d},{k}) D={ks} crit={crit}");
    }
}

#[test]
fn hitting_measure_of_unit_ball() {
    for (d, k) in GRID {
        let ball = ConvexBody::unit_ball(d).unwrap();
        let est = mc_mean(McConfig::new(100_000, 34), |_, s| {
            let wf = sample_affine_flat(&ball, k, s)?;
            Ok(if wf.hit { wf.weight } else { 0.0 })
        })
        .unwrap();
        let want = kappa((d - k) as f64).unwrap();
        assert!((est.mean - want).abs() <= 3.0 * est.std_error + 1e-12 * want, "({d},{k}) {est:?} vs {want}");
    }
}

#[test]
fn plane_hitting_measure_is_mean_width() {
    let body = ConvexBody::Box(AxisBox::new(vec![2.0, 2.0, 2.0], vec![3.0, 3.0, 3.0]).unwrap());
    let est = mc_mean(McConfig::new(200_000, 35), |_, s| {
        let wf = sample_affine_flat(&body, 2, s)?;
        Ok(if wf.hit { wf.weight } else { 0.0 })
    })
    .unwrap();
    // Planes hitting a body have measure equal to its mean width, 3/2 for the
    // unit cube, wherever the cube sits.
    assert!((est.mean - 1.5).abs() <= 3.0 * est.std_error, "{est:?}");
}

#[test]
fn uniform_in_ball_second_moment() {
    for d in [2usize, 3, 5] {
        let ball = ConvexBody::unit_ball(d).unwrap();
        let est = mc_mean(McConfig::new(100_000, 36), |_, s| {
            let x = sample_uniform_in_body(&ball, s)?;
            Ok(x.iter().map(|v| v * v).sum())
        })
        .unwrap();
        let want = d as f64 / (d as f64 + 2.0);
        assert!((est.mean - want).abs() <= 3.0 * est.std_error, "d={d} {est:?}");
    }
}

#[test]
fn uniform_in_simplex_mean_is_centroid() {
    let simplex = ConvexBody::Simplex(Simplex::new(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 3.0]]).unwrap());
    for (axis, want) in [(0usize, 2.0 / 3.0), (1, 1.0)] {
        let est = mc_mean(McConfig::new(50_000, 37), |_, s| Ok(sample_uniform_in_body(&simplex, s)?[axis])).unwrap();
        assert!((est.mean - want).abs() <= 3.0 * est.std_error, "{est:?}");
    }
}

#[test]
fn uniform_in_section_of_cube_is_uniform() {
    // The plane x + y + z = 0 meets the cube in a regular hexagon; its centroid
    // is the origin and points stay inside.
    let cube = ConvexBody::Box(AxisBox::cube(3, 1.0).unwrap());
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();
    let basis = nalgebra::DMatrix::from_column_slice(3, 2, &[1.0 / s2, -1.0 / s2, 0.0, 1.0 / s6, 1.0 / s6, -2.0 / s6]);
    let flat = AffineFlat::new(basis, DVector::zeros(3)).unwrap();
    let est = mc_mean(McConfig::new(50_000, 38), |_, s| {
        let t = uniform_in_section(&cube, &flat, s)?;
        let x = flat.point(&t);
        assert!(cube.contains(x.as_slice()).unwrap());
        Ok(t[0])
    })
    .unwrap();
    assert!(est.mean.abs() <= 3.0 * est.std_error, "{est:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn haar_frames_are_orthonormal(d in 1usize..8, seed in any::<u64>(), index in any::<u64>()) {
        let f = haar_frame(d, d, &mut derive_substream(seed, index));
        let gram = f.transpose() * &f;
        for i in 0..d {
            for j in 0..d {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[(i, j)] - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sampled_points_lie_in_body(seed in any::<u64>(), lo in -2.0f64..0.0, hi in 0.1f64..2.0) {
        let body = ConvexBody::Box(AxisBox::new(vec![lo, lo - 1.0, lo], vec![hi, hi, hi + 1.0]).unwrap());
        let mut s = derive_substream(seed, 0);
        for _ in 0..16 {
            let x = sample_uniform_in_body(&body, &mut s).unwrap();
            prop_assert!(body.contains(&x).unwrap());
        }
    }
}
