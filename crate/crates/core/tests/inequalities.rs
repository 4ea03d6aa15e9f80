use nalgebra::{DMatrix, DVector};
use sectio::body::{AxisBox, ConvexBody, Ellipsoid, HPolytope, Simplex};
use sectio::estimators::{
    bp_check, estimate_lhs_linear, estimate_rhs_linear, verify, verify_probabilistic, BpKind, EstimatorOptions,
    TheoremId, Verdict,
};
use sectio::kernel::{min_exponent, MomentParams};
use sectio::polytope::Halfspaces;
use sectio::rng::derive_substream;
use sectio::sampling::haar_frame;

fn random_ellipsoid(seed: u64, centered: bool) -> ConvexBody {
    let mut s = derive_substream(seed, 0);
    let a = DMatrix::from_fn(3, 3, |_, _| s.normal());
    let shape = a.transpose() * &a * 0.5 + DMatrix::identity(3, 3) * 0.3;
    let center = (0..3).map(|_| if centered { 0.0 } else { s.uniform() - 0.5 }).collect();
    ConvexBody::Ellipsoid(Ellipsoid::new(center, shape).unwrap())
}

fn random_polytope(seed: u64) -> ConvexBody {
    let mut s = derive_substream(seed, 0);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for _ in 0..12 {
        let n = DVector::from_fn(3, |_, _| s.normal()).normalize();
        rows.extend(n.iter().copied());
        rhs.push(0.7 + 0.5 * s.uniform());
    }
    for i in 0..3 {
        for sign in [1.0, -1.0] {
            rows.extend((0..3).map(|j| if i == j { sign } else { 0.0 }));
            rhs.push(1.5);
        }
    }
    let hs = Halfspaces::new(DMatrix::from_row_slice(rhs.len(), 3, &rows), DVector::from_vec(rhs)).unwrap();
    ConvexBody::Polytope(HPolytope::new(hs).unwrap())
}

/// Bodies paired with whether they are symmetric about the origin.
fn standard_set() -> Vec<(ConvexBody, bool)> {
    vec![
        (ConvexBody::unit_ball(3).unwrap(), true),
        (random_ellipsoid(101, true), true),
        (random_ellipsoid(102, true), true),
        (random_ellipsoid(103, false), false),
        (ConvexBody::Box(AxisBox::new(vec![-1.0, -0.5, -2.0], vec![1.0, 0.5, 2.0]).unwrap()), true),
        (ConvexBody::Box(AxisBox::new(vec![-1.0, -0.5, 0.0], vec![1.0, 0.5, 2.0]).unwrap()), false),
        (ConvexBody::Simplex(Simplex::standard(3).unwrap()), false),
        (random_polytope(104), false),
    ]
}

#[test]
fn standard_set_never_violates() {
    let d = 3;
    for (b, (body, symmetric)) in standard_set().iter().enumerate() {
        for k in 1..d {
            for p in [min_exponent(d, k) + 0.5, 0.0, 1.0, 2.0] {
                let params = MomentParams::new(d, k, p).unwrap();
                let opts = EstimatorOptions::new(20_000, 1000 + b as u64);
                for theorem in [TheoremId::Thm1, TheoremId::Thm2] {
                    let r = verify(theorem, body, &params, &opts).unwrap();
                    assert!(
                        r.ratio <= 1.0 + 4.0 * r.ratio_std_error,
                        "{theorem} {body} k={k} p={p}: ratio {} se {}",
                        r.ratio,
                        r.ratio_std_error
                    );
                    assert_ne!(r.verdict, Verdict::Violation);
                    if theorem == TheoremId::Thm1 && k == 1 && *symmetric {
                        assert_eq!(r.verdict, Verdict::EqualityWithinTolerance, "{body} p={p}: {r:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn ellipsoids_attain_equality() {
    let params = MomentParams::new(3, 2, 1.0).unwrap();
    for seed in [101, 102, 103] {
        let opts = EstimatorOptions::new(40_000, seed);
        let centered = random_ellipsoid(seed, true);
        let r = verify(TheoremId::Thm1, &centered, &params, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::EqualityWithinTolerance, "{centered}: {r:?}");
        // The affine integral is translation invariant.
        let shifted = random_ellipsoid(seed, false);
        let r = verify(TheoremId::Thm2, &shifted, &params, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::EqualityWithinTolerance, "{shifted}: {r:?}");
    }
}

#[test]
fn off_center_ellipsoid_is_strict_for_linear_sections() {
    let params = MomentParams::new(3, 2, 1.0).unwrap();
    let body = ConvexBody::Ellipsoid(Ellipsoid::axis_aligned(vec![0.5, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap());
    let r = verify(TheoremId::Thm1, &body, &params, &EstimatorOptions::new(40_000, 3)).unwrap();
    assert_eq!(r.verdict, Verdict::StrictInequality, "{r:?}");
}

#[test]
fn linear_k1_identity_is_strict_without_origin_symmetry() {
    // The chord through the origin is rho(u) + rho(-u); equality with the
    // polar-coordinate moment needs rho(u) = rho(-u).
    let shifted = ConvexBody::Box(AxisBox::new(vec![-0.5, -1.0], vec![1.5, 1.0]).unwrap());
    let r = verify(TheoremId::Thm1, &shifted, &MomentParams::new(2, 1, 1.0).unwrap(), &EstimatorOptions::new(40_000, 4))
        .unwrap();
    assert_eq!(r.verdict, Verdict::StrictInequality, "{r:?}");
}

#[test]
fn scale_covariance() {
    let params = MomentParams::new(3, 2, 1.0).unwrap();
    let body = ConvexBody::Box(AxisBox::cube(3, 1.0).unwrap());
    let scaled = body.scaled(2.0).unwrap();
    let opts = EstimatorOptions::new(20_000, 5);
    let factor = 2f64.powi(2 * 4);
    let (l1, l2) = (estimate_lhs_linear(&body, &params, &opts).unwrap(), estimate_lhs_linear(&scaled, &params, &opts).unwrap());
    let (r1, r2) = (estimate_rhs_linear(&body, &params, &opts).unwrap(), estimate_rhs_linear(&scaled, &params, &opts).unwrap());
    assert!((l2.mean / factor - l1.mean).abs() <= 2.0 * l1.std_error, "{l1:?} {l2:?}");
    assert!((r2.mean / factor - r1.mean).abs() <= 2.0 * r1.std_error, "{r1:?} {r2:?}");
    let a = verify(TheoremId::Thm1, &body, &params, &opts).unwrap();
    let b = verify(TheoremId::Thm1, &scaled, &params, &opts).unwrap();
    assert!((a.ratio - b.ratio).abs() <= 2.0 * a.ratio_std_error);
}

#[test]
fn rotation_invariance() {
    let params = MomentParams::new(3, 2, 1.0).unwrap();
    let body = ConvexBody::Box(AxisBox::cube(3, 1.0).unwrap());
    let rot = haar_frame(3, 3, &mut derive_substream(77, 0));
    let rotated = body.rotated(&rot).unwrap();
    let a = verify(TheoremId::Thm1, &body, &params, &EstimatorOptions::new(40_000, 6)).unwrap();
    let b = verify(TheoremId::Thm1, &rotated, &params, &EstimatorOptions::new(40_000, 7)).unwrap();
    let sigma = (a.ratio_std_error.powi(2) + b.ratio_std_error.powi(2)).sqrt();
    assert!((a.ratio - b.ratio).abs() <= 2.0 * sigma, "{} vs {} (sigma {sigma})", a.ratio, b.ratio);
}

#[test]
fn blaschke_petkantschin_equalities() {
    let opts = EstimatorOptions::new(2_000, 8).with_inner(200);
    let cases = [
        (BpKind::Linear, ConvexBody::unit_ball(3).unwrap(), 2, 1.0),
        (BpKind::Linear, ConvexBody::Simplex(Simplex::standard(3).unwrap()), 1, 2.0),
        (BpKind::Affine, ConvexBody::Box(AxisBox::cube(3, 1.0).unwrap()), 2, 1.0),
        (BpKind::Affine, random_ellipsoid(9, false), 1, 0.0),
    ];
    for (kind, body, k, p) in cases {
        let r = bp_check(kind, &body, k, p, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::EqualityWithinTolerance, "{kind:?} {body} k={k} p={p}: {r:?}");
    }
}

#[test]
fn probabilistic_form_agrees_with_direct_form() {
    let opts = EstimatorOptions::new(100_000, 10);
    for (body, p) in [(ConvexBody::unit_ball(3).unwrap(), 1.0), (ConvexBody::Box(AxisBox::cube(3, 1.0).unwrap()), 1.0)] {
        let params = MomentParams::new(3, 2, p).unwrap();
        let direct = verify(TheoremId::Thm2, &body, &params, &opts).unwrap();
        let prob = verify_probabilistic(TheoremId::Thm2, &body, &params, &opts).unwrap();
        assert_eq!(direct.verdict, prob.verdict, "{body}: {direct:?} vs {prob:?}");
        let sigma = (direct.ratio_std_error.powi(2) + prob.ratio_std_error.powi(2)).sqrt();
        assert!((direct.ratio - prob.ratio).abs() <= 4.0 * sigma);
    }
    let params = MomentParams::new(3, 2, 1.0).unwrap();
    let body = ConvexBody::unit_ball(3).unwrap();
    let direct = verify(TheoremId::Thm1, &body, &params, &opts).unwrap();
    let prob = verify_probabilistic(TheoremId::Thm1, &body, &params, &opts).unwrap();
    assert_eq!(direct, prob);
}

#[test]
fn reports_identical_across_worker_counts() {
    let body = random_polytope(11);
    let params = MomentParams::new(3, 2, 1.0).unwrap();
    let reports: Vec<_> = [Some(1), Some(2), Some(8), None]
        .into_iter()
        .map(|w| {
            let opts = EstimatorOptions::new(5_000, 12).with_workers(w).with_inner(50);
            (
                verify(TheoremId::Thm1, &body, &params, &opts).unwrap(),
                verify(TheoremId::Thm2, &body, &params, &opts).unwrap(),
                bp_check(BpKind::Affine, &body, 2, 1.0, &opts).unwrap(),
            )
        })
        .collect();
    for r in &reports[1..] {
        assert_eq!(r, &reports[0]);
    }
}

#[test]
fn heavy_tails_are_inconclusive_not_violations() {
    // Small runs near the admissible minimum: the ten largest samples carry a
    // large share of the sum.
    let body = ConvexBody::Box(AxisBox::cube(4, 1.0).unwrap());
    let params = MomentParams::new(4, 2, -0.99).unwrap();
    let mut flagged = false;
    for seed in 0..4 {
        let r = verify(TheoremId::Thm1, &body, &params, &EstimatorOptions::new(100, seed)).unwrap();
        assert_ne!(r.verdict, Verdict::Violation, "{r:?}");
        if r.rhs.tail_share > 0.2 || r.lhs.tail_share > 0.2 {
            flagged = true;
            assert_eq!(r.verdict, Verdict::Inconclusive);
        }
    }
    assert!(flagged, "expected at least one heavy-tailed run");
}
