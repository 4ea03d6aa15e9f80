//! Monte Carlo estimates of both sides of the section-moment inequalities,
//! the one-dimensional identities, the Blaschke-Petkantschin decompositions
//! and Crofton intrinsic volumes, together with the verdict logic.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::geometry::{gram_volume_affine, gram_volume_origin, AffineFlat};
use crate::kernel::{
    b_coeff, blaschke_groemer_constant, busemann_intersection_constant, busemann_simplex_constant,
    crofton_factor, identity_constants, prob_constants, schneider_constant, thm1_constant,
    thm2_constant, IdentityFamily, MomentParams,
};
use crate::rng::{derive_substream, mix_seed, RandomStream};
use crate::sampling::{
    sample_affine_flat, sample_grassmannian, sample_uniform_in_body, section_volume_mc,
    uniform_in_section,
};
use crate::stats::{mc_mean, mc_mean_pair, McConfig, MCEstimate};

/// Default relative tolerance for equality verdicts.
pub const DEFAULT_EQ_TOL: f64 = 0.02;
/// Equality holds when `|r - 1| <= max(eq_tol, EQUALITY_SIGMAS * sigma)`.
pub const EQUALITY_SIGMAS: f64 = 3.0;
/// Strict inequality needs `r < 1 - STRICT_SIGMAS * sigma - eq_tol`; the same
/// margin above 1 is a violation.
pub const STRICT_SIGMAS: f64 = 4.0;
/// Tail share of the ten largest samples beyond which a negative-moment run
/// is inconclusive.
pub const HEAVY_TAIL_SHARE: f64 = 0.2;
/// Relative standard error of `V_{d-k}` above which the probabilistic affine
/// check is inconclusive.
pub const MAX_CROFTON_REL_SE: f64 = 0.01;
/// Fresh-substream attempts for an outer sample whose inner sampler stalls.
pub const MAX_STALL_RETRIES: u64 = 8;

const LHS_TAG: u64 = 1;
const RHS_TAG: u64 = 2;
const CROFTON_TAG: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    Thm1,
    Thm2,
    Busemann,
    Schneider,
    BusemannSimplex,
    BlaschkeGroemer,
    IdentityLinear,
    IdentityAffine,
    BpLinear,
    BpAffine,
}

impl TheoremId {
    pub const ALL: [TheoremId; 10] = [
        TheoremId::Thm1,
        TheoremId::Thm2,
        TheoremId::Busemann,
        TheoremId::Schneider,
        TheoremId::BusemannSimplex,
        TheoremId::BlaschkeGroemer,
        TheoremId::IdentityLinear,
        TheoremId::IdentityAffine,
        TheoremId::BpLinear,
        TheoremId::BpAffine,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::Thm1 => "thm1",
            TheoremId::Thm2 => "thm2",
            TheoremId::Busemann => "busemann",
            TheoremId::Schneider => "schneider",
            TheoremId::BusemannSimplex => "busemann-simplex",
            TheoremId::BlaschkeGroemer => "blaschke-groemer",
            TheoremId::IdentityLinear => "identity-linear",
            TheoremId::IdentityAffine => "identity-affine",
            TheoremId::BpLinear => "bp-linear",
            TheoremId::BpAffine => "bp-affine",
        }
    }

    fn is_affine(&self) -> bool {
        matches!(self, TheoremId::Thm2 | TheoremId::Schneider | TheoremId::BlaschkeGroemer)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown theorem id '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    EqualityWithinTolerance,
    StrictInequality,
    Violation,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Classifies a ratio `r = lhs / rhs` with standard error `sigma`.
/// `unreliable` forces [`Verdict::Inconclusive`] (heavy tails, noisy
/// normalizers).
pub fn decide_verdict(ratio: f64, sigma: f64, eq_tol: f64, unreliable: bool) -> Verdict {
    if unreliable || !ratio.is_finite() || !sigma.is_finite() {
        return Verdict::Inconclusive;
    }
    if ratio > 1.0 + STRICT_SIGMAS * sigma + eq_tol {
        Verdict::Violation
    } else if (ratio - 1.0).abs() <= eq_tol.max(EQUALITY_SIGMAS * sigma) {
        Verdict::EqualityWithinTolerance
    } else if ratio < 1.0 - STRICT_SIGMAS * sigma - eq_tol {
        Verdict::StrictInequality
    } else {
        Verdict::Inconclusive
    }
}

/// Both sides of one inequality run and its classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem: TheoremId,
    pub params: MomentParams,
    pub body: String,
    pub lhs: MCEstimate,
    pub rhs: MCEstimate,
    /// The constant multiplying the right-hand integral.
    pub constant: f64,
    /// The classical constant this case reduces to, when it is one.
    pub classical_constant: Option<f64>,
    pub ratio: f64,
    pub ratio_std_error: f64,
    pub verdict: Verdict,
}

/// Knobs shared by every estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorOptions {
    pub mc: McConfig,
    pub eq_tol: f64,
    /// Inner sample count for the nested Blaschke-Petkantschin estimators.
    pub n_inner: u64,
    /// When set, polytopal sections without an exact volume are estimated by
    /// membership counting with this many points (biased for nonlinear
    /// powers of the section volume).
    pub section_fallback: Option<u64>,
}

impl EstimatorOptions {
    pub fn new(n: u64, seed: u64) -> Self {
        Self { mc: McConfig::new(n, seed), eq_tol: DEFAULT_EQ_TOL, n_inner: 1000, section_fallback: None }
    }

    pub fn with_workers(mut self, workers: Option<usize>) -> Self {
        self.mc.workers = workers;
        self
    }

    pub fn with_eq_tol(mut self, eq_tol: f64) -> Self {
        self.eq_tol = eq_tol;
        self
    }

    pub fn with_inner(mut self, n_inner: u64) -> Self {
        self.n_inner = n_inner;
        self
    }

    pub fn with_section_fallback(mut self, points: Option<u64>) -> Self {
        self.section_fallback = points;
        self
    }

    fn side(&self, tag: u64) -> McConfig {
        self.mc.with_seed(mix_seed(self.mc.seed, tag))
    }
}

fn check_body(body: &ConvexBody, params: &MomentParams) -> Result<()> {
    if body.dim() != params.d() {
        return Err(Error::DimensionMismatch { expected: params.d(), found: body.dim() });
    }
    Ok(())
}

fn section_volume(
    body: &ConvexBody,
    flat: &AffineFlat,
    fallback: Option<u64>,
    stream: &mut RandomStream,
) -> Result<f64> {
    match body.section_volume_affine(flat) {
        Err(Error::UnsupportedExactSection { .. }) if fallback.is_some() => {
            Ok(section_volume_mc(body, flat, fallback.unwrap_or(0), stream).0)
        }
        other => other,
    }
}

/// `int_{G_{d,k}} |K cap L|^{d+p} nu(dL)`, the mean section power over Haar
/// subspaces. At `k = d` the Grassmannian is a point and this is `|K|^{d+p}`.
pub fn estimate_lhs_linear(body: &ConvexBody, params: &MomentParams, opts: &EstimatorOptions) -> Result<MCEstimate> {
    check_body(body, params)?;
    let cfg = opts.side(LHS_TAG);
    let (d, k) = (params.d(), params.k());
    let power = d as f64 + params.p();
    if k == d {
        return Ok(MCEstimate::exact(body.exact_volume()?.powf(power), cfg.n, cfg.seed));
    }
    mc_mean(cfg, |_, s| {
        let l = sample_grassmannian(d, k, s)?;
        let v = section_volume(body, &AffineFlat::linear(&l), opts.section_fallback, s)?;
        Ok(v.powf(power))
    })
}

fn simplex_moment(body: &ConvexBody, points: usize, with_origin: bool, p: f64, cfg: McConfig) -> Result<MCEstimate> {
    if p == 0.0 {
        return Ok(MCEstimate::exact(1.0, cfg.n, cfg.seed));
    }
    mc_mean(cfg, |_, s| {
        let pts = (0..points).map(|_| sample_uniform_in_body(body, s)).collect::<Result<Vec<_>>>()?;
        let v = if with_origin { gram_volume_origin(&pts) } else { gram_volume_affine(&pts) };
        Ok(v.powf(p))
    })
}

/// `c * |K|^k * E|conv(0, X_1..X_k)|^p` with the linear constant `c`.
pub fn estimate_rhs_linear(body: &ConvexBody, params: &MomentParams, opts: &EstimatorOptions) -> Result<MCEstimate> {
    check_body(body, params)?;
    let moment = simplex_moment(body, params.k(), true, params.p(), opts.side(RHS_TAG))?;
    let factor = thm1_constant(params) * body.exact_volume()?.powi(params.k() as i32);
    Ok(moment.scaled(factor))
}

/// `int_{A_{d,k}} |K cap E|^{d+p+1} mu(dE)` via weighted flats. At `k = d`
/// this is `|K|^{d+p+1}`.
pub fn estimate_lhs_affine(body: &ConvexBody, params: &MomentParams, opts: &EstimatorOptions) -> Result<MCEstimate> {
    check_body(body, params)?;
    let cfg = opts.side(LHS_TAG);
    let (d, k) = (params.d(), params.k());
    let power = d as f64 + params.p() + 1.0;
    if k == d {
        return Ok(MCEstimate::exact(body.exact_volume()?.powf(power), cfg.n, cfg.seed));
    }
    mc_mean(cfg, |_, s| {
        let wf = sample_affine_flat(body, k, s)?;
        if !wf.hit {
            return Ok(0.0);
        }
        let v = section_volume(body, &wf.flat, opts.section_fallback, s)?;
        Ok(wf.weight * v.powf(power))
    })
}

/// `C(k, p, d) * |K|^{k+1} * E|conv(X_0..X_k)|^p`.
pub fn estimate_rhs_affine(body: &ConvexBody, params: &MomentParams, opts: &EstimatorOptions) -> Result<MCEstimate> {
    check_body(body, params)?;
    let moment = simplex_moment(body, params.k() + 1, false, params.p(), opts.side(RHS_TAG))?;
    let factor = thm2_constant(params) * body.exact_volume()?.powi(params.k() as i32 + 1);
    Ok(moment.scaled(factor))
}

/// Ratio of two independent estimates with its delta-method error.
fn ratio_of(lhs: &MCEstimate, rhs: &MCEstimate) -> Result<(f64, f64)> {
    if !(rhs.mean > 0.0) {
        return Err(Error::Domain(format!("right-hand side must be positive, got {}", rhs.mean)));
    }
    let r = lhs.mean / rhs.mean;
    let rel_l = if lhs.mean != 0.0 { lhs.std_error / lhs.mean } else { 0.0 };
    let rel = (rel_l * rel_l + (rhs.std_error / rhs.mean).powi(2)).sqrt();
    Ok((r, r.abs() * rel))
}

fn heavy_tailed(p: f64, estimates: &[&MCEstimate]) -> bool {
    p < 0.0 && estimates.iter().any(|e| e.tail_share > HEAVY_TAIL_SHARE)
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    theorem: TheoremId,
    params: MomentParams,
    body: &ConvexBody,
    lhs: MCEstimate,
    rhs: MCEstimate,
    constant: f64,
    classical_constant: Option<f64>,
    eq_tol: f64,
    unreliable: bool,
) -> Result<InequalityReport> {
    let (ratio, ratio_std_error) = ratio_of(&lhs, &rhs)?;
    let unreliable = unreliable || heavy_tailed(params.p(), &[&lhs, &rhs]);
    Ok(InequalityReport {
        theorem,
        params,
        body: body.to_string(),
        lhs,
        rhs,
        constant,
        classical_constant,
        ratio,
        ratio_std_error,
        verdict: decide_verdict(ratio, ratio_std_error, eq_tol, unreliable),
    })
}

fn classical_linear(params: &MomentParams) -> Option<f64> {
    let (d, k, p) = (params.d(), params.k(), params.p());
    if p == 0.0 {
        Some(busemann_intersection_constant(d, k))
    } else if k == d {
        Some(busemann_simplex_constant(d, p))
    } else if k == 1 {
        identity_constants(d, p, IdentityFamily::Linear).ok().map(|c| c.printed)
    } else {
        None
    }
}

fn classical_affine(params: &MomentParams) -> Option<f64> {
    let (d, k, p) = (params.d(), params.k(), params.p());
    if p == 0.0 {
        Some(schneider_constant(d, k))
    } else if k == d {
        Some(blaschke_groemer_constant(d, p))
    } else {
        None
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParams(msg.into()))
    }
}

/// Runs the named check and classifies the outcome.
pub fn verify(theorem: TheoremId, body: &ConvexBody, params: &MomentParams, opts: &EstimatorOptions) -> Result<InequalityReport> {
    check_body(body, params)?;
    match theorem {
        TheoremId::Thm1 | TheoremId::Busemann | TheoremId::BusemannSimplex => {
            if theorem == TheoremId::Busemann {
                require(params.p() == 0.0, "the Busemann intersection case needs p = 0")?;
            }
            if theorem == TheoremId::BusemannSimplex {
                require(params.k() == params.d(), "the random simplex case needs k = d")?;
            }
            let lhs = estimate_lhs_linear(body, params, opts)?;
            let rhs = estimate_rhs_linear(body, params, opts)?;
            build_report(theorem, *params, body, lhs, rhs, thm1_constant(params), classical_linear(params), opts.eq_tol, false)
        }
        TheoremId::Thm2 | TheoremId::Schneider | TheoremId::BlaschkeGroemer => {
            if theorem == TheoremId::Schneider {
                require(params.p() == 0.0, "the Schneider case needs p = 0")?;
            }
            if theorem == TheoremId::BlaschkeGroemer {
                require(params.k() == params.d(), "the Blaschke-Groemer case needs k = d")?;
            }
            let lhs = estimate_lhs_affine(body, params, opts)?;
            let rhs = estimate_rhs_affine(body, params, opts)?;
            build_report(theorem, *params, body, lhs, rhs, thm2_constant(params), classical_affine(params), opts.eq_tol, false)
        }
        TheoremId::IdentityLinear | TheoremId::IdentityAffine => {
            require(params.k() == 1, "the identities are one-dimensional (k = 1)")?;
            let family = if theorem == TheoremId::IdentityLinear {
                IdentityFamily::Linear
            } else {
                IdentityFamily::Affine
            };
            Ok(identity_check(family, body, params.p(), opts)?.report)
        }
        TheoremId::BpLinear | TheoremId::BpAffine => {
            let kind = if theorem == TheoremId::BpLinear { BpKind::Linear } else { BpKind::Affine };
            bp_check(kind, body, params.k(), params.p(), opts)
        }
    }
}

/// One candidate constant for the affine identity and how the data treat it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateAssessment {
    pub constant: f64,
    /// `fitted / constant`.
    pub ratio: f64,
    /// `(fitted - constant) / se(fitted)`.
    pub z_score: f64,
    pub verdict: Verdict,
    pub consistent: bool,
    /// True when the candidate is more than five standard errors off.
    pub rejected: bool,
}

/// Which of the two affine identity constants the measurement supports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Adjudication {
    /// `LHS / int_{K^2} |x_0 - x_1|^p`, measured.
    pub fitted_constant: f64,
    pub fitted_std_error: f64,
    pub printed: CandidateAssessment,
    pub doubled: CandidateAssessment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityOutcome {
    pub report: InequalityReport,
    pub adjudication: Option<Adjudication>,
}

const ADJUDICATION_REJECT_SIGMAS: f64 = 5.0;

fn assess(constant: f64, fitted: f64, fitted_se: f64, eq_tol: f64) -> CandidateAssessment {
    let ratio = fitted / constant;
    let sigma = fitted_se / constant;
    let z_score = if fitted_se > 0.0 {
        (fitted - constant) / fitted_se
    } else if fitted == constant {
        0.0
    } else {
        f64::INFINITY.copysign(fitted - constant)
    };
    let verdict = decide_verdict(ratio, sigma, eq_tol, false);
    CandidateAssessment {
        constant,
        ratio,
        z_score,
        verdict,
        consistent: verdict == Verdict::EqualityWithinTolerance,
        rejected: z_score.abs() > ADJUDICATION_REJECT_SIGMAS,
    }
}

/// The `k = 1` moment identities. The linear family is checked with its
/// closed-form constant; the affine family is measured against both the
/// printed constant and its double, and the report uses the double.
pub fn identity_check(family: IdentityFamily, body: &ConvexBody, p: f64, opts: &EstimatorOptions) -> Result<IdentityOutcome> {
    let d = body.dim();
    let consts = identity_constants(d, p, family)?;
    let params = MomentParams::new(d, 1, p)?;
    match family {
        IdentityFamily::Linear => {
            let lhs = estimate_lhs_linear(body, &params, opts)?;
            let moment = simplex_moment(body, 1, true, p, opts.side(RHS_TAG))?;
            let rhs = moment.scaled(consts.printed * body.exact_volume()?);
            let report = build_report(
                TheoremId::IdentityLinear,
                params,
                body,
                lhs,
                rhs,
                consts.printed,
                Some(consts.printed),
                opts.eq_tol,
                false,
            )?;
            Ok(IdentityOutcome { report, adjudication: None })
        }
        IdentityFamily::Affine => {
            require(d >= 2, "the affine identity needs d >= 2")?;
            let lhs = estimate_lhs_affine(body, &params, opts)?;
            let vol = body.exact_volume()?;
            let pair_integral = simplex_moment(body, 2, false, p, opts.side(RHS_TAG))?.scaled(vol * vol);
            let (fitted, fitted_se) = ratio_of(&lhs, &pair_integral)?;
            let adjudication = Adjudication {
                fitted_constant: fitted,
                fitted_std_error: fitted_se,
                printed: assess(consts.printed, fitted, fitted_se, opts.eq_tol),
                doubled: assess(consts.doubled, fitted, fitted_se, opts.eq_tol),
            };
            let report = build_report(
                TheoremId::IdentityAffine,
                params,
                body,
                lhs,
                pair_integral.scaled(consts.doubled),
                consts.doubled,
                Some(consts.printed),
                opts.eq_tol,
                false,
            )?;
            Ok(IdentityOutcome { report, adjudication: Some(adjudication) })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BpKind {
    Linear,
    Affine,
}

/// Mean of `V^power` over `n_inner` tuples of uniform points of the section,
/// in flat coordinates.
fn inner_moment(
    body: &ConvexBody,
    flat: &AffineFlat,
    tuple: usize,
    with_origin: bool,
    power: f64,
    n_inner: u64,
    stream: &mut RandomStream,
) -> Result<f64> {
    let mut sum = 0.0;
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(tuple);
    for _ in 0..n_inner {
        pts.clear();
        for _ in 0..tuple {
            pts.push(uniform_in_section(body, flat, stream)?);
        }
        let v = if with_origin { gram_volume_origin(&pts) } else { gram_volume_affine(&pts) };
        sum += v.powf(power);
    }
    Ok(sum / n_inner as f64)
}

/// Both sides of the Blaschke-Petkantschin decomposition of
/// `int_{K^m} V^p`: directly, and as an outer integral over subspaces (or
/// flats) of `(k!)^{d-k} b_{d,k} |K cap E|^m E_inner[V^{p+d-k}]`, with
/// `m = k` (linear) or `k + 1` (affine).
pub fn bp_check(kind: BpKind, body: &ConvexBody, k: usize, p: f64, opts: &EstimatorOptions) -> Result<InequalityReport> {
    let d = body.dim();
    require(p >= 0.0, "the Blaschke-Petkantschin check needs p >= 0")?;
    require(k >= 1 && k < d, "the Blaschke-Petkantschin check needs 1 <= k <= d - 1")?;
    require(opts.n_inner >= 1, "n_inner must be positive")?;
    let params = MomentParams::new(d, k, p)?;
    let (tuple, with_origin, theorem) = match kind {
        BpKind::Linear => (k, true, TheoremId::BpLinear),
        BpKind::Affine => (k + 1, false, TheoremId::BpAffine),
    };
    let vol = body.exact_volume()?;
    let lhs_cfg = McConfig {
        n: opts.mc.n.saturating_mul(opts.n_inner).min(10_000_000),
        ..opts.side(LHS_TAG)
    };
    let lhs = simplex_moment(body, tuple, with_origin, p, lhs_cfg)?.scaled(vol.powi(tuple as i32));

    let factorial: f64 = (2..=k).map(|i| i as f64).product();
    let constant = factorial.powi((d - k) as i32) * b_coeff(d as f64, k)?;
    let inner_power = p + (d - k) as f64;
    let rhs_cfg = opts.side(RHS_TAG);
    let outer = |s: &mut RandomStream| -> Result<f64> {
        let (flat, weight) = match kind {
            BpKind::Linear => (AffineFlat::linear(&sample_grassmannian(d, k, s)?), 1.0),
            BpKind::Affine => {
                let wf = sample_affine_flat(body, k, s)?;
                if !wf.hit {
                    return Ok(0.0);
                }
                (wf.flat, wf.weight)
            }
        };
        let section = section_volume(body, &flat, opts.section_fallback, s)?;
        if section <= 0.0 {
            return Ok(0.0);
        }
        let inner = inner_moment(body, &flat, tuple, with_origin, inner_power, opts.n_inner, s)?;
        Ok(weight * section.powi(tuple as i32) * inner)
    };
    let rhs = mc_mean(rhs_cfg, |i, s| {
        let mut attempt = 0;
        let mut stream = s.clone();
        loop {
            match outer(&mut stream) {
                Err(Error::RejectionStall { .. }) if attempt < MAX_STALL_RETRIES => {
                    attempt += 1;
                    stream = derive_substream(mix_seed(rhs_cfg.seed, attempt), i);
                }
                other => return other,
            }
        }
    })?
    .scaled(constant);
    build_report(theorem, params, body, lhs, rhs, constant, None, opts.eq_tol, false)
}

/// Intrinsic volume `V_{d-k}` from the Crofton measure of `k`-flats hitting
/// the body.
pub fn crofton_intrinsic(body: &ConvexBody, k: usize, cfg: McConfig) -> Result<MCEstimate> {
    let d = body.dim();
    require(k >= 1 && k < d, "Crofton estimation needs 1 <= k <= d - 1")?;
    let est = mc_mean(cfg, |_, s| {
        let wf = sample_affine_flat(body, k, s)?;
        Ok(if wf.hit { wf.weight } else { 0.0 })
    })?;
    Ok(est.scaled(crofton_factor(d, k)))
}

/// The probabilistic restatement: conditional section moments over flats
/// hitting the body against `C' |K|^{k+1} / V_{d-k}(K) E|conv(X_0..X_k)|^p`.
/// Linear theorems coincide with [`verify`].
pub fn verify_probabilistic(
    theorem: TheoremId,
    body: &ConvexBody,
    params: &MomentParams,
    opts: &EstimatorOptions,
) -> Result<InequalityReport> {
    check_body(body, params)?;
    if !theorem.is_affine() {
        return verify(theorem, body, params, opts);
    }
    let (d, k) = (params.d(), params.k());
    require(k < d, "the probabilistic affine form needs k < d")?;
    if theorem == TheoremId::Schneider {
        require(params.p() == 0.0, "the Schneider case needs p = 0")?;
    }
    let power = d as f64 + params.p() + 1.0;
    let lhs_cfg = opts.side(LHS_TAG);
    let pair = mc_mean_pair(lhs_cfg, |_, s| {
        let wf = sample_affine_flat(body, k, s)?;
        if !wf.hit {
            return Ok((0.0, 0.0));
        }
        let v = section_volume(body, &wf.flat, opts.section_fallback, s)?;
        Ok((wf.weight * v.powf(power), wf.weight))
    })?;
    let (a, b) = (pair.first.mean(), pair.second.mean());
    if !(b > 0.0) {
        return Err(Error::Domain("no sampled flat hit the body".into()));
    }
    let cond = a / b;
    let var = (pair.first.std_error().powi(2) - 2.0 * cond * pair.mean_covariance()
        + cond * cond * pair.second.std_error().powi(2))
        / (b * b);
    let mut lhs = pair.first.estimate(lhs_cfg.seed).scaled(1.0 / b);
    lhs.mean = cond;
    lhs.std_error = var.max(0.0).sqrt();

    let intrinsic = crofton_intrinsic(body, k, opts.side(CROFTON_TAG))?;
    let moment = simplex_moment(body, k + 1, false, params.p(), opts.side(RHS_TAG))?;
    let c_prime = prob_constants(params)?.affine;
    let vol = body.exact_volume()?;
    let factor = c_prime * vol.powi(k as i32 + 1) / intrinsic.mean;
    let mut rhs = moment.scaled(factor);
    rhs.std_error = rhs.mean.abs() * (moment.relative_error_or_zero().powi(2) + intrinsic.relative_error().powi(2)).sqrt();
    let noisy_normalizer = intrinsic.relative_error() > MAX_CROFTON_REL_SE;
    build_report(theorem, *params, body, lhs, rhs, c_prime, classical_affine(params), opts.eq_tol, noisy_normalizer)
}

impl MCEstimate {
    fn relative_error_or_zero(&self) -> f64 {
        if self.std_error == 0.0 {
            0.0
        } else {
            self.relative_error()
        }
    }
}
