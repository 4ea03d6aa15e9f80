//! Closed-form constants: unit-ball volumes, the `b_{q,k}` coefficients and
//! the constants of the linear and affine section-moment inequalities.
//!
//! Every product of Gamma-sized factors is accumulated as a logarithm and
//! exponentiated once, so `d + p` up to about 30 stays finite.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ambient dimension accepted by [`MomentParams`].
pub const MAX_DIM: usize = 12;

/// Ambient dimension `d`, section dimension `k` and moment exponent `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentParams {
    d: usize,
    k: usize,
    p: f64,
}

impl MomentParams {
    /// Validates `1 <= k <= d <= 12` and `p >= k + 1 - d`.
    pub fn new(d: usize, k: usize, p: f64) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidParams(format!(
                "ambient dimension d={d} outside 1..={MAX_DIM}"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidParams(
                "k=0 is not supported; the section dimension must be at least 1".into(),
            ));
        }
        if k > d {
            return Err(Error::InvalidParams(format!("k={k} exceeds d={d}")));
        }
        if !p.is_finite() || p < min_exponent(d, k) {
            return Err(Error::InvalidParams(format!(
                "p={p} below the admissible minimum {}",
                min_exponent(d, k)
            )));
        }
        Ok(Self { d, k, p })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Smallest admissible moment exponent, `k + 1 - d`.
pub fn min_exponent(d: usize, k: usize) -> f64 {
    k as f64 + 1.0 - d as f64
}

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

fn ln_kappa(p: f64) -> f64 {
    0.5 * p * PI.ln() - statrs::function::gamma::ln_gamma(0.5 * p + 1.0)
}

/// Volume of the unit ball of (possibly fractional) dimension `p`:
/// `pi^(p/2) / Gamma(p/2 + 1)`.
pub fn kappa(p: f64) -> Result<f64> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("kappa requires p >= 0, got {p}")));
    }
    Ok(ln_kappa(p).exp())
}

/// Generalized binomial coefficient `q (q-1) ... (q-k+1) / k!` as a falling
/// factorial product.
pub fn gen_binomial(q: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (q - j as f64) / (j + 1) as f64)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

fn ln_binomial_falling(q: f64, k: usize) -> f64 {
    // All factors are positive when q >= k.
    (0..k).map(|j| ((q - j as f64) / (j + 1) as f64).ln()).sum()
}

fn ln_b_coeff(q: f64, k: usize) -> f64 {
    let num: f64 = (1..=k).map(|i| ln_kappa(q - k as f64 + i as f64)).sum();
    let den: f64 = (1..=k).map(|i| ln_kappa(i as f64)).sum();
    ln_binomial_falling(q, k) + num - den
}

/// `b_{q,k} = binom(q, k) * kappa_{q-k+1} ... kappa_q / (kappa_1 ... kappa_k)`.
pub fn b_coeff(q: f64, k: usize) -> Result<f64> {
    if !(q >= k as f64) {
        return Err(Error::Domain(format!("b_coeff requires q >= k, got q={q}, k={k}")));
    }
    Ok(ln_b_coeff(q, k).exp())
}

fn ln_thm1(d: f64, k: usize, p: f64) -> f64 {
    let kf = k as f64;
    p * ln_factorial(k) + (d + p) * ln_kappa(kf) - kf * ln_kappa(d + p) + ln_b_coeff(d + p, k)
        - ln_b_coeff(d, k)
}

fn ln_thm2(d: f64, k: usize, p: f64) -> f64 {
    let kf = k as f64;
    let q = d + p;
    p * ln_factorial(k) + (q + 1.0) * ln_kappa(kf) - (kf + 1.0) * ln_kappa(q)
        + ln_kappa((kf + 1.0) * q)
        - ln_kappa(kf * q + kf)
        + ln_b_coeff(q, k)
        - ln_b_coeff(d, k)
}

/// Constant of the linear inequality
/// `int_G |K cap L|^{d+p} <= c * int_{K^k} |conv(0, x_1..x_k)|^p`:
/// `(k!)^p kappa_k^{d+p} / kappa_{d+p}^k * b_{d+p,k} / b_{d,k}`.
pub fn thm1_constant(params: &MomentParams) -> f64 {
    ln_thm1(params.d as f64, params.k, params.p).exp()
}

/// Constant `C(k, p, d)` of the affine inequality over `A_{d,k}` and `K^{k+1}`.
pub fn thm2_constant(params: &MomentParams) -> f64 {
    ln_thm2(params.d as f64, params.k, params.p).exp()
}

/// Constants of the probabilistic restatements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbConstants {
    /// Multiplies `|K|^k E|conv(0, X_1..X_k)|^p`; equal to [`thm1_constant`].
    pub linear: f64,
    /// `C'(k, p, d)`, multiplying `|K|^{k+1} / V_{d-k}(K) * E|conv(X_0..X_k)|^p`.
    pub affine: f64,
}

/// Returns the linear constant and `C'`; `C'` needs `k < d`.
pub fn prob_constants(params: &MomentParams) -> Result<ProbConstants> {
    let (d, k, p) = (params.d, params.k, params.p);
    if k == d {
        return Err(Error::Domain(
            "the affine probabilistic constant needs k < d (V_{d-k} is undefined at k = d)".into(),
        ));
    }
    let df = d as f64;
    let kf = k as f64;
    let q = df + p;
    let ln_c = ln_factorial(d) + (p - 1.0) * ln_factorial(k) - ln_factorial(d - k) + ln_kappa(df)
        - ln_kappa(df - kf)
        + q * ln_kappa(kf)
        - (kf + 1.0) * ln_kappa(q)
        + ln_kappa((kf + 1.0) * q)
        - ln_kappa(kf * q + kf)
        + ln_b_coeff(q, k)
        - ln_b_coeff(df, k);
    Ok(ProbConstants { linear: thm1_constant(params), affine: ln_c.exp() })
}

/// The `binom(d,k) kappa_d / (kappa_k kappa_{d-k})` factor turning the
/// `mu`-measure of hitting flats into the intrinsic volume `V_{d-k}`.
pub fn crofton_factor(d: usize, k: usize) -> f64 {
    let ln = ln_factorial(d) - ln_factorial(k) - ln_factorial(d - k) + ln_kappa(d as f64)
        - ln_kappa(k as f64)
        - ln_kappa((d - k) as f64);
    ln.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityFamily {
    Linear,
    Affine,
}

/// Constants of the one-dimensional (`k = 1`) moment identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityConstants {
    /// Linear: `(d+p) 2^{d+p} / (d kappa_d)`. Affine: `(d+p)(d+p+1) / (2 d kappa_d)`
    /// as it is usually printed.
    pub printed: f64,
    /// Affine only: twice the printed value, which is what the affine
    /// inequality's constant reduces to at `k = 1` under the `mu`
    /// normalization used here. For the linear family this equals `printed`.
    pub doubled: f64,
}

pub fn identity_constants(d: usize, p: f64, family: IdentityFamily) -> Result<IdentityConstants> {
    if d < 2 && family == IdentityFamily::Affine {
        return Err(Error::Domain("the affine identity needs d >= 2".into()));
    }
    if d == 0 || !(p >= 2.0 - d as f64) {
        return Err(Error::Domain(format!("identity requires d >= 1 and p >= 2 - d, got d={d}, p={p}")));
    }
    let df = d as f64;
    let q = df + p;
    let ln_dk = df.ln() + ln_kappa(df);
    match family {
        IdentityFamily::Linear => {
            let c = (q.ln() + q * 2f64.ln() - ln_dk).exp();
            Ok(IdentityConstants { printed: c, doubled: c })
        }
        IdentityFamily::Affine => {
            let c = (q.ln() + (q + 1.0).ln() - 2f64.ln() - ln_dk).exp();
            Ok(IdentityConstants { printed: c, doubled: 2.0 * c })
        }
    }
}

/// Busemann intersection constant `kappa_k^d / kappa_d^k`.
pub fn busemann_intersection_constant(d: usize, k: usize) -> f64 {
    (d as f64 * ln_kappa(k as f64) - k as f64 * ln_kappa(d as f64)).exp()
}

/// Schneider constant `kappa_k^{d+1} kappa_{d(k+1)} / (kappa_d^{k+1} kappa_{k(d+1)})`.
pub fn schneider_constant(d: usize, k: usize) -> f64 {
    let (df, kf) = (d as f64, k as f64);
    ((df + 1.0) * ln_kappa(kf) + ln_kappa(df * (kf + 1.0))
        - (kf + 1.0) * ln_kappa(df)
        - ln_kappa(kf * (df + 1.0)))
    .exp()
}

/// Constant of the random-simplex moment inequality with an apex at the
/// origin: `(d!)^p kappa_d^{p+d} / kappa_{d+p}^d * b_{d+p,d}`.
pub fn busemann_simplex_constant(d: usize, p: f64) -> f64 {
    let df = d as f64;
    (p * ln_factorial(d) + (p + df) * ln_kappa(df) - df * ln_kappa(df + p) + ln_b_coeff(df + p, d))
        .exp()
}

/// Blaschke-Groemer constant
/// `(d!)^p b_{d+p,d} kappa_d^{p+d+1} / kappa_{d+p}^{d+1} * kappa_{(d+1)(d+p)} / kappa_{d(d+p+1)}`.
pub fn blaschke_groemer_constant(d: usize, p: f64) -> f64 {
    let df = d as f64;
    let q = df + p;
    (p * ln_factorial(d) + ln_b_coeff(q, d) + (q + 1.0) * ln_kappa(df)
        - (df + 1.0) * ln_kappa(q)
        + ln_kappa((df + 1.0) * q)
        - ln_kappa(df * (q + 1.0)))
    .exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_gamma_known_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-15);
        assert_relative_eq!(log_gamma(0.5).unwrap(), 0.5723649429247001, max_relative = 1e-13);
        assert_relative_eq!(log_gamma(5.0).unwrap(), 24f64.ln(), max_relative = 1e-13);
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(log_gamma(-1.5).is_err());
    }

    #[test]
    fn log_gamma_matches_factorial_sums() {
        // ln (n-1)! by direct summation.
        let mut acc = 0.0f64;
        for n in 1..=300usize {
            let lg = log_gamma(n as f64).unwrap();
            let tol = 1e-12 * acc.abs().max(1.0);
            assert!((lg - acc).abs() <= tol, "n={n}: {lg} vs {acc}");
            acc += (n as f64).ln();
        }
    }

    #[test]
    fn log_gamma_half_integers() {
        // Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
        for n in 0..=150usize {
            let expect = ln_factorial(2 * n) + 0.5 * PI.ln() - n as f64 * 4f64.ln() - ln_factorial(n);
            let got = log_gamma(n as f64 + 0.5).unwrap();
            assert!((got - expect).abs() <= 1e-12 * expect.abs().max(1.0), "n={n}");
        }
    }

    #[test]
    fn kappa_values() {
        assert_relative_eq!(kappa(0.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(kappa(2.0).unwrap(), PI, max_relative = 1e-14);
        assert_relative_eq!(kappa(3.0).unwrap(), 4.0 * PI / 3.0, max_relative = 1e-14);
        // Gamma(2.25) = 1.25 * 0.25 * Gamma(0.25), Gamma(0.25) = 3.6256099082219083
        let expect = PI.powf(1.25) / (1.25 * 0.25 * 3.625_609_908_221_908);
        assert_relative_eq!(kappa(2.5).unwrap(), expect, max_relative = 1e-13);
        assert!(kappa(-0.1).is_err());
    }

    #[test]
    fn kappa_recursion() {
        let mut prev2 = 1.0; // kappa_0
        let mut prev1 = 2.0; // kappa_1
        for d in 2..=40usize {
            let rec = 2.0 * PI * prev2 / d as f64;
            assert_relative_eq!(kappa(d as f64).unwrap(), rec, max_relative = 1e-12);
            prev2 = prev1;
            prev1 = rec;
        }
    }

    #[test]
    fn kappa_decreases_after_its_maximum() {
        // Maximum sits near p = 5.2569.
        let mut prev = kappa(5.3).unwrap();
        let mut p = 5.4;
        while p < 60.0 {
            let cur = kappa(p).unwrap();
            assert!(cur < prev);
            prev = cur;
            p += 0.1;
        }
    }

    #[test]
    fn generalized_binomial() {
        assert_eq!(gen_binomial(5.0, 2), 10.0);
        assert_relative_eq!(gen_binomial(2.5, 2), 1.875);
        assert_eq!(gen_binomial(-3.7, 0), 1.0);
        assert_eq!(gen_binomial(10.0, 3), 120.0);
    }

    #[test]
    fn b_coefficients() {
        assert_eq!(b_coeff(3.3, 0).unwrap(), 1.0);
        for d in 1..=8 {
            assert_relative_eq!(b_coeff(d as f64, d).unwrap(), 1.0, max_relative = 1e-12);
        }
        assert_relative_eq!(b_coeff(2.0, 1).unwrap(), PI, max_relative = 1e-13);
        assert!(b_coeff(1.5, 2).is_err());
        assert!(b_coeff(30.0, 12).unwrap().is_finite());
    }

    #[test]
    fn theorem_constants_examples() {
        let c = thm1_constant(&MomentParams::new(3, 2, 0.0).unwrap());
        assert_relative_eq!(c, 9.0 * PI / 16.0, max_relative = 1e-12);
        let c = thm1_constant(&MomentParams::new(2, 1, 1.0).unwrap());
        assert_relative_eq!(c, 12.0 / PI, max_relative = 1e-12);
        let c = thm2_constant(&MomentParams::new(2, 1, 0.0).unwrap());
        assert_relative_eq!(c, 3.0 / PI, max_relative = 1e-12);
        let k = |x: f64| kappa(x).unwrap();
        let c = thm2_constant(&MomentParams::new(3, 2, 0.0).unwrap());
        assert_relative_eq!(c, k(2.0).powi(4) * k(9.0) / (k(3.0).powi(3) * k(8.0)), max_relative = 1e-12);
    }

    #[test]
    fn probabilistic_constant_ratio() {
        let params = MomentParams::new(3, 2, 1.0).unwrap();
        let pc = prob_constants(&params).unwrap();
        let ratio = pc.affine / thm2_constant(&params);
        let k = |x: f64| kappa(x).unwrap();
        assert_relative_eq!(ratio, 3.0 * k(3.0) / (k(2.0) * k(1.0)), max_relative = 1e-12);
        assert_eq!(pc.linear, thm1_constant(&params));
        assert_relative_eq!(ratio, crofton_factor(3, 2), max_relative = 1e-12);

        // d=2, k=1, p=0: 2!/1! * kappa_2/kappa_1 * kappa_1^2/kappa_2^2 * kappa_4/kappa_3 = 3/2.
        let pc = prob_constants(&MomentParams::new(2, 1, 0.0).unwrap()).unwrap();
        assert_relative_eq!(pc.affine, 1.5, max_relative = 1e-12);

        assert!(prob_constants(&MomentParams::new(3, 3, 1.0).unwrap()).is_err());
    }

    #[test]
    fn identity_constant_examples() {
        let lin = identity_constants(2, 0.0, IdentityFamily::Linear).unwrap();
        assert_relative_eq!(lin.printed, 4.0 / PI, max_relative = 1e-12);
        let aff = identity_constants(2, 0.0, IdentityFamily::Affine).unwrap();
        assert_relative_eq!(aff.printed, 3.0 / (2.0 * PI), max_relative = 1e-12);
        assert_relative_eq!(aff.doubled, 3.0 / PI, max_relative = 1e-12);
        assert_relative_eq!(
            aff.doubled,
            thm2_constant(&MomentParams::new(2, 1, 0.0).unwrap()),
            max_relative = 1e-12
        );
        assert!(identity_constants(3, -1.5, IdentityFamily::Linear).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(MomentParams::new(3, 0, 0.0).is_err());
        assert!(MomentParams::new(3, 4, 0.0).is_err());
        assert!(MomentParams::new(13, 2, 0.0).is_err());
        assert!(MomentParams::new(3, 1, -1.01).is_err());
        assert!(MomentParams::new(3, 1, -1.0).is_ok());
        assert!(MomentParams::new(3, 2, f64::NAN).is_err());
    }
}
