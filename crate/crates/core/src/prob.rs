//! Normal and binomial utilities, and the closed-form thresholds used by the
//! constructions.
//!
//! Binomial point masses use Loader's saddle-point expansion
//! (`stirlerr` + `bd0` deviance), which keeps relative error near machine
//! precision up to `N = 10^6` where a plain log-gamma difference would lose
//! several digits to cancellation.

use alloc::format;
use core::f64::consts::{LN_2, PI};

use libm::{erfc, exp, lgamma, log, log1p, sqrt};

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Branch threshold `ε` for [`m_of_k`] when none is given.
pub const DEFAULT_EPS: f64 = 0.25;

/// Standard normal CDF, `Φ(x) = erfc(-x / √2) / 2`.
///
/// `erfc` is the fdlibm rational approximation (error below 1 ulp on the
/// central range), so the absolute error is far below `1e-10` on `[-8, 8]`.
pub fn phi(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(-x / core::f64::consts::SQRT_2)
}

/// `1 - Φ(x)`, accurate in the far upper tail where `1.0 - phi(x)` cancels.
pub fn phi_upper(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(x / core::f64::consts::SQRT_2)
}

/// Upper tail approximation `e^{-x²/2} / (√(2π) x)` of `1 - Φ(x)`.
pub fn mills_tail(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::param(format!("mills_tail needs x > 0, got {x}")));
    }
    Ok(exp(-0.5 * x * x) / (SQRT_2PI * x))
}

/// `ln(n!) - ln(√(2πn) (n/e)^n)`.
fn stirlerr(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15.0 {
        return lgamma(n + 1.0) - (n + 0.5) * log(n) + n - LN_SQRT_2PI;
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x / np) + np - x`, evaluated stably near `x = np`.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        let mut j = 1.0;
        loop {
            ej *= v;
            let s1 = s + ej / (2.0 * j + 1.0);
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1.0;
        }
    }
    x * log(x / np) + np - x
}

fn check_prob(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("probability {p} not in (0, 1)")))
    }
}

/// `P[Bin(n, p) = k]`; zero for `k` outside `0..=n`.
pub fn binom_point(n: u64, p: f64, k: i64) -> Result<f64> {
    check_prob(p)?;
    if k < 0 || k as u64 > n {
        return Ok(0.0);
    }
    Ok(binom_point_raw(n as f64, p, k as f64))
}

fn binom_point_raw(n: f64, p: f64, x: f64) -> f64 {
    let q = 1.0 - p;
    if x == 0.0 {
        return exp(n * log1p(-p));
    }
    if x == n {
        return exp(n * log(p));
    }
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
    let lf = 2.0 * LN_SQRT_2PI + log(x) + log1p(-x / n);
    exp(lc - 0.5 * lf)
}

/// `P[Bin(n, p) <= k]` by direct summation of the shorter tail, adding the
/// smallest terms first.
pub fn binom_cdf(n: u64, p: f64, k: i64) -> Result<f64> {
    check_prob(p)?;
    if k < 0 {
        return Ok(0.0);
    }
    if k as u64 >= n {
        return Ok(1.0);
    }
    let nf = n as f64;
    let k = k as u64;
    if (k as f64) < nf * p {
        let s: f64 = (0..=k).map(|j| binom_point_raw(nf, p, j as f64)).sum();
        Ok(s.min(1.0))
    } else {
        let s: f64 = (k + 1..=n)
            .rev()
            .map(|j| binom_point_raw(nf, p, j as f64))
            .sum();
        Ok((1.0 - s).max(0.0))
    }
}

/// `ln C(n, k)`. Exactly symmetric in `k <-> n - k`.
pub fn log_binom(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::param(format!("log_binom needs k <= n, got n = {n}, k = {k}")));
    }
    let k = k.min(n - k);
    if k == 0 {
        return Ok(0.0);
    }
    if n <= 30 {
        return Ok(lgamma(n as f64 + 1.0) - lgamma(k as f64 + 1.0) - lgamma((n - k) as f64 + 1.0));
    }
    let (nf, kf) = (n as f64, k as f64);
    let rest = nf - kf;
    Ok(stirlerr(nf) - stirlerr(kf) - stirlerr(rest)
        + kf * log(nf / kf)
        - rest * log1p(-kf / nf)
        + 0.5 * log(nf / (2.0 * PI * kf * rest)))
}

/// The interval scale `m(k)`: `√((n-k) n ln C(n,k))` when `k >= εn`, otherwise
/// `k √(ln C(n,k))`.
pub fn m_of_k(n: u64, k: u64, eps: f64) -> Result<f64> {
    if k == 0 || k >= n {
        return Err(Error::param(format!("m_of_k needs 1 <= k <= n - 1, got n = {n}, k = {k}")));
    }
    let lb = log_binom(n, k)?;
    if k as f64 >= eps * n as f64 {
        Ok(sqrt((n - k) as f64 * n as f64 * lb))
    } else {
        Ok(k as f64 * sqrt(lb))
    }
}

/// A threshold of the form `base + deviation`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TailThreshold {
    pub base: f64,
    pub deviation: f64,
    pub value: f64,
}

impl TailThreshold {
    pub fn new(base: f64, deviation: f64) -> Self {
        TailThreshold {
            base,
            deviation,
            value: base + deviation,
        }
    }
}

/// `ñp + √(ñp(1-p)) (√(x ln(n/(n-k))) - 1)`: degree level above which the
/// removal chain draws its high-degree vertices.
pub fn zeta_threshold(n_tilde: u64, p: f64, n: u64, k: u64, x: f64) -> Result<TailThreshold> {
    check_prob(p)?;
    if k >= n {
        return Err(Error::param(format!("zeta_threshold needs k < n, got n = {n}, k = {k}")));
    }
    if n_tilde == 0 {
        return Err(Error::param("zeta_threshold needs a positive main-set size"));
    }
    let base = n_tilde as f64 * p;
    let scale = sqrt(base * (1.0 - p));
    let ratio = log(n as f64 / (n - k) as f64);
    Ok(TailThreshold::new(base, scale * (sqrt(x * ratio) - 1.0)))
}

/// `ñp + A √(ñp(1-p) ln ñ)`: the degree level counted by `ζ(A)`.
pub fn degree_tail_threshold(n_tilde: u64, p: f64, a: f64) -> Result<TailThreshold> {
    check_prob(p)?;
    if n_tilde < 2 {
        return Err(Error::param("degree_tail_threshold needs at least two vertices"));
    }
    let nt = n_tilde as f64;
    let base = nt * p;
    Ok(TailThreshold::new(base, a * sqrt(base * (1.0 - p) * log(nt))))
}

/// A.a.s. upper bound on the maximum degree of `G(n, p)`:
/// `pn + √(2p(1-p) n ln n)`.
pub fn maxdeg_bound(n: u64, p: f64) -> Result<f64> {
    check_prob(p)?;
    if n < 2 {
        return Err(Error::param("maxdeg_bound needs n >= 2"));
    }
    let nf = n as f64;
    Ok(p * nf + sqrt(2.0 * p * (1.0 - p) * nf * log(nf)))
}

/// Multipliers `Q` of the upper-bound prediction `Q m(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UpperBoundConstants {
    /// Used for `k >= tiny_below`; `3√p` by default.
    pub main: f64,
    /// Used for `k < tiny_below`; `1 / (4√p)` by default.
    pub tiny: f64,
    /// Cut-off for the tiny-`k` constant. Zero disables it.
    pub tiny_below: u64,
    /// Branch threshold for `m(k)`.
    pub eps: f64,
}

impl UpperBoundConstants {
    pub fn for_p(p: f64) -> Self {
        UpperBoundConstants {
            main: 3.0 * sqrt(p),
            tiny: 1.0 / (4.0 * sqrt(p)),
            tiny_below: 0,
            eps: DEFAULT_EPS,
        }
    }
}

/// Predicted upper bound `3√p · m(k)` on the longest full interval of
/// order-`k` edge counts.
pub fn chernoff_interval_bound(n: u64, k: u64, p: f64) -> Result<f64> {
    chernoff_interval_bound_with(n, k, p, &UpperBoundConstants::for_p(p))
}

pub fn chernoff_interval_bound_with(
    n: u64,
    k: u64,
    p: f64,
    c: &UpperBoundConstants,
) -> Result<f64> {
    check_prob(p)?;
    let q = if k < c.tiny_below { c.tiny } else { c.main };
    Ok(q * m_of_k(n, k, c.eps)?)
}

/// `n ln 2`; handy for comparing `log_binom` against subset counts.
pub fn ln_two_pow(n: u64) -> f64 {
    n as f64 * LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Composite Simpson integration of the normal density from -12 to x.
    fn phi_quadrature(x: f64) -> f64 {
        let a = -12.0;
        let steps = 200_000;
        let h = (x - a) / steps as f64;
        let f = |t: f64| exp(-0.5 * t * t) / SQRT_2PI;
        let mut s = f(a) + f(x);
        for i in 1..steps {
            let t = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(t);
        }
        s * h / 3.0
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(0.0), 0.5);
        for x in [0.1, 0.7, 1.3, 2.9, 5.5] {
            assert!(close(phi(x) + phi(-x), 1.0, 1e-15));
        }
        assert!(close(phi(1.959964), 0.975, 1e-6));
        for x in [-6.0, -3.2, -1.0, 0.4, 1.959964, 3.7] {
            assert!(close(phi(x), phi_quadrature(x), 1e-10), "x = {x}");
        }
        assert_eq!(phi(-1e300), 0.0);
        assert_eq!(phi(1e300), 1.0);
    }

    #[test]
    fn binom_point_examples() {
        assert!(close(binom_point(4, 0.5, 2).unwrap(), 0.375, 1e-15));
        for (n, p) in [(10u64, 0.3), (1000, 0.5), (77, 0.9)] {
            let expected = exp(n as f64 * log1p(-p));
            let got = binom_point(n, p, 0).unwrap();
            assert!((got - expected).abs() <= 1e-12 * expected);
        }
        assert_eq!(binom_point(4, 0.5, 5).unwrap(), 0.0);
        assert_eq!(binom_point(4, 0.5, -1).unwrap(), 0.0);
        let normal = 1.0 / sqrt(2.0 * PI * 2500.0);
        let got = binom_point(10_000, 0.5, 5000).unwrap();
        assert!(((got - normal) / normal).abs() < 1e-4);
    }

    #[test]
    fn binom_point_matches_exact_products() {
        // Exact rational evaluation through products for moderate N.
        for (n, p) in [(20u64, 0.3), (60, 0.5), (45, 0.85)] {
            for k in 0..=n {
                let mut c = 1.0f64;
                for i in 0..k {
                    c = c * (n - i) as f64 / (i + 1) as f64;
                }
                let exact = c * libm::pow(p, k as f64) * libm::pow(1.0 - p, (n - k) as f64);
                let got = binom_point(n, p, k as i64).unwrap();
                assert!((got - exact).abs() <= 1e-12 * exact, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn binom_cdf_examples() {
        assert_eq!(binom_cdf(30, 0.4, 30).unwrap(), 1.0);
        assert!(close(binom_cdf(100, 0.5, 50).unwrap(), 0.5398, 1e-4));
        for h in -2..=2 {
            let c = binom_cdf(10_000, 0.5, 5000 + 50 * h).unwrap();
            assert!((c - phi(h as f64)).abs() < 0.01);
        }
    }

    #[test]
    fn mills_tail_examples() {
        assert!(close(mills_tail(3.0).unwrap(), 0.0014773, 1e-6));
        let r3 = mills_tail(3.0).unwrap() / phi_upper(3.0);
        assert!((1.0..=1.12).contains(&r3));
        let r8 = mills_tail(8.0).unwrap() / phi_upper(8.0);
        assert!((1.0..=1.02).contains(&r8));
        assert!(mills_tail(0.0).is_err());
        assert!(mills_tail(-1.0).is_err());
    }

    #[test]
    fn log_binom_examples() {
        assert_eq!(log_binom(17, 0).unwrap(), 0.0);
        assert!(close(log_binom(10, 5).unwrap(), log(252.0), 1e-13));
        assert!(close(log_binom(100, 50).unwrap(), 66.784, 1e-3));
        assert!(log_binom(5, 6).is_err());
        assert!((log_binom(1_000_000, 1).unwrap() - log(1e6)).abs() <= 1e-12 * log(1e6));
    }

    #[test]
    fn m_of_k_examples() {
        for n in [10u64, 100, 2000] {
            let expected = sqrt(n as f64 * log(n as f64));
            assert!(close(m_of_k(n, n - 1, 0.25).unwrap(), expected, 1e-9 * expected));
        }
        assert!(close(m_of_k(100, 50, 0.25).unwrap(), 577.9, 0.5));
        // ln C(100, 10) = ln 17310309456440 = 30.4825...
        assert!(close(m_of_k(100, 10, 0.25).unwrap(), 55.211, 0.01));
        assert!(m_of_k(100, 0, 0.25).is_err());
        assert!(m_of_k(100, 100, 0.25).is_err());
    }

    #[test]
    fn zeta_examples() {
        // n / (n - k) = e and x = 1 make the deviation vanish.
        let n = 1_000_000_000u64;
        let k = n - (n as f64 / core::f64::consts::E).round() as u64;
        let z = zeta_threshold(400, 0.5, n, k, 1.0).unwrap();
        assert!(close(z.value, 200.0, 1e-6));
        let z = zeta_threshold(1014, 0.5, 2000, 1000, 0.5).unwrap();
        assert!(close(z.value, 500.45, 0.05));
        assert!((z.base + z.deviation - z.value).abs() <= 1e-12 * z.value);
        let mut last = f64::NEG_INFINITY;
        for x in [0.1, 0.5, 1.0, 2.0, 4.0] {
            let v = zeta_threshold(1014, 0.5, 2000, 1000, x).unwrap().value;
            assert!(v > last);
            last = v;
        }
        assert!(zeta_threshold(10, 0.5, 20, 20, 1.0).is_err());
    }

    #[test]
    fn maxdeg_examples() {
        assert!(close(maxdeg_bound(1000, 0.5).unwrap(), 558.77, 0.01));
        for n in [100u64, 1000, 5000] {
            for p in [0.1, 0.5, 0.8] {
                let b = maxdeg_bound(n, p).unwrap();
                assert!(b >= p * n as f64);
                let dev = |m: u64| maxdeg_bound(m, p).unwrap() - p * m as f64;
                let ratio = dev(4 * n) / dev(n);
                assert!((2.0..=2.5).contains(&ratio), "n={n} p={p} ratio={ratio}");
            }
        }
    }

    #[test]
    fn chernoff_examples() {
        for (n, p) in [(100u64, 0.5), (2000, 0.3)] {
            let expected = 3.0 * sqrt(p) * sqrt(n as f64 * log(n as f64));
            let got = chernoff_interval_bound(n, n - 1, p).unwrap();
            assert!(close(got, expected, 1e-9 * expected));
        }
        assert!(close(chernoff_interval_bound(100, 50, 0.5).unwrap(), 1226.0, 2.0));
        let c = UpperBoundConstants {
            tiny_below: 5,
            ..UpperBoundConstants::for_p(0.25)
        };
        let tiny = chernoff_interval_bound_with(100, 3, 0.25, &c).unwrap();
        assert!(close(tiny, 0.5 * m_of_k(100, 3, 0.25).unwrap(), 1e-12));
    }
}
