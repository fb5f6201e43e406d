//! The constant `C_p` (root of `(p−1)x^p − p·x^{p−1} − 1`) and the extremal
//! profile of `a(t) = |2t|^{−1/p}` that shows it cannot be improved.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{rational_pow, ApproxReal, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpResult {
    pub p: Rational,
    pub cp_low: Rational,
    pub cp_high: Rational,
    pub cp_approx: ApproxReal,
}

fn check_p(p: &Rational) -> Result<(i32, i32)> {
    if *p <= Rational::one() {
        return Err(Error::Domain(format!("need p > 1, got {p}")));
    }
    let n = i32::try_from(p.numer()).map_err(|_| Error::Argument(format!("exponent too large: {p}")))?;
    let d = i32::try_from(p.denom()).map_err(|_| Error::Argument(format!("exponent too large: {p}")))?;
    Ok((n, d))
}

/// Exact sign of `φ(x) = (p−1)x^p − p·x^{p−1} − 1` for rational `x > 0`.
///
/// `φ(x) = x^{p−1}((p−1)x − p) − 1`; when the bracket is positive both sides
/// are raised to the power `d` (with `p = n/d`) to clear the root.
pub fn phi_sign(p: &Rational, x: &Rational) -> Result<Ordering> {
    let (n, d) = check_p(p)?;
    if !x.is_positive() {
        return Err(Error::Argument(format!("φ is evaluated at x > 0, got {x}")));
    }
    let q = (p - Rational::one()) * x - p;
    if !q.is_positive() {
        return Ok(Ordering::Less);
    }
    let lhs = x.pow(n - d)? * q.pow(d)?;
    Ok(lhs.cmp(&Rational::one()))
}

pub fn phi_f64(p: f64, x: f64) -> f64 {
    (p - 1.0) * x.powf(p) - p * x.powf(p - 1.0) - 1.0
}

/// Certified bracket `[cp_low, cp_high]` of the root, `cp_high − cp_low ≤ tol`.
pub fn cp_constant(p: &Rational, tol: &Rational) -> Result<CpResult> {
    check_p(p)?;
    if !tol.is_positive() {
        return Err(Error::Argument("tolerance must be positive".into()));
    }
    let mut lo = Rational::one();
    let mut hi = Rational::from_integer(2) + Rational::from_integer(2) / (p - Rational::one());
    while phi_sign(p, &hi)? != Ordering::Greater {
        lo = hi.clone();
        hi = &hi * Rational::from_integer(2);
    }
    while &hi - &lo > *tol || lo == Rational::one() {
        let mid = lo.midpoint(&hi);
        match phi_sign(p, &mid)? {
            Ordering::Greater => hi = mid,
            Ordering::Less => lo = mid,
            Ordering::Equal => {
                lo = mid.clone();
                hi = mid;
                break;
            }
        }
    }
    let mid = lo.midpoint(&hi);
    let half = ((&hi - &lo) * Rational::frac(1, 2)).to_f64();
    let value = mid.to_f64();
    Ok(CpResult {
        p: p.clone(),
        cp_low: lo,
        cp_high: hi,
        cp_approx: ApproxReal::new(value, half + value * f64::EPSILON),
    })
}

fn pow_tol() -> Rational {
    Rational::frac(1, 1_000_000_000_000_000)
}

fn check_positive(name: &str, x: &Rational) -> Result<()> {
    if !x.is_positive() {
        return Err(Error::Argument(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

/// Average of `a(u) = |2u|^{−1/p}` over `(−s, t)`:
/// `b(s) = (1/(s+t)) · (p/(p−1)) · 2^{−1/p} · (s^{1−1/p} + t^{1−1/p})`.
pub fn extremal_average(p: &Rational, s: &Rational, t: &Rational) -> Result<ApproxReal> {
    check_p(p)?;
    check_positive("s", s)?;
    check_positive("t", t)?;
    let q = Rational::one() - p.recip()?;
    let sum = rational_pow(s, &q, &pow_tol())?;
    let tq = rational_pow(t, &q, &pow_tol())?;
    let two = rational_pow(&Rational::from_integer(2), &(-p.recip()?), &pow_tol())?;
    let coeff = (p / (p - Rational::one())) / (s + t);
    let total = ApproxReal::new(sum.value + tq.value, sum.error_bound + tq.error_bound + (sum.value + tq.value) * f64::EPSILON);
    let out = total.mul(&two).scale(coeff.to_f64());
    Ok(ApproxReal::new(out.value, out.error_bound + out.value.abs() * f64::EPSILON))
}

fn extremal_average_f64(p: f64, s: f64, t: f64) -> f64 {
    let q = 1.0 - 1.0 / p;
    (p / (p - 1.0)) * 2f64.powf(-1.0 / p) * (s.powf(q) + t.powf(q)) / (s + t)
}

fn a_f64(p: f64, u: f64) -> f64 {
    (2.0 * u.abs()).powf(-1.0 / p)
}

/// Numeric summary of the extremal configuration for `a` at the point `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessProfile {
    pub p: Rational,
    pub t: Rational,
    /// Maximizer of `s ↦ b(s)`.
    pub s0: ApproxReal,
    pub w: ApproxReal,
    /// `Ma(t) / a(t) = b(s0) · (2t)^{1/p}`.
    pub ma_over_a: ApproxReal,
    /// `|b(s0) − a(s0)|`.
    pub first_order_residual: f64,
    /// `|(1/(p−1))w^{1−1/p} − w^{−1/p} + p/(p−1)|`.
    pub w_equation_residual: f64,
    pub cp: CpResult,
}

impl SharpnessProfile {
    pub fn w_error(&self) -> f64 {
        (self.w.value - self.cp.cp_approx.value.powf(-self.p.to_f64())).abs()
    }

    pub fn ratio_error(&self) -> f64 {
        (self.ma_over_a.value - self.cp.cp_approx.value).abs()
    }
}

/// Maximizes `b(s)` over `s > 0` by bisecting on the sign of
/// `b'(s) = (a(s) − b(s)) / (s + t)`, after checking on the grid `s = t·2^k`,
/// `|k| ≤ 40`, that this sign goes from `+` to `−` exactly once.
pub fn sharpness_profile(p: &Rational, t: &Rational, tol: &Rational) -> Result<SharpnessProfile> {
    check_p(p)?;
    check_positive("t", t)?;
    check_positive("tol", tol)?;
    let (pf, tf) = (p.to_f64(), t.to_f64());
    let slope_sign = |s: f64| a_f64(pf, s) - extremal_average_f64(pf, s, tf);

    let grid: Vec<f64> = (-40..=40).map(|k| tf * 2f64.powi(k)).collect();
    let signs: Vec<bool> = grid.iter().map(|&s| slope_sign(s) > 0.0).collect();
    let changes: Vec<usize> = (1..signs.len()).filter(|&i| signs[i] != signs[i - 1]).collect();
    if changes.len() != 1 || !signs[0] {
        return Err(Error::Numeric(format!(
            "b(s) is not unimodal on the sampling grid: {} sign changes of b'",
            changes.len()
        )));
    }
    let (mut lo, mut hi) = (grid[changes[0] - 1], grid[changes[0]]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope_sign(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s0_f = 0.5 * (lo + hi);
    let s0 = Rational::from_f64_exact(s0_f)?;

    let b0 = extremal_average(p, &s0, t)?;
    let inv_p = p.recip()?;
    let a0 = rational_pow(&(&s0 * Rational::from_integer(2)), &(-&inv_p), &pow_tol())?;
    let scale = rational_pow(&(t * Rational::from_integer(2)), &inv_p, &pow_tol())?;
    let ma_over_a = b0.mul(&scale);
    let w_exact = &s0 / t;
    let w = ApproxReal::new(w_exact.to_f64(), w_exact.to_f64() * f64::EPSILON + (hi - lo) / tf);
    let wq = rational_pow(&w_exact, &(Rational::one() - &inv_p), &pow_tol())?;
    let wm = rational_pow(&w_exact, &(-&inv_p), &pow_tol())?;
    let w_equation_residual = (wq.value / (pf - 1.0) - wm.value + pf / (pf - 1.0)).abs();
    let cp = cp_constant(p, &tol.clone().min(Rational::frac(1, 1_000_000_000_000)))?;

    Ok(SharpnessProfile {
        p: p.clone(),
        t: t.clone(),
        s0: ApproxReal::new(s0_f, (hi - lo) + s0_f * f64::EPSILON),
        w,
        ma_over_a,
        first_order_residual: (b0.value - a0.value).abs(),
        w_equation_residual,
        cp,
    })
}

/// `(s, b(s))` on a log-spaced grid around `t`, for plotting.
pub fn extremal_curve(p: &Rational, t: &Rational, samples: usize) -> Result<Vec<(f64, f64)>> {
    check_p(p)?;
    check_positive("t", t)?;
    let (pf, tf) = (p.to_f64(), t.to_f64());
    let n = samples.max(2);
    Ok((0..n)
        .map(|i| {
            let k = -8.0 + 16.0 * i as f64 / (n - 1) as f64;
            let s = tf * 2f64.powf(k);
            (s, extremal_average_f64(pf, s, tf))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn c2_is_one_plus_sqrt2() {
        let res = cp_constant(&r("2"), &r("1e-12")).unwrap();
        let exact = 1.0 + 2f64.sqrt();
        assert!(res.cp_low.to_f64() <= exact && exact <= res.cp_high.to_f64());
        assert!(&res.cp_high - &res.cp_low <= r("1e-12"));
        assert_eq!(phi_sign(&r("2"), &res.cp_low).unwrap(), Ordering::Less);
        assert_eq!(phi_sign(&r("2"), &res.cp_high).unwrap(), Ordering::Greater);
    }

    #[test]
    fn c3_bracket() {
        // sign-change oracle on the cubic 2x³ − 3x² − 1
        let cubic = |x: f64| 2.0 * x.powi(3) - 3.0 * x.powi(2) - 1.0;
        assert!(cubic(1.67) < 0.0 && cubic(1.68) > 0.0);
        let res = cp_constant(&r("3"), &r("1e-10")).unwrap();
        assert!(res.cp_low > r("1.67") && res.cp_high < r("1.68"));
        assert!(res.cp_approx.contains(res.cp_low.to_f64()));
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(matches!(cp_constant(&r("1"), &r("1e-6")), Err(Error::Domain(_))));
        assert!(cp_constant(&r("2"), &r("0")).is_err());
        assert!(extremal_average(&r("2"), &r("0"), &r("1")).is_err());
    }

    #[test]
    fn large_p_root_above_one() {
        let res = cp_constant(&r("10"), &r("1e-9")).unwrap();
        assert!(res.cp_low > Rational::one());
        assert!(phi_f64(10.0, res.cp_approx.value).abs() < 1e-6);
    }

    #[test]
    fn extremal_average_closed_form() {
        let b = extremal_average(&r("2"), &r("1/2"), &r("1/2")).unwrap();
        assert!(b.contains(2.0) || (b.value - 2.0).abs() < 1e-14, "{b}");
        let x = extremal_average(&r("3"), &r("1/3"), &r("5")).unwrap();
        let y = extremal_average(&r("3"), &r("5"), &r("1/3")).unwrap();
        assert!((x.value - y.value).abs() <= x.error_bound + y.error_bound);
    }

    #[test]
    fn p2_profile() {
        let prof = sharpness_profile(&r("2"), &r("1"), &r("1e-8")).unwrap();
        let c2 = 1.0 + 2f64.sqrt();
        assert!((prof.ma_over_a.value - c2).abs() < 1e-8);
        assert!((prof.w.value - c2.powi(-2)).abs() < 1e-8);
        assert!(prof.first_order_residual < 1e-8);
        assert!(prof.w_equation_residual < 1e-8);
    }
}
