//! Complex log-Gamma, log Barnes G and the Barnes duplication/ratio identities.
//!
//! Logs of G are accumulated through the recursion `ln G(z+1) = ln Γ(z) + ln G(z)`
//! and never re-principalized, so quotients of G values keep a consistent branch.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};

pub type ComplexVal = Complex64;

/// Distance to a nonpositive integer below which Γ has a pole / G a zero.
pub const POLE_TOL: f64 = 1e-12;

/// ζ'(−1); the Glaisher constant enters only through this number.
const ZETA_PRIME_M1: f64 = -0.165_421_143_700_450_929_213_919_660_242_780_642_760_63;
const LN_2PI: f64 = 1.837_877_066_409_345_483_560_659_472_811_235_279_722_8;
const LN_PI: f64 = 1.144_729_885_849_400_174_143_427_351_353_058_711_647_3;

// B_2, B_4, ..., B_20
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const SHIFT_TO: f64 = 12.0;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im.abs() <= POLE_TOL && z.re <= POLE_TOL && (z.re - z.re.round()).abs() <= POLE_TOL
}

fn check_finite(z: Complex64, what: &str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

fn shift_count(z: Complex64) -> usize {
    if z.re >= SHIFT_TO {
        0
    } else {
        (SHIFT_TO - z.re).ceil() as usize
    }
}

/// Stirling series for Re z ≥ 12.
fn ln_gamma_stirling(z: Complex64) -> Complex64 {
    let lz = z.ln();
    let mut s = (z - 0.5) * lz - z + 0.5 * LN_2PI;
    let zi = z.inv();
    let zi2 = zi * zi;
    let mut p = zi;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k2 = 2.0 * (k as f64 + 1.0);
        s += p * (b / (k2 * (k2 - 1.0)));
        p *= zi2;
    }
    s
}

/// Principal log-Gamma: continuous on the plane cut along the negative real axis.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(z));
    }
    if z.im == 0.0 && (z.re == 1.0 || z.re == 2.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let m = shift_count(z);
    let mut acc = ln_gamma_stirling(z + m as f64);
    for k in 0..m {
        acc -= (z + k as f64).ln();
    }
    check_finite(acc, "ln_gamma")
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(ln_gamma(z)?.exp())
}

/// ln G(1+ζ) for Re ζ ≥ 12.
fn ln_barnes_asym(zeta: Complex64) -> Complex64 {
    let lz = zeta.ln();
    let z2 = zeta * zeta;
    let mut s = 0.5 * z2 * lz - 0.75 * z2 + 0.5 * LN_2PI * zeta - lz / 12.0 + ZETA_PRIME_M1;
    let zi2 = (z2).inv();
    let mut p = zi2;
    // B_{2k+2} / (4k(k+1) ζ^{2k})
    for (k, bk) in BERNOULLI.iter().enumerate().skip(1) {
        let kf = k as f64;
        s += p * (bk / (4.0 * kf * (kf + 1.0)));
        p *= zi2;
    }
    s
}

/// log of the Barnes G-function, branch accumulated through the recursion.
pub fn ln_barnes_g(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Zero(z));
    }
    if z.im == 0.0 && (z.re == 1.0 || z.re == 2.0 || z.re == 3.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // G(z) = G(z+m) / Π_{k<m} Γ(z+k), with z+m-1 in the asymptotic region.
    let m = shift_count(z - 1.0);
    let top = z + m as f64;
    let mut lg = ln_barnes_asym(top - 1.0);
    if m > 0 {
        let mut lgam = ln_gamma_stirling(top);
        for k in (0..m).rev() {
            let zk = z + k as f64;
            lgam -= zk.ln();
            lg -= lgam;
        }
    }
    check_finite(lg, "ln_barnes_g")
}

/// n^{ω/2} with ω = Σx² − Σy², the large-n value of Π G(1+x_r+n)/G(1+y_r+n).
pub fn barnes_ratio_asymptote(xs: &[Complex64], ys: &[Complex64], n: u64) -> Result<Complex64> {
    Ok(ln_barnes_ratio_asymptote(xs, ys, n as f64)?.exp())
}

pub fn ln_barnes_ratio_asymptote(xs: &[Complex64], ys: &[Complex64], n: f64) -> Result<Complex64> {
    let sx: Complex64 = xs.iter().sum();
    let sy: Complex64 = ys.iter().sum();
    if (sx - sy).norm() > 1e-12 {
        return Err(Error::Constraint(format!("sum of xs ({sx}) differs from sum of ys ({sy})")));
    }
    if n <= 0.0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let omega: Complex64 = xs.iter().map(|x| x * x).sum::<Complex64>() - ys.iter().map(|y| y * y).sum::<Complex64>();
    Ok(0.5 * omega * n.ln())
}

/// ln Π G(1+x_r+n)/G(1+y_r+n) evaluated directly.
pub fn ln_barnes_ratio_direct(xs: &[Complex64], ys: &[Complex64], n: f64) -> Result<Complex64> {
    let mut s = Complex64::new(0.0, 0.0);
    for x in xs {
        s += ln_barnes_g(1.0 + x + n)?;
    }
    for y in ys {
        s -= ln_barnes_g(1.0 + y + n)?;
    }
    Ok(s)
}

/// Reduce the imaginary part into (−π, π]: compares logs up to a 2πi multiple.
pub fn branch_matched(d: Complex64) -> Complex64 {
    let mut im = d.im.rem_euclid(2.0 * PI);
    if im > PI {
        im -= 2.0 * PI;
    }
    Complex64::new(d.re, im)
}

/// |ln[G(z)G(z+½)²G(z+1)] − ln[G(½)² π^z 2^{−2z²+3z−1} G(2z)]|.
pub fn duplication_residual(z: Complex64) -> Result<f64> {
    let lhs = ln_barnes_g(z)? + 2.0 * ln_barnes_g(z + 0.5)? + ln_barnes_g(z + 1.0)?;
    let rhs =
        2.0 * ln_barnes_g(c(0.5, 0.0))? + z * LN_PI + (-2.0 * z * z + 3.0 * z - 1.0) * LN_2 + ln_barnes_g(2.0 * z)?;
    Ok(branch_matched(lhs - rhs).norm())
}

/// ln of G(½+β)G(1+β)²G(3/2+β) / [G(1+2β) (2π)^β 2^{−2β²} G(½)G(3/2)]; zero when the
/// half-argument duplication identity holds.
pub fn ln_duplication_half_ratio(beta: Complex64) -> Result<Complex64> {
    let lhs = ln_barnes_g(beta + 0.5)? + 2.0 * ln_barnes_g(beta + 1.0)? + ln_barnes_g(beta + 1.5)?
        - ln_barnes_g(2.0 * beta + 1.0)?;
    let rhs = beta * LN_2PI - 2.0 * beta * beta * LN_2 + ln_barnes_g(c(0.5, 0.0))? + ln_barnes_g(c(1.5, 0.0))?;
    Ok(branch_matched(lhs - rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BetaContext {
    DiscretePlus,
    DiscreteMinus,
    ContinuousPlus,
    ContinuousMinus,
    KernelFamily,
    SechSymbol,
}

/// A Fisher-Hartwig exponent validated against the strip of the context it is used in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParam {
    value: Complex64,
    context: BetaContext,
}

impl BetaParam {
    pub fn new(value: Complex64, context: BetaContext) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::NonFinite("beta".into()));
        }
        let re = value.re;
        let half_int_below = |first: f64| {
            // re ∈ {first, first−1, first−2, ...}
            re <= first + POLE_TOL && ((re - first) - (re - first).round()).abs() <= POLE_TOL
        };
        let ok = match context {
            BetaContext::DiscretePlus => !half_int_below(-0.5),
            BetaContext::DiscreteMinus => !half_int_below(-1.5),
            BetaContext::ContinuousPlus => re > -0.5 && re < 1.5,
            BetaContext::ContinuousMinus => re > -1.0 && re < 0.5,
            BetaContext::KernelFamily => re > -1.0 && re < 1.0,
            BetaContext::SechSymbol => re > -1.5 && re < 0.5,
        };
        if ok {
            Ok(Self { value, context })
        } else {
            Err(Error::Domain(format!("beta = {value} not admissible for {context:?}")))
        }
    }

    pub fn real(re: f64, context: BetaContext) -> Result<Self> {
        Self::new(c(re, 0.0), context)
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn context(&self) -> BetaContext {
        self.context
    }
}
