//! Circle symbols (Toeplitz/Hankel generators) and line symbols (Wiener-Hopf generators).

use crate::error::{Error, Result};
use crate::quad::{self, Node};
use crate::specfun::{c, ln_gamma};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

type C = Complex64;

/// exp(β ln p) for p > 0.
#[inline]
pub(crate) fn rpow(p: f64, beta: C) -> C {
    (beta * p.ln()).exp()
}

pub(crate) fn sin_pi(beta: C) -> C {
    (beta * PI).sin()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircleKind {
    Vbeta,
    Ubeta,
    VbetaR,
    UbetaR,
    Custom,
}

/// A symbol on the unit circle, evaluated at t = e^{iθ}.
#[derive(Clone)]
pub struct CircleSymbol {
    pub kind: CircleKind,
    pub beta: C,
    pub r: f64,
    custom: Option<Arc<dyn Fn(f64) -> C + Send + Sync>>,
}

impl fmt::Debug for CircleSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CircleSymbol").field("kind", &self.kind).field("beta", &self.beta).field("r", &self.r).finish()
    }
}

impl CircleSymbol {
    pub fn v(beta: C) -> Self {
        Self { kind: CircleKind::Vbeta, beta, r: 1.0, custom: None }
    }

    pub fn u(beta: C) -> Self {
        Self { kind: CircleKind::Ubeta, beta, r: 1.0, custom: None }
    }

    pub fn v_reg(beta: C, r: f64) -> Result<Self> {
        check_r(r)?;
        Ok(Self { kind: CircleKind::VbetaR, beta, r, custom: None })
    }

    pub fn u_reg(beta: C, r: f64) -> Result<Self> {
        check_r(r)?;
        Ok(Self { kind: CircleKind::UbetaR, beta, r, custom: None })
    }

    /// A symbol given as a function of the signed angle θ ∈ (−π, π].
    pub fn custom(f: impl Fn(f64) -> C + Send + Sync + 'static) -> Self {
        Self { kind: CircleKind::Custom, beta: c(0.0, 0.0), r: 0.0, custom: Some(Arc::new(f)) }
    }

    fn is_singular(&self) -> bool {
        matches!(self.kind, CircleKind::Vbeta | CircleKind::Ubeta)
    }

    /// Value at the signed angle φ ∈ (−π, π]; `dist` is |φ| computed by the caller
    /// without cancellation.
    fn eval_signed(&self, phi: f64, dist: f64) -> Result<C> {
        let b = self.beta;
        Ok(match self.kind {
            CircleKind::Vbeta => {
                if dist == 0.0 {
                    return Err(Error::SingularPoint);
                }
                rpow(2.0 * (0.5 * dist).sin(), 2.0 * b)
            }
            CircleKind::Ubeta => {
                if dist == 0.0 {
                    return Err(Error::SingularPoint);
                }
                let theta = if phi > 0.0 { phi - PI } else { phi + PI };
                (c(0.0, 1.0) * b * theta).exp()
            }
            CircleKind::VbetaR => {
                let t = C::from_polar(1.0, phi);
                (b * (1.0 - self.r / t).ln()).exp() * (b * (1.0 - self.r * t).ln()).exp()
            }
            CircleKind::UbetaR => {
                let t = C::from_polar(1.0, phi);
                (-b * (1.0 - self.r / t).ln()).exp() * (b * (1.0 - self.r * t).ln()).exp()
            }
            CircleKind::Custom => (self.custom.as_ref().unwrap())(phi),
        })
    }
}

fn check_r(r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::Domain(format!("regularization radius r = {r} must lie in [0, 1)")))
    }
}

/// Symbol value at t = e^{iθ}. The singular kinds reject θ ≡ 0 (mod 2π).
pub fn eval_circle(s: &CircleSymbol, theta: f64) -> Result<C> {
    let mut phi = theta.rem_euclid(2.0 * PI);
    if phi > PI {
        phi -= 2.0 * PI;
    }
    if s.is_singular() && phi == 0.0 {
        return Err(Error::SingularPoint);
    }
    s.eval_signed(phi, phi.abs())
}

fn check_v_domain(beta: C) -> Result<()> {
    if beta.re <= -0.5 {
        Err(Error::Domain(format!("Fourier coefficients of v_beta need Re beta > -1/2, got {beta}")))
    } else {
        Ok(())
    }
}

/// (v_β)_k for k = 0..=kmax, from (v_β)_0 = Γ(1+2β)/Γ(1+β)² and
/// (v_β)_{k+1} = (v_β)_k (k−β)/(k+1+β). Coefficients are even in k.
pub fn v_coeffs(beta: C, kmax: usize) -> Result<Vec<C>> {
    check_v_domain(beta)?;
    let mut out = Vec::with_capacity(kmax + 1);
    let mut ck = (ln_gamma(1.0 + 2.0 * beta)? - 2.0 * ln_gamma(1.0 + beta)?).exp();
    for k in 0..=kmax {
        out.push(ck);
        let kf = k as f64;
        ck *= (kf - beta) / (kf + 1.0 + beta);
    }
    Ok(out)
}

pub fn fourier_coeff_v(beta: C, k: i64) -> Result<C> {
    Ok(*v_coeffs(beta, k.unsigned_abs() as usize)?.last().unwrap())
}

fn near_integer(beta: C) -> Option<i64> {
    let m = beta.re.round();
    if beta.im.abs() <= 1e-12 && (beta.re - m).abs() <= 1e-12 {
        Some(m as i64)
    } else {
        None
    }
}

/// (u_β)_k = sin(πβ)/(π(β−k)); for integer β = m the symbol is (−t)^m.
pub fn fourier_coeff_u(beta: C, k: i64) -> C {
    if let Some(m) = near_integer(beta) {
        return if k == m { c(if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 }, 0.0) } else { c(0.0, 0.0) };
    }
    sin_pi(beta) / (PI * (beta - k as f64))
}

/// Binomial-series coefficients of (1 − r z)^γ: entry j multiplies z^j.
fn binomial_series(gamma: C, r: f64, len: usize) -> Vec<C> {
    let mut out = Vec::with_capacity(len);
    let mut a = c(1.0, 0.0);
    for j in 0..len {
        out.push(a);
        let jf = j as f64;
        a *= (jf - gamma) / (jf + 1.0) * r;
    }
    out
}

/// Number of series terms after which r^j · (polynomial growth) is below 1e-18.
fn series_len(r: f64, beta: C) -> usize {
    if r == 0.0 {
        return 1;
    }
    let growth = beta.norm() + 2.0;
    let mut j = 16usize;
    loop {
        let jf = j as f64;
        if jf * r.ln() + growth * (jf + 1.0).ln() < (1e-18f64).ln() {
            return j;
        }
        j = j * 5 / 4 + 1;
    }
}

/// Coefficients of (1 − r/t)^{γ₋}(1 − rt)^{γ₊} for k in [kmin, kmax], by Cauchy product of
/// the two binomial series. Both series are truncated where the geometric tail drops
/// below 1e-18 relative to their leading term.
fn regularized_range(gm: C, gp: C, r: f64, kmin: i64, kmax: i64) -> Vec<C> {
    let kabs = kmin.unsigned_abs().max(kmax.unsigned_abs()) as usize;
    let len = series_len(r, gm.norm().max(gp.norm()).into()) + kabs + 1;
    let plus = binomial_series(gp, r, len);
    let minus = binomial_series(gm, r, len);
    (kmin..=kmax)
        .map(|k| {
            // Σ_{j−l=k} plus_j minus_l
            let (sp, sm) = if k >= 0 { (k as usize, 0) } else { (0, k.unsigned_abs() as usize) };
            let n = len - sp.max(sm);
            // Neumaier-compensated: the series can run to ~10^8 terms as r → 1.
            let (mut acc, mut comp) = (c(0.0, 0.0), c(0.0, 0.0));
            for l in 0..n {
                let t = plus[sp + l] * minus[sm + l];
                let s = acc + t;
                comp.re += if acc.re.abs() >= t.re.abs() { (acc.re - s.re) + t.re } else { (t.re - s.re) + acc.re };
                comp.im += if acc.im.abs() >= t.im.abs() { (acc.im - s.im) + t.im } else { (t.im - s.im) + acc.im };
                acc = s;
            }
            acc + comp
        })
        .collect()
}

fn reg_exponents(s: &CircleSymbol) -> Result<(C, C)> {
    match s.kind {
        CircleKind::VbetaR => Ok((s.beta, s.beta)),
        CircleKind::UbetaR => Ok((-s.beta, s.beta)),
        _ => Err(Error::Domain("regularized coefficients need VbetaR or UbetaR".into())),
    }
}

pub fn fourier_coeff_regularized(s: &CircleSymbol, k: i64) -> Result<C> {
    let (gm, gp) = reg_exponents(s)?;
    Ok(regularized_range(gm, gp, s.r, k, k)[0])
}

/// Batch version of [`fourier_coeff_regularized`] over kmin..=kmax.
pub fn regularized_coeffs(s: &CircleSymbol, kmin: i64, kmax: i64) -> Result<Vec<C>> {
    let (gm, gp) = reg_exponents(s)?;
    Ok(regularized_range(gm, gp, s.r, kmin, kmax))
}

/// (1/2π)∫ s(e^{iθ}) e^{−ikθ} dθ by adaptive tanh-sinh on the two halves around θ = 0.
pub fn fourier_coeff_numeric(s: &CircleSymbol, k: i64) -> Result<C> {
    fourier_coeff_numeric_tol(s, k, 1e-11)
}

pub fn fourier_coeff_numeric_tol(s: &CircleSymbol, k: i64, tol: f64) -> Result<C> {
    let kf = k as f64;
    let mut err = None;
    let v = quad::integrate_ts(0.0, PI, tol * 2.0 * PI, |n: &Node| {
        let d = n.from_a;
        let mut f = |phi: f64| match s.eval_signed(phi, d) {
            Ok(v) => v * C::from_polar(1.0, -kf * phi),
            Err(e) => {
                err = Some(e);
                c(0.0, 0.0)
            }
        };
        f(d) + f(-d)
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(v / (2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    VhatBeta,
    UhatBeta,
    VhatBetaEps,
    UhatBetaEps,
    PhiBeta,
    Custom,
}

/// A symbol on the real line.
#[derive(Clone)]
pub struct LineSymbol {
    pub kind: LineKind,
    pub beta: C,
    pub eps: f64,
    custom: Option<Arc<dyn Fn(f64) -> C + Send + Sync>>,
}

impl fmt::Debug for LineSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineSymbol")
            .field("kind", &self.kind)
            .field("beta", &self.beta)
            .field("eps", &self.eps)
            .finish()
    }
}

impl LineSymbol {
    pub fn vhat(beta: C) -> Self {
        Self { kind: LineKind::VhatBeta, beta, eps: 0.0, custom: None }
    }

    pub fn uhat(beta: C) -> Self {
        Self { kind: LineKind::UhatBeta, beta, eps: 0.0, custom: None }
    }

    pub fn vhat_eps(beta: C, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        Ok(Self { kind: LineKind::VhatBetaEps, beta, eps, custom: None })
    }

    pub fn uhat_eps(beta: C, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        Ok(Self { kind: LineKind::UhatBetaEps, beta, eps, custom: None })
    }

    /// φ_β(ξ) = 1 − sin(πβ) sech(πξ), for −3/2 < Re β < 1/2.
    pub fn phi(beta: C) -> Result<Self> {
        if !(beta.re > -1.5 && beta.re < 0.5) {
            return Err(Error::Domain(format!("phi_beta needs -3/2 < Re beta < 1/2, got {beta}")));
        }
        Ok(Self { kind: LineKind::PhiBeta, beta, eps: 1.0, custom: None })
    }

    pub fn custom(f: impl Fn(f64) -> C + Send + Sync + 'static) -> Self {
        Self { kind: LineKind::Custom, beta: c(0.0, 0.0), eps: 1.0, custom: Some(Arc::new(f)) }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("eps = {eps} must lie in (0, 1]")))
    }
}

/// ((x − e i)/(x − i))^{−β} ((x + e i)/(x + i))^{β} with principal logs of each factor;
/// e = 0 is read as x ∓ 0i.
fn uhat_value(beta: C, eps: f64, x: f64) -> C {
    let ln_q = |s: f64| C::new(x, s * eps).ln() - C::new(x, s).ln();
    let lm = if eps == 0.0 { C::new(x, -0.0).ln() - C::new(x, -1.0).ln() } else { ln_q(-1.0) };
    let lp = if eps == 0.0 { C::new(x, 0.0).ln() - C::new(x, 1.0).ln() } else { ln_q(1.0) };
    (-beta * lm + beta * lp).exp()
}

pub fn eval_line(s: &LineSymbol, x: f64) -> Result<C> {
    let b = s.beta;
    Ok(match s.kind {
        LineKind::VhatBeta => {
            if x == 0.0 {
                return Err(Error::SingularPoint);
            }
            rpow(x * x / (x * x + 1.0), b)
        }
        LineKind::VhatBetaEps => rpow((x * x + s.eps * s.eps) / (x * x + 1.0), b),
        LineKind::UhatBeta => {
            if x == 0.0 {
                return Err(Error::SingularPoint);
            }
            uhat_value(b, 0.0, x)
        }
        LineKind::UhatBetaEps => uhat_value(b, s.eps, x),
        LineKind::PhiBeta => 1.0 - sin_pi(b) / (PI * x).cosh(),
        LineKind::Custom => (s.custom.as_ref().unwrap())(x),
    })
}

/// ψ_β(z) = Γ(3/4+z)Γ(1/4+z) / (Γ(3/4+β/2+z)Γ(1/4−β/2+z)), the Wiener-Hopf factor of φ_β.
pub fn psi_beta(beta: C, z: C) -> Result<C> {
    Ok((ln_gamma(0.75 + z)? + ln_gamma(0.25 + z)?
        - ln_gamma(0.75 + 0.5 * beta + z)?
        - ln_gamma(0.25 - 0.5 * beta + z)?)
    .exp())
}

/// Precomputed cut-integral representation k(x) = Σ_q w_q e^{−η_q |x|}, η_q ∈ [ε, 1].
/// Separate weights serve x > 0 and x < 0 (they differ only for û).
#[derive(Debug, Clone)]
pub struct ContourKernel {
    pub(crate) eta: Vec<f64>,
    pub(crate) w_pos: Vec<C>,
    pub(crate) w_neg: Vec<C>,
}

/// Nodes on [ε, 1] graded toward η = ε (layer of width ~ε and the (η−ε)^β factor) and
/// toward η = 1 (the (1−η)^{±β} factor).
pub fn cut_nodes(eps: f64) -> Vec<Node> {
    let len = 1.0 - eps;
    let levels_a = ((len / eps).log2().ceil().max(0.0) as usize) + 2;
    let breaks = quad::graded_breaks(len, 2, levels_a, 4);
    quad::singular_composite(eps, 1.0, &breaks, 16, 6)
}

impl ContourKernel {
    pub fn new(s: &LineSymbol) -> Result<Self> {
        let b = s.beta;
        let eps = s.eps;
        let pref = -sin_pi(b) / PI;
        match s.kind {
            LineKind::VhatBetaEps | LineKind::UhatBetaEps => {}
            _ => return Err(Error::Domain(format!("no cut-integral kernel for {:?}", s.kind))),
        }
        let nodes = cut_nodes(eps);
        let mut eta = Vec::with_capacity(nodes.len());
        let mut w_pos = Vec::with_capacity(nodes.len());
        let mut w_neg = Vec::with_capacity(nodes.len());
        for n in &nodes {
            let (em, om) = (n.from_a, n.to_b); // η − ε, 1 − η
            let (ep, op) = (n.x + eps, 1.0 + n.x); // η + ε, 1 + η
            eta.push(n.x);
            match s.kind {
                LineKind::VhatBetaEps => {
                    let w = pref * rpow(em * ep / (om * op), b) * n.w;
                    w_pos.push(w);
                    w_neg.push(w);
                }
                _ => {
                    let q = op * em / (om * ep);
                    w_pos.push(pref * rpow(q, b) * n.w);
                    w_neg.push(-pref * rpow(q, -b) * n.w);
                }
            }
        }
        Ok(Self { eta, w_pos, w_neg })
    }

    pub fn eval(&self, x: f64) -> C {
        let w = if x >= 0.0 { &self.w_pos } else { &self.w_neg };
        let ax = x.abs();
        let mut acc = c(0.0, 0.0);
        for (e, wq) in self.eta.iter().zip(w) {
            acc += wq * (-e * ax).exp();
        }
        acc
    }
}

/// k(x) = (1/2π)∫ (s(ξ) − 1) e^{−iξx} dξ.
///
/// φ_β: closed form −sin(πβ)/(2π) · sech(x/2). v̂_{β,ε}, û_{β,ε}: the integral is moved
/// onto the cut [−i, −iε] (or [iε, i] for û at x < 0) and evaluated by quadrature.
pub fn kernel_line(s: &LineSymbol, x: f64) -> Result<C> {
    match s.kind {
        LineKind::PhiBeta => Ok(phi_kernel(s.beta, x)),
        LineKind::VhatBetaEps | LineKind::UhatBetaEps => Ok(ContourKernel::new(s)?.eval(x)),
        _ => Err(Error::Domain(format!("{:?} has no integrable kernel", s.kind))),
    }
}

pub fn phi_kernel(beta: C, x: f64) -> C {
    -sin_pi(beta) / (2.0 * PI * (0.5 * x).cosh())
}
