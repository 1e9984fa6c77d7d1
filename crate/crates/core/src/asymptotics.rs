//! Asymptotic formulas for the determinants, in log form, and convergence tables of
//! computed determinants against them.

use crate::error::{Error, Result};
use crate::fredholm::{fredholm_logdet, graded_rule, nystrom, r_of_eps, KernelSpec, RuleKnobs};
use crate::specfun::{c, ln_barnes_g, BetaContext, BetaParam};
use crate::structured::{hankel_reg_closed_form, LogDet, Sign};
use crate::wienerhopf::ln_akhiezer_kac_e;
use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AsymptoteKind {
    /// det(W_R + H_R)(v̂_β) as R → ∞.
    ThmMainPlus,
    /// det(W_R − H_R)(v̂_β) as R → ∞.
    ThmMainMinus,
    /// det(T_n + H_n)(v_β) as n → ∞.
    DiscretePlus,
    /// det(T_n − H_n)(v_β) as n → ∞.
    DiscreteMinus,
    /// det W_L(v̂_β) as the length L → ∞.
    W2Rcont,
    /// det T_m(v_β) as m → ∞.
    T2nDiscrete,
    /// det W_s(φ_β) as s → ∞.
    SechLemma,
    /// The scale-free constant C_β.
    Cbeta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoteSpec {
    pub kind: AsymptoteKind,
    pub beta: BetaParam,
    /// For the continuous kinds: the exponential rate −β becomes −β(1 − ε), the geometric
    /// mean of the regularized symbol v̂_{β,ε}. Zero means the singular symbol.
    pub eps: f64,
}

impl AsymptoteSpec {
    pub fn new(kind: AsymptoteKind, beta: C) -> Result<Self> {
        use AsymptoteKind::*;
        let ctx = match kind {
            ThmMainPlus | W2Rcont => BetaContext::ContinuousPlus,
            ThmMainMinus | Cbeta => BetaContext::ContinuousMinus,
            DiscretePlus => BetaContext::DiscretePlus,
            DiscreteMinus => BetaContext::DiscreteMinus,
            SechLemma => BetaContext::SechSymbol,
            T2nDiscrete => {
                if beta.re <= -0.5 {
                    return Err(Error::Domain(format!("det T_n(v_beta) needs Re beta > -1/2, got {beta}")));
                }
                BetaContext::DiscretePlus
            }
        };
        let beta = BetaParam::new(beta, ctx)?;
        Ok(Self { kind, beta, eps: 0.0 })
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::Domain(format!("eps = {eps} outside [0, 1)")));
        }
        self.eps = eps;
        Ok(self)
    }
}

fn g(z: C) -> Result<C> {
    ln_barnes_g(z)
}

/// Log of the full asymptotic expression at scale n, R, L, m or s (ignored for Cbeta).
pub fn asymptote_log(spec: &AsymptoteSpec, scale: f64) -> Result<C> {
    use AsymptoteKind::*;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Domain(format!("scale = {scale} must be positive")));
    }
    let b = spec.beta.value();
    let b2 = b * b;
    let ln_s = scale.ln();
    let ln_2pi = (2.0 * PI).ln();
    let rate = -b * (1.0 - spec.eps) * scale;
    let half = c(0.5, 0.0);
    let three_half = c(1.5, 0.0);
    Ok(match spec.kind {
        ThmMainPlus => {
            rate + (0.5 * b2 - 0.5 * b) * ln_s + 0.5 * b * ln_2pi + (-b2 + 0.5 * b) * LN_2 + g(half)? - g(half + b)?
        }
        ThmMainMinus => {
            rate + (0.5 * b2 + 0.5 * b) * ln_s + 0.5 * b * ln_2pi + (-b2 - 0.5 * b) * LN_2 + g(three_half)?
                - g(three_half + b)?
        }
        DiscretePlus => (0.5 * b2 - 0.5 * b) * ln_s + 0.5 * b * ln_2pi - 0.5 * b2 * LN_2 + g(half)? - g(half + b)?,
        DiscreteMinus => {
            (0.5 * b2 + 0.5 * b) * ln_s + 0.5 * b * ln_2pi - 0.5 * b2 * LN_2 + g(three_half)? - g(three_half + b)?
        }
        W2Rcont => rate + b2 * (0.5 * scale).ln() + 2.0 * g(1.0 + b)? - g(1.0 + 2.0 * b)?,
        T2nDiscrete => b2 * ln_s + 2.0 * g(1.0 + b)? - g(1.0 + 2.0 * b)?,
        SechLemma => -(0.5 * b + 0.5 * b2) * scale + ln_akhiezer_kac_e(b)?,
        Cbeta => ln_c_beta(b)?,
    })
}

/// ln C_β = β² ln 2 − ln E[φ_β], −1 < Re β < 1/2.
pub fn ln_c_beta(beta: C) -> Result<C> {
    BetaParam::new(beta, BetaContext::ContinuousMinus)?;
    Ok(beta * beta * LN_2 - ln_akhiezer_kac_e(beta)?)
}

pub fn c_beta(beta: C) -> Result<C> {
    Ok(ln_c_beta(beta)?.exp())
}

/// Finite-ε value of the ratio defining C_{±β}:
/// det(I ± H(u_{β,r})) / det(I ± Π_{[ε,1]} K⁰_β Π_{[ε,1]}), r = (1 − ε)/(1 + ε).
pub fn c_beta_estimate(beta: C, sign: Sign, eps: f64, knobs: RuleKnobs) -> Result<LogDet> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps = {eps} outside (0, 1)")));
    }
    let spec = KernelSpec::k0(beta)?;
    let op = nystrom(&spec, &graded_rule(eps, knobs)?)?;
    Ok(hankel_reg_closed_form(beta, r_of_eps(eps), sign) - fredholm_logdet(&op, sign)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub scale: f64,
    pub value: LogDet,
    pub asymptote: LogDet,
    /// exp(value − asymptote).
    pub ratio: C,
    pub deviation: f64,
    /// Least-squares slope of ln deviation against ln scale over this and up to two
    /// preceding rows.
    pub decay_exponent: Option<f64>,
}

pub fn convergence_table(values: &[(f64, LogDet)], spec: &AsymptoteSpec) -> Result<Vec<ConvergenceRow>> {
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(values.len());
    for (i, &(scale, value)) in values.iter().enumerate() {
        let asy = asymptote_log(spec, scale)?;
        let ratio = (value.ln() - asy).exp();
        let deviation = (ratio - 1.0).norm();
        let window = &values[i.saturating_sub(2)..=i];
        let mut pts: Vec<(f64, f64)> =
            rows[i.saturating_sub(2)..].iter().map(|r| (r.scale.ln(), r.deviation.ln())).collect();
        pts.push((scale.ln(), deviation.ln()));
        let decay_exponent = (window.len() >= 2 && pts.iter().all(|p| p.1.is_finite())).then(|| slope(&pts));
        rows.push(ConvergenceRow { scale, value, asymptote: LogDet::from_ln(asy), ratio, deviation, decay_exponent });
    }
    Ok(rows)
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
