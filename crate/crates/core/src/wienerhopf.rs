//! Truncated Wiener-Hopf operators W_R(a) and W_R(a) ± H_R(a) on [0, R], discretized
//! by Nyström on a panel rule, plus the geometric mean and Akhiezer-Kac constant.
//!
//! The convolution kernels have a corner (or, for one-sided kernels, a jump) at the
//! origin. On the panel hosting x_i the row is integrated separately on both sides of
//! x_i and mapped back to the panel nodes by Lagrange interpolation, which keeps the
//! panel rule at full order. The Hankel part k(x + y) is smooth on the square and is
//! discretized plainly.

use crate::error::{Error, Result};
use crate::fredholm::{gauss_rule, Grading, QuadRule};
use crate::quad::{gauss_legendre, graded_breaks, integrate_ts, Node};
use crate::specfun::{c, ln_barnes_g, BetaContext, BetaParam};
use crate::structured::{logdet, DenseMatrix, LogDet, Sign};
use crate::symbols::{cut_nodes, eval_line, phi_kernel, rpow, sin_pi, ContourKernel, LineKind, LineSymbol};
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

/// Convolution kernel k with a(ξ) − 1 = ∫ k(x) e^{iξx} dx.
#[derive(Debug, Clone)]
pub enum LineKernel {
    Zero,
    Sech { beta: C },
    Contour(ContourKernel),
}

impl LineKernel {
    pub fn for_symbol(s: &LineSymbol) -> Result<Self> {
        if s.beta == c(0.0, 0.0) && s.kind != LineKind::Custom {
            return Ok(Self::Zero);
        }
        match s.kind {
            LineKind::PhiBeta => Ok(Self::Sech { beta: s.beta }),
            LineKind::VhatBetaEps | LineKind::UhatBetaEps => Ok(Self::Contour(ContourKernel::new(s)?)),
            k => Err(Error::Domain(format!("{k:?} has no integrable kernel"))),
        }
    }

    /// Kernels of the factors a_±(x) = ((x ± εi)/(x ± i))^β of v̂_{β,ε} = a_− a_+.
    /// k_+ vanishes on x < 0 and k_− on x > 0.
    pub fn factor_pair(beta: C, eps: f64) -> Result<(Self, Self)> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain(format!("eps = {eps} outside (0, 1)")));
        }
        let pref = -sin_pi(beta) / PI;
        let nodes = cut_nodes(eps);
        let eta: Vec<f64> = nodes.iter().map(|n| n.x).collect();
        let w: Vec<C> = nodes.iter().map(|n| pref * rpow(n.from_a / n.to_b, beta) * n.w).collect();
        let zero = vec![c(0.0, 0.0); w.len()];
        let plus = ContourKernel { eta: eta.clone(), w_pos: w.clone(), w_neg: zero.clone() };
        let minus = ContourKernel { eta, w_pos: zero, w_neg: w };
        Ok((Self::Contour(minus), Self::Contour(plus)))
    }

    pub fn eval(&self, x: f64) -> C {
        match self {
            Self::Zero => c(0.0, 0.0),
            Self::Sech { beta } => phi_kernel(*beta, x),
            Self::Contour(k) => k.eval(x),
        }
    }

    /// (k(0+) + k(0−))/2.
    pub fn diagonal_value(&self) -> C {
        match self {
            Self::Contour(k) => k.w_pos.iter().zip(&k.w_neg).map(|(p, q)| 0.5 * (p + q)).sum(),
            _ => self.eval(0.0),
        }
    }

    /// k(x_i − x_j), or k(x_i + x_j) when `sum`, for nonnegative x. Exponential sums are
    /// evaluated through the tables e^{∓η x_i} instead of per-pair exponentials.
    fn pair_matrix(&self, xs: &[f64], sum: bool) -> DenseMatrix {
        let n = xs.len();
        let xmax = xs.iter().fold(0.0f64, |a, &x| a.max(x));
        match self {
            Self::Contour(k) if xmax * k.eta.iter().fold(0.0f64, |a, &e| a.max(e)) < 300.0 => {
                let q = k.eta.len();
                let dec: Vec<f64> = xs.iter().flat_map(|&x| k.eta.iter().map(move |e| (-e * x).exp())).collect();
                let inc: Vec<f64> = xs.iter().flat_map(|&x| k.eta.iter().map(move |e| (e * x).exp())).collect();
                DenseMatrix::from_fn(n, n, |i, j| {
                    let (di, dj) = (&dec[i * q..(i + 1) * q], &dec[j * q..(j + 1) * q]);
                    let mut acc = c(0.0, 0.0);
                    if sum {
                        for ((w, a), b) in k.w_pos.iter().zip(di).zip(dj) {
                            acc += w * (a * b);
                        }
                    } else if xs[i] >= xs[j] {
                        for ((w, a), b) in k.w_pos.iter().zip(di).zip(&inc[j * q..(j + 1) * q]) {
                            acc += w * (a * b);
                        }
                    } else {
                        for ((w, a), b) in k.w_neg.iter().zip(dj).zip(&inc[i * q..(i + 1) * q]) {
                            acc += w * (a * b);
                        }
                    }
                    acc
                })
            }
            _ => DenseMatrix::from_fn(n, n, |i, j| self.eval(if sum { xs[i] + xs[j] } else { xs[i] - xs[j] })),
        }
    }

    fn reflected(&self) -> Self {
        match self {
            Self::Contour(k) => {
                Self::Contour(ContourKernel { eta: k.eta.clone(), w_pos: k.w_neg.clone(), w_neg: k.w_pos.clone() })
            }
            other => other.clone(),
        }
    }
}

/// Panel rule knobs for [0, R].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhKnobs {
    /// Gauss nodes per panel.
    pub nodes: usize,
    /// Uniform panels; `None` picks max(16, ⌈1.6 R⌉).
    pub panels: Option<usize>,
    /// Geometric halvings of the first panel toward 0.
    pub levels: usize,
}

impl Default for WhKnobs {
    fn default() -> Self {
        Self { nodes: 24, panels: None, levels: 4 }
    }
}

/// Composite Gauss rule on [0, R] graded toward 0.
pub fn wh_rule(r_len: f64, knobs: WhKnobs) -> Result<QuadRule> {
    if !(r_len > 0.0 && r_len.is_finite()) {
        return Err(Error::Domain(format!("R = {r_len} must be positive")));
    }
    let panels = knobs.panels.unwrap_or_else(|| 16.max((1.6 * r_len).ceil() as usize));
    if panels == 0 {
        return Err(Error::Domain("need at least one panel".into()));
    }
    gauss_rule(knobs.nodes, 0.0, r_len, Grading::Geometric { panels, levels_a: knobs.levels, levels_b: 0 })
}

/// Panel endpoints of a rule together with the node count per panel.
fn panels_of(rule: &QuadRule) -> Result<(Vec<(f64, f64)>, usize)> {
    let len = rule.b - rule.a;
    let br = match rule.grading {
        Grading::None => vec![0.0, len],
        Grading::Geometric { panels, levels_a, levels_b } => graded_breaks(len, panels, levels_a, levels_b),
    };
    let np = br.len() - 1;
    if !len.is_finite() || !rule.len().is_multiple_of(np) {
        return Err(Error::Domain("rule is not a finite composite Gauss rule".into()));
    }
    let spans = br.windows(2).map(|w| (rule.a + w[0], rule.a + w[1])).collect();
    Ok((spans, rule.len() / np))
}

/// Barycentric Lagrange basis on the Gauss-Legendre nodes of [−1, 1].
struct Lagrange {
    t: Vec<f64>,
    lam: Vec<f64>,
}

impl Lagrange {
    fn new(m: usize) -> Self {
        let (t, w) = gauss_legendre(m);
        let lam = t
            .iter()
            .zip(&w)
            .enumerate()
            .map(|(j, (t, w))| if j % 2 == 0 { 1.0 } else { -1.0 } * ((1.0 - t * t) * w).sqrt())
            .collect();
        Self { t, lam }
    }

    fn basis(&self, s: f64, out: &mut [f64]) {
        if let Some(j) = self.t.iter().position(|&tj| tj == s) {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[j] = 1.0;
            return;
        }
        let mut den = 0.0;
        for (o, (tj, lj)) in out.iter_mut().zip(self.t.iter().zip(&self.lam)) {
            *o = lj / (s - tj);
            den += *o;
        }
        out.iter_mut().for_each(|v| *v /= den);
    }
}

/// Corrected discretization of W_R(a) − I, symmetrically scaled as √w_i A_ij / √w_j,
/// together with its trace defect Σ_i (w_i k(0) − A_ii).
///
/// Off the host panel k(x_i − y) is analytic in y and plain Gauss is used. On the host
/// panel the corner at y = x_i is integrated exactly by splitting there and mapping
/// back to the panel nodes through the interpolant. That interpolation smears the
/// diagonal of the operator by O(h/m) per panel; the defect restores the trace, which
/// is the leading error of the logdet.
fn w_block(k: &LineKernel, rule: &QuadRule) -> Result<(DenseMatrix, C)> {
    let (spans, m) = panels_of(rule)?;
    let nodes = &rule.nodes;
    let n = nodes.len();
    let xs: Vec<f64> = nodes.iter().map(|q| q.x).collect();
    let sw: Vec<f64> = nodes.iter().map(|q| q.w.sqrt()).collect();
    let mut a = k.pair_matrix(&xs, false);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] *= sw[i] * sw[j];
        }
    }
    let lag = Lagrange::new(m);
    let (gt, gw) = gauss_legendre(m);
    let mut basis = vec![0.0; m];
    let mut row = vec![c(0.0, 0.0); m];
    let k0 = k.diagonal_value();
    let mut defect = c(0.0, 0.0);
    for i in 0..n {
        let p = i / m;
        let (lo, hi) = spans[p];
        let xi = xs[i];
        row.iter_mut().for_each(|v| *v = c(0.0, 0.0));
        for (s0, s1) in [(lo, xi), (xi, hi)] {
            let half = 0.5 * (s1 - s0);
            for (t, w) in gt.iter().zip(&gw) {
                let y = s0 + half * (1.0 + t);
                let kv = k.eval(xi - y) * (half * w);
                lag.basis(2.0 * (y - lo) / (hi - lo) - 1.0, &mut basis);
                for (r, b) in row.iter_mut().zip(&basis) {
                    *r += kv * *b;
                }
            }
        }
        for (jj, r) in row.iter().enumerate() {
            let j = p * m + jj;
            a[(i, j)] = *r * (sw[i] / sw[j]);
        }
        defect += k0 * nodes[i].w - a[(i, i)];
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("Wiener-Hopf matrix entry".into()));
    }
    Ok((a, defect))
}

/// √w_i k(x_i + x_j) √w_j.
fn h_block(k: &LineKernel, rule: &QuadRule) -> DenseMatrix {
    let xs: Vec<f64> = rule.nodes.iter().map(|q| q.x).collect();
    let sw: Vec<f64> = rule.nodes.iter().map(|q| q.w.sqrt()).collect();
    let mut h = k.pair_matrix(&xs, true);
    let n = xs.len();
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] *= sw[i] * sw[j];
        }
    }
    h
}

fn check_kind(s: &LineSymbol) -> Result<()> {
    match s.kind {
        LineKind::VhatBetaEps | LineKind::UhatBetaEps | LineKind::PhiBeta => Ok(()),
        k => Err(Error::Domain(format!("no truncated Wiener-Hopf discretization for {k:?}"))),
    }
}

/// W_R(a) ± H_R(a) on [0, R].
#[derive(Debug, Clone)]
pub struct TruncatedWH {
    pub symbol: LineSymbol,
    pub r_len: f64,
    pub rule: QuadRule,
    pub sign: Sign,
}

impl TruncatedWH {
    pub fn new(symbol: LineSymbol, r_len: f64, sign: Sign, knobs: WhKnobs) -> Result<Self> {
        check_kind(&symbol)?;
        let rule = wh_rule(r_len, knobs)?;
        Ok(Self { symbol, r_len, rule, sign })
    }
}

/// ln det(W_R(a) ± H_R(a)).
pub fn det_wr_pm_hr(t: &TruncatedWH) -> Result<LogDet> {
    check_kind(&t.symbol)?;
    let k = LineKernel::for_symbol(&t.symbol)?;
    if matches!(k, LineKernel::Zero) {
        return Ok(LogDet::ZERO);
    }
    let (w, defect) = w_block(&k, &t.rule)?;
    let h = h_block(&k, &t.rule);
    let s = t.sign.factor();
    let n = w.rows();
    let m = DenseMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { 1.0 } else { 0.0 };
        d + w[(i, j)] + s * h[(i, j)]
    });
    Ok(logdet(&m)? + LogDet::from_ln(defect))
}

/// ln det W_{L}(a) on [0, L]. The nodes are L/2 ± t for the [0, L/2] rule of `knobs`,
/// so that for even kernels the matrix splits exactly into the two blocks W ± H on [0, L/2].
pub fn det_w2r(symbol: &LineSymbol, len: f64, knobs: WhKnobs) -> Result<LogDet> {
    check_kind(symbol)?;
    let k = LineKernel::for_symbol(symbol)?;
    det_w_reflected(&k, len, knobs)
}

fn det_w_reflected(k: &LineKernel, len: f64, knobs: WhKnobs) -> Result<LogDet> {
    if matches!(k, LineKernel::Zero) {
        return Ok(LogDet::ZERO);
    }
    let rule = wh_rule(0.5 * len, knobs)?;
    let n = rule.len();
    // Ordering: first the nodes L/2 − t_i, then L/2 + t_i.
    let kr = k.reflected();
    let (w_right, d_right) = w_block(k, &rule)?;
    let (w_left, d_left) = w_block(&kr, &rule)?;
    let h_rl = h_block(k, &rule); // rows right, columns left: k(t_i + t_j)
    let h_lr = h_block(&kr, &rule); // k(−t_i − t_j)
    let full = DenseMatrix::from_fn(2 * n, 2 * n, |a, b| {
        let d = if a == b { 1.0 } else { 0.0 };
        let v = match (a < n, b < n) {
            (true, true) => w_left[(a, b)],
            (true, false) => h_lr[(a, b - n)],
            (false, true) => h_rl[(a - n, b)],
            (false, false) => w_right[(a - n, b - n)],
        };
        d + v
    });
    Ok(logdet(&full)? + LogDet::from_ln(d_left + d_right))
}

/// ln det[W_R(a_−) W_R(a_+)] for the factors of v̂_{β,ε}, by the product of the two
/// discretized factors. Both factor kernels jump at the origin, so besides the defects of
/// the factors the trace of the product term K_− K_+ is restored too.
pub fn factor_product_logdet(beta: C, eps: f64, r_len: f64, knobs: WhKnobs) -> Result<LogDet> {
    let (km, kp) = LineKernel::factor_pair(beta, eps)?;
    let rule = wh_rule(r_len, knobs)?;
    let (am, dm) = w_block(&km, &rule)?;
    let (ap, dp) = w_block(&kp, &rule)?;
    let n = rule.len();
    let mut disc = c(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            disc += am[(i, j)] * ap[(j, i)];
        }
    }
    // tr K_− K_+ = ∫_0^R (R − u) k_+(u) k_−(−u) du
    let exact: C = rule.nodes.iter().map(|q| (r_len - q.x) * q.w * kp.eval(q.x) * km.eval(-q.x)).sum();
    Ok(logdet(&am.identity_plus(1.0))? + logdet(&ap.identity_plus(1.0))? + LogDet::from_ln(dm + dp + exact - disc))
}

/// ln G[a] = (1/2π) ∫ ln a(x) dx.
pub fn geometric_mean_log(symbol: &LineSymbol) -> Result<C> {
    let b = symbol.beta;
    match symbol.kind {
        LineKind::VhatBetaEps => return Ok(-b * (1.0 - symbol.eps)),
        LineKind::VhatBeta => return Ok(-b),
        LineKind::PhiBeta => return Ok(-(0.5 * b + 0.5 * b * b)),
        // ln û(−x) = −ln û(x)
        LineKind::UhatBeta | LineKind::UhatBetaEps => return Ok(c(0.0, 0.0)),
        _ => {}
    }
    // Fold x ↦ −x and map x = t/(1 − t) onto t ∈ (0, 1).
    let mut bad = None;
    let v = integrate_ts(0.0, 1.0, 1e-12, |n: &Node| {
        let x = n.from_a / n.to_b;
        if x > 1e100 {
            return c(0.0, 0.0);
        }
        let jac = 1.0 / (n.to_b * n.to_b);
        let f = match (eval_line(symbol, x), eval_line(symbol, -x)) {
            (Ok(p), Ok(q)) => (p.ln() + q.ln()) * jac,
            (Err(e), _) | (_, Err(e)) => {
                bad.get_or_insert(e);
                c(0.0, 0.0)
            }
        };
        if f.is_finite() {
            f
        } else {
            bad.get_or_insert(Error::Domain("log symbol is not integrable".into()));
            c(0.0, 0.0)
        }
    })
    .map_err(|e| Error::Domain(format!("log symbol is not integrable: {e}")))?;
    if let Some(e) = bad {
        return Err(e);
    }
    Ok(v / (2.0 * PI))
}

/// ln E[φ_β] for φ_β(ξ) = 1 − sin(πβ) sech(πξ), −3/2 < Re β < 1/2.
pub fn ln_akhiezer_kac_e(beta: C) -> Result<C> {
    BetaParam::new(beta, BetaContext::SechSymbol)?;
    let g = |z: C| ln_barnes_g(z);
    let h = 0.5 * beta;
    Ok(2.0 * (g(1.5 + h)? + g(1.0 + h)? + g(1.0 - h)? + g(0.5 - h)?)
        - g(c(0.5, 0.0))?
        - g(c(1.5, 0.0))?
        - g(1.5 + beta)?
        - g(0.5 - beta)?)
}

pub fn akhiezer_kac_e(beta: C) -> Result<C> {
    Ok(ln_akhiezer_kac_e(beta)?.exp())
}
