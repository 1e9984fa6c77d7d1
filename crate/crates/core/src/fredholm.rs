//! Quadrature rules, Nyström discretization of the Cauchy-type kernel family, and
//! Fredholm log-determinants det(I ± K).
//!
//! Several family kernels are displayed in a non-symmetric form such as
//! a(x) b(y) / (x + y). Their determinants equal those of the balanced kernel
//! √(ab)(x) √(ab)(y) / (x + y), which is what [`nystrom`] discretizes, so every
//! Nyström matrix is symmetric.

use crate::error::{Error, Result};
use crate::quad::{self, Node};
use crate::specfun::{c, BetaContext, BetaParam};
use crate::structured::{
    hankel_reg_closed_form, hankel_reg_trunc, logdet, logdet_identity_pm_hankel, u_reg_coeffs_fft, DenseMatrix, LogDet,
    Lu, Sign,
};
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grading {
    None,
    /// `panels` uniform panels, the first halved `levels_a` times toward a and the last
    /// `levels_b` times toward b.
    Geometric {
        panels: usize,
        levels_a: usize,
        levels_b: usize,
    },
}

/// Composite Gauss-Legendre rule on [a, b], with b = ∞ allowed via x = a/t.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<Node>,
    pub a: f64,
    pub b: f64,
    pub grading: Grading,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.x).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.w).collect()
    }

    pub fn integrate(&self, f: impl Fn(&Node) -> C) -> C {
        self.nodes.iter().map(|n| f(n) * n.w).sum()
    }
}

/// m-point Gauss-Legendre panels on [a, b], optionally graded toward the ends.
/// For b = ∞ (requires a > 0) a rule on t ∈ (0, 1/a] is mapped by x = 1/t; `levels_b`
/// then grades toward x = ∞.
pub fn gauss_rule(m: usize, a: f64, b: f64, grading: Grading) -> Result<QuadRule> {
    if m < 2 {
        return Err(Error::Domain(format!("need at least 2 nodes per panel, got {m}")));
    }
    if !(a < b) || !a.is_finite() {
        return Err(Error::Domain(format!("bad interval [{a}, {b}]")));
    }
    let breaks = |len: f64, flip: bool| match grading {
        Grading::None => vec![0.0, len],
        Grading::Geometric { panels, levels_a, levels_b } => {
            let (la, lb) = if flip { (levels_b, levels_a) } else { (levels_a, levels_b) };
            quad::graded_breaks(len, panels, la, lb)
        }
    };
    let nodes = if b.is_finite() {
        quad::composite_gauss(a, b, &breaks(b - a, false), m)
    } else {
        if a <= 0.0 {
            return Err(Error::Domain("[a, ∞) rules need a > 0".into()));
        }
        let tb = 1.0 / a;
        let mut out: Vec<Node> = quad::composite_gauss(0.0, tb, &breaks(tb, true), m)
            .into_iter()
            .map(|n| {
                let t = n.x;
                Node { x: 1.0 / t, from_a: n.to_b / (a * t), to_b: f64::INFINITY, w: n.w / (t * t) }
            })
            .collect();
        out.reverse();
        out
    };
    Ok(QuadRule { nodes, a, b, grading })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    K0,
    Kn,
    KhatR,
    KepsN,
    KhatEpsR,
    H0,
    Hbeta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub family: Family,
    pub beta: C,
    pub n: usize,
    pub r_len: f64,
    pub eps: f64,
}

impl KernelSpec {
    fn build(family: Family, beta: C, n: usize, r_len: f64, eps: f64) -> Result<Self> {
        BetaParam::new(beta, BetaContext::KernelFamily)?;
        if matches!(family, Family::KepsN | Family::KhatEpsR) && !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain(format!("eps = {eps} outside (0, 1)")));
        }
        if matches!(family, Family::KhatR | Family::KhatEpsR) && !(r_len >= 0.0 && r_len.is_finite()) {
            return Err(Error::Domain(format!("R = {r_len} must be finite and nonnegative")));
        }
        Ok(Self { family, beta, n, r_len, eps })
    }

    pub fn k0(beta: C) -> Result<Self> {
        Self::build(Family::K0, beta, 0, 0.0, 0.0)
    }
    pub fn kn(beta: C, n: usize) -> Result<Self> {
        Self::build(Family::Kn, beta, n, 0.0, 0.0)
    }
    pub fn khat_r(beta: C, r_len: f64) -> Result<Self> {
        Self::build(Family::KhatR, beta, 0, r_len, 0.0)
    }
    pub fn keps_n(beta: C, eps: f64, n: usize) -> Result<Self> {
        Self::build(Family::KepsN, beta, n, 0.0, eps)
    }
    pub fn khat_eps_r(beta: C, eps: f64, r_len: f64) -> Result<Self> {
        Self::build(Family::KhatEpsR, beta, 0, r_len, eps)
    }
    pub fn h0(beta: C) -> Result<Self> {
        Self::build(Family::H0, beta, 0, 0.0, 0.0)
    }
    pub fn hbeta(beta: C) -> Result<Self> {
        Self::build(Family::Hbeta, beta, 0, 0.0, 0.0)
    }

    /// The interval the family lives on.
    pub fn interval(&self) -> (f64, f64) {
        match self.family {
            Family::K0 | Family::Kn | Family::KhatR => (0.0, 1.0),
            Family::KepsN | Family::KhatEpsR => (self.eps, 1.0),
            Family::H0 | Family::Hbeta => (1.0, f64::INFINITY),
        }
    }

    /// −sin(πβ)/π.
    fn prefactor(&self) -> C {
        -(self.beta * PI).sin() / PI
    }

    /// ln of the one-variable factor attached to x, split as (left, right) so that the
    /// unbalanced kernel is left(x)·right(y) and the balanced form uses ½(left+right) on each side.
    fn log_factors(&self, x: &Node, a: f64) -> (C, C) {
        let b = self.beta;
        // ln((1−x)/(1+x)) from the exact distance to 1
        let ln_rho = || (x.to_b / (1.0 + x.x)).ln();
        match self.family {
            Family::K0 | Family::H0 => (c(0.0, 0.0), c(0.0, 0.0)),
            Family::Kn => {
                let lr = ln_rho();
                ((2.0 * self.n as f64 - 0.5 * b) * lr, -0.5 * b * lr)
            }
            Family::KhatR => {
                let lr = ln_rho();
                (-0.5 * b * lr - c(2.0 * self.r_len * x.x, 0.0), -0.5 * b * lr)
            }
            Family::KepsN | Family::KhatEpsR => {
                // F = (1+x)(x−ε)/((1−x)(x+ε)); x − ε measured from the rule's left end a.
                let xm = x.from_a + (a - self.eps);
                let ln_f = ((1.0 + x.x) * xm / (x.to_b * (x.x + self.eps))).ln();
                let half = 0.5 * b * ln_f;
                if self.family == Family::KepsN {
                    (half + c(2.0 * self.n as f64 * ln_rho(), 0.0), half)
                } else {
                    (half - c(2.0 * self.r_len * x.x, 0.0), half)
                }
            }
            Family::Hbeta => {
                let xm = x.from_a + (a - 1.0);
                let half = 0.5 * b * (xm / (x.x + 1.0)).ln();
                (half, half)
            }
        }
    }
}

fn check_inside(spec: &KernelSpec, a: f64, b: f64) -> Result<()> {
    let (lo, hi) = spec.interval();
    if a < lo || b > hi {
        return Err(Error::Domain(format!("rule on [{a}, {b}] leaves the family interval [{lo}, {hi}]")));
    }
    Ok(())
}

fn point_node(spec: &KernelSpec, x: f64) -> Result<Node> {
    let (lo, hi) = spec.interval();
    if !(x >= lo && x <= hi) {
        return Err(Error::Domain(format!("x = {x} outside [{lo}, {hi}]")));
    }
    let to_b = if spec.family == Family::H0 || spec.family == Family::Hbeta { f64::INFINITY } else { 1.0 - x };
    Ok(Node { x, from_a: x - lo, to_b, w: 0.0 })
}

fn finite_or_domain(z: C, what: &str) -> Result<C> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Domain(format!("{what} is not finite at this point")))
    }
}

/// The family kernel exactly as displayed (possibly non-symmetric).
pub fn kernel_eval(spec: &KernelSpec, x: f64, y: f64) -> Result<C> {
    let (nx, ny) = (point_node(spec, x)?, point_node(spec, y)?);
    if !(x + y > 0.0) {
        return Err(Error::Domain("x + y must be positive".into()));
    }
    let a = spec.interval().0;
    let (lx, _) = spec.log_factors(&nx, a);
    let (_, ry) = spec.log_factors(&ny, a);
    finite_or_domain(spec.prefactor() * (lx + ry).exp() / (x + y), "kernel")
}

/// The balanced symmetric kernel with the same Fredholm determinant.
pub fn kernel_eval_balanced(spec: &KernelSpec, x: f64, y: f64) -> Result<C> {
    let (nx, ny) = (point_node(spec, x)?, point_node(spec, y)?);
    let a = spec.interval().0;
    finite_or_domain(balanced(spec, &nx, &ny, a), "kernel")
}

fn balanced_half(spec: &KernelSpec, n: &Node, a: f64) -> C {
    let (l, r) = spec.log_factors(n, a);
    (0.5 * (l + r)).exp()
}

fn balanced(spec: &KernelSpec, x: &Node, y: &Node, a: f64) -> C {
    spec.prefactor() * balanced_half(spec, x, a) * balanced_half(spec, y, a) / (x.x + y.x)
}

/// Symmetrized Nyström discretization: entries √wᵢ k(xᵢ, xⱼ) √wⱼ.
#[derive(Debug, Clone)]
pub struct NystromOp {
    pub rule: QuadRule,
    pub matrix: DenseMatrix,
}

/// Nyström matrix of an arbitrary kernel given on nodes.
pub fn nystrom_fn(rule: &QuadRule, kernel: impl Fn(&Node, &Node) -> C) -> NystromOp {
    let sw: Vec<f64> = rule.nodes.iter().map(|n| n.w.sqrt()).collect();
    let matrix =
        DenseMatrix::from_fn(rule.len(), rule.len(), |i, j| sw[i] * kernel(&rule.nodes[i], &rule.nodes[j]) * sw[j]);
    NystromOp { rule: rule.clone(), matrix }
}

/// Nyström discretization of a family kernel; the rule may cover a subinterval of the
/// family interval (a compression Π K Π).
pub fn nystrom(spec: &KernelSpec, rule: &QuadRule) -> Result<NystromOp> {
    check_inside(spec, rule.a, rule.b)?;
    let a_fam = spec.interval().0;
    // Node distances are measured from the rule's end; shift them to the family's.
    let shift = rule.a - a_fam;
    let halves: Vec<C> = rule
        .nodes
        .iter()
        .map(|n| {
            let m = Node { from_a: n.from_a + shift, ..*n };
            balanced_half(spec, &m, a_fam)
        })
        .collect();
    let pre = spec.prefactor();
    let sw: Vec<f64> = rule.nodes.iter().map(|n| n.w.sqrt()).collect();
    let nn = rule.len();
    let matrix = DenseMatrix::from_fn(nn, nn, |i, j| {
        pre * halves[i] * halves[j] * (sw[i] * sw[j] / (rule.nodes[i].x + rule.nodes[j].x))
    });
    if !matrix.is_finite() {
        return Err(Error::NonFinite("Nyström matrix entry".into()));
    }
    Ok(NystromOp { rule: rule.clone(), matrix })
}

/// ln det(I ± K).
pub fn fredholm_logdet(op: &NystromOp, sign: Sign) -> Result<LogDet> {
    logdet(&op.matrix.identity_plus(sign.factor()))
}

/// Quadrature knobs for the family rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleKnobs {
    /// Gauss nodes per panel.
    pub nodes: usize,
    /// Uniform panels before grading.
    pub panels: usize,
    /// Extra halvings past the scale of ε (or of the interval) toward each end.
    pub depth: usize,
}

impl Default for RuleKnobs {
    fn default() -> Self {
        Self { nodes: 16, panels: 2, depth: 40 }
    }
}

/// Graded rule on [lo, 1] resolving the 1/(x+y) scale down to lo and algebraic factors at both ends.
pub fn graded_rule(lo: f64, knobs: RuleKnobs) -> Result<QuadRule> {
    let len = 1.0 - lo;
    let scale_levels = if lo > 0.0 { (len / lo).log2().ceil().max(0.0) as usize } else { 0 };
    gauss_rule(
        knobs.nodes,
        lo,
        1.0,
        Grading::Geometric { panels: knobs.panels, levels_a: scale_levels + knobs.depth, levels_b: knobs.depth },
    )
}

/// Default rule on the family interval.
pub fn family_rule(spec: &KernelSpec, knobs: RuleKnobs) -> Result<QuadRule> {
    let (a, b) = spec.interval();
    if b.is_finite() {
        graded_rule(a, knobs)
    } else {
        gauss_rule(
            knobs.nodes,
            a,
            b,
            Grading::Geometric { panels: knobs.panels, levels_a: knobs.depth, levels_b: knobs.depth },
        )
    }
}

/// ln det[P (I+A)^{−1} P] (as the leading p×p block) and ln det(I+QAQ) − ln det(I+A).
pub fn quotient_identity(a: &DenseMatrix, p: usize) -> Result<(LogDet, LogDet)> {
    let d = a.rows();
    if !a.is_square() || p > d {
        return Err(Error::Domain(format!("block size {p} for a {}x{} matrix", a.rows(), a.cols())));
    }
    let full = Lu::new(&a.identity_plus(1.0))?;
    let lhs = if p == 0 { LogDet::ZERO } else { logdet(&full.inverse_leading_block(p))? };
    let tail = if p == d { LogDet::ZERO } else { logdet(&a.block(p, p, d - p, d - p).identity_plus(1.0))? };
    Ok((lhs, tail - full.logdet()))
}

/// r = (1−ε)/(1+ε).
pub fn r_of_eps(eps: f64) -> f64 {
    (1.0 - eps) / (1.0 + eps)
}

/// ln det(I ± Q_n H(u_{β,r}) Q_n), the shifted Hankel matrix with entries (u_{β,r})_{j+k+1+2n},
/// truncated where its entries fall below the double-precision floor.
pub fn shifted_hankel_logdet(beta: C, eps: f64, n: usize, sign: Sign) -> Result<LogDet> {
    BetaParam::new(beta, BetaContext::KernelFamily)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps = {eps} outside (0, 1)")));
    }
    let r = r_of_eps(eps);
    let m = hankel_reg_trunc(beta, r);
    let off = 2 * n + 1;
    let coeffs = u_reg_coeffs_fft(beta, r, off + 2 * m);
    logdet_identity_pm_hankel(&coeffs[off..], sign, 1e-16)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Section {
    /// P_n on ℓ²: kernel K_{β,ε,n}.
    Discrete { n: usize },
    /// P_R on L²(ℝ₊): kernel K̂_{β,ε,R}.
    Continuous { r_len: f64 },
}

/// ln det[P (I ± H)^{−1} P] = ln det(I ± K) − ln det(I ± H(u_{β,r})), r = (1−ε)/(1+ε);
/// the Hankel determinant is taken in closed form.
pub fn finite_section_quotient(beta: C, sign: Sign, section: Section, eps: f64, knobs: RuleKnobs) -> Result<LogDet> {
    let spec = match section {
        Section::Discrete { n } => KernelSpec::keps_n(beta, eps, n)?,
        Section::Continuous { r_len } => KernelSpec::khat_eps_r(beta, eps, r_len)?,
    };
    let num = fredholm_logdet(&nystrom(&spec, &family_rule(&spec, knobs)?)?, sign)?;
    Ok(num - hankel_reg_closed_form(beta, r_of_eps(eps), sign))
}

/// Eigenvalues (ascending) of a real symmetric Nyström matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(op: &NystromOp) -> Result<Vec<f64>> {
    let n = op.matrix.rows();
    if op.matrix.as_slice().iter().any(|z| z.im != 0.0) || op.matrix.max_abs_asymmetry() > 1e-13 {
        return Err(Error::Domain("eigenvalues need a real symmetric matrix".into()));
    }
    let mut a: Vec<f64> = op.matrix.as_slice().iter().map(|z| z.re).collect();
    let total: f64 = a.iter().map(|x| x * x).sum();
    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum();
        if off <= 1e-30 * total {
            let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
            ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
            return Ok(ev);
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = cs * akp - sn * akq;
                    a[k * n + q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = cs * apk - sn * aqk;
                    a[q * n + k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    Err(Error::Convergence { change: f64::NAN, tol: 1e-15 })
}

/// Smallest and largest eigenvalue of a real symmetric Nyström matrix.
pub fn spectrum_estimate(op: &NystromOp) -> Result<(f64, f64)> {
    let ev = symmetric_eigenvalues(op)?;
    Ok((ev.first().copied().unwrap_or(0.0), ev.last().copied().unwrap_or(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gauss_rule_examples() {
        let r = gauss_rule(2, -1.0, 1.0, Grading::None).unwrap();
        assert!((r.nodes[0].x + 1.0 / 3f64.sqrt()).abs() < 1e-15 && (r.nodes[1].x - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((r.nodes[0].w - 1.0).abs() < 1e-15);
        let r = gauss_rule(4, 0.0, 1.0, Grading::None).unwrap();
        assert!((r.integrate(|n| c(n.x.powi(3), 0.0)).re - 0.25).abs() < 1e-14);
        let g = Grading::Geometric { panels: 4, levels_a: 10, levels_b: 30 };
        let r = gauss_rule(12, 1.0, f64::INFINITY, g).unwrap();
        assert!((r.integrate(|n| c(n.x.powi(-3), 0.0)).re - 0.5).abs() < 1e-10);
        assert!(r.nodes.windows(2).all(|p| p[0].x < p[1].x));
        assert!(gauss_rule(1, 0.0, 1.0, Grading::None).is_err());
    }

    #[test]
    fn graded_rule_invariants() {
        let r = graded_rule(1e-3, RuleKnobs::default()).unwrap();
        assert!(r.nodes.windows(2).all(|p| p[0].x < p[1].x));
        assert!(r.nodes.iter().all(|n| n.x > 1e-3 && n.x < 1.0));
        let sw: f64 = r.weights().iter().sum();
        assert!((sw - (1.0 - 1e-3)).abs() < 1e-12);
        // ∫_ε^1 (x−ε)^{−0.4} dx
        let v = r.integrate(|n| c(n.from_a.powf(-0.4), 0.0)).re;
        assert!((v - (1.0f64 - 1e-3).powf(0.6) / 0.6).abs() < 1e-9, "{v}");
    }

    #[test]
    fn kernel_eval_examples() {
        let k = KernelSpec::k0(c(0.0, 0.0)).unwrap();
        assert_eq!(kernel_eval(&k, 0.3, 0.7).unwrap(), c(0.0, 0.0));
        let k = KernelSpec::k0(c(0.5, 0.0)).unwrap();
        assert!((kernel_eval(&k, 0.5, 0.5).unwrap() - c(-1.0 / PI, 0.0)).norm() < 1e-15);
        // K_{β,ε,n} → K_{β,n} as ε → 0 at interior points
        let b = c(0.3, 0.1);
        let kn = kernel_eval(&KernelSpec::kn(b, 2).unwrap(), 0.3, 0.6).unwrap();
        let mut last = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6, 1e-8] {
            let ke = kernel_eval(&KernelSpec::keps_n(b, eps, 2).unwrap(), 0.3, 0.6).unwrap();
            let g = (ke - kn).norm();
            assert!(g < last);
            last = g;
        }
        assert!(last < 1e-7);
        assert!(matches!(
            kernel_eval(&KernelSpec::keps_n(c(-0.3, 0.0), 0.1, 1).unwrap(), 0.1, 0.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(kernel_eval(&k, 1.5, 0.5), Err(Error::Domain(_))));
        assert!(KernelSpec::k0(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn balanced_kernel_is_symmetric_diagonal_similarity() {
        let spec = KernelSpec::keps_n(c(0.2, -0.1), 0.01, 3).unwrap();
        let (x, y) = (0.2, 0.55);
        let kb = kernel_eval_balanced(&spec, x, y).unwrap();
        assert!((kb - kernel_eval_balanced(&spec, y, x).unwrap()).norm() < 1e-15);
        // k(x,y) k(y,x) is invariant under diagonal similarity
        let p = kernel_eval(&spec, x, y).unwrap() * kernel_eval(&spec, y, x).unwrap();
        assert!((p - kb * kb).norm() < 1e-14 * p.norm());
    }

    #[test]
    fn zero_beta_and_rank_one() {
        let spec = KernelSpec::keps_n(c(0.0, 0.0), 1e-2, 2).unwrap();
        let op = nystrom(&spec, &family_rule(&spec, RuleKnobs::default()).unwrap()).unwrap();
        assert!(op.matrix.as_slice().iter().all(|z| *z == c(0.0, 0.0)));
        assert_eq!(fredholm_logdet(&op, Sign::Plus).unwrap(), LogDet::ZERO);
        // k(x,y) = f(x) f(y): det(I + K) = 1 + ∫ f²
        let rule = gauss_rule(20, 0.0, 1.0, Grading::None).unwrap();
        let f = |x: f64| (1.0 + x).sqrt() * x.cos();
        let op = nystrom_fn(&rule, |p, q| c(f(p.x) * f(q.x), 0.0));
        let int_f2 = rule.integrate(|n| c(f(n.x).powi(2), 0.0)).re;
        // ∫_0^1 (1+x)cos²x dx in closed form
        let exact = 0.75 + 2.0f64.sin() / 2.0 + 2.0f64.cos() / 8.0 - 0.125;
        assert!((int_f2 - exact).abs() < 1e-12, "{int_f2} vs {exact}");
        let ld = fredholm_logdet(&op, Sign::Plus).unwrap();
        assert!((ld.value() - (1.0 + exact)).norm() < 1e-10);
    }

    #[test]
    fn k0_compression_is_stable_and_grows_at_kac_rate() {
        // K⁰ on [0,1] is not trace class: under x = e^{−s} it is the sech convolution on a
        // half-line. On [δ, 1] the determinant converges under node doubling, and each
        // halving of δ adds ln2 · (1/2π)∫ln(1 + sech πξ)dξ = ln2 / 8.
        let spec = KernelSpec::k0(c(0.5, 0.0)).unwrap();
        let ld = |delta: f64, nodes: usize| {
            let rule = graded_rule(delta, RuleKnobs { nodes, panels: 2, depth: 4 }).unwrap();
            let op = nystrom(&spec, &rule).unwrap();
            assert!(op.matrix.max_abs_asymmetry() < 1e-14);
            fredholm_logdet(&op, Sign::Minus).unwrap()
        };
        let a = ld(1e-6, 12);
        let b = ld(1e-6, 24);
        assert!(a.arg.abs() < 1e-12 && a.ln_abs > 0.0);
        assert!(a.rel_gap(b) < 1e-8, "{a:?} {b:?}");
        let deeper = ld(1e-6 / 16.0, 12);
        let growth = deeper.ln_abs - a.ln_abs;
        assert!((growth - 4.0 * 2f64.ln() / 8.0).abs() < 1e-6, "{growth}");
    }

    #[test]
    fn carleman_kernel_spectrum_in_unit_interval() {
        // −sin(πβ)/π = 1/π at β = −1/2
        let spec = KernelSpec::k0(c(-0.5, 0.0)).unwrap();
        let op = nystrom(&spec, &family_rule(&spec, RuleKnobs { nodes: 10, panels: 2, depth: 16 }).unwrap()).unwrap();
        assert!(op.matrix.rows() <= 400);
        let (lo, hi) = spectrum_estimate(&op).unwrap();
        assert!(lo >= -1e-8 && hi <= 1.0 + 1e-8, "[{lo}, {hi}]");
        assert!(hi > 0.5);
        // Jacobi oracle check: trace is preserved
        let ev = symmetric_eigenvalues(&op).unwrap();
        let tr: f64 = (0..op.matrix.rows()).map(|i| op.matrix[(i, i)].re).sum();
        assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-11);
    }

    #[test]
    fn quotient_identity_examples() {
        let z = DenseMatrix::zeros(5, 5);
        let (l, r) = quotient_identity(&z, 2).unwrap();
        assert_eq!((l, r), (LogDet::ZERO, LogDet::ZERO));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = DenseMatrix::from_fn(8, 8, |_, _| c(rng.gen_range(-0.06..0.06), rng.gen_range(-0.06..0.06)));
        let (l, r) = quotient_identity(&a, 3).unwrap();
        assert!((l.ln() - r.ln()).norm() < 1e-11);
        let (l, r) = quotient_identity(&a, 8).unwrap();
        let full = logdet(&a.identity_plus(1.0)).unwrap();
        assert!(l.rel_gap(-full) < 1e-13 && r.rel_gap(-full) < 1e-13);
    }

    #[test]
    fn prop_3_15_discrete_side_matches_nystrom() {
        for b in [0.2, -0.2] {
            for n in [2, 4] {
                let beta = c(b, 0.0);
                let eps = 1e-2;
                let spec = KernelSpec::keps_n(beta, eps, n).unwrap();
                let op = nystrom(&spec, &family_rule(&spec, RuleKnobs::default()).unwrap()).unwrap();
                for s in [Sign::Plus, Sign::Minus] {
                    let ny = fredholm_logdet(&op, s).unwrap();
                    let dis = shifted_hankel_logdet(beta, eps, n, s).unwrap();
                    assert!(ny.rel_gap(dis) < 1e-6, "b={b} n={n} {s:?}: {ny:?} {dis:?}");
                }
            }
        }
    }

    #[test]
    fn finite_section_quotient_examples() {
        let knobs = RuleKnobs::default();
        let z = finite_section_quotient(c(0.0, 0.0), Sign::Plus, Section::Discrete { n: 3 }, 1e-3, knobs).unwrap();
        assert!(z.rel_gap(LogDet::ZERO) < 1e-14);
        // Both routes approach their ε → 0 limits like ε^{1−2β}: successive decade
        // differences shrink by 10^{0.6} at β = 0.2.
        let (b, p) = (c(0.2, 0.0), 0.6);
        for section in [Section::Discrete { n: 4 }, Section::Continuous { r_len: 8.0 }] {
            let v: Vec<f64> = [1e-4, 1e-5, 1e-6]
                .iter()
                .map(|&e| finite_section_quotient(b, Sign::Plus, section, e, knobs).unwrap().ln_abs)
                .collect();
            let ratio = (v[1] - v[0]) / (v[2] - v[1]);
            assert!((ratio.log10() - p).abs() < 0.02, "{section:?}: {ratio}");
            if let Section::Discrete { n } = section {
                // ε-Richardson limit vs the ℓ² section route and the closed form, D_n^+(−β)
                let lim = v[2] + (v[2] - v[1]) / (10f64.powf(p) - 1.0);
                let est = crate::structured::hankel_section_inverse_det(-b, n, Sign::Plus, 512).unwrap();
                let exact = crate::structured::d_n_exact(-b, n, Sign::Plus).unwrap();
                assert!(LogDet::from_ln(c(lim, 0.0)).rel_gap(est.extrapolated) < 1e-3);
                assert!((lim - exact.ln_abs).abs() < 2e-4, "{lim} vs {exact:?}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn quotient_identity_random(seed in 0u64..10_000, d in 2usize..10, pf in 0.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = DenseMatrix::from_fn(d, d, |_, _| c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)) / d as f64);
            let p = ((pf * d as f64) as usize).min(d);
            let (l, r) = quotient_identity(&a, p).unwrap();
            prop_assert!((l.ln() - r.ln()).norm() < 1e-11);
        }

        #[test]
        fn logdet_invariant_under_node_permutation(seed in 0u64..1000, bi in 0usize..4) {
            let specs = [
                KernelSpec::k0(c(0.3, 0.0)).unwrap(),
                KernelSpec::kn(c(-0.2, 0.1), 2).unwrap(),
                KernelSpec::khat_eps_r(c(0.4, 0.0), 0.05, 2.0).unwrap(),
                KernelSpec::hbeta(c(0.25, 0.0)).unwrap(),
            ];
            let spec = specs[bi];
            let rule = family_rule(&spec, RuleKnobs { nodes: 6, panels: 2, depth: 6 }).unwrap();
            let op = nystrom(&spec, &rule).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut perm: Vec<usize> = (0..rule.len()).collect();
            for i in (1..perm.len()).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let mut shuffled = rule.clone();
            shuffled.nodes = perm.iter().map(|&i| rule.nodes[i]).collect();
            let op2 = nystrom(&spec, &shuffled).unwrap();
            for s in [Sign::Plus, Sign::Minus] {
                let a = fredholm_logdet(&op, s).unwrap();
                let b = fredholm_logdet(&op2, s).unwrap();
                prop_assert!(a.rel_gap(b) < 1e-12);
            }
        }
    }
}
