//! Gauss-Legendre and tanh-sinh rules.
//!
//! Every node carries its distances to both interval ends, computed without
//! cancellation, so integrands with algebraic endpoint factors can be evaluated
//! accurately right next to the endpoint.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss-Legendre nodes (ascending) and weights on [−1, 1].
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_m.
        let mut z = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if m == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = mf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if m == 1 {
            z = 0.0;
            dp = 1.0;
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

/// A node with its distances to the left and right interval ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub x: f64,
    pub from_a: f64,
    pub to_b: f64,
    pub w: f64,
}

/// Gauss-Legendre rule on the panel [a + lo, a + hi] of an interval [a, b] of length len.
pub fn gauss_panel(a: f64, len: f64, lo: f64, hi: f64, gx: &[f64], gw: &[f64], out: &mut Vec<Node>) {
    let half = 0.5 * (hi - lo);
    for (t, wt) in gx.iter().zip(gw) {
        let from_a = lo + half * (1.0 + t);
        let to_b = (len - hi) + half * (1.0 - t);
        out.push(Node { x: a + from_a, from_a, to_b, w: half * wt });
    }
}

/// Tanh-sinh nodes on [a, b] with step 2^{−level}; nodes whose endpoint distance
/// underflows or whose weight is negligible are dropped.
pub fn tanh_sinh(a: f64, b: f64, level: u32) -> Vec<Node> {
    let len = b - a;
    let h = 0.5f64.powi(level as i32);
    let mut out = Vec::new();
    let push_pair = |t: f64, out: &mut Vec<Node>| -> bool {
        let u = 0.5 * PI * t.sinh();
        // 1 − tanh(u) = 2 / (e^{2u} + 1)
        let e = (2.0 * u).exp();
        let near = len / (e + 1.0);
        let ch = u.cosh();
        let w = 0.5 * len * 0.5 * PI * t.cosh() / (ch * ch);
        if !(near > 1e-300) || !(w > 1e-300) || !w.is_finite() {
            return false;
        }
        let far = len - near;
        out.push(Node { x: b - near, from_a: far, to_b: near, w });
        out.push(Node { x: a + near, from_a: near, to_b: far, w });
        true
    };
    out.push(Node { x: a + 0.5 * len, from_a: 0.5 * len, to_b: 0.5 * len, w: 0.5 * len * 0.5 * PI });
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if !push_pair(t, &mut out) {
            break;
        }
        k += 1;
    }
    for n in out.iter_mut() {
        n.w *= h;
    }
    out.sort_by(|p, q| p.from_a.partial_cmp(&q.from_a).unwrap());
    out
}

/// Adaptive tanh-sinh: doubles the level until successive estimates agree to `tol`.
pub fn integrate_ts<F>(a: f64, b: f64, tol: f64, mut f: F) -> Result<Complex64>
where
    F: FnMut(&Node) -> Complex64,
{
    let mut prev: Option<Complex64> = None;
    for level in 2..=12 {
        let s: Complex64 = tanh_sinh(a, b, level).iter().map(|n| f(n) * n.w).sum();
        if let Some(p) = prev {
            if (s - p).norm() <= tol {
                return Ok(s);
            }
        }
        prev = Some(s);
    }
    Err(Error::QuadFailure(format!("tanh-sinh on [{a}, {b}] did not reach {tol:e}")))
}

/// Panel breakpoints (as offsets from a) geometrically refined toward both ends.
/// `levels_a` / `levels_b` halvings are applied to the first / last of `panels`
/// uniform panels.
pub fn graded_breaks(len: f64, panels: usize, levels_a: usize, levels_b: usize) -> Vec<f64> {
    let panels = panels.max(1);
    let h = len / panels as f64;
    let mut br = vec![0.0];
    for j in (1..=levels_a).rev() {
        br.push(h * 0.5f64.powi(j as i32));
    }
    for p in 1..panels {
        br.push(h * p as f64);
    }
    for j in 1..=levels_b {
        br.push(len - h * 0.5f64.powi(j as i32));
    }
    br.push(len);
    br.dedup_by(|x, y| (*x - *y).abs() <= 0.0);
    br
}

/// Composite Gauss rule on [a, b] over the given breakpoints (offsets from a).
pub fn composite_gauss(a: f64, b: f64, breaks: &[f64], m: usize) -> Vec<Node> {
    let (gx, gw) = gauss_legendre(m);
    let len = b - a;
    let mut out = Vec::with_capacity(m * breaks.len());
    for win in breaks.windows(2) {
        gauss_panel(a, len, win[0], win[1], &gx, &gw, &mut out);
    }
    out
}

/// Composite rule on [a, b] for integrands with algebraic endpoint singularities:
/// Gauss panels over the graded breaks, tanh-sinh on the two end panels.
pub fn singular_composite(a: f64, b: f64, breaks: &[f64], m: usize, ts_level: u32) -> Vec<Node> {
    let (gx, gw) = gauss_legendre(m);
    let len = b - a;
    let np = breaks.len() - 1;
    let mut out = Vec::new();
    for (p, win) in breaks.windows(2).enumerate() {
        let (lo, hi) = (win[0], win[1]);
        if p == 0 || p + 1 == np {
            for n in tanh_sinh(0.0, hi - lo, ts_level) {
                let (from_a, to_b) = if p == 0 { (n.from_a, (len - hi) + n.to_b) } else { (lo + n.from_a, n.to_b) };
                out.push(Node { x: a + from_a, from_a, to_b, w: n.w });
            }
        } else {
            gauss_panel(a, len, lo, hi, &gx, &gw, &mut out);
        }
    }
    out
}
