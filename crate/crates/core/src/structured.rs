//! Dense complex matrices, log-determinants, Toeplitz/Hankel sections and the
//! determinants D_n^±(β) = det[T_n(v_β) ± H_n(v_β)].

use crate::error::{Error, Result};
use crate::specfun::{c, ln_barnes_g, BetaContext, BetaParam};
use crate::symbols::{fourier_coeff_u, v_coeffs};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Index, IndexMut, Neg, Sub};

type C = Complex64;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![c(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<C>]) -> Self {
        let r = rows.len();
        let cc = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == cc), "ragged rows");
        Self { rows: r, cols: cc, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// I + s·self.
    pub fn identity_plus(&self, s: f64) -> Self {
        assert!(self.is_square());
        let mut m = self.clone();
        for z in m.data.iter_mut() {
            *z *= s;
        }
        for i in 0..self.rows {
            m[(i, i)] += 1.0;
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, a) in self.row(i).iter().enumerate() {
                if *a == c(0.0, 0.0) {
                    continue;
                }
                for (o, b) in orow.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Symmetric permutation P A Pᵀ with `perm[i]` the source index of row/column i.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert!(self.is_square() && perm.len() == self.rows);
        Self::from_fn(self.rows, self.cols, |i, j| self[(perm[i], perm[j])])
    }

    pub fn max_abs_asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..i {
                m = m.max((self[(i, j)] - self[(j, i)]).norm());
            }
        }
        m
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.cols + j]
    }
}

/// log det = ln_abs + i·arg, with arg accumulated rather than reduced mod 2π.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LogDet {
    pub ln_abs: f64,
    pub arg: f64,
}

impl LogDet {
    pub const ZERO: LogDet = LogDet { ln_abs: 0.0, arg: 0.0 };

    pub fn from_ln(z: C) -> Self {
        Self { ln_abs: z.re, arg: z.im }
    }

    pub fn ln(self) -> C {
        c(self.ln_abs, self.arg)
    }

    /// The determinant itself; overflows for large |ln_abs|.
    pub fn value(self) -> C {
        self.ln().exp()
    }

    /// |exp(self − other) − 1|: branch-insensitive relative distance.
    pub fn rel_gap(self, other: LogDet) -> f64 {
        let d = self.ln() - other.ln();
        if d.re > 700.0 {
            return f64::INFINITY;
        }
        (d.exp() - 1.0).norm()
    }

    pub fn is_finite(self) -> bool {
        self.ln_abs.is_finite() && self.arg.is_finite()
    }
}

impl Add for LogDet {
    type Output = LogDet;
    fn add(self, o: LogDet) -> LogDet {
        LogDet { ln_abs: self.ln_abs + o.ln_abs, arg: self.arg + o.arg }
    }
}

impl AddAssign for LogDet {
    fn add_assign(&mut self, o: LogDet) {
        *self = *self + o;
    }
}

impl Sub for LogDet {
    type Output = LogDet;
    fn sub(self, o: LogDet) -> LogDet {
        LogDet { ln_abs: self.ln_abs - o.ln_abs, arg: self.arg - o.arg }
    }
}

impl Neg for LogDet {
    type Output = LogDet;
    fn neg(self) -> LogDet {
        LogDet { ln_abs: -self.ln_abs, arg: -self.arg }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

const PIVOT_FLOOR: f64 = 1e-300;

/// LU factorization with partial pivoting, L unit lower triangular, stored in place.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<C>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn new(m: &DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Domain(format!("LU of a {}x{} matrix", m.rows, m.cols)));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("matrix entry".into()));
        }
        let n = m.rows;
        let mut a = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (mut p, mut best) = (k, a[k * n + k].norm());
            for i in k + 1..n {
                let v = a[i * n + k].norm();
                if v > best {
                    p = i;
                    best = v;
                }
            }
            if !(best >= PIVOT_FLOOR) {
                return Err(Error::SingularMatrix(best));
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot_inv = 1.0 / a[k * n + k];
            let (head, tail) = a.split_at_mut((k + 1) * n);
            let prow = &head[k * n + k + 1..k * n + n];
            for row in tail.chunks_exact_mut(n) {
                let f = row[k] * pivot_inv;
                row[k] = f;
                if f != c(0.0, 0.0) {
                    for (x, y) in row[k + 1..].iter_mut().zip(prow) {
                        *x -= f * y;
                    }
                }
            }
        }
        Ok(Self { n, lu: a, perm, swaps })
    }

    pub fn logdet(&self) -> LogDet {
        let mut ld = LogDet::ZERO;
        for k in 0..self.n {
            let p = self.lu[k * self.n + k];
            ld.ln_abs += p.norm().ln();
            ld.arg += p.arg();
        }
        if self.swaps % 2 == 1 {
            ld.arg += PI;
        }
        ld
    }

    /// Solve A x = b in place.
    pub fn solve_in_place(&self, b: &mut [C]) {
        let n = self.n;
        let mut x: Vec<C> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: C = row.iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: C = row.iter().zip(&x[i + 1..]).map(|(u, y)| u * y).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        b.copy_from_slice(&x);
    }

    /// Leading p×p block of A^{−1}.
    pub fn inverse_leading_block(&self, p: usize) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(p, p);
        let mut e = vec![c(0.0, 0.0); self.n];
        for j in 0..p {
            e.iter_mut().for_each(|z| *z = c(0.0, 0.0));
            e[j] = c(1.0, 0.0);
            self.solve_in_place(&mut e);
            for i in 0..p {
                out[(i, j)] = e[i];
            }
        }
        out
    }
}

pub fn logdet(m: &DenseMatrix) -> Result<LogDet> {
    if m.is_square() && m.is_finite() && m.data.iter().all(|z| z.im == 0.0) {
        return real_logdet(m.rows, m.data.iter().map(|z| z.re).collect());
    }
    Ok(Lu::new(m)?.logdet())
}

/// Partial-pivoting elimination in real arithmetic; arg gains π per negative pivot and per
/// odd permutation, as in the complex path.
fn real_logdet(n: usize, mut a: Vec<f64>) -> Result<LogDet> {
    let mut ld = LogDet::ZERO;
    let mut swaps = 0usize;
    for k in 0..n {
        let (mut p, mut best) = (k, a[k * n + k].abs());
        for i in k + 1..n {
            let v = a[i * n + k].abs();
            if v > best {
                p = i;
                best = v;
            }
        }
        if !(best >= PIVOT_FLOOR) {
            return Err(Error::SingularMatrix(best));
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            swaps += 1;
        }
        let pivot = a[k * n + k];
        ld.ln_abs += pivot.abs().ln();
        if pivot < 0.0 {
            ld.arg += PI;
        }
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let prow = &head[k * n + k + 1..k * n + n];
        for row in tail.chunks_exact_mut(n) {
            let f = row[k] / pivot;
            if f != 0.0 {
                for (x, y) in row[k + 1..].iter_mut().zip(prow) {
                    *x -= f * y;
                }
            }
        }
    }
    if swaps % 2 == 1 {
        ld.arg += PI;
    }
    Ok(ld)
}

/// T_n(a) = (a_{j−k}).
pub fn toeplitz(coeffs: impl Fn(i64) -> C, n: usize) -> DenseMatrix {
    let diag: Vec<C> = (-(n as i64) + 1..n as i64).map(&coeffs).collect();
    DenseMatrix::from_fn(n, n, |j, k| diag[(j as i64 - k as i64 + n as i64 - 1) as usize])
}

/// H_n(a) = (a_{j+k+1}).
pub fn hankel(coeffs: impl Fn(i64) -> C, n: usize) -> DenseMatrix {
    let anti: Vec<C> = (1..2 * n as i64).map(&coeffs).collect();
    DenseMatrix::from_fn(n, n, |j, k| anti[j + k])
}

fn check_matrix_route(beta: C) -> Result<()> {
    if beta.re <= -0.5 {
        Err(Error::Domain(format!("matrix route needs Re beta > -1/2, got {beta}")))
    } else {
        Ok(())
    }
}

/// T_n(v_β) ± H_n(v_β).
pub fn toeplitz_plus_hankel_v(beta: C, n: usize, sign: Sign) -> Result<DenseMatrix> {
    check_matrix_route(beta)?;
    let v = v_coeffs(beta, 2 * n)?;
    let s = sign.factor();
    Ok(DenseMatrix::from_fn(n, n, |j, k| v[j.abs_diff(k)] + s * v[j + k + 1]))
}

/// D_n^±(β) by LU of T_n(v_β) ± H_n(v_β).
pub fn d_n(beta: C, n: usize, sign: Sign) -> Result<LogDet> {
    logdet(&toeplitz_plus_hankel_v(beta, n, sign)?)
}

/// ln det T_n(v_β) by LU.
pub fn logdet_tn(beta: C, n: usize) -> Result<LogDet> {
    check_matrix_route(beta)?;
    let v = v_coeffs(beta, n)?;
    logdet(&DenseMatrix::from_fn(n, n, |j, k| v[j.abs_diff(k)]))
}

fn sum_lng(terms: &[(f64, C)]) -> Result<C> {
    let mut s = c(0.0, 0.0);
    for &(w, z) in terms {
        s += w * ln_barnes_g(z).map_err(|e| match e {
            Error::Zero(z) => Error::Domain(format!("Barnes G vanishes at {z}")),
            e => e,
        })?;
    }
    Ok(s)
}

/// D_n^±(β) from the exact Barnes-G product, valid on the continued domain.
pub fn d_n_exact(beta: C, n: usize, sign: Sign) -> Result<LogDet> {
    let ctx = match sign {
        Sign::Plus => BetaContext::DiscretePlus,
        Sign::Minus => BetaContext::DiscreteMinus,
    };
    BetaParam::new(beta, ctx)?;
    let b = beta;
    let nf = n as f64;
    let pre = 0.5 * b * (2.0 * PI).ln() - 0.5 * b * b * 2f64.ln();
    let (g0, g0b, top_half, b_half) = match sign {
        Sign::Plus => (0.5, 0.5, 1.5, 0.5),
        Sign::Minus => (1.5, 1.5, 0.5, 1.5),
    };
    let s = sum_lng(&[
        (1.0, c(g0, 0.0)),
        (-1.0, g0b + b),
        (1.0, c(nf + top_half, 0.0)),
        (1.0, c(nf + 1.0, 0.0)),
        (1.0, nf + 1.0 + b),
        (1.0, nf + b_half + b),
        (-1.0, nf + 0.5 + 0.5 * b),
        (-2.0, nf + 1.0 + 0.5 * b),
        (-1.0, nf + 1.5 + 0.5 * b),
    ])?;
    Ok(LogDet::from_ln(pre + s))
}

/// det T_n(v_β) = G(1+β)²/G(1+2β) · G(1+n)G(1+2β+n)/G(1+β+n)².
pub fn det_tn_exact(beta: C, n: usize) -> Result<LogDet> {
    let b = beta;
    let nf = n as f64;
    Ok(LogDet::from_ln(sum_lng(&[
        (2.0, 1.0 + b),
        (-1.0, 1.0 + 2.0 * b),
        (1.0, c(1.0 + nf, 0.0)),
        (1.0, 1.0 + 2.0 * b + nf),
        (-2.0, 1.0 + b + nf),
    ])?))
}

/// Finite-section estimate of det P_n (I ± H(u_{−β}))^{−1} P_n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionEstimate {
    pub trunc: usize,
    pub at_n: LogDet,
    pub at_2n: LogDet,
    /// Richardson extrapolation assuming an error ∝ N^{−p}, p = 1 + 2 Re(±β).
    pub extrapolated: LogDet,
    pub order: f64,
    /// |ln det(2N) − ln det(N)|.
    pub change: f64,
}

impl SectionEstimate {
    /// The extrapolated value, or a convergence error if the N → 2N change exceeds `tol`.
    pub fn checked(&self, tol: f64) -> Result<LogDet> {
        if self.change > tol {
            Err(Error::Convergence { change: self.change, tol })
        } else {
            Ok(self.extrapolated)
        }
    }
}

pub fn default_trunc(n: usize) -> usize {
    512.max(8 * n)
}

fn section_inverse_logdet(coeffs: &[C], n: usize, trunc: usize, sign: Sign) -> Result<LogDet> {
    let s = sign.factor();
    let a = DenseMatrix::from_fn(trunc, trunc, |j, k| {
        let d = if j == k { 1.0 } else { 0.0 };
        c(d, 0.0) + s * coeffs[j + k + 1]
    });
    logdet(&Lu::new(&a)?.inverse_leading_block(n))
}

/// det P_n (I ± H(u_{−β}))^{−1} P_n from the N×N and 2N×2N sections of I ± H(u_{−β}).
pub fn hankel_section_inverse_det(beta: C, n: usize, sign: Sign, trunc: usize) -> Result<SectionEstimate> {
    if trunc < 4 * n {
        return Err(Error::Domain(format!("truncation {trunc} must be at least 4n = {}", 4 * n)));
    }
    let bound_ok = match sign {
        Sign::Plus => beta.re > -0.5 && beta.re < 1.5,
        Sign::Minus => beta.re > -1.5 && beta.re < 0.5,
    };
    if !bound_ok {
        return Err(Error::Domain(format!("beta = {beta} outside the {sign:?} section strip")));
    }
    let coeffs: Vec<C> = (0..4 * trunc as i64 + 1).map(|k| fourier_coeff_u(-beta, k)).collect();
    let at_n = section_inverse_logdet(&coeffs, n, trunc, sign)?;
    let at_2n = section_inverse_logdet(&coeffs, n, 2 * trunc, sign)?;
    let d = at_2n.ln() - at_n.ln();
    // The symbol u_{−β} has a jump; the section error decays like N^{−(1 + 2 Re(±β))}.
    let order = (1.0 + 2.0 * sign.factor() * beta.re).max(0.1);
    Ok(SectionEstimate {
        trunc,
        at_n,
        at_2n,
        extrapolated: LogDet::from_ln(at_2n.ln() + d / (2f64.powf(order) - 1.0)),
        order,
        change: d.norm(),
    })
}

/// ln det(I ± H(u_{β,r})) = ±(β/2) ln((1−r)/(1+r)) + (β²/2) ln(1−r²).
pub fn hankel_reg_closed_form(beta: C, r: f64, sign: Sign) -> LogDet {
    let lr = ((1.0 - r) / (1.0 + r)).ln();
    let l2 = (-r * r).ln_1p();
    LogDet::from_ln(sign.factor() * 0.5 * beta * lr + 0.5 * beta * beta * l2)
}

/// Number of leading Hankel coefficients after which the tail |a_m| ≲ m^{|β|} r^m drops below 1e-17.
pub fn hankel_reg_trunc(beta: C, r: f64) -> usize {
    if r == 0.0 {
        return 1;
    }
    let mut m = 8usize;
    while (m as f64) * r.ln() + (beta.norm() + 1.0) * (m as f64).ln() > (1e-17f64).ln() {
        m = m * 9 / 8 + 1;
    }
    m
}

/// Coefficients (u_{β,r})_m for m = 0..len, by sampling the symbol on the circle and
/// taking a discrete Fourier transform. The symbol is analytic on r < |t| < 1/r, so the
/// aliasing error is of order r^{len_fft}.
pub fn u_reg_coeffs_fft(beta: C, r: f64, len: usize) -> Vec<C> {
    use rustfft::FftPlanner;
    let mut m = (2 * len).next_power_of_two().max(64);
    while (m as f64 - len as f64) * r.ln() > (1e-18f64).ln() {
        m *= 2;
    }
    let mut buf: Vec<C> = (0..m)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / m as f64;
            let t = C::from_polar(1.0, th);
            // (1 − r/t)^{−β}(1 − rt)^{β}
            (-beta * (1.0 - r / t).ln() + beta * (1.0 - r * t).ln()).exp()
        })
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    buf.truncate(len);
    buf.iter_mut().for_each(|z| *z *= scale);
    buf
}

/// ln det(I ± H(u_{β,r})) from the truncated section of the Hankel matrix.
pub fn fredholm_det_hankel_reg(beta: C, r: f64, sign: Sign, trunc: Option<usize>) -> Result<LogDet> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("r = {r} outside [0, 1)")));
    }
    if r == 0.0 || beta == c(0.0, 0.0) {
        return Ok(LogDet::ZERO);
    }
    let m = trunc.unwrap_or_else(|| hankel_reg_trunc(beta, r));
    let a = u_reg_coeffs_fft(beta, r, 2 * m + 2);
    logdet_identity_pm_hankel(&a[1..], sign, 1e-15)
}

/// ln det(I ± A) for the Hankel matrix A_{jk} = a[j+k], of size (a.len()+1)/2.
///
/// Small sections are factored densely. Large ones use a diagonally pivoted symmetric
/// low-rank factorization A ≈ L D Lᵀ, stopped when every residual diagonal entry is below
/// `tol`, and det(I ± L D Lᵀ) = det(I ± D LᵀL).
pub fn logdet_identity_pm_hankel(a: &[C], sign: Sign, tol: f64) -> Result<LogDet> {
    let m = a.len().div_ceil(2);
    let s = sign.factor();
    if m <= 1200 {
        let mat = DenseMatrix::from_fn(m, m, |j, k| {
            let d = if j == k { 1.0 } else { 0.0 };
            c(d, 0.0) + s * a[j + k]
        });
        return logdet(&mat);
    }
    let (cols, d) = low_rank_symmetric(m, |i, j| a[i + j], tol, 400)?;
    let k = cols.len();
    let core = DenseMatrix::from_fn(k, k, |p, q| {
        let g: C = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
        let id = if p == q { 1.0 } else { 0.0 };
        c(id, 0.0) + s * d[p] * g
    });
    logdet(&core)
}

/// Diagonally pivoted rank-revealing A ≈ Σ_p d_p l_p l_pᵀ for complex symmetric A.
fn low_rank_symmetric(
    m: usize,
    entry: impl Fn(usize, usize) -> C,
    tol: f64,
    max_rank: usize,
) -> Result<(Vec<Vec<C>>, Vec<C>)> {
    let mut diag: Vec<C> = (0..m).map(|i| entry(i, i)).collect();
    let mut cols: Vec<Vec<C>> = Vec::new();
    let mut d: Vec<C> = Vec::new();
    loop {
        let (p, best) =
            diag.iter()
                .enumerate()
                .map(|(i, z)| (i, z.norm()))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol {
            return Ok((cols, d));
        }
        if cols.len() == max_rank {
            return Err(Error::Convergence { change: best, tol });
        }
        let mut col: Vec<C> = (0..m).map(|i| entry(i, p)).collect();
        for (l, dl) in cols.iter().zip(&d) {
            let f = dl * l[p];
            for (x, y) in col.iter_mut().zip(l) {
                *x -= f * y;
            }
        }
        let piv = col[p];
        let dp = 1.0 / piv;
        for (z, x) in diag.iter_mut().zip(&col) {
            *z -= x * x * dp;
        }
        diag[p] = c(0.0, 0.0);
        cols.push(col);
        d.push(dp);
    }
}
