use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use wienerdet::asymptotics::{asymptote_log, convergence_table, ln_c_beta, AsymptoteKind, AsymptoteSpec};
use wienerdet::fredholm::{
    family_rule, fredholm_logdet, nystrom, quotient_identity, shifted_hankel_logdet, KernelSpec, RuleKnobs,
};
use wienerdet::structured::{d_n, d_n_exact, det_tn_exact, fredholm_det_hankel_reg, hankel_reg_closed_form, logdet_tn};
use wienerdet::symbols::LineSymbol;
use wienerdet::wienerhopf::{det_w2r, det_wr_pm_hr, ln_akhiezer_kac_e, TruncatedWH, WhKnobs};
use wienerdet::{Complex64, DenseMatrix, LogDet, Result, Sign};

use crate::config::{Beta, Command, RunConfig};

type C = Complex64;

/// One line of every table; the field names are the CSV header.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Row {
    pub scale: f64,
    pub value_ln_abs: f64,
    pub value_arg: f64,
    pub asymptote_ln_abs: f64,
    pub asymptote_arg: f64,
    pub ratio_abs: f64,
    pub deviation: f64,
}

impl Row {
    fn compare(scale: f64, value: LogDet, reference: LogDet) -> Self {
        Self {
            scale,
            value_ln_abs: value.ln_abs,
            value_arg: value.arg,
            asymptote_ln_abs: reference.ln_abs,
            asymptote_arg: reference.arg,
            ratio_abs: (value.ln_abs - reference.ln_abs).exp(),
            deviation: value.rel_gap(reference),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstRow {
    pub name: &'static str,
    pub beta_re: f64,
    pub beta_im: f64,
    pub ln_re: f64,
    pub ln_im: f64,
    pub value_re: f64,
    pub value_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub check: String,
    pub beta_re: f64,
    pub beta_im: f64,
    pub scale: f64,
    pub deviation: f64,
    pub tol: f64,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rows {
    Table(Vec<Row>),
    Constants(Vec<ConstRow>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Rows,
    pub violations: Vec<Violation>,
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        Command::Verify => verify(cfg),
        Command::SweepDiscrete | Command::SweepContinuous | Command::SechLab => sweep(cfg),
        Command::Constants => constants(cfg),
    }
}

fn wh_knobs(cfg: &RunConfig) -> WhKnobs {
    WhKnobs { nodes: cfg.nodes, panels: cfg.panels, ..WhKnobs::default() }
}

fn sign_name(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "plus",
        Sign::Minus => "minus",
    }
}

// ---------------------------------------------------------------- verify

type Pair = Box<dyn Fn() -> Result<(LogDet, LogDet)> + Send + Sync>;

struct Item {
    check: String,
    beta: Beta,
    scale: f64,
    tol: f64,
    eval: Pair,
}

const QUOTIENT_MATRICES: usize = 100;

fn random_matrices(seed: u64) -> Vec<(DenseMatrix, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..QUOTIENT_MATRICES)
        .map(|_| {
            let d = rng.gen_range(2..=12);
            let p = rng.gen_range(0..=d);
            let scale = 1.0 / d as f64;
            let a =
                DenseMatrix::from_fn(d, d, |_, _| C::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)) * scale);
            (a, p)
        })
        .collect()
}

fn verify_items(cfg: &RunConfig) -> Vec<Item> {
    let tol = |default: f64| cfg.tol.unwrap_or(default);
    let mut items = Vec::new();
    let none = Beta { re: 0.0, im: 0.0 };
    for (k, (a, p)) in random_matrices(cfg.seed).into_iter().enumerate() {
        items.push(Item {
            check: "quotient".into(),
            beta: none,
            scale: (k + 1) as f64,
            tol: tol(1e-11),
            eval: Box::new(move || quotient_identity(&a, p)),
        });
    }
    let knobs = wh_knobs(cfg);
    for &beta in &cfg.betas {
        let b = beta.value();
        for s in [Sign::Plus, Sign::Minus] {
            for &n in &cfg.ns {
                items.push(Item {
                    check: format!("d_n_{}", sign_name(s)),
                    beta,
                    scale: n as f64,
                    tol: tol(1e-8),
                    eval: Box::new(move || Ok((d_n(b, n, s)?, d_n_exact(b, n, s)?))),
                });
            }
        }
        for &n in &cfg.ns {
            items.push(Item {
                check: "t_n".into(),
                beta,
                scale: n as f64,
                tol: tol(1e-9),
                eval: Box::new(move || Ok((logdet_tn(b, n)?, det_tn_exact(b, n)?))),
            });
        }
        for &n in &cfg.ns {
            items.push(Item {
                check: "t_2n_block".into(),
                beta,
                scale: n as f64,
                tol: tol(1e-9),
                eval: Box::new(move || Ok((logdet_tn(b, 2 * n)?, d_n(b, n, Sign::Plus)? + d_n(b, n, Sign::Minus)?))),
            });
        }
        let trunc = cfg.trunc_n;
        for s in [Sign::Plus, Sign::Minus] {
            for r in [0.5, 0.8, 0.95] {
                items.push(Item {
                    check: format!("hankel_reg_{}", sign_name(s)),
                    beta,
                    scale: r,
                    tol: tol(1e-8),
                    eval: Box::new(move || {
                        Ok((fredholm_det_hankel_reg(b, r, s, trunc)?, hankel_reg_closed_form(b, r, s)))
                    }),
                });
            }
        }
        for &eps in &cfg.eps {
            for s in [Sign::Plus, Sign::Minus] {
                for n in [2, 4, 8] {
                    items.push(Item {
                        check: format!("shifted_hankel_{}_eps{eps:e}", sign_name(s)),
                        beta,
                        scale: n as f64,
                        tol: tol(1e-6),
                        eval: Box::new(move || {
                            let spec = KernelSpec::keps_n(b, eps, n)?;
                            let op = nystrom(&spec, &family_rule(&spec, RuleKnobs::default())?)?;
                            Ok((shifted_hankel_logdet(b, eps, n, s)?, fredholm_logdet(&op, s)?))
                        }),
                    });
                }
            }
            for &r_len in &cfg.scales {
                items.push(Item {
                    check: format!("w2r_eps{eps:e}"),
                    beta,
                    scale: r_len,
                    tol: tol(1e-6),
                    eval: Box::new(move || {
                        let sym = LineSymbol::vhat_eps(b, eps)?;
                        let half = |s| det_wr_pm_hr(&TruncatedWH::new(sym.clone(), r_len, s, knobs)?);
                        Ok((half(Sign::Plus)? + half(Sign::Minus)?, det_w2r(&sym, 2.0 * r_len, knobs)?))
                    }),
                });
            }
        }
    }
    items
}

fn verify(cfg: &RunConfig) -> Result<Report> {
    let items = verify_items(cfg);
    let pairs: Vec<(LogDet, LogDet)> = items.par_iter().map(|it| (it.eval)()).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(items.len());
    let mut violations = Vec::new();
    let mut summary: Vec<(String, Beta, f64, f64)> = Vec::new();
    for (it, (value, reference)) in items.iter().zip(pairs) {
        let row = Row::compare(it.scale, value, reference);
        // NaN deviations count as violations
        if !(row.deviation <= it.tol) {
            violations.push(Violation {
                check: it.check.clone(),
                beta_re: it.beta.re,
                beta_im: it.beta.im,
                scale: it.scale,
                deviation: row.deviation,
                tol: it.tol,
                reason: "identity residual above tolerance",
            });
        }
        match summary.last_mut() {
            Some((c, b, worst, _)) if *c == it.check && *b == it.beta => *worst = worst.max(row.deviation),
            _ => summary.push((it.check.clone(), it.beta, row.deviation, it.tol)),
        }
        rows.push(row);
    }
    for (check, beta, worst, tol) in summary {
        let verdict = if worst <= tol { "ok" } else { "VIOLATION" };
        eprintln!("{check:<32} beta={beta:<12} max deviation {worst:.3e} (tol {tol:.0e}) {verdict}");
    }
    Ok(Report { rows: Rows::Table(rows), violations })
}

// ---------------------------------------------------------------- sweeps

type Point = Box<dyn Fn(f64) -> Result<LogDet> + Send + Sync>;

struct Block {
    label: String,
    beta: Beta,
    spec: AsymptoteSpec,
    scales: Vec<f64>,
    eval: Point,
}

fn sweep_blocks(cfg: &RunConfig) -> Result<(Vec<Block>, f64)> {
    let knobs = wh_knobs(cfg);
    let mut blocks = Vec::new();
    let default_tol = match cfg.command {
        Command::SechLab => 0.02,
        _ => 0.05,
    };
    for &beta in &cfg.betas {
        let b = beta.value();
        match cfg.command {
            Command::SweepDiscrete => {
                for s in cfg.sign.signs() {
                    let kind = if s == Sign::Plus { AsymptoteKind::DiscretePlus } else { AsymptoteKind::DiscreteMinus };
                    blocks.push(Block {
                        label: format!("discrete_{}", sign_name(s)),
                        beta,
                        spec: AsymptoteSpec::new(kind, b)?,
                        scales: cfg.ns.iter().map(|&n| n as f64).collect(),
                        eval: Box::new(move |n| d_n(b, n as usize, s)),
                    });
                }
            }
            Command::SweepContinuous => {
                for s in cfg.sign.signs() {
                    let kind = if s == Sign::Plus { AsymptoteKind::ThmMainPlus } else { AsymptoteKind::ThmMainMinus };
                    for &eps in &cfg.eps {
                        let sym = LineSymbol::vhat_eps(b, eps)?;
                        blocks.push(Block {
                            label: format!("continuous_{}_eps{eps:e}", sign_name(s)),
                            beta,
                            spec: AsymptoteSpec::new(kind, b)?.with_eps(eps)?,
                            scales: cfg.scales.clone(),
                            eval: Box::new(move |r| det_wr_pm_hr(&TruncatedWH::new(sym.clone(), r, s, knobs)?)),
                        });
                    }
                }
            }
            Command::SechLab => {
                let sym = LineSymbol::phi(b)?;
                blocks.push(Block {
                    label: "sech".into(),
                    beta,
                    spec: AsymptoteSpec::new(AsymptoteKind::SechLemma, b)?,
                    scales: cfg.scales.clone(),
                    eval: Box::new(move |s| det_w2r(&sym, s, knobs)),
                });
            }
            _ => unreachable!("not a sweep"),
        }
    }
    Ok((blocks, cfg.tol.unwrap_or(default_tol)))
}

fn sweep(cfg: &RunConfig) -> Result<Report> {
    let (blocks, tol) = sweep_blocks(cfg)?;
    let points: Vec<(usize, f64)> =
        blocks.iter().enumerate().flat_map(|(i, b)| b.scales.iter().map(move |&s| (i, s))).collect();
    // collect() keeps input order, so rows come out ordered by scale within each block
    let values: Vec<LogDet> = points.par_iter().map(|&(i, s)| (blocks[i].eval)(s)).collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut offset = 0;
    for block in &blocks {
        let m = block.scales.len();
        let vals: Vec<(f64, LogDet)> =
            block.scales.iter().copied().zip(values[offset..offset + m].iter().copied()).collect();
        offset += m;
        let table = convergence_table(&vals, &block.spec)?;
        let mut violate = |scale: f64, deviation: f64, reason| {
            violations.push(Violation {
                check: block.label.clone(),
                beta_re: block.beta.re,
                beta_im: block.beta.im,
                scale,
                deviation,
                tol,
                reason,
            })
        };
        for w in table.windows(2) {
            if !(w[1].deviation < w[0].deviation) {
                violate(w[1].scale, w[1].deviation, "deviation not strictly decreasing");
            }
        }
        if let Some(last) = table.last() {
            if !(last.deviation <= tol) {
                violate(last.scale, last.deviation, "final deviation above tolerance");
            }
            let fit = last.decay_exponent.map_or("n/a".to_string(), |p| format!("{p:.3}"));
            eprintln!(
                "{:<28} beta={:<12} final deviation {:.3e} at {} (tol {tol:.0e}), fitted decay exponent {fit}",
                block.label, block.beta, last.deviation, last.scale
            );
        }
        rows.extend(table.iter().map(|r| Row {
            scale: r.scale,
            value_ln_abs: r.value.ln_abs,
            value_arg: r.value.arg,
            asymptote_ln_abs: r.asymptote.ln_abs,
            asymptote_arg: r.asymptote.arg,
            ratio_abs: r.ratio.norm(),
            deviation: r.deviation,
        }));
    }
    Ok(Report { rows: Rows::Table(rows), violations })
}

// ---------------------------------------------------------------- constants

fn const_row(name: &'static str, beta: Beta, ln: C) -> ConstRow {
    let v = ln.exp();
    ConstRow { name, beta_re: beta.re, beta_im: beta.im, ln_re: ln.re, ln_im: ln.im, value_re: v.re, value_im: v.im }
}

/// The factor left after removing the exponential and power-of-scale parts of an asymptote.
fn asymptotic_constant(kind: AsymptoteKind, b: C) -> Result<C> {
    use AsymptoteKind::*;
    let at_one = asymptote_log(&AsymptoteSpec::new(kind, b)?, 1.0)?;
    let rate = match kind {
        ThmMainPlus | ThmMainMinus | W2Rcont => -b,
        SechLemma => -(0.5 * b + 0.5 * b * b),
        _ => C::new(0.0, 0.0),
    };
    Ok(at_one - rate)
}

fn constants(cfg: &RunConfig) -> Result<Report> {
    use AsymptoteKind::*;
    let kinds = [
        ("thm_main_plus", ThmMainPlus),
        ("thm_main_minus", ThmMainMinus),
        ("discrete_plus", DiscretePlus),
        ("discrete_minus", DiscreteMinus),
        ("w2r_cont", W2Rcont),
        ("t2n_discrete", T2nDiscrete),
        ("sech_lemma", SechLemma),
    ];
    let mut rows = Vec::new();
    for &beta in &cfg.betas {
        let b = beta.value();
        rows.push(const_row("akhiezer_kac_e", beta, ln_akhiezer_kac_e(b)?));
        rows.push(const_row("c_beta", beta, ln_c_beta(b)?));
        for (name, kind) in kinds {
            rows.push(const_row(name, beta, asymptotic_constant(kind, b)?));
        }
    }
    Ok(Report { rows: Rows::Constants(rows), violations: Vec::new() })
}
