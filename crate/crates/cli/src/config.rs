use std::fmt;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use wienerdet::{BetaContext, BetaParam, Complex64, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Exact finite identities and closed-form cross-checks.
    Verify,
    /// det(T_n ± H_n)(v_β) against its large-n asymptote.
    SweepDiscrete,
    /// det(W_R ± H_R)(v̂_{β,ε}) against its large-R asymptote.
    SweepContinuous,
    /// det W_s(φ_β) against its Akhiezer-Kac asymptote.
    SechLab,
    /// E[φ_β], C_β and the constant factor of every asymptote.
    Constants,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignChoice {
    Plus,
    Minus,
    Both,
}

impl SignChoice {
    pub fn signs(self) -> Vec<Sign> {
        match self {
            SignChoice::Plus => vec![Sign::Plus],
            SignChoice::Minus => vec![Sign::Minus],
            SignChoice::Both => vec![Sign::Plus, Sign::Minus],
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wienerdet",
    version,
    about = "Wiener-Hopf-plus-Hankel and Toeplitz-plus-Hankel determinant laboratory"
)]
pub struct Args {
    #[arg(long, value_enum)]
    pub command: Command,
    /// Real part of β; repeat for several values.
    #[arg(long = "beta-re", allow_hyphen_values = true)]
    pub beta_re: Vec<f64>,
    /// Imaginary part of β, paired with --beta-re by position (all zero if omitted).
    #[arg(long = "beta-im", allow_hyphen_values = true)]
    pub beta_im: Vec<f64>,
    /// Matrix sizes, `a`, `a:b:step` or `a:b:xF` (geometric).
    #[arg(long = "n-range")]
    pub n_range: Option<String>,
    /// Lengths R (or s for sech-lab), same syntax as --n-range.
    #[arg(long = "r-range")]
    pub r_range: Option<String>,
    /// Regularization ε; repeat for a two-parameter table.
    #[arg(long)]
    pub eps: Vec<f64>,
    /// Uniform panels of the [0, R] rule (default max(16, ⌈1.6R⌉)).
    #[arg(long)]
    pub panels: Option<usize>,
    /// Gauss nodes per panel of the [0, R] rule.
    #[arg(long, default_value_t = 24)]
    pub nodes: usize,
    /// Hankel truncation size for the regularized Hankel determinant check.
    #[arg(long = "trunc-N")]
    pub trunc_n: Option<usize>,
    /// Seed of the random matrices in the quotient identity suite.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Override every tolerance of the command.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Which of det(· + ·) / det(· − ·) the sweeps compute.
    #[arg(long, value_enum, default_value_t = SignChoice::Plus)]
    pub sign: SignChoice,
    /// Output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Beta {
    pub re: f64,
    pub im: f64,
}

impl Beta {
    pub fn value(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.re, self.im)
    }
}

/// Fully resolved run configuration; serialized verbatim into JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub betas: Vec<Beta>,
    pub ns: Vec<usize>,
    pub scales: Vec<f64>,
    pub eps: Vec<f64>,
    pub panels: Option<usize>,
    pub nodes: usize,
    pub trunc_n: Option<usize>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub sign: SignChoice,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

const MAX_POINTS: usize = 10_000;

/// `a`, `a:b`, `a:b:step` or `a:b:xF`, inclusive of b up to rounding.
pub fn parse_range(s: &str) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| ConfigError(format!("bad number `{p}` in range `{s}`")));
    let (a, b) = match parts.len() {
        1 => {
            let a = num(parts[0])?;
            (a, a)
        }
        2 | 3 => (num(parts[0])?, num(parts[1])?),
        _ => return bad(format!("range `{s}` must look like a:b:step")),
    };
    if !(a.is_finite() && b.is_finite()) || a > b {
        return bad(format!("range `{s}` is empty"));
    }
    let slack = 1e-9 * b.abs().max(1.0);
    let mut out = vec![a];
    match parts.get(2) {
        None => {
            if b > a {
                out.push(b);
            }
        }
        Some(p) if p.starts_with('x') || p.starts_with('*') => {
            let f = num(&p[1..])?;
            if !(f > 1.0) || a <= 0.0 {
                return bad(format!("geometric range `{s}` needs a factor > 1 and a positive start"));
            }
            while let Some(&last) = out.last() {
                let next = last * f;
                if next > b + slack || out.len() >= MAX_POINTS {
                    break;
                }
                out.push(next);
            }
        }
        Some(p) => {
            let step = num(p)?;
            if !(step > 0.0) {
                return bad(format!("range `{s}` needs a positive step"));
            }
            for k in 1.. {
                let next = a + k as f64 * step;
                if next > b + slack || out.len() >= MAX_POINTS {
                    break;
                }
                out.push(next);
            }
        }
    }
    if out.len() >= MAX_POINTS {
        return bad(format!("range `{s}` has too many points"));
    }
    Ok(out)
}

fn parse_sizes(s: &str) -> Result<Vec<usize>, ConfigError> {
    parse_range(s)?
        .into_iter()
        .map(|x| {
            let r = x.round();
            if (x - r).abs() > 1e-9 || r < 1.0 {
                bad(format!("size {x} in `{s}` is not a positive integer"))
            } else {
                Ok(r as usize)
            }
        })
        .collect()
}

impl RunConfig {
    pub fn from_args(args: Args) -> Result<Self, ConfigError> {
        use Command::*;
        if args.beta_re.is_empty() {
            return bad("at least one --beta-re is required");
        }
        if !args.beta_im.is_empty() && args.beta_im.len() != args.beta_re.len() {
            return bad(format!("{} --beta-im values for {} --beta-re values", args.beta_im.len(), args.beta_re.len()));
        }
        let betas: Vec<Beta> = args
            .beta_re
            .iter()
            .enumerate()
            .map(|(i, &re)| Beta { re, im: args.beta_im.get(i).copied().unwrap_or(0.0) })
            .collect();

        let ns = parse_sizes(args.n_range.as_deref().unwrap_or(match args.command {
            SweepDiscrete => "64:512:x2",
            _ => "1:24:1",
        }))?;
        let scales = parse_range(args.r_range.as_deref().unwrap_or(match args.command {
            Verify => "10",
            SweepContinuous => "20:60:20",
            _ => "10:30:10",
        }))?;
        if scales.iter().any(|&r| !(r > 0.0)) {
            return bad("lengths in --r-range must be positive");
        }
        let eps = if args.eps.is_empty() {
            vec![if args.command == SweepContinuous { 1e-4 } else { 1e-3 }]
        } else {
            args.eps.clone()
        };
        if eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return bad("--eps must lie in (0, 1)");
        }
        if args.nodes < 2 {
            return bad("--nodes must be at least 2");
        }
        if args.panels == Some(0) {
            return bad("--panels must be positive");
        }
        if args.trunc_n == Some(0) {
            return bad("--trunc-N must be positive");
        }
        if let Some(t) = args.tol {
            if !(t > 0.0) {
                return bad("--tol must be positive");
            }
        }

        let cfg = Self {
            command: args.command,
            betas,
            ns,
            scales,
            eps,
            panels: args.panels,
            nodes: args.nodes,
            trunc_n: args.trunc_n,
            seed: args.seed,
            tol: args.tol,
            sign: args.sign,
            format: args.format,
            out: args.out,
        };
        for b in &cfg.betas {
            cfg.check_strip(*b)?;
        }
        Ok(cfg)
    }

    /// β must lie in every strip the command touches.
    fn check_strip(&self, b: Beta) -> Result<(), ConfigError> {
        use Command::*;
        if !(b.re.is_finite() && b.im.is_finite()) {
            return bad(format!("beta = {b} is not finite"));
        }
        let open = |lo: f64, hi: f64| {
            if b.re > lo && b.re < hi {
                Ok(())
            } else {
                bad(format!("{:?} needs {lo} < Re beta < {hi}, got beta = {b}", self.command))
            }
        };
        let ctx = |c: BetaContext| BetaParam::new(b.value(), c).map(|_| ()).map_err(|e| ConfigError(e.to_string()));
        match self.command {
            Verify => open(-0.5, 1.0),
            Constants => open(-0.5, 0.5),
            SechLab => ctx(BetaContext::SechSymbol),
            SweepDiscrete | SweepContinuous => {
                for s in self.sign.signs() {
                    let c = match (self.command, s) {
                        (SweepDiscrete, Sign::Plus) => BetaContext::DiscretePlus,
                        (SweepDiscrete, Sign::Minus) => BetaContext::DiscreteMinus,
                        (_, Sign::Plus) => BetaContext::ContinuousPlus,
                        (_, Sign::Minus) => BetaContext::ContinuousMinus,
                    };
                    ctx(c)?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn args(extra: &[&str]) -> Args {
        let mut v = vec!["wienerdet"];
        v.extend_from_slice(extra);
        Args::try_parse_from(v).unwrap()
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("5").unwrap(), vec![5.0]);
        assert_eq!(parse_range("1:3").unwrap(), vec![1.0, 3.0]);
        assert_eq!(parse_range("64:512:x2").unwrap(), vec![64.0, 128.0, 256.0, 512.0]);
        assert_eq!(parse_range("0.1:0.3:0.1").unwrap().len(), 3);
        assert_eq!(parse_sizes("1:32:1").unwrap(), (1..=32).collect::<Vec<_>>());
        for s in ["3:1", "1:2:0", "1:2:x1", "a:b", "1:2:3:4", "0:4:x2"] {
            assert!(parse_range(s).is_err(), "{s}");
        }
        assert!(parse_sizes("0.5:2:0.5").is_err());
    }

    #[test]
    fn defaults_per_command() {
        let c = RunConfig::from_args(args(&["--command", "sweep-discrete", "--beta-re", "0.25"])).unwrap();
        assert_eq!(c.ns, vec![64, 128, 256, 512]);
        assert_eq!(c.betas, vec![Beta { re: 0.25, im: 0.0 }]);
        let c = RunConfig::from_args(args(&["--command", "sweep-continuous", "--beta-re", "-0.3", "--sign", "minus"]))
            .unwrap();
        assert_eq!(c.eps, vec![1e-4]);
        assert_eq!(c.scales, vec![20.0, 40.0, 60.0]);
    }

    #[test]
    fn rejects_bad_configs() {
        let cases: &[&[&str]] = &[
            &["--command", "verify"],
            &["--command", "verify", "--beta-re", "0.1", "--beta-im", "0.1", "--beta-im", "0.2"],
            &["--command", "sech-lab", "--beta-re", "0.7"],
            &["--command", "sweep-continuous", "--beta-re", "0.7", "--sign", "minus"],
            &["--command", "sweep-discrete", "--beta-re", "-0.5"],
            &["--command", "constants", "--beta-re", "0.5"],
            &["--command", "verify", "--beta-re", "0.1", "--eps", "0"],
            &["--command", "verify", "--beta-re", "0.1", "--tol=-1"],
            &["--command", "verify", "--beta-re", "0.1", "--panels", "0"],
        ];
        for a in cases {
            assert!(RunConfig::from_args(args(a)).is_err(), "{a:?}");
        }
        // the plus strip of the continuous sweep is wider than the minus one
        assert!(RunConfig::from_args(args(&["--command", "sweep-continuous", "--beta-re", "0.7"])).is_ok());
    }

    proptest! {
        #[test]
        fn additive_ranges_are_increasing_and_bounded(a in 0.0f64..10.0, len in 0.0f64..20.0, step in 0.05f64..5.0) {
            let b = a + len;
            let v = parse_range(&format!("{a}:{b}:{step}")).unwrap();
            prop_assert_eq!(v[0], a);
            prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
            prop_assert!(*v.last().unwrap() <= b + 1e-9 * b.max(1.0));
            prop_assert!(*v.last().unwrap() + step > b - 1e-9 * b.max(1.0));
        }
    }
}
