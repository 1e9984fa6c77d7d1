//! Shared parameters for the criterion benchmarks.

use wienerdet::fredholm::RuleKnobs;
use wienerdet::wienerhopf::WhKnobs;
use wienerdet::Complex64;

/// Exponents exercised by every benchmark: real, negative, complex.
pub fn betas() -> [(&'static str, Complex64); 3] {
    [("0.25", Complex64::new(0.25, 0.0)), ("-0.3", Complex64::new(-0.3, 0.0)), ("0.2+0.3i", Complex64::new(0.2, 0.3))]
}

/// A light family rule, enough for benchmarking the Nyström pipeline.
pub fn light_rule() -> RuleKnobs {
    RuleKnobs { nodes: 12, panels: 2, depth: 8 }
}

pub fn wh_default() -> WhKnobs {
    WhKnobs::default()
}
