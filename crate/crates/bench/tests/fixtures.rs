use wienerdet::fredholm::{family_rule, fredholm_logdet, nystrom, shifted_hankel_logdet, KernelSpec};
use wienerdet::Sign;
use wienerdet_bench::{betas, light_rule, wh_default};

#[test]
fn betas_stay_inside_the_strip() {
    for (_, b) in betas() {
        assert!(b.re.abs() < 0.5);
    }
}

// the light rule trades accuracy for speed but must stay close to the exact value
#[test]
fn light_rule_agrees_with_matrix_form() {
    for (label, b) in betas() {
        let spec = KernelSpec::keps_n(b, 1e-2, 4).unwrap();
        let op = nystrom(&spec, &family_rule(&spec, light_rule()).unwrap()).unwrap();
        let lhs = fredholm_logdet(&op, Sign::Plus).unwrap();
        let rhs = shifted_hankel_logdet(b, 1e-2, 4, Sign::Plus).unwrap();
        assert!(lhs.rel_gap(rhs) < 1e-4, "{label}: {}", lhs.rel_gap(rhs));
    }
}

#[test]
fn wh_default_is_usable() {
    let k = wh_default();
    assert!(k.nodes > 0 && k.panels.is_none_or(|p| p > 0));
}
