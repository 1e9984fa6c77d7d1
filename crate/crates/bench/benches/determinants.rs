use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use wienerdet::asymptotics::{asymptote_log, AsymptoteKind, AsymptoteSpec};
use wienerdet::fredholm::{fredholm_logdet, graded_rule, nystrom, KernelSpec};
use wienerdet::specfun::ln_barnes_g;
use wienerdet::structured::{d_n, d_n_exact};
use wienerdet::symbols::LineSymbol;
use wienerdet::wienerhopf::{det_w2r, det_wr_pm_hr, TruncatedWH};
use wienerdet::{Complex64, Sign};
use wienerdet_bench::{betas, light_rule, wh_default};

fn special_functions(c: &mut Criterion) {
    let mut g = c.benchmark_group("specfun");
    for (name, b) in betas() {
        g.bench_with_input(BenchmarkId::new("ln_barnes_g", name), &b, |bn, &b| {
            bn.iter(|| ln_barnes_g(black_box(Complex64::new(0.5, 0.0) + b)))
        });
        g.bench_with_input(BenchmarkId::new("asymptote_thm_main_plus", name), &b, |bn, &b| {
            let spec = AsymptoteSpec::new(AsymptoteKind::ThmMainPlus, b).unwrap();
            bn.iter(|| asymptote_log(&spec, black_box(40.0)))
        });
    }
    g.finish();
}

fn toeplitz_plus_hankel(c: &mut Criterion) {
    let mut g = c.benchmark_group("d_n");
    let b = Complex64::new(0.25, 0.0);
    for n in [32usize, 128, 256] {
        g.bench_with_input(BenchmarkId::new("matrix", n), &n, |bn, &n| bn.iter(|| d_n(b, black_box(n), Sign::Plus)));
        g.bench_with_input(BenchmarkId::new("closed_form", n), &n, |bn, &n| {
            bn.iter(|| d_n_exact(b, black_box(n), Sign::Plus))
        });
    }
    g.finish();
}

fn fredholm(c: &mut Criterion) {
    let mut g = c.benchmark_group("fredholm");
    g.sample_size(10);
    let rule = graded_rule(1e-3, light_rule()).unwrap();
    for (name, b) in betas() {
        let spec = KernelSpec::k0(b).unwrap();
        g.bench_function(BenchmarkId::new("k0_logdet", name), |bn| {
            bn.iter(|| fredholm_logdet(&nystrom(&spec, &rule).unwrap(), Sign::Plus))
        });
    }
    g.finish();
}

fn wiener_hopf(c: &mut Criterion) {
    let mut g = c.benchmark_group("wienerhopf");
    g.sample_size(10);
    let b = Complex64::new(0.3, 0.0);
    for r in [5.0, 10.0] {
        let t = TruncatedWH::new(LineSymbol::vhat_eps(b, 1e-3).unwrap(), r, Sign::Plus, wh_default()).unwrap();
        g.bench_with_input(BenchmarkId::new("wr_plus_hr", r), &t, |bn, t| bn.iter(|| det_wr_pm_hr(t)));
        let phi = LineSymbol::phi(b).unwrap();
        g.bench_with_input(BenchmarkId::new("sech_w2r", r), &phi, |bn, s| bn.iter(|| det_w2r(s, r, wh_default())));
    }
    g.finish();
}

criterion_group!(benches, special_functions, toeplitz_plus_hankel, fredholm, wiener_hopf);
criterion_main!(benches);
