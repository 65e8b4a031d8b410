mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use tfkit::ambiguity::ambiguity_from_wvd;
use tfkit::io::{self, Format};
use tfkit::kernels::{make, KernelKind};
use tfkit::moments::{covariance, signal_moments};
use tfkit::signal::{analytic, dft, generate, idft, norm2, spectrum, SignalKind, SignalSpec};
use tfkit::symplectic::{factor, pushforward};
use tfkit::tfd::compute_tfd;
use tfkit::wigner::{cross_wvd, time_marginal, wvd};
use tfkit::{Complex64, CovarianceMatrix, SampledSignal, Sl2Matrix};

fn samples(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im)),
        n,
    )
}

fn signal(n: usize) -> impl Strategy<Value = SampledSignal> {
    (samples(n), 1.0..64.0f64, -10.0..10.0f64)
        .prop_map(|(s, fs, t0)| SampledSignal::new(s, fs, t0).unwrap())
}

fn sl2() -> impl Strategy<Value = Sl2Matrix> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_filter_map("d outside the box", |(a, b, c)| {
        if a.abs() < 1e-3 {
            return None;
        }
        let d = (1.0 + b * c) / a;
        if d.abs() > 3.0 {
            return None;
        }
        Sl2Matrix::new(a, b, c, d).ok()
    })
}

fn covariance_matrix() -> impl Strategy<Value = CovarianceMatrix> {
    (0.05..2.0f64, 0.05..2.0f64, -0.9..0.9f64)
        .prop_map(|(vt, vf, r)| CovarianceMatrix::from_entries(vt, r * (vt * vf).sqrt(), vf))
}

fn atom() -> impl Strategy<Value = SampledSignal> {
    // kept inside |f| < fs/4, where the WVD frequency marginal is exact
    (0.8..1.5f64, -1.0..1.0f64, -1.0..1.0f64, -0.5..0.5f64).prop_map(|(w, tc, fc, k)| {
        generate(
            &SignalSpec::new(SignalKind::LfmChirp, 256, 16.0)
                .param("width", w)
                .param("tc", tc)
                .param("fc", fc)
                .param("rate", k),
        )
        .unwrap()
    })
}

fn max_abs(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(a in signal(128)) {
        let df = a.sample_rate() / a.len() as f64;
        let freq: f64 = spectrum(&a).iter().map(|v| v.norm_sqr()).sum::<f64>() * df;
        prop_assert!((norm2(&a).powi(2) / freq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dft_round_trip(n in prop::sample::select(vec![2usize, 64, 256, 1024]), seed in samples(1024)) {
        let x = &seed[..n];
        prop_assert!(max_abs(&idft(&dft(x)), x) < 1e-13);
    }

    #[test]
    fn analytic_doubles_energy(amps in prop::collection::vec((-1.0..1.0f64, 0.0..(2.0 * PI)), 1..8)) {
        // real sum of cosines on interior bins: no DC or Nyquist content
        let n = 256;
        let x: Vec<Complex64> = (0..n)
            .map(|i| {
                let v: f64 = amps
                    .iter()
                    .enumerate()
                    .map(|(j, (a, ph))| a * (2.0 * PI * (3 + 7 * j) as f64 * i as f64 / n as f64 + ph).cos())
                    .sum();
                Complex64::new(v, 0.0)
            })
            .collect();
        let x = SampledSignal::centered(x, 16.0).unwrap();
        prop_assume!(x.energy() > 1e-6);
        let z = analytic(&x).unwrap();
        prop_assert!((z.energy() / (2.0 * x.energy()) - 1.0).abs() < 1e-8);
        prop_assert!(max_abs(&z.samples().iter().map(|s| Complex64::new(s.re, 0.0)).collect::<Vec<_>>(), x.samples()) < 1e-10);
    }

    #[test]
    fn wvd_energy_and_time_marginal(a in signal(64)) {
        let w = wvd(&a).unwrap();
        prop_assert!((w.mass() - a.energy()).abs() < 1e-8 * a.energy());
        for (m, s) in time_marginal(&w).iter().zip(a.samples()) {
            prop_assert!((m - s.norm_sqr()).abs() < 1e-8 * a.peak().powi(2));
        }
    }

    #[test]
    fn cross_wvd_conjugate_symmetry(u in samples(32), v in samples(32)) {
        let u = SampledSignal::centered(u, 4.0).unwrap();
        let v = SampledSignal::centered(v, 4.0).unwrap();
        let (uv, vu) = (cross_wvd(&u, &v).unwrap(), cross_wvd(&v, &u).unwrap());
        let d = uv.values.iter().zip(vu.values.iter()).map(|(x, y)| (x - y.conj()).norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-12 * uv.peak().max(1.0));
    }

    #[test]
    fn ambiguity_peak_at_origin(a in signal(64)) {
        let amb = ambiguity_from_wvd(&wvd(&a).unwrap());
        let origin = amb.at_origin().norm();
        prop_assert!(amb.values.iter().all(|v| v.norm() <= origin + 1e-10 * origin.max(1.0)));
    }

    #[test]
    fn marginal_kernel_moments_match_signal(a in atom(), k in 0usize..5) {
        let kind = [KernelKind::Wigner, KernelKind::Rihaczek, KernelKind::Levin, KernelKind::Page, KernelKind::BornJordan][k].clone();
        let rho = compute_tfd(&a, &make(kind).unwrap()).unwrap();
        prop_assert!((rho.grid.mass() / a.energy() - 1.0).abs() < 1e-6);
        let c = covariance(&rho.grid).unwrap();
        let (_, mt, vt, mf, vf) = signal_moments(&a);
        prop_assert!((c.var_t / vt - 1.0).abs() < 1e-6);
        prop_assert!((c.var_f / vf - 1.0).abs() < 1e-6);
        prop_assert!((c.mean_t - mt).abs() < 1e-6 && (c.mean_f - mf).abs() < 1e-6);
    }

    #[test]
    fn gaussian_kernel_is_separable(alpha in 0.01..3.0f64, beta in 0.01..3.0f64, tau in -4.0..4.0f64, nu in -4.0..4.0f64) {
        let g = make(KernelKind::Gaussian { alpha, beta }).unwrap();
        let (f1, f2) = g.separable_factors(tau, nu).unwrap();
        prop_assert!((g.evaluate(tau, nu).unwrap() - f1 * f2).norm() < 1e-12);
    }

    #[test]
    fn factor_reconstructs(s in sl2()) {
        prop_assert!(factor(&s).unwrap().product().max_diff(&s) < 1e-12);
    }

    #[test]
    fn pushforward_composes_and_keeps_det(c in covariance_matrix(), s1 in sl2(), s2 in sl2()) {
        let two_step = pushforward(&pushforward(&c, &s1).unwrap(), &s2).unwrap();
        let one_step = pushforward(&c, &(s2 * s1)).unwrap();
        let scale = one_step.var_t.max(one_step.var_f);
        for (x, y) in [(two_step.var_t, one_step.var_t), (two_step.var_f, one_step.var_f), (two_step.cov_tf, one_step.cov_tf)] {
            prop_assert!((x - y).abs() < 1e-12 * scale.max(1.0));
        }
        let p = pushforward(&c, &s1).unwrap();
        prop_assert!((p.strong_det() - c.strong_det()).abs() < 1e-12 * (p.var_t * p.var_f).max(1.0));
    }

    #[test]
    fn signal_files_round_trip(a in signal(16)) {
        for f in [Format::Csv, Format::Json] {
            let text = io::signal_to_string(&a, f).unwrap();
            let back = io::signal_from_str(&text).unwrap();
            prop_assert_eq!(&back, &a);
            prop_assert_eq!(io::signal_to_string(&back, f).unwrap(), text);
        }
    }
}
