mod common;

use common::{FS, N};
use tfkit::ambiguity::{ambiguity_at, ambiguity_from_wvd};
use tfkit::moments::covariance;
use tfkit::signal::{generate, SignalKind, SignalSpec};
use tfkit::symplectic::{
    act_chirp, act_dilate, act_fourier, act_fourier_inverse, act_word, dilation, pushforward,
    shear, SupportPolicy, CHIRP_SHEAR_SIGN, J,
};
use tfkit::wigner::wvd;
use tfkit::{CovarianceMatrix, GeneratorWord, SampledSignal, Sl2Matrix, TfError, TfGrid};

fn atom(tc: f64, fc: f64) -> SampledSignal {
    generate(
        &SignalSpec::gaussian(N, FS, 1.0)
            .param("tc", tc)
            .param("fc", fc),
    )
    .unwrap()
}

fn chirped() -> SampledSignal {
    generate(
        &SignalSpec::new(SignalKind::LfmChirp, N, FS)
            .param("width", 1.2)
            .param("rate", 0.7)
            .param("tc", 0.4)
            .param("fc", -0.3),
    )
    .unwrap()
}

fn cov(a: &SampledSignal) -> CovarianceMatrix {
    covariance(&wvd(a).unwrap()).unwrap()
}

fn argmax(w: &TfGrid) -> (f64, f64) {
    let ((n, k), _) = w
        .values
        .indexed_iter()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    (w.t_axis[n], w.f_axis[k])
}

#[test]
fn chirp_shear_sign_is_pinned() {
    // multiplying an uncorrelated Gaussian by exp(-j pi k t^2) gives cov_tf = kappa k var_t
    let g = atom(0.0, 0.0);
    let k = 1.5;
    let c = cov(&act_chirp(&g, k).unwrap());
    let vt = cov(&g).var_t;
    assert_eq!(CHIRP_SHEAR_SIGN, -1.0);
    assert!((c.cov_tf - CHIRP_SHEAR_SIGN * k * vt).abs() < 1e-6 * vt);
}

#[test]
fn generator_pushforward_consistency() {
    for a in [atom(0.0, 0.0), chirped()] {
        let c = cov(&a);
        for word in [
            "J",
            "Jinv",
            "T(2)",
            "T(-1.5)",
            "M(2)",
            "M(0.5)",
            "J,T(1),M(1.5)",
        ] {
            let w: GeneratorWord = word.parse().unwrap();
            let got = cov(&act_word(&a, &w, SupportPolicy::Fail).unwrap());
            let want = pushforward(&c, &w.product()).unwrap();
            assert!(
                want.max_rel_deviation(&got) < 0.02,
                "{word}: {want:?} vs {got:?}"
            );
            assert!(
                (got.mean_t - want.mean_t).abs() < 1e-6 && (got.mean_f - want.mean_f).abs() < 1e-6,
                "{word}"
            );
        }
    }
}

#[test]
fn word_acts_right_to_left() {
    let a = chirped();
    let w: GeneratorWord = "J,T(1)".parse().unwrap();
    let by_word = act_word(&a, &w, SupportPolicy::Fail).unwrap();
    let by_hand = act_fourier(&act_chirp(&a, CHIRP_SHEAR_SIGN).unwrap()).unwrap();
    assert_eq!(by_word, by_hand);
    assert_eq!(w.product(), J * shear(1.0));
    assert_eq!(
        act_word(&a, &GeneratorWord::default(), SupportPolicy::Fail).unwrap(),
        a
    );
}

#[test]
fn fourier_swaps_wvd_axes() {
    let a = chirped();
    let (wa, wb) = (wvd(&a).unwrap(), wvd(&act_fourier(&a).unwrap()).unwrap());
    let h = N / 2;
    let mut worst: f64 = 0.0;
    // W_Fa(t, f) = W_a(-f, t) on the subgrid shared by both axes
    for n in (h - N / 4 + 1)..(h + N / 4) {
        for k in (0..N).step_by(2) {
            let n_src = (h as isize - (k as isize - h as isize) / 2) as usize;
            let k_src = (h as isize + 2 * (n as isize - h as isize)) as usize;
            worst = worst.max((wb.values[[n, k]] - wa.values[[n_src, k_src]]).abs());
        }
    }
    assert!(worst < 1e-8 * wa.peak(), "{worst}");
}

#[test]
fn fourier_inverse_undoes_fourier() {
    let a = chirped();
    let back = act_fourier_inverse(&act_fourier(&a).unwrap()).unwrap();
    let d = a
        .samples()
        .iter()
        .zip(back.samples())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0_f64, f64::max);
    assert!(d < 1e-12);
}

#[test]
fn fourier_on_non_self_dual_grid() {
    let a = generate(&SignalSpec::gaussian(512, 24.0, 1.0).param("tc", 0.3)).unwrap();
    assert!(!a.is_self_dual());
    let c = cov(&a);
    let got = cov(&act_fourier(&a).unwrap());
    assert!(pushforward(&c, &J).unwrap().max_rel_deviation(&got) < 1e-3);
}

#[test]
fn ambiguity_coordinate_maps() {
    let a = chirped();
    let fs = a.sample_rate();
    let tau = |m: isize| 2.0 * m as f64 / fs;

    // A_Fa(tau, nu) = A_a(nu, -tau), with nu chosen on the lag lattice
    let fa = act_fourier(&a).unwrap();
    for (m, m_nu) in [(3, 5), (-7, 2), (0, -4)] {
        let lhs = ambiguity_at(&fa, m, tau(m_nu));
        let rhs = ambiguity_at(&a, m_nu, -tau(m));
        assert!((lhs - rhs).norm() < 1e-8, "J at ({m}, {m_nu})");
    }

    // chirp: A_b(tau, nu) = A_a(tau, nu - k tau)
    let k = 0.8;
    let b = act_chirp(&a, k).unwrap();
    for (m, nu) in [(4, 0.3), (-9, -0.1)] {
        let lhs = ambiguity_at(&b, m, nu);
        let rhs = ambiguity_at(&a, m, nu - k * tau(m));
        assert!((lhs - rhs).norm() < 1e-10, "chirp at ({m}, {nu})");
    }

    // dilation: A_b(tau, nu) = A_a(tau / c, c nu)
    let b = act_dilate(&a, 2.0, SupportPolicy::Fail).unwrap();
    for (m, nu) in [(6, 0.2), (-10, -0.35)] {
        let lhs = ambiguity_at(&b, m, nu);
        let rhs = ambiguity_at(&a, m / 2, 2.0 * nu);
        assert!((lhs - rhs).norm() < 1e-8, "dilation at ({m}, {nu})");
    }
}

#[test]
fn ambiguity_volume_is_invariant() {
    let a = chirped();
    let v0 = ambiguity_from_wvd(&wvd(&a).unwrap()).volume();
    for (word, tol) in [
        ("J", 1e-6),
        ("T(1.5)", 1e-6),
        ("Jinv", 1e-6),
        ("M(2)", 1e-3),
        ("M(0.5)", 1e-3),
    ] {
        let w: GeneratorWord = word.parse().unwrap();
        let b = act_word(&a, &w, SupportPolicy::Fail).unwrap();
        let v = ambiguity_from_wvd(&wvd(&b).unwrap()).volume();
        assert!((v / v0 - 1.0).abs() < tol, "{word}: {v} vs {v0}");
    }
}

#[test]
fn wvd_peak_follows_coordinate_action() {
    let a = atom(1.0, 0.5);
    let w = wvd(&a).unwrap();
    let p = argmax(&w);
    let (dt, df) = (w.dt(), w.df());
    for (word, cells) in [("J", 1.0), ("T(2)", 1.0), ("T(-1)", 1.0), ("M(2)", 2.0)] {
        let gw: GeneratorWord = word.parse().unwrap();
        let b = act_word(&a, &gw, SupportPolicy::Fail).unwrap();
        let got = argmax(&wvd(&b).unwrap());
        let want = gw.product().apply(p);
        assert!(
            (got.0 - want.0).abs() <= cells * dt + 1e-12,
            "{word}: {got:?} vs {want:?}"
        );
        assert!(
            (got.1 - want.1).abs() <= cells * df + 1e-12,
            "{word}: {got:?} vs {want:?}"
        );
    }
}

#[test]
fn dilation_support_policy() {
    let a = atom(0.0, 0.0);
    assert!(act_dilate(&a, 20.0, SupportPolicy::Warn).is_ok());
    assert!(matches!(
        act_dilate(&a, 20.0, SupportPolicy::Fail),
        Err(TfError::SupportOverflow(_))
    ));
    assert!(act_dilate(&a, 0.0, SupportPolicy::Warn).is_err());
    assert!(act_dilate(&a, -2.0, SupportPolicy::Warn).is_err());
    let same = act_dilate(&a, 1.0, SupportPolicy::Fail).unwrap();
    let d = a
        .samples()
        .iter()
        .zip(same.samples())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0_f64, f64::max);
    assert!(d < 1e-12);
}

#[test]
fn dilation_matches_closed_form() {
    let a = atom(0.0, 0.0);
    let b = act_dilate(&a, 2.0, SupportPolicy::Fail).unwrap();
    let want = generate(&SignalSpec::gaussian(N, FS, 2.0)).unwrap();
    let d = b
        .samples()
        .iter()
        .zip(want.samples())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0_f64, f64::max);
    assert!(d < 1e-10, "{d}");
    assert_eq!(
        pushforward(
            &CovarianceMatrix::from_entries(1.0, 0.0, 1.0),
            &dilation(2.0)
        )
        .unwrap()
        .var_t,
        4.0
    );
}

#[test]
fn non_symplectic_rejected() {
    assert!(
        matches!(Sl2Matrix::new(2.0, 0.0, 0.0, 1.0), Err(TfError::NotSymplectic(d)) if d == 2.0)
    );
    let bad = Sl2Matrix {
        a: 1.0,
        b: 1.0,
        c: 1.0,
        d: 1.0,
    };
    assert!(pushforward(&CovarianceMatrix::from_entries(1.0, 0.0, 1.0), &bad).is_err());
}
