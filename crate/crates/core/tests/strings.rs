use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use waveguide::calibration::{estimate_f0, partial_decays};
use waveguide::filter::LoopFilter;
use waveguide::scattering::StringMedium;
use waveguide::string::*;

const FS: f64 = 44100.0;

fn line(m: usize) -> TravelingWaveLine {
    TravelingWaveLine::new(m, StringMedium::default(), FS).unwrap()
}

fn cents(a: f64, b: f64) -> f64 {
    1200.0 * (a / b).log2()
}

#[test]
fn ideal_string_energy_is_constant() {
    let mut s = IdealString::new(line(64));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..32 {
        let pos = rng.random_range(0..64);
        s.tick(Some((pos, rng.random_range(-1.0..1.0))), 0).unwrap();
    }
    let e0 = s.line().energy();
    for _ in 0..10_000 {
        s.tick(None, 10).unwrap();
    }
    assert!((s.line().energy() - e0).abs() <= 1e-10 * e0);
}

#[test]
fn strings_are_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let a: Vec<f64> = (0..40).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..40).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (ca, cb) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| ca * x + cb * y).collect();
        let render = |e: &[f64]| {
            let bridge = TerminationFilter::new(LoopFilter::averager().scaled(0.97), Polarity::Inverting).unwrap();
            terminated_string_render(line(37), bridge, TerminationFilter::rigid(), e, 11, 29, 2000).unwrap()
        };
        let (ya, yb, ym) = (render(&a), render(&b), render(&mix));
        for i in 0..ym.len() {
            assert!((ym[i] - (ca * ya[i] + cb * yb[i])).abs() <= 1e-12);
        }
        let ideal = |e: &[f64]| {
            let mut s = IdealString::new(line(23));
            (0..500).map(|n| s.tick(e.get(n).map(|&v| (5, v)), 17).unwrap()).collect::<Vec<_>>()
        };
        let (ya, yb, ym) = (ideal(&a), ideal(&b), ideal(&mix));
        for i in 0..ym.len() {
            assert!((ym[i] - (ca * ya[i] + cb * yb[i])).abs() <= 1e-12);
        }
    }
}

#[test]
fn lossy_bridge_envelope_non_increasing() {
    let bridge = TerminationFilter::new(LoopFilter::averager().scaled(0.99), Polarity::Inverting).unwrap();
    let m = 40;
    let y = terminated_string_render(line(m), bridge, TerminationFilter::rigid(), &[1.0, -0.5, 0.25], 13, 7, 40 * 2 * m)
        .unwrap();
    let rms: Vec<f64> = y.chunks(2 * m).map(|c| c.iter().map(|v| v * v).sum::<f64>()).collect();
    for w in rms.windows(2).skip(1) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12), "{w:?}");
    }
}

#[test]
fn averager_bridge_partial_decays() {
    let g = 0.99;
    let m = 50;
    let bridge = TerminationFilter::new(LoopFilter::averager().scaled(g), Polarity::Inverting).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let e: Vec<f64> = (0..2 * m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y = terminated_string_render(line(m), bridge, TerminationFilter::rigid(), &e, 3, 1, 44100).unwrap();
    let period = 2.0 * m as f64 + 0.5;
    let decays = partial_decays(&y, FS, FS / period, 5).unwrap();
    assert!(decays.len() >= 4);
    for (f, alpha) in decays {
        let w = 2.0 * std::f64::consts::PI * f / FS;
        let per_pass = g * (w / 2.0).cos().abs();
        let expected = -per_pass.ln() * FS / period;
        assert!((alpha - expected).abs() <= 0.02 * expected, "{f} Hz: {alpha} vs {expected}");
    }
}

#[test]
fn ks_equals_commuted_waveguide_loop() {
    // a string loop with the nut and bridge reflections lumped into one
    // averager is a filtered delay loop of length 2M
    let m = 60;
    let mut p = FdlParams::new(FS, FS / (2.0 * m as f64 + 0.5), 1.0, 0.2);
    p.tuning = Tuning::Rounded;
    p.excitation = Excitation::Impulse;
    assert_eq!(p.validate().unwrap().integer_delay, 2 * m);
    let y = fdl_render(&p).unwrap();
    assert!(y.iter().filter(|v| v.abs() > 1e-3).count() > 100);

    let bridge = TerminationFilter::new(LoopFilter::averager(), Polarity::Inverting).unwrap();
    let mut s = TerminatedString::new(line(m), bridge, TerminationFilter::rigid());
    for (n, &expected) in y.iter().enumerate() {
        s.step();
        if n == 0 {
            s.line_mut().inject_directional(0, 1.0, 0.0).unwrap();
        }
        assert!((s.line().right_wave(0) - expected).abs() <= 1e-9, "n={n}");
    }
}

#[test]
fn fdl_tuning_within_one_cent() {
    for f0 in [110.0, 220.0, 441.0, 882.0] {
        let p = FdlParams::new(FS, f0, 0.995, 1.0);
        let f = estimate_f0(&fdl_render(&p).unwrap(), FS).unwrap();
        assert!(cents(f, f0).abs() <= 1.0, "{f0}: {f}");
    }
}

#[test]
fn rounded_tuning_detune_is_predicted() {
    for f0 in [110.0, 220.0, 441.0, 882.0] {
        let mut p = FdlParams::new(FS, f0, 0.995, 1.0);
        p.tuning = Tuning::Rounded;
        let t = p.validate().unwrap();
        let predicted = FS / (t.integer_delay as f64 + t.fractional_delay + t.filter_delay);
        let f = estimate_f0(&fdl_render(&p).unwrap(), FS).unwrap();
        assert!((cents(f, f0) - cents(predicted, f0)).abs() <= 0.1, "{f0}: {f} vs {predicted}");
    }
}

#[test]
fn fdl_partials_decay_faster_with_frequency() {
    let p = FdlParams::new(FS, 220.0, 0.995, 1.0);
    let y = fdl_render(&p).unwrap();
    let f = estimate_f0(&y, FS).unwrap();
    assert!(cents(f, 220.0).abs() <= 1.0);
    let decays = partial_decays(&y, FS, f, 6).unwrap();
    assert!(decays.len() >= 5);
    for w in decays.windows(2) {
        assert!(w[1].1 > w[0].1, "{decays:?}");
    }
}

#[test]
fn commuted_orderings_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let p = FdlParams::new(FS, 196.0, 0.996, 1.0);
    for _ in 0..5 {
        let e: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = commuted_render(&e, &p, &b, CommutedOrder::ExcitationStringBody).unwrap();
        let c = commuted_render(&e, &p, &b, CommutedOrder::ExcitationBodyString).unwrap();
        assert_eq!(a.len(), 44100);
        let diff = a.iter().zip(&c).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-9, "{diff}");
    }
}

#[test]
fn bowed_string_helmholtz_period() {
    for m in [50usize, 80, 100] {
        let mut s = BowedString::new(m, 0.2, TerminationFilter::rigid(), TerminationFilter::rigid(), FrictionCurve::Saturating, FS)
            .unwrap();
        let bow = BowParams {
            bow_velocity: 0.2,
            bow_force: 0.05,
            bow_position: 0.2,
            friction_slope: 1.0,
        };
        let y = s.render(&bow, 44100).unwrap();
        let f = estimate_f0(&y[22050..], FS).unwrap();
        let expected = FS / (2.0 * m as f64);
        assert!((f - expected).abs() <= 0.03 * expected, "M={m}: {f}");
    }
}
