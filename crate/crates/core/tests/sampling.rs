use ifm_core::protocols::{Params, Registry, Setup};
use ifm_core::sampler::{sample, SampleReport};
use ifm_core::Amplitude;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn default_suite() -> Vec<(&'static str, Setup)> {
    let reg = Registry::builtin();
    reg.iter()
        .map(|p| {
            let params = match p.name() {
                "imaging" => Params {
                    transmittance: Some(Amplitude::new(0.6, 0.0)),
                    ..Params::default()
                },
                _ => Params::default(),
            };
            (p.name(), p.setup(&params).unwrap())
        })
        .collect()
}

fn p_value(report: &SampleReport) -> f64 {
    let (stat, dof) = report.chi_square();
    if dof == 0 {
        return if stat == 0.0 { 1.0 } else { 0.0 };
    }
    ChiSquared::new(dof as f64).unwrap().sf(stat)
}

#[test]
fn million_trials_stay_close_and_pass_chi_square() {
    for (name, setup) in default_suite() {
        let r = sample(&setup.circuit, &setup.initial, 1_000_000, 99).unwrap();
        assert_eq!(r.counts.values().sum::<u64>(), 1_000_000);
        assert!(
            r.max_abs_dev < 5e-3,
            "{name}: max_abs_dev {}",
            r.max_abs_dev
        );
        let p = p_value(&r);
        assert!(p > 1e-3, "{name}: chi-square p-value {p}");
    }
}

#[test]
fn deviation_shrinks_like_inverse_sqrt_trials() {
    for (name, setup) in default_suite() {
        for trials in [1_000u64, 10_000, 100_000] {
            let r = sample(&setup.circuit, &setup.initial, trials, 5).unwrap();
            let scaled = r.max_abs_dev * (trials as f64).sqrt();
            // 5 sigma of the widest possible binomial (p = 1/2)
            assert!(
                scaled < 2.5,
                "{name}: sqrt(n) * dev = {scaled} at n = {trials}"
            );
        }
    }
}

#[test]
fn reports_are_self_consistent() {
    for (name, setup) in default_suite() {
        let r = sample(&setup.circuit, &setup.initial, 5_000, 1).unwrap();
        for (label, &count) in &r.counts {
            assert_eq!(r.empirical[label], count as f64 / 5_000.0, "{name}");
        }
        assert_eq!(r.seed, 1);
        assert_eq!(r.trials, 5_000);
    }
}
