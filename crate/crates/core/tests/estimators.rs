use mixqmc::allocation::{integer_allocation, AllocationRule, Ansatz, Rate};
use mixqmc::estimators::{
    correlation, estimate_mixture_is, replicate_variance, EstimatorKind, Prepared, Sampler, SamplerConfig,
};
use mixqmc::mixture::{DistributionSpec, MixtureSpec, Stratum};
use mixqmc::models::Model;
use mixqmc::qmc::ScrambleKind;
use mixqmc::seed::split;

fn report(model: &Model, kind: EstimatorKind, m: u32, reps: usize, seed: u64, cfg: &SamplerConfig) -> mixqmc::estimators::EstimatorReport {
    let p = Prepared::new(&model.spec, &model.integrand, kind, m, cfg).unwrap();
    replicate_variance(&kind.to_string(), p.n(), reps, seed, |s| p.sample(s)).unwrap()
}

#[test]
fn toy_estimators_are_unbiased_at_small_n() {
    let model = Model::toy();
    let mu = model.reference_mean().unwrap();
    let cfg = SamplerConfig::default();
    for kind in EstimatorKind::standard(&model) {
        for m in [3, 6] {
            let r = report(&model, kind, m, 400, 5, &cfg);
            let z = (r.mean - mu) / r.std_error();
            assert!(z.abs() < 3.5, "{kind} m={m}: z = {z}");
        }
    }
}

#[test]
fn linear_scramble_is_unbiased_too() {
    let model = Model::toy();
    let mu = model.reference_mean().unwrap();
    let mut cfg = SamplerConfig::default();
    cfg.scramble = ScrambleKind::LinearShift;
    let r = report(&model, EstimatorKind::RqmcPow2(Rate::Finite(3.0)), 6, 400, 8, &cfg);
    assert!(((r.mean - mu) / r.std_error()).abs() < 3.5);
}

#[test]
fn mc_variance_matches_mixture_variance() {
    let model = Model::toy();
    let sigma2 = model.mixture_variance().unwrap();
    let r = report(&model, EstimatorKind::Mc, 10, 500, 17, &SamplerConfig::default());
    let ratio = r.variance / (sigma2 / 1024.0);
    assert!((0.7..=1.4).contains(&ratio), "ratio {ratio}");
}

#[test]
fn adjusted_counts_stay_within_two_of_target() {
    let model = Model::flood();
    let cfg = SamplerConfig::default();
    let kind = EstimatorKind::RqmcAdjusted(Rate::Finite(2.0));
    let p = Prepared::new(&model.spec, &model.integrand, kind, 9, &cfg).unwrap();
    let sizes = p.allocation().unwrap().sizes.clone();
    let r = replicate_variance("adj", p.n(), 50, 3, |s| p.sample(s)).unwrap();
    for counts in &r.counts {
        assert_eq!(counts.iter().sum::<u64>(), 512);
        for (c, n) in counts.iter().zip(&sizes) {
            assert!(c.abs_diff(*n) <= 2, "{counts:?} vs {sizes:?}");
        }
    }
}

#[test]
fn integer_allocation_agrees_with_prepared_plan() {
    let model = Model::flood();
    let rule = AllocationRule::new(Ansatz::Zero, Rate::Finite(2.0));
    let plan = integer_allocation(&model.spec.alpha(), &rule, 4096).unwrap();
    let p = Prepared::new(&model.spec, &model.integrand, EstimatorKind::RqmcAdjusted(Rate::Finite(2.0)), 12, &SamplerConfig::default()).unwrap();
    assert_eq!(p.allocation().unwrap().sizes, plan.sizes);
}

#[test]
fn mixture_importance_sampling_second_moment() {
    // target N(0,1), proposal 0.5 N(−1,1) + 0.5 N(1,1.5²), g = x²: E = 1
    let spec = MixtureSpec::new(vec![
        Stratum { weight: 0.5, coords: vec![DistributionSpec::Normal { mean: -1.0, sd: 1.0 }] },
        Stratum { weight: 0.5, coords: vec![DistributionSpec::Normal { mean: 1.0, sd: 1.5 }] },
    ])
    .unwrap();
    let target = |x: &[f64]| (-0.5 * x[0] * x[0]).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let g = |x: &[f64]| x[0] * x[0];
    let cfg = SamplerConfig::default();
    for sampler in [Sampler::Mc, Sampler::Rqmc] {
        let r = replicate_variance("is", 256, 500, 21, |s| {
            Ok(mixqmc::estimators::Sample {
                estimate: estimate_mixture_is(&spec, &g, &target, sampler, 8, &cfg, s)?,
                counts: vec![],
            })
        })
        .unwrap();
        let z = (r.mean - 1.0) / r.std_error();
        assert!(z.abs() < 3.0, "{sampler:?}: mean {} z {z}", r.mean);
    }
}

#[test]
fn toy_variance_ordering_at_4096() {
    let model = Model::toy();
    let cfg = SamplerConfig::default();
    let mut wins = 0;
    for batch in 0..10u64 {
        let seed = split(99, batch);
        let mc = report(&model, EstimatorKind::Mc, 12, 500, split(seed, 0), &cfg).variance;
        let plain = report(&model, EstimatorKind::Rqmc, 12, 500, split(seed, 1), &cfg).variance;
        let pow2 = report(&model, EstimatorKind::RqmcPow2(Rate::Finite(3.0)), 12, 500, split(seed, 2), &cfg).variance;
        if pow2 * 4.0 <= plain && plain * 4.0 <= mc {
            wins += 1;
        }
    }
    assert!(wins >= 6, "ordering held in {wins} of 10 batches");
}

#[test]
fn conjoined_and_per_stratum_correlation_is_finite() {
    // Same seeds for both: the measured correlation is reported, its sign is not asserted.
    let model = Model::toy();
    let cfg = SamplerConfig::default();
    let a = report(&model, EstimatorKind::RqmcPow2(Rate::Finite(3.0)), 8, 100, 4, &cfg);
    let b = report(&model, EstimatorKind::RqmcPerStratum(Rate::Finite(3.0)), 8, 100, 4, &cfg);
    let c = correlation(&a.estimates, &b.estimates).unwrap();
    assert!((-1.0..=1.0).contains(&c));
}
