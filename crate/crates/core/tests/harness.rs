mod common;

use common::{eq7, max_rel_dev};
use lowrank::baselines::{randomized_svd, BaselineConfig};
use lowrank::bench::{check_bound, rel_err, run_sval_study, run_table_study, write_csv, SvalOptions, TableStudy};
use lowrank::dense::singular_values;
use lowrank::matgen::{SpectrumKind, SpectrumSpec};
use lowrank::Algorithm;

#[test]
fn adequately_sampled_randomized_svd_is_exact() {
    let a = eq7(400, 160, 1).a;
    let e = rel_err(&a, &randomized_svd(&a, &BaselineConfig::new(160, 0, 1)).unwrap()).unwrap();
    assert!(e <= 1e-13, "{e:e}");
}

#[test]
fn undersampled_table_contrast() {
    let recs = run_table_study(&TableStudy::new(vec![400], 0.4, 0.35, vec![0, 1, 2], vec![1])).unwrap();
    assert_eq!(recs.len(), 6 * 3 + 1);
    for rec in &recs {
        let e = rec.rel_err.unwrap();
        match rec.algorithm {
            Algorithm::EodAbe => {
                assert!(e <= 1e-10, "{rec:?}");
                assert_eq!(rec.detected_rank, Some(160));
            }
            Algorithm::ReferenceSvd => assert!(e <= 1e-14, "{rec:?}"),
            _ => assert!(e >= 1e-2, "{rec:?}"),
        }
    }
}

#[test]
fn oversampled_table_is_uniformly_accurate() {
    let recs = run_table_study(&TableStudy::new(vec![400], 0.4, 0.6, vec![0, 1, 2], vec![2])).unwrap();
    for rec in &recs {
        assert!(rec.rel_err.unwrap() <= 1e-10, "{rec:?}");
    }
}

#[test]
fn table_rows_are_reproducible() {
    let study = TableStudy::new(vec![80], 0.4, 0.35, vec![0, 2], vec![3, 4]);
    let x = run_table_study(&study).unwrap();
    let y = run_table_study(&study).unwrap();
    for (p, q) in x.iter().zip(&y) {
        assert_eq!(p.algorithm, q.algorithm);
        assert!((p.rel_err.unwrap() - q.rel_err.unwrap()).abs() <= 1e-13);
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, &x).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2 + x.len());
}

#[test]
fn noisy_low_rank_sval_fidelity() {
    let spec = SpectrumSpec::new(SpectrumKind::low_rank_plus_noise(20, 0.005), 300, 1);
    let study = run_sval_study(&spec, &SvalOptions::new(vec![2], 50)).unwrap();
    let reference = study.estimates(Algorithm::ReferenceSvd, 0);
    let dev = max_rel_dev(&study.estimates(Algorithm::EodAbe, 2), &reference, 20);
    assert!(dev <= 1e-3, "worst relative deviation of the top 20: {dev:e}");
}

#[test]
fn fast_decay_sval_fidelity_in_leading_half() {
    let d = 60;
    let spec = SpectrumSpec::new(SpectrumKind::FastDecay, 300, 1);
    let study = run_sval_study(&spec, &SvalOptions::new(vec![0], d)).unwrap();
    let reference = study.estimates(Algorithm::ReferenceSvd, 0);
    let mut report = Vec::new();
    for alg in [Algorithm::EodAbe, Algorithm::RandomizedSvd, Algorithm::TsrSvd] {
        let dev = max_rel_dev(&study.estimates(alg, 0), &reference, d / 2);
        if dev > 1e-6 {
            report.push((alg.name(), dev));
        }
    }
    assert!(report.is_empty(), "worst relative deviation for i <= d/2: {report:?}");
}

#[test]
fn sval_reference_covers_full_spectrum() {
    let g = common::family(SpectrumKind::SlowDecay, 120, 2);
    let study = lowrank::bench::run_sval_study_on(&g.a, &SvalOptions::new(vec![0, 1], 20)).unwrap();
    let reference = study.estimates(Algorithm::ReferenceSvd, 0);
    assert_eq!(reference, singular_values(&g.a).unwrap());
    for alg in Algorithm::BASELINES {
        assert_eq!(study.estimates(alg, 1).len(), 20);
    }
}

#[test]
fn expected_error_bound_mostly_holds() {
    let mut total = 0;
    let mut held = 0;
    let mut failures = Vec::new();
    for kind in [SpectrumKind::FastDecay, SpectrumKind::SlowDecay] {
        let spec = SpectrumSpec::new(kind, 200, 1);
        for r in [10, 20] {
            for d in [r + 3, 2 * r] {
                for tau in 0..=2 {
                    let c = check_bound(&spec, r, d, tau, 20, 11).unwrap();
                    total += 1;
                    if c.holds() {
                        held += 1;
                    } else {
                        failures.push((kind.name(), r, d, tau, c.mean_observed_err, c.bound_value));
                    }
                }
            }
        }
    }
    assert!(
        held as f64 >= 0.95 * total as f64,
        "{held}/{total}; failing: {failures:?}"
    );
}
