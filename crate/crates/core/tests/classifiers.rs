mod common;

use common::*;
use ctsev::classifiers::*;
use ctsev::wam::SeverityClass::{self, *};
use ctsev::Error;
use rand::Rng;

fn padded(head: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; 80];
    v[..head.len()].copy_from_slice(head);
    v
}

fn random_dataset(seed: u64, n: usize) -> Dataset {
    let mut r = rng(seed);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..80).map(|_| r.random::<f64>()).collect()).collect();
    let y = (0..n).map(|i| SeverityClass::ALL[i % 4]).collect();
    Dataset::new(x, y).unwrap()
}

/// Two axis-aligned columns of points at x0 = 0.2 and x0 = 0.6.
fn separable_blobs() -> Dataset {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..10 {
        let t = i as f64 / 9.0;
        x.push(padded(&[0.2, t]));
        y.push(Mild);
        x.push(padded(&[0.6, t]));
        y.push(Moderate);
    }
    Dataset::new(x, y).unwrap()
}

#[test]
fn ert_memorizes_distinct_points() {
    let d = random_dataset(1, 120);
    let m = train(ModelKind::Ert, &d, &ClassifierParams {
        ert: ErtParams { n_trees: 100, ..ErtParams::default() },
        ..ClassifierParams::default()
    })
    .unwrap();
    assert_eq!(m.accuracy(&d).unwrap(), 1.0);
}

#[test]
fn single_class_data_predicts_that_class() {
    let base = random_dataset(2, 12);
    let d = Dataset::new(base.x().to_vec(), vec![Severe; 12]).unwrap();
    let params = ClassifierParams {
        knn_k: KnnK(1),
        ..ClassifierParams::default()
    };
    for kind in ModelKind::ALL {
        let m = train(kind, &d, &params).unwrap();
        for x in random_dataset(3, 5).x() {
            assert_eq!(m.predict_class(x).unwrap(), Severe, "{kind}");
        }
    }
    let ert = train_ert(&d, &ErtParams::default()).unwrap();
    let p = TrainedModel::Ert(ert).predict(&d.x()[0]).unwrap();
    assert_eq!(p.scores, [0.0, 0.0, 1.0, 0.0]);
}

#[test]
fn ert_is_reproducible() {
    let d = random_dataset(4, 60);
    let p = ErtParams { n_trees: 20, ..ErtParams::default() };
    assert_eq!(train_ert(&d, &p).unwrap(), train_ert(&d, &p).unwrap());
    let other = train_ert(&d, &ErtParams { seed: 99, ..p }).unwrap();
    assert_ne!(train_ert(&d, &p).unwrap(), other);
}

#[test]
fn gboost_loss_never_increases() {
    let d = random_dataset(5, 80);
    let m = train_gboost(&d, &GbParams::default()).unwrap();
    let trace = m.loss_trace();
    assert_eq!(trace.len(), 201);
    for w in trace.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "{} -> {}", w[0], w[1]);
    }
}

#[test]
fn gboost_separates_two_blobs_within_fifty_rounds() {
    let d = separable_blobs();
    let m = train_gboost(&d, &GbParams { n_rounds: 50, ..GbParams::default() }).unwrap();
    assert_eq!(TrainedModel::GBoost(m).accuracy(&d).unwrap(), 1.0);
}

#[test]
fn gboost_single_sample_after_one_round() {
    let d = Dataset::new(vec![padded(&[0.3])], vec![Critical]).unwrap();
    let m = train_gboost(&d, &GbParams { n_rounds: 1, ..GbParams::default() }).unwrap();
    assert_eq!(TrainedModel::GBoost(m).predict_class(&padded(&[0.3])).unwrap(), Critical);
}

#[test]
fn linear_svm_finds_maximum_margin() {
    let d = separable_blobs();
    let p = SvmParams {
        kernel: Kernel::Linear,
        c: 10.0,
        ..SvmParams::default()
    };
    let (m, reports) = train_svm_with_report(&d, &p).unwrap();
    assert_eq!(TrainedModel::Svm(m.clone()).accuracy(&d).unwrap(), 1.0);
    assert!(reports[0].worst() <= 1e-3);
    let machine = &m.machines()[0];
    let f = |x0: f64| machine.decision(&Kernel::Linear, &padded(&[x0, 0.5]));
    // separator at x0 = 0.4 with unit functional margin at the columns: |w| = 5
    assert!(f(0.4).abs() <= 0.05, "f(0.4) = {}", f(0.4));
    let half_gap = (f(0.6) - f(0.2)).abs() / 2.0;
    assert!((half_gap - 1.0).abs() <= 0.05, "margin ratio {half_gap}");
}

#[test]
fn rbf_svm_learns_xor() {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (a, b, c) in [(0.0, 0.0, Mild), (1.0, 1.0, Mild), (0.0, 1.0, Severe), (1.0, 0.0, Severe)] {
        for k in 0..5 {
            let e = 0.02 * k as f64;
            x.push(padded(&[a + if a == 0.0 { e } else { -e }, b]));
            y.push(c);
        }
    }
    let d = Dataset::new(x, y).unwrap();
    let p = SvmParams {
        kernel: Kernel::Rbf { gamma: 1.0 },
        c: 100.0,
        ..SvmParams::default()
    };
    let (m, reports) = train_svm_with_report(&d, &p).unwrap();
    assert_eq!(TrainedModel::Svm(m).accuracy(&d).unwrap(), 1.0);
    assert!(reports.iter().all(|r| r.worst() <= 1e-3));
}

#[test]
fn svm_kkt_on_random_four_class_data() {
    let d = random_dataset(6, 60);
    let (_, reports) = train_svm_with_report(&d, &SvmParams::default()).unwrap();
    assert_eq!(reports.len(), 6);
    for r in reports {
        assert!(r.worst() <= 1e-3, "{r:?}");
    }
}

#[test]
fn svm_vote_ties_use_margins_then_class() {
    assert_eq!(resolve_votes(&[2.0, 2.0, 1.0, 1.0], &[0.5, 0.9, 0.0, 0.0]), Moderate);
    assert_eq!(resolve_votes(&[2.0, 2.0, 1.0, 1.0], &[0.9, 0.5, 0.0, 0.0]), Mild);
    assert_eq!(resolve_votes(&[2.0, 2.0, 1.0, 1.0], &[0.5, 0.5, 0.0, 0.0]), Mild);
}

#[test]
fn one_nn_memorizes() {
    let d = random_dataset(7, 100);
    assert_eq!(TrainedModel::Knn(train_knn(&d, 1).unwrap()).accuracy(&d).unwrap(), 1.0);
}

#[test]
fn knn_distance_tie_goes_to_lower_index() {
    let d = Dataset::new(vec![padded(&[0.25]), padded(&[0.75])], vec![Critical, Mild]).unwrap();
    let m = train_knn(&d, 1).unwrap();
    assert_eq!(m.neighbors(&padded(&[0.5])), vec![0]);
}

#[test]
fn logreg_separates_blobs() {
    let d = separable_blobs();
    let m = train_logreg(&d, &LogRegParams::default()).unwrap();
    assert_eq!(TrainedModel::LogReg(m).accuracy(&d).unwrap(), 1.0);
}

#[test]
fn logreg_gradient_matches_finite_differences() {
    let d = random_dataset(8, 30);
    let w = d.sample_weights(false);
    let mut r = rng(9);
    let params: Vec<f64> = (0..4 * 81).map(|_| r.random_range(-0.5..0.5)).collect();
    let (_, g) = loss_and_gradient(&params, &d, &w, 1e-3);
    let h = 1e-6;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..params.len() {
        let mut p = params.clone();
        p[i] += h;
        let up = loss_and_gradient(&p, &d, &w, 1e-3).0;
        p[i] -= 2.0 * h;
        let down = loss_and_gradient(&p, &d, &w, 1e-3).0;
        let fd = (up - down) / (2.0 * h);
        num += (fd - g[i]).powi(2);
        den += g[i].powi(2);
    }
    let rel = (num / den).sqrt();
    assert!(rel <= 1e-5, "relative error {rel}");
}

#[test]
fn ensemble_vote_table() {
    for a in 1..=4u8 {
        for b in 1..=4u8 {
            for c in 1..=4u8 {
                let votes = [a, b, c].map(|v| SeverityClass::from_value(v).unwrap());
                assert_eq!(hard_vote(votes).value(), reference_vote([a, b, c]));
            }
        }
    }
}

#[test]
fn predictions_are_repeatable() {
    let d = random_dataset(10, 40);
    let params = ClassifierParams {
        ert: ErtParams { n_trees: 20, ..ErtParams::default() },
        gboost: GbParams { n_rounds: 20, ..GbParams::default() },
        ..ClassifierParams::default()
    };
    for kind in ModelKind::ALL {
        let m = train(kind, &d, &params).unwrap();
        let x = &d.x()[3];
        assert_eq!(m.predict(x).unwrap(), m.predict(x).unwrap());
        assert_eq!(train(kind, &d, &params).unwrap(), m);
    }
}

#[test]
fn wrong_dimension_rejected() {
    let d = random_dataset(11, 8);
    let m = train(ModelKind::Knn, &d, &ClassifierParams::default()).unwrap();
    assert!(matches!(m.predict(&[0.0; 3]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn ert_file_round_trip_predictions() {
    let d = random_dataset(12, 60);
    let m = train(ModelKind::Ert, &d, &ClassifierParams {
        ert: ErtParams { n_trees: 30, ..ErtParams::default() },
        ..ClassifierParams::default()
    })
    .unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("ert.model");
    save_model(&m, &path).unwrap();
    let back = load_model(&path).unwrap();
    for x in random_dataset(13, 100).x() {
        assert_eq!(back.predict(x).unwrap(), m.predict(x).unwrap());
    }
}

#[test]
fn damaged_model_files() {
    let d = random_dataset(14, 20);
    let bytes = model_bytes(&train(ModelKind::Knn, &d, &ClassifierParams::default()).unwrap());
    assert!(matches!(model_from_bytes(&bytes[..bytes.len() - 1]), Err(Error::CorruptModel(_))));
    assert!(matches!(model_from_bytes(&bytes[..10]), Err(Error::CorruptModel(_))));
    let mut unknown = bytes.clone();
    unknown[7] = 200;
    assert!(matches!(model_from_bytes(&unknown), Err(Error::ModelVersion(_))));
    let mut newer = bytes.clone();
    newer[5..7].copy_from_slice(b"02");
    assert!(matches!(model_from_bytes(&newer), Err(Error::ModelVersion(_))));
    assert!(matches!(model_from_bytes(b"not a model at all"), Err(Error::CorruptModel(_))));
}

#[test]
fn every_kind_round_trips() {
    let d = random_dataset(15, 40);
    let params = ClassifierParams {
        ert: ErtParams { n_trees: 10, ..ErtParams::default() },
        gboost: GbParams { n_rounds: 10, ..GbParams::default() },
        logreg: LogRegParams { epochs: 50, ..LogRegParams::default() },
        ..ClassifierParams::default()
    };
    for kind in ModelKind::ALL {
        let m = train(kind, &d, &params).unwrap();
        assert_eq!(model_from_bytes(&model_bytes(&m)).unwrap(), m, "{kind}");
    }
}
