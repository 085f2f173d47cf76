mod common;

use std::fs;

use common::*;
use ctsev::features::*;
use ctsev::imaging::{io, BinaryMask, GrayImage};
use ctsev::infection::*;
use ctsev::lung::*;
use ctsev::phantom::*;
use ctsev::wam::*;
use ctsev::Error;

fn ellipse(w: usize, h: usize, cx: f64, cy: f64, rx: f64, ry: f64) -> BinaryMask {
    BinaryMask::from_fn(w, h, |x, y| {
        let (dx, dy) = ((x as f64 - cx) / rx, (y as f64 - cy) / ry);
        dx * dx + dy * dy <= 1.0
    })
}

fn write_slices(dir: &std::path::Path, names: &[&str], imgs: &[GrayImage]) {
    fs::create_dir_all(dir).unwrap();
    for (n, img) in names.iter().zip(imgs) {
        io::write_gray_png(img, &dir.join(n)).unwrap();
    }
}

#[test]
fn loads_twenty_seven_slices_in_numeric_order() {
    let tmp = tempfile::tempdir().unwrap();
    let names: Vec<String> = (0..27).rev().map(|i| format!("{i}.png")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let imgs: Vec<GrayImage> = (0..27).map(|i| GrayImage::filled(8, 8, (26 - i) as f64 / 255.0).unwrap()).collect();
    write_slices(tmp.path(), &refs, &imgs);
    let scan = load_scan(tmp.path()).unwrap();
    assert_eq!(scan.len(), 27);
    assert_eq!(scan.names[..3], ["0.png", "1.png", "2.png"]);
    assert_eq!(scan.names[10], "10.png");
    assert_eq!(scan.slices[5].get(0, 0), 5.0 / 255.0);
}

#[test]
fn numeric_names_sort_naturally() {
    let tmp = tempfile::tempdir().unwrap();
    let imgs = vec![GrayImage::filled(4, 4, 0.0).unwrap(); 2];
    write_slices(tmp.path(), &["10.png", "2.png"], &imgs);
    assert_eq!(load_scan(tmp.path()).unwrap().names, ["2.png", "10.png"]);
}

#[test]
fn mixed_geometry_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    write_slices(
        tmp.path(),
        &["0.png", "1.png"],
        &[GrayImage::filled(512, 512, 0.1).unwrap(), GrayImage::filled(256, 256, 0.1).unwrap()],
    );
    assert!(matches!(load_scan(tmp.path()), Err(Error::MixedGeometry { .. })));
}

#[test]
fn missing_scan_directory() {
    let err = load_scan(std::path::Path::new("/definitely/not/here")).unwrap_err();
    assert!(err.to_string().contains("scan directory not found"));
}

#[test]
fn classical_segmenter_covers_phantom_lungs() {
    let p = generate_phantom(&PhantomSpec::new(SeverityClass::Mild, 0.0, 4)).unwrap();
    for i in [0, 13, 26] {
        let truth = &p.lung_masks[i];
        let found = classical_lung_segment(&p.scan.slices[i], &ClassicalLungParams::default());
        let covered = found.intersection(truth).unwrap().count() as f64 / truth.count() as f64;
        assert!(covered >= 0.95, "slice {i}: coverage {covered}");
    }
}

#[test]
fn classical_segmenter_on_flat_images() {
    let params = ClassicalLungParams::default();
    assert!(classical_lung_segment(&GrayImage::filled(32, 32, 0.9).unwrap(), &params).is_empty());
    assert!(classical_lung_segment(&GrayImage::filled(32, 32, 0.0).unwrap(), &params).is_empty());
}

#[test]
fn gate_boundaries_on_512() {
    let g = GateParams::default();
    let a = 512 * 512;
    assert!(g.retains(10_000, a, 50, 100));
    assert!(!g.retains(9_999, a, 50, 100));
    assert!(g.retains(183_501, a, 0, 100));
    assert!(!g.retains(183_500, a, 0, 100));
    assert!((0.7 * 512.0 * 512.0 - 183_500.8f64).abs() < 1e-9);
}

#[test]
fn gate_matches_reference_rule() {
    let g = GateParams::default();
    for n in [27, 100, 702] {
        for index in 0..n {
            for (area, side) in [(0, 512), (9_999, 512), (10_000, 512), (183_501, 512), (2_500, 256), (2_499, 256)] {
                assert_eq!(g.retains(area, side * side, index, n), reference_gate(area, side * side, index, n));
            }
        }
    }
}

#[test]
fn side_split_follows_radiological_convention() {
    let m = BinaryMask::from_fn(512, 64, |x, y| (y as isize - 32).abs() < 10 && ((x as isize - 100).abs() < 20 || (x as isize - 400).abs() < 20));
    let sides = split_left_right(&m);
    assert!(sides.right.get(100, 32) && !sides.left.get(100, 32));
    assert!(sides.left.get(400, 32) && !sides.right.get(400, 32));
    let empty = split_left_right(&BinaryMask::empty(8, 8));
    assert!(empty.left.is_empty() && empty.right.is_empty());
}

#[test]
fn merged_blob_splits_at_bbox_midline() {
    let m = BinaryMask::from_fn(40, 20, |x, y| (5..=30).contains(&x) && (3..15).contains(&y));
    let sides = split_left_right(&m);
    let mid = (5 + 30) as f64 / 2.0;
    for y in 0..20 {
        for x in 0..40 {
            let inside = m.get(x, y);
            assert_eq!(sides.right.get(x, y), inside && x as f64 <= mid);
            assert_eq!(sides.left.get(x, y), inside && x as f64 > mid);
        }
    }
    assert_eq!(sides.left.union(&sides.right).unwrap(), m);
    assert!(sides.left.intersection(&sides.right).unwrap().is_empty());
}

#[test]
fn empty_lung_gives_empty_infection() {
    let img = GrayImage::filled(64, 64, 0.5).unwrap();
    let inf = segment_infection(&img, &BinaryMask::empty(64, 64), &InfectionParams::default()).unwrap();
    assert!(inf.is_empty());
}

#[test]
fn uniform_lung_reports_almost_nothing() {
    let lung = ellipse(128, 128, 64.0, 64.0, 40.0, 50.0);
    let img = GrayImage::from_fn(128, 128, |x, y| if lung.get(x, y) { 0.5 } else { 0.8 });
    let inf = segment_infection(&img, &lung, &InfectionParams::default()).unwrap();
    assert!(inf.count() as f64 <= 0.05 * lung.count() as f64);
}

#[test]
fn blob_found_and_vessels_ignored() {
    let (w, h) = (256, 256);
    let lung = ellipse(w, h, 128.0, 128.0, 90.0, 110.0);
    let blob = ellipse(w, h, 110.0, 100.0, 25.2, 25.2);
    assert!((blob.count() as i64 - 2000).abs() < 40);
    let vessels = BinaryMask::from_fn(w, h, |x, y| {
        let on_line = |c: usize| (c..c + 2).contains(&y) && (60..200).contains(&x);
        lung.get(x, y) && !blob.get(x, y) && (on_line(170) || on_line(200))
    });
    let img = GrayImage::from_fn(w, h, |x, y| {
        if !lung.get(x, y) {
            0.7
        } else if vessels.get(x, y) {
            0.95
        } else if blob.get(x, y) {
            0.4
        } else {
            0.04
        }
    });
    let inf = segment_infection(&img, &lung, &InfectionParams::default()).unwrap();
    let dice = 2.0 * inf.intersection(&blob).unwrap().count() as f64 / (inf.count() + blob.count()) as f64;
    let vessel_hit = inf.intersection(&vessels).unwrap().count() as f64 / vessels.count() as f64;
    assert!(dice >= 0.7, "dice {dice}");
    assert!(vessel_hit < 0.2, "vessel coverage {vessel_hit}");
    assert!(inf.is_subset_of(&lung));
}

fn run(p: &PhantomScan) -> Vec<SliceResult> {
    process_scan_with_masks(&p.scan, &p.lung_masks, &GateParams::default(), &InfectionParams::default(), false)
        .unwrap()
        .into_iter()
        .map(|(r, _)| r)
        .collect()
}

#[test]
fn retained_flags_match_reference_gate() {
    let p = generate_phantom(&PhantomSpec::new(SeverityClass::Moderate, 0.3, 2)).unwrap();
    let results = run(&p);
    assert_eq!(results.len(), 27);
    for r in &results {
        let m = &p.lung_masks[r.index];
        assert_eq!(r.retained, reference_gate(m.count(), 256 * 256, r.index, 27));
        if !r.retained {
            assert!(r.infection_mask.is_empty());
        }
    }
}

#[test]
fn scan_failing_the_gate_has_no_features() {
    let p = generate_phantom(&PhantomSpec::new(SeverityClass::Mild, 0.1, 2)).unwrap();
    let gate = GateParams {
        min_mask_area: 1e9,
        ..GateParams::default()
    };
    let results: Vec<SliceResult> = process_scan_with_masks(&p.scan, &p.lung_masks, &gate, &InfectionParams::default(), false)
        .unwrap()
        .into_iter()
        .map(|(r, _)| r)
        .collect();
    assert!(results.iter().all(|r| !r.retained));
    assert!(matches!(build_feature_vector(&results), Err(Error::EmptyScan)));
}

#[test]
fn extracted_rate_tracks_planted_fraction() {
    let p = generate_phantom(&PhantomSpec::new(SeverityClass::Severe, 0.60, 13)).unwrap();
    let m = mean_retained_rate(&run(&p)).unwrap();
    assert!((m - 0.60).abs() <= 0.05, "extracted {m}");
}

#[test]
fn ten_percent_phantom_is_mild_under_wam() {
    let p = generate_phantom(&PhantomSpec::new(SeverityClass::Mild, 0.10, 21)).unwrap();
    let results = run(&p);
    for (l, r) in retained_rates(&results) {
        assert!(l < 0.25 && r < 0.25);
    }
    assert_eq!(scan_wam(&results, &WamWeights::default()).unwrap(), (1.0, SeverityClass::Mild));
}

#[test]
fn critical_phantom_planted_fraction() {
    let p = generate_phantom(&PhantomSpec::new(SeverityClass::Critical, 0.90, 3)).unwrap();
    let f = p.planted_fraction();
    assert!((0.88..=0.92).contains(&f), "planted {f}");
}

#[test]
fn phantom_is_deterministic_and_validated() {
    let a = generate_phantom(&PhantomSpec::new(SeverityClass::Mild, 0.10, 7)).unwrap();
    let b = generate_phantom(&PhantomSpec::new(SeverityClass::Mild, 0.10, 7)).unwrap();
    assert_eq!(a.scan.slices, b.scan.slices);
    assert_eq!(a.infection_masks, b.infection_masks);
    assert!(matches!(
        generate_phantom(&PhantomSpec::new(SeverityClass::Mild, 0.40, 7)),
        Err(Error::PhantomSpec(_))
    ));
}

#[test]
fn corpus_manifest_is_balanced_and_reproducible() {
    let specs = corpus_specs(&CorpusParams::new(50, 3)).unwrap();
    assert_eq!(specs.len(), 200);
    for c in SeverityClass::ALL {
        assert_eq!(specs.iter().filter(|e| e.spec.class == c).count(), 50);
        assert!(specs.iter().filter(|e| e.spec.class == c).all(|e| c.contains(e.spec.involvement)));
    }
    assert_eq!(specs, corpus_specs(&CorpusParams::new(50, 3)).unwrap());
    let mut buf = Vec::new();
    write_manifest(&mut buf, &specs).unwrap();
    assert_eq!(read_manifest(buf.as_slice()).unwrap().len(), 200);
}

#[test]
fn written_phantom_reloads_with_external_masks() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = PhantomSpec {
        n_slices: 6,
        size: 128,
        ..PhantomSpec::new(SeverityClass::Moderate, 0.3, 5)
    };
    let p = generate_phantom(&spec).unwrap();
    let dir = p.write(tmp.path(), "s0").unwrap();
    let scan = load_scan(&dir).unwrap();
    assert_eq!(scan.slices, p.scan.slices);
    let masks = MaskSource::ExternalDirectory(tmp.path().join("lung_masks/s0")).lung_masks(&scan).unwrap();
    assert_eq!(masks, p.lung_masks);
}

#[test]
fn sampling_for_eighty_slices_takes_every_other() {
    assert_eq!(sample_positions(80), (0..40).map(|i| 2 * i).collect::<Vec<_>>());
    assert_eq!(sample_positions(40), (0..40).collect::<Vec<_>>());
}

#[test]
fn sampling_matches_partition_enumeration() {
    for m in 41..=800 {
        assert_eq!(sample_positions(m), partition_positions(m), "m = {m}");
    }
}

proptest::proptest! {
    #[test]
    fn feature_vector_shape(rates in proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..702)) {
        let v = features_from_rates(&rates).unwrap();
        proptest::prop_assert_eq!(v.as_slice().len(), 80);
        proptest::prop_assert!(v.as_slice().iter().all(|x| (0.0..=1.0).contains(x)));
        let pos = sample_positions(rates.len());
        proptest::prop_assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn reversing_short_scans_reverses_pairs(rates in proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..=40)) {
        let fwd: Vec<(f64, f64)> = features_from_rates(&rates).unwrap().pairs().take(rates.len()).collect();
        let rev_in: Vec<(f64, f64)> = rates.iter().rev().copied().collect();
        let mut rev: Vec<(f64, f64)> = features_from_rates(&rev_in).unwrap().pairs().take(rates.len()).collect();
        rev.reverse();
        proptest::prop_assert_eq!(fwd, rev);
    }
}

#[test]
fn single_slice_is_repeated() {
    let v = features_from_rates(&[(0.2, 0.6)]).unwrap();
    assert!(v.pairs().all(|p| p == (0.2, 0.6)));
}

#[test]
fn short_scans_pad_with_averages() {
    let v = features_from_rates(&[(0.1, 0.3), (0.3, 0.5)]).unwrap();
    let pairs: Vec<(f64, f64)> = v.pairs().collect();
    assert_eq!(pairs[0], (0.1, 0.3));
    assert_eq!(pairs[1], (0.3, 0.5));
    for p in &pairs[2..] {
        assert!((p.0 - 0.2).abs() < 1e-15 && (p.1 - 0.4).abs() < 1e-15);
    }
}

#[test]
fn feature_csv_round_trip() {
    let rows: Vec<FeatureRow> = (0..3)
        .map(|i| FeatureRow {
            id: format!("s{i}"),
            features: features_from_rates(&[(0.1 * i as f64, 1.0 / 3.0)]).unwrap(),
            label: Some(SeverityClass::ALL[i]),
        })
        .collect();
    let mut buf = Vec::new();
    write_feature_csv(&mut buf, &rows).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("id,l0,r0,l1,r1"));
    assert!(text.lines().next().unwrap().ends_with("l39,r39,label"));
    assert_eq!(read_feature_csv(buf.as_slice()).unwrap(), rows);
}

#[test]
fn wam_weighting_and_rounding() {
    let w = WamWeights::default();
    assert_eq!(slice_wam(0.30, 0.60, &w).unwrap(), (3.0 * 3.0 + 2.0 * 2.0) / 5.0);
    assert_eq!(wam_from_rates(&[(1.0, 1.0); 5], &w).unwrap().1, SeverityClass::Critical);
    assert_eq!(score_to_class(2.5), SeverityClass::Severe);
}
