use proptest::prelude::*;
use qoc::dataio::{read_matrix_csv, write_matrix_csv};
use qoc::encoders::{CategoryDictionary, Encoder, EncodingScheme};
use qoc::geometry::{
    basis_to_code, capacity_lower_bound, code_to_basis, generate_basis, packs, read_set, validate,
    write_set, GenerationConfig, GeometryError, SetKind, UnitVectorSet,
};
use qoc::qsoftmax::{qargmax, qsoftmax, softmax, CoordinateMatrix};

fn labels(max: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::hash_set("[A-Za-z0-9 _-]{1,12}", 1..=max)
        .prop_map(|s| s.into_iter().collect())
}

fn random_rows(dim: usize, count: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), count).prop_filter(
        "rows must have a usable norm",
        |rows| {
            rows.iter()
                .all(|r| r.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        },
    )
}

fn unit_set(dim: usize, count: usize, kind: SetKind) -> impl Strategy<Value = UnitVectorSet> {
    random_rows(dim, count)
        .prop_map(move |rows| UnitVectorSet::normalized(dim, rows, kind).unwrap())
}

/// A set large enough for `k` labels: the 28-vector QOE basis when it fits,
/// the standard basis otherwise.
fn qoe_set(k: usize) -> UnitVectorSet {
    if k <= 28 {
        code_to_basis(&packs::seven_dim_56()).unwrap()
    } else {
        UnitVectorSet::standard_basis(k).unwrap()
    }
}

fn spherical_set(k: usize) -> UnitVectorSet {
    basis_to_code(&UnitVectorSet::standard_basis(k.div_ceil(2)).unwrap()).unwrap()
}

fn all_schemes(k: usize, base: u32) -> Vec<EncodingScheme> {
    vec![
        EncodingScheme::Ordinal { offset: 1 },
        EncodingScheme::OneHot,
        EncodingScheme::Binary,
        EncodingScheme::BaseN {
            base,
            balanced: base % 2 == 1,
        },
        EncodingScheme::Hash { bits: 40 },
        EncodingScheme::Qoe(qoe_set(k)),
        EncodingScheme::Spherical(spherical_set(k)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_scheme_round_trips(labels in labels(64), base in 2u32..8) {
        let dict = CategoryDictionary::from_labels(labels.clone()).unwrap();
        for scheme in all_schemes(labels.len(), base) {
            let name = scheme.to_string();
            let enc = Encoder::new(dict.clone(), scheme).unwrap();
            for (i, l) in labels.iter().enumerate() {
                let v = enc.encode(l).unwrap();
                prop_assert_eq!(v.len(), enc.output_dim(), "{}", name);
                let d = enc.decode(&v).unwrap();
                prop_assert_eq!(d.label, l.as_str(), "{}", name);
                prop_assert_eq!(d.ordinal, i);
            }
        }
    }

    #[test]
    fn onehot_is_qoe_with_the_standard_basis(labels in labels(40)) {
        let k = labels.len();
        let dict = CategoryDictionary::from_labels(labels.clone()).unwrap();
        let onehot = Encoder::new(dict.clone(), EncodingScheme::OneHot).unwrap();
        let qoe = Encoder::new(dict, EncodingScheme::Qoe(UnitVectorSet::standard_basis(k).unwrap())).unwrap();
        for l in &labels {
            let v = onehot.encode(l).unwrap();
            prop_assert_eq!(&v, &qoe.encode(l).unwrap());
            prop_assert_eq!(onehot.decode(&v).unwrap(), qoe.decode(&v).unwrap());
        }
    }

    #[test]
    fn digit_width_matches_the_largest_code(k in 1usize..300, base in 2u32..10) {
        let dict = CategoryDictionary::from_labels((0..k).map(|i| format!("l{i}")).collect()).unwrap();
        let enc = Encoder::new(dict, EncodingScheme::BaseN { base, balanced: false }).unwrap();
        // smallest w with base^w > k, i.e. enough digits for ordinal + 1 = k
        let mut w = 0u32;
        while u64::from(base).pow(w) <= k as u64 {
            w += 1;
        }
        prop_assert_eq!(enc.output_dim(), w as usize);
    }

    #[test]
    fn fit_keeps_first_appearance_order(values in prop::collection::vec("[a-e]", 1..40)) {
        let dict = CategoryDictionary::fit(&values).unwrap();
        let mut seen: Vec<&str> = Vec::new();
        for v in &values {
            if !seen.contains(&v.as_str()) {
                seen.push(v);
            }
        }
        prop_assert_eq!(dict.labels(), seen.as_slice());
        for (i, l) in dict.labels().iter().enumerate() {
            prop_assert_eq!(dict.ordinal(l).unwrap(), i);
        }
    }

    #[test]
    fn capacity_bound_is_monotone(dim in 1usize..40, e1 in 0.01f64..0.99, e2 in 0.01f64..0.99) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let a = capacity_lower_bound(dim, lo).unwrap();
        prop_assert!(a <= capacity_lower_bound(dim, hi).unwrap());
        prop_assert!(a <= capacity_lower_bound(dim + 1, lo).unwrap());
        prop_assert!(a >= 1);
    }

    #[test]
    fn basis_code_basis_is_identity_up_to_sign(set in (1usize..7).prop_flat_map(|d| unit_set(d, d, SetKind::QuasiorthonormalBasis))) {
        let code = basis_to_code(&set).unwrap();
        prop_assert_eq!(code.len(), 2 * set.len());
        let back = code_to_basis(&code).unwrap();
        prop_assert_eq!(back.len(), set.len());
        for (a, b) in set.vectors().zip(back.vectors()) {
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            prop_assert!((dot.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn accepted_sets_are_normal(set in (1usize..9, 1usize..12).prop_flat_map(|(d, k)| unit_set(d, k, SetKind::SphericalCode))) {
        let report = validate(&set.to_rows(), 1.0).unwrap();
        prop_assert!(report.is_normal);
        for v in set.vectors() {
            let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!((n - 1.0).abs() <= 1e-9);
        }
        prop_assert_eq!(report.max_abs_dot_observed, set.max_abs_dot());
    }

    #[test]
    fn set_files_round_trip_exactly(set in (1usize..9, 1usize..12).prop_flat_map(|(d, k)| unit_set(d, k, SetKind::SphericalCode))) {
        let mut buf = Vec::new();
        write_set(&set, &mut buf).unwrap();
        let back = read_set(buf.as_slice()).unwrap();
        prop_assert_eq!(back.as_flat(), set.as_flat());
        prop_assert_eq!(back.kind(), set.kind());
    }

    #[test]
    fn csv_matrix_round_trips(rows in prop::collection::vec(prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 4), 0..50)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let header: Vec<String> = (0..4).map(|i| format!("c{i}")).collect();
        write_matrix_csv(&path, &rows, &header).unwrap();
        let (h, back) = read_matrix_csv(&path).unwrap();
        prop_assert_eq!(h, header);
        prop_assert_eq!(back, rows);
    }

    #[test]
    fn qsoftmax_is_a_distribution(
        q in (1usize..6, 1usize..12).prop_flat_map(|(d, k)| unit_set(d, k, SetKind::SphericalCode)),
        scale in prop_oneof![Just(1.0), Just(100.0), Just(1e4)],
        seed in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let q = CoordinateMatrix::from_set(&q);
        let z: Vec<f64> = seed[..q.cols()].iter().map(|x| x * scale).collect();
        let p = qsoftmax(&z, &q).unwrap();
        prop_assert_eq!(p.len(), q.rows());
        prop_assert!(p.values().iter().all(|x| x.is_finite() && *x >= 0.0));
        prop_assert!((p.values().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert_eq!(qargmax(&z, &q).unwrap(), p.argmax());
    }

    #[test]
    fn shifting_the_scores_leaves_qsoftmax_unchanged(
        q in (1usize..6, 2usize..12).prop_flat_map(|(d, k)| unit_set(d, k, SetKind::SphericalCode)),
        z in prop::collection::vec(-5.0f64..5.0, 6),
        c in -50.0f64..50.0,
    ) {
        let q = CoordinateMatrix::from_set(&q);
        let z = &z[..q.cols()];
        let scores = q.project(z).unwrap();
        let shifted: Vec<f64> = scores.iter().map(|s| s + c).collect();
        let a = qsoftmax(z, &q).unwrap();
        let b = softmax(&shifted).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_bases_meet_their_target(
        dim in 2usize..=8,
        ratio in 0.25f64..=2.0,
        target in 0.3f64..0.95,
        seed in any::<u64>(),
    ) {
        let count = ((dim as f64 * ratio).round() as usize).clamp(1, 2 * dim);
        let config = GenerationConfig {
            restarts: 2,
            max_iterations: 1000,
            ..GenerationConfig::new(dim, count, target, seed)
        };
        match generate_basis(&config) {
            Ok(set) => {
                prop_assert_eq!((set.dim(), set.len()), (dim, count));
                let rows = set.to_rows();
                for i in 0..count {
                    for j in 0..count {
                        if i != j {
                            let d: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
                            prop_assert!(d.abs() <= target, "{} > {}", d.abs(), target);
                        }
                    }
                }
            }
            Err(GeometryError::TargetUnreachable { best, .. }) => prop_assert!(best > target),
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }
}

#[test]
fn generation_is_reproducible() {
    let config = GenerationConfig::new(5, 8, 0.45, 17);
    let a = generate_basis(&config).unwrap();
    let b = generate_basis(&config).unwrap();
    assert_eq!(a.as_flat(), b.as_flat());
}

#[test]
fn hash_codes_are_stable_across_runs() {
    // FNV-1a of "Toyota", low 8 bits, most significant bit first.
    let dict = CategoryDictionary::from_labels(vec!["Toyota".into()]).unwrap();
    let enc = Encoder::new(dict, EncodingScheme::Hash { bits: 8 }).unwrap();
    let h = qoc::encoders::fnv1a64(b"Toyota") & 0xff;
    let expected: Vec<f64> = (0..8).rev().map(|b| ((h >> b) & 1) as f64).collect();
    assert_eq!(enc.encode("Toyota").unwrap(), expected);
}
