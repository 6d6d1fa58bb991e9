use qoc::dataio::ImageMatrix;
use qoc::geometry::{code_to_basis, packs};
use qoc::nn::{confusion_matrix, evaluate, MlpModel};
use qoc::qsoftmax::{softmax, CoordinateMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_images(n: usize, cols: usize, rng: &mut ChaCha8Rng) -> (ImageMatrix, Vec<u8>) {
    // Sparse inputs in [0, 1], like normalised MNIST pixels.
    let data = (0..n * cols)
        .map(|_| {
            if rng.gen_bool(0.3) {
                rng.gen::<f32>()
            } else {
                0.0
            }
        })
        .collect();
    let labels = (0..n).map(|i| (i % 10) as u8).collect();
    (
        ImageMatrix {
            rows: n,
            cols,
            data,
        },
        labels,
    )
}

#[test]
fn identity_head_is_the_plain_softmax_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let model =
        MlpModel::<f32>::new(784, 64, 0.2, CoordinateMatrix::identity(10), &mut rng).unwrap();
    let (images, _) = random_images(20, 784, &mut rng);
    for i in 0..images.rows {
        let x = images.row(i);
        let p = model.forward::<ChaCha8Rng>(x, None).unwrap();
        let reference = softmax(&model.logits(x).unwrap()).unwrap();
        assert_eq!(p.values(), reference.values());
    }
}

#[test]
fn untrained_models_are_at_chance() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (images, labels) = random_images(3000, 784, &mut rng);
    let heads = [
        CoordinateMatrix::identity(10),
        CoordinateMatrix::from_set(
            &code_to_basis(&packs::seven_dim_56())
                .unwrap()
                .truncated(10)
                .unwrap(),
        ),
        CoordinateMatrix::from_set(&packs::three_dim_10()),
    ];
    for q in heads {
        let model = MlpModel::<f32>::new(784, 64, 0.2, q, &mut rng).unwrap();
        let acc = evaluate(&model, &images, &labels).unwrap();
        assert!((0.05..=0.2).contains(&acc), "accuracy {acc}");
    }
}

#[test]
fn accuracy_agrees_with_the_confusion_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (images, labels) = random_images(500, 784, &mut rng);
    let q = CoordinateMatrix::from_set(&packs::three_dim_10());
    let model = MlpModel::<f32>::new(784, 32, 0.0, q, &mut rng).unwrap();
    let acc = evaluate(&model, &images, &labels).unwrap();
    let counts = confusion_matrix(&model, &images, &labels).unwrap();
    let total: u64 = counts.iter().flatten().sum();
    let wrong: u64 = (0..10)
        .flat_map(|t| (0..10).filter(move |&p| p != t).map(move |p| (t, p)))
        .map(|(t, p)| counts[t][p])
        .sum();
    assert_eq!(total, 500);
    assert!((acc - (1.0 - wrong as f64 / total as f64)).abs() < 1e-12);
    assert_eq!(evaluate(&model, &images, &labels).unwrap(), acc);
}
