//! A one-hidden-layer perceptron with a qsoftmax output head.
//!
//! `input -> dense(H) -> ReLU -> dropout -> dense(d) -> qsoftmax(Q)`, where
//! `Q` is the `K x d` coordinate matrix of the label encoding. With `Q = I`
//! this is the ordinary softmax classifier.
//!
//! The network is generic over the float type. Training uses `f32`; losses
//! and metrics accumulate in `f64`. The `f64` instantiation exists mainly for
//! finite-difference checks.

use std::io::{Read, Write};

use num_traits::{Float, NumCast};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dataio::{ImageMatrix, MnistDataset};
use crate::qsoftmax::{self, CoordinateMatrix, ProbabilityVector, QsoftmaxError};

#[derive(Debug, Error)]
pub enum NnError {
    #[error("non-finite activations in {layer}")]
    NonFinite { layer: &'static str },
    #[error("training diverged at epoch {epoch}, batch {batch}")]
    Diverged { epoch: usize, batch: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Qsoftmax(#[from] QsoftmaxError),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

/// Float types the network can run in.
pub trait Scalar: Float + NumCast + Send + Sync + std::fmt::Debug + 'static {}
impl Scalar for f32 {}
impl Scalar for f64 {}

fn cast<T: Scalar>(x: f64) -> T {
    T::from(x).expect("float cast")
}

/// Network weights plus the output coordinate matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel<T: Scalar = f32> {
    input: usize,
    hidden: usize,
    output: usize,
    /// `input x hidden`, input-major so sparse pixels touch contiguous rows.
    w1: Vec<T>,
    b1: Vec<T>,
    /// `hidden x output`
    w2: Vec<T>,
    b2: Vec<T>,
    dropout: f64,
    q: CoordinateMatrix,
}

/// Gradients laid out like the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T: Scalar> {
    pub w1: Vec<T>,
    pub b1: Vec<T>,
    pub w2: Vec<T>,
    pub b2: Vec<T>,
}

impl<T: Scalar> Gradients<T> {
    fn zeros_like(m: &MlpModel<T>) -> Self {
        Gradients {
            w1: vec![T::zero(); m.w1.len()],
            b1: vec![T::zero(); m.b1.len()],
            w2: vec![T::zero(); m.w2.len()],
            b2: vec![T::zero(); m.b2.len()],
        }
    }

    fn clear(&mut self) {
        for v in [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2] {
            v.iter_mut().for_each(|x| *x = T::zero());
        }
    }

    /// `[w1, b1, w2, b2]`
    pub fn slices(&self) -> [&[T]; 4] {
        [&self.w1, &self.b1, &self.w2, &self.b2]
    }
}

/// Per-sample buffers reused across a batch.
struct Scratch<T> {
    pre: Vec<T>,
    act: Vec<T>,
    mask: Vec<T>,
    logits: Vec<f64>,
    grad_act: Vec<T>,
}

impl<T: Scalar> MlpModel<T> {
    /// Uniform `±1/sqrt(fan_in)` weights, zero biases.
    pub fn new<R: Rng>(
        input: usize,
        hidden: usize,
        dropout: f64,
        q: CoordinateMatrix,
        rng: &mut R,
    ) -> Result<Self, NnError> {
        if input == 0 || hidden == 0 {
            return Err(NnError::Config("layer widths must be positive".into()));
        }
        if !(0.0..1.0).contains(&dropout) {
            return Err(NnError::Config(format!(
                "dropout must be in [0, 1), got {dropout}"
            )));
        }
        let output = q.cols();
        let mut uniform = |fan_in: usize, n: usize| -> Vec<T> {
            let bound = 1.0 / (fan_in as f64).sqrt();
            (0..n).map(|_| cast(rng.gen_range(-bound..bound))).collect()
        };
        let w1 = uniform(input, input * hidden);
        let w2 = uniform(hidden, hidden * output);
        Ok(MlpModel {
            input,
            hidden,
            output,
            w1,
            b1: vec![T::zero(); hidden],
            w2,
            b2: vec![T::zero(); output],
            dropout,
            q,
        })
    }

    /// A model with every weight and bias zero.
    pub fn zeros(input: usize, hidden: usize, dropout: f64, q: CoordinateMatrix) -> Self {
        let output = q.cols();
        MlpModel {
            input,
            hidden,
            output,
            w1: vec![T::zero(); input * hidden],
            b1: vec![T::zero(); hidden],
            w2: vec![T::zero(); hidden * output],
            b2: vec![T::zero(); output],
            dropout,
            q,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden
    }

    /// Width `d` of the encoded output layer.
    pub fn output_dim(&self) -> usize {
        self.output
    }

    pub fn classes(&self) -> usize {
        self.q.rows()
    }

    pub fn coordinate_matrix(&self) -> &CoordinateMatrix {
        &self.q
    }

    pub fn dropout(&self) -> f64 {
        self.dropout
    }

    /// `[w1, b1, w2, b2]`
    pub fn parameters(&self) -> [&[T]; 4] {
        [&self.w1, &self.b1, &self.w2, &self.b2]
    }

    pub fn parameters_mut(&mut self) -> [&mut [T]; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }

    fn scratch(&self) -> Scratch<T> {
        Scratch {
            pre: vec![T::zero(); self.hidden],
            act: vec![T::zero(); self.hidden],
            mask: vec![T::one(); self.hidden],
            logits: vec![0.0; self.output],
            grad_act: vec![T::zero(); self.hidden],
        }
    }

    /// Fills `s.pre`, `s.act` and `s.logits`. With `rng`, applies inverted
    /// dropout and records the scaled mask in `s.mask`.
    fn forward_into<R: Rng>(
        &self,
        x: &[T],
        rng: Option<&mut R>,
        s: &mut Scratch<T>,
    ) -> Result<(), NnError> {
        let h = self.hidden;
        s.pre.copy_from_slice(&self.b1);
        for (p, &xp) in x.iter().enumerate() {
            if xp != T::zero() {
                let row = &self.w1[p * h..(p + 1) * h];
                s.pre
                    .iter_mut()
                    .zip(row)
                    .for_each(|(a, &w)| *a = *a + xp * w);
            }
        }
        match rng {
            Some(rng) if self.dropout > 0.0 => {
                let keep = cast::<T>(1.0 / (1.0 - self.dropout));
                for m in s.mask.iter_mut() {
                    *m = if rng.gen::<f64>() < self.dropout {
                        T::zero()
                    } else {
                        keep
                    };
                }
            }
            _ => s.mask.iter_mut().for_each(|m| *m = T::one()),
        }
        for ((a, &z), &m) in s.act.iter_mut().zip(&s.pre).zip(&s.mask) {
            *a = z.max(T::zero()) * m;
        }
        let o = self.output;
        let mut logits: Vec<T> = self.b2.clone();
        for (j, &a) in s.act.iter().enumerate() {
            if a != T::zero() {
                let row = &self.w2[j * o..(j + 1) * o];
                logits
                    .iter_mut()
                    .zip(row)
                    .for_each(|(l, &w)| *l = *l + a * w);
            }
        }
        for (dst, l) in s.logits.iter_mut().zip(&logits) {
            *dst = l.to_f64().unwrap_or(f64::NAN);
        }
        if s.logits.iter().any(|l| !l.is_finite()) {
            return Err(NnError::NonFinite {
                layer: "output layer",
            });
        }
        Ok(())
    }

    fn check_input(&self, x: &[T]) -> Result<(), NnError> {
        if x.len() != self.input {
            return Err(NnError::Shape(format!(
                "input has {} values, model expects {}",
                x.len(),
                self.input
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(NnError::NonFinite { layer: "input" });
        }
        Ok(())
    }

    /// Pre-activation output `z` in `R^d` (dropout disabled).
    pub fn logits(&self, x: &[T]) -> Result<Vec<f64>, NnError> {
        self.check_input(x)?;
        let mut s = self.scratch();
        self.forward_into::<ChaCha8Rng>(x, None, &mut s)?;
        Ok(s.logits)
    }

    /// Class probabilities `qsoftmax(z, Q)`. Passing `rng` turns on training
    /// mode (dropout); `None` is deterministic inference.
    pub fn forward<R: Rng>(
        &self,
        x: &[T],
        rng: Option<&mut R>,
    ) -> Result<ProbabilityVector, NnError> {
        self.check_input(x)?;
        let mut s = self.scratch();
        self.forward_into(x, rng, &mut s)?;
        Ok(qsoftmax::qsoftmax(&s.logits, &self.q)?)
    }

    /// Predicted class: `qargmax(z, Q)`.
    pub fn predict(&self, x: &[T]) -> Result<usize, NnError> {
        Ok(qsoftmax::qargmax(&self.logits(x)?, &self.q)?)
    }

    /// Adds one sample's gradient into `g` and returns its loss.
    fn accumulate<R: Rng>(
        &self,
        x: &[T],
        target: usize,
        rng: Option<&mut R>,
        s: &mut Scratch<T>,
        g: &mut Gradients<T>,
    ) -> Result<f64, NnError> {
        self.forward_into(x, rng, s)?;
        let (loss, grad_z) = qsoftmax::qsoftmax_cross_entropy(&s.logits, &self.q, target)?;
        let gz: Vec<T> = grad_z.iter().map(|&v| cast(v)).collect();
        let (h, o) = (self.hidden, self.output);
        g.b2.iter_mut().zip(&gz).for_each(|(b, &v)| *b = *b + v);
        for j in 0..h {
            let a = s.act[j];
            let w2row = &self.w2[j * o..(j + 1) * o];
            let mut back = T::zero();
            let grow = &mut g.w2[j * o..(j + 1) * o];
            for c in 0..o {
                grow[c] = grow[c] + a * gz[c];
                back = back + w2row[c] * gz[c];
            }
            s.grad_act[j] = if s.pre[j] > T::zero() {
                back * s.mask[j]
            } else {
                T::zero()
            };
        }
        g.b1.iter_mut()
            .zip(&s.grad_act)
            .for_each(|(b, &v)| *b = *b + v);
        for (p, &xp) in x.iter().enumerate() {
            if xp != T::zero() {
                let row = &mut g.w1[p * h..(p + 1) * h];
                row.iter_mut()
                    .zip(&s.grad_act)
                    .for_each(|(w, &d)| *w = *w + xp * d);
            }
        }
        Ok(loss)
    }

    /// Mean cross-entropy over a batch, dropout disabled.
    pub fn batch_loss(&self, xs: &[Vec<T>], targets: &[usize]) -> Result<f64, NnError> {
        let mut total = 0.0;
        for (x, &t) in xs.iter().zip(targets) {
            let z = self.logits(x)?;
            total += qsoftmax::qsoftmax_cross_entropy(&z, &self.q, t)?.0;
        }
        Ok(total / xs.len() as f64)
    }

    /// Gradient of [`MlpModel::batch_loss`] by backpropagation.
    pub fn batch_gradient(
        &self,
        xs: &[Vec<T>],
        targets: &[usize],
    ) -> Result<Gradients<T>, NnError> {
        let mut g = Gradients::zeros_like(self);
        let mut s = self.scratch();
        for (x, &t) in xs.iter().zip(targets) {
            self.check_input(x)?;
            self.accumulate::<ChaCha8Rng>(x, t, None, &mut s, &mut g)?;
        }
        let scale = cast::<T>(1.0 / xs.len() as f64);
        for v in [&mut g.w1, &mut g.b1, &mut g.w2, &mut g.b2] {
            v.iter_mut().for_each(|x| *x = *x * scale);
        }
        Ok(g)
    }
}

const CHECKPOINT_MAGIC: &[u8; 8] = b"QOCMLP\0\0";
const CHECKPOINT_VERSION: u32 = 1;

fn put_u64<W: Write>(w: &mut W, v: u64) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_f64s<W: Write>(w: &mut W, values: impl Iterator<Item = f64>) -> std::io::Result<()> {
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn take<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N], NnError> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)
        .map_err(|e| NnError::Checkpoint(e.to_string()))?;
    Ok(b)
}

fn take_f64s<R: Read>(r: &mut R, n: usize) -> Result<Vec<f64>, NnError> {
    (0..n)
        .map(|_| take::<R, 8>(r).map(f64::from_le_bytes))
        .collect()
}

impl<T: Scalar> MlpModel<T> {
    /// Binary checkpoint: magic, version, shapes, dropout, `Q`, then
    /// `w1, b1, w2, b2`, all little-endian. Parameters are stored as `f64`,
    /// which holds `f32` values exactly.
    pub fn save<W: Write>(&self, mut w: W) -> Result<(), NnError> {
        let io = |e: std::io::Error| NnError::Checkpoint(e.to_string());
        w.write_all(CHECKPOINT_MAGIC).map_err(io)?;
        w.write_all(&CHECKPOINT_VERSION.to_le_bytes()).map_err(io)?;
        for d in [self.input, self.hidden, self.output, self.q.rows()] {
            put_u64(&mut w, d as u64).map_err(io)?;
        }
        put_f64s(&mut w, std::iter::once(self.dropout)).map_err(io)?;
        put_f64s(&mut w, self.q.as_flat().iter().copied()).map_err(io)?;
        for p in self.parameters() {
            put_f64s(&mut w, p.iter().map(|v| v.to_f64().unwrap_or(f64::NAN))).map_err(io)?;
        }
        Ok(())
    }

    pub fn load<R: Read>(mut r: R) -> Result<Self, NnError> {
        let magic = take::<R, 8>(&mut r)?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(NnError::Checkpoint("not a model checkpoint".into()));
        }
        let version = u32::from_le_bytes(take::<R, 4>(&mut r)?);
        if version != CHECKPOINT_VERSION {
            return Err(NnError::Checkpoint(format!(
                "unsupported version {version}"
            )));
        }
        let mut dims = [0usize; 4];
        for d in dims.iter_mut() {
            *d = u64::from_le_bytes(take::<R, 8>(&mut r)?) as usize;
        }
        let [input, hidden, output, classes] = dims;
        let dropout = take_f64s(&mut r, 1)?[0];
        let q = CoordinateMatrix::from_flat(classes, output, take_f64s(&mut r, classes * output)?)?;
        let mut read_params = |n: usize| -> Result<Vec<T>, NnError> {
            Ok(take_f64s(&mut r, n)?.into_iter().map(cast).collect())
        };
        let w1 = read_params(input * hidden)?;
        let b1 = read_params(hidden)?;
        let w2 = read_params(hidden * output)?;
        let b2 = read_params(output)?;
        Ok(MlpModel {
            input,
            hidden,
            output,
            w1,
            b1,
            w2,
            b2,
            dropout,
            q,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimizer {
    Sgd,
    Adam {
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    },
}

impl Optimizer {
    pub fn adam() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub runs: usize,
    pub hidden: usize,
    pub dropout: f64,
    pub optimizer: Optimizer,
    /// Extra epochs (besides the last) at which accuracies are recorded.
    pub checkpoints: Vec<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            batch_size: 32,
            learning_rate: 0.05,
            seed: 0,
            runs: 3,
            hidden: 64,
            dropout: 0.2,
            optimizer: Optimizer::Sgd,
            checkpoints: Vec::new(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NnError> {
        if self.epochs == 0 || self.batch_size == 0 || self.runs == 0 || self.hidden == 0 {
            return Err(NnError::Config(
                "epochs, batch_size, runs and hidden must be positive".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(NnError::Config("learning_rate must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochAccuracy {
    pub epoch: usize,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    /// Mean training loss per epoch.
    pub loss_curve: Vec<f64>,
    /// Accuracies at each requested checkpoint epoch and at the final epoch.
    pub checkpoints: Vec<EpochAccuracy>,
}

impl Metrics {
    pub fn at_epoch(&self, epoch: usize) -> Option<&EpochAccuracy> {
        self.checkpoints.iter().find(|c| c.epoch == epoch)
    }

    fn mean(all: &[Metrics]) -> Metrics {
        let n = all.len() as f64;
        let avg = |f: &dyn Fn(&Metrics) -> f64| all.iter().map(f).sum::<f64>() / n;
        let epochs = all[0].loss_curve.len();
        let loss_curve = (0..epochs)
            .map(|e| avg(&|m: &Metrics| m.loss_curve[e]))
            .collect();
        let checkpoints = (0..all[0].checkpoints.len())
            .map(|c| EpochAccuracy {
                epoch: all[0].checkpoints[c].epoch,
                train_accuracy: avg(&|m: &Metrics| m.checkpoints[c].train_accuracy),
                test_accuracy: avg(&|m: &Metrics| m.checkpoints[c].test_accuracy),
            })
            .collect();
        Metrics {
            train_accuracy: avg(&|m| m.train_accuracy),
            test_accuracy: avg(&|m| m.test_accuracy),
            loss_curve,
            checkpoints,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub runs: Vec<Metrics>,
    pub mean: Metrics,
}

/// Fraction of samples whose `qargmax` prediction equals the label.
pub fn evaluate(
    model: &MlpModel<f32>,
    images: &ImageMatrix,
    labels: &[u8],
) -> Result<f64, NnError> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    let mut correct = 0u64;
    for (i, &y) in labels.iter().enumerate() {
        if model.predict(images.row(i))? == y as usize {
            correct += 1;
        }
    }
    Ok(correct as f64 / labels.len() as f64)
}

/// `counts[true][predicted]` over the dataset.
pub fn confusion_matrix(
    model: &MlpModel<f32>,
    images: &ImageMatrix,
    labels: &[u8],
) -> Result<Vec<Vec<u64>>, NnError> {
    let k = model.classes();
    let mut counts = vec![vec![0u64; k]; k];
    for (i, &y) in labels.iter().enumerate() {
        counts[y as usize][model.predict(images.row(i))?] += 1;
    }
    Ok(counts)
}

struct AdamState {
    step: i32,
    m: Gradients<f32>,
    v: Gradients<f32>,
}

fn apply_update(
    model: &mut MlpModel<f32>,
    grads: &Gradients<f32>,
    batch: usize,
    config: &TrainConfig,
    adam: &mut Option<AdamState>,
) {
    let scale = 1.0 / batch as f32;
    let lr = config.learning_rate as f32;
    match (config.optimizer, adam) {
        (
            Optimizer::Adam {
                beta1,
                beta2,
                epsilon,
            },
            Some(state),
        ) => {
            state.step += 1;
            let (b1, b2, eps) = (beta1 as f32, beta2 as f32, epsilon as f32);
            let c1 = 1.0 - b1.powi(state.step);
            let c2 = 1.0 - b2.powi(state.step);
            let alpha = lr * c2.sqrt() / c1;
            let params = model.parameters_mut();
            let ms = [
                &mut state.m.w1,
                &mut state.m.b1,
                &mut state.m.w2,
                &mut state.m.b2,
            ];
            let vs = [
                &mut state.v.w1,
                &mut state.v.b1,
                &mut state.v.w2,
                &mut state.v.b2,
            ];
            for (((p, g), m), v) in params.into_iter().zip(grads.slices()).zip(ms).zip(vs) {
                for i in 0..p.len() {
                    let gi = g[i] * scale;
                    m[i] = b1 * m[i] + (1.0 - b1) * gi;
                    v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
                    p[i] -= alpha * m[i] / (v[i].sqrt() + eps);
                }
            }
        }
        _ => {
            let step = lr * scale;
            for (p, g) in model.parameters_mut().into_iter().zip(grads.slices()) {
                p.iter_mut().zip(g).for_each(|(w, &d)| *w -= step * d);
            }
        }
    }
}

/// Trains `model` in place for one run. The RNG drives shuffling and dropout.
pub fn train_model(
    model: &mut MlpModel<f32>,
    data: &MnistDataset,
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Metrics, NnError> {
    config.validate()?;
    if data.train_images.cols != model.input_dim() {
        return Err(NnError::Shape(format!(
            "images have {} pixels, model expects {}",
            data.train_images.cols,
            model.input_dim()
        )));
    }
    let n = data.train_labels.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut grads = Gradients::zeros_like(model);
    let mut scratch = model.scratch();
    let mut adam = match config.optimizer {
        Optimizer::Adam { .. } => Some(AdamState {
            step: 0,
            m: Gradients::zeros_like(model),
            v: Gradients::zeros_like(model),
        }),
        Optimizer::Sgd => None,
    };
    let mut loss_curve = Vec::with_capacity(config.epochs);
    let mut checkpoints = Vec::new();
    for epoch in 1..=config.epochs {
        order.shuffle(rng);
        let mut epoch_loss = 0.0f64;
        for (batch, chunk) in order.chunks(config.batch_size).enumerate() {
            grads.clear();
            let mut batch_loss = 0.0f64;
            for &i in chunk {
                let target = data.train_labels[i] as usize;
                batch_loss += model.accumulate(
                    data.train_images.row(i),
                    target,
                    Some(&mut *rng),
                    &mut scratch,
                    &mut grads,
                )?;
            }
            if !batch_loss.is_finite() {
                return Err(NnError::Diverged { epoch, batch });
            }
            epoch_loss += batch_loss;
            apply_update(model, &grads, chunk.len(), config, &mut adam);
        }
        loss_curve.push(epoch_loss / n.max(1) as f64);
        if epoch == config.epochs || config.checkpoints.contains(&epoch) {
            checkpoints.push(EpochAccuracy {
                epoch,
                train_accuracy: evaluate(model, &data.train_images, &data.train_labels)?,
                test_accuracy: evaluate(model, &data.test_images, &data.test_labels)?,
            });
        }
    }
    let last = *checkpoints.last().expect("final epoch recorded");
    Ok(Metrics {
        train_accuracy: last.train_accuracy,
        test_accuracy: last.test_accuracy,
        loss_curve,
        checkpoints,
    })
}

/// Seed for run `run`: every run gets its own stream derived from `seed`.
pub fn run_seed(seed: u64, run: usize) -> u64 {
    seed.wrapping_add(run as u64)
}

/// Trains `config.runs` freshly initialised models and averages their metrics.
pub fn train(
    q: &CoordinateMatrix,
    data: &MnistDataset,
    config: &TrainConfig,
) -> Result<TrainReport, NnError> {
    config.validate()?;
    let mut runs = Vec::with_capacity(config.runs);
    for run in 0..config.runs {
        let mut rng = ChaCha8Rng::seed_from_u64(run_seed(config.seed, run));
        let mut model = MlpModel::new(
            data.train_images.cols,
            config.hidden,
            config.dropout,
            q.clone(),
            &mut rng,
        )?;
        runs.push(train_model(&mut model, data, config, &mut rng)?);
    }
    let mean = Metrics::mean(&runs);
    Ok(TrainReport { runs, mean })
}
