//! Two-hidden-layer ReLU network with a softmax output, trained with Adam on
//! cross-entropy plus L2 and early-stopped on validation loss.

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Task;
use crate::error::{IronyError, Result};

const LOG_FLOOR: f64 = 1e-300;
const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden: (usize, usize),
    pub learning_rate: f64,
    pub l2: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl MlpConfig {
    pub fn for_task(task: Task) -> Self {
        MlpConfig {
            hidden: match task {
                Task::A => (800, 400),
                Task::B => (800, 300),
            },
            learning_rate: 1e-4,
            l2: 1e-5,
            max_epochs: 100,
            patience: 30,
            batch_size: 32,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden.0 == 0 || self.hidden.1 == 0 {
            return Err(IronyError::Config(
                "hidden layer sizes must be positive".into(),
            ));
        }
        if self.batch_size == 0 || self.max_epochs == 0 {
            return Err(IronyError::Config(
                "batch size and epochs must be positive".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(IronyError::Config("learning rate must be positive".into()));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(IronyError::Config("l2 must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// `fan_in × fan_out`.
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl Layer {
    fn zeros_like(&self) -> Layer {
        Layer {
            w: Array2::zeros(self.w.raw_dim()),
            b: Array1::zeros(self.b.raw_dim()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub layers: Vec<Layer>,
}

/// Gradients, shaped like [`MlpModel::layers`].
pub type Gradients = Vec<Layer>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingLog {
    pub epochs: Vec<EpochLog>,
    pub best_epoch: usize,
    pub best_val_loss: f64,
}

impl TrainingLog {
    /// `epoch,train_loss,val_loss` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,train_loss,val_loss\n");
        for e in &self.epochs {
            s.push_str(&format!("{},{},{}\n", e.epoch, e.train_loss, e.val_loss));
        }
        s
    }
}

struct Activations {
    z: Vec<Array2<f64>>,
    h: Vec<Array2<f64>>,
    probs: Array2<f64>,
}

fn relu(z: &Array2<f64>) -> Array2<f64> {
    z.mapv(|v| v.max(0.0))
}

fn softmax_rows(z: &mut Array2<f64>) {
    for mut row in z.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
}

/// Lowest index among the maxima.
pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate() {
        if v > p[best] {
            best = i;
        }
    }
    best
}

impl MlpModel {
    /// He-uniform weights for the ReLU layers, Glorot-uniform for the output
    /// layer, zero biases.
    pub fn init(dims: [usize; 4], seed: u64) -> Result<Self> {
        if dims.contains(&0) {
            return Err(IronyError::Config(format!(
                "network dimensions must be positive, got {dims:?}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = (0..3)
            .map(|i| {
                let (fan_in, fan_out) = (dims[i], dims[i + 1]);
                let limit = if i < 2 {
                    (6.0 / fan_in as f64).sqrt()
                } else {
                    (6.0 / (fan_in + fan_out) as f64).sqrt()
                };
                Layer {
                    w: Array2::from_shape_simple_fn((fan_in, fan_out), || {
                        rng.random_range(-limit..limit)
                    }),
                    b: Array1::zeros(fan_out),
                }
            })
            .collect();
        Ok(MlpModel { layers })
    }

    pub fn dims(&self) -> [usize; 4] {
        [
            self.layers[0].w.nrows(),
            self.layers[0].w.ncols(),
            self.layers[1].w.ncols(),
            self.layers[2].w.ncols(),
        ]
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].w.nrows()
    }

    pub fn num_classes(&self) -> usize {
        self.layers[2].w.ncols()
    }

    fn check_input(&self, cols: usize) -> Result<()> {
        if cols != self.input_dim() {
            return Err(IronyError::Validation(format!(
                "feature vector has {cols} values, network expects {}",
                self.input_dim()
            )));
        }
        Ok(())
    }

    fn activations(&self, x: ArrayView2<f64>) -> Activations {
        let mut z = Vec::with_capacity(3);
        let mut h = Vec::with_capacity(2);
        let mut input = x.to_owned();
        for (i, layer) in self.layers.iter().enumerate() {
            let zi = input.dot(&layer.w) + &layer.b;
            if i < 2 {
                input = relu(&zi);
                h.push(input.clone());
            }
            z.push(zi);
        }
        let mut probs = z[2].clone();
        softmax_rows(&mut probs);
        Activations { z, h, probs }
    }

    /// Class probabilities for each row of `x`.
    pub fn forward_batch(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_input(x.ncols())?;
        Ok(self.activations(x).probs)
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let view = ArrayView2::from_shape((1, x.len()), x).expect("row shape");
        Ok(self.forward_batch(view)?.row(0).to_vec())
    }

    pub fn predict(&self, x: &[f64]) -> Result<(u32, Vec<f64>)> {
        let p = self.forward(x)?;
        Ok((argmax(&p) as u32, p))
    }

    pub fn l2_penalty(&self, l2: f64) -> f64 {
        l2 * self
            .layers
            .iter()
            .map(|l| l.w.iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>()
    }

    fn data_loss(probs: &Array2<f64>, y: &[u32]) -> f64 {
        let total: f64 = y
            .iter()
            .enumerate()
            .map(|(i, &c)| -probs[[i, c as usize]].max(LOG_FLOOR).ln())
            .sum();
        total / y.len() as f64
    }

    fn check_batch(&self, x: ArrayView2<f64>, y: &[u32]) -> Result<()> {
        self.check_input(x.ncols())?;
        if x.nrows() != y.len() || y.is_empty() {
            return Err(IronyError::Validation(format!(
                "batch has {} rows and {} labels",
                x.nrows(),
                y.len()
            )));
        }
        if let Some(&c) = y.iter().find(|&&c| c as usize >= self.num_classes()) {
            return Err(IronyError::Validation(format!(
                "label {c} out of range for {} classes",
                self.num_classes()
            )));
        }
        Ok(())
    }

    /// Mean cross-entropy plus `l2 · Σ‖W‖²` (biases excluded).
    pub fn loss(&self, x: ArrayView2<f64>, y: &[u32], l2: f64) -> Result<f64> {
        self.check_batch(x, y)?;
        let a = self.activations(x);
        Ok(Self::data_loss(&a.probs, y) + self.l2_penalty(l2))
    }

    /// Analytic gradients of [`MlpModel::loss`]; the ReLU derivative at 0 is 0.
    pub fn gradients(&self, x: ArrayView2<f64>, y: &[u32], l2: f64) -> Result<Gradients> {
        self.check_batch(x, y)?;
        let a = self.activations(x);
        Ok(self.backward(x, y, l2, &a))
    }

    fn backward(&self, x: ArrayView2<f64>, y: &[u32], l2: f64, a: &Activations) -> Gradients {
        let n = y.len() as f64;
        let mut delta = a.probs.clone();
        for (i, &c) in y.iter().enumerate() {
            delta[[i, c as usize]] -= 1.0;
        }
        delta /= n;
        let mut grads: Vec<Layer> = Vec::with_capacity(3);
        for i in (0..3).rev() {
            let input = if i == 0 { x } else { a.h[i - 1].view() };
            let mut w = input.t().dot(&delta);
            w.scaled_add(2.0 * l2, &self.layers[i].w);
            let b = delta.sum_axis(Axis(0));
            if i > 0 {
                let mut next = delta.dot(&self.layers[i].w.t());
                Zip::from(&mut next).and(&a.z[i - 1]).for_each(|d, &z| {
                    if z <= 0.0 {
                        *d = 0.0;
                    }
                });
                delta = next;
            }
            grads.push(Layer { w, b });
        }
        grads.reverse();
        grads
    }
}

struct Adam {
    m: Vec<Layer>,
    v: Vec<Layer>,
    t: i32,
    lr: f64,
}

impl Adam {
    fn new(model: &MlpModel, lr: f64) -> Self {
        Adam {
            m: model.layers.iter().map(Layer::zeros_like).collect(),
            v: model.layers.iter().map(Layer::zeros_like).collect(),
            t: 0,
            lr,
        }
    }

    fn step(&mut self, model: &mut MlpModel, grads: &Gradients) {
        self.t += 1;
        let c1 = 1.0 - BETA1.powi(self.t);
        let c2 = 1.0 - BETA2.powi(self.t);
        let lr = self.lr;
        let update = |p: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
            *m = BETA1 * *m + (1.0 - BETA1) * g;
            *v = BETA2 * *v + (1.0 - BETA2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + ADAM_EPS);
        };
        for (((layer, m), v), g) in model
            .layers
            .iter_mut()
            .zip(&mut self.m)
            .zip(&mut self.v)
            .zip(grads)
        {
            Zip::from(&mut layer.w)
                .and(&mut m.w)
                .and(&mut v.w)
                .and(&g.w)
                .for_each(|p, m, v, &g| update(p, m, v, g));
            Zip::from(&mut layer.b)
                .and(&mut m.b)
                .and(&mut v.b)
                .and(&g.b)
                .for_each(|p, m, v, &g| update(p, m, v, g));
        }
    }
}

/// Trains from `model`'s current weights and returns the parameters with the
/// lowest validation loss. Training stops once `patience` consecutive epochs
/// fail to improve on it, or after `max_epochs`.
pub fn train(
    mut model: MlpModel,
    train_x: ArrayView2<f64>,
    train_y: &[u32],
    val_x: ArrayView2<f64>,
    val_y: &[u32],
    config: &MlpConfig,
) -> Result<(MlpModel, TrainingLog)> {
    config.validate()?;
    if train_y.is_empty() || val_y.is_empty() {
        return Err(IronyError::Validation(
            "training and validation splits must be non-empty".into(),
        ));
    }
    model.check_batch(train_x, train_y)?;
    model.check_batch(val_x, val_y)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_ba7c);
    let mut adam = Adam::new(&model, config.learning_rate);
    let mut order: Vec<usize> = (0..train_y.len()).collect();
    let mut best = model.clone();
    let mut best_loss = f64::INFINITY;
    let mut best_epoch = 0;
    let mut wait = 0;
    let mut epochs = Vec::new();

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        let mut sum = 0.0;
        for batch in order.chunks(config.batch_size) {
            let bx = train_x.select(Axis(0), batch);
            let by: Vec<u32> = batch.iter().map(|&i| train_y[i]).collect();
            let a = model.activations(bx.view());
            sum += (MlpModel::data_loss(&a.probs, &by) + model.l2_penalty(config.l2))
                * batch.len() as f64;
            let grads = model.backward(bx.view(), &by, config.l2, &a);
            adam.step(&mut model, &grads);
        }
        let val_loss = model.loss(val_x, val_y, config.l2)?;
        if !val_loss.is_finite() {
            return Err(IronyError::Internal(format!(
                "validation loss diverged at epoch {epoch}"
            )));
        }
        epochs.push(EpochLog {
            epoch,
            train_loss: sum / train_y.len() as f64,
            val_loss,
        });
        log::debug!(
            "epoch {epoch}: train {:.6} val {val_loss:.6}",
            sum / train_y.len() as f64
        );
        if val_loss < best_loss {
            best_loss = val_loss;
            best = model.clone();
            best_epoch = epoch;
            wait = 0;
        } else {
            wait += 1;
            if wait >= config.patience {
                break;
            }
        }
    }
    Ok((
        best,
        TrainingLog {
            epochs,
            best_epoch,
            best_val_loss: best_loss,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn random(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(&mut rng))
    }

    #[test]
    fn init_shapes_and_determinism() {
        let m = MlpModel::init([4, 3, 2, 2], 7).unwrap();
        let shapes: Vec<_> = m.layers.iter().map(|l| l.w.dim()).collect();
        assert_eq!(shapes, [(4, 3), (3, 2), (2, 2)]);
        assert!(m.layers.iter().all(|l| l.b.iter().all(|&b| b == 0.0)));
        assert_eq!(m, MlpModel::init([4, 3, 2, 2], 7).unwrap());
        assert!(MlpModel::init([4, 0, 2, 2], 7).is_err());
    }

    #[test]
    fn zero_network_is_uniform() {
        let mut m = MlpModel::init([3, 2, 2, 2], 1).unwrap();
        for l in &mut m.layers {
            l.w.fill(0.0);
        }
        assert_eq!(m.forward(&[1.0, -2.0, 3.0]).unwrap(), vec![0.5, 0.5]);
        let x = array![[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]];
        let loss = m.loss(x.view(), &[0, 1], 0.0).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(m.forward(&[1.0]).is_err());
    }

    #[test]
    fn hand_computed_forward() {
        let m = MlpModel {
            layers: vec![
                Layer {
                    w: array![[1.0, -1.0], [0.5, 2.0]],
                    b: array![0.0, 0.5],
                },
                Layer {
                    w: array![[1.0, 0.0], [-1.0, 1.0]],
                    b: array![0.1, -0.2],
                },
                Layer {
                    w: array![[2.0, 0.0], [0.0, 1.0]],
                    b: array![0.0, 0.3],
                },
            ],
        };
        // x = (1, 2): z1 = (1 + 1, -1 + 4 + 0.5) = (2, 3.5)
        // z2 = (2 - 3.5 + 0.1, 3.5 - 0.2) = (-1.4, 3.3) -> h2 = (0, 3.3)
        // z3 = (0, 3.3 + 0.3) = (0, 3.6)
        let p = m.forward(&[1.0, 2.0]).unwrap();
        let e = (3.6f64).exp();
        assert!((p[0] - 1.0 / (1.0 + e)).abs() < 1e-12);
        assert!((p[1] - e / (1.0 + e)).abs() < 1e-12);
        assert_eq!(m.predict(&[1.0, 2.0]).unwrap().0, 1);
    }

    #[test]
    fn l2_term_by_hand() {
        let m = MlpModel {
            layers: vec![
                Layer {
                    w: array![[1.0, 2.0]],
                    b: array![5.0, 5.0],
                },
                Layer {
                    w: array![[1.0], [0.0]],
                    b: array![5.0],
                },
                Layer {
                    w: array![[3.0, -1.0]],
                    b: array![0.0, 0.0],
                },
            ],
        };
        assert!((m.l2_penalty(0.1) - 0.1 * (1.0 + 4.0 + 1.0 + 9.0 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn perfect_predictions_have_near_zero_loss() {
        let mut m = MlpModel::init([1, 1, 1, 2], 0).unwrap();
        m.layers[0].w.fill(1.0);
        m.layers[1].w.fill(1.0);
        m.layers[2].w = array![[-100.0, 100.0]];
        let loss = m.loss(array![[1.0]].view(), &[1], 0.0).unwrap();
        assert!(loss < 1e-80);
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax(&[0.7, 0.3]), 0);
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.2, 0.4, 0.4]), 1);
    }

    #[test]
    fn logit_shift_keeps_label() {
        let mut m = MlpModel::init([3, 4, 4, 3], 2).unwrap();
        let x = [0.3, -1.0, 2.0];
        let (label, _) = m.predict(&x).unwrap();
        m.layers[2].b += 17.0;
        assert_eq!(m.predict(&x).unwrap().0, label);
    }

    /// Central differences over every parameter.
    pub(crate) fn max_gradient_error(m: &MlpModel, x: ArrayView2<f64>, y: &[u32], l2: f64) -> f64 {
        let g = m.gradients(x, y, l2).unwrap();
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        let mut probe = m.clone();
        let rel = |a: f64, n: f64| (a - n).abs() / (a.abs() + n.abs()).max(1e-7);
        for li in 0..3 {
            for idx in 0..m.layers[li].w.len() {
                let (r, c) = (idx / m.layers[li].w.ncols(), idx % m.layers[li].w.ncols());
                let orig = probe.layers[li].w[[r, c]];
                probe.layers[li].w[[r, c]] = orig + h;
                let up = probe.loss(x, y, l2).unwrap();
                probe.layers[li].w[[r, c]] = orig - h;
                let down = probe.loss(x, y, l2).unwrap();
                probe.layers[li].w[[r, c]] = orig;
                worst = worst.max(rel(g[li].w[[r, c]], (up - down) / (2.0 * h)));
            }
            for j in 0..m.layers[li].b.len() {
                let orig = probe.layers[li].b[j];
                probe.layers[li].b[j] = orig + h;
                let up = probe.loss(x, y, l2).unwrap();
                probe.layers[li].b[j] = orig - h;
                let down = probe.loss(x, y, l2).unwrap();
                probe.layers[li].b[j] = orig;
                worst = worst.max(rel(g[li].b[j], (up - down) / (2.0 * h)));
            }
        }
        worst
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut m = MlpModel::init([6, 4, 3, 2], 3).unwrap();
        for l in &mut m.layers {
            l.b = Array1::from_shape_fn(l.b.len(), |i| 0.1 * (i as f64 + 1.0));
        }
        let x = random(5, 6, 4);
        assert!(max_gradient_error(&m, x.view(), &[0, 1, 1, 0, 1], 1e-3) < 1e-4);
    }

    #[test]
    fn duplicated_batch_same_gradient_and_l2_part() {
        let m = MlpModel::init([3, 4, 3, 2], 5).unwrap();
        let x = random(2, 3, 6);
        let xx = ndarray::concatenate(Axis(0), &[x.view(), x.view()]).unwrap();
        let g1 = m.gradients(x.view(), &[0, 1], 0.0).unwrap();
        let g2 = m.gradients(xx.view(), &[0, 1, 0, 1], 0.0).unwrap();
        for (a, b) in g1.iter().zip(&g2) {
            assert!((&a.w - &b.w).iter().all(|d| d.abs() < 1e-14));
        }
        let gl = m.gradients(x.view(), &[0, 1], 0.25).unwrap();
        for (i, (a, b)) in g1.iter().zip(&gl).enumerate() {
            let diff = &b.w - &a.w;
            let want = &m.layers[i].w * 0.5;
            assert!((&diff - &want).iter().all(|d| d.abs() < 1e-14));
            assert_eq!(a.b, b.b);
        }
    }

    fn separable(n: usize, seed: u64) -> (Array2<f64>, Vec<u32>) {
        let x = random(n, 2, seed);
        let y = x
            .rows()
            .into_iter()
            .map(|r| u32::from(r[0] + r[1] > 0.0))
            .collect();
        (x, y)
    }

    fn quick_config(seed: u64) -> MlpConfig {
        MlpConfig {
            hidden: (16, 8),
            learning_rate: 1e-2,
            l2: 0.0,
            max_epochs: 100,
            patience: 100,
            batch_size: 8,
            seed,
        }
    }

    #[test]
    fn learns_separable_data() {
        let (x, y) = separable(40, 11);
        let m = MlpModel::init([2, 16, 8, 2], 1).unwrap();
        let (trained, log) = train(m, x.view(), &y, x.view(), &y, &quick_config(1)).unwrap();
        let correct = x
            .rows()
            .into_iter()
            .zip(&y)
            .filter(|(r, &l)| trained.predict(r.as_slice().unwrap()).unwrap().0 == l)
            .count();
        assert_eq!(correct, 40);
        for e in &log.epochs {
            assert!(log.best_val_loss <= e.val_loss);
        }
        assert!(log.to_csv().starts_with("epoch,train_loss,val_loss\n1,"));
    }

    #[test]
    fn patience_zero_stops_at_first_stall() {
        let (x, y) = separable(30, 12);
        let (vx, vy) = separable(10, 13);
        let mut cfg = quick_config(2);
        cfg.patience = 0;
        cfg.learning_rate = 0.5;
        let m = MlpModel::init([2, 16, 8, 2], 2).unwrap();
        let (_, log) = train(m, x.view(), &y, vx.view(), &vy, &cfg).unwrap();
        let n = log.epochs.len();
        assert!(n < cfg.max_epochs);
        let last = log.epochs[n - 1].val_loss;
        let prev_best = log.epochs[..n - 1]
            .iter()
            .map(|e| e.val_loss)
            .fold(f64::INFINITY, f64::min);
        assert!(last >= prev_best.min(log.best_val_loss));
        for w in log.epochs[..n - 1].windows(2) {
            assert!(w[1].val_loss < w[0].val_loss);
        }
    }

    #[test]
    fn training_is_deterministic() {
        let (x, y) = separable(24, 14);
        let run = || {
            let m = MlpModel::init([2, 16, 8, 2], 3).unwrap();
            train(m, x.view(), &y, x.view(), &y, &quick_config(3)).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn empty_split_rejected() {
        let (x, y) = separable(4, 15);
        let m = MlpModel::init([2, 4, 4, 2], 3).unwrap();
        let empty = Array2::<f64>::zeros((0, 2));
        assert!(train(m, x.view(), &y, empty.view(), &[], &quick_config(0)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn softmax_is_normalized(xs in prop::collection::vec(-1e3f64..1e3, 5), seed in 0u64..1000) {
            let m = MlpModel::init([5, 7, 6, 4], seed).unwrap();
            let p = m.forward(&xs).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }
}
