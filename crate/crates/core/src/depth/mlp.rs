//! Small fully connected regressor: ReLU hidden layers, linear scalar output.

use super::DepthError;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Dense layer `y = W x + b` with `W` stored row-major (`rows` outputs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            weights: vec![0.0; rows * cols],
            bias: vec![0.0; rows],
        }
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for r in 0..self.rows {
            let row = &self.weights[r * self.cols..(r + 1) * self.cols];
            let z = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias[r];
            out.push(z);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Layer>", into = "Vec<Layer>")]
pub struct MlpModel {
    layers: Vec<Layer>,
}

impl TryFrom<Vec<Layer>> for MlpModel {
    type Error = DepthError;
    fn try_from(layers: Vec<Layer>) -> Result<Self, DepthError> {
        MlpModel::new(layers)
    }
}

impl From<MlpModel> for Vec<Layer> {
    fn from(m: MlpModel) -> Self {
        m.layers
    }
}

impl MlpModel {
    pub fn new(layers: Vec<Layer>) -> Result<Self, DepthError> {
        let first = layers.first().ok_or(DepthError::EmptyDataset)?;
        let mut width = first.cols;
        for l in &layers {
            if l.cols != width {
                return Err(DepthError::DimMismatch {
                    expected: width,
                    actual: l.cols,
                });
            }
            if l.weights.len() != l.rows * l.cols || l.bias.len() != l.rows {
                return Err(DepthError::DimMismatch {
                    expected: l.rows * l.cols,
                    actual: l.weights.len(),
                });
            }
            width = l.rows;
        }
        if width != 1 {
            return Err(DepthError::DimMismatch {
                expected: 1,
                actual: width,
            });
        }
        Ok(Self { layers })
    }

    /// He-uniform initialization for the layer widths in `arch`.
    pub fn init(arch: &[usize], seed: u64) -> Result<Self, DepthError> {
        if arch.len() < 2 {
            return Err(DepthError::DimMismatch {
                expected: 2,
                actual: arch.len(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = arch
            .windows(2)
            .map(|w| {
                let (cols, rows) = (w[0], w[1]);
                let bound = (6.0 / cols as f64).sqrt();
                Layer {
                    rows,
                    cols,
                    weights: (0..rows * cols)
                        .map(|_| rng.random_range(-bound..bound))
                        .collect(),
                    bias: vec![0.0; rows],
                }
            })
            .collect();
        Self::new(layers)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].cols
    }

    pub fn architecture(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.layers.iter().map(|l| l.rows))
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64, DepthError> {
        if x.len() != self.input_dim() {
            return Err(DepthError::DimMismatch {
                expected: self.input_dim(),
                actual: x.len(),
            });
        }
        let mut h = x.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            layer.apply(&h, &mut next);
            if k < last {
                next.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            std::mem::swap(&mut h, &mut next);
        }
        Ok(h[0])
    }

    /// Mean squared error over the dataset.
    pub fn mse<X: AsRef<[f64]>>(&self, inputs: &[X], targets: &[f64]) -> Result<f64, DepthError> {
        check_dataset(inputs, targets)?;
        let mut sum = 0.0;
        for (x, y) in inputs.iter().zip(targets) {
            sum += (self.forward(x.as_ref())? - y).powi(2);
        }
        Ok(sum / targets.len() as f64)
    }

    /// MSE and its gradient with respect to every weight and bias.
    pub fn loss_and_gradient<X: AsRef<[f64]>>(
        &self,
        inputs: &[X],
        targets: &[f64],
    ) -> Result<(f64, Vec<Layer>), DepthError> {
        check_dataset(inputs, targets)?;
        let mut grads: Vec<Layer> = self.layers.iter().map(|l| Layer::zeros(l.rows, l.cols)).collect();
        let mut loss = 0.0;
        let mut acts: Vec<Vec<f64>> = vec![Vec::new(); self.layers.len() + 1];
        let scale = 1.0 / targets.len() as f64;
        let last = self.layers.len() - 1;
        for (x, &y) in inputs.iter().zip(targets) {
            let x = x.as_ref();
            if x.len() != self.input_dim() {
                return Err(DepthError::DimMismatch {
                    expected: self.input_dim(),
                    actual: x.len(),
                });
            }
            acts[0].clear();
            acts[0].extend_from_slice(x);
            for k in 0..self.layers.len() {
                let (head, tail) = acts.split_at_mut(k + 1);
                self.layers[k].apply(&head[k], &mut tail[0]);
                if k < last {
                    tail[0].iter_mut().for_each(|v| *v = v.max(0.0));
                }
            }
            let err = acts[last + 1][0] - y;
            loss += err * err * scale;

            let mut delta = vec![2.0 * err * scale];
            for k in (0..self.layers.len()).rev() {
                let layer = &self.layers[k];
                let input = &acts[k];
                let g = &mut grads[k];
                for r in 0..layer.rows {
                    g.bias[r] += delta[r];
                    let row = &mut g.weights[r * layer.cols..(r + 1) * layer.cols];
                    for (gw, v) in row.iter_mut().zip(input) {
                        *gw += delta[r] * v;
                    }
                }
                if k > 0 {
                    let mut prev = vec![0.0; layer.cols];
                    for r in 0..layer.rows {
                        let row = &layer.weights[r * layer.cols..(r + 1) * layer.cols];
                        for (p, w) in prev.iter_mut().zip(row) {
                            *p += w * delta[r];
                        }
                    }
                    // ReLU derivative: the stored activation is zero exactly
                    // where the pre-activation was clipped.
                    for (p, a) in prev.iter_mut().zip(input) {
                        if *a <= 0.0 {
                            *p = 0.0;
                        }
                    }
                    delta = prev;
                }
            }
        }
        Ok((loss, grads))
    }

    /// Trains in place with Adam on mini-batches.
    pub fn fit<X: AsRef<[f64]>>(
        &mut self,
        inputs: &[X],
        targets: &[f64],
        cfg: &TrainConfig,
    ) -> Result<TrainOutcome, DepthError> {
        check_dataset(inputs, targets)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x005E_ED0F_7EA1);
        let mut m: Vec<Layer> = self.layers.iter().map(|l| Layer::zeros(l.rows, l.cols)).collect();
        let mut v = m.clone();
        let mut order: Vec<usize> = (0..targets.len()).collect();
        let batch = cfg.batch_size.max(1);
        let mut step = 0i32;
        let mut epochs_run = 0;
        let mut mse = self.mse(inputs, targets)?;
        for epoch in 0..cfg.epochs {
            let frac = epoch as f64 / cfg.epochs.max(1) as f64;
            let lr = cfg.lr * cfg.final_lr_factor.powf(frac);
            order.shuffle(&mut rng);
            for chunk in order.chunks(batch) {
                let xs: Vec<&[f64]> = chunk.iter().map(|&i| inputs[i].as_ref()).collect();
                let ys: Vec<f64> = chunk.iter().map(|&i| targets[i]).collect();
                let (_, grads) = self.loss_and_gradient(&xs, &ys)?;
                step += 1;
                let c1 = 1.0 - ADAM_B1.powi(step);
                let c2 = 1.0 - ADAM_B2.powi(step);
                for k in 0..self.layers.len() {
                    adam(&mut self.layers[k].weights, &grads[k].weights, &mut m[k].weights, &mut v[k].weights, lr, c1, c2);
                    adam(&mut self.layers[k].bias, &grads[k].bias, &mut m[k].bias, &mut v[k].bias, lr, c1, c2);
                }
            }
            epochs_run = epoch + 1;
            mse = self.mse(inputs, targets)?;
            if mse <= cfg.target_mse {
                break;
            }
        }
        Ok(TrainOutcome {
            final_mse: mse,
            epochs_run,
            converged: mse <= cfg.target_mse,
        })
    }
}

const ADAM_B1: f64 = 0.9;
const ADAM_B2: f64 = 0.999;

fn adam(p: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64], lr: f64, c1: f64, c2: f64) {
    for i in 0..p.len() {
        m[i] = ADAM_B1 * m[i] + (1.0 - ADAM_B1) * g[i];
        v[i] = ADAM_B2 * v[i] + (1.0 - ADAM_B2) * g[i] * g[i];
        p[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + 1e-8);
    }
}

fn check_dataset<X>(inputs: &[X], targets: &[f64]) -> Result<(), DepthError> {
    if inputs.is_empty() {
        return Err(DepthError::EmptyDataset);
    }
    if inputs.len() != targets.len() {
        return Err(DepthError::DimMismatch {
            expected: inputs.len(),
            actual: targets.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    /// Learning rate at the last epoch as a fraction of `lr`.
    pub final_lr_factor: f64,
    pub batch_size: usize,
    pub seed: u64,
    /// Training stops early once the full-dataset MSE falls below this.
    pub target_mse: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 300,
            lr: 3e-3,
            final_lr_factor: 0.05,
            batch_size: 32,
            seed: 0,
            target_mse: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub final_mse: f64,
    pub epochs_run: usize,
    /// False when the MSE target was not met; the model is still usable.
    pub converged: bool,
}

/// Initializes a network of shape `arch` and trains it.
pub fn mlp_train<X: AsRef<[f64]>>(
    inputs: &[X],
    targets: &[f64],
    arch: &[usize],
    cfg: &TrainConfig,
) -> Result<(MlpModel, TrainOutcome), DepthError> {
    let mut model = MlpModel::init(arch, cfg.seed)?;
    let outcome = model.fit(inputs, targets, cfg)?;
    Ok((model, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_outputs_zero() {
        let mut m = MlpModel::init(&[3, 4, 1], 1).unwrap();
        for l in m.layers_mut() {
            l.weights.iter_mut().for_each(|w| *w = 0.0);
        }
        assert_eq!(m.forward(&[1.0, -2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn single_linear_layer() {
        let m = MlpModel::new(vec![Layer {
            rows: 1,
            cols: 3,
            weights: vec![1.0, 1.0, 1.0],
            bias: vec![0.0],
        }])
        .unwrap();
        assert_eq!(m.forward(&[1.0, 2.0, 3.0]).unwrap(), 6.0);
        assert!(matches!(m.forward(&[1.0]), Err(DepthError::DimMismatch { .. })));
    }

    #[test]
    fn chained_dims_are_checked() {
        let bad = vec![Layer::zeros(4, 3), Layer::zeros(1, 5)];
        assert!(MlpModel::new(bad).is_err());
        let wide_out = vec![Layer::zeros(2, 3)];
        assert!(MlpModel::new(wide_out).is_err());
    }

    #[test]
    fn default_architecture_size() {
        let m = MlpModel::init(&[3, 32, 32, 1], 0).unwrap();
        assert_eq!(m.param_count(), 3 * 32 + 32 + 32 * 32 + 32 + 32 + 1);
        assert_eq!(m.architecture(), vec![3, 32, 32, 1]);
    }

    #[test]
    fn serde_round_trip() {
        let m = MlpModel::init(&[3, 5, 1], 9).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: MlpModel = serde_json::from_str(&json).unwrap();
        assert_eq!(m, back);
    }
}
