//! Feedforward MLP with rectifier hidden layers and a linear output
//! layer, trained by exact backpropagation of the mean-squared-error
//! loss.
//!
//! Parameter layout is a single flat 32-bit vector, layer-major: each
//! layer's weight matrix row-major (one row per output unit), followed by
//! its biases. All arithmetic widens parameters and inputs to 64-bit;
//! 32-bit storage is the source of truth, so checkpoints round-trip
//! bit-exactly.

use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use super::{Evaluator, NnetError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Rectifier,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    /// Input dimension, hidden sizes, output dimension.
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
}

impl MlpSpec {
    pub fn new(layer_sizes: Vec<usize>) -> Result<Self, NnetError> {
        if layer_sizes.len() < 2 {
            return Err(NnetError::DimMismatch(
                "an MLP needs at least input and output layers".into(),
            ));
        }
        if layer_sizes.iter().any(|&s| s < 1) {
            return Err(NnetError::DimMismatch(
                "all layer sizes must be >= 1".into(),
            ));
        }
        Ok(MlpSpec {
            layer_sizes,
            activation: Activation::Rectifier,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn out_dim(&self) -> usize {
        *self.layer_sizes.last().expect("nonempty layer sizes")
    }

    pub fn n_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    /// Total parameter count: sum of `in * out + out` per layer.
    pub fn n_params(&self) -> usize {
        self.layer_sizes
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }
}

pub struct Mlp {
    spec: MlpSpec,
    params: Vec<f32>,
    weights: Vec<Array2<f64>>,
    biases: Vec<Array1<f64>>,
}

impl Mlp {
    /// Initialize with uniform weights in `+/- sqrt(6 / (fan_in + fan_out))`
    /// and zero biases, from a seeded generator.
    pub fn new(spec: MlpSpec, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut params = Vec::with_capacity(spec.n_params());
        for w in spec.layer_sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for _ in 0..fan_in * fan_out {
                params.push(rng.random_range(-bound..bound) as f32);
            }
            params.extend(std::iter::repeat(0.0f32).take(fan_out));
        }
        Mlp::from_params(spec, params).expect("generated parameter count matches spec")
    }

    pub fn from_params(spec: MlpSpec, params: Vec<f32>) -> Result<Self, NnetError> {
        if params.len() != spec.n_params() {
            return Err(NnetError::DimMismatch(format!(
                "{} parameters given, spec needs {}",
                params.len(),
                spec.n_params()
            )));
        }
        let mut mlp = Mlp {
            spec,
            params,
            weights: Vec::new(),
            biases: Vec::new(),
        };
        mlp.rebuild_caches();
        Ok(mlp)
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn params(&self) -> &[f32] {
        &self.params
    }

    pub fn in_dim(&self) -> usize {
        self.spec.in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.spec.out_dim()
    }

    /// Rebuild the widened weight/bias caches from the flat vector.
    fn rebuild_caches(&mut self) {
        let sizes = &self.spec.layer_sizes;
        self.weights.clear();
        self.biases.clear();
        let mut off = 0;
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let wq: Vec<f64> = self.params[off..off + fan_in * fan_out]
                .iter()
                .map(|&v| f64::from(v))
                .collect();
            off += fan_in * fan_out;
            self.weights.push(
                Array2::from_shape_vec((fan_out, fan_in), wq).expect("weight shape matches"),
            );
            let bq: Vec<f64> = self.params[off..off + fan_out]
                .iter()
                .map(|&v| f64::from(v))
                .collect();
            off += fan_out;
            self.biases.push(Array1::from_vec(bq));
        }
    }

    /// Apply an in-place parameter update computed in 64-bit.
    pub(crate) fn update_params(&mut self, mut step: impl FnMut(usize, f64) -> f64) {
        for (i, p) in self.params.iter_mut().enumerate() {
            *p = step(i, f64::from(*p)) as f32;
        }
        self.rebuild_caches();
    }

    fn activations(&self, inputs: ArrayView2<f32>) -> Result<Vec<Array2<f64>>, NnetError> {
        if inputs.ncols() != self.in_dim() {
            return Err(NnetError::DimMismatch(format!(
                "input width {} != spec input dim {}",
                inputs.ncols(),
                self.in_dim()
            )));
        }
        let mut acts = Vec::with_capacity(self.spec.n_layers() + 1);
        acts.push(inputs.mapv(f64::from));
        for l in 0..self.spec.n_layers() {
            let z = acts[l].dot(&self.weights[l].t()) + &self.biases[l];
            let a = if l + 1 < self.spec.n_layers() {
                z.mapv(|v| v.max(0.0))
            } else {
                z
            };
            acts.push(a);
        }
        Ok(acts)
    }

    /// Forward pass: one output row per input row.
    pub fn forward_batch(&self, inputs: ArrayView2<f32>) -> Result<Array2<f64>, NnetError> {
        Ok(self
            .activations(inputs)?
            .pop()
            .expect("activations include the output layer"))
    }

    /// Mean-squared-error loss and its exact gradient.
    ///
    /// `targets[i]` is the target for row `i`; for multi-output heads
    /// `actions[i]` selects the output whose error is trained, and all
    /// other outputs receive zero gradient.
    pub fn mse_loss_and_grad(
        &self,
        inputs: ArrayView2<f32>,
        targets: &[f64],
        actions: Option<&[usize]>,
    ) -> Result<(f64, Vec<f32>), NnetError> {
        let n = inputs.nrows();
        if targets.len() != n {
            return Err(NnetError::DimMismatch(format!(
                "{} targets for {} input rows",
                targets.len(),
                n
            )));
        }
        if n == 0 {
            return Err(NnetError::DimMismatch("empty batch".into()));
        }
        let out_dim = self.out_dim();
        match actions {
            None if out_dim != 1 => {
                return Err(NnetError::DimMismatch(
                    "multi-output head trained without an action selector".into(),
                ))
            }
            Some(sel) if sel.len() != n => {
                return Err(NnetError::DimMismatch(format!(
                    "{} action selectors for {} input rows",
                    sel.len(),
                    n
                )))
            }
            Some(sel) if sel.iter().any(|&a| a >= out_dim) => {
                return Err(NnetError::DimMismatch(
                    "action selector exceeds output dim".into(),
                ))
            }
            _ => {}
        }

        let acts = self.activations(inputs)?;
        let pred = acts.last().expect("output activations");
        let mut delta = Array2::<f64>::zeros((n, out_dim));
        let mut loss = 0.0;
        for i in 0..n {
            let col = actions.map_or(0, |sel| sel[i]);
            let r = pred[[i, col]] - targets[i];
            loss += r * r;
            delta[[i, col]] = 2.0 * r / n as f64;
        }
        loss /= n as f64;

        let n_layers = self.spec.n_layers();
        let mut grads_w: Vec<Array2<f64>> = Vec::with_capacity(n_layers);
        let mut grads_b: Vec<Array1<f64>> = Vec::with_capacity(n_layers);
        for l in (0..n_layers).rev() {
            grads_w.push(delta.t().dot(&acts[l]));
            grads_b.push(delta.sum_axis(Axis(0)));
            if l > 0 {
                let mut prev = delta.dot(&self.weights[l]);
                // Rectifier derivative: zero wherever the activation was
                // clamped (a == 0 implies z <= 0).
                prev.zip_mut_with(&acts[l], |d, &a| {
                    if a <= 0.0 {
                        *d = 0.0;
                    }
                });
                delta = prev;
            }
        }
        grads_w.reverse();
        grads_b.reverse();

        let mut grad = Vec::with_capacity(self.spec.n_params());
        for l in 0..n_layers {
            grad.extend(grads_w[l].iter().map(|&v| v as f32));
            grad.extend(grads_b[l].iter().map(|&v| v as f32));
        }
        Ok((loss, grad))
    }

    /// Plain gradient-descent step: `theta -= lr * grad`.
    pub fn sgd_step(&mut self, grad: &[f32], lr: f64) {
        assert_eq!(grad.len(), self.params.len());
        self.update_params(|i, p| p - lr * f64::from(grad[i]));
    }

    /// Immutable deep-copy snapshot for target-network evaluation.
    pub fn snapshot(&self) -> MlpSnapshot {
        MlpSnapshot {
            inner: Arc::new(
                Mlp::from_params(self.spec.clone(), self.params.clone())
                    .expect("own parameters match own spec"),
            ),
        }
    }
}

/// Frozen copy of an [`Mlp`]; evaluation matches `forward_batch` on the
/// copied parameters forever.
#[derive(Clone)]
pub struct MlpSnapshot {
    inner: Arc<Mlp>,
}

impl MlpSnapshot {
    pub fn spec(&self) -> &MlpSpec {
        self.inner.spec()
    }

    pub fn params(&self) -> &[f32] {
        self.inner.params()
    }
}

impl Evaluator for MlpSnapshot {
    fn out_dim(&self) -> usize {
        self.inner.out_dim()
    }

    fn eval(&self, inputs: ArrayView2<f32>) -> Array2<f64> {
        self.inner
            .forward_batch(inputs)
            .expect("snapshot evaluated with matching input width")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn zero_parameters_give_zero_outputs() {
        let spec = MlpSpec::new(vec![3, 4, 1]).unwrap();
        let mlp = Mlp::from_params(spec.clone(), vec![0.0; spec.n_params()]).unwrap();
        let x = arr2(&[[1.0f32, -2.0, 0.5], [0.0, 0.0, 0.0]]);
        let y = mlp.forward_batch(x.view()).unwrap();
        assert_eq!(y.shape(), &[2, 1]);
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hand_computed_1_2_1_network() {
        // Layer 1: W = [[2], [-1]], b = [0.5, 0.0]; layer 2: W = [[1, 3]], b = [-0.25].
        // Input 1.0: hidden = relu([2.5, -1.0]) = [2.5, 0]; out = 2.5 - 0.25 = 2.25.
        let spec = MlpSpec::new(vec![1, 2, 1]).unwrap();
        let params = vec![2.0, -1.0, 0.5, 0.0, 1.0, 3.0, -0.25];
        let mlp = Mlp::from_params(spec, params).unwrap();
        let y = mlp.forward_batch(arr2(&[[1.0f32]]).view()).unwrap();
        assert_eq!(y[[0, 0]], 2.25);
    }

    #[test]
    fn batch_rows_map_to_output_rows() {
        let spec = MlpSpec::new(vec![2, 3, 2]).unwrap();
        let mlp = Mlp::new(spec, 42);
        let x = Array2::from_shape_fn((7, 2), |(i, j)| (i as f32) - (j as f32));
        let y = mlp.forward_batch(x.view()).unwrap();
        assert_eq!(y.shape(), &[7, 2]);
    }

    #[test]
    fn loss_zero_and_grad_zero_when_predictions_match() {
        let spec = MlpSpec::new(vec![2, 2, 1]).unwrap();
        let mlp = Mlp::from_params(spec.clone(), vec![0.0; spec.n_params()]).unwrap();
        let x = arr2(&[[1.0f32, 2.0]]);
        let (loss, grad) = mlp.mse_loss_and_grad(x.view(), &[0.0], None).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn single_sample_loss_is_squared_residual() {
        // Identity-ish net: 1-1-1 with weights 1, biases 0 and input 2.0
        // predicts 2.0; target 5 gives loss 9.
        let spec = MlpSpec::new(vec![1, 1, 1]).unwrap();
        let mlp = Mlp::from_params(spec, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let (loss, _) = mlp
            .mse_loss_and_grad(arr2(&[[2.0f32]]).view(), &[5.0], None)
            .unwrap();
        assert_eq!(loss, 9.0);
    }

    #[test]
    fn q_head_requires_action_selector() {
        let spec = MlpSpec::new(vec![2, 3, 4]).unwrap();
        let mlp = Mlp::new(spec, 0);
        let x = arr2(&[[1.0f32, 0.0]]);
        assert!(mlp.mse_loss_and_grad(x.view(), &[1.0], None).is_err());
        assert!(mlp
            .mse_loss_and_grad(x.view(), &[1.0], Some(&[2]))
            .is_ok());
        assert!(mlp
            .mse_loss_and_grad(x.view(), &[1.0], Some(&[4]))
            .is_err());
    }

    #[test]
    fn masked_outputs_receive_zero_gradient() {
        let spec = MlpSpec::new(vec![2, 4]).unwrap();
        let mlp = Mlp::new(spec.clone(), 3);
        let x = arr2(&[[0.3f32, -0.7]]);
        let (_, grad) = mlp.mse_loss_and_grad(x.view(), &[2.0], Some(&[1])).unwrap();
        // Single linear layer: weight rows of unselected outputs stay zero.
        for out in 0..4 {
            let row = &grad[out * 2..out * 2 + 2];
            if out == 1 {
                assert!(row.iter().any(|&g| g != 0.0));
            } else {
                assert!(row.iter().all(|&g| g == 0.0));
            }
        }
    }

    #[test]
    fn sgd_with_zero_grad_leaves_parameters_unchanged() {
        let spec = MlpSpec::new(vec![2, 2, 1]).unwrap();
        let mut mlp = Mlp::new(spec.clone(), 9);
        let before = mlp.params().to_vec();
        mlp.sgd_step(&vec![0.0; spec.n_params()], 0.1);
        assert_eq!(mlp.params(), &before[..]);
    }

    #[test]
    fn snapshot_is_immutable_under_training() {
        let spec = MlpSpec::new(vec![2, 3, 1]).unwrap();
        let mut mlp = Mlp::new(spec.clone(), 5);
        let snap = mlp.snapshot();
        let x = Array2::from_shape_fn((4, 2), |(i, j)| (i + j) as f32 * 0.25);
        let before = snap.eval(x.view());
        for _ in 0..10 {
            let (_, grad) = mlp
                .mse_loss_and_grad(x.view(), &[1.0, 2.0, 3.0, 4.0], None)
                .unwrap();
            mlp.sgd_step(&grad, 0.05);
        }
        let after = snap.eval(x.view());
        assert_eq!(before, after);
        // And the snapshot matches forward_batch on the copied parameters.
        let copy = Mlp::from_params(snap.spec().clone(), snap.params().to_vec()).unwrap();
        assert_eq!(copy.forward_batch(x.view()).unwrap(), after);
    }

    #[test]
    fn one_parameter_quadratic_converges_under_sgd() {
        // Network y = w * x with x = 1 and target 3: loss (w - 3)^2.
        let spec = MlpSpec::new(vec![1, 1]).unwrap();
        let mut mlp = Mlp::from_params(spec, vec![0.0, 0.0]).unwrap();
        let x = arr2(&[[1.0f32]]);
        for _ in 0..100 {
            // Freeze the bias gradient so only the weight moves.
            let (_, mut grad) = mlp.mse_loss_and_grad(x.view(), &[3.0], None).unwrap();
            grad[1] = 0.0;
            mlp.sgd_step(&grad, 0.1);
        }
        assert!((f64::from(mlp.params()[0]) - 3.0).abs() < 1e-3);
    }
}
