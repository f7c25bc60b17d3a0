//! Gradient-descent optimizers. Update arithmetic runs in 64-bit; moment
//! state is stored in 32-bit so checkpoints round-trip bit-exactly.

use serde::{Deserialize, Serialize};

use super::Mlp;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamParams {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub t: u64,
    pub m: Vec<f32>,
    pub v: Vec<f32>,
}

impl AdamState {
    pub fn new(n_params: usize) -> Self {
        AdamState {
            t: 0,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
        }
    }
}

pub enum Optimizer {
    Sgd,
    Adam {
        params: AdamParams,
        state: AdamState,
    },
}

impl Optimizer {
    pub fn adam(n_params: usize, params: AdamParams) -> Self {
        Optimizer::Adam {
            params,
            state: AdamState::new(n_params),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Optimizer::Sgd => "sgd",
            Optimizer::Adam { .. } => "adam",
        }
    }

    pub fn apply(&mut self, mlp: &mut Mlp, grad: &[f32], lr: f64) {
        match self {
            Optimizer::Sgd => mlp.sgd_step(grad, lr),
            Optimizer::Adam { params, state } => adam_step(mlp, grad, lr, *params, state),
        }
    }
}

/// One Adam update; the step count and both moment vectors are carried in
/// `state` and advance exactly once per call.
pub fn adam_step(mlp: &mut Mlp, grad: &[f32], lr: f64, params: AdamParams, state: &mut AdamState) {
    assert_eq!(grad.len(), state.m.len());
    state.t += 1;
    let bc1 = 1.0 - params.beta1.powf(state.t as f64);
    let bc2 = 1.0 - params.beta2.powf(state.t as f64);
    let (m, v) = (&mut state.m, &mut state.v);
    mlp.update_params(|i, p| {
        let g = f64::from(grad[i]);
        let mi = params.beta1 * f64::from(m[i]) + (1.0 - params.beta1) * g;
        let vi = params.beta2 * f64::from(v[i]) + (1.0 - params.beta2) * g * g;
        m[i] = mi as f32;
        v[i] = vi as f32;
        let m_hat = mi / bc1;
        let v_hat = vi / bc2;
        p - lr * m_hat / (v_hat.sqrt() + params.eps)
    });
}
