//! Recorded forward state of one layer across a full sequence, the input
//! to the backward pass.

use crate::neuron::LayerState;
use crate::tensor::Tensor;

/// Per-timestep tensors for one layer over t = 1..T. Index 0 of each vector
/// is timestep 1; the rest state (V = 0, Theta = theta0, S = 0) is implicit.
#[derive(Clone, Debug)]
pub struct LayerTrace {
    pub layer_index: usize,
    /// Presynaptic activity seen by this layer, [batch x m] per step.
    /// Analog inputs for the first layer, spikes for the rest.
    pub s_in: Vec<Tensor>,
    /// Input current W*s_in + b (+ recurrent), [batch x n] per step.
    pub current: Vec<Tensor>,
    /// Membrane potential, post-integration.
    pub v: Vec<Tensor>,
    /// Firing threshold used at each step.
    pub theta: Vec<Tensor>,
    /// Binary spikes.
    pub s: Vec<Tensor>,
}

impl LayerTrace {
    pub fn with_capacity(layer_index: usize, t_len: usize) -> Self {
        LayerTrace {
            layer_index,
            s_in: Vec::with_capacity(t_len),
            current: Vec::with_capacity(t_len),
            v: Vec::with_capacity(t_len),
            theta: Vec::with_capacity(t_len),
            s: Vec::with_capacity(t_len),
        }
    }

    pub fn push(&mut self, s_in: Tensor, current: Tensor, state: &LayerState) {
        self.s_in.push(s_in);
        self.current.push(current);
        self.v.push(state.v.clone());
        self.theta.push(state.theta.clone());
        self.s.push(state.s.clone());
    }

    /// Number of recorded timesteps.
    pub fn t_len(&self) -> usize {
        self.v.len()
    }

    /// Batch size of the recorded tensors.
    pub fn batch(&self) -> usize {
        self.v[0].shape()[0]
    }

    /// Layer width.
    pub fn width(&self) -> usize {
        self.v[0].shape()[1]
    }

    /// Membrane potential at step `t - 1` (zeros at the rest state).
    pub fn v_prev(&self, ti: usize) -> Option<&Tensor> {
        if ti == 0 {
            None
        } else {
            Some(&self.v[ti - 1])
        }
    }

    /// Spikes at step `t - 1` (zeros at the rest state).
    pub fn s_prev(&self, ti: usize) -> Option<&Tensor> {
        if ti == 0 {
            None
        } else {
            Some(&self.s[ti - 1])
        }
    }

    /// Mean firing rate over all steps, batch elements, and neurons.
    pub fn mean_rate(&self) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for s in &self.s {
            sum += s.data().iter().map(|&v| v as f64).sum::<f64>();
            count += s.len();
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }
}
