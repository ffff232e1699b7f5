//! Adam optimizer.
//!
//! Standard update with bias correction (beta1 = 0.9, beta2 = 0.999,
//! eps = 1e-8 unless overridden). Moments are allocated lazily on the first
//! step and shape-checked against their parameters afterwards.

use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Clone, Debug)]
pub struct Adam {
    pub lr: f32,
    pub beta1: f32,
    pub beta2: f32,
    pub eps: f32,
    step: u64,
    m: Vec<Tensor>,
    v: Vec<Tensor>,
}

/// One named parameter/gradient pair for an update step.
pub struct AdamEntry<'a> {
    pub name: &'a str,
    pub param: &'a mut Tensor,
    pub grad: &'a Tensor,
}

impl Adam {
    pub fn new(lr: f32) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Moment accumulators, in entry order (for checkpointing).
    pub fn moments(&self) -> (&[Tensor], &[Tensor]) {
        (&self.m, &self.v)
    }

    /// Restore moment accumulators and step counter (from a checkpoint).
    pub fn restore(&mut self, step: u64, m: Vec<Tensor>, v: Vec<Tensor>) {
        self.step = step;
        self.m = m;
        self.v = v;
    }

    /// Apply one Adam update to every entry. Entry order must be stable
    /// across calls since moments are matched by position.
    pub fn step(&mut self, entries: &mut [AdamEntry<'_>]) -> Result<()> {
        if self.m.is_empty() {
            self.m = entries
                .iter()
                .map(|e| Tensor::zeros(e.param.shape()))
                .collect();
            self.v = self.m.clone();
        }
        if self.m.len() != entries.len() {
            return Err(Error::Training(format!(
                "optimizer state tracks {} parameters, got {}",
                self.m.len(),
                entries.len()
            )));
        }
        for (e, m) in entries.iter().zip(&self.m) {
            if e.param.shape() != e.grad.shape() || e.param.shape() != m.shape() {
                return Err(Error::Training(format!(
                    "shape mismatch for parameter {}: param {:?}, grad {:?}, moment {:?}",
                    e.name,
                    e.param.shape(),
                    e.grad.shape(),
                    m.shape()
                )));
            }
            if let Some(i) = e.grad.data().iter().position(|g| !g.is_finite()) {
                return Err(Error::Training(format!(
                    "non-finite gradient for parameter {} at flat index {i}",
                    e.name
                )));
            }
        }

        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - (self.beta1 as f64).powi(t);
        let bc2 = 1.0 - (self.beta2 as f64).powi(t);
        let (b1, b2) = (self.beta1, self.beta2);

        for (idx, e) in entries.iter_mut().enumerate() {
            let m = self.m[idx].data_mut();
            let v = self.v[idx].data_mut();
            let p = e.param.data_mut();
            let g = e.grad.data();
            for i in 0..p.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let m_hat = m[i] as f64 / bc1;
                let v_hat = v[i] as f64 / bc2;
                p[i] -= (self.lr as f64 * m_hat / (v_hat.sqrt() + self.eps as f64)) as f32;
            }
        }
        Ok(())
    }
}

/// Scale all gradients so their global L2 norm is at most `max_norm`.
/// No-op when the norm is already below the cap.
pub fn clip_global_norm(grads: &mut [&mut Tensor], max_norm: f32) {
    let mut sq = 0.0f64;
    for g in grads.iter() {
        for &v in g.data() {
            sq += v as f64 * v as f64;
        }
    }
    let norm = sq.sqrt();
    if norm > max_norm as f64 && norm > 0.0 {
        let k = (max_norm as f64 / norm) as f32;
        for g in grads.iter_mut() {
            for v in g.data_mut() {
                *v *= k;
            }
        }
    }
}
