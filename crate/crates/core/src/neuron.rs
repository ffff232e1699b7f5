//! Per-timestep neuron dynamics: LIF, ALIF, and CE-LIF with the six
//! contextual-embedding variants, plus the boxcar surrogate derivative.
//!
//! Discrete dynamics, all models:
//!
//! ```text
//! V[t] = alpha * V[t-1] * (1 - S[t-1]) + I[t]
//! S[t] = H(V[t] - Theta[t])
//! ```
//!
//! with the threshold per model:
//!
//! ```text
//! LIF:    Theta[t] = theta0
//! ALIF:   Theta[t] = beta * (Theta[t-1] - theta0) + gamma * S[t-1] + theta0
//! CE-LIF: Theta[t] = beta * (Theta[t-1] - theta0) + CE[t]           + theta0
//! ```
//!
//! Within a timestep the threshold is updated first (from last step's V and
//! S), then the membrane integrates, then the spike decision uses the fresh
//! threshold. `V[t-1]` always means the stored post-integration value,
//! before the next step's reset multiplication.

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// The six contextual-embedding formulas for `CE[t]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CeVariant {
    /// 1: `CE[t] = S[t-1]`
    PrevSpike,
    /// 2: `CE[t] = V[t-1]`
    PrevMemb,
    /// 3: `CE[t] = TE[t]`
    Encoding,
    /// 4: `CE[t] = V[t-1] + TE[t]`
    MembPlusEncoding,
    /// 5: `CE[t] = S[t-1] * TE[t]`
    SpikeTimesEncoding,
    /// 6: `CE[t] = V[t-1] * TE[t]` (the default)
    MembTimesEncoding,
}

impl CeVariant {
    pub fn id(self) -> u8 {
        match self {
            CeVariant::PrevSpike => 1,
            CeVariant::PrevMemb => 2,
            CeVariant::Encoding => 3,
            CeVariant::MembPlusEncoding => 4,
            CeVariant::SpikeTimesEncoding => 5,
            CeVariant::MembTimesEncoding => 6,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Some(match id {
            1 => CeVariant::PrevSpike,
            2 => CeVariant::PrevMemb,
            3 => CeVariant::Encoding,
            4 => CeVariant::MembPlusEncoding,
            5 => CeVariant::SpikeTimesEncoding,
            6 => CeVariant::MembTimesEncoding,
            _ => return None,
        })
    }

    /// Variants 3..6 read the temporal encoding.
    pub fn needs_te(self) -> bool {
        !matches!(self, CeVariant::PrevSpike | CeVariant::PrevMemb)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NeuronKind {
    Lif,
    Alif,
    CeLif(CeVariant),
}

impl NeuronKind {
    pub fn needs_te(self) -> bool {
        matches!(self, NeuronKind::CeLif(v) if v.needs_te())
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lif" => Some(NeuronKind::Lif),
            "alif" => Some(NeuronKind::Alif),
            _ => {
                let id = s.strip_prefix("ce")?.parse::<u8>().ok()?;
                CeVariant::from_id(id).map(NeuronKind::CeLif)
            }
        }
    }

    pub fn label(self) -> String {
        match self {
            NeuronKind::Lif => "lif".into(),
            NeuronKind::Alif => "alif".into(),
            NeuronKind::CeLif(v) => format!("ce{}", v.id()),
        }
    }
}

/// Per-layer neuron constants.
#[derive(Clone, Copy, Debug)]
pub struct NeuronConfig {
    /// Membrane decay rate, in (0, 1).
    pub alpha: f32,
    /// Threshold decay rate, in (0, 1].
    pub beta: f32,
    /// ALIF spike-triggered threshold gain, >= 0.
    pub gamma: f32,
    /// Base firing threshold, > 0.
    pub theta0: f32,
    /// Boxcar surrogate half-width, > 0.
    pub gamma_sg: f32,
    /// Reset potential. Only 0 is exercised: the multiplicative reset in the
    /// membrane recursion implies reset-to-zero.
    pub v_reset: f32,
    pub kind: NeuronKind,
}

impl Default for NeuronConfig {
    /// Constants used for the reported pixel-task results; copy-memory runs
    /// override beta to 1 - 1/T.
    fn default() -> Self {
        NeuronConfig {
            alpha: 0.5,
            beta: 0.99,
            gamma: 0.1,
            theta0: 0.3,
            gamma_sg: 0.2,
            v_reset: 0.0,
            kind: NeuronKind::CeLif(CeVariant::MembTimesEncoding),
        }
    }
}

impl NeuronConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must be in (0,1), got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::Config(format!("beta must be in (0,1], got {}", self.beta)));
        }
        if self.gamma < 0.0 {
            return Err(Error::Config(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if self.theta0 <= 0.0 {
            return Err(Error::Config(format!("theta0 must be > 0, got {}", self.theta0)));
        }
        if self.gamma_sg <= 0.0 {
            return Err(Error::Config(format!("gamma_sg must be > 0, got {}", self.gamma_sg)));
        }
        Ok(())
    }

    pub fn with_kind(mut self, kind: NeuronKind) -> Self {
        self.kind = kind;
        self
    }
}

/// Recorded state of one layer after a timestep.
#[derive(Clone, Debug)]
pub struct LayerState {
    /// Membrane potential, [batch x n].
    pub v: Tensor,
    /// Firing threshold, [batch x n].
    pub theta: Tensor,
    /// Binary spikes, [batch x n].
    pub s: Tensor,
    /// Timestep index this state belongs to (0 = initial rest state).
    pub t: usize,
}

impl LayerState {
    /// Rest state: V = 0, Theta = theta0, S = 0.
    pub fn initial(batch: usize, n: usize, theta0: f32) -> Self {
        LayerState {
            v: Tensor::zeros(&[batch, n]),
            theta: Tensor::filled(&[batch, n], theta0),
            s: Tensor::zeros(&[batch, n]),
            t: 0,
        }
    }
}

#[inline]
fn heaviside(x: f32) -> f32 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

fn check_current(current: &Tensor, state: &LayerState) -> Result<()> {
    if current.shape() != state.v.shape() {
        return Err(Error::Shape(format!(
            "input current shape {:?} does not match state {:?}",
            current.shape(),
            state.v.shape()
        )));
    }
    current.ensure_finite("input current")
}

/// CE-LIF threshold contribution for one element.
#[inline]
fn ce_term(variant: CeVariant, v_prev: f32, s_prev: f32, te: f32) -> f32 {
    match variant {
        CeVariant::PrevSpike => s_prev,
        CeVariant::PrevMemb => v_prev,
        CeVariant::Encoding => te,
        CeVariant::MembPlusEncoding => v_prev + te,
        CeVariant::SpikeTimesEncoding => s_prev * te,
        CeVariant::MembTimesEncoding => v_prev * te,
    }
}

/// One LIF step at fixed threshold theta0.
pub fn lif_step(state: &LayerState, current: &Tensor, cfg: &NeuronConfig) -> Result<LayerState> {
    check_current(current, state)?;
    let n_el = current.len();
    let mut v = Tensor::zeros(current.shape());
    let mut s = Tensor::zeros(current.shape());
    let theta = Tensor::filled(current.shape(), cfg.theta0);
    for i in 0..n_el {
        let vi = cfg.alpha * state.v.data()[i] * (1.0 - state.s.data()[i]) + current.data()[i];
        v.data_mut()[i] = vi;
        s.data_mut()[i] = heaviside(vi - cfg.theta0);
    }
    Ok(LayerState {
        v,
        theta,
        s,
        t: state.t + 1,
    })
}

/// One ALIF step: spike-triggered threshold adaptation with gain gamma.
pub fn alif_step(state: &LayerState, current: &Tensor, cfg: &NeuronConfig) -> Result<LayerState> {
    check_current(current, state)?;
    let n_el = current.len();
    let mut v = Tensor::zeros(current.shape());
    let mut s = Tensor::zeros(current.shape());
    let mut theta = Tensor::zeros(current.shape());
    for i in 0..n_el {
        let th = cfg.beta * (state.theta.data()[i] - cfg.theta0)
            + cfg.gamma * state.s.data()[i]
            + cfg.theta0;
        let vi = cfg.alpha * state.v.data()[i] * (1.0 - state.s.data()[i]) + current.data()[i];
        theta.data_mut()[i] = th;
        v.data_mut()[i] = vi;
        s.data_mut()[i] = heaviside(vi - th);
    }
    Ok(LayerState {
        v,
        theta,
        s,
        t: state.t + 1,
    })
}

/// One CE-LIF step. `te_t` is this timestep's TE row for the layer (one
/// value per neuron); variants 1-2 ignore it.
pub fn celif_step(
    state: &LayerState,
    current: &Tensor,
    te_t: Option<&[f32]>,
    cfg: &NeuronConfig,
    variant: CeVariant,
) -> Result<LayerState> {
    check_current(current, state)?;
    let (batch, n) = (current.shape()[0], current.shape()[1]);
    let te = match (variant.needs_te(), te_t) {
        (true, None) => {
            return Err(Error::Config(format!(
                "CE variant {} requires a temporal encoding row",
                variant.id()
            )))
        }
        (_, Some(row)) if row.len() != n => {
            return Err(Error::Shape(format!(
                "TE row length {} does not match layer width {n}",
                row.len()
            )))
        }
        (_, row) => row,
    };
    let mut v = Tensor::zeros(current.shape());
    let mut s = Tensor::zeros(current.shape());
    let mut theta = Tensor::zeros(current.shape());
    for b in 0..batch {
        for j in 0..n {
            let i = b * n + j;
            let te_j = te.map_or(0.0, |row| row[j]);
            let ce = ce_term(variant, state.v.data()[i], state.s.data()[i], te_j);
            let th = cfg.beta * (state.theta.data()[i] - cfg.theta0) + ce + cfg.theta0;
            let vi = cfg.alpha * state.v.data()[i] * (1.0 - state.s.data()[i]) + current.data()[i];
            theta.data_mut()[i] = th;
            v.data_mut()[i] = vi;
            s.data_mut()[i] = heaviside(vi - th);
        }
    }
    Ok(LayerState {
        v,
        theta,
        s,
        t: state.t + 1,
    })
}

/// Dispatch one step according to the configured neuron kind.
pub fn neuron_step(
    state: &LayerState,
    current: &Tensor,
    te_t: Option<&[f32]>,
    cfg: &NeuronConfig,
) -> Result<LayerState> {
    match cfg.kind {
        NeuronKind::Lif => lif_step(state, current, cfg),
        NeuronKind::Alif => alif_step(state, current, cfg),
        NeuronKind::CeLif(variant) => celif_step(state, current, te_t, cfg, variant),
    }
}

/// Boxcar surrogate derivative of the spike function: 1 where
/// `|V - Theta| < gamma_sg`, else 0.
pub fn surrogate_grad(v: &Tensor, theta: &Tensor, gamma_sg: f32) -> Tensor {
    debug_assert_eq!(v.shape(), theta.shape());
    let mut out = Tensor::zeros(v.shape());
    for i in 0..v.len() {
        out.data_mut()[i] = if (v.data()[i] - theta.data()[i]).abs() < gamma_sg {
            1.0
        } else {
            0.0
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::tensor::uniform_fill;

    fn cfg(kind: NeuronKind) -> NeuronConfig {
        NeuronConfig {
            alpha: 0.5,
            beta: 0.99,
            gamma: 0.1,
            theta0: 0.3,
            gamma_sg: 0.2,
            v_reset: 0.0,
            kind,
        }
    }

    fn state1(v: f32, theta: f32, s: f32) -> LayerState {
        LayerState {
            v: Tensor::filled(&[1, 1], v),
            theta: Tensor::filled(&[1, 1], theta),
            s: Tensor::filled(&[1, 1], s),
            t: 0,
        }
    }

    #[test]
    fn lif_rest_stays_at_rest() {
        let c = cfg(NeuronKind::Lif);
        let out = lif_step(&state1(0.0, 0.3, 0.0), &Tensor::zeros(&[1, 1]), &c).unwrap();
        assert_eq!(out.v.data()[0], 0.0);
        assert_eq!(out.s.data()[0], 0.0);
    }

    #[test]
    fn lif_decay_and_spike() {
        let c = cfg(NeuronKind::Lif);
        let out = lif_step(&state1(1.0, 0.3, 0.0), &Tensor::zeros(&[1, 1]), &c).unwrap();
        assert_eq!(out.v.data()[0], 0.5);
        assert_eq!(out.s.data()[0], 1.0);
    }

    #[test]
    fn lif_reset_kills_carry() {
        let c = cfg(NeuronKind::Lif);
        let out = lif_step(&state1(1.0, 0.3, 1.0), &Tensor::filled(&[1, 1], 0.2), &c).unwrap();
        assert!((out.v.data()[0] - 0.2).abs() < 1e-7);
        assert_eq!(out.s.data()[0], 0.0);
    }

    #[test]
    fn alif_threshold_rest_is_fixed_point() {
        let c = cfg(NeuronKind::Alif);
        let out = alif_step(&state1(0.0, 0.3, 0.0), &Tensor::zeros(&[1, 1]), &c).unwrap();
        assert!((out.theta.data()[0] - 0.3).abs() < 1e-7);
    }

    #[test]
    fn alif_spike_raises_threshold() {
        let c = cfg(NeuronKind::Alif);
        let out = alif_step(&state1(0.0, 0.3, 1.0), &Tensor::zeros(&[1, 1]), &c).unwrap();
        // beta*(0.3-0.3) + 0.1*1 + 0.3 = 0.4
        assert!((out.theta.data()[0] - 0.4).abs() < 1e-7);
    }

    #[test]
    fn celif_te_shift() {
        let c = cfg(NeuronKind::CeLif(CeVariant::MembTimesEncoding));
        // theta = 0.99*0 + 0.02*0.5 + 0.3 = 0.31
        let out = celif_step(
            &state1(0.5, 0.3, 0.0),
            &Tensor::zeros(&[1, 1]),
            Some(&[0.02]),
            &c,
            CeVariant::MembTimesEncoding,
        )
        .unwrap();
        assert!((out.theta.data()[0] - 0.31).abs() < 1e-7);
    }

    #[test]
    fn celif_negative_embedding_lowers_threshold() {
        let c = cfg(NeuronKind::CeLif(CeVariant::MembTimesEncoding));
        // te * v_prev = -0.1 * 0.5 = -0.05 => theta = 0.25
        let out = celif_step(
            &state1(0.5, 0.3, 0.0),
            &Tensor::zeros(&[1, 1]),
            Some(&[-0.1]),
            &c,
            CeVariant::MembTimesEncoding,
        )
        .unwrap();
        assert!((out.theta.data()[0] - 0.25).abs() < 1e-7);
    }

    #[test]
    fn celif_variant_needing_te_errors_without_it() {
        let c = cfg(NeuronKind::CeLif(CeVariant::Encoding));
        let err = celif_step(
            &state1(0.0, 0.3, 0.0),
            &Tensor::zeros(&[1, 1]),
            None,
            &c,
            CeVariant::Encoding,
        )
        .unwrap_err();
        assert!(matches!(err, crate::error::Error::Config(_)));
    }

    #[test]
    fn non_finite_current_is_rejected() {
        let c = cfg(NeuronKind::Lif);
        let bad = Tensor::new(vec![1, 1], vec![f32::INFINITY]).unwrap();
        assert!(lif_step(&state1(0.0, 0.3, 0.0), &bad, &c).is_err());
    }

    #[test]
    fn surrogate_boxcar_values() {
        let v = Tensor::new(vec![1, 3], vec![0.3, 0.6, 0.45]).unwrap();
        let th = Tensor::filled(&[1, 3], 0.3);
        let g = surrogate_grad(&v, &th, 0.2);
        assert_eq!(g.data(), &[1.0, 0.0, 1.0]);
    }

    /// Drive all three models with the same random input sequence; TE == 0
    /// and gamma == 0 must reduce CE-LIF and ALIF to LIF exactly.
    #[test]
    fn reduction_to_lif() {
        let lif_cfg = cfg(NeuronKind::Lif);
        let mut alif_cfg = cfg(NeuronKind::Alif);
        alif_cfg.gamma = 0.0;
        let ce_cfg = cfg(NeuronKind::CeLif(CeVariant::MembTimesEncoding));

        let mut rng = Rng::from_seed(77);
        let mut lif = LayerState::initial(2, 3, 0.3);
        let mut alif = lif.clone();
        let mut ce = lif.clone();
        let te = vec![0.0f32; 3];
        for _ in 0..200 {
            let i = uniform_fill(&mut rng, -0.2, 0.6, &[2, 3]);
            lif = lif_step(&lif, &i, &lif_cfg).unwrap();
            alif = alif_step(&alif, &i, &alif_cfg).unwrap();
            ce = celif_step(&ce, &i, Some(&te), &ce_cfg, CeVariant::MembTimesEncoding).unwrap();
            assert_eq!(lif.s, alif.s);
            assert_eq!(lif.s, ce.s);
            assert_eq!(lif.v, alif.v);
            assert_eq!(lif.v, ce.v);
        }
    }

    /// With CE == 0 and no spikes the threshold decays geometrically:
    /// |Theta[t] - theta0| = beta^t * |Theta[0] - theta0| exactly.
    #[test]
    fn threshold_decay_is_geometric() {
        let c = cfg(NeuronKind::CeLif(CeVariant::MembTimesEncoding));
        let mut state = state1(0.0, 0.5, 0.0);
        let te = [0.0f32];
        let mut expected = 0.5f64 - 0.3;
        for _ in 0..50 {
            state = celif_step(
                &state,
                &Tensor::zeros(&[1, 1]),
                Some(&te),
                &c,
                CeVariant::MembTimesEncoding,
            )
            .unwrap();
            expected *= 0.99f32 as f64;
            let got = state.theta.data()[0] as f64 - 0.3f32 as f64;
            assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
        }
    }

    /// Variant 1 with the ALIF gain folded in reproduces ALIF exactly.
    #[test]
    fn variant1_equals_alif_with_unit_gain() {
        let mut alif_cfg = cfg(NeuronKind::Alif);
        alif_cfg.gamma = 1.0; // CE[t] = S[t-1] corresponds to gamma = 1
        let ce_cfg = cfg(NeuronKind::CeLif(CeVariant::PrevSpike));
        let mut rng = Rng::from_seed(3);
        let mut a = LayerState::initial(1, 4, 0.3);
        let mut c = a.clone();
        for _ in 0..100 {
            let i = uniform_fill(&mut rng, 0.0, 0.8, &[1, 4]);
            a = alif_step(&a, &i, &alif_cfg).unwrap();
            c = celif_step(&c, &i, None, &ce_cfg, CeVariant::PrevSpike).unwrap();
            assert_eq!(a.s, c.s);
            assert_eq!(a.theta, c.theta);
        }
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(NeuronKind::Lif);
        assert!(c.validate().is_ok());
        c.alpha = 1.0;
        assert!(c.validate().is_err());
        c.alpha = 0.5;
        c.beta = 0.0;
        assert!(c.validate().is_err());
        c.beta = 1.0;
        assert!(c.validate().is_ok());
        c.gamma_sg = 0.0;
        assert!(c.validate().is_err());
    }
}
