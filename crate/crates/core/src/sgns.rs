//! Skip-gram negative sampling objective.
//!
//! For a (center, context) pair with center query vector `p_u`, context
//! target vector `f_v` and noise vectors `f_n`, the per-sample loss is the
//! negative log-likelihood
//!
//! ```text
//! L = -ln s(fv . pu) - sum_n ln s(-fn . pu)
//! ```
//!
//! [`sgns_loss_and_grad`] is the exact f64 reference used for gradient
//! verification; [`train_step`] is the fused f32 update the trainer runs,
//! equivalent to one SGD step along the analytic gradient.

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
#[inline]
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Gradients of the loss with respect to each input vector.
#[derive(Debug, Clone)]
pub struct SgnsGradients {
    pub center: Vec<f64>,
    pub context: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

/// Loss and exact analytic gradients for one sample.
pub fn sgns_loss_and_grad(
    center: &[f64],
    context: &[f64],
    negatives: &[Vec<f64>],
) -> (f64, SgnsGradients) {
    let d = center.len();
    assert_eq!(context.len(), d, "context dimension mismatch");
    for n in negatives {
        assert_eq!(n.len(), d, "negative dimension mismatch");
    }

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let pos_dot = dot(context, center);
    // -ln s(x) = softplus(-x)
    let mut loss = softplus(-pos_dot);
    let pos_coeff = sigmoid(pos_dot) - 1.0; // dL/d(pos_dot)

    let mut g_center: Vec<f64> = context.iter().map(|&x| pos_coeff * x).collect();
    let g_context: Vec<f64> = center.iter().map(|&x| pos_coeff * x).collect();

    let mut g_negatives = Vec::with_capacity(negatives.len());
    for neg in negatives {
        let neg_dot = dot(neg, center);
        loss += softplus(neg_dot);
        let neg_coeff = sigmoid(neg_dot); // dL/d(neg_dot)
        for i in 0..d {
            g_center[i] += neg_coeff * neg[i];
        }
        g_negatives.push(center.iter().map(|&x| neg_coeff * x).collect());
    }

    (
        loss,
        SgnsGradients {
            center: g_center,
            context: g_context,
            negatives: g_negatives,
        },
    )
}

use std::sync::atomic::{AtomicU32, Ordering};

/// f32 cell updated without synchronization. Concurrent row updates are
/// tolerated as benign races in racy training mode; in deterministic mode a
/// single worker owns all cells and the relaxed atomics compile to plain
/// loads and stores.
#[derive(Debug, Default)]
#[repr(transparent)]
pub struct Cell(AtomicU32);

impl Cell {
    #[inline]
    pub fn get(&self) -> f32 {
        f32::from_bits(self.0.load(Ordering::Relaxed))
    }

    #[inline]
    pub fn set(&self, v: f32) {
        self.0.store(v.to_bits(), Ordering::Relaxed);
    }

    #[inline]
    pub fn add(&self, v: f32) {
        self.set(self.get() + v);
    }
}

#[inline]
fn sigmoid32(x: f32) -> f32 {
    sigmoid(x as f64) as f32
}

/// One SGD step on a (center, context, negatives) sample over shared rows.
/// `scratch` must have the embedding dimension; returns the sample loss.
pub fn train_step(
    center: &[Cell],
    context: &[Cell],
    negatives: &[&[Cell]],
    lr: f32,
    scratch: &mut [f32],
) -> f32 {
    debug_assert_eq!(center.len(), scratch.len());
    scratch.fill(0.0);
    let mut loss = 0.0f32;

    let dot = |a: &[Cell], b: &[Cell]| -> f32 {
        a.iter().zip(b).map(|(x, y)| x.get() * y.get()).sum()
    };

    let pos_dot = dot(context, center);
    let s = sigmoid32(pos_dot);
    loss += softplus(-(pos_dot as f64)) as f32;
    let g = lr * (1.0 - s);
    for i in 0..center.len() {
        scratch[i] += g * context[i].get();
        context[i].add(g * center[i].get());
    }

    for neg in negatives {
        let neg_dot = dot(neg, center);
        let s = sigmoid32(neg_dot);
        loss += softplus(neg_dot as f64) as f32;
        let g = -lr * s;
        for i in 0..center.len() {
            scratch[i] += g * neg[i].get();
            neg[i].add(g * center[i].get());
        }
    }

    for i in 0..center.len() {
        center[i].add(scratch[i]);
    }
    loss
}
