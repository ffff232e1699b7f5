//! Dense row-major tensors (rank 1..3) and the few linear-algebra kernels
//! the engine needs.
//!
//! Everything is f32 storage. Kernels are written so each output element is
//! produced by exactly one fixed-order loop, which makes results identical
//! for any worker count: parallelism only ever splits over output rows.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Row count below which matmul stays sequential; rayon overhead dominates
/// under this.
const PAR_ROW_THRESHOLD: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f32>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if shape.is_empty() || shape.iter().any(|&e| e == 0) {
            return Err(Error::Shape(format!("extents must be positive, got {shape:?}")));
        }
        if expected != data.len() {
            return Err(Error::Shape(format!(
                "shape {shape:?} implies {expected} elements, got {}",
                data.len()
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let n: usize = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; n],
        }
    }

    pub fn filled(shape: &[usize], value: f32) -> Self {
        let n: usize = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![value; n],
        }
    }

    pub fn from_rows(rows: &[&[f32]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Tensor {
            shape: vec![r, c],
            data,
        }
    }

    #[inline]
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    /// Rows of a rank-2 tensor.
    #[inline]
    pub fn rows(&self) -> usize {
        debug_assert_eq!(self.rank(), 2);
        self.shape[0]
    }

    /// Columns of a rank-2 tensor.
    #[inline]
    pub fn cols(&self) -> usize {
        debug_assert_eq!(self.rank(), 2);
        self.shape[1]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        let c = self.cols();
        &self.data[i * c..(i + 1) * c]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f32] {
        let c = self.cols();
        &mut self.data[i * c..(i + 1) * c]
    }

    #[inline]
    pub fn at2(&self, i: usize, j: usize) -> f32 {
        self.data[i * self.shape[1] + j]
    }

    /// Copy of slab `t` along the leading axis of a rank-3 tensor,
    /// returned as rank-2.
    pub fn outer_slab(&self, t: usize) -> Tensor {
        debug_assert_eq!(self.rank(), 3);
        let (rows, cols) = (self.shape[1], self.shape[2]);
        let stride = rows * cols;
        Tensor {
            shape: vec![rows, cols],
            data: self.data[t * stride..(t + 1) * stride].to_vec(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Error out (naming `what`) if any element is NaN/Inf.
    pub fn ensure_finite(&self, what: &str) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(i) => Err(Error::Dynamics(format!(
                "non-finite value in {what} at flat index {i}"
            ))),
        }
    }

    pub fn map(&self, f: impl Fn(f32) -> f32) -> Tensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, k: f32) -> Tensor {
        self.map(|v| v * k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElemOp {
    Add,
    Sub,
    Mul,
}

#[inline]
fn apply(op: ElemOp, a: f32, b: f32) -> f32 {
    match op {
        ElemOp::Add => a + b,
        ElemOp::Sub => a - b,
        ElemOp::Mul => a * b,
    }
}

/// Elementwise op. Shapes must match, or `b` may be a rank-1 vector
/// broadcast against rank-2 `a`: length == cols broadcasts per column
/// (bias-style), length == rows broadcasts one scalar per row. When `a` is
/// square both interpretations coincide in length; per-column wins.
pub fn elementwise(op: ElemOp, a: &Tensor, b: &Tensor) -> Result<Tensor> {
    if a.shape() == b.shape() {
        let data = a
            .data
            .iter()
            .zip(&b.data)
            .map(|(&x, &y)| apply(op, x, y))
            .collect();
        return Ok(Tensor {
            shape: a.shape.clone(),
            data,
        });
    }
    if a.rank() == 2 && b.rank() == 1 {
        let (r, c) = (a.rows(), a.cols());
        if b.len() == c {
            let mut out = a.clone();
            for i in 0..r {
                let row = out.row_mut(i);
                for j in 0..c {
                    row[j] = apply(op, row[j], b.data[j]);
                }
            }
            return Ok(out);
        }
        if b.len() == r {
            let mut out = a.clone();
            for i in 0..r {
                let s = b.data[i];
                for v in out.row_mut(i) {
                    *v = apply(op, *v, s);
                }
            }
            return Ok(out);
        }
    }
    Err(Error::Shape(format!(
        "elementwise {op:?}: incompatible shapes {:?} vs {:?}",
        a.shape, b.shape
    )))
}

/// `a[m x k] * b[k x n] -> [m x n]`.
///
/// Inner loops run in i-k-j order (axpy over rows of `b`), so each output
/// element has a fixed summation order regardless of worker count.
pub fn matmul(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    matmul_bias(a, b, None)
}

/// `a[m x k] * w[k x n] + bias[n]` fused.
pub fn matmul_bias(a: &Tensor, w: &Tensor, bias: Option<&Tensor>) -> Result<Tensor> {
    if a.rank() != 2 || w.rank() != 2 {
        return Err(Error::Shape(format!(
            "matmul expects rank-2 operands, got {:?} and {:?}",
            a.shape, w.shape
        )));
    }
    let (m, k) = (a.rows(), a.cols());
    let (k2, n) = (w.rows(), w.cols());
    if k != k2 {
        return Err(Error::Shape(format!(
            "matmul inner dimensions disagree: [{m}x{k}] * [{k2}x{n}]"
        )));
    }
    if let Some(b) = bias {
        if b.len() != n {
            return Err(Error::Shape(format!(
                "bias length {} does not match output width {n}",
                b.len()
            )));
        }
    }
    let mut out = Tensor::zeros(&[m, n]);

    let kernel = |i: usize, out_row: &mut [f32]| {
        match bias {
            Some(b) => out_row.copy_from_slice(&b.data),
            None => out_row.fill(0.0),
        }
        let a_row = &a.data[i * k..(i + 1) * k];
        for (p, &a_ip) in a_row.iter().enumerate() {
            if a_ip == 0.0 {
                continue; // spike inputs are mostly zero
            }
            let w_row = &w.data[p * n..(p + 1) * n];
            for (o, &wv) in out_row.iter_mut().zip(w_row) {
                *o += a_ip * wv;
            }
        }
    };

    if m >= PAR_ROW_THRESHOLD && rayon::current_num_threads() > 1 {
        out.data
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, row)| kernel(i, row));
    } else {
        for (i, row) in out.data.chunks_mut(n).enumerate() {
            kernel(i, row);
        }
    }
    Ok(out)
}

/// Fill a tensor with i.i.d. normal samples (std >= 0; std == 0 gives all
/// entries exactly `mean`).
pub fn gaussian_fill(rng: &mut crate::rng::Rng, mean: f64, std: f64, shape: &[usize]) -> Tensor {
    assert!(std >= 0.0, "negative std");
    let n: usize = shape.iter().product();
    let data = (0..n)
        .map(|_| (mean + std * rng.normal()) as f32)
        .collect();
    Tensor {
        shape: shape.to_vec(),
        data,
    }
}

/// Fill a tensor with i.i.d. uniform samples in [lo, hi).
pub fn uniform_fill(rng: &mut crate::rng::Rng, lo: f64, hi: f64, shape: &[usize]) -> Tensor {
    let n: usize = shape.iter().product();
    let data = (0..n).map(|_| rng.uniform(lo, hi) as f32).collect();
    Tensor {
        shape: shape.to_vec(),
        data,
    }
}

/// Striped 8-lane dot product, f64 * f32 -> f64.
///
/// The lane split fixes the reduction order independently of vector width
/// and thread count.
#[inline]
pub(crate) fn dot_f64_f32(x: &[f64], y: &[f32]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [0.0f64; 8];
    let chunks = x.len() / 8;
    for c in 0..chunks {
        let base = c * 8;
        for l in 0..8 {
            acc[l] += x[base + l] * y[base + l] as f64;
        }
    }
    let mut tail = 0.0;
    for i in chunks * 8..x.len() {
        tail += x[i] * y[i] as f64;
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use proptest::prelude::*;

    /// Independent triple-loop reference for matmul.
    fn naive_matmul(a: &Tensor, b: &Tensor) -> Tensor {
        let (m, k, n) = (a.rows(), a.cols(), b.cols());
        let mut out = Tensor::zeros(&[m, n]);
        for i in 0..m {
            for j in 0..n {
                let mut s = 0.0f64;
                for p in 0..k {
                    s += a.at2(i, p) as f64 * b.at2(p, j) as f64;
                }
                out.data_mut()[i * n + j] = s as f32;
            }
        }
        out
    }

    fn rel_err(a: f32, b: f32) -> f32 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
    }

    #[test]
    fn matmul_identity() {
        let i2 = Tensor::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let v = Tensor::from_rows(&[&[3.0], &[4.0]]);
        let out = matmul(&i2, &v).unwrap();
        assert_eq!(out.data(), &[3.0, 4.0]);
    }

    #[test]
    fn matmul_dot() {
        let a = Tensor::from_rows(&[&[1.0, 2.0]]);
        let b = Tensor::from_rows(&[&[3.0], &[4.0]]);
        let out = matmul(&a, &b).unwrap();
        assert_eq!(out.data(), &[11.0]);
    }

    #[test]
    fn matmul_matches_naive_oracle() {
        let mut rng = Rng::from_seed(12);
        let a = uniform_fill(&mut rng, -1.0, 1.0, &[5, 4]);
        let b = uniform_fill(&mut rng, -1.0, 1.0, &[4, 3]);
        let fast = matmul(&a, &b).unwrap();
        let slow = naive_matmul(&a, &b);
        for (x, y) in fast.data().iter().zip(slow.data()) {
            assert!(rel_err(*x, *y) <= 1e-6, "{x} vs {y}");
        }
    }

    #[test]
    fn matmul_shape_mismatch_errors() {
        let a = Tensor::zeros(&[2, 3]);
        let b = Tensor::zeros(&[4, 2]);
        assert!(matches!(matmul(&a, &b), Err(Error::Shape(_))));
    }

    #[test]
    fn elementwise_basics() {
        let a = Tensor::new(vec![2], vec![1.0, 2.0]).unwrap();
        let z = Tensor::new(vec![2], vec![0.0, 0.0]).unwrap();
        let b = Tensor::new(vec![2], vec![3.0, 4.0]).unwrap();
        assert_eq!(elementwise(ElemOp::Mul, &a, &z).unwrap().data(), &[0.0, 0.0]);
        assert_eq!(elementwise(ElemOp::Mul, &a, &b).unwrap().data(), &[3.0, 8.0]);
    }

    #[test]
    fn broadcast_row_vector_matches_tiling_oracle() {
        let mut rng = Rng::from_seed(5);
        let a = uniform_fill(&mut rng, -1.0, 1.0, &[6, 4]);
        let v = uniform_fill(&mut rng, -1.0, 1.0, &[6]);
        let fast = elementwise(ElemOp::Mul, &a, &v).unwrap();
        // explicit tiling
        let mut tiled = Tensor::zeros(&[6, 4]);
        for i in 0..6 {
            for j in 0..4 {
                tiled.data_mut()[i * 4 + j] = v.data()[i];
            }
        }
        let slow = elementwise(ElemOp::Mul, &a, &tiled).unwrap();
        assert_eq!(fast, slow);
    }

    #[test]
    fn broadcast_bias_vector() {
        let a = Tensor::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let b = Tensor::new(vec![3], vec![10.0, 20.0, 30.0]).unwrap();
        let out = elementwise(ElemOp::Add, &a, &b).unwrap();
        assert_eq!(out.data(), &[11.0, 22.0, 33.0, 14.0, 25.0, 36.0]);
    }

    #[test]
    fn gaussian_fill_statistics() {
        let mut rng = Rng::from_seed(8);
        let t = gaussian_fill(&mut rng, 0.01, 0.01, &[100_000]);
        let mean = t.data().iter().map(|&v| v as f64).sum::<f64>() / t.len() as f64;
        assert!((0.0097..=0.0103).contains(&mean), "sample mean {mean}");
    }

    #[test]
    fn gaussian_fill_zero_std_is_constant() {
        let mut rng = Rng::from_seed(8);
        let t = gaussian_fill(&mut rng, 0.25, 0.0, &[64]);
        assert!(t.data().iter().all(|&v| v == 0.25));
    }

    #[test]
    fn gaussian_fill_deterministic() {
        let mut a = Rng::from_seed(123);
        let mut b = Rng::from_seed(123);
        let ta = gaussian_fill(&mut a, 0.0, 1.0, &[257]);
        let tb = gaussian_fill(&mut b, 0.0, 1.0, &[257]);
        assert_eq!(ta, tb);
    }

    #[test]
    fn dot_f64_f32_matches_serial() {
        let x: Vec<f64> = (0..37).map(|i| (i as f64) * 0.1 - 1.5).collect();
        let y: Vec<f32> = (0..37).map(|i| (i as f32) * 0.2 - 3.0).collect();
        let serial: f64 = x.iter().zip(&y).map(|(&a, &b)| a * b as f64).sum();
        assert!((dot_f64_f32(&x, &y) - serial).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn matmul_oracle_random_sizes(
            m in 1usize..32, k in 1usize..32, n in 1usize..32, seed in 0u64..1000
        ) {
            let mut rng = Rng::from_seed(seed);
            let a = uniform_fill(&mut rng, -2.0, 2.0, &[m, k]);
            let b = uniform_fill(&mut rng, -2.0, 2.0, &[k, n]);
            let fast = matmul(&a, &b).unwrap();
            let slow = naive_matmul(&a, &b);
            for (x, y) in fast.data().iter().zip(slow.data()) {
                prop_assert!(rel_err(*x, *y) <= 1e-6);
            }
        }
    }
}
