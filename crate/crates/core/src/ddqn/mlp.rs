//! Fully connected ReLU network with hand-written backpropagation and Adam.

use std::fmt::Debug;
use std::ops::AddAssign;

use ndarray::{Array1, Array2, ArrayView2, Axis, LinalgScalar, ScalarOperand, Zip};
use num_traits::{Float, FromPrimitive};
use rand::Rng;

/// Floating point type the network can run in.
pub trait Real: Float + LinalgScalar + ScalarOperand + FromPrimitive + AddAssign + Debug + Send + Sync + 'static {}

impl<T> Real for T where T: Float + LinalgScalar + ScalarOperand + FromPrimitive + AddAssign + Debug + Send + Sync + 'static {}

pub(crate) fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("representable")
}

/// `y = x w + b`, with `w` shaped (inputs, outputs).
#[derive(Clone, Debug, PartialEq)]
pub struct Dense<F> {
    pub w: Array2<F>,
    pub b: Array1<F>,
}

impl<F: Real> Dense<F> {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            w: Array2::zeros((inputs, outputs)),
            b: Array1::zeros(outputs),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.w.nrows(), self.w.ncols())
    }
}

/// ReLU on every hidden layer, linear output.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp<F> {
    pub layers: Vec<Dense<F>>,
}

impl<F: Real> Mlp<F> {
    /// Uniform fan-in initialization, `U(-1/sqrt(n_in), 1/sqrt(n_in))` for
    /// weights and biases.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Self {
        assert!(sizes.len() >= 2, "need at least an input and an output size");
        let layers = sizes
            .windows(2)
            .map(|pair| {
                let (n_in, n_out) = (pair[0], pair[1]);
                let bound = 1.0 / (n_in as f64).sqrt();
                let mut draw = || real::<F>(rng.gen_range(-bound..bound));
                let w = Array2::from_shape_simple_fn((n_in, n_out), &mut draw);
                let b = Array1::from_shape_simple_fn(n_out, &mut draw);
                Dense { w, b }
            })
            .collect();
        Self { layers }
    }

    pub fn zeros(sizes: &[usize]) -> Self {
        Self {
            layers: sizes.windows(2).map(|p| Dense::zeros(p[0], p[1])).collect(),
        }
    }

    /// Layer widths from input to output.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![self.layers[0].w.nrows()];
        sizes.extend(self.layers.iter().map(|l| l.w.ncols()));
        sizes
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].w.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").w.ncols()
    }

    /// Rows of `x` are samples.
    pub fn forward(&self, x: ArrayView2<F>) -> Array2<F> {
        self.forward_trace(x).pop().expect("non-empty")
    }

    pub fn forward_one(&self, x: &[F]) -> Vec<F> {
        let x = ArrayView2::from_shape((1, x.len()), x).expect("row vector");
        self.forward(x).into_raw_vec_and_offset().0
    }

    /// Input followed by every layer's post-activation output.
    pub fn forward_trace(&self, x: ArrayView2<F>) -> Vec<Array2<F>> {
        let last = self.layers.len() - 1;
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_owned());
        for (k, layer) in self.layers.iter().enumerate() {
            let mut z = acts[k].dot(&layer.w);
            z += &layer.b;
            if k < last {
                z.mapv_inplace(|v| v.max(F::zero()));
            }
            acts.push(z);
        }
        acts
    }

    /// Parameter gradients given `d loss / d output` for the traced batch.
    pub fn backward(&self, acts: &[Array2<F>], grad_out: Array2<F>) -> Vec<Dense<F>> {
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut delta = grad_out;
        for k in (0..self.layers.len()).rev() {
            let w = acts[k].t().dot(&delta);
            let b = delta.sum_axis(Axis(0));
            if k > 0 {
                let mut back = delta.dot(&self.layers[k].w.t());
                Zip::from(&mut back).and(&acts[k]).for_each(|d, &a| {
                    if a <= F::zero() {
                        *d = F::zero();
                    }
                });
                delta = back;
            }
            grads.push(Dense { w, b });
        }
        grads.reverse();
        grads
    }

    /// Walks every parameter in checkpoint order: per layer, weights row by
    /// row, then biases.
    pub fn params(&self) -> impl Iterator<Item = F> + '_ {
        self.layers.iter().flat_map(|l| l.w.iter().chain(l.b.iter()).copied())
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut F> + '_ {
        self.layers.iter_mut().flat_map(|l| l.w.iter_mut().chain(l.b.iter_mut()))
    }
}

/// Mean squared error between `Q(s, a)` and the targets, with its
/// parameter gradients.
pub fn q_loss_and_grad<F: Real>(
    net: &Mlp<F>,
    states: ArrayView2<F>,
    actions: &[usize],
    targets: &[F],
) -> (F, Vec<Dense<F>>) {
    let n = actions.len();
    assert_eq!(states.nrows(), n);
    assert_eq!(targets.len(), n);
    let acts = net.forward_trace(states);
    let q = acts.last().expect("non-empty");
    let scale = real::<F>(1.0 / n as f64);
    let mut grad_out = Array2::zeros(q.raw_dim());
    let mut loss = F::zero();
    for (i, (&a, &y)) in actions.iter().zip(targets).enumerate() {
        let err = q[[i, a]] - y;
        loss += err * err;
        grad_out[[i, a]] = real::<F>(2.0) * err * scale;
    }
    let grads = net.backward(&acts, grad_out);
    (loss * scale, grads)
}

/// Adaptive moment estimation.
#[derive(Clone, Debug, PartialEq)]
pub struct Adam<F> {
    pub lr: F,
    pub beta1: F,
    pub beta2: F,
    pub eps: F,
    pub t: i32,
    m: Vec<Dense<F>>,
    v: Vec<Dense<F>>,
}

impl<F: Real> Adam<F> {
    pub fn new(net: &Mlp<F>, lr: f64) -> Self {
        let zeros: Vec<_> = net.layers.iter().map(Dense::zeros_like).collect();
        Self {
            lr: real(lr),
            beta1: real(0.9),
            beta2: real(0.999),
            eps: real(1e-8),
            t: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }

    pub fn step(&mut self, net: &mut Mlp<F>, grads: &[Dense<F>]) {
        self.t += 1;
        let (b1, b2, eps) = (self.beta1, self.beta2, self.eps);
        let one = F::one();
        let c1 = one - b1.powi(self.t);
        let c2 = one - b2.powi(self.t);
        let lr = self.lr;
        let update = |p: &mut F, m: &mut F, v: &mut F, g: &F| {
            *m = b1 * *m + (one - b1) * *g;
            *v = b2 * *v + (one - b2) * *g * *g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
        };
        for (((layer, m), v), g) in net.layers.iter_mut().zip(&mut self.m).zip(&mut self.v).zip(grads) {
            Zip::from(&mut layer.w).and(&mut m.w).and(&mut v.w).and(&g.w).for_each(update);
            Zip::from(&mut layer.b).and(&mut m.b).and(&mut v.b).and(&g.b).for_each(update);
        }
    }
}
