//! Smoothed max-pairwise-distance objective over radially projected points
//! with a quadratic hull penalty.

use crate::lp::Exponent;

/// Smoothed `‖v‖_p`: the exponent is moved into `[1 + η, 1/η]`, which keeps
/// the norm homogeneous and differentiable. Writes `∇` into `grad`.
pub(crate) fn smooth_norm(v: &[f64], p: Exponent, eta: f64, grad: &mut [f64]) -> f64 {
    let q = match p {
        Exponent::Infinity => 1.0 / eta,
        Exponent::Finite(q) => q.clamp(1.0 + eta, 1.0 / eta),
    };
    let top = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if top == 0.0 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        return 0.0;
    }
    let total: f64 = v.iter().map(|x| (x.abs() / top).powf(q)).sum();
    let n = top * total.powf(1.0 / q);
    for (g, x) in grad.iter_mut().zip(v) {
        *g = (x.abs() / n).powf(q - 1.0) * x.signum();
    }
    n
}

/// Flat parameter layout: `n + 1` raw points of `R^n`, then `n + 1` logits.
pub(crate) struct Objective {
    pub n: usize,
    pub p: Exponent,
    /// Norm smoothing.
    pub eta: f64,
    /// Log-sum-exp temperature over pairwise distances.
    pub tau: f64,
    /// Hull penalty weight.
    pub rho: f64,
}

impl Objective {
    pub fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let n = self.n;
        let m = n + 1;
        let (raw, logits) = x.split_at(m * n);
        grad.iter_mut().for_each(|g| *g = 0.0);

        let mut pts = vec![0.0; m * n];
        let mut norms = vec![0.0; m];
        let mut ngrad = vec![0.0; m * n];
        for i in 0..m {
            let xi = &raw[i * n..(i + 1) * n];
            norms[i] = smooth_norm(xi, self.p, self.eta, &mut ngrad[i * n..(i + 1) * n]);
            for k in 0..n {
                pts[i * n + k] = xi[k] / norms[i];
            }
        }

        let top = logits.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let mut lambda: Vec<f64> = logits.iter().map(|w| (w - top).exp()).collect();
        let z: f64 = lambda.iter().sum();
        lambda.iter_mut().for_each(|l| *l /= z);

        // Upstream gradient with respect to the projected points.
        let mut gpts = vec![0.0; m * n];

        let pairs = m * (m - 1) / 2;
        let mut dists = Vec::with_capacity(pairs);
        let mut dgrads = vec![0.0; pairs * n];
        let mut diff = vec![0.0; n];
        let mut idx = 0;
        for i in 0..m {
            for j in i + 1..m {
                for k in 0..n {
                    diff[k] = pts[i * n + k] - pts[j * n + k];
                }
                dists.push(smooth_norm(&diff, self.p, self.eta, &mut dgrads[idx * n..(idx + 1) * n]));
                idx += 1;
            }
        }
        let dmax = dists.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let weights: Vec<f64> = dists.iter().map(|d| ((d - dmax) / self.tau).exp()).collect();
        let wz: f64 = weights.iter().sum();
        let mut value = dmax + self.tau * wz.ln();
        idx = 0;
        for i in 0..m {
            for j in i + 1..m {
                let w = weights[idx] / wz;
                for k in 0..n {
                    let g = w * dgrads[idx * n + k];
                    gpts[i * n + k] += g;
                    gpts[j * n + k] -= g;
                }
                idx += 1;
            }
        }

        let mut r = vec![0.0; n];
        for i in 0..m {
            for k in 0..n {
                r[k] += lambda[i] * pts[i * n + k];
            }
        }
        value += 0.5 * self.rho * r.iter().map(|v| v * v).sum::<f64>();
        let mut dlambda = vec![0.0; m];
        for i in 0..m {
            for k in 0..n {
                gpts[i * n + k] += self.rho * lambda[i] * r[k];
                dlambda[i] += self.rho * r[k] * pts[i * n + k];
            }
        }
        let mean: f64 = lambda.iter().zip(&dlambda).map(|(l, d)| l * d).sum();
        for i in 0..m {
            grad[m * n + i] = lambda[i] * (dlambda[i] - mean);
        }

        // Back through f = x / N(x).
        for i in 0..m {
            let xi = &raw[i * n..(i + 1) * n];
            let gi = &gpts[i * n..(i + 1) * n];
            let dot: f64 = gi.iter().zip(xi).map(|(a, b)| a * b).sum();
            let nn = norms[i];
            for k in 0..n {
                grad[i * n + k] = gi[k] / nn - ngrad[i * n + k] * dot / (nn * nn);
            }
        }
        value
    }
}
