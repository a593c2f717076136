"""Complex-valued fully-connected classifier with manual backprop.

Hidden layers take the output magnitude and re-phase it with a fixed
polyphase ramp; the last layer's magnitudes feed a softmax cross-entropy.
Complex parameters are trained as paired real values (Adam runs on the
float view), and the gradients here are validated against central finite
differences in the test suite.
"""

from __future__ import annotations

import numpy as np

__all__ = ["zc_phases", "ComplexMlp", "Adam", "softmax_cross_entropy"]


def zc_phases(length: int) -> np.ndarray:
    """Polyphase ramp phi[m] = -pi*m*(m + (length mod 2))/length."""
    m = np.arange(length, dtype=np.float64)
    return -np.pi * m * (m + length % 2) / length


def softmax_cross_entropy(scores: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy over the batch and its gradient wrt scores."""
    shifted = scores - scores.max(axis=1, keepdims=True)
    ez = np.exp(shifted)
    probs = ez / ez.sum(axis=1, keepdims=True)
    batch = scores.shape[0]
    nll = -np.log(probs[np.arange(batch), labels] + 1e-300)
    grad = probs.copy()
    grad[np.arange(batch), labels] -= 1.0
    return float(nll.mean()), grad / batch


class ComplexMlp:
    """Stack of complex linear layers with magnitude activations."""

    def __init__(self, dims, seed: int = 0):
        if len(dims) < 2:
            raise ValueError("need at least input and output sizes")
        rng = np.random.default_rng(seed)
        self.weights = []
        for n_in, n_out in zip(dims, dims[1:]):
            w = rng.standard_normal((n_out, n_in)) + 1j * rng.standard_normal(
                (n_out, n_in)
            )
            self.weights.append(w / np.sqrt(2.0 * n_in))
        self.phasors = [
            np.exp(1j * zc_phases(w.shape[0])) for w in self.weights[:-1]
        ]

    @property
    def dims(self):
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    def forward(self, x: np.ndarray, keep: bool = False):
        """Batch forward; x is (batch, n_in). Returns |y| scores."""
        acts = [np.asarray(x, dtype=np.complex128)]
        pre = []
        a = acts[0]
        for i, w in enumerate(self.weights):
            z = a @ w.T
            pre.append(z)
            if i < len(self.weights) - 1:
                a = np.abs(z) * self.phasors[i][None, :]
            else:
                a = np.abs(z)
            acts.append(a)
        if keep:
            self._acts, self._pre = acts, pre
        return acts[-1]

    def backward(self, grad_scores: np.ndarray):
        """Gradients of a real loss wrt each complex weight matrix.

        grad_scores is dLoss/d|y| for the last layer.  Magnitudes pass
        gradient only along the radial direction: dL/dz = (z/|z|) * g.
        """
        grads = [None] * len(self.weights)
        eps = 1e-300
        g_a = grad_scores  # real, wrt |z_last|
        for i in range(len(self.weights) - 1, -1, -1):
            z = self._pre[i]
            radial = z / (np.abs(z) + eps)
            if i == len(self.weights) - 1:
                g_z = radial * g_a
            else:
                g_z = radial * np.real(g_a * np.conj(self.phasors[i])[None, :])
            a_prev = self._acts[i]
            grads[i] = g_z.T @ np.conj(a_prev)
            g_a = g_z @ np.conj(self.weights[i])
        return grads

    def loss_and_grads(self, x: np.ndarray, labels: np.ndarray):
        scores = self.forward(x, keep=True)
        loss, g = softmax_cross_entropy(scores, labels)
        return loss, self.backward(g)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.argmax(self.forward(x), axis=1)

    def accuracy(self, x: np.ndarray, labels: np.ndarray) -> float:
        return float(np.mean(self.predict(x) == labels))

    def copy_weights(self):
        return [w.copy() for w in self.weights]


class Adam:
    """Adam on the real view of complex parameter arrays."""

    def __init__(self, params, lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = [np.zeros(p.shape + (2,)) for p in params]
        self.v = [np.zeros(p.shape + (2,)) for p in params]
        self.t = 0

    def step(self, grads):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        correct1 = 1.0 - b1**self.t
        correct2 = 1.0 - b2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            gr = np.stack([g.real, g.imag], axis=-1)
            m *= b1
            m += (1 - b1) * gr
            v *= b2
            v += (1 - b2) * gr * gr
            m_hat = m / correct1
            v_hat = v / correct2
            upd = self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
            p -= upd[..., 0] + 1j * upd[..., 1]
