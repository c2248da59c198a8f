"""Adam optimizer with bias-corrected moment estimates."""

import numpy as np


class Adam:
    def __init__(self, params, lr=1e-3, betas=(0.9, 0.999), eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self):
        for p in self.params:
            p.grad = None

    def step(self):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for i, p in enumerate(self.params):
            g = p.grad
            if g is None:
                g = 0.0
            self.m[i] = b1 * self.m[i] + (1 - b1) * g
            self.v[i] = b2 * self.v[i] + (1 - b2) * (g * g)
            m_hat = self.m[i] / (1 - b1 ** self.t)
            v_hat = self.v[i] / (1 - b2 ** self.t)
            p.data = p.data - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def state_arrays(self):
        """Optimizer state for checkpointing: (t, moments, second moments)."""
        return self.t, [m.copy() for m in self.m], [v.copy() for v in self.v]

    def load_state_arrays(self, t, m, v):
        if len(m) != len(self.params) or len(v) != len(self.params):
            raise ValueError("optimizer state does not match parameter list")
        self.t = t
        self.m = [np.asarray(a, dtype=p.data.dtype)
                  for a, p in zip(m, self.params)]
        self.v = [np.asarray(a, dtype=p.data.dtype)
                  for a, p in zip(v, self.params)]
