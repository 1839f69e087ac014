"""Minimal differentiable MLPs with reverse-accumulation gradients.

A ParamFunction is a stack of affine layers with an elementwise
nonlinearity on hidden layers and a linear output, parameterized by one
flat float64 vector. Forward supports single inputs (d,) or batches
(B, d); backward takes an output cotangent and returns the
parameter-gradient (and input-gradient) of <cotangent, forward(x)>.
"""

import json
from dataclasses import dataclass, field

import numpy as np


def _tanh(z):
    return np.tanh(z)


def _tanh_grad(z, y):
    return 1.0 - y * y


def _relu(z):
    return np.maximum(z, 0.0)


def _relu_grad(z, y):
    return (z > 0.0).astype(float)


def _softplus(z):
    return np.logaddexp(0.0, z)


def _softplus_grad(z, y):
    return 1.0 / (1.0 + np.exp(-z))


ACTIVATIONS = {
    "tanh": (_tanh, _tanh_grad),
    "relu": (_relu, _relu_grad),
    "softplus": (_softplus, _softplus_grad),
}


def param_count(layer_sizes):
    return sum((n_in + 1) * n_out for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]))


@dataclass
class ParamFunction:
    layer_sizes: list
    activation: str = "tanh"
    rng_seed: int = 0
    params: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        n = param_count(self.layer_sizes)
        if self.params is None:
            # scaled uniform fan-in init, recorded seed
            rng = np.random.default_rng(self.rng_seed)
            chunks = []
            for n_in, n_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
                bound = 1.0 / np.sqrt(n_in)
                chunks.append(rng.uniform(-bound, bound, size=n_in * n_out))
                chunks.append(np.zeros(n_out))
            self.params = np.concatenate(chunks)
        else:
            self.params = np.asarray(self.params, dtype=float)
            if self.params.shape != (n,):
                raise ValueError(f"expected {n} parameters, got {self.params.shape}")

    def _layers(self, params=None):
        p = self.params if params is None else params
        out = []
        i = 0
        for n_in, n_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            W = p[i:i + n_in * n_out].reshape(n_in, n_out)
            i += n_in * n_out
            b = p[i:i + n_out]
            i += n_out
            out.append((W, b))
        return out

    def forward(self, x):
        y, _ = self.forward_cached(x)
        return y

    def forward_cached(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        h = x[None, :] if single else x
        if h.shape[1] != self.layer_sizes[0]:
            raise ValueError(f"input width {h.shape[1]} != {self.layer_sizes[0]}")
        act, _ = ACTIVATIONS[self.activation]
        layers = self._layers()
        cache = {"inputs": [], "zs": [], "hs": [], "single": single}
        for li, (W, b) in enumerate(layers):
            cache["inputs"].append(h)
            z = h @ W + b
            cache["zs"].append(z)
            if li < len(layers) - 1:
                h = act(z)
            else:
                h = z
            cache["hs"].append(h)
        return (h[0] if single else h), cache

    def backward(self, cache, cotangent):
        """Gradients of <cotangent, forward(x)> w.r.t. params and input."""
        cot = np.asarray(cotangent, dtype=float)
        if cache["single"]:
            cot = cot[None, :]
        _, dact = ACTIVATIONS[self.activation]
        layers = self._layers()
        grads = [None] * len(layers)
        delta = cot
        for li in reversed(range(len(layers))):
            if li < len(layers) - 1:
                delta = delta * dact(cache["zs"][li], cache["hs"][li])
            h_in = cache["inputs"][li]
            gW = h_in.T @ delta
            gb = delta.sum(axis=0)
            grads[li] = (gW, gb)
            delta = delta @ layers[li][0].T
        flat = np.concatenate([np.concatenate([gW.ravel(), gb]) for gW, gb in grads])
        grad_input = delta[0] if cache["single"] else delta
        return flat, grad_input

    def gradient(self, loss_seed, x):
        """Parameter gradient of <loss_seed, forward(x)>."""
        _, cache = self.forward_cached(x)
        flat, _ = self.backward(cache, loss_seed)
        return flat


@dataclass
class Adam:
    """Adaptive-moment first-order optimizer (minimizes)."""

    step_size: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    m: np.ndarray = None
    v: np.ndarray = None
    t: int = 0

    def step(self, params, grad):
        grad = np.asarray(grad, dtype=float)
        if not np.isfinite(grad).all():
            bad = np.nonzero(~np.isfinite(grad))[0][:5]
            raise FloatingPointError(f"non-finite gradient at indices {bad.tolist()}")
        if self.m is None:
            self.m = np.zeros_like(grad)
            self.v = np.zeros_like(grad)
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad * grad
        mhat = self.m / (1 - self.beta1 ** self.t)
        vhat = self.v / (1 - self.beta2 ** self.t)
        return params - self.step_size * mhat / (np.sqrt(vhat) + self.eps)

    def state_dict(self):
        return {"step_size": self.step_size, "beta1": self.beta1, "beta2": self.beta2,
                "eps": self.eps, "t": self.t,
                "m": None if self.m is None else self.m.tolist(),
                "v": None if self.v is None else self.v.tolist()}

    @classmethod
    def from_state(cls, d):
        o = cls(step_size=d["step_size"], beta1=d["beta1"], beta2=d["beta2"], eps=d["eps"])
        o.t = d["t"]
        o.m = None if d["m"] is None else np.asarray(d["m"])
        o.v = None if d["v"] is None else np.asarray(d["v"])
        return o


def finite_difference_gradient(f, params, h=1e-5):
    """Central finite differences of scalar f(params); the gradient oracle."""
    g = np.zeros_like(params)
    for i in range(len(params)):
        up = params.copy(); up[i] += h
        dn = params.copy(); dn[i] -= h
        g[i] = (f(up) - f(dn)) / (2 * h)
    return g


def save_checkpoint(path, pf, extra_header=None):
    """JSON header line + raw little-endian float64 parameter block."""
    header = {"layer_sizes": list(pf.layer_sizes), "activation": pf.activation,
              "seed": pf.rng_seed}
    if extra_header:
        header.update(extra_header)
    with open(path, "wb") as f:
        f.write(json.dumps(header).encode() + b"\n")
        f.write(pf.params.astype("<f8").tobytes())


def load_checkpoint(path):
    with open(path, "rb") as f:
        header = json.loads(f.readline().decode())
        params = np.frombuffer(f.read(), dtype="<f8").copy()
    pf = ParamFunction(layer_sizes=header["layer_sizes"], activation=header["activation"],
                       rng_seed=header.get("seed", 0), params=params)
    return pf, header
