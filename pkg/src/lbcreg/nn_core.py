"""Fully connected ReLU network with hand-written reverse-mode gradients.

The substrate for every estimator in the package: hidden layers are ReLU,
the head is configurable (identity for regression means, softplus for a
single positive output, cumulative softplus for nested interval widths).
Everything runs in float64; gradients are exact, not approximated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fileio, kernels

HEADS = ("identity", "softplus", "cumulative_softplus")

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

CHECKPOINT_FORMAT = "lbcreg-checkpoint"
CHECKPOINT_VERSION = 1


class NonFiniteError(FloatingPointError):
    """A value that must be finite is not."""


@dataclass
class Mlp:
    """Weights and biases of a fully connected ReLU network.

    ``layer_dims`` is [input, hidden..., output]; ``weights[i]`` has shape
    (layer_dims[i], layer_dims[i+1]) and maps left-to-right as ``x @ W + b``.
    """

    layer_dims: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    head: str = "identity"

    def __post_init__(self):
        self.validate()

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def output_dim(self) -> int:
        return self.layer_dims[-1]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def validate(self):
        if self.head not in HEADS:
            raise ValueError(f"unknown head activation {self.head!r}; expected one of {HEADS}")
        if len(self.layer_dims) < 2 or any(d <= 0 for d in self.layer_dims):
            raise ValueError(f"layer_dims must be >=2 positive ints, got {self.layer_dims}")
        n_transitions = len(self.layer_dims) - 1
        if len(self.weights) != n_transitions or len(self.biases) != n_transitions:
            raise ValueError(
                f"expected {n_transitions} weight/bias pairs, got "
                f"{len(self.weights)}/{len(self.biases)}"
            )
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            want = (self.layer_dims[i], self.layer_dims[i + 1])
            if w.shape != want:
                raise ValueError(f"weights[{i}] has shape {w.shape}, expected {want}")
            if b.shape != (self.layer_dims[i + 1],):
                raise ValueError(f"biases[{i}] has shape {b.shape}, expected ({want[1]},)")
            if not (np.isfinite(w).all() and np.isfinite(b).all()):
                raise NonFiniteError(f"non-finite parameter in layer {i}")

    def copy(self) -> "Mlp":
        return Mlp(
            layer_dims=list(self.layer_dims),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            head=self.head,
        )


@dataclass
class Gradients:
    """Parameter gradients, shape-congruent with the owning Mlp."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]


@dataclass
class OptimizerState:
    """Adaptive-moment accumulators; step counter advances by 1 per update."""

    m_weights: list[np.ndarray]
    m_biases: list[np.ndarray]
    v_weights: list[np.ndarray]
    v_biases: list[np.ndarray]
    learning_rate: float
    step: int = 0
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPS


def init_mlp(layer_dims, head="identity", rng=None, seed=0) -> Mlp:
    """Uniform init scaled by 1/sqrt(fan_in), zero biases, seeded PRNG."""
    if rng is None:
        rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
        limit = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return Mlp(layer_dims=list(layer_dims), weights=weights, biases=biases, head=head)


def optimizer_state(model: Mlp, learning_rate: float) -> OptimizerState:
    if learning_rate <= 0:
        raise ValueError(f"learning rate must be positive, got {learning_rate}")
    return OptimizerState(
        m_weights=[np.zeros_like(w) for w in model.weights],
        m_biases=[np.zeros_like(b) for b in model.biases],
        v_weights=[np.zeros_like(w) for w in model.weights],
        v_biases=[np.zeros_like(b) for b in model.biases],
        learning_rate=learning_rate,
    )


def _check_batch(model: Mlp, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"x_batch must be 2-D, got shape {x.shape}")
    if x.shape[1] != model.input_dim:
        raise ValueError(f"x_batch has {x.shape[1]} columns, model expects {model.input_dim}")
    if not np.isfinite(x).all():
        raise NonFiniteError("x_batch contains non-finite values")
    return x


def _apply_head(head: str, z: np.ndarray) -> np.ndarray:
    if head == "identity":
        return z
    if head == "softplus":
        return kernels.softplus(z)
    return kernels.cumulative_softplus(z)


@dataclass
class ForwardCache:
    """Intermediates of one forward pass, consumed by backward()."""

    activations: list[np.ndarray]  # input plus each post-ReLU hidden activation
    head_z: np.ndarray             # pre-head affine output
    masks: list[np.ndarray] | None = None  # dropout masks, one per hidden layer


def forward_cached(model: Mlp, x, dropout_p: float = 0.0, rng=None,
                   masks=None) -> tuple[np.ndarray, ForwardCache]:
    """Forward pass that keeps intermediates. Dropout applies inverted masks
    to hidden activations only; pass ``masks`` to replay a previous pass."""
    x = _check_batch(model, x)
    use_dropout = dropout_p > 0.0 or masks is not None
    if dropout_p > 0.0 and masks is None:
        if rng is None:
            raise ValueError("dropout requires an rng (or explicit masks)")
        keep = 1.0 - dropout_p
        masks = [
            (rng.random((x.shape[0], dim)) < keep).astype(np.float64) / keep
            for dim in model.layer_dims[1:-1]
        ]
    a = x
    activations = [x]
    for i in range(model.n_layers - 1):
        a = np.maximum(a @ model.weights[i] + model.biases[i], 0.0)
        if use_dropout:
            a = a * masks[i]
        activations.append(a)
    z = a @ model.weights[-1] + model.biases[-1]
    out = _apply_head(model.head, z)
    return out, ForwardCache(activations=activations, head_z=z, masks=masks)


def forward(model: Mlp, x, dropout_p: float = 0.0, rng=None) -> np.ndarray:
    """Head-activated network output; pure in (model, x) when dropout is off."""
    out, _ = forward_cached(model, x, dropout_p=dropout_p, rng=rng)
    return out


def backward(model: Mlp, x, upstream_grad, cache: ForwardCache | None = None) -> Gradients:
    """Gradients of sum(upstream * output) w.r.t. every parameter.

    Recomputes the forward pass when no cache is given; a cached pass must
    come from the same (model, x), including any dropout masks.
    """
    if cache is None:
        _, cache = forward_cached(model, x)
    upstream = np.asarray(upstream_grad, dtype=np.float64)
    z = cache.head_z
    if upstream.shape != z.shape:
        raise ValueError(f"upstream_grad shape {upstream.shape} does not match output {z.shape}")

    if model.head == "softplus":
        g = kernels.sigmoid(z) * upstream
    elif model.head == "cumulative_softplus":
        g = kernels.cumulative_softplus_grad(z, np.ascontiguousarray(upstream))
    else:
        g = upstream

    d_weights: list = [None] * model.n_layers
    d_biases: list = [None] * model.n_layers
    acts = cache.activations
    for i in range(model.n_layers - 1, -1, -1):
        d_weights[i] = acts[i].T @ g
        d_biases[i] = g.sum(axis=0)
        if i > 0:
            g = (g @ model.weights[i].T) * (acts[i] > 0.0)
            if cache.masks is not None:
                # (acts > 0) is 0 wherever the mask dropped a unit, so this
                # only reintroduces the inverted-dropout 1/keep scaling
                g = g * cache.masks[i - 1]
    return Gradients(weights=d_weights, biases=d_biases)


def adam_step(model: Mlp, grads: Gradients, state: OptimizerState) -> tuple[Mlp, OptimizerState]:
    """One bias-corrected adaptive-moment update, in place on the model."""
    if len(grads.weights) != model.n_layers or len(grads.biases) != model.n_layers:
        raise ValueError("gradient layer count does not match model")
    for i, (gw, gb) in enumerate(zip(grads.weights, grads.biases)):
        if gw.shape != model.weights[i].shape or gb.shape != model.biases[i].shape:
            raise ValueError(f"gradient shape mismatch in layer {i}")
        if not (np.isfinite(gw).all() and np.isfinite(gb).all()):
            raise NonFiniteError(f"non-finite gradient in layer {i}; update rejected")
    state.step += 1
    t = state.step
    for p, g, m, v in zip(model.weights, grads.weights, state.m_weights, state.v_weights):
        kernels.adam_update(p.reshape(-1), np.ascontiguousarray(g).reshape(-1),
                            m.reshape(-1), v.reshape(-1),
                            t, state.learning_rate, state.beta1, state.beta2, state.eps)
    for p, g, m, v in zip(model.biases, grads.biases, state.m_biases, state.v_biases):
        kernels.adam_update(p, np.ascontiguousarray(g), m, v,
                            t, state.learning_rate, state.beta1, state.beta2, state.eps)
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise NonFiniteError(f"update produced non-finite parameters in layer {i}")
    return model, state


def flatten_parameters(model: Mlp) -> np.ndarray:
    """All parameters as one flat vector, layer order, weights before bias."""
    parts = []
    for w, b in zip(model.weights, model.biases):
        parts.append(w.reshape(-1))
        parts.append(b)
    return np.concatenate(parts)


def set_flat_parameters(model: Mlp, flat: np.ndarray):
    flat = np.asarray(flat, dtype=np.float64)
    pos = 0
    for w, b in zip(model.weights, model.biases):
        w[...] = flat[pos:pos + w.size].reshape(w.shape)
        pos += w.size
        b[...] = flat[pos:pos + b.size]
        pos += b.size
    if pos != flat.size:
        raise ValueError(f"flat vector has {flat.size} entries, model needs {pos}")


def save_checkpoint(model: Mlp, path, method: str | None = None,
                    seed: int | None = None, extra: dict | None = None):
    """Self-describing JSON checkpoint; round-trips parameter values exactly."""
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "layer_dims": list(model.layer_dims),
        "head": model.head,
        "parameters": [float(v) for v in flatten_parameters(model)],
        "method": method,
        "seed": seed,
        "extra": extra,
    }
    fileio.write_json(path, doc, schema="checkpoint")


def load_checkpoint(path) -> tuple[Mlp, dict]:
    doc = fileio.read_json(path)
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path} is not a {CHECKPOINT_FORMAT} document")
    dims = [int(d) for d in doc["layer_dims"]]
    model = init_mlp(dims, head=doc["head"], rng=np.random.default_rng(0))
    set_flat_parameters(model, np.array(doc["parameters"], dtype=np.float64))
    meta = {"method": doc.get("method"), "seed": doc.get("seed"), "extra": doc.get("extra")}
    return model, meta
