"""Convolutional surrogate network: interchange schema and forward pass.

The weight file is a single canonical JSON document (schema version 1):

    header: schema_version, spatial_dim, layer_count, merge_variant
    layers: kind, in_channels, out_channels, kernel_size, padding,
            activation, weights (flat row-major [out][in][kernel]),
            bias ([out])

Layer kinds: ``circular_conv1d`` (zero-phase periodic padding, odd
kernel), ``dense`` (position-wise channel mix), and the weightless
``pointwise_multiply_merge`` that splits its input channels into three
equal groups and emits ``concat(g1, g2 * g3)`` ("diagram" variant) or
``concat(g1, g1 * g2)`` ("caption" variant), per ``merge_variant`` in
the header.

Serialization is canonical (sorted keys, shortest exact decimal floats)
so export -> load -> export round-trips byte-identically.
"""
import json
from dataclasses import dataclass, field

import numpy as np

from .validation import WeightSchemaError, as_states

__all__ = ["NetworkLayer", "NetworkWeights", "load_weights", "save_weights", "forward"]

SCHEMA_VERSION = 1
ACTIVATIONS = ("relu", "tanh", "identity")
LAYER_KINDS = ("circular_conv1d", "dense", "pointwise_multiply_merge")
MERGE_VARIANTS = ("diagram", "caption")


@dataclass
class NetworkLayer:
    kind: str
    in_channels: int
    out_channels: int
    kernel_size: int = 0
    activation: str = "identity"
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    bias: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def n_parameters(self):
        return int(self.weights.size + self.bias.size)


@dataclass
class NetworkWeights:
    spatial_dim: int
    layers: list
    merge_variant: str = "diagram"
    schema_version: int = SCHEMA_VERSION

    def n_parameters(self):
        return sum(layer.n_parameters() for layer in self.layers)

    def validate(self):
        _validate(self)
        return self


def _layer_error(index, message):
    return WeightSchemaError(f"layer {index}: {message}")


def _validate(net):
    if net.schema_version != SCHEMA_VERSION:
        raise WeightSchemaError(
            f"schema_version {net.schema_version} not supported (expected {SCHEMA_VERSION})"
        )
    if net.merge_variant not in MERGE_VARIANTS:
        raise WeightSchemaError(f"unknown merge_variant {net.merge_variant!r}")
    if net.spatial_dim < 1:
        raise WeightSchemaError(f"spatial_dim must be positive, got {net.spatial_dim}")
    if not net.layers:
        raise WeightSchemaError("network has no layers")
    channels = 1
    for i, layer in enumerate(net.layers):
        if layer.kind not in LAYER_KINDS:
            raise _layer_error(i, f"unknown kind {layer.kind!r}")
        if layer.activation not in ACTIVATIONS:
            raise _layer_error(i, f"unknown activation {layer.activation!r}")
        if layer.in_channels != channels:
            raise _layer_error(
                i, f"expects {layer.in_channels} input channels, previous layer emits {channels}"
            )
        if layer.kind == "circular_conv1d":
            if layer.kernel_size < 1 or layer.kernel_size % 2 == 0:
                raise _layer_error(i, f"kernel size must be odd >= 1, got {layer.kernel_size}")
            expect = layer.out_channels * layer.in_channels * layer.kernel_size
            if layer.weights.size != expect:
                raise _layer_error(
                    i, f"weight count {layer.weights.size} != out*in*kernel = {expect}"
                )
            if layer.bias.size != layer.out_channels:
                raise _layer_error(i, f"bias length {layer.bias.size} != {layer.out_channels}")
        elif layer.kind == "dense":
            expect = layer.out_channels * layer.in_channels
            if layer.weights.size != expect:
                raise _layer_error(i, f"weight count {layer.weights.size} != out*in = {expect}")
            if layer.bias.size != layer.out_channels:
                raise _layer_error(i, f"bias length {layer.bias.size} != {layer.out_channels}")
        else:  # merge
            if layer.in_channels % 3 != 0:
                raise _layer_error(i, f"merge input channels {layer.in_channels} not divisible by 3")
            if layer.out_channels != 2 * (layer.in_channels // 3):
                raise _layer_error(
                    i,
                    f"merge must emit 2/3 of its input channels, got {layer.out_channels}",
                )
            if layer.weights.size or layer.bias.size:
                raise _layer_error(i, "merge layer carries no weights")
        if not np.all(np.isfinite(layer.weights)) or not np.all(np.isfinite(layer.bias)):
            raise _layer_error(i, "non-finite weight or bias value")
        channels = layer.out_channels
    if channels != 1:
        raise WeightSchemaError(
            f"network must end in a single channel to map states to states, got {channels}"
        )


_LAYER_FIELDS = ("kind", "in_channels", "out_channels", "kernel_size",
                 "padding", "activation", "weights", "bias")


def _layer_payload(layer):
    return {
        "kind": layer.kind,
        "in_channels": int(layer.in_channels),
        "out_channels": int(layer.out_channels),
        "kernel_size": int(layer.kernel_size),
        "padding": "circular",
        "activation": layer.activation,
        "weights": [float(w) for w in np.asarray(layer.weights, dtype=float).ravel()],
        "bias": [float(b) for b in np.asarray(layer.bias, dtype=float).ravel()],
    }


def dumps(net):
    """Canonical JSON text for a validated network."""
    net.validate()
    payload = {
        "schema_version": int(net.schema_version),
        "spatial_dim": int(net.spatial_dim),
        "layer_count": len(net.layers),
        "merge_variant": net.merge_variant,
        "layers": [_layer_payload(layer) for layer in net.layers],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def save_weights(net, path):
    with open(path, "w") as fh:
        fh.write(dumps(net))


def _require(mapping, key, context):
    if key not in mapping:
        raise WeightSchemaError(f"{context}: missing field {key!r}")
    return mapping[key]


def load_weights(path):
    """Parse and validate a weight file; shape errors name the layer."""
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise WeightSchemaError(f"weight file is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise WeightSchemaError("weight file must hold a JSON object")
    version = _require(payload, "schema_version", "header")
    spatial = _require(payload, "spatial_dim", "header")
    count = _require(payload, "layer_count", "header")
    raw_layers = _require(payload, "layers", "header")
    if len(raw_layers) != count:
        raise WeightSchemaError(
            f"header declares {count} layers but file holds {len(raw_layers)}"
        )
    layers = []
    for i, raw in enumerate(raw_layers):
        for name in _LAYER_FIELDS:
            _require(raw, name, f"layer {i}")
        layers.append(
            NetworkLayer(
                kind=raw["kind"],
                in_channels=int(raw["in_channels"]),
                out_channels=int(raw["out_channels"]),
                kernel_size=int(raw["kernel_size"]),
                activation=raw["activation"],
                weights=np.asarray(raw["weights"], dtype=float),
                bias=np.asarray(raw["bias"], dtype=float),
            )
        )
    net = NetworkWeights(
        spatial_dim=int(spatial),
        layers=layers,
        merge_variant=payload.get("merge_variant", "diagram"),
        schema_version=int(version),
    )
    return net.validate()


def _activate(x, tag):
    if tag == "relu":
        return np.maximum(x, 0.0)
    if tag == "tanh":
        return np.tanh(x)
    return x


def forward(net, u):
    """Evaluate the network on state(s) of length ``spatial_dim``.

    All convolutions use zero-phase circular padding, so the map commutes
    exactly with cyclic shifts of the input when every layer is
    convolutional or pointwise.
    """
    u, single = as_states(u, dim=net.spatial_dim, name="network input")
    d = net.spatial_dim
    x = u[None, :, :]  # (channels, d, batch)
    for i, layer in enumerate(net.layers):
        if layer.kind == "circular_conv1d":
            k = layer.kernel_size
            batch = x.shape[2]
            idx = (np.arange(d)[:, None] + np.arange(k) - (k - 1) // 2) % d
            # gather windows as (in * k, d * batch) so the contraction is a
            # single matrix product
            window = x[:, idx, :].transpose(0, 2, 1, 3).reshape(
                layer.in_channels * k, d * batch
            )
            w = layer.weights.reshape(layer.out_channels, layer.in_channels * k)
            x = (w @ window).reshape(layer.out_channels, d, batch)
            x = x + layer.bias[:, None, None]
        elif layer.kind == "dense":
            w = layer.weights.reshape(layer.out_channels, layer.in_channels)
            x = np.einsum("oc,cdb->odb", w, x) + layer.bias[:, None, None]
        else:
            g = layer.in_channels // 3
            g1, g2, g3 = x[:g], x[g : 2 * g], x[2 * g :]
            prod = g1 * g2 if net.merge_variant == "caption" else g2 * g3
            x = np.concatenate([g1, prod], axis=0)
        x = _activate(x, layer.activation)
    out = x[0]
    return out[:, 0] if single else out
