"""Weight interchange: canonical JSON schema shared with the filter package.

Schema version 1: header {schema_version, spatial_dim, layer_count,
merge_variant}; per layer {kind, in_channels, out_channels, kernel_size,
padding, activation, weights (flat row-major [out][in][kernel]), bias}.
Values are rounded to float32 (the training precision) and written as
shortest exact decimals; export -> load -> export round-trips byte for
byte. The file is validated before writing and after reading.
"""
import json

import numpy as np
import torch

from .network import MERGE_VARIANTS, SurrogateNet


class WeightFileError(ValueError):
    """Weight payload violates the interchange schema."""


def _f32_list(tensor):
    arr = np.asarray(tensor, dtype=np.float32).astype(float).ravel()
    return [float(v) for v in arr]


def export_payload(net, spatial_dim, input_shift=0.0, input_scale=1.0,
                   output_shift=0.0, output_scale=1.0):
    """Schema payload for a trained network, folding data normalization.

    The network was trained on inputs (u - input_shift) / input_scale and
    targets (v - output_shift) / output_scale; both affine maps fold
    exactly into the first and last convolution (circular padding makes
    the input fold position independent), so the exported file computes
    on raw states.
    """
    w1 = net.conv1.weight.detach().double() / input_scale
    b1 = net.conv1.bias.detach().double() - (input_shift / input_scale) * (
        net.conv1.weight.detach().double().sum(dim=(1, 2))
    )
    w5 = net.conv5.weight.detach().double() * output_scale
    b5 = net.conv5.bias.detach().double() * output_scale + output_shift

    def conv_layer(weight, bias, activation):
        out_ch, in_ch, kernel = weight.shape
        return {
            "kind": "circular_conv1d",
            "in_channels": int(in_ch),
            "out_channels": int(out_ch),
            "kernel_size": int(kernel),
            "padding": "circular",
            "activation": activation,
            "weights": _f32_list(weight),
            "bias": _f32_list(bias),
        }

    g = net.group_channels
    layers = [
        conv_layer(w1, b1, "identity"),
        {
            "kind": "pointwise_multiply_merge",
            "in_channels": 3 * g,
            "out_channels": 2 * g,
            "kernel_size": 0,
            "padding": "circular",
            "activation": "identity",
            "weights": [],
            "bias": [],
        },
        conv_layer(net.conv2.weight.detach().double(), net.conv2.bias.detach().double(), "relu"),
        conv_layer(net.conv3.weight.detach().double(), net.conv3.bias.detach().double(), "relu"),
        conv_layer(net.conv4.weight.detach().double(), net.conv4.bias.detach().double(), "relu"),
        conv_layer(w5, b5, "identity"),
    ]
    return {
        "schema_version": 1,
        "spatial_dim": int(spatial_dim),
        "layer_count": len(layers),
        "merge_variant": net.merge_variant,
        "layers": layers,
    }


def validate_payload(payload):
    if payload.get("schema_version") != 1:
        raise WeightFileError(f"unsupported schema_version {payload.get('schema_version')!r}")
    if payload.get("merge_variant") not in MERGE_VARIANTS:
        raise WeightFileError(f"unknown merge_variant {payload.get('merge_variant')!r}")
    layers = payload.get("layers")
    if not isinstance(layers, list) or payload.get("layer_count") != len(layers):
        raise WeightFileError("layer_count does not match the layer list")
    channels = 1
    for i, layer in enumerate(layers):
        for field in ("kind", "in_channels", "out_channels", "kernel_size",
                      "padding", "activation", "weights", "bias"):
            if field not in layer:
                raise WeightFileError(f"layer {i}: missing field {field!r}")
        if layer["in_channels"] != channels:
            raise WeightFileError(
                f"layer {i}: expects {layer['in_channels']} input channels, "
                f"previous emits {channels}"
            )
        if layer["kind"] == "circular_conv1d":
            expect = layer["out_channels"] * layer["in_channels"] * layer["kernel_size"]
            if len(layer["weights"]) != expect:
                raise WeightFileError(f"layer {i}: weight count {len(layer['weights'])} != {expect}")
            if len(layer["bias"]) != layer["out_channels"]:
                raise WeightFileError(f"layer {i}: bias count mismatch")
        elif layer["kind"] == "pointwise_multiply_merge":
            if layer["in_channels"] % 3 or layer["out_channels"] != 2 * layer["in_channels"] // 3:
                raise WeightFileError(f"layer {i}: bad merge channel counts")
            if layer["weights"] or layer["bias"]:
                raise WeightFileError(f"layer {i}: merge carries no weights")
        else:
            raise WeightFileError(f"layer {i}: unknown kind {layer['kind']!r}")
        values = np.asarray(layer["weights"] + layer["bias"], dtype=float)
        if values.size and not np.all(np.isfinite(values)):
            raise WeightFileError(f"layer {i}: non-finite value")
        channels = layer["out_channels"]
    if channels != 1:
        raise WeightFileError("network must end in one channel")
    return payload


def dumps(payload):
    validate_payload(payload)
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def save(payload, path):
    with open(path, "w") as fh:
        fh.write(dumps(payload))


def load(path):
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise WeightFileError(f"not valid JSON: {exc}") from exc
    return validate_payload(payload)


def net_from_payload(payload, dtype=torch.float64):
    """Rebuild torch modules from a schema payload (double by default).

    Used by the reference forward pass so the executed network comes from
    the interchange file, not from a live training object.
    """
    validate_payload(payload)
    layers = payload["layers"]
    kinds = [l["kind"] for l in layers]
    if kinds != ["circular_conv1d", "pointwise_multiply_merge"] + ["circular_conv1d"] * 4:
        raise WeightFileError("payload is not the lift/merge/head topology of this trainer")
    convs = [l for l in layers if l["kind"] == "circular_conv1d"]
    if not (convs[0]["kernel_size"] == convs[1]["kernel_size"] == convs[2]["kernel_size"]
            == convs[3]["kernel_size"]) or convs[4]["kernel_size"] != 1:
        raise WeightFileError("unexpected kernel sizes for this trainer's topology")
    g = layers[1]["in_channels"] // 3
    net = SurrogateNet(
        group_channels=g,
        hidden_channels=convs[1]["out_channels"],
        kernel_size=convs[0]["kernel_size"],
        merge_variant=payload["merge_variant"],
    ).to(dtype)
    with torch.no_grad():
        for conv, spec in zip((net.conv1, net.conv2, net.conv3, net.conv4, net.conv5), convs):
            shape = (spec["out_channels"], spec["in_channels"], spec["kernel_size"])
            conv.weight.copy_(torch.tensor(spec["weights"], dtype=dtype).reshape(shape))
            conv.bias.copy_(torch.tensor(spec["bias"], dtype=dtype))
    return net
