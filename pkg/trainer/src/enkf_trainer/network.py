"""Convolutional surrogate architecture.

Input passes through a wide circular convolution whose output channels
split into three equal groups; two groups combine by a pointwise product
and are concatenated with the first, then three hidden circular
convolutions and a final kernel-1 convolution map back to one channel:

    u -> conv1 (1 -> 3g) -> [g1 | g2 | g3] -> concat(g1, g2*g3)
      -> conv2 (2g -> c) -> conv3 (c -> c) -> conv4 (c -> c) -> conv5 (c -> 1)

The merge uses g2*g3 ("diagram" variant) or g1*g2 ("caption" variant).
All convolutions pad circularly, so the network commutes with cyclic
shifts of the input.
"""
import torch
from torch import nn

MERGE_VARIANTS = ("diagram", "caption")


class SurrogateNet(nn.Module):
    """Shift-equivariant quadratic-merge CNN for one-interval forecasts.

    Parameters
    ----------
    group_channels : int
        Size g of each of the three split groups (conv1 emits 3g).
    hidden_channels : int
        Width c of the hidden convolutions.
    kernel_size : int
        Odd circular kernel size of conv1-conv4.
    merge_variant : str
        "diagram" (g2*g3) or "caption" (g1*g2).
    """

    def __init__(self, group_channels=24, hidden_channels=37, kernel_size=5,
                 merge_variant="diagram"):
        super().__init__()
        if merge_variant not in MERGE_VARIANTS:
            raise ValueError(f"unknown merge variant {merge_variant!r}")
        self.group_channels = group_channels
        self.merge_variant = merge_variant
        pad = kernel_size // 2
        self.conv1 = nn.Conv1d(1, 3 * group_channels, kernel_size,
                               padding=pad, padding_mode="circular")
        self.conv2 = nn.Conv1d(2 * group_channels, hidden_channels, kernel_size,
                               padding=pad, padding_mode="circular")
        self.conv3 = nn.Conv1d(hidden_channels, hidden_channels, kernel_size,
                               padding=pad, padding_mode="circular")
        self.conv4 = nn.Conv1d(hidden_channels, hidden_channels, kernel_size,
                               padding=pad, padding_mode="circular")
        self.conv5 = nn.Conv1d(hidden_channels, 1, 1)

    def forward(self, x):
        g = self.group_channels
        lifted = self.conv1(x)
        g1 = lifted[:, :g]
        g2 = lifted[:, g:2 * g]
        g3 = lifted[:, 2 * g:]
        prod = g1 * g2 if self.merge_variant == "caption" else g2 * g3
        h = torch.cat([g1, prod], dim=1)
        h = torch.relu(self.conv2(h))
        h = torch.relu(self.conv3(h))
        h = torch.relu(self.conv4(h))
        return self.conv5(h)


def count_parameters(module):
    return sum(p.numel() for p in module.parameters() if p.requires_grad)


def parameter_breakdown(net):
    """Per-convolution trainable parameter counts."""
    return {
        name: count_parameters(getattr(net, name))
        for name in ("conv1", "conv2", "conv3", "conv4", "conv5")
    }
