"""Parameterized building blocks over the autodiff engine."""

import numpy as np

from ..autodiff import Tensor, concat_coords, conv2d, dense


class Module:
    """Lightweight container; collects parameters in declaration order."""

    def parameters(self):
        params = []
        seen = set()

        def collect(obj):
            if isinstance(obj, Tensor):
                if obj.requires_grad and id(obj) not in seen:
                    seen.add(id(obj))
                    params.append(obj)
            elif isinstance(obj, Module):
                for value in vars(obj).values():
                    collect(value)
            elif isinstance(obj, (list, tuple)):
                for value in obj:
                    collect(value)

        collect(self)
        return params

    def zero_grad(self):
        for p in self.parameters():
            p.grad = None


class Conv2d(Module):
    """3x3-by-default conv layer with He-initialized weights."""

    def __init__(self, in_channels, out_channels, rng, kernel=3, stride=1,
                 padding=1):
        std = np.sqrt(2.0 / (in_channels * kernel * kernel))
        self.weight = Tensor(
            rng.normal(0.0, std, (out_channels, in_channels, kernel, kernel)),
            requires_grad=True)
        self.bias = Tensor(np.zeros(out_channels), requires_grad=True)
        self.stride = stride
        self.padding = padding

    def __call__(self, x):
        return conv2d(x, self.weight, self.bias, self.stride, self.padding)


class Dense(Module):
    def __init__(self, in_features, out_features, rng):
        std = np.sqrt(2.0 / (in_features + out_features))
        self.weight = Tensor(
            rng.normal(0.0, std, (out_features, in_features)),
            requires_grad=True)
        self.bias = Tensor(np.zeros(out_features), requires_grad=True)

    def __call__(self, x):
        return dense(x, self.weight, self.bias)


class MLP(Module):
    """Dense stack, tanh on hidden layers, linear output."""

    def __init__(self, widths, rng):
        self.layers = [Dense(a, b, rng) for a, b in zip(widths, widths[1:])]

    def __call__(self, x):
        for layer in self.layers[:-1]:
            x = layer(x).tanh()
        return self.layers[-1](x)


class ConvStack(Module):
    """Conv->ReLU chain; optionally prepends coordinate channels to every
    conv input, and can leave the final layer linear (for score maps)."""

    def __init__(self, widths, rng, with_coords=False, final_relu=True,
                 stride=1, padding=1):
        extra = 2 if with_coords else 0
        self.convs = [
            Conv2d(a + extra, b, rng, stride=stride, padding=padding)
            for a, b in zip(widths, widths[1:])
        ]
        self.with_coords = with_coords
        self.final_relu = final_relu

    def __call__(self, x):
        last = len(self.convs) - 1
        for i, conv in enumerate(self.convs):
            if self.with_coords:
                x = concat_coords(x)
            x = conv(x)
            if i < last or self.final_relu:
                x = x.relu()
        return x
