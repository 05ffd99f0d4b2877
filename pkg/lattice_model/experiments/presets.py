"""Named smooth fields for experiments. These are constructions of this project; any
smooth f sampled by R_eps converges weakly in L2 as required.

Forces:
- `"zero"`: f = 0.
- `"sine"`: f = (prod_a sin(pi (x_a - lo_a)/L_a), 0, ...), scaled to unit L2 norm on Q.

Displacements:
- `"zero"`: u = 0.
- `"sine-bump"`: u = A (prod_a sin^2(pi (x_a - lo_a)/L_a), 0, ...), C^1 across the boundary.
- `"bump"`: smooth compactly supported bump around the centre of Q in every component.
- `"rotation"`: infinitesimal rotation u = W (x - centre) with W skew (not zero on the boundary).
"""
import logging
from typing import Callable, Dict

import numpy as np

from lattice_model.core.exceptions import UnknownPreset
from lattice_model.core.grid import Box, SmoothField, zero_field

logger = logging.getLogger(__name__)

SINE_BUMP_AMPLITUDE = 0.1
BUMP_RADIUS = 0.35


def _reduced(box: Box, x: np.ndarray):
    lo = np.asarray(box.lower)
    length = np.subtract(box.upper, box.lower)
    return np.pi * (x - lo) / length, np.pi / length


def _sine_product(box: Box) -> SmoothField:
    """(prod_a sin(pi (x_a - lo_a)/L_a), 0, ...)."""
    d = box.dim

    def value(x):
        phase, _ = _reduced(box, x)
        out = np.zeros_like(x)
        out[:, 0] = np.prod(np.sin(phase), axis=1)
        return out

    def gradient(x):
        phase, freq = _reduced(box, x)
        s, c = np.sin(phase), np.cos(phase)
        grad = np.zeros((x.shape[0], d, d))
        for j in range(d):
            others = np.prod(np.delete(s, j, axis=1), axis=1)
            grad[:, 0, j] = freq[j] * c[:, j] * others
        return grad

    return SmoothField(value, gradient, components=d)


def _sine_squared_product(box: Box) -> SmoothField:
    """(prod_a sin^2(pi (x_a - lo_a)/L_a), 0, ...)."""
    d = box.dim

    def value(x):
        phase, _ = _reduced(box, x)
        out = np.zeros_like(x)
        out[:, 0] = np.prod(np.sin(phase) ** 2, axis=1)
        return out

    def gradient(x):
        phase, freq = _reduced(box, x)
        s2 = np.sin(phase) ** 2
        grad = np.zeros((x.shape[0], d, d))
        for j in range(d):
            others = np.prod(np.delete(s2, j, axis=1), axis=1)
            grad[:, 0, j] = freq[j] * np.sin(2.0 * phase[:, j]) * others
        return grad

    return SmoothField(value, gradient, components=d)


def sine_force(box: Box) -> SmoothField:
    return _sine_product(box).scaled(1.0 / np.sqrt(box.volume / 2.0 ** box.dim))


def sine_bump(box: Box, amplitude: float = SINE_BUMP_AMPLITUDE) -> SmoothField:
    return _sine_squared_product(box).scaled(amplitude)


def bump(box: Box, radius: float = BUMP_RADIUS) -> SmoothField:
    """exp(1 - 1/(1 - |x - c|^2/R^2)) inside the ball, 0 outside; components scaled by
    1, 1/2, 1/3, ..."""
    d = box.dim
    centre = 0.5 * (np.asarray(box.lower) + np.asarray(box.upper))
    weights = 1.0 / np.arange(1, d + 1)

    def _profile(x):
        rho2 = np.sum((x - centre) ** 2, axis=1) / radius ** 2
        inside = rho2 < 1.0
        denom = np.where(inside, 1.0 - rho2, 1.0)
        phi = np.where(inside, np.exp(1.0 - 1.0 / denom), 0.0)
        return phi, denom, inside

    def value(x):
        phi, _, _ = _profile(x)
        return phi[:, None] * weights[None, :]

    def gradient(x):
        phi, denom, inside = _profile(x)
        # d phi / dx = phi * (-2 (x - c)/R^2) / (1 - rho2)^2
        factor = np.where(inside, -2.0 * phi / (radius ** 2 * denom ** 2), 0.0)
        dphi = factor[:, None] * (x - centre)
        return weights[None, :, None] * dphi[:, None, :]

    return SmoothField(value, gradient, components=d)


def rotation(box: Box, angle: float = 0.1) -> SmoothField:
    d = box.dim
    centre = 0.5 * (np.asarray(box.lower) + np.asarray(box.upper))
    skew = np.zeros((d, d))
    if d >= 2:
        skew[0, 1], skew[1, 0] = -angle, angle

    def value(x):
        return (x - centre) @ skew.T

    def gradient(x):
        return np.broadcast_to(skew, (x.shape[0], d, d)).copy()

    return SmoothField(value, gradient, components=d)


FORCE_PRESETS: Dict[str, Callable[[Box], SmoothField]] = {
    "zero": lambda box: zero_field(box.dim),
    "sine": sine_force,
}

DISPLACEMENT_PRESETS: Dict[str, Callable[[Box], SmoothField]] = {
    "zero": lambda box: zero_field(box.dim),
    "sine-bump": sine_bump,
    "bump": bump,
    "rotation": rotation,
}


def get_force(name: str, box: Box) -> SmoothField:
    if name not in FORCE_PRESETS:
        raise UnknownPreset(f"Force preset {name} not found. Available: {', '.join(FORCE_PRESETS)}")
    return FORCE_PRESETS[name](box)


def get_displacement(name: str, box: Box) -> SmoothField:
    if name not in DISPLACEMENT_PRESETS:
        raise UnknownPreset(
            f"Displacement preset {name} not found. Available: {', '.join(DISPLACEMENT_PRESETS)}")
    return DISPLACEMENT_PRESETS[name](box)
