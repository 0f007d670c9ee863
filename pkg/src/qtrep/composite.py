"""Composite two-by-two system with a subextensive joint entropy.

Two symmetric two-state subsystems (flip rates a and c) evolve jointly
on the four product states W = (p1 q1, p1 q2, p2 q1, p2 q2).  The joint
generator is the Kronecker sum of the marginal generators.  Each
subsystem carries the quadratic entropy of its marginal, expressed in
the joint variables as

    S_A = -(a/4) (W1 + W2 - W3 - W4)**2,
    S_B = -(c/4) (W1 + W3 - W2 - W4)**2,

and the joint entropy is the non-additive combination

    S = S_A + S_B - lam * S_A * S_B.

With lam = lambda_star(a, c) = 4 (a + c) / (a c), the rank-4 double
contraction of grad S (normalization 8 * norm**2 = 1) reproduces the
joint generator exactly on product states; the coupling matches a
deformed-statistics composition rule with deformation parameter
q = 1 + k (a + c) / 4.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import multilinear
from .errors import InputError

__all__ = [
    "CompositeSystem",
    "lambda_star",
    "composite_generator",
    "subsystem_entropies",
    "composite_entropy",
    "entropy_gradient",
    "qt_flow",
    "q_parameter",
    "product_state",
]

# Sign patterns of the three balanced directions in the product basis.
_V_A = np.array([1.0, 1.0, -1.0, -1.0])
_V_B = np.array([1.0, -1.0, 1.0, -1.0])
_V_C = np.array([1.0, -1.0, -1.0, 1.0])


@dataclasses.dataclass(frozen=True)
class CompositeSystem:
    """Flip rates of the two subsystems plus the entropy coupling."""

    a: float
    c: float
    lam: float
    boltzmann_k: float = 1.0

    def __post_init__(self):
        for name in ("a", "c"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0.0:
                raise InputError(f"rate {name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)
        for name in ("lam", "boltzmann_k"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InputError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.boltzmann_k <= 0.0:
            raise InputError(f"boltzmann_k must be > 0, got {self.boltzmann_k!r}")

    @classmethod
    def with_lambda_star(cls, a, c, boltzmann_k=1.0):
        return cls(a=a, c=c, lam=lambda_star(a, c), boltzmann_k=boltzmann_k)


def lambda_star(a, c):
    """Coupling 4 (a + c)/(a c) that makes the joint flow a gradient."""
    a = float(a)
    c = float(c)
    if not (math.isfinite(a) and math.isfinite(c)) or a <= 0.0 or c <= 0.0:
        raise InputError(f"rates must be finite and > 0, got a={a!r}, c={c!r}")
    return 4.0 * (a + c) / (a * c)


def _state4(w):
    arr = np.asarray(w, dtype=float)
    if arr.shape != (4,):
        raise InputError(f"composite state must have shape (4,), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("state has non-finite entries")
    return arr


def product_state(p1, q1):
    """Product state (p1 q1, p1 q2, p2 q1, p2 q2) from marginals."""
    p1 = float(p1)
    q1 = float(q1)
    for value in (p1, q1):
        if value < -1e-12 or value > 1.0 + 1e-12:
            raise InputError(f"marginal probability {value!r} outside [0, 1]")
    p2 = 1.0 - p1
    q2 = 1.0 - q1
    return np.array([p1 * q1, p1 * q2, p2 * q1, p2 * q2])


def composite_generator(system):
    """Joint generator, the Kronecker sum of the two flip generators."""
    a = system.a
    c = system.c
    return np.array(
        [
            [-(a + c), c, a, 0.0],
            [c, -(a + c), 0.0, a],
            [a, 0.0, -(a + c), c],
            [0.0, a, c, -(a + c)],
        ]
    )


def subsystem_entropies(system, w):
    """Marginal entropies (S_A, S_B) at joint state w."""
    w = _state4(w)
    d_a = float(_V_A @ w)
    d_b = float(_V_B @ w)
    return (
        -(system.a / 4.0) * d_a * d_a,
        -(system.c / 4.0) * d_b * d_b,
    )


def composite_entropy(system, w):
    """Joint entropy S_A + S_B - lam * S_A * S_B, expanded in w.

    On product states the two pair differences multiply into the third
    balanced direction, (V_A . w)(V_B . w) = V_C . w, which turns the
    entropy product into a quadratic form in the joint state:

        S = -(a/4) (V_A . w)**2 - (c/4) (V_B . w)**2
            - lam * (a c / 16) (V_C . w)**2.

    This expanded form is what the flow machinery differentiates; it
    agrees with the literal product expression on product states.
    """
    w = _state4(w)
    d_a = float(_V_A @ w)
    d_b = float(_V_B @ w)
    d_c = float(_V_C @ w)
    return (
        -(system.a / 4.0) * d_a * d_a
        - (system.c / 4.0) * d_b * d_b
        - system.lam * (system.a * system.c / 16.0) * d_c * d_c
    )


def entropy_gradient(system, w):
    """Gradient of the expanded composite entropy; sums to zero."""
    w = _state4(w)
    d_a = float(_V_A @ w)
    d_b = float(_V_B @ w)
    d_c = float(_V_C @ w)
    return (
        -(system.a / 2.0) * d_a * _V_A
        - (system.c / 2.0) * d_b * _V_B
        - system.lam * (system.a * system.c / 8.0) * d_c * _V_C
    )


def qt_flow(system, w):
    """Rank-4 double contraction of the entropy gradient.

    Uses the brute-force kernel with the normalization fixed by
    8 * norm**2 = 1.  With lam = lambda_star(a, c) this equals
    composite_generator(system) @ w on product states.
    """
    grad = entropy_gradient(system, _state4(w))
    return multilinear.main_term_bruteforce(grad, 4, norm=multilinear.normalizer(4))


def q_parameter(system):
    """Deformation parameter q = 1 + k (a + c) / 4 of the coupling."""
    k = system.boltzmann_k
    q = 1.0 + k * (system.a + system.c) / 4.0
    # Consistency of the composition rule: (1 - q)/k must equal the
    # coefficient -(a + c)/4 in front of the entropy product.
    assert abs((1.0 - q) / k + (system.a + system.c) / 4.0) <= 1e-12 * max(
        1.0, abs(q)
    )
    return q
