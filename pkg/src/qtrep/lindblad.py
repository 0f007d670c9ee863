"""Two-level dissipative dynamics in Bloch-vector form.

A channel is a magnetic-field vector h plus dissipator pairs (A_j, B_j)
of real 3-vectors; the state is the Bloch vector P with |P| <= 1.  The
equation of motion is

    dP/dt = h x P + sum_j [ 2 (A_j x B_j) - A_j x (P x A_j)
                                          - B_j x (P x B_j) ].

For a single dissipator and h = 0 the flow is the exact gradient of

    S(P) = 2 (A x B) . P - |P|**2 (A**2 + B**2) / 2
           + (A . P)**2 / 2 + (B . P)**2 / 2,

with stationary point P_st = 2 (A x B) / (A**2 + B**2); the identity
A x (P x A) = P A**2 - A (A . P) turns one form into the other.  The
same flow embeds into six probability-like variables (one conserved
pair per Bloch component), where it is generated by the rank-6 kernel
of multilinear.six_slot_main_term.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import (
    DegenerateChannelError,
    GradientFormUnavailableError,
    InputError,
)
from .multilinear import six_slot_main_term

__all__ = [
    "LindbladChannel",
    "bloch_rhs",
    "stationary_bloch",
    "bloch_entropy",
    "gradient_rhs",
    "embed_six",
    "extract_bloch",
    "check_six_state",
    "qt_six_rhs",
    "require_gradient_form",
]


def _vec3(x, name):
    arr = np.asarray(x, dtype=float)
    if arr.shape != (3,):
        raise InputError(f"{name} must be a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    return arr


@dataclasses.dataclass(frozen=True)
class LindbladChannel:
    """Field vector plus a tuple of (A, B) dissipator pairs."""

    h: np.ndarray
    dissipators: tuple

    def __post_init__(self):
        h = _vec3(self.h, "h")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        pairs = []
        for idx, pair in enumerate(self.dissipators):
            a, b = pair
            a = _vec3(a, f"A[{idx}]")
            b = _vec3(b, f"B[{idx}]")
            a.setflags(write=False)
            b.setflags(write=False)
            pairs.append((a, b))
        object.__setattr__(self, "dissipators", tuple(pairs))

    @classmethod
    def from_dict(cls, data):
        unknown = sorted(set(data) - {"h", "dissipators"})
        if unknown:
            raise InputError(f"unknown channel keys: {', '.join(unknown)}")
        try:
            h = data.get("h", (0.0, 0.0, 0.0))
            dissipators = []
            for entry in data["dissipators"]:
                extra = sorted(set(entry) - {"A", "B"})
                if extra:
                    raise InputError(
                        f"unknown dissipator keys: {', '.join(extra)}"
                    )
                dissipators.append((entry["A"], entry["B"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad channel document: {exc}") from exc
        return cls(h=h, dissipators=tuple(dissipators))


def bloch_rhs(channel, p):
    """dP/dt for the full channel at Bloch vector p."""
    p = _vec3(p, "P")
    out = np.cross(channel.h, p)
    for a, b in channel.dissipators:
        out += 2.0 * np.cross(a, b)
        out -= np.cross(a, np.cross(p, a))
        out -= np.cross(b, np.cross(p, b))
    return out


def stationary_bloch(a, b):
    """Stationary Bloch vector 2 (A x B) / (A**2 + B**2)."""
    a = _vec3(a, "A")
    b = _vec3(b, "B")
    weight = float(a @ a + b @ b)
    if weight == 0.0:
        raise DegenerateChannelError("A = B = 0 has no stationary direction")
    return 2.0 * np.cross(a, b) / weight


def bloch_entropy(a, b, p):
    """Entropy whose gradient flow is the single-dissipator channel."""
    a = _vec3(a, "A")
    b = _vec3(b, "B")
    p = _vec3(p, "P")
    return float(
        2.0 * np.cross(a, b) @ p
        - (p @ p) * (a @ a + b @ b) / 2.0
        + (a @ p) ** 2 / 2.0
        + (b @ p) ** 2 / 2.0
    )


def gradient_rhs(a, b, p):
    """Analytic gradient of bloch_entropy with respect to P."""
    a = _vec3(a, "A")
    b = _vec3(b, "B")
    p = _vec3(p, "P")
    return (
        2.0 * np.cross(a, b)
        - p * (a @ a + b @ b)
        + a * (a @ p)
        + b * (b @ p)
    )


def embed_six(p):
    """Six-variable embedding p_k = (1 +/- P_i) / 2, pairs summing to 1."""
    p = _vec3(p, "P")
    out = np.empty(6)
    out[0::2] = (1.0 + p) / 2.0
    out[1::2] = (1.0 - p) / 2.0
    return out


def extract_bloch(s):
    """Pair differences (p1-p2, p3-p4, p5-p6) of a six-variable state."""
    s = np.asarray(s, dtype=float)
    if s.shape != (6,):
        raise InputError(f"six-variable state must have shape (6,), got {s.shape}")
    return s[0::2] - s[1::2]


def check_six_state(s):
    """Validate pair sums of a six-variable state (tolerance 1e-9)."""
    s = np.asarray(s, dtype=float)
    if s.shape != (6,):
        raise InputError(f"six-variable state must have shape (6,), got {s.shape}")
    if not np.all(np.isfinite(s)):
        raise InputError("state has non-finite entries")
    for i in range(3):
        total = s[2 * i] + s[2 * i + 1]
        if abs(total - 1.0) > 1e-9:
            raise InputError(
                f"pair {i} must sum to 1, got {total!r}"
            )
    return s


def qt_six_rhs(a, b, s):
    """Six-variable flow of the single-dissipator channel.

    Evaluates the rank-6 contraction at the entropy gradient taken in
    the pair-difference variables.  Pairs move oppositely, so each pair
    sum is conserved and the extracted differences obey the gradient
    flow: extract_bloch(qt_six_rhs(a, b, embed_six(P))) equals
    gradient_rhs(a, b, P).
    """
    s = check_six_state(s)
    g3 = gradient_rhs(a, b, extract_bloch(s))
    return six_slot_main_term(g3, s)


def require_gradient_form(channel):
    """Return the (A, B) pair of a gradient-form channel or raise.

    The gradient and six-variable machinery cover exactly the channels
    with h = 0 and a single dissipator.
    """
    if np.any(channel.h != 0.0):
        raise GradientFormUnavailableError(
            "gradient form unavailable: channel has a field term"
        )
    if len(channel.dissipators) != 1:
        raise GradientFormUnavailableError(
            "gradient form unavailable: need exactly one dissipator, "
            f"got {len(channel.dissipators)}"
        )
    return channel.dissipators[0]
