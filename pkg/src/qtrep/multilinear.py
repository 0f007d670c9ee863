"""Antisymmetric contraction kernels for simplex flows.

The flows in this package are built from contractions of the rank-N
Levi-Civita symbol with an energy gradient (always the all-ones vector
for probability vectors, since the conserved quantity is sum(p)) and an
entropy gradient g.  The central identity, obtained by summing the
product of two epsilon factors over their shared indices, is

    sum_perm  e_{i,i1,...}  e_{j,j1,...} u_{i1} g_j u_{j1}
        = (N-2)! * (N * g_i - sum_j g_j)            with u = ones,

so after attaching the normalizer 1/sqrt(N*(N-2)!) to both epsilon
factors the double contraction collapses to the centered gradient
g_i - mean(g), the orthogonal projection of g onto the simplex tangent
space.  Everything here is plain float arithmetic on small N; the
brute-force permutation sums serve as the oracle for the closed forms
and are capped at N = 8.

All functions are pure and safe to call from multiple threads.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from .errors import InputError, SizeError

# Brute-force permutation sums cost O(N!) and exist to cross-check the
# closed forms, not to be fast.  Above this cap the factorial cost and
# the N**(N-2) intermediate tensor stop being reasonable.
MAX_BRUTEFORCE_N = 8

__all__ = [
    "MAX_BRUTEFORCE_N",
    "levi_civita_sign",
    "normalizer",
    "difference_basis",
    "main_term_bruteforce",
    "main_term_closed",
    "ham_term",
    "six_slot_main_term",
]


def levi_civita_sign(indices):
    """Sign of the Levi-Civita symbol at a tuple of indices.

    Parameters
    ----------
    indices : sequence of int
        Indices drawn from 0..len(indices)-1.

    Returns
    -------
    int
        +1 for an even permutation of (0, 1, ..., N-1), -1 for an odd
        one, 0 when any index repeats.

    Raises
    ------
    InputError
        If an index lies outside 0..N-1.
    """
    idx = tuple(indices)
    n = len(idx)
    for value in idx:
        if not isinstance(value, (int, np.integer)):
            raise InputError(f"indices must be integers, got {value!r}")
        if value < 0 or value >= n:
            raise InputError(f"index {value} out of range 0..{n - 1}")
    if len(set(idx)) != n:
        return 0
    inversions = 0
    for a in range(n):
        for b in range(a + 1, n):
            if idx[a] > idx[b]:
                inversions += 1
    return -1 if inversions & 1 else 1


@lru_cache(maxsize=None)
def _signed_permutations(n):
    """All permutations of range(n) with their signs, cached per n."""
    out = []
    for perm in itertools.permutations(range(n)):
        inversions = 0
        for a in range(n):
            for b in range(a + 1, n):
                if perm[a] > perm[b]:
                    inversions += 1
        out.append((-1.0 if inversions & 1 else 1.0, perm))
    return tuple(out)


def normalizer(n):
    """Normalization constant 1/sqrt(N * (N-2)!) for the rank-N kernel.

    Attached to both epsilon factors of the main term it makes the
    double contraction equal to g - mean(g) exactly.  For N = 4 this is
    1/sqrt(8), i.e. the choice fixed by 8 * normalizer**2 = 1.
    """
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    return 1.0 / math.sqrt(n * math.factorial(n - 2))


def difference_basis(n):
    """Basis of the simplex tangent hyperplane, rows e_b - e_{b+1}.

    Returns an (n-1, n) array.  These are the vectors whose size-(N-3)
    subsets parameterize the Hamiltonian-like terms of the flow.
    """
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    basis = np.zeros((n - 1, n))
    for b in range(n - 1):
        basis[b, b] = 1.0
        basis[b, b + 1] = -1.0
    return basis


def _check_gradient(g, n):
    g = np.asarray(g, dtype=float)
    if g.shape != (n,):
        raise InputError(f"gradient must have shape ({n},), got {g.shape}")
    if not np.all(np.isfinite(g)):
        raise InputError("gradient has non-finite entries")
    return g


def main_term_bruteforce(g, n, norm=None):
    """Main flow term by literal double permutation sum.

    Evaluates

        out_i = norm * sum e_{i,i1,m...} u_{i1} A_{m...},
        A_{m...} = norm * sum e_{j,j1,m...} g_j u_{j1},

    with u the all-ones vector, summing every epsilon entry explicitly.
    With the default norm = normalizer(n) the result equals
    main_term_closed(g, n) up to roundoff; pass norm=1.0 to recover the
    raw contraction (N-2)! * (N*g_i - sum g).

    Factorial cost, capped at n = MAX_BRUTEFORCE_N.
    """
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    if n > MAX_BRUTEFORCE_N:
        raise SizeError(
            f"n = {n} exceeds the brute-force cap {MAX_BRUTEFORCE_N}; "
            "use main_term_closed instead"
        )
    g = _check_gradient(g, n)
    if norm is None:
        norm = normalizer(n)
    perms = _signed_permutations(n)
    # A carries n-2 free indices; a 0-d array handles n = 2 uniformly.
    inner = np.zeros((n,) * (n - 2))
    for sign, p in perms:
        inner[p[2:]] += sign * g[p[0]]
    inner *= norm
    out = np.zeros(n)
    for sign, p in perms:
        out[p[0]] += sign * inner[p[2:]]
    out *= norm
    return out

def main_term_closed(g, n):
    """Closed form of the main flow term: g_i - mean(g).

    Equal to main_term_bruteforce(g, n) with the default normalizer;
    valid for every n >= 2.
    """
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    g = _check_gradient(g, n)
    return g - g.mean()


def ham_term(g, subset, n):
    """Hamiltonian-like flow term for one basis subset.

    Contracts a single rank-n epsilon with the ones vector, the gradient
    g, and n-3 fixed tangent basis vectors:

        out_i = sum e_{i,j,k,m1..m_{n-3}} u_j g_k v(s1)_{m1} ... ,

    where the v(s) are rows of difference_basis(n) selected by `subset`
    (0-based indices, size n-3, distinct).  No normalization constant is
    applied; any scale belongs to the coefficient multiplying the term.
    For n = 3 the subset is empty and the result is the cross product
    ones x g.  These terms conserve both sum(p) and the entropy whose
    gradient is g: sum_i out_i = 0 and dot(out, g) = 0 by antisymmetry.
    """
    if n < 3:
        raise InputError(f"ham terms need n >= 3, got {n}")
    if n > MAX_BRUTEFORCE_N:
        raise SizeError(
            f"n = {n} exceeds the brute-force cap {MAX_BRUTEFORCE_N}"
        )
    g = _check_gradient(g, n)
    subset = tuple(int(s) for s in subset)
    if len(subset) != n - 3:
        raise InputError(
            f"subset must have size n - 3 = {n - 3}, got {len(subset)}"
        )
    if len(set(subset)) != len(subset):
        raise InputError(f"subset indices must be distinct, got {subset}")
    for s in subset:
        if s < 0 or s >= n - 1:
            raise InputError(f"subset index {s} out of range 0..{n - 2}")
    vecs = difference_basis(n)[list(subset)]
    out = np.zeros(n)
    for sign, p in _signed_permutations(n):
        term = sign * g[p[2]]
        for t in range(n - 3):
            term *= vecs[t][p[3 + t]]
            if term == 0.0:
                break
        out[p[0]] += term
    return out


# Slot layout of the six-variable kernel: three two-level subsystems
# with conserved pair sums, so the three energy gradients are the pair
# indicators below and the entropy enters through its gradient over the
# three pair differences.
_H_SLOTS = ((0, 1), (2, 3), (4, 5))


def six_slot_main_term(g3, p6, norm=0.125):
    """Rank-6 double contraction driving three coupled two-level pairs.

    Parameters
    ----------
    g3 : sequence of 3 floats
        Gradient of the entropy with respect to the three pair
        differences (p1-p2, p3-p4, p5-p6).
    p6 : sequence of 6 floats
        Six-variable state; each pair must sum to 1 (checked to 1e-9).
        Only validated here, the contraction itself depends on g3 alone.
    norm : float
        Normalization constant attached to both epsilon factors.  The
        default 1/8 makes the pairwise differences of the output equal
        g3 exactly, i.e. the contraction reproduces the gradient flow
        in the difference variables.

    Notes
    -----
    The entropy is a function of the pair differences with each pair
    constrained to sum to one, so the per-slot gradient is twice the
    difference gradient: dS/dp1 = -dS/dp2 = 2 * g3[0], and so on.  With
    that convention the inner contraction reduces to four equal entries
    per output slot, out_1 = 8 * norm**2 * (dS/dp1 - dS/dp2), and the
    default norm = 1/8 yields d(p1 - p2)/dt = g3[0].
    """
    g3 = np.asarray(g3, dtype=float)
    if g3.shape != (3,):
        raise InputError(f"g3 must have shape (3,), got {g3.shape}")
    if not np.all(np.isfinite(g3)):
        raise InputError("g3 has non-finite entries")
    p6 = np.asarray(p6, dtype=float)
    if p6.shape != (6,):
        raise InputError(f"p6 must have shape (6,), got {p6.shape}")
    for a, b in _H_SLOTS:
        if abs(p6[a] + p6[b] - 1.0) > 1e-9:
            raise InputError(
                f"pair ({a}, {b}) of p6 must sum to 1, got {p6[a] + p6[b]!r}"
            )

    # Per-slot entropy gradient under the pair constraints.
    gs = np.empty(6)
    gs[0::2] = 2.0 * g3
    gs[1::2] = -2.0 * g3

    perms = _signed_permutations(6)
    in1, in2, in3 = _H_SLOTS
    inner = np.zeros((6, 6))
    for sign, p in perms:
        if p[3] in in1 and p[4] in in2 and p[5] in in3:
            inner[p[0], p[1]] += sign * gs[p[2]]
    inner *= norm
    out = np.zeros(6)
    for sign, p in perms:
        if p[1] in in1 and p[2] in in2 and p[3] in in3:
            out[p[0]] += sign * inner[p[4], p[5]]
    out *= norm
    return out
