"""Quadratic-entropy representations of master-equation flows.

A flow dp/dt = L p on the probability simplex is rewritten as

    dp/dt = norm**2 * [ main(g) + sum_a r_a * ham_a(g) ],    g = q p,

where main is the raw rank-N double contraction (equal to
N*(N-2)!*(g - mean g)), the ham_a are the single-epsilon terms of
multilinear.ham_term over all size-(N-3) subsets of the tangent basis,
and q is a symmetric matrix defining the quadratic entropy
S = p q p / 2.  The two contraction families share one overall
normalization so that the fitted coefficients r_a are independent of it;
with norm = normalizer(N) the main term is exactly the tangent
projection of the entropy gradient.

Unknown count: q contributes N(N+1)/2 - 1 (one direction is pure gauge,
q -> q + k * ones changes nothing on the simplex), the coefficients
contribute (N-1)(N-2)/2, together N(N-1), matching the degrees of
freedom of a generator with zero column sums.  fit() solves the
resulting bilinear matching problem by variable projection: the inner
problem in q is an exact linear least-squares solve for each fixed r,
and a small Levenberg-Marquardt iteration with deterministic multistart
handles the outer problem in r.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from functools import lru_cache

import numpy as np
import scipy.optimize

from .errors import FitNonConvergenceError, InputError
from .multilinear import difference_basis, ham_term, normalizer
from .pme import ProbabilityState, TransitionMatrix, build_generator

__all__ = [
    "QuadraticEntropy",
    "QTRepresentation",
    "hyperplane_basis",
    "ham_subsets",
    "qt_rhs",
    "flow_matrix",
    "entropy_value",
    "two_state_entropy",
    "three_state_kappa_r",
    "fit",
]

# A fit counts as converged below ACCEPT_TOL; the multistart loop stops
# early once a start lands below TARGET_TOL.
ACCEPT_TOL = 1e-8
TARGET_TOL = 1e-10


@dataclasses.dataclass(frozen=True)
class QuadraticEntropy:
    """Entropy S(p) = p q p / 2 with symmetric coefficient matrix q."""

    q: np.ndarray

    def __post_init__(self):
        arr = np.array(self.q, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InputError(f"q must be square, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("q has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(arr))))
        if np.max(np.abs(arr - arr.T)) > 1e-14 * scale:
            raise InputError("q must be symmetric to 1e-14")
        arr.setflags(write=False)
        object.__setattr__(self, "q", arr)

    @property
    def n(self):
        return self.q.shape[0]

    def value(self, p):
        p = _state_vector(p, self.n)
        return 0.5 * float(p @ self.q @ p)

    def gradient(self, p):
        return self.q @ _state_vector(p, self.n)


@dataclasses.dataclass(frozen=True)
class QTRepresentation:
    """Fitted representation: entropy, ham coefficients, normalization.

    subsets holds the 0-based tangent-basis index tuples in the same
    order as the coefficients r.  residual is the worst absolute
    mismatch of the represented flow against the target generator over
    the tangent basis directions and the simplex centroid.
    """

    entropy: QuadraticEntropy
    r: np.ndarray
    subsets: tuple
    norm: float
    residual: float

    def __post_init__(self):
        r = np.array(self.r, dtype=float, ndmin=1)
        subsets = tuple(tuple(int(i) for i in s) for s in self.subsets)
        if r.size != len(subsets):
            raise InputError(
                f"got {r.size} coefficients for {len(subsets)} subsets"
            )
        r.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "subsets", subsets)

    @property
    def n(self):
        return self.entropy.n

    def to_json_dict(self):
        return {
            "n": self.n,
            "q": [[float(v) for v in row] for row in self.entropy.q],
            "r": [float(v) for v in self.r],
            "subsets": [list(s) for s in self.subsets],
            "norm": float(self.norm),
            "residual": float(self.residual),
        }

    @classmethod
    def from_json_dict(cls, data):
        try:
            n = int(data["n"])
            entropy = QuadraticEntropy(np.array(data["q"], dtype=float))
            rep = cls(
                entropy=entropy,
                r=np.array(data["r"], dtype=float, ndmin=1),
                subsets=tuple(tuple(s) for s in data["subsets"]),
                norm=float(data["norm"]),
                residual=float(data["residual"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad representation document: {exc}") from exc
        if entropy.n != n:
            raise InputError(f"q has size {entropy.n}, document says n = {n}")
        return rep


def _state_vector(p, n):
    if isinstance(p, ProbabilityState):
        p = p.p
    arr = np.asarray(p, dtype=float)
    if arr.shape != (n,):
        raise InputError(f"state must have shape ({n},), got {arr.shape}")
    return arr


def hyperplane_basis(n):
    """Tangent basis of the simplex, rows e_b - e_{b+1}; shape (n-1, n)."""
    return difference_basis(n)


def ham_subsets(n):
    """Catalog of ham-term subsets: size-(n-3) combinations, lex order.

    Indices are 0-based positions in hyperplane_basis(n).  Empty for
    n = 2 (the two-state flow has no Hamiltonian freedom); a single
    empty subset for n = 3.
    """
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    if n == 2:
        return ()
    return tuple(itertools.combinations(range(n - 1), n - 3))


@lru_cache(maxsize=None)
def _ham_matrix(n, subset):
    """Matrix of ham_term(., subset, n) in the standard basis."""
    cols = [ham_term(np.eye(n)[k], subset, n) for k in range(n)]
    mat = np.column_stack(cols)
    mat.setflags(write=False)
    return mat


def _main_scale(norm, n):
    # Raw double contraction is N*(N-2)! times the tangent projection.
    return norm * norm * n * math.factorial(n - 2)


def qt_rhs(rep, p):
    """Right-hand side of the represented flow at state p."""
    n = rep.n
    g = rep.entropy.q @ _state_vector(p, n)
    out = _main_scale(rep.norm, n) * (g - g.mean())
    if rep.r.size:
        acc = np.zeros(n)
        for coeff, subset in zip(rep.r, rep.subsets):
            acc += coeff * (_ham_matrix(n, subset) @ g)
        out += (rep.norm * rep.norm) * acc
    return out


def flow_matrix(rep):
    """The represented flow as a matrix acting on states."""
    n = rep.n
    proj = np.eye(n) - np.full((n, n), 1.0 / n)
    mat = _main_scale(rep.norm, n) * (proj @ rep.entropy.q)
    for coeff, subset in zip(rep.r, rep.subsets):
        mat += (rep.norm * rep.norm) * coeff * (_ham_matrix(n, subset) @ rep.entropy.q)
    return mat


def entropy_value(rep, p):
    """Entropy of the representation at state p."""
    return rep.entropy.value(p)


def two_state_entropy(w):
    """Diagonal entropy reproducing the two-state master equation.

    Returns q = diag(-w21, -w12), verified against pme_rhs under the
    raw two-variable contraction (norm = 1): the flow it generates is
    dp1/dt = w12 p2 - w21 p1.  Note the cross assignment, rate 1->2 on
    the p1 slot; the straight one fails the verification with the two
    rates interchanged.
    """
    if not isinstance(w, TransitionMatrix):
        w = TransitionMatrix(w)
    if w.n != 2:
        raise InputError(f"two_state_entropy needs n = 2, got n = {w.n}")
    return QuadraticEntropy(np.diag([-w.w[1, 0], -w.w[0, 1]]))


def three_state_kappa_r(rates):
    """Closed-form asymmetry ratio and coefficient for three states.

    rates is the tuple (a, b, c, d, e, f) of the three-state chain in
    the order (w21, w31, w12, w32, w13, w23).  Returns (kappa, r) with
    kappa = (b + c + f)/(a + d + e) and r = (1 - kappa)/(1 + kappa).
    Under the tensor orientation used by fit() the fitted coefficient
    comes out as -r; the magnitudes agree.  The limit a + d + e = 0
    with a non-zero opposite group returns (inf, -1.0); all six rates
    zero is rejected.
    """
    if hasattr(rates, "as_tuple"):
        rates = rates.as_tuple()
    vals = [float(v) for v in rates]
    if len(vals) != 6:
        raise InputError(f"need 6 rates, got {len(vals)}")
    if any(not math.isfinite(v) or v < 0.0 for v in vals):
        raise InputError("rates must be finite and non-negative")
    a, b, c, d, e, f = vals
    forward = a + d + e
    backward = b + c + f
    if forward == 0.0:
        if backward == 0.0:
            raise InputError("all rates zero, kappa undefined (0/0)")
        return math.inf, -1.0
    kappa = backward / forward
    return kappa, (1.0 - kappa) / (1.0 + kappa)


def _sym_parameter_pairs(n):
    # Independent entries of symmetric q, gauge fixed by dropping the
    # last diagonal entry (the all-ones matrix direction is transversal
    # to that constraint, so every q is reachable up to gauge).
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    pairs.remove((n - 1, n - 1))
    return pairs


def _pack_symmetric(x, pairs, n):
    q = np.zeros((n, n))
    for value, (i, j) in zip(x, pairs):
        q[i, j] = value
        q[j, i] = value
    return q


def _residual_metric(diff, n):
    """Worst flow mismatch over tangent directions and the centroid."""
    dirs = np.vstack([difference_basis(n), np.full(n, 1.0 / n)])
    return float(np.max(np.abs(diff @ dirs.T)))


def fit(w, seed=0, max_restarts=50):
    """Fit a quadratic-entropy representation to a master equation.

    Parameters
    ----------
    w : TransitionMatrix or array
        Rate matrix of the target flow.
    seed : int
        Seed for the deterministic multistart sequence.
    max_restarts : int
        Number of perturbed outer starts tried after the zero start.

    Returns
    -------
    QTRepresentation
        With norm = normalizer(n) for n >= 3; the two-state case is the
        closed form of two_state_entropy with norm = 1 and no
        coefficients.

    Raises
    ------
    FitNonConvergenceError
        If no start reaches residual <= 1e-8.  The error carries the
        best representation found.

    Notes
    -----
    For fixed r the matching condition M(r) q = L is linear in the
    gauge-fixed symmetric q and solved exactly by least squares; the
    outer problem over r is a Levenberg-Marquardt minimization of the
    projected residual, restarted from seeded perturbations in
    [-0.5, 0.5] until the residual target is met.
    """
    if not isinstance(w, TransitionMatrix):
        w = TransitionMatrix(w)
    n = w.n
    gen = build_generator(w)
    subsets = ham_subsets(n)
    pairs = _sym_parameter_pairs(n) if n >= 2 else []
    # Free unknowns must match the generator degrees of freedom.
    assert len(pairs) + len(subsets) == n * (n - 1)

    if n == 2:
        entropy = two_state_entropy(w)
        rep = QTRepresentation(
            entropy=entropy, r=np.zeros(0), subsets=(), norm=1.0, residual=0.0
        )
        resid = _residual_metric(flow_matrix(rep) - gen, n)
        return dataclasses.replace(rep, residual=resid)

    norm = normalizer(n)
    ham_scale = norm * norm
    proj = np.eye(n) - np.full((n, n), 1.0 / n)
    ham_mats = [_ham_matrix(n, s) for s in subsets]
    # Vectorized design tensor: basis[k] is the k-th symmetric basis matrix.
    basis = np.zeros((len(pairs), n, n))
    for k, (i, j) in enumerate(pairs):
        basis[k, i, j] = 1.0
        basis[k, j, i] = 1.0
    target = gen.ravel()

    def flow_operator(r):
        mat = proj.copy()
        for coeff, ham in zip(r, ham_mats):
            mat += ham_scale * coeff * ham
        return mat

    def inner_solve(r):
        op = flow_operator(r)
        design = np.einsum("il,klm->kim", op, basis).reshape(len(pairs), n * n).T
        x, *_ = np.linalg.lstsq(design, target, rcond=None)
        return x, design @ x - target

    def outer_residual(r):
        return inner_solve(r)[1]

    rng = np.random.default_rng(seed)
    best = None
    best_resid = math.inf
    n_coeffs = len(subsets)
    for attempt in range(max_restarts + 1):
        if attempt == 0:
            r0 = np.zeros(n_coeffs)
        else:
            r0 = rng.uniform(-0.5, 0.5, n_coeffs)
        sol = scipy.optimize.least_squares(
            outer_residual,
            r0,
            method="lm",
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
            max_nfev=400 * (n_coeffs + 1),
        )
        x, _ = inner_solve(sol.x)
        q = _pack_symmetric(x, pairs, n)
        diff = flow_operator(sol.x) @ q - gen
        resid = _residual_metric(diff, n)
        if resid < best_resid:
            best_resid = resid
            best = QTRepresentation(
                entropy=QuadraticEntropy(q),
                r=sol.x.copy(),
                subsets=subsets,
                norm=norm,
                residual=resid,
            )
        if best_resid <= TARGET_TOL:
            break

    if best_resid > ACCEPT_TOL:
        raise FitNonConvergenceError(
            f"fit residual {best_resid:.3e} above {ACCEPT_TOL:.0e} "
            f"after {max_restarts + 1} starts",
            best,
            best_resid,
        )
    return best
