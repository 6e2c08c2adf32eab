"""Real eigenpairs of symmetric tensors and their instanton counterparts.

A real eigenpair (lambda, x) solves T x^{p-1} = lambda x with x.x = 1,
i.e. x is a critical point of T x^p / p on the unit sphere and lambda is
its Rayleigh value.  Multistart Newton on the Lagrange system finds
isolated real classes; completeness is not certified (the count is only
bounded by ((p-1)^N - 1)/(p-2)).

Real eigenpairs map one-to-one onto the real saddle points ("instantons")
of the action phi^2/2 - T phi^p/(p y): phi = (y/lambda)^{1/(p-2)} x with
matching signs, with action (p-2)/(2p) (y/lambda)^{2/(p-2)}.  The
smallest such action over matching-sign pairs is the decay exponent of
the partition-function discontinuity at coupling y.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoMatchingPairs, SignMismatch
from .tensors import SymmetricTensor, contract_full, contract_gradient, contract_matrix

__all__ = [
    "Eigenpair",
    "InstantonPoint",
    "find_real_eigenpairs",
    "eigenpair_count_bound",
    "instanton_from_eigenpair",
    "discontinuity_exponent",
]


@dataclass(frozen=True)
class Eigenpair:
    """(lambda, x) with unit x, plus the certified residual |T x^{p-1} - lambda x|.

    `degenerate` marks a representative of a near-degenerate cluster: many
    converged solutions shared lambda but spread out in x (a non-isolated
    critical manifold), which the solver flags instead of resolving.
    """

    lam: float
    x: np.ndarray
    residual: float
    degenerate: bool = False

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        x.setflags(write=False)
        object.__setattr__(self, "x", x)


@dataclass(frozen=True)
class InstantonPoint:
    """Real saddle of the action phi^2/2 - T phi^p/(p y) built from an eigenpair."""

    phi: np.ndarray
    action: float
    source_pair: Eigenpair
    y: float


def eigenpair_count_bound(p: int, N: int) -> int:
    """Upper bound ((p-1)^N - 1)/(p-2) on the number of normalized eigenvalues."""
    if p < 3:
        raise DomainError("the count bound requires p >= 3")
    if N < 1:
        raise DomainError("N must be >= 1")
    num = (p - 1) ** N - 1
    q, r = divmod(num, p - 2)
    if r:  # geometric series (p-1)^N - 1 is divisible by (p-1) - 1
        raise ArithmeticError("count bound not integral")
    return q


def _newton_eigen(tensor, x0, tol, max_iter=200):
    """Newton iteration on (T x^{p-1} - lambda x, (x.x - 1)/2).

    lambda is re-synchronized with the Rayleigh value after every step.
    Returns (lam, x, residual) or None when it fails to converge.
    """
    p, N = tensor.p, tensor.N
    x = np.asarray(x0, dtype=np.float64)
    x = x / np.linalg.norm(x)
    lam = float(x @ contract_gradient(tensor, x))
    for _ in range(max_iter):
        g = contract_gradient(tensor, x)
        F = np.empty(N + 1)
        F[:N] = g - lam * x
        F[N] = 0.5 * (x @ x - 1.0)
        res = np.linalg.norm(F[:N])
        if res < tol and abs(F[N]) < 0.5 * tol:
            x = x / np.linalg.norm(x)
            lam = float(x @ contract_gradient(tensor, x))
            res = float(np.linalg.norm(contract_gradient(tensor, x) - lam * x))
            if res < tol:
                return lam, x, res
        J = np.empty((N + 1, N + 1))
        J[:N, :N] = (p - 1) * contract_matrix(tensor, x) - lam * np.eye(N)
        J[:N, N] = -x
        J[N, :N] = x
        J[N, N] = 0.0
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)) or np.linalg.norm(step) > 1e6:
            return None
        x = x - step[:N]
        nrm = np.linalg.norm(x)
        if nrm == 0 or not np.isfinite(nrm):
            return None
        x = x / nrm
        lam = float(x @ contract_gradient(tensor, x))
    return None


def _canonical_sign(lam, x, p):
    """Pick the class representative: for odd p identify (lam,x) ~ (-lam,-x),
    for even p (lam,x) ~ (lam,-x); ties broken by the first nonzero entry."""
    flip = False
    if p % 2:
        if lam < 0:
            flip = True
        elif lam == 0:
            nz = np.nonzero(x)[0]
            flip = len(nz) > 0 and x[nz[0]] < 0
    else:
        nz = np.nonzero(x)[0]
        flip = len(nz) > 0 and x[nz[0]] < 0
    if flip:
        return (-lam if p % 2 else lam), -x
    return lam, x


def find_real_eigenpairs(
    tensor: SymmetricTensor,
    n_starts: int = 100,
    tol: float = 1e-10,
    seed: int = 0,
) -> list[Eigenpair]:
    """Multistart Newton search for real eigenpair classes.

    Starts are uniform on the sphere; failed starts are discarded
    silently.  Found pairs are deduplicated (|dlam| < 10*tol and
    min(|x-x'|, |x+x'|) < 1e-6) with the sign convention of
    _canonical_sign.  The returned classes are not guaranteed complete.
    """
    if n_starts < 1:
        raise DomainError("need at least one start")
    rng = np.random.default_rng(seed)
    # clusters: [lam, x, res, degenerate]
    clusters: list[list] = []
    for _ in range(n_starts):
        x0 = rng.normal(size=tensor.N)
        result = _newton_eigen(tensor, x0, tol)
        if result is None:
            continue
        lam, x, res = result
        lam, x = _canonical_sign(lam, x, tensor.p)
        merged = False
        for cluster in clusters:
            xdist = min(
                np.linalg.norm(x - cluster[1]), np.linalg.norm(x + cluster[1])
            )
            exact = abs(lam - cluster[0]) < 10 * tol and xdist < 1e-6
            # same lambda but x wandering on a scale far above tol: a
            # non-isolated critical manifold, flagged not resolved
            near = abs(lam - cluster[0]) < max(1e3 * tol, 1e-8) and xdist < 2e-2
            if exact or near:
                if res < cluster[2]:
                    cluster[0], cluster[1], cluster[2] = lam, x, res
                if near and not exact:
                    cluster[3] = True
                merged = True
                break
        if not merged:
            clusters.append([lam, x, res, False])
    if not clusters:
        warnings.warn("no eigenpair converged from any start", stacklevel=2)
    found = [Eigenpair(lam, x, res, deg) for lam, x, res, deg in clusters]
    found.sort(key=lambda pair: -pair.lam)
    return found


def instanton_from_eigenpair(
    tensor: SymmetricTensor, pair: Eigenpair, y: float
) -> InstantonPoint:
    """Real instanton phi = (y/lambda)^{1/(p-2)} x at coupling y.

    Requires sign(lambda) = sign(y); the action evaluates to
    (p-2)/(2p) * (y/lambda)^{2/(p-2)}.
    """
    p = tensor.p
    if p < 3:
        raise DomainError("instantons require p >= 3")
    if pair.lam == 0 or y == 0 or math.copysign(1, pair.lam) != math.copysign(1, y):
        raise SignMismatch(f"need sign(lambda) = sign(y) != 0, got lam={pair.lam}, y={y}")
    r = (y / pair.lam) ** (1.0 / (p - 2))
    phi = r * pair.x
    action = 0.5 * (phi @ phi) - contract_full(tensor, phi) / (p * y)
    expected = (p - 2) / (2 * p) * (y / pair.lam) ** (2.0 / (p - 2))
    eom = np.linalg.norm(phi - contract_gradient(tensor, phi) / y)
    scale = max(np.linalg.norm(phi), 1.0)
    if eom > 1e-8 * scale:
        raise DomainError(
            f"equation of motion violated ({eom:.2e}); source pair residual too large?"
        )
    if abs(action - expected) > 1e-8 * max(1.0, abs(expected)):
        raise DomainError("action inconsistent with (p-2)/(2p) (y/lambda)^(2/(p-2))")
    return InstantonPoint(phi, float(action), pair, float(y))


def discontinuity_exponent(
    tensor: SymmetricTensor,
    y: float,
    pairs: list[Eigenpair] | None = None,
    **search_kwargs,
) -> float:
    """Leading instanton action governing the discontinuity decay at y.

    Returns min over matching-sign eigenpairs of
    (p-2)/(2p) * (|y|/|lambda|)^{2/(p-2)}; the largest |lambda| of the
    right sign dominates.  Raises NoMatchingPairs when no eigenpair with
    sign(lambda) = sign(y) is available.
    """
    p = tensor.p
    if p < 3:
        raise DomainError("the discontinuity exponent requires p >= 3")
    if y == 0:
        raise DomainError("y must be nonzero (the exponent tends to 0 as y -> 0)")
    if pairs is None:
        pairs = find_real_eigenpairs(tensor, **search_kwargs)
    if p % 2:
        # odd p: classes come in (lam, x) ~ (-lam, -x), so every class
        # provides an instanton at either sign of y
        candidates = [abs(pair.lam) for pair in pairs if pair.lam != 0]
    else:
        sign = math.copysign(1.0, y)
        candidates = [
            abs(pair.lam)
            for pair in pairs
            if pair.lam != 0 and math.copysign(1.0, pair.lam) == sign
        ]
    if not candidates:
        raise NoMatchingPairs(f"no real eigenpair with sign matching y={y}")
    lam_max = max(candidates)
    return (p - 2) / (2 * p) * (abs(y) / lam_max) ** (2.0 / (p - 2))
