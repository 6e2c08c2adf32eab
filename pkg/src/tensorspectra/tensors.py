"""Real symmetric tensors in packed multiset storage.

A symmetric order-p tensor over R^N keeps one value per nondecreasing
index tuple a_1 <= ... <= a_p (C(N+p-1, p) values instead of N^p).  The
Gaussian ensemble here generalizes the GOE: the weight couples all N^p
index tuples, so a packed component with index multiset mu is an
independent centered Gaussian with variance p / (N^{p-1} * c(mu)), where
c(mu) = p!/prod(multiplicities!) counts the distinct orderings of mu.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import DomainError, NearSingular

__all__ = [
    "SymmetricTensor",
    "SpikeSpec",
    "multiset_table",
    "full_index_map",
    "sample_goe",
    "from_dense",
    "contract_gradient",
    "contract_full",
    "contract_matrix",
    "add_spike",
    "matrix_resolvent",
    "save_tensor",
    "load_tensor",
    "tensor_to_bytes",
    "tensor_from_bytes",
]

LAYOUT = "packed-multiset-lex"


@lru_cache(maxsize=None)
def multiset_table(p: int, N: int):
    """Lexicographic table of nondecreasing index tuples and their data.

    Returns (tuples, rank, counts): `tuples` is an (M, p) int array in
    lexicographic order, `rank` maps tuple -> packed position, and
    `counts[i]` is the number of distinct orderings c(mu) of tuples[i].
    """
    tuples = np.array(
        list(itertools.combinations_with_replacement(range(N), p)), dtype=np.int64
    )
    rank = {tuple(t): i for i, t in enumerate(tuples.tolist())}
    pfact = math.factorial(p)
    counts = np.empty(len(tuples), dtype=np.int64)
    for i, t in enumerate(tuples.tolist()):
        mult = 1
        for _, group in itertools.groupby(t):
            mult *= math.factorial(sum(1 for _ in group))
        counts[i] = pfact // mult
    return tuples, rank, counts


@lru_cache(maxsize=None)
def full_index_map(p: int, N: int) -> np.ndarray:
    """Flat map from every one of the N^p index tuples to its packed rank.

    dense.flat[k] = packed[full_index_map[k]] reconstructs the dense tensor;
    brute-force oracles iterate it to visit all orderings.
    """
    _, rank, _ = multiset_table(p, N)
    out = np.empty(N**p, dtype=np.int64)
    for k, idx in enumerate(itertools.product(range(N), repeat=p)):
        out[k] = rank[tuple(sorted(idx))]
    return out


class SymmetricTensor:
    """Order-p symmetric tensor over R^N, immutable after construction."""

    __slots__ = ("p", "N", "data", "seed", "_dense")

    def __init__(self, p: int, N: int, data, seed=None):
        if p < 2 or N < 1:
            raise DomainError(f"need p >= 2 and N >= 1, got p={p}, N={N}")
        self.p = int(p)
        self.N = int(N)
        arr = np.ascontiguousarray(data, dtype=np.float64)
        expected = math.comb(N + p - 1, p)
        if arr.shape != (expected,):
            raise DomainError(
                f"packed data must have length C(N+p-1,p)={expected}, got {arr.shape}"
            )
        arr.setflags(write=False)
        self.data = arr
        self.seed = seed
        self._dense = None

    @classmethod
    def zeros(cls, p: int, N: int) -> "SymmetricTensor":
        return cls(p, N, np.zeros(math.comb(N + p - 1, p)))

    def component(self, *indices) -> float:
        """Logical component T_{a_1...a_p}; order of indices is irrelevant."""
        if len(indices) != self.p:
            raise DomainError(f"expected {self.p} indices")
        _, rank, _ = multiset_table(self.p, self.N)
        return float(self.data[rank[tuple(sorted(indices))]])

    def to_dense(self) -> np.ndarray:
        """Dense N^p array (cached); convenient for einsum contractions."""
        if self._dense is None:
            dense = self.data[full_index_map(self.p, self.N)]
            dense = dense.reshape((self.N,) * self.p)
            dense.setflags(write=False)
            self._dense = dense
        return self._dense

    def __eq__(self, other):
        return (
            isinstance(other, SymmetricTensor)
            and self.p == other.p
            and self.N == other.N
            and np.array_equal(self.data, other.data)
        )

    def __repr__(self):
        return f"SymmetricTensor(p={self.p}, N={self.N}, nnz={self.data.size})"


def from_dense(dense) -> SymmetricTensor:
    """Packs a dense symmetric array; symmetry itself is not re-checked."""
    dense = np.asarray(dense, dtype=np.float64)
    p = dense.ndim
    N = dense.shape[0]
    if dense.shape != (N,) * p:
        raise DomainError("dense tensor must be hypercubic")
    tuples, _, _ = multiset_table(p, N)
    data = dense[tuple(tuples.T)]
    return SymmetricTensor(p, N, data)


def sample_goe(p: int, N: int, seed: int) -> SymmetricTensor:
    """Draw one tensor from the Gaussian ensemble.

    Packed components are independent centered Gaussians with variance
    p/(N^{p-1} c(mu)); equivalently the full-tuple covariance is the
    symmetrized propagator (p/N^{p-1}) (1/p!) sum_sigma prod delta.
    Deterministic in (p, N, seed) via a counter-based Philox stream.
    """
    _, _, counts = multiset_table(p, N)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    sigma = np.sqrt(p / (float(N) ** (p - 1) * counts))
    return SymmetricTensor(p, N, rng.standard_normal(len(counts)) * sigma, seed=seed)


@dataclass(frozen=True)
class SpikeSpec:
    """Rank-one signal b * v^{otimes p} / N^{p/2-1} with unit v and SNR b."""

    b: float
    v: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.v, dtype=np.float64)
        if abs(v @ v - 1.0) >= 1e-12:
            raise DomainError("spike direction must be a unit vector (v.v = 1)")
        if self.b < 0:
            raise DomainError("signal-to-noise ratio b must be >= 0")
        object.__setattr__(self, "v", v)


def add_spike(tensor: SymmetricTensor, spec: SpikeSpec) -> SymmetricTensor:
    """Componentwise sum T + b N^{1-p/2} v^{otimes p}, symmetric by construction."""
    if len(spec.v) != tensor.N:
        raise DomainError("spike dimension mismatch")
    if spec.b == 0.0:
        return tensor
    tuples, _, _ = multiset_table(tensor.p, tensor.N)
    spike = spec.b * float(tensor.N) ** (1 - tensor.p / 2) * np.prod(spec.v[tuples], axis=1)
    return SymmetricTensor(tensor.p, tensor.N, tensor.data + spike)


def _check_vector(tensor, x):
    x = np.asarray(x)
    if x.shape != (tensor.N,):
        raise DomainError(f"vector must have length N={tensor.N}, got shape {x.shape}")
    return x


def contract_gradient(tensor: SymmetricTensor, x) -> np.ndarray:
    """(T x^{p-1})_a = sum T_{a b...} x_b ... x_z over the other p-1 slots."""
    x = _check_vector(tensor, x)
    out = tensor.to_dense()
    for _ in range(tensor.p - 1):
        out = out @ x
    return out


def contract_full(tensor: SymmetricTensor, x) -> float | complex:
    """Full contraction T x^p; equals x . (T x^{p-1}) (Euler identity)."""
    x = _check_vector(tensor, x)
    return contract_gradient(tensor, x) @ x


def contract_matrix(tensor: SymmetricTensor, x) -> np.ndarray:
    """(T x^{p-2})_{ab}: contract all but two slots; Jacobian building block."""
    x = _check_vector(tensor, x)
    out = tensor.to_dense()
    for _ in range(tensor.p - 2):
        out = out @ x
    return out


def matrix_resolvent(tensor: SymmetricTensor, w: complex, cond_limit: float = 1e13) -> complex:
    """(1/N) tr (w - T)^{-1} for p = 2, by linear solves against basis vectors."""
    if tensor.p != 2:
        raise DomainError("matrix_resolvent requires an order-2 tensor")
    w = complex(w)
    A = w * np.eye(tensor.N) - tensor.to_dense()
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > cond_limit:
        raise NearSingular(f"w - T is ill-conditioned (cond ~ {cond:.3e})", condition=cond)
    lu = lu_factor(A)
    trace = 0.0 + 0j
    e = np.zeros(tensor.N, dtype=complex)
    for i in range(tensor.N):
        e[:] = 0
        e[i] = 1
        trace += lu_solve(lu, e)[i]
    return trace / tensor.N


# ------------------------------------------------------------ serialization
#
# File format: one JSON header line {p, N, seed?, layout} terminated by a
# newline, followed by the packed components as little-endian float64 in
# lexicographic multiset order.

def tensor_to_bytes(tensor: SymmetricTensor) -> bytes:
    header = {"p": tensor.p, "N": tensor.N, "layout": LAYOUT}
    if tensor.seed is not None:
        header["seed"] = int(tensor.seed)
    return json.dumps(header, sort_keys=True).encode() + b"\n" + tensor.data.astype("<f8").tobytes()


def tensor_from_bytes(blob: bytes) -> SymmetricTensor:
    newline = blob.index(b"\n")
    header = json.loads(blob[:newline].decode())
    if header.get("layout") != LAYOUT:
        raise DomainError(f"unsupported layout {header.get('layout')!r}")
    data = np.frombuffer(blob[newline + 1 :], dtype="<f8")
    return SymmetricTensor(header["p"], header["N"], data, seed=header.get("seed"))


def save_tensor(tensor: SymmetricTensor, path) -> None:
    with open(path, "wb") as fh:
        fh.write(tensor_to_bytes(tensor))


def load_tensor(path) -> SymmetricTensor:
    with open(path, "rb") as fh:
        return tensor_from_bytes(fh.read())
