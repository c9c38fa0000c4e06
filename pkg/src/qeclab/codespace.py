"""The block-product code: an [n, B] subspace spanned by 2**B product vectors.

The n input bits are split into B pairs of blocks of length n' = n/(2B),
concatenated as pair 1 block 0, pair 1 block 1, ..., pair B block 1, with
bit 0 of the integer index being the first variable.  A selector z in
{0,1}^B picks one block per pair; the basis vector for z evaluates the
building-block function on the selected blocks and multiplies the results.

State vectors are dense complex arrays of length 2**n indexed by x.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boolfn import BooleanFunctionTable

# Dense state vectors are capped at 2**24 amplitudes by default.
DENSE_CAP = 24


@dataclass(frozen=True)
class CodeParams:
    """Code geometry: n qubits, B block pairs, block length n_prime."""

    n: int
    B: int
    n_prime: int

    @property
    def dim(self) -> int:
        """Dimension of the code subspace."""
        return 1 << self.B


def make_params(n: int, B: int) -> CodeParams:
    """Validate (n, B) and derive the block length n' = n / (2B)."""
    if n < 2 or B < 1:
        raise ValueError(f"need n >= 2 and B >= 1, got n={n}, B={B}")
    if n % (2 * B) != 0:
        raise ValueError(f"2B = {2 * B} must divide n = {n}")
    return CodeParams(n=n, B=B, n_prime=n // (2 * B))


def qubit_count(amp: np.ndarray) -> int:
    """Number of qubits of a dense state vector; length must be a power of 2."""
    n = int(len(amp)).bit_length() - 1
    if len(amp) != 1 << n:
        raise ValueError(f"state length {len(amp)} is not a power of two")
    return n


def check_dense_cap(n: int, dense_cap: int = DENSE_CAP) -> None:
    if n > dense_cap:
        raise ValueError(f"n = {n} exceeds the dense cap {dense_cap}")


def block_project(x: int, params: CodeParams, i: int, b: int) -> int:
    """Content of block b of pair i (i in [1, B], b in {0, 1}) of input x."""
    if not 1 <= i <= params.B:
        raise ValueError(f"pair index {i} out of range [1, {params.B}]")
    if b not in (0, 1):
        raise ValueError(f"block bit must be 0 or 1, got {b}")
    offset = (2 * (i - 1) + b) * params.n_prime
    return (x >> offset) & ((1 << params.n_prime) - 1)


def eval_basis(
    f: BooleanFunctionTable, params: CodeParams, z: int, x: int
) -> float:
    """Basis value at x for selector z: the product of B block evaluations.

    The magnitude is exactly 2**-B.
    """
    if f.width != params.n_prime:
        raise ValueError(
            f"building block width {f.width} != block length {params.n_prime}"
        )
    if not 0 <= z < params.dim:
        raise ValueError(f"selector {z} out of range for B={params.B}")
    out = 1.0
    for k in range(1, params.B + 1):
        bit = (z >> (k - 1)) & 1
        out *= f.eval(block_project(x, params, k, bit))
    return out


def basis_vector(
    f: BooleanFunctionTable,
    params: CodeParams,
    z: int,
    dense_cap: int = DENSE_CAP,
) -> np.ndarray:
    """Dense basis vector for selector z (length 2**n, squared norm 2**(n-2B))."""
    if f.width != params.n_prime:
        raise ValueError(
            f"building block width {f.width} != block length {params.n_prime}"
        )
    check_dense_cap(params.n, dense_cap)
    vals = f.values()
    ones = np.ones(f.size)
    amp = np.ones(1, dtype=complex)
    # Block j is bits [j*n', (j+1)*n'), so later blocks are the slow axes.
    for j in range(2 * params.B):
        pair, bit = divmod(j, 2)
        factor = vals if ((z >> pair) & 1) == bit else ones
        amp = np.kron(factor, amp)
    return amp


@dataclass
class CodewordCoeffs:
    """Codeword as coefficients over the 2**B basis selectors."""

    params: CodeParams
    alpha: np.ndarray  # complex, length 2**B

    def __post_init__(self) -> None:
        self.alpha = np.asarray(self.alpha, dtype=complex)
        if self.alpha.shape != (self.params.dim,):
            raise ValueError(
                f"need {self.params.dim} coefficients, got {self.alpha.shape}"
            )

    def norm_sq(self) -> float:
        """Squared norm of the represented vector, via the closed form.

        Valid when the building block is balanced (orthogonal basis):
        ||phi||^2 = 2**(n-2B) * sum_z |alpha_z|^2.
        """
        p = self.params
        return float(2.0 ** (p.n - 2 * p.B) * np.sum(np.abs(self.alpha) ** 2))


def sample_codeword(params: CodeParams, seed) -> CodewordCoeffs:
    """Draw i.i.d. complex-normal coefficients, scaled to unit vector norm.

    ``seed`` may be an int or a Generator.  Normalization uses the closed
    form, so sampling works beyond the dense cap.
    """
    rng = np.random.default_rng(seed)
    dim = params.dim
    alpha = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    scale = 2.0 ** (params.n - 2 * params.B) * np.sum(np.abs(alpha) ** 2)
    return CodewordCoeffs(params, alpha / np.sqrt(scale))


def sample_codeword_pair(
    params: CodeParams, seed
) -> tuple[CodewordCoeffs, CodewordCoeffs]:
    """Two codewords whose materialized vectors are exactly orthonormal.

    Works in coefficient space: with a balanced building block the basis
    vectors are orthogonal with equal norms, so Gram-Schmidt on the raw
    coefficients carries over to the states.
    """
    rng = np.random.default_rng(seed)
    if params.B < 1 or params.dim < 2:
        raise ValueError("need code dimension at least 2 for a pair")
    a = rng.standard_normal(params.dim) + 1j * rng.standard_normal(params.dim)
    b = rng.standard_normal(params.dim) + 1j * rng.standard_normal(params.dim)
    b = b - (np.vdot(a, b) / np.vdot(a, a)) * a
    block_norm = 2.0 ** (params.n - 2 * params.B)
    a = a / np.sqrt(block_norm * np.sum(np.abs(a) ** 2))
    b = b / np.sqrt(block_norm * np.sum(np.abs(b) ** 2))
    return CodewordCoeffs(params, a), CodewordCoeffs(params, b)


def codeword_vector(
    f: BooleanFunctionTable,
    coeffs: CodewordCoeffs,
    dense_cap: int = DENSE_CAP,
) -> np.ndarray:
    """Dense vector sum_z alpha_z * basis_z."""
    params = coeffs.params
    check_dense_cap(params.n, dense_cap)
    amp = np.zeros(1 << params.n, dtype=complex)
    for z in range(params.dim):
        a = coeffs.alpha[z]
        if a != 0:
            amp += a * basis_vector(f, params, z, dense_cap)
    return amp


def _block_sums(f: BooleanFunctionTable) -> tuple[float, float, float]:
    """(sum f, sum f^2, domain size) over one block."""
    vals = f.values()
    return float(vals.sum()), float((vals * vals).sum()), float(f.size)


def gram_matrix(
    f: BooleanFunctionTable,
    params: CodeParams,
    method: str = "dense",
    dense_cap: int = DENSE_CAP,
) -> np.ndarray:
    """Pairwise inner products of the basis vectors, a 2**B x 2**B matrix.

    For a balanced building block the result is 2**(n-2B) times the
    identity.  The dense method materializes every basis vector; the
    structured method factorizes each entry into per-block-pair sums and
    has no dense cap.
    """
    if f.width != params.n_prime:
        raise ValueError(
            f"building block width {f.width} != block length {params.n_prime}"
        )
    dim = params.dim
    if method == "dense":
        check_dense_cap(params.n, dense_cap)
        vecs = [basis_vector(f, params, z, dense_cap) for z in range(dim)]
        g = np.empty((dim, dim), dtype=complex)
        for a in range(dim):
            for b in range(dim):
                g[a, b] = np.vdot(vecs[a], vecs[b])
        return g
    if method == "structured":
        total, sq, size = _block_sums(f)
        # Per block pair: both selectors agree -> (sum f^2) * size,
        # they disagree -> (sum f)^2.
        same = sq * size
        diff = total * total
        g = np.empty((dim, dim), dtype=complex)
        for a in range(dim):
            for b in range(dim):
                agree = ~(a ^ b) & (dim - 1)
                k_same = bin(agree).count("1")
                g[a, b] = same**k_same * diff ** (params.B - k_same)
        return g
    raise ValueError(f"unknown gram method {method!r}")
