"""Exact spectral calculus: eigendecompositions, heat kernels, traces.

Everything here runs through a full Hermitian eigendecomposition of the
symmetrized operator (desk scale, deterministic), so semigroups and
partition functions are exact up to linear-algebra rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundles import Connection, Potential
from .errors import BadCoefficients, NumericalFailure
from .graphs import WeightedGraph
from .operators import OperatorMatrix, assemble, symmetrize


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of the symmetrized operator plus the weighted metric.

    ``vectors`` is unitary with S = U diag(eigenvalues) U*.  The measure
    and rank are kept so heat kernels can be reconstructed in the
    weighted space.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    measure: np.ndarray
    rank: int

    @property
    def dimension(self):
        return self.eigenvalues.size


@dataclass(frozen=True)
class HeatKernel:
    """Kernel K(t, x, y) of e^{-tH}: (e^{-tH} f)(x) = sum_y K(t,x,y) f(y) m(y)."""

    time: float
    matrix: np.ndarray  # (n*nu, n*nu), block (x, y) is the nu x nu kernel block
    measure: np.ndarray
    rank: int

    def block(self, x, y):
        nu = self.rank
        return self.matrix[x * nu:(x + 1) * nu, y * nu:(y + 1) * nu]


def eigendecompose(op: OperatorMatrix) -> SpectralDecomposition:
    """Full eigendecomposition of the symmetrized operator."""
    S = symmetrize(op)
    try:
        lam, U = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    return SpectralDecomposition(lam, U, op.measure, op.rank)


def _weights(dec: SpectralDecomposition):
    return np.repeat(dec.measure, dec.rank)


def propagator(dec: SpectralDecomposition, t: float) -> np.ndarray:
    """Matrix of e^{-tA} in the original (unsymmetrized) coordinates."""
    w = np.sqrt(_weights(dec))
    core = (dec.vectors * np.exp(-t * dec.eigenvalues)) @ dec.vectors.conj().T
    return (core / w[:, None]) * w[None, :]


def heat_kernel(dec: SpectralDecomposition, t: float) -> HeatKernel:
    """Heat kernel at time t > 0 via functional calculus."""
    if t <= 0:
        raise BadCoefficients("heat kernel needs t > 0")
    w = np.sqrt(_weights(dec))
    core = (dec.vectors * np.exp(-t * dec.eigenvalues)) @ dec.vectors.conj().T
    K = (core / w[:, None]) / w[None, :]
    return HeatKernel(float(t), K, dec.measure, dec.rank)


def partition_function(dec: SpectralDecomposition, t: float) -> float:
    """tr(e^{-tH}) = sum_k e^{-t lambda_k}."""
    if t <= 0:
        raise BadCoefficients("partition function needs t > 0")
    return float(np.exp(-t * dec.eigenvalues).sum())


def kernel_trace(dec: SpectralDecomposition, t: float) -> float:
    """Trace recomputed as sum_x tr_x K(t,x,x) m(x) (basis independence check)."""
    K = heat_kernel(dec, t)
    total = 0.0
    for x in range(dec.measure.size):
        total += np.trace(K.block(x, x)).real * dec.measure[x]
    return total


def _adaptive_simpson(f, a, b, rtol=1e-6, max_depth=30):
    """Adaptive Simpson quadrature with relative tolerance."""

    def simpson(fa, fm, fb, h):
        return h / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, fa, b, fb, m, fm, whole, depth, scale):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        if depth >= max_depth or abs(left + right - whole) <= 15.0 * rtol * scale:
            return left + right + (left + right - whole) / 15.0
        return (recurse(a, fa, m, fm, lm, flm, left, depth + 1, scale)
                + recurse(m, fm, b, fb, rm, frm, right, depth + 1, scale))

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = simpson(fa, fm, fb, b - a)
    scale = abs(whole) + 1e-300
    return recurse(a, fa, b, fb, m, fm, whole, 0, scale)


def kato_functional(g: WeightedGraph, w, t: float) -> float:
    """sup_x int_0^t sum_y p(s,x,y) |w(y)| m(y) ds for the free scalar kernel.

    The integrand is evaluated exactly from the spectral decomposition;
    the time integral uses adaptive Simpson at relative tolerance 1e-6.
    """
    if t <= 0:
        raise BadCoefficients("kato functional needs t > 0")
    w = np.asarray(w, dtype=float)
    dec = eigendecompose(assemble(g))
    absw_m = np.abs(w) * g.measure
    sq = np.sqrt(g.measure)

    def integrand_all(s):
        core = (dec.vectors * np.exp(-s * dec.eigenvalues)) @ dec.vectors.conj().T
        # row x of p(s, x, .) m(.) applied to |w|
        return ((core.real / sq[:, None]) / sq[None, :]) @ absw_m

    best = 0.0
    for x in range(g.n):
        val = _adaptive_simpson(lambda s, x=x: integrand_all(s)[x], 0.0, t)
        best = max(best, float(val))
    return best


def relative_form_bound_check(g: WeightedGraph, c: Connection,
                              V_minus: Potential, C1: float, C2: float):
    """Check Q_{V^-}(f) <= C1 Q_{Phi,0}(f) + C2 ||f||_m^2 for all f.

    Equivalent to C1 H_{Phi,0} + C2 - V^- >= 0; returns (holds, margin)
    with margin the smallest eigenvalue of the symmetrized difference.
    """
    if not (0.0 < C1 < 1.0) or C2 < 0.0:
        raise BadCoefficients("need C1 in (0,1) and C2 >= 0")
    free = assemble(g, c)
    nu = free.rank
    if V_minus.rank != nu or V_minus.n != g.n:
        raise BadCoefficients("V_minus shape does not match operator")
    shifted = OperatorMatrix(
        g, nu,
        C1 * free.matrix + C2 * np.eye(free.dimension)
        - _block_diag(V_minus.values),
        g.measure,
    )
    lam_min = float(np.linalg.eigvalsh(symmetrize(shifted))[0])
    return lam_min >= -1e-10, lam_min


def _block_diag(blocks):
    n, nu, _ = blocks.shape
    out = np.zeros((n * nu, n * nu), dtype=complex)
    for i in range(n):
        out[i * nu:(i + 1) * nu, i * nu:(i + 1) * nu] = blocks[i]
    return out
