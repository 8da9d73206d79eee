"""Small-matrix numerics kernel.

Everything in this package works with dense numpy arrays of modest size
(dimension 64 at most), so the helpers here wrap the corresponding LAPACK
routines with the validation and conventions the rest of the code relies on:

* ``eigh`` for (near-)Hermitian matrices, symmetrizing tiny asymmetries,
* ``pseudo_inverse`` with a relative singular-value cutoff,
* ``minimize_scalar``, a 64-point coarse scan followed by golden-section
  refinement (the scan guards against landing in the wrong basin),
* ``sample_mvn``, multivariate normal sampling through the spectral square
  root of the covariance,
* ``Rng``, a counter-based Philox stream that can be split by index so that
  parallel Monte-Carlo results do not depend on scheduling,
* entropy helpers in bits.
"""

import numpy as np

from .errors import EvaluationError, InvalidInput, NotPSD

_INV_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _require_finite(a, name):
    if not np.all(np.isfinite(a)):
        raise InvalidInput(f"{name} contains non-finite entries")


class Rng:
    """Deterministic random stream on top of the Philox counter generator.

    A stream is identified by ``(seed, stream)``.  Child streams produced by
    :meth:`substream` occupy disjoint regions of the 256-bit Philox counter,
    so Monte-Carlo chunks drawn from distinct substreams give identical
    results no matter how many workers process them or in which order.
    """

    _CHILD_BITS = 20  # up to 2**20 children per node, three levels deep

    def __init__(self, seed, stream=0):
        if not isinstance(seed, (int, np.integer)) or not 0 <= int(seed) < 2**64:
            raise InvalidInput("seed must be an integer in [0, 2**64)")
        if not isinstance(stream, (int, np.integer)) or not 0 <= int(stream) < 2**60:
            raise InvalidInput("stream must be an integer in [0, 2**60)")
        self.seed = int(seed)
        self.stream = int(stream)
        bitgen = np.random.Philox(counter=self.stream << 192, key=self.seed)
        self.generator = np.random.Generator(bitgen)

    def substream(self, index):
        """Return the ``index``-th child stream of this stream."""
        if not 0 <= int(index) < 2**self._CHILD_BITS:
            raise InvalidInput(f"substream index must be in [0, 2**{self._CHILD_BITS})")
        return Rng(self.seed, (self.stream << self._CHILD_BITS) + int(index) + 1)

    def standard_normal(self, shape):
        return self.generator.standard_normal(shape)

    def bits(self, n):
        """n uniform random bits as a uint8 array."""
        return self.generator.integers(0, 2, size=int(n), dtype=np.uint8)


def eigh(h):
    """Eigendecomposition of a Hermitian matrix.

    Accepts real-symmetric or complex-Hermitian input; deviations from
    Hermiticity up to ``1e-12 * (1 + max|h|)`` are symmetrized away, larger
    ones are rejected.  Returns ``(eigenvalues ascending, eigenvector columns)``.
    """
    h = np.asarray(h)
    _require_finite(h, "matrix")
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InvalidInput("matrix must be square")
    if h.shape[0] > 64:
        raise InvalidInput("kernel supports dimension 64 at most")
    scale = 1.0 + (np.abs(h).max() if h.size else 0.0)
    if np.abs(h - h.conj().T).max() > 1e-12 * scale:
        raise InvalidInput("matrix is not Hermitian within tolerance")
    h = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(h)
    return w, v


def pseudo_inverse(m, tol=1e-10):
    """Moore-Penrose pseudo-inverse with singular values below
    ``tol * sigma_max`` treated as zero."""
    m = np.asarray(m, dtype=float)
    _require_finite(m, "matrix")
    if not tol > 0:
        raise InvalidInput("tol must be positive")
    if m.ndim != 2:
        raise InvalidInput("matrix must be two-dimensional")
    if m.shape[0] == m.shape[1] and np.abs(m - m.T).max() <= 1e-12 * (1.0 + np.abs(m).max()):
        # symmetric fast path: eigendecomposition doubles as the SVD
        w, v = np.linalg.eigh(0.5 * (m + m.T))
        cutoff = tol * np.abs(w).max() if w.size else 0.0
        inv_w = np.where(np.abs(w) > cutoff, 1.0 / np.where(w == 0.0, 1.0, w), 0.0)
        return (v * inv_w) @ v.T
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    cutoff = tol * s.max() if s.size else 0.0
    inv_s = np.where(s > cutoff, 1.0 / np.where(s == 0.0, 1.0, s), 0.0)
    return (vt.T * inv_s) @ u.T


def minimize_scalar(f, lo, hi, tol=1e-8, scan_points=64):
    """Minimize a scalar function on ``[lo, hi]``.

    A ``scan_points``-point coarse scan locates the best basin, then
    golden-section refinement shrinks the bracket below ``tol``.  For a
    unimodal basin the returned ``x`` is within ``tol`` of its argmin.
    Returns ``(x, f(x))``.
    """
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise InvalidInput("need finite lo < hi")

    def ev(x):
        y = f(x)
        if not np.isfinite(y):
            raise EvaluationError(x)
        return y

    xs = np.linspace(lo, hi, scan_points)
    ys = np.array([ev(x) for x in xs])
    k = int(np.argmin(ys))
    a = xs[max(k - 1, 0)]
    b = xs[min(k + 1, scan_points - 1)]

    # golden-section on [a, b]
    h = b - a
    c, d = b - _INV_GOLDEN * h, a + _INV_GOLDEN * h
    yc, yd = ev(c), ev(d)
    while h > tol:
        if yc < yd:
            b, d, yd = d, c, yc
            h = b - a
            c = b - _INV_GOLDEN * h
            yc = ev(c)
        else:
            a, c, yc = c, d, yd
            h = b - a
            d = a + _INV_GOLDEN * h
            yd = ev(d)
    x_best = 0.5 * (a + b)
    return x_best, ev(x_best)


def sample_mvn(cov, n, rng):
    """Draw ``n`` samples from the zero-mean Gaussian with covariance ``cov``.

    Uses the spectral square root of ``cov``; eigenvalues below ``-1e-8``
    raise :class:`NotPSD`, small negative ones from rounding are clipped.
    Output shape is ``(n, dim)`` and is fully determined by ``rng``.
    """
    cov = np.asarray(cov, dtype=float)
    _require_finite(cov, "cov")
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise InvalidInput("cov must be square")
    if np.abs(cov - cov.T).max() > 1e-10 * (1.0 + np.abs(cov).max()):
        raise InvalidInput("cov must be symmetric")
    w, v = np.linalg.eigh(0.5 * (cov + cov.T))
    if w.min(initial=0.0) < -1e-8:
        raise NotPSD(f"covariance has eigenvalue {w.min()}")
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    z = rng.standard_normal((int(n), cov.shape[0]))
    return z @ root


def binary_entropy(p):
    """Binary entropy in bits, with the 0*log(0) = 0 convention."""
    if not 0.0 <= p <= 1.0:
        raise InvalidInput("probability must lie in [0, 1]")
    out = 0.0
    if p > 0.0:
        out -= p * np.log2(p)
    if p < 1.0:
        out -= (1.0 - p) * np.log2(1.0 - p)
    return float(out)


def entropy_bits(weights):
    """Shannon entropy in bits of a nonnegative weight vector.

    Intended for eigenvalues of a trace-one density matrix; values in
    ``[-1e-9, 0)`` are treated as rounding noise and clipped to zero.
    """
    w = np.asarray(weights, dtype=float)
    _require_finite(w, "weights")
    if w.min(initial=0.0) < -1e-9:
        raise InvalidInput(f"weights must be nonnegative, got min {w.min()}")
    w = np.clip(w, 0.0, None)
    w = w[w > 0.0]
    return float(-(w * np.log2(w)).sum())
