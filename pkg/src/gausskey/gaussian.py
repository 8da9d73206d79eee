"""Covariance-matrix calculus for n-mode Gaussian states.

Conventions used throughout the package:

* Quadratures are ordered mode-major, ``(X1, P1, X2, P2, ...)``.
* The symplectic form is ``J_n = diag(J, ..., J)`` with ``J = [[0, 1], [-1, 0]]``.
* The vacuum covariance matrix (CM) is the identity, so the scalar variance
  of a quadrature is ``cm_entry / 2``.
* A CM is physical iff the Hermitian matrix ``cm + i J_n`` is positive
  semidefinite.

States are value objects: a CM, a displacement vector (DV), and nothing else.
All operations are pure functions.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import matkit
from .errors import IllConditioned, InvalidInput

_PHYS_TOL = 1e-9

# Phase convention for overlaps of displaced copies of one pure state.  The
# sign is pinned by the position-grid oracle: wavefunctions built with the
# exp(i * p_mean . x) factor give <psi_d1|psi_d2> a phase of
# exp(+i/2 * d1.J.d2) whenever the per-state self phases p_mean . x_mean
# vanish, which covers every use in this package.
_OVERLAP_PHASE_SIGN = +1.0


@lru_cache(maxsize=None)
def _j(n):
    j = np.kron(np.eye(int(n)), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    j.flags.writeable = False
    return j


def symplectic_form(n):
    """The 2n x 2n symplectic form in mode-major ordering."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidInput("mode count must be a positive integer")
    return _j(int(n)).copy()


def xxpp_indices(n):
    """Index array mapping mode-major order to (X..X, P..P) order.

    ``m[np.ix_(idx, idx)]`` re-expresses a mode-major matrix in the
    position-block/momentum-block basis.
    """
    return np.r_[0 : 2 * n : 2, 1 : 2 * n : 2]


def _check_cm(cm, name="cm"):
    cm = np.asarray(cm, dtype=float)
    if cm.ndim != 2 or cm.shape[0] != cm.shape[1] or cm.shape[0] % 2:
        raise InvalidInput(f"{name} must be square with even dimension")
    if not np.all(np.isfinite(cm)):
        raise InvalidInput(f"{name} has non-finite entries")
    if np.abs(cm - cm.T).max() > 1e-12 * (1.0 + np.abs(cm).max()):
        raise InvalidInput(f"{name} must be symmetric")
    return 0.5 * (cm + cm.T)


@dataclass(frozen=True)
class GaussianState:
    """An n-mode Gaussian state: covariance matrix and displacement vector."""

    cm: np.ndarray
    dv: np.ndarray

    def __post_init__(self):
        cm = _check_cm(self.cm)
        dv = np.asarray(self.dv, dtype=float)
        if dv.shape != (cm.shape[0],):
            raise InvalidInput("dv length must match the CM dimension")
        if not np.all(np.isfinite(dv)):
            raise InvalidInput("dv has non-finite entries")
        cm.flags.writeable = False
        dv = dv.copy()
        dv.flags.writeable = False
        object.__setattr__(self, "cm", cm)
        object.__setattr__(self, "dv", dv)

    @property
    def n_modes(self):
        return self.cm.shape[0] // 2


def vacuum(n):
    """The n-mode vacuum state."""
    return GaussianState(np.eye(2 * n), np.zeros(2 * n))


def is_physical(cm):
    """True iff ``cm + i J`` has no eigenvalue below ``-1e-9``."""
    cm = _check_cm(cm)
    j = _j(cm.shape[0] // 2)
    w = np.linalg.eigvalsh(cm + 1j * j)
    return bool(w.min() >= -_PHYS_TOL)


def _mode_signs(n, modes_of_a):
    modes = sorted(set(int(m) for m in modes_of_a))
    if any(m < 0 or m >= n for m in modes):
        raise InvalidInput("mode index out of range")
    signs = np.ones(2 * n)
    for m in modes:
        signs[2 * m + 1] = -1.0
    return signs


def partial_transpose(cm, modes_of_a):
    """Partial transposition at the CM level: flip the momentum signs of
    the given modes."""
    cm = _check_cm(cm)
    t = _mode_signs(cm.shape[0] // 2, modes_of_a)
    return (t[:, None] * cm) * t[None, :]


def is_nppt(cm, modes_of_a):
    """True iff the partial transpose over ``modes_of_a`` is unphysical."""
    pt = partial_transpose(cm, modes_of_a)
    j = _j(pt.shape[0] // 2)
    w = np.linalg.eigvalsh(pt + 1j * j)
    return bool(w.min() < -_PHYS_TOL)


def symplectic_spectrum(cm):
    """Symplectic eigenvalues, ascending, each listed once.

    They are the absolute values of the eigenvalues of ``i J cm``, which come
    in +/- pairs.
    """
    cm = _check_cm(cm)
    j = _j(cm.shape[0] // 2)
    ev = np.abs(np.linalg.eigvals(j @ cm))
    ev.sort()
    return ev[::2].copy()


@dataclass(frozen=True)
class SymplecticDiag:
    """Williamson normal form: ``s.T @ cm @ s = d`` with ``s`` symplectic and
    ``d`` diagonal with the symplectic eigenvalues repeated pairwise."""

    spectrum: np.ndarray
    s: np.ndarray
    d: np.ndarray


def williamson(cm):
    """Williamson diagonalization of a positive definite CM.

    Returns ``SymplecticDiag`` with ``spectrum`` ascending.  The symplectic
    matrix is built from the antisymmetric normal form of
    ``cm^{-1/2} J cm^{-1/2}``; its residual per-mode rotation freedom is
    irrelevant to every consumer in this package.
    """
    cm = _check_cm(cm)
    n = cm.shape[0] // 2
    j = _j(n)

    # already-diagonal thermal form: return the identity transform
    scale = 1.0 + np.abs(cm).max()
    if np.abs(cm - np.diag(np.diag(cm))).max() <= 1e-12 * scale:
        diag = np.diag(cm)
        if np.abs(diag[0::2] - diag[1::2]).max() <= 1e-12 * scale:
            spectrum = diag[0::2].copy()
            if spectrum.min() < 1e-10:
                raise IllConditioned("CM is numerically singular")
            return SymplecticDiag(spectrum, np.eye(2 * n), np.diag(diag.copy()))

    w, v = np.linalg.eigh(cm)
    if w.min() < 1e-10:
        raise IllConditioned("CM is numerically singular")
    inv_sqrt = (v / np.sqrt(w)) @ v.T
    k = inv_sqrt @ j @ inv_sqrt
    k = 0.5 * (k - k.T)
    hb, hv = np.linalg.eigh(1j * k)
    # positive half of the +/- paired spectrum; 1/b are the symplectic
    # eigenvalues, so descending b gives ascending spectrum
    pos = [i for i in np.argsort(hb)[::-1] if hb[i] > 0][:n]
    o = np.empty((2 * n, 2 * n))
    spectrum = np.empty(n)
    for mode, i in enumerate(pos):
        vec = hv[:, i]
        u = math.sqrt(2.0) * vec.real
        wv = math.sqrt(2.0) * vec.imag
        o[:, 2 * mode] = wv
        o[:, 2 * mode + 1] = u
        spectrum[mode] = 1.0 / hb[i]
    lam_half = np.repeat(np.sqrt(spectrum), 2)
    s = (inv_sqrt @ o) * lam_half[None, :]
    # fix the residual per-mode rotation freedom: rotate each column pair so
    # the mode's own 2x2 block of S is symmetric positive when possible
    for mode in range(n):
        cols = slice(2 * mode, 2 * mode + 2)
        block = s[cols, cols]
        if np.linalg.det(block) > 1e-12:
            bu, _, bvt = np.linalg.svd(block)
            s[:, cols] = s[:, cols] @ (bu @ bvt).T
    d = np.diag(np.repeat(spectrum, 2))
    return SymplecticDiag(spectrum, s, d)


def purify(state):
    """Extend an n-mode state to a pure 2n-mode state whose partial trace
    over the added modes returns the input exactly.

    The added block carries the momentum-reflected copy of the input CM and
    the off-diagonal coupling ``J S E S^{-1} theta`` with
    ``E = diag(sqrt(spectrum_k^2 - 1))`` repeated pairwise.  A pure input
    (spectrum 1 within 1e-9) short-circuits to zero coupling so rounding
    can never produce sqrt of a negative number.
    """
    n = state.n_modes
    wd = williamson(state.cm)
    if wd.spectrum.min() < 1.0 - _PHYS_TOL:
        raise InvalidInput("state is unphysical (symplectic eigenvalue below 1)")
    theta = np.diag(_mode_signs(n, range(n)))
    e = np.sqrt(np.clip(np.repeat(wd.spectrum, 2) ** 2 - 1.0, 0.0, None))
    e[np.repeat(wd.spectrum, 2) <= 1.0 + _PHYS_TOL] = 0.0
    if e.max(initial=0.0) == 0.0:
        c = np.zeros((2 * n, 2 * n))
    else:
        c = _j(n) @ wd.s @ np.diag(e) @ np.linalg.inv(wd.s) @ theta
    cm = np.block([[state.cm, c], [c.T, theta @ state.cm @ theta]])
    cm = 0.5 * (cm + cm.T)
    dv = np.concatenate([state.dv, theta @ state.dv])
    return GaussianState(cm, dv)


@dataclass(frozen=True)
class ConditionalGaussian:
    """A Gaussian state of the unmeasured modes after ideal X homodyne.

    The CM does not depend on the outcomes; the DV is linear in them.
    """

    state: GaussianState
    outcome: np.ndarray = field(default_factory=lambda: np.zeros(0))


def condition_on_x(state, measured_modes, outcomes):
    """Condition a Gaussian state on ideal X-homodyne outcomes.

    ``measured_modes`` is a proper, non-empty subset of modes; ``outcomes``
    holds one X value per measured mode.  The remaining state is

        cm' = G_rr - G_rm (Pi G_mm Pi)^+ G_mr
        dv' = dv_r + G_rm (Pi G_mm Pi)^+ (x - dv_m)

    with ``Pi`` the projector onto the X rows of the measured block and
    ``^+`` the pseudo-inverse (the projected block is rank-deficient by
    construction).
    """
    n = state.n_modes
    modes = sorted(set(int(m) for m in measured_modes))
    if any(m < 0 or m >= n for m in modes):
        raise InvalidInput("measured mode index out of range")
    if len(modes) == 0 or len(modes) == n:
        raise InvalidInput("measured modes must be a proper non-empty subset")
    outcomes = np.asarray(outcomes, dtype=float)
    if outcomes.shape != (len(modes),):
        raise InvalidInput("need exactly one outcome per measured mode")
    if not np.all(np.isfinite(outcomes)):
        raise InvalidInput("outcomes must be finite")

    m_idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes])
    r_idx = np.array([i for i in range(2 * n) if i not in set(m_idx)])
    g_mm = state.cm[np.ix_(m_idx, m_idx)]
    g_rm = state.cm[np.ix_(r_idx, m_idx)]

    proj = np.zeros_like(g_mm)
    xs = np.arange(0, len(m_idx), 2)
    proj[np.ix_(xs, xs)] = g_mm[np.ix_(xs, xs)]
    gain = g_rm @ matkit.pseudo_inverse(proj)

    cm_c = state.cm[np.ix_(r_idx, r_idx)] - gain @ g_rm.T
    cm_c = 0.5 * (cm_c + cm_c.T)
    x_vec = np.zeros(len(m_idx))
    x_vec[xs] = outcomes
    dv_c = state.dv[r_idx] + gain @ (x_vec - state.dv[m_idx])
    return ConditionalGaussian(GaussianState(cm_c, dv_c), outcomes.copy())


def pure_overlap(cm, d1, d2):
    """Overlap of two displaced copies of one pure Gaussian state.

    ``|result|^2 = exp(-1/2 delta . cm^{-1} . delta)`` with ``delta = d2 - d1``
    and a phase of ``exp(+i/2 d1 . J . d2)`` in the grid-oracle convention
    (see module constant).  Equals 1 when ``d1 == d2``.
    """
    cm = _check_cm(cm)
    spec = symplectic_spectrum(cm)
    if np.abs(spec - 1.0).max() > 1e-6:
        raise InvalidInput("CM is not pure (symplectic spectrum deviates from 1)")
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    if d1.shape != (cm.shape[0],) or d2.shape != (cm.shape[0],):
        raise InvalidInput("displacement length must match the CM dimension")
    delta = d2 - d1
    quad = float(delta @ np.linalg.solve(cm, delta))
    phase = _OVERLAP_PHASE_SIGN * 0.5 * float(d1 @ _j(cm.shape[0] // 2) @ d2)
    return complex(math.exp(-0.25 * quad) * complex(math.cos(phase), math.sin(phase)))


@dataclass(frozen=True)
class SymmetricStateParams:
    """The symmetric two-mode family: equal local variances ``lam`` on both
    modes and quadrature correlations ``diag(cx, -cp)`` between them."""

    lam: float
    cx: float
    cp: float

    def __post_init__(self):
        vals = (self.lam, self.cx, self.cp)
        if not all(np.isfinite(v) for v in vals):
            raise InvalidInput("parameters must be finite")
        if self.lam < 0 or not self.cx >= self.cp >= 0:
            raise InvalidInput("need lam >= 0 and cx >= cp >= 0")


def physical_symmetric(p):
    """Closed-form physicality test: lam^2 - cx*cp - 1 >= lam*(cx - cp).

    The margin is allowed the same -1e-9 band as the matrix-level
    :func:`is_physical`, so boundary states built from rounded square roots
    stay inside the family.
    """
    return bool(p.lam**2 - p.cx * p.cp - 1.0 - p.lam * (p.cx - p.cp) >= -_PHYS_TOL)


def npt_symmetric(p):
    """Closed-form entanglement (NPPT) test: lam^2 + cx*cp - 1 < lam*(cx + cp),
    strictly."""
    return bool(p.lam**2 + p.cx * p.cp - 1.0 < p.lam * (p.cx + p.cp))


def symmetric_embed(p):
    """The two-mode GaussianState carrying the symmetric family parameters."""
    if not physical_symmetric(p):
        raise InvalidInput(f"unphysical parameters {p}")
    cm = np.array(
        [
            [p.lam, 0.0, p.cx, 0.0],
            [0.0, p.lam, 0.0, -p.cp],
            [p.cx, 0.0, p.lam, 0.0],
            [0.0, -p.cp, 0.0, p.lam],
        ]
    )
    return GaussianState(cm, np.zeros(4))
