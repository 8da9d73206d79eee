"""Brute-force verifier on a position-space grid.

Pure Gaussian states are written out as explicit complex wavefunctions over
a uniform grid (up to 4 modes at coarse resolution), and overlaps,
homodyne conditioning, moments, and postselected reduced-state spectra are
recomputed by direct summation.  Nothing here reuses the covariance-matrix
code paths; the only internal dependency is the numerics kernel.  That makes
this module a genuinely independent cross-check for the closed-form layer.

A pure state with covariance matrix split into position/momentum blocks
``[[A, B], [B^T, C]]`` has wavefunction

    psi(x) ~ exp(-1/2 (x - xbar)^T (U + iV) (x - xbar) + i pbar . x)

with ``U = A^{-1}`` and ``V = -A^{-1} B``; the vacuum maps to ``U = I``,
``V = 0``, ``psi = pi^{-1/4} exp(-x^2/2)``.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import matkit
from .errors import GridTooSmall, InvalidInput, OutcomeUnlikely

_DEFAULT_AXIS_SMALL = (-8.0, 8.0, 201)  # 1-2 modes
_DEFAULT_AXIS_BIG = (-6.0, 6.0, 41)  # 4 modes


@dataclass(frozen=True)
class GridAxis:
    """A symmetric uniform grid; the odd point count keeps 0 on the grid."""

    lo: float
    hi: float
    points: int

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi) and self.lo < self.hi):
            raise InvalidInput("need finite lo < hi")
        if self.points < 3 or self.points % 2 == 0:
            raise InvalidInput("points per axis must be odd and at least 3")
        if abs(self.lo + self.hi) > 1e-12 * (abs(self.lo) + abs(self.hi)):
            raise InvalidInput("axis must be symmetric about 0")

    @property
    def nodes(self):
        return np.linspace(self.lo, self.hi, self.points)

    @property
    def spacing(self):
        return (self.hi - self.lo) / (self.points - 1)


@dataclass(frozen=True)
class GridWavefunction:
    """Complex amplitudes over the tensor grid, normalized so that
    ``sum |psi|^2 dx^n = 1``."""

    axis: GridAxis
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim < 1 or amp.ndim > 4:
            raise InvalidInput("between 1 and 4 modes supported")
        if any(s != self.axis.points for s in amp.shape):
            raise InvalidInput("amplitude array shape must match the axis")
        norm2 = float(np.sum(np.abs(amp) ** 2) * self.axis.spacing**amp.ndim)
        if abs(norm2 - 1.0) > 1e-6:
            raise InvalidInput(f"wavefunction norm^2 is {norm2}, not 1")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def n_modes(self):
        return self.amplitudes.ndim


def _local_symplectic_spectrum(cm):
    n = cm.shape[0] // 2
    j = np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    ev = np.abs(np.linalg.eigvals(j @ cm))
    ev.sort()
    return ev[::2]


def _sparse_coords(axis, n):
    nodes = axis.nodes
    return [nodes.reshape((1,) * k + (-1,) + (1,) * (n - 1 - k)) for k in range(n)]


def wavefunction_from_pure(cm, dv, axis):
    """Tabulate the wavefunction of a pure Gaussian state on the grid.

    Raises ``InvalidInput`` for mixed states and ``GridTooSmall`` when the
    grid covers less than 6 standard deviations of some position marginal
    around its mean.
    """
    cm = np.asarray(cm, dtype=float)
    dv = np.asarray(dv, dtype=float)
    if cm.ndim != 2 or cm.shape[0] != cm.shape[1] or cm.shape[0] % 2:
        raise InvalidInput("CM must be square with even dimension")
    n = cm.shape[0] // 2
    if n > 4:
        raise InvalidInput("at most 4 modes on the grid")
    if dv.shape != (2 * n,):
        raise InvalidInput("DV length must match the CM")
    spec = _local_symplectic_spectrum(cm)
    if np.abs(spec - 1.0).max() > 1e-6:
        raise InvalidInput("state is not pure")
    if not isinstance(axis, GridAxis):
        axis = GridAxis(*axis)

    xbar = dv[0::2]
    pbar = dv[1::2]
    for i in range(n):
        sigma = np.sqrt(cm[2 * i, 2 * i] / 2.0)
        if xbar[i] - 6 * sigma < axis.lo or xbar[i] + 6 * sigma > axis.hi:
            raise GridTooSmall(
                f"mode {i}: need at least 6 sigma = {6 * sigma:.3f} around {xbar[i]:.3f}"
            )

    a = cm[0::2, 0::2]
    b = cm[0::2, 1::2]
    u = np.linalg.inv(a)
    v = -u @ b
    v = 0.5 * (v + v.T)
    m = u + 1j * v

    coords = _sparse_coords(axis, n)
    quad = np.zeros((axis.points,) * n, dtype=complex)
    phase = np.zeros((axis.points,) * n)
    for i in range(n):
        yi = coords[i] - xbar[i]
        phase = phase + pbar[i] * coords[i]
        for k in range(n):
            quad = quad + m[i, k] * (yi * (coords[k] - xbar[k]))
    psi = np.exp(-0.5 * quad + 1j * phase)
    norm = np.sqrt(np.sum(np.abs(psi) ** 2) * axis.spacing**n)
    return GridWavefunction(axis, psi / norm)


def grid_overlap(a, b):
    """Inner product ``<a|b>`` by direct summation over the shared grid."""
    if a.axis != b.axis or a.n_modes != b.n_modes:
        raise InvalidInput("wavefunctions live on different grids")
    return complex(np.vdot(a.amplitudes, b.amplitudes) * a.axis.spacing**a.n_modes)


def _snap(axis, x):
    i = int(round((x - axis.lo) / axis.spacing))
    if not 0 <= i < axis.points:
        raise InvalidInput(f"outcome {x} outside the grid")
    node = axis.nodes[i]
    if abs(node - x) > 1e-9:
        warnings.warn(f"outcome {x} snapped to grid node {node}")
    return i


def grid_condition_on_x(psi, measured_axes, outcomes):
    """Slice the amplitudes at the measured coordinates and renormalize.

    Renormalization is by a positive real constant, so relative phases
    between slices of one wavefunction stay physical.
    """
    axes = sorted(set(int(m) for m in measured_axes))
    if any(m < 0 or m >= psi.n_modes for m in axes):
        raise InvalidInput("measured axis out of range")
    if len(axes) == 0 or len(axes) == psi.n_modes:
        raise InvalidInput("measured axes must be a proper non-empty subset")
    outcomes = np.atleast_1d(np.asarray(outcomes, dtype=float))
    if outcomes.shape != (len(axes),):
        raise InvalidInput("need one outcome per measured axis")
    slicer = [slice(None)] * psi.n_modes
    for m, x in zip(axes, outcomes):
        slicer[m] = _snap(psi.axis, x)
    slab = psi.amplitudes[tuple(slicer)]
    rem = psi.n_modes - len(axes)
    norm = np.sqrt(np.sum(np.abs(slab) ** 2) * psi.axis.spacing**rem)
    if norm < 1e-12:
        raise OutcomeUnlikely(f"slice at {outcomes} has norm {norm}")
    return GridWavefunction(psi.axis, slab / norm)


def _momentum_apply(amp, axis, mode):
    # P psi = -i d/dx psi, spectrally accurate for grid-decayed states
    k = 2.0 * np.pi * np.fft.fftfreq(axis.points, d=axis.spacing)
    shape = [1] * amp.ndim
    shape[mode] = axis.points
    ft = np.fft.fft(amp, axis=mode)
    return np.fft.ifft(ft * (1j * k).reshape(shape), axis=mode) * -1j


def grid_moments(psi):
    """Estimate the CM and DV of a grid wavefunction.

    Position moments come from ``|psi|^2`` sums; momentum and cross moments
    from FFT derivatives.  Returns ``(cm, dv)`` in mode-major ordering with
    the vacuum-is-identity normalization.
    """
    n = psi.n_modes
    dxn = psi.axis.spacing**n
    amp = psi.amplitudes
    dens = np.abs(amp) ** 2
    coords = _sparse_coords(psi.axis, n)

    xmean = np.array([float(np.sum(dens * coords[i]) * dxn) for i in range(n)])
    pamps = [_momentum_apply(amp, psi.axis, i) for i in range(n)]
    pmean = np.array([float(np.real(np.vdot(amp, pamps[i])) * dxn) for i in range(n)])

    cm = np.zeros((2 * n, 2 * n))
    for i in range(n):
        yi = coords[i] - xmean[i]
        for k in range(i, n):
            yk = coords[k] - xmean[k]
            cm[2 * i, 2 * k] = cm[2 * k, 2 * i] = 2.0 * float(np.sum(dens * yi * yk) * dxn)
    for i in range(n):
        for k in range(i, n):
            cov = float(np.real(np.vdot(pamps[i], pamps[k])) * dxn) - pmean[i] * pmean[k]
            cm[2 * i + 1, 2 * k + 1] = cm[2 * k + 1, 2 * i + 1] = 2.0 * cov
    for i in range(n):
        for k in range(n):
            raw = float(np.real(np.vdot(amp, coords[i] * pamps[k])) * dxn)
            cm[2 * i, 2 * k + 1] = cm[2 * k + 1, 2 * i] = 2.0 * (raw - xmean[i] * pmean[k])

    dv = np.empty(2 * n)
    dv[0::2] = xmean
    dv[1::2] = pmean
    return cm, dv


def grid_reduced_spectrum(psi, x0):
    """Eigenvalues of the effective postselected two-qubit state, from the
    grid alone.

    ``psi`` must be the 4-mode purification with the honest modes first.
    Zero-width postselection slices the amplitudes at the four sign
    combinations of ``(+-x0, +-x0)``; squared slice norms give the sector
    probabilities, normalized slices the conditional adversary states, and
    ``rho[s, t] = c_s c_t <e_t|e_s>`` the reduced state.  Ascending
    eigenvalues are returned.
    """
    if psi.n_modes != 4:
        raise InvalidInput("need the 4-mode purification")
    if not x0 > 0:
        raise InvalidInput("x0 must be positive")
    signs = ((x0, x0), (-x0, -x0), (x0, -x0), (-x0, x0))
    dx = psi.axis.spacing
    weights = []
    slices = []
    for sa, sb in signs:
        ia, ib = _snap(psi.axis, sa), _snap(psi.axis, sb)
        slab = psi.amplitudes[ia, ib]
        w = float(np.sum(np.abs(slab) ** 2) * dx**2)
        if w < 1e-300:
            raise OutcomeUnlikely(f"sector ({sa}, {sb}) has no support on the grid")
        weights.append(w)
        slices.append(slab / np.sqrt(w))
    c = np.sqrt(np.array(weights) / sum(weights))
    rho = np.empty((4, 4), dtype=complex)
    for s in range(4):
        for t in range(4):
            rho[s, t] = c[s] * c[t] * np.vdot(slices[t], slices[s]) * dx**2
    w, _ = matkit.eigh(rho)
    return w
