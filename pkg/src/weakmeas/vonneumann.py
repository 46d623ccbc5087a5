"""Joint evolution of a system with one or two measuring devices.

The interaction Hamiltonian g A pi displaces the coupled pointer by
g*t*a in each eigenbranch a of the observable, so exact evolution is an
eigendecomposition followed by per-branch Fourier translations.  The full
device density matrix is never materialized; only its position (or
momentum) diagonal and low moments are ever needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import pointer as _pointer
from . import qmath
from .errors import DimensionError, GridExtentError, MissingAxisError, NormalizationError
from .pointer import PointerGrid

STATE_NORM_ACCURACY = 1e-10


@dataclass(frozen=True)
class CouplingSpec:
    """One von Neumann coupling: observable, displacement scale g*t, target axis."""

    observable: np.ndarray
    strength: float
    pointer_axis: int = 0

    def __post_init__(self):
        obs = qmath.operator(self.observable)
        object.__setattr__(self, "observable", obs)
        if not math.isfinite(self.strength):
            raise ValueError(f"coupling strength must be finite, got {self.strength}")


@dataclass(frozen=True)
class JointState:
    """System tensor devices amplitude tensor of shape d x n_1 (x n_2).

    States produced by initial_state and evolve_exact carry total norm 1
    within 1e-10; evolve_first_order intentionally returns the truncated,
    unnormalized state.
    """

    system_dim: int
    pointers: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        pts = tuple(self.pointers)
        if not 1 <= len(pts) <= 2:
            raise MissingAxisError(f"need one or two device axes, got {len(pts)}")
        for p in pts:
            if not isinstance(p, PointerGrid):
                raise DimensionError("pointer axes must be PointerGrid descriptors")
        hbars = {p.hbar for p in pts}
        if len(hbars) != 1:
            raise ValueError(f"pointers disagree on hbar: {sorted(hbars)}")
        amps = np.array(self.amplitudes, dtype=complex)
        expected = (self.system_dim,) + tuple(p.n_points for p in pts)
        if amps.shape != expected:
            raise DimensionError(f"amplitude shape {amps.shape}, expected {expected}")
        amps.setflags(write=False)
        object.__setattr__(self, "pointers", pts)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def hbar(self) -> float:
        return self.pointers[0].hbar

    @property
    def measure(self) -> float:
        """Product of the grid spacings, the quadrature weight of one cell."""
        out = 1.0
        for p in self.pointers:
            out *= p.dx
        return out


def total_norm(s: JointState) -> float:
    return float(np.sqrt(np.sum(np.abs(s.amplitudes) ** 2) * s.measure))


def initial_state(system, pointers: Sequence[PointerGrid]) -> JointState:
    """Product state |I> |phi_1> (|phi_2>) of system and fresh devices."""
    sys_vec = qmath.require_normalized(system, STATE_NORM_ACCURACY, "system state")
    amps = sys_vec
    for p in pointers:
        amps = np.multiply.outer(amps, p.amplitudes)
    return JointState(sys_vec.size, tuple(pointers), amps)


def _check_coupling(s: JointState, c: CouplingSpec) -> int:
    if c.observable.shape[0] != s.system_dim:
        raise DimensionError(
            f"observable dim {c.observable.shape[0]} does not match system dim {s.system_dim}"
        )
    if not 0 <= c.pointer_axis < len(s.pointers):
        raise MissingAxisError(
            f"pointer_axis {c.pointer_axis} not present ({len(s.pointers)} device axes)"
        )
    return 1 + c.pointer_axis


def evolve_exact(s: JointState, c: CouplingSpec) -> JointState:
    """Exact unitary action of exp(-i strength A pi / hbar).

    The observable is split into eigenbranches; the target pointer is
    translated by strength*eigenvalue inside each branch.  Norm is
    preserved within 1e-10.
    """
    axis = _check_coupling(s, c)
    grid = s.pointers[c.pointer_axis]
    dec = qmath.herm_eig(c.observable)
    worst = float(np.max(np.abs(dec.eigenvalues))) * abs(c.strength)
    if worst + _pointer.SHIFT_GUARD_SIGMAS * grid.sigma > grid.extent / 2:
        raise GridExtentError(
            f"branch shift {worst} plus {_pointer.SHIFT_GUARD_SIGMAS} sigma exceeds "
            f"extent/2 = {grid.extent / 2} on device axis {c.pointer_axis}"
        )
    # rotate the system index into the eigenbasis, translate every branch at
    # once in Fourier space, rotate back
    u = dec.eigenvectors
    amps = np.tensordot(u.conj().T, s.amplitudes, axes=(1, 0))
    ft = np.fft.fft(amps, axis=axis)
    momenta = _pointer.fft_momenta(grid.n_points, grid.extent, grid.hbar)
    phase = np.exp(
        -1j * np.multiply.outer(c.strength * dec.eigenvalues, momenta) / grid.hbar
    )
    shape = [s.system_dim] + [1] * (s.amplitudes.ndim - 1)
    shape[axis] = grid.n_points
    ft *= phase.reshape(shape)
    amps = np.fft.ifft(ft, axis=axis)
    amps = np.tensordot(u, amps, axes=(1, 0))
    return JointState(s.system_dim, s.pointers, amps)


def evolve_first_order(s: JointState, c: CouplingSpec) -> JointState:
    """Truncated evolution |Phi> - (i strength/hbar) (A x pi) |Phi>.

    Deliberately not renormalized; the norm exceeds 1 at second order in
    the strength.  Diagnostic only, never used for sampling.
    """
    axis = _check_coupling(s, c)
    grid = s.pointers[c.pointer_axis]
    a_amps = np.tensordot(c.observable, s.amplitudes, axes=(1, 0))
    momenta = _pointer.fft_momenta(grid.n_points, grid.extent, grid.hbar)
    shape = [1] * s.amplitudes.ndim
    shape[axis] = grid.n_points
    pi_a_amps = np.fft.ifft(momenta.reshape(shape) * np.fft.fft(a_amps, axis=axis), axis=axis)
    return JointState(
        s.system_dim, s.pointers, s.amplitudes - 1j * c.strength / grid.hbar * pi_a_amps
    )


def _require_two_axes(s: JointState) -> None:
    if len(s.pointers) != 2:
        raise MissingAxisError(f"need two device axes, state has {len(s.pointers)}")


def device_density(s: JointState) -> np.ndarray:
    """Joint position density P(x_1, x_2) = sum_s |Psi|^2 on the grid.

    This is the position diagonal of the devices' partial density matrix;
    sum P dx_1 dx_2 = 1.
    """
    _require_two_axes(s)
    return np.sum(np.abs(s.amplitudes) ** 2, axis=0)


def device_momentum_density(s: JointState) -> np.ndarray:
    """Joint density P(pi_1, x_2) with the first device axis Fourier-transformed.

    Rows follow pointer.momentum_values(first device) in ascending order;
    sum P dp_1 dx_2 = 1.
    """
    _require_two_axes(s)
    grid = s.pointers[0]
    n = grid.n_points
    phase = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    ft = np.fft.fft(s.amplitudes, axis=1) * phase[None, :, None]
    ft *= grid.dx / np.sqrt(2 * np.pi * grid.hbar)
    ft = np.fft.fftshift(ft, axes=1)
    return np.sum(np.abs(ft) ** 2, axis=0)


def mean_pointer(s: JointState, axis: int = 0) -> float:
    """Quadrature mean position of one device axis."""
    if not 0 <= axis < len(s.pointers):
        raise MissingAxisError(f"axis {axis} not present ({len(s.pointers)} device axes)")
    marginal = np.sum(np.abs(s.amplitudes) ** 2, axis=0)
    other = tuple(i for i in range(len(s.pointers)) if i != axis)
    marginal = marginal.sum(axis=other)
    x = s.pointers[axis].positions
    return float(np.sum(marginal * x) * s.measure)


def position_correlation(s: JointState) -> float:
    """Exact first moment <x_1 x_2> against the joint device density."""
    _require_two_axes(s)
    p = device_density(s)
    x1 = s.pointers[0].positions
    x2 = s.pointers[1].positions
    return float(np.einsum("ab,a,b->", p, x1, x2) * s.measure)
