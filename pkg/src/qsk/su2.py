"""Exact 2x2 unitary linear algebra: rotations, Bloch coordinates, operator distances.

Conventions used throughout the package:

- A unitary is a plain ``numpy`` array of shape (2, 2), dtype complex128.
- ``rotation_about(axis, angle)`` returns cos(angle/2) I + i sin(angle/2) (n.sigma),
  so ``rotation_y(theta) == rotation_about((0, 1, 0), 2 * theta)`` holds exactly and
  a stream rotation by matrix angle theta moves the Bloch vector by 2 theta.
- Operator distances come in two flavours: ``dist_spectral`` (largest singular
  value of the difference) and ``dist_projective`` (the same, minimised over a
  global phase). Gate words realise a target only up to phase, so synthesis and
  measurement comparisons use the projective distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UNITARY_TOL = 1e-12

# Re-orthonormalise long products every this many factors: keeps the unitarity
# drift of 1e5-length chains well under UNITARY_TOL (drift alone is a random
# walk of ~sqrt(n) ulps, but the periodic cleanup removes any doubt).
RENORM_INTERVAL = 512

IDENTITY = np.eye(2, dtype=complex)

_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
_SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (_SIGMA_X, _SIGMA_Y, _SIGMA_Z)


@dataclass(frozen=True)
class BlochPoint:
    """Point (theta, phi) on the Bloch sphere; theta in [0, pi], phi in [0, 2*pi)."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise ValueError(f"theta {self.theta} outside [0, pi]")
        if not (0.0 <= self.phi < 2.0 * math.pi):
            raise ValueError(f"phi {self.phi} outside [0, 2*pi)")


@dataclass(frozen=True)
class AxisAngle:
    """Rotation axis (unit 3-vector) and angle in [0, 2*pi)."""

    axis: tuple[float, float, float]
    angle: float

    def __post_init__(self):
        norm = math.sqrt(sum(a * a for a in self.axis))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"axis norm {norm} != 1")
        if not (0.0 <= self.angle < 2.0 * math.pi):
            raise ValueError(f"angle {self.angle} outside [0, 2*pi)")


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    """Check ||U^dag U - I||_sp <= tol and |det U| = 1 +- tol."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not (np.isfinite(u.real).all() and np.isfinite(u.imag).all()):
        return False
    defect = np.linalg.norm(u.conj().T @ u - IDENTITY, ord=2)
    return defect <= tol and abs(abs(np.linalg.det(u)) - 1.0) <= tol


def assert_unitary(u, what: str = "matrix") -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise ValueError(f"{what} is not unitary within {UNITARY_TOL}")
    return u


def renormalize(u) -> np.ndarray:
    """Project a slightly drifted product back onto the unitary group.

    Gram-Schmidt on the columns; exact unitaries pass through unchanged up to
    rounding. Callers that chain many products use this periodically.
    """
    u = np.asarray(u, dtype=complex)
    c0 = u[:, 0]
    c0 = c0 / np.linalg.norm(c0)
    c1 = u[:, 1] - (c0.conj() @ u[:, 1]) * c0
    c1 = c1 / np.linalg.norm(c1)
    return np.column_stack([c0, c1])


def product(factors) -> np.ndarray:
    """Multiply unitaries left to right with periodic re-orthonormalisation."""
    acc = IDENTITY
    for k, f in enumerate(factors, start=1):
        acc = acc @ f
        if k % RENORM_INTERVAL == 0:
            acc = renormalize(acc)
    return renormalize(acc)


def rotation_y(theta: float) -> np.ndarray:
    """The stream rotation [[cos t, sin t], [-sin t, cos t]] (Bloch angle 2t about y)."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex)


def rotation_about(axis, angle: float) -> np.ndarray:
    """Rotation by `angle` about unit 3-vector `axis`: cos(a/2) I + i sin(a/2) (n.sigma)."""
    n = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(n)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"axis must be a unit vector, got norm {norm}")
    n = n / norm
    half = 0.5 * angle
    c, s = math.cos(half), math.sin(half)
    return c * IDENTITY + 1j * s * (n[0] * _SIGMA_X + n[1] * _SIGMA_Y + n[2] * _SIGMA_Z)


def to_su2(u) -> np.ndarray:
    """Strip the global phase so det = 1 (principal branch of sqrt(det))."""
    u = np.asarray(u, dtype=complex)
    det = np.linalg.det(u)
    return u / np.sqrt(det)


def dist_spectral(u, v) -> float:
    """Largest singular value of U - V.

    Computed from the Gram matrix (U-V)^dag (U-V), which is identical for both
    argument orders, so the metric is symmetric to the bit.
    """
    d = np.asarray(u, dtype=complex) - np.asarray(v, dtype=complex)
    gram = d.conj().T @ d
    lam = np.linalg.eigvalsh(gram)[-1]
    return math.sqrt(max(lam.real, 0.0))


def dist_projective(u, v) -> float:
    """min over phases phi of dist_spectral(U, e^{i phi} V).

    For 2x2 unitaries the minimum has the closed form sqrt(2 - |tr(U^dag V)|):
    the eigenphases of U^dag V sit a minor arc d apart with |tr| = 2 cos(d/2),
    and the best phase lands midway, at chord 2 sin(d/4). The closed form
    cancels catastrophically for nearly equal arguments, so small distances are
    instead computed from the explicit difference at the optimal phase
    e^{i phi*} = e^{-i arg tr(U^dag V)}, which is exact whenever |tr| >= 1.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    tr = np.trace(u.conj().T @ v)
    t = abs(tr)
    if t < 1.0:
        return math.sqrt(max(2.0 - t, 0.0))
    return dist_spectral(u, (tr / t).conjugate() * v)


def to_axis_angle(u) -> AxisAngle:
    """Axis and angle of the special-unitary representative of U (phase stripped).

    The representative with nonnegative half-trace is chosen, so the angle lies
    in [0, pi] and equals the projective rotation angle. Near the identity the
    angle comes from atan2 of the off-trace components, not arccos of the
    half-trace, which would be ill-conditioned there. Identity canonicalises to
    axis (0, 0, 1), angle 0.
    """
    s = to_su2(assert_unitary(u))
    c = 0.5 * (s[0, 0] + s[1, 1]).real
    vec = np.array(
        [
            0.5 * (s[0, 1] + s[1, 0]).imag,
            0.5 * (s[0, 1] - s[1, 0]).real,
            0.5 * (s[0, 0] - s[1, 1]).imag,
        ]
    )
    if c < 0.0:
        c, vec = -c, -vec
    sin_half = np.linalg.norm(vec)
    if sin_half < 1e-15:
        return AxisAngle((0.0, 0.0, 1.0), 0.0)
    axis = vec / sin_half
    angle = 2.0 * math.atan2(sin_half, c)
    if angle >= 2.0 * math.pi:
        angle = 0.0
    return AxisAngle((axis[0], axis[1], axis[2]), angle)


def from_axis_angle(aa: AxisAngle) -> np.ndarray:
    return rotation_about(aa.axis, aa.angle)


def bloch_to_state(point: BlochPoint) -> np.ndarray:
    """Column vector (cos(theta/2), e^{i phi} sin(theta/2))."""
    half = 0.5 * point.theta
    return np.array([math.cos(half), math.sin(half) * np.exp(1j * point.phi)])


def state_to_bloch(state) -> BlochPoint:
    """Bloch coordinates of a normalised single-qubit state; poles canonicalised."""
    a0, a1 = complex(state[0]), complex(state[1])
    norm = math.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"state norm {norm} != 1")
    theta = 2.0 * math.atan2(abs(a1), abs(a0))
    if theta < 1e-15:
        return BlochPoint(0.0, 0.0)
    if theta > math.pi - 1e-15:
        return BlochPoint(math.pi, 0.0)
    phi = math.atan2(a1.imag, a1.real) - math.atan2(a0.imag, a0.real)
    phi %= 2.0 * math.pi
    return BlochPoint(theta, phi)


def haar_sample(count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of `count` Haar-random U(2) matrices, shape (count, 2, 2).

    Batched QR of complex Ginibre matrices, with the R diagonal phases folded
    back in so the distribution is exactly Haar. Each matrix consumes a
    contiguous block of the generator stream, so a shorter sample is a prefix
    of a longer one drawn from the same seed.
    """
    draws = rng.normal(size=(count, 2, 2, 2))
    z = draws[..., 0] + 1j * draws[..., 1]
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def haar_unitary(rng: np.random.Generator) -> np.ndarray:
    """Single Haar-random U(2) matrix."""
    return haar_sample(1, rng)[0]
