"""Problem generators: relative camera motion from five matches and the
flap-angle system of a six-atom cyclic molecule."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from .poly import LaurentPolynomial, PolySystem

CAMERA_NAMES = ("q1", "q2", "q3", "d1", "d2", "d3")
MOLECULE_NAMES = ("t1", "t2", "t3")

# (j, k) variable pair of each molecule equation, 1-based.
MOLECULE_PAIRS = ((2, 3), (3, 1), (1, 2))

MOLECULE_90 = ((-9, -1, -1, 3, 8),) * 3
CYCLOHEXANE = ((-310, 959, 774, 1313, 1389),
               (-365, 755, 917, 1269, 1451),
               (-413, 837, 838, 1352, 1655))
MOLECULE_16 = ((-13, -1, -1, -1, 24),) * 3
MOLECULE_90_ROOTS = ((1, 1, 1), (5, -1, -1), (-1, 5, -1), (-1, -1, 5),
                     (-1, -1, -1), (-5, 1, 1), (1, -5, 1), (1, 1, -5))

DEGENERATE_ANGLE = 60.00145558
DEGENERATE_TRANSLATION = (0.01, 0.01, -1.0)


# --------------------------------------------------------------------------
# camera motion

@dataclass(frozen=True)
class MotionInstance:
    """Five matches ``a[i] <-> ap[i]`` (homogeneous image points).

    With a planted motion, a scene point ``P`` in the first frame appears
    as ``ap ~ R^T (P - t)`` in the second, so ``a . (t x R ap) = 0``.
    """

    a: np.ndarray
    ap: np.ndarray
    R: np.ndarray | None = None
    t: np.ndarray | None = None

    def __post_init__(self):
        if np.shape(self.a) != (5, 3) or np.shape(self.ap) != (5, 3):
            raise ValueError("a motion instance has five 3-vector pairs")


def camera_polynomials(a, ap) -> LaurentPolynomial:
    """Bilinear equation of one match in ``(q, d)``.

    Expanding ``(a.q)(d'.ap) + a.ap + (a x q).ap + (a x q).(d' x ap)
    + a.(d' x ap)`` at ``d' = -d`` gives
    ``a.ap + (ap x a).q - (ap x a).d - sum_ij (a_i ap_j + a_j ap_i - (a.ap) [i=j]) q_i d_j``.
    """
    a = [Fraction(x) for x in a]
    ap = [Fraction(x) for x in ap]
    dot = sum(x * y for x, y in zip(a, ap))
    w = (ap[1] * a[2] - ap[2] * a[1], ap[2] * a[0] - ap[0] * a[2], ap[0] * a[1] - ap[1] * a[0])
    terms: dict[tuple[int, ...], Fraction] = {(0,) * 6: dot}
    for i in range(3):
        e = [0] * 6
        e[i] = 1
        terms[tuple(e)] = w[i]
        e = [0] * 6
        e[3 + i] = 1
        terms[tuple(e)] = -w[i]
    for i in range(3):
        for j in range(3):
            e = [0] * 6
            e[i] = e[3 + j] = 1
            terms[tuple(e)] = -(a[i] * ap[j] + a[j] * ap[i] - (dot if i == j else 0))
    return LaurentPolynomial(terms, 6)


def camera_system(inst: MotionInstance) -> PolySystem:
    """Six polynomials in ``q1..q3, d1..d3``.

    ``q`` is the rotation quaternion divided by its scalar part and ``d``
    comes from the product of translation and rotation quaternions; the
    last polynomial is ``1 - d.q``.
    """
    polys = [camera_polynomials(inst.a[i], inst.ap[i]) for i in range(5)]
    last = {(0,) * 6: Fraction(1)}
    for i in range(3):
        e = [0] * 6
        e[i] = e[3 + i] = 1
        last[tuple(e)] = Fraction(-1)
    polys.append(LaurentPolynomial(last, 6))
    labels = tuple(f"m{i + 1}" for i in range(5)) + ("norm",)
    return PolySystem(tuple(polys), CAMERA_NAMES, labels)


def _qmul(p, q) -> np.ndarray:
    p0, pv = p[0], np.asarray(p[1:])
    q0, qv = q[0], np.asarray(q[1:])
    return np.concatenate([[p0 * q0 - pv @ qv], p0 * qv + q0 * pv + np.cross(pv, qv)])


def motion_to_qd(R, t) -> np.ndarray:
    """The ``(q, d)`` root of :func:`camera_system` for a motion."""
    x, y, z, w = Rotation.from_matrix(R).as_quat()
    if abs(w) < 1e-12:
        raise ValueError("rotation by 180 degrees has no finite q")
    q = np.array([x, y, z]) / w
    D = _qmul(np.concatenate([[0.0], t]), np.concatenate([[1.0], q]))
    if abs(D[0]) < 1e-12:
        raise ValueError("translation orthogonal to the rotation axis has no finite d")
    d = -D[1:] / D[0]
    return np.concatenate([q, d])


def qd_to_motion(qd) -> tuple[np.ndarray, np.ndarray]:
    """Rotation and unit translation (up to sign) for a real ``(q, d)``."""
    qd = np.real(np.asarray(qd, dtype=complex))
    q, d = qd[:3], qd[3:]
    quat = np.concatenate([q, [1.0]])
    R = Rotation.from_quat(quat / np.linalg.norm(quat)).as_matrix()
    conj = np.concatenate([[1.0], -q])
    T = _qmul(np.concatenate([[1.0], -d]), conj)
    t = T[1:]
    norm = np.linalg.norm(t)
    return R, (t / norm if norm > 0 else t)


def motion_error(R, t, inst: MotionInstance) -> float:
    """``sum_i |a_i . (t x R ap_i)| / (|a_i| |ap_i|)``; zero for the true motion."""
    R = np.asarray(R, dtype=float)
    t = np.asarray(t, dtype=float)
    total = 0.0
    for a, ap in zip(inst.a, inst.ap):
        total += abs(a @ np.cross(t, R @ ap)) / (np.linalg.norm(a) * np.linalg.norm(ap))
    return float(total)


def _project(R, t, rng, min_depth: float, max_tries: int = 1000):
    a = np.empty((5, 3))
    ap = np.empty((5, 3))
    for i in range(5):
        for _ in range(max_tries):
            P = np.array([rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(2, 6)])
            P2 = R.T @ (P - t)
            if P2[2] > min_depth:
                a[i] = P / P[2]
                ap[i] = P2 / P2[2]
                break
        else:
            return None
    return a, ap


def plant_motion(seed: int, min_depth: float = 0.5) -> MotionInstance:
    """Random rotation and unit translation with five visible scene points.

    Points are resampled until they lie at depth above ``min_depth`` in
    both frames; rotations that put the second camera looking away are
    redrawn.
    """
    rng = np.random.default_rng(seed)
    while True:
        R = Rotation.random(random_state=rng).as_matrix()
        t = rng.normal(size=3)
        t /= np.linalg.norm(t)
        try:
            motion_to_qd(R, t)
        except ValueError:
            continue
        pts = _project(R, t, rng, min_depth, max_tries=200)
        if pts is not None:
            return MotionInstance(pts[0], pts[1], R, t)


def degenerate_motion(seed: int = 0) -> MotionInstance:
    """Rotation of 60.00145558 degrees about z, translation along (.01, .01, -1)."""
    rng = np.random.default_rng(seed)
    R = Rotation.from_euler("z", DEGENERATE_ANGLE, degrees=True).as_matrix()
    t = np.array(DEGENERATE_TRANSLATION)
    t /= np.linalg.norm(t)
    pts = _project(R, t, rng, 0.5)
    return MotionInstance(pts[0], pts[1], R, t)


# --------------------------------------------------------------------------
# cyclic molecule

@dataclass(frozen=True)
class MoleculeInstance:
    beta: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.beta)
        if len(rows) != 3 or any(len(r) != 5 for r in rows):
            raise ValueError("beta is a 3x5 matrix")
        object.__setattr__(self, "beta", rows)


def molecule_system(inst: MoleculeInstance | Sequence[Sequence]) -> PolySystem:
    """``f_i = b1 + b2 tj^2 + b3 tk^2 + b4 tj^2 tk^2 + b5 tj tk``."""
    if not isinstance(inst, MoleculeInstance):
        inst = MoleculeInstance(inst)
    polys = []
    for row, (j, k) in zip(inst.beta, MOLECULE_PAIRS):
        j, k = j - 1, k - 1
        terms = {}
        for (ej, ek), c in zip(((0, 0), (2, 0), (0, 2), (2, 2), (1, 1)), row):
            e = [0, 0, 0]
            e[j], e[k] = ej, ek
            terms[tuple(e)] = c
        polys.append(LaurentPolynomial(terms, 3))
    return PolySystem(tuple(polys), MOLECULE_NAMES, ("f1", "f2", "f3"))


def trig_to_halfangle(alpha: Sequence[Sequence], scale=1) -> MoleculeInstance:
    """Coefficients of the angle system
    ``a1 + a2 cos tj + a3 cos tk + a4 cos tj cos tk + a5 sin tj sin tk``
    to the half-angle system, multiplied through by ``(1+tj^2)(1+tk^2)``
    and by ``scale``.
    """
    beta = []
    for row in alpha:
        a1, a2, a3, a4, a5 = (Fraction(x) * Fraction(scale) for x in row)
        beta.append((a1 + a2 + a3 + a4, a1 - a2 + a3 - a4, a1 + a2 - a3 - a4,
                     a1 - a2 - a3 + a4, 4 * a5))
    return MoleculeInstance(tuple(beta))


def angle_system_residuals(alpha: Sequence[Sequence], theta: Sequence[float]) -> list[float]:
    """Values of the three angle equations at ``theta`` (radians)."""
    out = []
    for row, (j, k) in zip(alpha, MOLECULE_PAIRS):
        a1, a2, a3, a4, a5 = (float(x) for x in row)
        cj, ck = math.cos(theta[j - 1]), math.cos(theta[k - 1])
        sj, sk = math.sin(theta[j - 1]), math.sin(theta[k - 1])
        out.append(a1 + a2 * cj + a3 * ck + a4 * cj * ck + a5 * sj * sk)
    return out


def halfangle_to_angles(t: Sequence[float]) -> list[float]:
    return [2 * math.atan(x) for x in t]
