"""One angular-momentum channel ``h_m`` on a radial mesh.

The channel form ``int (|v'|^2 + (m - Phi)^2 / r^2 |v|^2 - Vt |v|^2) r dr`` is
discretised with r-weighted two-point stiffness and lumped masses
``M_i = int_{cell i} r dr``. Rescaling ``u_i = sqrt(M_i) v_i`` (the discrete
counterpart of ``u = sqrt(r) v``) turns the generalised problem into a
standard symmetric tridiagonal one. The ``-1/(4 r^2)`` Liouville term of the
continuous flat operator is carried implicitly by the rescaled stiffness.

For ``m = 0`` the node ``r = 0`` is kept as an unknown (regular solutions
need not vanish there); for ``m != 0`` it is a Dirichlet node. ``r = 1`` is
always Dirichlet.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MeshUnsuitable
from .field import FluxProfile, flux
from .numerics import SymTridiag, eigs_below, lowest_eig
from .potential import TildePotential

DEFAULT_CAP = 1e12
MESH_KINDS = ("uniform", "graded")


@dataclass(frozen=True)
class Mesh:
    nodes: np.ndarray
    kind: str
    strength: float = 0.0

    def __post_init__(self):
        r = np.asarray(self.nodes, dtype=float)
        if r.ndim != 1 or r.size < 1:
            raise ValueError("mesh needs at least one node")
        if not (r[0] > 0 and r[-1] < 1 and np.all(np.diff(r) > 0)):
            raise ValueError("mesh nodes must increase strictly inside (0, 1)")
        r.setflags(write=False)
        object.__setattr__(self, "nodes", r)

    @property
    def n(self) -> int:
        return self.nodes.size


@dataclass(frozen=True)
class MeshConfig:
    n: int = 2048
    kind: str = "graded"
    strength: float = 2.0

    def build(self) -> Mesh:
        return build_mesh(self.n, self.kind, self.strength)

    def refined(self, factor: int = 2) -> "MeshConfig":
        return MeshConfig(self.n * factor, self.kind, self.strength)


def build_mesh(n: int, kind: str = "uniform", strength: float = 2.0) -> Mesh:
    """Mesh of ``n`` interior nodes.

    ``uniform`` nodes are ``i / (n + 1)``. ``graded`` maps those through
    ``r = 1 - (1 - x)**(1 + strength)``, so every dyadic shell
    ``1 - r in [2**-(k+1), 2**-k]`` keeps a share of nodes that decays only
    like ``2**(-k / (1 + strength))``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    x = np.arange(1, n + 1) / (n + 1.0)
    if kind == "uniform":
        return Mesh(x, kind, 0.0)
    if kind == "graded":
        if strength <= 0:
            raise ValueError("grading strength must be positive")
        # 1 - (1 - x)^p computed without cancellation near x = 0
        r = -np.expm1((1.0 + strength) * np.log1p(-x))
        return Mesh(r, kind, float(strength))
    raise ValueError(f"unknown mesh kind {kind!r}; expected one of {MESH_KINDS}")


def effective_potential(m: int, fp: FluxProfile | None, tp: TildePotential, r):
    """Flat-space channel potential ``(m - Phi)^2 / r^2 - 1 / (4 r^2) - Vt(r)``."""
    r = np.asarray(r, dtype=float)
    phi = 0.0 if fp is None else flux(fp.field, r)
    return (m - phi) ** 2 / r**2 - 0.25 / r**2 - tp(r)


@dataclass(frozen=True)
class ChannelMatrix:
    """Discretised ``h_m`` acting on ``u = sqrt(2 pi r) v`` with flat measure ``dr``.

    ``matrix = kinetic + diag(magnetic - vtilde)``. On nodes with ``r > 0``
    the diagonal of ``matrix`` minus that of the flat Laplacian part equals
    the effective potential ``(m - Phi)^2/r^2 - 1/(4r^2) - Vt``, where the
    flat part is ``kinetic + 1/(4r^2)``.
    """

    m: int
    mesh: Mesh
    nodes: np.ndarray
    mass: np.ndarray
    kinetic_diag: np.ndarray
    kinetic_off: np.ndarray
    magnetic: np.ndarray
    vtilde: np.ndarray
    matrix: SymTridiag
    transform: str = "u = sqrt(2 pi r) v; flat measure dr"

    @property
    def effective(self) -> np.ndarray:
        r = self.nodes
        with np.errstate(divide="ignore"):
            return self.magnetic - 0.25 / r**2 - self.vtilde


def _check_mesh(fp: FluxProfile | None, mesh: Mesh) -> None:
    if fp is not None and fp.field.alpha >= 1 and mesh.kind != "graded":
        raise MeshUnsuitable(
            f"alpha = {fp.field.alpha} >= 1 needs a boundary-graded mesh to resolve the boundary layer")
    if mesh.n < 16:
        raise MeshUnsuitable("assembly needs at least 16 mesh nodes")


def _kinetic(keep_origin: bool, mesh: Mesh):
    r = mesh.nodes
    pts = np.concatenate([[0.0], r, [1.0]])
    h = np.diff(pts)
    w = 0.5 * (pts[:-1] + pts[1:]) / h  # r-weighted edge stiffness
    c = 0.5 * (pts[:-1] + pts[1:])  # dual-cell boundaries
    mass = 0.5 * (c[1:] ** 2 - c[:-1] ** 2)
    kd = w[:-1] + w[1:]
    ko = -w[1:-1]
    nodes = r
    if keep_origin:
        mass = np.concatenate([[0.5 * c[0] ** 2], mass])
        kd = np.concatenate([[w[0]], kd])
        ko = np.concatenate([[-w[0]], ko])
        nodes = np.concatenate([[0.0], r])
    s = 1.0 / np.sqrt(mass)
    return nodes, mass, kd * s * s, ko * s[:-1] * s[1:]


class ChannelFactory:
    """Assembles channels for one ``(field, potential, mesh)``.

    Flux, potential and both kinetic variants are evaluated once at the mesh
    nodes and shared by every ``m``.
    """

    def __init__(self, fp: FluxProfile | None, tp: TildePotential, mesh: Mesh, cap: float = DEFAULT_CAP):
        _check_mesh(fp, mesh)
        self.fp, self.tp, self.mesh, self.cap = fp, tp, mesh, cap
        self._kin = {False: _kinetic(False, mesh), True: _kinetic(True, mesh)}
        origin_nodes = self._kin[True][0]
        self._phi = np.zeros(origin_nodes.size) if fp is None else flux(fp.field, origin_nodes)
        self._vt = np.asarray(tp(origin_nodes), dtype=float)
        self._inv_r = np.zeros(origin_nodes.size)
        self._inv_r[1:] = 1.0 / origin_nodes[1:]

    def _magnetic(self, m: int, keep: bool, magnetic: bool = True) -> np.ndarray:
        sl = slice(0, None) if keep else slice(1, None)
        phi = self._phi[sl] if magnetic else 0.0
        out = ((m - phi) * self._inv_r[sl]) ** 2
        return np.minimum(out, self.cap)

    def assemble(self, m: int) -> ChannelMatrix:
        keep = m == 0
        nodes, mass, kd, ko = self._kin[keep]
        mag = self._magnetic(m, keep)
        vt = self._vt if keep else self._vt[1:]
        mat = SymTridiag(kd + mag - vt, ko)
        return ChannelMatrix(m, self.mesh, nodes, mass, kd, ko, mag, vt, mat)

    def comparison(self, m: int, gamma: float) -> SymTridiag:
        if not 0 < gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        keep = m == 0
        _, _, kd, ko = self._kin[keep]
        mag_b = self._magnetic(m, keep)
        mag_0 = self._magnetic(m, keep, magnetic=False)
        return SymTridiag((1.0 - gamma) * kd + (mag_b - gamma * mag_0), (1.0 - gamma) * ko)


def assemble(m: int, fp: FluxProfile | None, tp: TildePotential, mesh: Mesh,
             cap: float = DEFAULT_CAP) -> ChannelMatrix:
    """Symmetric tridiagonal discretisation of ``h_m(B, Vt)``.

    ``fp=None`` gives the non-magnetic channel ``h_m(0, Vt)``.

    Raises
    ------
    MeshUnsuitable
        If ``alpha >= 1`` and the mesh is not boundary-graded.
    """
    return ChannelFactory(fp, tp, mesh, cap).assemble(m)


def negative_eigs(cm: ChannelMatrix, tol: float = 1e-10) -> np.ndarray:
    """Eigenvalues below zero, ascending."""
    return eigs_below(cm.matrix, 0.0, tol)


def lowest_eigenvalue(cm: ChannelMatrix, tol: float = 1e-10) -> float:
    return lowest_eig(cm.matrix, tol)


def comparison_matrix(m: int, fp: FluxProfile | None, tp: TildePotential, mesh: Mesh, gamma: float,
                      cap: float = DEFAULT_CAP) -> SymTridiag:
    """``H_B - gamma H_0`` with ``H_B = h_m(B, Vt)`` and ``H_0 = h_m(0, Vt / gamma)``.

    The potential terms cancel identically, leaving
    ``(1 - gamma) kinetic + diag(mag_B - gamma mag_0)``; the cap is applied
    to both magnetic terms before subtracting, which preserves their order.
    """
    return ChannelFactory(fp, tp, mesh, cap).comparison(m, gamma)


def comparison_gap(m: int, fp: FluxProfile | None, tp: TildePotential, mesh: Mesh, gamma: float,
                   tol: float = 1e-10, cap: float = DEFAULT_CAP) -> float:
    """Smallest eigenvalue of ``H_B - gamma H_0``; nonnegative when the form comparison holds."""
    return lowest_eig(comparison_matrix(m, fp, tp, mesh, gamma, cap), tol)
