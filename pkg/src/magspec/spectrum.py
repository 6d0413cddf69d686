"""Full negative spectrum as a direct sum over angular-momentum channels."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import DEFAULT_CAP, ChannelFactory, MeshConfig
from .field import FluxProfile
from .numerics import eigs_below
from .potential import TildePotential, moment


def semiclassical_constant(sigma: float, d: int = 2) -> float:
    """``L^cl_{sigma,d} = Gamma(sigma + 1) / ((4 pi)^(d/2) Gamma(sigma + 1 + d/2))``."""
    return math.gamma(sigma + 1.0) / ((4.0 * math.pi) ** (d / 2.0) * math.gamma(sigma + 1.0 + d / 2.0))


def min_channel(bound: float) -> int:
    """Smallest integer ``m >= 0`` with ``m**2 >= bound``."""
    if bound <= 0:
        return 0
    m = math.ceil(math.sqrt(bound))
    while m * m < bound:
        m += 1
    while m > 0 and (m - 1) ** 2 >= bound:
        m -= 1
    return m


def channel_range(fp: FluxProfile | None, tp: TildePotential, gamma: float = 1.0) -> tuple[int, int]:
    """Channels that can carry negative eigenvalues.

    For ``m >= m_max`` the non-magnetic channel ``h_m(0, Vt / gamma)`` is
    nonnegative because ``m**2 / r**2 >= Vt / gamma``; the form comparison
    then makes ``h_m(B, Vt)`` nonnegative too. For ``m <= 0`` the comparison
    holds with constant 1, so ``m_min`` uses ``gamma = 1``. A zero potential
    gives ``(0, 0)``.
    """
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    s = tp.sup_r2()
    if s <= 0:
        return 0, 0
    return -min_channel(s), min_channel(s / gamma)


@dataclass
class SpectrumSummary:
    per_channel: dict[int, np.ndarray]
    ambiguous: dict[int, np.ndarray]
    m_range: tuple[int, int]
    truncation: dict
    mesh: MeshConfig
    eig_tol: float
    count_eps: float
    magnetic: bool
    meta: dict = field(default_factory=dict)

    def eigenvalues(self) -> np.ndarray:
        vals = [v for m in sorted(self.per_channel) for v in self.per_channel[m]]
        return np.sort(np.asarray(vals, dtype=float))

    @property
    def count(self) -> int:
        return int(sum(len(v) for v in self.per_channel.values()))

    @property
    def count_nonpositive(self) -> int:
        return self.count + int(sum(len(v) for v in self.ambiguous.values()))

    def to_dict(self) -> dict:
        return {
            "magnetic": self.magnetic,
            "m_range": list(self.m_range),
            "truncation": self.truncation,
            "mesh": {"n": self.mesh.n, "kind": self.mesh.kind, "strength": self.mesh.strength},
            "tolerances": {"eig_tol": self.eig_tol, "count_eps": self.count_eps},
            "count_negative": self.count,
            "count_nonpositive": self.count_nonpositive,
            "per_channel": {str(m): [float(x) for x in self.per_channel[m]] for m in sorted(self.per_channel)},
            "boundary_ambiguous": {str(m): [float(x) for x in self.ambiguous[m]] for m in sorted(self.ambiguous)},
            **({"meta": self.meta} if self.meta else {}),
        }

    def csv_rows(self) -> list[tuple[int, int, float]]:
        """``(m, k, lambda)`` rows, ``k`` counting from 1 within each channel."""
        return [(m, k + 1, float(v)) for m in sorted(self.per_channel) for k, v in enumerate(self.per_channel[m])]


def negative_spectrum(fp: FluxProfile | None, tp: TildePotential, mesh_cfg: MeshConfig,
                      gamma: float = 1.0, eig_tol: float = 1e-10, count_eps: float | None = None,
                      workers: int = 1, pad: int = 0, cap: float = DEFAULT_CAP) -> SpectrumSummary:
    """Negative eigenvalues of every channel in :func:`channel_range`.

    ``pad`` extra channels are solved on each side of the range (used to
    test that truncation loses nothing). Eigenvalues in ``[-count_eps, 0)``
    are kept apart as boundary-ambiguous.
    """
    count_eps = 10.0 * eig_tol if count_eps is None else count_eps
    m_min, m_max = channel_range(fp, tp, gamma)
    truncation = {
        "rule": "m^2 >= sup_r r^2 Vt(r) / gamma makes h_m(0, Vt/gamma) >= 0, hence h_m(B, Vt) >= 0",
        "sup_r2_vtilde": tp.sup_r2(),
        "gamma_positive_m": gamma,
        "gamma_nonpositive_m": 1.0,
        "pad": pad,
    }
    if tp.sup() == 0.0:
        return SpectrumSummary({}, {}, (0, 0), truncation, mesh_cfg, eig_tol, count_eps, fp is not None)

    factory = ChannelFactory(fp, tp, mesh_cfg.build(), cap)
    ms = list(range(m_min - pad, m_max + pad + 1))

    def solve(m: int) -> np.ndarray:
        return eigs_below(factory.assemble(m).matrix, 0.0, eig_tol)

    if workers > 1 and len(ms) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, ms))
    else:
        results = [solve(m) for m in ms]

    per_channel: dict[int, np.ndarray] = {}
    ambiguous: dict[int, np.ndarray] = {}
    for m, ev in zip(ms, results):
        neg = ev[ev < -count_eps]
        amb = ev[ev >= -count_eps]
        if neg.size:
            per_channel[m] = neg
        if amb.size:
            ambiguous[m] = amb
    return SpectrumSummary(per_channel, ambiguous, (m_min, m_max), truncation, mesh_cfg, eig_tol, count_eps,
                           fp is not None)


def riesz_mean(ss: SpectrumSummary, sigma: float) -> float:
    """``sum |lambda|**sigma`` over the negative eigenvalues; the count when ``sigma == 0``."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    ev = ss.eigenvalues()
    if sigma == 0:
        return float(ev.size)
    return float(np.sum(np.abs(ev) ** sigma))


def weyl_ratio(tp: TildePotential, sigma: float, lam: float, mesh_cfg: MeshConfig,
               eig_tol: float = 1e-10, workers: int = 1, quad_tol: float = 1e-10) -> float:
    """Scaled Riesz mean of ``H(0, lam Vt)`` over its semiclassical value.

    ``lam**(-sigma-1) tr(H(0, lam Vt))_-^sigma / (L^cl 2 pi int Vt^(sigma+1) r dr)``;
    tends to 1 as ``lam -> inf``.
    """
    if sigma < 0 or lam <= 0:
        raise ValueError("need sigma >= 0 and lam > 0")
    if not tp.is_radial:
        raise ValueError("the Weyl check is restricted to radial potentials")
    ss = negative_spectrum(None, tp.scaled(lam), mesh_cfg, 1.0, eig_tol, workers=workers)
    tr = riesz_mean(ss, sigma)
    denom = semiclassical_constant(sigma) * 2.0 * math.pi * moment(tp, sigma, quad_tol)
    return lam ** (-sigma - 1.0) * tr / denom
