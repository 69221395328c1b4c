"""Microstructure diagnostics: volume fractions, transition layers, interval
classification, empirical gradient histograms, and the minimizing-measure
family of the unregularized problem.

The gradient u_x of a profile is treated as piecewise constant per cell when
measuring sets (consistent with the midpoint energy quadrature) and as
piecewise linear between cell midpoints when locating threshold crossings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ParameterError
from .grids import GridFunction
from .potential import PotentialSpec, eta0_bound

_EDGE = 1e-12


@dataclass(frozen=True)
class VolumeFractions:
    """Lebesgue measures of the eta-neighbourhoods of the three wells."""

    eta: float
    lam: tuple[float, float, float]
    sigma_measure: float
    overlap: bool                      # eta at/above the disjointness bound

    def as_dict(self) -> dict:
        return {"eta": self.eta, "lambda": list(self.lam),
                "sigma_measure": self.sigma_measure, "overlap": self.overlap}


@dataclass(frozen=True)
class TransitionLayer:
    """Maximal band crossing between two neighbouring well collars."""

    kind: str                          # "A+", "A-", "B+", "B-"
    span: tuple[float, float]

    @property
    def width(self) -> float:
        return self.span[1] - self.span[0]


@dataclass(frozen=True)
class DInterval:
    """Inner core of one gradient excursion above the z1 collar."""

    span: tuple[float, float]
    alpha: float
    beta: float
    n_layers: int
    dtype: str                         # "0","I","II","III","IV" or "open"
    e_span: Optional[tuple[float, float]] = None

    def as_dict(self) -> dict:
        return {"span": list(self.span), "alpha": self.alpha, "beta": self.beta,
                "n_i": self.n_layers, "type": self.dtype,
                "e_span": list(self.e_span) if self.e_span else None}


@dataclass(frozen=True)
class GradientHistogram:
    edges: np.ndarray
    masses: np.ndarray
    mean: float                        # exact measure-weighted mean of u_x

    def as_dict(self) -> dict:
        return {"bin_edges": self.edges.tolist(), "masses": self.masses.tolist(),
                "mean": self.mean}


@dataclass(frozen=True)
class MeasureReport:
    eta: float
    lam: tuple[float, float, float]
    sigma_measure: float
    layer_counts: dict
    d_intervals: tuple[DInterval, ...]
    histogram: GradientHistogram

    def as_dict(self) -> dict:
        return {
            "eta": self.eta, "lambda": list(self.lam),
            "sigma_measure": self.sigma_measure,
            "layers": dict(self.layer_counts),
            "d_intervals": [d.as_dict() for d in self.d_intervals],
            "histogram": self.histogram.as_dict(),
        }


def volume_fractions(u: GridFunction, spec: PotentialSpec, eta: float) -> VolumeFractions:
    """Cell-measure sums of {|u_x - z_k| <= eta} and of the far set Sigma.

    For eta below the disjointness bound the four measures partition the
    domain.  Larger eta (the sweep diagnostics evaluate at eta = eps^(1/3),
    which can exceed that bound at moderate eps) is accepted but flagged:
    neighbourhoods may overlap, so the partition identity is off the table.
    """
    z1, z2, z3 = spec.wells
    if eta <= 0.0 or eta >= 0.5 * (z3 - z1):
        raise ParameterError("eta must lie in (0, (z3-z1)/2)")
    s = u.slopes()
    h = u.cell_widths()
    lam = tuple(float(np.dot(h, (np.abs(s - z) <= eta).astype(float)))
                for z in spec.wells)
    far = (np.abs(s - z1) > eta) & (np.abs(s - z2) > eta) & (np.abs(s - z3) > eta)
    sigma = float(np.dot(h, far.astype(float)))
    return VolumeFractions(eta=eta, lam=lam, sigma_measure=sigma,
                           overlap=bool(eta >= eta0_bound(spec)))


def _gradient_polyline(u: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    """u_x as a piecewise-linear function through the cell midpoints."""
    return u.midpoints(), u.slopes()


def _band_layers(x: np.ndarray, v: np.ndarray, lo: float, hi: float,
                 plus: str, minus: str) -> list[TransitionLayer]:
    """Maximal intervals with v strictly inside (lo, hi) joining the thresholds.

    Crossings are located by linear interpolation on the polyline.  Runs that
    enter and leave through the same threshold are not layers, and runs
    clipped by the domain boundary are discarded (their endpoint never
    attains the defining value).
    """
    layers: list[TransitionLayer] = []
    inside = (v > lo) & (v < hi)
    n = len(v)
    i = 0
    while i < n:
        if not inside[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and inside[j + 1]:
            j += 1
        # entry crossing on segment (i-1, i), exit on (j, j+1)
        if i > 0 and j + 1 < n:
            enter_level = lo if v[i - 1] <= lo else hi
            exit_level = lo if v[j + 1] <= lo else hi
            if enter_level != exit_level:
                x_in = _cross(x[i - 1], x[i], v[i - 1], v[i], enter_level)
                x_out = _cross(x[j], x[j + 1], v[j], v[j + 1], exit_level)
                kind = plus if enter_level == lo else minus
                layers.append(TransitionLayer(kind=kind, span=(x_in, x_out)))
        i = j + 1
    return layers


def _cross(x0: float, x1: float, v0: float, v1: float, level: float) -> float:
    if v1 == v0:
        return x0
    t = (level - v0) / (v1 - v0)
    return float(x0 + t * (x1 - x0))


def transition_layers(u: GridFunction, spec: PotentialSpec, eta: float) -> list[TransitionLayer]:
    """All A+/A-/B+/B- layers of u at collar radius eta, in position order.

    A band degenerates (its list is empty) when 2*eta exceeds the gap between
    the corresponding wells: no interval can then satisfy the definition.
    """
    z1, z2, z3 = spec.wells
    if eta <= 0.0:
        raise ParameterError("eta must be positive")
    x, v = _gradient_polyline(u)
    layers: list[TransitionLayer] = []
    if z1 + eta < z2 - eta:
        layers += _band_layers(x, v, z1 + eta, z2 - eta, "A+", "A-")
    if z2 + eta < z3 - eta:
        layers += _band_layers(x, v, z2 + eta, z3 - eta, "B+", "B-")
    return sorted(layers, key=lambda L: L.span[0])


def _measure_in(u: GridFunction, lo: float, hi: float, z: float, eta: float) -> float:
    """Cell measure of {x in (lo,hi): |u_x(x) - z| <= eta} (cells pro-rated)."""
    s = u.slopes()
    left = np.maximum(u.nodes[:-1], lo)
    right = np.minimum(u.nodes[1:], hi)
    overlap = np.maximum(right - left, 0.0)
    return float(np.dot(overlap, (np.abs(s - z) <= eta).astype(float)))


def d_intervals(u: GridFunction, spec: PotentialSpec, eta: float,
                thresholds: tuple[float, float] = (0.1, 10.0)) -> list[DInterval]:
    """Pair A+/A- layers into excursion cores and classify them.

    Types follow the size/sign taxonomy: "0" when max(alpha, beta) leaves
    (eps*R_lo, eps*R_hi); "I" when u keeps one sign at the core endpoints;
    "II" when it changes sign with 0 or >= 4 inner B-layers; "III"/"IV" when
    exactly 2 B-layers, split by whether u vanishes inside the enclosed
    upper-well plateau.  The R thresholds are configuration, not constants
    of the analysis, and are echoed by the CLI.
    """
    if u.eps <= 0.0:
        raise ParameterError("interval classification needs the profile's eps")
    z1, z2, z3 = spec.wells
    r_lo, r_hi = thresholds
    x, v = _gradient_polyline(u)
    a_band = _band_layers(x, v, z1 + eta, z2 - eta, "A+", "A-")
    b_band = transition_layers(u, spec, eta)
    b_band = [L for L in b_band if L.kind in ("B+", "B-")]
    out: list[DInterval] = []
    plus = [L for L in a_band if L.kind == "A+"]
    minus = [L for L in a_band if L.kind == "A-"]
    for ap in plus:
        partner = None
        for am in minus:
            if am.span[0] >= ap.span[1]:
                # the excursion persists iff no other A+ layer starts first
                blockers = [q for q in plus
                            if ap.span[1] < q.span[0] < am.span[0]]
                partner = None if blockers else am
                break
        if partner is None:
            out.append(DInterval(span=(ap.span[1], u.nodes[-1]), alpha=0.0,
                                 beta=0.0, n_layers=0, dtype="open"))
            continue
        lo, hi = ap.span[1], partner.span[0]
        alpha = _measure_in(u, lo, hi, z2, eta)
        beta = _measure_in(u, lo, hi, z3, eta)
        inner_b = [L for L in b_band if L.span[0] >= lo and L.span[1] <= hi]
        n_i = len(inner_b)
        u_lo = float(np.interp(lo, u.nodes, u.values))
        u_hi = float(np.interp(hi, u.nodes, u.values))
        e_span = None
        if n_i == 2 and inner_b[0].kind == "B+" and inner_b[1].kind == "B-":
            e_span = (inner_b[0].span[1], inner_b[1].span[0])
        if max(alpha, beta) <= u.eps * r_lo or max(alpha, beta) >= u.eps * r_hi:
            dtype = "0"
        elif u_lo * u_hi >= 0.0:
            dtype = "I"
        elif n_i == 0 or n_i >= 4:
            dtype = "II"
        elif e_span is not None and _has_zero(u, *e_span):
            dtype = "IV"
        else:
            dtype = "III"
        out.append(DInterval(span=(lo, hi), alpha=alpha, beta=beta,
                             n_layers=n_i, dtype=dtype, e_span=e_span))
    return out


def _has_zero(u: GridFunction, lo: float, hi: float) -> bool:
    xs = u.nodes[(u.nodes > lo) & (u.nodes < hi)]
    vals = np.concatenate([
        [np.interp(lo, u.nodes, u.values)],
        u.values[(u.nodes > lo) & (u.nodes < hi)],
        [np.interp(hi, u.nodes, u.values)],
    ])
    return bool(vals.min() <= 0.0 <= vals.max())


def empirical_young_measure(u: GridFunction, spec: PotentialSpec,
                            bins: int = 400) -> GradientHistogram:
    """Cell-measure-weighted histogram of u_x over [z1-1, z3+1].

    The ``mean`` field is the exact weighted mean of the slopes (free of
    binning error); for admissible profiles it vanishes with the boundary
    conditions.
    """
    if bins < 10:
        raise ParameterError("need at least 10 bins")
    z1, _, z3 = spec.wells
    s = u.slopes()
    h = u.cell_widths()
    masses, edges = np.histogram(
        np.clip(s, z1 - 1.0 + _EDGE, z3 + 1.0 - _EDGE),
        bins=bins, range=(z1 - 1.0, z3 + 1.0), weights=h,
    )
    total = float(np.sum(h))
    return GradientHistogram(edges=edges, masses=masses / total,
                             mean=float(np.dot(h, s) / total))


@dataclass(frozen=True)
class E0FamilyWeights:
    """One member of the minimizing-measure family of the relaxed problem."""

    lambda_param: float
    weights: tuple[float, float, float]

    def as_dict(self) -> dict:
        return {"lambda": self.lambda_param, "weights": list(self.weights)}


def e0_family(spec: PotentialSpec, lambda_param: float) -> E0FamilyWeights:
    """Well weights (w1, w2, w3) of the measure family member at lambda.

    Every member is a zero-mean probability vector on the wells; lambda is
    the weight of the middle well and ranges over [0, 1/z21].
    """
    z1, z2, z3 = spec.wells
    z21 = 1.0 - z2 / z1
    lam = float(lambda_param)
    if lam < -_EDGE or lam > 1.0 / z21 + _EDGE:
        raise ParameterError(f"lambda must lie in [0, {1.0 / z21:.6g}]")
    w1 = -(z3 + lam * (z2 - z3)) / (z1 - z3)
    w3 = (z1 + lam * (z2 - z1)) / (z1 - z3)
    return E0FamilyWeights(lambda_param=lam, weights=(float(w1), lam, float(w3)))


def rearrangement_envelope(nodes, values, window: tuple[float, float] | None = None
                           ) -> tuple[np.ndarray, np.ndarray]:
    """Convex minorant with the same slope distribution on a monotone window.

    The cell slopes of the input (restricted to ``window``) are laid out in
    ascending order together with their cell widths, anchored at the window's
    left value.  The result has identical slope level-set measures and lies
    pointwise at or below the input.
    """
    if isinstance(nodes, GridFunction):
        nodes, values = nodes.nodes, nodes.values
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is not None:
        a, b = window
        keep = (nodes >= a - _EDGE) & (nodes <= b + _EDGE)
        nodes, values = nodes[keep], values[keep]
    if len(nodes) < 2:
        raise ParameterError("window must contain at least one cell")
    h = np.diff(nodes)
    s = np.diff(values) / h
    if np.any(np.diff(values) < -1e-12 * max(1.0, float(np.max(np.abs(values))))):
        raise ParameterError("input must be nondecreasing on the window")
    order = np.argsort(s, kind="stable")
    new_nodes = nodes[0] + np.concatenate([[0.0], np.cumsum(h[order])])
    new_vals = values[0] + np.concatenate([[0.0], np.cumsum(s[order] * h[order])])
    return new_nodes, new_vals


def measure_report(u: GridFunction, spec: PotentialSpec, eta: float,
                   bins: int = 400,
                   thresholds: tuple[float, float] = (0.1, 10.0)) -> MeasureReport:
    """Assemble the full diagnostic report for a profile."""
    vf = volume_fractions(u, spec, eta)
    layers = transition_layers(u, spec, eta)
    counts = {k: sum(1 for L in layers if L.kind == k)
              for k in ("A+", "A-", "B+", "B-")}
    divs = tuple(d_intervals(u, spec, eta, thresholds)) if u.eps > 0.0 else ()
    hist = empirical_young_measure(u, spec, bins)
    return MeasureReport(eta=eta, lam=vf.lam, sigma_measure=vf.sigma_measure,
                         layer_counts=counts, d_intervals=divs, histogram=hist)
