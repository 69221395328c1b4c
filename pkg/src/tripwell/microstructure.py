"""Explicit low-energy profiles for the rescaled triple-well energy.

All constructions share one ingredient: the heteroclinic gradient transition
solving the separable ODE  eps^3 w_x = sqrt(W(w))  between two neighbouring
wells.  The inverse map x(w) = eps^3 * integral dw/sqrt(W) is tabulated once
per well pair (it is eps-free in x/eps^3 units) and inverted monotonically;
beyond the table the solution saturates exponentially fast and is clamped to
the exact well values.  Forward time-stepping is deliberately avoided: the
wells are degenerate equilibria and explicit steppers stall or overshoot
there.

Built on top of that:

* a two-well sawtooth whose gradient oscillates z1 <-> z2 with zero-mean
  teeth (period chosen against the optimal rescaled period d*),
* a three-well profile oscillating z1 <-> z3 through a short linear bridge
  across the degenerate middle well, with a matching block that absorbs the
  phase mismatch at the left end,
* periodic competitor profiles realizing prescribed volume-fraction triples
  (lambda1, lambda2, lambda3) with gradient patterns z2|z3|z1 or z1|z2|z3|z1,
  used to probe the structural hypotheses H7/H8.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .constants import LimitConstants, limit_constants
from .errors import ConstructionError, GridError, ParameterError
from .grids import GridFunction, integrate_slopes
from .potential import PotentialSpec, coercivity_of, sqrt_W


# ---------------------------------------------------------------------------
# heteroclinic transition tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransitionTable:
    """Monotone samples of one heteroclinic branch in x/eps^3 units."""

    z_lo: float
    z_hi: float
    w_tab: np.ndarray
    x_tab: np.ndarray          # scaled positions, anchored at the branch anchor

    def w_at_scaled(self, xs) -> np.ndarray:
        """Invert x(w) at scaled positions, clamping to the exact wells."""
        return np.interp(xs, self.x_tab, self.w_tab, left=self.z_lo, right=self.z_hi)

    def x_at(self, w: float) -> float:
        """Scaled position where the branch passes through w (table range)."""
        return float(np.interp(w, self.w_tab, self.x_tab))

    @property
    def extent(self) -> tuple[float, float]:
        return float(self.x_tab[0]), float(self.x_tab[-1])


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


@functools.lru_cache(maxsize=64)
def _transition_table(spec: PotentialSpec, z_lo: float, z_hi: float,
                      anchor_w: float, n_side: int = 400,
                      n_mid: int = 2400) -> TransitionTable:
    """Tabulate x(w) = integral dw/sqrt(W) between two wells.

    The grid mixes geometric clustering toward both wells (the integrand has
    a nonintegrable singularity there; the table stops at 1e-12 of the span)
    with a dense uniform mid-section so the inverse map is accurate away from
    the wells too.  Per-segment 12-point Gauss-Legendre panels are exact to
    rounding for this smooth integrand at the chosen densities.
    """
    span = z_hi - z_lo
    delta = 1e-12 * span
    offs = np.geomspace(delta, 0.25 * span, n_side)
    w_pts = np.unique(np.concatenate([
        [anchor_w], z_lo + offs, z_hi - offs,
        np.linspace(z_lo + 0.2 * span, z_hi - 0.2 * span, n_mid),
    ]))
    a = w_pts[:-1]
    h = np.diff(w_pts)
    nodes = a[:, None] + 0.5 * h[:, None] * (1.0 + _GL_NODES[None, :])
    vals = 1.0 / sqrt_W(spec, nodes)
    steps = 0.5 * h * (vals @ _GL_WEIGHTS)
    x = np.concatenate([[0.0], np.cumsum(steps)])
    x -= np.interp(anchor_w, w_pts, x)
    return TransitionTable(z_lo=z_lo, z_hi=z_hi, w_tab=w_pts, x_tab=x)


def _lower_branch(spec: PotentialSpec) -> TransitionTable:
    z1, z2, _ = spec.wells
    return _transition_table(spec, z1, z2, 0.0)


def _upper_branch(spec: PotentialSpec) -> TransitionTable:
    _, z2, z3 = spec.wells
    return _transition_table(spec, z2, z3, 0.5 * (z2 + z3))


def solve_transition_ode(spec: PotentialSpec, eps: float, branch: str,
                         x_grid: np.ndarray) -> np.ndarray:
    """Sample the monotone heteroclinic w(x) on x_grid.

    ``branch`` selects the well pair: "z1z2" is anchored at w(0) = 0, "z2z3"
    at the mid-value between the upper wells.  The grid must resolve the
    transition scale: steps inside the layer may not exceed eps^3 / 10.
    """
    if eps <= 0.0:
        raise ParameterError("eps must be positive")
    x_grid = np.asarray(x_grid, dtype=float)
    if branch in ("z1z2", "z1->z2"):
        tab = _lower_branch(spec)
    elif branch in ("z2z3", "z2->z3"):
        tab = _upper_branch(spec)
    else:
        raise ParameterError(f"unknown branch {branch!r}")
    w = tab.w_at_scaled(x_grid / eps**3)
    span = tab.z_hi - tab.z_lo
    inside = (w > tab.z_lo + 1e-3 * span) & (w < tab.z_hi - 1e-3 * span)
    if np.any(inside[:-1] | inside[1:]):
        steps = np.diff(x_grid)[(inside[:-1] | inside[1:])]
        if np.max(steps) > eps**3 / 10.0 * (1.0 + 1e-9):
            raise GridError("x_grid does not resolve the transition layer (step > eps^3/10)")
    return w


def zero_mean_shift(wave, period_l: float, n_quad: int = 20_001,
                    bracket: tuple[float, float] | None = None) -> float:
    """Shift omega* with integral of wave(s - omega*) over one period equal 0.

    ``wave`` is a vectorized callable, monotone from negative to positive
    values across the window.  The mean is a continuous decreasing function of
    the shift, so bisection applies; the root is polished until the residual
    drops below 1e-12 * period_l * max|wave|.
    """
    if period_l <= 0.0:
        raise ParameterError("period must be positive")
    s = np.linspace(0.0, period_l, n_quad)
    h = s[1] - s[0]

    def F(om):
        vals = np.asarray(wave(s - om), dtype=float)
        return float(np.dot(np.full(n_quad - 1, h), 0.5 * (vals[:-1] + vals[1:])))

    lo, hi = bracket if bracket is not None else (-period_l, 2.0 * period_l)
    flo, fhi = F(lo), F(hi)
    if flo < 0.0 or fhi > 0.0:
        raise ConstructionError("mean has no sign change on the shift bracket")
    scale = float(np.max(np.abs(wave(s - 0.5 * (lo + hi))))) or 1.0
    tol = 1e-12 * period_l * scale
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = F(mid)
        if abs(fmid) <= tol:
            return mid
        if fmid > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# tooth grids and discrete zero means
# ---------------------------------------------------------------------------

def _tooth_grid(l: float, centers: list[tuple[float, float, float]],
                eps: float, layer_res: int, plateau_pts: int) -> np.ndarray:
    """Symmetric grid on [0, l]: coarse everywhere, fine near each transition.

    ``centers`` holds (center, lo_extent, hi_extent) in absolute units.  The
    grid is closed under r -> l - r so a reversed tooth reuses the same nodes.
    """
    base = [np.linspace(0.0, l, plateau_pts)]
    step = eps**3 / layer_res
    for c, lo, hi in centers:
        a = max(0.0, c + lo - 2.0 * step)
        b = min(l, c + hi + 2.0 * step)
        if b > a:
            base.append(np.arange(a, b, step))
            base.append([b])
    pts = np.concatenate([np.asarray(p, dtype=float) for p in base])
    pts = pts[(pts >= 0.0) & (pts <= l)]
    full = np.unique(np.concatenate([pts, l - pts]))
    keep = np.concatenate([[True], np.diff(full) > 1e-9 * step])
    full = full[keep]
    full[0], full[-1] = 0.0, l
    return full


def _discrete_zero_shift(eval_w, rel: np.ndarray, bracket: tuple[float, float]):
    """Bisect the shift until the tooth's trapezoid mean vanishes."""
    dr = np.diff(rel)

    def F(om):
        v = eval_w(rel - om)
        return float(np.dot(dr, 0.5 * (v[:-1] + v[1:])))

    lo, hi = bracket
    flo, fhi = F(lo), F(hi)
    if flo < 0.0 or fhi > 0.0:
        raise ConstructionError("zero-mean shift bracket does not straddle the root")
    vals = eval_w(rel - 0.5 * (lo + hi))
    tol = 1e-16 * (rel[-1] - rel[0]) * max(1.0, float(np.max(np.abs(vals))))
    om = 0.5 * (lo + hi)
    for _ in range(200):
        om = 0.5 * (lo + hi)
        f = F(om)
        if abs(f) <= tol or hi - lo < 1e-18:
            break
        if f > 0.0:
            lo = om
        else:
            hi = om
    return om, eval_w(rel - om)


def _assemble_pieces(a: float, b: float, l: float, rel: np.ndarray,
                     piece_values: list[np.ndarray], eps: float,
                     meta: dict) -> GridFunction:
    """Concatenate per-piece samples (shared boundary nodes dropped)."""
    nodes = [a + rel]
    vals = [piece_values[0]]
    for i in range(1, len(piece_values)):
        nodes.append(a + i * l + rel[1:])
        vals.append(piece_values[i][1:])
    all_nodes = np.concatenate(nodes)
    all_nodes[0] = a
    all_nodes[-1] = b          # a + n*l can drift by one ulp
    return integrate_slopes(all_nodes, np.concatenate(vals),
                            eps=eps, meta=meta)


# ---------------------------------------------------------------------------
# two-well sawtooth
# ---------------------------------------------------------------------------

def two_well_count(spec: PotentialSpec, eps: float, length: float,
                   constants: LimitConstants | None = None,
                   parity: str = "any") -> int:
    """Default tooth count: smallest integer above length/(eps*d*).

    ``parity="even"`` bumps to the next even integer, which is what a profile
    glued in front of a three-well block needs so its gradient ends on the z1
    plateau.  A standalone profile accepts any parity; the even restriction
    would put the rescaled period up to 25% off d* and visibly bump the
    energy at moderate eps.
    """
    c = constants if constants is not None else limit_constants(spec)
    raw = length / (eps * c.d_star)
    n = int(np.floor(raw)) + 1
    if parity == "even" and n % 2 == 1:
        n += 1
    return n


def build_two_well_sawtooth(spec: PotentialSpec, eps: float,
                            interval: tuple[float, float] = (0.0, 1.0),
                            constants: LimitConstants | None = None,
                            counts_override: int | None = None,
                            parity: str = "any",
                            layer_res: int = 96,
                            plateau_pts: int = 49) -> GridFunction:
    """Sawtooth whose gradient alternates between the z1 and z2 plateaus.

    Each tooth of width l_N carries one monotone heteroclinic traverse; the
    shift omega* enforces an exactly zero discrete tooth mean, so u vanishes
    at every tooth boundary.
    """
    if eps <= 0.0:
        raise ParameterError("eps must be positive")
    a, b = interval
    if not b > a:
        raise ParameterError("empty interval")
    c = constants if constants is not None else limit_constants(spec)
    z1, z2, _ = spec.wells
    length = b - a
    N = counts_override if counts_override is not None else two_well_count(
        spec, eps, length, c, parity)
    if N < 2:
        raise ConstructionError(
            f"eps={eps} too large for a two-well profile on length {length}: "
            f"tooth rule gives N={N}, minimal admissible N is 2"
        )
    l = length / N
    tab = _lower_branch(spec)
    om0 = l * z2 / (z2 - z1)
    ext_lo, ext_hi = tab.extent
    rel = _tooth_grid(l, [(om0, eps**3 * (ext_lo - 4.0), eps**3 * (ext_hi + 4.0))],
                      eps, layer_res, plateau_pts)

    def eval_w(s):
        return tab.w_at_scaled(np.asarray(s) / eps**3)

    halfwidth = min(0.2 * l, om0, l - om0)
    om, w_up = _discrete_zero_shift(eval_w, rel, (om0 - halfwidth, om0 + halfwidth))
    w_down = eval_w(l - om - rel)
    pieces = [w_up if i % 2 == 0 else w_down for i in range(N)]
    gf = _assemble_pieces(a, b, l, rel, pieces, eps, meta={
        "kind": "two-well", "N": N, "omega_star": om,
        "l_N": l, "d_eps": l / eps, "d_star": c.d_star,
    })
    return gf


# ---------------------------------------------------------------------------
# three-well profile (z1 <-> z3 through the bridged middle well)
# ---------------------------------------------------------------------------

class ThreeWellRise:
    """Monotone composite gradient transition z1 -> z3.

    The two heteroclinic branches cannot be joined directly (the middle well
    is a degenerate equilibrium), so they are spliced by a linear bridge of
    slope eps^-3 across [z2 - mu, z2 + mu], with mu = eps^(2/(max(3,q)-2)).
    """

    def __init__(self, spec: PotentialSpec, eps: float):
        self.spec = spec
        self.eps = eps
        q = coercivity_of(spec).q
        self.mu = eps ** (2.0 / (max(3.0, q) - 2.0))
        z1, z2, z3 = spec.wells
        if not (self.mu < 0.25 * min(z2 - z1, z3 - z2)):
            raise ConstructionError("eps too large: bridge width exceeds the well gaps")
        self.b1 = _lower_branch(spec)
        self.b2 = _upper_branch(spec)
        self.s0 = eps**3 * self.b1.x_at(z2 - self.mu)
        self.s_bridge_end = self.s0 + 2.0 * eps**3 * self.mu
        self._x2_start = self.b2.x_at(z2 + self.mu)
        lo1, _ = self.b1.extent
        _, hi2 = self.b2.extent
        self.s_min = eps**3 * lo1
        self.s_max = self.s_bridge_end + eps**3 * (hi2 - self._x2_start)
        self.kinks = (self.s0, self.s_bridge_end)

    def w_at(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        eps3 = self.eps**3
        z2 = self.spec.wells[1]
        low = self.b1.w_at_scaled(s / eps3)
        mid = (z2 - self.mu) + (s - self.s0) / eps3
        high = self.b2.w_at_scaled((s - self.s_bridge_end) / eps3 + self._x2_start)
        return np.where(s <= self.s0, low,
                        np.where(s <= self.s_bridge_end, mid, high))


def three_well_count(spec: PotentialSpec, eps: float, length: float,
                     constants: LimitConstants | None = None) -> int:
    """Default tooth count: smallest integer above length/(eps*h*)."""
    c = constants if constants is not None else limit_constants(spec)
    return int(np.floor(length / (eps * c.h_star))) + 1


def build_three_well_profile(spec: PotentialSpec, eps: float,
                             interval: tuple[float, float] = (0.0, 1.0),
                             constants: LimitConstants | None = None,
                             counts_override: int | None = None,
                             start_value: float | None = None,
                             layer_res: int = 96,
                             plateau_pts: int = 49) -> GridFunction:
    """Profile whose gradient oscillates z1 <-> z3 across the bridged middle well.

    The first piece is a matching block: a z1 plateau of solvable length, the
    composite rise, and a z3 plateau, stitched by eps^3-wide linear ramps to
    the prescribed boundary gradients when those differ from the exact wells.
    Its plateau length is chosen so the block mean vanishes; regular teeth
    alternate reversed copies of the composite transition with zero means
    enforced by the shift omega_*.
    """
    if eps <= 0.0:
        raise ParameterError("eps must be positive")
    a, b = interval
    if not b > a:
        raise ParameterError("empty interval")
    c = constants if constants is not None else limit_constants(spec)
    z1, z2, z3 = spec.wells
    length = b - a
    M = counts_override if counts_override is not None else three_well_count(
        spec, eps, length, c)
    if M < 2:
        raise ConstructionError(
            f"eps={eps} too large for a three-well profile on length {length}: "
            f"tooth rule gives M={M}, need at least a matching block plus one tooth"
        )
    l = length / M
    rise = ThreeWellRise(spec, eps)
    if rise.s_max - rise.s_min > 0.6 * l:
        raise ConstructionError("eps too large: transition does not fit inside a tooth")

    om0 = l * z3 / (z3 - z1)
    rel = _tooth_grid(
        l,
        [(om0, rise.s_min - 4.0 * eps**3, rise.s_max + 4.0 * eps**3)],
        eps, layer_res, plateau_pts,
    )

    def eval_w(s):
        return rise.w_at(np.asarray(s))

    halfwidth = min(0.2 * l, om0 - max(0.0, -rise.s_min), l - om0 - max(0.0, rise.s_max))
    if halfwidth <= 0.0:
        raise ConstructionError("eps too large: no admissible zero-mean shift")
    om, w_up = _discrete_zero_shift(eval_w, rel, (om0 - halfwidth, om0 + halfwidth))
    w_down = eval_w(l - om - rel)

    w_start = float(start_value) if start_value is not None else float(eval_w(-om))
    w_end = float(eval_w(l - om))
    block_nodes, block_vals, block_plateau = _matching_block(
        spec, eps, rise, l, w_start, w_end, layer_res, plateau_pts)

    pieces_nodes = [block_nodes]
    pieces_vals = [block_vals]
    for i in range(1, M):
        pieces_nodes.append(rel)
        pieces_vals.append(w_down if i % 2 == 1 else w_up)

    nodes = [a + pieces_nodes[0]]
    vals = [pieces_vals[0]]
    for i in range(1, M):
        nodes.append(a + i * l + pieces_nodes[i][1:])
        vals.append(pieces_vals[i][1:])
    all_nodes = np.concatenate(nodes)
    all_nodes[0] = a
    all_nodes[-1] = b
    return integrate_slopes(all_nodes, np.concatenate(vals), eps=eps, meta={
        "kind": "three-well", "M": M, "omega_star": om,
        "l_M": l, "h_eps": l / eps, "h_star": c.h_star,
        "mu": rise.mu, "block_plateau": block_plateau,
    })


def _matching_block(spec: PotentialSpec, eps: float, rise: ThreeWellRise,
                    l: float, w_start: float, w_end: float,
                    layer_res: int, plateau_pts: int
                    ) -> tuple[np.ndarray, np.ndarray, float]:
    """First piece of the three-well profile on [0, l], mean forced to zero.

    Layout: [stitch ramp to z1 | z1 plateau of length a | composite rise |
    z3 plateau | stitch ramp to w_end]; the stitches have width eps^3 and
    degenerate to nothing when the boundary gradients already sit on the
    wells.  The plateau length a solves the linear zero-mean equation.
    """
    z1, _, z3 = spec.wells
    eps3 = eps**3
    stitch_l = 0.0 if w_start == z1 else eps3
    stitch_r = 0.0 if w_end == z3 else eps3

    step = eps3 / layer_res
    r_rise = np.unique(np.concatenate([
        np.arange(rise.s_min, rise.s_max, step),
        np.asarray(rise.kinks), [rise.s_min, rise.s_max],
    ]))
    r_rise = r_rise[(r_rise >= rise.s_min) & (r_rise <= rise.s_max)]
    v_rise = rise.w_at(r_rise)
    dr = np.diff(r_rise)
    rise_int = float(np.dot(dr, 0.5 * (v_rise[:-1] + v_rise[1:])))
    rise_len = rise.s_max - rise.s_min

    int_stitch_l = 0.5 * (w_start + z1) * stitch_l
    int_stitch_r = 0.5 * (w_end + z3) * stitch_r
    # z1*a + rise_int + z3*(l - stitches - rise_len - a) + stitch terms == 0
    rhs = int_stitch_l + int_stitch_r + rise_int + z3 * (l - stitch_l - stitch_r - rise_len)
    a_len = rhs / (z3 - z1)
    z3_len = l - stitch_l - stitch_r - rise_len - a_len
    if a_len < 0.0 or z3_len < 0.0:
        raise ConstructionError(
            "no admissible matching-block plateau length: eps too large for this interval"
        )

    p1 = stitch_l
    p2 = p1 + a_len
    p3 = p2 + rise_len
    p4 = p3 + z3_len
    nodes = [np.array([0.0])]
    vals = [np.array([w_start])]
    seg_nodes = np.linspace(p1, p2, max(3, plateau_pts // 2))
    nodes.append(seg_nodes)
    vals.append(np.full(len(seg_nodes), z1))
    nodes.append(p2 + (r_rise - rise.s_min)[1:])
    vals.append(v_rise[1:])
    seg_nodes = np.linspace(p3, p4, max(3, plateau_pts // 2))[1:]
    nodes.append(seg_nodes)
    vals.append(np.full(len(seg_nodes), z3))
    if stitch_r > 0.0:
        nodes.append(np.array([l]))
        vals.append(np.array([w_end]))
    block_nodes = np.concatenate(nodes)
    block_vals = np.concatenate(vals)
    keep = np.concatenate([[True], np.diff(block_nodes) > 1e-15 * l])
    return block_nodes[keep], block_vals[keep], a_len


# ---------------------------------------------------------------------------
# periodic competitor profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompetitorPlan:
    """Idealized description of one periodic competitor pattern.

    ``segments`` lists (gradient value, width fraction) over a unit period,
    ``c_int`` the summed transition costs 2|dH| per period, ``J`` the exact
    integral of the pattern's squared primitive over the unit period, and
    ``ideal`` the eps-independent limit energy 3*(c_int/2)^(2/3)*J^(1/3).
    """

    kind: str
    yhat: float
    lam: tuple[float, float, float]
    segments: tuple[tuple[float, float], ...]
    c_int: float
    J: float
    ideal: float
    variant: str = ""
    offset: float = 0.0


def _pattern_J(segments) -> float:
    """Exact unit-period integral of u^2 for a zero-mean piecewise pattern."""
    u = 0.0
    J = 0.0
    for z, w in segments:
        J += u * u * w + u * z * w * w + z * z * w**3 / 3.0
        u += z * w
    if abs(u) > 1e-10:
        raise ConstructionError(f"pattern gradient mean {u:.3g} is not zero")
    return J


def _merge_segments(segments) -> tuple[tuple[float, float], ...]:
    out: list[list[float]] = []
    for z, w in segments:
        if w <= 1e-12:
            continue
        if out and out[-1][0] == z:
            out[-1][1] += w
        else:
            out.append([z, w])
    if len(out) < 2:
        raise ConstructionError("pattern degenerates to a single plateau")
    return tuple((z, w) for z, w in out)


def _pair_cost(spec: PotentialSpec, constants: LimitConstants,
               za: float, zb: float) -> float:
    z1, z2, z3 = spec.wells
    pair = {min(za, zb), max(za, zb)}
    if pair == {z1, z2}:
        return constants.E0
    if pair == {z2, z3}:
        return constants.E1
    if pair == {z1, z3}:
        return constants.E0 + constants.E1
    raise ConstructionError(f"no transition between {za} and {zb}")


def _competitor_lambdas(constants: LimitConstants, yhat: float) -> tuple[float, float, float]:
    if yhat < 0.0:
        raise ParameterError("yhat must be nonnegative")
    lam2 = 1.0 / (yhat * constants.z31 + constants.z21)
    lam3 = yhat * lam2
    lam1 = 1.0 - lam2 - lam3
    if lam1 <= 0.0:
        raise ParameterError("invalid ratio: lambda1 would be nonpositive")
    return lam1, lam2, lam3


def competitor_plan(spec: PotentialSpec, kind: str, yhat: float,
                    constants: LimitConstants | None = None) -> CompetitorPlan:
    """Idealized pattern (segments, costs, limit energy) for h7/h8 competitors."""
    c = constants if constants is not None else limit_constants(spec)
    z1, z2, z3 = spec.wells
    lam1, lam2, lam3 = _competitor_lambdas(c, yhat)
    variant = ""
    offset = 0.0
    if kind == "h7":
        segs = [(z1, 0.5 * lam1), (z3, 0.5 * lam3), (z2, lam2),
                (z3, 0.5 * lam3), (z1, 0.5 * lam1)]
    elif kind == "h8":
        thresh = np.sqrt(z2 * c.z21 / (z3 * c.z31))
        if yhat <= thresh:
            variant = "a"
            offset = (z2 * c.z21 - z3 * c.z31 * yhat**2) / (2.0 * z2 * (c.z21 + yhat * c.z31))
            s1 = (z2 / abs(z1)) * (1.0 - offset) * lam2
            segs = [(z1, s1), (z2, lam2), (z3, lam3), (z1, lam1 - s1)]
        else:
            variant = "b"
            offset = (z3 * c.z31 * yhat**2 - z2 * c.z21) / (2.0 * z3 * yhat * (c.z21 + yhat * c.z31))
            s1 = (z3 / abs(z1)) * (1.0 - offset) * lam3
            segs = [(z1, s1), (z3, lam3), (z2, lam2), (z1, lam1 - s1)]
        if s1 < -1e-12 or s1 > lam1 + 1e-12:
            raise ConstructionError(
                f"pattern offset {s1:.4g} exceeds the z1 budget {lam1:.4g}")
    else:
        raise ParameterError(f"unknown competitor kind {kind!r}")
    segs = _merge_segments(segs)
    c_int = sum(_pair_cost(spec, c, segs[j][0], segs[j + 1][0])
                for j in range(len(segs) - 1))
    J = _pattern_J(segs)
    ideal = 3.0 * (c_int / 2.0) ** (2.0 / 3.0) * J ** (1.0 / 3.0)
    return CompetitorPlan(kind=kind, yhat=yhat, lam=(lam1, lam2, lam3),
                          segments=segs, c_int=c_int, J=J, ideal=ideal,
                          variant=variant, offset=offset)


def competitor_ideal_energy(spec: PotentialSpec, kind: str, yhat: float,
                            constants: LimitConstants | None = None) -> float:
    """Limit energy of the competitor pattern as eps drops to zero."""
    return competitor_plan(spec, kind, yhat, constants).ideal


def _transition_fn(spec: PotentialSpec, eps: float, za: float, zb: float,
                   rise: ThreeWellRise | None):
    """Mollified gradient transition centered at 0: (callable, lo, hi)."""
    z1, z2, z3 = spec.wells
    eps3 = eps**3
    rising = zb > za
    pair = {min(za, zb), max(za, zb)}
    if pair == {z1, z3}:
        assert rise is not None
        lo, hi = rise.s_min, rise.s_max
        if rising:
            return (lambda r: rise.w_at(r)), lo, hi
        return (lambda r: rise.w_at(-np.asarray(r))), -hi, -lo
    tab = _lower_branch(spec) if pair == {z1, z2} else _upper_branch(spec)
    lo, hi = tab.extent
    if rising:
        return (lambda r: tab.w_at_scaled(np.asarray(r) / eps3)), eps3 * lo, eps3 * hi
    return (lambda r: tab.w_at_scaled(-np.asarray(r) / eps3)), -eps3 * hi, -eps3 * lo


def _build_period(spec: PotentialSpec, eps: float, zvals: list[float],
                  widths: np.ndarray, rise: ThreeWellRise | None,
                  layer_res: int, plateau_pts: int) -> tuple[np.ndarray, np.ndarray]:
    """One period of the mollified pattern on [0, T]."""
    T = float(np.sum(widths))
    bounds = np.concatenate([[0.0], np.cumsum(widths)])
    step = eps**3 / layer_res
    trans = []
    for j in range(len(zvals) - 1):
        fn, lo, hi = _transition_fn(spec, eps, zvals[j], zvals[j + 1], rise)
        if -lo > 0.45 * widths[j] or hi > 0.45 * widths[j + 1]:
            raise ConstructionError(
                "eps too large: a transition does not fit inside its plateau")
        trans.append((bounds[j + 1], fn, lo, hi))

    parts = [np.array([0.0, T])]
    for j in range(len(zvals)):
        npts = max(4, int(plateau_pts * widths[j] / T) + 2)
        parts.append(np.linspace(bounds[j], bounds[j + 1], npts))
    for b, _, lo, hi in trans:
        parts.append(np.arange(b + lo - 2.0 * step, b + hi + 2.0 * step, step))
        parts.append(np.array([b + hi + 2.0 * step]))
    nodes = np.unique(np.concatenate(parts))
    nodes = nodes[(nodes >= 0.0) & (nodes <= T)]
    keep = np.concatenate([[True], np.diff(nodes) > 1e-9 * step])
    nodes = nodes[keep]
    nodes[0], nodes[-1] = 0.0, T

    seg_idx = np.clip(np.searchsorted(bounds, nodes, side="right") - 1, 0, len(zvals) - 1)
    vals = np.asarray(zvals, dtype=float)[seg_idx]
    for b, fn, lo, hi in trans:
        mask = (nodes > b + lo) & (nodes < b + hi)
        if np.any(mask):
            vals[mask] = fn(nodes[mask] - b)
    return nodes, vals


def _build_periodic_pattern(spec: PotentialSpec, eps: float, plan: CompetitorPlan,
                            periods: int, layer_res: int, plateau_pts: int,
                            interval: tuple[float, float] = (0.0, 1.0)) -> GridFunction:
    a, b = interval
    T = (b - a) / periods
    zvals = [z for z, _ in plan.segments]
    widths = np.array([w for _, w in plan.segments]) * T
    if zvals[0] != zvals[-1]:
        raise ConstructionError("pattern must start and end on the same plateau")
    z1, z2, z3 = spec.wells
    rise = None
    if any({min(p, q), max(p, q)} == {z1, z3}
           for p, q in zip(zvals[:-1], zvals[1:])):
        rise = ThreeWellRise(spec, eps)

    # pick the interior boundary with the largest gradient jump and nudge it
    # until the discrete period mean vanishes (it moves by O(eps^3))
    jumps = [abs(zvals[j + 1] - zvals[j]) for j in range(len(zvals) - 1)]
    jstar = int(np.argmax(jumps))
    nodes = vals = None
    for _ in range(6):
        nodes, vals = _build_period(spec, eps, zvals, widths, rise,
                                    layer_res, plateau_pts)
        m = float(np.dot(np.diff(nodes), 0.5 * (vals[:-1] + vals[1:])))
        if abs(m) <= 1e-15 * T * max(abs(z1), z3):
            break
        delta = -m / (zvals[jstar] - zvals[jstar + 1])
        widths[jstar] += delta
        widths[jstar + 1] -= delta
        if widths[jstar] <= 0.0 or widths[jstar + 1] <= 0.0:
            raise ConstructionError("zero-mean correction exhausted a plateau")

    all_nodes = [a + nodes]
    all_vals = [vals]
    for k in range(1, periods):
        all_nodes.append(a + k * T + nodes[1:])
        all_vals.append(vals[1:])
    full_nodes = np.concatenate(all_nodes)
    full_nodes[0] = a
    full_nodes[-1] = b
    return integrate_slopes(full_nodes, np.concatenate(all_vals),
                            eps=eps, meta={})


def competitor_period_count(spec: PotentialSpec, eps: float, plan: CompetitorPlan,
                            length: float = 1.0) -> int:
    """Number of pattern periods: nearest integer to 1/T* with T* = eps*(c/(2J))^(1/3)."""
    t_star = eps * (plan.c_int / (2.0 * plan.J)) ** (1.0 / 3.0)
    return int(round(length / t_star))


def build_h7_competitor(spec: PotentialSpec, eps: float, yhat: float,
                        constants: LimitConstants | None = None,
                        periods_override: int | None = None,
                        layer_res: int = 96, plateau_pts: int = 129) -> GridFunction:
    """Periodic profile with gradient pattern z2|z3|z1 mirrored about mid-period.

    Realizes the volume fractions lambda2 = 1/(yhat*z31 + z21),
    lambda3 = yhat*lambda2; its energy approaches ``competitor_ideal_energy``
    as eps drops.
    """
    return _build_competitor(spec, eps, "h7", yhat, constants,
                             periods_override, layer_res, plateau_pts)


def build_h8_competitor(spec: PotentialSpec, eps: float, yhat: float,
                        constants: LimitConstants | None = None,
                        periods_override: int | None = None,
                        layer_res: int = 96, plateau_pts: int = 129) -> GridFunction:
    """Periodic profile with pattern z1|z2|z3|z1 (or z1|z3|z2|z1 above the
    branch threshold sqrt(z2*z21/(z3*z31))), offset so the primitive's sign
    change sits at the energy-optimal phase."""
    return _build_competitor(spec, eps, "h8", yhat, constants,
                             periods_override, layer_res, plateau_pts)


def _build_competitor(spec: PotentialSpec, eps: float, kind: str, yhat: float,
                      constants: LimitConstants | None,
                      periods_override: int | None,
                      layer_res: int, plateau_pts: int) -> GridFunction:
    if eps <= 0.0:
        raise ParameterError("eps must be positive")
    c = constants if constants is not None else limit_constants(spec)
    plan = competitor_plan(spec, kind, yhat, c)
    periods = periods_override if periods_override is not None else \
        competitor_period_count(spec, eps, plan)
    if periods < 2:
        raise ConstructionError("eps too large: fewer than 2 pattern periods fit")
    gf = _build_periodic_pattern(spec, eps, plan, periods, layer_res, plateau_pts)
    gf.meta.update({
        "kind": f"{kind}-competitor", "yhat": yhat, "periods": periods,
        "lambda1": plan.lam[0], "lambda2": plan.lam[1], "lambda3": plan.lam[2],
        "ideal_energy": plan.ideal, "variant": plan.variant, "offset": plan.offset,
    })
    return gf
