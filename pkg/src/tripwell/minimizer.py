"""Local minimization of the discrete rescaled energy and the eps-sweep harness.

The discrete problem is nonconvex, so global behaviour is approximated by
multi-start local descent: the construction-informed seeds (two-well and
three-well profiles, plus competitor patterns when a structural hypothesis
fails) realize the candidate limit microstructures, and random sawtooth
perturbations guard against seed bias.  Descent runs on the interior nodal
values with the exact discrete gradient; boundary values stay pinned at zero.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .analysis import transition_layers, volume_fractions
from .constants import LimitConstants, check_hypotheses, limit_constants
from .energy import energy_gradient, energy_Ieps
from .errors import ConstructionError, ParameterError
from .grids import GridFunction
from .microstructure import (
    build_h7_competitor,
    build_h8_competitor,
    build_three_well_profile,
    build_two_well_sawtooth,
)
from .potential import coercivity_of

QUASI_NEWTON = "quasi-newton"
GRADIENT_ARMIJO = "gradient-armijo"


@dataclass(frozen=True)
class MinimizeOptions:
    """Knobs for one local descent and for the multi-start orchestration."""

    grid_n: int = 20001            # uniform grid size for random starts
    max_iters: int = 200
    grad_tol: float = 1e-4         # sup-norm stopping threshold
    starts: int = 5
    seed: int = 0
    step_rule: str = QUASI_NEWTON

    def __post_init__(self):
        if self.grad_tol <= 0.0:
            raise ParameterError("grad_tol must be positive")
        if self.starts < 1:
            raise ParameterError("need at least one start")


@dataclass
class MinimizeResult:
    u: GridFunction
    value: float
    converged: bool
    iterations: int
    start_kind: str = ""
    history: list = field(default_factory=list)
    per_start: list = field(default_factory=list)


@dataclass
class SweepRecord:
    """Observables of one eps entry: best energy and measure diagnostics."""

    eps: float
    best_value: float
    lambda1: float
    lambda2: float
    lambda3: float
    n_layers_A: int
    n_layers_B: int
    start_kind: str
    eta: float = 0.0
    start_values: dict = field(default_factory=dict)


def minimize_Ieps(spec, eps: float, init: GridFunction,
                  opts: MinimizeOptions = MinimizeOptions()) -> MinimizeResult:
    """Descend the discrete rescaled energy from ``init`` over interior values.

    Quasi-Newton (L-BFGS) with line search by default; accepted iterates are
    nonincreasing in energy, and the best visited point is returned even when
    the line search stalls (``converged`` is False then).
    """
    nodes = init.nodes
    full = init.values.copy()
    history = [float(energy_Ieps(init, eps, spec).total)]

    best = {"f": history[0], "x": full[1:-1].copy()}

    def fg(x):
        full[1:-1] = x
        gf = GridFunction(nodes, full, eps=eps)
        f = float(energy_Ieps(gf, eps, spec).total)
        g = energy_gradient(gf, eps, spec)
        if f < best["f"]:
            best["f"] = f
            best["x"] = x.copy()
        return f, g

    x0 = full[1:-1].copy()
    if opts.step_rule == QUASI_NEWTON:
        res = optimize.minimize(
            fg, x0, jac=True, method="L-BFGS-B",
            callback=lambda xk: history.append(float(fg(xk)[0])),
            options={"maxiter": opts.max_iters, "gtol": opts.grad_tol,
                     "ftol": 1e-16, "maxcor": 12},
        )
        iterations = int(res.nit)
        line_ok = res.status != 2
    elif opts.step_rule == GRADIENT_ARMIJO:
        iterations, line_ok = _armijo_descent(fg, x0, opts, history)
    else:
        raise ParameterError(f"unknown step rule {opts.step_rule!r}")

    full[1:-1] = best["x"]
    full[0] = 0.0
    full[-1] = 0.0
    u_best = GridFunction(nodes.copy(), full.copy(), eps=eps, meta=dict(init.meta))
    g_final = energy_gradient(u_best, eps, spec)
    converged = bool(line_ok and np.max(np.abs(g_final)) <= opts.grad_tol)
    return MinimizeResult(u=u_best, value=best["f"], converged=converged,
                          iterations=iterations, history=history)


def _armijo_descent(fg, x, opts, history):
    f, g = fg(x)
    step = 1.0 / max(1.0, float(np.max(np.abs(g))))
    for it in range(opts.max_iters):
        if np.max(np.abs(g)) <= opts.grad_tol:
            return it, True
        gnorm2 = float(np.dot(g, g))
        t = step
        while t > 1e-20:
            xn = x - t * g
            fn, gn = fg(xn)
            if fn <= f - 1e-4 * t * gnorm2:
                x, f, g = xn, fn, gn
                history.append(f)
                step = min(t * 2.0, 1e6)
                break
            t *= 0.5
        else:
            return it, False
    return opts.max_iters, True


def _random_sawtooth(spec, eps: float, n: int, base_count: int,
                     rng: np.random.Generator) -> GridFunction:
    """Uniform-grid sawtooth with jittered tooth count and smooth noise."""
    z1, z2, _ = spec.wells
    count = max(2, int(round(base_count * rng.uniform(0.6, 1.6))))
    nodes = np.linspace(0.0, 1.0, n)
    frac = z2 / (z2 - z1)               # zero-mean share of the falling flank
    phase = (nodes * count) % 1.0
    # integral of the ideal tooth gradient: rises at z2 then falls at z1
    l = 1.0 / count
    local = phase * l
    peak = (1.0 - frac) * l * z2
    up = np.minimum(local, (1.0 - frac) * l) * z2
    down = np.maximum(local - (1.0 - frac) * l, 0.0) * z1
    u = up + down
    u = u - nodes * u[-1]
    k = np.arange(1, 6)
    coeffs = rng.normal(0.0, 1.0, 5) * peak * 0.2
    u = u + np.sin(np.pi * np.outer(nodes, k)) @ coeffs
    u[0] = 0.0
    u[-1] = 0.0
    return GridFunction(nodes, u, eps=eps, meta={"kind": "random-sawtooth",
                                                 "count": count})


def _build_seeds(spec, eps: float, opts: MinimizeOptions,
                 constants: LimitConstants) -> list[tuple[str, GridFunction]]:
    seeds: list[tuple[str, GridFunction]] = [
        ("two-well", build_two_well_sawtooth(spec, eps, constants=constants)),
    ]
    if opts.starts >= 2:
        seeds.append(("three-well",
                      build_three_well_profile(spec, eps, constants=constants)))
    if opts.starts > 2:
        report = check_hypotheses(spec, constants=constants)
        for verdict, builder, kind in (
            (report.h7, build_h7_competitor, "h7-competitor"),
            (report.h8, build_h8_competitor, "h8-competitor"),
        ):
            if verdict.status == "fails" and len(seeds) < opts.starts:
                seeds.append((kind, builder(spec, eps, verdict.worst_y,
                                            constants=constants)))
    rng = np.random.default_rng(opts.seed)
    base = seeds[0][1].meta.get("N", 4)
    idx = 0
    while len(seeds) < opts.starts:
        seeds.append((f"random-{idx}",
                      _random_sawtooth(spec, eps, opts.grid_n, base, rng)))
        idx += 1
    return seeds[: opts.starts]


def multi_start(spec, eps: float, opts: MinimizeOptions = MinimizeOptions(),
                constants: LimitConstants | None = None) -> MinimizeResult:
    """Run descent from every seed and return the argmin.

    Fully deterministic given ``opts.seed``; ties break on start order.  Seeds
    that fail to construct or to take a single step are recorded and skipped;
    if every start fails, the per-start reasons are aggregated.
    """
    c = constants if constants is not None else limit_constants(spec)
    seeds = _build_seeds(spec, eps, opts, c)
    results: list[MinimizeResult] = []
    failures: list[str] = []
    for kind, seed in seeds:
        try:
            r = minimize_Ieps(spec, eps, seed, opts)
        except Exception as exc:  # noqa: BLE001 - aggregate per-start failures
            failures.append(f"{kind}: {exc}")
            continue
        r.start_kind = kind
        results.append(r)
    if not results:
        raise ConstructionError("all starts failed: " + "; ".join(failures))
    best = min(range(len(results)), key=lambda i: (results[i].value, i))
    out = results[best]
    out.per_start = [(r.start_kind, r.value, r.converged) for r in results]
    return out


def epsilon_sweep(spec, eps_list, opts: MinimizeOptions = MinimizeOptions(),
                  constants: LimitConstants | None = None) -> list[SweepRecord]:
    """Multi-start minimization along a decreasing eps ladder.

    Volume fractions are evaluated at eta = eps^(1/(q+1)); layer counts use
    the same eta capped below the band-degeneracy bound (at moderate eps the
    natural window is too wide for the layer definitions to make sense).
    """
    eps_list = [float(e) for e in eps_list]
    if any(b >= a for a, b in zip(eps_list[:-1], eps_list[1:])):
        raise ParameterError("eps ladder must be strictly decreasing")
    c = constants if constants is not None else limit_constants(spec)
    q = coercivity_of(spec).q
    z1, z2, z3 = spec.wells
    eta_layer_cap = 0.45 * min(z2 - z1, z3 - z2)
    records: list[SweepRecord] = []
    for eps in eps_list:
        best = multi_start(spec, eps, opts, c)
        eta = eps ** (1.0 / (q + 1.0))
        vf = volume_fractions(best.u, spec, min(eta, 0.5 * (z3 - z1) - 1e-9))
        layers = transition_layers(best.u, spec, min(eta, eta_layer_cap))
        n_a = sum(1 for L in layers if L.kind == "A+")
        n_b = sum(1 for L in layers if L.kind == "B+")
        records.append(SweepRecord(
            eps=eps, best_value=best.value,
            lambda1=vf.lam[0], lambda2=vf.lam[1], lambda3=vf.lam[2],
            n_layers_A=n_a, n_layers_B=n_b,
            start_kind=best.start_kind, eta=eta,
            start_values={k: v for k, v, _ in best.per_start},
        ))
    return records


SWEEP_COLUMNS = ("eps", "best_value", "lambda1", "lambda2", "lambda3",
                 "layersA", "layersB", "start_kind")


def sweep_to_csv(records: list[SweepRecord]) -> str:
    """Render sweep records as CSV (12 significant digits, LF newlines)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in records:
        writer.writerow([
            _fmt(r.eps), _fmt(r.best_value), _fmt(r.lambda1), _fmt(r.lambda2),
            _fmt(r.lambda3), r.n_layers_A, r.n_layers_B, r.start_kind,
        ])
    return buf.getvalue()


def _fmt(x: float) -> str:
    return f"{x:.12g}"
