"""Run orchestration: assemble suite reports, CSV plot data, and figures.

``run`` executes the configured suites against one map and writes a
deterministic ``report.json`` (fixed key order, no timestamps) plus one CSV
per plot series; figures are rendered next to their CSVs unless disabled.
Exit codes: 0 on completion, 2 on invariant/configuration violations, 3 on
evaluation errors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import figures
from .errors import (
    ConfigError,
    InvariantViolation,
    NotSelfMap,
    QCJohnError,
)
from .frame import (
    frame_fields,
    lower_growth_exponent_fit,
    polar_grid,
    qc_constant,
    check_selfmap_distortion,
)
from .geometry import boundary_mesh
from .hardy import (
    beta_critical,
    coefficient_sum,
    coefficient_table,
    derivative_energy_series,
    energy_field,
    hardy_norm,
    integral_mean,
    opnorm_field,
)
from .hyperbolic import (
    AlphaConfig,
    check_analytic_envelope,
    check_frame_comparability,
)
from .john import (
    JohnConfig,
    JohnThresholds,
    check_arc_diameter_bound,
    check_frame_distance_bound,
    john_report,
    radius_ladder,
    tail_diagnostics,
)
from .maps import HarmonicMap, catalog_get, load_map_spec
from .margins import _num
from .schwarz import preschwarzian_boundary_test, rectifiability_check, schwarz_pick_check

ALL_SUITES = ("frame", "john", "pommerenke", "schwarz", "hardy", "coeffs", "lemmas")


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration of one diagnostic run."""

    map_name: str | None = None
    map_params: dict = field(default_factory=dict)
    spec_path: str | None = None
    suites: tuple = ALL_SUITES
    ladder_depth: int = 10
    rays: int = 32
    epsilon: float = 1e-3
    alpha: float = 2.5
    mesh_n: int = 2048
    box_samples: int = 32
    pairs_per_circle: int = 256
    thresholds: JohnThresholds = field(default_factory=JohnThresholds)
    out_dir: str = "qcjohn-out"
    figures: bool = True
    seed: int = 2023

    def __post_init__(self):
        if not self.suites:
            raise ConfigError("at least one suite must be selected")
        unknown = set(self.suites) - set(ALL_SUITES)
        if unknown:
            raise ConfigError(f"unknown suites: {sorted(unknown)}")
        if not (0.0 < self.epsilon <= 0.05):
            raise ConfigError("epsilon must lie in (0, 0.05]")
        if not (4 <= self.ladder_depth <= 20):
            raise ConfigError("ladder depth must lie in [4, 20]")
        if (self.map_name is None) == (self.spec_path is None):
            raise ConfigError("exactly one of map name or spec path is required")

    def to_jsonable(self) -> dict:
        return {
            "map": self.map_name,
            "params": _jsonable_params(self.map_params),
            "spec": self.spec_path,
            "suites": list(self.suites),
            "ladder_depth": self.ladder_depth,
            "rays": self.rays,
            "epsilon": self.epsilon,
            "alpha": self.alpha,
            "mesh_n": self.mesh_n,
            "box_samples": self.box_samples,
            "pairs_per_circle": self.pairs_per_circle,
            "thresholds": self.thresholds.to_jsonable(),
            "out": self.out_dir,
            "figures": self.figures,
            "seed": self.seed,
        }

    def john_config(self) -> JohnConfig:
        return JohnConfig(
            ladder_depth=self.ladder_depth,
            rays=self.rays,
            epsilon=self.epsilon,
            mesh_n=self.mesh_n,
            alpha=self.alpha,
            box_samples=self.box_samples,
            pairs_per_circle=self.pairs_per_circle,
            thresholds=self.thresholds,
        )


def config_from_file(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    return doc


def _jsonable_params(params: dict) -> dict:
    out = {}
    for key, value in sorted(params.items()):
        if isinstance(value, complex):
            out[key] = [value.real, value.imag]
        else:
            out[key] = value
    return out


def resolve_map(config: RunConfig) -> HarmonicMap:
    if config.spec_path is not None:
        with open(config.spec_path, "rb") as fh:
            return load_map_spec(fh.read())
    return catalog_get(config.map_name, **config.map_params)


def emit_plot_data(x, columns: dict, path) -> None:
    """Write plot series as CSV: header ``x,<label>...``, 17 significant digits."""
    x = list(x)
    labels = list(columns)
    for label in labels:
        if len(columns[label]) != len(x):
            raise ConfigError(f"column {label!r} length differs from x")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(["x"] + labels) + "\n")
        for i, xv in enumerate(x):
            row = [xv] + [columns[label][i] for label in labels]
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return "%.17g" % float(v)


def _sample_points(rng, count: int, r_max: float = 0.9) -> np.ndarray:
    radii = np.sqrt(rng.uniform(0.0, r_max ** 2, count))
    angles = rng.uniform(0.0, 2.0 * np.pi, count)
    return radii * np.exp(1j * angles)


def _suite_frame(mapping, config, geom, out, artifacts):
    rng = np.random.default_rng(config.seed)
    try:
        k_hat = mapping.known_k if mapping.known_k is not None else qc_constant(mapping)
        not_qc = not math.isfinite(k_hat)
    except QCJohnError:
        k_hat = math.inf
        not_qc = True
    section = {
        "known_K": _num(mapping.known_k) if mapping.known_k is not None else None,
        "K_hat": _num(k_hat),
        "lower_growth_exponent": _num(
            lower_growth_exponent_fit(mapping, ladder=radius_ladder(config.ladder_depth))
        ),
    }
    grid = polar_grid(32, 64)
    fields = frame_fields(mapping, grid)
    prod = fields["opnorm"] * fields["lnorm"]
    section["identity_residual"] = float(
        np.max(np.abs(prod - np.abs(fields["jacobian"])) / np.maximum(prod, 1e-300))
    )
    # Self-map distortion margins only make sense for disk self-maps.
    try:
        samples = _sample_points(rng, 256, 0.95)
        rep = check_selfmap_distortion(mapping, k_hat if not not_qc else 1.0, samples)
        section["selfmap_distortion"] = rep.summary()
    except (NotSelfMap, QCJohnError):
        section["selfmap_distortion"] = None
    if geom is not None:
        samples = _sample_points(rng, 128, 0.9)
        rep = check_frame_distance_bound(mapping, geom, samples, k=None if not_qc else k_hat)
        section["frame_distance_bound"] = rep.summary()
        emit_plot_data(
            np.abs([s.z for s in rep.samples]),
            {"lower_margin": [s.lower for s in rep.samples],
             "upper_margin": [s.upper for s in rep.samples]},
            out / "frame_distance_margins.csv",
        )
        artifacts.append(("frame_distance_margins", "scatter", {
            "title": "frame vs distance bound margins", "ylabel": "margin",
        }))
    else:
        section["frame_distance_bound"] = None
    return section


def _suite_john(mapping, config, out, artifacts):
    rep = john_report(mapping, config.john_config())
    section = rep.to_jsonable()
    curve = rep.fit_full.violation_curve
    bound = rep.fit_full.m_hat * curve[:, 0] ** (rep.fit_full.delta_hat - 1.0)
    emit_plot_data(
        curve[:, 0],
        {"ratio": curve[:, 1], "bound": bound},
        out / "john_violation_curve.csv",
    )
    artifacts.append(("john_violation_curve", "loglog", {
        "title": f"radial decay ratios ({mapping.label})", "ylabel": "ratio",
    }))
    if math.isfinite(rep.c) and rep.k_hat is not None and math.isfinite(rep.k_hat):
        m0 = 4.0 * rep.c * rep.k_hat ** 2 / (1.0 + rep.k_hat)
        ray = mapping.singular_rays[0] if mapping.singular_rays else 1.0 + 0.0j
        tails = tail_diagnostics(
            mapping, ray, radius_ladder(config.ladder_depth), m0=m0
        )
        section_tail = {
            "m0": _num(tails.m0),
            "bound_ok": all(tails.bound_ok),
            "scaled_tail_nonincreasing": tails.s_nonincreasing,
        }
        emit_plot_data(
            tails.radii,
            {"T": tails.t_vals, "E": tails.e_vals, "S": tails.s_vals},
            out / "john_tail_diagnostics.csv",
        )
        artifacts.append(("john_tail_diagnostics", "line", {
            "title": f"radial tail integrals ({mapping.label})", "ylabel": "value",
        }))
    else:
        section_tail = None
    return {"john": section, "tail": section_tail}, rep


def _suite_pommerenke(mapping, config, out, artifacts):
    from .john import pommerenke_interior

    radii = tuple(r for r in radius_ladder(min(config.ladder_depth, 8)) if r > 0)
    per_level_lo = []
    per_level_hi = []
    for r in radii:
        val = pommerenke_interior(
            mapping, (r,), config.pairs_per_circle,
            JohnThresholds(blowup_factor=math.inf, saturation_tol=math.inf),
        )
        per_level_lo.append(val[0])
        per_level_hi.append(val[1])
    bracket = pommerenke_interior(
        mapping, radii, config.pairs_per_circle, config.thresholds
    )
    if isinstance(bracket, tuple):
        value = [_num(bracket[0]), _num(bracket[1])]
    else:
        value = _num(bracket)
    emit_plot_data(
        radii,
        {"lo": per_level_lo, "hi": per_level_hi},
        out / "pommerenke_levels.csv",
    )
    artifacts.append(("pommerenke_levels", "line", {
        "title": f"subarc/diameter ratios ({mapping.label})", "ylabel": "ratio",
    }))
    return {"Mgamma": value, "radii": [float(r) for r in radii]}


def _suite_schwarz(mapping, config, out, artifacts):
    ladder = radius_ladder(config.ladder_depth)
    bt = preschwarzian_boundary_test(mapping, ladder)
    rect = rectifiability_check(mapping, ladder=ladder)
    rng = np.random.default_rng(config.seed + 1)
    sp = schwarz_pick_check(mapping, _sample_points(rng, 200, 0.9))
    emit_plot_data(
        bt.radii, {"circle_max": bt.maxima}, out / "preschwarzian_maxima.csv"
    )
    artifacts.append(("preschwarzian_maxima", "line", {
        "title": f"boundary growth of Re(z P_f) ({mapping.label})",
        "ylabel": "(1-r^2) max Re(z P_f)", "hline": 1.0,
    }))
    return {
        "boundary_estimate": _num(bt.estimate),
        "boundary_margin": bt.margin,
        "boundary_pass": bt.passed,
        "rectifiable_rays": sum(1 for r in rect if r.verdict == "finite"),
        "divergent_rays": sum(1 for r in rect if r.verdict == "divergent"),
        "inconclusive_rays": sum(1 for r in rect if r.verdict == "inconclusive"),
        "dilatation_bound": sp.summary(),
    }


def _suite_hardy(mapping, config, out, artifacts):
    ladder = radius_ladder(config.ladder_depth)
    field = opnorm_field(mapping)
    means = [integral_mean(field, 1.0, r) for r in ladder if r > 0]
    norm = hardy_norm(field, 1.0, ladder, config.thresholds)
    checks = []
    for r in (0.25, 0.5, 0.75):
        series_side = derivative_energy_series(mapping, r)
        quad_side = integral_mean(energy_field(mapping), 1.0, r)
        checks.append({
            "r": r,
            "series": _num(series_side.value),
            "quadrature": _num(quad_side),
            "tail_bound": _num(series_side.tail_bound),
        })
    emit_plot_data(
        [r for r in ladder if r > 0], {"M1_opnorm": means}, out / "hardy_means.csv"
    )
    artifacts.append(("hardy_means", "line", {
        "title": f"integral means of the frame norm ({mapping.label})",
        "ylabel": "M_1(r)",
    }))
    return {"norm_opnorm_p1": _num(norm), "energy_identity": checks}


def _suite_coeffs(mapping, config, out, artifacts):
    table = coefficient_table(mapping, 256)
    sums = {}
    columns = {}
    n_axis = np.arange(2, table.order + 1)
    for beta in (0.1, 0.5, 1.0):
        cs = coefficient_sum(table, beta)
        sums[f"beta_{beta:g}"] = {
            "final": _num(float(cs.partial_sums[-1])),
            "convergent": cs.convergent,
        }
        columns[f"S_beta_{beta:g}"] = cs.partial_sums
    crit = beta_critical(table)
    emit_plot_data(n_axis, columns, out / "coeff_sums.csv")
    artifacts.append(("coeff_sums", "loglog", {
        "title": f"coefficient partial sums ({mapping.label})", "ylabel": "S_N",
    }))
    return {"beta_critical": _num(crit), "sums": sums}


def _suite_lemmas(mapping, config, geom, out, artifacts, john_rep):
    rng = np.random.default_rng(config.seed + 2)
    alpha = AlphaConfig(config.alpha)
    samples = _sample_points(rng, 200, 0.9)
    env = check_analytic_envelope(mapping, alpha, samples)
    pair_pts = _sample_points(rng, 200, 0.9)
    pairs = list(zip(pair_pts[:100], pair_pts[100:]))
    comp = check_frame_comparability(mapping, alpha, pairs)
    section = {
        "alpha": config.alpha,
        "analytic_envelope": env.summary(),
        "frame_comparability": comp.summary(),
    }
    if geom is not None and john_rep is not None:
        k_hat = john_rep.k_hat
        delta = john_rep.fit_full.delta_hat
        m_const = john_rep.fit_full.m_hat
        arc_checks = []
        for a in (0.5, 0.5j, -0.7):
            res = check_arc_diameter_bound(
                mapping, geom, a, m_const, delta, config.alpha, k_hat,
                config.thresholds.delta_floor,
            )
            arc_checks.append({
                "a": [complex(a).real, complex(a).imag],
                "status": res.status,
                "lhs": _num(res.lhs) if not math.isnan(res.lhs) else None,
                "rhs": _num(res.rhs) if not math.isnan(res.rhs) else None,
            })
        section["arc_diameter_bound"] = arc_checks
    else:
        section["arc_diameter_bound"] = None
    emit_plot_data(
        np.abs(samples),
        {"envelope_lower_margin": [s.lower for s in env.samples],
         "envelope_upper_margin": [s.upper for s in env.samples]},
        out / "lemma_envelope_margins.csv",
    )
    artifacts.append(("lemma_envelope_margins", "scatter", {
        "title": f"analytic-part envelope margins ({mapping.label})",
        "ylabel": "margin",
    }))
    return section


def run(config: RunConfig) -> int:
    """Execute the configured suites; returns the process exit code."""
    try:
        mapping = resolve_map(config)
    except (InvariantViolation, ConfigError):
        raise
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    artifacts: list = []
    report: dict = {
        "label": mapping.label,
        "config": config.to_jsonable(),
        "suites": {},
    }
    geom = None
    if mapping.bounded_image:
        geom = boundary_mesh(mapping, config.epsilon, config.mesh_n)
        emit_plot_data(
            geom.theta,
            {"re": geom.boundary.real, "im": geom.boundary.imag},
            out / "boundary_mesh.csv",
        )
        artifacts.append(("boundary_mesh", "mesh", {
            "title": f"image boundary ({mapping.label})",
        }))

    john_rep = None
    for suite in ALL_SUITES:
        if suite not in config.suites:
            continue
        if suite == "frame":
            report["suites"]["frame"] = _suite_frame(mapping, config, geom, out, artifacts)
        elif suite == "john":
            if geom is None:
                report["suites"]["john"] = None
            else:
                section, john_rep = _suite_john(mapping, config, out, artifacts)
                report["suites"]["john"] = section
        elif suite == "pommerenke":
            if geom is None:
                report["suites"]["pommerenke"] = None
            else:
                report["suites"]["pommerenke"] = _suite_pommerenke(
                    mapping, config, out, artifacts
                )
        elif suite == "schwarz":
            report["suites"]["schwarz"] = _suite_schwarz(mapping, config, out, artifacts)
        elif suite == "hardy":
            report["suites"]["hardy"] = _suite_hardy(mapping, config, out, artifacts)
        elif suite == "coeffs":
            report["suites"]["coeffs"] = _suite_coeffs(mapping, config, out, artifacts)
        elif suite == "lemmas":
            report["suites"]["lemmas"] = _suite_lemmas(
                mapping, config, geom, out, artifacts, john_rep
            )

    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")

    if config.figures:
        for name, kind, opts in artifacts:
            figures.render_csv(out / f"{name}.csv", out / f"{name}.png", kind, **opts)
    return 0
