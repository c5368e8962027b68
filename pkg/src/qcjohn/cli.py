"""Command-line interface.

Subcommands select diagnostic suites; every run writes ``report.json``,
CSV plot data, and companion PNG figures into the output directory.

    qcjohn analyze --map identity --out out/
    qcjohn john --map analytic --params '{"expr": "lune"}' --out out/
    qcjohn coeffs --spec mymap.json --out out/

Exit status: 0 on completion, 2 on invariant or configuration violations,
3 on evaluation errors.
"""

from __future__ import annotations

import json
import sys

import click

from .errors import ConfigError, InvariantViolation, ParseError, QCJohnError
from .john import JohnThresholds
from .report import ALL_SUITES, RunConfig, config_from_file, run

_SUITE_BY_COMMAND = {
    "analyze": ALL_SUITES,
    "john": ("john",),
    "pommerenke": ("pommerenke",),
    "preschwarzian": ("schwarz",),
    "hardy": ("hardy",),
    "coeffs": ("coeffs",),
    "lemmas": ("lemmas",),
}


def _common_options(fn):
    options = [
        click.option("--map", "map_name", default=None, help="Catalog map name."),
        click.option("--params", "params_json", default=None,
                     help="JSON object with catalog parameters."),
        click.option("--spec", "spec_path", type=click.Path(exists=True),
                     default=None, help="Map-spec JSON file."),
        click.option("--alpha", type=float, default=None,
                     help="Growth constant for the distortion envelopes."),
        click.option("--epsilon", type=float, default=None,
                     help="Boundary mesh offset, in (0, 0.05]."),
        click.option("--ladder", "ladder_depth", type=int, default=None,
                     help="Radius ladder depth (4..20)."),
        click.option("--rays", type=int, default=None,
                     help="Number of boundary directions."),
        click.option("--out", "out_dir", default=None,
                     help="Output directory for report, CSVs and figures."),
        click.option("--config", "config_path", type=click.Path(exists=True),
                     default=None, help="JSON config file mirroring the run options."),
        click.option("--suites", "suites_csv", default=None,
                     help="Comma-separated suite override."),
        click.option("--no-figures", is_flag=True, default=False,
                     help="Skip PNG rendering."),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


def _build_config(command: str, map_name, params_json, spec_path, alpha, epsilon,
                  ladder_depth, rays, out_dir, config_path, suites_csv,
                  no_figures) -> RunConfig:
    base: dict = {}
    if config_path:
        base = config_from_file(config_path)
    params = dict(base.get("params", {}))
    if params_json:
        try:
            parsed = json.loads(params_json)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--params is not valid JSON: {exc}") from exc
        if not isinstance(parsed, dict):
            raise ConfigError("--params must encode a JSON object")
        params.update(parsed)

    suites = tuple(base.get("suites", _SUITE_BY_COMMAND[command]))
    if command != "analyze":
        suites = _SUITE_BY_COMMAND[command]
    if suites_csv:
        suites = tuple(s.strip() for s in suites_csv.split(",") if s.strip())

    try:
        thresholds = JohnThresholds(**base.get("thresholds", {}))
    except TypeError as exc:
        raise ConfigError(f"bad thresholds in config file: {exc}") from exc
    kwargs = {
        "map_name": map_name if map_name is not None else base.get("map"),
        "map_params": params,
        "spec_path": spec_path if spec_path is not None else base.get("spec"),
        "suites": suites,
        "thresholds": thresholds,
        "figures": (not no_figures) and base.get("figures", True),
    }
    for key, cli_val in (
        ("ladder_depth", ladder_depth),
        ("rays", rays),
        ("epsilon", epsilon),
        ("alpha", alpha),
        ("out_dir", out_dir),
    ):
        if cli_val is not None:
            kwargs[key] = cli_val
        elif key in base:
            kwargs[key] = base[key]
    for key in ("mesh_n", "box_samples", "pairs_per_circle", "seed"):
        if key in base:
            kwargs[key] = base[key]
    return RunConfig(**kwargs)


def _execute(command: str, **kwargs):
    try:
        config = _build_config(command, **kwargs)
        code = run(config)
    except (ConfigError, InvariantViolation, ParseError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except QCJohnError as exc:
        click.echo(f"evaluation error: {exc}", err=True)
        sys.exit(3)
    sys.exit(code)


@click.group()
def main():
    """Boundary-geometry diagnostics for harmonic maps of the disk."""


def _register(command: str, help_text: str):
    @main.command(name=command, help=help_text)
    @_common_options
    def _cmd(**kwargs):
        _execute(command, **kwargs)

    return _cmd


_register("analyze", "Run every diagnostic suite.")
_register("john", "Radial John constant, decay fit, and box criterion.")
_register("pommerenke", "Subarc-length over connection-diameter bracket.")
_register("preschwarzian", "Pre-Schwarzian boundary test and rectifiability.")
_register("hardy", "Integral means and norm estimates of the frame norm.")
_register("coeffs", "Coefficient tables, weighted sums, critical exponent.")
_register("lemmas", "Distortion-envelope and arc-diameter checks.")


if __name__ == "__main__":
    main()
