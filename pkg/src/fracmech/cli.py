"""``fracmech`` command line.

Exit codes: 0 ok, 1 a verification failed its threshold, 2 config or parse
error, 3 domain error, 4 non-contractive problem, 5 iteration cap reached.
"""

from __future__ import annotations

import contextlib
import json
import math
import os
import sys
import warnings
from pathlib import Path

import click
import numpy as np

from . import fracops as fo
from . import hamjacobi as hj
from . import selftest as st
from .errors import DivergentForcing, DomainError, MaxIterExceeded, NonContractive
from .mechanics import AXIOMS, check_bracket_axioms, fp_bracket
from .oscillator import OscillatorParams, SolveReport, solve_fo
from .symexpr import parse, render

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_DOMAIN, EXIT_NONCONTRACTIVE, EXIT_MAXITER = 0, 1, 2, 3, 4, 5

OPERATORS = {
    "rl-int-left": (fo.left_rl_integral, "left_int"),
    "rl-int-right": (fo.right_rl_integral, "right_int"),
    "caputo-left": (fo.left_caputo, "left_caputo"),
    "caputo-right": (fo.right_caputo, "right_caputo"),
    "rl-d-left": (fo.left_rl_derivative, "left_rl_d"),
    "rl-d-right": (fo.right_rl_derivative, "right_rl_d"),
}


class ConfigError(Exception):
    """Bad user input; the message names the offending field."""


# -- config ------------------------------------------------------------------


def read_config(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` pairs, one per line, ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _typed(section: str, raw: dict[str, str], schema: dict) -> dict:
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"{section}.{unknown[0]}: unknown key")
    cfg = {}
    for key, (kind, default) in schema.items():
        if key not in raw:
            if default is None:
                raise ConfigError(f"{section}.{key}: required")
            cfg[key] = default
            continue
        try:
            cfg[key] = kind(raw[key])
        except ValueError:
            raise ConfigError(f"{section}.{key}: cannot read {raw[key]!r} as {kind.__name__}") from None
        if kind is float and not math.isfinite(cfg[key]):
            raise ConfigError(f"{section}.{key}: must be finite")
    return cfg


def _require(cond: bool, field_path: str, message: str):
    if not cond:
        raise ConfigError(f"{field_path}: {message}")


OSCILLATOR_SCHEMA = {
    "m_alpha": (float, None), "k": (float, None), "charge": (float, 0.0), "field_E": (float, 0.0),
    "alpha": (float, None), "a": (float, 0.0), "b": (float, None), "n": (int, 1024),
    "e0": (float, 0.0), "e1": (float, 0.0), "tol": (float, 1e-12), "max_iter": (int, 500),
}


def oscillator_from_config(raw: dict[str, str]) -> tuple[OscillatorParams, float, int]:
    c = _typed("oscillator", raw, OSCILLATOR_SCHEMA)
    _require(c["m_alpha"] > 0, "oscillator.m_alpha", "must be positive")
    _require(c["k"] >= 0, "oscillator.k", "must be non-negative")
    _require(0 < c["alpha"] <= 1, "oscillator.alpha", "must lie in (0, 1]")
    _require(c["b"] > c["a"], "oscillator.b", "must exceed a")
    _require(c["n"] >= 2, "oscillator.n", "must be at least 2")
    _require(c["tol"] > 0, "oscillator.tol", "must be positive")
    _require(c["max_iter"] >= 1, "oscillator.max_iter", "must be at least 1")
    p = OscillatorParams(
        c["m_alpha"], c["k"], c["charge"], c["field_E"], c["alpha"],
        fo.Grid(c["a"], c["b"], c["n"]), e0=c["e0"], e1=c["e1"],
    )
    return p, c["tol"], c["max_iter"]


HJ_SCHEMA = {
    "m_alpha": (float, st.HJ_DEFAULTS["m_alpha"]), "k": (float, st.HJ_DEFAULTS["k"]),
    "charge": (float, st.HJ_DEFAULTS["charge"]), "field_E": (float, st.HJ_DEFAULTS["field_E"]),
    "beta_sep": (float, st.HJ_DEFAULTS["beta_sep"]), "hbar": (float, 1.0),
    "amplitude": (str, "constant"), "amplitude_slope": (float, 0.1),
    "samples": (int, 100), "scale": (float, hj.DEFAULT_DOMAIN_SCALE),
    "hj_tol": (float, 1e-12), "madelung_tol": (float, 1e-12), "wave_tol": (float, 1e-6),
}


def hj_from_config(raw: dict[str, str]) -> dict:
    c = _typed("verify-hj", raw, HJ_SCHEMA)
    _require(c["m_alpha"] > 0, "verify-hj.m_alpha", "must be positive")
    _require(c["k"] >= 0, "verify-hj.k", "must be non-negative")
    _require(c["hbar"] >= 0, "verify-hj.hbar", "must be non-negative")
    _require(c["amplitude"] in ("constant", "linear"), "verify-hj.amplitude",
             "must be 'constant' or 'linear'")
    _require(c["samples"] >= 1, "verify-hj.samples", "must be at least 1")
    _require(c["scale"] > 0, "verify-hj.scale", "must be positive")
    return c


# -- output ------------------------------------------------------------------


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]):
    """17 significant digits, ``.`` decimal, LF line endings."""
    rows = np.column_stack(columns) if columns else np.empty((0, len(header)))
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return "%.17g" % v


def write_json(path: Path, record: dict):
    with open(path, "w", newline="\n") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _value_columns(name: str, values: np.ndarray) -> tuple[list[str], list[np.ndarray]]:
    if np.iscomplexobj(values):
        return [f"{name}_re", f"{name}_im"], [values.real, values.imag]
    return [name], [values]


class Context:
    def __init__(self, out: str, seed: int, quiet: bool):
        self.out = Path(out)
        self.seed = seed
        self.quiet = quiet

    def say(self, msg: str):
        if not self.quiet:
            click.echo(msg)

    def outdir(self) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        return self.out


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@contextlib.contextmanager
def _thread_cap():
    value = os.environ.get("FRACMECH_THREADS")
    if not value:
        yield
        return
    try:
        limit = int(value)
        if limit < 1:
            raise ValueError
    except ValueError:
        _fail(EXIT_CONFIG, f"FRACMECH_THREADS: expected a positive integer, got {value!r}")
    from threadpoolctl import threadpool_limits

    with threadpool_limits(limits=limit):
        yield


# -- commands ----------------------------------------------------------------


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--out", default="fracmech-out", show_default=True, help="Output directory.")
@click.option("--seed", default=42, show_default=True, type=int, help="Seed for PCG64 sampling.")
@click.option("--quiet", is_flag=True, help="Only print errors.")
@click.pass_context
def main(ctx, out, seed, quiet):
    """Fractional calculus, brackets and oscillator checks."""
    ctx.obj = Context(out, seed, quiet)
    ctx.with_resource(_thread_cap())


def _override(attr):
    def callback(ctx, param, value):
        if value is not None and value is not False:
            setattr(ctx.find_object(Context), attr, Path(value) if attr == "out" else value)
    return callback


def global_flags(fn):
    """Let ``--out``, ``--seed`` and ``--quiet`` also follow the subcommand name."""
    fn = click.option("--quiet", is_flag=True, default=None, expose_value=False,
                      callback=_override("quiet"), help="Only print errors.")(fn)
    fn = click.option("--seed", type=int, default=None, expose_value=False,
                      callback=_override("seed"), help="Seed for PCG64 sampling.")(fn)
    fn = click.option("--out", default=None, expose_value=False,
                      callback=_override("out"), help="Output directory.")(fn)
    return fn


def _parse_grid(spec: str) -> fo.Grid:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid: expected a:b:n, got {spec!r}")
    try:
        return fo.Grid(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None


def _load_function(spec: str, grid: fo.Grid) -> tuple[fo.SampledFunction, fo.PowerExpansion | None]:
    if spec.endswith(".csv") or Path(spec).is_file():
        try:
            data = np.genfromtxt(spec, delimiter=",", names=True)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"function: cannot read {spec}: {exc}") from None
        names = data.dtype.names or ()
        if "value" in names:
            values = np.atleast_1d(data["value"]).astype(float)
        elif "value_re" in names and "value_im" in names:
            values = np.atleast_1d(data["value_re"]) + 1j * np.atleast_1d(data["value_im"])
        else:
            raise ConfigError(f"function: {spec} needs a value or value_re,value_im column")
        if values.shape != (grid.n + 1,):
            raise ConfigError(f"function: {spec} has {values.size} samples, grid needs {grid.n + 1}")
        return fo.SampledFunction(grid, values), None
    try:
        expr = fo.parse_power_expansion(spec)
    except DomainError:
        raise
    except ValueError as exc:
        raise ConfigError(f"function: {exc}") from None
    return fo.evaluate(expr, grid), expr


@main.command()
@click.argument("op_name", type=click.Choice(sorted(OPERATORS)))
@click.argument("function_spec")
@click.argument("alpha", type=float)
@click.argument("grid_spec")
@click.option("--oracle", is_flag=True, help="Add the closed-form result as a column.")
@global_flags
@click.pass_obj
def frac(obj: Context, op_name, function_spec, alpha, grid_spec, oracle):
    """Apply a fractional operator to a power expansion or a CSV of samples."""
    try:
        grid = _parse_grid(grid_spec)
        if not 0 < alpha <= 1:
            raise ConfigError("alpha: must lie in (0, 1]")
        f, expr = _load_function(function_spec, grid)
        if oracle and expr is None:
            raise ConfigError("--oracle: needs a power-expansion literal, not a CSV")
    except ConfigError as exc:
        _fail(EXIT_CONFIG, str(exc))
    except DomainError as exc:
        _fail(EXIT_DOMAIN, f"function: {exc}")
    op, kind = OPERATORS[op_name]
    try:
        with np.errstate(divide="ignore", invalid="ignore"):
            result = op(f, alpha)
            ref = fo.evaluate(fo.power_oracle(expr, kind, alpha), grid) if oracle else None
    except DomainError as exc:
        _fail(EXIT_DOMAIN, str(exc))
    header, cols = ["t"], [grid.nodes]
    h, c = _value_columns("value", result.values)
    header += h
    cols += c
    if ref is not None:
        h, c = _value_columns("oracle", ref.values)
        header += h
        cols += c
    path = obj.outdir() / "frac.csv"
    write_csv(path, header, cols)
    obj.say(f"wrote {path}")


def _write_oscillator(obj: Context, p: OscillatorParams, report: SolveReport | None, extra: dict):
    out = obj.outdir()
    record = dict(extra)
    if report is not None:
        record.update(report.as_record())
        write_csv(out / "trajectory.csv", ["t", "x"], [p.grid.nodes, report.solution.values])
    record.setdefault("contraction_estimate", p.contraction_estimate)
    write_json(out / "report.json", record)
    return record


@main.command()
@click.argument("config_file", type=click.Path(dir_okay=False))
@global_flags
@click.pass_obj
def oscillator(obj: Context, config_file):
    """Solve the fractional oscillator boundary-value problem from a config file."""
    try:
        p, tol, max_iter = oscillator_from_config(read_config(config_file))
    except (ConfigError, OSError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DivergentForcing)
            report = solve_fo(p, tol=tol, max_iter=max_iter)
    except NonContractive as exc:
        _write_oscillator(obj, p, None, {"status": "non-contractive",
                                         "contraction_estimate": exc.contraction_estimate})
        _fail(EXIT_NONCONTRACTIVE, str(exc))
    except MaxIterExceeded as exc:
        _write_oscillator(obj, p, exc.report, {"status": "max-iter"})
        _fail(EXIT_MAXITER, str(exc))
    except DomainError as exc:
        _fail(EXIT_DOMAIN, str(exc))
    rec = _write_oscillator(obj, p, report, {"status": "ok"})
    obj.say(f"converged in {rec['iterations']} iterations, residual_sup={rec['residual_sup']:.3g}, "
            f"transversality_error={rec['transversality_error']:.3g}")


@main.command()
@click.argument("expr_f", required=False)
@click.argument("expr_g", required=False)
@click.option("--check-axioms", is_flag=True, help="Run the randomized bracket property suite.")
@click.option("--trials", default=100, show_default=True, type=int)
@global_flags
@click.pass_obj
def bracket(obj: Context, expr_f, expr_g, check_axioms, trials):
    """Print the fractional Poisson bracket [F, G], or check its axioms."""
    if check_axioms:
        results = check_bracket_axioms(obj.seed, trials)
        for name in AXIOMS:
            click.echo(f"{'PASS' if results[name] else 'FAIL'} {name}")
        sys.exit(EXIT_OK if all(results.values()) else EXIT_FAILED)
    if expr_f is None or expr_g is None:
        _fail(EXIT_CONFIG, "bracket needs two expressions (or --check-axioms)")
    try:
        F, G = parse(expr_f), parse(expr_g)
        click.echo(render(fp_bracket(F, G)))
    except (ValueError, SyntaxError, KeyError) as exc:
        _fail(EXIT_CONFIG, f"cannot parse expression: {exc}")


def _amplitude(cfg: dict):
    if cfg["amplitude"] == "constant":
        return lambda x, xb, t: 1.0
    slope = cfg["amplitude_slope"]
    return lambda x, xb, t: 1.0 + slope * xb


def run_verify_hj(cfg: dict, seed: int) -> tuple[list[str], np.ndarray, bool]:
    """Evaluate every residual at seeded samples; returns header, rows, all-within-threshold."""
    S = hj.s_fo(cfg["m_alpha"], cfg["k"], cfg["charge"], cfg["field_E"], cfg["beta_sep"])
    pts = hj.sample_admissible(S, np.random.default_rng(seed), cfg["samples"], cfg["scale"])
    w = hj.WaveAnsatz(_amplitude(cfg), S, cfg["hbar"])
    rows = []
    ok = True
    for p in pts:
        sample = tuple(p)
        r_hj = hj.hj_residual(S, sample)
        real, imag = hj.madelung_split_residuals(w, sample, cfg["scale"])
        if cfg["hbar"] > 0:
            wave, scale = hj.wave_equation_residual(w, sample, cfg["scale"], return_scale=True)
            wave_rel = abs(wave) / scale if scale else abs(wave)
        else:
            wave, wave_rel = complex(math.nan, math.nan), math.nan
        ok &= abs(r_hj) <= cfg["hj_tol"]
        ok &= abs(real) <= cfg["madelung_tol"] and abs(imag) <= cfg["madelung_tol"]
        if cfg["hbar"] > 0:
            ok &= wave_rel <= cfg["wave_tol"]
        rows.append([*sample, r_hj, real, imag, wave.real, wave.imag, wave_rel])
    header = ["x", "xbar_alpha", "t", "hj_residual", "madelung_real", "madelung_imag",
              "wave_re", "wave_im", "wave_relative"]
    return header, np.asarray(rows), bool(ok)


@main.command("verify-hj")
@click.argument("config_file", type=click.Path(dir_okay=False), required=False)
@click.option("--samples", type=int, default=None, help="Override the sample count.")
@global_flags
@click.pass_obj
def verify_hj(obj: Context, config_file, samples):
    """Check the separated action and wave ansatz at random admissible points."""
    try:
        raw = read_config(config_file) if config_file else {}
        if samples is not None:
            raw["samples"] = str(samples)
        cfg = hj_from_config(raw)
    except (ConfigError, OSError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    try:
        header, rows, ok = run_verify_hj(cfg, obj.seed)
    except DomainError as exc:
        _fail(EXIT_DOMAIN, str(exc))
    path = obj.outdir() / "hj.csv"
    write_csv(path, header, list(rows.T))
    obj.say(f"wrote {path}; {'all within thresholds' if ok else 'thresholds exceeded'}")
    sys.exit(EXIT_OK if ok else EXIT_FAILED)


@main.command()
@global_flags
@click.pass_obj
def selftest(obj: Context):
    """Run the acceptance checks and write their numbers."""
    results = st.run_all(obj.seed)
    out = obj.outdir()
    write_json(out / "selftest.json", {
        "seed": obj.seed,
        "checks": [{"criterion": r.criterion, "name": r.name, "passed": bool(r.passed),
                    "metrics": {k: (v if isinstance(v, (bool, int)) else float(v))
                                for k, v in r.metrics.items()}}
                   for r in results],
    })
    p = st.fractional_params()
    report = solve_fo(p)
    write_csv(out / "fractional_trajectory.csv", ["t", "x"], [p.grid.nodes, report.solution.values])
    for r in results:
        click.echo(r.line())
    sys.exit(EXIT_OK if all(r.passed for r in results) else EXIT_FAILED)


if __name__ == "__main__":
    main()
