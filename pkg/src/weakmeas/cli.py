"""Command-line front end: scenario files in, canonical JSON or CSV out.

Commands:
  weakmeas run   --config FILE | --preset NAME   one scenario, one document
  weakmeas sweep  ... --param NAME --values ...  one CSV row per value
  weakmeas presets                               list built-in scenarios

Exit codes: 0 success, 2 validation or usage error, 3 runtime error.
Data goes to stdout or --out (written via a temp file and rename, never a
partial file); diagnostics go to stderr.  JSON output is canonical:
sorted keys, floats at 17 significant digits, so identical runs produce
identical bytes.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, replace

import numpy as np

from . import entanglement, estimator, vonneumann, weakvalues
from . import scenario as scenario_mod
from .errors import ScenarioError, WeakmeasError
from .scenario import Scenario

SEED_ENV_VAR = "WEAKMEAS_SEED"
SWEEP_PARAMS = ("gA_tA", "theta", "sigma_F")
SWEEP_HEADER = "param,value,estimate,std_error,re_formula,im_formula,abs_error"


def _format_float(value: float) -> str:
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    return format(float(value), ".17g")


def _inline(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        parts = [f"{json.dumps(str(k))}: {_inline(v)}" for k, v in sorted(value.items())]
        return "{" + ", ".join(parts) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_inline(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _canonical(value, indent: int) -> str:
    pad = " " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        rows = []
        for key in sorted(value):
            rows.append(f'{pad}  {json.dumps(str(key))}: {_canonical(value[key], indent + 2)}')
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in value):
            return _inline(value)
        rows = [f"{pad}  {_canonical(v, indent + 2)}" for v in value]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    return _inline(value)


def canonical_dumps(doc: dict) -> str:
    """Deterministic JSON: sorted keys, 17-digit floats, stable layout."""
    return _canonical(doc, 0) + "\n"


def _pair(z: complex):
    return [float(z.real), float(z.imag)]


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".weakmeas-tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out_path) -> None:
    if out_path:
        _write_atomic(out_path, text)
    else:
        sys.stdout.write(text)


def _report_doc(sc: Scenario) -> dict:
    rep = weakvalues.commutation_report(sc.a_matrix, sc.i_vector, sc.f_vector)
    return {
        "weak_value": _pair(rep.weak_value),
        "re_formula": rep.re_formula,
        "im_formula": rep.im_formula,
        "overlap": _pair(rep.overlap),
        "postselect_prob": rep.postselect_prob,
        "commutator_norms": dict(rep.commutator_norms),
    }


def _separability_doc(rep: entanglement.SeparabilityReport) -> dict:
    doc = {"bipartition": rep.bipartition, "tolerance": rep.tolerance}
    if rep.singular_values is not None:
        doc["singular_values"] = list(rep.singular_values)
        doc["is_product"] = rep.is_product
    if rep.correlation_gap is not None:
        doc["correlation_gap"] = rep.correlation_gap
    return doc


def _diagnostics_doc(sc: Scenario) -> dict:
    doc = _report_doc(sc)
    # the Schmidt cut targets the state right after the A coupling, which
    # is where the non-separability claim lives
    after_a = vonneumann.initial_state(sc.i_vector, [sc.grid_a()])
    after_a = vonneumann.evolve_exact(
        after_a, vonneumann.CouplingSpec(sc.a_matrix, sc.ga_ta, pointer_axis=0)
    )
    doc["product_check"] = {
        name: _separability_doc(entanglement.product_check(after_a, name))
        for name in ("system", "axis0")
    }
    doc["correlation_witness"] = _separability_doc(
        entanglement.correlation_witness(estimator.coupled_state(sc))
    )
    return doc


def run_scenario(sc: Scenario, threads: int = 1):
    """Dispatch one scenario; returns (document, records or None)."""
    mode = sc.run.mode
    if mode == "closed-form":
        return _report_doc(sc), None
    if mode == "exact-moments":
        return estimator.exact_moments(sc), None
    if mode == "diagnostics":
        return _diagnostics_doc(sc), None
    if mode == "sample-pointer":
        records = estimator.sample_records(sc, sc.run.samples, threads=threads)
    elif mode == "sample-ideal":
        records = estimator.sample_ideal(sc, sc.run.samples, threads=threads)
    else:
        raise ScenarioError(f"run.mode: unknown mode {mode!r}")
    return asdict(estimator.summarize(records, sc)), records


def _doc_to_csv(doc: dict) -> str:
    lines = ["key,value"]
    for key in sorted(doc):
        cell = _inline(doc[key])
        if "," in cell or '"' in cell:
            cell = '"' + cell.replace('"', '""') + '"'
        lines.append(f"{key},{cell}")
    return "\n".join(lines) + "\n"


def _closed_form_pair(sc: Scenario):
    re = weakvalues.re_weak_formula(sc.a_matrix, sc.i_vector, sc.f_vector)
    im = weakvalues.im_weak_formula(sc.a_matrix, sc.i_vector, sc.f_vector)
    return re, im


def _sweep_estimate(sc: Scenario, threads: int):
    mode = sc.run.mode
    if mode in ("closed-form", "diagnostics"):
        re, im = _closed_form_pair(sc)
        return (im if sc.run.readout == "momentum" else re), 0.0
    if mode == "exact-moments":
        em = estimator.exact_moments(sc)
        return em["estimate"], 0.0
    doc, _ = run_scenario(sc, threads=threads)
    return doc["estimate"], doc["std_error"]


def _apply_sweep_param(sc: Scenario, param: str, value: float) -> Scenario:
    if param == "gA_tA":
        probe = replace(sc, ga_ta=value)
    elif param == "sigma_F":
        probe = replace(sc, pointer_f=replace(sc.pointer_f, sigma=value))
    elif param == "theta":
        if sc.system_dim != 2:
            raise ScenarioError("theta sweeps require a single-qubit scenario")
        t = math.radians(value)
        probe = replace(
            sc,
            i_vector=np.array([math.cos(t), math.sin(t)], dtype=complex),
            f_vector=np.array([math.cos(t), -math.sin(t)], dtype=complex),
        )
    else:
        raise ScenarioError(f"unknown sweep parameter {param!r}")
    return scenario_mod.validate(probe)


def sweep_csv(sc: Scenario, param: str, values, threads: int = 1) -> str:
    """One row per value, in the order given."""
    lines = [SWEEP_HEADER]
    for value in values:
        probe = _apply_sweep_param(sc, param, value)
        re, im = _closed_form_pair(probe)
        estimate, std_error = _sweep_estimate(probe, threads)
        target = im if probe.run.readout == "momentum" else re
        cells = (value, estimate, std_error, re, im, abs(estimate - target))
        lines.append(param + "," + ",".join(_format_float(c) for c in cells))
    return "\n".join(lines) + "\n"


def _resolve_seed(args, sc: Scenario) -> Scenario:
    # precedence: --seed flag, then the environment, then the file
    if getattr(args, "seed", None) is not None:
        return scenario_mod.with_seed(sc, args.seed)
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise ScenarioError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None
        return scenario_mod.with_seed(sc, seed)
    return sc


def _load(args) -> Scenario:
    if getattr(args, "preset", None):
        sc = scenario_mod.preset(args.preset)
    else:
        sc = scenario_mod.load_scenario(args.config)
    return _resolve_seed(args, sc)


def _add_source_options(parser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", help="scenario JSON file")
    group.add_argument("--preset", help="built-in scenario name (see `weakmeas presets`)")
    parser.add_argument("--seed", type=int, help="override the scenario seed")
    parser.add_argument(
        "--threads", type=int, default=1, help="worker threads; never changes output bytes"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakmeas", description="weak-measurement simulation and estimation"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one scenario")
    _add_source_options(run_p)
    run_p.add_argument("--format", choices=("json", "csv"), default="json")
    run_p.add_argument("--out", help="output file (default stdout)")
    run_p.add_argument("--dump-records", help="also write sampled records as CSV")
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="rerun a scenario over parameter values")
    _add_source_options(sweep_p)
    sweep_p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    sweep_p.add_argument("--values", required=True, help="comma-separated numbers")
    sweep_p.add_argument("--out", required=True, help="output CSV file")
    sweep_p.set_defaults(func=_cmd_sweep)

    presets_p = sub.add_parser("presets", help="list built-in scenarios")
    presets_p.set_defaults(func=_cmd_presets)
    return parser


def _cmd_run(args) -> int:
    try:
        sc = _load(args)
        if args.dump_records and not sc.run.mode.startswith("sample-"):
            raise ScenarioError(
                f"--dump-records needs a sampling mode, not {sc.run.mode!r}"
            )
    except WeakmeasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        doc, records = run_scenario(sc, threads=args.threads)
        text = canonical_dumps(doc) if args.format == "json" else _doc_to_csv(doc)
        _emit(text, args.out)
        if args.dump_records:
            buffer = io.StringIO()
            estimator.dump_records(records, buffer)
            _write_atomic(args.dump_records, buffer.getvalue())
    except WeakmeasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def _cmd_sweep(args) -> int:
    try:
        sc = _load(args)
        try:
            values = [float(v) for v in args.values.split(",") if v.strip() != ""]
        except ValueError:
            raise ScenarioError(f"--values must be comma-separated numbers, got {args.values!r}")
        if not values:
            raise ScenarioError("--values is empty")
        # validate every point up front so a bad value cannot leave a partial file
        for value in values:
            _apply_sweep_param(sc, args.param, value)
    except WeakmeasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        _emit(sweep_csv(sc, args.param, values, threads=args.threads), args.out)
    except WeakmeasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def _cmd_presets(args) -> int:
    for name in scenario_mod.preset_names():
        print(name)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
