"""Command-line front end.

Every command reads an optional JSON job file (``--config``) with sections
``scenario`` (or ``scenarios``), ``design`` (or ``designs``), ``box``,
``optimizer`` and ``output``. Flags override the file. Output is CSV or JSON
with 6 significant digits.

Exit codes: 0 success, 1 computation error, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .design import Design, design_from_csv, design_from_dict, uniform_design
from .effective_dose import Endpoint
from .errors import DomainError, ToxDesignError
from .information import Scenario, efficiency
from .local import OptimizerConfig, check_optimality, locally_optimal, sensitivity_curve
from .maximin import MAXIMIN_CONFIG, ParamBox, maximin_design, min_efficiency
from .models import CorrelationSpec, DoseResponseModel, ImplantSpec, overall_prob
from .tables import TABLE_NAMES, compute_table

log = logging.getLogger(__name__)

COMMANDS = ("ed", "local-opt", "maximin", "efficiency", "table", "sensitivity")


class UsageError(Exception):
    """Bad flags or an invalid job description (exit code 2)."""


# -- config parsing ---------------------------------------------------------


def _model(spec) -> DoseResponseModel:
    if isinstance(spec, (list, tuple)):
        return DoseResponseModel.weibull(*spec)
    spec = dict(spec)
    kind = spec.pop("kind", "weibull")
    return DoseResponseModel(kind, **spec)


def _correlation(spec) -> CorrelationSpec:
    if spec is None:
        return CorrelationSpec()
    if isinstance(spec, (int, float)):
        return CorrelationSpec.constant(spec)
    return CorrelationSpec(**spec)


def _implants(spec) -> ImplantSpec:
    if spec is None:
        return ImplantSpec()
    if isinstance(spec, (int, float)):
        return ImplantSpec.constant(spec)
    spec = dict(spec)
    if "table" in spec:
        return ImplantSpec.from_table(spec["table"])
    return ImplantSpec(**spec)


def parse_scenario(spec: dict) -> Scenario:
    """Scenario from its JSON form; models may be ``[a, b, gamma]`` Weibull triples."""
    spec = dict(spec)
    spec.pop("label", None)
    spec.pop("optimal_value", None)
    unknown = set(spec) - {"theta1", "theta2", "correlation", "implants", "alpha", "endpoint", "numeric_ed"}
    if unknown:
        raise UsageError(f"unknown scenario fields: {', '.join(sorted(unknown))}")
    if "theta2" not in spec:
        raise UsageError("scenario needs theta2")
    return Scenario(
        theta2=_model(spec["theta2"]),
        theta1=_model(spec["theta1"]) if spec.get("theta1") is not None else None,
        correlation=_correlation(spec.get("correlation")),
        implants=_implants(spec.get("implants")),
        alpha=spec.get("alpha", 0.05),
        endpoint=spec.get("endpoint", "prenatal"),
        numeric_ed=bool(spec.get("numeric_ed", False)),
    )


def parse_design(spec, base: Path) -> Design:
    """Design given inline as ``{"doses", "weights"}`` or as ``{"file": path}`` (CSV or JSON)."""
    if isinstance(spec, dict) and "file" in spec:
        path = base / spec["file"]
        text = path.read_text()
        if path.suffix == ".json":
            return design_from_dict(json.loads(text))
        return design_from_csv(text)
    if isinstance(spec, dict) and "uniform" in spec:
        return uniform_design(int(spec["uniform"]))
    return design_from_dict(spec)


def _load_config(args) -> dict:
    if args.config is None:
        return {}
    try:
        data = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return data


def _optimizer(cfg: dict, seed, **defaults) -> OptimizerConfig:
    spec = {**defaults, **cfg.get("optimizer", {})}
    if seed is not None:
        spec["seed"] = seed
    if "support_sizes" in spec:
        spec["support_sizes"] = tuple(spec["support_sizes"])
    return OptimizerConfig(**spec)


def _scenarios(cfg: dict) -> list:
    if "scenarios" in cfg:
        specs = cfg["scenarios"]
    elif "scenario" in cfg:
        specs = [cfg["scenario"]]
    else:
        raise UsageError("config needs a scenario")
    return [(s.get("label", f"s{i + 1}"), parse_scenario(s), s.get("optimal_value")) for i, s in enumerate(specs)]


def _designs(cfg: dict, base: Path) -> list:
    if "designs" in cfg:
        return [parse_design(d, base) for d in cfg["designs"]]
    if "design" in cfg:
        return [parse_design(cfg["design"], base)]
    raise UsageError("config needs a design")


# -- output -----------------------------------------------------------------


def _num(x):
    """Round to 6 significant digits; keeps None and strings as is."""
    if x is None or isinstance(x, str):
        return x
    return float(f"{float(x):.6g}") + 0.0


def _cell(x) -> str:
    # adding 0.0 turns -0.0 into 0.0
    return "" if x is None else (x if isinstance(x, str) else f"{float(x) + 0.0:.6g}")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(x) for x in row])
    return buf.getvalue()


def _wide(designs) -> tuple:
    """Header ``d1..dk,w1..wk`` and padded rows for a list of designs."""
    k = max(len(d) for d in designs)
    header = [f"d{i + 1}" for i in range(k)] + [f"w{i + 1}" for i in range(k)]
    rows = []
    for d in designs:
        pad = [None] * (k - len(d))
        rows.append(d.doses.tolist() + pad + d.weights.tolist() + pad)
    return header, rows


def _design_json(design: Design) -> dict:
    return {"doses": [_num(x) for x in design.doses], "weights": [_num(x) for x in design.weights]}


class Report:
    """A command's result: a CSV rendering and a JSON-ready record."""

    def __init__(self, csv_text: str, record):
        self.csv_text = csv_text
        self.record = record

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.record, indent=2) + "\n"
        return self.csv_text


# -- commands ---------------------------------------------------------------


def _excess_risk(scenario: Scenario, d: float) -> float:
    x = np.array([0.0, d])
    if scenario.endpoint is Endpoint.OVERALL_TOXICITY:
        p = overall_prob(scenario.theta1, scenario.theta2, x)
    elif scenario.endpoint is Endpoint.MALFORMATION:
        p = scenario.theta1.prob(x)
    else:
        p = scenario.theta2.prob(x)
    return float((p[1] - p[0]) / (1.0 - p[0]))


def cmd_ed(cfg: dict, seed=None, base=Path(".")) -> Report:
    """Effective dose, its parameter gradient and the excess-risk residual."""
    rows, records = [], []
    for label, scenario, _ in _scenarios(cfg):
        ed, grad = scenario.ed, scenario.target
        residual = _excess_risk(scenario, ed) - scenario.alpha
        rows.append([label, ed, residual, *grad])
        records.append({"label": label, "ed": _num(ed), "residual": _num(residual), "gradient": [_num(g) for g in grad]})
    p = max(len(r) for r in rows) - 3
    header = ["scenario", "ed", "residual"] + [f"g{i + 1}" for i in range(p)]
    return Report(_csv(header, rows), records if len(records) > 1 else records[0])


def _local(scenario, cfg):
    return locally_optimal(scenario, cfg, strict=False)


def cmd_local_opt(cfg: dict, seed=None, base=Path(".")) -> Report:
    """Locally optimal design with its certificate and the efficiency of the uniform 5-point design."""
    opt = _optimizer(cfg, seed)
    results, records = [], []
    for label, scenario, _ in _scenarios(cfg):
        res = _local(scenario, opt)
        eff_u = efficiency(uniform_design(5), scenario, res.value)
        results.append((label, res, eff_u))
        records.append(
            {
                "label": label,
                "design": _design_json(res.design),
                "value": _num(res.value),
                "max_sensitivity": _num(res.certificate.max_sensitivity),
                "argmax_dose": _num(res.certificate.argmax_dose),
                "certified": res.certificate.passes(opt.certify_tol),
                "eff_uniform": _num(eff_u),
            }
        )
    header, wide = _wide([r.design for _, r, _ in results])
    header = ["scenario"] + header + ["value", "max_sensitivity", "argmax_dose", "eff_uniform"]
    rows = [
        [label, *w, r.value, r.certificate.max_sensitivity, r.certificate.argmax_dose, e]
        for (label, r, e), w in zip(results, wide)
    ]
    report = Report(_csv(header, rows), records if len(records) > 1 else records[0])
    report.failed = [rec["label"] for rec in records if not rec["certified"]]
    return report


def cmd_efficiency(cfg: dict, seed=None, base=Path(".")) -> Report:
    """Efficiency matrix: one row per design, one column per scenario.

    A scenario's optimal criterion value is taken from ``optimal_value`` when
    given and computed with the local optimizer otherwise.
    """
    opt = _optimizer(cfg, seed)
    scenarios = _scenarios(cfg)
    designs = _designs(cfg, base)
    labels = [label for label, _, _ in scenarios]
    optima = [v if v is not None else _local(s, opt).value for _, s, v in scenarios]
    matrix = [[efficiency(d, s, v) for (_, s, _), v in zip(scenarios, optima)] for d in designs]
    header, wide = _wide(designs)
    rows = [w + e for w, e in zip(wide, matrix)]
    record = {
        "scenarios": labels,
        "optimal_values": [_num(v) for v in optima],
        "designs": [_design_json(d) for d in designs],
        "efficiency": [[_num(x) for x in e] for e in matrix],
    }
    return Report(_csv(header + labels, rows), record)


def cmd_maximin(cfg: dict, seed=None, base=Path(".")) -> Report:
    """Standardized maximin design over a parameter box.

    The CSV holds the design summary, a blank line, then one row per grid scenario.
    """
    if "box" not in cfg:
        raise UsageError("config needs a box")
    box = ParamBox(**cfg["box"])
    base_scenario = parse_scenario(cfg["scenario"]) if "scenario" in cfg else Scenario(DoseResponseModel.weibull(0.1, 0.3, 3.0))
    opt = _optimizer(cfg, seed, support_sizes=MAXIMIN_CONFIG.support_sizes, restarts=MAXIMIN_CONFIG.restarts)
    result = maximin_design(box, base_scenario, opt)
    eff_u = min_efficiency(uniform_design(5), result.scenarios, result.optima)

    header, wide = _wide([result.design])
    top = _csv(header + ["min_eff", "min_eff_uniform"], [wide[0] + [result.min_eff, eff_u]])
    grid_rows = [
        [s.theta2.a, s.theta2.b, s.theta2.gamma, s.correlation.u, v, e]
        for s, v, e in zip(result.scenarios, result.optima, result.efficiencies)
    ]
    grid = _csv(["a2", "b2", "gamma2", "u", "optimal_value", "efficiency"], grid_rows)
    record = {
        "design": _design_json(result.design),
        "min_eff": _num(result.min_eff),
        "min_eff_uniform": _num(eff_u),
        "scenarios": [
            dict(zip(("a2", "b2", "gamma2", "u", "optimal_value", "efficiency"), map(_num, r))) for r in grid_rows
        ],
    }
    return Report(top + "\n" + grid, record)


def cmd_table(cfg: dict, seed=None, base=Path("."), name=None) -> Report:
    """Recompute a published table with a computed-minus-published diff column."""
    name = name or cfg.get("table")
    if name not in TABLE_NAMES:
        raise UsageError(f"unknown table {name!r}; choose from {', '.join(TABLE_NAMES)}")
    table = compute_table(name, _optimizer(cfg, seed))
    records = [{k: _num(v) for k, v in r.items()} for r in table.to_records()]
    return Report(table.to_csv(), {"table": name, "rows": records})


def cmd_sensitivity(cfg: dict, seed=None, base=Path(".")) -> Report:
    """Sensitivity function on a uniform grid that includes both end points."""
    _, scenario, _ = _scenarios(cfg)[0]
    design = _designs(cfg, base)[0]
    grid_points = int(cfg.get("grid_points", cfg.get("optimizer", {}).get("grid_points", 201)))
    if grid_points < 2:
        raise UsageError("grid_points must be at least 2")
    doses, psi = sensitivity_curve(design, scenario, grid_points)
    cert = check_optimality(design, scenario, max(grid_points, 101))
    record = {
        "max_sensitivity": _num(cert.max_sensitivity),
        "argmax_dose": _num(cert.argmax_dose),
        "points": [{"dose": _num(d), "psi": _num(p)} for d, p in zip(doses, psi)],
    }
    return Report(_csv(["dose", "psi"], zip(doses, psi)), record)


_HANDLERS = {
    "ed": cmd_ed,
    "local-opt": cmd_local_opt,
    "maximin": cmd_maximin,
    "efficiency": cmd_efficiency,
    "table": cmd_table,
    "sensitivity": cmd_sensitivity,
}


# -- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toxdesign", description="Optimal designs for effective-dose estimation.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=_HANDLERS[name].__doc__.splitlines()[0])
        if name == "table":
            p.add_argument("name", nargs="?", help=f"one of {', '.join(TABLE_NAMES)}")
        p.add_argument("--config", help="JSON job file")
        p.add_argument("--seed", type=int, help="random seed for the optimizer")
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
        p.add_argument("-v", "--verbose", action="store_true", help="log optimizer progress")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _load_config(args)
        output = cfg.get("output", {})
        fmt = args.format or output.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise UsageError(f"unknown output format {fmt!r}")
        out = args.out or output.get("path")
        base = Path(args.config).parent if args.config else Path(".")
        kwargs = {"name": args.name} if args.command == "table" else {}
        report = _HANDLERS[args.command](cfg, seed=args.seed, base=base, **kwargs)
    except (UsageError, DomainError, TypeError, KeyError) as exc:
        print(f"toxdesign: configuration error: {exc}", file=sys.stderr)
        return 2
    except ToxDesignError as exc:
        print(f"toxdesign: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"toxdesign: configuration error: {exc}", file=sys.stderr)
        return 2

    text = report.render(fmt)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    failed = getattr(report, "failed", None)
    if failed:
        print(f"toxdesign: certification failed for {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
