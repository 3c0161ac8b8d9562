"""Command-line interface.

Subcommands: ``validate``, ``calibrate``, ``eval``, ``trace``, ``solve``,
``verify``.  Exit codes: 0 success, 1 a domain or check failure, 2 usage or
parse failure.  All numeric output uses 17 significant digits so that files
round-trip bit-exactly; identical configs and seeds produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dirichlet, fundamental, images, suite
from .errors import CalibrationError, DomainError, PoleError, StructureError, TruncationError
from .fields import field_from_config
from .geometry import Box, box_from_config
from .groups import GroupSpec, Point, group_from_config, validate_group
from .operators import StencilSpec

_FMT = "%.17g"


def _fmt(value: float) -> str:
    return _FMT % value


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj)}")


def _write_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, default=_json_default) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _write_csv(header: list[str], rows: list[list[float]], out: str | None) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_config(args: argparse.Namespace) -> dict:
    if args.config is None:
        return {}
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise StructureError("config root must be a JSON object")
    return cfg


def _resolve_group(args: argparse.Namespace, cfg: dict) -> GroupSpec:
    if getattr(args, "group", None):
        with open(args.group, "r", encoding="utf-8") as fh:
            return group_from_config(json.load(fh))
    if "group" in cfg:
        return group_from_config(cfg["group"])
    raise StructureError("no group given; pass --group or a 'group' config entry")


def _point_from_config(cfg: dict, spec: GroupSpec) -> Point:
    p = Point(np.asarray(cfg["x"], dtype=float), np.asarray(cfg.get("t", []), dtype=float))
    if not p.conforms(spec):
        raise StructureError("point does not conform to the group")
    return p


def _truncation_from_config(cfg: dict | None) -> images.TruncationPolicy:
    if not cfg:
        return images.DEFAULT_TRUNCATION
    if cfg.get("mode") == "fixed":
        return images.TruncationPolicy.fixed(int(cfg["J"]))
    if cfg.get("mode") == "tolerance":
        return images.TruncationPolicy.tolerance(float(cfg.get("tol", 1e-8)))
    raise StructureError(f"unknown truncation config {cfg!r}")


def _grid_points(cfg: dict, spec: GroupSpec) -> tuple[np.ndarray, np.ndarray]:
    """Cartesian evaluation grid from {"x": [[lo, hi, count], ...], "t": [...]}."""
    def axes(entries, expected):
        if len(entries) != expected:
            raise StructureError(f"grid needs {expected} axes, got {len(entries)}")
        return [np.linspace(float(lo), float(hi), int(ct)) for lo, hi, ct in entries]

    xs = axes(cfg["x"], spec.m)
    ts = axes(cfg.get("t", []), spec.n)
    mesh = np.meshgrid(*(xs + ts), indexing="ij") if (xs + ts) else []
    flat = np.stack([g.ravel() for g in mesh], axis=-1)
    return flat[:, : spec.m], flat[:, spec.m :]


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    spec = _resolve_group(args, cfg)
    report = validate_group(spec)
    _write_json(report.to_dict(), args.out)
    return 0 if report.passed else 1


def cmd_calibrate(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    spec = _resolve_group(args, cfg)
    nodes = int(cfg.get("nodes", 12))
    if "box" in cfg:
        box = box_from_config(cfg["box"], spec)
    else:
        box = Box(np.tile([-1.0, 1.0], (spec.m, 1)), np.tile([-1.0, 1.0], (spec.n, 1)))
    c = fundamental.calibrate_c(spec, box, nodes_per_axis=nodes)
    if "check_box" in cfg:
        check_box = box_from_config(cfg["check_box"], spec)
    else:
        b = box.bounds() * 1.25
        check_box = Box(b[: spec.m], b[spec.m :])
    flux_check = fundamental.flux(fundamental.params_for(spec, c), spec, check_box, nodes_per_axis=nodes)
    _write_json(
        {"c": c, "flux_check": flux_check, "box": box.to_config(), "grid": nodes},
        args.out,
    )
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    spec = _resolve_group(args, cfg)
    params = fundamental.params_for(spec, float(cfg.get("c", 1.0)))
    pole = _point_from_config(cfg["pole"], spec)
    x, t = _grid_points(cfg["grid"], spec)
    domain_cfg = cfg.get("domain")
    if domain_cfg:
        domain = images.domain_from_config(domain_cfg)
        trunc = _truncation_from_config(cfg.get("truncation"))
        values = images.green_eval_grid(params, spec, domain, x, t, pole, trunc)
    else:
        dx, tt = fundamental.pole_shift(spec, x, t, pole.x, pole.t)
        values = fundamental.gamma_from_fourth(params, fundamental.gauge_fourth(spec, dx, tt))
    header = [f"x{i + 1}" for i in range(spec.m)] + [f"t{k + 1}" for k in range(spec.n)] + ["value"]
    rows = [list(xi) + list(ti) + [v] for xi, ti, v in zip(x, t, values)]
    _write_csv(header, rows, args.out)
    return 0


def _boundary_samples_from_config(cfg: dict, spec: GroupSpec, domain) -> list[Point]:
    grid = cfg["boundary_grid"]
    extent = float(grid.get("extent", 1.5))
    count = int(grid.get("count", 5))
    include_center = bool(grid.get("include_center", True))
    rng = np.random.default_rng(int(grid.get("seed", 0)))
    samples: list[Point] = []
    for index, value, _ in dirichlet.domain_faces(domain):
        for _ in range(count):
            x = rng.uniform(-extent, extent, spec.m)
            if isinstance(domain, images.Wedge):
                for kk, aa in zip(domain.indices, domain.offsets):
                    x[kk - 1] = aa + abs(x[kk - 1])
            x[index - 1] = value
            t = rng.uniform(-extent, extent, spec.n)
            samples.append(Point(x, t))
        if include_center and value == 0.0:
            for _ in range(max(1, count // 2)):
                samples.append(Point(np.zeros(spec.m), rng.uniform(-extent, extent, spec.n)))
    return samples


def cmd_trace(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    spec = _resolve_group(args, cfg)
    params = fundamental.params_for(spec, float(cfg.get("c", 1.0)))
    domain = images.domain_from_config(cfg["domain"])
    pole = _point_from_config(cfg["pole"], spec)
    trunc = _truncation_from_config(cfg.get("truncation"))
    samples = _boundary_samples_from_config(cfg, spec, domain)
    report = images.boundary_trace_scan(params, spec, domain, pole, samples, trunc)
    header = [f"x{i + 1}" for i in range(spec.m)] + [f"t{k + 1}" for k in range(spec.n)] + ["trace"]
    rows = [list(p.x) + list(p.t) + [v] for p, v in zip(report.points, report.values)]
    _write_csv(header, rows, args.out)
    summary = {"max_abs": report.max_abs, "zero_subset_max": report.zero_subset_max}
    summary_path = str(Path(args.out).with_suffix(".summary.json")) if args.out else None
    _write_json(summary, summary_path)
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    spec = _resolve_group(args, cfg)
    params = fundamental.params_for(spec, float(cfg.get("c", 1.0)))
    domain = images.domain_from_config(cfg["domain"])
    trunc = _truncation_from_config(cfg.get("truncation"))
    quad_cfg = cfg.get("quad", {})
    quad = dirichlet.QuadratureSpec(
        volume_nodes=int(quad_cfg.get("volume_nodes", 24)),
        surface_nodes=int(quad_cfg.get("surface_nodes", 32)),
        rule=quad_cfg.get("rule", "midpoint"),
    )
    f_spec = None
    if cfg.get("f") and cfg["f"].get("kind") != "zero":
        f_field, f_box = field_from_config(cfg["f"], spec)
        if "support" in cfg["f"]:
            f_box = box_from_config(cfg["f"]["support"], spec)
        f_spec = dirichlet.SupportedField(f_field, f_box)
    data = []
    face_list = dirichlet.domain_faces(domain)
    for entry in cfg.get("phi", []):
        field, box = field_from_config(entry["field"], spec)
        if "support" in entry:
            box = box_from_config(entry["support"], spec)
        which = entry.get("face", 0)
        index, value, outward = face_list[int(which)]
        data.append(dirichlet.FaceDatum(index, value, outward, field, box))
    problem = dirichlet.ProblemSpec(domain, f_spec, data)
    x, t = _grid_points(cfg["eval_grid"], spec)
    pts = [Point(xi, ti) for xi, ti in zip(x, t)]
    residual_pts = None
    if "residual_points" in cfg:
        residual_pts = [_point_from_config(p, spec) for p in cfg["residual_points"]]
    report = dirichlet.solve(
        params,
        spec,
        problem,
        pts,
        quad,
        trunc,
        residual_points=residual_pts,
        residual_stencil=StencilSpec(float(cfg.get("residual_h", 1e-3))),
        convergence_points=int(cfg.get("convergence_points", 2)),
    )
    header = [f"x{i + 1}" for i in range(spec.m)] + [f"t{k + 1}" for k in range(spec.n)] + ["u"]
    rows = [list(p.x) + list(p.t) + [v] for p, v in zip(report.points, report.values)]
    _write_csv(header, rows, args.out)
    report_path = str(Path(args.out).with_suffix(".report.json")) if args.out else None
    _write_json(report.to_dict(), report_path)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    result = suite.run_suite(seed)
    for check in result.checks:
        thr = "" if check.threshold is None else f" (threshold {_fmt(check.threshold)})"
        sys.stdout.write(f"[{check.status:>8}] {check.name}: {_fmt(check.metric)}{thr}\n")
    if args.out:
        _write_json(result.to_dict(), args.out)
    sys.stdout.write(f"overall: {'pass' if result.overall_pass else 'fail'}\n")
    return 0 if result.overall_pass else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="htpot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("validate", cmd_validate),
        ("calibrate", cmd_calibrate),
        ("eval", cmd_eval),
        ("trace", cmd_trace),
        ("solve", cmd_solve),
        ("verify", cmd_verify),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--group", default=None, help="JSON group file (overrides config)")
        p.add_argument("--out", default=None, help="output path (stdout when omitted)")
        p.add_argument("--seed", type=int, default=None, help="seed for randomised suites")
        p.set_defaults(fn=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (json.JSONDecodeError, FileNotFoundError, KeyError, StructureError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (DomainError, PoleError, CalibrationError, TruncationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
