"""Command line front end: ingest clouds, analyze them, emit JSON reports.

Exit code 2 signals bad input and 3 a certificate that failed its own check.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .cones import DEFAULT_TOL, check_tol, make_cp, make_orthant
from .corpus import InstanceSpec, generate
from .efficiency import (
    EXISTENCE_FAMILIES,
    Certificate,
    PointCloud,
    VerificationError,
    benson_check,
    certificate_K,
    existence_search,
    gmin_set,
    gmin_via_cone,
    make_cloud,
    min_set,
    wmin_set,
)
from .gerstewitz import check_monotone
from .scalarize import build_proper_functional

SCHEMA = "report_v1"
MODES = ("min", "wmin", "gmin", "certify", "benson", "existence")
# samples per certificate for the monotonicity cross-check
MONOTONE_SAMPLES = 500


class InputError(ValueError):
    """Malformed input file or option."""


# ------------------------------------------------------------------ files


def _read_csv(path: Path, tol: float) -> PointCloud:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InputError(f"{path}: line 1: empty file")
    header = [h.strip() for h in rows[0]]
    has_label = bool(header) and header[-1] == "label"
    coords = header[:-1] if has_label else header
    ell = len(coords)
    if coords != [f"y{i + 1}" for i in range(ell)]:
        raise InputError(f"{path}: line 1: header must be y1,...,yL[,label], got {','.join(header)}")
    if ell < 2:
        raise InputError(f"{path}: line 1: need at least 2 coordinates, got {ell}")
    width = ell + has_label
    pts, labels = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != width:
            raise InputError(f"{path}: line {lineno}: expected {width} fields, got {len(row)}")
        try:
            pts.append([float(c) for c in row[:ell]])
        except ValueError:
            raise InputError(f"{path}: line {lineno}: non-numeric cell in {row[:ell]}") from None
        if not all(math.isfinite(v) for v in pts[-1]):
            raise InputError(f"{path}: line {lineno}: non-finite coordinate")
        if has_label:
            labels.append(row[ell])
    if not pts:
        raise InputError(f"{path}: no data rows")
    return make_cloud(pts, labels if has_label else None, tol)


def _read_json(path: Path, tol: float) -> PointCloud:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: line {e.lineno}: {e.msg}") from None
    try:
        ell = int(data["ell"])
        points = data["points"]
    except (KeyError, TypeError, ValueError):
        raise InputError(f"{path}: expected an object with 'ell' and 'points'") from None
    if ell < 2:
        raise InputError(f"{path}: ell must be at least 2, got {ell}")
    for n, p in enumerate(points):
        if not isinstance(p, list) or len(p) != ell:
            raise InputError(f"{path}: point {n}: expected {ell} coordinates")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p):
            raise InputError(f"{path}: point {n}: non-numeric coordinate")
    if not points:
        raise InputError(f"{path}: no points")
    return make_cloud(points, data.get("labels"), tol)


def ingest(path, format: str | None = None, tol: float = DEFAULT_TOL) -> PointCloud:
    """Read a cloud from CSV or JSON; ``format`` defaults to the file suffix."""
    path = Path(path)
    fmt = format or path.suffix.lstrip(".").lower()
    if fmt == "csv":
        return _read_csv(path, tol)
    if fmt == "json":
        return _read_json(path, tol)
    raise InputError(f"unknown format {fmt!r}; expected csv or json")


def emit(F: PointCloud, path, format: str | None = None) -> None:
    """Write ``F`` so that ``ingest`` reads back the identical cloud."""
    path = Path(path)
    fmt = format or path.suffix.lstrip(".").lower()
    if fmt == "json":
        data = {"ell": F.ell, "points": F.points.tolist()}
        if F.labels is not None:
            data["labels"] = list(F.labels)
        path.write_text(json.dumps(data, sort_keys=True) + "\n")
    elif fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            header = [f"y{i + 1}" for i in range(F.ell)]
            w.writerow(header + (["label"] if F.labels is not None else []))
            for n, p in enumerate(F.points):
                # repr keeps every float bit-exact
                row = [repr(float(v)) for v in p]
                w.writerow(row + ([F.labels[n]] if F.labels is not None else []))
    else:
        raise InputError(f"unknown format {fmt!r}; expected csv or json")


write_cloud = emit


# ---------------------------------------------------------------- analysis


@dataclass
class Options:
    mode: str = "gmin"
    tol: float = DEFAULT_TOL
    seed: int = 0
    k: list | None = None
    p: float | None = None
    u: list | None = None

    def validate(self, ell: int) -> None:
        if self.mode not in MODES:
            raise InputError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        try:
            check_tol(self.tol)
        except ValueError as e:
            raise InputError(str(e)) from None
        for name in ("k", "u"):
            v = getattr(self, name)
            if v is not None and len(v) != ell:
                raise InputError(f"--{name} needs {ell} values, got {len(v)}")
        if self.k is not None and any(x <= 0 for x in self.k):
            raise InputError("--k must be strictly positive")
        if self.p is not None and not self.p > 0:
            raise InputError("--p must be positive")
        if self.mode == "existence" and self.u is None:
            raise InputError("existence mode needs --u")


def _check(ok: bool, details=None) -> dict:
    return {"status": "pass" if ok else "fail", "details": details}


def _finite_or_none(x: float):
    return x if math.isfinite(x) else None


def _gmin_certs(F: PointCloud, tol: float) -> list[Certificate]:
    out = []
    for i, k_star in gmin_set(F, tol):
        K = certificate_K(k_star)
        out.append(Certificate(i, k_star, {"family": "cp", "p": F.ell * K, "K": K}))
    return out


def analyze(F: PointCloud, options: Options) -> dict:
    """Run one analysis mode and return a JSON-ready report."""
    options.validate(F.ell)
    tol, mode = options.tol, options.mode
    indices: list[int] = []
    certs: list[Certificate] = []
    checks: dict = {}
    extra: dict = {}
    try:
        if mode == "min":
            if options.p is None:
                indices = min_set(F, tol=tol)
            else:
                indices = gmin_via_cone(F, make_cp(options.p, F.ell), tol)
        elif mode == "wmin":
            indices = wmin_set(F, tol)
        elif mode == "gmin":
            certs = _gmin_certs(F, tol)
            indices = [c.index for c in certs]
            mins = min_set(F, tol=tol)
            checks["gmin_equals_min"] = _check(indices == mins, {"min": mins})
        elif mode == "certify":
            orth = make_orthant(F.ell)
            worst, bad = math.inf, 0
            for i, _ in gmin_set(F, tol):
                cert = build_proper_functional(F, i, options.k, tol)
                certs.append(cert)
                rep = check_monotone(cert.functional, "strict", orth, MONOTONE_SAMPLES,
                                     options.seed + i, tol)
                bad += rep.violations
                worst = min(worst, rep.worst_margin)
            indices = [c.index for c in certs]
            checks["verified_min_zero"] = _check(all(abs(c.verified_min) <= 1e-9 for c in certs))
            checks["strict_monotone"] = _check(bad == 0, {
                "samples_per_certificate": MONOTONE_SAMPLES,
                "violations": bad,
                "worst_margin": _finite_or_none(worst),
            })
        elif mode == "benson":
            flags = [benson_check(F, i, tol) for i in range(len(F))]
            indices = [i for i, f in enumerate(flags) if f]
            geo = [i for i, _ in gmin_set(F, tol)]
            checks["benson_equals_geoffrion"] = _check(indices == geo, {"gmin": geo})
        elif mode == "existence":
            found = {}
            for fam in EXISTENCE_FAMILIES:
                ok, param = existence_search(F, options.u, fam, tol=tol)
                found[fam] = {"found": ok, "param": param}
            extra["existence"] = found
            vals = {v["found"] for v in found.values()}
            checks["families_agree"] = _check(len(vals) == 1)
    except VerificationError as e:
        raise VerificationError(f"analyze[{mode}]: {e}") from e
    except ValueError as e:
        raise InputError(f"analyze[{mode}]: {e}") from e

    report = {
        "schema": SCHEMA,
        "version": __version__,
        "options": asdict(options),
        "mode": mode,
        "tol": tol,
        "seed": options.seed,
        "n_points": len(F),
        "ell": F.ell,
        "indices": indices,
        "certificates": [c.to_dict() for c in certs],
        "cross_checks": checks,
    }
    report.update(extra)
    return report


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------- plotting


def cone_rays(p: float) -> np.ndarray:
    """Unit boundary directions of ``-C^p`` in the plane, one per row.

    These bound the region ``y0 - C^p`` of points that would dominate a
    certified point ``y0``.
    """
    rows = make_cp(p, 2).rows
    rays = []
    for j in range(2):
        v = np.array([-rows[j, 1], rows[j, 0]])
        if rows[1 - j] @ v < 0:
            v = -v
        rays.append(-v / np.linalg.norm(v))
    return np.array(rays)


def plot_data(F: PointCloud, report: dict | None, out_path, tol: float = DEFAULT_TOL) -> None:
    """CSV ``y1,y2,class,ray1_x,ray1_y,ray2_x,ray2_y`` for external plotting.

    ``class`` is ``gmin``, ``min`` or ``dominated``. Rays are filled for gmin
    points only and come from each certificate's ``C^p``.
    """
    if F.ell != 2:
        raise InputError(f"plot data needs ell = 2, got {F.ell}")
    if report is None or report.get("mode") != "gmin":
        report = analyze(F, Options(mode="gmin", tol=tol))
    ps = {c["index"]: c["cone_param"]["p"] for c in report["certificates"]}
    mins = set(min_set(F, tol=tol))
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["y1", "y2", "class", "ray1_x", "ray1_y", "ray2_x", "ray2_y"])
        for i, (a, b) in enumerate(F.points):
            if i in ps:
                r = cone_rays(ps[i])
                w.writerow([repr(float(a)), repr(float(b)), "gmin"] + [repr(float(x)) for x in r.ravel()])
            else:
                w.writerow([repr(float(a)), repr(float(b)), "min" if i in mins else "dominated", "", "", "", ""])


# --------------------------------------------------------------------- main


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def _param(text: str):
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(val)
    except json.JSONDecodeError:
        return key, val


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="propeff", description="Proper efficiency analysis of finite point clouds.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="analyze a point cloud and write a JSON report")
    an.add_argument("input")
    an.add_argument("--mode", choices=MODES, default="gmin")
    an.add_argument("--format", choices=("csv", "json"))
    an.add_argument("--tol", type=float, default=DEFAULT_TOL)
    an.add_argument("--seed", type=int, default=0)
    an.add_argument("--k", type=_floats, help="direction for certificate functionals, e.g. 1,1")
    an.add_argument("--p", type=float, help="in min mode, dominate with the cone C^p instead of the orthant")
    an.add_argument("--u", type=_floats, help="reference point for existence mode")
    an.add_argument("--out")

    co = sub.add_parser("corpus", help="instance generators")
    cs = co.add_subparsers(dest="corpus_command", required=True)
    gen = cs.add_parser("gen", help="write a generated cloud")
    gen.add_argument("--spec", help="InstanceSpec as JSON")
    gen.add_argument("--kind")
    gen.add_argument("--param", type=_param, action="append", default=[], metavar="KEY=VALUE")
    gen.add_argument("--format", choices=("csv", "json"))
    gen.add_argument("--out", required=True)

    pd = sub.add_parser("plot-data", help="CSV of classes and cone rays for a planar cloud")
    pd.add_argument("input")
    pd.add_argument("--report", help="gmin report to reuse")
    pd.add_argument("--format", choices=("csv", "json"))
    pd.add_argument("--tol", type=float, default=DEFAULT_TOL)
    pd.add_argument("--out", required=True)
    return ap


def _run(args) -> None:
    if args.command == "analyze":
        F = ingest(args.input, args.format, args.tol)
        opts = Options(args.mode, args.tol, args.seed, args.k, args.p, args.u)
        text = dump_report(analyze(F, opts))
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    elif args.command == "corpus":
        if args.spec:
            try:
                spec = InstanceSpec.from_json(args.spec)
            except (json.JSONDecodeError, KeyError) as e:
                raise InputError(f"bad --spec: {e}") from None
        elif args.kind:
            spec = InstanceSpec(args.kind, dict(args.param))
        else:
            raise InputError("corpus gen needs --spec or --kind")
        try:
            F = generate(spec)
        except TypeError as e:
            raise InputError(f"bad parameters for {spec.kind}: {e}") from None
        emit(F, args.out, args.format)
    elif args.command == "plot-data":
        F = ingest(args.input, args.format, args.tol)
        report = json.loads(Path(args.report).read_text()) if args.report else None
        plot_data(F, report, args.out, args.tol)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _run(args)
    except VerificationError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
