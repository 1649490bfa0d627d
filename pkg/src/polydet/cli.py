"""polydet command line: det, bench, triples."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from .algebra import GF, Matrix, PolyMatrix, Polynomial, is_irreducible, is_prime
from .determinant import METHODS, compute_determinant
from .errors import DomainError, LeakSignal, ProtocolError
from .rings import ring_from_key
from .triples import ChecksumError, generate_file, inspect_triples

EXIT_OK, EXIT_INPUT, EXIT_LEAK = 0, 1, 2
DEFAULT_N = 3
DEFAULT_Q = 101

COST_COLUMNS = [
    "protocol",
    "rounds",
    "bits_per_player",
    "triples_field",
    "triples_series",
    "triples_mat",
    "triples_polymat",
    "triples_extfield",
    "triples_extmat",
    "field_ops",
    "retry_rounds",
    "retries",
]
BENCH_COLUMNS = ["method", "n", "d", "N", "q"] + COST_COLUMNS[1:] + ["rounds_constant"]

_KIND_COLUMNS = {
    "field": "triples_field",
    "series": "triples_series",
    "matrix": "triples_mat",
    "polymatrix": "triples_polymat",
    "extfield": "triples_extfield",
    "extmatrix": "triples_extmat",
}


class InputError(DomainError):
    pass


def cost_row(protocol: str, costs: dict) -> dict:
    row = {c: 0 for c in COST_COLUMNS}
    row["protocol"] = protocol
    row["rounds"] = costs["rounds"]
    row["bits_per_player"] = costs["bits_per_player"]
    for kind, v in costs["triples"].items():
        row[_KIND_COLUMNS[kind]] = v
    row["field_ops"] = costs["field_ops"]
    row["retry_rounds"] = costs["retry_rounds"]
    row["retries"] = costs["retries"]
    return row


def _write_csv(path, columns, rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    Path(path).write_text(buf.getvalue())


def load_matrix_input(path) -> tuple[PolyMatrix, dict]:
    """Parse and validate a matrix input file."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise InputError(f"cannot read input: {err}") from err
    for key in ("q", "n", "d", "entries"):
        if key not in doc:
            raise InputError(f"missing field {key!r}")
    q, n, d = doc["q"], doc["n"], doc["d"]
    if not all(isinstance(v, int) for v in (q, n, d)):
        raise InputError("q, n and d must be integers")
    if q < 3 or q.bit_length() > 62 or not is_prime(q):
        raise InputError(f"q={q} is not an odd prime below 2^62")
    if n < 1 or d < 0:
        raise InputError("need n >= 1 and d >= 0")
    rows = doc["entries"]
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise InputError(f"entries must be an {n}x{n} array of coefficient lists")
    F = GF(q)
    entries = []
    for i, row in enumerate(rows):
        out = []
        for j, coeffs in enumerate(row):
            if not isinstance(coeffs, list) or not all(isinstance(c, int) for c in coeffs):
                raise InputError(f"entry ({i},{j}) must be a list of integers")
            bad = [c for c in coeffs if not 0 <= c < q]
            if bad:
                raise InputError(f"entry ({i},{j}) has coefficient {bad[0]} outside [0, {q})")
            p = Polynomial(F, coeffs)
            if p.degree > d:
                raise InputError(f"entry ({i},{j}) has degree {p.degree} > d={d}")
            out.append(p)
        entries.append(out)
    return PolyMatrix(F, entries, d), doc


def _seed(arg_seed, doc_seed) -> int:
    env = os.environ.get("POLYDET_SEED")
    if env is not None:
        try:
            return int(env, 0)
        except ValueError:
            raise InputError(f"POLYDET_SEED={env!r} is not an integer") from None
    if arg_seed is not None:
        return arg_seed
    return int(doc_seed) if doc_seed is not None else 0


def _fail(code: int, kind: str, message: str, **extra) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}, sort_keys=True) + "\n")
    return code


def cmd_det(args) -> int:
    A, doc = load_matrix_input(args.input)
    N = args.N if args.N is not None else int(doc.get("N", DEFAULT_N))
    if N < 2:
        raise InputError("need at least two players")
    seed = _seed(args.seed, doc.get("seed"))
    res = compute_determinant(A, args.method, N=N, seed=seed, transcript=bool(args.transcript))
    det = res.value()
    out = json.dumps({"det": list(det.coeffs) or [0]}) + "\n"
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    if args.costs:
        _write_csv(args.costs, COST_COLUMNS, [cost_row(args.method, res.costs)])
    if args.transcript:
        Path(args.transcript).write_text(res.transcript.to_jsonl())
    return EXIT_OK


def parse_axis(axis: str) -> tuple[str, list[int]]:
    """'n=1..4' -> ('n', [1,2,3,4]); 'N=2,3,5' -> ('N', [2,3,5]); 'd=' -> ('d', [])."""
    if "=" not in axis:
        raise InputError(f"bad grid axis {axis!r}; expected name=values")
    name, vals = axis.split("=", 1)
    name = name.strip()
    if name not in ("n", "d", "N"):
        raise InputError(f"unknown grid axis {name!r}")
    vals = vals.strip()
    if not vals:
        return name, []
    out = []
    try:
        for part in vals.split(","):
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise InputError(f"bad values in grid axis {axis!r}") from None
    return name, out


def random_polymatrix(F: GF, n: int, d: int, rng: np.random.Generator, invertible_at_zero: bool = False) -> PolyMatrix:
    while True:
        coeffs = rng.integers(0, F.q, size=(n, n, d + 1))
        A = PolyMatrix(F, [[Polynomial(F, [int(c) for c in coeffs[i, j]]) for j in range(n)] for i in range(n)], d)
        if not invertible_at_zero or Matrix(F, coeffs[:, :, 0].tolist()).det() != 0:
            return A


def bench_rows(grid: dict, q: int, seed: int, methods=METHODS) -> list[dict]:
    F = GF(q)
    rows = []
    for method in methods:
        for n in grid["n"]:
            for d in grid["d"]:
                for N in grid["N"]:
                    rng = np.random.default_rng([seed, n, d, N])
                    A = random_polymatrix(F, n, d, rng, invertible_at_zero=True)
                    res = compute_determinant(A, method, N=N, seed=seed)
                    r = cost_row(method, res.costs)
                    del r["protocol"]
                    rows.append({"method": method, "n": n, "d": d, "N": N, "q": q, **r})
    for method in methods:
        mine = [r for r in rows if r["method"] == method]
        verdict = "yes" if len({r["rounds"] for r in mine}) <= 1 else "no"
        for r in mine:
            r["rounds_constant"] = verdict
    return rows


def cmd_bench(args) -> int:
    grid = {"n": [1, 2, 3, 4], "d": [0, 1, 2, 3], "N": [2, 3, 5]}
    for axis in args.grid or []:
        name, vals = parse_axis(axis)
        grid[name] = vals
    if not is_prime(args.q) or args.q < 3:
        raise InputError(f"q={args.q} is not an odd prime")
    methods = args.methods.split(",") if args.methods else list(METHODS)
    for m in methods:
        if m not in METHODS:
            raise InputError(f"unknown method {m!r}")
    seed = _seed(args.seed, None)
    rows = bench_rows(grid, args.q, seed, methods)
    _write_csv(args.out, BENCH_COLUMNS, rows)
    return EXIT_OK


def _parse_params(kind: str, text: str) -> tuple:
    vals = tuple(int(v) for v in text.replace(" ", "").split(",") if v) if text else ()
    need = {"field": 0, "series": 1, "matrix": 1, "polymatrix": 2, "seriesmatrix": 2}
    if kind in need and len(vals) != need[kind]:
        raise InputError(f"kind {kind!r} takes {need[kind]} parameter(s), got {len(vals)}")
    return vals


def cmd_triples(args) -> int:
    if args.action == "gen":
        q = args.q
        if not is_prime(q) or q < 3:
            raise InputError(f"q={q} is not an odd prime")
        F = GF(q)
        params = _parse_params(args.kind, args.params)
        if args.kind in ("extfield", "extmatrix"):
            f = Polynomial(F, params if args.kind == "extfield" else params[1:])
            if f.degree < 1 or not f.is_monic() or not is_irreducible(f):
                raise InputError("extension modulus must be monic irreducible (ascending coefficients)")
        ring = ring_from_key(F, (args.kind,) + params)
        if args.count < 0:
            raise InputError("count must be >= 0")
        info = generate_file(args.out, ring, args.N, args.count, _seed(args.seed, None))
    else:
        info = inspect_triples(args.file, verify=args.verify)
        if args.verify and not info["verified"]:
            sys.stdout.write(json.dumps(info, sort_keys=True) + "\n")
            return _fail(EXIT_INPUT, "verification", "stored triples do not satisfy x = y*z")
    sys.stdout.write(json.dumps(info, sort_keys=True) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polydet", description="Shared determinants of polynomial matrices.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("det", help="run one determinant protocol on a JSON matrix")
    d.add_argument("--method", choices=METHODS, required=True)
    d.add_argument("--input", required=True)
    d.add_argument("--N", type=int, default=None, help=f"players (default: file or {DEFAULT_N})")
    d.add_argument("--seed", type=int, default=None, help="master seed (POLYDET_SEED wins)")
    d.add_argument("--out", help="write {\"det\": [...]} here instead of stdout")
    d.add_argument("--costs", help="one-row cost CSV")
    d.add_argument("--transcript", help="broadcast log as JSON lines")
    d.set_defaults(func=cmd_det)

    b = sub.add_parser("bench", help="cost grid over (method, n, d, N)")
    b.add_argument("--grid", nargs="*", help="axes such as n=1..4 d=0..3 N=2,3,5")
    b.add_argument("--q", type=int, default=DEFAULT_Q)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--methods", default=None, help="comma-separated subset")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)

    t = sub.add_parser("triples", help="preprocessing files")
    tsub = t.add_subparsers(dest="action", required=True)
    g = tsub.add_parser("gen")
    g.add_argument("--kind", required=True, choices=["field", "series", "matrix", "polymatrix", "extfield", "extmatrix", "seriesmatrix"])
    g.add_argument("--params", default="", help="comma-separated, e.g. 3 or 2,1")
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--q", type=int, default=DEFAULT_Q)
    g.add_argument("--N", type=int, default=DEFAULT_N)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out", required=True)
    i = tsub.add_parser("inspect")
    i.add_argument("file")
    i.add_argument("--verify", action="store_true")
    t.set_defaults(func=cmd_triples)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LeakSignal as err:
        return _fail(EXIT_LEAK, "leak", str(err), reason=err.reason)
    except ChecksumError as err:
        return _fail(EXIT_INPUT, "checksum", str(err))
    except (DomainError, ProtocolError, OSError) as err:
        return _fail(EXIT_INPUT, "input", str(err))


if __name__ == "__main__":
    sys.exit(main())
