"""Command-line front end: code generation, lattice build/export, encode,
decode, SER simulation, shaping-gain estimation, and the encoder cost table.

Every output artifact embeds the tool version and a hash of the resolved
configuration; all randomness derives from the single --seed flag.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

import numpy as np

from . import __version__
from ._backend import BACKEND
from .encoder import SCHEMES, encode, sraa_cost
from .decoder import LatticeDecoder
from .lattice import build_lattice, vnr_sigma
from .qccode import (
    GirthUnreachable,
    QCCodeSpec,
    dump_code,
    generate_code,
    parse_code,
    read_code_file,
)
from .shaping import CSV_HEADER as SHAPING_CSV_HEADER
from .shaping import VoronoiCode, estimate_G
from .simkit import CSV_HEADER as SER_CSV_HEADER
from .simkit import ConfigInvalid, ExperimentConfig, awgn, csv_rows, default_workers, run_ser


def _config_hash(ns: argparse.Namespace) -> str:
    payload = {k: v for k, v in sorted(vars(ns).items()) if k != "func"}
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _stamp(ns) -> list[str]:
    return [f"qclattice {__version__} backend={BACKEND} config={_config_hash(ns)}"]


def _emit(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def _load_lattice(args):
    qc = read_code_file(args.code)
    return build_lattice(qc)


def cmd_gen_code(args) -> int:
    spec = QCCodeSpec(
        c=args.c,
        t=args.t,
        b=args.b,
        row_weight=args.weight,
        target_girth=args.girth,
        seed=args.seed,
        mask=frozenset(tuple(map(int, m.split(","))) for m in args.mask),
    )
    qc = generate_code(spec)
    _emit(args.out, dump_code(qc, _stamp(args)))
    return 0


def cmd_build(args) -> int:
    lat = _load_lattice(args)
    lines = [f"# {c}" for c in _stamp(args)]
    lines.append(dump_code(lat.h).rstrip("\n"))
    lines.append("perm " + " ".join(str(p) for p in lat.gen.perm))
    lines.append("dep " + " ".join(str(p) for p in lat.dep_positions))
    _emit(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_encode(args) -> int:
    lat = _load_lattice(args)
    if args.zero:
        u = np.zeros(lat.n, dtype=np.int64)
    elif args.info:
        u = np.asarray([int(x) for x in args.info.split(",")], dtype=np.int64)
    else:
        rng = np.random.default_rng(args.seed)
        u = rng.integers(0, 2, size=lat.n, dtype=np.int64)
    x = encode(lat, u)
    header = "".join(f"# {c}\n" for c in _stamp(args))
    _emit(args.out, header + " ".join(str(v) for v in x) + "\n")
    return 0


def cmd_decode(args) -> int:
    lat = _load_lattice(args)
    y = np.asarray([float(x) for x in open(args.received).read().split()])
    dec = LatticeDecoder(lat, args.max_iter)
    res = dec.decode(y, args.sigma, args.decoder)
    header = "".join(f"# {c}\n" for c in _stamp(args))
    body = " ".join(str(int(v)) for v in res.x_hat)
    _emit(args.out, header + body + f"\n# converged={res.converged} iters={res.iterations_used}\n")
    return 0


def cmd_simulate(args) -> int:
    lat = _load_lattice(args)
    cfg = ExperimentConfig(
        vnr_grid_db=tuple(float(v) for v in args.vnr.split(",")),
        max_iter=args.max_iter,
        min_errors=args.min_errors,
        max_symbols=args.max_symbols,
        seed=args.seed,
        decoder=args.decoder,
        workers=args.workers if args.workers else default_workers(),
    )
    points = run_ser(lat, cfg)
    lines = [f"# {c}" for c in _stamp(args)]
    lines.append(SER_CSV_HEADER)
    lines.extend(csv_rows(points, lat))
    _emit(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_shaping_gain(args) -> int:
    lat = _load_lattice(args)
    vc = VoronoiCode(lat, M=args.M, quantizer=args.quantizer)
    rep = estimate_G(vc, samples=args.samples, seed=args.seed)
    lines = [f"# {c}" for c in _stamp(args)]
    lines.append(SHAPING_CSV_HEADER)
    lines.append(rep.csv_row())
    _emit(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_cost(args) -> int:
    lines = [f"# {c}" for c in _stamp(args)]
    lines.append("scheme,clock_cycles,flip_flops,xor_gates,and_gates,or_gates,asymptotic")
    for scheme in SCHEMES:
        sc = sraa_cost(scheme, args.c, args.t, args.b, args.L, args.wc)
        lines.append(
            f"{sc.scheme},{sc.clock_cycles},{sc.flip_flops},{sc.xor_gates},"
            f"{sc.and_gates},{sc.or_gates},{int(sc.asymptotic)}"
        )
    _emit(args.out, "\n".join(lines) + "\n")
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qclat", description=__doc__)
    p.add_argument("--version", action="version", version=f"qclattice {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-code", help="generate a girth-conditioned QC-LDPC code")
    g.add_argument("--c", type=int, required=True)
    g.add_argument("--t", type=int, required=True)
    g.add_argument("--b", type=int, required=True)
    g.add_argument("--weight", type=int, default=1)
    g.add_argument("--girth", type=int, default=6, choices=(6, 8))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--mask", action="append", default=[], metavar="I,J",
                   help="zero out block (i,j); repeatable")
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_gen_code)

    b = sub.add_parser("build", help="build a lattice and export its structure")
    b.add_argument("--code", required=True)
    b.add_argument("--out", default="-")
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("encode", help="encode an info vector")
    e.add_argument("--code", required=True)
    e.add_argument("--zero", action="store_true", help="encode the zero vector")
    e.add_argument("--info", help="comma-separated integers")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", default="-")
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode", help="decode a received vector")
    d.add_argument("--code", required=True)
    d.add_argument("--received", required=True, help="file of whitespace-separated floats")
    d.add_argument("--sigma", type=float, required=True)
    d.add_argument("--decoder", default="spa", choices=("spa", "cs-spa"))
    d.add_argument("--max-iter", type=int, default=50)
    d.add_argument("--out", default="-")
    d.set_defaults(func=cmd_decode)

    s = sub.add_parser("simulate", help="SER over a VNR grid")
    s.add_argument("--code", required=True)
    s.add_argument("--vnr", required=True, help="comma-separated dB values")
    s.add_argument("--decoder", default="spa", choices=("spa", "cs-spa", "both"))
    s.add_argument("--max-iter", type=int, default=50)
    s.add_argument("--min-errors", type=int, default=100)
    s.add_argument("--max-symbols", type=int, default=2_000_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=0,
                   help="0 = honour QCLAT_WORKERS env var")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_simulate)

    sh = sub.add_parser("shaping-gain", help="Monte-Carlo shaping gain/loss")
    sh.add_argument("--code", required=True)
    sh.add_argument("--M", type=int, default=4)
    sh.add_argument("--quantizer", default="exact", choices=("exact", "nearest_plane"))
    sh.add_argument("--samples", type=int, default=100_000)
    sh.add_argument("--seed", type=int, default=0)
    sh.add_argument("--out", default="-")
    sh.set_defaults(func=cmd_shaping_gain)

    co = sub.add_parser("cost", help="SRAA encoder cost table")
    co.add_argument("--c", type=int, required=True)
    co.add_argument("--t", type=int, required=True)
    co.add_argument("--b", type=int, required=True)
    co.add_argument("--L", type=int, default=2)
    co.add_argument("--wc", type=int, default=3)
    co.add_argument("--out", default="-")
    co.set_defaults(func=cmd_cost)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except GirthUnreachable as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ConfigInvalid, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
