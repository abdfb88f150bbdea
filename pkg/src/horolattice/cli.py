"""Command-line interface: one subcommand per library operation.

All outputs are machine-readable (JSON by default, CSV for sample dumps) and
reproducible: the same argv and seed produce byte-identical output except for
the meta.timestamp / meta.runtime_s fields of experiment reports.  Exit codes:
0 success, 2 usage error, 3 size-cap exceeded.
"""

from __future__ import annotations

import argparse
import datetime
import io
import json
import math
import os
import sys
import tempfile
import time

from . import __version__
from .circulant import CirculantGraph, check_sandwich, diameter
from .errors import HorolatticeError, TooLargeError
from .experiments import (
    LatticeTestFn,
    ks_distance,
    lattice_average,
    psi_empirical,
    psi_samples,
    reference_value,
    torus_character_average,
)
from .hecke import hecke_average, hecke_orbit
from .intmat import IntMatrix
from .lattices import SublatticeBasis, covering_radius_l1, cvp_l1, sublattice_from_residue
from .numtheory import as_factored, check_weil, count_Rq, kloosterman, ramanujan_sum
from .residues import (
    ResidueVector,
    enumerate_Rq,
    enumerate_cosets,
    horosphere_representative,
    parametrize_r,
    sample_Rq,
)


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _matrix(text: str) -> IntMatrix:
    try:
        return IntMatrix([[int(v) for v in row.split(",")] for row in text.split(";")])
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected semicolon-separated rows of comma-separated integers, got {text!r}"
        )


def _residue_arg(args) -> ResidueVector:
    q = as_factored(args.q)
    if args.a is not None:
        return ResidueVector(q, args.a)
    return sample_Rq(q, args.d, args.seed)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".horolat-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _meta(args, config: dict, runtime_s: float) -> dict:
    # timestamp and runtime_s are the only fields excluded from byte-for-byte
    # reproducibility comparisons.
    return {
        "version": __version__,
        "seed": args.seed,
        "config": config,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "runtime_s": round(runtime_s, 6),
    }


def _ccdf_grid(dist, points: int = 41) -> list[dict]:
    top = dist.samples[-1]
    return [
        {"R": round(top * i / (points - 1), 12), "ccdf": dist.ccdf(top * i / (points - 1))}
        for i in range(points)
    ]


# ---------------------------------------------------------------- handlers


def _cmd_count_rq(args) -> str:
    return _json(count_Rq(as_factored(args.q), args.d))


def _cmd_enumerate_rq(args) -> str:
    vecs = [list(r.coords) for r in enumerate_Rq(as_factored(args.q), args.d)]
    return _json({"q": args.q, "d": args.d, "count": len(vecs), "vectors": vecs})


def _cmd_kloosterman(args) -> str:
    s = kloosterman(args.a, args.b, args.q)
    return _json(s.re)


def _cmd_ramanujan(args) -> str:
    return _json(ramanujan_sum(args.n, as_factored(args.q)))


def _cmd_weil_check(args) -> str:
    w = check_weil(args.a, args.b, as_factored(args.q))
    return _json({"lhs": w.lhs, "rhs": w.rhs, "holds": w.holds})


def _cmd_cosets(args) -> str:
    labels = [list(pt.rep) for pt, _ in enumerate_cosets(as_factored(args.q), args.d)]
    return _json({"q": args.q, "d": args.d, "index": len(labels), "labels": labels})


def _cmd_parametrize(args) -> str:
    r = parametrize_r(args.gamma, args.u, as_factored(args.q))
    return _json(r.tojson())


def _cmd_horosphere_rep(args) -> str:
    r = ResidueVector(as_factored(args.q), args.r)
    m = horosphere_representative(r)
    return _json({"q": args.q, "r": list(args.r), "matrix": m.tolist(), "det": m.det()})


def _cmd_hecke_test(args) -> str:
    fn = LatticeTestFn(args.kind, args.region, args.radius)
    orbit = hecke_orbit(as_factored(args.q), args.d)
    avg = hecke_average(as_factored(args.q), args.d, fn)
    ref = reference_value(fn, args.d)
    return _json(
        {
            "q": args.q,
            "d": args.d,
            "index": orbit.index,
            "average": avg,
            "reference": ref,
            "abs_deviation": abs(avg - ref),
        }
    )


def _cmd_sublattice(args) -> str:
    r = ResidueVector(as_factored(args.q), args.a)
    lat = sublattice_from_residue(r)
    return _json(
        {
            "q": args.q,
            "a": list(args.a),
            "basis": lat.basis.tolist(),
            "det": lat.det(),
            "scale": lat.scale,
        }
    )


def _cmd_covering_radius(args) -> str:
    lat = SublatticeBasis(args.basis.nrows, args.basis, args.scale)
    res = covering_radius_l1(lat, args.eps)
    return _json(
        {
            "lo": res.lo,
            "hi": res.hi,
            "deep_hole": list(res.deep_hole),
            "cells_explored": res.cells_explored,
        }
    )


def _cmd_diam(args) -> str:
    r = _residue_arg(args)
    g = CirculantGraph(r.modulus, r.coords)
    dia = diameter(g)
    return _json(
        {"q": r.modulus, "a": list(r.coords), "diam": dia, "rescaled": dia / r.modulus ** (1 / r.d)}
    )


def _cmd_sandwich_check(args) -> str:
    rep = check_sandwich(_residue_arg(args), args.eps)
    return _json(
        {
            "q": rep.q,
            "a": list(rep.a),
            "diam": rep.diam,
            "rho_scaled": rep.rho_scaled,
            "rho_lo": rep.rho_lo,
            "rho_hi": rep.rho_hi,
            "ok": rep.ok,
        }
    )


def _cmd_torus_average(args) -> str:
    s = torus_character_average(as_factored(args.q), args.d, args.n)
    return _json(
        {"q": args.q, "d": args.d, "n": list(args.n), "re": s.re, "im": s.im, "abs_err": s.abs_err}
    )


def _cmd_lattice_average(args) -> str:
    fn = LatticeTestFn(args.kind, args.region, args.radius)
    avg = lattice_average(as_factored(args.q), args.d, fn, args.n_samples, args.seed)
    ref = reference_value(fn, args.d)
    return _json(
        {
            "q": args.q,
            "d": args.d,
            "kind": args.kind,
            "region": args.region,
            "radius": args.radius,
            "n_samples": args.n_samples,
            "seed": args.seed,
            "average": avg,
            "reference": ref,
            "abs_deviation": abs(avg - ref),
        }
    )


def _cmd_distribution(args) -> str:
    t0 = time.perf_counter()
    if args.format == "csv":
        samples = psi_samples(as_factored(args.q), args.d, args.n_samples, args.seed, args.eps, args.route)
        buf = io.StringIO()
        cols = [f"a{i + 1}" for i in range(args.d)]
        buf.write(",".join(["q"] + cols + ["diam", "rescaled", "rho_lo", "rho_hi"]) + "\n")
        for s in samples:
            row = [str(args.q), *[str(v) for v in s.a]]
            row.append("" if s.diam is None else str(s.diam))
            row.append("" if s.rescaled is None else repr(s.rescaled))
            row.append("" if s.rho_lo is None else repr(s.rho_lo))
            row.append("" if s.rho_hi is None else repr(s.rho_hi))
            buf.write(",".join(row) + "\n")
        return buf.getvalue()
    dist = psi_empirical(as_factored(args.q), args.d, args.n_samples, args.seed, args.eps, args.route)
    config = {
        "q": args.q,
        "d": args.d,
        "n_samples": args.n_samples,
        "eps": args.eps,
        "route": args.route,
    }
    report = {
        "meta": _meta(args, config, time.perf_counter() - t0),
        "results": [
            {
                "q": args.q,
                "n": dist.n,
                "samples_file": None,
                "ccdf_grid": _ccdf_grid(dist),
                "ks_to_ref": 0.0,
            }
        ],
    }
    return _json(report)


def _cmd_convergence(args) -> str:
    t0 = time.perf_counter()
    from .experiments import convergence_report

    rep = convergence_report(args.d, args.q_list, args.n_samples, args.seed)
    config = {"d": args.d, "q_list": list(args.q_list), "n_samples": args.n_samples}
    report = {
        "meta": _meta(args, config, time.perf_counter() - t0),
        "results": [
            {
                "q": row["q"],
                "n": row["n"],
                "samples_file": None,
                "mean": row["mean"],
                "ks_to_ref": row["ks_to_ref"],
                "ks_to_prev": row["ks_to_prev"],
            }
            for row in rep.results
        ],
        "ks_monotone_to_ref": rep.ks_monotone_to_ref,
    }
    return _json(report)


# ---------------------------------------------------------------- parser


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="horolat",
        description="Primitive residue vectors mod q, exponential sums, Hecke orbits, "
        "l1 covering radii and circulant-graph diameter statistics.",
    )
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, handler, help_, out=True, seed=False, threads=False):
        p = sub.add_parser(name, help=help_, description=help_)
        p.set_defaults(handler=handler)
        if out:
            p.add_argument("--out", help="write output atomically to this path instead of stdout")
        if seed:
            p.add_argument("--seed", type=int, default=0, help="64-bit RNG seed (default 0)")
        if threads:
            p.add_argument(
                "--threads",
                type=int,
                default=os.cpu_count() or 1,
                help="worker cap for parallel experiments; results are independent of it",
            )
        return p

    p = add(
        "count-rq",
        _cmd_count_rq,
        "Count d-tuples of residues in (0, q] jointly coprime to q: "
        "q^d * prod over p | q of (1 - p^-d).",
    )
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int, required=True)

    p = add("enumerate-rq", _cmd_enumerate_rq, "List all residue vectors for (q, d).")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int, required=True)

    p = add(
        "kloosterman",
        _cmd_kloosterman,
        "Kloosterman sum S(a, b; q) = sum over units u mod q of e((a*inv(u) + b*u)/q); "
        "prints the (real) value.",
    )
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = add(
        "ramanujan",
        _cmd_ramanujan,
        "Ramanujan sum c_q(n) via the closed form mu(q/g) phi(q) / phi(q/g), g = gcd(n, q).",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = add(
        "weil-check",
        _cmd_weil_check,
        "Check |S(a, b; q)| <= sqrt(q) gcd(a, b, q)^(1/2) sigma0(q).",
    )
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = add(
        "cosets",
        _cmd_cosets,
        "Enumerate the cosets of the last-row congruence subgroup of SL_d(Z) mod q "
        "by their canonical projective labels.",
    )
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int, required=True)

    p = add(
        "parametrize",
        _cmd_parametrize,
        "Residue vector r = u * (last row of gamma) mod q, coordinates in [1, q].",
    )
    p.add_argument("--gamma", type=_matrix, required=True, help="rows as 'a,b;c,d'")
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = add(
        "horosphere-rep",
        _cmd_horosphere_rep,
        "Integral determinant-one representative [[(B - s r^t)/q, s], [-r^t, q]] "
        "attached to a residue vector r.",
    )
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--r", type=_ints, required=True, help="comma-separated coordinates")

    p = add(
        "hecke-test",
        _cmd_hecke_test,
        "Average a point-count functional over the orbit diag(q,..,q,1) * coset reps, "
        "rescaled to unimodular lattices, against its mean-value reference.",
        threads=True,
    )
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--kind", choices=["count_all", "count_primitive"], default="count_all")
    p.add_argument("--region", choices=["l2", "linf"], default="l2")
    p.add_argument("--radius", type=float, default=1.2)

    p = add(
        "sublattice",
        _cmd_sublattice,
        "HNF basis of {m in Z^d : m . a = 0 mod q} (determinant exactly q).",
    )
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a", type=_ints, required=True)

    p = add(
        "covering-radius",
        _cmd_covering_radius,
        "Certified interval for the l1 covering radius (= l1 torus diameter) of a lattice.",
    )
    p.add_argument("--basis", type=_matrix, required=True, help="integer rows as 'a,b;c,d'")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=1e-3)

    p = add(
        "diam",
        _cmd_diam,
        "Exact diameter of the circulant graph on Z/qZ with steps +-a_i (BFS from 0).",
        seed=True,
    )
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int, default=1, help="used when sampling a random generator tuple")
    p.add_argument("--a", type=_ints, default=None, help="explicit generators; random if omitted")

    p = add(
        "sandwich-check",
        _cmd_sandwich_check,
        "Check q^(1/d) rho - d/2 <= diam <= q^(1/d) rho with a certified rho interval.",
        seed=True,
    )
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--a", type=_ints, default=None)
    p.add_argument("--eps", type=float, default=1e-3)

    p = add(
        "torus-average",
        _cmd_torus_average,
        "Exact character average (1/#R_q) sum over r of e(n . r / q).",
    )
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=_ints, required=True)

    p = add(
        "lattice-average",
        _cmd_lattice_average,
        "Monte Carlo (or exhaustive) average of a point-count functional over the "
        "rescaled residue sublattices, with its mean-value reference.",
        seed=True,
        threads=True,
    )
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--kind", choices=["count_all", "count_primitive"], default="count_primitive")
    p.add_argument("--region", choices=["l2", "linf"], default="l2")
    p.add_argument("--radius", type=float, default=1.2)
    p.add_argument("--n-samples", type=int, default=1000)

    p = add(
        "distribution",
        _cmd_distribution,
        "Empirical distribution of diam/q^(1/d) (or of the covering radius) over random "
        "generator tuples; JSON report or CSV sample dump.",
        seed=True,
        threads=True,
    )
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--n-samples", type=int, default=1000)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--route", choices=["bfs", "rho", "both"], default="bfs")
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = add(
        "convergence",
        _cmd_convergence,
        "Kolmogorov-Smirnov distances between diameter distributions along a q list, "
        "against the largest q as reference.",
        seed=True,
        threads=True,
    )
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--q-list", type=_ints, required=True)
    p.add_argument("--n-samples", type=int, default=1000)

    return top


def dispatch(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "threads", 1) is not None and getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        text = args.handler(args)
    except TooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except HorolatticeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(text, getattr(args, "out", None))
    return 0


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))
