"""Command-line interface: construct rules, evaluate errors, emit points.

Subcommands are thin wrappers over the library.  Every run is deterministic:
the core uses no randomness, so identical flags produce byte-identical rule
files regardless of thread count.  ``construct`` writes a JSON run manifest
next to the rule file; ``construct --from-manifest`` replays a manifest and
reproduces the rule file byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .cbc import TIE_BREAK, LatticeRule, cbc_fast, cbc_naive, load_rule, save_rule
from .gfpoly import Modulus, find_irreducible, is_irreducible
from .pointgen import (
    GenMatrix,
    interlace,
    lattice_points,
    points_to_csv,
    read_matrix_file,
    rule_points,
    write_matrix_file,
    write_points_bin,
)
from .reference import (
    REFERENCE_RULES,
    audit_construction,
    evaluate_errors,
    matches_three_digits,
)
from .walsh_kernel import (
    DigitRational,
    cached_exp_table,
    omega_base2,
    omega_digits,
    omega_nonzero_digits,
    omega_series_oracle,
)
from .wce import WeightSequence, prefix_wce_products, wce_bound

__all__ = ["RunManifest", "main"]

MANIFEST_SCHEMA = 1


@dataclass
class RunManifest:
    """Parameter echo and output digests of one ``construct`` run.

    Replaying the manifest re-runs the construction with the recorded
    parameters and must reproduce the recorded rule file byte for byte.
    """

    b: int
    m: int
    alpha: int
    s: int
    p: int
    g: int | None
    weights: str
    algorithm: str
    tie_break: str = TIE_BREAK
    version: str = __version__
    schema_version: int = MANIFEST_SCHEMA
    timing_seconds: float = 0.0
    outputs: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "RunManifest":
        if obj.get("schema_version") != MANIFEST_SCHEMA:
            raise ValueError(f"unsupported manifest schema {obj.get('schema_version')!r}")
        return cls(
            b=int(obj["b"]),
            m=int(obj["m"]),
            alpha=int(obj["alpha"]),
            s=int(obj["s"]),
            p=int(obj["p"]),
            g=obj.get("g"),
            weights=str(obj["weights"]),
            algorithm=str(obj["algorithm"]),
            tie_break=obj.get("tie_break", TIE_BREAK),
            version=obj.get("version", __version__),
            timing_seconds=float(obj.get("timing_seconds", 0.0)),
            outputs=list(obj.get("outputs", [])),
        )


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _resolve_modulus(p_flag: str, n: int, b: int) -> Modulus:
    if p_flag == "auto":
        return find_irreducible(n, b)
    try:
        p = int(p_flag)
    except ValueError as exc:
        raise ValueError(f"--p must be 'auto' or an integer code, got {p_flag!r}") from exc
    mod = Modulus.create(p, b)
    if mod.n != n:
        raise ValueError(f"modulus code {p} has degree {mod.n}, need n = alpha*m = {n}")
    if not is_irreducible(p, b):
        raise ValueError(f"modulus code {p} is reducible over F_{b}")
    return mod


def _print_errors(errors, prefix: str = "") -> None:
    for d, e in enumerate(errors, start=1):
        print(f"{prefix}e_{d} = {e:.5e}")


def cmd_construct(args: argparse.Namespace) -> int:
    if args.from_manifest is not None:
        manifest = RunManifest.from_json(json.loads(Path(args.from_manifest).read_text()))
        b, m, alpha, s = manifest.b, manifest.m, manifest.alpha, manifest.s
        weights_spec, algo = manifest.weights, manifest.algorithm
        modulus = _resolve_modulus(str(manifest.p), alpha * m, b)
        g = manifest.g
    else:
        for name in ("m", "alpha", "s"):
            if getattr(args, name) is None:
                raise ValueError(f"--{name} is required (or use --from-manifest)")
        b, m, alpha, s = args.b, args.m, args.alpha, args.s
        weights_spec, algo = args.weights, args.algo
        if s < 1:
            raise ValueError("s must be >= 1")
        modulus = _resolve_modulus(args.p, alpha * m, b)
        g = None
    weights = WeightSequence.parse(weights_spec, s)
    t0 = time.perf_counter()
    if algo == "naive":
        rule = cbc_naive(s, m, alpha, modulus, weights)
    else:
        rule = cbc_fast(s, m, alpha, modulus, weights, g=g, workers=args.threads)
    elapsed = time.perf_counter() - t0
    out = Path(args.out)
    save_rule(rule, out)
    manifest = RunManifest(
        b=b,
        m=m,
        alpha=alpha,
        s=s,
        p=modulus.p,
        g=rule.generator_g,
        weights=weights_spec,
        algorithm=algo,
        timing_seconds=round(elapsed, 6),
        outputs=[{"path": str(out), "sha256": _sha256(out), "bytes": out.stat().st_size}],
    )
    manifest_path = out.with_name(out.name + ".manifest.json")
    manifest_path.write_text(json.dumps(manifest.to_json(), indent=2, sort_keys=True) + "\n")
    print(f"constructed rule: b={b} m={m} alpha={alpha} s={s} p={modulus.p} algo={algo}")
    _print_errors(rule.errors)
    print(f"wrote {out} and {manifest_path} in {elapsed:.2f}s")
    return 0


def cmd_wce(args: argparse.Namespace) -> int:
    rule = load_rule(args.rule)
    points = rule_points(rule)
    errors = prefix_wce_products(points, rule.alpha, rule.weights)
    _print_errors(errors)
    return 0


def cmd_points(args: argparse.Namespace) -> int:
    rule = load_rule(args.rule)
    points = rule_points(rule)
    if args.format == "csv":
        if args.out == "-":
            points_to_csv(points, sys.stdout)
        else:
            with open(args.out, "w") as fh:
                points_to_csv(points, fh)
    else:
        if args.out == "-":
            write_points_bin(points, sys.stdout.buffer)
        else:
            with open(args.out, "wb") as fh:
                write_points_bin(points, fh)
    return 0


def cmd_kernel(args: argparse.Namespace) -> int:
    mod = Modulus.create(args.p, args.b)
    if not is_irreducible(args.p, args.b):
        raise ValueError(f"modulus code {args.p} is reducible over F_{args.b}")
    et = cached_exp_table(mod)
    from .pointgen import _v_all

    v = _v_all(mod, et.exp.astype(np.int64))
    K = args.K if args.K is not None else mod.n + 8

    def omega(v_num: int) -> float:
        x = DigitRational(v_num, mod.n, mod.b)
        if args.route == "digits":
            return omega_digits(x, args.alpha)
        if args.route == "closed":
            return omega_nonzero_digits(x, args.alpha)
        if args.route == "base2":
            return omega_base2(x, args.alpha)
        return omega_series_oracle(x, args.alpha, K).value

    lines = ["delta,v,omega"]
    for delta in range(mod.group_order):
        lines.append(f"{delta},{int(v[delta])},{omega(int(v[delta]))!r}")
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return 0


def cmd_bound(args: argparse.Namespace) -> int:
    weights = WeightSequence.parse(args.weights, args.s)
    n = args.alpha * args.m
    value = wce_bound(args.b, args.alpha, args.tau, args.m, n, weights, args.s)
    print(f"{value:.5e}")
    return 0


def cmd_interlace(args: argparse.Namespace) -> int:
    matrices = read_matrix_file(getattr(args, "in"))
    out = interlace(matrices, args.d)
    if args.truncate_rows is not None:
        if args.truncate_rows < 1:
            raise ValueError("--truncate-rows must be >= 1")
        out = [GenMatrix(mat.rows[: args.truncate_rows], mat.b) for mat in out]
    write_matrix_file(args.out, out)
    print(f"wrote {len(out)} matrices of shape {out[0].n} x {out[0].m} to {args.out}")
    return 0


def cmd_reproduce(args: argparse.Namespace) -> int:
    ref = REFERENCE_RULES[args.table]
    print(
        f"table {ref.key}: b={ref.b} alpha={ref.alpha} m={ref.m} n={ref.n} "
        f"p={ref.p} weights {ref.weights_spec}"
    )
    failures = 0
    checks = 0
    if args.mode in ("eval", "both"):
        print("mode eval: worst-case errors of the tabulated generating vector")
        computed = evaluate_errors(ref)
        for d, (c, t) in enumerate(zip(computed, ref.errors_3sig), start=1):
            ok = matches_three_digits(float(c), t)
            checks += 1
            failures += not ok
            print(f"  d={d:2d}  tabulated {t:.2e}  computed {c:.2e}  {'pass' if ok else 'FAIL'}")
    if args.mode in ("cbc", "both"):
        print("mode cbc: replay search with the tabulated vector as fixed prefix")
        audit = audit_construction(ref)
        rows = zip(audit["errors"], audit["constrained_min"], audit["attains_minimum"], ref.errors_3sig)
        for d, (e, emin, attains, t) in enumerate(rows, start=1):
            ok = bool(attains) and matches_three_digits(float(e), t)
            checks += 1
            failures += not ok
            print(
                f"  d={d:2d}  tabulated {t:.2e}  search-min {emin:.2e}  "
                f"attains-min {'yes' if attains else 'NO'}  {'pass' if ok else 'FAIL'}"
            )
    status = "PASS" if failures == 0 else "FAIL"
    print(f"table {ref.key}: {status} ({checks - failures}/{checks} checks)")
    return 0 if failures == 0 else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hoplr",
        description="Higher order polynomial lattice rules: construction, errors, points.",
    )
    parser.add_argument("--threads", type=int, default=1, help="FFT worker threads")
    parser.add_argument(
        "--seedless",
        action="store_true",
        help="assert that no randomness is used (always true; the core has no RNG)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="run the component-by-component search")
    c.add_argument("--b", type=int, default=2, help="prime base")
    c.add_argument("--m", type=int, help="point-count exponent, N = b^m")
    c.add_argument("--alpha", type=int, help="smoothness order, n = alpha*m")
    c.add_argument("--s", type=int, help="dimension")
    c.add_argument("--weights", default="geom:0.9", help="geom:C | polydecay | list:FILE")
    c.add_argument("--p", default="auto", help="'auto' or the modulus integer code")
    c.add_argument("--algo", choices=("naive", "fast"), default="fast")
    c.add_argument("--out", required=True, help="rule file to write")
    c.add_argument("--from-manifest", default=None, help="replay a construct manifest")
    c.set_defaults(func=cmd_construct)

    w = sub.add_parser("wce", help="recompute a rule's worst-case errors")
    w.add_argument("--rule", required=True)
    w.set_defaults(func=cmd_wce)

    pt = sub.add_parser("points", help="emit a rule's quasi-Monte Carlo points")
    pt.add_argument("--rule", required=True)
    pt.add_argument("--format", choices=("csv", "bin"), default="csv")
    pt.add_argument("--out", default="-", help="output file, '-' for stdout")
    pt.set_defaults(func=cmd_points)

    k = sub.add_parser("kernel", help="tabulate the kernel over the candidate orbit")
    k.add_argument("--p", type=int, required=True, help="modulus integer code")
    k.add_argument("--b", type=int, default=2)
    k.add_argument("--alpha", type=int, required=True)
    k.add_argument("--route", choices=("digits", "closed", "base2", "series"), default="digits")
    k.add_argument("--K", type=int, default=None, help="series truncation digits (series route)")
    k.add_argument("--out", default="-", help="CSV output file, '-' for stdout")
    k.set_defaults(func=cmd_kernel)

    bd = sub.add_parser("bound", help="error bound of the construction")
    bd.add_argument("--b", type=int, default=2)
    bd.add_argument("--alpha", type=int, required=True)
    bd.add_argument("--tau", type=float, required=True)
    bd.add_argument("--m", type=int, required=True)
    bd.add_argument("--s", type=int, required=True)
    bd.add_argument("--weights", default="geom:0.9")
    bd.set_defaults(func=cmd_bound)

    il = sub.add_parser("interlace", help="digit-interlace generating matrices")
    il.add_argument("--in", required=True, help="matrix file to read")
    il.add_argument("--d", type=int, required=True, help="interlacing factor")
    il.add_argument("--out", required=True, help="matrix file to write")
    il.add_argument("--truncate-rows", type=int, default=None)
    il.set_defaults(func=cmd_interlace)

    rp = sub.add_parser("reproduce", help="check bundled reference constructions")
    rp.add_argument("--table", required=True, choices=sorted(REFERENCE_RULES))
    rp.add_argument("--mode", choices=("eval", "cbc", "both"), default="both")
    rp.set_defaults(func=cmd_reproduce)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
