"""Command-line front end: spec parsing, dispatch, and rendering.

Exit codes: 0 success, 2 usage error, 3 hard-guarantee audit violation,
4 computation error.  Element ids everywhere are the dense ids assigned
at group construction; `info` prints the id-to-permutation table so ids
can be chosen meaningfully.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import audit, chartab, engine, groups, groupspec
from .engine import BRUTE_CAP_DEFAULT, CommParams
from .errors import CommdegError, ToleranceExceeded, UsageError
from .groups import DEFAULT_MAX_ORDER, GroupTable, SubgroupRef

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_HARD_VIOLATION = 3
EXIT_COMPUTE = 4

_ENV_MAX_ORDER = "COMMDEG_MAX_ORDER"


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _comma_list(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


def _comma_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in _comma_list(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma list of integers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commdeg",
        description="Exact commutator-value probabilities on finite groups.",
        epilog="Dn is the dihedral group of order 2n; products use infix x"
        " (e.g. S3xC2); raw groups use perm(<degree>): (cycles); ...",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, subgroups: bool = True) -> None:
        p.add_argument("-G", "--group", required=True, help="group spec")
        if subgroups:
            p.add_argument("-H", default="full", help="x-block subgroup spec")
            p.add_argument("-K", default="full", help="y-block subgroup spec")
        p.add_argument(
            "--max-order",
            type=_positive_int,
            default=None,
            help=f"construction cap (default from ${_ENV_MAX_ORDER} or"
            f" {DEFAULT_MAX_ORDER})",
        )
        p.add_argument(
            "-o",
            "--output",
            choices=("table", "json", "csv"),
            default="table",
            help="rendering format",
        )

    p_info = sub.add_parser("info", help="group census and id-to-label table")
    add_common(p_info, subgroups=False)

    p_prob = sub.add_parser("prob", help="probability that the commutator equals g")
    add_common(p_prob)
    p_prob.add_argument("-n", type=_positive_int, default=1)
    p_prob.add_argument("-m", type=_positive_int, default=1)
    p_prob.add_argument("-g", required=True, help="element id, or 'all'")
    p_prob.add_argument(
        "--method",
        choices=("auto", "brute", "class", "dist", "char"),
        default="auto",
    )
    p_prob.add_argument(
        "--predicate",
        choices=("derived", "paper"),
        default="derived",
        help="solvability test used by --method class",
    )
    p_prob.add_argument("--brute-cap", type=_positive_int, default=BRUTE_CAP_DEFAULT)
    p_prob.add_argument("--threads", type=_positive_int, default=1)
    p_prob.add_argument("--seed", type=int, default=0)

    p_profile = sub.add_parser("profile", help="probabilities for every g at once")
    add_common(p_profile)
    p_profile.add_argument("-n", type=_positive_int, default=1)
    p_profile.add_argument("-m", type=_positive_int, default=1)

    p_zeta = sub.add_parser(
        "zeta", help="solution counts with the y-block drawn from the whole group"
    )
    add_common(p_zeta, subgroups=False)
    p_zeta.add_argument("-H", default="full", help="x-block subgroup spec")
    p_zeta.add_argument("-n", type=_positive_int, default=1)
    p_zeta.add_argument("-m", type=_positive_int, default=1)
    p_zeta.add_argument("-g", default="all", help="element id, or 'all'")

    p_dist = sub.add_parser("dist", help="histogram of x-block commutator values")
    add_common(p_dist, subgroups=False)
    p_dist.add_argument("-H", default="full", help="x-block subgroup spec")
    p_dist.add_argument("-n", type=_positive_int, default=1)

    p_chartab = sub.add_parser("chartab", help="complex irreducible character table")
    add_common(p_chartab, subgroups=False)
    p_chartab.add_argument("--seed", type=int, default=0)

    p_audit = sub.add_parser("audit", help="claim battery over named groups")
    p_audit.add_argument("--battery", choices=("default",), default=None)
    p_audit.add_argument("--groups", type=_comma_list, default=None)
    p_audit.add_argument("--claims", type=_comma_list, default=None)
    p_audit.add_argument("--n-values", type=_comma_ints, default=None)
    p_audit.add_argument("--m-values", type=_comma_ints, default=None)
    p_audit.add_argument("--g-policy", choices=("support", "all"), default=None)
    p_audit.add_argument("--pair-policy", choices=("classes", "all"), default=None)
    p_audit.add_argument("--subgroup-policy", choices=("all", "named"), default=None)
    p_audit.add_argument("--enum-cap", type=_positive_int, default=None)
    p_audit.add_argument("--seed", type=int, default=None)
    p_audit.add_argument("--max-order", type=_positive_int, default=None)
    p_audit.add_argument("--config", default=None, help="JSON file mirroring the flags")
    p_audit.add_argument("--out", default=None, help="write the report to a file")
    p_audit.add_argument(
        "--timings", action="store_true", help="include per-finding runtimes"
    )
    p_audit.add_argument(
        "-o", "--output", choices=("table", "json", "csv"), default="json"
    )
    return parser


def _resolve_max_order(args: argparse.Namespace) -> int:
    if getattr(args, "max_order", None) is not None:
        return args.max_order
    raw = os.environ.get(_ENV_MAX_ORDER)
    if raw is None:
        return DEFAULT_MAX_ORDER
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"${_ENV_MAX_ORDER} must be an integer, got {raw!r}")
    if value < 1:
        raise UsageError(f"${_ENV_MAX_ORDER} must be >= 1")
    return value


def _resolve_group(args: argparse.Namespace) -> GroupTable:
    return groupspec.parse_group_spec(args.group, max_order=_resolve_max_order(args))


def _resolve_g(G: GroupTable, text: str, flag: str = "-g") -> int:
    try:
        g = int(text)
    except ValueError:
        raise UsageError(f"{flag} must be an element id or 'all', got {text!r}")
    if not 0 <= g < G.order:
        raise UsageError(f"{flag} id {g} out of range for group of order {G.order}")
    return g


def _frac(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _fmt_complex(z: complex, digits: int = 6) -> str:
    re = round(z.real, digits) + 0.0
    im = round(z.imag, digits) + 0.0
    if im == 0.0:
        return f"{re:g}"
    if re == 0.0:
        return f"{im:g}i"
    return f"{re:g}{im:+g}i"


def _emit_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _cmd_info(args: argparse.Namespace) -> int:
    G = _resolve_group(args)
    info = engine.conjugacy_info(groups.full_subgroup(G))
    z = groups.center(G)
    elements = [
        {
            "id": i,
            "label": G.label(i),
            "order": G.element_order(i),
            "class": int(info.class_of[i]),
        }
        for i in range(G.order)
    ]
    if args.output == "json":
        print(
            json.dumps(
                {
                    "group": G.name,
                    "order": G.order,
                    "is_abelian": G.is_abelian,
                    "class_count": len(info.classes),
                    "center_order": z.order,
                    "elements": elements,
                },
                indent=1,
                sort_keys=True,
            )
        )
    elif args.output == "csv":
        rows = [[e["id"], e["label"], e["order"], e["class"]] for e in elements]
        print(_emit_csv(("id", "label", "order", "class"), rows))
    else:
        print(f"group {G.name}: order {G.order}")
        print(
            f"abelian {G.is_abelian}, classes {len(info.classes)},"
            f" center order {z.order}"
        )
        width = max(len(e["label"]) for e in elements)
        print(f"{'id':>4} {'label':<{width}} {'order':>5} class")
        for e in elements:
            print(f"{e['id']:>4} {e['label']:<{width}} {e['order']:>5} {e['class']:>5}")
    return EXIT_OK


def _prob_json(p: engine.ExactProb, cross_checks: list[engine.ExactProb]) -> dict:
    payload = engine.prob_to_json(p)
    if cross_checks:
        payload["cross_checks"] = [engine.prob_to_json(q) for q in cross_checks]
    return payload


def _cmd_prob(args: argparse.Namespace) -> int:
    G = _resolve_group(args)
    H = groupspec.parse_subgroup_spec(G, args.H)
    K = groupspec.parse_subgroup_spec(G, args.K)
    if args.g == "all":
        return _render_profile(args, G, H, K)
    g = _resolve_g(G, args.g)
    params = CommParams(H, K, args.n, args.m, g)

    if args.method == "char":
        return _cmd_prob_char(args, G, H, K, g)

    results: list[engine.ExactProb] = []
    cross: list[engine.ExactProb] = []
    if args.method == "dist":
        results.append(engine.prob_fast(params))
    elif args.method == "brute":
        results.append(
            engine.prob_brute(params, cap=args.brute_cap, threads=args.threads)
        )
    elif args.method == "class":
        results.append(engine.prob_class_formula(params, predicate=args.predicate))
    else:
        fast = engine.prob_fast(params)
        results.append(fast)
        if params.space_size <= args.brute_cap:
            check = engine.prob_brute(params, cap=args.brute_cap, threads=args.threads)
            cross.append(check)
            if check.value != fast.value:
                raise ToleranceExceeded(
                    f"cross-check failed: distribution {_frac(fast.value)}"
                    f" != brute {_frac(check.value)}"
                )

    if args.output == "json":
        print(json.dumps(_prob_json(results[0], cross), indent=1, sort_keys=True))
    elif args.output == "csv":
        rows = [
            [p.method, p.numerator, p.denominator, float(p)]
            for p in results + cross
        ]
        print(_emit_csv(("method", "num", "den", "float"), rows))
    else:
        print(
            f"group {G.name}, |H|={H.order}, |K|={K.order},"
            f" n={args.n}, m={args.m}, g={g} [{G.label(g)}]"
        )
        for p in results + cross:
            print(f"{p.method:>14}: {_frac(p.value)} = {float(p):.6f}")
    return EXIT_OK


def _cmd_prob_char(
    args: argparse.Namespace, G: GroupTable, H: SubgroupRef, K: SubgroupRef, g: int
) -> int:
    if args.n != 1 or args.m != 1:
        raise UsageError("--method char requires -n 1 -m 1")
    if not K.is_full:
        raise UsageError("--method char requires -K full")
    table = chartab.character_table(G, seed=args.seed)
    if H.is_full:
        value = chartab.prob_char_pg(G, table, g)
        method = "char_pg"
    elif groups.is_normal(G, H):
        value = chartab.prob_char_relative(G, table, H, g)
        method = "char_relative"
    else:
        raise UsageError("--method char requires -H full or a normal subgroup for -H")
    if args.output == "json":
        payload = {
            "group": G.name,
            "H": list(H.members),
            "K": list(K.members),
            "n": 1,
            "m": 1,
            "g": g,
            "method": method,
            "value": {"float": value},
        }
        print(json.dumps(payload, indent=1, sort_keys=True))
    elif args.output == "csv":
        print(_emit_csv(("method", "float"), [[method, value]]))
    else:
        print(
            f"group {G.name}, |H|={H.order}, |K|={K.order}, n=1, m=1,"
            f" g={g} [{G.label(g)}]"
        )
        print(f"{method:>14}: {value:.12f}")
    return EXIT_OK


def _render_profile(
    args: argparse.Namespace, G: GroupTable, H: SubgroupRef, K: SubgroupRef
) -> int:
    profile = engine.prob_profile(H, K, args.n, args.m)
    if args.output == "json":
        payload = {
            "group": G.name,
            "H": list(H.members),
            "K": list(K.members),
            "n": args.n,
            "m": args.m,
            "method": "distribution",
            "values": {
                str(g): {"num": str(p.numerator), "den": str(p.denominator)}
                for g, p in profile.items()
            },
        }
        print(json.dumps(payload, indent=1, sort_keys=True))
    elif args.output == "csv":
        rows = [
            [g, G.label(g), p.numerator, p.denominator]
            for g, p in profile.items()
        ]
        print(_emit_csv(("g", "label", "num", "den"), rows))
    else:
        print(f"group {G.name}, |H|={H.order}, |K|={K.order}, n={args.n}, m={args.m}")
        width = max(len(G.label(g)) for g in profile)
        for g, p in profile.items():
            print(f"{g:>4} {G.label(g):<{width}} {_frac(p.value)}")
    return EXIT_OK


def _cmd_profile(args: argparse.Namespace) -> int:
    G = _resolve_group(args)
    H = groupspec.parse_subgroup_spec(G, args.H)
    K = groupspec.parse_subgroup_spec(G, args.K)
    return _render_profile(args, G, H, K)


def _cmd_zeta(args: argparse.Namespace) -> int:
    G = _resolve_group(args)
    H = groupspec.parse_subgroup_spec(G, args.H)
    counts = engine.final_counts(
        H, groups.full_subgroup(G), args.n, args.m
    )
    if args.g != "all":
        g = _resolve_g(G, args.g)
        selected = {g: counts[g]}
    else:
        selected = dict(enumerate(counts))
    if args.output == "json":
        payload = {
            "group": G.name,
            "H": list(H.members),
            "n": args.n,
            "m": args.m,
            "counts": {str(g): c for g, c in selected.items()},
        }
        print(json.dumps(payload, indent=1, sort_keys=True))
    elif args.output == "csv":
        rows = [[g, G.label(g), c] for g, c in selected.items()]
        print(_emit_csv(("g", "label", "count"), rows))
    else:
        print(f"group {G.name}, |H|={H.order}, n={args.n}, m={args.m}")
        for g, c in selected.items():
            print(f"{g:>4} {G.label(g):<12} {c}")
    return EXIT_OK


def _cmd_dist(args: argparse.Namespace) -> int:
    G = _resolve_group(args)
    H = groupspec.parse_subgroup_spec(G, args.H)
    dist = engine.comm_distribution(H, args.n)
    if args.output == "json":
        payload = {
            "group": G.name,
            "H": list(H.members),
            "n": args.n,
            "total": dist.total,
            "counts": list(dist.counts),
        }
        print(json.dumps(payload, indent=1, sort_keys=True))
    elif args.output == "csv":
        print(engine.distribution_csv(dist))
    else:
        print(f"group {G.name}, |H|={H.order}, n={args.n}, total {dist.total}")
        for g, c in enumerate(dist.counts):
            if c:
                print(f"{g:>4} {G.label(g):<12} {c}")
    return EXIT_OK


def _cmd_chartab(args: argparse.Namespace) -> int:
    G = _resolve_group(args)
    table = chartab.character_table(G, seed=args.seed)
    if args.output == "json":
        print(json.dumps(chartab.table_to_json(table), indent=1, sort_keys=True))
    elif args.output == "csv":
        header = ["degree"] + [f"c{j}" for j in range(table.n_classes)]
        rows = [
            [table.degrees[i]] + [_fmt_complex(v) for v in table.values[i]]
            for i in range(table.n_classes)
        ]
        print(_emit_csv(header, rows))
    else:
        print(f"group {G.name}: {table.n_classes} classes")
        reps = [G.label(r) for r in table.class_reps]
        width = max(8, max(len(r) for r in reps) + 1)
        print(" " * 6 + "".join(f"{r:>{width}}" for r in reps))
        print(" " * 6 + "".join(f"{s:>{width}}" for s in table.class_sizes))
        for i in range(table.n_classes):
            cells = "".join(
                f"{_fmt_complex(v):>{width}}" for v in table.values[i]
            )
            print(f"chi{i:<2} ({table.degrees[i]})".ljust(6)[:6] + cells)
    return EXIT_OK


_AUDIT_CONFIG_FLAGS = (
    "battery",
    "groups",
    "claims",
    "n_values",
    "m_values",
    "g_policy",
    "pair_policy",
    "subgroup_policy",
    "enum_cap",
    "seed",
    "max_order",
)


def _audit_config(args: argparse.Namespace) -> audit.AuditConfig:
    if args.config is not None:
        given = [f for f in _AUDIT_CONFIG_FLAGS if getattr(args, f) is not None]
        if given:
            flags = ", ".join("--" + f.replace("_", "-") for f in given)
            raise UsageError(f"--config is exclusive with {flags}")
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
        except OSError as exc:
            raise UsageError(f"--config: cannot read {args.config!r}: {exc}")
        except json.JSONDecodeError as exc:
            raise UsageError(f"--config: invalid JSON in {args.config!r}: {exc}")
        return audit.config_from_json(payload)
    base = audit.default_config()
    if args.claims is not None:
        unknown = [c for c in args.claims if c not in audit.CLAIMS]
        if unknown:
            raise UsageError(f"--claims: unknown claim tags {unknown}")
    config = audit.AuditConfig(
        groups=args.groups if args.groups is not None else base.groups,
        claims=args.claims if args.claims is not None else base.claims,
        n_values=args.n_values if args.n_values is not None else base.n_values,
        m_values=args.m_values if args.m_values is not None else base.m_values,
        g_policy=args.g_policy or base.g_policy,
        pair_policy=args.pair_policy or base.pair_policy,
        subgroup_policy=args.subgroup_policy or base.subgroup_policy,
        seed=args.seed if args.seed is not None else base.seed,
        max_order=args.max_order if args.max_order is not None else base.max_order,
        subgroup_enum_cap=(
            args.enum_cap if args.enum_cap is not None else base.subgroup_enum_cap
        ),
    )
    config.validate()
    return config


def _cmd_audit(args: argparse.Namespace) -> int:
    config = _audit_config(args)
    report = audit.run_battery(config)
    if args.output == "csv":
        rows = [
            [
                f.claim,
                f.verdict,
                json.dumps(f.instance, sort_keys=True),
                json.dumps(f.witness, sort_keys=True),
            ]
            + ([round(f.runtime_ms, 3)] if args.timings else [])
            for f in report.findings
        ]
        header = ["claim", "verdict", "instance", "witness"] + (
            ["runtime_ms"] if args.timings else []
        )
        text = _emit_csv(header, rows)
    elif args.output == "table":
        lines = [f"{'claim':<12} holds violated vacuous precondition_failed"]
        for claim in sorted(report.summary):
            counts = report.summary[claim]
            lines.append(
                f"{claim:<12} {counts.get(audit.HOLDS, 0):>5}"
                f" {counts.get(audit.VIOLATED, 0):>8}"
                f" {counts.get(audit.VACUOUS, 0):>7}"
                f" {counts.get(audit.PRECONDITION_FAILED, 0):>19}"
            )
        hard = report.hard_violations()
        lines.append(f"findings: {len(report.findings)}, hard violations: {len(hard)}")
        text = "\n".join(lines)
    else:
        text = report.dumps(include_runtime=args.timings)
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_HARD_VIOLATION if report.hard_violations() else EXIT_OK


_HANDLERS = {
    "info": _cmd_info,
    "prob": _cmd_prob,
    "profile": _cmd_profile,
    "zeta": _cmd_zeta,
    "dist": _cmd_dist,
    "chartab": _cmd_chartab,
    "audit": _cmd_audit,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CommdegError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
