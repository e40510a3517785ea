"""``qmaj`` command line.

Exit codes: 0 success, 1 verification failed, 2 malformed input,
3 enumeration guard (or coefficient range) exceeded, 4 precondition such as
standardness violated.  In ``--json`` mode stdout carries exactly one JSON
document (or JSON lines for ``enumerate``); diagnostics and progress go to
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Any, Sequence

from . import bijections as bij
from . import combinat, qpoly, verify
from .errors import MalformedInputError, QmajError

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_MALFORMED = 2


@dataclass(frozen=True)
class CliConfig:
    output_mode: str = "pretty"
    max_n_guard: int = combinat.DEFAULT_GUARD
    seed: int = verify.DEFAULT_SEED
    threads: int = 1
    timing: bool = True

    def __post_init__(self):
        if self.max_n_guard < 0:
            raise MalformedInputError("--max-n must be >= 0")

    @property
    def json(self) -> bool:
        return self.output_mode == "json"


def _emit(obj: Any) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def _progress(line: str) -> None:
    print(line, file=sys.stderr, flush=True)


# -- stat ---------------------------------------------------------------------


def cmd_stat(cfg: CliConfig, text: str) -> int:
    p = combinat.as_permutation(combinat.parse_int_sequence(text))
    record = {
        "permutation": list(p),
        "descents": sorted(combinat.descent_set(p)),
        "maj": combinat.major_index(p),
        "fixed_points": list(combinat.fixed_points(p)),
        "derangement_points": list(combinat.derangement_points(p)),
        "dp": list(combinat.dp_reduce(p)),
    }
    if cfg.json:
        _emit(record)
    else:
        fmt = combinat.format_sequence
        print(f"permutation         {fmt(p)}")
        print("descents            {" + ",".join(map(str, record["descents"])) + "}")
        print(f"maj                 {record['maj']}")
        print(f"fixed points        {fmt(record['fixed_points'])}")
        print(f"derangement points  {fmt(record['derangement_points'])}")
        print(f"dp                  {fmt(record['dp'])}")
    return EXIT_OK


# -- qpoly --------------------------------------------------------------------


def cmd_qpoly(cfg: CliConfig, kind: str, args: Sequence[int], method: str | None) -> int:
    arity = {"qint": 1, "qfact": 1, "qbinom": 2, "qderange": 1}[kind]
    if len(args) != arity:
        raise MalformedInputError(f"{kind} takes {arity} integer argument(s), got {len(args)}")
    if method is not None and kind != "qderange":
        raise MalformedInputError("--method only applies to qderange")
    if kind == "qint":
        p = qpoly.q_int(args[0])
    elif kind == "qfact":
        p = qpoly.q_factorial(args[0])
    elif kind == "qbinom":
        p = qpoly.q_binomial(args[0], args[1])
    else:
        method = method or "formula"
        if method == "formula":
            p = qpoly.q_derangement_formula(args[0])
        elif method == "recurrence":
            p = qpoly.q_derangement_recurrence(args[0])
        else:
            p = qpoly.q_derangement_bruteforce(args[0], guard=cfg.max_n_guard)
    if cfg.json:
        _emit(list(p.coeffs))
    else:
        print(qpoly.format_poly(p))
    return EXIT_OK


# -- bij ----------------------------------------------------------------------


def _load_payload(text: str) -> Any:
    s = text.strip()
    if s.startswith("("):
        return list(combinat.parse_int_sequence(s))
    try:
        return json.loads(s)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"payload is not valid JSON: {exc}") from None


def _field(payload: Any, name: str) -> tuple[int, ...]:
    if not isinstance(payload, dict) or name not in payload:
        raise MalformedInputError(f"payload is missing field {name!r}")
    value = payload[name]
    if isinstance(value, str):
        return combinat.parse_int_sequence(value)
    if not isinstance(value, list) or not all(
        isinstance(x, int) and not isinstance(x, bool) for x in value
    ):
        raise MalformedInputError(f"field {name!r} must be an array of integers")
    return tuple(value)


def cmd_bijection(cfg: CliConfig, kind: str, payload_text: str) -> int:
    payload = _load_payload(payload_text)
    pretty: list[str] = []
    if kind == "psi":
        lam, pi = _field(payload, "lambda"), _field(payload, "pi")
        inp = {"lambda": list(lam), "pi": list(pi)}
        lp = bij.psi(lam, pi)
        out = lp.to_dict()
        pretty = [bij.render_two_row(lam, pi), "  psi |->", lp.render()]
    elif kind == "psi-inv":
        lp = bij.LabeledPartition(_field(payload, "mu"), _field(payload, "pi"))
        inp = lp.to_dict()
        lam = bij.psi_inv(lp)
        out = {"lambda": list(lam)}
        pretty = [lp.render(), "  psi^-1 |->", bij.render_two_row(lam, lp.pi)]
    elif kind == "sort-columns":
        if isinstance(payload, dict):
            a = _field(payload, "a")
        elif isinstance(payload, list) and all(
            isinstance(x, int) and not isinstance(x, bool) for x in payload
        ):
            a = tuple(payload)
        else:
            raise MalformedInputError('sort-columns expects an integer array or {"a": [...]}')
        inp = {"a": list(a)}
        lp = bij.sort_columns(a)
        out = lp.to_dict()
        pretty = [bij.render_two_row(a, range(1, len(a) + 1)), "  sort |->", lp.render()]
    elif kind == "decompose":
        lp = bij.LabeledPartition(_field(payload, "mu"), _field(payload, "pi"))
        inp = lp.to_dict()
        dec = bij.phi_decompose(lp)
        out = dec.to_dict()
        alpha = bij.psi_inv(bij.LabeledPartition(dec.beta, dec.sigma))
        pretty = [
            lp.render(),
            "  phi |->  (beta over sigma), gamma",
            bij.render_two_row(dec.beta, dec.sigma),
            f"gamma = {combinat.format_sequence(dec.gamma)}",
            f"alpha = psi^-1(beta, sigma) = {combinat.format_sequence(alpha)}",
        ]
    elif kind == "insert":
        beta, sigma, gamma = (_field(payload, k) for k in ("beta", "sigma", "gamma"))
        inp = {"beta": list(beta), "sigma": list(sigma), "gamma": list(gamma)}
        trace = bij.InsertionTrace()
        lp = bij.phi_insert(beta, sigma, gamma, trace=trace)
        out = lp.to_dict()
        pretty = [bij.render_two_row(beta, sigma)]
        for step in trace.steps:
            pretty += [f"  insert {step.part} (run {step.r}..{step.t}, s={step.s}) |->",
                       bij.render_two_row(step.mu, step.pi)]
    else:  # pragma: no cover - argparse restricts choices
        raise MalformedInputError(f"unknown bijection {kind!r}")
    if cfg.json:
        _emit({"kind": kind, "input": inp, "output": out})
    else:
        print("\n".join(pretty))
    return EXIT_OK


# -- verify -------------------------------------------------------------------

_ROUNDTRIP_INDEX = {"roundtrip-psi": 0, "roundtrip-phi": 1, "weight-eq6": 2}


def _require(value: int | None, flag: str) -> int:
    if value is None:
        raise MalformedInputError(f"{flag} is required")
    return value


def cmd_verify(
    cfg: CliConfig,
    identity: str,
    n: int | None,
    m_max: int | None = None,
    trials: int = verify.DEFAULT_TRIALS,
) -> int:
    n = _require(n, "--n")
    guard = cfg.max_n_guard
    par = {"threads": cfg.threads, "guard": guard, "progress": _progress}
    if identity == "eq1":
        reports = [verify.verify_eq1(n, **par)]
    elif identity == "eq2":
        reports = [verify.verify_eq2(n, _require(m_max, "--m-max"), guard=guard)]
    elif identity == "eq3":
        reports = [verify.verify_eq3(n, guard=guard)]
    elif identity == "thm1":
        reports = [verify.verify_thm1(n, **par)]
    elif identity == "eq5":
        reports = [verify.verify_eq5(n, guard=guard)]
    else:
        reports = verify.verify_roundtrips(n, trials, cfg.seed, **par)
        if identity in _ROUNDTRIP_INDEX:
            reports = [reports[_ROUNDTRIP_INDEX[identity]]]
    passed = all(r.passed for r in reports)
    if cfg.json:
        docs = [r.to_dict(timing=cfg.timing) for r in reports]
        _emit(docs[0] if len(docs) == 1 else docs)
    else:
        for r in reports:
            params = " ".join(f"{k}={v}" for k, v in r.params.items())
            status = "PASS" if r.passed else "FAIL"
            timing = f" ({r.elapsed_ms} ms)" if cfg.timing else ""
            print(f"{r.identity.value} {params}: {status}{timing}")
            if r.witness is not None:
                print("  witness: " + json.dumps(r.witness))
    return EXIT_OK if passed else EXIT_FAILED


# -- enumerate ----------------------------------------------------------------


def cmd_enumerate(cfg: CliConfig, what: str, n: int, m: int | None) -> int:
    if what == "perms":
        stream = combinat.iter_permutations(n, guard=cfg.max_n_guard)
    elif what == "derangements":
        stream = combinat.iter_derangements(n, guard=cfg.max_n_guard)
    else:
        combinat.check_guard(n, cfg.max_n_guard)
        stream = combinat.iter_partitions_with_sum(n, _require(m, "--m"))
    for item in stream:
        if cfg.json:
            sys.stdout.write(json.dumps(list(item)) + "\n")
        else:
            sys.stdout.write(combinat.format_sequence(item) + "\n")
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------


def _common_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--json", action="store_true", default=d(False),
                        help="machine-readable output")
    parser.add_argument("--seed", type=int, default=d(verify.DEFAULT_SEED))
    parser.add_argument("--max-n", type=int, default=d(None),
                        help="enumeration guard (default $QMAJ_MAX_N or 12)")
    parser.add_argument("--threads", type=int, default=d(None),
                        help="worker processes for enumeration (default: CPU count)")
    parser.add_argument("--no-timing", action="store_true", default=d(False),
                        help="report elapsed_ms as null, for byte-stable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmaj", description="Major index, labeled partitions and q-derangement numbers."
    )
    _common_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _common_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stat", parents=[common], help="statistics of a permutation")
    p.add_argument("perm", help="e.g. (5,2,1,4,7,3,6) or [5,2,1,4,7,3,6]")

    p = sub.add_parser("qpoly", parents=[common], help="q-analogs")
    p.add_argument("kind", choices=["qint", "qfact", "qbinom", "qderange"])
    p.add_argument("args", type=int, nargs="+")
    p.add_argument("--method", choices=["formula", "recurrence", "bruteforce"])

    p = sub.add_parser("bij", parents=[common], help="apply a bijection to a JSON payload")
    p.add_argument("kind", choices=["psi", "psi-inv", "sort-columns", "decompose", "insert"])
    p.add_argument("payload")

    p = sub.add_parser("verify", parents=[common], help="run an exhaustive identity check")
    p.add_argument(
        "identity",
        choices=["eq1", "eq2", "eq3", "thm1", "eq5", "roundtrips",
                 "roundtrip-psi", "roundtrip-phi", "weight-eq6"],
    )
    p.add_argument("--n", type=int)
    p.add_argument("--m-max", type=int)
    p.add_argument("--trials", type=int, default=verify.DEFAULT_TRIALS)

    p = sub.add_parser("enumerate", parents=[common], help="stream S_n, D_n or partitions")
    p.add_argument("what", choices=["perms", "derangements", "partitions"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, help="total, for partitions")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = CliConfig(
            output_mode="json" if args.json else "pretty",
            max_n_guard=combinat.resolve_guard(args.max_n),
            seed=args.seed,
            threads=args.threads if args.threads is not None else verify.default_threads(),
            timing=not args.no_timing,
        )
        if cfg.threads < 1:
            raise MalformedInputError("--threads must be >= 1")
        if args.command == "stat":
            return cmd_stat(cfg, args.perm)
        if args.command == "qpoly":
            return cmd_qpoly(cfg, args.kind, args.args, args.method)
        if args.command == "bij":
            return cmd_bijection(cfg, args.kind, args.payload)
        if args.command == "verify":
            return cmd_verify(cfg, args.identity, args.n, args.m_max, args.trials)
        return cmd_enumerate(cfg, args.what, args.n, args.m)
    except QmajError as exc:
        print(f"qmaj: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
