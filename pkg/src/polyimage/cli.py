"""Command line front end: ``polyimage classify|enumerate|lemmas|counterexamples``.

Exit status: 0 when every check is consistent, 1 for usage, input or budget
errors, 2 when a theorem-level check fails (oracle disagreement, a lemma or
certificate failing, a counterexample target attained).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .classifier import (
    OracleDisagreement,
    UnsupportedStructure,
    classify,
    identity_certificates,
    lemma_suite,
    verify_identity,
)
from .coeffs import GF
from .counterexamples import ut3_trivial_case, utn_zn_case
from .image import BudgetExceeded, analyze, budget_from_env, enumerate_image, sample_image
from .starpoly import PolySyntaxError, parse_problem
from .triangular import InvalidStructure, require_valid

EXIT_OK, EXIT_USAGE, EXIT_DISAGREE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _primes(text: str) -> list:
    out = _int_list(text)
    for p in out:
        try:
            GF(p)
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e)) from None
    return out


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyimage", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--out", type=Path, help="write the report here instead of stdout")
    common.add_argument("--budget", type=_positive, help="evaluation-step budget (env POLYIMAGE_BUDGET)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--timing", action="store_true", help="include wall-clock timings in reports")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="symbolic classification with finite-field checks")
    c.add_argument("--file", type=Path, required=True)
    c.add_argument("--primes", type=_primes, default=[3, 5, 7])

    e = sub.add_parser("enumerate", parents=[common], help="exhaustive image over prime fields")
    e.add_argument("--file", type=Path, required=True)
    e.add_argument("--primes", type=_primes, help="default: the file's field, or 3,5,7 over Q")
    e.add_argument("--samples", type=int, default=0, help="also sample this many values over Q")

    lm = sub.add_parser("lemmas", parents=[common], help="entry-formula lemmas and identity certificates")
    lm.add_argument("--max-size", type=_positive, default=8)

    ce = sub.add_parser("counterexamples", parents=[common], help="non-subspace images")
    ce.add_argument("--n-trivial", type=_int_list, default=[3, 4, 5])
    ce.add_argument("--n-zn", type=_int_list, default=[4, 5, 6])
    ce.add_argument("--primes", type=_primes, default=[3, 5])
    return ap


def _load(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from None
    try:
        prob = parse_problem(text)
        require_valid(prob.structure)
    except PolySyntaxError as e:
        raise UsageError(f"{path}: {e}") from None
    except (InvalidStructure, ValueError) as e:
        raise UsageError(f"{path}: invalid structure: {e}") from None
    return prob


def run_classify(args) -> tuple[int, object]:
    prob = _load(args.file)
    rep = classify(prob.poly, prob.structure, args.primes, args.budget)
    return EXIT_OK, rep


def run_enumerate(args) -> tuple[int, list]:
    prob = _load(args.file)
    s, f = prob.structure, prob.poly
    primes = args.primes or ([s.field.p] if s.field.p else [3, 5, 7])
    reports = []
    for p in primes:
        try:
            img = enumerate_image(f, s, p, args.budget)
        except ZeroDivisionError:
            raise UsageError(f"a coefficient denominator vanishes mod {p}") from None
        reports.append(analyze(img))
    if args.samples and not s.field.p:
        reports.append(analyze(sample_image(f, s, args.samples, args.seed)))
    return EXIT_OK, reports


def run_lemmas(args) -> tuple[int, dict]:
    suite = lemma_suite(args.max_size)
    idents = []
    for label, s, f, expected in identity_certificates():
        got = verify_identity(f, s)
        idents.append({"label": label, "polynomial": f.to_text(), "identity": got, "expected": expected,
                       "passed": got == expected})
    ok = all(all(v.values()) for v in suite.values()) and all(i["passed"] for i in idents)
    report = {"lemmas": {k: {str(n): v for n, v in d.items()} for k, d in suite.items()},
              "identities": idents, "ok": ok}
    return (EXIT_OK if ok else EXIT_DISAGREE), report


def run_counterexamples(args) -> tuple[int, list]:
    reports = []
    for n in args.n_trivial:
        for p in args.primes:
            reports.append(ut3_trivial_case(n, p, args.budget))
    for n in args.n_zn:
        for p in args.primes:
            reports.append(utn_zn_case(n, p, args.budget))
    ok = all(r.ok for r in reports)
    return (EXIT_OK if ok else EXIT_DISAGREE), reports


def _render(result, fmt: str, timing: bool) -> str:
    items = result if isinstance(result, list) else [result]
    if fmt == "json":
        def js(x):
            if isinstance(x, dict):
                return x
            try:
                return x.to_json(timing=timing)
            except TypeError:
                return x.to_json()
        payload = [js(x) for x in items]
        return json.dumps(payload if isinstance(result, list) else payload[0], indent=2, sort_keys=True,
                          ensure_ascii=False) + "\n"
    chunks = []
    for x in items:
        if isinstance(x, dict):
            chunks.append(_dict_text(x))
        else:
            chunks.append(x.to_text())
    return "\n\n".join(chunks) + "\n"


def _dict_text(d: dict) -> str:
    lines = []
    for name, sizes in d.get("lemmas", {}).items():
        bad = [k for k, v in sizes.items() if not v]
        lines.append(f"{name} lemma, sizes 1..{len(sizes)}: {'all pass' if not bad else 'FAIL at ' + ','.join(bad)}")
    for i in d.get("identities", []):
        lines.append(f"{i['label']}: {'ok' if i['passed'] else 'FAIL'}")
    lines.append("PASS" if d.get("ok") else "FAIL")
    return "\n".join(lines)


COMMANDS = {
    "classify": run_classify,
    "enumerate": run_enumerate,
    "lemmas": run_lemmas,
    "counterexamples": run_counterexamples,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        if args.budget is None:
            args.budget = budget_from_env()
        code, result = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"polyimage: {e}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedStructure as e:
        print(f"polyimage: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print(f"polyimage: budget exceeded: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OracleDisagreement as e:
        print(f"polyimage: disagreement: {e}", file=sys.stderr)
        return EXIT_DISAGREE
    except ValueError as e:
        print(f"polyimage: {e}", file=sys.stderr)
        return EXIT_USAGE
    text = _render(result, args.format, args.timing)
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
