"""``zstar`` command line: evaluation, expansion, limits, order, encodings,
dimension constants and integral checks.

Every command produces one record ``{"op", "args", "value", "radius",
"status", "seed"}`` (plus an optional ``detail`` mapping); ``--json`` prints
it as JSON, otherwise a short text form is shown.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import shlex
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

from . import fractal, integrals, order
from .core import (
    DivergentCompositionError,
    Enclosure,
    NotInTError,
    PrecisionExhaustedError,
    parse_composition,
    parse_indices,
    parse_seqspec,
    validate_in_T,
)
from .eta import beta_decode, beta_fraction, eta, expand
from .series import zeta_star

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DOMAIN = 3

DEFAULT_CLI_DIGITS = 30
CACHED_OPS = {"eval", "expand", "limit", "dims", "beta", "integral"}


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Cache
# ---------------------------------------------------------------------------


def cache_dir(enabled: bool | None) -> Path | None:
    """Cache directory: ``$ZSTAR_CACHE`` when set, ``~/.cache/zstar`` with
    ``--cache``; disabled with ``--no-cache`` or when neither applies."""
    if enabled is False:
        return None
    env = os.environ.get("ZSTAR_CACHE")
    if env:
        return Path(env)
    if enabled:
        return Path.home() / ".cache" / "zstar"
    return None


def cache_key(op: str, args: dict, digits: int) -> str:
    canon = json.dumps(args, sort_keys=True, separators=(",", ":"))
    return f"{op}|{canon}|{digits}"


def _cache_file(directory: Path, key: str) -> Path:
    slug = re.sub(r"[^A-Za-z0-9._-]+", "_", key)[:120]
    digest = hashlib.sha256(key.encode()).hexdigest()[:16]
    return directory / f"{slug}-{digest}.json"


def cache_get(directory: Path, key: str) -> dict | None:
    path = _cache_file(directory, key)
    try:
        entry = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    if entry.get("key") != key:
        return None
    return entry["record"]


def cache_put(directory: Path, key: str, record: dict) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    entry = {"key": key, "record": record, "created_at": time.time()}
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(entry, fh)
        os.replace(tmp, _cache_file(directory, key))
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _record(op, args, value, radius=None, status="ok", seed=None, **detail):
    rec = {"op": op, "args": args, "value": value, "radius": radius, "status": status, "seed": seed}
    if detail:
        rec["detail"] = detail
    return rec


def _enc(e: Enclosure, digits: int) -> tuple[str, str]:
    return e.to_decimal(digits), e.radius_str()


def _work(digits: int) -> int:
    return digits + 10


def cmd_eval(ns):
    comp = parse_composition(ns.comp)
    v, r = _enc(zeta_star(comp, _work(ns.digits)), ns.digits)
    return _record("eval", {"comp": str(comp)}, v, r, weight=comp.weight, depth=comp.depth)


def _parse_real(text: str) -> Enclosure:
    try:
        return Enclosure.exact(Fraction(text.strip()), 1200)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a decimal number: {text!r}") from None


def cmd_expand(ns):
    x = _parse_real(ns.x)
    if not x.definitely_greater(1):
        raise UsageError("x must exceed 1")
    stream = expand(x, ns.depth, _work(ns.digits))
    detail = {}
    if stream.bracket is not None:
        b = stream.bracket
        detail["bracket"] = [
            b.lower.to_decimal(ns.digits),
            b.upper.to_decimal(ns.digits) if b.upper is not None else None,
        ]
    if stream.composition is not None:
        detail["composition"] = str(stream.composition)
    if stream.position is not None:
        detail["position"] = stream.position
    return _record(
        "expand", {"x": ns.x, "depth": ns.depth}, list(stream.digits), None, str(stream.status), **detail
    )


def cmd_limit(ns):
    spec = parse_seqspec(ns.seq)
    e = eta(spec, ns.tol, _work(ns.digits))
    v, r = _enc(e, ns.digits)
    return _record("limit", {"seq": str(spec), "tol": ns.tol}, v, r)


def cmd_compare(ns):
    if ";" in ns.a or ";" in ns.b:
        a, b = parse_seqspec(ns.a), parse_seqspec(ns.b)
        for s in (a, b):
            if not validate_in_T(s):
                raise NotInTError(f"sequence {s} is not admissible")
        verdict = order.compare_seq(a, b)
    else:
        a, b = parse_composition(ns.a), parse_composition(ns.b)
        verdict = order.compare(a, b)
    return _record("compare", {"a": str(a), "b": str(b)}, str(verdict))


def cmd_beta(ns):
    if (ns.seq is None) == (ns.y is None):
        raise UsageError("beta needs exactly one of --seq or --y")
    if ns.seq is not None:
        spec = parse_seqspec(ns.seq)
        if not validate_in_T(spec):
            raise NotInTError(f"sequence {spec} is not admissible")
        frac = beta_fraction(spec)
        v, r = _enc(Enclosure.exact(frac, _work(ns.digits)), ns.digits)
        return _record("beta", {"seq": str(spec)}, v, r, fraction=str(frac))
    try:
        y = Fraction(ns.y.strip())
    except ValueError:
        raise UsageError(f"not a number: {ns.y!r}") from None
    stream = beta_decode(y, ns.depth)
    return _record("beta", {"y": ns.y, "depth": ns.depth}, list(stream.digits), None, str(stream.status))


def cmd_dims(ns):
    d = _work(ns.digits)
    if ns.q is None:
        root = fractal.alpha(ns.p, d)
        dim = fractal.dim_Tp(ns.p, d)
        name = "alpha"
    else:
        root = fractal.gamma(ns.p, ns.q, d)
        dim = fractal.dim_TpDq(ns.p, ns.q, d)
        name = "gamma"
    v, r = _enc(dim, ns.digits)
    return _record(
        "dims",
        {"p": ns.p, "q": ns.q},
        v,
        r,
        **{name: root.value.to_decimal(ns.digits), "residual": root.residual},
    )


def cmd_integral(ns):
    iseq = parse_indices(ns.indices)
    rep = integrals.verify_identity(iseq, ns.samples, ns.seed, _work(ns.digits), ns.strategy)
    est = rep.estimate
    return _record(
        "integral",
        {"indices": ",".join(map(str, iseq.indices)), "samples": ns.samples, "strategy": str(est.strategy)},
        repr(est.mean),
        repr(est.stderr),
        "pass" if rep.passed else "fail",
        ns.seed,
        composition=str(rep.composition),
        series=rep.target.to_decimal(ns.digits),
        z_score=rep.z_score,
        rel_error=rep.rel_error,
        criterion=rep.criterion,
    )


def cmd_idmap(ns):
    if (ns.indices is None) == (ns.comp is None):
        raise UsageError("idmap needs exactly one of --indices or --comp")
    if ns.indices is not None:
        iseq = parse_indices(ns.indices)
        comp = integrals.indices_to_composition(iseq)
        return _record("idmap", {"indices": ns.indices}, str(comp))
    comp = parse_composition(ns.comp)
    iseq = integrals.composition_to_indices(comp)
    return _record("idmap", {"comp": ns.comp}, ",".join(map(str, iseq.indices)))


COMMANDS = {
    "eval": cmd_eval,
    "expand": cmd_expand,
    "limit": cmd_limit,
    "compare": cmd_compare,
    "beta": cmd_beta,
    "dims": cmd_dims,
    "integral": cmd_integral,
    "idmap": cmd_idmap,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(suppress: bool) -> argparse.ArgumentParser:
    default = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--digits", type=int, default=default, help="significant digits (default 30)")
    p.add_argument("--json", action="store_true", default=default, help="emit JSON records")
    p.add_argument("--seed", type=int, default=default, help="seed for randomized commands (default 0)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--cache", dest="cache", action="store_true", default=default)
    g.add_argument("--no-cache", dest="cache", action="store_false", default=default)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zstar", description=__doc__.split("\n")[0], parents=[_common(False)])
    parser.add_argument("--batch", metavar="FILE", help="run one request per line ('-' for stdin)")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    common = [_common(True)]

    p = sub.add_parser("eval", parents=common, help="zeta* of a composition")
    p.add_argument("--comp", required=True, help='e.g. "2,1,3"; "" is the unit')

    p = sub.add_parser("expand", parents=common, help="digits of the inverse limit map")
    p.add_argument("--x", required=True, help="decimal number > 1")
    p.add_argument("--depth", type=int, default=12)

    p = sub.add_parser("limit", parents=common, help="limit value of a digit sequence")
    p.add_argument("--seq", required=True, help='"preamble;period", e.g. "3;1"')
    p.add_argument("--tol", type=float, default=1e-20)

    p = sub.add_parser("compare", parents=common, help="order of two compositions or sequences")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    p = sub.add_parser("beta", parents=common, help="binary encoding and decoding")
    p.add_argument("--seq")
    p.add_argument("--y")
    p.add_argument("--depth", type=int, default=12)

    p = sub.add_parser("dims", parents=common, help="dimension constants")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int)

    p = sub.add_parser("integral", parents=common, help="Monte-Carlo check of a cube integral")
    p.add_argument("--indices", required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--strategy", choices=[s.value for s in integrals.Strategy])

    p = sub.add_parser("idmap", parents=common, help="index sequence <-> composition")
    p.add_argument("--indices")
    p.add_argument("--comp")
    return parser


def _finish(ns, inherited=None):
    base = inherited or {}
    for name, default in (("digits", DEFAULT_CLI_DIGITS), ("json", False), ("seed", 0), ("cache", None)):
        if getattr(ns, name, None) is None:
            setattr(ns, name, base.get(name, default))
    return ns


def _format_text(rec: dict) -> str:
    value = rec["value"]
    if isinstance(value, list):
        value = ",".join(map(str, value))
    line = f"{rec['op']}: {value}"
    if rec.get("radius") is not None:
        line += f" +/- {rec['radius']}"
    if rec.get("status") not in (None, "ok"):
        line += f" [{rec['status']}]"
    if rec.get("seed") is not None:
        line += f" (seed {rec['seed']})"
    for k, v in rec.get("detail", {}).items():
        line += f"\n  {k}: {v}"
    return line


def _error_record(ns, message: str, status: str) -> dict:
    return _record(getattr(ns, "command", None), {}, None, None, status, getattr(ns, "seed", None), error=message)


def run(ns, out=sys.stdout) -> int:
    """Execute one parsed request and print its record."""
    op = ns.command
    args = {k: v for k, v in vars(ns).items() if k not in {"command", "json", "cache", "batch", "digits"}}
    if op != "integral":
        args.pop("seed", None)
    directory = cache_dir(ns.cache) if op in CACHED_OPS else None
    key = cache_key(op, args, ns.digits)
    code = EXIT_OK
    rec = cache_get(directory, key) if directory else None
    if rec is None:
        try:
            rec = COMMANDS[op](ns)
        except (DivergentCompositionError, NotInTError) as exc:
            rec, code = _error_record(ns, str(exc), "domain-error"), EXIT_DOMAIN
        except (UsageError, ValueError) as exc:
            rec, code = _error_record(ns, str(exc), "parse-error"), EXIT_PARSE
        except (PrecisionExhaustedError, ArithmeticError) as exc:
            rec, code = _error_record(ns, str(exc), "numeric-error"), 1
        else:
            if directory:
                cache_put(directory, key, rec)
    if ns.json:
        print(json.dumps(rec), file=out)
    elif code == EXIT_OK:
        print(_format_text(rec), file=out)
    else:
        print(f"zstar {op}: {rec['detail']['error']}", file=sys.stderr)
    return code


def _run_batch(parser, ns, out) -> int:
    inherited = {k: getattr(ns, k) for k in ("digits", "json", "seed", "cache")}
    fh = sys.stdin if ns.batch == "-" else open(ns.batch)
    worst = EXIT_OK
    with fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                sub = parser.parse_args(shlex.split(line))
                if sub.command is None:
                    raise UsageError("missing command")
            except UsageError as exc:
                print(f"zstar: {exc}: {line}", file=sys.stderr)
                worst = max(worst, EXIT_PARSE)
                continue
            worst = max(worst, run(_finish(sub, inherited), out))
    return worst


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except UsageError as exc:
        print(f"zstar: {exc}", file=sys.stderr)
        return EXIT_PARSE
    _finish(ns)
    if ns.batch:
        return _run_batch(parser, ns, out)
    if ns.command is None:
        parser.print_help(sys.stderr)
        return EXIT_PARSE
    return run(ns, out)


if __name__ == "__main__":
    sys.exit(main())
