"""Command-line driver: ``reynolds {check,expand,pn1,phi,shuffle}``.

Exit status is 0 when every check passes, 1 when an identity is violated
and 2 for usage or precondition errors. Output is JSON (default) or an
aligned table; identical flags and seed give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass
from fractions import Fraction

from .algebra import parse_algebra
from .errors import ReynoldsError
from .expr import eval_expr, format_wordsum, parse, reynolds_expand, symbols
from .hom import StructureMap, evaluate
from .identities import Identity, OperatedModel, first_nonzero, random_series, random_tensor, residual
from .series import Series
from .tensor import TensorSeries, classic_shuffle, complete_shuffle, complete_shuffle_direct, diamond
from .volterra import closed_form_Pn1, iterate_P, parse_kernel, parse_series

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

# series models are built this many orders beyond the report order so that
# D (which consumes an order) still leaves a full-length answer
_MARGIN = 2

_DEFAULT_ALGEBRA = {"exp": "scalar:mu=1", "unit": "scalar", "cauchy": "poly"}


@dataclass(frozen=True)
class RunConfig:
    command: str
    kernel: str | None
    algebra: str | None
    order: int | None
    trials: int
    seed: int
    fmt: str


class UsageError(Exception):
    pass


def _config(args) -> RunConfig:
    seed = args.seed
    env = os.environ.get("REYNOLDS_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise UsageError(f"REYNOLDS_SEED must be an integer, got {env!r}") from None
    if args.order is not None and args.order < 1:
        raise UsageError("--order must be at least 1")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    return RunConfig(args.command, args.kernel, args.algebra, args.order, args.trials, seed, args.format)


def _series_json(s: Series) -> list[str]:
    return s.to_list()


def _emit(cfg: RunConfig, payload, table_rows=None, out=sys.stdout):
    if cfg.fmt == "json" or table_rows is None:
        out.write(json.dumps(payload) + "\n")
        return
    widths = [max(len(str(r[i])) for r in table_rows) for i in range(len(table_rows[0]))]
    for r in table_rows:
        out.write("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")


def _series_rows(header, s: Series):
    return [header] + [(f"x^{i}", str(c)) for i, c in enumerate(s.coeffs)]


def _cap(s: Series, order: int) -> Series:
    return s.truncate(min(s.ord, order))


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(identity: str, cfg: RunConfig, scalar_weight=0, out=sys.stdout) -> int:
    ident = Identity.parse(identity)
    rng = random.Random(cfg.seed)
    tensor = cfg.algebra is not None and cfg.kernel is None
    if tensor:
        order = cfg.order or 6
        A = parse_algebra(cfg.algebra, order)
        model = OperatedModel.free(A, order)
        max_index = min(A.dim - 1, 2)

        def draw():
            return random_tensor(rng, A, order, terms=3, max_index=max_index)
    else:
        order = cfg.order or 16
        K = parse_kernel(cfg.kernel or "exp", order + _MARGIN)
        model = OperatedModel.volterra(K, order + _MARGIN)

        def draw():
            return random_series(rng, order + _MARGIN)

    trials = []
    for t in range(cfg.trials):
        inputs = [draw() for _ in range(ident.arity)]
        r = residual(model, ident, inputs, scalar_weight)
        if isinstance(r, Series):
            r = _cap(r, order)
            trusted = r.ord
        else:
            trusted = r.N
        lead = first_nonzero(r)
        if lead is None:
            trials.append({"trial": t, "zero": True, "trusted_order": trusted, "first_nonzero": None})
        else:
            where = list(lead[0]) if isinstance(lead[0], tuple) else lead[0]
            trials.append({"trial": t, "zero": False, "trusted_order": trusted,
                           "first_nonzero": {"at": where, "coeff": str(lead[1])}})

    failures = [t for t in trials if not t["zero"]]
    trusted = min(t["trusted_order"] for t in trials)
    if failures:
        if tensor:
            worst = min(failures, key=lambda t: (len(t["first_nonzero"]["at"]), t["trial"]))
            verdict = f"nonzero at word {worst['first_nonzero']['at']} (coefficient {worst['first_nonzero']['coeff']})"
        else:
            worst = min(failures, key=lambda t: (t["first_nonzero"]["at"], t["trial"]))
            verdict = f"nonzero at x^{worst['first_nonzero']['at']} (coefficient {worst['first_nonzero']['coeff']})"
        verdict += f" in trial {worst['trial']}"
    else:
        verdict = f"zero to order {trusted}"
    payload = {
        "identity": ident.value,
        "model": model.name if tensor else f"volterra[{cfg.kernel or 'exp'}]",
        "order": order,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "passed": not failures,
        "failures": len(failures),
        "verdict": verdict,
        "results": trials,
    }
    rows = [("trial", "status", "first nonzero")]
    for t in trials:
        fn = t["first_nonzero"]
        rows.append((t["trial"], "zero" if t["zero"] else "NONZERO",
                     "" if fn is None else f"{fn['at']}: {fn['coeff']}"))
    rows.append(("", "verdict", verdict))
    _emit(cfg, payload, rows, out)
    return EXIT_VIOLATION if failures else EXIT_OK


def _bindings(binds, names, rng, order, algebra=None):
    given = {}
    for b in binds or []:
        name, sep, value = b.partition("=")
        if not sep:
            raise UsageError(f"--bind expects name=value, got {b!r}")
        given[name.strip()] = value.strip()
    out = {}
    for name in sorted(names):
        value = given.get(name)
        if value is None:
            continue
        if algebra is not None:
            out[name] = (random_tensor(rng, algebra, order, terms=3, max_index=min(algebra.dim - 1, 2))
                         if value == "random" else eval_expr(parse(value), OperatedModel.free(algebra, order)))
        else:
            out[name] = random_series(rng, order) if value == "random" else parse_series(value, order)
    return out


def cmd_expand(text: str, cfg: RunConfig, binds=(), rewrite=False, out=sys.stdout) -> int:
    e = parse(text)
    rng = random.Random(cfg.seed)
    if rewrite:
        order = cfg.order or 16
        ws = format_wordsum(reynolds_expand(e, order))
        rows = [("coeff", "term")] + [(t["coeff"], t["term"]) for t in ws]
        _emit(cfg, ws, rows, out)
        return EXIT_OK
    if cfg.algebra is not None and cfg.kernel is None:
        order = cfg.order or 6
        A = parse_algebra(cfg.algebra, order)
        model = OperatedModel.free(A, order)
        value = eval_expr(e, model, _bindings(binds, symbols(e), rng, order, A))
        rows = [("coeff", "word")] + [(str(c), "⊗".join(map(str, w))) for w, c in value.sorted_terms()]
        _emit(cfg, value.to_dict(), rows, out)
        return EXIT_OK
    order = cfg.order or 16
    K = parse_kernel(cfg.kernel or "exp", order + _MARGIN)
    model = OperatedModel.volterra(K, order + _MARGIN)
    value = _cap(eval_expr(e, model, _bindings(binds, symbols(e), rng, order + _MARGIN)), order)
    _emit(cfg, _series_json(value), _series_rows(("term", "coeff"), value), out)
    return EXIT_OK


def _infer_mu(K) -> Fraction:
    k0, k1 = K.k[0], K.k[1]
    if not k0 or not k1:
        raise UsageError("cannot infer mu: k(0) and the x-coefficient of k must be nonzero; pass --mu")
    # h = mu (1/k)' has constant term -mu k1 / k0^2
    return -K.h[0] * k0 * k0 / k1


def cmd_pn1(n: int, cfg: RunConfig, closed_form=False, mu=None, out=sys.stdout) -> int:
    if n < 0:
        raise UsageError("n must be nonnegative")
    order = cfg.order or 16
    K = parse_kernel(cfg.kernel or "exp", order)
    it = _cap(iterate_P(K, Series.one(order), n), order)
    payload = {"n": n, "iterate": _series_json(it)}
    rows = [("term", "iterate")] + [(f"x^{i}", str(c)) for i, c in enumerate(it.coeffs)]
    code = EXIT_OK
    if closed_form:
        m = Fraction(mu) if mu is not None else _infer_mu(K)
        cf = _cap(closed_form_Pn1(K, n, m), order)
        common = min(cf.ord, it.ord)
        match = cf.equal_mod(it, common)
        payload.update({"mu": str(m), "closed_form": _series_json(cf), "match": match})
        rows = [("term", "iterate", "closed form")] + [
            (f"x^{i}", str(it[i]), str(cf[i])) for i in range(common + 1)]
        rows.append(("", "verdict", "match" if match else "MISMATCH"))
        code = EXIT_OK if match else EXIT_VIOLATION
    _emit(cfg, payload, rows, out)
    return code


def cmd_phi(text: str, cfg: RunConfig, out=sys.stdout) -> int:
    order = cfg.order or 16
    kernel = cfg.kernel or "exp"
    alg = cfg.algebra or _DEFAULT_ALGEBRA.get(kernel)
    if alg is None:
        raise UsageError("phi with a custom kernel needs --algebra")
    A = parse_algebra(alg, order)
    K = parse_kernel(kernel, order + 1)
    sm = StructureMap(K, A, order)
    e = parse(text)
    if symbols(e):
        raise UsageError("phi expressions may not contain free symbols")
    u = eval_expr(e, OperatedModel.free(A, order + 1))
    value = evaluate(sm, u)
    _emit(cfg, _series_json(value), _series_rows(("term", "coeff"), value), out)
    return EXIT_OK


def _word(text: str) -> tuple[int, ...]:
    try:
        w = tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise UsageError(f"words are comma-separated basis indices, got {text!r}") from None
    if not w:
        raise UsageError("words must be nonempty")
    return w


_SHUFFLES = {
    "complete": complete_shuffle,
    "direct": complete_shuffle_direct,
    "classic": classic_shuffle,
    "diamond": diamond,
}


def cmd_shuffle(w1: str, w2: str, cfg: RunConfig, method="complete", out=sys.stdout) -> int:
    order = cfg.order or 8
    A = parse_algebra(cfg.algebra or "scalar:mu=1", order)
    a = TensorSeries.word(_word(w1), order, A)
    b = TensorSeries.word(_word(w2), order, A)
    value = _SHUFFLES[method](a, b)
    rows = [("coeff", "word")] + [(str(c), "⊗".join(map(str, w))) for w, c in value.sorted_terms()]
    _emit(cfg, value.to_dict(), rows, out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kernel", help="exp | unit | cauchy | k=<expr>,h=<expr>")
    common.add_argument("--algebra", help="scalar[:mu=p/q] | poly[:rules=<file>] | series:kernel=<kernel>;N=<n>")
    common.add_argument("--order", type=int, default=None,
                        help="truncation order (default 16 for series, 6 for tensors, 8 for shuffle)")
    common.add_argument("--trials", type=int, default=50)
    common.add_argument("--seed", type=int, default=0, help="overridden by REYNOLDS_SEED")
    common.add_argument("--format", choices=("json", "table"), default="json")

    p = argparse.ArgumentParser(prog="reynolds", description="Exact checks for Reynolds and Volterra operators.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="residual check of an operator identity")
    c.add_argument("identity", choices=[i.value for i in Identity])
    c.add_argument("--weight", default="0", help="scalar weight for rota-baxter / differential")

    e = sub.add_parser("expand", parents=[common], help="evaluate or Reynolds-expand an expression")
    e.add_argument("expr")
    e.add_argument("--bind", action="append", metavar="NAME=VALUE",
                   help="bind a symbol to 'random' or a series expression in x")
    e.add_argument("--rewrite", action="store_true", help="print the Reynolds word expansion instead")

    n = sub.add_parser("pn1", parents=[common], help="iterated P applied to 1")
    n.add_argument("n", type=int)
    n.add_argument("--closed-form", action="store_true")
    n.add_argument("--mu", help="scale in h = mu (1/k)'; inferred when omitted")

    f = sub.add_parser("phi", parents=[common], help="evaluate a tensor expression as iterated integrals")
    f.add_argument("expr")

    s = sub.add_parser("shuffle", parents=[common], help="dump shuffle terms of two words")
    s.add_argument("word1")
    s.add_argument("word2")
    s.add_argument("--method", choices=sorted(_SHUFFLES), default="complete")
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        if args.command == "check":
            return cmd_check(args.identity, cfg, Fraction(args.weight), out=out)
        if args.command == "expand":
            return cmd_expand(args.expr, cfg, args.bind, args.rewrite, out=out)
        if args.command == "pn1":
            return cmd_pn1(args.n, cfg, args.closed_form, args.mu, out=out)
        if args.command == "phi":
            return cmd_phi(args.expr, cfg, out=out)
        if args.command == "shuffle":
            return cmd_shuffle(args.word1, args.word2, cfg, args.method, out=out)
    except (UsageError, ReynoldsError, ValueError, ZeroDivisionError) as exc:
        err.write(f"reynolds: error: {exc}\n")
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
