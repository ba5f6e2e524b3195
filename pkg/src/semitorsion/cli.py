"""Command line front end.

    semitorsion hom --algebra builtin:a2 --weight 1,-1 --module S2 --json
    semitorsion verify duality --algebra builtin:a2

Output JSON has sorted keys and integer numbers only, so identical inputs
give byte-identical output.  Exit codes: 0 ok, 1 harness failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field

from .algebra import Algebra, AlgebraError, Quiver, Relation, build_algebra, builtin, BUILTINS, rep_projective
from .exactlin import is_prime

log = logging.getLogger(__name__)

__all__ = [
    "ParseError",
    "ValidationError",
    "AlgebraSpec",
    "RunConfig",
    "parse_algebra_file",
    "parse_algebra_text",
    "spec_to_json",
    "spec_to_algebra",
    "builtin_spec",
    "run_command",
    "main",
]

COMMANDS = ("hom", "epair", "coker", "fpoly", "candecomp", "classify", "membership", "tfcheck", "indset", "verify",
            "testset")


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class ValidationError(ValueError):
    def __init__(self, field_name: str, message: str = "invalid"):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraSpec:
    field_char: int
    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str, str], ...]
    relations: tuple[tuple[tuple[int, tuple[str, ...]], ...], ...]
    nilpotency_bound: int

    def as_json_obj(self) -> dict:
        return {
            "field_char": self.field_char,
            "vertices": list(self.vertices),
            "arrows": [{"name": n, "from": s, "to": t} for n, s, t in self.arrows],
            "relations": [[{"coef": c, "path": list(p)} for c, p in r] for r in self.relations],
            "nilpotency_bound": self.nilpotency_bound,
        }


@dataclass
class RunConfig:
    seed: int = 0
    samples: int = 16
    n_max: int = 8
    dim_cap: tuple[int, ...] | None = None
    trials: int = 24
    output: str = "text"
    threads: int = 1
    small_q: int | None = None
    weight: tuple[int, ...] | None = None
    weight2: tuple[int, ...] | None = None
    module: str | None = None
    harness: str | None = None
    count: int = 0
    exhaustive: bool = False
    params: dict = field(default_factory=dict)


# -- algebra files ------------------------------------------------------------


def _need(obj, key, where, kind):
    name = f"{where}.{key}" if where else key
    if not isinstance(obj, dict) or key not in obj:
        raise ValidationError(name, "missing")
    val = obj[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise ValidationError(name, "expected an integer")
    if kind is not int and not isinstance(val, kind):
        raise ValidationError(name, f"expected {kind.__name__}")
    return val


def validate_spec(obj) -> AlgebraSpec:
    if not isinstance(obj, dict):
        raise ValidationError("<root>", "expected an object")
    p = _need(obj, "field_char", "", int)
    if not is_prime(p):
        raise ValidationError("field_char", "not a prime")
    verts = _need(obj, "vertices", "", list)
    if not verts or not all(isinstance(v, str) for v in verts) or len(set(verts)) != len(verts):
        raise ValidationError("vertices", "expected distinct strings")
    arrows = []
    names = {}
    for k, a in enumerate(_need(obj, "arrows", "", list)):
        where = f"arrows[{k}]"
        n, s, t = (_need(a, key, where, str) for key in ("name", "from", "to"))
        if n in names:
            raise ValidationError(f"{where}.name", "duplicate arrow name")
        for key, v in (("from", s), ("to", t)):
            if v not in verts:
                raise ValidationError(f"{where}.{key}", "unknown vertex")
        names[n] = (s, t)
        arrows.append((n, s, t))
    rels = []
    for k, r in enumerate(_need(obj, "relations", "", list)):
        where = f"relations[{k}]"
        if not isinstance(r, list) or not r:
            raise ValidationError(where, "expected a non-empty list of terms")
        ends = None
        terms = []
        for j, term in enumerate(r):
            c = _need(term, "coef", f"{where}[{j}]", int)
            path = _need(term, "path", f"{where}[{j}]", list)
            if len(path) < 2:
                raise ValidationError(where, "relation paths must have length at least 2")
            for a in path:
                if a not in names:
                    raise ValidationError(where, f"unknown arrow {a!r}")
            for a, b in zip(path, path[1:]):
                if names[a][1] != names[b][0]:
                    raise ValidationError(where, f"arrows {a!r} and {b!r} do not compose")
            e = (names[path[0]][0], names[path[-1]][1])
            if ends is not None and e != ends:
                raise ValidationError(where, "terms are not parallel")
            ends = e
            terms.append((c % p, tuple(path)))
        rels.append(tuple(terms))
    L = _need(obj, "nilpotency_bound", "", int)
    if L < 1:
        raise ValidationError("nilpotency_bound", "must be positive")
    return AlgebraSpec(p, tuple(verts), tuple(arrows), tuple(rels), L)


def parse_algebra_text(text: str) -> AlgebraSpec:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg) from None
    return validate_spec(obj)


def parse_algebra_file(path) -> AlgebraSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra_text(fh.read())


def spec_to_json(spec: AlgebraSpec) -> str:
    return json.dumps(spec.as_json_obj(), indent=2, sort_keys=True) + "\n"


def builtin_spec(name: str, p: int = 1009) -> AlgebraSpec:
    if name not in BUILTINS:
        raise InputError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
    b = BUILTINS[name]
    rels = tuple(tuple((int(c) % p, tuple(path)) for c, path in r.terms) for r in b["relations"])
    return AlgebraSpec(p, tuple(b["vertices"]), tuple(tuple(a) for a in b["arrows"]), rels, b["L"])


def spec_to_algebra(spec: AlgebraSpec) -> Algebra:
    if spec.field_char == 1009:
        for name in BUILTINS:
            if builtin_spec(name) == spec:
                return builtin(name)
    q = Quiver.from_lists(list(spec.vertices), [tuple(a) for a in spec.arrows])
    rels = [Relation(tuple(r)) for r in spec.relations]
    return build_algebra(q, rels, spec.nilpotency_bound, spec.field_char)


def algebra_hash(spec: AlgebraSpec) -> str:
    blob = json.dumps(spec.as_json_obj(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# -- argument helpers ------------------------------------------------------------------


def _ints(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"{what}: expected comma-separated integers, got {text!r}") from None


def _weight(alg: Algebra, w, what="--weight") -> tuple[int, ...]:
    if w is None:
        raise InputError(f"{what} is required")
    if len(w) != alg.n:
        raise InputError(f"{what} needs {alg.n} entries")
    return w


def _vertex(alg: Algebra, label: str) -> int:
    vs = list(alg.quiver.vertices)
    if label in vs:
        return vs.index(label)
    if label.isdigit() and 1 <= int(label) <= alg.n:
        return int(label) - 1
    raise InputError(f"unknown vertex {label!r}")


def make_module(alg: Algebra, text: str | None):
    """``S<i>``, ``P<i>``, ``I<i>`` or ``coker:<w1,w2,..>:<seed>`` over ``alg``."""
    from .present import cokernel, sample_presentation
    from .rep import Representation, dual, rep_simple

    if not text:
        raise InputError("--module is required")
    if text.startswith("coker:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise InputError("coker modules are written coker:<weight>:<seed>")
        w = _weight(alg, _ints(parts[1], "module weight"), "module weight")
        try:
            s = int(parts[2])
        except ValueError:
            raise InputError("coker seed must be an integer") from None
        return cokernel(sample_presentation(alg, w, s))
    kind, label = text[0], text[1:]
    if kind not in "SPI" or not label:
        raise InputError(f"unknown module {text!r}; use S<i>, P<i>, I<i> or coker:<weight>:<seed>")
    v = _vertex(alg, label)
    if kind == "S":
        return rep_simple(alg, v)
    if kind == "P":
        return rep_projective(alg, v)
    inj = dual(rep_projective(alg.opposite, v))
    return Representation(alg, inj.dims, inj.maps)


def _small_setup(alg: Algebra, cfg: RunConfig):
    from .harness import default_params

    d = default_params(alg)
    q = cfg.small_q or d["q"]
    cap = cfg.dim_cap or d["dim_cap"]
    if len(cap) != alg.n:
        raise InputError(f"--dimcap needs {alg.n} entries")
    if q not in (2, 3, 5):
        raise InputError("--smallq must be 2, 3 or 5")
    small = alg if alg.p == q else alg.with_field(q)
    return q, tuple(cap), small


# -- dispatch ------------------------------------------------------------------------------


def _cmd_hom(alg, cfg):
    from .present import hom_e_generic

    M = make_module(alg, cfg.module)
    w = _weight(alg, cfg.weight)
    he = hom_e_generic(alg, w, M, cfg.samples, cfg.seed)
    return {"weight": list(w), "module": cfg.module, "dims": list(M.dims), "hom": he.hom, "e": he.e}, True


def _cmd_epair(alg, cfg):
    from .present import E_generic, e_generic_pair

    d = _weight(alg, cfg.weight)
    g = _weight(alg, cfg.weight2, "--weight2")
    return {"delta": list(d), "eta": list(g), "e": e_generic_pair(alg, d, g, cfg.samples, cfg.seed),
            "E": E_generic(alg, d, g, cfg.samples, cfg.seed)}, True


def _cmd_coker(alg, cfg):
    from .present import cokernel, sample_presentation

    w = _weight(alg, cfg.weight)
    Q = cokernel(sample_presentation(alg, w, cfg.seed))
    maps = {a.name: [[int(x) for x in row] for row in m] for a, m in zip(alg.quiver.arrows, Q.maps)}
    return {"weight": list(w), "dims": list(Q.dims), "maps": maps}, True


def _cmd_fpoly(alg, cfg):
    from .tropical import trop_f, trop_f_dual
    from .rep import submodule_dimvectors

    q, _, small = _small_setup(alg, cfg)
    M = make_module(small, cfg.module)
    w = _weight(alg, cfg.weight)
    return {"weight": list(w), "module": cfg.module, "field": q, "dims": list(M.dims),
            "f": trop_f(M, w), "f_dual": trop_f_dual(M, w),
            "submodule_dimvectors": sorted(list(v) for v in submodule_dimvectors(M))}, True


def _cmd_candecomp(alg, cfg):
    from .candecomp import canonical_decomposition, verify_canonical

    w = _weight(alg, cfg.weight)
    dec = canonical_decomposition(alg, w, cfg.samples, cfg.seed, cfg.trials)
    ok = verify_canonical(alg, dec.summands, cfg.samples, cfg.seed, cfg.trials)
    return {"weight": list(w), "summands": [list(s) for s in dec.summands], "agreement": dec.agreement,
            "samples": dec.samples, "verified": ok}, True


def _cmd_classify(alg, cfg):
    from .candecomp import classify_weight

    w = _weight(alg, cfg.weight)
    c = classify_weight(alg, w, cfg.samples, cfg.seed, cfg.trials)
    return {"weight": list(w), "class": c.tag, "witness": int(c.witness)}, True


def _cmd_membership(alg, cfg):
    from .rep import lift
    from .stability import limit_membership, membership

    q, _, small = _small_setup(alg, cfg)
    M = make_module(small, cfg.module)
    w = _weight(alg, cfg.weight)
    flags = membership(M, w)
    lim = limit_membership(alg, lift(M, alg), w, cfg.n_max, cfg.samples, cfg.seed)
    return {"weight": list(w), "module": cfg.module, "field": q, "flags": flags.as_dict(),
            "limit": {"in_F_limit": lim.in_F_limit, "in_Tcheck_limit": lim.in_Tcheck_limit,
                      "witness_F": lim.witness_F, "witness_T": lim.witness_T}}, True


def _cmd_tfcheck(alg, cfg):
    from .stability import build_testset, tf_equivalent

    q, cap, _ = _small_setup(alg, cfg)
    t = _weight(alg, cfg.weight)
    e = _weight(alg, cfg.weight2, "--weight2")
    ts = build_testset(alg, cap, 0, cfg.seed, exhaustive=True, q=q)
    mods = ts.modules  # named simples and projectives come first
    ok, cex = tf_equivalent(t, e, [m.small for m in mods])
    out = {"theta": list(t), "eta": list(e), "tf_equivalent": ok, "testset": ts.provenance, "counterexample": None}
    if cex is not None:
        m = next(m for m in mods if m.small is cex[0])
        out["counterexample"] = {"module": m.name, "dims": list(m.dims), "flag": cex[1]}
    return out, True


def _cmd_indset(alg, cfg):
    from .stability import ind_set

    w = _weight(alg, cfg.weight)
    return {"weight": list(w), "ind": [list(x) for x in ind_set(alg, w, cfg.samples, cfg.seed, cfg.trials).weights]}, True


def _cmd_testset(alg, cfg):
    from .stability import build_testset

    q, cap, _ = _small_setup(alg, cfg)
    ts = build_testset(alg, cap, cfg.count, cfg.seed, exhaustive=cfg.exhaustive, q=q)
    mods = [{"name": m.name, "tag": m.tag, "dims": list(m.dims)} for m in ts.modules]
    return {"provenance": ts.provenance, "modules": mods, "anomalies": ts.anomalies}, True


def _cmd_verify(alg, cfg):
    from .harness import HARNESSES, run_harness

    if cfg.harness not in HARNESSES:
        raise InputError(f"unknown harness {cfg.harness!r}; choose from {sorted(HARNESSES)}")
    params = dict(samples=cfg.samples, n_max=cfg.n_max, trials=cfg.trials, threads=cfg.threads)
    if cfg.dim_cap:
        params["dim_cap"] = cfg.dim_cap
    if cfg.small_q:
        params["q"] = cfg.small_q
    params.update(cfg.params)
    rep = run_harness(alg, cfg.harness, params, cfg.seed)
    log.info("harness %s took %.2f s", cfg.harness, rep.seconds)
    return rep.as_dict(), rep.passed


DISPATCH = {
    "hom": _cmd_hom,
    "epair": _cmd_epair,
    "coker": _cmd_coker,
    "fpoly": _cmd_fpoly,
    "candecomp": _cmd_candecomp,
    "classify": _cmd_classify,
    "membership": _cmd_membership,
    "tfcheck": _cmd_tfcheck,
    "indset": _cmd_indset,
    "verify": _cmd_verify,
    "testset": _cmd_testset,
}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        return x.item()
    return x


def run_command(spec: AlgebraSpec, command: str, config: RunConfig) -> tuple[str, int]:
    """Run one command; returns ``(stdout text, exit code)``."""
    from .candecomp import Inconsistent, NotIndecomposable, NotReduced
    from .rep import EnumerationCapExceeded

    if command not in DISPATCH:
        raise InputError(f"unknown command {command!r}")
    alg = spec_to_algebra(spec)
    try:
        results, ok = DISPATCH[command](alg, config)
    except (NotIndecomposable, NotReduced, EnumerationCapExceeded) as exc:
        raise InputError(str(exc)) from None
    except Inconsistent as exc:
        results, ok = {"error": "Inconsistent", "message": str(exc), "counts": exc.counts}, False
    doc = {
        "command": command if command != "verify" else f"verify {config.harness}",
        "algebra_hash": algebra_hash(spec),
        "seed": int(config.seed),
        "samples": int(config.samples),
        "results": _jsonable(results),
    }
    if config.output == "json":
        text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    else:
        text = _text(doc)
    return text, 0 if ok else 1


def _text(doc: dict) -> str:
    res = doc["results"]
    lines = [f"{doc['command']}  (algebra {doc['algebra_hash'][:12]}, seed {doc['seed']})"]
    if "summary" in res:
        s = res["summary"]
        lines.append(f"{s['passed']}/{s['cases']} cases pass")
        for c in res["cases"]:
            if not c["pass"]:
                lines.append(f"FAIL {c['case_id']}: expected {c['expected']}, got {c['got']}, witness {c['witness']}")
        for n in res["notes"]:
            lines.append(f"note: {n}")
    else:
        for k in sorted(res):
            lines.append(f"{k}: {json.dumps(res[k], sort_keys=True)}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semitorsion", description="Generic presentations, torsion classes and theorem checks.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("harness", nargs="?", help="harness name for verify")
    p.add_argument("--algebra", default="builtin:a2", help="PATH or builtin:NAME")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--dimcap")
    p.add_argument("--trials", type=int, default=24)
    p.add_argument("--json", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--weight")
    p.add_argument("--weight2")
    p.add_argument("--module")
    p.add_argument("--smallq", type=int)
    p.add_argument("--count", type=int, default=0, help="sampled cokernels for testset")
    p.add_argument("--exhaustive", action="store_true", help="exhaustive testset")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def load_spec(arg: str) -> AlgebraSpec:
    if arg.startswith("builtin:"):
        return builtin_spec(arg.split(":", 1)[1])
    return parse_algebra_file(arg)


_VALUE_FLAGS = ("--weight", "--weight2", "--dimcap", "--module")


def _glue_values(argv):
    """Let ``--weight -1,1`` through: argparse would read ``-1,1`` as a flag."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_values(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.seed < 0 or args.seed >= 1 << 64:
            raise InputError("--seed must be a 64-bit unsigned integer")
        for name in ("samples", "nmax", "trials", "threads"):
            if getattr(args, name) < 1:
                raise InputError(f"--{name} must be positive")
        if args.command == "verify" and not args.harness:
            raise InputError("verify needs a harness name")
        spec = load_spec(args.algebra)
        cfg = RunConfig(
            seed=args.seed, samples=args.samples, n_max=args.nmax, trials=args.trials,
            dim_cap=_ints(args.dimcap, "--dimcap") if args.dimcap else None,
            output="json" if args.json else "text", threads=args.threads, small_q=args.smallq,
            weight=_ints(args.weight, "--weight") if args.weight else None,
            weight2=_ints(args.weight2, "--weight2") if args.weight2 else None,
            module=args.module, harness=args.harness, count=args.count, exhaustive=args.exhaustive,
        )
        text, code = run_command(spec, args.command, cfg)
    except (ParseError, ValidationError, InputError, AlgebraError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
