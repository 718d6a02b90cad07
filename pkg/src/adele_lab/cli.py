"""Command-line front end.

Every subcommand prints either a fixed-width table or, with ``--json``, one
canonical JSON document (sorted keys, compact separators).  Exit status is 0
on success, 1 for domain errors (the error name goes to stderr) and 2 for
usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import sympy

from . import _numerics, brauer, equivalence, genus, orders, volume
from .errors import AdeleLabError, InvalidFieldSpec, InvalidInput, MissingFieldDiscriminant
from .fieldlab import NumberFieldSpec, Place, builtin_fields, splitting_type, zeta_partial

DEFAULT_PRECISION_BITS = 128
DEFAULT_PRIME_BOUND = 10**4
DEFAULT_WORKSPACE = "adele_lab_workspace.json"


# ---------------------------------------------------------------------------
# workspace


@dataclass
class Workspace:
    path: Path | None
    fields: dict[str, NumberFieldSpec] = field(default_factory=dict)
    matchings: dict[tuple[str, str], equivalence.PlaceBijectionData] = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | None) -> "Workspace":
        ws = cls(Path(path) if path else None, dict(builtin_fields()))
        if ws.path is None or not ws.path.exists():
            return ws
        try:
            doc = json.loads(ws.path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"workspace {ws.path} is not valid JSON: {exc}") from exc
        for fdoc in doc.get("fields", []):
            spec = NumberFieldSpec.from_json(fdoc)
            ws.fields[spec.label] = spec
        for mdoc in doc.get("matchings", []):
            m = equivalence.PlaceBijectionData.from_json(mdoc)
            ws.matchings[(m.left_field, m.right_field)] = m
        ws.config = dict(doc.get("config", {}))
        for key in ("precision_bits", "prime_bound"):
            if key in ws.config and int(ws.config[key]) <= 0:
                raise InvalidInput(f"workspace config {key} must be positive")
        return ws

    def save(self) -> None:
        if self.path is None:
            raise InvalidInput("no workspace path given")
        builtins = builtin_fields()
        doc = {
            "fields": [f.to_json() for label, f in sorted(self.fields.items()) if builtins.get(label) != f],
            "matchings": [self.matchings[k].to_json() for k in sorted(self.matchings)],
            "config": self.config,
        }
        self.path.write_text(_dumps(doc) + "\n", encoding="utf-8")

    def field(self, label: str) -> NumberFieldSpec:
        try:
            return self.fields[label]
        except KeyError:
            raise InvalidFieldSpec(f"unknown field {label!r}") from None

    def matching(self, left: str, right: str, bound: int) -> equivalence.PlaceBijectionData:
        saved = self.matchings.get((left, right))
        if saved is not None and saved.verified_bound >= bound:
            return saved
        return equivalence.build_place_matching(self.field(left), self.field(right), bound)


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_place(text: str) -> Place:
    text = text.strip()
    for kind in ("real", "complex"):
        if text.startswith(kind):
            return Place(kind, 0, int(text[len(kind):] or 0))
    p, _, slot = text.partition(".")
    try:
        return Place.finite(int(p), int(slot or 0))
    except ValueError:
        raise InvalidInput(f"cannot parse place {text!r}") from None


def parse_class(text: str) -> brauer.BrauerClass:
    """``LABEL:place=value,...`` (e.g. ``Q:2=1/2,3=1/2``) or ``@file.json``."""
    if text.startswith("@"):
        return brauer.BrauerClass.from_json(_read_json(text[1:]))
    label, _, body = text.partition(":")
    items = []
    for entry in filter(None, (e.strip() for e in body.split(","))):
        place, sep, value = entry.partition("=")
        if not sep:
            raise InvalidInput(f"expected place=value, got {entry!r}")
        try:
            items.append((parse_place(place), Fraction(value)))
        except (ValueError, ZeroDivisionError):
            raise InvalidInput(f"bad invariant {value!r}") from None
    return brauer.BrauerClass(label.strip(), tuple(items))


def parse_order(cls_text: str, devs: list[str]) -> orders.OrderData:
    if cls_text.startswith("@") and not devs:
        doc = _read_json(cls_text[1:])
        if "class" in doc:
            return orders.OrderData.from_json(doc)
    out = []
    for d in devs:
        place, sep, rest = d.partition("=")
        e, _, label = rest.partition(":")
        if not sep:
            raise InvalidInput(f"expected place=exponent[:label], got {d!r}")
        try:
            out.append((parse_place(place), int(e), label))
        except ValueError:
            raise InvalidInput(f"bad exponent in {d!r}") from None
    return orders.OrderData(parse_class(cls_text), tuple(out))


def parse_vertex(p: int, text: str) -> orders.TreeVertex:
    try:
        a, n, b = (int(x) for x in text.split(","))
    except ValueError:
        raise InvalidInput(f"expected a,n,b for a tree vertex, got {text!r}") from None
    return orders.TreeVertex(p, a, n, b)


def parse_ramified(text: str | None) -> dict:
    """``2:2,1;3:1,1/1,2`` meaning p=2 has (e,f)=(2,1); p=3 has (1,1) and (1,2)."""
    out: dict[int, list[tuple[int, int]]] = {}
    if not text:
        return out
    for block in filter(None, text.split(";")):
        p, _, pairs = block.partition(":")
        try:
            out[int(p)] = [tuple(int(x) for x in pair.split(",")) for pair in pairs.split("/")]
        except ValueError:
            raise InvalidFieldSpec(f"cannot parse ramification block {block!r}") from None
    return out


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc


def _number(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InvalidInput(f"not a number: {text!r}") from None


# ---------------------------------------------------------------------------
# output


def _default(obj):
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, Fraction):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), default=_default)


def _table(rows: list[tuple[str, object]]) -> str:
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


class Output:
    def __init__(self, as_json: bool, stream=None):
        self.as_json = as_json
        self.stream = stream or sys.stdout

    def emit(self, doc, rows: list[tuple[str, object]] | None = None) -> None:
        if self.as_json:
            print(_dumps(doc), file=self.stream)
        elif rows is not None:
            print(_table(rows), file=self.stream)
        else:
            print(_table([(k, v) for k, v in sorted(_plain(doc).items())]), file=self.stream)


def _plain(doc) -> dict:
    doc = json.loads(_dumps(doc))
    if not isinstance(doc, dict):
        return {"result": doc}
    return {k: (v if not isinstance(v, (dict, list)) else _dumps(v)) for k, v in doc.items()}


def _verdict_rows(v) -> list[tuple[str, object]]:
    if isinstance(v, equivalence.Refuted):
        where = "infinity" if v.prime is None else v.prime
        return [("verdict", f"Refuted({where})"), ("reason", v.reason)]
    skipped = ", ".join(map(str, v.skipped_primes)) or "-"
    return [("verdict", f"ConsistentUpTo({v.bound})"), ("skipped_primes", skipped)]


# ---------------------------------------------------------------------------
# commands


def cmd_field_add(args, ws, out):
    if args.file:
        spec = NumberFieldSpec.from_json(_read_json(args.file))
    else:
        if not args.minpoly:
            raise InvalidFieldSpec("give --minpoly or --file")
        try:
            coeffs = tuple(int(c) for c in args.minpoly.split(","))
        except ValueError:
            raise InvalidFieldSpec(f"bad coefficient list {args.minpoly!r}") from None
        disc = None if args.disc is None else int(args.disc)
        spec = NumberFieldSpec(args.label, coeffs, disc, parse_ramified(args.ramified))
    ws.fields[spec.label] = spec
    ws.save()
    out.emit(spec.to_json(), [("added", spec.label), ("degree", spec.degree), ("signature", spec.signature)])


def cmd_field_show(args, ws, out):
    spec = ws.field(args.label)
    doc = dict(spec.to_json(), signature=list(spec.signature), poly_disc=str(spec.poly_disc))
    rows = [
        ("label", spec.label),
        ("minpoly", list(spec.minpoly)),
        ("degree", spec.degree),
        ("signature", spec.signature),
        ("poly_disc", spec.poly_disc),
        ("field_disc", spec.field_discriminant if spec.field_discriminant is not None else "-"),
    ]
    out.emit(doc, rows)


def cmd_field_list(args, ws, out):
    labels = sorted(ws.fields)
    out.emit({"fields": labels}, [(lab, ws.fields[lab].degree) for lab in labels])


def cmd_split(args, ws, out):
    s = splitting_type(ws.field(args.field), args.p)
    out.emit(s, [("p", s.p), ("status", s.status.value), ("degrees", list(s.degrees)),
                 ("local_degrees", list(s.local_degrees))])


def cmd_equiv(args, ws, out):
    v = equivalence.check_local_equivalence(ws.field(args.K), ws.field(args.K2), args.bound or args.prime_bound)
    out.emit(v, _verdict_rows(v))


def cmd_gcd_equiv(args, ws, out):
    v = equivalence.check_gcd_equivalence(ws.field(args.K), ws.field(args.K2), args.bound or args.prime_bound)
    out.emit(v, _verdict_rows(v))


def cmd_gcd_witness(args, ws, out):
    w = equivalence.gcd_witness_algebra(ws.field(args.K), ws.field(args.K2), args.p0)
    out.emit(w, [("witness", str(w))])


def cmd_match(args, ws, out):
    m = equivalence.build_place_matching(ws.field(args.K), ws.field(args.K2), args.bound or args.prime_bound)
    if args.save:
        ws.matchings[(m.left_field, m.right_field)] = m
        ws.save()
    rows = [("left", m.left_field), ("right", m.right_field), ("verified_bound", m.verified_bound),
            ("matched_primes", len(m.finite_matching)), ("archimedean", len(m.archimedean_matching))]
    out.emit(m, rows)


def _signature_for(ws, c):
    spec = ws.fields.get(c.field)
    return spec.signature if spec is not None else None


def cmd_brauer_validate(args, ws, out):
    c = parse_class(args.cls)
    problems = brauer.validate(c, _signature_for(ws, c))
    out.emit({"valid": not problems, "problems": problems},
             [("valid", not problems)] + [("problem", p) for p in problems])


def _valid_class(ws, text):
    c = parse_class(text)
    problems = brauer.validate(c, _signature_for(ws, c))
    if problems:
        raise InvalidInput("; ".join(problems))
    return c


def _class_out(out, c):
    out.emit(c, [("class", str(c))])


def cmd_brauer_tensor(args, ws, out):
    _class_out(out, brauer.tensor(_valid_class(ws, args.a), _valid_class(ws, args.b)))


def cmd_brauer_inverse(args, ws, out):
    _class_out(out, brauer.inverse(_valid_class(ws, args.cls)))


def cmd_brauer_degree(args, ws, out):
    d = brauer.division_algebra_degree(_valid_class(ws, args.cls))
    out.emit({"degree": d}, [("degree", d)])


def cmd_brauer_restrict(args, ws, out):
    c = _valid_class(ws, args.cls)
    _class_out(out, brauer.restrict_from_Q(c, ws.field(args.to), args.prime_bound))


def cmd_brauer_transport(args, ws, out):
    c = _valid_class(ws, args.cls)
    phi = ws.matching(c.field, args.to, args.bound or args.prime_bound)
    _class_out(out, brauer.transport(c, phi))


def cmd_brauer_archtype(args, ws, out):
    c = _valid_class(ws, args.cls)
    t = brauer.archimedean_group_type(c, args.n, ws.field(c.field).signature)
    out.emit(t, [("group", t.describe()), ("noncompact", t.describe(noncompact_only=True)),
                 ("compact_quaternionic", t.compact_quaternionic)])


def cmd_brauer_random(args, ws, out):
    if args.seed is None:
        raise InvalidInput("brauer random needs --seed")
    rng = random.Random(args.seed)
    K = ws.field(args.field)
    primes = list(sympy.primerange(2, args.bound + 1))
    _class_out(out, brauer.random_class(K, rng, primes))


def cmd_order_level(args, ws, out):
    lev = orders.level_ideal(parse_order(args.cls, args.dev))
    out.emit(lev, [("level", str(lev))])


def cmd_order_maximal(args, ws, out):
    m = orders.is_maximal(parse_order(args.cls, args.dev))
    out.emit({"maximal": m}, [("maximal", m)])


def cmd_order_transport(args, ws, out):
    order = parse_order(args.cls, args.dev)
    phi = ws.matching(order.ambient_class.field, args.to, args.bound or args.prime_bound)
    moved = orders.transport_order(order, phi, brauer.transport(order.ambient_class, phi))
    out.emit(moved, [("class", str(moved.ambient_class)), ("level", str(orders.level_ideal(moved)))])


def cmd_tree_dist(args, ws, out):
    d = orders.tree_distance(parse_vertex(args.p, args.u), parse_vertex(args.p, args.v))
    out.emit({"distance": d}, [("distance", d)])


def cmd_tree_neighbors(args, ws, out):
    nbrs = orders.tree_neighbors(parse_vertex(args.p, args.u))
    out.emit({"neighbors": nbrs}, [(str(i), f"{v.a},{v.n},{v.b}") for i, v in enumerate(nbrs)])


def _volume_rows(r):
    rows = [("value", _numerics.mpf_str(r.value)), ("error_bound", r.error_bound)]
    rows += [(name, f"{_numerics.mpf_str(v)} +/- {e}") for name, v, e in r.breakdown]
    return rows


def cmd_volume_sl(args, ws, out):
    if args.input:
        inp = volume.VolumeInput.from_json(_read_json(args.input))
    else:
        if not args.cls:
            raise InvalidInput("give --class or --input")
        c = _valid_class(ws, args.cls)
        inp = volume.volume_input_for(ws.field(c.field), c, args.n, args.prime_bound, args.precision_bits)
    r = volume.volume_sl_n_d(inp)
    out.emit(r, _volume_rows(r))


def cmd_volume_cf(args, ws, out):
    K = ws.field(args.field)
    disc = int(args.disc) if args.disc is not None else K.field_discriminant
    if disc is None:
        raise MissingFieldDiscriminant(f"{K.label} has no field discriminant; pass --disc")
    z = zeta_partial(K, 2, args.prime_bound, args.precision_bits)
    r = volume.covolume_cf(abs(disc), z, args.ext_degree)
    out.emit(r, _volume_rows(r))


def cmd_genus_theta(args, ws, out):
    t = genus.theta(args.d_v)
    out.emit({"theta": t}, [("theta", t)])


def cmd_genus_bound(args, ws, out):
    b = genus.pr_bound(_number(args.V), args.d)
    out.emit({"bound": str(b)}, [("bound", b)])


def cmd_genus_budget(args, ws, out):
    disc = args.disc
    if disc is None and args.field:
        disc = ws.field(args.field).field_discriminant
    b = genus.lambda_budget(_number(args.V), args.d, None if disc is None else abs(int(disc)))
    doc = {"refined": str(_numerics.decimal_up(b.refined, 12)),
           "coarse": str(_numerics.decimal_up(b.coarse, 12))}
    out.emit(doc, [("refined", doc["refined"]), ("coarse", doc["coarse"])])


def cmd_genus_isobound(args, ws, out):
    alpha, bound = genus.isobound(_number(args.N))
    out.emit({"alpha": alpha, "bound": bound}, [("alpha", alpha), ("bound", bound)])


def cmd_genus_dmax(args, ws, out):
    places = genus.dmax_construct(args.alpha)
    doc = {"places": [{"place": pl.to_json(), "d_v": d, "inv": str(v)} for pl, d, v in places]}
    out.emit(doc, [(str(pl), f"d_v={d} inv={v}") for pl, d, v in places])


def cmd_genus_search(args, ws, out):
    best, config = genus.brute_force_theta_max(_number(args.N), args.max_places)
    doc = {"best_theta": best, "config": config}
    out.emit(doc, [("best_theta", best), ("nd", config.nd or "-"),
                   ("local_degrees", list(config.local_degrees))])


def cmd_genus_report(args, ws, out):
    rep = genus.genus_report(_number(args.V), args.d, args.disc, args.d_v or ())
    out.emit(rep, [(k, v) for k, v in sorted(_plain(rep).items())])


# ---------------------------------------------------------------------------
# parser


def _global_options() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit canonical JSON")
    g.add_argument("--precision-bits", type=int, default=argparse.SUPPRESS)
    g.add_argument("--prime-bound", type=int, default=argparse.SUPPRESS)
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.add_argument("--workspace", default=argparse.SUPPRESS, help="workspace JSON file")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    parser = argparse.ArgumentParser(prog="adele-lab", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    def group(name, help_text):
        p = sub.add_parser(name, help=help_text)
        return p.add_subparsers(dest="action", required=True)

    def leaf(container, name, fn, help_text=None):
        p = container.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(fn=fn)
        return p

    fg = group("field", "manage number fields")
    p = leaf(fg, "add", cmd_field_add)
    p.add_argument("label")
    p.add_argument("--minpoly", help="coefficients, constant term first, comma separated")
    p.add_argument("--disc", help="field discriminant D_K")
    p.add_argument("--ramified", help="local data at ramified primes, e.g. '2:2,1'")
    p.add_argument("--file", help="field JSON document")
    leaf(fg, "show", cmd_field_show).add_argument("label")
    leaf(fg, "list", cmd_field_list)

    p = leaf(sub, "split", cmd_split, "splitting type of a prime")
    p.add_argument("field")
    p.add_argument("p", type=int)
    for name, fn in (("equiv", cmd_equiv), ("gcd-equiv", cmd_gcd_equiv), ("match", cmd_match)):
        p = leaf(sub, name, fn)
        p.add_argument("K")
        p.add_argument("K2")
        p.add_argument("--bound", type=int)
        if name == "match":
            p.add_argument("--save", action="store_true", help="store the matching in the workspace")
    p = leaf(sub, "gcd-witness", cmd_gcd_witness)
    p.add_argument("K")
    p.add_argument("K2")
    p.add_argument("p0", type=int)

    bg = group("brauer", "Brauer class algebra")
    leaf(bg, "validate", cmd_brauer_validate).add_argument("cls")
    p = leaf(bg, "tensor", cmd_brauer_tensor)
    p.add_argument("a")
    p.add_argument("b")
    leaf(bg, "inverse", cmd_brauer_inverse).add_argument("cls")
    leaf(bg, "degree", cmd_brauer_degree).add_argument("cls")
    p = leaf(bg, "restrict", cmd_brauer_restrict)
    p.add_argument("cls")
    p.add_argument("--to", required=True)
    p = leaf(bg, "transport", cmd_brauer_transport)
    p.add_argument("cls")
    p.add_argument("--to", required=True)
    p.add_argument("--bound", type=int)
    p = leaf(bg, "archtype", cmd_brauer_archtype)
    p.add_argument("cls")
    p.add_argument("--n", type=int, default=1)
    p = leaf(bg, "random", cmd_brauer_random)
    p.add_argument("field")
    p.add_argument("--bound", type=int, default=100)

    og = group("order", "orders and level ideals")
    for name, fn in (("level", cmd_order_level), ("maximal", cmd_order_maximal), ("transport", cmd_order_transport)):
        p = leaf(og, name, fn)
        p.add_argument("cls")
        p.add_argument("--dev", action="append", default=[], help="place=exponent[:label]")
        if name == "transport":
            p.add_argument("--to", required=True)
            p.add_argument("--bound", type=int)

    tg = group("tree", "Bruhat-Tits tree of SL(2, Q_p)")
    p = leaf(tg, "dist", cmd_tree_dist)
    p.add_argument("p", type=int)
    p.add_argument("u", help="a,n,b")
    p.add_argument("v", help="a,n,b")
    p = leaf(tg, "neighbors", cmd_tree_neighbors)
    p.add_argument("p", type=int)
    p.add_argument("u", help="a,n,b")

    vg = group("volume", "covolume formulas")
    p = leaf(vg, "sl", cmd_volume_sl)
    p.add_argument("--class", dest="cls")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--input", help="VolumeInput JSON document")
    p = leaf(vg, "cf", cmd_volume_cf)
    p.add_argument("field")
    p.add_argument("--ext-degree", type=int, default=1)
    p.add_argument("--disc")

    gg = group("genus", "genus bounds")
    leaf(gg, "theta", cmd_genus_theta).add_argument("d_v", type=int, nargs="*")
    p = leaf(gg, "bound", cmd_genus_bound)
    p.add_argument("V")
    p.add_argument("d", type=int)
    p = leaf(gg, "budget", cmd_genus_budget)
    p.add_argument("V")
    p.add_argument("d", type=int)
    p.add_argument("--disc")
    p.add_argument("--field")
    leaf(gg, "isobound", cmd_genus_isobound).add_argument("N")
    leaf(gg, "dmax", cmd_genus_dmax).add_argument("alpha", type=int)
    p = leaf(gg, "search", cmd_genus_search)
    p.add_argument("N")
    p.add_argument("--max-places", type=int, default=genus.DEFAULT_MAX_PLACES)
    p = leaf(gg, "report", cmd_genus_report)
    p.add_argument("V")
    p.add_argument("d", type=int)
    p.add_argument("--disc", type=int, default=1)
    p.add_argument("--d-v", type=int, action="append")
    return parser


def _resolve(args, ws: Workspace) -> None:
    args.json = getattr(args, "json", False)
    args.seed = getattr(args, "seed", None)
    args.precision_bits = getattr(args, "precision_bits", int(ws.config.get("precision_bits", DEFAULT_PRECISION_BITS)))
    args.prime_bound = getattr(args, "prime_bound", int(ws.config.get("prime_bound", DEFAULT_PRIME_BOUND)))
    if args.precision_bits <= 0 or args.prime_bound <= 0:
        raise InvalidInput("--precision-bits and --prime-bound must be positive")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    try:
        ws = Workspace.load(getattr(args, "workspace", None) or os.environ.get("ADELE_LAB_WORKSPACE") or DEFAULT_WORKSPACE)
        _resolve(args, ws)
        args.fn(args, ws, Output(args.json))
    except AdeleLabError as exc:
        print(f"error: {exc.name}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
