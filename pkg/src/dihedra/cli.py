"""Command line front end: ``dihedra validate|cohomology|deform|iso-check <file>``.

Input is one JSON document per algebra::

    {
      "field": "Q",                       # or "F_7"
      "basis": [["1", 0], ["x", 0]],      # name, degree
      "involution": [[1, 0], [0, 1]],     # optional, default identity
      "form": {"degree": 0, "gram": [[0, 1], [1, 0]]},   # optional
      "truncation": 5,                    # optional, default 5
      "degrees": [0, 5],                  # optional, default [0, N]
      "structure": {"mode": "dga", "product": [["1", "x", "x", 1], ...]}
    }

Scalars are integers or ``"p/q"`` strings. Structure modes:

* ``dga``: ``product`` rows ``[a, b, c, coeff]`` for ``a*b = coeff c + ...``
  and ``differential`` rows ``[a, b, coeff]`` for ``d a = coeff b + ...``;
* ``hat``: ``operations`` rows ``[[a_1, ..., a_n], b, coeff]``;
* ``dual``: ``entries`` rows ``[a, [b_1, ..., b_n], coeff]`` meaning
  ``m(w_a)`` contains ``coeff w_{b_1}...w_{b_n}``.

An optional ``deformation`` block holds ``ring`` (``"eps^3"`` or
``"s^2,t^3"``), ``eta`` and ``gauge`` rows ``[monomial, a, [b...], coeff]``
in the dual notation.

Exit status is 0 when every check in the report passed, 1 when some check
failed and 2 for unusable input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import cohom, deform
from .ainfty import AInftyStructure, validate
from .exactnum import GF, Matrix, Q
from .graded import BilinearForm, GradedSpace, StructureError
from .tensoralg import Derivation

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class Description:
    V: GradedSpace
    N: int
    window: tuple[int, int]
    field: str
    scalar: object
    structure: dict
    deformation: dict = field(default_factory=dict)

    def build(self, N: int | None = None) -> AInftyStructure:
        return _build_structure(self, self.N if N is None else N)


# ----------------------------------------------------------------------------
# parsing


def _scalar_parser(name: str):
    if name in ("Q", "QQ"):
        return Q
    if name.startswith("F_"):
        try:
            return GF(int(name[2:]))
        except ValueError as e:
            raise InputError(f"field: {e}") from None
    raise InputError(f"field: expected 'Q' or 'F_p', got {name!r}")


def _num(scalar, x, where):
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise InputError(f"{where}: scalars must be integers or 'p/q' strings, got {x!r}")
    try:
        return scalar(x)
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise InputError(f"{where}: bad scalar {x!r} ({e})") from None


def _matrix(scalar, rows, n, where) -> Matrix:
    if not isinstance(rows, list) or len(rows) != n or any(
        not isinstance(r, list) or len(r) != n for r in rows
    ):
        raise InputError(f"{where}: expected a {n}x{n} row-major array")
    return Matrix.from_dense([[_num(scalar, x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)])


def load(text: str) -> Description:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise InputError("top level must be an object")
    field_name = doc.get("field", "Q")
    scalar = _scalar_parser(field_name)
    basis = doc.get("basis", [])
    names, degrees = [], []
    for t, entry in enumerate(basis):
        if isinstance(entry, dict):
            entry = [entry.get("name"), entry.get("degree")]
        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or not isinstance(entry[0], str)
            or not isinstance(entry[1], int)
        ):
            raise InputError(f"basis[{t}]: expected [name, degree]")
        names.append(entry[0])
        degrees.append(entry[1])
    n = len(names)
    inv = None
    if n:
        inv = _matrix(scalar, doc["involution"], n, "involution") if "involution" in doc else Matrix.identity(n)
    form = None
    if doc.get("form") is not None:
        f = doc["form"]
        if not isinstance(f, dict) or "gram" not in f:
            raise InputError("form: expected {degree, gram}")
        d = f.get("degree", 0)
        if not isinstance(d, int):
            raise InputError("form.degree: expected an integer")
        form = BilinearForm(d, _matrix(scalar, f["gram"], n, "form.gram"))
    try:
        V = GradedSpace(tuple(names), tuple(degrees), inv, form)
    except StructureError as e:
        raise InputError(str(e)) from None
    N = doc.get("truncation", 5)
    if not isinstance(N, int) or N < 1:
        raise InputError("truncation: expected a positive integer")
    window = doc.get("degrees", [0, N])
    if not (isinstance(window, list) and len(window) == 2 and all(isinstance(x, int) for x in window)):
        raise InputError("degrees: expected [a, b]")
    structure = doc.get("structure", {"mode": "dual", "entries": []})
    if not isinstance(structure, dict) or structure.get("mode") not in ("dga", "hat", "dual"):
        raise InputError("structure.mode: expected 'dga', 'hat' or 'dual'")
    desc = Description(V, N, (window[0], window[1]), field_name, scalar, structure, doc.get("deformation") or {})
    desc.build()  # schema check on the operations
    return desc


def _name_index(V: GradedSpace, name, where) -> int:
    try:
        return V.names.index(name)
    except ValueError:
        raise InputError(f"{where}: unknown basis element {name!r}") from None


def _rows(block, key, width):
    rows = block.get(key, [])
    if not isinstance(rows, list):
        raise InputError(f"structure.{key}: expected a list")
    for t, r in enumerate(rows):
        if not isinstance(r, list) or len(r) != width:
            raise InputError(f"structure.{key}[{t}]: expected {width} fields")
        yield t, r


def _word(V, names, where):
    if not isinstance(names, list):
        raise InputError(f"{where}: expected a list of basis names")
    return tuple(_name_index(V, a, where) for a in names)


def _build_structure(desc: Description, N: int) -> AInftyStructure:
    V, sc, st = desc.V, desc.scalar, desc.structure
    mode = st["mode"]
    try:
        if mode == "dga":
            mult: dict = {}
            for t, (a, b, c, x) in _rows(st, "product", 4):
                where = f"structure.product[{t}]"
                key = (_name_index(V, a, where), _name_index(V, b, where))
                out = mult.setdefault(key, {})
                i = _name_index(V, c, where)
                out[i] = out.get(i, 0) + _num(sc, x, where)
            diff: dict = {}
            for t, (a, b, x) in _rows(st, "differential", 3):
                where = f"structure.differential[{t}]"
                out = diff.setdefault(_name_index(V, a, where), {})
                i = _name_index(V, b, where)
                out[i] = out.get(i, 0) + _num(sc, x, where)
            S = AInftyStructure.from_dga(V, N, mult, diff)
        elif mode == "hat":
            hats: dict = {}
            for t, (args, b, x) in _rows(st, "operations", 3):
                where = f"structure.operations[{t}]"
                J = _word(V, args, where)
                if not J:
                    raise InputError(f"{where}: operations need at least one input")
                if len(J) > N:
                    continue
                out = hats.setdefault(len(J), {}).setdefault(J, {})
                i = _name_index(V, b, where)
                out[i] = out.get(i, 0) + _num(sc, x, where)
            S = AInftyStructure.from_hat(V, N, hats)
        else:
            entries = []
            for t, (a, word, x) in _rows(st, "entries", 3):
                where = f"structure.entries[{t}]"
                entries.append((_name_index(V, a, where), _word(V, word, where), _num(sc, x, where)))
            S = AInftyStructure.from_dual(V, N, entries)
    except StructureError as e:
        raise InputError(str(e)) from None
    bad = S.m.homogeneity_defects()
    if bad:
        i, w = bad[0]
        raise InputError(f"structure: entry w_{V.names[i]} -> {_fmt(V, w)} does not have degree 1")
    return S


def _fmt(V, word) -> str:
    return "*".join(f"w_{V.names[a]}" for a in word) or "1"


def parse_ring(text: str) -> deform.NilpotentRing:
    names, orders = [], []
    for part in text.split(","):
        name, sep, q = part.strip().partition("^")
        if not sep or not name or not q.strip().isdigit() or int(q) < 2:
            raise InputError(f"ring: expected 'name^q' with q >= 2, got {part.strip()!r}")
        names.append(name)
        orders.append(int(q))
    if len(set(names)) != len(names):
        raise InputError("ring: repeated variable")
    return deform.NilpotentRing(orders, names)


def _relement(desc, S, ring, rows, degree, where) -> deform.RElement:
    V = desc.V
    terms: dict = {}
    if not isinstance(rows, list):
        raise InputError(f"{where}: expected a list")
    for t, r in enumerate(rows):
        w = f"{where}[{t}]"
        if not isinstance(r, list) or len(r) != 4:
            raise InputError(f"{w}: expected [monomial, generator, [word], coeff]")
        try:
            e = ring.parse(str(r[0]))
        except ValueError as err:
            raise InputError(f"{w}: {err}") from None
        if e == ring.one:
            raise InputError(f"{w}: coefficients must lie in the augmentation ideal")
        terms.setdefault(e, []).append((_name_index(V, r[1], w), _word(V, r[2], w), _num(desc.scalar, r[3], w)))
    out = {}
    for e, entries in terms.items():
        xi = Derivation.from_entries(S.alg, degree, entries)
        bad = xi.homogeneity_defects()
        if bad:
            raise InputError(f"{where}: entry on w_{V.names[bad[0][0]]} does not have degree {degree}")
        out[e] = xi
    return deform.RElement(ring, S.alg, degree, out)


# ----------------------------------------------------------------------------
# reports


@dataclass
class Outcome:
    command: str
    N: int
    sections: list = field(default_factory=list)  # (title, payload)
    ok: bool = True
    lines: list[str] = field(default_factory=list)

    def to_dict(self):
        return {"command": self.command, "N": self.N, "ok": self.ok, "sections": [
            {"title": t, **p} for t, p in self.sections
        ]}


def _echo_dual(S: AInftyStructure) -> list:
    V = S.V
    return [[V.names[i], [V.names[a] for a in w], str(c)] for i, w, c in S.m.entries()]


def cmd_validate(desc: Description, args) -> Outcome:
    S = desc.build(args.max_weight)
    out = Outcome("validate", S.N)
    out.sections.append(("structure", {"dual_entries": _echo_dual(S)}))
    for rep in validate(S):
        out.ok &= rep.ok
        out.sections.append((rep.check, rep.to_dict()))
        status = "PASS" if rep.ok else "FAIL"
        out.lines.append(f"{rep.check:<22} {status}")
        for f in rep.failures[:5]:
            out.lines.append(f"  {f}")
    if S.V.dim == 0:
        out.lines.append("empty basis: nothing to check")
    return out


def _table_lines(table: cohom.CohomologyTable) -> list[str]:
    lines = [f"{table.label}  (truncated at N={table.N})", "  degree  cochains  dim  status"]
    for r in table.rows:
        lines.append(f"  {r.degree:>6}  {r.cochains:>8}  {r.dim:>3}  {r.status}")
    return lines


THEORIES = ("hh", "hh+", "hh-", "hc", "hd+", "hd-", "cycder", "cycder+", "cycder-")


FAMILIES = {
    "hh": ("hh", "hh+", "hh-"),
    "hc": ("hc", "hd+", "hd-"),
    "cycder": ("cycder", "cycder+", "cycder-"),
}


def _family(which: str) -> tuple:
    for fam in FAMILIES.values():
        if which in fam:
            return fam
    raise ValueError(which)


def _complexes(S, which: str, window, split: bool) -> dict:
    """The requested complex, or with ``split`` its whole family."""
    fam = _family(which)
    want_pm = split or which != fam[0]
    if fam[0] == "hh":
        full = cohom.hochschild_complex(S, window)
        pm = cohom.hochschild_pm_complexes(S, window) if want_pm else None
    elif fam[0] == "hc":
        full = cohom.cyclic_complex(S, window)
        pm = cohom.dihedral_complexes(S, window) if want_pm else None
    else:
        full, plus, minus = cohom.cyclic_derivation_complexes(S, window, split=want_pm)
        pm = (plus, minus)
        if want_pm and plus is None:
            raise StructureError("the +/- split needs an involution")
    out = {fam[0]: full}
    if want_pm:
        out[fam[1]], out[fam[2]] = pm
    return out


def cmd_cohomology(desc: Description, args) -> Outcome:
    S = desc.build(args.max_weight)
    window = args.degrees or (desc.window if args.max_weight is None else (desc.window[0], S.N))
    out = Outcome("cohomology", S.N)
    parts = _complexes(S, args.which, window, args.decompose)
    names = list(_family(args.which)) if args.decompose else [args.which]
    tables = {}
    for name in names:
        C = parts[name]
        if args.filtration:
            C = cohom.filtration_piece(C, args.filtration)
        t = cohom.cohomology_dims(C, probe=not args.no_probe)
        tables[name] = t
        out.sections.append((name, t.to_dict()))
        out.lines.extend(_table_lines(t))
    if args.decompose:
        full, plus, minus = (tables[n] for n in names)
        bad = [k for k in full.dims() if full[k] != plus[k] + minus[k]]
        out.ok = not bad
        out.sections.append(("additivity", {"ok": not bad, "failing_degrees": bad}))
        out.lines.append("additivity " + ("OK" if not bad else f"FAILS in degrees {bad}"))
    return out


FLAVOR_ALIASES = {
    "plain": deform.PLAIN,
    "inv": deform.INVOLUTIVE,
    "cyc": deform.CYCLIC,
    "cycinv": deform.CYCLIC_INVOLUTIVE,
}


def _moduli_reference(S: AInftyStructure, flavor: str) -> tuple[str, int]:
    if flavor in (deform.PLAIN, deform.INVOLUTIVE):
        k = 2
        if flavor == deform.PLAIN:
            C, label = cohom.hochschild_complex(S, (1, 3)), "HH^2(>=1)"
        else:
            C, label = cohom.hochschild_pm_complexes(S, (1, 3))[0], "HH+^2(>=1)"
    else:
        d = S.V.form.degree
        k = d + 2
        big = S.retruncate(S.N + 1)
        if flavor == deform.CYCLIC:
            C, label = cohom.cyclic_complex(big, (k - 1, k + 1)), f"HC^{k}(>=1)"
        else:
            C, label = cohom.dihedral_complexes(big, (k - 1, k + 1))[0], f"HD+^{k}(>=1)"
    return label, cohom.cohomology_dims(cohom.filtration_piece(C, 1), probe=False)[k]


def cmd_deform(desc: Description, args) -> Outcome:
    S = desc.build(args.max_weight)
    flavor = FLAVOR_ALIASES[args.flavor]
    out = Outcome("deform " + args.action, S.N)
    if args.action == "moduli":
        dim = deform.infinitesimal_moduli(S, flavor)
        label, ref = _moduli_reference(S, flavor)
        out.ok = dim == ref
        out.sections.append(("moduli", {"flavor": flavor, "dim": dim, "reference": label, "reference_dim": ref, "match": out.ok}))
        out.lines.append(f"dim = {dim}, {label} = {ref}, {'MATCH' if out.ok else 'MISMATCH'}")
        return out
    block = desc.deformation
    ring_text = args.ring or block.get("ring") or "eps^2"
    ring = parse_ring(ring_text)
    eta = _relement(desc, S, ring, block.get("eta", []), 1, "deformation.eta")
    if args.action == "mc-check":
        rep = deform.mc_check(S, eta, flavor)
        out.ok = rep.ok
        out.sections.append(("mc", {"ring": ring_text, **rep.to_dict()}))
        out.lines.append(f"ring {ring_text}: " + ("MC" if rep.ok else "not MC"))
        out.lines.extend(f"  {f}" for f in rep.failures[:5])
        return out
    y = _relement(desc, S, ring, block.get("gauge", []), 0, "deformation.gauge")
    before = deform.mc_check(S, eta, flavor)
    moved = deform.gauge_action(S, y, eta, flavor)
    after = deform.mc_check(S, moved, flavor)
    same_reduction = deform.reduction(S, moved).m == S.m
    out.ok = (after.ok or not before.ok) and same_reduction
    rows = [
        [ring.format(e), S.V.names[i], [S.V.names[a] for a in w], str(c)]
        for e, x in sorted(moved.terms.items())
        for i, w, c in x.entries()
    ]
    out.sections.append(("gauge", {
        "ring": ring_text, "input_mc": before.ok, "result_mc": after.ok,
        "reduction_unchanged": same_reduction, "result": rows,
    }))
    out.lines.append(f"ring {ring_text}: input {'MC' if before.ok else 'not MC'}, "
                     f"result {'MC' if after.ok else 'not MC'}")
    out.lines.append(f"reduction unchanged: {'yes' if same_reduction else 'no'}")
    for r in rows:
        out.lines.append(f"  {r[0]}: w_{r[1]} -> {_fmt_names(r[2])}  {r[3]}")
    return out


def _fmt_names(names) -> str:
    return "*".join(f"w_{a}" for a in names) or "1"


def cmd_isocheck(desc: Description, args) -> Outcome:
    S = desc.build(args.max_weight)
    window = args.degrees or (desc.window if args.max_weight is None else (desc.window[0], S.N))
    rep = cohom.cc_der_isomorphism(S, window)
    out = Outcome("iso-check", S.N)
    rows = [{"degree": h, "weight": n, "ok": ok} for (h, n), ok in sorted(rep.bijective.items())]
    out.ok = rep.ok
    out.sections.append(("isomorphism", {
        "per_weight": rows, "chain_map": rep.chain_map,
        "plus_minus": rep.plus_minus, "failures": rep.failures,
    }))
    for r in rows:
        out.lines.append(f"degree {r['degree']:>3} weight {r['weight']:>2}  {'OK' if r['ok'] else 'FAIL'}")
    out.lines.append("chain map " + ("OK" if rep.chain_map else "FAILS"))
    if rep.plus_minus is not None:
        out.lines.append("+/- parts match" if rep.plus_minus else "+/- parts do not match")
    out.lines.extend(rep.failures[:10])
    return out


# ----------------------------------------------------------------------------


def _window_arg(text: str):
    a, sep, b = text.partition("..")
    try:
        lo, hi = int(a), int(b if sep else a)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a..b") from None
    if lo > hi:
        raise argparse.ArgumentTypeError("empty degree window")
    return (lo, hi)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dihedra", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("file", help="algebra description (JSON), '-' for stdin")
        sp.add_argument("--format", choices=("table", "json"), default="table")
        sp.add_argument("--max-weight", type=int, default=None, help="truncation N")

    sp = sub.add_parser("validate", help="structure checks")
    common(sp)
    sp = sub.add_parser("cohomology", help="cohomology dimension tables")
    common(sp)
    sp.add_argument("which", nargs="?", choices=THEORIES, default="hh")
    sp.add_argument("--degrees", type=_window_arg, default=None, help="a..b")
    sp.add_argument("--filtration", type=int, default=0)
    sp.add_argument("--decompose", action="store_true")
    sp.add_argument("--no-probe", action="store_true", help="skip the N+1 stability probe")
    sp = sub.add_parser("deform", help="Maurer-Cartan, gauge and moduli")
    common(sp)
    sp.add_argument("action", choices=("mc-check", "gauge", "moduli"))
    sp.add_argument("--ring", default=None, help="e.g. eps^3")
    sp.add_argument("--flavor", choices=tuple(FLAVOR_ALIASES), default="plain")
    sp = sub.add_parser("iso-check", help="cyclic derivations vs cyclic complex")
    common(sp)
    sp.add_argument("--degrees", type=_window_arg, default=None, help="a..b")
    return p


COMMANDS = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "deform": cmd_deform,
    "iso-check": cmd_isocheck,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.file == "-":
            text = sys.stdin.read()
        else:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    try:
        desc = load(text)
        if args.max_weight is not None and args.max_weight < 1:
            raise InputError("--max-weight must be positive")
        outcome = COMMANDS[args.command](desc, args)
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (StructureError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if args.format == "json":
        print(json.dumps(outcome.to_dict(), indent=2, sort_keys=True, default=str))
    else:
        print(f"{outcome.command}  N={outcome.N}")
        for line in outcome.lines:
            print(line)
        print("OK" if outcome.ok else "FAILED")
    return EXIT_OK if outcome.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
