"""
Extended formulations: a rational system over original and auxiliary
variables whose projection onto the originals is the described polyhedron.

Rows are stored as ``(coeffs, rhs)`` with ``coeffs`` a tuple of
``(name, Fraction)`` pairs. Inequalities read ``sum <= rhs`` and equations
``sum == rhs``. The size of a formulation is its number of inequalities.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

Row = tuple  # (tuple[(str, Fraction)], Fraction)


class FormError(ValueError):
    pass


def make_row(coeffs: Iterable[tuple[str, object]] | Mapping[str, object], rhs) -> Row:
    """Merge repeated variables and drop zero coefficients (first-seen order)."""
    items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
    acc: dict[str, Fraction] = {}
    for v, c in items:
        acc[v] = acc.get(v, Fraction(0)) + Fraction(c)
    return tuple((v, c) for v, c in acc.items() if c != 0), Fraction(rhs)


def _rename_row(row: Row, ren) -> Row:
    coeffs, rhs = row
    return tuple((ren(v), c) for v, c in coeffs), rhs


@dataclass(frozen=True)
class ExtForm:
    originals: tuple
    auxiliaries: tuple
    ineqs: tuple
    eqs: tuple

    def __post_init__(self):
        names = list(self.originals) + list(self.auxiliaries)
        if len(set(names)) != len(names):
            raise FormError("duplicate variable names")
        known = set(names)
        for coeffs, _ in self.ineqs + self.eqs:
            for v, _ in coeffs:
                if v not in known:
                    raise FormError(f"row mentions undeclared variable {v!r}")

    @property
    def size(self) -> int:
        return len(self.ineqs)

    @property
    def num_vars(self) -> int:
        return len(self.originals) + len(self.auxiliaries)

    def variables(self) -> tuple:
        return self.originals + self.auxiliaries

    def fix_variables(self, assignment: Mapping[str, object]) -> "ExtForm":
        return fix_variables(self, assignment)

    def without_ineq(self, k: int) -> "ExtForm":
        return ExtForm(self.originals, self.auxiliaries, self.ineqs[:k] + self.ineqs[k + 1 :], self.eqs)


def simple_form(originals: Sequence[str], ineqs: Iterable[Row] = (), eqs: Iterable[Row] = (), auxiliaries: Sequence[str] = ()) -> ExtForm:
    return ExtForm(tuple(originals), tuple(auxiliaries), tuple(ineqs), tuple(eqs))


# combinators


def rename(form: ExtForm, mapping: Mapping[str, str]) -> ExtForm:
    def ren(v):
        return mapping.get(v, v)

    return ExtForm(
        tuple(ren(v) for v in form.originals),
        tuple(ren(v) for v in form.auxiliaries),
        tuple(_rename_row(r, ren) for r in form.ineqs),
        tuple(_rename_row(r, ren) for r in form.eqs),
    )


def _prefix_all(form: ExtForm, prefix: str) -> tuple[dict, ExtForm]:
    mapping = {v: prefix + v for v in form.variables()}
    return mapping, rename(form, mapping)


def _lambda_implied(form: ExtForm) -> bool:
    """True iff the homogenised system forces its multiplier to be >= 0,
    i.e. {A x <= -b, C x = -d} is infeasible."""
    from .lp import Simplex

    neg = ExtForm(
        form.originals,
        form.auxiliaries,
        tuple((c, -r) for c, r in form.ineqs),
        tuple((c, -r) for c, r in form.eqs),
    )
    return not Simplex(neg).phase1()


def balas_union(forms: Sequence[ExtForm], mode: str = "polytopes", lambda_rows: str = "needed") -> ExtForm:
    """Convex hull of the union of the projections.

    Every branch is copied under the prefix ``u<i>.``, its rows are
    homogenised with a multiplier ``u<i>#lam``, the multipliers sum to one
    and the originals are the sums of the branch copies.

    ``lambda_rows`` controls the rows ``lam >= 0``: ``"all"`` adds them,
    ``"needed"`` omits those implied by the branch system, ``"none"``
    omits them (only sound when negative multiples of every branch fall
    into the hull anyway; the caller must justify this).
    """
    if mode not in ("polytopes", "shared-recession-cone"):
        raise FormError(f"unknown mode {mode!r}")
    if not forms:
        raise FormError("empty union")
    orig = forms[0].originals
    for f in forms[1:]:
        if set(f.originals) != set(orig):
            raise FormError("branches have different original variables")
    if len(forms) == 1:
        return forms[0]
    aux: list[str] = []
    ineqs: list[Row] = []
    eqs: list[Row] = []
    sums: dict[str, list] = {v: [] for v in orig}
    lams = []
    for i, f in enumerate(forms):
        prefix = f"u{i}."
        mapping, g = _prefix_all(f, prefix)
        lam = f"u{i}#lam"
        lams.append(lam)
        aux.extend(g.variables())
        aux.append(lam)
        for coeffs, rhs in g.ineqs:
            ineqs.append(make_row(list(coeffs) + [(lam, -rhs)], 0))
        for coeffs, rhs in g.eqs:
            eqs.append(make_row(list(coeffs) + [(lam, -rhs)], 0))
        if lambda_rows == "all" or (lambda_rows == "needed" and not _lambda_implied(f)):
            ineqs.append(make_row([(lam, -1)], 0))
        for v in orig:
            sums[v].append(mapping[v])
    eqs.append(make_row([(lam, 1) for lam in lams], 1))
    for v in orig:
        eqs.append(make_row([(v, 1)] + [(c, -1) for c in sums[v]], 0))
    ineqs = [r for r in ineqs if r[0] or r[1] < 0]
    eqs = [r for r in eqs if r[0] or r[1] != 0]
    return ExtForm(tuple(orig), tuple(aux), tuple(ineqs), tuple(eqs))


def glue_shared(forms: Sequence[ExtForm], dedupe: bool = True) -> ExtForm:
    """Conjunction of systems that share only original variables."""
    if not forms:
        raise FormError("nothing to glue")
    if len(forms) == 1:
        return forms[0]
    orig: dict[str, None] = {}
    for f in forms:
        for v in f.originals:
            orig[v] = None
    aux: list[str] = []
    ineqs: list[Row] = []
    eqs: list[Row] = []
    for i, f in enumerate(forms):
        clash = set(f.auxiliaries) & set(orig)
        if clash:
            raise FormError(f"variables {sorted(clash)[:3]} are original in one form and auxiliary in another")
        mapping = {v: f"g{i}.{v}" for v in f.auxiliaries}
        g = rename(f, mapping)
        aux.extend(g.auxiliaries)
        ineqs.extend(g.ineqs)
        eqs.extend(g.eqs)
    if dedupe:
        ineqs = list(dict.fromkeys(ineqs))
        eqs = list(dict.fromkeys(eqs))
    return ExtForm(tuple(orig), tuple(aux), tuple(ineqs), tuple(eqs))


def demote(form: ExtForm, names: Iterable[str], prefix: str) -> ExtForm:
    """Turn some original variables into auxiliaries renamed with ``prefix``."""
    names = list(names)
    missing = [v for v in names if v not in form.originals]
    if missing:
        raise FormError(f"cannot demote non-original variables {missing[:3]}")
    mapping = {v: prefix + v for v in names}
    clash = set(mapping.values()) & set(form.variables())
    if clash:
        raise FormError(f"demotion prefix collides with {sorted(clash)[:3]}")
    g = rename(form, mapping)
    keep = tuple(v for v in g.originals if v not in set(mapping.values()))
    return ExtForm(keep, tuple(mapping[v] for v in names) + g.auxiliaries, g.ineqs, g.eqs)


def affine_substitute(
    form: ExtForm,
    mapping: Mapping[str, tuple],
    old_prefix: str = "s.",
    check_surjective: bool = True,
) -> ExtForm:
    """Image of the projection under an affine map.

    ``mapping`` sends each new variable to ``(coeffs over old originals,
    constant)``. The old originals become auxiliaries named with
    ``old_prefix``; the new originals are tied to them by equations. The
    map must be onto the new space (checked by rank); it is injective on
    the projection whenever the projection lies in an affine subspace on
    which the map is invertible, which the caller asserts.
    """
    old = set(form.originals)
    for new, (coeffs, _) in mapping.items():
        for v in coeffs:
            if v not in old:
                raise FormError(f"map for {new!r} uses non-original {v!r}")
    if check_surjective and mapping:
        from .lp import rational_rank

        cols = list(form.originals)
        mat = [[mapping[n][0].get(v, 0) for v in cols] for n in mapping]
        if rational_rank(mat) != len(mapping):
            raise FormError("substitution is not invertible on its image")
    g = demote(form, list(form.originals), old_prefix)
    eqs = list(g.eqs)
    for new, (coeffs, const) in mapping.items():
        eqs.append(make_row([(new, 1)] + [(old_prefix + v, -Fraction(c)) for v, c in coeffs.items()], const))
    new_orig = tuple(mapping)
    clash = set(new_orig) & set(g.auxiliaries)
    if clash:
        raise FormError(f"new variable names collide with {sorted(clash)[:3]}")
    return ExtForm(new_orig, g.auxiliaries, g.ineqs, tuple(eqs))


def intersect_box(form: ExtForm, lower: bool = True, upper: bool = True, names: Optional[Iterable[str]] = None) -> ExtForm:
    names = list(form.originals if names is None else names)
    rows = list(form.ineqs)
    for v in names:
        if lower:
            rows.append(make_row([(v, -1)], 0))
        if upper:
            rows.append(make_row([(v, 1)], 1))
    return ExtForm(form.originals, form.auxiliaries, tuple(rows), form.eqs)


def fix_variables(form: ExtForm, assignment: Mapping[str, object]) -> ExtForm:
    eqs = list(form.eqs)
    for v, val in assignment.items():
        if v not in form.originals:
            raise FormError(f"can only fix original variables, not {v!r}")
        eqs.append(make_row([(v, 1)], val))
    return ExtForm(form.originals, form.auxiliaries, form.ineqs, tuple(eqs))


def reorder_originals(form: ExtForm, order: Sequence[str]) -> ExtForm:
    if set(order) != set(form.originals) or len(order) != len(form.originals):
        raise FormError("order must list exactly the original variables")
    return ExtForm(tuple(order), form.auxiliaries, form.ineqs, form.eqs)


def compact_auxiliaries(form: ExtForm, prefix: str = "a") -> ExtForm:
    """Rename auxiliaries to ``a0, a1, ...`` in declaration order."""
    mapping = {v: f"{prefix}{i}" for i, v in enumerate(form.auxiliaries)}
    if set(mapping.values()) & set(form.originals):
        raise FormError("compact names collide with originals")
    return rename(form, mapping)


# serialisation


def _fmt_row(row: Row, rel: str) -> str:
    coeffs, rhs = row
    parts = []
    for v, c in coeffs:
        parts.append(str(c))
        parts.append(v)
    parts.append(rel)
    parts.append(str(rhs))
    return " ".join(parts)


def format_extform(form: ExtForm, objective: Optional[tuple] = None) -> str:
    lines = ["VARIABLES"]
    lines += [f"{v} original" for v in form.originals]
    lines += [f"{v} auxiliary" for v in form.auxiliaries]
    lines.append("SUBJECT-TO")
    lines += [_fmt_row(r, "<=") for r in form.ineqs]
    lines.append("EQUATIONS")
    lines += [_fmt_row(r, "=") for r in form.eqs]
    lines.append("PROJECTION")
    lines += list(form.originals)
    if objective is not None:
        sense, coeffs = objective
        lines.append("OBJECTIVE")
        parts = [sense]
        for v, c in coeffs.items():
            parts += [str(Fraction(c)), v]
        lines.append(" ".join(parts))
    lines.append("END")
    return "\n".join(lines) + "\n"


def _parse_row(line: str, rel: str) -> Row:
    tok = line.split()
    if len(tok) < 2 or tok[-2] != rel or len(tok) % 2:
        raise FormError(f"bad row {line!r}")
    coeffs = tuple((tok[i + 1], Fraction(tok[i])) for i in range(0, len(tok) - 2, 2))
    return coeffs, Fraction(tok[-1])


def parse_extform_with_objective(text: str) -> tuple[ExtForm, Optional[tuple]]:
    section = None
    orig, aux, ineqs, eqs, proj = [], [], [], [], []
    objective = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line in ("VARIABLES", "SUBJECT-TO", "EQUATIONS", "PROJECTION", "OBJECTIVE", "END"):
            section = line
            continue
        if section == "VARIABLES":
            name, kind = line.split()
            if kind == "original":
                orig.append(name)
            elif kind == "auxiliary":
                aux.append(name)
            else:
                raise FormError(f"bad variable kind {kind!r}")
        elif section == "SUBJECT-TO":
            ineqs.append(_parse_row(line, "<="))
        elif section == "EQUATIONS":
            eqs.append(_parse_row(line, "="))
        elif section == "PROJECTION":
            proj.extend(line.split())
        elif section == "OBJECTIVE":
            tok = line.split()
            if tok[0] not in ("max", "min") or len(tok) % 2 == 0:
                raise FormError("bad objective line")
            objective = (tok[0], {tok[i + 1]: Fraction(tok[i]) for i in range(1, len(tok), 2)})
        else:
            raise FormError(f"text outside a section: {line!r}")
    if proj != orig:
        raise FormError("PROJECTION must list the original variables in order")
    return ExtForm(tuple(orig), tuple(aux), tuple(ineqs), tuple(eqs)), objective


def parse_extform(text: str) -> ExtForm:
    return parse_extform_with_objective(text)[0]


def _json_rows(rows):
    return [{"coeffs": [[v, str(c)] for v, c in coeffs], "rhs": str(rhs)} for coeffs, rhs in rows]


def extform_to_json(form: ExtForm) -> str:
    doc = {
        "originals": list(form.originals),
        "auxiliaries": list(form.auxiliaries),
        "inequalities": _json_rows(form.ineqs),
        "equations": _json_rows(form.eqs),
        "projection": list(form.originals),
    }
    return json.dumps(doc, indent=1) + "\n"


def extform_from_json(text: str) -> ExtForm:
    doc = json.loads(text)

    def rows(key):
        return tuple((tuple((v, Fraction(c)) for v, c in r["coeffs"]), Fraction(r["rhs"])) for r in doc[key])

    if doc["projection"] != doc["originals"]:
        raise FormError("projection must equal the original variables")
    return ExtForm(tuple(doc["originals"]), tuple(doc["auxiliaries"]), rows("inequalities"), rows("equations"))
