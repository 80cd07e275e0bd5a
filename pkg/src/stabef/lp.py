"""
Exact rational linear programming.

Two-phase primal simplex on a sparse tableau with exact ``mpq`` arithmetic.
Single-variable rows of the form ``-a x <= b`` become lower bounds; variables
without a lower bound are free and, once basic, never leave the basis.
Every optimal answer carries a dual solution, every infeasible answer a
Farkas certificate and every unbounded answer a ray; all three are checked
exactly before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from gmpy2 import mpq

from .extform import ExtForm

ZERO = mpq(0)
ONE = mpq(1)


def _q(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def _f(x) -> Fraction:
    x = mpq(x)
    return Fraction(int(x.numerator), int(x.denominator))


class LPError(RuntimeError):
    """Internal consistency failure (a certificate did not check)."""


@dataclass(frozen=True)
class Optimal:
    value: Fraction
    primal: dict  # variable -> Fraction
    dual_ineq: tuple  # one multiplier per inequality row (>= 0)
    dual_eq: tuple  # one multiplier per equation row


@dataclass(frozen=True)
class Unbounded:
    point: dict
    ray: dict


@dataclass(frozen=True)
class Infeasible:
    dual_ineq: tuple
    dual_eq: tuple


@dataclass(frozen=True)
class LinearProgram:
    form: ExtForm
    objective: dict  # variable -> coefficient
    sense: str = "max"


def _normalise_objective(form: ExtForm, objective: dict) -> dict:
    known = set(form.variables())
    out = {}
    for v, c in objective.items():
        if v not in known:
            raise ValueError(f"objective mentions unknown variable {v!r}")
        if c:
            out[v] = _q(c)
    return out


class Simplex:
    """Simplex session over one constraint system.

    Phase 1 runs once; :meth:`maximize` may then be called repeatedly with
    different objectives, each starting from the previous optimal basis.
    """

    def __init__(self, form: ExtForm, rule: str = "bland"):
        if rule not in ("bland", "dantzig"):
            raise ValueError("rule must be 'bland' or 'dantzig'")
        self.form = form
        self.rule = rule
        self.var_names = list(form.variables())
        self.var_index = {v: i for i, v in enumerate(self.var_names)}
        nv = len(self.var_names)
        # lower bounds from single-variable rows with negative coefficient
        self.lb: list[Optional[mpq]] = [None] * nv
        self.lb_row: list[Optional[int]] = [None] * nv
        body_rows = []
        for k, (coeffs, rhs) in enumerate(form.ineqs):
            if len(coeffs) == 1 and coeffs[0][1] < 0:
                j = self.var_index[coeffs[0][0]]
                bound = _q(rhs) / _q(coeffs[0][1])
                if self.lb[j] is None or bound > self.lb[j]:
                    self.lb[j] = bound
                    self.lb_row[j] = k
                continue
            body_rows.append(("le", k, coeffs, rhs))
        for k, (coeffs, rhs) in enumerate(form.eqs):
            body_rows.append(("eq", k, coeffs, rhs))
        self.free = [self.lb[j] is None for j in range(nv)]
        # internal columns: structural 0..nv-1, then slack / artificial
        self.ncols = nv
        self.rows: list[dict] = []
        self.rhs: list[mpq] = []
        self.basis: list[int] = []
        self.row_info: list[tuple] = []  # (kind, user index, sign, identity col)
        self.artificial: set[int] = set()
        self.slack_of: dict[int, int] = {}
        for kind, k, coeffs, rhs in body_rows:
            row: dict[int, mpq] = {}
            b = _q(rhs)
            for v, c in coeffs:
                j = self.var_index[v]
                c = _q(c)
                row[j] = row.get(j, ZERO) + c
                if self.lb[j] is not None:
                    b -= c * self.lb[j]
            row = {j: c for j, c in row.items() if c != 0}
            sign = 1
            if b < 0:
                sign = -1
                b = -b
                row = {j: -c for j, c in row.items()}
            i = len(self.rows)
            ident = None
            if kind == "le":
                s = self.ncols
                self.ncols += 1
                row[s] = mpq(sign)
                self.slack_of[i] = s
                if sign == 1:
                    ident = s
            if ident is None:
                a = self.ncols
                self.ncols += 1
                row[a] = ONE
                self.artificial.add(a)
                ident = a
            self.rows.append(row)
            self.rhs.append(b)
            self.basis.append(ident)
            self.row_info.append((kind, k, sign, ident))
        self.is_free_col = self.free + [False] * (self.ncols - nv)
        self.colrows: dict[int, set] = {}
        for i, row in enumerate(self.rows):
            for j in row:
                self.colrows.setdefault(j, set()).add(i)
        self.free_rows: set[int] = set()  # rows whose basic variable is free
        self.d: dict[int, mpq] = {}
        self.value = ZERO
        self.phase1_done = False
        self.feasible: Optional[bool] = None
        self.pivots = 0
        self.infeasible_cert: Optional[Infeasible] = None

    # tableau primitives

    def _pivot(self, r: int, j: int) -> None:
        self.pivots += 1
        row_r = self.rows[r]
        piv = row_r[j]
        if piv != 1:
            inv = ONE / piv
            for k in row_r:
                row_r[k] *= inv
            self.rhs[r] *= inv
        rhs_r = self.rhs[r]
        colrows = self.colrows
        for i in list(colrows[j]):
            if i == r:
                continue
            row_i = self.rows[i]
            f = row_i[j]
            for k, v in row_r.items():
                nv_ = row_i.get(k)
                if nv_ is None:
                    row_i[k] = -f * v
                    colrows.setdefault(k, set()).add(i)
                else:
                    nv_ -= f * v
                    if nv_ == 0:
                        del row_i[k]
                        colrows[k].discard(i)
                    else:
                        row_i[k] = nv_
            if rhs_r:
                self.rhs[i] -= f * rhs_r
        f = self.d.get(j)
        if f:
            d = self.d
            for k, v in row_r.items():
                nv_ = d.get(k)
                if nv_ is None:
                    d[k] = -f * v
                else:
                    nv_ -= f * v
                    if nv_ == 0:
                        del d[k]
                    else:
                        d[k] = nv_
            self.value += f * rhs_r
        old = self.basis[r]
        self.basis[r] = j
        if self.is_free_col[j]:
            self.free_rows.add(r)
        elif r in self.free_rows and not self.is_free_col[old]:
            self.free_rows.discard(r)

    def _set_costs(self, cost: dict[int, mpq]) -> None:
        """Reduced costs d_j = c_j - c_B B^-1 A_j and objective value."""
        d = dict(cost)
        value = ZERO
        for i, j in enumerate(self.basis):
            cb = cost.get(j)
            if not cb:
                continue
            value += cb * self.rhs[i]
            for k, v in self.rows[i].items():
                nv_ = d.get(k, ZERO) - cb * v
                if nv_ == 0:
                    d.pop(k, None)
                else:
                    d[k] = nv_
        self.d = d
        self.value = value  # objective = value + sum d_j x_j over nonbasic

    def _choose_entering(self, banned: set) -> Optional[tuple[int, int]]:
        """Entering column and direction (+1 increase, -1 decrease)."""
        best = None
        best_key = None
        basic = self._basic_set
        for j, dj in self.d.items():
            if j in banned or j in basic:
                continue
            if dj < 0:
                direction = 1
            elif dj > 0 and self.is_free_col[j]:
                direction = -1
            else:
                continue
            if self.rule == "bland" or self._degenerate_run > 50:
                key = j
            else:
                key = (-abs(dj), j)
            if best_key is None or key < best_key:
                best_key = key
                best = (j, direction)
        return best

    def _ratio(self, j: int, direction: int) -> Optional[int]:
        best_r = None
        best_t = None
        for i in self.colrows.get(j, ()):
            if i in self.free_rows:
                continue
            a = self.rows[i][j] * direction
            if a <= 0:
                continue
            t = self.rhs[i] / a
            if best_t is None or t < best_t or (t == best_t and self.basis[i] < self.basis[best_r]):
                best_t = t
                best_r = i
        return best_r

    def _run(self, banned: set) -> Optional[tuple[int, int]]:
        """Minimise; returns None at optimum or (col, direction) if unbounded."""
        self._basic_set = set(self.basis)
        self._degenerate_run = 0
        while True:
            ent = self._choose_entering(banned)
            if ent is None:
                return None
            j, direction = ent
            r = self._ratio(j, direction)
            if r is None:
                return ent
            if self.rhs[r] == 0:
                self._degenerate_run += 1
            else:
                self._degenerate_run = 0
            self._basic_set.discard(self.basis[r])
            self._pivot(r, j)
            self._basic_set.add(j)

    # phases

    def phase1(self) -> bool:
        if self.phase1_done:
            return bool(self.feasible)
        self.phase1_done = True
        # move free columns into the basis first where a pivot keeps feasibility
        cost = {a: ONE for a in self.artificial}
        self._set_costs(cost)
        res = self._run(banned=set())
        if res is not None:
            raise LPError("phase 1 cannot be unbounded")
        if self.value > 0:
            self.feasible = False
            self.infeasible_cert = self._farkas()
            return False
        self.feasible = True
        # drive artificial variables out of the basis
        for i, j in enumerate(self.basis):
            if j not in self.artificial:
                continue
            cand = sorted(k for k in self.rows[i] if k not in self.artificial)
            if cand:
                self._pivot(i, cand[0])
        return True

    def _duals(self, art_cost: mpq) -> list[mpq]:
        """Internal row duals pi_i read from the identity columns."""
        pi = []
        for kind, k, sign, ident in self.row_info:
            c = art_cost if ident in self.artificial else ZERO
            pi.append(c - self.d.get(ident, ZERO))
        return pi

    def _user_multipliers(self, pi: list[mpq]) -> tuple[list[mpq], list[mpq]]:
        """mu for user rows (sign convention of the maximisation dual)."""
        y = [ZERO] * len(self.form.ineqs)
        z = [ZERO] * len(self.form.eqs)
        for (kind, k, sign, _), p in zip(self.row_info, pi):
            mu = -sign * p
            if kind == "le":
                y[k] = mu
            else:
                z[k] = mu
        return y, z

    def _add_bound_duals(self, y: list[mpq], z: list[mpq], c: dict[int, mpq]) -> None:
        """Bound rows absorb the remaining column residual."""
        resid = [ZERO] * len(self.var_names)
        for k, (coeffs, _) in enumerate(self.form.ineqs):
            if y[k]:
                for v, a in coeffs:
                    resid[self.var_index[v]] += y[k] * _q(a)
        for k, (coeffs, _) in enumerate(self.form.eqs):
            if z[k]:
                for v, a in coeffs:
                    resid[self.var_index[v]] += z[k] * _q(a)
        for j in range(len(self.var_names)):
            r = resid[j] - c.get(j, ZERO)
            if r == 0:
                continue
            k = self.lb_row[j]
            if k is None:
                raise LPError("free column has nonzero residual")
            a = _q(self.form.ineqs[k][0][0][1])  # negative
            y[k] = -r / a

    def _farkas(self) -> Infeasible:
        pi = self._duals(ONE)
        y, z = self._user_multipliers(pi)
        self._add_bound_duals(y, z, {})
        cert = Infeasible(tuple(_f(v) for v in y), tuple(_f(v) for v in z))
        check_farkas(self.form, cert)
        return cert

    def _primal(self) -> dict:
        vals = [ZERO] * self.ncols
        for i, j in enumerate(self.basis):
            vals[j] = self.rhs[i]
        out = {}
        for j, v in enumerate(self.var_names):
            x = vals[j]
            if self.lb[j] is not None:
                x += self.lb[j]
            out[v] = _f(x)
        return out

    def maximize(self, objective: dict, check: bool = True):
        if not self.phase1():
            return self.infeasible_cert
        obj = _normalise_objective(self.form, objective)
        cost = {self.var_index[v]: -c for v, c in obj.items()}
        self._set_costs(cost)
        res = self._run(banned=self.artificial)
        primal = self._primal()
        if res is not None:
            j, direction = res
            ray = {}
            if j < len(self.var_names):
                ray[self.var_names[j]] = _f(direction)
            for i in self.colrows.get(j, ()):
                bj = self.basis[i]
                if bj < len(self.var_names):
                    ray[self.var_names[bj]] = _f(-self.rows[i][j] * direction)
            out = Unbounded(primal, ray)
            if check:
                check_ray(self.form, obj, out)
            return out
        pi = self._duals(ZERO)
        y, z = self._user_multipliers(pi)
        self._add_bound_duals(y, z, {self.var_index[v]: c for v, c in obj.items()})
        value = sum((_q(c) * _q(primal[v]) for v, c in obj.items()), ZERO)
        out = Optimal(_f(value), primal, tuple(_f(v) for v in y), tuple(_f(v) for v in z))
        if check:
            check_optimal(self.form, obj, out)
        return out

    def minimize(self, objective: dict, check: bool = True):
        res = self.maximize({v: -_q(c) for v, c in objective.items()}, check)
        if isinstance(res, Optimal):
            return Optimal(-res.value, res.primal, tuple(-v for v in res.dual_ineq), tuple(-v for v in res.dual_eq))
        if isinstance(res, Unbounded):
            return res
        return res


# certificate checks


def _row_value(coeffs, point) -> Fraction:
    return sum((Fraction(a) * point.get(v, 0) for v, a in coeffs), Fraction(0))


def check_feasible_point(form: ExtForm, point: dict) -> bool:
    for coeffs, rhs in form.ineqs:
        if _row_value(coeffs, point) > rhs:
            return False
    for coeffs, rhs in form.eqs:
        if _row_value(coeffs, point) != rhs:
            return False
    return True


def _combine(form: ExtForm, y, z) -> dict:
    acc: dict = {}
    for (coeffs, _), m in zip(form.ineqs, y):
        if m:
            for v, a in coeffs:
                acc[v] = acc.get(v, 0) + m * a
    for (coeffs, _), m in zip(form.eqs, z):
        if m:
            for v, a in coeffs:
                acc[v] = acc.get(v, 0) + m * a
    return {v: a for v, a in acc.items() if a != 0}


def check_optimal(form: ExtForm, obj: dict, res: Optimal) -> None:
    if not check_feasible_point(form, res.primal):
        raise LPError("primal point infeasible")
    if any(m < 0 for m in res.dual_ineq):
        raise LPError("negative inequality multiplier")
    comb = _combine(form, res.dual_ineq, res.dual_eq)
    want = {v: _f(c) for v, c in obj.items()}
    if comb != {v: c for v, c in want.items() if c}:
        raise LPError("dual multipliers do not reproduce the objective")
    dual_value = sum((m * rhs for m, (_, rhs) in zip(res.dual_ineq, form.ineqs)), Fraction(0))
    dual_value += sum((m * rhs for m, (_, rhs) in zip(res.dual_eq, form.eqs)), Fraction(0))
    if dual_value != res.value:
        raise LPError("strong duality fails")


def check_farkas(form: ExtForm, cert: Infeasible) -> None:
    if any(m < 0 for m in cert.dual_ineq):
        raise LPError("negative Farkas multiplier")
    if _combine(form, cert.dual_ineq, cert.dual_eq):
        raise LPError("Farkas combination is not zero")
    val = sum((m * rhs for m, (_, rhs) in zip(cert.dual_ineq, form.ineqs)), Fraction(0))
    val += sum((m * rhs for m, (_, rhs) in zip(cert.dual_eq, form.eqs)), Fraction(0))
    if val >= 0:
        raise LPError("Farkas right-hand side is not negative")


def check_ray(form: ExtForm, obj: dict, res: Unbounded) -> None:
    if not check_feasible_point(form, res.point):
        raise LPError("unbounded: base point infeasible")
    for coeffs, _ in form.ineqs:
        if _row_value(coeffs, res.ray) > 0:
            raise LPError("ray violates an inequality")
    for coeffs, _ in form.eqs:
        if _row_value(coeffs, res.ray) != 0:
            raise LPError("ray violates an equation")
    if sum((_f(c) * res.ray.get(v, 0) for v, c in obj.items()), Fraction(0)) <= 0:
        raise LPError("ray does not improve the objective")


# convenience


def solve(lp: LinearProgram, rule: str = "bland"):
    s = Simplex(lp.form, rule)
    if lp.sense == "max":
        return s.maximize(lp.objective)
    if lp.sense == "min":
        return s.minimize(lp.objective)
    raise ValueError("sense must be 'max' or 'min'")


def feasible_lift(form: ExtForm, point: dict, rule: str = "bland"):
    """Auxiliary values completing ``point`` (on original variables).

    Returns a dict of auxiliary values, or an :class:`Infeasible`
    certificate for the system with the originals fixed.
    """
    fixed = form.fix_variables(point)
    s = Simplex(fixed, rule)
    if not s.phase1():
        return s.infeasible_cert
    prim = s._primal()
    full = {v: prim[v] for v in form.auxiliaries}
    full.update({v: Fraction(point[v]) for v in form.originals})
    if not check_feasible_point(form, full):
        raise LPError("lift does not satisfy the system")
    return {v: full[v] for v in form.auxiliaries}


def rational_rank(matrix: Sequence[Sequence]) -> int:
    """Rank by fraction-free (Bareiss) elimination over the integers after
    clearing denominators row by row."""
    rows = []
    for r in matrix:
        fr = [Fraction(x) for x in r]
        den = 1
        for x in fr:
            den = den * x.denominator // _gcd(den, x.denominator)
        rows.append([int(x * den) for x in fr])
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][c]
        for i in range(rank + 1, len(rows)):
            a = rows[i][c]
            rows[i] = [(p * rows[i][k] - a * rows[rank][k]) // prev for k in range(ncols)]
        prev = p
        rank += 1
        if rank == len(rows):
            break
    return rank


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# floating-point proposals, exact acceptance


def _rationalize(values, max_den: int) -> list[Fraction]:
    return [Fraction(float(v)).limit_denominator(max_den) for v in values]


class CertifiedLP:
    """Repeated optimization over one system with HiGHS as a proposer.

    Each floating-point primal/dual pair is rounded to nearby rationals and
    accepted only if :func:`check_optimal` (or the lift check) passes in
    exact arithmetic; otherwise the exact simplex answers. The returned
    objects are therefore exactly as trustworthy as those of
    :class:`Simplex`, and usually orders of magnitude cheaper to get.
    """

    def __init__(self, form: ExtForm, max_den: int = 1 << 20, rule: str = "dantzig"):
        import numpy as np
        from scipy.sparse import csr_matrix

        self.form = form
        self.max_den = max_den
        self.rule = rule
        self.names = list(form.variables())
        self.index = {v: i for i, v in enumerate(self.names)}
        self.stats = {"certified": 0, "fallback": 0}
        self._exact: Optional[Simplex] = None

        def mat(rows):
            data, ri, ci = [], [], []
            for r, (coeffs, _) in enumerate(rows):
                for v, a in coeffs:
                    data.append(float(a))
                    ri.append(r)
                    ci.append(self.index[v])
            m = csr_matrix((data, (ri, ci)), shape=(len(rows), len(self.names)))
            return m, np.array([float(rhs) for _, rhs in rows])

        self.A_ub, self.b_ub = mat(form.ineqs) if form.ineqs else (None, None)
        self.A_eq, self.b_eq = mat(form.eqs) if form.eqs else (None, None)
        self._np = np

    def exact(self) -> Simplex:
        if self._exact is None:
            self._exact = Simplex(self.form, self.rule)
            self._exact.phase1()
        return self._exact

    def _linprog(self, c, bounds):
        from scipy.optimize import linprog

        return linprog(
            c, A_ub=self.A_ub, b_ub=self.b_ub, A_eq=self.A_eq, b_eq=self.b_eq, bounds=bounds, method="highs"
        )

    def maximize(self, objective: dict):
        obj = {v: _f(a) for v, a in _normalise_objective(self.form, objective).items()}
        c = self._np.zeros(len(self.names))
        for v, a in obj.items():
            c[self.index[v]] = -float(a)
        try:
            res = self._linprog(c, (None, None))
        except Exception:
            res = None
        if res is not None and res.status == 0:
            x = dict(zip(self.names, _rationalize(res.x, self.max_den)))
            y = _rationalize(-res.ineqlin.marginals, self.max_den) if self.A_ub is not None else []
            z = _rationalize(-res.eqlin.marginals, self.max_den) if self.A_eq is not None else []
            value = sum((Fraction(a) * x[v] for v, a in obj.items()), Fraction(0))
            cand = Optimal(value, x, tuple(y), tuple(z))
            try:
                check_optimal(self.form, obj, cand)
                self.stats["certified"] += 1
                return cand
            except LPError:
                pass
        self.stats["fallback"] += 1
        return self.exact().maximize(obj)

    def lift(self, point: dict):
        """Like :func:`feasible_lift`, with a rounded HiGHS point tried first."""
        bounds = []
        for v in self.names:
            if v in point:
                bounds.append((float(point[v]), float(point[v])))
            else:
                bounds.append((None, None))
        try:
            res = self._linprog(self._np.zeros(len(self.names)), bounds)
        except Exception:
            res = None
        if res is not None and res.status == 0:
            full = dict(zip(self.names, _rationalize(res.x, self.max_den)))
            full.update({v: Fraction(point[v]) for v in self.form.originals})
            if check_feasible_point(self.form, full):
                self.stats["certified"] += 1
                return {v: full[v] for v in self.form.auxiliaries}
        self.stats["fallback"] += 1
        return feasible_lift(self.form, point, self.rule)
