"""Incidence algebras of finite graded posets over Z[x], kernels,
Kazhdan-Lusztig-Stanley functions and Chow polynomials.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .monopath import ch_faces
from .oriented import (
    OrientedPolytope,
    induced_on_face,
    interval_face,
    require_stratified,
    vertex_poset,
)


class PosetAlgebraError(Exception):
    pass


class NotInvertible(PosetAlgebraError):
    def __init__(self, s):
        super().__init__(f"diagonal entry at {s!r} is not a unit")
        self.s = s


class DegreeExceedsRank(PosetAlgebraError):
    def __init__(self, s, t):
        super().__init__(f"degree of the entry on [{s!r}, {t!r}] exceeds the rank of the interval")
        self.s, self.t = s, t


class NotDivisible(PosetAlgebraError):
    def __init__(self, s, t):
        super().__init__(f"entry on [{s!r}, {t!r}] is not divisible by x - 1")
        self.s, self.t = s, t


class NoSolution(PosetAlgebraError):
    pass


class NotPalindromic(PosetAlgebraError):
    pass


# ---------------------------------------------------------------- polynomials


class IntPoly:
    """Polynomial with integer coefficients, ``coeffs[i]`` the coefficient of x^i."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [int(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def const(cls, a: int) -> IntPoly:
        return cls((a,))

    @classmethod
    def monomial(cls, k: int, a: int = 1) -> IntPoly:
        return cls((0,) * k + (a,))

    @classmethod
    def x_minus_1_pow(cls, k: int) -> IntPoly:
        return cls(comb(k, i) * (-1) ** (k - i) for i in range(k + 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return IntPoly(-a for a in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly(a * other for a in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = IntPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, x):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def reversed_to(self, d: int) -> IntPoly:
        """x^d p(1/x); requires deg p <= d."""
        if self.degree > d:
            raise ValueError("degree exceeds the reversal degree")
        return IntPoly(self[d - i] for i in range(d + 1))

    def div_x_minus_1(self) -> IntPoly | None:
        """Exact quotient by x - 1, or None if it does not divide."""
        if not self.coeffs:
            return IntPoly()
        # synthetic division by the root 1, from the top coefficient down
        n = self.degree
        q = [0] * n
        carry = 0
        for i in range(n, 0, -1):
            carry = self.coeffs[i] + carry
            q[i - 1] = carry
        if self.coeffs[0] + carry != 0:
            return None
        return IntPoly(q)

    def to_list(self) -> list[int]:
        return list(self.coeffs)

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            a = self.coeffs[i]
            if not a:
                continue
            mag = abs(a)
            body = "" if (mag == 1 and i) else str(mag)
            if i:
                body += "x" if i == 1 else f"x^{i}"
            terms.append(("-" if a < 0 else "+", body))
        text = "".join(f" {s} {b}" for s, b in terms).strip()
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


X = IntPoly.monomial(1)
ONE = IntPoly.const(1)
ZERO = IntPoly()


# ---------------------------------------------------------------- posets


class GradedPoset:
    """Finite poset with a monotone rank function.

    ``leq`` is the full (reflexive, transitive) order relation as a set of
    pairs.  Elements are kept in a linear extension sorted by ``(rank, id)``.
    """

    def __init__(self, elements, leq, rank: dict):
        self.rank = dict(rank)
        self.elements = tuple(sorted(elements, key=lambda e: (self.rank[e], e)))
        self.leq = frozenset(leq)
        self.pos = {e: i for i, e in enumerate(self.elements)}
        self.above = {s: [t for t in self.elements if (s, t) in self.leq] for s in self.elements}
        self.below = {t: [s for s in self.elements if (s, t) in self.leq] for t in self.elements}
        for s, t in self.leq:
            if self.rank[s] > self.rank[t]:
                raise PosetAlgebraError(f"rank decreases from {s!r} to {t!r}")

    def le(self, s, t) -> bool:
        return (s, t) in self.leq

    def rho(self, s, t) -> int:
        return self.rank[t] - self.rank[s]

    def intervals(self) -> list[tuple]:
        """All pairs s <= t, shorter intervals first."""
        return sorted(self.leq, key=lambda p: (len(self.between(*p)), self.pos[p[0]], self.pos[p[1]]))

    def between(self, s, t) -> list:
        up = set(self.above[s])
        return [w for w in self.below[t] if w in up]

    def covers(self) -> list[tuple]:
        out = []
        for s, t in sorted(self.leq, key=lambda p: (self.pos[p[0]], self.pos[p[1]])):
            if s != t and len(self.between(s, t)) == 2:
                out.append((s, t))
        return out

    @property
    def graded(self) -> bool:
        return all(self.rho(s, t) == 1 for s, t in self.covers())

    def bottom(self):
        mins = [s for s in self.elements if len(self.below[s]) == 1]
        return mins[0] if len(mins) == 1 else None

    def top(self):
        maxs = [s for s in self.elements if len(self.above[s]) == 1]
        return maxs[0] if len(maxs) == 1 else None


class IncElem:
    """Element of the incidence algebra: a polynomial per interval."""

    def __init__(self, poset: GradedPoset, values: dict | None = None):
        self.poset = poset
        self.values = {k: v for k, v in (values or {}).items() if v}

    def __getitem__(self, st) -> IntPoly:
        return self.values.get(st, ZERO)

    def __eq__(self, other):
        return isinstance(other, IncElem) and self.poset is other.poset and self.values == other.values

    def __add__(self, other):
        keys = set(self.values) | set(other.values)
        return IncElem(self.poset, {k: self[k] + other[k] for k in keys})

    def __neg__(self):
        return IncElem(self.poset, {k: -v for k, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        X_ = self.poset
        out = {}
        for s, t in X_.leq:
            acc = ZERO
            for w in X_.between(s, t):
                a = self.values.get((s, w))
                if a:
                    b = other.values.get((w, t))
                    if b:
                        acc = acc + a * b
            out[(s, t)] = acc
        return IncElem(X_, out)

    def first_difference(self, other):
        for st in self.poset.intervals():
            if self[st] != other[st]:
                return st
        return None

    def to_json(self) -> dict:
        return {f"{s},{t}": self[(s, t)].to_list() for s, t in self.poset.intervals()}


def identity(X_: GradedPoset) -> IncElem:
    return IncElem(X_, {(s, s): ONE for s in X_.elements})


def zeta(X_: GradedPoset) -> IncElem:
    return IncElem(X_, {st: ONE for st in X_.leq})


def invert(a: IncElem) -> IncElem:
    """Two-sided inverse by triangular substitution along intervals."""
    X_ = a.poset
    b = {}
    for s in X_.elements:
        d = a[(s, s)]
        if d not in (ONE, -ONE):
            raise NotInvertible(s)
        b[(s, s)] = d
    for s, t in X_.intervals():
        if s == t:
            continue
        acc = ZERO
        for w in X_.between(s, t):
            if w != s:
                acc = acc + a[(s, w)] * b[(w, t)]
        b[(s, t)] = -(a[(s, s)] * acc)
    return IncElem(X_, b)


def in_i_rho(a: IncElem) -> tuple | None:
    """First interval whose entry has degree above its rank, or None."""
    X_ = a.poset
    for s, t in X_.intervals():
        if a[(s, t)].degree > X_.rho(s, t):
            return (s, t)
    return None


def rev(a: IncElem) -> IncElem:
    X_ = a.poset
    bad = in_i_rho(a)
    if bad is not None:
        raise DegreeExceedsRank(*bad)
    return IncElem(X_, {(s, t): a[(s, t)].reversed_to(X_.rho(s, t)) for s, t in X_.leq})


def mobius(X_: GradedPoset) -> IncElem:
    mu = {}
    for s, t in X_.intervals():
        if s == t:
            mu[(s, t)] = 1
        else:
            mu[(s, t)] = -sum(mu[(s, w)] for w in X_.between(s, t) if w != t)
    return IncElem(X_, {k: IntPoly.const(v) for k, v in mu.items()})


def char_kernel(X_: GradedPoset) -> IncElem:
    """chi_st = sum over s <= w <= t of mu_sw x^(rho_wt)."""
    mu = mobius(X_)
    out = {}
    for s, t in X_.leq:
        acc = ZERO
        for w in X_.between(s, t):
            acc = acc + mu[(s, w)] * IntPoly.monomial(X_.rho(w, t))
        out[(s, t)] = acc
    chi = IncElem(X_, out)
    assert chi == mu * rev(zeta(X_))
    return chi


@dataclass(frozen=True)
class KernelCheck:
    ok: bool
    interval: tuple | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def is_kernel(kappa: IncElem) -> KernelCheck:
    X_ = kappa.poset
    for s in X_.elements:
        if kappa[(s, s)] != ONE:
            return KernelCheck(False, (s, s), "diagonal entry is not 1")
    bad = in_i_rho(kappa)
    if bad is not None:
        return KernelCheck(False, bad, "degree exceeds rank")
    diff = invert(kappa).first_difference(rev(kappa))
    if diff is not None:
        return KernelCheck(False, diff, "inverse differs from reversal")
    for s, t in X_.intervals():
        if s != t and kappa[(s, t)].div_x_minus_1() is None:
            return KernelCheck(False, (s, t), "not divisible by x - 1")
    return KernelCheck(True)


def reduced_kernel(kappa: IncElem) -> IncElem:
    X_ = kappa.poset
    out = {}
    for s, t in X_.leq:
        if s == t:
            out[(s, t)] = -ONE
        else:
            q = kappa[(s, t)].div_x_minus_1()
            if q is None:
                raise NotDivisible(s, t)
            out[(s, t)] = q
    return IncElem(X_, out)


def chow_polynomial(kappa: IncElem) -> IncElem:
    """H = -(reduced kernel)^(-1), checked against both recursions."""
    X_ = kappa.poset
    kb = reduced_kernel(kappa)
    H = -invert(kb)
    for s, t in X_.leq:
        if s == t:
            assert H[(s, t)] == ONE
            continue
        mid = X_.between(s, t)
        left = sum((kb[(s, w)] * H[(w, t)] for w in mid if w != s), ZERO)
        right = sum((H[(s, w)] * kb[(w, t)] for w in mid if w != t), ZERO)
        assert H[(s, t)] == left == right, f"Chow recursion fails on [{s}, {t}]"
    return H


def _solve_low(q: IntPoly, rho: int) -> IntPoly:
    """The f with deg f < rho/2 and x^rho f(1/x) - f = q, if any."""
    f = IntPoly(q[rho - i] for i in range((rho + 1) // 2))
    if f.reversed_to(rho) - f != q:
        raise NoSolution(f"no low-degree solution for {q} at rank {rho}")
    return f


def kls_functions(kappa: IncElem) -> tuple[IncElem, IncElem]:
    """Right and left KLS functions: rev(f) = kappa f, rev(g) = g kappa."""
    X_ = kappa.poset
    f, g = {}, {}
    for s, t in X_.intervals():
        if s == t:
            f[(s, t)] = g[(s, t)] = ONE
            continue
        mid = X_.between(s, t)
        qf = sum((kappa[(s, w)] * f[(w, t)] for w in mid if w != s), ZERO)
        qg = sum((g[(s, w)] * kappa[(w, t)] for w in mid if w != t), ZERO)
        f[(s, t)] = _solve_low(qf, X_.rho(s, t))
        g[(s, t)] = _solve_low(qg, X_.rho(s, t))
    F_, G_ = IncElem(X_, f), IncElem(X_, g)
    if rev(F_) != kappa * F_ or rev(G_) != G_ * kappa:
        raise NoSolution("KLS identity fails; the input is not a kernel")
    return F_, G_


# ---------------------------------------------------------------- polytope kernels


def vertex_graded_poset(op: OrientedPolytope) -> GradedPoset:
    a = require_stratified(op)
    vp = vertex_poset(op, a.bb, a.rel, a.report)
    return GradedPoset(vp.elements, vp.leq, vp.rank)


def polytope_kernel(op: OrientedPolytope, X_: GradedPoset | None = None) -> IncElem:
    """kappa_vw = sum of (x-1)^dim F over faces F with min v and max w.

    On the diagonal the vertex itself is the only such face, giving 1.
    """
    X_ = X_ or vertex_graded_poset(op)
    out = {(v, v): ONE for v in X_.elements}
    for i, f in enumerate(op.lattice.faces):
        if f.dim >= 1:
            st = (op.face_min[i], op.face_max[i])
            assert st in X_.leq
            out[st] = out.get(st, ZERO) + IntPoly.x_minus_1_pow(f.dim)
    return IncElem(X_, out)


def face_poset(op_or_lattice) -> GradedPoset:
    """Nonempty faces ordered by inclusion, ranked by dimension."""
    L = getattr(op_or_lattice, "lattice", op_or_lattice)
    faces = [f for f in L.faces if f.vertices]
    leq = {(g.vertices, f.vertices) for f in faces for g in faces if g.vset <= f.vset}
    return GradedPoset([f.vertices for f in faces], leq, {f.vertices: f.dim for f in faces})


def face_kernel(Y: GradedPoset) -> IncElem:
    """lambda_GF = (x-1)^(dim F - dim G), a kernel on any Eulerian poset."""
    return IncElem(Y, {(s, t): IntPoly.x_minus_1_pow(Y.rho(s, t)) for s, t in Y.leq})


# ---------------------------------------------------------------- h-polynomials


def h_polynomial_dual(L) -> IntPoly:
    """h-polynomial of the polar of the polytope whose face lattice is L.

    Only the f-vector enters: h = sum over i of f_i (x-1)^i, the sum over
    nonempty faces of L.
    """
    fv = L.f_vector()[1:]
    return sum((IntPoly.x_minus_1_pow(i) * n for i, n in enumerate(fv)), ZERO)


@dataclass(frozen=True)
class MainTheoremReport:
    results: dict  # (v, w) -> (H_vw, h of the dual path polytope, equal?)

    @property
    def ok(self) -> bool:
        return all(eq for _, _, eq in self.results.values())

    def to_json(self) -> dict:
        return {
            f"{v},{w}": {"H": H.to_list(), "h": h.to_list(), "equal": eq}
            for (v, w), (H, h, eq) in sorted(self.results.items())
        }


def verify_main_theorem(op: OrientedPolytope, H: IncElem | None = None) -> MainTheoremReport:
    """Compare H_vw with the dual h-polynomial of CH(F+(v) /\\ F-(w)) on every interval."""
    X_ = H.poset if H is not None else vertex_graded_poset(op)
    H = H if H is not None else chow_polynomial(polytope_kernel(op, X_))
    results = {}
    for v, w in X_.intervals():
        if v == w:
            h = ONE
        else:
            sub = induced_on_face(op, interval_face(op, v, w))
            h = h_polynomial_dual(ch_faces(sub))
        results[(v, w)] = (H[(v, w)], h, H[(v, w)] == h)
    return MainTheoremReport(results)


# ---------------------------------------------------------------- shape


def gamma_vector(p: IntPoly, d: int) -> list[int]:
    """gamma_i with p = sum gamma_i x^i (1+x)^(d-2i)."""
    if not is_palindromic(p, d):
        raise NotPalindromic(f"{p} is not palindromic of degree {d}")
    rest = p
    gammas = []
    for i in range(d // 2 + 1):
        c = rest[i]
        gammas.append(c)
        rest = rest - IntPoly.monomial(i, c) * (X + 1) ** (d - 2 * i)
    assert not rest
    return gammas


def is_palindromic(p: IntPoly, d: int) -> bool:
    return p.degree <= d and all(p[i] == p[d - i] for i in range(d + 1))


def is_unimodal(p: IntPoly) -> bool:
    c = list(p.coeffs)
    i = 0
    while i + 1 < len(c) and c[i] <= c[i + 1]:
        i += 1
    while i + 1 < len(c) and c[i] >= c[i + 1]:
        i += 1
    return i + 1 >= len(c)


def shape_checks(p: IntPoly, d: int) -> dict:
    pal = is_palindromic(p, d)
    gam = gamma_vector(p, d) if pal else None
    return {
        "nonnegative": all(a >= 0 for a in p.coeffs),
        "palindromic": pal,
        "unimodal": is_unimodal(p),
        "gamma": gam,
        "gammaPositive": gam is not None and all(g >= 0 for g in gam),
    }
