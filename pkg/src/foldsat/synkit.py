"""Variables, contexts and the formula AST.

Variables carry their projections structurally: a variable of a dependent
sort embeds the variables it projects to, so dependency closure and
boundary computations need no external table.  Formulas are immutable
trees; atoms and the generated-equivalence node identify their argument
variable only through its boundary, matching the convention that
``R(a) == R(b)`` up to alpha whenever the boundaries agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import (FunctorialityError, IllFormedContext, SortMismatch,
                     UnknownSort)
from .sigcore import Arrow, Signature


@dataclass(frozen=True)
class Variable:
    """A typed variable with structural projections.

    ``proj`` assigns a variable to every generating arrow out of ``sort``,
    in declaration order.  Equality is structural, so two occurrences of
    "the same" variable compare equal.
    """

    name: str
    sort: str
    proj: tuple = ()  # tuple of (generator name, Variable)

    def proj_map(self):
        return dict(self.proj)

    def proj_along(self, arrow: Arrow) -> "Variable":
        v = self
        for g in arrow.path:
            v = v.proj_map()[g]
        return v

    def dep(self) -> frozenset:
        """dep(x): x together with all its (transitive) projections."""
        out = {self}
        for _, v in self.proj:
            out |= v.dep()
        return frozenset(out)

    def boundary(self) -> frozenset:
        return self.dep() - {self}

    def __repr__(self):
        if not self.proj:
            return f"{self.name}:{self.sort}"
        args = ",".join(v.name for _, v in self.proj)
        return f"{self.name}:{self.sort}({args})"


def mk_var(sig: Signature, name: str, sort: str, fillers=None) -> Variable:
    """Build and validate a variable of ``sort``.

    ``fillers`` maps each generating arrow name out of ``sort`` to an
    already-built variable.  Validation checks sorts and that equal paths
    out of ``sort`` project to the same variable.
    """
    if sort not in sig.levels:
        raise UnknownSort(sort)
    fillers = fillers or {}
    gens = sig.out_gens(sort)
    proj = []
    for g in gens:
        if g.name not in fillers:
            raise FunctorialityError(
                f"missing filler for position {g.name} of {sort}")
        v = fillers[g.name]
        if v.sort != g.cod:
            raise SortMismatch(
                f"position {g.name} of {sort} needs sort {g.cod}, "
                f"got {v.sort}")
        proj.append((g.name, v))
    extra = set(fillers) - {g.name for g in gens}
    if extra:
        raise FunctorialityError(f"unknown positions for {sort}: {extra}")
    var = Variable(name, sort, tuple(proj))
    # equal paths must yield equal projections
    for arrow in sig.out(sort):
        results = {_walk(var, p) for p in sig.class_members(arrow)}
        if len(results) != 1:
            raise FunctorialityError(
                f"variable {name}:{sort} breaks equation on class "
                f"{arrow.name}")
    return var


def _walk(var: Variable, path) -> Variable:
    v = var
    for g in path:
        v = v.proj_map()[g]
    return v


# -- contexts -----------------------------------------------------------

def union_contexts(*ctxs) -> frozenset:
    out = frozenset()
    for c in ctxs:
        out |= c
    return out


def is_context(ctx) -> bool:
    """A context is a finite set of variables closed under projections."""
    return all(v in ctx for x in ctx for _, v in x.proj)


def context_of(vars_) -> frozenset:
    """Projection closure of a set of variables."""
    out = frozenset()
    for v in vars_:
        out |= v.dep()
    return out


# -- formulas -----------------------------------------------------------

class Formula:
    """Base class for formula nodes."""

    def free_vars(self) -> frozenset:
        raise NotImplementedError


@dataclass(frozen=True)
class Top(Formula):
    def free_vars(self):
        return frozenset()


@dataclass(frozen=True)
class Bottom(Formula):
    def free_vars(self):
        return frozenset()


@dataclass(frozen=True)
class Atom(Formula):
    """R(a) for a level-1 sort R: sugar for the truncated inhabitation of
    the fiber over the boundary of ``var``."""

    var: Variable

    def free_vars(self):
        return self.var.boundary()


@dataclass(frozen=True)
class And(Formula):
    args: tuple

    def free_vars(self):
        return union_contexts(*(a.free_vars() for a in self.args))


@dataclass(frozen=True)
class Or(Formula):
    args: tuple

    def free_vars(self):
        return union_contexts(*(a.free_vars() for a in self.args))


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula

    def free_vars(self):
        return self.lhs.free_vars() | self.rhs.free_vars()


@dataclass(frozen=True)
class Iff(Formula):
    lhs: Formula
    rhs: Formula

    def free_vars(self):
        return self.lhs.free_vars() | self.rhs.free_vars()


@dataclass(frozen=True)
class Forall(Formula):
    var: Variable
    body: Formula

    def free_vars(self):
        return (self.body.free_vars() | self.var.boundary()) - {self.var}


@dataclass(frozen=True)
class Exists(Formula):
    var: Variable
    body: Formula
    untruncated: bool = False

    def free_vars(self):
        return (self.body.free_vars() | self.var.boundary()) - {self.var}


@dataclass(frozen=True)
class Equiv(Formula):
    """Generated-equivalence reference ``K(a) ~= K(b)``.

    ``alpha`` and ``beta`` are variables of sort ``sort`` used only for
    their boundaries; the node expands per the generated three-conjunct
    definition (see isogen.expand_equiv).
    """

    sort: str
    alpha: Variable
    beta: Variable

    def free_vars(self):
        return self.alpha.boundary() | self.beta.boundary()


def conj(args) -> Formula:
    args = tuple(args)
    if not args:
        return Top()
    if len(args) == 1:
        return args[0]
    return And(args)


# -- substitution -------------------------------------------------------

def all_var_names(phi: Formula):
    names = set()

    def rec_var(v):
        names.add(v.name)
        for _, w in v.proj:
            rec_var(w)

    def rec(f):
        if isinstance(f, Atom):
            rec_var(f.var)
        elif isinstance(f, (And, Or)):
            for a in f.args:
                rec(a)
        elif isinstance(f, (Implies, Iff)):
            rec(f.lhs)
            rec(f.rhs)
        elif isinstance(f, (Forall, Exists)):
            rec_var(f.var)
            rec(f.body)
        elif isinstance(f, Equiv):
            rec_var(f.alpha)
            rec_var(f.beta)

    rec(phi)
    return names


def fresh_names(prefix, used):
    for i in itertools.count(1):
        cand = f"{prefix}{i}"
        if cand not in used:
            used.add(cand)
            yield cand


def map_var(v: Variable, s: dict) -> Variable:
    if v in s:
        return s[v]
    proj = tuple((g, map_var(w, s)) for g, w in v.proj)
    if proj == v.proj:
        return v
    return Variable(v.name, v.sort, proj)


def substitute(phi: Formula, s: dict) -> Formula:
    """Capture-avoiding substitution of free variables along ``s``.

    ``s`` maps variables to variables; it must commute with projections on
    its domain (a context morphism).  Bound variables are freshened when
    their name collides with a name in the image.
    """
    taken = set()
    for v in s.values():
        for w in v.dep():
            taken.add(w.name)

    def rec(f, s):
        if isinstance(f, (Top, Bottom)):
            return f
        if isinstance(f, Atom):
            return Atom(map_var(f.var, s))
        if isinstance(f, And):
            return And(tuple(rec(a, s) for a in f.args))
        if isinstance(f, Or):
            return Or(tuple(rec(a, s) for a in f.args))
        if isinstance(f, Implies):
            return Implies(rec(f.lhs, s), rec(f.rhs, s))
        if isinstance(f, Iff):
            return Iff(rec(f.lhs, s), rec(f.rhs, s))
        if isinstance(f, Equiv):
            return Equiv(f.sort, map_var(f.alpha, s), map_var(f.beta, s))
        if isinstance(f, (Forall, Exists)):
            name = f.var.name
            if name in taken:
                i = 1
                while f"{name}_{i}" in taken:
                    i += 1
                name = f"{name}_{i}"
            taken.add(name)
            proj = tuple((g, map_var(w, s)) for g, w in f.var.proj)
            newvar = Variable(name, f.var.sort, proj)
            s2 = dict(s)
            s2[f.var] = newvar
            body = rec(f.body, s2)
            if isinstance(f, Forall):
                return Forall(newvar, body)
            return Exists(newvar, body, f.untruncated)
        raise TypeError(f"unknown node {f!r}")

    return rec(phi, s)


# -- alpha and contextual equivalence -----------------------------------

def _var_eq(v: Variable, w: Variable, env: dict) -> bool:
    """Equality of variables modulo the bound-variable pairing ``env``."""
    if v in env:
        return env[v] == w
    if w in set(env.values()):
        return False
    if v.sort != w.sort or v.name != w.name:
        return False
    if len(v.proj) != len(w.proj):
        return False
    return all(g1 == g2 and _var_eq(a, b, env)
               for (g1, a), (g2, b) in zip(v.proj, w.proj))


def _boundary_eq(v: Variable, w: Variable, env: dict) -> bool:
    """Boundaries equal modulo ``env`` (the top name is irrelevant)."""
    if v.sort != w.sort or len(v.proj) != len(w.proj):
        return False
    return all(g1 == g2 and _var_eq(a, b, env)
               for (g1, a), (g2, b) in zip(v.proj, w.proj))


def alpha_eq(phi: Formula, psi: Formula) -> bool:
    """Equality up to renaming of bound variables."""

    def rec(f, g, env):
        if type(f) is not type(g):
            return False
        if isinstance(f, (Top, Bottom)):
            return True
        if isinstance(f, Atom):
            return _boundary_eq(f.var, g.var, env)
        if isinstance(f, (And, Or)):
            return (len(f.args) == len(g.args)
                    and all(rec(a, b, env)
                            for a, b in zip(f.args, g.args)))
        if isinstance(f, (Implies, Iff)):
            return rec(f.lhs, g.lhs, env) and rec(f.rhs, g.rhs, env)
        if isinstance(f, Equiv):
            return (f.sort == g.sort
                    and _boundary_eq(f.alpha, g.alpha, env)
                    and _boundary_eq(f.beta, g.beta, env))
        if isinstance(f, (Forall, Exists)):
            if isinstance(f, Exists) and f.untruncated != g.untruncated:
                return False
            if not _boundary_eq(f.var, g.var, env):
                return False
            env2 = dict(env)
            env2[f.var] = g.var
            return rec(f.body, g.body, env2)
        raise TypeError(f"unknown node {f!r}")

    return rec(phi, psi, {})


def ctx_eq(phi: Formula, psi: Formula):
    """Contextual equivalence: a renaming iso of the free-variable
    contexts making the formulas alpha-equal, or None."""
    fv1 = sorted(context_of(phi.free_vars()),
                 key=lambda v: (len(v.dep()), v.sort, v.name))
    fv2 = list(context_of(psi.free_vars()))
    if len(fv1) != len(fv2):
        return None

    def extend(i, s):
        if i == len(fv1):
            if alpha_eq(substitute(phi, s), psi):
                return dict(s)
            return None
        v = fv1[i]
        for w in fv2:
            if w in s.values() or w.sort != v.sort:
                continue
            # naturality: projections must already be mapped correctly
            ok = True
            for (g, a) in v.proj:
                if s.get(a) != w.proj_map()[g]:
                    ok = False
                    break
            if not ok:
                continue
            s[v] = w
            res = extend(i + 1, s)
            if res is not None:
                return res
            del s[v]
        return None

    return extend(0, {})


# -- universal closure --------------------------------------------------

def universal_closure(sig: Signature, phi: Formula, vars_) -> Formula:
    """Forall-quantify ``vars_`` in dependency order (variables with deeper
    boundaries innermost)."""
    order = sorted(vars_, key=lambda v: (-sig.level(v.sort), v.name))
    out = phi
    for v in reversed(order):
        out = Forall(v, out)
    if not is_context(context_of(out.free_vars())):
        raise IllFormedContext(
            "free variables of the closure are not projection-closed")
    return out


# -- compatible sorts ---------------------------------------------------

def compatible_sorts(sig: Signature, x: Variable) -> tuple:
    """All sorts R strictly above x's sort whose defining equations are
    respected by x's projection coincidences."""
    K = x.sort
    lv = sig.level(K)
    out = []
    for R in sig.sorts:
        if sig.level(R) >= lv:
            continue
        ok = True
        for q in sig.hom(R, K):
            for p1 in sig.out(K):
                for p2 in sig.out(K):
                    if p1.cod != p2.cod:
                        continue
                    if sig.compose(q, p1) == sig.compose(q, p2):
                        if x.proj_along(p1) != x.proj_along(p2):
                            ok = False
            if not ok:
                break
        if ok:
            out.append(R)
    return tuple(out)
