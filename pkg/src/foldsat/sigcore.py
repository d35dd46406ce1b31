"""Signatures as finite inverse categories.

A signature is given by sorts, generating arrows and path equations.  All
composite arrows are materialized as paths of generators and identified
modulo the congruence generated by the declared equations, so hom-sets are
exact and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CompositionError, CycleError, NameClashError, UnknownSort

Path = tuple  # tuple of generator names, first-applied generator first


@dataclass(frozen=True)
class Gen:
    """A generating (declared) arrow."""

    name: str
    dom: str
    cod: str


@dataclass(frozen=True)
class Arrow:
    """A hom-class, represented by its canonical generator path.

    The empty path is the identity.  Arrows must be obtained through
    ``Signature.cls`` so that equal paths share one representative; equality
    of ``Arrow`` values then decides equality in the category.
    """

    path: Path
    dom: str
    cod: str

    @property
    def is_identity(self) -> bool:
        return not self.path

    @property
    def name(self) -> str:
        return ".".join(self.path) if self.path else f"1_{self.dom}"

    def __repr__(self):
        return f"<{self.name}: {self.dom}->{self.cod}>"


@dataclass(frozen=True)
class LevelMap:
    levels: dict
    height: int

    def __getitem__(self, sort):
        return self.levels[sort]


class Signature:
    """A validated finite inverse category.

    Immutable after construction; build instances through
    :func:`validate_signature`.
    """

    def __init__(self, name, sorts, gens, equations, _token=None):
        if _token is not _BUILD_TOKEN:
            raise TypeError("use validate_signature() to build a Signature")
        self.name = name
        self.sorts = tuple(sorts)
        self.gens = tuple(gens)
        self.equations = tuple(equations)
        self._gen_by_name = {g.name: g for g in self.gens}
        self._gen_index = {g.name: i for i, g in enumerate(self.gens)}
        self._build_classes()
        self._compute_levels()

    # -- construction ----------------------------------------------------

    def _all_paths(self):
        """All non-empty composable generator paths (finite: DAG)."""
        out_of = {s: [] for s in self.sorts}
        for g in self.gens:
            out_of[g.dom].append(g)
        paths = []
        stack = [((g.name,), g.dom, g.cod) for g in self.gens]
        while stack:
            path, dom, cod = stack.pop()
            paths.append((path, dom, cod))
            for g in out_of[cod]:
                stack.append((path + (g.name,), dom, g.cod))
        return paths

    def _build_classes(self):
        paths = self._all_paths()
        parent = {p: p for p, _, _ in paths}
        ends = {p: (d, c) for p, d, c in paths}

        def find(p):
            while parent[p] != p:
                parent[p] = parent[parent[p]]
                p = parent[p]
            return p

        def union(p, q):
            rp, rq = find(p), find(q)
            if rp != rq:
                parent[rp] = rq

        # one-step rewrites by declared equations, at every position;
        # union-find supplies the transitive closure
        for lhs, rhs in self.equations:
            n = len(lhs)
            for p, _, _ in paths:
                for i in range(len(p) - n + 1):
                    if p[i:i + n] == lhs:
                        union(p, p[:i] + rhs + p[i + n:])

        classes = {}
        for p, _, _ in paths:
            classes.setdefault(find(p), []).append(p)

        def path_key(p):
            return (len(p), tuple(self._gen_index[g] for g in p))

        self._class_of = {}
        self._hom = {}
        sort_index = {s: i for i, s in enumerate(self.sorts)}
        for members in classes.values():
            canon = min(members, key=path_key)
            dom, cod = ends[canon]
            arrow = Arrow(canon, dom, cod)
            for p in members:
                if ends[p] != (dom, cod):
                    raise CompositionError(
                        f"equation closure identifies arrows with mismatched "
                        f"endpoints: {'.'.join(canon)} vs {'.'.join(p)}")
                self._class_of[p] = arrow
            self._hom.setdefault((dom, cod), []).append(arrow)
        for key in self._hom:
            self._hom[key].sort(key=lambda a: path_key(a.path))
            self._hom[key] = tuple(self._hom[key])
        self._out = {}
        for s in self.sorts:
            arrows = [a for (d, _c), hs in self._hom.items() if d == s
                      for a in hs]
            arrows.sort(key=lambda a: (sort_index[a.cod], path_key(a.path)))
            self._out[s] = tuple(arrows)

    def _compute_levels(self):
        incoming = {s: [] for s in self.sorts}
        for g in self.gens:
            incoming[g.cod].append(g.dom)
        levels = {}

        def level(s):
            if s not in levels:
                if not incoming[s]:
                    levels[s] = 1
                else:
                    levels[s] = 1 + max(level(d) for d in incoming[s])
            return levels[s]

        for s in self.sorts:
            level(s)
        self.levels = levels
        self.height = max(levels.values()) if levels else 1

    # -- queries ---------------------------------------------------------

    def level(self, sort) -> int:
        if sort not in self.levels:
            raise UnknownSort(sort)
        return self.levels[sort]

    def identity(self, sort) -> Arrow:
        if sort not in self.levels:
            raise UnknownSort(sort)
        return Arrow((), sort, sort)

    def cls(self, path: Path) -> Arrow:
        """Canonical hom-class of a generator path."""
        if not path:
            raise ValueError("empty path needs a sort; use identity()")
        if path not in self._class_of:
            raise UnknownSort(f"not a composable path: {'.'.join(path)}")
        return self._class_of[path]

    def compose(self, first: Arrow, then: Arrow) -> Arrow:
        """Composite then∘first (apply ``first``, then ``then``)."""
        if first.cod != then.dom:
            raise CompositionError(f"{first!r} then {then!r} not composable")
        path = first.path + then.path
        if not path:
            return self.identity(first.dom)
        return self._class_of[path]

    def hom(self, dom, cod):
        """All arrows dom→cod (including the identity when dom == cod)."""
        for s in (dom, cod):
            if s not in self.levels:
                raise UnknownSort(s)
        arrows = self._hom.get((dom, cod), ())
        if dom == cod:
            return (self.identity(dom),) + arrows
        return arrows

    def out(self, sort):
        """All non-identity arrows out of ``sort``, deterministic order."""
        if sort not in self.levels:
            raise UnknownSort(sort)
        return self._out[sort]

    def class_members(self, arrow: Arrow):
        """All generator paths in the hom-class of ``arrow``."""
        if arrow.is_identity:
            return ((),)
        return tuple(p for p, a in self._class_of.items() if a == arrow)

    def out_gens(self, sort):
        return tuple(g for g in self.gens if g.dom == sort)

    def gen(self, name) -> Gen:
        return self._gen_by_name[name]

    def __repr__(self):
        return f"Signature({self.name!r}, {len(self.sorts)} sorts)"


_BUILD_TOKEN = object()


def validate_signature(raw, name="sig") -> Signature:
    """Validate a raw description and build a :class:`Signature`.

    ``raw`` is a mapping with keys ``sorts`` (list of names), ``arrows``
    (list of ``(name, dom, cod)``) and ``equations`` (list of pairs of
    generator-name paths, first-applied generator first).  Raises a
    :class:`~foldsat.errors.SignatureError` carrying a ``diagnostics`` list.
    """
    diags = []
    sorts = list(raw.get("sorts", []))
    seen = set()
    for s in sorts:
        if s in seen:
            diags.append(f"duplicate sort name: {s}")
        seen.add(s)
    gens = []
    gen_names = {}
    for entry in raw.get("arrows", []):
        gname, dom, cod = entry
        if dom not in seen or cod not in seen:
            diags.append(f"dangling arrow {gname}: {dom}->{cod}")
            continue
        if (gname, dom) in gen_names or gname in seen:
            diags.append(f"duplicate arrow name: {gname}")
            continue
        gen_names[(gname, dom)] = True
        gens.append(Gen(gname, dom, cod))
    if diags:
        raise NameClashError("; ".join(diags))

    # inverse check: generator graph on sorts must be a DAG with no loops
    adj = {s: set() for s in sorts}
    for g in gens:
        if g.dom == g.cod:
            raise CycleError(f"endomorphism arrow {g.name} on sort {g.dom}")
        adj[g.dom].add(g.cod)
    state = {}

    def visit(s):
        state[s] = 1
        for t in adj[s]:
            if state.get(t) == 1:
                raise CycleError(f"cycle through sorts {s} -> {t}")
            if t not in state:
                visit(t)
        state[s] = 2

    for s in sorts:
        if s not in state:
            visit(s)

    by_name = {g.name: g for g in gens}
    equations = []
    for lhs, rhs in raw.get("equations", []):
        lhs, rhs = tuple(lhs), tuple(rhs)
        for side in (lhs, rhs):
            if not side:
                raise CompositionError("empty path in equation")
            for a in side:
                if a not in by_name:
                    raise NameClashError(f"equation uses undeclared arrow {a}")
            for a, b in zip(side, side[1:]):
                if by_name[a].cod != by_name[b].dom:
                    raise CompositionError(
                        f"non-composable path {'.'.join(side)}")
        if (by_name[lhs[0]].dom != by_name[rhs[0]].dom
                or by_name[lhs[-1]].cod != by_name[rhs[-1]].cod):
            raise CompositionError(
                f"equation relates arrows with mismatched endpoints: "
                f"{'.'.join(lhs)} = {'.'.join(rhs)}")
        equations.append((lhs, rhs))

    sig = Signature(name, sorts, gens, equations, _token=_BUILD_TOKEN)

    declared = raw.get("levels")
    if declared:
        for s, lv in declared.items():
            if sig.levels.get(s) != lv:
                raise CompositionError(
                    f"declared level {lv} for sort {s} disagrees with "
                    f"computed level {sig.levels.get(s)}")
    return sig


def compute_levels(sig: Signature) -> LevelMap:
    return LevelMap(dict(sig.levels), sig.height)


def hom_set(sig: Signature, dom, cod):
    return sig.hom(dom, cod)
