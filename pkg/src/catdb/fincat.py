"""Finite categories, functors, natural transformations, and shape combinators.

Everything downstream (schemas, databases, joins) is a diagram over a finite
shape category, so this module is deliberately extensional: a category is its
full composition table, a functor is a pair of lookup maps, and every law is
checked eagerly at construction time.  Targets of functors may be "large"
categories (sets, signatures, tables) presented through :class:`CategoryInterface`,
in which case laws are only checked on the elements actually touched.

Composition is written diagrammatically throughout: ``compose(f, g)`` means
"first f, then g" and is defined exactly when ``target(f) == source(g)``.
"""

import itertools


class CategoryError(Exception):
    """Base class for category-law and plumbing failures."""


class IdentityLawViolation(CategoryError):
    pass


class AssociativityViolation(CategoryError):
    pass


class NonComposablePair(CategoryError):
    pass


class CycleDetected(CategoryError):
    pass


class HomEnumerationUnavailable(CategoryError):
    pass


class EndpointMismatch(CategoryError):
    pass


def pair_id(a, b):
    """Deterministic, collision-free identifier for an ordered pair of ids."""
    return repr((a, b))


class CategoryInterface:
    """Abstract presentation of a category that need not be enumerable.

    Subclasses provide equality tests, identities, composition and endpoint
    accessors.  ``hom`` is optional; constructions that need it (comma
    categories, mediator-uniqueness searches) either call it or accept a
    caller-supplied enumerator, and it raises
    :class:`HomEnumerationUnavailable` by default.
    """

    def obj_eq(self, a, b):
        raise NotImplementedError

    def mor_eq(self, f, g):
        raise NotImplementedError

    def identity(self, a):
        raise NotImplementedError

    def compose(self, f, g):
        raise NotImplementedError

    def source(self, f):
        raise NotImplementedError

    def target(self, f):
        raise NotImplementedError

    def hom(self, a, b):
        raise HomEnumerationUnavailable(
            "%r cannot enumerate hom-sets" % type(self).__name__)

    def obj_label(self, a):
        """Canonical string label for an object (used for generated ids)."""
        return a if isinstance(a, str) else repr(a)

    def mor_label(self, f):
        return f if isinstance(f, str) else repr(f)


class OppositeInterface(CategoryInterface):
    """The opposite of a large category: same objects and morphism values,
    endpoints swapped, composition reversed."""

    def __init__(self, base):
        self.base = base

    def obj_eq(self, a, b):
        return self.base.obj_eq(a, b)

    def mor_eq(self, f, g):
        return self.base.mor_eq(f, g)

    def identity(self, a):
        return self.base.identity(a)

    def compose(self, f, g):
        return self.base.compose(g, f)

    def source(self, f):
        return self.base.target(f)

    def target(self, f):
        return self.base.source(f)

    def hom(self, a, b):
        return self.base.hom(b, a)

    def obj_label(self, a):
        return self.base.obj_label(a)

    def mor_label(self, f):
        return self.base.mor_label(f)

    def __eq__(self, other):
        return isinstance(other, OppositeInterface) and self.base == other.base


class FinCategory(CategoryInterface):
    """A finite category given by its complete composition table.

    Objects and morphisms are opaque string identifiers.  ``morphisms`` maps
    each morphism id to its ``(source, target)`` pair, ``identities`` maps each
    object to its identity morphism, and ``table`` maps every composable pair
    ``(f, g)`` (f then g) to the composite id.  All laws are verified here;
    failures raise the specific law error naming the offending morphisms.
    """

    def __init__(self, objects, morphisms, identities, table):
        self.objects = tuple(sorted(objects))
        if len(set(self.objects)) != len(self.objects):
            raise CategoryError("duplicate object ids")
        self.morphisms = dict(morphisms)
        self.identities = dict(identities)
        self.table = dict(table)
        self._validate()

    def _validate(self):
        for f, (s, t) in self.morphisms.items():
            if s not in self.objects or t not in self.objects:
                raise CategoryError("morphism %r has unknown endpoint" % f)
        for x in self.objects:
            i = self.identities.get(x)
            if i is None or i not in self.morphisms:
                raise IdentityLawViolation("object %r has no identity" % x)
            if self.morphisms[i] != (x, x):
                raise IdentityLawViolation(
                    "identity %r of %r is not an endomorphism" % (i, x))
        mors = self.morphisms
        # compose defined exactly on composable pairs
        for (f, g), h in self.table.items():
            if f not in mors or g not in mors or h not in mors:
                raise NonComposablePair("table entry (%r, %r) -> %r uses "
                                        "unknown morphisms" % (f, g, h))
            if mors[f][1] != mors[g][0]:
                raise NonComposablePair(
                    "(%r, %r) is not composable but appears in the table"
                    % (f, g))
            if mors[h] != (mors[f][0], mors[g][1]):
                raise NonComposablePair(
                    "composite of (%r, %r) has endpoints %r, expected %r"
                    % (f, g, mors[h], (mors[f][0], mors[g][1])))
        for f in mors:
            for g in mors:
                if mors[f][1] == mors[g][0] and (f, g) not in self.table:
                    raise NonComposablePair(
                        "composable pair (%r, %r) missing from the table"
                        % (f, g))
        for f, (s, t) in mors.items():
            if self.table[(self.identities[s], f)] != f:
                raise IdentityLawViolation(
                    "compose(id_%s, %r) != %r" % (s, f, f))
            if self.table[(f, self.identities[t])] != f:
                raise IdentityLawViolation(
                    "compose(%r, id_%s) != %r" % (f, t, f))
        for f in mors:
            for g in mors:
                if mors[f][1] != mors[g][0]:
                    continue
                fg = self.table[(f, g)]
                for h in mors:
                    if mors[g][1] != mors[h][0]:
                        continue
                    gh = self.table[(g, h)]
                    if self.table[(fg, h)] != self.table[(f, gh)]:
                        raise AssociativityViolation(
                            "((%r;%r);%r) != (%r;(%r;%r))" % (f, g, h, f, g, h))

    # -- CategoryInterface --------------------------------------------------

    def obj_eq(self, a, b):
        return a == b

    def mor_eq(self, f, g):
        return f == g

    def identity(self, a):
        return self.identities[a]

    def compose(self, f, g):
        if (f, g) not in self.table:
            raise NonComposablePair("(%r, %r) not composable" % (f, g))
        return self.table[(f, g)]

    def source(self, f):
        return self.morphisms[f][0]

    def target(self, f):
        return self.morphisms[f][1]

    def hom(self, a, b):
        return sorted(f for f, (s, t) in self.morphisms.items()
                      if s == a and t == b)

    # -----------------------------------------------------------------------

    def morphism_ids(self):
        return sorted(self.morphisms)

    def nonidentity_morphisms(self):
        ids = set(self.identities.values())
        return sorted(f for f in self.morphisms if f not in ids)

    def __eq__(self, other):
        return (isinstance(other, FinCategory)
                and self.objects == other.objects
                and self.morphisms == other.morphisms
                and self.identities == other.identities
                and self.table == other.table)

    def __repr__(self):
        return "FinCategory(%d objects, %d morphisms)" % (
            len(self.objects), len(self.morphisms))


def make_category(objects, morphisms, identities, table):
    """Validated constructor; ``morphisms`` is a list of (id, src, tgt) or a map."""
    if not isinstance(morphisms, dict):
        morphisms = {f: (s, t) for f, s, t in morphisms}
    return FinCategory(objects, morphisms, identities, table)


def terminal_category(obj="*"):
    return FinCategory([obj], {"id_" + obj: (obj, obj)},
                       {obj: "id_" + obj},
                       {("id_" + obj, "id_" + obj): "id_" + obj})


def empty_category():
    return FinCategory([], {}, {}, {})


def discrete_category(objects):
    objects = list(objects)
    return FinCategory(
        objects,
        {"id_" + x: (x, x) for x in objects},
        {x: "id_" + x for x in objects},
        {("id_" + x, "id_" + x): "id_" + x for x in objects})


def free_on_acyclic_graph(nodes, edges):
    """The free category on a finite acyclic graph.

    ``edges`` is a list of ``(name, src, tgt)`` triples.  Morphisms are the
    paths of the graph: the identity on a node is the empty path, a path
    ``e1`` then ``e2`` gets the id ``"e1;e2"``, and composition is path
    concatenation.  Raises :class:`CycleDetected` if some path closure would
    be infinite.
    """
    nodes = list(nodes)
    edges = [tuple(e) for e in edges]
    for name, s, t in edges:
        if s not in nodes or t not in nodes:
            raise CategoryError("edge %r has unknown endpoint" % name)
    # cycle check by repeated removal of sources
    remaining = set(nodes)
    arcs = [(s, t) for _, s, t in edges]
    while remaining:
        sources = {n for n in remaining
                   if not any(t == n and s in remaining for s, t in arcs)}
        if not sources:
            raise CycleDetected("graph on %r has a directed cycle" % sorted(remaining))
        remaining -= sources
    # enumerate all paths
    paths = {n: [] for n in nodes}   # endpoint pairs via search
    all_paths = [((), n, n) for n in nodes]
    frontier = [((), n, n) for n in nodes]
    while frontier:
        new = []
        for seq, s, t in frontier:
            for name, es, et in edges:
                if es == t:
                    new.append((seq + (name,), s, et))
        all_paths.extend(new)
        frontier = new
    def path_id(seq, node):
        return ";".join(seq) if seq else "id_" + node
    morphisms = {}
    for seq, s, t in all_paths:
        morphisms[path_id(seq, s)] = (s, t)
    identities = {n: "id_" + n for n in nodes}
    table = {}
    for seq1, s1, t1 in all_paths:
        for seq2, s2, t2 in all_paths:
            if t1 == s2:
                table[(path_id(seq1, s1), path_id(seq2, s2))] = \
                    path_id(seq1 + seq2, s1)
    return FinCategory(nodes, morphisms, identities, table)


def opposite(cat):
    """Reverse all morphisms.  ``opposite(opposite(C)) == C``."""
    return FinCategory(
        cat.objects,
        {f: (t, s) for f, (s, t) in cat.morphisms.items()},
        cat.identities,
        {(g, f): h for (f, g), h in cat.table.items()})


def product_category(c1, c2):
    objects = [pair_id(a, b) for a in c1.objects for b in c2.objects]
    morphisms = {}
    for f, (s1, t1) in c1.morphisms.items():
        for g, (s2, t2) in c2.morphisms.items():
            morphisms[pair_id(f, g)] = (pair_id(s1, s2), pair_id(t1, t2))
    identities = {pair_id(a, b): pair_id(c1.identities[a], c2.identities[b])
                  for a in c1.objects for b in c2.objects}
    table = {}
    for (f1, g1), h1 in c1.table.items():
        for (f2, g2), h2 in c2.table.items():
            table[(pair_id(f1, f2), pair_id(g1, g2))] = pair_id(h1, h2)
    return FinCategory(objects, morphisms, identities, table)


def coproduct_category(c1, c2):
    """Tagged disjoint union of two finite categories."""
    def tag(side, x):
        return pair_id(side, x)
    objects = [tag("1", a) for a in c1.objects] + [tag("2", b) for b in c2.objects]
    morphisms = {}
    identities = {}
    table = {}
    for side, cat in (("1", c1), ("2", c2)):
        for f, (s, t) in cat.morphisms.items():
            morphisms[tag(side, f)] = (tag(side, s), tag(side, t))
        for x, i in cat.identities.items():
            identities[tag(side, x)] = tag(side, i)
        for (f, g), h in cat.table.items():
            table[(tag(side, f), tag(side, g))] = tag(side, h)
    return FinCategory(objects, morphisms, identities, table)


def coproduct_injections(c1, c2):
    cop = coproduct_category(c1, c2)
    inj1 = Passage(c1, cop, {a: pair_id("1", a) for a in c1.objects},
                   {f: pair_id("1", f) for f in c1.morphisms})
    inj2 = Passage(c2, cop, {b: pair_id("2", b) for b in c2.objects},
                   {f: pair_id("2", f) for f in c2.morphisms})
    return cop, inj1, inj2


class Passage:
    """A functor.

    The source is normally a :class:`FinCategory` and the object/morphism maps
    are dictionaries; functoriality is then checked exhaustively here.  A
    passage may also have a large source (a :class:`CategoryInterface`), in
    which case the maps are callables and nothing is checked eagerly.
    """

    def __init__(self, source, target, obj_map, mor_map, check=True):
        self.source = source
        self.target = target
        self.obj_map = obj_map
        self.mor_map = mor_map
        if check and isinstance(source, FinCategory):
            self._validate()

    def on_obj(self, x):
        if callable(self.obj_map):
            return self.obj_map(x)
        return self.obj_map[x]

    def on_mor(self, f):
        if callable(self.mor_map):
            return self.mor_map(f)
        return self.mor_map[f]

    def __call__(self, x):
        """Apply to an object if ``x`` names one, else to a morphism."""
        if isinstance(self.source, FinCategory) and x in self.source.objects:
            return self.on_obj(x)
        return self.on_mor(x)

    def _validate(self):
        src, tgt = self.source, self.target
        for x in src.objects:
            if x not in self.obj_map:
                raise CategoryError("no image for object %r" % x)
        for f, (s, t) in src.morphisms.items():
            ff = self.on_mor(f)
            if not tgt.obj_eq(tgt.source(ff), self.on_obj(s)) or \
               not tgt.obj_eq(tgt.target(ff), self.on_obj(t)):
                raise CategoryError(
                    "image of %r has wrong endpoints" % f)
        for x in src.objects:
            if not tgt.mor_eq(self.on_mor(src.identities[x]),
                              tgt.identity(self.on_obj(x))):
                raise CategoryError("identity of %r not preserved" % x)
        for (f, g), h in src.table.items():
            if not tgt.mor_eq(tgt.compose(self.on_mor(f), self.on_mor(g)),
                              self.on_mor(h)):
                raise CategoryError(
                    "composition (%r ; %r) not preserved" % (f, g))

    def __repr__(self):
        return "Passage(%r -> %r)" % (self.source, self.target)


def identity_passage(cat):
    if isinstance(cat, FinCategory):
        return Passage(cat, cat, {x: x for x in cat.objects},
                       {f: f for f in cat.morphisms})
    return Passage(cat, cat, lambda x: x, lambda f: f)


def compose_passages(p, q):
    """Diagrammatic composite: first ``p``, then ``q``."""
    if p.target is not q.source and p.target != q.source:
        raise EndpointMismatch("cannot compose %r with %r" % (p, q))
    if isinstance(p.source, FinCategory):
        return Passage(p.source, q.target,
                       {x: q.on_obj(p.on_obj(x)) for x in p.source.objects},
                       {f: q.on_mor(p.on_mor(f)) for f in p.source.morphisms})
    return Passage(p.source, q.target,
                   lambda x: q.on_obj(p.on_obj(x)),
                   lambda f: q.on_mor(p.on_mor(f)))


def opposite_passage(p):
    """The same maps read as a functor between the opposite categories.

    Only supported for passages between finite categories, which is the only
    case the diagram layer needs (shape passages).
    """
    if not isinstance(p.source, FinCategory) or not isinstance(p.target, FinCategory):
        raise EndpointMismatch("opposite_passage needs finite endpoints")
    return Passage(opposite(p.source), opposite(p.target),
                   dict(p.obj_map), dict(p.mor_map))


def constant_passage(shape, target, obj, check=True):
    """The constant diagram at ``obj`` (all morphisms go to the identity)."""
    return Passage(shape, target,
                   {x: obj for x in shape.objects},
                   {f: target.identity(obj) for f in shape.morphisms},
                   check=check)


class Bridge:
    """A natural transformation between parallel passages.

    ``components`` maps each source object to a target morphism
    ``source_passage(x) -> target_passage(x)``.  Naturality is checked
    exhaustively when the common source is finite; large-source bridges take
    callable components and are checked lazily by the operations that use
    them.
    """

    def __init__(self, source_passage, target_passage, components, check=True):
        if source_passage.source is not target_passage.source \
                and source_passage.source != target_passage.source:
            raise EndpointMismatch("bridge endpoints have different shapes")
        self.source_passage = source_passage
        self.target_passage = target_passage
        self.components = components
        if check and isinstance(source_passage.source, FinCategory):
            self._validate()

    def at(self, x):
        if callable(self.components):
            return self.components(x)
        return self.components[x]

    def _validate(self):
        shape = self.source_passage.source
        tgt = self.source_passage.target
        for x in shape.objects:
            c = self.at(x)
            if not tgt.obj_eq(tgt.source(c), self.source_passage.on_obj(x)) or \
               not tgt.obj_eq(tgt.target(c), self.target_passage.on_obj(x)):
                raise CategoryError("component at %r has wrong endpoints" % x)
        for f, (s, t) in shape.morphisms.items():
            left = tgt.compose(self.source_passage.on_mor(f), self.at(t))
            right = tgt.compose(self.at(s), self.target_passage.on_mor(f))
            if not tgt.mor_eq(left, right):
                raise CategoryError("naturality fails at %r" % f)

    def __repr__(self):
        return "Bridge(%r => %r)" % (self.source_passage, self.target_passage)


def identity_bridge(p):
    if isinstance(p.source, FinCategory):
        comps = {x: p.target.identity(p.on_obj(x)) for x in p.source.objects}
    else:
        comps = lambda x: p.target.identity(p.on_obj(x))
    return Bridge(p, p, comps, check=False)


def vertical_compose(b1, b2):
    """Componentwise composite of ``b1: F => G`` and ``b2: G => H``."""
    if b1.target_passage is not b2.source_passage \
            and not _same_passage(b1.target_passage, b2.source_passage):
        raise EndpointMismatch("middle passages of a vertical composite differ")
    tgt = b1.source_passage.target
    if isinstance(b1.source_passage.source, FinCategory):
        comps = {x: tgt.compose(b1.at(x), b2.at(x))
                 for x in b1.source_passage.source.objects}
    else:
        comps = lambda x: tgt.compose(b1.at(x), b2.at(x))
    return Bridge(b1.source_passage, b2.target_passage, comps)


def whisker_left(p, bridge):
    """Precompose a bridge with a passage: ``(p ; bridge)`` with components
    ``bridge_{p(x)}``."""
    if p.target is not bridge.source_passage.source \
            and p.target != bridge.source_passage.source:
        raise EndpointMismatch("passage target does not match bridge shape")
    if isinstance(p.source, FinCategory):
        comps = {x: bridge.at(p.on_obj(x)) for x in p.source.objects}
    else:
        comps = lambda x: bridge.at(p.on_obj(x))
    return Bridge(compose_passages(p, bridge.source_passage),
                  compose_passages(p, bridge.target_passage), comps)


def whisker_right(bridge, q):
    """Postcompose a bridge with a passage: components ``q(bridge_x)``."""
    if bridge.source_passage.target is not q.source \
            and bridge.source_passage.target != q.source:
        raise EndpointMismatch("bridge target does not match passage source")
    if isinstance(bridge.source_passage.source, FinCategory):
        comps = {x: q.on_mor(bridge.at(x))
                 for x in bridge.source_passage.source.objects}
    else:
        comps = lambda x: q.on_mor(bridge.at(x))
    return Bridge(compose_passages(bridge.source_passage, q),
                  compose_passages(bridge.target_passage, q), comps)


def _same_passage(p, q):
    if p is q:
        return True
    if not isinstance(p.source, FinCategory):
        return False
    try:
        return all(p.target.obj_eq(p.on_obj(x), q.on_obj(x))
                   for x in p.source.objects) and \
               all(p.target.mor_eq(p.on_mor(f), q.on_mor(f))
                   for f in p.source.morphisms)
    except Exception:
        return False


def bridges_equal(b1, b2):
    """Componentwise equality of two finite-source bridges."""
    shape = b1.source_passage.source
    tgt = b1.source_passage.target
    return all(tgt.mor_eq(b1.at(x), b2.at(x)) for x in shape.objects)


class Cone:
    """A (co)cone over a diagram.

    For a cone (``colimit=False``) the legs run from the vertex into the
    diagram, ``leg_x: vertex -> D(x)``, and commute with the diagram's arrows;
    for a cocone they run from the diagram to the vertex.
    """

    def __init__(self, diagram, vertex, legs, colimit=False, check=True):
        self.diagram = diagram
        self.vertex = vertex
        self.legs = dict(legs)
        self.colimit = colimit
        if check:
            self._validate()

    def _validate(self):
        shape = self.diagram.source
        tgt = self.diagram.target
        for x in shape.objects:
            if x not in self.legs:
                raise CategoryError("cone missing leg at %r" % x)
            leg = self.legs[x]
            if self.colimit:
                ok = tgt.obj_eq(tgt.source(leg), self.diagram.on_obj(x)) and \
                     tgt.obj_eq(tgt.target(leg), self.vertex)
            else:
                ok = tgt.obj_eq(tgt.source(leg), self.vertex) and \
                     tgt.obj_eq(tgt.target(leg), self.diagram.on_obj(x))
            if not ok:
                raise CategoryError("leg at %r has wrong endpoints" % x)
        for f, (s, t) in shape.morphisms.items():
            if self.colimit:
                left = tgt.compose(self.diagram.on_mor(f), self.legs[t])
                right = self.legs[s]
            else:
                left = tgt.compose(self.legs[s], self.diagram.on_mor(f))
                right = self.legs[t]
            if not tgt.mor_eq(left, right):
                raise CategoryError("cone does not commute at %r" % f)

    def __repr__(self):
        kind = "Cocone" if self.colimit else "Cone"
        return "%s(vertex=%r)" % (kind, self.vertex)


def pullback_category(f, g):
    """Pullback of two passages over a common (possibly large) target.

    Objects are pairs ``(c1, c2)`` with ``f(c1) == g(c2)`` in the target,
    morphisms are pairs with equal images.  Returns the pullback category and
    its two projection passages.
    """
    c1, c2, e = f.source, g.source, f.target
    objects, obj1, obj2 = [], {}, {}
    for a in c1.objects:
        for b in c2.objects:
            if e.obj_eq(f.on_obj(a), g.on_obj(b)):
                o = pair_id(a, b)
                objects.append(o)
                obj1[o], obj2[o] = a, b
    morphisms, mor1, mor2 = {}, {}, {}
    for m, (s1, t1) in c1.morphisms.items():
        for n, (s2, t2) in c2.morphisms.items():
            if pair_id(s1, s2) in obj1 and pair_id(t1, t2) in obj1 \
                    and e.mor_eq(f.on_mor(m), g.on_mor(n)):
                mm = pair_id(m, n)
                morphisms[mm] = (pair_id(s1, s2), pair_id(t1, t2))
                mor1[mm], mor2[mm] = m, n
    identities = {o: pair_id(c1.identities[obj1[o]], c2.identities[obj2[o]])
                  for o in objects}
    table = {}
    for m in morphisms:
        for n in morphisms:
            if morphisms[m][1] == morphisms[n][0]:
                table[(m, n)] = pair_id(c1.table[(mor1[m], mor1[n])],
                                        c2.table[(mor2[m], mor2[n])])
    cat = FinCategory(objects, morphisms, identities, table)
    p1 = Passage(cat, c1, obj1, mor1)
    p2 = Passage(cat, c2, obj2, mor2)
    return cat, p1, p2


def comma_category(f, g, hom_enumerator=None):
    """The comma category of ``f: C -> E`` and ``g: D -> E``.

    Objects are triples ``(c, d, e)`` with ``e: f(c) -> g(d)`` in ``E``;
    morphisms ``(u, v): (c, d, e) -> (c', d', e')`` satisfy
    ``e ; g(v) == f(u) ; e'``.  ``E`` must enumerate hom-sets, either through
    its own ``hom`` or through ``hom_enumerator(a, b)``.

    Returns ``(category, proj_C, proj_D, kappa)`` where ``kappa`` is the
    canonical bridge ``proj_C ; f  =>  proj_D ; g`` with component ``e`` at
    ``(c, d, e)``.
    """
    c_cat, d_cat, e_cat = f.source, g.source, g.target
    if hom_enumerator is None:
        hom_enumerator = e_cat.hom
    objects = []
    data = {}
    for c in c_cat.objects:
        for d in d_cat.objects:
            for e in hom_enumerator(f.on_obj(c), g.on_obj(d)):
                o = pair_id(pair_id(c, d), e_cat.mor_label(e))
                objects.append(o)
                data[o] = (c, d, e)
    morphisms, mor_c, mor_d = {}, {}, {}
    for o1 in objects:
        c1, d1, e1 = data[o1]
        for o2 in objects:
            c2, d2, e2 = data[o2]
            for u in c_cat.hom(c1, c2):
                for v in d_cat.hom(d1, d2):
                    left = e_cat.compose(e1, g.on_mor(v))
                    right = e_cat.compose(f.on_mor(u), e2)
                    if e_cat.mor_eq(left, right):
                        m = pair_id(pair_id(u, v), pair_id(o1, o2))
                        morphisms[m] = (o1, o2)
                        mor_c[m], mor_d[m] = u, v
    identities = {}
    for o in objects:
        c, d, _ = data[o]
        identities[o] = pair_id(
            pair_id(c_cat.identities[c], d_cat.identities[d]), pair_id(o, o))
    table = {}
    for m in morphisms:
        for n in morphisms:
            if morphisms[m][1] == morphisms[n][0]:
                table[(m, n)] = pair_id(
                    pair_id(c_cat.table[(mor_c[m], mor_c[n])],
                            d_cat.table[(mor_d[m], mor_d[n])]),
                    pair_id(morphisms[m][0], morphisms[n][1]))
    cat = FinCategory(objects, morphisms, identities, table)
    proj_c = Passage(cat, c_cat, {o: data[o][0] for o in objects}, mor_c)
    proj_d = Passage(cat, d_cat, {o: data[o][1] for o in objects}, mor_d)
    kappa = Bridge(compose_passages(proj_c, f), compose_passages(proj_d, g),
                   {o: data[o][2] for o in objects})
    return cat, proj_c, proj_d, kappa


def all_passages(src, tgt):
    """Enumerate every functor between two finite categories.

    Brute force with pruning: choose object images, then extend over
    non-identity morphisms consistently with endpoints, identities and the
    composition table.  Fine at the desk scales used here.
    """
    results = []
    src_nonid = src.nonidentity_morphisms()
    for obj_choice in itertools.product(tgt.objects, repeat=len(src.objects)):
        obj_map = dict(zip(src.objects, obj_choice))
        mor_map = {src.identities[x]: tgt.identities[obj_map[x]]
                   for x in src.objects}
        candidates = []
        feasible = True
        for m in src_nonid:
            s, t = src.morphisms[m]
            opts = tgt.hom(obj_map[s], obj_map[t])
            if not opts:
                feasible = False
                break
            candidates.append((m, opts))
        if not feasible:
            continue
        def extend(i, acc):
            if i == len(candidates):
                full = dict(mor_map)
                full.update(acc)
                for (u, v), w in src.table.items():
                    if tgt.compose(full[u], full[v]) != full[w]:
                        return
                results.append(Passage(src, tgt, dict(obj_map), full))
                return
            m, opts = candidates[i]
            for choice in opts:
                acc[m] = choice
                # partial consistency: any fully-assigned composite must match
                ok = True
                for (u, v), w in src.table.items():
                    if u in acc or u in mor_map:
                        fu = acc.get(u, mor_map.get(u))
                    else:
                        continue
                    if v in acc or v in mor_map:
                        fv = acc.get(v, mor_map.get(v))
                    else:
                        continue
                    fw = acc.get(w, mor_map.get(w))
                    if fw is not None and tgt.compose(fu, fv) != fw:
                        ok = False
                        break
                if ok:
                    extend(i + 1, acc)
            del acc[m]
        extend(0, {})
    return results


def all_bridges(p, q):
    """Enumerate every natural transformation between two parallel passages
    whose target can enumerate hom-sets."""
    shape, tgt = p.source, p.target
    per_object = []
    for x in shape.objects:
        opts = list(tgt.hom(p.on_obj(x), q.on_obj(x)))
        if not opts:
            return []
        per_object.append((x, opts))
    out = []
    for combo in itertools.product(*(opts for _, opts in per_object)):
        comps = {x: c for (x, _), c in zip(per_object, combo)}
        natural = True
        for f, (s, t) in shape.morphisms.items():
            if not tgt.mor_eq(tgt.compose(p.on_mor(f), comps[t]),
                              tgt.compose(comps[s], q.on_mor(f))):
                natural = False
                break
        if natural:
            out.append(Bridge(p, q, comps, check=False))
    return out
