"""Tests for joins, sums, table canonicalization, the exhaustive
universal-property oracle, Kan extensions, and flattened indexed fibers."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catdb.fincat import (
    Bridge,
    Cone,
    FinCategory,
    Passage,
    all_bridges,
    bridges_equal,
    compose_passages,
    constant_passage,
    discrete_category,
    empty_category,
    free_on_acyclic_graph,
    identity_passage,
    opposite,
    pair_id,
    terminal_category,
    vertical_compose,
    whisker_left,
)
from catdb.tables import (
    AdjunctionWitness,
    DomMor,
    GenTableMorphism,
    Infomorphism,
    LIST,
    ListMor,
    ListX,
    MissingAdjunctionWitness,
    SET,
    SetFn,
    SigMorphism,
    Signature,
    SignedDomain,
    TBL,
    Table,
    TableMorphism,
    TblA,
    TypeDomain,
    list_fiber_adjunction,
    tuple_get,
    tuple_make,
)
from catdb.diagrams import (
    Database,
    DatabaseMorphism,
    SchemedDomain,
    SchemedDomainMorphismAlong,
    compose_database_morphisms,
    database_from_tables,
    database_to_general,
    identity_database_morphism,
    levo_dextro_schemed,
)
from catdb.univ import (
    DbCat,
    DiagramCategory,
    FiberNotCocomplete,
    IndexedAdjunction,
    NoMediator,
    NoUniversalCone,
    SortGluingConflict,
    StrictnessViolation,
    TupleGluingInconsistent,
    UnsupportedVaryingTypeDomains,
    canonical_table,
    check_continuity,
    colimit_in_list,
    colimit_in_listX,
    colimit_in_set,
    colimit_tbl,
    db_coproduct,
    db_initial,
    db_initial_morphism,
    db_morphisms_equal,
    db_product,
    finite_snapshot,
    groth_structured_colimit,
    groth_structured_limit,
    grothendieck,
    kan_adjunction,
    lan,
    lan_listX,
    lim_passage_on_morphism,
    limit_in_listX,
    limit_in_set,
    limit_tbl,
    oracle_universal,
    ran,
    ran_listX,
    shape_projection,
    table_iso,
)

from oracles import nested_loop_join, orbit_partition
from strategies import tables


# ------------------------------------------------------------- fixtures


def flat_domain():
    return TypeDomain(["p", "q"], [1, 2, 3],
                      [(1, "p"), (2, "p"), (2, "q"), (3, "q")])


def one_sort_domain():
    return TypeDomain(["r"], [4, 5, 6], [(4, "r"), (5, "r")])


def flat_infomorphism():
    return Infomorphism(one_sort_domain(), flat_domain(),
                        {"r": "p"}, {1: 4, 2: 5, 3: 6})


def pair_domain():
    # one sort, two values; enough to tell the join fixtures apart
    return TypeDomain(["s"], [1, 2], [(1, "s"), (2, "s")])


def one_col(dom, name):
    return Signature([name], {name: "s"}, dom.sorts)


def set_diagram(shape, objs, mors):
    obj_map = {r: frozenset(objs[r]) for r in shape.objects}
    mor_map = {}
    for f in shape.morphisms:
        if f in shape.identities.values():
            r = shape.morphisms[f][0]
            mor_map[f] = SET.identity(obj_map[r])
        else:
            s, t = shape.morphisms[f]
            mor_map[f] = SetFn(obj_map[s], obj_map[t], mors[f])
    return Passage(shape, SET, obj_map, mor_map)


def parallel_pair():
    return free_on_acyclic_graph(["a", "b"],
                                 [("u", "a", "b"), ("v", "a", "b")])


def span_shape():
    return free_on_acyclic_graph(["l", "m", "r"],
                                 [("u", "m", "l"), ("v", "m", "r")])


def span_db():
    """Two leaf tables matched through the middle one: the join fixture."""
    dom = pair_domain()
    t_l = Table(SignedDomain(one_col(dom, "a"), dom), ["k1", "k2"],
                {"k1": tuple_make({"a": 1}), "k2": tuple_make({"a": 2})})
    t_m = Table(SignedDomain(one_col(dom, "c"), dom), ["m1", "m2"],
                {"m1": tuple_make({"c": 1}), "m2": tuple_make({"c": 2})})
    t_r = Table(SignedDomain(one_col(dom, "b"), dom), ["r1", "r2", "r3"],
                {"r1": tuple_make({"b": 1}), "r2": tuple_make({"b": 1}),
                 "r3": tuple_make({"b": 2})})
    m_u = TableMorphism(t_l, t_m,
                        SigMorphism(one_col(dom, "c"), one_col(dom, "a"),
                                    {"c": "a"}),
                        {"k1": "m1", "k2": "m2"})
    m_v = TableMorphism(t_r, t_m,
                        SigMorphism(one_col(dom, "c"), one_col(dom, "b"),
                                    {"c": "b"}),
                        {"r1": "m1", "r2": "m1", "r3": "m2"})
    return database_from_tables(span_shape(),
                                {"l": t_l, "m": t_m, "r": t_r},
                                {"u": m_u, "v": m_v}, dom)


def arrow_join_db():
    """A two-table database over a single arrow, with a refining key map."""
    dom = flat_domain()
    sig_c = Signature(["c"], {"c": "p"}, dom.sorts)
    sig_cd = Signature(["c", "d"], {"c": "p", "d": "q"}, dom.sorts)
    t_a = Table(SignedDomain(sig_c, dom), ["k0", "k1"],
                {"k0": tuple_make({"c": 1}), "k1": tuple_make({"c": 2})})
    t_b = Table(SignedDomain(sig_cd, dom), ["m0", "m1", "m2"],
                {"m0": tuple_make({"c": 1, "d": 2}),
                 "m1": tuple_make({"c": 1, "d": 3}),
                 "m2": tuple_make({"c": 2, "d": 2})})
    m_e = TableMorphism(t_b, t_a, SigMorphism(sig_c, sig_cd, {"c": "c"}),
                        {"m0": "k0", "m1": "k0", "m2": "k1"})
    shape = free_on_acyclic_graph(["a", "b"], [("e", "a", "b")])
    return database_from_tables(shape, {"a": t_a, "b": t_b}, {"e": m_e}, dom)


def one_key_table(dom, col, value, key="k"):
    return Table(SignedDomain(one_col(dom, col), dom), [key],
                 {key: tuple_make({col: value})})


def single_db(dom, name, table):
    return database_from_tables(discrete_category([name]),
                                {name: table}, {}, dom)


# ------------------------------------------------------ limits in sets


def test_limit_in_set_over_the_empty_shape_is_a_point():
    diagram = Passage(empty_category(), SET, {}, {})
    assert limit_in_set(diagram).vertex == frozenset({()})
    assert colimit_in_set(diagram).vertex == frozenset()


def test_limit_in_set_of_a_discrete_pair_is_the_product():
    shape = discrete_category(["a", "b"])
    diagram = set_diagram(shape, {"a": {0, 1}, "b": {2, 3, 4}}, {})
    res = limit_in_set(diagram)
    assert len(res.vertex) == 6
    for fam in res.vertex:
        chosen = dict(fam)
        assert chosen["a"] in {0, 1} and chosen["b"] in {2, 3, 4}
    vertex = frozenset({9})
    cand = Cone(diagram, vertex,
                {"a": SetFn(vertex, frozenset({0, 1}), {9: 1}),
                 "b": SetFn(vertex, frozenset({2, 3, 4}), {9: 4})})
    u = res.mediator(cand)
    assert dict(u(9)) == {"a": 1, "b": 4}
    assert res.cone.legs["a"](u(9)) == 1


def test_limit_in_set_equalizes_parallel_maps():
    shape = parallel_pair()
    two = frozenset({0, 1})
    swap = set_diagram(shape, {"a": two, "b": two},
                       {"u": {0: 0, 1: 1}, "v": {0: 1, 1: 0}})
    res = limit_in_set(swap)
    assert res.vertex == frozenset()
    # a fake cone whose family violates one of the two maps cannot factor
    fake = Cone(swap, frozenset({7}),
                {"a": SetFn({7}, two, {7: 0}), "b": SetFn({7}, two, {7: 0})},
                check=False)
    with pytest.raises(NoMediator):
        res.mediator(fake)

    pinch = set_diagram(shape, {"a": two, "b": two},
                        {"u": {0: 0, 1: 0}, "v": {0: 0, 1: 1}})
    assert len(limit_in_set(pinch).vertex) == 1


def test_colimit_in_set_matches_the_orbit_oracle():
    shape = parallel_pair()
    src = frozenset({0, 1})
    tgt = frozenset({1, 2, 3})
    maps = {"u": {0: 1, 1: 2}, "v": {0: 1, 1: 3}}
    diagram = set_diagram(shape, {"a": src, "b": tgt}, maps)
    res = colimit_in_set(diagram)
    tagged = [("a", x) for x in sorted(src)] + [("b", y) for y in sorted(tgt)]
    links = [(("a", x), ("b", m[x])) for m in maps.values() for x in sorted(src)]
    want = orbit_partition(tagged, links)
    got = {}
    for r, x in tagged:
        got.setdefault(res.cone.legs[r](x), set()).add((r, x))
    assert frozenset(frozenset(c) for c in got.values()) == want
    assert len(res.vertex) == len(want)


def test_colimit_in_set_mediator_needs_agreement_on_classes():
    shape = parallel_pair()
    two = frozenset({0, 1})
    diagram = set_diagram(shape, {"a": two, "b": two},
                          {"u": {0: 0, 1: 1}, "v": {0: 1, 1: 0}})
    res = colimit_in_set(diagram)
    assert len(res.vertex) == 1
    out = frozenset({5, 6})
    bad = Cone(diagram, out,
               {"a": SetFn(two, out, {0: 5, 1: 6}),
                "b": SetFn(two, out, {0: 5, 1: 6})},
               colimit=True, check=False)
    with pytest.raises(NoMediator):
        res.mediator(bad)
    good = Cone(diagram, out,
                {"a": SetFn(two, out, {0: 5, 1: 5}),
                 "b": SetFn(two, out, {0: 5, 1: 5})},
                colimit=True)
    u = res.mediator(good)
    assert u(next(iter(res.vertex))) == 5


@settings(deadline=None, max_examples=60)
@given(st.data())
def test_set_colimit_classes_are_the_orbit_closure(data):
    n = data.draw(st.integers(1, 5))
    elements = list(range(n))
    pairs = data.draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=6))
    shape = parallel_pair()
    rel = frozenset(range(len(pairs)))
    els = frozenset(elements)
    diagram = Passage(shape, SET, {"a": rel, "b": els},
                      {"u": SetFn(rel, els, {i: pairs[i][0] for i in rel}),
                       "v": SetFn(rel, els, {i: pairs[i][1] for i in rel}),
                       "id_a": SET.identity(rel), "id_b": SET.identity(els)})
    res = colimit_in_set(diagram)
    want = orbit_partition([("b", x) for x in elements],
                           [(("b", a), ("b", b)) for a, b in pairs])
    got = {}
    for x in elements:
        got.setdefault(res.cone.legs["b"](x), set()).add(("b", x))
    assert frozenset(frozenset(c) for c in got.values()) == want


# ------------------------------------------------ limits of signatures


def test_signature_colimit_glues_columns_along_a_span():
    dom = flat_domain()
    lx = ListX(dom.sorts)
    sa = Signature(["a"], {"a": "p"}, dom.sorts)
    sb = Signature(["b"], {"b": "p"}, dom.sorts)
    sc = Signature(["c"], {"c": "p"}, dom.sorts)
    shape = span_shape()
    diagram = Passage(shape, lx, {"l": sa, "m": sc, "r": sb},
                      {"u": SigMorphism(sc, sa, {"c": "a"}),
                       "v": SigMorphism(sc, sb, {"c": "b"}),
                       "id_l": lx.identity(sa), "id_m": lx.identity(sc),
                       "id_r": lx.identity(sb)})
    res = colimit_in_listX(diagram)
    assert len(res.vertex.arity) == 1
    col = next(iter(res.vertex.arity))
    assert res.vertex.sorts[col] == "p"
    assert res.cone.legs["l"].index_map == {"a": col}

    tgt = Signature(["z", "w"], {"z": "p", "w": "q"}, dom.sorts)
    cand = Cone(diagram, tgt,
                {"l": SigMorphism(sa, tgt, {"a": "z"}),
                 "m": SigMorphism(sc, tgt, {"c": "z"}),
                 "r": SigMorphism(sb, tgt, {"b": "z"})}, colimit=True)
    assert res.mediator(cand).index_map == {col: "z"}

    # legs that split a glued class cannot factor
    wide = Signature(["z", "w"], {"z": "p", "w": "p"}, dom.sorts)
    bad = Cone(diagram, wide,
               {"l": SigMorphism(sa, wide, {"a": "z"}),
                "m": SigMorphism(sc, wide, {"c": "z"}),
                "r": SigMorphism(sb, wide, {"b": "w"})},
               colimit=True, check=False)
    with pytest.raises(NoMediator):
        res.mediator(bad)


def test_signature_colimit_of_one_object_is_a_renaming():
    dom = flat_domain()
    lx = ListX(dom.sorts)
    sig = Signature(["a", "b"], {"a": "p", "b": "q"}, dom.sorts)
    shape = discrete_category(["x"])
    diagram = Passage(shape, lx, {"x": sig}, {"id_x": lx.identity(sig)})
    res = colimit_in_listX(diagram)
    leg = res.cone.legs["x"]
    assert len(set(leg.index_map.values())) == 2
    assert sorted(res.vertex.sorts.values()) == ["p", "q"]


def test_corrupted_reindexing_reports_a_sort_conflict():
    dom = flat_domain()
    lx = ListX(dom.sorts)
    src = Signature(["a"], {"a": "p"}, dom.sorts)
    tgt = Signature(["b", "c"], {"b": "p", "c": "q"}, dom.sorts)
    h = SigMorphism(src, tgt, {"a": "b"})
    shape = free_on_acyclic_graph(["x", "y"], [("e", "x", "y")])
    diagram = Passage(shape, lx, {"x": src, "y": tgt},
                      {"e": h, "id_x": lx.identity(src),
                       "id_y": lx.identity(tgt)})
    h.index_map["a"] = "c"  # cross the sorts behind the validator's back
    with pytest.raises(SortGluingConflict):
        colimit_in_listX(diagram)


def test_signature_limit_pairs_columns_sort_by_sort():
    dom = flat_domain()
    lx = ListX(dom.sorts)
    sa = Signature(["a", "b"], {"a": "p", "b": "q"}, dom.sorts)
    sb = Signature(["c"], {"c": "p"}, dom.sorts)
    shape = discrete_category(["x", "y"])
    diagram = Passage(shape, lx, {"x": sa, "y": sb},
                      {"id_x": lx.identity(sa), "id_y": lx.identity(sb)})
    res = limit_in_listX(diagram)
    # the lone q column has no partner, so only the p pair survives
    assert len(res.vertex.arity) == 1
    col = next(iter(res.vertex.arity))
    assert res.vertex.sorts[col] == "p"
    assert res.cone.legs["x"].index_map[col] == "a"
    assert res.cone.legs["y"].index_map[col] == "c"

    probe = Signature(["z"], {"z": "p"}, dom.sorts)
    cand = Cone(diagram, probe,
                {"x": SigMorphism(probe, sa, {"z": "a"}),
                 "y": SigMorphism(probe, sb, {"z": "c"})})
    u = res.mediator(cand)
    assert u.index_map == {"z": col}


def test_signature_limit_over_the_empty_shape_is_one_column_per_sort():
    dom = flat_domain()
    lx = ListX(dom.sorts)
    diagram = Passage(empty_category(), lx, {}, {})
    res = limit_in_listX(diagram)
    assert sorted(res.vertex.sorts.values()) == ["p", "q"]


def test_varying_sort_sets_glue_sorts_and_columns_together():
    sx = Signature(["a"], {"a": "u1"}, {"u1", "u2"})
    sy = Signature(["b"], {"b": "w"}, {"w"})
    h = ListMor(sx, sy, {"a": "b"}, {"u1": "w", "u2": "w"})
    shape = free_on_acyclic_graph(["x", "y"], [("e", "x", "y")])
    diagram = Passage(shape, LIST, {"x": sx, "y": sy},
                      {"e": h, "id_x": LIST.identity(sx),
                       "id_y": LIST.identity(sy)})
    res = colimit_in_list(diagram)
    assert len(res.vertex.sort_set) == 1
    assert len(res.vertex.arity) == 1

    out = Signature(["z"], {"z": "v"}, {"v"})
    cand = Cone(diagram, out,
                {"x": ListMor(sx, out, {"a": "z"}, {"u1": "v", "u2": "v"}),
                 "y": ListMor(sy, out, {"b": "z"}, {"w": "v"})},
                colimit=True)
    u = res.mediator(cand)
    assert set(u.index_map.values()) == {"z"}
    assert set(u.sort_fn.values()) == {"v"}


# --------------------------------------------------- canonical tables


def test_canonical_table_is_invariant_under_renaming():
    dom = flat_domain()
    sig = Signature(["a", "b"], {"a": "p", "b": "q"}, dom.sorts)
    t = Table(SignedDomain(sig, dom), ["k", "m"],
              {"k": tuple_make({"a": 1, "b": 2}),
               "m": tuple_make({"a": 2, "b": 3})})
    sig2 = Signature(["cc", "dd"], {"cc": "p", "dd": "q"}, dom.sorts)
    t2 = Table(SignedDomain(sig2, dom), ["x", "y"],
               {"y": tuple_make({"cc": 1, "dd": 2}),
                "x": tuple_make({"cc": 2, "dd": 3})})
    assert canonical_table(t)[0] == canonical_table(t2)[0]
    iso = table_iso(t, t2)
    assert iso is not None and iso.src == t and iso.tgt == t2
    assert len(set(iso.key_map.values())) == 2


def test_canonical_table_resolves_same_sort_column_ties():
    dom = pair_domain()
    sig = Signature(["a", "b"], {"a": "s", "b": "s"}, dom.sorts)
    t = Table(SignedDomain(sig, dom), ["k1", "k2"],
              {"k1": tuple_make({"a": 1, "b": 2}),
               "k2": tuple_make({"a": 2, "b": 1})})
    sw = Table(SignedDomain(sig, dom), ["k1", "k2"],
               {"k1": tuple_make({"a": 2, "b": 1}),
                "k2": tuple_make({"a": 1, "b": 2})})
    assert canonical_table(t)[0] == canonical_table(sw)[0]
    assert table_iso(t, sw) is not None


def test_table_iso_rejects_genuinely_different_tables():
    dom = pair_domain()
    t1 = Table(SignedDomain(one_col(dom, "a"), dom), ["k1", "k2"],
               {"k1": tuple_make({"a": 1}), "k2": tuple_make({"a": 2})})
    t2 = Table(SignedDomain(one_col(dom, "a"), dom), ["k1", "k2"],
               {"k1": tuple_make({"a": 1}), "k2": tuple_make({"a": 1})})
    assert table_iso(t1, t2) is None


@settings(deadline=None, max_examples=40)
@given(st.data())
def test_canonical_table_ignores_label_choices(data):
    dom = flat_domain()
    t = data.draw(tables(dom))
    sig2 = Signature([("z", i) for i in t.sig.arity],
                     {("z", i): t.sig.sorts[i] for i in t.sig.arity},
                     dom.sorts)
    relabeled = Table(
        SignedDomain(sig2, dom), [("w", k) for k in t.keys],
        {("w", k): tuple_make({("z", i): tuple_get(t.tuples[k], i)
                               for i in t.sig.arity})
         for k in t.keys})
    assert canonical_table(t)[0] == canonical_table(relabeled)[0]
    assert table_iso(t, relabeled) is not None


# ---------------------------------------------------------------- joins


def test_join_of_the_span_fixture_has_the_expected_rows():
    res = limit_tbl(span_db())
    t = res.vertex
    assert len(t.sig.arity) == 1
    col = next(iter(t.sig.arity))
    rows = {}
    for key in t.keys:
        fam = dict(key)
        rows[(fam["l"], fam["m"], fam["r"])] = tuple_get(t.tuples[key], col)
    assert rows == {("k1", "m1", "r1"): 1,
                    ("k1", "m1", "r2"): 1,
                    ("k2", "m2", "r3"): 2}


def test_join_matches_the_nested_loop_oracle():
    for db in (span_db(), arrow_join_db()):
        assert limit_tbl(db).vertex == nested_loop_join(db)


def test_join_is_universal_among_table_cones():
    db = span_db()
    res = limit_tbl(db)
    dom = db.domain
    ta = TblA(dom)
    apex = one_key_table(dom, "z", 1, key="w")
    legs = {"l": TableMorphism(apex, db.at("l"),
                               SigMorphism(one_col(dom, "a"),
                                           one_col(dom, "z"), {"a": "z"}),
                               {"w": "k1"}),
            "m": TableMorphism(apex, db.at("m"),
                               SigMorphism(one_col(dom, "c"),
                                           one_col(dom, "z"), {"c": "z"}),
                               {"w": "m1"}),
            "r": TableMorphism(apex, db.at("r"),
                               SigMorphism(one_col(dom, "b"),
                                           one_col(dom, "z"), {"b": "z"}),
                               {"w": "r2"})}
    cand = Cone(db.diagram, apex, legs)
    u = res.mediator(cand)
    assert u.src == apex and u.tgt == res.vertex
    assert dict(u.key_map["w"]) == {"l": "k1", "m": "m1", "r": "r2"}
    matches = [h for h in ta.hom(apex, res.vertex)
               if all(ta.mor_eq(ta.compose(h, res.cone.legs[r]), legs[r])
                      for r in db.shape.objects)]
    assert len(matches) == 1 and matches[0] == u

    # a family that breaks the middle match is refused
    bad_leg = TableMorphism(apex, db.at("r"),
                            SigMorphism(one_col(dom, "b"),
                                        one_col(dom, "z"), {"b": "z"}),
                            {"w": "r3"}, check=False)
    bad = Cone(db.diagram, apex, dict(legs, r=bad_leg), check=False)
    with pytest.raises(NoMediator):
        res.mediator(bad)


def test_join_of_a_single_table_wraps_it_bijectively():
    dom = pair_domain()
    t = Table(SignedDomain(one_col(dom, "a"), dom), ["k1", "k2"],
              {"k1": tuple_make({"a": 1}), "k2": tuple_make({"a": 2})})
    db = single_db(dom, "x", t)
    res = limit_tbl(db)
    assert table_iso(res.vertex, t) is not None
    assert {dict(k)["x"] for k in res.vertex.keys} == set(t.keys)


def test_join_over_the_empty_shape_is_the_one_row_table():
    dom = pair_domain()
    res = limit_tbl(db_initial(dom))
    assert len(res.vertex.sig.arity) == 0
    assert res.vertex.keys == frozenset({()})


# ----------------------------------------------------------------- sums


def test_sum_of_the_span_fixture_glues_keys_and_columns():
    res = colimit_tbl(span_db())
    t = res.vertex
    assert len(t.sig.arity) == 1
    col = next(iter(t.sig.arity))
    vals = {k: tuple_get(t.tuples[k], col) for k in t.keys}
    assert vals == {("l", "k1"): 1, ("l", "k2"): 2}
    assert res.cone.legs["r"].key_map["r2"] == ("l", "k1")


def test_sum_mediates_cocones_uniquely():
    db = span_db()
    res = colimit_tbl(db)
    dom = db.domain
    ta = TblA(dom)
    out_sig = one_col(dom, "y")
    out = Table(SignedDomain(out_sig, dom), ["c1", "c2"],
                {"c1": tuple_make({"y": 1}), "c2": tuple_make({"y": 2})})
    legs = {"l": TableMorphism(db.at("l"), out,
                               SigMorphism(out_sig, one_col(dom, "a"),
                                           {"y": "a"}),
                               {"k1": "c1", "k2": "c2"}),
            "m": TableMorphism(db.at("m"), out,
                               SigMorphism(out_sig, one_col(dom, "c"),
                                           {"y": "c"}),
                               {"m1": "c1", "m2": "c2"}),
            "r": TableMorphism(db.at("r"), out,
                               SigMorphism(out_sig, one_col(dom, "b"),
                                           {"y": "b"}),
                               {"r1": "c1", "r2": "c1", "r3": "c2"})}
    cand = Cone(db.diagram, out, legs, colimit=True)
    u = res.mediator(cand)
    assert u.key_map == {("l", "k1"): "c1", ("l", "k2"): "c2"}
    matches = [h for h in ta.hom(res.vertex, out)
               if all(ta.mor_eq(ta.compose(res.cone.legs[r], h), legs[r])
                      for r in db.shape.objects)]
    assert len(matches) == 1 and matches[0] == u


def test_inconsistent_key_gluing_is_reported():
    db = span_db()
    db.arrow("v").key_map["r1"] = "m2"  # corrupt one arrow after validation
    with pytest.raises(TupleGluingInconsistent):
        colimit_tbl(db)


def test_sum_of_a_single_table_wraps_it_bijectively():
    dom = pair_domain()
    t = Table(SignedDomain(one_col(dom, "a"), dom), ["k1", "k2"],
              {"k1": tuple_make({"a": 1}), "k2": tuple_make({"a": 2})})
    res = colimit_tbl(single_db(dom, "x", t))
    assert table_iso(res.vertex, t) is not None


def test_sum_over_the_empty_shape_has_free_columns_and_no_rows():
    dom = flat_domain()
    res = colimit_tbl(db_initial(dom))
    assert res.vertex.keys == frozenset()
    assert sorted(res.vertex.sig.sorts.values()) == ["p", "q"]


# ------------------------------------------------- general databases


def test_general_presentation_over_one_domain_still_joins():
    db = span_db()
    gen = database_to_general(db)
    assert gen.domain is None
    assert limit_tbl(gen).vertex == limit_tbl(db).vertex
    assert colimit_tbl(gen).vertex == colimit_tbl(db).vertex


def test_tables_over_different_domains_are_refused():
    d1 = pair_domain()
    d2 = one_sort_domain()
    t1 = one_key_table(d1, "a", 1)
    t2 = Table(SignedDomain(Signature(["b"], {"b": "r"}, d2.sorts), d2),
               ["m"], {"m": tuple_make({"b": 4})})
    shape = discrete_category(["x", "y"])
    diagram = Passage(opposite(shape), TBL, {"x": t1, "y": t2},
                      {"id_x": TBL.identity(t1), "id_y": TBL.identity(t2)})
    db = Database(shape, diagram)
    with pytest.raises(UnsupportedVaryingTypeDomains):
        limit_tbl(db)
    with pytest.raises(UnsupportedVaryingTypeDomains):
        colimit_tbl(db)
    with pytest.raises(UnsupportedVaryingTypeDomains):
        limit_tbl(Database(empty_category(),
                           Passage(empty_category(), TBL, {}, {})))


def test_arrows_crossing_a_real_infomorphism_are_refused():
    dom = flat_domain()
    twist = Infomorphism(dom, dom, {"p": "q", "q": "p"}, {1: 3, 2: 2, 3: 1})
    sig_x = Signature(["b"], {"b": "p"}, dom.sorts)
    sig_y = Signature(["c"], {"c": "q"}, dom.sorts)
    t_x = Table(SignedDomain(sig_x, dom), ["k0"],
                {"k0": tuple_make({"b": 2})})
    t_y = Table(SignedDomain(sig_y, dom), ["n0"],
                {"n0": tuple_make({"c": 2})})
    dm = DomMor(SignedDomain(sig_x, dom), SignedDomain(sig_y, dom),
                {"b": "c"}, twist)
    gm = GenTableMorphism(t_y, t_x, dm, {"n0": "k0"})
    shape = free_on_acyclic_graph(["x", "y"], [("e", "x", "y")])
    diagram = Passage(opposite(shape), TBL, {"x": t_x, "y": t_y},
                      {"e": gm, "id_x": TBL.identity(t_x),
                       "id_y": TBL.identity(t_y)})
    db = Database(shape, diagram)
    with pytest.raises(UnsupportedVaryingTypeDomains):
        limit_tbl(db)


# --------------------------------------------- the category of databases


def test_empty_shape_database_receives_exactly_one_morphism():
    dom = pair_domain()
    db = span_db()
    only = DbCat(dom).hom(db, db_initial(dom))
    assert len(only) == 1
    assert db_morphisms_equal(only[0], db_initial_morphism(db))


def test_database_sum_carries_both_tables_and_mediates_uniquely():
    dom = pair_domain()
    t1 = one_key_table(dom, "a", 1)
    t2 = Table(SignedDomain(Signature(["d"], {"d": "s"}, dom.sorts), dom),
               ["m"], {"m": tuple_make({"d": 2})})
    db1 = single_db(dom, "x", t1)
    db2 = single_db(dom, "z", t2)
    cop = db_coproduct(db1, db2)
    assert len(cop.db.shape.objects) == 2
    o1 = cop.to_first.shape.on_obj("x")
    assert cop.db.at(o1) == t1

    probe_sig = Signature(["a", "d"], {"a": "s", "d": "s"}, dom.sorts)
    t0 = Table(SignedDomain(probe_sig, dom), [], {})
    y = single_db(dom, "w", t0)
    n1 = DatabaseMorphism(
        y, db1, Passage(db1.shape, y.shape, {"x": "w"}, {"id_x": "id_w"}),
        {"x": TableMorphism(t0, t1,
                            SigMorphism(one_col(dom, "a"), probe_sig,
                                        {"a": "a"}), {})})
    n2 = DatabaseMorphism(
        y, db2, Passage(db2.shape, y.shape, {"z": "w"}, {"id_z": "id_w"}),
        {"z": TableMorphism(t0, t2,
                            SigMorphism(t2.sig, probe_sig, {"d": "d"}), {})})
    u = cop.mediate(n1, n2)
    assert db_morphisms_equal(compose_database_morphisms(u, cop.to_first), n1)
    assert db_morphisms_equal(compose_database_morphisms(u, cop.to_second), n2)
    good = [h for h in DbCat(dom).hom(y, cop.db)
            if db_morphisms_equal(
                compose_database_morphisms(h, cop.to_first), n1)
            and db_morphisms_equal(
                compose_database_morphisms(h, cop.to_second), n2)]
    assert len(good) == 1 and db_morphisms_equal(good[0], u)


def test_database_product_pairs_only_matching_tables():
    dom = pair_domain()
    t1 = one_key_table(dom, "a", 1)
    em = Table(SignedDomain(Signature([], {}, dom.sorts), dom),
               ["m0"], {"m0": tuple_make({})})
    db1 = database_from_tables(discrete_category(["x", "y"]),
                               {"x": t1, "y": em}, {}, dom)
    db2 = single_db(dom, "z", t1)
    prod = db_product(db1, db2)
    both = pair_id("x", "z")
    assert prod.db.shape.objects == (both,)
    assert prod.db.at(both) == t1
    assert prod.from_first.shape.on_obj(both) == "x"

    # a compatible pair factors through the product
    yx = single_db(dom, "w", t1)
    ta = TblA(dom)
    n1 = DatabaseMorphism(
        db1, yx, Passage(yx.shape, db1.shape, {"w": "x"}, {"id_w": "id_x"}),
        {"w": ta.identity(t1)})
    n2 = DatabaseMorphism(
        db2, yx, Passage(yx.shape, db2.shape, {"w": "z"}, {"id_w": "id_z"}),
        {"w": ta.identity(t1)})
    u = prod.mediate(n1, n2)
    assert db_morphisms_equal(
        compose_database_morphisms(prod.from_first, u), n1)
    assert db_morphisms_equal(
        compose_database_morphisms(prod.from_second, u), n2)

    # shape images leaving the pullback are refused
    ye = single_db(dom, "w", em)
    n1_out = DatabaseMorphism(
        db1, ye, Passage(ye.shape, db1.shape, {"w": "y"}, {"id_w": "id_y"}),
        {"w": ta.identity(em)})
    n2_out = DatabaseMorphism(
        db2, ye, Passage(ye.shape, db2.shape, {"w": "z"}, {"id_w": "id_z"}),
        {"w": TableMorphism(t1, em, SigMorphism(em.sig, t1.sig, {}),
                            {"k": "m0"})})
    with pytest.raises(NoMediator):
        prod.mediate(n1_out, n2_out)

    # matching shapes with different components are refused too
    em2 = Table(SignedDomain(Signature([], {}, dom.sorts), dom),
                ["e1", "e2"], {"e1": tuple_make({}), "e2": tuple_make({})})
    y2 = single_db(dom, "w", em2)
    first = DatabaseMorphism(
        db1, y2, Passage(y2.shape, db1.shape, {"w": "x"}, {"id_w": "id_x"}),
        {"w": TableMorphism(t1, em2, SigMorphism(em2.sig, t1.sig, {}),
                            {"k": "e1"})})
    second = DatabaseMorphism(
        db2, y2, Passage(y2.shape, db2.shape, {"w": "z"}, {"id_w": "id_z"}),
        {"w": TableMorphism(t1, em2, SigMorphism(em2.sig, t1.sig, {}),
                            {"k": "e2"})})
    with pytest.raises(NoMediator):
        prod.mediate(first, second)


def test_join_action_on_a_database_morphism_projects_families():
    dom = pair_domain()
    t1 = Table(SignedDomain(one_col(dom, "a"), dom), ["k1", "k2"],
               {"k1": tuple_make({"a": 1}), "k2": tuple_make({"a": 2})})
    t2 = one_key_table(dom, "d", 2, key="m")
    ta = TblA(dom)
    x_db = database_from_tables(discrete_category(["x1", "x2"]),
                                {"x1": t1, "x2": t2}, {}, dom)
    y_db = single_db(dom, "y", t1)
    m = DatabaseMorphism(
        x_db, y_db,
        Passage(y_db.shape, x_db.shape, {"y": "x1"}, {"id_y": "id_x1"}),
        {"y": ta.identity(t1)})
    jx = limit_tbl(x_db)
    jy = limit_tbl(y_db)
    act = lim_passage_on_morphism(m, src_result=jx, tgt_result=jy)
    assert act.src == jx.vertex and act.tgt == jy.vertex
    for key in jx.vertex.keys:
        assert dict(act.key_map[key]) == {"y": dict(key)["x1"]}

    # identities act as identities, composites as composites
    assert lim_passage_on_morphism(identity_database_morphism(x_db)) == \
        ta.identity(jx.vertex)
    z_db = single_db(dom, "z", t1)
    m2 = DatabaseMorphism(
        y_db, z_db,
        Passage(z_db.shape, y_db.shape, {"z": "y"}, {"id_z": "id_y"}),
        {"z": ta.identity(t1)})
    both = compose_database_morphisms(m, m2)
    assert lim_passage_on_morphism(both) == \
        ta.compose(act, lim_passage_on_morphism(m2))


# ------------------------------------------------------ oracle and snapshots


def test_oracle_finds_poset_ends_as_terminal_and_initial():
    chain = free_on_acyclic_graph(["x", "y", "z"],
                                  [("e1", "x", "y"), ("e2", "y", "z")])
    nothing = Passage(empty_category(), chain, {}, {})
    assert oracle_universal(chain, nothing, "limit").vertex == "z"
    assert oracle_universal(chain, nothing, "colimit").vertex == "x"


def hand_pullback_category():
    """Five objects drawn by hand: P completes the square over C, D probes."""
    objects = ["P", "A", "B", "C", "D"]
    morphisms = {
        "f": ("A", "C"), "g": ("B", "C"),
        "p1": ("P", "A"), "p2": ("P", "B"), "q": ("P", "C"),
        "d1": ("D", "A"), "d2": ("D", "B"), "dq": ("D", "C"),
        "u": ("D", "P"),
    }
    for o in objects:
        morphisms["id_" + o] = (o, o)
    identities = {o: "id_" + o for o in objects}
    table = {("p1", "f"): "q", ("p2", "g"): "q",
             ("d1", "f"): "dq", ("d2", "g"): "dq",
             ("u", "p1"): "d1", ("u", "p2"): "d2", ("u", "q"): "dq"}
    for m, (s, t) in morphisms.items():
        table[("id_" + s, m)] = m
        table[(m, "id_" + t)] = m
    return FinCategory(objects, morphisms, identities, table)


def test_oracle_recovers_the_hand_built_pullback():
    cat = hand_pullback_category()
    cospan = free_on_acyclic_graph(["a", "b", "c"],
                                   [("fa", "a", "c"), ("gb", "b", "c")])
    diagram = Passage(cospan, cat, {"a": "A", "b": "B", "c": "C"},
                      {"fa": "f", "gb": "g", "id_a": "id_A",
                       "id_b": "id_B", "id_c": "id_C"})
    res = oracle_universal(cat, diagram, "limit")
    assert res.vertex == "P"
    assert res.cone.legs == {"a": "p1", "b": "p2", "c": "q"}
    probe = Cone(diagram, "D", {"a": "d1", "b": "d2", "c": "dq"})
    assert res.mediator(probe) == "u"


def test_oracle_reports_missing_universal_cones():
    disc = discrete_category(["x", "y"])
    shape = discrete_category(["d1", "d2"])
    diagram = Passage(shape, disc, {"d1": "x", "d2": "y"},
                      {"id_d1": "id_x", "id_d2": "id_y"})
    with pytest.raises(NoUniversalCone):
        oracle_universal(disc, diagram, "limit")

    pp = parallel_pair()
    nothing = Passage(empty_category(), pp, {}, {})
    with pytest.raises(NoUniversalCone):
        oracle_universal(pp, nothing, "limit")


def test_oracle_agrees_with_the_set_limit_on_explicit_candidates():
    shape = discrete_category(["a", "b"])
    two = frozenset({0, 1})
    one = frozenset({2})
    diagram = set_diagram(shape, {"a": two, "b": one}, {})
    direct = limit_in_set(diagram)
    res = oracle_universal(SET, diagram, "limit",
                           candidates=[direct.vertex, two, one,
                                       frozenset({9})])
    med = res.mediator(direct.cone)
    back = direct.mediator(res.cone)
    assert SET.mor_eq(SET.compose(med, back), SET.identity(direct.vertex))
    assert SET.mor_eq(SET.compose(back, med), SET.identity(res.vertex))


def test_finite_snapshot_materializes_a_small_set_world():
    one = frozenset({0})
    two = frozenset({0, 1})
    snap = finite_snapshot(SET, [one, two])
    cat = snap.category
    assert len(cat.objects) == 2
    assert len(cat.morphisms) == 8  # 1 + 2 + 1 + 4
    i = snap.obj_id(two)
    assert cat.identities[i] == snap.mor_id(SET.identity(two))
    assert snap.decode_obj(i) == two


# ----------------------------------------------------------- continuity


def test_shape_projection_preserves_the_paired_limit():
    dom = pair_domain()
    t1 = one_key_table(dom, "a", 1)
    t2 = Table(SignedDomain(Signature(["d"], {"d": "s"}, dom.sorts), dom),
               ["m"], {"m": tuple_make({"d": 2})})
    db1 = single_db(dom, "x", t1)
    db2 = single_db(dom, "z", t2)
    sumdb = db_coproduct(db1, db2).db
    dc = DbCat(dom)
    shape = discrete_category(["d1", "d2"])
    diagram = Passage(shape, dc, {"d1": db1, "d2": db2},
                      {"id_d1": dc.identity(db1), "id_d2": dc.identity(db2)})
    report = check_continuity(
        shape_projection(dom), diagram, "limit",
        source_candidates=[db1, db2, sumdb],
        target_candidates=[db1.shape, db2.shape, sumdb.shape])
    assert report


def test_shape_projection_sends_the_terminal_database_to_the_empty_context():
    dom = pair_domain()
    db1 = single_db(dom, "x", one_key_table(dom, "a", 1))
    none = db_initial(dom)
    diagram = Passage(empty_category(), DbCat(dom), {}, {})
    report = check_continuity(shape_projection(dom), diagram, "limit",
                              source_candidates=[db1, none],
                              target_candidates=[db1.shape, none.shape])
    assert report


def test_continuity_failure_is_reported_not_raised():
    dom = pair_domain()
    db1 = single_db(dom, "x", one_key_table(dom, "a", 1))
    disc = discrete_category(["u", "v"])
    collapse = Passage(DbCat(dom), disc, lambda db: "u", lambda m: "id_u")
    diagram = Passage(empty_category(), DbCat(dom), {}, {})
    report = check_continuity(collapse, diagram, "limit",
                              source_candidates=[db1, db_initial(dom)],
                              target_candidates=["u", "v"])
    assert not report
    assert "0 factorizations" in report.details


# ------------------------------------------------------- Kan extensions


def point_to_pair():
    pt = terminal_category()
    disc = discrete_category(["u", "v"])
    k = Passage(pt, disc, {"*": "u"}, {"id_*": "id_u"})
    two = frozenset({1, 2})
    s = Passage(pt, SET, {"*": two}, {"id_*": SET.identity(two)})
    return pt, disc, k, s


def test_extensions_along_a_point_inclusion_have_known_sizes():
    _, _, k, s = point_to_pair()
    ext = lan(k, s)
    assert len(ext.passage.on_obj("u")) == 2
    assert ext.passage.on_obj("v") == frozenset()
    unit = ext.connector.at("*")
    assert unit.src == frozenset({1, 2})
    assert len(set(unit.mapping.values())) == 2

    rext = ran(k, s)
    assert len(rext.passage.on_obj("u")) == 2
    assert len(rext.passage.on_obj("v")) == 1


def test_left_extension_factors_each_comparison_exactly_once():
    _, disc, k, s = point_to_pair()
    five_six = frozenset({5, 6})
    seven = frozenset({7})
    s1 = Passage(disc, SET, {"u": five_six, "v": seven},
                 {"id_u": SET.identity(five_six),
                  "id_v": SET.identity(seven)})
    ext = lan(k, s)
    dc = DiagramCategory(disc)
    for alpha in all_bridges(s, compose_passages(k, s1)):
        beta = ext.factor(alpha, s1)
        matches = [b for b in dc.hom(ext.passage, s1)
                   if bridges_equal(
                       vertical_compose(ext.connector, whisker_left(k, b)),
                       alpha)]
        assert len(matches) == 1
        assert bridges_equal(matches[0], beta)


def arrow_to_chain():
    arrow = free_on_acyclic_graph(["a", "b"], [("e", "a", "b")])
    chain = free_on_acyclic_graph(["x", "y", "z"],
                                  [("e1", "x", "y"), ("e2", "y", "z")])
    k = Passage(arrow, chain, {"a": "x", "b": "y"},
                {"e": "e1", "id_a": "id_x", "id_b": "id_y"})
    return arrow, chain, k


def test_extension_adjunction_triangles_hold_on_samples():
    arrow, chain, k = arrow_to_chain()
    s = set_diagram(arrow, {"a": {1, 2}, "b": {3}}, {"e": {1: 3, 2: 3}})
    s1 = set_diagram(chain, {"x": {1}, "y": {1, 2}, "z": {2}},
                     {"e1": {1: 1}, "e2": {1: 2, 2: 2}, "e1;e2": {1: 2}})
    left_adj, right_adj = kan_adjunction(k)
    left_adj.check_triangles((s,), (s1,))
    right_adj.check_triangles((s1,), (s,))


def test_extension_bijection_is_natural_on_both_sides():
    arrow, chain, k = arrow_to_chain()
    s = set_diagram(arrow, {"a": {1, 2}, "b": {3}}, {"e": {1: 3, 2: 3}})
    s0 = set_diagram(arrow, {"a": {0}, "b": {4}}, {"e": {0: 4}})
    s1 = set_diagram(chain, {"x": {5, 6}, "y": {7}, "z": {7}},
                     {"e1": {5: 7, 6: 7}, "e2": {7: 7}, "e1;e2": {5: 7, 6: 7}})
    s1p = set_diagram(chain, {"x": {8}, "y": {9}, "z": {9}},
                      {"e1": {8: 9}, "e2": {9: 9}, "e1;e2": {8: 9}})
    ext = lan(k, s)
    ext0 = lan(k, s0)
    dc_src = DiagramCategory(arrow)
    dc_tgt = DiagramCategory(chain)
    lan_p = kan_adjunction(k)[0].left
    alphas = all_bridges(s, compose_passages(k, s1))
    assert alphas
    for alpha in alphas:
        for g in dc_tgt.hom(s1, s1p):
            lhs = ext.factor(vertical_compose(alpha, whisker_left(k, g)), s1p)
            rhs = vertical_compose(ext.factor(alpha, s1), g)
            assert bridges_equal(lhs, rhs)
        for h in dc_src.hom(s0, s):
            lhs = ext0.factor(vertical_compose(h, alpha), s1)
            rhs = vertical_compose(lan_p.on_mor(h), ext.factor(alpha, s1))
            assert bridges_equal(lhs, rhs)


def test_left_extensions_compose_up_to_isomorphism():
    pt = terminal_category()
    arrow = free_on_acyclic_graph(["a", "b"], [("e", "a", "b")])
    chain = free_on_acyclic_graph(["x", "y", "z"],
                                  [("e1", "x", "y"), ("e2", "y", "z")])
    k1 = Passage(pt, arrow, {"*": "a"}, {"id_*": "id_a"})
    k2 = Passage(arrow, chain, {"a": "x", "b": "y"},
                 {"e": "e1", "id_a": "id_x", "id_b": "id_y"})
    two = frozenset({1, 2})
    s = Passage(pt, SET, {"*": two}, {"id_*": SET.identity(two)})
    both = lan(compose_passages(k1, k2), s)
    first = lan(k1, s)
    second = lan(k2, first.passage)
    alpha = vertical_compose(first.connector,
                             whisker_left(k1, second.connector))
    beta = both.factor(alpha, second.passage)
    for o in chain.objects:
        comp = beta.at(o)
        assert len(comp.src) == len(comp.tgt)
        assert len(set(comp.mapping.values())) == len(comp.src)


def test_signature_extensions_along_a_point_inclusion():
    dom = flat_domain()
    lx = ListX(dom.sorts)
    pt = terminal_category()
    disc = discrete_category(["u", "v"])
    k = Passage(pt, disc, {"*": "u"}, {"id_*": "id_u"})
    sig = Signature(["a", "b"], {"a": "p", "b": "q"}, dom.sorts)
    s = Passage(pt, lx, {"*": sig}, {"id_*": lx.identity(sig)})

    lext = lan_listX(k, s)
    assert len(lext.passage.on_obj("u").arity) == 2
    assert len(lext.passage.on_obj("v").arity) == 0
    assert sorted(lext.passage.on_obj("u").sorts.values()) == ["p", "q"]
    uc = lext.connector.at("*")
    assert len(set(uc.index_map.values())) == 2

    rext = ran_listX(k, s)
    assert len(rext.passage.on_obj("u").arity) == 2
    # over the empty slice each sort contributes one free column
    assert sorted(rext.passage.on_obj("v").sorts.values()) == ["p", "q"]

    tgt_u = Signature(["c", "d"], {"c": "p", "d": "q"}, dom.sorts)
    tgt_v = Signature(["e"], {"e": "p"}, dom.sorts)
    t = Passage(disc, lx, {"u": tgt_u, "v": tgt_v},
                {"id_u": lx.identity(tgt_u), "id_v": lx.identity(tgt_v)})
    alpha = Bridge(s, compose_passages(k, t),
                   {"*": SigMorphism(sig, tgt_u, {"a": "c", "b": "d"})})
    beta = lext.factor(alpha, t)
    assert bridges_equal(
        vertical_compose(lext.connector, whisker_left(k, beta)), alpha)

    alpha_r = Bridge(compose_passages(k, t), s,
                     {"*": SigMorphism(tgt_u, sig, {"c": "a", "d": "b"})})
    beta_r = rext.factor(alpha_r, t)
    assert bridges_equal(
        vertical_compose(whisker_left(k, beta_r), rext.connector), alpha_r)


# ------------------------------------------------- flattened indexed fibers


def chain2():
    return free_on_acyclic_graph(["x0", "x1"], [("s", "x0", "x1")])


def chain3():
    return free_on_acyclic_graph(["y0", "y1", "y2"],
                                 [("s1", "y0", "y1"), ("s2", "y1", "y2")])


def galois_indexing():
    """A two-point index with a monotone-map adjunction between chain fibers."""
    idx = free_on_acyclic_graph(["i", "j"], [("a", "i", "j")])
    c2, c3 = chain2(), chain3()
    left = Passage(c2, c3, {"x0": "y0", "x1": "y2"},
                   {"id_x0": "id_y0", "id_x1": "id_y2", "s": "s1;s2"})
    right = Passage(c3, c2, {"y0": "x0", "y1": "x0", "y2": "x1"},
                    {"id_y0": "id_x0", "id_y1": "id_x0", "id_y2": "id_x1",
                     "s1": "id_x0", "s2": "s", "s1;s2": "s"})
    unit = Bridge(identity_passage(c2), compose_passages(left, right),
                  {"x0": "id_x0", "x1": "id_x1"})
    counit = Bridge(compose_passages(right, left), identity_passage(c3),
                    {"y0": "id_y0", "y1": "s1", "y2": "id_y2"})
    wit = AdjunctionWitness(left, right, unit, counit)
    return IndexedAdjunction(idx, {"i": c2, "j": c3}, {"a": wit})


def test_flattening_a_terminal_index_reproduces_the_fiber():
    pt = terminal_category()
    fib = chain2()
    ix = IndexedAdjunction(pt, {"*": fib}, {})
    gt = grothendieck(ix)
    assert len(gt.total.objects) == len(fib.objects)
    assert len(gt.total.morphisms) == len(fib.morphisms)
    inc = gt.inclusions["*"]
    for f in fib.morphisms:
        assert inc.on_mor(f) in gt.total.morphisms


def test_flattened_monotone_adjunction_has_the_expected_homs():
    ix = galois_indexing()
    gt = grothendieck(ix)
    assert len(gt.total.objects) == 5
    assert len(gt.total.morphisms) == 13
    # the flattening of monotone maps between posets is again a poset
    for o1 in gt.total.objects:
        for o2 in gt.total.objects:
            assert len(gt.total.hom(o1, o2)) <= 1
    c3 = ix.fibers["j"]
    for x in ix.fibers["i"].objects:
        for y in c3.objects:
            lhs = len(gt.total.hom(gt.obj_id("i", x), gt.obj_id("j", y)))
            rhs = len(c3.hom(ix.left("a").on_obj(x), y))
            assert lhs == rhs


def test_both_flattening_conventions_give_isomorphic_totals():
    ix = galois_indexing()
    gt_op = grothendieck(ix, "opfibration")
    gt_fib = grothendieck(ix, "fibration")
    assert set(gt_op.total.objects) == set(gt_fib.total.objects)
    mor_map = {}
    for m in gt_op.total.morphisms:
        a, src_obj, acute, _, _ = gt_op.transpose(m)
        mor_map[m] = gt_fib.mor_id(a, src_obj, acute)
    # eager passage validation proves this renaming is functorial
    Passage(gt_op.total, gt_fib.total,
            {o: o for o in gt_op.total.objects}, mor_map)
    assert len(set(mor_map.values())) == len(mor_map)


def test_transpose_stores_matching_presentations():
    ix = galois_indexing()
    gt = grothendieck(ix)
    wit = ix.witness("a")
    c2 = ix.fibers["i"]
    seen = 0
    for _, (a, s, acute, grave, _) in gt.mor_data.items():
        if a != "a":
            continue
        seen += 1
        assert c2.mor_eq(grave, wit.right_mate(s, acute))
    assert seen == 4


def test_inclusion_bridges_determine_each_other_through_the_adjunction():
    ix = galois_indexing()
    gt = grothendieck(ix)
    total = gt.total
    wit = ix.witness("a")
    inc_i, inc_j = gt.inclusions["i"], gt.inclusions["j"]
    acute, grave = gt.acute_bridges["a"], gt.grave_bridges["a"]
    for b_obj in ix.fibers["j"].objects:
        expected = total.compose(acute.at(wit.right.on_obj(b_obj)),
                                 inc_j.on_mor(wit.counit.at(b_obj)))
        assert total.mor_eq(grave.at(b_obj), expected)
    for a_obj in ix.fibers["i"].objects:
        expected = total.compose(inc_i.on_mor(wit.unit.at(a_obj)),
                                 grave.at(wit.left.on_obj(a_obj)))
        assert total.mor_eq(acute.at(a_obj), expected)


def discrete_total_diagram(gt, picks):
    shape = discrete_category(sorted(picks))
    obj_map = {d: o for d, o in picks.items()}
    mor_map = {"id_" + d: gt.total.identities[o] for d, o in picks.items()}
    return Passage(shape, gt.total, obj_map, mor_map)


def test_structured_limit_matches_the_exhaustive_oracle():
    ix = galois_indexing()
    gt = grothendieck(ix)
    diagram = discrete_total_diagram(gt, {"d1": gt.obj_id("i", "x1"),
                                          "d2": gt.obj_id("j", "y1")})
    fast = groth_structured_limit(gt, diagram)
    slow = oracle_universal(gt.total, diagram, "limit")
    assert fast.vertex == slow.vertex == gt.obj_id("i", "x0")
    assert fast.cone.legs == slow.cone.legs
    probe_v = gt.obj_id("i", "x0")
    probe = Cone(diagram, probe_v,
                 {r: fast.cone.legs[r] for r in ("d1", "d2")})
    assert fast.mediator(probe) == gt.total.identities[probe_v]


def test_structured_colimit_matches_the_exhaustive_oracle():
    ix = galois_indexing()
    gt = grothendieck(ix)
    diagram = discrete_total_diagram(gt, {"d1": gt.obj_id("i", "x0"),
                                          "d2": gt.obj_id("j", "y0")})
    fast = groth_structured_colimit(gt, diagram)
    slow = oracle_universal(gt.total, diagram, "colimit")
    assert fast.vertex == slow.vertex == gt.obj_id("j", "y0")
    assert fast.cone.legs == slow.cone.legs
    top = gt.obj_id("j", "y2")
    probe = Cone(diagram, top,
                 {"d1": gt.total.hom(gt.obj_id("i", "x0"), top)[0],
                  "d2": gt.total.hom(gt.obj_id("j", "y0"), top)[0]},
                 colimit=True)
    assert fast.mediator(probe) == slow.mediator(probe)


def test_structured_limit_needs_a_complete_fiber():
    pt = terminal_category()
    fib = discrete_category(["A", "B"])
    ix = IndexedAdjunction(pt, {"*": fib}, {})
    gt = grothendieck(ix)
    diagram = discrete_total_diagram(gt, {"d1": gt.obj_id("*", "A"),
                                          "d2": gt.obj_id("*", "B")})
    with pytest.raises(FiberNotCocomplete):
        groth_structured_limit(gt, diagram)


def test_strictness_of_composite_transports_is_enforced():
    idx = free_on_acyclic_graph(["i", "j", "k"],
                                [("a", "i", "j"), ("b", "j", "k")])
    fib = chain2()
    collapse = Passage(fib, fib, {"x0": "x1", "x1": "x1"},
                       {"id_x0": "id_x1", "id_x1": "id_x1", "s": "id_x1"})
    with pytest.raises(StrictnessViolation):
        IndexedAdjunction(idx, {"i": fib, "j": fib, "k": fib},
                          {"a": identity_passage(fib),
                           "b": identity_passage(fib),
                           "a;b": collapse})


def z2_category():
    return FinCategory(["M"], {"id_M": ("M", "M"), "g": ("M", "M")},
                       {"M": "id_M"},
                       {("id_M", "id_M"): "id_M", ("id_M", "g"): "g",
                        ("g", "id_M"): "g", ("g", "g"): "id_M"})


def z2_identity_witness(fib, unit_comp, counit_comp):
    ident = identity_passage(fib)
    double = compose_passages(ident, ident)
    return AdjunctionWitness(ident, ident,
                             Bridge(identity_passage(fib), double,
                                    {"M": unit_comp}),
                             Bridge(double, identity_passage(fib),
                                    {"M": counit_comp}))


def test_twisted_composite_units_are_rejected():
    # (Id, Id, g, g) is a perfectly fine adjunction witness on its own, but
    # installing it as the composite of two plain identity witnesses breaks
    # the pasting rule that makes mates compose.
    idx = free_on_acyclic_graph(["i", "j", "k"],
                                [("a", "i", "j"), ("b", "j", "k")])
    fib = z2_category()
    plain = z2_identity_witness(fib, "id_M", "id_M")
    twisted = z2_identity_witness(fib, "g", "g")
    twisted.check_triangles(("M",), ("M",))
    with pytest.raises(StrictnessViolation):
        IndexedAdjunction(idx, {"i": fib, "j": fib, "k": fib},
                          {"a": plain, "b": plain, "a;b": twisted})
    fine = IndexedAdjunction(idx, {"i": fib, "j": fib, "k": fib},
                             {"a": plain, "b": plain, "a;b": plain})
    assert fine.has_adjoint("a;b")


def test_push_forward_only_transports_flatten_but_cannot_pull_back():
    idx = free_on_acyclic_graph(["i", "j"], [("a", "i", "j")])
    one_obj = discrete_category(["A"])
    two_obj = discrete_category(["B1", "B2"])
    push = Passage(one_obj, two_obj, {"A": "B1"}, {"id_A": "id_B1"})
    ix = IndexedAdjunction(idx, {"i": one_obj, "j": two_obj}, {"a": push})
    assert not ix.has_adjoint("a")
    with pytest.raises(MissingAdjunctionWitness):
        ix.witness("a")
    gt = grothendieck(ix)
    assert len(gt.total.objects) == 3
    cross = [m for m in gt.total.morphisms if gt.transpose(m)[0] == "a"]
    assert len(cross) == 1
    assert gt.transpose(cross[0])[3] is None
    assert "a" not in gt.grave_bridges
    with pytest.raises(MissingAdjunctionWitness):
        grothendieck(ix, "fibration")
    diagram = discrete_total_diagram(gt, {"d1": gt.obj_id("i", "A"),
                                          "d2": gt.obj_id("j", "B1")})
    with pytest.raises(MissingAdjunctionWitness):
        groth_structured_limit(gt, diagram)


# ----------------------------------- flattened fibers over an infomorphism


def retag_sig(sig, sort_set, tr):
    return Signature([tr.get(i, i) for i in sig.arity],
                     {tr.get(i, i): sig.sorts[i] for i in sig.arity},
                     sort_set)


def retag_mor(h, sort_set, tr):
    return SigMorphism(
        retag_sig(h.src, sort_set, tr), retag_sig(h.tgt, sort_set, tr),
        {tr.get(i, i): tr.get(h.index_map[i], h.index_map[i])
         for i in h.src.arity})


def signature_fiber_indexing():
    """Snapshot the signature fibers on both sides of a sort translation.

    The pull-back transport renames indices to pairs, so a literally closed
    finite fiber does not exist; both transports are conjugated by the
    canonical renaming before being installed on the snapshots.
    """
    info = flat_infomorphism()  # sorts {r} -> {p, q}
    src_sorts, tgt_sorts = info.source.sorts, info.target.sorts
    lx_s, lx_t = ListX(src_sorts), ListX(tgt_sorts)
    sig0_s = Signature([], {}, src_sorts)
    sig1_s = Signature(["i1"], {"i1": "r"}, src_sorts)
    sig0_t = Signature([], {}, tgt_sorts)
    sig1p = Signature(["j1"], {"j1": "p"}, tgt_sorts)
    sig1q = Signature(["j1"], {"j1": "q"}, tgt_sorts)
    snap_s = finite_snapshot(lx_s, [sig0_s, sig1_s])
    snap_t = finite_snapshot(lx_t, [sig0_t, sig1p, sig1q])
    adj = list_fiber_adjunction(info.sort_map, src_sorts, tgt_sorts)
    push = {"i1": "j1"}
    pull = {("j1", "r"): "i1"}

    lobj, lmor = {}, {}
    for o in snap_s.category.objects:
        img = adj.left.on_obj(snap_s.decode_obj(o))
        lobj[o] = snap_t.obj_id(retag_sig(img, tgt_sorts, push))
    for m in snap_s.category.morphisms:
        img = adj.left.on_mor(snap_s.decode_mor(m))
        lmor[m] = snap_t.mor_id(retag_mor(img, tgt_sorts, push))
    left_t = Passage(snap_s.category, snap_t.category, lobj, lmor)

    robj, rmor = {}, {}
    for o in snap_t.category.objects:
        img = adj.right.on_obj(snap_t.decode_obj(o))
        robj[o] = snap_s.obj_id(retag_sig(img, src_sorts, pull))
    for m in snap_t.category.morphisms:
        img = adj.right.on_mor(snap_t.decode_mor(m))
        rmor[m] = snap_s.mor_id(retag_mor(img, src_sorts, pull))
    right_t = Passage(snap_t.category, snap_s.category, robj, rmor)

    unit = Bridge(identity_passage(snap_s.category),
                  compose_passages(left_t, right_t),
                  {o: snap_s.category.identities[o]
                   for o in snap_s.category.objects})
    eps = {}
    round_trip = compose_passages(right_t, left_t)
    for o in snap_t.category.objects:
        below = snap_t.decode_obj(round_trip.on_obj(o))
        above = snap_t.decode_obj(o)
        eps[o] = snap_t.mor_id(SigMorphism(below, above,
                                           {i: i for i in below.arity}))
    counit = Bridge(round_trip, identity_passage(snap_t.category), eps)
    wit = AdjunctionWitness(left_t, right_t, unit, counit)
    idx = free_on_acyclic_graph(["i", "j"], [("a", "i", "j")])
    ix = IndexedAdjunction(idx, {"i": snap_s.category, "j": snap_t.category},
                           {"a": wit})
    return info, adj, snap_s, snap_t, grothendieck(ix)


def test_flattened_signature_fibers_match_the_cross_domain_morphisms():
    info, adj, snap_s, snap_t, gt = signature_fiber_indexing()
    lx_t = ListX(info.target.sorts)
    one = terminal_category()
    for os in snap_s.category.objects:
        s_sig = snap_s.decode_obj(os)
        src_sd = SchemedDomain(
            one, constant_passage(one, ListX(info.source.sorts), s_sig),
            info.source)
        for ot in snap_t.category.objects:
            t_sig = snap_t.decode_obj(ot)
            tgt_sd = SchemedDomain(
                one, constant_passage(one, lx_t, t_sig), info.target)
            count = 0
            for g in lx_t.hom(adj.left.on_obj(s_sig), t_sig):
                SchemedDomainMorphismAlong(src_sd, tgt_sd,
                                           identity_passage(one), info,
                                           grave={"*": g})
                count += 1
            total_hom = gt.total.hom(gt.obj_id("i", os),
                                     gt.obj_id("j", ot))
            assert len(total_hom) == count


def test_snapshot_transpose_agrees_with_the_filled_in_schemed_morphism():
    info, adj, snap_s, snap_t, gt = signature_fiber_indexing()
    lx_s = ListX(info.source.sorts)
    lx_t = ListX(info.target.sorts)
    sig1_s = Signature(["i1"], {"i1": "r"}, info.source.sorts)
    sig1p = Signature(["j1"], {"j1": "p"}, info.target.sorts)
    one = terminal_category()
    src_sd = SchemedDomain(one, constant_passage(one, lx_s, sig1_s),
                           info.source)
    tgt_sd = SchemedDomain(one, constant_passage(one, lx_t, sig1p),
                           info.target)
    g = lx_t.hom(adj.left.on_obj(sig1_s), sig1p)[0]
    schemed = SchemedDomainMorphismAlong(src_sd, tgt_sd,
                                         identity_passage(one), info,
                                         grave={"*": g})
    filled = levo_dextro_schemed(schemed)
    assert filled.acute.at("*").index_map == {"i1": ("j1", "r")}

    os1 = snap_s.obj_id(sig1_s)
    otp = snap_t.obj_id(sig1p)
    m = gt.total.hom(gt.obj_id("i", os1), gt.obj_id("j", otp))[0]
    _, _, _, grave_id, _ = gt.transpose(m)
    # the snapshot mate is the same morphism with the pair index renamed back
    assert snap_s.decode_mor(grave_id).index_map == {"i1": "i1"}
