import pytest
from hypothesis import given, settings

import gen
import oracles
from satis.errors import DuplicateId, InvalidBody, InvalidSignature, UnknownConcept
from satis.fragments import (
    ACHIEVED_BY, VIA_FRAGMENT, Catalog, Fragment, FragmentKind, add_fragment, check_fragment,
    compile_queries, compile_to_rule, export_rules, find_matching, fragment_iri, fragment_to_rdf,
    fragments_from_rdf, signature_matches, specificity,
)
from satis.mapmodel import ANONYMOUS, ANY_VERB, Intention, Map, Section, Strategy, paths, section_to_rdf
from satis.rdf import BlankNode, Graph, Iri, Triple
from satis.render import RenderRequest, goal_section, render
from satis.sparql import evaluate, parse_query, serialize_query
from satis.turtle import parse_turtle, serialize_turtle
from satis.vocab import DOM, PROCESS


def d(name):
    return Iri(DOM + name)


HOMOGENISE = Intention(d("Homogenise"), d("Image"))


def _goal(obj="Image", manner="Debiasing"):
    return goal_section(d("Homogenise"), d(obj), d(manner) if manner else None)


def test_debias_fragment_accepted(canonical):
    f = canonical.catalog["debias"]
    check_fragment(f, canonical.ontology)
    assert f.kind is FragmentKind.OPERATIONAL and f.body.variables == ("service",)
    assert f.iri == fragment_iri("debias")


def test_wildcard_target_rejected(canonical):
    f = canonical.catalog["debias"]
    bad = Fragment("x", f.kind, Section(f.signature.source, Intention(ANY_VERB, d("Image")), f.signature.strategy), f.body)
    with pytest.raises(InvalidSignature):
        check_fragment(bad)


def test_stop_target_rejected(canonical):
    f = canonical.catalog["debias"]
    bad = Fragment("x", f.kind, Section(Intention.start(), Intention.stop()), f.body)
    with pytest.raises(InvalidSignature):
        check_fragment(bad)


def test_operational_body_projects_one_variable(canonical):
    q = parse_query("select ?s ?o where { ?s ?p ?o }")
    with pytest.raises(InvalidBody):
        check_fragment(Fragment("x", FragmentKind.OPERATIONAL, _goal(), q))


def test_intentional_preprocess_accepted(preprocess):
    check_fragment(preprocess.catalog["preprocess"], preprocess.ontology)


def test_invalid_and_cyclic_bodies_rejected():
    broken = Map("b", [Section(Intention.start(), HOMOGENISE)])
    with pytest.raises(InvalidBody):
        check_fragment(Fragment("x", FragmentKind.INTENTIONAL, _goal(), broken))
    looping = Map("c", [
        Section(Intention.start(), HOMOGENISE),
        Section(HOMOGENISE, HOMOGENISE, Strategy(d("Rotation"))),
        Section(HOMOGENISE, Intention.stop()),
    ])
    with pytest.raises(InvalidBody):
        check_fragment(Fragment("y", FragmentKind.INTENTIONAL, _goal(), looping))


def test_unknown_concept_in_fragment(canonical):
    f = canonical.catalog["debias"]
    bad = Fragment("x", f.kind, _goal(manner="Juggling"), f.body)
    with pytest.raises(UnknownConcept):
        check_fragment(bad, canonical.ontology)


def test_duplicate_id(canonical):
    with pytest.raises(DuplicateId):
        add_fragment(canonical.catalog, canonical.catalog["debias"])


def test_add_is_persistent(canonical):
    f = canonical.catalog["debias"]
    bigger = add_fragment(canonical.catalog, Fragment("debias2", f.kind, f.signature, f.body), canonical.ontology)
    assert len(bigger) == 2 and len(canonical.catalog) == 1


def test_signature_matching(canonical):
    f, onto = canonical.catalog["debias"], canonical.ontology
    assert signature_matches(f, _goal(), onto)
    assert not signature_matches(f, _goal(manner="Denoising"), onto)
    assert signature_matches(f, _goal(obj="MRImage"), onto)
    assert signature_matches(f, _goal(manner=None), onto)


def test_find_matching(canonical):
    assert [f.id for f in find_matching(canonical.catalog, _goal(), canonical.ontology)] == ["debias"]
    assert find_matching(Catalog(), _goal(), canonical.ontology) == []


def test_specific_fragment_first(canonical):
    f = canonical.catalog["debias"]
    general = Fragment("aaa-general", f.kind, Section(Intention.start(), HOMOGENISE, ANONYMOUS), f.body)
    cat = add_fragment(canonical.catalog, general, canonical.ontology)
    assert [x.id for x in find_matching(cat, _goal(), canonical.ontology)] == ["debias", "aaa-general"]
    assert specificity(f) == 1 and specificity(general) == 3


def test_specificity_levels():
    q = parse_query("select ?s where { ?s ?p ?o }")
    source = Intention(d("Homogenise"), d("Image"))
    target = Intention(d("Align"), d("Image"))
    mk = lambda src, st: Fragment("f", FragmentKind.OPERATIONAL, Section(src, target, st), q)
    assert [specificity(mk(source, Strategy(d("Rotation")))), specificity(mk(Intention.start(), Strategy(d("Rotation")))),
            specificity(mk(source, ANONYMOUS)), specificity(mk(Intention.start(), ANONYMOUS))] == [0, 1, 2, 3]


def test_concrete_rule_for_debias(canonical):
    (rule,) = compile_queries(canonical.catalog["debias"])
    assert rule.form == "construct"
    preds = [t.predicate for t in rule.patterns if t.predicate.value.startswith(PROCESS)]
    assert len(preds) == 3
    assert Triple(rule.template[0].subject, VIA_FRAGMENT, fragment_iri("debias")) in rule.template


def test_one_path_two_sections_gives_two_premises():
    body = Map("m", [Section(Intention.start(), HOMOGENISE, Strategy(d("Debiasing"))), Section(HOMOGENISE, Intention.stop())])
    body2 = Map("m", [
        Section(Intention.start(), HOMOGENISE, Strategy(d("Debiasing"))),
        Section(HOMOGENISE, Intention(d("Align"), d("Image")), Strategy(d("Rotation"))),
        Section(Intention(d("Align"), d("Image")), Intention.stop()),
    ])
    goal = goal_section(d("Preprocess"), d("Image"))
    (rule,) = compile_queries(Fragment("p", FragmentKind.INTENTIONAL, goal, body2))
    premises = [t for t in rule.patterns if t.predicate == ACHIEVED_BY]
    assert len(premises) == 2
    (short,) = compile_queries(Fragment("q", FragmentKind.INTENTIONAL, goal, body))
    assert len([t for t in short.patterns if t.predicate == ACHIEVED_BY]) == 1


def test_preprocess_rules_one_per_path(preprocess):
    f = preprocess.catalog["preprocess"]
    assert len(compile_to_rule(f)) == len(oracles.dfs_paths(list(f.body.sections))) == 6


def test_all_rules_reparse(preprocess, tmp_path):
    written = export_rules(preprocess.catalog, tmp_path)
    assert len(written) == sum(len(compile_queries(f)) for f in preprocess.catalog)
    for path in written:
        text = path.read_text()
        assert serialize_query(parse_query(text)) == text


def _achieved(rules, data, ontology, node):
    found = set()
    for rule in rules:
        out = evaluate(rule, data, ontology).graph
        found |= {t.object for t in out.match(node, ACHIEVED_BY)}
    return found


def test_rules_agree_with_render_on_debias(canonical):
    goal = _goal()
    data = section_to_rdf(goal, label="goal").merge(canonical.registry.graph)
    rules = [q for f in canonical.catalog for q in compile_queries(f)]
    report = render(RenderRequest(goal), canonical.catalog, canonical.registry, canonical.ontology)
    assert _achieved(rules, data, canonical.ontology, BlankNode("goal")) == set(report.services)


def test_rules_forward_chain_like_render(preprocess):
    # drop the self-refining fragment so two rounds of forward chaining suffice
    cat = Catalog(f for f in preprocess.catalog if f.id != "homogenise-mr")
    onto = preprocess.ontology
    body = cat["preprocess"].body
    operational = [q for f in cat if f.kind is FragmentKind.OPERATIONAL for q in compile_queries(f)]
    data = preprocess.registry.graph.copy()
    for n, s in enumerate(body.ordered_sections()):
        if s.target.is_stop:
            continue
        sub = section_to_rdf(s, label=f"sub{n}")
        facts = _achieved(operational, sub.merge(preprocess.registry.graph), onto, BlankNode(f"sub{n}"))
        data = data.merge(sub)
        data.update(Triple(BlankNode(f"sub{n}"), ACHIEVED_BY, r) for r in facts)
    goal = goal_section(d("Preprocess"), d("Image"))
    data = data.merge(section_to_rdf(goal, label="goal"))
    derived = _achieved(compile_queries(cat["preprocess"]), data, onto, BlankNode("goal"))
    report = render(RenderRequest(goal, 2), cat, preprocess.registry, onto)
    assert derived == set(report.services)


def test_fragment_rdf_round_trip(preprocess):
    g = Graph()
    for f in preprocess.catalog:
        fragment_to_rdf(f, g)
    again = fragments_from_rdf(parse_turtle(serialize_turtle(g)))
    assert again == list(preprocess.catalog)


@settings(max_examples=50, deadline=None)
@given(gen.randoms)
def test_generated_fragments_compile_to_parseable_rules(rng):
    f = gen.operational_fragment(rng, "op") if rng.random() < 0.5 else gen.intentional_fragment(rng, "in")
    check_fragment(f)
    rules = compile_to_rule(f)
    assert len(rules) == (1 if f.kind is FragmentKind.OPERATIONAL else len(paths(f.body)))
    for text in rules:
        q = parse_query(text)
        assert serialize_query(q) == text
        assert q in compile_queries(f)


@settings(max_examples=30, deadline=None)
@given(gen.randoms)
def test_generated_fragment_rdf_round_trip(rng):
    f = gen.operational_fragment(rng, "op") if rng.random() < 0.5 else gen.intentional_fragment(rng, "in")
    assert fragments_from_rdf(parse_turtle(serialize_turtle(fragment_to_rdf(f)))) == [f]


@settings(max_examples=40, deadline=None)
@given(gen.randoms)
def test_matching_is_sorted_by_specificity(rng):
    frags = [gen.operational_fragment(rng, f"f{n}") for n in range(8)]
    goal = Section(Intention.start(), frags[0].signature.target, gen.strategy(rng))
    found = find_matching(Catalog(frags), goal, Graph())
    assert [(specificity(f), f.id) for f in found] == sorted((specificity(f), f.id) for f in found)
    assert {f.id for f in found} == {f.id for f in frags if signature_matches(f, goal, Graph())}
