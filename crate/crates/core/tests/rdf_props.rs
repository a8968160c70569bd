use std::collections::BTreeSet;

use proptest::prelude::*;

use kgnav::rdf::{
    parse_ntriples, serialize_ntriples, BlankNode, Direction, Iri, KnowledgeGraph, Literal,
    Subject, Term, Triple, RDFS_LABEL,
};

fn iri(i: u8) -> Iri {
    Iri::new(format!("http://g/n{i}")).unwrap()
}

fn predicate(i: u8) -> Iri {
    if i == 0 {
        Iri::new(RDFS_LABEL).unwrap()
    } else {
        Iri::new(format!("http://g/p{i}")).unwrap()
    }
}

fn subject() -> impl Strategy<Value = Subject> {
    prop_oneof![
        4 => (0u8..12).prop_map(|i| Subject::Iri(iri(i))),
        1 => (0u8..3).prop_map(|i| Subject::BlankNode(BlankNode::new(format!("b{i}")).unwrap())),
    ]
}

fn lexical() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z0-9 ]{0,6}",
        Just("quote \" and \\ slash".to_owned()),
        Just("line\nbreak\ttab\rret".to_owned()),
        Just("Müller 東京".to_owned()),
    ]
}

fn object() -> impl Strategy<Value = Term> {
    prop_oneof![
        4 => (0u8..12).prop_map(|i| Term::Iri(iri(i))),
        1 => (0u8..3).prop_map(|i| Term::BlankNode(BlankNode::new(format!("b{i}")).unwrap())),
        2 => lexical().prop_map(|s| Term::Literal(Literal::simple(s))),
        1 => (lexical(), prop_oneof![Just("en"), Just("de-AT")])
            .prop_map(|(s, l)| Term::Literal(Literal::lang_tagged(s, l).unwrap())),
        1 => lexical().prop_map(|s| Term::Literal(Literal::typed(s, Iri::new("http://www.w3.org/2001/XMLSchema#string").unwrap()))),
    ]
}

fn triples(max: usize) -> impl Strategy<Value = Vec<Triple>> {
    prop::collection::vec(
        (subject(), 0u8..5, object()).prop_map(|(s, p, o)| Triple::new(s, predicate(p), o)),
        0..max,
    )
}

fn brute(triples: &[Triple], e: &Iri) -> BTreeSet<(Direction, Iri, Term)> {
    let mut out = BTreeSet::new();
    for t in triples.iter().filter(|t| t.predicate.as_str() != RDFS_LABEL) {
        if t.subject == Subject::Iri(e.clone()) {
            out.insert((Direction::Outgoing, t.predicate.clone(), t.object.clone()));
        }
        if t.object == Term::Iri(e.clone()) {
            out.insert((Direction::Incoming, t.predicate.clone(), Term::from(t.subject.clone())));
        }
    }
    out
}

proptest! {
    #[test]
    fn one_hop_equals_brute_force(ts in triples(300), e in 0u8..12) {
        let e = iri(e);
        let graph = KnowledgeGraph::new(ts.clone());
        let got = graph.one_hop(&e);
        let set: BTreeSet<_> = got.iter().map(|p| (p.direction, p.predicate.clone(), p.neighbor.clone())).collect();
        prop_assert_eq!(set.len(), got.len());
        prop_assert_eq!(set, brute(&ts, &e));
    }

    #[test]
    fn one_hop_ignores_triple_order(ts in triples(200), seed in any::<u64>(), e in 0u8..12) {
        let mut shuffled = ts.clone();
        // Deterministic Fisher-Yates driven by the seed.
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            shuffled.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let e = iri(e);
        prop_assert_eq!(KnowledgeGraph::new(ts).one_hop(&e), KnowledgeGraph::new(shuffled).one_hop(&e));
    }

    #[test]
    fn incoming_neighbors_are_nodes(ts in triples(200), e in 0u8..12) {
        for p in KnowledgeGraph::new(ts).one_hop(&iri(e)) {
            if p.direction == Direction::Incoming {
                prop_assert!(!matches!(p.neighbor, Term::Literal(_)));
            }
        }
    }

    #[test]
    fn ntriples_round_trip(ts in triples(60)) {
        let text = serialize_ntriples(&ts);
        let parsed = parse_ntriples(&text).unwrap();
        prop_assert_eq!(&parsed, &ts);
        prop_assert_eq!(serialize_ntriples(&parsed), text);
    }

    #[test]
    fn label_is_smallest_literal(ts in triples(100), e in 0u8..12) {
        let graph = KnowledgeGraph::new(ts.clone());
        let e = iri(e);
        let expected = ts.iter().filter_map(|t| match (&t.subject, &t.object) {
            (Subject::Iri(s), Term::Literal(l)) if *s == e && t.predicate.as_str() == RDFS_LABEL => Some(l.lexical().to_owned()),
            _ => None,
        }).min();
        prop_assert_eq!(graph.label(&e).map(str::to_owned), expected);
    }
}
