//! Parser round-trip: parse ∘ print ∘ parse is a fixpoint on the corpus,
//! and the illustrative listings parse to the expected shapes.

use flv::ast::*;
use flv::parser::pretty::print_module;
use flv::parser::parse_module;

const REVPREPEND_FL: &str = r#"
List(x) := ite( x = nil, True, (next(x) = next(x)) and List([next(x)]) and Not(IsMember(x, Sp(List([next(x)])))))
Keys(x) := ite( x = nil, EmptySetInt, SetAdd(Keys(next(x)), key(x)))

RevPrepend(x, y) returns(ret)
@pre: List(x) and List(y) and IsEmpty( SetIntersect( Sp(List(x)), Sp(List(y))))
@post: List(ret) and (Keys(ret) = SetUnion( Old(Keys(x)), Old(Keys(y))))

(if (x = nil)
 then
   ret := y;
 else
   tmp := x.next;
   x.next := y;
   ret := RevPrepend(tmp, x);
)
return;
"#;

const REVPREPEND_SL: &str = r#"
logic slfl;
List(x) := ite( x = nil, True, Exists y:  next(x). (next(x) = next(x)) * List(y))
Keys(x) := ite( x = nil, EmptySetInt, SetAdd(Keys(next(x)), key(x)))

RevPrepend(x, y) returns(ret)
@pre: List(x) * List(y)
@post: List(ret) and (Keys(ret) = SetUnion( Old(Keys(x)), Old(Keys(y))))
(if (x = nil)
 then
   ret := y;
 else
   tmp := x.next;
   x.next := y;
   ret := RevPrepend(tmp, x);
)
return;
"#;

#[test]
fn parses_revprepend_fl_listing() {
    let m = parse_module(REVPREPEND_FL, None).expect("parse");
    assert_eq!(m.mode, LogicMode::Fl);
    assert_eq!(m.fl_defs.len(), 2);
    assert_eq!(m.methods.len(), 1);
    // pre has 3 conjuncts
    match m.methods[0].pre.as_fl().unwrap() {
        Formula::And(cs) => assert_eq!(cs.len(), 3),
        other => panic!("expected conjunction, got {other:?}"),
    }
    // inferred field ranges: next: Loc, key: Int
    assert_eq!(m.signature.fields.get("next"), Some(&Sort::Loc));
    assert_eq!(m.signature.fields.get("key"), Some(&Sort::Int));
    // body: one if with else branch of 3 statements
    match &m.methods[0].body[0] {
        Stmt::If {
            then_branch,
            else_branch,
            ..
        } => {
            assert_eq!(then_branch.len(), 1);
            assert_eq!(else_branch.len(), 3);
            assert!(matches!(else_branch[2], Stmt::Call { .. }));
        }
        other => panic!("expected if, got {other:?}"),
    }
}

#[test]
fn parses_revprepend_sl_listing() {
    let m = parse_module(REVPREPEND_SL, None).expect("parse");
    assert_eq!(m.mode, LogicMode::Slfl);
    assert_eq!(m.sl_defs.len(), 2);
    // List body: ite(x=nil, True, Exists y: next(x). (..) * List(y))
    match &m.sl_defs[0].body {
        SlRecBody::Formula(SlFormula::Ite(_, _, e)) => match e.as_ref() {
            SlFormula::Exists { var, field, body, .. } => {
                assert_eq!(var, "y");
                assert_eq!(field, "next");
                assert!(matches!(body.as_ref(), SlFormula::Star(_, _)));
            }
            other => panic!("expected guarded existential, got {other:?}"),
        },
        other => panic!("unexpected List body {other:?}"),
    }
    match &m.methods[0].pre {
        Spec::Sl(SlFormula::Star(_, _)) => {}
        other => panic!("expected star precondition, got {other:?}"),
    }
}

#[test]
fn empty_module_parses() {
    let m = parse_module("", None).expect("parse");
    assert!(m.fl_defs.is_empty() && m.methods.is_empty());
}

#[test]
fn missing_contract_rejected() {
    let err = parse_module("m() returns (r)\nx := y;\nreturn;", None).unwrap_err();
    assert!(err.message.contains("@pre"), "{err}");
}

#[test]
fn unknown_method_rejected() {
    let src = "m() returns (r)\n@pre: True\n@post: True\nr := g(x);\nreturn;";
    let err = parse_module(src, None).unwrap_err();
    assert!(err.message.contains("undefined method"), "{err}");
}

#[test]
fn syntax_error_has_position() {
    let err = parse_module("List(x) := ite(x = , True, False)", None).unwrap_err();
    assert!(err.line >= 1 && err.col > 1, "{err}");
}

#[test]
fn roundtrip_fl_corpus() {
    for src in [REVPREPEND_FL, REVPREPEND_SL] {
        let m1 = parse_module(src, None).expect("parse 1");
        let printed = print_module(&m1);
        let m2 = parse_module(&printed, None)
            .unwrap_or_else(|e| panic!("reparse failed: {e}\n--- printed ---\n{printed}"));
        assert_eq!(m1.fl_defs, m2.fl_defs, "defs differ\n{printed}");
        assert_eq!(m1.sl_defs, m2.sl_defs, "sl defs differ\n{printed}");
        assert_eq!(m1.methods, m2.methods, "methods differ\n{printed}");
        assert_eq!(m1.lemmas, m2.lemmas);
        assert_eq!(m1.signature.fields, m2.signature.fields);
        // idempotence: printing again is stable
        assert_eq!(printed, print_module(&m2));
    }
}

#[test]
fn roundtrip_lemmas_and_directives() {
    let src = r#"
field next : Loc;
field key : Int;
List(x) := ite(x = nil, True, List([next(x)]) and Not(IsMember(x, Sp(List([next(x)])))))
Sorted(x) := ite(x = nil, True, Sorted([next(x)]) and Not(IsMember(x, Sp(Sorted([next(x)])))) and key(x) <= Min(next(x)))
Min(x) := ite(x = nil, PInf, ite(key(x) < Min(next(x)), key(x), Min(next(x))))
@same-support List Sorted;
lemma sorted_list: Sorted(x) => List(x);
"#;
    let m1 = parse_module(src, None).expect("parse");
    assert_eq!(m1.same_support, vec![("List".to_string(), "Sorted".to_string())]);
    assert_eq!(m1.lemmas.len(), 1);
    // lemma lowered to Not(..) or ..
    match &m1.lemmas[0].body {
        Formula::Or(parts) => {
            assert_eq!(parts.len(), 2);
            assert!(matches!(parts[0], Formula::Not(_)));
        }
        other => panic!("unexpected lemma shape {other:?}"),
    }
    let printed = print_module(&m1);
    let m2 = parse_module(&printed, None)
        .unwrap_or_else(|e| panic!("reparse failed: {e}\n{printed}"));
    assert_eq!(m1.fl_defs, m2.fl_defs);
    assert_eq!(m1.lemmas, m2.lemmas);
    assert_eq!(m1.same_support, m2.same_support);
    // Min returns Int, List/Sorted return Bool
    assert_eq!(
        m1.signature.rec_sigs.get("Min").map(|r| r.result),
        Some(Sort::Int)
    );
    assert_eq!(
        m1.signature.rec_sigs.get("List").map(|r| r.result),
        Some(Sort::Bool)
    );
}
