use diffsys::exact::{q, qi, BasisContext, FormalReal, Rational};
use diffsys::gallery;
use diffsys::operator::DifferenceOperator;
use diffsys_cli::dsl::{parse_operator, parse_script, parse_shift, render_script, Script};
use proptest::prelude::*;

const HANDWRITTEN: &[&str] = &[
    "basis b1 b2; eq delta(b1) f = 1; eq delta(b2) f = 1; solve;",
    "basis b1; eq delta(b1) f = chi(<b1>+0);",
    "basis b1; eq delta(b1) f = chi(<b1> + 1/2*b1); solve; min_supnorm;",
    "eq delta(1) f = 1; eq delta(1) f = 0; poly_solve degree 3;",
    "eq delta(1) f = poly(0, 2); poly_solve;",
    "eq delta(1/2) f = cos2pi(1); solve;",
    "eq delta(1/4) f = cos2pi(4) - 2*cos2pi(2, 1/3);",
    "eq T[1/3] - T[0] f = cos2pi(3/2, 1/4) + 1/2;",
    "basis a; eq 2*T[a] - T[0] f = 0; solve;",
    "basis a; eq T[a] + T[0] f = poly(1, 1, 1);",
    "basis b1 b2 b3; eq delta(b1) f = 1; eq delta(b2) f = 1; eq delta(b3) f = 1; eq delta(-b1 - b2 - b3) f = 1; solve;",
    "basis b1 b2; let s = b1 + b2; eq delta(s) f = 0; eq delta(b1) f = point(0); vanish off;",
    "basis b1 b2; eq delta(b1) f = 0; vanish on <b1, b2> + b1, <b2> + 1/2;",
    "basis x; system one; eq delta(x) f = 1; system two; eq delta(x) f = -1; solve one; solve two;",
    "basis x; eq delta(x) f = 3; deduce with (T[0]) @ 0 bound 1;",
    "basis x y; eq delta(x) f = 1; eq delta(y) f = 1; deduce with (T[0]) @ 0, (-T[x]) @ 1;",
    "basis b1 b2; fn g = latfun(<b1, b2>; count(1,2) - 1; 0); eq delta(b1) f = g;",
    "basis b1 b2; eq delta(b1) f = latfun(<b1, b2>; table{(0,0): 1, (1,-1): -1/2; default 0}; 0; @(2,-1));",
    "basis b1; eq delta(b1) * delta(b1) f = 0; solve;",
    "basis b1; eq (T[b1] - id) * (T[b1] + id) f = 0;",
    "basis b1; eq 0 f = 1; solve;",
    "basis b1; eq 0 f = 0;",
    "basis b1; eq id f = apply(delta(b1), chi(<b1> + 0));",
    "basis b1 b2; eq delta(1/2*b1 - b2 + 3/4) f = 2*chi(<b1> + 1/3*b2) - chi(<> + b1);",
    "gallery succ k = 3; gallery polynomial;",
    "gallery bset k = 4 trials = 20 seed = 7;",
    "gallery trig n = 2 samples = 1000;",
    "basis;",
    "",
    "# comment only\n",
    "basis u v w; let p = u - v; let r = p + 2*w; eq delta(r) f = 1; eq delta(p) f = 0; solve;",
    "basis u; fn one = 1; fn two = one + one; eq delta(u) f = two - 1/2*one;",
    "eq delta(1) f = poly(0, 0, 0, 1); poly_solve;",
    "eq T[2] - 2*T[1] + T[0] f = poly(2); poly_solve degree 4;",
    "basis b1 b2; eq delta(b1) f = latfun(<b1, b2>; pos(1) + pos(2); 0); eq delta(b2) f = 0;",
    "basis b1 b2; eq delta(b1) f = latfun(<2*b1, b2>; k1 + 2*k2 - 3/2; 1); min_supnorm;",
    "basis b1; eq delta(b1) f = -chi(<b1> + 0) + -1;",
    "basis b1 b2 b3 b4; eq delta(b4) f = chi(<b1, b2, b3, b4> + 0);",
    "eq 1/2*T[1] - 1/2*T[-1] f = cos2pi(1/2);",
    "basis a b; eq delta(a) f = 1; eq delta(b) f = 1; eq delta(a + b) f = 2; solve;",
];

fn gallery_scripts() -> Vec<String> {
    let mut out = Vec::new();
    let mut push = |ctx: BasisContext, name: &str, s: &diffsys::solver::EquationSystem| {
        out.push(render_script(&Script::from_system(ctx, Some(name), s.equations())));
    };
    for n in 2..=6 {
        let (ctx, s) = gallery::arbitrary_functions_system(n);
        push(ctx, "arbitrary", &s);
    }
    for n in 3..=5 {
        let (ctx, s) = gallery::bounded_norm_system(n);
        push(ctx, "bounded", &s);
    }
    for n in 2..=6 {
        let (ctx, s) = gallery::unbounded_system(n);
        push(ctx, "unbounded", &s);
    }
    for k in 2..=6 {
        let (ctx, _, s) = gallery::periodicity_family(k);
        push(ctx, "succ", &s);
    }
    for k in 1..=3 {
        let ctx = BasisContext::numbered(k);
        let bs: Vec<FormalReal> = (1..=k).map(FormalReal::basis).collect();
        push(ctx, "darboux", &gallery::darboux_system(&bs).unwrap());
    }
    for n in 1..=4 {
        let coeffs = vec![qi(1); n];
        push(BasisContext::numbered(0), "trig", &gallery::escape_system(&coeffs).unwrap());
    }
    out
}

fn check_round_trip(text: &str) {
    let first = parse_script(text).unwrap_or_else(|d| panic!("{d}\n{text}"));
    let rendered = render_script(&first);
    let second = parse_script(&rendered).unwrap_or_else(|d| panic!("{d}\n{rendered}"));
    assert_eq!(first, second, "script:\n{text}\nrendered:\n{rendered}");
    assert_eq!(rendered, render_script(&second));
}

#[test]
fn corpus_round_trips() {
    let gallery = gallery_scripts();
    let total = HANDWRITTEN.len() + gallery.len();
    assert!(total >= 50, "corpus has only {total} scripts");
    for text in HANDWRITTEN {
        check_round_trip(text);
    }
    for text in &gallery {
        check_round_trip(text);
    }
}

#[test]
fn gallery_systems_survive_unchanged() {
    let (ctx, s) = gallery::bounded_norm_system(3);
    let script = parse_script(&render_script(&Script::from_system(ctx, None, s.equations()))).unwrap();
    assert_eq!(script.system(None).unwrap().equations, s.equations());
}

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn shift() -> impl Strategy<Value = FormalReal> {
    proptest::collection::vec(rational(), 3).prop_map(|cs| FormalReal::from_coords(cs.into_iter().enumerate()))
}

fn operator() -> impl Strategy<Value = DifferenceOperator> {
    proptest::collection::vec((rational(), shift()), 0..4).prop_map(DifferenceOperator::canonicalize)
}

proptest! {
    #[test]
    fn shifts_round_trip(x in shift()) {
        let ctx = BasisContext::numbered(2);
        prop_assert_eq!(parse_shift(&ctx, &ctx.render(&x)).unwrap(), x);
    }

    #[test]
    fn operators_round_trip(d in operator()) {
        let ctx = BasisContext::numbered(2);
        prop_assert_eq!(parse_operator(&ctx, &d.render(&ctx)).unwrap(), d);
    }
}
