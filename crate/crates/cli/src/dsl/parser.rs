use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use diffsys::exact::{BasisContext, FormalReal, Lattice, Rational};
use diffsys::function::{LatticeFunction, LatticeRule, SymbolicFunction, TrigPoly};
use diffsys::operator::DifferenceOperator;

use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, Directive, Script, Stmt, VanishSpec};

pub(crate) const KEYWORDS: &[&str] = &[
    "basis", "let", "fn", "system", "eq", "solve", "min_supnorm", "poly_solve", "deduce", "vanish",
    "gallery", "with", "bound", "off", "on", "degree", "f", "T", "delta", "id", "poly", "cos2pi", "chi",
    "latfun", "point", "apply", "pos", "count", "table", "default",
];

type PResult<T> = Result<T, Diagnostic>;

pub fn parse_script(text: &str) -> PResult<Script> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        basis: BasisContext::new(Vec::<String>::new()).expect("empty basis"),
        shifts: HashMap::new(),
        fns: HashMap::new(),
        systems: HashSet::new(),
    };
    let mut statements = Vec::new();
    while p.peek() != &Tok::Eof {
        let st = p.statement(statements.is_empty())?;
        statements.push(st);
    }
    Ok(Script { basis: p.basis, statements })
}

fn fragment<T>(basis: &BasisContext, text: &str, f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
        basis: basis.clone(),
        shifts: HashMap::new(),
        fns: HashMap::new(),
        systems: HashSet::new(),
    };
    let v = f(&mut p)?;
    if p.peek() != &Tok::Eof {
        return Err(p.unexpected(&["end of input"]));
    }
    Ok(v)
}

pub fn parse_operator(basis: &BasisContext, text: &str) -> PResult<DifferenceOperator> {
    fragment(basis, text, Parser::op)
}

pub fn parse_function(basis: &BasisContext, text: &str) -> PResult<SymbolicFunction> {
    fragment(basis, text, Parser::func)
}

pub fn parse_shift(basis: &BasisContext, text: &str) -> PResult<FormalReal> {
    fragment(basis, text, Parser::shift)
}

pub fn parse_lattice(basis: &BasisContext, text: &str) -> PResult<Lattice> {
    fragment(basis, text, Parser::lattice)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    basis: BasisContext,
    shifts: HashMap<String, FormalReal>,
    fns: HashMap<String, SymbolicFunction>,
    systems: HashSet<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn here(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, t: &Token, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::new(t.line, t.col, msg.into(), vec![])
    }

    fn unexpected(&self, expected: &[&str]) -> Diagnostic {
        let t = self.here();
        Diagnostic::new(
            t.line,
            t.col,
            format!("unexpected {}", t.tok.describe()),
            expected.iter().map(|s| s.to_string()).collect(),
        )
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek() == &Tok::Sym(c)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.is_sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> PResult<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{c}`")]))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{w}`")]))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Token)> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump())),
            _ => Err(self.unexpected(&[what])),
        }
    }

    /// A user-chosen name: not a keyword, not a basis symbol, not taken.
    fn fresh_name(&mut self, what: &str) -> PResult<String> {
        let (name, tok) = self.ident(what)?;
        if KEYWORDS.contains(&name.as_str()) {
            return Err(self.err_at(&tok, format!("`{name}` is a reserved word")));
        }
        if self.basis.index_of(&name).is_some()
            || self.shifts.contains_key(&name)
            || self.fns.contains_key(&name)
            || self.systems.contains(&name)
        {
            return Err(self.err_at(&tok, format!("`{name}` is already defined")));
        }
        Ok(name)
    }

    fn int(&mut self) -> PResult<(BigInt, Token)> {
        match self.peek().clone() {
            Tok::Int(n) => Ok((n, self.bump())),
            _ => Err(self.unexpected(&["integer"])),
        }
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let neg = self.eat_sym('-');
        let (n, tok) = self.int()?;
        let n = if neg { -n } else { n };
        n.to_i64().ok_or_else(|| self.err_at(&tok, "integer out of range"))
    }

    fn small(&mut self) -> PResult<usize> {
        let (n, tok) = self.int()?;
        n.to_usize().ok_or_else(|| self.err_at(&tok, "integer out of range"))
    }

    /// `p` or `p/q` with `p` already at the cursor.
    fn unsigned_rational(&mut self) -> PResult<Rational> {
        let (n, _) = self.int()?;
        if self.is_sym('/') {
            self.bump();
            let (d, tok) = self.int()?;
            if d.is_zero() {
                return Err(self.err_at(&tok, "zero denominator"));
            }
            return Ok(Rational::new(n, d));
        }
        Ok(Rational::from_integer(n))
    }

    fn signed_rational(&mut self) -> PResult<Rational> {
        let neg = self.eat_sym('-');
        let r = self.unsigned_rational()?;
        Ok(if neg { -r } else { r })
    }

    /// A run of `+` and `-` signs, possibly empty.
    fn sign(&mut self) -> Rational {
        let mut s = Rational::one();
        loop {
            if self.eat_sym('-') {
                s = -s;
            } else if !self.eat_sym('+') {
                return s;
            }
        }
    }

    fn end(&mut self) -> PResult<()> {
        self.expect_sym(';')
    }

    fn statement(&mut self, first: bool) -> PResult<Stmt> {
        let (word, tok) = self.ident("statement")?;
        match word.as_str() {
            "basis" => {
                if !first {
                    return Err(self.err_at(&tok, "`basis` must be the first statement"));
                }
                let mut names = Vec::new();
                while let Tok::Ident(_) = self.peek() {
                    let (n, t) = self.ident("symbol")?;
                    if KEYWORDS.contains(&n.as_str()) {
                        return Err(self.err_at(&t, format!("`{n}` is a reserved word")));
                    }
                    if names.contains(&n) {
                        return Err(self.err_at(&t, format!("duplicate symbol `{n}`")));
                    }
                    names.push(n);
                }
                self.end()?;
                self.basis = BasisContext::new(names.clone()).map_err(|e| self.err_at(&tok, e.to_string()))?;
                Ok(Stmt::Basis(names))
            }
            "let" => {
                let name = self.fresh_name("shift name")?;
                self.expect_sym('=')?;
                let value = self.shift()?;
                self.end()?;
                self.shifts.insert(name.clone(), value.clone());
                Ok(Stmt::LetShift { name, value })
            }
            "fn" => {
                let name = self.fresh_name("function name")?;
                self.expect_sym('=')?;
                let value = self.func()?;
                self.end()?;
                self.fns.insert(name.clone(), value.clone());
                Ok(Stmt::LetFn { name, value })
            }
            "system" => {
                let name = self.fresh_name("system name")?;
                self.end()?;
                self.systems.insert(name.clone());
                Ok(Stmt::System(name))
            }
            "eq" => {
                let op = self.op()?;
                self.expect_word("f")?;
                self.expect_sym('=')?;
                let rhs = self.func()?;
                self.end()?;
                Ok(Stmt::Eq { op, rhs })
            }
            "solve" | "min_supnorm" | "poly_solve" | "deduce" | "vanish" => {
                let system = self.system_ref()?;
                let directive = match word.as_str() {
                    "solve" => Directive::Solve,
                    "min_supnorm" => Directive::MinSupNorm,
                    "poly_solve" => {
                        let degree = if self.is_word("degree") {
                            self.bump();
                            Some(self.small()?)
                        } else {
                            None
                        };
                        Directive::PolySolve { degree }
                    }
                    "deduce" => {
                        self.expect_word("with")?;
                        let mut entries = Vec::new();
                        loop {
                            self.expect_sym('(')?;
                            let op = self.op()?;
                            self.expect_sym(')')?;
                            self.expect_sym('@')?;
                            entries.push((op, self.small()?));
                            if !self.eat_sym(',') {
                                break;
                            }
                        }
                        let bound = if self.is_word("bound") {
                            self.bump();
                            Some(self.unsigned_rational()?)
                        } else {
                            None
                        };
                        Directive::Deduce { entries, bound }
                    }
                    _ => {
                        if self.is_word("off") {
                            self.bump();
                            Directive::Vanish(VanishSpec::OffLattice)
                        } else if self.is_word("on") {
                            self.bump();
                            let mut cosets = Vec::new();
                            loop {
                                let l = self.lattice()?;
                                self.expect_sym('+')?;
                                cosets.push((l, self.shift()?));
                                if !self.eat_sym(',') {
                                    break;
                                }
                            }
                            Directive::Vanish(VanishSpec::Cosets(cosets))
                        } else {
                            return Err(self.unexpected(&["`off`", "`on`"]));
                        }
                    }
                };
                self.end()?;
                Ok(Stmt::Directive { system, directive })
            }
            "gallery" => {
                let (name, _) = self.ident("gallery name")?;
                let mut params = Vec::new();
                while let Tok::Ident(_) = self.peek() {
                    let (key, _) = self.ident("parameter")?;
                    self.expect_sym('=')?;
                    let (v, t) = self.int()?;
                    let v = v.to_u64().ok_or_else(|| self.err_at(&t, "integer out of range"))?;
                    params.push((key, v));
                }
                self.end()?;
                Ok(Stmt::Directive { system: None, directive: Directive::Gallery { name, params } })
            }
            _ => Err(Diagnostic::new(
                tok.line,
                tok.col,
                format!("unknown statement `{word}`"),
                ["basis", "let", "fn", "system", "eq", "solve", "min_supnorm", "poly_solve", "deduce", "vanish", "gallery"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            )),
        }
    }

    fn system_ref(&mut self) -> PResult<Option<String>> {
        if let Tok::Ident(s) = self.peek().clone() {
            if !KEYWORDS.contains(&s.as_str()) {
                let t = self.bump();
                if !self.systems.contains(&s) {
                    return Err(self.err_at(&t, format!("unknown system `{s}`")));
                }
                return Ok(Some(s));
            }
        }
        Ok(None)
    }

    // shifts: rational-linear combinations of basis symbols and `let` names

    fn shift(&mut self) -> PResult<FormalReal> {
        let mut acc = self.shift_term()?;
        while self.is_sym('+') || self.is_sym('-') {
            let t = self.shift_term()?;
            acc = &acc + &t;
        }
        Ok(acc)
    }

    fn shift_term(&mut self) -> PResult<FormalReal> {
        let s = self.sign();
        let v = if let Tok::Int(_) = self.peek() {
            let r = self.unsigned_rational()?;
            if self.eat_sym('*') {
                self.shift_atom()?.scale(&r)
            } else {
                FormalReal::rational(r)
            }
        } else {
            self.shift_atom()?
        };
        Ok(v.scale(&s))
    }

    fn shift_atom(&mut self) -> PResult<FormalReal> {
        if self.eat_sym('(') {
            let v = self.shift()?;
            self.expect_sym(')')?;
            return Ok(v);
        }
        let (name, tok) = self.ident("shift")?;
        if let Some(i) = self.basis.index_of(&name) {
            return Ok(self.basis.symbol(i));
        }
        self.shifts
            .get(&name)
            .cloned()
            .ok_or_else(|| self.err_at(&tok, format!("unknown shift `{name}`")))
    }

    fn lattice(&mut self) -> PResult<Lattice> {
        self.expect_sym('<')?;
        let mut gens = Vec::new();
        if !self.is_sym('>') {
            loop {
                gens.push(self.shift()?);
                if !self.eat_sym(',') {
                    break;
                }
            }
        }
        self.expect_sym('>')?;
        Ok(Lattice::from_generators(&gens))
    }

    // operators

    fn op(&mut self) -> PResult<DifferenceOperator> {
        let mut acc = self.op_term()?;
        while self.is_sym('+') || self.is_sym('-') {
            acc = acc.add(&self.op_term()?);
        }
        Ok(acc)
    }

    fn op_term(&mut self) -> PResult<DifferenceOperator> {
        let s = self.sign();
        let mut acc = self.op_factor()?;
        while self.eat_sym('*') {
            acc = acc.compose(&self.op_factor()?);
        }
        Ok(acc.scale(&s))
    }

    fn op_factor(&mut self) -> PResult<DifferenceOperator> {
        match self.peek().clone() {
            Tok::Int(_) => {
                let r = self.unsigned_rational()?;
                Ok(DifferenceOperator::identity().scale(&r))
            }
            Tok::Sym('(') => {
                self.bump();
                let d = self.op()?;
                self.expect_sym(')')?;
                Ok(d)
            }
            Tok::Ident(w) if w == "T" => {
                self.bump();
                self.expect_sym('[')?;
                let b = self.shift()?;
                self.expect_sym(']')?;
                Ok(DifferenceOperator::translation(b))
            }
            Tok::Ident(w) if w == "delta" => {
                self.bump();
                self.expect_sym('(')?;
                let b = self.shift()?;
                self.expect_sym(')')?;
                Ok(DifferenceOperator::delta(b))
            }
            Tok::Ident(w) if w == "id" => {
                self.bump();
                Ok(DifferenceOperator::identity())
            }
            _ => Err(self.unexpected(&["number", "`T[..]`", "`delta(..)`", "`id`", "`(`"])),
        }
    }

    // functions

    fn func(&mut self) -> PResult<SymbolicFunction> {
        let start = self.here().clone();
        let mut terms = vec![self.func_term()?];
        while self.is_sym('+') || self.is_sym('-') {
            terms.push(self.func_term()?);
        }
        SymbolicFunction::lin_comb(terms).map_err(|e| self.err_at(&start, e.to_string()))
    }

    fn func_term(&mut self) -> PResult<(Rational, SymbolicFunction)> {
        let s = self.sign();
        if let Tok::Int(_) = self.peek() {
            let r = self.unsigned_rational()?;
            if self.eat_sym('*') {
                return Ok((s * r, self.func_atom()?));
            }
            return Ok((s * r, SymbolicFunction::constant(Rational::one())));
        }
        Ok((s, self.func_atom()?))
    }

    fn func_atom(&mut self) -> PResult<SymbolicFunction> {
        let start = self.here().clone();
        if self.eat_sym('(') {
            let f = self.func()?;
            self.expect_sym(')')?;
            return Ok(f);
        }
        let (word, _) = self.ident("function")?;
        let core = |p: &Self, e: diffsys::error::Error| p.err_at(&start, e.to_string());
        match word.as_str() {
            "poly" => {
                self.expect_sym('(')?;
                let mut cs = vec![self.signed_rational()?];
                while self.eat_sym(',') {
                    cs.push(self.signed_rational()?);
                }
                self.expect_sym(')')?;
                Ok(SymbolicFunction::polynomial(cs))
            }
            "cos2pi" => {
                self.expect_sym('(')?;
                let freq = self.signed_rational()?;
                let phase = if self.eat_sym(',') { self.signed_rational()? } else { Rational::zero() };
                self.expect_sym(')')?;
                let t = TrigPoly::cos(freq, phase).map_err(|e| core(self, e))?;
                Ok(SymbolicFunction::trig(t))
            }
            "chi" => {
                self.expect_sym('(')?;
                let l = self.lattice()?;
                self.expect_sym('+')?;
                let off = self.shift()?;
                self.expect_sym(')')?;
                Ok(SymbolicFunction::coset(l, &off))
            }
            "point" => {
                self.expect_sym('(')?;
                let x = self.shift()?;
                self.expect_sym(')')?;
                Ok(SymbolicFunction::point_indicator(&x))
            }
            "latfun" => {
                self.expect_sym('(')?;
                let l = self.lattice()?;
                self.expect_sym(';')?;
                let rule = self.rule()?;
                self.expect_sym(';')?;
                let off = self.signed_rational()?;
                let mut shift = vec![0; l.rank()];
                if self.eat_sym(';') {
                    self.expect_sym('@')?;
                    self.expect_sym('(')?;
                    shift = vec![self.signed_int()?];
                    while self.eat_sym(',') {
                        shift.push(self.signed_int()?);
                    }
                    self.expect_sym(')')?;
                }
                self.expect_sym(')')?;
                let lf = LatticeFunction::with_shift(l, rule, off, shift).map_err(|e| core(self, e))?;
                Ok(SymbolicFunction::lattice_function(lf))
            }
            "apply" => {
                self.expect_sym('(')?;
                let d = self.op()?;
                self.expect_sym(',')?;
                let f = self.func()?;
                self.expect_sym(')')?;
                f.apply(&d).map_err(|e| core(self, e))
            }
            name => self
                .fns
                .get(name)
                .cloned()
                .ok_or_else(|| self.err_at(&start, format!("unknown function `{name}`"))),
        }
    }

    // lattice rules, over 1-based coordinate names k1, k2, ...

    fn rule(&mut self) -> PResult<LatticeRule> {
        let mut terms = vec![self.rule_term()?];
        while self.is_sym('+') || self.is_sym('-') {
            terms.push(self.rule_term()?);
        }
        Ok(match LatticeRule::sum(terms) {
            LatticeRule::Sum(ts) => LatticeRule::sum(ts.into_iter().map(fold_term)),
            r => r,
        })
    }

    fn rule_term(&mut self) -> PResult<(Rational, LatticeRule)> {
        let s = self.sign();
        if let Tok::Int(_) = self.peek() {
            let r = self.unsigned_rational()?;
            if self.eat_sym('*') {
                return Ok((s * r, self.rule_atom()?));
            }
            return Ok((s * r, LatticeRule::Const(Rational::one())));
        }
        Ok((s, self.rule_atom()?))
    }

    fn coord_index(&mut self) -> PResult<usize> {
        let (n, tok) = self.int()?;
        match n.to_usize() {
            Some(i) if i >= 1 => Ok(i - 1),
            _ => Err(self.err_at(&tok, "coordinates are numbered from 1")),
        }
    }

    fn rule_atom(&mut self) -> PResult<LatticeRule> {
        if self.eat_sym('(') {
            let r = self.rule()?;
            self.expect_sym(')')?;
            return Ok(r);
        }
        let (word, tok) = self.ident("rule")?;
        match word.as_str() {
            "pos" => {
                self.expect_sym('(')?;
                let i = self.coord_index()?;
                self.expect_sym(')')?;
                Ok(LatticeRule::Positive(i))
            }
            "count" => {
                self.expect_sym('(')?;
                let mut js = vec![self.coord_index()?];
                while self.eat_sym(',') {
                    js.push(self.coord_index()?);
                }
                self.expect_sym(')')?;
                Ok(LatticeRule::CountPositive(js))
            }
            "table" => {
                self.expect_sym('{')?;
                let mut entries = BTreeMap::new();
                while self.is_sym('(') {
                    let at = self.here().clone();
                    self.bump();
                    let mut k = vec![self.signed_int()?];
                    while self.eat_sym(',') {
                        k.push(self.signed_int()?);
                    }
                    self.expect_sym(')')?;
                    self.expect_sym(':')?;
                    let v = self.signed_rational()?;
                    if entries.insert(k, v).is_some() {
                        return Err(self.err_at(&at, "repeated table key"));
                    }
                    if !self.eat_sym(',') {
                        break;
                    }
                }
                self.expect_sym(';')?;
                self.expect_word("default")?;
                let default = self.signed_rational()?;
                self.expect_sym('}')?;
                Ok(LatticeRule::Table { entries, default })
            }
            w => match w.strip_prefix('k').and_then(|d| d.parse::<usize>().ok()) {
                Some(i) if i >= 1 && !w[1..].starts_with('0') => Ok(LatticeRule::Coord(i - 1)),
                _ => Err(self.err_at(&tok, format!("unknown rule `{w}`"))),
            },
        }
    }
}

/// A scaled constant becomes a plain constant.
fn fold_term((c, r): (Rational, LatticeRule)) -> (Rational, LatticeRule) {
    match r {
        LatticeRule::Const(v) => (Rational::one(), LatticeRule::Const(c * v)),
        r => (c, r),
    }
}
