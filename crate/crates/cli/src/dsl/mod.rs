//! The workbench script language: declarations, equations and directives.
//!
//! ```text
//! basis b1 b2;
//! let s = b1 + b2;
//! fn g = 2*chi(<b1> + 0) - 1;
//! system pair;
//! eq delta(b1) f = g;
//! eq T[s] - T[0] f = poly(0, 1);
//! solve;
//! ```

mod lexer;
mod parser;
mod render;

use std::fmt;

use diffsys::exact::{BasisContext, FormalReal, Lattice, Rational};
use diffsys::function::SymbolicFunction;
use diffsys::operator::DifferenceOperator;
use diffsys::solver::EquationSystem;

pub use parser::{parse_function, parse_lattice, parse_operator, parse_script, parse_shift};
pub use render::render_script;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl Diagnostic {
    pub fn new(line: usize, col: usize, message: String, expected: Vec<String>) -> Self {
        Diagnostic { line, col, message, expected }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VanishSpec {
    OffLattice,
    Cosets(Vec<(Lattice, FormalReal)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    Solve,
    MinSupNorm,
    PolySolve { degree: Option<usize> },
    /// With a bound, the deduction is also checked as a proof that no
    /// solution has sup norm at most that bound.
    Deduce { entries: Vec<(DifferenceOperator, usize)>, bound: Option<Rational> },
    Vanish(VanishSpec),
    Gallery { name: String, params: Vec<(String, u64)> },
}

impl Directive {
    pub fn keyword(&self) -> &'static str {
        match self {
            Directive::Solve => "solve",
            Directive::MinSupNorm => "min_supnorm",
            Directive::PolySolve { .. } => "poly_solve",
            Directive::Deduce { .. } => "deduce",
            Directive::Vanish(_) => "vanish",
            Directive::Gallery { .. } => "gallery",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Basis(Vec<String>),
    LetShift { name: String, value: FormalReal },
    LetFn { name: String, value: SymbolicFunction },
    System(String),
    Eq { op: DifferenceOperator, rhs: SymbolicFunction },
    /// A directive with the system it names, if any.
    Directive { system: Option<String>, directive: Directive },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub basis: BasisContext,
    pub statements: Vec<Stmt>,
}

/// Name of the system that collects equations before any `system` line.
pub const DEFAULT_SYSTEM: &str = "main";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedSystem {
    pub name: String,
    pub equations: Vec<(DifferenceOperator, SymbolicFunction)>,
}

impl NamedSystem {
    pub fn system(&self) -> EquationSystem {
        EquationSystem::new(self.equations.clone())
    }
}

/// A directive together with the system it acts on, as that system stood
/// when the directive was reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub system: NamedSystem,
    pub directive: Directive,
}

impl Script {
    /// Every system in declaration order, with all of its equations.
    pub fn systems(&self) -> Vec<NamedSystem> {
        self.walk().0
    }

    pub fn jobs(&self) -> Vec<Job> {
        self.walk().1
    }

    pub fn system(&self, name: Option<&str>) -> Option<NamedSystem> {
        let systems = self.systems();
        match name {
            Some(n) => systems.into_iter().find(|s| s.name == n),
            None => systems.into_iter().last(),
        }
    }

    fn walk(&self) -> (Vec<NamedSystem>, Vec<Job>) {
        let mut systems: Vec<NamedSystem> = Vec::new();
        let mut jobs = Vec::new();
        for st in &self.statements {
            match st {
                Stmt::System(name) => systems.push(NamedSystem { name: name.clone(), equations: Vec::new() }),
                Stmt::Eq { op, rhs } => {
                    if systems.is_empty() {
                        systems.push(NamedSystem { name: DEFAULT_SYSTEM.into(), equations: Vec::new() });
                    }
                    systems.last_mut().expect("nonempty").equations.push((op.clone(), rhs.clone()));
                }
                Stmt::Directive { system, directive } => {
                    let target = match system {
                        Some(n) => systems.iter().find(|s| &s.name == n).cloned(),
                        None => systems.last().cloned(),
                    };
                    let system = target.unwrap_or_else(|| NamedSystem { name: DEFAULT_SYSTEM.into(), equations: Vec::new() });
                    jobs.push(Job { system, directive: directive.clone() });
                }
                _ => {}
            }
        }
        (systems, jobs)
    }

    /// A script holding just a basis and one system's equations.
    pub fn from_system(basis: BasisContext, name: Option<&str>, equations: &[(DifferenceOperator, SymbolicFunction)]) -> Self {
        let mut statements = vec![Stmt::Basis(basis.symbols().to_vec())];
        if let Some(n) = name {
            statements.push(Stmt::System(n.into()));
        }
        statements.extend(equations.iter().map(|(op, rhs)| Stmt::Eq { op: op.clone(), rhs: rhs.clone() }));
        Script { basis, statements }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_equation_system() {
        let s = parse_script("basis b1 b2; eq delta(b1) f = 1; eq delta(b2) f = 1; solve;").unwrap();
        let jobs = s.jobs();
        assert_eq!(jobs.len(), 1);
        assert_eq!(jobs[0].system.name, DEFAULT_SYSTEM);
        assert_eq!(jobs[0].system.equations.len(), 2);
        assert_eq!(jobs[0].directive, Directive::Solve);
    }

    #[test]
    fn coset_rhs() {
        let s = parse_script("basis b1; eq delta(b1) f = chi(<b1>+0);").unwrap();
        let sys = s.system(None).unwrap();
        assert!(matches!(sys.equations[0].1, SymbolicFunction::Coset(_)));
    }

    #[test]
    fn undeclared_symbol_is_reported_at_its_token() {
        let d = parse_script("eq delta(b9) f = 1;").unwrap_err();
        assert_eq!((d.line, d.col), (1, 10));
        assert!(d.message.contains("b9"));
        let d = parse_script("basis b1;\neq delta(b1) f = g;").unwrap_err();
        assert_eq!((d.line, d.col), (2, 18));
    }

    #[test]
    fn syntax_errors_list_expected_tokens() {
        let d = parse_script("basis b1; eq delta(b1) g = 1;").unwrap_err();
        assert_eq!((d.line, d.col), (1, 24));
        assert_eq!(d.expected, vec!["`f`".to_string()]);
        let d = parse_script("basis b1; eq T[b1 f = 1;").unwrap_err();
        assert_eq!(d.expected, vec!["`]`".to_string()]);
    }

    #[test]
    fn names_are_unique_and_keywords_reserved() {
        assert!(parse_script("basis b1; let b1 = 2;").is_err());
        assert!(parse_script("let s = 1; fn s = 2;").is_err());
        assert!(parse_script("system a; system a;").is_err());
        assert!(parse_script("basis T;").is_err());
        assert!(parse_script("let x = 1; basis b1;").is_err());
        assert!(parse_script("solve nowhere;").is_err());
    }

    #[test]
    fn bindings_are_substituted() {
        let s = parse_script("basis b1 b2; let s = 1/2*b1 - b2 + 3/4; fn g = 2*chi(<b1> + s) - 1; eq T[s] - id f = g;")
            .unwrap();
        let sys = s.system(None).unwrap();
        let ctx = &s.basis;
        assert_eq!(sys.equations[0].0.render(ctx), "T[1/2*b1 - b2 + 3/4] - T[0]");
        assert_eq!(sys.equations[0].1.render(ctx), "-1 + 2*chi(<b1> + 1/2*b1 - b2 + 3/4)");
    }

    #[test]
    fn operator_composition_and_apply() {
        let s = parse_script("basis b1; fn g = apply(delta(b1) * delta(b1), latfun(<b1>; k1; 0)); eq 2*(T[b1] - id) f = g;")
            .unwrap();
        let sys = s.system(None).unwrap();
        assert_eq!(sys.equations[0].0.render(&s.basis), "2*T[b1] - 2*T[0]");
    }

    #[test]
    fn directives_bind_to_systems() {
        let text = "basis b1; system a; eq delta(b1) f = 1; system b; eq delta(b1) f = 0; solve a; solve; gallery bset k = 3 trials = 10;";
        let s = parse_script(text).unwrap();
        let jobs = s.jobs();
        assert_eq!(jobs[0].system.name, "a");
        assert_eq!(jobs[1].system.name, "b");
        assert_eq!(jobs[2].directive, Directive::Gallery { name: "bset".into(), params: vec![("k".into(), 3), ("trials".into(), 10)] });
    }

    #[test]
    fn rules_and_tables() {
        let text = "basis b1 b2; eq delta(b1) f = latfun(<b1, b2>; 2*k1 - count(1,2) + pos(2) + (-1) + table{(0,-1): 1/2, (1,0): 3; default 0}; 1/3; @(1,-2));";
        let s = parse_script(text).unwrap();
        let again = parse_script(&render_script(&s)).unwrap();
        assert_eq!(s, again);
    }
}
