use std::fmt::Write as _;

use diffsys::exact::{render_rational, BasisContext};

use super::{Directive, Script, Stmt, VanishSpec};

/// One statement per line, in a form `parse_script` reads back.
pub fn render_script(script: &Script) -> String {
    let ctx = &script.basis;
    let mut out = String::new();
    for st in &script.statements {
        out.push_str(&render_stmt(ctx, st));
        out.push('\n');
    }
    out
}

fn render_stmt(ctx: &BasisContext, st: &Stmt) -> String {
    match st {
        Stmt::Basis(names) if names.is_empty() => "basis;".into(),
        Stmt::Basis(names) => format!("basis {};", names.join(" ")),
        Stmt::LetShift { name, value } => format!("let {name} = {};", ctx.render(value)),
        Stmt::LetFn { name, value } => format!("fn {name} = {};", value.render(ctx)),
        Stmt::System(name) => format!("system {name};"),
        Stmt::Eq { op, rhs } => format!("eq {} f = {};", op.render(ctx), rhs.render(ctx)),
        Stmt::Directive { system, directive } => {
            let mut s = directive.keyword().to_string();
            if let Some(n) = system {
                let _ = write!(s, " {n}");
            }
            match directive {
                Directive::Solve | Directive::MinSupNorm => {}
                Directive::PolySolve { degree } => {
                    if let Some(d) = degree {
                        let _ = write!(s, " degree {d}");
                    }
                }
                Directive::Deduce { entries, bound } => {
                    let parts: Vec<String> =
                        entries.iter().map(|(op, i)| format!("({}) @ {i}", op.render(ctx))).collect();
                    let _ = write!(s, " with {}", parts.join(", "));
                    if let Some(b) = bound {
                        let _ = write!(s, " bound {}", render_rational(b));
                    }
                }
                Directive::Vanish(VanishSpec::OffLattice) => s.push_str(" off"),
                Directive::Vanish(VanishSpec::Cosets(cs)) => {
                    let parts: Vec<String> =
                        cs.iter().map(|(l, x)| format!("{} + {}", l.render(ctx), ctx.render(x))).collect();
                    let _ = write!(s, " on {}", parts.join(", "));
                }
                Directive::Gallery { name, params } => {
                    let _ = write!(s, " {name}");
                    for (k, v) in params {
                        let _ = write!(s, " {k} = {v}");
                    }
                }
            }
            s.push(';');
            s
        }
    }
}
