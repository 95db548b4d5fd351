//! Builders and checks for the explicit constructions: each returns the
//! system it builds and a report whose claims carry their evidence.

mod bset;
mod systems;
mod trig;

pub use bset::{b_set_predicate, b_set_shift_difference, BClass, BSetContext};
pub use systems::{
    arbitrary_functions_report, arbitrary_functions_system, bounded_norm_report, bounded_norm_system,
    darboux_report, darboux_system, periodicity_family, periodicity_report, sc_polynomial_witness,
    unbounded_report, unbounded_system,
};
pub use trig::{e_jn, escape_report, escape_system, prefix_solution, EscapeConfig, EscapeRun};

use serde::{Deserialize, Serialize};

use crate::exact::{render_rational, BasisContext, FormalReal, Rational};
use crate::solver::Certificate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Evidence {
    Certificate { entries: Vec<(String, usize)>, operator: String, rhs: String },
    Witness { point: String, value: String },
    Exact { value: String },
    Estimate { value: f64, samples: usize },
    None,
}

impl Evidence {
    pub fn certificate(c: &Certificate, ctx: &BasisContext) -> Self {
        Evidence::Certificate {
            entries: c.entries().iter().map(|(a, j)| (a.render(ctx), *j)).collect(),
            operator: c.operator().render(ctx),
            rhs: c.rhs().render(ctx),
        }
    }

    pub fn witness(x: &FormalReal, value: &Rational, ctx: &BasisContext) -> Self {
        Evidence::Witness { point: ctx.render(x), value: render_rational(value) }
    }

    pub fn exact(value: impl Into<String>) -> Self {
        Evidence::Exact { value: value.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub description: String,
    pub verdict: Verdict,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalleryReport {
    pub name: String,
    pub parameters: Vec<(String, String)>,
    pub claims: Vec<Claim>,
    pub notes: Vec<String>,
}

impl GalleryReport {
    pub fn new(name: &str, parameters: Vec<(&str, String)>) -> Self {
        GalleryReport {
            name: name.into(),
            parameters: parameters.into_iter().map(|(k, v)| (k.into(), v)).collect(),
            claims: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn claim(&mut self, description: impl Into<String>, verdict: Verdict, evidence: Evidence) {
        self.claims.push(Claim { description: description.into(), verdict, evidence });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn any_fail(&self) -> bool {
        self.claims.iter().any(|c| c.verdict == Verdict::Fail)
    }

    pub fn any_inconclusive(&self) -> bool {
        self.claims.iter().any(|c| c.verdict == Verdict::Inconclusive)
    }

    pub fn render_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "{} ({})", self.name, params.join(", "));
        for c in &self.claims {
            let tag = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Inconclusive => "INCONCLUSIVE",
            };
            let _ = writeln!(out, "  [{tag}] {}", c.description);
            match &c.evidence {
                Evidence::Certificate { entries, operator, rhs } => {
                    for (a, j) in entries {
                        let _ = writeln!(out, "      ({a}) * eq{j}");
                    }
                    let _ = writeln!(out, "      operator: {operator}");
                    let _ = writeln!(out, "      rhs: {rhs}");
                }
                Evidence::Witness { point, value } => {
                    let _ = writeln!(out, "      at {point}: {value}");
                }
                Evidence::Exact { value } => {
                    let _ = writeln!(out, "      {value}");
                }
                Evidence::Estimate { value, samples } => {
                    let _ = writeln!(out, "      estimate {value:.6} from {samples} samples");
                }
                Evidence::None => {}
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        out
    }
}
