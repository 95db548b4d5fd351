use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{render_rational, Rational};

/// A value rule for a lattice function, in terms of the Hermite coordinates
/// `k_1, ..., k_r` of the argument (0-based in the data, `k1`.. when rendered).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LatticeRule {
    Const(Rational),
    /// `k_i`
    Coord(usize),
    /// `1` if `k_i > 0`, else `0`
    Positive(usize),
    /// `|{ i in J : k_i > 0 }|`
    CountPositive(Vec<usize>),
    Sum(Vec<(Rational, LatticeRule)>),
    /// Explicit values on finitely many points, `default` elsewhere.
    Table {
        entries: BTreeMap<Vec<i64>, Rational>,
        default: Rational,
    },
}

impl LatticeRule {
    /// Flattened rational-linear combination; a lone unit term collapses to itself.
    pub fn sum(terms: impl IntoIterator<Item = (Rational, LatticeRule)>) -> LatticeRule {
        let mut out: Vec<(Rational, LatticeRule)> = Vec::new();
        for (c, r) in terms {
            if c.is_zero() {
                continue;
            }
            match r {
                LatticeRule::Sum(inner) => {
                    out.extend(inner.into_iter().map(|(d, s)| (&c * d, s)));
                }
                r => out.push((c, r)),
            }
        }
        match out.len() {
            0 => LatticeRule::Const(Rational::zero()),
            1 if out[0].0.is_one() => out.pop().expect("one term").1,
            _ => LatticeRule::Sum(out),
        }
    }

    pub fn eval(&self, k: &[i64]) -> Rational {
        match self {
            LatticeRule::Const(c) => c.clone(),
            LatticeRule::Coord(i) => Rational::from_integer(BigInt::from(k[*i])),
            LatticeRule::Positive(i) => indicator(k[*i] > 0),
            LatticeRule::CountPositive(js) => {
                Rational::from_integer(BigInt::from(js.iter().filter(|&&j| k[j] > 0).count()))
            }
            LatticeRule::Sum(terms) => {
                let mut whole = BigInt::zero();
                let mut frac = Rational::zero();
                for (c, r) in terms {
                    let v = r.eval(k);
                    if v.is_zero() {
                        continue;
                    }
                    if c.is_integer() && v.is_integer() {
                        whole += c.numer() * v.numer();
                    } else {
                        frac += c * v;
                    }
                }
                frac + Rational::from_integer(whole)
            }
            LatticeRule::Table { entries, default } => {
                entries.get(k).cloned().unwrap_or_else(|| default.clone())
            }
        }
    }

    /// Largest coordinate index the rule reads, plus one.
    pub fn arity(&self) -> usize {
        match self {
            LatticeRule::Const(_) => 0,
            LatticeRule::Coord(i) | LatticeRule::Positive(i) => i + 1,
            LatticeRule::CountPositive(js) => js.iter().map(|j| j + 1).max().unwrap_or(0),
            LatticeRule::Sum(terms) => terms.iter().map(|(_, r)| r.arity()).max().unwrap_or(0),
            LatticeRule::Table { entries, .. } => {
                entries.keys().map(|k| k.len()).max().unwrap_or(0)
            }
        }
    }

    /// A bound `R` such that every breakpoint and every table key of the rule
    /// has all coordinates in `[-R, R]`.
    pub fn extent(&self) -> i64 {
        match self {
            LatticeRule::Table { entries, .. } => entries
                .keys()
                .flat_map(|k| k.iter().map(|c| c.abs()))
                .max()
                .unwrap_or(0),
            LatticeRule::Sum(terms) => terms.iter().map(|(_, r)| r.extent()).max().unwrap_or(0),
            _ => 1,
        }
    }

    /// Renders with 1-based coordinate names: `2*k1 + count(1,2) - 1`.
    pub fn render(&self) -> String {
        match self {
            LatticeRule::Const(c) => render_rational(c),
            LatticeRule::Coord(i) => format!("k{}", i + 1),
            LatticeRule::Positive(i) => format!("pos({})", i + 1),
            LatticeRule::CountPositive(js) => {
                let js: Vec<String> = js.iter().map(|j| (j + 1).to_string()).collect();
                format!("count({})", js.join(","))
            }
            LatticeRule::Table { entries, default } => {
                let mut s = String::from("table{");
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    let k: Vec<String> = k.iter().map(|c| c.to_string()).collect();
                    let _ = write!(s, "({}): {}", k.join(","), render_rational(v));
                }
                let _ = write!(s, "; default {}}}", render_rational(default));
                s
            }
            LatticeRule::Sum(terms) => {
                let mut s = String::new();
                for (i, (c, r)) in terms.iter().enumerate() {
                    let neg = c.is_negative();
                    if i == 0 {
                        if neg {
                            s.push('-');
                        }
                    } else {
                        s.push_str(if neg { " - " } else { " + " });
                    }
                    let mag = c.abs();
                    let body = match r {
                        LatticeRule::Sum(_) => format!("({})", r.render()),
                        LatticeRule::Const(v) if v.is_negative() => format!("({})", r.render()),
                        _ => r.render(),
                    };
                    if mag.is_one() {
                        s.push_str(&body);
                    } else {
                        let _ = write!(s, "{}*{}", render_rational(&mag), body);
                    }
                }
                s
            }
        }
    }
}

fn indicator(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    #[test]
    fn count_positive() {
        let r = LatticeRule::CountPositive(vec![0, 1]);
        assert_eq!(r.eval(&[3, -1]), qi(1));
        assert_eq!(r.eval(&[0, 0]), qi(0));
        assert_eq!(r.eval(&[2, 5]), qi(2));
    }

    #[test]
    fn sums_flatten() {
        let r = LatticeRule::sum([
            (qi(2), LatticeRule::Coord(0)),
            (qi(1), LatticeRule::sum([(q(1, 2), LatticeRule::Positive(1))])),
        ]);
        assert_eq!(
            r,
            LatticeRule::Sum(vec![
                (qi(2), LatticeRule::Coord(0)),
                (q(1, 2), LatticeRule::Positive(1))
            ])
        );
        assert_eq!(r.eval(&[1, 1]), q(5, 2));
        assert_eq!(r.render(), "2*k1 + 1/2*pos(2)");
        assert_eq!(LatticeRule::sum([(qi(1), LatticeRule::Coord(2))]), LatticeRule::Coord(2));
    }

    #[test]
    fn tables() {
        let t = LatticeRule::Table {
            entries: [(vec![0, 0], qi(1))].into_iter().collect(),
            default: qi(0),
        };
        assert_eq!(t.eval(&[0, 0]), qi(1));
        assert_eq!(t.eval(&[0, 1]), qi(0));
        assert_eq!(t.render(), "table{(0,0): 1; default 0}");
        assert_eq!(t.extent(), 0);
    }
}
