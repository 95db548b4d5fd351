//! Syzygies of the Laurent images of a system's operators, via a module
//! Groebner basis over the polynomial ring after clearing monomials.
//!
//! The rows `(q_i | e_i)` generate a module whose elements with zero first
//! component are exactly the syzygies of `(q_1, ..., q_n)`. With a
//! position-over-term order that ranks the first component highest, a
//! Groebner basis of the rows restricts to one of the syzygy module.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{deduce, Certificate, EquationSystem};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::operator::LaurentPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyzygyBudget {
    /// S-pairs reduced before giving up.
    pub max_pairs: usize,
    /// Largest total degree allowed in any intermediate monomial.
    pub max_degree: u32,
}

impl Default for SyzygyBudget {
    fn default() -> Self {
        SyzygyBudget { max_pairs: 10_000, max_degree: 40 }
    }
}

/// Exponent vector ordered by graded reverse lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Mono(Vec<u32>);

impl Mono {
    fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn lcm(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    fn div(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0).rev() {
                if a != b {
                    // smaller exponent in the last differing variable is larger
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

type Poly = BTreeMap<Mono, Rational>;

#[derive(Debug, Clone, PartialEq)]
struct Vector(Vec<Poly>);

impl Vector {
    /// Position, monomial and coefficient of the leading term.
    fn lead(&self) -> Option<(usize, &Mono, &Rational)> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_empty())
            .map(|(i, p)| {
                let (m, c) = p.last_key_value().expect("nonempty");
                (i, m, c)
            })
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(BTreeMap::is_empty)
    }

    /// `self += c * x^m * other`.
    fn add_scaled(&mut self, c: &Rational, m: &Mono, other: &Vector) {
        for (dst, src) in self.0.iter_mut().zip(&other.0) {
            for (k, v) in src {
                let key = k.mul(m);
                let slot = dst.entry(key.clone()).or_insert_with(Rational::zero);
                *slot += c * v;
                if slot.is_zero() {
                    dst.remove(&key);
                }
            }
        }
    }

    fn max_degree(&self) -> u32 {
        self.0.iter().flat_map(|p| p.keys().map(Mono::degree)).max().unwrap_or(0)
    }

    fn make_monic(&mut self) {
        if let Some((_, _, c)) = self.lead() {
            let inv = c.recip();
            for p in &mut self.0 {
                for v in p.values_mut() {
                    *v *= &inv;
                }
            }
        }
    }
}

/// Reduces the leading term until no basis lead divides it; with `full`,
/// lower terms are reduced as well.
fn reduce(mut v: Vector, basis: &[Vector], full: bool) -> Vector {
    let mut done = Vector(vec![Poly::new(); v.0.len()]);
    loop {
        let Some((pos, m, c)) = v.lead() else { break };
        let (m, c) = (m.clone(), c.clone());
        let hit = basis.iter().find_map(|g| {
            let (gp, gm, gc) = g.lead()?;
            (gp == pos && gm.divides(&m)).then(|| (g, m.div(gm), gc.clone()))
        });
        match hit {
            Some((g, q, gc)) => v.add_scaled(&-(&c / &gc), &q, g),
            None if full => {
                v.0[pos].remove(&m);
                done.0[pos].insert(m, c);
            }
            None => break,
        }
    }
    if full {
        done
    } else {
        v
    }
}

fn to_poly(p: &LaurentPoly, shift: &[i64]) -> Poly {
    p.monomials()
        .iter()
        .map(|(e, c)| {
            let m = e.iter().zip(shift).map(|(a, s)| u32::try_from(a - s).expect("cleared")).collect();
            (Mono(m), c.clone())
        })
        .collect()
}

/// Generators of the syzygy module of the operators' Laurent images, each
/// returned as the certificate it induces. Monomial factors are units in
/// the Laurent ring, so they do not change which right-hand sides vanish.
pub fn syzygy_certificates(s: &EquationSystem, budget: &SyzygyBudget) -> Result<Vec<Certificate>> {
    let lattice = s.shift_lattice();
    let nvars = lattice.rank();
    let n = s.len();
    let mut rows = Vec::with_capacity(n);
    let mut shifts = Vec::with_capacity(n);
    for (i, (d, _)) in s.equations().iter().enumerate() {
        let p = d.to_laurent(lattice)?;
        let shift = p.min_exponents();
        let mut comps = vec![Poly::new(); n + 1];
        comps[0] = to_poly(&p, &shift);
        comps[1 + i].insert(Mono(vec![0; nvars]), Rational::one());
        rows.push(Vector(comps));
        shifts.push(shift);
    }

    let mut basis: Vec<Vector> = rows.into_iter().filter(|v| !v.is_zero()).collect();
    for v in &basis {
        if v.max_degree() > budget.max_degree {
            return Err(Error::Resource("operator degree exceeds the syzygy budget".into()));
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let mut processed = 0usize;
    while !pairs.is_empty() {
        // normal strategy: smallest lcm degree first
        let k = (0..pairs.len())
            .min_by_key(|&k| {
                let (i, j) = pairs[k];
                match (basis[i].lead(), basis[j].lead()) {
                    (Some((_, a, _)), Some((_, b, _))) => a.lcm(b).degree(),
                    _ => 0,
                }
            })
            .expect("nonempty");
        let (i, j) = pairs.swap_remove(k);
        let (Some((pi, mi, ci)), Some((pj, mj, cj))) = (basis[i].lead(), basis[j].lead()) else {
            continue;
        };
        if pi != pj {
            continue;
        }
        processed += 1;
        if processed > budget.max_pairs {
            return Err(Error::Resource(format!("more than {} S-pairs", budget.max_pairs)));
        }
        let l = mi.lcm(mj);
        if l.degree() > budget.max_degree {
            return Err(Error::Resource(format!("degree above {}", budget.max_degree)));
        }
        let (ui, uj) = (l.div(mi), l.div(mj));
        let (ci, cj) = (ci.recip(), cj.recip());
        let mut spoly = Vector(vec![Poly::new(); n + 1]);
        spoly.add_scaled(&ci, &ui, &basis[i]);
        spoly.add_scaled(&-cj, &uj, &basis[j]);
        let r = reduce(spoly, &basis, false);
        if r.is_zero() {
            continue;
        }
        if r.max_degree() > budget.max_degree {
            return Err(Error::Resource(format!("degree above {}", budget.max_degree)));
        }
        basis.push(r);
        let new = basis.len() - 1;
        for i in 0..new {
            pairs.push((i, new));
        }
    }

    // minimal, reduced basis of the syzygy part
    let mut syz: Vec<Vector> = basis.into_iter().filter(|v| v.0[0].is_empty()).collect();
    syz.sort_by(|a, b| {
        let (pa, ma, _) = a.lead().expect("nonzero");
        let (pb, mb, _) = b.lead().expect("nonzero");
        pa.cmp(&pb).then_with(|| ma.cmp(mb))
    });
    let mut minimal: Vec<Vector> = Vec::new();
    for v in syz {
        let (p, m, _) = v.lead().expect("nonzero");
        let redundant = minimal.iter().any(|g| {
            let (gp, gm, _) = g.lead().expect("nonzero");
            gp == p && gm.divides(m)
        });
        if !redundant {
            minimal.push(v);
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Vector> =
            minimal.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, v)| v.clone()).collect();
        let mut r = reduce(minimal[k].clone(), &others, true);
        r.make_monic();
        reduced.push(r);
    }

    let mut certs = Vec::with_capacity(reduced.len());
    for v in reduced {
        let mut entries = Vec::new();
        for (i, comp) in v.0.iter().enumerate().skip(1) {
            if comp.is_empty() {
                continue;
            }
            let eq = i - 1;
            let a = LaurentPoly::from_monomials(
                nvars,
                comp.iter().map(|(m, c)| {
                    let e = m.0.iter().zip(&shifts[eq]).map(|(x, s)| i64::from(*x) - s).collect();
                    (e, c.clone())
                }),
            );
            entries.push((a.to_operator(lattice), eq));
        }
        let cert = deduce(s, &entries)?;
        debug_assert!(cert.operator().is_zero());
        certs.push(cert);
    }
    Ok(certs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{qi, FormalReal};
    use crate::function::{zero_test, SymbolicFunction};
    use crate::operator::DifferenceOperator;
    use crate::solver::verify_certificate;

    fn b(i: usize) -> FormalReal {
        FormalReal::basis(i)
    }

    #[test]
    fn grevlex_order() {
        let m = |v: &[u32]| Mono(v.to_vec());
        assert!(m(&[1, 0]) > m(&[0, 1]));
        assert!(m(&[1, 1]) < m(&[2, 0]));
        assert!(m(&[2, 0]) > m(&[1, 1]));
        assert!(m(&[0, 0, 2]) < m(&[1, 1, 0]));
    }

    #[test]
    fn koszul_pair() {
        let g1 = SymbolicFunction::Constant(qi(1));
        let g2 = SymbolicFunction::Constant(qi(2));
        let s = EquationSystem::new(vec![
            (DifferenceOperator::delta(b(1)), g1),
            (DifferenceOperator::delta(b(2)), g2),
        ]);
        let certs = syzygy_certificates(&s, &SyzygyBudget::default()).unwrap();
        assert_eq!(certs.len(), 1);
        let c = &certs[0];
        let (a0, a1) = (&c.entries()[0].0, &c.entries()[1].0);
        let d1 = DifferenceOperator::delta(b(1));
        let d2 = DifferenceOperator::delta(b(2));
        assert!(
            (a0 == &d2 && a1 == &d1.neg()) || (a0 == &d2.neg() && a1 == &d1),
            "{a0:?} {a1:?}"
        );
        assert!(zero_test(c.rhs()).unwrap().is_zero());
    }

    #[test]
    fn single_equation_has_no_syzygy() {
        let s = EquationSystem::new(vec![(DifferenceOperator::delta(b(1)), SymbolicFunction::zero())]);
        assert!(syzygy_certificates(&s, &SyzygyBudget::default()).unwrap().is_empty());
    }

    #[test]
    fn triangle_has_a_nonzero_generator() {
        let one = SymbolicFunction::Constant(qi(1));
        let a3 = -(&b(1) + &b(2));
        let s = EquationSystem::new(vec![
            (DifferenceOperator::delta(b(1)), one.clone()),
            (DifferenceOperator::delta(b(2)), one.clone()),
            (DifferenceOperator::delta(a3), one),
        ]);
        let certs = syzygy_certificates(&s, &SyzygyBudget::default()).unwrap();
        assert!(certs.iter().all(|c| c.operator().is_zero()));
        let live: Vec<_> = certs.iter().filter(|c| verify_certificate(&s, c)).collect();
        assert!(!live.is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let s = EquationSystem::new(vec![
            (DifferenceOperator::delta(b(1).scale(&qi(50))), SymbolicFunction::zero()),
            (DifferenceOperator::delta(b(1)), SymbolicFunction::zero()),
        ]);
        assert!(matches!(
            syzygy_certificates(&s, &SyzygyBudget::default()),
            Err(Error::Resource(_))
        ));
    }
}
