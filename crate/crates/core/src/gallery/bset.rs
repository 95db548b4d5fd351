//! The half-space `B = {v : phi(v) > 0}`, where `phi(v)` is the coefficient
//! of the highest-ranked basis element in the support of `v`.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Evidence, GalleryReport, Verdict};
use crate::error::{Error, Result};
use crate::exact::{render_rational, BasisContext, FormalReal, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSetContext {
    /// Coordinate indices from lowest to highest rank.
    order: Vec<usize>,
}

impl BSetContext {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = order.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != order.len() {
            return Err(Error::Invalid("repeated index in basis order".into()));
        }
        Ok(BSetContext { order })
    }

    /// The unit direction followed by `b1, ..., bk`.
    pub fn numbered(k: usize) -> Self {
        BSetContext { order: (0..=k).collect() }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Rank of the highest-ranked index in the support of `v`.
    pub fn top(&self, v: &FormalReal) -> Result<Option<usize>> {
        let mut best = None;
        for i in v.coords().keys() {
            let r = self
                .order
                .iter()
                .position(|j| j == i)
                .ok_or_else(|| Error::Context(format!("coordinate {i} is not ordered")))?;
            best = best.max(Some(r));
        }
        Ok(best)
    }

    pub fn phi(&self, v: &FormalReal) -> Result<Rational> {
        Ok(match self.top(v)? {
            Some(r) => v.coord(self.order[r]),
            None => Rational::zero(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BClass {
    InB,
    InMinusB,
    Zero,
}

pub fn b_set_predicate(ctx: &BSetContext, v: &FormalReal) -> Result<BClass> {
    let p = ctx.phi(v)?;
    Ok(if p.is_positive() {
        BClass::InB
    } else if p.is_negative() {
        BClass::InMinusB
    } else {
        BClass::Zero
    })
}

fn random_vector(rng: &mut ChaCha8Rng, ctx: &BSetContext, below: Option<usize>) -> FormalReal {
    let limit = below.map_or(ctx.order.len(), |r| r + 1);
    let coords = ctx.order[..limit].iter().filter_map(|&i| {
        if rng.gen_bool(0.5) {
            let n: i64 = rng.gen_range(-6..=6);
            let d: i64 = rng.gen_range(1..=3);
            Some((i, Rational::new(n.into(), d.into())))
        } else {
            None
        }
    });
    FormalReal::from_coords(coords.collect::<Vec<_>>())
}

/// Samples `v` and checks that `v` in `(B + b) xor B` forces the support of
/// `v` to stay at or below the top of `b`. Half of the samples are `b` plus
/// a vector supported at or below the top of `b`, which is where the
/// symmetric difference lives.
pub fn b_set_shift_difference(ctx: &BSetContext, b: &FormalReal, trials: usize, seed: u64) -> Result<GalleryReport> {
    if b_set_predicate(ctx, b)? != BClass::InB {
        return Err(Error::Invalid("the shift must lie in B".into()));
    }
    let top_b = ctx.top(b)?.expect("nonzero");
    let names = BasisContext::numbered(ctx.order.iter().copied().max().unwrap_or(0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = GalleryReport::new(
        "bset",
        vec![("b", names.render(b)), ("trials", trials.to_string()), ("seed", format!("{seed:#x}"))],
    );
    let mut hits = 0usize;
    let mut failure = None;
    for t in 0..trials {
        let v = if t % 2 == 0 {
            random_vector(&mut rng, ctx, None)
        } else {
            b + &random_vector(&mut rng, ctx, Some(top_b))
        };
        let in_shifted = b_set_predicate(ctx, &(&v - b))? == BClass::InB;
        let in_b = b_set_predicate(ctx, &v)? == BClass::InB;
        if in_shifted != in_b {
            hits += 1;
            if ctx.top(&v)? > Some(top_b) {
                failure = Some(v);
                break;
            }
        }
    }
    match failure {
        None => r.claim(
            "every sampled element of (B + b) xor B is supported at or below the top of b",
            Verdict::Pass,
            Evidence::exact(format!("{hits} of {trials} samples fell in the symmetric difference")),
        ),
        Some(v) => r.claim(
            "every sampled element of (B + b) xor B is supported at or below the top of b",
            Verdict::Fail,
            Evidence::witness(&v, &ctx.phi(&v)?, &names),
        ),
    }
    let phi_b = ctx.phi(b)?;
    r.note(format!("phi(b) = {}", render_rational(&phi_b)));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    fn b(i: usize) -> FormalReal {
        FormalReal::basis(i)
    }

    #[test]
    fn classification_examples() {
        let ctx = BSetContext::numbered(8);
        let v = &b(1).scale(&qi(3)) - &b(3).scale(&qi(2));
        assert_eq!(b_set_predicate(&ctx, &v).unwrap(), BClass::InMinusB);
        let v = &b(4).scale(&q(1, 2)) - &b(1);
        assert_eq!(b_set_predicate(&ctx, &v).unwrap(), BClass::InB);
        assert_eq!(b_set_predicate(&ctx, &FormalReal::zero()).unwrap(), BClass::Zero);
    }

    #[test]
    fn shift_difference_examples() {
        let ctx = BSetContext::numbered(8);
        let shift = b(2);
        let v = b(7).scale(&qi(5));
        let in_sym = |v: &FormalReal| {
            (b_set_predicate(&ctx, &(v - &shift)).unwrap() == BClass::InB)
                != (b_set_predicate(&ctx, v).unwrap() == BClass::InB)
        };
        assert!(!in_sym(&v));
        let v = &b(2) - &b(1);
        assert!(in_sym(&v));
        assert_eq!(ctx.top(&v).unwrap(), Some(2));
    }

    #[test]
    fn random_trials_pass() {
        let ctx = BSetContext::numbered(8);
        let r = b_set_shift_difference(&ctx, &b(2), 1000, 7).unwrap();
        assert!(r.all_pass(), "{}", r.render_text());
    }

    #[test]
    fn custom_order() {
        let ctx = BSetContext::new(vec![0, 3, 1, 2]).unwrap();
        let v = &b(3) - &b(1);
        assert_eq!(b_set_predicate(&ctx, &v).unwrap(), BClass::InMinusB);
        assert!(BSetContext::new(vec![1, 1]).is_err());
        assert!(b_set_shift_difference(&ctx, &(-b(2)), 10, 1).is_err());
    }
}
