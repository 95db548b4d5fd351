use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{rational_to_f64, Rational};
use crate::error::{Error, Result};

/// Largest cyclotomic order the arithmetic will build.
pub const MAX_CYCLOTOMIC_ORDER: u64 = 1 << 20;

/// A phase `rho` standing for `exp(2 pi i rho)`, kept reduced modulo 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PhaseQ(Rational);

impl PhaseQ {
    pub fn new(r: Rational) -> Self {
        let f = &r - r.floor();
        PhaseQ(f)
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn add(&self, other: &PhaseQ) -> PhaseQ {
        PhaseQ::new(&self.0 + &other.0)
    }

    pub fn neg(&self) -> PhaseQ {
        PhaseQ::new(-&self.0)
    }
}

/// An element of the cyclotomic field `Q(zeta_N)`, stored as rational
/// coefficients on `1, zeta, ..., zeta^(phi(N)-1)` after reduction modulo the
/// `N`-th cyclotomic polynomial.
///
/// Rational values are always stored with `order == 1`. Other values may
/// have more than one representation across orders; use [`CyclotomicNumber::is_zero`]
/// on a difference for semantic equality, or [`CyclotomicNumber::canonical`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CyclotomicNumber {
    order: u64,
    coeffs: Vec<Rational>,
}

fn cache() -> &'static Mutex<HashMap<u64, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Integer coefficients (ascending) of the `n`-th cyclotomic polynomial.
pub(crate) fn cyclotomic_poly(n: u64) -> Arc<Vec<BigInt>> {
    if let Some(p) = cache().lock().expect("cache poisoned").get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Phi_d, d | n, d < n
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let den = cyclotomic_poly(d);
        num = exact_div_monic(&num, &den);
    }
    let p = Arc::new(num);
    cache().lock().expect("cache poisoned").insert(n, p.clone());
    p
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qlen = rem.len() - dd;
    let mut quo = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quo[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quo
}

fn check_order(n: u64) -> Result<()> {
    if n == 0 || n > MAX_CYCLOTOMIC_ORDER {
        Err(Error::Resource(format!(
            "cyclotomic order {n} exceeds the cap {MAX_CYCLOTOMIC_ORDER}"
        )))
    } else {
        Ok(())
    }
}

impl CyclotomicNumber {
    pub fn zero() -> Self {
        CyclotomicNumber { order: 1, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        CyclotomicNumber::rational(Rational::one())
    }

    pub fn rational(r: Rational) -> Self {
        let coeffs = if r.is_zero() { Vec::new() } else { vec![r] };
        CyclotomicNumber { order: 1, coeffs }
    }

    /// `zeta_order ^ k`.
    pub fn root(order: u64, k: i64) -> Result<Self> {
        check_order(order)?;
        let e = k.rem_euclid(order as i64) as usize;
        let mut raw = vec![Rational::zero(); e + 1];
        raw[e] = Rational::one();
        Ok(CyclotomicNumber::reduce_raw(order, raw))
    }

    /// `exp(2 pi i phase)`.
    pub fn from_phase(phase: &PhaseQ) -> Result<Self> {
        let d = phase.value().denom().to_u64().ok_or_else(|| {
            Error::Resource("phase denominator too large".into())
        })?;
        let n = phase.value().numer().to_i64().expect("reduced phase numerator fits");
        CyclotomicNumber::root(d, n)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    fn reduce_raw(order: u64, mut raw: Vec<Rational>) -> Self {
        let phi = cyclotomic_poly(order);
        let deg = phi.len() - 1;
        if raw.len() > deg {
            for i in (deg..raw.len()).rev() {
                let c = std::mem::take(&mut raw[i]);
                if c.is_zero() {
                    continue;
                }
                // x^i = x^(i-deg) * x^deg and x^deg = -sum_{j<deg} phi_j x^j
                for (j, pj) in phi.iter().enumerate().take(deg) {
                    if !pj.is_zero() {
                        raw[i - deg + j] -= &c * Rational::from_integer(pj.clone());
                    }
                }
            }
            raw.truncate(deg);
        }
        while raw.last().is_some_and(Zero::is_zero) {
            raw.pop();
        }
        if raw.len() <= 1 {
            return CyclotomicNumber { order: 1, coeffs: raw };
        }
        CyclotomicNumber { order, coeffs: raw }
    }

    /// Re-expresses `self` in `Q(zeta_target)`; `target` must be a multiple of the order.
    fn embed(&self, target: u64) -> Vec<Rational> {
        debug_assert_eq!(target % self.order, 0);
        let step = (target / self.order) as usize;
        let mut raw = vec![Rational::zero(); (self.coeffs.len().max(1) - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[i * step] = c.clone();
        }
        raw
    }

    fn common_order(&self, other: &Self) -> Result<u64> {
        let n = self.order.lcm(&other.order);
        check_order(n)?;
        Ok(n)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let n = self.common_order(other)?;
        let mut a = self.embed(n);
        let b = other.embed(n);
        if a.len() < b.len() {
            a.resize(b.len(), Rational::zero());
        }
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        Ok(CyclotomicNumber::reduce_raw(n, a))
    }

    pub fn neg(&self) -> Self {
        CyclotomicNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return CyclotomicNumber::zero();
        }
        CyclotomicNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(CyclotomicNumber::zero());
        }
        let n = self.common_order(other)?;
        let a = self.embed(n);
        let b = other.embed(n);
        let mut raw = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    raw[i + j] += x * y;
                }
            }
        }
        Ok(CyclotomicNumber::reduce_raw(n, raw))
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = CyclotomicNumber::one();
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Complex conjugate (`zeta -> zeta^-1`).
    pub fn conj(&self) -> Self {
        if self.order == 1 {
            return self.clone();
        }
        let n = self.order as usize;
        let mut raw = vec![Rational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[(n - i) % n] += c;
        }
        CyclotomicNumber::reduce_raw(self.order, raw)
    }

    /// `(z + conj z) / 2`.
    pub fn re(&self) -> Result<Self> {
        Ok(self.add(&self.conj())?.scale(&Rational::new(1.into(), 2.into())))
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.order as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (i, c)| {
            let t = std::f64::consts::TAU * i as f64 / n;
            let c = rational_to_f64(c);
            (re + c * t.cos(), im + c * t.sin())
        })
    }

    pub fn to_f64(&self) -> f64 {
        self.to_complex().0
    }

    /// Representation in the smallest `Q(zeta_m)`, `m | order`, that contains the value.
    pub fn canonical(&self) -> Self {
        if self.order == 1 {
            return self.clone();
        }
        for m in divisors(self.order) {
            if m == self.order {
                break;
            }
            if let Some(c) = self.restrict_to(m) {
                return c;
            }
        }
        self.clone()
    }

    /// Solves `self = sum_i y_i zeta_m^i` over Q, if possible.
    fn restrict_to(&self, m: u64) -> Option<Self> {
        let deg_m = cyclotomic_poly(m).len() - 1;
        let n = self.order;
        let deg_n = cyclotomic_poly(n).len() - 1;
        // columns: images of zeta_m^i in Q(zeta_n)
        let cols: Vec<Vec<Rational>> = (0..deg_m)
            .map(|i| {
                let mut v = CyclotomicNumber::root(m, i as i64)
                    .expect("divisor order within cap")
                    .embed_padded(n, deg_n);
                v.resize(deg_n, Rational::zero());
                v
            })
            .collect();
        let mut target = self.coeffs.clone();
        target.resize(deg_n, Rational::zero());
        let y = solve_dense(&cols, &target)?;
        let raw: Vec<Rational> = y;
        Some(CyclotomicNumber::reduce_raw(m, raw))
    }

    fn embed_padded(&self, n: u64, deg: usize) -> Vec<Rational> {
        let mut v = CyclotomicNumber::reduce_raw(n, self.embed(n)).coeffs;
        // reduce_raw may demote to order 1; coefficients of 1 are position 0 either way
        v.resize(deg, Rational::zero());
        v
    }
}

/// Least-squares-free exact solve of `sum_j y_j cols[j] = target`; `None` if inconsistent.
fn solve_dense(cols: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let rows = target.len();
    let ncols = cols.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pr = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pr) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    let mut y = vec![Rational::zero(); ncols];
    for (i, c) in pivots.iter().enumerate() {
        y[*c] = m[i][ncols].clone();
    }
    Some(y)
}

impl Default for CyclotomicNumber {
    fn default() -> Self {
        CyclotomicNumber::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    fn z(n: u64, k: i64) -> CyclotomicNumber {
        CyclotomicNumber::root(n, k).unwrap()
    }

    #[test]
    fn cyclotomic_polynomials() {
        let as_i64 = |n| -> Vec<i64> {
            cyclotomic_poly(n).iter().map(|c| c.to_i64().unwrap()).collect()
        };
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(6), vec![1, -1, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn i_squared_plus_one() {
        let i2 = z(4, 1).mul(&z(4, 1)).unwrap();
        assert!(i2.add(&CyclotomicNumber::one()).unwrap().is_zero());
    }

    #[test]
    fn cube_root_cubed() {
        let w = z(3, 1);
        let w3 = w.mul(&w).unwrap().mul(&w).unwrap();
        assert_eq!(w3, CyclotomicNumber::one());
    }

    #[test]
    fn sixth_root_identity() {
        // zeta6 - zeta3 - 1 = 0; numerically e^{i pi/3} = e^{2 i pi/3} + 1
        let (a, b) = (z(6, 1).to_complex(), z(3, 1).to_complex());
        assert!((a.0 - b.0 - 1.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        let lhs = z(6, 1).sub(&z(3, 1)).unwrap().sub(&CyclotomicNumber::one()).unwrap();
        assert!(lhs.is_zero());
    }

    #[test]
    fn rational_real_parts() {
        // cos(2 pi / 3) = -1/2
        assert_eq!(z(3, 1).re().unwrap().as_rational(), Some(q(-1, 2)));
        assert_eq!(z(4, 1).re().unwrap().as_rational(), Some(qi(0)));
        // cos(pi / 4) is irrational
        assert_eq!(z(8, 1).re().unwrap().as_rational(), None);
        assert!((z(8, 1).re().unwrap().to_f64() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn canonical_order() {
        let x = z(12, 3); // = zeta_4
        assert_eq!(x.canonical(), z(4, 1));
        assert_eq!(z(12, 1).canonical().order(), 12);
    }

    #[test]
    fn phases() {
        let p = PhaseQ::new(q(5, 4));
        assert_eq!(p.value(), &q(1, 4));
        assert_eq!(PhaseQ::new(q(-1, 4)).value(), &q(3, 4));
        assert_eq!(CyclotomicNumber::from_phase(&p).unwrap(), z(4, 1));
    }

    #[test]
    fn order_cap() {
        assert!(matches!(
            CyclotomicNumber::root(MAX_CYCLOTOMIC_ORDER + 1, 1),
            Err(Error::Resource(_))
        ));
    }
}
