//! Exact quadratic surds `(p + q√m)/r`, the resonance test `k·ξ = 0` over
//! them, and their continued-fraction convergents.
//!
//! A surd is normalised to `α + β√s` with `α, β` rational and `s > 1`
//! squarefree. Distinct squarefree roots are linearly independent over `Q`
//! together with `1`, so `k·ξ = 0` splits into one rational equation per
//! root plus one for the rational parts.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;

/// `(p + q√m)/r` with integer `p, q, m, r`, `m ≥ 0`, `r ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SurdDoc", into = "SurdDoc")]
pub struct QuadraticSurd {
    p: i64,
    q: i64,
    m: i64,
    r: i64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SurdDoc {
    pub p: i64,
    #[serde(default)]
    pub q: i64,
    #[serde(default)]
    pub m: i64,
    #[serde(default = "one_i64")]
    pub r: i64,
}

fn one_i64() -> i64 {
    1
}

impl TryFrom<SurdDoc> for QuadraticSurd {
    type Error = Error;
    fn try_from(d: SurdDoc) -> Result<Self> {
        QuadraticSurd::new(d.p, d.q, d.m, d.r)
    }
}

impl From<QuadraticSurd> for SurdDoc {
    fn from(s: QuadraticSurd) -> Self {
        SurdDoc {
            p: s.p,
            q: s.q,
            m: s.m,
            r: s.r,
        }
    }
}

impl QuadraticSurd {
    pub fn new(p: i64, q: i64, m: i64, r: i64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidSurd("zero denominator".into()));
        }
        if m < 0 {
            return Err(Error::InvalidSurd(format!("negative radicand {m}")));
        }
        Ok(QuadraticSurd { p, q, m, r })
    }

    pub fn integer(n: i64) -> Self {
        QuadraticSurd { p: n, q: 0, m: 0, r: 1 }
    }

    pub fn rational(p: i64, r: i64) -> Result<Self> {
        QuadraticSurd::new(p, 0, 0, r)
    }

    /// `√m`.
    pub fn sqrt(m: i64) -> Result<Self> {
        QuadraticSurd::new(0, 1, m, 1)
    }

    pub fn to_f64(&self) -> f64 {
        (self.p as f64 + self.q as f64 * (self.m as f64).sqrt()) / self.r as f64
    }

    /// Normal form `(α, β, s)` with `s` squarefree and `s > 1` whenever `β ≠ 0`.
    pub fn normal_form(&self) -> (BigRational, BigRational, i64) {
        let r = BigInt::from(self.r);
        let alpha = BigRational::new(BigInt::from(self.p), r.clone());
        let (outer, s) = squarefree_split(self.m);
        if self.q == 0 || s == 0 {
            return (alpha, BigRational::zero(), 0);
        }
        let coeff = BigRational::new(BigInt::from(self.q) * BigInt::from(outer), r);
        if s == 1 {
            (alpha + coeff, BigRational::zero(), 0)
        } else {
            (alpha, coeff, s)
        }
    }

    pub fn is_rational(&self) -> bool {
        self.normal_form().1.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        let (a, b, _) = self.normal_form();
        a.is_zero() && b.is_zero()
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 0 || self.m == 0 {
            write!(f, "{}/{}", self.p, self.r)
        } else {
            write!(f, "({} + {}√{})/{}", self.p, self.q, self.m, self.r)
        }
    }
}

/// `m = outer² · s` with `s` squarefree.
fn squarefree_split(m: i64) -> (i64, i64) {
    if m == 0 {
        return (0, 0);
    }
    let mut s = m;
    let mut outer = 1i64;
    let mut f = 2i64;
    while f * f <= s {
        while s % (f * f) == 0 {
            s /= f * f;
            outer *= f;
        }
        f += 1;
    }
    (outer, s)
}

/// A `d`-vector of exact quadratic surds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SurdVector(Vec<QuadraticSurd>);

impl SurdVector {
    pub fn new(components: Vec<QuadraticSurd>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(SurdVector(components))
    }

    pub fn from_integers(v: &[i64]) -> Result<Self> {
        SurdVector::new(v.iter().map(|&n| QuadraticSurd::integer(n)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[QuadraticSurd] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(QuadraticSurd::to_f64).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(QuadraticSurd::is_zero)
    }

    /// Rows of the rational linear system whose nonzero integer solutions `k`
    /// are exactly the resonances `k·ξ = 0`.
    fn constraint_rows(&self) -> Vec<Vec<BigRational>> {
        let d = self.dim();
        let mut rational = vec![BigRational::zero(); d];
        let mut by_root: BTreeMap<i64, Vec<BigRational>> = BTreeMap::new();
        for (i, c) in self.0.iter().enumerate() {
            let (a, b, s) = c.normal_form();
            rational[i] = a;
            if !b.is_zero() {
                by_root.entry(s).or_insert_with(|| vec![BigRational::zero(); d])[i] = b;
            }
        }
        let mut rows = vec![rational];
        rows.extend(by_root.into_values());
        rows
    }

    /// Exact test of `k·ξ = 0`.
    pub fn is_orthogonal_to(&self, k: &LatticeVector) -> Result<bool> {
        crate::lattice::check_dim(self.dim(), k.dim())?;
        Ok(self.constraint_rows().iter().all(|row| {
            row.iter()
                .zip(k.components())
                .fold(BigRational::zero(), |acc, (c, &ki)| acc + c * BigInt::from(ki))
                .is_zero()
        }))
    }

    /// True iff some nonzero `k ∈ Z^d` has `k·ξ = 0`.
    pub fn is_resonant(&self) -> bool {
        rank(self.constraint_rows()) < self.dim()
    }

    /// Exact nonzero test, as required before averaging along `ξ`.
    pub fn require_nonzero(&self) -> Result<()> {
        if self.is_zero() {
            Err(Error::ZeroDirection)
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for SurdVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let lead = rows[rank][col].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = &rows[r][col] / &lead;
                for c in col..cols {
                    let delta = &factor * &rows[rank][c];
                    rows[r][c] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Partial quotients of the regular continued fraction of a quadratic surd.
///
/// Irrational surds are expanded with the `(P + √D)/Q` recurrence, which is
/// exact at any depth; rational values terminate.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    state: CfState,
}

#[derive(Clone, Debug)]
enum CfState {
    Rational { num: i128, den: i128 },
    Quadratic { p: i128, q: i128, d: i128 },
    Done,
}

impl ContinuedFraction {
    pub fn new(x: &QuadraticSurd) -> Result<Self> {
        let (alpha, beta, s) = x.normal_form();
        if beta.is_zero() {
            let num = alpha.numer().to_i128().ok_or_else(|| overflow("numerator"))?;
            let den = alpha.denom().to_i128().ok_or_else(|| overflow("denominator"))?;
            return Ok(ContinuedFraction {
                state: CfState::Rational { num, den },
            });
        }
        // α + β√s = (a/b) + (c/e)√s = (a e + c b √s)/(b e)
        let a = alpha.numer().to_i128().ok_or_else(|| overflow("surd"))?;
        let b = alpha.denom().to_i128().ok_or_else(|| overflow("surd"))?;
        let c = beta.numer().to_i128().ok_or_else(|| overflow("surd"))?;
        let e = beta.denom().to_i128().ok_or_else(|| overflow("surd"))?;
        let p0 = mul(a, e)?;
        let coeff = mul(c, b)?;
        let r0 = mul(b, e)?;
        // (p0 + coeff√s)/r0 = (p0 r0 + sign·√(coeff² r0² s)) / r0²
        let d = mul(mul(mul(coeff, coeff)?, mul(r0, r0)?)?, s as i128)?;
        let r2 = mul(r0, r0)?;
        let pr = mul(p0, r0)?;
        let (p, q) = if coeff * r0.signum() > 0 { (pr, r2) } else { (-pr, -r2) };
        Ok(ContinuedFraction {
            state: CfState::Quadratic { p, q, d },
        })
    }

    fn floor_quadratic(p: i128, q: i128, d: i128) -> Result<i128> {
        let estimate = ((p as f64 + (d as f64).sqrt()) / q as f64).floor() as i128;
        // x >= n  <=>  (p + √d)/q >= n
        let at_least = |n: i128| -> Result<bool> {
            let t = mul(n, q)?.checked_sub(p).ok_or_else(|| overflow("floor"))?;
            if q > 0 {
                Ok(t <= 0 || d >= mul(t, t)?)
            } else {
                Ok(t >= 0 && d <= mul(t, t)?)
            }
        };
        let mut n = estimate;
        while !at_least(n)? {
            n -= 1;
        }
        while at_least(n + 1)? {
            n += 1;
        }
        Ok(n)
    }
}

impl Iterator for ContinuedFraction {
    type Item = Result<i128>;

    fn next(&mut self) -> Option<Result<i128>> {
        match self.state.clone() {
            CfState::Done => None,
            CfState::Rational { num, den } => {
                let a = num.div_euclid(den);
                let rem = num.rem_euclid(den);
                self.state = if rem == 0 {
                    CfState::Done
                } else {
                    CfState::Rational { num: den, den: rem }
                };
                Some(Ok(a))
            }
            CfState::Quadratic { p, q, d } => {
                let step = || -> Result<(i128, CfState)> {
                    let a = Self::floor_quadratic(p, q, d)?;
                    let p_next = mul(a, q)? - p;
                    let q_next = (d - mul(p_next, p_next)?) / q;
                    Ok((a, CfState::Quadratic { p: p_next, q: q_next, d }))
                };
                match step() {
                    Ok((a, next)) => {
                        self.state = next;
                        Some(Ok(a))
                    }
                    Err(e) => {
                        self.state = CfState::Done;
                        Some(Err(e))
                    }
                }
            }
        }
    }
}

/// Convergents `p_n/q_n`, `n = 1, 2, ...` (the first is `⌊x⌋/1`). Once a
/// rational expansion terminates the final convergent repeats.
pub fn convergents(x: &QuadraticSurd, count: usize) -> Result<Vec<Ratio<i128>>> {
    let mut out = Vec::with_capacity(count);
    let (mut h1, mut h2) = (1i128, 0i128);
    let (mut k1, mut k2) = (0i128, 1i128);
    let mut cf = ContinuedFraction::new(x)?;
    while out.len() < count {
        match cf.next() {
            Some(a) => {
                let a = a?;
                let h = mul(a, h1)?.checked_add(h2).ok_or_else(|| overflow("convergent"))?;
                let k = mul(a, k1)?.checked_add(k2).ok_or_else(|| overflow("convergent"))?;
                (h2, h1, k2, k1) = (h1, h, k1, k);
                out.push(Ratio::new_raw(h, k));
            }
            None => {
                let last = *out.last().expect("a continued fraction has at least one term");
                out.push(last);
            }
        }
    }
    Ok(out)
}

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or_else(|| overflow("i128 product"))
}

fn overflow(what: &str) -> Error {
    Error::Overflow(format!("{what} exceeds 128-bit range"))
}

pub(crate) fn lcm(a: i128, b: i128) -> Result<i128> {
    let g = num_integer::gcd(a, b);
    mul(a / g, b).map(i128::abs)
}
