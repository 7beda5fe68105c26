//! Sparse multivariate truncated power series over arbitrary-precision
//! signed integers.
//!
//! A [`MultiSeries`] stores only the nonzero coefficients of monomials that
//! lie inside its [`Profile`] window (one optional exponent cap per
//! variable). Everything outside the window is unknown, not zero; reading a
//! coefficient beyond the window is an error.
//!
//! Invariants:
//! - no stored zero coefficients,
//! - every stored monomial is inside the window,
//! - two series are equal iff their profiles and term maps agree.

mod json;
mod subst;

pub use subst::SubstExt;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// The fixed, ordered variable alphabet. The declaration order
/// (`t < v < w < x < y < z < r < s`) is the canonical order used for
/// monomial comparison and serialization.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    T,
    V,
    W,
    X,
    Y,
    Z,
    R,
    S,
}

pub const VAR_COUNT: usize = 8;

impl Var {
    pub const ALL: [Var; VAR_COUNT] = [
        Var::T,
        Var::V,
        Var::W,
        Var::X,
        Var::Y,
        Var::Z,
        Var::R,
        Var::S,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> char {
        match self {
            Var::T => 't',
            Var::V => 'v',
            Var::W => 'w',
            Var::X => 'x',
            Var::Y => 'y',
            Var::Z => 'z',
            Var::R => 'r',
            Var::S => 's',
        }
    }

    pub fn from_symbol(c: char) -> Option<Var> {
        Var::ALL.iter().copied().find(|v| v.symbol() == c)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Errors from series construction and arithmetic.
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum SeriesError {
    /// Binary operation between series with different truncation profiles.
    #[error("incompatible truncation")]
    IncompatibleTruncation,
    /// Coefficient requested for a monomial outside the window; it is
    /// unknowable, not zero.
    #[error("coefficient beyond truncation")]
    CoeffBeyondTruncation,
    /// An operation needs a finite window in the named variable.
    #[error("variable {0} must be capped")]
    UncappedVariable(char),
    /// Reciprocal of a series whose constant term is not +1 or -1, or whose
    /// non-constant part has a monomial free of every capped variable (the
    /// geometric expansion would not terminate).
    #[error("series is not invertible under this truncation")]
    NotInvertible,
    /// Malformed profile description such as a bad `--profile` string.
    #[error("invalid truncation profile: {0}")]
    InvalidProfile(String),
}

/// A monomial over the fixed alphabet, stored as one exponent per variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    exps: [u32; VAR_COUNT],
}

impl Monomial {
    /// The empty monomial (all exponents zero).
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn var(v: Var) -> Monomial {
        Monomial::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u32) -> Monomial {
        let mut m = Monomial::default();
        m.exps[v.index()] = e;
        m
    }

    pub fn from_pairs(pairs: &[(Var, u32)]) -> Monomial {
        let mut m = Monomial::default();
        for &(v, e) in pairs {
            m.exps[v.index()] += e;
        }
        m
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.exps[v.index()]
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    /// Sum of the exponents of the given variables.
    pub fn degree_in(&self, vars: &[Var]) -> u32 {
        vars.iter().map(|v| self.exp(*v)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Exponentwise product of two monomials.
    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for i in 0..VAR_COUNT {
            m.exps[i] += other.exps[i];
        }
        m
    }

    /// Variables with positive exponent, in alphabet order.
    pub fn vars(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        Var::ALL
            .iter()
            .copied()
            .filter_map(|v| (self.exp(v) > 0).then(|| (v, self.exp(v))))
    }
}

impl Ord for Monomial {
    /// Graded-lexicographic: total degree first, then exponents in alphabet
    /// order. Gives the deterministic serialization order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, e) in self.vars() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Per-variable exponent caps. An absent cap means the variable is
/// unbounded. A monomial is "in window" iff every exponent is at most its
/// cap.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Profile {
    caps: [Option<u32>; VAR_COUNT],
}

impl Profile {
    /// Profile with every variable unbounded.
    pub fn unbounded() -> Profile {
        Profile::default()
    }

    pub fn with_cap(mut self, v: Var, cap: u32) -> Profile {
        self.caps[v.index()] = Some(cap);
        self
    }

    /// Convenience: cap several variables at the same bound.
    pub fn with_caps(mut self, vars: &[Var], cap: u32) -> Profile {
        for v in vars {
            self.caps[v.index()] = Some(cap);
        }
        self
    }

    pub fn cap(&self, v: Var) -> Option<u32> {
        self.caps[v.index()]
    }

    pub fn capped_vars(&self) -> impl Iterator<Item = Var> + '_ {
        Var::ALL
            .iter()
            .copied()
            .filter(|v| self.caps[v.index()].is_some())
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        Var::ALL
            .iter()
            .all(|v| self.caps[v.index()].map_or(true, |c| m.exp(*v) <= c))
    }

    /// Parses `"t=8,x=12"` style descriptions.
    pub fn parse(text: &str) -> Result<Profile, SeriesError> {
        let mut profile = Profile::unbounded();
        for item in text.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (name, cap) = item
                .split_once('=')
                .ok_or_else(|| SeriesError::InvalidProfile(format!("missing '=' in {item:?}")))?;
            let name = name.trim();
            let var = match name.chars().next() {
                Some(c) if name.len() == 1 => Var::from_symbol(c),
                _ => None,
            }
            .ok_or_else(|| SeriesError::InvalidProfile(format!("unknown variable {name:?}")))?;
            let cap: u32 = cap
                .trim()
                .parse()
                .map_err(|_| SeriesError::InvalidProfile(format!("bad cap in {item:?}")))?;
            profile = profile.with_cap(var, cap);
        }
        Ok(profile)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in Var::ALL {
            if let Some(c) = self.cap(v) {
                if !first {
                    write!(f, ",")?;
                }
                first = false;
                write!(f, "{v}={c}")?;
            }
        }
        if first {
            write!(f, "unbounded")?;
        }
        Ok(())
    }
}

/// Sparse truncated power series with exact integer coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiSeries {
    terms: BTreeMap<Monomial, BigInt>,
    profile: Profile,
}

impl MultiSeries {
    pub fn zero(profile: Profile) -> MultiSeries {
        MultiSeries {
            terms: BTreeMap::new(),
            profile,
        }
    }

    pub fn one(profile: Profile) -> MultiSeries {
        MultiSeries::constant(BigInt::one(), profile)
    }

    pub fn constant<C: Into<BigInt>>(c: C, profile: Profile) -> MultiSeries {
        let mut s = MultiSeries::zero(profile);
        s.add_term(Monomial::one(), c.into());
        s
    }

    /// The series consisting of the single variable `v` (dropped when the
    /// window excludes it).
    pub fn variable(v: Var, profile: Profile) -> MultiSeries {
        MultiSeries::monomial(Monomial::var(v), 1, profile)
    }

    pub fn monomial<C: Into<BigInt>>(m: Monomial, c: C, profile: Profile) -> MultiSeries {
        let mut s = MultiSeries::zero(profile);
        s.add_term(m, c.into());
        s
    }

    pub fn from_terms<I, C>(profile: Profile, terms: I) -> MultiSeries
    where
        I: IntoIterator<Item = (Monomial, C)>,
        C: Into<BigInt>,
    {
        let mut s = MultiSeries::zero(profile);
        for (m, c) in terms {
            s.add_term(m, c.into());
        }
        s
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Nonzero terms in canonical (graded-lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// Adds `c` to the coefficient of `m`, dropping the entry on cancellation
    /// and ignoring monomials outside the window.
    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() || !self.profile.contains(&m) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Exact coefficient of an in-window monomial (zero when absent).
    /// Out-of-window monomials are unknowable and yield an error.
    pub fn coeff(&self, m: &Monomial) -> Result<BigInt, SeriesError> {
        if !self.profile.contains(m) {
            return Err(SeriesError::CoeffBeyondTruncation);
        }
        Ok(self.terms.get(m).cloned().unwrap_or_else(BigInt::zero))
    }

    /// Coefficient of `var^k` as a series in the remaining variables: the sum
    /// of all terms with exponent exactly `k` in `var`, with that exponent
    /// removed. Errors when `k` exceeds the cap on `var`.
    pub fn coeff_var(&self, var: Var, k: u32) -> Result<MultiSeries, SeriesError> {
        if let Some(c) = self.profile.cap(var) {
            if k > c {
                return Err(SeriesError::CoeffBeyondTruncation);
            }
        }
        let mut out = MultiSeries::zero(self.profile);
        for (m, c) in &self.terms {
            if m.exp(var) == k {
                let mut stripped = *m;
                stripped.exps[var.index()] = 0;
                out.add_term(stripped, c.clone());
            }
        }
        Ok(out)
    }

    /// Constant term (always inside any window).
    pub fn constant_term(&self) -> BigInt {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    /// Largest exponent of `var` among the stored terms.
    pub fn degree_in(&self, var: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(var)).max().unwrap_or(0)
    }

    pub fn try_add(&self, other: &MultiSeries) -> Result<MultiSeries, SeriesError> {
        if self.profile != other.profile {
            return Err(SeriesError::IncompatibleTruncation);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiSeries) -> Result<MultiSeries, SeriesError> {
        if self.profile != other.profile {
            return Err(SeriesError::IncompatibleTruncation);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c.clone());
        }
        Ok(out)
    }

    /// Convolution product; product monomials outside the window are
    /// discarded.
    pub fn try_mul(&self, other: &MultiSeries) -> Result<MultiSeries, SeriesError> {
        if self.profile != other.profile {
            return Err(SeriesError::IncompatibleTruncation);
        }
        let mut out = MultiSeries::zero(self.profile);
        // Iterate the smaller operand outside.
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (ma, ca) in &small.terms {
            for (mb, cb) in &large.terms {
                let m = ma.times(mb);
                if out.profile.contains(&m) {
                    out.add_term(m, ca * cb);
                }
            }
        }
        Ok(out)
    }

    pub fn negated(&self) -> MultiSeries {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        out
    }

    pub fn scale<C: Into<BigInt>>(&self, c: C) -> MultiSeries {
        let c = c.into();
        if c.is_zero() {
            return MultiSeries::zero(self.profile);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= &c;
        }
        out
    }

    /// Multiplies by a single monomial, truncating to the window.
    pub fn mul_monomial(&self, m: &Monomial) -> MultiSeries {
        let mut out = MultiSeries::zero(self.profile);
        for (k, c) in &self.terms {
            out.add_term(k.times(m), c.clone());
        }
        out
    }

    /// `self + c` for an integer constant.
    pub fn plus_constant<C: Into<BigInt>>(&self, c: C) -> MultiSeries {
        let mut out = self.clone();
        out.add_term(Monomial::one(), c.into());
        out
    }

    pub fn pow(&self, e: u32) -> MultiSeries {
        let mut acc = MultiSeries::one(self.profile);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Drops every term with a positive exponent in `var` (substitutes 0).
    pub fn set_var_zero(&self, var: Var) -> MultiSeries {
        let mut out = MultiSeries::zero(self.profile);
        for (m, c) in &self.terms {
            if m.exp(var) == 0 {
                out.add_term(*m, c.clone());
            }
        }
        out
    }

    /// Substitutes 1 for `var` by summing away its exponents.
    ///
    /// Only meaningful when the underlying series is a polynomial in `var`
    /// whose true degree does not exceed the cap; otherwise the truncated
    /// window silently under-counts.
    pub fn eval_at_one(&self, var: Var) -> MultiSeries {
        let mut out = MultiSeries::zero(self.profile);
        for (m, c) in &self.terms {
            let mut stripped = *m;
            stripped.exps[var.index()] = 0;
            out.add_term(stripped, c.clone());
        }
        out
    }

    /// Reciprocal `1/self`, defined when the constant term is +1 or -1 and
    /// every non-constant monomial contains at least one capped variable.
    /// Realized as the geometric sum over powers of the non-constant part,
    /// which leave the window after finitely many steps.
    pub fn recip(&self) -> Result<MultiSeries, SeriesError> {
        let c0 = self.constant_term();
        let sign = if c0 == BigInt::one() {
            1
        } else if c0 == -BigInt::one() {
            -1
        } else {
            return Err(SeriesError::NotInvertible);
        };
        // g = self - c0, so self = c0 * (1 + c0*g)  (c0 is its own inverse).
        let mut g = self.clone();
        g.add_term(Monomial::one(), -c0);
        if sign < 0 {
            g = g.negated();
        }

        let capped: Vec<Var> = self.profile.capped_vars().collect();
        // Iteration bound: prefer the smallest positive per-variable valuation
        // of g among capped variables; fall back to the sum of caps when every
        // monomial merely has positive total degree over the capped set.
        let mut bound: Option<u32> = None;
        for &v in &capped {
            let cap = self.profile.cap(v).unwrap();
            let val = g.terms.keys().map(|m| m.exp(v)).min().unwrap_or(0);
            if val > 0 {
                let b = cap / val;
                bound = Some(bound.map_or(b, |old| old.min(b)));
            }
        }
        if bound.is_none() {
            if g.terms.keys().all(|m| m.degree_in(&capped) > 0) {
                bound = Some(
                    capped
                        .iter()
                        .map(|v| self.profile.cap(*v).unwrap())
                        .sum::<u32>(),
                );
            } else if g.is_zero() {
                bound = Some(0);
            } else {
                return Err(SeriesError::NotInvertible);
            }
        }
        let bound = bound.unwrap();

        // 1/(1+g) = sum_{j>=0} (-g)^j, truncated.
        let neg_g = g.negated();
        let mut acc = MultiSeries::one(self.profile);
        let mut power = MultiSeries::one(self.profile);
        for _ in 0..bound {
            power = &power * &neg_g;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        if sign < 0 {
            acc = acc.negated();
        }
        Ok(acc)
    }

    /// `self / den` via `den.recip()`.
    pub fn div(&self, den: &MultiSeries) -> Result<MultiSeries, SeriesError> {
        Ok(self * &den.recip()?)
    }

    /// Structural audit: no zero coefficients, no out-of-window monomials.
    pub fn audit(&self) -> bool {
        self.terms
            .iter()
            .all(|(m, c)| !c.is_zero() && self.profile.contains(m))
    }

    /// Rendering of the series as a sum of signed terms in canonical order,
    /// mainly for diagnostics and test failure messages.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (m, c) in &self.terms {
            if out.is_empty() {
                if c.is_negative() {
                    out.push_str("-");
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mag = c.magnitude();
            if m.is_one() {
                out.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    out.push_str(&mag.to_string());
                    out.push('*');
                }
                out.push_str(&m.to_string());
            }
        }
        out
    }
}

impl fmt::Display for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// The building-block polynomial `(a+1)(b+1)^n - 1` used by every closed
/// form. `a` and `b` may be any series over the same profile.
pub fn v_poly(n: u32, a: &MultiSeries, b: &MultiSeries) -> Result<MultiSeries, SeriesError> {
    if a.profile() != b.profile() {
        return Err(SeriesError::IncompatibleTruncation);
    }
    let b1 = b.plus_constant(1).pow(n);
    Ok(a.plus_constant(1).try_mul(&b1)?.plus_constant(-1))
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<&MultiSeries> for &MultiSeries {
            type Output = MultiSeries;
            fn $method(self, rhs: &MultiSeries) -> MultiSeries {
                self.$imp(rhs).expect("incompatible truncation")
            }
        }
        impl $trait<MultiSeries> for MultiSeries {
            type Output = MultiSeries;
            fn $method(self, rhs: MultiSeries) -> MultiSeries {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&MultiSeries> for MultiSeries {
            type Output = MultiSeries;
            fn $method(self, rhs: &MultiSeries) -> MultiSeries {
                (&self).$method(rhs)
            }
        }
        impl $trait<MultiSeries> for &MultiSeries {
            type Output = MultiSeries;
            fn $method(self, rhs: MultiSeries) -> MultiSeries {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &MultiSeries {
    type Output = MultiSeries;
    fn neg(self) -> MultiSeries {
        self.negated()
    }
}

impl Neg for MultiSeries {
    type Output = MultiSeries;
    fn neg(self) -> MultiSeries {
        self.negated()
    }
}
