//! Truncated sparse power series in up to three formal variables.
//!
//! A `TruncSeries` stores the coefficients of every monomial of total degree
//! strictly below `order`; everything at or above `order` is unknown. Binary
//! operations propagate the smaller of the two orders.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::exactnum::{write_scaled, Coeff, Rational};
use crate::text::{self, ExprAlgebra, Leaf, ParseError};

pub const MAX_VARIABLES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("variable lists differ: {0:?} vs {1:?}")]
    VariableMismatch(Vec<String>, Vec<String>),
    #[error("a series needs between 1 and {MAX_VARIABLES} distinct variables, got {0:?}")]
    BadVariables(Vec<String>),
    #[error("truncation order must be positive")]
    ZeroOrder,
    #[error("inner series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("operation requires a univariate series, got variables {0:?}")]
    NotUnivariate(Vec<String>),
    #[error("linear coefficient `{0}` is not invertible")]
    NonInvertibleLinearTerm(String),
    #[error("constant term `{0}` is not a unit")]
    NonUnitConstantTerm(String),
    #[error("substitution expects {expected} inner series, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Exponent vector of a monomial in at most three variables. Unused slots are
/// zero. Ordered by total degree, then lexicographically descending, which is
/// the printing order (`u^2` before `u*v` before `v^2`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Debug)]
pub struct Exponent(pub [u16; MAX_VARIABLES]);

impl Exponent {
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn single(var: usize, power: u16) -> Self {
        let mut e = [0; MAX_VARIABLES];
        e[var] = power;
        Exponent(e)
    }

    pub fn is_constant(&self) -> bool {
        self.0 == [0; MAX_VARIABLES]
    }

    fn add(&self, other: &Exponent) -> Exponent {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a += b;
        }
        Exponent(e)
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncSeries<C> {
    vars: Vec<String>,
    order: u32,
    terms: BTreeMap<Exponent, C>,
}

fn check_vars(vars: &[String]) -> Result<(), SeriesError> {
    let distinct = vars.iter().enumerate().all(|(i, v)| !vars[..i].contains(v));
    let named = vars.iter().all(|v| {
        let mut cs = v.chars();
        matches!(cs.next(), Some(c) if c.is_ascii_alphabetic())
            && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !(v.starts_with('p') && v.len() > 1 && v[1..].bytes().all(|b| b.is_ascii_digit()))
    });
    if vars.is_empty() || vars.len() > MAX_VARIABLES || !distinct || !named {
        return Err(SeriesError::BadVariables(vars.to_vec()));
    }
    Ok(())
}

pub fn var_names(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl<C: Coeff> TruncSeries<C> {
    pub fn zero(vars: &[String], order: u32) -> Result<Self, SeriesError> {
        check_vars(vars)?;
        if order == 0 {
            return Err(SeriesError::ZeroOrder);
        }
        Ok(TruncSeries {
            vars: vars.to_vec(),
            order,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(vars: &[String], order: u32, c: C) -> Result<Self, SeriesError> {
        let mut s = Self::zero(vars, order)?;
        s.insert(Exponent::default(), c);
        Ok(s)
    }

    pub fn one(vars: &[String], order: u32) -> Result<Self, SeriesError> {
        Self::constant(vars, order, C::one())
    }

    /// The series consisting of the single variable `vars[index]`.
    pub fn variable(vars: &[String], index: usize, order: u32) -> Result<Self, SeriesError> {
        let mut s = Self::zero(vars, order)?;
        if index >= vars.len() {
            return Err(SeriesError::BadVariables(vars.to_vec()));
        }
        s.insert(Exponent::single(index, 1), C::one());
        Ok(s)
    }

    /// Univariate series `sum c_k x^k` from a dense coefficient list.
    pub fn from_dense(var: &str, order: u32, coeffs: Vec<C>) -> Result<Self, SeriesError> {
        let mut s = Self::zero(&[var.to_string()], order)?;
        for (k, c) in coeffs.into_iter().enumerate() {
            s.insert(Exponent::single(0, k as u16), c);
        }
        Ok(s)
    }

    pub fn from_terms(
        vars: &[String],
        order: u32,
        terms: impl IntoIterator<Item = (Exponent, C)>,
    ) -> Result<Self, SeriesError> {
        let mut s = Self::zero(vars, order)?;
        for (e, c) in terms {
            let c = s.coeff(&e).plus(&c);
            s.insert(e, c);
        }
        Ok(s)
    }

    /// Stores `c` at `e`, dropping it if zero, out of range or above the order.
    fn insert(&mut self, e: Exponent, c: C) {
        let in_range = e.0[self.vars.len()..].iter().all(|&x| x == 0);
        if c.is_zero() || e.degree() >= self.order || !in_range {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, c);
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_univariate(&self) -> bool {
        self.vars.len() == 1
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &Exponent) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient of `x^k` in a univariate series.
    pub fn coeff_at(&self, k: u16) -> C {
        self.coeff(&Exponent::single(0, k))
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Exponent::default())
    }

    fn same_vars(&self, other: &Self) -> Result<(), SeriesError> {
        if self.vars != other.vars {
            return Err(SeriesError::VariableMismatch(self.vars.clone(), other.vars.clone()));
        }
        Ok(())
    }

    fn require_univariate(&self) -> Result<(), SeriesError> {
        if !self.is_univariate() {
            return Err(SeriesError::NotUnivariate(self.vars.clone()));
        }
        Ok(())
    }

    /// Drops every term of total degree `>= order` (no-op if already lower).
    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order).max(1);
        TruncSeries {
            vars: self.vars.clone(),
            order,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() < order)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    /// Same coefficients with a larger nominal order. Only valid when the
    /// series is known to be exact (a polynomial) up to the new order.
    pub fn with_exact_order(&self, order: u32) -> Self {
        let mut s = self.clone();
        s.order = order.max(1);
        s.terms.retain(|e, _| e.degree() < s.order);
        s
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_vars(other)?;
        let mut out = self.truncate(other.order);
        for (e, c) in &other.terms {
            if e.degree() < out.order {
                let sum = out.coeff(e).plus(c);
                out.insert(*e, sum);
            }
        }
        Ok(out)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.negated())
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = TruncSeries {
            vars: self.vars.clone(),
            order: self.order,
            terms: BTreeMap::new(),
        };
        for (e, x) in &self.terms {
            out.insert(*e, x.times(c));
        }
        out
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        let mut out = TruncSeries {
            vars: self.vars.clone(),
            order: self.order,
            terms: BTreeMap::new(),
        };
        for (e, x) in &self.terms {
            out.insert(*e, x.scale(q));
        }
        out
    }

    /// Truncated Cauchy product.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_vars(other)?;
        let order = self.order.min(other.order);
        let mut acc: BTreeMap<Exponent, C> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            let da = ea.degree();
            if da >= order {
                break;
            }
            for (eb, cb) in &other.terms {
                if da + eb.degree() >= order {
                    break;
                }
                let e = ea.add(eb);
                let p = ca.times(cb);
                match acc.get_mut(&e) {
                    Some(x) => *x = x.plus(&p),
                    None => {
                        acc.insert(e, p);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(TruncSeries {
            vars: self.vars.clone(),
            order,
            terms: acc,
        })
    }

    pub fn pow(&self, k: u32) -> Result<Self, SeriesError> {
        let mut acc = Self::one(&self.vars, self.order)?;
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn map_coeffs<D: Coeff>(&self, mut f: impl FnMut(&C) -> D) -> TruncSeries<D> {
        let mut out = TruncSeries {
            vars: self.vars.clone(),
            order: self.order,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            out.insert(*e, f(c));
        }
        out
    }

    pub fn try_map_coeffs<D: Coeff, E>(&self, mut f: impl FnMut(&C) -> Result<D, E>) -> Result<TruncSeries<D>, E> {
        let mut out = TruncSeries {
            vars: self.vars.clone(),
            order: self.order,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            out.insert(*e, f(c)?);
        }
        Ok(out)
    }

    /// Substitutes `inners[i]` for the i-th variable of `self`. All inner
    /// series must share a variable list and have zero constant term; the
    /// result lives in that shared variable list.
    pub fn substitute(&self, inners: &[&TruncSeries<C>]) -> Result<TruncSeries<C>, SeriesError> {
        if inners.len() != self.vars.len() {
            return Err(SeriesError::ArityMismatch {
                expected: self.vars.len(),
                got: inners.len(),
            });
        }
        let first = inners[0];
        for s in inners {
            first.same_vars(s)?;
            if !s.constant_term().is_zero() {
                return Err(SeriesError::NonzeroConstantTerm);
            }
        }
        let order = inners.iter().map(|s| s.order).fold(self.order, u32::min);
        let target = first.vars.clone();

        // powers[i][k] = inners[i]^k truncated at `order`
        let mut powers: Vec<Vec<TruncSeries<C>>> = Vec::with_capacity(inners.len());
        for (i, s) in inners.iter().enumerate() {
            let max_k = self.terms.keys().map(|e| e.0[i]).max().unwrap_or(0);
            let s = s.truncate(order);
            let mut ps = vec![TruncSeries::one(&target, order)?];
            for k in 1..=max_k {
                let next = if u32::from(k) >= order {
                    TruncSeries::zero(&target, order)?
                } else {
                    ps[k as usize - 1].mul(&s)?
                };
                ps.push(next);
            }
            powers.push(ps);
        }

        let mut out = TruncSeries::zero(&target, order)?;
        for (e, c) in &self.terms {
            if e.degree() >= order {
                continue;
            }
            let mut term = TruncSeries::constant(&target, order, c.clone())?;
            for (i, ps) in powers.iter().enumerate() {
                let k = e.0[i] as usize;
                if k > 0 {
                    term = term.mul(&ps[k])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// `outer(inner)` for a univariate `outer`.
    pub fn compose(&self, inner: &TruncSeries<C>) -> Result<TruncSeries<C>, SeriesError> {
        self.require_univariate()?;
        self.substitute(&[inner])
    }

    /// Compositional inverse of a univariate series with zero constant term
    /// and invertible linear coefficient, solved one degree at a time.
    pub fn revert(&self) -> Result<TruncSeries<C>, SeriesError> {
        self.require_univariate()?;
        if !self.constant_term().is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let order = self.order;
        let linear = self.coeff_at(1);
        if order <= 1 {
            return Ok(self.clone());
        }
        let linear_inv = linear
            .try_inverse()
            .ok_or_else(|| SeriesError::NonInvertibleLinearTerm(linear.to_string()))?;
        let mut g = TruncSeries::zero(&self.vars, order)?;
        g.insert(Exponent::single(0, 1), linear_inv.clone());
        for n in 2..order {
            // g is correct mod x^n; fix the x^n coefficient of self(g).
            let partial = self.truncate(n + 1).compose(&g.truncate(n + 1))?;
            let defect = partial.coeff_at(n as u16);
            if !defect.is_zero() {
                let e = Exponent::single(0, n as u16);
                let updated = g.coeff(&e).minus(&defect.times(&linear_inv));
                g.insert(e, updated);
            }
        }
        Ok(g)
    }

    /// Multiplicative inverse; the constant term must be a unit.
    pub fn inverse(&self) -> Result<TruncSeries<C>, SeriesError> {
        let c0 = self.constant_term();
        let c0_inv = c0
            .try_inverse()
            .ok_or_else(|| SeriesError::NonUnitConstantTerm(c0.to_string()))?;
        // self = c0 (1 + t) with t(0) = 0, so 1/self = c0^{-1} sum (-t)^k.
        let one = TruncSeries::one(&self.vars, self.order)?;
        let minus_t = one.sub(&self.scale(&c0_inv))?;
        let mut acc = one.clone();
        let mut power = one;
        for _ in 1..self.order {
            power = power.mul(&minus_t)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        Ok(acc.scale(&c0_inv))
    }

    /// Divides a univariate series by `x^k`; requires the low terms to vanish.
    pub fn shift_down(&self, k: u16) -> Result<TruncSeries<C>, SeriesError> {
        self.require_univariate()?;
        if self.terms.keys().any(|e| e.0[0] < k) {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let order = self.order.saturating_sub(u32::from(k)).max(1);
        let mut out = TruncSeries::zero(&self.vars, order)?;
        for (e, c) in &self.terms {
            out.insert(Exponent::single(0, e.0[0] - k), c.clone());
        }
        Ok(out)
    }

    /// Multiplies a univariate series by `x^k`, raising the order by `k`.
    pub fn shift_up(&self, k: u16) -> Result<TruncSeries<C>, SeriesError> {
        self.require_univariate()?;
        let mut out = TruncSeries::zero(&self.vars, self.order + u32::from(k))?;
        for (e, c) in &self.terms {
            out.insert(Exponent::single(0, e.0[0] + k), c.clone());
        }
        Ok(out)
    }

    /// Re-expresses the series in `vars`, sending variable `i` to
    /// `vars[mapping[i]]`.
    pub fn embed(&self, vars: &[String], mapping: &[usize]) -> Result<TruncSeries<C>, SeriesError> {
        check_vars(vars)?;
        if mapping.len() != self.vars.len() || mapping.iter().any(|&m| m >= vars.len()) {
            return Err(SeriesError::ArityMismatch {
                expected: self.vars.len(),
                got: mapping.len(),
            });
        }
        let mut out = TruncSeries::<C>::zero(vars, self.order)?;
        for (e, c) in &self.terms {
            let mut ne = [0u16; MAX_VARIABLES];
            for (i, &m) in mapping.iter().enumerate() {
                ne[m] += e.0[i];
            }
            let sum = out.coeff(&Exponent(ne)).plus(c);
            out.insert(Exponent(ne), sum);
        }
        Ok(out)
    }

    /// Parses the printed grammar back into a series over `vars` at `order`.
    pub fn parse(input: &str, vars: &[String], order: u32) -> Result<Self, SeriesError> {
        Self::zero(vars, order)?;
        let expr = text::parse_expr(input)?;
        let leaf = |l: Leaf<'_>| -> Result<TruncSeries<C>, ParseError> {
            let built = match l {
                Leaf::Number(q) => TruncSeries::constant(vars, order, C::from_rational(q.clone())),
                Leaf::Generator(i) => {
                    let c = C::generator(i).ok_or_else(|| ParseError::GeneratorNotAllowed(format!("p{i}")))?;
                    TruncSeries::constant(vars, order, c)
                }
                Leaf::Variable(name) => {
                    let index = vars
                        .iter()
                        .position(|v| v == name)
                        .ok_or_else(|| ParseError::UnknownVariable(name.to_string()))?;
                    TruncSeries::variable(vars, index, order)
                }
            };
            Ok(built.expect("variable list validated above"))
        };
        Ok(text::evaluate(&expr, &leaf)?)
    }
}

impl<C: Coeff> ExprAlgebra for TruncSeries<C> {
    fn add(&self, other: &Self) -> Self {
        TruncSeries::add(self, other).expect("parsed terms share variables")
    }
    fn mul(&self, other: &Self) -> Self {
        TruncSeries::mul(self, other).expect("parsed terms share variables")
    }
    fn neg(&self) -> Self {
        TruncSeries::neg(self)
    }
}

impl<C: Coeff> fmt::Display for TruncSeries<C> {
    /// Terms in graded-lexicographic order, e.g. `u + (-1/2)*p1*u^2`; the
    /// zero series prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces = Vec::new();
        for (e, c) in &self.terms {
            let mut var_part = Vec::new();
            for (i, &k) in e.0.iter().enumerate().take(self.vars.len()) {
                match k {
                    0 => {}
                    1 => var_part.push(self.vars[i].clone()),
                    _ => var_part.push(format!("{}^{}", self.vars[i], k)),
                }
            }
            let var_part = var_part.join("*");
            for (q, mono) in c.text_terms() {
                let full = match (mono.is_empty(), var_part.is_empty()) {
                    (true, _) => var_part.clone(),
                    (false, true) => mono,
                    (false, false) => format!("{mono}*{var_part}"),
                };
                let mut piece = String::new();
                write_scaled(&mut piece, &q, &full);
                pieces.push(piece);
            }
        }
        if pieces.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", pieces.join(" + "))
        }
    }
}
