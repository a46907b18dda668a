//! Intersection rings of products of projective spaces,
//! `Q[H1, ..., Hk] / (H_i^{r_i + 1})`, and the Chern-number calculus on them.
//!
//! Integration is normalized by `∫ H1^{r1} ... Hk^{rk} = 1`. Hypersurfaces
//! and complete intersections are handled virtually: a zero locus `Z` of
//! sections of `L1, ..., Lp` is represented by its fundamental class
//! `c1(L1) ... c1(Lp)` and the pulled-back total Chern class
//! `c(T_X) / prod (1 + c1(Lj))`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::{write_scaled, Coeff, Rational};
use crate::series::TruncSeries;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChernError {
    #[error("invalid variety `{0}` (expected a form like P2xP1)")]
    BadVariety(String),
    #[error("invalid line bundle `{0}` (expected a form like O(2,1,0))")]
    BadBundle(String),
    #[error("line bundle has {got} degrees but the variety has {expected} factors")]
    BundleLength { expected: usize, got: usize },
    #[error("invalid partition `{0}`")]
    BadPartition(String),
    #[error("series truncated at order {order} cannot be evaluated on a variety of dimension {dim}")]
    InsufficientOrder { order: u32, dim: u32 },
    #[error("series must be univariate with invertible constant term")]
    BadSeries,
    #[error("cannot cut {cuts} hypersurfaces from a variety of dimension {dim}")]
    DimensionUnderflow { cuts: usize, dim: u32 },
    #[error("classes live on different varieties")]
    BaseMismatch,
}

/// `P^{r1} x ... x P^{rk}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ProjProduct {
    factors: Vec<u32>,
}

impl ProjProduct {
    pub fn new(factors: Vec<u32>) -> Result<Self, ChernError> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(ChernError::BadVariety(format!("{factors:?}")));
        }
        Ok(ProjProduct { factors })
    }

    pub fn projective_space(r: u32) -> Result<Self, ChernError> {
        Self::new(vec![r])
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self) -> u32 {
        self.factors.iter().sum()
    }

    /// Every ordered factor list with the given total dimension
    /// (compositions of `d`), in lexicographically decreasing order.
    pub fn all_of_dimension(d: u32) -> Vec<ProjProduct> {
        fn go(rest: u32, prefix: &mut Vec<u32>, out: &mut Vec<ProjProduct>) {
            if rest == 0 {
                out.push(ProjProduct {
                    factors: prefix.clone(),
                });
                return;
            }
            for first in (1..=rest).rev() {
                prefix.push(first);
                go(rest - first, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if d > 0 {
            go(d, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl fmt::Display for ProjProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|r| format!("P{r}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for ProjProduct {
    type Err = ChernError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ChernError::BadVariety(s.to_string());
        let factors = s
            .split('x')
            .map(|part| {
                let digits = part.strip_prefix('P').ok_or_else(bad)?;
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                digits.parse::<u32>().map_err(|_| bad())
            })
            .collect::<Result<Vec<_>, _>>()?;
        ProjProduct::new(factors).map_err(|_| bad())
    }
}

/// `O(a1, ..., ak)` on a product of projective spaces.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LineBundleSpec {
    base: ProjProduct,
    multidegree: Vec<i64>,
}

impl LineBundleSpec {
    pub fn new(base: &ProjProduct, multidegree: Vec<i64>) -> Result<Self, ChernError> {
        if multidegree.len() != base.num_factors() {
            return Err(ChernError::BundleLength {
                expected: base.num_factors(),
                got: multidegree.len(),
            });
        }
        Ok(LineBundleSpec {
            base: base.clone(),
            multidegree,
        })
    }

    /// Parses `O(a1,...,ak)`; the base is only used for the length check.
    pub fn parse(base: &ProjProduct, s: &str) -> Result<Self, ChernError> {
        let bad = || ChernError::BadBundle(s.to_string());
        let inner = s.strip_prefix("O(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let degrees = inner
            .split(',')
            .map(|d| {
                let digits = d.strip_prefix('-').unwrap_or(d);
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                d.parse::<i64>().map_err(|_| bad())
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(base, degrees)
    }

    pub fn base(&self) -> &ProjProduct {
        &self.base
    }

    pub fn multidegree(&self) -> &[i64] {
        &self.multidegree
    }

    /// Every bundle on `base` whose degrees all lie in `lo..=hi`.
    pub fn all_in_range(base: &ProjProduct, lo: i64, hi: i64) -> Vec<LineBundleSpec> {
        let mut out = vec![Vec::new()];
        for _ in 0..base.num_factors() {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<i64>| {
                    (lo..=hi).map(move |a| {
                        let mut v = prefix.clone();
                        v.push(a);
                        v
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|m| LineBundleSpec {
                base: base.clone(),
                multidegree: m,
            })
            .collect()
    }
}

impl fmt::Display for LineBundleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.multidegree.iter().map(|a| a.to_string()).collect();
        write!(f, "O({})", parts.join(","))
    }
}

/// A weakly decreasing list of positive parts. Partitions of equal weight are
/// ordered reverse-lexicographically, so `(2)` comes before `(1,1)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self, ChernError> {
        if parts.contains(&0) {
            return Err(ChernError::BadPartition(format!("{parts:?}")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let largest = self.0.first().copied().unwrap_or(0);
        Partition(
            (1..=largest)
                .map(|k| self.0.iter().filter(|&&p| p >= k).count() as u32)
                .collect(),
        )
    }

    /// All partitions of `d` in the fixed order (`(d)` first, `(1,...,1)` last).
    pub fn all(d: u32) -> Vec<Partition> {
        fn go(rest: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(prefix.clone()));
                return;
            }
            for first in (1..=rest.min(max)).rev() {
                prefix.push(first);
                go(rest - first, first, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        go(d, d, &mut Vec::new(), &mut out);
        out
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight().cmp(&other.weight()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    /// `2+1+1`; the empty partition is written `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl FromStr for Partition {
    type Err = ChernError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "0" {
            return Ok(Partition::empty());
        }
        let bad = || ChernError::BadPartition(s.to_string());
        let parts = s
            .split('+')
            .map(|p| {
                if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                p.parse::<u32>().map_err(|_| bad())
            })
            .collect::<Result<Vec<_>, _>>()?;
        let sorted = Partition::new(parts.clone()).map_err(|_| bad())?;
        if sorted.0 != parts {
            return Err(bad());
        }
        Ok(sorted)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Chern numbers keyed by partition, in the fixed partition order.
pub type ChernNumbers = BTreeMap<Partition, Rational>;

/// An element of the intersection ring of a product of projective spaces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChowClass<C> {
    base: ProjProduct,
    terms: BTreeMap<Vec<u32>, C>,
}

impl<C: Coeff> ChowClass<C> {
    pub fn zero(base: &ProjProduct) -> Self {
        ChowClass {
            base: base.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(base: &ProjProduct, c: C) -> Self {
        let mut out = Self::zero(base);
        out.insert(vec![0; base.num_factors()], c);
        out
    }

    pub fn one(base: &ProjProduct) -> Self {
        Self::constant(base, C::one())
    }

    /// The hyperplane class `H_i` (pulled back from the i-th factor).
    pub fn hyperplane(base: &ProjProduct, i: usize) -> Self {
        let mut e = vec![0; base.num_factors()];
        e[i] = 1;
        let mut out = Self::zero(base);
        out.insert(e, C::one());
        out
    }

    /// `sum_i a_i H_i`.
    pub fn linear(base: &ProjProduct, coeffs: &[i64]) -> Self {
        let mut out = Self::zero(base);
        for (i, &a) in coeffs.iter().enumerate() {
            let mut e = vec![0; base.num_factors()];
            e[i] = 1;
            out.insert(e, C::from_rational(Rational::from_integer(a)));
        }
        out
    }

    /// Monomial `H1^{e1} ... Hk^{ek}` with the given coefficient.
    pub fn monomial(base: &ProjProduct, exponents: Vec<u32>, c: C) -> Self {
        let mut out = Self::zero(base);
        out.insert(exponents, c);
        out
    }

    fn insert(&mut self, e: Vec<u32>, c: C) {
        let nilpotent = e.iter().zip(&self.base.factors).any(|(x, r)| x > r);
        if c.is_zero() || nilpotent {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, c);
        }
    }

    pub fn base(&self) -> &ProjProduct {
        &self.base
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.base.num_factors()])
    }

    fn check_base(&self, other: &Self) -> Result<(), ChernError> {
        if self.base != other.base {
            return Err(ChernError::BaseMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, ChernError> {
        self.check_base(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let sum = out.coeff(e).plus(c);
            out.insert(e.clone(), sum);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ChernError> {
        self.add(&other.scale(&C::one().negated()))
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(&self.base);
        for (e, x) in &self.terms {
            out.insert(e.clone(), x.times(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ChernError> {
        self.check_base(other)?;
        let mut acc: BTreeMap<Vec<u32>, C> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            'pairs: for (eb, cb) in &other.terms {
                let mut e = Vec::with_capacity(ea.len());
                for ((a, b), r) in ea.iter().zip(eb).zip(&self.base.factors) {
                    if a + b > *r {
                        continue 'pairs;
                    }
                    e.push(a + b);
                }
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
        Ok(ChowClass {
            base: self.base.clone(),
            terms: acc,
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.base);
        for _ in 0..k {
            acc = acc.mul(self).expect("same base");
        }
        acc
    }

    /// Homogeneous component of codimension `k`.
    pub fn degree_part(&self, k: u32) -> Self {
        ChowClass {
            base: self.base.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == k)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Multiplicative inverse of a class with unit constant term.
    pub fn inverse(&self) -> Result<Self, ChernError> {
        let c0 = self.constant_term();
        let c0_inv = c0.try_inverse().ok_or(ChernError::BadSeries)?;
        let one = Self::one(&self.base);
        let minus_t = one.sub(&self.scale(&c0_inv))?;
        let mut acc = one.clone();
        let mut power = one;
        for _ in 0..self.base.dim() {
            power = power.mul(&minus_t)?;
            acc = acc.add(&power)?;
        }
        Ok(acc.scale(&c0_inv))
    }

    /// `phi(self)` for a class without constant term; terminates because
    /// `self^{dim+1} = 0`.
    pub fn eval_series(&self, phi: &TruncSeries<C>) -> Result<Self, ChernError> {
        if !phi.is_univariate() || !self.constant_term().is_zero() {
            return Err(ChernError::BadSeries);
        }
        let dim = self.base.dim();
        if phi.order() <= dim {
            return Err(ChernError::InsufficientOrder {
                order: phi.order(),
                dim,
            });
        }
        let mut acc = Self::zero(&self.base);
        let mut power = Self::one(&self.base);
        for k in 0..=dim {
            let c = phi.coeff_at(k as u16);
            if !c.is_zero() {
                acc = acc.add(&power.scale(&c))?;
            }
            power = power.mul(self)?;
            if power.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    pub fn map_coeffs<D: Coeff>(&self, mut f: impl FnMut(&C) -> D) -> ChowClass<D> {
        let mut out = ChowClass::zero(&self.base);
        for (e, c) in &self.terms {
            out.insert(e.clone(), f(c));
        }
        out
    }
}

impl ChowClass<Rational> {
    pub fn lift<C: Coeff>(&self) -> ChowClass<C> {
        self.map_coeffs(|q| C::from_rational(q.clone()))
    }
}

impl<C: Coeff> fmt::Display for ChowClass<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| a.iter().sum::<u32>().cmp(&b.iter().sum::<u32>()).then_with(|| b.cmp(a)));
        let mut pieces = Vec::new();
        for e in keys {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        format!("H{}", i + 1)
                    } else {
                        format!("H{}^{}", i + 1, x)
                    }
                })
                .collect();
            let mono = mono.join("*");
            for (q, m) in self.terms[e].text_terms() {
                let full = match (m.is_empty(), mono.is_empty()) {
                    (true, _) => mono.clone(),
                    (false, true) => m,
                    (false, false) => format!("{m}*{mono}"),
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

pub fn c1<C: Coeff>(bundle: &LineBundleSpec) -> ChowClass<C> {
    ChowClass::linear(&bundle.base, &bundle.multidegree)
}

/// Chern roots of `T_X` with multiplicity: `(H_i, r_i + 1)` from the Euler
/// sequences of the factors.
pub fn tangent_chern_roots(x: &ProjProduct) -> Vec<(ChowClass<Rational>, u32)> {
    x.factors()
        .iter()
        .enumerate()
        .map(|(i, &r)| (ChowClass::hyperplane(x, i), r + 1))
        .collect()
}

/// `prod_roots phi(root)^multiplicity`.
pub fn genus_of_roots<C: Coeff>(
    phi: &TruncSeries<C>,
    roots: &[(ChowClass<Rational>, u32)],
) -> Result<ChowClass<C>, ChernError> {
    let base = roots
        .first()
        .map(|(r, _)| r.base().clone())
        .ok_or(ChernError::BadSeries)?;
    let mut acc = ChowClass::one(&base);
    for (root, mult) in roots {
        let value = root.lift::<C>().eval_series(phi)?;
        acc = acc.mul(&value.pow(*mult))?;
    }
    Ok(acc)
}

/// Coefficient of the top class `H1^{r1} ... Hk^{rk}`.
pub fn integrate<C: Coeff>(c: &ChowClass<C>) -> C {
    c.coeff(c.base().factors())
}

/// `c(T_X) = prod (1 + H_i)^{r_i + 1}`.
pub fn total_chern_class(x: &ProjProduct) -> ChowClass<Rational> {
    let mut acc = ChowClass::one(x);
    for (root, mult) in tangent_chern_roots(x) {
        let factor = ChowClass::one(x).add(&root).expect("same base");
        acc = acc.mul(&factor.pow(mult)).expect("same base");
    }
    acc
}

/// A virtual complete intersection `Z(L1, ..., Lp)` inside a product of
/// projective spaces; with no bundles it is the ambient variety itself.
#[derive(Clone, Debug)]
pub struct VirtualIntersection {
    ambient: ProjProduct,
    total_chern: ChowClass<Rational>,
    fundamental: ChowClass<Rational>,
    dim: u32,
}

impl VirtualIntersection {
    pub fn ambient(x: &ProjProduct) -> Self {
        VirtualIntersection {
            ambient: x.clone(),
            total_chern: total_chern_class(x),
            fundamental: ChowClass::one(x),
            dim: x.dim(),
        }
    }

    /// Cuts by a section of `bundle`: `c(T_Z) = c(T)/(1 + c1(L))` and
    /// `[Z] = [current] * c1(L)`.
    pub fn cut(&self, bundle: &LineBundleSpec) -> Result<Self, ChernError> {
        if bundle.base() != &self.ambient {
            return Err(ChernError::BaseMismatch);
        }
        if self.dim == 0 {
            return Err(ChernError::DimensionUnderflow { cuts: 1, dim: 0 });
        }
        let l = c1::<Rational>(bundle);
        let normal = ChowClass::one(&self.ambient).add(&l)?;
        Ok(VirtualIntersection {
            ambient: self.ambient.clone(),
            total_chern: self.total_chern.mul(&normal.inverse()?)?,
            fundamental: self.fundamental.mul(&l)?,
            dim: self.dim - 1,
        })
    }

    pub fn complete_intersection(x: &ProjProduct, bundles: &[LineBundleSpec]) -> Result<Self, ChernError> {
        if bundles.len() > x.dim() as usize {
            return Err(ChernError::DimensionUnderflow {
                cuts: bundles.len(),
                dim: x.dim(),
            });
        }
        bundles.iter().try_fold(Self::ambient(x), |z, l| z.cut(l))
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn fundamental_class(&self) -> &ChowClass<Rational> {
        &self.fundamental
    }

    pub fn total_chern_class(&self) -> &ChowClass<Rational> {
        &self.total_chern
    }

    /// `∫_Z alpha = ∫_X alpha * [Z]`.
    pub fn integrate<C: Coeff>(&self, alpha: &ChowClass<C>) -> Result<C, ChernError> {
        Ok(integrate(&alpha.mul(&self.fundamental.lift())?))
    }

    pub fn chern_numbers(&self) -> ChernNumbers {
        let classes: Vec<ChowClass<Rational>> = (0..=self.dim).map(|k| self.total_chern.degree_part(k)).collect();
        Partition::all(self.dim)
            .into_iter()
            .map(|p| {
                let mut product = self.fundamental.clone();
                for &part in p.parts() {
                    product = product.mul(&classes[part as usize]).expect("same base");
                }
                let value = integrate(&product);
                (p, value)
            })
            .collect()
    }
}

pub fn chern_numbers(x: &ProjProduct) -> ChernNumbers {
    VirtualIntersection::ambient(x).chern_numbers()
}

/// Chern numbers of the virtual hypersurface cut out by a section of `bundle`.
pub fn hypersurface_chern_numbers(x: &ProjProduct, bundle: &LineBundleSpec) -> Result<ChernNumbers, ChernError> {
    if x.dim() < 2 {
        return Err(ChernError::DimensionUnderflow { cuts: 1, dim: x.dim() });
    }
    Ok(VirtualIntersection::ambient(x).cut(bundle)?.chern_numbers())
}

/// `sum_I v_I c_I`: a polynomial in the Chern classes of a rank-`d` bundle,
/// indexed by partitions of `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChernPolynomial<C> {
    pub degree: u32,
    pub coefficients: BTreeMap<Partition, C>,
}

impl<C: Coeff> ChernPolynomial<C> {
    pub fn coefficient(&self, p: &Partition) -> C {
        self.coefficients.get(p).cloned().unwrap_or_else(C::zero)
    }

    /// `sum_I v_I C_I` for a table of Chern numbers.
    pub fn evaluate(&self, numbers: &ChernNumbers) -> C {
        let mut acc = C::zero();
        for (p, v) in &self.coefficients {
            if let Some(n) = numbers.get(p) {
                acc = acc.plus(&v.scale(n));
            }
        }
        acc
    }
}

/// Integer coefficients of `x^mu` (mu a partition, padded to `d` variables)
/// in `e_nu = e_{nu1} ... e_{num}`, by brute expansion in `d` variables.
fn elementary_to_monomial(d: u32) -> BTreeMap<Partition, BTreeMap<Partition, i64>> {
    let n = d as usize;
    let mut elementary: Vec<HashMap<Vec<u8>, i64>> = vec![HashMap::new(); n + 1];
    for mask in 0u32..(1 << n) {
        let k = mask.count_ones() as usize;
        let e: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
        elementary[k].insert(e, 1);
    }
    let mut out = BTreeMap::new();
    for nu in Partition::all(d) {
        let mut poly: HashMap<Vec<u8>, i64> = HashMap::from([(vec![0u8; n], 1)]);
        for &part in nu.parts() {
            let mut next = HashMap::new();
            for (ea, ca) in &poly {
                for (eb, cb) in &elementary[part as usize] {
                    let e: Vec<u8> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                    *next.entry(e).or_insert(0) += ca * cb;
                }
            }
            poly = next;
        }
        let row = Partition::all(d)
            .into_iter()
            .filter_map(|mu| {
                let mut e: Vec<u8> = mu.parts().iter().map(|&p| p as u8).collect();
                e.resize(n, 0);
                poly.get(&e).filter(|&&c| c != 0).map(|&c| (mu, c))
            })
            .collect();
        out.insert(nu, row);
    }
    out
}

/// The universal polynomial with
/// `[prod_{j=1}^d phi(x_j)]_{deg d} = sum_I v_{d,I} e_I(x)`.
///
/// The left side is symmetric with coefficient `prod_i phi_{mu_i}` on the
/// monomial symmetric function `m_mu`; it is converted to the elementary
/// basis by peeling off `e_{mu'}`, whose leading monomial is `x^mu`. The
/// transition table is built by brute expansion, which is practical for
/// `d <= 8`.
pub fn v_poly<C: Coeff>(d: u32, phi: &TruncSeries<C>) -> Result<ChernPolynomial<C>, ChernError> {
    if !phi.is_univariate() {
        return Err(ChernError::BadSeries);
    }
    if phi.order() <= d {
        return Err(ChernError::InsufficientOrder {
            order: phi.order(),
            dim: d,
        });
    }
    let phi0 = phi.constant_term();
    let mut residual: BTreeMap<Partition, C> = Partition::all(d)
        .into_iter()
        .map(|mu| {
            let mut c = C::one();
            for &part in mu.parts() {
                c = c.times(&phi.coeff_at(part as u16));
            }
            for _ in mu.len()..d as usize {
                c = c.times(&phi0);
            }
            (mu, c)
        })
        .collect();
    let table = elementary_to_monomial(d);
    let mut coefficients = BTreeMap::new();
    for mu in Partition::all(d) {
        let c = residual[&mu].clone();
        if c.is_zero() {
            continue;
        }
        let nu = mu.conjugate();
        for (lower, &k) in &table[&nu] {
            let r = residual.get_mut(lower).expect("all partitions present");
            *r = r.minus(&c.scale(&Rational::from_integer(k)));
        }
        coefficients.insert(nu, c);
    }
    debug_assert!(residual.values().all(Coeff::is_zero));
    Ok(ChernPolynomial {
        degree: d,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lazard::{g_series, LazardElement};

    fn pp(s: &str) -> ProjProduct {
        s.parse().unwrap()
    }

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn numbers(x: &str) -> Vec<(String, i64)> {
        chern_numbers(&pp(x))
            .into_iter()
            .map(|(p, v)| {
                assert!(v.is_integer());
                (p.to_string(), v.numer().try_into().unwrap())
            })
            .collect()
    }

    #[test]
    fn text_forms() {
        assert_eq!(pp("P2xP1xP1").factors(), &[2, 1, 1]);
        assert_eq!(pp("P2xP1xP1").to_string(), "P2xP1xP1");
        for bad in ["", "P0", "P", "Q2", "P2x", "P2*P1", "p2", "P-1"] {
            assert!(bad.parse::<ProjProduct>().is_err(), "{bad:?}");
        }
        let x = pp("P2xP1");
        assert_eq!(LineBundleSpec::parse(&x, "O(2,-1)").unwrap().multidegree(), &[2, -1]);
        assert_eq!(LineBundleSpec::parse(&x, "O(2,-1)").unwrap().to_string(), "O(2,-1)");
        assert_eq!(
            LineBundleSpec::parse(&x, "O(1)"),
            Err(ChernError::BundleLength { expected: 2, got: 1 })
        );
        for bad in ["O(1,)", "O1,2", "O(1,2", "O(a,1)", "O(1, 2)"] {
            assert!(LineBundleSpec::parse(&x, bad).is_err(), "{bad:?}");
        }
        assert_eq!(part("2+1+1").parts(), &[2, 1, 1]);
        assert_eq!(part("0"), Partition::empty());
        assert!("1+2".parse::<Partition>().is_err());
        assert!("2++1".parse::<Partition>().is_err());
    }

    #[test]
    fn partition_order_and_conjugate() {
        let names: Vec<String> = Partition::all(4).iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["4", "3+1", "2+2", "2+1+1", "1+1+1+1"]);
        assert_eq!(Partition::all(0), vec![Partition::empty()]);
        assert_eq!(part("3+1").conjugate(), part("2+1+1"));
        let mut sorted = Partition::all(5);
        sorted.sort();
        assert_eq!(sorted, Partition::all(5));
    }

    #[test]
    fn c1_examples() {
        let x = pp("P1xP1");
        let h1 = ChowClass::<Rational>::hyperplane(&x, 0);
        let h2 = ChowClass::<Rational>::hyperplane(&x, 1);
        assert_eq!(c1::<Rational>(&LineBundleSpec::new(&x, vec![1, 0]).unwrap()), h1);
        assert_eq!(
            c1::<Rational>(&LineBundleSpec::new(&x, vec![1, 1]).unwrap()),
            h1.add(&h2).unwrap()
        );
        let y = pp("P2xP1");
        assert_eq!(
            c1::<Rational>(&LineBundleSpec::new(&y, vec![2, 3]).unwrap()).to_string(),
            "2*H1 + 3*H2"
        );
    }

    #[test]
    fn tangent_classes() {
        assert_eq!(total_chern_class(&pp("P2")).to_string(), "1 + 3*H1 + 3*H1^2");
        assert_eq!(total_chern_class(&pp("P1xP1")).to_string(), "1 + 2*H1 + 2*H2 + 4*H1*H2");
        assert_eq!(total_chern_class(&pp("P1")).to_string(), "1 + 2*H1");
        let roots = tangent_chern_roots(&pp("P1xP1"));
        assert_eq!(roots.iter().map(|r| r.1).collect::<Vec<_>>(), [2, 2]);
    }

    #[test]
    fn integration_examples() {
        let x = pp("P2xP1");
        let top = ChowClass::<Rational>::monomial(&x, vec![2, 1], Rational::one());
        assert_eq!(integrate(&top), Rational::one());
        let off = ChowClass::<Rational>::monomial(&x, vec![1, 1], Rational::one());
        assert_eq!(integrate(&off), Rational::zero());
        assert_eq!(integrate(&total_chern_class(&pp("P1"))), Rational::from_integer(2));
    }

    #[test]
    fn nilpotency() {
        let x = pp("P2xP1");
        let h1 = ChowClass::<Rational>::hyperplane(&x, 0);
        assert!(h1.pow(3).is_zero());
        assert!(!h1.pow(2).is_zero());
        let h2 = ChowClass::<Rational>::hyperplane(&x, 1);
        assert!(h2.pow(2).is_zero());
    }

    #[test]
    fn chern_number_examples() {
        assert_eq!(numbers("P2"), [("2".to_string(), 3), ("1+1".to_string(), 9)]);
        assert_eq!(numbers("P1xP1"), [("2".to_string(), 4), ("1+1".to_string(), 8)]);
        assert_eq!(numbers("P1"), [("1".to_string(), 2)]);
    }

    #[test]
    fn hypersurface_examples() {
        let x = pp("P1xP1");
        let z = hypersurface_chern_numbers(&x, &LineBundleSpec::new(&x, vec![1, 1]).unwrap()).unwrap();
        assert_eq!(z[&part("1")], Rational::from_integer(2));
        let p2 = pp("P2");
        let line = hypersurface_chern_numbers(&p2, &LineBundleSpec::new(&p2, vec![1]).unwrap()).unwrap();
        assert_eq!(line[&part("1")], Rational::from_integer(2));
        let cubic = hypersurface_chern_numbers(&p2, &LineBundleSpec::new(&p2, vec![3]).unwrap()).unwrap();
        assert_eq!(cubic[&part("1")], Rational::zero());
        let trivial = hypersurface_chern_numbers(&x, &LineBundleSpec::new(&x, vec![0, 0]).unwrap()).unwrap();
        assert!(trivial.values().all(Rational::is_zero));
        let p1 = pp("P1");
        assert!(matches!(
            hypersurface_chern_numbers(&p1, &LineBundleSpec::new(&p1, vec![1]).unwrap()),
            Err(ChernError::DimensionUnderflow { .. })
        ));
    }

    #[test]
    fn complete_intersection_of_two_conics_in_p3_is_a_curve_of_genus_one() {
        // deg (2,2) complete intersection curve: chi_top = -deg * (4 - 2 - 2) = 0
        let x = pp("P3");
        let q = LineBundleSpec::new(&x, vec![2]).unwrap();
        let z = VirtualIntersection::complete_intersection(&x, &[q.clone(), q]).unwrap();
        assert_eq!(z.dim(), 1);
        assert_eq!(z.chern_numbers()[&part("1")], Rational::zero());
        let points = VirtualIntersection::complete_intersection(
            &pp("P1xP1"),
            &[
                LineBundleSpec::new(&pp("P1xP1"), vec![1, 0]).unwrap(),
                LineBundleSpec::new(&pp("P1xP1"), vec![0, 1]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(points.chern_numbers()[&Partition::empty()], Rational::one());
    }

    #[test]
    fn genus_of_roots_examples() {
        let one = TruncSeries::<Rational>::one(&["u".to_string()], 4).unwrap();
        let x = pp("P2xP1");
        assert_eq!(
            genus_of_roots(&one, &tangent_chern_roots(&x)).unwrap(),
            ChowClass::one(&x)
        );

        let g_inv = g_series(3).unwrap().inverse().unwrap();
        let p1 = pp("P1");
        let value = genus_of_roots(&g_inv, &tangent_chern_roots(&p1)).unwrap();
        assert_eq!(value.to_string(), "1 + p1*H1");

        // Td(u) = u / (1 - e^{-u}) = 1 + u/2 + u^2/12 + ...
        let td = TruncSeries::from_dense(
            "u",
            3,
            vec![
                Rational::one(),
                Rational::new(1, 2).unwrap(),
                Rational::new(1, 12).unwrap(),
            ],
        )
        .unwrap();
        let p2 = pp("P2");
        assert_eq!(
            integrate(&genus_of_roots(&td, &tangent_chern_roots(&p2)).unwrap()),
            Rational::one()
        );

        let short = g_series(2).unwrap();
        assert_eq!(
            genus_of_roots(&short, &tangent_chern_roots(&p2)),
            Err(ChernError::InsufficientOrder { order: 2, dim: 2 })
        );
    }

    #[test]
    fn v_poly_examples() {
        let g_inv = g_series(5).unwrap().inverse().unwrap();
        let v1 = v_poly(1, &g_inv).unwrap();
        assert_eq!(v1.coefficient(&part("1")), "(1/2)*p1".parse::<LazardElement>().unwrap());

        let one = TruncSeries::<Rational>::one(&["u".to_string()], 4).unwrap();
        let v2 = v_poly(2, &one).unwrap();
        assert!(Partition::all(2).iter().all(|p| v2.coefficient(p).is_zero()));
    }

    #[test]
    fn v_poly_reproduces_todd_polynomials() {
        // Td_2 = (c1^2 + c2) / 12
        let td = TruncSeries::from_dense(
            "u",
            3,
            vec![
                Rational::one(),
                Rational::new(1, 2).unwrap(),
                Rational::new(1, 12).unwrap(),
            ],
        )
        .unwrap();
        let v = v_poly(2, &td).unwrap();
        assert_eq!(v.coefficient(&part("1+1")), Rational::new(1, 12).unwrap());
        assert_eq!(v.coefficient(&part("2")), Rational::new(1, 12).unwrap());
    }

    #[test]
    fn v_poly_agrees_with_root_expansion() {
        let g_inv = g_series(5).unwrap().inverse().unwrap();
        for d in 1..=4 {
            let v = v_poly(d, &g_inv).unwrap();
            for x in ProjProduct::all_of_dimension(d) {
                let direct = integrate(&genus_of_roots(&g_inv, &tangent_chern_roots(&x)).unwrap());
                assert_eq!(v.evaluate(&chern_numbers(&x)), direct, "{x}");
            }
        }
    }
}
