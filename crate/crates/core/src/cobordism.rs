//! Rational cobordism classes from Chern numbers, and the two
//! Riemann-Roch style identities relating them to the universal genus.
//!
//! A class of dimension `d` is written in the Milnor basis
//! `{P^{j1} x ... x P^{jm}}` indexed by partitions `J` of `d`, by solving
//! `sum_J alpha_J C_I(P^J) = C_I(X)` exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chern::{
    self, chern_numbers, genus_of_roots, tangent_chern_roots, ChernError, ChernNumbers, LineBundleSpec, Partition,
    ProjProduct, VirtualIntersection,
};
use crate::exactnum::Rational;
use crate::lazard::{g_series, universal_exp, LazardElement, LazardError};
use crate::linalg::{self, LinalgError};
use crate::series::TruncSeries;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CobordismError {
    #[error("Chern numbers are missing partition {0}")]
    MissingChernNumber(Partition),
    #[error("Chern-number system could not be solved: {0}")]
    Linalg(#[from] LinalgError),
    #[error("truncation order {order} must exceed the dimension {dim}")]
    OrderTooSmall { order: u32, dim: u32 },
    #[error(transparent)]
    Chern(#[from] ChernError),
    #[error(transparent)]
    Lazard(#[from] LazardError),
}

/// A homogeneous element of the Lazard ring of a single degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CobordismClass {
    pub degree: u32,
    pub value: LazardElement,
}

/// Partitions of `d` in the fixed order: `(d)` first, `(1, ..., 1)` last.
pub fn milnor_basis(d: u32) -> Vec<Partition> {
    Partition::all(d)
}

/// The basis variety `P^{j1} x ... x P^{jm}`; `None` for the empty partition
/// (the point).
pub fn basis_variety(j: &Partition) -> Option<ProjProduct> {
    if j.is_empty() {
        None
    } else {
        Some(ProjProduct::new(j.parts().to_vec()).expect("parts are positive"))
    }
}

fn basis_chern_numbers(j: &Partition) -> ChernNumbers {
    match basis_variety(j) {
        Some(x) => chern_numbers(&x),
        None => ChernNumbers::from([(Partition::empty(), Rational::one())]),
    }
}

/// `M[I][J] = C_I(P^J)` over partitions `I, J` of `d`.
pub fn chern_pairing_matrix(d: u32) -> Vec<Vec<Rational>> {
    let basis = milnor_basis(d);
    let columns: Vec<ChernNumbers> = basis.iter().map(basis_chern_numbers).collect();
    basis
        .iter()
        .map(|i| columns.iter().map(|col| col[i].clone()).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub degree: u32,
    pub basis: Vec<Partition>,
    pub coordinates: Vec<Rational>,
    pub residual: Rational,
    pub chern_input: ChernNumbers,
}

impl DecompositionReport {
    /// `sum_J alpha_J p_{j1} ... p_{jm}`.
    pub fn class(&self) -> CobordismClass {
        let mut value = LazardElement::zero();
        for (j, alpha) in self.basis.iter().zip(&self.coordinates) {
            value = value.add(&LazardElement::product_of_generators(j.parts()).scale(alpha));
        }
        CobordismClass {
            degree: self.degree,
            value,
        }
    }
}

/// Solves for the Milnor-basis coordinates of the class with the given Chern
/// numbers.
pub fn decompose(numbers: &ChernNumbers, d: u32) -> Result<DecompositionReport, CobordismError> {
    let basis = milnor_basis(d);
    let rhs = basis
        .iter()
        .map(|i| {
            numbers
                .get(i)
                .cloned()
                .ok_or_else(|| CobordismError::MissingChernNumber(i.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let matrix = chern_pairing_matrix(d);
    let coordinates = linalg::solve(&matrix, &rhs)?;
    let mut residual = Rational::zero();
    for (row, target) in matrix.iter().zip(&rhs) {
        let reconstructed = row
            .iter()
            .zip(&coordinates)
            .fold(Rational::zero(), |acc, (m, a)| &acc + &(m * a));
        let defect = (&reconstructed - target).abs();
        if defect > residual {
            residual = defect;
        }
    }
    let chern_input = basis.iter().cloned().zip(rhs).collect();
    Ok(DecompositionReport {
        degree: d,
        basis,
        coordinates,
        residual,
        chern_input,
    })
}

/// The cobordism class of a product of projective spaces via its Chern numbers.
pub fn ell(x: &ProjProduct) -> Result<CobordismClass, CobordismError> {
    Ok(decompose(&chern_numbers(x), x.dim())?.class())
}

/// The class of a virtual complete intersection `Z(L1, ..., Lp) ⊂ X`.
pub fn ell_with_bundles(x: &ProjProduct, bundles: &[LineBundleSpec]) -> Result<DecompositionReport, CobordismError> {
    let z = VirtualIntersection::complete_intersection(x, bundles)?;
    decompose(&z.chern_numbers(), z.dim())
}

/// One side-by-side comparison of the genus integral with the class obtained
/// from Chern numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HrrReport {
    pub variety: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bundles: Vec<String>,
    pub degree: u32,
    pub basis: Vec<Partition>,
    pub coordinates: Vec<Rational>,
    pub lhs: LazardElement,
    pub rhs: LazardElement,
    pub pass: bool,
}

/// The universal series at a fixed truncation order, shared across many
/// checks.
#[derive(Debug, Clone)]
pub struct GenusContext {
    order: u32,
    g: TruncSeries<LazardElement>,
    g_inverse: TruncSeries<LazardElement>,
    exp: TruncSeries<LazardElement>,
}

impl GenusContext {
    pub fn new(order: u32) -> Result<Self, CobordismError> {
        let g = g_series(order)?;
        let g_inverse = g.inverse().map_err(LazardError::from)?;
        let exp = universal_exp(order.max(2))?;
        Ok(GenusContext {
            order,
            g,
            g_inverse,
            exp,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn g(&self) -> &TruncSeries<LazardElement> {
        &self.g
    }

    pub fn g_inverse(&self) -> &TruncSeries<LazardElement> {
        &self.g_inverse
    }

    fn require(&self, x: &ProjProduct) -> Result<(), CobordismError> {
        if self.order <= x.dim() {
            return Err(CobordismError::OrderTooSmall {
                order: self.order,
                dim: x.dim(),
            });
        }
        Ok(())
    }

    /// `∫_X prod_j h^{-1}(c1(L_j)) * g^{-1}(T_X)`.
    pub fn genus_integral(&self, x: &ProjProduct, bundles: &[LineBundleSpec]) -> Result<LazardElement, CobordismError> {
        self.require(x)?;
        if bundles.len() > x.dim() as usize {
            return Err(ChernError::DimensionUnderflow {
                cuts: bundles.len(),
                dim: x.dim(),
            }
            .into());
        }
        let mut integrand = genus_of_roots(&self.g_inverse, &tangent_chern_roots(x))?;
        for l in bundles {
            let c = chern::c1::<LazardElement>(l);
            integrand = integrand.mul(&c.eval_series(&self.exp)?)?;
        }
        Ok(chern::integrate(&integrand))
    }

    pub fn hrr(&self, x: &ProjProduct) -> Result<HrrReport, CobordismError> {
        let lhs = self.genus_integral(x, &[])?;
        let decomposition = decompose(&chern_numbers(x), x.dim())?;
        Ok(report(x, &[], lhs, decomposition))
    }

    pub fn hrrc(&self, x: &ProjProduct, bundles: &[LineBundleSpec]) -> Result<HrrReport, CobordismError> {
        let lhs = self.genus_integral(x, bundles)?;
        let decomposition = ell_with_bundles(x, bundles)?;
        Ok(report(x, bundles, lhs, decomposition))
    }
}

fn report(x: &ProjProduct, bundles: &[LineBundleSpec], lhs: LazardElement, d: DecompositionReport) -> HrrReport {
    let rhs = d.class().value;
    HrrReport {
        variety: x.to_string(),
        bundles: bundles.iter().map(|b| b.to_string()).collect(),
        degree: d.degree,
        pass: lhs == rhs,
        basis: d.basis,
        coordinates: d.coordinates,
        lhs,
        rhs,
    }
}

/// `∫_X g^{-1}(T_X)` against the Chern-number class of `X`.
pub fn hrr_check(x: &ProjProduct, order: u32) -> Result<HrrReport, CobordismError> {
    if order <= x.dim() {
        return Err(CobordismError::OrderTooSmall { order, dim: x.dim() });
    }
    GenusContext::new(order)?.hrr(x)
}

/// `∫_X prod h^{-1}(L_j) g^{-1}(T_X)` against the class of the virtual
/// complete intersection of the `L_j`.
pub fn hrrc_check(x: &ProjProduct, bundles: &[LineBundleSpec], order: u32) -> Result<HrrReport, CobordismError> {
    if order <= x.dim() {
        return Err(CobordismError::OrderTooSmall { order, dim: x.dim() });
    }
    GenusContext::new(order)?.hrrc(x, bundles)
}

/// Runs many checks in parallel; results keep the input order.
pub fn hrrc_suite(
    ctx: &GenusContext,
    cases: &[(ProjProduct, Vec<LineBundleSpec>)],
) -> Vec<Result<HrrReport, CobordismError>> {
    cases.par_iter().map(|(x, bundles)| ctx.hrrc(x, bundles)).collect()
}
