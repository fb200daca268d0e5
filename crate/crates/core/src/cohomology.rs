//! Coboundary equations for the off-diagonal block of a decomposition, the
//! matching lift of translations, and principalization of raw lifts.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::action::{AffineZpAction, ZpAction};
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::linalg::{solve_diophantine, solve_rational, IntMat, IntVec, Rat, RatMat};
use crate::symbolic::{apply_int, apply_rat, SymVec, SymbolPool};

/// `W₀` with `V(eᵢ) = W₀·A₁(eᵢ) − A₂(eᵢ)·W₀` for every generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoboundarySolution {
    pub w0: RatMat,
    pub integral: Option<IntMat>,
    /// `H = [[I, 0], [−W₀, I]]` in block coordinates; conjugating the block
    /// generators by it removes `V`. Present only for integral `W₀`.
    pub conjugator: Option<IntMat>,
}

/// Stacked column-major system `(A₁ᵀ ⊗ I − I ⊗ A₂)·vec W = vec V`.
fn sylvester_system(dec: &Decomposition) -> (IntMat, IntVec) {
    let (q1, q2) = (dec.q1, dec.q2);
    let n = q1 * q2;
    let mut blocks = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..dec.p() {
        let left = dec.a1.gen(i).transpose().kron(&IntMat::identity(q2));
        let right = IntMat::identity(q1).kron(dec.a2.gen(i));
        blocks.push(left.sub(&right));
        rhs.extend(dec.v_gens[i].vectorize());
    }
    (IntMat::vstack(&blocks, n), rhs)
}

fn residual_is_zero(dec: &Decomposition, w0: &RatMat) -> bool {
    (0..dec.p()).all(|i| {
        let lhs = w0.mul(&dec.a1.gen(i).to_rat()).sub(&dec.a2.gen(i).to_rat().mul(w0));
        lhs == dec.v_gens[i].to_rat()
    })
}

pub fn solve_coboundary_rational(dec: &Decomposition) -> Result<CoboundarySolution> {
    let (q1, q2) = (dec.q1, dec.q2);
    let (system, rhs) = sylvester_system(dec);
    let rhs: Vec<Rat> = rhs.into_iter().map(Rat::from_integer).collect();
    let sol = solve_rational(&system.to_rat(), &rhs)
        .ok_or_else(|| Error::Inconsistent("coboundary equation has no rational solution".into()))?;
    let w0 = RatMat::from_vectorized(q2, q1, &sol.particular);
    if !residual_is_zero(dec, &w0) {
        return Err(Error::Inconsistent("coboundary residual is nonzero".into()));
    }
    let integral = w0.try_to_int();
    let conjugator = integral.as_ref().map(|w| conjugator_for(q1, q2, w));
    Ok(CoboundarySolution {
        w0,
        integral,
        conjugator,
    })
}

/// Integer `W₀`, when the coboundary equation has one.
pub fn solve_coboundary_integral(dec: &Decomposition) -> Option<IntMat> {
    let (system, rhs) = sylvester_system(dec);
    let x = solve_diophantine(&system, &rhs)?;
    Some(IntMat::from_vectorized(dec.q2, dec.q1, &x))
}

fn conjugator_for(q1: usize, q2: usize, w: &IntMat) -> IntMat {
    IntMat::from_blocks(
        &IntMat::identity(q1),
        &IntMat::zeros(q1, q2),
        &w.neg(),
        &IntMat::identity(q2),
    )
}

/// `β(eᵢ) = W₀·α(eᵢ)`, checked to give a compatible translation family on
/// the block action.
pub fn lift_beta(dec: &Decomposition, alphas: &[SymVec]) -> Result<Vec<SymVec>> {
    let sol = solve_coboundary_rational(dec)?;
    lift_beta_with(dec, &sol.w0, alphas)
}

pub fn lift_beta_with(dec: &Decomposition, w0: &RatMat, alphas: &[SymVec]) -> Result<Vec<SymVec>> {
    if alphas.len() != dec.p() || alphas.iter().any(|a| a.len() != dec.q1) {
        return Err(Error::Dimension("translations do not match the quotient block".into()));
    }
    let betas: Vec<SymVec> = alphas.iter().map(|a| apply_rat(w0, a)).collect();
    let gammas: Vec<SymVec> = alphas.iter().zip(&betas).map(|(a, b)| a.concat(b)).collect();
    let block = dec.block_action();
    let pool = SymbolPool::from_names(symbols_of(&gammas))?;
    let violations = AffineZpAction::check(&block, &pool, &gammas);
    if !violations.is_empty() {
        return Err(Error::Inconsistent(format!(
            "lifted translations are not compatible: {violations:?}"
        )));
    }
    Ok(betas)
}

pub(crate) fn symbols_of(vs: &[SymVec]) -> Vec<String> {
    let mut names: Vec<String> = vs.iter().flat_map(SymVec::symbols).map(str::to_string).collect();
    names.sort();
    names.dedup();
    names
}

/// Pairwise defects `k_ij = (A(eᵢ) − I)γⱼ − (A(eⱼ) − I)γᵢ` for `i < j`.
pub fn cocycle_defects(linear: &ZpAction, raw: &[SymVec]) -> Result<BTreeMap<(usize, usize), IntVec>> {
    let p = linear.p();
    if raw.len() != p || raw.iter().any(|t| t.len() != linear.q()) {
        return Err(Error::Dimension("raw translations do not match the action".into()));
    }
    let mut out = BTreeMap::new();
    for i in 0..p {
        for j in i + 1..p {
            let d = apply_int(&linear.gen(i).minus_identity(), &raw[j])
                .sub(&apply_int(&linear.gen(j).minus_identity(), &raw[i]));
            let ints =
                d.0.iter()
                    .map(|x| x.is_integer().then(|| x.rational_part().to_integer()))
                    .collect::<Option<IntVec>>()
                    .ok_or(Error::NonIntegerDefect { i, j })?;
            out.insert((i, j), ints);
        }
    }
    Ok(out)
}

/// Turns a raw lift whose generators commute only up to integer translations
/// into a genuine affine action with the same torus maps up to conjugation.
pub fn principalize(linear: &ZpAction, pool: &SymbolPool, raw: &[SymVec]) -> Result<AffineZpAction> {
    let defects = cocycle_defects(linear, raw)?;
    principalize_with_defects(linear, pool, raw, &defects)
}

/// Same as [`principalize`] with caller-supplied defects.
pub fn principalize_with_defects(
    linear: &ZpAction,
    pool: &SymbolPool,
    raw: &[SymVec],
    defects: &BTreeMap<(usize, usize), IntVec>,
) -> Result<AffineZpAction> {
    let (p, q) = (linear.p(), linear.q());
    if raw.len() != p || raw.iter().any(|t| t.len() != q) {
        return Err(Error::Dimension("raw translations do not match the action".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|i| (i + 1..p).map(move |j| (i, j))).collect();
    let mut system = RatMat::zeros(pairs.len() * q, p * q);
    let mut rhs = vec![Rat::zero(); pairs.len() * q];
    for (row, &(i, j)) in pairs.iter().enumerate() {
        let ai = linear.gen(i).minus_identity();
        let aj = linear.gen(j).minus_identity();
        let k = defects.get(&(i, j)).cloned().unwrap_or_else(|| vec![Zero::zero(); q]);
        if k.len() != q {
            return Err(Error::Dimension(format!("defect ({i}, {j}) has wrong length")));
        }
        for r in 0..q {
            for c in 0..q {
                system[(row * q + r, j * q + c)] += Rat::from_integer(ai[(r, c)].clone());
                system[(row * q + r, i * q + c)] -= Rat::from_integer(aj[(r, c)].clone());
            }
            rhs[row * q + r] = Rat::from_integer(k[r].clone());
        }
    }
    let sol = solve_rational(&system, &rhs)
        .ok_or_else(|| Error::Inconsistent(format!("no rational correction solves the defect system {defects:?}")))?;
    let trans: Vec<SymVec> = (0..p)
        .map(|i| raw[i].sub(&SymVec::from_rats(&sol.particular[i * q..(i + 1) * q])))
        .collect();
    AffineZpAction::new(linear.clone(), pool.clone(), trans)
        .map_err(|e| Error::Inconsistent(format!("corrected translations still incompatible: {e}")))
}
