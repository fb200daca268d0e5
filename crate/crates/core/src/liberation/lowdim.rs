//! Free affine actions on tori of dimension at most three.
//!
//! A unipotent action is first put in flag form
//! `[[1, 0, 0], [μ, 1, 0], [ω, ν, 1]]` (or its 2×2 corner), where `μ, ω, ν`
//! are read off each generator. Translations are chosen on generators and
//! extended by the cocycle law.

use num_traits::{Signed, Zero};

use crate::action::{AffineZpAction, ZpAction};
use crate::decomposition::{decompose, unipotent_flag_basis, unipotent_split};
use crate::error::{Error, Result};
use crate::linalg::{gcd_all, kernel_saturated, solve_diophantine, Int, IntMat, IntVec, Rat};
use crate::symbolic::{SymReal, SymVec, SymbolPool};

use super::unipotent::liberate_rank;
use super::{lift_witness, rebased, translation_witness, Witness};

pub fn liberate_lowdim(a: &ZpAction) -> Result<Witness> {
    if a.q() > 3 {
        return Err(Error::Precondition("low-dimensional construction needs q ≤ 3".into()));
    }
    if a.fix_set().is_zero() {
        return Err(Error::FixTrivial);
    }
    if !a.is_unipotent() {
        let dec = decompose(a)?;
        let w1 = liberate_lowdim(&dec.a1)?;
        return lift_witness(&dec, &w1);
    }
    if a.is_trivial() {
        return translation_witness(a);
    }
    let (p_mat, p_inv) = unipotent_flag_basis(a)?;
    let flag = a.conjugate(&p_mat, &p_inv);
    let w = match a.q() {
        2 => shear_witness(&flag)?,
        3 => flag3_witness(&flag)?,
        _ => unreachable!("q = 1 unipotent actions are trivial"),
    };
    Ok(w.conjugate(&p_inv, &p_mat))
}

/// Entries `(row, col)` of every generator.
fn entries(flag: &ZpAction, row: usize, col: usize) -> IntVec {
    flag.gens().iter().map(|g| g[(row, col)].clone()).collect()
}

/// `Z^p = Z·f₁ ⊕ ker μ` with `μ(f₁) = gcd(μ)`, as a unimodular matrix
/// `[f₁ | kernel basis]`.
fn split_along(mu: &[Int]) -> Result<(IntMat, Int)> {
    let g = gcd_all(mu);
    let p = mu.len();
    let row = IntMat::from_rows(vec![mu.to_vec()])?;
    let f1 = solve_diophantine(&row, std::slice::from_ref(&g)).expect("gcd is attained");
    let mut cols = vec![f1];
    cols.extend(kernel_saturated(&row).basis);
    let f = IntMat::from_cols(p, &cols);
    debug_assert!(f.is_unimodular());
    Ok((f, g))
}

/// `(x, y) ↦ (x + α, μx + y + β)` with `α(f₁) = ξ`, `β(f₁) = ½μ(f₁)ξ` and
/// `β = η` on a basis of `ker μ`, so `ker α = ker μ`.
fn shear_witness(flag: &ZpAction) -> Result<Witness> {
    let mu = entries(flag, 1, 0);
    let (f, g) = split_along(&mu)?;
    let mut pool = SymbolPool::new();
    let xi = pool.fresh("xi");
    let half_g = Rat::new(g, 2.into());
    let mut trans = vec![SymVec(vec![xi.clone(), xi.scale(&half_g)])];
    for _ in 1..flag.p() {
        trans.push(SymVec(vec![SymReal::zero(), pool.fresh("eta")]));
    }
    Ok(Witness::new(rebased(flag, &f, pool, trans)?))
}

fn flag3_witness(flag: &ZpAction) -> Result<Witness> {
    let mu = entries(flag, 1, 0);
    let omega = entries(flag, 2, 0);
    let nu = entries(flag, 2, 1);
    if nu.iter().all(Zero::is_zero) {
        // fixed lattice has rank two, so the rank construction applies
        let split = unipotent_split(flag)?;
        let w = Witness::new(liberate_rank(&split)?);
        return Ok(w.conjugate(&split.p_inv, &split.p_mat));
    }
    let p = flag.p();
    let mut pool = SymbolPool::new();
    let a = pool.fresh("a");
    let trans: Vec<SymVec> = if mu.iter().all(Zero::is_zero) {
        let b = pool.fresh("b");
        (0..p)
            .map(|j| SymVec(vec![a.scale_int(&omega[j]), b.scale_int(&nu[j]), pool.fresh("eta")]))
            .collect()
    } else {
        let (g, r) = proportionality(&mu, &nu)?;
        let c1 = Rat::from_integer(g.clone()).recip();
        let c2 = (Rat::from_integer(g) * r).recip();
        (0..p)
            .map(|j| {
                SymVec(vec![
                    a.scale(&(c1.clone() * Rat::from_integer(mu[j].clone()))),
                    a.scale(&(c2.clone() * Rat::from_integer(omega[j].clone()))),
                    pool.fresh("eta"),
                ])
            })
            .collect()
    };
    Ok(Witness::new(AffineZpAction::new(flag.clone(), pool, trans)?))
}

/// `gcd(μ)` and `r` with `ν = r·μ`, which commutation forces when `μ ≠ 0`.
pub(crate) fn proportionality(mu: &[Int], nu: &[Int]) -> Result<(Int, Rat)> {
    let j = mu
        .iter()
        .position(|x| !x.is_zero())
        .ok_or_else(|| Error::Precondition("μ vanishes".into()))?;
    let r = Rat::new(nu[j].clone(), mu[j].clone());
    let ok = mu
        .iter()
        .zip(nu)
        .all(|(m, n)| Rat::from_integer(n.clone()) == r.clone() * Rat::from_integer(m.clone()));
    if !ok || r.is_zero() {
        return Err(Error::Precondition("ν is not a nonzero multiple of μ".into()));
    }
    Ok((gcd_all(mu).abs().max(Int::from(1)), r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn check(a: &ZpAction) -> Witness {
        let w = liberate_lowdim(a).unwrap();
        assert_eq!(w.action.linear(), a);
        assert!(w.action.free_box_check(4).is_none());
        w.certificate.check(&w.action, 4).unwrap();
        w
    }

    #[test]
    fn rotation() {
        let w = check(&ZpAction::new(1, vec![IntMat::identity(1)]).unwrap());
        assert_eq!(w.action.translations()[0], SymVec(vec![SymReal::symbol("xi1")]));
    }

    #[test]
    fn shear_two_generators() {
        let a = ZpAction::from_i64(&[&[&[1, 0], &[1, 1]], &[&[1, 0], &[0, 1]]]).unwrap();
        let w = check(&a);
        let xi = SymReal::symbol("xi1");
        assert_eq!(
            w.action.translations()[0],
            SymVec(vec![xi.clone(), xi.scale(&rat(1, 2))])
        );
        assert_eq!(
            w.action.translations()[1],
            SymVec(vec![SymReal::zero(), SymReal::symbol("eta1")])
        );
        assert!(w.certificate.is_complete());
    }

    #[test]
    fn lift_route() {
        let a = ZpAction::from_i64(&[&[&[1, 0], &[1, -1]]]).unwrap();
        let w = check(&a);
        let xi = SymReal::symbol("xi1");
        assert_eq!(
            w.action.translations()[0],
            SymVec(vec![xi.clone(), xi.scale(&rat(1, 2))])
        );
    }

    #[test]
    fn case_three() {
        let a = ZpAction::from_i64(&[
            &[&[1, 0, 0], &[1, 1, 0], &[0, 1, 1]],
            &[&[1, 0, 0], &[0, 1, 0], &[1, 0, 1]],
        ])
        .unwrap();
        let w = check(&a);
        assert!(w.certificate.is_complete());
    }

    #[test]
    fn case_two() {
        let a = ZpAction::from_i64(&[
            &[&[1, 0, 0], &[0, 1, 0], &[1, 0, 1]],
            &[&[1, 0, 0], &[0, 1, 0], &[0, 1, 1]],
        ])
        .unwrap();
        let w = check(&a);
        assert!(w.certificate.is_complete());
    }

    #[test]
    fn case_one() {
        let a = ZpAction::from_i64(&[
            &[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]],
            &[&[1, 0, 0], &[0, 1, 0], &[1, 0, 1]],
        ])
        .unwrap();
        check(&a);
    }

    #[test]
    fn rotation_block_lifts() {
        let a = ZpAction::from_i64(&[&[&[1, 0, 0], &[1, 0, -1], &[0, 1, 0]]]).unwrap();
        let w = check(&a);
        let xi = SymReal::symbol("xi1");
        let h = xi.scale(&rat(1, 2));
        assert_eq!(w.action.translations()[0], SymVec(vec![xi, h.clone(), h]));
    }

    #[test]
    fn rejects_large_or_fixed_point_free() {
        let big = ZpAction::new(4, vec![IntMat::identity(4)]).unwrap();
        assert!(matches!(liberate_lowdim(&big), Err(Error::Precondition(_))));
        let hyp = ZpAction::from_i64(&[&[&[2, 1], &[1, 1]]]).unwrap();
        assert!(matches!(liberate_lowdim(&hyp), Err(Error::FixTrivial)));
    }
}
