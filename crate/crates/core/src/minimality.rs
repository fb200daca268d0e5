//! Minimality of affine actions through the irrationality condition on the
//! dual fixed lattice, and the classification of minimal free extensions on
//! `T³`.
//!
//! Minimality of an affine action is taken to be equivalent to: for every
//! nonzero `k` in the dual fixed lattice `Γ` there is `ℓ` with
//! `⟨k, γ(ℓ)⟩ ∉ Z`. That equivalence is an external result and is not
//! re-proved here.
//!
//! The condition is decided through `Γ₀`, the elements of `Γ` whose pairing
//! with every generator translation has no symbolic part. For `k ∈ Γ` the map
//! `ℓ ↦ ⟨k, γ(ℓ)⟩` is additive, so only generators matter. If `Γ₀ ≠ 0`, a
//! multiple of a nonzero element of `Γ₀` by the common denominator of the
//! rational parts pairs integrally with everything; if `Γ₀ = 0`, every
//! nonzero `k` sees some symbol and hence an irrational value.

use num_traits::Zero;
use serde::Serialize;

use crate::action::{AffineZpAction, ZpAction};
use crate::decomposition::{unipotent_flag_basis, unipotent_split};
use crate::error::{Error, Result};
use crate::liberation::{liberate_rank, proportionality, Witness};
use crate::linalg::{gcd_all, kernel_saturated_rat, IntMat, IntVec, Lattice, Rat, RatMat};
use crate::symbolic::{dot, SymVec, SymbolPool};

/// `Γ₀ ⊆ Γ`, in coordinates of `Z^q`.
pub fn gamma_zero(affine: &AffineZpAction) -> Lattice {
    let q = affine.q();
    let gamma = affine.linear().dual_fix_set();
    if gamma.is_zero() {
        return gamma;
    }
    let symbols = affine.pool().names();
    let pairings: Vec<Vec<_>> = gamma
        .basis
        .iter()
        .map(|g| affine.translations().iter().map(|t| dot(g, t)).collect())
        .collect();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for i in 0..affine.p() {
        for s in symbols {
            rows.push(pairings.iter().map(|per_gen| per_gen[i].coeff(s)).collect());
        }
    }
    let r = gamma.rank();
    let coeffs = if rows.is_empty() {
        Lattice::full(r)
    } else {
        kernel_saturated_rat(&RatMat::from_rows(rows).unwrap())
    };
    let basis = gamma.basis_matrix();
    let vectors: Vec<IntVec> = coeffs.basis.iter().map(|c| basis.mul_vec(c)).collect();
    Lattice::saturated_span(q, &vectors)
}

pub fn irrationality_check(affine: &AffineZpAction) -> bool {
    gamma_zero(affine).is_zero()
}

/// Same decision as [`irrationality_check`].
pub fn is_minimal(affine: &AffineZpAction) -> bool {
    irrationality_check(affine)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum MinimalClassification {
    NotLiberable,
    LiberableNotMinimal { reason: String },
    MinimalLiberable { case: String, witness: Witness },
    Unknown { reason: String },
}

impl MinimalClassification {
    pub fn label(&self) -> &'static str {
        match self {
            MinimalClassification::NotLiberable => "NotLiberable",
            MinimalClassification::LiberableNotMinimal { .. } => "LiberableNotMinimal",
            MinimalClassification::MinimalLiberable { .. } => "MinimalLiberable",
            MinimalClassification::Unknown { .. } => "Unknown",
        }
    }
}

fn entries(flag: &ZpAction, row: usize, col: usize) -> IntVec {
    flag.gens().iter().map(|g| g[(row, col)].clone()).collect()
}

fn is_zero_vec(v: &[crate::linalg::Int]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn independent(u: &IntVec, v: &IntVec) -> bool {
    IntMat::from_rows(vec![u.clone(), v.clone()]).unwrap().rank() == 2
}

/// Decides whether a unipotent action on `Z³` has a free minimal affine
/// extension, building one when it does.
pub fn classify_minimal_t3(a: &ZpAction) -> Result<MinimalClassification> {
    if a.q() != 3 {
        return Err(Error::Precondition("classification is for actions on Z³".into()));
    }
    if a.fix_set().is_zero() {
        return Ok(MinimalClassification::NotLiberable);
    }
    if !a.is_unipotent() {
        return Ok(MinimalClassification::Unknown {
            reason: "minimality is only classified for unipotent actions".into(),
        });
    }
    let (p_mat, p_inv) = unipotent_flag_basis(a)?;
    let flag = a.conjugate(&p_mat, &p_inv);
    let p = flag.p();
    let mu = entries(&flag, 1, 0);
    let omega = entries(&flag, 2, 0);
    let nu = entries(&flag, 2, 1);
    let mut pool = SymbolPool::new();

    let (case, action) = if is_zero_vec(&nu) {
        if is_zero_vec(&mu) && is_zero_vec(&omega) {
            let split = unipotent_split(&flag)?;
            let rank = liberate_rank(&split)?;
            ("trivial", rank.conjugate(&split.p_inv, &split.p_mat))
        } else if independent(&mu, &omega) {
            return Ok(MinimalClassification::LiberableNotMinimal {
                reason: "μ and ω are linearly independent, which forces α₁ = 0 on the fixed dual direction".into(),
            });
        } else {
            // μ, ω are integer multiples of one primitive λ
            let nonzero = if is_zero_vec(&mu) { &omega } else { &mu };
            let g = gcd_all(nonzero);
            let lambda: IntVec = nonzero.iter().map(|x| x / &g).collect();
            let a_sym = pool.fresh("a");
            let trans = (0..p)
                .map(|j| SymVec(vec![a_sym.scale_int(&lambda[j]), pool.fresh("b"), pool.fresh("eta")]))
                .collect();
            ("I", AffineZpAction::new(flag.clone(), pool, trans)?)
        }
    } else if is_zero_vec(&mu) {
        if independent(&omega, &nu) {
            let a_sym = pool.fresh("a");
            let b_sym = pool.fresh("b");
            let trans = (0..p)
                .map(|j| {
                    SymVec(vec![
                        a_sym.scale_int(&omega[j]),
                        b_sym.scale_int(&nu[j]),
                        pool.fresh("eta"),
                    ])
                })
                .collect();
            ("II", AffineZpAction::new(flag.clone(), pool, trans)?)
        } else {
            let [a_sym, b_sym, c_sym, d_sym] = ["a", "b", "c", "d"].map(|s| pool.declare(s).unwrap());
            let trans = (0..p)
                .map(|j| {
                    SymVec(vec![
                        &c_sym.scale_int(&nu[j]) + &a_sym.scale_int(&omega[j]),
                        &b_sym.scale_int(&nu[j]) + &d_sym.scale_int(&omega[j]),
                        pool.fresh("eta"),
                    ])
                })
                .collect();
            ("II-dependent", AffineZpAction::new(flag.clone(), pool, trans)?)
        }
    } else {
        let (g, r) = proportionality(&mu, &nu)?;
        let c1 = Rat::from_integer(g.clone()).recip();
        let c2 = (Rat::from_integer(g) * r).recip();
        let a_sym = pool.fresh("a");
        let trans = (0..p)
            .map(|j| {
                SymVec(vec![
                    a_sym.scale(&(c1.clone() * Rat::from_integer(mu[j].clone()))),
                    a_sym.scale(&(c2.clone() * Rat::from_integer(omega[j].clone()))),
                    pool.fresh("eta"),
                ])
            })
            .collect();
        ("III", AffineZpAction::new(flag.clone(), pool, trans)?)
    };
    let witness = Witness::new(action).conjugate(&p_inv, &p_mat);
    Ok(MinimalClassification::MinimalLiberable {
        case: case.to_string(),
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liberation::liberate;
    use crate::linalg::int_vec;
    use crate::symbolic::SymReal;

    fn flag(gens: &[[i64; 3]]) -> ZpAction {
        let mats = gens
            .iter()
            .map(|&[mu, omega, nu]| IntMat::from_i64(&[&[1, 0, 0], &[mu, 1, 0], &[omega, nu, 1]]))
            .collect();
        ZpAction::new(3, mats).unwrap()
    }

    fn assert_minimal(c: &MinimalClassification) {
        let MinimalClassification::MinimalLiberable { witness, .. } = c else {
            panic!("expected MinimalLiberable, got {c:?}");
        };
        assert!(witness.action.free_box_check(4).is_none());
        assert!(irrationality_check(&witness.action));
        witness.certificate.check(&witness.action, 4).unwrap();
    }

    #[test]
    fn irrationality_examples() {
        let id = ZpAction::new(2, vec![IntMat::identity(2), IntMat::identity(2)]).unwrap();
        let pool = SymbolPool::from_names(["x1", "x2", "x3", "x4"]).unwrap();
        let s = |n: &str| SymReal::symbol(n);
        let free = AffineZpAction::new(
            id.clone(),
            pool,
            vec![SymVec(vec![s("x1"), s("x2")]), SymVec(vec![s("x3"), s("x4")])],
        )
        .unwrap();
        assert!(irrationality_check(&free) && is_minimal(&free));
        let linear = AffineZpAction::new(id, SymbolPool::new(), vec![SymVec::zeros(2), SymVec::zeros(2)]).unwrap();
        assert!(!irrationality_check(&linear));
    }

    #[test]
    fn case_one_independent() {
        let a = flag(&[[1, 0, 0], [0, 1, 0]]);
        assert_eq!(a.dual_fix_set().basis, vec![int_vec(&[1, 0, 0])]);
        let c = classify_minimal_t3(&a).unwrap();
        assert_eq!(c.label(), "LiberableNotMinimal");
        let w = liberate(&a).witness().unwrap();
        assert!(!irrationality_check(&w.action));
    }

    #[test]
    fn case_one_dependent() {
        assert_minimal(&classify_minimal_t3(&flag(&[[1, 2, 0], [0, 0, 0]])).unwrap());
    }

    #[test]
    fn case_two_both_branches() {
        assert_minimal(&classify_minimal_t3(&flag(&[[0, 0, 1], [0, 1, 0]])).unwrap());
        assert_minimal(&classify_minimal_t3(&flag(&[[0, 1, 1], [0, 2, 2]])).unwrap());
    }

    #[test]
    fn case_three() {
        let a = ZpAction::from_i64(&[
            &[&[1, 0, 0], &[1, 1, 0], &[0, 1, 1]],
            &[&[1, 0, 0], &[0, 1, 0], &[1, 0, 1]],
        ])
        .unwrap();
        assert_minimal(&classify_minimal_t3(&a).unwrap());
    }

    #[test]
    fn trivial_and_rejections() {
        assert_minimal(&classify_minimal_t3(&ZpAction::new(3, vec![IntMat::identity(3)]).unwrap()).unwrap());
        let big = ZpAction::new(2, vec![IntMat::identity(2)]).unwrap();
        assert!(classify_minimal_t3(&big).is_err());
        let neg = ZpAction::from_i64(&[&[&[1, 0, 0], &[0, -1, 0], &[0, 0, -1]]]).unwrap();
        assert_eq!(classify_minimal_t3(&neg).unwrap().label(), "Unknown");
    }
}
