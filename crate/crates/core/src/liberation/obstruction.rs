//! Commutator obstructions for unipotent actions `[[I, 0], [V, I]]` with a
//! square block `V`, where `V(ℓ) = Σ ℓᵢ V(eᵢ)`.
//!
//! If `V(ℓ₀)` is invertible and
//! `C = V(ℓ₁)V(ℓ₀)⁻¹V(ℓ₂) − V(ℓ₂)V(ℓ₀)⁻¹V(ℓ₁)` is invertible, the relations
//! `V(ℓ)α(ℓ′) = V(ℓ′)α(ℓ)` force `α(ℓ₀) = 0`, and then `φ(ℓ₀)` fixes
//! `(x, −V(ℓ₀)⁻¹β(ℓ₀))` for every affine extension.

use num_traits::Zero;
use serde::Serialize;

use crate::action::nonzero_box;
use crate::decomposition::UnipotentSplit;
use crate::error::{Error, Result};
use crate::linalg::{solve_rational, IntMat, Rat, RatMat};

use super::unipotent::grid;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutatorObstruction {
    pub ell0: Vec<i64>,
    pub ell1: Vec<i64>,
    pub ell2: Vec<i64>,
    pub commutator: RatMat,
}

fn v_linear(split: &UnipotentSplit, ell: &[i64]) -> RatMat {
    let (k, n) = (split.k, split.n());
    ell.iter().zip(&split.v_gens).fold(RatMat::zeros(k, n), |acc, (&c, v)| {
        acc.add(&v.to_rat().scale(&Rat::from_integer(c.into())))
    })
}

fn is_invertible(m: &RatMat) -> bool {
    m.inverse().is_some()
}

/// Searches `ℓ₀, ℓ₁, ℓ₂` in the box, in the canonical box order.
pub fn detect_obstruction(split: &UnipotentSplit, bound: u32) -> Result<Option<CommutatorObstruction>> {
    if !split.u1.is_trivial() || split.k != split.n() {
        return Err(Error::Precondition(
            "obstruction search needs a trivial quotient action and a square V block".into(),
        ));
    }
    let p = split.p();
    let k = split.k;
    let elements = nonzero_box(p, bound);
    let gens: Vec<RatMat> = split.v_gens.iter().map(IntMat::to_rat).collect();
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|a| (a + 1..p).map(move |b| (a, b))).collect();
    for ell0 in &elements {
        let Some(v0_inv) = v_linear(split, ell0).inverse() else {
            continue;
        };
        // C(x, y) = Σ_{a<b} (x_a y_b − x_b y_a) C_ab
        let parts: Vec<RatMat> = pairs
            .iter()
            .map(|&(a, b)| {
                gens[a]
                    .mul(&v0_inv)
                    .mul(&gens[b])
                    .sub(&gens[b].mul(&v0_inv).mul(&gens[a]))
            })
            .collect();
        if parts.iter().all(RatMat::is_zero) {
            continue;
        }
        let commutator = |x: &[i64], y: &[i64]| {
            pairs.iter().zip(&parts).fold(RatMat::zeros(k, k), |acc, (&(a, b), c)| {
                let w = x[a] * y[b] - x[b] * y[a];
                if w == 0 {
                    acc
                } else {
                    acc.add(&c.scale(&Rat::from_integer(w.into())))
                }
            })
        };
        // det C is a polynomial of degree ≤ k per coordinate
        let pts = grid(2 * p, k as i64);
        if !pts.iter().any(|z| is_invertible(&commutator(&z[..p], &z[p..]))) {
            continue;
        }
        for (i, ell1) in elements.iter().enumerate() {
            for ell2 in &elements[i + 1..] {
                let c = commutator(ell1, ell2);
                if is_invertible(&c) {
                    return Ok(Some(CommutatorObstruction {
                        ell0: ell0.clone(),
                        ell1: ell1.clone(),
                        ell2: ell2.clone(),
                        commutator: c,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Independently solves `V(ℓ)α(ℓ′) = V(ℓ′)α(ℓ)` for additive `α` (over the
/// generator pairs and the obstruction triple) and checks that every
/// solution vanishes at `ℓ₀`.
pub fn confirm_forcing(split: &UnipotentSplit, obs: &CommutatorObstruction) -> bool {
    if !split.u1.is_trivial() || split.k != split.n() {
        return false;
    }
    let (p, n) = (split.p(), split.n());
    let mut elems: Vec<Vec<i64>> = (0..p)
        .map(|i| {
            let mut e = vec![0; p];
            e[i] = 1;
            e
        })
        .collect();
    elems.extend([obs.ell0.clone(), obs.ell1.clone(), obs.ell2.clone()]);
    let as_row =
        |ell: &[i64]| RatMat::from_rows(vec![ell.iter().map(|&x| Rat::from_integer(x.into())).collect()]).unwrap();
    let mut blocks = Vec::new();
    for i in 0..elems.len() {
        for j in i + 1..elems.len() {
            let (l, lp) = (&elems[i], &elems[j]);
            // vec(V(ℓ)·X·ℓ′) = (ℓ′ᵀ ⊗ V(ℓ))·vec X
            let lhs = as_row(lp).kron(&v_linear(split, l));
            let rhs = as_row(l).kron(&v_linear(split, lp));
            blocks.push(lhs.sub(&rhs));
        }
    }
    let system = RatMat::vstack(&blocks, n * p);
    let zero = vec![Rat::zero(); system.rows()];
    let Some(sol) = solve_rational(&system, &zero) else {
        return false;
    };
    let eval = as_row(&obs.ell0).kron(&RatMat::identity(n));
    sol.nullspace.iter().all(|v| eval.mul_vec(v).iter().all(Zero::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::ZpAction;
    use crate::decomposition::unipotent_split;

    fn split(vs: &[&[&[i64]]]) -> UnipotentSplit {
        let k = vs[0].len();
        let gens = vs
            .iter()
            .map(|v| {
                IntMat::from_blocks(
                    &IntMat::identity(k),
                    &IntMat::zeros(k, k),
                    &IntMat::from_i64(v),
                    &IntMat::identity(k),
                )
            })
            .collect();
        unipotent_split(&ZpAction::new(2 * k, gens).unwrap()).unwrap()
    }

    fn example() -> UnipotentSplit {
        split(&[&[&[1, 0], &[0, 1]], &[&[0, 1], &[0, 0]], &[&[0, 0], &[1, 0]]])
    }

    #[test]
    fn finds_the_standard_triple() {
        let s = example();
        let obs = detect_obstruction(&s, 2).unwrap().unwrap();
        assert_eq!(
            (obs.ell0.as_slice(), obs.ell1.as_slice(), obs.ell2.as_slice()),
            (&[1, 0, 0][..], &[0, 1, 0][..], &[0, 0, 1][..])
        );
        assert_eq!(obs.commutator, IntMat::from_i64(&[&[1, 0], &[0, -1]]).to_rat());
        assert!(confirm_forcing(&s, &obs));
    }

    #[test]
    fn two_generators_have_none() {
        let s = split(&[&[&[1, 0], &[0, 1]], &[&[0, 1], &[1, 0]]]);
        assert!(detect_obstruction(&s, 3).unwrap().is_none());
        let s = split(&[&[&[1, 0], &[0, 1]], &[&[1, 1], &[0, 2]]]);
        assert!(detect_obstruction(&s, 3).unwrap().is_none());
    }

    #[test]
    fn diagonal_blocks_have_none() {
        let s = split(&[&[&[1, 0], &[0, 1]], &[&[2, 0], &[0, 0]], &[&[0, 0], &[0, 3]]]);
        assert!(detect_obstruction(&s, 2).unwrap().is_none());
    }

    #[test]
    fn perturbed_data_fails_confirmation() {
        let s = split(&[&[&[1, 0], &[0, 1]], &[&[0, 1], &[0, 0]], &[&[0, 0], &[0, 0]]]);
        let fake = CommutatorObstruction {
            ell0: vec![1, 0, 0],
            ell1: vec![0, 1, 0],
            ell2: vec![0, 0, 1],
            commutator: RatMat::identity(2),
        };
        assert!(!confirm_forcing(&s, &fake));
    }

    #[test]
    fn rejects_non_square_blocks() {
        let shear = unipotent_split(&ZpAction::from_i64(&[&[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]]]).unwrap()).unwrap();
        assert!(detect_obstruction(&shear, 1).is_err());
    }
}
