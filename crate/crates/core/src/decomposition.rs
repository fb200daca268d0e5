//! Block forms of a `Z^p`-action: the split into a unipotent quotient and a
//! fixed-point-free invariant part, and the split of a unipotent action over
//! its fixed lattice.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::action::ZpAction;
use crate::error::{Error, Result};
use crate::linalg::{complete_to_unimodular, kernel_saturated, IntMat, Lattice};

/// `P·A(eᵢ)·P⁻¹ = [[A₁(eᵢ), 0], [V(eᵢ), A₂(eᵢ)]]` with `A₁` unipotent and
/// `A₂` without nonzero fixed vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub p_mat: IntMat,
    pub p_inv: IntMat,
    pub q1: usize,
    pub q2: usize,
    pub a1: ZpAction,
    pub a2: ZpAction,
    pub v_gens: Vec<IntMat>,
}

impl Decomposition {
    pub fn p(&self) -> usize {
        self.a1.p()
    }

    /// Conjugated generators `P·A(eᵢ)·P⁻¹`.
    pub fn block_gens(&self) -> Vec<IntMat> {
        (0..self.p())
            .map(|i| {
                IntMat::from_blocks(
                    self.a1.gen(i),
                    &IntMat::zeros(self.q1, self.q2),
                    &self.v_gens[i],
                    self.a2.gen(i),
                )
            })
            .collect()
    }

    pub fn block_action(&self) -> ZpAction {
        ZpAction::new(self.q1 + self.q2, self.block_gens()).expect("block action")
    }
}

/// `W`, the joint generalized 1-eigenlattice, and `L₂`, the saturated sum of
/// the images of `(A(eᵢ) − I)^q`.
///
/// For one matrix these are the two halves of its Fitting decomposition. A
/// commuting family preserves each member's halves, so splitting one
/// generator at a time and intersecting gives the joint kernel on one side
/// and the sum of the images on the other.
pub fn fitting_split(action: &ZpAction) -> (Lattice, Lattice) {
    let q = action.q();
    let powers: Vec<IntMat> = action.gens().iter().map(|g| g.minus_identity().pow(q as u32)).collect();
    let w = kernel_saturated(&IntMat::vstack(&powers, q));
    let image_cols: Vec<_> = powers
        .iter()
        .flat_map(|m| (0..q).map(|j| m.col(j)).collect::<Vec<_>>())
        .filter(|c| c.iter().any(|x| !x.is_zero()))
        .collect();
    let l2 = Lattice::saturated_span(q, &image_cols);
    (w, l2)
}

pub fn decompose(action: &ZpAction) -> Result<Decomposition> {
    if action.fix_set().is_zero() {
        return Err(Error::FixTrivial);
    }
    let (_, l2) = fitting_split(action);
    let q = action.q();
    let q2 = l2.rank();
    let q1 = q - q2;
    let p_inv = complete_to_unimodular(&l2)?;
    let p_mat = p_inv.inverse_unimodular()?;
    let blocks: Vec<IntMat> = action.gens().iter().map(|g| p_mat.mul(g).mul(&p_inv)).collect();
    debug_assert!(blocks.iter().all(|b| b.block(0, q1, q1, q).is_zero()));
    let a1 = ZpAction::new(q1, blocks.iter().map(|b| b.block(0, q1, 0, q1)).collect())?;
    let a2 = ZpAction::new(q2, blocks.iter().map(|b| b.block(q1, q, q1, q)).collect())?;
    let v_gens = blocks.iter().map(|b| b.block(q1, q, 0, q1)).collect();
    Ok(Decomposition {
        p_mat,
        p_inv,
        q1,
        q2,
        a1,
        a2,
        v_gens,
    })
}

/// `P·U(eᵢ)·P⁻¹ = [[U₁(eᵢ), 0], [V(eᵢ), I_k]]` where the last `k`
/// coordinates span the fixed lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnipotentSplit {
    pub p_mat: IntMat,
    pub p_inv: IntMat,
    pub k: usize,
    pub u1: ZpAction,
    pub v_gens: Vec<IntMat>,
}

impl UnipotentSplit {
    pub fn p(&self) -> usize {
        self.u1.p()
    }

    pub fn q(&self) -> usize {
        self.u1.q() + self.k
    }

    /// Quotient dimension `q − k`.
    pub fn n(&self) -> usize {
        self.u1.q()
    }

    /// `V(ℓ)`, the lower-left block of the conjugated `U(ℓ)`.
    pub fn v_at(&self, ell: &[i64]) -> IntMat {
        let n = self.n();
        let mut lin = IntMat::identity(self.q());
        for (i, &e) in ell.iter().enumerate() {
            let g = self.block_gen(i);
            let m = if e >= 0 {
                g.pow(e as u32)
            } else {
                g.inverse_unimodular().expect("unimodular").pow(e.unsigned_abs() as u32)
            };
            lin = lin.mul(&m);
        }
        lin.block(n, self.q(), 0, n)
    }

    pub fn block_gen(&self, i: usize) -> IntMat {
        IntMat::from_blocks(
            self.u1.gen(i),
            &IntMat::zeros(self.n(), self.k),
            &self.v_gens[i],
            &IntMat::identity(self.k),
        )
    }

    pub fn block_action(&self) -> ZpAction {
        ZpAction::new(self.q(), (0..self.p()).map(|i| self.block_gen(i)).collect()).expect("block action")
    }
}

pub fn unipotent_split(action: &ZpAction) -> Result<UnipotentSplit> {
    if !action.is_unipotent() {
        return Err(Error::NotUnipotent);
    }
    let q = action.q();
    let fix = action.fix_set();
    let k = fix.rank();
    let n = q - k;
    let p_inv = complete_to_unimodular(&fix)?;
    let p_mat = p_inv.inverse_unimodular()?;
    let blocks: Vec<IntMat> = action.gens().iter().map(|g| p_mat.mul(g).mul(&p_inv)).collect();
    let u1 = ZpAction::new(n, blocks.iter().map(|b| b.block(0, n, 0, n)).collect())?;
    let v_gens = blocks.iter().map(|b| b.block(n, q, 0, n)).collect();
    Ok(UnipotentSplit {
        p_mat,
        p_inv,
        k,
        u1,
        v_gens,
    })
}

/// Basis change `P` making every generator of a unipotent action lower
/// unitriangular, with the fixed lattice spanned by the last coordinates.
pub fn unipotent_flag_basis(action: &ZpAction) -> Result<(IntMat, IntMat)> {
    let split = unipotent_split(action)?;
    if split.n() == 0 {
        return Ok((split.p_mat, split.p_inv));
    }
    let (p1, p1_inv) = unipotent_flag_basis(&split.u1)?;
    let lift = |m: &IntMat| {
        IntMat::from_blocks(
            m,
            &IntMat::zeros(split.n(), split.k),
            &IntMat::zeros(split.k, split.n()),
            &IntMat::identity(split.k),
        )
    };
    let p_mat = lift(&p1).mul(&split.p_mat);
    let p_inv = split.p_inv.mul(&lift(&p1_inv));
    Ok((p_mat, p_inv))
}

/// A failed invariant of a [`Decomposition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecompositionViolation {
    Unimodular,
    Block,
    Cocycle,
    Unipotent,
    FixedPointFree,
}

impl DecompositionViolation {
    pub fn name(self) -> &'static str {
        match self {
            DecompositionViolation::Unimodular => "unimodular",
            DecompositionViolation::Block => "block",
            DecompositionViolation::Cocycle => "cocycle",
            DecompositionViolation::Unipotent => "unipotent",
            DecompositionViolation::FixedPointFree => "fixed-point-free",
        }
    }
}

impl fmt::Display for DecompositionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Re-checks every invariant of `dec` against `action`.
pub fn verify_decomposition(action: &ZpAction, dec: &Decomposition) -> Vec<DecompositionViolation> {
    let mut out = Vec::new();
    let q = action.q();
    let shapes_ok = dec.q1 + dec.q2 == q
        && dec.p_mat.rows() == q
        && dec.p_inv.rows() == q
        && dec.a1.q() == dec.q1
        && dec.a2.q() == dec.q2
        && dec.a1.p() == action.p()
        && dec.a2.p() == action.p()
        && dec.v_gens.len() == action.p()
        && dec.v_gens.iter().all(|v| v.rows() == dec.q2 && v.cols() == dec.q1);
    if !shapes_ok {
        out.push(DecompositionViolation::Block);
        return out;
    }
    if !dec.p_mat.is_unimodular() || !dec.p_mat.mul(&dec.p_inv).is_identity() {
        out.push(DecompositionViolation::Unimodular);
    }
    let blocks = dec.block_gens();
    let round_trip = action
        .gens()
        .iter()
        .zip(&blocks)
        .all(|(g, b)| &dec.p_mat.mul(g).mul(&dec.p_inv) == b);
    if !round_trip {
        out.push(DecompositionViolation::Block);
    }
    let p = action.p();
    let cocycle = (0..p).all(|i| {
        (i + 1..p).all(|j| {
            let lhs = dec.v_gens[i].mul(dec.a1.gen(j)).add(&dec.a2.gen(i).mul(&dec.v_gens[j]));
            let rhs = dec.v_gens[j].mul(dec.a1.gen(i)).add(&dec.a2.gen(j).mul(&dec.v_gens[i]));
            lhs == rhs
        })
    });
    if !cocycle {
        out.push(DecompositionViolation::Cocycle);
    }
    if !dec.a1.is_unipotent() {
        out.push(DecompositionViolation::Unipotent);
    }
    if !dec.a2.fix_set().is_zero() {
        out.push(DecompositionViolation::FixedPointFree);
    }
    out
}
