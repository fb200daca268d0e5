//! Deciding whether a linear action has a free affine extension, and
//! building one when it does.

mod certificate;
mod lowdim;
mod obstruction;
mod unipotent;

use serde::Serialize;

use crate::action::{AffineZpAction, ZpAction};
use crate::cohomology::{lift_beta_with, solve_coboundary_rational};
use crate::decomposition::{decompose, Decomposition};
use crate::error::{Error, Result};
use crate::linalg::{solve_diophantine, IntMat, RatMat};
use crate::symbolic::{SymReal, SymVec, SymbolPool};

pub use certificate::{FreenessCertificate, Stratum};
pub use lowdim::liberate_lowdim;
pub(crate) use lowdim::proportionality;
pub use obstruction::{confirm_forcing, detect_obstruction, CommutatorObstruction};
pub use unipotent::{half_dim_test, liberate_p2_unipotent_identity, liberate_rank, rank_polynomial_test};

/// Box radius used to verify constructed actions.
pub const DEFAULT_BOX: u32 = 4;

/// A free affine action together with its freeness certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub action: AffineZpAction,
    pub certificate: FreenessCertificate,
}

impl Witness {
    pub fn new(action: AffineZpAction) -> Self {
        let certificate = FreenessCertificate::build(&action);
        Witness { action, certificate }
    }

    /// The same witness in coordinates `x' = C·x`.
    pub fn conjugate(&self, c: &IntMat, c_inv: &IntMat) -> Self {
        Witness {
            action: self.action.conjugate(c, c_inv),
            certificate: self.certificate.conjugated(c_inv),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    /// The linear action fixes no nonzero integer vector, so every affine
    /// extension has a finite orbit.
    FixTrivial,
    /// Forces a translation to vanish at `ell0`, giving `φ(ell0)` a fixed
    /// point for every affine extension.
    Commutator(CommutatorObstruction),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LiberationResult {
    Liberated {
        action: AffineZpAction,
        certificate: FreenessCertificate,
    },
    NotLiberated {
        obstruction: Obstruction,
    },
    Unknown {
        reason: String,
    },
}

impl LiberationResult {
    pub fn is_liberated(&self) -> bool {
        matches!(self, LiberationResult::Liberated { .. })
    }

    pub fn is_not_liberated(&self) -> bool {
        matches!(self, LiberationResult::NotLiberated { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, LiberationResult::Unknown { .. })
    }

    /// `Some(true)` / `Some(false)` for a decided instance.
    pub fn decision(&self) -> Option<bool> {
        match self {
            LiberationResult::Liberated { .. } => Some(true),
            LiberationResult::NotLiberated { .. } => Some(false),
            LiberationResult::Unknown { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<Witness> {
        match self {
            LiberationResult::Liberated { action, certificate } => Some(Witness {
                action: action.clone(),
                certificate: certificate.clone(),
            }),
            _ => None,
        }
    }

    fn unknown(reason: impl Into<String>) -> Self {
        LiberationResult::Unknown { reason: reason.into() }
    }
}

pub fn liberate(a: &ZpAction) -> LiberationResult {
    liberate_with_box(a, DEFAULT_BOX)
}

/// Full decision procedure; `bound` is both the obstruction search radius
/// and the radius on which witnesses are re-checked.
pub fn liberate_with_box(a: &ZpAction, bound: u32) -> LiberationResult {
    if a.fix_set().is_zero() {
        return LiberationResult::NotLiberated {
            obstruction: Obstruction::FixTrivial,
        };
    }
    let dec = match decompose(a) {
        Ok(d) => d,
        Err(e) => return LiberationResult::unknown(format!("decomposition failed: {e}")),
    };
    match liberate_unipotent(&dec.a1) {
        Ok(Some(w1)) => match lift_witness(&dec, &w1) {
            Ok(w) => verified(w, bound),
            Err(e) => LiberationResult::unknown(format!("lift failed: {e}")),
        },
        Ok(None) => match find_obstruction(&dec.a1, bound) {
            Some(obs) => LiberationResult::NotLiberated {
                obstruction: Obstruction::Commutator(obs),
            },
            None => LiberationResult::unknown(format!(
                "unipotent part of dimension {} with p = {} is outside the decided cases",
                dec.q1,
                dec.p()
            )),
        },
        Err(e) => LiberationResult::unknown(format!("construction failed: {e}")),
    }
}

fn verified(w: Witness, bound: u32) -> LiberationResult {
    match w.certificate.check(&w.action, bound) {
        Ok(()) => LiberationResult::Liberated {
            action: w.action,
            certificate: w.certificate,
        },
        Err(e) => LiberationResult::unknown(format!("constructed action failed verification: {e}")),
    }
}

/// Free affine action over a unipotent action, when one of the known
/// constructions applies.
fn liberate_unipotent(u: &ZpAction) -> Result<Option<Witness>> {
    if u.is_trivial() {
        return translation_witness(u).map(Some);
    }
    if u.p() == 1 {
        return left_kernel_witness(u).map(Some);
    }
    if u.q() <= 3 {
        return liberate_lowdim(u).map(Some);
    }
    let split = crate::decomposition::unipotent_split(u)?;
    if rank_polynomial_test(&split) {
        let w = Witness::new(liberate_rank(&split)?);
        return Ok(Some(w.conjugate(&split.p_inv, &split.p_mat)));
    }
    if split.p() == 2 && split.u1.is_trivial() {
        let w = Witness::new(liberate_p2_unipotent_identity(&split)?);
        return Ok(Some(w.conjugate(&split.p_inv, &split.p_mat)));
    }
    Ok(None)
}

fn find_obstruction(u: &ZpAction, bound: u32) -> Option<CommutatorObstruction> {
    let split = crate::decomposition::unipotent_split(u).ok()?;
    if !split.u1.is_trivial() || split.k != split.n() {
        return None;
    }
    let obs = detect_obstruction(&split, bound).ok()??;
    confirm_forcing(&split, &obs).then_some(obs)
}

/// `α(eᵢ) = (ξᵢ, 0, …, 0)` over a trivial action.
fn translation_witness(u: &ZpAction) -> Result<Witness> {
    if !u.is_trivial() || u.q() == 0 {
        return Err(Error::Precondition(
            "translation construction needs a trivial action on a nonzero lattice".into(),
        ));
    }
    let mut pool = SymbolPool::new();
    let trans = (0..u.p())
        .map(|_| {
            let mut v = SymVec::zeros(u.q());
            v.0[0] = pool.fresh("xi");
            v
        })
        .collect();
    Ok(Witness::new(AffineZpAction::new(u.clone(), pool, trans)?))
}

/// One generator: translate by `ξ·u` where `⟨m, u⟩ = 1` for a primitive
/// invariant dual vector `m`, so `⟨m, γ(n)⟩ = nξ`.
fn left_kernel_witness(a: &ZpAction) -> Result<Witness> {
    if a.p() != 1 {
        return Err(Error::Precondition("left-kernel construction needs p = 1".into()));
    }
    let dual = a.dual_fix_set();
    let m = dual.basis.first().ok_or(Error::FixTrivial)?;
    let row = IntMat::from_rows(vec![m.clone()])?;
    let u = solve_diophantine(&row, &[1.into()]).expect("primitive vector");
    let mut pool = SymbolPool::new();
    let xi = pool.fresh("xi");
    let trans = SymVec(u.iter().map(|c| xi.scale_int(c)).collect());
    let action = AffineZpAction::new(a.clone(), pool, vec![trans])?;
    let mut w = Witness::new(action);
    if w.certificate.residual {
        // standard duals need not be invariant here; m always is
        w.certificate = FreenessCertificate {
            strata: vec![Stratum {
                dual: m.clone(),
                symbol: "xi1".into(),
                form: vec![crate::linalg::rat(1, 1)],
            }],
            residual: false,
        };
    }
    Ok(w)
}

/// Translation construction on the quotient block, lifted to the whole
/// action.
pub fn liberate_translation_identity(dec: &Decomposition) -> Result<AffineZpAction> {
    let w = translation_witness(&dec.a1)?;
    lift_free_action(dec, &w.action)
}

/// Extends a free action on the quotient block to the whole torus, with
/// `β = W₀·α` on the invariant block.
pub fn lift_free_action(dec: &Decomposition, phi1: &AffineZpAction) -> Result<AffineZpAction> {
    if phi1.linear().gens() != dec.a1.gens() {
        return Err(Error::Precondition(
            "linear part differs from the quotient block".into(),
        ));
    }
    let w0: RatMat = solve_coboundary_rational(dec)?.w0;
    let alphas = phi1.translations();
    let betas = lift_beta_with(dec, &w0, alphas)?;
    let gammas: Vec<SymVec> = alphas.iter().zip(&betas).map(|(a, b)| a.concat(b)).collect();
    let block = AffineZpAction::new(dec.block_action(), phi1.pool().clone(), gammas)?;
    Ok(block.conjugate(&dec.p_inv, &dec.p_mat))
}

/// [`lift_free_action`] together with the transported certificate.
pub fn lift_witness(dec: &Decomposition, w1: &Witness) -> Result<Witness> {
    let action = lift_free_action(dec, &w1.action)?;
    let certificate = w1.certificate.padded(dec.q1 + dec.q2).conjugated(&dec.p_mat);
    Ok(Witness { action, certificate })
}

/// Affine action on generators `F·eᵢ` with the given translations, rewritten
/// on the standard generators.
fn rebased(linear: &ZpAction, f: &IntMat, pool: SymbolPool, trans_on_f: Vec<SymVec>) -> Result<AffineZpAction> {
    let on_f = AffineZpAction::new(linear.rebase(f), pool.clone(), trans_on_f)?;
    let back = on_f.rebase(&f.inverse_unimodular()?);
    AffineZpAction::new(linear.clone(), pool, back.translations().to_vec())
}

fn symbol_vec(pool: &mut SymbolPool, prefix: &str, n: usize) -> Vec<SymReal> {
    (0..n).map(|_| pool.fresh(prefix)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn xi(i: usize) -> SymReal {
        SymReal::symbol(format!("xi{i}"))
    }

    #[test]
    fn translation_examples() {
        let one = ZpAction::new(1, vec![IntMat::identity(1)]).unwrap();
        let w = translation_witness(&one).unwrap();
        assert_eq!(w.action.translations()[0], SymVec(vec![xi(1)]));
        assert!(w.certificate.is_complete());

        let two = ZpAction::new(1, vec![IntMat::identity(1), IntMat::identity(1)]).unwrap();
        let w = translation_witness(&two).unwrap();
        assert_eq!(
            w.action.translation_of(&[2, -1]),
            SymVec(vec![&xi(1).scale(&rat(2, 1)) - &xi(2)])
        );
        assert!(w.certificate.check(&w.action, 4).is_ok());
    }

    #[test]
    fn lift_examples() {
        let a = ZpAction::from_i64(&[&[&[1, 0], &[1, -1]]]).unwrap();
        let dec = decompose(&a).unwrap();
        let phi = liberate_translation_identity(&dec).unwrap();
        assert_eq!(phi.translations()[0], SymVec(vec![xi(1), xi(1).scale(&rat(1, 2))]));
        assert!(phi.free_box_check(6).is_none());

        let rot = ZpAction::from_i64(&[&[&[1, 0, 0], &[1, 0, -1], &[0, 1, 0]]]).unwrap();
        let dec = decompose(&rot).unwrap();
        let phi = liberate_translation_identity(&dec).unwrap();
        let h = xi(1).scale(&rat(1, 2));
        assert_eq!(phi.translations()[0], SymVec(vec![xi(1), h.clone(), h]));

        let shear = ZpAction::from_i64(&[&[&[1, 0], &[1, 1]]]).unwrap();
        let dec = decompose(&shear).unwrap();
        assert_eq!(dec.q2, 0);
        let w1 = left_kernel_witness(&dec.a1).unwrap();
        assert_eq!(lift_free_action(&dec, &w1.action).unwrap(), w1.action);
    }

    #[test]
    fn decision_examples() {
        let hyp = ZpAction::from_i64(&[&[&[2, 1], &[1, 1]]]).unwrap();
        assert_eq!(
            liberate(&hyp),
            LiberationResult::NotLiberated {
                obstruction: Obstruction::FixTrivial
            }
        );
        let shear = ZpAction::from_i64(&[&[&[1, 0], &[1, 1]]]).unwrap();
        let r = liberate(&shear);
        assert!(r.is_liberated());
        let w = r.witness().unwrap();
        assert!(w.action.free_box_check(6).is_none());
        assert!(w.certificate.is_complete());
    }

    #[test]
    fn unknown_case() {
        let a = ZpAction::from_i64(&[
            &[&[1, 0, 0, 0], &[1, 1, 0, 0], &[0, 1, 1, 0], &[1, 0, 0, 1]],
            &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[1, 0, 1, 0], &[0, 0, 0, 1]],
        ])
        .unwrap();
        assert!(liberate(&a).is_unknown(), "{:?}", liberate(&a));
    }
}
