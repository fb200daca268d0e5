//! Checkable freeness proofs.
//!
//! A certificate is an ordered list of strata `(m, s, f)`. Element `ℓ`
//! belongs to the first stratum whose form `f` is nonzero at `ℓ`; on that
//! stratum `mᵀ(A(ℓ) − I) = 0` and the coefficient of symbol `s` in
//! `⟨m, γ(ℓ)⟩` equals `f·ℓ ≠ 0`, so `⟨m, γ(ℓ)⟩` is irrational and `φ(ℓ)`
//! has no fixed point. When the strata leave a nonzero sublattice uncovered,
//! `residual` is set and those elements fall back to the direct left-kernel
//! test.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::action::{nonzero_box, AffineZpAction};
use crate::linalg::{dot as rdot, kernel_saturated_rat, solve_rational, IntMat, IntVec, Rat, RatMat};
use crate::symbolic::dot;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    #[serde(with = "crate::linalg::vec_json")]
    pub dual: IntVec,
    pub symbol: String,
    #[serde(with = "crate::linalg::vec_json")]
    pub form: Vec<Rat>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessCertificate {
    pub strata: Vec<Stratum>,
    pub residual: bool,
}

impl FreenessCertificate {
    /// Greedy stratification using standard dual vectors and every pool
    /// symbol. Each accepted dual vector is invariant on the current
    /// sublattice, which makes `⟨m, γ(·)⟩` additive there and the form exact.
    pub fn build(action: &AffineZpAction) -> Self {
        let (p, q) = (action.p(), action.q());
        let mut sub: Vec<IntVec> = IntMat::identity(p).to_rows();
        let mut strata = Vec::new();
        let symbols: Vec<String> = action.pool().names().to_vec();
        let duals: Vec<IntVec> = IntMat::identity(q).to_rows();
        loop {
            let mut progress = false;
            for m in &duals {
                if sub.is_empty() {
                    break;
                }
                let invariant = sub.iter().all(|b| {
                    let lhs = action.linear().evaluate(&to_i64(b)).minus_identity();
                    lhs.transpose().mul_vec(m).iter().all(Zero::is_zero)
                });
                if !invariant {
                    continue;
                }
                let values: Vec<_> = sub.iter().map(|b| dot(m, &action.translation_of(&to_i64(b)))).collect();
                for s in &symbols {
                    if sub.is_empty() {
                        break;
                    }
                    let coeffs: Vec<Rat> = values.iter().map(|v| v.coeff(s)).collect();
                    if coeffs.iter().all(Zero::is_zero) {
                        continue;
                    }
                    let basis = IntMat::from_rows(sub.clone()).unwrap().to_rat();
                    let form = solve_rational(&basis, &coeffs)
                        .expect("independent sublattice basis")
                        .particular;
                    strata.push(Stratum {
                        dual: m.clone(),
                        symbol: s.clone(),
                        form,
                    });
                    sub = shrink(&sub, &coeffs);
                    progress = true;
                    break;
                }
            }
            if !progress || sub.is_empty() {
                break;
            }
        }
        FreenessCertificate {
            strata,
            residual: !sub.is_empty(),
        }
    }

    /// True when the strata alone cover every nonzero element.
    pub fn is_complete(&self) -> bool {
        !self.residual
    }

    /// Certificate for the same action written in coordinates `x' = C·x`;
    /// dual vectors transform by `C⁻ᵀ`.
    pub fn conjugated(&self, c_inv: &IntMat) -> Self {
        let t = c_inv.transpose();
        FreenessCertificate {
            strata: self
                .strata
                .iter()
                .map(|s| Stratum {
                    dual: t.mul_vec(&s.dual),
                    ..s.clone()
                })
                .collect(),
            residual: self.residual,
        }
    }

    /// Pads every dual vector with zeros up to dimension `q`.
    pub fn padded(&self, q: usize) -> Self {
        FreenessCertificate {
            strata: self
                .strata
                .iter()
                .map(|s| {
                    let mut dual = s.dual.clone();
                    dual.resize(q, Zero::zero());
                    Stratum { dual, ..s.clone() }
                })
                .collect(),
            residual: self.residual,
        }
    }

    /// Index of the stratum covering `ell`, if any.
    pub fn stratum_of(&self, ell: &[i64]) -> Option<usize> {
        let l: Vec<Rat> = ell.iter().map(|&x| Rat::from_integer(x.into())).collect();
        self.strata.iter().position(|s| !rdot(&s.form, &l).is_zero())
    }

    /// Checks the certificate on every `ℓ ≠ 0` with `‖ℓ‖∞ ≤ bound`.
    pub fn check(&self, action: &AffineZpAction, bound: u32) -> Result<(), String> {
        for ell in nonzero_box(action.p(), bound) {
            self.check_at(action, &ell)?;
        }
        Ok(())
    }

    pub fn check_at(&self, action: &AffineZpAction, ell: &[i64]) -> Result<(), String> {
        let Some(j) = self.stratum_of(ell) else {
            if self.residual && action.fixed_point_test(ell).is_free() {
                return Ok(());
            }
            return Err(format!("{ell:?} is not covered"));
        };
        let s = &self.strata[j];
        let a = action.linear().evaluate(ell).minus_identity();
        if !a.transpose().mul_vec(&s.dual).iter().all(Zero::is_zero) {
            return Err(format!("stratum {j}: dual vector not invariant at {ell:?}"));
        }
        let l: Vec<Rat> = ell.iter().map(|&x| Rat::from_integer(x.into())).collect();
        let stated = rdot(&s.form, &l);
        let actual = dot(&s.dual, &action.translation_of(ell)).coeff(&s.symbol);
        if stated != actual {
            return Err(format!(
                "stratum {j}: coefficient of {} at {ell:?} is {actual}, certificate states {stated}",
                s.symbol
            ));
        }
        Ok(())
    }
}

/// Saturated `{Σ tⱼbⱼ : Σ tⱼcⱼ = 0}` for the basis `b` of a sublattice.
fn shrink(sub: &[IntVec], coeffs: &[Rat]) -> Vec<IntVec> {
    let row = RatMat::from_rows(vec![coeffs.to_vec()]).unwrap();
    let k = kernel_saturated_rat(&row);
    let b = IntMat::from_rows(sub.to_vec()).unwrap();
    k.basis.iter().map(|t| b.transpose().mul_vec(t)).collect()
}

fn to_i64(v: &[num_bigint::BigInt]) -> Vec<i64> {
    crate::action::to_i64(v)
}
