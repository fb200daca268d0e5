//! Constructions over a unipotent action split along its fixed lattice.

use num_integer::Integer;

use crate::action::{nonzero_box, AffineZpAction};
use crate::decomposition::UnipotentSplit;
use crate::error::{Error, Result};
use crate::linalg::{ext_gcd, int, IntMat, RatMat};
use crate::symbolic::{apply_rat, SymVec, SymbolPool};

use super::{rebased, symbol_vec};

/// Grid `{0..=d}^p` in lexicographic order.
pub(crate) fn grid(p: usize, d: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..p {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=d).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// True when `V(ℓ)` has rank below `k` for every `ℓ`.
///
/// Entries of `V(ℓ)` are polynomials of degree at most `q − 1` in each
/// coordinate of `ℓ`, so a `k × k` minor has degree at most `k(q − 1)` per
/// coordinate and vanishes identically iff it vanishes on that grid.
pub fn rank_polynomial_test(split: &UnipotentSplit) -> bool {
    let (k, n, q) = (split.k, split.n(), split.q());
    if n < k {
        return true;
    }
    let d = (k * (q - 1)) as i64;
    grid(split.p(), d).iter().all(|ell| split.v_at(ell).rank() < k)
}

/// `2k > q`, which forces the rank test to pass.
pub fn half_dim_test(split: &UnipotentSplit) -> bool {
    2 * split.k > split.q()
}

/// Translations supported on the fixed block, `γ(eⱼ) = (0, Ξ·eⱼ)` for a
/// `k × p` matrix `Ξ` of fresh symbols. Output is in split coordinates.
pub fn liberate_rank(split: &UnipotentSplit) -> Result<AffineZpAction> {
    if !rank_polynomial_test(split) {
        return Err(Error::Precondition(
            "V(ℓ) reaches full rank, so the fixed-block construction does not apply".into(),
        ));
    }
    let (k, n, p) = (split.k, split.n(), split.p());
    let mut pool = SymbolPool::new();
    let names: Vec<Vec<String>> = (1..=k)
        .map(|i| (1..=p).map(|j| format!("xi{i}_{j}")).collect())
        .collect();
    for row in &names {
        for name in row {
            pool.declare(name.clone())?;
        }
    }
    let trans = (0..p)
        .map(|j| {
            let mut v = SymVec::zeros(n + k);
            for (i, row) in names.iter().enumerate() {
                v.0[n + i] = crate::symbolic::SymReal::symbol(row[j].clone());
            }
            v
        })
        .collect();
    AffineZpAction::new(split.block_action(), pool, trans)
}

/// Two generators with trivial quotient action. Picks `f₁` with
/// `rank V(f₁) = k`, completes it to a basis `(f₁, f₂)`, and sets
/// `α(f₂) = R·V(f₂)·α(f₁)` for a right inverse `R` of `V(f₁)`, with fresh
/// symbols in `α(f₁)` and in the first entry of each `β(fᵢ)`.
pub fn liberate_p2_unipotent_identity(split: &UnipotentSplit) -> Result<AffineZpAction> {
    if split.p() != 2 || !split.u1.is_trivial() {
        return Err(Error::Precondition("needs p = 2 and a trivial quotient action".into()));
    }
    if rank_polynomial_test(split) {
        return liberate_rank(split);
    }
    let (k, n, q) = (split.k, split.n(), split.q());
    let d = (k * (q - 1)) as u32;
    let f1 = nonzero_box(2, d)
        .into_iter()
        .find(|f| int(f[0]).gcd(&int(f[1])) == int(1) && split.v_at(f).rank() == k)
        .ok_or_else(|| Error::Precondition("no full-rank direction on the search grid".into()))?;
    let (_, x, y) = ext_gcd(&int(f1[0]), &int(f1[1]));
    let f = IntMat::from_rows(vec![vec![int(f1[0]), -y], vec![int(f1[1]), x]])?;
    let f2: Vec<i64> = crate::action::to_i64(&f.col(1));
    let v1 = split.v_at(&f1).to_rat();
    let v2 = split.v_at(&f2).to_rat();
    let gram = v1.mul(&v1.transpose());
    let right_inv: RatMat = v1.transpose().mul(&gram.inverse().expect("full row rank"));

    let mut pool = SymbolPool::new();
    let alpha1 = SymVec(symbol_vec(&mut pool, "xi", n));
    let alpha2 = apply_rat(&right_inv.mul(&v2), &alpha1);
    let etas = symbol_vec(&mut pool, "eta", 2);
    let beta = |i: usize| {
        let mut b = SymVec::zeros(k);
        b.0[0] = etas[i].clone();
        b
    };
    let trans_on_f = vec![alpha1.concat(&beta(0)), alpha2.concat(&beta(1))];
    rebased(&split.block_action(), &f, pool, trans_on_f)
}
