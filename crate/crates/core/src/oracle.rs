//! Brute-force cross-checks: exhaustive fixed-point search for rational
//! instances and floating-point orbit simulation.
//!
//! Maps are rebuilt here by composing generator maps and their inverses, so
//! results do not depend on the symbolic cocycle code. Float results are
//! advisory only.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::action::{AffineZpAction, ZpAction};
use crate::error::{Error, Result};
use crate::linalg::{invariant_factors, Int, IntMat, Rat, RatVec};

/// Default limit on the number of grid points visited by
/// [`finite_orbit_search`].
pub const DEFAULT_STATE_CAP: u128 = 4_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum Assignment {
    Exact(BTreeMap<String, Rat>),
    Float(BTreeMap<String, f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Translations {
    Exact(Vec<RatVec>),
    Float(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericAffineAction {
    pub linear: ZpAction,
    pub translations: Translations,
}

pub fn instantiate(affine: &AffineZpAction, assignment: &Assignment) -> Result<NumericAffineAction> {
    let covered = |name: &str| match assignment {
        Assignment::Exact(m) => m.contains_key(name),
        Assignment::Float(m) => m.contains_key(name),
    };
    if let Some(missing) = affine.pool().names().iter().find(|s| !covered(s)) {
        return Err(Error::MissingSymbol(missing.clone()));
    }
    let translations = match assignment {
        Assignment::Exact(m) => Translations::Exact(
            affine
                .translations()
                .iter()
                .map(|t| t.0.iter().map(|x| x.eval_rat(m)).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?,
        ),
        Assignment::Float(m) => Translations::Float(
            affine
                .translations()
                .iter()
                .map(|t| {
                    t.0.iter()
                        .map(|x| {
                            x.terms()
                                .fold(rat_to_f64(x.rational_part()), |acc, (s, c)| acc + rat_to_f64(c) * m[s])
                        })
                        .collect()
                })
                .collect(),
        ),
    };
    Ok(NumericAffineAction {
        linear: affine.linear().clone(),
        translations,
    })
}

fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Generator powers `(i, ±1)` whose product is `ℓ`.
fn steps(ell: &[i64]) -> impl Iterator<Item = (usize, bool)> + '_ {
    ell.iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n((i, c >= 0), c.unsigned_abs() as usize))
}

impl NumericAffineAction {
    pub fn q(&self) -> usize {
        self.linear.q()
    }

    /// Translation part of `φ(ℓ)` in rational mode.
    pub fn exact_translation(&self, ell: &[i64]) -> Result<RatVec> {
        let Translations::Exact(gens) = &self.translations else {
            return Err(Error::Precondition("rational mode required".into()));
        };
        let mut lin = IntMat::identity(self.q());
        let mut t: RatVec = vec![Rat::zero(); self.q()];
        // (L, t) ∘ g with g = (A, γ) or g⁻¹ = (A⁻¹, −A⁻¹γ)
        for (i, forward) in steps(ell) {
            let (a, g) = if forward {
                (self.linear.gen(i).clone(), gens[i].clone())
            } else {
                let inv = self.linear.gen_inverse(i);
                let g: RatVec = inv.to_rat().mul_vec(&gens[i]).into_iter().map(|x| -x).collect();
                (inv.clone(), g)
            };
            let lt = lin.to_rat().mul_vec(&g);
            t = t.iter().zip(lt).map(|(x, y)| x + y).collect();
            lin = lin.mul(&a);
        }
        Ok(t)
    }

    /// Translation part of `φ(ℓ)` in float mode.
    pub fn float_translation(&self, ell: &[i64]) -> Result<Vec<f64>> {
        let Translations::Float(gens) = &self.translations else {
            return Err(Error::Precondition("float mode required".into()));
        };
        let mut lin = IntMat::identity(self.q());
        let mut t = vec![0.0; self.q()];
        for (i, forward) in steps(ell) {
            let (a, g) = if forward {
                (self.linear.gen(i).clone(), gens[i].clone())
            } else {
                let inv = self.linear.gen_inverse(i);
                let g: Vec<f64> = apply_f64(inv, &gens[i]).into_iter().map(|x| -x).collect();
                (inv.clone(), g)
            };
            let lt = apply_f64(&lin, &g);
            t.iter_mut().zip(lt).for_each(|(x, y)| *x += y);
            lin = lin.mul(&a);
        }
        Ok(t)
    }
}

fn apply_f64(m: &IntMat, v: &[f64]) -> Vec<f64> {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| m[(r, c)].to_f64().unwrap_or(f64::NAN) * v[c])
                .sum()
        })
        .collect()
}

fn to_i128(x: &Int) -> Result<i128> {
    x.to_i128()
        .ok_or_else(|| Error::Precondition("entries too large for enumeration".into()))
}

/// Exhaustive search for a fixed point of `φ(ℓ)` on the grid `(1/D)Z^q / Z^q`.
///
/// With `d` the common denominator of the translation of `φ(ℓ)` and `s` the
/// largest nonzero invariant factor of `A(ℓ) − I`, any solvable system
/// `(A(ℓ) − I)x ≡ −t (mod Z^q)` has a solution with denominator dividing
/// `D = d·s`, so the grid is exhaustive for existence.
pub fn finite_orbit_search(action: &NumericAffineAction, ell: &[i64], cap: u128) -> Result<Option<RatVec>> {
    let q = action.q();
    let t = action.exact_translation(ell)?;
    let m = action.linear.evaluate(ell).minus_identity();
    let d = t.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
    let s = invariant_factors(&m)
        .into_iter()
        .filter(|x| !x.is_zero())
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Int::one);
    let denom = to_i128(&(d * s))?;
    let size = (denom as u128).saturating_pow(q as u32);
    if size > cap {
        return Err(Error::StateSpaceExceeded { size, cap });
    }
    let dm: Vec<Vec<i128>> = (0..q)
        .map(|r| (0..q).map(|c| to_i128(&m[(r, c)])).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    // φ(x) − x = (M x + D t) / D with x = X / D
    let dt: Vec<i128> = t
        .iter()
        .map(|x| to_i128(&(x * Rat::from_integer(Int::from(denom))).to_integer()))
        .collect::<Result<_>>()?;
    let mut point = vec![0i128; q];
    loop {
        let fixed = (0..q).all(|r| {
            let v: i128 = (0..q).map(|c| dm[r][c] * point[c]).sum::<i128>() + dt[r];
            v.rem_euclid(denom) == 0
        });
        if fixed {
            return Ok(Some(
                point
                    .iter()
                    .map(|&x| Rat::new(Int::from(x), Int::from(denom)))
                    .collect(),
            ));
        }
        let mut i = 0;
        loop {
            if i == q {
                return Ok(None);
            }
            point[i] += 1;
            if point[i] < denom {
                break;
            }
            point[i] = 0;
            i += 1;
        }
    }
}

fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Torus distance between two points: max over coordinates of the distance
/// to the nearest integer.
pub fn torus_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| dist_to_int(a - b)).fold(0.0, f64::max)
}

/// Minimum over `j ∈ 1..=n` of the torus distance from `φ(ℓ)^j x₀` to `x₀`,
/// with the first `j` attaining it. Returns `(∞, 0)` for `n = 0`.
pub fn orbit_min_return(action: &NumericAffineAction, ell: &[i64], x0: &[f64], n: usize) -> Result<(f64, usize)> {
    let t = action.float_translation(ell)?;
    let m = action.linear.evaluate(ell);
    let mut x = x0.to_vec();
    let mut best = (f64::INFINITY, 0);
    for j in 1..=n {
        x = apply_f64(&m, &x)
            .into_iter()
            .zip(&t)
            .map(|(a, b)| (a + b).rem_euclid(1.0))
            .collect();
        let d = torus_distance(&x, x0);
        if d < best.0 {
            best = (d, j);
        }
    }
    Ok(best)
}

/// Orbit points `φ(ℓ)^j x₀` for `j = 0..n`, reduced to `[0, 1)^q`.
pub fn orbit_points(action: &NumericAffineAction, ell: &[i64], x0: &[f64], n: usize) -> Result<Vec<Vec<f64>>> {
    let t = action.float_translation(ell)?;
    let m = action.linear.evaluate(ell);
    let mut x: Vec<f64> = x0.iter().map(|v| v.rem_euclid(1.0)).collect();
    let mut out = vec![x.clone()];
    for _ in 1..n {
        x = apply_f64(&m, &x)
            .into_iter()
            .zip(&t)
            .map(|(a, b)| (a + b).rem_euclid(1.0))
            .collect();
        out.push(x.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;
    use crate::symbolic::{SymReal, SymVec, SymbolPool};

    fn rotation() -> AffineZpAction {
        let linear = ZpAction::new(1, vec![IntMat::identity(1)]).unwrap();
        let pool = SymbolPool::from_names(["xi1"]).unwrap();
        AffineZpAction::new(linear, pool, vec![SymVec(vec![SymReal::symbol("xi1")])]).unwrap()
    }

    fn exact(pairs: &[(&str, Rat)]) -> Assignment {
        Assignment::Exact(pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())
    }

    fn float(pairs: &[(&str, f64)]) -> Assignment {
        Assignment::Float(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }

    #[test]
    fn instantiation() {
        let n = instantiate(&rotation(), &exact(&[("xi1", rat(1, 3))])).unwrap();
        assert_eq!(n.translations, Translations::Exact(vec![vec![rat(1, 3)]]));
        let f = instantiate(&rotation(), &float(&[("xi1", 0.7390851332)])).unwrap();
        assert_eq!(f.translations, Translations::Float(vec![vec![0.7390851332]]));
        assert!(matches!(
            instantiate(&rotation(), &exact(&[])),
            Err(Error::MissingSymbol(s)) if s == "xi1"
        ));
    }

    #[test]
    fn rational_rotations() {
        let half = instantiate(&rotation(), &exact(&[("xi1", rat(1, 2))])).unwrap();
        assert!(finite_orbit_search(&half, &[2], DEFAULT_STATE_CAP).unwrap().is_some());
        assert!(finite_orbit_search(&half, &[1], DEFAULT_STATE_CAP).unwrap().is_none());
        let third = instantiate(&rotation(), &exact(&[("xi1", rat(1, 3))])).unwrap();
        assert!(finite_orbit_search(&third, &[1], DEFAULT_STATE_CAP).unwrap().is_none());
        assert!(finite_orbit_search(&third, &[-3], DEFAULT_STATE_CAP).unwrap().is_some());
    }

    #[test]
    fn reflection_needs_finer_grid() {
        // x ↦ −x + 1/2 fixes 1/4, which is off the grid (1/2)Z
        let linear = ZpAction::from_i64(&[&[&[-1]]]).unwrap();
        let affine = AffineZpAction::new(linear, SymbolPool::new(), vec![SymVec::from_rats(&[rat(1, 2)])]).unwrap();
        let n = instantiate(&affine, &exact(&[])).unwrap();
        let x = finite_orbit_search(&n, &[1], DEFAULT_STATE_CAP).unwrap().unwrap();
        assert_eq!(x, vec![rat(1, 4)]);
    }

    #[test]
    fn cap_is_enforced() {
        let half = instantiate(&rotation(), &exact(&[("xi1", rat(1, 7))])).unwrap();
        assert!(matches!(
            finite_orbit_search(&half, &[1], 3),
            Err(Error::StateSpaceExceeded { size: 7, cap: 3 })
        ));
    }

    #[test]
    fn orbit_returns() {
        let half = instantiate(&rotation(), &float(&[("xi1", 0.5)])).unwrap();
        assert_eq!(orbit_min_return(&half, &[1], &[0.25], 10).unwrap(), (0.0, 2));
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let g = instantiate(&rotation(), &float(&[("xi1", golden)])).unwrap();
        let (d, _) = orbit_min_return(&g, &[1], &[0.0], 10_000).unwrap();
        assert!(d > 1e-5, "{d}");
        let id = instantiate(&rotation(), &float(&[("xi1", 0.0)])).unwrap();
        assert_eq!(orbit_min_return(&id, &[1], &[0.3], 5).unwrap(), (0.0, 1));
    }

    #[test]
    fn orbit_points_wrap() {
        let r = instantiate(&rotation(), &float(&[("xi1", 0.75)])).unwrap();
        let pts = orbit_points(&r, &[1], &[0.5], 3).unwrap();
        assert_eq!(pts, vec![vec![0.5], vec![0.25], vec![0.0]]);
    }
}
