//! Linear `Z^p`-actions on `Z^q` and affine `Z^p`-actions on `T^q`.

use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result, Violation};
use crate::linalg::{kernel_saturated, rref_transform, solve_diophantine, IntMat, IntVec, Lattice};
use crate::symbolic::{apply_int, apply_rat, dot, SymVec, SymbolPool};

/// Commuting unimodular matrices `A(e₁), …, A(e_p)` acting on `Z^q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZpAction {
    q: usize,
    gens: Vec<IntMat>,
    inverses: Vec<IntMat>,
}

impl ZpAction {
    /// Lists everything wrong with a candidate generator set.
    pub fn check(q: usize, gens: &[IntMat]) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            if g.rows() != q || g.cols() != q {
                out.push(Violation::Dimension {
                    detail: format!("generator {i} is {}x{}, expected {q}x{q}", g.rows(), g.cols()),
                });
            } else if !g.is_unimodular() {
                out.push(Violation::NotUnimodular { generator: i });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if gens[i].mul(&gens[j]) != gens[j].mul(&gens[i]) {
                    out.push(Violation::NonCommuting { i, j });
                }
            }
        }
        out
    }

    pub fn new(q: usize, gens: Vec<IntMat>) -> Result<Self> {
        let v = Self::check(q, &gens);
        if !v.is_empty() {
            return Err(Error::Validation(v));
        }
        let inverses = gens.iter().map(IntMat::inverse_unimodular).collect::<Result<_>>()?;
        Ok(ZpAction { q, gens, inverses })
    }

    pub fn from_i64(gens: &[&[&[i64]]]) -> Result<Self> {
        let gens: Vec<IntMat> = gens.iter().map(|g| IntMat::from_i64(g)).collect();
        let q = gens.first().map_or(0, IntMat::rows);
        Self::new(q, gens)
    }

    pub fn p(&self) -> usize {
        self.gens.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn gens(&self) -> &[IntMat] {
        &self.gens
    }

    pub fn gen(&self, i: usize) -> &IntMat {
        &self.gens[i]
    }

    pub fn gen_inverse(&self, i: usize) -> &IntMat {
        &self.inverses[i]
    }

    /// `A(ℓ) = Π A(eᵢ)^{ℓᵢ}`.
    pub fn evaluate(&self, ell: &[i64]) -> IntMat {
        assert_eq!(ell.len(), self.p(), "exponent vector length");
        let mut acc = IntMat::identity(self.q);
        for (i, &n) in ell.iter().enumerate() {
            let base = if n >= 0 { &self.gens[i] } else { &self.inverses[i] };
            acc = acc.mul(&base.pow(n.unsigned_abs() as u32));
        }
        acc
    }

    /// Common fixed lattice `∩ ker(A(eᵢ) − I)`.
    pub fn fix_set(&self) -> Lattice {
        let stacked = IntMat::vstack(
            &self.gens.iter().map(IntMat::minus_identity).collect::<Vec<_>>(),
            self.q,
        );
        kernel_saturated(&stacked)
    }

    /// Common fixed lattice of the transposed action.
    pub fn dual_fix_set(&self) -> Lattice {
        let stacked = IntMat::vstack(
            &self
                .gens
                .iter()
                .map(|g| g.transpose().minus_identity())
                .collect::<Vec<_>>(),
            self.q,
        );
        kernel_saturated(&stacked)
    }

    pub fn is_unipotent(&self) -> bool {
        self.gens
            .iter()
            .all(|g| g.minus_identity().pow(self.q as u32).is_zero())
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.iter().all(IntMat::is_identity)
    }

    /// The action in coordinates `x' = P·x`, i.e. generators `P·A·P⁻¹`.
    pub fn conjugate(&self, p: &IntMat, p_inv: &IntMat) -> ZpAction {
        let gens = self.gens.iter().map(|g| p.mul(g).mul(p_inv)).collect();
        ZpAction::new(self.q, gens).expect("conjugate of a valid action")
    }

    /// Action of `Z^p` through the generators `F·eᵢ` for the columns of a
    /// unimodular `F`.
    pub fn rebase(&self, f: &IntMat) -> ZpAction {
        let gens = (0..self.p()).map(|j| self.evaluate(&to_i64(&f.col(j)))).collect();
        ZpAction::new(self.q, gens).expect("rebased action")
    }
}

pub(crate) fn to_i64(v: &[num_bigint::BigInt]) -> Vec<i64> {
    use num_traits::ToPrimitive;
    v.iter().map(|x| x.to_i64().expect("exponent fits in i64")).collect()
}

#[derive(Serialize, Deserialize)]
struct LinearDoc {
    p: usize,
    q: usize,
    generators: Vec<IntMat>,
}

impl Serialize for ZpAction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LinearDoc {
            p: self.p(),
            q: self.q,
            generators: self.gens.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZpAction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = LinearDoc::deserialize(d)?;
        if doc.generators.len() != doc.p {
            return Err(D::Error::custom(format!(
                "p = {} but {} generators given",
                doc.p,
                doc.generators.len()
            )));
        }
        ZpAction::new(doc.q, doc.generators).map_err(D::Error::custom)
    }
}

/// Affine action `φ(ℓ)(x) = A(ℓ)x + γ(ℓ) mod Z^q` given by its generator
/// translations `γ(eᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineZpAction {
    linear: ZpAction,
    pool: SymbolPool,
    trans: Vec<SymVec>,
}

/// Outcome of testing a single group element for fixed points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FixedPointReport {
    /// `A(ℓ)·point + γ(ℓ) = point + shift`.
    HasFixedPoint {
        ell: Vec<i64>,
        point: SymVec,
        #[serde(with = "crate::linalg::vec_json")]
        shift: IntVec,
    },
    /// `mᵀ(A(ℓ) − I) = 0` while `⟨m, γ(ℓ)⟩` is not an integer.
    FreeAt {
        ell: Vec<i64>,
        #[serde(with = "crate::linalg::vec_json")]
        dual: IntVec,
    },
}

impl FixedPointReport {
    pub fn is_free(&self) -> bool {
        matches!(self, FixedPointReport::FreeAt { .. })
    }

    pub fn ell(&self) -> &[i64] {
        match self {
            FixedPointReport::HasFixedPoint { ell, .. } | FixedPointReport::FreeAt { ell, .. } => ell,
        }
    }
}

impl AffineZpAction {
    pub fn check(linear: &ZpAction, pool: &SymbolPool, trans: &[SymVec]) -> Vec<Violation> {
        let (p, q) = (linear.p(), linear.q());
        let mut out = Vec::new();
        if trans.len() != p {
            out.push(Violation::Dimension {
                detail: format!("{} translations for {p} generators", trans.len()),
            });
            return out;
        }
        for (i, t) in trans.iter().enumerate() {
            if t.len() != q {
                out.push(Violation::Dimension {
                    detail: format!("translation {i} has length {}, expected {q}", t.len()),
                });
            }
        }
        if !out.is_empty() {
            return out;
        }
        let mut unknown: Vec<String> = trans
            .iter()
            .flat_map(SymVec::symbols)
            .filter(|s| !pool.contains(s))
            .map(str::to_string)
            .collect();
        unknown.sort();
        unknown.dedup();
        out.extend(unknown.into_iter().map(|name| Violation::UnknownSymbol { name }));
        for i in 0..p {
            for j in i + 1..p {
                let lhs = apply_int(&linear.gen(i).minus_identity(), &trans[j]);
                let rhs = apply_int(&linear.gen(j).minus_identity(), &trans[i]);
                if lhs != rhs {
                    out.push(Violation::Incompatible { i, j });
                }
            }
        }
        out
    }

    pub fn new(linear: ZpAction, pool: SymbolPool, trans: Vec<SymVec>) -> Result<Self> {
        let v = Self::check(&linear, &pool, &trans);
        if !v.is_empty() {
            return Err(Error::Validation(v));
        }
        Ok(AffineZpAction { linear, pool, trans })
    }

    pub fn linear(&self) -> &ZpAction {
        &self.linear
    }

    pub fn pool(&self) -> &SymbolPool {
        &self.pool
    }

    pub fn translations(&self) -> &[SymVec] {
        &self.trans
    }

    pub fn p(&self) -> usize {
        self.linear.p()
    }

    pub fn q(&self) -> usize {
        self.linear.q()
    }

    /// `γ(ℓ)`, built one generator step at a time with
    /// `γ(ℓ + ℓ′) = γ(ℓ) + A(ℓ)γ(ℓ′)`.
    pub fn translation_of(&self, ell: &[i64]) -> SymVec {
        assert_eq!(ell.len(), self.p(), "exponent vector length");
        let mut acc = SymVec::zeros(self.q());
        let mut lin = IntMat::identity(self.q());
        for (i, &n) in ell.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let (step_mat, step_trans) = if n > 0 {
                (self.linear.gen(i).clone(), self.trans[i].clone())
            } else {
                let inv = self.linear.gen_inverse(i);
                (inv.clone(), apply_int(inv, &self.trans[i]).neg())
            };
            for _ in 0..n.unsigned_abs() {
                acc = acc.add(&apply_int(&lin, &step_trans));
                lin = lin.mul(&step_mat);
            }
        }
        acc
    }

    /// Decides whether `φ(ℓ)` has a fixed point on the torus.
    pub fn fixed_point_test(&self, ell: &[i64]) -> FixedPointReport {
        let a_minus_i = self.linear.evaluate(ell).minus_identity();
        let gamma = self.translation_of(ell);
        let left_kernel = kernel_saturated(&a_minus_i.transpose());
        let mut targets = Vec::with_capacity(left_kernel.rank());
        for m in &left_kernel.basis {
            let v = dot(m, &gamma);
            if !v.is_integer() {
                return FixedPointReport::FreeAt {
                    ell: ell.to_vec(),
                    dual: m.clone(),
                };
            }
            targets.push(v.rational_part().to_integer());
        }
        let q = self.q();
        let shift = if left_kernel.is_zero() {
            vec![Zero::zero(); q]
        } else {
            let k = IntMat::from_rows(left_kernel.basis.clone()).unwrap();
            solve_diophantine(&k, &targets).expect("saturated dual basis is surjective")
        };
        // (A − I)x = N − γ is consistent by construction
        let rhs = SymVec::from_rats(&crate::linalg::to_rat_vec(&shift)).sub(&gamma);
        let rr = rref_transform(&a_minus_i.to_rat());
        let reduced_rhs = apply_rat(&rr.transform, &rhs);
        let mut point = SymVec::zeros(q);
        for (row, &col) in rr.pivots.iter().enumerate() {
            point.0[col] = reduced_rhs[row].clone();
        }
        debug_assert!(reduced_rhs.0[rr.pivots.len()..].iter().all(|x| x.is_zero()));
        FixedPointReport::HasFixedPoint {
            ell: ell.to_vec(),
            point,
            shift,
        }
    }

    /// First `ℓ ≠ 0` with `‖ℓ‖∞ ≤ bound` (in [`nonzero_box`] order) whose
    /// element has a fixed point.
    pub fn free_box_check(&self, bound: u32) -> Option<FixedPointReport> {
        nonzero_box(self.p(), bound)
            .into_iter()
            .map(|ell| self.fixed_point_test(&ell))
            .find(|r| !r.is_free())
    }

    /// The same action in coordinates `x' = P·x`.
    pub fn conjugate(&self, p: &IntMat, p_inv: &IntMat) -> AffineZpAction {
        AffineZpAction {
            linear: self.linear.conjugate(p, p_inv),
            pool: self.pool.clone(),
            trans: self.trans.iter().map(|t| apply_int(p, t)).collect(),
        }
    }

    /// Action of `Z^p` through the generators `F·eᵢ` for a unimodular `F`.
    pub fn rebase(&self, f: &IntMat) -> AffineZpAction {
        let ells: Vec<Vec<i64>> = (0..self.p()).map(|j| to_i64(&f.col(j))).collect();
        AffineZpAction {
            linear: self.linear.rebase(f),
            pool: self.pool.clone(),
            trans: ells.iter().map(|l| self.translation_of(l)).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct AffineDoc {
    p: usize,
    q: usize,
    generators: Vec<IntMat>,
    #[serde(default)]
    symbols: SymbolPool,
    translations: Vec<SymVec>,
}

impl Serialize for AffineZpAction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AffineDoc {
            p: self.p(),
            q: self.q(),
            generators: self.linear.gens.clone(),
            symbols: self.pool.clone(),
            translations: self.trans.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AffineZpAction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = AffineDoc::deserialize(d)?;
        if doc.generators.len() != doc.p {
            return Err(D::Error::custom(format!(
                "p = {} but {} generators given",
                doc.p,
                doc.generators.len()
            )));
        }
        let linear = ZpAction::new(doc.q, doc.generators).map_err(D::Error::custom)?;
        AffineZpAction::new(linear, doc.symbols, doc.translations).map_err(D::Error::custom)
    }
}

/// All `ℓ ≠ 0` in `[-bound, bound]^p`, ordered by `‖ℓ‖₁` and then
/// lexicographically descending, so `e₁` comes first and positive steps
/// precede negative ones.
pub fn nonzero_box(p: usize, bound: u32) -> Vec<Vec<i64>> {
    let b = i64::from(bound);
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..p {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-b..=b).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&x| x != 0));
    out.sort_by(|a, b| {
        let na: i64 = a.iter().map(|x| x.abs()).sum();
        let nb: i64 = b.iter().map(|x| x.abs()).sum();
        na.cmp(&nb).then_with(|| b.cmp(a))
    });
    out
}
