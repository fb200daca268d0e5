//! Reals of the form `c + Σ rᵢ·sᵢ` with rational `c, rᵢ` and formal symbols
//! `sᵢ` that are taken to be Q-linearly independent together with 1.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{parse_rat, rat_to_string, Int, IntMat, Rat, RatMat, Scalar};

/// Ordered, append-only list of symbol names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolPool {
    names: Vec<String>,
}

impl SymbolPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut pool = Self::new();
        for n in names {
            pool.declare(n)?;
        }
        Ok(pool)
    }

    /// Appends a fresh symbol and returns it as a `SymReal`.
    pub fn declare(&mut self, name: impl Into<String>) -> Result<SymReal> {
        let name = name.into();
        if name.is_empty() || self.contains(&name) {
            return Err(Error::Precondition(format!(
                "symbol {name:?} already declared or empty"
            )));
        }
        self.names.push(name.clone());
        Ok(SymReal::symbol(name))
    }

    /// Appends `prefix1, prefix2, …` skipping names already taken.
    pub fn fresh(&mut self, prefix: &str) -> SymReal {
        let name = (1..)
            .map(|i| format!("{prefix}{i}"))
            .find(|n| !self.contains(n))
            .unwrap();
        self.declare(name).unwrap()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Checks that every symbol used by `v` is declared here.
    pub fn check(&self, v: &SymReal) -> Result<()> {
        match v.symbols().find(|s| !self.contains(s)) {
            Some(s) => Err(Error::UnknownSymbol(s.to_string())),
            None => Ok(()),
        }
    }

    /// Sum that rejects operands with undeclared symbols.
    pub fn add(&self, u: &SymReal, v: &SymReal) -> Result<SymReal> {
        self.check(u)?;
        self.check(v)?;
        Ok(u + v)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymReal {
    constant: Rat,
    coeffs: BTreeMap<String, Rat>,
}

impl SymReal {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(r: Rat) -> Self {
        SymReal {
            constant: r,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Rat::from_integer(Int::from(n)))
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.into(), Rat::one());
        SymReal {
            constant: Rat::zero(),
            coeffs,
        }
    }

    /// Builds a value from a constant and `(symbol, coefficient)` pairs.
    pub fn from_parts<I, S>(constant: Rat, terms: I) -> Self
    where
        I: IntoIterator<Item = (S, Rat)>,
        S: Into<String>,
    {
        let mut out = Self::constant(constant);
        for (s, c) in terms {
            out.add_term(s.into(), c);
        }
        out
    }

    fn add_term(&mut self, name: String, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(name).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.retain(|_, v| !v.is_zero());
        }
    }

    pub fn rational_part(&self) -> &Rat {
        &self.constant
    }

    pub fn coeff(&self, name: &str) -> Rat {
        self.coeffs.get(name).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &Rat)> {
        self.coeffs.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().map(String::as_str)
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.constant.is_integer()
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        SymReal {
            constant: &self.constant * r,
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v * r)).collect(),
        }
    }

    pub fn scale_int(&self, n: &Int) -> Self {
        self.scale(&Rat::from_integer(n.clone()))
    }

    /// Product, defined only when at least one factor is rational.
    pub fn mul(&self, other: &SymReal) -> Result<SymReal> {
        match (self.is_rational(), other.is_rational()) {
            (_, true) => Ok(self.scale(&other.constant)),
            (true, false) => Ok(other.scale(&self.constant)),
            (false, false) => Err(Error::SymbolProduct),
        }
    }

    /// Value with every symbol replaced by a rational.
    pub fn eval_rat(&self, assignment: &BTreeMap<String, Rat>) -> Result<Rat> {
        let mut acc = self.constant.clone();
        for (s, c) in &self.coeffs {
            let v = assignment.get(s).ok_or_else(|| Error::MissingSymbol(s.clone()))?;
            acc += c * v;
        }
        Ok(acc)
    }
}

impl Add for &SymReal {
    type Output = SymReal;
    fn add(self, rhs: &SymReal) -> SymReal {
        let mut out = self.clone();
        out.constant += &rhs.constant;
        for (k, v) in &rhs.coeffs {
            out.add_term(k.clone(), v.clone());
        }
        out
    }
}

impl Add for SymReal {
    type Output = SymReal;
    fn add(self, rhs: SymReal) -> SymReal {
        &self + &rhs
    }
}

impl Neg for &SymReal {
    type Output = SymReal;
    fn neg(self) -> SymReal {
        self.scale(&-Rat::one())
    }
}

impl Neg for SymReal {
    type Output = SymReal;
    fn neg(self) -> SymReal {
        -&self
    }
}

impl Sub for &SymReal {
    type Output = SymReal;
    fn sub(self, rhs: &SymReal) -> SymReal {
        self + &(-rhs)
    }
}

impl Sub for SymReal {
    type Output = SymReal;
    fn sub(self, rhs: SymReal) -> SymReal {
        &self - &rhs
    }
}

impl fmt::Display for SymReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.constant.is_zero() || self.coeffs.is_empty() {
            write!(f, "{}", rat_to_string(&self.constant))?;
            first = false;
        }
        for (s, c) in &self.coeffs {
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            match (first, c.is_negative()) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, _) => write!(f, " {sign} ")?,
            }
            if mag.is_one() {
                write!(f, "{s}")?;
            } else {
                write!(f, "{}*{s}", rat_to_string(&mag))?;
            }
            first = false;
        }
        Ok(())
    }
}

impl Serialize for SymReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let sym: Map<String, Value> = self
            .coeffs
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(rat_to_string(v))))
            .collect();
        let mut obj = Map::new();
        obj.insert("rat".into(), Value::String(rat_to_string(&self.constant)));
        obj.insert("sym".into(), Value::Object(sym));
        Value::Object(obj).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        SymReal::from_json(&v).map_err(D::Error::custom)
    }
}

impl SymReal {
    /// Accepts the object form as well as a bare rational (string or integer).
    pub fn from_json(v: &Value) -> std::result::Result<Self, String> {
        match v {
            Value::Object(obj) => {
                if let Some(k) = obj.keys().find(|k| *k != "rat" && *k != "sym") {
                    return Err(format!("unexpected key {k:?} in symbolic real"));
                }
                let constant = match obj.get("rat") {
                    Some(r) => Rat::from_json(r)?,
                    None => Rat::zero(),
                };
                let mut out = Self::constant(constant);
                if let Some(sym) = obj.get("sym") {
                    let sym = sym.as_object().ok_or("\"sym\" must be an object")?;
                    for (name, c) in sym {
                        let c = match c {
                            Value::String(s) => parse_rat(s)?,
                            other => Rat::from_json(other)?,
                        };
                        out.add_term(name.clone(), c);
                    }
                }
                Ok(out)
            }
            other => Rat::from_json(other).map(Self::constant),
        }
    }
}

/// Fixed-length vector of symbolic reals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymVec(pub Vec<SymReal>);

impl SymVec {
    pub fn zeros(n: usize) -> Self {
        SymVec(vec![SymReal::zero(); n])
    }

    pub fn from_rats(v: &[Rat]) -> Self {
        SymVec(v.iter().cloned().map(SymReal::constant).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(SymReal::is_zero)
    }

    pub fn add(&self, other: &SymVec) -> SymVec {
        assert_eq!(self.len(), other.len(), "SymVec length mismatch");
        SymVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &SymVec) -> SymVec {
        assert_eq!(self.len(), other.len(), "SymVec length mismatch");
        SymVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> SymVec {
        SymVec(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, r: &Rat) -> SymVec {
        SymVec(self.0.iter().map(|a| a.scale(r)).collect())
    }

    pub fn concat(&self, other: &SymVec) -> SymVec {
        SymVec(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn slice(&self, from: usize, to: usize) -> SymVec {
        SymVec(self.0[from..to].to_vec())
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.0.iter().flat_map(SymReal::symbols)
    }

    /// Coefficient vector of one symbol (or of the constant when `None`).
    pub fn component(&self, symbol: Option<&str>) -> Vec<Rat> {
        self.0
            .iter()
            .map(|x| match symbol {
                Some(s) => x.coeff(s),
                None => x.rational_part().clone(),
            })
            .collect()
    }
}

impl std::ops::Index<usize> for SymVec {
    type Output = SymReal;
    fn index(&self, i: usize) -> &SymReal {
        &self.0[i]
    }
}

impl fmt::Display for SymVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// `Σ mᵢ·vᵢ`.
pub fn dot(m: &[Int], v: &SymVec) -> SymReal {
    assert_eq!(m.len(), v.len(), "dot length mismatch");
    m.iter()
        .zip(&v.0)
        .filter(|(c, _)| !c.is_zero())
        .fold(SymReal::zero(), |acc, (c, x)| &acc + &x.scale_int(c))
}

pub fn dot_rat(m: &[Rat], v: &SymVec) -> SymReal {
    assert_eq!(m.len(), v.len(), "dot length mismatch");
    m.iter()
        .zip(&v.0)
        .filter(|(c, _)| !c.is_zero())
        .fold(SymReal::zero(), |acc, (c, x)| &acc + &x.scale(c))
}

/// `M·v` for an integer matrix.
pub fn apply_int(m: &IntMat, v: &SymVec) -> SymVec {
    assert_eq!(m.cols(), v.len(), "matrix-vector dimension mismatch");
    SymVec((0..m.rows()).map(|i| dot(&m.row(i), v)).collect())
}

/// `M·v` for a rational matrix.
pub fn apply_rat(m: &RatMat, v: &SymVec) -> SymVec {
    assert_eq!(m.cols(), v.len(), "matrix-vector dimension mismatch");
    SymVec((0..m.rows()).map(|i| dot_rat(&m.row(i), v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int_vec, rat};

    fn xi1() -> SymReal {
        SymReal::symbol("xi1")
    }

    fn half() -> SymReal {
        SymReal::constant(rat(1, 2))
    }

    #[test]
    fn add_and_scale() {
        assert!((&xi1() + &-xi1()).is_zero());
        assert_eq!(xi1().scale(&rat(1, 2)).coeff("xi1"), rat(1, 2));
        let lhs = &(&half() + &xi1()) + &half();
        assert_eq!(lhs, SymReal::from_parts(rat(1, 1), [("xi1", rat(1, 1))]));
        assert!(lhs.coeffs.values().all(|c| !c.is_zero()));
    }

    #[test]
    fn dot_examples() {
        let v = SymVec(vec![xi1(), half()]);
        assert_eq!(dot(&int_vec(&[1, 0]), &v), xi1());
        assert_eq!(dot(&int_vec(&[0, 2]), &v), SymReal::from_int(1));
        assert!(dot(&int_vec(&[1, 1]), &SymVec(vec![xi1(), -xi1()])).is_zero());
    }

    #[test]
    fn integrality() {
        assert!(SymReal::from_int(3).is_integer());
        assert!(!half().is_integer());
        assert!(half().is_rational());
        assert!((&(&xi1() - &xi1()) + &SymReal::from_int(2)).is_integer());
        assert!(!xi1().is_rational());
    }

    #[test]
    fn symbol_products_rejected() {
        assert!(matches!(xi1().mul(&xi1()), Err(Error::SymbolProduct)));
        assert_eq!(xi1().mul(&half()).unwrap(), xi1().scale(&rat(1, 2)));
    }

    #[test]
    fn pool_rejects_unknown_and_duplicates() {
        let mut pool = SymbolPool::from_names(["xi1"]).unwrap();
        assert!(pool.declare("xi1").is_err());
        assert!(matches!(
            pool.add(&xi1(), &SymReal::symbol("eta1")),
            Err(Error::UnknownSymbol(s)) if s == "eta1"
        ));
        assert_eq!(pool.fresh("xi"), SymReal::symbol("xi2"));
    }

    #[test]
    fn json_form() {
        let v = SymReal::from_parts(rat(1, 2), [("xi1", rat(1, 1)), ("eta1", rat(-2, 3))]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"rat":"1/2","sym":{"eta1":"-2/3","xi1":"1"}}"#);
        let back: SymReal = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let bare: SymReal = serde_json::from_str("\"3/4\"").unwrap();
        assert_eq!(bare, SymReal::constant(rat(3, 4)));
        assert_eq!(v.to_string(), "1/2 - 2/3*eta1 + xi1");
    }
}
