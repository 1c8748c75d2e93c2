use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::{AlgebraError, GenId, GeneratorSet, OpWord, Scalar};

/// A finite formal sum of words with exact coefficients. No stored term has
/// a zero coefficient; the empty sum is the zero operator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpExpr {
    generators: Arc<GeneratorSet>,
    terms: BTreeMap<OpWord, Scalar>,
}

impl OpExpr {
    pub fn zero(generators: &Arc<GeneratorSet>) -> Self {
        Self {
            generators: Arc::clone(generators),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(generators: &Arc<GeneratorSet>, s: Scalar) -> Self {
        Self::from_word(generators, OpWord::identity(), s)
    }

    pub fn one(generators: &Arc<GeneratorSet>) -> Self {
        Self::scalar(generators, Scalar::one())
    }

    pub fn from_word(generators: &Arc<GeneratorSet>, word: OpWord, s: Scalar) -> Self {
        let mut e = Self::zero(generators);
        e.add_term(word, &s);
        e
    }

    /// `gen^power` with unit coefficient.
    pub fn generator(generators: &Arc<GeneratorSet>, gen: GenId, power: i32) -> Self {
        Self::from_word(generators, OpWord::single(gen, power), Scalar::one())
    }

    pub fn from_terms<I>(generators: &Arc<GeneratorSet>, terms: I) -> Self
    where
        I: IntoIterator<Item = (OpWord, Scalar)>,
    {
        let mut e = Self::zero(generators);
        for (w, s) in terms {
            e.add_term(w, &s);
        }
        e
    }

    pub fn generators(&self) -> &Arc<GeneratorSet> {
        &self.generators
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OpWord, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of the identity word if the expression has no other
    /// terms, i.e. the expression is a pure scalar.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&OpWord::identity()).cloned(),
            _ => None,
        }
    }

    pub fn coefficient(&self, word: &OpWord) -> Scalar {
        self.terms.get(word).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, word: OpWord, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            Entry::Vacant(v) => {
                v.insert(s.clone());
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + s;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub(crate) fn into_terms(self) -> BTreeMap<OpWord, Scalar> {
        self.terms
    }

    pub fn same_algebra(&self, other: &OpExpr) -> bool {
        Arc::ptr_eq(&self.generators, &other.generators) || self.generators == other.generators
    }

    fn check(&self, other: &OpExpr) -> Result<(), AlgebraError> {
        if self.same_algebra(other) {
            Ok(())
        } else {
            Err(AlgebraError::Mismatch)
        }
    }

    pub fn try_add(&self, other: &OpExpr) -> Result<OpExpr, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, s) in &other.terms {
            out.add_term(w.clone(), s);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &OpExpr) -> Result<OpExpr, AlgebraError> {
        self.try_add(&other.neg_ref())
    }

    /// Formal product: words are concatenated, nothing is reordered.
    pub fn try_mul(&self, other: &OpExpr) -> Result<OpExpr, AlgebraError> {
        self.check(other)?;
        let mut out = OpExpr::zero(&self.generators);
        for (wa, sa) in &self.terms {
            for (wb, sb) in &other.terms {
                out.add_term(wa.concat(wb), &(sa * sb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> OpExpr {
        let mut out = OpExpr::zero(&self.generators);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), &(c * s));
        }
        out
    }

    /// Formal non-negative power.
    pub fn pow(&self, n: u32) -> OpExpr {
        let mut acc = OpExpr::one(&self.generators);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    fn neg_ref(&self) -> OpExpr {
        self.scale(&Scalar::integer(-1))
    }

    /// Reverse every word and conjugate every coefficient, without
    /// normalizing.
    pub(crate) fn reversed_conjugate(&self) -> OpExpr {
        OpExpr::from_terms(
            &self.generators,
            self.terms.iter().map(|(w, s)| (w.reversed(), s.conj())),
        )
    }
}

// The operator impls panic on mixed algebras, like a shape mismatch; use the
// `try_*` methods where the operands come from different sources.

impl Add for &OpExpr {
    type Output = OpExpr;
    fn add(self, rhs: &OpExpr) -> OpExpr {
        self.try_add(rhs).expect("operands from different algebras")
    }
}

impl Add for OpExpr {
    type Output = OpExpr;
    fn add(self, rhs: OpExpr) -> OpExpr {
        &self + &rhs
    }
}

impl Sub for &OpExpr {
    type Output = OpExpr;
    fn sub(self, rhs: &OpExpr) -> OpExpr {
        self.try_sub(rhs).expect("operands from different algebras")
    }
}

impl Sub for OpExpr {
    type Output = OpExpr;
    fn sub(self, rhs: OpExpr) -> OpExpr {
        &self - &rhs
    }
}

impl Mul for &OpExpr {
    type Output = OpExpr;
    fn mul(self, rhs: &OpExpr) -> OpExpr {
        self.try_mul(rhs).expect("operands from different algebras")
    }
}

impl Mul for OpExpr {
    type Output = OpExpr;
    fn mul(self, rhs: OpExpr) -> OpExpr {
        &self * &rhs
    }
}

impl Neg for &OpExpr {
    type Output = OpExpr;
    fn neg(self) -> OpExpr {
        self.neg_ref()
    }
}

impl Neg for OpExpr {
    type Output = OpExpr;
    fn neg(self) -> OpExpr {
        self.neg_ref()
    }
}
