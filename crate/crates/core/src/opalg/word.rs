use std::fmt;

/// Index of a generator within its [`GeneratorSet`]. The index order is the
/// canonical word order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenId(pub u8);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub invertible: bool,
    pub self_adjoint: bool,
}

impl Generator {
    pub fn new(name: &str, invertible: bool, self_adjoint: bool) -> Self {
        Self {
            name: name.to_string(),
            invertible,
            self_adjoint,
        }
    }
}

/// The ordered generator list of an algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSet {
    generators: Vec<Generator>,
}

impl GeneratorSet {
    pub fn new(generators: Vec<Generator>) -> Self {
        assert!(generators.len() <= u8::MAX as usize);
        Self { generators }
    }

    pub fn get(&self, id: GenId) -> &Generator {
        &self.generators[id.0 as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<GenId> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .map(|i| GenId(i as u8))
    }

    pub fn iter(&self) -> impl Iterator<Item = (GenId, &Generator)> {
        self.generators
            .iter()
            .enumerate()
            .map(|(i, g)| (GenId(i as u8), g))
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// One run-length factor `gen^power` of a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub gen: GenId,
    pub power: i32,
}

/// An ordered product of generator powers. Adjacent factors always carry
/// distinct generators and no power is zero; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpWord {
    factors: Vec<Factor>,
}

impl OpWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(gen: GenId, power: i32) -> Self {
        let mut w = Self::identity();
        w.push(gen, power);
        w
    }

    pub fn from_factors<I: IntoIterator<Item = (GenId, i32)>>(factors: I) -> Self {
        let mut w = Self::identity();
        for (g, p) in factors {
            w.push(g, p);
        }
        w
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// Sum of absolute powers.
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|f| f.power.unsigned_abs()).sum()
    }

    /// Append `gen^power`, merging with the last factor when the generators
    /// match and dropping factors whose power cancels to zero.
    pub fn push(&mut self, gen: GenId, power: i32) {
        if power == 0 {
            return;
        }
        if let Some(last) = self.factors.last_mut() {
            if last.gen == gen {
                last.power += power;
                if last.power == 0 {
                    self.factors.pop();
                }
                return;
            }
        }
        self.factors.push(Factor { gen, power });
    }

    pub fn extend_from(&mut self, other: &OpWord) {
        for f in &other.factors {
            self.push(f.gen, f.power);
        }
    }

    pub fn concat(&self, other: &OpWord) -> OpWord {
        let mut w = self.clone();
        w.extend_from(other);
        w
    }

    pub fn reversed(&self) -> OpWord {
        OpWord::from_factors(self.factors.iter().rev().map(|f| (f.gen, f.power)))
    }

    pub fn display<'a>(&'a self, gens: &'a GeneratorSet) -> WordDisplay<'a> {
        WordDisplay { word: self, gens }
    }
}

pub struct WordDisplay<'a> {
    word: &'a OpWord,
    gens: &'a GeneratorSet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, fac) in self.word.factors.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            let name = &self.gens.get(fac.gen).name;
            if fac.power == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{}", fac.power)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_merges_and_cancels() {
        let (x, h) = (GenId(1), GenId(3));
        let w = OpWord::from_factors([(x, 1), (h, 1), (h, -1), (x, 2)]);
        assert_eq!(w.factors(), &[Factor { gen: x, power: 3 }]);
        let w = OpWord::from_factors([(h, 2), (h, -2)]);
        assert!(w.is_identity());
    }

    #[test]
    fn degree_counts_absolute_powers() {
        let w = OpWord::from_factors([(GenId(0), 2), (GenId(3), -3)]);
        assert_eq!(w.degree(), 5);
    }
}
