use std::collections::HashMap;
use std::sync::Arc;

use super::{GenId, Generator, GeneratorSet, OpExpr, SpecError};

/// Default number of rule applications before a reduction is abandoned.
pub const DEFAULT_STEP_BUDGET: usize = 1_000_000;

/// A directed rewrite rule.
#[derive(Clone, Debug)]
pub enum Rule {
    /// `left^a * right^b -> right^b * left^a` for all powers.
    Commute { left: GenId, right: GenId },
    /// `left^ls * right^rs -> replacement` with `ls, rs` in `{-1, 1}`.
    /// Longer runs are peeled one unit at a time.
    Swap {
        left: (GenId, i32),
        right: (GenId, i32),
        replacement: OpExpr,
    },
    /// `gen^k -> replacement` for a fixed `k >= 2`, applied to any run of
    /// at least `k`.
    Power {
        gen: GenId,
        exponent: i32,
        replacement: OpExpr,
    },
}

#[derive(Clone, Debug)]
pub(crate) enum SwapAction {
    Commute,
    Replace(OpExpr),
}

/// Generators in canonical order plus the directed relations of one algebra.
#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    name: String,
    generators: Arc<GeneratorSet>,
    rules: Vec<Rule>,
    swaps: HashMap<(GenId, i32, GenId, i32), SwapAction>,
    powers: HashMap<GenId, (i32, OpExpr)>,
    step_budget: usize,
}

impl AlgebraSpec {
    pub fn builder(name: &str, generators: Vec<Generator>) -> AlgebraSpecBuilder {
        AlgebraSpecBuilder {
            name: name.to_string(),
            generators: Arc::new(GeneratorSet::new(generators)),
            rules: Vec::new(),
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &Arc<GeneratorSet> {
        &self.generators
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn step_budget(&self) -> usize {
        self.step_budget
    }

    /// Copy of this spec with a different step budget.
    pub fn with_step_budget(&self, budget: usize) -> AlgebraSpec {
        AlgebraSpec {
            step_budget: budget,
            ..self.clone()
        }
    }

    pub fn gen_id(&self, name: &str) -> Option<GenId> {
        self.generators.lookup(name)
    }

    /// `name^power` as an expression. Panics on an unknown name.
    pub fn var(&self, name: &str, power: i32) -> OpExpr {
        let id = self
            .gen_id(name)
            .unwrap_or_else(|| panic!("no generator {name:?} in {}", self.name));
        OpExpr::generator(&self.generators, id, power)
    }

    pub(crate) fn swap_action(&self, left: (GenId, i32), right: (GenId, i32)) -> &SwapAction {
        self.swaps
            .get(&(left.0, left.1, right.0, right.1))
            .expect("builder guarantees a rule for every out-of-order pair")
    }

    pub(crate) fn power_rule(&self, gen: GenId) -> Option<&(i32, OpExpr)> {
        self.powers.get(&gen)
    }
}

pub struct AlgebraSpecBuilder {
    name: String,
    generators: Arc<GeneratorSet>,
    rules: Vec<Rule>,
    step_budget: usize,
}

impl AlgebraSpecBuilder {
    pub fn generators(&self) -> &Arc<GeneratorSet> {
        &self.generators
    }

    fn id(&self, name: &str) -> GenId {
        self.generators
            .lookup(name)
            .unwrap_or_else(|| panic!("no generator {name:?}"))
    }

    pub fn var(&self, name: &str, power: i32) -> OpExpr {
        OpExpr::generator(&self.generators, self.id(name), power)
    }

    pub fn commute(mut self, left: &str, right: &str) -> Self {
        let (left, right) = (self.id(left), self.id(right));
        self.rules.push(Rule::Commute { left, right });
        self
    }

    pub fn swap(mut self, left: (&str, i32), right: (&str, i32), replacement: OpExpr) -> Self {
        let left = (self.id(left.0), left.1);
        let right = (self.id(right.0), right.1);
        self.rules.push(Rule::Swap {
            left,
            right,
            replacement,
        });
        self
    }

    pub fn power(mut self, gen: &str, exponent: i32, replacement: OpExpr) -> Self {
        let gen = self.id(gen);
        self.rules.push(Rule::Power {
            gen,
            exponent,
            replacement,
        });
        self
    }

    pub fn step_budget(mut self, budget: usize) -> Self {
        self.step_budget = budget;
        self
    }

    pub fn build(self) -> Result<AlgebraSpec, SpecError> {
        let gens = &self.generators;
        let name_of = |g: GenId| gens.get(g).name.clone();
        let sign_ok = |g: GenId, s: i32| s == 1 || (s == -1 && gens.get(g).invertible);

        let mut swaps = HashMap::new();
        let mut powers = HashMap::new();
        for rule in &self.rules {
            match rule {
                Rule::Commute { left, right } => {
                    if left <= right {
                        return Err(SpecError::InOrderPair(name_of(*left), name_of(*right)));
                    }
                    for ls in [1, -1] {
                        for rs in [1, -1] {
                            if sign_ok(*left, ls) && sign_ok(*right, rs) {
                                swaps.insert((*left, ls, *right, rs), SwapAction::Commute);
                            }
                        }
                    }
                }
                Rule::Swap {
                    left,
                    right,
                    replacement,
                } => {
                    if left.0 <= right.0 {
                        return Err(SpecError::InOrderPair(name_of(left.0), name_of(right.0)));
                    }
                    for (g, s) in [left, right] {
                        if !sign_ok(*g, *s) {
                            return Err(SpecError::BadUnit(name_of(*g), *s));
                        }
                    }
                    if replacement.generators() != gens {
                        return Err(SpecError::ForeignReplacement);
                    }
                    swaps.insert(
                        (left.0, left.1, right.0, right.1),
                        SwapAction::Replace(replacement.clone()),
                    );
                }
                Rule::Power {
                    gen,
                    exponent,
                    replacement,
                } => {
                    if *exponent < 2 {
                        return Err(SpecError::BadPowerRule(name_of(*gen), *exponent));
                    }
                    if replacement.generators() != gens {
                        return Err(SpecError::ForeignReplacement);
                    }
                    powers.insert(*gen, (*exponent, replacement.clone()));
                }
            }
        }

        // Every adjacency out of canonical order must be reducible.
        for (g, _) in gens.iter() {
            for (h, _) in gens.iter() {
                if g <= h {
                    continue;
                }
                for gs in [1, -1] {
                    for hs in [1, -1] {
                        if sign_ok(g, gs) && sign_ok(h, hs) && !swaps.contains_key(&(g, gs, h, hs))
                        {
                            return Err(SpecError::MissingRule {
                                left: name_of(g),
                                left_sign: gs,
                                right: name_of(h),
                                right_sign: hs,
                            });
                        }
                    }
                }
            }
        }

        Ok(AlgebraSpec {
            name: self.name,
            generators: self.generators,
            rules: self.rules,
            swaps,
            powers,
            step_budget: self.step_budget,
        })
    }
}
