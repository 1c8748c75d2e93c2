//! Canonicalization by exhaustive directed rewriting.

use std::collections::BTreeMap;

use super::spec::SwapAction;
use super::{AlgebraError, AlgebraSpec, NormalizeError, OpExpr, OpWord, Scalar};

/// Which redex a reduction step rewrites when a word has several.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Leftmost,
    Rightmost,
}

/// A normalized expression plus the number of rule applications it took.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub expr: OpExpr,
    pub steps: usize,
}

#[derive(Clone, Copy, Debug)]
enum Redex {
    /// Out-of-order adjacency at factors `i, i + 1`.
    Swap(usize),
    /// Power rule on factor `i`.
    Power(usize),
}

/// Canonical form of `e` under `spec` (leftmost strategy).
pub fn normalize(e: &OpExpr, spec: &AlgebraSpec) -> Result<OpExpr, NormalizeError> {
    reduce(e, spec, Strategy::Leftmost).map(|r| r.expr)
}

/// Normalize with an explicit strategy and report the step count.
pub fn reduce(
    e: &OpExpr,
    spec: &AlgebraSpec,
    strategy: Strategy,
) -> Result<Reduction, NormalizeError> {
    if e.generators() != spec.generators() {
        return Err(AlgebraError::Mismatch.into());
    }
    let gens = spec.generators();
    for (w, _) in e.terms() {
        for f in w.factors() {
            let g = gens.get(f.gen);
            if f.power < 0 && !g.invertible {
                return Err(NormalizeError::NotInvertible(g.name.clone()));
            }
        }
    }
    let budget = spec.step_budget();
    let mut pending: BTreeMap<OpWord, Scalar> = e.clone().into_terms();
    let mut out = OpExpr::zero(spec.generators());
    let mut steps = 0usize;

    while let Some((word, coeff)) = pending.pop_last() {
        let Some(redex) = find_redex(&word, spec, strategy) else {
            out.add_term(word, &coeff);
            continue;
        };
        steps += 1;
        if steps > budget {
            return Err(NormalizeError::BudgetExceeded { budget });
        }
        for (w, s) in rewrite(&word, redex, spec) {
            let s = &coeff * &s;
            accumulate(&mut pending, w, s);
        }
    }
    Ok(Reduction { expr: out, steps })
}

fn accumulate(map: &mut BTreeMap<OpWord, Scalar>, w: OpWord, s: Scalar) {
    use std::collections::btree_map::Entry;
    match map.entry(w) {
        Entry::Vacant(v) => {
            if !s.is_zero() {
                v.insert(s);
            }
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += &s;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn power_redex(word: &OpWord, i: usize, spec: &AlgebraSpec) -> bool {
    let f = word.factors()[i];
    matches!(spec.power_rule(f.gen), Some((k, _)) if f.power >= *k)
}

fn swap_redex(word: &OpWord, i: usize) -> bool {
    let fs = word.factors();
    i + 1 < fs.len() && fs[i].gen > fs[i + 1].gen
}

fn find_redex(word: &OpWord, spec: &AlgebraSpec, strategy: Strategy) -> Option<Redex> {
    let n = word.factors().len();
    match strategy {
        Strategy::Leftmost => (0..n).find_map(|i| {
            if power_redex(word, i, spec) {
                Some(Redex::Power(i))
            } else if swap_redex(word, i) {
                Some(Redex::Swap(i))
            } else {
                None
            }
        }),
        Strategy::Rightmost => (0..n).rev().find_map(|i| {
            if swap_redex(word, i) {
                Some(Redex::Swap(i))
            } else if power_redex(word, i, spec) {
                Some(Redex::Power(i))
            } else {
                None
            }
        }),
    }
}

/// True when no rule applies anywhere in `word`.
pub fn is_canonical_word(word: &OpWord, spec: &AlgebraSpec) -> bool {
    find_redex(word, spec, Strategy::Leftmost).is_none()
}

/// True when every word of `e` is canonical under `spec`.
pub fn is_normal(e: &OpExpr, spec: &AlgebraSpec) -> bool {
    e.generators() == spec.generators() && e.terms().all(|(w, _)| is_canonical_word(w, spec))
}

fn rewrite(word: &OpWord, redex: Redex, spec: &AlgebraSpec) -> Vec<(OpWord, Scalar)> {
    let fs = word.factors();
    let prefix = |end: usize| OpWord::from_factors(fs[..end].iter().map(|f| (f.gen, f.power)));
    let append_suffix = |w: &mut OpWord, start: usize| {
        for f in &fs[start..] {
            w.push(f.gen, f.power);
        }
    };
    match redex {
        Redex::Swap(i) => {
            let (a, b) = (fs[i], fs[i + 1]);
            let (us, vs) = (a.power.signum(), b.power.signum());
            match spec.swap_action((a.gen, us), (b.gen, vs)) {
                SwapAction::Commute => {
                    let mut w = prefix(i);
                    w.push(b.gen, b.power);
                    w.push(a.gen, a.power);
                    append_suffix(&mut w, i + 2);
                    vec![(w, Scalar::one())]
                }
                SwapAction::Replace(rhs) => rhs
                    .terms()
                    .map(|(rw, rs)| {
                        let mut w = prefix(i);
                        w.push(a.gen, a.power - us);
                        w.extend_from(rw);
                        w.push(b.gen, b.power - vs);
                        append_suffix(&mut w, i + 2);
                        (w, rs.clone())
                    })
                    .collect(),
            }
        }
        Redex::Power(i) => {
            let f = fs[i];
            let (k, rhs) = spec.power_rule(f.gen).expect("power redex has a rule");
            rhs.terms()
                .map(|(rw, rs)| {
                    let mut w = prefix(i);
                    w.push(f.gen, f.power - k);
                    w.extend_from(rw);
                    append_suffix(&mut w, i + 1);
                    (w, rs.clone())
                })
                .collect()
        }
    }
}

/// `normalize(a - b)` is empty.
pub fn equals(a: &OpExpr, b: &OpExpr, spec: &AlgebraSpec) -> Result<bool, NormalizeError> {
    let diff = a.try_sub(b)?;
    Ok(normalize(&diff, spec)?.is_empty())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketKind {
    /// `ab - ba`
    Comm,
    /// `ab + ba`
    Acomm,
    /// `(ab + ba) / 2`
    Sym,
}

/// Unnormalized bracket.
pub fn bracket_formal(a: &OpExpr, b: &OpExpr, kind: BracketKind) -> Result<OpExpr, AlgebraError> {
    let ab = a.try_mul(b)?;
    let ba = b.try_mul(a)?;
    Ok(match kind {
        BracketKind::Comm => ab.try_sub(&ba)?,
        BracketKind::Acomm => ab.try_add(&ba)?,
        BracketKind::Sym => ab.try_add(&ba)?.scale(&Scalar::ratio(1, 2)),
    })
}

/// Normalized bracket of `a` and `b`.
pub fn brackets(
    a: &OpExpr,
    b: &OpExpr,
    kind: BracketKind,
    spec: &AlgebraSpec,
) -> Result<OpExpr, NormalizeError> {
    normalize(&bracket_formal(a, b, kind)?, spec)
}

/// Hermitian adjoint: reverse words, conjugate coefficients, normalize.
/// Requires every generator occurring in `e` to be self-adjoint.
pub fn adjoint(e: &OpExpr, spec: &AlgebraSpec) -> Result<OpExpr, NormalizeError> {
    let gens = e.generators();
    for (w, _) in e.terms() {
        for f in w.factors() {
            let g = gens.get(f.gen);
            if !g.self_adjoint {
                return Err(NormalizeError::NotSelfAdjoint(g.name.clone()));
            }
        }
    }
    normalize(&e.reversed_conjugate(), spec)
}
