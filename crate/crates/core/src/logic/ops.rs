use super::signature::Signature;
use super::syntax::{ClassicalFormula, Context, Formula, Term};
use super::LogicError;

/// Moves `formula` into the context `formula.ctx ++ extra`.
///
/// Context variables keep their levels; bound variables shift past the new
/// ones.
pub fn weaken(formula: &Formula, extra: &Context) -> Result<Formula, LogicError> {
    let ctx = formula.ctx().concat(extra)?;
    let n = formula.ctx().len();
    let images: Vec<Term> = (0..n).map(Term::Var).collect();
    let body = formula.body().rebase(n, &images, n + extra.len());
    Ok(Formula::new_unchecked(ctx, body))
}

/// Replaces each context variable `i` of `formula` by `images[i]`, a term over
/// `target`. The result lives in `target`.
///
/// Bound variables are levels, so capture cannot happen; binder names are
/// disambiguated by the printer.
pub fn substitute(
    sig: &Signature,
    formula: &Formula,
    target: &Context,
    images: &[Term],
) -> Result<Formula, LogicError> {
    check_images(sig, formula.ctx(), target, images)?;
    let body = formula
        .body()
        .rebase(formula.ctx().len(), images, target.len());
    Ok(Formula::new_unchecked(target.clone(), body))
}

pub fn substitute_classical(
    sig: &Signature,
    formula: &ClassicalFormula,
    target: &Context,
    images: &[Term],
) -> Result<ClassicalFormula, LogicError> {
    check_images(sig, formula.ctx(), target, images)?;
    let body = formula
        .body()
        .rebase(formula.ctx().len(), images, target.len());
    Ok(ClassicalFormula::new_unchecked(target.clone(), body))
}

fn check_images(
    sig: &Signature,
    source: &Context,
    target: &Context,
    images: &[Term],
) -> Result<(), LogicError> {
    if images.len() != source.len() {
        return Err(LogicError::SortMismatch(format!(
            "substitution has {} terms for a context of length {}",
            images.len(),
            source.len()
        )));
    }
    let scope = target.sorts();
    for (i, t) in images.iter().enumerate() {
        let got = t.sort(sig, &scope).map_err(LogicError::SortMismatch)?;
        if got != source.sort(i) {
            return Err(LogicError::SortMismatch(format!(
                "`{}` has sort `{}` but its image has sort `{}`",
                source.name(i),
                sig.sort_name(source.sort(i)),
                sig.sort_name(got)
            )));
        }
    }
    Ok(())
}
