//! Static checks over a resolved project: funcon arity and the syntax sort
//! of semantic-function arguments.
//!
//! A check never fires on a term whose names failed to resolve; those already
//! carry `E001`.

use std::collections::BTreeMap;

use crate::model::{Diagnostic, DiagnosticCode};
use crate::parser::{visit_terms, BlockKind, ProdItem, SyntaxDecl, Term};
use crate::resolver::{DeclId, DeclKind, ResolvedProject};

pub fn check(project: &ResolvedProject) -> Vec<Diagnostic> {
    let mut diags = check_arity(project);
    diags.extend(check_sorts(project));
    diags
}

pub fn check_arity(project: &ResolvedProject) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for doc in &project.docs {
        visit_terms(doc, &mut |t| {
            let Term::Apply { head, args, span } = t else {
                return;
            };
            let Some(&id) = project.resolution.get(&head.span) else {
                return;
            };
            let info = project.index.info(id);
            if let Some(expected) = info.arity {
                if expected != args.len() {
                    diags.push(Diagnostic::new(
                        DiagnosticCode::E003,
                        *span,
                        format!(
                            "funcon `{}` expects {} argument{}, found {}",
                            head.name,
                            expected,
                            if expected == 1 { "" } else { "s" },
                            args.len()
                        ),
                    ));
                }
            }
        });
    }
    diags
}

pub fn check_sorts(project: &ResolvedProject) -> Vec<Diagnostic> {
    let syntax_decls: BTreeMap<DeclId, &SyntaxDecl> = project
        .docs
        .iter()
        .flat_map(|d| &d.blocks)
        .filter_map(|b| match &b.kind {
            BlockKind::Syntax(s) => project
                .index
                .lookup(s.name.sort, &s.name.name)
                .filter(|&id| project.index.info(id).span == s.name.span)
                .map(|id| (id, s)),
            _ => None,
        })
        .collect();

    let mut diags = Vec::new();
    for doc in &project.docs {
        let file = project.file(doc.file);
        visit_terms(doc, &mut |t| {
            let Term::SemApply { fun, arg, .. } = t else {
                return;
            };
            let Some(&fun_id) = project.resolution.get(&fun.span) else {
                return;
            };
            let Some(sort_span) = project.index.info(fun_id).arg_sort else {
                return;
            };
            let Some(&expected) = project.resolution.get(&sort_span) else {
                return;
            };
            let expected_name = &project.index.info(expected).name;
            let mismatch = match arg.as_ref() {
                Term::Var(var) => {
                    let Some(&var_id) = project.resolution.get(&var.span) else {
                        return;
                    };
                    let Some(head) = project.index.info(var_id).bound_head else {
                        return;
                    };
                    let Some(&bound) = project.resolution.get(&head) else {
                        return;
                    };
                    (bound != expected).then(|| {
                        let info = project.index.info(bound);
                        let what = if info.kind == DeclKind::Syntax {
                            "syntax sort"
                        } else {
                            "type"
                        };
                        format!("`{}` ranges over {what} `{}`", var.name, info.name)
                    })
                }
                Term::Literal { span, .. } => {
                    let lit = unquote(file.slice(*span));
                    let derivable = syntax_decls.get(&expected).is_some_and(|decl| {
                        decl.alternatives.iter().any(|alt| {
                            alt.items.iter().any(|item| {
                                matches!(item, ProdItem::Terminal(s) if unquote(file_text(project, *s)) == lit)
                            })
                        })
                    });
                    (!derivable)
                        .then(|| format!("literal {lit} is not a terminal of `{expected_name}`"))
                }
                Term::Apply { head, .. } => {
                    if !project.resolution.contains_key(&head.span) {
                        return;
                    }
                    Some(format!(
                        "funcon term `{}` is not a syntax phrase",
                        head.name
                    ))
                }
                Term::SemApply { fun: inner, .. } => {
                    if !project.resolution.contains_key(&inner.span) {
                        return;
                    }
                    Some(format!(
                        "semantic function application `{}[[...]]` is not a syntax phrase",
                        inner.name
                    ))
                }
                Term::Sort(_) => None,
            };
            if let Some(found) = mismatch {
                diags.push(Diagnostic::new(
                    DiagnosticCode::E004,
                    arg.span(),
                    format!(
                        "semantic function `{}` expects syntax sort `{}`, but {found}",
                        fun.name, expected_name
                    ),
                ));
            }
        });
    }
    diags
}

fn unquote(lit: &str) -> &str {
    match lit.as_bytes().first() {
        Some(b'"' | b'\'') if lit.len() >= 2 => &lit[1..lit.len() - 1],
        _ => lit,
    }
}

fn file_text(project: &ResolvedProject, span: crate::model::Span) -> &str {
    project.file(span.file).slice(span)
}
