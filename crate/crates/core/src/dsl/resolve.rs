//! Maps a syntax tree onto the information model.

use std::collections::BTreeSet;

use super::diagnostic::{DiagnosticCode, ParseDiagnostic, SourceSpan};
use super::parser::{Attribute, Declaration, EntityDecl, EntityDeclKind, SyntaxTree, Value};
use crate::model::{
    Criticality, EntityId, Likelihood, Link, Model, ModelBuilder, ModelError, Requirement, Risk,
    RiskSeverity, Site, SolutionElement, SourceLocation, SourceMap, TestCase, TestMethod,
    Tolerability,
};
use crate::rules::RuleId;

const ALLOW_PREFIX: &str = "tracekit:allow(";

fn mismatch(attr: &Attribute, expected: &str) -> ParseDiagnostic {
    ParseDiagnostic::error(
        DiagnosticCode::TypeMismatch,
        attr.value.span.clone(),
        format!(
            "attribute '{}' expects {expected}, found {}",
            attr.name.value,
            attr.value.value.type_name()
        ),
    )
}

fn to_id(text: &str, span: &SourceSpan) -> Result<EntityId, ParseDiagnostic> {
    EntityId::new(text).map_err(|e| {
        ParseDiagnostic::error(DiagnosticCode::InvalidValue, span.clone(), e.to_string())
    })
}

fn string(attr: &Attribute) -> Result<String, ParseDiagnostic> {
    match &attr.value.value {
        Value::Str(s) => Ok(s.clone()),
        _ => Err(mismatch(attr, "a string")),
    }
}

fn boolean(attr: &Attribute) -> Result<bool, ParseDiagnostic> {
    match &attr.value.value {
        Value::Bool(b) => Ok(*b),
        _ => Err(mismatch(attr, "a boolean")),
    }
}

fn real(attr: &Attribute) -> Result<f64, ParseDiagnostic> {
    match &attr.value.value {
        Value::Number { value, .. } => Ok(*value),
        _ => Err(mismatch(attr, "a number")),
    }
}

fn integer(attr: &Attribute) -> Result<u8, ParseDiagnostic> {
    match &attr.value.value {
        Value::Number {
            text,
            fraction: false,
            ..
        } => text.parse::<u8>().map_err(|_| {
            ParseDiagnostic::error(
                DiagnosticCode::InvalidValue,
                attr.value.span.clone(),
                format!("'{}' is out of range for '{}'", text, attr.name.value),
            )
        }),
        _ => Err(mismatch(attr, "an integer")),
    }
}

fn reference(attr: &Attribute) -> Result<EntityId, ParseDiagnostic> {
    match &attr.value.value {
        Value::Name(n) => to_id(n, &attr.value.span),
        _ => Err(mismatch(attr, "an entity id")),
    }
}

fn id_list(attr: &Attribute) -> Result<Vec<EntityId>, ParseDiagnostic> {
    match &attr.value.value {
        Value::List(items) => items.iter().map(|i| to_id(&i.value, &i.span)).collect(),
        _ => Err(mismatch(attr, "a list of ids")),
    }
}

fn keyword<T: Copy>(
    attr: &Attribute,
    all: &[T],
    lookup: fn(&str) -> Option<T>,
    show: fn(T) -> &'static str,
) -> Result<T, ParseDiagnostic> {
    match &attr.value.value {
        Value::Name(n) => lookup(n).ok_or_else(|| {
            let options: Vec<&str> = all.iter().map(|v| show(*v)).collect();
            ParseDiagnostic::error(
                DiagnosticCode::InvalidValue,
                attr.value.span.clone(),
                format!(
                    "invalid value '{n}' for '{}' (expected one of: {})",
                    attr.name.value,
                    options.join(", ")
                ),
            )
        }),
        _ => Err(mismatch(attr, "a name")),
    }
}

enum Entity {
    Requirement(Requirement),
    Element(SolutionElement),
    TestCase(TestCase),
    Risk(Risk),
}

fn take<T>(diags: &mut Vec<ParseDiagnostic>, r: Result<T, ParseDiagnostic>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(d) => {
            diags.push(d);
            None
        }
    }
}

fn convert(decl: &EntityDecl) -> Result<Entity, Vec<ParseDiagnostic>> {
    let mut diags = Vec::new();
    let id = match to_id(&decl.id.value, &decl.id.span) {
        Ok(id) => id,
        Err(d) => return Err(vec![d]),
    };

    let entity = match decl.kind {
        EntityDeclKind::Requirement(class) => {
            let mut req = Requirement::new(id, class, String::new());
            for attr in &decl.attributes {
                match attr.name.value.as_str() {
                    "text" => req.text = take(&mut diags, string(attr)).unwrap_or_default(),
                    "source" => req.source = take(&mut diags, string(attr)),
                    "safety" => req.safety = take(&mut diags, boolean(attr)).unwrap_or(false),
                    "criticality" => {
                        req.criticality = take(
                            &mut diags,
                            keyword(
                                attr,
                                Criticality::ALL,
                                Criticality::from_keyword,
                                Criticality::keyword,
                            ),
                        )
                    }
                    "sil" => req.sil = take(&mut diags, integer(attr)),
                    "mtbf_hours" => req.mtbf_hours = take(&mut diags, real(attr)),
                    "mtbr_hours" => req.mtbr_hours = take(&mut diags, real(attr)),
                    "failure_rate_per_hour" => {
                        req.failure_rate_per_hour = take(&mut diags, real(attr))
                    }
                    "parent" => req.parent = take(&mut diags, reference(attr)),
                    _ => {}
                }
            }
            Entity::Requirement(req)
        }
        EntityDeclKind::Element(kind) => {
            let mut el = SolutionElement {
                id,
                kind,
                name: String::new(),
                connects: Vec::new(),
            };
            for attr in &decl.attributes {
                match attr.name.value.as_str() {
                    "name" => el.name = take(&mut diags, string(attr)).unwrap_or_default(),
                    "connects" => el.connects = take(&mut diags, id_list(attr)).unwrap_or_default(),
                    _ => {}
                }
            }
            Entity::Element(el)
        }
        EntityDeclKind::TestCase => {
            let method = decl.attribute("method").and_then(|a| {
                take(
                    &mut diags,
                    keyword(
                        a,
                        TestMethod::ALL,
                        TestMethod::from_keyword,
                        TestMethod::keyword,
                    ),
                )
            });
            let description = decl
                .attribute("description")
                .and_then(|a| take(&mut diags, string(a)));
            match method {
                Some(method) => Entity::TestCase(TestCase {
                    id,
                    method,
                    description,
                }),
                None => return Err(diags),
            }
        }
        EntityDeclKind::Risk => {
            let description = decl
                .attribute("description")
                .and_then(|a| take(&mut diags, string(a)));
            let severity = decl.attribute("severity").and_then(|a| {
                take(
                    &mut diags,
                    keyword(
                        a,
                        RiskSeverity::ALL,
                        RiskSeverity::from_keyword,
                        RiskSeverity::keyword,
                    ),
                )
            });
            let likelihood = decl.attribute("likelihood").and_then(|a| {
                take(
                    &mut diags,
                    keyword(
                        a,
                        Likelihood::ALL,
                        Likelihood::from_keyword,
                        Likelihood::keyword,
                    ),
                )
            });
            let tolerability = decl.attribute("tolerability").and_then(|a| {
                take(
                    &mut diags,
                    keyword(
                        a,
                        Tolerability::ALL,
                        Tolerability::from_keyword,
                        Tolerability::keyword,
                    ),
                )
            });
            match (description, severity, likelihood, tolerability) {
                (Some(description), Some(severity), Some(likelihood), Some(tolerability)) => {
                    Entity::Risk(Risk {
                        id,
                        description,
                        severity,
                        likelihood,
                        tolerability,
                    })
                }
                _ => return Err(diags),
            }
        }
    };
    if diags.is_empty() {
        Ok(entity)
    } else {
        Err(diags)
    }
}

/// Parses the rule list of a `tracekit:allow(R4, R6)` comment, if it is one.
fn allow_comment(text: &str) -> Option<&str> {
    text.trim()
        .strip_prefix(ALLOW_PREFIX)
        .and_then(|rest| rest.strip_suffix(')'))
}

fn location(span: &SourceSpan) -> SourceLocation {
    SourceLocation {
        file: span.file.clone(),
        line: span.line,
        column: span.column,
    }
}

fn model_error_diagnostic(err: &ModelError, span: SourceSpan) -> ParseDiagnostic {
    let code = match err {
        ModelError::DuplicateId { .. } => DiagnosticCode::DuplicateId,
        ModelError::UnknownReference { .. } => DiagnosticCode::UnknownReference,
        ModelError::DuplicateLink { .. } => DiagnosticCode::DuplicateLink,
        ModelError::CyclicParentChain { .. } => DiagnosticCode::CyclicParentChain,
        ModelError::Invariant { .. } | ModelError::NotARequirement(_) => {
            DiagnosticCode::InvariantViolation
        }
    };
    ParseDiagnostic::error(code, span, err.to_string())
}

/// Builds a [`Model`] from a syntax tree. Structural errors from model
/// construction are reported at the offending declaration.
pub fn resolve(tree: &SyntaxTree) -> Result<Model, Vec<ParseDiagnostic>> {
    let mut diags = Vec::new();
    let mut builder = ModelBuilder::new();
    // Declaration spans in builder order, one vector per site kind.
    let mut req_spans = Vec::new();
    let mut elem_spans = Vec::new();
    let mut tc_spans = Vec::new();
    let mut risk_spans = Vec::new();
    let mut link_spans = Vec::new();
    // (line, id) of every declaration, for attaching allow comments.
    let mut decl_lines: Vec<(u32, Option<EntityId>)> = Vec::new();

    for decl in &tree.declarations {
        match decl {
            Declaration::Entity(e) => match convert(e) {
                Ok(entity) => {
                    let span = e.span.clone();
                    match entity {
                        Entity::Requirement(r) => {
                            decl_lines.push((span.line, Some(r.id.clone())));
                            builder.requirements.push(r);
                            req_spans.push(span);
                        }
                        Entity::Element(el) => {
                            decl_lines.push((span.line, Some(el.id.clone())));
                            builder.elements.push(el);
                            elem_spans.push(span);
                        }
                        Entity::TestCase(t) => {
                            decl_lines.push((span.line, Some(t.id.clone())));
                            builder.testcases.push(t);
                            tc_spans.push(span);
                        }
                        Entity::Risk(r) => {
                            decl_lines.push((span.line, Some(r.id.clone())));
                            builder.risks.push(r);
                            risk_spans.push(span);
                        }
                    }
                }
                Err(mut d) => diags.append(&mut d),
            },
            Declaration::Link(l) => {
                let ends = to_id(&l.source.value, &l.source.span)
                    .and_then(|s| Ok((s, to_id(&l.target.value, &l.target.span)?)));
                match ends {
                    Ok((source, target)) => {
                        decl_lines.push((l.span.line, Some(source.clone())));
                        builder.links.push(Link::new(l.kind, source, target));
                        link_spans.push(l.span.clone());
                    }
                    Err(d) => diags.push(d),
                }
            }
        }
    }

    let mut sources = SourceMap::default();
    for comment in &tree.comments {
        let Some(list) = allow_comment(&comment.text) else {
            continue;
        };
        let span = SourceSpan::new(
            &tree.file,
            comment.line,
            comment.column,
            comment.text.chars().count() as u32 + 2,
        );
        let mut rules = BTreeSet::new();
        for name in list.split(',').map(str::trim) {
            match RuleId::parse(name) {
                Some(rule) => {
                    rules.insert(rule);
                }
                None => diags.push(ParseDiagnostic::error(
                    DiagnosticCode::UnknownRule,
                    span.clone(),
                    format!("unknown rule '{name}' in suppression comment"),
                )),
            }
        }
        // Same line as a declaration, or the line right above one.
        let target = decl_lines
            .iter()
            .find(|(line, _)| *line == comment.line)
            .or_else(|| {
                decl_lines
                    .iter()
                    .find(|(line, _)| *line == comment.line + 1)
            });
        if let Some((_, Some(id))) = target {
            sources.allows.entry(id.clone()).or_default().extend(rules);
        }
    }

    if !diags.is_empty() {
        return Err(diags);
    }

    let model = builder.build_all().map_err(|errors| {
        errors
            .iter()
            .map(|err| {
                let span = match err.site() {
                    Some(Site::Requirement(i)) => req_spans[i].clone(),
                    Some(Site::Element(i)) => elem_spans[i].clone(),
                    Some(Site::TestCase(i)) => tc_spans[i].clone(),
                    Some(Site::Risk(i)) => risk_spans[i].clone(),
                    Some(Site::Link(i)) => link_spans[i].clone(),
                    None => SourceSpan::new(&tree.file, 1, 1, 0),
                };
                model_error_diagnostic(err, span)
            })
            .collect::<Vec<_>>()
    })?;

    for (r, span) in model.requirements().iter().zip(&req_spans) {
        sources.entities.insert(r.id.clone(), location(span));
    }
    for (e, span) in model.elements().iter().zip(&elem_spans) {
        sources.entities.insert(e.id.clone(), location(span));
    }
    for (t, span) in model.testcases().iter().zip(&tc_spans) {
        sources.entities.insert(t.id.clone(), location(span));
    }
    for (r, span) in model.risks().iter().zip(&risk_spans) {
        sources.entities.insert(r.id.clone(), location(span));
    }
    sources.links = link_spans.iter().map(|s| Some(location(s))).collect();
    Ok(model.with_source_map(sources))
}
