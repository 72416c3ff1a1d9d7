use std::fmt::Write;

use crate::model::{Link, Model};

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Emits the model in canonical form: requirements, elements, test cases
/// and risks, each sorted by id; then links sorted by (kind, source,
/// target). Attributes appear in a fixed order with 2-space indentation.
pub fn print_canonical(model: &Model) -> String {
    let mut blocks: Vec<String> = Vec::new();

    let mut reqs: Vec<_> = model.requirements().iter().collect();
    reqs.sort_by(|a, b| a.id.cmp(&b.id));
    for r in reqs {
        let mut b = format!("requirement {} : {} {{\n", r.id, r.class);
        let _ = writeln!(b, "  text: {}", quote(&r.text));
        if let Some(s) = &r.source {
            let _ = writeln!(b, "  source: {}", quote(s));
        }
        if r.safety {
            b.push_str("  safety: true\n");
        }
        if let Some(c) = r.criticality {
            let _ = writeln!(b, "  criticality: {c}");
        }
        if let Some(sil) = r.sil {
            let _ = writeln!(b, "  sil: {sil}");
        }
        for (name, value) in [
            ("mtbf_hours", r.mtbf_hours),
            ("mtbr_hours", r.mtbr_hours),
            ("failure_rate_per_hour", r.failure_rate_per_hour),
        ] {
            if let Some(v) = value {
                // f64 Display is the shortest exact decimal and never uses exponents.
                let _ = writeln!(b, "  {name}: {v}");
            }
        }
        if let Some(p) = &r.parent {
            let _ = writeln!(b, "  parent: {p}");
        }
        b.push('}');
        blocks.push(b);
    }

    let mut elements: Vec<_> = model.elements().iter().collect();
    elements.sort_by(|a, b| a.id.cmp(&b.id));
    for e in elements {
        let mut b = format!("element {} : {} {{\n", e.id, e.kind);
        let _ = writeln!(b, "  name: {}", quote(&e.name));
        if !e.connects.is_empty() {
            let ids: Vec<&str> = e.connects.iter().map(|c| c.as_str()).collect();
            let _ = writeln!(b, "  connects: [{}]", ids.join(", "));
        }
        b.push('}');
        blocks.push(b);
    }

    let mut tcs: Vec<_> = model.testcases().iter().collect();
    tcs.sort_by(|a, b| a.id.cmp(&b.id));
    for t in tcs {
        let mut b = format!("testcase {} {{\n", t.id);
        let _ = writeln!(b, "  method: {}", t.method);
        if let Some(d) = &t.description {
            let _ = writeln!(b, "  description: {}", quote(d));
        }
        b.push('}');
        blocks.push(b);
    }

    let mut risks: Vec<_> = model.risks().iter().collect();
    risks.sort_by(|a, b| a.id.cmp(&b.id));
    for r in risks {
        blocks.push(format!(
            "risk {} {{\n  description: {}\n  severity: {}\n  likelihood: {}\n  tolerability: {}\n}}",
            r.id,
            quote(&r.description),
            r.severity,
            r.likelihood,
            r.tolerability
        ));
    }

    let mut links: Vec<&Link> = model.links().iter().collect();
    links.sort();
    if !links.is_empty() {
        let lines: Vec<String> = links.iter().map(|l| format!("link {l}")).collect();
        blocks.push(lines.join("\n"));
    }

    if blocks.is_empty() {
        return String::new();
    }
    let mut out = blocks.join("\n\n");
    out.push('\n');
    out
}
