//! Recursive-descent parser producing a [`SyntaxTree`].
//!
//! ```text
//! model       := decl*
//! decl        := req | elem | tc | risk | link
//! req         := "requirement" ID ":" reqclass "{" attr* "}"
//! reqclass    := "acquirer" | "stakeholder" | "technical" | "specified"
//! elem        := "element" ID ":" ("logical"|"physical"|"interface") "{" attr* "}"
//! tc          := "testcase" ID "{" attr* "}"
//! risk        := "risk" ID "{" attr* "}"
//! link        := "link" linkkind ID "->" ID
//! linkkind    := "derive"|"refine"|"satisfy"|"verify"|"specify"|"allocate"|"covers"
//! attr        := NAME ":" value ","?
//! value       := STRING | NUMBER | BOOL | NAME | "[" ID ("," ID)* "]"
//! ```
//!
//! On error the parser records a diagnostic, skips to the next token that
//! opens a declaration and carries on.

use super::diagnostic::{DiagnosticCode, ParseDiagnostic, SourceSpan};
use super::lexer::{Comment, Keyword, Token, TokenKind, TokenStream};
use crate::model::{ElementKind, LinkKind, RequirementClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntityDeclKind {
    Requirement(RequirementClass),
    Element(ElementKind),
    TestCase,
    Risk,
}

impl EntityDeclKind {
    fn noun(self) -> &'static str {
        match self {
            EntityDeclKind::Requirement(_) => "requirement",
            EntityDeclKind::Element(_) => "element",
            EntityDeclKind::TestCase => "testcase",
            EntityDeclKind::Risk => "risk",
        }
    }

    /// Attribute vocabulary as `(name, required)`, in canonical order.
    pub fn attributes(self) -> &'static [(&'static str, bool)] {
        match self {
            EntityDeclKind::Requirement(_) => &[
                ("text", true),
                ("source", false),
                ("safety", false),
                ("criticality", false),
                ("sil", false),
                ("mtbf_hours", false),
                ("mtbr_hours", false),
                ("failure_rate_per_hour", false),
                ("parent", false),
            ],
            EntityDeclKind::Element(_) => &[("name", true), ("connects", false)],
            EntityDeclKind::TestCase => &[("method", true), ("description", false)],
            EntityDeclKind::Risk => &[
                ("description", true),
                ("severity", true),
                ("likelihood", true),
                ("tolerability", true),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spanned<T> {
    pub value: T,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Str(String),
    Number {
        text: String,
        value: f64,
        fraction: bool,
    },
    Bool(bool),
    Name(String),
    List(Vec<Spanned<String>>),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Str(_) => "string",
            Value::Number { .. } => "number",
            Value::Bool(_) => "boolean",
            Value::Name(_) => "name",
            Value::List(_) => "list",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: Spanned<String>,
    pub value: Spanned<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntityDecl {
    pub kind: EntityDeclKind,
    pub id: Spanned<String>,
    pub attributes: Vec<Attribute>,
    /// Span of the opening keyword.
    pub span: SourceSpan,
}

impl EntityDecl {
    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name.value == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkDecl {
    pub kind: LinkKind,
    pub source: Spanned<String>,
    pub target: Spanned<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Declaration {
    Entity(EntityDecl),
    Link(LinkDecl),
}

impl Declaration {
    pub fn span(&self) -> &SourceSpan {
        match self {
            Declaration::Entity(e) => &e.span,
            Declaration::Link(l) => &l.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntaxTree {
    pub file: String,
    /// In file order.
    pub declarations: Vec<Declaration>,
    pub comments: Vec<Comment>,
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    diags: Vec<ParseDiagnostic>,
}

type Parse<T> = Result<T, ParseDiagnostic>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &'a Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> &'a Token {
        let t = self.peek();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn unexpected(&self, expected: &str) -> ParseDiagnostic {
        let t = self.peek();
        ParseDiagnostic::error(
            DiagnosticCode::UnexpectedToken,
            t.span.clone(),
            format!("expected {expected}, found {}", t.kind),
        )
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> Parse<&'a Token> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            Err(self.unexpected(expected))
        }
    }

    /// Any identifier-like token; keywords are accepted in id position.
    fn expect_word(&mut self, expected: &str) -> Parse<Spanned<String>> {
        let t = self.peek();
        match t.kind.word() {
            Some(w) => {
                self.advance();
                Ok(Spanned {
                    value: w.to_owned(),
                    span: t.span.clone(),
                })
            }
            None => Err(self.unexpected(expected)),
        }
    }

    /// Skips to the next declaration keyword, always moving past `start`.
    fn recover(&mut self, start: usize) {
        if self.pos == start {
            self.advance();
        }
        while !self.at_eof() {
            if let TokenKind::Keyword(kw, _) = &self.peek().kind {
                if kw.starts_declaration() {
                    return;
                }
            }
            self.advance();
        }
    }

    fn declaration(&mut self) -> Parse<Declaration> {
        let start = self.peek();
        let kw = match &start.kind {
            TokenKind::Keyword(kw, _) if kw.starts_declaration() => *kw,
            _ => {
                return Err(self.unexpected(
                    "a declaration ('requirement', 'element', 'testcase', 'risk' or 'link')",
                ))
            }
        };
        self.advance();
        match kw {
            Keyword::Link => self.link(start.span.clone()).map(Declaration::Link),
            Keyword::Requirement => {
                let id = self.expect_word("a requirement id")?;
                self.expect(TokenKind::Colon, "':'")?;
                let class = self.class_word(
                    "a requirement class ('acquirer', 'stakeholder', 'technical' or 'specified')",
                    RequirementClass::from_keyword,
                )?;
                self.entity_body(EntityDeclKind::Requirement(class), id, start.span.clone())
            }
            Keyword::Element => {
                let id = self.expect_word("an element id")?;
                self.expect(TokenKind::Colon, "':'")?;
                let kind = self.class_word(
                    "an element kind ('logical', 'physical' or 'interface')",
                    ElementKind::from_keyword,
                )?;
                self.entity_body(EntityDeclKind::Element(kind), id, start.span.clone())
            }
            Keyword::Testcase => {
                let id = self.expect_word("a testcase id")?;
                self.entity_body(EntityDeclKind::TestCase, id, start.span.clone())
            }
            _ => {
                let id = self.expect_word("a risk id")?;
                self.entity_body(EntityDeclKind::Risk, id, start.span.clone())
            }
        }
    }

    fn class_word<T>(&mut self, expected: &str, lookup: fn(&str) -> Option<T>) -> Parse<T> {
        match self.peek().kind.word().and_then(lookup) {
            Some(v) => {
                self.advance();
                Ok(v)
            }
            None => Err(self.unexpected(expected)),
        }
    }

    fn link(&mut self, span: SourceSpan) -> Parse<LinkDecl> {
        let kind = self.class_word(
            "a link kind ('derive', 'refine', 'satisfy', 'verify', 'specify', 'allocate' or 'covers')",
            LinkKind::from_keyword,
        )?;
        let source = self.expect_word("a source id")?;
        self.expect(TokenKind::Arrow, "'->'")?;
        let target = self.expect_word("a target id")?;
        Ok(LinkDecl {
            kind,
            source,
            target,
            span,
        })
    }

    fn entity_body(
        &mut self,
        kind: EntityDeclKind,
        id: Spanned<String>,
        span: SourceSpan,
    ) -> Parse<Declaration> {
        self.expect(TokenKind::LBrace, "'{'")?;
        let vocabulary = kind.attributes();
        let mut attributes: Vec<Attribute> = Vec::new();
        loop {
            if self.peek().kind == TokenKind::RBrace {
                self.advance();
                break;
            }
            if matches!(&self.peek().kind, TokenKind::Keyword(kw, _) if kw.starts_declaration()) {
                // Most likely a missing '}'; leave the keyword for recovery.
                return Err(self.unexpected("an attribute name or '}'"));
            }
            let name = self.expect_word("an attribute name or '}'")?;
            if !vocabulary.iter().any(|(n, _)| *n == name.value) {
                let known: Vec<&str> = vocabulary.iter().map(|(n, _)| *n).collect();
                return Err(ParseDiagnostic::error(
                    DiagnosticCode::UnknownAttribute,
                    name.span,
                    format!(
                        "unknown attribute '{}' on {} (expected one of: {})",
                        name.value,
                        kind.noun(),
                        known.join(", ")
                    ),
                ));
            }
            if attributes.iter().any(|a| a.name.value == name.value) {
                return Err(ParseDiagnostic::error(
                    DiagnosticCode::DuplicateAttribute,
                    name.span,
                    format!("attribute '{}' given more than once", name.value),
                ));
            }
            self.expect(TokenKind::Colon, "':'")?;
            let value = self.value()?;
            attributes.push(Attribute { name, value });
            if self.peek().kind == TokenKind::Comma {
                self.advance();
            }
        }
        for (name, required) in vocabulary {
            if *required && !attributes.iter().any(|a| a.name.value == *name) {
                return Err(ParseDiagnostic::error(
                    DiagnosticCode::MissingAttribute,
                    span,
                    format!(
                        "{} '{}' is missing required attribute '{}'",
                        kind.noun(),
                        id.value,
                        name
                    ),
                ));
            }
        }
        Ok(Declaration::Entity(EntityDecl {
            kind,
            id,
            attributes,
            span,
        }))
    }

    fn value(&mut self) -> Parse<Spanned<Value>> {
        let t = self.peek();
        let value = match &t.kind {
            TokenKind::Str(s) => Value::Str(s.clone()),
            TokenKind::Number {
                text,
                value,
                fraction,
            } => Value::Number {
                text: text.clone(),
                value: *value,
                fraction: *fraction,
            },
            TokenKind::Bool(b) => Value::Bool(*b),
            TokenKind::Keyword(_, w) | TokenKind::Ident(w) => Value::Name(w.clone()),
            TokenKind::LBracket => {
                self.advance();
                let mut items = vec![self.expect_word("an id")?];
                loop {
                    match self.peek().kind {
                        TokenKind::Comma => {
                            self.advance();
                            items.push(self.expect_word("an id")?);
                        }
                        TokenKind::RBracket => break,
                        _ => return Err(self.unexpected("',' or ']'")),
                    }
                }
                let end = self.advance();
                let length = if end.span.line == t.span.line {
                    end.span.column + 1 - t.span.column
                } else {
                    1
                };
                return Ok(Spanned {
                    value: Value::List(items),
                    span: SourceSpan {
                        length,
                        ..t.span.clone()
                    },
                });
            }
            _ => return Err(self.unexpected("a value")),
        };
        self.advance();
        Ok(Spanned {
            value,
            span: t.span.clone(),
        })
    }
}

/// Parses a token stream. Every syntax error is reported; a stream with any
/// error yields only diagnostics.
pub fn parse(stream: &TokenStream) -> Result<SyntaxTree, Vec<ParseDiagnostic>> {
    let mut parser = Parser {
        tokens: &stream.tokens,
        pos: 0,
        diags: Vec::new(),
    };
    let mut declarations = Vec::new();
    while !parser.at_eof() {
        let start = parser.pos;
        match parser.declaration() {
            Ok(d) => declarations.push(d),
            Err(d) => {
                parser.diags.push(d);
                parser.recover(start);
            }
        }
    }
    if parser.diags.is_empty() {
        Ok(SyntaxTree {
            file: stream.file.clone(),
            declarations,
            comments: stream.comments.clone(),
        })
    } else {
        Err(parser.diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::lexer::lex;

    fn parse_str(src: &str) -> Result<SyntaxTree, Vec<ParseDiagnostic>> {
        parse(&lex(src, "t.sreq").unwrap())
    }

    #[test]
    fn link_declaration() {
        let tree = parse_str("link covers SR-9 -> RK-1").unwrap();
        match &tree.declarations[0] {
            Declaration::Link(l) => {
                assert_eq!(l.kind, LinkKind::Covers);
                assert_eq!(l.source.value, "SR-9");
                assert_eq!(l.target.value, "RK-1");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_requirement_class() {
        let d = parse_str("requirement X : bogus { }").unwrap_err();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, DiagnosticCode::UnexpectedToken);
        assert!(d[0].message.contains("requirement class"));
        assert_eq!(d[0].span.column, 17);
    }

    #[test]
    fn recovery_reports_each_malformed_declaration() {
        let src = "requirement A : acquirer { text: }\n\
                   risk R { description \"x\" }\n\
                   link derive A -> B\n";
        let d = parse_str(src).unwrap_err();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].span.line, 1);
        assert_eq!(d[1].span.line, 2);
    }

    #[test]
    fn unknown_and_missing_attributes() {
        let d = parse_str("testcase T { methd: test }").unwrap_err();
        assert_eq!(d[0].code, DiagnosticCode::UnknownAttribute);
        let d = parse_str("testcase T { description: \"x\" }").unwrap_err();
        assert_eq!(d[0].code, DiagnosticCode::MissingAttribute);
        assert!(d[0].message.contains("method"));
        let d = parse_str("testcase T { method: test method: review }").unwrap_err();
        assert_eq!(d[0].code, DiagnosticCode::DuplicateAttribute);
    }

    #[test]
    fn list_values() {
        let tree = parse_str("element I : interface { name: \"bus\" connects: [P1, P2] }").unwrap();
        let Declaration::Entity(e) = &tree.declarations[0] else {
            panic!()
        };
        match &e.attribute("connects").unwrap().value.value {
            Value::List(items) => {
                let ids: Vec<&str> = items.iter().map(|i| i.value.as_str()).collect();
                assert_eq!(ids, ["P1", "P2"]);
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_str("element I : interface { name: \"b\" connects: [] }").is_err());
    }

    #[test]
    fn keywords_usable_as_ids() {
        let tree = parse_str("risk link { description: \"d\" severity: minor likelihood: remote tolerability: acceptable }").unwrap();
        let Declaration::Entity(e) = &tree.declarations[0] else {
            panic!()
        };
        assert_eq!(e.id.value, "link");
    }

    #[test]
    fn garbage_terminates() {
        let d = parse_str("} } { : -> , [ ] requirement").unwrap_err();
        assert!(!d.is_empty());
    }
}
