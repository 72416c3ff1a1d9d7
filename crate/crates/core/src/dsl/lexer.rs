use std::fmt;

use super::diagnostic::{DiagnosticCode, ParseDiagnostic, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Requirement,
    Element,
    Interface,
    Testcase,
    Risk,
    Link,
    Derive,
    Refine,
    Satisfy,
    Verify,
    Specify,
    Allocate,
    Covers,
    Acquirer,
    Stakeholder,
    Technical,
    Specified,
    Logical,
    Physical,
}

impl Keyword {
    pub fn from_word(word: &str) -> Option<Self> {
        use Keyword::*;
        Some(match word {
            "requirement" => Requirement,
            "element" => Element,
            "interface" => Interface,
            "testcase" => Testcase,
            "risk" => Risk,
            "link" => Link,
            "derive" => Derive,
            "refine" => Refine,
            "satisfy" => Satisfy,
            "verify" => Verify,
            "specify" => Specify,
            "allocate" => Allocate,
            "covers" => Covers,
            "acquirer" => Acquirer,
            "stakeholder" => Stakeholder,
            "technical" => Technical,
            "specified" => Specified,
            "logical" => Logical,
            "physical" => Physical,
            _ => return None,
        })
    }

    /// Keywords that open a top-level declaration.
    pub fn starts_declaration(self) -> bool {
        matches!(
            self,
            Keyword::Requirement
                | Keyword::Element
                | Keyword::Testcase
                | Keyword::Risk
                | Keyword::Link
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    /// Carries the source word so keywords can double as identifiers.
    Keyword(Keyword, String),
    Ident(String),
    Str(String),
    /// `text` is the literal as written; `fraction` is set when it had a `.`.
    Number {
        text: String,
        value: f64,
        fraction: bool,
    },
    Bool(bool),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Arrow,
    Eof,
}

impl TokenKind {
    /// The word for identifier-like tokens (identifiers, keywords, booleans).
    pub fn word(&self) -> Option<&str> {
        match self {
            TokenKind::Keyword(_, w) | TokenKind::Ident(w) => Some(w),
            TokenKind::Bool(true) => Some("true"),
            TokenKind::Bool(false) => Some("false"),
            _ => None,
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(_, w) => write!(f, "keyword '{w}'"),
            TokenKind::Ident(w) => write!(f, "identifier '{w}'"),
            TokenKind::Str(_) => f.write_str("string literal"),
            TokenKind::Number { text, .. } => write!(f, "number '{text}'"),
            TokenKind::Bool(b) => write!(f, "'{b}'"),
            TokenKind::LBrace => f.write_str("'{'"),
            TokenKind::RBrace => f.write_str("'}'"),
            TokenKind::LBracket => f.write_str("'['"),
            TokenKind::RBracket => f.write_str("']'"),
            TokenKind::Colon => f.write_str("':'"),
            TokenKind::Comma => f.write_str("','"),
            TokenKind::Arrow => f.write_str("'->'"),
            TokenKind::Eof => f.write_str("end of file"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

/// A `//` comment, kept for suppression annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    /// Text after the `//`.
    pub text: String,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TokenStream {
    pub file: String,
    /// Always ends with an [`TokenKind::Eof`] token.
    pub tokens: Vec<Token>,
    pub comments: Vec<Comment>,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

/// Splits `input` into tokens. All lexical errors are collected; on any
/// error the diagnostics are returned instead of the stream.
pub fn lex(input: &str, file: &str) -> Result<TokenStream, Vec<ParseDiagnostic>> {
    let mut cur = Cursor {
        chars: input.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    let mut comments = Vec::new();
    let mut diags = Vec::new();

    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        let span = |len: u32| SourceSpan::new(file, line, column, len);

        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek2() == Some('/') {
            cur.bump();
            cur.bump();
            let mut text = String::new();
            while let Some(ch) = cur.peek() {
                if ch == '\n' {
                    break;
                }
                text.push(ch);
                cur.bump();
            }
            if text.ends_with('\r') {
                text.pop();
            }
            comments.push(Comment { text, line, column });
            continue;
        }

        let single = match c {
            '{' => Some(TokenKind::LBrace),
            '}' => Some(TokenKind::RBrace),
            '[' => Some(TokenKind::LBracket),
            ']' => Some(TokenKind::RBracket),
            ':' => Some(TokenKind::Colon),
            ',' => Some(TokenKind::Comma),
            _ => None,
        };
        if let Some(kind) = single {
            cur.bump();
            tokens.push(Token {
                kind,
                span: span(1),
            });
            continue;
        }

        if c == '-' && cur.peek2() == Some('>') {
            cur.bump();
            cur.bump();
            tokens.push(Token {
                kind: TokenKind::Arrow,
                span: span(2),
            });
            continue;
        }

        if c == '"' {
            cur.bump();
            let mut value = String::new();
            let mut len = 1u32;
            let mut terminated = false;
            while let Some(ch) = cur.bump() {
                len += 1;
                match ch {
                    '"' => {
                        terminated = true;
                        break;
                    }
                    '\\' => {
                        let (el, ec) = (cur.line, cur.column - 1);
                        match cur.peek() {
                            Some(e @ ('"' | '\\')) => {
                                cur.bump();
                                len += 1;
                                value.push(e);
                            }
                            other => {
                                let shown = other.map(|o| o.to_string()).unwrap_or_default();
                                diags.push(ParseDiagnostic::error(
                                    DiagnosticCode::InvalidEscape,
                                    SourceSpan::new(file, el, ec, 2),
                                    format!("invalid escape '\\{shown}': only \\\" and \\\\ are allowed"),
                                ));
                            }
                        }
                    }
                    other => value.push(other),
                }
            }
            if terminated {
                tokens.push(Token {
                    kind: TokenKind::Str(value),
                    span: span(len),
                });
            } else {
                diags.push(ParseDiagnostic::error(
                    DiagnosticCode::UnterminatedString,
                    span(1),
                    "unterminated string literal",
                ));
            }
            continue;
        }

        if c.is_ascii_digit() {
            let mut text = String::new();
            let mut malformed = false;
            while let Some(ch) = cur.peek() {
                if ch.is_ascii_digit() {
                    text.push(ch);
                    cur.bump();
                } else {
                    break;
                }
            }
            let mut fraction = false;
            if cur.peek() == Some('.') {
                fraction = true;
                text.push('.');
                cur.bump();
                let before = text.len();
                while let Some(ch) = cur.peek() {
                    if ch.is_ascii_digit() {
                        text.push(ch);
                        cur.bump();
                    } else {
                        break;
                    }
                }
                malformed |= text.len() == before;
            }
            // Trailing junk such as `1.2.3` or `12ab` belongs to the same literal.
            while let Some(ch) = cur.peek() {
                if ch.is_ascii_alphanumeric() || ch == '.' || ch == '_' {
                    malformed = true;
                    text.push(ch);
                    cur.bump();
                } else {
                    break;
                }
            }
            let len = text.chars().count() as u32;
            match text.parse::<f64>() {
                Ok(value) if !malformed && value.is_finite() => tokens.push(Token {
                    kind: TokenKind::Number {
                        text,
                        value,
                        fraction,
                    },
                    span: span(len),
                }),
                _ => diags.push(ParseDiagnostic::error(
                    DiagnosticCode::MalformedNumber,
                    span(len),
                    format!("malformed number '{text}'"),
                )),
            }
            continue;
        }

        if c.is_ascii_alphabetic() {
            let mut word = String::new();
            while let Some(ch) = cur.peek() {
                let arrow_next = ch == '-' && cur.peek2() == Some('>');
                if (ch.is_ascii_alphanumeric() || ch == '_' || ch == '-') && !arrow_next {
                    word.push(ch);
                    cur.bump();
                } else {
                    break;
                }
            }
            let len = word.len() as u32;
            let kind = match word.as_str() {
                "true" => TokenKind::Bool(true),
                "false" => TokenKind::Bool(false),
                w => match Keyword::from_word(w) {
                    Some(kw) => TokenKind::Keyword(kw, word),
                    None => TokenKind::Ident(word),
                },
            };
            tokens.push(Token {
                kind,
                span: span(len),
            });
            continue;
        }

        cur.bump();
        diags.push(ParseDiagnostic::error(
            DiagnosticCode::InvalidCharacter,
            span(1),
            format!("invalid character {c:?}"),
        ));
    }

    if !diags.is_empty() {
        return Err(diags);
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        span: SourceSpan::new(file, cur.line, cur.column, 0),
    });
    Ok(TokenStream {
        file: file.to_owned(),
        tokens,
        comments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        lex(src, "t.sreq")
            .unwrap()
            .tokens
            .into_iter()
            .map(|t| t.kind)
            .collect()
    }

    #[test]
    fn requirement_header() {
        let k = kinds("requirement AR-1 : acquirer { }");
        assert_eq!(
            k,
            vec![
                TokenKind::Keyword(Keyword::Requirement, "requirement".into()),
                TokenKind::Ident("AR-1".into()),
                TokenKind::Colon,
                TokenKind::Keyword(Keyword::Acquirer, "acquirer".into()),
                TokenKind::LBrace,
                TokenKind::RBrace,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn unterminated_string() {
        let d = lex("\"unterminated", "t.sreq").unwrap_err();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, DiagnosticCode::UnterminatedString);
        assert_eq!((d[0].span.line, d[0].span.column), (1, 1));
    }

    #[test]
    fn comment_skipped() {
        let ts = lex("// note\nrisk R1 { }", "t.sreq").unwrap();
        assert_eq!(ts.tokens[0].span.line, 2);
        assert_eq!(ts.tokens[0].span.column, 1);
        assert_eq!(ts.comments[0].text, " note");
    }

    #[test]
    fn arrow_without_spaces() {
        let k = kinds("link derive A-1->B");
        assert_eq!(k[2], TokenKind::Ident("A-1".into()));
        assert_eq!(k[3], TokenKind::Arrow);
        assert_eq!(k[4], TokenKind::Ident("B".into()));
    }

    #[test]
    fn numbers() {
        assert!(matches!(
            kinds("3")[0],
            TokenKind::Number { value, fraction: false, .. } if value == 3.0
        ));
        assert!(matches!(
            kinds("0.25")[0],
            TokenKind::Number { value, fraction: true, .. } if value == 0.25
        ));
        for bad in ["1.", "1.2.3", "12ab"] {
            let d = lex(bad, "t").unwrap_err();
            assert_eq!(d[0].code, DiagnosticCode::MalformedNumber, "{bad}");
        }
    }

    #[test]
    fn escapes() {
        assert_eq!(kinds(r#""a\"b\\c""#)[0], TokenKind::Str("a\"b\\c".into()));
        let d = lex(r#""a\nb""#, "t").unwrap_err();
        assert_eq!(d[0].code, DiagnosticCode::InvalidEscape);
    }

    #[test]
    fn non_ascii_only_in_strings_and_comments() {
        assert!(lex("// ünïcode\nrisk R { description: \"é\" }", "t").is_ok());
        let d = lex("risk Ré {}", "t").unwrap_err();
        assert_eq!(d[0].code, DiagnosticCode::InvalidCharacter);
        assert_eq!(d[0].span.column, 7);
    }

    #[test]
    fn crlf_line_counting() {
        let ts = lex("risk A {\r\n}\r\nlink", "t").unwrap();
        assert_eq!(ts.tokens[3].span.line, 2);
        assert_eq!(ts.tokens[4].span.line, 3);
    }

    #[test]
    fn collects_all_lexical_errors() {
        let d = lex("# $ 1.", "t").unwrap_err();
        assert_eq!(d.len(), 3);
    }
}
