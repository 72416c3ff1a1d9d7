//! The `.sreq` modeling language: lexer, parser, resolver and canonical
//! printer.
//!
//! `Derive A -> B` reads in flow direction: B is derived from A.

mod diagnostic;
mod lexer;
mod parser;
mod printer;
mod resolve;

pub use diagnostic::{DiagnosticCode, DiagnosticSeverity, ParseDiagnostic, SourceSpan};
pub use lexer::{lex, Comment, Keyword, Token, TokenKind, TokenStream};
pub use parser::{
    parse, Attribute, Declaration, EntityDecl, EntityDeclKind, LinkDecl, Spanned, SyntaxTree, Value,
};
pub use printer::print_canonical;
pub use resolve::resolve;

use crate::model::Model;

/// Runs lex, parse and resolve over one file's contents.
pub fn parse_model(input: &str, file: &str) -> Result<Model, Vec<ParseDiagnostic>> {
    let tokens = lex(input, file)?;
    let tree = parse(&tokens)?;
    resolve(&tree)
}
