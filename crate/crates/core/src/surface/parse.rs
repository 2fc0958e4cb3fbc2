//! Recursive-descent parser.
//!
//! Grammar, with `.` terminating every item:
//!
//! ```text
//! item  ::= IDENT ":" term "."
//!        |  "rule" "[" bindings? "]" term "-->" term "."
//!        |  "def" IDENT ":" term ":=" term "."
//!        |  "assert" term "==" term "."
//!        |  "assert" term ":" term "."
//!        |  "require" IDENT "."
//! bindings ::= IDENT ":" term ("," IDENT ":" term)*
//! term  ::= "\" "(" IDENT ":" term ")" "." term
//!        |  "(" IDENT ":" term ")" "->" term
//!        |  app ("->" term)?
//! app   ::= atom+
//! atom  ::= IDENT | "TYPE" | "(" term ")"
//! ```
//!
//! `A -> B` is a product whose binder does not occur in `B`. An identifier is
//! a variable when some enclosing binder (or rule binding) introduces it, and
//! a constant reference otherwise — the parser needs no signature to decide.

use crate::term::{arrow, cst, lam, pi, var, Context, Ident, Term};

use super::lex::{lex, Tok, Token};
use super::ParseError;

/// One syntactic item of a theory file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Const {
        name: Ident,
        ty: Term,
    },
    Rule {
        context: Context,
        lhs: Term,
        rhs: Term,
    },
    Def {
        name: Ident,
        ty: Term,
        body: Term,
    },
    AssertConv(Term, Term),
    AssertType(Term, Term),
    Require(Ident),
}

/// Which of the two translation witnesses a parameter-map line assigns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSide {
    Star,
    Plus,
}

/// One line of a parameter-map file: `name.star := term.` or
/// `name.plus := term.`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamEntry {
    pub name: Ident,
    pub side: ParamSide,
    pub term: Term,
}

pub fn parse_items(src: &str) -> Result<Vec<Item>, ParseError> {
    let mut p = Parser::new(lex(src)?);
    let mut items = Vec::new();
    while !p.at_end() {
        items.push(p.item()?);
    }
    Ok(items)
}

/// Parse a single closed term (free identifiers become constants).
pub fn parse_term_src(src: &str) -> Result<Term, ParseError> {
    parse_term_with(src, &[])
}

/// Parse a single term treating the listed names as variables.
pub fn parse_term_with(src: &str, vars: &[&str]) -> Result<Term, ParseError> {
    let mut p = Parser::new(lex(src)?);
    let mut scope: Vec<Ident> = vars.iter().map(|s| s.to_string()).collect();
    let t = p.term(&mut scope)?;
    if let Some(tok) = p.toks.get(p.pos) {
        return Err(ParseError::new(
            tok.line,
            tok.col,
            format!("expected end of input, found {}", tok.tok),
        ));
    }
    Ok(t)
}

pub fn parse_param_entries(src: &str) -> Result<Vec<ParamEntry>, ParseError> {
    let mut p = Parser::new(lex(src)?);
    let mut entries = Vec::new();
    while !p.at_end() {
        let name = p.ident("a constant name")?;
        p.expect(Tok::Dot)?;
        let side_name = p.ident("`star` or `plus`")?;
        let side = match side_name.as_str() {
            "star" => ParamSide::Star,
            "plus" => ParamSide::Plus,
            other => {
                let (line, col) = p.prev_pos();
                return Err(ParseError::new(
                    line,
                    col,
                    format!("expected `star` or `plus` after `{name}.`, found `{other}`"),
                ));
            }
        };
        p.expect(Tok::ColonEq)?;
        let term = p.term(&mut Vec::new())?;
        p.expect(Tok::Dot)?;
        entries.push(ParamEntry { name, side, term });
    }
    Ok(entries)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(toks: Vec<Token>) -> Self {
        Parser { toks, pos: 0 }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, ahead: usize) -> Option<&Tok> {
        self.toks.get(self.pos + ahead).map(|t| &t.tok)
    }

    fn prev_pos(&self) -> (u32, u32) {
        self.toks
            .get(self.pos.saturating_sub(1))
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1))
    }

    fn here(&self) -> (u32, u32) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or_else(|| self.prev_pos())
    }

    fn err(&self, expected: &str) -> ParseError {
        let (line, col) = self.here();
        let found = match self.peek() {
            Some(t) => format!("{t}"),
            None => "end of input".into(),
        };
        ParseError::new(line, col, format!("expected {expected}, found {found}"))
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(&format!("{tok}"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<Ident, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.advance().unwrap().tok {
                Tok::Ident(s) => Ok(s),
                _ => unreachable!(),
            },
            _ => Err(self.err(what)),
        }
    }

    fn item(&mut self) -> Result<Item, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let name = self.ident("a name")?;
                self.expect(Tok::Colon)?;
                let ty = self.term(&mut Vec::new())?;
                self.expect(Tok::Dot)?;
                Ok(Item::Const { name, ty })
            }
            Some(Tok::KwRule) => {
                self.advance();
                self.expect(Tok::LBracket)?;
                let mut scope: Vec<Ident> = Vec::new();
                let mut context = Context::new();
                if self.peek() != Some(&Tok::RBracket) {
                    loop {
                        let x = self.ident("a binding name")?;
                        self.expect(Tok::Colon)?;
                        let ty = self.term(&mut scope)?;
                        scope.push(x.clone());
                        context.push(x, ty);
                        if self.peek() == Some(&Tok::Comma) {
                            self.advance();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBracket)?;
                let lhs = self.term(&mut scope)?;
                self.expect(Tok::LongArrow)?;
                let rhs = self.term(&mut scope)?;
                self.expect(Tok::Dot)?;
                Ok(Item::Rule { context, lhs, rhs })
            }
            Some(Tok::KwDef) => {
                self.advance();
                let name = self.ident("a name")?;
                self.expect(Tok::Colon)?;
                let ty = self.term(&mut Vec::new())?;
                self.expect(Tok::ColonEq)?;
                let body = self.term(&mut Vec::new())?;
                self.expect(Tok::Dot)?;
                Ok(Item::Def { name, ty, body })
            }
            Some(Tok::KwAssert) => {
                self.advance();
                let lhs = self.term(&mut Vec::new())?;
                match self.peek() {
                    Some(Tok::EqEq) => {
                        self.advance();
                        let rhs = self.term(&mut Vec::new())?;
                        self.expect(Tok::Dot)?;
                        Ok(Item::AssertConv(lhs, rhs))
                    }
                    Some(Tok::Colon) => {
                        self.advance();
                        let ty = self.term(&mut Vec::new())?;
                        self.expect(Tok::Dot)?;
                        Ok(Item::AssertType(lhs, ty))
                    }
                    _ => Err(self.err("`==` or `:`")),
                }
            }
            Some(Tok::KwRequire) => {
                self.advance();
                let name = self.ident("a theory name")?;
                self.expect(Tok::Dot)?;
                Ok(Item::Require(name))
            }
            _ => Err(self.err("an item (declaration, `rule`, `def`, `assert`, or `require`)")),
        }
    }

    fn term(&mut self, scope: &mut Vec<Ident>) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::Backslash) => {
                self.advance();
                self.expect(Tok::LParen)?;
                let x = self.ident("a binder name")?;
                self.expect(Tok::Colon)?;
                let ann = self.term(scope)?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Dot)?;
                scope.push(x.clone());
                let body = self.term(scope);
                scope.pop();
                Ok(lam(x, ann, body?))
            }
            Some(Tok::LParen)
                if matches!(self.peek_at(1), Some(Tok::Ident(_)))
                    && self.peek_at(2) == Some(&Tok::Colon) =>
            {
                self.advance();
                let x = self.ident("a binder name")?;
                self.expect(Tok::Colon)?;
                let dom = self.term(scope)?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Arrow)?;
                scope.push(x.clone());
                let cod = self.term(scope);
                scope.pop();
                Ok(pi(x, dom, cod?))
            }
            _ => {
                let head = self.app(scope)?;
                if self.peek() == Some(&Tok::Arrow) {
                    self.advance();
                    let cod = self.term(scope)?;
                    Ok(arrow(head, cod))
                } else {
                    Ok(head)
                }
            }
        }
    }

    fn app(&mut self, scope: &mut Vec<Ident>) -> Result<Term, ParseError> {
        let mut t = self.atom(scope)?;
        loop {
            match self.peek() {
                Some(Tok::Ident(_)) | Some(Tok::KwType) | Some(Tok::LParen) => {
                    let a = self.atom(scope)?;
                    t = Term::App(Box::new(t), Box::new(a));
                }
                _ => return Ok(t),
            }
        }
    }

    fn atom(&mut self, scope: &mut Vec<Ident>) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::KwType) => {
                self.advance();
                Ok(Term::Sort(crate::term::Sort::Type))
            }
            Some(Tok::Ident(_)) => {
                let name = self.ident("a term")?;
                if scope.contains(&name) {
                    Ok(var(name))
                } else {
                    Ok(cst(name))
                }
            }
            Some(Tok::LParen) => {
                self.advance();
                let t = self.term(scope)?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => Err(self.err("a term")),
        }
    }
}
