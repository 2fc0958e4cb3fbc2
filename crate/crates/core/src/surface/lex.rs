//! Tokenizer for the theory file syntax.
//!
//! Identifiers start with a letter or underscore and continue with letters,
//! digits, underscores, or primes (`'`); primes never start an identifier,
//! which keeps a namespace of derived names available to the translation
//! while still letting its output be read back in. Comments are `(;` … `;)`
//! and nest.

use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    KwRule,
    KwDef,
    KwAssert,
    KwRequire,
    KwType,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    ColonEq,
    Dot,
    Comma,
    Arrow,
    LongArrow,
    EqEq,
    Backslash,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::KwRule => write!(f, "`rule`"),
            Tok::KwDef => write!(f, "`def`"),
            Tok::KwAssert => write!(f, "`assert`"),
            Tok::KwRequire => write!(f, "`require`"),
            Tok::KwType => write!(f, "`TYPE`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::ColonEq => write!(f, "`:=`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::LongArrow => write!(f, "`-->`"),
            Tok::EqEq => write!(f, "`==`"),
            Tok::Backslash => write!(f, "`\\`"),
        }
    }
}

/// A token with its 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if let Some(c) = c {
                if c == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if is_ident_start(c) {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if is_ident_continue(c) {
                    s.push(c);
                    bump!();
                } else {
                    break;
                }
            }
            let tok = match s.as_str() {
                "rule" => Tok::KwRule,
                "def" => Tok::KwDef,
                "assert" => Tok::KwAssert,
                "require" => Tok::KwRequire,
                "TYPE" => Tok::KwType,
                _ => Tok::Ident(s),
            };
            out.push(Token {
                tok,
                line: tline,
                col: tcol,
            });
            continue;
        }
        match c {
            '(' => {
                bump!();
                if chars.peek() == Some(&';') {
                    bump!();
                    // Nested comment: scan for the matching `;)`.
                    let mut depth = 1usize;
                    loop {
                        match bump!() {
                            None => {
                                return Err(ParseError::new(
                                    tline,
                                    tcol,
                                    "unterminated comment".into(),
                                ))
                            }
                            Some(';') => {
                                if chars.peek() == Some(&')') {
                                    bump!();
                                    depth -= 1;
                                    if depth == 0 {
                                        break;
                                    }
                                }
                            }
                            Some('(') => {
                                if chars.peek() == Some(&';') {
                                    bump!();
                                    depth += 1;
                                }
                            }
                            Some(_) => {}
                        }
                    }
                } else {
                    out.push(Token {
                        tok: Tok::LParen,
                        line: tline,
                        col: tcol,
                    });
                }
            }
            ')' => {
                bump!();
                out.push(Token {
                    tok: Tok::RParen,
                    line: tline,
                    col: tcol,
                });
            }
            '[' => {
                bump!();
                out.push(Token {
                    tok: Tok::LBracket,
                    line: tline,
                    col: tcol,
                });
            }
            ']' => {
                bump!();
                out.push(Token {
                    tok: Tok::RBracket,
                    line: tline,
                    col: tcol,
                });
            }
            '.' => {
                bump!();
                out.push(Token {
                    tok: Tok::Dot,
                    line: tline,
                    col: tcol,
                });
            }
            ',' => {
                bump!();
                out.push(Token {
                    tok: Tok::Comma,
                    line: tline,
                    col: tcol,
                });
            }
            '\\' => {
                bump!();
                out.push(Token {
                    tok: Tok::Backslash,
                    line: tline,
                    col: tcol,
                });
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    out.push(Token {
                        tok: Tok::ColonEq,
                        line: tline,
                        col: tcol,
                    });
                } else {
                    out.push(Token {
                        tok: Tok::Colon,
                        line: tline,
                        col: tcol,
                    });
                }
            }
            '=' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    out.push(Token {
                        tok: Tok::EqEq,
                        line: tline,
                        col: tcol,
                    });
                } else {
                    return Err(ParseError::new(
                        tline,
                        tcol,
                        "expected `==` (single `=` is not an operator)".into(),
                    ));
                }
            }
            '-' => {
                bump!();
                if chars.peek() != Some(&'>') {
                    if chars.peek() == Some(&'-') {
                        bump!();
                        if chars.peek() == Some(&'>') {
                            bump!();
                            out.push(Token {
                                tok: Tok::LongArrow,
                                line: tline,
                                col: tcol,
                            });
                            continue;
                        }
                    }
                    return Err(ParseError::new(
                        tline,
                        tcol,
                        "expected `->` or `-->`".into(),
                    ));
                }
                bump!();
                out.push(Token {
                    tok: Tok::Arrow,
                    line: tline,
                    col: tcol,
                });
            }
            other => {
                return Err(ParseError::new(
                    tline,
                    tcol,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    Ok(out)
}
