//! S-expression lexer with 1-based line/column tracking.

use super::model::SourcePos;
use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    LParen,
    RParen,
    /// Bare symbol, lowercased. Covers identifiers, `:keywords`,
    /// `?variables`, `-`, `=` and numbers alike.
    Symbol(String),
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: SourcePos,
}

fn is_delimiter(c: char) -> bool {
    c == '(' || c == ')' || c == ';' || c.is_whitespace()
}

/// Tokenizes PDDL source. `;` starts a comment running to end of line.
pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = src.chars().peekable();

    while let Some(&c) = chars.peek() {
        let pos = SourcePos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                tokens.push(Token { tok: Tok::LParen, pos });
            }
            ')' => {
                chars.next();
                col += 1;
                tokens.push(Token { tok: Tok::RParen, pos });
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            _ => {
                let mut sym = String::new();
                while let Some(&c) = chars.peek() {
                    if is_delimiter(c) {
                        break;
                    }
                    sym.push(c.to_ascii_lowercase());
                    chars.next();
                    col += 1;
                }
                tokens.push(Token { tok: Tok::Symbol(sym), pos });
            }
        }
    }
    Ok(tokens)
}

/// Parsed s-expression tree, positions preserved for diagnostics.
#[derive(Debug, Clone)]
pub enum SExpr {
    Sym { text: String, pos: SourcePos },
    List { items: Vec<SExpr>, pos: SourcePos },
}

impl SExpr {
    pub fn pos(&self) -> SourcePos {
        match self {
            SExpr::Sym { pos, .. } | SExpr::List { pos, .. } => *pos,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            SExpr::Sym { text, .. } => Some(text),
            SExpr::List { .. } => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            SExpr::Sym { .. } => None,
        }
    }

    /// First symbol of a list, if any — the tag of `(:tag ...)` forms.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|items| items.first()).and_then(|e| e.as_sym())
    }
}

/// Reads one complete s-expression; trailing tokens are an error.
pub fn parse_sexpr(src: &str) -> Result<SExpr, ParseError> {
    let tokens = lex(src)?;
    let mut idx = 0;
    let expr = parse_one(&tokens, &mut idx)?;
    if idx != tokens.len() {
        return Err(ParseError::Syntax {
            pos: tokens[idx].pos,
            msg: "unexpected trailing input after top-level form".into(),
        });
    }
    Ok(expr)
}

fn parse_one(tokens: &[Token], idx: &mut usize) -> Result<SExpr, ParseError> {
    let Some(token) = tokens.get(*idx) else {
        return Err(ParseError::Syntax {
            pos: SourcePos { line: 1, col: 1 },
            msg: "unexpected end of input".into(),
        });
    };
    *idx += 1;
    match &token.tok {
        Tok::Symbol(s) => Ok(SExpr::Sym { text: s.clone(), pos: token.pos }),
        Tok::LParen => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*idx) {
                    None => {
                        return Err(ParseError::Syntax {
                            pos: token.pos,
                            msg: "unclosed parenthesis".into(),
                        })
                    }
                    Some(t) if t.tok == Tok::RParen => {
                        *idx += 1;
                        return Ok(SExpr::List { items, pos: token.pos });
                    }
                    Some(_) => items.push(parse_one(tokens, idx)?),
                }
            }
        }
        Tok::RParen => Err(ParseError::Syntax {
            pos: token.pos,
            msg: "unexpected closing parenthesis".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracks_positions() {
        let toks = lex("(a\n  b)").unwrap();
        assert_eq!(toks.len(), 4);
        assert_eq!(toks[2].pos.line, 2);
        assert_eq!(toks[2].pos.col, 3);
    }

    #[test]
    fn comments_are_skipped() {
        let toks = lex("(a ; comment with (parens)\n b)").unwrap();
        let syms: Vec<_> = toks
            .iter()
            .filter_map(|t| match &t.tok {
                Tok::Symbol(s) => Some(s.as_str()),
                _ => None,
            })
            .collect();
        assert_eq!(syms, vec!["a", "b"]);
    }

    #[test]
    fn lowercases_symbols() {
        let toks = lex("(ON A)").unwrap();
        assert!(matches!(&toks[1].tok, Tok::Symbol(s) if s == "on"));
    }

    #[test]
    fn unclosed_paren_is_an_error() {
        assert!(parse_sexpr("(a (b c)").is_err());
    }
}
