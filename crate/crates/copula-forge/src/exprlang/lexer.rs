use super::parser::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SpannedTok {
    pub tok: Tok,
    pub offset: usize,
}

pub(crate) fn lex(source: &str) -> Result<Vec<SpannedTok>, ParseError> {
    let bytes = source.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
            }
            b'+' => {
                toks.push(SpannedTok { tok: Tok::Plus, offset: start });
                i += 1;
            }
            b'-' => {
                toks.push(SpannedTok { tok: Tok::Minus, offset: start });
                i += 1;
            }
            b'*' => {
                toks.push(SpannedTok { tok: Tok::Star, offset: start });
                i += 1;
            }
            b'/' => {
                toks.push(SpannedTok { tok: Tok::Slash, offset: start });
                i += 1;
            }
            b'^' => {
                toks.push(SpannedTok { tok: Tok::Caret, offset: start });
                i += 1;
            }
            b'(' => {
                toks.push(SpannedTok { tok: Tok::LParen, offset: start });
                i += 1;
            }
            b')' => {
                toks.push(SpannedTok { tok: Tok::RParen, offset: start });
                i += 1;
            }
            b',' => {
                toks.push(SpannedTok { tok: Tok::Comma, offset: start });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                i = lex_number(source, start, &mut toks)?;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push(SpannedTok {
                    tok: Tok::Ident(source[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                let ch = source[start..].chars().next().unwrap();
                return Err(ParseError::Lexical {
                    offset: start,
                    message: format!("unexpected character '{ch}'"),
                });
            }
        }
    }
    Ok(toks)
}

// Numbers: digits [. digits] [e|E [+|-] digits], or .digits.
fn lex_number(
    source: &str,
    start: usize,
    toks: &mut Vec<SpannedTok>,
) -> Result<usize, ParseError> {
    let bytes = source.as_bytes();
    let mut i = start;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i == start + 1 && bytes[start] == b'.' {
        return Err(ParseError::Lexical {
            offset: start,
            message: "expected digits around '.'".to_string(),
        });
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            i = j;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        // A bare 'e' after digits is left for the identifier rule to
        // reject as an adjacent token ("1e" lexes as "1" then ident "e",
        // which the parser flags as a syntax error).
    }
    let text = &source[start..i];
    let value: f64 = text.parse().map_err(|_| ParseError::Lexical {
        offset: start,
        message: format!("invalid numeric literal '{text}'"),
    })?;
    if !value.is_finite() {
        return Err(ParseError::Lexical {
            offset: start,
            message: format!("numeric literal '{text}' out of range"),
        });
    }
    toks.push(SpannedTok { tok: Tok::Num(value), offset: start });
    Ok(i)
}
