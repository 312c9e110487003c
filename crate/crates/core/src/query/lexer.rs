// Copyright 2026 The sgb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Tokenizer for the query language.
//!
//! Words may contain hyphens (`GPSCoor-lat`, `DISTANCE-TO-ALL`), so keywords
//! are recognized by the parser from plain words rather than here.

use super::QueryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Word(String),
    /// `"quoted identifier"`; never a keyword.
    Quoted(String),
    Number(f64),
    Str(String),
    Comma,
    LParen,
    RParen,
    Star,
    Semicolon,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("'{w}'"),
            Tok::Quoted(w) => format!("\"{w}\""),
            Tok::Number(n) => format!("number {n}"),
            Tok::Str(s) => format!("string '{s}'"),
            Tok::Comma => "','".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Star => "'*'".into(),
            Tok::Semicolon => "';'".into(),
            Tok::Eq => "'='".into(),
            Tok::Ne => "'<>'".into(),
            Tok::Lt => "'<'".into(),
            Tok::Le => "'<='".into(),
            Tok::Gt => "'>'".into(),
            Tok::Ge => "'>='".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_word_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, QueryError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        // -- comment to end of line
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let single = match c {
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '*' => Some(Tok::Star),
            ';' => Some(Tok::Semicolon),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            bump!();
            out.push(Token { tok, pos });
            continue;
        }
        match c {
            '<' | '>' | '!' => {
                bump!();
                let next = chars.get(i).copied();
                let tok = match (c, next) {
                    ('<', Some('=')) => Some(Tok::Le),
                    ('<', Some('>')) => Some(Tok::Ne),
                    ('>', Some('=')) => Some(Tok::Ge),
                    ('!', Some('=')) => Some(Tok::Ne),
                    _ => None,
                };
                let tok = match tok {
                    Some(t) => {
                        bump!();
                        t
                    }
                    None if c == '<' => Tok::Lt,
                    None if c == '>' => Tok::Gt,
                    None => return Err(QueryError::syntax(pos, "unexpected character '!'")),
                };
                out.push(Token { tok, pos });
            }
            '\'' | '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(QueryError::syntax(pos, "unterminated quoted text"));
                        }
                        Some(&q) if q == c => {
                            bump!();
                            // doubled quote escapes itself
                            if chars.get(i) == Some(&c) {
                                s.push(c);
                                bump!();
                            } else {
                                break;
                            }
                        }
                        Some(&ch) => {
                            s.push(ch);
                            bump!();
                        }
                    }
                }
                let tok = if c == '\'' {
                    Tok::Str(s)
                } else {
                    Tok::Quoted(s)
                };
                out.push(Token { tok, pos });
            }
            c if c.is_ascii_digit()
                || ((c == '-' || c == '+' || c == '.')
                    && chars
                        .get(i + 1)
                        .is_some_and(|n| n.is_ascii_digit() || *n == '.')) =>
            {
                let start = i;
                bump!();
                while i < chars.len() {
                    let d = chars[i];
                    let exp_sign = (d == '-' || d == '+') && matches!(chars[i - 1], 'e' | 'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        bump!();
                    } else {
                        break;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let n: f64 = text
                    .parse()
                    .map_err(|_| QueryError::syntax(pos, format!("malformed number '{text}'")))?;
                if i < chars.len() && is_word_start(chars[i]) {
                    return Err(QueryError::syntax(
                        Pos { line, column: col },
                        format!("unexpected character '{}' after number", chars[i]),
                    ));
                }
                out.push(Token {
                    tok: Tok::Number(n),
                    pos,
                });
            }
            c if is_word_start(c) => {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    bump!();
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Token {
                    tok: Tok::Word(text),
                    pos,
                });
            }
            other => {
                return Err(QueryError::syntax(
                    pos,
                    format!("unexpected character '{other}'"),
                ));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, column: col },
    });
    Ok(out)
}
