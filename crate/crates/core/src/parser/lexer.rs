use super::{ParseError, ParseErrorKind, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    Tilde,
    And,
    Or,
    Arrow,
    Turnstile,
    Equals,
    FatArrow,
    Assign,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::And => "`/\\`".into(),
            Tok::Or => "`\\/`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Equals => "`=`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::Assign => "`:=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Splits `text` into tokens. `origin` positions the text inside a larger
/// file (used for quoted strings inside proof files).
pub fn tokenize(text: &str, origin: &SourceSpan) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = origin.line;
    let mut col = origin.column;
    let span = |line: usize, column: usize, length: usize| SourceSpan {
        file: origin.file.clone(),
        line,
        column,
        length: length.max(1),
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start_col = col;
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let sym = match two.as_str() {
            "/\\" => Some(Tok::And),
            "\\/" => Some(Tok::Or),
            "->" => Some(Tok::Arrow),
            "|-" => Some(Tok::Turnstile),
            "=>" => Some(Tok::FatArrow),
            ":=" => Some(Tok::Assign),
            _ => None,
        };
        if let Some(tok) = sym {
            out.push(Token {
                tok,
                span: span(line, start_col, 2),
            });
            i += 2;
            col += 2;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            ':' => Some(Tok::Colon),
            '.' => Some(Tok::Dot),
            '~' => Some(Tok::Tilde),
            '=' => Some(Tok::Equals),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token {
                tok,
                span: span(line, start_col, 1),
            });
            i += 1;
            col += 1;
            continue;
        }
        if c == '"' {
            let start_line = line;
            let mut j = i + 1;
            let mut s = String::new();
            let mut l = line;
            let mut cc = col + 1;
            while j < chars.len() && chars[j] != '"' {
                if chars[j] == '\n' {
                    l += 1;
                    cc = 1;
                } else {
                    cc += 1;
                }
                s.push(chars[j]);
                j += 1;
            }
            if j >= chars.len() {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    span(start_line, start_col, 1),
                    "unterminated string literal",
                ));
            }
            let len = s.chars().count() + 2;
            out.push(Token {
                tok: Tok::Str(s),
                span: span(start_line, start_col, if l == start_line { len } else { 1 }),
            });
            line = l;
            col = cc + 1;
            i = j + 1;
            continue;
        }
        if is_ident_char(c) && c != '\'' {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            let len = j - i;
            out.push(Token {
                tok: Tok::Ident(word),
                span: span(line, start_col, len),
            });
            col += len;
            i = j;
            continue;
        }
        return Err(ParseError::new(
            ParseErrorKind::Syntax,
            span(line, start_col, 1),
            format!("unexpected character `{c}`"),
        ));
    }
    out.push(Token {
        tok: Tok::Eof,
        span: span(line, col, 1),
    });
    Ok(out)
}
