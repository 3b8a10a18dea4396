//! Tokenizer for the supported C subset.
//!
//! Preprocessor lines are returned whole as a single [`TokenKind::Preproc`]
//! token carrying the whitespace-normalised text after the `#`. Comments are
//! discarded.

use std::fmt;

use super::ast::Span;
use super::FrontendError;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Keyword(Keyword),
    /// Integer literal, original spelling kept.
    Int(String),
    /// Floating literal, original spelling kept.
    Float(String),
    Str(String),
    Char(String),
    Punct(Punct),
    /// A whole `#...` line, text after `#` with whitespace runs collapsed.
    Preproc(String),
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Int,
    Long,
    Short,
    Double,
    Float,
    Char,
    Void,
    Unsigned,
    Signed,
    Const,
    Static,
    Extern,
    For,
    If,
    Else,
    While,
    Return,
    Break,
    Continue,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Keyword> {
        Some(match s {
            "int" => Keyword::Int,
            "long" => Keyword::Long,
            "short" => Keyword::Short,
            "double" => Keyword::Double,
            "float" => Keyword::Float,
            "char" => Keyword::Char,
            "void" => Keyword::Void,
            "unsigned" => Keyword::Unsigned,
            "signed" => Keyword::Signed,
            "const" => Keyword::Const,
            "static" => Keyword::Static,
            "extern" => Keyword::Extern,
            "for" => Keyword::For,
            "if" => Keyword::If,
            "else" => Keyword::Else,
            "while" => Keyword::While,
            "return" => Keyword::Return,
            "break" => Keyword::Break,
            "continue" => Keyword::Continue,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Int => "int",
            Keyword::Long => "long",
            Keyword::Short => "short",
            Keyword::Double => "double",
            Keyword::Float => "float",
            Keyword::Char => "char",
            Keyword::Void => "void",
            Keyword::Unsigned => "unsigned",
            Keyword::Signed => "signed",
            Keyword::Const => "const",
            Keyword::Static => "static",
            Keyword::Extern => "extern",
            Keyword::For => "for",
            Keyword::If => "if",
            Keyword::Else => "else",
            Keyword::While => "while",
            Keyword::Return => "return",
            Keyword::Break => "break",
            Keyword::Continue => "continue",
        }
    }

    /// True for keywords that may start a type specifier.
    pub fn is_type_word(self) -> bool {
        matches!(
            self,
            Keyword::Int
                | Keyword::Long
                | Keyword::Short
                | Keyword::Double
                | Keyword::Float
                | Keyword::Char
                | Keyword::Void
                | Keyword::Unsigned
                | Keyword::Signed
                | Keyword::Const
                | Keyword::Static
                | Keyword::Extern
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Punct {
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Question,
    Colon,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Assign,
    PlusAssign,
    MinusAssign,
    StarAssign,
    SlashAssign,
    PercentAssign,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Not,
    Tilde,
    Amp,
    Pipe,
    Caret,
    Shl,
    Shr,
    PlusPlus,
    MinusMinus,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        match self {
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::LBracket => "[",
            Punct::RBracket => "]",
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::Comma => ",",
            Punct::Semi => ";",
            Punct::Question => "?",
            Punct::Colon => ":",
            Punct::Plus => "+",
            Punct::Minus => "-",
            Punct::Star => "*",
            Punct::Slash => "/",
            Punct::Percent => "%",
            Punct::Assign => "=",
            Punct::PlusAssign => "+=",
            Punct::MinusAssign => "-=",
            Punct::StarAssign => "*=",
            Punct::SlashAssign => "/=",
            Punct::PercentAssign => "%=",
            Punct::Eq => "==",
            Punct::Ne => "!=",
            Punct::Lt => "<",
            Punct::Le => "<=",
            Punct::Gt => ">",
            Punct::Ge => ">=",
            Punct::AndAnd => "&&",
            Punct::OrOr => "||",
            Punct::Not => "!",
            Punct::Tilde => "~",
            Punct::Amp => "&",
            Punct::Pipe => "|",
            Punct::Caret => "^",
            Punct::Shl => "<<",
            Punct::Shr => ">>",
            Punct::PlusPlus => "++",
            Punct::MinusMinus => "--",
        }
    }
}

// Longest match first.
const PUNCTS: &[(&str, Punct)] = &[
    ("<<", Punct::Shl),
    (">>", Punct::Shr),
    ("<=", Punct::Le),
    (">=", Punct::Ge),
    ("==", Punct::Eq),
    ("!=", Punct::Ne),
    ("&&", Punct::AndAnd),
    ("||", Punct::OrOr),
    ("++", Punct::PlusPlus),
    ("--", Punct::MinusMinus),
    ("+=", Punct::PlusAssign),
    ("-=", Punct::MinusAssign),
    ("*=", Punct::StarAssign),
    ("/=", Punct::SlashAssign),
    ("%=", Punct::PercentAssign),
    ("(", Punct::LParen),
    (")", Punct::RParen),
    ("[", Punct::LBracket),
    ("]", Punct::RBracket),
    ("{", Punct::LBrace),
    ("}", Punct::RBrace),
    (",", Punct::Comma),
    (";", Punct::Semi),
    ("?", Punct::Question),
    (":", Punct::Colon),
    ("+", Punct::Plus),
    ("-", Punct::Minus),
    ("*", Punct::Star),
    ("/", Punct::Slash),
    ("%", Punct::Percent),
    ("=", Punct::Assign),
    ("<", Punct::Lt),
    (">", Punct::Gt),
    ("!", Punct::Not),
    ("~", Punct::Tilde),
    ("&", Punct::Amp),
    ("|", Punct::Pipe),
    ("^", Punct::Caret),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s)
            | TokenKind::Int(s)
            | TokenKind::Float(s)
            | TokenKind::Str(s)
            | TokenKind::Char(s) => f.write_str(s),
            TokenKind::Keyword(k) => f.write_str(k.as_str()),
            TokenKind::Punct(p) => f.write_str(p.as_str()),
            TokenKind::Preproc(s) => write!(f, "#{s}"),
            TokenKind::Eof => f.write_str("end of input"),
        }
    }
}

/// Collapses whitespace runs to single spaces and trims the ends.
pub fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
    /// Only whitespace and comments seen since the last newline.
    at_line_start: bool,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
            self.at_line_start = true;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.col)
    }

    fn skip_trivia(&mut self) -> Result<(), FrontendError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek_at(1) == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    let start = self.span();
                    self.bump();
                    self.bump();
                    loop {
                        match self.peek() {
                            None => {
                                return Err(FrontendError::Lex {
                                    span: start,
                                    message: "unterminated block comment".into(),
                                })
                            }
                            Some('*') if self.peek_at(1) == Some('/') => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            _ => {
                                self.bump();
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    /// Reads the rest of a `#` line, honouring backslash continuations and
    /// dropping comments.
    fn preproc_line(&mut self) -> String {
        let mut raw = String::new();
        while let Some(c) = self.peek() {
            if c == '\\' && self.peek_at(1) == Some('\n') {
                self.bump();
                self.bump();
                raw.push(' ');
                continue;
            }
            if c == '\n' {
                break;
            }
            if c == '/' && self.peek_at(1) == Some('/') {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
                break;
            }
            if c == '/' && self.peek_at(1) == Some('*') {
                self.bump();
                self.bump();
                while let Some(c) = self.peek() {
                    if c == '*' && self.peek_at(1) == Some('/') {
                        self.bump();
                        self.bump();
                        break;
                    }
                    self.bump();
                }
                raw.push(' ');
                continue;
            }
            raw.push(c);
            self.bump();
        }
        normalize_ws(&raw)
    }

    fn quoted(&mut self, quote: char) -> Result<String, FrontendError> {
        let start = self.span();
        let mut text = String::new();
        text.push(self.bump().unwrap());
        loop {
            match self.bump() {
                None | Some('\n') => {
                    return Err(FrontendError::Lex {
                        span: start,
                        message: format!("unterminated {quote} literal"),
                    })
                }
                Some('\\') => {
                    text.push('\\');
                    if let Some(c) = self.bump() {
                        text.push(c);
                    }
                }
                Some(c) => {
                    text.push(c);
                    if c == quote {
                        return Ok(text);
                    }
                }
            }
        }
    }

    fn number(&mut self) -> TokenKind {
        let start = self.pos;
        let mut is_float = false;
        if self.peek() == Some('0') && matches!(self.peek_at(1), Some('x' | 'X')) {
            self.bump();
            self.bump();
            while matches!(self.peek(), Some(c) if c.is_ascii_hexdigit()) {
                self.bump();
            }
        } else {
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
            if self.peek() == Some('.') {
                is_float = true;
                self.bump();
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
            }
            if matches!(self.peek(), Some('e' | 'E')) {
                let sign = matches!(self.peek_at(1), Some('+' | '-'));
                let digit_at = if sign { 2 } else { 1 };
                if matches!(self.peek_at(digit_at), Some(c) if c.is_ascii_digit()) {
                    is_float = true;
                    self.bump();
                    if sign {
                        self.bump();
                    }
                    while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                        self.bump();
                    }
                }
            }
        }
        while matches!(self.peek(), Some('u' | 'U' | 'l' | 'L' | 'f' | 'F')) {
            if matches!(self.peek(), Some('f' | 'F')) {
                is_float = true;
            }
            self.bump();
        }
        let text = self.src[start..self.pos].to_string();
        if is_float {
            TokenKind::Float(text)
        } else {
            TokenKind::Int(text)
        }
    }

    fn next_token(&mut self) -> Result<Token, FrontendError> {
        self.skip_trivia()?;
        let span = self.span();
        let Some(c) = self.peek() else {
            return Ok(Token {
                kind: TokenKind::Eof,
                span,
            });
        };
        if c == '#' && self.at_line_start {
            self.bump();
            let text = self.preproc_line();
            return Ok(Token {
                kind: TokenKind::Preproc(text),
                span,
            });
        }
        self.at_line_start = false;
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                self.bump();
            }
            let word = &self.src[start..self.pos];
            match Keyword::from_ident(word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit()
            || (c == '.' && matches!(self.peek_at(1), Some(d) if d.is_ascii_digit()))
        {
            self.number()
        } else if c == '"' {
            TokenKind::Str(self.quoted('"')?)
        } else if c == '\'' {
            TokenKind::Char(self.quoted('\'')?)
        } else {
            let rest = &self.src[self.pos..];
            let Some(&(text, p)) = PUNCTS.iter().find(|(t, _)| rest.starts_with(t)) else {
                return Err(FrontendError::Lex {
                    span,
                    message: format!("unexpected character {c:?}"),
                });
            };
            for _ in 0..text.len() {
                self.bump();
            }
            TokenKind::Punct(p)
        };
        Ok(Token { kind, span })
    }
}

/// Tokenizes `src`. The returned vector always ends with an `Eof` token.
pub fn tokenize(src: &str) -> Result<Vec<Token>, FrontendError> {
    let mut lx = Lexer {
        src,
        pos: 0,
        line: 1,
        col: 1,
        at_line_start: true,
    };
    let mut out = Vec::new();
    loop {
        let tok = lx.next_token()?;
        let eof = tok.kind == TokenKind::Eof;
        out.push(tok);
        if eof {
            return Ok(out);
        }
    }
}

/// Tokenizes a fragment (such as the text of a pragma line) whose tokens
/// should all carry `origin` as their span.
pub fn tokenize_fragment(src: &str, origin: Span) -> Result<Vec<Token>, FrontendError> {
    let mut toks = tokenize(src).map_err(|e| match e {
        FrontendError::Lex { message, .. } => FrontendError::Lex {
            span: origin,
            message,
        },
        other => other,
    })?;
    for t in &mut toks {
        t.span = origin;
    }
    Ok(toks)
}

/// Whitespace-insensitive token sequence, used to compare programs.
pub fn token_texts(src: &str) -> Result<Vec<String>, FrontendError> {
    Ok(tokenize(src)?
        .into_iter()
        .filter(|t| t.kind != TokenKind::Eof)
        .map(|t| t.kind.to_string())
        .collect())
}
