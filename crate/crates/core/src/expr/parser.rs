use thiserror::Error;

use super::{BinaryOp, Node, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("second free variable `{second}` at offset {offset} (already using `{first}`)")]
    MultipleVariables {
        offset: usize,
        first: String,
        second: String,
    },
}

impl ParseError {
    /// Byte offset into the source where the problem was detected.
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::MultipleVariables { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn describe(token: &Token) -> String {
    match token {
        Token::Number(n) => format!("number {n}"),
        Token::Ident(name) => format!("identifier `{name}`"),
        Token::Plus => "`+`".into(),
        Token::Minus => "`-`".into(),
        Token::Star => "`*`".into(),
        Token::Slash => "`/`".into(),
        Token::Caret => "`^`".into(),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
        Token::End => "end of input".into(),
    }
}

fn tokenize(source: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        let simple = match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(token) = simple {
            tokens.push((start, token));
            i += 1;
        } else if ch.is_ascii_digit() || ch == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &source[start..i];
            let value = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            tokens.push((start, Token::Number(value)));
        } else if ch.is_ascii_alphabetic() || ch == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push((start, Token::Ident(source[start..i].to_owned())));
        } else {
            let c = source[start..].chars().next().unwrap_or('?');
            return Err(ParseError::Syntax {
                offset: start,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    tokens.push((source.len(), Token::End));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    variable: Option<String>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn advance(&mut self) -> Token {
        let token = self.tokens[self.pos].1.clone();
        if token != Token::End {
            self.pos += 1;
        }
        token
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            message: format!("expected {expected}, found {}", describe(self.peek())),
        }
    }

    fn expect(&mut self, token: Token, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == token {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    // sum := product (('+' | '-') product)*
    fn sum(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinaryOp::Add,
                Token::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.product()?;
            lhs = Node::binary(op, lhs, rhs);
        }
    }

    // product := unary (('*' | '/') unary)*
    fn product(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinaryOp::Mul,
                Token::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Node::binary(op, lhs, rhs);
        }
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Node, ParseError> {
        if *self.peek() == Token::Minus {
            self.advance();
            Ok(Node::unary(UnaryOp::Neg, self.unary()?))
        } else {
            self.power()
        }
    }

    // power := atom ('^' unary)?
    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Token::Caret {
            self.advance();
            let exponent = self.unary()?;
            Ok(Node::binary(BinaryOp::Pow, base, exponent))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Token::Number(value) => {
                self.advance();
                Ok(Node::Const(value))
            }
            Token::LParen => {
                self.advance();
                let inner = self.sum()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Ident(name) => {
                self.advance();
                if *self.peek() == Token::LParen {
                    let op = UnaryOp::from_name(&name).ok_or(ParseError::UnknownIdentifier { offset, name })?;
                    self.advance();
                    let arg = self.sum()?;
                    self.expect(Token::RParen, "`)`")?;
                    return Ok(Node::unary(op, arg));
                }
                if UnaryOp::from_name(&name).is_some() {
                    return Err(self.unexpected(&format!("`(` after `{name}`")));
                }
                match &self.variable {
                    Some(first) if *first != name => Err(ParseError::MultipleVariables {
                        offset,
                        first: first.clone(),
                        second: name,
                    }),
                    Some(_) => Ok(Node::Var),
                    None => {
                        self.variable = Some(name);
                        Ok(Node::Var)
                    }
                }
            }
            _ => Err(self.unexpected("a number, variable, function or `(`")),
        }
    }
}

/// Parses `source`, returning the tree and the name of its free variable
/// (if any appears).
pub(super) fn parse(source: &str) -> Result<(Node, Option<String>), ParseError> {
    let mut parser = Parser {
        tokens: tokenize(source)?,
        pos: 0,
        variable: None,
    };
    let ast = parser.sum()?;
    if *parser.peek() != Token::End {
        return Err(parser.unexpected("an operator or end of input"));
    }
    Ok((ast, parser.variable))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_function() {
        let err = parse("foo(y)").unwrap_err();
        assert!(matches!(err, ParseError::UnknownIdentifier { offset: 0, .. }));
    }

    #[test]
    fn rejects_second_variable() {
        let err = parse("x + y").unwrap_err();
        assert!(matches!(err, ParseError::MultipleVariables { offset: 4, .. }));
    }

    #[test]
    fn rejects_implicit_multiplication() {
        let err = parse("2y").unwrap_err();
        assert_eq!(err.offset(), 1);
        let err = parse("2 (y)").unwrap_err();
        assert_eq!(err.offset(), 2);
    }

    #[test]
    fn rejects_bare_function_name() {
        assert!(matches!(parse("exp + 1"), Err(ParseError::Syntax { offset: 4, .. })));
    }

    #[test]
    fn rejects_stray_characters_and_empty_input() {
        assert_eq!(parse("y $ 2").unwrap_err().offset(), 2);
        assert_eq!(parse("").unwrap_err().offset(), 0);
        assert_eq!(parse("1..2").unwrap_err().offset(), 0);
    }

    #[test]
    fn scientific_literals() {
        let (ast, _) = parse("1.5e-3").unwrap();
        assert_eq!(ast, Node::Const(1.5e-3));
        // `2e` is the number 2 followed by the variable `e`
        let err = parse("2e").unwrap_err();
        assert_eq!(err.offset(), 1);
    }
}
