//! Hand-rolled lexer and recursive-descent parser for the process grammar,
//! the activity-term grammar, and `.env` verdict files.

use crate::error::ParseError;
use crate::syntax::{ActivityName, ActivityTerm, Env, Process, Verdict};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Zero,
    Semi,
    Pipe,
    Percent,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Eof,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Zero => "`0`".into(),
            Token::Semi => "`;`".into(),
            Token::Pipe => "`|`".into(),
            Token::Percent => "`%`".into(),
            Token::LBracket => "`[`".into(),
            Token::RBracket => "`]`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
                continue;
            }
            ';' | '|' | '%' | '[' | ']' | '(' | ')' => {
                chars.next();
                col += 1;
                let token = match c {
                    ';' => Token::Semi,
                    '|' => Token::Pipe,
                    '%' => Token::Percent,
                    '[' => Token::LBracket,
                    ']' => Token::RBracket,
                    '(' => Token::LParen,
                    _ => Token::RParen,
                };
                out.push(Spanned {
                    token,
                    line: tline,
                    col: tcol,
                });
            }
            '0' => {
                chars.next();
                col += 1;
                if chars
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
                {
                    return Err(ParseError::new(
                        tline,
                        tcol,
                        "identifiers may not start with a digit",
                    ));
                }
                out.push(Spanned {
                    token: Token::Zero,
                    line: tline,
                    col: tcol,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(Spanned {
                    token: Token::Ident(ident),
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
    out.push(Spanned {
        token: Token::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn cur(&self) -> &Spanned {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> Spanned {
        let t = self.cur().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, expected: &Token) -> Result<(), ParseError> {
        if &self.cur().token == expected {
            self.advance();
            Ok(())
        } else {
            Err(self.err(format!(
                "expected {}, found {}",
                expected.describe(),
                self.cur().token.describe()
            )))
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.cur().line, self.cur().col, message)
    }

    // par := seq ("|" seq)*
    fn par(&mut self) -> Result<Process, ParseError> {
        let mut acc = self.seq()?;
        while self.cur().token == Token::Pipe {
            self.advance();
            acc = Process::par(acc, self.seq()?);
        }
        Ok(acc)
    }

    // seq := atom (";" atom)*
    fn seq(&mut self) -> Result<Process, ParseError> {
        let mut acc = self.atom()?;
        while self.cur().token == Token::Semi {
            self.advance();
            acc = Process::seq(acc, self.atom()?);
        }
        Ok(acc)
    }

    // atom := "0" | ident ("%" ident)? | "[" par "]" | "(" par ")"
    fn atom(&mut self) -> Result<Process, ParseError> {
        match self.cur().token.clone() {
            Token::Zero => {
                self.advance();
                Ok(Process::Zero)
            }
            Token::Ident(name) => {
                let (line, col) = (self.cur().line, self.cur().col);
                self.advance();
                let forward = ActivityName::new(name)
                    .map_err(|e| ParseError::new(line, col, e.message))?;
                if self.cur().token == Token::Percent {
                    self.advance();
                    match self.advance() {
                        Spanned {
                            token: Token::Ident(c),
                            line,
                            col,
                        } => {
                            let comp = ActivityName::new(c)
                                .map_err(|e| ParseError::new(line, col, e.message))?;
                            Ok(Process::activity(forward, Some(comp)))
                        }
                        other => Err(ParseError::new(
                            other.line,
                            other.col,
                            format!(
                                "expected compensation name after `%`, found {}",
                                other.token.describe()
                            ),
                        )),
                    }
                } else {
                    Ok(Process::activity(forward, None))
                }
            }
            Token::LBracket => {
                self.advance();
                let body = self.par()?;
                self.eat(&Token::RBracket)?;
                Ok(Process::saga(body))
            }
            Token::LParen => {
                self.advance();
                let body = self.par()?;
                self.eat(&Token::RParen)?;
                Ok(body)
            }
            other => Err(self.err(format!("expected a process, found {}", other.describe()))),
        }
    }

    // Activity terms share the grammar minus `%` and `[...]`.
    fn term_par(&mut self) -> Result<ActivityTerm, ParseError> {
        let mut acc = self.term_seq()?;
        while self.cur().token == Token::Pipe {
            self.advance();
            acc = ActivityTerm::par(acc, self.term_seq()?);
        }
        Ok(acc)
    }

    fn term_seq(&mut self) -> Result<ActivityTerm, ParseError> {
        let mut acc = self.term_atom()?;
        while self.cur().token == Token::Semi {
            self.advance();
            acc = ActivityTerm::seq(acc, self.term_atom()?);
        }
        Ok(acc)
    }

    fn term_atom(&mut self) -> Result<ActivityTerm, ParseError> {
        match self.cur().token.clone() {
            Token::Zero => {
                self.advance();
                Ok(ActivityTerm::Empty)
            }
            Token::Ident(name) => {
                let (line, col) = (self.cur().line, self.cur().col);
                self.advance();
                let name =
                    ActivityName::new(name).map_err(|e| ParseError::new(line, col, e.message))?;
                Ok(ActivityTerm::Act(name))
            }
            Token::LParen => {
                self.advance();
                let body = self.term_par()?;
                self.eat(&Token::RParen)?;
                Ok(body)
            }
            other => Err(self.err(format!(
                "expected an activity term, found {}",
                other.describe()
            ))),
        }
    }
}

/// Parses a source-level process.
pub fn parse_process(text: &str) -> Result<Process, ParseError> {
    let mut parser = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let p = parser.par()?;
    parser.eat(&Token::Eof)?;
    Ok(p)
}

/// Parses an activity term (names, `;`, `|`, `0`, parentheses).
pub fn parse_activity_term(text: &str) -> Result<ActivityTerm, ParseError> {
    let mut parser = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let t = parser.term_par()?;
    parser.eat(&Token::Eof)?;
    Ok(t)
}

/// Parses an environment file: one `name : commit|abort` declaration per
/// line, `#` starts a comment, duplicate names are an error.
pub fn parse_env(text: &str) -> Result<Env, ParseError> {
    let mut env = Env::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (name, verdict) = line.split_once(':').ok_or_else(|| {
            ParseError::new(line_no, 1, "expected `name : commit|abort`".to_string())
        })?;
        let name = ActivityName::new(name.trim())
            .map_err(|e| ParseError::new(line_no, 1, e.message))?;
        let verdict = match verdict.trim() {
            "commit" => Verdict::Commit,
            "abort" => Verdict::Abort,
            other => {
                return Err(ParseError::new(
                    line_no,
                    1,
                    format!("unknown verdict `{other}` (expected `commit` or `abort`)"),
                ))
            }
        };
        if !env.insert(name.clone(), verdict) {
            return Err(ParseError::new(
                line_no,
                1,
                format!("duplicate declaration for `{name}`"),
            ));
        }
    }
    Ok(env)
}
