//! Parser for the line-oriented `.istar` goal-model DSL.
//!
//! ```text
//! # comment
//! actor "Agent System" {
//!   goal "Execute Shell"
//!   softgoal "Security"
//!   task "Execute Shell Cmd"
//!   decomposes "Execute Shell" -> "Execute Shell Cmd"
//!   contributes "Execute Shell Cmd" -> "Security" [--]
//! }
//! depends "Agent User" -> "Agent System" : "task execution"
//! ```
//!
//! Names inside an actor block are scoped to `Actor/Name` unless they already
//! contain a `/` or carry an explicit `as <id>` suffix. Parsing is a pure
//! function of the input bytes.

use std::fmt;

use super::{Element, ElementId, ElementKind, GoalModel, Link, LinkKind, Polarity};

/// A parse failure with its source position (1-based line and column).
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Word(String),
    Str(String),
    Arrow,
    Colon,
    OpenBrace,
    CloseBrace,
    /// `[++]`, `[+]`, `[-]`, `[--]` (or an unknown token, rejected later).
    Bracketed(String),
}

fn lex_line(line: &str, line_no: usize) -> Result<Vec<(Token, usize)>, ParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some(&c) => {
                            s.push(c);
                            i += 1;
                        }
                        None => {
                            return Err(ParseError::new(line_no, col, "unterminated string"))
                        }
                    }
                }
                tokens.push((Token::Str(s), col));
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                tokens.push((Token::Arrow, col));
                i += 2;
            }
            ':' => {
                tokens.push((Token::Colon, col));
                i += 1;
            }
            '{' => {
                tokens.push((Token::OpenBrace, col));
                i += 1;
            }
            '}' => {
                tokens.push((Token::CloseBrace, col));
                i += 1;
            }
            '[' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        Some(']') => {
                            i += 1;
                            break;
                        }
                        Some(&c) => {
                            s.push(c);
                            i += 1;
                        }
                        None => return Err(ParseError::new(line_no, col, "unterminated '['")),
                    }
                }
                tokens.push((Token::Bracketed(s.trim().to_string()), col));
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                tokens.push((Token::Word(word), col));
            }
            other => {
                return Err(ParseError::new(
                    line_no,
                    col,
                    format!("unexpected character {other:?}"),
                ))
            }
        }
    }
    Ok(tokens)
}

struct LineParser<'a> {
    tokens: &'a [(Token, usize)],
    pos: usize,
    line: usize,
}

impl<'a> LineParser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map(|(_, c)| *c)
            .unwrap_or(1)
    }

    fn next(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t);
        self.pos += 1;
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), message)
    }

    fn expect_string(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Token::Str(_)) => match self.next() {
                Some(Token::Str(s)) => Ok(s.clone()),
                _ => unreachable!(),
            },
            _ => Err(self.err(format!("expected quoted {what}"))),
        }
    }

    fn expect_arrow(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Token::Arrow) => {
                self.next();
                Ok(())
            }
            _ => Err(self.err("expected '->'")),
        }
    }

    /// Optional `as <id>` suffix; the id may be a bare word or quoted.
    fn optional_alias(&mut self) -> Result<Option<String>, ParseError> {
        if self.peek() == Some(&Token::Word("as".to_string())) {
            self.next();
            match self.next() {
                Some(Token::Word(w)) => Ok(Some(w.clone())),
                Some(Token::Str(s)) => Ok(Some(s.clone())),
                _ => Err(self.err("expected identifier after 'as'")),
            }
        } else {
            Ok(None)
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.pos < self.tokens.len() {
            Err(self.err("unexpected trailing input"))
        } else {
            Ok(())
        }
    }
}

/// A link reference before resolution: the written name plus the actor scope
/// it was written in. Links may reference elements declared later in the
/// file, so resolution runs after the whole file is read.
struct PendingRef {
    name: String,
    scope: Option<ElementId>,
}

impl PendingRef {
    fn resolve(&self, model: &GoalModel) -> ElementId {
        if let Some(actor) = &self.scope {
            if !self.name.contains('/') {
                let scoped = ElementId::new(format!("{actor}/{}", self.name));
                if model.element(&scoped).is_some() {
                    return scoped;
                }
                // Fall back to a verbatim id (explicit `as` alias).
                let bare = ElementId::new(self.name.clone());
                if model.element(&bare).is_some() {
                    return bare;
                }
                return scoped;
            }
        }
        ElementId::new(self.name.clone())
    }
}

struct PendingLink {
    kind: LinkKind,
    source: PendingRef,
    target: PendingRef,
    polarity: Option<Polarity>,
    label: Option<String>,
}

/// Parse `.istar` source into a [`GoalModel`].
///
/// The model is structurally complete on success; dangling references and
/// other semantic invariants are reported by [`GoalModel::validate`].
pub fn parse_model(text: &str) -> Result<GoalModel, ParseError> {
    let mut model = GoalModel::new();
    let mut pending: Vec<PendingLink> = Vec::new();
    let mut current_actor: Option<ElementId> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let tokens = lex_line(raw, line_no)?;
        if tokens.is_empty() {
            continue;
        }
        let mut p = LineParser {
            tokens: &tokens,
            pos: 0,
            line: line_no,
        };

        let head = p.next().cloned().expect("non-empty token list");
        match head {
            Token::CloseBrace => {
                if current_actor.take().is_none() {
                    return Err(p.err("unmatched '}'"));
                }
                p.expect_end()?;
            }
            Token::Word(word) => match word.as_str() {
                "actor" => {
                    if current_actor.is_some() {
                        return Err(p.err("actor blocks cannot nest"));
                    }
                    let name = p.expect_string("actor name")?;
                    let alias = p.optional_alias()?;
                    let id = ElementId::new(alias.unwrap_or_else(|| name.clone()));
                    let opens = match p.peek() {
                        Some(Token::OpenBrace) => {
                            p.next();
                            true
                        }
                        _ => false,
                    };
                    p.expect_end()?;
                    let previous = model.insert_element(Element {
                        id: id.clone(),
                        kind: ElementKind::Actor,
                        name,
                        owner: None,
                    });
                    if previous.is_some() {
                        return Err(ParseError::new(line_no, 1, format!("duplicate id {id}")));
                    }
                    if opens {
                        current_actor = Some(id);
                    }
                }
                "goal" | "softgoal" | "task" | "resource" => {
                    let kind = match word.as_str() {
                        "goal" => ElementKind::Goal,
                        "softgoal" => ElementKind::Softgoal,
                        "task" => ElementKind::Task,
                        _ => ElementKind::Resource,
                    };
                    let actor = current_actor.clone().ok_or_else(|| {
                        p.err(format!("'{word}' is only allowed inside an actor block"))
                    })?;
                    let name = p.expect_string("element name")?;
                    let alias = p.optional_alias()?;
                    p.expect_end()?;
                    let id = alias
                        .map(ElementId::new)
                        .unwrap_or_else(|| ElementId::new(format!("{actor}/{name}")));
                    let previous = model.insert_element(Element {
                        id: id.clone(),
                        kind,
                        name,
                        owner: Some(actor),
                    });
                    if previous.is_some() {
                        return Err(ParseError::new(line_no, 1, format!("duplicate id {id}")));
                    }
                }
                "decomposes" | "means_ends" => {
                    let kind = if word == "decomposes" {
                        LinkKind::AndDecomposition
                    } else {
                        LinkKind::MeansEnds
                    };
                    let source = p.expect_string("source")?;
                    p.expect_arrow()?;
                    let target = p.expect_string("target")?;
                    p.expect_end()?;
                    pending.push(PendingLink {
                        kind,
                        source: PendingRef {
                            name: source,
                            scope: current_actor.clone(),
                        },
                        target: PendingRef {
                            name: target,
                            scope: current_actor.clone(),
                        },
                        polarity: None,
                        label: None,
                    });
                }
                "contributes" => {
                    let source = p.expect_string("source")?;
                    p.expect_arrow()?;
                    let target = p.expect_string("target")?;
                    let polarity = match p.next() {
                        Some(Token::Bracketed(tok)) => Polarity::from_token(tok).ok_or_else(
                            || {
                                ParseError::new(
                                    line_no,
                                    1,
                                    format!("unknown polarity token {tok:?}"),
                                )
                            },
                        )?,
                        _ => return Err(p.err("expected polarity, e.g. [++]")),
                    };
                    p.expect_end()?;
                    pending.push(PendingLink {
                        kind: LinkKind::Contribution,
                        source: PendingRef {
                            name: source,
                            scope: current_actor.clone(),
                        },
                        target: PendingRef {
                            name: target,
                            scope: current_actor.clone(),
                        },
                        polarity: Some(polarity),
                        label: None,
                    });
                }
                "depends" => {
                    if current_actor.is_some() {
                        return Err(p.err("'depends' belongs at the top level"));
                    }
                    let source = p.expect_string("depender actor")?;
                    p.expect_arrow()?;
                    let target = p.expect_string("dependee actor")?;
                    let label = match p.peek() {
                        Some(Token::Colon) => {
                            p.next();
                            Some(p.expect_string("dependency label")?)
                        }
                        _ => None,
                    };
                    p.expect_end()?;
                    pending.push(PendingLink {
                        kind: LinkKind::Dependency,
                        source: PendingRef {
                            name: source,
                            scope: None,
                        },
                        target: PendingRef {
                            name: target,
                            scope: None,
                        },
                        polarity: None,
                        label,
                    });
                }
                other => {
                    return Err(ParseError::new(
                        line_no,
                        1,
                        format!("unknown directive {other:?}"),
                    ))
                }
            },
            _ => return Err(ParseError::new(line_no, 1, "expected a directive")),
        }
    }

    if let Some(actor) = current_actor {
        return Err(ParseError::new(
            text.lines().count(),
            1,
            format!("unclosed actor block for {actor}"),
        ));
    }

    for link in pending {
        let source = link.source.resolve(&model);
        let target = link.target.resolve(&model);
        model.insert_link(Link {
            kind: link.kind,
            source,
            target,
            polarity: link.polarity,
            label: link.label,
        });
    }

    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_yields_empty_model() {
        let model = parse_model("").unwrap();
        assert!(model.is_empty());
        let model = parse_model("# only a comment\n\n").unwrap();
        assert!(model.is_empty());
    }

    #[test]
    fn sd_dependency_between_actors() {
        let text = r#"
            actor "Agent User"
            actor "Agent System"
            depends "Agent User" -> "Agent System" : "task execution"
        "#;
        let model = parse_model(text).unwrap();
        assert_eq!(model.elements_of_kind(ElementKind::Actor).count(), 2);
        assert_eq!(model.link_count(), 1);
        let link = model.links().next().unwrap();
        assert_eq!(link.kind, LinkKind::Dependency);
        assert_eq!(link.label.as_deref(), Some("task execution"));
        assert!(model.validate().is_empty());
    }

    #[test]
    fn names_are_scoped_by_actor() {
        let text = r#"
            actor "A" {
              goal "G"
              task "T"
              decomposes "G" -> "T"
            }
        "#;
        let model = parse_model(text).unwrap();
        assert!(model.element(&ElementId::new("A/G")).is_some());
        assert!(model.element(&ElementId::new("A/T")).is_some());
        let link = model.links().next().unwrap();
        assert_eq!(link.source, ElementId::new("A/G"));
        assert_eq!(link.target, ElementId::new("A/T"));
    }

    #[test]
    fn explicit_alias_overrides_scoped_id() {
        let text = r#"
            actor "A" {
              task "Very Long Task Name" as t1
              softgoal "Security"
              contributes "t1" -> "Security" [--]
            }
        "#;
        let model = parse_model(text).unwrap();
        let task = model
            .elements_of_kind(ElementKind::Task)
            .next()
            .expect("task present");
        assert_eq!(task.id, ElementId::new("t1"));
        // Link references fall back to the alias when no scoped id exists.
        let link = model.links().next().unwrap();
        assert_eq!(link.source, ElementId::new("t1"));
        assert!(model.validate().is_empty());
    }

    #[test]
    fn duplicate_id_is_a_parse_error() {
        let text = "actor \"A\" {\n task \"T\"\n task \"T\"\n}\n";
        let err = parse_model(text).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("duplicate id"));
    }

    #[test]
    fn unknown_polarity_is_rejected() {
        let text = r#"
            actor "A" {
              task "T"
              softgoal "S"
              contributes "T" -> "S" [+++]
            }
        "#;
        let err = parse_model(text).unwrap_err();
        assert!(err.message.contains("unknown polarity"));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_model("actor Agent\n").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.column > 1);
    }

    #[test]
    fn parsing_is_deterministic() {
        let text = r#"
            actor "A" {
              goal "G"
              task "T"
              softgoal "S"
              decomposes "G" -> "T"
              contributes "T" -> "S" [-]
            }
        "#;
        assert_eq!(parse_model(text).unwrap(), parse_model(text).unwrap());
    }
}
