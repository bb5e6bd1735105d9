//! Line-oriented concrete syntax.
//!
//! ```text
//! % comment
//! a :- b, not c.
//! -u :- s, -t, h.   % #id r15
//! fact.
//! ```
//!
//! A `% #id NAME` annotation names the rule on its own line, or the next
//! rule when it stands alone. Unnamed rules get positional ids `r1..rn`.

use std::fmt::Write as _;

use indexmap::IndexSet;

use crate::error::{Error, Result};
use crate::ids::RuleId;
use crate::program::{is_atom_name, Atom, BodyLiteral, Literal, Program, Rule};

pub fn parse_program(text: &str) -> Result<Program> {
    let mut rules: Vec<(Rule, usize)> = Vec::new();
    let mut pending_id: Option<RuleId> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let (code, comment) = match raw.find('%') {
            Some(at) => (&raw[..at], Some((&raw[at + 1..], at + 2))),
            None => (raw, None),
        };
        let annotation = match comment {
            Some((c, col)) => parse_annotation(c, line_no, col)?,
            None => None,
        };

        if code.trim().is_empty() {
            if let Some(id) = annotation {
                pending_id = Some(id);
            }
            continue;
        }

        let mut cursor = Cursor::new(code, line_no);
        let (head, body) = cursor.rule()?;
        let id = annotation
            .or_else(|| pending_id.take())
            .unwrap_or_else(|| RuleId::positional(rules.len() + 1));
        pending_id = None;
        rules.push((Rule { id, head, body }, line_no));
    }

    let mut seen = std::collections::BTreeSet::new();
    for (rule, line) in &rules {
        if !seen.insert(rule.id.clone()) {
            return Err(Error::DuplicateRuleId {
                id: rule.id.clone(),
                line: *line,
            });
        }
    }
    Program::new(rules.into_iter().map(|(r, _)| r).collect())
}

fn parse_annotation(comment: &str, line: usize, column: usize) -> Result<Option<RuleId>> {
    let trimmed = comment.trim();
    let Some(rest) = trimmed.strip_prefix("#id") else {
        return Ok(None);
    };
    let id = rest.trim();
    let valid = !id.is_empty()
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && (rest.starts_with(char::is_whitespace));
    if !valid {
        return Err(Error::Syntax {
            line,
            column,
            message: format!("malformed rule id annotation `{trimmed}`"),
        });
    }
    Ok(Some(RuleId::new(id)))
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Self { src, pos: 0, line }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.src[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    fn literal(&mut self) -> Result<Literal> {
        let strong_neg = self.eat("-");
        self.skip_ws();
        let start = self.pos;
        match self.ident() {
            Some(name) if is_atom_name(name) => Ok(Literal {
                atom: Atom::new_unchecked(name),
                strong_neg,
            }),
            Some(name) => {
                self.pos = start;
                Err(self.error(format!("invalid atom name `{name}`")))
            }
            None => Err(self.error("expected an atom")),
        }
    }

    fn body_literal(&mut self) -> Result<BodyLiteral> {
        self.skip_ws();
        let rest = self.rest();
        let is_not = rest.starts_with("not")
            && rest[3..].starts_with(char::is_whitespace)
            && !rest[3..].trim_start().starts_with([',', '.']);
        if is_not {
            self.pos += 3;
            Ok(BodyLiteral::not(self.literal()?))
        } else {
            Ok(BodyLiteral::pos(self.literal()?))
        }
    }

    fn rule(&mut self) -> Result<(Literal, IndexSet<BodyLiteral>)> {
        let head = self.literal()?;
        let mut body = IndexSet::new();
        if self.eat(":-") {
            loop {
                body.insert(self.body_literal()?);
                if self.eat(",") {
                    continue;
                }
                break;
            }
        }
        if !self.eat(".") {
            return Err(self.error("expected `.`"));
        }
        self.skip_ws();
        if !self.rest().is_empty() {
            return Err(self.error("unexpected input after end of rule"));
        }
        Ok((head, body))
    }
}

/// Prints one rule per line. Rules whose id differs from the positional
/// default carry a `% #id` annotation so that printing round-trips.
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for (i, rule) in p.rules().iter().enumerate() {
        out.push_str(&print_rule(rule));
        if rule.id != RuleId::positional(i + 1) {
            let _ = write!(out, " % #id {}", rule.id);
        }
        out.push('\n');
    }
    out
}

/// `head :- b1, ..., bn.` or `head.`
pub fn print_rule(rule: &Rule) -> String {
    let mut out = rule.head.to_string();
    if !rule.body.is_empty() {
        out.push_str(" :- ");
        for (i, b) in rule.body.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{b}");
        }
    }
    out.push('.');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rule_with_both_negations() {
        let p = parse_program("a :- b, not c.").unwrap();
        let r = &p.rules()[0];
        assert_eq!(r.id.as_str(), "r1");
        assert_eq!(r.head.to_string(), "a");
        assert_eq!(
            r.body_pos().map(|l| l.to_string()).collect::<Vec<_>>(),
            ["b"]
        );
        assert_eq!(
            r.body_neg().map(|l| l.to_string()).collect::<Vec<_>>(),
            ["c"]
        );
    }

    #[test]
    fn parses_strongly_negated_head_and_body() {
        let p = parse_program("-u :- s, -t, h.").unwrap();
        let r = &p.rules()[0];
        assert!(r.head.strong_neg);
        let pos: Vec<_> = r.body_pos().map(|l| l.to_string()).collect();
        assert_eq!(pos, ["s", "-t", "h"]);
    }

    #[test]
    fn empty_input_is_empty_program() {
        assert!(parse_program("").unwrap().is_empty());
        assert!(parse_program("\n  % only a comment\n\n")
            .unwrap()
            .is_empty());
        assert_eq!(print_program(&Program::default()), "");
    }

    #[test]
    fn id_annotations_override_positions() {
        let text = "a :- b. % #id r14\n% #id top\n-a :- c.\nx.\n";
        let p = parse_program(text).unwrap();
        let ids: Vec<_> = p.rules().iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["r14", "top", "r3"]);
    }

    #[test]
    fn duplicate_ids_report_the_line() {
        let err = parse_program("a. % #id r2\nb.\n").unwrap_err();
        assert_eq!(
            err,
            Error::DuplicateRuleId {
                id: RuleId::from("r2"),
                line: 2
            }
        );
    }

    #[test]
    fn syntax_errors_carry_location() {
        match parse_program("a :- b.\nx :- y,, z.\n").unwrap_err() {
            Error::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 8);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_program("a :- b").unwrap_err(),
            Error::Syntax { line: 1, .. }
        ));
        assert!(matches!(
            parse_program("A :- b.").unwrap_err(),
            Error::Syntax {
                line: 1,
                column: 1,
                ..
            }
        ));
        assert!(matches!(
            parse_program("a :- b. c.").unwrap_err(),
            Error::Syntax { .. }
        ));
        assert!(matches!(
            parse_program("a :- .").unwrap_err(),
            Error::Syntax { .. }
        ));
    }

    #[test]
    fn atoms_prefixed_with_not_are_not_keywords() {
        let p = parse_program("a :- note, not nothing.").unwrap();
        let r = &p.rules()[0];
        assert_eq!(r.body_pos().next().unwrap().to_string(), "note");
        assert_eq!(r.body_neg().next().unwrap().to_string(), "nothing");
    }

    #[test]
    fn printer_spacing() {
        let p = parse_program("a:-b,not   c.\n-u:- s ,-t,h .\nf.").unwrap();
        assert_eq!(print_program(&p), "a :- b, not c.\n-u :- s, -t, h.\nf.\n");
    }

    #[test]
    fn printing_round_trips_annotations() {
        let text = "a :- b. % #id r7\n-a :- b, not c.\n";
        let p = parse_program(text).unwrap();
        let printed = print_program(&p);
        assert_eq!(printed, text);
        assert_eq!(parse_program(&printed).unwrap(), p);
    }
}
