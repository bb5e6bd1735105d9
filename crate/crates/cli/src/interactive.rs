//! A line-based prompt loop for resolving without the web UI.
//!
//! Commands: `<key> [targets...]` applies an extension (all clique
//! members when no target is given), `s` takes the suggestion, `u` undoes
//! the last step, `q` stops.

use std::io::{self, BufRead, Write};

use elp_resolve_core::session::{Session, Status};
use elp_resolve_core::{LambdaExtension, RuleId};

pub fn run(
    session: &mut Session,
    input: &mut impl BufRead,
    out: &mut impl Write,
) -> io::Result<()> {
    let mut line = String::new();
    loop {
        show(session, out)?;
        if session.state().status != Status::Resolving {
            return Ok(());
        }
        write!(out, "choice> ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            return Ok(());
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let outcome = match words.as_slice() {
            [] => continue,
            ["q" | "quit"] => return Ok(()),
            ["u" | "undo"] => session.undo(),
            ["s" | "suggest"] => match session.suggest() {
                Some(c) => session.choose(&c.extension, &c.targets).map(|_| ()),
                None => continue,
            },
            [key, targets @ ..] => {
                let targets: Vec<RuleId> = if targets.is_empty() {
                    LambdaExtension::parse_key(key)
                        .map(|x| session.state().clique_targets(&x))
                        .unwrap_or_default()
                } else {
                    targets.iter().map(|t| RuleId::from(*t)).collect()
                };
                session.choose(key, &targets).map(|_| ())
            }
        };
        if let Err(e) = outcome {
            writeln!(out, "rejected: {e}")?;
        }
    }
}

fn show(session: &Session, out: &mut impl Write) -> io::Result<()> {
    let s = session.state();
    match s.status {
        Status::Clean => return writeln!(out, "no conflicts left"),
        Status::Blocked => {
            writeln!(out, "remaining conflicts need a manual edit:")?;
            for c in &s.unresolvable {
                writeln!(out, "  {c}")?;
            }
            return Ok(());
        }
        Status::Resolving => {}
    }
    for rank in &s.orders.groups {
        let Some(g) = s.group(&rank.id) else { continue };
        let rep = g.representative.as_ref().map_or("-", RuleId::as_str);
        let exts: Vec<String> = s.orders.extensions[&rank.id]
            .iter()
            .map(|e| format!("{} ({})", e.key(), e.weight))
            .collect();
        writeln!(out, "{} [{}]: {}", g.label(), rep, exts.join(", "))?;
    }
    Ok(())
}
