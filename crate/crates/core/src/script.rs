//! Update scripts: one update per line, `!enum` marks a checkpoint.
//!
//! ```text
//! +node 4
//! +edge 3 a 4
//! -edge 1 a 2
//! -node 4
//! !enum
//! ```

use std::fmt;

use crate::error::{Result, RpqError};
use crate::graph::Update;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptLine {
    Update(Update),
    /// Re-enumerate the current database.
    Enumerate,
}

impl fmt::Display for ScriptLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScriptLine::Update(u) => u.fmt(f),
            ScriptLine::Enumerate => f.write_str("!enum"),
        }
    }
}

fn single_char(tok: &str, line: usize) -> Result<char> {
    let mut cs = tok.chars();
    match (cs.next(), cs.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(RpqError::Format { line, message: format!("label '{tok}' is not a single character") }),
    }
}

/// Blank lines and lines starting with `#` are skipped.
pub fn parse_script(text: &str) -> Result<Vec<ScriptLine>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        let arity = |n: usize| {
            if toks.len() == n {
                Ok(())
            } else {
                Err(RpqError::Format { line, message: format!("'{}' takes {} arguments", toks[0], n - 1) })
            }
        };
        let parsed = match toks[0] {
            "!enum" => {
                arity(1)?;
                ScriptLine::Enumerate
            }
            "+edge" | "-edge" => {
                arity(4)?;
                let (src, label, dst) = (toks[1].to_string(), single_char(toks[2], line)?, toks[3].to_string());
                ScriptLine::Update(if toks[0] == "+edge" {
                    Update::InsertArc { src, label, dst }
                } else {
                    Update::DeleteArc { src, label, dst }
                })
            }
            "+node" => {
                arity(2)?;
                ScriptLine::Update(Update::AddNode(toks[1].to_string()))
            }
            "-node" => {
                arity(2)?;
                ScriptLine::Update(Update::DeleteNode(toks[1].to_string()))
            }
            other => return Err(RpqError::Format { line, message: format!("unknown script command '{other}'") }),
        };
        out.push(parsed);
    }
    Ok(out)
}

pub fn format_script(lines: &[ScriptLine]) -> String {
    let mut out = String::new();
    for l in lines {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "+node 4\n+edge 3 a 4\n-edge 1 a 2\n-node 4\n!enum\n";
        let lines = parse_script(text).unwrap();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[4], ScriptLine::Enumerate);
        assert_eq!(lines[1], ScriptLine::Update(Update::InsertArc { src: "3".into(), label: 'a', dst: "4".into() }));
        assert_eq!(format_script(&lines), text);
    }

    #[test]
    fn comments_and_errors() {
        assert!(parse_script("# note\n\n!enum\n").unwrap().len() == 1);
        assert!(matches!(parse_script("+edge 1 ab 2"), Err(RpqError::Format { line: 1, .. })));
        assert!(matches!(parse_script("!enum\n+node"), Err(RpqError::Format { line: 2, .. })));
        assert!(matches!(parse_script("move 1 2"), Err(RpqError::Format { .. })));
    }
}
