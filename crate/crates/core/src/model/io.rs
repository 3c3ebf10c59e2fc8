use std::collections::HashMap;

use super::{Assignment, ObjectId, ObjectSet, Preference, Profile};
use crate::{Error, Result};

/// Parses the line-oriented profile format:
///
/// ```text
/// n 3
/// 1: a b c
/// 2: b a c
/// 3: c a b
/// ```
///
/// Blank lines and lines starting with `#` are ignored. The canonical object order is the
/// order of first appearance.
pub fn parse_profile(text: &str) -> Result<Profile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "", "empty profile document"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("n") {
        return Err(Error::parse(hline, header, "expected header `n <int>`"));
    }
    let ntok = parts.next().unwrap_or("");
    let n: usize = ntok
        .parse()
        .map_err(|_| Error::parse(hline, ntok, "expected an integer agent count"))?;
    if let Some(extra) = parts.next() {
        return Err(Error::parse(hline, extra, "unexpected token after agent count"));
    }
    if n < 3 {
        return Err(Error::parse(hline, ntok, "n must be at least 3"));
    }

    let mut tokens: Vec<String> = Vec::with_capacity(n);
    let mut lookup: HashMap<String, usize> = HashMap::new();
    let mut orders: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut last_line = hline;
    for (line, content) in lines {
        last_line = line;
        if orders.len() == n {
            return Err(Error::parse(line, content, format!("more than {n} agent lines")));
        }
        let (label, rest) = content
            .split_once(':')
            .ok_or_else(|| Error::parse(line, content, "expected `<agent-label>: <objects>`"))?;
        if label.trim().is_empty() {
            return Err(Error::parse(line, content, "missing agent label"));
        }
        let objs: Vec<&str> = rest.split_whitespace().collect();
        let mut order = Vec::with_capacity(n);
        for (k, tok) in objs.iter().enumerate() {
            if k >= n {
                return Err(Error::parse(
                    line,
                    *tok,
                    format!("wrong object count: expected {n}, got {}", objs.len()),
                ));
            }
            if tok.contains([',', '|']) {
                return Err(Error::parse(line, *tok, "object tokens may not contain ',' or '|'"));
            }
            let idx = match lookup.get(*tok) {
                Some(&i) => i,
                None if tokens.len() < n => {
                    tokens.push(tok.to_string());
                    lookup.insert(tok.to_string(), tokens.len() - 1);
                    tokens.len() - 1
                }
                None => {
                    return Err(Error::parse(
                        line,
                        *tok,
                        format!("unknown object; {n} objects already seen"),
                    ))
                }
            };
            if order.contains(&idx) {
                return Err(Error::parse(line, *tok, "duplicate object in preference"));
            }
            order.push(idx);
        }
        if order.len() != n {
            let tok = objs.last().copied().unwrap_or("");
            return Err(Error::parse(
                line,
                tok,
                format!("wrong object count: expected {n}, got {}", objs.len()),
            ));
        }
        orders.push(order);
    }
    if orders.len() != n {
        return Err(Error::parse(
            last_line,
            "",
            format!("expected {n} agent lines, found {}", orders.len()),
        ));
    }
    let objects = ObjectSet::new(tokens)?;
    let prefs = orders
        .into_iter()
        .map(|o| Preference::new(o.into_iter().map(ObjectId).collect()))
        .collect::<Result<Vec<_>>>()?;
    Profile::new(objects, prefs)
}

/// Renders a profile in the format accepted by [`parse_profile`], agents labelled `1..n`.
pub fn format_profile(profile: &Profile) -> String {
    let mut out = format!("n {}\n", profile.n());
    for (i, p) in profile.prefs().iter().enumerate() {
        out.push_str(&format!("{}: {}\n", i + 1, p.display(profile.objects())));
    }
    out
}

/// TSV rendering: a header of object tokens, then one row of rationals per agent.
pub fn format_assignment(assignment: &Assignment, objects: &ObjectSet) -> String {
    let mut out = objects.tokens().join("\t");
    out.push('\n');
    for row in assignment.rows() {
        out.push_str(&row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\t"));
        out.push('\n');
    }
    out
}
