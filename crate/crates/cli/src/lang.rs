//! The prefix event language of `perc prob --event`.
//!
//! ```text
//! conn S T          some vertex of S is connected to some vertex of T
//! reach S T         directed reachability from S to T
//! cluster>= v k     |C(v)| >= k   (also spelled cluster≥)
//! edge i            edge number i is open
//! pivotal u v E     opening a u-v edge changes E
//! not E | and E F | or E F
//! ```
//!
//! `S` and `T` are comma-separated vertex ids.

use perc_core::{Error, EventExpr, Result};

pub fn parse_event(src: &str) -> Result<EventExpr> {
    let mut toks = src.split_whitespace();
    let ev = expr(&mut toks)?;
    if let Some(extra) = toks.next() {
        return Err(Error::Parse(format!("unexpected `{extra}` after a complete event")));
    }
    Ok(ev)
}

fn next<'a>(toks: &mut impl Iterator<Item = &'a str>, what: &str) -> Result<&'a str> {
    toks.next().ok_or_else(|| Error::Parse(format!("event ended where {what} was expected")))
}

fn set<'a>(toks: &mut impl Iterator<Item = &'a str>) -> Result<Vec<String>> {
    let s = next(toks, "a vertex set")?;
    let v: Vec<String> = s.split(',').filter(|x| !x.is_empty()).map(str::to_string).collect();
    if v.is_empty() {
        return Err(Error::Parse(format!("empty vertex set `{s}`")));
    }
    Ok(v)
}

fn number<'a>(toks: &mut impl Iterator<Item = &'a str>, what: &str) -> Result<usize> {
    let s = next(toks, what)?;
    s.parse().map_err(|_| Error::Parse(format!("`{s}` is not a valid {what}")))
}

fn expr<'a>(toks: &mut impl Iterator<Item = &'a str>) -> Result<EventExpr> {
    let head = next(toks, "an event")?;
    Ok(match head {
        "conn" => EventExpr::Conn(set(toks)?, set(toks)?),
        "reach" => EventExpr::Reach(set(toks)?, set(toks)?),
        "cluster>=" | "cluster≥" => {
            let v = next(toks, "a vertex")?.to_string();
            EventExpr::ClusterAtLeast(v, number(toks, "cluster size")?)
        }
        "edge" => EventExpr::EdgeOpen(number(toks, "edge index")?),
        "pivotal" => {
            let u = next(toks, "a vertex")?.to_string();
            let v = next(toks, "a vertex")?.to_string();
            EventExpr::Pivotal((u, v), Box::new(expr(toks)?))
        }
        "not" => expr(toks)?.not(),
        "and" => EventExpr::And(vec![expr(toks)?, expr(toks)?]),
        "or" => EventExpr::Or(vec![expr(toks)?, expr(toks)?]),
        other => return Err(Error::Parse(format!("unknown event keyword `{other}`"))),
    })
}
