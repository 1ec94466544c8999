//! Timestamped growth events and their tab-separated text form.
//!
//! One event per line: `t<TAB>u` adds node `u`, `t<TAB>u<TAB>v` adds edge
//! `{u, v}`. Lines starting with `#` are comments; an inline `#type=X`
//! comment carries the generator's event tag. Header comments of the form
//! `# key=value` are collected into [`LogHeader`].

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Growth event classes: new isolated node, edge between two new nodes,
/// new node joining an existing one, edge between two existing nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventType {
    Z,
    R,
    I,
    H,
}

impl EventType {
    pub const ALL: [EventType; 4] = [EventType::Z, EventType::R, EventType::I, EventType::H];

    pub fn as_char(self) -> char {
        match self {
            EventType::Z => 'Z',
            EventType::R => 'R',
            EventType::I => 'I',
            EventType::H => 'H',
        }
    }
}

impl fmt::Display for EventType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for EventType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Z" => Ok(EventType::Z),
            "R" => Ok(EventType::R),
            "I" => Ok(EventType::I),
            "H" => Ok(EventType::H),
            other => Err(Error::invalid(format!("unknown event type {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Node(u64),
    Edge(u64, u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeEvent {
    pub timestamp: f64,
    pub kind: EventKind,
    pub tag: Option<EventType>,
}

impl EdgeEvent {
    pub fn node(timestamp: f64, u: u64) -> Self {
        Self { timestamp, kind: EventKind::Node(u), tag: None }
    }

    pub fn edge(timestamp: f64, u: u64, v: u64) -> Self {
        Self { timestamp, kind: EventKind::Edge(u, v), tag: None }
    }

    pub fn tagged(mut self, tag: EventType) -> Self {
        self.tag = Some(tag);
        self
    }

    pub fn is_edge(&self) -> bool {
        matches!(self.kind, EventKind::Edge(..))
    }
}

/// Key/value metadata written as `# key=value` lines ahead of the events.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub entries: Vec<(String, String)>,
}

impl LogHeader {
    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub header: LogHeader,
    pub events: Vec<EdgeEvent>,
}

impl EventLog {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn write_tsv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for (k, v) in &self.header.entries {
            writeln!(out, "# {k}={v}")?;
        }
        write_events(out, &self.events)
    }

    pub fn read_tsv<R: BufRead>(input: R, opts: ParseOptions) -> Result<Self> {
        let mut header = LogHeader::default();
        let events = parse_lines(input, opts, Some(&mut header))?;
        Ok(Self { header, events })
    }
}

pub fn write_events<W: Write>(out: &mut W, events: &[EdgeEvent]) -> std::io::Result<()> {
    for ev in events {
        match ev.kind {
            EventKind::Node(u) => write!(out, "{}\t{u}", ev.timestamp)?,
            EventKind::Edge(u, v) => write!(out, "{}\t{u}\t{v}", ev.timestamp)?,
        }
        match ev.tag {
            Some(tag) => writeln!(out, "\t#type={tag}")?,
            None => writeln!(out)?,
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject timestamps that decrease from one event to the next.
    pub strict: bool,
}

/// Parses event lines, skipping blanks and `#` comments.
pub fn parse_events<R: BufRead>(input: R, opts: ParseOptions) -> Result<Vec<EdgeEvent>> {
    parse_lines(input, opts, None)
}

fn parse_lines<R: BufRead>(input: R, opts: ParseOptions, mut header: Option<&mut LogHeader>) -> Result<Vec<EdgeEvent>> {
    let mut events = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(h) = header.as_deref_mut() {
                // Keys are single tokens; free-text comments containing '=' are not entries.
                if let Some((k, v)) = comment.trim().split_once('=') {
                    let key = k.trim();
                    if !key.is_empty() && !key.contains(char::is_whitespace) {
                        h.set(key, v.trim());
                    }
                }
            }
            continue;
        }
        let ev = parse_line(trimmed).map_err(|message| Error::Parse { line: lineno, message })?;
        if opts.strict && ev.timestamp < last_t {
            return Err(Error::Parse {
                line: lineno,
                message: format!("timestamp {} decreases from {last_t}", ev.timestamp),
            });
        }
        last_t = ev.timestamp;
        events.push(ev);
    }
    Ok(events)
}

fn parse_line(line: &str) -> std::result::Result<EdgeEvent, String> {
    let (data, comment) = match line.find('#') {
        Some(pos) => (&line[..pos], Some(&line[pos + 1..])),
        None => (line, None),
    };
    let fields: Vec<&str> = data.split('\t').map(str::trim).filter(|f| !f.is_empty()).collect();
    let timestamp = |s: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|t| t.is_finite())
            .ok_or_else(|| format!("invalid timestamp {s:?}"))
    };
    let id = |s: &str| s.parse::<u64>().map_err(|_| format!("invalid node id {s:?}"));
    let mut ev = match fields.as_slice() {
        [t, u] => EdgeEvent::node(timestamp(t)?, id(u)?),
        [t, u, v] => EdgeEvent::edge(timestamp(t)?, id(u)?, id(v)?),
        _ => return Err(format!("expected 2 or 3 tab-separated fields, found {}", fields.len())),
    };
    if let Some(tag) = comment.and_then(|c| c.trim().strip_prefix("type=")) {
        ev.tag = Some(tag.parse().map_err(|e: Error| e.to_string())?);
    }
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<EdgeEvent>> {
        parse_events(text.as_bytes(), ParseOptions::default())
    }

    #[test]
    fn parses_both_shapes() {
        let evs = parse("0\t1\t2\n5\t7\n").unwrap();
        assert_eq!(evs, vec![EdgeEvent::edge(0.0, 1, 2), EdgeEvent::node(5.0, 7)]);
    }

    #[test]
    fn reports_malformed_line_number() {
        match parse("# header\n0\t1\t2\nx\t1\t2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("1\t2\t3\t4\n").is_err());
        assert!(parse("1\t-2\n").is_err());
    }

    #[test]
    fn strict_mode_rejects_decreasing_time() {
        let text = "2\t1\n1\t2\n";
        assert!(parse(text).is_ok());
        let err = parse_events(text.as_bytes(), ParseOptions { strict: true }).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        // equal timestamps are fine
        assert!(parse_events("1\t1\n1\t2\n".as_bytes(), ParseOptions { strict: true }).is_ok());
    }

    #[test]
    fn tags_and_header_round_trip() {
        let mut log = EventLog::default();
        log.header.set("model", "model1");
        log.header.set("seed", 9);
        log.events.push(EdgeEvent::node(0.0, 0).tagged(EventType::Z));
        log.events.push(EdgeEvent::edge(0.125, 1, 2).tagged(EventType::R));
        log.events.push(EdgeEvent::edge(1e-7, 1, 0));
        let mut buf = Vec::new();
        log.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# model=model1\n# seed=9\n0\t0\t#type=Z\n"));
        let back = EventLog::read_tsv(buf.as_slice(), ParseOptions::default()).unwrap();
        assert_eq!(back, log);
    }

    #[test]
    fn rejects_unknown_tag() {
        assert!(parse("0\t1\t2\t#type=Q\n").is_err());
        assert_eq!(parse("0\t1\t2\t# note\n").unwrap()[0].tag, None);
    }
}
