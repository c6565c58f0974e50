//! Polygon files: a vertex count followed by `x y` lines, or JSON
//! `{"vertices": [[x, y], ...]}`.

use std::fmt;

use geocenter::Point;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    /// 1-based line, when known.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line: Some(line),
        message: message.into(),
    }
}

#[derive(Serialize, Deserialize)]
struct JsonPolygon {
    vertices: Vec<[f64; 2]>,
}

/// Parse either format; JSON is recognized by a leading `{`.
pub fn parse_polygon(text: &str) -> Result<Vec<Point>, ParseError> {
    if text.trim_start().starts_with('{') {
        let doc: JsonPolygon =
            serde_json::from_str(text).map_err(|e| err(e.line(), e.to_string()))?;
        return Ok(doc
            .vertices
            .into_iter()
            .map(|[x, y]| Point::new(x, y))
            .collect());
    }
    // Blank lines and `#` comments are skipped.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (first, head) = lines.next().ok_or_else(|| ParseError {
        line: None,
        message: "empty file".into(),
    })?;
    let n: usize = head
        .parse()
        .map_err(|_| err(first, format!("expected a vertex count, found {head:?}")))?;
    let mut out = Vec::with_capacity(n);
    for (no, l) in lines {
        let mut fields = l.split_whitespace();
        let mut coord = |what: &str| -> Result<f64, ParseError> {
            let f = fields
                .next()
                .ok_or_else(|| err(no, format!("missing {what} coordinate")))?;
            f.parse::<f64>()
                .map_err(|_| err(no, format!("bad {what} coordinate {f:?}")))
        };
        let (x, y) = (coord("x")?, coord("y")?);
        if let Some(extra) = fields.next() {
            return Err(err(no, format!("unexpected field {extra:?}")));
        }
        if out.len() == n {
            return Err(err(no, format!("more than the declared {n} vertices")));
        }
        out.push(Point::new(x, y));
    }
    if out.len() != n {
        return Err(ParseError {
            line: None,
            message: format!("declared {n} vertices, found {}", out.len()),
        });
    }
    Ok(out)
}

/// Text format with 17 significant digits, which reads back exactly.
pub fn format_polygon(v: &[Point]) -> String {
    let mut s = format!("{}\n", v.len());
    for p in v {
        s.push_str(&format!("{:.16e} {:.16e}\n", p.x, p.y));
    }
    s
}

pub fn format_polygon_json(v: &[Point]) -> String {
    let doc = JsonPolygon {
        vertices: v.iter().map(|p| [p.x, p.y]).collect(),
    };
    serde_json::to_string(&doc).expect("finite coordinates serialize")
}

/// `X,Y` as given on the command line.
pub fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad coordinate {t:?}"))
    };
    Ok(Point::new(num(x)?, num(y)?))
}
