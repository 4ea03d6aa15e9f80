//! Parser for body descriptors such as `ball:r=2`, `ellipsoid:axes=1,2,3`,
//! `box:bounds=-1,1;0,2` or `polytope:file=cube.json`.

use std::fs;
use std::path::Path;

use sectio::body::{AxisBox, Ball, ConvexBody, Ellipsoid, HPolytope, Simplex};
use sectio::polytope::HalfspaceDocument;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BodySpecError {
    #[error("body spec '{spec}', column {position}: {message}")]
    Syntax { spec: String, position: usize, message: String },
    #[error("body spec '{spec}': {source}")]
    Body { spec: String, source: sectio::Error },
    #[error("cannot read polytope file '{path}': {message}")]
    File { path: String, message: String },
}

struct Cursor<'a> {
    spec: &'a str,
}

impl Cursor<'_> {
    fn fail<T>(&self, position: usize, message: impl Into<String>) -> Result<T, BodySpecError> {
        Err(BodySpecError::Syntax { spec: self.spec.to_string(), position: position + 1, message: message.into() })
    }

    fn real(&self, text: &str, position: usize) -> Result<f64, BodySpecError> {
        match text.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => self.fail(position, format!("expected a real number, found '{text}'")),
        }
    }

    fn list(&self, text: &str, position: usize) -> Result<Vec<f64>, BodySpecError> {
        let mut out = Vec::new();
        let mut offset = position;
        for item in text.split(',') {
            out.push(self.real(item, offset)?);
            offset += item.len() + 1;
        }
        Ok(out)
    }
}

/// Splits `key=value` pairs after the colon, keeping the column where each
/// value starts.
fn options<'a>(cur: &Cursor<'a>, rest: &'a str, start: usize) -> Result<Vec<(&'a str, &'a str, usize)>, BodySpecError> {
    if rest.is_empty() {
        return cur.fail(start, "expected key=value after ':'");
    }
    let Some((key, value)) = rest.split_once('=') else {
        return cur.fail(start, format!("expected key=value, found '{rest}'"));
    };
    Ok(vec![(key, value, start + key.len() + 1)])
}

fn body(spec: &str, result: sectio::Result<ConvexBody>) -> Result<ConvexBody, BodySpecError> {
    result.map_err(|source| BodySpecError::Body { spec: spec.to_string(), source })
}

fn check_len(cur: &Cursor, got: usize, d: usize, position: usize, what: &str) -> Result<(), BodySpecError> {
    if got != d {
        return cur.fail(position, format!("{what} has {got} entries but d = {d}"));
    }
    Ok(())
}

/// Loads `{"A": [[...]], "b": [...]}` from disk as a bounded polytope.
pub fn load_polytope(path: &Path, d: usize) -> Result<ConvexBody, BodySpecError> {
    let file_err = |message: String| BodySpecError::File { path: path.display().to_string(), message };
    let text = fs::read_to_string(path).map_err(|e| file_err(e.to_string()))?;
    let doc: HalfspaceDocument = serde_json::from_str(&text).map_err(|e| file_err(e.to_string()))?;
    let spec = format!("polytope:file={}", path.display());
    let hs = doc.to_halfspaces().map_err(|source| BodySpecError::Body { spec: spec.clone(), source })?;
    if hs.dim() != d {
        return Err(BodySpecError::Body { spec, source: sectio::Error::DimensionMismatch { expected: d, found: hs.dim() } });
    }
    body(&spec, HPolytope::new(hs).map(ConvexBody::Polytope))
}

pub fn parse_body_spec(spec: &str, d: usize) -> Result<ConvexBody, BodySpecError> {
    let cur = Cursor { spec };
    let (kind, rest, rest_at) = match spec.split_once(':') {
        Some((kind, rest)) => (kind, Some(rest), kind.len() + 1),
        None => (spec, None, spec.len()),
    };
    let opts = match rest {
        Some(rest) => options(&cur, rest, rest_at)?,
        None => Vec::new(),
    };
    let unknown = |key: &str, at: usize| cur.fail(at - key.len() - 1, format!("unknown option '{key}' for {kind}"));
    match kind {
        "ball" => {
            let mut radius = 1.0;
            for (key, value, at) in opts {
                match key {
                    "r" => radius = cur.real(value, at)?,
                    _ => return unknown(key, at),
                }
            }
            body(spec, Ball::new(vec![0.0; d], radius).map(ConvexBody::Ball))
        }
        "ellipsoid" => {
            let mut axes = None;
            for (key, value, at) in opts {
                match key {
                    "axes" => {
                        let list = cur.list(value, at)?;
                        check_len(&cur, list.len(), d, at, "axes")?;
                        axes = Some(list);
                    }
                    _ => return unknown(key, at),
                }
            }
            let Some(axes) = axes else {
                return cur.fail(spec.len(), "ellipsoid needs axes=<a1,...,ad>");
            };
            body(spec, Ellipsoid::axis_aligned(vec![0.0; d], &axes).map(ConvexBody::Ellipsoid))
        }
        "box" => {
            let mut built = None;
            for (key, value, at) in opts {
                match key {
                    "half" => {
                        let h = cur.real(value, at)?;
                        built = Some(AxisBox::cube(d, h));
                    }
                    "bounds" => {
                        let (mut lower, mut upper) = (Vec::new(), Vec::new());
                        let mut offset = at;
                        for pair in value.split(';') {
                            let list = cur.list(pair, offset)?;
                            if list.len() != 2 {
                                return cur.fail(offset, format!("expected 'lower,upper', found '{pair}'"));
                            }
                            lower.push(list[0]);
                            upper.push(list[1]);
                            offset += pair.len() + 1;
                        }
                        check_len(&cur, lower.len(), d, at, "bounds")?;
                        built = Some(AxisBox::new(lower, upper));
                    }
                    _ => return unknown(key, at),
                }
            }
            let Some(built) = built else {
                return cur.fail(spec.len(), "box needs half=<h> or bounds=<l1,u1;...>");
            };
            body(spec, built.map(ConvexBody::Box))
        }
        "simplex" => {
            if let Some((key, _, at)) = opts.first() {
                return unknown(key, *at);
            }
            body(spec, Simplex::standard(d).map(ConvexBody::Simplex))
        }
        "polytope" => {
            let mut file = None;
            for (key, value, at) in opts {
                match key {
                    "file" => file = Some(value),
                    _ => return unknown(key, at),
                }
            }
            let Some(file) = file else {
                return cur.fail(spec.len(), "polytope needs file=<path>");
            };
            load_polytope(Path::new(file), d)
        }
        _ => cur.fail(0, format!("unknown body kind '{kind}' (expected ball, ellipsoid, box, simplex or polytope)")),
    }
}
