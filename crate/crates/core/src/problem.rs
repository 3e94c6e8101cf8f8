//! Problem files: field, template or overlay, layout and window as JSON.
//!
//! ```json
//! {
//!   "field": {"kind": "rational"},
//!   "template": "XY + 3Y + 2X - I",
//!   "layout": {"kind": "standard", "params": {"a": 0, "d": 0}, "values": "delta:0,0"},
//!   "window": {"r_min": -1, "r_max": 3, "c_min": -1, "c_max": 3}
//! }
//! ```
//!
//! `overlay` may replace `template`: rows of scalars, top row first, each row
//! written left to right as in the figures. Layout `values` is either a list
//! of `{"r", "c", "value"}` entries or one of `"zero"`, `"delta"`,
//! `"delta:r,c"` and `"random:seed"`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::layout::{Layout, LayoutError, ValueSource};
use crate::overlay::Overlay;
use crate::parser::parse_template;
use crate::scalar::{FieldDescriptor, Scalar};
use crate::template::Template;
use crate::window::{Bounds, Coord};

/// A problem file rejected at the JSON location `pointer`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}: {message}", if pointer.is_empty() { "/" } else { pointer.as_str() })]
pub struct SchemaError {
    pub pointer: String,
    pub message: String,
}

impl SchemaError {
    fn at(pointer: impl Into<String>, message: impl ToString) -> Self {
        SchemaError {
            pointer: pointer.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ScalarText {
    Int(i64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    r: i64,
    c: i64,
    value: ScalarText,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawValues {
    Named(String),
    Listed(Vec<RawEntry>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    a: Option<i64>,
    d: Option<i64>,
    k: Option<i64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum LayoutKind {
    Standard,
    Diagonal,
    Custom,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayout {
    kind: LayoutKind,
    #[serde(default)]
    params: RawParams,
    values: RawValues,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    field: FieldDescriptor,
    template: Option<String>,
    overlay: Option<Vec<Vec<ScalarText>>>,
    layout: RawLayout,
    window: Bounds,
}

/// A validated problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    pub field: FieldDescriptor,
    pub template: Template,
    pub overlay: Overlay,
    pub layout: Layout,
    pub bounds: Bounds,
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => {
                out.push('/');
                out.push_str(&key.replace('~', "~0").replace('/', "~1"));
            }
            Segment::Enum { .. } | Segment::Unknown => {}
        }
    }
    out
}

fn scalar(
    raw: &ScalarText,
    field: FieldDescriptor,
    pointer: String,
) -> Result<Scalar, SchemaError> {
    match raw {
        ScalarText::Int(v) => Ok(Scalar::from_i64(*v, field)),
        ScalarText::Text(s) => Scalar::parse(s, field).map_err(|e| SchemaError::at(pointer, e)),
    }
}

fn parse_coord(text: &str) -> Option<Coord> {
    let (r, c) = text.split_once(',')?;
    Some((r.trim().parse().ok()?, c.trim().parse().ok()?))
}

fn value_source(
    raw: &RawValues,
    field: FieldDescriptor,
    bounds: &Bounds,
) -> Result<ValueSource, SchemaError> {
    const PTR: &str = "/layout/values";
    match raw {
        RawValues::Named(name) => {
            let bad = || {
                SchemaError::at(
                    PTR,
                    format!("unknown value source `{name}`; expected zero, delta, delta:r,c or random:seed"),
                )
            };
            match name.as_str() {
                "zero" => Ok(ValueSource::Zero),
                "delta" => Ok(ValueSource::Delta((0, 0))),
                _ => {
                    if let Some(rest) = name.strip_prefix("delta:") {
                        parse_coord(rest).map(ValueSource::Delta).ok_or_else(bad)
                    } else if let Some(rest) = name.strip_prefix("random:") {
                        let seed = rest.trim().parse().map_err(|_| bad())?;
                        Ok(ValueSource::Random { seed })
                    } else {
                        Err(bad())
                    }
                }
            }
        }
        RawValues::Listed(entries) => {
            let mut map = BTreeMap::new();
            for (i, e) in entries.iter().enumerate() {
                let at = format!("{PTR}/{i}");
                if !bounds.contains((e.r, e.c)) {
                    return Err(SchemaError::at(
                        at,
                        format!("coordinate ({}, {}) is outside the window", e.r, e.c),
                    ));
                }
                let v = scalar(&e.value, field, format!("{at}/value"))?;
                if map.insert((e.r, e.c), v).is_some() {
                    return Err(SchemaError::at(
                        at,
                        format!("coordinate ({}, {}) listed twice", e.r, e.c),
                    ));
                }
            }
            Ok(ValueSource::Explicit(map))
        }
    }
}

fn entry_pointer(raw: &RawValues, coord: Coord) -> String {
    match raw {
        RawValues::Listed(entries) => entries
            .iter()
            .position(|e| (e.r, e.c) == coord)
            .map_or("/layout/values".into(), |i| format!("/layout/values/{i}")),
        RawValues::Named(_) => "/layout/values".into(),
    }
}

fn build_layout(raw: &RawLayout, overlay: &Overlay, bounds: Bounds) -> Result<Layout, SchemaError> {
    let field = overlay.field();
    let values = value_source(&raw.values, field, &bounds)?;
    let missing = |name: &str| SchemaError::at("/layout/params", format!("missing `{name}`"));
    let layout_err = |e: LayoutError| match e {
        LayoutError::NotInLayout(c) => SchemaError::at(
            entry_pointer(&raw.values, c),
            format!("coordinate ({}, {}) is not part of the layout", c.0, c.1),
        ),
        other => SchemaError::at("/layout", other),
    };
    let layout = match raw.kind {
        LayoutKind::Standard => {
            let a = raw.params.a.ok_or_else(|| missing("a"))?;
            let d = raw.params.d.ok_or_else(|| missing("d"))?;
            Layout::standard(overlay, bounds, a, d, &values).map_err(layout_err)?
        }
        LayoutKind::Diagonal => {
            let k = raw.params.k.ok_or_else(|| missing("k"))?;
            Layout::diagonal(k, bounds, field, &values).map_err(layout_err)?
        }
        LayoutKind::Custom => match values {
            ValueSource::Explicit(ref map) => {
                Layout::custom(field, map.clone()).map_err(layout_err)?
            }
            _ => {
                return Err(SchemaError::at(
                    "/layout/values",
                    "a custom layout lists its coordinates explicitly",
                ))
            }
        },
    };
    if let ValueSource::Delta(at) = values {
        if !layout.contains(at) {
            return Err(SchemaError::at(
                "/layout/values",
                format!(
                    "delta coordinate ({}, {}) is not part of the layout",
                    at.0, at.1
                ),
            ));
        }
    }
    Ok(layout)
}

/// Parses and validates problem JSON.
pub fn load_problem(text: &str) -> Result<ProblemSpec, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawProblem = serde_path_to_error::deserialize(de)
        .map_err(|e| SchemaError::at(pointer_of(e.path()), e.inner()))?;
    let field = raw.field;
    field.validate().map_err(|e| SchemaError::at("/field", e))?;
    let bounds = raw.window;
    bounds
        .validate()
        .map_err(|e| SchemaError::at("/window", e))?;

    let template = match (&raw.template, &raw.overlay) {
        (Some(text), None) => {
            parse_template(text, field).map_err(|e| SchemaError::at("/template", e))?
        }
        (None, Some(rows)) => {
            let rows = rows
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, v)| scalar(v, field, format!("/overlay/{i}/{j}")))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            Overlay::from_display_rows(field, rows)
                .map_err(|e| SchemaError::at("/overlay", e))?
                .to_template()
        }
        _ => {
            return Err(SchemaError::at(
                "",
                "exactly one of `template` and `overlay` is required",
            ))
        }
    };
    let overlay = Overlay::from_template(&template).map_err(|e| {
        let ptr = if raw.template.is_some() {
            "/template"
        } else {
            "/overlay"
        };
        SchemaError::at(ptr, e)
    })?;
    let layout = build_layout(&raw.layout, &overlay, bounds)?;
    Ok(ProblemSpec {
        field,
        template,
        overlay,
        layout,
        bounds,
    })
}

/// Reads and validates a problem file.
pub fn load_problem_file(path: impl AsRef<Path>) -> Result<ProblemSpec, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(load_problem(&text)?)
}
