use roxmltree::{Document, Node};

use super::{validate_map, ElementKind, Geometry, MapDocument, MapElement, MapError, MapPoint, Severity};

const SVG_NS: &str = "http://www.w3.org/2000/svg";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParseOptions {
    /// How far element geometry may extend beyond the frame, in map units.
    pub margin: f64,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { margin: 0.0 }
    }
}

/// Parse an annotated SVG map with default options.
pub fn parse_map(bytes: &[u8]) -> Result<MapDocument, MapError> {
    parse_map_with(bytes, &ParseOptions::default())
}

pub fn parse_map_with(bytes: &[u8], opts: &ParseOptions) -> Result<MapDocument, MapError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count() + 1;
        MapError::Parse { line: line as u32, message: "invalid UTF-8".into() }
    })?;
    let xml = Document::parse(text).map_err(|e| MapError::Parse { line: e.pos().row, message: e.to_string() })?;

    let root = xml.root_element();
    let source_name = child_text(root, "title")
        .or_else(|| root.attribute("id").map(str::to_owned))
        .unwrap_or_else(|| "map".to_owned());

    let mut elements = Vec::new();
    for node in root.descendants().filter(|n| n.is_element() && is_svg(*n)) {
        if let Some(kind) = declared_kind(node)? {
            elements.push(read_element(node, kind)?);
        }
    }

    let frames: Vec<&MapElement> = elements.iter().filter(|e| e.kind == ElementKind::Frame).collect();
    let bounds = match frames.as_slice() {
        [] => return Err(MapError::Structure { element: None, message: "missing frame element".into() }),
        [frame] => frame.geometry.bounding_box().ok_or_else(|| MapError::Structure {
            element: Some(frame.id.clone()),
            message: "frame has no vertices".into(),
        })?,
        [_, second, ..] => {
            return Err(MapError::Structure {
                element: Some(second.id.clone()),
                message: "more than one frame element".into(),
            })
        }
    };

    let doc = MapDocument::from_parts(source_name, bounds, elements).with_margin(opts.margin);
    if let Some(v) = validate_map(&doc).into_iter().find(|v| v.severity == Severity::Error) {
        return Err(MapError::Structure { element: v.element_id, message: v.message });
    }
    Ok(doc)
}

fn is_svg(node: Node) -> bool {
    matches!(node.tag_name().namespace(), None | Some(SVG_NS))
}

fn declared_kind(node: Node) -> Result<Option<ElementKind>, MapError> {
    let Some(class) = node.attribute("class") else { return Ok(None) };
    let kinds: Vec<ElementKind> = class.split_whitespace().filter_map(ElementKind::from_class_token).collect();
    match kinds.as_slice() {
        [] => Ok(None),
        [kind] => Ok(Some(*kind)),
        _ => Err(MapError::Structure {
            element: node.attribute("id").map(str::to_owned),
            message: format!("class `{class}` declares more than one kind"),
        }),
    }
}

/// Text of the first child element named `tag`, whitespace-normalised.
fn child_text(node: Node, tag: &str) -> Option<String> {
    let child = node.children().find(|c| c.is_element() && is_svg(*c) && c.tag_name().name() == tag)?;
    let raw: String = child.descendants().filter(|d| d.is_text()).filter_map(|d| d.text()).collect();
    Some(raw.split_whitespace().collect::<Vec<_>>().join(" "))
}

fn read_element(node: Node, kind: ElementKind) -> Result<MapElement, MapError> {
    let id = match node.attribute("id").map(str::trim) {
        Some(id) if !id.is_empty() => id.to_owned(),
        _ => {
            let line = node.document().text_pos_at(node.range().start).row;
            return Err(MapError::Structure {
                element: None,
                message: format!("<{}> of kind {kind} at line {line} has no id", node.tag_name().name()),
            });
        }
    };
    let name = match child_text(node, "title") {
        Some(name) => name,
        None if kind.is_named() => {
            return Err(MapError::Structure { element: Some(id), message: "missing <title> child".into() })
        }
        None => String::new(),
    };
    let description = child_text(node, "desc").filter(|d| !d.is_empty());
    let (geometry, symbol_radius) = read_geometry(node, &id)?;
    Ok(MapElement { id, kind, name, description, geometry, symbol_radius })
}

fn read_geometry(node: Node, id: &str) -> Result<(Geometry, Option<f64>), MapError> {
    let unsupported = |message: String| MapError::UnsupportedGeometry { element: id.to_owned(), message };
    let attr = |name: &str| -> Result<f64, MapError> {
        let raw = node.attribute(name).unwrap_or("0");
        match numbers(raw).map_err(&unsupported)?.as_slice() {
            [v] => Ok(*v),
            _ => Err(unsupported(format!("attribute {name}=\"{raw}\" is not a single number"))),
        }
    };
    match node.tag_name().name() {
        "circle" => Ok((Geometry::point(attr("cx")?, attr("cy")?), Some(attr("r")?))),
        "polyline" | "polygon" => {
            let raw = node.attribute("points").unwrap_or("");
            let coords = numbers(raw).map_err(&unsupported)?;
            if coords.len() % 2 != 0 {
                return Err(unsupported("odd number of coordinates in points".into()));
            }
            let vertices = coords.chunks(2).map(|c| MapPoint::new(c[0], c[1])).collect();
            Ok((chain(vertices, node.tag_name().name() == "polygon"), None))
        }
        "rect" => {
            let (x, y, w, h) = (attr("x")?, attr("y")?, attr("width")?, attr("height")?);
            let vertices = vec![
                MapPoint::new(x, y),
                MapPoint::new(x + w, y),
                MapPoint::new(x + w, y + h),
                MapPoint::new(x, y + h),
            ];
            Ok((chain(vertices, true), None))
        }
        "path" => {
            let (vertices, closed) = path_vertices(node.attribute("d").unwrap_or("")).map_err(&unsupported)?;
            Ok((chain(vertices, closed), None))
        }
        other => Err(unsupported(format!("<{other}> is not a supported geometry source"))),
    }
}

/// Builds a chain, dropping consecutive duplicates and a repeated closing vertex.
fn chain(mut vertices: Vec<MapPoint>, closed: bool) -> Geometry {
    vertices.dedup();
    if closed {
        while vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        Geometry::Polygon { vertices }
    } else {
        Geometry::Polyline { vertices }
    }
}

#[derive(Debug, PartialEq)]
enum PathToken {
    Command(char),
    Number(f64),
}

/// Absolute `M`/`L`/`Z` path data only. Coordinates after `M` continue as
/// implicit line-to pairs.
fn path_vertices(d: &str) -> Result<(Vec<MapPoint>, bool), String> {
    let tokens = path_tokens(d)?;
    let mut vertices = Vec::new();
    let mut closed = false;
    let mut command = None;
    let mut pending = Vec::with_capacity(2);
    for token in tokens {
        match token {
            PathToken::Command(c @ ('M' | 'L')) => {
                if closed {
                    return Err(format!("`{c}` after `Z`: only one subpath is supported"));
                }
                if c == 'M' && !vertices.is_empty() {
                    return Err("more than one subpath".into());
                }
                if !pending.is_empty() {
                    return Err(format!("dangling coordinate before `{c}`"));
                }
                command = Some(c);
            }
            PathToken::Command('Z' | 'z') => {
                if vertices.is_empty() || !pending.is_empty() {
                    return Err("`Z` without a complete subpath".into());
                }
                closed = true;
                command = None;
            }
            PathToken::Command(c) => return Err(format!("path command `{c}` is not supported")),
            PathToken::Number(v) => {
                if command.is_none() {
                    return Err("coordinate without a preceding M or L".into());
                }
                pending.push(v);
                if pending.len() == 2 {
                    vertices.push(MapPoint::new(pending[0], pending[1]));
                    pending.clear();
                }
            }
        }
    }
    if !pending.is_empty() {
        return Err("odd number of path coordinates".into());
    }
    if vertices.is_empty() {
        return Err("empty path".into());
    }
    Ok((vertices, closed))
}

fn path_tokens(d: &str) -> Result<Vec<PathToken>, String> {
    let mut tokens = Vec::new();
    let bytes = d.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() || c == ',' {
            i += 1;
        } else if c.is_ascii_alphabetic() && c != 'e' && c != 'E' {
            tokens.push(PathToken::Command(c));
            i += 1;
        } else {
            let (value, len) = scan_number(&d[i..])?;
            tokens.push(PathToken::Number(value));
            i += len;
        }
    }
    Ok(tokens)
}

/// Whitespace/comma separated number list, SVG style (`10-5` is two numbers).
fn numbers(raw: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    let mut rest = raw.trim_start_matches(|c: char| c.is_ascii_whitespace() || c == ',');
    while !rest.is_empty() {
        let (value, len) = scan_number(rest)?;
        out.push(value);
        rest = rest[len..].trim_start_matches(|c: char| c.is_ascii_whitespace() || c == ',');
    }
    Ok(out)
}

fn scan_number(s: &str) -> Result<(f64, usize), String> {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        let shown: String = s.chars().take(12).collect();
        return Err(format!("expected a number at `{shown}`"));
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let exp_start = j;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        if j > exp_start {
            i = j;
        }
    }
    let value: f64 = s[..i].parse().map_err(|_| format!("invalid number `{}`", &s[..i]))?;
    if !value.is_finite() {
        return Err(format!("non-finite number `{}`", &s[..i]));
    }
    Ok((value, i))
}
