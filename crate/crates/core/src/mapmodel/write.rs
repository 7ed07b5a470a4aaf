use std::fmt::Write;

use super::{Geometry, MapDocument, MapPoint};

impl MapDocument {
    /// Canonical line-per-element text listing. Two documents with the same
    /// listing are structurally identical.
    pub fn to_listing(&self) -> String {
        let mut out = String::new();
        let b = self.bounds();
        writeln!(out, "map {:?}", self.source_name()).unwrap();
        writeln!(out, "bounds {} {} {} {}", b.min_x, b.min_y, b.max_x, b.max_y).unwrap();
        for el in self.elements() {
            write!(out, "{} {} {:?} {}", el.id, el.kind, el.name, el.geometry.type_name()).unwrap();
            for p in el.geometry.vertices() {
                write!(out, " {},{}", p.x, p.y).unwrap();
            }
            if let Some(r) = el.symbol_radius {
                write!(out, " r={r}").unwrap();
            }
            if let Some(desc) = &el.description {
                write!(out, " desc={desc:?}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Serialise back to the supported SVG subset. Parsing the output yields a
    /// document with the same listing.
    pub fn to_svg(&self) -> String {
        let b = self.bounds();
        let mut out = String::new();
        writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}">"#,
            b.min_x,
            b.min_y,
            b.width(),
            b.height()
        )
        .unwrap();
        writeln!(out, "  <title>{}</title>", escape(self.source_name())).unwrap();
        for el in self.elements() {
            let (tag, attrs) = match &el.geometry {
                Geometry::Point { x, y } => {
                    ("circle", format!(r#"cx="{x}" cy="{y}" r="{}""#, el.symbol_radius.unwrap_or(1.0)))
                }
                Geometry::Polyline { vertices } => ("polyline", format!(r#"points="{}""#, points(vertices))),
                Geometry::Polygon { vertices } => ("polygon", format!(r#"points="{}""#, points(vertices))),
            };
            write!(out, r#"  <{tag} id="{}" class="{}" {attrs}>"#, escape(&el.id), el.kind).unwrap();
            if !el.name.is_empty() || el.kind.is_named() {
                write!(out, "<title>{}</title>", escape(&el.name)).unwrap();
            }
            if let Some(desc) = &el.description {
                write!(out, "<desc>{}</desc>", escape(desc)).unwrap();
            }
            writeln!(out, "</{tag}>").unwrap();
        }
        out.push_str("</svg>\n");
        out
    }
}

fn points(vertices: &[MapPoint]) -> String {
    vertices.iter().map(|p| format!("{},{}", p.x, p.y)).collect::<Vec<_>>().join(" ")
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}
