//! Static figure emitters: the vitality/digitality scatter (SVG) and the
//! point map (GeoJSON).

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::model::{GeoPoint, LanguageId, Quadrant};

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("no coordinates for {} language(s): {}", .0.len(), join_ids(.0))]
    MissingCoordinates(Vec<LanguageId>),
}

fn join_ids(ids: &[LanguageId]) -> String {
    ids.iter()
        .map(|i| i.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Everything the emitters need about one language.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub id: LanguageId,
    pub name: String,
    pub vitality_norm: f64,
    pub digitality_norm: f64,
    pub representation: f64,
    pub category: Quadrant,
    pub location: Option<GeoPoint>,
}

/// Diverging fill for a representation score: -1 is pure red, 0 white, +1
/// pure blue, linear in between. Inputs outside `[-1, 1]` are clamped.
pub fn diverging_color(t: f64) -> String {
    let t = if t.is_nan() { 0.0 } else { t.clamp(-1.0, 1.0) };
    let (r, g, b) = if t < 0.0 {
        (255.0, 255.0 * (1.0 + t), 255.0 * (1.0 + t))
    } else {
        (255.0 * (1.0 - t), 255.0 * (1.0 - t), 255.0)
    };
    format!(
        "#{:02X}{:02X}{:02X}",
        r.round() as u8,
        g.round() as u8,
        b.round() as u8
    )
}

pub const SVG_SIZE: f64 = 800.0;
const MARGIN: f64 = 70.0;

fn to_px(v: f64) -> f64 {
    MARGIN + v.clamp(0.0, 1.0) * (SVG_SIZE - 2.0 * MARGIN)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Scatter of `x = vitality_norm`, `y = digitality_norm` with dashed
/// reference lines at the classification medians.
pub fn scatter_svg(rows: &[ReportRow], vitality_median: f64, digitality_median: f64) -> String {
    let size = SVG_SIZE;
    let (lo, hi) = (to_px(0.0), to_px(1.0));
    // SVG y grows downward
    let flip = |v: f64| size - to_px(v);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(
        s,
        r#"<metadata>reference lines: vitality median {vitality_median:.6}, digitality median {digitality_median:.6} (classification thresholds)</metadata>"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="{size}" height="{size}" fill="#FFFFFF"/>"##
    );
    let _ = writeln!(
        s,
        r##"<rect x="{lo}" y="{lo}" width="{w}" height="{w}" fill="none" stroke="#333333"/>"##,
        w = hi - lo
    );
    let (mx, my) = (to_px(vitality_median), flip(digitality_median));
    let _ = writeln!(
        s,
        r##"<line class="median" x1="{mx:.2}" y1="{lo}" x2="{mx:.2}" y2="{hi}" stroke="#555555" stroke-dasharray="6 4"/>"##
    );
    let _ = writeln!(
        s,
        r##"<line class="median" x1="{lo}" y1="{my:.2}" x2="{hi}" y2="{my:.2}" stroke="#555555" stroke-dasharray="6 4"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" text-anchor="middle" font-family="sans-serif" font-size="16">Vitality (normalized)</text>"#,
        x = size / 2.0,
        y = size - 25.0
    );
    let _ = writeln!(
        s,
        r#"<text x="25" y="{y}" text-anchor="middle" font-family="sans-serif" font-size="16" transform="rotate(-90 25 {y})">Digitality (normalized)</text>"#,
        y = size / 2.0
    );
    for r in rows {
        let _ = writeln!(
            s,
            r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="5" fill="{fill}" stroke="#444444" stroke-width="0.5" data-iso="{iso}" data-category="{cat}"><title>{name} ({iso}) {rep:+.3}</title></circle>"##,
            cx = to_px(r.vitality_norm),
            cy = flip(r.digitality_norm),
            fill = diverging_color(r.representation),
            iso = r.id,
            cat = r.category.as_str(),
            name = escape(&r.name),
            rep = r.representation,
        );
    }
    s.push_str("</svg>\n");
    s
}

/// GeoJSON FeatureCollection of language points. Errors if any language lacks
/// coordinates, listing all of them.
pub fn geojson(rows: &[ReportRow]) -> Result<String, ReportError> {
    let missing: Vec<LanguageId> = rows
        .iter()
        .filter(|r| r.location.is_none())
        .map(|r| r.id)
        .collect();
    if !missing.is_empty() {
        return Err(ReportError::MissingCoordinates(missing));
    }
    let features: Vec<_> = rows
        .iter()
        .map(|r| {
            let p = r.location.expect("checked above");
            json!({
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [p.longitude, p.latitude]},
                "properties": {
                    "iso639_3": r.id.as_str(),
                    "name": r.name,
                    "category": r.category.as_str(),
                    "representation": r.representation,
                },
            })
        })
        .collect();
    let fc = json!({"type": "FeatureCollection", "features": features});
    Ok(serde_json::to_string_pretty(&fc).expect("geojson serializes") + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(code: &str, rep: f64, loc: Option<(f64, f64)>) -> ReportRow {
        ReportRow {
            id: LanguageId::new(code).unwrap(),
            name: format!("Lang <{code}>"),
            vitality_norm: 0.5,
            digitality_norm: 0.5 + rep / 2.0,
            representation: rep,
            category: Quadrant::FadingVoice,
            location: loc.map(|(latitude, longitude)| GeoPoint {
                latitude,
                longitude,
            }),
        }
    }

    #[test]
    fn color_scale() {
        assert_eq!(diverging_color(0.0), "#FFFFFF");
        assert_eq!(diverging_color(-1.0), "#FF0000");
        assert_eq!(diverging_color(1.0), "#0000FF");
        assert_eq!(diverging_color(-0.5), "#FF8080");
        assert_eq!(diverging_color(0.5), "#8080FF");
        assert_eq!(diverging_color(-7.0), "#FF0000");
    }

    #[test]
    fn scatter_has_one_circle_per_row() {
        let rows = [row("aaa", -0.2, None), row("bbb", 0.4, None)];
        let svg = scatter_svg(&rows, 0.4, 0.6);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg.matches("data-iso=\"aaa\"").count(), 1);
        assert_eq!(svg.matches("class=\"median\"").count(), 2);
        assert!(svg.contains("Lang &lt;aaa&gt;"));
        assert!(svg.contains(r#"width="800""#));
    }

    #[test]
    fn geojson_points() {
        let rows = [row("aaa", -1.0, Some((-7.5, 110.0)))];
        let v: serde_json::Value = serde_json::from_str(&geojson(&rows).unwrap()).unwrap();
        assert_eq!(v["type"], "FeatureCollection");
        let f = &v["features"][0];
        assert_eq!(f["geometry"]["coordinates"][0], 110.0);
        assert_eq!(f["geometry"]["coordinates"][1], -7.5);
        assert_eq!(f["properties"]["iso639_3"], "aaa");
        assert_eq!(f["properties"]["category"], "fading_voice");
        let err = geojson(&[row("aaa", 0.0, None), row("bbb", 0.0, Some((0.0, 0.0)))]).unwrap_err();
        assert_eq!(
            err,
            ReportError::MissingCoordinates(vec![LanguageId::new("aaa").unwrap()])
        );
    }
}
