use std::fmt::Write as _;

use super::guard::GuardColoring;
use super::peel::OnionPeeling;
use super::Terrain;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// A standalone SVG drawing of the terrain in grey with each convex layer
/// overlaid in its own color. Guards are dots labeled with their color index.
/// World coordinates map to a canvas about 800 pixels wide, y pointing up.
pub fn to_svg(t: &Terrain, peel: &OnionPeeling, guards: Option<&GuardColoring>) -> String {
    let (min_x, max_x) = (t.vertex(0).0, t.vertex(t.len() - 1).0);
    let min_y = t.vertices().iter().map(|v| v.1).min().unwrap_or(0);
    let max_y = t.vertices().iter().map(|v| v.1).max().unwrap_or(0);
    let span = ((max_x - min_x).max(max_y - min_y)).max(1) as f64;
    let scale = 800.0 / span;
    let margin = 30.0;
    let width = (max_x - min_x) as f64 * scale + 2.0 * margin;
    let height = (max_y - min_y) as f64 * scale + 2.0 * margin;
    let px = |v: (i64, i64)| {
        (
            margin + (v.0 - min_x) as f64 * scale,
            margin + (max_y - v.1) as f64 * scale,
        )
    };
    let points = |idx: &mut dyn Iterator<Item = usize>| {
        idx.map(|i| {
            let (x, y) = px(t.vertex(i));
            format!("{x:.2},{y:.2}")
        })
        .collect::<Vec<_>>()
        .join(" ")
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#999999" stroke-width="2"/>"##,
        points(&mut (0..t.len()))
    );
    for (d, layer) in peel.layers.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<polyline class="layer" data-layer="{}" points="{}" fill="none" stroke="{}" stroke-width="1.5" stroke-dasharray="6 3"/>"#,
            d + 1,
            points(&mut layer.iter().copied()),
            PALETTE[d % PALETTE.len()]
        );
    }
    for i in 0..t.len() {
        let (x, y) = px(t.vertex(i));
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="black"/>"#);
    }
    if let Some(gc) = guards {
        for (i, c) in gc.guards() {
            let (x, y) = px(t.vertex(i));
            let _ = writeln!(
                out,
                r#"<circle class="guard" cx="{x:.2}" cy="{y:.2}" r="7" fill="{}"/>"#,
                PALETTE[(c - 1) % PALETTE.len()]
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle">{c}</text>"#,
                x,
                y - 11.0
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::{onion_peeling, strong_guard};

    #[test]
    fn draws_layers_and_guards() {
        let land = Terrain::reference();
        let peel = onion_peeling(&land);
        let gc = strong_guard(&land).coloring;
        let svg = to_svg(&land, &peel, Some(&gc));
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches(r#"class="layer""#).count(), peel.p());
        assert_eq!(svg.matches(r#"class="guard""#).count(), gc.guards().count());
    }

    #[test]
    fn single_vertex_does_not_divide_by_zero() {
        let t = Terrain::new(vec![(5, 5)]).unwrap();
        let svg = to_svg(&t, &onion_peeling(&t), None);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
