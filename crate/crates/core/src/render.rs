//! SVG drawing of a grid link.
//!
//! Row 1 is at the bottom. Vertical edges pass over horizontal ones, so every
//! horizontal strand is broken where a vertical edge crosses it.

use std::fmt::Write as _;

use crate::grid::{Component, Edge, GridLink};
use crate::linking::linking_number;

pub const CELL: u32 = 40;
const MARGIN: u32 = 40;
const GAP: f64 = 7.0;
const ARROW: f64 = 7.0;

/// Place where a horizontal strand is interrupted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gap {
    pub at: (u32, u32),
    pub under: Component,
    pub over: Component,
}

impl Gap {
    pub fn is_inter_component(&self) -> bool {
        self.under != self.over
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub svg: String,
    /// Lattice vertices of each component, in traversal order.
    pub vertices: [Vec<(u32, u32)>; 2],
    pub gaps: Vec<Gap>,
    pub lk: i64,
}

impl Rendered {
    pub fn inter_component_gaps(&self) -> usize {
        self.gaps.iter().filter(|g| g.is_inter_component()).count()
    }
}

struct Frame {
    size: u32,
}

impl Frame {
    fn px(&self, col: u32) -> f64 {
        (MARGIN + (col - 1) * CELL) as f64 + CELL as f64 / 2.0
    }

    fn py(&self, row: u32) -> f64 {
        (MARGIN + (self.size - row) * CELL) as f64 + CELL as f64 / 2.0
    }
}

fn style(which: Component) -> &'static str {
    match which {
        Component::First => r##"stroke="#1f4e9c" stroke-width="3""##,
        Component::Second => r##"stroke="#c0392b" stroke-width="3" stroke-dasharray="8 4""##,
    }
}

fn fill(which: Component) -> &'static str {
    match which {
        Component::First => "#1f4e9c",
        Component::Second => "#c0392b",
    }
}

fn span(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

pub fn render_svg(link: &GridLink) -> Rendered {
    let size = link.grid_size() as u32;
    let frame = Frame { size };
    let comps = [Component::First, Component::Second];
    let paths = comps.map(|c| link.component_path(c));
    let edges: Vec<(Component, Edge)> = comps
        .iter()
        .zip(&paths)
        .flat_map(|(&c, p)| p.edges().map(move |e| (c, e)))
        .collect();

    let mut gaps = Vec::new();
    let side = MARGIN * 2 + size * CELL;
    let height = side + 30;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{height}" viewBox="0 0 {side} {height}">"#
    )
    .unwrap();
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    svg.push_str("<g class=\"grid\" stroke=\"#d0d0d0\" stroke-width=\"1\">\n");
    for i in 0..=size {
        let t = MARGIN + i * CELL;
        let (lo, hi) = (MARGIN, MARGIN + size * CELL);
        writeln!(svg, r#"<line x1="{t}" y1="{lo}" x2="{t}" y2="{hi}"/>"#).unwrap();
        writeln!(svg, r#"<line x1="{lo}" y1="{t}" x2="{hi}" y2="{t}"/>"#).unwrap();
    }
    svg.push_str("</g>\n");

    svg.push_str(
        "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">\n",
    );
    for i in 1..=size {
        let bottom = MARGIN + size * CELL + 16;
        writeln!(svg, r#"<text x="{}" y="{bottom}">{i}</text>"#, frame.px(i)).unwrap();
        writeln!(
            svg,
            r#"<text x="{}" y="{}">{i}</text>"#,
            MARGIN - 14,
            frame.py(i) + 4.0
        )
        .unwrap();
    }
    svg.push_str("</g>\n");

    // Horizontal strands first, broken under every vertical edge.
    for (ci, &(which, e)) in edges
        .iter()
        .enumerate()
        .filter(|(_, (_, e))| !e.is_vertical())
    {
        let row = e.from.1;
        let (c_lo, c_hi) = span(e.from.0, e.to.0);
        let mut cuts: Vec<(u32, Component)> = edges
            .iter()
            .enumerate()
            .filter(|&(vi, (_, v))| vi != ci && v.is_vertical())
            .filter_map(|(_, &(over, v))| {
                let (r_lo, r_hi) = span(v.from.1, v.to.1);
                let col = v.from.0;
                (c_lo < col && col < c_hi && r_lo < row && row < r_hi).then_some((col, over))
            })
            .collect();
        cuts.sort_by_key(|c| c.0);
        let mut start = frame.px(c_lo);
        writeln!(svg, r#"<g class="c{}-h" {}>"#, which.number(), style(which)).unwrap();
        for &(col, over) in &cuts {
            gaps.push(Gap {
                at: (col, row),
                under: which,
                over,
            });
            let stop = frame.px(col) - GAP;
            line(&mut svg, start, frame.py(row), stop, frame.py(row));
            start = frame.px(col) + GAP;
        }
        line(
            &mut svg,
            start,
            frame.py(row),
            frame.px(c_hi),
            frame.py(row),
        );
        svg.push_str("</g>\n");
    }

    for (which, e) in edges.iter().filter(|(_, e)| e.is_vertical()) {
        let x = frame.px(e.from.0);
        let (y0, y1) = (frame.py(e.from.1), frame.py(e.to.1));
        writeln!(
            svg,
            r#"<g class="c{}-v" {}>"#,
            which.number(),
            style(*which)
        )
        .unwrap();
        line(&mut svg, x, y0, x, y1);
        svg.push_str("</g>\n");
        // Arrowhead at the midpoint, pointing along the traversal.
        let dir = if y1 < y0 { -1.0 } else { 1.0 };
        let my = (y0 + y1) / 2.0;
        writeln!(
            svg,
            r#"<polygon class="arrow" fill="{}" points="{},{} {},{} {},{}"/>"#,
            fill(*which),
            x - ARROW,
            my - dir * ARROW,
            x + ARROW,
            my - dir * ARROW,
            x,
            my + dir * ARROW
        )
        .unwrap();
    }

    let lk = linking_number(link);
    writeln!(
        svg,
        r#"<text class="caption" x="{}" y="{}" font-family="sans-serif" font-size="16" text-anchor="middle">lk = {lk}</text>"#,
        side / 2,
        height - 8
    )
    .unwrap();
    svg.push_str("</svg>\n");

    Rendered {
        svg,
        vertices: paths.map(|p| p.vertices),
        gaps,
        lk,
    }
}

fn line(svg: &mut String, x1: f64, y1: f64, x2: f64, y2: f64) {
    writeln!(svg, r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#).unwrap();
}
