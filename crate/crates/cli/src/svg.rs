//! Minimal static SVG bar chart.

use std::fmt::Write;

use eventflux::analysis::HistBin;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 40.0;

pub fn bar_chart(bins: &[HistBin], title: &str) -> String {
    let max = bins.iter().map(|b| b.count).max().unwrap_or(0).max(1) as f64;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let bar_w = plot_w / bins.len().max(1) as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    for (i, b) in bins.iter().enumerate() {
        let h = plot_h * b.count as f64 / max;
        let x = MARGIN + i as f64 * bar_w;
        let y = HEIGHT - MARGIN - h;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{h:.2}" fill="steelblue"><title>[{}, {}): {}</title></rect>"#,
            bar_w.max(0.5) - 0.5,
            b.lo,
            b.hi,
            b.count
        );
    }
    let base = HEIGHT - MARGIN;
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#,
        WIDTH - MARGIN
    );
    if let (Some(first), Some(last)) = (bins.first(), bins.last()) {
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN}" y="{}" font-size="12">{}</text>"#,
            base + 16.0,
            first.lo
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{}</text>"#,
            WIDTH - MARGIN,
            base + 16.0,
            last.hi
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
