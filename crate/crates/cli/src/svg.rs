//! Static SVG line charts, one panel per series.

const WIDTH: f64 = 640.0;
const PANEL: f64 = 220.0;
const MARGIN: f64 = 48.0;

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

fn fmt(v: f64) -> String {
    if v.abs() >= 1e5 || (v != 0.0 && v.abs() < 1e-3) {
        format!("{v:.3e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn panel(out: &mut String, top: f64, s: &Series) {
    let pts: Vec<(f64, f64)> = s
        .points
        .iter()
        .copied()
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .collect();
    let x_max = pts.iter().map(|p| p.0).fold(1.0, f64::max);
    let y_max = pts.iter().map(|p| p.1).fold(0.0, f64::max).max(1.0);
    let (x0, y0) = (MARGIN, top + PANEL - MARGIN / 2.0);
    let (w, h) = (WIDTH - 1.5 * MARGIN, PANEL - MARGIN);
    out.push_str(&format!(
        "<text x=\"{x0}\" y=\"{}\" font-size=\"13\">{}</text>\n",
        top + 16.0,
        s.label
    ));
    out.push_str(&format!(
        "<path d=\"M{x0} {} V{y0} H{}\" stroke=\"black\" fill=\"none\"/>\n",
        y0 - h,
        x0 + w
    ));
    for (v, y) in [(0.0, y0), (y_max, y0 - h)] {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
            x0 - 4.0,
            y + 3.0,
            fmt(v)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">n = {}</text>\n",
        x0 + w,
        y0 + 14.0,
        fmt(x_max)
    ));
    if pts.is_empty() {
        return;
    }
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", x0 + w * x / x_max, y0 - h * y / y_max))
        .collect();
    out.push_str(&format!(
        "<polyline points=\"{}\" stroke=\"steelblue\" stroke-width=\"1.5\" fill=\"none\"/>\n",
        coords.join(" ")
    ));
}

/// One stacked panel per series, each scaled to its own maximum.
pub fn line_chart(series: &[Series]) -> String {
    let height = PANEL * series.len().max(1) as f64;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" \
         viewBox=\"0 0 {WIDTH} {height}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for (i, s) in series.iter().enumerate() {
        panel(&mut out, PANEL * i as f64, s);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_polyline_per_nonempty_series() {
        let svg = line_chart(&[
            Series {
                label: "d_n",
                points: vec![(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)],
            },
            Series {
                label: "h_n",
                points: Vec::new(),
            },
        ]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("height=\"440\""));
    }

    #[test]
    fn non_finite_points_are_dropped() {
        let svg = line_chart(&[Series {
            label: "h_n",
            points: vec![(0.0, f64::NAN), (1.0, 2.0)],
        }]);
        assert!(!svg.contains("NaN"));
    }
}
