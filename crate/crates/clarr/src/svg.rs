//! Best-effort SVG plots of arrangements. Everything here is float sampling
//! for illustration only; certification flows never touch this module. Real
//! branches of graph components are sampled directly, general conics are
//! traced by marching squares, and tangencies are marked where they are real
//! and annotated where they are not.

use crate::plane::{intersect_pair, Arrangement, CurveForm, EventSite, PlaneCurve};
use crate::polyring::{BivarPoly, Poly};
use crate::qtower::TowerElem;

#[derive(Debug, Clone, Copy)]
pub struct Window {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
}

impl Default for Window {
    fn default() -> Window {
        Window {
            t0: -6.0,
            t1: 6.0,
            x0: -6.0,
            x1: 6.0,
        }
    }
}

const PLOT: f64 = 640.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

struct Mapper {
    win: Window,
}

impl Mapper {
    fn sx(&self, t: f64) -> f64 {
        MARGIN + (t - self.win.t0) / (self.win.t1 - self.win.t0) * PLOT
    }
    fn sy(&self, x: f64) -> f64 {
        MARGIN + (self.win.x1 - x) / (self.win.x1 - self.win.x0) * PLOT
    }
}

fn poly_f64(q: &Poly) -> Option<Vec<f64>> {
    q.coeffs().iter().map(|c| c.to_f64()).collect()
}

fn eval_poly(cs: &[f64], t: f64) -> f64 {
    cs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

fn bivar_f64(c: &BivarPoly) -> Option<Vec<(u32, u32, f64)>> {
    c.terms()
        .map(|(&(a, b), v)| v.to_f64().map(|f| (a, b, f)))
        .collect()
}

fn eval_bivar(terms: &[(u32, u32, f64)], t: f64, x: f64) -> f64 {
    terms
        .iter()
        .map(|&(a, b, c)| c * t.powi(a as i32) * x.powi(b as i32))
        .sum()
}

fn path_from_points(m: &Mapper, pts: &[(f64, f64)]) -> String {
    let mut d = String::new();
    let mut pen_up = true;
    for &(t, x) in pts {
        if !t.is_finite() || !x.is_finite() {
            pen_up = true;
            continue;
        }
        // allow a margin of one window height before lifting the pen
        if x < m.win.x0 - (m.win.x1 - m.win.x0) || x > m.win.x1 + (m.win.x1 - m.win.x0) {
            pen_up = true;
            continue;
        }
        let cmd = if pen_up { 'M' } else { 'L' };
        d.push_str(&format!("{}{:.2} {:.2} ", cmd, m.sx(t), m.sy(x)));
        pen_up = false;
    }
    d.trim_end().to_string()
}

fn vertical_path(m: &Mapper, a: &TowerElem) -> Option<String> {
    let t = a.to_f64()?;
    if t < m.win.t0 || t > m.win.t1 {
        return Some(String::new());
    }
    Some(format!(
        "M {:.2} {:.2} L {:.2} {:.2}",
        m.sx(t),
        m.sy(m.win.x0),
        m.sx(t),
        m.sy(m.win.x1)
    ))
}

fn graph_path(m: &Mapper, q: &Poly) -> Option<String> {
    let cs = poly_f64(q)?;
    let n = 512;
    let pts: Vec<(f64, f64)> = (0..=n)
        .map(|k| {
            let t = m.win.t0 + (m.win.t1 - m.win.t0) * k as f64 / n as f64;
            (t, eval_poly(&cs, t))
        })
        .collect();
    Some(path_from_points(m, &pts))
}

/// Marching squares over the window grid: emits one line segment per cell
/// edge-crossing pair of the zero contour.
fn general_path(m: &Mapper, c: &BivarPoly) -> Option<String> {
    let terms = bivar_f64(c)?;
    let n = 256usize;
    let dt = (m.win.t1 - m.win.t0) / n as f64;
    let dx = (m.win.x1 - m.win.x0) / n as f64;
    let mut vals = vec![0.0f64; (n + 1) * (n + 1)];
    for i in 0..=n {
        for j in 0..=n {
            let t = m.win.t0 + dt * i as f64;
            let x = m.win.x0 + dx * j as f64;
            vals[i * (n + 1) + j] = eval_bivar(&terms, t, x);
        }
    }
    let mut d = String::new();
    let lerp = |a: f64, b: f64| if (b - a).abs() < 1e-300 { 0.5 } else { -a / (b - a) };
    for i in 0..n {
        for j in 0..n {
            let t = m.win.t0 + dt * i as f64;
            let x = m.win.x0 + dx * j as f64;
            let v00 = vals[i * (n + 1) + j];
            let v10 = vals[(i + 1) * (n + 1) + j];
            let v01 = vals[i * (n + 1) + j + 1];
            let v11 = vals[(i + 1) * (n + 1) + j + 1];
            let mut crossings: Vec<(f64, f64)> = Vec::new();
            if (v00 < 0.0) != (v10 < 0.0) {
                crossings.push((t + dt * lerp(v00, v10), x));
            }
            if (v01 < 0.0) != (v11 < 0.0) {
                crossings.push((t + dt * lerp(v01, v11), x + dx));
            }
            if (v00 < 0.0) != (v01 < 0.0) {
                crossings.push((t, x + dx * lerp(v00, v01)));
            }
            if (v10 < 0.0) != (v11 < 0.0) {
                crossings.push((t + dt, x + dx * lerp(v10, v11)));
            }
            if crossings.len() >= 2 {
                // conics cross a cell in at most one arc except near a
                // center; joining in pairs is fine at plot resolution
                for pair in crossings.chunks(2) {
                    if let [a, b] = pair {
                        d.push_str(&format!(
                            "M{:.2} {:.2} L{:.2} {:.2} ",
                            m.sx(a.0),
                            m.sy(a.1),
                            m.sx(b.0),
                            m.sy(b.1)
                        ));
                    }
                }
            }
        }
    }
    Some(d.trim_end().to_string())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Real tangency markers and non-real annotations from the exact pair events.
fn tangency_notes(
    arr: &Arrangement,
    m: &Mapper,
) -> (Vec<(f64, f64)>, Vec<String>) {
    let mut markers = Vec::new();
    let mut notes = Vec::new();
    let curves: Vec<&PlaneCurve> = arr.curves.iter().collect();
    for (i, c1) in curves.iter().enumerate() {
        for c2 in curves.iter().skip(i + 1) {
            let events = match intersect_pair(c1, c2, &arr.hints) {
                Ok(ev) => ev,
                Err(e) => {
                    notes.push(format!(
                        "{} and {}: intersection analysis failed ({})",
                        c1.label, c2.label, e
                    ));
                    continue;
                }
            };
            for ev in events {
                if ev.mult < 2 {
                    continue;
                }
                match &ev.site {
                    EventSite::Finite { t, x } => match (t.to_f64(), x.to_f64()) {
                        (Some(tf), Some(xf)) => {
                            if tf >= m.win.t0 && tf <= m.win.t1 && xf >= m.win.x0 && xf <= m.win.x1
                            {
                                markers.push((tf, xf));
                            }
                        }
                        _ => notes.push(format!(
                            "{} and {}: tangency at a non-real point",
                            c1.label, c2.label
                        )),
                    },
                    EventSite::FinitePair { locus, .. } => {
                        let real = locus_has_real_root(locus);
                        if real == Some(false) {
                            notes.push(format!(
                                "{} and {}: tangencies where {} = 0 (no real solutions)",
                                c1.label, c2.label, locus
                            ));
                        } else {
                            notes.push(format!(
                                "{} and {}: conjugate tangencies where {} = 0",
                                c1.label, c2.label, locus
                            ));
                        }
                    }
                    EventSite::VerticalInfinity => notes.push(format!(
                        "{} and {}: contact of order {} at vertical infinity",
                        c1.label, c2.label, ev.mult
                    )),
                    EventSite::SlopeInfinity { .. } => notes.push(format!(
                        "{} and {}: contact at infinity",
                        c1.label, c2.label
                    )),
                }
            }
        }
    }
    (markers, notes)
}

fn locus_has_real_root(locus: &Poly) -> Option<bool> {
    if locus.deg_or_zero() == 2 {
        let a = locus.coeff(2).to_f64()?;
        let b = locus.coeff(1).to_f64()?;
        let c = locus.coeff(0).to_f64()?;
        return Some(b * b - 4.0 * a * c >= 0.0);
    }
    None
}

/// Render an arrangement to a standalone SVG document.
pub fn render(arr: &Arrangement, win: &Window) -> String {
    let m = Mapper { win: *win };
    let mut body = String::new();
    let mut legend: Vec<(String, &str)> = Vec::new();
    let mut notes: Vec<String> = Vec::new();

    for (k, curve) in arr.curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let path = match &curve.form {
            CurveForm::Graph { q } => graph_path(&m, q),
            CurveForm::Vertical { a } => vertical_path(&m, a),
            CurveForm::General { c } => general_path(&m, c),
        };
        match path {
            Some(d) if !d.is_empty() => {
                body.push_str(&format!(
                    "  <path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                    d, color
                ));
            }
            Some(_) => notes.push(format!("{}: no real trace on this window", curve.label)),
            None => notes.push(format!("{}: component has non-real coefficients", curve.label)),
        }
        legend.push((curve.label.clone(), color));
    }

    let (markers, tnotes) = tangency_notes(arr, &m);
    notes.extend(tnotes);
    for (t, x) in markers {
        body.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"none\" stroke=\"#000\" stroke-width=\"1\"/>\n",
            m.sx(t),
            m.sy(x)
        ));
    }

    let note_h = 18.0 * (notes.len() as f64 + 1.0);
    let height = PLOT + 2.0 * MARGIN + 24.0 + note_h;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = PLOT + 2.0 * MARGIN,
        h = height
    ));
    out.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "  <rect x=\"{m}\" y=\"{m}\" width=\"{p}\" height=\"{p}\" fill=\"none\" stroke=\"#ccc\"/>\n",
        m = MARGIN,
        p = PLOT
    ));
    // axes through the origin when visible
    if win.t0 < 0.0 && win.t1 > 0.0 {
        let x0 = m.sx(0.0);
        out.push_str(&format!(
            "  <line x1=\"{x0:.2}\" y1=\"{m}\" x2=\"{x0:.2}\" y2=\"{b}\" stroke=\"#eee\"/>\n",
            m = MARGIN,
            b = MARGIN + PLOT
        ));
    }
    if win.x0 < 0.0 && win.x1 > 0.0 {
        let y0 = m.sy(0.0);
        out.push_str(&format!(
            "  <line x1=\"{m}\" y1=\"{y0:.2}\" x2=\"{r}\" y2=\"{y0:.2}\" stroke=\"#eee\"/>\n",
            m = MARGIN,
            r = MARGIN + PLOT
        ));
    }
    out.push_str(&body);
    let mut ty = MARGIN + PLOT + 20.0;
    let mut tx = MARGIN;
    for (label, color) in legend {
        out.push_str(&format!(
            "  <text x=\"{:.0}\" y=\"{:.0}\" font-family=\"monospace\" font-size=\"13\" fill=\"{}\">{}</text>\n",
            tx,
            ty,
            color,
            xml_escape(&label)
        ));
        tx += 12.0 * (label.len() as f64 + 2.0);
        if tx > MARGIN + PLOT - 60.0 {
            tx = MARGIN;
            ty += 18.0;
        }
    }
    ty += 22.0;
    for note in notes {
        out.push_str(&format!(
            "  <text x=\"{:.0}\" y=\"{:.0}\" font-family=\"monospace\" font-size=\"12\" fill=\"#555\">note: {}</text>\n",
            MARGIN,
            ty,
            xml_escape(&note)
        ));
        ty += 18.0;
    }
    out.push_str("</svg>\n");
    out
}
