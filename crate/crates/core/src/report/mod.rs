//! Static charts (SVG) with CSV twins for analysis bundles: supply vs demand
//! time series, cumulative totals, delta strips with thresholds, and delta
//! against log engagement.

pub mod svg;

use crate::fmt::fixed6;
use crate::pipeline::bundle::Bundle;
use crate::series::{add_weeks, Source};
use svg::{Anchor, Svg};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

const SUPPLY_COLOR: &str = "#1f77b4";
const DEMAND_COLOR: &str = "#d62728";
const AXIS_COLOR: &str = "#333333";
const GRID_COLOR: &str = "#dddddd";

/// A rendered chart and its tabular twin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub svg: String,
    pub csv: String,
}

#[derive(Debug, Clone, Copy)]
struct Scale {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        if self.d1 == self.d0 {
            return (self.r0 + self.r1) / 2.0;
        }
        self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
    }
}

fn plot_area() -> (f64, f64, f64, f64) {
    (LEFT, TOP, WIDTH - RIGHT, HEIGHT - BOTTOM)
}

fn source_label(s: Source) -> &'static str {
    match s {
        Source::Facebook => "Facebook",
        Source::Instagram => "Instagram",
        Source::Gdelt => "GDELT news",
        Source::Trends => "Search interest",
    }
}

fn frame(svg: &mut Svg, title: &str, y_label: &str, y: &Scale, y_ticks: &[f64]) {
    let (x0, _, x1, _) = plot_area();
    svg.text(WIDTH / 2.0, 28.0, 16.0, Anchor::Middle, title);
    for &t in y_ticks {
        let py = y.map(t);
        svg.line(x0, py, x1, py, GRID_COLOR, 1.0, None);
        svg.text(x0 - 8.0, py + 4.0, 11.0, Anchor::End, &format!("{t}"));
    }
    svg.line(x0, y.r0, x0, y.r1, AXIS_COLOR, 1.0, None);
    svg.vtext(18.0, (y.r0 + y.r1) / 2.0, 12.0, y_label);
}

fn week_axis(svg: &mut Svg, bundle: &Bundle, x: &Scale, baseline: f64) {
    let (x0, _, x1, _) = plot_area();
    svg.line(x0, baseline, x1, baseline, AXIS_COLOR, 1.0, None);
    let n = bundle.weeks;
    let step = (n / 8).max(1);
    for i in (0..n).step_by(step) {
        let px = x.map(i as f64);
        let (_, _, _, bottom) = plot_area();
        svg.line(px, bottom, px, bottom + 5.0, AXIS_COLOR, 1.0, None);
        svg.text(
            px,
            bottom + 20.0,
            10.0,
            Anchor::Middle,
            &add_weeks(bundle.first_week, i).to_string(),
        );
    }
}

fn legend(svg: &mut Svg, items: &[(&str, &str)]) {
    let mut lx = LEFT + 10.0;
    for (color, label) in items {
        svg.rect(lx, TOP - 14.0, 12.0, 4.0, color);
        svg.text(lx + 16.0, TOP - 9.0, 11.0, Anchor::Start, label);
        lx += 20.0 + 7.0 * label.chars().count() as f64;
    }
}

fn week_scale(n: usize) -> Scale {
    let (x0, _, x1, _) = plot_area();
    Scale {
        d0: 0.0,
        d1: (n.max(2) - 1) as f64,
        r0: x0,
        r1: x1,
    }
}

/// Normalized supply and demand per week.
pub fn timeseries_chart(b: &Bundle) -> Chart {
    let (_, top, _, bottom) = plot_area();
    let x = week_scale(b.weeks);
    let y = Scale {
        d0: 0.0,
        d1: 100.0,
        r0: bottom,
        r1: top,
    };
    let mut svg = Svg::new(WIDTH, HEIGHT);
    frame(
        &mut svg,
        &format!(
            "{} - supply ({}) vs demand",
            b.subtopic_id,
            source_label(b.supply_source)
        ),
        "normalized volume (0–100)",
        &y,
        &[0.0, 25.0, 50.0, 75.0, 100.0],
    );
    week_axis(&mut svg, b, &x, bottom);
    let pts = |vals: &[u8]| -> Vec<(f64, f64)> {
        vals.iter()
            .enumerate()
            .map(|(i, &v)| (x.map(i as f64), y.map(v as f64)))
            .collect()
    };
    svg.polyline(&pts(&b.supply.normalized), SUPPLY_COLOR, 1.5);
    svg.polyline(&pts(&b.demand.normalized), DEMAND_COLOR, 1.5);
    legend(
        &mut svg,
        &[
            (SUPPLY_COLOR, source_label(b.supply_source)),
            (DEMAND_COLOR, "Search interest"),
        ],
    );

    let mut csv = String::from("week_start,supply,demand\n");
    for i in 0..b.weeks {
        csv.push_str(&format!(
            "{},{},{}\n",
            add_weeks(b.first_week, i),
            b.supply.normalized[i],
            b.demand.normalized[i]
        ));
    }
    Chart {
        svg: svg.finish(),
        csv,
    }
}

/// Weekly delta bars with the two exceedance thresholds.
pub fn delta_chart(b: &Bundle) -> Chart {
    let (x0, top, x1, bottom) = plot_area();
    let y = Scale {
        d0: -100.0,
        d1: 100.0,
        r0: bottom,
        r1: top,
    };
    let n = b.weeks.max(1);
    let bar = (x1 - x0) / n as f64;
    let mut svg = Svg::new(WIDTH, HEIGHT);
    frame(
        &mut svg,
        &format!(
            "{} - weekly supply-demand delta ({})",
            b.subtopic_id,
            source_label(b.supply_source)
        ),
        "delta",
        &y,
        &[-100.0, -50.0, 0.0, 50.0, 100.0],
    );
    let x = Scale {
        d0: 0.0,
        d1: n as f64,
        r0: x0,
        r1: x1,
    };
    let zero = y.map(0.0);
    let (upper, lower) = (b.thresholds.upper.0, b.thresholds.lower.0);
    for (i, &d) in b.delta.iter().enumerate() {
        let v = d as f64;
        let color = if v > upper {
            "#2ca02c"
        } else if v < lower {
            "#9467bd"
        } else {
            "#aaaaaa"
        };
        let py = y.map(v);
        svg.rect(
            x.map(i as f64) + 0.5,
            py.min(zero),
            (bar - 1.0).max(0.5),
            (py - zero).abs(),
            color,
        );
    }
    svg.line(x0, zero, x1, zero, AXIS_COLOR, 1.0, None);
    svg.line(
        x0,
        y.map(upper),
        x1,
        y.map(upper),
        SUPPLY_COLOR,
        1.0,
        Some("6 4"),
    );
    svg.line(
        x0,
        y.map(lower),
        x1,
        y.map(lower),
        DEMAND_COLOR,
        1.0,
        Some("6 4"),
    );
    svg.text(
        x1,
        y.map(upper) - 4.0,
        10.0,
        Anchor::End,
        &format!("mean supply {}", fixed6(upper)),
    );
    svg.text(
        x1,
        y.map(lower) + 12.0,
        10.0,
        Anchor::End,
        &format!("-mean demand {}", fixed6(lower)),
    );
    let step = (n / 8).max(1);
    for i in (0..n).step_by(step) {
        let px = x.map(i as f64 + 0.5);
        svg.text(
            px,
            bottom + 20.0,
            10.0,
            Anchor::Middle,
            &add_weeks(b.first_week, i).to_string(),
        );
    }
    legend(
        &mut svg,
        &[("#2ca02c", "overabundance"), ("#9467bd", "void")],
    );

    let mut csv = String::from("week_start,delta,threshold_upper,threshold_lower,state\n");
    for (i, &d) in b.delta.iter().enumerate() {
        let v = d as f64;
        let state = if v > upper {
            "overabundance"
        } else if v < lower {
            "void"
        } else {
            "neutral"
        };
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            add_weeks(b.first_week, i),
            d,
            fixed6(upper),
            fixed6(lower),
            state
        ));
    }
    Chart {
        svg: svg.finish(),
        csv,
    }
}

/// Delta against `log10(1 + engagement)`; `None` when the bundle has no
/// engagement data or its correlation is undefined.
pub fn engagement_chart(b: &Bundle) -> Option<Chart> {
    let eng = b.engagement.as_ref()?;
    let r = b.engagement_r?;
    let (x0, top, x1, bottom) = plot_area();
    let max_log = eng
        .log_engagement
        .iter()
        .map(|v| v.0)
        .fold(0.0f64, f64::max)
        .ceil()
        .max(1.0);
    let x = Scale {
        d0: -100.0,
        d1: 100.0,
        r0: x0,
        r1: x1,
    };
    let y = Scale {
        d0: 0.0,
        d1: max_log,
        r0: bottom,
        r1: top,
    };
    let ticks: Vec<f64> = (0..=max_log as i64).map(|t| t as f64).collect();
    let mut svg = Svg::new(WIDTH, HEIGHT);
    frame(
        &mut svg,
        &format!(
            "{} - delta vs log engagement ({}), r = {}",
            b.subtopic_id,
            source_label(b.supply_source),
            fixed6(r.0)
        ),
        "log10(1 + weekly engagement)",
        &y,
        &ticks,
    );
    svg.line(x0, bottom, x1, bottom, AXIS_COLOR, 1.0, None);
    for t in [-100.0, -50.0, 0.0, 50.0, 100.0] {
        svg.text(
            x.map(t),
            bottom + 20.0,
            10.0,
            Anchor::Middle,
            &format!("{t}"),
        );
    }
    svg.text(WIDTH / 2.0, HEIGHT - 15.0, 12.0, Anchor::Middle, "delta");
    for (d, e) in b.delta.iter().zip(&eng.log_engagement) {
        svg.circle(x.map(*d as f64), y.map(e.0), 3.0, SUPPLY_COLOR);
    }

    let mut csv = String::from("week_start,delta,log_engagement,post_count\n");
    for (i, (d, e)) in b.delta.iter().zip(&eng.log_engagement).enumerate() {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            add_weeks(b.first_week, i),
            d,
            fixed6(e.0),
            eng.post_count[i]
        ));
    }
    Some(Chart {
        svg: svg.finish(),
        csv,
    })
}

/// Cumulative normalized supply and demand per subtopic for one source.
pub fn cumulative_chart(source: Source, bundles: &[&Bundle]) -> Chart {
    let row_h = 22.0;
    let height = TOP + BOTTOM + row_h * bundles.len().max(1) as f64;
    let label_w = 260.0;
    let (x0, x1) = (label_w, WIDTH - RIGHT);
    let max = bundles
        .iter()
        .map(|b| b.cumulative.supply.max(b.cumulative.demand))
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let x = Scale {
        d0: 0.0,
        d1: max,
        r0: x0,
        r1: x1,
    };
    let mut svg = Svg::new(WIDTH, height);
    svg.text(
        WIDTH / 2.0,
        28.0,
        16.0,
        Anchor::Middle,
        &format!(
            "Cumulative supply ({}) and demand over the window",
            source_label(source)
        ),
    );
    legend(
        &mut svg,
        &[(SUPPLY_COLOR, "supply"), (DEMAND_COLOR, "demand")],
    );
    for (i, b) in bundles.iter().enumerate() {
        let y0 = TOP + row_h * i as f64;
        svg.text(x0 - 8.0, y0 + 15.0, 11.0, Anchor::End, &b.subtopic_id);
        svg.rect(
            x0,
            y0 + 3.0,
            x.map(b.cumulative.supply as f64) - x0,
            8.0,
            SUPPLY_COLOR,
        );
        svg.rect(
            x0,
            y0 + 11.0,
            x.map(b.cumulative.demand as f64) - x0,
            8.0,
            DEMAND_COLOR,
        );
    }
    let axis_y = TOP + row_h * bundles.len().max(1) as f64 + 4.0;
    svg.line(x0, axis_y, x1, axis_y, AXIS_COLOR, 1.0, None);
    for k in 0..=4 {
        let v = max * k as f64 / 4.0;
        svg.text(
            x.map(v),
            axis_y + 16.0,
            10.0,
            Anchor::Middle,
            &format!("{}", v.round()),
        );
    }

    let mut csv =
        String::from("subtopic_id,source,cumulative_supply,cumulative_demand,comparator\n");
    for b in bundles {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            b.subtopic_id,
            source,
            b.cumulative.supply,
            b.cumulative.demand,
            b.cumulative.comparator.as_str()
        ));
    }
    Chart {
        svg: svg.finish(),
        csv,
    }
}
