//! CSV of an INS curve with its thresholds, for plotting.

use std::io::{Read, Write};

use nonstat_core::ins::InsCurve;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub scale: f64,
    pub ins: f64,
    pub gamma: f64,
    pub gamma_hlc: f64,
}

pub fn plot_rows(curve: &InsCurve, alpha: f64) -> Vec<PlotRow> {
    curve
        .points
        .iter()
        .map(|p| PlotRow {
            scale: p.scale,
            ins: p.ins,
            gamma: p.gamma,
            gamma_hlc: alpha * p.gamma,
        })
        .collect()
}

/// Writes a header `scale,ins,gamma,gamma_hlc` and one row per scale.
/// Values use the shortest representation that parses back exactly.
pub fn write_plot_csv(out: impl Write, rows: &[PlotRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(["scale", "ins", "gamma", "gamma_hlc"])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_plot_csv(input: impl Read) -> csv::Result<Vec<PlotRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nonstat_core::ins::InsPoint;

    fn curve() -> InsCurve {
        let points = [(0.006, 1.0 / 3.0, 1.2345678901234567), (0.5, 12.75, 0.1 + 0.2)]
            .iter()
            .map(|&(scale, ins, gamma)| InsPoint {
                scale,
                window_len: 0,
                ins,
                gamma,
                theta1: 0.0,
                theta0_mean: 0.0,
                gamma_degenerate: false,
            })
            .collect();
        InsCurve {
            clip_id: "c".into(),
            config_fingerprint: String::new(),
            seed: 0,
            points,
        }
    }

    #[test]
    fn header_and_exact_round_trip() {
        let rows = plot_rows(&curve(), 10.0);
        let mut buf = Vec::new();
        write_plot_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next(), Some("scale,ins,gamma,gamma_hlc"));
        assert_eq!(text.lines().count(), 3);
        assert_eq!(read_plot_csv(buf.as_slice()).unwrap(), rows);
        assert_eq!(rows[1].gamma_hlc, 10.0 * rows[1].gamma);
    }

    #[test]
    fn empty_curve_still_has_header() {
        let mut buf = Vec::new();
        write_plot_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "scale,ins,gamma,gamma_hlc\n");
    }
}
