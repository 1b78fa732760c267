//! Deterministic text emission: CSV tables, the PDM JSON document, and
//! gnuplot scripts.
//!
//! Every renderer returns a `String`; callers own file placement. Floats use
//! the shortest decimal that round-trips (Rust's `Display`), so a fixed input
//! always renders byte-identically. Missing interval edges serialize as
//! `NaN`, which the emitted plot scripts declare as the missing-data marker.
//! No renderer embeds timestamps or environment details.

use std::fmt::Write as _;

use serde::Serialize;

use crate::chsh::BoundComparison;
use crate::error::{CoreError, CoreResult};
use crate::lindblad::Trajectory;
use crate::model::ModelParams;
use crate::pdm::{Pdm2, PdmSpectrum};
use crate::response::{HeatCapacitySample, ResponseTensorSample};
use crate::witness::ScanResult;

/// `time,x,y,z` rows of an integrated Bloch trajectory.
pub fn trajectory_csv(trajectory: &Trajectory) -> String {
    let mut out = String::from("time,x,y,z\n");
    for (t, state) in trajectory.times.iter().zip(&trajectory.states) {
        let _ = writeln!(out, "{t},{},{},{}", state.x, state.y, state.z);
    }
    out
}

/// `omega,c_real,c_imag` rows of a heat-capacity frequency sweep.
pub fn spectrum_csv(samples: &[HeatCapacitySample]) -> String {
    let mut out = String::from("omega,c_real,c_imag\n");
    for sample in samples {
        let _ = writeln!(
            out,
            "{},{},{}",
            sample.omega_mod, sample.c_real, sample.c_imag
        );
    }
    out
}

/// `row,col,re,im` rows of a response tensor, row-major with 1-based indices
/// (`1, 2, 3` for the `x, y, z` directions).
pub fn tensor_csv(tensor: &ResponseTensorSample) -> String {
    let mut out = String::from("row,col,re,im\n");
    for row in 0..3 {
        for col in 0..3 {
            let entry = tensor.entries[(row, col)];
            let _ = writeln!(out, "{},{},{},{}", row + 1, col + 1, entry.re, entry.im);
        }
    }
    out
}

/// `t,lambda1,lambda2,lambda3,lambda4,negativity` rows of a spectrum sweep.
pub fn pdm_spectrum_csv(rows: &[(f64, PdmSpectrum)]) -> String {
    let mut out = String::from("t,lambda1,lambda2,lambda3,lambda4,negativity\n");
    for (t, spectrum) in rows {
        let [l1, l2, l3, l4] = spectrum.eigenvalues;
        let _ = writeln!(out, "{t},{l1},{l2},{l3},{l4},{}", spectrum.negativity);
    }
    out
}

#[derive(Serialize)]
struct PdmDocument<'a> {
    t: f64,
    params: Option<&'a ModelParams>,
    /// Sixteen row-major `[re, im]` pairs.
    entries: Vec<[f64; 2]>,
}

/// JSON document for one normalized PDM: lag, model parameters when the
/// matrix came from the thermal construction, and the sixteen entries in
/// row-major order as `[re, im]` pairs.
pub fn pdm_json(pdm: &Pdm2) -> String {
    let matrix = pdm.matrix();
    let mut entries = Vec::with_capacity(16);
    for row in 0..4 {
        for col in 0..4 {
            let entry = matrix[(row, col)];
            entries.push([entry.re, entry.im]);
        }
    }
    let document = PdmDocument {
        t: pdm.tau(),
        params: pdm.params(),
        entries,
    };
    let mut rendered =
        serde_json::to_string_pretty(&document).expect("a PDM document always serializes");
    rendered.push('\n');
    rendered
}

/// `t,s_max_closed,s_max_horodecki,classical_bound,tsirelson_bound` rows.
/// The two constant columns carry the reference lines; a negative-radicand
/// closed form serializes as `NaN`.
pub fn chsh_csv(rows: &[BoundComparison]) -> String {
    let tsirelson = 2.0 * std::f64::consts::SQRT_2;
    let mut out = String::from("t,s_max_closed,s_max_horodecki,classical_bound,tsirelson_bound\n");
    for row in rows {
        let closed = row.closed.value().unwrap_or(f64::NAN);
        let _ = writeln!(out, "{},{closed},{},2,{tsirelson}", row.t, row.horodecki);
    }
    out
}

/// `t,l1,l2,l3,l4,negativity` rows of an eigenvalue sweep.
pub fn fig1_csv(scan: &ScanResult) -> String {
    let mut out = String::from("t,l1,l2,l3,l4,negativity\n");
    for sample in scan.samples() {
        let [l1, l2, l3, l4] = sample.eigenvalues;
        let _ = writeln!(
            out,
            "{},{l1},{l2},{l3},{l4},{}",
            sample.t, sample.negativity
        );
    }
    out
}

/// `t,smax_closed,smax_horodecki` rows of a Bell-bound sweep.
pub fn fig2_csv(scan: &ScanResult) -> String {
    let mut out = String::from("t,smax_closed,smax_horodecki\n");
    for sample in scan.samples() {
        let _ = writeln!(
            out,
            "{},{},{}",
            sample.t, sample.s_max_closed, sample.s_max_horodecki
        );
    }
    out
}

/// `t,cpp_lo,cpp_hi,verdict` rows of the violation-region sweep. Samples
/// without a region carry `NaN` edges and verdict 0.
pub fn fig3_csv(scan: &ScanResult) -> String {
    let mut out = String::from("t,cpp_lo,cpp_hi,verdict\n");
    for sample in scan.samples() {
        match sample.c_imag_bounds {
            Some((lo, hi)) => {
                let _ = writeln!(out, "{},{lo},{hi},1", sample.t);
            }
            None => {
                let _ = writeln!(out, "{},NaN,NaN,0", sample.t);
            }
        }
    }
    out
}

/// Gnuplot script plotting `fig{which}.csv` from the same directory.
pub fn figure_script(which: u8) -> CoreResult<String> {
    let preamble = "\
set datafile separator ','
set datafile missing 'NaN'
set key autotitle columnhead
set xlabel 't'
set terminal pngcairo size 900,600
";
    let body = match which {
        1 => {
            "set ylabel 'eigenvalue'
set output 'fig1.png'
plot 'fig1.csv' using 1:2 with lines, \\
     '' using 1:3 with lines, \\
     '' using 1:4 with lines, \\
     '' using 1:5 with lines, \\
     '' using 1:6 with lines lw 2
"
        }
        2 => {
            "set ylabel 'S'
set output 'fig2.png'
plot 'fig2.csv' using 1:2 with lines, \\
     '' using 1:3 with lines, \\
     2 with lines dashtype 2 title 'classical bound', \\
     2*sqrt(2) with lines dashtype 2 title 'tsirelson bound'
"
        }
        3 => {
            "set ylabel 'scaled imaginary heat capacity'
set output 'fig3.png'
plot 'fig3.csv' using 1:2:3 with filledcurves fs transparent solid 0.4 title 'violation region', \\
     '' using 1:2 with lines notitle, \\
     '' using 1:3 with lines notitle
"
        }
        _ => {
            return Err(CoreError::Domain(format!(
                "figure index {which} is not one of 1, 2, 3"
            )))
        }
    };
    Ok(format!("{preamble}{body}"))
}
