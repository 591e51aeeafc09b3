//! The three comparison tables over the six reference `(h, r_min, r_max)` rows.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    phantom_count_hbdrw, phantom_count_psspr, phantom_count_pusbrf, phantom_distance_psspr_mc,
    phantom_distance_psspr_printed, ratio_hbdrw_over_pusbrf, ratio_pusbrf_over_psspr, AnalysisError,
};

/// `(h, r_min, r_max)` reference rows.
pub const TABLE_PRESETS: [(u32, u32, u32); 6] = [
    (5, 4, 6),
    (10, 8, 12),
    (15, 12, 18),
    (20, 16, 24),
    (25, 22, 28),
    (30, 26, 32),
];

/// Hop distance used for the literal phantom-distance expression.
pub const TABLE3_H: f64 = 60.0;
const TABLE3_SAMPLES: usize = 200_000;
const TABLE3_SEED: u64 = 0x7ab1e3;

/// `(r_min, r_max)` for walk length `h`: the reference row when `h` has
/// one, otherwise `round(0.8h)` and `round(1.2h)`.
pub fn sector_radii_for(h: u32) -> (u32, u32) {
    if let Some(&(_, lo, hi)) = TABLE_PRESETS.iter().find(|(ph, _, _)| *ph == h) {
        return (lo, hi);
    }
    let lo = ((0.8 * h as f64).round() as u32).max(1);
    let hi = ((1.2 * h as f64).round() as u32).max(lo + 1);
    (lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table2Row {
    pub h: u32,
    pub r_min: u32,
    pub r_max: u32,
    pub hbdrw_over_pusbrf: f64,
    pub pusbrf_over_psspr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table3Row {
    pub h: u32,
    pub r_min: u32,
    pub r_max: u32,
    /// Monte-Carlo mean phantom distance, hops.
    pub distance_mc: f64,
    /// The literal closed-form expression at `H = 60`.
    pub distance_printed: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table4Row {
    pub h: u32,
    pub r_min: u32,
    pub r_max: u32,
    pub n_hbdrw: f64,
    pub n_pusbrf: f64,
    pub n_psspr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tables {
    pub table2: Vec<Table2Row>,
    pub table3: Vec<Table3Row>,
    pub table4: Vec<Table4Row>,
}

pub fn make_tables() -> Result<Tables, AnalysisError> {
    let mut rng = ChaCha8Rng::seed_from_u64(TABLE3_SEED);
    let mut tables = Tables { table2: Vec::new(), table3: Vec::new(), table4: Vec::new() };
    for &(h, r_min, r_max) in &TABLE_PRESETS {
        let hf = h as f64;
        tables.table2.push(Table2Row {
            h,
            r_min,
            r_max,
            hbdrw_over_pusbrf: ratio_hbdrw_over_pusbrf(hf),
            pusbrf_over_psspr: ratio_pusbrf_over_psspr(h, r_min, r_max),
        });
        tables.table3.push(Table3Row {
            h,
            r_min,
            r_max,
            distance_mc: phantom_distance_psspr_mc(r_min, r_max, TABLE3_SAMPLES, &mut rng)?.mean,
            distance_printed: phantom_distance_psspr_printed(r_min, r_max, TABLE3_H)?,
        });
        tables.table4.push(Table4Row {
            h,
            r_min,
            r_max,
            n_hbdrw: phantom_count_hbdrw(hf),
            n_pusbrf: phantom_count_pusbrf(hf),
            n_psspr: phantom_count_psspr(r_min, r_max, h - r_min)?,
        });
    }
    Ok(tables)
}

impl Tables {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str("table,h,rmin,rmax,col1,col2,col3\n");
        for r in &self.table2 {
            let _ = writeln!(s, "2,{},{},{},{:.4},{:.4},", r.h, r.r_min, r.r_max, r.hbdrw_over_pusbrf, r.pusbrf_over_psspr);
        }
        for r in &self.table3 {
            let _ = writeln!(s, "3,{},{},{},{:.4},{:.4},", r.h, r.r_min, r.r_max, r.distance_mc, r.distance_printed);
        }
        for r in &self.table4 {
            let _ = writeln!(s, "4,{},{},{},{:.4},{:.4},{:.4}", r.h, r.r_min, r.r_max, r.n_hbdrw, r.n_pusbrf, r.n_psspr);
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("Random directed path ratios (%)\n");
        let _ = writeln!(s, "{:>4} {:>5} {:>5} {:>13} {:>13}", "h", "Rmin", "Rmax", "HBDRW/PUSBRF", "PUSBRF/PSSPR");
        for r in &self.table2 {
            let _ = writeln!(s, "{:>4} {:>5} {:>5} {:>13.2} {:>13.2}", r.h, r.r_min, r.r_max, r.hbdrw_over_pusbrf, r.pusbrf_over_psspr);
        }
        s.push_str("\nPSSPR phantom distance (hops): Monte-Carlo mean | literal expression at H=60\n");
        let _ = writeln!(s, "{:>4} {:>5} {:>5} {:>13} {:>13}", "h", "Rmin", "Rmax", "D_mc", "D_literal");
        for r in &self.table3 {
            let _ = writeln!(s, "{:>4} {:>5} {:>5} {:>13.2} {:>13.2}", r.h, r.r_min, r.r_max, r.distance_mc, r.distance_printed);
        }
        s.push_str("\nPhantom node counts\n");
        let _ = writeln!(s, "{:>4} {:>5} {:>5} {:>10} {:>10} {:>10}", "h", "Rmin", "Rmax", "N_HBDRW", "N_PUSBRF", "N_PSSPR");
        for r in &self.table4 {
            let _ = writeln!(
                s,
                "{:>4} {:>5} {:>5} {:>10.2} {:>10.2} {:>10.2}",
                r.h, r.r_min, r.r_max, r.n_hbdrw, r.n_pusbrf, r.n_psspr
            );
        }
        s
    }
}
