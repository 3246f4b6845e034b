//! Subgroup counts from the VAX004 phase 3 efficacy trial of the bivalent
//! rgp120 HIV-1 vaccine (AIDSVAX B/B), with the published 95% intervals.
//!
//! Each record lists the vaccine arm (`x1/n1`) and the placebo arm (`x0/n0`).

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRecord {
    pub category: &'static str,
    pub x1: u64,
    pub n1: u64,
    pub x0: u64,
    pub n0: u64,
}

/// Published estimate and 95% interval, `[estimate, lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Published {
    pub ve: [f64; 3],
    pub sve: [f64; 3],
}

const fn row(
    category: &'static str,
    (x1, n1): (u64, u64),
    (x0, n0): (u64, u64),
    ve: [f64; 3],
    sve: [f64; 3],
) -> (TrialRecord, Published) {
    (
        TrialRecord { category, x1, n1, x0, n0 },
        Published { ve, sve },
    )
}

pub const VAX004: [(TrialRecord, Published); 23] = [
    row("All volunteers", (241, 3598), (127, 1805), [0.05, -0.17, 0.23], [0.05, -0.15, 0.22]),
    row("Men", (239, 3391), (123, 1704), [0.02, -0.20, 0.21], [0.02, -0.17, 0.21]),
    row("Women", (2, 207), (4, 101), [0.76, -0.31, 0.95], [0.76, -0.19, 0.97]),
    row("White (non-Hispanic)", (211, 2994), (98, 1495), [-0.08, -0.36, 0.15], [-0.07, -0.26, 0.14]),
    row("White (non-Hispanic) men", (211, 2930), (98, 1468), [-0.08, -0.36, 0.14], [-0.07, -0.27, 0.14]),
    row("Hispanic", (14, 239), (9, 128), [0.17, -0.87, 0.63], [0.17, -0.49, 0.62]),
    row("Hispanic men", (13, 211), (9, 114), [0.22, -0.77, 0.66], [0.22, -0.46, 0.65]),
    row("Black (non-Hispanic)", (6, 233), (9, 116), [0.67, 0.09, 0.88], [0.67, 0.10, 0.89]),
    row("Black (non-Hispanic) men", (5, 121), (5, 59), [0.51, -0.62, 0.85], [0.51, -0.41, 0.86]),
    row("Black (non-Hispanic) women", (1, 112), (4, 57), [0.87, -0.11, 0.99], [0.87, 0.16, 0.99]),
    row("Asian (all men)", (3, 56), (3, 21), [0.62, -0.71, 0.92], [0.62, -0.47, 0.93]),
    row("Other", (7, 76), (8, 45), [0.48, -0.33, 0.80], [0.48, -0.26, 0.81]),
    row("Other men", (7, 73), (8, 42), [0.50, -0.29, 0.80], [0.50, -0.23, 0.81]),
    row("Nonwhite", (30, 604), (29, 310), [0.47, 0.13, 0.68], [0.47, 0.13, 0.68]),
    row("Nonwhite men", (28, 461), (25, 236), [0.43, 0.04, 0.66], [0.43, 0.03, 0.66]),
    row("Nonwhite women", (2, 143), (4, 74), [0.74, -0.38, 0.95], [0.74, -0.23, 0.96]),
    row("Age <= 30 years", (84, 971), (43, 504), [-0.01, -0.44, 0.29], [-0.01, -0.31, 0.28]),
    row("Age > 30 years", (157, 2627), (84, 1301), [0.07, -0.20, 0.28], [0.07, -0.17, 0.28]),
    row("Less than college degree", (95, 1409), (52, 713), [0.08, -0.28, 0.33], [0.08, -0.22, 0.33]),
    row("College or graduate degree", (146, 2188), (75, 1092), [0.03, -0.27, 0.26], [0.03, -0.22, 0.25]),
    row("Low risk", (32, 1211), (11, 609), [-0.46, -1.88, 0.26], [-0.32, -0.67, 0.23]),
    row("Medium risk", (177, 2229), (90, 1107), [0.02, -0.25, 0.23], [0.02, -0.20, 0.23]),
    row("High risk", (32, 158), (26, 89), [0.31, -0.08, 0.56], [0.31, -0.09, 0.56]),
];

/// Names accepted by `reanalyze --dataset`.
pub fn lookup(name: &str) -> Option<&'static [(TrialRecord, Published)]> {
    match name.to_ascii_lowercase().as_str() {
        "vax004" => Some(&VAX004),
        _ => None,
    }
}
