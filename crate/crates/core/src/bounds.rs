//! Closed-form parameter bounds: the ball-mass threshold behind the degree
//! guarantees, the admissible deletion probability, and the Jaccard-threshold
//! windows for insertion-only and combined noise. All calculators are pure
//! arithmetic; a feasibility report aggregates them for a parameter set.
//!
//! The windows are frequently empty at desk-scale n because their lower edge
//! carries a sqrt(ln n / (s n)) concentration term; the report states that
//! honestly rather than clamping, and experiment drivers pick the working
//! threshold empirically.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter set a feasibility question is asked about: graph size n,
/// ball-mass lower bound s, doubling constant L, insertion budget ratio c
/// (q <= c*s), and the noise rates p, q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeParams {
    pub n: usize,
    pub s: f64,
    pub l: f64,
    pub c: f64,
    pub p: f64,
    pub q: f64,
}

impl RegimeParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::parameter(format!("n must be >= 3, got {}", self.n)));
        }
        if !(self.s > 0.0 && self.s <= 1.0) {
            return Err(Error::parameter(format!("s must be in (0,1], got {}", self.s)));
        }
        if !(self.l >= 1.0) {
            return Err(Error::parameter(format!("L must be >= 1, got {}", self.l)));
        }
        if !(self.c > 0.0) {
            return Err(Error::parameter(format!("c must be positive, got {}", self.c)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::parameter(format!("p must be in [0,1], got {}", self.p)));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::parameter(format!("q must be in [0,1], got {}", self.q)));
        }
        Ok(())
    }

    /// Whether the insertion rate respects its budget q <= c*s.
    pub fn c_consistent(&self) -> bool {
        self.q <= self.c * self.s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowMode {
    InsertionOnly,
    Combined,
}

impl fmt::Display for WindowMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowMode::InsertionOnly => write!(f, "insertion_only"),
            WindowMode::Combined => write!(f, "combined"),
        }
    }
}

/// Admissible Jaccard-threshold interval (lower, upper); usable iff
/// lower < upper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamWindow {
    pub lower: f64,
    pub upper: f64,
    pub nonempty: bool,
    pub mode: WindowMode,
}

/// Smallest admissible ball-mass lower bound: 12 ln(n) / (n - 2). Values
/// above 1 mean no probability measure can satisfy the requirement at this n.
pub fn assumption_r_threshold(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::parameter(format!("n must be >= 3, got {n}")));
    }
    Ok(12.0 * (n as f64).ln() / (n as f64 - 2.0))
}

/// Deletion probabilities below (1/2) exp(-9 ln n / (s (n-1))) keep the
/// observed metric a 2-approximation with high probability.
pub fn deletion_p_bound(n: usize, s: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::parameter(format!("n must be >= 3, got {n}")));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::parameter(format!("s must be in (0,1], got {s}")));
    }
    let ln_n = (n as f64).ln();
    Ok(0.5 * (-9.0 * ln_n / (s * (n as f64 - 1.0))).exp())
}

/// Admissible threshold window for the requested noise mode.
///
/// insertion-only: upper = 1 / ((6 + 1/ln n + 12c) L^2),
///                 lower = (c+2) q + 2(c+2) sqrt(ln n / (s (n-2)))
/// combined:       upper = (1-p)^2 / ((10 + 5/(3 ln n) + 20c) L^2),
///                 lower = (c+2) q / (1-p) + (2(c+2)/(1-p)) sqrt(ln n / (s (n-2)))
pub fn tau_window(params: &RegimeParams, mode: WindowMode) -> Result<ParamWindow> {
    params.validate()?;
    let n = params.n as f64;
    let ln_n = n.ln();
    let (c, l, p, q) = (params.c, params.l, params.p, params.q);
    let sqrt_term = (ln_n / (params.s * (n - 2.0))).sqrt();
    let (lower, upper) = match mode {
        WindowMode::InsertionOnly => {
            let upper = 1.0 / ((6.0 + 1.0 / ln_n + 12.0 * c) * l * l);
            let lower = (c + 2.0) * q + 2.0 * (c + 2.0) * sqrt_term;
            (lower, upper)
        }
        WindowMode::Combined => {
            if p >= 1.0 {
                return Err(Error::parameter(
                    "combined window is undefined at p = 1 (division by zero)".to_string(),
                ));
            }
            let upper = (1.0 - p) * (1.0 - p) / ((10.0 + 5.0 / (3.0 * ln_n) + 20.0 * c) * l * l);
            let lower = (c + 2.0) * q / (1.0 - p) + 2.0 * (c + 2.0) / (1.0 - p) * sqrt_term;
            (lower, upper)
        }
    };
    Ok(ParamWindow { lower, upper, nonempty: lower < upper, mode })
}

/// Precondition checks of the combined-noise guarantee; returned as warning
/// strings when violated (the window is still computed).
pub fn combined_precondition_warnings(params: &RegimeParams) -> Vec<String> {
    let mut warnings = Vec::new();
    if params.p > 0.25 {
        warnings.push(format!(
            "combined-mode guarantee assumes p <= 1/4; p = {}",
            params.p
        ));
    }
    let q_cap = (0.125f64).min(params.c * params.s);
    if params.q > q_cap {
        warnings.push(format!(
            "combined-mode guarantee assumes q <= min(1/8, c*s) = {q_cap}; q = {}",
            params.q
        ));
    }
    warnings
}

/// Every bound evaluated for one parameter set, with pass/fail flags.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub params: RegimeParams,
    pub assumption_r_threshold: f64,
    /// s >= 12 ln n / (n-2)
    pub assumption_r_ok: bool,
    pub deletion_p_bound: f64,
    /// p < deletion bound
    pub deletion_p_ok: bool,
    /// q <= c*s
    pub c_consistent: bool,
    pub insertion_window: ParamWindow,
    /// None when p = 1 leaves the combined bound undefined.
    pub combined_window: Option<ParamWindow>,
    /// s*n / ln n; the asymptotic guarantees want this large.
    pub sn_over_ln_n: f64,
    pub warnings: Vec<String>,
}

pub fn feasibility_report(params: &RegimeParams) -> Result<FeasibilityReport> {
    params.validate()?;
    let threshold = assumption_r_threshold(params.n)?;
    let p_bound = deletion_p_bound(params.n, params.s)?;
    let insertion_window = tau_window(params, WindowMode::InsertionOnly)?;
    let combined_window = tau_window(params, WindowMode::Combined).ok();
    let mut warnings = Vec::new();
    if threshold > 1.0 {
        warnings.push(format!(
            "ball-mass threshold {threshold:.4} exceeds 1: no probability measure can satisfy it at n = {}",
            params.n
        ));
    }
    warnings.extend(combined_precondition_warnings(params));
    Ok(FeasibilityReport {
        params: *params,
        assumption_r_threshold: threshold,
        assumption_r_ok: params.s >= threshold,
        deletion_p_bound: p_bound,
        deletion_p_ok: params.p < p_bound,
        c_consistent: params.c_consistent(),
        insertion_window,
        combined_window,
        sn_over_ln_n: params.s * params.n as f64 / (params.n as f64).ln(),
        warnings,
    })
}

impl FeasibilityReport {
    /// The five satisfied/violated/empty flags in report order.
    pub fn flags(&self) -> [bool; 5] {
        [
            self.assumption_r_ok,
            self.deletion_p_ok,
            self.c_consistent,
            self.insertion_window.nonempty,
            self.combined_window.map(|w| w.nonempty).unwrap_or(false),
        ]
    }

    pub const CSV_HEADER: &'static str = "n,s,L,c,p,q,assumption_r_threshold,assumption_r_ok,\
deletion_p_bound,deletion_p_ok,c_consistent,insertion_tau_lower,insertion_tau_upper,\
insertion_nonempty,combined_tau_lower,combined_tau_upper,combined_nonempty,sn_over_ln_n";

    pub fn csv_row(&self) -> String {
        let p = &self.params;
        let (cl, cu, cn) = match self.combined_window {
            Some(w) => (format!("{}", w.lower), format!("{}", w.upper), w.nonempty),
            None => ("nan".to_string(), "nan".to_string(), false),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{cl},{cu},{cn},{}",
            p.n,
            p.s,
            p.l,
            p.c,
            p.p,
            p.q,
            self.assumption_r_threshold,
            self.assumption_r_ok,
            self.deletion_p_bound,
            self.deletion_p_ok,
            self.c_consistent,
            self.insertion_window.lower,
            self.insertion_window.upper,
            self.insertion_window.nonempty,
            self.sn_over_ln_n,
        )
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        let ok = |b: bool| if b { "ok" } else { "VIOLATED" };
        writeln!(f, "parameters           n={} s={} L={} c={} p={} q={}", p.n, p.s, p.l, p.c, p.p, p.q)?;
        writeln!(
            f,
            "ball-mass threshold  12 ln n/(n-2) = {:.6}  [s >= threshold: {}]",
            self.assumption_r_threshold,
            ok(self.assumption_r_ok)
        )?;
        writeln!(
            f,
            "deletion bound       (1/2) exp(-9 ln n/(s(n-1))) = {:.6}  [p < bound: {}]",
            self.deletion_p_bound,
            ok(self.deletion_p_ok)
        )?;
        writeln!(
            f,
            "insertion budget     q <= c*s = {:.6}  [{}]",
            p.c * p.s,
            ok(self.c_consistent)
        )?;
        let win = |w: &ParamWindow| {
            format!(
                "[{:.6}, {:.6}]  [{}]",
                w.lower,
                w.upper,
                if w.nonempty { "nonempty" } else { "EMPTY" }
            )
        };
        writeln!(
            f,
            "insertion-only tau   upper = 1/((6 + 1/ln n + 12c) L^2), lower = (c+2)q + 2(c+2)sqrt(ln n/(s(n-2)))"
        )?;
        writeln!(f, "                     {}", win(&self.insertion_window))?;
        writeln!(
            f,
            "combined tau         upper = (1-p)^2/((10 + 5/(3 ln n) + 20c) L^2), lower scaled by 1/(1-p)"
        )?;
        match &self.combined_window {
            Some(w) => writeln!(f, "                     {}", win(w))?,
            None => writeln!(f, "                     undefined at p = 1")?,
        }
        writeln!(f, "s*n / ln n           {:.4}", self.sn_over_ln_n)?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, s: f64, l: f64, c: f64, p: f64, q: f64) -> RegimeParams {
        RegimeParams { n, s, l, c, p, q }
    }

    #[test]
    fn threshold_worked_values() {
        let t = assumption_r_threshold(1000).unwrap();
        assert!((t - 0.08306).abs() < 1e-5, "t = {t}");
        // small n: the requirement exceeds 1 and is unsatisfiable
        let t8 = assumption_r_threshold(8).unwrap();
        assert!((t8 - 2.0 * 8.0f64.ln()).abs() < 1e-12);
        assert!(t8 > 1.0);
        assert!(assumption_r_threshold(2).is_err());
    }

    #[test]
    fn threshold_decreases_in_n() {
        let mut last = f64::INFINITY;
        for n in [8usize, 16, 64, 256, 1024, 4096, 65536, 1 << 20] {
            let t = assumption_r_threshold(n).unwrap();
            assert!(t < last, "not decreasing at n={n}");
            last = t;
        }
    }

    #[test]
    fn deletion_bound_worked_values() {
        // s(n-1) = 12 ln n pins the bound at (1/2) e^{-3/4}
        let n = 1000usize;
        let s = 12.0 * (n as f64).ln() / (n as f64 - 1.0);
        let b = deletion_p_bound(n, s).unwrap();
        assert!((b - 0.5 * (-0.75f64).exp()).abs() < 1e-9, "b = {b}");
        assert!((b - 0.23618).abs() < 1e-5);

        let b2 = deletion_p_bound(1000, 0.0831).unwrap();
        assert!((b2 - 0.2364).abs() < 1e-4, "b2 = {b2}");
    }

    #[test]
    fn deletion_bound_below_half_and_increasing_in_s() {
        let mut last = 0.0;
        for s in [0.01, 0.05, 0.1, 0.5, 1.0] {
            let b = deletion_p_bound(100_000, s).unwrap();
            assert!(b < 0.5);
            assert!(b > last);
            last = b;
        }
        // s -> 1 at large n approaches 1/2 from below
        let near = deletion_p_bound(100_000_000, 1.0).unwrap();
        assert!(near > 0.499 && near < 0.5);
    }

    #[test]
    fn insertion_window_worked_values() {
        // upper at n=1000, c=0.5, L=2
        let w = tau_window(&params(1000, 0.5, 2.0, 0.5, 0.0, 0.1), WindowMode::InsertionOnly).unwrap();
        assert!((w.upper - 0.020585).abs() < 1e-6, "upper = {}", w.upper);

        // lower at n=1000, s=0.0831, c=1, q=0.01; window comes out empty
        let w = tau_window(&params(1000, 0.0831, 2.0, 1.0, 0.0, 0.01), WindowMode::InsertionOnly).unwrap();
        assert!((w.lower - 1.7616).abs() < 2e-3, "lower = {}", w.lower);
        assert!(!w.nonempty);
    }

    #[test]
    fn combined_lower_at_p_zero_equals_insertion_lower_exactly() {
        for (n, s, c, q) in [
            (1000usize, 0.0831, 1.0, 0.01),
            (5000, 0.05, 0.5, 0.002),
            (1 << 20, 0.9, 0.1, 0.05),
        ] {
            let pr = params(n, s, 2.0, c, 0.0, q);
            let ins = tau_window(&pr, WindowMode::InsertionOnly).unwrap();
            let comb = tau_window(&pr, WindowMode::Combined).unwrap();
            assert_eq!(ins.lower, comb.lower, "n={n}");
        }
    }

    #[test]
    fn combined_at_p_one_is_an_error() {
        assert!(tau_window(&params(1000, 0.1, 2.0, 1.0, 1.0, 0.01), WindowMode::Combined).is_err());
    }

    #[test]
    fn window_monotonicity() {
        let base = params(10_000, 0.1, 2.0, 0.5, 0.1, 0.01);

        let mut last_upper = f64::INFINITY;
        let mut last_lower = 0.0;
        for c in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let w = tau_window(&RegimeParams { c, ..base }, WindowMode::InsertionOnly).unwrap();
            assert!(w.upper < last_upper, "upper not decreasing in c");
            assert!(w.lower > last_lower, "lower not increasing in c");
            last_upper = w.upper;
            last_lower = w.lower;
        }

        last_upper = f64::INFINITY;
        for l in [1.0, 1.5, 2.0, 4.0] {
            let w = tau_window(&RegimeParams { l, ..base }, WindowMode::InsertionOnly).unwrap();
            assert!(w.upper < last_upper, "upper not decreasing in L");
            last_upper = w.upper;
        }

        last_upper = f64::INFINITY;
        for p in [0.0, 0.1, 0.2, 0.25] {
            let w = tau_window(&RegimeParams { p, ..base }, WindowMode::Combined).unwrap();
            assert!(w.upper < last_upper, "combined upper not decreasing in p");
            last_upper = w.upper;
        }

        last_lower = 0.0;
        for q in [0.0, 0.005, 0.01, 0.02] {
            let w = tau_window(&RegimeParams { q, ..base }, WindowMode::InsertionOnly).unwrap();
            assert!(w.lower > last_lower || q == 0.0, "lower not increasing in q");
            last_lower = w.lower;
        }
    }

    #[test]
    fn report_flags() {
        // asymptotic-friendly parameters: everything holds
        let good = params(1_000_000_000_000, 1.0, 1.0, 0.001, 0.1, 1e-9);
        let rep = feasibility_report(&good).unwrap();
        assert_eq!(rep.flags(), [true; 5], "{rep}");
        assert!(rep.warnings.is_empty());

        // s below the ball-mass threshold
        let rep = feasibility_report(&params(1000, 0.01, 2.0, 1.0, 0.1, 0.005)).unwrap();
        assert!(!rep.assumption_r_ok);

        // q above the insertion budget
        let rep = feasibility_report(&params(1000, 0.1, 2.0, 0.5, 0.1, 0.2)).unwrap();
        assert!(!rep.c_consistent);
        assert!(!rep.warnings.is_empty());

        // p = 1 leaves the combined window undefined but the report intact
        let rep = feasibility_report(&params(1000, 0.1, 2.0, 0.5, 1.0, 0.01)).unwrap();
        assert!(rep.combined_window.is_none());
        assert!(!rep.flags()[4]);
    }

    #[test]
    fn csv_row_matches_header_width() {
        let rep = feasibility_report(&params(1000, 0.1, 2.0, 0.5, 0.1, 0.01)).unwrap();
        let cols = FeasibilityReport::CSV_HEADER.split(',').count();
        assert_eq!(rep.csv_row().split(',').count(), cols);
    }
}
