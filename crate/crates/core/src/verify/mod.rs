//! Independent checks of semi-Fourier sequences.
//!
//! * [`verify_symbolic`] checks the three defining conditions exactly, on
//!   rational forms.
//! * [`verify_numeric`] checks them at sample points, evaluating the tower
//!   numerically and differentiating both symbolically and by finite
//!   differences.
//! * [`sign_changes`] and [`root_count_bound`] give the Budan-Fourier style
//!   bound `nu(a) - nu(b)` on the number of roots in `(a, b]`.

mod eval;

pub use eval::{eval_abs, eval_elem, eval_expr, evaluate_tower, EvalConfig, EvalError};

use serde_json::{json, Value};
use thiserror::Error;

use crate::scalar::Coeff;
use crate::sequence::{HMultiplier, SfSequence};
use crate::tower::TowerElem;
use crate::Rational;

/// Outcome of one defining condition.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionResult {
    /// `"1"`, `"2:k->k+1"` or `"3"`.
    pub name: String,
    pub pass: bool,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    /// First failing sample, for numeric checks.
    pub failed_at: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscardedSample {
    pub x: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub pass: bool,
    pub conditions: Vec<ConditionResult>,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub discarded_samples: Vec<DiscardedSample>,
    /// Points where an `inv` argument vanished.
    pub singularities: Vec<f64>,
}

impl VerificationReport {
    fn from_conditions(conditions: Vec<ConditionResult>) -> Self {
        let pass = conditions.iter().all(|c| c.pass);
        let max_abs_residual = conditions
            .iter()
            .map(|c| c.max_abs_residual)
            .fold(0.0, f64::max);
        let max_rel_residual = conditions
            .iter()
            .map(|c| c.max_rel_residual)
            .fold(0.0, f64::max);
        VerificationReport {
            pass,
            conditions,
            max_abs_residual,
            max_rel_residual,
            discarded_samples: Vec::new(),
            singularities: Vec::new(),
        }
    }

    /// Names of the conditions that failed.
    pub fn failures(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.pass,
            "conditions": self.conditions.iter().map(|c| json!({
                "condition": c.name,
                "pass": c.pass,
                "max_abs_residual": c.max_abs_residual,
                "max_rel_residual": c.max_rel_residual,
                "failed_at": c.failed_at,
            })).collect::<Vec<_>>(),
            "max_abs_residual": self.max_abs_residual,
            "max_rel_residual": self.max_rel_residual,
            "discarded_samples": self.discarded_samples.iter().map(|d| json!({
                "x": d.x,
                "reason": d.reason,
            })).collect::<Vec<_>>(),
            "singularities": self.singularities,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("every sample was discarded; the interval is unusable")]
    AllDiscarded,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn condition_names(m: usize) -> Vec<String> {
    let mut names = vec!["1".to_string()];
    names.extend((1..m).map(|k| format!("2:{k}->{}", k + 1)));
    names.push("3".into());
    names
}

/// Exact check of the three conditions on rational forms.
pub fn verify_symbolic<C: Coeff>(seq: &SfSequence<C>) -> VerificationReport {
    let t = &seq.tower;
    let rf = |a: &TowerElem<C>| t.to_rational_form(a);
    let rfh = |h: &HMultiplier| t.to_rational_form(&t.h_elem(h));
    let legal = seq.pairs.iter().all(|p| t.h_is_legal(&p.h));
    let names = condition_names(seq.len());
    let mut out = Vec::with_capacity(names.len());
    let result = |name: &String, pass: bool| ConditionResult {
        name: name.clone(),
        pass: pass && legal,
        max_abs_residual: 0.0,
        max_rel_residual: 0.0,
        failed_at: None,
    };
    let first = &seq.pairs[0];
    out.push(result(
        &names[0],
        t.rf_equal(&t.rf_mul(&rf(&seq.input), &rfh(&first.h)), &rf(&first.g)),
    ));
    for (w, name) in seq.pairs.windows(2).zip(&names[1..]) {
        let lhs = t.rf_mul(&rf(&t.diff(&w[0].g)), &rfh(&w[1].h));
        out.push(result(name, t.rf_equal(&lhs, &rf(&w[1].g))));
    }
    out.push(result(
        &names[seq.len()],
        rf(&t.diff(&seq.last().g)).is_zero(),
    ));
    VerificationReport::from_conditions(out)
}

fn h_value(h: &HMultiplier, vals: &[f64]) -> f64 {
    h.iter().map(|(l, e)| vals[l - 1].powi(e as i32)).product()
}

/// Running worst residual of one condition.
struct Tally {
    pass: bool,
    max_abs: f64,
    max_rel: f64,
    failed_at: Option<f64>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            pass: true,
            max_abs: 0.0,
            max_rel: 0.0,
            failed_at: None,
        }
    }

    fn record(&mut self, x: f64, lhs: f64, rhs: f64, scale: f64, cfg: &EvalConfig) {
        let r = (lhs - rhs).abs();
        let rel = if scale > 0.0 { r / scale } else { r };
        let ok = r <= cfg.abs_tol + cfg.rel_tol * scale;
        self.max_abs = self.max_abs.max(r);
        self.max_rel = self.max_rel.max(rel);
        if !ok && self.pass {
            self.pass = false;
            self.failed_at = Some(x);
        }
    }

    fn finish(self, name: String) -> ConditionResult {
        ConditionResult {
            name,
            pass: self.pass,
            max_abs_residual: self.max_abs,
            max_rel_residual: self.max_rel,
            failed_at: self.failed_at,
        }
    }
}

/// Why a sample cannot be used, if it cannot.
fn guard_reason<C: Coeff>(
    seq: &SfSequence<C>,
    x: f64,
    vals: &[f64],
    cfg: &EvalConfig,
) -> Option<String> {
    if let Some(k) = vals.iter().position(|v| !v.is_finite()) {
        return Some(format!("f{} is not finite", k + 1));
    }
    for (k, g) in seq.tower.generators().iter().enumerate() {
        if g.kind == crate::expr::TKind::Inv {
            let a = eval_elem(&g.arg, x, vals);
            if a.abs() <= cfg.guard * eval_abs(&g.arg, x, vals) {
                return Some(format!("argument of f{} is within the guard band", k + 1));
            }
        }
    }
    for p in &seq.pairs {
        for (l, _) in p.h.iter() {
            let v = vals[l - 1];
            if v == 0.0 || !v.powi(2).is_normal() {
                return Some(format!("multiplier factor f{l} is too close to 0"));
            }
        }
    }
    None
}

/// Check the three conditions at `cfg.samples` points of `cfg.interval`.
///
/// `D(gk)` is evaluated from its symbolic form and compared against a
/// centered finite difference of `gk` before it is used. Samples that cannot
/// be reached past a singularity, or that fall in the guard band of a
/// multiplier factor or an `inv` argument, are discarded and listed.
pub fn verify_numeric<C: Coeff>(
    seq: &SfSequence<C>,
    cfg: &EvalConfig,
) -> Result<VerificationReport, VerifyError> {
    let (a, b) = cfg.interval;
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(VerifyError::Config(format!("interval [{a}, {b}] is empty")));
    }
    if cfg.samples < 2 || cfg.rel_tol <= 0.0 || cfg.abs_tol < 0.0 {
        return Err(VerifyError::Config(
            "need at least 2 samples and positive tolerances".into(),
        ));
    }
    let t = &seq.tower;
    let xs = cfg.sample_points();
    let d = cfg.fd_step;
    let mut points = Vec::with_capacity(3 * xs.len());
    for &x in &xs {
        points.extend([x, x - d, x + d]);
    }
    let walk = eval::walk(t, cfg, &points, false);
    let mut singularities: Vec<f64> = walk.crossings.iter().filter_map(EvalError::at).collect();

    let m = seq.len();
    let diffs: Vec<TowerElem<C>> = seq.pairs.iter().map(|p| t.diff(&p.g)).collect();
    let mut tallies: Vec<Tally> = (0..=m).map(|_| Tally::new()).collect();
    let mut fd_tally = Tally::new();
    let fd_cfg = EvalConfig {
        abs_tol: cfg.abs_tol,
        rel_tol: cfg.fd_tol,
        ..EvalConfig::default()
    };
    let mut discarded = Vec::new();
    let mut retained = 0usize;
    for (i, &x) in xs.iter().enumerate() {
        let got: Result<Vec<&Vec<f64>>, &EvalError> = walk.values[3 * i..3 * i + 3]
            .iter()
            .map(|r| r.as_ref())
            .collect();
        let vals = match got {
            Ok(v) => v,
            Err(e) => {
                singularities.extend(e.at());
                discarded.push(DiscardedSample {
                    x,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        if let Some(reason) = vals
            .iter()
            .zip([x, x - d, x + d])
            .find_map(|(v, px)| guard_reason(seq, px, v, cfg))
        {
            discarded.push(DiscardedSample { x, reason });
            continue;
        }
        retained += 1;
        let (v, vl, vr) = (vals[0].as_slice(), vals[1].as_slice(), vals[2].as_slice());

        let g = |k: usize| eval_elem(&seq.pairs[k].g, x, v);
        let g_abs = |k: usize| eval_abs(&seq.pairs[k].g, x, v);
        let h = |k: usize| h_value(&seq.pairs[k].h, v);

        let (fx, f_abs) = match &seq.source {
            Some(e) => (
                eval_expr(e, t, x, v)?,
                eval_abs(&seq.input, x, v).max(eval_expr(e, t, x, v)?.abs()),
            ),
            None => (eval_elem(&seq.input, x, v), eval_abs(&seq.input, x, v)),
        };
        tallies[0].record(x, fx * h(0), g(0), f_abs * h(0).abs() + g_abs(0), cfg);

        for k in 0..m {
            let dsym = eval_elem(&diffs[k], x, v);
            let dsym_abs = eval_abs(&diffs[k], x, v);
            let gk = &seq.pairs[k].g;
            let dfd = (eval_elem(gk, x + d, vr) - eval_elem(gk, x - d, vl)) / (2.0 * d);
            fd_tally.record(x, dfd, dsym, dsym_abs + g_abs(k), &fd_cfg);
            if k + 1 < m {
                tallies[k + 1].record(
                    x,
                    dsym * h(k + 1),
                    g(k + 1),
                    dsym_abs * h(k + 1).abs() + g_abs(k + 1),
                    cfg,
                );
            } else {
                tallies[m].record(x, dsym, 0.0, dsym_abs, cfg);
            }
        }
    }
    if retained == 0 {
        return Err(VerifyError::AllDiscarded);
    }
    let mut conditions: Vec<ConditionResult> = tallies
        .into_iter()
        .zip(condition_names(m))
        .map(|(t, n)| t.finish(n))
        .collect();
    conditions.push(fd_tally.finish("finite-difference".into()));
    let mut report = VerificationReport::from_conditions(conditions);
    singularities.sort_by(f64::total_cmp);
    let width = (b - a) * 1e-6;
    singularities.dedup_by(|x, y| (*x - *y).abs() <= width);
    report.discarded_samples = discarded;
    report.singularities = singularities;
    Ok(report)
}

/// Number of sign alternations, ignoring zeros.
pub fn sign_changes<R: num_traits::Signed>(values: &[R]) -> usize {
    let mut last: Option<bool> = None;
    let mut n = 0;
    for v in values {
        let s = if v.is_positive() {
            true
        } else if v.is_negative() {
            false
        } else {
            continue;
        };
        if last.is_some_and(|l| l != s) {
            n += 1;
        }
        last = Some(s);
    }
    n
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// `nu(a) - nu(b)`: an upper bound on the roots in `(a, b]`, counted with
/// multiplicity, congruent to the root count mod 2. Never an exact count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootBound {
    pub bound: i64,
    pub parity: Parity,
    pub nu_a: usize,
    pub nu_b: usize,
}

impl RootBound {
    fn new(nu_a: usize, nu_b: usize) -> Self {
        let bound = nu_a as i64 - nu_b as i64;
        RootBound {
            bound,
            parity: if bound.rem_euclid(2) == 0 {
                Parity::Even
            } else {
                Parity::Odd
            },
            nu_a,
            nu_b,
        }
    }
}

/// Values `g1(x), ..., gm(x)` from numeric tower evaluation.
pub fn sequence_values<C: Coeff>(
    seq: &SfSequence<C>,
    x: f64,
    cfg: &EvalConfig,
) -> Result<Vec<f64>, VerifyError> {
    let vals = evaluate_tower(&seq.tower, cfg, &[x])?
        .pop()
        .expect("one point");
    Ok(seq
        .pairs
        .iter()
        .map(|p| eval_elem(&p.g, x, &vals))
        .collect())
}

/// Budan-Fourier bound on the roots of the sequence's input in `(a, b]`.
///
/// Polynomial sequences are evaluated exactly; others through numeric tower
/// evaluation with `cfg` (its interval is replaced by `[a, b]`).
pub fn root_count_bound<C: Coeff>(
    seq: &SfSequence<C>,
    a: f64,
    b: f64,
    cfg: &EvalConfig,
) -> Result<RootBound, VerifyError> {
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(VerifyError::Config(format!(
            "need a < b, got a = {a}, b = {b}"
        )));
    }
    if seq.tower.is_empty() {
        let nu = |x: f64| -> usize {
            let xs = C::from_f64(x).unwrap_or_else(C::zero);
            let vals: Vec<C> = seq
                .pairs
                .iter()
                .map(|p| p.g.as_poly().expect("level 0").eval(&xs))
                .collect();
            sign_changes(&vals)
        };
        return Ok(RootBound::new(nu(a), nu(b)));
    }
    let cfg = EvalConfig {
        interval: (a, b),
        ..cfg.clone()
    };
    let va = sequence_values(seq, a, &cfg)?;
    let vb = sequence_values(seq, b, &cfg)?;
    Ok(RootBound::new(sign_changes(&va), sign_changes(&vb)))
}

/// Exact variant for polynomial sequences over the rationals.
pub fn root_count_bound_exact(
    seq: &SfSequence<Rational>,
    a: &Rational,
    b: &Rational,
) -> Option<RootBound> {
    let nu = |x: &Rational| -> Option<usize> {
        let vals = seq
            .pairs
            .iter()
            .map(|p| p.g.as_poly().map(|g| g.eval(x)))
            .collect::<Option<Vec<_>>>()?;
        Some(sign_changes(&vals))
    };
    (a < b).then_some(())?;
    Some(RootBound::new(nu(a)?, nu(b)?))
}
