//! Numeric evaluation of towers.
//!
//! `exp` and `inv` generators are evaluated pointwise from their arguments.
//! `int` generators are integrated as one coupled ODE system from the base
//! point with an adaptive fourth-order Runge-Kutta scheme using step
//! doubling for error control.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{Expr, TKind};
use crate::scalar::{Coeff, Real};
use crate::tower::{Tower, TowerElem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("argument of f{level} vanishes near x = {at}")]
    Singularity { at: f64, level: usize },
    #[error("step size underflow near x = {at}")]
    StepUnderflow { at: f64 },
    #[error("expression node {0} has no generator")]
    MissingGenerator(String),
}

impl EvalError {
    /// Location of the failure.
    pub fn at(&self) -> Option<f64> {
        match self {
            EvalError::Singularity { at, .. } | EvalError::StepUnderflow { at } => Some(*at),
            EvalError::MissingGenerator(_) => None,
        }
    }
}

/// Settings for numeric evaluation and verification.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalConfig {
    /// Where every `int` generator takes its configured constant. `None`
    /// picks 0 when it lies in the interval and the left end otherwise.
    pub base_point: Option<f64>,
    /// Value of `int` generator `level` at the base point (default 0).
    pub constants: BTreeMap<usize, f64>,
    pub interval: (f64, f64),
    pub samples: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    /// Local error tolerance of the ODE integrator.
    pub ode_tol: f64,
    /// Half-width of the centered finite difference.
    pub fd_step: f64,
    /// Relative agreement required between finite and symbolic derivatives.
    pub fd_tol: f64,
    /// Samples where a multiplier factor or an `inv` argument is smaller than
    /// `guard` times its magnitude bound are discarded.
    pub guard: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            base_point: None,
            constants: BTreeMap::new(),
            interval: (-1.0, 1.0),
            samples: 20,
            abs_tol: 1e-9,
            rel_tol: 1e-6,
            initial_step: 1e-3,
            max_step: 0.05,
            ode_tol: 1e-12,
            fd_step: 1e-5,
            fd_tol: 1e-4,
            guard: 1e-8,
        }
    }
}

impl EvalConfig {
    pub fn with_interval(a: f64, b: f64) -> Self {
        EvalConfig {
            interval: (a, b),
            ..Self::default()
        }
    }

    pub fn base(&self) -> f64 {
        let (a, b) = self.interval;
        self.base_point
            .unwrap_or(if a <= 0.0 && 0.0 <= b { 0.0 } else { a })
    }

    /// `samples` equally spaced points covering the closed interval.
    pub fn sample_points(&self) -> Vec<f64> {
        let (a, b) = self.interval;
        let n = self.samples.max(2);
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Value of `a` given `x` and the values of all generators.
pub fn eval_elem<C: Coeff, R: Real>(a: &TowerElem<C>, x: R, vals: &[R]) -> R {
    match a {
        TowerElem::Poly(p) => p.eval_real(x),
        TowerElem::Ext {
            level,
            unit,
            coeffs,
        } => {
            let v = vals[level - 1];
            let mut acc = R::zero();
            for c in coeffs.iter().rev() {
                acc = acc * v + eval_elem(c, x, vals);
            }
            acc * v.powi(*unit as i32)
        }
    }
}

/// Value of `a` with every coefficient, `x` and generator value replaced by
/// its absolute value: a bound on the size of the terms summed by
/// [`eval_elem`].
pub fn eval_abs<C: Coeff, R: Real>(a: &TowerElem<C>, x: R, vals: &[R]) -> R {
    match a {
        TowerElem::Poly(p) => p.eval_abs(x),
        TowerElem::Ext {
            level,
            unit,
            coeffs,
        } => {
            let v = vals[level - 1].abs();
            let mut acc = R::zero();
            for c in coeffs.iter().rev() {
                acc = acc * v + eval_abs(c, x, vals);
            }
            acc * v.powi(*unit as i32)
        }
    }
}

/// Value of an expression, reading `int` nodes (and any other node that is
/// a generator origin) from `vals`.
pub fn eval_expr<C: Coeff, R: Real>(
    e: &Expr,
    tower: &Tower<C>,
    x: R,
    vals: &[R],
) -> Result<R, EvalError> {
    if e.as_t().is_some() {
        if let Some(k) = tower.generators().iter().position(|g| &g.origin == e) {
            return Ok(vals[k]);
        }
    }
    Ok(match e {
        Expr::Var => x,
        Expr::Const(c) => R::from_f64_lossy(c.to_f64_lossy()),
        Expr::Sum(cs) => cs
            .iter()
            .try_fold(R::zero(), |acc, c| Ok(acc + eval_expr(c, tower, x, vals)?))?,
        Expr::Product(cs) => cs
            .iter()
            .try_fold(R::one(), |acc, c| Ok(acc * eval_expr(c, tower, x, vals)?))?,
        Expr::Inv(a) => eval_expr(a, tower, x, vals)?.recip(),
        Expr::Exp(a) => eval_expr(a, tower, x, vals)?.exp(),
        Expr::Int(_) => {
            return Err(EvalError::MissingGenerator(crate::print::expr_to_string(
                e,
                crate::print::Style::Ascii,
            )))
        }
    })
}

/// Levels each generator's value depends on, transitively.
fn dependencies<C: Coeff>(tower: &Tower<C>) -> Vec<Vec<bool>> {
    fn mark<C: Coeff>(a: &TowerElem<C>, out: &mut [bool]) {
        if let TowerElem::Ext { level, coeffs, .. } = a {
            out[level - 1] = true;
            coeffs.iter().for_each(|c| mark(c, out));
        }
    }
    let r = tower.len();
    let mut deps: Vec<Vec<bool>> = Vec::with_capacity(r);
    for k in 0..r {
        let mut d = vec![false; r];
        mark(&tower.generators()[k].arg, &mut d);
        for j in 0..k {
            if d[j] {
                let inherited = deps[j].clone();
                d.iter_mut().zip(inherited).for_each(|(a, b)| *a |= b);
            }
        }
        deps.push(d);
    }
    deps
}

/// Coupled ODE view of a tower.
struct System<'a, C> {
    tower: &'a Tower<C>,
    /// Levels of the `int` generators, in order; the ODE state follows it.
    ints: Vec<usize>,
    /// Levels of `inv` generators that some `int` generator depends on.
    blocking: Vec<bool>,
}

/// Generator values at one point, with the `inv` arguments used.
struct Point<R> {
    vals: Vec<R>,
    inv_args: Vec<(usize, R)>,
}

impl<'a, C: Coeff> System<'a, C> {
    fn new(tower: &'a Tower<C>) -> Self {
        let ints: Vec<usize> = (1..=tower.len())
            .filter(|&l| tower.kind(l) == TKind::Int)
            .collect();
        let deps = dependencies(tower);
        let blocking = (1..=tower.len())
            .map(|j| tower.kind(j) == TKind::Inv && ints.iter().any(|&k| deps[k - 1][j - 1]))
            .collect();
        System {
            tower,
            ints,
            blocking,
        }
    }

    fn fill<R: Real>(&self, x: R, y: &[R]) -> Point<R> {
        let mut vals = Vec::with_capacity(self.tower.len());
        let mut inv_args = Vec::new();
        let mut next_int = 0;
        for (k, g) in self.tower.generators().iter().enumerate() {
            let v = match g.kind {
                TKind::Int => {
                    next_int += 1;
                    y[next_int - 1]
                }
                TKind::Exp => eval_elem(&g.arg, x, &vals).exp(),
                TKind::Inv => {
                    let a = eval_elem(&g.arg, x, &vals);
                    inv_args.push((k + 1, a));
                    a.recip()
                }
            };
            vals.push(v);
        }
        Point { vals, inv_args }
    }

    fn rhs<R: Real>(&self, x: R, y: &[R]) -> Vec<R> {
        let p = self.fill(x, y);
        self.ints
            .iter()
            .map(|&l| eval_elem(&self.tower.gen(l).arg, x, &p.vals))
            .collect()
    }

    fn rk4<R: Real>(&self, x: R, y: &[R], h: R) -> Vec<R> {
        let two = R::from_f64_lossy(2.0);
        let six = R::from_f64_lossy(6.0);
        let axpy = |y: &[R], k: &[R], s: R| -> Vec<R> {
            y.iter().zip(k).map(|(a, b)| *a + *b * s).collect()
        };
        let k1 = self.rhs(x, y);
        let k2 = self.rhs(x + h / two, &axpy(y, &k1, h / two));
        let k3 = self.rhs(x + h / two, &axpy(y, &k2, h / two));
        let k4 = self.rhs(x + h, &axpy(y, &k3, h));
        (0..y.len())
            .map(|i| y[i] + h / six * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
            .collect()
    }
}

/// Outcome of walking from the base point through a list of points.
pub(crate) struct Walk<R> {
    /// Generator values per requested point, in request order.
    pub values: Vec<Result<Vec<R>, EvalError>>,
    /// Sign changes of `inv` arguments crossed on the way.
    pub crossings: Vec<EvalError>,
}

/// Walk from the base point to every point. With `strict`, any `inv`
/// argument sign change stops the walk in that direction; otherwise only
/// those feeding an `int` generator do, and the rest are recorded.
pub(crate) fn walk<C: Coeff, R: Real>(
    tower: &Tower<C>,
    cfg: &EvalConfig,
    points: &[R],
    strict: bool,
) -> Walk<R> {
    let sys = System::new(tower);
    let x0 = R::from_f64_lossy(cfg.base());
    let y0: Vec<R> = sys
        .ints
        .iter()
        .map(|l| R::from_f64_lossy(cfg.constants.get(l).copied().unwrap_or(0.0)))
        .collect();
    let mut values: Vec<Option<Result<Vec<R>, EvalError>>> = vec![None; points.len()];
    let mut crossings = Vec::new();
    for forward in [true, false] {
        let mut idx: Vec<usize> = (0..points.len())
            .filter(|&i| {
                if forward {
                    points[i] >= x0
                } else {
                    points[i] < x0
                }
            })
            .collect();
        idx.sort_by(|&i, &j| {
            let (a, b) = (points[i], points[j]);
            if forward {
                a.partial_cmp(&b)
            } else {
                b.partial_cmp(&a)
            }
            .unwrap()
        });
        let mut x = x0;
        let mut y = y0.clone();
        let mut h = R::from_f64_lossy(cfg.initial_step);
        let mut failure: Option<EvalError> = None;
        for &i in &idx {
            if failure.is_none() {
                if let Err(e) = advance(
                    &sys,
                    cfg,
                    &mut x,
                    &mut y,
                    &mut h,
                    points[i],
                    strict,
                    &mut crossings,
                ) {
                    failure = Some(e);
                }
            }
            values[i] = Some(match &failure {
                Some(e) => Err(e.clone()),
                None => Ok(sys.fill(x, &y).vals),
            });
        }
    }
    Walk {
        values: values
            .into_iter()
            .map(|v| v.expect("every point visited"))
            .collect(),
        crossings,
    }
}

fn sign_flip<R: Real>(a: R, b: R) -> bool {
    (a < R::zero() && b > R::zero())
        || (a > R::zero() && b < R::zero())
        || (a == R::zero()) != (b == R::zero())
}

#[allow(clippy::too_many_arguments)]
fn advance<C: Coeff, R: Real>(
    sys: &System<'_, C>,
    cfg: &EvalConfig,
    x: &mut R,
    y: &mut Vec<R>,
    h: &mut R,
    target: R,
    strict: bool,
    crossings: &mut Vec<EvalError>,
) -> Result<(), EvalError> {
    let tol = R::from_f64_lossy(cfg.ode_tol);
    let max_step = R::from_f64_lossy(cfg.max_step);
    let fifteen = R::from_f64_lossy(15.0);
    let half = R::from_f64_lossy(0.5);
    let mut here = sys.fill(*x, y);
    while *x != target {
        let dir = if target > *x { R::one() } else { -R::one() };
        let remaining = (target - *x).abs();
        let step = h.abs().min(remaining).min(max_step) * dir;
        let full = sys.rk4(*x, y, step);
        let mid = sys.rk4(*x, y, step * half);
        let two = sys.rk4(*x + step * half, &mid, step * half);
        let mut err = R::zero();
        for (a, b) in full.iter().zip(&two) {
            let e = (*a - *b).abs() / (R::one() + b.abs());
            err = if e.is_finite() {
                err.max(e)
            } else {
                R::infinity()
            };
        }
        let ratio = err / tol;
        if ratio <= R::one() {
            let next_x = if step.abs() == remaining {
                target
            } else {
                *x + step
            };
            let next_y: Vec<R> = two
                .iter()
                .zip(&full)
                .map(|(b, a)| *b + (*b - *a) / fifteen)
                .collect();
            let there = sys.fill(next_x, &next_y);
            for ((level, a), (_, b)) in here.inv_args.iter().zip(&there.inv_args) {
                if sign_flip(*a, *b) {
                    let at = locate(*x, next_x, *a, *b).to_f64().unwrap_or(f64::NAN);
                    let err = EvalError::Singularity { at, level: *level };
                    if strict || sys.blocking[level - 1] {
                        return Err(err);
                    }
                    crossings.push(err);
                }
            }
            *x = next_x;
            *y = next_y;
            here = there;
            let grow = if ratio == R::zero() {
                R::from_f64_lossy(5.0)
            } else {
                (R::from_f64_lossy(0.9) * ratio.powf(R::from_f64_lossy(-0.2)))
                    .min(R::from_f64_lossy(5.0))
            };
            *h = step.abs() * grow.max(R::from_f64_lossy(0.2));
        } else {
            let shrink = if ratio.is_finite() {
                (R::from_f64_lossy(0.9) * ratio.powf(R::from_f64_lossy(-0.2)))
                    .max(R::from_f64_lossy(0.1))
            } else {
                R::from_f64_lossy(0.1)
            };
            *h = step.abs() * shrink;
            if *h < R::from_f64_lossy(1e-13) * (R::one() + x.abs()) {
                return Err(EvalError::StepUnderflow {
                    at: x.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    Ok(())
}

/// Linear estimate of the zero between two argument values.
fn locate<R: Real>(xa: R, xb: R, a: R, b: R) -> R {
    let d = a - b;
    if d == R::zero() || !d.is_finite() {
        return (xa + xb) / R::from_f64_lossy(2.0);
    }
    xa + (xb - xa) * a / d
}

/// Values of every generator at every point (`result[i][k - 1]` is `fk` at
/// `points[i]`). Fails on the first `inv` argument sign change along the
/// integration path.
pub fn evaluate_tower<C: Coeff, R: Real>(
    tower: &Tower<C>,
    cfg: &EvalConfig,
    points: &[R],
) -> Result<Vec<Vec<R>>, EvalError> {
    walk(tower, cfg, points, true).values.into_iter().collect()
}
