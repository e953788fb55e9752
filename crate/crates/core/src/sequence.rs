//! Semi-Fourier sequences.
//!
//! A semi-Fourier sequence of `f` is a list of pairs `(g1, h1), ..., (gm, hm)`
//! of tower elements with positive multipliers `hk` such that
//!
//! * `f * h1 = g1`,
//! * `D(gk) * h(k+1) = g(k+1)`,
//! * `D(gm) = 0`.
//!
//! [`etsf`] builds one by recursion on the top generator of the input; every
//! recursive call is made on an element of strictly smaller degree index, and
//! that descent is checked at each call site.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::expr::{collect_t_subexpressions, Expr, TKind};
use crate::scalar::Coeff;
use crate::tower::{et, order_generators, DegreeIndex, Tower, TowerElem, TowerError};
use crate::Rational;

/// Default work limit. Work is measured in machine words of the
/// coefficients an operation touches (a product charges the product of its
/// operand sizes), so the limit tracks coefficient growth and not just the
/// number of steps.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Product of generator powers `prod fj^ej`.
///
/// Exponents at `exp` levels may have either sign. At an `inv` level
/// `fj = inv(tj)` only negative exponents occur, so `fj^-n = tj^n` is a
/// polynomial in the lower generators. `int` generators never occur.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HMultiplier {
    exps: BTreeMap<usize, i64>,
}

impl HMultiplier {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Multiply by `f_level^e`.
    pub fn mul_gen(&mut self, level: usize, e: i64) {
        let slot = self.exps.entry(level).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.exps.remove(&level);
        }
    }

    pub fn exponent(&self, level: usize) -> i64 {
        self.exps.get(&level).copied().unwrap_or(0)
    }

    /// `(level, exponent)` in increasing level order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (usize, i64)> + '_ {
        self.exps.iter().map(|(&l, &e)| (l, e))
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut h = Self::one();
        for (l, e) in pairs {
            h.mul_gen(l, e);
        }
        h
    }
}

impl fmt::Display for HMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::print::h_to_string(self, crate::print::Style::Ascii))
    }
}

impl<C: Coeff> Tower<C> {
    /// `h` as a tower element; `inv` factors become powers of their argument.
    pub fn h_elem(&self, h: &HMultiplier) -> TowerElem<C> {
        h.iter().fold(TowerElem::one(), |acc, (level, e)| {
            let factor = match self.kind(level) {
                TKind::Inv if e < 0 => self.pow(&self.gen(level).arg, (-e) as u32),
                _ => self.gen_power(level, e),
            };
            self.mul(&acc, &factor)
        })
    }

    /// Whether `h` only uses generator powers that are legal multipliers.
    pub fn h_is_legal(&self, h: &HMultiplier) -> bool {
        h.iter().all(|(level, e)| {
            level >= 1
                && level <= self.len()
                && match self.kind(level) {
                    TKind::Exp => true,
                    TKind::Inv => e < 0,
                    TKind::Int => false,
                }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SfPair<C> {
    pub g: TowerElem<C>,
    pub h: HMultiplier,
}

/// A semi-Fourier sequence together with the tower it lives in.
#[derive(Clone, Debug, PartialEq)]
pub struct SfSequence<C> {
    pub tower: Tower<C>,
    /// The element the sequence was computed for.
    pub input: TowerElem<C>,
    /// Source expression, when the sequence came from one.
    pub source: Option<Expr>,
    pub pairs: Vec<SfPair<C>>,
}

impl<C: Coeff> SfSequence<C> {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pair `i`, 1-based as in `(g_i, h_i)`.
    pub fn pair(&self, i: usize) -> &SfPair<C> {
        &self.pairs[i - 1]
    }

    pub fn last(&self) -> &SfPair<C> {
        self.pairs.last().expect("sequences are nonempty")
    }
}

/// The five places where the recursion calls itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CallSite {
    /// `inv` level: the input multiplied through by the argument power.
    R1,
    /// `exp` level: the constant coefficient `a0`.
    R2,
    /// `exp` level: the remaining tail after the first pass.
    R3,
    /// `int` level: the leading coefficient `an`.
    R4,
    /// `int` level: the remaining tail after the first pass.
    R5,
}

impl fmt::Display for CallSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CallSite::R1 => "r1",
            CallSite::R2 => "r2",
            CallSite::R3 => "r3",
            CallSite::R4 => "r4",
            CallSite::R5 => "r5",
        };
        f.write_str(s)
    }
}

/// One recursive call, with the degree indices on both sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CallRecord {
    pub site: CallSite,
    pub parent: DegreeIndex,
    pub child: DegreeIndex,
}

/// `true` when a call from `parent` to `child` strictly descends.
pub fn descent_witness(_site: CallSite, parent: DegreeIndex, child: DegreeIndex) -> bool {
    child < parent
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SfError {
    #[error("work budget of {limit} exhausted")]
    Budget { limit: u64 },
    #[error("recursive call at {site} does not descend: {parent} -> {child}")]
    Descent {
        site: CallSite,
        parent: DegreeIndex,
        child: DegreeIndex,
    },
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Entry and exit of one recursive call, in execution order.
#[derive(Clone, Debug, PartialEq)]
pub enum TraceEvent<C> {
    Enter { input: TowerElem<C> },
    Exit { pairs: Vec<SfPair<C>> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EtsfOptions {
    pub budget: u64,
    pub trace: bool,
}

impl Default for EtsfOptions {
    fn default() -> Self {
        EtsfOptions {
            budget: DEFAULT_BUDGET,
            trace: false,
        }
    }
}

/// Result of an instrumented run.
#[derive(Clone, Debug)]
pub struct EtsfRun<C> {
    pub pairs: Vec<SfPair<C>>,
    pub calls: Vec<CallRecord>,
    pub trace: Vec<TraceEvent<C>>,
    pub work: u64,
}

struct Runner<'a, C> {
    tower: &'a Tower<C>,
    budget: u64,
    work: u64,
    calls: Vec<CallRecord>,
    trace: Option<Vec<TraceEvent<C>>>,
}

/// Semi-Fourier sequence of a tower element.
pub fn etsf<C: Coeff>(tower: &Tower<C>, f: &TowerElem<C>) -> Result<Vec<SfPair<C>>, SfError> {
    etsf_with(tower, f, &EtsfOptions::default()).map(|r| r.pairs)
}

/// [`etsf`] with a step budget, call records and an optional trace.
pub fn etsf_with<C: Coeff>(
    tower: &Tower<C>,
    f: &TowerElem<C>,
    opts: &EtsfOptions,
) -> Result<EtsfRun<C>, SfError> {
    let mut r = Runner {
        tower,
        budget: opts.budget,
        work: 0,
        calls: Vec::new(),
        trace: opts.trace.then(Vec::new),
    };
    let pairs = r.run(f)?;
    Ok(EtsfRun {
        pairs,
        calls: r.calls,
        trace: r.trace.unwrap_or_default(),
        work: r.work,
    })
}

/// Semi-Fourier sequence of an expression: build its tower, convert, recurse.
pub fn eisf(e: &Expr) -> Result<SfSequence<Rational>, SfError> {
    eisf_with(e, &EtsfOptions::default()).map(|(seq, _)| seq)
}

/// [`eisf`] returning the instrumented run alongside the sequence.
pub fn eisf_with(
    e: &Expr,
    opts: &EtsfOptions,
) -> Result<(SfSequence<Rational>, EtsfRun<Rational>), SfError> {
    let gens = order_generators(&collect_t_subexpressions(e))?;
    let (mut elems, tower) = et(std::slice::from_ref(e), &gens)?;
    let input = elems.pop().expect("one input");
    let run = etsf_with(&tower, &input, opts)?;
    let seq = SfSequence {
        pairs: run.pairs.clone(),
        tower,
        input,
        source: Some(e.clone()),
    };
    Ok((seq, run))
}

/// Machine words stored in the coefficients of `a`.
fn size<C: Coeff>(a: &TowerElem<C>) -> u64 {
    a.leaves()
        .iter()
        .flat_map(|l| l.coeffs())
        .map(Coeff::words)
        .sum::<u64>()
        .max(1)
}

fn pair<C>(g: TowerElem<C>, h: HMultiplier) -> SfPair<C> {
    SfPair { g, h }
}

impl<C: Coeff> Runner<'_, C> {
    /// Charge for multiplying every element of `elems` by `factor` and
    /// differentiating it.
    fn charge<'e>(
        &mut self,
        elems: impl IntoIterator<Item = &'e TowerElem<C>>,
        factor: &TowerElem<C>,
    ) -> Result<(), SfError>
    where
        C: 'e,
    {
        let total: u64 = elems.into_iter().map(size).sum();
        self.work = self.work.saturating_add(total.saturating_mul(size(factor)));
        if self.work > self.budget {
            return Err(SfError::Budget { limit: self.budget });
        }
        Ok(())
    }

    fn child(
        &mut self,
        site: CallSite,
        parent: &TowerElem<C>,
        child: &TowerElem<C>,
    ) -> Result<Vec<SfPair<C>>, SfError> {
        let rec = CallRecord {
            site,
            parent: parent.degree_index(),
            child: child.degree_index(),
        };
        self.calls.push(rec);
        if !descent_witness(site, rec.parent, rec.child) {
            return Err(SfError::Descent {
                site,
                parent: rec.parent,
                child: rec.child,
            });
        }
        self.run(child)
    }

    fn run(&mut self, f: &TowerElem<C>) -> Result<Vec<SfPair<C>>, SfError> {
        self.charge([f], &TowerElem::one())?;
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceEvent::Enter { input: f.clone() });
        }
        let out = match f {
            TowerElem::Poly(_) => self.fourier(f)?,
            TowerElem::Ext {
                level,
                unit,
                coeffs,
            } => match self.tower.kind(*level) {
                TKind::Inv => self.inv_case(f, *level, coeffs)?,
                TKind::Int => self.int_case(f, *level, coeffs)?,
                TKind::Exp => self.exp_case(f, *level, *unit, coeffs)?,
            },
        };
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceEvent::Exit { pairs: out.clone() });
        }
        Ok(out)
    }

    /// Polynomial in `x`: the derivatives down to a constant.
    fn fourier(&mut self, f: &TowerElem<C>) -> Result<Vec<SfPair<C>>, SfError> {
        let mut out = vec![pair(f.clone(), HMultiplier::one())];
        let mut g = f.clone();
        while g.degree_index().degree > 0 {
            self.charge([&g], &TowerElem::one())?;
            g = self.tower.diff(&g);
            out.push(pair(g.clone(), HMultiplier::one()));
        }
        Ok(out)
    }

    /// `fk = inv(g)`: multiply by `g^n` to clear `fk`.
    fn inv_case(
        &mut self,
        f: &TowerElem<C>,
        level: usize,
        coeffs: &[TowerElem<C>],
    ) -> Result<Vec<SfPair<C>>, SfError> {
        let tw = self.tower;
        let g = &tw.gen(level).arg;
        let n = coeffs.len() - 1;
        self.charge(coeffs, g)?;
        let t = coeffs
            .iter()
            .fold(TowerElem::zero(), |acc, c| tw.add(&tw.mul(&acc, g), c));
        let mut out = self.child(CallSite::R1, f, &t)?;
        out[0].h.mul_gen(level, -(n as i64));
        Ok(out)
    }

    /// `fk = int(g)`: differentiate along the sequence of the leading
    /// coefficient, then recurse on what is left below degree `n`.
    fn int_case(
        &mut self,
        f: &TowerElem<C>,
        level: usize,
        coeffs: &[TowerElem<C>],
    ) -> Result<Vec<SfPair<C>>, SfError> {
        let tw = self.tower;
        let g = &tw.gen(level).arg;
        let n = coeffs.len() - 1;
        let lead = self.child(CallSite::R4, f, &coeffs[n])?;
        let mut c: Vec<TowerElem<C>> = coeffs[..n].to_vec();
        let mut out = Vec::with_capacity(lead.len());
        for p in &lead {
            let h = tw.h_elem(&p.h);
            self.charge(c.iter().chain([&p.g]), &h)?;
            self.charge(c.iter().chain([&p.g]), g)?;
            let ch: Vec<TowerElem<C>> = c.iter().map(|ci| tw.mul(ci, &h)).collect();
            let mut all = ch.clone();
            all.push(p.g.clone());
            out.push(pair(tw.make(level, 0, all), p.h.clone()));
            c = (0..n)
                .map(|i| {
                    let carry = if i + 1 < n { &ch[i + 1] } else { &p.g };
                    let carry = tw.scale_int(&tw.mul(carry, g), (i + 1) as i64);
                    tw.add(&tw.diff(&ch[i]), &carry)
                })
                .collect();
        }
        let Some(top) = c.iter().rposition(|ci| !ci.is_zero()) else {
            return Ok(out);
        };
        c.truncate(top + 1);
        let t = tw.make(level, 0, c);
        out.extend(self.child(CallSite::R5, f, &t)?);
        Ok(out)
    }

    /// `fk = exp(g)`, `f = fk^u (a0 + a1 fk + ... + an fk^n)`: differentiate
    /// along the sequence of `a0`, then recurse on the remaining tail divided
    /// by its lowest power of `fk`.
    fn exp_case(
        &mut self,
        f: &TowerElem<C>,
        level: usize,
        unit: i64,
        coeffs: &[TowerElem<C>],
    ) -> Result<Vec<SfPair<C>>, SfError> {
        let tw = self.tower;
        let dg = &tw.gen(level).arg_diff;
        let n = coeffs.len() - 1;
        let base = self.child(CallSite::R2, f, &coeffs[0])?;
        // c[i - 1] holds the coefficient of fk^i.
        let mut c: Vec<TowerElem<C>> = coeffs[1..].to_vec();
        let mut out = Vec::with_capacity(base.len());
        for p in &base {
            let h = tw.h_elem(&p.h);
            self.charge(c.iter().chain([&p.g]), &h)?;
            self.charge(c.iter(), dg)?;
            let ch: Vec<TowerElem<C>> = c.iter().map(|ci| tw.mul(ci, &h)).collect();
            let mut all = Vec::with_capacity(n + 1);
            all.push(p.g.clone());
            all.extend(ch.iter().cloned());
            out.push(pair(tw.make(level, 0, all), p.h.clone()));
            c = ch
                .iter()
                .enumerate()
                .map(|(k, chi)| {
                    let carry = tw.scale_int(&tw.mul(chi, dg), (k + 1) as i64);
                    tw.add(&tw.diff(chi), &carry)
                })
                .collect();
        }
        out[0].h.mul_gen(level, -unit);
        let Some(low) = c.iter().position(|ci| !ci.is_zero()) else {
            return Ok(out);
        };
        let shift = low + 1;
        let t = tw.make(level, 0, c[low..].to_vec());
        let mut tail = self.child(CallSite::R3, f, &t)?;
        tail[0].h.mul_gen(level, -(shift as i64));
        out.extend(tail);
        Ok(out)
    }
}
