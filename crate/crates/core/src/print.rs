//! Text rendering of expressions, tower elements and semi-Fourier tables.
//!
//! [`Style::Ascii`] output of expressions parses back to the same normalized
//! tree. [`Style::Unicode`] uses superscript exponents and a proper minus sign
//! and is meant for reading only.

use crate::expr::Expr;
use crate::poly::DensePoly;
use crate::scalar::Coeff;
use crate::sequence::{HMultiplier, SfPair, SfSequence, TraceEvent};
use crate::tower::{Tower, TowerElem};
use crate::Rational;

use num_traits::{One, Signed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Style {
    #[default]
    Ascii,
    Unicode,
}

impl Style {
    fn minus(self) -> &'static str {
        match self {
            Style::Ascii => "-",
            Style::Unicode => "\u{2212}",
        }
    }

    fn times(self) -> &'static str {
        match self {
            Style::Ascii => "*",
            Style::Unicode => "\u{b7}",
        }
    }

    fn power(self, base: &str, e: i64) -> String {
        if e == 1 {
            return base.to_string();
        }
        match self {
            Style::Ascii => format!("{base}^{e}"),
            Style::Unicode => format!("{base}{}", superscript(e)),
        }
    }
}

fn superscript(e: i64) -> String {
    e.to_string()
        .chars()
        .map(|c| match c {
            '-' => '\u{207b}',
            '0' => '\u{2070}',
            '1' => '\u{b9}',
            '2' => '\u{b2}',
            '3' => '\u{b3}',
            d => char::from_u32(0x2070 + d.to_digit(10).unwrap()).unwrap(),
        })
        .collect()
}

/// A signed summand: the sign is kept apart so sums can be joined with
/// ` + ` / ` - `.
struct Term {
    negative: bool,
    body: String,
}

fn join_terms(terms: &[Term], style: Style) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        match (i, t.negative) {
            (0, true) => out.push_str(style.minus()),
            (0, false) => {}
            (_, true) => {
                out.push(' ');
                out.push_str(style.minus());
                out.push(' ');
            }
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&t.body);
    }
    out
}

/// `coeff * factor` with a unit coefficient dropped.
fn scaled(coeff: &str, factor: &str, style: Style) -> String {
    match (coeff, factor) {
        (c, "") => c.to_string(),
        ("1", f) => f.to_string(),
        (c, f) => format!("{c}{}{f}", style.times()),
    }
}

fn coeff_magnitude<C: Coeff>(c: &C, style: Style) -> String {
    let s = c.abs().to_string();
    if style == Style::Unicode && s.contains('/') {
        format!("({s})")
    } else {
        s
    }
}

fn poly_terms<C: Coeff>(p: &DensePoly<C>, style: Style) -> Vec<Term> {
    p.coeffs()
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| {
            let var = if i == 0 {
                String::new()
            } else {
                style.power("x", i as i64)
            };
            Term {
                negative: c.is_negative(),
                body: scaled(&coeff_magnitude(c, style), &var, style),
            }
        })
        .collect()
}

pub fn poly_to_string<C: Coeff>(p: &DensePoly<C>, style: Style) -> String {
    join_terms(&poly_terms(p, style), style)
}

fn elem_terms<C: Coeff>(a: &TowerElem<C>, style: Style) -> Vec<Term> {
    let (level, unit, coeffs) = match a {
        TowerElem::Poly(p) => return poly_terms(p, style),
        TowerElem::Ext {
            level,
            unit,
            coeffs,
        } => (*level, *unit, coeffs),
    };
    let name = format!("f{level}");
    let mut out = Vec::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let power = i as i64 + unit;
        let sub = elem_terms(c, style);
        if power == 0 {
            out.extend(sub);
            continue;
        }
        let gen = style.power(&name, power);
        if sub.len() == 1 {
            let t = &sub[0];
            out.push(Term {
                negative: t.negative,
                body: scaled(&t.body, &gen, style),
            });
        } else {
            out.push(Term {
                negative: false,
                body: format!("({}){}{gen}", join_terms(&sub, style), style.times()),
            });
        }
    }
    out
}

/// Render a tower element with generators named `f1, f2, ...`.
pub fn elem_to_string<C: Coeff>(a: &TowerElem<C>, style: Style) -> String {
    join_terms(&elem_terms(a, style), style)
}

/// Render a multiplier as a product of generator powers, highest level
/// first, or `1`.
pub fn h_to_string(h: &HMultiplier, style: Style) -> String {
    if h.is_one() {
        return "1".into();
    }
    let parts: Vec<String> = h
        .iter()
        .rev()
        .map(|(level, e)| style.power(&format!("f{level}"), e))
        .collect();
    parts.join(style.times())
}

/// `fk = T(pk)` lines for every generator of the tower.
pub fn generator_definitions<C: Coeff>(tower: &Tower<C>, style: Style) -> Vec<String> {
    tower
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            format!(
                "f{} = {}({})",
                i + 1,
                g.kind.name(),
                elem_to_string(&g.arg, style)
            )
        })
        .collect()
}

fn pair_rows<C: Coeff>(pairs: &[SfPair<C>], style: Style) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|p| (elem_to_string(&p.g, style), h_to_string(&p.h, style)))
        .collect()
}

/// Three-column table `i | g_i | h_i`, followed by the generator definitions.
pub fn sequence_table<C: Coeff>(seq: &SfSequence<C>, style: Style) -> String {
    let rows = pair_rows(&seq.pairs, style);
    let wi = rows.len().to_string().len().max(1);
    let wg = rows
        .iter()
        .map(|(g, _)| g.chars().count())
        .max()
        .unwrap_or(0)
        .max(3);
    let mut out = format!("{:>wi$} | {:<wg$} | h_i\n", "i", "g_i");
    for (i, (g, h)) in rows.iter().enumerate() {
        let pad = wg - g.chars().count();
        out.push_str(&format!("{:>wi$} | {g}{} | {h}\n", i + 1, " ".repeat(pad)));
    }
    let defs = generator_definitions(&seq.tower, style);
    if !defs.is_empty() {
        out.push_str("where\n");
        for d in defs {
            out.push_str("  ");
            out.push_str(&d);
            out.push('\n');
        }
    }
    out
}

/// Nested call trace: each non-polynomial call prints `In_k` on entry and
/// its output rows as `Out_k` on exit, indented by nesting depth.
/// Calls on level-0 inputs (plain Fourier sequences) are not shown.
pub fn trace_to_string<C: Coeff>(events: &[TraceEvent<C>], style: Style) -> String {
    let mut out = String::new();
    let mut counter = 0usize;
    let mut open: Vec<usize> = Vec::new();
    // Shown calls nest inside each other; hidden level-0 calls are leaves.
    let mut depth_shift: Vec<bool> = Vec::new();
    for ev in events {
        match ev {
            TraceEvent::Enter { input } => {
                let shown = input.level() > 0;
                depth_shift.push(shown);
                if shown {
                    counter += 1;
                    open.push(counter);
                    let indent = "|    ".repeat(open.len() - 1);
                    out.push_str(&format!(
                        "{indent}In{counter} = {}\n",
                        elem_to_string(input, style)
                    ));
                }
            }
            TraceEvent::Exit { pairs } => {
                if depth_shift.pop() != Some(true) {
                    continue;
                }
                let id = open.pop().expect("balanced trace");
                let indent = "|    ".repeat(open.len());
                let rows = pair_rows(pairs, style);
                let wg = rows
                    .iter()
                    .map(|(g, _)| g.chars().count())
                    .max()
                    .unwrap_or(0);
                out.push_str(&format!("{indent}Out{id} =\n"));
                for (g, h) in rows {
                    let pad = wg - g.chars().count();
                    out.push_str(&format!("{indent}    {g}{} | {h}\n", " ".repeat(pad)));
                }
            }
        }
    }
    out
}

/// Precedence context for expression printing.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    Factor,
    Base,
}

pub fn expr_to_string(e: &Expr, style: Style) -> String {
    expr_fmt(e, style, Ctx::Top)
}

fn const_to_string(c: &Rational, style: Style) -> String {
    let s = c.abs().to_string();
    if c.is_negative() {
        format!("{}{s}", style.minus())
    } else {
        s
    }
}

/// Split a term into sign and magnitude for printing inside a sum.
fn term_sign(e: &Expr) -> (bool, Expr) {
    match e {
        Expr::Const(c) if c.is_negative() => (true, Expr::Const(-c.clone())),
        Expr::Product(fs) => match fs.first() {
            Some(Expr::Const(c)) if c.is_negative() => {
                let mut rest = fs.clone();
                rest[0] = Expr::Const(-c.clone());
                if rest[0].is_one() {
                    rest.remove(0);
                }
                let body = if rest.len() == 1 {
                    rest.pop().unwrap()
                } else {
                    Expr::Product(rest)
                };
                (true, body)
            }
            _ => (false, e.clone()),
        },
        _ => (false, e.clone()),
    }
}

fn expr_fmt(e: &Expr, style: Style, ctx: Ctx) -> String {
    match e {
        Expr::Var => "x".into(),
        Expr::Const(c) => {
            let s = const_to_string(c, style);
            let compound = c.is_negative() || !c.denom().is_one();
            if compound && ctx != Ctx::Top {
                format!("({s})")
            } else {
                s
            }
        }
        Expr::Sum(children) => {
            let terms: Vec<Term> = children
                .iter()
                .map(|c| {
                    let (negative, body) = term_sign(c);
                    Term {
                        negative,
                        body: expr_fmt(&body, style, Ctx::Top),
                    }
                })
                .collect();
            let s = join_terms(&terms, style);
            if ctx == Ctx::Top {
                s
            } else {
                format!("({s})")
            }
        }
        Expr::Product(children) => {
            let s = product_fmt(children, style);
            if ctx == Ctx::Base || (ctx == Ctx::Factor && s.starts_with(style.minus())) {
                format!("({s})")
            } else {
                s
            }
        }
        Expr::Inv(a) | Expr::Exp(a) | Expr::Int(a) => {
            let (kind, _) = e.as_t().unwrap();
            format!("{}({})", kind.name(), expr_fmt(a, style, Ctx::Top))
        }
    }
}

fn product_fmt(children: &[Expr], style: Style) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut lead = String::new();
    let mut rest = children;
    if let Some(Expr::Const(c)) = children.first() {
        rest = &children[1..];
        if rest.is_empty() {
            return const_to_string(c, style);
        }
        if c == &-Rational::one() {
            lead = style.minus().to_string();
        } else if c.is_negative() {
            lead = style.minus().to_string();
            parts.push(c.abs().to_string());
        } else {
            parts.push(c.to_string());
        }
    }
    let mut i = 0;
    while i < rest.len() {
        let mut j = i + 1;
        while j < rest.len() && rest[j] == rest[i] {
            j += 1;
        }
        let count = (j - i) as i64;
        if count == 1 {
            parts.push(expr_fmt(&rest[i], style, Ctx::Factor));
        } else {
            parts.push(style.power(&expr_fmt(&rest[i], style, Ctx::Base), count));
        }
        i = j;
    }
    format!("{lead}{}", parts.join(style.times()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::x()
    }

    #[test]
    fn polynomial_rendering() {
        let p: DensePoly<Rational> =
            DensePoly::from_ints(&[1568, 0, -11968, 0, 12192, 0, -3392, 0, 256]);
        assert_eq!(
            poly_to_string(&p, Style::Ascii),
            "256*x^8 - 3392*x^6 + 12192*x^4 - 11968*x^2 + 1568"
        );
        assert_eq!(
            poly_to_string(&DensePoly::<Rational>::from_ints(&[0, -1]), Style::Ascii),
            "-x"
        );
        assert_eq!(
            poly_to_string(&DensePoly::<Rational>::zero(), Style::Ascii),
            "0"
        );
        assert_eq!(
            poly_to_string(
                &DensePoly::<Rational>::from_ints(&[2, 0, -1]),
                Style::Unicode
            ),
            "\u{2212}x\u{b2} + 2"
        );
    }

    #[test]
    fn expression_rendering() {
        let e = Expr::exp(x() * Expr::int(Expr::exp(-x().pow(2))))
            - Expr::int(Expr::exp(-x().pow(2)))
            - 3.into();
        assert_eq!(
            expr_to_string(&e, Style::Ascii),
            "exp(x*int(exp(-x^2))) - int(exp(-x^2)) - 3"
        );
        let half = Expr::Const(Rational::new(1.into(), 2.into()));
        assert_eq!(expr_to_string(&(half * x()), Style::Ascii), "1/2*x");
        assert_eq!(
            expr_to_string(&Expr::inv(x() + 1.into()).pow(2), Style::Ascii),
            "inv(x + 1)^2"
        );
    }

    #[test]
    fn superscripts() {
        assert_eq!(superscript(-12), "\u{207b}\u{b9}\u{b2}");
        assert_eq!(superscript(4), "\u{2074}");
    }
}
