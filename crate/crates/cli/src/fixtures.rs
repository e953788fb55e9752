//! Bundled fixture corpus with golden tables.

pub struct Fixture {
    pub name: &'static str,
    pub expr: &'static str,
    pub table: &'static str,
}

macro_rules! fixture {
    ($name:literal) => {
        Fixture {
            name: $name,
            expr: include_str!(concat!("../fixtures/", $name, ".expr")),
            table: include_str!(concat!("../fixtures/", $name, ".table")),
        }
    };
}

pub const ALL: [Fixture; 7] = [
    fixture!("example-1"),
    fixture!("exp"),
    fixture!("exp-inv"),
    fixture!("toy"),
    fixture!("exp-log"),
    fixture!("arccos"),
    fixture!("exp-int"),
];

/// Drop `#` comment lines and join the rest into one expression.
pub fn strip_comments(text: &str) -> String {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join(" ")
}
