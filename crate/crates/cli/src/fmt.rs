//! Number formatting and grid parsing shared by the subcommands.

use std::str::FromStr;

use serde_json::{Number, Value};

/// C's `%.17g`: 17 significant digits, trailing zeros dropped.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-4..17).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn opt_g17(x: Option<f64>) -> String {
    x.map(g17).unwrap_or_default()
}

/// Rewrites every float in a JSON tree with 17 significant digits;
/// non-finite floats become null.
pub fn json_g17(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                return Value::Number(n);
            }
            match n.as_f64() {
                Some(x) if x.is_finite() => Value::Number(Number::from_str(&g17(x)).unwrap_or(n)),
                _ => Value::Null,
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(json_g17).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, json_g17(v))).collect()),
        v => v,
    }
}

/// Grid bound: a number, or `U/2` optionally followed by `+x` / `-x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Abs(f64),
    HalfU(f64),
}

impl Bound {
    pub fn at(&self, u: f64) -> f64 {
        match *self {
            Bound::Abs(x) => x,
            Bound::HalfU(off) => 0.5 * u + off,
        }
    }
}

impl FromStr for Bound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("U/2") {
            let rest = rest.trim();
            if rest.is_empty() {
                return Ok(Bound::HalfU(0.0));
            }
            let off: f64 = rest.replace(' ', "").parse().map_err(|_| format!("bad offset in {s:?}"))?;
            return Ok(Bound::HalfU(off));
        }
        s.parse().map(Bound::Abs).map_err(|_| format!("bad number {s:?}"))
    }
}

/// `lo:hi:count` (inclusive linspace) or a comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Range { lo: Bound, hi: Bound, count: usize },
    List(Vec<f64>),
}

impl Grid {
    pub fn values(&self, u: f64) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Range { lo, hi, count } => linspace(lo.at(u), hi.at(u), *count),
        }
    }

    pub fn depends_on_u(&self) -> bool {
        matches!(self, Grid::Range { lo: Bound::HalfU(_), .. } | Grid::Range { hi: Bound::HalfU(_), .. })
    }

    pub fn validate(&self, u: f64) -> Result<(), String> {
        match self {
            Grid::List(v) if v.is_empty() => Err("empty grid".into()),
            Grid::List(v) if v.iter().any(|x| !x.is_finite()) => Err("non-finite grid value".into()),
            Grid::List(_) => Ok(()),
            Grid::Range { lo, hi, count } => {
                let (a, b) = (lo.at(u), hi.at(u));
                if *count < 1 {
                    Err("grid count must be at least 1".into())
                } else if !(a <= b) {
                    Err(format!("grid lower bound {a} exceeds upper bound {b}"))
                } else {
                    Ok(())
                }
            }
        }
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.len() {
            1 => s
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number {x:?}")))
                .collect::<Result<Vec<_>, _>>()
                .map(Grid::List),
            3 => Ok(Grid::Range {
                lo: parts[0].parse()?,
                hi: parts[1].parse()?,
                count: parts[2].trim().parse().map_err(|_| format!("bad count {:?}", parts[2]))?,
            }),
            _ => Err(format!("expected lo:hi:count or a comma list, got {s:?}")),
        }
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(-2.5), "-2.5");
        assert_eq!(g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(g17(1e20), "1e+20");
        assert_eq!(g17(123456.0), "123456");
        assert_eq!(g17(1.0 / 3.0), "0.33333333333333331");
    }

    #[test]
    fn grids() {
        assert_eq!("1,2.5".parse::<Grid>().unwrap(), Grid::List(vec![1.0, 2.5]));
        let g: Grid = "0:U/2-0.001:3".parse().unwrap();
        assert_eq!(g.values(10.0), vec![0.0, 2.4995, 4.999]);
        assert!(g.depends_on_u());
        assert!("1:2".parse::<Grid>().is_err());
    }
}
