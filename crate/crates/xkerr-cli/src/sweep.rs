//! Sweep specifications: `key=start:stop:steps [unit]` or `key=v1,v2,… [unit]`.

use crate::config::dimension;
use crate::error::CliError;
use crate::quantity::{self, parse_number, Quantity};

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub key: String,
    pub unit: String,
    /// Values as written, in `unit`.
    pub raw: Vec<f64>,
    pub values: Vec<Quantity>,
}

impl Sweep {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Config(format!("sweep `{spec}`: {why}"));
        let (key, rest) = spec.split_once('=').ok_or_else(|| bad("expected key=range"))?;
        let key = key.trim().to_string();
        let dim = dimension(&key)?;
        let rest = rest.trim();
        let (range, unit) = match rest.find(char::is_whitespace) {
            Some(i) => (&rest[..i], rest[i..].trim()),
            None => (rest, ""),
        };
        let raw = if range.contains(':') {
            let parts: Vec<&str> = range.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("expected start:stop:steps"));
            }
            let start = parse_number(parts[0]).ok_or_else(|| bad("bad start"))?;
            let stop = parse_number(parts[1]).ok_or_else(|| bad("bad stop"))?;
            let steps: usize = parts[2].trim().parse().map_err(|_| bad("steps must be a positive integer"))?;
            match steps {
                0 => return Err(bad("steps must be a positive integer")),
                1 => vec![start],
                _ => (0..steps).map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64).collect(),
            }
        } else {
            range
                .split(',')
                .map(|s| parse_number(s).ok_or_else(|| bad("bad list value")))
                .collect::<Result<Vec<_>, _>>()?
        };
        let values = raw
            .iter()
            .map(|x| quantity::parse(&key, &format!("{x} {unit}"), dim))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Sweep { key, unit: unit.to_string(), raw, values })
    }

    /// Column name: the key, with the unit in brackets when there is one.
    pub fn column(&self) -> String {
        if self.unit.is_empty() {
            self.key.clone()
        } else {
            format!("{}[{}]", self.key, self.unit)
        }
    }
}

/// One point of the Cartesian product of the sweeps, first sweep outermost.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub index: usize,
    pub coords: Vec<(usize, f64, Quantity)>,
}

pub fn grid(sweeps: &[Sweep]) -> Vec<Point> {
    let total: usize = sweeps.iter().map(|s| s.raw.len()).product();
    (0..total)
        .map(|index| {
            let mut rem = index;
            let mut coords = vec![(0, 0.0, Quantity::Absolute(0.0)); sweeps.len()];
            for (j, s) in sweeps.iter().enumerate().rev() {
                let i = rem % s.raw.len();
                rem /= s.raw.len();
                coords[j] = (i, s.raw[i], s.values[i]);
            }
            Point { index, coords }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_range() {
        let s = Sweep::parse("delta_ng0=0.45:0.56:12").unwrap();
        assert_eq!(s.raw.len(), 12);
        assert_eq!(s.raw[0], 0.45);
        assert_eq!(s.raw[11], 0.56);
        assert_eq!(s.column(), "delta_ng0");
    }

    #[test]
    fn list_with_unit() {
        let s = Sweep::parse("kappa=10,100 krad/s").unwrap();
        assert_eq!(s.values, vec![Quantity::Absolute(1e4), Quantity::Absolute(1e5)]);
        assert_eq!(s.column(), "kappa[krad/s]");
    }

    #[test]
    fn untagged_rate_is_rejected() {
        assert!(Sweep::parse("delta_c=-1:1:3").is_err());
        assert!(Sweep::parse("bogus=1:2:3").is_err());
        assert!(Sweep::parse("n_th=0:1:0").is_err());
    }

    #[test]
    fn product_order() {
        let a = Sweep::parse("n_th=0,1").unwrap();
        let b = Sweep::parse("delta_ng0=0.1,0.2,0.3").unwrap();
        let g = grid(&[a, b]);
        assert_eq!(g.len(), 6);
        assert_eq!((g[1].coords[0].1, g[1].coords[1].1), (0.0, 0.2));
        assert_eq!((g[3].coords[0].1, g[3].coords[1].1), (1.0, 0.1));
        assert_eq!(grid(&[]).len(), 1);
    }
}
