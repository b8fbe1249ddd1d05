use std::fs;

use diaboli::instance::{random_instance, ViolationDiagonal};
use diaboli::parse_dimacs;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::Failure;

/// Where the problem diagonal comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Dimacs(String),
    /// `wc:n=<k>,sol=<i|none>`
    WorstCase { n: usize, solution: Option<usize> },
    /// `rand:n=<k>,m=<clauses>`, drawn from the run seed.
    Random { n: usize, m: usize },
}

fn fields(spec: &str) -> Result<Vec<(&str, &str)>, Failure> {
    spec.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Failure::Usage(format!("expected key=value, got {kv:?}")))
        })
        .collect()
}

fn number(key: &str, v: &str) -> Result<usize, Failure> {
    v.parse().map_err(|_| Failure::Usage(format!("{key} must be a non-negative integer, got {v:?}")))
}

impl Source {
    pub fn parse(s: &str) -> Result<Self, Failure> {
        if let Some(rest) = s.strip_prefix("wc:") {
            let (mut n, mut sol) = (None, None);
            for (k, v) in fields(rest)? {
                match k {
                    "n" => n = Some(number(k, v)?),
                    "sol" if v == "none" => sol = Some(None),
                    "sol" => sol = Some(Some(number(k, v)?)),
                    _ => return Err(Failure::Usage(format!("unknown key {k:?} in {s:?}"))),
                }
            }
            match (n, sol) {
                (Some(n), Some(solution)) => Ok(Source::WorstCase { n, solution }),
                _ => Err(Failure::Usage(format!("{s:?} needs both n= and sol="))),
            }
        } else if let Some(rest) = s.strip_prefix("rand:") {
            let (mut n, mut m) = (None, None);
            for (k, v) in fields(rest)? {
                match k {
                    "n" => n = Some(number(k, v)?),
                    "m" => m = Some(number(k, v)?),
                    _ => return Err(Failure::Usage(format!("unknown key {k:?} in {s:?}"))),
                }
            }
            match (n, m) {
                (Some(n), Some(m)) => Ok(Source::Random { n, m }),
                _ => Err(Failure::Usage(format!("{s:?} needs both n= and m="))),
            }
        } else {
            Ok(Source::Dimacs(s.to_string()))
        }
    }

    pub fn load(&self, seed: u64) -> Result<ViolationDiagonal, Failure> {
        match self {
            Source::Dimacs(path) => {
                let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?;
                Ok(ViolationDiagonal::from_instance(&parse_dimacs(&text).map_err(Failure::numerical)?))
            }
            Source::WorstCase { n, solution } => ViolationDiagonal::worst_case(*n, *solution).map_err(|e| Failure::Usage(e.to_string())),
            Source::Random { n, m } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let inst = random_instance(*n, *m, &mut rng).map_err(|e| Failure::Usage(e.to_string()))?;
                Ok(ViolationDiagonal::from_instance(&inst))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sources() {
        assert_eq!(
            Source::parse("wc:n=7,sol=127").unwrap(),
            Source::WorstCase { n: 7, solution: Some(127) }
        );
        assert_eq!(Source::parse("wc:sol=none,n=3").unwrap(), Source::WorstCase { n: 3, solution: None });
        assert_eq!(Source::parse("rand:n=5,m=20").unwrap(), Source::Random { n: 5, m: 20 });
        assert_eq!(Source::parse("a.cnf").unwrap(), Source::Dimacs("a.cnf".into()));
        assert!(Source::parse("wc:n=3").is_err());
        assert!(Source::parse("wc:n=x,sol=1").is_err());
        assert!(Source::parse("wc:n=3,sol=1,q=2").is_err());
    }

    #[test]
    fn random_source_follows_seed() {
        let s = Source::parse("rand:n=5,m=20").unwrap();
        assert_eq!(s.load(3).unwrap(), s.load(3).unwrap());
        assert_ne!(s.load(3).unwrap(), s.load(4).unwrap());
    }

    #[test]
    fn worst_case_out_of_range() {
        assert!(matches!(Source::parse("wc:n=3,sol=8").unwrap().load(0), Err(Failure::Usage(_))));
    }
}
