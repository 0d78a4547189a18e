//! Observed samples from a CSV file with columns
//! `population,scheme,value[,removals]`.
//!
//! Rows keep file order within each population, which matters for censored
//! and record data. `scheme` is one of `complete`, `type2`, `progressive` or
//! `records` and must not change within a population. `removals` is the
//! progressive withdrawal count at that failure (default 0). Type-II totals
//! come from the config sizes `n1`, `n2`.

use std::io::Read;
use std::path::Path;

use ordest::schemes::{combine, reduce, Scheme, SchemeSample};
use ordest::{Error, Result, SufficientStats};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
struct Row {
    population: u8,
    scheme: String,
    value: f64,
    removals: Option<u32>,
}

/// Observations of one population in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PopulationData {
    pub scheme: String,
    pub values: Vec<f64>,
    pub removals: Vec<u32>,
}

fn data_error(row: usize, message: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("data row {row}: {message}"))
}

pub fn read_samples(reader: impl Read) -> Result<[PopulationData; 2]> {
    let mut out: [PopulationData; 2] = Default::default();
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    for (i, row) in csv.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| data_error(i + 1, e))?;
        let pop = match row.population {
            1 | 2 => &mut out[row.population as usize - 1],
            other => return Err(data_error(i + 1, format!("population must be 1 or 2, got {other}"))),
        };
        let scheme = row.scheme.to_ascii_lowercase();
        if !["complete", "type2", "progressive", "records"].contains(&scheme.as_str()) {
            return Err(data_error(i + 1, format!("unknown scheme `{}`", row.scheme)));
        }
        if pop.values.is_empty() {
            pop.scheme = scheme;
        } else if pop.scheme != scheme {
            return Err(data_error(i + 1, format!("population {} mixes schemes", row.population)));
        }
        pop.values.push(row.value);
        pop.removals.push(row.removals.unwrap_or(0));
    }
    Ok(out)
}

fn scheme_for(data: &PopulationData, population: usize, size: Option<u32>) -> Result<Scheme> {
    let count = data.values.len() as u32;
    Ok(match data.scheme.as_str() {
        "type2" => {
            let total = size.ok_or_else(|| Error::Config {
                line: 0,
                field: format!("n{population}"),
                message: "type-II data needs the number of units on test".into(),
            })?;
            Scheme::TypeII { total, observed: count }
        }
        "progressive" => Scheme::Progressive { removals: data.removals.clone() },
        "records" => Scheme::Records { count },
        _ => Scheme::Complete { n: count },
    })
}

pub fn stats_from_samples(samples: [PopulationData; 2], sizes: [Option<u32>; 2]) -> Result<SufficientStats> {
    let mut reduced = Vec::with_capacity(2);
    for (i, data) in samples.into_iter().enumerate() {
        if data.values.is_empty() {
            return Err(Error::SampleTooSmall { population: i + 1, len: 0 });
        }
        let scheme = scheme_for(&data, i + 1, sizes[i])?;
        scheme.validate()?;
        reduced.push(reduce(&SchemeSample { scheme, observations: data.values })?);
    }
    combine(&reduced[0], &reduced[1])
}

pub fn load_stats(path: &Path, sizes: [Option<u32>; 2]) -> Result<SufficientStats> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot open {}: {e}", path.display())))?;
    stats_from_samples(read_samples(file)?, sizes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(text: &str, sizes: [Option<u32>; 2]) -> Result<SufficientStats> {
        stats_from_samples(read_samples(text.as_bytes())?, sizes)
    }

    #[test]
    fn complete_data_reduces_to_min_and_spread() {
        let text = "population,scheme,value\n1,complete, 2.0\n2,complete,3.0\n1,complete,4.0\n2,complete,3.5\n# note\n1,complete,3.0\n";
        let s = stats(text, [None, None]).unwrap();
        assert_eq!((s.x1_min, s.t1, s.x2_min, s.t2), (2.0, 3.0, 3.0, 0.5));
        assert_eq!((s.n1, s.n2), (3, 2));
    }

    #[test]
    fn type_two_takes_totals_from_sizes() {
        let text = "population,scheme,value\n1,type2,1.0\n1,type2,2.0\n2,complete,1.5\n2,complete,2.5\n";
        assert!(matches!(stats(text, [None, None]), Err(Error::Config { .. })));
        let s = stats(text, [Some(4), None]).unwrap();
        assert_eq!(s.t1, 1.0 + 2.0 + 2.0 * 2.0 - 4.0);
        assert_eq!(s.design().rate1, 4.0);
    }

    #[test]
    fn progressive_removals_column() {
        let text = "population,scheme,value,removals\n1,progressive,1.0,1\n1,progressive,2.0,0\n1,progressive,3.0,2\n2,records,1.0\n2,records,2.0\n";
        let s = stats(text, [None, None]).unwrap();
        assert_eq!(s.t1, 2.0 * 1.0 + 2.0 + 3.0 * 3.0 - 6.0);
        assert_eq!((s.design().rate1, s.design().rate2), (6.0, 1.0));
    }

    #[test]
    fn bad_rows_are_reported() {
        assert!(read_samples("population,scheme,value\n3,complete,1.0\n".as_bytes()).is_err());
        assert!(read_samples("population,scheme,value\n1,complete,abc\n".as_bytes()).is_err());
        assert!(read_samples("population,scheme,value\n1,complete,1\n1,records,2\n".as_bytes()).is_err());
        assert!(read_samples("population,scheme,value\n1,hybrid,1\n".as_bytes()).is_err());
        let text = "population,scheme,value\n1,records,1.0\n1,records,0.5\n2,records,1.0\n2,records,2.0\n";
        assert_eq!(stats(text, [None, None]).unwrap_err(), Error::NotRecordSequence);
    }
}
