//! Growth gauges psi(n) = o(n) against which Birkhoff sums are measured.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GrowthGauge {
    /// psi(n) = n^nu with nu in (0, 1).
    Power { nu: f64 },
    /// Explicit monotone table (n, psi(n)); evaluated by the last entry <= n.
    Table { rows: Vec<(u64, f64)> },
}

impl GrowthGauge {
    pub fn power(nu: f64) -> Result<GrowthGauge> {
        if !(0.0..1.0).contains(&nu) || nu == 0.0 {
            return Err(Error::InvalidInput("power gauge needs nu in (0,1)".into()));
        }
        Ok(GrowthGauge::Power { nu })
    }

    pub fn table(rows: Vec<(u64, f64)>) -> Result<GrowthGauge> {
        if rows.len() < 2 {
            return Err(Error::InvalidInput("gauge table needs >= 2 rows".into()));
        }
        if !rows.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1) {
            return Err(Error::InvalidInput("gauge table must be monotone".into()));
        }
        // psi(n)/n must shrink over the tabulated range
        let (n0, p0) = rows[0];
        let (n1, p1) = rows[rows.len() - 1];
        if p1 / n1 as f64 >= p0 / n0 as f64 {
            return Err(Error::InvalidInput(
                "gauge table does not satisfy psi(n) = o(n) at its endpoints".into(),
            ));
        }
        Ok(GrowthGauge::Table { rows })
    }

    pub fn eval(&self, n: u64) -> f64 {
        match self {
            GrowthGauge::Power { nu } => (n as f64).powf(*nu),
            GrowthGauge::Table { rows } => {
                let idx = rows.partition_point(|&(m, _)| m <= n);
                if idx == 0 {
                    rows[0].1
                } else {
                    rows[idx - 1].1
                }
            }
        }
    }

    /// Parse the CLI forms `nu=0.5` or `table:1=1,10=2,100=4`.
    pub fn parse(s: &str) -> Result<GrowthGauge> {
        if let Some(v) = s.strip_prefix("nu=") {
            let nu: f64 = v
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad gauge exponent '{v}'")))?;
            GrowthGauge::power(nu)
        } else if let Some(rows) = s.strip_prefix("table:") {
            let rows: Result<Vec<(u64, f64)>> = rows
                .split(',')
                .map(|pair| {
                    let (n, p) = pair
                        .split_once('=')
                        .ok_or_else(|| Error::InvalidInput(format!("bad gauge row '{pair}'")))?;
                    Ok((
                        n.parse()
                            .map_err(|_| Error::InvalidInput(format!("bad gauge n '{n}'")))?,
                        p.parse()
                            .map_err(|_| Error::InvalidInput(format!("bad gauge value '{p}'")))?,
                    ))
                })
                .collect();
            GrowthGauge::table(rows?)
        } else {
            Err(Error::InvalidInput(format!("unrecognized gauge '{s}'")))
        }
    }
}
