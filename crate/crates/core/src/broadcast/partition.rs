use crate::error::{Error, Result};

const INTEGER_TOL: f64 = 1e-9;
/// Counts below this are exact integers in f64 and must split evenly.
const EXACT_COUNT_LIMIT: f64 = 9_007_199_254_740_992.0;

/// Split of the environment into M = 1/m macro-fractions, fM of which
/// are observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partition {
    pub f: f64,
    pub m: f64,
    pub fractions: usize,
    pub observed: usize,
}

impl Partition {
    pub fn new(f: f64, m: f64) -> Result<Self> {
        if !(m > 0.0 && m <= 1.0) {
            return Err(Error::Partition(format!("macro-fraction m = {m} outside (0, 1]")));
        }
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Partition(format!("observed fraction f = {f} outside [0, 1]")));
        }
        let big_m = (1.0 / m).round();
        if (big_m * m - 1.0).abs() > INTEGER_TOL {
            return Err(Error::Partition(format!("1/m = {} is not an integer", 1.0 / m)));
        }
        let fm = f * big_m;
        if (fm - fm.round()).abs() > INTEGER_TOL {
            return Err(Error::Partition(format!("fM = {fm} is not an integer")));
        }
        Ok(Self {
            f,
            m,
            fractions: big_m as usize,
            observed: fm.round() as usize,
        })
    }

    /// Rejects photon counts that cannot be cut into M equal fractions.
    pub fn check_count(&self, n_t: f64) -> Result<()> {
        if n_t < EXACT_COUNT_LIMIT && n_t.round() % self.fractions as f64 != 0.0 {
            return Err(Error::Partition(format!(
                "N_t = {n_t} photons do not split into {} equal fractions",
                self.fractions
            )));
        }
        Ok(())
    }

    /// Photons per macro-fraction.
    pub fn fraction_size(&self, n_t: usize) -> usize {
        n_t / self.fractions
    }

    pub fn observed_photons(&self, n_t: usize) -> usize {
        self.observed * self.fraction_size(n_t)
    }
}
