//! Partition matroid over salary bands.

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::model::Instance;

/// Band of each cost when `[min, max]` is cut into `bands` equal-length,
/// right-closed ranges. The lowest band also holds `min`, the last holds `max`.
pub fn salary_bands(costs: &[f64], bands: usize) -> Result<Vec<usize>> {
    if bands == 0 {
        return Err(Error::InvalidParameter("need at least one salary band".into()));
    }
    let Some(min) = costs.iter().copied().reduce(f64::min) else {
        return Ok(Vec::new());
    };
    let max = costs.iter().copied().fold(min, f64::max);
    let width = (max - min) / bands as f64;
    let bounds: Vec<f64> = (1..bands).map(|i| min + i as f64 * width).collect();
    Ok(costs
        .iter()
        .map(|&c| bounds.iter().filter(|&&b| b < c).count())
        .collect())
}

/// Salary-band partition of the instance experts with the same budget in
/// every band.
pub fn salary_band_matroid(inst: &Instance, bands: usize, budget: usize) -> Result<Matroid> {
    let costs: Vec<f64> = inst.experts().iter().map(|e| e.cost).collect();
    let part_of = salary_bands(&costs, bands)?;
    Matroid::partition(part_of, vec![budget; bands])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_closed_bands() {
        let costs = [10.0, 12.0, 14.0, 15.0, 30.0, 50.0, 20.0];
        // width 8: [10,18] (18,26] (26,34] (34,42] (42,50]
        assert_eq!(salary_bands(&costs, 5).unwrap(), vec![0, 0, 0, 0, 2, 4, 1]);
        assert_eq!(salary_bands(&[18.0, 10.0, 50.0], 5).unwrap(), vec![0, 0, 4]);
    }

    #[test]
    fn degenerate_ranges() {
        assert_eq!(salary_bands(&[7.0, 7.0], 5).unwrap(), vec![0, 0]);
        assert!(salary_bands(&[], 5).unwrap().is_empty());
        assert!(salary_bands(&[1.0], 0).is_err());
    }

    #[test]
    fn matroid_over_instance() {
        let inst = crate::fixtures::instance_a();
        let m = salary_band_matroid(&inst, 2, 1).unwrap();
        let Matroid::Partition(p) = &m else { panic!() };
        assert_eq!(p.part_sizes(), &[2, 1]);
        assert_eq!(m.rank_upper_bound(), 2);
    }
}
