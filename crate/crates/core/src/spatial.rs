//! Nearest-access-point assignment and per-AP, per-bin workload tables.

use std::collections::HashSet;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attribution::{Attribution, Components};
use crate::error::{Error, Result};
use crate::stats;
use crate::trace::{BinGrid, TraceSample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessPoint {
    pub ap_id: String,
    pub x: f64,
    pub y: f64,
}

impl AccessPoint {
    pub fn new(ap_id: impl Into<String>, x: f64, y: f64) -> Self {
        AccessPoint { ap_id: ap_id.into(), x, y }
    }
}

/// Checks that the AP list is non-empty, ids are unique and coordinates finite.
pub fn validate_aps(aps: &[AccessPoint]) -> Result<()> {
    if aps.is_empty() {
        return Err(Error::config("access point list is empty"));
    }
    let mut ids = HashSet::new();
    for ap in aps {
        if !ids.insert(ap.ap_id.as_str()) {
            return Err(Error::config(format!("duplicate access point id {:?}", ap.ap_id)));
        }
        if !(ap.x.is_finite() && ap.y.is_finite()) {
            return Err(Error::config(format!("access point {:?} has non-finite coordinates", ap.ap_id)));
        }
    }
    Ok(())
}

/// Index of the AP closest to `(x, y)`; equal distances go to the
/// lexicographically smallest id.
pub fn nearest_ap_index(x: f64, y: f64, aps: &[AccessPoint]) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (i, ap) in aps.iter().enumerate() {
        let (dx, dy) = (ap.x - x, ap.y - y);
        let d = dx * dx + dy * dy;
        best = match best {
            Some((bd, bi)) if d > bd || (d == bd && ap.ap_id >= aps[bi].ap_id) => Some((bd, bi)),
            _ => Some((d, i)),
        };
    }
    best.map(|(_, i)| i)
}

pub fn assign_nearest_ap<'a>(sample: &TraceSample, aps: &'a [AccessPoint]) -> Result<&'a str> {
    nearest_ap_index(sample.x, sample.y, aps).map(|i| aps[i].ap_id.as_str()).ok_or_else(|| Error::config("access point list is empty"))
}

/// Offloaded bytes per access point and time bin.
#[derive(Debug, Clone, PartialEq)]
pub struct ApWorkloadTable {
    aps: Vec<AccessPoint>,
    bins: BinGrid,
    /// AP-major: `cells[ap * bin_count + bin]`.
    cells: Vec<Components>,
    /// Same attribution summed per bin without spatial assignment.
    regional: Vec<Components>,
    assigned_samples: u64,
    overflow: u64,
}

impl ApWorkloadTable {
    pub fn new(aps: Vec<AccessPoint>, bins: BinGrid) -> Result<Self> {
        validate_aps(&aps)?;
        let n = aps.len() * bins.bin_count();
        Ok(ApWorkloadTable {
            cells: vec![Components::default(); n],
            regional: vec![Components::default(); bins.bin_count()],
            aps,
            bins,
            assigned_samples: 0,
            overflow: 0,
        })
    }

    /// Attributes one sample to its nearest AP.
    pub fn add_sample(&mut self, sample: &TraceSample, attribution: &Attribution) -> Result<()> {
        let Some(bin) = self.bins.bin_of(sample.time_s) else {
            self.overflow += 1;
            return Ok(());
        };
        let bytes = attribution.sample_bytes(sample.time_s)?;
        let ap = nearest_ap_index(sample.x, sample.y, &self.aps).expect("validated non-empty");
        self.cells[ap * self.bins.bin_count() + bin] += bytes;
        self.regional[bin] += bytes;
        self.assigned_samples += 1;
        Ok(())
    }

    /// Elementwise sum with a table over the same APs and grid.
    pub fn merge(mut self, other: &ApWorkloadTable) -> Result<Self> {
        if self.aps != other.aps || self.bins != other.bins {
            return Err(Error::parameter("cannot merge workload tables with different layouts"));
        }
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            *a += *b;
        }
        for (a, b) in self.regional.iter_mut().zip(&other.regional) {
            *a += *b;
        }
        self.assigned_samples += other.assigned_samples;
        self.overflow += other.overflow;
        Ok(self)
    }

    pub fn aps(&self) -> &[AccessPoint] {
        &self.aps
    }

    pub fn bins(&self) -> BinGrid {
        self.bins
    }

    pub fn cell(&self, ap: usize, bin: usize) -> Components {
        self.cells[ap * self.bins.bin_count() + bin]
    }

    pub fn ap_row(&self, ap: usize) -> &[Components] {
        let n = self.bins.bin_count();
        &self.cells[ap * n..(ap + 1) * n]
    }

    /// Per-bin totals accumulated without spatial assignment.
    pub fn regional(&self) -> &[Components] {
        &self.regional
    }

    /// Per-bin sums over APs.
    pub fn bin_sums(&self) -> Vec<Components> {
        (0..self.bins.bin_count()).map(|b| (0..self.aps.len()).fold(Components::default(), |acc, a| acc + self.cell(a, b))).collect()
    }

    pub fn ap_totals(&self) -> Vec<f64> {
        (0..self.aps.len()).map(|a| self.ap_row(a).iter().map(Components::total).sum()).collect()
    }

    pub fn assigned_samples(&self) -> u64 {
        self.assigned_samples
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    /// Verifies that per-bin AP sums match the regional totals.
    pub fn check_conservation(&self, rel: f64) -> Result<()> {
        for (b, (sum, reg)) in self.bin_sums().iter().zip(&self.regional).enumerate() {
            let (s, r) = (sum.total(), reg.total());
            if !crate::scalar::rel_eq(s, r, rel) {
                return Err(Error::Invariant(format!("bin {b}: AP sum {s} differs from regional total {r}")));
            }
        }
        Ok(())
    }

    /// Long-form CSV: `ap_id,bin_start_s,telemetry_bytes,learning_bytes,map_bytes,total_bytes`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::config(format!("writing workload table: {e}"));
        w.write_record(["ap_id", "bin_start_s", "telemetry_bytes", "learning_bytes", "map_bytes", "total_bytes"]).map_err(csv_err)?;
        for (a, ap) in self.aps.iter().enumerate() {
            for (b, c) in self.ap_row(a).iter().enumerate() {
                w.write_record([
                    ap.ap_id.clone(),
                    self.bins.bin_start(b).to_string(),
                    c.telemetry.to_string(),
                    c.learning.to_string(),
                    c.map.to_string(),
                    c.total().to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
        w.flush().map_err(|e| Error::config(format!("writing workload table: {e}")))
    }
}

/// Attributes a time-ordered sample stream to the nearest APs.
pub fn accumulate_ap_workload<I>(samples: I, aps: &[AccessPoint], attribution: &Attribution, bins: BinGrid) -> Result<ApWorkloadTable>
where
    I: IntoIterator<Item = Result<TraceSample>>,
{
    let mut table = ApWorkloadTable::new(aps.to_vec(), bins)?;
    for s in samples {
        table.add_sample(&s?, attribution)?;
    }
    Ok(table)
}

/// Chunk-parallel variant over an in-memory sample slice. Partial tables are
/// merged in chunk order.
pub fn accumulate_ap_workload_parallel(
    samples: &[TraceSample],
    aps: &[AccessPoint],
    attribution: &Attribution,
    bins: BinGrid,
    chunk_len: usize,
) -> Result<ApWorkloadTable> {
    let partial: Vec<ApWorkloadTable> = samples
        .par_chunks(chunk_len.max(1))
        .map(|chunk| accumulate_ap_workload(chunk.iter().cloned().map(Ok), aps, attribution, bins))
        .collect::<Result<_>>()?;
    let empty = ApWorkloadTable::new(aps.to_vec(), bins)?;
    partial.iter().try_fold(empty, |acc, t| acc.merge(t))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApTotal {
    pub ap_id: String,
    pub total_bytes: f64,
}

/// Load-imbalance statistics over per-AP totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HotspotSummary {
    /// Sorted by descending load, ties by id.
    pub per_ap: Vec<ApTotal>,
    pub max_bytes: f64,
    pub min_bytes: f64,
    pub mean_bytes: f64,
    pub gini: f64,
}

pub fn hotspot_summary(table: &ApWorkloadTable) -> HotspotSummary {
    let totals = table.ap_totals();
    let mut per_ap: Vec<ApTotal> =
        table.aps().iter().zip(&totals).map(|(ap, &t)| ApTotal { ap_id: ap.ap_id.clone(), total_bytes: t }).collect();
    per_ap.sort_by(|a, b| b.total_bytes.total_cmp(&a.total_bytes).then_with(|| a.ap_id.cmp(&b.ap_id)));
    HotspotSummary {
        max_bytes: totals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min_bytes: totals.iter().copied().fold(f64::INFINITY, f64::min),
        mean_bytes: stats::mean(&totals),
        gini: stats::gini(&totals),
        per_ap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intensity::IntensityProfile;
    use crate::workload::{reference_model, MapPolicy, VehicleModel};
    use proptest::prelude::*;

    fn telemetry_only() -> Attribution {
        let m = reference_model::<f64>();
        let m = VehicleModel::new(m.sensors().to_vec(), 5.0, MapPolicy { artifact_probability: 0.0, ..m.map_policy().clone() }).unwrap();
        Attribution::new(&m, IntensityProfile::flat(0.0).unwrap(), 3600.0, 1.0).unwrap()
    }

    fn s(x: f64, y: f64) -> TraceSample {
        TraceSample::new("v", 0.0, x, y)
    }

    #[test]
    fn assignment_examples() {
        let one = vec![AccessPoint::new("only", 5.0, 5.0)];
        assert_eq!(assign_nearest_ap(&s(1e6, -3.0), &one).unwrap(), "only");
        let two = vec![AccessPoint::new("b", 10.0, 0.0), AccessPoint::new("a", 0.0, 0.0)];
        assert_eq!(assign_nearest_ap(&s(2.0, 0.0), &two).unwrap(), "a");
        assert_eq!(assign_nearest_ap(&s(5.0, 0.0), &two).unwrap(), "a");
        let two = vec![AccessPoint::new("a", 10.0, 0.0), AccessPoint::new("b", 0.0, 0.0)];
        assert_eq!(assign_nearest_ap(&s(5.0, 0.0), &two).unwrap(), "a");
        assert!(matches!(assign_nearest_ap(&s(0.0, 0.0), &[]), Err(Error::Config(_))));
    }

    #[test]
    fn ap_validation() {
        assert!(validate_aps(&[]).is_err());
        assert!(validate_aps(&[AccessPoint::new("a", 0.0, 0.0), AccessPoint::new("a", 1.0, 0.0)]).is_err());
        assert!(validate_aps(&[AccessPoint::new("a", f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn one_second_of_telemetry() {
        let bins = BinGrid::new(0.0, 3600.0, 2).unwrap();
        let aps = vec![AccessPoint::new("ap", 0.0, 0.0)];
        let t = accumulate_ap_workload(vec![Ok(s(3.0, 4.0))], &aps, &telemetry_only(), bins).unwrap();
        assert_eq!(t.cell(0, 0).total(), 64_360.0);
        assert_eq!(t.cell(0, 1).total(), 0.0);
    }

    #[test]
    fn empty_stream_and_unused_ap() {
        let bins = BinGrid::new(0.0, 10.0, 3).unwrap();
        let aps = vec![AccessPoint::new("a", 0.0, 0.0), AccessPoint::new("b", 100.0, 0.0)];
        let t = accumulate_ap_workload(Vec::new(), &aps, &telemetry_only(), bins).unwrap();
        assert!(t.ap_totals().iter().all(|&x| x == 0.0));
        let samples = (0..25).map(|i| Ok(TraceSample::new("v", i as f64, 10.0, 1.0)));
        let t = accumulate_ap_workload(samples, &aps, &telemetry_only(), bins).unwrap();
        assert!(t.ap_row(1).iter().all(|c| c.total() == 0.0));
        assert_eq!(t.assigned_samples(), 25);
        let late = vec![Ok(TraceSample::new("v", 31.0, 0.0, 0.0))];
        assert_eq!(accumulate_ap_workload(late, &aps, &telemetry_only(), bins).unwrap().overflow(), 1);
    }

    #[test]
    fn hotspot_examples() {
        let bins = BinGrid::new(0.0, 10.0, 1).unwrap();
        let aps: Vec<_> = (0..4).map(|i| AccessPoint::new(format!("ap{i}"), i as f64 * 100.0, 0.0)).collect();
        let even: Vec<_> = (0..4).map(|i| Ok(TraceSample::new("v", 0.0, i as f64 * 100.0, 0.0))).collect();
        let t = accumulate_ap_workload(even, &aps, &telemetry_only(), bins).unwrap();
        let h = hotspot_summary(&t);
        assert_eq!(h.gini, 0.0);
        assert_eq!(h.max_bytes, h.min_bytes);

        let skew = vec![Ok(TraceSample::new("v", 0.0, 205.0, 0.0))];
        let t = accumulate_ap_workload(skew, &aps, &telemetry_only(), bins).unwrap();
        let h = hotspot_summary(&t);
        assert!((h.gini - 0.75).abs() < 1e-15);
        assert_eq!(h.per_ap[0].ap_id, "ap2");
        assert_eq!(h.per_ap[1].ap_id, "ap0");
        assert_eq!(h.min_bytes, 0.0);
    }

    #[test]
    fn csv_export_layout() {
        let bins = BinGrid::new(0.0, 10.0, 2).unwrap();
        let aps = vec![AccessPoint::new("a", 0.0, 0.0)];
        let t = accumulate_ap_workload(vec![Ok(s(0.0, 0.0))], &aps, &telemetry_only(), bins).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "ap_id,bin_start_s,telemetry_bytes,learning_bytes,map_bytes,total_bytes\na,0,64360,0,0,64360\na,10,0,0,0,0\n"
        );
    }

    proptest! {
        #[test]
        fn assignment_invariances(
            pts in proptest::collection::vec((-50i32..50, -50i32..50), 1..12),
            q in (-60i32..60, -60i32..60),
            shift in (-1000i32..1000, -1000i32..1000),
        ) {
            let aps: Vec<_> = pts.iter().enumerate().map(|(i, &(x, y))| AccessPoint::new(format!("ap{:02}", (i * 7) % 13), x as f64, y as f64)).collect();
            prop_assume!(validate_aps(&aps).is_ok());
            let base = assign_nearest_ap(&s(q.0 as f64, q.1 as f64), &aps).unwrap().to_string();

            let mut rev = aps.clone();
            rev.reverse();
            prop_assert_eq!(assign_nearest_ap(&s(q.0 as f64, q.1 as f64), &rev).unwrap(), base.as_str());

            let moved: Vec<_> = aps.iter().map(|a| AccessPoint::new(a.ap_id.clone(), a.x + shift.0 as f64, a.y + shift.1 as f64)).collect();
            let sq = s((q.0 + shift.0) as f64, (q.1 + shift.1) as f64);
            prop_assert_eq!(assign_nearest_ap(&sq, &moved).unwrap(), base.as_str());

            // Brute-force check of minimal distance.
            let d = |a: &AccessPoint| (a.x - q.0 as f64).powi(2) + (a.y - q.1 as f64).powi(2);
            let chosen = aps.iter().find(|a| a.ap_id == base).unwrap();
            prop_assert!(aps.iter().all(|a| d(chosen) <= d(a)));
        }
    }
}
