use super::io;
use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, Point};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetKind {
    UniformBox,
    /// Isotropic Gaussian clusters with centres uniform in the domain and
    /// Zipf-like weights `1 / (i + 1)`.
    GaussianClusters {
        clusters: usize,
        spread: f64,
    },
    FileCsv(PathBuf),
    FileBinary(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    /// Ignored by the file loaders.
    pub n: usize,
    pub domain: BoundingBox,
    pub seed: u64,
}

impl DatasetSpec {
    /// Longitude/latitude box of a metropolitan area.
    pub const CITY_DOMAIN: BoundingBox = BoundingBox {
        min_lon: -74.25,
        min_lat: 40.50,
        max_lon: -73.70,
        max_lat: 40.92,
    };

    pub fn clustered(n: usize, seed: u64) -> Self {
        Self {
            kind: DatasetKind::GaussianClusters {
                clusters: 24,
                spread: 0.01,
            },
            n,
            domain: Self::CITY_DOMAIN,
            seed,
        }
    }

    pub fn uniform(n: usize, seed: u64) -> Self {
        Self {
            kind: DatasetKind::UniformBox,
            n,
            domain: Self::CITY_DOMAIN,
            seed,
        }
    }
}

fn uniform_in(rng: &mut ChaCha8Rng, d: &BoundingBox) -> Point {
    Point::new(
        d.min_lon + rng.random::<f64>() * d.width(),
        d.min_lat + rng.random::<f64>() * d.height(),
    )
}

pub fn generate_dataset(spec: &DatasetSpec) -> Result<Vec<Point>> {
    match &spec.kind {
        DatasetKind::FileCsv(path) => return io::read_csv_points(path),
        DatasetKind::FileBinary(path) => return io::read_binary_points(path),
        _ => {}
    }
    if spec.n == 0 {
        return Err(Error::InvalidSpec("dataset size must be at least 1".into()));
    }
    let d = spec.domain;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        DatasetKind::UniformBox => Ok((0..spec.n).map(|_| uniform_in(&mut rng, &d)).collect()),
        DatasetKind::GaussianClusters { clusters, spread } => {
            if clusters == 0 {
                return Err(Error::InvalidSpec(
                    "cluster count must be at least 1".into(),
                ));
            }
            let noise = Normal::new(0.0, spread)
                .map_err(|e| Error::InvalidSpec(format!("cluster spread {spread}: {e}")))?;
            let centres: Vec<Point> = (0..clusters).map(|_| uniform_in(&mut rng, &d)).collect();
            let pick = WeightedIndex::new((0..clusters).map(|i| 1.0 / (i + 1) as f64))
                .map_err(|e| Error::InvalidSpec(e.to_string()))?;
            Ok((0..spec.n)
                .map(|_| {
                    let c = centres[pick.sample(&mut rng)];
                    let lon = c.lon + noise.sample(&mut rng);
                    let lat = c.lat + noise.sample(&mut rng);
                    Point::new(
                        lon.clamp(d.min_lon, d.max_lon),
                        lat.clamp(d.min_lat, d.max_lat),
                    )
                })
                .collect())
        }
        DatasetKind::FileCsv(_) | DatasetKind::FileBinary(_) => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_box_inside_domain() {
        let spec = DatasetSpec::uniform(1000, 1);
        let pts = generate_dataset(&spec).unwrap();
        assert_eq!(pts.len(), 1000);
        assert!(pts.iter().all(|p| spec.domain.contains_point(*p)));
    }

    #[test]
    fn clusters_inside_domain_and_skewed() {
        let spec = DatasetSpec::clustered(20_000, 2);
        let pts = generate_dataset(&spec).unwrap();
        assert_eq!(pts.len(), 20_000);
        assert!(pts.iter().all(|p| p.lon.is_finite() && p.lat.is_finite()));
        assert!(pts.iter().all(|p| spec.domain.contains_point(*p)));
        // 10x10 histogram: clustered data leaves many cells nearly empty.
        let d = spec.domain;
        let mut h = [0usize; 100];
        for p in &pts {
            let x = (((p.lon - d.min_lon) / d.width() * 10.0) as usize).min(9);
            let y = (((p.lat - d.min_lat) / d.height() * 10.0) as usize).min(9);
            h[y * 10 + x] += 1;
        }
        let sparse = h.iter().filter(|&&c| c < 20).count();
        assert!(sparse >= 30, "{sparse}");
    }

    #[test]
    fn zero_spread_collapses_to_centres() {
        let spec = DatasetSpec {
            kind: DatasetKind::GaussianClusters {
                clusters: 3,
                spread: 0.0,
            },
            n: 500,
            domain: BoundingBox::new(0.0, 0.0, 10.0, 10.0).unwrap(),
            seed: 3,
        };
        let mut pts = generate_dataset(&spec).unwrap();
        pts.sort_by(Point::total_cmp);
        pts.dedup();
        assert!(pts.len() <= 3);
    }

    #[test]
    fn deterministic() {
        let spec = DatasetSpec::clustered(1000, 9);
        assert_eq!(
            generate_dataset(&spec).unwrap(),
            generate_dataset(&spec).unwrap()
        );
        let other = DatasetSpec {
            seed: 10,
            ..spec.clone()
        };
        assert_ne!(
            generate_dataset(&spec).unwrap(),
            generate_dataset(&other).unwrap()
        );
    }

    #[test]
    fn bad_specs() {
        assert!(generate_dataset(&DatasetSpec::uniform(0, 1)).is_err());
        let mut s = DatasetSpec::clustered(10, 1);
        s.kind = DatasetKind::GaussianClusters {
            clusters: 0,
            spread: 0.1,
        };
        assert!(generate_dataset(&s).is_err());
        s.kind = DatasetKind::GaussianClusters {
            clusters: 2,
            spread: f64::NAN,
        };
        assert!(generate_dataset(&s).is_err());
    }
}
