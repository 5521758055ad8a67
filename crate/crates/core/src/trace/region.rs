use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed planar region; points on the boundary are inside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionDoc", into = "RegionDoc")]
pub enum Region {
    Box { x_min: f64, y_min: f64, x_max: f64, y_max: f64 },
    Polygon { vertices: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RegionDoc {
    Box { x_min: f64, y_min: f64, x_max: f64, y_max: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl TryFrom<RegionDoc> for Region {
    type Error = Error;

    fn try_from(doc: RegionDoc) -> Result<Self> {
        match doc {
            RegionDoc::Box { x_min, y_min, x_max, y_max } => Region::bounding_box(x_min, y_min, x_max, y_max),
            RegionDoc::Polygon { vertices } => Region::polygon(vertices.into_iter().map(|[x, y]| (x, y)).collect()),
        }
    }
}

impl From<Region> for RegionDoc {
    fn from(r: Region) -> Self {
        match r {
            Region::Box { x_min, y_min, x_max, y_max } => RegionDoc::Box { x_min, y_min, x_max, y_max },
            Region::Polygon { vertices } => RegionDoc::Polygon { vertices: vertices.into_iter().map(|(x, y)| [x, y]).collect() },
        }
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn on_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> bool {
    cross(a, b, p) == 0.0 && p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

fn segments_touch(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b)
}

impl Region {
    pub fn bounding_box(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::parameter(format!(
                "region box needs x_min < x_max and y_min < y_max, got ({x_min}, {y_min}, {x_max}, {y_max})"
            )));
        }
        Ok(Region::Box { x_min, y_min, x_max, y_max })
    }

    /// Simple polygon; the closing edge is implicit.
    pub fn polygon(mut vertices: Vec<(f64, f64)>) -> Result<Self> {
        if vertices.len() >= 2 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        let n = vertices.len();
        if n < 3 {
            return Err(Error::parameter("region polygon needs at least 3 vertices"));
        }
        if vertices.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::parameter("region polygon has non-finite vertex"));
        }
        let edge = |i: usize| (vertices[i], vertices[(i + 1) % n]);
        for i in 0..n {
            let (a, b) = edge(i);
            if a == b {
                return Err(Error::parameter(format!("region polygon repeats vertex {i}")));
            }
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (c, d) = edge(j);
                if adjacent {
                    // Adjacent edges share one endpoint; they may not fold back.
                    let shared = if j == i + 1 { b } else { a };
                    let (p, q) = if j == i + 1 { (a, d) } else { (b, c) };
                    if cross(shared, p, q) == 0.0 && (p.0 - shared.0) * (q.0 - shared.0) + (p.1 - shared.1) * (q.1 - shared.1) > 0.0 {
                        return Err(Error::parameter(format!("region polygon folds back at edges {i} and {j}")));
                    }
                } else if segments_touch(a, b, c, d) {
                    return Err(Error::parameter(format!("region polygon self-intersects at edges {i} and {j}")));
                }
            }
        }
        if vertices.iter().enumerate().all(|(i, &v)| cross(vertices[0], vertices[1], v) == 0.0 || i < 2) {
            return Err(Error::parameter("region polygon is degenerate (collinear vertices)"));
        }
        Ok(Region::Polygon { vertices })
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Region::Box { x_min, y_min, x_max, y_max } => x >= *x_min && x <= *x_max && y >= *y_min && y <= *y_max,
            Region::Polygon { vertices } => {
                let p = (x, y);
                let n = vertices.len();
                let mut inside = false;
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    if on_segment(p, a, b) {
                        return true;
                    }
                    if (a.1 > y) != (b.1 > y) {
                        let xi = a.0 + (y - a.1) * (b.0 - a.0) / (b.1 - a.1);
                        if x < xi {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }

    /// Mean of the corner/vertex coordinates.
    pub fn centroid(&self) -> (f64, f64) {
        match self {
            Region::Box { x_min, y_min, x_max, y_max } => ((x_min + x_max) / 2.0, (y_min + y_max) / 2.0),
            Region::Polygon { vertices } => {
                let n = vertices.len() as f64;
                let (sx, sy) = vertices.iter().fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x, sy + y));
                (sx / n, sy / n)
            }
        }
    }

    /// Applies `f` to every defining point.
    pub fn map_points(&self, f: impl Fn(f64, f64) -> (f64, f64)) -> Result<Region> {
        match self {
            Region::Box { x_min, y_min, x_max, y_max } => {
                let (a, b) = f(*x_min, *y_min);
                let (c, d) = f(*x_max, *y_max);
                Region::bounding_box(a.min(c), b.min(d), a.max(c), b.max(d))
            }
            Region::Polygon { vertices } => Region::polygon(vertices.iter().map(|&(x, y)| f(x, y)).collect()),
        }
    }
}

/// Equirectangular projection of longitude/latitude degrees to local metres
/// around a reference point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalProjection {
    pub lon0: f64,
    pub lat0: f64,
}

const EARTH_RADIUS_M: f64 = 6_371_008.8;

impl LocalProjection {
    pub fn new(lon0: f64, lat0: f64) -> Self {
        LocalProjection { lon0, lat0 }
    }

    pub fn is_geographic(lon: f64, lat: f64) -> bool {
        (-180.0..=180.0).contains(&lon) && (-90.0..=90.0).contains(&lat)
    }

    pub fn project(&self, lon: f64, lat: f64) -> (f64, f64) {
        let k = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
        (k * (lon - self.lon0) * self.lat0.to_radians().cos(), k * (lat - self.lat0))
    }
}
