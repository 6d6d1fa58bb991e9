//! Two-dimensional softmax pictures: points in a disk pushed through a
//! softmax over a small set of plane vectors and mapped back to the plane.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::qsoftmax::{qsoftmax, CoordinateMatrix};

/// Which vector set the plane softmax uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneMode {
    /// `e_1, e_2`: plain softmax.
    Ortho,
    /// Three unit vectors at 90, 210 and 330 degrees.
    Quasi,
    /// `e_1, -e_1, e_2, -e_2`.
    Antipodal,
}

impl PlaneMode {
    pub const ALL: [PlaneMode; 3] = [PlaneMode::Ortho, PlaneMode::Quasi, PlaneMode::Antipodal];

    pub fn name(self) -> &'static str {
        match self {
            PlaneMode::Ortho => "ortho",
            PlaneMode::Quasi => "quasi",
            PlaneMode::Antipodal => "antipodal",
        }
    }

    /// The plane vectors, one per row.
    pub fn vectors(self) -> Vec<[f64; 2]> {
        match self {
            PlaneMode::Ortho => vec![[1.0, 0.0], [0.0, 1.0]],
            PlaneMode::Quasi => [90.0f64, 210.0, 330.0]
                .iter()
                .map(|deg| {
                    let a = deg * PI / 180.0;
                    [a.cos(), a.sin()]
                })
                .collect(),
            PlaneMode::Antipodal => vec![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]],
        }
    }

    pub fn coordinate_matrix(self) -> CoordinateMatrix {
        let vs = self.vectors();
        let flat = vs.iter().flat_map(|v| v.iter().copied()).collect();
        CoordinateMatrix::from_flat(vs.len(), 2, flat).expect("plane vectors are unit length")
    }
}

impl fmt::Display for PlaneMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlaneMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PlaneMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode {s:?} (expected ortho, quasi or antipodal)"))
    }
}

/// One input point and its image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedPoint {
    pub x: f64,
    pub y: f64,
    pub out_x: f64,
    pub out_y: f64,
}

/// Maps `(x, y)` to `sum p_i v_i` where `p = softmax(Q (x, y))`.
pub fn map_point(q: &CoordinateMatrix, x: f64, y: f64) -> MappedPoint {
    let p = qsoftmax(&[x, y], q)
        .map(|p| p.into_inner())
        .unwrap_or_default();
    let (mut out_x, mut out_y) = (0.0, 0.0);
    for (i, pi) in p.iter().enumerate() {
        let v = q.row(i);
        out_x += pi * v[0];
        out_y += pi * v[1];
    }
    MappedPoint { x, y, out_x, out_y }
}

/// `n` points uniform in the disk of radius `radius`, mapped under `mode`.
pub fn sample<R: Rng>(mode: PlaneMode, n: usize, radius: f64, rng: &mut R) -> Vec<MappedPoint> {
    let q = mode.coordinate_matrix();
    (0..n)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let t = 2.0 * PI * rng.gen::<f64>();
            map_point(&q, r * t.cos(), r * t.sin())
        })
        .collect()
}
