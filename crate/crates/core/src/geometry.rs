//! Quasiorthonormal bases and spherical codes.
//!
//! A [`UnitVectorSet`] is an ordered list of unit vectors in `R^n`. Sets come
//! in two flavours: quasiorthonormal bases (every pair has a small `|v_i·v_j|`)
//! and spherical codes (a small signed dot product, antipodal pairs allowed).
//! The two are interconvertible with [`code_to_basis`] and [`basis_to_code`].

use std::fmt;
use std::io::{BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

/// Allowed deviation of a vector norm from 1.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Two unit vectors with `v·w < -1 + ANTIPODAL_TOLERANCE` are an antipodal pair.
pub const ANTIPODAL_TOLERANCE: f64 = 1e-6;
/// Allowed deviation of a raw pack row norm from 1 before normalisation.
pub const PACK_NORM_TOLERANCE: f64 = 1e-3;

const FILE_MAGIC: &str = "qoc-basis";
const FILE_VERSION: &str = "v1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("vector set is empty")]
    Empty,
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("vector {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("vector {index} has non-finite coordinates")]
    NonFinite { index: usize },
    #[error("vector {index} has norm {norm}, not a unit vector")]
    NotUnit { index: usize, norm: f64 },
    #[error("expected a {expected} but got a {found}")]
    WrongKind { expected: SetKind, found: SetKind },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("target max dot {target} unreachable; best achieved {best}")]
    TargetUnreachable { target: f64, best: f64 },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for GeometryError {
    fn from(e: std::io::Error) -> Self {
        GeometryError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetKind {
    QuasiorthonormalBasis,
    SphericalCode,
}

impl SetKind {
    fn file_tag(self) -> &'static str {
        match self {
            SetKind::QuasiorthonormalBasis => "basis",
            SetKind::SphericalCode => "code",
        }
    }
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetKind::QuasiorthonormalBasis => f.write_str("quasiorthonormal basis"),
            SetKind::SphericalCode => f.write_str("spherical code"),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// An immutable, ordered set of unit vectors sharing one dimension.
///
/// `max_abs_dot` and `max_dot` are computed once on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVectorSet {
    dim: usize,
    data: Vec<f64>,
    kind: SetKind,
    max_abs_dot: f64,
    max_dot: f64,
}

impl UnitVectorSet {
    /// Builds a set from rows that must already have unit norm (within
    /// [`NORM_TOLERANCE`]).
    pub fn new(dim: usize, rows: Vec<Vec<f64>>, kind: SetKind) -> Result<Self, GeometryError> {
        check_structure(dim, &rows)?;
        for (index, row) in rows.iter().enumerate() {
            let n = norm(row);
            if (n - 1.0).abs() > NORM_TOLERANCE {
                return Err(GeometryError::NotUnit { index, norm: n });
            }
        }
        Ok(Self::from_flat(dim, rows.concat(), kind))
    }

    /// Builds a set after scaling every row to unit length.
    pub fn normalized(
        dim: usize,
        mut rows: Vec<Vec<f64>>,
        kind: SetKind,
    ) -> Result<Self, GeometryError> {
        check_structure(dim, &rows)?;
        for (index, row) in rows.iter_mut().enumerate() {
            let n = norm(row);
            if n == 0.0 {
                return Err(GeometryError::NotUnit { index, norm: n });
            }
            row.iter_mut().for_each(|x| *x /= n);
        }
        Ok(Self::from_flat(dim, rows.concat(), kind))
    }

    /// The standard basis `e_1, ..., e_n` of `R^n`.
    pub fn standard_basis(dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Ok(Self::from_flat(dim, data, SetKind::QuasiorthonormalBasis))
    }

    fn from_flat(dim: usize, data: Vec<f64>, kind: SetKind) -> Self {
        let (max_abs_dot, max_dot, _) = pair_extremes(dim, &data);
        UnitVectorSet {
            dim,
            data,
            kind,
            max_abs_dot,
            max_dot,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    /// Cached max over distinct pairs of `|v_i·v_j|` (0 for a single vector).
    pub fn max_abs_dot(&self) -> f64 {
        self.max_abs_dot
    }

    /// Cached max over distinct pairs of the signed `v_i·v_j` (-1 for a single vector).
    pub fn max_dot(&self) -> f64 {
        self.max_dot
    }

    /// Minimum pairwise angle in degrees, measured on the signed dot product.
    pub fn min_angle_degrees(&self) -> f64 {
        self.max_dot.clamp(-1.0, 1.0).acos().to_degrees()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vectors(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// Row-major `len() x dim()` coordinates.
    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.vectors().map(<[f64]>::to_vec).collect()
    }

    /// The first `count` vectors as a new set of the same kind.
    pub fn truncated(&self, count: usize) -> Result<Self, GeometryError> {
        if count == 0 || count > self.len() {
            return Err(GeometryError::InvalidArgument(format!(
                "cannot take {count} vectors from a set of {}",
                self.len()
            )));
        }
        Ok(Self::from_flat(
            self.dim,
            self.data[..count * self.dim].to_vec(),
            self.kind,
        ))
    }

    pub fn with_kind(&self, kind: SetKind) -> Self {
        UnitVectorSet {
            kind,
            ..self.clone()
        }
    }

    /// Recomputes all norms and pairwise dots from scratch.
    pub fn validate(&self, epsilon: f64) -> ValidationReport {
        validate_flat(self.dim, &self.data, epsilon)
    }
}

fn check_structure(dim: usize, rows: &[Vec<f64>]) -> Result<(), GeometryError> {
    if dim == 0 {
        return Err(GeometryError::ZeroDimension);
    }
    if rows.is_empty() {
        return Err(GeometryError::Empty);
    }
    for (index, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(GeometryError::DimensionMismatch {
                index,
                expected: dim,
                found: row.len(),
            });
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite { index });
        }
    }
    Ok(())
}

/// Returns `(max |dot|, max dot, worst |dot| pair)` over distinct pairs.
fn pair_extremes(dim: usize, data: &[f64]) -> (f64, f64, Option<(usize, usize)>) {
    let k = data.len() / dim;
    let mut max_abs = 0.0f64;
    let mut max_signed = -1.0f64;
    let mut worst = None;
    for i in 0..k {
        let vi = &data[i * dim..(i + 1) * dim];
        for j in (i + 1)..k {
            let d = dot(vi, &data[j * dim..(j + 1) * dim]);
            if worst.is_none() || d.abs() > max_abs {
                max_abs = d.abs();
                worst = Some((i, j));
            }
            max_signed = max_signed.max(d);
        }
    }
    (max_abs, max_signed, worst)
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Every vector has norm within [`NORM_TOLERANCE`] of 1.
    pub is_normal: bool,
    /// Exact max over `i != j` of `|v_i·v_j|`.
    pub max_abs_dot_observed: f64,
    /// Pair attaining `max_abs_dot_observed`, `None` for a single vector.
    pub worst_pair: Option<(usize, usize)>,
    pub min_angle_degrees: f64,
    /// `max_abs_dot_observed < epsilon`, i.e. the set is pairwise quasiorthogonal.
    pub within_epsilon: bool,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "normal={} max_abs_dot={:.12} min_angle={:.6}deg within_epsilon={}",
            self.is_normal, self.max_abs_dot_observed, self.min_angle_degrees, self.within_epsilon
        )?;
        if let Some((i, j)) = self.worst_pair {
            write!(f, " worst_pair=({i},{j})")?;
        }
        Ok(())
    }
}

/// Checks raw rows against the quasiorthonormal definition.
///
/// Unlike [`UnitVectorSet::new`] this does not reject non-unit rows; it
/// reports them through `is_normal`.
pub fn validate(rows: &[Vec<f64>], epsilon: f64) -> Result<ValidationReport, GeometryError> {
    let dim = rows.first().ok_or(GeometryError::Empty)?.len();
    check_structure(dim, rows)?;
    Ok(validate_flat(dim, &rows.concat(), epsilon))
}

fn validate_flat(dim: usize, data: &[f64], epsilon: f64) -> ValidationReport {
    let is_normal = data
        .chunks_exact(dim)
        .all(|v| (norm(v) - 1.0).abs() <= NORM_TOLERANCE);
    let (max_abs, _, worst) = pair_extremes(dim, data);
    ValidationReport {
        is_normal,
        max_abs_dot_observed: max_abs,
        worst_pair: worst,
        min_angle_degrees: max_abs.min(1.0).acos().to_degrees(),
        within_epsilon: max_abs < epsilon,
    }
}

/// Guaranteed-achievable basis size `ceil(e^(dim·epsilon²))`, saturating at `u64::MAX`.
pub fn capacity_lower_bound(dim: usize, epsilon: f64) -> Result<u64, GeometryError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(GeometryError::InvalidArgument(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if dim == 0 {
        return Err(GeometryError::ZeroDimension);
    }
    Ok((dim as f64 * epsilon * epsilon).exp().ceil() as u64)
}

/// Keeps one vector from every antipodal pair of a spherical code.
///
/// Within a pair the vector whose first nonzero coordinate is positive is
/// kept. Unpaired vectors pass through unchanged; order follows the first
/// member of each pair.
pub fn code_to_basis(code: &UnitVectorSet) -> Result<UnitVectorSet, GeometryError> {
    if code.kind() != SetKind::SphericalCode {
        return Err(GeometryError::WrongKind {
            expected: SetKind::SphericalCode,
            found: code.kind(),
        });
    }
    let k = code.len();
    let mut used = vec![false; k];
    let mut kept = Vec::with_capacity(k * code.dim());
    for i in 0..k {
        if used[i] {
            continue;
        }
        used[i] = true;
        let vi = code.vector(i);
        let partner = ((i + 1)..k)
            .find(|&j| !used[j] && dot(vi, code.vector(j)) < -1.0 + ANTIPODAL_TOLERANCE);
        let chosen = match partner {
            Some(j) => {
                used[j] = true;
                let vj = code.vector(j);
                if first_nonzero_positive(vi) || !first_nonzero_positive(vj) {
                    vi
                } else {
                    vj
                }
            }
            None => vi,
        };
        kept.extend_from_slice(chosen);
    }
    Ok(UnitVectorSet::from_flat(
        code.dim(),
        kept,
        SetKind::QuasiorthonormalBasis,
    ))
}

fn first_nonzero_positive(v: &[f64]) -> bool {
    v.iter()
        .find(|x| x.abs() > ANTIPODAL_TOLERANCE)
        .is_some_and(|&x| x > 0.0)
}

/// Adds the antipode of every basis vector: `(v_1, -v_1, v_2, -v_2, ...)`.
pub fn basis_to_code(basis: &UnitVectorSet) -> Result<UnitVectorSet, GeometryError> {
    if basis.kind() != SetKind::QuasiorthonormalBasis {
        return Err(GeometryError::WrongKind {
            expected: SetKind::QuasiorthonormalBasis,
            found: basis.kind(),
        });
    }
    let mut data = Vec::with_capacity(2 * basis.as_flat().len());
    for v in basis.vectors() {
        data.extend_from_slice(v);
        data.extend(v.iter().map(|x| -x));
    }
    Ok(UnitVectorSet::from_flat(
        basis.dim(),
        data,
        SetKind::SphericalCode,
    ))
}

/// Parameters for [`generate_basis`].
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationConfig {
    pub dim: usize,
    pub count: usize,
    pub target_max_dot: f64,
    pub seed: u64,
    pub max_iterations: usize,
    pub restarts: usize,
}

impl GenerationConfig {
    pub fn new(dim: usize, count: usize, target_max_dot: f64, seed: u64) -> Self {
        GenerationConfig {
            dim,
            count,
            target_max_dot,
            seed,
            max_iterations: 4000,
            restarts: 8,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        if self.count == 0 {
            return Err(GeometryError::InvalidArgument(
                "count must be positive".into(),
            ));
        }
        if !(self.target_max_dot > 0.0 && self.target_max_dot < 1.0) {
            return Err(GeometryError::InvalidArgument(format!(
                "target_max_dot must lie in (0, 1), got {}",
                self.target_max_dot
            )));
        }
        if self.max_iterations == 0 || self.restarts == 0 {
            return Err(GeometryError::InvalidArgument(
                "max_iterations and restarts must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Searches for `count` unit vectors in `R^dim` with every `|v_i·v_j|` at
/// most `target_max_dot`.
///
/// Each restart runs projected gradient descent on the sphere against the
/// repulsion energy `sum (1 - d_ij^2)^-p`, starting at `p = 1` and sharpening
/// `p` whenever a phase converges without meeting the target. Restarts are
/// seeded independently from `config.seed`, so the output is the same whether
/// they run serially or in parallel: the restart with the lowest max dot
/// wins, ties going to the lowest restart index.
pub fn generate_basis(config: &GenerationConfig) -> Result<UnitVectorSet, GeometryError> {
    config.validate()?;
    let restarts: Vec<usize> = (0..config.restarts).collect();

    #[cfg(feature = "parallel")]
    let results: Vec<(f64, Vec<f64>)> = {
        use rayon::prelude::*;
        restarts
            .par_iter()
            .map(|&r| run_restart(config, r))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(f64, Vec<f64>)> = restarts.iter().map(|&r| run_restart(config, r)).collect();

    let (best_dot, best) = results
        .into_iter()
        .reduce(|acc, cur| if cur.0 < acc.0 { cur } else { acc })
        .expect("at least one restart");
    if best_dot > config.target_max_dot {
        return Err(GeometryError::TargetUnreachable {
            target: config.target_max_dot,
            best: best_dot,
        });
    }
    Ok(UnitVectorSet::from_flat(
        config.dim,
        best,
        SetKind::QuasiorthonormalBasis,
    ))
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    // splitmix64 finaliser
    let mut z = seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const EXPONENTS: [f64; 6] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

fn run_restart(config: &GenerationConfig, restart: usize) -> (f64, Vec<f64>) {
    let (n, k) = (config.dim, config.count);
    let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(config.seed, restart));
    let mut x: Vec<f64> = (0..n * k)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    for v in x.chunks_exact_mut(n) {
        let m = norm(v);
        if m < 1e-12 {
            v.iter_mut().for_each(|c| *c = 0.0);
            v[0] = 1.0;
        } else {
            v.iter_mut().for_each(|c| *c /= m);
        }
    }

    let mut best = x.clone();
    let mut best_dot = pair_extremes(n, &x).0;
    if k == 1 || best_dot <= config.target_max_dot {
        return (best_dot, best);
    }

    let mut grad = vec![0.0; n * k];
    let mut trial = vec![0.0; n * k];
    let mut iterations = 0;
    for &p in EXPONENTS.iter() {
        let mut energy = log_energy(n, &x, p);
        let mut step = 0.1;
        while iterations < config.max_iterations {
            iterations += 1;
            tangent_gradient(n, &x, p, &mut grad);
            let gmax = grad.chunks_exact(n).map(norm).fold(0.0f64, f64::max);
            if gmax < 1e-300 {
                break;
            }
            for ((t, xi), gi) in trial.iter_mut().zip(&x).zip(&grad) {
                *t = xi - step / gmax * gi;
            }
            for v in trial.chunks_exact_mut(n) {
                let m = norm(v);
                v.iter_mut().for_each(|c| *c /= m);
            }
            let trial_energy = log_energy(n, &trial, p);
            if trial_energy < energy {
                std::mem::swap(&mut x, &mut trial);
                energy = trial_energy;
                step = (step * 1.2).min(0.5);
                let d = pair_extremes(n, &x).0;
                if d < best_dot {
                    best_dot = d;
                    best.copy_from_slice(&x);
                    if best_dot <= config.target_max_dot {
                        return (best_dot, best);
                    }
                }
            } else {
                step *= 0.5;
                if step < 1e-14 {
                    break;
                }
            }
        }
        if iterations >= config.max_iterations {
            break;
        }
    }
    (best_dot, best)
}

/// `ln sum_{i<j} (1 - d_ij^2)^-p`, evaluated stably.
fn log_energy(n: usize, x: &[f64], p: f64) -> f64 {
    let k = x.len() / n;
    let mut terms = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            let d = dot(&x[i * n..(i + 1) * n], &x[j * n..(j + 1) * n]);
            terms.push(-p * (1.0 - d * d).max(1e-300).ln());
        }
    }
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Energy gradient projected onto each vector's tangent space, up to a
/// positive common scale.
fn tangent_gradient(n: usize, x: &[f64], p: f64, grad: &mut [f64]) {
    let k = x.len() / n;
    let mut weights = vec![0.0; k * k];
    let mut shift = f64::NEG_INFINITY;
    for i in 0..k {
        for j in (i + 1)..k {
            let d = dot(&x[i * n..(i + 1) * n], &x[j * n..(j + 1) * n]);
            let lw = -(p + 1.0) * (1.0 - d * d).max(1e-300).ln();
            weights[i * k + j] = lw;
            weights[j * k + i] = d;
            shift = shift.max(lw);
        }
    }
    grad.iter_mut().for_each(|g| *g = 0.0);
    for i in 0..k {
        for j in (i + 1)..k {
            let d = weights[j * k + i];
            let w = 2.0 * p * d * (weights[i * k + j] - shift).exp();
            for c in 0..n {
                grad[i * n + c] += w * x[j * n + c];
                grad[j * n + c] += w * x[i * n + c];
            }
        }
    }
    for (g, v) in grad.chunks_exact_mut(n).zip(x.chunks_exact(n)) {
        let radial = dot(g, v);
        g.iter_mut().zip(v).for_each(|(gc, vc)| *gc -= radial * vc);
    }
}

fn fmt_coord(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Writes the `qoc-basis v1` text format. Coordinates use the shortest
/// representation that round-trips exactly.
pub fn write_set<W: Write>(set: &UnitVectorSet, mut out: W) -> Result<(), GeometryError> {
    writeln!(
        out,
        "{FILE_MAGIC} {FILE_VERSION} dim={} count={} kind={}",
        set.dim(),
        set.len(),
        set.kind().file_tag()
    )?;
    for v in set.vectors() {
        let line: Vec<String> = v.iter().map(|&x| fmt_coord(x)).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Reads the `qoc-basis v1` text format.
pub fn read_set<R: BufRead>(input: R) -> Result<UnitVectorSet, GeometryError> {
    let mut lines = input.lines();
    let header = lines.next().ok_or(GeometryError::Parse {
        line: 1,
        message: "missing header".into(),
    })??;
    let (dim, count, kind) = parse_header(&header)?;
    let mut rows = Vec::with_capacity(count);
    for (offset, line) in lines.enumerate() {
        let line = line?;
        let lineno = offset + 2;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>().map_err(|_| GeometryError::Parse {
                    line: lineno,
                    message: format!("invalid number {t:?}"),
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if row.len() != dim {
            return Err(GeometryError::Parse {
                line: lineno,
                message: format!("expected {dim} coordinates, found {}", row.len()),
            });
        }
        rows.push(row);
    }
    if rows.len() != count {
        return Err(GeometryError::Parse {
            line: rows.len() + 1,
            message: format!("header declares {count} vectors, found {}", rows.len()),
        });
    }
    UnitVectorSet::new(dim, rows, kind)
}

fn parse_header(header: &str) -> Result<(usize, usize, SetKind), GeometryError> {
    let bad = |message: String| GeometryError::Parse { line: 1, message };
    let mut parts = header.split_whitespace();
    if parts.next() != Some(FILE_MAGIC) || parts.next() != Some(FILE_VERSION) {
        return Err(bad(format!(
            "expected '{FILE_MAGIC} {FILE_VERSION}' header"
        )));
    }
    let (mut dim, mut count, mut kind) = (None, None, None);
    for part in parts {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed field {part:?}")))?;
        match key {
            "dim" => dim = value.parse::<usize>().ok(),
            "count" => count = value.parse::<usize>().ok(),
            "kind" => {
                kind = match value {
                    "basis" => Some(SetKind::QuasiorthonormalBasis),
                    "code" => Some(SetKind::SphericalCode),
                    _ => return Err(bad(format!("unknown kind {value:?}"))),
                }
            }
            _ => return Err(bad(format!("unknown field {key:?}"))),
        }
    }
    match (dim, count, kind) {
        (Some(d), Some(c), Some(k)) if d > 0 && c > 0 => Ok((d, c, k)),
        _ => Err(bad("header needs positive dim, count and a kind".into())),
    }
}

/// Loads a spherical-code table: `dim * count` whitespace separated numbers,
/// one point per `dim` consecutive values. Rows are renormalised; a row whose
/// norm is off by more than [`PACK_NORM_TOLERANCE`] is rejected.
pub fn load_pack(text: &str, dim: usize, count: usize) -> Result<UnitVectorSet, GeometryError> {
    if dim == 0 {
        return Err(GeometryError::ZeroDimension);
    }
    let mut values = Vec::with_capacity(dim * count);
    for (lineno, line) in text.lines().enumerate() {
        for token in line.split_whitespace() {
            let x = token.parse::<f64>().map_err(|_| GeometryError::Parse {
                line: lineno + 1,
                message: format!("invalid number {token:?}"),
            })?;
            values.push(x);
        }
    }
    if values.is_empty() {
        return Err(GeometryError::Empty);
    }
    if values.len() != dim * count {
        return Err(GeometryError::InvalidArgument(format!(
            "pack holds {} numbers, expected {dim} x {count} = {}",
            values.len(),
            dim * count
        )));
    }
    let rows: Vec<Vec<f64>> = values.chunks_exact(dim).map(<[f64]>::to_vec).collect();
    for (index, row) in rows.iter().enumerate() {
        let n = norm(row);
        if (n - 1.0).abs() > PACK_NORM_TOLERANCE {
            return Err(GeometryError::NotUnit { index, norm: n });
        }
    }
    UnitVectorSet::normalized(dim, rows, SetKind::SphericalCode)
}

/// Spherical-code tables bundled with the crate.
pub mod packs {
    use super::{load_pack, UnitVectorSet};

    const CELL_24: &str = include_str!("../data/pack.4.24.txt");
    const E7_56: &str = include_str!("../data/pack.7.56.txt");
    const TAMMES_10: &str = include_str!("../data/pack.3.10.txt");

    /// 24 points in `R^4` (the 24-cell), minimum angle 60 degrees.
    pub fn four_dim_24() -> UnitVectorSet {
        load_pack(CELL_24, 4, 24).expect("bundled pack is valid")
    }

    /// 56 points in `R^7`, minimum angle `arccos(1/3)`.
    pub fn seven_dim_56() -> UnitVectorSet {
        load_pack(E7_56, 7, 56).expect("bundled pack is valid")
    }

    /// 10 points in `R^3`, minimum angle about 66.15 degrees.
    pub fn three_dim_10() -> UnitVectorSet {
        load_pack(TAMMES_10, 3, 10).expect("bundled pack is valid")
    }

    /// Looks up a bundled pack by `(dim, count)`.
    pub fn builtin(dim: usize, count: usize) -> Option<UnitVectorSet> {
        match (dim, count) {
            (4, 24) => Some(four_dim_24()),
            (7, 56) => Some(seven_dim_56()),
            (3, 10) => Some(three_dim_10()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_max_abs_dot(set: &UnitVectorSet) -> f64 {
        let rows = set.to_rows();
        let mut m: f64 = 0.0;
        for i in 0..rows.len() {
            for j in 0..rows.len() {
                if i != j {
                    let d: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
                    m = m.max(d.abs());
                }
            }
        }
        m
    }

    #[test]
    fn standard_basis_validates_orthonormal() {
        let set = UnitVectorSet::standard_basis(5).unwrap();
        let r = set.validate(0.1);
        assert!(r.is_normal);
        assert_eq!(r.max_abs_dot_observed, 0.0);
        assert_eq!(r.min_angle_degrees, 90.0);
        assert!(r.within_epsilon);
    }

    #[test]
    fn validate_reports_non_unit_rows() {
        let r = validate(&[vec![1.0, 0.0], vec![0.0, 2.0]], 0.5).unwrap();
        assert!(!r.is_normal);
        assert_eq!(r.worst_pair, Some((0, 1)));
    }

    #[test]
    fn validate_rejects_ragged_rows() {
        let err = validate(&[vec![1.0, 0.0], vec![1.0]], 0.5).unwrap_err();
        assert!(matches!(
            err,
            GeometryError::DimensionMismatch { index: 1, .. }
        ));
    }

    #[test]
    fn four_dim_pack_gives_twelve_vectors_at_sixty_degrees() {
        let basis = code_to_basis(&packs::four_dim_24()).unwrap();
        assert_eq!(basis.len(), 12);
        let r = basis.validate(0.51);
        assert!((r.max_abs_dot_observed - 0.5).abs() < 1e-12);
        assert!((r.min_angle_degrees - 60.0).abs() < 1e-9);
        assert!(r.within_epsilon);
    }

    #[test]
    fn seven_dim_pack_gives_twenty_eight_vectors() {
        let basis = code_to_basis(&packs::seven_dim_56()).unwrap();
        assert_eq!(basis.len(), 28);
        let r = basis.validate(0.34);
        assert!((r.max_abs_dot_observed - 1.0 / 3.0).abs() < 1e-12);
        assert!(r.min_angle_degrees > 70.0 && r.min_angle_degrees < 71.0);
    }

    #[test]
    fn three_dim_pack_meets_sixty_six_degrees() {
        let code = packs::three_dim_10();
        assert_eq!(code.len(), 10);
        assert!(code.min_angle_degrees() >= 66.0);
        // no antipodal pairs in this code
        assert_eq!(code_to_basis(&code).unwrap().len(), 10);
    }

    #[test]
    fn capacity_bound_values() {
        assert_eq!(capacity_lower_bound(1, 1e-12).unwrap(), 1);
        assert_eq!(capacity_lower_bound(4, 0.5).unwrap(), 3);
        assert_eq!(capacity_lower_bound(24, 0.5).unwrap(), 404);
        assert!(capacity_lower_bound(4, 0.0).is_err());
        assert!(capacity_lower_bound(4, 1.0).is_err());
    }

    #[test]
    fn antipodal_plane_code_collapses_to_basis() {
        let code = UnitVectorSet::new(
            2,
            vec![
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
            SetKind::SphericalCode,
        )
        .unwrap();
        let basis = code_to_basis(&code).unwrap();
        assert_eq!(basis.to_rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(basis.max_abs_dot(), 0.0);
    }

    #[test]
    fn antipode_choice_is_canonical() {
        let code = UnitVectorSet::new(
            2,
            vec![vec![0.0, -1.0], vec![0.0, 1.0]],
            SetKind::SphericalCode,
        )
        .unwrap();
        assert_eq!(
            code_to_basis(&code).unwrap().to_rows(),
            vec![vec![0.0, 1.0]]
        );
    }

    #[test]
    fn basis_to_code_interleaves_antipodes() {
        let code = basis_to_code(&UnitVectorSet::standard_basis(5).unwrap()).unwrap();
        assert_eq!(code.len(), 10);
        assert_eq!(code.kind(), SetKind::SphericalCode);
        assert_eq!(code.vector(3), &[0.0, -1.0, 0.0, 0.0, 0.0]);
        let one = UnitVectorSet::new(1, vec![vec![1.0]], SetKind::QuasiorthonormalBasis).unwrap();
        assert_eq!(
            basis_to_code(&one).unwrap().to_rows(),
            vec![vec![1.0], vec![-1.0]]
        );
    }

    #[test]
    fn conversions_check_kind() {
        let basis = UnitVectorSet::standard_basis(2).unwrap();
        assert!(matches!(
            code_to_basis(&basis),
            Err(GeometryError::WrongKind { .. })
        ));
        let code = basis.with_kind(SetKind::SphericalCode);
        assert!(matches!(
            basis_to_code(&code),
            Err(GeometryError::WrongKind { .. })
        ));
    }

    #[test]
    fn generate_recovers_orthonormal_basis() {
        let set = generate_basis(&GenerationConfig::new(10, 10, 1e-6, 3)).unwrap();
        assert_eq!(set.len(), 10);
        assert!(brute_max_abs_dot(&set) <= 1e-6);
        assert!(set.validate(1e-5).is_normal);
    }

    #[test]
    fn generate_five_lines_in_plane_is_unreachable() {
        match generate_basis(&GenerationConfig::new(2, 5, 0.05, 1)) {
            Err(GeometryError::TargetUnreachable { best, .. }) => {
                // 5 lines in the plane: best possible is cos 36 deg
                assert!(best >= 36f64.to_radians().cos() - 1e-9);
            }
            other => panic!("expected unreachable, got {other:?}"),
        }
    }

    #[test]
    fn generate_ten_lines_in_three_dims() {
        // 10 lines in R^3 cannot beat |dot| ~ 0.686 (46.67 deg line packing).
        match generate_basis(&GenerationConfig::new(3, 10, 0.47, 11)) {
            Err(GeometryError::TargetUnreachable { best, .. }) => assert!(best >= 0.686),
            other => panic!("expected unreachable, got {other:?}"),
        }
        let set = generate_basis(&GenerationConfig::new(3, 10, 0.72, 11)).unwrap();
        assert!(brute_max_abs_dot(&set) <= 0.72);
    }

    #[test]
    fn generate_is_reproducible() {
        let cfg = GenerationConfig::new(4, 7, 0.6, 42);
        let a = generate_basis(&cfg).unwrap();
        let b = generate_basis(&cfg).unwrap();
        assert_eq!(a.as_flat(), b.as_flat());
    }

    #[test]
    fn generation_config_rejects_bad_values() {
        let mut cfg = GenerationConfig::new(3, 3, 0.5, 0);
        cfg.restarts = 0;
        assert!(generate_basis(&cfg).is_err());
        assert!(generate_basis(&GenerationConfig::new(3, 3, 1.0, 0)).is_err());
    }

    #[test]
    fn file_roundtrip_is_exact() {
        let set = code_to_basis(&packs::seven_dim_56()).unwrap();
        let mut buf = Vec::new();
        write_set(&set, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("qoc-basis v1 dim=7 count=28 kind=basis\n"));
        let back = read_set(buf.as_slice()).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn read_set_rejects_bad_header_and_counts() {
        assert!(read_set("qoc-basis v2 dim=1 count=1 kind=basis\n1\n".as_bytes()).is_err());
        assert!(read_set("qoc-basis v1 dim=1 count=2 kind=basis\n1\n".as_bytes()).is_err());
        assert!(read_set("qoc-basis v1 dim=2 count=1 kind=code\n1\n".as_bytes()).is_err());
        let ok = read_set("qoc-basis v1 dim=1 count=2 kind=code\n1\n-1\n".as_bytes()).unwrap();
        assert_eq!(ok.kind(), SetKind::SphericalCode);
    }

    #[test]
    fn pack_loader_checks_norms_and_size() {
        assert_eq!(load_pack("", 2, 1).unwrap_err(), GeometryError::Empty);
        assert!(load_pack("1 0 0", 2, 2).is_err());
        assert!(matches!(
            load_pack("1.1 0", 2, 1),
            Err(GeometryError::NotUnit { index: 0, .. })
        ));
        let set = load_pack("0.6 0.8004\n1\n0", 2, 2).unwrap();
        assert!((norm(set.vector(0)) - 1.0).abs() < 1e-15);
    }
}
