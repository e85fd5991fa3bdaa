use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::exact::{is_zero_vector, Matrix, Scalar, Vector};
use crate::polytope::{lex_cmp, vertices, HPolytope};

use super::analysis::regular_value_check;
use super::{PratoData, PratoError};

/// Generator identifier recorded in reports.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.3): seed_from_u64(seed), set_stream(shard)";

const SHARD: usize = 1024;
const ATTEMPTS_PER_SAMPLE: usize = 1000;
const MAX_GRID_POINTS: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingConfig {
    pub seed: u64,
    pub samples: usize,
    /// Grid resolution `h`.
    pub grid: f64,
    /// Rounding guard for membership of float samples.
    pub epsilon: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig { seed: 0x5EED, samples: 10_000, grid: 0.01, epsilon: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexAttainment {
    pub vertex: Vector,
    /// `s_i = |z_i|²` of the constructed zero-fibre point.
    pub s: Vector,
    /// `ι*(s + λ)`, exactly zero when attained.
    pub constraint_residual: Vector,
    pub recovered: Option<Vector>,
    pub attained: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloStats {
    pub rng: String,
    pub seed: u64,
    pub shard_size: usize,
    pub samples_requested: usize,
    pub samples_accepted: usize,
    pub attempts: usize,
    pub contained: usize,
    pub epsilon: f64,
    /// Largest `λ_i - <a_i, η>` over samples (negative when strictly inside).
    pub max_violation: f64,
    pub max_constraint_residual: f64,
}

/// Grid points of step `h` in `P`, each lifted to the zero fibre and mapped
/// back, plus how many of them the random cloud reaches.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridCoverage {
    pub h: f64,
    pub epsilon: f64,
    pub points: usize,
    /// Points whose lift maps back within `epsilon`.
    pub lifted: usize,
    pub max_lift_error: f64,
    pub first_unlifted: Option<Vec<f64>>,
    /// Radius `h·sqrt(dim)` used for the sample cloud.
    pub sample_radius: f64,
    pub sample_covered: usize,
    pub skipped: Option<String>,
}

impl GridCoverage {
    pub fn complete(&self) -> bool {
        self.skipped.is_none() && self.lifted == self.points
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentImageReport {
    pub empty: bool,
    pub regular: bool,
    pub vertex_attainment: Vec<VertexAttainment>,
    pub all_vertices_attained: bool,
    /// Images of the vertices of the zero-fibre polytope in `s`-space.
    pub image_vertices: Vec<Vector>,
    pub image_equals_polytope: bool,
    pub monte_carlo: Option<MonteCarloStats>,
    pub grid: Option<GridCoverage>,
    pub verified: bool,
    pub summary: String,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Vertices of `{s ≥ 0 : ι*(s + λ) = 0}` mapped to `E*`, computed from basic
/// solutions without reference to the polytope's own vertex enumeration.
fn exact_image_vertices(d: &PratoData) -> Vec<Vector> {
    let k = d.null_dim();
    let rhs: Vector = d.iota_star.mul_vec(&d.lambda).iter().map(|x| -x).collect();
    let mut out: Vec<Vector> = Vec::new();
    for basic in subsets(d.n, k) {
        let m = Matrix::from_cols(basic.iter().map(|&i| d.iota_star.col(i)).collect(), k);
        if m.rank() < k {
            continue;
        }
        let Some(sb) = m.solve(&rhs) else { continue };
        if sb.iter().any(Scalar::is_negative) {
            continue;
        }
        let mut s = vec![Scalar::zero(); d.n];
        for (j, &i) in basic.iter().enumerate() {
            s[i] = sb[j].clone();
        }
        let eta = d.eta_of(&s).expect("s + λ annihilates n");
        if !out.contains(&eta) {
            out.push(eta);
        }
    }
    out.sort_by(|a, b| lex_cmp(a, b));
    out
}

fn to_dmatrix(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).to_f64())
}

struct Sampler {
    n: usize,
    lo: f64,
    hi: f64,
    null: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    target: DVector<f64>,
    lambda: DVector<f64>,
    eta_solve: DMatrix<f64>,
}

impl Sampler {
    fn new(d: &PratoData, smax: f64) -> Self {
        let null = to_dmatrix(&d.iota_star).transpose();
        let gram_inv = (null.transpose() * &null).try_inverse().expect("null basis is independent");
        let lambda = DVector::from_iterator(d.n, d.lambda.iter().map(Scalar::to_f64));
        let target = -(null.transpose() * &lambda);
        let pi = to_dmatrix(&d.pi);
        let eta_solve = (&pi * pi.transpose()).try_inverse().expect("π has full rank") * &pi;
        let scale = if smax > 0.0 { smax } else { 1.0 };
        Sampler { n: d.n, lo: -0.5 * scale, hi: 1.5 * scale, null, gram_inv, target, lambda, eta_solve }
    }

    /// Orthogonal projection onto the affine constraint.
    fn project(&self, x: DVector<f64>) -> DVector<f64> {
        let defect = self.null.transpose() * &x - &self.target;
        x - &self.null * (&self.gram_inv * defect)
    }

    fn draw(&self, rng: &mut ChaCha20Rng) -> DVector<f64> {
        self.project(DVector::from_fn(self.n, |_, _| rng.gen_range(self.lo..self.hi)))
    }

    fn eta(&self, s: &DVector<f64>) -> DVector<f64> {
        &self.eta_solve * (s + &self.lambda)
    }

    fn residual(&self, s: &DVector<f64>) -> f64 {
        (self.null.transpose() * s - &self.target).amax()
    }
}

fn exact_from_f64(x: f64) -> Scalar {
    Scalar::rational(BigRational::from_float(x).expect("finite sample"))
}

fn sample_images(sampler: &Sampler, p: &HPolytope, cfg: &SamplingConfig) -> (MonteCarloStats, Vec<Vec<f64>>) {
    let guard = exact_from_f64(cfg.epsilon);
    let mut stats = MonteCarloStats {
        rng: RNG_ALGORITHM.into(),
        seed: cfg.seed,
        shard_size: SHARD,
        samples_requested: cfg.samples,
        samples_accepted: 0,
        attempts: 0,
        contained: 0,
        epsilon: cfg.epsilon,
        max_violation: f64::NEG_INFINITY,
        max_constraint_residual: 0.0,
    };
    let mut images = Vec::with_capacity(cfg.samples);
    let shards = cfg.samples.div_ceil(SHARD);
    for shard in 0..shards {
        let want = SHARD.min(cfg.samples - shard * SHARD);
        let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
        rng.set_stream(shard as u64);
        let mut got = 0;
        let mut tries = 0;
        while got < want && tries < want * ATTEMPTS_PER_SAMPLE {
            tries += 1;
            let s = sampler.draw(&mut rng);
            if s.iter().any(|&x| x < 0.0) {
                continue;
            }
            got += 1;
            let eta: Vec<f64> = sampler.eta(&s).iter().copied().collect();
            let exact: Vector = eta.iter().map(|&x| exact_from_f64(x)).collect();
            let mut inside = true;
            for i in 0..p.facet_count() {
                let slack = p.slack(i, &exact);
                stats.max_violation = stats.max_violation.max(-slack.to_f64());
                if (&slack + &guard).is_negative() {
                    inside = false;
                }
            }
            stats.contained += usize::from(inside);
            stats.max_constraint_residual = stats.max_constraint_residual.max(sampler.residual(&s));
            images.push(eta);
        }
        stats.samples_accepted += got;
        stats.attempts += tries;
    }
    (stats, images)
}

fn cell_of(x: &[f64], r: f64) -> Vec<i64> {
    x.iter().map(|v| (v / r).floor() as i64).collect()
}

fn neighbours(cell: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &c in cell {
        out = out
            .into_iter()
            .flat_map(|pre| (-1..=1).map(move |o| {
                let mut v = pre.clone();
                v.push(c + o);
                v
            }))
            .collect();
    }
    out
}

/// A grid point `x` is lifted to `s = <a_i, x> - λ_i`, projected onto the
/// constraint and mapped back; it counts when the result is within
/// `epsilon` of `x` and `s ≥ -epsilon`.
fn grid_coverage(
    sampler: &Sampler,
    p: &HPolytope,
    verts: &[Vector],
    images: &[Vec<f64>],
    h: f64,
    epsilon: f64,
) -> GridCoverage {
    let dim = p.dim();
    let radius = h * (dim.max(1) as f64).sqrt();
    let mut cov = GridCoverage {
        h,
        epsilon,
        points: 0,
        lifted: 0,
        max_lift_error: 0.0,
        first_unlifted: None,
        sample_radius: radius,
        sample_covered: 0,
        skipped: None,
    };
    if dim == 0 {
        cov.points = 1;
        cov.lifted = 1;
        cov.sample_covered = usize::from(!images.is_empty());
        return cov;
    }
    let fv: Vec<Vec<f64>> = verts.iter().map(|v| v.iter().map(Scalar::to_f64).collect()).collect();
    let lo: Vec<f64> = (0..dim).map(|j| fv.iter().map(|v| v[j]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..dim).map(|j| fv.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let steps: Vec<usize> = (0..dim).map(|j| ((hi[j] - lo[j]) / h + 1e-9).floor() as usize + 1).collect();
    let total = steps.iter().try_fold(1usize, |a, &s| a.checked_mul(s));
    if total.is_none_or(|t| t > MAX_GRID_POINTS) {
        cov.skipped = Some(format!("grid exceeds {MAX_GRID_POINTS} points"));
        return cov;
    }
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, x) in images.iter().enumerate() {
        buckets.entry(cell_of(x, radius)).or_default().push(i);
    }
    let normals: Vec<Vec<f64>> = p.normals().iter().map(|a| a.iter().map(Scalar::to_f64).collect()).collect();
    let offsets: Vec<f64> = p.offsets().iter().map(Scalar::to_f64).collect();
    let mut idx = vec![0usize; dim];
    loop {
        let x: Vec<f64> = (0..dim).map(|j| lo[j] + idx[j] as f64 * h).collect();
        let inside = normals
            .iter()
            .zip(&offsets)
            .all(|(a, l)| a.iter().zip(&x).map(|(u, v)| u * v).sum::<f64>() - l >= -1e-12);
        if inside {
            cov.points += 1;
            let s = DVector::from_fn(sampler.n, |i, _| {
                normals[i].iter().zip(&x).map(|(u, v)| u * v).sum::<f64>() - offsets[i]
            });
            let s = sampler.project(s);
            let back = sampler.eta(&s);
            let err = back.iter().zip(&x).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            cov.max_lift_error = cov.max_lift_error.max(err);
            if err <= epsilon && s.iter().all(|&v| v >= -epsilon) {
                cov.lifted += 1;
            } else if cov.first_unlifted.is_none() {
                cov.first_unlifted = Some(x.clone());
            }
            let hit = neighbours(&cell_of(&x, radius)).iter().any(|c| {
                buckets.get(c).is_some_and(|b| {
                    b.iter().any(|&i| images[i].iter().zip(&x).map(|(u, v)| (u - v) * (u - v)).sum::<f64>() <= radius * radius)
                })
            });
            cov.sample_covered += usize::from(hit);
        }
        let mut j = 0;
        loop {
            if j == dim {
                return cov;
            }
            idx[j] += 1;
            if idx[j] < steps[j] {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Exact vertex attainment, an exact image computed in `s`-space, Monte
/// Carlo containment and grid coverage.
pub fn moment_image(d: &PratoData, p: &HPolytope, cfg: &SamplingConfig) -> Result<MomentImageReport, PratoError> {
    if !(cfg.grid > 0.0) || !(cfg.epsilon >= 0.0) {
        return Err(PratoError::Input("grid must be positive and epsilon nonnegative".into()));
    }
    let verts = vertices(p)?;
    if verts.is_empty() {
        return Ok(MomentImageReport {
            empty: true,
            regular: true,
            vertex_attainment: Vec::new(),
            all_vertices_attained: true,
            image_vertices: Vec::new(),
            image_equals_polytope: true,
            monte_carlo: None,
            grid: None,
            verified: true,
            summary: "empty image, vacuous pass".into(),
        });
    }
    let regular = regular_value_check(d, p)?.regular;
    let vertex_attainment: Vec<VertexAttainment> = verts
        .iter()
        .map(|v| {
            let s = d.fibre_point(&v.point);
            let constraint_residual = d.constraint(&s);
            let recovered = d.eta_of(&s);
            let attained = s.iter().all(|x| !x.is_negative())
                && is_zero_vector(&constraint_residual)
                && recovered.as_ref() == Some(&v.point);
            VertexAttainment { vertex: v.point.clone(), s, constraint_residual, recovered, attained }
        })
        .collect();
    let all_vertices_attained = vertex_attainment.iter().all(|v| v.attained);
    let image_vertices = exact_image_vertices(d);
    let points: Vec<Vector> = verts.iter().map(|v| v.point.clone()).collect();
    let image_equals_polytope = image_vertices == points;

    let smax = vertex_attainment.iter().flat_map(|v| v.s.iter().map(Scalar::to_f64)).fold(0.0, f64::max);
    let sampler = Sampler::new(d, smax);
    let (stats, images) = sample_images(&sampler, p, cfg);
    let grid = grid_coverage(&sampler, p, &points, &images, cfg.grid, cfg.epsilon);
    let sampled_ok = stats.samples_accepted == cfg.samples && stats.contained == stats.samples_accepted;
    let verified = all_vertices_attained && image_equals_polytope && sampled_ok && grid.complete();
    let verdict = if verified { "verified" } else { "not verified" };
    let summary = if p.dim() == 1 {
        format!("[{},{}] {verdict}", points[0][0], points[points.len() - 1][0])
    } else {
        format!("polytope with {} vertices {verdict}", points.len())
    };
    Ok(MomentImageReport {
        empty: false,
        regular,
        vertex_attainment,
        all_vertices_attained,
        image_vertices,
        image_equals_polytope,
        monte_carlo: Some(stats),
        grid: Some(grid),
        verified,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::super::build_prato_data;
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn quasi_interval_vertices_attained() {
        let s = quasi_interval();
        let d = build_prato_data(&s, None).unwrap();
        let cfg = SamplingConfig { samples: 2000, ..SamplingConfig::default() };
        let rep = moment_image(&d, &s.polytope, &cfg).unwrap();
        assert_eq!(rep.vertex_attainment[0].s, vec![Scalar::zero(), sqrt2()]);
        assert_eq!(rep.vertex_attainment[1].s, vec![Scalar::one(), Scalar::zero()]);
        assert!(rep.all_vertices_attained && rep.image_equals_polytope);
        assert!(rep.verified, "{rep:?}");
        assert_eq!(rep.summary, "[0,1] verified");
    }

    #[test]
    fn triangle_image() {
        let s = triangle();
        let d = build_prato_data(&s, None).unwrap();
        let cfg = SamplingConfig { samples: 3000, grid: 0.05, ..SamplingConfig::default() };
        let rep = moment_image(&d, &s.polytope, &cfg).unwrap();
        assert!(rep.verified, "{:?}", rep.grid);
    }

    #[test]
    fn empty_polytope() {
        let s = from_rows(&[&[1], &[-1]], &[1, 0]);
        let d = build_prato_data(&s, None).unwrap();
        let rep = moment_image(&d, &s.polytope, &SamplingConfig::default()).unwrap();
        assert!(rep.empty && rep.verified);
    }

    #[test]
    fn seeds_are_reproducible() {
        let s = rational_interval(1);
        let d = build_prato_data(&s, None).unwrap();
        let cfg = SamplingConfig { samples: 1500, ..SamplingConfig::default() };
        let a = moment_image(&d, &s.polytope, &cfg).unwrap();
        let b = moment_image(&d, &s.polytope, &cfg).unwrap();
        assert_eq!(a, b);
        let c = moment_image(&d, &s.polytope, &SamplingConfig { seed: 7, ..cfg }).unwrap();
        assert_ne!(a.monte_carlo.unwrap().max_violation, c.monte_carlo.unwrap().max_violation);
    }
}
