//! Norm-attaining eigenframes and certified numerical-range membership.
//!
//! The membership test decides whether 0 lies in the numerical range of a
//! compression (or in the convex hull of several) through the support
//! function h(theta) = lambda_max(Re(e^{-i theta} C)). A negative support
//! value is a complete "outside" certificate; an "inside" verdict is only
//! issued together with a replayable witness vector (or convex mixture)
//! whose quadratic form is within tolerance of zero. Grid refinement is
//! backed by the Lipschitz bound |h'| <= |C|, and anything the procedure
//! cannot settle is reported as Borderline with the residual interval.


use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    c64, hermitian_eigen_desc, spectral_decomposition, AlgebraElement, BlockAlgebra, CMatrix,
    CVector,
};
use crate::error::{Error, Result};

/// Tri-state certified answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certainty {
    Holds,
    Fails,
    Borderline,
}

/// One block of a norm-attaining eigenframe.
#[derive(Debug, Clone)]
pub struct FrameBlock {
    /// Block top eigenvalue reaches the global maximum within tolerance.
    pub attained: bool,
    /// Largest eigenvalue of this block.
    pub top_value: f64,
    /// Orthonormal basis (columns) of the clustered top eigenspace.
    /// Empty (zero columns) for non-attained blocks.
    pub basis: CMatrix,
}

/// Per-block orthonormal bases of the top eigenspaces of a positive element.
///
/// The attainment vectors are exactly the pure-state vectors realizing
/// rho(p) = |p|.
#[derive(Debug, Clone)]
pub struct EigenFrame {
    algebra: BlockAlgebra,
    /// The global top eigenvalue, i.e. |p|.
    pub global_top: f64,
    pub blocks: Vec<FrameBlock>,
    /// Set when an eigenvalue sits inside the guard window around the
    /// clustering or attainment threshold; verdicts built on such frames are
    /// downgraded to Borderline.
    pub near_degenerate: bool,
    /// The eps_eig used to build the frame.
    pub eps_eig: f64,
}

impl EigenFrame {
    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn attained_blocks(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.attained)
            .map(|(k, _)| k)
    }
}

/// Frame of the eigenspaces within `eps_eig * |p|` of each block maximum,
/// with attainment relative to the global maximum.
pub fn top_eigenframe(p: &AlgebraElement, eps_eig: f64) -> Result<EigenFrame> {
    let spec = spectral_decomposition(p, 1e-8)?;
    let norm = p.operator_norm();
    if let Some(&lambda) = spec
        .blocks
        .iter()
        .flat_map(|b| b.eigenvalues.iter())
        .find(|&&l| l < -eps_eig * norm.max(1e-300))
    {
        return Err(Error::NotPositive { eigenvalue: lambda });
    }

    let global_top = spec.max_eigenvalue().max(0.0);
    let scale = global_top.max(0.0);
    let window = eps_eig * scale;
    let guard = 10.0 * eps_eig * scale;
    let mut near_degenerate = false;

    let blocks: Vec<FrameBlock> = spec
        .blocks
        .iter()
        .map(|b| {
            let block_top = b.eigenvalues.first().copied().unwrap_or(0.0);
            // For p = 0 every state attains the norm.
            let attained = scale == 0.0 || block_top >= global_top - window;
            if !attained && block_top > global_top - guard {
                near_degenerate = true;
            }
            let d = if attained {
                let cluster = b
                    .eigenvalues
                    .iter()
                    .take_while(|&&l| l >= block_top - window)
                    .count();
                if let Some(&next) = b.eigenvalues.get(cluster) {
                    if next > block_top - guard {
                        near_degenerate = true;
                    }
                }
                cluster
            } else {
                0
            };
            let basis = CMatrix::from_fn(b.vectors.nrows(), d, |r, c| b.vectors[(r, c)]);
            FrameBlock {
                attained,
                top_value: block_top,
                basis,
            }
        })
        .collect();

    Ok(EigenFrame {
        algebra: p.algebra().clone(),
        global_top,
        blocks,
        near_degenerate,
        eps_eig,
    })
}

/// A compression of one algebra block to a frame's top eigenspace.
#[derive(Debug, Clone)]
pub struct Compression {
    pub block: usize,
    pub matrix: CMatrix,
}

/// Compresses `c` to the attained top eigenspaces: `C_k = B_k* c_k B_k`.
pub fn compress(c: &AlgebraElement, frame: &EigenFrame) -> Result<Vec<Compression>> {
    if c.algebra() != frame.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    Ok(frame
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| b.attained && b.basis.ncols() > 0)
        .map(|(k, b)| Compression {
            block: k,
            matrix: b.basis.adjoint() * c.block(k) * &b.basis,
        })
        .collect())
}

/// Support function of the numerical range:
/// h(theta) = lambda_max((e^{-i theta} C + e^{i theta} C*) / 2).
pub fn support_function(c: &CMatrix, theta: f64) -> f64 {
    rotated_real_part(c, theta)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b))
}

fn rotated_real_part(c: &CMatrix, theta: f64) -> CMatrix {
    let z = Complex64::from_polar(1.0, -theta);
    let rotated = c * z;
    (&rotated + rotated.adjoint()) * c64(0.5, 0.0)
}

/// Quadratic form `<C v, v>` for a unit vector `v`.
pub fn quad_form(c: &CMatrix, v: &CVector) -> Complex64 {
    v.dotc(&(c * v))
}

/// Membership mode: one numerical range, or the convex hull across blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroMode {
    Single,
    Hull,
}

/// Realizing data for a Holds answer.
#[derive(Debug, Clone)]
pub enum ZeroWitness {
    /// A unit vector in the coordinates of one input matrix.
    Vector {
        index: usize,
        vector: CVector,
        value: Complex64,
    },
    /// A convex mixture of unit vectors across input matrices.
    Mixture { terms: Vec<MixtureTerm> },
}

#[derive(Debug, Clone)]
pub struct MixtureTerm {
    pub weight: f64,
    pub index: usize,
    pub vector: CVector,
    pub value: Complex64,
}

/// Certification trace: the grid minimum, the Lipschitz slack in play, and
/// for Borderline the residual interval around zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificationDetail {
    pub grid_min: Option<f64>,
    pub lower_bound: Option<f64>,
    pub lipschitz: f64,
    pub evaluations: usize,
    pub witness_residual: Option<f64>,
    /// Direction of the most negative support value seen (Fails only).
    pub worst_theta: Option<f64>,
}

/// Tri-state answer with certified margin and optional witness.
#[derive(Debug, Clone)]
pub struct CertifiedBool {
    pub answer: Certainty,
    pub margin: f64,
    pub detail: CertificationDetail,
    pub witness: Option<ZeroWitness>,
}

/// Grid parameters for the support-function certification.
#[derive(Debug, Clone, Copy)]
pub struct GridConfig {
    pub coarse_points: usize,
    pub initial_points: usize,
    pub max_depth: usize,
    pub eval_cap: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            coarse_points: 48,
            initial_points: 720,
            max_depth: 20,
            eval_cap: 8192,
        }
    }
}

/// Decides whether 0 lies in the numerical range of the single given matrix
/// (`Single`) or in the convex hull of the ranges of all given matrices
/// (`Hull`). On Holds the certificate is a realizing unit vector or a convex
/// mixture across matrices with quadratic form within `tol` of zero.
pub fn contains_zero(matrices: &[CMatrix], mode: ZeroMode, tol: f64) -> Result<CertifiedBool> {
    contains_zero_with(matrices, mode, tol, &GridConfig::default())
}

pub fn contains_zero_with(
    matrices: &[CMatrix],
    mode: ZeroMode,
    tol: f64,
    grid: &GridConfig,
) -> Result<CertifiedBool> {
    if matrices.is_empty() {
        return Err(Error::EmptyInput);
    }
    if mode == ZeroMode::Single && matrices.len() != 1 {
        return Err(Error::Config(
            "single mode expects exactly one compression".into(),
        ));
    }
    if tol <= 0.0 {
        return Err(Error::Config("tolerance must be positive".into()));
    }

    let scale: f64 = matrices
        .iter()
        .map(crate::algebra::top_singular_value)
        .fold(0.0, f64::max);
    let slack = 1e-12 * scale.max(1.0);

    // Point sets (all matrices 1x1) admit exact convex geometry.
    if matrices.iter().all(|m| m.nrows() == 1 && m.ncols() == 1) {
        return Ok(decide_point_set(matrices, tol));
    }

    let mut searcher = WitnessSearch::new(matrices, tol, slack);

    // Cheap candidate vectors often settle membership outright.
    if let Some(w) = searcher.precheck() {
        return Ok(holds(w, &searcher, scale));
    }

    // Coarse negativity scan: one negative support value refutes membership.
    let mut cert = Certifier::new(matrices, scale, slack, grid);
    if let Some(out) = cert.coarse_scan() {
        return Ok(out);
    }
    if let Some(out) = cert.refine() {
        return Ok(out);
    }

    // No certified negative direction; hunt for a witness.
    if let Some(w) = searcher.full_search() {
        let mut res = holds(w, &searcher, scale);
        res.detail.grid_min = Some(cert.grid_min);
        res.detail.lower_bound = Some(cert.lower_bound);
        res.detail.evaluations += cert.evaluations;
        return Ok(res);
    }

    Ok(CertifiedBool {
        answer: Certainty::Borderline,
        margin: 0.0,
        detail: CertificationDetail {
            grid_min: Some(cert.grid_min),
            lower_bound: Some(cert.lower_bound),
            lipschitz: cert.lipschitz,
            evaluations: cert.evaluations + searcher.evaluations,
            witness_residual: searcher.best_residual,
            worst_theta: None,
        },
        witness: None,
    })
}

fn holds(witness: ZeroWitness, searcher: &WitnessSearch<'_>, _scale: f64) -> CertifiedBool {
    let value = match &witness {
        ZeroWitness::Vector { value, .. } => value.norm(),
        ZeroWitness::Mixture { terms } => terms
            .iter()
            .map(|t| t.value * c64(t.weight, 0.0))
            .sum::<Complex64>()
            .norm(),
    };
    CertifiedBool {
        answer: Certainty::Holds,
        margin: (searcher.tol - value).max(f64::MIN_POSITIVE),
        detail: CertificationDetail {
            grid_min: None,
            lower_bound: None,
            lipschitz: 0.0,
            evaluations: searcher.evaluations,
            witness_residual: Some(value),
            worst_theta: None,
        },
        witness: Some(witness),
    }
}

/// Exact decision when every numerical range is a single point.
fn decide_point_set(matrices: &[CMatrix], tol: f64) -> CertifiedBool {
    let points: Vec<Complex64> = matrices.iter().map(|m| m[(0, 0)]).collect();
    let one = |index: usize| ZeroWitness::Vector {
        index,
        vector: CVector::from_element(1, c64(1.0, 0.0)),
        value: points[index],
    };

    if let Some(i) = (0..points.len()).find(|&i| points[i].norm() <= tol) {
        let w = one(i);
        return point_holds(w, tol, points[i].norm());
    }

    // Closest point of the convex hull to the origin, via segments.
    let mut best: (f64, usize, usize, f64) = (f64::INFINITY, 0, 0, 0.0);
    for i in 0..points.len() {
        for j in i..points.len() {
            let (s, v) = segment_closest(points[i], points[j]);
            if v.norm() < best.0 {
                best = (v.norm(), i, j, s);
            }
        }
    }
    let (dist, i, j, s) = best;
    if dist <= tol {
        let mut terms = Vec::new();
        if 1.0 - s > 1e-12 {
            terms.push(MixtureTerm {
                weight: 1.0 - s,
                index: i,
                vector: CVector::from_element(1, c64(1.0, 0.0)),
                value: points[i],
            });
        }
        if s > 1e-12 {
            terms.push(MixtureTerm {
                weight: s,
                index: j,
                vector: CVector::from_element(1, c64(1.0, 0.0)),
                value: points[j],
            });
        }
        let w = if terms.len() == 1 {
            one(terms[0].index)
        } else {
            ZeroWitness::Mixture { terms }
        };
        return point_holds(w, tol, dist);
    }
    // Interior test through a three-point cover.
    if let Some(terms) = caratheodory_cover(&points) {
        let value: Complex64 = terms.iter().map(|&(w, i)| points[i] * c64(w, 0.0)).sum();
        if value.norm() <= tol {
            let terms = terms
                .into_iter()
                .filter(|&(w, _)| w > 1e-12)
                .map(|(w, i)| MixtureTerm {
                    weight: w,
                    index: i,
                    vector: CVector::from_element(1, c64(1.0, 0.0)),
                    value: points[i],
                })
                .collect();
            return point_holds(ZeroWitness::Mixture { terms }, tol, value.norm());
        }
    }
    let closest = points[i] * c64(1.0 - s, 0.0) + points[j] * c64(s, 0.0);
    CertifiedBool {
        answer: Certainty::Fails,
        margin: dist,
        detail: CertificationDetail {
            grid_min: Some(-dist),
            lower_bound: Some(-dist),
            lipschitz: 0.0,
            evaluations: points.len(),
            witness_residual: None,
            worst_theta: Some(closest.arg() + std::f64::consts::PI),
        },
        witness: None,
    }
}

fn point_holds(witness: ZeroWitness, tol: f64, residual: f64) -> CertifiedBool {
    CertifiedBool {
        answer: Certainty::Holds,
        margin: (tol - residual).max(f64::MIN_POSITIVE),
        detail: CertificationDetail {
            grid_min: None,
            lower_bound: None,
            lipschitz: 0.0,
            evaluations: 1,
            witness_residual: Some(residual),
            worst_theta: None,
        },
        witness: Some(witness),
    }
}

/// Closest point of the segment [z1, z2] to the origin: returns the
/// parameter s in [0,1] and the point (1-s) z1 + s z2.
fn segment_closest(z1: Complex64, z2: Complex64) -> (f64, Complex64) {
    let d = z2 - z1;
    let denom = d.norm_sqr();
    if denom < 1e-300 {
        return (0.0, z1);
    }
    let s = ((-z1) * d.conj()).re / denom;
    let s = s.clamp(0.0, 1.0);
    (s, z1 * c64(1.0 - s, 0.0) + z2 * c64(s, 0.0))
}

/// Convex combination of at most three points covering the origin, as
/// (weight, point index) pairs. None when 0 is outside the hull.
fn caratheodory_cover(points: &[Complex64]) -> Option<Vec<(f64, usize)>> {
    let hull = convex_hull_indices(points);
    if hull.len() < 3 {
        return None;
    }
    // Anchor at the hull vertex farthest from the origin, shoot the ray
    // through 0, and find the exit edge.
    let p1_idx = *hull
        .iter()
        .max_by(|&&a, &&b| {
            points[a]
                .norm()
                .partial_cmp(&points[b].norm())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    let p1 = points[p1_idx];
    if p1.norm() < 1e-300 {
        return Some(vec![(1.0, p1_idx)]);
    }
    for w in 0..hull.len() {
        let (ia, ib) = (hull[w], hull[(w + 1) % hull.len()]);
        if ia == p1_idx || ib == p1_idx {
            continue;
        }
        let (a, b) = (points[ia], points[ib]);
        // Solve (1 - t) p1 = (1 - u) a + u b for real t, u.
        let m = [
            [-(-p1.re), (b - a).re],
            [-(-p1.im), (b - a).im],
        ];
        let rhs = [(p1 - a).re, (p1 - a).im];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-300 {
            continue;
        }
        let t = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
        let u = (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det;
        if !(0.0..=1.0).contains(&u) || t < 1.0 - 1e-12 {
            continue;
        }
        let s = (1.0 / t).clamp(0.0, 1.0);
        return Some(vec![
            (1.0 - s, p1_idx),
            (s * (1.0 - u), ia),
            (s * u, ib),
        ]);
    }
    None
}

/// Indices of the convex hull (counterclockwise, Andrew's monotone chain).
fn convex_hull_indices(points: &[Complex64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        (points[a].re, points[a].im)
            .partial_cmp(&(points[b].re, points[b].im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    idx.dedup_by(|&mut a, &mut b| (points[a] - points[b]).norm() < 1e-15);
    if idx.len() < 3 {
        return idx;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| -> f64 {
        (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
    };
    let chain = |order: &mut dyn Iterator<Item = usize>| -> Vec<usize> {
        let mut half: Vec<usize> = Vec::new();
        for i in order {
            while half.len() >= 2 {
                let o = points[half[half.len() - 2]];
                let a = points[half[half.len() - 1]];
                if cross(o, a, points[i]) <= 0.0 {
                    half.pop();
                } else {
                    break;
                }
            }
            half.push(i);
        }
        half
    };
    let mut lower = chain(&mut idx.iter().copied());
    let mut upper = chain(&mut idx.iter().rev().copied());
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

// ---------------------------------------------------------------------------
// Grid certification
// ---------------------------------------------------------------------------

struct Certifier<'a> {
    matrices: &'a [CMatrix],
    lipschitz: f64,
    slack: f64,
    grid: GridConfig,
    grid_min: f64,
    worst_theta: f64,
    lower_bound: f64,
    evaluations: usize,
}

impl<'a> Certifier<'a> {
    fn new(matrices: &'a [CMatrix], scale: f64, slack: f64, grid: &GridConfig) -> Self {
        Certifier {
            matrices,
            lipschitz: scale,
            slack,
            grid: *grid,
            grid_min: f64::INFINITY,
            worst_theta: 0.0,
            lower_bound: f64::NEG_INFINITY,
            evaluations: 0,
        }
    }

    fn eval(&mut self, theta: f64) -> f64 {
        self.evaluations += 1;
        let g = self
            .matrices
            .iter()
            .map(|m| support_function(m, theta))
            .fold(f64::NEG_INFINITY, f64::max);
        if g < self.grid_min {
            self.grid_min = g;
            self.worst_theta = theta;
        }
        g
    }

    fn fails(&self, margin: f64) -> CertifiedBool {
        CertifiedBool {
            answer: Certainty::Fails,
            margin,
            detail: CertificationDetail {
                grid_min: Some(self.grid_min),
                lower_bound: Some(self.lower_bound.max(self.grid_min - self.lipschitz)),
                lipschitz: self.lipschitz,
                evaluations: self.evaluations,
                witness_residual: None,
                worst_theta: Some(self.worst_theta),
            },
            witness: None,
        }
    }

    fn coarse_scan(&mut self) -> Option<CertifiedBool> {
        let n = self.grid.coarse_points;
        let mut min = f64::INFINITY;
        for i in 0..n {
            min = min.min(self.eval(i as f64 * std::f64::consts::TAU / n as f64));
        }
        (min < -self.slack).then(|| self.fails(-min))
    }

    /// Bisects uncertified cells; Some(Fails) when a negative support value
    /// appears, None when every cell is certified nonnegative or the budget
    /// runs out (then `lower_bound` carries the residual interval).
    fn refine(&mut self) -> Option<CertifiedBool> {
        let n = self.grid.initial_points;
        let r0 = std::f64::consts::PI / n as f64;
        let mut work: Vec<(f64, f64, f64, usize)> = Vec::new();
        let mut exhausted_lower = f64::INFINITY;
        for i in 0..n {
            let theta = (2 * i) as f64 * r0;
            let g = self.eval(theta);
            if g < -self.slack {
                return Some(self.fails(-g));
            }
            if g < self.lipschitz * r0 {
                work.push((theta, r0, g, 0));
            }
        }
        while let Some((theta, r, _g, depth)) = work.pop() {
            if self.evaluations > self.grid.eval_cap {
                exhausted_lower = exhausted_lower.min(-self.lipschitz * r);
                break;
            }
            if depth >= self.grid.max_depth {
                exhausted_lower = exhausted_lower.min(_g - self.lipschitz * r);
                continue;
            }
            for child in [theta - r / 2.0, theta + r / 2.0] {
                let gc = self.eval(child);
                if gc < -self.slack {
                    return Some(self.fails(-gc));
                }
                if gc < self.lipschitz * (r / 2.0) {
                    work.push((child, r / 2.0, gc, depth + 1));
                }
            }
        }
        self.lower_bound = if exhausted_lower.is_finite() {
            exhausted_lower
        } else {
            0.0
        };
        None
    }
}

// ---------------------------------------------------------------------------
// Witness search
// ---------------------------------------------------------------------------

struct Candidate {
    index: usize,
    vector: CVector,
    value: Complex64,
}

type BestPair = Option<(f64, (CVector, Complex64), (CVector, Complex64))>;

struct Probe {
    direct: Option<(CVector, Complex64)>,
    offset: Option<f64>,
}

struct WitnessSearch<'a> {
    matrices: &'a [CMatrix],
    tol: f64,
    #[allow(dead_code)]
    slack: f64,
    evaluations: usize,
    best_residual: Option<f64>,
    candidates: Vec<Candidate>,
}

impl<'a> WitnessSearch<'a> {
    fn new(matrices: &'a [CMatrix], tol: f64, slack: f64) -> Self {
        WitnessSearch {
            matrices,
            tol,
            slack,
            evaluations: 0,
            best_residual: None,
            candidates: Vec::new(),
        }
    }

    fn note(&mut self, residual: f64) {
        self.best_residual = Some(self.best_residual.map_or(residual, |b| b.min(residual)));
    }

    fn push_candidate(&mut self, index: usize, vector: CVector) -> Option<ZeroWitness> {
        let value = quad_form(&self.matrices[index], &vector);
        self.evaluations += 1;
        self.note(value.norm());
        let hit = value.norm() <= self.tol;
        self.candidates.push(Candidate {
            index,
            vector: vector.clone(),
            value,
        });
        hit.then(|| ZeroWitness::Vector {
            index,
            vector,
            value,
        })
    }

    /// Coordinate vectors and Hermitian/skew-part eigenvectors; also the
    /// two-point path across any candidate pair whose values straddle zero.
    fn precheck(&mut self) -> Option<ZeroWitness> {
        for (index, m) in self.matrices.iter().enumerate() {
            let d = m.nrows();
            for i in 0..d {
                let mut v = CVector::zeros(d);
                v[i] = c64(1.0, 0.0);
                if let Some(w) = self.push_candidate(index, v) {
                    return Some(w);
                }
            }
            let h = (m + m.adjoint()) * c64(0.5, 0.0);
            let k = (m - m.adjoint()) * c64(0.0, -0.5);
            for part in [h, k] {
                let eig = hermitian_eigen_desc(&part);
                for col in 0..eig.vectors.ncols() {
                    let v = CVector::from_iterator(d, eig.vectors.column(col).iter().cloned());
                    if let Some(w) = self.push_candidate(index, v) {
                        return Some(w);
                    }
                }
            }
        }
        self.try_candidate_pairs()
    }

    fn try_candidate_pairs(&mut self) -> Option<ZeroWitness> {
        for i in 0..self.candidates.len() {
            for j in (i + 1)..self.candidates.len() {
                let (s, closest) =
                    segment_closest(self.candidates[i].value, self.candidates[j].value);
                if closest.norm() > self.tol {
                    continue;
                }
                self.note(closest.norm());
                if self.candidates[i].index == self.candidates[j].index {
                    let (ci, cj) = (&self.candidates[i], &self.candidates[j]);
                    let attempt = path_witness(
                        &self.matrices[ci.index],
                        &ci.vector,
                        ci.value,
                        &cj.vector,
                        cj.value,
                    );
                    let index = ci.index;
                    if let Some((v, value)) = attempt {
                        self.evaluations += 1;
                        self.note(value.norm());
                        if value.norm() <= self.tol {
                            return Some(ZeroWitness::Vector {
                                index,
                                vector: v,
                                value,
                            });
                        }
                    }
                } else {
                    return Some(mixture_of(&self.candidates[i], &self.candidates[j], s));
                }
            }
        }
        None
    }

    /// Full search: antipodal support-point scan per matrix, cross-matrix
    /// segments, a three-point cover of the origin, and seeded random probes.
    fn full_search(&mut self) -> Option<ZeroWitness> {
        for index in 0..self.matrices.len() {
            if let Some(w) = self.straddle_scan(index) {
                return Some(w);
            }
        }
        if let Some(w) = self.try_candidate_pairs() {
            return Some(w);
        }
        if let Some(w) = self.caratheodory_witness() {
            return Some(w);
        }
        self.random_probes()
    }

    fn support_candidates(&mut self, index: usize, theta: f64) -> Vec<(CVector, Complex64)> {
        let m = &self.matrices[index];
        let eig = hermitian_eigen_desc(&rotated_real_part(m, theta));
        let top = eig.eigenvalues[0];
        let width = 1e-10 * top.abs().max(1.0);
        let mut out = Vec::new();
        for (col, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda < top - width {
                break;
            }
            let v = CVector::from_iterator(m.nrows(), eig.vectors.column(col).iter().cloned());
            let value = quad_form(m, &v);
            self.evaluations += 1;
            out.push((v, value));
        }
        out
    }

    /// One antipodal probe: support points at `theta` and `theta + pi`, the
    /// best origin-straddling segment seen so far, a direct within-tolerance
    /// hit if one appears, and the perpendicular offset of the segment's
    /// axis crossing (whose sign change brackets an exact straddle).
    fn probe_antipodal(&mut self, index: usize, theta: f64, best: &mut BestPair) -> Probe {
        let plus = self.support_candidates(index, theta);
        let minus = self.support_candidates(index, theta + std::f64::consts::PI);
        let rot = Complex64::from_polar(1.0, -theta);
        let mut probe = Probe {
            direct: None,
            offset: None,
        };
        for (v, q) in plus.iter().chain(minus.iter()) {
            self.note(q.norm());
            if q.norm() <= self.tol && probe.direct.is_none() {
                probe.direct = Some((v.clone(), *q));
            }
        }
        for (vp, qp) in &plus {
            for (vm, qm) in &minus {
                let (_, closest) = segment_closest(*qp, *qm);
                let dist = closest.norm();
                if best.as_ref().map_or(true, |(d, _, _)| dist < *d) {
                    *best = Some((dist, (vp.clone(), *qp), (vm.clone(), *qm)));
                }
                let (a, b) = ((qp * rot).re, (qm * rot).re);
                if (a - b).abs() > 1e-300 && a >= -self.tol && b <= self.tol {
                    let s = (a / (a - b)).clamp(0.0, 1.0);
                    let z = qp * c64(1.0 - s, 0.0) + qm * c64(s, 0.0);
                    probe.offset = Some((z * rot).im);
                }
            }
        }
        probe
    }

    /// Scans antipodal support directions for a pair of achieved values whose
    /// segment crosses the origin, then walks the connecting path.
    fn straddle_scan(&mut self, index: usize) -> Option<ZeroWitness> {
        const STEPS: usize = 90;
        let mut best: BestPair = None;
        let mut offsets: Vec<(f64, f64)> = Vec::with_capacity(STEPS);

        for i in 0..STEPS {
            let theta = i as f64 * std::f64::consts::PI / STEPS as f64;
            let probe = self.probe_antipodal(index, theta, &mut best);
            if let Some((vector, value)) = probe.direct {
                return Some(ZeroWitness::Vector {
                    index,
                    vector,
                    value,
                });
            }
            if let Some(off) = probe.offset {
                offsets.push((theta, off));
            }
        }

        // Bisect the first sign change of the crossing offset.
        if let Some(w) = offsets
            .windows(2)
            .find(|w| w[0].1.signum() != w[1].1.signum())
        {
            let (mut ta, mut fa) = w[0];
            let mut tb = w[1].0;
            for _ in 0..60 {
                if best.as_ref().is_some_and(|(d, _, _)| *d <= self.tol * 1e-2) {
                    break;
                }
                let tm = 0.5 * (ta + tb);
                let probe = self.probe_antipodal(index, tm, &mut best);
                if let Some((vector, value)) = probe.direct {
                    return Some(ZeroWitness::Vector {
                        index,
                        vector,
                        value,
                    });
                }
                match probe.offset {
                    Some(fm) if fm.signum() == fa.signum() => {
                        ta = tm;
                        fa = fm;
                    }
                    Some(_) => tb = tm,
                    None => break,
                }
            }
        }

        if let Some((dist, (v1, q1), (v2, q2))) = best {
            self.note(dist);
            if dist <= self.tol {
                let m = &self.matrices[index];
                if let Some((v, value)) = path_witness(m, &v1, q1, &v2, q2) {
                    self.evaluations += 1;
                    self.note(value.norm());
                    if value.norm() <= self.tol {
                        return Some(ZeroWitness::Vector {
                            index,
                            vector: v,
                            value,
                        });
                    }
                }
            }
        }
        None
    }

    fn caratheodory_witness(&mut self) -> Option<ZeroWitness> {
        // Enrich the candidate pool with support points on a coarse fan.
        const FAN: usize = 72;
        for index in 0..self.matrices.len() {
            for i in 0..FAN {
                let theta = i as f64 * std::f64::consts::TAU / FAN as f64;
                for (v, value) in self.support_candidates(index, theta) {
                    self.candidates.push(Candidate { index, vector: v, value });
                }
            }
        }
        if let Some(w) = self.try_candidate_pairs() {
            return Some(w);
        }
        let points: Vec<Complex64> = self.candidates.iter().map(|c| c.value).collect();
        let cover = caratheodory_cover(&points)?;
        let value: Complex64 = cover
            .iter()
            .map(|&(w, i)| points[i] * c64(w, 0.0))
            .sum();
        self.note(value.norm());
        if value.norm() > self.tol {
            return None;
        }
        let cover: Vec<(f64, usize)> = cover.into_iter().filter(|&(w, _)| w > 1e-12).collect();
        self.reduce_cover(cover)
    }

    /// Turns a covering convex combination of achieved points into a witness,
    /// merging same-matrix terms through the path walker so that a single
    /// numerical range never contributes more than one term. A group's merge
    /// target is the weighted average of its points, which stays on their
    /// segments, so the walk is always feasible for two-point groups.
    fn reduce_cover(&mut self, cover: Vec<(f64, usize)>) -> Option<ZeroWitness> {
        let mut groups: Vec<(usize, Vec<(f64, usize)>)> = Vec::new();
        for (w, cand) in cover {
            let index = self.candidates[cand].index;
            match groups.iter_mut().find(|(i, _)| *i == index) {
                Some((_, g)) => g.push((w, cand)),
                None => groups.push((index, vec![(w, cand)])),
            }
        }
        let mut terms: Vec<MixtureTerm> = Vec::new();
        for (index, group) in groups {
            let total: f64 = group.iter().map(|(w, _)| w).sum();
            if group.len() == 1 {
                let c = &self.candidates[group[0].1];
                terms.push(MixtureTerm {
                    weight: total,
                    index,
                    vector: c.vector.clone(),
                    value: c.value,
                });
                continue;
            }
            // Merge the group pairwise toward its weighted average.
            let mut acc_w = group[0].0;
            let mut acc_vec = self.candidates[group[0].1].vector.clone();
            let mut acc_val = self.candidates[group[0].1].value;
            for &(w, cand) in &group[1..] {
                let (cv, cq) = (
                    self.candidates[cand].vector.clone(),
                    self.candidates[cand].value,
                );
                let share = w / (acc_w + w);
                let target = acc_val * c64(1.0 - share, 0.0) + cq * c64(share, 0.0);
                let (nv, nq) = path_witness_to(
                    &self.matrices[index],
                    &acc_vec,
                    acc_val,
                    &cv,
                    cq,
                    target,
                )?;
                self.evaluations += 1;
                acc_vec = nv;
                acc_val = nq;
                acc_w += w;
            }
            terms.push(MixtureTerm {
                weight: total,
                index,
                vector: acc_vec,
                value: acc_val,
            });
        }
        let value: Complex64 = terms
            .iter()
            .map(|t| t.value * c64(t.weight, 0.0))
            .sum();
        self.note(value.norm());
        if value.norm() > self.tol {
            return None;
        }
        if terms.len() == 1 {
            return Some(ZeroWitness::Vector {
                index: terms[0].index,
                vector: terms[0].vector.clone(),
                value: terms[0].value,
            });
        }
        Some(ZeroWitness::Mixture { terms })
    }

    fn random_probes(&mut self) -> Option<ZeroWitness> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6a7e_11ce);
        for index in 0..self.matrices.len() {
            let d = self.matrices[index].nrows();
            for _ in 0..64 {
                let v = CVector::from_fn(d, |_, _| {
                    c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                });
                let norm = v.norm();
                if norm < 1e-9 {
                    continue;
                }
                if let Some(w) = self.push_candidate(index, v / c64(norm, 0.0)) {
                    return Some(w);
                }
            }
        }
        self.try_candidate_pairs()
    }
}

fn mixture_of(ci: &Candidate, cj: &Candidate, s: f64) -> ZeroWitness {
    let mut terms = Vec::new();
    if 1.0 - s > 1e-12 {
        terms.push(MixtureTerm {
            weight: 1.0 - s,
            index: ci.index,
            vector: ci.vector.clone(),
            value: ci.value,
        });
    }
    if s > 1e-12 {
        terms.push(MixtureTerm {
            weight: s,
            index: cj.index,
            vector: cj.vector.clone(),
            value: cj.value,
        });
    }
    if terms.len() == 1 {
        ZeroWitness::Vector {
            index: terms[0].index,
            vector: terms[0].vector.clone(),
            value: terms[0].value,
        }
    } else {
        ZeroWitness::Mixture { terms }
    }
}

/// Walks the Toeplitz-Hausdorff path between two unit vectors toward the
/// point 0 on the segment between their achieved values.
pub fn path_witness(
    c: &CMatrix,
    v1: &CVector,
    q1: Complex64,
    v2: &CVector,
    q2: Complex64,
) -> Option<(CVector, Complex64)> {
    path_witness_to(c, v1, q1, v2, q2, c64(0.0, 0.0))
}

/// Walks the Toeplitz-Hausdorff path between two unit vectors whose achieved
/// values straddle `target` on their connecting segment.
///
/// The affine change C' = (C - q1 I)/(q2 - q1) sends the segment onto [0, 1];
/// choosing the relative phase of v2 so that the cross term of the skew part
/// vanishes keeps the whole path on the real axis, and a bisection on the
/// real part lands on the image of the target.
pub fn path_witness_to(
    c: &CMatrix,
    v1: &CVector,
    q1: Complex64,
    v2: &CVector,
    q2: Complex64,
    target_value: Complex64,
) -> Option<(CVector, Complex64)> {
    let d = q2 - q1;
    if (q1 - target_value).norm() < 1e-300 {
        return Some((v1.clone(), q1));
    }
    if d.norm() < 1e-14 {
        return None;
    }
    let n = c.nrows();
    let identity = CMatrix::identity(n, n);
    let cp = (c - &identity * q1) * (c64(1.0, 0.0) / d);
    let target = ((target_value - q1) / d).re.clamp(0.0, 1.0);
    let kp = (&cp - cp.adjoint()) * c64(0.0, -0.5);
    let g = v1.dotc(&(&kp * v2));
    let phase = if g.norm() > 1e-15 {
        Complex64::i() * g.conj() / g.norm()
    } else {
        c64(1.0, 0.0)
    };
    let v2p = v2 * phase;

    let point = |t: f64| -> Option<CVector> {
        let v = v1 * c64(1.0 - t, 0.0) + &v2p * c64(t, 0.0);
        let norm = v.norm();
        (norm > 1e-8).then(|| v / c64(norm, 0.0))
    };
    let real_part = |v: &CVector| quad_form(&cp, v).re;

    let (mut a, mut b) = (0.0, 1.0);
    let (mut fa, fb) = (
        real_part(&point(a)?) - target,
        real_part(&point(b)?) - target,
    );
    if fa * fb > 0.0 {
        // Endpoints fail to bracket (can happen when the segment barely
        // misses zero); fall back to the nearer endpoint.
        return None;
    }
    for _ in 0..64 {
        let mid = 0.5 * (a + b);
        let Some(v) = point(mid) else { break };
        let fm = real_part(&v) - target;
        if fm == 0.0 {
            a = mid;
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let v = point(0.5 * (a + b)).or_else(|| point(a))?;
    let value = quad_form(c, &v);
    Some((v, value))
}

/// Searches the attained frame blocks for a unit vector annihilated by
/// `c_k*`. Returns the minimal singular value found over all attained blocks
/// (the failure certificate) and, when that value is within `tol`, the block
/// and vector realizing it.
pub struct KernelSearch {
    pub found: Option<(usize, CVector)>,
    pub sigma_min: f64,
    pub per_block: Vec<(usize, f64)>,
}

pub fn kernel_vector_in_frame(
    c: &AlgebraElement,
    frame: &EigenFrame,
    tol: f64,
) -> Result<KernelSearch> {
    if c.algebra() != frame.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    let mut best: Option<(usize, CVector, f64)> = None;
    let mut per_block = Vec::new();
    for (k, fb) in frame.blocks.iter().enumerate() {
        if !fb.attained || fb.basis.ncols() == 0 {
            continue;
        }
        let m = c.block(k).adjoint() * &fb.basis;
        let svd = m.svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let mut min_idx = 0;
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s < svd.singular_values[min_idx] {
                min_idx = i;
            }
        }
        let sigma = if svd.singular_values.is_empty() {
            0.0
        } else {
            svd.singular_values[min_idx]
        };
        // Right singular vector in frame coordinates, mapped through B_k.
        let eta = if svd.singular_values.is_empty() {
            CVector::from_element(fb.basis.ncols(), c64(1.0, 0.0))
                / c64((fb.basis.ncols() as f64).sqrt(), 0.0)
        } else {
            CVector::from_fn(fb.basis.ncols(), |j, _| v_t[(min_idx, j)].conj())
        };
        let xi = &fb.basis * eta;
        per_block.push((k, sigma));
        if best.as_ref().map_or(true, |(_, _, s)| sigma < *s) {
            best = Some((k, xi, sigma));
        }
    }
    let (found, sigma_min) = match best {
        Some((k, xi, sigma)) => {
            let found = (sigma <= tol).then_some((k, xi));
            (found, sigma)
        }
        None => (None, f64::INFINITY),
    };
    Ok(KernelSearch {
        found,
        sigma_min,
        per_block,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BlockAlgebra;
    use approx::assert_relative_eq;

    fn cm(rows: usize, cols: usize, entries: &[(f64, f64)]) -> CMatrix {
        CMatrix::from_fn(rows, cols, |i, j| {
            let (re, im) = entries[i * cols + j];
            c64(re, im)
        })
    }

    fn rm(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
        CMatrix::from_fn(rows, cols, |i, j| c64(entries[i * cols + j], 0.0))
    }

    #[test]
    fn frame_of_clustered_diagonal() {
        let alg = BlockAlgebra::new(vec![3]).unwrap();
        let p = AlgebraElement::new(alg, vec![rm(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.25])])
            .unwrap();
        let frame = top_eigenframe(&p, 1e-9).unwrap();
        assert!(frame.blocks[0].attained);
        assert_eq!(frame.blocks[0].basis.ncols(), 2);
        assert_relative_eq!(frame.global_top, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn frame_attainment_across_blocks() {
        let alg = BlockAlgebra::new(vec![1, 1]).unwrap();
        let p = AlgebraElement::new(
            alg,
            vec![rm(1, 1, &[1.0]), rm(1, 1, &[0.5])],
        )
        .unwrap();
        let frame = top_eigenframe(&p, 1e-9).unwrap();
        assert!(frame.blocks[0].attained);
        assert!(!frame.blocks[1].attained);
        assert_eq!(frame.blocks[0].basis.ncols(), 1);
    }

    #[test]
    fn frame_tolerance_clustering() {
        // Eigenvalues 1 and 1 - 1e-12 cluster together at eps = 1e-9;
        // oracle: the eigenvalues are exactly the diagonal entries.
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let p = AlgebraElement::new(alg, vec![rm(2, 2, &[1.0, 0.0, 0.0, 1.0 - 1e-12])]).unwrap();
        let frame = top_eigenframe(&p, 1e-9).unwrap();
        assert_eq!(frame.blocks[0].basis.ncols(), 2);
    }

    #[test]
    fn frame_rejects_negative() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let p = AlgebraElement::new(alg, vec![rm(2, 2, &[1.0, 0.0, 0.0, -0.5])]).unwrap();
        assert!(matches!(
            top_eigenframe(&p, 1e-9),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn compression_examples() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let p = AlgebraElement::new(alg.clone(), vec![rm(2, 2, &[1.0, 0.0, 0.0, 0.25])]).unwrap();
        let frame = top_eigenframe(&p, 1e-9).unwrap();

        // e12 compressed to span{e1} vanishes; e21 as well, even though
        // e21 e1 = e2 is nonzero (the compression kills off-space action).
        for (i, j) in [(0, 1), (1, 0)] {
            let c = AlgebraElement::matrix_unit(&alg, 0, i, j);
            let comps = compress(&c, &frame).unwrap();
            assert_eq!(comps.len(), 1);
            assert_eq!(comps[0].matrix.nrows(), 1);
            assert_relative_eq!(comps[0].matrix[(0, 0)].norm(), 0.0, epsilon = 1e-14);
        }

        // Full-space frame: the compression is unitarily equivalent to the
        // block itself, so it keeps the operator norm.
        let unit = AlgebraElement::unit(&alg);
        let full = top_eigenframe(&unit, 1e-9).unwrap();
        let c = AlgebraElement::new(alg, vec![rm(2, 2, &[0.3, 0.7, -0.2, 0.1])]).unwrap();
        let comps = compress(&c, &full).unwrap();
        assert_relative_eq!(
            crate::algebra::top_singular_value(&comps[0].matrix),
            c.operator_norm(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn support_function_identity_and_shift() {
        let id = CMatrix::identity(2, 2);
        for &theta in &[0.0, 0.5, 1.3, 3.0] {
            assert_relative_eq!(support_function(&id, theta), theta.cos(), epsilon = 1e-12);
        }
        // [[0,1],[0,0]]: numerical range is the disk of radius 1/2; the
        // rotated real part has eigenvalues +/- 1/2 for every angle.
        let nil = rm(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        for &theta in &[0.0, 0.7, 2.0, 5.5] {
            assert_relative_eq!(support_function(&nil, theta), 0.5, epsilon = 1e-12);
        }
        let zero1 = rm(1, 1, &[0.0]);
        assert_relative_eq!(support_function(&zero1, 1.0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn support_function_matches_vector_sampling() {
        let m = cm(
            3,
            3,
            &[
                (0.2, 0.1),
                (1.0, -0.3),
                (0.0, 0.5),
                (-0.4, 0.0),
                (0.1, 0.1),
                (0.3, -0.2),
                (0.7, 0.2),
                (0.0, 0.0),
                (-0.6, 0.4),
            ],
        );
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &theta in &[0.3, 1.9, 4.4] {
            let h = support_function(&m, theta);
            let rot = Complex64::from_polar(1.0, -theta);
            let mut sampled: f64 = f64::NEG_INFINITY;
            for _ in 0..20_000 {
                let v = CVector::from_fn(3, |_, _| {
                    c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                });
                let v = &v / c64(v.norm(), 0.0);
                sampled = sampled.max((quad_form(&m, &v) * rot).re);
            }
            assert!(sampled <= h + 1e-9, "sampling exceeded support value");
            assert!(h - sampled < 0.05, "support value far above samples");
        }
    }

    #[test]
    fn contains_zero_nilpotent_disk() {
        let nil = rm(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let out = contains_zero(std::slice::from_ref(&nil), ZeroMode::Single, 1e-9).unwrap();
        assert_eq!(out.answer, Certainty::Holds);
        match out.witness.unwrap() {
            ZeroWitness::Vector { vector, value, .. } => {
                assert!(value.norm() <= 1e-9);
                assert_relative_eq!(vector.norm(), 1.0, epsilon = 1e-12);
            }
            _ => panic!("expected a vector witness"),
        }
    }

    #[test]
    fn contains_zero_identity_fails_with_unit_margin() {
        let id = CMatrix::identity(2, 2);
        let out = contains_zero(std::slice::from_ref(&id), ZeroMode::Single, 1e-9).unwrap();
        assert_eq!(out.answer, Certainty::Fails);
        assert!(out.margin > 0.99, "margin {} should be ~1", out.margin);
    }

    #[test]
    fn contains_zero_hull_of_plus_minus_one() {
        let mats = [rm(1, 1, &[1.0]), rm(1, 1, &[-1.0])];
        let out = contains_zero(&mats, ZeroMode::Hull, 1e-9).unwrap();
        assert_eq!(out.answer, Certainty::Holds);
        match out.witness.unwrap() {
            ZeroWitness::Mixture { terms } => {
                assert_eq!(terms.len(), 2);
                assert_relative_eq!(terms[0].weight, 0.5, epsilon = 1e-12);
                assert_relative_eq!(terms[1].weight, 0.5, epsilon = 1e-12);
            }
            _ => panic!("expected a mixture witness"),
        }
    }

    #[test]
    fn hull_singleton_matches_single() {
        let mats = [cm(2, 2, &[(0.4, 0.0), (0.2, 0.6), (0.0, 0.0), (0.9, -0.1)])];
        let single = contains_zero(&mats, ZeroMode::Single, 1e-9).unwrap();
        let hull = contains_zero(&mats, ZeroMode::Hull, 1e-9).unwrap();
        assert_eq!(single.answer, hull.answer);
    }

    #[test]
    fn three_point_hull_mixture() {
        // Points 1, omega, omega^2 need a genuine three-term mixture.
        let w = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        let mats = [
            CMatrix::from_element(1, 1, c64(1.0, 0.0)),
            CMatrix::from_element(1, 1, w),
            CMatrix::from_element(1, 1, w * w),
        ];
        let out = contains_zero(&mats, ZeroMode::Hull, 1e-9).unwrap();
        assert_eq!(out.answer, Certainty::Holds);
        match out.witness.unwrap() {
            ZeroWitness::Mixture { terms } => {
                assert_eq!(terms.len(), 3);
                let total: Complex64 = terms
                    .iter()
                    .map(|t| t.value * c64(t.weight, 0.0))
                    .sum();
                assert!(total.norm() <= 1e-9);
            }
            _ => panic!("expected a 3-term mixture"),
        }
    }

    #[test]
    fn interior_zero_gets_vector_witness() {
        // A normal matrix with spectrum {1, i, -1, -i}: zero is interior.
        let m = CMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, i as f64 * std::f64::consts::FRAC_PI_2)
            } else {
                c64(0.0, 0.0)
            }
        });
        let out = contains_zero(std::slice::from_ref(&m), ZeroMode::Single, 1e-9).unwrap();
        assert_eq!(out.answer, Certainty::Holds);
        match out.witness.unwrap() {
            ZeroWitness::Vector { vector, value, .. } => {
                assert!(value.norm() <= 1e-9);
                assert_relative_eq!(
                    quad_form(&m, &vector).norm(),
                    value.norm(),
                    epsilon = 1e-12
                );
            }
            _ => panic!("expected vector witness"),
        }
    }

    #[test]
    fn refinement_never_flips_certified_answers() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let coarse = GridConfig::default();
        let fine = GridConfig {
            initial_points: 7200,
            ..GridConfig::default()
        };
        for _ in 0..25 {
            let n = 2 + (rng.gen::<u64>() % 3) as usize;
            let m = CMatrix::from_fn(n, n, |_, _| {
                c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let a = contains_zero_with(std::slice::from_ref(&m), ZeroMode::Single, 1e-9, &coarse)
                .unwrap();
            let b = contains_zero_with(std::slice::from_ref(&m), ZeroMode::Single, 1e-9, &fine)
                .unwrap();
            if a.answer != Certainty::Borderline && b.answer != Certainty::Borderline {
                assert_eq!(a.answer, b.answer);
            }
        }
    }

    #[test]
    fn kernel_vector_cases() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let p = AlgebraElement::new(alg.clone(), vec![rm(2, 2, &[1.0, 0.0, 0.0, 0.25])]).unwrap();
        let frame = top_eigenframe(&p, 1e-9).unwrap();

        // c = 0: any frame vector works.
        let zero = AlgebraElement::zero(&alg);
        let out = kernel_vector_in_frame(&zero, &frame, 1e-9).unwrap();
        assert!(out.found.is_some());
        assert_relative_eq!(out.sigma_min, 0.0, epsilon = 1e-14);

        // c = e12: c* e1 = e2, so sigma = 1 and no kernel vector.
        let e12 = AlgebraElement::matrix_unit(&alg, 0, 0, 1);
        let out = kernel_vector_in_frame(&e12, &frame, 1e-9).unwrap();
        assert!(out.found.is_none());
        assert_relative_eq!(out.sigma_min, 1.0, epsilon = 1e-12);

        // c = e21: c* e1 = e12 e1 = 0, so e1 is the witness.
        let e21 = AlgebraElement::matrix_unit(&alg, 0, 1, 0);
        let out = kernel_vector_in_frame(&e21, &frame, 1e-9).unwrap();
        let (block, xi) = out.found.unwrap();
        assert_eq!(block, 0);
        assert_relative_eq!(xi[0].norm(), 1.0, epsilon = 1e-12);
        assert!(out.sigma_min <= 1e-12);
    }

    #[test]
    fn brute_force_agreement_small_sample() {
        // Smoke-scale version of the engine acceptance check.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = 2 + (rng.gen::<u64>() % 5) as usize;
            let m = CMatrix::from_fn(n, n, |_, _| {
                c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let out = contains_zero(std::slice::from_ref(&m), ZeroMode::Single, 1e-9).unwrap();
            let mut brute_min = f64::INFINITY;
            for _ in 0..5000 {
                let v = CVector::from_fn(n, |_, _| {
                    c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                });
                let v = &v / c64(v.norm(), 0.0);
                brute_min = brute_min.min(quad_form(&m, &v).norm());
            }
            match out.answer {
                Certainty::Fails => {
                    assert!(
                        brute_min > out.margin * 0.5,
                        "brute force found {brute_min} inside certified margin {}",
                        out.margin
                    );
                }
                Certainty::Holds => {
                    let w = out.witness.expect("holds carries witness");
                    if let ZeroWitness::Vector { vector, .. } = w {
                        assert!(quad_form(&m, &vector).norm() <= 1e-8);
                    }
                }
                Certainty::Borderline => {}
            }
        }
    }
}
