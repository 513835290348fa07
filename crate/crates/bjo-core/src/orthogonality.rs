//! The three certified orthogonality predicates and their cross-checks.
//!
//! All predicates normalize both inputs to unit norm first, so certified
//! answers are invariant under nonzero scalings and every tolerance reads on
//! unit scale. The state route decides through the numerical-range engine;
//! `is_bj_minimization` is an independent convex-minimization route used for
//! cross-validation. Fails margins are kept far above the witness tolerance
//! so the two routes cannot certify opposite answers on the same pair.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{c64, AlgebraElement, CVector, PureState, StateMixture};
use crate::error::{Error, Result};
use crate::module::{inner_product, right_action, ModuleElement};
use crate::nr::{
    compress, contains_zero, kernel_vector_in_frame, top_eigenframe, Certainty, Compression,
    EigenFrame, ZeroMode, ZeroWitness,
};
use crate::sampling;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Bj,
    QuasiStrong,
    Strong,
}

/// A state realizing a Holds answer.
#[derive(Debug, Clone)]
pub enum StateWitness {
    Pure(PureState),
    Mixture(StateMixture),
}

/// Replayable evidence for a Fails answer.
#[derive(Debug, Clone)]
pub enum FailureCertificate {
    /// A scalar (and optionally an algebra element b) with
    /// |x + lambda (y b)| = achieved < |x|.
    NormDrop {
        lambda: Complex64,
        b: Option<AlgebraElement>,
        achieved: f64,
        reference: f64,
    },
    /// Distance of 0 from the admissible state values, per attained block.
    SupportMargins { blocks: Vec<(usize, f64)> },
    /// Smallest singular value of c* restricted to the attained frames.
    KernelGap {
        sigma_min: f64,
        blocks: Vec<(usize, f64)>,
    },
}

/// Certified tri-state answer with witness or failure certificate.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub relation: Relation,
    pub answer: Certainty,
    /// Certified distance from the decision boundary (0 for Borderline).
    pub margin: f64,
    pub witness: Option<StateWitness>,
    pub failure: Option<FailureCertificate>,
    pub tolerances: Tolerances,
}

impl Verdict {
    fn holds(relation: Relation, margin: f64, witness: StateWitness, tol: &Tolerances) -> Self {
        Verdict {
            relation,
            answer: Certainty::Holds,
            margin,
            witness: Some(witness),
            failure: None,
            tolerances: *tol,
        }
    }

    fn fails(
        relation: Relation,
        margin: f64,
        failure: FailureCertificate,
        tol: &Tolerances,
    ) -> Self {
        Verdict {
            relation,
            answer: Certainty::Fails,
            margin,
            witness: None,
            failure: Some(failure),
            tolerances: *tol,
        }
    }

    fn borderline(relation: Relation, tol: &Tolerances) -> Self {
        Verdict {
            relation,
            answer: Certainty::Borderline,
            margin: 0.0,
            witness: None,
            failure: None,
            tolerances: *tol,
        }
    }
}

/// Normalized inputs with the shared frame/compression data.
struct Prepared {
    x_unit: ModuleElement,
    y_unit: ModuleElement,
    x_norm: f64,
    y_norm: f64,
    frame: EigenFrame,
    c: AlgebraElement,
}

enum Prologue {
    /// x = 0: every relation holds vacuously.
    TrivialHolds,
    Ready(Box<Prepared>),
}

fn prologue(x: &ModuleElement, y: &ModuleElement, tol: &Tolerances) -> Result<Prologue> {
    if !x.same_space(y) {
        return Err(Error::SpaceMismatch);
    }
    let x_norm = x.module_norm();
    if x_norm == 0.0 {
        return Ok(Prologue::TrivialHolds);
    }
    let y_norm = y.module_norm();
    let x_unit = x.scale(c64(1.0 / x_norm, 0.0));
    let y_unit = if y_norm > 0.0 {
        y.scale(c64(1.0 / y_norm, 0.0))
    } else {
        y.clone()
    };
    let p = inner_product(&x_unit, &x_unit)?;
    let frame = top_eigenframe(&p, tol.eps_eig)?;
    let c = inner_product(&x_unit, &y_unit)?;
    Ok(Prologue::Ready(Box::new(Prepared {
        x_unit,
        y_unit,
        x_norm,
        y_norm,
        frame,
        c,
    })))
}

fn trivial_holds(relation: Relation, x: &ModuleElement, tol: &Tolerances) -> Verdict {
    let witness = StateWitness::Pure(PureState::coordinate(x.space().algebra(), 0, 0));
    Verdict::holds(relation, tol.witness_tol, witness, tol)
}

fn pure_from_engine(
    prep: &Prepared,
    compressions: &[Compression],
    index: usize,
    eta: &CVector,
) -> Result<PureState> {
    let block = compressions[index].block;
    let basis = &prep.frame.blocks[block].basis;
    PureState::new(prep.frame.algebra().clone(), block, basis * eta)
}

fn witness_from_engine(
    prep: &Prepared,
    compressions: &[Compression],
    w: &ZeroWitness,
) -> Result<StateWitness> {
    match w {
        ZeroWitness::Vector { index, vector, .. } => Ok(StateWitness::Pure(pure_from_engine(
            prep,
            compressions,
            *index,
            vector,
        )?)),
        ZeroWitness::Mixture { terms } => {
            let mut parts = Vec::with_capacity(terms.len());
            for t in terms {
                parts.push((
                    t.weight,
                    pure_from_engine(prep, compressions, t.index, &t.vector)?,
                ));
            }
            Ok(StateWitness::Mixture(StateMixture::new(parts)?))
        }
    }
}

/// Kernel shortcut: a frame vector annihilated by c* realizes all three
/// relations at once, which keeps the implication chain consistent by
/// construction.
fn kernel_shortcut(prep: &Prepared, tol: &Tolerances) -> Result<Option<(PureState, f64)>> {
    let search = kernel_vector_in_frame(&prep.c, &prep.frame, tol.witness_tol)?;
    match search.found {
        Some((block, xi)) => {
            let state = PureState::new(prep.frame.algebra().clone(), block, xi)?;
            Ok(Some((state, search.sigma_min)))
        }
        None => Ok(None),
    }
}

/// Original Birkhoff-James orthogonality via the state characterization:
/// 0 must lie in the convex hull of the attained-block compressions' ranges.
pub fn is_bj(x: &ModuleElement, y: &ModuleElement) -> Result<Verdict> {
    is_bj_with(x, y, &Tolerances::default())
}

pub fn is_bj_with(x: &ModuleElement, y: &ModuleElement, tol: &Tolerances) -> Result<Verdict> {
    let prep = match prologue(x, y, tol)? {
        Prologue::TrivialHolds => return Ok(trivial_holds(Relation::Bj, x, tol)),
        Prologue::Ready(p) => p,
    };
    if let Some((state, sigma)) = kernel_shortcut(&prep, tol)? {
        return Ok(Verdict::holds(
            Relation::Bj,
            (tol.witness_tol - sigma).max(f64::MIN_POSITIVE),
            StateWitness::Pure(state),
            tol,
        ));
    }
    let compressions = compress(&prep.c, &prep.frame)?;
    let matrices: Vec<_> = compressions.iter().map(|c| c.matrix.clone()).collect();
    let out = contains_zero(&matrices, ZeroMode::Hull, tol.witness_tol)?;
    match out.answer {
        Certainty::Holds => {
            let witness = witness_from_engine(&prep, &compressions, out.witness.as_ref().unwrap())?;
            Ok(Verdict::holds(Relation::Bj, out.margin, witness, tol))
        }
        Certainty::Fails => {
            if prep.frame.near_degenerate || out.margin < tol.fail_margin {
                return Ok(Verdict::borderline(Relation::Bj, tol));
            }
            let failure = descent_certificate(&prep, out.detail.worst_theta, tol).unwrap_or(
                FailureCertificate::SupportMargins {
                    blocks: compressions
                        .iter()
                        .map(|comp| (comp.block, out.margin))
                        .collect(),
                },
            );
            Ok(Verdict::fails(Relation::Bj, out.margin, failure, tol))
        }
        Certainty::Borderline => Ok(Verdict::borderline(Relation::Bj, tol)),
    }
}

/// Quasi-strong orthogonality: some single attained-block compression must
/// contain 0 in its numerical range; the witness is a pure state.
pub fn is_quasi_strong(x: &ModuleElement, y: &ModuleElement) -> Result<Verdict> {
    is_quasi_strong_with(x, y, &Tolerances::default())
}

pub fn is_quasi_strong_with(
    x: &ModuleElement,
    y: &ModuleElement,
    tol: &Tolerances,
) -> Result<Verdict> {
    let prep = match prologue(x, y, tol)? {
        Prologue::TrivialHolds => return Ok(trivial_holds(Relation::QuasiStrong, x, tol)),
        Prologue::Ready(p) => p,
    };
    if let Some((state, sigma)) = kernel_shortcut(&prep, tol)? {
        return Ok(Verdict::holds(
            Relation::QuasiStrong,
            (tol.witness_tol - sigma).max(f64::MIN_POSITIVE),
            StateWitness::Pure(state),
            tol,
        ));
    }
    let compressions = compress(&prep.c, &prep.frame)?;
    let mut margins: Vec<(usize, f64)> = Vec::with_capacity(compressions.len());
    let mut any_borderline = false;
    for comp in compressions.iter() {
        let out = contains_zero(
            std::slice::from_ref(&comp.matrix),
            ZeroMode::Single,
            tol.witness_tol,
        )?;
        match out.answer {
            Certainty::Holds => {
                let witness =
                    witness_from_engine(&prep, &compressions, out.witness.as_ref().unwrap())?;
                return Ok(Verdict::holds(Relation::QuasiStrong, out.margin, witness, tol));
            }
            Certainty::Fails => margins.push((comp.block, out.margin)),
            Certainty::Borderline => any_borderline = true,
        }
    }
    if any_borderline
        || prep.frame.near_degenerate
        || margins.iter().any(|&(_, m)| m < tol.fail_margin)
    {
        return Ok(Verdict::borderline(Relation::QuasiStrong, tol));
    }
    let margin = margins.iter().map(|&(_, m)| m).fold(f64::INFINITY, f64::min);
    Ok(Verdict::fails(
        Relation::QuasiStrong,
        margin,
        FailureCertificate::SupportMargins { blocks: margins },
        tol,
    ))
}

/// Strong orthogonality: some frame vector must be annihilated by c*, which
/// is the pure-state form of the criterion requiring rho(c c*) = 0 alongside
/// norm attainment.
pub fn is_strong(x: &ModuleElement, y: &ModuleElement) -> Result<Verdict> {
    is_strong_with(x, y, &Tolerances::default())
}

pub fn is_strong_with(x: &ModuleElement, y: &ModuleElement, tol: &Tolerances) -> Result<Verdict> {
    let prep = match prologue(x, y, tol)? {
        Prologue::TrivialHolds => return Ok(trivial_holds(Relation::Strong, x, tol)),
        Prologue::Ready(p) => p,
    };
    let search = kernel_vector_in_frame(&prep.c, &prep.frame, tol.witness_tol)?;
    if let Some((block, xi)) = search.found {
        let state = PureState::new(prep.frame.algebra().clone(), block, xi)?;
        return Ok(Verdict::holds(
            Relation::Strong,
            (tol.witness_tol - search.sigma_min).max(f64::MIN_POSITIVE),
            StateWitness::Pure(state),
            tol,
        ));
    }
    if prep.frame.near_degenerate || search.sigma_min < tol.fail_margin {
        return Ok(Verdict::borderline(Relation::Strong, tol));
    }
    Ok(Verdict::fails(
        Relation::Strong,
        search.sigma_min,
        FailureCertificate::KernelGap {
            sigma_min: search.sigma_min,
            blocks: search.per_block,
        },
        tol,
    ))
}

/// Line search along the certified descent direction to turn a state-route
/// failure into a definitional certificate |x + lambda y| < |x|.
fn descent_certificate(
    prep: &Prepared,
    worst_theta: Option<f64>,
    tol: &Tolerances,
) -> Option<FailureCertificate> {
    let theta = worst_theta?;
    if prep.y_norm == 0.0 {
        return None;
    }
    let dir = Complex64::from_polar(1.0, -theta);
    let f = |lambda: Complex64| -> f64 {
        (&prep.x_unit + &prep.y_unit.scale(lambda)).module_norm()
    };
    let mut best = (1.0_f64, c64(0.0, 0.0));
    let mut s = 2.0;
    for _ in 0..25 {
        let lambda = dir * c64(s, 0.0);
        let val = f(lambda);
        if val < best.0 {
            best = (val, lambda);
        }
        s *= 0.5;
    }
    // Local refinement of the step length around the best sample.
    let s0 = best.1.norm();
    if s0 > 0.0 {
        let (mut lo, mut hi) = (s0 * 0.5, s0 * 2.0);
        for _ in 0..30 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            let (f1, f2) = (f(dir * c64(m1, 0.0)), f(dir * c64(m2, 0.0)));
            if f1 < f2 {
                hi = m2;
            } else {
                lo = m1;
            }
            let cand = f(dir * c64(0.5 * (lo + hi), 0.0));
            if cand < best.0 {
                best = (cand, dir * c64(0.5 * (lo + hi), 0.0));
            }
        }
    }
    if best.0 < 1.0 - 10.0 * tol.eps_zero {
        // Rescale to the original (unnormalized) pair.
        Some(FailureCertificate::NormDrop {
            lambda: best.1 * c64(prep.x_norm / prep.y_norm, 0.0),
            b: None,
            achieved: best.0 * prep.x_norm,
            reference: prep.x_norm,
        })
    } else {
        None
    }
}

/// Optimization trace of the norm-minimization route.
#[derive(Debug, Clone, Copy)]
pub struct MinimizationReport {
    /// min over lambda of |x + lambda y| (original scale).
    pub minimum: f64,
    /// Minimizer (original scale).
    pub lambda: Complex64,
    /// Certified optimality gap of the minimizer (unit scale).
    pub gap: f64,
    pub evaluations: usize,
}

/// Definitional route: minimizes |x + lambda y| over the disk
/// |lambda| <= 2 |x| / |y| and compares the minimum against |x|.
pub fn is_bj_minimization(x: &ModuleElement, y: &ModuleElement) -> Result<Verdict> {
    Ok(bj_minimization_report(x, y, &Tolerances::default())?.0)
}

pub fn bj_minimization_report(
    x: &ModuleElement,
    y: &ModuleElement,
    tol: &Tolerances,
) -> Result<(Verdict, MinimizationReport)> {
    if !x.same_space(y) {
        return Err(Error::SpaceMismatch);
    }
    let x_norm = x.module_norm();
    let y_norm = y.module_norm();
    if x_norm == 0.0 || y_norm == 0.0 {
        let report = MinimizationReport {
            minimum: x_norm,
            lambda: c64(0.0, 0.0),
            gap: 0.0,
            evaluations: 1,
        };
        return Ok((trivial_holds(Relation::Bj, x, tol), report));
    }
    let x_unit = x.scale(c64(1.0 / x_norm, 0.0));
    let y_unit = y.scale(c64(1.0 / y_norm, 0.0));
    let run = ellipsoid_minimize(&x_unit, &y_unit, 600, tol.drop_hold / 10.0);
    let drop = 1.0 - run.best_value;
    let report = MinimizationReport {
        minimum: run.best_value * x_norm,
        lambda: run.best_lambda * c64(x_norm / y_norm, 0.0),
        gap: run.gap,
        evaluations: run.evaluations,
    };
    let verdict = if drop >= tol.drop_fail {
        Verdict::fails(
            Relation::Bj,
            drop - tol.drop_fail,
            FailureCertificate::NormDrop {
                lambda: report.lambda,
                b: None,
                achieved: report.minimum,
                reference: x_norm,
            },
            tol,
        )
    } else if drop + run.gap <= tol.drop_hold {
        Verdict {
            relation: Relation::Bj,
            answer: Certainty::Holds,
            margin: tol.drop_hold - (drop + run.gap),
            witness: None,
            failure: None,
            tolerances: *tol,
        }
    } else {
        Verdict::borderline(Relation::Bj, tol)
    };
    Ok((verdict, report))
}

struct EllipsoidRun {
    best_value: f64,
    best_lambda: Complex64,
    gap: f64,
    evaluations: usize,
}

/// Ellipsoid method for the two-real-variable convex function
/// lambda -> |x + lambda y| over |lambda| <= 2 (unit-normalized inputs).
/// Subgradients come from the top singular triple of the maximized block.
fn ellipsoid_minimize(
    x: &ModuleElement,
    y: &ModuleElement,
    max_iter: usize,
    target_gap: f64,
) -> EllipsoidRun {
    let radius = 2.0;
    let eval = |lambda: Complex64| -> (f64, [f64; 2]) {
        let shifted = x + &y.scale(lambda);
        let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
        let mut svds = Vec::with_capacity(shifted.blocks().len());
        for (k, m) in shifted.blocks().iter().enumerate() {
            let svd = m.clone().svd(true, true);
            for (i, &s) in svd.singular_values.iter().enumerate() {
                if s > best.0 {
                    best = (s, k, i);
                }
            }
            svds.push(svd);
        }
        let (sigma, k, i) = best;
        let svd = &svds[k];
        let u = svd.u.as_ref().unwrap().column(i).into_owned();
        let v_t = svd.v_t.as_ref().unwrap();
        let v = CVector::from_fn(v_t.ncols(), |j, _| v_t[(i, j)].conj());
        let w = u.dotc(&(y.block(k) * v));
        (sigma, [w.re, -w.im])
    };

    let mut center = [0.0_f64, 0.0];
    let mut shape = [[radius * radius, 0.0], [0.0, radius * radius]];
    let (f0, _) = eval(c64(0.0, 0.0));
    let mut best_value = f0;
    let mut best_lambda = c64(0.0, 0.0);
    let mut lower = f64::NEG_INFINITY;
    let mut evaluations = 1;

    for _ in 0..max_iter {
        let lam = c64(center[0], center[1]);
        let norm_c = (center[0] * center[0] + center[1] * center[1]).sqrt();
        let g: [f64; 2];
        if norm_c > radius {
            g = [center[0] / norm_c, center[1] / norm_c];
        } else {
            let (f, grad) = eval(lam);
            evaluations += 1;
            if f < best_value {
                best_value = f;
                best_lambda = lam;
            }
            let pg = [
                shape[0][0] * grad[0] + shape[0][1] * grad[1],
                shape[1][0] * grad[0] + shape[1][1] * grad[1],
            ];
            let gpg = (grad[0] * pg[0] + grad[1] * pg[1]).max(0.0);
            lower = lower.max(f - gpg.sqrt());
            if best_value - lower <= target_gap {
                break;
            }
            g = grad;
        }
        let pg = [
            shape[0][0] * g[0] + shape[0][1] * g[1],
            shape[1][0] * g[0] + shape[1][1] * g[1],
        ];
        let gpg = g[0] * pg[0] + g[1] * pg[1];
        if gpg <= 1e-300 {
            break;
        }
        let scale = gpg.sqrt();
        let gn = [pg[0] / scale, pg[1] / scale];
        center = [center[0] - gn[0] / 3.0, center[1] - gn[1] / 3.0];
        for r in 0..2 {
            for c in 0..2 {
                shape[r][c] = (4.0 / 3.0) * (shape[r][c] - (2.0 / 3.0) * gn[r] * gn[c]);
            }
        }
        // Keep the shape matrix symmetric against drift.
        let off = 0.5 * (shape[0][1] + shape[1][0]);
        shape[0][1] = off;
        shape[1][0] = off;
    }

    EllipsoidRun {
        best_value,
        best_lambda,
        gap: (best_value - lower).max(0.0),
        evaluations,
    }
}

/// Outcome of the one-sided definitional sampling of `for each a`.
#[derive(Debug, Clone)]
pub enum ProbeOutcome {
    /// Concrete (a, lambda) with |x + lambda (y a)| < |x|.
    Refuted {
        a: AlgebraElement,
        lambda: Complex64,
        achieved: f64,
    },
    /// Supports, but does not certify, the strong relation.
    NoCounterexampleFound { samples: usize },
}

/// Samples algebra elements a (Ginibre, unitary, matrix units, adjoint-of-c,
/// and unitary-times-positive patterns) and runs the minimization route on
/// (x, y a); any certified failure refutes strong orthogonality.
pub fn strong_definitional_probe<R: Rng + ?Sized>(
    x: &ModuleElement,
    y: &ModuleElement,
    sample_count: usize,
    rng: &mut R,
) -> Result<ProbeOutcome> {
    strong_definitional_probe_with(x, y, sample_count, rng, &Tolerances::default())
}

pub fn strong_definitional_probe_with<R: Rng + ?Sized>(
    x: &ModuleElement,
    y: &ModuleElement,
    sample_count: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<ProbeOutcome> {
    if !x.same_space(y) {
        return Err(Error::SpaceMismatch);
    }
    let algebra = x.space().algebra().clone();
    if x.module_norm() == 0.0 || y.module_norm() == 0.0 {
        return Ok(ProbeOutcome::NoCounterexampleFound { samples: 0 });
    }
    let c = inner_product(x, y)?;
    let mut unit_cursor = 0usize;
    let units: Vec<(usize, usize, usize)> = algebra
        .block_dims()
        .iter()
        .enumerate()
        .flat_map(|(k, &n)| (0..n).flat_map(move |i| (0..n).map(move |j| (k, i, j))))
        .collect();

    for sample in 0..sample_count {
        let a = match sample % 5 {
            0 => {
                let g = AlgebraElement::new(
                    algebra.clone(),
                    algebra
                        .block_dims()
                        .iter()
                        .map(|&n| sampling::ginibre(rng, n, n))
                        .collect(),
                )?;
                let norm = g.operator_norm();
                if norm == 0.0 {
                    continue;
                }
                g.scale(c64(1.0 / norm, 0.0))
            }
            1 => AlgebraElement::new(
                algebra.clone(),
                algebra
                    .block_dims()
                    .iter()
                    .map(|&n| sampling::random_unitary(rng, n))
                    .collect(),
            )?,
            2 => {
                let (k, i, j) = units[unit_cursor % units.len()];
                unit_cursor += 1;
                AlgebraElement::matrix_unit(&algebra, k, i, j)
            }
            3 => {
                let adj = c.adjoint();
                let norm = adj.operator_norm();
                if norm == 0.0 {
                    continue;
                }
                adj.scale(c64(1.0 / norm, 0.0))
            }
            _ => {
                let u = AlgebraElement::new(
                    algebra.clone(),
                    algebra
                        .block_dims()
                        .iter()
                        .map(|&n| sampling::random_unitary(rng, n))
                        .collect(),
                )?;
                let g = AlgebraElement::new(
                    algebra.clone(),
                    algebra
                        .block_dims()
                        .iter()
                        .map(|&n| sampling::ginibre(rng, n, n))
                        .collect(),
                )?;
                let pos = &g.adjoint() * &g;
                let norm = pos.operator_norm();
                if norm == 0.0 {
                    continue;
                }
                &u.adjoint() * &pos.scale(c64(1.0 / norm, 0.0))
            }
        };
        let ya = right_action(y, &a)?;
        if ya.module_norm() == 0.0 {
            continue;
        }
        let (verdict, report) = bj_minimization_report(x, &ya, tol)?;
        if verdict.answer == Certainty::Fails {
            return Ok(ProbeOutcome::Refuted {
                a,
                lambda: report.lambda,
                achieved: report.minimum,
            });
        }
    }
    Ok(ProbeOutcome::NoCounterexampleFound {
        samples: sample_count,
    })
}

/// Checks that x BJ-orthogonal to y is decided the same way as
/// <x,x> BJ-orthogonal to <x,y> in the algebra viewed as a module over
/// itself. Returns false only when both verdicts are certified and differ.
pub fn bj_module_algebra_consistency(x: &ModuleElement, y: &ModuleElement) -> Result<bool> {
    bj_module_algebra_consistency_with(x, y, &Tolerances::default())
}

pub fn bj_module_algebra_consistency_with(
    x: &ModuleElement,
    y: &ModuleElement,
    tol: &Tolerances,
) -> Result<bool> {
    let module_side = is_bj_with(x, y, tol)?;
    let algebra = x.space().algebra().clone();
    let self_space = crate::module::ModuleSpace::self_module(algebra);
    let p = inner_product(x, x)?;
    let c = inner_product(x, y)?;
    let p_el = ModuleElement::new(self_space.clone(), p.blocks().to_vec())?;
    let c_el = ModuleElement::new(self_space, c.blocks().to_vec())?;
    let algebra_side = is_bj_with(&p_el, &c_el, tol)?;
    if module_side.answer == Certainty::Borderline || algebra_side.answer == Certainty::Borderline
    {
        return Ok(true);
    }
    Ok(module_side.answer == algebra_side.answer)
}

/// Replay record of a Holds witness against its defining equalities.
#[derive(Debug, Clone, Copy)]
pub struct WitnessReplay {
    /// |rho(<x,x>) - |x|^2| on unit scale.
    pub attainment_error: f64,
    /// |rho(<x,y>)| for BJ/quasi-strong, |c* xi| for strong, on unit scale.
    pub zero_error: f64,
}

pub fn replay_witness(
    relation: Relation,
    x: &ModuleElement,
    y: &ModuleElement,
    witness: &StateWitness,
) -> Result<WitnessReplay> {
    if !x.same_space(y) {
        return Err(Error::SpaceMismatch);
    }
    let x_norm = x.module_norm();
    if x_norm == 0.0 {
        return Ok(WitnessReplay {
            attainment_error: 0.0,
            zero_error: 0.0,
        });
    }
    let y_norm = y.module_norm();
    let x_unit = x.scale(c64(1.0 / x_norm, 0.0));
    let y_unit = if y_norm > 0.0 {
        y.scale(c64(1.0 / y_norm, 0.0))
    } else {
        y.clone()
    };
    let p = inner_product(&x_unit, &x_unit)?;
    let c = inner_product(&x_unit, &y_unit)?;
    let evaluate = |a: &AlgebraElement| -> Result<Complex64> {
        match witness {
            StateWitness::Pure(s) => s.evaluate(a),
            StateWitness::Mixture(m) => m.evaluate(a),
        }
    };
    let attainment_error = (evaluate(&p)?.re - 1.0).abs();
    let zero_error = match relation {
        Relation::Bj | Relation::QuasiStrong => evaluate(&c)?.norm(),
        Relation::Strong => {
            let cc = &c * &c.adjoint();
            evaluate(&cc)?.re.max(0.0).sqrt()
        }
    };
    Ok(WitnessReplay {
        attainment_error,
        zero_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{BlockAlgebra, CMatrix};
    use crate::module::ModuleSpace;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c2() -> ModuleSpace {
        ModuleSpace::self_module(BlockAlgebra::new(vec![1, 1]).unwrap())
    }

    fn m2() -> ModuleSpace {
        ModuleSpace::self_module(BlockAlgebra::new(vec![2]).unwrap())
    }

    fn vec2(space: &ModuleSpace, a: f64, b: f64) -> ModuleElement {
        ModuleElement::new(
            space.clone(),
            vec![
                CMatrix::from_element(1, 1, c64(a, 0.0)),
                CMatrix::from_element(1, 1, c64(b, 0.0)),
            ],
        )
        .unwrap()
    }

    fn mat(space: &ModuleSpace, entries: &[f64]) -> ModuleElement {
        ModuleElement::from_block(
            space,
            0,
            CMatrix::from_fn(2, 2, |i, j| c64(entries[i * 2 + j], 0.0)),
        )
        .unwrap()
    }

    /// Independent oracle: minimize max(|x_k + lambda y_k|) over a dense
    /// lambda grid.
    fn lambda_grid_min(x: &ModuleElement, y: &ModuleElement) -> (f64, Complex64) {
        let mut best = (f64::INFINITY, c64(0.0, 0.0));
        for i in -80..=80 {
            for j in -80..=80 {
                let lam = c64(i as f64 / 20.0, j as f64 / 20.0);
                let val = (x + &y.scale(lam)).module_norm();
                if val < best.0 {
                    best = (val, lam);
                }
            }
        }
        best
    }

    #[test]
    fn bj_holds_on_prime_pattern() {
        // max(|1 + lambda|, |1 - lambda|) >= 1 for every lambda.
        let sp = c2();
        let x = vec2(&sp, 1.0, 1.0);
        let y = vec2(&sp, 1.0, -1.0);
        let v = is_bj(&x, &y).unwrap();
        assert_eq!(v.answer, Certainty::Holds);
        let witness = v.witness.unwrap();
        let replay = replay_witness(Relation::Bj, &x, &y, &witness).unwrap();
        assert!(replay.attainment_error <= 1e-8);
        assert!(replay.zero_error <= 1e-8);
        match witness {
            StateWitness::Mixture(m) => assert_eq!(m.terms().len(), 2),
            StateWitness::Pure(_) => panic!("expected a two-block mixture"),
        }
    }

    #[test]
    fn bj_fails_with_norm_drop() {
        let sp = c2();
        let x = vec2(&sp, 1.0, 0.0);
        let y = vec2(&sp, 1.0, 1.0);
        let v = is_bj(&x, &y).unwrap();
        assert_eq!(v.answer, Certainty::Fails);
        match v.failure.unwrap() {
            FailureCertificate::NormDrop {
                lambda, achieved, ..
            } => {
                // Oracle: the lambda-grid minimum is 1/2 at lambda = -1/2.
                let (oracle_min, oracle_lam) = lambda_grid_min(&x, &y);
                assert_relative_eq!(oracle_min, 0.5, epsilon = 1e-9);
                assert_relative_eq!(oracle_lam.re, -0.5, epsilon = 0.06);
                assert!(achieved < 1.0);
                let replayed = (&x + &y.scale(lambda)).module_norm();
                assert_relative_eq!(replayed, achieved, epsilon = 1e-9);
                assert!(replayed <= 0.5 + 1e-6);
            }
            other => panic!("expected NormDrop, got {other:?}"),
        }
    }

    #[test]
    fn bj_trivial_cases() {
        let sp = c2();
        let x = vec2(&sp, 1.0, 0.5);
        let zero = ModuleElement::zero(&sp);
        assert_eq!(is_bj(&zero, &x).unwrap().answer, Certainty::Holds);
        assert_eq!(is_bj(&x, &zero).unwrap().answer, Certainty::Holds);
    }

    #[test]
    fn minimization_agrees_with_grid_oracle() {
        let sp = c2();
        let x = vec2(&sp, 1.0, 0.0);
        let y = vec2(&sp, 1.0, 1.0);
        let (v, report) = bj_minimization_report(&x, &y, &Tolerances::default()).unwrap();
        assert_eq!(v.answer, Certainty::Fails);
        assert_relative_eq!(report.minimum, 0.5, epsilon = 1e-7);
        assert_relative_eq!(report.lambda.re, -0.5, epsilon = 1e-5);
        assert!(report.lambda.im.abs() < 1e-5);
    }

    #[test]
    fn minimization_holds_at_zero() {
        let sp = c2();
        let x = vec2(&sp, 1.0, 1.0);
        let y = vec2(&sp, 1.0, -1.0);
        let (v, report) = bj_minimization_report(&x, &y, &Tolerances::default()).unwrap();
        assert_eq!(v.answer, Certainty::Holds);
        assert_relative_eq!(report.minimum, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn minimization_self_orthogonality_fails() {
        let sp = c2();
        let x = vec2(&sp, 1.0, 0.0);
        let (v, report) = bj_minimization_report(&x, &x, &Tolerances::default()).unwrap();
        assert_eq!(v.answer, Certainty::Fails);
        assert!(report.minimum <= 1e-6);
        assert_relative_eq!(report.lambda.re, -1.0, epsilon = 1e-5);
    }

    #[test]
    fn quasi_strong_on_matrix_units() {
        // x = diag(1, 1/2), y = e12: c = e12 compresses to [0] on the top
        // frame, so quasi holds with witness e1 while strong fails with
        // sigma = 1.
        let sp = m2();
        let x = mat(&sp, &[1.0, 0.0, 0.0, 0.5]);
        let y = mat(&sp, &[0.0, 1.0, 0.0, 0.0]);

        let q = is_quasi_strong(&x, &y).unwrap();
        assert_eq!(q.answer, Certainty::Holds);
        match q.witness.as_ref().unwrap() {
            StateWitness::Pure(state) => {
                assert_eq!(state.block(), 0);
                assert_relative_eq!(state.vector()[0].norm(), 1.0, epsilon = 1e-10);
            }
            _ => panic!("quasi witness must be pure"),
        }

        let s = is_strong(&x, &y).unwrap();
        assert_eq!(s.answer, Certainty::Fails);
        match s.failure.unwrap() {
            FailureCertificate::KernelGap { sigma_min, .. } => {
                assert_relative_eq!(sigma_min, 1.0, epsilon = 1e-10)
            }
            other => panic!("expected KernelGap, got {other:?}"),
        }

        // Definitional counterexample from the statement: b = e21,
        // lambda = -1/2 drives the norm to 1/2.
        let b = AlgebraElement::matrix_unit(sp.algebra(), 0, 1, 0);
        let yb = right_action(&y, &b).unwrap();
        let dropped = (&x + &yb.scale(c64(-0.5, 0.0))).module_norm();
        assert_relative_eq!(dropped, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn quasi_strong_fails_on_prime_pattern() {
        let sp = c2();
        let x = vec2(&sp, 1.0, 1.0);
        let y = vec2(&sp, 1.0, -1.0);
        let v = is_quasi_strong(&x, &y).unwrap();
        assert_eq!(v.answer, Certainty::Fails);
        match v.failure.unwrap() {
            FailureCertificate::SupportMargins { blocks } => {
                assert_eq!(blocks.len(), 2);
                for (_, m) in blocks {
                    assert_relative_eq!(m, 1.0, epsilon = 1e-9);
                }
            }
            other => panic!("expected SupportMargins, got {other:?}"),
        }
    }

    #[test]
    fn strong_holds_when_c_vanishes_on_frame() {
        let sp = c2();
        let x = vec2(&sp, 1.0, 0.5);
        let y = vec2(&sp, 0.0, 1.0);
        let v = is_strong(&x, &y).unwrap();
        assert_eq!(v.answer, Certainty::Holds);
        let replay = replay_witness(Relation::Strong, &x, &y, v.witness.as_ref().unwrap()).unwrap();
        assert!(replay.zero_error <= 1e-9);
    }

    #[test]
    fn strong_trivial_on_zero_y() {
        let sp = m2();
        let x = mat(&sp, &[1.0, 0.0, 0.0, 0.5]);
        let zero = ModuleElement::zero(&sp);
        assert_eq!(is_strong(&x, &zero).unwrap().answer, Certainty::Holds);
    }

    #[test]
    fn probe_finds_matrix_unit_counterexample() {
        let sp = m2();
        let x = mat(&sp, &[1.0, 0.0, 0.0, 0.5]);
        let y = mat(&sp, &[0.0, 1.0, 0.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        match strong_definitional_probe(&x, &y, 200, &mut rng).unwrap() {
            ProbeOutcome::Refuted { a, achieved, .. } => {
                assert!(achieved < 1.0 - 1e-6);
                assert!(a.operator_norm() > 0.0);
            }
            ProbeOutcome::NoCounterexampleFound { .. } => {
                panic!("probe must refute strong orthogonality here")
            }
        }
    }

    #[test]
    fn probe_supports_true_strong_pair() {
        let sp = c2();
        let x = vec2(&sp, 1.0, 0.5);
        let y = vec2(&sp, 0.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        match strong_definitional_probe(&x, &y, 300, &mut rng).unwrap() {
            ProbeOutcome::NoCounterexampleFound { samples } => assert_eq!(samples, 300),
            ProbeOutcome::Refuted { .. } => panic!("no counterexample exists"),
        }
    }

    #[test]
    fn module_algebra_consistency_examples() {
        let sp = c2();
        assert!(bj_module_algebra_consistency(
            &vec2(&sp, 1.0, 1.0),
            &vec2(&sp, 1.0, -1.0)
        )
        .unwrap());
        assert!(bj_module_algebra_consistency(
            &vec2(&sp, 1.0, 0.0),
            &vec2(&sp, 1.0, 1.0)
        )
        .unwrap());
        assert!(
            bj_module_algebra_consistency(&vec2(&sp, 1.0, 0.5), &ModuleElement::zero(&sp))
                .unwrap()
        );
    }

    #[test]
    fn homogeneity_of_certified_answers() {
        let sp = m2();
        let x = mat(&sp, &[1.0, 0.0, 0.0, 0.5]);
        let y = mat(&sp, &[0.0, 1.0, 0.0, 0.0]);
        let scales = [c64(3.0, 0.0), c64(0.0, -0.25), c64(-2.0, 1.0)];
        for s in scales {
            let xs = x.scale(s);
            for t in scales {
                let yt = y.scale(t);
                assert_eq!(
                    is_quasi_strong(&xs, &yt).unwrap().answer,
                    Certainty::Holds
                );
                assert_eq!(is_strong(&xs, &yt).unwrap().answer, Certainty::Fails);
                assert_eq!(is_bj(&xs, &yt).unwrap().answer, Certainty::Holds);
            }
        }
    }

    #[test]
    fn implication_chain_on_seeded_samples() {
        let spaces = [
            ModuleSpace::self_module(BlockAlgebra::new(vec![1, 1]).unwrap()),
            ModuleSpace::self_module(BlockAlgebra::new(vec![2]).unwrap()),
            ModuleSpace::self_module(BlockAlgebra::new(vec![1, 2]).unwrap()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for sp in &spaces {
            for _ in 0..60 {
                let draw = |rng: &mut ChaCha8Rng| {
                    ModuleElement::new(
                        sp.clone(),
                        sp.algebra()
                            .block_dims()
                            .iter()
                            .zip(sp.row_dims())
                            .map(|(&n, &m)| sampling::ginibre(rng, m, n))
                            .collect(),
                    )
                    .unwrap()
                };
                let x = draw(&mut rng);
                let y = draw(&mut rng);
                let s = is_strong(&x, &y).unwrap().answer;
                let q = is_quasi_strong(&x, &y).unwrap().answer;
                let b = is_bj(&x, &y).unwrap().answer;
                if s == Certainty::Holds {
                    assert_ne!(q, Certainty::Fails, "strong => quasi violated");
                }
                if q == Certainty::Holds {
                    assert_ne!(b, Certainty::Fails, "quasi => bj violated");
                }
            }
        }
    }
}
