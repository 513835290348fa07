//! Constructive generators separating the three orthogonality relations.
//!
//! `make_sqc_pair` produces, in any noncommutative algebra, a pair that is
//! quasi-strongly but not strongly orthogonal; `make_prime_pair` produces,
//! in any algebra with two or more blocks, a pair that is BJ- but not
//! quasi-strongly orthogonal. Both return full certificates so the verdicts
//! can be replayed independently of the generator.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{c64, AlgebraElement, CMatrix, CVector, PureState, StateMixture};
use crate::error::{Error, Result};
use crate::module::{inner_product, right_action, ModuleElement, ModuleSpace};
use crate::nr::top_eigenframe;
use crate::sampling;

/// Spectral shape of the positive contraction used in the strong-failure
/// certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile {
    /// Projection onto the two selected eigenvectors; failure norm 0.
    Projection,
    /// Adds an eigenvalue 1/2 off the selected span, so |a - a^2| = 1/4 and
    /// the achieved failure norm stays within 1/4.
    PaperQuartic,
}

/// Which of the three spectral situations of `<x,x>` the pair realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseLabel {
    RankOne,
    HigherRankProjection,
    MiddleSpectrum,
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseLabel::RankOne => write!(f, "I"),
            CaseLabel::HigherRankProjection => write!(f, "II"),
            CaseLabel::MiddleSpectrum => write!(f, "III"),
        }
    }
}

/// A quasi-strong-but-not-strong pair with all certificates.
#[derive(Debug, Clone)]
pub struct SqcCounterexample {
    pub x_prime: ModuleElement,
    pub y_prime: ModuleElement,
    pub witness: PureState,
    pub failure_b: AlgebraElement,
    pub failure_lambda: Complex64,
    pub achieved_norm: f64,
    pub case_label: CaseLabel,
}

/// A BJ-but-not-quasi-strong pair with all certificates.
#[derive(Debug, Clone)]
pub struct PrimeCounterexample {
    pub u_plus: ModuleElement,
    pub u_minus: ModuleElement,
    pub bj_witness: StateMixture,
    /// Per attained block: the (constant) pure-state value of <u+, u->,
    /// bounded away from zero.
    pub quasi_obstruction: Vec<(usize, f64)>,
}

/// A pair quasi-strongly orthogonal by construction, with its witness.
#[derive(Debug, Clone)]
pub struct QuasiPair {
    pub x: ModuleElement,
    pub y: ModuleElement,
    pub witness: PureState,
}

/// Rotates a vector so its largest entry is real positive; keeps generator
/// output reproducible across eigensolver phase conventions.
fn canonical_phase(v: &CVector) -> CVector {
    let mut arg = 0usize;
    for i in 0..v.len() {
        if v[i].norm() > v[arg].norm() {
            arg = i;
        }
    }
    let z = v[arg];
    if z.norm() < 1e-300 {
        return v.clone();
    }
    v * (z.conj() / z.norm())
}

fn outer(v: &CVector, w: &CVector) -> CMatrix {
    DMatrix::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
}

/// Builds the pair (xa, xau) from an explicit x supported in `block`.
///
/// The construction takes the top eigenvector xi of `<x,x>`, an orthogonal
/// eigenvector xi', the positive contraction a fixing both, and the block
/// unitary u swapping them: the pure state at xi then witnesses the
/// quasi-strong relation while b = u* a, lambda = -1 drives |xa - (xau)b|
/// down to |x(a - a^2)| < 1 = |xa|.
pub fn sqc_pair_from_element(
    x: &ModuleElement,
    block: usize,
    profile: Profile,
) -> Result<SqcCounterexample> {
    let space = x.space().clone();
    let algebra = space.algebra().clone();
    let n = algebra.dim(block);
    if n < 2 {
        return Err(Error::CommutativeAlgebra);
    }
    let norm = x.module_norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "sqc construction needs a norm-one element, got |x| = {norm}"
        )));
    }
    let p = inner_product(x, x)?;
    let spec = crate::algebra::spectral_decomposition(&p, 1e-8)?;
    let eigs = &spec.blocks[block].eigenvalues;
    let vecs = &spec.blocks[block].vectors;
    if eigs.is_empty() || eigs[0] < 1.0 - 1e-9 {
        return Err(Error::Config(
            "element must attain its norm in the selected block".into(),
        ));
    }
    let delta = 1e-9;
    // Paper trichotomy from the spectrum of <x,x> on the block.
    let middle = (0..n).find(|&i| eigs[i] > delta && eigs[i] < 1.0 - delta);
    let top_multiplicity = (0..n).take_while(|&i| eigs[i] >= 1.0 - delta).count();
    let (case_label, partner_idx) = match middle {
        Some(i) => (CaseLabel::MiddleSpectrum, i),
        None if top_multiplicity >= 2 => (CaseLabel::HigherRankProjection, 1),
        None => (CaseLabel::RankOne, n - 1),
    };
    let xi = canonical_phase(&CVector::from_iterator(n, vecs.column(0).iter().cloned()));
    let xi_p = canonical_phase(&CVector::from_iterator(
        n,
        vecs.column(partner_idx).iter().cloned(),
    ));

    // a = projection onto span{xi, xi'}; the quartic profile adds an
    // eigenvalue 1/2 elsewhere so that |a - a^2| = 1/4.
    let projector = outer(&xi, &xi) + outer(&xi_p, &xi_p);
    let mut a = AlgebraElement::from_block(&algebra, block, projector.clone())?;
    if profile == Profile::PaperQuartic {
        let spare = (0..n).find(|&i| i != 0 && i != partner_idx);
        if let Some(i) = spare {
            let eta = canonical_phase(&CVector::from_iterator(n, vecs.column(i).iter().cloned()));
            let quartic = projector + outer(&eta, &eta) * c64(0.5, 0.0);
            a = AlgebraElement::from_block(&algebra, block, quartic)?;
        } else if let Some(other) = (0..algebra.block_count()).find(|&k| k != block) {
            let mut blocks = a.blocks().to_vec();
            blocks[other] =
                CMatrix::identity(algebra.dim(other), algebra.dim(other)) * c64(0.5, 0.0);
            a = AlgebraElement::new(algebra.clone(), blocks)?;
        }
        // With a single 2-dimensional block there is no room for the extra
        // eigenvalue; the projection values apply and the bound still holds.
    }

    // Block unitary swapping xi and xi', identity elsewhere.
    let swap = CMatrix::identity(n, n) - outer(&xi, &xi) - outer(&xi_p, &xi_p)
        + outer(&xi_p, &xi)
        + outer(&xi, &xi_p);
    let mut u_blocks: Vec<CMatrix> = algebra
        .block_dims()
        .iter()
        .map(|&d| CMatrix::identity(d, d))
        .collect();
    u_blocks[block] = swap;
    let u = AlgebraElement::new(algebra.clone(), u_blocks)?;

    let x_prime = right_action(x, &a)?;
    let y_prime = right_action(&x_prime, &u)?;
    let witness = PureState::new(algebra.clone(), block, xi)?;
    let failure_b = &u.adjoint() * &a;
    let failure_lambda = c64(-1.0, 0.0);
    let moved = right_action(&y_prime, &failure_b)?;
    let achieved_norm = (&x_prime + &moved.scale(failure_lambda)).module_norm();

    Ok(SqcCounterexample {
        x_prime,
        y_prime,
        witness,
        failure_b,
        failure_lambda,
        achieved_norm,
        case_label,
    })
}

/// Samples a norm-one element in a noncommutative block and builds the
/// quasi-strong-but-not-strong pair from it.
pub fn make_sqc_pair<R: Rng + ?Sized>(
    space: &ModuleSpace,
    block_choice: Option<usize>,
    profile: Profile,
    rng: &mut R,
) -> Result<SqcCounterexample> {
    let algebra = space.algebra();
    let block = match block_choice {
        Some(k) if k < algebra.block_count() && algebra.dim(k) >= 2 => k,
        Some(_) => return Err(Error::CommutativeAlgebra),
        None => match (0..algebra.block_count()).find(|&k| algebra.dim(k) >= 2) {
            Some(k) => k,
            None => return Err(Error::CommutativeAlgebra),
        },
    };
    let (m, n) = (space.rows(block), algebra.dim(block));
    let r = m.min(n);
    // Singular profile of x selects the case; with one singular value only
    // the rank-one case is realizable.
    let mut sigma = vec![0.0; r];
    sigma[0] = 1.0;
    if r >= 2 {
        match rng.gen_range(0..3u32) {
            0 => {}
            1 => sigma[1] = 1.0,
            _ => {
                for s in sigma.iter_mut().skip(1) {
                    *s = 0.2 + 0.6 * rng.gen::<f64>();
                }
            }
        }
    }
    let u = sampling::random_unitary(rng, m);
    let v = sampling::random_unitary(rng, n);
    let mut core = CMatrix::zeros(m, n);
    for (i, &s) in sigma.iter().enumerate() {
        core[(i, i)] = c64(s, 0.0);
    }
    let x = ModuleElement::from_block(space, block, &u * core * v.adjoint())?;
    sqc_pair_from_element(&x, block, profile)
}

/// Builds norm-one elements in two different blocks and returns the pair
/// (u + v, u - v): BJ-orthogonal through the half/half mixture of the two
/// top states, never quasi-strongly orthogonal because every norm-attaining
/// pure state sees +1 or -1.
pub fn make_prime_pair<R: Rng + ?Sized>(
    space: &ModuleSpace,
    blocks: (usize, usize),
    rng: &mut R,
) -> Result<PrimeCounterexample> {
    let algebra = space.algebra().clone();
    if algebra.block_count() < 2 {
        return Err(Error::NotEnoughBlocks);
    }
    let (bi, bj) = blocks;
    if bi == bj || bi >= algebra.block_count() || bj >= algebra.block_count() {
        return Err(Error::Config(format!(
            "prime pair needs two distinct blocks, got ({bi}, {bj})"
        )));
    }
    let mut build = |block: usize| -> Result<(ModuleElement, PureState)> {
        let (m, n) = (space.rows(block), algebra.dim(block));
        let r = m.min(n);
        let mut sigma = vec![0.0; r];
        sigma[0] = 1.0;
        for s in sigma.iter_mut().skip(1) {
            *s = 0.2 + 0.6 * rng.gen::<f64>();
        }
        let u = sampling::random_unitary(rng, m);
        let v = sampling::random_unitary(rng, n);
        let mut core = CMatrix::zeros(m, n);
        for (i, &s) in sigma.iter().enumerate() {
            core[(i, i)] = c64(s, 0.0);
        }
        let el = ModuleElement::from_block(space, block, &u * core * v.adjoint())?;
        let xi = canonical_phase(&CVector::from_iterator(n, v.column(0).iter().cloned()));
        Ok((el, PureState::new(algebra.clone(), block, xi)?))
    };
    let (u_el, state_i) = build(bi)?;
    let (v_el, state_j) = build(bj)?;
    let u_plus = &u_el + &v_el;
    let u_minus = &u_el - &v_el;

    let cross = inner_product(&u_plus, &u_minus)?;
    let obstruction = vec![
        (bi, state_i.evaluate(&cross)?.re),
        (bj, state_j.evaluate(&cross)?.re),
    ];
    let bj_witness = StateMixture::new(vec![(0.5, state_i), (0.5, state_j)])?;

    Ok(PrimeCounterexample {
        u_plus,
        u_minus,
        bj_witness,
        quasi_obstruction: obstruction,
    })
}

/// Checks |alpha u + beta v| = max(|alpha|, |beta|) over the grid for
/// disjointly supported norm-one elements; returns the maximum deviation.
pub fn verify_max_norm_formula(
    u: &ModuleElement,
    v: &ModuleElement,
    grid: &[(Complex64, Complex64)],
) -> Result<f64> {
    let overlap = inner_product(u, v)?.operator_norm();
    if overlap > 1e-9 {
        return Err(Error::NotDisjoint { overlap });
    }
    let mut max_dev: f64 = 0.0;
    for &(alpha, beta) in grid {
        let combo = &u.scale(alpha) + &v.scale(beta);
        let expected = alpha.norm().max(beta.norm());
        max_dev = max_dev.max((combo.module_norm() - expected).abs());
    }
    Ok(max_dev)
}

/// Deterministic 100-point grid of complex (alpha, beta) pairs, including
/// the axis and balanced cases.
pub fn alpha_beta_grid() -> Vec<(Complex64, Complex64)> {
    let mut grid = Vec::with_capacity(100);
    grid.push((c64(1.0, 0.0), c64(1.0, 0.0)));
    grid.push((c64(2.0, 0.0), c64(0.0, 0.0)));
    grid.push((c64(1.0, 1.0), c64(1.0, -1.0)));
    let mut k = 0usize;
    while grid.len() < 100 {
        let a = (k % 10) as f64;
        let b = (k / 10) as f64;
        grid.push((
            Complex64::from_polar(0.25 * a, 0.7 * a),
            Complex64::from_polar(0.3 * b, -0.9 * b),
        ));
        k += 1;
    }
    grid
}

/// Samples x and corrects a second draw so that the top state of `<x,x>`
/// kills `<x,y>`: the returned pair is quasi-strongly orthogonal with the
/// stored witness.
pub fn make_quasi_pair<R: Rng + ?Sized>(space: &ModuleSpace, rng: &mut R) -> Result<QuasiPair> {
    let draw = |rng: &mut R| -> Result<ModuleElement> {
        ModuleElement::new(
            space.clone(),
            space
                .algebra()
                .block_dims()
                .iter()
                .zip(space.row_dims())
                .map(|(&n, &m)| sampling::ginibre(rng, m, n))
                .collect(),
        )
    };
    let mut x = draw(rng)?;
    let mut tries = 0;
    while x.module_norm() < 1e-9 {
        tries += 1;
        if tries > 8 {
            return Err(Error::DegenerateSample);
        }
        x = draw(rng)?;
    }
    let y0 = draw(rng)?;
    quasi_pair_from(&x, &y0)
}

/// The correction step of [`make_quasi_pair`] on explicit inputs.
pub fn quasi_pair_from(x: &ModuleElement, y0: &ModuleElement) -> Result<QuasiPair> {
    let norm = x.module_norm();
    if norm < 1e-9 {
        return Err(Error::DegenerateSample);
    }
    let p = inner_product(x, x)?;
    let frame = top_eigenframe(&p, 1e-9)?;
    let block = frame
        .attained_blocks()
        .next()
        .ok_or(Error::DegenerateSample)?;
    let basis = &frame.blocks[block].basis;
    let xi = canonical_phase(&CVector::from_iterator(
        basis.nrows(),
        basis.column(0).iter().cloned(),
    ));
    let c0 = inner_product(x, y0)?;
    let mu = xi.dotc(&(c0.block(block) * &xi)) / c64(norm * norm, 0.0);
    let y = y0 - &x.scale(mu);
    let witness = PureState::new(x.space().algebra().clone(), block, xi)?;
    Ok(QuasiPair {
        x: x.clone(),
        y,
        witness,
    })
}
