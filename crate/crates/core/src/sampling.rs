//! Random probability vectors for property checks and verification sweeps.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bell::ProbabilityVector;
use crate::ppt::ppt_inequalities;

/// Deterministic RNG used by every randomized path.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample on the 16-simplex: the gaps between 15 sorted uniforms.
pub fn uniform_simplex<R: Rng + ?Sized>(rng: &mut R) -> ProbabilityVector {
    let mut cuts = [0.0f64; 17];
    for c in cuts.iter_mut().take(16).skip(1) {
        *c = rng.random::<f64>();
    }
    cuts[16] = 1.0;
    cuts[1..16].sort_by(f64::total_cmp);
    let p: [f64; 16] = std::array::from_fn(|k| cuts[k + 1] - cuts[k]);
    ProbabilityVector::new(p).expect("gaps of sorted uniforms form a simplex point")
}

/// How a boundary-biased sample sits relative to the PPT polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySide {
    On,
    Inside,
    Outside,
}

/// Relative step used to push boundary samples just inside or outside.
pub const BOUNDARY_NUDGE: f64 = 1e-6;

/// A point on (or within [`BOUNDARY_NUDGE`] of) the boundary of the PPT
/// polytope intersected with the simplex.
///
/// Shoots a ray from the maximally mixed state through a uniform sample and
/// stops at the first supporting hyperplane it meets, which is one of the 112
/// inequality facets or a simplex facet.
pub fn boundary_biased<R: Rng + ?Sized>(rng: &mut R) -> (ProbabilityVector, BoundarySide) {
    let center = ProbabilityVector::uniform();
    loop {
        let target = uniform_simplex(rng);
        let dir: [f64; 16] = std::array::from_fn(|k| target.as_array()[k] - center.as_array()[k]);

        // Residuals are affine along the ray: r(λ) = r_c + λ (r_t − r_c).
        let rc = ppt_inequalities(&center);
        let rt = ppt_inequalities(&target);
        let mut hit = f64::INFINITY;
        for (c, t) in rc.iter().zip(rt.iter()) {
            let slope = t.residual - c.residual;
            if slope < 0.0 {
                hit = hit.min(-c.residual / slope);
            }
        }
        let mut simplex_edge = f64::INFINITY;
        for (k, d) in dir.iter().enumerate() {
            if *d < 0.0 {
                simplex_edge = simplex_edge.min(-center.as_array()[k] / d);
            }
        }
        if !hit.is_finite() {
            continue;
        }
        let side = match rng.random_range(0..4) {
            0 => BoundarySide::Inside,
            1 => BoundarySide::Outside,
            _ => BoundarySide::On,
        };
        let lambda = match side {
            BoundarySide::On => hit,
            BoundarySide::Inside => hit * (1.0 - BOUNDARY_NUDGE),
            BoundarySide::Outside => hit * (1.0 + BOUNDARY_NUDGE),
        };
        if lambda > simplex_edge {
            // The simplex cuts the ray before the PPT facet does.
            continue;
        }
        let p: [f64; 16] = std::array::from_fn(|k| (center.as_array()[k] + lambda * dir[k]).max(0.0));
        let sum: f64 = p.iter().sum();
        if let Ok(v) = ProbabilityVector::new(p.map(|x| x / sum)) {
            return (v, side);
        }
    }
}
