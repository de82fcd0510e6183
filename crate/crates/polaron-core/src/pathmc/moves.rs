//! Metropolis moves. Every proposal samples the exact free-path measure of
//! the segment it touches (Brownian bridge inside, Brownian extension at a
//! free end), so the acceptance ratio reduces to the interaction weight —
//! plus the pinning weight whenever an endpoint moves.

use rand::Rng;
use rand_distr::StandardNormal;

use super::action::ActionEngine;
use super::{BoundaryKind, Path};
use crate::model::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    /// Regenerate an interior segment between two fixed path points.
    Bridge,
    /// Regenerate the first points given the anchor to their right.
    FreeEndLeft,
    /// Regenerate the last points given the anchor to their left.
    FreeEndRight,
    /// Rigid shift of the whole path (free/pinned boundaries only).
    Translate,
}

/// Knobs the pre-run tuner adjusts.
#[derive(Debug, Clone, Copy)]
pub struct MoveParams {
    /// Number of points regenerated per bridge / end move.
    pub segment_len: usize,
    /// Standard deviation of a rigid-shift component.
    pub translate_step: f64,
}

impl Default for MoveParams {
    fn default() -> Self {
        MoveParams {
            segment_len: 16,
            translate_step: 0.5,
        }
    }
}

fn select_kind<R: Rng + ?Sized>(boundary: &BoundaryKind, n: usize, rng: &mut R) -> MoveKind {
    let u: f64 = rng.random();
    let kind = match boundary {
        BoundaryKind::DeltaStartFreeEnd => {
            if u < 0.8 {
                MoveKind::Bridge
            } else {
                MoveKind::FreeEndRight
            }
        }
        BoundaryKind::FreeBoth | BoundaryKind::TwoSidedPinned { .. } => {
            if u < 0.7 {
                MoveKind::Bridge
            } else if u < 0.8 {
                MoveKind::FreeEndLeft
            } else if u < 0.9 {
                MoveKind::FreeEndRight
            } else {
                MoveKind::Translate
            }
        }
    };
    if kind == MoveKind::Bridge && n < 3 {
        MoveKind::FreeEndRight
    } else {
        kind
    }
}

/// One Metropolis step: draw a move kind, propose, accept or reject.
/// Returns what was tried and whether it was accepted.
pub fn propose_and_accept<R: Rng + ?Sized>(
    path: &mut Path,
    engine: &mut ActionEngine,
    boundary: &BoundaryKind,
    params: &MoveParams,
    rng: &mut R,
) -> (MoveKind, bool) {
    let kind = select_kind(boundary, path.len(), rng);
    let accepted = match kind {
        MoveKind::Bridge => bridge_move(path, engine, params, rng),
        MoveKind::FreeEndLeft => end_move(path, engine, boundary, params, rng, true),
        MoveKind::FreeEndRight => end_move(path, engine, boundary, params, rng, false),
        MoveKind::Translate => translate_move(path, engine, boundary, params, rng),
    };
    (kind, accepted)
}

/// Sequential bridge construction: filling index i between the running
/// anchor (index i-1, value `prev`) and the fixed right endpoint e,
/// q_i ~ N(prev + (q_e - prev)/(m+1), dt·m/(m+1)·I) with m = e - i.
fn bridge_move<R: Rng + ?Sized>(
    path: &mut Path,
    engine: &mut ActionEngine,
    params: &MoveParams,
    rng: &mut R,
) -> bool {
    let n = path.len();
    let l = params.segment_len.clamp(1, n - 2);
    let s = rng.random_range(0..n - 1 - l);
    let e = s + l + 1;
    let qe = path.q[e];
    let mut prev = path.q[s];
    let mut proposal = vec![Vec3::zeros(); l];
    for (j, slot) in proposal.iter_mut().enumerate() {
        let m = (l - j) as f64;
        let sd = (path.dt * m / (m + 1.0)).sqrt();
        let mut q = prev + (qe - prev) / (m + 1.0);
        for a in 0..path.dim {
            let xi: f64 = rng.sample(StandardNormal);
            q[a] += sd * xi;
        }
        *slot = q;
        prev = q;
    }
    let delta = engine.propose_segment(path, s + 1, e - 1, &proposal);
    let u: f64 = rng.random();
    let accept = u.ln() < -delta;
    if accept {
        engine.commit_segment(path, s + 1, e - 1, &proposal, delta);
    }
    accept
}

/// Free-end regeneration: fresh Brownian steps off the interior anchor
/// (time-reversed for the left end — the reversed Wiener law is Wiener).
fn end_move<R: Rng + ?Sized>(
    path: &mut Path,
    engine: &mut ActionEngine,
    boundary: &BoundaryKind,
    params: &MoveParams,
    rng: &mut R,
    left: bool,
) -> bool {
    let n = path.len();
    let l = params.segment_len.clamp(1, n - 1);
    let (lo, hi, anchor) = if left {
        (0, l - 1, path.q[l])
    } else {
        (n - l, n - 1, path.q[n - 1 - l])
    };
    let sd = path.dt.sqrt();
    let mut proposal = vec![Vec3::zeros(); l];
    let mut prev = anchor;
    let order: Box<dyn Iterator<Item = usize>> = if left {
        Box::new((0..l).rev())
    } else {
        Box::new(0..l)
    };
    for j in order {
        let mut q = prev;
        for a in 0..path.dim {
            let xi: f64 = rng.sample(StandardNormal);
            q[a] += sd * xi;
        }
        proposal[j] = q;
        prev = q;
    }
    let moved_end = if left { proposal[0] } else { proposal[l - 1] };
    let old_end = if left { path.q[0] } else { path.q[n - 1] };
    let dlnw = boundary.ln_weight(&moved_end) - boundary.ln_weight(&old_end);
    let delta = engine.propose_segment(path, lo, hi, &proposal);
    let u: f64 = rng.random();
    let accept = u.ln() < -delta + dlnw;
    if accept {
        engine.commit_segment(path, lo, hi, &proposal, delta);
    }
    accept
}

/// Rigid shift: the interaction depends only on differences, so only the
/// pinning weight enters the ratio.
fn translate_move<R: Rng + ?Sized>(
    path: &mut Path,
    engine: &mut ActionEngine,
    boundary: &BoundaryKind,
    params: &MoveParams,
    rng: &mut R,
) -> bool {
    let n = path.len();
    let mut shift = Vec3::zeros();
    for a in 0..path.dim {
        let xi: f64 = rng.sample(StandardNormal);
        shift[a] = params.translate_step * xi;
    }
    let dlnw = boundary.ln_weight(&(path.q[0] + shift))
        + boundary.ln_weight(&(path.q[n - 1] + shift))
        - boundary.ln_weight(&path.q[0])
        - boundary.ln_weight(&path.q[n - 1]);
    let u: f64 = rng.random();
    let accept = u.ln() < dlnw;
    if accept {
        engine.translate(path, &shift);
    }
    accept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DispersionSpec, FormFactorSpec, KGridSpec, Model, ModelSpec};
    use crate::pathmc::action::{interaction_action, KernelKind};
    use crate::pathmc::PathConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn model_1d(alpha: f64) -> Model {
        Model::new(ModelSpec {
            dimension: 1,
            alpha,
            dispersion: DispersionSpec::Constant { c0: 1.0 },
            form_factor: FormFactorSpec::Gaussian { g0: 0.8, width: 1.2 },
            grid: KGridSpec { dk: 0.5, kmax: 1.5 },
        })
        .unwrap()
    }

    fn path_for(boundary: BoundaryKind, t_minus: f64, t_plus: f64) -> Path {
        let cfg = PathConfig {
            t: 4.0,
            t_minus,
            t_plus,
            dt: 0.1,
            boundary,
        };
        Path::zeros(&cfg, 1).unwrap()
    }

    #[test]
    fn zero_coupling_accepts_every_move() {
        let model = model_1d(0.0);
        for boundary in [BoundaryKind::DeltaStartFreeEnd, BoundaryKind::FreeBoth] {
            let mut path = path_for(boundary.clone(), 0.0, 0.0);
            let mut eng = ActionEngine::new(&model, &path, KernelKind::Discrete).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(11);
            let params = MoveParams::default();
            for _ in 0..400 {
                let (_, ok) = propose_and_accept(&mut path, &mut eng, &boundary, &params, &mut rng);
                assert!(ok, "free-measure proposals are always accepted at alpha = 0");
            }
            if matches!(boundary, BoundaryKind::DeltaStartFreeEnd) {
                assert_eq!(path.q[0], Vec3::zeros(), "pinned start never moves");
            }
            for q in &path.q {
                assert_eq!(q[1], 0.0);
                assert_eq!(q[2], 0.0);
            }
        }
    }

    #[test]
    fn moves_are_deterministic_for_a_seed() {
        let model = model_1d(0.7);
        let run = || {
            let mut path = path_for(BoundaryKind::FreeBoth, 0.0, 0.0);
            let mut eng = ActionEngine::new(&model, &path, KernelKind::Discrete).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(99);
            let params = MoveParams::default();
            for _ in 0..200 {
                propose_and_accept(&mut path, &mut eng, &BoundaryKind::FreeBoth, &params, &mut rng);
            }
            path.q
        };
        let (a, b) = (run(), run());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x[0].to_bits(), y[0].to_bits());
        }
    }

    #[test]
    fn engine_action_stays_consistent_through_mixed_moves() {
        let model = model_1d(0.9);
        let mut path = path_for(BoundaryKind::FreeBoth, 0.0, 0.0);
        let mut eng = ActionEngine::new(&model, &path, KernelKind::Discrete).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let params = MoveParams::default();
        for _ in 0..300 {
            propose_and_accept(&mut path, &mut eng, &BoundaryKind::FreeBoth, &params, &mut rng);
        }
        let reference = interaction_action(&path, &model, KernelKind::Discrete).unwrap();
        assert!(
            (eng.current() - reference).abs() < 1e-9 * reference.abs().max(1.0),
            "{} vs {reference}",
            eng.current()
        );
    }

    #[test]
    fn tight_pinning_rejects_large_translations() {
        let model = model_1d(0.0);
        let pinned = BoundaryKind::TwoSidedPinned {
            r: vec![0.0, 0.5, 1.0, 2.0],
            phi: vec![1.0, 0.05, 1e-4, 1e-9],
        };
        let mut path = path_for(pinned.clone(), 1.0, 1.0);
        let mut eng = ActionEngine::new(&model, &path, KernelKind::Discrete).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let params = MoveParams {
            segment_len: 8,
            translate_step: 2.0,
        };
        let (mut tried, mut accepted) = (0u32, 0u32);
        for _ in 0..4000 {
            let (kind, ok) = propose_and_accept(&mut path, &mut eng, &pinned, &params, &mut rng);
            if kind == MoveKind::Translate {
                tried += 1;
                accepted += ok as u32;
            }
        }
        assert!(tried > 100);
        let rate = accepted as f64 / tried as f64;
        assert!(rate < 0.5, "2-sigma shifts against a tight pin: rate {rate}");
        // The pin also keeps the endpoints near the origin.
        assert!(path.q[0].norm() < 2.0 && path.q.last().unwrap().norm() < 2.0);
    }
}
