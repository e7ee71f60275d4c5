//! Grid search for Nash plays and the strictly competitive mini-max value.
//!
//! Strategies are sampled through Bloch angles: `alpha` on `n_alpha` evenly
//! spaced points of `[0, pi]` (both ends included) and `phi` on `n_phi` points
//! of `[0, 2pi)` (0 included, 2pi excluded). At the poles `phi` only changes
//! the global phase, so the pole rows keep just `phi = 0`.
//!
//! Every grid play is scored analytically with its worst Nash margin, so the
//! cost is one closed-form evaluation per cell. The best `SEED_POOL * top_k`
//! cells are then refined by a local pattern search whose step halves
//! `refine_depth` times, and the best `top_k` distinct plays are reported.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qlinalg::{
    basis_index, from_angles_raw, BlochAngles, LinalgError, QubitState, Unitary4,
};
use crate::quantum_game::{
    max_deviation_amplitude, response_coeffs, verify_nash, worst_margin, CoeffPair,
    NashCertificate, Play, QuantumGameSpec, GRID_EPSILON,
};
use crate::Player;

/// Upper bound on accepted moves per refinement level.
const MAX_MOVES_PER_LEVEL: usize = 32;

/// Grid seeds refined per reported candidate.
pub const SEED_POOL: usize = 4;

pub const NO_EQUILIBRIUM_NOTE: &str = "no equilibrium found at this resolution";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("degenerate grid: n_alpha must be at least 2 (got {0})")]
    AlphaPoints(usize),
    #[error("degenerate grid: n_phi must be at least 1 (got {0})")]
    PhiPoints(usize),
    #[error("top_k must be at least 1")]
    TopK,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_alpha: usize,
    pub n_phi: usize,
    pub refine_depth: u32,
    pub top_k: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_alpha: 17,
            n_phi: 8,
            refine_depth: 4,
            top_k: 5,
        }
    }
}

impl GridSpec {
    pub fn new(
        n_alpha: usize,
        n_phi: usize,
        refine_depth: u32,
        top_k: usize,
    ) -> Result<Self, SearchError> {
        let g = Self {
            n_alpha,
            n_phi,
            refine_depth,
            top_k,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.n_alpha < 2 {
            return Err(SearchError::AlphaPoints(self.n_alpha));
        }
        if self.n_phi < 1 {
            return Err(SearchError::PhiPoints(self.n_phi));
        }
        if self.top_k < 1 {
            return Err(SearchError::TopK);
        }
        Ok(())
    }

    pub fn alpha_step(&self) -> f64 {
        PI / (self.n_alpha - 1) as f64
    }

    pub fn phi_step(&self) -> f64 {
        TAU / self.n_phi as f64
    }

    /// Grid points for one player in lexicographic `(i_alpha, i_phi)` order.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut pts = Vec::with_capacity(self.n_alpha * self.n_phi);
        for ia in 0..self.n_alpha {
            let alpha = if ia == self.n_alpha - 1 {
                PI
            } else {
                ia as f64 * self.alpha_step()
            };
            let n_phi = if ia == 0 || ia == self.n_alpha - 1 {
                1
            } else {
                self.n_phi
            };
            for ip in 0..n_phi {
                pts.push(GridPoint {
                    i_alpha: ia,
                    i_phi: ip,
                    alpha,
                    phi: ip as f64 * self.phi_step(),
                });
            }
        }
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub i_alpha: usize,
    pub i_phi: usize,
    pub alpha: f64,
    pub phi: f64,
}

impl GridPoint {
    pub fn state(&self) -> QubitState {
        from_angles_raw(self.alpha, self.phi)
    }
}

/// `phi` wrapped into `[0, 2pi)`, `alpha` clamped into `[0, pi]`, and `phi`
/// pinned to 0 at the poles.
fn normalize_angles(alpha: f64, phi: f64) -> BlochAngles {
    let alpha = alpha.clamp(0.0, PI);
    let phi = phi.rem_euclid(TAU);
    let phi = if phi >= TAU || alpha == 0.0 || alpha == PI {
        0.0
    } else {
        phi
    };
    BlochAngles { alpha, phi }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    /// `(i_alpha1, i_phi1, i_alpha2, i_phi2)` of the seeding grid cell.
    pub grid_index: [usize; 4],
    pub grid_margin: f64,
    /// Angles after refinement, Player I then Player II.
    pub angles: [BlochAngles; 2],
    pub play: Play,
    pub worst_margin: f64,
    pub is_equilibrium: bool,
    pub certificate: NashCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridStats {
    pub cells_evaluated: usize,
    pub refinement_evaluations: usize,
    /// Informational only; excluded from determinism guarantees.
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolution {
    pub grid: GridSpec,
    pub alpha_step: f64,
    pub phi_step: f64,
    pub final_alpha_step: f64,
    pub final_phi_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub candidates: Vec<Candidate>,
    pub equilibrium_found: bool,
    pub note: Option<String>,
    pub epsilon: f64,
    pub stats: GridStats,
    pub resolution: Resolution,
}

impl SearchReport {
    pub fn best(&self) -> Option<&Candidate> {
        self.candidates.first()
    }
}

/// Descending margin, then ascending grid index.
fn rank(a: (f64, [usize; 4]), b: (f64, [usize; 4])) -> Ordering {
    b.0.partial_cmp(&a.0)
        .unwrap_or(Ordering::Equal)
        .then(a.1.cmp(&b.1))
}

/// Grid search with the default grid tolerance.
pub fn search_nash(spec: &QuantumGameSpec, grid: &GridSpec) -> Result<SearchReport, SearchError> {
    search_nash_with(spec, grid, GRID_EPSILON)
}

pub fn search_nash_with(
    spec: &QuantumGameSpec,
    grid: &GridSpec,
    epsilon: f64,
) -> Result<SearchReport, SearchError> {
    grid.validate()?;
    let start = Instant::now();
    let points = grid.points();
    let states: Vec<QubitState> = points.iter().map(GridPoint::state).collect();

    // best seed cells, kept sorted
    let pool = grid.top_k * SEED_POOL;
    let mut top: Vec<(f64, [usize; 4], usize, usize)> = Vec::with_capacity(pool + 1);
    let mut cells = 0usize;
    for (ka, pa) in points.iter().enumerate() {
        for (kb, pb) in points.iter().enumerate() {
            cells += 1;
            let m = worst_margin(spec, &Play::new(states[ka], states[kb]));
            let idx = [pa.i_alpha, pa.i_phi, pb.i_alpha, pb.i_phi];
            if top.len() == pool
                && rank((m, idx), (top[top.len() - 1].0, top[top.len() - 1].1)) != Ordering::Less
            {
                continue;
            }
            let pos = top.partition_point(|e| rank((e.0, e.1), (m, idx)) == Ordering::Less);
            top.insert(pos, (m, idx, ka, kb));
            top.truncate(pool);
        }
    }

    let mut refinement_evaluations = 0usize;
    let mut refined: Vec<Candidate> = top
        .into_iter()
        .map(|(m, idx, ka, kb)| {
            let start = [
                points[ka].alpha,
                points[ka].phi,
                points[kb].alpha,
                points[kb].phi,
            ];
            let (x, margin, evals) = refine_play(spec, start, m, grid);
            refinement_evaluations += evals;
            let angles = [normalize_angles(x[0], x[1]), normalize_angles(x[2], x[3])];
            let play = Play::new(from_angles_raw(x[0], x[1]), from_angles_raw(x[2], x[3]));
            let certificate = verify_nash(spec, &play, epsilon);
            debug_assert!((certificate.worst_margin() - margin).abs() < 1e-12);
            Candidate {
                grid_index: idx,
                grid_margin: m,
                angles,
                play,
                worst_margin: certificate.worst_margin(),
                is_equilibrium: certificate.verdict,
                certificate,
            }
        })
        .collect();
    refined.sort_by(|a, b| {
        rank(
            (a.worst_margin, a.grid_index),
            (b.worst_margin, b.grid_index),
        )
    });

    // seeds that refine onto the same play are reported once
    let scale = 0.5f64.powi(grid.refine_depth as i32);
    let min_separation = grid.alpha_step().min(grid.phi_step()) * scale;
    let mut candidates: Vec<Candidate> = Vec::with_capacity(grid.top_k);
    for c in refined {
        if candidates.len() == grid.top_k {
            break;
        }
        let distinct = candidates.iter().all(|k| {
            k.play
                .a
                .bloch_distance(&c.play.a)
                .max(k.play.b.bloch_distance(&c.play.b))
                > min_separation
        });
        if distinct {
            candidates.push(c);
        }
    }

    let equilibrium_found = candidates.iter().any(|c| c.is_equilibrium);
    Ok(SearchReport {
        candidates,
        equilibrium_found,
        note: (!equilibrium_found).then(|| NO_EQUILIBRIUM_NOTE.to_string()),
        epsilon,
        stats: GridStats {
            cells_evaluated: cells,
            refinement_evaluations,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        resolution: Resolution {
            grid: *grid,
            alpha_step: grid.alpha_step(),
            phi_step: grid.phi_step(),
            final_alpha_step: grid.alpha_step() * scale,
            final_phi_step: grid.phi_step() * scale,
        },
    })
}

/// Coordinate pattern search maximizing the worst margin. Only strict
/// improvements are accepted, so the result never scores below `start`.
fn refine_play(
    spec: &QuantumGameSpec,
    start: [f64; 4],
    start_margin: f64,
    grid: &GridSpec,
) -> ([f64; 4], f64, usize) {
    let eval = |x: &[f64; 4]| {
        worst_margin(
            spec,
            &Play::new(from_angles_raw(x[0], x[1]), from_angles_raw(x[2], x[3])),
        )
    };
    let steps = [
        grid.alpha_step(),
        grid.phi_step(),
        grid.alpha_step(),
        grid.phi_step(),
    ];
    pattern_search(
        start,
        start_margin,
        steps,
        grid.refine_depth,
        eval,
        |a, b| a > b,
    )
}

/// Generic local pattern search over `N` angle coordinates (alternating
/// `alpha`, `phi`). At each level the step is halved and all `3^N`
/// neighbours are tried; the first strictly better one (per `better`) is
/// taken and the level repeats until no neighbour improves.
fn pattern_search<const N: usize>(
    start: [f64; N],
    start_value: f64,
    base_steps: [f64; N],
    depth: u32,
    mut eval: impl FnMut(&[f64; N]) -> f64,
    better: impl Fn(f64, f64) -> bool,
) -> ([f64; N], f64, usize) {
    let mut x = start;
    let mut value = start_value;
    let mut evals = 0;
    let mut steps = base_steps;
    let n_neighbors = 3usize.pow(N as u32);
    for _ in 0..depth {
        for s in steps.iter_mut() {
            *s /= 2.0;
        }
        for _ in 0..MAX_MOVES_PER_LEVEL {
            let mut best: Option<([f64; N], f64)> = None;
            for code in 0..n_neighbors {
                if code == (n_neighbors - 1) / 2 {
                    continue; // all-zero offset
                }
                let mut y = x;
                let mut c = code;
                for k in 0..N {
                    let off = (c % 3) as f64 - 1.0;
                    c /= 3;
                    y[k] += off * steps[k];
                    if k % 2 == 0 {
                        y[k] = y[k].clamp(0.0, PI);
                    } else {
                        y[k] = y[k].rem_euclid(TAU);
                    }
                }
                let v = eval(&y);
                evals += 1;
                let incumbent = best.map_or(value, |b| b.1);
                if better(v, incumbent) {
                    best = Some((y, v));
                }
            }
            match best {
                Some((y, v)) => {
                    x = y;
                    value = v;
                }
                None => break,
            }
        }
    }
    (x, value, evals)
}

/// Largest `|c1 x + c2 y|` over the angle grid; a sampled lower estimate of
/// [`max_deviation_amplitude`].
pub fn grid_max_amplitude(
    pair: &CoeffPair,
    n_alpha: usize,
    n_phi: usize,
) -> Result<f64, SearchError> {
    let grid = GridSpec::new(n_alpha, n_phi, 0, 1)?;
    Ok(grid
        .points()
        .iter()
        .map(|p| pair.eval(&p.state()).norm())
        .fold(0.0, f64::max))
}

/// `K_t = [[U_t1, U_t2], [U_t3, U_t4]]`, so that `N_t = (x1, y1) K_t (x2, y2)^T`.
pub fn target_kernel(u: &Unitary4, target: usize) -> Result<[[Complex64; 2]; 2], LinalgError> {
    let t = basis_index(target)?;
    Ok([
        [u.entry(t, 1), u.entry(t, 2)],
        [u.entry(t, 3), u.entry(t, 4)],
    ])
}

/// Singular values `(largest, smallest)` of a complex 2x2 matrix.
///
/// Uses `s_max^2 + s_min^2 = ||K||_F^2` and `s_max s_min = |det K|`, taking
/// the larger root first and recovering the smaller one from the determinant
/// to avoid cancellation.
pub fn singular_values_2x2(k: &[[Complex64; 2]; 2]) -> (f64, f64) {
    let fro2: f64 = k.iter().flatten().map(|z| z.norm_sqr()).sum();
    let det = (k[0][0] * k[1][1] - k[0][1] * k[1][0]).norm();
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let s_max = ((fro2 + disc) / 2.0).sqrt();
    let s_min = if s_max > 0.0 { det / s_max } else { 0.0 };
    (s_max, s_min.min(s_max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimaxReport {
    pub target: usize,
    /// Which quantity `value` is.
    pub objective: String,
    /// `min over B of max over A of |N_target|` on the refined grid.
    pub value: f64,
    /// Player II's minimizing strategy.
    pub minimizing_strategy: QubitState,
    pub minimizing_angles: BlochAngles,
    /// Player I's best reply to it.
    pub maximizing_response: QubitState,
    /// Smallest singular value of `K_target`.
    pub closed_form_value: f64,
    pub gap: f64,
    /// Present only when requested; identically 0 since a linear form on C^2 always has a unit kernel vector.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maximin_value: Option<f64>,
    pub resolution: Resolution,
}

pub const MINIMAX_OBJECTIVE: &str =
    "min over Player II strategies of max over Player I strategies of |<b_target|U(A x B)>|";

/// Mini-max of the target amplitude modulus: Player I (maximizer) wants the
/// outcome on `b_target`, Player II (minimizer) wants it anywhere else.
pub fn minimax_search(
    u: &Unitary4,
    target: usize,
    grid: &GridSpec,
) -> Result<MinimaxReport, SearchError> {
    minimax_search_with(u, target, grid, false)
}

pub fn minimax_search_with(
    u: &Unitary4,
    target: usize,
    grid: &GridSpec,
    include_maximin: bool,
) -> Result<MinimaxReport, SearchError> {
    grid.validate()?;
    let kernel = target_kernel(u, target)?;
    let inner_max =
        |b: &QubitState| max_deviation_amplitude(&response_coeffs(u, Player::One, target, b)).value;

    let mut best: Option<(f64, GridPoint)> = None;
    for p in grid.points() {
        let v = inner_max(&p.state());
        if best.is_none_or(|(bv, _)| v < bv) {
            best = Some((v, p));
        }
    }
    let (v0, p0) = best.expect("grid has at least one point");
    let eval = |x: &[f64; 2]| inner_max(&from_angles_raw(x[0], x[1]));
    let (x, value, _) = pattern_search(
        [p0.alpha, p0.phi],
        v0,
        [grid.alpha_step(), grid.phi_step()],
        grid.refine_depth,
        eval,
        |a, b| a < b,
    );
    let minimizing_strategy = from_angles_raw(x[0], x[1]);
    let response = max_deviation_amplitude(&response_coeffs(
        u,
        Player::One,
        target,
        &minimizing_strategy,
    ));
    let closed_form_value = singular_values_2x2(&kernel).1;
    let scale = 0.5f64.powi(grid.refine_depth as i32);
    Ok(MinimaxReport {
        target,
        objective: MINIMAX_OBJECTIVE.to_string(),
        value,
        minimizing_strategy,
        minimizing_angles: normalize_angles(x[0], x[1]),
        maximizing_response: response.strategy,
        closed_form_value,
        gap: value - closed_form_value,
        maximin_value: include_maximin.then(|| maximin_value(u, target, grid)),
        resolution: Resolution {
            grid: *grid,
            alpha_step: grid.alpha_step(),
            phi_step: grid.phi_step(),
            final_alpha_step: grid.alpha_step() * scale,
            final_phi_step: grid.phi_step() * scale,
        },
    })
}

/// `max over A (grid) of min over B of |N_target|`. The inner minimum is
/// attained at Player II's kernel direction of the linear form, so this is
/// zero up to rounding for every unitary.
fn maximin_value(u: &Unitary4, target: usize, grid: &GridSpec) -> f64 {
    grid.points()
        .iter()
        .map(|p| {
            let pair = response_coeffs(u, Player::Two, target, &p.state());
            let norm = pair.c1.norm().hypot(pair.c2.norm());
            if norm == 0.0 {
                return 0.0;
            }
            let kernel = QubitState::from_unit(pair.c2 / norm, -pair.c1 / norm);
            pair.eval(&kernel).norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::random_unitary;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_validation() {
        assert_eq!(GridSpec::new(1, 8, 0, 1), Err(SearchError::AlphaPoints(1)));
        assert_eq!(GridSpec::new(2, 0, 0, 1), Err(SearchError::PhiPoints(0)));
        assert_eq!(GridSpec::new(2, 1, 0, 0), Err(SearchError::TopK));
    }

    #[test]
    fn grid_points_cover_both_alpha_ends_and_skip_pole_phases() {
        let g = GridSpec::new(5, 4, 0, 1).unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 1 + 3 * 4 + 1);
        assert_eq!(pts[0].alpha, 0.0);
        assert_eq!(pts.last().unwrap().alpha, PI);
        assert!(pts.iter().all(|p| p.phi < TAU));
    }

    #[test]
    fn singular_values_examples() {
        let cnot4 = target_kernel(&Unitary4::cnot(), 4).unwrap();
        assert_eq!(
            cnot4,
            [[c(0.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
        );
        assert_eq!(singular_values_2x2(&cnot4), (1.0, 0.0));
        let id1 = target_kernel(&Unitary4::identity(), 1).unwrap();
        assert_eq!(singular_values_2x2(&id1).1, 0.0);
        // diag(3, 2i) -> singular values 3, 2
        let (a, b) = singular_values_2x2(&[[c(3.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 2.0)]]);
        assert!((a - 3.0).abs() < 1e-14 && (b - 2.0).abs() < 1e-14);
        assert!(target_kernel(&Unitary4::identity(), 5).is_err());
    }

    #[test]
    fn identity_search_finds_one_one() {
        let spec = QuantumGameSpec::prisoners_dilemma(Unitary4::identity());
        let r = search_nash(&spec, &GridSpec::new(17, 8, 0, 3).unwrap()).unwrap();
        let best = r.best().unwrap();
        assert!(r.equilibrium_found);
        assert_eq!(best.worst_margin, 0.0);
        assert!(best.play.a.bloch_distance(&QubitState::one()) < 1e-12);
        assert!(best.play.b.bloch_distance(&QubitState::one()) < 1e-12);
    }

    #[test]
    fn refinement_never_lowers_the_top_margin() {
        let spec = QuantumGameSpec::prisoners_dilemma(random_unitary(4));
        let mut last = f64::NEG_INFINITY;
        for depth in 0..4 {
            let r = search_nash(&spec, &GridSpec::new(7, 4, depth, 2).unwrap()).unwrap();
            let m = r.best().unwrap().worst_margin;
            assert!(m >= last, "depth {depth}: {m} < {last}");
            last = m;
        }
    }

    #[test]
    fn search_reports_missing_equilibrium() {
        let spec = QuantumGameSpec::prisoners_dilemma(random_unitary(4));
        let r = search_nash_with(&spec, &GridSpec::new(3, 2, 0, 1).unwrap(), 0.0).unwrap();
        if !r.equilibrium_found {
            assert_eq!(r.note.as_deref(), Some(NO_EQUILIBRIUM_NOTE));
        }
    }

    #[test]
    fn minimax_structured_gates() {
        let g = GridSpec::new(16, 16, 2, 1).unwrap();
        let r = minimax_search(&Unitary4::cnot(), 4, &g).unwrap();
        assert_eq!(r.closed_form_value, 0.0);
        assert!(r.value.abs() < 1e-12);
        let r = minimax_search(&Unitary4::identity(), 1, &g).unwrap();
        assert_eq!(r.closed_form_value, 0.0);
        assert!(minimax_search(&Unitary4::identity(), 0, &g).is_err());
    }

    #[test]
    fn minimax_random_matches_closed_form() {
        let r =
            minimax_search(&random_unitary(7), 2, &GridSpec::new(64, 64, 0, 1).unwrap()).unwrap();
        assert!(r.value >= r.closed_form_value - 1e-12);
        assert!(r.gap <= 0.02, "gap {}", r.gap);
    }

    #[test]
    fn maximin_is_vacuous() {
        let r = minimax_search_with(
            &random_unitary(3),
            3,
            &GridSpec::new(9, 8, 0, 1).unwrap(),
            true,
        )
        .unwrap();
        assert!(r.maximin_value.unwrap() < 1e-12);
        let r = minimax_search(&random_unitary(3), 3, &GridSpec::new(9, 8, 0, 1).unwrap()).unwrap();
        assert!(r.maximin_value.is_none());
    }

    #[test]
    fn grid_max_never_exceeds_analytic() {
        let pair = CoeffPair {
            c1: c(0.3, -0.2),
            c2: c(0.1, 0.5),
        };
        let g = grid_max_amplitude(&pair, 64, 64).unwrap();
        let a = max_deviation_amplitude(&pair).value;
        assert!(g <= a + 1e-15 && a - g < 0.02);
    }
}
