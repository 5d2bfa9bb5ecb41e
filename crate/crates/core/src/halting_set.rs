//! An open subset `B` of the integers that is decidable but not effectively
//! open, built from a registry of Turing machines. Its complement is `A`.
//!
//! For index `n`, let `t_n` be the product of the first `n` primes,
//! `m = theta(t_{n+1})` and `r_n = 1/t_{n+1}`, so the closed ball of radius
//! `r_n` around `t_n` is `t_n + mZ`. The piece `X_n` starts as `{t_n}`.
//! After every completed step `k` of machine `M_n` (including the step on
//! which it halts) the open balls `B(t_n ± km, ½·d(t_n, t_n ± km))` are
//! added. If `M_n` halts after `K` steps, let `r` be the smallest of those
//! radii (`r_n` when `K = 0`), `y` the least natural number other than
//! `t_n` with `d(t_n, y) < r`, and `r' = d(t_n, y)`; the ball `B(t_n, r')`
//! is added and `X_n` is final. If `M_n` never halts, `X_n` is the whole
//! closed ball. `B` is the union of `X_n` over the registry.
//!
//! Membership only ever simulates a machine for finitely many steps.
//! Producing a modulus `N` with `t_n + NZ ⊆ B` needs to know whether `M_n`
//! halts, which is why [`HaltingSet::openness_witness`] can come back
//! empty-handed.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::machines::{Configuration, DeclaredStatus, MachineSpec, Registry, Run, RunStatus};
use crate::par;
use crate::primes::first_primes;
use crate::profinite::{dist, norm, open_ball, theta, Coverage, ProfiniteError, ProfiniteNorm, Progression, Radius};

/// Residue classes a covering check may examine before giving up.
pub const COVER_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("index {n} outside the registry (1..={len})")]
    IndexOutOfRange { n: usize, len: usize },
    #[error("{0} is not a member of B")]
    NotInB(BigInt),
    #[error("step count {0} does not fit in 64 bits")]
    StepOverflow(BigInt),
    #[error("t_{0} is too large to build the neighbourhood")]
    IndexTooLarge(usize),
    #[error(transparent)]
    Profinite(#[from] ProfiniteError),
}

/// Product of the first `n` primes.
pub fn t_seq(n: usize) -> Result<BigUint, SetError> {
    if n < 1 {
        return Err(SetError::IndexOutOfRange { n, len: usize::MAX });
    }
    Ok(first_primes(n).into_iter().map(BigUint::from).product())
}

/// The largest `n` such that the first `n` primes all divide `x`, i.e. the
/// only index whose piece `X_n` could contain `x`. `None` for zero and for
/// odd numbers.
pub fn candidate_index(x: &BigInt) -> Option<usize> {
    if x.is_zero() {
        return None;
    }
    let magnitude = x.magnitude();
    let mut n = 0;
    let mut primes: Vec<u64> = Vec::new();
    let mut candidate = 2u64;
    loop {
        if primes
            .iter()
            .take_while(|&&p| p * p <= candidate)
            .all(|&p| !candidate.is_multiple_of(p))
        {
            if !(magnitude % candidate).is_zero() {
                break;
            }
            primes.push(candidate);
            n += 1;
        }
        candidate += 1;
    }
    (n > 0).then_some(n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XnParams {
    pub n: usize,
    pub t_n: BigInt,
    pub t_next: BigUint,
    /// `theta(t_{n+1})`.
    pub m: BigUint,
    /// `1/t_{n+1}`.
    pub r_n: Radius,
}

impl XnParams {
    fn build(n: usize) -> Result<Self, SetError> {
        let t_n = t_seq(n)?;
        let t_next = t_seq(n + 1)?;
        let arg = t_next.to_u64().ok_or(SetError::IndexTooLarge(n))?;
        let m = theta(arg)?;
        Ok(XnParams {
            n,
            t_n: BigInt::from_biguint(Sign::Plus, t_n),
            r_n: Radius::reciprocal_big(&t_next),
            t_next,
            m,
        })
    }

    /// `t_n + mZ`; every `X_n` lies inside it.
    pub fn closed_ball(&self) -> Progression {
        Progression::with_modulus(&self.t_n, &self.m)
    }

    fn m_signed(&self) -> BigInt {
        BigInt::from_biguint(Sign::Plus, self.m.clone())
    }

    /// `t_n + k·m`.
    pub fn point(&self, k: &BigInt) -> BigInt {
        &self.t_n + k * self.m_signed()
    }

    fn step_norm(&self, k: u64) -> ProfiniteNorm {
        norm(&(BigInt::from(k) * self.m_signed()))
    }

    /// The two balls added after step `k >= 1`.
    pub fn step_balls(&self, k: u64) -> [StepBall; 2] {
        let radius = self.step_norm(k).half().expect("k·m is non-zero");
        let mk = |sign: i64| {
            let center = self.point(&BigInt::from(sign * k as i64));
            let ball = open_ball(&center, &radius).expect("radius threshold fits");
            StepBall {
                k,
                center,
                radius: radius.clone(),
                ball,
            }
        };
        [mk(1), mk(-1)]
    }
}

/// One of the balls `B(t_n ± km, ½·d(t_n, t_n ± km))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepBall {
    pub k: u64,
    pub center: BigInt,
    pub radius: Radius,
    pub ball: Progression,
}

/// The final shape of `X_n` once `M_n` is known to halt after `halting_step`
/// steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactXn {
    pub n: usize,
    pub halting_step: u64,
    pub step_balls: Vec<StepBall>,
    /// Smallest step-ball radius (`r_n` when no step was taken).
    pub r: Radius,
    pub y: BigInt,
    pub r_prime: Radius,
    /// `B(t_n, r')`.
    pub final_ball: Progression,
}

impl ExactXn {
    fn build(p: &XnParams, halting_step: u64) -> Self {
        let step_balls: Vec<StepBall> = (1..=halting_step).flat_map(|k| p.step_balls(k)).collect();
        let r = step_balls
            .iter()
            .map(|b| b.radius.clone())
            .min()
            .unwrap_or_else(|| p.r_n.clone());
        let near = open_ball(&p.t_n, &r).expect("radius threshold fits");
        let y = if near.residue() != &p.t_n {
            near.residue().clone()
        } else {
            near.residue() + near.modulus()
        };
        let r_prime = match dist(&p.t_n, &y) {
            ProfiniteNorm::Reciprocal(q) => Radius::reciprocal(q),
            ProfiniteNorm::Zero => unreachable!("y differs from t_n"),
        };
        let final_ball = open_ball(&p.t_n, &r_prime).expect("radius threshold fits");
        ExactXn {
            n: p.n,
            halting_step,
            step_balls,
            r,
            y,
            r_prime,
            final_ball,
        }
    }

    pub fn balls(&self) -> Vec<Progression> {
        std::iter::once(self.final_ball.clone())
            .chain(self.step_balls.iter().map(|b| b.ball.clone()))
            .collect()
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.final_ball.contains(x) || self.step_balls.iter().any(|b| b.ball.contains(x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XnDescription {
    /// `M_n` ran `steps` steps without halting; `X_n` contains `t_n` and at
    /// least these balls.
    NonHaltingSoFar { steps: u64, balls: Vec<StepBall> },
    Exact(ExactXn),
}

impl XnDescription {
    pub fn balls(&self) -> Vec<Progression> {
        match self {
            XnDescription::NonHaltingSoFar { balls, .. } => balls.iter().map(|b| b.ball.clone()).collect(),
            XnDescription::Exact(e) => e.balls(),
        }
    }
}

/// What can be said about `X_n` with a given simulation budget and the
/// machine's declared status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XnKnowledge {
    /// Halted within budget: `X_n` is known exactly.
    Exact(ExactXn),
    /// Declared non-halting: `X_n` is taken to be the whole closed ball.
    DeclaredLoops { closed_ball: Progression },
    /// Neither: only a subset of `X_n` is known (the centre point aside).
    Partial { steps: u64, balls: Vec<StepBall> },
}

impl XnKnowledge {
    /// Progressions known to lie inside `X_n`.
    pub fn covers(&self) -> Vec<Progression> {
        match self {
            XnKnowledge::Exact(e) => e.balls(),
            XnKnowledge::DeclaredLoops { closed_ball } => vec![closed_ball.clone()],
            XnKnowledge::Partial { balls, .. } => balls.iter().map(|b| b.ball.clone()).collect(),
        }
    }

    /// True when [`covers`](Self::covers) is all of `X_n`.
    pub fn is_complete(&self) -> bool {
        !matches!(self, XnKnowledge::Partial { .. })
    }
}

/// Why `x` is or is not in `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// No registry index `n` has `p_1 ... p_n | x` and `p_{n+1} ∤ x`.
    NoCandidateIndex,
    OutsideClosedBall(usize),
    /// `x` lies in a ball added after step `k`.
    AddedAtStep { n: usize, k: u64, ball: Progression },
    CenterPoint(usize),
    InsideFinalBall { n: usize, ball: Progression },
    /// `M_n` halted and `x` is in none of the balls of `X_n`.
    ExcludedByExactXn(usize),
}

impl Certificate {
    pub fn is_containment(&self) -> bool {
        matches!(
            self,
            Certificate::AddedAtStep { .. } | Certificate::CenterPoint(_) | Certificate::InsideFinalBall { .. }
        )
    }

    /// `key=value` lines for the CLI.
    pub fn kv_lines(&self) -> Vec<(String, String)> {
        let kv = |k: &str, v: String| (k.to_string(), v);
        match self {
            Certificate::NoCandidateIndex => vec![kv("certificate", "no-candidate-index".into())],
            Certificate::OutsideClosedBall(n) => vec![kv("certificate", "outside-closed-ball".into()), kv("n", n.to_string())],
            Certificate::AddedAtStep { n, k, ball } => vec![
                kv("certificate", "added-at-step".into()),
                kv("n", n.to_string()),
                kv("k", k.to_string()),
                kv("ball.residue", ball.residue().to_string()),
                kv("ball.modulus", ball.modulus().to_string()),
            ],
            Certificate::CenterPoint(n) => vec![kv("certificate", "center-point".into()), kv("n", n.to_string())],
            Certificate::InsideFinalBall { n, ball } => vec![
                kv("certificate", "inside-final-ball".into()),
                kv("n", n.to_string()),
                kv("ball.residue", ball.residue().to_string()),
                kv("ball.modulus", ball.modulus().to_string()),
            ],
            Certificate::ExcludedByExactXn(n) => vec![kv("certificate", "excluded-by-exact-xn".into()), kv("n", n.to_string())],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipAnswer {
    pub verdict: bool,
    pub certificate: Certificate,
}

impl From<Certificate> for MembershipAnswer {
    fn from(certificate: Certificate) -> Self {
        MembershipAnswer {
            verdict: certificate.is_containment(),
            certificate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessResult {
    /// `x + modulus·Z ⊆ B`; `verified` records the covering check.
    Witness { modulus: BigUint, verified: bool },
    UnknownWithinBudget(u64),
}

impl fmt::Display for WitnessResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessResult::Witness { modulus, verified } => write!(f, "witness {modulus} verified={verified}"),
            WitnessResult::UnknownWithinBudget(b) => write!(f, "unknown within {b} steps"),
        }
    }
}

/// Step bounds read off a ball `B(t_n, r) ⊆ B`: `M_n` either never halts or
/// halts after fewer than `steps` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaltingBound {
    /// Smallest `k >= 1` with `t_n + km ∈ B(t_n, r)`.
    pub steps: BigUint,
    /// `theta(ceil(1/r) + 1)`, a cruder bound of the same kind.
    pub coarse: BigUint,
}

/// The set `B` determined by a registry.
#[derive(Debug)]
pub struct HaltingSet {
    registry: Registry,
    params: Vec<OnceLock<XnParams>>,
    exact: Vec<OnceLock<ExactXn>>,
    progress: Vec<Progress>,
}

/// Furthest simulation of one machine so far, so repeated queries only pay
/// for the steps nobody has simulated yet.
#[derive(Debug, Default)]
struct Progress {
    saved: Mutex<Option<(Configuration, u64)>>,
    /// One past the largest step count known to leave the machine running;
    /// read without the lock.
    explored: AtomicU64,
    halted_at: OnceLock<u64>,
}

impl HaltingSet {
    pub fn new(registry: Registry) -> Self {
        let len = registry.len();
        HaltingSet {
            registry,
            params: (0..len).map(|_| OnceLock::new()).collect(),
            exact: (0..len).map(|_| OnceLock::new()).collect(),
            progress: (0..len).map(|_| Progress::default()).collect(),
        }
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    fn check_index(&self, n: usize) -> Result<&MachineSpec, SetError> {
        self.registry.get(n).ok_or(SetError::IndexOutOfRange {
            n,
            len: self.registry.len(),
        })
    }

    pub fn xn_params(&self, n: usize) -> Result<&XnParams, SetError> {
        self.check_index(n)?;
        let cell = &self.params[n - 1];
        if let Some(p) = cell.get() {
            return Ok(p);
        }
        let built = XnParams::build(n)?;
        Ok(cell.get_or_init(|| built))
    }

    /// Status of `M_n` after `budget` steps, resuming the furthest earlier
    /// simulation.
    fn run(&self, n: usize, budget: u64) -> Result<RunStatus, SetError> {
        let machine = self.check_index(n)?;
        let progress = &self.progress[n - 1];
        if let Some(&h) = progress.halted_at.get() {
            return Ok(if h <= budget {
                RunStatus::Halted(h)
            } else {
                RunStatus::RunningAfter(budget)
            });
        }
        if budget < progress.explored.load(Ordering::Acquire) {
            return Ok(RunStatus::RunningAfter(budget));
        }
        let mut saved = progress.saved.lock().unwrap_or_else(|e| e.into_inner());
        let mut run = match saved.take() {
            Some((config, steps)) => Run::resume(machine, config, steps),
            None => Run::new(machine),
        };
        let status = run.advance_to(budget);
        match status {
            RunStatus::Halted(h) => {
                let _ = progress.halted_at.set(h);
            }
            RunStatus::RunningAfter(_) => {
                progress.explored.fetch_max(run.steps() + 1, Ordering::Release);
            }
        }
        *saved = Some(run.into_parts());
        Ok(status)
    }

    fn exact(&self, n: usize, halting_step: u64) -> Result<&ExactXn, SetError> {
        let p = self.xn_params(n)?;
        Ok(self.exact[n - 1].get_or_init(|| ExactXn::build(p, halting_step)))
    }

    pub fn member_b(&self, x: &BigInt) -> Result<MembershipAnswer, SetError> {
        let n = match candidate_index(x) {
            Some(n) if n <= self.registry.len() => n,
            _ => return Ok(Certificate::NoCandidateIndex.into()),
        };
        let p = self.xn_params(n)?;
        if !p.closed_ball().contains(x) {
            return Ok(Certificate::OutsideClosedBall(n).into());
        }
        let k = (x - &p.t_n) / p.m_signed();
        if k.is_zero() {
            return Ok(Certificate::CenterPoint(n).into());
        }
        let steps = k.magnitude().to_u64().ok_or_else(|| SetError::StepOverflow(k.clone()))?;
        let halted_at = match self.run(n, steps)? {
            RunStatus::RunningAfter(_) => None,
            RunStatus::Halted(h) if h == steps => None,
            RunStatus::Halted(h) => Some(h),
        };
        let Some(h) = halted_at else {
            let radius = p.step_norm(steps).half().expect("non-zero");
            return Ok(Certificate::AddedAtStep {
                n,
                k: steps,
                ball: open_ball(x, &radius)?,
            }
            .into());
        };
        let exact = self.exact(n, h)?;
        if let Some(b) = exact.step_balls.iter().find(|b| b.ball.contains(x)) {
            return Ok(Certificate::AddedAtStep {
                n,
                k: b.k,
                ball: b.ball.clone(),
            }
            .into());
        }
        if exact.final_ball.contains(x) {
            return Ok(Certificate::InsideFinalBall {
                n,
                ball: exact.final_ball.clone(),
            }
            .into());
        }
        Ok(Certificate::ExcludedByExactXn(n).into())
    }

    pub fn member_a(&self, x: &BigInt) -> Result<bool, SetError> {
        Ok(!self.member_b(x)?.verdict)
    }

    /// Membership for a batch, in input order, on the parallel backend when
    /// it is enabled.
    pub fn member_b_batch(&self, xs: &[BigInt]) -> Vec<Result<MembershipAnswer, SetError>> {
        par::map(xs, |x| self.member_b(x))
    }

    /// Sequential reference for [`member_b_batch`](Self::member_b_batch).
    pub fn member_b_batch_seq(&self, xs: &[BigInt]) -> Vec<Result<MembershipAnswer, SetError>> {
        xs.iter().map(|x| self.member_b(x)).collect()
    }

    pub fn describe_xn(&self, n: usize, budget: u64) -> Result<XnDescription, SetError> {
        let p = self.xn_params(n)?;
        match self.run(n, budget)? {
            RunStatus::Halted(h) => Ok(XnDescription::Exact(self.exact(n, h)?.clone())),
            RunStatus::RunningAfter(steps) => Ok(XnDescription::NonHaltingSoFar {
                steps,
                balls: (1..=steps).flat_map(|k| p.step_balls(k)).collect(),
            }),
        }
    }

    /// Best available description of `X_n`, trusting a `loops` declaration
    /// only when the machine has not been seen to halt.
    pub fn knowledge(&self, n: usize, budget: u64) -> Result<XnKnowledge, SetError> {
        let declared = self.check_index(n)?.declared_status();
        match self.describe_xn(n, budget)? {
            XnDescription::Exact(e) => Ok(XnKnowledge::Exact(e)),
            XnDescription::NonHaltingSoFar { .. } if declared == DeclaredStatus::Loops => Ok(XnKnowledge::DeclaredLoops {
                closed_ball: self.xn_params(n)?.closed_ball(),
            }),
            XnDescription::NonHaltingSoFar { steps, balls } => Ok(XnKnowledge::Partial { steps, balls }),
        }
    }

    /// A modulus `N` with `x + NZ ⊆ B`, for `x ∈ B`.
    ///
    /// Points added after some step come with their ball. For the centre
    /// `t_n` the answer depends on whether `M_n` halts, so it is only
    /// produced when the machine halts within `budget` steps or is declared
    /// to loop.
    pub fn openness_witness(&self, x: &BigInt, budget: u64) -> Result<WitnessResult, SetError> {
        let answer = self.member_b(x)?;
        let (modulus, knowledge) = match answer.certificate {
            Certificate::AddedAtStep { n, k, ball } => (ball.modulus_unsigned(), self.knowledge(n, budget.max(k))?),
            Certificate::InsideFinalBall { n, ball } => (ball.modulus_unsigned(), self.knowledge(n, budget)?),
            Certificate::CenterPoint(n) => {
                let knowledge = self.knowledge(n, budget)?;
                let modulus = match &knowledge {
                    XnKnowledge::Exact(e) => e.final_ball.modulus_unsigned(),
                    XnKnowledge::DeclaredLoops { closed_ball } => closed_ball.modulus_unsigned(),
                    XnKnowledge::Partial { .. } => return Ok(WitnessResult::UnknownWithinBudget(budget)),
                };
                (modulus, knowledge)
            }
            _ => return Err(SetError::NotInB(x.clone())),
        };
        let candidate = Progression::with_modulus(x, &modulus);
        let verified = candidate.covered_by(&knowledge.covers(), COVER_BUDGET) == Coverage::Covered;
        Ok(WitnessResult::Witness { modulus, verified })
    }

    pub fn halting_bound_from_certificate(&self, n: usize, r: &Radius) -> Result<HaltingBound, SetError> {
        let p = self.xn_params(n)?;
        let ball_modulus = open_ball(&BigInt::zero(), r)?.modulus_unsigned();
        let steps = ball_modulus.lcm(&p.m) / &p.m;
        let coarse_arg = (r.ceil_reciprocal() + 1u32)
            .to_u64()
            .ok_or_else(|| ProfiniteError::RadiusTooSmall(r.to_string()))?;
        Ok(HaltingBound {
            steps,
            coarse: theta(coarse_arg)?,
        })
    }

    /// Re-derives a membership certificate with progression arithmetic only.
    pub fn recheck(&self, x: &BigInt, answer: &MembershipAnswer) -> bool {
        if answer.verdict != answer.certificate.is_containment() {
            return false;
        }
        let in_range = |n: usize| n >= 1 && n <= self.registry.len();
        let closed = |n: usize| self.xn_params(n).map(|p| p.closed_ball());
        match &answer.certificate {
            Certificate::NoCandidateIndex => !matches!(candidate_index(x), Some(n) if in_range(n)),
            Certificate::OutsideClosedBall(n) => {
                candidate_index(x) == Some(*n) && closed(*n).is_ok_and(|c| !c.contains(x))
            }
            Certificate::CenterPoint(n) => self.xn_params(*n).is_ok_and(|p| &p.t_n == x),
            Certificate::AddedAtStep { n, k, ball } => {
                let Ok(p) = self.xn_params(*n) else { return false };
                let expected = p.step_balls(*k);
                ball.contains(x)
                    && expected.iter().any(|b| &b.ball == ball)
                    && ball.is_subset_of(&p.closed_ball())
                    && !ball.contains(&p.t_n)
                    && self.registry.get(*n).is_some_and(|m| match m.run_bounded(k - 1) {
                        RunStatus::RunningAfter(_) => true,
                        RunStatus::Halted(_) => false,
                    })
            }
            Certificate::InsideFinalBall { n, ball } => {
                ball.contains(x) && closed(*n).is_ok_and(|c| ball.is_subset_of(&c))
            }
            Certificate::ExcludedByExactXn(n) => {
                let Ok(p) = self.xn_params(*n) else { return false };
                if !p.closed_ball().contains(x) || &p.t_n == x {
                    return false;
                }
                let k = (x - &p.t_n) / p.m_signed();
                let (Some(steps), Some(m)) = (k.magnitude().to_u64(), self.registry.get(*n)) else {
                    return false;
                };
                match m.run_bounded(steps) {
                    RunStatus::Halted(h) if h < steps => !ExactXn::build(p, h).contains(x),
                    _ => false,
                }
            }
        }
    }
}

/// `N` is a valid halting bound for `M_n` when the machine does not halt
/// within `N - 1` steps only if it never halts at all. This simulates up to
/// `min(N, cap)` steps and reports whether what it saw is consistent.
pub fn bound_is_consistent(machine: &MachineSpec, bound: &BigUint, cap: u64) -> bool {
    let limit = bound.to_u64().unwrap_or(u64::MAX).min(cap);
    match machine.run_bounded(limit) {
        RunStatus::Halted(h) => BigUint::from(h) < *bound,
        RunStatus::RunningAfter(_) => true,
    }
}
