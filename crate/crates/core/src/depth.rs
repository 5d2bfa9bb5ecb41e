//! Depth experiments on `L(A)`: which moduli `N` separate `u_x û_x⁻¹` from
//! the identity once `a^N` and `â^N` are killed.
//!
//! In the quotient by `a^N, â^N`, conjugating by `a^{kN}` shows
//! `u_x = u_{x+kN}`, so `u_x û_x⁻¹` dies as soon as some `x + kN` lies in
//! `A`. Conversely a verified `x + NZ ⊆ B` keeps it alive at modulus level.
//! The tables here search a schedule of moduli for the first one that can be
//! verified against what is known about the pieces `X_n`.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;
use thiserror::Error;

use crate::halting_set::{HaltingSet, SetError, XnKnowledge, COVER_BUDGET};
use crate::par;
use crate::profinite::{theta, Coverage, Progression};

/// Points `x ± jN`, `1 <= j <= REFUTE_SAMPLES`, tried by the decision
/// procedure before any covering check.
const REFUTE_SAMPLES: i64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DepthError {
    #[error("modulus schedule is empty")]
    EmptySchedule,
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error(transparent)]
    Set(#[from] SetError),
}

/// `θ(1), θ(2), ..., θ(20)`.
pub fn default_schedule() -> Vec<BigUint> {
    (1..=20).map(|s| theta(s).expect("s >= 1")).collect()
}

/// Word length of `u_x û_x⁻¹`, i.e. `4|x| + 2`.
pub fn word_length(x: &BigInt) -> BigUint {
    x.magnitude() * 4u32 + 2u32
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientVerdict {
    pub x: BigInt,
    pub modulus: BigUint,
    pub identity_in_quotient: bool,
    /// Some `k` with `x + kN ∈ A`, when the element collapses.
    pub witness_k: Option<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuotientOutcome {
    Decided(QuotientVerdict),
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DepthOutcome {
    /// `x + NZ ⊆ B`, checked by covering.
    Witness(BigUint),
    Unknown,
    /// `x ∈ A`, so `u_x û_x⁻¹` is already trivial.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthRow {
    pub x: BigInt,
    pub word_length: BigUint,
    pub outcome: DepthOutcome,
    pub certificate: String,
}

impl DepthRow {
    pub fn witness_modulus(&self) -> Option<&BigUint> {
        match &self.outcome {
            DepthOutcome::Witness(n) => Some(n),
            _ => None,
        }
    }
}

/// Verdict of a single covering test of `x + NZ ⊆ B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModulusCheck {
    Verified,
    /// `x + kN ∈ A`.
    Refuted { k: BigInt },
    Undecided,
}

/// A halting set together with cached knowledge of every piece at a fixed
/// simulation budget.
pub struct DepthHarness<'a> {
    set: &'a HaltingSet,
    budget: u64,
    knowledge: Vec<OnceLock<Result<XnKnowledge, SetError>>>,
}

impl<'a> DepthHarness<'a> {
    pub fn new(set: &'a HaltingSet, budget: u64) -> Self {
        DepthHarness {
            set,
            budget,
            knowledge: (0..set.registry().len()).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn set(&self) -> &HaltingSet {
        self.set
    }

    fn knowledge(&self, n: usize) -> Result<&XnKnowledge, SetError> {
        self.knowledge[n - 1]
            .get_or_init(|| self.set.knowledge(n, self.budget))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Covers of every piece whose closed ball meets `p`, and whether all of
    /// those pieces are known exactly.
    fn covers_near(&self, p: &Progression) -> Result<(Vec<Progression>, bool), SetError> {
        let mut covers = Vec::new();
        let mut complete = true;
        for n in 1..=self.set.registry().len() {
            if !self.set.xn_params(n)?.closed_ball().intersects(p) {
                continue;
            }
            let k = self.knowledge(n)?;
            complete &= k.is_complete();
            covers.extend(k.covers());
        }
        Ok((covers, complete))
    }

    /// Decides `x + NZ ⊆ B` as far as the available knowledge allows.
    pub fn check_modulus(&self, x: &BigInt, modulus: &BigUint) -> Result<ModulusCheck, DepthError> {
        if modulus.is_zero() {
            return Err(DepthError::ZeroModulus);
        }
        let n_signed = BigInt::from_biguint(Sign::Plus, modulus.clone());
        for j in std::iter::once(0).chain((1..=REFUTE_SAMPLES).flat_map(|j| [j, -j])) {
            let k = BigInt::from(j);
            if self.set.member_a(&(x + &k * &n_signed))? {
                return Ok(ModulusCheck::Refuted { k });
            }
        }
        let p = Progression::with_modulus(x, modulus);
        let (covers, complete) = self.covers_near(&p)?;
        Ok(match p.covered_by(&covers, COVER_BUDGET) {
            Coverage::Covered => ModulusCheck::Verified,
            Coverage::Uncovered { witness } if complete => ModulusCheck::Refuted {
                k: (witness - x) / n_signed,
            },
            _ => ModulusCheck::Undecided,
        })
    }

    /// Whether `u_x û_x⁻¹` is trivial in `⟨L(A) | a^N, â^N⟩`, detected at
    /// modulus level.
    pub fn quotient_kill_shifts(&self, x: &BigInt, modulus: &BigUint) -> Result<QuotientOutcome, DepthError> {
        let decided = |identity: bool, witness_k: Option<BigInt>| {
            QuotientOutcome::Decided(QuotientVerdict {
                x: x.clone(),
                modulus: modulus.clone(),
                identity_in_quotient: identity,
                witness_k,
            })
        };
        match self.check_modulus(x, modulus)? {
            ModulusCheck::Verified => return Ok(decided(false, None)),
            ModulusCheck::Refuted { k } => return Ok(decided(true, Some(k))),
            ModulusCheck::Undecided => {}
        }
        let n_signed = BigInt::from_biguint(Sign::Plus, modulus.clone());
        let reach = i64::try_from(self.budget).unwrap_or(i64::MAX);
        for j in (REFUTE_SAMPLES + 1)..=reach {
            for k in [BigInt::from(j), BigInt::from(-j)] {
                if self.set.member_a(&(x + &k * &n_signed))? {
                    return Ok(decided(true, Some(k)));
                }
            }
        }
        Ok(QuotientOutcome::BudgetExhausted)
    }

    fn row(&self, x: &BigInt, schedule: &[BigUint]) -> Result<DepthRow, DepthError> {
        let word_length = word_length(x);
        if self.set.member_a(x)? {
            return Ok(DepthRow {
                x: x.clone(),
                word_length,
                outcome: DepthOutcome::Skipped,
                certificate: "x in A; u_x equals its hatted copy".into(),
            });
        }
        let mut undecided = Vec::new();
        for n in schedule {
            match self.check_modulus(x, n)? {
                ModulusCheck::Verified => {
                    let mut certificate = format!("x + {n}Z covered by known balls");
                    if !undecided.is_empty() {
                        certificate.push_str(&format!("; undecided smaller moduli: {}", join(&undecided)));
                    }
                    return Ok(DepthRow {
                        x: x.clone(),
                        word_length,
                        outcome: DepthOutcome::Witness(n.clone()),
                        certificate,
                    });
                }
                ModulusCheck::Refuted { .. } => {}
                ModulusCheck::Undecided => undecided.push(n.clone()),
            }
        }
        let certificate = if undecided.is_empty() {
            "every scheduled modulus refuted".to_string()
        } else {
            format!("undecided within budget {}: {}", self.budget, join(&undecided))
        };
        Ok(DepthRow {
            x: x.clone(),
            word_length,
            outcome: DepthOutcome::Unknown,
            certificate,
        })
    }

    /// One row per `x`, in input order. Rows are computed in parallel when
    /// the backend allows it.
    pub fn depth_table(&self, xs: &[BigInt], schedule: &[BigUint]) -> Result<Vec<DepthRow>, DepthError> {
        let schedule = sorted_schedule(schedule)?;
        par::map(xs, |x| self.row(x, &schedule)).into_iter().collect()
    }

    /// Sequential reference for [`depth_table`](Self::depth_table).
    pub fn depth_table_seq(&self, xs: &[BigInt], schedule: &[BigUint]) -> Result<Vec<DepthRow>, DepthError> {
        let schedule = sorted_schedule(schedule)?;
        xs.iter().map(|x| self.row(x, &schedule)).collect()
    }
}

fn sorted_schedule(schedule: &[BigUint]) -> Result<Vec<BigUint>, DepthError> {
    if schedule.is_empty() {
        return Err(DepthError::EmptySchedule);
    }
    if schedule.iter().any(|n| n.is_zero()) {
        return Err(DepthError::ZeroModulus);
    }
    let mut s = schedule.to_vec();
    s.sort();
    s.dedup();
    Ok(s)
}

fn join(ns: &[BigUint]) -> String {
    ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
}

pub fn quotient_kill_shifts(set: &HaltingSet, x: &BigInt, modulus: &BigUint, budget: u64) -> Result<QuotientOutcome, DepthError> {
    DepthHarness::new(set, budget).quotient_kill_shifts(x, modulus)
}

pub fn depth_table(set: &HaltingSet, xs: &[BigInt], schedule: &[BigUint], budget: u64) -> Result<Vec<DepthRow>, DepthError> {
    DepthHarness::new(set, budget).depth_table(xs, schedule)
}
