//! NAL truth-value arithmetic and budget decay.
//!
//! A truth value summarizes evidence as `(frequency, confidence)` where
//! frequency is the positive share of the evidence and confidence is
//! `total / (total + K)` for the evidential horizon `K`. Revision pools two
//! independent bodies of evidence; deduction chains an event into an
//! implication to produce an anticipation.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

/// Default evidential horizon: one observation yields confidence 0.5.
pub const DEFAULT_HORIZON: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TruthError {
    #[error("no evidence")]
    NoEvidence,
    #[error("frequency {0} outside [0, 1]")]
    Frequency(f64),
    #[error("confidence {0} outside [0, 1)")]
    Confidence(f64),
    #[error("positive evidence {positive} exceeds total {total}")]
    Evidence { positive: f64, total: f64 },
    #[error("budget {field} = {value} out of range")]
    Budget { field: &'static str, value: f64 },
    #[error("evidential horizon must be positive")]
    Horizon,
}

#[derive(Clone, Copy, PartialEq)]
pub struct TruthValue<T> {
    frequency: T,
    confidence: T,
}

impl<T: Scalar> TruthValue<T> {
    pub fn new(frequency: T, confidence: T) -> Result<Self, TruthError> {
        if !(frequency >= T::zero() && frequency <= T::one()) {
            return Err(TruthError::Frequency(frequency.to_f64_lossy()));
        }
        if !(confidence >= T::zero() && confidence < T::one()) {
            return Err(TruthError::Confidence(confidence.to_f64_lossy()));
        }
        Ok(Self {
            frequency,
            confidence,
        })
    }

    /// The evidence-free statement `(0.5, 0.0)`.
    pub fn unknown() -> Self {
        Self {
            frequency: T::half(),
            confidence: T::zero(),
        }
    }

    pub fn frequency(&self) -> T {
        self.frequency
    }

    pub fn confidence(&self) -> T {
        self.confidence
    }

    pub fn expectation(&self) -> T {
        expectation(*self)
    }

    /// Evidence weight `c / (1 - c)` in units of the horizon.
    fn weight(&self) -> T {
        self.confidence / (T::one() - self.confidence)
    }
}

impl<T: Scalar> Default for TruthValue<T> {
    fn default() -> Self {
        Self::unknown()
    }
}

impl<T: fmt::Debug> fmt::Debug for TruthValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "%{:?};{:?}%", self.frequency, self.confidence)
    }
}

impl<T: Scalar> fmt::Display for TruthValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "f={:.2},c={:.2}",
            self.frequency.to_f64_lossy(),
            self.confidence.to_f64_lossy()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvidenceCount<T> {
    positive: T,
    total: T,
}

impl<T: Scalar> EvidenceCount<T> {
    pub fn new(positive: T, total: T) -> Result<Self, TruthError> {
        if !(positive >= T::zero() && positive <= total) {
            return Err(TruthError::Evidence {
                positive: positive.to_f64_lossy(),
                total: total.to_f64_lossy(),
            });
        }
        Ok(Self { positive, total })
    }

    pub fn positive(&self) -> T {
        self.positive
    }

    pub fn total(&self) -> T {
        self.total
    }
}

// Negated comparisons also reject NaN.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn truth_from_evidence<T: Scalar>(
    e: EvidenceCount<T>,
    horizon: T,
) -> Result<TruthValue<T>, TruthError> {
    if !(horizon > T::zero()) {
        return Err(TruthError::Horizon);
    }
    if !(e.total > T::zero()) {
        return Err(TruthError::NoEvidence);
    }
    Ok(TruthValue {
        frequency: e.positive / e.total,
        confidence: T::clamp_confidence(e.total / (e.total + horizon)),
    })
}

/// A single positive or negative observation.
pub fn unit_evidence<T: Scalar>(positive: bool, horizon: T) -> TruthValue<T> {
    let p = if positive { T::one() } else { T::zero() };
    let e = EvidenceCount {
        positive: p,
        total: T::one(),
    };
    truth_from_evidence(e, horizon).expect("horizon validated by caller")
}

/// Revision: pool the evidence behind two truths of the same statement.
///
/// The horizon cancels out of the pooled confidence, so it is not a
/// parameter here.
pub fn revise<T: Scalar>(t1: TruthValue<T>, t2: TruthValue<T>) -> TruthValue<T> {
    if t2.confidence == T::zero() {
        return t1;
    }
    if t1.confidence == T::zero() {
        return t2;
    }
    let w1 = t1.weight();
    let w2 = t2.weight();
    let w = w1 + w2;
    let f = (t1.frequency * w1 + t2.frequency * w2) / w;
    let c = w / (w + T::one());
    TruthValue {
        frequency: f.max_of(T::zero()).min_of(T::one()),
        confidence: T::clamp_confidence(c.max_of(t1.confidence).max_of(t2.confidence)),
    }
}

/// Deduction: `f = f1 f2`, `c = f1 f2 c1 c2`.
pub fn deduce<T: Scalar>(t1: TruthValue<T>, t2: TruthValue<T>) -> TruthValue<T> {
    let f = t1.frequency * t2.frequency;
    TruthValue {
        frequency: f,
        confidence: f * (t1.confidence * t2.confidence),
    }
}

pub fn expectation<T: Scalar>(t: TruthValue<T>) -> T {
    t.confidence * (t.frequency - T::half()) + T::half()
}

/// Priority, durability and quality of a task or link.
///
/// Priority relaxes geometrically toward quality at rate `durability`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget<T> {
    priority: T,
    durability: T,
    quality: T,
}

impl<T: Scalar> Budget<T> {
    pub fn new(priority: T, durability: T, quality: T) -> Result<Self, TruthError> {
        let unit = |field, v: T| {
            if v >= T::zero() && v <= T::one() {
                Ok(())
            } else {
                Err(TruthError::Budget {
                    field,
                    value: v.to_f64_lossy(),
                })
            }
        };
        unit("priority", priority)?;
        unit("quality", quality)?;
        if !(durability > T::zero() && durability < T::one()) {
            return Err(TruthError::Budget {
                field: "durability",
                value: durability.to_f64_lossy(),
            });
        }
        Ok(Self {
            priority,
            durability,
            quality,
        })
    }

    pub fn priority(&self) -> T {
        self.priority
    }

    pub fn durability(&self) -> T {
        self.durability
    }

    pub fn quality(&self) -> T {
        self.quality
    }

    pub(crate) fn set_priority(&mut self, p: T) {
        self.priority = p.max_of(T::zero()).min_of(T::one());
    }

    pub(crate) fn set_quality(&mut self, q: T) {
        self.quality = q.max_of(T::zero()).min_of(T::one());
    }
}

pub fn decay_budget<T: Scalar>(b: Budget<T>) -> Budget<T> {
    Budget {
        priority: b.quality + (b.priority - b.quality) * b.durability,
        ..b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    fn tv(f: f64, c: f64) -> TruthValue<f64> {
        TruthValue::new(f, c).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn evidence_conversion_examples() {
        let t = truth_from_evidence(EvidenceCount::new(1.0, 1.0).unwrap(), 1.0).unwrap();
        assert_eq!((t.frequency(), t.confidence()), (1.0, 0.5));
        let t = truth_from_evidence(EvidenceCount::new(0.0, 1.0).unwrap(), 1.0).unwrap();
        assert_eq!((t.frequency(), t.confidence()), (0.0, 0.5));
        let t = truth_from_evidence(EvidenceCount::new(2.0, 4.0).unwrap(), 1.0).unwrap();
        assert_eq!((t.frequency(), t.confidence()), (0.5, 0.8));
    }

    #[test]
    fn zero_evidence_is_an_error() {
        let e = EvidenceCount::new(0.0, 0.0).unwrap();
        assert_eq!(truth_from_evidence(e, 1.0), Err(TruthError::NoEvidence));
        assert!(EvidenceCount::new(3.0, 2.0).is_err());
    }

    #[test]
    fn unit_evidence_examples() {
        let pos = unit_evidence(true, 1.0);
        let neg = unit_evidence(false, 1.0);
        assert_eq!((pos.frequency(), pos.confidence()), (1.0, 0.5));
        assert_eq!((neg.frequency(), neg.confidence()), (0.0, 0.5));
        let r = revise(pos, neg);
        assert!(close(r.frequency(), 0.5, 1e-12));
        assert!(close(r.confidence(), 2.0 / 3.0, 1e-12));
    }

    #[test]
    fn revision_examples() {
        let r = revise(tv(1.0, 0.5), tv(1.0, 0.5));
        assert_eq!(r.frequency(), 1.0);
        assert!(close(r.confidence(), 0.6667, 1e-4));
        assert!(close(r.confidence(), 2.0 / 3.0, 1e-9));
        let r = revise(tv(1.0, 0.5), tv(0.0, 0.5));
        assert!(close(r.frequency(), 0.5, 1e-9));
        assert!(close(r.confidence(), 2.0 / 3.0, 1e-9));
        let a = tv(0.3, 0.7);
        assert_eq!(revise(a, tv(0.9, 0.0)), a);
        assert_eq!(revise(TruthValue::unknown(), a), a);
    }

    #[test]
    fn revision_in_rationals_is_counting() {
        let pos = unit_evidence(true, Q::from_integer(1));
        let neg = unit_evidence(false, Q::from_integer(1));
        let r = revise(revise(pos, neg), pos);
        let counted = truth_from_evidence(
            EvidenceCount::new(Q::from(2), Q::from(3)).unwrap(),
            Q::from(1),
        )
        .unwrap();
        assert_eq!(r, counted);
    }

    #[test]
    fn deduction_examples() {
        let d = deduce(tv(1.0, 0.9), tv(1.0, 0.9));
        assert_eq!(d.frequency(), 1.0);
        assert!(close(d.confidence(), 0.81, 1e-12));
        let d = deduce(tv(1.0, 0.9), tv(1.0, 0.5));
        assert!(close(d.confidence(), 0.45, 1e-12));
        let d = deduce(tv(0.4, 0.7), tv(0.5, 0.0));
        assert_eq!((d.frequency(), d.confidence()), (0.2, 0.0));
    }

    #[test]
    fn expectation_examples() {
        assert_eq!(expectation(tv(1.0, 0.5)), 0.75);
        assert_eq!(expectation(tv(0.2, 0.0)), 0.5);
        assert!(close(expectation(tv(0.0, 0.8)), 0.1, 1e-12));
    }

    #[test]
    fn decay_examples() {
        let b = decay_budget(Budget::new(0.8, 0.9, 0.3).unwrap());
        assert!(close(b.priority(), 0.75, 1e-12));
        let b = decay_budget(Budget::new(0.4, 0.7, 0.4).unwrap());
        assert_eq!(b.priority(), 0.4);
        let b = decay_budget(Budget::new(0.0, 0.5, 0.4).unwrap());
        assert!(close(b.priority(), 0.2, 1e-12));
    }

    #[test]
    fn decay_is_exactly_geometric_in_rationals() {
        let q = Q::new(3, 10);
        let d = Q::new(9, 10);
        let p0 = Q::new(4, 5);
        let mut b = Budget::new(p0, d, q).unwrap();
        let mut dk = Q::from_integer(1);
        for _ in 0..12 {
            b = decay_budget(b);
            dk *= d;
            assert_eq!(b.priority() - q, (p0 - q) * dk);
        }
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(TruthValue::new(1.1, 0.5).is_err());
        assert!(TruthValue::new(0.5, 1.0).is_err());
        assert!(TruthValue::new(f64::NAN, 0.5).is_err());
        assert!(Budget::new(0.5, 1.0, 0.5).is_err());
        assert!(Budget::new(0.5, 0.5, -0.1).is_err());
    }

    #[test]
    fn display_rounds_to_two_decimals() {
        assert_eq!(tv(1.0, 0.5).to_string(), "f=1.00,c=0.50");
        assert_eq!(tv(0.5, 2.0 / 3.0).to_string(), "f=0.50,c=0.67");
    }
}
