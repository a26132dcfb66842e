//! Iterative unitary reduction of a two-particle Hamiltonian to even-even
//! form: generator construction, truncated conjugation series, sequencing
//! policies, and the even-even cleanup transformation.
//!
//! The driver repeats rounds of sector eliminations. Within a round each
//! requested sector generator is built from the *current* Hamiltonian (so
//! later rounds automatically act on residual components) and applied via the
//! truncated conjugation series. Every generator has strictly negative
//! effective order, so each nested bracket lowers order by at least one and
//! both the series and the round loop terminate.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::Coefficient;
use crate::expr::{comm, AlgebraError, Expression};
use crate::poly::{IntPoly, MassVar};
use crate::table::{Parity, SymbolTable};

/// Which non-even-even sector a generator eliminates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorKind {
    Oe,
    Eo,
    Oo,
}

impl SectorKind {
    pub fn sector(self) -> Parity {
        match self {
            SectorKind::Oe => Parity::ODD_EVEN,
            SectorKind::Eo => Parity::EVEN_ODD,
            SectorKind::Oo => Parity::ODD_ODD,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SectorKind::Oe => "oe",
            SectorKind::Eo => "eo",
            SectorKind::Oo => "oo",
        }
    }
}

impl std::str::FromStr for SectorKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "oe" => Ok(SectorKind::Oe),
            "eo" => Ok(SectorKind::Eo),
            "oo" => Ok(SectorKind::Oo),
            other => Err(format!("unknown sector kind `{other}` (expected oe, eo, oo)")),
        }
    }
}

/// Settings for [`reduce`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionConfig {
    /// Order of generator application within each round.
    pub sequence: Vec<SectorKind>,
    /// Keep monomials with effective order >= this.
    pub trunc_order: i32,
    /// Apply the even-even cleanup transformation after the rounds.
    pub cleanup: bool,
    /// Equal masses forbid the odd-odd generator.
    pub masses_equal: bool,
    /// Cleanup uses only `H + i[S,H]` rather than the full series.
    pub bch_cleanup_first_order_only: bool,
    /// Defensive cap on elimination rounds.
    pub max_rounds: u32,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig {
            sequence: vec![SectorKind::Oe, SectorKind::Eo, SectorKind::Oo],
            trunc_order: -4,
            cleanup: false,
            masses_equal: false,
            bch_cleanup_first_order_only: true,
            max_rounds: 16,
        }
    }
}

/// One applied generator.
#[derive(Debug, Clone)]
pub struct TraceStep {
    pub round: u32,
    pub kind: TraceKind,
    pub generator: Expression,
}

/// Trace steps distinguish the sector eliminations from the final cleanup
/// unitary (which is even-even).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Oe,
    Eo,
    Oo,
    Ee,
}

impl TraceKind {
    pub fn name(self) -> &'static str {
        match self {
            TraceKind::Oe => "oe",
            TraceKind::Eo => "eo",
            TraceKind::Oo => "oo",
            TraceKind::Ee => "ee",
        }
    }
}

impl From<SectorKind> for TraceKind {
    fn from(k: SectorKind) -> TraceKind {
        match k {
            SectorKind::Oe => TraceKind::Oe,
            SectorKind::Eo => TraceKind::Eo,
            SectorKind::Oo => TraceKind::Oo,
        }
    }
}

/// The ordered list of applied generators plus the transformed Hamiltonian.
#[derive(Debug, Clone)]
pub struct ReductionTrace {
    pub steps: Vec<TraceStep>,
    pub transformed: Expression,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("odd-odd generator is not applicable for equal masses")]
    EqualMassOddOdd,
    #[error("generator contains a monomial of effective order {0} >= 0; series would not terminate")]
    GeneratorOrderTooHigh(i32),
    #[error("Hamiltonian does not carry the expected rest-energy terms")]
    MissingLargeTerms,
    #[error("Hamiltonian is not Hermitian")]
    NotHermitian,
    #[error("input is not a one-particle Hamiltonian: {0}")]
    NotOneBody(String),
    #[error("no progress after {rounds} rounds; residual non-even-even part: {residual}")]
    Divergence { rounds: u32, residual: String },
    #[error("cleanup generator must be even-even and Hermitian")]
    NonEvenEvenCleanup,
    #[error("trace does not contain first-round oe, eo and oo generators")]
    MissingFirstRoundGenerators,
    #[error("invalid reduction config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Build the elimination generator for one sector from the current
/// Hamiltonian. Returns the zero expression when the component is empty.
pub fn build_generator(
    h: &Expression,
    kind: SectorKind,
    config: &ReductionConfig,
) -> Result<Expression, EngineError> {
    let table = h.table();
    let component = h.project(kind.sector());
    let prefactor = match kind {
        SectorKind::Oe => {
            // -i b1 / (2 m1 c^2)
            let coeff = Coefficient::imaginary(crate::coeff::PolyRatio::new(
                IntPoly::int(-1),
                IntPoly::m1().mul_int(&2.into()),
            ));
            &Expression::beta1(table) * &Expression::scalar(table, coeff)
        }
        SectorKind::Eo => {
            let coeff = Coefficient::imaginary(crate::coeff::PolyRatio::new(
                IntPoly::int(-1),
                IntPoly::m2().mul_int(&2.into()),
            ));
            &Expression::beta2(table) * &Expression::scalar(table, coeff)
        }
        SectorKind::Oo => {
            if config.masses_equal {
                return Err(EngineError::EqualMassOddOdd);
            }
            // -i (b1 m1 - b2 m2) / (2 (m1^2 - m2^2) c^2)
            let num = &(&Expression::beta1(table) * &Expression::mass(table, MassVar::M1))
                - &(&Expression::beta2(table) * &Expression::mass(table, MassVar::M2));
            let coeff = Coefficient::imaginary(crate::coeff::PolyRatio::new(
                IntPoly::int(-1),
                IntPoly::m1()
                    .pow(2)
                    .sub(&IntPoly::m2().pow(2))
                    .mul_int(&2.into()),
            ));
            &num * &Expression::scalar(table, coeff)
        }
    };
    if component.is_zero() {
        return Ok(Expression::zero(table));
    }
    let c2 = Expression::c_pow(table, -2);
    Ok(&(&prefactor * &c2) * &component)
}

/// Truncated conjugation series `sum_n (i^n/n!) ad_S^n(H)`, each partial term
/// truncated at `min_order`; the series stops at the first term whose
/// truncation vanishes. Requires every monomial of `S` to have effective
/// order <= -1, which makes each bracket lower the maximum order by at least
/// one and the recursion on truncated terms exact for the truncated output.
pub fn conjugate_bch(
    h: &Expression,
    s: &Expression,
    min_order: i32,
) -> Result<Expression, EngineError> {
    if let Some(max) = s.max_effective_order() {
        if max >= 0 {
            return Err(EngineError::GeneratorOrderTooHigh(max));
        }
    }
    let mut term = h.truncate(min_order);
    let mut acc = term.clone();
    let mut n: i64 = 1;
    while !term.is_zero() {
        // i/n * [S, term]
        let factor = Coefficient::imaginary(crate::coeff::PolyRatio::rational(1, n));
        term = comm(s, &term).scale(&factor).truncate(min_order);
        acc = &acc + &term;
        n += 1;
    }
    Ok(acc)
}

fn check_two_body_large_terms(h: &Expression) -> Result<(), EngineError> {
    let table = h.table();
    let rest = Expression::rest_energy_two_body(table);
    for (k, c) in rest.terms() {
        if h.coefficient(k) != Some(c) {
            return Err(EngineError::MissingLargeTerms);
        }
    }
    for (k, _) in h.terms() {
        if h.effective_order(k) >= 2 && h.coefficient(k) != rest.coefficient(k) {
            return Err(EngineError::MissingLargeTerms);
        }
    }
    Ok(())
}

fn run_rounds(
    h0: &Expression,
    config: &ReductionConfig,
) -> Result<(Vec<TraceStep>, Expression), EngineError> {
    let mut h_cur = h0.truncate(config.trunc_order);
    let mut steps = Vec::new();
    let mut prev_max: Option<i32> = None;
    for round in 0..config.max_rounds {
        let offenders = h_cur.project_out(Parity::EVEN_EVEN);
        let Some(max_order) = offenders.max_effective_order() else {
            return Ok((steps, h_cur));
        };
        if let Some(prev) = prev_max {
            if max_order >= prev {
                return Err(EngineError::Divergence {
                    rounds: round,
                    residual: offenders.to_string(),
                });
            }
        }
        prev_max = Some(max_order);
        for kind in &config.sequence {
            let s = build_generator(&h_cur, *kind, config)?;
            if s.is_zero() {
                continue;
            }
            debug_assert!(s.is_hermitian().unwrap_or(false), "generator not Hermitian");
            h_cur = conjugate_bch(&h_cur, &s, config.trunc_order)?;
            steps.push(TraceStep {
                round,
                kind: (*kind).into(),
                generator: s,
            });
        }
    }
    let offenders = h_cur.project_out(Parity::EVEN_EVEN);
    if offenders.is_zero() {
        Ok((steps, h_cur))
    } else {
        Err(EngineError::Divergence {
            rounds: config.max_rounds,
            residual: offenders.to_string(),
        })
    }
}

fn validate_config(config: &ReductionConfig) -> Result<(), EngineError> {
    if config.sequence.is_empty() {
        return Err(EngineError::InvalidConfig("empty sequence".into()));
    }
    for (i, a) in config.sequence.iter().enumerate() {
        if config.sequence[..i].contains(a) {
            return Err(EngineError::InvalidConfig(format!(
                "sector `{}` appears twice in the sequence",
                a.name()
            )));
        }
    }
    if config.masses_equal && config.sequence.contains(&SectorKind::Oo) {
        return Err(EngineError::InvalidConfig(
            "equal masses forbid the oo generator".into(),
        ));
    }
    Ok(())
}

/// Reduce a two-particle Hamiltonian to even-even form down to the configured
/// truncation order.
pub fn reduce(h: &Expression, config: &ReductionConfig) -> Result<ReductionTrace, EngineError> {
    validate_config(config)?;
    if !h.is_hermitian()? {
        return Err(EngineError::NotHermitian);
    }
    check_two_body_large_terms(h)?;
    if config.masses_equal && !h.project(Parity::ODD_ODD).is_zero() {
        return Err(EngineError::EqualMassOddOdd);
    }
    let (mut steps, mut h_tr) = run_rounds(h, config)?;
    if config.cleanup {
        let s_ee = cleanup_generator_from_steps(&steps)?;
        h_tr = apply_cleanup(&h_tr, &s_ee, config)?;
        let round = steps.last().map(|s| s.round + 1).unwrap_or(0);
        steps.push(TraceStep {
            round,
            kind: TraceKind::Ee,
            generator: s_ee,
        });
    }
    Ok(ReductionTrace {
        steps,
        transformed: h_tr,
    })
}

fn first_round_generator(steps: &[TraceStep], kind: TraceKind) -> Option<&Expression> {
    steps
        .iter()
        .find(|s| s.round == 0 && s.kind == kind)
        .map(|s| &s.generator)
}

fn cleanup_generator_from_steps(steps: &[TraceStep]) -> Result<Expression, EngineError> {
    let s_oe =
        first_round_generator(steps, TraceKind::Oe).ok_or(EngineError::MissingFirstRoundGenerators)?;
    let s_eo =
        first_round_generator(steps, TraceKind::Eo).ok_or(EngineError::MissingFirstRoundGenerators)?;
    let s_oo =
        first_round_generator(steps, TraceKind::Oo).ok_or(EngineError::MissingFirstRoundGenerators)?;
    Ok(comm(s_oe, &comm(s_eo, s_oo)))
}

/// The even-even cleanup generator `[S_oe, [S_eo, S_oo]]` built from the
/// FIRST-round generators of a trace.
pub fn cleanup_generator(trace: &ReductionTrace) -> Result<Expression, EngineError> {
    cleanup_generator_from_steps(&trace.steps)
}

/// Apply the even-even cleanup transformation to a transformed Hamiltonian.
pub fn apply_cleanup(
    h_tr: &Expression,
    s_ee: &Expression,
    config: &ReductionConfig,
) -> Result<Expression, EngineError> {
    if !s_ee.project_out(Parity::EVEN_EVEN).is_zero() || !s_ee.is_hermitian()? {
        return Err(EngineError::NonEvenEvenCleanup);
    }
    if s_ee.is_zero() {
        return Ok(h_tr.truncate(config.trunc_order));
    }
    if config.bch_cleanup_first_order_only {
        let correction = comm(s_ee, h_tr).scale(&Coefficient::i());
        Ok((&h_tr.truncate(config.trunc_order) + &correction).truncate(config.trunc_order))
    } else {
        conjugate_bch(h_tr, s_ee, config.trunc_order)
    }
}

/// Reduce a one-particle Hamiltonian `b m c^2 + E + O` (particle slot 1; the
/// other slot must be trivial).
pub fn one_body_reduce(h: &Expression, trunc: i32) -> Result<ReductionTrace, EngineError> {
    if !h.is_hermitian()? {
        return Err(EngineError::NotHermitian);
    }
    for (k, _) in h.terms() {
        if k.beta.1 != 0 {
            return Err(EngineError::NotOneBody("beta2 present".into()));
        }
    }
    if !h.project(Parity::EVEN_ODD).is_zero() || !h.project(Parity::ODD_ODD).is_zero() {
        return Err(EngineError::NotOneBody("particle-2 odd components present".into()));
    }
    let rest = Expression::rest_energy_one_body(h.table());
    for (k, c) in rest.terms() {
        if h.coefficient(k) != Some(c) {
            return Err(EngineError::MissingLargeTerms);
        }
    }
    for (k, _) in h.terms() {
        if h.effective_order(k) >= 2 && h.coefficient(k) != rest.coefficient(k) {
            return Err(EngineError::MissingLargeTerms);
        }
    }
    let config = ReductionConfig {
        sequence: vec![SectorKind::Oe],
        trunc_order: trunc,
        ..ReductionConfig::default()
    };
    let (steps, h_tr) = run_rounds(h, &config)?;
    Ok(ReductionTrace {
        steps,
        transformed: h_tr,
    })
}

// ---------------------------------------------------------------------------
// Trace serialization
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStepWire {
    pub round: u32,
    pub kind: TraceKind,
    pub generator: Vec<crate::expr::TermWire>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceWire {
    pub steps: Vec<TraceStepWire>,
    pub transformed: Vec<crate::expr::TermWire>,
}

impl ReductionTrace {
    pub fn to_wire(&self) -> TraceWire {
        TraceWire {
            steps: self
                .steps
                .iter()
                .map(|s| TraceStepWire {
                    round: s.round,
                    kind: s.kind,
                    generator: s.generator.to_wire(),
                })
                .collect(),
            transformed: self.transformed.to_wire(),
        }
    }

    pub fn from_wire(
        table: &Arc<SymbolTable>,
        wire: &TraceWire,
    ) -> Result<ReductionTrace, crate::expr::WireError> {
        Ok(ReductionTrace {
            steps: wire
                .steps
                .iter()
                .map(|s| {
                    Ok(TraceStep {
                        round: s.round,
                        kind: s.kind,
                        generator: Expression::from_wire(table, &s.generator)?,
                    })
                })
                .collect::<Result<Vec<_>, crate::expr::WireError>>()?,
            transformed: Expression::from_wire(table, &wire.transformed)?,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("trace serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::acomm;

    fn generic_h(table: &Arc<SymbolTable>) -> Expression {
        let mut h = Expression::rest_energy_two_body(table);
        for name in ["EE", "OE", "EO", "OO"] {
            h = &h + &Expression::symbol(table, name);
        }
        h
    }

    #[test]
    fn first_iteration_generators_match_printed_forms() {
        let t = SymbolTable::two_body(false);
        let h = generic_h(&t);
        let config = ReductionConfig::default();

        let s_oe = build_generator(&h, SectorKind::Oe, &config).unwrap();
        let expected = &(&(&Expression::beta1(&t)
            * &Expression::scalar(
                &t,
                Coefficient::imaginary(crate::coeff::PolyRatio::new(
                    IntPoly::int(-1),
                    IntPoly::m1().mul_int(&2.into()),
                )),
            ))
            * &Expression::c_pow(&t, -2))
            * &Expression::symbol(&t, "OE");
        assert_eq!(s_oe, expected);
        assert!(s_oe.is_hermitian().unwrap());

        let s_oo = build_generator(&h, SectorKind::Oo, &config).unwrap();
        assert!(s_oo.is_hermitian().unwrap());
        // Purely even-even H has an empty oo component.
        let h_ee = Expression::rest_energy_two_body(&t);
        assert!(build_generator(&h_ee, SectorKind::Oo, &config)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn equal_mass_oo_rejected() {
        let t = SymbolTable::two_body(false);
        let h = generic_h(&t);
        let config = ReductionConfig {
            masses_equal: true,
            ..ReductionConfig::default()
        };
        assert!(matches!(
            build_generator(&h, SectorKind::Oo, &config),
            Err(EngineError::EqualMassOddOdd)
        ));
        // reduce fails fast with a nonzero odd-odd component.
        let cfg2 = ReductionConfig {
            masses_equal: true,
            sequence: vec![SectorKind::Oe, SectorKind::Eo],
            ..ReductionConfig::default()
        };
        assert!(matches!(
            reduce(&h, &cfg2),
            Err(EngineError::EqualMassOddOdd)
        ));
    }

    #[test]
    fn bch_identity_for_zero_generator() {
        let t = SymbolTable::two_body(false);
        let h = generic_h(&t);
        let z = Expression::zero(&t);
        assert_eq!(conjugate_bch(&h, &z, -4).unwrap(), h.truncate(-4));
    }

    #[test]
    fn bch_rejects_nonnegative_order() {
        let t = SymbolTable::two_body(false);
        let h = generic_h(&t);
        let s = Expression::symbol(&t, "OO"); // order 0
        assert!(matches!(
            conjugate_bch(&h, &s, -4),
            Err(EngineError::GeneratorOrderTooHigh(0))
        ));
    }

    #[test]
    fn bch_cancels_leading_odd_term() {
        // H = b1 m1 c^2 + b2 m2 c^2 + OE conjugated with the oe generator:
        // the c^1 odd term cancels exactly and b1 (OE)^2/(2 m1 c^2) appears.
        let t = SymbolTable::two_body(false);
        let h = &Expression::rest_energy_two_body(&t) + &Expression::symbol(&t, "OE");
        let config = ReductionConfig::default();
        let s = build_generator(&h, SectorKind::Oe, &config).unwrap();
        let out = conjugate_bch(&h, &s, -2).unwrap();
        // odd-even sector no longer contains the order-1 term
        let oe_part = out.project(Parity::ODD_EVEN);
        assert!(oe_part.max_effective_order().unwrap_or(i32::MIN) <= -1);
        // kinetic-like term present
        let kinetic = &(&(&Expression::beta1(&t)
            * &Expression::rational(&t, 1, 2))
            * &Expression::scalar(
                &t,
                Coefficient::real(crate::coeff::PolyRatio::new(IntPoly::one(), IntPoly::m1())),
            ))
            * &(&Expression::symbol(&t, "OE").pow(2) * &Expression::c_pow(&t, -2));
        for (k, c) in kinetic.terms() {
            assert_eq!(out.coefficient(k), Some(c), "missing kinetic term");
        }
    }

    #[test]
    fn reduce_requires_large_terms() {
        let t = SymbolTable::two_body(false);
        let h = Expression::symbol(&t, "EE");
        assert!(matches!(
            reduce(&h, &ReductionConfig::default()),
            Err(EngineError::MissingLargeTerms)
        ));
    }

    #[test]
    fn apply_cleanup_zero_is_truncation() {
        let t = SymbolTable::two_body(true);
        let h = generic_h(&t);
        let config = ReductionConfig::default();
        let z = Expression::zero(&t);
        assert_eq!(apply_cleanup(&h, &z, &config).unwrap(), h.truncate(-4));
    }

    #[test]
    fn apply_cleanup_rejects_non_even_even() {
        let t = SymbolTable::two_body(true);
        let h = generic_h(&t);
        let config = ReductionConfig::default();
        let bad = Expression::symbol(&t, "OE");
        assert!(matches!(
            apply_cleanup(&h, &bad, &config),
            Err(EngineError::NonEvenEvenCleanup)
        ));
    }

    #[test]
    fn first_iteration_oe_eo_commute_under_relation() {
        // With the commutation relation declared, the first-iteration oe and
        // eo generators commute exactly.
        let t = SymbolTable::two_body(true);
        let h = generic_h(&t);
        let config = ReductionConfig::default();
        let s_oe = build_generator(&h, SectorKind::Oe, &config).unwrap();
        let s_eo = build_generator(&h, SectorKind::Eo, &config).unwrap();
        assert!(comm(&s_oe, &s_eo).is_zero());
        // Neither commutes with the oo generator.
        let s_oo = build_generator(&h, SectorKind::Oo, &config).unwrap();
        assert!(!comm(&s_oe, &s_oo).is_zero());
    }

    #[test]
    fn anticommutator_helper_sanity() {
        let t = SymbolTable::two_body(false);
        let oe = Expression::symbol(&t, "OE");
        assert_eq!(acomm(&oe, &oe), oe.pow(2).scale(&Coefficient::int(2)));
    }
}
