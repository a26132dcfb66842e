//! Symbol declarations: per-particle parity, intrinsic c-order, Hermiticity,
//! and pairwise commutation relations.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Parity of an operator with respect to one particle's beta matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParticleParity {
    Even,
    Odd,
}

impl ParticleParity {
    pub fn compose(self, other: ParticleParity) -> ParticleParity {
        if self == other {
            ParticleParity::Even
        } else {
            ParticleParity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == ParticleParity::Odd
    }
}

/// Two-particle parity sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Parity {
    pub p1: ParticleParity,
    pub p2: ParticleParity,
}

impl Parity {
    pub const EVEN_EVEN: Parity = Parity {
        p1: ParticleParity::Even,
        p2: ParticleParity::Even,
    };
    pub const ODD_EVEN: Parity = Parity {
        p1: ParticleParity::Odd,
        p2: ParticleParity::Even,
    };
    pub const EVEN_ODD: Parity = Parity {
        p1: ParticleParity::Even,
        p2: ParticleParity::Odd,
    };
    pub const ODD_ODD: Parity = Parity {
        p1: ParticleParity::Odd,
        p2: ParticleParity::Odd,
    };

    pub const ALL: [Parity; 4] = [
        Parity::EVEN_EVEN,
        Parity::ODD_EVEN,
        Parity::EVEN_ODD,
        Parity::ODD_ODD,
    ];

    pub fn compose(self, other: Parity) -> Parity {
        Parity {
            p1: self.p1.compose(other.p1),
            p2: self.p2.compose(other.p2),
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |p: ParticleParity| match p {
            ParticleParity::Even => "even",
            ParticleParity::Odd => "odd",
        };
        write!(f, "({},{})", s(self.p1), s(self.p2))
    }
}

/// Index of a symbol in its table; doubles as the canonical total order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub u32);

/// A declared abstract operator symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolDecl {
    pub name: String,
    pub parity: Parity,
    /// Intrinsic power of c carried by the symbol.
    pub c_order: i32,
    pub hermitian: bool,
}

impl SymbolDecl {
    pub fn new(name: &str, parity: Parity, c_order: i32) -> Self {
        SymbolDecl {
            name: name.to_string(),
            parity,
            c_order,
            hermitian: true,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("symbol `{0}` is already declared")]
    DuplicateSymbol(String),
    #[error("symbol `{0}` is not declared")]
    UnknownSymbol(String),
}

/// An ordered set of symbol declarations plus declared commuting pairs.
///
/// Tables are immutable values; operations return new tables. Expressions
/// hold their table behind an `Arc`, so parent/derived tables share storage.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolTable {
    symbols: Vec<SymbolDecl>,
    /// Unordered commuting pairs, stored with ids sorted.
    relations: BTreeSet<(SymbolId, SymbolId)>,
}

impl SymbolTable {
    pub fn new() -> Self {
        SymbolTable::default()
    }

    /// Declare a symbol; it acquires the next position in the canonical order.
    pub fn declare(&self, decl: SymbolDecl) -> Result<SymbolTable, TableError> {
        if self.lookup(&decl.name).is_some() {
            return Err(TableError::DuplicateSymbol(decl.name));
        }
        let mut t = self.clone();
        t.symbols.push(decl);
        Ok(t)
    }

    /// Declare that two symbols commute.
    pub fn declare_commuting(&self, a: &str, b: &str) -> Result<SymbolTable, TableError> {
        let ia = self
            .lookup(a)
            .ok_or_else(|| TableError::UnknownSymbol(a.to_string()))?;
        let ib = self
            .lookup(b)
            .ok_or_else(|| TableError::UnknownSymbol(b.to_string()))?;
        let mut t = self.clone();
        t.relations.insert((ia.min(ib), ia.max(ib)));
        Ok(t)
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.symbols
            .iter()
            .position(|d| d.name == name)
            .map(|i| SymbolId(i as u32))
    }

    pub fn decl(&self, id: SymbolId) -> &SymbolDecl {
        &self.symbols[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = SymbolId> {
        (0..self.symbols.len() as u32).map(SymbolId)
    }

    pub fn decls(&self) -> impl Iterator<Item = &SymbolDecl> {
        self.symbols.iter()
    }

    /// A symbol trivially commutes with itself; otherwise the declared
    /// relation set decides.
    pub fn commutes(&self, a: SymbolId, b: SymbolId) -> bool {
        a == b || self.relations.contains(&(a.min(b), a.max(b)))
    }

    pub fn relations(&self) -> impl Iterator<Item = (SymbolId, SymbolId)> + '_ {
        self.relations.iter().copied()
    }

    /// The standard four-symbol two-particle table: EE, OE, EO, OO with the
    /// default intrinsic orders (EE, OO at c^0; OE, EO at c^1).
    pub fn two_body(relation_oe_eo: bool) -> Arc<SymbolTable> {
        let mut t = SymbolTable::new();
        t = t
            .declare(SymbolDecl::new("EE", Parity::EVEN_EVEN, 0))
            .unwrap();
        t = t.declare(SymbolDecl::new("OE", Parity::ODD_EVEN, 1)).unwrap();
        t = t.declare(SymbolDecl::new("EO", Parity::EVEN_ODD, 1)).unwrap();
        t = t.declare(SymbolDecl::new("OO", Parity::ODD_ODD, 0)).unwrap();
        if relation_oe_eo {
            t = t.declare_commuting("OE", "EO").unwrap();
        }
        Arc::new(t)
    }

    /// Same as [`SymbolTable::two_body`] but with the odd-odd symbol assigned
    /// intrinsic order c^-2.
    pub fn two_body_oo_order(oo_order: i32, relation_oe_eo: bool) -> Arc<SymbolTable> {
        let mut t = SymbolTable::new();
        t = t
            .declare(SymbolDecl::new("EE", Parity::EVEN_EVEN, 0))
            .unwrap();
        t = t.declare(SymbolDecl::new("OE", Parity::ODD_EVEN, 1)).unwrap();
        t = t.declare(SymbolDecl::new("EO", Parity::EVEN_ODD, 1)).unwrap();
        t = t
            .declare(SymbolDecl::new("OO", Parity::ODD_ODD, oo_order))
            .unwrap();
        if relation_oe_eo {
            t = t.declare_commuting("OE", "EO").unwrap();
        }
        Arc::new(t)
    }

    /// One-particle table: E (even) and O (odd), both even in the spectator
    /// slot. Particle 2 of the machinery is unused.
    pub fn one_body() -> Arc<SymbolTable> {
        let mut t = SymbolTable::new();
        t = t.declare(SymbolDecl::new("E", Parity::EVEN_EVEN, 0)).unwrap();
        t = t.declare(SymbolDecl::new("O", Parity::ODD_EVEN, 1)).unwrap();
        Arc::new(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_composition_is_xor() {
        assert_eq!(
            Parity::ODD_ODD.compose(Parity::ODD_ODD),
            Parity::EVEN_EVEN
        );
        assert_eq!(Parity::ODD_EVEN.compose(Parity::EVEN_ODD), Parity::ODD_ODD);
    }

    #[test]
    fn duplicate_declaration_rejected() {
        let t = SymbolTable::new()
            .declare(SymbolDecl::new("EE", Parity::EVEN_EVEN, 0))
            .unwrap();
        let err = t.declare(SymbolDecl::new("EE", Parity::EVEN_EVEN, 0));
        assert_eq!(err, Err(TableError::DuplicateSymbol("EE".into())));
    }

    #[test]
    fn relations_and_self_commutation() {
        let t = SymbolTable::two_body(true);
        let oe = t.lookup("OE").unwrap();
        let eo = t.lookup("EO").unwrap();
        let oo = t.lookup("OO").unwrap();
        assert!(t.commutes(oe, eo));
        assert!(t.commutes(eo, oe));
        assert!(!t.commutes(oe, oo));
        assert!(t.commutes(oo, oo));
    }

    #[test]
    fn unknown_symbol_in_relation() {
        let t = SymbolTable::two_body(false);
        assert!(matches!(
            t.declare_commuting("OE", "XX"),
            Err(TableError::UnknownSymbol(_))
        ));
    }
}
