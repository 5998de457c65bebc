//! Process-wide variable table.
//!
//! Every coordinate, exponential unit and the formal constant `tau` gets a
//! stable [`VarId`]. Ids are handed out in registration order; the monomial
//! order ranks lower ids first, so charts registered in declaration order get
//! graded-lex over their declared coordinate order.

use std::collections::HashMap;
use std::sync::{LazyLock, RwLock};

use num_rational::BigRational;

use super::ScalarError;

pub type VarId = u32;

pub const TAU: VarId = 0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarKind {
    Coord,
    /// Formal generator `u` with `du/d(base) = rate * u`; invertible.
    Unit { base: VarId, rate: BigRational },
    Tau,
}

#[derive(Clone, Debug)]
pub struct VarInfo {
    pub name: String,
    pub kind: VarKind,
}

struct Table {
    vars: Vec<VarInfo>,
    by_name: HashMap<String, VarId>,
}

static TABLE: LazyLock<RwLock<Table>> = LazyLock::new(|| {
    let tau = VarInfo { name: "tau".into(), kind: VarKind::Tau };
    let mut by_name = HashMap::new();
    by_name.insert("tau".to_string(), TAU);
    RwLock::new(Table { vars: vec![tau], by_name })
});

fn reserved(name: &str) -> bool {
    name == "i" || name == "tau"
}

/// Registers (or looks up) a coordinate.
pub fn coord(name: &str) -> Result<VarId, ScalarError> {
    if reserved(name) {
        return Err(ScalarError::ReservedName(name.to_string()));
    }
    let mut t = TABLE.write().expect("variable table poisoned");
    if let Some(&id) = t.by_name.get(name) {
        return match t.vars[id as usize].kind {
            VarKind::Coord => Ok(id),
            _ => Err(ScalarError::VariableKindConflict(name.to_string())),
        };
    }
    let id = t.vars.len() as VarId;
    t.vars.push(VarInfo { name: name.to_string(), kind: VarKind::Coord });
    t.by_name.insert(name.to_string(), id);
    Ok(id)
}

/// Registers (or looks up) an exponential unit over `base`.
pub fn unit(name: &str, base: VarId, rate: BigRational) -> Result<VarId, ScalarError> {
    if reserved(name) {
        return Err(ScalarError::ReservedName(name.to_string()));
    }
    let kind = VarKind::Unit { base, rate };
    let mut t = TABLE.write().expect("variable table poisoned");
    if let Some(&id) = t.by_name.get(name) {
        return if t.vars[id as usize].kind == kind {
            Ok(id)
        } else {
            Err(ScalarError::VariableKindConflict(name.to_string()))
        };
    }
    let id = t.vars.len() as VarId;
    t.vars.push(VarInfo { name: name.to_string(), kind });
    t.by_name.insert(name.to_string(), id);
    Ok(id)
}

pub fn lookup(name: &str) -> Option<VarId> {
    TABLE.read().expect("variable table poisoned").by_name.get(name).copied()
}

pub fn info(id: VarId) -> VarInfo {
    TABLE.read().expect("variable table poisoned").vars[id as usize].clone()
}

pub fn name(id: VarId) -> String {
    TABLE.read().expect("variable table poisoned").vars[id as usize].name.clone()
}

pub fn is_unit(id: VarId) -> bool {
    let t = TABLE.read().expect("variable table poisoned");
    matches!(t.vars[id as usize].kind, VarKind::Unit { .. })
}

/// All units whose base coordinate is `base`, with their rates.
pub fn units_over(base: VarId) -> Vec<(VarId, BigRational)> {
    let t = TABLE.read().expect("variable table poisoned");
    t.vars
        .iter()
        .enumerate()
        .filter_map(|(i, v)| match &v.kind {
            VarKind::Unit { base: b, rate } if *b == base => Some((i as VarId, rate.clone())),
            _ => None,
        })
        .collect()
}
