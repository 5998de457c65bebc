use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::vars::{self, VarId};
use super::ScalarError;

/// Where a coordinate takes its values. Only `Positive` lets the certifier
/// treat the coordinate as an invertible function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Real,
    Positive,
    NonNegative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coord {
    pub name: String,
    pub var: VarId,
    pub periodic: bool,
    pub domain: Domain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpUnit {
    pub name: String,
    pub var: VarId,
    pub base: VarId,
    pub rate: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub name: String,
    coords: Vec<Coord>,
    units: Vec<ExpUnit>,
}

pub type ChartRef = Arc<Chart>;

impl Chart {
    pub fn builder(name: &str) -> ChartBuilder {
        ChartBuilder { name: name.to_string(), coords: Vec::new(), units: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn units(&self) -> &[ExpUnit] {
        &self.units
    }

    pub fn var(&self, i: usize) -> VarId {
        self.coords[i].var
    }

    pub fn vars(&self) -> Vec<VarId> {
        self.coords.iter().map(|c| c.var).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c.name == name)
    }

    pub fn index_of_var(&self, v: VarId) -> Option<usize> {
        self.coords.iter().position(|c| c.var == v)
    }

    pub fn coord_name(&self, i: usize) -> &str {
        &self.coords[i].name
    }

    pub fn domain_of(&self, v: VarId) -> Option<Domain> {
        self.coords.iter().find(|c| c.var == v).map(|c| c.domain)
    }

    pub fn unit_var(&self, name: &str) -> Option<VarId> {
        self.units.iter().find(|u| u.name == name).map(|u| u.var)
    }

    /// Copy of this chart with extra coordinates and units appended.
    pub fn extend(&self, name: &str) -> ChartBuilder {
        ChartBuilder {
            name: name.to_string(),
            coords: self.coords.iter().map(|c| (c.name.clone(), c.domain, c.periodic)).collect(),
            units: self
                .units
                .iter()
                .map(|u| {
                    let base = vars::name(u.base);
                    (u.name.clone(), base, u.rate.clone())
                })
                .collect(),
        }
    }

    /// A fresh coordinate name based on `stem` that this chart does not use.
    pub fn fresh_name(&self, stem: &str) -> String {
        let taken = |n: &str| {
            self.coords.iter().any(|c| c.name == n)
                || self.units.iter().any(|u| u.name == n)
                || n == "i"
                || n == "tau"
        };
        if !taken(stem) {
            return stem.to_string();
        }
        (1..).map(|k| format!("{stem}{k}")).find(|n| !taken(n)).unwrap()
    }
}

pub struct ChartBuilder {
    name: String,
    coords: Vec<(String, Domain, bool)>,
    units: Vec<(String, String, BigRational)>,
}

impl ChartBuilder {
    pub fn coord(self, name: &str) -> Self {
        self.coord_with(name, Domain::Real, false)
    }

    pub fn periodic(self, name: &str) -> Self {
        self.coord_with(name, Domain::Real, true)
    }

    pub fn positive(self, name: &str) -> Self {
        self.coord_with(name, Domain::Positive, false)
    }

    pub fn coord_with(mut self, name: &str, domain: Domain, periodic: bool) -> Self {
        self.coords.push((name.to_string(), domain, periodic));
        self
    }

    pub fn unit(self, name: &str, base: &str, num: i64, den: i64) -> Self {
        self.unit_rational(name, base, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn unit_rational(mut self, name: &str, base: &str, rate: BigRational) -> Self {
        self.units.push((name.to_string(), base.to_string(), rate));
        self
    }

    pub fn build(self) -> Result<ChartRef, ScalarError> {
        let mut seen = HashSet::new();
        let mut coords = Vec::new();
        for (name, domain, periodic) in self.coords {
            if !seen.insert(name.clone()) {
                return Err(ScalarError::DuplicateCoordinate(name));
            }
            let var = vars::coord(&name)?;
            coords.push(Coord { name, var, periodic, domain });
        }
        let mut units = Vec::new();
        for (name, base, rate) in self.units {
            if !seen.insert(name.clone()) {
                return Err(ScalarError::DuplicateCoordinate(name));
            }
            let b = coords
                .iter()
                .find(|c| c.name == base)
                .ok_or_else(|| ScalarError::UnknownUnitBase { unit: name.clone(), base: base.clone() })?
                .var;
            let var = vars::unit(&name, b, rate.clone())?;
            units.push(ExpUnit { name, var, base: b, rate });
        }
        Ok(Arc::new(Chart { name: self.name, coords, units }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_rejected() {
        let r = Chart::builder("dup").coord("ch_a").coord("ch_a").build();
        assert_eq!(r, Err(ScalarError::DuplicateCoordinate("ch_a".into())));
    }

    #[test]
    fn unit_needs_base() {
        let r = Chart::builder("nb").coord("ch_b").unit("ch_e", "ch_missing", 1, 1).build();
        assert!(matches!(r, Err(ScalarError::UnknownUnitBase { .. })));
    }

    #[test]
    fn reserved_names() {
        assert_eq!(Chart::builder("r").coord("tau").build(), Err(ScalarError::ReservedName("tau".into())));
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let c = Chart::builder("f").coord("t").coord("t1").build().unwrap();
        assert_eq!(c.fresh_name("t"), "t2");
        assert_eq!(c.fresh_name("s"), "s");
    }
}
