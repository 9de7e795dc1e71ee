use std::fmt;
use std::str::FromStr;

use super::PrecondError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Block lower bidiagonal with nested Schur complements on the diagonal.
    NestedTriangular,
    NestedDiagonal,
    /// Block lower arrowhead: leading blocks, then the additive Schur complement.
    AdditiveTriangular,
    AdditiveDiagonal,
}

impl Family {
    pub fn is_triangular(self) -> bool {
        matches!(self, Family::NestedTriangular | Family::AdditiveTriangular)
    }

    pub fn is_additive(self) -> bool {
        matches!(self, Family::AdditiveTriangular | Family::AdditiveDiagonal)
    }
}

/// Sign pattern of a preconditioner.
///
/// `diag_signs[i]` multiplies diagonal block `i` and `subdiag_signs[k]`
/// multiplies the `k`-th lower coupling: `C_{k+1}` for nested families, the
/// corner row's `k`-th border block for additive ones.
#[derive(Clone, Debug, PartialEq)]
pub struct PreconditionerSpec {
    pub family: Family,
    pub diag_signs: Vec<f64>,
    pub subdiag_signs: Vec<f64>,
}

impl PreconditionerSpec {
    pub fn block_count(&self) -> usize {
        self.diag_signs.len()
    }
}

/// Named preconditioners. `Pn`, `Dn` and `Mn` carry their block count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    P1,
    P2,
    P3,
    P4,
    PD1,
    PD2,
    PD3,
    PD4,
    Pn(usize),
    Dn(usize),
    Mn(usize),
    Q1,
    Q2,
    QD1,
    QD2,
}

const P: f64 = 1.0;
const M: f64 = -1.0;

fn alternating(n: usize) -> Vec<f64> {
    (0..n).map(|i| if i % 2 == 0 { P } else { M }).collect()
}

impl Preset {
    /// The twelve fixed three-block presets.
    pub const THREE_BLOCK: [Preset; 12] = [
        Preset::P1,
        Preset::P2,
        Preset::P3,
        Preset::P4,
        Preset::PD1,
        Preset::PD2,
        Preset::PD3,
        Preset::PD4,
        Preset::Q1,
        Preset::Q2,
        Preset::QD1,
        Preset::QD2,
    ];

    pub fn block_count(self) -> usize {
        match self {
            Preset::Pn(n) | Preset::Dn(n) | Preset::Mn(n) => n,
            _ => 3,
        }
    }

    pub fn family(self) -> Family {
        self.spec().family
    }

    pub fn spec(self) -> PreconditionerSpec {
        use Family::*;
        let (family, diag_signs, subdiag_signs) = match self {
            Preset::P1 => (NestedTriangular, vec![P, M, P], vec![P, P]),
            Preset::P2 => (NestedTriangular, vec![P, P, P], vec![P, M]),
            Preset::P3 => (NestedTriangular, vec![P, P, M], vec![P, M]),
            Preset::P4 => (NestedTriangular, vec![P, M, M], vec![P, P]),
            Preset::PD1 => (NestedDiagonal, vec![P, P, P], vec![]),
            Preset::PD2 => (NestedDiagonal, vec![P, P, M], vec![]),
            Preset::PD3 => (NestedDiagonal, vec![P, M, P], vec![]),
            Preset::PD4 => (NestedDiagonal, vec![P, M, M], vec![]),
            Preset::Pn(n) => (NestedTriangular, alternating(n), vec![P; n.saturating_sub(1)]),
            Preset::Dn(n) => (NestedDiagonal, alternating(n), vec![]),
            Preset::Mn(n) => (NestedDiagonal, vec![P; n], vec![]),
            Preset::Q1 => (AdditiveTriangular, vec![P, P, M], vec![P, P]),
            Preset::Q2 => (AdditiveTriangular, vec![P, P, P], vec![P, P]),
            Preset::QD1 => (AdditiveDiagonal, vec![P, P, P], vec![]),
            Preset::QD2 => (AdditiveDiagonal, vec![P, P, M], vec![]),
        };
        PreconditionerSpec {
            family,
            diag_signs,
            subdiag_signs,
        }
    }

    /// Whether the predicted polynomial assumes every diagonal block after
    /// the first vanishes (for the additive presets: a zero corner block).
    pub fn needs_zero_tail(self) -> bool {
        matches!(
            self,
            Preset::PD1
                | Preset::PD2
                | Preset::PD3
                | Preset::PD4
                | Preset::Dn(_)
                | Preset::Mn(_)
                | Preset::QD1
                | Preset::QD2
        )
    }

    pub fn name(self) -> String {
        match self {
            Preset::Pn(n) => format!("Pn{n}"),
            Preset::Dn(n) => format!("Dn{n}"),
            Preset::Mn(n) => format!("Mn{n}"),
            other => format!("{other:?}"),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Preset {
    type Err = PrecondError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        let fixed = match upper.as_str() {
            "P1" => Some(Preset::P1),
            "P2" => Some(Preset::P2),
            "P3" => Some(Preset::P3),
            "P4" => Some(Preset::P4),
            "PD1" => Some(Preset::PD1),
            "PD2" => Some(Preset::PD2),
            "PD3" => Some(Preset::PD3),
            "PD4" => Some(Preset::PD4),
            "Q1" => Some(Preset::Q1),
            "Q2" => Some(Preset::Q2),
            "QD1" => Some(Preset::QD1),
            "QD2" => Some(Preset::QD2),
            _ => None,
        };
        if let Some(p) = fixed {
            return Ok(p);
        }
        let sized = |prefix: &str, make: fn(usize) -> Preset| {
            upper
                .strip_prefix(prefix)
                .map(|rest| rest.trim_start_matches([':', '=']))
                .and_then(|rest| rest.parse::<usize>().ok())
                .filter(|&n| n >= 1)
                .map(make)
        };
        sized("PN", Preset::Pn)
            .or_else(|| sized("DN", Preset::Dn))
            .or_else(|| sized("MN", Preset::Mn))
            .ok_or_else(|| PrecondError::UnknownPreset(s.to_string()))
    }
}
