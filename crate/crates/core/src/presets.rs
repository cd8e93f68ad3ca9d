//! Named operators.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{halving_construct, parse_matrix, GroupRingMatrix, GroupSpec};
use crate::linalg::Dyadic;

pub const LAMPLIGHTER: &str = "t + t^-1 + t u + u t^-1";

/// `T = t + t⁻¹ + tu + ut⁻¹` over `Z_2 ≀ Z`.
pub fn lamplighter() -> GroupRingMatrix {
    let g = Arc::new(GroupSpec::lamplighter());
    parse_matrix(&g, LAMPLIGHTER).expect("preset parses")
}

/// Resolves `lamplighter` and `halved:<preset>`.
pub fn operator(name: &str) -> Result<GroupRingMatrix> {
    let name = name.trim();
    if name == "lamplighter" {
        return Ok(lamplighter());
    }
    if let Some(inner) = name.strip_prefix("halved:") {
        let t = operator(inner)?;
        let id: Vec<Vec<Dyadic>> = (0..t.rows())
            .map(|r| (0..t.cols()).map(|c| Dyadic::from_int((r == c) as i64)).collect())
            .collect();
        return halving_construct(&t, &id);
    }
    Err(Error::Invalid(format!("unknown operator preset {name:?}")))
}
