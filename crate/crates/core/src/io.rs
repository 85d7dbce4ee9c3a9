//! Point-set JSON documents.
//!
//! ```json
//! {"p": 3, "k": 2, "modulus": [1, 0, 1], "n": 2, "points": [[[0, 1], [2, 0]], ...]}
//! ```
//!
//! Coordinates are plain integers for prime fields and little-endian
//! coefficient arrays (index `i` is the coefficient of `x^i`) when `k > 1`.
//! `modulus` is omitted for prime fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::geometry::{Point, PointSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoordDoc {
    Int(u64),
    Poly(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSetDoc {
    pub p: u64,
    pub k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    pub n: usize,
    pub points: Vec<Vec<CoordDoc>>,
}

impl PointSetDoc {
    pub fn from_set(set: &PointSet) -> Self {
        let f = set.field();
        let points = set
            .points()
            .iter()
            .map(|pt| {
                pt.coords()
                    .iter()
                    .map(|&c| {
                        if f.k() == 1 {
                            CoordDoc::Int(c.code())
                        } else {
                            CoordDoc::Poly(f.coeffs(c))
                        }
                    })
                    .collect()
            })
            .collect();
        PointSetDoc {
            p: f.p(),
            k: f.k(),
            modulus: f.modulus().map(<[u64]>::to_vec),
            n: set.dim(),
            points,
        }
    }

    pub fn field(&self) -> Result<FieldSpec> {
        FieldSpec::new(self.p, self.k, self.modulus.clone())
    }

    pub fn to_set(&self) -> Result<PointSet> {
        let field = self.field()?;
        self.to_set_in(&field)
    }

    /// Decodes against an already constructed field, which must match the
    /// document's field description.
    pub fn to_set_in(&self, field: &FieldSpec) -> Result<PointSet> {
        if field.p() != self.p || field.k() != self.k {
            return Err(Error::FieldMismatch(format!(
                "document describes F_{}^{}, expected {field}",
                self.p, self.k
            )));
        }
        let mut set = PointSet::empty(field.clone(), self.n)?;
        for (i, raw) in self.points.iter().enumerate() {
            let coords = raw
                .iter()
                .map(|c| match (c, field.k()) {
                    (CoordDoc::Int(v), 1) => field.elem(*v),
                    (CoordDoc::Poly(cs), _) => field.from_coeffs(cs),
                    (CoordDoc::Int(_), k) => Err(Error::FieldMismatch(format!(
                        "point {i}: expected a length-{k} coefficient array"
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            set.insert(Point::new(coords))?;
        }
        Ok(set)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s)
            .map_err(|e| Error::InvalidParameter(format!("malformed point-set JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("point-set documents always serialize")
    }
}
