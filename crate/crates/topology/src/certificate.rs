//! Checking certificates that a knot bounds a surface of small genus.
//!
//! A certificate is a normal surface in the knot complement `M_K` (the
//! complement of `K` in the second barycentric subdivision of `T`) together
//! with a closed edge path on `∂M_K` that the surface's boundary meets an odd
//! number of times. The odd cycle shows the boundary curve is essential on
//! the torus, so with a connected boundary it is a longitude.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use crate::error::{Result, TopoError};
use crate::homology::is_null_homologous;
use crate::normal::{
    boundary_curve, check_admissible, check_cycle, components_in, curve_components, euler_in, genus, orientable_in, parity_check, EdgeIndexing,
    NormalVector,
};
use crate::subdivision::{BoundarySurface, KnotComplement, KnotSpec};
use crate::triangulation::{validate_manifold, TetComplex, Triangulation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub w: NormalVector,
    pub parity_cycle: Vec<u64>,
}

impl Certificate {
    pub fn to_json_value(&self) -> Value {
        json!({ "w": self.w.to_json_value(), "parity_cycle": self.parity_cycle })
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let w = NormalVector::from_json_value(v.get("w").ok_or_else(|| TopoError::Input("certificate has no \"w\"".into()))?)?;
        let cycle = v
            .get("parity_cycle")
            .and_then(Value::as_array)
            .ok_or_else(|| TopoError::Input("certificate has no \"parity_cycle\" array".into()))?;
        let parity_cycle = cycle
            .iter()
            .map(|x| x.as_u64().ok_or_else(|| TopoError::Input(format!("bad edge id {x}"))))
            .collect::<Result<_>>()?;
        Ok(Certificate { w, parity_cycle })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_json_value(&serde_json::from_str(s)?)
    }
}

/// Verifier checks, in the order they run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    Admissible,
    Connected,
    Parity,
    BoundaryConnected,
    Orientable,
    Genus,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Admissible => "admissible",
            Stage::Connected => "connected",
            Stage::Parity => "parity",
            Stage::BoundaryConnected => "boundary_connected",
            Stage::Orientable => "orientable",
            Stage::Genus => "genus",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept { genus: BigInt, euler_characteristic: BigInt },
    Reject { stage: Stage, reason: String },
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept { .. })
    }

    pub fn rejected_at(&self) -> Option<Stage> {
        match self {
            Verdict::Reject { stage, .. } => Some(*stage),
            Verdict::Accept { .. } => None,
        }
    }

    pub fn to_json_value(&self) -> Value {
        match self {
            Verdict::Accept { genus, euler_characteristic } => json!({
                "verdict": "accept",
                "genus": genus.to_string(),
                "euler_characteristic": euler_characteristic.to_string(),
            }),
            Verdict::Reject { stage, reason } => json!({
                "verdict": "reject",
                "stage": stage.name(),
                "reason": reason,
            }),
        }
    }
}

fn reject(stage: Stage, reason: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict::Reject { stage, reason: reason.into() })
}

/// Checks certificates for one `(T, K, g)`. Construction validates the
/// instance and builds `M_K` once.
#[derive(Clone, Debug)]
pub struct Verifier {
    complement: KnotComplement,
    boundary: BoundarySurface,
    bound: BigInt,
}

impl Verifier {
    pub fn new(t: &Triangulation, k: &KnotSpec, g: impl Into<BigInt>) -> Result<Self> {
        let report = validate_manifold(t);
        if !report.valid {
            let first = report.problems.first().map(|p| format!("{p:?}")).unwrap_or_default();
            return Err(TopoError::Precondition(format!("not a 3-manifold: {first}")));
        }
        if !report.closed {
            return Err(TopoError::Precondition("triangulation has boundary".into()));
        }
        if !t.is_orientable() {
            return Err(TopoError::Precondition("triangulation is not orientable".into()));
        }
        k.validate(&t.classes()).map_err(|e| TopoError::Precondition(format!("bad knot: {e}")))?;
        if !is_null_homologous(t, k)? {
            return Err(TopoError::Precondition("knot is not null-homologous".into()));
        }
        let complement = KnotComplement::new(t, k)?;
        let boundary = complement.boundary()?;
        Ok(Verifier { complement, boundary, bound: g.into() })
    }

    pub fn complement(&self) -> &KnotComplement {
        &self.complement
    }

    pub fn boundary(&self) -> &BoundarySurface {
        &self.boundary
    }

    pub fn bound(&self) -> &BigInt {
        &self.bound
    }

    /// Same instance with a different genus bound.
    pub fn with_bound(&self, g: impl Into<BigInt>) -> Self {
        Verifier { bound: g.into(), ..self.clone() }
    }

    /// Errors only on malformed certificates: a vector of the wrong length
    /// or a cycle that is not a closed walk on boundary edges.
    pub fn verify(&self, cert: &Certificate) -> Result<Verdict> {
        let c = &self.complement;
        let w = &cert.w;
        if w.num_tets() != c.num_tets() {
            return Err(TopoError::Input(format!("certificate has {} tetrahedra, the knot complement has {}", w.num_tets(), c.num_tets())));
        }
        check_cycle(&self.boundary, &cert.parity_cycle)?;

        if w.is_zero() {
            return reject(Stage::Admissible, "the zero vector");
        }
        if let Some(v) = check_admissible(c, w)? {
            return reject(Stage::Admissible, v.to_string());
        }
        let ix = EdgeIndexing::new(c, w)?;
        let parts = components_in(c, w, &ix)?;
        if parts != BigInt::one() {
            return reject(Stage::Connected, format!("surface has {parts} components"));
        }
        let curve = boundary_curve(&self.boundary, w);
        if !parity_check(&self.boundary, &curve, &cert.parity_cycle)? {
            return reject(Stage::Parity, "boundary meets the cycle an even number of times");
        }
        let curves = curve_components(&self.boundary, &curve)?;
        if curves != BigInt::one() {
            return reject(Stage::BoundaryConnected, format!("boundary has {curves} curves"));
        }
        if !orientable_in(c, w, &ix)? {
            return reject(Stage::Orientable, "surface is one-sided");
        }
        let chi = euler_in(c, w, &ix);
        let g = genus(&chi, &BigInt::one(), true)?;
        if g > self.bound {
            return reject(Stage::Genus, format!("genus {g} exceeds {}", self.bound));
        }
        Ok(Verdict::Accept { genus: g, euler_characteristic: chi })
    }
}

/// One-shot form of [`Verifier::verify`].
pub fn verify(t: &Triangulation, k: &KnotSpec, g: impl Into<BigInt>, cert: &Certificate) -> Result<Verdict> {
    Verifier::new(t, k, g)?.verify(cert)
}
