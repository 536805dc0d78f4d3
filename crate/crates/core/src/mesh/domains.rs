use super::{read_mesh, Mesh};
use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainId {
    /// Quadrilateral (0,0),(1,0),(1,1),(−1,1), Dirichlet boundary.
    DistributedQuad,
    /// Convex pentagon with a 175° corner at the origin, Neumann boundary.
    NeumannConvex,
    /// Unit square, Dirichlet boundary.
    UnitSquare,
}

impl DomainId {
    fn source(self) -> &'static str {
        match self {
            DomainId::DistributedQuad => include_str!("../../data/distributed_quad.mesh"),
            DomainId::NeumannConvex => include_str!("../../data/neumann_convex.mesh"),
            DomainId::UnitSquare => include_str!("../../data/unit_square.mesh"),
        }
    }
}

impl FromStr for DomainId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "distributedquad" | "distributed" => Ok(DomainId::DistributedQuad),
            "neumannconvex" | "neumann" => Ok(DomainId::NeumannConvex),
            "unitsquare" => Ok(DomainId::UnitSquare),
            _ => Err(Error::UnknownDomain(s.to_string())),
        }
    }
}

impl fmt::Display for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainId::DistributedQuad => "DistributedQuad",
            DomainId::NeumannConvex => "NeumannConvex",
            DomainId::UnitSquare => "UnitSquare",
        })
    }
}

/// Coarsest conforming mesh of the domain, read from the bundled geometry files.
pub fn initial_mesh(domain: DomainId) -> Result<Mesh> {
    read_mesh(domain.source())
}
