use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::cone::ConeBase;
use crate::error::{invalid, Error, Result};
use crate::graph::{Edge, MetricGraph, VertexCondition};
use crate::mesh::StratifiedComplex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Graph,
    Cone,
    Mesh,
}

impl std::fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpaceKind::Graph => "graph",
            SpaceKind::Cone => "cone",
            SpaceKind::Mesh => "mesh",
        })
    }
}

/// Graph as written in files: edges name their endpoints by vertex id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    /// Vertices carrying the Neumann (lid) condition instead of balance.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub neumann: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub length: f64,
}

impl GraphDoc {
    pub fn to_graph(&self) -> Result<MetricGraph> {
        let index: HashMap<&str, usize> = self.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let lookup = |e: &EdgeDoc, end: &str, v: &str| {
            index.get(v).copied().ok_or_else(|| invalid(format!("edge {}: {end} {v:?} is not a declared vertex", e.id)))
        };
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            edges.push(Edge { id: e.id.clone(), tail: lookup(e, "tail", &e.tail)?, head: lookup(e, "head", &e.head)?, length: e.length });
        }
        let mut conditions = vec![VertexCondition::Balance; self.vertices.len()];
        for v in &self.neumann {
            let i = index.get(v.as_str()).ok_or_else(|| invalid(format!("Neumann vertex {v:?} is not declared")))?;
            conditions[*i] = VertexCondition::Neumann;
        }
        let g = MetricGraph { vertices: self.vertices.clone(), edges, conditions };
        g.validate()?;
        Ok(g)
    }

    pub fn from_graph(g: &MetricGraph) -> Self {
        Self {
            vertices: g.vertices.clone(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeDoc { id: e.id.clone(), tail: g.vertices[e.tail].clone(), head: g.vertices[e.head].clone(), length: e.length })
                .collect(),
            neumann: g
                .conditions
                .iter()
                .zip(&g.vertices)
                .filter(|(c, _)| **c == VertexCondition::Neumann)
                .map(|(_, v)| v.clone())
                .collect(),
        }
    }
}

/// Cone base as written in files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConeBaseDoc {
    Graph(GraphDoc),
    Points { distances: Vec<Vec<f64>> },
    Spectrum { spectrum: Vec<f64>, dim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeDoc {
    pub base: ConeBaseDoc,
    pub eps: f64,
}

impl ConeDoc {
    pub fn to_base(&self) -> Result<ConeBase> {
        let base = match &self.base {
            ConeBaseDoc::Graph(g) => ConeBase::Graph(g.to_graph()?),
            ConeBaseDoc::Points { distances } => ConeBase::Points { distances: distances.clone() },
            ConeBaseDoc::Spectrum { spectrum, dim } => ConeBase::Spectrum { mu: spectrum.clone(), dim: *dim },
        };
        base.validate()?;
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(invalid("cone radius eps must be positive"));
        }
        Ok(base)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    /// Lipschitz constant of the recorded chart from the unit cube.
    #[serde(rename = "Lambda", default, skip_serializing_if = "Option::is_none")]
    pub lambda_chart: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

impl Metadata {
    pub fn is_empty(&self) -> bool {
        self.lambda_chart.is_none() && self.labels.is_empty()
    }
}

/// A space to analyse: exactly one payload, matching `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceDocument {
    pub kind: SpaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<StratifiedComplex>,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
}

impl SpaceDocument {
    pub fn graph(g: &MetricGraph) -> Self {
        Self { kind: SpaceKind::Graph, graph: Some(GraphDoc::from_graph(g)), cone: None, mesh: None, metadata: Metadata::default() }
    }

    pub fn mesh(k: StratifiedComplex) -> Self {
        Self { kind: SpaceKind::Mesh, graph: None, cone: None, mesh: Some(k), metadata: Metadata::default() }
    }

    pub fn cone(cone: ConeDoc) -> Self {
        Self { kind: SpaceKind::Cone, graph: None, cone: Some(cone), mesh: None, metadata: Metadata::default() }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.metadata.lambda_chart = Some(lambda);
        self
    }

    /// Enforces the payload/kind match, `Λ ≥ 1`, and the owning module's
    /// invariants.
    pub fn validate(&self) -> Result<()> {
        let present = [self.graph.is_some(), self.cone.is_some(), self.mesh.is_some()];
        if present.iter().filter(|&&p| p).count() != 1 {
            return Err(invalid("a space document carries exactly one of graph, cone, mesh"));
        }
        match self.kind {
            SpaceKind::Graph => {
                self.graph.as_ref().ok_or_else(|| mismatch(self.kind))?.to_graph()?;
            }
            SpaceKind::Cone => {
                self.cone.as_ref().ok_or_else(|| mismatch(self.kind))?.to_base()?;
            }
            SpaceKind::Mesh => self.mesh.as_ref().ok_or_else(|| mismatch(self.kind))?.validate()?,
        }
        if let Some(l) = self.metadata.lambda_chart {
            if !(l >= 1.0 && l.is_finite()) {
                return Err(invalid(format!("chart constant Lambda = {l} must be at least 1")));
            }
        }
        Ok(())
    }

    pub fn as_graph(&self) -> Result<MetricGraph> {
        self.graph.as_ref().ok_or_else(|| mismatch_expected(self.kind, SpaceKind::Graph))?.to_graph()
    }

    pub fn as_cone(&self) -> Result<(ConeBase, f64)> {
        let c = self.cone.as_ref().ok_or_else(|| mismatch_expected(self.kind, SpaceKind::Cone))?;
        Ok((c.to_base()?, c.eps))
    }

    pub fn as_mesh(&self) -> Result<&StratifiedComplex> {
        self.mesh.as_ref().ok_or_else(|| mismatch_expected(self.kind, SpaceKind::Mesh))
    }
}

fn mismatch(kind: SpaceKind) -> Error {
    invalid(format!("document kind is {kind} but no {kind} payload is present"))
}

fn mismatch_expected(kind: SpaceKind, want: SpaceKind) -> Error {
    invalid(format!("expected a {want} document, found {kind}"))
}
