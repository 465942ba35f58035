//! Core data model: finite graphs whose link set may contain ordinary edges,
//! loops, and semi-edges (dangling half-edges with only one endpoint).
//!
//! Every link occupies one or more *slots* at its endpoint vertices:
//! an edge occupies one slot at each endpoint, a loop occupies two slots at
//! its vertex, and a semi-edge occupies a single slot.  The degree of a
//! vertex is its slot count, so a loop contributes 2 and a semi-edge 1.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Index of a vertex within a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

/// Index of a link (edge, loop, or semi-edge) within a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl LinkId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// The three species of link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkKind {
    /// Ordinary edge joining two distinct vertices.
    Edge,
    /// Loop: both endpoints at the same vertex, contributing 2 to its degree.
    Loop,
    /// Semi-edge: a single endpoint, contributing 1 to the degree; the other
    /// end dangles free.
    SemiEdge,
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LinkKind::Edge => "edge",
            LinkKind::Loop => "loop",
            LinkKind::SemiEdge => "semi-edge",
        };
        f.write_str(s)
    }
}

/// One link of a graph.
///
/// `ends` always holds two entries: for an edge they are the two distinct
/// endpoints; for a loop or a semi-edge both entries name the same vertex
/// (a loop genuinely has two incidences there, a semi-edge only one — the
/// `kind` disambiguates).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub id: LinkId,
    pub kind: LinkKind,
    pub ends: [VertexId; 2],
    /// Optional user-facing label, unique within the graph when present.
    pub label: Option<String>,
}

impl Link {
    /// The vertex at the given side (0 or 1).
    pub fn end(&self, side: u8) -> VertexId {
        self.ends[side as usize]
    }

    /// For an edge, the endpoint other than `v`.  For loops and semi-edges
    /// this returns the same vertex back.
    pub fn other_end(&self, v: VertexId) -> VertexId {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }

    /// Number of slots this link occupies in total (edge 2, loop 2, semi 1).
    pub fn slot_count(&self) -> usize {
        match self.kind {
            LinkKind::Edge | LinkKind::Loop => 2,
            LinkKind::SemiEdge => 1,
        }
    }
}

/// One incidence of a link at a vertex.  `side` is 0 or 1; semi-edges only
/// ever use side 0, and the two sides of a loop are its two incidences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkSlot {
    pub link: LinkId,
    pub side: u8,
}

/// Errors raised while building or querying a graph.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate vertex name {0:?}")]
    DuplicateVertex(String),
    #[error("no vertex named {0:?}")]
    UnknownVertex(String),
    #[error("vertex id {0} out of range")]
    BadVertexId(u32),
    #[error("link id {0} out of range")]
    BadLinkId(u32),
    #[error("an edge needs two distinct endpoints; use a loop for {0:?}-{0:?}")]
    EdgeNeedsTwoVertices(String),
    #[error("duplicate link label {0:?}")]
    DuplicateLabel(String),
}

/// A finite graph with ordinary edges, loops, and semi-edges.
///
/// Vertices are named; names are unique.  Links are stored in insertion
/// order and may carry unique labels.  Parallel edges, multiple loops, and
/// multiple semi-edges at a vertex are all allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    name_index: BTreeMap<String, VertexId>,
    links: Vec<Link>,
    label_index: BTreeMap<String, LinkId>,
    slots: Vec<Vec<LinkSlot>>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    // ---- construction ----

    pub fn add_vertex(&mut self, name: &str) -> Result<VertexId, GraphError> {
        if self.name_index.contains_key(name) {
            return Err(GraphError::DuplicateVertex(name.to_string()));
        }
        let id = VertexId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.name_index.insert(name.to_string(), id);
        self.slots.push(Vec::new());
        Ok(id)
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v.index() < self.names.len() {
            Ok(())
        } else {
            Err(GraphError::BadVertexId(v.0))
        }
    }

    fn register_label(&mut self, label: Option<&str>, id: LinkId) -> Result<(), GraphError> {
        if let Some(l) = label {
            if self.label_index.contains_key(l) {
                return Err(GraphError::DuplicateLabel(l.to_string()));
            }
            self.label_index.insert(l.to_string(), id);
        }
        Ok(())
    }

    pub fn add_edge(
        &mut self,
        u: VertexId,
        v: VertexId,
        label: Option<&str>,
    ) -> Result<LinkId, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::EdgeNeedsTwoVertices(self.names[u.index()].clone()));
        }
        let id = LinkId(self.links.len() as u32);
        self.register_label(label, id)?;
        self.links.push(Link {
            id,
            kind: LinkKind::Edge,
            ends: [u, v],
            label: label.map(str::to_string),
        });
        self.slots[u.index()].push(LinkSlot { link: id, side: 0 });
        self.slots[v.index()].push(LinkSlot { link: id, side: 1 });
        Ok(id)
    }

    pub fn add_loop(&mut self, v: VertexId, label: Option<&str>) -> Result<LinkId, GraphError> {
        self.check_vertex(v)?;
        let id = LinkId(self.links.len() as u32);
        self.register_label(label, id)?;
        self.links.push(Link {
            id,
            kind: LinkKind::Loop,
            ends: [v, v],
            label: label.map(str::to_string),
        });
        self.slots[v.index()].push(LinkSlot { link: id, side: 0 });
        self.slots[v.index()].push(LinkSlot { link: id, side: 1 });
        Ok(id)
    }

    pub fn add_semi_edge(&mut self, v: VertexId, label: Option<&str>) -> Result<LinkId, GraphError> {
        self.check_vertex(v)?;
        let id = LinkId(self.links.len() as u32);
        self.register_label(label, id)?;
        self.links.push(Link {
            id,
            kind: LinkKind::SemiEdge,
            ends: [v, v],
            label: label.map(str::to_string),
        });
        self.slots[v.index()].push(LinkSlot { link: id, side: 0 });
        Ok(id)
    }

    // ---- lookups ----

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.name_index.get(name).copied()
    }

    pub fn require_vertex(&self, name: &str) -> Result<VertexId, GraphError> {
        self.vertex(name)
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.names[v.index()]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.names.len() as u32).map(VertexId)
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.index()]
    }

    pub fn links(&self) -> impl Iterator<Item = &Link> {
        self.links.iter()
    }

    pub fn link_ids(&self) -> impl Iterator<Item = LinkId> + '_ {
        (0..self.links.len() as u32).map(LinkId)
    }

    pub fn link_by_label(&self, label: &str) -> Option<LinkId> {
        self.label_index.get(label).copied()
    }

    /// All incidences at `v`, in insertion order.  Length equals `degree(v)`.
    pub fn slots(&self, v: VertexId) -> &[LinkSlot] {
        &self.slots[v.index()]
    }

    /// The vertex a slot is attached to.
    pub fn slot_vertex(&self, slot: LinkSlot) -> VertexId {
        self.link(slot.link).end(slot.side)
    }

    /// Degree counting edges once, loops twice, semi-edges once.
    pub fn degree(&self, v: VertexId) -> usize {
        self.slots[v.index()].len()
    }

    // ---- classified incidence queries ----

    pub fn edges_between(&self, u: VertexId, v: VertexId) -> Vec<LinkId> {
        self.links
            .iter()
            .filter(|l| {
                l.kind == LinkKind::Edge
                    && ((l.ends[0] == u && l.ends[1] == v) || (l.ends[0] == v && l.ends[1] == u))
            })
            .map(|l| l.id)
            .collect()
    }

    pub fn loops_at(&self, v: VertexId) -> Vec<LinkId> {
        self.links
            .iter()
            .filter(|l| l.kind == LinkKind::Loop && l.ends[0] == v)
            .map(|l| l.id)
            .collect()
    }

    pub fn semis_at(&self, v: VertexId) -> Vec<LinkId> {
        self.links
            .iter()
            .filter(|l| l.kind == LinkKind::SemiEdge && l.ends[0] == v)
            .map(|l| l.id)
            .collect()
    }

    /// Neighbouring vertices reachable over ordinary edges (deduplicated,
    /// ascending).
    pub fn edge_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self.slots[v.index()]
            .iter()
            .filter_map(|s| {
                let l = self.link(s.link);
                if l.kind == LinkKind::Edge {
                    Some(l.other_end(v))
                } else {
                    None
                }
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// `true` when the graph has no loops, no parallel edges, and at most one
    /// semi-edge at each vertex.
    pub fn is_semi_simple(&self) -> bool {
        let mut semi_seen = vec![false; self.names.len()];
        let mut edge_seen: BTreeMap<(VertexId, VertexId), ()> = BTreeMap::new();
        for l in &self.links {
            match l.kind {
                LinkKind::Loop => return false,
                LinkKind::SemiEdge => {
                    let i = l.ends[0].index();
                    if semi_seen[i] {
                        return false;
                    }
                    semi_seen[i] = true;
                }
                LinkKind::Edge => {
                    let key = if l.ends[0] <= l.ends[1] {
                        (l.ends[0], l.ends[1])
                    } else {
                        (l.ends[1], l.ends[0])
                    };
                    if edge_seen.insert(key, ()).is_some() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `true` when the graph has no loops, no semi-edges, and no parallel
    /// edges.
    pub fn is_simple(&self) -> bool {
        self.links.iter().all(|l| l.kind == LinkKind::Edge) && self.is_semi_simple()
    }

    /// Human-readable identifier for a link in error messages: its label if
    /// present, else `#index`.
    pub fn link_display(&self, id: LinkId) -> String {
        match &self.links[id.index()].label {
            Some(l) => l.clone(),
            None => format!("#{}", id.0),
        }
    }
}
