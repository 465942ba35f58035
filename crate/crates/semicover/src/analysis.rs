//! Structural analysis: connectivity, bipartiteness, girth, tree checks,
//! degree refinement (equitable partitions), and the pendant-path pattern
//! search used by the odd-path machinery.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Graph, LinkId, LinkKind, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("degree refinement requires a connected graph")]
    Disconnected,
}

/// Summary of basic structural predicates.
///
/// Conventions: the empty graph is connected and bipartite with no girth.
/// `bipartite` demands that *all* links respect the bipartition, so any loop
/// or semi-edge (which starts and ends in one part) defeats it.  `is_tree`
/// means connected and acyclic; semi-edges never lie on cycles, so a tree may
/// carry them.  `girth` counts a loop as a 1-cycle and a parallel pair as a
/// 2-cycle.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct StructuralReport {
    pub connected: bool,
    pub bipartite: bool,
    pub simple: bool,
    pub regular_degree: Option<usize>,
    pub is_tree: bool,
    pub girth: Option<usize>,
}

/// Connected components over ordinary edges (loops and semi-edges do not
/// join anything).  Returns a component index per vertex.
pub fn components(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for start in g.vertices() {
        if comp[start.index()] != usize::MAX {
            continue;
        }
        comp[start.index()] = next;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for s in g.slots(v) {
                let l = g.link(s.link);
                if l.kind == LinkKind::Edge {
                    let w = l.other_end(v);
                    if comp[w.index()] == usize::MAX {
                        comp[w.index()] = next;
                        stack.push(w);
                    }
                }
            }
        }
        next += 1;
    }
    comp
}

pub fn is_connected(g: &Graph) -> bool {
    let comp = components(g);
    comp.iter().all(|&c| c == 0)
}

fn two_colorable(g: &Graph) -> bool {
    let n = g.vertex_count();
    let mut color = vec![u8::MAX; n];
    for start in 0..n {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut stack = vec![VertexId(start as u32)];
        while let Some(v) = stack.pop() {
            let cv = color[v.index()];
            for s in g.slots(v) {
                let l = g.link(s.link);
                if l.kind == LinkKind::Edge {
                    let w = l.other_end(v);
                    if color[w.index()] == u8::MAX {
                        color[w.index()] = 1 - cv;
                        stack.push(w);
                    } else if color[w.index()] == cv {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Girth of the multigraph: 1 if any loop, else 2 if any parallel pair, else
/// the shortest simple cycle over ordinary edges (semi-edges never lie on
/// cycles).  `None` when acyclic.
pub fn girth(g: &Graph) -> Option<usize> {
    if g.links().any(|l| l.kind == LinkKind::Loop) {
        return Some(1);
    }
    let mut seen: BTreeMap<(VertexId, VertexId), ()> = BTreeMap::new();
    let mut has_parallel = false;
    for l in g.links() {
        if l.kind == LinkKind::Edge {
            let key = if l.ends[0] <= l.ends[1] {
                (l.ends[0], l.ends[1])
            } else {
                (l.ends[1], l.ends[0])
            };
            if seen.insert(key, ()).is_some() {
                has_parallel = true;
            }
        }
    }
    if has_parallel {
        return Some(2);
    }
    // Simple underlying graph now; classic BFS-from-every-root bound.  Track
    // the parent *link* so a tree edge is never reused as a cycle closer.
    let n = g.vertex_count();
    let mut best: Option<usize> = None;
    for root in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent_link = vec![LinkId(u32::MAX); n];
        dist[root] = 0;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(VertexId(root as u32));
        while let Some(v) = queue.pop_front() {
            for s in g.slots(v) {
                let l = g.link(s.link);
                if l.kind != LinkKind::Edge {
                    continue;
                }
                if l.id == parent_link[v.index()] {
                    continue;
                }
                let w = l.other_end(v);
                if dist[w.index()] == usize::MAX {
                    dist[w.index()] = dist[v.index()] + 1;
                    parent_link[w.index()] = l.id;
                    queue.push_back(w);
                } else {
                    let cycle = dist[v.index()] + dist[w.index()] + 1;
                    if best.map_or(true, |b| cycle < b) {
                        best = Some(cycle);
                    }
                }
            }
        }
    }
    best
}

pub fn structural_predicates(g: &Graph) -> StructuralReport {
    let n = g.vertex_count();
    let connected = is_connected(g);
    let has_non_edge = g.links().any(|l| l.kind != LinkKind::Edge);
    let bipartite = !has_non_edge && two_colorable(g);
    let simple = g.is_simple();
    let regular_degree = if n == 0 {
        None
    } else {
        let d0 = g.degree(VertexId(0));
        if g.vertices().all(|v| g.degree(v) == d0) {
            Some(d0)
        } else {
            None
        }
    };
    let girth = girth(g);
    // Connected + (n-1) non-semi links forces acyclicity; any loop or extra
    // edge would push the count past n-1.
    let non_semi = g.links().filter(|l| l.kind != LinkKind::SemiEdge).count();
    let is_tree = n >= 1 && connected && non_semi == n - 1;
    StructuralReport {
        connected,
        bipartite,
        simple,
        regular_degree,
        is_tree,
        girth,
    }
}

// ---- degree refinement ----

/// Equitable-partition result: `classes[i]` lists the vertices of class `i`
/// (classes ordered by smallest member id), and `matrix[i][j]` counts the
/// link-slots a class-`i` vertex sends into class `j`.  Loop slots (two per
/// loop) and semi-edge slots count toward the vertex's own class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementReport {
    pub classes: Vec<Vec<VertexId>>,
    pub matrix: Vec<Vec<usize>>,
}

impl RefinementReport {
    pub fn class_of(&self, v: VertexId) -> usize {
        self.classes
            .iter()
            .position(|c| c.contains(&v))
            .expect("vertex in some class")
    }
}

/// Core partition refinement over an abstract slot-target table:
/// `targets[v]` lists, once per slot at `v`, the vertex that slot counts
/// toward (the far endpoint for an edge slot, `v` itself for loop and
/// semi-edge slots).  Returns a class index per vertex with classes numbered
/// by smallest member.
pub(crate) fn refine_classes(n: usize, targets: &[Vec<usize>]) -> Vec<usize> {
    let mut class = vec![0usize; n];
    let mut class_count = 1usize.min(n.max(1));
    loop {
        // Signature: (old class, count of targets per class).
        let mut sig_of: Vec<(usize, Vec<usize>)> = Vec::with_capacity(n);
        for v in 0..n {
            let mut counts = vec![0usize; class_count];
            for &t in &targets[v] {
                counts[class[t]] += 1;
            }
            sig_of.push((class[v], counts));
        }
        let mut sig_to_new: BTreeMap<&(usize, Vec<usize>), usize> = BTreeMap::new();
        let mut new_class = vec![0usize; n];
        let mut next = 0usize;
        for v in 0..n {
            let sig = &sig_of[v];
            let id = *sig_to_new.entry(sig).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
            new_class[v] = id;
        }
        if next == class_count && new_class == class {
            return class;
        }
        class = new_class;
        class_count = next;
    }
}

pub(crate) fn slot_targets(g: &Graph) -> Vec<Vec<usize>> {
    g.vertices()
        .map(|v| {
            g.slots(v)
                .iter()
                .map(|s| {
                    let l = g.link(s.link);
                    match l.kind {
                        LinkKind::Edge => l.other_end(v).index(),
                        LinkKind::Loop | LinkKind::SemiEdge => v.index(),
                    }
                })
                .collect()
        })
        .collect()
}

pub fn degree_refinement(g: &Graph) -> Result<RefinementReport, AnalysisError> {
    if g.vertex_count() > 0 && !is_connected(g) {
        return Err(AnalysisError::Disconnected);
    }
    let n = g.vertex_count();
    let targets = slot_targets(g);
    let class = refine_classes(n, &targets);
    let class_count = class.iter().max().map_or(0, |m| m + 1);
    let mut classes: Vec<Vec<VertexId>> = vec![Vec::new(); class_count];
    for v in 0..n {
        classes[class[v]].push(VertexId(v as u32));
    }
    let mut matrix = vec![vec![0usize; class_count]; class_count];
    for (i, members) in classes.iter().enumerate() {
        let rep = members[0];
        for &t in &targets[rep.index()] {
            matrix[i][class[t]] += 1;
        }
    }
    Ok(RefinementReport { classes, matrix })
}

/// Equitable partition of the disjoint union of two graphs; used by the
/// cover solver to rule out incompatible vertex images up front.  Returns
/// one class index per guest vertex and per host vertex, drawn from a shared
/// class numbering.
pub(crate) fn joint_classes(guest: &Graph, host: &Graph) -> (Vec<usize>, Vec<usize>) {
    let ng = guest.vertex_count();
    let nh = host.vertex_count();
    let mut targets = slot_targets(guest);
    let host_targets = slot_targets(host);
    for t in host_targets {
        targets.push(t.into_iter().map(|x| x + ng).collect());
    }
    let class = refine_classes(ng + nh, &targets);
    (class[..ng].to_vec(), class[ng..].to_vec())
}

// ---- isomorphism ----

/// Structural isomorphism search (names and labels are ignored).  Returns a
/// vertex bijection `a → b` that preserves link kinds and multiplicities, or
/// `None` after an exhaustive refutation.  Backtracking is pruned by the
/// joint equitable partition, which keeps the search practical for the small
/// graphs this library works with.
pub fn isomorphic(a: &Graph, b: &Graph) -> Option<BTreeMap<VertexId, VertexId>> {
    if a.vertex_count() != b.vertex_count() || a.link_count() != b.link_count() {
        return None;
    }
    let (ca, cb) = joint_classes(a, b);
    let mut count_a: BTreeMap<usize, usize> = BTreeMap::new();
    let mut count_b: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in &ca {
        *count_a.entry(c).or_insert(0) += 1;
    }
    for &c in &cb {
        *count_b.entry(c).or_insert(0) += 1;
    }
    if count_a != count_b {
        return None;
    }

    // Order: rarest class first so forced vertices are placed early.
    let mut order: Vec<VertexId> = a.vertices().collect();
    order.sort_by_key(|v| (count_a[&ca[v.index()]], v.index()));

    let nb = b.vertex_count();
    let mut map: Vec<Option<VertexId>> = vec![None; a.vertex_count()];
    let mut used = vec![false; nb];

    fn compatible(
        a: &Graph,
        b: &Graph,
        map: &[Option<VertexId>],
        v: VertexId,
        w: VertexId,
    ) -> bool {
        if a.loops_at(v).len() != b.loops_at(w).len()
            || a.semis_at(v).len() != b.semis_at(w).len()
        {
            return false;
        }
        for x in a.edge_neighbors(v) {
            if let Some(fx) = map[x.index()] {
                if a.edges_between(v, x).len() != b.edges_between(w, fx).len() {
                    return false;
                }
            }
        }
        true
    }

    fn rec(
        a: &Graph,
        b: &Graph,
        ca: &[usize],
        cb: &[usize],
        order: &[VertexId],
        pos: usize,
        map: &mut Vec<Option<VertexId>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let v = order[pos];
        for w in b.vertices() {
            if used[w.index()] || cb[w.index()] != ca[v.index()] {
                continue;
            }
            if !compatible(a, b, map, v, w) {
                continue;
            }
            map[v.index()] = Some(w);
            used[w.index()] = true;
            if rec(a, b, ca, cb, order, pos + 1, map, used) {
                return true;
            }
            map[v.index()] = None;
            used[w.index()] = false;
        }
        false
    }

    if rec(a, b, &ca, &cb, &order, 0, &mut map, &mut used) {
        Some(
            a.vertices()
                .map(|v| (v, map[v.index()].expect("complete")))
                .collect(),
        )
    } else {
        None
    }
}

// ---- pendant-path pattern ----

/// Witness for the pendant-path pattern: a path `p0 - p1 - p2` whose three
/// vertices each carry a semi-edge, plus one more edge from `p0` to a vertex
/// `pendant` outside the path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternWitness {
    pub path: [VertexId; 3],
    pub pendant: VertexId,
    pub path_edges: [LinkId; 2],
    pub pendant_edge: LinkId,
    pub semis: [LinkId; 3],
}

/// Check that a claimed witness really embeds the pattern in `g`.
pub fn verify_pattern_witness(g: &Graph, w: &PatternWitness) -> bool {
    let [p0, p1, p2] = w.path;
    let mut all = vec![p0, p1, p2, w.pendant];
    all.sort();
    all.dedup();
    if all.len() != 4 {
        return false;
    }
    let edge_joins = |id: LinkId, a: VertexId, b: VertexId| {
        let l = g.link(id);
        l.kind == LinkKind::Edge
            && ((l.ends[0] == a && l.ends[1] == b) || (l.ends[0] == b && l.ends[1] == a))
    };
    if !edge_joins(w.path_edges[0], p0, p1)
        || !edge_joins(w.path_edges[1], p1, p2)
        || !edge_joins(w.pendant_edge, p0, w.pendant)
    {
        return false;
    }
    for (i, &v) in [p0, p1, p2].iter().enumerate() {
        let l = g.link(w.semis[i]);
        if l.kind != LinkKind::SemiEdge || l.ends[0] != v {
            return false;
        }
    }
    true
}

/// For every vertex that lies inside at least one embedding of the
/// pendant-path pattern (in any of the four roles), return one such witness.
pub fn find_pattern_b(g: &Graph) -> BTreeMap<VertexId, PatternWitness> {
    let n = g.vertex_count();
    let mut first_semi: Vec<Option<LinkId>> = vec![None; n];
    for l in g.links() {
        if l.kind == LinkKind::SemiEdge {
            let i = l.ends[0].index();
            if first_semi[i].is_none() {
                first_semi[i] = Some(l.id);
            }
        }
    }
    let first_edge = |a: VertexId, b: VertexId| -> LinkId {
        g.slots(a)
            .iter()
            .map(|s| g.link(s.link))
            .find(|l| l.kind == LinkKind::Edge && l.other_end(a) == b)
            .expect("edge exists")
            .id
    };

    let mut out: BTreeMap<VertexId, PatternWitness> = BTreeMap::new();
    for p1 in g.vertices() {
        if first_semi[p1.index()].is_none() {
            continue;
        }
        let nbrs = g.edge_neighbors(p1);
        for &p0 in &nbrs {
            if first_semi[p0.index()].is_none() {
                continue;
            }
            for &p2 in &nbrs {
                if p2 == p0 || first_semi[p2.index()].is_none() {
                    continue;
                }
                for pendant in g.edge_neighbors(p0) {
                    if pendant == p1 || pendant == p2 || pendant == p0 {
                        continue;
                    }
                    let all_have = [p0, p1, p2, pendant]
                        .iter()
                        .all(|v| out.contains_key(v));
                    if all_have {
                        continue;
                    }
                    let w = PatternWitness {
                        path: [p0, p1, p2],
                        pendant,
                        path_edges: [first_edge(p0, p1), first_edge(p1, p2)],
                        pendant_edge: first_edge(p0, pendant),
                        semis: [
                            first_semi[p0.index()].unwrap(),
                            first_semi[p1.index()].unwrap(),
                            first_semi[p2.index()].unwrap(),
                        ],
                    };
                    debug_assert!(verify_pattern_witness(g, &w));
                    for v in [p0, p1, p2, pendant] {
                        out.entry(v).or_insert_with(|| w.clone());
                    }
                }
            }
        }
    }
    out
}
