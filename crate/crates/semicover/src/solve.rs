//! Exhaustive solvers: cover existence/enumeration, proper edge coloring,
//! and graph homomorphism.
//!
//! The cover solver is a backtracking search over two decision kinds —
//! guest-vertex images and guest-link images — with forced propagation:
//! once both endpoints of a guest link are placed, its image candidates are
//! computed from remaining slot capacity, and links with a unique candidate
//! are assigned immediately.  Pruning uses the joint equitable partition
//! (a guest vertex can only land on a host vertex in the same class, and
//! per-class counts must scale by the fold), fiber-size caps, per-kind
//! feasibility, and forward checking.  For plain existence queries,
//! untouched host links that are mutually swappable (same kind, same
//! endpoints, nothing assigned to either) are collapsed to one candidate;
//! this is disabled during enumeration so counts stay exact.
//!
//! Every verdict is deterministic: data structures iterate in id order and
//! the search is single-threaded.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::analysis;
use crate::cover::{self, CoverMap};
use crate::graph::{Graph, LinkId, LinkKind, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("host graph is empty")]
    EmptyHost,
    #[error("guest graph is empty")]
    EmptyGuest,
    #[error("host graph is disconnected; solve per component and combine")]
    DisconnectedHost,
    #[error("edge coloring is defined on loop-free graphs")]
    LoopsForbidden,
    #[error("edge coloring is defined on graphs without semi-edges")]
    SemiEdgesForbidden,
    #[error("homomorphism search requires simple graphs")]
    NotSimple,
    #[error("bad seed assignment: {0}")]
    BadSeed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub find_all: bool,
    /// 0 means unlimited.  Counts every assignment made (branched, forced,
    /// and seeded alike).
    pub node_limit: u64,
    /// Accepted for interface stability; the solver is deterministic either
    /// way.
    pub deterministic_order: bool,
    /// Restrict the very first vertex branch to one host vertex per
    /// automorphism orbit.  Sound for existence; incompatible with
    /// `find_all` (ignored there).  Off by default.
    pub orbit_break: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            find_all: false,
            node_limit: 0,
            deterministic_order: true,
            orbit_break: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Found(CoverMap),
    Unsat,
    LimitExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub outcome: SolveOutcome,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllCoversReport {
    pub covers: Vec<CoverMap>,
    /// `false` when the node limit cut enumeration short.
    pub complete: bool,
    pub nodes: u64,
}

#[derive(PartialEq)]
enum Flow {
    Continue,
    Stop,
}

struct Searcher<'a> {
    guest: &'a Graph,
    host: &'a Graph,
    k: usize,
    gclass: Vec<usize>,
    host_by_class: BTreeMap<usize, Vec<VertexId>>,
    class_counts_ok: bool,

    g_loop_count: Vec<usize>,
    g_semi_count: Vec<usize>,
    g_nbrs: Vec<Vec<VertexId>>,
    g_edge_mult: BTreeMap<(u32, u32), usize>,

    h_loops_at: Vec<Vec<LinkId>>,
    h_semis_at: Vec<Vec<LinkId>>,
    h_edges_between: BTreeMap<(u32, u32), Vec<LinkId>>,
    h_caps: Vec<u8>,
    nhl: usize,

    vassign: Vec<Option<VertexId>>,
    lassign: Vec<Option<LinkId>>,
    fiber_count: Vec<usize>,
    load: Vec<u8>,
    hl_used: Vec<u32>,
    assigned_nbrs: Vec<usize>,
    pending: BTreeSet<LinkId>,
    unassigned_v: usize,
    unassigned_l: usize,

    nodes: u64,
    node_limit: u64,
    aborted: bool,
    find_all: bool,
    interchange: bool,
    /// Locally injective maps instead of covers: no fold, no fiber caps,
    /// no class pruning; capacity bookkeeping stays.
    partial: bool,
    results: Vec<CoverMap>,
    branched_yet: bool,
    orbit_rep: Option<Vec<bool>>,
}

enum Branch {
    Dead,
    Link(LinkId, Vec<LinkId>),
    Vertex(VertexId, Vec<VertexId>),
}

impl<'a> Searcher<'a> {
    fn new(
        guest: &'a Graph,
        host: &'a Graph,
        opts: &SolveOptions,
        partial: bool,
    ) -> Result<Self, SolveError> {
        if host.vertex_count() == 0 {
            return Err(SolveError::EmptyHost);
        }
        if guest.vertex_count() == 0 {
            return Err(SolveError::EmptyGuest);
        }
        if !analysis::is_connected(host) {
            return Err(SolveError::DisconnectedHost);
        }
        let ng = guest.vertex_count();
        let nh = host.vertex_count();
        let nhl = host.link_count();
        let (k, gclass, host_by_class, class_counts_ok) = if partial {
            // Locally injective maps have no fold and no degree constraints;
            // every host vertex is a candidate for every guest vertex.
            let all: Vec<VertexId> = host.vertices().collect();
            (usize::MAX, vec![0usize; ng], BTreeMap::from([(0usize, all)]), true)
        } else {
            let (gclass, hclass) = analysis::joint_classes(guest, host);
            let mut host_by_class: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
            for w in host.vertices() {
                host_by_class.entry(hclass[w.index()]).or_default().push(w);
            }
            // Per-class count feasibility: guest count must equal fold × host
            // count in every joint class.
            let k = if ng % nh == 0 { ng / nh } else { 0 };
            let mut class_counts_ok = k > 0;
            if class_counts_ok {
                let mut gc: BTreeMap<usize, usize> = BTreeMap::new();
                for v in guest.vertices() {
                    *gc.entry(gclass[v.index()]).or_insert(0) += 1;
                }
                for (c, n) in &gc {
                    let hn = host_by_class.get(c).map_or(0, Vec::len);
                    if *n != k * hn {
                        class_counts_ok = false;
                    }
                }
            }
            (k, gclass, host_by_class, class_counts_ok)
        };

        let mut g_loop_count = vec![0usize; ng];
        let mut g_semi_count = vec![0usize; ng];
        let mut g_edge_mult: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        let mut g_nbr_sets: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); ng];
        for l in guest.links() {
            match l.kind {
                LinkKind::Loop => g_loop_count[l.ends[0].index()] += 1,
                LinkKind::SemiEdge => g_semi_count[l.ends[0].index()] += 1,
                LinkKind::Edge => {
                    let (a, b) = (l.ends[0], l.ends[1]);
                    let key = if a <= b { (a.0, b.0) } else { (b.0, a.0) };
                    *g_edge_mult.entry(key).or_insert(0) += 1;
                    g_nbr_sets[a.index()].insert(b);
                    g_nbr_sets[b.index()].insert(a);
                }
            }
        }
        let g_nbrs: Vec<Vec<VertexId>> = g_nbr_sets
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();

        let mut h_loops_at = vec![Vec::new(); nh];
        let mut h_semis_at = vec![Vec::new(); nh];
        let mut h_edges_between: BTreeMap<(u32, u32), Vec<LinkId>> = BTreeMap::new();
        let mut h_caps = vec![0u8; nhl];
        for l in host.links() {
            match l.kind {
                LinkKind::Loop => {
                    h_loops_at[l.ends[0].index()].push(l.id);
                    h_caps[l.id.index()] = 2;
                }
                LinkKind::SemiEdge => {
                    h_semis_at[l.ends[0].index()].push(l.id);
                    h_caps[l.id.index()] = 1;
                }
                LinkKind::Edge => {
                    let (a, b) = (l.ends[0], l.ends[1]);
                    let key = if a <= b { (a.0, b.0) } else { (b.0, a.0) };
                    h_edges_between.entry(key).or_default().push(l.id);
                    h_caps[l.id.index()] = 1;
                }
            }
        }

        Ok(Searcher {
            guest,
            host,
            k,
            gclass,
            host_by_class,
            class_counts_ok,
            g_loop_count,
            g_semi_count,
            g_nbrs,
            g_edge_mult,
            h_loops_at,
            h_semis_at,
            h_edges_between,
            h_caps,
            nhl,
            vassign: vec![None; ng],
            lassign: vec![None; guest.link_count()],
            fiber_count: vec![0; nh],
            load: vec![0; ng * nhl.max(1)],
            hl_used: vec![0; nhl],
            assigned_nbrs: vec![0; ng],
            pending: BTreeSet::new(),
            unassigned_v: ng,
            unassigned_l: guest.link_count(),
            nodes: 0,
            node_limit: opts.node_limit,
            aborted: false,
            find_all: opts.find_all,
            interchange: !opts.find_all && !partial,
            partial,
            results: Vec::new(),
            branched_yet: false,
            orbit_rep: None,
        })
    }

    fn load_at(&self, v: VertexId, hl: LinkId) -> u8 {
        self.load[v.index() * self.nhl + hl.index()]
    }

    fn bump_load(&mut self, v: VertexId, hl: LinkId, delta: i8) {
        let cell = &mut self.load[v.index() * self.nhl + hl.index()];
        *cell = (*cell as i8 + delta) as u8;
    }

    /// Count an assignment toward the node budget; false = limit hit.
    fn bump_node(&mut self) -> bool {
        self.nodes += 1;
        if self.node_limit > 0 && self.nodes > self.node_limit {
            self.aborted = true;
            return false;
        }
        true
    }

    fn assign_vertex(&mut self, v: VertexId, w: VertexId) -> Vec<LinkId> {
        debug_assert!(self.vassign[v.index()].is_none());
        self.vassign[v.index()] = Some(w);
        self.fiber_count[w.index()] += 1;
        self.unassigned_v -= 1;
        for &x in &self.g_nbrs[v.index()] {
            self.assigned_nbrs[x.index()] += 1;
        }
        let mut delta = Vec::new();
        for s in self.guest.slots(v) {
            let l = self.guest.link(s.link);
            if self.lassign[l.id.index()].is_some() {
                continue;
            }
            let other = l.other_end(v);
            if self.vassign[other.index()].is_some() && !self.pending.contains(&l.id) {
                self.pending.insert(l.id);
                delta.push(l.id);
            }
        }
        delta
    }

    fn undo_vertex(&mut self, v: VertexId, delta: Vec<LinkId>) {
        for l in delta {
            self.pending.remove(&l);
        }
        for &x in &self.g_nbrs[v.index()] {
            self.assigned_nbrs[x.index()] -= 1;
        }
        let w = self.vassign[v.index()].take().expect("was assigned");
        self.fiber_count[w.index()] -= 1;
        self.unassigned_v += 1;
    }

    fn assign_link(&mut self, l: LinkId, hl: LinkId) {
        debug_assert!(self.lassign[l.index()].is_none());
        let was_pending = self.pending.remove(&l);
        debug_assert!(was_pending);
        self.lassign[l.index()] = Some(hl);
        self.hl_used[hl.index()] += 1;
        self.unassigned_l -= 1;
        let link = self.guest.link(l);
        let ends: &[u8] = match link.kind {
            LinkKind::SemiEdge => &[0],
            _ => &[0, 1],
        };
        for &e in ends {
            self.bump_load(link.end(e), hl, 1);
        }
    }

    fn undo_link(&mut self, l: LinkId) {
        let hl = self.lassign[l.index()].take().expect("was assigned");
        self.hl_used[hl.index()] -= 1;
        self.unassigned_l += 1;
        let link = self.guest.link(l);
        let ends: &[u8] = match link.kind {
            LinkKind::SemiEdge => &[0],
            _ => &[0, 1],
        };
        for &e in ends {
            self.bump_load(link.end(e), hl, -1);
        }
        self.pending.insert(l);
    }

    /// Host-link candidates for a pending guest link (both endpoints
    /// assigned), respecting remaining per-vertex slot capacity.
    fn link_candidates(&self, l: LinkId, collapse: bool) -> Vec<LinkId> {
        let link = self.guest.link(l);
        let fu = self.vassign[link.ends[0].index()].expect("pending");
        let fv = self.vassign[link.ends[1].index()].expect("pending");
        let mut base: Vec<LinkId> = Vec::new();
        match link.kind {
            LinkKind::Edge => {
                if fu != fv {
                    let key = if fu <= fv { (fu.0, fv.0) } else { (fv.0, fu.0) };
                    if let Some(es) = self.h_edges_between.get(&key) {
                        base.extend(es.iter().copied());
                    }
                } else {
                    base.extend(self.h_loops_at[fu.index()].iter().copied());
                    base.extend(self.h_semis_at[fu.index()].iter().copied());
                }
            }
            LinkKind::Loop => base.extend(self.h_loops_at[fu.index()].iter().copied()),
            LinkKind::SemiEdge => base.extend(self.h_semis_at[fu.index()].iter().copied()),
        }
        // Per-end demand on the host link's capacity at each guest vertex.
        let mut out: Vec<LinkId> = Vec::new();
        for hl in base {
            let cap = self.h_caps[hl.index()];
            let fits = match link.kind {
                LinkKind::Loop => self.load_at(link.ends[0], hl) + 2 <= cap,
                LinkKind::SemiEdge => self.load_at(link.ends[0], hl) < cap,
                LinkKind::Edge => {
                    self.load_at(link.ends[0], hl) < cap && self.load_at(link.ends[1], hl) < cap
                }
            };
            if fits {
                out.push(hl);
            }
        }
        if collapse && self.interchange {
            // Untouched host links with identical kind and endpoints are
            // swappable by a host automorphism fixing everything assigned
            // so far; keep the smallest untouched one per group.
            let mut kept: Vec<LinkId> = Vec::new();
            let mut seen_groups: BTreeSet<(u8, u32, u32)> = BTreeSet::new();
            for hl in out {
                if self.hl_used[hl.index()] > 0 {
                    kept.push(hl);
                    continue;
                }
                let h = self.host.link(hl);
                let kind_tag = match h.kind {
                    LinkKind::Edge => 0u8,
                    LinkKind::Loop => 1,
                    LinkKind::SemiEdge => 2,
                };
                let (a, b) = (h.ends[0].0.min(h.ends[1].0), h.ends[0].0.max(h.ends[1].0));
                if seen_groups.insert((kind_tag, a, b)) {
                    kept.push(hl);
                }
            }
            return kept;
        }
        out
    }

    /// Host-vertex candidates for an unassigned guest vertex.
    fn vertex_candidates(&self, v: VertexId) -> Vec<VertexId> {
        let Some(hosts) = self.host_by_class.get(&self.gclass[v.index()]) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        'host: for &w in hosts {
            if self.fiber_count[w.index()] >= self.k {
                continue;
            }
            if self.g_loop_count[v.index()] > self.h_loops_at[w.index()].len()
                || self.g_semi_count[v.index()] > self.h_semis_at[w.index()].len()
            {
                continue;
            }
            // Multi-edge compatibility with every assigned neighbor.
            for &x in &self.g_nbrs[v.index()] {
                let Some(fx) = self.vassign[x.index()] else {
                    continue;
                };
                let key = if v <= x { (v.0, x.0) } else { (x.0, v.0) };
                let need = self.g_edge_mult[&key];
                let avail = if w != fx {
                    let hkey = if w <= fx { (w.0, fx.0) } else { (fx.0, w.0) };
                    self.h_edges_between
                        .get(&hkey)
                        .map_or(0, |es| {
                            es.iter().filter(|&&e| self.load_at(x, e) == 0).count()
                        })
                } else {
                    let loops: usize = self.h_loops_at[w.index()]
                        .iter()
                        .map(|&lo| (2 - self.load_at(x, lo)) as usize)
                        .sum();
                    let semis: usize = self.h_semis_at[w.index()]
                        .iter()
                        .filter(|&&s| self.load_at(x, s) == 0)
                        .count();
                    loops + semis
                };
                if need > avail {
                    continue 'host;
                }
            }
            out.push(w);
        }
        out
    }

    /// Force all uniquely-determined pending links; false on a dead end.
    /// Forced assignments are recorded in `trail` for undoing.
    fn propagate(&mut self, trail: &mut Vec<LinkId>) -> bool {
        loop {
            let mut forced: Option<(LinkId, LinkId)> = None;
            for &l in &self.pending {
                let cands = self.link_candidates(l, false);
                match cands.len() {
                    0 => return false,
                    1 => {
                        forced = Some((l, cands[0]));
                        break;
                    }
                    _ => {}
                }
            }
            match forced {
                None => return true,
                Some((l, hl)) => {
                    if !self.bump_node() {
                        return false;
                    }
                    self.assign_link(l, hl);
                    trail.push(l);
                }
            }
        }
    }

    /// After placing `v`, every unassigned neighbor must keep at least one
    /// host candidate.
    fn forward_check(&self, v: VertexId) -> bool {
        for &x in &self.g_nbrs[v.index()] {
            if self.vassign[x.index()].is_none() && self.vertex_candidates(x).is_empty() {
                return false;
            }
        }
        true
    }

    fn pick_branch(&mut self) -> Branch {
        if !self.pending.is_empty() {
            let mut best: Option<(usize, LinkId, Vec<LinkId>)> = None;
            for &l in &self.pending {
                let cands = self.link_candidates(l, true);
                if cands.is_empty() {
                    return Branch::Dead;
                }
                if best.as_ref().map_or(true, |(n, _, _)| cands.len() < *n) {
                    let n = cands.len();
                    best = Some((n, l, cands));
                }
            }
            let (_, l, cands) = best.expect("pending nonempty");
            return Branch::Link(l, cands);
        }
        // Vertex with the most assigned neighbors, ties by id.
        let mut pick: Option<VertexId> = None;
        let mut pick_score = 0usize;
        for v in self.guest.vertices() {
            if self.vassign[v.index()].is_some() {
                continue;
            }
            let score = self.assigned_nbrs[v.index()];
            if pick.is_none() || score > pick_score {
                pick = Some(v);
                pick_score = score;
            }
        }
        let Some(v) = pick else {
            return Branch::Dead;
        };
        let mut cands = self.vertex_candidates(v);
        if !self.branched_yet {
            if let Some(rep) = &self.orbit_rep {
                cands.retain(|w| rep[w.index()]);
            }
        }
        Branch::Vertex(v, cands)
    }

    fn record_solution(&mut self) {
        let mut f = CoverMap::default();
        for v in self.guest.vertices() {
            f.vertex_map.insert(v, self.vassign[v.index()].unwrap());
        }
        for l in self.guest.link_ids() {
            f.link_map.insert(l, self.lassign[l.index()].unwrap());
        }
        if self.partial {
            debug_assert!(
                cover::check_partial_cover(self.guest, self.host, &f)
                    .map(|r| r.valid)
                    .unwrap_or(false),
                "solver produced an invalid locally injective map"
            );
        } else {
            f.loop_sides = cover::derive_loop_sides(self.guest, self.host, &f)
                .expect("solver output has valid fibers");
            debug_assert!(
                cover::check_cover(self.guest, self.host, &f)
                    .map(|r| r.valid)
                    .unwrap_or(false),
                "solver produced an invalid cover"
            );
        }
        self.results.push(f);
    }

    fn search(&mut self) -> Flow {
        if self.unassigned_v == 0 && self.unassigned_l == 0 {
            self.record_solution();
            return if self.find_all { Flow::Continue } else { Flow::Stop };
        }
        match self.pick_branch() {
            Branch::Dead => Flow::Continue,
            Branch::Link(l, cands) => {
                self.branched_yet = true;
                for hl in cands {
                    if !self.bump_node() {
                        return Flow::Stop;
                    }
                    self.assign_link(l, hl);
                    let mut trail = Vec::new();
                    let ok = self.propagate(&mut trail);
                    let flow = if self.aborted {
                        Flow::Stop
                    } else if ok {
                        self.search()
                    } else {
                        Flow::Continue
                    };
                    for &t in trail.iter().rev() {
                        self.undo_link(t);
                    }
                    self.undo_link(l);
                    if flow == Flow::Stop {
                        return Flow::Stop;
                    }
                }
                Flow::Continue
            }
            Branch::Vertex(v, cands) => {
                self.branched_yet = true;
                for w in cands {
                    if !self.bump_node() {
                        return Flow::Stop;
                    }
                    let delta = self.assign_vertex(v, w);
                    let mut trail = Vec::new();
                    let ok = self.propagate(&mut trail) && !self.aborted && self.forward_check(v);
                    let flow = if self.aborted {
                        Flow::Stop
                    } else if ok {
                        self.search()
                    } else {
                        Flow::Continue
                    };
                    for &t in trail.iter().rev() {
                        self.undo_link(t);
                    }
                    self.undo_vertex(v, delta);
                    if flow == Flow::Stop {
                        return Flow::Stop;
                    }
                }
                Flow::Continue
            }
        }
    }

    /// Apply seed assignments (with propagation); false = contradiction.
    fn apply_seeds(
        &mut self,
        vertex_seeds: &[(VertexId, VertexId)],
        link_seeds: &[(LinkId, LinkId)],
    ) -> Result<bool, SolveError> {
        for &(v, w) in vertex_seeds {
            if v.index() >= self.guest.vertex_count() || w.index() >= self.host.vertex_count() {
                return Err(SolveError::BadSeed(format!("{v} -> {w} out of range")));
            }
            if let Some(cur) = self.vassign[v.index()] {
                if cur == w {
                    continue;
                }
                return Ok(false);
            }
            if !self.vertex_candidates(v).contains(&w) {
                return Ok(false);
            }
            if !self.bump_node() {
                return Ok(false);
            }
            self.assign_vertex(v, w);
            let mut trail = Vec::new();
            if !self.propagate(&mut trail) || !self.forward_check(v) {
                return Ok(false);
            }
        }
        for &(l, hl) in link_seeds {
            if l.index() >= self.guest.link_count() || hl.index() >= self.host.link_count() {
                return Err(SolveError::BadSeed(format!("{l} -> {hl} out of range")));
            }
            if let Some(cur) = self.lassign[l.index()] {
                if cur == hl {
                    continue;
                }
                return Ok(false);
            }
            if !self.pending.contains(&l) {
                return Err(SolveError::BadSeed(format!(
                    "link seed {l} needs both endpoints vertex-seeded first"
                )));
            }
            if !self.link_candidates(l, false).contains(&hl) {
                return Ok(false);
            }
            if !self.bump_node() {
                return Ok(false);
            }
            self.assign_link(l, hl);
            let mut trail = Vec::new();
            if !self.propagate(&mut trail) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn run(&mut self) {
        if !self.class_counts_ok {
            return;
        }
        self.search();
    }
}

/// Vertex orbits of the host under its automorphism group, computed by
/// enumerating fold-1 self-covers.  `true` marks the smallest member of
/// each orbit.
fn host_orbit_reps(host: &Graph) -> Result<Vec<bool>, SolveError> {
    let opts = SolveOptions {
        find_all: true,
        node_limit: 2_000_000,
        ..SolveOptions::default()
    };
    let all = solve_cover_all(host, host, &opts)?;
    let n = host.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    if all.complete {
        for f in &all.covers {
            for (v, w) in &f.vertex_map {
                let (a, b) = (find(&mut parent, v.index()), find(&mut parent, w.index()));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut rep = vec![false; n];
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for x in 0..n {
        let r = find(&mut parent, x);
        if seen.insert(r) {
            rep[x] = true;
        }
    }
    Ok(rep)
}

/// Does the guest cover the host?  Returns the first certificate found, an
/// exhaustive refutation, or a limit verdict, together with the node count.
pub fn solve_cover(
    guest: &Graph,
    host: &Graph,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    solve_cover_seeded(guest, host, &[], &[], opts)
}

/// [`solve_cover`] with pre-pinned vertex and link images.  Link seeds
/// require both endpoint vertices seeded first.
pub fn solve_cover_seeded(
    guest: &Graph,
    host: &Graph,
    vertex_seeds: &[(VertexId, VertexId)],
    link_seeds: &[(LinkId, LinkId)],
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    let mut s = Searcher::new(guest, host, opts, false)?;
    if opts.orbit_break && !opts.find_all && vertex_seeds.is_empty() && link_seeds.is_empty() {
        s.orbit_rep = Some(host_orbit_reps(host)?);
    }
    if !s.class_counts_ok {
        return Ok(SolveReport {
            outcome: SolveOutcome::Unsat,
            nodes: 0,
        });
    }
    let seeded_ok = s.apply_seeds(vertex_seeds, link_seeds)?;
    if seeded_ok {
        s.search();
    }
    let outcome = if let Some(f) = s.results.into_iter().next() {
        SolveOutcome::Found(f)
    } else if s.aborted {
        SolveOutcome::LimitExceeded
    } else {
        SolveOutcome::Unsat
    };
    Ok(SolveReport {
        outcome,
        nodes: s.nodes,
    })
}

/// Enumerate all covers (distinct vertex+link maps; loop sides are derived
/// canonically, not enumerated).
pub fn solve_cover_all(
    guest: &Graph,
    host: &Graph,
    opts: &SolveOptions,
) -> Result<AllCoversReport, SolveError> {
    let all_opts = SolveOptions {
        find_all: true,
        orbit_break: false,
        ..*opts
    };
    let mut s = Searcher::new(guest, host, &all_opts, false)?;
    s.run();
    Ok(AllCoversReport {
        covers: s.results,
        complete: !s.aborted,
        nodes: s.nodes,
    })
}

/// Enumerate all locally injective total maps (partial covering
/// projections) from the guest into the host: incidences and link kinds are
/// preserved and no two links sharing a guest vertex share a host slot, but
/// host slots may go unused, so there is no fold and no fiber-size
/// constraint.  Loop-side data is empty (none of the intended hosts carry
/// loops; sides are a strict-cover notion).
pub fn solve_partial_cover_all(
    guest: &Graph,
    host: &Graph,
    opts: &SolveOptions,
) -> Result<AllCoversReport, SolveError> {
    let all_opts = SolveOptions {
        find_all: true,
        orbit_break: false,
        ..*opts
    };
    let mut s = Searcher::new(guest, host, &all_opts, true)?;
    s.run();
    Ok(AllCoversReport {
        covers: s.results,
        complete: !s.aborted,
        nodes: s.nodes,
    })
}

// ---- edge coloring ----

/// Proper k-edge-coloring by exhaustive backtracking, or `None` after
/// exhaustive refutation.  Colors are `0..k`.  Parallel edges are allowed
/// (they must receive distinct colors); loops and semi-edges are rejected.
pub fn solve_edge_coloring(
    g: &Graph,
    k: usize,
) -> Result<Option<BTreeMap<LinkId, usize>>, SolveError> {
    if g.links().any(|l| l.kind == LinkKind::Loop) {
        return Err(SolveError::LoopsForbidden);
    }
    if g.links().any(|l| l.kind == LinkKind::SemiEdge) {
        return Err(SolveError::SemiEdgesForbidden);
    }
    if g.vertices().any(|v| g.degree(v) > k) {
        return Ok(None);
    }
    // Order edges so each one touches an earlier edge when possible.
    let m = g.link_count();
    let mut order: Vec<LinkId> = Vec::with_capacity(m);
    let mut placed = vec![false; m];
    let mut frontier: std::collections::VecDeque<VertexId> = std::collections::VecDeque::new();
    for start in g.link_ids() {
        if placed[start.index()] {
            continue;
        }
        placed[start.index()] = true;
        order.push(start);
        frontier.push_back(g.link(start).ends[0]);
        frontier.push_back(g.link(start).ends[1]);
        while let Some(v) = frontier.pop_front() {
            for s in g.slots(v) {
                if !placed[s.link.index()] {
                    placed[s.link.index()] = true;
                    order.push(s.link);
                    frontier.push_back(g.link(s.link).other_end(v));
                }
            }
        }
    }
    let mut color: Vec<usize> = vec![usize::MAX; m];
    let mut used_at: Vec<u64> = vec![0; g.vertex_count()];
    // Canonical symmetry breaking: a new color may only be max-used-so-far
    // + 1, so each coloring is enumerated once up to color permutation.
    fn rec(
        g: &Graph,
        order: &[LinkId],
        i: usize,
        k: usize,
        max_used: usize,
        color: &mut Vec<usize>,
        used_at: &mut Vec<u64>,
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let l = g.link(order[i]);
        let (u, v) = (l.ends[0], l.ends[1]);
        let cap = k.min(max_used + 1);
        for c in 0..cap {
            let bit = 1u64 << c;
            if used_at[u.index()] & bit != 0 || used_at[v.index()] & bit != 0 {
                continue;
            }
            color[order[i].index()] = c;
            used_at[u.index()] |= bit;
            used_at[v.index()] |= bit;
            let nm = max_used.max(c + 1);
            if rec(g, order, i + 1, k, nm, color, used_at) {
                return true;
            }
            used_at[u.index()] &= !bit;
            used_at[v.index()] &= !bit;
            color[order[i].index()] = usize::MAX;
        }
        false
    }
    if rec(g, &order, 0, k, 0, &mut color, &mut used_at) {
        Ok(Some(
            g.link_ids().map(|l| (l, color[l.index()])).collect(),
        ))
    } else {
        Ok(None)
    }
}

/// Independent validity check for an edge coloring.
pub fn verify_edge_coloring(g: &Graph, k: usize, coloring: &BTreeMap<LinkId, usize>) -> bool {
    for l in g.links() {
        if l.kind != LinkKind::Edge {
            return false;
        }
        match coloring.get(&l.id) {
            Some(&c) if c < k => {}
            _ => return false,
        }
    }
    for v in g.vertices() {
        let mut seen = BTreeSet::new();
        for s in g.slots(v) {
            if !seen.insert(coloring[&s.link]) {
                return false;
            }
        }
    }
    true
}

// ---- homomorphism ----

/// Adjacency-preserving vertex map between simple graphs, found by
/// exhaustive backtracking with a fewest-candidates-first heuristic.
pub fn solve_homomorphism(
    g: &Graph,
    h: &Graph,
) -> Result<Option<BTreeMap<VertexId, VertexId>>, SolveError> {
    if !g.is_simple() || !h.is_simple() {
        return Err(SolveError::NotSimple);
    }
    let n = g.vertex_count();
    let nh = h.vertex_count();
    if n > 0 && nh == 0 {
        return Ok(None);
    }
    let h_adj: Vec<BTreeSet<VertexId>> = h
        .vertices()
        .map(|v| h.edge_neighbors(v).into_iter().collect())
        .collect();
    let g_adj: Vec<Vec<VertexId>> = g.vertices().map(|v| g.edge_neighbors(v)).collect();
    let mut assign: Vec<Option<VertexId>> = vec![None; n];

    fn candidates(
        v: usize,
        assign: &[Option<VertexId>],
        g_adj: &[Vec<VertexId>],
        h_adj: &[BTreeSet<VertexId>],
        nh: usize,
    ) -> Vec<VertexId> {
        (0..nh as u32)
            .map(VertexId)
            .filter(|&w| {
                g_adj[v].iter().all(|x| match assign[x.index()] {
                    Some(fx) => h_adj[w.index()].contains(&fx),
                    None => true,
                })
            })
            .collect()
    }

    fn rec(
        assign: &mut Vec<Option<VertexId>>,
        g_adj: &[Vec<VertexId>],
        h_adj: &[BTreeSet<VertexId>],
        nh: usize,
    ) -> bool {
        // Fewest candidates first, ties by id.
        let mut pick: Option<(usize, Vec<VertexId>)> = None;
        for v in 0..assign.len() {
            if assign[v].is_some() {
                continue;
            }
            let c = candidates(v, assign, g_adj, h_adj, nh);
            let better = pick.as_ref().map_or(true, |(_, pc)| c.len() < pc.len());
            if better {
                let empty = c.is_empty();
                pick = Some((v, c));
                if empty {
                    break;
                }
            }
        }
        let Some((v, cands)) = pick else {
            return true;
        };
        for w in cands {
            assign[v] = Some(w);
            if rec(assign, g_adj, h_adj, nh) {
                return true;
            }
            assign[v] = None;
        }
        false
    }

    if rec(&mut assign, &g_adj, &h_adj, nh) {
        Ok(Some(
            g.vertices()
                .map(|v| (v, assign[v.index()].unwrap()))
                .collect(),
        ))
    } else {
        Ok(None)
    }
}

/// Independent validity check for a homomorphism between simple graphs.
pub fn verify_homomorphism(g: &Graph, h: &Graph, f: &BTreeMap<VertexId, VertexId>) -> bool {
    for v in g.vertices() {
        if !f.contains_key(&v) {
            return false;
        }
    }
    for l in g.links() {
        if l.kind != LinkKind::Edge {
            return false;
        }
        let (fu, fv) = (f[&l.ends[0]], f[&l.ends[1]]);
        if fu == fv || h.edges_between(fu, fv).is_empty() {
            return false;
        }
    }
    true
}
