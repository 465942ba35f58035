//! Covering projections and their verification.
//!
//! A *cover map* sends guest vertices to host vertices and guest links to
//! host links.  It is a covering projection when incidences and link kinds
//! are respected (semi-edges map onto semi-edges, loops onto loops; an edge
//! maps onto an edge when its endpoint images differ and onto a loop or
//! semi-edge when they coincide) and the fiber over every host link has the
//! right shape:
//!
//! * host edge — preimage is a perfect matching between the endpoint fibers;
//! * host loop — preimage spans its fiber with every fiber vertex lying on
//!   exactly two link incidences (a disjoint union of cycles; lengths 1 and
//!   2 are allowed);
//! * host semi-edge — preimage spans its fiber with every fiber vertex on
//!   exactly one incidence (a disjoint union of edges and semi-edges).
//!
//! The same property can be stated per vertex: the induced map from the
//! slots of `u` to the slots of `f(u)` is a bijection.  Both formulations
//! are implemented independently ([`check_cover`] and
//! [`check_cover_by_slots`]) so they can be played against each other in
//! tests.  For links landing on a host loop the slot formulation needs to
//! know which side of the loop each incidence uses; these side choices are
//! recorded in the map (`loop_sides`) or derived canonically when absent.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::analysis;
use crate::graph::{Graph, LinkId, LinkKind, VertexId};

/// A (claimed) covering projection from a guest graph to a host graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoverMap {
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub link_map: BTreeMap<LinkId, LinkId>,
    /// For a guest link mapped onto a host loop: which side (0 or 1) of the
    /// loop each of the guest link's two ends occupies.  Optional; when
    /// absent for a whole loop fiber, sides are derived canonically.
    pub loop_sides: BTreeMap<LinkId, [u8; 2]>,
}

impl CoverMap {
    /// The identity self-cover of `g`.
    pub fn identity(g: &Graph) -> CoverMap {
        let mut f = CoverMap::default();
        for v in g.vertices() {
            f.vertex_map.insert(v, v);
        }
        for l in g.links() {
            f.link_map.insert(l.id, l.id);
            if l.kind == LinkKind::Loop {
                f.loop_sides.insert(l.id, [0, 1]);
            }
        }
        f
    }

    pub fn image_of_vertex(&self, v: VertexId) -> Option<VertexId> {
        self.vertex_map.get(&v).copied()
    }

    pub fn image_of_link(&self, l: LinkId) -> Option<LinkId> {
        self.link_map.get(&l).copied()
    }
}

/// Hard input errors: the map is not even well-formed for the pair of
/// graphs, as opposed to a well-formed map that fails the covering
/// conditions (which yields a `CheckReport` with `valid = false`).
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoverError {
    #[error("guest vertex {0} has no image")]
    MissingVertexImage(String),
    #[error("guest link {0} has no image")]
    MissingLinkImage(String),
    #[error("map references unknown vertex {0}")]
    UnknownVertex(String),
    #[error("map references unknown link {0}")]
    UnknownLink(String),
    #[error("loop sides given for only part of the fiber of host loop {0}")]
    PartialLoopSides(String),
    #[error("loop side entry for {0} is not 0/1 or names a non-loop image")]
    BadLoopSides(String),
    #[error("operation requires a valid cover, but: {0}")]
    InvalidCover(String),
    #[error("not a path: {0}")]
    NotAPath(String),
    #[error("the given vertex set is not a connected component of the remainder")]
    NotAComponent,
    #[error("host contains a cycle; this check requires an acyclic host")]
    HostNotAcyclic,
    #[error("malformed cover JSON: {0}")]
    BadJson(String),
}

/// Reason codes for covering-condition failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationReason {
    NotIncidencePreserving,
    FiberNotPerfectMatching,
    FiberNotCycleUnion,
    FiberNotMatchingSpanning,
    NotLocallyInjective,
    NotLocallyBijective,
}

impl ViolationReason {
    pub fn code(self) -> &'static str {
        match self {
            ViolationReason::NotIncidencePreserving => "not-incidence-preserving",
            ViolationReason::FiberNotPerfectMatching => "fiber-not-perfect-matching",
            ViolationReason::FiberNotCycleUnion => "fiber-not-cycle-union",
            ViolationReason::FiberNotMatchingSpanning => "fiber-not-matching-spanning",
            ViolationReason::NotLocallyInjective => "not-locally-injective",
            ViolationReason::NotLocallyBijective => "not-locally-bijective",
        }
    }
}

/// Minimal witness of a failed condition: either the guest vertex where a
/// local condition breaks, or the host link whose fiber is malformed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationWitness {
    GuestVertex(VertexId),
    HostLink(LinkId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub reason: ViolationReason,
    pub witness: ViolationWitness,
    pub detail: String,
}

/// Verdict of a cover check.  `fiber_sizes` is always filled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub valid: bool,
    pub violation: Option<Violation>,
    pub fiber_sizes: BTreeMap<VertexId, usize>,
}

impl CheckReport {
    fn ok(fiber_sizes: BTreeMap<VertexId, usize>) -> CheckReport {
        CheckReport {
            valid: true,
            violation: None,
            fiber_sizes,
        }
    }

    fn fail(v: Violation, fiber_sizes: BTreeMap<VertexId, usize>) -> CheckReport {
        CheckReport {
            valid: false,
            violation: Some(v),
            fiber_sizes,
        }
    }
}

// ---- shared validation phases ----

fn validate_totality(guest: &Graph, host: &Graph, f: &CoverMap) -> Result<(), CoverError> {
    for v in guest.vertices() {
        match f.vertex_map.get(&v) {
            None => return Err(CoverError::MissingVertexImage(guest.vertex_name(v).into())),
            Some(h) if h.index() >= host.vertex_count() => {
                return Err(CoverError::UnknownVertex(format!("{h}")));
            }
            _ => {}
        }
    }
    for l in guest.link_ids() {
        match f.link_map.get(&l) {
            None => return Err(CoverError::MissingLinkImage(guest.link_display(l))),
            Some(h) if h.index() >= host.link_count() => {
                return Err(CoverError::UnknownLink(format!("{h}")));
            }
            _ => {}
        }
    }
    for (l, sides) in &f.loop_sides {
        if l.index() >= guest.link_count() {
            return Err(CoverError::UnknownLink(format!("{l}")));
        }
        let img = f.link_map[l];
        if host.link(img).kind != LinkKind::Loop || sides.iter().any(|&s| s > 1) {
            return Err(CoverError::BadLoopSides(guest.link_display(*l)));
        }
    }
    Ok(())
}

/// Host-vertex fibers of the vertex map, including empty ones.
pub fn fibers(guest: &Graph, host: &Graph, f: &CoverMap) -> BTreeMap<VertexId, Vec<VertexId>> {
    let mut out: BTreeMap<VertexId, Vec<VertexId>> =
        host.vertices().map(|h| (h, Vec::new())).collect();
    for v in guest.vertices() {
        if let Some(h) = f.vertex_map.get(&v) {
            out.get_mut(h).expect("validated host vertex").push(v);
        }
    }
    out
}

fn fiber_sizes_of(fibers: &BTreeMap<VertexId, Vec<VertexId>>) -> BTreeMap<VertexId, usize> {
    fibers.iter().map(|(h, vs)| (*h, vs.len())).collect()
}

/// Check kind and incidence preservation of one guest link; returns a
/// violation on failure.
fn incidence_violation(guest: &Graph, host: &Graph, f: &CoverMap) -> Option<Violation> {
    for l in guest.links() {
        let img = host.link(f.link_map[&l.id]);
        let fu = f.vertex_map[&l.ends[0]];
        let fv = f.vertex_map[&l.ends[1]];
        let fail = |detail: String| {
            Some(Violation {
                reason: ViolationReason::NotIncidencePreserving,
                witness: ViolationWitness::GuestVertex(l.ends[0]),
                detail,
            })
        };
        match l.kind {
            LinkKind::SemiEdge => {
                if img.kind != LinkKind::SemiEdge || img.ends[0] != fu {
                    return fail(format!(
                        "semi-edge {} at {} must map to a semi-edge at {}, got {} ({})",
                        guest.link_display(l.id),
                        guest.vertex_name(l.ends[0]),
                        host.vertex_name(fu),
                        host.link_display(img.id),
                        img.kind,
                    ));
                }
            }
            LinkKind::Loop => {
                if img.kind != LinkKind::Loop || img.ends[0] != fu {
                    return fail(format!(
                        "loop {} at {} must map to a loop at {}, got {} ({})",
                        guest.link_display(l.id),
                        guest.vertex_name(l.ends[0]),
                        host.vertex_name(fu),
                        host.link_display(img.id),
                        img.kind,
                    ));
                }
            }
            LinkKind::Edge => {
                if fu != fv {
                    let matches = img.kind == LinkKind::Edge
                        && ((img.ends[0] == fu && img.ends[1] == fv)
                            || (img.ends[0] == fv && img.ends[1] == fu));
                    if !matches {
                        return fail(format!(
                            "edge {} must map to an edge joining {} and {}, got {}",
                            guest.link_display(l.id),
                            host.vertex_name(fu),
                            host.vertex_name(fv),
                            host.link_display(img.id),
                        ));
                    }
                } else {
                    let matches = (img.kind == LinkKind::Loop || img.kind == LinkKind::SemiEdge)
                        && img.ends[0] == fu;
                    if !matches {
                        return fail(format!(
                            "edge {} with both endpoint images at {} must map to a loop or semi-edge there, got {}",
                            guest.link_display(l.id),
                            host.vertex_name(fu),
                            host.link_display(img.id),
                        ));
                    }
                }
            }
        }
    }
    None
}

/// Preimage links of each host link, in guest link order.
fn link_fibers(f: &CoverMap) -> BTreeMap<LinkId, Vec<LinkId>> {
    let mut out: BTreeMap<LinkId, Vec<LinkId>> = BTreeMap::new();
    for (l, img) in &f.link_map {
        out.entry(*img).or_default().push(*l);
    }
    out
}

/// Derive or validate loop-side choices for every host loop.  On success
/// returns a complete side table for all guest links whose image is a loop.
/// Side recording is all-or-nothing per host loop; a half-recorded fiber is
/// an input error.  Pre: incidence preservation and the degree-2 fiber
/// condition already hold.
fn resolve_loop_sides(
    guest: &Graph,
    host: &Graph,
    f: &CoverMap,
) -> Result<Result<BTreeMap<LinkId, [u8; 2]>, Violation>, CoverError> {
    let lf = link_fibers(f);
    let mut resolved: BTreeMap<LinkId, [u8; 2]> = BTreeMap::new();
    for hl in host.links() {
        if hl.kind != LinkKind::Loop {
            continue;
        }
        let pre = lf.get(&hl.id).cloned().unwrap_or_default();
        let recorded = pre.iter().filter(|l| f.loop_sides.contains_key(l)).count();
        if recorded > 0 && recorded < pre.len() {
            return Err(CoverError::PartialLoopSides(host.link_display(hl.id)));
        }
        if recorded == pre.len() && !pre.is_empty() {
            // Validate: every fiber vertex must see side 0 once and side 1
            // once across its incidences.
            let mut seen: BTreeMap<VertexId, [usize; 2]> = BTreeMap::new();
            for &l in &pre {
                let link = guest.link(l);
                let sides = f.loop_sides[&l];
                let ends: &[u8] = match link.kind {
                    LinkKind::SemiEdge => &[0],
                    _ => &[0, 1],
                };
                for &e in ends {
                    let v = link.end(e);
                    seen.entry(v).or_insert([0, 0])[sides[e as usize] as usize] += 1;
                }
            }
            for (v, counts) in seen {
                if counts != [1, 1] {
                    return Ok(Err(Violation {
                        reason: ViolationReason::FiberNotCycleUnion,
                        witness: ViolationWitness::HostLink(hl.id),
                        detail: format!(
                            "recorded sides at {} hit side 0 {} times and side 1 {} times",
                            guest.vertex_name(v),
                            counts[0],
                            counts[1]
                        ),
                    }));
                }
            }
            for &l in &pre {
                resolved.insert(l, f.loop_sides[&l]);
            }
            continue;
        }
        // Derive canonically: decompose the fiber (a disjoint union of
        // cycles) and orient each cycle, giving the tail of each traversed
        // link side 0 and the head side 1.
        let mut incident: BTreeMap<VertexId, Vec<LinkId>> = BTreeMap::new();
        for &l in &pre {
            let link = guest.link(l);
            incident.entry(link.ends[0]).or_default().push(l);
            if link.kind != LinkKind::SemiEdge {
                incident.entry(link.ends[1]).or_default().push(l);
            }
        }
        let mut done: BTreeMap<LinkId, ()> = BTreeMap::new();
        let starts: Vec<VertexId> = incident.keys().copied().collect();
        for start in starts {
            let first = incident[&start]
                .iter()
                .copied()
                .find(|l| !done.contains_key(l));
            let Some(first) = first else { continue };
            let mut at = start;
            let mut l = first;
            loop {
                done.insert(l, ());
                let link = guest.link(l);
                // Orient: we are entering via `at`; a loop's tail end is 0.
                let (tail_end, head_end) = if link.kind == LinkKind::Loop {
                    (0u8, 1u8)
                } else if link.ends[0] == at {
                    (0, 1)
                } else {
                    (1, 0)
                };
                let mut sides = [0u8; 2];
                sides[tail_end as usize] = 0;
                sides[head_end as usize] = 1;
                resolved.insert(l, sides);
                let next_v = link.end(head_end);
                if next_v == start && link.kind != LinkKind::Loop {
                    break;
                }
                if link.kind == LinkKind::Loop {
                    break;
                }
                let next_l = incident[&next_v]
                    .iter()
                    .copied()
                    .find(|x| !done.contains_key(x));
                match next_l {
                    Some(n) => {
                        at = next_v;
                        l = n;
                    }
                    None => break,
                }
            }
        }
    }
    Ok(Ok(resolved))
}

/// Canonical loop-side table for a map whose loop fibers already satisfy
/// the covering conditions (used by the solver to fill in `loop_sides` on
/// extracted certificates).  Recorded sides are kept when present and
/// consistent.
pub fn derive_loop_sides(
    guest: &Graph,
    host: &Graph,
    f: &CoverMap,
) -> Result<BTreeMap<LinkId, [u8; 2]>, CoverError> {
    match resolve_loop_sides(guest, host, f)? {
        Ok(sides) => Ok(sides),
        Err(v) => Err(CoverError::InvalidCover(v.detail)),
    }
}

/// Full covering check via the three fiber conditions.
pub fn check_cover(guest: &Graph, host: &Graph, f: &CoverMap) -> Result<CheckReport, CoverError> {
    validate_totality(guest, host, f)?;
    let fib = fibers(guest, host, f);
    let sizes = fiber_sizes_of(&fib);
    if let Some(v) = incidence_violation(guest, host, f) {
        return Ok(CheckReport::fail(v, sizes));
    }
    let lf = link_fibers(f);
    for hl in host.links() {
        let pre = lf.get(&hl.id).cloned().unwrap_or_default();
        match hl.kind {
            LinkKind::Edge => {
                // Perfect matching between the endpoint fibers: every fiber
                // vertex of either endpoint is covered exactly once.
                let mut count: BTreeMap<VertexId, usize> = BTreeMap::new();
                for h in [hl.ends[0], hl.ends[1]] {
                    for &v in &fib[&h] {
                        count.insert(v, 0);
                    }
                }
                for &l in &pre {
                    let link = guest.link(l);
                    for end in [link.ends[0], link.ends[1]] {
                        *count.entry(end).or_insert(0) += 1;
                    }
                }
                if let Some((v, c)) = count.iter().find(|(_, &c)| c != 1) {
                    return Ok(CheckReport::fail(
                        Violation {
                            reason: ViolationReason::FiberNotPerfectMatching,
                            witness: ViolationWitness::HostLink(hl.id),
                            detail: format!(
                                "fiber vertex {} covered {} times by the preimage of edge {}",
                                guest.vertex_name(*v),
                                c,
                                host.link_display(hl.id)
                            ),
                        },
                        sizes,
                    ));
                }
            }
            LinkKind::Loop => {
                // Disjoint union of cycles spanning the fiber: every fiber
                // vertex lies on exactly two incidences.
                let mut count: BTreeMap<VertexId, usize> = BTreeMap::new();
                for &v in &fib[&hl.ends[0]] {
                    count.insert(v, 0);
                }
                for &l in &pre {
                    let link = guest.link(l);
                    *count.entry(link.ends[0]).or_insert(0) += 1;
                    *count.entry(link.ends[1]).or_insert(0) += 1;
                }
                if let Some((v, c)) = count.iter().find(|(_, &c)| c != 2) {
                    return Ok(CheckReport::fail(
                        Violation {
                            reason: ViolationReason::FiberNotCycleUnion,
                            witness: ViolationWitness::HostLink(hl.id),
                            detail: format!(
                                "fiber vertex {} lies on {} incidences over loop {}",
                                guest.vertex_name(*v),
                                c,
                                host.link_display(hl.id)
                            ),
                        },
                        sizes,
                    ));
                }
            }
            LinkKind::SemiEdge => {
                // Disjoint union of edges and semi-edges spanning the fiber:
                // every fiber vertex covered exactly once.
                let mut count: BTreeMap<VertexId, usize> = BTreeMap::new();
                for &v in &fib[&hl.ends[0]] {
                    count.insert(v, 0);
                }
                for &l in &pre {
                    let link = guest.link(l);
                    *count.entry(link.ends[0]).or_insert(0) += 1;
                    if link.kind != LinkKind::SemiEdge {
                        *count.entry(link.ends[1]).or_insert(0) += 1;
                    }
                }
                if let Some((v, c)) = count.iter().find(|(_, &c)| c != 1) {
                    return Ok(CheckReport::fail(
                        Violation {
                            reason: ViolationReason::FiberNotMatchingSpanning,
                            witness: ViolationWitness::HostLink(hl.id),
                            detail: format!(
                                "fiber vertex {} covered {} times by the preimage of semi-edge {}",
                                guest.vertex_name(*v),
                                c,
                                host.link_display(hl.id)
                            ),
                        },
                        sizes,
                    ));
                }
            }
        }
    }
    // Recorded loop sides, if any, must themselves be consistent.
    match resolve_loop_sides(guest, host, f)? {
        Err(v) => Ok(CheckReport::fail(v, sizes)),
        Ok(_) => Ok(CheckReport::ok(sizes)),
    }
}

/// The induced map on slots, one entry per guest slot.  Requires incidence
/// preservation; loop sides are taken from the map or derived.
pub fn slot_map(
    guest: &Graph,
    host: &Graph,
    f: &CoverMap,
) -> Result<BTreeMap<(LinkId, u8), (LinkId, u8)>, CoverError> {
    validate_totality(guest, host, f)?;
    if let Some(v) = incidence_violation(guest, host, f) {
        return Err(CoverError::InvalidCover(v.detail));
    }
    let sides = match resolve_loop_sides(guest, host, f)? {
        Ok(s) => s,
        Err(v) => return Err(CoverError::InvalidCover(v.detail)),
    };
    let mut out = BTreeMap::new();
    for l in guest.links() {
        let img = host.link(f.link_map[&l.id]);
        let ends: &[u8] = match l.kind {
            LinkKind::SemiEdge => &[0],
            _ => &[0, 1],
        };
        for &e in ends {
            let target_side: u8 = match (l.kind, img.kind) {
                (_, LinkKind::Loop) => sides[&l.id][e as usize],
                (_, LinkKind::SemiEdge) => 0,
                (_, LinkKind::Edge) => {
                    let fu = f.vertex_map[&l.end(e)];
                    if img.ends[0] == fu {
                        0
                    } else {
                        1
                    }
                }
            };
            out.insert((l.id, e), (img.id, target_side));
        }
    }
    Ok(out)
}

/// Full covering check via per-vertex slot bijections.  Independent of
/// [`check_cover`]; the two must agree on every well-formed input.
pub fn check_cover_by_slots(
    guest: &Graph,
    host: &Graph,
    f: &CoverMap,
) -> Result<CheckReport, CoverError> {
    validate_totality(guest, host, f)?;
    let fib = fibers(guest, host, f);
    let sizes = fiber_sizes_of(&fib);
    if let Some(v) = incidence_violation(guest, host, f) {
        return Ok(CheckReport::fail(v, sizes));
    }
    let sides = match resolve_loop_sides(guest, host, f)? {
        Ok(s) => s,
        Err(v) => return Ok(CheckReport::fail(v, sizes)),
    };
    for u in guest.vertices() {
        let fu = f.vertex_map[&u];
        let mut hit: BTreeMap<(LinkId, u8), usize> = BTreeMap::new();
        for s in host.slots(fu) {
            hit.insert((s.link, s.side), 0);
        }
        for s in guest.slots(u) {
            let l = guest.link(s.link);
            let img = host.link(f.link_map[&l.id]);
            let target_side: u8 = match img.kind {
                LinkKind::Loop => sides[&l.id][s.side as usize],
                LinkKind::SemiEdge => 0,
                LinkKind::Edge => {
                    if img.ends[0] == fu {
                        0
                    } else {
                        1
                    }
                }
            };
            *hit.entry((img.id, target_side)).or_insert(0) += 1;
        }
        if let Some(((hl, side), c)) = hit.iter().find(|(_, &c)| c != 1) {
            return Ok(CheckReport::fail(
                Violation {
                    reason: ViolationReason::NotLocallyBijective,
                    witness: ViolationWitness::GuestVertex(u),
                    detail: format!(
                        "slot ({}, side {}) of {} is hit {} times from {}",
                        host.link_display(*hl),
                        side,
                        host.vertex_name(fu),
                        c,
                        guest.vertex_name(u)
                    ),
                },
                sizes,
            ));
        }
    }
    Ok(CheckReport::ok(sizes))
}

/// Partial covering check: incidence and kind preservation plus local
/// injectivity (the slots of `u` map into the slots of `f(u)` without
/// collision).  Loop-side choices are not needed: an incidence pair landing
/// on a host loop may use its two sides freely, so the per-link capacity at
/// a vertex is 2 for a loop image and 1 otherwise.
pub fn check_partial_cover(
    guest: &Graph,
    host: &Graph,
    f: &CoverMap,
) -> Result<CheckReport, CoverError> {
    validate_totality(guest, host, f)?;
    let fib = fibers(guest, host, f);
    let sizes = fiber_sizes_of(&fib);
    if let Some(v) = incidence_violation(guest, host, f) {
        return Ok(CheckReport::fail(v, sizes));
    }
    for u in guest.vertices() {
        let mut load: BTreeMap<LinkId, usize> = BTreeMap::new();
        for s in guest.slots(u) {
            *load.entry(f.link_map[&guest.link(s.link).id]).or_insert(0) += 1;
        }
        for (hl, c) in load {
            let cap = match host.link(hl).kind {
                LinkKind::Loop => 2,
                _ => 1,
            };
            if c > cap {
                return Ok(CheckReport::fail(
                    Violation {
                        reason: ViolationReason::NotLocallyInjective,
                        witness: ViolationWitness::GuestVertex(u),
                        detail: format!(
                            "{} incidences of {} map to {} (capacity {})",
                            c,
                            guest.vertex_name(u),
                            host.link_display(hl),
                            cap
                        ),
                    },
                    sizes,
                ));
            }
        }
    }
    Ok(CheckReport::ok(sizes))
}

// ---- path lifting ----

/// One connected component of the preimage of a host path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftComponent {
    /// `false` for a path, `true` for a cycle (which can arise when both
    /// ends of an open host path are semi-edges whose fibers contain no
    /// guest semi-edges).
    pub closed: bool,
    pub links: Vec<LinkId>,
    pub vertices: Vec<VertexId>,
}

/// Validate that `path` is a path in `host`: interior links are edges,
/// semi-edges may appear only at the two ends, consecutive links share a
/// vertex, and no vertex repeats.  Returns the vertex sequence.
fn validate_path(host: &Graph, path: &[LinkId]) -> Result<Vec<VertexId>, CoverError> {
    if path.is_empty() {
        return Err(CoverError::NotAPath("empty link sequence".into()));
    }
    let mut set = path.to_vec();
    set.sort();
    set.dedup();
    if set.len() != path.len() {
        return Err(CoverError::NotAPath("repeated link".into()));
    }
    for &l in path {
        if l.index() >= host.link_count() {
            return Err(CoverError::UnknownLink(format!("{l}")));
        }
        if host.link(l).kind == LinkKind::Loop {
            return Err(CoverError::NotAPath("paths cannot contain loops".into()));
        }
    }
    for (i, &l) in path.iter().enumerate() {
        let interior = i != 0 && i + 1 != path.len();
        if interior && host.link(l).kind == LinkKind::SemiEdge {
            return Err(CoverError::NotAPath(
                "semi-edges may only start or end a path".into(),
            ));
        }
    }
    // Reconstruct the vertex sequence.
    let first = host.link(path[0]);
    let mut verts: Vec<VertexId> = Vec::new();
    if path.len() == 1 {
        match first.kind {
            LinkKind::SemiEdge => verts.push(first.ends[0]),
            _ => {
                verts.push(first.ends[0]);
                verts.push(first.ends[1]);
            }
        }
    } else {
        let second = host.link(path[1]);
        let touches = |l: &crate::graph::Link, v: VertexId| l.ends[0] == v || l.ends[1] == v;
        let start = if first.kind == LinkKind::SemiEdge {
            first.ends[0]
        } else if touches(second, first.ends[1]) {
            first.ends[0]
        } else if touches(second, first.ends[0]) {
            first.ends[1]
        } else {
            return Err(CoverError::NotAPath(
                "first two links share no vertex".into(),
            ));
        };
        verts.push(start);
        let mut at = start;
        for (i, &l) in path.iter().enumerate() {
            let link = host.link(l);
            match link.kind {
                LinkKind::SemiEdge => {
                    if link.ends[0] != at {
                        return Err(CoverError::NotAPath(format!(
                            "link {} does not continue from {}",
                            host.link_display(l),
                            host.vertex_name(at)
                        )));
                    }
                    // Terminal semi-edge: no new vertex.
                    if i == 0 {
                        continue;
                    }
                }
                LinkKind::Edge => {
                    if !touches(link, at) {
                        return Err(CoverError::NotAPath(format!(
                            "link {} does not continue from {}",
                            host.link_display(l),
                            host.vertex_name(at)
                        )));
                    }
                    let next = link.other_end(at);
                    verts.push(next);
                    at = next;
                }
                LinkKind::Loop => unreachable!("loops rejected above"),
            }
        }
    }
    let mut sorted = verts.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != verts.len() {
        return Err(CoverError::NotAPath("repeated vertex".into()));
    }
    Ok(verts)
}

/// Lift a host path through a valid cover: returns the connected components
/// of its preimage, each a path or (in the doubly-semi-terminated case) a
/// cycle, ordered by smallest guest vertex.
pub fn lift_path(
    guest: &Graph,
    host: &Graph,
    f: &CoverMap,
    path: &[LinkId],
) -> Result<Vec<LiftComponent>, CoverError> {
    let report = check_cover(guest, host, f)?;
    if !report.valid {
        let why = report
            .violation
            .map(|v| v.detail)
            .unwrap_or_else(|| "unknown".into());
        return Err(CoverError::InvalidCover(why));
    }
    validate_path(host, path)?;
    let path_set: std::collections::BTreeSet<LinkId> = path.iter().copied().collect();
    let pre: Vec<LinkId> = guest
        .link_ids()
        .filter(|l| path_set.contains(&f.link_map[l]))
        .collect();
    // Guest incidences restricted to the preimage.  Only edges and
    // semi-edges can appear (host paths contain no loops).
    let mut incident: BTreeMap<VertexId, Vec<LinkId>> = BTreeMap::new();
    for &l in &pre {
        let link = guest.link(l);
        incident.entry(link.ends[0]).or_default().push(l);
        if link.kind == LinkKind::Edge {
            incident.entry(link.ends[1]).or_default().push(l);
        }
    }
    let mut used: std::collections::BTreeSet<LinkId> = std::collections::BTreeSet::new();
    let mut out: Vec<LiftComponent> = Vec::new();

    // Discover components; define each component's canonical start.
    let mut comp_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut comps: Vec<Vec<VertexId>> = Vec::new();
    for (&v, _) in &incident {
        if comp_of.contains_key(&v) {
            continue;
        }
        let idx = comps.len();
        let mut stack = vec![v];
        let mut members = Vec::new();
        comp_of.insert(v, idx);
        while let Some(x) = stack.pop() {
            members.push(x);
            for &l in &incident[&x] {
                let link = guest.link(l);
                if link.kind == LinkKind::Edge {
                    let y = link.other_end(x);
                    if !comp_of.contains_key(&y) {
                        comp_of.insert(y, idx);
                        stack.push(y);
                    }
                }
            }
        }
        members.sort();
        comps.push(members);
    }

    for members in comps {
        // Terminals: (vertex, link) pairs where a walk can start — a
        // semi-edge, or the unique link of a degree-1 vertex.
        let mut terminals: Vec<(VertexId, LinkId)> = Vec::new();
        for &v in &members {
            let inc = &incident[&v];
            if inc.len() == 1 {
                terminals.push((v, inc[0]));
            }
            for &l in inc {
                if guest.link(l).kind == LinkKind::SemiEdge {
                    terminals.push((v, l));
                }
            }
        }
        terminals.sort();
        terminals.dedup();
        let closed = terminals.is_empty();
        let (mut at, mut cur) = if closed {
            // Cycle: start at the smallest vertex, over its smaller link.
            let v0 = members[0];
            let mut ls = incident[&v0].clone();
            ls.sort();
            (v0, ls[0])
        } else {
            terminals[0]
        };
        let mut links = Vec::new();
        let mut verts = vec![at];
        loop {
            used.insert(cur);
            links.push(cur);
            let link = guest.link(cur);
            if link.kind == LinkKind::SemiEdge {
                // A semi-edge ends the walk (or started it; then continue
                // from the same vertex over the remaining link).
                if links.len() == 1 && incident[&at].len() > 1 {
                    let next = incident[&at]
                        .iter()
                        .copied()
                        .find(|l| !used.contains(l));
                    match next {
                        Some(n) => {
                            cur = n;
                            continue;
                        }
                        None => break,
                    }
                }
                break;
            }
            let next_v = link.other_end(at);
            if closed && next_v == verts[0] {
                break;
            }
            verts.push(next_v);
            at = next_v;
            let next = incident[&at].iter().copied().find(|l| !used.contains(l));
            match next {
                Some(n) => cur = n,
                None => break,
            }
        }
        out.push(LiftComponent {
            closed,
            links,
            vertices: verts,
        });
    }
    out.sort_by_key(|c| c.vertices.iter().min().copied());
    Ok(out)
}

// ---- cutset fiber-balance bound ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutsetReport {
    pub holds: bool,
    /// The bound |S| that fiber counts within the component must respect.
    pub bound: usize,
    pub max_discrepancy: usize,
}

/// For a valid cover, a vertex set `s`, and a connected component `a` of
/// `guest - s`: the per-host-vertex counts of `a ∩ fiber` may pairwise
/// differ by at most `|s|`.
pub fn check_cutset_bound(
    guest: &Graph,
    host: &Graph,
    f: &CoverMap,
    s: &[VertexId],
    a: &[VertexId],
) -> Result<CutsetReport, CoverError> {
    let report = check_cover(guest, host, f)?;
    if !report.valid {
        let why = report
            .violation
            .map(|v| v.detail)
            .unwrap_or_else(|| "unknown".into());
        return Err(CoverError::InvalidCover(why));
    }
    let in_s = {
        let mut m = vec![false; guest.vertex_count()];
        for &v in s {
            if v.index() >= guest.vertex_count() {
                return Err(CoverError::UnknownVertex(format!("{v}")));
            }
            m[v.index()] = true;
        }
        m
    };
    // Components of guest - s over ordinary edges.
    let n = guest.vertex_count();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0usize;
    for start in guest.vertices() {
        if in_s[start.index()] || comp[start.index()] != usize::MAX {
            continue;
        }
        comp[start.index()] = next;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for slot in guest.slots(v) {
                let link = guest.link(slot.link);
                if link.kind == LinkKind::Edge {
                    let w = link.other_end(v);
                    if !in_s[w.index()] && comp[w.index()] == usize::MAX {
                        comp[w.index()] = next;
                        stack.push(w);
                    }
                }
            }
        }
        next += 1;
    }
    let mut a_sorted: Vec<VertexId> = a.to_vec();
    a_sorted.sort();
    a_sorted.dedup();
    if a_sorted.is_empty() {
        return Err(CoverError::NotAComponent);
    }
    let c0 = comp[a_sorted[0].index()];
    if c0 == usize::MAX || a_sorted.iter().any(|v| comp[v.index()] != c0) {
        return Err(CoverError::NotAComponent);
    }
    let full: Vec<VertexId> = guest
        .vertices()
        .filter(|v| comp[v.index()] == c0)
        .collect();
    if full != a_sorted {
        return Err(CoverError::NotAComponent);
    }
    let mut counts: BTreeMap<VertexId, usize> = host.vertices().map(|h| (h, 0)).collect();
    for &v in &a_sorted {
        *counts.get_mut(&f.vertex_map[&v]).unwrap() += 1;
    }
    let lo = counts.values().min().copied().unwrap_or(0);
    let hi = counts.values().max().copied().unwrap_or(0);
    let max_discrepancy = hi - lo;
    Ok(CutsetReport {
        holds: max_discrepancy <= s.len(),
        bound: s.len(),
        max_discrepancy,
    })
}

// ---- four-cycle images over acyclic hosts ----

/// Classification of one guest 4-cycle under a cover onto an acyclic host:
/// which of its two opposite-edge pairs map onto semi-edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct C4Report {
    pub vertices: [VertexId; 4],
    pub edges: [LinkId; 4],
    /// Pair 0 = (edges[0], edges[2]); pair 1 = (edges[1], edges[3]).
    pub pair_maps_to_semis: [bool; 2],
    pub has_semi_pair: bool,
}

/// Enumerate every 4-cycle of the guest and report which opposite-edge
/// pairs are mapped onto semi-edges.  Over an acyclic host, every valid
/// cover must grant each 4-cycle at least one such pair; callers assert
/// `has_semi_pair` on each entry.
pub fn check_c4_images(
    guest: &Graph,
    host: &Graph,
    f: &CoverMap,
) -> Result<Vec<C4Report>, CoverError> {
    if analysis::girth(host).is_some() {
        return Err(CoverError::HostNotAcyclic);
    }
    let report = check_cover(guest, host, f)?;
    if !report.valid {
        let why = report
            .violation
            .map(|v| v.detail)
            .unwrap_or_else(|| "unknown".into());
        return Err(CoverError::InvalidCover(why));
    }
    let mut out = Vec::new();
    let n = guest.vertex_count();
    for ai in 0..n {
        let a = VertexId(ai as u32);
        let nbrs_a = guest.edge_neighbors(a);
        for (bi, &b) in nbrs_a.iter().enumerate() {
            if b <= a {
                continue;
            }
            for &d in nbrs_a.iter().skip(bi + 1) {
                if d <= a {
                    continue;
                }
                // Common neighbors c of b and d with c > a, c != a.
                for c in guest.edge_neighbors(b) {
                    if c <= a || c == d || c == b {
                        continue;
                    }
                    if !guest.edge_neighbors(d).contains(&c) {
                        continue;
                    }
                    for &eab in &guest.edges_between(a, b) {
                        for &ebc in &guest.edges_between(b, c) {
                            for &ecd in &guest.edges_between(c, d) {
                                for &eda in &guest.edges_between(d, a) {
                                    let is_semi = |l: LinkId| {
                                        host.link(f.link_map[&l]).kind == LinkKind::SemiEdge
                                    };
                                    let p0 = is_semi(eab) && is_semi(ecd);
                                    let p1 = is_semi(ebc) && is_semi(eda);
                                    out.push(C4Report {
                                        vertices: [a, b, c, d],
                                        edges: [eab, ebc, ecd, eda],
                                        pair_maps_to_semis: [p0, p1],
                                        has_semi_pair: p0 || p1,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

// ---- composition ----

/// Compose two covering projections `f: a → b` and `g: b → c` into a
/// covering projection `a → c`.  Loop-side choices of the composite are
/// derived by composing the induced slot maps.
pub fn compose_covers(
    a: &Graph,
    b: &Graph,
    c: &Graph,
    f: &CoverMap,
    g: &CoverMap,
) -> Result<CoverMap, CoverError> {
    let sf = slot_map(a, b, f)?;
    let sg = slot_map(b, c, g)?;
    let mut out = CoverMap::default();
    for (v, w) in &f.vertex_map {
        out.vertex_map.insert(*v, g.vertex_map[w]);
    }
    for (l, m) in &f.link_map {
        out.link_map.insert(*l, g.link_map[m]);
    }
    for l in a.links() {
        let img = c.link(out.link_map[&l.id]);
        if img.kind != LinkKind::Loop {
            continue;
        }
        let ends: &[u8] = match l.kind {
            LinkKind::SemiEdge => &[0],
            _ => &[0, 1],
        };
        let mut sides = [0u8; 2];
        for &e in ends {
            let mid = sf[&(l.id, e)];
            let fin = sg[&mid];
            sides[e as usize] = fin.1;
        }
        out.loop_sides.insert(l.id, sides);
    }
    Ok(out)
}

// ---- JSON wire format ----

/// Output keys are always positional (`#idx`); labels are accepted on input
/// only.
fn link_key(_g: &Graph, l: LinkId) -> String {
    format!("#{}", l.0)
}

fn resolve_vertex(g: &Graph, s: &str) -> Result<VertexId, CoverError> {
    g.vertex(s)
        .ok_or_else(|| CoverError::UnknownVertex(s.to_string()))
}

fn resolve_link(g: &Graph, s: &str) -> Result<LinkId, CoverError> {
    if let Some(rest) = s.strip_prefix('#') {
        if let Ok(i) = rest.parse::<u32>() {
            if (i as usize) < g.link_count() {
                return Ok(LinkId(i));
            }
        }
        return Err(CoverError::UnknownLink(s.to_string()));
    }
    g.link_by_label(s)
        .ok_or_else(|| CoverError::UnknownLink(s.to_string()))
}

/// Serialize a cover map: vertex names to vertex names, links by `#idx`.
pub fn cover_to_json(guest: &Graph, host: &Graph, f: &CoverMap) -> Value {
    let mut vertices = Map::new();
    for (v, w) in &f.vertex_map {
        vertices.insert(
            guest.vertex_name(*v).to_string(),
            Value::String(host.vertex_name(*w).to_string()),
        );
    }
    let mut links = Map::new();
    for (l, m) in &f.link_map {
        links.insert(link_key(guest, *l), Value::String(link_key(host, *m)));
    }
    let mut loop_sides = Map::new();
    for (l, sides) in &f.loop_sides {
        loop_sides.insert(
            link_key(guest, *l),
            json!([sides[0], sides[1]]),
        );
    }
    json!({
        "vertices": Value::Object(vertices),
        "links": Value::Object(links),
        "loop_sides": Value::Object(loop_sides),
    })
}

/// Parse a cover map; link keys/values accept `#idx` or a link label.
pub fn cover_from_json(guest: &Graph, host: &Graph, v: &Value) -> Result<CoverMap, CoverError> {
    let obj = v
        .as_object()
        .ok_or_else(|| CoverError::BadJson("expected object".into()))?;
    let mut f = CoverMap::default();
    let vertices = obj
        .get("vertices")
        .and_then(Value::as_object)
        .ok_or_else(|| CoverError::BadJson("missing \"vertices\" object".into()))?;
    for (k, val) in vertices {
        let img = val
            .as_str()
            .ok_or_else(|| CoverError::BadJson(format!("vertex image of {k:?} not a string")))?;
        f.vertex_map
            .insert(resolve_vertex(guest, k)?, resolve_vertex(host, img)?);
    }
    let links = obj
        .get("links")
        .and_then(Value::as_object)
        .ok_or_else(|| CoverError::BadJson("missing \"links\" object".into()))?;
    for (k, val) in links {
        let img = val
            .as_str()
            .ok_or_else(|| CoverError::BadJson(format!("link image of {k:?} not a string")))?;
        f.link_map
            .insert(resolve_link(guest, k)?, resolve_link(host, img)?);
    }
    if let Some(ls) = obj.get("loop_sides") {
        let ls = ls
            .as_object()
            .ok_or_else(|| CoverError::BadJson("\"loop_sides\" not an object".into()))?;
        for (k, val) in ls {
            let arr = val
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| CoverError::BadJson(format!("loop_sides[{k:?}] not a pair")))?;
            let mut sides = [0u8; 2];
            for (i, x) in arr.iter().enumerate() {
                sides[i] = x
                    .as_u64()
                    .filter(|&n| n <= 1)
                    .ok_or_else(|| CoverError::BadJson(format!("loop_sides[{k:?}] not 0/1")))?
                    as u8;
            }
            f.loop_sides.insert(resolve_link(guest, k)?, sides);
        }
    }
    Ok(f)
}

/// Serialize a check report with human-readable names.
pub fn report_to_json(guest: &Graph, host: &Graph, r: &CheckReport) -> Value {
    let violation = r.violation.as_ref().map(|v| {
        let witness = match &v.witness {
            ViolationWitness::GuestVertex(u) => {
                json!({"guest_vertex": guest.vertex_name(*u)})
            }
            ViolationWitness::HostLink(l) => json!({"host_link": link_key(host, *l)}),
        };
        json!({
            "reason": v.reason.code(),
            "witness": witness,
            "detail": v.detail,
        })
    });
    let mut fiber_sizes = Map::new();
    for (h, n) in &r.fiber_sizes {
        fiber_sizes.insert(host.vertex_name(*h).to_string(), json!(n));
    }
    json!({
        "valid": r.valid,
        "violation": violation,
        "fiber_sizes": Value::Object(fiber_sizes),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let mut g = Graph::new();
        let vs: Vec<VertexId> = (0..n)
            .map(|i| g.add_vertex(&format!("c{i}")).unwrap())
            .collect();
        for i in 0..n {
            g.add_edge(vs[i], vs[(i + 1) % n], None).unwrap();
        }
        g
    }

    /// Path on n vertices regularized to degree 3 with semi-edges, labeled
    /// like the canonical host: vertex i has semis "i/s1", "i/s2" at the
    /// ends and "i/s1" inside.
    fn semi_path_host(n: usize) -> Graph {
        let mut g = Graph::new();
        let vs: Vec<VertexId> = (1..=n)
            .map(|i| g.add_vertex(&format!("h{i}")).unwrap())
            .collect();
        for i in 1..n {
            g.add_edge(vs[i - 1], vs[i], Some(&format!("e{}{}", i, i + 1)))
                .unwrap();
        }
        for (i, &v) in vs.iter().enumerate() {
            let k = i + 1;
            if i == 0 || i + 1 == n {
                g.add_semi_edge(v, Some(&format!("{k}/s1"))).unwrap();
                g.add_semi_edge(v, Some(&format!("{k}/s2"))).unwrap();
            } else {
                g.add_semi_edge(v, Some(&format!("{k}/s1"))).unwrap();
            }
        }
        g
    }

    /// The canonical 2-fold wrap of the cubic 4-cycle onto the cubic 2-path.
    fn wrap4() -> (Graph, Graph, CoverMap) {
        let mut guest = Graph::new();
        let c: Vec<VertexId> = (1..=4)
            .map(|i| guest.add_vertex(&format!("c{i}")).unwrap())
            .collect();
        let e12 = guest.add_edge(c[0], c[1], None).unwrap();
        let e23 = guest.add_edge(c[1], c[2], None).unwrap();
        let e34 = guest.add_edge(c[2], c[3], None).unwrap();
        let e41 = guest.add_edge(c[3], c[0], None).unwrap();
        let s: Vec<LinkId> = c
            .iter()
            .map(|&v| guest.add_semi_edge(v, None).unwrap())
            .collect();
        let host = semi_path_host(2);
        let h1 = host.vertex("h1").unwrap();
        let h2 = host.vertex("h2").unwrap();
        let he = host.link_by_label("e12").unwrap();
        let mut f = CoverMap::default();
        // Labels 1,2,2,1 around the cycle.
        f.vertex_map.insert(c[0], h1);
        f.vertex_map.insert(c[1], h2);
        f.vertex_map.insert(c[2], h2);
        f.vertex_map.insert(c[3], h1);
        f.link_map.insert(e12, he);
        f.link_map.insert(e23, host.link_by_label("2/s1").unwrap());
        f.link_map.insert(e34, he);
        f.link_map.insert(e41, host.link_by_label("1/s1").unwrap());
        f.link_map.insert(s[0], host.link_by_label("1/s2").unwrap());
        f.link_map.insert(s[1], host.link_by_label("2/s2").unwrap());
        f.link_map.insert(s[2], host.link_by_label("2/s2").unwrap());
        f.link_map.insert(s[3], host.link_by_label("1/s2").unwrap());
        (guest, host, f)
    }

    #[test]
    fn identity_is_a_cover() {
        let mut g = Graph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        g.add_edge(a, b, None).unwrap();
        g.add_loop(a, None).unwrap();
        g.add_semi_edge(b, None).unwrap();
        let f = CoverMap::identity(&g);
        assert!(check_cover(&g, &g, &f).unwrap().valid);
        assert!(check_cover_by_slots(&g, &g, &f).unwrap().valid);
        assert!(check_partial_cover(&g, &g, &f).unwrap().valid);
    }

    #[test]
    fn cycles_cover_the_loop_vertex() {
        for n in [3usize, 4, 5] {
            let g = cycle(n);
            let mut h = Graph::new();
            let v = h.add_vertex("v").unwrap();
            let lo = h.add_loop(v, None).unwrap();
            let mut f = CoverMap::default();
            for u in g.vertices() {
                f.vertex_map.insert(u, v);
            }
            for l in g.link_ids() {
                f.link_map.insert(l, lo);
            }
            let r = check_cover(&g, &h, &f).unwrap();
            assert!(r.valid, "C{n} over a loop");
            let r2 = check_cover_by_slots(&g, &h, &f).unwrap();
            assert!(r2.valid, "slot formulation agrees on C{n}");
        }
    }

    #[test]
    fn odd_cycle_cannot_cover_the_semi_vertex() {
        let g = cycle(3);
        let mut h = Graph::new();
        let v = h.add_vertex("v").unwrap();
        let s = h.add_semi_edge(v, None).unwrap();
        let mut f = CoverMap::default();
        for u in g.vertices() {
            f.vertex_map.insert(u, v);
        }
        for l in g.link_ids() {
            f.link_map.insert(l, s);
        }
        let r = check_cover(&g, &h, &f).unwrap();
        assert!(!r.valid);
        assert_eq!(
            r.violation.unwrap().reason,
            ViolationReason::FiberNotMatchingSpanning
        );
        let r2 = check_cover_by_slots(&g, &h, &f).unwrap();
        assert!(!r2.valid);
    }

    #[test]
    fn even_cycle_covers_the_semi_vertex_two_ways() {
        // C4 onto one vertex with two semi-edges: alternate edge images.
        let g = cycle(4);
        let mut h = Graph::new();
        let v = h.add_vertex("v").unwrap();
        let s1 = h.add_semi_edge(v, None).unwrap();
        let s2 = h.add_semi_edge(v, None).unwrap();
        let mut f = CoverMap::default();
        for u in g.vertices() {
            f.vertex_map.insert(u, v);
        }
        for (i, l) in g.link_ids().enumerate() {
            f.link_map.insert(l, if i % 2 == 0 { s1 } else { s2 });
        }
        assert!(check_cover(&g, &h, &f).unwrap().valid);
        assert!(check_cover_by_slots(&g, &h, &f).unwrap().valid);
    }

    #[test]
    fn canonical_wrap_is_valid_and_formulations_agree() {
        let (guest, host, f) = wrap4();
        let r = check_cover(&guest, &host, &f).unwrap();
        assert!(r.valid, "violation: {:?}", r.violation);
        assert!(check_cover_by_slots(&guest, &host, &f).unwrap().valid);
        assert!(check_partial_cover(&guest, &host, &f).unwrap().valid);
        assert_eq!(
            r.fiber_sizes.values().copied().collect::<Vec<_>>(),
            vec![2, 2]
        );
    }

    #[test]
    fn broken_wrap_is_flagged_with_witness() {
        let (guest, host, mut f) = wrap4();
        // Redirect one guest semi-edge onto the wrong host semi-edge: its
        // vertex now covers 1/s1 twice and 1/s2 never.
        let s4 = guest.semis_at(guest.vertex("c4").unwrap())[0];
        f.link_map.insert(s4, host.link_by_label("1/s1").unwrap());
        let r = check_cover(&guest, &host, &f).unwrap();
        assert!(!r.valid);
        let v = r.violation.unwrap();
        assert!(
            v.reason == ViolationReason::FiberNotCycleUnion
                || v.reason == ViolationReason::FiberNotMatchingSpanning,
            "got {:?}",
            v.reason
        );
        let r2 = check_cover_by_slots(&guest, &host, &f).unwrap();
        assert!(!r2.valid);
    }

    #[test]
    fn kind_rules_are_enforced() {
        // A guest loop may not map onto a semi-edge.
        let mut g = Graph::new();
        let a = g.add_vertex("a").unwrap();
        let lo = g.add_loop(a, None).unwrap();
        let mut h = Graph::new();
        let v = h.add_vertex("v").unwrap();
        let s1 = h.add_semi_edge(v, None).unwrap();
        h.add_semi_edge(v, None).unwrap();
        let mut f = CoverMap::default();
        f.vertex_map.insert(a, v);
        f.link_map.insert(lo, s1);
        let r = check_cover(&g, &h, &f).unwrap();
        assert!(!r.valid);
        assert_eq!(
            r.violation.unwrap().reason,
            ViolationReason::NotIncidencePreserving
        );
    }

    #[test]
    fn partial_cover_detects_slot_collisions() {
        // Two semi-edges of one vertex onto the same host semi-edge.
        let mut g = Graph::new();
        let a = g.add_vertex("a").unwrap();
        let s1 = g.add_semi_edge(a, None).unwrap();
        let s2 = g.add_semi_edge(a, None).unwrap();
        let mut h = Graph::new();
        let v = h.add_vertex("v").unwrap();
        let t = h.add_semi_edge(v, None).unwrap();
        h.add_semi_edge(v, None).unwrap();
        let mut f = CoverMap::default();
        f.vertex_map.insert(a, v);
        f.link_map.insert(s1, t);
        f.link_map.insert(s2, t);
        let r = check_partial_cover(&g, &h, &f).unwrap();
        assert!(!r.valid);
        assert_eq!(
            r.violation.unwrap().reason,
            ViolationReason::NotLocallyInjective
        );
    }

    #[test]
    fn partial_cover_of_proper_submap_is_valid() {
        // Drop one vertex's worth of the wrap: still a partial cover after
        // restricting totality to what remains — here we instead map a
        // 2-path into the host path, which uses fewer slots than available.
        let mut g = Graph::new();
        let x = g.add_vertex("x").unwrap();
        let y = g.add_vertex("y").unwrap();
        let e = g.add_edge(x, y, None).unwrap();
        let host = semi_path_host(3);
        let mut f = CoverMap::default();
        f.vertex_map.insert(x, host.vertex("h1").unwrap());
        f.vertex_map.insert(y, host.vertex("h2").unwrap());
        f.link_map.insert(e, host.link_by_label("e12").unwrap());
        let r = check_partial_cover(&g, &host, &f).unwrap();
        assert!(r.valid);
        // But it is not a full cover (slots uncovered).
        assert!(!check_cover_by_slots(&g, &host, &f).unwrap().valid);
    }

    #[test]
    fn totality_errors_are_input_errors() {
        let (guest, host, mut f) = wrap4();
        f.vertex_map.remove(&guest.vertex("c1").unwrap());
        assert!(matches!(
            check_cover(&guest, &host, &f),
            Err(CoverError::MissingVertexImage(_))
        ));
    }

    #[test]
    fn recorded_loop_sides_are_validated() {
        let g = cycle(2); // two vertices, two parallel edges
        let mut h = Graph::new();
        let v = h.add_vertex("v").unwrap();
        let lo = h.add_loop(v, None).unwrap();
        let mut f = CoverMap::default();
        for u in g.vertices() {
            f.vertex_map.insert(u, v);
        }
        let ls: Vec<LinkId> = g.link_ids().collect();
        for &l in &ls {
            f.link_map.insert(l, lo);
        }
        // Good: the parallel edges are stored with opposite orientations
        // (c0→c1 and c1→c0), so giving both the side pair [0, 1] makes each
        // vertex see side 0 once and side 1 once.
        f.loop_sides.insert(ls[0], [0, 1]);
        f.loop_sides.insert(ls[1], [0, 1]);
        assert!(check_cover(&g, &h, &f).unwrap().valid);
        assert!(check_cover_by_slots(&g, &h, &f).unwrap().valid);
        // Bad: flipping one record makes both edges claim side 0 at c0.
        f.loop_sides.insert(ls[1], [1, 0]);
        let r = check_cover(&g, &h, &f).unwrap();
        assert!(!r.valid);
        assert_eq!(
            r.violation.unwrap().reason,
            ViolationReason::FiberNotCycleUnion
        );
        // Half-recorded: input error.
        f.loop_sides.remove(&ls[1]);
        assert!(matches!(
            check_cover(&g, &h, &f),
            Err(CoverError::PartialLoopSides(_))
        ));
    }

    #[test]
    fn lift_of_a_single_edge_is_the_matching() {
        let (guest, host, f) = wrap4();
        let e = host.link_by_label("e12").unwrap();
        let lifts = lift_path(&guest, &host, &f, &[e]).unwrap();
        assert_eq!(lifts.len(), 2);
        for c in &lifts {
            assert!(!c.closed);
            assert_eq!(c.links.len(), 1);
            assert_eq!(c.vertices.len(), 2);
        }
    }

    #[test]
    fn lift_of_open_path_can_be_one_long_path_or_a_cycle() {
        let (guest, host, f) = wrap4();
        let e = host.link_by_label("e12").unwrap();
        let s1a = host.link_by_label("1/s1").unwrap();
        let s1b = host.link_by_label("1/s2").unwrap();
        let s2a = host.link_by_label("2/s1").unwrap();
        let s2b = host.link_by_label("2/s2").unwrap();

        // Pure guest-semi terminals on both sides: two short paths.
        let lifts = lift_path(&guest, &host, &f, &[s1b, e, s2b]).unwrap();
        assert_eq!(lifts.len(), 2);
        assert!(lifts.iter().all(|c| !c.closed && c.links.len() == 3));

        // One edge-fiber terminal: a single path of doubled length.
        let lifts = lift_path(&guest, &host, &f, &[s1b, e, s2a]).unwrap();
        assert_eq!(lifts.len(), 1);
        assert!(!lifts[0].closed);
        assert_eq!(lifts[0].links.len(), 5);
        assert_eq!(lifts[0].vertices.len(), 4);

        // Both terminals with pure edge fibers: the lift closes into the
        // full guest cycle.
        let lifts = lift_path(&guest, &host, &f, &[s1a, e, s2a]).unwrap();
        assert_eq!(lifts.len(), 1);
        assert!(lifts[0].closed);
        assert_eq!(lifts[0].links.len(), 4);
        assert_eq!(lifts[0].vertices.len(), 4);
    }

    #[test]
    fn lift_path_endpoint_cases() {
        let (guest, host, f) = wrap4();
        let e = host.link_by_label("e12").unwrap();
        let s1a = host.link_by_label("1/s1").unwrap();
        let s1b = host.link_by_label("1/s2").unwrap();
        let s2a = host.link_by_label("2/s1").unwrap();
        // Lone semi-edge: a half-open path of length 1.
        let lifts = lift_path(&guest, &host, &f, &[s1b]).unwrap();
        assert_eq!(lifts.len(), 2);
        // Two semi-edges at one vertex form a 1-vertex open path; its lift
        // here joins the edge fiber of 1/s1 with two guest semi-edges.
        let lifts = lift_path(&guest, &host, &f, &[s1a, s1b]).unwrap();
        assert_eq!(lifts.len(), 1);
        assert_eq!(lifts[0].links.len(), 3);
        assert!(!lifts[0].closed);
        // Interior semi-edges are not allowed.
        assert!(matches!(
            lift_path(&guest, &host, &f, &[s1b, s1a, e]),
            Err(CoverError::NotAPath(_))
        ));
        // Disconnected link sequences are not paths.
        assert!(matches!(
            lift_path(&guest, &host, &f, &[s1b, s2a]),
            Err(CoverError::NotAPath(_))
        ));
        // Repeated links are not paths.
        assert!(matches!(
            lift_path(&guest, &host, &f, &[e, e]),
            Err(CoverError::NotAPath(_))
        ));
    }

    #[test]
    fn cutset_bound_trivial_cut() {
        let (guest, host, f) = wrap4();
        let all: Vec<VertexId> = guest.vertices().collect();
        let r = check_cutset_bound(&guest, &host, &f, &[], &all).unwrap();
        assert!(r.holds);
        assert_eq!(r.max_discrepancy, 0);
        // Removing one vertex leaves a 3-path; counts h1, h2 inside it are
        // 1 and 2 → discrepancy 1 ≤ |S| = 1.
        let c1 = guest.vertex("c1").unwrap();
        let rest: Vec<VertexId> = guest.vertices().filter(|&v| v != c1).collect();
        let r = check_cutset_bound(&guest, &host, &f, &[c1], &rest).unwrap();
        assert!(r.holds);
        assert_eq!(r.max_discrepancy, 1);
        // Not-a-component input is rejected.
        let bad = vec![guest.vertex("c2").unwrap()];
        assert!(matches!(
            check_cutset_bound(&guest, &host, &f, &[c1], &bad),
            Err(CoverError::NotAComponent)
        ));
    }

    #[test]
    fn c4_images_require_acyclic_host_and_find_semi_pairs() {
        let (guest, host, f) = wrap4();
        let reports = check_c4_images(&guest, &host, &f).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].has_semi_pair);
        // Pair containing e23/e41 maps to semis (2/s1, 1/s1).
        assert_eq!(reports[0].pair_maps_to_semis.iter().filter(|&&b| b).count(), 1);

        // A host with a cycle is rejected.
        let g4 = cycle(4);
        let f4 = CoverMap::identity(&g4);
        assert!(matches!(
            check_c4_images(&g4, &g4, &f4),
            Err(CoverError::HostNotAcyclic)
        ));
    }

    #[test]
    fn composition_of_covers_is_a_cover() {
        let (guest, host, f) = wrap4();
        // host = cubic 2-path covers the cubic 1-path (one vertex, three
        // semi-edges) 2-fold.
        let mut k = Graph::new();
        let p = k.add_vertex("p").unwrap();
        let t1 = k.add_semi_edge(p, Some("t1")).unwrap();
        let t2 = k.add_semi_edge(p, Some("t2")).unwrap();
        let t3 = k.add_semi_edge(p, Some("t3")).unwrap();
        let mut g = CoverMap::default();
        g.vertex_map.insert(host.vertex("h1").unwrap(), p);
        g.vertex_map.insert(host.vertex("h2").unwrap(), p);
        g.link_map.insert(host.link_by_label("e12").unwrap(), t1);
        g.link_map.insert(host.link_by_label("1/s1").unwrap(), t2);
        g.link_map.insert(host.link_by_label("1/s2").unwrap(), t3);
        g.link_map.insert(host.link_by_label("2/s1").unwrap(), t2);
        g.link_map.insert(host.link_by_label("2/s2").unwrap(), t3);
        assert!(check_cover(&host, &k, &g).unwrap().valid);
        let comp = compose_covers(&guest, &host, &k, &f, &g).unwrap();
        let r = check_cover(&guest, &k, &comp).unwrap();
        assert!(r.valid, "violation: {:?}", r.violation);
        assert_eq!(r.fiber_sizes[&p], 4);
    }

    #[test]
    fn json_round_trip() {
        let (guest, host, f) = wrap4();
        let j = cover_to_json(&guest, &host, &f);
        let back = cover_from_json(&guest, &host, &j).unwrap();
        assert_eq!(f, back);
        // Labels are accepted on input.
        let mut g = Graph::new();
        let a = g.add_vertex("a").unwrap();
        g.add_semi_edge(a, Some("tail")).unwrap();
        let mut h = Graph::new();
        let v = h.add_vertex("v").unwrap();
        h.add_semi_edge(v, Some("t")).unwrap();
        let j = serde_json::json!({
            "vertices": {"a": "v"},
            "links": {"tail": "t"},
        });
        let f2 = cover_from_json(&g, &h, &j).unwrap();
        assert!(check_cover(&g, &h, &f2).unwrap().valid);
    }
}
