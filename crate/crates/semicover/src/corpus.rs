//! A deterministic catalogue of benchmark graphs: named classics (Petersen,
//! the bridged cubic graph on ten vertices, prisms, the cube), parametric
//! families (paths, cycles, stars, complete and complete bipartite graphs),
//! exhaustive enumeration of small connected cubic graphs, a fixed shelf of
//! small trees with maximum degree three, and the host/guest collections used
//! by the product-equivalence sweep.
//!
//! Every builder names vertices deterministically, so repeated calls produce
//! byte-identical graphs.

use crate::analysis;
use crate::constructions;
use crate::graph::{Graph, VertexId};

/// Simple path on `n` vertices (`n ≥ 1`), vertices `v1 … vn`.
pub fn path(n: usize) -> Graph {
    assert!(n >= 1, "a path needs at least one vertex");
    let mut g = Graph::new();
    let mut prev: Option<VertexId> = None;
    for i in 1..=n {
        let name = format!("v{i}");
        let v = g.add_vertex(&name).expect("fresh name");
        if let Some(p) = prev {
            g.add_edge(p, v, None).expect("valid edge");
        }
        prev = Some(v);
    }
    g
}

/// Simple cycle on `n ≥ 3` vertices, vertices `v1 … vn`.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "a simple cycle needs at least three vertices");
    let mut g = path(n);
    let first = g.vertex("v1").expect("exists");
    let last_name = format!("v{n}");
    let last = g.vertex(&last_name).expect("exists");
    g.add_edge(last, first, None).expect("valid edge");
    g
}

/// Star `K_{1,k}`: centre `c` joined to leaves `x1 … xk`.
pub fn star(k: usize) -> Graph {
    let mut g = Graph::new();
    let c = g.add_vertex("c").expect("fresh name");
    for i in 1..=k {
        let name = format!("x{i}");
        let v = g.add_vertex(&name).expect("fresh name");
        g.add_edge(c, v, None).expect("valid edge");
    }
    g
}

/// Complete graph on `n` vertices, `v1 … vn`.
pub fn complete(n: usize) -> Graph {
    let mut g = Graph::new();
    let vs: Vec<VertexId> = (1..=n)
        .map(|i| {
            let name = format!("v{i}");
            g.add_vertex(&name).expect("fresh name")
        })
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            g.add_edge(vs[i], vs[j], None).expect("valid edge");
        }
    }
    g
}

/// Complete bipartite graph with sides `a1 … a_m` and `b1 … b_n`.
pub fn complete_bipartite(m: usize, n: usize) -> Graph {
    let mut g = Graph::new();
    let avs: Vec<VertexId> = (1..=m)
        .map(|i| {
            let name = format!("a{i}");
            g.add_vertex(&name).expect("fresh name")
        })
        .collect();
    let bvs: Vec<VertexId> = (1..=n)
        .map(|i| {
            let name = format!("b{i}");
            g.add_vertex(&name).expect("fresh name")
        })
        .collect();
    for &a in &avs {
        for &b in &bvs {
            g.add_edge(a, b, None).expect("valid edge");
        }
    }
    g
}

/// Prism over an `n`-cycle (the Cartesian product `C_n × K2`): two rims
/// `o1 … on` and `i1 … in` joined by spokes.
pub fn prism(n: usize) -> Graph {
    assert!(n >= 3, "a prism needs rims of length at least three");
    let mut g = Graph::new();
    let outer: Vec<VertexId> = (1..=n)
        .map(|i| {
            let name = format!("o{i}");
            g.add_vertex(&name).expect("fresh name")
        })
        .collect();
    let inner: Vec<VertexId> = (1..=n)
        .map(|i| {
            let name = format!("i{i}");
            g.add_vertex(&name).expect("fresh name")
        })
        .collect();
    for i in 0..n {
        let j = (i + 1) % n;
        g.add_edge(outer[i], outer[j], None).expect("valid edge");
        g.add_edge(inner[i], inner[j], None).expect("valid edge");
        g.add_edge(outer[i], inner[i], None).expect("valid edge");
    }
    g
}

/// The 3-dimensional cube graph `Q3` (equals the prism over `C4`).
pub fn cube() -> Graph {
    prism(4)
}

/// The Petersen graph: outer 5-cycle `o1 … o5`, inner pentagram `i1 … i5`,
/// spokes `oj—ij`.
pub fn petersen() -> Graph {
    let mut g = Graph::new();
    let outer: Vec<VertexId> = (1..=5)
        .map(|i| {
            let name = format!("o{i}");
            g.add_vertex(&name).expect("fresh name")
        })
        .collect();
    let inner: Vec<VertexId> = (1..=5)
        .map(|i| {
            let name = format!("i{i}");
            g.add_vertex(&name).expect("fresh name")
        })
        .collect();
    for i in 0..5 {
        g.add_edge(outer[i], outer[(i + 1) % 5], None).expect("valid edge");
        g.add_edge(inner[i], inner[(i + 2) % 5], None).expect("valid edge");
        g.add_edge(outer[i], inner[i], None).expect("valid edge");
    }
    g
}

/// The smallest cubic simple graph with a bridge: two copies of K4 with one
/// subdivided edge, the subdivision vertices joined by the bridge `e1—e2`.
/// Ten vertices, cubic, connected, and not 3-edge-colourable.
pub fn bridged_cubic_10() -> Graph {
    let mut g = Graph::new();
    let mut mid = Vec::new();
    for side in 1..=2 {
        let a = g.add_vertex(&format!("a{side}")).expect("fresh name");
        let b = g.add_vertex(&format!("b{side}")).expect("fresh name");
        let c = g.add_vertex(&format!("c{side}")).expect("fresh name");
        let d = g.add_vertex(&format!("d{side}")).expect("fresh name");
        let e = g.add_vertex(&format!("e{side}")).expect("fresh name");
        for (u, v) in [(a, b), (a, c), (a, d), (b, c), (b, d)] {
            g.add_edge(u, v, None).expect("valid edge");
        }
        g.add_edge(c, e, None).expect("valid edge");
        g.add_edge(d, e, None).expect("valid edge");
        mid.push(e);
    }
    g.add_edge(mid[0], mid[1], None).expect("valid edge");
    g
}

/// A spider: one centre `c` with legs of the given lengths, leg `i`'s
/// vertices named `l{i}_1 … l{i}_len`.
fn spider(legs: &[usize]) -> Graph {
    let mut g = Graph::new();
    let c = g.add_vertex("c").expect("fresh name");
    for (i, &len) in legs.iter().enumerate() {
        let mut prev = c;
        for step in 1..=len {
            let name = format!("l{}_{step}", i + 1);
            let v = g.add_vertex(&name).expect("fresh name");
            g.add_edge(prev, v, None).expect("valid edge");
            prev = v;
        }
    }
    g
}

/// The H-shaped tree: an edge `u—v` where each endpoint carries two leaves.
fn double_fork() -> Graph {
    let mut g = Graph::new();
    let u = g.add_vertex("u").expect("fresh name");
    let v = g.add_vertex("v").expect("fresh name");
    g.add_edge(u, v, None).expect("valid edge");
    for (end, tag) in [(u, "u"), (v, "v")] {
        for i in 1..=2 {
            let name = format!("{tag}{i}");
            let leaf = g.add_vertex(&name).expect("fresh name");
            g.add_edge(end, leaf, None).expect("valid edge");
        }
    }
    g
}

/// Five pairwise non-isomorphic trees with maximum degree exactly three and
/// at most eight vertices, from the star `K_{1,3}` up to an 8-vertex spider.
pub fn small_trees_degree3() -> Vec<Graph> {
    vec![
        star(3),              // 4 vertices
        spider(&[1, 1, 2]),   // 5 vertices
        spider(&[1, 2, 2]),   // 6 vertices
        double_fork(),        // 6 vertices, two degree-3 vertices
        spider(&[2, 2, 3]),   // 8 vertices
    ]
}

/// All connected cubic simple graphs on `n` labelled vertices, one
/// representative per isomorphism class, in a deterministic order.  Empty
/// for odd `n` (the handshake count is odd) and for `n < 4`.
pub fn enumerate_connected_cubic(n: usize) -> Vec<Graph> {
    if n < 4 || n % 2 == 1 {
        return Vec::new();
    }
    // Backtrack over the upper triangle of the adjacency matrix, vertex by
    // vertex; each vertex must finish with degree exactly three.
    let mut reps: Vec<Graph> = Vec::new();
    let mut adj = vec![vec![false; n]; n];
    let mut deg = vec![0usize; n];
    fn rec(
        v: usize,
        w: usize,
        n: usize,
        adj: &mut Vec<Vec<bool>>,
        deg: &mut Vec<usize>,
        reps: &mut Vec<Graph>,
    ) {
        if v == n {
            for d in deg.iter() {
                debug_assert_eq!(*d, 3);
            }
            let mut g = Graph::new();
            let vs: Vec<VertexId> = (1..=n)
                .map(|i| {
                    let name = format!("v{i}");
                    g.add_vertex(&name).expect("fresh name")
                })
                .collect();
            for i in 0..n {
                for j in i + 1..n {
                    if adj[i][j] {
                        g.add_edge(vs[i], vs[j], None).expect("valid edge");
                    }
                }
            }
            if !analysis::structural_predicates(&g).connected {
                return;
            }
            if reps.iter().all(|r| analysis::isomorphic(r, &g).is_none()) {
                reps.push(g);
            }
            return;
        }
        if w == n {
            if deg[v] == 3 {
                rec(v + 1, v + 2, n, adj, deg, reps);
            }
            return;
        }
        let need = 3 - deg[v];
        let slots = n - w;
        if need > slots {
            return;
        }
        // Try both settings of the edge {v, w}; skip the edge when either
        // endpoint is already full.
        if deg[v] < 3 && deg[w] < 3 {
            adj[v][w] = true;
            adj[w][v] = true;
            deg[v] += 1;
            deg[w] += 1;
            rec(v, w + 1, n, adj, deg, reps);
            adj[v][w] = false;
            adj[w][v] = false;
            deg[v] -= 1;
            deg[w] -= 1;
        }
        if need < slots {
            rec(v, w + 1, n, adj, deg, reps);
        }
    }
    rec(0, 1, n, &mut adj, &mut deg, &mut reps);
    reps
}

/// The hosts for the product-equivalence sweep: six connected graphs on at
/// most four vertices, each carrying semi-edges or a loop and therefore
/// admitting no partition into two sides crossed by every link.
pub fn product_sweep_hosts() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        out.push((
            format!("semi-path-{n}"),
            constructions::semi_path(n).expect("valid size").graph,
        ));
    }
    out.push((
        "semi-cycle-3".into(),
        constructions::cycle_semi(3).expect("valid size").graph,
    ));
    out.push((
        "semi-cycle-4".into(),
        constructions::cycle_semi(4).expect("valid size").graph,
    ));
    let mut lv = Graph::new();
    let v = lv.add_vertex("v").expect("fresh name");
    lv.add_loop(v, None).expect("valid loop");
    lv.add_semi_edge(v, None).expect("valid semi-edge");
    out.push(("loop-semi-vertex".into(), lv));
    out
}

/// The guests for the product-equivalence sweep: a deterministic mix of
/// bipartite and odd graphs on at most twelve vertices, including two with
/// semi-edges (which can never cover a product host).
pub fn product_sweep_guests() -> Vec<(String, Graph)> {
    let mut out: Vec<(String, Graph)> = Vec::new();
    for n in 3..=7usize {
        out.push((format!("cycle-{n}"), cycle(n)));
    }
    for n in [2usize, 5] {
        out.push((format!("path-{n}"), path(n)));
    }
    out.push(("complete-4".into(), complete(4)));
    out.push(("complete-bipartite-3-3".into(), complete_bipartite(3, 3)));
    out.push(("prism-3".into(), prism(3)));
    out.push(("cube".into(), cube()));
    out.push(("petersen".into(), petersen()));
    out.push(("star-3".into(), star(3)));
    out.push((
        "semi-cycle-4".into(),
        constructions::cycle_semi(4).expect("valid size").graph,
    ));
    out.push((
        "semi-path-2".into(),
        constructions::semi_path(2).expect("valid size").graph,
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LinkKind;

    #[test]
    fn classic_shapes() {
        let p = petersen();
        let r = analysis::structural_predicates(&p);
        assert_eq!(p.vertex_count(), 10);
        assert_eq!(p.link_count(), 15);
        assert!(r.connected && r.simple && !r.bipartite);
        assert_eq!(r.regular_degree, Some(3));
        assert_eq!(r.girth, Some(5));

        let c = cube();
        let rc = analysis::structural_predicates(&c);
        assert!(rc.connected && rc.simple && rc.bipartite);
        assert_eq!(rc.regular_degree, Some(3));
        assert_eq!(c.vertex_count(), 8);

        let k4 = complete(4);
        let r4 = analysis::structural_predicates(&k4);
        assert_eq!(r4.regular_degree, Some(3));
        assert_eq!(r4.girth, Some(3));
    }

    #[test]
    fn bridged_graph_has_a_bridge() {
        let g = bridged_cubic_10();
        let r = analysis::structural_predicates(&g);
        assert_eq!(g.vertex_count(), 10);
        assert!(r.connected && r.simple);
        assert_eq!(r.regular_degree, Some(3));
        // Removing the middle edge disconnects the graph; removing any
        // block-internal edge does not.
        let e1 = g.vertex("e1").unwrap();
        let e2 = g.vertex("e2").unwrap();
        let mut bridges = 0usize;
        for l in g.links() {
            let mut h = Graph::new();
            for v in g.vertices() {
                h.add_vertex(g.vertex_name(v)).unwrap();
            }
            for m in g.links() {
                if m.id == l.id {
                    continue;
                }
                let hu = h.vertex(g.vertex_name(m.ends[0])).unwrap();
                let hv = h.vertex(g.vertex_name(m.ends[1])).unwrap();
                h.add_edge(hu, hv, None).unwrap();
            }
            if !analysis::structural_predicates(&h).connected {
                bridges += 1;
                assert!(l.ends.contains(&e1) && l.ends.contains(&e2));
            }
        }
        assert_eq!(bridges, 1);
    }

    #[test]
    fn cubic_enumeration_matches_known_counts() {
        assert_eq!(enumerate_connected_cubic(4).len(), 1);
        assert_eq!(enumerate_connected_cubic(5).len(), 0);
        let six = enumerate_connected_cubic(6);
        assert_eq!(six.len(), 2);
        let eight = enumerate_connected_cubic(8);
        assert_eq!(eight.len(), 5);
        // K4, K33 and the triangular prism appear.
        assert!(analysis::isomorphic(&enumerate_connected_cubic(4)[0], &complete(4)).is_some());
        assert!(six
            .iter()
            .any(|g| analysis::isomorphic(g, &complete_bipartite(3, 3)).is_some()));
        assert!(six.iter().any(|g| analysis::isomorphic(g, &prism(3)).is_some()));
        // Every representative is connected, cubic, simple, and the
        // representatives are pairwise non-isomorphic.
        for (i, g) in eight.iter().enumerate() {
            let r = analysis::structural_predicates(g);
            assert!(r.connected && r.simple);
            assert_eq!(r.regular_degree, Some(3));
            for h in &eight[i + 1..] {
                assert!(analysis::isomorphic(g, h).is_none());
            }
        }
    }

    #[test]
    fn tree_shelf_is_five_distinct_small_trees() {
        let ts = small_trees_degree3();
        assert_eq!(ts.len(), 5);
        for (i, t) in ts.iter().enumerate() {
            let r = analysis::structural_predicates(t);
            assert!(r.is_tree && r.simple);
            assert!(t.vertex_count() <= 8);
            let max = t.vertices().map(|v| t.degree(v)).max().unwrap();
            assert_eq!(max, 3);
            for u in &ts[i + 1..] {
                assert!(analysis::isomorphic(t, u).is_none());
            }
        }
    }

    #[test]
    fn product_sweep_collections_have_the_advertised_shapes() {
        let hosts = product_sweep_hosts();
        assert!(hosts.len() >= 5);
        for (name, h) in &hosts {
            let r = analysis::structural_predicates(h);
            assert!(h.vertex_count() <= 4, "{name}");
            assert!(r.connected, "{name}");
            assert!(!r.bipartite, "{name}");
            assert!(
                h.links().any(|l| matches!(l.kind, LinkKind::SemiEdge | LinkKind::Loop)),
                "{name}"
            );
        }
        let guests = product_sweep_guests();
        assert!(guests.len() >= 10);
        for (name, g) in &guests {
            assert!(g.vertex_count() <= 12, "{name}");
            assert!(analysis::structural_predicates(g).connected, "{name}");
        }
    }
}
