//! Reeb graphs of nice fields on the cylinder with both ends collapsed to the
//! points `v-` and `v+`, computed as augmented contour trees (join and split
//! tree merge on the Freudenthal triangulation of the grid).

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::contour::{level_of_circle, trace_boundaries, PinchRule};
use crate::error::{Error, Result};
use crate::field::{check_nice, CylinderField, GridSpec};
use crate::numfmt::g12;

const NIL: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    VMinus,
    VPlus,
    Min,
    Max,
    Saddle,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::VMinus => "v_minus",
            NodeKind::VPlus => "v_plus",
            NodeKind::Min => "min",
            NodeKind::Max => "max",
            NodeKind::Saddle => "saddle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReebNode {
    pub id: usize,
    pub kind: NodeKind,
    pub f_value: f64,
    /// Grid cell index, `None` for `v-` and `v+`.
    pub cell: Option<usize>,
    /// Level label for nodes on the path between `v-` and `v+`.
    pub label: Option<Label>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReebEdge {
    pub a: usize,
    pub b: usize,
    /// `(min, max)` of f over the edge; the endpoint values.
    pub f_range: (f64, f64),
}

/// Closed interval of levels; the terminal labels are unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Label {
    pub lo: f64,
    pub hi: f64,
}

impl Label {
    pub fn contains(&self, p: f64) -> bool {
        self.lo <= p && p <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

fn inf_str(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        g12(x)
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(2))?;
        for x in [self.lo, self.hi] {
            if x.is_finite() {
                seq.serialize_element(&crate::numfmt::round12(x))?;
            } else {
                seq.serialize_element(&inf_str(x))?;
            }
        }
        seq.end()
    }
}

/// The triangulated band with its ends coned off, and its augmented contour tree.
#[derive(Debug)]
pub(crate) struct ContourTree {
    pub spec: GridSpec,
    pub j_lo: usize,
    pub rows: usize,
    pub values: Vec<f64>,
    /// Tree adjacency over all mesh vertices.
    pub adj: Vec<Vec<usize>>,
    /// Total area of the subtree hanging below each vertex (towards `v-`).
    pub subtree: Vec<f64>,
    pub tin: Vec<usize>,
    pub tout: Vec<usize>,
    /// Vertices from `v-` to `v+`.
    pub path: Vec<usize>,
    pub order_pos: Vec<usize>,
}

impl ContourTree {
    pub fn vm(&self) -> usize {
        self.values.len() - 2
    }

    pub fn vp(&self) -> usize {
        self.values.len() - 1
    }

    pub fn n_cells(&self) -> usize {
        self.values.len() - 2
    }

    /// Grid index of a mesh vertex.
    pub fn cell_of(&self, v: usize) -> Option<usize> {
        if v >= self.n_cells() {
            return None;
        }
        let (iq, r) = (v / self.rows, v % self.rows);
        Some(self.spec.idx(iq, r + self.j_lo))
    }

    fn above(&self, a: usize, b: usize) -> bool {
        self.order_pos[b] > self.order_pos[a]
    }

    fn is_critical(&self, v: usize) -> bool {
        if v >= self.n_cells() {
            return true;
        }
        let nb = &self.adj[v];
        if nb.len() != 2 {
            return true;
        }
        self.above(v, nb[0]) == self.above(v, nb[1])
    }

    fn kind(&self, v: usize) -> NodeKind {
        if v == self.vm() {
            return NodeKind::VMinus;
        }
        if v == self.vp() {
            return NodeKind::VPlus;
        }
        let nb = &self.adj[v];
        let ups = nb.iter().filter(|&&u| self.above(v, u)).count();
        if nb.len() == 1 {
            if ups == 1 {
                NodeKind::Min
            } else {
                NodeKind::Max
            }
        } else {
            NodeKind::Saddle
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// Neighbours in the Freudenthal triangulation of rows `j_lo..j_lo+rows`,
/// with `vm` coning the bottom row and `vp` the top row.
fn mesh_neighbours(nq: usize, rows: usize, v: usize, out: &mut Vec<usize>) {
    let n = nq * rows;
    let (vm, vp) = (n, n + 1);
    out.clear();
    if v == vm {
        out.extend((0..nq).map(|iq| iq * rows));
        return;
    }
    if v == vp {
        out.extend((0..nq).map(|iq| iq * rows + rows - 1));
        return;
    }
    let (iq, r) = (v / rows, v % rows);
    let ip1 = (iq + 1) % nq;
    let im1 = (iq + nq - 1) % nq;
    out.push(ip1 * rows + r);
    out.push(im1 * rows + r);
    if r + 1 < rows {
        out.push(iq * rows + r + 1);
        out.push(ip1 * rows + r + 1);
    } else {
        out.push(vp);
    }
    if r > 0 {
        out.push(iq * rows + r - 1);
        out.push(im1 * rows + r - 1);
    } else {
        out.push(vm);
    }
}

fn remove_item(v: &mut Vec<usize>, x: usize) {
    if let Some(k) = v.iter().position(|&y| y == x) {
        v.swap_remove(k);
    }
}

fn replace_item(v: &mut [usize], from: usize, to: usize) {
    if let Some(slot) = v.iter_mut().find(|y| **y == from) {
        *slot = to;
    }
}

/// Augmented contour tree of the compactified support band of `f`.
pub(crate) fn contour_tree(f: &CylinderField) -> Result<ContourTree> {
    let (j_lo, j_hi) = f.row_band().ok_or(Error::ZeroField)?;
    let spec = f.spec;
    let nq = spec.nq;
    let rows = j_hi - j_lo + 1;
    let n_cells = nq * rows;
    let n = n_cells + 2;
    let (vm, vp) = (n_cells, n_cells + 1);

    let mut values = vec![0.0; n];
    let mut area = vec![spec.cell_area(); n];
    let mut rank = vec![0usize; n];
    for iq in 0..nq {
        for r in 0..rows {
            let v = iq * rows + r;
            let c = spec.idx(iq, r + j_lo);
            values[v] = f.values[c];
            rank[v] = c + 1;
        }
    }
    area[vm] = j_lo as f64 * spec.dp();
    area[vp] = (spec.np - 1 - j_hi) as f64 * spec.dp();
    rank[vm] = 0;
    rank[vp] = usize::MAX;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]).then(rank[a].cmp(&rank[b])));
    let mut pos = vec![0usize; n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }

    let mut nb = Vec::with_capacity(nq.max(8));

    // join tree: sweep from the top, merging superlevel components
    let mut jt_down = vec![NIL; n];
    let mut jt_up: Vec<Vec<usize>> = vec![Vec::new(); n];
    {
        let mut uf = UnionFind::new(n);
        let mut lowest: Vec<usize> = (0..n).collect();
        for &v in order.iter().rev() {
            mesh_neighbours(nq, rows, v, &mut nb);
            for &u in nb.iter() {
                if pos[u] < pos[v] {
                    continue;
                }
                let ru = uf.find(u);
                let rv = uf.find(v);
                if ru == rv {
                    continue;
                }
                let low = lowest[ru];
                jt_down[low] = v;
                jt_up[v].push(low);
                uf.parent[ru] = rv;
                lowest[rv] = v;
            }
        }
    }
    // split tree: sweep from the bottom, merging sublevel components
    let mut st_up = vec![NIL; n];
    let mut st_down: Vec<Vec<usize>> = vec![Vec::new(); n];
    {
        let mut uf = UnionFind::new(n);
        let mut highest: Vec<usize> = (0..n).collect();
        for &v in order.iter() {
            mesh_neighbours(nq, rows, v, &mut nb);
            for &u in nb.iter() {
                if pos[u] > pos[v] {
                    continue;
                }
                let ru = uf.find(u);
                let rv = uf.find(v);
                if ru == rv {
                    continue;
                }
                let high = highest[ru];
                st_up[high] = v;
                st_down[v].push(high);
                uf.parent[ru] = rv;
                highest[rv] = v;
            }
        }
    }

    // merge
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut removed = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n)
        .filter(|&v| jt_up[v].len() + st_down[v].len() == 1)
        .collect();
    let mut n_edges = 0usize;
    while n_edges + 1 < n {
        let Some(v) = queue.pop_front() else {
            return Err(Error::Resolution("contour tree merge stalled".into()));
        };
        if removed[v] || jt_up[v].len() + st_down[v].len() != 1 {
            continue;
        }
        let u;
        if jt_up[v].is_empty() {
            // upper leaf
            u = jt_down[v];
            remove_item(&mut jt_up[u], v);
            let d = st_down[v][0];
            let w = st_up[v];
            st_up[d] = w;
            if w != NIL {
                replace_item(&mut st_down[w], v, d);
            }
        } else {
            // lower leaf
            u = st_up[v];
            remove_item(&mut st_down[u], v);
            let w = jt_up[v][0];
            let d = jt_down[v];
            jt_down[w] = d;
            if d != NIL {
                replace_item(&mut jt_up[d], v, w);
            }
        }
        if u == NIL {
            return Err(Error::Resolution("dangling contour tree arc".into()));
        }
        removed[v] = true;
        adj[v].push(u);
        adj[u].push(v);
        n_edges += 1;
        if jt_up[u].len() + st_down[u].len() == 1 {
            queue.push_back(u);
        }
    }

    // root at v+: parents, Euler tour and subtree areas
    let mut parent = vec![NIL; n];
    let mut tin = vec![0usize; n];
    let mut tout = vec![0usize; n];
    let mut subtree = area.clone();
    let mut visited = vec![false; n];
    let mut stack = vec![(vp, 0usize)];
    visited[vp] = true;
    let mut clock = 0usize;
    let mut post = Vec::with_capacity(n);
    tin[vp] = clock;
    clock += 1;
    while let Some(&mut (v, ref mut k)) = stack.last_mut() {
        if *k < adj[v].len() {
            let u = adj[v][*k];
            *k += 1;
            if u == parent[v] {
                continue;
            }
            if visited[u] {
                return Err(Error::Resolution("cycle detected in contour tree".into()));
            }
            visited[u] = true;
            parent[u] = v;
            tin[u] = clock;
            clock += 1;
            stack.push((u, 0));
        } else {
            tout[v] = clock;
            post.push(v);
            stack.pop();
        }
    }
    if clock != n {
        return Err(Error::Resolution("contour tree is disconnected".into()));
    }
    for &v in &post {
        if parent[v] != NIL {
            subtree[parent[v]] += subtree[v];
        }
    }
    let mut path = vec![vm];
    let mut x = vm;
    while parent[x] != NIL {
        x = parent[x];
        path.push(x);
    }

    Ok(ContourTree {
        spec,
        j_lo,
        rows,
        values,
        adj,
        subtree,
        tin,
        tout,
        path,
        order_pos: pos,
    })
}

/// Reeb graph of a field, with the augmented tree kept for labelling.
#[derive(Debug, Clone, Serialize)]
pub struct ReebGraph {
    pub nodes: Vec<ReebNode>,
    pub edges: Vec<ReebEdge>,
    pub is_tree: bool,
    #[serde(skip)]
    pub(crate) tree: Arc<ContourTree>,
    /// Mesh vertex of each node.
    #[serde(skip)]
    pub(crate) vertex: Vec<usize>,
}

impl ReebGraph {
    pub fn v_minus(&self) -> usize {
        self.nodes
            .iter()
            .position(|n| n.kind == NodeKind::VMinus)
            .expect("v- present")
    }

    pub fn v_plus(&self) -> usize {
        self.nodes
            .iter()
            .position(|n| n.kind == NodeKind::VPlus)
            .expect("v+ present")
    }

    pub fn degree(&self, id: usize) -> usize {
        self.edges.iter().filter(|e| e.a == id || e.b == id).count()
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }
}

/// Label of a path vertex at position `k` of `path`.
fn path_label(t: &ContourTree, k: usize) -> Label {
    let base = t.spec.p_min;
    let last = t.path.len() - 1;
    let lo = if k == 0 {
        f64::NEG_INFINITY
    } else {
        base + t.subtree[t.path[k - 1]]
    };
    let hi = if k == last {
        f64::INFINITY
    } else {
        base + t.subtree[t.path[k]]
    };
    Label { lo, hi }
}

/// Reeb graph of a nice field.
pub fn build_reeb(f: &CylinderField) -> Result<ReebGraph> {
    let report = check_nice(f, 1e-12)?;
    if !report.is_nice {
        return Err(Error::NotNice(report.violations.join("; ")));
    }
    build_reeb_unchecked(f)
}

pub(crate) fn build_reeb_unchecked(f: &CylinderField) -> Result<ReebGraph> {
    let t = contour_tree(f)?;
    let n = t.values.len();
    let mut node_of = vec![NIL; n];
    let mut on_path = vec![NIL; n];
    for (k, &v) in t.path.iter().enumerate() {
        on_path[v] = k;
    }
    let mut nodes = Vec::new();
    let mut vertex = Vec::new();
    // deterministic node order: v-, v+, then critical cells by grid index
    let mut crit: Vec<usize> = (0..t.n_cells()).filter(|&v| t.is_critical(v)).collect();
    crit.sort_by_key(|&v| t.cell_of(v));
    for v in [t.vm(), t.vp()].into_iter().chain(crit) {
        let id = nodes.len();
        node_of[v] = id;
        let label = (on_path[v] != NIL).then(|| path_label(&t, on_path[v]));
        nodes.push(ReebNode {
            id,
            kind: t.kind(v),
            f_value: t.values[v],
            cell: t.cell_of(v),
            label,
        });
        vertex.push(v);
    }
    let mut edges = Vec::new();
    for (id, &v) in vertex.iter().enumerate() {
        for &first in &t.adj[v] {
            let mut prev = v;
            let mut cur = first;
            while node_of[cur] == NIL {
                let next = if t.adj[cur][0] == prev {
                    t.adj[cur][1]
                } else {
                    t.adj[cur][0]
                };
                prev = cur;
                cur = next;
            }
            let other = node_of[cur];
            if other > id {
                let (x, y) = (t.values[v], t.values[cur]);
                edges.push(ReebEdge {
                    a: id,
                    b: other,
                    f_range: (x.min(y), x.max(y)),
                });
            }
        }
    }
    let is_tree = edges.len() + 1 == nodes.len();
    if !is_tree {
        return Err(Error::Resolution("Reeb graph is not a tree".into()));
    }
    Ok(ReebGraph {
        nodes,
        edges,
        is_tree,
        tree: Arc::new(t),
        vertex,
    })
}

/// The unique path of nodes from `v-` to `v+`.
pub fn gamma0(g: &ReebGraph) -> Result<Vec<usize>> {
    let n = g.nodes.len();
    let (src, dst) = (g.v_minus(), g.v_plus());
    let mut adj = vec![Vec::new(); n];
    for e in &g.edges {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    let mut prev = vec![NIL; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([src]);
    seen[src] = true;
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    if !seen[dst] {
        return Err(Error::Invalid("v- and v+ are not connected".into()));
    }
    let mut path = vec![dst];
    let mut x = dst;
    while x != src {
        x = prev[x];
        path.push(x);
    }
    path.reverse();
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeSample {
    pub t: f64,
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathNode {
    pub node: usize,
    pub kind: NodeKind,
    pub f_value: f64,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathEdge {
    pub from: usize,
    pub to: usize,
    pub samples: Vec<EdgeSample>,
}

/// One vertex of the triangulated path between `v-` and `v+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinePoint {
    pub f_value: f64,
    pub label: Label,
    /// Node id when the vertex is critical, otherwise the index of its path edge.
    pub node: Option<usize>,
    pub edge: usize,
}

/// The path `Γ0` with level labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPath {
    pub nodes: Vec<PathNode>,
    pub edges: Vec<PathEdge>,
    pub fine: Vec<FinePoint>,
    /// `[p', p'']`.
    pub support: (f64, f64),
}

#[derive(Serialize)]
struct LabelEntry<'a> {
    kind: &'a str,
    f_value: f64,
    label: Label,
}

impl LabeledPath {
    /// Ordered `{kind, f_value, label}` records, infinities as strings.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<LabelEntry> = self
            .nodes
            .iter()
            .map(|n| LabelEntry {
                kind: n.kind.as_str(),
                f_value: crate::numfmt::round12(n.f_value),
                label: n.label,
            })
            .collect();
        serde_json::to_value(entries).expect("serializable")
    }

    /// Value of `f` at the path point whose label contains `p`.
    pub fn value_at(&self, p: f64) -> f64 {
        match self.locate(p) {
            Some(k) => self.fine[k].f_value,
            None => 0.0,
        }
    }

    fn locate(&self, p: f64) -> Option<usize> {
        if p.is_nan() {
            return None;
        }
        let k = self.fine.partition_point(|x| x.label.hi < p);
        if k >= self.fine.len() {
            return None;
        }
        // on a shared endpoint prefer a critical vertex
        if self.fine[k].node.is_none()
            && self.fine[k].label.hi == p
            && k + 1 < self.fine.len()
            && self.fine[k + 1].node.is_some()
        {
            return Some(k + 1);
        }
        Some(k)
    }
}

/// Where a level sits on the labelled path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathPoint {
    Vertex { node: usize },
    Edge { edge: usize, f_value: f64 },
}

/// Attach labels to `Γ0` and verify them: for sampled points of every edge the
/// region cut off on the `v-` side is traced and the level of its upper boundary
/// circle is recomputed.
pub fn label_path(
    g: &ReebGraph,
    path: &[usize],
    f: &CylinderField,
    n_samples: usize,
) -> Result<LabeledPath> {
    if n_samples < 8 {
        return Err(Error::Invalid("need at least 8 samples per edge".into()));
    }
    let t = &g.tree;
    if !t.spec.same_sampling(&f.spec) {
        return Err(Error::Grid("field does not match the Reeb graph".into()));
    }
    let expected: Vec<usize> = t
        .path
        .iter()
        .filter(|&&v| t.is_critical(v))
        .map(|&v| g.vertex.iter().position(|&x| x == v).expect("critical vertex has a node"))
        .collect();
    if expected != path {
        return Err(Error::Invalid("node list is not the v- to v+ path of this graph".into()));
    }

    let mut nodes = Vec::with_capacity(path.len());
    let mut edges: Vec<PathEdge> = Vec::new();
    let mut fine = Vec::with_capacity(t.path.len());
    let mut segment: Vec<usize> = Vec::new();
    let mut prev_node = NIL;
    for (k, &v) in t.path.iter().enumerate() {
        let label = path_label(t, k);
        if t.is_critical(v) {
            let id = g.vertex.iter().position(|&x| x == v).expect("node");
            if prev_node != NIL {
                let samples = sample_edge(t, &segment, n_samples)?;
                edges.push(PathEdge {
                    from: prev_node,
                    to: id,
                    samples,
                });
                segment.clear();
            }
            nodes.push(PathNode {
                node: id,
                kind: g.nodes[id].kind,
                f_value: t.values[v],
                label,
            });
            fine.push(FinePoint {
                f_value: t.values[v],
                label,
                node: Some(id),
                edge: edges.len(),
            });
            prev_node = id;
        } else {
            segment.push(k);
            fine.push(FinePoint {
                f_value: t.values[v],
                label,
                node: None,
                edge: edges.len(),
            });
        }
    }

    for w in fine.windows(2) {
        if w[1].label.lo < w[0].label.hi - 1e-12 || w[1].label.lo > w[0].label.hi + 1e-12 {
            return Err(Error::Topology("labels along the path do not tile the line".into()));
        }
    }
    for n in &nodes[1..nodes.len() - 1] {
        if n.label.lo >= n.label.hi {
            return Err(Error::Topology(format!(
                "degenerate label at node {}",
                n.node
            )));
        }
    }
    let support = (
        nodes[0].label.hi,
        nodes[nodes.len() - 1].label.lo,
    );
    Ok(LabeledPath {
        nodes,
        edges,
        fine,
        support,
    })
}

/// Trace the boundary of the `v-` side of sampled path vertices.
fn sample_edge(t: &ContourTree, segment: &[usize], n_samples: usize) -> Result<Vec<EdgeSample>> {
    let m = segment.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut picks: Vec<usize> = if m <= n_samples {
        (0..m).collect()
    } else {
        // cluster towards both ends, where the vertex labels are limits
        (0..n_samples)
            .map(|s| {
                let x = 0.5 * (1.0 - (std::f64::consts::PI * s as f64 / (n_samples - 1) as f64).cos());
                (x * (m - 1) as f64).round() as usize
            })
            .collect()
    };
    picks.dedup();
    let spec = t.spec;
    let mut out = Vec::with_capacity(picks.len());
    let mut last_level = f64::NEG_INFINITY;
    for s in picks {
        let k = segment[s];
        let v = t.path[k];
        let mut mask = vec![false; spec.len()];
        for iq in 0..spec.nq {
            for ip in 0..t.j_lo {
                mask[spec.idx(iq, ip)] = true;
            }
        }
        for x in 0..t.n_cells() {
            if t.tin[x] >= t.tin[v] && t.tin[x] < t.tout[v] {
                mask[t.cell_of(x).expect("cell")] = true;
            }
        }
        let contours = trace_boundaries(&spec, &mask, PinchRule::Six, None)?;
        let inner: Vec<_> = contours.iter().filter(|c| c.grid_edge.is_none()).collect();
        if inner.len() != 1 {
            return Err(Error::Topology(format!(
                "region below a path point has {} inner boundary circles",
                inner.len()
            )));
        }
        if inner[0].winding == 0 {
            return Err(Error::Topology(
                "path point corresponds to a contractible level component".into(),
            ));
        }
        let level = level_of_circle(inner[0])?;
        let expected = spec.p_min + t.subtree[v];
        if (level - expected).abs() > 1e-9 {
            return Err(Error::Topology(format!(
                "traced level {level} disagrees with label {expected}"
            )));
        }
        if level < last_level - 1e-12 {
            return Err(Error::Topology("levels decrease along the path".into()));
        }
        last_level = level;
        out.push(EdgeSample {
            t: t.values[v],
            level,
        });
    }
    Ok(out)
}

/// The point of `Γ0` whose label contains `p0`.
pub fn iota(lp: &LabeledPath, p0: f64) -> Result<PathPoint> {
    let k = lp
        .locate(p0)
        .ok_or_else(|| Error::Topology(format!("labels do not cover {p0}")))?;
    let x = lp.fine[k];
    Ok(match x.node {
        Some(node) => PathPoint::Vertex { node },
        None => PathPoint::Edge {
            edge: x.edge,
            f_value: x.f_value,
        },
    })
}

fn label_text(l: &Label) -> String {
    let open = if l.lo.is_finite() { "[" } else { "(" };
    let close = if l.hi.is_finite() { "]" } else { ")" };
    format!("{open}{}, {}{close}", inf_str(l.lo), inf_str(l.hi))
}

/// DOT rendering: one line per node, then one per edge, upward in f.
pub fn export_dot(g: &ReebGraph) -> String {
    let mut s = String::from("digraph reeb {\n");
    for n in &g.nodes {
        let label = n.label.as_ref().map(label_text).unwrap_or_default();
        let _ = writeln!(
            s,
            "  n{} [kind=\"{}\", f=\"{}\", label=\"{}\"];",
            n.id,
            n.kind.as_str(),
            g12(n.f_value),
            label
        );
    }
    for e in &g.edges {
        let (lo, hi) = if g.nodes[e.a].f_value <= g.nodes[e.b].f_value {
            (e.a, e.b)
        } else {
            (e.b, e.a)
        };
        let _ = writeln!(s, "  n{lo} -> n{hi};");
    }
    s.push_str("}\n");
    s
}
