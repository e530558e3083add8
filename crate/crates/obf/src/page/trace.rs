//! Face tracing for slice diagrams.
//!
//! Each connected component (island) of the diagram is traced from its
//! rotation system alone; a component embeds in the plane exactly when its
//! vertex/edge/walk counts satisfy Euler's formula. Islands are then merged
//! into page faces along their anchors. The resulting face map is the
//! realizability certificate: the Euler characteristic of the page computed
//! from it must equal `2 - r`.

use super::diagram::*;
use crate::error::SliceError;
use crate::ids::{CircleId, ElliId, LeafId, PunctureId};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Vtx {
    E(ElliId),
    P(PunctureId),
    Phantom(CircleId),
    CMark(LeafId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum EdgeKind {
    Seg {
        circle: CircleId,
        after: Option<ElliId>,
    },
    Leaf(LeafId),
}

struct Edge {
    kind: EdgeKind,
    tail: usize,
    head: usize,
}

/// Identifier of a merged page face: the smallest dart on its boundary.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceId(pub Dart);

impl std::fmt::Debug for FaceId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "face[{:?}]", self.0)
    }
}

/// One merged page face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Boundary walks, one per traced orbit, each named by its canonical dart.
    pub walks: Vec<Dart>,
    /// Islands anchored directly into this face.
    pub islands: Vec<IslandKey>,
    /// Punctures on the boundary walks of this face.
    pub punctures: Vec<PunctureId>,
}

impl Face {
    /// Euler characteristic of the open face (a planar surface with
    /// `walks.len()` boundary circles).
    pub fn chi(&self) -> i64 {
        2 - self.walks.len() as i64
    }
}

/// The traced and merged face structure of one slice.
#[derive(Debug)]
pub struct FaceMap {
    /// Euler characteristic of the page recomputed from the trace.
    pub chi: i64,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub faces: BTreeMap<FaceId, Face>,
    dart_orbit: BTreeMap<Dart, Dart>,
    orbit_walk: BTreeMap<Dart, Vec<Dart>>,
    orbit_face: BTreeMap<Dart, FaceId>,
    holes: BTreeMap<CircleId, Dart>,
    island_of_circle: BTreeMap<CircleId, IslandKey>,
    island_of_leaf: BTreeMap<LeafId, IslandKey>,
    island_of_puncture: BTreeMap<PunctureId, IslandKey>,
    outer_of_island: BTreeMap<IslandKey, Dart>,
}

impl FaceMap {
    /// Canonical walk containing the dart.
    pub fn orbit(&self, d: &Dart) -> Option<&Dart> {
        self.dart_orbit.get(d)
    }

    pub fn walk(&self, orbit: &Dart) -> Option<&[Dart]> {
        self.orbit_walk.get(orbit).map(|w| w.as_slice())
    }

    /// The merged page face a dart borders, or `None` for hole-side darts.
    pub fn face_of(&self, d: &Dart) -> Option<&FaceId> {
        self.orbit_face.get(self.dart_orbit.get(d)?)
    }

    pub fn hole_orbit(&self, c: &CircleId) -> Option<&Dart> {
        self.holes.get(c)
    }

    pub fn is_hole(&self, orbit: &Dart) -> bool {
        self.holes.values().any(|h| h == orbit)
    }

    pub fn island_of_leaf(&self, l: &LeafId) -> Option<&IslandKey> {
        self.island_of_leaf.get(l)
    }

    pub fn island_of_circle(&self, c: &CircleId) -> Option<&IslandKey> {
        self.island_of_circle.get(c)
    }

    pub fn island_of_puncture(&self, p: &PunctureId) -> Option<&IslandKey> {
        self.island_of_puncture.get(p)
    }

    pub fn islands(&self) -> BTreeSet<IslandKey> {
        self.island_of_circle
            .values()
            .chain(self.island_of_leaf.values())
            .cloned()
            .collect()
    }

    /// Outward-facing page walk of an island (absent only for the root).
    pub fn outer_of(&self, key: &IslandKey) -> Option<&Dart> {
        self.outer_of_island.get(key)
    }
}

struct Uf(Vec<usize>);

impl Uf {
    fn new(n: usize) -> Self {
        Uf((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

struct Cx {
    verts: Vec<Vtx>,
    edges: Vec<Edge>,
    /// darts leaving each vertex in counterclockwise order
    rot: Vec<Vec<usize>>,
}

impl Cx {
    fn head(&self, d: usize) -> usize {
        let e = &self.edges[d >> 1];
        if d & 1 == 0 {
            e.head
        } else {
            e.tail
        }
    }

    fn public(&self, d: usize) -> Dart {
        let e = &self.edges[d >> 1];
        let side = if d & 1 == 0 { Side::L } else { Side::R };
        match &e.kind {
            EdgeKind::Seg { circle, after } => Dart::Seg {
                circle: circle.clone(),
                after: after.clone(),
                side,
            },
            EdgeKind::Leaf(l) => Dart::Leaf {
                leaf: l.clone(),
                side,
            },
        }
    }

    /// Face successor: the dart before the reversal in the rotation at the
    /// head vertex. Traces the face on the left of forward darts.
    fn next(&self, d: usize) -> usize {
        let v = self.head(d);
        let rev = d ^ 1;
        let r = &self.rot[v];
        let pos = r.iter().position(|&x| x == rev).expect("dart in rotation");
        r[(pos + r.len() - 1) % r.len()]
    }
}

fn build_complex(frame: &Frame, slice: &Slice) -> Result<Cx, SliceError> {
    let mut verts: Vec<Vtx> = Vec::new();
    let mut vmap: BTreeMap<Vtx, usize> = BTreeMap::new();
    let add_vert = |verts: &mut Vec<Vtx>, vmap: &mut BTreeMap<Vtx, usize>, v: Vtx| -> usize {
        if let Some(&i) = vmap.get(&v) {
            return i;
        }
        verts.push(v.clone());
        vmap.insert(v, verts.len() - 1);
        verts.len() - 1
    };

    let mut edges: Vec<Edge> = Vec::new();

    // binding circles and their segments
    let mut seg_edges: BTreeMap<(CircleId, Option<ElliId>), usize> = BTreeMap::new();
    for c in &frame.page.circles {
        let order = slice.orders.get(c).cloned().unwrap_or_default();
        if order.is_empty() {
            let v = add_vert(&mut verts, &mut vmap, Vtx::Phantom(c.clone()));
            edges.push(Edge {
                kind: EdgeKind::Seg {
                    circle: c.clone(),
                    after: None,
                },
                tail: v,
                head: v,
            });
            seg_edges.insert((c.clone(), None), edges.len() - 1);
        } else {
            let k = order.len();
            for i in 0..k {
                let t = add_vert(&mut verts, &mut vmap, Vtx::E(order[i].clone()));
                let h = add_vert(&mut verts, &mut vmap, Vtx::E(order[(i + 1) % k].clone()));
                edges.push(Edge {
                    kind: EdgeKind::Seg {
                        circle: c.clone(),
                        after: Some(order[i].clone()),
                    },
                    tail: t,
                    head: h,
                });
                seg_edges.insert((c.clone(), Some(order[i].clone())), edges.len() - 1);
            }
        }
    }

    // leaves
    let mut leaf_edges: BTreeMap<LeafId, usize> = BTreeMap::new();
    for (id, shape) in &slice.leaves {
        match shape {
            LeafShape::Circle { .. } => {
                let v = add_vert(&mut verts, &mut vmap, Vtx::CMark(id.clone()));
                edges.push(Edge {
                    kind: EdgeKind::Leaf(id.clone()),
                    tail: v,
                    head: v,
                });
            }
            LeafShape::Arc(..) => {
                let (from, to) = oriented_ends(frame, shape).map_err(|e| match e {
                    SliceError::BArcSigns(_) => SliceError::BArcSigns(id.clone()),
                    other => other,
                })?;
                let vt = match from {
                    EndPt::E(e) => Vtx::E(e),
                    EndPt::P(p) => Vtx::P(p),
                };
                let vh = match to {
                    EndPt::E(e) => Vtx::E(e),
                    EndPt::P(p) => Vtx::P(p),
                };
                let t = add_vert(&mut verts, &mut vmap, vt);
                let h = add_vert(&mut verts, &mut vmap, vh);
                edges.push(Edge {
                    kind: EdgeKind::Leaf(id.clone()),
                    tail: t,
                    head: h,
                });
            }
        }
        leaf_edges.insert(id.clone(), edges.len() - 1);
    }

    // rotations
    let mut rot: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    for (vi, v) in verts.iter().enumerate() {
        match v {
            Vtx::E(e) => {
                let c = frame.circle_of(e)?;
                let order = &slice.orders[c];
                let k = order.len();
                let i = order.iter().position(|x| x == e).unwrap();
                let out_edge = seg_edges[&(c.clone(), Some(order[i].clone()))];
                let in_edge = seg_edges[&(c.clone(), Some(order[(i + k - 1) % k].clone()))];
                let (leaf_id, _) = slice.leaf_at_elliptic(e).ok_or(SliceError::Radiality {
                    elliptic: e.clone(),
                    found: 0,
                })?;
                let le = leaf_edges[leaf_id];
                let leaf_dart = if edges[le].tail == vi { le << 1 } else { (le << 1) | 1 };
                // counterclockwise around the vertex: ahead along the circle,
                // then the leaf into the page, then backwards along the circle
                rot[vi] = vec![out_edge << 1, leaf_dart, (in_edge << 1) | 1];
            }
            Vtx::Phantom(c) => {
                let e = seg_edges[&(c.clone(), None)];
                rot[vi] = vec![e << 1, (e << 1) | 1];
            }
            Vtx::CMark(l) => {
                let e = leaf_edges[l];
                rot[vi] = vec![e << 1, (e << 1) | 1];
            }
            Vtx::P(p) => {
                let (leaf_id, _) = slice
                    .leaf_at_puncture(p)
                    .ok_or_else(|| SliceError::PunctureDegree(p.clone(), 0))?;
                let le = leaf_edges[leaf_id];
                let d = if edges[le].tail == vi { le << 1 } else { (le << 1) | 1 };
                rot[vi] = vec![d];
            }
        }
    }

    Ok(Cx { verts, edges, rot })
}

/// Trace the diagram: check well-formedness, per-island planarity and
/// placement consistency, and return the merged face structure.
pub fn trace_faces(frame: &Frame, slice: &Slice) -> Result<FaceMap, SliceError> {
    check_wellformed(frame, slice)?;
    let cx = build_complex(frame, slice)?;

    // islands: connected components of the complex
    let mut uf = Uf::new(cx.verts.len());
    for e in &cx.edges {
        uf.union(e.tail, e.head);
    }
    let mut island_key: BTreeMap<usize, IslandKey> = BTreeMap::new();
    for (vi, v) in cx.verts.iter().enumerate() {
        let root = uf.find(vi);
        let candidate = match v {
            Vtx::E(e) => Some(IslandKey::Circle(frame.circle_of(e)?.clone())),
            Vtx::Phantom(c) => Some(IslandKey::Circle(c.clone())),
            Vtx::CMark(l) => Some(IslandKey::CCircle(l.clone())),
            Vtx::P(_) => None,
        };
        if let Some(k) = candidate {
            island_key
                .entry(root)
                .and_modify(|cur| {
                    if k < *cur {
                        *cur = k.clone();
                    }
                })
                .or_insert(k);
        }
    }

    let island_of_vert = |uf: &mut Uf, vi: usize| island_key[&uf.find(vi)].clone();

    // orbits
    let ndarts = cx.edges.len() * 2;
    let mut orbit_of: Vec<Option<usize>> = vec![None; ndarts];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for d0 in 0..ndarts {
        if orbit_of[d0].is_some() {
            continue;
        }
        let id = orbits.len();
        let mut walk = Vec::new();
        let mut d = d0;
        loop {
            orbit_of[d] = Some(id);
            walk.push(d);
            d = cx.next(d);
            if d == d0 {
                break;
            }
        }
        orbits.push(walk);
    }

    // canonical names and walks
    let mut orbit_canon: Vec<Dart> = Vec::with_capacity(orbits.len());
    let mut orbit_walk: BTreeMap<Dart, Vec<Dart>> = BTreeMap::new();
    let mut dart_orbit: BTreeMap<Dart, Dart> = BTreeMap::new();
    for walk in &orbits {
        let pubs: Vec<Dart> = walk.iter().map(|&d| cx.public(d)).collect();
        let min_pos = pubs
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        let canon = pubs[min_pos].clone();
        let rotated: Vec<Dart> = pubs[min_pos..]
            .iter()
            .chain(pubs[..min_pos].iter())
            .cloned()
            .collect();
        for p in &pubs {
            dart_orbit.insert(p.clone(), canon.clone());
        }
        orbit_walk.insert(canon.clone(), rotated);
        orbit_canon.push(canon);
    }

    // per-island planarity
    let mut isl_v: BTreeMap<IslandKey, i64> = BTreeMap::new();
    let mut isl_e: BTreeMap<IslandKey, i64> = BTreeMap::new();
    let mut isl_f: BTreeMap<IslandKey, i64> = BTreeMap::new();
    for vi in 0..cx.verts.len() {
        *isl_v.entry(island_of_vert(&mut uf, vi)).or_default() += 1;
    }
    for e in &cx.edges {
        *isl_e.entry(island_of_vert(&mut uf, e.tail)).or_default() += 1;
    }
    for walk in &orbits {
        let vi = cx.head(walk[0]);
        *isl_f.entry(island_of_vert(&mut uf, vi)).or_default() += 1;
    }
    for (k, v) in &isl_v {
        let chi = v - isl_e.get(k).unwrap_or(&0) + isl_f.get(k).unwrap_or(&0);
        if chi != 2 {
            return Err(SliceError::NonPlanar {
                witness: format!("{k:?}"),
                chi,
            });
        }
    }

    // hole orbits: face on the right of each circle's forward direction
    let mut holes: BTreeMap<CircleId, Dart> = BTreeMap::new();
    for c in &frame.page.circles {
        let order = slice.orders.get(c).cloned().unwrap_or_default();
        let after = order.first().cloned();
        let d = Dart::Seg {
            circle: c.clone(),
            after,
            side: Side::R,
        };
        holes.insert(c.clone(), dart_orbit[&d].clone());
    }
    let hole_set: BTreeSet<&Dart> = holes.values().collect();

    // island membership tables
    let mut island_of_circle = BTreeMap::new();
    let mut island_of_leaf = BTreeMap::new();
    let mut island_of_puncture = BTreeMap::new();
    for (vi, v) in cx.verts.iter().enumerate() {
        let k = island_of_vert(&mut uf, vi);
        match v {
            Vtx::E(e) => {
                island_of_circle.insert(frame.circle_of(e)?.clone(), k);
            }
            Vtx::Phantom(c) => {
                island_of_circle.insert(c.clone(), k);
            }
            Vtx::P(p) => {
                island_of_puncture.insert(p.clone(), k);
            }
            Vtx::CMark(l) => {
                island_of_leaf.insert(l.clone(), k);
            }
        }
    }
    for (lid, _) in &slice.leaves {
        if island_of_leaf.contains_key(lid) {
            continue;
        }
        let ei = cx
            .edges
            .iter()
            .position(|e| e.kind == EdgeKind::Leaf(lid.clone()))
            .unwrap();
        let k = island_of_vert(&mut uf, cx.edges[ei].tail);
        island_of_leaf.insert(lid.clone(), k);
    }

    // page orbits per island
    let mut page_orbits: BTreeMap<IslandKey, Vec<Dart>> = BTreeMap::new();
    for (oi, walk) in orbits.iter().enumerate() {
        let k = island_of_vert(&mut uf, cx.head(walk[0]));
        let canon = &orbit_canon[oi];
        if !hole_set.contains(canon) {
            page_orbits.entry(k).or_default().push(canon.clone());
        }
    }

    // outer walk of each island
    let root_key = island_of_circle
        .get(frame.page.root())
        .cloned()
        .ok_or_else(|| SliceError::UnknownCircle(frame.page.root().clone()))?;
    let mut outer_of_island: BTreeMap<IslandKey, Dart> = BTreeMap::new();
    let all_islands: BTreeSet<IslandKey> = island_of_circle
        .values()
        .chain(island_of_leaf.values())
        .cloned()
        .collect();
    for k in &all_islands {
        if *k == root_key {
            continue;
        }
        let outer = match k {
            IslandKey::CCircle(l) => {
                let ccw = matches!(slice.leaves.get(l), Some(LeafShape::Circle { ccw: true }));
                let side = if ccw { Side::R } else { Side::L };
                dart_orbit[&Dart::Leaf {
                    leaf: l.clone(),
                    side,
                }]
                    .clone()
            }
            IslandKey::Circle(_) => {
                let po = page_orbits.get(k).cloned().unwrap_or_default();
                if po.len() == 1 {
                    po[0].clone()
                } else if let Some(d) = slice.outers.get(k) {
                    let canon = dart_orbit
                        .get(d)
                        .ok_or_else(|| SliceError::DanglingReference(format!("{d:?}")))?
                        .clone();
                    if !po.contains(&canon) {
                        return Err(SliceError::BadAnchor {
                            island: format!("{k:?}"),
                            reason: "outer walk is not a page walk of the island".into(),
                        });
                    }
                    canon
                } else {
                    return Err(SliceError::AmbiguousOuter(format!("{k:?}")));
                }
            }
        };
        outer_of_island.insert(k.clone(), outer);
    }

    // validate anchors and the parent forest
    let island_of_dart = |d: &Dart| -> Result<IslandKey, SliceError> {
        match d {
            Dart::Leaf { leaf, .. } => island_of_leaf
                .get(leaf)
                .cloned()
                .ok_or_else(|| SliceError::UnknownLeaf(leaf.clone())),
            Dart::Seg { circle, .. } => island_of_circle
                .get(circle)
                .cloned()
                .ok_or_else(|| SliceError::UnknownCircle(circle.clone())),
        }
    };
    let mut parent: BTreeMap<IslandKey, IslandKey> = BTreeMap::new();
    for k in &all_islands {
        if *k == root_key {
            if slice.anchors.contains_key(k) {
                return Err(SliceError::BadAnchor {
                    island: format!("{k:?}"),
                    reason: "the island containing the first page circle must not be anchored"
                        .into(),
                });
            }
            continue;
        }
        let d = slice
            .anchors
            .get(k)
            .ok_or_else(|| SliceError::MissingAnchor(format!("{k:?}")))?;
        let host = island_of_dart(d)?;
        if host == *k {
            return Err(SliceError::BadAnchor {
                island: format!("{k:?}"),
                reason: "anchored to itself".into(),
            });
        }
        let canon = dart_orbit
            .get(d)
            .ok_or_else(|| SliceError::DanglingReference(format!("{d:?}")))?;
        if hole_set.contains(canon) {
            return Err(SliceError::BadAnchor {
                island: format!("{k:?}"),
                reason: "anchored into a binding hole".into(),
            });
        }
        parent.insert(k.clone(), host);
    }
    for k in parent.keys() {
        let mut cur = k.clone();
        let mut seen = BTreeSet::new();
        while cur != root_key {
            if !seen.insert(cur.clone()) {
                return Err(SliceError::BadAnchor {
                    island: format!("{k:?}"),
                    reason: "anchor chain contains a cycle".into(),
                });
            }
            cur = match parent.get(&cur) {
                Some(p) => p.clone(),
                None => {
                    return Err(SliceError::MissingAnchor(format!("{cur:?}")));
                }
            };
        }
    }

    // merge page orbits into faces
    let page_orbit_list: Vec<Dart> = orbit_canon
        .iter()
        .filter(|c| !hole_set.contains(*c))
        .cloned()
        .collect();
    let idx: BTreeMap<&Dart, usize> = page_orbit_list.iter().enumerate().map(|(i, d)| (d, i)).collect();
    let mut fuf = Uf::new(page_orbit_list.len());
    for (k, d) in &slice.anchors {
        let canon = dart_orbit[d].clone();
        let outer = outer_of_island[k].clone();
        fuf.union(idx[&canon], idx[&outer]);
    }
    let mut face_members: BTreeMap<usize, Vec<Dart>> = BTreeMap::new();
    for (i, d) in page_orbit_list.iter().enumerate() {
        face_members.entry(fuf.find(i)).or_default().push(d.clone());
    }
    let mut orbit_face: BTreeMap<Dart, FaceId> = BTreeMap::new();
    let mut faces: BTreeMap<FaceId, Face> = BTreeMap::new();
    for members in face_members.values() {
        let fid = FaceId(members.iter().min().unwrap().clone());
        for m in members {
            orbit_face.insert(m.clone(), fid.clone());
        }
        faces.insert(
            fid,
            Face {
                walks: members.clone(),
                islands: Vec::new(),
                punctures: Vec::new(),
            },
        );
    }
    for (k, d) in &slice.anchors {
        let fid = orbit_face[&dart_orbit[d]].clone();
        faces.get_mut(&fid).unwrap().islands.push(k.clone());
    }
    for p in &frame.punctures {
        if let Some((lid, _)) = slice.leaf_at_puncture(p) {
            for side in [Side::L, Side::R] {
                let d = Dart::Leaf {
                    leaf: lid.clone(),
                    side,
                };
                if let Some(fid) = orbit_face.get(&dart_orbit[&d]) {
                    let f = faces.get_mut(fid).unwrap();
                    if !f.punctures.contains(p) {
                        f.punctures.push(p.clone());
                    }
                }
            }
        }
    }

    let chi: i64 = cx.verts.len() as i64 - cx.edges.len() as i64
        + faces.values().map(|f| f.chi()).sum::<i64>();
    let expected = 2 - frame.page.r() as i64;
    if chi != expected {
        return Err(SliceError::NonPlanar {
            witness: "page".into(),
            chi,
        });
    }

    Ok(FaceMap {
        chi,
        vertex_count: cx.verts.len(),
        edge_count: cx.edges.len(),
        faces,
        dart_orbit,
        orbit_walk,
        orbit_face,
        holes,
        island_of_circle,
        island_of_leaf,
        island_of_puncture,
        outer_of_island,
    })
}

/// Rewrite anchors and outers so that they name the canonical dart of their
/// walk. Two placements describing the same embedding then compare equal.
pub fn canonicalize(frame: &Frame, slice: &mut Slice) -> Result<(), SliceError> {
    let fm = trace_faces(frame, slice)?;
    for d in slice.anchors.values_mut() {
        if let Some(c) = fm.orbit(d) {
            *d = c.clone();
        }
    }
    for d in slice.outers.values_mut() {
        if let Some(c) = fm.orbit(d) {
            *d = c.clone();
        }
    }
    Ok(())
}
