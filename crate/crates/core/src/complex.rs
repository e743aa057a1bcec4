//! Oriented combinatorial triangulations stored as vertex flowers.
//!
//! A flower is a vertex's cyclically ordered neighbor list: a closed cycle
//! for interior vertices and an open chain for boundary vertices. Flowers
//! are the source of truth; faces and edges are derived views, which matches
//! the per-vertex neighbor sweep of the radius iteration.

use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("non-manifold complex: {0}")]
    NonManifold(String),
    #[error("inconsistent face orientation: {0}")]
    InconsistentOrientation(String),
    #[error("1-skeleton is disconnected")]
    Disconnected,
    #[error("not a boundary cycle of this complex")]
    NotABoundaryCycle,
    #[error("complex is empty")]
    Empty,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Per-vertex tag set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Marks(u8);

impl Marks {
    pub const ORIGINAL: Marks = Marks(1);
    pub const IDEAL: Marks = Marks(2);
    pub const CAP: Marks = Marks(4);

    pub fn contains(self, m: Marks) -> bool {
        self.0 & m.0 == m.0 && m.0 != 0
    }

    pub fn insert(&mut self, m: Marks) {
        self.0 |= m.0;
    }

    pub fn with(mut self, m: Marks) -> Marks {
        self.insert(m);
        self
    }
}

/// Cyclically ordered boundary component, positively oriented (the complex
/// lies on the left of each directed edge).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryCycle {
    pub vertices: Vec<u32>,
}

impl BoundaryCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    flowers: Vec<Vec<u32>>,
    interior: Vec<bool>,
    marks: Vec<Marks>,
}

impl Triangulation {
    /// Build from oriented vertex triples. Fails when the induced complex is
    /// not a connected orientable surface-with-boundary.
    pub fn build_from_faces(faces: &[[u32; 3]]) -> Result<Self, ComplexError> {
        if faces.is_empty() {
            return Err(ComplexError::Empty);
        }
        let mut vmax = 0u32;
        for f in faces {
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(ComplexError::NonManifold(format!(
                    "face ({},{},{}) repeats a vertex",
                    f[0], f[1], f[2]
                )));
            }
            vmax = vmax.max(f[0]).max(f[1]).max(f[2]);
        }
        let n = vmax as usize + 1;

        // Directed edge census: each directed edge may appear in one face.
        let mut directed: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for f in faces {
            for k in 0..3 {
                let e = (f[k], f[(k + 1) % 3]);
                *directed.entry(e).or_insert(0) += 1;
            }
        }
        for (&(u, v), &cnt) in &directed {
            if cnt > 1 {
                // More than two faces on {u,v}, or two traversing it the
                // same way.
                return if directed.get(&(v, u)).copied().unwrap_or(0) + cnt > 2 {
                    Err(ComplexError::NonManifold(format!(
                        "edge {{{u},{v}}} lies in more than 2 faces"
                    )))
                } else {
                    Err(ComplexError::InconsistentOrientation(format!(
                        "edge {u}->{v} traversed twice in the same direction"
                    )))
                };
            }
        }

        // Successor map at each vertex: face (a,b,c) sets succ_a(b) = c.
        let mut succ: Vec<BTreeMap<u32, u32>> = vec![BTreeMap::new(); n];
        for f in faces {
            for k in 0..3 {
                let (a, b, c) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
                succ[a as usize].insert(b, c);
            }
        }

        let mut flowers: Vec<Vec<u32>> = Vec::with_capacity(n);
        let mut interior = Vec::with_capacity(n);
        for v in 0..n {
            let map = &succ[v];
            if map.is_empty() {
                // Vertex id appears in no face.
                return Err(ComplexError::Disconnected);
            }
            let mut has_pred: BTreeMap<u32, bool> =
                map.keys().map(|&k| (k, false)).collect();
            for &w in map.values() {
                has_pred.entry(w).or_insert(false);
                *has_pred.get_mut(&w).unwrap() = true;
            }
            let starts: Vec<u32> = has_pred
                .iter()
                .filter(|&(_, &p)| !p)
                .map(|(&k, _)| k)
                .collect();
            let neighbor_count = has_pred.len();
            let (start, closed) = match starts.len() {
                0 => {
                    // Closed flower; canonical start at the smallest neighbor.
                    (*map.keys().next().unwrap(), true)
                }
                1 => (starts[0], false),
                _ => {
                    return Err(ComplexError::NonManifold(format!(
                        "vertex {v} has a pinched link"
                    )))
                }
            };
            let mut flower = vec![start];
            let mut cur = start;
            while let Some(&next) = succ[v].get(&cur) {
                if closed && next == start {
                    break;
                }
                flower.push(next);
                cur = next;
                if flower.len() > neighbor_count {
                    return Err(ComplexError::NonManifold(format!(
                        "vertex {v} link does not close up"
                    )));
                }
            }
            if flower.len() != neighbor_count {
                return Err(ComplexError::NonManifold(format!(
                    "vertex {v} has a pinched link"
                )));
            }
            flowers.push(flower);
            interior.push(closed);
        }

        let tri = Triangulation {
            flowers,
            interior,
            marks: vec![Marks::ORIGINAL; n],
        };
        if !tri.is_connected() {
            return Err(ComplexError::Disconnected);
        }
        Ok(tri)
    }

    pub fn vertex_count(&self) -> usize {
        self.flowers.len()
    }

    pub fn flower(&self, v: u32) -> &[u32] {
        &self.flowers[v as usize]
    }

    pub fn is_interior(&self, v: u32) -> bool {
        self.interior[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.flowers[v as usize].len()
    }

    pub fn marks(&self, v: u32) -> Marks {
        self.marks[v as usize]
    }

    pub fn set_mark(&mut self, v: u32, m: Marks) {
        self.marks[v as usize].insert(m);
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.vertex_count() as u32).filter(|&v| self.is_interior(v))
    }

    pub fn boundary_vertices(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.vertex_count() as u32).filter(|&v| !self.is_interior(v))
    }

    /// Consecutive neighbor pairs (wedges) of `v`, one per incident face.
    pub fn wedges(&self, v: u32) -> Vec<(u32, u32)> {
        let f = &self.flowers[v as usize];
        let m = f.len();
        let count = if self.is_interior(v) { m } else { m - 1 };
        (0..count).map(|i| (f[i], f[(i + 1) % m])).collect()
    }

    /// Faces as oriented triples, enumerated deterministically: each face is
    /// reported at its smallest vertex, in that vertex's flower order.
    pub fn faces(&self) -> Vec<[u32; 3]> {
        let mut out = Vec::new();
        for v in 0..self.vertex_count() as u32 {
            for (u, w) in self.wedges(v) {
                if v < u && v < w {
                    out.push([v, u, w]);
                }
            }
        }
        out
    }

    pub fn face_count(&self) -> usize {
        let total: usize = (0..self.vertex_count() as u32)
            .map(|v| self.wedges(v).len())
            .sum();
        total / 3
    }

    pub fn edge_count(&self) -> usize {
        let deg_sum: usize = self.flowers.iter().map(|f| f.len()).sum();
        deg_sum / 2
    }

    pub fn boundary_edge_count(&self) -> usize {
        // Each boundary vertex contributes its trailing boundary edge.
        self.boundary_vertices().count()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn has_boundary(&self) -> bool {
        self.interior.iter().any(|&i| !i)
    }

    pub fn is_sphere(&self) -> bool {
        !self.has_boundary() && self.euler_characteristic() == 2
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in self.flower(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }

    /// One positively oriented cycle per boundary component, each starting at
    /// its smallest vertex id. Closed complexes return an empty list.
    pub fn boundary_cycles(&self) -> Vec<BoundaryCycle> {
        let mut cycles = Vec::new();
        let mut seen = vec![false; self.vertex_count()];
        for v in 0..self.vertex_count() as u32 {
            if self.is_interior(v) || seen[v as usize] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = v;
            loop {
                cycle.push(cur);
                seen[cur as usize] = true;
                // The boundary continues through the first flower entry.
                cur = self.flowers[cur as usize][0];
                if cur == v {
                    break;
                }
            }
            cycles.push(BoundaryCycle { vertices: cycle });
        }
        cycles
    }

    /// Cap a boundary cycle with a new vertex adjacent to every cycle vertex.
    /// The new vertex gets the highest id and is tagged IDEAL.
    pub fn add_ideal_vertex(&self, cycle: &BoundaryCycle) -> Result<Triangulation, ComplexError> {
        if cycle.len() < 3 {
            return Err(ComplexError::NotABoundaryCycle);
        }
        let matches = self.boundary_cycles().into_iter().any(|c| c == *cycle);
        if !matches {
            return Err(ComplexError::NotABoundaryCycle);
        }
        let new_v = self.vertex_count() as u32;
        let mut faces = self.faces();
        let m = cycle.len();
        for k in 0..m {
            let a = cycle.vertices[k];
            let b = cycle.vertices[(k + 1) % m];
            // Reverse of the boundary direction, so orientations stay
            // consistent across the capped edge.
            faces.push([new_v, b, a]);
        }
        let mut tri = Triangulation::build_from_faces(&faces)?;
        tri.marks[..self.vertex_count()].copy_from_slice(&self.marks);
        tri.marks[new_v as usize] = Marks::IDEAL;
        Ok(tri)
    }

    /// Delete a set of vertices (and their faces), compacting ids.
    /// Returns the new complex and the old-id -> new-id table.
    pub fn remove_vertices(
        &self,
        remove: &[u32],
    ) -> Result<(Triangulation, Vec<Option<u32>>), ComplexError> {
        let mut gone = vec![false; self.vertex_count()];
        for &v in remove {
            gone[v as usize] = true;
        }
        let mut remap: Vec<Option<u32>> = vec![None; self.vertex_count()];
        let mut next = 0u32;
        for v in 0..self.vertex_count() {
            if !gone[v] {
                remap[v] = Some(next);
                next += 1;
            }
        }
        let faces: Vec<[u32; 3]> = self
            .faces()
            .into_iter()
            .filter(|f| f.iter().all(|&v| !gone[v as usize]))
            .map(|f| [remap[f[0] as usize].unwrap(), remap[f[1] as usize].unwrap(), remap[f[2] as usize].unwrap()])
            .collect();
        let mut tri = Triangulation::build_from_faces(&faces)?;
        for v in 0..self.vertex_count() {
            if let Some(nv) = remap[v] {
                if (nv as usize) < tri.marks.len() {
                    tri.marks[nv as usize] = self.marks[v];
                }
            }
        }
        Ok((tri, remap))
    }

    pub fn remove_vertex(&self, v: u32) -> Result<(Triangulation, Vec<Option<u32>>), ComplexError> {
        self.remove_vertices(&[v])
    }

    /// Text serialization: `V <n>` then one `F <id> <interior|boundary>
    /// <neighbors...>` line per vertex. Round-trips bit-exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("V {}\n", self.vertex_count()));
        for v in 0..self.vertex_count() {
            let kind = if self.interior[v] { "interior" } else { "boundary" };
            let neighbors: Vec<String> =
                self.flowers[v].iter().map(|u| u.to_string()).collect();
            out.push_str(&format!("F {} {} {}\n", v, kind, neighbors.join(" ")));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Triangulation, ComplexError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| ComplexError::Parse("empty input".into()))?;
        let n: usize = header
            .strip_prefix("V ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| ComplexError::Parse(format!("bad header {header:?}")))?;
        let mut flowers = vec![Vec::new(); n];
        let mut interior = vec![false; n];
        let mut filled = vec![false; n];
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            if it.next() != Some("F") {
                return Err(ComplexError::Parse(format!("bad line {line:?}")));
            }
            let id: usize = it
                .next()
                .and_then(|s| s.parse().ok())
                .filter(|&i| i < n)
                .ok_or_else(|| ComplexError::Parse(format!("bad vertex id in {line:?}")))?;
            let kind = it.next().ok_or_else(|| ComplexError::Parse("missing kind".into()))?;
            interior[id] = match kind {
                "interior" => true,
                "boundary" => false,
                other => return Err(ComplexError::Parse(format!("bad kind {other:?}"))),
            };
            let mut flower = Vec::new();
            for tok in it {
                let u: u32 = tok
                    .parse()
                    .ok()
                    .filter(|&u| (u as usize) < n)
                    .ok_or_else(|| ComplexError::Parse(format!("bad neighbor {tok:?}")))?;
                flower.push(u);
            }
            if flower.is_empty() {
                return Err(ComplexError::Parse(format!("vertex {id} has no neighbors")));
            }
            flowers[id] = flower;
            filled[id] = true;
        }
        if !filled.iter().all(|&f| f) {
            return Err(ComplexError::Parse("missing vertex lines".into()));
        }
        let tri = Triangulation {
            flowers,
            interior,
            marks: vec![Marks::ORIGINAL; n],
        };
        tri.validate()?;
        Ok(tri)
    }

    /// Check the structural invariants (used after parsing and in tests):
    /// flowers induce a consistent oriented triangulated surface.
    pub fn validate(&self) -> Result<(), ComplexError> {
        // Rebuild from the derived faces; a valid complex reproduces itself
        // up to flower rotation at interior vertices.
        let rebuilt = Triangulation::build_from_faces(&self.faces())?;
        if rebuilt.vertex_count() != self.vertex_count() {
            return Err(ComplexError::NonManifold("face set loses vertices".into()));
        }
        for v in 0..self.vertex_count() as u32 {
            if rebuilt.is_interior(v) != self.is_interior(v) {
                return Err(ComplexError::NonManifold(format!(
                    "vertex {v} boundary flag mismatch"
                )));
            }
            let a = self.flower(v);
            let b = rebuilt.flower(v);
            if a.len() != b.len() {
                return Err(ComplexError::NonManifold(format!("vertex {v} flower mismatch")));
            }
            if self.is_interior(v) {
                // Same cyclic order up to rotation.
                let pos = a.iter().position(|&x| x == b[0]).ok_or_else(|| {
                    ComplexError::NonManifold(format!("vertex {v} flower mismatch"))
                })?;
                let rotated: Vec<u32> =
                    (0..a.len()).map(|i| a[(pos + i) % a.len()]).collect();
                if rotated != b {
                    return Err(ComplexError::NonManifold(format!(
                        "vertex {v} flower order mismatch"
                    )));
                }
            } else if a != b {
                return Err(ComplexError::NonManifold(format!(
                    "vertex {v} flower order mismatch"
                )));
            }
        }
        Ok(())
    }
}

/// Triangulated hexagonal disc with `rings` concentric rings around a hub
/// (vertex 0). Ring `r` holds `6r` vertices; ids increase outward, walking
/// each ring counterclockwise from its `(r, 0)` lattice corner.
pub fn hex_disc(rings: u32) -> Triangulation {
    assert!(rings >= 1, "hex_disc needs at least one ring");
    let r = rings as i64;
    // Triangular lattice coordinates (a, b) -> a*u + b*v with
    // u = (1, 0), v = (1/2, sqrt(3)/2). Ring number is
    // (|a| + |b| + |a+b|) / 2.
    let ring_of = |a: i64, b: i64| (a.abs() + b.abs() + (a + b).abs()) / 2;
    let mut ids: BTreeMap<(i64, i64), u32> = BTreeMap::new();
    let mut order: Vec<(i64, i64)> = vec![(0, 0)];
    let dirs = [(-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)];
    for ring in 1..=r {
        let mut p = (ring, 0i64);
        for d in dirs {
            for _ in 0..ring {
                order.push(p);
                p = (p.0 + d.0, p.1 + d.1);
            }
        }
    }
    for (i, &p) in order.iter().enumerate() {
        ids.insert(p, i as u32);
    }
    let mut faces = Vec::new();
    // Anchor cells one step beyond the ball: a downward triangle can have
    // all corners inside while its anchor lies outside.
    for a in -(r + 1)..=(r + 1) {
        for b in -(r + 1)..=(r + 1) {
            let up = [(a, b), (a + 1, b), (a, b + 1)];
            let down = [(a + 1, b), (a + 1, b + 1), (a, b + 1)];
            for tri in [up, down] {
                if tri.iter().all(|&(x, y)| ring_of(x, y) <= r) {
                    let (i, j, k) = (ids[&tri[0]], ids[&tri[1]], ids[&tri[2]]);
                    faces.push([i, j, k]);
                }
            }
        }
    }
    Triangulation::build_from_faces(&faces).expect("hex disc is always valid")
}
