//! Nodal-domain extraction from a sampled field grid: connected components,
//! containment forest, hole counts, and nesting-tree-end histogram.
//!
//! Discrete conventions (fixed, documented):
//!
//! * a cell is positive iff its value is > 0, else negative;
//! * positive components use 4-connectivity, negative ones 8-connectivity,
//!   which resolves saddle ambiguities and gives the Jordan duality both ways;
//! * a component is interior iff none of its cells lies outside the counting
//!   disk of radius R;
//! * the parent of a component is the component of the cell directly above
//!   its first cell in row-major order (equivalent to boundary-tracing order
//!   under the connectivity pairing; acyclic because the parent's top row is
//!   strictly higher);
//! * nodal-set components (curves) are identified with the domain immediately
//!   inside them, so the interior curve count equals the interior domain
//!   count and each interior domain contributes one tree end.

use super::FieldGrid;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Minimal nodal-domain area pi j_{0,1}^2 scaled by the discretization
/// allowance 0.8; interior components below this are flagged as artifacts.
pub const FABER_KRAHN_AREA_FLOOR: f64 = 0.8 * 18.168414197637798;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub id: u32,
    /// +1 for positive cells, -1 for negative.
    pub sign: i8,
    pub cell_count: usize,
    pub cell_area: f64,
    /// Any cell outside the counting disk (includes everything touching the
    /// box frame, since the frame lies outside the disk).
    pub touches_counting_boundary: bool,
    /// Distance of the cell centroid from the origin; the center-of-mass
    /// counting rule selects components with `centroid_radius <= R`.
    pub centroid_radius: f64,
    /// Any cell on the box frame (the component is clipped by the window).
    pub touches_box_frame: bool,
    pub parent: Option<u32>,
    pub children: Vec<u32>,
    /// Number of holes = number of children in the containment forest.
    pub hole_count: usize,
    /// Interior component with cell area below [`FABER_KRAHN_AREA_FLOOR`].
    pub flagged_small: bool,
}

impl ComponentRecord {
    pub fn interior(&self) -> bool {
        !self.touches_counting_boundary
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodalCensus {
    pub components: Vec<ComponentRecord>,
    /// Domains lying entirely inside the counting disk.
    pub n_interior_domains: usize,
    /// Interior nodal-set components; equals `n_interior_domains` under the
    /// curve <-> inner-domain identification.
    pub n_interior_curves: usize,
    /// Canonical rooted-tree code -> count, one entry per interior curve.
    pub tree_end_histogram: BTreeMap<String, usize>,
    pub faber_krahn_flags: usize,
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // root at the smaller index keeps labels deterministic
            if ra < rb {
                self.parent[rb as usize] = ra;
            } else {
                self.parent[ra as usize] = rb;
            }
        }
    }
}

/// Labels the grid and assembles the census.
pub fn nodal_census(field: &FieldGrid) -> NodalCensus {
    let res = field.grid.resolution;
    let n_cells = res * res;
    let positive: Vec<bool> = field.values.iter().map(|&v| v > 0.0).collect();
    let mut dsu = DisjointSet::new(n_cells);

    let at = |row: usize, col: usize| row * res + col;
    for row in 0..res {
        for col in 0..res {
            let i = at(row, col);
            let p = positive[i];
            // west and north for both signs
            if col > 0 && positive[at(row, col - 1)] == p {
                dsu.union(i as u32, at(row, col - 1) as u32);
            }
            if row > 0 && positive[at(row - 1, col)] == p {
                dsu.union(i as u32, at(row - 1, col) as u32);
            }
            // diagonals only for negative cells
            if !p && row > 0 {
                if col > 0 && !positive[at(row - 1, col - 1)] {
                    dsu.union(i as u32, at(row - 1, col - 1) as u32);
                }
                if col + 1 < res && !positive[at(row - 1, col + 1)] {
                    dsu.union(i as u32, at(row - 1, col + 1) as u32);
                }
            }
        }
    }

    // compact labels in scan order of the root cell
    let mut label_of_root: Vec<u32> = vec![u32::MAX; n_cells];
    let mut labels: Vec<u32> = vec![0; n_cells];
    let mut first_cell: Vec<usize> = Vec::new();
    let mut n_components = 0u32;
    for i in 0..n_cells {
        let root = dsu.find(i as u32) as usize;
        if label_of_root[root] == u32::MAX {
            label_of_root[root] = n_components;
            first_cell.push(i);
            n_components += 1;
        }
        labels[i] = label_of_root[root];
    }
    let n_comp = n_components as usize;

    let r2_limit = field.grid.counting_radius * field.grid.counting_radius;
    let mut cell_count = vec![0usize; n_comp];
    let mut outside = vec![false; n_comp];
    let mut frame = vec![false; n_comp];
    let mut centroid_x = vec![0f64; n_comp];
    let mut centroid_y = vec![0f64; n_comp];
    for row in 0..res {
        let y = field.grid.coord(row);
        for col in 0..res {
            let x = field.grid.coord(col);
            let lab = labels[at(row, col)] as usize;
            cell_count[lab] += 1;
            centroid_x[lab] += x;
            centroid_y[lab] += y;
            if x * x + y * y > r2_limit {
                outside[lab] = true;
            }
            if row == 0 || col == 0 || row == res - 1 || col == res - 1 {
                frame[lab] = true;
            }
        }
    }

    // parent = component of the cell directly above the first (topmost,
    // leftmost) cell; components touching the top row are forest roots
    let mut parent: Vec<Option<u32>> = vec![None; n_comp];
    for (lab, &cell) in first_cell.iter().enumerate() {
        let row = cell / res;
        let col = cell % res;
        if row > 0 {
            parent[lab] = Some(labels[at(row - 1, col)]);
        }
    }
    let mut children: Vec<Vec<u32>> = vec![Vec::new(); n_comp];
    for (lab, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p as usize].push(lab as u32);
        }
    }

    let area = field.grid.cell_area();
    let mut components: Vec<ComponentRecord> = (0..n_comp)
        .map(|lab| {
            let interior = !outside[lab];
            let cells = cell_count[lab];
            ComponentRecord {
                id: lab as u32,
                sign: if positive[first_cell[lab]] { 1 } else { -1 },
                cell_count: cells,
                cell_area: cells as f64 * area,
                touches_counting_boundary: outside[lab],
                centroid_radius: (centroid_x[lab] / cells as f64)
                    .hypot(centroid_y[lab] / cells as f64),
                touches_box_frame: frame[lab],
                parent: parent[lab],
                children: children[lab].clone(),
                hole_count: children[lab].len(),
                flagged_small: interior && (cells as f64 * area) < FABER_KRAHN_AREA_FLOOR,
            }
        })
        .collect();
    components.sort_by_key(|c| c.id);

    let n_interior = components.iter().filter(|c| c.interior()).count();
    let flags = components.iter().filter(|c| c.flagged_small).count();
    let histogram = tree_end_histogram(&components);

    NodalCensus {
        n_interior_domains: n_interior,
        n_interior_curves: n_interior,
        tree_end_histogram: histogram,
        faber_krahn_flags: flags,
        components,
    }
}

/// Size of the subtree rooted at each component (children arrays are a
/// forest: evaluate leaves upward).
fn subtree_sizes(components: &[ComponentRecord]) -> Vec<usize> {
    let n = components.len();
    let mut sizes = vec![0usize; n];
    // process in an order where children precede parents: repeated passes
    // over a pending stack (forest edges only, no cycles)
    let mut state = vec![0u8; n];
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut stack = vec![start];
        while let Some(&v) = stack.last() {
            match state[v] {
                0 => {
                    state[v] = 1;
                    for &c in &components[v].children {
                        stack.push(c as usize);
                    }
                }
                1 => {
                    sizes[v] = 1 + components[v]
                        .children
                        .iter()
                        .map(|&c| sizes[c as usize])
                        .sum::<usize>();
                    state[v] = 2;
                    stack.pop();
                }
                _ => {
                    stack.pop();
                }
            }
        }
    }
    sizes
}

/// Root of each component's containment tree.
fn forest_roots(components: &[ComponentRecord]) -> Vec<usize> {
    let n = components.len();
    let mut root = vec![usize::MAX; n];
    for start in 0..n {
        if root[start] != usize::MAX {
            continue;
        }
        let mut chain = Vec::new();
        let mut v = start;
        let r = loop {
            if root[v] != usize::MAX {
                break root[v];
            }
            chain.push(v);
            match components[v].parent {
                Some(p) => v = p as usize,
                None => break v,
            }
        };
        for c in chain {
            root[c] = r;
        }
    }
    root
}

/// AHU canonical code of the subtree rooted at `v`, skipping the edge to
/// `banned` (used to encode the far side of a cut, rooted just past it).
fn canonical_code(components: &[ComponentRecord], v: usize, banned: Option<usize>) -> String {
    // iterative post-order with memoized child codes per node
    fn neighbors(
        components: &[ComponentRecord],
        v: usize,
        banned: Option<usize>,
        from: Option<usize>,
    ) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some(p) = components[v].parent {
            let p = p as usize;
            if Some(p) != banned && Some(p) != from {
                out.push(p);
            }
        }
        for &c in &components[v].children {
            let c = c as usize;
            if Some(c) != banned && Some(c) != from {
                out.push(c);
            }
        }
        out
    }
    struct Frame {
        node: usize,
        pending: Vec<usize>,
        codes: Vec<String>,
    }
    let mut result: Option<String> = None;
    let mut stack = vec![Frame {
        node: v,
        pending: neighbors(components, v, banned, banned),
        codes: Vec::new(),
    }];
    while let Some(top) = stack.last_mut() {
        if let Some(next) = top.pending.pop() {
            let from = top.node;
            stack.push(Frame {
                node: next,
                pending: neighbors(components, next, None, Some(from)),
                codes: Vec::new(),
            });
        } else {
            let mut frame = stack.pop().unwrap();
            frame.codes.sort();
            let code = format!("({})", frame.codes.concat());
            if let Some(parent_frame) = stack.last_mut() {
                parent_frame.codes.push(code);
            } else {
                result = Some(code);
            }
        }
    }
    result.unwrap()
}

/// One tree end per interior component: cut the edge to its parent, take the
/// smaller side as a rooted tree (ties resolved away from the largest-area
/// component), and accumulate canonical codes.
fn tree_end_histogram(components: &[ComponentRecord]) -> BTreeMap<String, usize> {
    let mut histogram = BTreeMap::new();
    if components.is_empty() {
        return histogram;
    }
    let sizes = subtree_sizes(components);
    let roots = forest_roots(components);
    let largest = components
        .iter()
        .max_by_key(|c| (c.cell_count, usize::MAX - c.id as usize))
        .unwrap()
        .id as usize;
    for comp in components {
        if !comp.interior() {
            continue;
        }
        let v = comp.id as usize;
        let Some(p) = comp.parent.map(|p| p as usize) else {
            // interior components always have a cell above their top row;
            // a missing parent can only happen for fields positive on the
            // whole top row, which is never interior. Defensive skip.
            continue;
        };
        let side_inner = sizes[v];
        let total = sizes[roots[v]];
        let side_outer = total - side_inner;
        let code = if side_inner < side_outer {
            canonical_code(components, v, Some(p))
        } else if side_outer < side_inner {
            canonical_code(components, p, Some(v))
        } else {
            // tie: prefer the side not containing the largest-area component
            let inner_has_largest = contains_in_subtree(components, v, largest);
            if inner_has_largest {
                canonical_code(components, p, Some(v))
            } else {
                canonical_code(components, v, Some(p))
            }
        };
        *histogram.entry(code).or_insert(0) += 1;
    }
    histogram
}

fn contains_in_subtree(components: &[ComponentRecord], root: usize, target: usize) -> bool {
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        if v == target {
            return true;
        }
        stack.extend(components[v].children.iter().map(|&c| c as usize));
    }
    false
}
