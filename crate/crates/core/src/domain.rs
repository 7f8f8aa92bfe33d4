//! Occupancy grids, the planning graph derived from them, and simple paths.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("grid must have 2 or 3 dimensions, got {0}")]
    UnsupportedDims(usize),
    #[error("grid dimension {axis} has zero cells")]
    EmptyAxis { axis: usize },
    #[error("occupancy has {got} cells, dims require {expected}")]
    CellCount { expected: usize, got: usize },
    #[error("cell index {0} is outside the grid")]
    CellOutOfRange(usize),
    #[error("start cell {0} is occupied")]
    StartOccupied(usize),
    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),
    #[error("path is empty")]
    EmptyPath,
    #[error("path step {index}: {reason}")]
    InvalidPath {
        index: usize,
        reason: ExtendRejection,
    },
}

/// Neighborhood used when turning free cells into graph edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    /// 4 neighbors in 2-D, 6 in 3-D.
    #[default]
    Orthogonal,
    /// 8 neighbors in 2-D, 26 in 3-D.
    Full,
}

impl Connectivity {
    /// Neighbor offsets for a grid with `ndim` axes, in a fixed order.
    pub fn offsets(self, ndim: usize) -> Vec<[i64; 3]> {
        let zr: &[i64] = if ndim == 3 { &[-1, 0, 1] } else { &[0] };
        let mut out = Vec::new();
        for &dz in zr {
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let nonzero = [dx, dy, dz].iter().filter(|c| **c != 0).count();
                    let keep = match self {
                        Connectivity::Orthogonal => nonzero == 1,
                        Connectivity::Full => nonzero >= 1,
                    };
                    if keep {
                        out.push([dx, dy, dz]);
                    }
                }
            }
        }
        out
    }
}

/// Boolean obstacle field. Cells are indexed `x + nx * (y + ny * z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyGrid {
    dims: Vec<usize>,
    occupied: Vec<bool>,
    start: usize,
    poi: Option<usize>,
}

impl OccupancyGrid {
    pub fn new(
        dims: Vec<usize>,
        occupied: Vec<bool>,
        start: usize,
        poi: Option<usize>,
    ) -> Result<Self, DomainError> {
        if dims.len() != 2 && dims.len() != 3 {
            return Err(DomainError::UnsupportedDims(dims.len()));
        }
        if let Some(axis) = dims.iter().position(|d| *d == 0) {
            return Err(DomainError::EmptyAxis { axis });
        }
        let expected: usize = dims.iter().product();
        if occupied.len() != expected {
            return Err(DomainError::CellCount {
                expected,
                got: occupied.len(),
            });
        }
        if start >= expected {
            return Err(DomainError::CellOutOfRange(start));
        }
        if occupied[start] {
            return Err(DomainError::StartOccupied(start));
        }
        if let Some(p) = poi {
            if p >= expected {
                return Err(DomainError::CellOutOfRange(p));
            }
        }
        Ok(Self {
            dims,
            occupied,
            start,
            poi,
        })
    }

    /// An obstacle-free 2-D grid with the start in the corner.
    pub fn empty_2d(nx: usize, ny: usize) -> Self {
        Self::new(vec![nx, ny], vec![false; nx * ny], 0, None).expect("valid empty grid")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    /// Dims padded to three axes.
    pub fn extent(&self) -> [usize; 3] {
        [
            self.dims[0],
            self.dims[1],
            self.dims.get(2).copied().unwrap_or(1),
        ]
    }

    pub fn cell_count(&self) -> usize {
        self.occupied.len()
    }

    pub fn occupied(&self) -> &[bool] {
        &self.occupied
    }

    pub fn is_occupied(&self, cell: usize) -> bool {
        self.occupied[cell]
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn poi(&self) -> Option<usize> {
        self.poi
    }

    pub fn coord(&self, cell: usize) -> [usize; 3] {
        let [nx, ny, _] = self.extent();
        [cell % nx, (cell / nx) % ny, cell / (nx * ny)]
    }

    pub fn cell(&self, coord: [usize; 3]) -> usize {
        let [nx, ny, _] = self.extent();
        coord[0] + nx * (coord[1] + ny * coord[2])
    }

    /// Cell at `coord + offset`, or `None` when that falls outside the grid.
    pub fn offset_cell(&self, coord: [usize; 3], offset: [i64; 3]) -> Option<usize> {
        let ext = self.extent();
        let mut out = [0usize; 3];
        for axis in 0..3 {
            let c = coord[axis] as i64 + offset[axis];
            if c < 0 || c >= ext[axis] as i64 {
                return None;
            }
            out[axis] = c as usize;
        }
        Some(self.cell(out))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vertex {
    pub cell: usize,
    pub coord: [usize; 3],
}

/// Undirected graph over the free cells of an [`OccupancyGrid`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanningGraph {
    vertices: Vec<Vertex>,
    cell_to_vertex: Vec<Option<VertexId>>,
    edges: Vec<(VertexId, VertexId)>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    connectivity: Connectivity,
    ndim: usize,
    v_start: VertexId,
}

impl PlanningGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v]
    }

    /// Endpoints of an edge, lower id first.
    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    pub fn ndim(&self) -> usize {
        self.ndim
    }

    pub fn start(&self) -> VertexId {
        self.v_start
    }

    pub fn vertex_of_cell(&self, cell: usize) -> Option<VertexId> {
        self.cell_to_vertex.get(cell).copied().flatten()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v < self.vertices.len()
    }

    /// Adjacent vertices with the connecting edge, ascending by vertex id.
    pub fn neighbors(&self, v: VertexId) -> Result<&[(VertexId, EdgeId)], DomainError> {
        self.adjacency
            .get(v)
            .map(Vec::as_slice)
            .ok_or(DomainError::UnknownVertex(v))
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        let adj = self.adjacency.get(a)?;
        adj.binary_search_by_key(&b, |(n, _)| *n)
            .ok()
            .map(|i| adj[i].1)
    }

    /// Signed step between the cells of two vertices.
    pub fn displacement(&self, from: VertexId, to: VertexId) -> [i64; 3] {
        let a = self.vertices[from].coord;
        let b = self.vertices[to].coord;
        [
            b[0] as i64 - a[0] as i64,
            b[1] as i64 - a[1] as i64,
            b[2] as i64 - a[2] as i64,
        ]
    }
}

/// Builds the planning graph: one vertex per free cell (row-major, then
/// plane-major) and an edge between every pair of free neighbors.
///
/// Diagonal steps under [`Connectivity::Full`] require every cell spanned by
/// the orthogonal components of the step to be free, so paths never cut
/// obstacle corners.
pub fn grid_to_graph(
    grid: &OccupancyGrid,
    connectivity: Connectivity,
) -> Result<PlanningGraph, DomainError> {
    if grid.ndim() != 2 && grid.ndim() != 3 {
        return Err(DomainError::UnsupportedDims(grid.ndim()));
    }
    if grid.is_occupied(grid.start()) {
        return Err(DomainError::StartOccupied(grid.start()));
    }
    let mut vertices = Vec::new();
    let mut cell_to_vertex = vec![None; grid.cell_count()];
    for (cell, slot) in cell_to_vertex.iter_mut().enumerate() {
        if !grid.is_occupied(cell) {
            *slot = Some(vertices.len());
            vertices.push(Vertex {
                cell,
                coord: grid.coord(cell),
            });
        }
    }
    let offsets = connectivity.offsets(grid.ndim());
    let mut edges = Vec::new();
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for (u, vert) in vertices.iter().enumerate() {
        for off in &offsets {
            let Some(ncell) = grid.offset_cell(vert.coord, *off) else {
                continue;
            };
            let Some(v) = cell_to_vertex[ncell] else {
                continue;
            };
            if v <= u || !corner_clear(grid, vert.coord, *off) {
                continue;
            }
            let e = edges.len();
            edges.push((u, v));
            adjacency[u].push((v, e));
            adjacency[v].push((u, e));
        }
    }
    for adj in &mut adjacency {
        adj.sort_unstable();
    }
    let v_start = cell_to_vertex[grid.start()].expect("start is free");
    Ok(PlanningGraph {
        vertices,
        cell_to_vertex,
        edges,
        adjacency,
        connectivity,
        ndim: grid.ndim(),
        v_start,
    })
}

/// True when every partial step of `off` (each proper, non-empty subset of
/// its non-zero components) lands on a free cell.
fn corner_clear(grid: &OccupancyGrid, coord: [usize; 3], off: [i64; 3]) -> bool {
    let axes: Vec<usize> = (0..3).filter(|a| off[*a] != 0).collect();
    if axes.len() < 2 {
        return true;
    }
    let full = (1u32 << axes.len()) - 1;
    (1..full).all(|mask| {
        let mut partial = [0i64; 3];
        for (bit, axis) in axes.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                partial[*axis] = off[*axis];
            }
        }
        grid.offset_cell(coord, partial)
            .is_some_and(|c| !grid.is_occupied(c))
    })
}

/// Why a path extension was refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ExtendRejection {
    #[error("vertex is not adjacent to the path end")]
    NotAdjacent,
    #[error("vertex is already on the path")]
    Revisit,
    #[error("vertex is not in the graph")]
    UnknownVertex,
}

/// A simple, edge-connected vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(Vec<VertexId>);

impl Path {
    /// The single-vertex path at `v`.
    pub fn unit(v: VertexId) -> Self {
        Path(vec![v])
    }

    /// Validates `vertices` against the graph.
    pub fn new(graph: &PlanningGraph, vertices: Vec<VertexId>) -> Result<Self, DomainError> {
        let (&first, rest) = vertices.split_first().ok_or(DomainError::EmptyPath)?;
        if !graph.contains(first) {
            return Err(DomainError::UnknownVertex(first));
        }
        let mut path = Path::unit(first);
        for (i, &v) in rest.iter().enumerate() {
            path = path
                .extend(v, graph)
                .map_err(|reason| DomainError::InvalidPath {
                    index: i + 1,
                    reason,
                })?;
        }
        Ok(path)
    }

    /// Appends `v` if it is adjacent to the last vertex and not yet visited.
    pub fn extend(&self, v: VertexId, graph: &PlanningGraph) -> Result<Path, ExtendRejection> {
        if !graph.contains(v) {
            return Err(ExtendRejection::UnknownVertex);
        }
        if self.0.contains(&v) {
            return Err(ExtendRejection::Revisit);
        }
        if graph.edge_between(self.last(), v).is_none() {
            return Err(ExtendRejection::NotAdjacent);
        }
        let mut next = self.0.clone();
        next.push(v);
        Ok(Path(next))
    }

    /// Builds a path without validation. Callers guarantee the invariants.
    pub(crate) fn from_trusted(vertices: Vec<VertexId>) -> Self {
        debug_assert!(!vertices.is_empty());
        Path(vertices)
    }

    pub fn origin(&self) -> VertexId {
        self.0[0]
    }

    pub fn last(&self) -> VertexId {
        *self.0.last().expect("non-empty path")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; paths hold at least one vertex.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.0.len() - 1
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// A vertex together with the edge it was entered through. `incoming` is
/// `None` only for the start vertex's synthetic direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    pub vertex: VertexId,
    pub incoming: Option<EdgeId>,
}

/// Every direction of every vertex: one per incident edge, plus the `None`
/// direction at the start. Ordered by vertex, then incoming edge.
pub fn directions(graph: &PlanningGraph) -> Vec<Direction> {
    let mut out = Vec::with_capacity(2 * graph.edge_count() + 1);
    for v in 0..graph.vertex_count() {
        if v == graph.start() {
            out.push(Direction {
                vertex: v,
                incoming: None,
            });
        }
        let mut incident: Vec<EdgeId> = graph.adjacency[v].iter().map(|(_, e)| *e).collect();
        incident.sort_unstable();
        out.extend(incident.into_iter().map(|e| Direction {
            vertex: v,
            incoming: Some(e),
        }));
    }
    out
}
