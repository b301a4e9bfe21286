#pragma once

#include "dgb/geometry.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace dgb {

/// Identifies one quadtree cell.  At refinement level L the domain is split
/// into (nx * 2^L) x (ny * 2^L) congruent rectangles; (ix, iy) are the
/// integer coordinates of this cell within that lattice.
struct CellKey {
    int level = 0;
    std::int64_t ix = 0;
    std::int64_t iy = 0;

    bool operator==(const CellKey&) const = default;
    CellKey parent() const { return {level - 1, ix >> 1, iy >> 1}; }
    CellKey child(int dx, int dy) const { return {level + 1, 2 * ix + dx, 2 * iy + dy}; }
};

struct CellKeyHash {
    std::size_t operator()(const CellKey& k) const {
        std::size_t h = std::hash<std::int64_t>()(k.ix);
        h ^= std::hash<std::int64_t>()(k.iy) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h ^= std::hash<int>()(k.level) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

/// An edge of the mesh, stored as a fine-side sub-edge: on a nonconforming
/// face the face of the coarse cell is represented by the two half-edges of
/// its refined neighbours.  `cell[0]` is the cell whose side `side0` carries
/// the edge geometry (for nonconforming edges this is always the finer cell);
/// `cell[1]` is the neighbour, or -1 on the domain boundary.
struct Edge {
    int cell[2] = {-1, -1};
    Side side0 = Side::West; ///< side of cell[0] on which the edge lies
    Pt a, b;                 ///< endpoints (a->b oriented counterclockwise in cell[0])
    double length = 0.0;     ///< h_E
    Pt normal;               ///< unit normal pointing out of cell[0]
    bool boundary() const { return cell[1] < 0; }
};

/// Immutable adaptively refined quadrilateral mesh over a rectangle.
/// All meshes derived from the same root grid share the cell-key lattice,
/// which makes overlays (union meshes) and inter-mesh transfer exact.
class Mesh {
public:
    /// Uniform nx x ny root grid over `domain`.
    Mesh(Rect domain, int nx, int ny);

    const Rect& domain() const { return domain_; }
    int root_nx() const { return nx_; }
    int root_ny() const { return ny_; }

    int n_cells() const { return static_cast<int>(cells_.size()); }
    const std::vector<CellKey>& cells() const { return cells_; }
    const CellKey& cell_key(int i) const { return cells_[i]; }
    Rect cell_rect(int i) const { return key_rect(cells_[i]); }
    Rect key_rect(const CellKey& k) const;
    /// Cell diameter h_K.
    double cell_diameter(int i) const { return cell_rect(i).diameter(); }
    int max_level() const;

    /// Index of the active cell with the given key, or -1.
    int find(const CellKey& k) const;
    /// Index of the active cell containing the key (the key itself or an
    /// active ancestor), or -1 if the key is subdivided / out of range.
    int find_leaf_or_ancestor(const CellKey& k) const;
    /// Index of the active cell containing the point (ties broken towards
    /// smaller coordinates), or -1 outside the domain.
    int locate(Pt p) const;

    /// Refine the flagged cells (indices), then restore 1-irregularity by
    /// additional refinement.  Returns a new mesh.
    Mesh refine(const std::vector<int>& flagged) const;
    /// Merge flagged sibling quadruples where the merge keeps the mesh
    /// 1-irregular.  A parent is merged only if all four children are active
    /// and flagged.  Returns a new mesh.
    Mesh coarsen(const std::vector<int>& flagged) const;
    /// Refine all cells once.
    Mesh refine_all() const;

    /// Common refinement of two meshes over the same root grid: each cell of
    /// the union is active in at least one input and covered by both.
    static Mesh union_mesh(const Mesh& a, const Mesh& b);

    /// All (sub-)edges of the mesh; built lazily and cached.
    const std::vector<Edge>& edges() const;
    /// For each cell, indices into edges() of the sub-edges on its boundary.
    const std::vector<std::vector<int>>& cell_edges() const;
    /// For each cell, the indices of cells sharing an edge with it.
    std::vector<std::vector<int>> patches() const;

    /// True if every cell's edge-neighbours differ by at most one level.
    bool is_one_irregular() const;

    /// Write the mesh as a legacy ASCII VTK unstructured grid, with the cell
    /// refinement level as cell data.
    void write_vtk(const std::string& path) const;

private:
    explicit Mesh(Rect domain, int nx, int ny, std::vector<CellKey> cells);
    void build_index();
    void enforce_one_irregular(std::vector<CellKey>& cells) const;
    void build_edges() const;

    Rect domain_;
    int nx_ = 1, ny_ = 1;
    std::vector<CellKey> cells_; // sorted by (level, iy, ix)
    std::unordered_map<CellKey, int, CellKeyHash> index_;
    mutable std::vector<Edge> edges_;
    mutable std::vector<std::vector<int>> cell_edges_;
    mutable bool edges_built_ = false;
};

/// Overlay of cell `cell` of mesh `dst` against mesh `src` (same root grid):
/// a list of rectangles tiling the dst cell, each lying inside exactly one
/// src cell (returned as its index).  Used for exact inter-mesh integration.
std::vector<std::pair<Rect, int>> overlay_pieces(const Mesh& dst, int cell, const Mesh& src);

/// Deterministic ordering used to keep the active-cell list canonical.
inline bool cell_key_less(const CellKey& a, const CellKey& b) {
    if (a.level != b.level) return a.level < b.level;
    if (a.iy != b.iy) return a.iy < b.iy;
    return a.ix < b.ix;
}

} // namespace dgb
