#include "dgb/mesh.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace dgb {

Mesh::Mesh(Rect domain, int nx, int ny) : domain_(domain), nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("Mesh: root grid must be nonempty");
    cells_.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) cells_.push_back({0, i, j});
    build_index();
}

Mesh::Mesh(Rect domain, int nx, int ny, std::vector<CellKey> cells)
    : domain_(domain), nx_(nx), ny_(ny), cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end(), cell_key_less);
    build_index();
}

void Mesh::build_index() {
    index_.clear();
    index_.reserve(cells_.size());
    for (int i = 0; i < n_cells(); ++i) index_.emplace(cells_[i], i);
}

Rect Mesh::key_rect(const CellKey& k) const {
    const double hx = domain_.width() / (static_cast<double>(nx_) * (1LL << k.level));
    const double hy = domain_.height() / (static_cast<double>(ny_) * (1LL << k.level));
    Rect r;
    r.x0 = domain_.x0 + k.ix * hx;
    r.y0 = domain_.y0 + k.iy * hy;
    r.x1 = r.x0 + hx;
    r.y1 = r.y0 + hy;
    return r;
}

int Mesh::max_level() const {
    int m = 0;
    for (const CellKey& k : cells_) m = std::max(m, k.level);
    return m;
}

int Mesh::find(const CellKey& k) const {
    auto it = index_.find(k);
    return it == index_.end() ? -1 : it->second;
}

int Mesh::find_leaf_or_ancestor(const CellKey& k) const {
    CellKey c = k;
    while (c.level >= 0) {
        if (int i = find(c); i >= 0) return i;
        if (c.level == 0) break;
        c = c.parent();
    }
    return -1;
}

int Mesh::locate(Pt p) const {
    if (!domain_.contains(p)) return -1;
    const int L = max_level();
    const double hx = domain_.width() / (static_cast<double>(nx_) * (1LL << L));
    const double hy = domain_.height() / (static_cast<double>(ny_) * (1LL << L));
    auto clampi = [](std::int64_t v, std::int64_t hi) {
        return std::max<std::int64_t>(0, std::min(v, hi - 1));
    };
    CellKey k;
    k.level = L;
    k.ix = clampi(static_cast<std::int64_t>((p.x - domain_.x0) / hx), static_cast<std::int64_t>(nx_) << L);
    k.iy = clampi(static_cast<std::int64_t>((p.y - domain_.y0) / hy), static_cast<std::int64_t>(ny_) << L);
    return find_leaf_or_ancestor(k);
}

namespace {

/// Keys of the (up to two) same-or-finer lattice positions adjacent to side
/// `s` of key `k`; returns false if the side lies on the domain boundary.
bool neighbor_key(const CellKey& k, Side s, std::int64_t nx, std::int64_t ny, CellKey& out) {
    const std::int64_t NX = nx << k.level, NY = ny << k.level;
    out = k;
    switch (s) {
    case Side::West:
        if (k.ix == 0) return false;
        out.ix -= 1;
        return true;
    case Side::East:
        if (k.ix + 1 >= NX) return false;
        out.ix += 1;
        return true;
    case Side::South:
        if (k.iy == 0) return false;
        out.iy -= 1;
        return true;
    default:
        if (k.iy + 1 >= NY) return false;
        out.iy += 1;
        return true;
    }
}

/// The two children of `k` that touch side `s`.
std::pair<CellKey, CellKey> side_children(const CellKey& k, Side s) {
    switch (s) {
    case Side::West: return {k.child(0, 0), k.child(0, 1)};
    case Side::East: return {k.child(1, 0), k.child(1, 1)};
    case Side::South: return {k.child(0, 0), k.child(1, 0)};
    default: return {k.child(0, 1), k.child(1, 1)};
    }
}

struct KeySet {
    std::unordered_map<CellKey, int, CellKeyHash> m;
    bool contains(const CellKey& k) const { return m.count(k) > 0; }
};

} // namespace

void Mesh::enforce_one_irregular(std::vector<CellKey>& cells) const {
    // Repeatedly refine any cell that has an active edge-neighbour two or
    // more levels finer.
    std::unordered_map<CellKey, int, CellKeyHash> active;
    for (std::size_t i = 0; i < cells.size(); ++i) active.emplace(cells[i], 1);

    int max_lvl = 0;
    for (const CellKey& k : cells) max_lvl = std::max(max_lvl, k.level);

    // Iterate to a fixed point using direct neighbour queries against the
    // current active set.
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<CellKey> to_refine;
        for (const auto& [k, tag] : active) {
            static_cast<void>(tag);
            for (int si = 0; si < 4; ++si) {
                CellKey nb;
                if (!neighbor_key(k, static_cast<Side>(si), nx_, ny_, nb)) continue;
                // Check whether the neighbour position is subdivided more
                // than once: look for an active cell strictly below nb's
                // children (i.e. at level >= k.level + 2) along this side.
                auto [c0, c1] = side_children(nb, opposite(static_cast<Side>(si)));
                // If either child position is itself subdivided (no active
                // cell at that key but active cells below), k must refine.
                for (const CellKey& c : {c0, c1}) {
                    if (active.count(c)) continue; // exactly one finer: fine
                    // Is anything active below c?  Walk down along the side.
                    std::vector<CellKey> stack{c};
                    bool finer = false;
                    while (!stack.empty() && !finer) {
                        CellKey t = stack.back();
                        stack.pop_back();
                        auto [d0, d1] = side_children(t, opposite(static_cast<Side>(si)));
                        for (const CellKey& d : {d0, d1}) {
                            if (active.count(d)) {
                                finer = true;
                                break;
                            }
                            if (d.level < max_lvl) stack.push_back(d);
                        }
                    }
                    if (finer) {
                        to_refine.push_back(k);
                        si = 4;
                        break;
                    }
                }
                if (si == 4) break;
            }
        }
        for (const CellKey& k : to_refine) {
            auto it = active.find(k);
            if (it == active.end()) continue;
            active.erase(it);
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) active.emplace(k.child(dx, dy), 1);
            changed = true;
        }
    }

    cells.clear();
    cells.reserve(active.size());
    for (const auto& [k, tag] : active) {
        static_cast<void>(tag);
        cells.push_back(k);
    }
}

Mesh Mesh::refine(const std::vector<int>& flagged) const {
    std::vector<bool> flag(cells_.size(), false);
    for (int i : flagged) flag.at(i) = true;
    std::vector<CellKey> next;
    next.reserve(cells_.size() + 3 * flagged.size());
    for (int i = 0; i < n_cells(); ++i) {
        if (flag[i]) {
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) next.push_back(cells_[i].child(dx, dy));
        } else {
            next.push_back(cells_[i]);
        }
    }
    enforce_one_irregular(next);
    return Mesh(domain_, nx_, ny_, std::move(next));
}

Mesh Mesh::refine_all() const {
    std::vector<int> all(cells_.size());
    for (int i = 0; i < n_cells(); ++i) all[i] = i;
    return refine(all);
}

Mesh Mesh::coarsen(const std::vector<int>& flagged) const {
    std::vector<bool> flag(cells_.size(), false);
    for (int i : flagged) flag.at(i) = true;

    // Candidate parents: all four children active and flagged.
    std::unordered_map<CellKey, int, CellKeyHash> quad_count;
    for (int i = 0; i < n_cells(); ++i) {
        if (!flag[i] || cells_[i].level == 0) continue;
        quad_count[cells_[i].parent()] += 1;
    }
    std::unordered_map<CellKey, int, CellKeyHash> active;
    for (const CellKey& k : cells_) active.emplace(k, 1);

    auto level_at_side = [&](const CellKey& k, Side s) {
        // Finest active level adjacent to side s of key k (pre-merge view).
        CellKey nb;
        if (!neighbor_key(k, s, nx_, ny_, nb)) return -1;
        int finest = -1;
        std::vector<CellKey> stack{nb};
        while (!stack.empty()) {
            CellKey t = stack.back();
            stack.pop_back();
            if (active.count(t)) {
                finest = std::max(finest, t.level);
                continue;
            }
            // Either subdivided or covered by a coarser cell.
            if (t.level == nb.level) {
                CellKey c = t;
                bool covered = false;
                while (c.level > 0) {
                    c = c.parent();
                    if (active.count(c)) {
                        finest = std::max(finest, c.level);
                        covered = true;
                        break;
                    }
                }
                if (covered) continue;
            }
            if (t.level > nb.level + 12) continue;
            auto [d0, d1] = side_children(t, opposite(s));
            stack.push_back(d0);
            stack.push_back(d1);
        }
        return finest;
    };

    std::vector<CellKey> merged_parents;
    for (const auto& [parent, cnt] : quad_count) {
        if (cnt != 4) continue;
        // Safe to merge if no pre-merge neighbour of the parent is more than
        // one level finer than the parent (conservative: simultaneous
        // neighbour merges only make the mesh coarser).
        bool ok = true;
        for (int si = 0; si < 4 && ok; ++si) {
            int lvl = level_at_side(parent, static_cast<Side>(si));
            if (lvl > parent.level + 1) ok = false;
        }
        if (ok) merged_parents.push_back(parent);
    }

    std::unordered_map<CellKey, int, CellKeyHash> drop;
    std::vector<CellKey> next;
    for (const CellKey& parent : merged_parents) {
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) drop.emplace(parent.child(dx, dy), 1);
        next.push_back(parent);
    }
    for (const CellKey& k : cells_)
        if (!drop.count(k)) next.push_back(k);
    return Mesh(domain_, nx_, ny_, std::move(next));
}

Mesh Mesh::union_mesh(const Mesh& a, const Mesh& b) {
    if (a.nx_ != b.nx_ || a.ny_ != b.ny_)
        throw std::invalid_argument("union_mesh: meshes must share the root grid");
    std::vector<CellKey> cells;
    // Descend the overlay of the two trees from each root cell.
    std::vector<CellKey> stack;
    for (int j = 0; j < a.ny_; ++j)
        for (int i = 0; i < a.nx_; ++i) stack.push_back({0, i, j});
    auto subdivided = [](const Mesh& m, const CellKey& k) {
        // k is subdivided in m iff k is not active and no ancestor is active.
        return m.find_leaf_or_ancestor(k) < 0;
    };
    while (!stack.empty()) {
        CellKey k = stack.back();
        stack.pop_back();
        if (subdivided(a, k) || subdivided(b, k)) {
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) stack.push_back(k.child(dx, dy));
        } else {
            cells.push_back(k);
        }
    }
    Mesh u(a.domain_, a.nx_, a.ny_, std::move(cells));
    if (!u.is_one_irregular()) {
        std::vector<CellKey> c = u.cells_;
        u.enforce_one_irregular(c);
        u = Mesh(a.domain_, a.nx_, a.ny_, std::move(c));
    }
    return u;
}

void Mesh::build_edges() const {
    edges_.clear();
    cell_edges_.assign(cells_.size(), {});

    auto emit = [&](int c0, int c1, Side s0, Pt a, Pt b) {
        Edge e;
        e.cell[0] = c0;
        e.cell[1] = c1;
        e.side0 = s0;
        e.a = a;
        e.b = b;
        e.length = norm(b - a);
        e.normal = side_normal(s0);
        int id = static_cast<int>(edges_.size());
        edges_.push_back(e);
        cell_edges_[c0].push_back(id);
        if (c1 >= 0) cell_edges_[c1].push_back(id);
    };

    for (int i = 0; i < n_cells(); ++i) {
        const CellKey& k = cells_[i];
        const Rect r = key_rect(k);
        for (int si = 0; si < 4; ++si) {
            const Side s = static_cast<Side>(si);
            Pt a, b; // side endpoints, counterclockwise
            switch (s) {
            case Side::West: a = {r.x0, r.y1}; b = {r.x0, r.y0}; break;
            case Side::East: a = {r.x1, r.y0}; b = {r.x1, r.y1}; break;
            case Side::South: a = {r.x0, r.y0}; b = {r.x1, r.y0}; break;
            default: a = {r.x1, r.y1}; b = {r.x0, r.y1}; break;
            }
            CellKey nbk;
            if (!neighbor_key(k, s, nx_, ny_, nbk)) {
                emit(i, -1, s, a, b); // boundary edge
                continue;
            }
            if (int nb = find(nbk); nb >= 0) {
                // Same-level neighbour: emit once, from the east/north side.
                if (s == Side::East || s == Side::North) emit(i, nb, s, a, b);
                continue;
            }
            if (int nb = find(nbk.parent()); nb >= 0) {
                // Neighbour is coarser: this (finer) cell owns the sub-edge.
                emit(i, nb, s, a, b);
                continue;
            }
            // Neighbour is finer: the two finer cells own the sub-edges.
        }
    }
    edges_built_ = true;
}

const std::vector<Edge>& Mesh::edges() const {
    if (!edges_built_) build_edges();
    return edges_;
}

const std::vector<std::vector<int>>& Mesh::cell_edges() const {
    if (!edges_built_) build_edges();
    return cell_edges_;
}

std::vector<std::vector<int>> Mesh::patches() const {
    const auto& es = edges();
    std::vector<std::set<int>> nb(cells_.size());
    for (const Edge& e : es) {
        if (e.boundary()) continue;
        nb[e.cell[0]].insert(e.cell[1]);
        nb[e.cell[1]].insert(e.cell[0]);
    }
    std::vector<std::vector<int>> out(cells_.size());
    for (std::size_t i = 0; i < nb.size(); ++i) out[i].assign(nb[i].begin(), nb[i].end());
    return out;
}

bool Mesh::is_one_irregular() const {
    for (const Edge& e : edges()) {
        if (e.boundary()) continue;
        if (std::abs(cells_[e.cell[0]].level - cells_[e.cell[1]].level) > 1) return false;
    }
    return true;
}

std::vector<std::pair<Rect, int>> overlay_pieces(const Mesh& dst, int cell, const Mesh& src) {
    std::vector<std::pair<Rect, int>> out;
    std::vector<CellKey> stack{dst.cell_key(cell)};
    while (!stack.empty()) {
        CellKey k = stack.back();
        stack.pop_back();
        if (int i = src.find_leaf_or_ancestor(k); i >= 0) {
            out.emplace_back(dst.key_rect(k), i);
        } else {
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) stack.push_back(k.child(dx, dy));
        }
    }
    return out;
}

void Mesh::write_vtk(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_vtk: cannot open " + path);
    out << "# vtk DataFile Version 3.0\nmesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << 4 * n_cells() << " double\n";
    for (int i = 0; i < n_cells(); ++i) {
        const Rect r = cell_rect(i);
        out << r.x0 << ' ' << r.y0 << " 0\n" << r.x1 << ' ' << r.y0 << " 0\n"
            << r.x1 << ' ' << r.y1 << " 0\n" << r.x0 << ' ' << r.y1 << " 0\n";
    }
    out << "CELLS " << n_cells() << ' ' << 5 * n_cells() << '\n';
    for (int i = 0; i < n_cells(); ++i)
        out << "4 " << 4 * i << ' ' << 4 * i + 1 << ' ' << 4 * i + 2 << ' ' << 4 * i + 3 << '\n';
    out << "CELL_TYPES " << n_cells() << '\n';
    for (int i = 0; i < n_cells(); ++i) out << "9\n"; // VTK_QUAD
    out << "CELL_DATA " << n_cells() << "\nSCALARS level int 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < n_cells(); ++i) out << cells_[i].level << '\n';
}

} // namespace dgb
