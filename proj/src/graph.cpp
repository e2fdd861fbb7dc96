#include "gpeps/graph.hpp"
#include "gpeps/errors.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

namespace gpeps {

namespace {

void index_graph(Graph& g) {
    for (auto& e : g.edges)
        if (e[0] > e[1]) std::swap(e[0], e[1]);
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    g.adj.assign(g.n, {});
    g.incident.assign(g.n, {});
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto [u, v] = g.edges[i];
        if (u < 0 || v >= g.n) throw InvalidArgument("edge endpoint out of range");
        if (u == v) throw InvalidArgument("self-loop");
        g.adj[u].push_back(v);
        g.adj[v].push_back(u);
        g.incident[u].push_back(static_cast<int>(i));
        g.incident[v].push_back(static_cast<int>(i));
    }
    for (auto& a : g.adj) std::sort(a.begin(), a.end());
}

std::vector<int> bfs_dist(const Graph& g, int v) {
    std::vector<int> dist(g.n, -1);
    std::deque<int> q{v};
    dist[v] = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int w : g.adj[u])
            if (dist[w] < 0) {
                dist[w] = dist[u] + 1;
                q.push_back(w);
            }
    }
    return dist;
}

} // namespace

int Graph::edge_id(int u, int v) const {
    if (u > v) std::swap(u, v);
    std::array<int, 2> key{u, v};
    auto it = std::lower_bound(edges.begin(), edges.end(), key);
    if (it == edges.end() || *it != key) return -1;
    return static_cast<int>(it - edges.begin());
}

Incidence Graph::incidence() const {
    return Incidence{n, edges, incident};
}

Graph make_graph(int n, std::vector<std::array<int, 2>> edges) {
    Graph g;
    g.n = n;
    g.edges = std::move(edges);
    index_graph(g);
    return g;
}

namespace {

// R main rows of C columns with connector rows in between. The first main
// row misses its last site, the last main row misses its first. Connector
// columns alternate {0,4,8,...} and {2,6,10,...} between successive
// connector rows, which produces the staggered heavy-hex pattern.
Graph build_heavy_hex_rc(int rows, int cols) {
    std::vector<std::vector<int>> main_label(rows, std::vector<int>(cols, -1));
    std::vector<std::array<int, 2>> edges;
    int next = 0;
    auto col_present = [&](int r, int c) {
        if (r == 0 && c == cols - 1) return false;
        if (r == rows - 1 && c == 0) return false;
        return true;
    };
    std::vector<std::vector<std::pair<int, int>>> connectors(rows - 1); // (col, label)
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c)
            if (col_present(r, c)) main_label[r][c] = next++;
        if (r + 1 < rows) {
            const int start = (r % 2 == 0) ? 0 : 2;
            for (int c = start; c < cols; c += 4) connectors[r].push_back({c, next++});
        }
    }
    for (int r = 0; r < rows; ++r) {
        for (int c = 1; c < cols; ++c)
            if (col_present(r, c) && col_present(r, c - 1))
                edges.push_back({main_label[r][c - 1], main_label[r][c]});
        if (r + 1 < rows)
            for (const auto& [c, id] : connectors[r]) {
                edges.push_back({main_label[r][c], id});
                edges.push_back({id, main_label[r + 1][c]});
            }
    }
    return make_graph(next, std::move(edges));
}

} // namespace

Graph build_heavy_hex(HeavyHexSize size) {
    switch (size) {
        case HeavyHexSize::Eagle127: return build_heavy_hex_rc(7, 15);
        case HeavyHexSize::Osprey433: return build_heavy_hex_rc(13, 27);
        case HeavyHexSize::Condor1121: return build_heavy_hex_rc(21, 43);
    }
    throw InvalidArgument("unknown heavy-hex size");
}

UnitCellGraph build_unit_cell() {
    // Sites 0..3: main row cols 0..3; 4: connector at col 0; 5..8: next main
    // row; 9: connector at col 2 feeding the cell below.
    UnitCellGraph cell;
    cell.edges = {
        {0, 1, 0, 0}, {1, 2, 0, 0}, {2, 3, 0, 0}, {3, 0, 1, 0},
        {0, 4, 0, 0}, {4, 5, 0, 0},
        {5, 6, 0, 0}, {6, 7, 0, 0}, {7, 8, 0, 0}, {8, 5, 1, 0},
        {7, 9, 0, 0}, {9, 2, 0, 1},
    };
    cell.incident.assign(cell.cell_size, {});
    for (std::size_t i = 0; i < cell.edges.size(); ++i) {
        cell.incident[cell.edges[i].a].push_back(static_cast<int>(i));
        cell.incident[cell.edges[i].b].push_back(static_cast<int>(i));
    }
    return cell;
}

Incidence UnitCellGraph::incidence() const {
    Incidence inc;
    inc.n = cell_size;
    for (const auto& e : edges) inc.ends.push_back({e.a, e.b});
    inc.incident = incident;
    return inc;
}

Graph tile_unit_cell(const UnitCellGraph& cell, int nx, int ny) {
    auto id = [&](int cx, int cy, int s) { return (cy * nx + cx) * cell.cell_size + s; };
    std::vector<std::array<int, 2>> edges;
    for (int cy = 0; cy < ny; ++cy)
        for (int cx = 0; cx < nx; ++cx)
            for (const auto& e : cell.edges) {
                const int tx = cx + e.dx, ty = cy + e.dy;
                if (tx < 0 || tx >= nx || ty < 0 || ty >= ny) continue;
                edges.push_back({id(cx, cy, e.a), id(tx, ty, e.b)});
            }
    return make_graph(nx * ny * cell.cell_size, std::move(edges));
}

bool is_connected(const Graph& g) {
    if (g.n == 0) return true;
    auto dist = bfs_dist(g, 0);
    return std::all_of(dist.begin(), dist.end(), [](int d) { return d >= 0; });
}

bool is_bipartite(const Graph& g) {
    std::vector<int> color(g.n, -1);
    for (int s = 0; s < g.n; ++s) {
        if (color[s] >= 0) continue;
        color[s] = 0;
        std::deque<int> q{s};
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            for (int w : g.adj[u]) {
                if (color[w] < 0) {
                    color[w] = 1 - color[u];
                    q.push_back(w);
                } else if (color[w] == color[u]) {
                    return false;
                }
            }
        }
    }
    return true;
}

int max_degree(const Graph& g) {
    int d = 0;
    for (int v = 0; v < g.n; ++v) d = std::max(d, g.degree(v));
    return d;
}

int girth(const Graph& g) {
    int best = std::numeric_limits<int>::max();
    for (int s = 0; s < g.n; ++s) {
        std::vector<int> dist(g.n, -1), parent(g.n, -1);
        std::deque<int> q{s};
        dist[s] = 0;
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            for (int w : g.adj[u]) {
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    q.push_back(w);
                } else if (w != parent[u]) {
                    best = std::min(best, dist[u] + dist[w] + 1);
                }
            }
        }
    }
    return best == std::numeric_limits<int>::max() ? -1 : best;
}

namespace {

// The induced ball is connected, so it is cycle-free iff |E| = |V| - 1.
bool ball_acyclic(const Graph& g, const std::vector<int>& dist, int r) {
    std::size_t nv = 0, ne = 0;
    for (int v = 0; v < g.n; ++v)
        if (dist[v] >= 0 && dist[v] <= r) ++nv;
    for (const auto& [u, v] : g.edges)
        if (dist[u] >= 0 && dist[u] <= r && dist[v] >= 0 && dist[v] <= r) ++ne;
    return ne == nv - 1;
}

} // namespace

int local_tree_radius(const Graph& g, int v) {
    if (v < 0 || v >= g.n) throw InvalidArgument("vertex out of range");
    auto dist = bfs_dist(g, v);
    int ecc = 0;
    for (int d : dist) ecc = std::max(ecc, d);
    for (int r = 1; r <= ecc; ++r)
        if (!ball_acyclic(g, dist, r)) return r - 1;
    return ecc;
}

int eccentricity(const Graph& g, int v) {
    auto dist = bfs_dist(g, v);
    int ecc = 0;
    for (int d : dist) ecc = std::max(ecc, d);
    return ecc;
}

Graph fixture(const std::string& name) {
    if (name == "path8") {
        std::vector<std::array<int, 2>> e;
        for (int i = 0; i < 7; ++i) e.push_back({i, i + 1});
        return make_graph(8, std::move(e));
    }
    if (name == "tree10") {
        return make_graph(10, {{0, 1}, {1, 2}, {1, 3}, {3, 4}, {4, 5},
                               {0, 6}, {6, 7}, {7, 8}, {6, 9}});
    }
    if (name == "ring12hex") {
        std::vector<std::array<int, 2>> e;
        for (int i = 0; i < 12; ++i) e.push_back({i, (i + 1) % 12});
        return make_graph(12, std::move(e));
    }
    if (name == "patch20") {
        // Two stacked heavy-hex rows (one closed 12-cycle) plus a tail.
        return make_graph(20, {{0, 1}, {1, 2}, {2, 3}, {3, 4},
                               {0, 5}, {5, 7}, {4, 6}, {6, 11},
                               {7, 8}, {8, 9}, {9, 10}, {10, 11},
                               {9, 12}, {12, 15},
                               {13, 14}, {14, 15}, {15, 16}, {16, 17},
                               {17, 18}, {18, 19}});
    }
    throw InvalidArgument("unknown fixture: " + name);
}

std::string export_edge_list(const Graph& g) {
    std::ostringstream os;
    os << "m " << g.n << "\n";
    for (const auto& [u, v] : g.edges) os << u << " " << v << "\n";
    return os.str();
}

Graph parse_edge_list(const std::string& text) {
    std::istringstream is(text);
    std::string tag;
    int n = 0;
    if (!(is >> tag >> n) || tag != "m") throw InvalidArgument("bad edge list header");
    std::vector<std::array<int, 2>> edges;
    int u, v;
    while (is >> u >> v) edges.push_back({u, v});
    return make_graph(n, std::move(edges));
}

std::uint64_t graph_hash(const Incidence& inc) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::uint64_t x) {
        h ^= x;
        h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(inc.n));
    for (const auto& [u, v] : inc.ends) {
        mix(static_cast<std::uint64_t>(u));
        mix(static_cast<std::uint64_t>(v));
    }
    return h;
}

} // namespace gpeps
