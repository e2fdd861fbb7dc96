#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gpeps {

/// Undirected incidence structure shared by finite graphs and the
/// translation-invariant unit cell: what the PEPS engine needs to know.
struct Incidence {
    int n = 0;
    std::vector<std::array<int, 2>> ends;     // per edge, the two endpoint vertices
    std::vector<std::vector<int>> incident;   // per vertex, edge ids ascending
};

/// Finite simple graph. Edges stored as (u, v) with u < v, sorted
/// lexicographically, so edge ids are stable across runs.
struct Graph {
    int n = 0;
    std::vector<std::array<int, 2>> edges;
    std::vector<std::vector<int>> adj;        // sorted neighbor lists
    std::vector<std::vector<int>> incident;   // edge ids per vertex, ascending

    int edge_id(int u, int v) const;          // -1 if absent
    int degree(int v) const { return static_cast<int>(adj[v].size()); }
    Incidence incidence() const;
};

Graph make_graph(int n, std::vector<std::array<int, 2>> edges);

enum class HeavyHexSize { Eagle127, Osprey433, Condor1121 };

/// Heavy-hexagon coupling maps of the IBM Eagle/Osprey/Condor processors.
/// Vertices are labeled sequentially, left to right and top to bottom,
/// starting with 0.
Graph build_heavy_hex(HeavyHexSize size);

/// 10-site unit cell of the infinite heavy-hexagon lattice.
/// Edge translations: (0,0) intra-cell, (1,0) next cell in x, (0,1) in y.
struct UnitCellGraph {
    int cell_size = 10;
    struct Edge {
        int a = 0, b = 0;
        int dx = 0, dy = 0;
    };
    std::vector<Edge> edges;
    std::vector<std::vector<int>> incident;

    Incidence incidence() const;
};

UnitCellGraph build_unit_cell();

/// Open-boundary tiling of the unit cell over an nx-by-ny block of
/// translations (edges leaving the block are dropped). Test fixture only.
Graph tile_unit_cell(const UnitCellGraph& cell, int nx, int ny);

bool is_connected(const Graph& g);
bool is_bipartite(const Graph& g);
int max_degree(const Graph& g);

/// Length of the shortest cycle; -1 for forests.
int girth(const Graph& g);

/// Largest r such that the induced ball of radius r around v is cycle-free.
int local_tree_radius(const Graph& g, int v);

int eccentricity(const Graph& g, int v);

/// Named test graphs: path8, tree10, ring12hex, patch20.
Graph fixture(const std::string& name);

std::string export_edge_list(const Graph& g);
Graph parse_edge_list(const std::string& text);

std::uint64_t graph_hash(const Incidence& inc);

} // namespace gpeps
