#pragma once

// Nodal fields on a star graph truncated at distance L from the vertex.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "nlsstar/errors.hpp"

namespace nlsstar {

struct GridSpec {
    int n_edges;
    double length;
    double dx;

    GridSpec(int n, double L, double h) : n_edges(n), length(L), dx(h) {
        detail::require(n >= 2, "grid needs at least 2 edges");
        detail::require(std::isfinite(h) && h > 0.0, "grid spacing must be positive");
        detail::require(std::isfinite(L) && L > h, "truncation length must exceed the spacing");
        const double cells = L / h;
        detail::require(std::abs(cells - std::round(cells)) <= 1e-9 * cells,
                        "truncation length must be an integer multiple of dx");
    }

    /// Nodes per edge including the vertex (index 0) and the far end.
    std::size_t nodes_per_edge() const {
        return static_cast<std::size_t>(std::llround(length / dx)) + 1;
    }

    double x(std::size_t node) const { return static_cast<double>(node) * dx; }
};

/// Vertex value plus, for every edge, the values at nodes 1..n-1.
struct DiscreteField {
    GridSpec grid;
    double vertex = 0.0;
    std::vector<std::vector<double>> edges;

    explicit DiscreteField(const GridSpec& g)
        : grid(g), edges(g.n_edges, std::vector<double>(g.nodes_per_edge() - 1, 0.0)) {}

    double value(int edge, std::size_t node) const {
        return node == 0 ? vertex : edges[edge][node - 1];
    }

    void set(int edge, std::size_t node, double v) {
        if (node == 0) vertex = v; else edges[edge][node - 1] = v;
    }

    DiscreteField& operator*=(double s) {
        vertex *= s;
        for (auto& e : edges)
            for (double& v : e) v *= s;
        return *this;
    }
};

inline DiscreteField operator*(double s, DiscreteField f) {
    f *= s;
    return f;
}

/// Samples f(edge, x) at every node. The vertex value is taken from edge 0.
inline DiscreteField sample_field(const GridSpec& grid,
                                  const std::function<double(int, double)>& f) {
    DiscreteField field(grid);
    field.vertex = f(0, 0.0);
    const std::size_t n = grid.nodes_per_edge();
    for (int e = 0; e < grid.n_edges; ++e)
        for (std::size_t i = 1; i < n; ++i) field.edges[e][i - 1] = f(e, grid.x(i));
    return field;
}

/// Multiplies every nodal value by (1 + amplitude·ξ), ξ uniform in [-1, 1].
inline DiscreteField perturb(DiscreteField field, double amplitude, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> xi(-1.0, 1.0);
    field.vertex *= 1.0 + amplitude * xi(rng);
    for (auto& e : field.edges)
        for (double& v : e) v *= 1.0 + amplitude * xi(rng);
    return field;
}

inline void write_field_csv(std::ostream& out, const DiscreteField& field) {
    out << "edge,node,x,value\n";
    out.precision(17);
    const std::size_t n = field.grid.nodes_per_edge();
    for (int e = 0; e < field.grid.n_edges; ++e)
        for (std::size_t i = 0; i < n; ++i)
            out << e << ',' << i << ',' << field.grid.x(i) << ',' << field.value(e, i) << '\n';
}

}  // namespace nlsstar
