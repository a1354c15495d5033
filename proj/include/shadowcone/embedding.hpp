#pragma once

#include <cstdint>
#include <vector>

#include "shadowcone/geometry.hpp"
#include "shadowcone/types.hpp"

namespace shadowcone {

// Mutable optimization state: one row of coordinates per node.
struct EmbeddingTable {
    Model model = Model::Ball;
    double k = 1.0;
    int dim = 0;
    std::vector<double> data;  // n * dim, row major

    int n() const { return dim == 0 ? 0 : static_cast<int>(data.size()) / dim; }
    double* row(NodeId i) { return data.data() + static_cast<size_t>(i) * dim; }
    const double* row(NodeId i) const { return data.data() + static_cast<size_t>(i) * dim; }

    Point point(NodeId i) const {
        return Point{model, k, std::vector<double>(row(i), row(i) + dim)};
    }
    void set_point(NodeId i, const Point& p) {
        std::copy(p.x.begin(), p.x.end(), row(i));
    }
};

}  // namespace shadowcone
