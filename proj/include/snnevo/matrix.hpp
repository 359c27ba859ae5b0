#pragma once

// Square synaptic weight matrix. Row i = receiving neuron, column j = sending
// neuron, so the incoming charge of neuron i is the i-th row dotted with the
// spike vector. The network is non-recurrent: the diagonal is identically
// zero and stays zero through every operation in this library.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace snnevo {

struct WeightMatrix {
    std::size_t n = 0;
    std::vector<double> w; // row-major, n*n entries

    WeightMatrix() = default;

    explicit WeightMatrix(std::size_t dim) : n(dim), w(dim * dim, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return w[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return w[i * n + j]; }

    const double* row(std::size_t i) const { return w.data() + i * n; }

    // Checked construction from raw row-major values. Rejects non-finite
    // entries and a nonzero diagonal.
    static WeightMatrix from_rows(std::size_t dim, std::vector<double> values) {
        if (values.size() != dim * dim)
            throw std::invalid_argument("WeightMatrix: value count does not match dimension");
        WeightMatrix m;
        m.n = dim;
        m.w = std::move(values);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                double x = m.w[i * dim + j];
                if (!std::isfinite(x))
                    throw std::invalid_argument("WeightMatrix: non-finite entry");
                if (i == j && x != 0.0)
                    throw std::invalid_argument("WeightMatrix: nonzero diagonal entry");
            }
        }
        return m;
    }

    bool operator==(const WeightMatrix& other) const = default;
};

} // namespace snnevo
