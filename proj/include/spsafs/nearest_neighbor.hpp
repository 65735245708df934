#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "spsafs/dataset.hpp"

namespace spsafs {

// Index of the training row closest to `query` in squared Euclidean
// distance. Distance ties resolve to the lowest training row index.
inline std::size_t nearest_index(MatrixView train, const double* query) {
    if (train.rows == 0) throw std::invalid_argument("nearest_index: empty training set");
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t r = 0; r < train.rows; ++r) {
        const double* row = train.row(r);
        double d = 0.0;
        for (std::size_t c = 0; c < train.cols; ++c) {
            const double diff = row[c] - query[c];
            d += diff * diff;
        }
        if (best_d < 0.0 || d < best_d) {
            best_d = d;
            best = r;
        }
    }
    return best;
}

inline std::vector<int> nn_predict(MatrixView train, const std::vector<int>& train_labels,
                                   MatrixView test) {
    if (train.rows != train_labels.size())
        throw std::invalid_argument("nn_predict: label count mismatch");
    if (train.cols != test.cols)
        throw std::invalid_argument("nn_predict: feature count mismatch");
    std::vector<int> out(test.rows);
    for (std::size_t r = 0; r < test.rows; ++r)
        out[r] = train_labels[nearest_index(train, test.row(r))];
    return out;
}

}  // namespace spsafs
