#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "spsafs/dataset.hpp"

namespace spsafs {

struct TreeOptions {
    std::size_t min_leaf = 2;  // minimum instances in each child of a split
};

namespace detail {

inline double entropy(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace detail

struct SplitCandidate {
    bool valid = false;
    double threshold = 0.0;
    double gain = 0.0;
    double gain_ratio = 0.0;
};

// Best binary split of a single numeric feature by gain ratio. Thresholds
// are midpoints between consecutive distinct sorted values; splits leaving
// a child below min_leaf or with non-positive information gain are skipped.
inline SplitCandidate best_split(const std::vector<double>& values,
                                 const std::vector<int>& labels, int class_count,
                                 std::size_t min_leaf = 1) {
    if (values.size() != labels.size())
        throw std::invalid_argument("best_split: size mismatch");
    const std::size_t n = values.size();
    SplitCandidate best;
    if (n < 2) return best;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<std::size_t> total(class_count, 0);
    for (int l : labels) total[static_cast<std::size_t>(l)]++;
    const double parent_entropy = detail::entropy(total, n);

    std::vector<std::size_t> left(class_count, 0);
    for (std::size_t i = 1; i < n; ++i) {
        left[static_cast<std::size_t>(labels[order[i - 1]])]++;
        if (values[order[i - 1]] == values[order[i]]) continue;
        const std::size_t n_left = i, n_right = n - i;
        if (n_left < min_leaf || n_right < min_leaf) continue;

        std::vector<std::size_t> right(class_count);
        for (int c = 0; c < class_count; ++c) right[c] = total[c] - left[c];
        const double wl = static_cast<double>(n_left) / static_cast<double>(n);
        const double wr = static_cast<double>(n_right) / static_cast<double>(n);
        const double gain = parent_entropy - wl * detail::entropy(left, n_left) -
                            wr * detail::entropy(right, n_right);
        if (gain <= 0.0) continue;
        const double split_info = -wl * std::log2(wl) - wr * std::log2(wr);
        const double ratio = gain / split_info;
        if (!best.valid || ratio > best.gain_ratio) {
            best.valid = true;
            best.threshold = (values[order[i - 1]] + values[order[i]]) / 2.0;
            best.gain = gain;
            best.gain_ratio = ratio;
        }
    }
    return best;
}

// Unpruned C4.5-flavoured tree: binary splits on numeric features chosen by
// gain ratio, recursion until nodes are pure or no valid split remains.
class DecisionTree {
public:
    void fit(MatrixView x, const std::vector<int>& y, int class_count,
             const TreeOptions& options = {}) {
        if (x.rows != y.size()) throw std::invalid_argument("DecisionTree: size mismatch");
        if (x.rows == 0) throw std::invalid_argument("DecisionTree: empty training set");
        class_count_ = class_count;
        options_ = options;
        nodes_.clear();
        std::vector<std::size_t> rows(x.rows);
        std::iota(rows.begin(), rows.end(), 0);
        build(x, y, rows);
    }

    int predict_row(const double* row) const {
        return nodes_[descend(row)].label;
    }

    // Fraction of training instances of `cls` in the reached leaf.
    double predict_fraction(const double* row, int cls) const {
        return nodes_[descend(row)].fraction[static_cast<std::size_t>(cls)];
    }

    std::vector<int> predict(MatrixView x) const {
        std::vector<int> out(x.rows);
        for (std::size_t r = 0; r < x.rows; ++r) out[r] = predict_row(x.row(r));
        return out;
    }

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        bool is_leaf = true;
        int label = 0;
        std::vector<double> fraction;  // class distribution at the node
        std::size_t feature = 0;
        double threshold = 0.0;
        std::size_t left = 0, right = 0;
    };

    std::size_t descend(const double* row) const {
        std::size_t at = 0;
        while (!nodes_[at].is_leaf)
            at = row[nodes_[at].feature] <= nodes_[at].threshold ? nodes_[at].left
                                                                 : nodes_[at].right;
        return at;
    }

    std::size_t build(MatrixView x, const std::vector<int>& y,
                      const std::vector<std::size_t>& rows) {
        const std::size_t self = nodes_.size();
        nodes_.emplace_back();

        std::vector<std::size_t> counts(class_count_, 0);
        for (std::size_t r : rows) counts[static_cast<std::size_t>(y[r])]++;
        {
            Node& node = nodes_[self];
            node.fraction.resize(counts.size());
            std::size_t best_count = 0;
            for (std::size_t c = 0; c < counts.size(); ++c) {
                node.fraction[c] =
                    static_cast<double>(counts[c]) / static_cast<double>(rows.size());
                if (counts[c] > best_count) {  // tie keeps the lower class index
                    best_count = counts[c];
                    node.label = static_cast<int>(c);
                }
            }
            if (best_count == rows.size()) return self;  // pure node
        }

        std::vector<double> col(rows.size());
        std::vector<int> lab(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) lab[i] = y[rows[i]];

        SplitCandidate best;
        std::size_t best_feature = 0;
        for (std::size_t f = 0; f < x.cols; ++f) {
            for (std::size_t i = 0; i < rows.size(); ++i) col[i] = x.at(rows[i], f);
            const SplitCandidate cand = best_split(col, lab, class_count_, options_.min_leaf);
            if (cand.valid && (!best.valid || cand.gain_ratio > best.gain_ratio)) {
                best = cand;
                best_feature = f;
            }
        }
        if (!best.valid) return self;

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows)
            (x.at(r, best_feature) <= best.threshold ? left_rows : right_rows).push_back(r);

        const std::size_t left = build(x, y, left_rows);
        const std::size_t right = build(x, y, right_rows);
        Node& node = nodes_[self];
        node.is_leaf = false;
        node.feature = best_feature;
        node.threshold = best.threshold;
        node.left = left;
        node.right = right;
        return self;
    }

    std::vector<Node> nodes_;
    TreeOptions options_;
    int class_count_ = 0;
};

}  // namespace spsafs
