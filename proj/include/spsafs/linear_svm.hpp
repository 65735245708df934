#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "spsafs/dataset.hpp"
#include "spsafs/random.hpp"

namespace spsafs {

struct SvmOptions {
    double C = 1.0;
    double tolerance = 1e-3;     // stop when PGmax - PGmin drops below this
    std::size_t max_epochs = 1000;
};

// L2-regularized L1-loss linear SVM trained by dual coordinate descent,
// one-vs-rest for multiple classes. The bias term is an extra constant-1
// feature. Each outer pass appends the dual objective to a log so the
// solver's progress can be checked.
class LinearSvm {
public:
    void fit(MatrixView x, const std::vector<int>& y, int class_count,
             const SvmOptions& options, RandomStream& rng) {
        if (x.rows != y.size()) throw std::invalid_argument("LinearSvm: size mismatch");
        if (x.rows == 0) throw std::invalid_argument("LinearSvm: empty training set");
        n_features_ = x.cols;
        weights_.assign(class_count, std::vector<double>(x.cols + 1, 0.0));
        objective_log_.assign(class_count, {});
        std::vector<int> sign(x.rows);
        for (int c = 0; c < class_count; ++c) {
            for (std::size_t i = 0; i < x.rows; ++i) sign[i] = y[i] == c ? 1 : -1;
            solve_binary(x, sign, options, rng, weights_[c], objective_log_[c]);
        }
    }

    double decision_value(const double* row, int cls) const {
        const std::vector<double>& w = weights_[static_cast<std::size_t>(cls)];
        double s = w[n_features_];
        for (std::size_t c = 0; c < n_features_; ++c) s += w[c] * row[c];
        return s;
    }

    int predict_row(const double* row) const {
        int best = 0;
        double best_s = decision_value(row, 0);
        for (int c = 1; c < static_cast<int>(weights_.size()); ++c) {
            const double s = decision_value(row, c);
            if (s > best_s) {
                best_s = s;
                best = c;
            }
        }
        return best;
    }

    std::vector<int> predict(MatrixView x) const {
        std::vector<int> out(x.rows);
        for (std::size_t r = 0; r < x.rows; ++r) out[r] = predict_row(x.row(r));
        return out;
    }

    // Dual objective after each pass of the solver for the given class.
    const std::vector<double>& objective_log(int cls) const {
        return objective_log_[static_cast<std::size_t>(cls)];
    }

private:
    static void solve_binary(MatrixView x, const std::vector<int>& sign,
                             const SvmOptions& options, RandomStream& rng,
                             std::vector<double>& w, std::vector<double>& log) {
        const std::size_t n = x.rows;
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> alpha(n, 0.0), qd(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double* xi = x.row(i);
            double q = 1.0;  // augmented bias feature
            for (std::size_t c = 0; c < x.cols; ++c) q += xi[c] * xi[c];
            qd[i] = q;
        }

        std::vector<std::size_t> index(n);
        for (std::size_t i = 0; i < n; ++i) index[i] = i;
        std::size_t active = n;
        double pgmax_old = inf, pgmin_old = -inf;

        for (std::size_t epoch = 0; epoch < options.max_epochs; ++epoch) {
            double pgmax = -inf, pgmin = inf;
            for (std::size_t s = 0; s + 1 < active; ++s)
                std::swap(index[s], index[s + rng.next_below(active - s)]);

            std::size_t s = 0;
            while (s < active) {
                const std::size_t i = index[s];
                const double yi = sign[i];
                const double* xi = x.row(i);
                double g = w[x.cols];
                for (std::size_t c = 0; c < x.cols; ++c) g += w[c] * xi[c];
                g = g * yi - 1.0;

                double pg = 0.0;
                if (alpha[i] == 0.0) {
                    if (g > pgmax_old) {
                        std::swap(index[s], index[--active]);
                        continue;
                    }
                    if (g < 0.0) pg = g;
                } else if (alpha[i] == options.C) {
                    if (g < pgmin_old) {
                        std::swap(index[s], index[--active]);
                        continue;
                    }
                    if (g > 0.0) pg = g;
                } else {
                    pg = g;
                }
                pgmax = std::max(pgmax, pg);
                pgmin = std::min(pgmin, pg);

                if (std::fabs(pg) > 1e-12) {
                    const double old = alpha[i];
                    alpha[i] = std::min(std::max(old - g / qd[i], 0.0), options.C);
                    const double d = (alpha[i] - old) * yi;
                    for (std::size_t c = 0; c < x.cols; ++c) w[c] += d * xi[c];
                    w[x.cols] += d;
                }
                ++s;
            }

            double obj = 0.0;
            for (double v : w) obj += v * v;
            obj *= 0.5;
            for (double a : alpha) obj -= a;
            log.push_back(obj);

            if (pgmax - pgmin <= options.tolerance) {
                if (active == n) break;
                active = n;  // converged on the shrunken set; recheck everything
                pgmax_old = inf;
                pgmin_old = -inf;
                continue;
            }
            pgmax_old = pgmax <= 0.0 ? inf : pgmax;
            pgmin_old = pgmin >= 0.0 ? -inf : pgmin;
        }
    }

    std::vector<std::vector<double>> weights_;  // per class, n_features + bias
    std::vector<std::vector<double>> objective_log_;
    std::size_t n_features_ = 0;
};

}  // namespace spsafs
