#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spsafs/dataset.hpp"
#include "spsafs/decision_tree.hpp"
#include "spsafs/linear_svm.hpp"
#include "spsafs/nearest_neighbor.hpp"
#include "spsafs/random.hpp"

namespace spsafs {

enum class ClassifierKind { nearest_neighbor, decision_tree, linear_svm };

inline std::string classifier_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::nearest_neighbor: return "nn";
        case ClassifierKind::decision_tree: return "tree";
        case ClassifierKind::linear_svm: return "svm";
    }
    return "?";
}

inline std::optional<ClassifierKind> parse_classifier(const std::string& name) {
    if (name == "nn" || name == "1nn" || name == "knn" || name == "nearest_neighbor")
        return ClassifierKind::nearest_neighbor;
    if (name == "tree" || name == "c4.5" || name == "c45" || name == "decision_tree")
        return ClassifierKind::decision_tree;
    if (name == "svm" || name == "linear_svm") return ClassifierKind::linear_svm;
    return std::nullopt;
}

struct FoldPrediction {
    std::vector<int> labels;
    // Score for class 1, higher means more class-1-like. Only filled on
    // request and only defined for two-class problems.
    std::vector<double> class1_score;
};

inline FoldPrediction fit_predict(ClassifierKind kind, MatrixView train_x,
                                  const std::vector<int>& train_y, int class_count,
                                  MatrixView test_x, RandomStream& rng,
                                  bool want_scores = false) {
    if (want_scores && class_count != 2)
        throw std::invalid_argument("scores need a two-class problem");
    FoldPrediction out;
    switch (kind) {
        case ClassifierKind::nearest_neighbor: {
            out.labels = nn_predict(train_x, train_y, test_x);
            if (want_scores) {
                out.class1_score.resize(out.labels.size());
                for (std::size_t i = 0; i < out.labels.size(); ++i)
                    out.class1_score[i] = static_cast<double>(out.labels[i]);
            }
            break;
        }
        case ClassifierKind::decision_tree: {
            DecisionTree tree;
            tree.fit(train_x, train_y, class_count);
            out.labels = tree.predict(test_x);
            if (want_scores) {
                out.class1_score.resize(test_x.rows);
                for (std::size_t r = 0; r < test_x.rows; ++r)
                    out.class1_score[r] = tree.predict_fraction(test_x.row(r), 1);
            }
            break;
        }
        case ClassifierKind::linear_svm: {
            LinearSvm svm;
            svm.fit(train_x, train_y, class_count, SvmOptions{}, rng);
            out.labels = svm.predict(test_x);
            if (want_scores) {
                out.class1_score.resize(test_x.rows);
                for (std::size_t r = 0; r < test_x.rows; ++r)
                    out.class1_score[r] = svm.decision_value(test_x.row(r), 1) -
                                          svm.decision_value(test_x.row(r), 0);
            }
            break;
        }
    }
    return out;
}

}  // namespace spsafs
