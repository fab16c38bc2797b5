#pragma once

#include <vector>

#include "gbafs/dataset.hpp"

namespace gbafs {

/// Majority vote among the n nearest training rows (Euclidean, restricted to
/// `subset`). Distance ties go to the lower training index; vote ties go to
/// the class met first in the neighbor list.
std::vector<std::size_t> knn_predict(const Dataset& train, const Dataset& test, const std::vector<std::size_t>& subset,
                                     std::size_t n_neighbors);

double accuracy(const std::vector<std::size_t>& pred, const std::vector<std::size_t>& truth);

/// Macro-averaged F1 over classes that occur in `truth` or `pred`.
double balanced_f(const std::vector<std::size_t>& pred, const std::vector<std::size_t>& truth);

struct ClassifierConfig {
    std::size_t n_neighbors = 5;
};

struct EvalReport {
    double accuracy = 0.0;
    double balanced_f = 0.0;
    double predict_time = 0.0;  // seconds
    std::vector<std::size_t> subset;
    std::vector<std::size_t> predictions;
    ClassifierConfig classifier;
};

EvalReport evaluate(const Dataset& train, const Dataset& test, const std::vector<std::size_t>& subset,
                    const ClassifierConfig& cfg = {});

}  // namespace gbafs
