#pragma once

#include <vector>

#include "hivesound/classifiers.hpp"

namespace hivesound::detail {

Standardizer fit_standardizer(const FeatureTable& table);
Standardizer identity_standardizer(std::size_t n_features);
std::vector<double> apply_standardizer(const Standardizer& s, const std::vector<double>& values);

// 0 = Bee, 1 = NoBee
std::vector<double> binary_targets(const FeatureTable& table);
void require_both_classes(const FeatureTable& table, const char* who);

double stable_sigmoid(double z);

}  // namespace hivesound::detail

namespace hivesound {
// forward pass of a trained network on an already-standardized vector
double mlp_score(const MlpParams& params, const std::vector<double>& standardized);
}  // namespace hivesound
