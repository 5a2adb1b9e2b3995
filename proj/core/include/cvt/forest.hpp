#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cvt/dataset.hpp"

namespace cvt {

enum class MaxFeatures { sqrt_of_total, all };

struct ForestConfig {
    std::size_t n_trees = 100;
    MaxFeatures max_features = MaxFeatures::sqrt_of_total;
    bool bootstrap = true;
    std::uint64_t seed = 1;
    std::size_t min_samples_split = 2;
};

/// 1 - sum(p_c^2) over the class distribution; counts must be nonnegative
/// with a positive total.
double gini(std::span<const double> class_counts);

struct TreeNode {
    bool leaf = true;
    std::size_t feature = 0;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> class_counts;          // leaves
    double weighted_impurity_decrease = 0.0;   // internal nodes
};

/// CART tree over an index arena; node 0 is the root.
struct Tree {
    std::vector<TreeNode> nodes;

    int predict(std::span<const double> x) const;
    bool has_split() const;
    /// Unnormalized mean-decrease-in-impurity per feature.
    std::vector<double> impurity_decreases(std::size_t n_features) const;
};

struct Forest {
    ForestConfig config;
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    std::vector<Tree> trees;
};

/// Bagged CART trees, Gini criterion, per-split feature subsampling;
/// per-tree seeds derive from the master seed, so results do not depend on
/// fitting order.
Forest fit_forest(const LabeledTable& data, const ForestConfig& cfg);

/// Majority vote over tree predictions; ties go to the lowest class id.
int predict(const Forest& forest, std::span<const double> x);
double accuracy(const Forest& forest, const LabeledTable& data);

struct ForestImportance {
    std::vector<double> importance; // normalized to sum 1 when defined
    bool defined = false;
};

/// Mean over split-bearing trees of each tree's normalized weighted impurity
/// decrease per feature; undefined when no tree ever split.
ForestImportance feature_importances(const Forest& forest);

} // namespace cvt
