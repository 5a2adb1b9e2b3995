#include "cvt/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cvt/errors.hpp"
#include "cvt/rng.hpp"

namespace cvt {

double gini(std::span<const double> class_counts) {
    double total = 0.0;
    for (double c : class_counts) {
        if (c < 0.0) throw DataError("gini: negative class count");
        total += c;
    }
    if (total <= 0.0) throw DataError("gini: zero total count");
    double sum_sq = 0.0;
    for (double c : class_counts) {
        const double p = c / total;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

int Tree::predict(std::span<const double> x) const {
    std::size_t node = 0;
    while (!nodes[node].leaf) {
        node = static_cast<std::size_t>(x[nodes[node].feature] <= nodes[node].threshold
                                            ? nodes[node].left
                                            : nodes[node].right);
    }
    const auto& counts = nodes[node].class_counts;
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

bool Tree::has_split() const {
    return std::any_of(nodes.begin(), nodes.end(), [](const TreeNode& n) { return !n.leaf; });
}

std::vector<double> Tree::impurity_decreases(std::size_t n_features) const {
    std::vector<double> out(n_features, 0.0);
    for (const TreeNode& n : nodes)
        if (!n.leaf) out[n.feature] += n.weighted_impurity_decrease;
    return out;
}

namespace {

struct SplitCandidate {
    bool valid = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double decrease = -1.0; // impurity decrease, unweighted by node share

    /// Deterministic preference: larger decrease, then lower feature index,
    /// then lower threshold.
    bool better_than(const SplitCandidate& other) const {
        if (!other.valid) return valid;
        if (!valid) return false;
        if (decrease != other.decrease) return decrease > other.decrease;
        if (feature != other.feature) return feature < other.feature;
        return threshold < other.threshold;
    }
};

class TreeBuilder {
public:
    TreeBuilder(const LabeledTable& data, const ForestConfig& cfg, std::uint64_t seed,
                std::size_t n_total)
        : data_(data), cfg_(cfg), rng_(seed), n_total_(n_total) {}

    Tree build(std::vector<std::size_t> sample_idx) {
        tree_.nodes.clear();
        grow(std::move(sample_idx));
        return std::move(tree_);
    }

private:
    std::vector<double> count_classes(const std::vector<std::size_t>& idx) const {
        std::vector<double> counts(data_.n_classes(), 0.0);
        for (std::size_t i : idx) counts[static_cast<std::size_t>(data_.labels[i])] += 1.0;
        return counts;
    }

    SplitCandidate best_split_on_feature(const std::vector<std::size_t>& idx, std::size_t f,
                                         const std::vector<double>& parent_counts,
                                         double parent_impurity) const {
        std::vector<std::pair<double, int>> vals;
        vals.reserve(idx.size());
        for (std::size_t i : idx) vals.emplace_back(data_.features(i, f), data_.labels[i]);
        std::sort(vals.begin(), vals.end());

        SplitCandidate best;
        std::vector<double> left(data_.n_classes(), 0.0);
        std::vector<double> right = parent_counts;
        const auto n = static_cast<double>(idx.size());
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            left[static_cast<std::size_t>(vals[i].second)] += 1.0;
            right[static_cast<std::size_t>(vals[i].second)] -= 1.0;
            if (vals[i].first == vals[i + 1].first) continue; // not a boundary
            const double nl = static_cast<double>(i + 1);
            const double nr = n - nl;
            const double decrease =
                parent_impurity - (nl / n) * gini(left) - (nr / n) * gini(right);
            SplitCandidate cand;
            cand.valid = true;
            cand.feature = f;
            cand.threshold = vals[i].first + (vals[i + 1].first - vals[i].first) / 2.0;
            cand.decrease = decrease;
            if (cand.better_than(best)) best = cand;
        }
        return best;
    }

    int grow(std::vector<std::size_t> idx) {
        const auto counts = count_classes(idx);
        const double impurity = gini(counts);

        const int node_id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        const bool pure = impurity == 0.0;
        if (pure || idx.size() < cfg_.min_samples_split || idx.size() < 2) {
            tree_.nodes[static_cast<std::size_t>(node_id)].class_counts = counts;
            return node_id;
        }

        // Walk a seeded feature permutation; non-constant features count
        // toward the max_features budget, and the walk continues past the
        // budget only while no usable split has been found.
        std::size_t budget = data_.n_features();
        if (cfg_.max_features == MaxFeatures::sqrt_of_total)
            budget = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::sqrt(static_cast<double>(data_.n_features()))));

        std::vector<std::size_t> order(data_.n_features());
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng_.shuffle(order);

        SplitCandidate best;
        std::size_t inspected = 0;
        for (std::size_t f : order) {
            if (inspected >= budget && best.valid) break;
            const SplitCandidate cand = best_split_on_feature(idx, f, counts, impurity);
            if (cand.valid) {
                ++inspected; // constant features don't consume budget
                if (cand.better_than(best)) best = cand;
            }
        }
        if (!best.valid || best.decrease <= 0.0) {
            tree_.nodes[static_cast<std::size_t>(node_id)].class_counts = counts;
            return node_id;
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx)
            (data_.features(i, best.feature) <= best.threshold ? left_idx : right_idx).push_back(i);

        {
            TreeNode& node = tree_.nodes[static_cast<std::size_t>(node_id)];
            node.leaf = false;
            node.feature = best.feature;
            node.threshold = best.threshold;
            node.weighted_impurity_decrease =
                (static_cast<double>(idx.size()) / static_cast<double>(n_total_)) * best.decrease;
        }
        idx.clear();
        idx.shrink_to_fit();

        const int left = grow(std::move(left_idx));
        tree_.nodes[static_cast<std::size_t>(node_id)].left = left;
        const int right = grow(std::move(right_idx));
        tree_.nodes[static_cast<std::size_t>(node_id)].right = right;
        return node_id;
    }

    const LabeledTable& data_;
    const ForestConfig& cfg_;
    mutable Rng rng_;
    std::size_t n_total_;
    Tree tree_;
};

} // namespace

Forest fit_forest(const LabeledTable& data, const ForestConfig& cfg) {
    if (cfg.n_trees == 0) throw DataError("fit_forest: n_trees must be >= 1");
    if (data.n_samples() == 0) throw DataError("fit_forest: empty table");

    Forest forest;
    forest.config = cfg;
    forest.n_features = data.n_features();
    forest.n_classes = data.n_classes();
    forest.trees.reserve(cfg.n_trees);

    const std::size_t n = data.n_samples();
    for (std::size_t t = 0; t < cfg.n_trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(cfg.seed, t);
        Rng boot_rng(tree_seed);
        std::vector<std::size_t> idx(n);
        if (cfg.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::size_t>(boot_rng.below(n));
        } else {
            std::iota(idx.begin(), idx.end(), std::size_t{0});
        }
        TreeBuilder builder(data, cfg, derive_seed(tree_seed, 1), n);
        forest.trees.push_back(builder.build(std::move(idx)));
    }
    return forest;
}

int predict(const Forest& forest, std::span<const double> x) {
    std::vector<std::size_t> votes(forest.n_classes, 0);
    for (const Tree& tree : forest.trees) ++votes[static_cast<std::size_t>(tree.predict(x))];
    return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

double accuracy(const Forest& forest, const LabeledTable& data) {
    if (data.n_samples() == 0) throw DataError("accuracy: empty table");
    std::size_t hits = 0;
    for (std::size_t s = 0; s < data.n_samples(); ++s)
        if (predict(forest, data.features.row(s)) == data.labels[s]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(data.n_samples());
}

ForestImportance feature_importances(const Forest& forest) {
    ForestImportance out;
    out.importance.assign(forest.n_features, 0.0);
    std::size_t contributing = 0;
    for (const Tree& tree : forest.trees) {
        if (!tree.has_split()) continue;
        auto dec = tree.impurity_decreases(forest.n_features);
        const double total = std::accumulate(dec.begin(), dec.end(), 0.0);
        if (total <= 0.0) continue;
        for (std::size_t f = 0; f < forest.n_features; ++f)
            out.importance[f] += dec[f] / total;
        ++contributing;
    }
    if (contributing == 0) {
        out.defined = false;
        return out;
    }
    double total = 0.0;
    for (double& v : out.importance) {
        v /= static_cast<double>(contributing);
        total += v;
    }
    for (double& v : out.importance) v /= total;
    out.defined = true;
    return out;
}

} // namespace cvt
