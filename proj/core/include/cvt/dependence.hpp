#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cvt/matrix.hpp"
#include "cvt/mlp.hpp"

namespace cvt {

enum class CdfMode { histogram, exact_ecdf };

/// One node's marginal distribution, estimated either as cumulative
/// histogram-bin mass over the observed range or as the exact ECDF.
/// Evaluation is nondecreasing with range [0,1]; at/above the max
/// observation it returns 1.
class EmpiricalCdf {
public:
    /// Needs >= 2 finite samples. A zero-range sample in histogram mode
    /// collapses to a flagged single-bin CDF.
    static EmpiricalCdf fit(std::span<const double> values, CdfMode mode, std::size_t bins);

    double operator()(double x) const;

    CdfMode mode() const { return mode_; }
    std::size_t bins() const { return cum_mass_.size(); }
    bool degenerate() const { return degenerate_; }
    double min_value() const { return lo_; }
    double max_value() const { return hi_; }
    /// Cumulative mass per bin (histogram) or sorted samples (exact).
    const std::vector<double>& table() const {
        return mode_ == CdfMode::histogram ? cum_mass_ : sorted_;
    }

private:
    CdfMode mode_ = CdfMode::histogram;
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<double> cum_mass_; // histogram mode
    std::vector<double> sorted_;   // exact mode
    bool degenerate_ = false;
};

/// CDF-transformed activations u = F(x); every entry lies in [0,1].
struct PseudoObservations {
    std::vector<std::size_t> layer_widths;
    Matrix u; // n_samples x total_nodes
};

/// One CDF per trace column, in trace column order.
std::vector<EmpiricalCdf> fit_all_cdfs(const ActivationTrace& trace, CdfMode mode,
                                       std::size_t bins);

PseudoObservations pseudo_observations(const ActivationTrace& trace,
                                       const std::vector<EmpiricalCdf>& cdfs);

enum class CorrelationKind { kendall_tau_b, spearman, pearson };

std::string correlation_kind_name(CorrelationKind kind);
CorrelationKind correlation_kind_from_name(const std::string& name);

/// A coefficient that may be undefined (constant margin); undefined values
/// are flagged, never silently zeroed.
struct CorrValue {
    double value = 0.0;
    bool defined = false;
    std::string reason; // empty when defined
};

/// Tie-corrected tau-b via O(n log n) merge-sort pair counting:
/// (concordant - discordant) / sqrt((pairs - tied_x)(pairs - tied_y)).
CorrValue kendall_tau(std::span<const double> x, std::span<const double> y);

/// Pearson on average ranks.
CorrValue spearman(std::span<const double> x, std::span<const double> y);

CorrValue pearson(std::span<const double> x, std::span<const double> y);

CorrValue correlate(std::span<const double> x, std::span<const double> y, CorrelationKind kind);

/// Dependence coefficients between every node pair of two adjacent layers.
struct LayerCorrelation {
    std::size_t source_layer = 0;
    std::size_t target_layer = 0;
    CorrelationKind kind = CorrelationKind::kendall_tau_b;
    Matrix values;                    // n_source_nodes x n_target_nodes
    std::vector<std::uint8_t> defined; // row-major parallel flags
    std::vector<std::string> reasons;  // empty string when defined

    bool entry_defined(std::size_t i, std::size_t j) const {
        return defined[i * values.cols() + j] != 0;
    }
    const std::string& entry_reason(std::size_t i, std::size_t j) const {
        return reasons[i * values.cols() + j];
    }
};

/// Coefficients are computed on the copula-scale pseudo-observations.
LayerCorrelation correlation_matrix(const PseudoObservations& pseudo, std::size_t source_layer,
                                    std::size_t target_layer, CorrelationKind kind);

/// One matrix per adjacent layer pair, in layer order.
std::vector<LayerCorrelation> adjacent_correlations(const PseudoObservations& pseudo,
                                                    CorrelationKind kind);

} // namespace cvt
