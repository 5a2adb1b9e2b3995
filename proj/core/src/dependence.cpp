#include "cvt/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cvt/errors.hpp"

namespace cvt {

EmpiricalCdf EmpiricalCdf::fit(std::span<const double> values, CdfMode mode, std::size_t bins) {
    if (values.size() < 2) throw DataError("fit_cdf: need at least 2 samples");
    for (double v : values)
        if (!std::isfinite(v)) throw DataError("fit_cdf: non-finite sample value");

    EmpiricalCdf cdf;
    cdf.mode_ = mode;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    cdf.lo_ = *lo_it;
    cdf.hi_ = *hi_it;

    if (mode == CdfMode::exact_ecdf) {
        cdf.sorted_.assign(values.begin(), values.end());
        std::sort(cdf.sorted_.begin(), cdf.sorted_.end());
        return cdf;
    }

    if (bins == 0) throw DataError("fit_cdf: bins must be >= 1");
    if (cdf.lo_ == cdf.hi_) {
        cdf.degenerate_ = true;
        cdf.cum_mass_.assign(1, 1.0);
        return cdf;
    }
    // Bin counts over the observed range, then a running sum: the PDF
    // histogram integrated into a CDF.
    std::vector<double> mass(bins, 0.0);
    const double width = (cdf.hi_ - cdf.lo_) / static_cast<double>(bins);
    const double per_sample = 1.0 / static_cast<double>(values.size());
    for (double v : values) {
        auto k = static_cast<std::size_t>((v - cdf.lo_) / width);
        if (k >= bins) k = bins - 1; // max value lands in the last bin
        mass[k] += per_sample;
    }
    cdf.cum_mass_.resize(bins);
    double acc = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        acc += mass[k];
        cdf.cum_mass_[k] = acc;
    }
    cdf.cum_mass_.back() = 1.0; // absorb rounding
    return cdf;
}

double EmpiricalCdf::operator()(double x) const {
    if (mode_ == CdfMode::exact_ecdf) {
        const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
        return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
    }
    if (degenerate_) return x >= lo_ ? 1.0 : 0.0;
    if (x < lo_) return 0.0;
    if (x >= hi_) return 1.0;
    const double width = (hi_ - lo_) / static_cast<double>(cum_mass_.size());
    auto k = static_cast<std::size_t>((x - lo_) / width);
    if (k >= cum_mass_.size()) k = cum_mass_.size() - 1;
    return cum_mass_[k];
}

std::vector<EmpiricalCdf> fit_all_cdfs(const ActivationTrace& trace, CdfMode mode,
                                       std::size_t bins) {
    std::vector<EmpiricalCdf> cdfs;
    cdfs.reserve(trace.total_nodes());
    for (std::size_t c = 0; c < trace.total_nodes(); ++c) {
        const auto col = trace.values.column(c);
        cdfs.push_back(EmpiricalCdf::fit(col, mode, bins));
    }
    return cdfs;
}

PseudoObservations pseudo_observations(const ActivationTrace& trace,
                                       const std::vector<EmpiricalCdf>& cdfs) {
    if (cdfs.size() != trace.total_nodes())
        throw DataError("pseudo_observations: " + std::to_string(cdfs.size()) + " CDFs for " +
                        std::to_string(trace.total_nodes()) + " nodes");
    PseudoObservations pseudo;
    pseudo.layer_widths = trace.layer_widths;
    pseudo.u = Matrix(trace.values.rows(), trace.values.cols());
    for (std::size_t s = 0; s < trace.values.rows(); ++s)
        for (std::size_t c = 0; c < trace.values.cols(); ++c)
            pseudo.u(s, c) = cdfs[c](trace.values(s, c));
    return pseudo;
}

std::string correlation_kind_name(CorrelationKind kind) {
    switch (kind) {
        case CorrelationKind::kendall_tau_b: return "kendall_tau_b";
        case CorrelationKind::spearman: return "spearman";
        case CorrelationKind::pearson: return "pearson";
    }
    return "kendall_tau_b";
}

CorrelationKind correlation_kind_from_name(const std::string& name) {
    if (name == "kendall" || name == "kendall_tau_b") return CorrelationKind::kendall_tau_b;
    if (name == "spearman") return CorrelationKind::spearman;
    if (name == "pearson") return CorrelationKind::pearson;
    throw DataError("unknown correlation kind: " + name);
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> y, const char* who) {
    if (x.size() != y.size())
        throw DataError(std::string(who) + ": length mismatch (" + std::to_string(x.size()) +
                        " vs " + std::to_string(y.size()) + ")");
    if (x.size() < 2) throw DataError(std::string(who) + ": need at least 2 samples");
}

/// Sum of t*(t-1)/2 over runs of equal values in a sorted vector.
std::int64_t tied_pairs_sorted(const std::vector<double>& v) {
    std::int64_t ties = 0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= v.size(); ++i) {
        if (i < v.size() && v[i] == v[i - 1]) {
            ++run;
        } else {
            ties += static_cast<std::int64_t>(run) * static_cast<std::int64_t>(run - 1) / 2;
            run = 1;
        }
    }
    return ties;
}

/// Counts strict inversions (i < j, v[i] > v[j]) with a bottom-up merge sort.
std::int64_t count_inversions(std::vector<double>& v) {
    std::int64_t inversions = 0;
    std::vector<double> buf(v.size());
    for (std::size_t width = 1; width < v.size(); width *= 2) {
        for (std::size_t lo = 0; lo + width < v.size(); lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, v.size());
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (v[j] < v[i]) {
                    inversions += static_cast<std::int64_t>(mid - i);
                    buf[k++] = v[j++];
                } else {
                    buf[k++] = v[i++];
                }
            }
            while (i < mid) buf[k++] = v[i++];
            while (j < hi) buf[k++] = v[j++];
            std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                      buf.begin() + static_cast<std::ptrdiff_t>(hi),
                      v.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    return inversions;
}

} // namespace

CorrValue kendall_tau(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y, "kendall_tau");
    const std::size_t n = x.size();

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;

    // Tie counts for x and joint (x,y) runs in x-sorted order.
    std::int64_t ntie_x = 0, ntie_xy = 0;
    std::size_t run_x = 1, run_xy = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        const bool same_x = i < n && x[idx[i]] == x[idx[i - 1]];
        const bool same_xy = same_x && y[idx[i]] == y[idx[i - 1]];
        if (same_x) ++run_x;
        else {
            ntie_x += static_cast<std::int64_t>(run_x) * static_cast<std::int64_t>(run_x - 1) / 2;
            run_x = 1;
        }
        if (same_xy) ++run_xy;
        else {
            ntie_xy += static_cast<std::int64_t>(run_xy) * static_cast<std::int64_t>(run_xy - 1) / 2;
            run_xy = 1;
        }
    }

    std::vector<double> y_sorted_by_x(n);
    for (std::size_t i = 0; i < n; ++i) y_sorted_by_x[i] = y[idx[i]];
    std::vector<double> y_copy = y_sorted_by_x;
    const std::int64_t discordant = count_inversions(y_copy);

    std::sort(y_sorted_by_x.begin(), y_sorted_by_x.end());
    const std::int64_t ntie_y = tied_pairs_sorted(y_sorted_by_x);

    const std::int64_t den_x = n0 - ntie_x;
    const std::int64_t den_y = n0 - ntie_y;
    if (den_x == 0 || den_y == 0) {
        CorrValue out;
        out.reason = den_x == 0 && den_y == 0 ? "constant margin (both)"
                     : den_x == 0             ? "constant margin (source)"
                                              : "constant margin (target)";
        return out;
    }

    const std::int64_t numerator = n0 - ntie_x - ntie_y + ntie_xy - 2 * discordant;
    const double tau = static_cast<double>(numerator) /
                       std::sqrt(static_cast<double>(den_x) * static_cast<double>(den_y));
    return {tau, true, ""};
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace

CorrValue pearson(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y, "pearson");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        CorrValue out;
        out.reason = sxx == 0.0 && syy == 0.0 ? "constant margin (both)"
                     : sxx == 0.0             ? "constant margin (source)"
                                              : "constant margin (target)";
        return out;
    }
    const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    return {r, true, ""};
}

CorrValue spearman(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y, "spearman");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

CorrValue correlate(std::span<const double> x, std::span<const double> y, CorrelationKind kind) {
    switch (kind) {
        case CorrelationKind::kendall_tau_b: return kendall_tau(x, y);
        case CorrelationKind::spearman: return spearman(x, y);
        case CorrelationKind::pearson: return pearson(x, y);
    }
    return kendall_tau(x, y);
}

LayerCorrelation correlation_matrix(const PseudoObservations& pseudo, std::size_t source_layer,
                                    std::size_t target_layer, CorrelationKind kind) {
    if (target_layer != source_layer + 1)
        throw DataError("correlation_matrix: layers " + std::to_string(source_layer) + " and " +
                        std::to_string(target_layer) + " are not adjacent");
    if (target_layer >= pseudo.layer_widths.size())
        throw DataError("correlation_matrix: layer index out of range");

    std::size_t src_off = 0;
    for (std::size_t l = 0; l < source_layer; ++l) src_off += pseudo.layer_widths[l];
    const std::size_t tgt_off = src_off + pseudo.layer_widths[source_layer];

    const std::size_t ns = pseudo.layer_widths[source_layer];
    const std::size_t nt = pseudo.layer_widths[target_layer];

    LayerCorrelation corr;
    corr.source_layer = source_layer;
    corr.target_layer = target_layer;
    corr.kind = kind;
    corr.values = Matrix(ns, nt);
    corr.defined.assign(ns * nt, 0);
    corr.reasons.assign(ns * nt, "");

    std::vector<std::vector<double>> src_cols(ns), tgt_cols(nt);
    for (std::size_t i = 0; i < ns; ++i) src_cols[i] = pseudo.u.column(src_off + i);
    for (std::size_t j = 0; j < nt; ++j) tgt_cols[j] = pseudo.u.column(tgt_off + j);

    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < nt; ++j) {
            const CorrValue v = correlate(src_cols[i], tgt_cols[j], kind);
            corr.values(i, j) = v.defined ? v.value : std::nan("");
            corr.defined[i * nt + j] = v.defined ? 1 : 0;
            corr.reasons[i * nt + j] = v.reason;
        }
    }
    return corr;
}

std::vector<LayerCorrelation> adjacent_correlations(const PseudoObservations& pseudo,
                                                    CorrelationKind kind) {
    std::vector<LayerCorrelation> out;
    for (std::size_t l = 0; l + 1 < pseudo.layer_widths.size(); ++l)
        out.push_back(correlation_matrix(pseudo, l, l + 1, kind));
    return out;
}

} // namespace cvt
