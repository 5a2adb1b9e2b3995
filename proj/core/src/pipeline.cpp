#include "cvt/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cvt/csv.hpp"
#include "cvt/dataset.hpp"
#include "cvt/dependence.hpp"
#include "cvt/errors.hpp"
#include "cvt/forest.hpp"
#include "cvt/mlp.hpp"
#include "cvt/path_ranking.hpp"
#include "cvt/render.hpp"
#include "cvt/version.hpp"

namespace fs = std::filesystem;

namespace cvt {

Subcommand subcommand_from_name(const std::string& name) {
    if (name == "train") return Subcommand::train;
    if (name == "analyze") return Subcommand::analyze;
    if (name == "rank") return Subcommand::rank;
    if (name == "compare-rf") return Subcommand::compare_rf;
    if (name == "render") return Subcommand::render;
    if (name == "all") return Subcommand::all;
    throw UsageError("unknown subcommand '" + name +
                     "' (expected train|analyze|rank|compare-rf|render|all)");
}

ArtifactPaths artifact_paths(const std::string& output_dir) {
    const auto join = [&](const char* name) { return (fs::path(output_dir) / name).string(); };
    ArtifactPaths p;
    p.config_echo = join("config_echo.cfg");
    p.model = join("model.json");
    p.train_summary = join("train_summary.json");
    p.traces = join("traces.csv");
    p.cdfs = join("cdfs.csv");
    p.correlations = join("correlations.csv");
    p.path_ranking = join("path_ranking.csv");
    p.edge_importance = join("edge_importance.csv");
    p.rank_summary = join("rank_summary.json");
    p.feature_importance = join("feature_importance.csv");
    p.forest_summary = join("forest_summary.json");
    p.dot = join("network.dot");
    p.svg = join("network.svg");
    return p;
}

namespace {

/// Collects writes so a failed invocation leaves no partial artifacts.
class ArtifactWriter {
public:
    void write(const std::string& path, const std::string& content) {
        const fs::path p(path);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write artifact: " + path);
        out << content;
        out.close();
        if (!out) throw DataError("short write on artifact: " + path);
        written_.push_back(path);
    }

    void rollback() {
        std::error_code ec;
        for (const auto& path : written_) fs::remove(path, ec);
        written_.clear();
    }

    const std::vector<std::string>& written() const { return written_; }

private:
    std::vector<std::string> written_;
};

void require_artifact(const std::string& path, const char* producer) {
    if (!fs::exists(path))
        throw DataError("missing artifact: " + path + " (run 'cvt " + producer + "' first)");
}

std::string meta_comment(const RunConfig& cfg) {
    std::ostringstream out;
    out << "# tool=" << kToolName << " " << kToolVersion << "\n";
    out << "# config_hash=" << config_hash(cfg) << "\n";
    out << "# split_seed=" << cfg.split_seed << " init_seed=" << cfg.init_seed
        << " train_seed=" << cfg.train_seed << " forest_seed=" << cfg.forest_seed << "\n";
    return out.str();
}

nlohmann::json meta_json(const RunConfig& cfg) {
    return {
        {"tool", std::string(kToolName) + " " + kToolVersion},
        {"config_hash", config_hash(cfg)},
        {"seeds",
         {{"split", cfg.split_seed},
          {"init", cfg.init_seed},
          {"train", cfg.train_seed},
          {"forest", cfg.forest_seed}}},
    };
}

struct SplitTables {
    LabeledTable train;
    LabeledTable test;
};

SplitTables load_and_split(const RunConfig& cfg) {
    LabeledTable table = load_csv(cfg.data, cfg.label_column);
    if (cfg.normalize) table = normalize_minmax(table);
    auto [train_table, test_table] = split(table, SplitSpec{cfg.train_fraction, cfg.split_seed});
    return {std::move(train_table), std::move(test_table)};
}

std::string sanitize_for_header(std::string name) {
    for (char& c : name)
        if (c == ',' || c == ' ' || c == '\t') c = '_';
    return name;
}

// ---- train ----------------------------------------------------------------

void stage_train(const RunConfig& cfg, const ArtifactPaths& paths, ArtifactWriter& writer,
                 RunOutcome& outcome) {
    const SplitTables tables = load_and_split(cfg);

    MlpSpec spec;
    spec.layer_widths.push_back(tables.train.n_features());
    for (std::size_t w : cfg.hidden_widths) spec.layer_widths.push_back(w);
    spec.layer_widths.push_back(tables.train.n_classes());
    spec.seed = cfg.init_seed;

    TrainConfig tc{cfg.learning_rate, cfg.momentum, cfg.epochs, cfg.batch_size, cfg.train_seed};
    const TrainResult result = train(init(spec), tables.train, tc);
    const double test_accuracy = accuracy(result.model, tables.test);

    writer.write(paths.model,
                 model_to_json(result.model, tables.train.feature_names, tables.train.class_names,
                               {{"tool", std::string(kToolName) + " " + kToolVersion},
                                {"config_hash", config_hash(cfg)}}));

    nlohmann::json summary = meta_json(cfg);
    summary["train_accuracy"] = result.train_accuracy;
    summary["test_accuracy"] = test_accuracy;
    summary["final_loss"] = result.final_loss;
    summary["n_train"] = tables.train.n_samples();
    summary["n_test"] = tables.test.n_samples();
    summary["layer_widths"] = result.model.spec.layer_widths;
    writer.write(paths.train_summary, summary.dump(2) + "\n");
    outcome.warnings.push_back("train accuracy " + format_double(result.train_accuracy) +
                               ", test accuracy " + format_double(test_accuracy));
}

// ---- analyze ---------------------------------------------------------------

std::string traces_csv(const ActivationTrace& trace, const RunConfig& cfg) {
    std::ostringstream out;
    out << meta_comment(cfg);
    out << "sample_id,layer,node,value\n";
    for (std::size_t s = 0; s < trace.values.rows(); ++s) {
        std::size_t col = 0;
        for (std::size_t l = 0; l < trace.layer_widths.size(); ++l)
            for (std::size_t i = 0; i < trace.layer_widths[l]; ++i, ++col)
                out << s << "," << l << "," << i << "," << format_double(trace.values(s, col))
                    << "\n";
    }
    return out.str();
}

std::string cdfs_csv(const std::vector<EmpiricalCdf>& cdfs,
                     const std::vector<std::size_t>& widths, const RunConfig& cfg) {
    std::ostringstream out;
    out << meta_comment(cfg);
    out << "layer,node,mode,n_bins,degenerate,index,upper_value,cum_prob\n";
    std::size_t col = 0;
    for (std::size_t l = 0; l < widths.size(); ++l) {
        for (std::size_t i = 0; i < widths[l]; ++i, ++col) {
            const EmpiricalCdf& cdf = cdfs[col];
            const bool hist = cdf.mode() == CdfMode::histogram;
            const auto& table = cdf.table();
            for (std::size_t k = 0; k < table.size(); ++k) {
                double upper, prob;
                if (hist) {
                    const double width = (cdf.max_value() - cdf.min_value()) /
                                         static_cast<double>(table.size());
                    upper = cdf.degenerate() ? cdf.max_value()
                                             : cdf.min_value() + width * static_cast<double>(k + 1);
                    prob = table[k];
                } else {
                    upper = table[k];
                    prob = static_cast<double>(k + 1) / static_cast<double>(table.size());
                }
                out << l << "," << i << "," << (hist ? "histogram" : "exact") << ","
                    << (hist ? table.size() : 0) << "," << (cdf.degenerate() ? 1 : 0) << "," << k
                    << "," << format_double(upper) << "," << format_double(prob) << "\n";
            }
        }
    }
    return out.str();
}

std::string correlations_csv(const std::vector<LayerCorrelation>& matrices, const RunConfig& cfg,
                             std::size_t undefined_entries) {
    std::ostringstream out;
    out << meta_comment(cfg);
    out << "# undefined_entries=" << undefined_entries << "\n";
    out << "source_layer,source_node,target_layer,target_node,kind,value,defined\n";
    for (const LayerCorrelation& m : matrices) {
        for (std::size_t i = 0; i < m.values.rows(); ++i) {
            for (std::size_t j = 0; j < m.values.cols(); ++j) {
                out << m.source_layer << "," << i << "," << m.target_layer << "," << j << ","
                    << correlation_kind_name(m.kind) << ","
                    << (m.entry_defined(i, j) ? format_double(m.values(i, j)) : "nan") << ","
                    << (m.entry_defined(i, j) ? 1 : 0) << "\n";
            }
        }
    }
    return out.str();
}

void stage_analyze(const RunConfig& cfg, const ArtifactPaths& paths, ArtifactWriter& writer,
                   RunOutcome& outcome) {
    require_artifact(paths.model, "train");
    const LoadedModel loaded = model_from_json(read_text_file(paths.model));
    const SplitTables tables = load_and_split(cfg);
    if (tables.train.n_features() != loaded.model.spec.layer_widths.front())
        throw DataError("analyze: model input width does not match data");

    const ActivationTrace trace = capture_traces(loaded.model, tables.train);
    const auto cdfs = fit_all_cdfs(trace, cfg.cdf_mode, cfg.bins);
    const PseudoObservations pseudo = pseudo_observations(trace, cdfs);
    const auto matrices = adjacent_correlations(pseudo, cfg.correlation);

    std::size_t undefined_entries = 0;
    for (const auto& m : matrices)
        for (std::uint8_t d : m.defined)
            if (!d) ++undefined_entries;
    if (undefined_entries > 0)
        outcome.warnings.push_back(std::to_string(undefined_entries) +
                                   " correlation entries undefined (constant margin)");

    writer.write(paths.traces, traces_csv(trace, cfg));
    writer.write(paths.cdfs, cdfs_csv(cdfs, trace.layer_widths, cfg));
    writer.write(paths.correlations, correlations_csv(matrices, cfg, undefined_entries));
}

// ---- rank ------------------------------------------------------------------

std::size_t parse_index(const std::string& cell, const std::string& path) {
    const auto v = parse_double(cell);
    if (!v || *v < 0.0 || *v != std::floor(*v))
        throw DataError(path + ": malformed index cell '" + cell + "'");
    return static_cast<std::size_t>(*v);
}

std::vector<LayerCorrelation> load_correlations(const std::string& path) {
    const CsvDocument doc = parse_csv(read_text_file(path), path);
    const std::vector<std::string> expected{"source_layer", "source_node", "target_layer",
                                            "target_node",  "kind",        "value",
                                            "defined"};
    if (doc.header != expected) throw DataError(path + ": unexpected header");

    // First pass: layer widths.
    std::size_t n_layers = 0;
    for (const auto& row : doc.rows) {
        if (row.size() != expected.size()) throw DataError(path + ": short row");
        if (parse_index(row[2], path) != parse_index(row[0], path) + 1)
            throw DataError(path + ": layers in a row are not adjacent");
        n_layers = std::max(n_layers, parse_index(row[2], path) + 1);
    }
    std::vector<std::size_t> widths(n_layers, 0);
    for (const auto& row : doc.rows) {
        const auto sl = parse_index(row[0], path);
        const auto sn = parse_index(row[1], path);
        const auto tl = parse_index(row[2], path);
        const auto tn = parse_index(row[3], path);
        widths[sl] = std::max(widths[sl], sn + 1);
        widths[tl] = std::max(widths[tl], tn + 1);
    }

    std::vector<LayerCorrelation> matrices;
    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
        LayerCorrelation m;
        m.source_layer = l;
        m.target_layer = l + 1;
        m.values = Matrix(widths[l], widths[l + 1], std::nan(""));
        m.defined.assign(widths[l] * widths[l + 1], 0);
        m.reasons.assign(widths[l] * widths[l + 1], "");
        matrices.push_back(std::move(m));
    }
    for (const auto& row : doc.rows) {
        const auto sl = parse_index(row[0], path);
        const auto sn = parse_index(row[1], path);
        const auto tn = parse_index(row[3], path);
        LayerCorrelation& m = matrices.at(sl);
        m.kind = correlation_kind_from_name(row[4]);
        const bool defined = row[6] == "1";
        m.defined[sn * m.values.cols() + tn] = defined ? 1 : 0;
        if (defined) {
            const auto v = parse_double(row[5]);
            if (!v) throw DataError(path + ": unparseable coefficient '" + row[5] + "'");
            m.values(sn, tn) = *v;
        }
    }
    return matrices;
}

std::string ranking_csv(const ImportanceReport& report, const std::vector<std::string>& class_names,
                        const RunConfig& cfg) {
    std::ostringstream out;
    out << meta_comment(cfg);
    out << "rank,path";
    for (const auto& name : class_names) out << ",ccc_" << sanitize_for_header(name);
    out << ",var_ccc,defined\n";
    std::size_t rank = 1;
    for (const PathRecord& rec : report.ranked) {
        out << rank++ << "," << path_name(rec.base_path, report.edges.layer_widths);
        for (double c : rec.ccc_per_output) out << "," << (rec.defined ? format_double(c) : "nan");
        out << "," << (rec.defined ? format_double(rec.var_ccc) : "nan") << ","
            << (rec.defined ? 1 : 0) << "\n";
    }
    return out.str();
}

std::string edges_csv(const EdgeImportance& imp, const RunConfig& cfg) {
    std::ostringstream out;
    out << meta_comment(cfg);
    out << "source_layer,source_node,target_layer,target_node,importance\n";
    for (std::size_t l = 0; l + 1 < imp.layer_widths.size(); ++l)
        for (std::size_t i = 0; i < imp.layer_widths[l]; ++i)
            for (std::size_t j = 0; j < imp.layer_widths[l + 1]; ++j)
                out << l << "," << i << "," << l + 1 << "," << j << ","
                    << format_double(imp.per_layer[l](i, j)) << "\n";
    return out.str();
}

void stage_rank(const RunConfig& cfg, const ArtifactPaths& paths, ArtifactWriter& writer,
                RunOutcome& outcome) {
    require_artifact(paths.correlations, "analyze");
    require_artifact(paths.model, "train");
    const auto matrices = load_correlations(paths.correlations);
    const LoadedModel loaded = model_from_json(read_text_file(paths.model));

    ReportMetadata meta;
    meta.init_seed = cfg.init_seed;
    meta.train_seed = cfg.train_seed;
    meta.split_seed = cfg.split_seed;
    meta.bins = cfg.bins;
    meta.cdf_mode = cfg.cdf_mode;
    meta.kind = cfg.correlation;
    const ImportanceReport report =
        build_importance_report(loaded.model.spec.layer_widths, matrices, meta);

    std::size_t undefined_paths = 0;
    for (const auto& rec : report.ranked)
        if (!rec.defined) ++undefined_paths;
    std::vector<std::string> stage_warnings;
    if (undefined_paths > 0)
        stage_warnings.push_back(std::to_string(undefined_paths) +
                                 " paths excluded (undefined edge coefficients)");
    outcome.warnings.insert(outcome.warnings.end(), stage_warnings.begin(), stage_warnings.end());

    writer.write(paths.path_ranking, ranking_csv(report, loaded.class_names, cfg));
    writer.write(paths.edge_importance, edges_csv(report.edges, cfg));

    nlohmann::json summary = meta_json(cfg);
    summary["bins"] = cfg.bins;
    summary["cdf_mode"] = cfg.cdf_mode == CdfMode::histogram ? "histogram" : "exact";
    summary["correlation"] = correlation_kind_name(cfg.correlation);
    summary["n_paths"] = report.ranked.size();
    summary["undefined_paths"] = undefined_paths;
    summary["feature_names"] = loaded.feature_names;
    summary["cvt_feature_importance"] = report.features.importance;
    summary["warnings"] = stage_warnings;
    writer.write(paths.rank_summary, summary.dump(2) + "\n");
}

// ---- compare-rf ------------------------------------------------------------

void stage_compare_rf(const RunConfig& cfg, const ArtifactPaths& paths, ArtifactWriter& writer,
                      RunOutcome& outcome) {
    require_artifact(paths.rank_summary, "rank");
    nlohmann::json rank_summary;
    try {
        rank_summary = nlohmann::json::parse(read_text_file(paths.rank_summary));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(paths.rank_summary + ": parse failure: " + e.what());
    }
    const auto feature_names = rank_summary.at("feature_names").get<std::vector<std::string>>();
    const auto cvt_importance =
        rank_summary.at("cvt_feature_importance").get<std::vector<double>>();

    const SplitTables tables = load_and_split(cfg);
    ForestConfig fc{cfg.n_trees, cfg.max_features, cfg.bootstrap, cfg.forest_seed,
                    cfg.min_samples_split};
    const Forest forest = fit_forest(tables.train, fc);
    const double train_acc = accuracy(forest, tables.train);
    const double test_acc = accuracy(forest, tables.test);
    const ForestImportance rf = feature_importances(forest);
    if (!rf.defined)
        throw NumericError("compare-rf: forest produced no splits, importance undefined");

    const BarTable bars = importance_bars(feature_names, cvt_importance, rf.importance);
    writer.write(paths.feature_importance, meta_comment(cfg) + bars_to_csv(bars));

    nlohmann::json summary = meta_json(cfg);
    summary["n_trees"] = cfg.n_trees;
    summary["max_features"] = cfg.max_features == MaxFeatures::all ? "all" : "sqrt";
    summary["bootstrap"] = cfg.bootstrap;
    summary["min_samples_split"] = cfg.min_samples_split;
    summary["train_accuracy"] = train_acc;
    summary["test_accuracy"] = test_acc;
    summary["rf_feature_importance"] = rf.importance;
    writer.write(paths.forest_summary, summary.dump(2) + "\n");
    outcome.warnings.push_back("forest test accuracy " + format_double(test_acc));
}

// ---- render ----------------------------------------------------------------

EdgeImportance load_edge_importance(const std::string& path) {
    const CsvDocument doc = parse_csv(read_text_file(path), path);
    const std::vector<std::string> expected{"source_layer", "source_node", "target_layer",
                                            "target_node", "importance"};
    if (doc.header != expected) throw DataError(path + ": unexpected header");

    std::size_t n_layers = 0;
    for (const auto& row : doc.rows) {
        if (row.size() != expected.size()) throw DataError(path + ": short row");
        if (parse_index(row[2], path) != parse_index(row[0], path) + 1)
            throw DataError(path + ": layers in a row are not adjacent");
        n_layers = std::max(n_layers, parse_index(row[2], path) + 1);
    }
    std::vector<std::size_t> widths(n_layers, 0);
    for (const auto& row : doc.rows) {
        const auto sl = parse_index(row[0], path);
        const auto sn = parse_index(row[1], path);
        const auto tl = parse_index(row[2], path);
        const auto tn = parse_index(row[3], path);
        widths[sl] = std::max(widths[sl], sn + 1);
        widths[tl] = std::max(widths[tl], tn + 1);
    }

    EdgeImportance imp;
    imp.layer_widths = widths;
    for (std::size_t l = 0; l + 1 < n_layers; ++l)
        imp.per_layer.emplace_back(widths[l], widths[l + 1]);
    for (const auto& row : doc.rows) {
        const auto sl = parse_index(row[0], path);
        const auto sn = parse_index(row[1], path);
        const auto tn = parse_index(row[3], path);
        const auto v = parse_double(row[4]);
        if (!v) throw DataError(path + ": unparseable importance '" + row[4] + "'");
        imp.per_layer.at(sl)(sn, tn) = *v;
    }
    return imp;
}

void stage_render(const RunConfig& cfg, const ArtifactPaths& paths, ArtifactWriter& writer,
                  RunOutcome&) {
    require_artifact(paths.edge_importance, "rank");
    const EdgeImportance imp = load_edge_importance(paths.edge_importance);

    RenderSpec spec;
    spec.transparency_quantile = cfg.render_threshold;

    std::string dot_meta;
    {
        std::ostringstream m;
        m << "// tool=" << kToolName << " " << kToolVersion << "\n";
        m << "// config_hash=" << config_hash(cfg) << "\n";
        m << "// split_seed=" << cfg.split_seed << " init_seed=" << cfg.init_seed
          << " train_seed=" << cfg.train_seed << "\n";
        dot_meta = m.str();
    }
    writer.write(paths.dot, dot_meta + to_dot(imp, spec));

    const std::string svg_meta = "<!-- tool=" + std::string(kToolName) + " " + kToolVersion +
                                 " config_hash=" + config_hash(cfg) + " split_seed=" +
                                 std::to_string(cfg.split_seed) + " init_seed=" +
                                 std::to_string(cfg.init_seed) + " train_seed=" +
                                 std::to_string(cfg.train_seed) + " -->\n";
    writer.write(paths.svg, svg_meta + to_svg(imp, spec));
}

} // namespace

RunOutcome run(Subcommand sub, const RunConfig& cfg) {
    ArtifactWriter writer;
    RunOutcome outcome;
    const ArtifactPaths paths = artifact_paths(cfg.output_dir);
    try {
        writer.write(paths.config_echo, "# " + std::string(kToolName) + " " + kToolVersion +
                                            " normalized configuration\n# config_hash=" +
                                            config_hash(cfg) + "\n" + normalized_config(cfg));
        switch (sub) {
            case Subcommand::train: stage_train(cfg, paths, writer, outcome); break;
            case Subcommand::analyze: stage_analyze(cfg, paths, writer, outcome); break;
            case Subcommand::rank: stage_rank(cfg, paths, writer, outcome); break;
            case Subcommand::compare_rf: stage_compare_rf(cfg, paths, writer, outcome); break;
            case Subcommand::render: stage_render(cfg, paths, writer, outcome); break;
            case Subcommand::all:
                stage_train(cfg, paths, writer, outcome);
                stage_analyze(cfg, paths, writer, outcome);
                stage_rank(cfg, paths, writer, outcome);
                stage_compare_rf(cfg, paths, writer, outcome);
                stage_render(cfg, paths, writer, outcome);
                break;
        }
    } catch (...) {
        writer.rollback();
        throw;
    }
    outcome.artifacts_written = writer.written();
    return outcome;
}

} // namespace cvt
