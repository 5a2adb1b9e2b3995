#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cvt/config.hpp"
#include "cvt/errors.hpp"
#include "cvt/pipeline.hpp"
#include "cvt/version.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string data;
    std::string label_column;
    std::string output_dir;
    std::vector<std::string> overrides; // key=value pairs
};

cvt::RunConfig build_config(const CliOptions& opts) {
    cvt::RunConfig cfg;
    if (!opts.config_path.empty()) cfg = cvt::validate_config(opts.config_path);
    for (const std::string& kv : opts.overrides) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw cvt::UsageError("--set expects key=value, got '" + kv + "'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        cvt::apply_config_key(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    if (!opts.data.empty()) cvt::apply_config_key(cfg, "data", opts.data);
    if (!opts.label_column.empty()) cvt::apply_config_key(cfg, "label_column", opts.label_column);
    // output dir priority: --out flag > CVT_OUTPUT_DIR > config key > default
    if (const char* env = std::getenv("CVT_OUTPUT_DIR"); env && *env)
        cvt::apply_config_key(cfg, "output_dir", env);
    if (!opts.output_dir.empty()) cvt::apply_config_key(cfg, "output_dir", opts.output_dir);
    return cfg;
}

int run_subcommand(const std::string& name, const CliOptions& opts) {
    const cvt::Subcommand sub = cvt::subcommand_from_name(name);
    const cvt::RunConfig cfg = build_config(opts);
    const cvt::RunOutcome outcome = cvt::run(sub, cfg);
    for (const std::string& w : outcome.warnings)
        std::cerr << "cvt: note " << w << "\n";
    std::cout << "cvt: wrote " << outcome.artifacts_written.size() << " artifacts to "
              << cfg.output_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trains a small classifier, measures rank dependence between layer "
                 "activations, ranks input-to-output paths by the variance of the product of "
                 "edge correlations, and compares the derived feature importances against a "
                 "random-forest baseline."};
    app.set_version_flag("--version", std::string(cvt::kToolName) + " " + cvt::kToolVersion);
    app.require_subcommand(1);

    CliOptions opts;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", opts.config_path, "flat key=value config file");
        sub->add_option("--data", opts.data, "input CSV (overrides config)");
        sub->add_option("--label-column", opts.label_column, "label column name");
        sub->add_option("-o,--out", opts.output_dir, "output directory");
        sub->add_option("--set", opts.overrides, "override any config key, key=value")
            ->take_all();
    };

    add_common(app.add_subcommand("train", "fit the classifier, write model + summary"));
    add_common(app.add_subcommand("analyze", "capture traces, fit CDFs, correlation matrices"));
    add_common(app.add_subcommand("rank", "score and rank paths, aggregate importances"));
    add_common(app.add_subcommand("compare-rf", "random-forest baseline comparison"));
    add_common(app.add_subcommand("render", "emit DOT/SVG network visualization"));
    add_common(app.add_subcommand("all", "run the whole pipeline"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        std::cerr << "cvt: error kind=usage message=\"" << e.what() << "\"\n";
        return 1;
    }

    try {
        return run_subcommand(app.get_subcommands().front()->get_name(), opts);
    } catch (const cvt::UsageError& e) {
        std::cerr << "cvt: error kind=usage message=\"" << e.what() << "\"\n";
        return 1;
    } catch (const cvt::DataError& e) {
        std::cerr << "cvt: error kind=data message=\"" << e.what() << "\"\n";
        return 2;
    } catch (const cvt::NumericError& e) {
        std::cerr << "cvt: error kind=numeric message=\"" << e.what() << "\"\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "cvt: error kind=internal message=\"" << e.what() << "\"\n";
        return 3;
    }
}
