// conflictforge: quantify conflict in discussion corpora, predict news
// conflict scores and future inter-user conflict.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "conflictforge/config.hpp"
#include "conflictforge/pipeline.hpp"
#include "conflictforge/train.hpp"

namespace cf = conflictforge;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string seed;
    std::string tau;
    std::string out_dir;
    std::string data_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration file (INI)");
    cmd->add_option("--seed", args.seed, "override the run seed");
    cmd->add_option("--tau", args.tau, "override the conflict threshold");
    cmd->add_option("--out-dir", args.out_dir, "override the artifact directory");
    cmd->add_option("--data-dir", args.data_dir,
                    "data root for relative paths (default: $CONFLICTFORGE_DATA_DIR)");
}

cf::config::RunConfig build_config(const CommonArgs& args) {
    auto cfg = cf::config::load(args.config_path);
    if (!args.data_dir.empty()) cf::config::override_value(cfg, "data_dir", args.data_dir);
    if (!args.seed.empty()) cf::config::override_value(cfg, "seed", args.seed);
    if (!args.tau.empty()) cf::config::override_value(cfg, "conflict.tau", args.tau);
    if (!args.out_dir.empty()) cf::config::override_value(cfg, "out_dir", args.out_dir);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conflict quantification and prediction toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string train_task, predict_task, analyze_task, eval_task, eval_input, synthetic_mode;

    auto* ingest = app.add_subcommand("ingest", "load the corpus and derive reply pairs");
    add_common(ingest, args);
    auto* terms = app.add_subcommand("terms", "build the corpus-wide keyword set");
    add_common(terms, args);
    auto* sentiment = app.add_subcommand("sentiment", "compute target sentiment vectors");
    add_common(sentiment, args);
    auto* conflict = app.add_subcommand("conflict", "score conflict and build the graph");
    add_common(conflict, args);
    auto* features = app.add_subcommand("features", "extract article feature vectors");
    add_common(features, args);

    auto* train = app.add_subcommand("train", "fit a model and report metrics");
    add_common(train, args);
    train->add_option("task", train_task, "news-regress | pair-svm | pair-gcn")->required();
    train->add_option("--synthetic", synthetic_mode,
                      "benchmark generator instead of corpus data (linear | planted)");

    auto* predict = app.add_subcommand("predict", "apply a trained model");
    add_common(predict, args);
    predict->add_option("task", predict_task, "news-regress | pair-svm | pair-gcn")->required();

    auto* analyze = app.add_subcommand("analyze", "export conflict-dynamics tables");
    add_common(analyze, args);
    analyze->add_option("task", analyze_task, "sources | depth | clusters | states")->required();

    auto* evaluate = app.add_subcommand("eval", "compute metrics from prediction files");
    add_common(evaluate, args);
    evaluate->add_option("task", eval_task, "regress | classify | rank | kappa")->required();
    evaluate->add_option("--input", eval_input, "input file for the chosen metric")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = build_config(args);
        if (ingest->parsed()) return cf::pipeline::run_ingest(cfg);
        if (terms->parsed()) return cf::pipeline::run_terms(cfg);
        if (sentiment->parsed()) return cf::pipeline::run_sentiment(cfg);
        if (conflict->parsed()) return cf::pipeline::run_conflict(cfg);
        if (features->parsed()) return cf::pipeline::run_features(cfg);
        if (train->parsed()) return cf::pipeline::run_train(cfg, train_task, synthetic_mode);
        if (predict->parsed()) return cf::pipeline::run_predict(cfg, predict_task);
        if (analyze->parsed()) return cf::pipeline::run_analyze(cfg, analyze_task);
        if (evaluate->parsed()) return cf::pipeline::run_eval(cfg, eval_task, eval_input);
    } catch (const cf::UserError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
