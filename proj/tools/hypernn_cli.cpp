// hypernn command-line tool: train, predict, grid-search, sweep-m,
// benchmark, export-rules, print-config.
//
// Exit codes: 0 success, 1 input/config error, 2 numeric failure
// (training divergence).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypernn/data.hpp"
#include "hypernn/evaluation.hpp"
#include "hypernn/io.hpp"
#include "hypernn/model.hpp"
#include "hypernn/rules.hpp"
#include "hypernn/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hypernn;

namespace {

struct CommonOpts {
    std::string data_path;
    std::string config_path;
    std::string out_dir;
    std::string label_column = "class";
    std::string delimiter = ",";
    bool no_header = false;
    int target_class = 0;
    int threads = 1;
    std::optional<unsigned long long> seed;
    std::optional<int> m;
    std::optional<double> tau;
    std::optional<double> phi;
    std::optional<double> lr;
    std::optional<std::string> batch_size;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o, bool needs_data = true) {
    if (needs_data) {
        cmd->add_option("--data", o.data_path, "input CSV path")->required();
    }
    cmd->add_option("--config", o.config_path, "flat key=value config file");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--label-column", o.label_column, "label column name");
    cmd->add_option("--delimiter", o.delimiter, "CSV delimiter");
    cmd->add_flag("--no-header", o.no_header, "CSV has no header row");
    cmd->add_option("--target-class", o.target_class,
                    "one-vs-all positive class index");
    cmd->add_option("--threads", o.threads, "worker threads for independent cells");
    cmd->add_option("--seed", o.seed, "random seed (overrides config)");
    cmd->add_option("--m", o.m, "number of hyperboxes (overrides config)");
    cmd->add_option("--tau", o.tau, "sigmoid temperature (overrides config)");
    cmd->add_option("--phi", o.phi, "smooth-max temperature (overrides config)");
    cmd->add_option("--lr", o.lr, "learning rate (overrides config)");
    cmd->add_option("--batch-size", o.batch_size,
                    "batch size or 'full' (overrides config)");
}

// Config file first, then CLI flags on top.
TrainConfig resolve_config(const CommonOpts& o) {
    TrainConfig c;
    if (!o.config_path.empty()) c = load_config_file(o.config_path);
    if (o.seed) c.seed = *o.seed;
    if (o.m) c.num_boxes = *o.m;
    if (o.tau) c.tau = *o.tau;
    if (o.phi) c.phi = *o.phi;
    if (o.lr) c.learning_rate = *o.lr;
    if (o.batch_size) {
        c.batch_size = *o.batch_size == "full" ? 0 : std::stoi(*o.batch_size);
    }
    c.validate();
    return c;
}

CsvSchema schema_of(const CommonOpts& o) {
    CsvSchema s;
    s.delimiter = o.delimiter.empty() ? ',' : o.delimiter[0];
    s.has_header = !o.no_header;
    if (s.has_header) {
        s.label_name = o.label_column;
    }
    return s;
}

fs::path ensure_out_dir(const CommonOpts& o, const std::string& fallback) {
    fs::path dir;
    if (!o.out_dir.empty()) {
        dir = o.out_dir;
    } else {
        const char* root = std::getenv("HYPERNN_OUT_ROOT");
        dir = fs::path(root ? root : ".") / fallback;
    }
    fs::create_directories(dir);
    return dir;
}

RunManifest make_manifest(const std::string& command, const CommonOpts& o,
                          const TrainConfig& config, const Dataset& ds) {
    RunManifest m;
    m.command = command;
    m.config = config;
    m.dataset_path = o.data_path;
    m.dataset_rows = ds.rows();
    m.dataset_cols = ds.cols();
    m.dataset_hash = file_content_hash(o.data_path);
    m.seed = config.seed;
    return m;
}

void write_manifest(RunManifest m, const fs::path& dir,
                    const std::vector<std::string>& artifacts) {
    m.artifacts = artifacts;
    write_text_file((dir / "manifest.json").string(), m.to_json().dump(2) + "\n");
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::vector<unsigned long long> parse_seed_list(const std::string& s) {
    std::vector<unsigned long long> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoull(tok));
    return out;
}

// Prepared task: standardized features plus the outer split.
struct Prepared {
    BinaryTask task;
    SplitSpec split;
};

Prepared prepare(const Dataset& ds, int target_class, unsigned long long seed) {
    Prepared p;
    p.task = binarize(ds, target_class);
    p.split = stratified_split(p.task.y, 0.7, seed);
    p.task.standardizer = standardize_fit(p.task.X, p.split.train);
    p.task.standardizer.apply_in_place(p.task.X);
    return p;
}

int cmd_train(const CommonOpts& o) {
    const TrainConfig config = resolve_config(o);
    const Dataset ds = load_csv(o.data_path, schema_of(o));
    const Prepared p = prepare(ds, o.target_class, config.seed);
    const fs::path dir = ensure_out_dir(o, "train-out");

    auto [model, report] = train(p.task, p.split.fit, p.split.inner_val, config);

    write_text_file((dir / "model.json").string(),
                    model_to_json(model).dump(2) + "\n");
    write_text_file((dir / "standardizer.json").string(),
                    standardizer_to_json(p.task.standardizer, p.task.feature_names)
                            .dump(2) +
                        "\n");
    write_text_file((dir / "report.json").string(),
                    report_to_json(report).dump(2) + "\n");
    write_text_file((dir / "report.csv").string(), report_to_csv(report));
    write_text_file((dir / "split.json").string(),
                    split_to_json(p.split).dump(2) + "\n");
    write_manifest(make_manifest("train", o, config, ds), dir,
                   {"model.json", "standardizer.json", "report.json", "report.csv",
                    "split.json"});

    std::vector<int> preds, truth;
    for (std::size_t i : p.split.test) {
        preds.push_back(soft_predict(model, p.task.X[i]));
        truth.push_back(p.task.y[i]);
    }
    std::cout << "trained M=" << model.num_boxes() << " boxes in "
              << report.t_train_seconds << "s (" << report.stop_reason
              << " at epoch " << report.train_loss.size() - 1
              << "), test F1 = " << f1_score(preds, truth).f1 << "\n";
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& std_path,
                const CommonOpts& o, const std::string& out_path) {
    const HyperNNModel model =
        model_from_json(json::parse(read_text_file(model_path)));
    std::string spath = std_path;
    if (spath.empty()) {
        spath = (fs::path(model_path).parent_path() / "standardizer.json").string();
    }
    const auto [standardizer, names] =
        standardizer_from_json(json::parse(read_text_file(spath)));

    const Dataset ds = load_csv(o.data_path, schema_of(o));
    if (ds.cols() != model.d) {
        throw std::invalid_argument("predict: data has " + std::to_string(ds.cols()) +
                                    " features, model expects " +
                                    std::to_string(model.d));
    }
    std::ostringstream out;
    out.precision(17);
    out << "row,y_hat,soft_label,crisp_label\n";
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        const std::vector<double> x = standardizer.apply(ds.X[i]);
        const double y_hat = forward(model, x).y_hat;
        out << i << ',' << y_hat << ',' << (y_hat >= 0.5 ? 1 : 0) << ','
            << crisp_predict(model, x) << '\n';
    }
    write_text_file(out_path, out.str());
    std::cout << "wrote " << ds.rows() << " predictions to " << out_path << "\n";
    return 0;
}

struct GridFlags {
    std::string m_list, tau_list, phi_list, lr_list, batch_list;
};

GridSpec resolve_grid(const GridFlags& g) {
    GridSpec grid = GridSpec::defaults();
    if (!g.m_list.empty()) grid.num_boxes = parse_int_list(g.m_list);
    if (!g.tau_list.empty()) grid.tau = parse_double_list(g.tau_list);
    if (!g.phi_list.empty()) grid.phi = parse_double_list(g.phi_list);
    if (!g.lr_list.empty()) grid.learning_rate = parse_double_list(g.lr_list);
    if (!g.batch_list.empty()) grid.batch_size = parse_int_list(g.batch_list);
    return grid;
}

int cmd_grid_search(const CommonOpts& o, const GridFlags& gf) {
    const TrainConfig base = resolve_config(o);
    const GridSpec grid = resolve_grid(gf);
    const Dataset ds = load_csv(o.data_path, schema_of(o));
    const Prepared p = prepare(ds, o.target_class, base.seed);
    const fs::path dir = ensure_out_dir(o, "grid-out");

    const GridResult result =
        grid_search(p.task, p.split.folds, grid, base, o.threads);

    write_text_file((dir / "cv_table.csv").string(), cv_table_to_csv(result));
    write_text_file((dir / "cv_table.json").string(),
                    cv_table_to_json(result).dump(2) + "\n");
    write_text_file((dir / "best_config.txt").string(),
                    config_to_text(result.best));
    write_manifest(make_manifest("grid-search", o, base, ds), dir,
                   {"cv_table.csv", "cv_table.json", "best_config.txt"});
    std::cout << "best config: M=" << result.best.num_boxes
              << " tau=" << result.best.tau << " phi=" << result.best.phi
              << " lr=" << result.best.learning_rate
              << " (mean CV F1 = " << result.mean_f1[result.best_index] << ")\n";
    return 0;
}

int cmd_sweep_m(const CommonOpts& o, const std::string& m_list,
                const std::string& seed_list) {
    const TrainConfig base = resolve_config(o);
    const Dataset ds = load_csv(o.data_path, schema_of(o));
    const Prepared p = prepare(ds, o.target_class, base.seed);
    const fs::path dir = ensure_out_dir(o, "sweep-out");

    const std::vector<int> ms =
        m_list.empty() ? std::vector<int>{2, 5, 10, 20, 30} : parse_int_list(m_list);
    const std::vector<unsigned long long> seeds =
        seed_list.empty() ? std::vector<unsigned long long>{1, 2, 3}
                          : parse_seed_list(seed_list);

    const SweepResult result = sweep_m(p.task, p.split, ms, base, seeds, o.threads);
    write_text_file((dir / "sweep.csv").string(), sweep_to_csv(result));
    write_manifest(make_manifest("sweep-m", o, base, ds), dir, {"sweep.csv"});
    std::cout << "sweep over M = {";
    for (std::size_t i = 0; i < ms.size(); ++i) {
        std::cout << (i ? "," : "") << ms[i];
    }
    std::cout << "} written to " << (dir / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_benchmark(const std::vector<std::string>& dataset_specs,
                  const CommonOpts& o, const GridFlags& gf,
                  const std::string& seed_list, bool with_sweep) {
    const TrainConfig base = resolve_config(o);
    const GridSpec grid = resolve_grid(gf);
    const std::vector<unsigned long long> seeds =
        seed_list.empty() ? std::vector<unsigned long long>{1, 2, 3}
                          : parse_seed_list(seed_list);
    const fs::path dir = ensure_out_dir(o, "benchmark-out");

    std::vector<BenchmarkRecord> records;
    std::vector<std::string> artifacts;
    json failures = json::array();
    for (const std::string& spec : dataset_specs) {
        const auto eq = spec.find('=');
        const std::string name = eq == std::string::npos
                                     ? fs::path(spec).stem().string()
                                     : spec.substr(0, eq);
        const std::string path =
            eq == std::string::npos ? spec : spec.substr(eq + 1);
        try {
            CommonOpts local = o;
            local.data_path = path;
            const Dataset ds = load_csv(path, schema_of(local));
            records.push_back(benchmark_dataset(ds, name, o.target_class, grid,
                                                base, seeds, base.seed, o.threads));
            std::cout << name << ": mean F1 = " << records.back().mean_f1
                      << " (M=" << records.back().config.num_boxes
                      << ", t_train=" << records.back().t_train << "s)\n";
            if (with_sweep) {
                Prepared p = prepare(ds, o.target_class, base.seed);
                TrainConfig cfg = records.back().config;
                const SweepResult sweep = sweep_m(p.task, p.split,
                                                  {2, 5, 10, 20, 30}, cfg, seeds,
                                                  o.threads);
                const std::string fname = "sweep_" + name + ".csv";
                write_text_file((dir / fname).string(), sweep_to_csv(sweep));
                artifacts.push_back(fname);
            }
        } catch (const std::exception& e) {
            std::cerr << "dataset '" << name << "' failed: " << e.what() << "\n";
            failures.push_back({{"dataset", name}, {"error", e.what()}});
        }
    }
    write_text_file((dir / "benchmark.csv").string(), benchmark_to_csv(records));
    json out = {{"records", benchmark_to_json(records)}, {"failures", failures}};
    write_text_file((dir / "benchmark.json").string(), out.dump(2) + "\n");
    artifacts.push_back("benchmark.csv");
    artifacts.push_back("benchmark.json");

    RunManifest m;
    m.command = "benchmark";
    m.config = base;
    m.dataset_path = "(multiple)";
    m.seed = base.seed;
    write_manifest(m, dir, artifacts);
    return failures.empty() ? 0 : 1;
}

int cmd_export_rules(const std::string& model_path, const std::string& std_path,
                     const CommonOpts& o, bool prune) {
    const HyperNNModel model =
        model_from_json(json::parse(read_text_file(model_path)));
    std::string spath = std_path;
    if (spath.empty()) {
        spath = (fs::path(model_path).parent_path() / "standardizer.json").string();
    }
    const auto [standardizer, names] =
        standardizer_from_json(json::parse(read_text_file(spath)));
    if (names.size() != model.d) {
        throw std::invalid_argument(
            "export-rules: standardizer dimensionality does not match model");
    }
    const fs::path dir = ensure_out_dir(o, "rules-out");

    HyperNNModel exported = model;
    RuleSet rules;
    if (!o.data_path.empty()) {
        const Dataset ds = load_csv(o.data_path, schema_of(o));
        BinaryTask task = binarize(ds, o.target_class);
        task.standardizer = standardizer;
        task.standardizer.apply_in_place(task.X);
        std::vector<std::size_t> all(task.rows());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        if (prune) {
            const PruneResult pruned = prune_boxes(model, task.X, task.y, all);
            for (std::size_t k : pruned.removed) {
                std::cout << "pruned box " << k << " (no crisp positives)\n";
            }
            exported = pruned.model;
        }
        rules = export_rules(exported, standardizer, names, task.X, task.y, all);
    } else {
        if (prune) {
            throw std::invalid_argument("export-rules: --prune requires --data");
        }
        rules = export_rules(exported, standardizer, names);
    }

    write_text_file((dir / "rules.txt").string(), render_text(rules) + "\n");
    write_text_file((dir / "rules.sql").string(), render_sql(rules) + "\n");
    write_text_file((dir / "rules.json").string(),
                    ruleset_to_json(rules).dump(2) + "\n");
    RunManifest m;
    m.command = "export-rules";
    m.dataset_path = o.data_path;
    write_manifest(m, dir, {"rules.txt", "rules.sql", "rules.json"});
    std::cout << render_text(rules) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HyperNN: differentiable hyperbox classification"};
    app.require_subcommand(1);

    CommonOpts train_o, predict_o, grid_o, sweep_o, bench_o, rules_o, print_o;
    GridFlags grid_gf, bench_gf;
    std::string predict_model, predict_std, predict_out = "predictions.csv";
    std::string rules_model, rules_std;
    std::string sweep_ms, sweep_seeds, bench_seeds;
    std::vector<std::string> bench_datasets;
    bool rules_prune = false;
    bool bench_no_sweep = false;

    auto* train_cmd = app.add_subcommand("train", "train a model");
    add_common_flags(train_cmd, train_o);

    auto* predict_cmd = app.add_subcommand("predict", "score a CSV with a model");
    predict_cmd->add_option("--model", predict_model, "model JSON path")->required();
    predict_cmd->add_option("--standardizer", predict_std,
                            "standardizer JSON (default: next to model)");
    predict_cmd->add_option("--out-file", predict_out, "predictions CSV path");
    add_common_flags(predict_cmd, predict_o);

    auto* grid_cmd = app.add_subcommand("grid-search", "cross-validated grid search");
    add_common_flags(grid_cmd, grid_o);
    grid_cmd->add_option("--grid-m", grid_gf.m_list, "comma list of M candidates");
    grid_cmd->add_option("--grid-tau", grid_gf.tau_list, "comma list of tau");
    grid_cmd->add_option("--grid-phi", grid_gf.phi_list, "comma list of phi");
    grid_cmd->add_option("--grid-lr", grid_gf.lr_list, "comma list of learning rates");
    grid_cmd->add_option("--grid-batch", grid_gf.batch_list, "comma list of batch sizes");

    auto* sweep_cmd = app.add_subcommand("sweep-m", "F1/time sweep over M");
    add_common_flags(sweep_cmd, sweep_o);
    sweep_cmd->add_option("--m-list", sweep_ms, "comma list of M values");
    sweep_cmd->add_option("--seeds", sweep_seeds, "comma list of seeds");

    auto* bench_cmd = app.add_subcommand("benchmark", "full pipeline per dataset");
    bench_cmd->add_option("--dataset", bench_datasets, "name=path (repeatable)")
        ->required();
    add_common_flags(bench_cmd, bench_o, /*needs_data=*/false);
    bench_cmd->add_option("--grid-m", bench_gf.m_list, "comma list of M candidates");
    bench_cmd->add_option("--grid-tau", bench_gf.tau_list, "comma list of tau");
    bench_cmd->add_option("--grid-phi", bench_gf.phi_list, "comma list of phi");
    bench_cmd->add_option("--grid-lr", bench_gf.lr_list, "comma list of learning rates");
    bench_cmd->add_option("--grid-batch", bench_gf.batch_list,
                          "comma list of batch sizes");
    bench_cmd->add_option("--seeds", bench_seeds, "comma list of seeds");
    bench_cmd->add_flag("--no-sweep", bench_no_sweep, "skip the per-dataset M sweep");

    auto* rules_cmd = app.add_subcommand("export-rules", "render model as predicates");
    rules_cmd->add_option("--model", rules_model, "model JSON path")->required();
    rules_cmd->add_option("--standardizer", rules_std,
                          "standardizer JSON (default: next to model)");
    rules_cmd->add_flag("--prune", rules_prune,
                        "drop boxes with zero crisp positive coverage");
    add_common_flags(rules_cmd, rules_o, /*needs_data=*/false);
    rules_cmd->add_option("--data", rules_o.data_path,
                          "training CSV for coverage counts / pruning");

    auto* print_cmd = app.add_subcommand("print-config", "print the resolved config");
    add_common_flags(print_cmd, print_o, /*needs_data=*/false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) return cmd_train(train_o);
        if (predict_cmd->parsed())
            return cmd_predict(predict_model, predict_std, predict_o, predict_out);
        if (grid_cmd->parsed()) return cmd_grid_search(grid_o, grid_gf);
        if (sweep_cmd->parsed()) return cmd_sweep_m(sweep_o, sweep_ms, sweep_seeds);
        if (bench_cmd->parsed())
            return cmd_benchmark(bench_datasets, bench_o, bench_gf, bench_seeds,
                                 !bench_no_sweep);
        if (rules_cmd->parsed())
            return cmd_export_rules(rules_model, rules_std, rules_o, rules_prune);
        if (print_cmd->parsed()) {
            std::cout << config_to_text(resolve_config(print_o));
            return 0;
        }
    } catch (const DivergedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
