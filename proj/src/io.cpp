#include "hypernn/io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hypernn {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string strategy_name(InitStrategy s) {
    return s == InitStrategy::DataCover ? "data-cover" : "random-jitter";
}

InitStrategy strategy_from_name(const std::string& name) {
    if (name == "data-cover") return InitStrategy::DataCover;
    if (name == "random-jitter") return InitStrategy::RandomJitter;
    throw std::invalid_argument("unknown init_strategy: " + name);
}

std::string metric_name(StopMetric m) {
    return m == StopMetric::ValLoss ? "val-loss" : "val-f1";
}

StopMetric metric_from_name(const std::string& name) {
    if (name == "val-loss") return StopMetric::ValLoss;
    if (name == "val-f1") return StopMetric::ValF1;
    throw std::invalid_argument("unknown stop_metric: " + name);
}

}  // namespace

json model_to_json(const HyperNNModel& model) {
    json boxes = json::array();
    for (const Hyperbox& box : model.boxes) {
        boxes.push_back({{"theta_m", box.theta_m}, {"theta_l", box.theta_l}});
    }
    return {{"version", kModelFormatVersion},
            {"d", model.d},
            {"M", model.num_boxes()},
            {"tau", model.tau},
            {"phi", model.phi},
            {"boxes", boxes}};
}

HyperNNModel model_from_json(const json& j) {
    if (j.at("version").get<int>() != kModelFormatVersion) {
        throw std::invalid_argument("unsupported model format version");
    }
    HyperNNModel model;
    model.d = j.at("d").get<std::size_t>();
    model.tau = j.at("tau").get<double>();
    model.phi = j.at("phi").get<double>();
    for (const json& b : j.at("boxes")) {
        Hyperbox box;
        box.theta_m = b.at("theta_m").get<std::vector<double>>();
        box.theta_l = b.at("theta_l").get<std::vector<double>>();
        if (box.theta_m.size() != model.d || box.theta_l.size() != model.d) {
            throw std::invalid_argument("model JSON: box dimension mismatch");
        }
        model.boxes.push_back(std::move(box));
    }
    if (model.boxes.size() != j.at("M").get<std::size_t>()) {
        throw std::invalid_argument("model JSON: M does not match box count");
    }
    return model;
}

json standardizer_to_json(const Standardizer& st,
                          const std::vector<std::string>& feature_names) {
    return {{"mean", st.mean}, {"stddev", st.stddev},
            {"feature_names", feature_names}};
}

std::pair<Standardizer, std::vector<std::string>> standardizer_from_json(
    const json& j) {
    Standardizer st;
    st.mean = j.at("mean").get<std::vector<double>>();
    st.stddev = j.at("stddev").get<std::vector<double>>();
    auto names = j.at("feature_names").get<std::vector<std::string>>();
    if (st.mean.size() != st.stddev.size() || names.size() != st.mean.size()) {
        throw std::invalid_argument("standardizer JSON: length mismatch");
    }
    return {st, names};
}

json split_to_json(const SplitSpec& split) {
    return {{"seed", split.seed},
            {"train", split.train},
            {"test", split.test},
            {"fit", split.fit},
            {"inner_val", split.inner_val},
            {"folds", split.folds}};
}

json report_to_json(const TrainReport& report) {
    return {{"train_loss", report.train_loss},
            {"val_loss", report.val_loss},
            {"val_f1", report.val_f1},
            {"best_epoch", report.best_epoch},
            {"t_train_seconds", report.t_train_seconds},
            {"stop_reason", report.stop_reason}};
}

std::string report_to_csv(const TrainReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "epoch,train_loss,val_loss,val_f1\n";
    for (std::size_t e = 0; e < report.train_loss.size(); ++e) {
        out << e << ',' << report.train_loss[e] << ',' << report.val_loss[e] << ','
            << report.val_f1[e] << '\n';
    }
    return out.str();
}

json ruleset_to_json(const RuleSet& rules) {
    json boxes = json::array();
    for (const BoxRule& rule : rules.boxes) {
        json intervals = json::array();
        for (const IntervalPredicate& p : rule.intervals) {
            intervals.push_back(
                {{"feature", p.feature}, {"lower", p.lower}, {"upper", p.upper}});
        }
        boxes.push_back({{"intervals", intervals},
                         {"positives_covered", rule.positives_covered},
                         {"negatives_covered", rule.negatives_covered}});
    }
    return {{"boxes", boxes}};
}

std::string cv_table_to_csv(const GridResult& result) {
    std::ostringstream out;
    out.precision(17);
    out << "config_index,fold,M,tau,phi,learning_rate,batch_size,f1,t_train,failed,"
           "error\n";
    for (const CvCell& row : result.table) {
        out << row.config_index << ',' << row.fold << ',' << row.config.num_boxes
            << ',' << row.config.tau << ',' << row.config.phi << ','
            << row.config.learning_rate << ',' << row.config.batch_size << ','
            << row.f1 << ',' << row.t_train << ',' << (row.failed ? 1 : 0) << ",\""
            << row.error << "\"\n";
    }
    return out.str();
}

json cv_table_to_json(const GridResult& result) {
    json table = json::array();
    for (const CvCell& row : result.table) {
        table.push_back({{"config_index", row.config_index},
                         {"fold", row.fold},
                         {"config", config_to_json(row.config)},
                         {"f1", row.f1},
                         {"t_train", row.t_train},
                         {"failed", row.failed},
                         {"error", row.error}});
    }
    return {{"best_index", result.best_index},
            {"best_config", config_to_json(result.best)},
            {"mean_f1", result.mean_f1},
            {"table", table}};
}

std::string sweep_to_csv(const SweepResult& result) {
    std::ostringstream out;
    out.precision(17);
    out << "M,seed,f1,t_train,t_pred,summary\n";
    for (const SweepRow& row : result.rows) {
        out << row.num_boxes << ',' << row.seed << ',' << row.f1 << ','
            << row.t_train << ',' << row.t_pred << ',' << (row.summary ? 1 : 0)
            << '\n';
    }
    return out.str();
}

std::string benchmark_to_csv(const std::vector<BenchmarkRecord>& records) {
    std::ostringstream out;
    out.precision(17);
    out << "dataset,M,tau,phi,learning_rate,batch_size,mean_f1,t_train,t_pred";
    std::size_t max_seeds = 0;
    for (const auto& r : records) max_seeds = std::max(max_seeds, r.per_seed_f1.size());
    for (std::size_t s = 0; s < max_seeds; ++s) out << ",f1_seed" << (s + 1);
    out << '\n';
    for (const BenchmarkRecord& r : records) {
        out << r.dataset << ',' << r.config.num_boxes << ',' << r.config.tau << ','
            << r.config.phi << ',' << r.config.learning_rate << ','
            << r.config.batch_size << ',' << r.mean_f1 << ',' << r.t_train << ','
            << r.t_pred;
        for (double f1 : r.per_seed_f1) out << ',' << f1;
        out << '\n';
    }
    return out.str();
}

json benchmark_to_json(const std::vector<BenchmarkRecord>& records) {
    json out = json::array();
    for (const BenchmarkRecord& r : records) {
        out.push_back({{"dataset", r.dataset},
                       {"config", config_to_json(r.config)},
                       {"per_seed_f1", r.per_seed_f1},
                       {"mean_f1", r.mean_f1},
                       {"t_train", r.t_train},
                       {"t_pred", r.t_pred}});
    }
    return out;
}

json config_to_json(const TrainConfig& c) {
    return {{"max_epochs", c.max_epochs},
            {"patience", c.patience},
            {"learning_rate", c.learning_rate},
            {"batch_size", c.batch_size},
            {"tau", c.tau},
            {"phi", c.phi},
            {"M", c.num_boxes},
            {"seed", c.seed},
            {"init_strategy", strategy_name(c.init_strategy)},
            {"eps_clamp", c.eps_clamp},
            {"stop_metric", metric_name(c.stop_metric)}};
}

TrainConfig parse_config_text(const std::string& text, TrainConfig base) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "max_epochs") base.max_epochs = std::stoi(value);
            else if (key == "patience") base.patience = std::stoi(value);
            else if (key == "learning_rate") base.learning_rate = std::stod(value);
            else if (key == "batch_size")
                base.batch_size = value == "full" ? 0 : std::stoi(value);
            else if (key == "tau") base.tau = std::stod(value);
            else if (key == "phi") base.phi = std::stod(value);
            else if (key == "M") base.num_boxes = std::stoi(value);
            else if (key == "seed") base.seed = std::stoull(value);
            else if (key == "init_strategy") base.init_strategy = strategy_from_name(value);
            else if (key == "eps_clamp") base.eps_clamp = std::stod(value);
            else if (key == "stop_metric") base.stop_metric = metric_from_name(value);
            else
                throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": bad value for " + key);
        }
    }
    return base;
}

TrainConfig load_config_file(const std::string& path, TrainConfig base) {
    return parse_config_text(read_text_file(path), base);
}

std::string config_to_text(const TrainConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "max_epochs = " << c.max_epochs << '\n'
        << "patience = " << c.patience << '\n'
        << "learning_rate = " << c.learning_rate << '\n'
        << "batch_size = " << (c.batch_size == 0 ? std::string("full")
                                                 : std::to_string(c.batch_size))
        << '\n'
        << "tau = " << c.tau << '\n'
        << "phi = " << c.phi << '\n'
        << "M = " << c.num_boxes << '\n'
        << "seed = " << c.seed << '\n'
        << "init_strategy = " << strategy_name(c.init_strategy) << '\n'
        << "eps_clamp = " << c.eps_clamp << '\n'
        << "stop_metric = " << metric_name(c.stop_metric) << '\n';
    return out.str();
}

std::string file_content_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for hashing: " + path);
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

json RunManifest::to_json() const {
    return {{"command", command},
            {"config", config_to_json(config)},
            {"dataset",
             {{"path", dataset_path},
              {"rows", dataset_rows},
              {"cols", dataset_cols},
              {"content_hash", dataset_hash}}},
            {"seed", seed},
            {"artifacts", artifacts},
            {"tool_version", tool_version}};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace hypernn
