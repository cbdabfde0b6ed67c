// End-to-end checks of the command-line tool. The binary path arrives via
// the HYPERNN_CLI environment variable set by CTest.

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hypernn/io.hpp"
#include "hypernn/model.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli() {
    const char* env = std::getenv("HYPERNN_CLI");
    REQUIRE_MESSAGE(env != nullptr, "HYPERNN_CLI not set");
    return env;
}

int run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

struct Workspace {
    fs::path dir;
    Workspace() {
        dir = fs::temp_directory_path() /
              ("hypernn_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~Workspace() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

// Two well-separated clusters of positives in [0,1]^2.
std::string write_two_box_csv(const Workspace& ws) {
    const std::vector<hypernn::Hyperbox> truth{{{0.1, 0.1}, {0.2, 0.2}},
                                               {{0.7, 0.7}, {0.2, 0.2}}};
    const hypernn::BinaryTask task =
        testutil::boxes_task(truth, 2, 300, 7, 0.0, 1.0, 0.02);
    const std::string path = ws.path("data.csv");
    std::ofstream out(path);
    out << "a,b,class\n";
    out.precision(17);
    for (std::size_t i = 0; i < task.rows(); ++i) {
        out << task.X[i][0] << ',' << task.X[i][1] << ','
            << (task.y[i] ? "pos" : "neg") << '\n';
    }
    return path;
}

std::string fast_flags() {
    return " --target-class 1 --m 2 --tau 0.05 --phi 0.1 --lr 0.02 "
           "--batch-size full --seed 1";
}

}  // namespace

TEST_CASE("train writes model, reports, and manifest") {
    Workspace ws;
    const std::string data = write_two_box_csv(ws);
    const std::string cfg = ws.path("config.txt");
    hypernn::write_text_file(cfg, "max_epochs = 150\npatience = 150\n");
    const std::string out = ws.path("run1");

    const int rc = run("train --data " + data + " --config " + cfg + " --out " +
                       out + fast_flags());
    REQUIRE(rc == 0);
    for (const char* f : {"model.json", "standardizer.json", "report.json",
                          "report.csv", "split.json", "manifest.json"}) {
        CHECK_MESSAGE(fs::exists(fs::path(out) / f), f);
    }

    const json manifest =
        json::parse(hypernn::read_text_file((fs::path(out) / "manifest.json").string()));
    CHECK(manifest.at("command") == "train");
    CHECK(manifest.at("dataset").at("rows") == 300);
    CHECK(manifest.at("dataset").at("content_hash") ==
          hypernn::file_content_hash(data));

    SUBCASE("rerun with the same seed is byte-identical") {
        const std::string out2 = ws.path("run2");
        REQUIRE(run("train --data " + data + " --config " + cfg + " --out " + out2 +
                    fast_flags()) == 0);
        CHECK(hypernn::read_text_file(out + "/model.json") ==
              hypernn::read_text_file(out2 + "/model.json"));
    }

    SUBCASE("predict emits one row per input with sane columns") {
        const std::string preds = ws.path("preds.csv");
        REQUIRE(run("predict --model " + out + "/model.json --data " + data +
                    " --out-file " + preds) == 0);
        std::ifstream in(preds);
        std::string line;
        std::getline(in, line);
        CHECK(line == "row,y_hat,soft_label,crisp_label");
        const hypernn::HyperNNModel model = hypernn::model_from_json(
            json::parse(hypernn::read_text_file(out + "/model.json")));
        const auto [st, names] = hypernn::standardizer_from_json(
            json::parse(hypernn::read_text_file(out + "/standardizer.json")));
        const hypernn::RuleSet rules = hypernn::export_rules(model, st, names);
        std::size_t rows = 0;
        while (std::getline(in, line)) {
            ++rows;
            std::istringstream ss(line);
            std::string tok;
            std::getline(ss, tok, ',');
            std::getline(ss, tok, ',');
            const double y_hat = std::stod(tok);
            CHECK(y_hat > 0.0);
            CHECK(y_hat < 1.0);
            std::getline(ss, tok, ',');
            std::getline(ss, tok, ',');
            const int crisp = std::stoi(tok);
            CHECK((crisp == 0 || crisp == 1));
        }
        CHECK(rows == 300);
    }

    SUBCASE("export-rules renders the trained box count") {
        const std::string rdir = ws.path("rules");
        REQUIRE(run("export-rules --model " + out + "/model.json --out " + rdir) ==
                0);
        const std::string text = hypernn::read_text_file(rdir + "/rules.txt");
        CHECK_FALSE(text.empty());
        CHECK(fs::exists(fs::path(rdir) / "rules.sql"));
        const json jr =
            json::parse(hypernn::read_text_file(rdir + "/rules.json"));
        CHECK(jr.at("boxes").size() == 2);
    }
}

TEST_CASE("predictions' crisp column matches the exported rule disjunction") {
    Workspace ws;
    const std::string data = write_two_box_csv(ws);
    const std::string out = ws.path("run");
    REQUIRE(run("train --data " + data + " --out " + out + fast_flags() +
                " --config /dev/null") == 0);

    const hypernn::HyperNNModel model = hypernn::model_from_json(
        json::parse(hypernn::read_text_file(out + "/model.json")));
    const auto [st, names] = hypernn::standardizer_from_json(
        json::parse(hypernn::read_text_file(out + "/standardizer.json")));
    const hypernn::RuleSet rules = hypernn::export_rules(model, st, names);

    const std::string preds = ws.path("preds.csv");
    REQUIRE(run("predict --model " + out + "/model.json --data " + data +
                " --out-file " + preds) == 0);

    hypernn::CsvSchema schema;
    schema.label_name = "class";
    const hypernn::Dataset ds = hypernn::load_csv(data, schema);

    std::ifstream in(preds);
    std::string line;
    std::getline(in, line);
    std::size_t i = 0;
    while (std::getline(in, line)) {
        const auto last_comma = line.rfind(',');
        const int crisp = std::stoi(line.substr(last_comma + 1));
        CHECK(crisp == (hypernn::rules_match(rules, ds.X[i], 1e-9) ? 1 : 0));
        ++i;
    }
}

TEST_CASE("grid-search and sweep-m emit their tables") {
    Workspace ws;
    const std::string data = write_two_box_csv(ws);
    const std::string gout = ws.path("grid");
    REQUIRE(run("grid-search --data " + data + " --out " + gout + fast_flags() +
                " --grid-m 1,2 --grid-tau 0.05 --grid-phi 0.1 --grid-lr 0.02 "
                "--grid-batch 0 --config /dev/null") == 0);
    CHECK(fs::exists(fs::path(gout) / "cv_table.csv"));
    const json cv =
        json::parse(hypernn::read_text_file(gout + "/cv_table.json"));
    CHECK(cv.at("table").size() == 2 * 5);
    const int best_m = cv.at("best_config").at("M").get<int>();
    CHECK((best_m == 1 || best_m == 2));

    const std::string sout = ws.path("sweep");
    REQUIRE(run("sweep-m --data " + data + " --out " + sout + fast_flags() +
                " --m-list 1,2 --seeds 1,2 --config /dev/null") == 0);
    const std::string sweep = hypernn::read_text_file(sout + "/sweep.csv");
    CHECK(sweep.find("M,seed,f1,t_train,t_pred") == 0);
    // 2 M values x 2 seeds + 2 summary rows + header
    CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 7);
}

TEST_CASE("benchmark produces a record per dataset") {
    Workspace ws;
    const std::string data = write_two_box_csv(ws);
    const std::string bout = ws.path("bench");
    REQUIRE(run("benchmark --dataset twobox=" + data + " --out " + bout +
                fast_flags() +
                " --grid-m 2 --grid-tau 0.05 --grid-phi 0.1 --grid-lr 0.02 "
                "--grid-batch 0 --seeds 1,2,3 --no-sweep --config /dev/null") == 0);
    const json bench =
        json::parse(hypernn::read_text_file(bout + "/benchmark.json"));
    REQUIRE(bench.at("records").size() == 1);
    const json& rec = bench.at("records")[0];
    CHECK(rec.at("dataset") == "twobox");
    CHECK(rec.at("per_seed_f1").size() == 3);
    double mean = 0.0;
    for (const auto& v : rec.at("per_seed_f1")) mean += v.get<double>();
    mean /= 3.0;
    CHECK(std::abs(rec.at("mean_f1").get<double>() - mean) < 1e-12);
}

TEST_CASE("error exit codes") {
    Workspace ws;
    SUBCASE("missing data file exits 1 and names the path") {
        const std::string cmd = cli() + " train --data /nonexistent/x.csv --out " +
                                ws.path("o") + " 2>" + ws.path("err.txt") +
                                " >/dev/null";
        const int rc = WEXITSTATUS(std::system(cmd.c_str()));
        CHECK(rc == 1);
        const std::string err = hypernn::read_text_file(ws.path("err.txt"));
        CHECK(err.find("/nonexistent/x.csv") != std::string::npos);
    }
    SUBCASE("divergence exits 2") {
        const std::string data = write_two_box_csv(ws);
        const int rc = run("train --data " + data + " --out " + ws.path("d") +
                           " --target-class 1 --m 2 --lr 1e308 --seed 1");
        CHECK(rc == 2);
    }
    SUBCASE("dimension mismatch in predict exits 1") {
        const std::string data = write_two_box_csv(ws);
        const std::string out = ws.path("run");
        REQUIRE(run("train --data " + data + " --out " + out + fast_flags()) == 0);
        const std::string bad = ws.path("bad.csv");
        hypernn::write_text_file(bad, "a,b,c,class\n1,2,3,pos\n");
        CHECK(run("predict --model " + out + "/model.json --data " + bad +
                  " --out-file " + ws.path("p.csv")) == 1);
    }
}

TEST_CASE("print-config shows resolved defaults with flag overrides") {
    Workspace ws;
    const std::string cmd = cli() + " print-config --m 9 --tau 0.25 > " +
                            ws.path("cfg.txt") + " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    const std::string text = hypernn::read_text_file(ws.path("cfg.txt"));
    CHECK(text.find("M = 9") != std::string::npos);
    CHECK(text.find("tau = 0.25") != std::string::npos);
    const hypernn::TrainConfig parsed = hypernn::parse_config_text(text);
    CHECK(parsed.num_boxes == 9);
}
