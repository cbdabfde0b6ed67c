#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hypernn/evaluation.hpp"
#include "test_util.hpp"

using namespace hypernn;

namespace {

BinaryTask two_box_task(std::size_t n = 400, unsigned long long seed = 21) {
    const std::vector<Hyperbox> truth{{{0.1, 0.1}, {0.2, 0.2}},
                                      {{0.7, 0.7}, {0.2, 0.2}}};
    return testutil::boxes_task(truth, 2, n, seed, 0.0, 1.0, 0.02);
}

TrainConfig quick_config() {
    TrainConfig c;
    c.max_epochs = 150;
    c.patience = 150;
    c.batch_size = 0;
    c.tau = 0.05;
    c.phi = 0.1;
    c.learning_rate = 0.02;
    c.seed = 1;
    return c;
}

}  // namespace

TEST_CASE("f1_score conventions") {
    CHECK(f1_score({1, 0, 1}, {1, 0, 1}).f1 == doctest::Approx(1.0));
    // tp=1, fp=1, fn=1 -> P = R = 0.5
    const Metrics m = f1_score({1, 1, 0}, {1, 0, 1});
    CHECK(m.precision == doctest::Approx(0.5));
    CHECK(m.recall == doctest::Approx(0.5));
    CHECK(m.f1 == doctest::Approx(0.5));
    CHECK(m.confusion.total() == 3);
    // All-negative predictions with positives present.
    CHECK(f1_score({0, 0, 0}, {1, 1, 0}).f1 == 0.0);
    CHECK(f1_score({0, 0}, {0, 0}).f1 == 0.0);
    CHECK_THROWS_AS(f1_score({1}, {1, 0}), std::invalid_argument);
}

TEST_CASE("f1 is invariant under instance permutation") {
    std::mt19937_64 rng(1);
    std::vector<int> preds(200), labels(200);
    std::bernoulli_distribution coin(0.4);
    for (std::size_t i = 0; i < 200; ++i) {
        preds[i] = coin(rng);
        labels[i] = coin(rng);
    }
    const double base = f1_score(preds, labels).f1;
    std::vector<std::size_t> order = testutil::all_rows(200);
    for (int rep = 0; rep < 10; ++rep) {
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<int> p2(200), l2(200);
        for (std::size_t i = 0; i < 200; ++i) {
            p2[i] = preds[order[i]];
            l2[i] = labels[order[i]];
        }
        CHECK(f1_score(p2, l2).f1 == base);
    }
}

TEST_CASE("timed wraps a call and reports non-negative seconds") {
    auto [value, secs] = timed([] { return 42; });
    CHECK(value == 42);
    CHECK(secs >= 0.0);
}

TEST_CASE("grid spec validation and expansion") {
    GridSpec g = GridSpec::defaults();
    CHECK(g.num_boxes == std::vector<int>{2, 5, 10, 20, 30});
    TrainConfig base;
    CHECK(g.expand(base).size() == 5 * 3 * 3 * 3);
    g.tau.clear();
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = GridSpec::defaults();
    g.learning_rate = {-1.0};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("grid_search contracts") {
    BinaryTask task = two_box_task();
    const SplitSpec split = stratified_split(task.y, 0.7, 5);
    const Standardizer st = standardize_fit(task.X, split.train);
    task.standardizer = st;
    st.apply_in_place(task.X);

    GridSpec grid;
    grid.num_boxes = {1, 2};
    grid.tau = {0.05};
    grid.phi = {0.1};
    grid.learning_rate = {0.02};
    grid.batch_size = {0};

    const GridResult result = grid_search(task, split.folds, grid, quick_config());

    SUBCASE("table has |grid| x k rows") {
        CHECK(result.table.size() == 2 * split.folds.size());
    }
    SUBCASE("best mean F1 dominates the table") {
        for (double f1 : result.mean_f1) {
            if (!std::isnan(f1)) CHECK(result.mean_f1[result.best_index] >= f1);
        }
    }
    SUBCASE("single-config grid returns that config") {
        GridSpec one;
        one.num_boxes = {2};
        one.tau = {0.05};
        one.phi = {0.1};
        one.learning_rate = {0.02};
        one.batch_size = {0};
        const GridResult r = grid_search(task, split.folds, one, quick_config());
        CHECK(r.best.num_boxes == 2);
        CHECK(r.table.size() == split.folds.size());
    }
    SUBCASE("fixed seed reproduces the table exactly") {
        const GridResult again = grid_search(task, split.folds, grid, quick_config());
        CHECK(again.best_index == result.best_index);
        REQUIRE(again.table.size() == result.table.size());
        for (std::size_t i = 0; i < result.table.size(); ++i) {
            CHECK(again.table[i].f1 == result.table[i].f1);
        }
    }
    SUBCASE("parallel schedule yields the identical table") {
        const GridResult par =
            grid_search(task, split.folds, grid, quick_config(), 4);
        REQUIRE(par.table.size() == result.table.size());
        for (std::size_t i = 0; i < result.table.size(); ++i) {
            CHECK(par.table[i].f1 == result.table[i].f1);
            CHECK(par.table[i].config_index == result.table[i].config_index);
        }
        CHECK(par.best_index == result.best_index);
    }
}

TEST_CASE("grid_search records failed configs instead of aborting") {
    BinaryTask task = two_box_task(400, 33);
    const SplitSpec split = stratified_split(task.y, 0.7, 5);
    GridSpec grid;
    grid.num_boxes = {2};
    grid.tau = {0.05};
    grid.phi = {0.1};
    // lr = 1e308 overflows the parameters to inf within a step or two.
    grid.learning_rate = {0.02, 1e308};
    grid.batch_size = {0};
    const GridResult result = grid_search(task, split.folds, grid, quick_config());
    CHECK(result.best.learning_rate == 0.02);
    CHECK_FALSE(std::isnan(result.mean_f1[result.best_index]));
    bool any_failed = false;
    for (const CvCell& row : result.table) {
        if (row.failed) {
            any_failed = true;
            CHECK_FALSE(row.error.empty());
        }
    }
    CHECK(any_failed);
}

TEST_CASE("sweep_m shapes and trend on a two-box task") {
    BinaryTask task = two_box_task(500, 55);
    const SplitSpec split = stratified_split(task.y, 0.7, 5);
    const Standardizer st = standardize_fit(task.X, split.train);
    task.standardizer = st;
    st.apply_in_place(task.X);

    TrainConfig base = quick_config();
    base.max_epochs = 250;
    base.patience = 250;
    const std::vector<int> ms{1, 2};
    const std::vector<unsigned long long> seeds{1, 2, 3};
    const SweepResult result = sweep_m(task, split, ms, base, seeds);

    // |M| x |seeds| detail rows plus |M| summary rows.
    CHECK(result.rows.size() == ms.size() * seeds.size() + ms.size());

    double mean_f1_m1 = 0.0, mean_f1_m2 = 0.0;
    for (const SweepRow& row : result.rows) {
        if (!row.summary) continue;
        (row.num_boxes == 1 ? mean_f1_m1 : mean_f1_m2) = row.f1;
        CHECK(row.t_train > 0.0);
    }
    // Two disjoint generating boxes: one box cannot cover both clusters.
    CHECK(mean_f1_m2 >= mean_f1_m1 + 0.1);

    SUBCASE("single-M sweep") {
        const SweepResult single = sweep_m(task, split, {2}, base, {1});
        CHECK(single.rows.size() == 2);  // one detail + one summary
    }
    SUBCASE("summary means match the detail rows") {
        for (const SweepRow& row : result.rows) {
            if (!row.summary) continue;
            double sum = 0.0;
            for (const SweepRow& detail : result.rows) {
                if (!detail.summary && detail.num_boxes == row.num_boxes) {
                    sum += detail.f1;
                }
            }
            CHECK(row.f1 ==
                  doctest::Approx(sum / static_cast<double>(seeds.size()))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("crisp predictions are invariant under positive feature scaling") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> scale_dist(0.1, 10.0);
    for (int rep = 0; rep < 20; ++rep) {
        const HyperNNModel model = testutil::random_model(rng, 3, 3, 0.1, 0.1);
        const double c = scale_dist(rng);
        HyperNNModel scaled = model;
        for (auto& box : scaled.boxes) {
            for (double& v : box.theta_m) v *= c;
            for (double& v : box.theta_l) v *= c;
        }
        for (int p = 0; p < 50; ++p) {
            auto x = testutil::random_point(rng, 3);
            auto xs = x;
            for (double& v : xs) v *= c;
            CHECK(crisp_predict(model, x) == crisp_predict(scaled, xs));
        }
    }
}
