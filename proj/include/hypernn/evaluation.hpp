#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hypernn/data.hpp"
#include "hypernn/training.hpp"

namespace hypernn {

struct Confusion {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    long total() const { return tp + fp + tn + fn; }
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    Confusion confusion;
};

// F1 with the zero-denominator convention: P, R, and F1 are 0 when their
// denominators vanish.
Metrics f1_score(const std::vector<int>& preds, const std::vector<int>& labels);

// Wall-clock a callable on the monotonic clock.
template <typename F>
auto timed(F&& f) -> std::pair<decltype(f()), double> {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = f();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(result), secs};
}

struct GridSpec {
    std::vector<int> num_boxes;
    std::vector<double> tau;
    std::vector<double> phi;
    std::vector<double> learning_rate;
    std::vector<int> batch_size;

    static GridSpec defaults();
    // All combinations applied on top of a base config.
    std::vector<TrainConfig> expand(const TrainConfig& base) const;
    void validate() const;
};

struct CvCell {
    std::size_t config_index = 0;
    TrainConfig config;
    int fold = 0;
    double f1 = 0.0;
    double t_train = 0.0;
    bool failed = false;
    std::string error;
};

struct GridResult {
    TrainConfig best;
    std::size_t best_index = 0;
    std::vector<CvCell> table;        // |grid| x k rows
    std::vector<double> mean_f1;      // per config; NaN if every fold failed
};

// 5-fold cross-validated grid search. Each fold's validation part doubles
// as the early-stopping holdout and the scoring set. Ties break by smaller
// M, then lower mean training time. Failed configs are recorded, not fatal.
GridResult grid_search(const BinaryTask& task,
                       const std::vector<std::vector<std::size_t>>& folds,
                       const GridSpec& grid, const TrainConfig& base,
                       int threads = 1);

struct SweepRow {
    int num_boxes = 0;
    unsigned long long seed = 0;  // 0 in per-M summary rows
    double f1 = 0.0;
    double t_train = 0.0;
    double t_pred = 0.0;
    bool summary = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // |M| x |seeds| detail rows then |M| summaries
};

// Trains one model per (M, seed) on the outer train split and scores the
// test split; appends per-M mean rows.
SweepResult sweep_m(const BinaryTask& task, const SplitSpec& split,
                    const std::vector<int>& m_values, const TrainConfig& base,
                    const std::vector<unsigned long long>& seeds, int threads = 1);

struct BenchmarkRecord {
    std::string dataset;
    TrainConfig config;
    std::vector<double> per_seed_f1;
    double mean_f1 = 0.0;
    double t_train = 0.0;  // mean over seeds
    double t_pred = 0.0;   // mean over seeds
};

// Full per-dataset pipeline: binarize, split, standardize, grid-search on
// the training portion, retrain the best config per seed, score the test
// split.
BenchmarkRecord benchmark_dataset(const Dataset& dataset, const std::string& name,
                                  int target_class, const GridSpec& grid,
                                  const TrainConfig& base,
                                  const std::vector<unsigned long long>& seeds,
                                  unsigned long long split_seed, int threads = 1);

}  // namespace hypernn
