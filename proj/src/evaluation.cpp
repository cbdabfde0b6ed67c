#include "hypernn/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace hypernn {

namespace {

// Run fn(i) for i in [0, n), optionally across threads. Results must be
// written to preallocated slots so the schedule cannot change the output.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int t = std::min<int>(threads, static_cast<int>(n));
    pool.reserve(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

std::vector<int> predict_rows(const HyperNNModel& model, const BinaryTask& task,
                              const std::vector<std::size_t>& rows) {
    std::vector<int> preds;
    preds.reserve(rows.size());
    for (std::size_t i : rows) preds.push_back(soft_predict(model, task.X[i]));
    return preds;
}

std::vector<int> labels_of(const BinaryTask& task,
                           const std::vector<std::size_t>& rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (std::size_t i : rows) out.push_back(task.y[i]);
    return out;
}

}  // namespace

Metrics f1_score(const std::vector<int>& preds, const std::vector<int>& labels) {
    if (preds.size() != labels.size()) {
        throw std::invalid_argument("f1_score: length mismatch");
    }
    Metrics m;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] == 1) {
            labels[i] == 1 ? ++m.confusion.tp : ++m.confusion.fp;
        } else {
            labels[i] == 1 ? ++m.confusion.fn : ++m.confusion.tn;
        }
    }
    const Confusion& c = m.confusion;
    m.precision = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    m.recall = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

GridSpec GridSpec::defaults() {
    GridSpec g;
    g.num_boxes = {2, 5, 10, 20, 30};
    g.tau = {0.01, 0.1, 1.0};
    g.phi = {0.01, 0.1, 1.0};
    g.learning_rate = {0.001, 0.01, 0.1};
    g.batch_size = {256};
    return g;
}

void GridSpec::validate() const {
    if (num_boxes.empty() || tau.empty() || phi.empty() || learning_rate.empty() ||
        batch_size.empty()) {
        throw std::invalid_argument("grid: every candidate list must be non-empty");
    }
    for (int m : num_boxes) {
        if (m < 1) throw std::invalid_argument("grid: M must be >= 1");
    }
    for (double v : tau) {
        if (!(v > 0)) throw std::invalid_argument("grid: tau must be > 0");
    }
    for (double v : phi) {
        if (!(v > 0)) throw std::invalid_argument("grid: phi must be > 0");
    }
    for (double v : learning_rate) {
        if (!(v > 0)) throw std::invalid_argument("grid: learning rate must be > 0");
    }
    for (int b : batch_size) {
        if (b < 0) throw std::invalid_argument("grid: batch size must be >= 0");
    }
}

std::vector<TrainConfig> GridSpec::expand(const TrainConfig& base) const {
    validate();
    std::vector<TrainConfig> out;
    for (int m : num_boxes) {
        for (double t : tau) {
            for (double p : phi) {
                for (double lr : learning_rate) {
                    for (int b : batch_size) {
                        TrainConfig c = base;
                        c.num_boxes = m;
                        c.tau = t;
                        c.phi = p;
                        c.learning_rate = lr;
                        c.batch_size = b;
                        out.push_back(c);
                    }
                }
            }
        }
    }
    return out;
}

GridResult grid_search(const BinaryTask& task,
                       const std::vector<std::vector<std::size_t>>& folds,
                       const GridSpec& grid, const TrainConfig& base, int threads) {
    const std::vector<TrainConfig> configs = grid.expand(base);
    const std::size_t k = folds.size();
    if (k < 2) throw std::invalid_argument("grid_search: need at least 2 folds");

    GridResult result;
    result.table.resize(configs.size() * k);

    parallel_for(configs.size() * k, threads, [&](std::size_t cell) {
        const std::size_t ci = cell / k;
        const std::size_t fi = cell % k;
        CvCell& row = result.table[cell];
        row.config_index = ci;
        row.config = configs[ci];
        row.fold = static_cast<int>(fi);
        std::vector<std::size_t> fold_train;
        for (std::size_t f = 0; f < k; ++f) {
            if (f == fi) continue;
            fold_train.insert(fold_train.end(), folds[f].begin(), folds[f].end());
        }
        std::sort(fold_train.begin(), fold_train.end());
        try {
            auto [model, report] = train(task, fold_train, folds[fi], configs[ci]);
            row.f1 = f1_score(predict_rows(model, task, folds[fi]),
                              labels_of(task, folds[fi]))
                         .f1;
            row.t_train = report.t_train_seconds;
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
    });

    result.mean_f1.assign(configs.size(),
                          std::numeric_limits<double>::quiet_NaN());
    std::vector<double> mean_time(configs.size(), 0.0);
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        double f1_sum = 0.0, time_sum = 0.0;
        std::size_t ok = 0;
        for (std::size_t fi = 0; fi < k; ++fi) {
            const CvCell& row = result.table[ci * k + fi];
            if (row.failed) continue;
            f1_sum += row.f1;
            time_sum += row.t_train;
            ++ok;
        }
        if (ok == k) {  // configs with any failed fold are not selectable
            result.mean_f1[ci] = f1_sum / static_cast<double>(k);
            mean_time[ci] = time_sum / static_cast<double>(k);
        }
    }

    std::size_t best = configs.size();
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        if (std::isnan(result.mean_f1[ci])) continue;
        if (best == configs.size()) {
            best = ci;
            continue;
        }
        const double df = result.mean_f1[ci] - result.mean_f1[best];
        if (df > 0) {
            best = ci;
        } else if (df == 0) {
            if (configs[ci].num_boxes < configs[best].num_boxes ||
                (configs[ci].num_boxes == configs[best].num_boxes &&
                 mean_time[ci] < mean_time[best])) {
                best = ci;
            }
        }
    }
    if (best == configs.size()) {
        throw std::runtime_error("grid_search: every configuration failed");
    }
    result.best_index = best;
    result.best = configs[best];
    return result;
}

SweepResult sweep_m(const BinaryTask& task, const SplitSpec& split,
                    const std::vector<int>& m_values, const TrainConfig& base,
                    const std::vector<unsigned long long>& seeds, int threads) {
    if (m_values.empty() || seeds.empty()) {
        throw std::invalid_argument("sweep_m: M list and seed list must be non-empty");
    }
    SweepResult result;
    result.rows.resize(m_values.size() * seeds.size());

    parallel_for(result.rows.size(), threads, [&](std::size_t cell) {
        const std::size_t mi = cell / seeds.size();
        const std::size_t si = cell % seeds.size();
        TrainConfig config = base;
        config.num_boxes = m_values[mi];
        config.seed = seeds[si];
        auto [model, report] = train(task, split.fit, split.inner_val, config);
        auto [preds, t_pred] =
            timed([&] { return predict_rows(model, task, split.test); });
        SweepRow& row = result.rows[cell];
        row.num_boxes = m_values[mi];
        row.seed = seeds[si];
        row.f1 = f1_score(preds, labels_of(task, split.test)).f1;
        row.t_train = report.t_train_seconds;
        row.t_pred = t_pred;
    });

    for (std::size_t mi = 0; mi < m_values.size(); ++mi) {
        SweepRow mean;
        mean.num_boxes = m_values[mi];
        mean.summary = true;
        for (std::size_t si = 0; si < seeds.size(); ++si) {
            const SweepRow& row = result.rows[mi * seeds.size() + si];
            mean.f1 += row.f1;
            mean.t_train += row.t_train;
            mean.t_pred += row.t_pred;
        }
        const double n = static_cast<double>(seeds.size());
        mean.f1 /= n;
        mean.t_train /= n;
        mean.t_pred /= n;
        result.rows.push_back(mean);
    }
    return result;
}

BenchmarkRecord benchmark_dataset(const Dataset& dataset, const std::string& name,
                                  int target_class, const GridSpec& grid,
                                  const TrainConfig& base,
                                  const std::vector<unsigned long long>& seeds,
                                  unsigned long long split_seed, int threads) {
    BinaryTask task = binarize(dataset, target_class);
    SplitSpec split = stratified_split(task.y, 0.7, split_seed);
    task.standardizer = standardize_fit(task.X, split.train);
    task.standardizer.apply_in_place(task.X);

    GridResult gridres = grid_search(task, split.folds, grid, base, threads);

    BenchmarkRecord record;
    record.dataset = name;
    record.config = gridres.best;
    record.per_seed_f1.resize(seeds.size());
    std::vector<double> t_train(seeds.size(), 0.0), t_pred(seeds.size(), 0.0);
    parallel_for(seeds.size(), threads, [&](std::size_t si) {
        TrainConfig config = gridres.best;
        config.seed = seeds[si];
        auto [model, report] = train(task, split.fit, split.inner_val, config);
        auto [preds, pred_secs] =
            timed([&] { return predict_rows(model, task, split.test); });
        record.per_seed_f1[si] = f1_score(preds, labels_of(task, split.test)).f1;
        t_train[si] = report.t_train_seconds;
        t_pred[si] = pred_secs;
    });
    record.mean_f1 =
        std::accumulate(record.per_seed_f1.begin(), record.per_seed_f1.end(), 0.0) /
        static_cast<double>(seeds.size());
    record.t_train = std::accumulate(t_train.begin(), t_train.end(), 0.0) /
                     static_cast<double>(seeds.size());
    record.t_pred = std::accumulate(t_pred.begin(), t_pred.end(), 0.0) /
                    static_cast<double>(seeds.size());
    return record;
}

}  // namespace hypernn
