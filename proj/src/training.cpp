#include "hypernn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hypernn/evaluation.hpp"

namespace hypernn {

namespace {

double clamp01(double y_hat, double eps) {
    return std::min(std::max(y_hat, eps), 1.0 - eps);
}

}  // namespace

void TrainConfig::validate() const {
    if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
    if (patience < 1 || patience > max_epochs) {
        throw std::invalid_argument("patience must be in [1, max_epochs]");
    }
    if (!(learning_rate > 0)) throw std::invalid_argument("learning_rate must be > 0");
    if (batch_size < 0) throw std::invalid_argument("batch_size must be >= 0");
    if (!(tau > 0) || !(phi > 0)) throw std::invalid_argument("tau and phi must be > 0");
    if (num_boxes < 1) throw std::invalid_argument("num_boxes must be >= 1");
    if (!(eps_clamp > 0)) throw std::invalid_argument("eps_clamp must be > 0");
}

AdamState AdamState::init(const HyperNNModel& model) {
    AdamState s;
    s.m = ModelGradients::zeros_like(model);
    s.v = ModelGradients::zeros_like(model);
    return s;
}

double bce_loss(double y_hat, int y, double eps) {
    if (!std::isfinite(y_hat) || (y != 0 && y != 1)) {
        throw std::invalid_argument("bce_loss: invalid inputs");
    }
    const double p = clamp01(y_hat, eps);
    return -(y * std::log(p) + (1 - y) * std::log(1.0 - p));
}

double bce_grad(double y_hat, int y, double eps) {
    if (!std::isfinite(y_hat) || (y != 0 && y != 1)) {
        throw std::invalid_argument("bce_grad: invalid inputs");
    }
    const double p = clamp01(y_hat, eps);
    return -y / p + (1 - y) / (1.0 - p);
}

void adam_step(HyperNNModel& model, const ModelGradients& grads, AdamState& state,
               double lr) {
    if (grads.d_theta_m.size() != model.num_boxes() ||
        state.m.d_theta_m.size() != model.num_boxes()) {
        throw std::logic_error("adam_step: shape mismatch");
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t k = 0; k < model.num_boxes(); ++k) {
        Hyperbox& box = model.boxes[k];
        if (grads.d_theta_m[k].size() != box.dim()) {
            throw std::logic_error("adam_step: shape mismatch");
        }
        for (std::size_t j = 0; j < box.dim(); ++j) {
            auto update = [&](double g, double& m, double& v, double& param) {
                m = state.beta1 * m + (1.0 - state.beta1) * g;
                v = state.beta2 * v + (1.0 - state.beta2) * g * g;
                const double mhat = m / bc1;
                const double vhat = v / bc2;
                param -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
            };
            update(grads.d_theta_m[k][j], state.m.d_theta_m[k][j],
                   state.v.d_theta_m[k][j], box.theta_m[j]);
            update(grads.d_theta_l[k][j], state.m.d_theta_l[k][j],
                   state.v.d_theta_l[k][j], box.theta_l[j]);
            if (box.theta_l[j] < 0.0) box.theta_l[j] = 0.0;
        }
    }
}

HyperNNModel init_params(const BinaryTask& task,
                         const std::vector<std::size_t>& rows, int num_boxes,
                         InitStrategy strategy, unsigned long long seed, double tau,
                         double phi) {
    const std::size_t d = task.cols();
    HyperNNModel model;
    model.tau = tau;
    model.phi = phi;
    model.d = d;
    std::mt19937_64 rng(seed);

    if (strategy == InitStrategy::RandomJitter) {
        std::vector<double> lo(d, std::numeric_limits<double>::infinity());
        std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
        for (std::size_t i : rows) {
            for (std::size_t j = 0; j < d; ++j) {
                lo[j] = std::min(lo[j], task.X[i][j]);
                hi[j] = std::max(hi[j], task.X[i][j]);
            }
        }
        for (int k = 0; k < num_boxes; ++k) {
            Hyperbox box;
            box.theta_m.resize(d);
            box.theta_l.resize(d);
            for (std::size_t j = 0; j < d; ++j) {
                std::uniform_real_distribution<double> u(lo[j], hi[j]);
                double a = u(rng), b = u(rng);
                if (a > b) std::swap(a, b);
                box.theta_m[j] = a;
                box.theta_l[j] = b - a;
            }
            model.boxes.push_back(std::move(box));
        }
        return model;
    }

    // data-cover: boxes seeded on positive instances, spans from the
    // positive-class spread.
    std::vector<std::size_t> pos;
    for (std::size_t i : rows) {
        if (task.y[i] == 1) pos.push_back(i);
    }
    if (pos.empty()) {
        throw std::invalid_argument("init_params: no positive instances");
    }
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    for (std::size_t i : pos) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += task.X[i][j];
    }
    for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(pos.size());
    for (std::size_t i : pos) {
        for (std::size_t j = 0; j < d; ++j) {
            const double c = task.X[i][j] - mean[j];
            var[j] += c * c;
        }
    }
    std::vector<double> span(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(pos.size()));
        span[j] = std::max(0.2 * sd, 1e-3);
    }

    std::vector<std::size_t> centers;
    if (pos.size() >= static_cast<std::size_t>(num_boxes)) {
        // without replacement
        std::vector<std::size_t> perm = pos;
        std::shuffle(perm.begin(), perm.end(), rng);
        centers.assign(perm.begin(), perm.begin() + num_boxes);
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, pos.size() - 1);
        for (int k = 0; k < num_boxes; ++k) centers.push_back(pos[pick(rng)]);
    }
    for (std::size_t c : centers) {
        Hyperbox box;
        box.theta_m.resize(d);
        box.theta_l = span;
        for (std::size_t j = 0; j < d; ++j) {
            box.theta_m[j] = task.X[c][j] - span[j] / 2.0;
        }
        model.boxes.push_back(std::move(box));
    }
    return model;
}

double batch_loss(const HyperNNModel& model, const BinaryTask& task,
                  const std::vector<std::size_t>& rows, double eps_clamp) {
    double sum = 0.0;
    for (std::size_t i : rows) {
        sum += bce_loss(forward(model, task.X[i]).y_hat, task.y[i], eps_clamp);
    }
    return sum / static_cast<double>(rows.size());
}

ModelGradients batch_gradient(const HyperNNModel& model, const BinaryTask& task,
                              const std::vector<std::size_t>& rows,
                              double eps_clamp) {
    ModelGradients grads = ModelGradients::zeros_like(model);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (std::size_t i : rows) {
        const ForwardTrace trace = forward(model, task.X[i]);
        const double up = bce_grad(trace.y_hat, task.y[i], eps_clamp) * inv_n;
        grads.accumulate(backward(model, task.X[i], trace, up));
    }
    return grads;
}

std::pair<HyperNNModel, TrainReport> train(const BinaryTask& task,
                                           const std::vector<std::size_t>& train_rows,
                                           const std::vector<std::size_t>& val_rows,
                                           const TrainConfig& config) {
    config.validate();
    if (train_rows.empty()) {
        throw std::invalid_argument("train: empty training split");
    }
    const auto t0 = std::chrono::steady_clock::now();

    HyperNNModel model = init_params(task, train_rows, config.num_boxes,
                                     config.init_strategy, config.seed, config.tau,
                                     config.phi);
    AdamState adam = AdamState::init(model);
    std::mt19937_64 shuffle_rng(config.seed ^ 0xdeadbeefcafef00dULL);

    const std::size_t batch =
        config.batch_size == 0 ? train_rows.size()
                               : std::min<std::size_t>(
                                     static_cast<std::size_t>(config.batch_size),
                                     train_rows.size());
    std::vector<std::size_t> order(train_rows);

    TrainReport report;
    double best_metric = std::numeric_limits<double>::infinity();
    HyperNNModel best_model = model;
    int epochs_since_improvement = 0;
    report.stop_reason = "max_epochs";

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double loss_sum = 0.0;
        std::size_t seen = 0;
        std::vector<std::size_t> chunk;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            chunk.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
            ModelGradients grads = ModelGradients::zeros_like(model);
            const double inv_b = 1.0 / static_cast<double>(chunk.size());
            for (std::size_t i : chunk) {
                const ForwardTrace trace = forward(model, task.X[i]);
                loss_sum += bce_loss(trace.y_hat, task.y[i], config.eps_clamp);
                const double up =
                    bce_grad(trace.y_hat, task.y[i], config.eps_clamp) * inv_b;
                grads.accumulate(backward(model, task.X[i], trace, up));
            }
            seen += chunk.size();
            adam_step(model, grads, adam, config.learning_rate);
            for (const Hyperbox& box : model.boxes) {
                for (std::size_t j = 0; j < box.dim(); ++j) {
                    if (!std::isfinite(box.theta_m[j]) ||
                        !std::isfinite(box.theta_l[j])) {
                        throw DivergedError(epoch);
                    }
                }
            }
        }
        const double train_loss = loss_sum / static_cast<double>(seen);
        if (!std::isfinite(train_loss)) {
            throw DivergedError(epoch);
        }
        report.train_loss.push_back(train_loss);

        double vloss = 0.0;
        double vf1 = 0.0;
        if (!val_rows.empty()) {
            std::vector<int> preds;
            preds.reserve(val_rows.size());
            std::vector<int> truth;
            truth.reserve(val_rows.size());
            for (std::size_t i : val_rows) {
                const double y_hat = forward(model, task.X[i]).y_hat;
                vloss += bce_loss(y_hat, task.y[i], config.eps_clamp);
                preds.push_back(y_hat >= 0.5 ? 1 : 0);
                truth.push_back(task.y[i]);
            }
            vloss /= static_cast<double>(val_rows.size());
            vf1 = f1_score(preds, truth).f1;
        } else {
            vloss = train_loss;
        }
        if (!std::isfinite(vloss)) {
            throw DivergedError(epoch);
        }
        report.val_loss.push_back(vloss);
        report.val_f1.push_back(vf1);

        const double metric =
            config.stop_metric == StopMetric::ValLoss ? vloss : -vf1;
        if (metric < best_metric) {
            best_metric = metric;
            best_model = model;
            report.best_epoch = epoch;
            epochs_since_improvement = 0;
        } else {
            ++epochs_since_improvement;
            if (epochs_since_improvement >= config.patience) {
                report.stop_reason = "early_stopping";
                break;
            }
        }
    }

    report.t_train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(best_model), std::move(report)};
}

}  // namespace hypernn
