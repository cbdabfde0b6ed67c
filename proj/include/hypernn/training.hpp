#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypernn/data.hpp"
#include "hypernn/model.hpp"

namespace hypernn {

enum class InitStrategy { DataCover, RandomJitter };

enum class StopMetric { ValLoss, ValF1 };

struct TrainConfig {
    int max_epochs = 10000;
    int patience = 200;
    double learning_rate = 0.01;
    int batch_size = 256;          // 0 = full batch
    double tau = 0.1;
    double phi = 0.1;
    int num_boxes = 5;
    unsigned long long seed = 1;
    InitStrategy init_strategy = InitStrategy::DataCover;
    double eps_clamp = 1e-7;
    StopMetric stop_metric = StopMetric::ValLoss;

    void validate() const;
};

struct AdamState {
    ModelGradients m;  // first moments
    ModelGradients v;  // second moments
    long t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState init(const HyperNNModel& model);
};

struct TrainReport {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::vector<double> val_f1;
    int best_epoch = -1;
    double t_train_seconds = 0.0;
    std::string stop_reason;
};

struct DivergedError : std::runtime_error {
    int epoch;
    explicit DivergedError(int epoch_)
        : std::runtime_error("training diverged (non-finite loss) at epoch " +
                             std::to_string(epoch_)),
          epoch(epoch_) {}
};

// Binary cross entropy on a prediction clamped to [eps, 1-eps].
double bce_loss(double y_hat, int y, double eps = 1e-7);

// d(bce_loss)/d(y_hat), evaluated at the clamped prediction.
double bce_grad(double y_hat, int y, double eps = 1e-7);

// One bias-corrected Adam update followed by projection of every span
// back to theta_l >= 0.
void adam_step(HyperNNModel& model, const ModelGradients& grads, AdamState& state,
               double lr);

// Box initialization from the task's positive instances (data-cover) or
// uniformly over the feature bounding box (random-jitter).
HyperNNModel init_params(const BinaryTask& task,
                         const std::vector<std::size_t>& rows, int num_boxes,
                         InitStrategy strategy, unsigned long long seed, double tau,
                         double phi);

// Mini-batch training with early stopping on the validation metric;
// returns the best-validation snapshot.
std::pair<HyperNNModel, TrainReport> train(const BinaryTask& task,
                                           const std::vector<std::size_t>& train_rows,
                                           const std::vector<std::size_t>& val_rows,
                                           const TrainConfig& config);

// Mean loss and gradient of the batch BCE objective at the current
// parameters. Exposed for gradient checking.
double batch_loss(const HyperNNModel& model, const BinaryTask& task,
                  const std::vector<std::size_t>& rows, double eps_clamp = 1e-7);
ModelGradients batch_gradient(const HyperNNModel& model, const BinaryTask& task,
                              const std::vector<std::size_t>& rows,
                              double eps_clamp = 1e-7);

}  // namespace hypernn
