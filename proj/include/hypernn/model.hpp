#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hypernn {

// Axis-aligned box {x : theta_m <= x <= theta_m + theta_l}.
// theta_l must stay elementwise non-negative; the optimizer projects it
// back after every step.
struct Hyperbox {
    std::vector<double> theta_m;
    std::vector<double> theta_l;

    std::size_t dim() const { return theta_m.size(); }
};

// A bank of M hyperbox neurons plus the two smoothness temperatures:
// tau sharpens the per-face sigmoid, phi sharpens the smooth maximum
// that unions the boxes.
struct HyperNNModel {
    std::vector<Hyperbox> boxes;
    double tau = 0.1;
    double phi = 0.1;
    std::size_t d = 0;

    std::size_t num_boxes() const { return boxes.size(); }
};

// Intermediates of one hyperbox neuron's containment check, kept for the
// backward pass.
struct BoxTrace {
    double lower_slack = 0.0;   // min_j (x_j - theta_m_j)
    double upper_slack = 0.0;   // min_j (theta_m_j + theta_l_j - x_j)
    std::size_t argmin_lower = 0;
    std::size_t argmin_upper = 0;
    double p = 0.0;             // sigmoid_tau(lower_slack)
    double q = 0.0;             // sigmoid_tau(upper_slack)
    double h = 0.0;             // p * q
};

struct ForwardTrace {
    std::vector<BoxTrace> boxes;
    std::vector<double> weights;  // smooth-max weights, sum to 1
    double y_hat = 0.0;
};

// Gradients shaped exactly like the model parameters.
struct ModelGradients {
    std::vector<std::vector<double>> d_theta_m;
    std::vector<std::vector<double>> d_theta_l;

    static ModelGradients zeros_like(const HyperNNModel& model);
    void accumulate(const ModelGradients& other);
    void scale(double factor);
};

// Temperature sigmoid 1 / (1 + exp(-z/tau)), stable for large |z/tau| and
// clamped into the open interval (0,1) so downstream logs stay finite.
double sigmoid_tau(double z, double tau);

// Boltzmann-weighted smooth maximum; exact max of h as phi -> 0.
double smooth_max(std::span<const double> h, double phi);

// Differentiable containment score of x in one box, with every
// intermediate retained. Slack argmin ties break to the lowest dimension.
BoxTrace soft_containment(const Hyperbox& box, std::span<const double> x, double tau);

ForwardTrace forward(const HyperNNModel& model, std::span<const double> x);

// Analytic gradients of dL_dyhat * y_hat with respect to every box
// parameter, consuming the trace produced by forward on the same inputs.
ModelGradients backward(const HyperNNModel& model, std::span<const double> x,
                        const ForwardTrace& trace, double dL_dyhat);

// Exact indicator on the closed box.
bool crisp_contains(const Hyperbox& box, std::span<const double> x);

// 1 iff at least one box crisply contains x.
int crisp_predict(const HyperNNModel& model, std::span<const double> x);

// 1 iff forward(model, x).y_hat >= threshold.
int soft_predict(const HyperNNModel& model, std::span<const double> x,
                 double threshold = 0.5);

}  // namespace hypernn
