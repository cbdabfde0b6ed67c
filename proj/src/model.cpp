#include "hypernn/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hypernn {

namespace {

// Largest double strictly below 1.
const double kOneMinusUlp = std::nextafter(1.0, 0.0);

void check_dim(std::size_t got, std::size_t want) {
    if (got != want) {
        throw std::invalid_argument("dimension mismatch: input has " +
                                    std::to_string(got) + " features, expected " +
                                    std::to_string(want));
    }
}

}  // namespace

ModelGradients ModelGradients::zeros_like(const HyperNNModel& model) {
    ModelGradients g;
    g.d_theta_m.assign(model.num_boxes(), std::vector<double>(model.d, 0.0));
    g.d_theta_l.assign(model.num_boxes(), std::vector<double>(model.d, 0.0));
    return g;
}

void ModelGradients::accumulate(const ModelGradients& other) {
    for (std::size_t k = 0; k < d_theta_m.size(); ++k) {
        for (std::size_t j = 0; j < d_theta_m[k].size(); ++j) {
            d_theta_m[k][j] += other.d_theta_m[k][j];
            d_theta_l[k][j] += other.d_theta_l[k][j];
        }
    }
}

void ModelGradients::scale(double factor) {
    for (std::size_t k = 0; k < d_theta_m.size(); ++k) {
        for (std::size_t j = 0; j < d_theta_m[k].size(); ++j) {
            d_theta_m[k][j] *= factor;
            d_theta_l[k][j] *= factor;
        }
    }
}

double sigmoid_tau(double z, double tau) {
    if (!std::isfinite(z)) {
        throw std::invalid_argument("sigmoid_tau: non-finite argument");
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("sigmoid_tau: tau must be positive");
    }
    const double t = z / tau;
    double s;
    if (t >= 0.0) {
        s = 1.0 / (1.0 + std::exp(-t));
    } else {
        const double e = std::exp(t);
        s = e / (1.0 + e);
    }
    // Keep the result in the open interval so h and its logs stay usable.
    if (s >= 1.0) s = kOneMinusUlp;
    if (s <= 0.0) s = std::numeric_limits<double>::min();
    return s;
}

double smooth_max(std::span<const double> h, double phi) {
    if (h.empty()) {
        throw std::invalid_argument("smooth_max: empty input");
    }
    if (!(phi > 0.0)) {
        throw std::invalid_argument("smooth_max: phi must be positive");
    }
    const double hmax = *std::max_element(h.begin(), h.end());
    double num = 0.0;
    double den = 0.0;
    for (double hk : h) {
        const double e = std::exp((hk - hmax) / phi);
        num += hk * e;
        den += e;
    }
    return num / den;
}

BoxTrace soft_containment(const Hyperbox& box, std::span<const double> x, double tau) {
    check_dim(x.size(), box.dim());
    BoxTrace t;
    t.lower_slack = std::numeric_limits<double>::infinity();
    t.upper_slack = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double lo = x[j] - box.theta_m[j];
        const double hi = box.theta_m[j] + box.theta_l[j] - x[j];
        if (lo < t.lower_slack) {
            t.lower_slack = lo;
            t.argmin_lower = j;
        }
        if (hi < t.upper_slack) {
            t.upper_slack = hi;
            t.argmin_upper = j;
        }
    }
    t.p = sigmoid_tau(t.lower_slack, tau);
    t.q = sigmoid_tau(t.upper_slack, tau);
    t.h = t.p * t.q;
    return t;
}

ForwardTrace forward(const HyperNNModel& model, std::span<const double> x) {
    check_dim(x.size(), model.d);
    if (model.boxes.empty()) {
        throw std::invalid_argument("forward: model has no boxes");
    }
    ForwardTrace trace;
    trace.boxes.reserve(model.num_boxes());
    std::vector<double> h;
    h.reserve(model.num_boxes());
    for (const Hyperbox& box : model.boxes) {
        trace.boxes.push_back(soft_containment(box, x, model.tau));
        h.push_back(trace.boxes.back().h);
    }
    const double hmax = *std::max_element(h.begin(), h.end());
    trace.weights.resize(h.size());
    double den = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        trace.weights[k] = std::exp((h[k] - hmax) / model.phi);
        den += trace.weights[k];
    }
    double num = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        trace.weights[k] /= den;
        num += h[k] * trace.weights[k];
    }
    trace.y_hat = num;
    return trace;
}

ModelGradients backward(const HyperNNModel& model, std::span<const double> x,
                        const ForwardTrace& trace, double dL_dyhat) {
    check_dim(x.size(), model.d);
    if (trace.boxes.size() != model.num_boxes() ||
        trace.weights.size() != model.num_boxes()) {
        throw std::logic_error("backward: trace does not match model shape");
    }
    if (!std::isfinite(dL_dyhat)) {
        throw std::invalid_argument("backward: non-finite upstream gradient");
    }
    ModelGradients grads = ModelGradients::zeros_like(model);
    for (std::size_t k = 0; k < model.num_boxes(); ++k) {
        const BoxTrace& bt = trace.boxes[k];
        if (bt.argmin_lower >= model.d || bt.argmin_upper >= model.d) {
            throw std::logic_error("backward: stale trace (argmin out of range)");
        }
        const double dy_dh =
            trace.weights[k] * (1.0 + (bt.h - trace.y_hat) / model.phi);
        const double dsig_a = bt.p * (1.0 - bt.p) / model.tau;
        const double dsig_b = bt.q * (1.0 - bt.q) / model.tau;
        const double dh_da = dsig_a * bt.q;
        const double dh_db = bt.p * dsig_b;
        const double up = dL_dyhat * dy_dh;
        // a = min_j (x_j - theta_m_j): gradient -1 at the lower argmin.
        grads.d_theta_m[k][bt.argmin_lower] += up * dh_da * (-1.0);
        // b = min_j (theta_m_j + theta_l_j - x_j): gradient +1 at the upper argmin.
        grads.d_theta_m[k][bt.argmin_upper] += up * dh_db;
        grads.d_theta_l[k][bt.argmin_upper] += up * dh_db;
    }
    return grads;
}

bool crisp_contains(const Hyperbox& box, std::span<const double> x) {
    check_dim(x.size(), box.dim());
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] < box.theta_m[j] || x[j] > box.theta_m[j] + box.theta_l[j]) {
            return false;
        }
    }
    return true;
}

int crisp_predict(const HyperNNModel& model, std::span<const double> x) {
    for (const Hyperbox& box : model.boxes) {
        if (crisp_contains(box, x)) return 1;
    }
    return 0;
}

int soft_predict(const HyperNNModel& model, std::span<const double> x,
                 double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw std::invalid_argument("soft_predict: threshold must be in (0,1)");
    }
    return forward(model, x).y_hat >= threshold ? 1 : 0;
}

}  // namespace hypernn
