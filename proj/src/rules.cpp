#include "hypernn/rules.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace hypernn {

namespace {

void check_compat(const HyperNNModel& model, const Standardizer& st,
                  const std::vector<std::string>& names) {
    if (st.mean.size() != model.d || names.size() != model.d) {
        throw std::invalid_argument(
            "export_rules: model, standardizer, and feature names disagree on d");
    }
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

}  // namespace

RuleSet export_rules(const HyperNNModel& model, const Standardizer& standardizer,
                     const std::vector<std::string>& feature_names) {
    check_compat(model, standardizer, feature_names);
    RuleSet rules;
    for (const Hyperbox& box : model.boxes) {
        BoxRule rule;
        for (std::size_t j = 0; j < model.d; ++j) {
            IntervalPredicate p;
            p.feature = feature_names[j];
            p.lower = standardizer.invert(j, box.theta_m[j]);
            p.upper = standardizer.invert(j, box.theta_m[j] + box.theta_l[j]);
            rule.intervals.push_back(std::move(p));
        }
        rules.boxes.push_back(std::move(rule));
    }
    return rules;
}

RuleSet export_rules(const HyperNNModel& model, const Standardizer& standardizer,
                     const std::vector<std::string>& feature_names,
                     const std::vector<std::vector<double>>& X_standardized,
                     const std::vector<int>& y,
                     const std::vector<std::size_t>& rows) {
    RuleSet rules = export_rules(model, standardizer, feature_names);
    for (std::size_t k = 0; k < model.boxes.size(); ++k) {
        for (std::size_t i : rows) {
            if (crisp_contains(model.boxes[k], X_standardized[i])) {
                y[i] == 1 ? ++rules.boxes[k].positives_covered
                          : ++rules.boxes[k].negatives_covered;
            }
        }
    }
    return rules;
}

std::string render_text(const RuleSet& rules) {
    std::ostringstream out;
    for (std::size_t k = 0; k < rules.boxes.size(); ++k) {
        if (k > 0) out << "\n OR\n";
        const BoxRule& rule = rules.boxes[k];
        for (std::size_t j = 0; j < rule.intervals.size(); ++j) {
            const IntervalPredicate& p = rule.intervals[j];
            if (j > 0) out << " AND ";
            out << "(" << fmt(p.lower) << " <= " << p.feature << " <= "
                << fmt(p.upper) << ")";
        }
    }
    return out.str();
}

std::string render_sql(const RuleSet& rules) {
    std::ostringstream out;
    out << "WHERE ";
    for (std::size_t k = 0; k < rules.boxes.size(); ++k) {
        if (k > 0) out << "\n   OR ";
        const BoxRule& rule = rules.boxes[k];
        out << "(";
        for (std::size_t j = 0; j < rule.intervals.size(); ++j) {
            const IntervalPredicate& p = rule.intervals[j];
            if (j > 0) out << " AND ";
            out << "(" << p.feature << " BETWEEN " << fmt(p.lower) << " AND "
                << fmt(p.upper) << ")";
        }
        out << ")";
    }
    return out.str();
}

bool rules_match(const RuleSet& rules, const std::vector<double>& x_original,
                 double tolerance) {
    for (const BoxRule& rule : rules.boxes) {
        if (x_original.size() != rule.intervals.size()) {
            throw std::invalid_argument("rules_match: dimension mismatch");
        }
        bool inside = true;
        for (std::size_t j = 0; j < rule.intervals.size(); ++j) {
            const IntervalPredicate& p = rule.intervals[j];
            if (x_original[j] < p.lower - tolerance ||
                x_original[j] > p.upper + tolerance) {
                inside = false;
                break;
            }
        }
        if (inside) return true;
    }
    return false;
}

PruneResult prune_boxes(const HyperNNModel& model,
                        const std::vector<std::vector<double>>& X_standardized,
                        const std::vector<int>& y,
                        const std::vector<std::size_t>& rows) {
    std::vector<long> pos_cover(model.boxes.size(), 0);
    for (std::size_t k = 0; k < model.boxes.size(); ++k) {
        for (std::size_t i : rows) {
            if (y[i] == 1 && crisp_contains(model.boxes[k], X_standardized[i])) {
                ++pos_cover[k];
            }
        }
    }
    PruneResult result;
    result.model.tau = model.tau;
    result.model.phi = model.phi;
    result.model.d = model.d;
    for (std::size_t k = 0; k < model.boxes.size(); ++k) {
        if (pos_cover[k] > 0) {
            result.model.boxes.push_back(model.boxes[k]);
        } else {
            result.removed.push_back(k);
        }
    }
    if (result.model.boxes.empty()) {
        // Every box is positive-free; keep the best-covering one anyway.
        const std::size_t keep = static_cast<std::size_t>(
            std::max_element(pos_cover.begin(), pos_cover.end()) - pos_cover.begin());
        result.model.boxes.push_back(model.boxes[keep]);
        result.removed.erase(
            std::remove(result.removed.begin(), result.removed.end(), keep),
            result.removed.end());
    }
    return result;
}

}  // namespace hypernn
