#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hypernn/data.hpp"
#include "hypernn/model.hpp"

namespace hypernn {

struct IntervalPredicate {
    std::string feature;
    double lower = 0.0;  // original (de-standardized) feature units
    double upper = 0.0;
};

struct BoxRule {
    std::vector<IntervalPredicate> intervals;
    long positives_covered = 0;  // crisp coverage on training data
    long negatives_covered = 0;
};

struct RuleSet {
    std::vector<BoxRule> boxes;
};

// Maps each box back through the standardizer into original feature units.
// Coverage counts are zero unless the training-data overload is used.
RuleSet export_rules(const HyperNNModel& model, const Standardizer& standardizer,
                     const std::vector<std::string>& feature_names);
RuleSet export_rules(const HyperNNModel& model, const Standardizer& standardizer,
                     const std::vector<std::string>& feature_names,
                     const std::vector<std::vector<double>>& X_standardized,
                     const std::vector<int>& y,
                     const std::vector<std::size_t>& rows);

// "(l <= a <= u) AND (..)" per box, boxes joined by OR.
std::string render_text(const RuleSet& rules);

// "WHERE (a BETWEEN l AND u) AND ..." per box.
std::string render_sql(const RuleSet& rules);

// Evaluate the exported disjunction on a point in original feature units.
bool rules_match(const RuleSet& rules, const std::vector<double>& x_original,
                 double tolerance = 0.0);

struct PruneResult {
    HyperNNModel model;
    std::vector<std::size_t> removed;  // original box indices
};

// Drops boxes that crisply contain zero training positives; always keeps
// at least the best-covering box.
PruneResult prune_boxes(const HyperNNModel& model,
                        const std::vector<std::vector<double>>& X_standardized,
                        const std::vector<int>& y,
                        const std::vector<std::size_t>& rows);

}  // namespace hypernn
