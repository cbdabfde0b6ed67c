#include "hypernn/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace hypernn {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == delim) {
        out.emplace_back();
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Shuffle a copy of idx with a seeded generator.
std::vector<std::size_t> shuffled(std::vector<std::size_t> idx,
                                  unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}

}  // namespace

Standardizer Standardizer::identity(std::size_t d) {
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.stddev.assign(d, 1.0);
    return s;
}

std::vector<double> Standardizer::apply(const std::vector<double>& x) const {
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        out[j] = (x[j] - mean[j]) / stddev[j];
    }
    return out;
}

void Standardizer::apply_in_place(std::vector<std::vector<double>>& X) const {
    for (auto& row : X) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            row[j] = (row[j] - mean[j]) / stddev[j];
        }
    }
}

std::size_t BinaryTask::positives() const {
    return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
}

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw CsvError("cannot open file: " + path);
    }
    Dataset ds;
    std::string line;
    std::size_t line_no = 0;
    std::size_t arity = 0;
    int label_col = schema.label_index;
    std::unordered_map<std::string, int> class_index;

    if (schema.has_header) {
        if (!std::getline(in, line)) {
            throw CsvError(path + ": empty file");
        }
        ++line_no;
        auto header = split_line(line, schema.delimiter);
        arity = header.size();
        if (!schema.label_name.empty()) {
            label_col = -1;
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (trim(header[i]) == schema.label_name) {
                    label_col = static_cast<int>(i);
                    break;
                }
            }
            if (label_col < 0) {
                throw CsvError(path + ": label column '" + schema.label_name +
                               "' not found in header");
            }
        } else if (label_col < 0) {
            label_col = static_cast<int>(header.size()) - 1;
        }
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (static_cast<int>(i) != label_col) {
                ds.feature_names.push_back(trim(header[i]));
            }
        }
    } else if (!schema.label_name.empty()) {
        throw CsvError(path + ": label column by name requires a header");
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_line(line, schema.delimiter);
        if (arity == 0) {
            arity = fields.size();
            if (label_col < 0) label_col = static_cast<int>(arity) - 1;
            for (std::size_t i = 0; i + 1 <= arity; ++i) {
                if (static_cast<int>(i) != label_col) {
                    ds.feature_names.push_back("f" + std::to_string(i));
                }
            }
        }
        if (fields.size() != arity) {
            throw CsvError(path + ":" + std::to_string(line_no) +
                           ": ragged row (" + std::to_string(fields.size()) +
                           " fields, expected " + std::to_string(arity) + ")");
        }
        if (label_col >= static_cast<int>(arity)) {
            throw CsvError(path + ": label column index out of range");
        }
        std::vector<double> row;
        row.reserve(arity - 1);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (static_cast<int>(i) == label_col) continue;
            const std::string f = trim(fields[i]);
            std::size_t consumed = 0;
            double v;
            try {
                v = std::stod(f, &consumed);
            } catch (const std::exception&) {
                throw CsvError(path + ":" + std::to_string(line_no) +
                               ": unparseable numeric '" + f + "'");
            }
            if (consumed != f.size() || !std::isfinite(v)) {
                throw CsvError(path + ":" + std::to_string(line_no) +
                               ": unparseable numeric '" + f + "'");
            }
            row.push_back(v);
        }
        const std::string label = trim(fields[static_cast<std::size_t>(label_col)]);
        auto [it, inserted] =
            class_index.try_emplace(label, static_cast<int>(ds.class_names.size()));
        if (inserted) {
            ds.class_names.push_back(label);
        }
        ds.labels.push_back(it->second);
        ds.X.push_back(std::move(row));
    }
    if (ds.X.empty()) {
        throw CsvError(path + ": no data rows");
    }
    return ds;
}

BinaryTask binarize(const Dataset& dataset, int target_class) {
    if (target_class < 0 ||
        target_class >= static_cast<int>(dataset.num_classes())) {
        throw std::invalid_argument("binarize: unknown class index " +
                                    std::to_string(target_class));
    }
    BinaryTask task;
    task.X = dataset.X;
    task.target_class = target_class;
    task.feature_names = dataset.feature_names;
    task.standardizer = Standardizer::identity(dataset.cols());
    task.y.reserve(dataset.rows());
    for (int label : dataset.labels) {
        task.y.push_back(label == target_class ? 1 : 0);
    }
    return task;
}

Standardizer standardize_fit(const std::vector<std::vector<double>>& X,
                             const std::vector<std::size_t>& rows) {
    if (rows.empty() || X.empty()) {
        throw std::invalid_argument("standardize_fit: no rows");
    }
    const std::size_t d = X[0].size();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.stddev.assign(d, 0.0);
    for (std::size_t i : rows) {
        for (std::size_t j = 0; j < d; ++j) {
            s.mean[j] += X[i][j];
        }
    }
    const double n = static_cast<double>(rows.size());
    for (std::size_t j = 0; j < d; ++j) s.mean[j] /= n;
    for (std::size_t i : rows) {
        for (std::size_t j = 0; j < d; ++j) {
            const double c = X[i][j] - s.mean[j];
            s.stddev[j] += c * c;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        s.stddev[j] = std::sqrt(s.stddev[j] / n);
        if (s.stddev[j] == 0.0) s.stddev[j] = 1.0;  // constant column
    }
    return s;
}

std::vector<std::vector<std::size_t>> kfold(const std::vector<std::size_t>& train,
                                            const std::vector<int>& y, std::size_t k,
                                            unsigned long long seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i : train) {
        (y[i] == 1 ? pos : neg).push_back(i);
    }
    if (pos.size() < k || neg.size() < k) {
        throw std::invalid_argument(
            "kfold: a class has fewer instances than the fold count");
    }
    std::vector<std::vector<std::size_t>> folds(k);
    // Deal each class round-robin after a seeded shuffle.
    std::size_t next = 0;
    for (std::size_t i : shuffled(pos, seed ^ 0x9e3779b97f4a7c15ULL)) {
        folds[next++ % k].push_back(i);
    }
    next = 0;
    for (std::size_t i : shuffled(neg, seed ^ 0xc2b2ae3d27d4eb4fULL)) {
        folds[next++ % k].push_back(i);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

SplitSpec stratified_split(const std::vector<int>& y, double train_ratio,
                           unsigned long long seed, double inner_val_fraction,
                           std::size_t k) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) {
        (y[i] == 1 ? pos : neg).push_back(i);
    }
    if (pos.empty() || neg.empty()) {
        throw std::invalid_argument("stratified_split: both classes must be present");
    }
    SplitSpec spec;
    spec.seed = seed;
    auto deal = [&](const std::vector<std::size_t>& idx, double ratio,
                    unsigned long long salt, std::vector<std::size_t>& a,
                    std::vector<std::size_t>& b) {
        auto sh = shuffled(idx, seed ^ salt);
        const std::size_t na =
            static_cast<std::size_t>(std::llround(ratio * static_cast<double>(sh.size())));
        a.insert(a.end(), sh.begin(), sh.begin() + static_cast<std::ptrdiff_t>(na));
        b.insert(b.end(), sh.begin() + static_cast<std::ptrdiff_t>(na), sh.end());
    };
    deal(pos, train_ratio, 0x1234abcdULL, spec.train, spec.test);
    deal(neg, train_ratio, 0x5678ef01ULL, spec.train, spec.test);
    std::sort(spec.train.begin(), spec.train.end());
    std::sort(spec.test.begin(), spec.test.end());

    // Inner validation holdout, stratified within the training portion.
    std::vector<std::size_t> tpos, tneg;
    for (std::size_t i : spec.train) {
        (y[i] == 1 ? tpos : tneg).push_back(i);
    }
    deal(tpos, 1.0 - inner_val_fraction, 0x77aa88bbULL, spec.fit, spec.inner_val);
    deal(tneg, 1.0 - inner_val_fraction, 0x33cc44ddULL, spec.fit, spec.inner_val);
    std::sort(spec.fit.begin(), spec.fit.end());
    std::sort(spec.inner_val.begin(), spec.inner_val.end());

    spec.folds = kfold(spec.train, y, k, seed);
    return spec;
}

}  // namespace hypernn
