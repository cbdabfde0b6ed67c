#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypernn {

struct Dataset {
    std::vector<std::vector<double>> X;   // N rows of d features
    std::vector<int> labels;              // dense class indices 0..c-1
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names; // index -> original label text

    std::size_t rows() const { return X.size(); }
    std::size_t cols() const { return X.empty() ? 0 : X[0].size(); }
    std::size_t num_classes() const { return class_names.size(); }
};

struct CsvSchema {
    // Label column selected by name (requires header) or by index.
    std::string label_name;   // used when non-empty
    int label_index = -1;     // used when label_name is empty; -1 = last column
    char delimiter = ',';
    bool has_header = true;
};

// Per-feature z-score statistics. Zero-variance features keep std 1 so
// they pass through as zeros.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;

    std::vector<double> apply(const std::vector<double>& x) const;
    void apply_in_place(std::vector<std::vector<double>>& X) const;
    // Map a standardized coordinate back to original feature units.
    double invert(std::size_t j, double z) const { return z * stddev[j] + mean[j]; }

    static Standardizer identity(std::size_t d);
};

// One-vs-all view of a dataset. X starts unstandardized; standardize()
// fits on the given training rows and transforms every row in place.
struct BinaryTask {
    std::vector<std::vector<double>> X;
    std::vector<int> y;                   // 1 = target class
    int target_class = 0;
    Standardizer standardizer;
    std::vector<std::string> feature_names;

    std::size_t rows() const { return X.size(); }
    std::size_t cols() const { return X.empty() ? 0 : X[0].size(); }
    std::size_t positives() const;
};

struct SplitSpec {
    std::vector<std::size_t> train;      // outer 70%
    std::vector<std::size_t> test;       // outer 30%
    std::vector<std::size_t> fit;        // train minus inner validation
    std::vector<std::size_t> inner_val;  // early-stopping holdout (from train)
    std::vector<std::vector<std::size_t>> folds;  // k-fold partition of train
    unsigned long long seed = 0;
};

// Thrown with the offending row number on malformed input.
struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Dataset load_csv(const std::string& path, const CsvSchema& schema);

BinaryTask binarize(const Dataset& dataset, int target_class);

// Population (1/N) standard deviation, fit only on the listed rows.
Standardizer standardize_fit(const std::vector<std::vector<double>>& X,
                             const std::vector<std::size_t>& rows);

// Stratified 70/30 split with an inner validation holdout and a k-fold
// partition of the training portion. Deterministic given the seed.
SplitSpec stratified_split(const std::vector<int>& y, double train_ratio,
                           unsigned long long seed, double inner_val_fraction = 0.2,
                           std::size_t k = 5);

std::vector<std::vector<std::size_t>> kfold(const std::vector<std::size_t>& train,
                                            const std::vector<int>& y, std::size_t k,
                                            unsigned long long seed);

}  // namespace hypernn
