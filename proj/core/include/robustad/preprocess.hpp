#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "robustad/csv.hpp"
#include "robustad/dataset.hpp"
#include "robustad/schema.hpp"

namespace robustad::data {

/// Fitted state for one schema column. Label and ignored columns carry no state.
struct ColumnState {
    std::string name;
    ColumnKind kind = ColumnKind::ignore;
    double min = 0.0;
    double max = 0.0;
    std::vector<std::string> vocabulary;  ///< first-appearance order
};

/// Min-max ranges for continuous columns and category vocabularies for
/// categorical ones, fitted on training-side rows only.
struct PreprocessorState {
    std::vector<ColumnState> columns;  ///< schema order

    /// (#continuous) + sum of vocabulary sizes.
    std::size_t width() const;
    /// Continuous columns keep their name; one-hot columns are "name=value".
    std::vector<std::string> feature_names() const;
};

/// Parses a numeric cell; ParseError naming `row` and `column` on failure.
double parse_number(const std::string& cell, std::size_t row, const std::string& column);

/// Fits on `rows` (indices into `table`). DomainError when `rows` is empty.
PreprocessorState fit_preprocessor(const RawTable& table, std::span<const std::size_t> rows,
                                   const FeatureSchema& schema);

/// Continuous values map to (v - min) / (max - min) clamped to [0, 1]
/// (0 for a constant column); categories become one-hot blocks, all-zero for
/// values outside the vocabulary; the label column maps through the schema.
EncodedDataset apply_preprocessor(const PreprocessorState& state, const RawTable& table,
                                  std::span<const std::size_t> rows, const FeatureSchema& schema);

/// Labels only, without touching feature cells.
std::vector<std::uint8_t> extract_labels(const RawTable& table, const FeatureSchema& schema);

}  // namespace robustad::data
