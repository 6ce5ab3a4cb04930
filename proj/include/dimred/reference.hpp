#pragma once

// Published benchmark values for the four canonical datasets, used only by
// the comparison report and the acceptance gate. Never fed back into any
// computation.

#include <array>
#include <optional>
#include <string_view>

#include "dimred/reducers/reduced.hpp"

namespace dimred::reference {

inline constexpr std::array<std::string_view, 4> kDatasets = {"e-coli", "acute-implant", "blood-transfusion",
                                                               "prostate-cancer"};
inline constexpr std::array<ReducerKind, 5> kReducers = {ReducerKind::svd, ReducerKind::pca, ReducerKind::som,
                                                         ReducerKind::fastica, ReducerKind::none};

using Table = std::array<std::array<int, 4>, 5>;  // rows follow kReducers, columns kDatasets

/// Retained attribute counts.
inline constexpr Table kAttributes = {{{1, 1, 1, 1}, {5, 4, 1, 3}, {2, 2, 1, 2}, {8, 8, 5, 18}, {8, 8, 5, 18}}};
/// Processing time in milliseconds (hardware-bound; shown for context only).
inline constexpr Table kTimeMs = {{{19, 9, 61, 39}, {27, 14, 47, 35}, {34, 22, 51, 41}, {67, 12, 58, 148}, {22, 11, 188, 90}}};
/// DBSCAN cluster counts at eps = 1, minPts = 5.
inline constexpr Table kClusters = {{{2, 10, 13, 1}, {2, 2, 2, 2}, {2, 7, 17, 1}, {1, 1, 51, 2}, {8, 10, 13, 1}}};

inline constexpr std::array<double, 4> kPcaSweep = {0.85, 0.90, 0.95, 0.99};

inline std::optional<std::size_t> dataset_index(std::string_view name) {
  for (std::size_t i = 0; i < kDatasets.size(); ++i)
    if (kDatasets[i] == name) return i;
  return std::nullopt;
}

inline std::size_t reducer_index(ReducerKind kind) {
  for (std::size_t i = 0; i < kReducers.size(); ++i)
    if (kReducers[i] == kind) return i;
  return 0;
}

/// Published value for (reducer, dataset), if the dataset is canonical.
inline std::optional<int> lookup(const Table& table, ReducerKind kind, std::string_view dataset) {
  const auto d = dataset_index(dataset);
  if (!d) return std::nullopt;
  return table[reducer_index(kind)][*d];
}

}  // namespace dimred::reference
