#pragma once

#include <cstdint>
#include <vector>

#include "ludo/types.hpp"

namespace ludo {

// Sparse two-entries-per-row design: row i carries +1 at the first player's
// column and -1 at the second's. Column rank is A - K, K the number of
// connected components of the who-played-whom graph.
struct SparseDesign {
  std::int64_t rows = 0;
  int cols = 0;
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;  // (plus, minus) per row
};

SparseDesign build_design(const std::vector<MatchRecord>& matches, const Population& pop);

struct ConnectivityReport {
  int K = 0;                        // number of connected components
  std::vector<int> component;       // player index -> component id in [0, K)
  std::vector<int> isolated;        // players with no matches
};

ConnectivityReport connectivity(const std::vector<MatchRecord>& matches, const Population& pop);

enum class SeparationKind { kAllWins, kAllLosses };

struct SeparationFlag {
  PlayerId player;
  SeparationKind kind;
};

// Players whose recorded outcomes are exclusively wins or exclusively losses.
// A tie counts as neither and breaks separation: it bounds the likelihood.
std::vector<SeparationFlag> detect_separation(const std::vector<MatchRecord>& matches,
                                              const Population& pop);

}  // namespace ludo
