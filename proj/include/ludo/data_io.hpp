#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ludo/design.hpp"
#include "ludo/types.hpp"

namespace ludo {

// Match file format: delimited text with a header. Required columns
// player_a, player_b, outcome (1 / 0 / -1, or the aliases A / draw / B);
// optional columns date (ISO-8601 day) and game_id. Unknown columns are
// ignored with a notice. Plain or gzip-compressed input.
struct LoadOptions {
  char delimiter = ',';
};

struct RejectedRow {
  std::int64_t line = 0;  // 1-based physical line number
  std::string reason;
};

struct IngestReport {
  std::int64_t rows_read = 0;
  std::int64_t rows_accepted = 0;
  std::int64_t rows_rejected = 0;
  std::vector<RejectedRow> rejected;
  std::vector<std::string> notices;
  int players = 0;
  std::int64_t n_matches = 0;
  double tie_rate = 0.0;
  bool has_dates = false;  // every accepted row carried a date
  // Histogram of per-player match counts: count -> number of players.
  std::map<std::int64_t, int> games_histogram;
  ConnectivityReport connectivity;
};

struct LoadResult {
  Population pop;
  std::vector<MatchRecord> matches;
  IngestReport report;
};

LoadResult load_matches(const std::string& path, const LoadOptions& opts = {});

// Writes matches in the load_matches format (player_a, player_b, outcome).
void write_matches(const std::string& path, const Population& pop,
                   const std::vector<MatchRecord>& matches);

struct ExperienceWindowOptions {
  std::int64_t lo = 0;
  std::int64_t hi = std::numeric_limits<std::int64_t>::max();
  // Keep a match only when both players' prior game counts fall in the
  // window; when false, one qualifying player suffices.
  bool require_both = true;
};

// Keeps match i iff the players' prior appearance counts (accumulated over
// the whole input sequence, in order) lie in [lo, hi]. The result is a
// subsequence of the input.
std::vector<MatchRecord> experience_window_filter(const std::vector<MatchRecord>& matches,
                                                  int population_size,
                                                  const ExperienceWindowOptions& opts);

struct BalanceReport {
  std::vector<std::int64_t> games_per_player;
  double mean_games = 0.0;
  double pair_coverage = 0.0;  // observed unordered pairs / C(A, 2)
  double gini = 0.0;           // inequality of per-player game counts
};

BalanceReport balance_report(const std::vector<MatchRecord>& matches, const Population& pop);

// ISO-8601 calendar date (YYYY-MM-DD) to days since 1970-01-01.
std::optional<std::int64_t> parse_date_days(const std::string& text);

}  // namespace ludo
