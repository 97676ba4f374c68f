#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ludo {

// Outcome of a two-player match, coded from the first player's perspective.
enum class Outcome : std::int8_t { kSecondWin = -1, kTie = 0, kFirstWin = 1 };

inline int outcome_code(Outcome o) { return static_cast<int>(o); }

struct PlayerId {
  std::string label;
  int index = -1;
};

// Player registry with dense indices assigned in first-seen order. Labels
// appear only at I/O boundaries; all numeric work uses indices.
class Population {
 public:
  int add(const std::string& label) {
    auto it = index_of_.find(label);
    if (it != index_of_.end()) return it->second;
    const int idx = static_cast<int>(labels_.size());
    index_of_.emplace(label, idx);
    labels_.push_back(label);
    match_counts_.push_back(0);
    return idx;
  }

  int require(const std::string& label) const {
    auto it = index_of_.find(label);
    if (it == index_of_.end()) throw std::out_of_range("unknown player label: " + label);
    return it->second;
  }

  bool contains(const std::string& label) const { return index_of_.count(label) > 0; }

  int size() const { return static_cast<int>(labels_.size()); }
  const std::string& label(int index) const { return labels_.at(static_cast<std::size_t>(index)); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::int64_t match_count(int index) const {
    return match_counts_.at(static_cast<std::size_t>(index));
  }
  void bump_match_count(int index) { match_counts_.at(static_cast<std::size_t>(index))++; }
  const std::vector<std::int64_t>& match_counts() const { return match_counts_; }

  PlayerId player(int index) const { return PlayerId{label(index), index}; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_of_;
  std::vector<std::int64_t> match_counts_;
};

struct MatchRecord {
  std::int32_t first = -1;
  std::int32_t second = -1;
  Outcome outcome = Outcome::kTie;
  // Days-since-epoch when a date column was present, else -1 (file order).
  std::int64_t order = -1;
};

struct MultiMatchRecord {
  std::vector<std::int32_t> players;  // n >= 2, all distinct
  std::int32_t winner = 0;            // index into players
};

enum class SkillModel { kBradleyTerry, kProbit, kProbitTies };

// Fitted (or ground-truth) skills: one real per player in performance-SD
// units, plus the tie threshold t in the same units.
struct SkillState {
  SkillModel model = SkillModel::kProbitTies;
  std::vector<double> s;
  double t = 0.0;
};

// Opponent-selection scheme used when building per-player marginal outcome
// distributions. The uniform matchmaker is the reference condition; the
// empirical one reweights by observed pairing frequencies (diagnostic only).
class Matchmaker {
 public:
  static Matchmaker uniform() { return Matchmaker(); }
  static Matchmaker empirical(const std::vector<MatchRecord>& matches, int population_size);

  bool is_uniform() const { return kind_ == Kind::kUniform; }
  // Opponent indices and weights for conditioning player a (weights sum to 1).
  // Only valid for empirical matchmakers.
  const std::vector<std::pair<int, double>>& opponents(int a) const {
    return pair_weights_.at(static_cast<std::size_t>(a));
  }

 private:
  enum class Kind { kUniform, kEmpirical };
  Matchmaker() = default;
  Kind kind_ = Kind::kUniform;
  std::vector<std::vector<std::pair<int, double>>> pair_weights_;
};

// Probability mass over a single player's outcomes {Win, Tie, Lose}.
struct OutcomeDistribution {
  double win = 0.0;
  double tie = 0.0;
  double lose = 0.0;

  double sum() const { return win + tie + lose; }
};

}  // namespace ludo
