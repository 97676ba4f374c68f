#include "ludo/design.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ludo {

SparseDesign build_design(const std::vector<MatchRecord>& matches, const Population& pop) {
  SparseDesign d;
  d.rows = static_cast<std::int64_t>(matches.size());
  d.cols = pop.size();
  d.pairs.reserve(matches.size());
  for (const auto& m : matches) {
    if (m.first < 0 || m.first >= d.cols || m.second < 0 || m.second >= d.cols) {
      throw std::out_of_range("build_design: match references unregistered player");
    }
    if (m.first == m.second) throw std::invalid_argument("build_design: self-match");
    d.pairs.emplace_back(m.first, m.second);
  }
  return d;
}

namespace {
class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] =
          parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};
}  // namespace

ConnectivityReport connectivity(const std::vector<MatchRecord>& matches, const Population& pop) {
  const int A = pop.size();
  UnionFind uf(A);
  std::vector<std::int64_t> degree(static_cast<std::size_t>(A), 0);
  for (const auto& m : matches) {
    uf.unite(m.first, m.second);
    degree[static_cast<std::size_t>(m.first)]++;
    degree[static_cast<std::size_t>(m.second)]++;
  }
  ConnectivityReport rep;
  rep.component.assign(static_cast<std::size_t>(A), -1);
  std::vector<int> root_to_id(static_cast<std::size_t>(A), -1);
  for (int a = 0; a < A; ++a) {
    const int r = uf.find(a);
    if (root_to_id[static_cast<std::size_t>(r)] < 0) {
      root_to_id[static_cast<std::size_t>(r)] = rep.K++;
    }
    rep.component[static_cast<std::size_t>(a)] = root_to_id[static_cast<std::size_t>(r)];
    if (degree[static_cast<std::size_t>(a)] == 0) rep.isolated.push_back(a);
  }
  return rep;
}

std::vector<SeparationFlag> detect_separation(const std::vector<MatchRecord>& matches,
                                              const Population& pop) {
  const int A = pop.size();
  std::vector<std::int64_t> wins(static_cast<std::size_t>(A), 0);
  std::vector<std::int64_t> losses(static_cast<std::size_t>(A), 0);
  std::vector<std::int64_t> ties(static_cast<std::size_t>(A), 0);
  for (const auto& m : matches) {
    switch (m.outcome) {
      case Outcome::kFirstWin:
        wins[static_cast<std::size_t>(m.first)]++;
        losses[static_cast<std::size_t>(m.second)]++;
        break;
      case Outcome::kSecondWin:
        losses[static_cast<std::size_t>(m.first)]++;
        wins[static_cast<std::size_t>(m.second)]++;
        break;
      case Outcome::kTie:
        ties[static_cast<std::size_t>(m.first)]++;
        ties[static_cast<std::size_t>(m.second)]++;
        break;
    }
  }
  std::vector<SeparationFlag> flags;
  for (int a = 0; a < A; ++a) {
    const auto i = static_cast<std::size_t>(a);
    if (ties[i] > 0) continue;
    if (wins[i] > 0 && losses[i] == 0) {
      flags.push_back({pop.player(a), SeparationKind::kAllWins});
    } else if (losses[i] > 0 && wins[i] == 0) {
      flags.push_back({pop.player(a), SeparationKind::kAllLosses});
    }
  }
  return flags;
}

}  // namespace ludo
