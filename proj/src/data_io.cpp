#include "ludo/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <zlib.h>

namespace ludo {

namespace {

// Line reader transparent to gzip (gzread also passes plain files through).
class LineReader {
 public:
  explicit LineReader(const std::string& path) : file_(gzopen(path.c_str(), "rb")) {
    if (file_ == nullptr) throw std::runtime_error("cannot open file: " + path);
  }
  ~LineReader() {
    if (file_ != nullptr) gzclose(file_);
  }
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  bool next(std::string& line) {
    line.clear();
    char buf[4096];
    bool got = false;
    for (;;) {
      if (gzgets(file_, buf, sizeof(buf)) == nullptr) return got;
      got = true;
      line += buf;
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
    }
  }

 private:
  gzFile file_;
};

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string tok;
  std::stringstream ss(line);
  while (std::getline(ss, tok, delim)) out.push_back(tok);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::optional<Outcome> parse_outcome(const std::string& raw) {
  const std::string v = lower(trim(raw));
  if (v == "1" || v == "+1" || v == "a") return Outcome::kFirstWin;
  if (v == "0" || v == "draw") return Outcome::kTie;
  if (v == "-1" || v == "b") return Outcome::kSecondWin;
  return std::nullopt;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

}  // namespace

std::optional<std::int64_t> parse_date_days(const std::string& text) {
  const std::string v = trim(text);
  if (v.size() != 10 || v[4] != '-' || v[7] != '-') return std::nullopt;
  int y, m, d;
  if (std::sscanf(v.c_str(), "%4d-%2d-%2d", &y, &m, &d) != 3) return std::nullopt;
  static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1) return std::nullopt;
  const int dim = mdays[m - 1] + ((m == 2 && is_leap(y)) ? 1 : 0);
  if (d > dim) return std::nullopt;
  // Days-from-civil (Howard Hinnant's algorithm).
  const int yy = y - (m <= 2);
  const int era = (yy >= 0 ? yy : yy - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(yy - era * 400);
  const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

LoadResult load_matches(const std::string& path, const LoadOptions& opts) {
  LineReader reader(path);
  LoadResult res;
  IngestReport& rep = res.report;

  std::string line;
  if (!reader.next(line)) throw std::runtime_error("empty file: " + path);

  const auto header = split(line, opts.delimiter);
  int col_a = -1, col_b = -1, col_o = -1, col_date = -1;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    const std::string name = lower(trim(header[static_cast<std::size_t>(c)]));
    if (name == "player_a") {
      col_a = c;
    } else if (name == "player_b") {
      col_b = c;
    } else if (name == "outcome") {
      col_o = c;
    } else if (name == "date") {
      col_date = c;
    } else if (name != "game_id") {
      rep.notices.push_back("ignoring unknown column '" + trim(header[static_cast<std::size_t>(c)]) + "'");
    }
  }
  if (col_a < 0 || col_b < 0 || col_o < 0) {
    throw std::runtime_error("missing required columns (player_a, player_b, outcome) in " + path);
  }

  std::int64_t line_no = 1;
  std::int64_t ties = 0;
  bool all_dated = true;
  while (reader.next(line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rep.rows_read++;
    const auto fields = split(line, opts.delimiter);
    const int needed = std::max({col_a, col_b, col_o});
    if (static_cast<int>(fields.size()) <= needed) {
      rep.rejected.push_back({line_no, "too few fields"});
      continue;
    }
    const std::string a = trim(fields[static_cast<std::size_t>(col_a)]);
    const std::string b = trim(fields[static_cast<std::size_t>(col_b)]);
    if (a.empty() || b.empty()) {
      rep.rejected.push_back({line_no, "empty player label"});
      continue;
    }
    if (a == b) {
      rep.rejected.push_back({line_no, "self-match"});
      continue;
    }
    const auto outcome = parse_outcome(fields[static_cast<std::size_t>(col_o)]);
    if (!outcome) {
      rep.rejected.push_back(
          {line_no, "unparsable outcome '" + trim(fields[static_cast<std::size_t>(col_o)]) + "'"});
      continue;
    }
    std::int64_t order = -1;
    if (col_date >= 0 && col_date < static_cast<int>(fields.size())) {
      const std::string dt = trim(fields[static_cast<std::size_t>(col_date)]);
      if (!dt.empty()) {
        const auto days = parse_date_days(dt);
        if (!days) {
          rep.rejected.push_back({line_no, "unparsable date '" + dt + "'"});
          continue;
        }
        order = *days;
      } else {
        all_dated = false;
      }
    } else {
      all_dated = false;
    }

    const int ia = res.pop.add(a);
    const int ib = res.pop.add(b);
    res.matches.push_back(MatchRecord{static_cast<std::int32_t>(ia),
                                      static_cast<std::int32_t>(ib), *outcome, order});
    res.pop.bump_match_count(ia);
    res.pop.bump_match_count(ib);
    if (*outcome == Outcome::kTie) ++ties;
  }

  rep.rows_accepted = static_cast<std::int64_t>(res.matches.size());
  rep.rows_rejected = static_cast<std::int64_t>(rep.rejected.size());
  rep.players = res.pop.size();
  rep.n_matches = rep.rows_accepted;
  rep.tie_rate = rep.rows_accepted > 0
                     ? static_cast<double>(ties) / static_cast<double>(rep.rows_accepted)
                     : 0.0;
  rep.has_dates = all_dated && rep.rows_accepted > 0;
  if (!rep.has_dates) {
    rep.notices.push_back("no complete date column; file order is the play order");
  }
  for (std::int64_t c : res.pop.match_counts()) rep.games_histogram[c]++;
  rep.connectivity = connectivity(res.matches, res.pop);
  return res;
}

void write_matches(const std::string& path, const Population& pop,
                   const std::vector<MatchRecord>& matches) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "player_a,player_b,outcome\n";
  for (const auto& m : matches) {
    out << pop.label(m.first) << ',' << pop.label(m.second) << ','
        << outcome_code(m.outcome) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<MatchRecord> experience_window_filter(const std::vector<MatchRecord>& matches,
                                                  int population_size,
                                                  const ExperienceWindowOptions& opts) {
  if (opts.lo > opts.hi) throw std::domain_error("experience window: lo > hi");
  std::vector<std::int64_t> played(static_cast<std::size_t>(population_size), 0);
  std::vector<MatchRecord> kept;
  for (const auto& m : matches) {
    const std::int64_t ca = played[static_cast<std::size_t>(m.first)];
    const std::int64_t cb = played[static_cast<std::size_t>(m.second)];
    const bool qa = ca >= opts.lo && ca <= opts.hi;
    const bool qb = cb >= opts.lo && cb <= opts.hi;
    if (opts.require_both ? (qa && qb) : (qa || qb)) kept.push_back(m);
    // Experience accrues from every match, kept or not.
    played[static_cast<std::size_t>(m.first)]++;
    played[static_cast<std::size_t>(m.second)]++;
  }
  return kept;
}

BalanceReport balance_report(const std::vector<MatchRecord>& matches, const Population& pop) {
  const int A = pop.size();
  BalanceReport rep;
  rep.games_per_player.assign(static_cast<std::size_t>(A), 0);
  std::unordered_set<std::int64_t> pairs;
  for (const auto& m : matches) {
    rep.games_per_player[static_cast<std::size_t>(m.first)]++;
    rep.games_per_player[static_cast<std::size_t>(m.second)]++;
    const std::int64_t lo = std::min(m.first, m.second);
    const std::int64_t hi = std::max(m.first, m.second);
    pairs.insert(lo * static_cast<std::int64_t>(A) + hi);
  }
  const double n = static_cast<double>(A);
  rep.mean_games = A > 0 ? 2.0 * static_cast<double>(matches.size()) / n : 0.0;
  rep.pair_coverage =
      A >= 2 ? static_cast<double>(pairs.size()) / (n * (n - 1.0) / 2.0) : 0.0;

  // Gini over per-player counts (sorted formula).
  std::vector<std::int64_t> sorted = rep.games_per_player;
  std::sort(sorted.begin(), sorted.end());
  double cum = 0.0, weighted = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cum += static_cast<double>(sorted[i]);
    weighted += static_cast<double>(i + 1) * static_cast<double>(sorted[i]);
  }
  if (cum > 0.0 && A > 1) {
    rep.gini = (2.0 * weighted) / (n * cum) - (n + 1.0) / n;
  }
  return rep;
}

}  // namespace ludo
