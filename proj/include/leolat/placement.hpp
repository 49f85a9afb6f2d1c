#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "leolat/coverage.hpp"
#include "leolat/errors.hpp"
#include "leolat/geomath.hpp"

namespace leolat {

// Fixed-width bit row; one bit per event.
class BitRow {
 public:
  BitRow() = default;
  explicit BitRow(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

  std::size_t size() const { return bits_; }
  bool test(std::size_t j) const { return (words_[j >> 6] >> (j & 63)) & 1u; }
  void set(std::size_t j) { words_[j >> 6] |= std::uint64_t{1} << (j & 63); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  // |this \ covered|
  std::size_t count_outside(const BitRow& covered) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) c += static_cast<std::size_t>(std::popcount(words_[i] & ~covered.words_[i]));
    return c;
  }
  bool intersects(const BitRow& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }
  BitRow& operator|=(const BitRow& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  friend bool operator==(const BitRow&, const BitRow&) = default;

 private:
  std::size_t bits_ = 0;
  std::vector<std::uint64_t> words_;
};

// A[i][j] = 1 when candidate i covers event j.
struct CoverageMatrix {
  std::vector<std::string> candidate_ids;
  std::vector<int> event_ids;
  std::vector<BitRow> rows;

  std::size_t num_candidates() const { return rows.size(); }
  std::size_t num_events() const { return event_ids.size(); }
  bool at(std::size_t i, std::size_t j) const { return rows[i].test(j); }

  std::size_t index_of(const std::string& id) const {
    for (std::size_t i = 0; i < candidate_ids.size(); ++i)
      if (candidate_ids[i] == id) return i;
    throw DomainError("unknown candidate id '" + id + "'");
  }

  // Matrix from explicit 0/1 rows; candidate ids default to c0, c1, ...
  static CoverageMatrix from_rows(const std::vector<std::vector<int>>& a, std::vector<std::string> ids = {}) {
    CoverageMatrix m;
    const std::size_t cols = a.empty() ? 0 : a.front().size();
    if (ids.empty())
      for (std::size_t i = 0; i < a.size(); ++i) ids.push_back("c" + std::to_string(i));
    m.candidate_ids = std::move(ids);
    m.event_ids.resize(cols);
    std::iota(m.event_ids.begin(), m.event_ids.end(), 0);
    for (const auto& r : a) {
      if (r.size() != cols) throw DomainError("coverage matrix rows differ in length");
      BitRow row(cols);
      for (std::size_t j = 0; j < cols; ++j)
        if (r[j]) row.set(j);
      m.rows.push_back(std::move(row));
    }
    return m;
  }
};

inline CoverageMatrix build_coverage_matrix(const std::vector<GroundStation>& candidates,
                                            const std::vector<GeoPoint>& events, double altitude_km) {
  if (candidates.empty() || events.empty()) throw DomainError("coverage matrix needs candidates and events");
  CoverageMatrix m;
  std::set<std::string> seen;
  for (const auto& c : candidates) {
    c.validate();
    if (!seen.insert(c.id).second) throw DomainError("duplicate candidate id '" + c.id + "'");
    m.candidate_ids.push_back(c.id);
  }
  m.event_ids.resize(events.size());
  std::iota(m.event_ids.begin(), m.event_ids.end(), 0);
  m.rows.assign(candidates.size(), BitRow(events.size()));
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double alpha = coverage_central_angle(altitude_km, candidates[i].min_elevation_deg);
    for (std::size_t j = 0; j < events.size(); ++j)
      if (central_angle(events[j], candidates[i].location) <= alpha) m.rows[i].set(j);
  }
  return m;
}

struct PlacementProblem {
  CoverageMatrix matrix;
  int k = 1;
  std::set<std::string> forced;
};

struct PlacementResult {
  std::vector<std::string> selected;  // sorted by id
  std::size_t covered_count = 0;
  bool optimal = false;
};

inline std::size_t evaluate_selection(const CoverageMatrix& matrix, const std::vector<std::string>& selected) {
  BitRow covered(matrix.num_events());
  for (const auto& id : selected) covered |= matrix.rows[matrix.index_of(id)];
  return covered.count();
}

namespace detail {

// Problem re-indexed so that position order equals id order; ties and
// lexicographic comparisons then work on positions.
struct IndexedProblem {
  std::vector<std::size_t> order;  // position -> original row
  std::vector<BitRow> rows;        // by position
  std::vector<bool> forced;        // by position
  std::size_t events = 0;
  int k = 0;
  int num_forced = 0;
};

inline IndexedProblem index_problem(const PlacementProblem& p) {
  const auto& m = p.matrix;
  const int n = static_cast<int>(m.num_candidates());
  if (p.k < 0 || p.k > n) throw DomainError("placement: k must lie in [0, number of candidates]");
  if (static_cast<int>(p.forced.size()) > p.k) throw DomainError("placement: more forced stations than k");
  {
    std::set<std::string> ids(m.candidate_ids.begin(), m.candidate_ids.end());
    if (ids.size() != m.candidate_ids.size()) throw DomainError("placement: duplicate candidate ids");
  }
  IndexedProblem ip;
  ip.order.resize(m.num_candidates());
  std::iota(ip.order.begin(), ip.order.end(), 0);
  std::sort(ip.order.begin(), ip.order.end(),
            [&](std::size_t a, std::size_t b) { return m.candidate_ids[a] < m.candidate_ids[b]; });
  for (std::size_t pos : ip.order) ip.rows.push_back(m.rows[pos]);
  ip.forced.assign(m.num_candidates(), false);
  for (const auto& id : p.forced) {
    const std::size_t orig = m.index_of(id);
    const auto pos = static_cast<std::size_t>(std::find(ip.order.begin(), ip.order.end(), orig) - ip.order.begin());
    ip.forced[pos] = true;
  }
  ip.events = m.num_events();
  ip.k = p.k;
  ip.num_forced = static_cast<int>(p.forced.size());
  return ip;
}

inline PlacementResult to_result(const PlacementProblem& p, const IndexedProblem& ip,
                                 const std::vector<std::size_t>& positions, bool optimal) {
  PlacementResult r;
  for (std::size_t pos : positions) r.selected.push_back(p.matrix.candidate_ids[ip.order[pos]]);
  std::sort(r.selected.begin(), r.selected.end());
  r.covered_count = evaluate_selection(p.matrix, r.selected);
  r.optimal = optimal;
  return r;
}

inline BitRow forced_cover(const IndexedProblem& ip) {
  BitRow c(ip.events);
  for (std::size_t i = 0; i < ip.rows.size(); ++i)
    if (ip.forced[i]) c |= ip.rows[i];
  return c;
}

// Greedy completion in position order: most new events first, lowest position on ties.
inline std::vector<std::size_t> greedy_positions(const IndexedProblem& ip) {
  std::vector<std::size_t> chosen;
  std::vector<bool> used = ip.forced;
  for (std::size_t i = 0; i < ip.rows.size(); ++i)
    if (ip.forced[i]) chosen.push_back(i);
  BitRow covered = forced_cover(ip);
  while (static_cast<int>(chosen.size()) < ip.k) {
    std::size_t best = ip.rows.size();
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < ip.rows.size(); ++i) {
      if (used[i]) continue;
      const std::size_t g = ip.rows[i].count_outside(covered);
      if (best == ip.rows.size() || g > best_gain) {
        best = i;
        best_gain = g;
      }
    }
    used[best] = true;
    chosen.push_back(best);
    covered |= ip.rows[best];
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

// Upper bound on coverage reachable by adding `picks` rows from `avail`:
// the smaller of the top-`picks` marginal gains and the union of all of them.
inline std::size_t coverage_bound(const IndexedProblem& ip, const BitRow& covered, std::size_t covered_count,
                                  const std::vector<std::size_t>& avail, int picks, std::vector<std::size_t>& gains) {
  if (picks <= 0 || avail.empty()) return covered_count;
  gains.clear();
  BitRow all = covered;
  for (std::size_t i : avail) {
    gains.push_back(ip.rows[i].count_outside(covered));
    all |= ip.rows[i];
  }
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(picks), gains.size());
  std::partial_sort(gains.begin(), gains.begin() + static_cast<std::ptrdiff_t>(take), gains.end(),
                    std::greater<>());
  std::size_t top = 0;
  for (std::size_t i = 0; i < take; ++i) top += gains[i];
  return std::min(covered_count + top, all.count());
}

class BranchAndBound {
 public:
  BranchAndBound(const IndexedProblem& ip, std::uint64_t node_budget) : ip_(ip), node_limit_(node_budget) {}

  bool exhausted() const { return nodes_ > node_limit_; }
  std::uint64_t nodes() const { return nodes_; }

  // Optimal coverage value, searched with most-gain-first branching.
  std::size_t optimum(std::size_t incumbent) {
    best_ = incumbent;
    BitRow covered = forced_cover(ip_);
    std::vector<std::size_t> avail;
    for (std::size_t i = 0; i < ip_.rows.size(); ++i)
      if (!ip_.forced[i]) avail.push_back(i);
    value_search(covered, covered.count(), avail, ip_.k - ip_.num_forced);
    return best_;
  }

 private:
  void value_search(const BitRow& covered, std::size_t count, std::vector<std::size_t> avail, int picks) {
    if (++nodes_ > node_limit_) return;
    best_ = std::max(best_, count);
    if (picks == 0 || avail.empty()) return;
    std::vector<std::size_t> gains;
    if (coverage_bound(ip_, covered, count, avail, picks, gains) <= best_) return;
    std::size_t pick = 0;
    std::size_t pick_gain = 0;
    for (std::size_t a = 0; a < avail.size(); ++a) {
      const std::size_t g = ip_.rows[avail[a]].count_outside(covered);
      if (g > pick_gain) {
        pick_gain = g;
        pick = a;
      }
    }
    if (pick_gain == 0) return;
    const std::size_t c = avail[pick];
    avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(pick));
    BitRow with = covered;
    with |= ip_.rows[c];
    value_search(with, count + pick_gain, avail, picks - 1);
    value_search(covered, count, std::move(avail), picks);
  }

  const IndexedProblem& ip_;
  std::uint64_t node_limit_;
  std::uint64_t nodes_ = 0;
  std::size_t best_ = 0;
};

// Candidates that share no event never interact, so the optimum splits into
// per-component tables best[j] (j stations inside the component) joined by a
// knapsack over station counts.
class ComponentSolver {
 public:
  static constexpr std::size_t kInfeasible = static_cast<std::size_t>(-1);

  ComponentSolver(const IndexedProblem& ip, std::uint64_t node_limit) : ip_(ip), node_limit_(node_limit) {
    const std::size_t n = ip.rows.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (ip.rows[a].intersects(ip.rows[b])) parent[find(a)] = find(b);
    std::vector<std::size_t> slot(n, n);
    comp_of_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = find(i);
      if (slot[r] == n) {
        slot[r] = members_.size();
        members_.emplace_back();
      }
      comp_of_[i] = slot[r];
      members_[slot[r]].push_back(i);
    }
    state_.assign(n, State::Open);
    for (std::size_t i = 0; i < n; ++i)
      if (ip.forced[i]) state_[i] = State::In;
    tables_.resize(members_.size());
    for (std::size_t c = 0; c < members_.size(); ++c) tables_[c] = table(c);
  }

  bool exhausted() const { return nodes_ > node_limit_; }

  std::size_t optimum() const { return combine(); }

  // Lexicographically smallest optimal selection: walk positions in id order
  // and keep a candidate whenever the optimum survives forcing it.
  std::vector<std::size_t> lex_smallest(std::size_t target) {
    int chosen = 0;
    for (State s : state_) chosen += s == State::In;
    for (std::size_t i = 0; i < ip_.rows.size() && chosen < ip_.k && !exhausted(); ++i) {
      if (state_[i] != State::Open) continue;
      const std::size_t c = comp_of_[i];
      state_[i] = State::In;
      tables_[c] = table(c);
      if (combine() == target) {
        ++chosen;
        continue;
      }
      state_[i] = State::Out;
      tables_[c] = table(c);
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ip_.rows.size(); ++i)
      if (state_[i] == State::In) out.push_back(i);
    return out;
  }

 private:
  enum class State { Open, In, Out };

  std::vector<std::size_t> table(std::size_t c) {
    IndexedProblem sub;
    sub.events = ip_.events;
    for (std::size_t i : members_[c]) {
      if (state_[i] == State::Out) continue;
      sub.rows.push_back(ip_.rows[i]);
      sub.forced.push_back(state_[i] == State::In);
      sub.num_forced += state_[i] == State::In;
    }
    BitRow all(ip_.events);
    for (const auto& r : sub.rows) all |= r;
    const std::size_t ceiling = all.count();
    std::vector<std::size_t> best(sub.rows.size() + 1, kInfeasible);
    std::size_t prev = 0;
    for (int j = sub.num_forced; j <= static_cast<int>(sub.rows.size()); ++j) {
      if (prev == ceiling && j > sub.num_forced) {
        best[static_cast<std::size_t>(j)] = ceiling;
        continue;
      }
      sub.k = j;
      const std::vector<std::size_t> g = greedy_positions(sub);
      BitRow cov(ip_.events);
      for (std::size_t p : g) cov |= sub.rows[p];
      const std::size_t budget = node_limit_ >= nodes_ ? node_limit_ - nodes_ : 0;
      BranchAndBound bb(sub, budget);
      prev = bb.optimum(std::max(prev, cov.count()));
      nodes_ += bb.nodes();
      best[static_cast<std::size_t>(j)] = prev;
      if (exhausted()) break;
    }
    return best;
  }

  // Best total with exactly k stations across all components.
  std::size_t combine() const {
    const auto k = static_cast<std::size_t>(ip_.k);
    std::vector<std::size_t> dp(k + 1, kInfeasible);
    dp[0] = 0;
    for (const auto& t : tables_) {
      std::vector<std::size_t> next(k + 1, kInfeasible);
      for (std::size_t have = 0; have <= k; ++have) {
        if (dp[have] == kInfeasible) continue;
        for (std::size_t j = 0; j < t.size() && have + j <= k; ++j)
          if (t[j] != kInfeasible) next[have + j] = std::max(next[have + j] == kInfeasible ? 0 : next[have + j], dp[have] + t[j]);
      }
      dp = std::move(next);
    }
    return dp[k];
  }

  const IndexedProblem& ip_;
  std::uint64_t node_limit_;
  std::uint64_t nodes_ = 0;
  std::vector<std::size_t> comp_of_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<State> state_;
  std::vector<std::vector<std::size_t>> tables_;
};

}  // namespace detail

inline constexpr std::uint64_t kDefaultNodeLimit = 50'000'000;

inline PlacementResult solve_greedy(const PlacementProblem& problem) {
  const detail::IndexedProblem ip = detail::index_problem(problem);
  return detail::to_result(problem, ip, detail::greedy_positions(ip), false);
}

// Exact maximum coverage with exactly k stations, forced ones included.
// Among optimal selections the lexicographically smallest id set is
// returned. If the node budget runs out the best selection found so far is
// returned with `optimal` false.
inline PlacementResult solve_exact(const PlacementProblem& problem, std::uint64_t node_limit = kDefaultNodeLimit) {
  const detail::IndexedProblem ip = detail::index_problem(problem);
  const std::vector<std::size_t> greedy = detail::greedy_positions(ip);
  const PlacementResult greedy_result = detail::to_result(problem, ip, greedy, false);

  detail::ComponentSolver solver(ip, node_limit);
  const std::size_t best = solver.optimum();
  if (solver.exhausted()) return greedy_result;
  const std::vector<std::size_t> positions = solver.lex_smallest(best);
  if (solver.exhausted()) return greedy_result;
  return detail::to_result(problem, ip, positions, true);
}

}  // namespace leolat
