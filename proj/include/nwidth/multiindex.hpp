#pragma once

// Sparse multi-indices over 1-based coordinates, index sets with a
// downward-closure flag, deterministic n-term selection and lp tail bounds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "nwidth/errors.hpp"

namespace nwidth {

// Finitely supported sequence of nonnegative integer exponents. Zero entries
// are never stored, so equality of the entry lists is equality of indices.
class MultiIndex {
 public:
  using Entry = std::pair<int, int>;  // (coordinate j >= 1, exponent >= 1)

  MultiIndex() = default;

  MultiIndex(std::initializer_list<Entry> entries)
      : MultiIndex(std::vector<Entry>(entries)) {}

  explicit MultiIndex(std::vector<Entry> entries) {
    for (const auto& [j, e] : entries) {
      if (j < 1) throw PreconditionError("multi-index coordinate must be >= 1");
      if (e < 0) throw PreconditionError("multi-index exponent must be >= 0");
    }
    std::erase_if(entries, [](const Entry& p) { return p.second == 0; });
    std::sort(entries.begin(), entries.end());
    for (std::size_t i = 1; i < entries.size(); ++i) {
      if (entries[i].first == entries[i - 1].first)
        throw PreconditionError("duplicate coordinate in multi-index");
    }
    entries_ = std::move(entries);
  }

  static MultiIndex unit(int j) { return MultiIndex{{j, 1}}; }

  const std::vector<Entry>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }
  int support_size() const { return static_cast<int>(entries_.size()); }

  int degree() const {
    int d = 0;
    for (const auto& [j, e] : entries_) d += e;
    return d;
  }

  int exponent(int j) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(),
                               Entry{j, 0});
    return (it != entries_.end() && it->first == j) ? it->second : 0;
  }

  int max_coordinate() const {
    return entries_.empty() ? 0 : entries_.back().first;
  }

  // nu + e_j
  MultiIndex raised(int j) const {
    std::vector<Entry> out = entries_;
    auto it = std::lower_bound(out.begin(), out.end(), Entry{j, 0});
    if (it != out.end() && it->first == j)
      ++it->second;
    else
      out.insert(it, Entry{j, 1});
    MultiIndex r;
    r.entries_ = std::move(out);
    return r;
  }

  // nu - e_j; requires nu_j >= 1
  MultiIndex lowered(int j) const {
    std::vector<Entry> out = entries_;
    auto it = std::lower_bound(out.begin(), out.end(), Entry{j, 0});
    if (it == out.end() || it->first != j)
      throw PreconditionError("cannot lower coordinate with zero exponent");
    if (--it->second == 0) out.erase(it);
    MultiIndex r;
    r.entries_ = std::move(out);
    return r;
  }

  bool operator==(const MultiIndex&) const = default;

  // Wire format: sorted "j:e" pairs joined by commas; the zero index is "0".
  std::string str() const {
    if (entries_.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(entries_[i].first);
      s += ':';
      s += std::to_string(entries_[i].second);
    }
    return s;
  }

  static MultiIndex parse(const std::string& text) {
    if (text == "0") return MultiIndex{};
    std::vector<Entry> entries;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto colon = item.find(':');
      if (colon == std::string::npos)
        throw PreconditionError("malformed multi-index token '" + item + "'");
      entries.emplace_back(std::stoi(item.substr(0, colon)),
                           std::stoi(item.substr(colon + 1)));
    }
    return MultiIndex(std::move(entries));
  }

 private:
  std::vector<Entry> entries_;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& nu) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (const auto& [j, e] : nu.entries()) {
      h = (h ^ static_cast<std::uint64_t>(j)) * 1099511628211ull;
      h = (h ^ static_cast<std::uint64_t>(e)) * 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Canonical selection order: total degree ascending, then the index whose
// first differing coordinate (scanning j upward) carries the larger exponent
// precedes. Within one degree this lists e1 before e2 and x1^2 before x1*x2.
inline bool graded_before(const MultiIndex& a, const MultiIndex& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  std::size_t ia = 0, ib = 0;
  while (ia < ea.size() && ib < eb.size()) {
    if (ea[ia].first != eb[ib].first)
      return ea[ia].first < eb[ib].first;  // earlier support, nonzero vs zero
    if (ea[ia].second != eb[ib].second) return ea[ia].second > eb[ib].second;
    ++ia, ++ib;
  }
  return ia < ea.size();
}

// Ordered list of distinct multi-indices. The flag is an upward promise: when
// true, every coordinatewise-smaller index of a member is also a member.
class IndexSet {
 public:
  IndexSet() = default;

  IndexSet(std::vector<MultiIndex> members, bool downward_closed)
      : members_(std::move(members)), downward_closed_(downward_closed) {
    for (const auto& nu : members_) {
      if (!lookup_.insert(nu).second)
        throw PreconditionError("duplicate index in set: " + nu.str());
    }
  }

  const std::vector<MultiIndex>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool downward_closed() const { return downward_closed_; }
  bool contains(const MultiIndex& nu) const { return lookup_.count(nu) > 0; }

 private:
  std::vector<MultiIndex> members_;
  std::unordered_set<MultiIndex, MultiIndexHash> lookup_;
  bool downward_closed_ = false;
};

inline int total_degree(const MultiIndex& nu) { return nu.degree(); }

// |nu|! / prod_j nu_j!  (the multinomial count). Computed exactly in 128-bit
// integer arithmetic as a product of binomials, falling back to lgamma when
// the product overflows. The degree cap guards factorial growth.
inline double factorial_ratio(const MultiIndex& nu, int degree_cap = 40) {
  const int total = nu.degree();
  if (total > degree_cap)
    throw DegreeCapError("multi-index degree " + std::to_string(total) +
                             " exceeds cap " + std::to_string(degree_cap),
                         total, degree_cap);
  unsigned __int128 acc = 1;
  bool exact = true;
  int running = 0;
  for (const auto& [j, e] : nu.entries()) {
    running += e;
    // C(running, e), exact divide-as-you-go
    unsigned __int128 c = 1;
    for (int i = 1; i <= e; ++i) {
      c = c * static_cast<unsigned>(running - e + i) / static_cast<unsigned>(i);
    }
    const unsigned __int128 limit = ~static_cast<unsigned __int128>(0);
    if (c != 0 && acc > limit / c) {
      exact = false;
      break;
    }
    acc *= c;
  }
  if (exact) return static_cast<double>(acc);
  double log_val = std::lgamma(total + 1.0);
  for (const auto& [j, e] : nu.entries()) log_val -= std::lgamma(e + 1.0);
  return std::exp(log_val);
}

// (sum |x_k|^p)^(1/p), the lp quasi-norm for 0 < p <= 1 (also fine for p > 1).
inline double lp_quasinorm(const std::vector<double>& xs, double p) {
  if (p <= 0) throw DomainError("lp quasi-norm requires p > 0");
  double s = 0;
  for (double x : xs) s += std::pow(std::abs(x), p);
  return std::pow(s, 1.0 / p);
}

// Exhaustive downward-closure check; intended for sets up to ~1e4 members.
inline bool is_downward_closed(const std::vector<MultiIndex>& members) {
  std::unordered_set<MultiIndex, MultiIndexHash> lookup(members.begin(),
                                                        members.end());
  for (const auto& nu : members) {
    for (const auto& [j, e] : nu.entries()) {
      if (!lookup.count(nu.lowered(j))) return false;
    }
  }
  return true;
}

// All indices supported on {1..J} with |nu| <= max_degree and
// weight_bound(nu) >= threshold. The weight must be nonincreasing under
// coordinatewise increase; children of pruned parents are never visited, so a
// monotone weight makes the result downward closed. Monotonicity is
// spot-checked on every visited parent/child pair.
inline IndexSet enumerate_indices(
    int J, int max_degree,
    const std::function<double(const MultiIndex&)>& weight_bound,
    double threshold, std::size_t max_count = 5'000'000) {
  if (J < 1) throw ConfigError("enumerate_indices requires J >= 1");
  if (max_degree < 0) throw ConfigError("enumerate_indices requires max_degree >= 0");
  if (threshold < 0) throw ConfigError("enumerate_indices requires threshold >= 0");

  std::vector<MultiIndex> members;
  std::vector<std::pair<MultiIndex, double>> layer;  // kept indices + weights
  const MultiIndex zero;
  const double w0 = weight_bound(zero);
  if (w0 >= threshold) {
    members.push_back(zero);
    layer.emplace_back(zero, w0);
  }
  for (int d = 1; d <= max_degree && !layer.empty(); ++d) {
    std::unordered_set<MultiIndex, MultiIndexHash> seen;
    std::vector<std::pair<MultiIndex, double>> next;
    for (const auto& [parent, wp] : layer) {
      for (int j = 1; j <= J; ++j) {
        MultiIndex child = parent.raised(j);
        if (!seen.insert(child).second) continue;
        const double wc = weight_bound(child);
        if (wc > wp * (1 + 1e-12) + 1e-300)
          throw ConfigError("non-monotone weight bound detected between " +
                            parent.str() + " and " + child.str());
        if (wc >= threshold) next.emplace_back(child, wc);
      }
    }
    std::sort(next.begin(), next.end(), [](const auto& a, const auto& b) {
      return graded_before(a.first, b.first);
    });
    for (const auto& [nu, w] : next) members.push_back(nu);
    if (members.size() > max_count)
      throw DomainError("index enumeration exceeded " +
                        std::to_string(max_count) + " members");
    layer = std::move(next);
  }
  return IndexSet(std::move(members), true);
}

// The n indices of largest value; ties broken by the canonical graded order so
// results are reproducible. n >= map size returns everything.
inline IndexSet n_term_select(
    const std::vector<std::pair<MultiIndex, double>>& norms, std::size_t n) {
  std::vector<std::pair<MultiIndex, double>> sorted = norms;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return graded_before(a.first, b.first);
  });
  if (n < sorted.size()) sorted.resize(n);
  std::vector<MultiIndex> members;
  members.reserve(sorted.size());
  for (auto& [nu, v] : sorted) members.push_back(std::move(nu));
  return IndexSet(std::move(members), false);
}

struct StechkinResult {
  double tail_sum;  // sum of values outside the n-term selection
  double bound;     // ||values||_lp * n^{-(1/p - 1)}
};

// Best n-term tail against the lp-quasi-norm bound, 0 < p < 1.
inline StechkinResult stechkin_tail(
    const std::vector<std::pair<MultiIndex, double>>& norms, double p,
    std::size_t n) {
  if (!(p > 0 && p < 1)) throw DomainError("stechkin_tail requires p in (0,1)");
  if (n < 1) throw PreconditionError("stechkin_tail requires n >= 1");
  IndexSet selected = n_term_select(norms, n);
  double tail = 0;
  std::vector<double> values;
  values.reserve(norms.size());
  for (const auto& [nu, v] : norms) {
    values.push_back(v);
    if (!selected.contains(nu)) tail += v;
  }
  const double bound =
      lp_quasinorm(values, p) * std::pow(static_cast<double>(n), -(1.0 / p - 1.0));
  return {tail, bound};
}

// Partial sums of [n^t d_n]^p / n, n = 1..len(d_seq). Bounded growth of the
// sums indicates the corresponding Lorentz-type summability at this scale.
inline std::vector<double> lorentz_partial_sums(const std::vector<double>& d_seq,
                                                double t, double p) {
  if (t < 0) throw DomainError("lorentz_partial_sums requires t >= 0");
  if (p <= 0) throw DomainError("lorentz_partial_sums requires p > 0");
  std::vector<double> sums;
  sums.reserve(d_seq.size());
  double acc = 0;
  for (std::size_t i = 0; i < d_seq.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    acc += std::pow(std::pow(n, t) * d_seq[i], p) / n;
    sums.push_back(acc);
  }
  return sums;
}

}  // namespace nwidth
