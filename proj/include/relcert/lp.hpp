#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "relcert/error.hpp"
#include "relcert/rational.hpp"

namespace relcert {

enum class Sense { le, ge, eq };

using Term = std::pair<std::uint32_t, Rational>;

struct LPRow {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::eq;
  Rational rhs = 0;
};

/// min c·x subject to rows, x >= 0.
struct LPInstance {
  std::vector<std::string> variables;
  std::vector<LPRow> rows;
  std::vector<Term> objective;
  std::map<std::string, std::string> metadata;

  std::uint32_t add_variable(std::string name) {
    variables.push_back(std::move(name));
    return static_cast<std::uint32_t>(variables.size() - 1);
  }

  void add_row(std::string name, std::vector<Term> terms, Sense sense, Rational rhs) {
    rows.push_back({std::move(name), std::move(terms), sense, std::move(rhs)});
  }

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.terms.size();
    return n;
  }

  void validate() const {
    auto check = [&](const std::vector<Term>& terms) {
      for (const auto& [v, a] : terms)
        if (v >= variables.size()) throw InvariantError("LP term references undeclared variable " + std::to_string(v));
    };
    for (const auto& r : rows) check(r.terms);
    check(objective);
  }
};

enum class LPStatus { optimal, infeasible, unbounded, cap_exceeded };

inline std::string to_string(LPStatus s) {
  switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
    case LPStatus::cap_exceeded: return "cap-exceeded";
  }
  return "?";
}

struct LPSolution {
  LPStatus status = LPStatus::infeasible;
  Rational optimum = 0;               // objective of the assignment (an upper bound when capped)
  std::vector<Rational> assignment;   // empty when no feasible point is known
  std::size_t pivots = 0;
  std::size_t exact_pivots = 0;
};

struct LPOptions {
  /// Find a candidate basis in floating point, then certify it exactly.
  /// When false, the exact Bland simplex runs from the slack basis.
  bool float_warm_start = true;
  std::size_t pivot_cap = 500'000;
  double tolerance = 1e-9;
};

/// Exact feasibility check of a point.
inline bool satisfies(const LPInstance& lp, const std::vector<Rational>& x) {
  if (x.size() != lp.variables.size()) return false;
  for (const auto& v : x)
    if (v < 0) return false;
  for (const auto& r : lp.rows) {
    Rational lhs = 0;
    for (const auto& [v, a] : r.terms) lhs += a * x[v];
    if ((r.sense == Sense::le && lhs > r.rhs) || (r.sense == Sense::ge && lhs < r.rhs) ||
        (r.sense == Sense::eq && lhs != r.rhs))
      return false;
  }
  return true;
}

inline Rational objective_value(const LPInstance& lp, const std::vector<Rational>& x) {
  Rational v = 0;
  for (const auto& [j, c] : lp.objective) v += c * x[j];
  return v;
}

namespace detail {

using SparseCol = std::vector<std::pair<std::uint32_t, Rational>>;

/// A x = b, x >= 0, b >= 0, with slack and artificial columns appended.
struct StandardForm {
  std::size_t m = 0, n_original = 0;
  std::vector<SparseCol> cols;
  std::vector<Rational> b, cost;
  std::vector<char> artificial;
  std::vector<std::uint32_t> initial_basis;

  std::size_t columns() const { return cols.size(); }
};

inline StandardForm standardize(const LPInstance& lp) {
  StandardForm sf;
  sf.m = lp.rows.size();
  sf.n_original = lp.variables.size();
  sf.cols.resize(sf.n_original);
  sf.cost.assign(sf.n_original, Rational(0));
  for (const auto& [j, c] : lp.objective) sf.cost[j] += c;
  sf.b.resize(sf.m);
  std::vector<Sense> sense(sf.m);
  for (std::uint32_t i = 0; i < sf.m; ++i) {
    const auto& r = lp.rows[i];
    bool flip = r.rhs < 0;
    sense[i] = r.sense;
    if (flip && r.sense != Sense::eq) sense[i] = r.sense == Sense::le ? Sense::ge : Sense::le;
    std::map<std::uint32_t, Rational> merged;
    for (const auto& [j, a] : r.terms) merged[j] += a;
    for (auto& [j, a] : merged)
      if (a != 0) sf.cols[j].emplace_back(i, flip ? Rational(-a) : a);
    sf.b[i] = flip ? Rational(-r.rhs) : r.rhs;
  }
  sf.initial_basis.assign(sf.m, 0);
  std::vector<int> needs_artificial;
  for (std::uint32_t i = 0; i < sf.m; ++i) {
    if (sense[i] == Sense::eq) {
      needs_artificial.push_back(static_cast<int>(i));
      continue;
    }
    auto j = static_cast<std::uint32_t>(sf.cols.size());
    sf.cols.push_back({{i, Rational(sense[i] == Sense::le ? 1 : -1)}});
    sf.cost.push_back(0);
    if (sense[i] == Sense::le)
      sf.initial_basis[i] = j;
    else
      needs_artificial.push_back(static_cast<int>(i));
  }
  // Crash: cover an equality row by a column whose other entries all lie in
  // <= rows, provided the <= slacks stay nonnegative. The basis stays
  // triangular, so it is nonsingular and feasible.
  std::vector<Rational> slack_value(sf.m);
  std::vector<char> le_row(sf.m, 0), used(sf.n_original, 0);
  for (std::uint32_t i = 0; i < sf.m; ++i)
    if (sense[i] == Sense::le) {
      le_row[i] = 1;
      slack_value[i] = sf.b[i];
    }
  std::vector<std::vector<std::uint32_t>> row_cols(sf.m);
  for (std::uint32_t j = 0; j < sf.n_original; ++j)
    for (const auto& [i, a] : sf.cols[j]) row_cols[i].push_back(j);
  std::vector<int> uncovered;
  for (int i : needs_artificial) {
    bool covered = false;
    if (sense[i] == Sense::eq) {
      for (auto j : row_cols[i]) {
        if (used[j]) continue;
        Rational pivot;
        bool ok = true;
        for (const auto& [r, a] : sf.cols[j]) {
          if (r == static_cast<std::uint32_t>(i))
            pivot = a;
          else if (!le_row[r])
            ok = false;
        }
        if (!ok) continue;
        Rational value = sf.b[i] / pivot;
        if (value < 0) continue;
        for (const auto& [r, a] : sf.cols[j])
          if (le_row[r] && slack_value[r] - a * value < 0) ok = false;
        if (!ok) continue;
        for (const auto& [r, a] : sf.cols[j])
          if (le_row[r]) slack_value[r] -= a * value;
        used[j] = 1;
        sf.initial_basis[i] = j;
        covered = true;
        break;
      }
    }
    if (!covered) uncovered.push_back(i);
  }
  needs_artificial = std::move(uncovered);
  sf.artificial.assign(sf.cols.size(), 0);
  for (int i : needs_artificial) {
    sf.initial_basis[i] = static_cast<std::uint32_t>(sf.cols.size());
    sf.cols.push_back({{static_cast<std::uint32_t>(i), Rational(1)}});
    sf.cost.push_back(0);
    sf.artificial.push_back(1);
  }
  return sf;
}

/// Solves M z = rhs exactly for a square sparse M given by columns (or its
/// transpose). Markowitz-style pivoting keeps fill low on the near-triangular
/// bases these LPs produce. Returns nullopt when M is singular.
inline std::optional<std::vector<Rational>> exact_solve(const std::vector<const SparseCol*>& columns, std::size_t m,
                                                        std::vector<Rational> rhs, bool transpose) {
  using Row = std::vector<std::pair<std::uint32_t, Rational>>;
  std::vector<Row> rows(m);
  for (std::uint32_t c = 0; c < columns.size(); ++c)
    for (const auto& [r, a] : *columns[c]) {
      if (transpose)
        rows[c].emplace_back(r, a);
      else
        rows[r].emplace_back(c, a);
    }
  for (auto& r : rows) std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::vector<std::uint32_t>> col_rows(m);
  for (std::uint32_t r = 0; r < m; ++r)
    for (const auto& e : rows[r]) col_rows[e.first].push_back(r);
  std::vector<char> row_done(m, 0), col_done(m, 0);
  std::vector<std::uint32_t> col_count(m);
  for (std::uint32_t c = 0; c < m; ++c) col_count[c] = static_cast<std::uint32_t>(col_rows[c].size());

  std::vector<std::pair<std::uint32_t, std::uint32_t>> order;  // (row, col)
  order.reserve(m);
  auto find = [](const Row& row, std::uint32_t c) -> const Rational* {
    auto it = std::lower_bound(row.begin(), row.end(), c, [](const auto& e, std::uint32_t v) { return e.first < v; });
    return (it != row.end() && it->first == c) ? &it->second : nullptr;
  };

  for (std::size_t step = 0; step < m; ++step) {
    std::uint32_t best_c = static_cast<std::uint32_t>(m);
    for (std::uint32_t c = 0; c < m; ++c)
      if (!col_done[c] && (best_c == m || col_count[c] < col_count[best_c])) {
        best_c = c;
        if (col_count[c] <= 1) break;
      }
    if (best_c == m || col_count[best_c] == 0) return std::nullopt;
    std::uint32_t best_r = static_cast<std::uint32_t>(m);
    for (auto r : col_rows[best_c]) {
      if (row_done[r] || !find(rows[r], best_c)) continue;
      if (best_r == m || rows[r].size() < rows[best_r].size()) best_r = r;
    }
    if (best_r == m) return std::nullopt;
    const Row& prow = rows[best_r];
    Rational pivot = *find(prow, best_c);
    row_done[best_r] = 1;
    col_done[best_c] = 1;
    order.emplace_back(best_r, best_c);
    for (const auto& e : prow) --col_count[e.first];
    std::vector<std::uint32_t> targets;
    for (auto r : col_rows[best_c])
      if (!row_done[r] && find(rows[r], best_c)) targets.push_back(r);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (auto r : targets) {
      Rational factor = *find(rows[r], best_c) / pivot;
      Row merged;
      merged.reserve(rows[r].size() + prow.size());
      auto i = rows[r].begin();
      auto j = prow.begin();
      while (i != rows[r].end() || j != prow.end()) {
        if (j == prow.end() || (i != rows[r].end() && i->first < j->first)) {
          merged.push_back(*i++);
        } else if (i == rows[r].end() || j->first < i->first) {
          if (!col_done[j->first]) {
            merged.emplace_back(j->first, -factor * j->second);
            ++col_count[j->first];
            col_rows[j->first].push_back(r);
          }
          ++j;
        } else {
          if (i->first != best_c) {
            Rational v = i->second - factor * j->second;
            if (v != 0)
              merged.emplace_back(i->first, std::move(v));
            else
              --col_count[i->first];
          }
          ++i;
          ++j;
        }
      }
      rows[r] = std::move(merged);
      rhs[r] -= factor * rhs[best_r];
    }
  }
  std::vector<Rational> z(m);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto [r, c] = *it;
    Rational acc = rhs[r];
    Rational pivot = 0;
    for (const auto& [cc, a] : rows[r]) {
      if (cc == c)
        pivot = a;
      else
        acc -= a * z[cc];
    }
    z[c] = acc / pivot;
  }
  return z;
}

struct BasisCheck {
  bool solved = false;
  bool primal_feasible = false;
  bool dual_feasible = false;
  std::vector<Rational> x_basic;
  std::vector<Rational> y;
};

/// Exact primal and dual feasibility of a basis. Nonbasic columns in `fixed`
/// are pinned at zero, so their reduced costs are irrelevant; basic ones must
/// sit at exactly zero.
inline BasisCheck check_basis(const StandardForm& sf, const std::vector<std::uint32_t>& basis,
                              const std::vector<Rational>& cost, const std::vector<char>& fixed) {
  BasisCheck out;
  std::vector<const SparseCol*> cols;
  for (auto j : basis) cols.push_back(&sf.cols[j]);
  auto x = exact_solve(cols, sf.m, sf.b, false);
  if (!x) return out;
  std::vector<Rational> cb(sf.m);
  for (std::size_t i = 0; i < sf.m; ++i) cb[i] = cost[basis[i]];
  auto y = exact_solve(cols, sf.m, cb, true);
  if (!y) return out;
  out.solved = true;
  out.primal_feasible = true;
  for (std::size_t i = 0; i < sf.m; ++i)
    if ((*x)[i] < 0 || (fixed[basis[i]] && (*x)[i] != 0)) out.primal_feasible = false;
  std::vector<char> in_basis(sf.columns(), 0);
  for (auto j : basis) in_basis[j] = 1;
  out.dual_feasible = true;
  for (std::size_t j = 0; j < sf.columns() && out.dual_feasible; ++j) {
    if (in_basis[j] || fixed[j]) continue;
    Rational d = cost[j];
    for (const auto& [i, a] : sf.cols[j]) d -= (*y)[i] * a;
    if (d < 0) out.dual_feasible = false;
  }
  out.x_basic = std::move(*x);
  out.y = std::move(*y);
  return out;
}

enum class PhaseStatus { optimal, unbounded, cap, failed };

/// Revised simplex with Bland's rule in exact arithmetic. `fixed` columns may
/// not enter and leave at ratio zero whenever they are basic.
inline PhaseStatus exact_bland(const StandardForm& sf, const std::vector<Rational>& cost,
                               std::vector<std::uint32_t>& basis, const std::vector<char>& fixed, std::size_t cap,
                               std::size_t& pivots) {
  std::vector<char> in_basis(sf.columns(), 0);
  for (auto j : basis) in_basis[j] = 1;
  while (true) {
    std::vector<const SparseCol*> cols;
    for (auto j : basis) cols.push_back(&sf.cols[j]);
    auto x = exact_solve(cols, sf.m, sf.b, false);
    std::vector<Rational> cb(sf.m);
    for (std::size_t i = 0; i < sf.m; ++i) cb[i] = cost[basis[i]];
    auto y = exact_solve(cols, sf.m, cb, true);
    if (!x || !y) return PhaseStatus::failed;
    std::optional<std::uint32_t> entering;
    for (std::uint32_t j = 0; j < sf.columns(); ++j) {
      if (in_basis[j] || fixed[j]) continue;
      Rational d = cost[j];
      for (const auto& [i, a] : sf.cols[j]) d -= (*y)[i] * a;
      if (d < 0) {
        entering = j;
        break;
      }
    }
    if (!entering) return PhaseStatus::optimal;
    if (pivots >= cap) return PhaseStatus::cap;
    std::vector<Rational> aq(sf.m);
    for (const auto& [i, a] : sf.cols[*entering]) aq[i] = a;
    auto d = exact_solve(cols, sf.m, aq, false);
    if (!d) return PhaseStatus::failed;
    std::optional<std::size_t> leave;
    Rational best;
    for (std::size_t i = 0; i < sf.m; ++i) {
      const auto& di = (*d)[i];
      std::optional<Rational> ratio;
      if (fixed[basis[i]] && di != 0)
        ratio = Rational(0);
      else if (di > 0)
        ratio = (*x)[i] / di;
      if (!ratio) continue;
      if (!leave || *ratio < best || (*ratio == best && basis[i] < basis[*leave])) {
        leave = i;
        best = *ratio;
      }
    }
    if (!leave) return PhaseStatus::unbounded;
    in_basis[basis[*leave]] = 0;
    basis[*leave] = *entering;
    in_basis[*entering] = 1;
    ++pivots;
  }
}

/// Floating-point revised simplex (Devex pricing, Bland when stalled) over a
/// sparse LU of the basis with product-form updates. Only its final basis is
/// used; the caller certifies it exactly.
class FloatSimplex {
 public:
  FloatSimplex(const StandardForm& sf, double tol) : sf_(sf), tol_(tol), m_(sf.m) {
    a_.resize(sf.columns());
    rows_.resize(m_);
    for (std::size_t j = 0; j < sf.columns(); ++j)
      for (const auto& [i, v] : sf.cols[j]) {
        a_[j].emplace_back(i, v.convert_to<double>());
        rows_[i].emplace_back(j, v.convert_to<double>());
      }
    b_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) b_[i] = sf.b[i].convert_to<double>();
  }

  PhaseStatus run(const std::vector<double>& cost, std::vector<std::uint32_t>& basis, const std::vector<char>& fixed,
                  std::size_t cap, std::size_t& pivots) {
    basis_ = &basis;
    const std::size_t n = a_.size();
    in_basis_.assign(n, 0);
    for (auto j : basis) in_basis_[j] = 1;
    if (!refactor()) return PhaseStatus::failed;
    std::vector<double> dj(n), weight(n, 1.0), alpha(m_), rho(m_), er(m_), row(n, 0.0);
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> touched;
    auto reprice = [&] {
      std::vector<double> cb(m_), y(m_);
      for (std::size_t i = 0; i < m_; ++i) cb[i] = cost[basis[i]];
      btran(cb, y);
      for (std::size_t j = 0; j < n; ++j) {
        if (in_basis_[j]) {
          dj[j] = 0;
          continue;
        }
        double v = cost[j];
        for (const auto& [i, a] : a_[j]) v -= y[i] * a;
        dj[j] = v;
      }
    };
    reprice();
    double last_obj = std::numeric_limits<double>::infinity();
    std::size_t stall = 0;
    bool bland = false, fresh = true;
    while (true) {
      double obj = 0;
      for (std::size_t i = 0; i < m_; ++i) obj += cost[basis[i]] * x_[i];
      if (obj < last_obj - tol_) {
        last_obj = obj;
        stall = 0;
        bland = false;
      } else if (++stall > 50) {
        bland = true;
      }
      std::optional<std::uint32_t> entering;
      double best = 0;
      for (std::uint32_t j = 0; j < n; ++j) {
        if (in_basis_[j] || fixed[j] || dj[j] >= -tol_) continue;
        if (bland) {
          entering = j;
          break;
        }
        double score = dj[j] * dj[j] / weight[j];
        if (!entering || score > best) {
          best = score;
          entering = j;
        }
      }
      if (!entering) {
        if (fresh) return PhaseStatus::optimal;
        reprice();
        fresh = true;
        continue;
      }
      if (pivots >= cap) return PhaseStatus::cap;
      std::uint32_t q = *entering;
      std::fill(alpha.begin(), alpha.end(), 0.0);
      for (const auto& [i, v] : a_[q]) alpha[i] = v;
      ftran(alpha);
      std::optional<std::size_t> leave;
      double best_ratio = 0, best_pivot = 0;
      for (std::size_t i = 0; i < m_; ++i) {
        double ratio;
        if (fixed[basis[i]] && std::abs(alpha[i]) > tol_)
          ratio = 0;
        else if (alpha[i] > tol_)
          ratio = std::max(0.0, x_[i]) / alpha[i];
        else
          continue;
        bool better = !leave || ratio < best_ratio - tol_;
        if (!better && leave && ratio <= best_ratio + tol_)
          better = bland ? basis[i] < basis[*leave] : std::abs(alpha[i]) > best_pivot;
        if (better) {
          leave = i;
          best_ratio = ratio;
          best_pivot = std::abs(alpha[i]);
        }
      }
      if (!leave) {
        if (fresh) return PhaseStatus::unbounded;
        reprice();
        fresh = true;
        continue;
      }
      std::size_t r = *leave;
      double pivot = alpha[r];
      // pivot row of B⁻¹A, for reduced-cost and reference-weight updates
      std::fill(er.begin(), er.end(), 0.0);
      er[r] = 1.0;
      btran(er, rho);
      double step = dj[q] / pivot;
      touched.clear();
      for (std::size_t i = 0; i < m_; ++i) {
        if (rho[i] == 0) continue;
        for (const auto& [j, a] : rows_[i]) {
          if (!seen[j]) {
            seen[j] = 1;
            touched.push_back(j);
          }
          row[j] += rho[i] * a;
        }
      }
      for (auto j : touched) {
        double arj = row[j];
        row[j] = 0;
        seen[j] = 0;
        if (in_basis_[j] || j == q || arj == 0) continue;
        dj[j] -= step * arj;
        double ratio = arj / pivot;
        weight[j] = std::max(weight[j], ratio * ratio * weight[q]);
      }
      std::uint32_t out = basis[r];
      dj[out] = -step;
      weight[out] = std::max(weight[q] / (pivot * pivot), 1.0);
      dj[q] = 0;

      double theta = fixed[out] ? 0.0 : std::max(0.0, x_[r]) / pivot;
      for (std::size_t i = 0; i < m_; ++i) x_[i] -= theta * alpha[i];
      x_[r] = theta;
      in_basis_[out] = 0;
      basis[r] = q;
      in_basis_[q] = 1;
      ++pivots;
      fresh = false;
      Eta eta{r, pivot, {}};
      for (std::size_t i = 0; i < m_; ++i)
        if (i != r && alpha[i] != 0) eta.entries.emplace_back(i, alpha[i]);
      etas_.push_back(std::move(eta));
      if (etas_.size() >= 64) {
        if (!refactor()) return PhaseStatus::failed;
        reprice();
        std::fill(weight.begin(), weight.end(), 1.0);
        fresh = true;
      }
    }
  }

 private:
  struct Eta {
    std::size_t r;
    double pivot;
    std::vector<std::pair<std::size_t, double>> entries;
  };

  bool refactor() {
    etas_.clear();
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t c = 0; c < m_; ++c)
      for (const auto& [i, v] : a_[(*basis_)[c]]) trips.emplace_back(static_cast<int>(i), static_cast<int>(c), v);
    Eigen::SparseMatrix<double> B(static_cast<int>(m_), static_cast<int>(m_));
    B.setFromTriplets(trips.begin(), trips.end());
    B.makeCompressed();
    lu_.analyzePattern(B);
    lu_.factorize(B);
    if (lu_.info() != Eigen::Success) return false;
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b_.data(), static_cast<int>(m_));
    Eigen::VectorXd sol = lu_.solve(rhs);
    x_.assign(sol.data(), sol.data() + m_);
    return true;
  }

  void ftran(std::vector<double>& v) {
    Eigen::VectorXd rhs = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<int>(m_));
    Eigen::VectorXd sol = lu_.solve(rhs);
    v.assign(sol.data(), sol.data() + m_);
    for (const auto& e : etas_) {
      double vr = v[e.r] / e.pivot;
      v[e.r] = vr;
      if (vr != 0)
        for (const auto& [i, di] : e.entries) v[i] -= di * vr;
    }
  }

  void btran(const std::vector<double>& c, std::vector<double>& y) {
    std::vector<double> w = c;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double acc = w[it->r];
      for (const auto& [i, di] : it->entries) acc -= di * w[i];
      w[it->r] = acc / it->pivot;
    }
    Eigen::VectorXd rhs = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<int>(m_));
    Eigen::VectorXd sol = lu_.transpose().solve(rhs);
    y.assign(sol.data(), sol.data() + m_);
  }

  const StandardForm& sf_;
  double tol_;
  std::size_t m_;
  std::vector<std::vector<std::pair<std::size_t, double>>> a_, rows_;
  std::vector<double> b_, x_;
  std::vector<std::uint32_t>* basis_ = nullptr;
  std::vector<char> in_basis_;
  std::vector<Eta> etas_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

inline std::vector<Rational> assignment_from(const StandardForm& sf, const std::vector<std::uint32_t>& basis,
                                             const std::vector<Rational>& x_basic) {
  std::vector<Rational> x(sf.n_original);
  for (std::size_t i = 0; i < sf.m; ++i)
    if (basis[i] < sf.n_original) x[basis[i]] = x_basic[i];
  return x;
}

}  // namespace detail

/// Solves an LP exactly.
///
/// With float_warm_start, a floating-point simplex proposes the final basis of
/// each phase and that basis is accepted only after exact rational checks of
/// primal feasibility and nonnegative reduced costs; otherwise the exact Bland
/// simplex continues from it. Every reported optimum is therefore exact.
inline LPSolution solve_lp(const LPInstance& lp, const LPOptions& opt = {}) {
  lp.validate();
  auto sf = detail::standardize(lp);
  LPSolution sol;
  std::vector<std::uint32_t> basis = sf.initial_basis;
  std::vector<char> none(sf.columns(), 0);

  std::vector<Rational> phase1_cost(sf.columns(), Rational(0));
  bool any_artificial = false;
  for (std::size_t j = 0; j < sf.columns(); ++j)
    if (sf.artificial[j]) {
      phase1_cost[j] = 1;
      any_artificial = true;
    }

  auto run_phase = [&](const std::vector<Rational>& cost, const std::vector<char>& fixed) -> detail::PhaseStatus {
    if (opt.float_warm_start && sf.m > 0) {
      std::vector<double> fcost(cost.size());
      for (std::size_t j = 0; j < cost.size(); ++j) fcost[j] = cost[j].convert_to<double>();
      auto trial = basis;
      detail::FloatSimplex fs(sf, opt.tolerance);
      auto st = fs.run(fcost, trial, fixed, opt.pivot_cap, sol.pivots);
      if (st == detail::PhaseStatus::cap) {
        basis = trial;
        return st;
      }
      if (st == detail::PhaseStatus::optimal) {
        auto check = detail::check_basis(sf, trial, cost, fixed);
        if (check.solved && check.primal_feasible && check.dual_feasible) {
          basis = trial;
          return st;
        }
        if (check.solved && check.primal_feasible) basis = trial;
      }
    }
    std::size_t before = sol.pivots;
    auto st = detail::exact_bland(sf, cost, basis, fixed, opt.pivot_cap, sol.pivots);
    sol.exact_pivots += sol.pivots - before;
    return st;
  };

  auto incumbent = [&]() {
    auto check = detail::check_basis(sf, basis, sf.cost, sf.artificial);
    if (check.solved && check.primal_feasible) {
      sol.assignment = detail::assignment_from(sf, basis, check.x_basic);
      sol.optimum = objective_value(lp, sol.assignment);
    }
  };

  if (any_artificial) {
    auto st = run_phase(phase1_cost, none);
    if (st == detail::PhaseStatus::cap) {
      sol.status = LPStatus::cap_exceeded;
      return sol;
    }
    if (st != detail::PhaseStatus::optimal) throw InvariantError("phase 1 simplex failed");
    auto check = detail::check_basis(sf, basis, phase1_cost, none);
    Rational infeasibility = 0;
    for (std::size_t i = 0; i < sf.m; ++i) infeasibility += phase1_cost[basis[i]] * check.x_basic[i];
    if (infeasibility > 0) {
      sol.status = LPStatus::infeasible;
      return sol;
    }
  }

  auto st = run_phase(sf.cost, sf.artificial);
  switch (st) {
    case detail::PhaseStatus::optimal:
      sol.status = LPStatus::optimal;
      incumbent();
      if (!satisfies(lp, sol.assignment)) throw InvariantError("optimal basis violates a constraint");
      return sol;
    case detail::PhaseStatus::unbounded:
      sol.status = LPStatus::unbounded;
      return sol;
    case detail::PhaseStatus::cap:
      sol.status = LPStatus::cap_exceeded;
      incumbent();
      return sol;
    case detail::PhaseStatus::failed:
      break;
  }
  throw InvariantError("phase 2 simplex failed");
}

/// CPLEX LP text. Non-integer coefficients are written as decimals with 17
/// significant digits, so exact cross-checks need integral data.
inline std::string to_lp_format(const LPInstance& lp) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const auto& [k, v] : lp.metadata) out << "\\ " << k << " = " << v << "\n";
  auto number = [&](const Rational& q) {
    if (boost::multiprecision::denominator(q) == 1) return boost::multiprecision::numerator(q).str();
    std::ostringstream s;
    s << std::setprecision(17) << q.convert_to<double>();
    return s.str();
  };
  auto terms = [&](const std::vector<Term>& ts) {
    std::string s;
    bool first = true;
    for (const auto& [j, a] : ts) {
      if (a == 0) continue;
      bool neg = a < 0;
      std::string mag = number(neg ? Rational(-a) : a);
      if (!first || neg) s += neg ? " - " : " + ";
      else s += " ";
      if (mag != "1") s += mag + " ";
      s += lp.variables[j];
      first = false;
    }
    return first ? std::string(" 0 ") + (lp.variables.empty() ? "" : lp.variables[0]) : s;
  };
  out << "Minimize\n obj:" << terms(lp.objective) << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const auto& r = lp.rows[i];
    out << " " << (r.name.empty() ? "c" + std::to_string(i) : r.name) << ":" << terms(r.terms)
        << (r.sense == Sense::le ? " <= " : r.sense == Sense::ge ? " >= " : " = ") << number(r.rhs) << "\n";
  }
  out << "End\n";
  return out.str();
}

}  // namespace relcert
