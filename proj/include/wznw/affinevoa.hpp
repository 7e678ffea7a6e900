#pragma once

// Depth-truncated modules M(k, lambda) and L(k, lambda) for the affine Lie
// algebra, the vertex operator map of M(k, 0) acting on them, and Virasoro
// modes.
//
// States are PBW monomials x_{a_1}(m_1) ... x_{a_r}(m_r) v_t with m_i < 0 in a
// fixed letter order and v_t a basis vector of the top space L(lambda). All
// operators are graded: an operator of shift s maps depth d to depth d + s and
// is only defined on depths with d + s <= D. Applying one outside that window
// throws DepthOverflow.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "wznw/exact.hpp"
#include "wznw/liealg.hpp"
#include "wznw/repn.hpp"

namespace wznw {

class DepthOverflow : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// x_a(m)
struct ModeLetter {
  std::size_t a = 0;
  long m = 0;
  friend bool operator<(const ModeLetter& x, const ModeLetter& y) { return std::tie(x.m, x.a) < std::tie(y.m, y.a); }
  friend bool operator==(const ModeLetter& x, const ModeLetter& y) { return x.a == y.a && x.m == y.m; }
  friend bool operator!=(const ModeLetter& x, const ModeLetter& y) { return !(x == y); }
};

using Word = std::vector<ModeLetter>;

struct Monomial {
  Word word;  // nondecreasing, all modes negative
  std::size_t top = 0;
  friend bool operator<(const Monomial& x, const Monomial& y) { return std::tie(x.word, x.top) < std::tie(y.word, y.top); }
  friend bool operator==(const Monomial& x, const Monomial& y) { return x.word == y.word && x.top == y.top; }
};

inline long depth_of(const Word& w) {
  long d = 0;
  for (const auto& l : w) d -= l.m;
  return d;
}

using PbwVector = std::map<Monomial, Rational>;

inline void add_to(PbwVector& acc, const PbwVector& v, const Rational& c) {
  if (c == 0) return;
  for (const auto& [m, x] : v) {
    auto& slot = acc[m];
    slot += c * x;
    if (slot == 0) acc.erase(m);
  }
}

/// Graded operator on a truncated module.
struct GradedOperator {
  long shift = 0;  // depth change
  QSparse matrix;
};

/// PBW straightening in the induced module U(g^)_{<0} (x) L(lambda).
class InducedModuleAlgebra {
 public:
  InducedModuleAlgebra(const AlgebraBasis& g, Rational level, Irrep top)
      : g_(&g), level_(std::move(level)), top_(std::move(top)) {}

  const Irrep& top() const { return top_; }
  const Rational& level() const { return level_; }

  /// x * mono, straightened.
  const PbwVector& apply(const ModeLetter& x, const Monomial& mono) const {
    auto key = std::make_pair(x, mono);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    PbwVector out;
    if (mono.word.empty()) {
      if (x.m < 0) {
        out[Monomial{{x}, mono.top}] = 1;
      } else if (x.m == 0) {
        const QMatrix& act = top_.action[x.a];
        for (std::size_t t = 0; t < top_.dimension; ++t)
          if (act(t, mono.top) != 0) out[Monomial{{}, t}] = act(t, mono.top);
      }
    } else {
      const ModeLetter& y = mono.word.front();
      if (x.m < 0 && !(y < x)) {
        Monomial m = mono;
        m.word.insert(m.word.begin(), x);
        out[m] = 1;
      } else {
        Monomial rest{Word(mono.word.begin() + 1, mono.word.end()), mono.top};
        // x y rest = y (x rest) + [x, y] rest
        const PbwVector xr = apply(x, rest);
        for (const auto& [m, c] : xr) add_to(out, apply(y, m), c);
        const QVector& br = g_->bracket[x.a][y.a];
        for (std::size_t c = 0; c < br.size(); ++c)
          if (br[c] != 0) add_to(out, apply(ModeLetter{c, x.m + y.m}, rest), br[c]);
        if (x.m + y.m == 0 && g_->gram(x.a, y.a) != 0) add_to(out, PbwVector{{rest, Rational(1)}}, x.m * g_->gram(x.a, y.a) * level_);
      }
    }
    return cache_.emplace(std::move(key), std::move(out)).first->second;
  }

  PbwVector apply(const ModeLetter& x, const PbwVector& v) const {
    PbwVector out;
    for (const auto& [m, c] : v) add_to(out, apply(x, m), c);
    return out;
  }

  /// Straightens an arbitrary word applied to a top vector.
  PbwVector word_state(const Word& word, std::size_t top) const {
    PbwVector v{{Monomial{{}, top}, Rational(1)}};
    for (auto it = word.rbegin(); it != word.rend(); ++it) v = apply(*it, v);
    return v;
  }

  ModeLetter sigma(const ModeLetter& x) const { return ModeLetter{g_->info[x.a].sigma, -x.m}; }

  /// Contravariant pairing <m1, m2> with <x u, v> = <u, sigma(x) v>.
  Rational pairing(const Monomial& m1, const Monomial& m2) const {
    if (depth_of(m1.word) != depth_of(m2.word)) return Rational(0);
    if (m1.word.empty()) return top_.gram(m1.top, m2.top);
    auto key = std::make_pair(m1, m2);
    if (auto it = pair_cache_.find(key); it != pair_cache_.end()) return it->second;
    Monomial rest{Word(m1.word.begin() + 1, m1.word.end()), m1.top};
    Rational s = 0;
    for (const auto& [m, c] : apply(sigma(m1.word.front()), m2)) s += c * pairing(rest, m);
    pair_cache_.emplace(std::move(key), s);
    return s;
  }

  Rational pairing(const Monomial& m1, const PbwVector& v) const {
    Rational s = 0;
    for (const auto& [m, c] : v) s += c * pairing(m1, m);
    return s;
  }

  Weight weight_of(const Monomial& m) const {
    Weight w = top_.weights[m.top];
    for (const auto& l : m.word) {
      const auto rw = g_->cartan.root_to_weight(g_->info[l.a].root);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += rw[i].get_num().get_si();
    }
    return w;
  }

 private:
  const AlgebraBasis* g_;
  Rational level_;
  Irrep top_;
  mutable std::map<std::pair<ModeLetter, Monomial>, PbwVector> cache_;
  mutable std::map<std::pair<Monomial, Monomial>, Rational> pair_cache_;
};

/// All nondecreasing words of lowering letters with total depth d.
inline std::vector<Word> pbw_words(std::size_t dim_g, long d) {
  std::vector<Word> out;
  Word cur;
  // letters enumerated in increasing order: (m, a) with m from -d up to -1
  std::function<void(long, ModeLetter)> rec = [&](long remaining, ModeLetter min_letter) {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (long m = -remaining; m <= -1; ++m)
      for (std::size_t a = 0; a < dim_g; ++a) {
        ModeLetter l{a, m};
        if (l < min_letter) continue;
        cur.push_back(l);
        rec(remaining + m, l);
        cur.pop_back();
      }
  };
  rec(d, ModeLetter{0, -d - 1});
  return out;
}

/// Depth-truncated graded module: M(k, lambda), or its irreducible quotient.
class TruncatedModule {
 public:
  const AlgebraBasis& algebra() const { return *g_; }
  const Rational& level() const { return algebra_->level(); }
  const Weight& highest_weight() const { return lambda_; }
  const Irrep& top() const { return algebra_->top(); }
  long depth_bound() const { return depth_; }
  bool irreducible() const { return irreducible_; }
  std::size_t dimension() const { return basis_.size(); }
  std::size_t dimension_at(long d) const { return offsets_[d + 1] - offsets_[d]; }
  std::size_t offset(long d) const { return offsets_[d]; }
  long depth_of_index(std::size_t i) const { return depth_index_[i]; }
  const Monomial& basis_monomial(std::size_t i) const { return basis_[i]; }
  const InducedModuleAlgebra& induced() const { return *algebra_; }

  std::vector<std::size_t> graded_dimensions() const {
    std::vector<std::size_t> dims;
    for (long d = 0; d <= depth_; ++d) dims.push_back(dimension_at(d));
    return dims;
  }

  /// x_a(m) for |m| <= D.
  const GradedOperator& mode(std::size_t a, long m) const {
    if (m < -depth_ || m > depth_) throw DepthOverflow("mode index outside truncation window");
    return modes_[a][static_cast<std::size_t>(m + depth_)];
  }

  /// Coordinates of a PBW vector (all terms of one or several depths <= D).
  QVector coordinates(const PbwVector& v) const {
    QVector out(dimension(), Rational(0));
    if (!irreducible_) {
      for (const auto& [m, c] : v) {
        const long d = depth_of(m.word);
        if (d > depth_) throw DepthOverflow("state deeper than truncation");
        out[index_.at(m)] += c;
      }
      return out;
    }
    // pairings with the chosen representatives, then the inverse Gram block
    std::map<std::pair<long, Weight>, PbwVector> parts;
    for (const auto& [m, c] : v) {
      const long d = depth_of(m.word);
      if (d > depth_) throw DepthOverflow("state deeper than truncation");
      parts[{d, algebra_->weight_of(m)}][m] = c;
    }
    for (const auto& [key, part] : parts) {
      auto it = blocks_.find(key);
      if (it == blocks_.end()) continue;  // whole weight space lies in the radical
      const auto& blk = it->second;
      QVector p(blk.members.size());
      for (std::size_t k = 0; k < blk.members.size(); ++k) p[k] = algebra_->pairing(basis_[blk.members[k]], part);
      const QVector x = blk.inverse_gram * p;
      for (std::size_t k = 0; k < blk.members.size(); ++k) out[blk.members[k]] += x[k];
    }
    return out;
  }

  /// The representative PBW vector of a coordinate vector.
  PbwVector to_pbw(const QVector& coords) const {
    PbwVector v;
    for (std::size_t i = 0; i < coords.size(); ++i)
      if (coords[i] != 0) v[basis_[i]] += coords[i];
    return v;
  }

  QVector unit(std::size_t i) const {
    QVector v(dimension(), Rational(0));
    v[i] = 1;
    return v;
  }

  long max_depth(const QVector& v) const {
    long d = -1;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0) d = std::max(d, depth_index_[i]);
    return d;
  }

  QVector apply(const GradedOperator& op, const QVector& v) const {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0 && depth_index_[i] + op.shift > depth_)
        throw DepthOverflow("operator applied outside its depth window");
    return wznw::apply(op.matrix, v);
  }

  /// Restricts an operator's columns to its valid window.
  GradedOperator windowed(long shift, const QSparse& m) const {
    std::vector<QSparse::Row> rows(dimension());
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (const auto& [c, x] : m.row(r))
        if (depth_index_[c] + shift <= depth_ && x != 0) rows[r].emplace_back(c, x);
    return GradedOperator{shift, QSparse(dimension(), dimension(), std::move(rows))};
  }

  friend TruncatedModule build_truncated_module(const AlgebraBasis&, const Rational&, const Weight&, long);
  friend TruncatedModule irreducible_quotient(const TruncatedModule&, long);

 private:
  struct WeightBlock {
    std::vector<std::size_t> members;  // flat indices
    QMatrix inverse_gram;
  };

  void build_modes() {
    const std::size_t dim_g = g_->dimension;
    modes_.assign(dim_g, std::vector<GradedOperator>(static_cast<std::size_t>(2 * depth_ + 1)));
    for (std::size_t a = 0; a < dim_g; ++a)
      for (long m = -depth_; m <= depth_; ++m) {
        std::vector<QSparse::Row> cols(dimension());
        for (std::size_t i = 0; i < dimension(); ++i) {
          const long d = depth_index_[i];
          if (d - m > depth_ || d - m < 0) continue;
          const PbwVector img = algebra_->apply(ModeLetter{a, m}, basis_[i]);
          if (img.empty()) continue;
          const QVector c = coordinates(img);
          for (std::size_t r = 0; r < c.size(); ++r)
            if (c[r] != 0) cols[i].emplace_back(r, c[r]);
        }
        // cols holds columns; transpose into rows
        QSparse by_col(dimension(), dimension(), std::move(cols));
        modes_[a][static_cast<std::size_t>(m + depth_)] = GradedOperator{-m, by_col.transpose()};
      }
  }

  void index_basis() {
    depth_index_.clear();
    index_.clear();
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      depth_index_.push_back(depth_of(basis_[i].word));
      index_[basis_[i]] = i;
    }
  }

  const AlgebraBasis* g_ = nullptr;
  std::shared_ptr<const InducedModuleAlgebra> algebra_;
  Weight lambda_;
  long depth_ = 0;
  bool irreducible_ = false;
  std::vector<Monomial> basis_;
  std::vector<std::size_t> offsets_;
  std::vector<long> depth_index_;
  std::map<Monomial, std::size_t> index_;
  std::map<std::pair<long, Weight>, WeightBlock> blocks_;
  std::vector<std::vector<GradedOperator>> modes_;
};

/// M(k, lambda) truncated at depth D, with the top space L(lambda).
inline TruncatedModule build_truncated_module(const AlgebraBasis& g, const Rational& k, const Weight& lambda, long depth) {
  if (depth < 0) throw std::invalid_argument("build_truncated_module: negative depth bound");
  TruncatedModule tm;
  tm.g_ = &g;
  tm.algebra_ = std::make_shared<InducedModuleAlgebra>(g, k, build_irrep(g, lambda));
  tm.lambda_ = lambda;
  tm.depth_ = depth;
  const std::size_t top_dim = tm.algebra_->top().dimension;
  tm.offsets_.push_back(0);
  for (long d = 0; d <= depth; ++d) {
    for (const auto& w : pbw_words(g.dimension, d))
      for (std::size_t t = 0; t < top_dim; ++t) tm.basis_.push_back(Monomial{w, t});
    tm.offsets_.push_back(tm.basis_.size());
  }
  tm.index_basis();
  tm.build_modes();
  return tm;
}

/// Quotient by the radical of the contravariant form, depth by depth.
/// Representatives are the lexicographically first monomials that keep the
/// Gram block of their weight space nondegenerate.
inline TruncatedModule irreducible_quotient(const TruncatedModule& tm, long depth) {
  if (depth < 0 || depth > tm.depth_) throw std::invalid_argument("irreducible_quotient: depth outside the module's truncation");
  TruncatedModule q;
  q.g_ = tm.g_;
  q.algebra_ = tm.algebra_;
  q.lambda_ = tm.lambda_;
  q.depth_ = depth;
  q.irreducible_ = true;
  const auto& alg = *tm.algebra_;
  q.offsets_.push_back(0);
  for (long d = 0; d <= depth; ++d) {
    std::map<Weight, std::vector<Monomial>> by_weight;
    for (std::size_t i = tm.offsets_[d]; i < tm.offsets_[d + 1]; ++i) by_weight[alg.weight_of(tm.basis_[i])].push_back(tm.basis_[i]);
    std::vector<std::pair<Monomial, Weight>> chosen_here;
    for (auto& [w, monos] : by_weight) {
      std::vector<Monomial> chosen;
      QMatrix gm;
      for (const auto& m : monos) {
        std::vector<Monomial> trial = chosen;
        trial.push_back(m);
        QMatrix t(trial.size(), trial.size());
        for (std::size_t a = 0; a < trial.size(); ++a)
          for (std::size_t b = 0; b < trial.size(); ++b) t(a, b) = alg.pairing(trial[a], trial[b]);
        if (rank(t) == trial.size()) {
          chosen = std::move(trial);
          gm = std::move(t);
        }
      }
      for (const auto& m : chosen) chosen_here.emplace_back(m, w);
    }
    std::sort(chosen_here.begin(), chosen_here.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [m, w] : chosen_here) q.basis_.push_back(m);
    q.offsets_.push_back(q.basis_.size());
  }
  q.index_basis();
  // inverse Gram blocks
  std::map<std::pair<long, Weight>, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < q.basis_.size(); ++i) members[{q.depth_index_[i], alg.weight_of(q.basis_[i])}].push_back(i);
  for (auto& [key, idx] : members) {
    QMatrix gm(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) gm(a, b) = alg.pairing(q.basis_[idx[a]], q.basis_[idx[b]]);
    q.blocks_[key] = TruncatedModule::WeightBlock{idx, inverse(gm)};
  }
  q.build_modes();
  return q;
}

// ---------------------------------------------------------------------------
// Operator algebra on a truncated module

inline GradedOperator compose(const TruncatedModule& tm, const GradedOperator& left, const GradedOperator& right) {
  return tm.windowed(left.shift + right.shift, left.matrix * right.matrix);
}

inline GradedOperator add(const TruncatedModule& tm, const GradedOperator& x, const GradedOperator& y, const Rational& cy = 1) {
  if (x.shift != y.shift) throw std::invalid_argument("add: operators of different degree");
  return tm.windowed(x.shift, x.matrix + cy * y.matrix);
}

inline GradedOperator zero_operator(const TruncatedModule& tm, long shift) {
  return GradedOperator{shift, QSparse(tm.dimension(), tm.dimension())};
}

inline GradedOperator scaled(const TruncatedModule& tm, const GradedOperator& x, const Rational& c) {
  return tm.windowed(x.shift, c * x.matrix);
}

inline Rational kappa_of(const AlgebraBasis& g, const Rational& k) {
  const Rational kappa = k + g.cartan.dual_coxeter;
  if (kappa == 0) throw std::invalid_argument("level equals minus the dual Coxeter number");
  return kappa;
}

/// Modes v_n of the vertex operator Y(v, x) for v a word applied to the vacuum
/// of M(k, 0), computed by the two-term residue recursion:
///   (a(-n0) u)_n = sum_{i>=0} C(n0+i-1, i) [ a(-n0-i) u_{n+i} + (-1)^{n0+1} u_{n-n0-i} a(i) ].
/// The word need not be in PBW order.
class VertexOperatorMap {
 public:
  explicit VertexOperatorMap(const TruncatedModule& target) : w_(&target) {}

  const TruncatedModule& target() const { return *w_; }

  GradedOperator word_mode(const Word& word, long n) const {
    for (const auto& l : word)
      if (l.m >= 0) throw std::invalid_argument("vertex operator words must use negative modes");
    const long shift = depth_of(word) - n - 1;
    auto key = std::make_pair(word, n);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const TruncatedModule& tm = *w_;
    const long big_d = tm.depth_bound();
    GradedOperator result = zero_operator(tm, shift);
    if (word.empty()) {
      if (n == -1) result = GradedOperator{0, QSparse::identity(tm.dimension())};
    } else if (shift >= -big_d && shift <= big_d) {
      const ModeLetter a0 = word.front();
      const long n0 = -a0.m;
      const Word rest(word.begin() + 1, word.end());
      const long wt_rest = depth_of(rest);
      QSparse acc(tm.dimension(), tm.dimension());
      const long imax = std::max(big_d, big_d + wt_rest - n - 1);
      for (long i = 0; i <= imax; ++i) {
        const Rational c(binomial(static_cast<unsigned long>(n0 + i - 1), static_cast<unsigned long>(i)));
        // a0(-n0-i) rest_{n+i}
        if (n0 + i <= big_d && wt_rest - (n + i) - 1 >= -big_d) {
          const GradedOperator r = word_mode(rest, n + i);
          if (r.matrix.nonzeros()) acc = acc + c * (tm.mode(a0.a, -n0 - i).matrix * r.matrix);
        }
        // rest_{n-n0-i} a0(i)
        if (i <= big_d && wt_rest - (n - n0 - i) - 1 <= big_d) {
          const GradedOperator r = word_mode(rest, n - n0 - i);
          if (r.matrix.nonzeros()) {
            const Rational sign = (n0 % 2 == 1) ? Rational(1) : Rational(-1);  // (-1)^{n0+1}
            acc = acc + (c * sign) * (r.matrix * tm.mode(a0.a, i).matrix);
          }
        }
      }
      result = tm.windowed(shift, acc);
    }
    cache_.emplace(std::move(key), result);
    return result;
  }

  /// v_n for a state v of the vertex operator algebra (given in its own basis).
  GradedOperator state_mode(const TruncatedModule& voa, const QVector& v, long n) const {
    std::optional<GradedOperator> acc;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == 0) continue;
      const Monomial& m = voa.basis_monomial(i);
      if (m.top != 0 || voa.top().dimension != 1) throw std::invalid_argument("state_mode: source must be M(k, 0) or L(k, 0)");
      GradedOperator term = scaled(*w_, word_mode(m.word, n), v[i]);
      acc = acc ? add(*w_, *acc, term) : term;
    }
    if (!acc) throw std::invalid_argument("state_mode: zero state has no well-defined degree");
    return *acc;
  }

 private:
  const TruncatedModule* w_;
  mutable std::map<std::pair<Word, long>, GradedOperator> cache_;
};

/// Virasoro modes L(n), |n| <= D, from the normal-ordered quadratic expression
/// L(n) = (2 kappa)^{-1} sum_a sum_j :x_a(j) x^a(n-j):.
struct VirasoroModes {
  Rational central_charge;
  long depth_bound = 0;
  std::vector<GradedOperator> modes;  // index n + D
  const GradedOperator& operator()(long n) const { return modes.at(static_cast<std::size_t>(n + depth_bound)); }
};

inline GradedOperator sugawara_mode(const TruncatedModule& tm, long n) {
  const auto& g = tm.algebra();
  const Rational kappa = kappa_of(g, tm.level());
  const long big_d = tm.depth_bound();
  QSparse acc(tm.dimension(), tm.dimension());
  for (const auto& [a, b, coeff] : g.casimir_terms()) {
    for (long r = -big_d; r <= big_d; ++r) {
      const long s = n - r;
      if (s < -big_d || s > big_d) continue;
      if (r < s) {
        acc = acc + coeff * (tm.mode(a, r).matrix * tm.mode(b, s).matrix);
      } else if (r == s) {
        acc = acc + (coeff / 2) * (tm.mode(a, r).matrix * tm.mode(b, s).matrix + tm.mode(b, s).matrix * tm.mode(a, r).matrix);
      } else {
        acc = acc + coeff * (tm.mode(b, s).matrix * tm.mode(a, r).matrix);
      }
    }
  }
  return tm.windowed(-n, (1 / (2 * kappa)) * acc);
}

/// Virasoro modes; the central charge is read off from L(2) L(-2) 1 = (c/2) 1,
/// which needs the module to be M(k, 0) or L(k, 0) with D >= 2.
inline VirasoroModes virasoro_modes(const TruncatedModule& tm) {
  VirasoroModes vm;
  vm.depth_bound = tm.depth_bound();
  for (long n = -tm.depth_bound(); n <= tm.depth_bound(); ++n) vm.modes.push_back(sugawara_mode(tm, n));
  if (tm.top().dimension == 1 && tm.highest_weight() == Weight(tm.highest_weight().size(), 0) && tm.depth_bound() >= 2) {
    const QVector vac = tm.unit(0);
    const QVector r = tm.apply(vm(2), tm.apply(vm(-2), vac));
    vm.central_charge = 2 * r[0];
  } else {
    const auto& g = tm.algebra();
    vm.central_charge = tm.level() * static_cast<long>(g.dimension) / kappa_of(g, tm.level());
  }
  return vm;
}

/// [L(m), L(n)] = (m - n) L(m + n) + c/12 (m^3 - m) delta_{m+n,0} for
/// |m|, |n| <= bound, on every state where both products stay inside the
/// truncation.
inline bool virasoro_relations_hold(const TruncatedModule& tm, const VirasoroModes& vm, long bound) {
  const long big_d = tm.depth_bound();
  for (long m = -bound; m <= bound; ++m)
    for (long n = -bound; n <= bound; ++n) {
      const QSparse lhs = vm(m).matrix * vm(n).matrix - vm(n).matrix * vm(m).matrix;
      QSparse rhs(tm.dimension(), tm.dimension());
      if (std::abs(m + n) <= big_d) rhs = Rational(m - n) * vm(m + n).matrix;
      if (m + n == 0) rhs = rhs + (vm.central_charge * (m * m * m - m) / 12) * QSparse::identity(tm.dimension());
      const QSparse diff = lhs - rhs;
      for (std::size_t r = 0; r < diff.rows(); ++r)
        for (const auto& [c, x] : diff.row(r)) {
          const long d = tm.depth_of_index(c);
          if (d - n > big_d || d - m > big_d || d - m - n > big_d) continue;
          if (x != 0) return false;
        }
    }
  return true;
}

struct IterateReport {
  QVector lhs, rhs;
  bool holds() const { return lhs == rhs; }
};

/// Both sides of
///   (u_{-1} w)_n v = sum_{m<0} u_m w_{n-m-1} v + sum_{m>=0} w_{n-m-1} u_m v
/// for homogeneous u, w in the vertex operator algebra `voa` (M(k,0) or
/// L(k,0)) acting on the module behind `y`. Throws DepthOverflow when some
/// intermediate state leaves the truncation; callers resample.
inline IterateReport iterate_formula(const TruncatedModule& voa, const VertexOperatorMap& y, const QVector& u, const QVector& w, long n,
                                     const QVector& v) {
  const TruncatedModule& target = y.target();
  VertexOperatorMap self(voa);
  const QVector uw = voa.apply(self.state_mode(voa, u, -1), w);
  IterateReport rep;
  rep.rhs = QVector(target.dimension(), Rational(0));
  rep.lhs = is_zero(uw) ? rep.rhs : target.apply(y.state_mode(voa, uw, n), v);
  // u_m w_p v vanishes once p or m pushes below depth 0
  const long reach = target.depth_bound() + voa.depth_bound() + std::abs(n) + 2;
  for (long m = -reach; m <= reach; ++m) {
    const long p = n - m - 1;
    QVector t;
    if (m < 0) {
      const QVector wv = target.apply(y.state_mode(voa, w, p), v);
      if (is_zero(wv)) continue;
      t = target.apply(y.state_mode(voa, u, m), wv);
    } else {
      const QVector uv = target.apply(y.state_mode(voa, u, m), v);
      if (is_zero(uv)) continue;
      t = target.apply(y.state_mode(voa, w, p), uv);
    }
    for (std::size_t i = 0; i < t.size(); ++i) rep.rhs[i] += t[i];
  }
  return rep;
}

struct LMinusOneReport {
  bool precondition_holds = false;
  bool identity_holds = false;
  QVector lhs, rhs;  // kappa L(-1) w and sum_a x_a(-1) x^a(0) w
};

/// Checks kappa L(-1) w = sum_a x_a(-1) x^a(0) w for w annihilated by all
/// positive modes.
inline LMinusOneReport check_l_minus1(const TruncatedModule& tm, const QVector& w) {
  LMinusOneReport rep;
  const auto& g = tm.algebra();
  const long dmax = tm.max_depth(w);
  rep.precondition_holds = true;
  for (std::size_t a = 0; a < g.dimension && rep.precondition_holds; ++a)
    for (long n = 1; n <= std::max(dmax, 0L); ++n)
      if (!is_zero(tm.apply(tm.mode(a, n), w))) {
        rep.precondition_holds = false;
        break;
      }
  if (!rep.precondition_holds) return rep;
  const Rational kappa = kappa_of(g, tm.level());
  rep.lhs = tm.apply(sugawara_mode(tm, -1), w);
  for (auto& x : rep.lhs) x *= kappa;
  rep.rhs = QVector(tm.dimension(), Rational(0));
  for (const auto& [a, b, coeff] : g.casimir_terms()) {
    const QVector t = tm.apply(tm.mode(a, -1), tm.apply(tm.mode(b, 0), w));
    for (std::size_t i = 0; i < t.size(); ++i) rep.rhs[i] += coeff * t[i];
  }
  rep.identity_holds = rep.lhs == rep.rhs;
  return rep;
}

/// The Virasoro element omega = (2 kappa)^{-1} sum_a x_a(-1) x^a(-1) 1 as a
/// list of (coefficient, word) pairs.
inline std::vector<std::pair<Rational, Word>> omega_words(const AlgebraBasis& g, const Rational& k) {
  const Rational kappa = kappa_of(g, k);
  std::vector<std::pair<Rational, Word>> out;
  for (const auto& [a, b, coeff] : g.casimir_terms())
    out.emplace_back(coeff / (2 * kappa), Word{ModeLetter{a, -1}, ModeLetter{b, -1}});
  return out;
}

}  // namespace wznw
