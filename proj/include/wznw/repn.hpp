#pragma once

// Finite-dimensional irreducible highest-weight modules, tensor products and
// invariant subspaces.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "wznw/exact.hpp"
#include "wznw/liealg.hpp"

namespace wznw {

struct Irrep {
  Weight highest_weight;
  std::size_t dimension = 0;
  std::vector<Weight> weights;                   // weight of each basis vector
  std::vector<std::vector<std::size_t>> words;   // lowering word (simple indices) producing each vector
  std::vector<QMatrix> action;                   // one matrix per algebra basis element
  QMatrix gram;                                  // contravariant form, <x u, v> = <u, sigma(x) v>
  bool dual = false;
};

/// Weyl dimension formula prod_{alpha>0} (lambda+rho, alpha)/(rho, alpha).
inline mpz_class weyl_dimension(const CartanData& cd, const Weight& lambda) {
  if (lambda.size() != cd.rank) throw std::invalid_argument("weight has wrong rank");
  std::vector<Rational> lr(cd.rank), r(cd.rank);
  for (std::size_t i = 0; i < cd.rank; ++i) {
    lr[i] = lambda[i] + 1;
    r[i] = 1;
  }
  Rational d = 1;
  for (const auto& alpha : cd.positive_roots) {
    const auto a = cd.root_to_weight(alpha);
    d *= cd.form(lr, a) / cd.form(r, a);
  }
  if (!is_integer(d)) throw std::logic_error("Weyl dimension is not an integer");
  return d.get_num();
}

inline bool is_dominant_integral(const Weight& lambda) {
  return std::all_of(lambda.begin(), lambda.end(), [](long x) { return x >= 0; });
}

/// (lambda, theta), the level needed for lambda to be admissible.
inline Rational level_of(const CartanData& cd, const Weight& lambda) {
  return cd.form(CartanData::to_q(lambda), cd.root_to_weight(cd.theta));
}

/// Casimir eigenvalue (lambda, lambda + 2 rho).
inline Rational casimir_value(const CartanData& cd, const Weight& lambda) {
  std::vector<Rational> l = CartanData::to_q(lambda), l2(cd.rank);
  for (std::size_t i = 0; i < cd.rank; ++i) l2[i] = l[i] + 2;
  return cd.form(l, l2);
}

namespace detail {

/// Builds the matrices of every basis element from those of the Chevalley
/// generators, using x_{alpha} = [e_i, x_{alpha - alpha_i}] / c.
inline std::vector<QMatrix> extend_action(const AlgebraBasis& g, const std::vector<QMatrix>& e_mats,
                                          const std::vector<QMatrix>& f_mats, const std::vector<QMatrix>& h_mats) {
  const std::size_t n = g.cartan.rank, dim = g.dimension;
  std::vector<QMatrix> act(dim);
  std::vector<bool> known(dim, false);
  for (std::size_t i = 0; i < n; ++i) {
    act[g.e[i]] = e_mats[i];
    act[g.f[i]] = f_mats[i];
    known[g.e[i]] = known[g.f[i]] = true;
  }
  for (std::size_t a = 0; a < dim; ++a) {
    if (g.info[a].kind != ElementKind::Cartan) continue;
    QMatrix m(h_mats[0].rows(), h_mats[0].cols());
    for (std::size_t i = 0; i < n; ++i)
      if (g.info[a].coroot_coefficients[i] != 0) m += h_mats[i] * g.info[a].coroot_coefficients[i];
    act[a] = m;
    known[a] = true;
  }
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t a = 0; a < dim; ++a) {
      if (known[a]) continue;
      const RootVec& root = g.info[a].root;
      const bool raising = g.info[a].kind == ElementKind::Raising;
      for (std::size_t i = 0; i < n && !known[a]; ++i) {
        const std::size_t gen = raising ? g.e[i] : g.f[i];
        for (std::size_t b = 0; b < dim; ++b) {
          if (!known[b] || g.info[b].kind == ElementKind::Cartan) continue;
          RootVec sum = g.info[b].root;
          for (std::size_t j = 0; j < n; ++j) sum[j] += g.info[gen].root[j];
          if (sum != root) continue;
          const Rational c = g.bracket[gen][b][a];
          if (c == 0) continue;
          act[a] = commutator(act[gen], act[b]) * (1 / c);
          known[a] = progress = true;
          break;
        }
      }
    }
  }
  for (std::size_t a = 0; a < dim; ++a)
    if (!known[a]) throw std::logic_error("extend_action: basis element not reachable from generators");
  return act;
}

}  // namespace detail

/// Irreducible module L(lambda): vectors f_{i_1} ... f_{i_m} v_lambda, taken in
/// lexicographic order of the lowering word, modulo the radical of the
/// contravariant form computed weight space by weight space.
inline Irrep build_irrep(const AlgebraBasis& g, const Weight& lambda) {
  const CartanData& cd = g.cartan;
  const std::size_t n = cd.rank;
  if (lambda.size() != n) throw std::invalid_argument("build_irrep: weight has wrong rank");
  if (!is_dominant_integral(lambda)) throw std::invalid_argument("build_irrep: weight is not dominant integral");

  struct Vec {
    Weight weight;
    std::vector<std::size_t> word;
    std::size_t depth, local;     // index within its depth
    std::size_t parent;           // local index of parent at depth-1
    std::size_t letter;           // simple index of the first letter
    std::vector<QVector> e_image; // e_i v in coordinates of depth-1 basis
  };
  std::vector<std::vector<Vec>> levels;
  std::vector<QMatrix> grams;                 // per depth
  std::vector<std::vector<QMatrix>> f_maps;   // f_maps[d][i]: depth d -> depth d+1

  levels.push_back({Vec{lambda, {}, 0, 0, 0, 0, {}}});
  grams.push_back(QMatrix::identity(1));

  for (std::size_t d = 1;; ++d) {
    const auto& prev = levels[d - 1];
    struct Candidate {
      std::vector<std::size_t> word;
      std::size_t letter, parent;
      Weight weight;
      std::vector<QVector> e_image;
    };
    std::vector<Candidate> cands;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < prev.size(); ++p) {
        Candidate c;
        c.letter = j;
        c.parent = p;
        c.word.push_back(j);
        c.word.insert(c.word.end(), prev[p].word.begin(), prev[p].word.end());
        c.weight = prev[p].weight;
        for (std::size_t i = 0; i < n; ++i) c.weight[i] -= cd.cartan_matrix[i][j];
        // e_i f_j p = f_j (e_i p) + delta_ij <wt p, alpha_i^vee> p
        c.e_image.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          QVector v(prev.size(), Rational(0));
          if (d >= 2) {
            const QVector ep = prev[p].e_image[i];
            v = f_maps[d - 2][j] * ep;
          }
          if (i == j) v[p] += prev[p].weight[i];
          c.e_image[i] = v;
        }
        cands.push_back(std::move(c));
      }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.word < b.word; });

    const QMatrix& gp = grams[d - 1];
    // <f_j p, c> = <p, e_j c>
    auto pair = [&](const Candidate& a, const Candidate& b) -> Rational {
      if (a.weight != b.weight) return Rational(0);
      const QVector& ec = b.e_image[a.letter];
      Rational s = 0;
      for (std::size_t k = 0; k < prev.size(); ++k)
        if (ec[k] != 0) s += gp(a.parent, k) * ec[k];
      return s;
    };

    std::vector<std::size_t> chosen;
    std::map<Weight, std::vector<std::size_t>> chosen_by_weight;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      auto& same = chosen_by_weight[cands[c].weight];
      std::vector<std::size_t> trial = same;
      trial.push_back(c);
      QMatrix gm(trial.size(), trial.size());
      for (std::size_t a = 0; a < trial.size(); ++a)
        for (std::size_t b = 0; b < trial.size(); ++b) gm(a, b) = pair(cands[trial[a]], cands[trial[b]]);
      if (rank(gm) == trial.size()) {
        same.push_back(c);
        chosen.push_back(c);
      }
    }
    if (chosen.empty()) break;

    std::vector<Vec> level;
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      const auto& c = cands[chosen[k]];
      level.push_back(Vec{c.weight, c.word, d, k, c.parent, c.letter, c.e_image});
    }
    QMatrix gram(chosen.size(), chosen.size());
    for (std::size_t a = 0; a < chosen.size(); ++a)
      for (std::size_t b = 0; b < chosen.size(); ++b) gram(a, b) = pair(cands[chosen[a]], cands[chosen[b]]);

    // Coordinates of every candidate f_j p in the chosen basis (projection mod radical).
    std::vector<QMatrix> fm(n, QMatrix(chosen.size(), prev.size()));
    std::map<Weight, QMatrix> inv_blocks;
    for (auto& [w, idx] : chosen_by_weight) {
      if (idx.empty()) continue;
      QMatrix blk(idx.size(), idx.size());
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b) blk(a, b) = pair(cands[idx[a]], cands[idx[b]]);
      inv_blocks[w] = inverse(blk);
    }
    std::vector<std::size_t> local_of(cands.size());
    for (std::size_t k = 0; k < chosen.size(); ++k) local_of[chosen[k]] = k;
    for (const auto& c : cands) {
      auto it = chosen_by_weight.find(c.weight);
      if (it == chosen_by_weight.end() || it->second.empty()) continue;  // lies in the radical
      const auto& idx = it->second;
      QVector pairings(idx.size());
      for (std::size_t a = 0; a < idx.size(); ++a) pairings[a] = pair(cands[idx[a]], c);
      const QVector x = inv_blocks[c.weight] * pairings;
      for (std::size_t a = 0; a < idx.size(); ++a) fm[c.letter](local_of[idx[a]], c.parent) = x[a];
    }
    f_maps.push_back(std::move(fm));
    levels.push_back(std::move(level));
    grams.push_back(std::move(gram));
  }

  // Flatten.
  Irrep rep;
  rep.highest_weight = lambda;
  std::vector<std::size_t> offset;
  std::size_t total = 0;
  for (const auto& lv : levels) {
    offset.push_back(total);
    total += lv.size();
  }
  rep.dimension = total;
  for (const auto& lv : levels)
    for (const auto& v : lv) {
      rep.weights.push_back(v.weight);
      rep.words.push_back(v.word);
    }
  rep.gram = QMatrix(total, total);
  for (std::size_t d = 0; d < levels.size(); ++d)
    for (std::size_t a = 0; a < levels[d].size(); ++a)
      for (std::size_t b = 0; b < levels[d].size(); ++b) rep.gram(offset[d] + a, offset[d] + b) = grams[d](a, b);

  std::vector<QMatrix> e_mats(n, QMatrix(total, total)), f_mats(n, QMatrix(total, total)), h_mats(n, QMatrix(total, total));
  for (std::size_t d = 0; d < levels.size(); ++d)
    for (std::size_t a = 0; a < levels[d].size(); ++a) {
      const auto& v = levels[d][a];
      for (std::size_t i = 0; i < n; ++i) {
        h_mats[i](offset[d] + a, offset[d] + a) = v.weight[i];
        if (d >= 1)
          for (std::size_t k = 0; k < v.e_image[i].size(); ++k)
            e_mats[i](offset[d - 1] + k, offset[d] + a) = v.e_image[i][k];
        if (d + 1 < levels.size())
          for (std::size_t k = 0; k < levels[d + 1].size(); ++k)
            f_mats[i](offset[d + 1] + k, offset[d] + a) = f_maps[d][i](k, a);
      }
    }
  rep.action = detail::extend_action(g, e_mats, f_mats, h_mats);
  return rep;
}

/// Contragredient module: x acts by -x^T; the form becomes the inverse Gram.
inline Irrep dualize(const AlgebraBasis& g, const Irrep& rep) {
  Irrep d;
  d.dimension = rep.dimension;
  d.dual = !rep.dual;
  for (const auto& w : rep.weights) {
    Weight neg = w;
    for (auto& x : neg) x = -x;
    d.weights.push_back(neg);
  }
  d.words = rep.words;
  for (const auto& m : rep.action) d.action.push_back(-m.transpose());
  d.gram = inverse(rep.gram);
  // Highest weight of the dual: the dominant weight among the negated weights.
  d.highest_weight = Weight(g.cartan.rank, 0);
  for (const auto& w : d.weights)
    if (is_dominant_integral(w)) {
      Weight best = d.highest_weight;
      // the highest weight is the unique dominant weight of maximal (w, w)
      if (g.cartan.form(w, w) > g.cartan.form(best, best)) d.highest_weight = w;
    }
  return d;
}

/// sum_a x_a x^a acting on the module.
inline QMatrix casimir_matrix(const AlgebraBasis& g, const Irrep& rep) {
  QMatrix c(rep.dimension, rep.dimension);
  for (const auto& [a, b, coeff] : g.casimir_terms()) c += (rep.action[a] * rep.action[b]) * coeff;
  return c;
}

/// Weight multiset (formal character) as a sorted list.
inline std::vector<Weight> character(const Irrep& rep) {
  auto w = rep.weights;
  std::sort(w.begin(), w.end());
  return w;
}

// ---------------------------------------------------------------------------

/// Ordered tensor product of irreps (factors may be dualized).
class TensorSpace {
 public:
  TensorSpace(const AlgebraBasis& g, std::vector<Irrep> factors) : g_(&g), factors_(std::move(factors)) {
    dimension_ = 1;
    for (const auto& f : factors_) dimension_ *= f.dimension;
    strides_.assign(factors_.size(), 1);
    for (std::size_t l = factors_.size(); l-- > 1;) strides_[l - 1] = strides_[l] * factors_[l].dimension;
  }

  const AlgebraBasis& algebra() const { return *g_; }
  const std::vector<Irrep>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  std::size_t dimension() const { return dimension_; }

  std::vector<std::size_t> multi_index(std::size_t flat) const {
    std::vector<std::size_t> idx(factors_.size());
    for (std::size_t l = 0; l < factors_.size(); ++l) {
      idx[l] = flat / strides_[l];
      flat %= strides_[l];
    }
    return idx;
  }
  std::size_t flat_index(const std::vector<std::size_t>& idx) const {
    std::size_t f = 0;
    for (std::size_t l = 0; l < idx.size(); ++l) f += idx[l] * strides_[l];
    return f;
  }

  Weight weight_of(std::size_t flat) const {
    const auto idx = multi_index(flat);
    Weight w(g_->cartan.rank, 0);
    for (std::size_t l = 0; l < idx.size(); ++l)
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += factors_[l].weights[idx[l]][i];
    return w;
  }

  /// Operator acting by `op_l` in slot l and `op_p` in slot p (identity elsewhere).
  QSparse embed(const std::vector<std::pair<std::size_t, const QMatrix*>>& slot_ops) const {
    std::vector<const QMatrix*> ops(factors_.size(), nullptr);
    for (const auto& [slot, m] : slot_ops) {
      if (slot >= factors_.size()) throw std::out_of_range("TensorSpace::embed: slot out of range");
      ops[slot] = m;
    }
    std::vector<QSparse::Row> rows(dimension_);
    for (std::size_t col = 0; col < dimension_; ++col) {
      // image of basis vector col: product over slots
      std::vector<std::pair<std::vector<std::size_t>, Rational>> terms{{multi_index(col), Rational(1)}};
      for (std::size_t l = 0; l < factors_.size(); ++l) {
        if (!ops[l]) continue;
        std::vector<std::pair<std::vector<std::size_t>, Rational>> next;
        for (const auto& [idx, c] : terms)
          for (std::size_t r = 0; r < factors_[l].dimension; ++r) {
            const Rational& v = (*ops[l])(r, idx[l]);
            if (v == 0) continue;
            auto j = idx;
            j[l] = r;
            next.emplace_back(j, c * v);
          }
        terms = std::move(next);
      }
      for (const auto& [idx, c] : terms) rows[flat_index(idx)].emplace_back(col, c);
    }
    for (auto& r : rows) std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return QSparse(dimension_, dimension_, std::move(rows));
  }

  /// Diagonal action Delta(x_a) = sum_l (x_a)_(l).
  QSparse diagonal_action(std::size_t a) const {
    QSparse total(dimension_, dimension_);
    for (std::size_t l = 0; l < factors_.size(); ++l) total = total + embed({{l, &factors_[l].action[a]}});
    return total;
  }

  /// sum_a x_a (x) x^a acting in slots l and p.
  QSparse casimir_pair(std::size_t l, std::size_t p) const {
    QSparse total(dimension_, dimension_);
    for (const auto& [a, b, coeff] : g_->casimir_terms())
      total = total + coeff * embed({{l, &factors_[l].action[a]}, {p, &factors_[p].action[b]}});
    return total;
  }

 private:
  const AlgebraBasis* g_;
  std::vector<Irrep> factors_;
  std::size_t dimension_ = 0;
  std::vector<std::size_t> strides_;
};

struct InvariantSpace {
  QMatrix basis;  // columns are invariant vectors in flat coordinates
  std::size_t dimension() const { return basis.cols(); }
};

/// Kernel of the diagonal action. Invariants have weight zero and are killed by
/// the Chevalley generators, which generate g.
inline InvariantSpace invariant_subspace(const TensorSpace& ts) {
  const auto& g = ts.algebra();
  std::vector<std::size_t> zero_cols;
  for (std::size_t i = 0; i < ts.dimension(); ++i) {
    const Weight w = ts.weight_of(i);
    if (std::all_of(w.begin(), w.end(), [](long x) { return x == 0; })) zero_cols.push_back(i);
  }
  InvariantSpace inv;
  if (zero_cols.empty()) {
    inv.basis = QMatrix(ts.dimension(), 0);
    return inv;
  }
  std::vector<std::size_t> col_pos(ts.dimension(), SIZE_MAX);
  for (std::size_t k = 0; k < zero_cols.size(); ++k) col_pos[zero_cols[k]] = k;

  std::vector<QVector> eq_rows;
  for (std::size_t i = 0; i < g.cartan.rank; ++i)
    for (std::size_t gen : {g.e[i], g.f[i]}) {
      const QSparse op = ts.diagonal_action(gen);
      for (std::size_t r = 0; r < op.rows(); ++r) {
        QVector row(zero_cols.size(), Rational(0));
        bool any = false;
        for (const auto& [c, v] : op.row(r))
          if (col_pos[c] != SIZE_MAX && v != 0) {
            row[col_pos[c]] += v;
            any = true;
          }
        if (any) eq_rows.push_back(std::move(row));
      }
    }
  QMatrix system(eq_rows.size(), zero_cols.size());
  for (std::size_t r = 0; r < eq_rows.size(); ++r)
    for (std::size_t c = 0; c < zero_cols.size(); ++c) system(r, c) = eq_rows[r][c];
  const QMatrix kernel = nullspace(system);
  inv.basis = QMatrix(ts.dimension(), kernel.cols());
  for (std::size_t k = 0; k < kernel.cols(); ++k)
    for (std::size_t c = 0; c < zero_cols.size(); ++c) inv.basis(zero_cols[c], k) = kernel(c, k);
  return inv;
}

inline QVector apply(const QSparse& m, const QVector& v) {
  QVector out(m.rows(), Rational(0));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (const auto& [c, x] : m.row(r))
      if (v[c] != 0) out[r] += x * v[c];
  return out;
}

}  // namespace wznw
