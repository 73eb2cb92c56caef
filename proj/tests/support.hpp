#pragma once

// Shared generators and brute-force oracles for the test binaries.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tmon/logic.hpp"
#include "tmon/monoid.hpp"

namespace testsupport {

using tmon::Elem;
using tmon::FinMonoid;

/// Monoid of all composites of the generators (maps on {0..points-1}),
/// multiplication f·g = f∘g. Elements are numbered in discovery order from
/// the identity.
inline FinMonoid transformation_monoid(const std::vector<std::vector<int>>& gens, int points) {
  std::vector<int> id(points);
  for (int i = 0; i < points; ++i) id[i] = i;
  std::vector<std::vector<int>> elems{id};
  std::map<std::vector<int>, Elem> index{{id, 0}};
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (const auto& g : gens) {
      std::vector<int> h(points);
      for (int p = 0; p < points; ++p) h[p] = g[elems[i][p]];
      if (!index.count(h)) {
        index[h] = static_cast<Elem>(elems.size());
        elems.push_back(h);
      }
    }
  }
  const std::size_t n = elems.size();
  std::vector<std::vector<Elem>> table(n, std::vector<Elem>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      std::vector<int> h(points);
      for (int p = 0; p < points; ++p) h[p] = elems[a][elems[b][p]];
      table[a][b] = index.at(h);
    }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("m" + std::to_string(i));
  return tmon::validate_monoid(labels, table, Elem{0});
}

/// Seeded transformation monoids with at most max_size elements.
inline std::vector<FinMonoid> random_monoids(unsigned seed, std::size_t count, std::size_t max_size) {
  std::mt19937 rng(seed);
  std::vector<FinMonoid> out;
  while (out.size() < count) {
    const int points = 2 + static_cast<int>(rng() % 3);
    const int ngens = 1 + static_cast<int>(rng() % 2);
    std::vector<std::vector<int>> gens(ngens, std::vector<int>(points));
    for (auto& g : gens)
      for (auto& v : g) v = static_cast<int>(rng() % points);
    FinMonoid m = transformation_monoid(gens, points);
    if (m.size() <= max_size) out.push_back(std::move(m));
  }
  return out;
}

/// All set partitions of {0..n-1} as block lists, by recursive insertion.
inline std::vector<std::vector<std::vector<Elem>>> all_partitions(std::size_t n) {
  std::vector<std::vector<std::vector<Elem>>> out{{}};
  for (Elem x = 0; x < n; ++x) {
    std::vector<std::vector<std::vector<Elem>>> next;
    for (const auto& p : out) {
      for (std::size_t b = 0; b < p.size(); ++b) {
        auto q = p;
        q[b].push_back(x);
        next.push_back(q);
      }
      auto q = p;
      q.push_back({x});
      next.push_back(q);
    }
    out = std::move(next);
  }
  return out;
}

inline std::vector<int> block_of(const std::vector<std::vector<Elem>>& blocks, std::size_t n) {
  std::vector<int> b(n);
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (Elem x : blocks[i]) b[x] = static_cast<int>(i);
  return b;
}

inline bool naive_left_compatible(const FinMonoid& m, const std::vector<std::vector<Elem>>& blocks) {
  const auto b = block_of(blocks, m.size());
  for (Elem a = 0; a < m.size(); ++a)
    for (Elem x = 0; x < m.size(); ++x)
      for (Elem y = 0; y < m.size(); ++y)
        if (b[x] == b[y] && b[m.mul(a, x)] != b[m.mul(a, y)]) return false;
  return true;
}

/// Every left congruence by brute force, each as a block-id vector.
inline std::vector<std::vector<int>> naive_left_congruences(const FinMonoid& m) {
  std::vector<std::vector<int>> out;
  for (const auto& p : all_partitions(m.size()))
    if (naive_left_compatible(m, p)) out.push_back(block_of(p, m.size()));
  return out;
}

inline bool same_relation(const std::vector<int>& b, const tmon::Partition& p) {
  for (Elem x = 0; x < p.size(); ++x)
    for (Elem y = 0; y < p.size(); ++y)
      if ((b[x] == b[y]) != p.same(x, y)) return false;
  return true;
}

// --- formulas -------------------------------------------------------------

using tmon::Formula;
using tmon::Node;
using tmon::Term;

/// f with free occurrences of var replaced by the constant c.
inline Formula substitute(const Formula& f, const std::string& var, Node c) {
  using K = Formula::Kind;
  auto t = [&](const Term& x) { return x.is_var() && x.name() == var ? Term::constant(c) : x; };
  switch (f.kind()) {
    case K::True:
    case K::False: return f;
    case K::Member: return Formula::member(t(f.lhs()), t(f.rhs()));
    case K::Equal: return Formula::equal(t(f.lhs()), t(f.rhs()));
    case K::Not: return Formula::negate(substitute(f.left(), var, c));
    case K::And: return Formula::conj(substitute(f.left(), var, c), substitute(f.right(), var, c));
    case K::Or: return Formula::disj(substitute(f.left(), var, c), substitute(f.right(), var, c));
    case K::Implies: return Formula::implies(substitute(f.left(), var, c), substitute(f.right(), var, c));
    case K::BoundedForall:
    case K::BoundedExists: {
      const Formula body = f.var() == var ? f.body() : substitute(f.body(), var, c);
      return f.kind() == K::BoundedForall ? Formula::bounded_forall(f.var(), t(f.bound()), body)
                                          : Formula::bounded_exists(f.var(), t(f.bound()), body);
    }
    case K::RankedForall:
    case K::RankedExists: {
      const Formula body = f.var() == var ? f.body() : substitute(f.body(), var, c);
      return f.kind() == K::RankedForall ? Formula::ranked_forall(f.var(), body) : Formula::ranked_exists(f.var(), body);
    }
  }
  return f;
}

/// Truth of a closed formula by substituting witnesses; ranked quantifiers
/// range over domain.
inline bool naive_eval(const Formula& f, const std::vector<Node>& domain) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: return true;
    case K::False: return false;
    case K::Member: {
      const Node b = f.rhs().node();
      if (b.is_atom()) return false;
      for (Node c : b.children())
        if (c == f.lhs().node()) return true;
      return false;
    }
    case K::Equal: return f.lhs().node() == f.rhs().node();
    case K::Not: return !naive_eval(f.left(), domain);
    case K::And: return naive_eval(f.left(), domain) && naive_eval(f.right(), domain);
    case K::Or: return naive_eval(f.left(), domain) || naive_eval(f.right(), domain);
    case K::Implies: return !naive_eval(f.left(), domain) || naive_eval(f.right(), domain);
    case K::BoundedForall:
    case K::BoundedExists: {
      const bool all = f.kind() == K::BoundedForall;
      const Node b = f.bound().node();
      if (!b.is_atom())
        for (Node c : b.children())
          if (naive_eval(substitute(f.body(), f.var(), c), domain) != all) return !all;
      return all;
    }
    case K::RankedForall:
    case K::RankedExists: {
      const bool all = f.kind() == K::RankedForall;
      for (Node c : domain)
        if (naive_eval(substitute(f.body(), f.var(), c), domain) != all) return !all;
      return all;
    }
  }
  return false;
}

/// Random formula of depth at most `depth` over the given variable names.
inline Formula random_formula(std::mt19937& rng, std::size_t depth, const std::vector<std::string>& vars,
                              bool ranked = true) {
  auto term = [&] { return Term::var(vars[rng() % vars.size()]); };
  if (depth <= 1) {
    switch (rng() % 6) {
      case 0: return Formula::truth();
      case 1: return Formula::falsity();
      case 2:
      case 3: return Formula::member(term(), term());
      default: return Formula::equal(term(), term());
    }
  }
  const std::size_t sub = depth - 1;
  switch (rng() % (ranked ? 9 : 7)) {
    case 0: return random_formula(rng, 1, vars, ranked);
    case 1: return Formula::negate(random_formula(rng, sub, vars, ranked));
    case 2: return Formula::conj(random_formula(rng, sub, vars, ranked), random_formula(rng, sub, vars, ranked));
    case 3: return Formula::disj(random_formula(rng, sub, vars, ranked), random_formula(rng, sub, vars, ranked));
    case 4: return Formula::implies(random_formula(rng, sub, vars, ranked), random_formula(rng, sub, vars, ranked));
    case 5: {
      const std::string v = vars[rng() % vars.size()];
      return Formula::bounded_forall(v, term(), random_formula(rng, sub, vars, ranked));
    }
    case 6: {
      const std::string v = vars[rng() % vars.size()];
      return Formula::bounded_exists(v, term(), random_formula(rng, sub, vars, ranked));
    }
    case 7: return Formula::ranked_forall(vars[rng() % vars.size()], random_formula(rng, sub, vars, ranked));
    default: return Formula::ranked_exists(vars[rng() % vars.size()], random_formula(rng, sub, vars, ranked));
  }
}

// --- transfer instances ----------------------------------------------------

/// An instance whose hypotheses hold by construction: F principal on S, every
/// fibre meets S, k agrees with j on S and permutes j's values inside fibres
/// elsewhere.
inline tmon::TransferInstance good_transfer_instance(std::mt19937& rng) {
  tmon::TransferInstance in;
  in.x_points = 2 + rng() % 7;
  in.y_points = 1 + rng() % std::min<std::size_t>(in.x_points, 4);
  // S has at least y_points elements
  std::vector<std::uint32_t> order(in.x_points);
  for (std::uint32_t i = 0; i < in.x_points; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t s_size = in.y_points + rng() % (in.x_points - in.y_points + 1);
  tmon::Subset s;
  for (std::size_t i = 0; i < s_size; ++i) s.insert(order[i]);
  in.filter = tmon::FiniteFilter::principal(in.x_points, s);
  in.f.resize(in.x_points);
  for (std::size_t i = 0; i < in.x_points; ++i)
    in.f[order[i]] = i < in.y_points ? static_cast<std::uint32_t>(i) : static_cast<std::uint32_t>(rng() % in.y_points);
  for (std::size_t x = 0; x < in.x_points; ++x) in.j.on_x.push_back(100 + static_cast<std::int64_t>(x));
  for (std::size_t y = 0; y < in.y_points; ++y) in.j.on_y.push_back(static_cast<std::int64_t>(rng() % 50));
  in.k = in.j;
  // permute j's values outside S within each fibre
  for (std::uint32_t y = 0; y < in.y_points; ++y) {
    std::vector<std::uint32_t> outside;
    for (std::uint32_t x = 0; x < in.x_points; ++x)
      if (in.f[x] == y && !s.contains(x)) outside.push_back(x);
    auto perm = outside;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < outside.size(); ++i) in.k.on_x[outside[i]] = in.j.on_x[perm[i]];
  }
  return in;
}

/// The hypotheses, checked directly from their definitions.
inline bool transfer_hypotheses_hold(const tmon::TransferInstance& in) {
  const auto& F = in.filter.members;
  if (F.empty()) return false;
  const auto full = tmon::Subset::all(in.x_points);
  for (auto a : F) {
    if (a.empty()) return false;
    for (auto b : F)
      if (!in.filter.contains(a & b)) return false;
    for (std::uint64_t sup = 0; sup <= full.bits; ++sup)
      if ((sup & a.bits) == a.bits && !in.filter.contains(tmon::Subset{sup})) return false;
  }
  for (std::uint32_t y = 0; y < in.y_points; ++y)
    for (auto a : F) {
      bool meets = false;
      for (std::uint32_t x = 0; x < in.x_points; ++x) meets = meets || (in.f[x] == y && a.contains(x));
      if (!meets) return false;
    }
  auto pairs = [&](const tmon::StructureMap& m) {
    std::set<std::pair<std::int64_t, std::int64_t>> g;
    for (std::uint32_t x = 0; x < in.x_points; ++x) g.emplace(m.on_x[x], m.on_y[in.f[x]]);
    return g;
  };
  auto functional = [](const std::set<std::pair<std::int64_t, std::int64_t>>& g) {
    std::set<std::int64_t> keys;
    for (auto [a, b] : g)
      if (!keys.insert(a).second) return false;
    return true;
  };
  const auto gj = pairs(in.j), gk = pairs(in.k);
  if (!functional(gj) || !functional(gk)) return false;
  bool agree_on_member = false;
  for (auto a : F) {
    bool all = true;
    for (std::uint32_t x = 0; x < in.x_points; ++x)
      if (a.contains(x)) all = all && in.j.on_x[x] == in.k.on_x[x];
    agree_on_member = agree_on_member || all;
  }
  return agree_on_member && gj == gk;
}

}  // namespace testsupport
