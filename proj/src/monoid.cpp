#include "tmon/monoid.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_set>

namespace tmon {
namespace {

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::uint32_t> parent;
};

std::string triple_str(const std::vector<std::string>& l, Elem a, Elem b, Elem c) {
  return "(" + l[a] + ", " + l[b] + ", " + l[c] + ")";
}

}  // namespace

std::vector<Elem> Subset::elements() const {
  std::vector<Elem> out;
  for (std::uint64_t b = bits; b; b &= b - 1) out.push_back(static_cast<Elem>(std::countr_zero(b)));
  return out;
}

// --- FinMonoid ---------------------------------------------------------------

FinMonoid validate_monoid(std::vector<std::string> labels, const std::vector<std::vector<Elem>>& table,
                          std::optional<Elem> identity) {
  using Law = MonoidLawError::Law;
  const std::size_t n = labels.size();
  if (n == 0) throw MonoidLawError(Law::Shape, {0, 0, 0}, "monoid must have at least one element");
  {
    std::unordered_set<std::string> seen;
    for (const auto& l : labels) {
      if (!seen.insert(l).second) throw MonoidLawError(Law::Shape, {0, 0, 0}, "duplicate element label '" + l + "'");
    }
  }
  if (table.size() != n) {
    throw MonoidLawError(Law::Shape, {0, 0, 0},
                         "table has " + std::to_string(table.size()) + " rows, expected " + std::to_string(n));
  }
  FinMonoid m;
  m.labels_ = std::move(labels);
  m.table_.reserve(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    if (table[a].size() != n) {
      throw MonoidLawError(Law::Shape, {static_cast<Elem>(a), 0, 0},
                           "table row " + std::to_string(a) + " has " + std::to_string(table[a].size()) +
                               " entries, expected " + std::to_string(n));
    }
    for (std::size_t b = 0; b < n; ++b) {
      if (table[a][b] >= n) {
        throw MonoidLawError(Law::Shape, {static_cast<Elem>(a), static_cast<Elem>(b), 0},
                             "table entry [" + std::to_string(a) + "][" + std::to_string(b) + "] out of range");
      }
      m.table_.push_back(table[a][b]);
    }
  }
  for (Elem a = 0; a < n; ++a) {
    for (Elem b = 0; b < n; ++b) {
      for (Elem c = 0; c < n; ++c) {
        if (m.mul(a, m.mul(b, c)) != m.mul(m.mul(a, b), c)) {
          throw MonoidLawError(Law::Associativity, {a, b, c},
                               "associativity fails at " + triple_str(m.labels_, a, b, c));
        }
      }
    }
  }
  auto identity_failure = [&](Elem e) -> std::optional<Elem> {
    for (Elem x = 0; x < n; ++x) {
      if (m.mul(e, x) != x || m.mul(x, e) != x) return x;
    }
    return std::nullopt;
  };
  if (identity) {
    if (*identity >= n) throw MonoidLawError(Law::Identity, {*identity, 0, 0}, "identity index out of range");
    if (auto bad = identity_failure(*identity)) {
      throw MonoidLawError(Law::Identity, {*bad, 0, 0},
                           "identity law fails for " + m.labels_[*identity] + " at " + m.labels_[*bad]);
    }
    m.identity_ = *identity;
  } else {
    bool found = false;
    for (Elem e = 0; e < n && !found; ++e) {
      if (!identity_failure(e)) {
        m.identity_ = e;
        found = true;
      }
    }
    if (!found) throw MonoidLawError(Law::Identity, {0, 0, 0}, "no two-sided identity element");
  }
  return m;
}

std::optional<Elem> FinMonoid::find(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<Elem>(it - labels_.begin());
}

std::vector<std::vector<Elem>> FinMonoid::table() const {
  std::vector<std::vector<Elem>> t(size(), std::vector<Elem>(size()));
  for (Elem a = 0; a < size(); ++a)
    for (Elem b = 0; b < size(); ++b) t[a][b] = mul(a, b);
  return t;
}

FinMonoid FinMonoid::opposite() const {
  FinMonoid op = *this;
  for (Elem a = 0; a < size(); ++a)
    for (Elem b = 0; b < size(); ++b) op.table_[a * size() + b] = mul(b, a);
  return op;
}

bool FinMonoid::is_commutative() const {
  for (Elem a = 0; a < size(); ++a)
    for (Elem b = a + 1; b < size(); ++b)
      if (mul(a, b) != mul(b, a)) return false;
  return true;
}

// --- Partition ---------------------------------------------------------------

Partition::Partition(std::vector<std::uint32_t> raw) {
  // renumber by first occurrence
  std::map<std::uint32_t, std::uint32_t> rename;
  block_.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, fresh] = rename.emplace(raw[i], static_cast<std::uint32_t>(rename.size()));
    block_[i] = it->second;
  }
  blocks_ = rename.size();
}

Partition Partition::diagonal(std::size_t n) {
  std::vector<std::uint32_t> raw(n);
  std::iota(raw.begin(), raw.end(), 0u);
  return Partition(std::move(raw));
}

Partition Partition::full(std::size_t n) { return Partition(std::vector<std::uint32_t>(n, 0)); }

Partition Partition::from_blocks(std::size_t n, const std::vector<std::vector<Elem>>& blocks) {
  constexpr std::uint32_t kUnset = ~0u;
  std::vector<std::uint32_t> raw(n, kUnset);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw InputError("partition block " + std::to_string(b) + " is empty");
    for (Elem x : blocks[b]) {
      if (x >= n) throw InputError("partition element " + std::to_string(x) + " out of range");
      if (raw[x] != kUnset) throw InputError("element " + std::to_string(x) + " appears in two blocks");
      raw[x] = static_cast<std::uint32_t>(b);
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (raw[x] == kUnset) throw InputError("partition does not cover element " + std::to_string(x));
  }
  return Partition(std::move(raw));
}

std::vector<std::vector<Elem>> Partition::classes() const {
  std::vector<std::vector<Elem>> out(blocks_);
  for (Elem x = 0; x < block_.size(); ++x) out[block_[x]].push_back(x);
  return out;
}

Subset Partition::class_of(Elem x) const {
  Subset s;
  for (Elem y = 0; y < block_.size(); ++y)
    if (block_[y] == block_[x]) s.insert(y);
  return s;
}

bool Partition::refines(const Partition& other) const {
  // this ⊆ other iff every block of this maps into a single block of other
  std::vector<std::int64_t> image(blocks_, -1);
  for (std::size_t x = 0; x < block_.size(); ++x) {
    auto& slot = image[block_[x]];
    if (slot < 0) {
      slot = other.block_[x];
    } else if (slot != other.block_[x]) {
      return false;
    }
  }
  return true;
}

Partition Partition::meet(const Partition& other) const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> keys(block_.size());
  for (std::size_t x = 0; x < block_.size(); ++x) keys[x] = {block_[x], other.block_[x]};
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> ids;
  std::vector<std::uint32_t> raw(block_.size());
  for (std::size_t x = 0; x < keys.size(); ++x) {
    raw[x] = ids.emplace(keys[x], static_cast<std::uint32_t>(ids.size())).first->second;
  }
  return Partition(std::move(raw));
}

// --- Left congruences -------------------------------------------------------

std::optional<LeftCompatViolation> is_left_congruence(const FinMonoid& m, const Partition& p) {
  if (p.size() != m.size()) throw InputError("partition size does not match monoid size");
  for (Elem a = 0; a < m.size(); ++a)
    for (Elem x = 0; x < m.size(); ++x)
      for (Elem y = x + 1; y < m.size(); ++y)
        if (p.same(x, y) && !p.same(m.mul(a, x), m.mul(a, y))) return LeftCompatViolation{a, x, y};
  return std::nullopt;
}

LeftCongruence LeftCongruence::checked(const FinMonoid& m, const Partition& p) {
  if (auto v = is_left_congruence(m, p)) {
    throw InputError("not a left congruence: " + m.label(v->x) + " ~ " + m.label(v->y) + " but " +
                     m.label(v->a) + "·" + m.label(v->x) + " ≁ " + m.label(v->a) + "·" + m.label(v->y));
  }
  return LeftCongruence(p);
}

std::vector<std::pair<Elem, Elem>> LeftCongruence::pairs() const {
  std::vector<std::pair<Elem, Elem>> out;
  for (Elem x = 0; x < size(); ++x)
    for (Elem y = 0; y < size(); ++y)
      if (same(x, y)) out.emplace_back(x, y);
  return out;
}

LeftCongruence left_congruence_closure(const FinMonoid& m, const std::vector<std::pair<Elem, Elem>>& pairs) {
  // The equivalence generated by {(ax, ay)} is already left-compatible: a
  // chain of such links is carried by b to a chain of (ba)-links.
  UnionFind uf(m.size());
  for (auto [x, y] : pairs) {
    if (x >= m.size() || y >= m.size()) throw InputError("relation pair out of range");
    for (Elem a = 0; a < m.size(); ++a) uf.unite(m.mul(a, x), m.mul(a, y));
  }
  std::vector<std::uint32_t> roots(m.size());
  for (Elem x = 0; x < m.size(); ++x) roots[x] = uf.find(x);
  return LeftCongruence(Partition::from_keys(roots));
}

LeftCongruence right_translate(const FinMonoid& m, const LeftCongruence& r, Elem by) {
  std::vector<std::uint32_t> keys(m.size());
  for (Elem n = 0; n < m.size(); ++n) keys[n] = r.block(m.mul(n, by));
  return LeftCongruence(Partition::from_keys(keys));
}

std::vector<LeftCongruence> enumerate_left_congruences(const FinMonoid& m) {
  const std::size_t n = m.size();
  if (n > 12) throw CapExceeded("left congruence enumeration is limited to 12 elements");
  std::vector<LeftCongruence> out;
  std::vector<std::uint32_t> rgs(n, 0);
  // restricted growth strings: rgs[0] = 0, rgs[i] <= 1 + max(rgs[0..i))
  std::vector<std::uint32_t> prefix_max(n, 0);
  while (true) {
    std::vector<std::vector<Elem>> blocks;
    for (Elem x = 0; x < n; ++x) {
      if (rgs[x] >= blocks.size()) blocks.resize(rgs[x] + 1);
      blocks[rgs[x]].push_back(x);
    }
    Partition p = Partition::from_blocks(n, blocks);
    if (!is_left_congruence(m, p)) out.push_back(LeftCongruence::checked(m, p));
    // next string
    std::size_t i = n;
    while (i-- > 1) {
      if (rgs[i] <= prefix_max[i - 1]) {
        ++rgs[i];
        prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
          rgs[j] = 0;
          prefix_max[j] = prefix_max[i];
        }
        break;
      }
    }
    if (i == 0 || n <= 1) break;
  }
  return out;
}

// --- Filters ----------------------------------------------------------------

CongruenceFilter filter_close(const FinMonoid& m, const std::vector<LeftCongruence>& seeds) {
  LeftCongruence r0 = LeftCongruence::full(m);
  for (const auto& s : seeds) {
    if (s.size() != m.size()) throw InputError("filter seed has wrong carrier size");
    for (Elem by = 0; by < m.size(); ++by) r0 = r0.meet(right_translate(m, s, by));
  }
  return CongruenceFilter{seeds, std::move(r0)};
}

FilterAxioms check_filter_axioms(const FinMonoid& m, const std::vector<LeftCongruence>& family) {
  auto member = [&](const LeftCongruence& r) { return std::find(family.begin(), family.end(), r) != family.end(); };
  FilterAxioms ax;
  for (const auto& a : family) {
    for (const auto& b : family) {
      if (!member(a.meet(b))) ax.intersections = false;
    }
    for (Elem by = 0; by < m.size(); ++by) {
      if (!member(right_translate(m, a, by))) ax.right_translates = false;
    }
  }
  for (const auto& r : enumerate_left_congruences(m)) {
    bool above_member = false;
    for (const auto& a : family) above_member = above_member || a.refines(r);
    if (above_member && !member(r)) ax.upward = false;
    bool locally_covered = true;
    for (Elem x = 0; x < m.size() && locally_covered; ++x) {
      bool some = false;
      for (const auto& s : family) {
        some = some || s.partition().class_of(x).subset_of(r.partition().class_of(x));
      }
      locally_covered = some;
    }
    if (locally_covered && !member(r)) ax.local = false;
  }
  return ax;
}

// --- Topologies -------------------------------------------------------------

namespace {
void require_small(const FinMonoid& m) {
  if (m.size() > Subset::kMaxPoints) throw CapExceeded("topologies are limited to monoids with at most 64 elements");
}
}  // namespace

MonoidTopology MonoidTopology::discrete(const FinMonoid& m) {
  return from_filter(m, filter_close(m, {LeftCongruence::diagonal(m)}));
}

MonoidTopology MonoidTopology::indiscrete(const FinMonoid& m) {
  return from_filter(m, filter_close(m, {LeftCongruence::full(m)}));
}

MonoidTopology MonoidTopology::from_filter(const FinMonoid& m, const CongruenceFilter& f) {
  require_small(m);
  if (f.r0.size() != m.size()) throw InputError("filter carrier does not match monoid");
  MonoidTopology t;
  t.kind_ = Kind::Filter;
  t.r0_ = f.r0;
  t.filter_ = f;
  // classes of members are unions of R0-classes, so the R0-classes are the
  // minimal neighbourhoods
  for (const auto& cls : f.r0.classes()) {
    Subset s;
    for (Elem x : cls) s.insert(x);
    t.basis_.push_back(s);
  }
  t.nbhd_.resize(m.size());
  for (Elem x = 0; x < m.size(); ++x) t.nbhd_[x] = f.r0.partition().class_of(x);
  return t;
}

MonoidTopology MonoidTopology::from_basis(const FinMonoid& m, std::vector<Subset> basis) {
  require_small(m);
  MonoidTopology t;
  t.kind_ = Kind::Basis;
  const Subset all = Subset::all(m.size());
  for (const auto& b : basis) {
    if (!b.subset_of(all)) throw InputError("basis set contains elements outside the monoid");
  }
  t.basis_ = std::move(basis);
  t.nbhd_.assign(m.size(), all);
  for (const auto& b : t.basis_) {
    for (Elem x : b.elements()) t.nbhd_[x] = t.nbhd_[x] & b;
  }
  return t;
}

bool MonoidTopology::is_open(Subset u) const {
  for (Elem x : u.elements()) {
    if (x >= size() || !nbhd_[x].subset_of(u)) return false;
  }
  return true;
}

std::optional<std::pair<Elem, Elem>> t0_violation(const MonoidTopology& t) {
  for (Elem x = 0; x < t.size(); ++x)
    for (Elem y = x + 1; y < t.size(); ++y)
      if (t.minimal_open(x).contains(y) && t.minimal_open(y).contains(x)) return std::pair{x, y};
  return std::nullopt;
}

bool is_discrete(const MonoidTopology& t) {
  for (Elem x = 0; x < t.size(); ++x)
    if (t.minimal_open(x) != Subset::single(x)) return false;
  return true;
}

bool has_open_classes(const MonoidTopology& t, const Partition& r) {
  for (Elem x = 0; x < r.size(); ++x)
    if (!t.is_open(r.class_of(x))) return false;
  return true;
}

}  // namespace tmon
