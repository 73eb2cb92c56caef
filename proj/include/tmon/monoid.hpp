#pragma once

// Finite monoids, left congruences, congruence filters and the topologies
// they generate.

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmon/error.hpp"

namespace tmon {

using Elem = std::uint32_t;

/// Subset of a carrier with at most 64 points.
struct Subset {
  std::uint64_t bits = 0;

  static constexpr std::size_t kMaxPoints = 64;

  static constexpr Subset single(Elem x) { return Subset{std::uint64_t{1} << x}; }
  static constexpr Subset all(std::size_t n) {
    return Subset{n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1};
  }
  constexpr bool contains(Elem x) const { return (bits >> x) & 1; }
  constexpr bool empty() const { return bits == 0; }
  constexpr std::size_t count() const { return static_cast<std::size_t>(std::popcount(bits)); }
  constexpr bool subset_of(Subset o) const { return (bits & ~o.bits) == 0; }
  constexpr void insert(Elem x) { bits |= std::uint64_t{1} << x; }
  std::vector<Elem> elements() const;

  friend constexpr Subset operator&(Subset a, Subset b) { return {a.bits & b.bits}; }
  friend constexpr Subset operator|(Subset a, Subset b) { return {a.bits | b.bits}; }
  friend constexpr bool operator==(Subset, Subset) = default;
  friend constexpr auto operator<=>(Subset a, Subset b) { return a.bits <=> b.bits; }
};

class FinMonoid {
 public:
  FinMonoid() = default;

  std::size_t size() const { return labels_.size(); }
  Elem mul(Elem a, Elem b) const { return table_[a * size() + b]; }
  Elem identity() const { return identity_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(Elem x) const { return labels_.at(x); }
  std::optional<Elem> find(const std::string& label) const;
  std::vector<std::vector<Elem>> table() const;

  /// Same carrier with multiplication a ∘op b = b·a.
  FinMonoid opposite() const;
  bool is_commutative() const;

  friend bool operator==(const FinMonoid&, const FinMonoid&) = default;

 private:
  friend FinMonoid validate_monoid(std::vector<std::string>, const std::vector<std::vector<Elem>>&,
                                   std::optional<Elem>);
  std::vector<std::string> labels_;
  std::vector<Elem> table_;
  Elem identity_ = 0;
};

/// A failed monoid law. For associativity, triple holds (a,b,c) with
/// a(bc) ≠ (ab)c; for identity, triple[0] is the first element that fails.
class MonoidLawError : public InputError {
 public:
  enum class Law { Shape, Associativity, Identity };
  MonoidLawError(Law law, std::array<Elem, 3> triple, const std::string& what)
      : InputError(what), law(law), triple(triple) {}
  Law law;
  std::array<Elem, 3> triple;
};

/// Checks shape, associativity over every triple and the identity laws.
/// When identity is omitted the unique two-sided identity is searched for.
FinMonoid validate_monoid(std::vector<std::string> labels,
                          const std::vector<std::vector<Elem>>& table,
                          std::optional<Elem> identity = std::nullopt);

/// Equivalence relation on {0, ..., n-1}, stored as block ids numbered by
/// first occurrence so that equal relations compare equal.
class Partition {
 public:
  Partition() = default;
  static Partition diagonal(std::size_t n);
  static Partition full(std::size_t n);
  static Partition from_blocks(std::size_t n, const std::vector<std::vector<Elem>>& blocks);
  /// x ~ y iff keys[x] == keys[y].
  template <class Key>
  static Partition from_keys(const std::vector<Key>& keys);

  std::size_t size() const { return block_.size(); }
  std::uint32_t block(Elem x) const { return block_[x]; }
  std::size_t block_count() const { return blocks_; }
  bool same(Elem x, Elem y) const { return block_[x] == block_[y]; }
  /// Blocks in order of their least element.
  std::vector<std::vector<Elem>> classes() const;
  Subset class_of(Elem x) const;
  /// this ⊆ other as sets of pairs.
  bool refines(const Partition& other) const;
  Partition meet(const Partition& other) const;
  bool is_diagonal() const { return blocks_ == block_.size(); }
  bool is_full() const { return blocks_ <= 1; }
  const std::vector<std::uint32_t>& blocks() const { return block_; }

  friend bool operator==(const Partition& a, const Partition& b) { return a.block_ == b.block_; }

 private:
  explicit Partition(std::vector<std::uint32_t> raw);
  std::vector<std::uint32_t> block_;
  std::size_t blocks_ = 0;
};

template <class Key>
Partition Partition::from_keys(const std::vector<Key>& keys) {
  std::vector<std::uint32_t> raw(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    raw[i] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 0; j < i; ++j) {
      if (keys[j] == keys[i]) {
        raw[i] = raw[j];
        break;
      }
    }
  }
  return Partition(std::move(raw));
}

/// Witness that a partition is not left-compatible: x ~ y but a·x ≁ a·y.
struct LeftCompatViolation {
  Elem a, x, y;
  friend bool operator==(const LeftCompatViolation&, const LeftCompatViolation&) = default;
};

/// Scans a (outer), then x < y; returns the first violation, or nullopt when
/// the partition is a left congruence.
std::optional<LeftCompatViolation> is_left_congruence(const FinMonoid& m, const Partition& p);

/// A partition of a monoid satisfying x ~ y ⇒ a·x ~ a·y. Only constructed
/// through operations that preserve left compatibility.
class LeftCongruence {
 public:
  LeftCongruence() = default;
  static LeftCongruence diagonal(const FinMonoid& m) { return LeftCongruence(Partition::diagonal(m.size())); }
  static LeftCongruence full(const FinMonoid& m) { return LeftCongruence(Partition::full(m.size())); }
  /// Throws InputError naming the violation when p is not left-compatible.
  static LeftCongruence checked(const FinMonoid& m, const Partition& p);

  const Partition& partition() const { return p_; }
  std::size_t size() const { return p_.size(); }
  bool same(Elem x, Elem y) const { return p_.same(x, y); }
  std::uint32_t block(Elem x) const { return p_.block(x); }
  std::size_t block_count() const { return p_.block_count(); }
  std::vector<std::vector<Elem>> classes() const { return p_.classes(); }
  bool refines(const LeftCongruence& o) const { return p_.refines(o.p_); }
  bool is_diagonal() const { return p_.is_diagonal(); }
  bool is_full() const { return p_.is_full(); }
  LeftCongruence meet(const LeftCongruence& o) const { return LeftCongruence(p_.meet(o.p_)); }
  std::vector<std::pair<Elem, Elem>> pairs() const;

  friend bool operator==(const LeftCongruence&, const LeftCongruence&) = default;

 private:
  explicit LeftCongruence(Partition p) : p_(std::move(p)) {}
  friend LeftCongruence left_congruence_closure(const FinMonoid&, const std::vector<std::pair<Elem, Elem>>&);
  friend LeftCongruence right_translate(const FinMonoid&, const LeftCongruence&, Elem);
  Partition p_;
};

/// Smallest left congruence containing the given pairs.
LeftCongruence left_congruence_closure(const FinMonoid& m, const std::vector<std::pair<Elem, Elem>>& pairs);

/// R·m⁻¹ = {(n, n′) : n·m R n′·m}.
LeftCongruence right_translate(const FinMonoid& m, const LeftCongruence& r, Elem by);

/// Every left congruence of m, in restricted-growth-string order.
/// Refuses carriers larger than 12 elements.
std::vector<LeftCongruence> enumerate_left_congruences(const FinMonoid& m);

/// A filter of left congruences, represented by its minimum R0. Members are
/// exactly the left congruences containing R0.
struct CongruenceFilter {
  std::vector<LeftCongruence> generators;
  LeftCongruence r0;

  bool contains(const LeftCongruence& r) const { return r0.refines(r); }
};

/// R0 = intersection of all right translates of all seeds (the full relation
/// when there are no seeds).
CongruenceFilter filter_close(const FinMonoid& m, const std::vector<LeftCongruence>& seeds);

/// Which of the four filter conditions an explicit family of left congruences
/// satisfies: intersections, upward closure, right translates, and the local
/// condition "[x]_S ⊆ [x]_R for every x with some S in P ⇒ R in P".
struct FilterAxioms {
  bool intersections = true;
  bool upward = true;
  bool right_translates = true;
  bool local = true;
};
FilterAxioms check_filter_axioms(const FinMonoid& m, const std::vector<LeftCongruence>& family);

/// A topology on a monoid with at most 64 elements, presented either by a
/// congruence filter or by an explicit subbasis. Stored through minimal open
/// neighbourhoods, which determine a finite topology.
class MonoidTopology {
 public:
  enum class Kind { Filter, Basis };

  static MonoidTopology discrete(const FinMonoid& m);
  static MonoidTopology indiscrete(const FinMonoid& m);
  static MonoidTopology from_filter(const FinMonoid& m, const CongruenceFilter& f);
  /// The topology generated by the given sets (closed under finite
  /// intersection, then arbitrary union).
  static MonoidTopology from_basis(const FinMonoid& m, std::vector<Subset> basis);

  Kind kind() const { return kind_; }
  std::size_t size() const { return nbhd_.size(); }
  const std::vector<Subset>& basis() const { return basis_; }
  /// Minimum R0 for filter topologies.
  const std::optional<LeftCongruence>& r0() const { return r0_; }
  const std::optional<CongruenceFilter>& filter() const { return filter_; }

  Subset minimal_open(Elem x) const { return nbhd_[x]; }
  Subset everything() const { return Subset::all(size()); }
  bool is_open(Subset u) const;
  bool is_closed(Subset u) const { return is_open(Subset{everything().bits & ~u.bits}); }
  bool is_clopen(Subset u) const { return is_open(u) && is_closed(u); }

  friend bool operator==(const MonoidTopology& a, const MonoidTopology& b) { return a.nbhd_ == b.nbhd_; }

 private:
  Kind kind_ = Kind::Basis;
  std::vector<Subset> basis_;
  std::vector<Subset> nbhd_;
  std::optional<LeftCongruence> r0_;
  std::optional<CongruenceFilter> filter_;
};

inline MonoidTopology topology_from_filter(const FinMonoid& m, const CongruenceFilter& f) {
  return MonoidTopology::from_filter(m, f);
}

/// First pair of distinct points no open set separates.
std::optional<std::pair<Elem, Elem>> t0_violation(const MonoidTopology& t);
inline bool is_T0(const MonoidTopology& t) { return !t0_violation(t).has_value(); }
bool is_discrete(const MonoidTopology& t);

/// Every class of r is open.
bool has_open_classes(const MonoidTopology& t, const Partition& r);

}  // namespace tmon
