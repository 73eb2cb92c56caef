#pragma once

// Open left congruences, the inverse limit of the principal continuous
// quotients M/R, and the canonical map M → L.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmon/monoid.hpp"

namespace tmon {

struct OpenCongruences {
  /// Least open left congruence; R is open iff r0 ⊆ R.
  LeftCongruence r0;
  bool is_open(const LeftCongruence& r) const { return r0.refines(r); }
};

/// Filter topologies answer from their minimum; basis topologies enumerate
/// every left congruence (at most 12 elements) and keep those with open classes.
OpenCongruences open_congruences(const FinMonoid& m, const MonoidTopology& t);

/// Every left congruence containing r0, obtained by merging r0's blocks.
/// Refuses when r0 has more than 12 blocks. The first entry is r0 itself.
std::vector<LeftCongruence> congruences_above(const FinMonoid& m, const LeftCongruence& r0);

/// A compatible choice of one block per family member.
using Thread = std::vector<std::uint32_t>;

struct InverseLimit {
  FinMonoid monoid;
  std::vector<LeftCongruence> family;
  /// All compatible threads in lexicographic order.
  std::vector<Thread> threads;

  std::size_t size() const { return threads.size(); }
  std::optional<std::size_t> find(const Thread& t) const;
  /// Index of the family member equal to r.
  std::optional<std::size_t> member(const LeftCongruence& r) const;
};

/// Builds the threads by backtracking: for R ⊆ R′ the block chosen at R′ must
/// contain the block chosen at R. Throws InputError for an empty family.
InverseLimit inverse_limit(const FinMonoid& m, std::vector<LeftCongruence> family);

/// The constant thread ([m]_R)_R.
Thread canonical_thread(const InverseLimit& l, Elem m);
std::optional<std::size_t> canonical_map(const InverseLimit& l, Elem m);

/// (t·u)_R = [a·b]_R with b a representative of u_R and a a representative of
/// t_{R·b⁻¹}, using least representatives. Throws InputError when some R·b⁻¹
/// is outside the family.
Thread thread_product(const InverseLimit& l, const Thread& t, const Thread& u);

struct CompletenessReport {
  bool complete = false;
  bool injective = false;
  bool surjective = false;
  /// τ equals the topology pulled back from L, which carries the topology of
  /// the blocks of R0.
  bool topology_match = false;
  /// False also when open congruences are not closed under right translates,
  /// since the thread product is then undefined.
  bool homomorphism = false;
  std::optional<std::pair<Elem, Elem>> collapsed;
  std::optional<std::size_t> missed_thread;
  std::size_t limit_size = 0;
  std::size_t r0_blocks = 0;
  std::string diagnosis;
};

CompletenessReport is_left_complete(const FinMonoid& m, const MonoidTopology& t);

}  // namespace tmon
