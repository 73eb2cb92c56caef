#pragma once

// Symmetric cores, the integer action on orbit atoms, and stabiliser
// inclusions for the Gödel operations.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tmon/action.hpp"
#include "tmon/hf.hpp"
#include "tmon/monoid.hpp"

namespace tmon {

/// Decides whether the stabiliser of a node is open.
using OpennessOracle = std::function<bool(Node)>;

/// Stabiliser classes open in t.
OpennessOracle finite_oracle(ExtendedAction act, MonoidTopology t);
/// Stabiliser dℤ open iff d ≥ 1.
OpennessOracle z_oracle(AtomTable atoms);

struct CoreReport {
  struct Exclusion {
    Node node;
    /// Least element of trcl{node} in canonical order whose stabiliser is not open.
    Node witness;
  };
  std::vector<Node> members;
  std::vector<Exclusion> excluded;

  bool contains(Node x) const;
  /// Every element of a member that is itself in the scanned universe is a member.
  bool is_transitive() const;
};

/// Witness y ∈ trcl{x} with non-open stabiliser, or nullopt when x is in the core.
std::optional<Node> core_witness(const OpennessOracle& open, Node x);

/// The core of U's top stratum. Needs a materialized universe.
CoreReport symmetric_core(const OpennessOracle& open, const Universe& u);

// --- integer action on orbit atoms -----------------------------------------

/// Atoms grouped into consecutive orbit blocks; block i has n_i atoms of
/// modulus n_i, and g sends (block, p) to (block, p + g mod n_i).
class ZOrbitLayout {
 public:
  /// Throws InputError when an atom has no modulus or the blocks do not tile.
  explicit ZOrbitLayout(const AtomTable& atoms);

  std::uint64_t modulus(std::size_t atom) const { return modulus_[atom]; }
  std::size_t shift(std::size_t atom, std::uint64_t g) const;
  Node apply(std::uint64_t g, Node x) const;
  /// Least common multiple of the moduli of atoms in trcl{x} (1 for pure sets).
  std::uint64_t lcm_in(Node x) const;

 private:
  AtomTable atoms_;
  std::vector<std::uint64_t> modulus_;
  std::vector<std::size_t> start_;
};

/// The least d ≥ 1 with d·x = x; the stabiliser is dℤ and d divides lcm_in(x).
std::uint64_t z_stabiliser(const ZOrbitLayout& layout, Node x);

inline constexpr std::size_t kLevyMaxK = 40;

struct LevySegment {
  std::size_t k = 0;
  Node code;
  std::uint64_t stabiliser = 0;
  bool in_core = false;
};

struct LevyReport {
  std::vector<LevySegment> segments;  // k = 1..K
  /// Stabiliser moduli that exceed every earlier one, in order of k.
  std::vector<std::uint64_t> increasing_moduli;
  /// The finite-level claim: every segment lies in the core while the
  /// stabilisers grow without a common positive bound.
  bool all_in_core = false;
  bool moduli_grow = false;
};

/// Orbits of moduli 1..K with x_i the position-0 atom of orbit i; the segment
/// of length k is {(i, x_{i+1}) : i < k}, pairs Kuratowski over von Neumann
/// ordinals. Throws CapExceeded above kLevyMaxK.
LevyReport levy_sequence_probe(std::size_t k_max);
/// The atom table used by the probe.
AtomTable levy_atoms(std::size_t k_max);
Node levy_segment(const AtomTable& atoms, std::size_t k);

// --- Gödel operations -------------------------------------------------------

/// Atoms behave as the empty set under these operations.
Node union_of(Node a);
Node pair_of(Node a, Node b);
Node difference(Node a, Node b);
/// {(u, v) : u ∈ a, v ∈ b} with Kuratowski pairs.
Node product(Node a, Node b);

struct GodelReport {
  enum class Op { Union, Pair, Difference, Product };
  struct Failure {
    Op op;
    Node a;
    Node b;  // equals a for Union
  };
  std::size_t unary_checked = 0;
  std::size_t binary_checked = 0;
  std::vector<Failure> failures;
  /// With an oracle: results of core inputs that stayed in U and were checked
  /// for core membership, results skipped for exceeding U's rank bound, and
  /// results that left the core.
  std::size_t closure_checked = 0;
  std::size_t rank_overflow_skips = 0;
  std::vector<Failure> closure_failures;

  bool pass() const { return failures.empty() && closure_failures.empty(); }
};

std::string to_string(GodelReport::Op op);

/// 𝔯_a ⊆ 𝔯_{⋃a} for every a, and 𝔯_a ∩ 𝔯_b ⊆ 𝔯_c for c = {a,b}, a∖b, a×b for
/// every ordered pair, over U's top stratum.
GodelReport godel_closure_check(const ExtendedAction& act, const Universe& u,
                                const std::optional<OpennessOracle>& open = std::nullopt);

}  // namespace tmon
