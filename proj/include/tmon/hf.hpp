#pragma once

// Hereditarily finite sets over a finite table of atoms.
//
// Every node lives in a process-wide interner, so two nodes are structurally
// equal iff their handles are equal. Sets keep their children sorted in the
// canonical order and duplicate-free; atoms are exempt from extensionality and
// are identified by their index alone.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tmon {

/// Handle to an interned node. Cheap to copy; equality is structural equality.
class Node {
 public:
  constexpr Node() = default;

  static constexpr Node from_id(std::uint32_t id) { return Node(id); }
  constexpr std::uint32_t id() const { return id_; }

  bool is_atom() const;
  bool is_set() const { return !is_atom(); }
  /// Index into the atom table; only meaningful for atoms.
  std::uint32_t atom_index() const;
  /// Elements of a set, sorted canonically. Empty for atoms.
  std::span<const Node> children() const;
  std::size_t size() const { return children().size(); }
  bool contains(Node x) const;
  /// Atoms have rank 0, the empty set rank 1, a set 1 + max child rank.
  std::uint32_t rank() const;
  /// Largest atom index in the transitive closure, or -1 for pure sets.
  std::int64_t max_atom() const;
  bool is_pure() const { return max_atom() < 0; }

  friend constexpr bool operator==(Node a, Node b) { return a.id_ == b.id_; }
  /// Canonical order: atoms first (by index), then sets lexicographically by
  /// their sorted children.
  friend std::strong_ordering operator<=>(Node a, Node b);

 private:
  constexpr explicit Node(std::uint32_t id) : id_(id) {}
  std::uint32_t id_ = 0;
};

struct AtomTable {
  std::vector<std::string> labels;
  /// Either empty or one entry per atom; used by the symbolic integer action.
  std::vector<std::optional<std::uint64_t>> moduli;

  std::size_t count() const { return labels.size(); }
  std::optional<std::uint64_t> modulus(std::size_t i) const {
    return i < moduli.size() ? moduli[i] : std::nullopt;
  }

  /// Throws InputError on duplicate labels, a zero modulus, or a size mismatch.
  void validate() const;

  /// k atoms labelled a, b, c, ... (or a0, a1, ... beyond 26).
  static AtomTable anonymous(std::size_t k);
  /// Consecutive orbits, one block of n atoms per listed modulus n. Labels are
  /// x<n>_<position>, and every atom in a block carries modulus n.
  static AtomTable orbits(std::span<const std::uint64_t> orbit_moduli);

  friend bool operator==(const AtomTable&, const AtomTable&) = default;
};

Node make_atom(const AtomTable& table, std::size_t index);
Node make_set(std::vector<Node> children);
inline Node empty_set() { return make_set({}); }

/// Kuratowski pair {{a},{a,b}}.
Node kuratowski_pair(Node a, Node b);
/// Von Neumann ordinal n = {0, ..., n-1}.
Node von_neumann(std::size_t n);

inline std::uint32_t rank(Node x) { return x.rank(); }
/// {x} together with everything reachable through membership, canonically sorted.
std::vector<Node> transitive_closure(Node x);

/// Number of distinct nodes interned so far.
std::size_t interned_node_count();

/// Renders a node as nested braces; atoms print as their label, or @index
/// when no table is given.
std::string to_string(Node x, const AtomTable* atoms = nullptr);

inline constexpr std::size_t kDefaultNodeCap = 1'000'000;

class Universe {
 public:
  /// V_n(A) with every stratum materialized. Refuses when |V_n(A)| > cap.
  static Universe build(AtomTable atoms, std::uint32_t n, std::size_t cap = kDefaultNodeCap);
  /// V_n(A) described by its bound only; membership works, strata do not.
  static Universe lazy(AtomTable atoms, std::uint32_t n);

  const AtomTable& atoms() const { return atoms_; }
  std::uint32_t rank_bound() const { return rank_bound_; }
  bool materialized() const { return !strata_.empty(); }

  /// x ∈ V_n(A): rank within the bound and every atom inside the table.
  bool contains(Node x) const;
  /// Stratum i (0 ≤ i ≤ n), canonically sorted. Throws for lazy universes.
  const std::vector<Node>& stratum(std::uint32_t i) const;
  const std::vector<Node>& top() const { return stratum(rank_bound_); }

 private:
  Universe(AtomTable atoms, std::uint32_t n) : atoms_(std::move(atoms)), rank_bound_(n) {}

  AtomTable atoms_;
  std::uint32_t rank_bound_ = 0;
  std::vector<std::vector<Node>> strata_;
};

inline Universe build_universe(AtomTable atoms, std::uint32_t n,
                               std::size_t cap = kDefaultNodeCap) {
  return Universe::build(std::move(atoms), n, cap);
}

}  // namespace tmon

template <>
struct std::hash<tmon::Node> {
  std::size_t operator()(tmon::Node n) const noexcept { return std::hash<std::uint32_t>{}(n.id()); }
};
