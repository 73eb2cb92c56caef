#pragma once

// Left/right powder checks on finite topological monoids, and the chirality
// criterion on window truncations of the function monoid ℕ^ℕ.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tmon/monoid.hpp"

namespace tmon {

/// I^U_p = {q : {r : rq ∈ U} = {r : rp ∈ U}}. Throws InputError when U is not open.
Subset i_set(const FinMonoid& m, const MonoidTopology& t, Subset u, Elem p);

struct PowderVerdict {
  struct T0Failure {
    Elem x, y;
  };
  /// Some minimal neighbourhood is not clopen, so no clopen basis exists.
  struct NoClopenBasis {
    Subset neighbourhood;
  };
  struct ISetNotOpen {
    Subset u;
    Elem p;
    Subset i_set;
  };
  using Witness = std::variant<std::monostate, T0Failure, NoClopenBasis, ISetNotOpen>;

  bool holds = false;
  Witness witness;
  /// "given" or "minimal_opens" when holds.
  std::string basis_used;
};

/// T0, and a clopen basis whose every I^U_p is open. Tries the topology's own
/// basis first, then the basis of minimal open neighbourhoods.
PowderVerdict is_left_powder(const FinMonoid& m, const MonoidTopology& t);
/// is_left_powder on the opposite monoid with the same topology.
PowderVerdict is_right_powder(const FinMonoid& m, const MonoidTopology& t);
bool is_chiral(const FinMonoid& m, const MonoidTopology& t);

// --- window monoids ---------------------------------------------------------

/// A total map on the window [0, w), stored as its value table.
using WindowMap = std::vector<std::uint8_t>;

inline constexpr std::size_t kDefaultWindowCap = 8;

struct WindowMonoid {
  std::size_t width = 0;

  explicit WindowMonoid(std::size_t w, std::size_t cap = kDefaultWindowCap);

  WindowMap identity() const;
  /// n ↦ min(2n, w-1).
  WindowMap clamped_doubling() const;
  /// (a ∘ b)(n) = a(b(n)).
  WindowMap compose(const WindowMap& a, const WindowMap& b) const;
  bool contains(const WindowMap& f) const;
  std::uint64_t element_count() const;
  /// The i-th map in base-w counting order (value at 0 is the least significant digit).
  WindowMap element(std::uint64_t i) const;
};

struct Probe {
  std::vector<std::uint8_t> xs;
  std::vector<std::uint8_t> vs;
  friend bool operator==(const Probe&, const Probe&) = default;
};

struct ProbeWitness {
  Probe probe;
  bool found = false;
  WindowMap q;
  WindowMap r;
};

struct ChiralityCertificate {
  std::size_t width = 0;
  WindowMap a;
  WindowMap b;
  /// No r with B∘r = A, established by exhaustive search.
  bool condition1 = false;
  std::uint64_t candidates_checked = 0;
  std::optional<WindowMap> solution;
  /// The image argument: B∘r = A is solvable iff im A ⊆ im B.
  bool image_shortcut_agrees = false;
  std::vector<ProbeWitness> condition2;

  bool condition2_holds() const;
  bool satisfied() const { return condition1 && condition2_holds(); }
};

/// Condition 1 exhaustively over all w^w maps (split across `threads`
/// workers; the result does not depend on the split), condition 2 per probe by
/// witness search.
ChiralityCertificate chirality_criterion(const WindowMonoid& mw, const WindowMap& a, const WindowMap& b,
                                         const std::vector<Probe>& probes, unsigned threads = 1);

/// q with q = B on the probe's xs and r with q∘r = A on its vs. Images of the
/// vs go to points of xs where B already hits the target, else to unused
/// points outside xs, largest first. Unconstrained values are the identity.
ProbeWitness find_probe_witness(const WindowMonoid& mw, const WindowMap& a, const WindowMap& b, const Probe& probe);

/// Seeded probes with 1–3 distinct xs and 1–2 distinct vs.
std::vector<Probe> generate_probes(const WindowMonoid& mw, std::size_t count, std::uint64_t seed);

/// Re-checks every equality and the negative claim of a certificate without
/// reusing the search code. Returns a description of the first problem.
std::optional<std::string> verify_certificate(const ChiralityCertificate& cert);

struct ClosedImageLevel {
  std::size_t width = 0;
  std::uint64_t monoid_size = 0;
  std::uint64_t pairs = 0;
  std::uint64_t image_pairs = 0;
  std::uint64_t accumulation_pairs = 0;
  /// First few accumulation pairs (q, s) in enumeration order.
  std::vector<std::pair<WindowMap, WindowMap>> examples;
  /// (B, A) with B clamped doubling and A the identity; set for the full monoid.
  std::optional<bool> designated_is_accumulation;
  bool closed() const { return accumulation_pairs == 0; }
};

enum class WindowFamily { Full, Permutations };

/// For each width, the image of (q, r) ↦ (q, q∘r) and the pairs (q, s) that
/// every probe with |xs| + |vs| ≤ w approximates but that are not in the image.
/// Refuses when |M|² times the probe count exceeds search_cap.
std::vector<ClosedImageLevel> closed_image_probe(WindowFamily family, const std::vector<std::size_t>& widths,
                                                 std::uint64_t search_cap = 10'000'000);

}  // namespace tmon
