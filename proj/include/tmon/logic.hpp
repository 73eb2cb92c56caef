#pragma once

// First-order formulas over ∈ and =, evaluated on finite universes.
//
// Bounded quantifiers range over the elements of a term's value. Ranked
// quantifiers (the capitalized Forall/Exists of the text syntax) range over
// the top stratum of the universe the formula is evaluated in, which is the
// finite stand-in for unbounded quantification.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tmon/hf.hpp"
#include "tmon/monoid.hpp"

namespace tmon {

/// A variable name or a constant node.
struct Term {
  std::variant<std::string, Node> value;

  static Term var(std::string name) { return Term{std::move(name)}; }
  static Term constant(Node n) { return Term{n}; }
  bool is_var() const { return value.index() == 0; }
  const std::string& name() const { return std::get<0>(value); }
  Node node() const { return std::get<1>(value); }

  friend bool operator==(const Term&, const Term&) = default;
};

class Formula {
 public:
  enum class Kind {
    True,
    False,
    Member,
    Equal,
    Not,
    And,
    Or,
    Implies,
    BoundedForall,
    BoundedExists,
    RankedForall,
    RankedExists,
  };

  static Formula truth();
  static Formula falsity();
  static Formula member(Term a, Term b);
  static Formula equal(Term a, Term b);
  static Formula negate(Formula f);
  static Formula conj(Formula l, Formula r);
  static Formula disj(Formula l, Formula r);
  static Formula implies(Formula l, Formula r);
  static Formula bounded_forall(std::string var, Term bound, Formula body);
  static Formula bounded_exists(std::string var, Term bound, Formula body);
  static Formula ranked_forall(std::string var, Formula body);
  static Formula ranked_exists(std::string var, Formula body);

  Kind kind() const;
  bool is_atomic() const;
  bool is_binary() const;
  bool is_quantifier() const;
  bool is_ranked() const;

  /// Operands of Member/Equal; lhs() of a bounded quantifier is its bound.
  const Term& lhs() const;
  const Term& rhs() const;
  const Term& bound() const { return lhs(); }
  const std::string& var() const;
  /// Operand of Not, body of a quantifier, or left side of a connective.
  const Formula& left() const;
  const Formula& body() const { return left(); }
  const Formula& right() const;

  /// Sorted, duplicate-free.
  std::vector<std::string> free_variables() const;
  /// Atomic formulas have depth 1.
  std::size_t depth() const;
  void collect_constants(std::vector<Node>& out) const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Data;
  explicit Formula(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

using Assignment = std::map<std::string, Node>;

/// Tarskian satisfaction. Throws InputError for an unbound variable or a
/// constant or assigned value outside U; ranked quantifiers need a
/// materialized universe.
bool eval(const Formula& f, const Universe& u, const Assignment& env = {});

struct Classification {
  enum class Kind { Delta0, Sigma, Pi };
  Kind kind = Kind::Delta0;
  unsigned level = 0;
  /// Least n with a Σn (resp. Πn) prenex form; 0 for Δ0 formulas.
  unsigned sigma_level = 0;
  unsigned pi_level = 0;

  std::string name() const;
  friend bool operator==(const Classification&, const Classification&) = default;
};

/// Counts alternations of ranked quantifier blocks after prenex normalization.
/// Bounded quantifiers over a body containing ranked quantifiers are treated
/// as ranked quantifiers of the same polarity. A formula that is both Σn and
/// Πn with no lower level is reported as Σn.
Classification classify(const Formula& f);

/// Copy of f with every bound variable renamed to v0, v1, ... in the order
/// quantifiers are met (depth first).
Formula rename_bound(const Formula& f, const std::string& prefix = "v");

/// j(x) = {j(y) : y ∈ x} ∪ {{0, x}} on pure sets, memoized.
Node hamkins_j(Node x);

/// A map between universes used for elementarity checks.
struct EmbeddingMap {
  std::string name;
  std::function<Node(Node)> apply;

  static EmbeddingMap identity();
  static EmbeddingMap hamkins();
};

struct ParameterStrategy {
  enum class Kind { Exhaustive, Sampled };
  Kind kind = Kind::Exhaustive;
  /// Exhaustive: refuse when the tuple count exceeds this. Sampled: samples per formula.
  std::size_t cap = 10'000'000;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
};

struct ElementarityFailure {
  std::size_t formula_index = 0;
  Assignment params;
  bool in_domain = false;
  bool in_codomain = false;
};

struct ElementarityReport {
  bool pass = true;
  std::size_t formulas = 0;
  std::size_t instances = 0;
  std::vector<ElementarityFailure> failures;  // first few, in enumeration order
  std::size_t failure_count = 0;
  ParameterStrategy strategy;
};

/// For each formula and each parameter tuple from U's top stratum, compares
/// U ⊨ φ(x̄) with U′ ⊨ φ(j x̄). Throws InputError when an image leaves U′.
ElementarityReport check_preserves_reflects(const EmbeddingMap& j, const std::vector<Formula>& formulas,
                                            const Universe& domain, const Universe& codomain,
                                            const ParameterStrategy& strategy = {});

/// Named formula families for elementarity checks: "atomic" (x ∈ y, x = y)
/// and "delta0" (the atomic ones followed by bounded formulas, starting with
/// "x has exactly one element").
std::vector<Formula> formula_family(const std::string& name);

// --- filter agreement transfer -------------------------------------------

/// Explicit family of subsets of X = {0, ..., n-1}.
struct FiniteFilter {
  std::size_t points = 0;
  std::vector<Subset> members;

  /// All supersets of s.
  static FiniteFilter principal(std::size_t points, Subset s);
  bool contains(Subset s) const;
  /// Nonempty, proper, closed under intersection and supersets.
  std::optional<std::string> filter_violation() const;
};

/// Images of the points of X and of Y under a structure map.
struct StructureMap {
  std::vector<std::int64_t> on_x;
  std::vector<std::int64_t> on_y;
};

struct TransferInstance {
  std::size_t x_points = 0;
  std::size_t y_points = 0;
  FiniteFilter filter;
  std::vector<std::uint32_t> f;  // X → Y
  StructureMap j, k;
};

struct TransferResult {
  enum class Status {
    Certified,
    NotAFilter,
    FibreNotPositive,
    ImageNotFunctional,
    NoAgreementOnFilterSet,
    ImagesDiffer,
    ConclusionFails,
  };
  Status status = Status::Certified;
  std::string detail;
  /// The agreement set {x : j(x) = k(x)}, an F-member when certified.
  Subset agreement;
  /// (y, α) with α ∈ f⁻¹(y) ∩ agreement, for every y.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> witnesses;

  bool certified() const { return status == Status::Certified; }
};

std::string to_string(TransferResult::Status s);

/// Checks the hypotheses (F a filter, fibres F-positive, j(f) and k(f)
/// functional, j = k on an F-member, j(f) = k(f)) and, when they hold,
/// certifies j|_Y = k|_Y through j(y) = j(f)(j(α)) = k(f)(k(α)) = k(y).
TransferResult agreement_transfer_check(const TransferInstance& inst);

}  // namespace tmon
