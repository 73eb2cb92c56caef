#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tmon/hf.hpp"
#include "tmon/monoid.hpp"

namespace tmon {

using Point = std::uint32_t;

/// An explicit action M × X → X of a finite monoid on a finite carrier.
class ActionTable {
 public:
  ActionTable() = default;

  /// table[m][x] is the image of point x under element m. Checks that the
  /// identity acts trivially and that (mn)x = m(nx).
  static ActionTable make(FinMonoid monoid, std::vector<std::string> carrier,
                          std::vector<std::vector<Point>> table);

  const FinMonoid& monoid() const { return monoid_; }
  std::size_t carrier_size() const { return carrier_.size(); }
  const std::vector<std::string>& carrier() const { return carrier_; }
  std::optional<Point> find(const std::string& label) const;
  Point act(Elem m, Point x) const { return table_[m * carrier_.size() + x]; }
  std::vector<std::vector<Point>> table() const;
  /// {m·x : m ∈ M}, sorted.
  std::vector<Point> orbit(Point x) const;

  friend bool operator==(const ActionTable&, const ActionTable&) = default;

 private:
  FinMonoid monoid_;
  std::vector<std::string> carrier_;
  std::vector<Point> table_;
};

/// The stabiliser relation of a point: m ~ m′ iff m·x = m′·x.
struct StabRel {
  Point point = 0;
  LeftCongruence relation;
};

StabRel stab_rel(const ActionTable& act, Point x);

/// A point whose stabiliser relation has a class that is not open.
struct ContinuityFailure {
  Point point = 0;
  Subset bad_class;
};

/// nullopt when every stabiliser relation has open classes.
std::optional<ContinuityFailure> continuity_check(const ActionTable& act, const MonoidTopology& t);

/// M acting on the blocks of R by m·[x] = [m·x]. Blocks are labelled by their
/// least element.
ActionTable principal_mset(const FinMonoid& m, const LeftCongruence& r);

/// The recursive extension g(S) = {g·x : x ∈ S} of an action on atoms to all
/// hereditarily finite sets over those atoms. Images are memoized; apply is
/// safe to call from several threads.
class ExtendedAction {
 public:
  ExtendedAction(ActionTable atom_action, AtomTable atoms);

  const FinMonoid& monoid() const { return atom_action_.monoid(); }
  const ActionTable& atom_action() const { return atom_action_; }
  const AtomTable& atoms() const { return atoms_; }

  Node apply(Elem m, Node x) const;
  /// 𝔯_x as a left congruence on the monoid.
  LeftCongruence stabiliser(Node x) const;

 private:
  struct Memo;
  ActionTable atom_action_;
  AtomTable atoms_;
  std::shared_ptr<Memo> memo_;
};

/// Materializes the extension of an action on U's atoms as an action on the
/// top stratum of U. Throws InputError when the carriers do not match.
ActionTable extend_action(const ActionTable& atom_action, const Universe& u);

}  // namespace tmon
