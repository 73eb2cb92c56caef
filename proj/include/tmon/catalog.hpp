#pragma once

// Built-in monoids, topologies and actions.

#include <string>
#include <utility>
#include <vector>

#include "tmon/action.hpp"
#include "tmon/monoid.hpp"

namespace tmon {

/// Names accepted by catalog_monoid, in a fixed order.
std::vector<std::string> catalog_names();
/// Throws InputError for an unknown name.
FinMonoid catalog_monoid(const std::string& name);

/// One representative of every isomorphism class of monoids with at most
/// three elements (1 + 2 + 7), with its catalog name.
std::vector<std::pair<std::string, FinMonoid>> small_monoids();

struct NamedTopology {
  std::string name;
  MonoidTopology topology;
};

/// discrete, indiscrete, and the filter topology generated by each left
/// congruence ("filter:<blocks>"); congruences are enumerated, so at most 12 elements.
std::vector<NamedTopology> catalog_topologies(const FinMonoid& m);

/// Z2 = {1, s} swapping the atoms a and b.
ActionTable swap_action();
/// M2 = {1, e} with e sending both atoms to a.
ActionTable collapse_action();
/// Every element fixes every one of k atoms.
ActionTable trivial_action(const FinMonoid& m, std::size_t atoms);

/// Names accepted by catalog_action.
std::vector<std::string> catalog_action_names();
ActionTable catalog_action(const std::string& name);

/// Blocks of a partition as "{0,1}{2}" using element labels.
std::string describe_blocks(const FinMonoid& m, const Partition& p);

}  // namespace tmon
