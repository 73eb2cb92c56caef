#include "tmon/catalog.hpp"

namespace tmon {

namespace {

struct Entry {
  std::vector<std::string> labels;
  std::vector<std::vector<Elem>> table;
};

const std::vector<std::pair<std::string, Entry>>& entries() {
  static const std::vector<std::pair<std::string, Entry>> all = {
      {"trivial", {{"1"}, {{0}}}},
      {"z2", {{"1", "s"}, {{0, 1}, {1, 0}}}},
      {"m2", {{"1", "e"}, {{0, 1}, {1, 1}}}},
      {"z3", {{"1", "g", "h"}, {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}}},
      // Z2 with a zero adjoined
      {"z2_zero", {{"1", "s", "0"}, {{0, 1, 2}, {1, 0, 2}, {2, 2, 2}}}},
      // Z2 = {a, b} (identity a) with a new identity adjoined
      {"z2_one", {{"1", "a", "b"}, {{0, 1, 2}, {1, 1, 2}, {2, 2, 1}}}},
      {"nil3", {{"1", "a", "0"}, {{0, 1, 2}, {1, 2, 2}, {2, 2, 2}}}},
      {"chain3", {{"1", "e", "0"}, {{0, 1, 2}, {1, 1, 2}, {2, 2, 2}}}},
      {"lz3", {{"1", "a", "b"}, {{0, 1, 2}, {1, 1, 1}, {2, 2, 2}}}},
      {"rz3", {{"1", "a", "b"}, {{0, 1, 2}, {1, 1, 2}, {2, 1, 2}}}},
      // maps of {0,1}: identity, swap, constant 0, constant 1; x·y = x∘y
      {"t2", {{"id", "sw", "c0", "c1"}, {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 2, 2, 2}, {3, 3, 3, 3}}}},
  };
  return all;
}

}  // namespace

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : entries()) out.push_back(name);
  return out;
}

FinMonoid catalog_monoid(const std::string& name) {
  for (const auto& [n, e] : entries())
    if (n == name) return validate_monoid(e.labels, e.table, Elem{0});
  throw InputError("unknown catalog monoid '" + name + "'");
}

std::vector<std::pair<std::string, FinMonoid>> small_monoids() {
  std::vector<std::pair<std::string, FinMonoid>> out;
  for (const auto& [name, e] : entries())
    if (e.labels.size() <= 3) out.emplace_back(name, validate_monoid(e.labels, e.table, Elem{0}));
  return out;
}

std::string describe_blocks(const FinMonoid& m, const Partition& p) {
  std::string s;
  for (const auto& cls : p.classes()) {
    s += "{";
    for (std::size_t i = 0; i < cls.size(); ++i) s += (i ? "," : "") + m.label(cls[i]);
    s += "}";
  }
  return s;
}

std::vector<NamedTopology> catalog_topologies(const FinMonoid& m) {
  std::vector<NamedTopology> out;
  out.push_back({"discrete", MonoidTopology::discrete(m)});
  out.push_back({"indiscrete", MonoidTopology::indiscrete(m)});
  for (const auto& r : enumerate_left_congruences(m)) {
    out.push_back({"filter:" + describe_blocks(m, r.partition()), MonoidTopology::from_filter(m, filter_close(m, {r}))});
  }
  return out;
}

ActionTable swap_action() { return ActionTable::make(catalog_monoid("z2"), {"a", "b"}, {{0, 1}, {1, 0}}); }

ActionTable collapse_action() { return ActionTable::make(catalog_monoid("m2"), {"a", "b"}, {{0, 1}, {0, 0}}); }

ActionTable trivial_action(const FinMonoid& m, std::size_t atoms) {
  const AtomTable labels = AtomTable::anonymous(atoms);
  std::vector<Point> row(atoms);
  for (Point x = 0; x < atoms; ++x) row[x] = x;
  return ActionTable::make(m, labels.labels, std::vector<std::vector<Point>>(m.size(), row));
}

std::vector<std::string> catalog_action_names() { return {"swap", "collapse"}; }

ActionTable catalog_action(const std::string& name) {
  if (name == "swap") return swap_action();
  if (name == "collapse") return collapse_action();
  throw InputError("unknown catalog action '" + name + "'");
}

}  // namespace tmon
