#pragma once

// Input documents (JSON) and the text syntax for nodes and formulas.
// docs/formats.md describes both.

#include <string>

#include "json.hpp"
#include "tmon/action.hpp"
#include "tmon/hf.hpp"
#include "tmon/logic.hpp"
#include "tmon/monoid.hpp"

namespace tmon::io {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Parses JSON text; syntax errors become InputError with line and column.
json parse_json(const std::string& text, const std::string& source = "input");

json monoid_to_json(const FinMonoid& m);
/// Table entries and the identity may be labels or indices.
FinMonoid monoid_from_json(const json& doc);

/// The monoid is written inline.
json action_to_json(const ActionTable& a);
/// "monoid" is a catalog name or an inline monoid document; "table" maps each
/// element label to the images of the carrier points, in carrier order.
ActionTable action_from_json(const json& doc);

struct UniverseSpec {
  AtomTable atoms;
  std::uint32_t rank = 0;
  friend bool operator==(const UniverseSpec&, const UniverseSpec&) = default;
};
json universe_to_json(const UniverseSpec& u);
UniverseSpec universe_from_json(const json& doc);

json topology_to_json(const FinMonoid& m, const MonoidTopology& t);
MonoidTopology topology_from_json(const json& doc, const FinMonoid& m);

json partition_to_json(const FinMonoid& m, const Partition& p);
Partition partition_from_json(const json& blocks, const FinMonoid& m, const std::string& where);
json subset_to_json(const FinMonoid& m, Subset s);
Subset subset_from_json(const json& labels, const FinMonoid& m, const std::string& where);

/// Nested braces; atoms print as @index, or as their label inside braces when
/// a table is given (parse accepts both).
std::string print_node(Node x, const AtomTable* atoms = nullptr);
Node parse_node(const std::string& text, const AtomTable* atoms = nullptr);

std::string print_formula(const Formula& f);
Formula parse_formula(const std::string& text, const AtomTable* atoms = nullptr);

}  // namespace tmon::io
