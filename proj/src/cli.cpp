#include "tmon/cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "tmon/catalog.hpp"
#include "tmon/completion.hpp"
#include "tmon/io.hpp"
#include "tmon/logic.hpp"
#include "tmon/powder.hpp"
#include "tmon/symcore.hpp"

namespace tmon::cli {

namespace {

using io::json;

struct Options {
  std::string out;
  std::uint64_t seed = 0;
  std::size_t node_cap = kDefaultNodeCap;
  std::size_t window_cap = kDefaultWindowCap;
  std::uint64_t search_cap = 10'000'000;
  std::size_t list_limit = 256;
  unsigned threads = 1;
  bool timing = false;
};

struct Outcome {
  json result = json::object();
  json witnesses = json::object();
  int code = kOk;
};

// --- inputs ----------------------------------------------------------------------

class Inputs {
 public:
  /// Everything that influences the report is folded into the digest.
  void note(const std::string& key, const std::string& bytes) {
    digest_src_ += key;
    digest_src_ += '\0';
    digest_src_ += std::to_string(bytes.size());
    digest_src_ += '\0';
    digest_src_ += bytes;
  }

  std::string read_file(const std::string& key, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    note(key, ss.str());
    return ss.str();
  }

  /// A document is a file path, or inline JSON when it starts with '{'.
  json load(const std::string& key, const std::string& path) {
    if (!path.empty() && path.front() == '{') {
      note(key, path);
      return io::parse_json(path, key);
    }
    return io::parse_json(read_file(key, path), path);
  }

  std::string digest() const {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(digest_src_.data(), digest_src_.size(), md, &len, EVP_sha256(), nullptr)) {
      throw Error("SHA-256 digest failed");
    }
    std::ostringstream hex;
    for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return "sha256:" + hex.str();
  }

  json normalized = json::object();

 private:
  std::string digest_src_;
};

bool is_catalog_monoid(const std::string& s) {
  auto names = catalog_names();
  return std::find(names.begin(), names.end(), s) != names.end();
}

FinMonoid load_monoid(Inputs& in, const std::string& spec) {
  FinMonoid m;
  if (is_catalog_monoid(spec)) {
    in.note("monoid", spec);
    m = catalog_monoid(spec);
  } else {
    m = io::monoid_from_json(in.load("monoid", spec));
  }
  in.normalized["monoid"] = io::monoid_to_json(m);
  return m;
}

MonoidTopology load_topology(Inputs& in, const std::string& spec, const FinMonoid& m) {
  MonoidTopology t;
  if (spec == "discrete" || spec == "indiscrete") {
    in.note("topology", spec);
    t = spec == "discrete" ? MonoidTopology::discrete(m) : MonoidTopology::indiscrete(m);
  } else {
    t = io::topology_from_json(in.load("topology", spec), m);
  }
  in.normalized["topology"] = io::topology_to_json(m, t);
  return t;
}

ActionTable load_action(Inputs& in, const std::string& spec) {
  ActionTable a;
  auto names = catalog_action_names();
  if (std::find(names.begin(), names.end(), spec) != names.end()) {
    in.note("action", spec);
    a = catalog_action(spec);
  } else {
    a = io::action_from_json(in.load("action", spec));
  }
  in.normalized["action"] = io::action_to_json(a);
  return a;
}

AtomTable carrier_atoms(const ActionTable& a) {
  AtomTable t;
  t.labels = a.carrier();
  return t;
}

Universe build(const AtomTable& atoms, std::uint32_t rank, const Options& o) {
  return Universe::build(atoms, rank, o.node_cap);
}

json node_list(const std::vector<Node>& nodes, const AtomTable& atoms, std::size_t limit) {
  json out = json::array();
  for (std::size_t i = 0; i < nodes.size() && i < limit; ++i) out.push_back(io::print_node(nodes[i], &atoms));
  return out;
}

json blocks_json(const FinMonoid& m, const Partition& p) { return io::partition_to_json(m, p); }

WindowMap parse_window_map(const std::string& spec, const WindowMonoid& mw, const char* what) {
  if (spec == "identity") return mw.identity();
  if (spec == "doubling") return mw.clamped_doubling();
  WindowMap f;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || item.empty() || v >= mw.width) {
      throw InputError(std::string(what) + ": expected identity, doubling or a comma list of values below the width");
    }
    f.push_back(static_cast<std::uint8_t>(v));
  }
  if (f.size() != mw.width) throw InputError(std::string(what) + ": expected " + std::to_string(mw.width) + " values");
  return f;
}

json window_json(const WindowMap& f) {
  json a = json::array();
  for (auto v : f) a.push_back(int(v));
  return a;
}

WindowMap window_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array");
  WindowMap f;
  for (const auto& v : j) {
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() > 255) throw InputError(where + ": bad value");
    f.push_back(static_cast<std::uint8_t>(v.get<std::uint64_t>()));
  }
  return f;
}

std::vector<std::uint8_t> bytes_from_json(const json& j, const std::string& where) { return window_from_json(j, where); }

json certificate_json(const ChiralityCertificate& c) {
  json probes = json::array();
  std::size_t found = 0;
  for (const auto& w : c.condition2) {
    found += w.found;
    json p = {{"xs", window_json(w.probe.xs)}, {"vs", window_json(w.probe.vs)}, {"found", w.found}};
    if (w.found) {
      p["q"] = window_json(w.q);
      p["r"] = window_json(w.r);
    }
    probes.push_back(p);
  }
  json j = {{"width", c.width},
            {"a", window_json(c.a)},
            {"b", window_json(c.b)},
            {"condition1", c.condition1},
            {"candidates_checked", c.candidates_checked},
            {"image_shortcut_agrees", c.image_shortcut_agrees},
            {"condition2", probes},
            {"probes_found", found},
            {"condition2_holds", c.condition2_holds()},
            {"satisfied", c.satisfied()}};
  j["solution"] = c.solution ? window_json(*c.solution) : json(nullptr);
  return j;
}

ChiralityCertificate certificate_from_json(const json& j) {
  ChiralityCertificate c;
  c.width = j.at("width").get<std::size_t>();
  c.a = window_from_json(j.at("a"), "a");
  c.b = window_from_json(j.at("b"), "b");
  c.condition1 = j.at("condition1").get<bool>();
  c.candidates_checked = j.at("candidates_checked").get<std::uint64_t>();
  c.image_shortcut_agrees = j.at("image_shortcut_agrees").get<bool>();
  if (!j.at("solution").is_null()) c.solution = window_from_json(j.at("solution"), "solution");
  for (const auto& p : j.at("condition2")) {
    ProbeWitness w;
    w.probe.xs = bytes_from_json(p.at("xs"), "xs");
    w.probe.vs = bytes_from_json(p.at("vs"), "vs");
    w.found = p.at("found").get<bool>();
    if (w.found) {
      w.q = window_from_json(p.at("q"), "q");
      w.r = window_from_json(p.at("r"), "r");
    }
    c.condition2.push_back(std::move(w));
  }
  return c;
}

json powder_witness_json(const FinMonoid& m, const PowderVerdict& v) {
  return std::visit(
      [&](const auto& w) -> json {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<W, PowderVerdict::T0Failure>) {
          return {{"kind", "not_t0"}, {"x", m.label(w.x)}, {"y", m.label(w.y)}};
        } else if constexpr (std::is_same_v<W, PowderVerdict::NoClopenBasis>) {
          return {{"kind", "no_clopen_basis"}, {"neighbourhood", io::subset_to_json(m, w.neighbourhood)}};
        } else {
          return {{"kind", "i_set_not_open"},
                  {"u", io::subset_to_json(m, w.u)},
                  {"p", m.label(w.p)},
                  {"i_set", io::subset_to_json(m, w.i_set)}};
        }
      },
      v.witness);
}

Formula formula_of(const std::vector<Formula>& fs, std::size_t i) { return fs.at(i); }

json elementarity_failures(const ElementarityReport& r, const std::vector<Formula>& formulas, const EmbeddingMap& j) {
  json out = json::array();
  for (const auto& f : r.failures) {
    json params = json::object(), images = json::object();
    for (const auto& [name, node] : f.params) {
      params[name] = io::print_node(node);
      images[name] = io::print_node(j.apply(node));
    }
    out.push_back({{"formula_index", f.formula_index},
                   {"formula", io::print_formula(formula_of(formulas, f.formula_index))},
                   {"params", params},
                   {"images", images},
                   {"in_domain", f.in_domain},
                   {"in_codomain", f.in_codomain}});
  }
  return out;
}

EmbeddingMap embedding_named(const std::string& name) {
  if (name == "identity") return EmbeddingMap::identity();
  if (name == "hamkins") return EmbeddingMap::hamkins();
  throw InputError("unknown embedding '" + name + "' (identity or hamkins)");
}

bool has_ranked(const Formula& f) { return classify(f).kind != Classification::Kind::Delta0; }

// --- commands --------------------------------------------------------------------

struct Args {
  std::size_t atoms = 0;
  std::uint32_t rank = 0;
  std::optional<std::uint32_t> codomain_rank;
  std::string universe;
  std::string monoid;
  std::string topology;
  std::string action;
  std::string node;
  std::string formula_text;
  std::vector<std::string> formulas;
  std::vector<std::string> assigns;
  std::string family = "atomic";
  std::string embedding = "hamkins";
  std::string strategy = "exhaustive";
  std::size_t samples = 1000;
  std::size_t k = 6;
  std::size_t width = 6;
  std::string a = "identity";
  std::string b = "doubling";
  std::size_t probes = 20;
  std::vector<std::size_t> closed_image;
  std::string window_family = "full";
  std::string report;
  bool list = false;
};

AtomTable universe_atoms(Inputs& in, Args& a) {
  if (!a.universe.empty()) {
    auto spec = io::universe_from_json(in.load("universe", a.universe));
    a.rank = spec.rank;
    in.normalized["universe"] = io::universe_to_json(spec);
    return spec.atoms;
  }
  if (a.atoms > kDefaultNodeCap) throw CapExceeded("atom count exceeds the node cap");
  AtomTable t = AtomTable::anonymous(a.atoms);
  in.normalized["universe"] = io::universe_to_json({t, a.rank});
  return t;
}

Outcome cmd_universe_build(Inputs& in, Args& a, const Options& o) {
  const AtomTable atoms = universe_atoms(in, a);
  const Universe u = build(atoms, a.rank, o);
  Outcome out;
  json sizes = json::array();
  for (std::uint32_t i = 0; i <= a.rank; ++i) sizes.push_back(u.stratum(i).size());
  out.result = {{"rank", a.rank}, {"atoms", atoms.count()}, {"stratum_sizes", sizes}, {"size", u.top().size()}};
  if (a.list) out.result["elements"] = node_list(u.top(), atoms, o.list_limit);
  return out;
}

Outcome cmd_action_extend(Inputs& in, Args& a, const Options& o) {
  const ActionTable act = load_action(in, a.action);
  in.normalized["rank"] = a.rank;
  const Universe u = build(carrier_atoms(act), a.rank, o);
  const ActionTable ext = extend_action(act, u);
  Outcome out;
  out.result = {{"rank", a.rank}, {"points", ext.carrier_size()}, {"monoid_size", ext.monoid().size()}};
  if (a.list || ext.carrier_size() <= o.list_limit) {
    json table = json::object();
    for (Elem m = 0; m < ext.monoid().size(); ++m) {
      json row = json::array();
      for (Point x = 0; x < ext.carrier_size(); ++x) row.push_back(ext.carrier()[ext.act(m, x)]);
      table[ext.monoid().label(m)] = row;
    }
    out.result["carrier"] = ext.carrier();
    out.result["table"] = table;
  }
  return out;
}

Outcome cmd_stab(Inputs& in, Args& a, const Options&) {
  const ActionTable act = load_action(in, a.action);
  const AtomTable atoms = carrier_atoms(act);
  in.note("node", a.node);
  const Node x = io::parse_node(a.node, &atoms);
  in.normalized["node"] = io::print_node(x, &atoms);
  const ExtendedAction ext(act, atoms);
  const LeftCongruence r = ext.stabiliser(x);
  Outcome out;
  out.result = {{"node", io::print_node(x, &atoms)}, {"blocks", blocks_json(act.monoid(), r.partition())}};
  if (!a.topology.empty()) {
    const MonoidTopology t = load_topology(in, a.topology, act.monoid());
    out.result["open"] = has_open_classes(t, r.partition());
  }
  return out;
}

Outcome cmd_core(Inputs& in, Args& a, const Options& o) {
  Outcome out;
  AtomTable atoms;
  OpennessOracle oracle;
  if (!a.action.empty()) {
    const ActionTable act = load_action(in, a.action);
    if (a.topology.empty()) throw InputError("core with --action needs --topology");
    const MonoidTopology t = load_topology(in, a.topology, act.monoid());
    in.normalized["rank"] = a.rank;
    atoms = carrier_atoms(act);
    oracle = finite_oracle(ExtendedAction(act, atoms), t);
    out.result["oracle"] = "finite";
  } else {
    if (a.universe.empty()) throw InputError("core needs --action with --topology, or --universe with orbit moduli");
    atoms = universe_atoms(in, a);
    oracle = z_oracle(atoms);
    out.result["oracle"] = "integers";
  }
  const Universe u = build(atoms, a.rank, o);
  const CoreReport r = symmetric_core(oracle, u);
  out.result["rank"] = a.rank;
  out.result["universe_size"] = u.top().size();
  out.result["core_size"] = r.members.size();
  out.result["excluded"] = r.excluded.size();
  out.result["transitive"] = r.is_transitive();
  out.result["members"] = node_list(r.members, atoms, o.list_limit);
  json ex = json::array();
  for (std::size_t i = 0; i < r.excluded.size() && i < o.list_limit; ++i) {
    ex.push_back({{"node", io::print_node(r.excluded[i].node, &atoms)},
                  {"witness", io::print_node(r.excluded[i].witness, &atoms)}});
  }
  out.witnesses["exclusions"] = ex;
  return out;
}

Outcome cmd_levy(Inputs& in, Args& a, const Options&) {
  in.note("k", std::to_string(a.k));
  in.normalized["k"] = a.k;
  const AtomTable atoms = levy_atoms(a.k);
  const LevyReport r = levy_sequence_probe(a.k);
  Outcome out;
  json segs = json::array();
  for (const auto& s : r.segments) {
    segs.push_back({{"k", s.k}, {"stabiliser_modulus", s.stabiliser}, {"in_core", s.in_core}});
  }
  out.result = {{"k", a.k},
                {"stabiliser_modulus", r.segments.back().stabiliser},
                {"segments", segs},
                {"increasing_moduli", r.increasing_moduli},
                {"all_in_core", r.all_in_core},
                {"moduli_grow", r.moduli_grow},
                {"claim",
                 "every finite segment lies in the core; the stabiliser moduli of the segments have no common "
                 "bound, so no single open subgroup fixes the whole sequence"}};
  out.result["segment_code"] = io::print_node(r.segments.back().code, &atoms);
  out.code = r.all_in_core && r.moduli_grow == (a.k >= 2) ? kOk : kFalse;
  return out;
}

Outcome cmd_godel(Inputs& in, Args& a, const Options& o) {
  const ActionTable act = load_action(in, a.action);
  in.normalized["rank"] = a.rank;
  const AtomTable atoms = carrier_atoms(act);
  const Universe u = build(atoms, a.rank, o);
  const ExtendedAction ext(act, atoms);
  std::optional<OpennessOracle> oracle;
  if (!a.topology.empty()) oracle = finite_oracle(ext, load_topology(in, a.topology, act.monoid()));
  const GodelReport r = godel_closure_check(ext, u, oracle);
  Outcome out;
  out.result = {{"unary_checked", r.unary_checked},
                {"binary_checked", r.binary_checked},
                {"inclusion_failures", r.failures.size()},
                {"pass", r.pass()}};
  if (oracle) {
    out.result["closure_checked"] = r.closure_checked;
    out.result["rank_overflow_skips"] = r.rank_overflow_skips;
    out.result["closure_failures"] = r.closure_failures.size();
  }
  auto fail_json = [&](const std::vector<GodelReport::Failure>& fs) {
    json arr = json::array();
    for (std::size_t i = 0; i < fs.size() && i < o.list_limit; ++i) {
      arr.push_back({{"op", to_string(fs[i].op)},
                     {"a", io::print_node(fs[i].a, &atoms)},
                     {"b", io::print_node(fs[i].b, &atoms)}});
    }
    return arr;
  };
  out.witnesses["inclusion_failures"] = fail_json(r.failures);
  if (oracle) out.witnesses["closure_failures"] = fail_json(r.closure_failures);
  out.code = r.pass() ? kOk : kFalse;
  return out;
}

Outcome cmd_powder(Inputs& in, Args& a, const Options&) {
  const FinMonoid m = load_monoid(in, a.monoid);
  const MonoidTopology t = load_topology(in, a.topology, m);
  const PowderVerdict left = is_left_powder(m, t);
  const PowderVerdict right = is_right_powder(m, t);
  Outcome out;
  out.result = {{"left_powder", left.holds},
                {"right_powder", right.holds},
                {"chiral", left.holds && !right.holds},
                {"t0", is_T0(t)},
                {"discrete", is_discrete(t)}};
  if (left.holds) out.result["left_basis"] = left.basis_used;
  if (right.holds) out.result["right_basis"] = right.basis_used;
  out.witnesses["left"] = powder_witness_json(m, left);
  out.witnesses["right"] = powder_witness_json(m, right);
  out.code = left.holds && right.holds ? kOk : kFalse;
  return out;
}

Outcome cmd_chiral(Inputs& in, Args& a, const Options& o) {
  const WindowMonoid mw(a.width, o.window_cap);
  std::uint64_t total = mw.element_count();
  if (total > o.search_cap) throw CapExceeded("w^w = " + std::to_string(total) + " exceeds the search cap");
  const WindowMap A = parse_window_map(a.a, mw, "--a");
  const WindowMap B = parse_window_map(a.b, mw, "--b");
  in.note("chiral", std::to_string(a.width) + "|" + a.a + "|" + a.b + "|" + std::to_string(a.probes) + "|" +
                        std::to_string(o.seed));
  in.normalized["width"] = a.width;
  in.normalized["a"] = window_json(A);
  in.normalized["b"] = window_json(B);
  in.normalized["probes"] = a.probes;
  const auto probes = generate_probes(mw, a.probes, o.seed);
  const ChiralityCertificate cert = chirality_criterion(mw, A, B, probes, o.threads);
  Outcome out;
  out.result = {{"condition1", cert.condition1},
                {"condition2_holds", cert.condition2_holds()},
                {"satisfied", cert.satisfied()},
                {"note", "condition 2 is checked on the listed probes only"}};
  out.witnesses["certificate"] = certificate_json(cert);
  if (!a.closed_image.empty()) {
    const WindowFamily fam = a.window_family == "perm" ? WindowFamily::Permutations : WindowFamily::Full;
    if (a.window_family != "perm" && a.window_family != "full") throw InputError("--family: full or perm");
    in.note("closed_image", a.window_family);
    for (auto w : a.closed_image) {
      WindowMonoid check(w, o.window_cap);
      (void)check;
    }
    json levels = json::array();
    for (const auto& l : closed_image_probe(fam, a.closed_image, o.search_cap)) {
      json ex = json::array();
      for (const auto& [q, s] : l.examples) ex.push_back({{"q", window_json(q)}, {"s", window_json(s)}});
      json lv = {{"width", l.width},
                 {"monoid_size", l.monoid_size},
                 {"pairs", l.pairs},
                 {"image_pairs", l.image_pairs},
                 {"accumulation_pairs", l.accumulation_pairs},
                 {"closed", l.closed()},
                 {"examples", ex}};
      if (l.designated_is_accumulation) lv["designated_is_accumulation"] = *l.designated_is_accumulation;
      levels.push_back(lv);
    }
    out.result["closed_image"] = levels;
  }
  out.code = cert.satisfied() ? kOk : kFalse;
  return out;
}

Outcome cmd_complete(Inputs& in, Args& a, const Options&) {
  const FinMonoid m = load_monoid(in, a.monoid);
  const MonoidTopology t = load_topology(in, a.topology, m);
  const CompletenessReport r = is_left_complete(m, t);
  Outcome out;
  out.result = {{"complete", r.complete},
                {"injective", r.injective},
                {"surjective", r.surjective},
                {"topology_match", r.topology_match},
                {"homomorphism", r.homomorphism},
                {"limit_size", r.limit_size},
                {"r0_blocks", r.r0_blocks},
                {"r0", blocks_json(m, open_congruences(m, t).r0.partition())},
                {"diagnosis", r.diagnosis}};
  if (r.collapsed) out.witnesses["collapsed"] = {m.label(r.collapsed->first), m.label(r.collapsed->second)};
  out.code = r.complete ? kOk : kFalse;
  return out;
}

Outcome cmd_eval(Inputs& in, Args& a, const Options& o) {
  const AtomTable atoms = universe_atoms(in, a);
  in.note("formula", a.formula_text);
  const Formula f = io::parse_formula(a.formula_text, &atoms);
  in.normalized["formula"] = io::print_formula(f);
  const Universe u = has_ranked(f) ? build(atoms, a.rank, o) : Universe::lazy(atoms, a.rank);
  Assignment env;
  json assigned = json::object();
  for (const auto& s : a.assigns) {
    in.note("assign", s);
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--assign expects name=node, got '" + s + "'");
    const std::string name = s.substr(0, eq);
    const Node x = io::parse_node(s.substr(eq + 1), &atoms);
    if (!u.contains(x)) throw InputError("value of " + name + " lies outside V_" + std::to_string(a.rank));
    env[name] = x;
    assigned[name] = io::print_node(x, &atoms);
  }
  in.normalized["assign"] = assigned;
  const Classification c = classify(f);
  Outcome out;
  const bool value = eval(f, u, env);
  out.result = {{"value", value}, {"class", c.name()}, {"free_variables", f.free_variables()}};
  out.code = value ? kOk : kFalse;
  return out;
}

std::vector<Formula> chosen_formulas(Inputs& in, const Args& a) {
  std::vector<Formula> fs;
  if (a.formulas.empty()) {
    in.note("family", a.family);
    fs = formula_family(a.family);
  } else {
    for (const auto& s : a.formulas) {
      in.note("formula", s);
      fs.push_back(io::parse_formula(s));
    }
  }
  json texts = json::array();
  for (const auto& f : fs) texts.push_back(io::print_formula(f));
  in.normalized["formulas"] = texts;
  return fs;
}

ParameterStrategy strategy_of(const Args& a, const Options& o) {
  ParameterStrategy s;
  if (a.strategy == "sampled") {
    s.kind = ParameterStrategy::Kind::Sampled;
  } else if (a.strategy != "exhaustive") {
    throw InputError("--strategy: exhaustive or sampled");
  }
  s.cap = o.search_cap;
  s.samples = a.samples;
  s.seed = o.seed;
  return s;
}

Outcome elementarity_outcome(Inputs& in, const Args& a, const Options& o, const EmbeddingMap& j,
                             std::uint32_t cod_rank) {
  const auto fs = chosen_formulas(in, a);
  const bool ranked = std::any_of(fs.begin(), fs.end(), has_ranked);
  const Universe dom = build(AtomTable{}, a.rank, o);
  const Universe cod = ranked ? build(AtomTable{}, cod_rank, o) : Universe::lazy(AtomTable{}, cod_rank);
  const ParameterStrategy s = strategy_of(a, o);
  const ElementarityReport r = check_preserves_reflects(j, fs, dom, cod, s);
  Outcome out;
  out.result = {{"embedding", j.name},
                {"domain_rank", a.rank},
                {"codomain_rank", cod_rank},
                {"strategy", a.strategy},
                {"formulas", r.formulas},
                {"instances", r.instances},
                {"failure_count", r.failure_count},
                {"pass", r.pass}};
  json classes = json::array();
  for (const auto& f : fs) classes.push_back(classify(f).name());
  out.result["classes"] = classes;
  out.witnesses["failures"] = elementarity_failures(r, fs, j);
  out.code = r.pass ? kOk : kFalse;
  return out;
}

Outcome cmd_elementarity(Inputs& in, Args& a, const Options& o) {
  const EmbeddingMap j = embedding_named(a.embedding);
  const std::uint32_t cod = a.codomain_rank.value_or(a.embedding == "hamkins" ? a.rank + 2 : a.rank);
  in.note("elementarity", a.embedding + "|" + std::to_string(a.rank) + "|" + std::to_string(cod) + "|" +
                              a.strategy + "|" + std::to_string(a.samples) + "|" + std::to_string(o.seed));
  in.normalized["embedding"] = a.embedding;
  in.normalized["rank"] = a.rank;
  in.normalized["codomain_rank"] = cod;
  return elementarity_outcome(in, a, o, j, cod);
}

Outcome cmd_hamkins(Inputs& in, Args& a, const Options& o) {
  in.note("hamkins", a.family + "|" + std::to_string(a.rank));
  in.normalized["rank"] = a.rank;
  in.normalized["check"] = a.family;
  Outcome out = elementarity_outcome(in, a, o, EmbeddingMap::hamkins(), a.rank + 2);
  const Universe dom = build(AtomTable{}, a.rank, o);
  std::vector<Node> images;
  std::size_t fixed = 0;
  for (Node x : dom.top()) {
    images.push_back(hamkins_j(x));
    fixed += images.back() == x;
  }
  std::vector<Node> sorted = images;
  std::sort(sorted.begin(), sorted.end());
  out.result["injective"] = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  out.result["fixed_points"] = fixed;
  json samples = json::object();
  for (std::size_t i = 0; i < dom.top().size() && i < 4; ++i) {
    samples[io::print_node(dom.top()[i])] = io::print_node(images[i]);
  }
  out.result["images"] = samples;
  return out;
}

// --- verification ------------------------------------------------------------------

struct Check {
  std::size_t checked = 0;
  std::vector<std::string> problems;
  void expect(bool ok, const std::string& what) {
    ++checked;
    if (!ok) problems.push_back(what);
  }
};

// direct from the definition: {q : {r : rq ∈ U} = {r : rp ∈ U}}
Subset i_set_by_definition(const FinMonoid& m, Subset u, Elem p) {
  auto hits = [&](Elem q) {
    Subset s;
    for (Elem r = 0; r < m.size(); ++r)
      if (u.contains(m.mul(r, q))) s.insert(r);
    return s;
  };
  Subset out;
  for (Elem q = 0; q < m.size(); ++q)
    if (hits(q) == hits(p)) out.insert(q);
  return out;
}

Elem label_elem(const FinMonoid& m, const json& j) {
  const auto e = m.find(j.get<std::string>());
  if (!e) throw InputError("report: unknown element '" + j.get<std::string>() + "'");
  return *e;
}

// T0 by separating sets, minimal neighbourhoods clopen, and their I-sets open
bool left_powder_by_definition(const FinMonoid& m, const MonoidTopology& t) {
  for (Elem x = 0; x < m.size(); ++x)
    for (Elem y = x + 1; y < m.size(); ++y)
      if (t.minimal_open(x).contains(y) && t.minimal_open(y).contains(x)) return false;
  for (Elem x = 0; x < m.size(); ++x) {
    const Subset n = t.minimal_open(x);
    if (!t.is_closed(n)) return false;
    for (Elem p = 0; p < m.size(); ++p)
      if (!t.is_open(i_set_by_definition(m, n, p))) return false;
  }
  return true;
}

void verify_powder(const json& rep, Check& c) {
  const FinMonoid m = io::monoid_from_json(rep.at("inputs").at("monoid"));
  const MonoidTopology t = io::topology_from_json(rep.at("inputs").at("topology"), m);
  for (const char* side : {"left", "right"}) {
    const json& w = rep.at("witnesses").at(side);
    const bool holds = rep.at("result").at(std::string(side) + "_powder").get<bool>();
    const FinMonoid mm = std::string(side) == "left" ? m : m.opposite();
    if (holds) {
      c.expect(w.is_null(), std::string(side) + ": verdict true but a witness is present");
      c.expect(left_powder_by_definition(mm, t), std::string(side) + ": verdict true but the definition fails");
      continue;
    }
    if (!w.is_object()) {
      c.expect(false, std::string(side) + ": verdict false without a witness");
      continue;
    }
    const std::string kind = w.at("kind").get<std::string>();
    const std::string tag = std::string(side) + " " + kind;
    if (kind == "not_t0") {
      const Elem x = label_elem(m, w.at("x"));
      const Elem y = label_elem(m, w.at("y"));
      bool separated = false;
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m.size()) && !separated; ++bits) {
        Subset s{bits};
        if (t.is_open(s) && s.contains(x) != s.contains(y)) separated = true;
      }
      c.expect(x != y && !separated, tag + ": the two points are separated by an open set");
    } else if (kind == "no_clopen_basis") {
      const Subset n = io::subset_from_json(w.at("neighbourhood"), m, "neighbourhood");
      bool minimal = false;
      for (Elem x = 0; x < m.size(); ++x) minimal = minimal || t.minimal_open(x) == n;
      c.expect(minimal && !t.is_closed(n), tag + ": set is not a non-closed minimal neighbourhood");
    } else if (kind == "i_set_not_open") {
      const Subset u = io::subset_from_json(w.at("u"), m, "u");
      const Elem p = label_elem(m, w.at("p"));
      const Subset claimed = io::subset_from_json(w.at("i_set"), m, "i_set");
      const Subset direct = i_set_by_definition(mm, u, p);
      c.expect(t.is_open(u) && direct == claimed && !t.is_open(direct), tag + ": I-set witness does not check out");
    } else {
      c.expect(false, tag + ": unknown witness kind");
    }
  }
}

void verify_complete(const json& rep, Check& c) {
  const FinMonoid m = io::monoid_from_json(rep.at("inputs").at("monoid"));
  const MonoidTopology t = io::topology_from_json(rep.at("inputs").at("topology"), m);
  const bool complete = rep.at("result").at("complete").get<bool>();
  if (complete) {
    // finite case: complete iff every point is open
    bool discrete = true;
    for (Elem x = 0; x < m.size(); ++x) discrete = discrete && t.is_open(Subset::single(x));
    c.expect(discrete, "verdict complete but some point is not open");
    return;
  }
  const json& w = rep.at("witnesses");
  if (w.contains("collapsed")) {
    const Elem x = label_elem(m, w["collapsed"][0]);
    const Elem y = label_elem(m, w["collapsed"][1]);
    // every open left congruence must identify them
    bool together = true;
    for (const auto& r : enumerate_left_congruences(m))
      if (has_open_classes(t, r.partition()) && !r.same(x, y)) together = false;
    c.expect(x != y && together, "collapsed pair is separated by an open left congruence");
  } else {
    c.expect(!rep.at("result").at("diagnosis").get<std::string>().empty(), "incomplete without diagnosis");
  }
}

void verify_chiral(const json& rep, Check& c) {
  const ChiralityCertificate cert = certificate_from_json(rep.at("witnesses").at("certificate"));
  auto problem = verify_certificate(cert);
  c.expect(!problem, problem.value_or(""));
  if (problem) return;
  for (std::size_t i = 0; i < cert.condition2.size(); ++i) {
    const auto& w = cert.condition2[i];
    if (w.found) continue;
    // a witness needs one fresh point per target that B does not hit on xs
    std::vector<bool> in_x(cert.width, false), covered(cert.width, false), wanted(cert.width, false);
    for (auto x : w.probe.xs) {
      in_x[x] = true;
      covered[cert.b[x]] = true;
    }
    std::size_t need = 0, fresh = 0;
    for (auto v : w.probe.vs)
      if (!covered[cert.a[v]] && !wanted[cert.a[v]]) {
        wanted[cert.a[v]] = true;
        ++need;
      }
    for (std::size_t p = 0; p < cert.width; ++p) fresh += !in_x[p];
    c.expect(need > fresh, "probe " + std::to_string(i) + " reported unsolvable but a witness exists");
  }
}

void verify_godel(const json& rep, Check& c) {
  const ActionTable act = io::action_from_json(rep.at("inputs").at("action"));
  const AtomTable atoms = carrier_atoms(act);
  const ExtendedAction ext(act, atoms);
  for (const auto& f : rep.at("witnesses").at("inclusion_failures")) {
    const Node a = io::parse_node(f.at("a").get<std::string>(), &atoms);
    const Node b = io::parse_node(f.at("b").get<std::string>(), &atoms);
    const std::string op = f.at("op").get<std::string>();
    Node r;
    LeftCongruence base = ext.stabiliser(a);
    if (op == "union") {
      r = union_of(a);
    } else {
      base = base.meet(ext.stabiliser(b));
      r = op == "pair" ? pair_of(a, b) : op == "difference" ? difference(a, b) : product(a, b);
    }
    c.expect(!base.refines(ext.stabiliser(r)), "inclusion failure for " + op + " does not reproduce");
  }
}

void verify_core(const json& rep, Check& c) {
  const json& in = rep.at("inputs");
  AtomTable atoms;
  OpennessOracle oracle;
  if (in.contains("action")) {
    const ActionTable act = io::action_from_json(in.at("action"));
    atoms = carrier_atoms(act);
    oracle = finite_oracle(ExtendedAction(act, atoms), io::topology_from_json(in.at("topology"), act.monoid()));
  } else {
    atoms = io::universe_from_json(in.at("universe")).atoms;
    oracle = z_oracle(atoms);
  }
  for (const auto& e : rep.at("witnesses").at("exclusions")) {
    const Node x = io::parse_node(e.at("node").get<std::string>(), &atoms);
    const Node w = io::parse_node(e.at("witness").get<std::string>(), &atoms);
    const auto closure = transitive_closure(x);
    const bool inside = std::find(closure.begin(), closure.end(), w) != closure.end();
    c.expect(inside && !oracle(w), "exclusion witness for " + e.at("node").get<std::string>() + " does not hold");
  }
}

void verify_elementarity(const json& rep, Check& c) {
  const json& res = rep.at("result");
  const EmbeddingMap j = embedding_named(res.at("embedding").get<std::string>());
  const auto dom_rank = res.at("domain_rank").get<std::uint32_t>();
  const auto cod_rank = res.at("codomain_rank").get<std::uint32_t>();
  for (const auto& f : rep.at("witnesses").at("failures")) {
    const Formula phi = io::parse_formula(f.at("formula").get<std::string>());
    const bool ranked = has_ranked(phi);
    const Universe dom = ranked ? Universe::build({}, dom_rank) : Universe::lazy({}, dom_rank);
    const Universe cod = ranked ? Universe::build({}, cod_rank) : Universe::lazy({}, cod_rank);
    Assignment d, k;
    bool in_range = true;
    for (const auto& [name, text] : f.at("params").items()) {
      const Node x = io::parse_node(text.get<std::string>());
      d[name] = x;
      k[name] = j.apply(x);
      in_range = in_range && dom.contains(x) && cod.contains(k[name]);
    }
    const bool lhs = eval(phi, dom, d), rhs = eval(phi, cod, k);
    c.expect(in_range && lhs != rhs && lhs == f.at("in_domain").get<bool>() && rhs == f.at("in_codomain").get<bool>(),
             "failure of " + f.at("formula").get<std::string>() + " does not reproduce");
  }
}

void verify_levy(const json& rep, Check& c) {
  const std::size_t k = rep.at("result").at("k").get<std::size_t>();
  const AtomTable atoms = levy_atoms(k);
  const ZOrbitLayout layout(atoms);
  for (const auto& s : rep.at("result").at("segments")) {
    const Node code = levy_segment(atoms, s.at("k").get<std::size_t>());
    const auto d = s.at("stabiliser_modulus").get<std::uint64_t>();
    // d fixes the segment and no proper divisor of d does
    bool least = layout.apply(d, code) == code;
    for (std::uint64_t e = 1; e < d && least; ++e)
      if (d % e == 0 && layout.apply(e, code) == code) least = false;
    c.expect(least, "stabiliser modulus at k=" + std::to_string(s.at("k").get<std::size_t>()) + " is wrong");
  }
}

Outcome cmd_verify(Inputs& in, Args& a, const Options&) {
  const json rep = in.load("report", a.report);
  in.normalized["report"] = a.report;
  for (const char* key : {"command", "inputs", "result", "witnesses"}) {
    if (!rep.is_object() || !rep.contains(key)) throw InputError(std::string("report: missing field '") + key + "'");
  }
  const std::string cmd = rep.at("command").get<std::string>();
  Check c;
  try {
    if (cmd == "powder-check") verify_powder(rep, c);
    else if (cmd == "complete-check") verify_complete(rep, c);
    else if (cmd == "chiral-criterion") verify_chiral(rep, c);
    else if (cmd == "godel-check") verify_godel(rep, c);
    else if (cmd == "core") verify_core(rep, c);
    else if (cmd == "elementarity" || cmd == "hamkins") verify_elementarity(rep, c);
    else if (cmd == "levy-probe") verify_levy(rep, c);
    else if (cmd == "verify") throw InputError("report: cannot verify a verification report");
    // other commands carry no witnesses
  } catch (const json::exception& e) {
    throw InputError(std::string("report: ") + e.what());
  }
  Outcome out;
  out.result = {{"verified_command", cmd}, {"checked", c.checked}, {"verified", c.problems.empty()}};
  out.witnesses["problems"] = c.problems;
  out.code = c.problems.empty() ? kOk : kFalse;
  return out;
}

void write_atomically(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write " + path);
    f << text;
    if (!f) throw InputError("cannot write " + path);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite checks for topological monoids acting on hereditarily finite sets", "tmon"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Options o;
  Args a;
  auto common = [&](CLI::App* s) {
    s->add_option("--out", o.out, "write the report here instead of stdout");
    s->add_option("--seed", o.seed, "seed for generated probes and sampling");
    s->add_option("--node-cap", o.node_cap, "largest universe to build")->check(CLI::PositiveNumber);
    s->add_option("--window-cap", o.window_cap, "largest window width")->check(CLI::PositiveNumber);
    s->add_option("--search-cap", o.search_cap, "largest exhaustive search")->check(CLI::PositiveNumber);
    s->add_option("--list-limit", o.list_limit, "longest list of nodes in a report");
    s->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1u, 256u));
    s->add_flag("--timing", o.timing, "add wall-clock time to the report");
  };
  auto universe_opts = [&](CLI::App* s) {
    s->add_option("--atoms", a.atoms, "number of atoms");
    s->add_option("--rank", a.rank, "rank bound n of V_n(A)");
    s->add_option("--universe", a.universe, "universe document");
  };

  std::map<std::string, Outcome (*)(Inputs&, Args&, const Options&)> handlers;
  auto add = [&](const char* name, const char* help, Outcome (*fn)(Inputs&, Args&, const Options&)) {
    CLI::App* s = app.add_subcommand(name, help);
    common(s);
    handlers[name] = fn;
    return s;
  };

  auto* ub = add("universe-build", "build V_n(A) and report stratum sizes", cmd_universe_build);
  universe_opts(ub);
  ub->add_flag("--list", a.list, "list the elements");

  auto* ae = add("action-extend", "extend an action on atoms to V_n(A)", cmd_action_extend);
  ae->add_option("--action", a.action, "catalog action or action document")->required();
  ae->add_option("--rank", a.rank, "rank bound")->required();
  ae->add_flag("--list", a.list, "always include the extended table");

  auto* st = add("stab", "stabiliser relation of a node", cmd_stab);
  st->add_option("--action", a.action, "catalog action or action document")->required();
  st->add_option("--node", a.node, "node in brace syntax")->required();
  st->add_option("--topology", a.topology, "report whether the classes are open");

  auto* co = add("core", "symmetric core of V_n(A)", cmd_core);
  co->add_option("--action", a.action, "catalog action or action document");
  co->add_option("--topology", a.topology, "discrete, indiscrete or topology document");
  universe_opts(co);

  auto* lp = add("levy-probe", "stabilisers of coded choice-sequence segments", cmd_levy);
  lp->add_option("--k", a.k, "segment length")->check(CLI::PositiveNumber);

  auto* gc = add("godel-check", "stabiliser inclusions for union, pair, difference, product", cmd_godel);
  gc->add_option("--action", a.action, "catalog action or action document")->required();
  gc->add_option("--rank", a.rank, "rank bound")->default_val(2);
  gc->add_option("--topology", a.topology, "also check closure of the core");

  auto* pc = add("powder-check", "left and right powder verdicts", cmd_powder);
  pc->add_option("--monoid", a.monoid, "catalog monoid or monoid document")->required();
  pc->add_option("--topology", a.topology, "discrete, indiscrete or topology document")->required();

  auto* cc = add("chiral-criterion", "chirality criterion on a window of the function monoid", cmd_chiral);
  cc->add_option("--width", a.width, "window width w");
  cc->add_option("--a", a.a, "identity, doubling, or comma list");
  cc->add_option("--b", a.b, "identity, doubling, or comma list");
  cc->add_option("--probes", a.probes, "number of generated probes");
  cc->add_option("--closed-image", a.closed_image, "widths for the closed-image probe")->delimiter(',');
  cc->add_option("--family", a.window_family, "full or perm (closed-image probe)");

  auto* cp = add("complete-check", "left completeness via the inverse limit", cmd_complete);
  cp->add_option("--monoid", a.monoid, "catalog monoid or monoid document")->required();
  cp->add_option("--topology", a.topology, "discrete, indiscrete or topology document")->required();

  auto* ev = add("eval", "evaluate a formula in V_n(A)", cmd_eval);
  universe_opts(ev);
  ev->add_option("--formula", a.formula_text, "formula text")->required();
  ev->add_option("--assign", a.assigns, "name=node");

  auto* el = add("elementarity", "preservation and reflection of formulas by an embedding", cmd_elementarity);
  el->add_option("--embedding", a.embedding, "identity or hamkins");
  el->add_option("--family", a.family, "atomic or delta0");
  el->add_option("--formula", a.formulas, "explicit formula (repeatable)");
  el->add_option("--rank", a.rank, "domain rank")->required();
  el->add_option("--codomain-rank", a.codomain_rank, "codomain rank");
  el->add_option("--strategy", a.strategy, "exhaustive or sampled");
  el->add_option("--samples", a.samples, "samples per formula");

  auto* hk = add("hamkins", "the embedding j(x) = {j(y) : y in x} + {{0, x}} on V_n", cmd_hamkins);
  hk->add_option("--check", a.family, "atomic or delta0");
  hk->add_option("--rank", a.rank, "domain rank")->required();
  hk->add_option("--strategy", a.strategy, "exhaustive or sampled");
  hk->add_option("--samples", a.samples, "samples per formula");

  auto* vf = add("verify", "re-check the witnesses in a report", cmd_verify);
  vf->add_option("--report", a.report, "report file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  const auto start = std::chrono::steady_clock::now();
  try {
    Inputs in;
    in.note("command", name);
    Outcome oc = handlers.at(name)(in, a, o);
    json report = {{"format_version", io::kFormatVersion},
                   {"command", name},
                   {"version", kVersion},
                   {"seed", o.seed},
                   {"caps", {{"nodes", o.node_cap}, {"window", o.window_cap}, {"search", o.search_cap}}},
                   {"input_digest", in.digest()},
                   {"inputs", in.normalized},
                   {"result", oc.result},
                   {"witnesses", oc.witnesses},
                   {"exit_code", oc.code}};
    if (o.timing) {
      report["timing_ms"] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    const std::string text = report.dump(2) + "\n";
    if (o.out.empty()) {
      out << text;
    } else {
      write_atomically(o.out, text);
    }
    return oc.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
}

}  // namespace tmon::cli
