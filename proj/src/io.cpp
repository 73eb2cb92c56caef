#include "tmon/io.hpp"

#include <algorithm>
#include <cctype>

#include "tmon/catalog.hpp"

namespace tmon::io {

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // locate the byte offset as line:column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw InputError(where + ": " + what); }

const json& field(const json& doc, const std::string& key, const std::string& where) {
  if (!doc.is_object()) fail(where, "expected an object");
  auto it = doc.find(key);
  if (it == doc.end()) fail(where, "missing field '" + key + "'");
  return *it;
}

void check_version(const json& doc, const std::string& where) {
  if (!doc.is_object()) fail(where, "expected an object");
  auto it = doc.find("format_version");
  if (it == doc.end()) return;
  if (!it->is_number_integer() || it->get<int>() != kFormatVersion) {
    fail(where + ".format_version", "unsupported version (expected " + std::to_string(kFormatVersion) + ")");
  }
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) fail(where + "[" + std::to_string(i) + "]", "expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

// a label from `labels` or an index into it
std::uint32_t resolve(const json& j, const std::vector<std::string>& labels, const std::string& where) {
  if (j.is_number_unsigned() || j.is_number_integer()) {
    const auto v = j.get<std::int64_t>();
    if (v < 0 || static_cast<std::size_t>(v) >= labels.size()) fail(where, "index out of range");
    return static_cast<std::uint32_t>(v);
  }
  if (j.is_string()) {
    auto it = std::find(labels.begin(), labels.end(), j.get<std::string>());
    if (it == labels.end()) fail(where, "unknown label '" + j.get<std::string>() + "'");
    return static_cast<std::uint32_t>(it - labels.begin());
  }
  fail(where, "expected a label or an index");
}

std::uint32_t get_uint(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) fail(where, "expected a non-negative integer");
  const auto v = j.get<std::uint64_t>();
  if (v > 0xffffffffu) fail(where, "value too large");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

json monoid_to_json(const FinMonoid& m) {
  json table = json::array();
  for (Elem a = 0; a < m.size(); ++a) {
    json row = json::array();
    for (Elem b = 0; b < m.size(); ++b) row.push_back(m.label(m.mul(a, b)));
    table.push_back(row);
  }
  return {{"format_version", kFormatVersion},
          {"elements", m.labels()},
          {"table", table},
          {"identity", m.label(m.identity())}};
}

FinMonoid monoid_from_json(const json& doc) {
  const std::string w = "monoid";
  check_version(doc, w);
  auto labels = string_list(field(doc, "elements", w), w + ".elements");
  const json& t = field(doc, "table", w);
  if (!t.is_array() || t.size() != labels.size()) fail(w + ".table", "expected one row per element");
  std::vector<std::vector<Elem>> table;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::string wr = w + ".table[" + std::to_string(i) + "]";
    if (!t[i].is_array() || t[i].size() != labels.size()) fail(wr, "expected one entry per element");
    std::vector<Elem> row;
    for (std::size_t j = 0; j < t[i].size(); ++j) row.push_back(resolve(t[i][j], labels, wr + "[" + std::to_string(j) + "]"));
    table.push_back(std::move(row));
  }
  std::optional<Elem> identity;
  if (doc.contains("identity")) identity = resolve(doc["identity"], labels, w + ".identity");
  return validate_monoid(std::move(labels), table, identity);
}

json action_to_json(const ActionTable& a) {
  json table = json::object();
  for (Elem m = 0; m < a.monoid().size(); ++m) {
    json row = json::array();
    for (Point x = 0; x < a.carrier_size(); ++x) row.push_back(a.carrier()[a.act(m, x)]);
    table[a.monoid().label(m)] = row;
  }
  return {{"format_version", kFormatVersion},
          {"monoid", monoid_to_json(a.monoid())},
          {"carrier", a.carrier()},
          {"table", table}};
}

ActionTable action_from_json(const json& doc) {
  const std::string w = "action";
  check_version(doc, w);
  const json& mj = field(doc, "monoid", w);
  FinMonoid m = mj.is_string() ? catalog_monoid(mj.get<std::string>()) : monoid_from_json(mj);
  auto carrier = string_list(field(doc, "carrier", w), w + ".carrier");
  const json& t = field(doc, "table", w);
  if (!t.is_object()) fail(w + ".table", "expected an object keyed by monoid element");
  std::vector<std::vector<Point>> table(m.size());
  for (Elem e = 0; e < m.size(); ++e) {
    const std::string wr = w + ".table." + m.label(e);
    const json& row = field(t, m.label(e), w + ".table");
    if (!row.is_array() || row.size() != carrier.size()) fail(wr, "expected one image per carrier point");
    for (std::size_t i = 0; i < row.size(); ++i) table[e].push_back(resolve(row[i], carrier, wr + "[" + std::to_string(i) + "]"));
  }
  if (t.size() != m.size()) fail(w + ".table", "has entries for labels that are not monoid elements");
  return ActionTable::make(std::move(m), std::move(carrier), std::move(table));
}

json universe_to_json(const UniverseSpec& u) {
  json j = {{"format_version", kFormatVersion},
            {"atoms", u.atoms.count()},
            {"labels", u.atoms.labels},
            {"rank", u.rank}};
  if (!u.atoms.moduli.empty()) {
    json mod = json::array();
    for (const auto& m : u.atoms.moduli) mod.push_back(m ? json(*m) : json(nullptr));
    j["moduli"] = mod;
  }
  return j;
}

UniverseSpec universe_from_json(const json& doc) {
  const std::string w = "universe";
  check_version(doc, w);
  UniverseSpec u;
  u.rank = get_uint(field(doc, "rank", w), w + ".rank");
  if (doc.contains("orbits")) {
    const json& o = doc["orbits"];
    if (!o.is_array()) fail(w + ".orbits", "expected an array of moduli");
    std::vector<std::uint64_t> moduli;
    for (std::size_t i = 0; i < o.size(); ++i) {
      auto v = get_uint(o[i], w + ".orbits[" + std::to_string(i) + "]");
      if (v == 0) fail(w + ".orbits[" + std::to_string(i) + "]", "modulus must be positive");
      moduli.push_back(v);
    }
    u.atoms = AtomTable::orbits(moduli);
    if (doc.contains("atoms") && get_uint(doc["atoms"], w + ".atoms") != u.atoms.count()) {
      fail(w + ".atoms", "does not match the orbit sizes");
    }
    return u;
  }
  const std::size_t k = get_uint(field(doc, "atoms", w), w + ".atoms");
  if (k > kDefaultNodeCap) throw CapExceeded(w + ".atoms: " + std::to_string(k) + " atoms exceed the node cap");
  u.atoms = AtomTable::anonymous(k);
  if (doc.contains("labels")) {
    u.atoms.labels = string_list(doc["labels"], w + ".labels");
    if (u.atoms.labels.size() != k) fail(w + ".labels", "expected one label per atom");
  }
  if (doc.contains("moduli")) {
    const json& m = doc["moduli"];
    if (!m.is_array() || m.size() != k) fail(w + ".moduli", "expected one entry per atom");
    for (std::size_t i = 0; i < k; ++i) {
      if (m[i].is_null()) {
        u.atoms.moduli.push_back(std::nullopt);
      } else {
        u.atoms.moduli.push_back(get_uint(m[i], w + ".moduli[" + std::to_string(i) + "]"));
      }
    }
  }
  try {
    u.atoms.validate();
  } catch (const InputError& e) {
    fail(w, e.what());
  }
  return u;
}

json subset_to_json(const FinMonoid& m, Subset s) {
  json out = json::array();
  for (Elem x : s.elements()) out.push_back(m.label(x));
  return out;
}

Subset subset_from_json(const json& labels, const FinMonoid& m, const std::string& where) {
  if (!labels.is_array()) fail(where, "expected an array of elements");
  Subset s;
  for (std::size_t i = 0; i < labels.size(); ++i) s.insert(resolve(labels[i], m.labels(), where + "[" + std::to_string(i) + "]"));
  return s;
}

json partition_to_json(const FinMonoid& m, const Partition& p) {
  json out = json::array();
  for (const auto& cls : p.classes()) {
    json b = json::array();
    for (Elem x : cls) b.push_back(m.label(x));
    out.push_back(b);
  }
  return out;
}

Partition partition_from_json(const json& blocks, const FinMonoid& m, const std::string& where) {
  if (!blocks.is_array()) fail(where, "expected an array of blocks");
  std::vector<std::vector<Elem>> bs;
  for (std::size_t i = 0; i < blocks.size(); ++i) bs.push_back(subset_from_json(blocks[i], m, where + "[" + std::to_string(i) + "]").elements());
  try {
    return Partition::from_blocks(m.size(), bs);
  } catch (const InputError& e) {
    fail(where, e.what());
  }
}

json topology_to_json(const FinMonoid& m, const MonoidTopology& t) {
  json j = {{"format_version", kFormatVersion}};
  if (t.kind() == MonoidTopology::Kind::Filter) {
    j["kind"] = "filter";
    json gens = json::array();
    for (const auto& g : t.filter()->generators) gens.push_back(partition_to_json(m, g.partition()));
    j["generators"] = gens;
  } else {
    j["kind"] = "basis";
    json basis = json::array();
    for (Subset s : t.basis()) basis.push_back(subset_to_json(m, s));
    j["basis"] = basis;
  }
  return j;
}

MonoidTopology topology_from_json(const json& doc, const FinMonoid& m) {
  const std::string w = "topology";
  check_version(doc, w);
  const json& kind = field(doc, "kind", w);
  if (!kind.is_string()) fail(w + ".kind", "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "discrete") return MonoidTopology::discrete(m);
  if (k == "indiscrete") return MonoidTopology::indiscrete(m);
  if (k == "filter") {
    const json& g = field(doc, "generators", w);
    if (!g.is_array()) fail(w + ".generators", "expected an array of congruences");
    std::vector<LeftCongruence> seeds;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::string wg = w + ".generators[" + std::to_string(i) + "]";
      Partition p = partition_from_json(g[i], m, wg);
      if (auto v = is_left_congruence(m, p)) {
        fail(wg, "not a left congruence: " + m.label(v->x) + " ~ " + m.label(v->y) + " but " +
                     m.label(m.mul(v->a, v->x)) + " !~ " + m.label(m.mul(v->a, v->y)));
      }
      seeds.push_back(LeftCongruence::checked(m, p));
    }
    return MonoidTopology::from_filter(m, filter_close(m, seeds));
  }
  if (k == "basis") {
    const json& b = field(doc, "basis", w);
    if (!b.is_array()) fail(w + ".basis", "expected an array of subsets");
    std::vector<Subset> basis;
    for (std::size_t i = 0; i < b.size(); ++i) basis.push_back(subset_from_json(b[i], m, w + ".basis[" + std::to_string(i) + "]"));
    return MonoidTopology::from_basis(m, std::move(basis));
  }
  fail(w + ".kind", "expected discrete, indiscrete, filter or basis");
}

// --- text syntax --------------------------------------------------------------

namespace {

enum class Tok { Ident, Number, Arrow, LParen, RParen, LBrace, RBrace, Comma, Dot, Eq, At, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '\'')) ++i;
      out.push_back({Tok::Ident, s.substr(start, i - start), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Tok::Number, s.substr(start, i - start), start});
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({Tok::Arrow, "->", start});
      i += 2;
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case ',': k = Tok::Comma; break;
      case '.': k = Tok::Dot; break;
      case '=': k = Tok::Eq; break;
      case '@': k = Tok::At; break;
      default: throw InputError("column " + std::to_string(start + 1) + ": unexpected character '" + std::string(1, c) + "'");
    }
    out.push_back({k, std::string(1, c), start});
    ++i;
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

bool is_keyword(const std::string& s) {
  static const char* const kw[] = {"forall", "exists", "Forall", "Exists", "in", "not", "and", "or", "true", "false"};
  return std::any_of(std::begin(kw), std::end(kw), [&](const char* k) { return s == k; });
}

class Parser {
 public:
  Parser(const std::string& text, const AtomTable* atoms) : toks_(tokenize(text)), atoms_(atoms) {}

  Formula formula() {
    Formula f = implication();
    expect(Tok::End, "end of input");
    return f;
  }

  Node node_only() {
    Node n = node();
    expect(Tok::End, "end of input");
    return n;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  bool at_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }
  Token take() { return toks_[i_++]; }

  [[noreturn]] void error(const std::string& what) const {
    throw InputError("column " + std::to_string(peek().pos + 1) + ": " + what);
  }
  void expect(Tok k, const char* what) {
    if (peek().kind != k) error(std::string("expected ") + what);
    ++i_;
  }
  void expect_word(const char* w) {
    if (!at_word(w)) error(std::string("expected '") + w + "'");
    ++i_;
  }

  Formula implication() {
    Formula l = disjunction();
    if (peek().kind == Tok::Arrow) {
      ++i_;
      return Formula::implies(l, implication());
    }
    return l;
  }
  Formula disjunction() {
    Formula l = conjunction();
    while (at_word("or")) {
      ++i_;
      l = Formula::disj(l, conjunction());
    }
    return l;
  }
  Formula conjunction() {
    Formula l = unary();
    while (at_word("and")) {
      ++i_;
      l = Formula::conj(l, unary());
    }
    return l;
  }
  Formula unary() {
    if (at_word("not")) {
      ++i_;
      return Formula::negate(unary());
    }
    if (at_word("forall") || at_word("exists")) {
      const bool all = take().text == "forall";
      std::string v = variable();
      expect_word("in");
      Term b = term();
      expect(Tok::Dot, "'.'");
      Formula body = implication();
      return all ? Formula::bounded_forall(v, b, body) : Formula::bounded_exists(v, b, body);
    }
    if (at_word("Forall") || at_word("Exists")) {
      const bool all = take().text == "Forall";
      std::string v = variable();
      expect(Tok::Dot, "'.'");
      Formula body = implication();
      return all ? Formula::ranked_forall(v, body) : Formula::ranked_exists(v, body);
    }
    if (peek().kind == Tok::LParen) {
      ++i_;
      Formula f = implication();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (at_word("true")) {
      ++i_;
      return Formula::truth();
    }
    if (at_word("false")) {
      ++i_;
      return Formula::falsity();
    }
    Term a = term();
    if (at_word("in")) {
      ++i_;
      return Formula::member(a, term());
    }
    if (peek().kind == Tok::Eq) {
      ++i_;
      return Formula::equal(a, term());
    }
    error("expected 'in' or '='");
  }

  std::string variable() {
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) error("expected a variable name");
    return take().text;
  }

  Term term() {
    if (peek().kind == Tok::LBrace || peek().kind == Tok::At) return Term::constant(node());
    return Term::var(variable());
  }

  Node atom_by_index() {
    expect(Tok::At, "'@'");
    if (peek().kind != Tok::Number) error("expected an atom index");
    const std::string digits = take().text;
    if (digits.size() > 4) error("atom index too large");
    const std::size_t idx = std::stoul(digits);
    if (atoms_ && idx >= atoms_->count()) error("atom index out of range");
    return make_atom(atoms_ ? *atoms_ : AtomTable::anonymous(idx + 1), idx);
  }

  Node node() {
    if (peek().kind == Tok::At) return atom_by_index();
    if (peek().kind == Tok::Ident) {
      if (!atoms_) error("atom labels need an atom table");
      const std::string label = peek().text;
      auto it = std::find(atoms_->labels.begin(), atoms_->labels.end(), label);
      if (it == atoms_->labels.end()) error("unknown atom '" + label + "'");
      ++i_;
      return make_atom(*atoms_, static_cast<std::size_t>(it - atoms_->labels.begin()));
    }
    expect(Tok::LBrace, "'{', '@' or an atom label");
    std::vector<Node> kids;
    if (peek().kind != Tok::RBrace) {
      kids.push_back(node());
      while (peek().kind == Tok::Comma) {
        ++i_;
        kids.push_back(node());
      }
    }
    expect(Tok::RBrace, "'}'");
    return make_set(std::move(kids));
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  const AtomTable* atoms_;
};

std::string term_text(const Term& t) { return t.is_var() ? t.name() : to_string(t.node(), nullptr); }

// prec: 1 implication, 2 disjunction, 3 conjunction, 4 unary. A quantifier
// swallows everything to its right, so it needs parentheses unless trailing.
std::string print(const Formula& f, int prec, bool trailing) {
  using K = Formula::Kind;
  auto wrap = [](bool paren, std::string s) { return paren ? "(" + s + ")" : s; };
  switch (f.kind()) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Member: return term_text(f.lhs()) + " in " + term_text(f.rhs());
    case K::Equal: return term_text(f.lhs()) + " = " + term_text(f.rhs());
    case K::Not: return "not " + print(f.left(), 4, trailing);
    case K::And: {
      const bool p = prec > 3;
      return wrap(p, print(f.left(), 3, false) + " and " + print(f.right(), 4, p || trailing));
    }
    case K::Or: {
      const bool p = prec > 2;
      return wrap(p, print(f.left(), 2, false) + " or " + print(f.right(), 3, p || trailing));
    }
    case K::Implies: {
      const bool p = prec > 1;
      return wrap(p, print(f.left(), 2, false) + " -> " + print(f.right(), 1, p || trailing));
    }
    case K::BoundedForall:
    case K::BoundedExists: {
      const std::string q = f.kind() == K::BoundedForall ? "forall " : "exists ";
      return wrap(!trailing, q + f.var() + " in " + term_text(f.bound()) + " . " + print(f.body(), 1, true));
    }
    case K::RankedForall:
    case K::RankedExists: {
      const std::string q = f.kind() == K::RankedForall ? "Forall " : "Exists ";
      return wrap(!trailing, q + f.var() + " . " + print(f.body(), 1, true));
    }
  }
  return "?";
}

}  // namespace

std::string print_node(Node x, const AtomTable* atoms) { return to_string(x, atoms); }

Node parse_node(const std::string& text, const AtomTable* atoms) { return Parser(text, atoms).node_only(); }

std::string print_formula(const Formula& f) { return print(f, 1, true); }

Formula parse_formula(const std::string& text, const AtomTable* atoms) { return Parser(text, atoms).formula(); }

}  // namespace tmon::io
