#include "tmon/logic.hpp"

#include <algorithm>
#include <mutex>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "tmon/error.hpp"

namespace tmon {

struct Formula::Data {
  Kind kind;
  Term a;
  Term b;
  std::string var;
  std::optional<Formula> l;
  std::optional<Formula> r;
};

namespace {
using K = Formula::Kind;
}

Formula Formula::truth() { return Formula(std::make_shared<const Data>(Data{K::True, {}, {}, {}, {}, {}})); }
Formula Formula::falsity() { return Formula(std::make_shared<const Data>(Data{K::False, {}, {}, {}, {}, {}})); }
Formula Formula::member(Term a, Term b) {
  return Formula(std::make_shared<const Data>(Data{K::Member, std::move(a), std::move(b), {}, {}, {}}));
}
Formula Formula::equal(Term a, Term b) {
  return Formula(std::make_shared<const Data>(Data{K::Equal, std::move(a), std::move(b), {}, {}, {}}));
}
Formula Formula::negate(Formula f) {
  return Formula(std::make_shared<const Data>(Data{K::Not, {}, {}, {}, std::move(f), {}}));
}
Formula Formula::conj(Formula l, Formula r) {
  return Formula(std::make_shared<const Data>(Data{K::And, {}, {}, {}, std::move(l), std::move(r)}));
}
Formula Formula::disj(Formula l, Formula r) {
  return Formula(std::make_shared<const Data>(Data{K::Or, {}, {}, {}, std::move(l), std::move(r)}));
}
Formula Formula::implies(Formula l, Formula r) {
  return Formula(std::make_shared<const Data>(Data{K::Implies, {}, {}, {}, std::move(l), std::move(r)}));
}
Formula Formula::bounded_forall(std::string var, Term bound, Formula body) {
  return Formula(
      std::make_shared<const Data>(Data{K::BoundedForall, std::move(bound), {}, std::move(var), std::move(body), {}}));
}
Formula Formula::bounded_exists(std::string var, Term bound, Formula body) {
  return Formula(
      std::make_shared<const Data>(Data{K::BoundedExists, std::move(bound), {}, std::move(var), std::move(body), {}}));
}
Formula Formula::ranked_forall(std::string var, Formula body) {
  return Formula(std::make_shared<const Data>(Data{K::RankedForall, {}, {}, std::move(var), std::move(body), {}}));
}
Formula Formula::ranked_exists(std::string var, Formula body) {
  return Formula(std::make_shared<const Data>(Data{K::RankedExists, {}, {}, std::move(var), std::move(body), {}}));
}

Formula::Kind Formula::kind() const { return d_->kind; }
bool Formula::is_atomic() const {
  return d_->kind == K::True || d_->kind == K::False || d_->kind == K::Member || d_->kind == K::Equal;
}
bool Formula::is_binary() const { return d_->kind == K::And || d_->kind == K::Or || d_->kind == K::Implies; }
bool Formula::is_quantifier() const {
  return d_->kind == K::BoundedForall || d_->kind == K::BoundedExists || is_ranked();
}
bool Formula::is_ranked() const { return d_->kind == K::RankedForall || d_->kind == K::RankedExists; }
const Term& Formula::lhs() const { return d_->a; }
const Term& Formula::rhs() const { return d_->b; }
const std::string& Formula::var() const { return d_->var; }
const Formula& Formula::left() const { return *d_->l; }
const Formula& Formula::right() const { return *d_->r; }

bool operator==(const Formula& x, const Formula& y) {
  if (x.d_ == y.d_) return true;
  const auto& a = *x.d_;
  const auto& b = *y.d_;
  return a.kind == b.kind && a.a == b.a && a.b == b.b && a.var == b.var && a.l == b.l && a.r == b.r;
}

namespace {

void free_vars_rec(const Formula& f, std::vector<std::string>& bound, std::set<std::string>& out) {
  auto term = [&](const Term& t) {
    if (t.is_var() && std::find(bound.begin(), bound.end(), t.name()) == bound.end()) out.insert(t.name());
  };
  switch (f.kind()) {
    case K::True:
    case K::False:
      return;
    case K::Member:
    case K::Equal:
      term(f.lhs());
      term(f.rhs());
      return;
    case K::Not:
      free_vars_rec(f.left(), bound, out);
      return;
    case K::And:
    case K::Or:
    case K::Implies:
      free_vars_rec(f.left(), bound, out);
      free_vars_rec(f.right(), bound, out);
      return;
    case K::BoundedForall:
    case K::BoundedExists:
      term(f.bound());
      [[fallthrough]];
    case K::RankedForall:
    case K::RankedExists:
      bound.push_back(f.var());
      free_vars_rec(f.body(), bound, out);
      bound.pop_back();
      return;
  }
}

}  // namespace

std::vector<std::string> Formula::free_variables() const {
  std::vector<std::string> bound;
  std::set<std::string> out;
  free_vars_rec(*this, bound, out);
  return {out.begin(), out.end()};
}

std::size_t Formula::depth() const {
  if (is_atomic()) return 1;
  if (is_binary()) return 1 + std::max(left().depth(), right().depth());
  return 1 + left().depth();
}

void Formula::collect_constants(std::vector<Node>& out) const {
  auto term = [&](const Term& t) {
    if (!t.is_var()) out.push_back(t.node());
  };
  if (kind() == K::Member || kind() == K::Equal) {
    term(lhs());
    term(rhs());
  } else if (kind() == K::BoundedForall || kind() == K::BoundedExists) {
    term(bound());
  }
  if (d_->l) d_->l->collect_constants(out);
  if (d_->r) d_->r->collect_constants(out);
}

// --- evaluation -----------------------------------------------------------

namespace {

struct Env {
  std::vector<std::pair<const std::string*, Node>> slots;

  Node lookup(const std::string& name) const {
    for (auto it = slots.rbegin(); it != slots.rend(); ++it) {
      if (*it->first == name) return it->second;
    }
    throw InputError("unbound variable '" + name + "'");
  }
  Node value(const Term& t) const { return t.is_var() ? lookup(t.name()) : t.node(); }
};

bool eval_rec(const Formula& f, const Universe& u, Env& env) {
  switch (f.kind()) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::Member:
      return env.value(f.rhs()).contains(env.value(f.lhs()));
    case K::Equal:
      return env.value(f.lhs()) == env.value(f.rhs());
    case K::Not:
      return !eval_rec(f.left(), u, env);
    case K::And:
      return eval_rec(f.left(), u, env) && eval_rec(f.right(), u, env);
    case K::Or:
      return eval_rec(f.left(), u, env) || eval_rec(f.right(), u, env);
    case K::Implies:
      return !eval_rec(f.left(), u, env) || eval_rec(f.right(), u, env);
    case K::BoundedForall:
    case K::BoundedExists:
    case K::RankedForall:
    case K::RankedExists: {
      const bool universal = f.kind() == K::BoundedForall || f.kind() == K::RankedForall;
      std::span<const Node> range = f.is_ranked() ? std::span<const Node>(u.top()) : env.value(f.bound()).children();
      env.slots.emplace_back(&f.var(), Node{});
      bool result = universal;
      for (Node n : range) {
        env.slots.back().second = n;
        if (eval_rec(f.body(), u, env) != universal) {
          result = !universal;
          break;
        }
      }
      env.slots.pop_back();
      return result;
    }
  }
  return false;
}

}  // namespace

bool eval(const Formula& f, const Universe& u, const Assignment& assignment) {
  for (const auto& v : f.free_variables()) {
    const auto it = assignment.find(v);
    if (it == assignment.end()) throw InputError("unbound variable '" + v + "'");
    if (!u.contains(it->second)) throw InputError("value of '" + v + "' lies outside the universe");
  }
  std::vector<Node> constants;
  f.collect_constants(constants);
  for (Node c : constants) {
    if (!u.contains(c)) throw InputError("constant " + to_string(c) + " lies outside the universe");
  }
  Env env;
  for (const auto& [name, node] : assignment) env.slots.emplace_back(&name, node);
  return eval_rec(f, u, env);
}

// --- classification ---------------------------------------------------------

namespace {

struct Levels {
  unsigned sigma = 0;
  unsigned pi = 0;
  bool delta0() const { return sigma == 0 && pi == 0; }
};

Levels exists_over(Levels b) {
  const unsigned s = std::max(1u, std::min(b.sigma, b.pi + 1));
  return {s, s + 1};
}

Levels forall_over(Levels b) {
  const unsigned p = std::max(1u, std::min(b.pi, b.sigma + 1));
  return {p + 1, p};
}

Levels levels(const Formula& f) {
  switch (f.kind()) {
    case K::True:
    case K::False:
    case K::Member:
    case K::Equal:
      return {};
    case K::Not: {
      Levels b = levels(f.left());
      return {b.pi, b.sigma};
    }
    case K::And:
    case K::Or: {
      Levels l = levels(f.left()), r = levels(f.right());
      return {std::max(l.sigma, r.sigma), std::max(l.pi, r.pi)};
    }
    case K::Implies: {
      Levels l = levels(f.left()), r = levels(f.right());
      return {std::max(l.pi, r.sigma), std::max(l.sigma, r.pi)};
    }
    case K::BoundedExists: {
      Levels b = levels(f.body());
      return b.delta0() ? b : exists_over(b);
    }
    case K::BoundedForall: {
      Levels b = levels(f.body());
      return b.delta0() ? b : forall_over(b);
    }
    case K::RankedExists:
      return exists_over(levels(f.body()));
    case K::RankedForall:
      return forall_over(levels(f.body()));
  }
  return {};
}

}  // namespace

Classification classify(const Formula& f) {
  Levels l = levels(f);
  Classification c;
  c.sigma_level = l.sigma;
  c.pi_level = l.pi;
  if (l.delta0()) return c;
  if (l.pi < l.sigma) {
    c.kind = Classification::Kind::Pi;
    c.level = l.pi;
  } else {
    c.kind = Classification::Kind::Sigma;
    c.level = l.sigma;
  }
  return c;
}

std::string Classification::name() const {
  switch (kind) {
    case Kind::Delta0:
      return "Delta0";
    case Kind::Sigma:
      return "Sigma" + std::to_string(level);
    case Kind::Pi:
      return "Pi" + std::to_string(level);
  }
  return "?";
}

namespace {

Formula rename_rec(const Formula& f, std::vector<std::pair<std::string, std::string>>& scope, std::size_t& counter,
                   const std::string& prefix) {
  auto term = [&](const Term& t) {
    if (!t.is_var()) return t;
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (it->first == t.name()) return Term::var(it->second);
    }
    return t;
  };
  switch (f.kind()) {
    case K::True:
    case K::False:
      return f;
    case K::Member:
      return Formula::member(term(f.lhs()), term(f.rhs()));
    case K::Equal:
      return Formula::equal(term(f.lhs()), term(f.rhs()));
    case K::Not:
      return Formula::negate(rename_rec(f.left(), scope, counter, prefix));
    case K::And:
    case K::Or:
    case K::Implies: {
      Formula l = rename_rec(f.left(), scope, counter, prefix);
      Formula r = rename_rec(f.right(), scope, counter, prefix);
      if (f.kind() == K::And) return Formula::conj(l, r);
      if (f.kind() == K::Or) return Formula::disj(l, r);
      return Formula::implies(l, r);
    }
    default: {
      std::optional<Term> bound;
      if (!f.is_ranked()) bound = term(f.bound());
      std::string fresh = prefix + std::to_string(counter++);
      scope.emplace_back(f.var(), fresh);
      Formula body = rename_rec(f.body(), scope, counter, prefix);
      scope.pop_back();
      switch (f.kind()) {
        case K::BoundedForall:
          return Formula::bounded_forall(fresh, *bound, body);
        case K::BoundedExists:
          return Formula::bounded_exists(fresh, *bound, body);
        case K::RankedForall:
          return Formula::ranked_forall(fresh, body);
        default:
          return Formula::ranked_exists(fresh, body);
      }
    }
  }
}

}  // namespace

Formula rename_bound(const Formula& f, const std::string& prefix) {
  std::vector<std::pair<std::string, std::string>> scope;
  std::size_t counter = 0;
  return rename_rec(f, scope, counter, prefix);
}

// --- Hamkins embedding --------------------------------------------------------

namespace {

class HamkinsMemo {
 public:
  static HamkinsMemo& instance() {
    static HamkinsMemo memo;
    return memo;
  }

  Node apply(Node x) {
    if (x.is_atom()) throw InputError("hamkins_j is defined on pure sets only; met atom @" + std::to_string(x.atom_index()));
    {
      std::lock_guard lock(mu_);
      if (auto it = memo_.find(x); it != memo_.end()) return it->second;
    }
    std::vector<Node> elems;
    elems.reserve(x.size() + 1);
    for (Node y : x.children()) elems.push_back(apply(y));
    elems.push_back(make_set({empty_set(), x}));
    Node image = make_set(std::move(elems));
    std::lock_guard lock(mu_);
    memo_.emplace(x, image);
    return image;
  }

 private:
  std::mutex mu_;
  std::unordered_map<Node, Node> memo_;
};

}  // namespace

Node hamkins_j(Node x) { return HamkinsMemo::instance().apply(x); }

EmbeddingMap EmbeddingMap::identity() {
  return {"identity", [](Node x) { return x; }};
}

EmbeddingMap EmbeddingMap::hamkins() { return {"hamkins", [](Node x) { return hamkins_j(x); }}; }

// --- elementarity -----------------------------------------------------------

ElementarityReport check_preserves_reflects(const EmbeddingMap& j, const std::vector<Formula>& formulas,
                                            const Universe& domain, const Universe& codomain,
                                            const ParameterStrategy& strategy) {
  constexpr std::size_t kKeptFailures = 32;
  ElementarityReport report;
  report.strategy = strategy;
  report.formulas = formulas.size();
  const auto& params = domain.top();

  std::unordered_map<Node, Node> image;
  auto mapped = [&](Node x) {
    auto it = image.find(x);
    if (it != image.end()) return it->second;
    Node y = j.apply(x);
    if (!codomain.contains(y)) {
      throw InputError("image of " + to_string(x) + " under " + j.name + " lies outside the codomain universe");
    }
    image.emplace(x, y);
    return y;
  };

  std::mt19937_64 rng(strategy.seed);
  for (std::size_t fi = 0; fi < formulas.size(); ++fi) {
    const Formula& f = formulas[fi];
    const auto vars = f.free_variables();
    std::vector<Node> constants;
    f.collect_constants(constants);
    if (!constants.empty()) {
      throw InputError("elementarity checks take parameters through free variables, not constants");
    }
    auto check = [&](const std::vector<std::size_t>& idx) {
      Assignment dom_env, cod_env;
      for (std::size_t v = 0; v < vars.size(); ++v) {
        dom_env[vars[v]] = params[idx[v]];
        cod_env[vars[v]] = mapped(params[idx[v]]);
      }
      const bool lhs = eval(f, domain, dom_env);
      const bool rhs = eval(f, codomain, cod_env);
      ++report.instances;
      if (lhs != rhs) {
        report.pass = false;
        ++report.failure_count;
        if (report.failures.size() < kKeptFailures) report.failures.push_back({fi, dom_env, lhs, rhs});
      }
    };
    if (params.empty() && !vars.empty()) continue;
    std::vector<std::size_t> idx(vars.size(), 0);
    if (strategy.kind == ParameterStrategy::Kind::Exhaustive) {
      std::size_t tuples = 1;
      for (std::size_t v = 0; v < vars.size(); ++v) {
        if (tuples > strategy.cap / std::max<std::size_t>(params.size(), 1)) {
          throw CapExceeded("exhaustive parameter enumeration exceeds cap " + std::to_string(strategy.cap));
        }
        tuples *= params.size();
      }
      // first variable varies slowest
      for (std::size_t t = 0; t < tuples; ++t) {
        std::size_t rest = t;
        for (std::size_t v = vars.size(); v-- > 0;) {
          idx[v] = rest % params.size();
          rest /= params.size();
        }
        check(idx);
      }
    } else {
      for (std::size_t s = 0; s < strategy.samples; ++s) {
        for (auto& i : idx) i = static_cast<std::size_t>(rng() % params.size());
        check(idx);
      }
    }
  }
  return report;
}

std::vector<Formula> formula_family(const std::string& name) {
  auto v = [](const char* n) { return Term::var(n); };
  std::vector<Formula> out{Formula::member(v("x"), v("y")), Formula::equal(v("x"), v("y"))};
  if (name == "atomic") return out;
  if (name != "delta0") throw InputError("unknown formula family '" + name + "'");
  // x has exactly one element
  out.push_back(Formula::bounded_exists("y", v("x"), Formula::bounded_forall("z", v("x"), Formula::equal(v("z"), v("y")))));
  // x is empty
  out.push_back(Formula::bounded_forall("y", v("x"), Formula::falsity()));
  // x ⊆ y
  out.push_back(Formula::bounded_forall("z", v("x"), Formula::member(v("z"), v("y"))));
  // x is transitive
  out.push_back(Formula::bounded_forall(
      "y", v("x"), Formula::bounded_forall("z", v("y"), Formula::member(v("z"), v("x")))));
  // x has at least two elements
  out.push_back(Formula::bounded_exists(
      "y", v("x"), Formula::bounded_exists("z", v("x"), Formula::negate(Formula::equal(v("y"), v("z"))))));
  return out;
}

// --- filter agreement transfer ----------------------------------------------

namespace {
constexpr std::size_t kMaxFilterPoints = 20;
}

FiniteFilter FiniteFilter::principal(std::size_t points, Subset s) {
  if (points > kMaxFilterPoints) throw CapExceeded("filters are limited to 20 points");
  FiniteFilter f;
  f.points = points;
  const std::uint64_t rest = Subset::all(points).bits & ~s.bits;
  // enumerate submasks of the complement
  for (std::uint64_t sub = rest;; sub = (sub - 1) & rest) {
    f.members.push_back(Subset{s.bits | sub});
    if (sub == 0) break;
  }
  std::sort(f.members.begin(), f.members.end());
  return f;
}

bool FiniteFilter::contains(Subset s) const { return std::find(members.begin(), members.end(), s) != members.end(); }

std::optional<std::string> FiniteFilter::filter_violation() const {
  if (points > kMaxFilterPoints) return "filters are limited to 20 points";
  if (members.empty()) return "family is empty";
  const Subset all = Subset::all(points);
  std::unordered_set<std::uint64_t> set;
  for (Subset s : members) {
    if (!s.subset_of(all)) return "member contains points outside X";
    if (s.empty()) return "contains the empty set (not proper)";
    set.insert(s.bits);
  }
  for (Subset a : members)
    for (Subset b : members)
      if (!set.contains((a & b).bits)) return "not closed under intersection";
  for (Subset s : members) {
    const std::uint64_t rest = all.bits & ~s.bits;
    for (std::uint64_t sub = rest;; sub = (sub - 1) & rest) {
      if (!set.contains(s.bits | sub)) return "not upward closed";
      if (sub == 0) break;
    }
  }
  return std::nullopt;
}

std::string to_string(TransferResult::Status s) {
  using S = TransferResult::Status;
  switch (s) {
    case S::Certified:
      return "certified";
    case S::NotAFilter:
      return "not_a_filter";
    case S::FibreNotPositive:
      return "fibre_not_positive";
    case S::ImageNotFunctional:
      return "image_not_functional";
    case S::NoAgreementOnFilterSet:
      return "no_agreement_on_filter_set";
    case S::ImagesDiffer:
      return "images_differ";
    case S::ConclusionFails:
      return "conclusion_fails";
  }
  return "?";
}

TransferResult agreement_transfer_check(const TransferInstance& in) {
  using S = TransferResult::Status;
  TransferResult res;
  auto fail = [&](S s, std::string detail) {
    res.status = s;
    res.detail = std::move(detail);
    return res;
  };
  if (in.filter.points != in.x_points) return fail(S::NotAFilter, "filter is on a different set");
  if (auto why = in.filter.filter_violation()) return fail(S::NotAFilter, *why);
  if (in.f.size() != in.x_points) throw InputError("f must assign a value to every point of X");
  for (auto y : in.f)
    if (y >= in.y_points) throw InputError("f takes a value outside Y");
  for (const auto* m : {&in.j, &in.k}) {
    if (m->on_x.size() != in.x_points || m->on_y.size() != in.y_points) {
      throw InputError("structure maps must be defined on every point of X and Y");
    }
  }

  std::vector<Subset> fibres(in.y_points);
  for (std::uint32_t x = 0; x < in.x_points; ++x) fibres[in.f[x]].insert(x);
  for (std::uint32_t y = 0; y < in.y_points; ++y) {
    for (Subset s : in.filter.members) {
      if ((fibres[y] & s).empty()) {
        return fail(S::FibreNotPositive, "fibre of y" + std::to_string(y) + " misses an F-member");
      }
    }
  }

  auto graph = [&](const StructureMap& m) {
    std::map<std::int64_t, std::int64_t> g;
    for (std::uint32_t x = 0; x < in.x_points; ++x) {
      auto [it, fresh] = g.emplace(m.on_x[x], m.on_y[in.f[x]]);
      if (!fresh && it->second != m.on_y[in.f[x]]) return std::optional<std::map<std::int64_t, std::int64_t>>{};
    }
    return std::optional{g};
  };
  auto gj = graph(in.j);
  if (!gj) return fail(S::ImageNotFunctional, "j(f) is not the graph of a function");
  auto gk = graph(in.k);
  if (!gk) return fail(S::ImageNotFunctional, "k(f) is not the graph of a function");

  for (std::uint32_t x = 0; x < in.x_points; ++x)
    if (in.j.on_x[x] == in.k.on_x[x]) res.agreement.insert(x);
  // F is upward closed, so j and k agree on an F-member iff the agreement set is one
  if (!in.filter.contains(res.agreement)) {
    return fail(S::NoAgreementOnFilterSet, "j and k agree on no F-member");
  }
  if (*gj != *gk) return fail(S::ImagesDiffer, "j(f) differs from k(f)");

  for (std::uint32_t y = 0; y < in.y_points; ++y) {
    const Subset meet = fibres[y] & res.agreement;
    const std::uint32_t alpha = meet.elements().front();
    res.witnesses.emplace_back(y, alpha);
    // j(y) = j(f)(j(α)) = k(f)(k(α)) = k(y)
    const std::int64_t via_j = gj->at(in.j.on_x[alpha]);
    const std::int64_t via_k = gk->at(in.k.on_x[alpha]);
    if (via_j != in.j.on_y[y] || via_k != in.k.on_y[y] || in.j.on_y[y] != in.k.on_y[y]) {
      return fail(S::ConclusionFails, "j(y" + std::to_string(y) + ") != k(y" + std::to_string(y) + ")");
    }
  }
  return res;
}

}  // namespace tmon
