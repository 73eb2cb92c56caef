#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tmon/io.hpp"
#include "tmon/logic.hpp"

using namespace tmon;
using namespace testsupport;

namespace {

Formula F(const std::string& s) { return io::parse_formula(s); }

Assignment assign(std::initializer_list<std::pair<const std::string, Node>> l) { return Assignment(l); }

}  // namespace

TEST_CASE("evaluation of simple sentences") {
  const Universe u = Universe::build(AtomTable{}, 3);
  const Node e = empty_set(), one = von_neumann(1), two = von_neumann(2);
  CHECK(eval(F("x in y"), u, assign({{"x", e}, {"y", one}})));
  CHECK_FALSE(eval(F("x in y"), u, assign({{"x", one}, {"y", one}})));
  CHECK(eval(F("Exists x . forall y in x . false"), u));  // there is an empty set
  CHECK(eval(F("Forall x . not x in x"), u));
  CHECK_FALSE(eval(F("Forall x . Exists y . x in y"), u));  // no set above the top rank
  CHECK(eval(F("forall z in x . z in y"), u, assign({{"x", one}, {"y", two}})));
  CHECK(eval(F("{} in {{}}"), u));
  CHECK(eval(F("true -> true -> false -> true"), u));
  CHECK_FALSE(eval(F("true -> false"), u));
}

TEST_CASE("evaluation errors") {
  const Universe u = Universe::build(AtomTable{}, 2);
  CHECK_THROWS_AS(eval(F("x in y"), u, assign({{"x", empty_set()}})), InputError);
  CHECK_THROWS_AS(eval(F("x in {}"), u, assign({{"x", von_neumann(3)}})), InputError);
  CHECK_THROWS_AS(eval(F("Exists x . x = x"), Universe::lazy(AtomTable{}, 3)), InputError);
  CHECK(eval(F("forall y in x . y = y"), Universe::lazy(AtomTable{}, 3), assign({{"x", von_neumann(2)}})));
}

TEST_CASE("evaluator agrees with substitution semantics") {
  std::mt19937 rng(2024);
  const Universe u = Universe::build(AtomTable::anonymous(1), 2);
  const auto& dom = u.top();
  const std::vector<std::string> vars{"x", "y", "z"};
  for (int i = 0; i < 400; ++i) {
    const Formula f = random_formula(rng, 1 + rng() % 4, vars);
    Assignment env;
    Formula closed = f;
    for (const auto& v : vars) {
      const Node c = dom[rng() % dom.size()];
      env[v] = c;
      closed = substitute(closed, v, c);
    }
    CHECK_MESSAGE(eval(f, u, env) == naive_eval(closed, dom), io::print_formula(f));
  }
}

TEST_CASE("free variables, depth and renaming") {
  const Formula f = F("forall y in x . exists y in y . y = z");
  CHECK(f.free_variables() == std::vector<std::string>{"x", "z"});
  CHECK(f.depth() == 3);
  CHECK(F("x in y").depth() == 1);
  CHECK(rename_bound(f) == F("forall v0 in x . exists v1 in v0 . v1 = z"));
  CHECK(rename_bound(f).free_variables() == f.free_variables());
}

TEST_CASE("classification") {
  auto name = [](const std::string& s) { return classify(F(s)).name(); };
  CHECK(name("x in y") == "Delta0");
  CHECK(name("forall z in x . exists w in z . w = y") == "Delta0");
  CHECK(name("Exists x . x in y") == "Sigma1");
  CHECK(name("Forall x . x in y") == "Pi1");
  CHECK(name("not Exists x . x in y") == "Pi1");
  CHECK(name("(Exists x . x in y) -> false") == "Pi1");
  CHECK(name("Forall x . Exists y . x in y") == "Pi2");
  CHECK(name("Exists x . Forall y . x in y") == "Sigma2");
  CHECK(name("Exists x . Exists y . x in y") == "Sigma1");
  CHECK(name("forall z in w . Exists x . x in z") == "Pi2");
  const Classification both = classify(F("(Exists x . x = x) and (Forall y . y = y)"));
  CHECK(both.name() == "Sigma2");
  CHECK(both.sigma_level == 2);
  CHECK(both.pi_level == 2);
}

TEST_CASE("classification is invariant under renaming and bounded by quantifier count") {
  std::mt19937 rng(8);
  for (int i = 0; i < 300; ++i) {
    const Formula f = random_formula(rng, 1 + rng() % 5, {"x", "y"});
    const Classification c = classify(f);
    CHECK(classify(rename_bound(f)) == c);
    CHECK(classify(Formula::negate(f)).sigma_level == c.pi_level);
    CHECK(classify(Formula::negate(f)).pi_level == c.sigma_level);
    CHECK(c.level == std::min(c.sigma_level, c.pi_level));
    CHECK(c.level < f.depth() + 1);
  }
}

TEST_CASE("the Hamkins map") {
  const Node e = empty_set();
  CHECK(hamkins_j(e) == make_set({make_set({e})}));
  const Node je = make_set({make_set({e})});
  CHECK(hamkins_j(make_set({e})) == make_set({je, make_set({e, make_set({e})})}));
  // injective, no fixed points, preserves membership, raises rank by exactly 2 at most
  const Universe u = Universe::build(AtomTable{}, 4);
  std::set<Node> images;
  for (Node x : u.top()) {
    const Node jx = hamkins_j(x);
    CHECK(jx != x);
    CHECK(images.insert(jx).second);
    CHECK(jx.rank() <= x.rank() + 2);
    for (Node y : u.top()) CHECK(x.contains(y) == jx.contains(hamkins_j(y)));
  }
}

TEST_CASE("elementarity checks") {
  const Universe dom = Universe::build(AtomTable{}, 3);
  const Universe cod = Universe::lazy(AtomTable{}, 5);
  const auto atomic = check_preserves_reflects(EmbeddingMap::hamkins(), formula_family("atomic"), dom, cod);
  CHECK(atomic.pass);
  CHECK(atomic.instances == 2 * 16);

  const auto d0 = check_preserves_reflects(EmbeddingMap::hamkins(), formula_family("delta0"), dom, cod);
  CHECK_FALSE(d0.pass);
  bool singleton = false;
  for (const auto& f : d0.failures)
    if (f.formula_index == 2 && f.params.at("x") == make_set({empty_set()})) {
      singleton = true;
      CHECK(f.in_domain);
      CHECK_FALSE(f.in_codomain);
    }
  CHECK(singleton);

  const auto id = check_preserves_reflects(EmbeddingMap::identity(), formula_family("delta0"), dom, dom);
  CHECK(id.pass);
  CHECK(id.failure_count == 0);

  ParameterStrategy sampled;
  sampled.kind = ParameterStrategy::Kind::Sampled;
  sampled.samples = 50;
  sampled.seed = 4;
  const auto s1 = check_preserves_reflects(EmbeddingMap::hamkins(), formula_family("delta0"), dom, cod, sampled);
  const auto s2 = check_preserves_reflects(EmbeddingMap::hamkins(), formula_family("delta0"), dom, cod, sampled);
  CHECK(s1.failure_count == s2.failure_count);
  CHECK(s1.instances == s2.instances);

  // images must stay inside the codomain
  CHECK_THROWS_AS(check_preserves_reflects(EmbeddingMap::hamkins(), formula_family("atomic"), dom,
                                           Universe::lazy(AtomTable{}, 3)),
                  InputError);
  CHECK_THROWS_AS(formula_family("sigma7"), InputError);
}

TEST_CASE("finite filters") {
  const FiniteFilter p = FiniteFilter::principal(3, Subset{0b011});
  CHECK(p.members.size() == 2);
  CHECK(p.contains(Subset{0b111}));
  CHECK_FALSE(p.contains(Subset{0b001}));
  CHECK_FALSE(p.filter_violation().has_value());
  FiniteFilter bad = p;
  bad.members.push_back(Subset{0b001});
  CHECK(bad.filter_violation().has_value());  // not closed under supersets of {0}
  CHECK(FiniteFilter::principal(3, Subset{}).filter_violation().has_value());  // improper
}

TEST_CASE("agreement transfer: constructed instances are certified and conclude j = k on Y") {
  std::mt19937 rng(31);
  for (int i = 0; i < 300; ++i) {
    const TransferInstance in = good_transfer_instance(rng);
    REQUIRE(transfer_hypotheses_hold(in));
    const TransferResult r = agreement_transfer_check(in);
    CHECK(r.certified());
    CHECK(in.j.on_y == in.k.on_y);
    CHECK(r.witnesses.size() == in.y_points);
    for (auto [y, alpha] : r.witnesses) {
      CHECK(in.f[alpha] == y);
      CHECK(r.agreement.contains(alpha));
    }
  }
}

TEST_CASE("agreement transfer: mutated instances match the independent hypothesis check") {
  std::mt19937 rng(32);
  for (int i = 0; i < 600; ++i) {
    TransferInstance in = good_transfer_instance(rng);
    switch (rng() % 4) {
      case 0: in.k.on_y[rng() % in.y_points] += 1 + rng() % 3; break;
      case 1: in.k.on_x[rng() % in.x_points] = 100 + rng() % in.x_points; break;
      case 2: in.f[rng() % in.x_points] = rng() % in.y_points; break;
      default: in.filter = FiniteFilter::principal(in.x_points, Subset{rng() & Subset::all(in.x_points).bits}); break;
    }
    const TransferResult r = agreement_transfer_check(in);
    CHECK(r.status != TransferResult::Status::ConclusionFails);
    CHECK(r.certified() == transfer_hypotheses_hold(in));
    if (r.certified()) CHECK(in.j.on_y == in.k.on_y);
  }
}

TEST_CASE("agreement transfer input errors") {
  std::mt19937 rng(1);
  TransferInstance in = good_transfer_instance(rng);
  in.f.pop_back();
  CHECK_THROWS_AS(agreement_transfer_check(in), InputError);
  in = good_transfer_instance(rng);
  in.k.on_y.push_back(0);
  CHECK_THROWS_AS(agreement_transfer_check(in), InputError);
}
