#include <random>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "tmon/catalog.hpp"
#include "tmon/powder.hpp"

using namespace tmon;
using namespace testsupport;

namespace {

std::vector<Subset> all_opens(const MonoidTopology& t) {
  std::vector<Subset> out;
  for (std::uint64_t b = 0; b <= t.everything().bits; ++b)
    if (t.is_open(Subset{b})) out.push_back(Subset{b});
  return out;
}

// Searches every family of clopen sets for a basis whose I-sets are all open.
bool brute_left_powder(const FinMonoid& m, const MonoidTopology& t) {
  const std::size_t n = m.size();
  for (Elem x = 0; x < n; ++x)
    for (Elem y = x + 1; y < n; ++y) {
      bool separated = false;
      for (Subset u : all_opens(t)) separated = separated || (u.contains(x) != u.contains(y));
      if (!separated) return false;
    }
  std::vector<Subset> clopen;
  for (Subset u : all_opens(t))
    if (t.is_clopen(u)) clopen.push_back(u);
  auto iset = [&](Subset u, Elem p) {
    Subset out;
    for (Elem q = 0; q < n; ++q) {
      bool same = true;
      for (Elem r = 0; r < n; ++r) same = same && (u.contains(m.mul(r, q)) == u.contains(m.mul(r, p)));
      if (same) out.insert(q);
    }
    return out;
  };
  for (std::uint64_t fam = 0; fam < (std::uint64_t{1} << clopen.size()); ++fam) {
    std::vector<Subset> b;
    for (std::size_t i = 0; i < clopen.size(); ++i)
      if ((fam >> i) & 1) b.push_back(clopen[i]);
    // a basis: every open set is a union of members
    bool basis = true;
    for (Subset u : all_opens(t)) {
      Subset cover;
      for (Subset v : b)
        if (v.subset_of(u)) cover = cover | v;
      basis = basis && cover == u;
    }
    if (!basis) continue;
    bool ok = true;
    for (Subset u : b)
      for (Elem p = 0; p < n; ++p) ok = ok && t.is_open(iset(u, p));
    if (ok) return true;
  }
  return false;
}

std::vector<FinMonoid> shipped_monoids() {
  std::vector<FinMonoid> out;
  for (const auto& name : catalog_names()) out.push_back(catalog_monoid(name));
  return out;
}

}  // namespace

TEST_CASE("discrete topologies are powder on both sides") {
  auto monoids = shipped_monoids();
  for (const auto& m : random_monoids(4, 20, 12)) monoids.push_back(m);
  for (const auto& m : monoids) {
    const MonoidTopology d = MonoidTopology::discrete(m);
    CHECK(is_left_powder(m, d).holds);
    CHECK(is_right_powder(m, d).holds);
    CHECK_FALSE(is_chiral(m, d));
  }
}

TEST_CASE("M2 examples") {
  const FinMonoid m2 = catalog_monoid("m2");
  const PowderVerdict ind = is_left_powder(m2, MonoidTopology::indiscrete(m2));
  CHECK_FALSE(ind.holds);
  CHECK(std::holds_alternative<PowderVerdict::T0Failure>(ind.witness));
  CHECK_FALSE(is_right_powder(m2, MonoidTopology::indiscrete(m2)).holds);
  const MonoidTopology full = MonoidTopology::from_filter(m2, filter_close(m2, {LeftCongruence::full(m2)}));
  const PowderVerdict f = is_left_powder(m2, full);
  CHECK_FALSE(f.holds);
  CHECK(std::holds_alternative<PowderVerdict::T0Failure>(f.witness));
}

TEST_CASE("i_set follows its definition and contains its base point") {
  std::vector<std::pair<FinMonoid, MonoidTopology>> cases;
  for (const auto& m : shipped_monoids())
    for (const auto& nt : catalog_topologies(m)) cases.emplace_back(m, nt.topology);
  for (const auto& [m, t] : cases) {
    for (Subset u : all_opens(t)) {
      for (Elem p = 0; p < m.size(); ++p) {
        const Subset i = i_set(m, t, u, p);
        CHECK(i.contains(p));
        for (Elem q = 0; q < m.size(); ++q) {
          bool same = true;
          for (Elem r = 0; r < m.size(); ++r) same = same && (u.contains(m.mul(r, q)) == u.contains(m.mul(r, p)));
          CHECK(i.contains(q) == same);
        }
      }
    }
  }
  const FinMonoid m2 = catalog_monoid("m2");
  CHECK_THROWS_AS(i_set(m2, MonoidTopology::indiscrete(m2), Subset{1}, 0), InputError);
}

TEST_CASE("left powder agrees with an exhaustive search over clopen bases") {
  std::mt19937 rng(12);
  std::size_t holds = 0, total = 0;
  for (const auto& m : random_monoids(6, 60, 5)) {
    for (int k = 0; k < 6; ++k) {
      std::vector<Subset> basis;
      const int sets = 1 + static_cast<int>(rng() % 4);
      for (int s = 0; s < sets; ++s) basis.push_back(Subset{rng() & Subset::all(m.size()).bits});
      const MonoidTopology t = MonoidTopology::from_basis(m, basis);
      const PowderVerdict v = is_left_powder(m, t);
      CHECK(v.holds == brute_left_powder(m, t));
      CHECK(is_right_powder(m, t).holds == brute_left_powder(m.opposite(), t));
      if (auto* w = std::get_if<PowderVerdict::ISetNotOpen>(&v.witness)) {
        CHECK_FALSE(t.is_open(w->i_set));
        CHECK(i_set(m, t, w->u, w->p) == w->i_set);
      }
      if (auto* w = std::get_if<PowderVerdict::NoClopenBasis>(&v.witness)) CHECK_FALSE(t.is_clopen(w->neighbourhood));
      holds += v.holds;
      ++total;
    }
  }
  CHECK(holds > 0);
  CHECK(holds < total);
}

TEST_CASE("commutative monoids have matching left and right verdicts") {
  std::mt19937 rng(19);
  std::vector<FinMonoid> comm;
  for (const auto& m : shipped_monoids())
    if (m.is_commutative()) comm.push_back(m);
  for (const auto& m : random_monoids(40, 80, 8))
    if (m.is_commutative()) comm.push_back(m);
  REQUIRE(comm.size() > 5);
  for (const auto& m : comm) {
    std::vector<MonoidTopology> ts;
    for (const auto& nt : catalog_topologies(m)) ts.push_back(nt.topology);
    for (int k = 0; k < 10; ++k)
      ts.push_back(MonoidTopology::from_basis(m, {Subset{rng() & Subset::all(m.size()).bits},
                                                  Subset{rng() & Subset::all(m.size()).bits}}));
    for (const auto& t : ts) CHECK(is_left_powder(m, t).holds == is_right_powder(m, t).holds);
  }
}

TEST_CASE("no small monoid is chiral under a filter topology") {
  for (const auto& [name, m] : small_monoids())
    for (const auto& nt : catalog_topologies(m)) CHECK_FALSE_MESSAGE(is_chiral(m, nt.topology), name << " " << nt.name);
}

TEST_CASE("window monoid basics") {
  const WindowMonoid mw(6);
  CHECK(mw.element_count() == 46656);
  CHECK(mw.clamped_doubling() == WindowMap{0, 2, 4, 5, 5, 5});
  CHECK(mw.element(0) == WindowMap{0, 0, 0, 0, 0, 0});
  CHECK(mw.element(1) == WindowMap{1, 0, 0, 0, 0, 0});
  CHECK(mw.element(6) == WindowMap{0, 1, 0, 0, 0, 0});
  const WindowMap d = mw.clamped_doubling();
  CHECK(mw.compose(d, mw.identity()) == d);
  CHECK(mw.compose(d, d) == WindowMap{0, 4, 5, 5, 5, 5});
  CHECK_FALSE(mw.contains(WindowMap{0, 6, 0, 0, 0, 0}));
  CHECK_THROWS_AS(WindowMonoid(9), CapExceeded);
  CHECK_NOTHROW(WindowMonoid(9, 9));
}

TEST_CASE("chirality criterion at width 6") {
  const WindowMonoid mw(6);
  const WindowMap a = mw.identity(), b = mw.clamped_doubling();
  const auto probes = generate_probes(mw, 24, 7);
  const ChiralityCertificate cert = chirality_criterion(mw, a, b, probes);
  CHECK(cert.condition1);
  CHECK(cert.candidates_checked == 46656);
  CHECK_FALSE(cert.solution.has_value());
  CHECK(cert.image_shortcut_agrees);
  CHECK(cert.condition2_holds());
  CHECK(cert.satisfied());
  CHECK(cert.condition2.size() == 24);
  CHECK_FALSE(verify_certificate(cert).has_value());

  // independent re-check of every witness
  for (const auto& w : cert.condition2) {
    REQUIRE(w.found);
    for (auto x : w.probe.xs) CHECK(w.q[x] == b[x]);
    for (auto v : w.probe.vs) CHECK(w.q[w.r[v]] == a[v]);
  }
}

TEST_CASE("probe witness example") {
  const WindowMonoid mw(6);
  const ProbeWitness w = find_probe_witness(mw, mw.identity(), mw.clamped_doubling(), Probe{{0, 1, 2}, {3}});
  REQUIRE(w.found);
  CHECK(w.q[0] == 0);
  CHECK(w.q[1] == 2);
  CHECK(w.q[2] == 4);
  CHECK(w.q[5] == 3);
  CHECK(w.r[3] == 5);
}

TEST_CASE("probe witnesses exist exactly when the probe constraints are consistent") {
  // brute force over all q, r at width 3
  const WindowMonoid mw(3);
  std::mt19937 rng(4);
  for (int i = 0; i < 200; ++i) {
    const WindowMap a = mw.element(rng() % mw.element_count());
    const WindowMap b = mw.element(rng() % mw.element_count());
    const Probe p = generate_probes(mw, 1, rng())[0];
    bool exists = false;
    for (std::uint64_t qi = 0; qi < mw.element_count() && !exists; ++qi) {
      const WindowMap q = mw.element(qi);
      bool agree = true;
      for (auto x : p.xs) agree = agree && q[x] == b[x];
      if (!agree) continue;
      for (std::uint64_t ri = 0; ri < mw.element_count() && !exists; ++ri) {
        const WindowMap r = mw.element(ri);
        bool ok = true;
        for (auto v : p.vs) ok = ok && q[r[v]] == a[v];
        exists = ok;
      }
    }
    const ProbeWitness w = find_probe_witness(mw, a, b, p);
    CHECK(w.found == exists);
    if (w.found) {
      for (auto x : p.xs) CHECK(w.q[x] == b[x]);
      for (auto v : p.vs) CHECK(w.q[w.r[v]] == a[v]);
    }
  }
}

TEST_CASE("condition 1 matches the image argument at every small width") {
  std::mt19937 rng(9);
  for (std::size_t w = 1; w <= 4; ++w) {
    const WindowMonoid mw(w);
    for (int i = 0; i < 20; ++i) {
      const WindowMap a = mw.element(rng() % mw.element_count());
      const WindowMap b = mw.element(rng() % mw.element_count());
      const ChiralityCertificate c = chirality_criterion(mw, a, b, {});
      std::set<int> ia(a.begin(), a.end()), ib(b.begin(), b.end());
      const bool solvable = std::includes(ib.begin(), ib.end(), ia.begin(), ia.end());
      CHECK(c.condition1 == !solvable);
      CHECK(c.image_shortcut_agrees);
      if (c.solution) CHECK(mw.compose(b, *c.solution) == a);
    }
  }
  const WindowMonoid mw(4);
  const ChiralityCertificate same = chirality_criterion(mw, mw.clamped_doubling(), mw.clamped_doubling(), {});
  CHECK_FALSE(same.condition1);
  REQUIRE(same.solution.has_value());
}

TEST_CASE("condition 1 does not depend on the thread split") {
  const WindowMonoid mw(5);
  const auto probes = generate_probes(mw, 10, 3);
  for (const auto& [a, b] : {std::pair{mw.identity(), mw.clamped_doubling()},
                             std::pair{mw.clamped_doubling(), mw.compose(mw.clamped_doubling(), mw.clamped_doubling())},
                             std::pair{WindowMap{0, 0, 1, 1, 2}, WindowMap{1, 0, 2, 2, 2}}}) {
    const ChiralityCertificate one = chirality_criterion(mw, a, b, probes, 1);
    for (unsigned th : {2u, 3u, 7u}) {
      const ChiralityCertificate many = chirality_criterion(mw, a, b, probes, th);
      CHECK(many.condition1 == one.condition1);
      CHECK(many.solution == one.solution);
      CHECK(many.candidates_checked == one.candidates_checked);
      CHECK(many.condition2.size() == one.condition2.size());
    }
  }
}

TEST_CASE("tampered certificates are rejected") {
  const WindowMonoid mw(6);
  const ChiralityCertificate cert =
      chirality_criterion(mw, mw.identity(), mw.clamped_doubling(), generate_probes(mw, 20, 1));
  REQUIRE_FALSE(verify_certificate(cert).has_value());

  ChiralityCertificate t = cert;
  t.condition2[0].q[t.condition2[0].probe.xs[0]] ^= 1;
  CHECK(verify_certificate(t).has_value());

  t = cert;
  t.condition2[3].r[t.condition2[3].probe.vs[0]] = (t.condition2[3].r[t.condition2[3].probe.vs[0]] + 1) % 6;
  CHECK(verify_certificate(t).has_value());

  t = cert;
  t.b = mw.identity();  // now B∘r = A is solvable
  CHECK(verify_certificate(t).has_value());

  t = cert;
  t.condition2[1].probe.xs.push_back(9);
  CHECK(verify_certificate(t).has_value());
}

TEST_CASE("generated probes are deterministic and in range") {
  const WindowMonoid mw(6);
  const auto p1 = generate_probes(mw, 30, 11), p2 = generate_probes(mw, 30, 11);
  CHECK(p1 == p2);
  CHECK(p1 != generate_probes(mw, 30, 12));
  for (const auto& p : p1) {
    CHECK(p.xs.size() >= 1);
    CHECK(p.xs.size() <= 3);
    CHECK(p.vs.size() >= 1);
    CHECK(p.vs.size() <= 2);
    CHECK(std::set<int>(p.xs.begin(), p.xs.end()).size() == p.xs.size());
    CHECK(std::set<int>(p.vs.begin(), p.vs.end()).size() == p.vs.size());
    for (auto x : p.xs) CHECK(x < 6);
    for (auto v : p.vs) CHECK(v < 6);
  }
}

TEST_CASE("closed image probe") {
  const auto full = closed_image_probe(WindowFamily::Full, {1, 2, 3, 4});
  REQUIRE(full.size() == 4);
  CHECK(full[0].closed());
  CHECK(full[0].designated_is_accumulation == false);
  CHECK(full[1].designated_is_accumulation == false);  // doubling is the identity at width 2
  CHECK(full[2].designated_is_accumulation == true);
  CHECK(full[3].designated_is_accumulation == true);
  CHECK_FALSE(full[3].closed());
  for (const auto& level : full) {
    CHECK(level.pairs == level.monoid_size * level.monoid_size);
    for (const auto& [q, s] : level.examples) {
      // not in the image: no r with q∘r = s
      std::set<int> iq(q.begin(), q.end()), is(s.begin(), s.end());
      CHECK_FALSE(std::includes(iq.begin(), iq.end(), is.begin(), is.end()));
    }
  }
  // image size by the image criterion
  for (const auto& level : full) {
    const WindowMonoid mw(level.width);
    std::uint64_t in_image = 0;
    for (std::uint64_t i = 0; i < mw.element_count(); ++i)
      for (std::uint64_t j = 0; j < mw.element_count(); ++j) {
        const WindowMap q = mw.element(i), s = mw.element(j);
        std::set<int> iq(q.begin(), q.end()), is(s.begin(), s.end());
        in_image += std::includes(iq.begin(), iq.end(), is.begin(), is.end());
      }
    CHECK(level.image_pairs == in_image);
  }
  for (const auto& level : closed_image_probe(WindowFamily::Permutations, {1, 2, 3, 4})) {
    CHECK(level.closed());
    CHECK(level.image_pairs == level.pairs);
  }
  CHECK_THROWS_AS(closed_image_probe(WindowFamily::Full, {5}, 1000), CapExceeded);
}
