#include "tmon/powder.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>
#include <thread>

namespace tmon {

Subset i_set(const FinMonoid& m, const MonoidTopology& t, Subset u, Elem p) {
  if (!t.is_open(u)) throw InputError("I-set requested for a set that is not open");
  auto hits = [&](Elem q) {
    Subset s;
    for (Elem r = 0; r < m.size(); ++r)
      if (u.contains(m.mul(r, q))) s.insert(r);
    return s;
  };
  const Subset target = hits(p);
  Subset out;
  for (Elem q = 0; q < m.size(); ++q)
    if (hits(q) == target) out.insert(q);
  return out;
}

namespace {

bool is_basis_of(const MonoidTopology& t, const std::vector<Subset>& basis) {
  for (Subset b : basis)
    if (!t.is_open(b)) return false;
  for (Elem x = 0; x < t.size(); ++x) {
    if (std::find(basis.begin(), basis.end(), t.minimal_open(x)) == basis.end()) return false;
  }
  return true;
}

std::optional<PowderVerdict::ISetNotOpen> first_bad_i_set(const FinMonoid& m, const MonoidTopology& t,
                                                          const std::vector<Subset>& basis) {
  for (Subset u : basis) {
    for (Elem p = 0; p < m.size(); ++p) {
      Subset i = i_set(m, t, u, p);
      if (!t.is_open(i)) return PowderVerdict::ISetNotOpen{u, p, i};
    }
  }
  return std::nullopt;
}

}  // namespace

PowderVerdict is_left_powder(const FinMonoid& m, const MonoidTopology& t) {
  if (t.size() != m.size()) throw InputError("topology is on a different monoid");
  PowderVerdict v;
  if (auto bad = t0_violation(t)) {
    v.witness = PowderVerdict::T0Failure{bad->first, bad->second};
    return v;
  }
  const auto& given = t.basis();
  const bool given_clopen =
      std::all_of(given.begin(), given.end(), [&](Subset u) { return t.is_clopen(u); }) && is_basis_of(t, given);
  if (given_clopen && !first_bad_i_set(m, t, given)) {
    v.holds = true;
    v.basis_used = "given";
    return v;
  }
  // every basis contains the minimal neighbourhoods, so these decide the question
  std::vector<Subset> minimal;
  for (Elem x = 0; x < m.size(); ++x) {
    Subset n = t.minimal_open(x);
    if (std::find(minimal.begin(), minimal.end(), n) == minimal.end()) minimal.push_back(n);
  }
  for (Subset n : minimal) {
    if (!t.is_clopen(n)) {
      v.witness = PowderVerdict::NoClopenBasis{n};
      return v;
    }
  }
  if (auto bad = first_bad_i_set(m, t, minimal)) {
    v.witness = *bad;
    return v;
  }
  v.holds = true;
  v.basis_used = "minimal_opens";
  return v;
}

PowderVerdict is_right_powder(const FinMonoid& m, const MonoidTopology& t) {
  return is_left_powder(m.opposite(), t);
}

bool is_chiral(const FinMonoid& m, const MonoidTopology& t) {
  return is_left_powder(m, t).holds && !is_right_powder(m, t).holds;
}

// --- window monoids ---------------------------------------------------------

WindowMonoid::WindowMonoid(std::size_t w, std::size_t cap) : width(w) {
  if (w == 0) throw InputError("window width must be at least 1");
  if (w > cap || w > 255) {
    throw CapExceeded("window width " + std::to_string(w) + " exceeds cap " + std::to_string(cap));
  }
}

WindowMap WindowMonoid::identity() const {
  WindowMap f(width);
  std::iota(f.begin(), f.end(), std::uint8_t{0});
  return f;
}

WindowMap WindowMonoid::clamped_doubling() const {
  WindowMap f(width);
  for (std::size_t n = 0; n < width; ++n) f[n] = static_cast<std::uint8_t>(std::min(2 * n, width - 1));
  return f;
}

WindowMap WindowMonoid::compose(const WindowMap& a, const WindowMap& b) const {
  WindowMap out(width);
  for (std::size_t n = 0; n < width; ++n) out[n] = a[b[n]];
  return out;
}

bool WindowMonoid::contains(const WindowMap& f) const {
  return f.size() == width && std::all_of(f.begin(), f.end(), [&](std::uint8_t v) { return v < width; });
}

std::uint64_t WindowMonoid::element_count() const {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < width; ++i) n *= width;
  return n;
}

WindowMap WindowMonoid::element(std::uint64_t i) const {
  WindowMap f(width);
  for (std::size_t n = 0; n < width; ++n) {
    f[n] = static_cast<std::uint8_t>(i % width);
    i /= width;
  }
  return f;
}

bool ChiralityCertificate::condition2_holds() const {
  return std::all_of(condition2.begin(), condition2.end(), [](const ProbeWitness& w) { return w.found; });
}

namespace {

// smallest index in [lo, hi) with B∘r = A, or hi
std::uint64_t search_range(const WindowMonoid& mw, const WindowMap& a, const WindowMap& b, std::uint64_t lo,
                           std::uint64_t hi) {
  const std::size_t w = mw.width;
  WindowMap r = mw.element(lo);
  for (std::uint64_t i = lo; i < hi; ++i) {
    bool ok = true;
    for (std::size_t n = 0; n < w && ok; ++n) ok = b[r[n]] == a[n];
    if (ok) return i;
    for (std::size_t n = 0; n < w; ++n) {
      if (++r[n] < w) break;
      r[n] = 0;
    }
  }
  return hi;
}

}  // namespace

ChiralityCertificate chirality_criterion(const WindowMonoid& mw, const WindowMap& a, const WindowMap& b,
                                         const std::vector<Probe>& probes, unsigned threads) {
  if (!mw.contains(a) || !mw.contains(b)) throw InputError("A and B must be maps on the window");
  ChiralityCertificate cert;
  cert.width = mw.width;
  cert.a = a;
  cert.b = b;

  const std::uint64_t total = mw.element_count();
  threads = std::max(1u, threads);
  std::vector<std::uint64_t> found(threads, total);
  {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (total + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t lo = std::min(total, t * chunk);
      const std::uint64_t hi = std::min(total, lo + chunk);
      pool.emplace_back([&, t, lo, hi] {
        const std::uint64_t hit = search_range(mw, a, b, lo, hi);
        found[t] = hit < hi ? hit : total;
      });
    }
  }
  const std::uint64_t first = *std::min_element(found.begin(), found.end());
  cert.candidates_checked = first < total ? first + 1 : total;
  cert.condition1 = first == total;
  if (!cert.condition1) cert.solution = mw.element(first);

  bool image_covers = true;
  for (std::uint8_t v : a) image_covers = image_covers && std::find(b.begin(), b.end(), v) != b.end();
  cert.image_shortcut_agrees = image_covers != cert.condition1;

  for (const auto& p : probes) cert.condition2.push_back(find_probe_witness(mw, a, b, p));
  return cert;
}

ProbeWitness find_probe_witness(const WindowMonoid& mw, const WindowMap& a, const WindowMap& b, const Probe& probe) {
  const std::size_t w = mw.width;
  for (auto v : probe.xs)
    if (v >= w) throw InputError("probe point outside the window");
  for (auto v : probe.vs)
    if (v >= w) throw InputError("probe point outside the window");

  ProbeWitness out;
  out.probe = probe;
  out.q = mw.identity();
  out.r = mw.identity();
  std::vector<bool> in_x(w, false), fresh(w, false);
  for (auto x : probe.xs) {
    out.q[x] = b[x];
    in_x[x] = true;
  }
  for (auto v : probe.vs) {
    const std::uint8_t target = a[v];
    std::optional<std::size_t> t;
    for (std::size_t c = 0; c < w && !t; ++c)
      if (in_x[c] && out.q[c] == target) t = c;
    for (std::size_t c = 0; c < w && !t; ++c)
      if (fresh[c] && out.q[c] == target) t = c;
    for (std::size_t c = w; c-- > 0 && !t;) {
      if (!in_x[c] && !fresh[c]) {
        fresh[c] = true;
        out.q[c] = target;
        t = c;
      }
    }
    if (!t) return out;
    out.r[v] = static_cast<std::uint8_t>(*t);
  }
  out.found = true;
  return out;
}

std::vector<Probe> generate_probes(const WindowMonoid& mw, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t w = mw.width;
  auto draw_distinct = [&](std::size_t k) {
    std::vector<std::uint8_t> pool(w);
    std::iota(pool.begin(), pool.end(), std::uint8_t{0});
    k = std::min(k, w);
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng() % (w - i)]);
    pool.resize(k);
    return pool;
  };
  std::vector<Probe> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Probe p;
    p.xs = draw_distinct(1 + rng() % 3);
    p.vs = draw_distinct(1 + rng() % 2);
    out.push_back(std::move(p));
  }
  return out;
}

std::optional<std::string> verify_certificate(const ChiralityCertificate& cert) {
  const std::size_t w = cert.width;
  auto in_window = [&](const WindowMap& f) {
    if (f.size() != w) return false;
    for (auto v : f)
      if (v >= w) return false;
    return true;
  };
  if (!in_window(cert.a) || !in_window(cert.b)) return "A or B is not a window map";
  // im A ⊆ im B iff some r solves B∘r = A
  std::vector<bool> in_image_b(w, false);
  for (auto v : cert.b) in_image_b[v] = true;
  bool solvable = true;
  for (auto v : cert.a) solvable = solvable && in_image_b[v];
  if (cert.condition1 && solvable) return "condition 1 claimed but im A ⊆ im B";
  if (cert.condition1) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < w; ++i) total *= w;
    if (cert.candidates_checked != total) return "condition 1 claimed without checking every candidate";
  } else {
    if (!cert.solution || !in_window(*cert.solution)) return "condition 1 refuted without a solution";
    for (std::size_t n = 0; n < w; ++n)
      if (cert.b[(*cert.solution)[n]] != cert.a[n]) return "claimed solution r does not satisfy B∘r = A";
  }
  for (std::size_t i = 0; i < cert.condition2.size(); ++i) {
    const auto& pw = cert.condition2[i];
    for (auto x : pw.probe.xs)
      if (x >= w) return "probe " + std::to_string(i) + ": point outside window";
    for (auto v : pw.probe.vs)
      if (v >= w) return "probe " + std::to_string(i) + ": point outside window";
    if (!pw.found) continue;
    if (!in_window(pw.q) || !in_window(pw.r)) return "probe " + std::to_string(i) + ": witness outside window";
    for (auto x : pw.probe.xs)
      if (pw.q[x] != cert.b[x]) return "probe " + std::to_string(i) + ": q(x) != B(x)";
    for (auto v : pw.probe.vs)
      if (pw.q[pw.r[v]] != cert.a[v]) return "probe " + std::to_string(i) + ": q(r(v)) != A(v)";
  }
  return std::nullopt;
}

// --- closed image probe ------------------------------------------------------

namespace {

std::vector<WindowMap> family_elements(WindowFamily family, const WindowMonoid& mw) {
  std::vector<WindowMap> out;
  if (family == WindowFamily::Full) {
    for (std::uint64_t i = 0; i < mw.element_count(); ++i) out.push_back(mw.element(i));
  } else {
    WindowMap p = mw.identity();
    do {
      out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }
  return out;
}

std::uint32_t image_mask(const WindowMap& f) {
  std::uint32_t m = 0;
  for (auto v : f) m |= 1u << v;
  return m;
}

}  // namespace

std::vector<ClosedImageLevel> closed_image_probe(WindowFamily family, const std::vector<std::size_t>& widths,
                                                 std::uint64_t search_cap) {
  constexpr std::size_t kExamples = 4;
  std::vector<ClosedImageLevel> out;
  for (std::size_t w : widths) {
    WindowMonoid mw(w);
    // maximal probes: every smaller probe extends to one of these, and a
    // witness for the larger probe serves the smaller one
    std::vector<Probe> probes;
    for (std::uint32_t xm = 0; xm < (1u << w); ++xm) {
      for (std::uint32_t vm = 0; vm < (1u << w); ++vm) {
        if (static_cast<std::size_t>(std::popcount(xm) + std::popcount(vm)) != w) continue;
        Probe p;
        for (std::size_t i = 0; i < w; ++i) {
          if (xm >> i & 1) p.xs.push_back(static_cast<std::uint8_t>(i));
          if (vm >> i & 1) p.vs.push_back(static_cast<std::uint8_t>(i));
        }
        probes.push_back(std::move(p));
      }
    }
    std::uint64_t msize = family == WindowFamily::Full ? mw.element_count() : 1;
    if (family == WindowFamily::Permutations)
      for (std::size_t i = 2; i <= w; ++i) msize *= i;
    const double work = static_cast<double>(msize) * static_cast<double>(msize) * static_cast<double>(probes.size());
    if (work > static_cast<double>(search_cap)) {
      throw CapExceeded("closed-image probe at width " + std::to_string(w) + " exceeds search cap");
    }
    const auto elems = family_elements(family, mw);

    auto in_image = [&](const WindowMap& q, const WindowMap& s) {
      if (family == WindowFamily::Permutations) return true;  // r = q⁻¹s
      return (image_mask(s) & ~image_mask(q)) == 0;
    };
    auto approximated = [&](const WindowMap& q, const WindowMap& s) {
      for (const auto& p : probes)
        if (!find_probe_witness(mw, s, q, p).found) return false;
      return true;
    };

    ClosedImageLevel level;
    level.width = w;
    level.monoid_size = elems.size();
    for (const auto& q : elems) {
      for (const auto& s : elems) {
        ++level.pairs;
        if (in_image(q, s)) {
          ++level.image_pairs;
        } else if (approximated(q, s)) {
          ++level.accumulation_pairs;
          if (level.examples.size() < kExamples) level.examples.emplace_back(q, s);
        }
      }
    }
    if (family == WindowFamily::Full) {
      const WindowMap b = mw.clamped_doubling();
      const WindowMap a = mw.identity();
      level.designated_is_accumulation = !in_image(b, a) && approximated(b, a);
    }
    out.push_back(std::move(level));
  }
  return out;
}

}  // namespace tmon
