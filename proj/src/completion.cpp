#include "tmon/completion.hpp"

#include <algorithm>
#include <functional>

namespace tmon {

OpenCongruences open_congruences(const FinMonoid& m, const MonoidTopology& t) {
  if (t.size() != m.size()) throw InputError("topology is on a different monoid");
  if (t.r0()) return {*t.r0()};
  LeftCongruence r0 = LeftCongruence::full(m);
  for (const auto& r : enumerate_left_congruences(m))
    if (has_open_classes(t, r.partition())) r0 = r0.meet(r);
  return {r0};
}

namespace {

// calls visit(labels) for every restricted growth string of length n
void for_each_rgs(std::size_t n, const std::function<void(const std::vector<std::uint32_t>&)>& visit) {
  std::vector<std::uint32_t> rgs(n, 0);
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i, std::uint32_t used) {
    if (i == n) {
      visit(rgs);
      return;
    }
    for (std::uint32_t v = 0; v <= used && v < n; ++v) {
      rgs[i] = v;
      rec(i + 1, std::max(used, v + 1));
    }
  };
  rec(0, 0);
}

}  // namespace

std::vector<LeftCongruence> congruences_above(const FinMonoid& m, const LeftCongruence& r0) {
  if (r0.size() != m.size()) throw InputError("congruence is on a different monoid");
  const std::size_t b = r0.block_count();
  if (b > 12) throw CapExceeded("R0 has " + std::to_string(b) + " blocks; enumeration is limited to 12");
  std::vector<LeftCongruence> out;
  for_each_rgs(b, [&](const std::vector<std::uint32_t>& merge) {
    std::vector<std::uint32_t> keys(m.size());
    for (Elem x = 0; x < m.size(); ++x) keys[x] = merge[r0.block(x)];
    Partition p = Partition::from_keys(keys);
    if (!is_left_congruence(m, p)) out.push_back(LeftCongruence::checked(m, p));
  });
  // the all-distinct string comes last in this order; put r0 first
  std::stable_partition(out.begin(), out.end(), [&](const LeftCongruence& r) { return r == r0; });
  return out;
}

std::optional<std::size_t> InverseLimit::find(const Thread& t) const {
  auto it = std::lower_bound(threads.begin(), threads.end(), t);
  if (it == threads.end() || *it != t) return std::nullopt;
  return static_cast<std::size_t>(it - threads.begin());
}

std::optional<std::size_t> InverseLimit::member(const LeftCongruence& r) const {
  for (std::size_t i = 0; i < family.size(); ++i)
    if (family[i] == r) return i;
  return std::nullopt;
}

InverseLimit inverse_limit(const FinMonoid& m, std::vector<LeftCongruence> family) {
  if (family.empty()) throw InputError("inverse limit over an empty family");
  if (m.size() > Subset::kMaxPoints) throw CapExceeded("inverse limit is limited to 64 elements");
  for (const auto& r : family)
    if (r.size() != m.size()) throw InputError("family member on a different monoid");

  InverseLimit l;
  l.monoid = m;
  l.family = std::move(family);
  const std::size_t k = l.family.size();
  std::vector<std::vector<Elem>> rep(k);  // least element of each block
  for (std::size_t i = 0; i < k; ++i)
    for (const auto& cls : l.family[i].classes()) rep[i].push_back(cls.front());

  // coordinates i and j must agree whenever one relation refines the other
  Thread t(k);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == k) {
      l.threads.push_back(t);
      return;
    }
    for (std::uint32_t b = 0; b < l.family[i].block_count(); ++b) {
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        if (l.family[j].refines(l.family[i])) ok = l.family[i].block(rep[j][t[j]]) == b;
        else if (l.family[i].refines(l.family[j])) ok = l.family[j].block(rep[i][b]) == t[j];
      }
      if (!ok) continue;
      t[i] = b;
      rec(i + 1);
    }
  };
  rec(0);
  std::sort(l.threads.begin(), l.threads.end());
  return l;
}

Thread canonical_thread(const InverseLimit& l, Elem m) {
  Thread t(l.family.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = l.family[i].block(m);
  return t;
}

std::optional<std::size_t> canonical_map(const InverseLimit& l, Elem m) { return l.find(canonical_thread(l, m)); }

Thread thread_product(const InverseLimit& l, const Thread& t, const Thread& u) {
  const FinMonoid& m = l.monoid;
  auto rep = [&](std::size_t i, std::uint32_t block) {
    for (Elem x = 0; x < m.size(); ++x)
      if (l.family[i].block(x) == block) return x;
    throw InputError("thread names a block that does not exist");
  };
  Thread out(l.family.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Elem b = rep(i, u[i]);
    auto j = l.member(right_translate(m, l.family[i], b));
    if (!j) throw InputError("family is not closed under right translates");
    const Elem a = rep(*j, t[*j]);
    out[i] = l.family[i].block(m.mul(a, b));
  }
  return out;
}

CompletenessReport is_left_complete(const FinMonoid& m, const MonoidTopology& t) {
  CompletenessReport r;
  const OpenCongruences open = open_congruences(m, t);
  const InverseLimit l = inverse_limit(m, congruences_above(m, open.r0));
  r.limit_size = l.size();
  r.r0_blocks = open.r0.block_count();

  std::vector<std::optional<std::size_t>> image(m.size());
  for (Elem x = 0; x < m.size(); ++x) image[x] = canonical_map(l, x);
  r.injective = true;
  for (Elem x = 0; x < m.size() && r.injective; ++x)
    for (Elem y = x + 1; y < m.size() && r.injective; ++y)
      if (image[x] == image[y]) {
        r.injective = false;
        r.collapsed = std::make_pair(x, y);
      }
  std::vector<bool> hit(l.size(), false);
  for (const auto& i : image)
    if (i) hit[*i] = true;
  r.surjective = true;
  for (std::size_t i = 0; i < hit.size(); ++i)
    if (!hit[i]) {
      r.surjective = false;
      r.missed_thread = i;
      break;
    }

  // without right translates the thread product is undefined
  bool translates = true;
  for (const auto& f : l.family)
    for (Elem b = 0; b < m.size() && translates; ++b) translates = open.is_open(right_translate(m, f, b));
  r.homomorphism = translates;
  for (Elem x = 0; x < m.size() && r.homomorphism; ++x)
    for (Elem y = 0; y < m.size() && r.homomorphism; ++y)
      r.homomorphism = canonical_thread(l, m.mul(x, y)) ==
                       thread_product(l, canonical_thread(l, x), canonical_thread(l, y));

  std::vector<Subset> blocks;
  for (const auto& cls : open.r0.classes()) {
    Subset s;
    for (Elem x : cls) s.insert(x);
    blocks.push_back(s);
  }
  r.topology_match = MonoidTopology::from_basis(m, blocks) == t;

  r.complete = r.injective && r.surjective && r.topology_match && r.homomorphism;
  if (r.complete) {
    r.diagnosis = "complete";
  } else if (!r.injective) {
    r.diagnosis = "not injective: " + m.label(r.collapsed->first) + " and " + m.label(r.collapsed->second) +
                  " map to the same thread";
  } else if (!r.surjective) {
    r.diagnosis = "not surjective: thread " + std::to_string(*r.missed_thread) + " is not constant";
  } else if (!r.topology_match) {
    r.diagnosis = "topology mismatch: τ is not the topology of the R0-blocks";
  } else if (!translates) {
    r.diagnosis = "no thread product: open congruences are not closed under right translates";
  } else {
    r.diagnosis = "canonical map is not a homomorphism";
  }
  return r;
}

}  // namespace tmon
