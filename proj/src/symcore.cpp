#include "tmon/symcore.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace tmon {

OpennessOracle finite_oracle(ExtendedAction act, MonoidTopology t) {
  if (t.size() != act.monoid().size()) throw InputError("topology is on a different monoid");
  return [act = std::move(act), t = std::move(t)](Node x) {
    return has_open_classes(t, act.stabiliser(x).partition());
  };
}

OpennessOracle z_oracle(AtomTable atoms) {
  auto layout = std::make_shared<ZOrbitLayout>(atoms);
  return [layout](Node x) { return z_stabiliser(*layout, x) >= 1; };
}

bool CoreReport::contains(Node x) const { return std::binary_search(members.begin(), members.end(), x); }

bool CoreReport::is_transitive() const {
  for (Node m : members)
    for (Node c : m.children())
      if (!contains(c)) return false;
  return true;
}

namespace {

class CoreScan {
 public:
  explicit CoreScan(const OpennessOracle& open) : open_(open) {}

  std::optional<Node> bad(Node x) {
    if (auto it = memo_.find(x); it != memo_.end()) return it->second;
    std::optional<Node> best;
    if (!open_(x)) best = x;
    for (Node c : x.children()) {
      auto b = bad(c);
      if (b && (!best || *b < *best)) best = b;
    }
    memo_.emplace(x, best);
    return best;
  }

 private:
  const OpennessOracle& open_;
  std::unordered_map<Node, std::optional<Node>> memo_;
};

}  // namespace

std::optional<Node> core_witness(const OpennessOracle& open, Node x) { return CoreScan(open).bad(x); }

CoreReport symmetric_core(const OpennessOracle& open, const Universe& u) {
  CoreScan scan(open);
  CoreReport r;
  for (Node x : u.top()) {
    if (auto w = scan.bad(x)) {
      r.excluded.push_back({x, *w});
    } else {
      r.members.push_back(x);
    }
  }
  return r;
}

// --- integer action ----------------------------------------------------------

ZOrbitLayout::ZOrbitLayout(const AtomTable& atoms) : atoms_(atoms) {
  atoms_.validate();
  const std::size_t k = atoms_.count();
  modulus_.resize(k);
  start_.resize(k);
  std::size_t i = 0;
  while (i < k) {
    auto n = atoms_.modulus(i);
    if (!n) throw InputError("atom " + atoms_.labels[i] + " has no orbit modulus");
    if (*n > k - i) throw InputError("orbit starting at atom " + atoms_.labels[i] + " runs past the atom table");
    for (std::size_t j = i; j < i + *n; ++j) {
      if (atoms_.modulus(j) != n) {
        throw InputError("atom " + atoms_.labels[j] + " breaks the orbit block of modulus " + std::to_string(*n));
      }
      modulus_[j] = *n;
      start_[j] = i;
    }
    i += *n;
  }
}

std::size_t ZOrbitLayout::shift(std::size_t atom, std::uint64_t g) const {
  const std::uint64_t n = modulus_[atom];
  const std::size_t s = start_[atom];
  return s + static_cast<std::size_t>((atom - s + g % n) % n);
}

Node ZOrbitLayout::apply(std::uint64_t g, Node x) const {
  std::unordered_map<Node, Node> memo;
  auto go = [&](auto& self, Node y) -> Node {
    if (y.is_atom()) {
      if (y.atom_index() >= modulus_.size()) throw InputError("atom outside the orbit table");
      return make_atom(atoms_, shift(y.atom_index(), g));
    }
    if (auto it = memo.find(y); it != memo.end()) return it->second;
    std::vector<Node> kids;
    kids.reserve(y.size());
    for (Node c : y.children()) kids.push_back(self(self, c));
    Node out = make_set(std::move(kids));
    memo.emplace(y, out);
    return out;
  };
  return go(go, x);
}

std::uint64_t ZOrbitLayout::lcm_in(Node x) const {
  std::uint64_t l = 1;
  for (Node y : transitive_closure(x)) {
    if (!y.is_atom()) continue;
    if (y.atom_index() >= modulus_.size()) throw InputError("atom outside the orbit table");
    l = std::lcm(l, modulus_[y.atom_index()]);
  }
  return l;
}

namespace {

std::vector<std::uint64_t> sorted_divisors(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, unsigned>> factors;
  std::uint64_t m = n;
  for (std::uint64_t p = 2; p * p <= m; ++p) {
    unsigned e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    if (e) factors.emplace_back(p, e);
  }
  if (m > 1) factors.emplace_back(m, 1);
  std::vector<std::uint64_t> divs{1};
  for (auto [p, e] : factors) {
    const std::size_t base = divs.size();
    std::uint64_t pk = 1;
    for (unsigned i = 0; i < e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < base; ++j) divs.push_back(divs[j] * pk);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

}  // namespace

std::uint64_t z_stabiliser(const ZOrbitLayout& layout, Node x) {
  // the action on trcl{x} factors through ℤ/Lℤ, so d divides L
  for (std::uint64_t d : sorted_divisors(layout.lcm_in(x)))
    if (layout.apply(d, x) == x) return d;
  return 0;
}

AtomTable levy_atoms(std::size_t k_max) {
  if (k_max == 0) throw InputError("levy probe needs k ≥ 1");
  if (k_max > kLevyMaxK) {
    throw CapExceeded("levy probe k = " + std::to_string(k_max) + " exceeds cap " + std::to_string(kLevyMaxK));
  }
  std::vector<std::uint64_t> moduli(k_max);
  std::iota(moduli.begin(), moduli.end(), std::uint64_t{1});
  return AtomTable::orbits(moduli);
}

Node levy_segment(const AtomTable& atoms, std::size_t k) {
  std::vector<Node> pairs;
  std::size_t start = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (start >= atoms.count()) throw InputError("segment longer than the orbit table");
    pairs.push_back(kuratowski_pair(von_neumann(i), make_atom(atoms, start)));
    start += i + 1;  // orbit i+1 has i+1 atoms
  }
  return make_set(std::move(pairs));
}

LevyReport levy_sequence_probe(std::size_t k_max) {
  const AtomTable atoms = levy_atoms(k_max);
  const ZOrbitLayout layout(atoms);
  const OpennessOracle open = z_oracle(atoms);
  LevyReport r;
  r.all_in_core = true;
  for (std::size_t k = 1; k <= k_max; ++k) {
    LevySegment s;
    s.k = k;
    s.code = levy_segment(atoms, k);
    s.stabiliser = z_stabiliser(layout, s.code);
    s.in_core = !core_witness(open, s.code).has_value();
    r.all_in_core = r.all_in_core && s.in_core;
    if (r.increasing_moduli.empty() || s.stabiliser > r.increasing_moduli.back()) {
      r.increasing_moduli.push_back(s.stabiliser);
    }
    r.segments.push_back(s);
  }
  r.moduli_grow = r.increasing_moduli.size() >= 2;
  return r;
}

// --- Gödel operations -------------------------------------------------------

Node union_of(Node a) {
  std::vector<Node> out;
  for (Node c : a.children())
    for (Node d : c.children()) out.push_back(d);
  return make_set(std::move(out));
}

Node pair_of(Node a, Node b) { return make_set({a, b}); }

Node difference(Node a, Node b) {
  std::vector<Node> out;
  for (Node c : a.children())
    if (!b.contains(c)) out.push_back(c);
  return make_set(std::move(out));
}

Node product(Node a, Node b) {
  std::vector<Node> out;
  for (Node u : a.children())
    for (Node v : b.children()) out.push_back(kuratowski_pair(u, v));
  return make_set(std::move(out));
}

std::string to_string(GodelReport::Op op) {
  switch (op) {
    case GodelReport::Op::Union: return "union";
    case GodelReport::Op::Pair: return "pair";
    case GodelReport::Op::Difference: return "difference";
    case GodelReport::Op::Product: return "product";
  }
  return "?";
}

GodelReport godel_closure_check(const ExtendedAction& act, const Universe& u,
                                const std::optional<OpennessOracle>& open) {
  using Op = GodelReport::Op;
  const auto& top = u.top();
  std::unordered_map<Node, LeftCongruence> stab;
  auto st = [&](Node x) -> const LeftCongruence& {
    auto it = stab.find(x);
    if (it == stab.end()) it = stab.emplace(x, act.stabiliser(x)).first;
    return it->second;
  };
  std::unordered_map<Node, bool> in_core;
  auto core = [&](Node x) {
    auto it = in_core.find(x);
    if (it == in_core.end()) it = in_core.emplace(x, !core_witness(*open, x).has_value()).first;
    return it->second;
  };

  GodelReport r;
  auto closure = [&](Op op, Node a, Node b, Node c, bool inputs_in_core) {
    if (!open || !inputs_in_core) return;
    if (!u.contains(c)) {
      ++r.rank_overflow_skips;
      return;
    }
    ++r.closure_checked;
    if (!core(c)) r.closure_failures.push_back({op, a, b});
  };

  for (Node a : top) {
    ++r.unary_checked;
    const Node c = union_of(a);
    if (!st(a).refines(st(c))) r.failures.push_back({Op::Union, a, a});
    closure(Op::Union, a, a, c, open && core(a));
  }
  for (Node a : top) {
    for (Node b : top) {
      ++r.binary_checked;
      const LeftCongruence both = st(a).meet(st(b));
      const bool cores = open && core(a) && core(b);
      const std::pair<Op, Node> results[] = {
          {Op::Pair, pair_of(a, b)}, {Op::Difference, difference(a, b)}, {Op::Product, product(a, b)}};
      for (auto [op, c] : results) {
        if (!both.refines(st(c))) r.failures.push_back({op, a, b});
        closure(op, a, b, c, cores);
      }
    }
  }
  return r;
}

}  // namespace tmon
