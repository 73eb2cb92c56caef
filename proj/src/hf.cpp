#include "tmon/hf.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <memory>
#include <mutex>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "tmon/error.hpp"

namespace tmon {
namespace {

struct NodeData {
  bool atom = false;
  std::uint32_t atom_index = 0;
  std::uint32_t rank = 0;
  std::int64_t max_atom = -1;
  std::vector<Node> children;
};

struct ChildKeyHash {
  std::size_t operator()(const std::vector<std::uint32_t>& ids) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto id : ids) {
      h ^= id + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Append-only chunked node storage. Interning takes a mutex; reads are
// lock-free because a published NodeData is never mutated or moved.
class NodeStore {
 public:
  static NodeStore& instance() {
    static NodeStore store;
    return store;
  }

  const NodeData& get(std::uint32_t id) const {
    const NodeData* chunk = chunks_[id >> kChunkBits].load(std::memory_order_acquire);
    return chunk[id & kChunkMask];
  }

  Node atom(std::uint32_t index) {
    std::lock_guard lock(mu_);
    if (auto it = atoms_.find(index); it != atoms_.end()) return it->second;
    NodeData d;
    d.atom = true;
    d.atom_index = index;
    d.rank = 0;
    d.max_atom = index;
    Node n = push(std::move(d));
    atoms_.emplace(index, n);
    return n;
  }

  // children must already be canonically sorted and duplicate-free
  Node set(std::vector<Node> children) {
    std::vector<std::uint32_t> key;
    key.reserve(children.size());
    for (Node c : children) key.push_back(c.id());
    std::lock_guard lock(mu_);
    if (auto it = sets_.find(key); it != sets_.end()) return it->second;
    NodeData d;
    d.rank = 1;
    for (Node c : children) {
      const NodeData& cd = get(c.id());
      d.rank = std::max(d.rank, cd.rank + 1);
      d.max_atom = std::max(d.max_atom, cd.max_atom);
    }
    d.children = std::move(children);
    Node n = push(std::move(d));
    sets_.emplace(std::move(key), n);
    return n;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return count_;
  }

 private:
  static constexpr std::uint32_t kChunkBits = 16;
  static constexpr std::uint32_t kChunkSize = 1u << kChunkBits;
  static constexpr std::uint32_t kChunkMask = kChunkSize - 1;
  static constexpr std::size_t kMaxChunks = 1u << 12;

  NodeStore() {
    for (auto& c : chunks_) c.store(nullptr, std::memory_order_relaxed);
  }

  Node push(NodeData d) {
    const std::uint32_t id = static_cast<std::uint32_t>(count_);
    const std::size_t chunk = id >> kChunkBits;
    if (chunk >= kMaxChunks) throw CapExceeded("node interner is full");
    if (!owned_[chunk]) {
      owned_[chunk] = std::make_unique<NodeData[]>(kChunkSize);
      chunks_[chunk].store(owned_[chunk].get(), std::memory_order_release);
    }
    owned_[chunk][id & kChunkMask] = std::move(d);
    ++count_;
    return Node::from_id(id);
  }

  mutable std::mutex mu_;
  std::size_t count_ = 0;
  std::array<std::atomic<NodeData*>, kMaxChunks> chunks_;
  std::array<std::unique_ptr<NodeData[]>, kMaxChunks> owned_;
  std::unordered_map<std::uint32_t, Node> atoms_;
  std::unordered_map<std::vector<std::uint32_t>, Node, ChildKeyHash> sets_;
};

const NodeData& data(Node n) { return NodeStore::instance().get(n.id()); }

std::string default_label(std::size_t i, std::size_t k) {
  if (k <= 26) return std::string(1, static_cast<char>('a' + i));
  return "a" + std::to_string(i);
}

}  // namespace

bool Node::is_atom() const { return data(*this).atom; }
std::uint32_t Node::atom_index() const { return data(*this).atom_index; }
std::span<const Node> Node::children() const { return data(*this).children; }
std::uint32_t Node::rank() const { return data(*this).rank; }
std::int64_t Node::max_atom() const { return data(*this).max_atom; }

bool Node::contains(Node x) const {
  auto kids = children();
  return std::binary_search(kids.begin(), kids.end(), x);
}

std::strong_ordering operator<=>(Node a, Node b) {
  if (a.id_ == b.id_) return std::strong_ordering::equal;
  const NodeData& da = data(a);
  const NodeData& db = data(b);
  if (da.atom != db.atom) return da.atom ? std::strong_ordering::less : std::strong_ordering::greater;
  if (da.atom) return da.atom_index <=> db.atom_index;
  const std::size_t n = std::min(da.children.size(), db.children.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (da.children[i] != db.children[i]) return da.children[i] <=> db.children[i];
  }
  return da.children.size() <=> db.children.size();
}

void AtomTable::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw InputError("duplicate atom label '" + l + "'");
  }
  if (!moduli.empty() && moduli.size() != labels.size()) {
    throw InputError("atom moduli must be absent or given for every atom");
  }
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    if (moduli[i] && *moduli[i] == 0) throw InputError("atom modulus must be >= 1 (atom " + labels[i] + ")");
  }
}

AtomTable AtomTable::anonymous(std::size_t k) {
  AtomTable t;
  for (std::size_t i = 0; i < k; ++i) t.labels.push_back(default_label(i, k));
  return t;
}

AtomTable AtomTable::orbits(std::span<const std::uint64_t> orbit_moduli) {
  AtomTable t;
  for (std::uint64_t n : orbit_moduli) {
    if (n == 0) throw InputError("orbit modulus must be >= 1");
    for (std::uint64_t p = 0; p < n; ++p) {
      t.labels.push_back("x" + std::to_string(n) + "_" + std::to_string(p));
      t.moduli.emplace_back(n);
    }
  }
  t.validate();
  return t;
}

Node make_atom(const AtomTable& table, std::size_t index) {
  if (index >= table.count()) {
    throw InputError("atom index out of range: " + std::to_string(index) + " (table has " +
                     std::to_string(table.count()) + " atoms)");
  }
  return NodeStore::instance().atom(static_cast<std::uint32_t>(index));
}

Node make_set(std::vector<Node> children) {
  std::sort(children.begin(), children.end());
  children.erase(std::unique(children.begin(), children.end()), children.end());
  return NodeStore::instance().set(std::move(children));
}

Node kuratowski_pair(Node a, Node b) { return make_set({make_set({a}), make_set({a, b})}); }

Node von_neumann(std::size_t n) {
  std::vector<Node> elems;
  Node current = empty_set();
  for (std::size_t i = 0; i < n; ++i) {
    elems.push_back(current);
    current = make_set(elems);
  }
  return current;
}

std::vector<Node> transitive_closure(Node x) {
  std::unordered_set<Node> seen{x};
  std::vector<Node> stack{x};
  while (!stack.empty()) {
    Node n = stack.back();
    stack.pop_back();
    for (Node c : n.children()) {
      if (seen.insert(c).second) stack.push_back(c);
    }
  }
  std::vector<Node> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t interned_node_count() { return NodeStore::instance().size(); }

std::string to_string(Node x, const AtomTable* atoms) {
  if (x.is_atom()) {
    if (atoms && x.atom_index() < atoms->count()) return atoms->labels[x.atom_index()];
    return "@" + std::to_string(x.atom_index());
  }
  std::string s = "{";
  bool first = true;
  for (Node c : x.children()) {
    if (!first) s += ", ";
    first = false;
    s += to_string(c, atoms);
  }
  return s + "}";
}

Universe Universe::lazy(AtomTable atoms, std::uint32_t n) {
  atoms.validate();
  return Universe(std::move(atoms), n);
}

Universe Universe::build(AtomTable atoms, std::uint32_t n, std::size_t cap) {
  atoms.validate();
  const std::size_t k = atoms.count();
  // sizes first, so an oversized request fails before any allocation
  std::size_t size = k;
  if (size > cap) throw CapExceeded("|V_0(A)| = " + std::to_string(size) + " exceeds cap");
  for (std::uint32_t i = 1; i <= n; ++i) {
    if (size >= 63 || k + (std::size_t{1} << size) > cap) {
      throw CapExceeded("|V_" + std::to_string(i) + "(A)| exceeds node cap " + std::to_string(cap));
    }
    size = k + (std::size_t{1} << size);
  }

  Universe u(std::move(atoms), n);
  std::vector<Node> atom_nodes;
  for (std::size_t i = 0; i < k; ++i) atom_nodes.push_back(make_atom(u.atoms_, i));
  u.strata_.push_back(atom_nodes);
  for (std::uint32_t i = 1; i <= n; ++i) {
    const auto& prev = u.strata_.back();
    std::vector<Node> next = atom_nodes;
    const std::size_t subsets = std::size_t{1} << prev.size();
    next.reserve(k + subsets);
    std::vector<Node> kids;
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      kids.clear();
      for (std::size_t b = 0; b < prev.size(); ++b) {
        if (mask >> b & 1) kids.push_back(prev[b]);
      }
      next.push_back(make_set(kids));
    }
    std::sort(next.begin(), next.end());
    u.strata_.push_back(std::move(next));
  }
  return u;
}

bool Universe::contains(Node x) const {
  return x.rank() <= rank_bound_ && x.max_atom() < static_cast<std::int64_t>(atoms_.count());
}

const std::vector<Node>& Universe::stratum(std::uint32_t i) const {
  if (strata_.empty()) throw InputError("universe V_" + std::to_string(rank_bound_) + " is not materialized");
  if (i > rank_bound_) throw InputError("stratum " + std::to_string(i) + " beyond rank bound");
  return strata_[i];
}

}  // namespace tmon
