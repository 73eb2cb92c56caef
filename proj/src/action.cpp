#include "tmon/action.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

namespace tmon {

ActionTable ActionTable::make(FinMonoid monoid, std::vector<std::string> carrier,
                              std::vector<std::vector<Point>> table) {
  const std::size_t m = monoid.size();
  const std::size_t n = carrier.size();
  if (table.size() != m) throw InputError("action table needs one row per monoid element");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (carrier[i] == carrier[j]) throw InputError("duplicate carrier label " + carrier[i]);
  ActionTable a;
  a.table_.reserve(m * n);
  for (std::size_t e = 0; e < m; ++e) {
    if (table[e].size() != n) {
      throw InputError("action row for " + monoid.label(static_cast<Elem>(e)) + " has wrong length");
    }
    for (Point x : table[e]) {
      if (x >= n) throw InputError("action image out of range in row " + monoid.label(static_cast<Elem>(e)));
      a.table_.push_back(x);
    }
  }
  a.monoid_ = std::move(monoid);
  a.carrier_ = std::move(carrier);
  const FinMonoid& mon = a.monoid_;
  for (Point x = 0; x < n; ++x) {
    if (a.act(mon.identity(), x) != x) {
      throw InputError("identity does not fix point " + a.carrier_[x]);
    }
  }
  for (Elem p = 0; p < m; ++p)
    for (Elem q = 0; q < m; ++q)
      for (Point x = 0; x < n; ++x)
        if (a.act(mon.mul(p, q), x) != a.act(p, a.act(q, x))) {
          throw InputError("action law (mn)x = m(nx) fails at m=" + mon.label(p) + ", n=" + mon.label(q) +
                           ", x=" + a.carrier_[x]);
        }
  return a;
}

std::optional<Point> ActionTable::find(const std::string& label) const {
  auto it = std::find(carrier_.begin(), carrier_.end(), label);
  if (it == carrier_.end()) return std::nullopt;
  return static_cast<Point>(it - carrier_.begin());
}

std::vector<std::vector<Point>> ActionTable::table() const {
  std::vector<std::vector<Point>> t(monoid_.size(), std::vector<Point>(carrier_.size()));
  for (Elem m = 0; m < monoid_.size(); ++m)
    for (Point x = 0; x < carrier_.size(); ++x) t[m][x] = act(m, x);
  return t;
}

std::vector<Point> ActionTable::orbit(Point x) const {
  std::vector<Point> out;
  for (Elem m = 0; m < monoid_.size(); ++m) out.push_back(act(m, x));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

StabRel stab_rel(const ActionTable& act, Point x) {
  if (x >= act.carrier_size()) throw InputError("point out of range");
  std::vector<Point> images(act.monoid().size());
  for (Elem m = 0; m < images.size(); ++m) images[m] = act.act(m, x);
  return StabRel{x, LeftCongruence::checked(act.monoid(), Partition::from_keys(images))};
}

std::optional<ContinuityFailure> continuity_check(const ActionTable& act, const MonoidTopology& t) {
  if (t.size() != act.monoid().size()) throw InputError("topology is on a different monoid");
  for (Point x = 0; x < act.carrier_size(); ++x) {
    const Partition r = stab_rel(act, x).relation.partition();
    for (const auto& cls : r.classes()) {
      Subset s;
      for (Elem e : cls) s.insert(e);
      if (!t.is_open(s)) return ContinuityFailure{x, s};
    }
  }
  return std::nullopt;
}

ActionTable principal_mset(const FinMonoid& m, const LeftCongruence& r) {
  if (r.size() != m.size()) throw InputError("congruence is on a different monoid");
  const auto classes = r.classes();
  std::vector<std::string> carrier;
  for (const auto& cls : classes) carrier.push_back("[" + m.label(cls.front()) + "]");
  std::vector<std::vector<Point>> table(m.size(), std::vector<Point>(classes.size()));
  for (Elem a = 0; a < m.size(); ++a)
    for (Point b = 0; b < classes.size(); ++b) table[a][b] = r.block(m.mul(a, classes[b].front()));
  return ActionTable::make(m, std::move(carrier), std::move(table));
}

// --- recursive extension -----------------------------------------------------

struct ExtendedAction::Memo {
  std::mutex mu;
  std::vector<std::unordered_map<Node, Node>> images;
};

ExtendedAction::ExtendedAction(ActionTable atom_action, AtomTable atoms)
    : atom_action_(std::move(atom_action)), atoms_(std::move(atoms)), memo_(std::make_shared<Memo>()) {
  atoms_.validate();
  if (atom_action_.carrier_size() != atoms_.count()) {
    throw InputError("action carrier has " + std::to_string(atom_action_.carrier_size()) +
                     " points but the atom table has " + std::to_string(atoms_.count()));
  }
  memo_->images.resize(monoid().size());
}

Node ExtendedAction::apply(Elem m, Node x) const {
  if (m >= monoid().size()) throw InputError("monoid element out of range");
  if (x.is_atom()) {
    if (x.atom_index() >= atoms_.count()) throw InputError("atom outside the action's atom table");
    return make_atom(atoms_, atom_action_.act(m, x.atom_index()));
  }
  {
    std::lock_guard lock(memo_->mu);
    auto& table = memo_->images[m];
    if (auto it = table.find(x); it != table.end()) return it->second;
  }
  std::vector<Node> kids;
  kids.reserve(x.size());
  for (Node c : x.children()) kids.push_back(apply(m, c));
  Node image = make_set(std::move(kids));
  std::lock_guard lock(memo_->mu);
  memo_->images[m].emplace(x, image);
  return image;
}

LeftCongruence ExtendedAction::stabiliser(Node x) const {
  std::vector<Node> images(monoid().size());
  for (Elem m = 0; m < images.size(); ++m) images[m] = apply(m, x);
  return LeftCongruence::checked(monoid(), Partition::from_keys(images));
}

ActionTable extend_action(const ActionTable& atom_action, const Universe& u) {
  if (atom_action.carrier_size() != u.atoms().count()) {
    throw InputError("carrier mismatch: action has " + std::to_string(atom_action.carrier_size()) +
                     " points, universe has " + std::to_string(u.atoms().count()) + " atoms");
  }
  if (atom_action.carrier() != u.atoms().labels) {
    throw InputError("carrier mismatch: action carrier labels differ from the universe's atom labels");
  }
  ExtendedAction ext(atom_action, u.atoms());
  const auto& top = u.top();
  std::vector<std::string> carrier;
  carrier.reserve(top.size());
  for (Node n : top) carrier.push_back(to_string(n, &u.atoms()));
  std::vector<std::vector<Point>> table(ext.monoid().size(), std::vector<Point>(top.size()));
  for (Elem m = 0; m < ext.monoid().size(); ++m) {
    for (Point i = 0; i < top.size(); ++i) {
      Node image = ext.apply(m, top[i]);
      auto it = std::lower_bound(top.begin(), top.end(), image);
      if (it == top.end() || *it != image) throw InputError("extended action leaves the universe");
      table[m][i] = static_cast<Point>(it - top.begin());
    }
  }
  return ActionTable::make(ext.monoid(), std::move(carrier), std::move(table));
}

}  // namespace tmon
