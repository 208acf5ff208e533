#include "kepla/chem.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

namespace kepla {

namespace {

const std::unordered_set<std::string>& known_elements() {
  static const std::unordered_set<std::string> table{
      "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg",
      "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr",
      "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr",
      "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
      "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
      "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf",
      "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
      "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm",
      "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs",
      "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};
  return table;
}

// Standard valence lists for implicit-H and radical assignment. Elements
// absent here (metals and the like) get no implicit hydrogens or radicals.
std::vector<int> default_valences(const std::string& elem) {
  if (elem == "B") return {3};
  if (elem == "C" || elem == "Si") return {4};
  if (elem == "N" || elem == "P" || elem == "As") return {3, 5};
  if (elem == "O") return {2};
  if (elem == "S" || elem == "Se" || elem == "Te") return {2, 4, 6};
  if (elem == "F" || elem == "Cl" || elem == "Br" || elem == "I") return {1};
  if (elem == "H") return {1};
  return {};
}

// Charge shifts the attainable valences: cations of N-group/O-group/halogen
// elements gain a bond, anions lose one; carbon and silicon lose either way;
// boron gains on negative charge.
std::vector<int> charged_valences(const std::string& elem, int charge) {
  std::vector<int> base = default_valences(elem);
  int shift = 0;
  if (elem == "C" || elem == "Si" || elem == "H") {
    shift = -std::abs(charge);
  } else if (elem == "B") {
    shift = -charge;
  } else {
    shift = charge;
  }
  std::vector<int> out;
  for (int v : base) {
    if (v + shift >= 0) {
      out.push_back(v + shift);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int order_value(BondOrder o) {
  switch (o) {
    case BondOrder::kSingle: return 1;
    case BondOrder::kDouble: return 2;
    case BondOrder::kTriple: return 3;
    case BondOrder::kAromatic: return 1;  // ring pi system handled separately
  }
  return 1;
}

class SmilesParser {
 public:
  explicit SmilesParser(const std::string& text) : s_(text) {}

  Molecule run() {
    if (s_.empty()) {
      throw ParseError("empty SMILES", 0);
    }
    for (std::size_t k = 0; k < s_.size(); ++k) {
      if (static_cast<unsigned char>(s_[k]) > 127) {
        throw ParseError("non-ASCII byte in SMILES", k);
      }
    }
    while (i_ < s_.size()) {
      step();
    }
    if (!ring_open_.empty()) {
      throw ParseError("unmatched ring closure", ring_open_.begin()->second.offset);
    }
    if (!branch_stack_.empty()) {
      throw ParseError("unclosed branch", branch_stack_.back().second);
    }
    if (pending_order_ != 0) {
      throw ParseError("dangling bond", pending_offset_);
    }
    if (mol_.atoms.empty()) {
      throw ParseError("no atoms", 0);
    }
    finalize();
    return std::move(mol_);
  }

 private:
  struct RingSlot {
    int atom = -1;
    int order = 0;  // 0 = unspecified
    std::size_t offset = 0;
  };

  void step() {
    const char c = s_[i_];
    switch (c) {
      case '(':
        if (prev_ < 0) {
          throw ParseError("branch before any atom", i_);
        }
        if (pending_order_ != 0) {
          throw ParseError("bond before branch open", i_);
        }
        branch_stack_.emplace_back(prev_, i_);
        ++i_;
        return;
      case ')':
        if (branch_stack_.empty()) {
          throw ParseError("unopened branch", i_);
        }
        if (pending_order_ != 0) {
          throw ParseError("dangling bond", pending_offset_);
        }
        prev_ = branch_stack_.back().first;
        branch_stack_.pop_back();
        ++i_;
        return;
      case '-': set_pending(1); return;
      case '=': set_pending(2); return;
      case '#': set_pending(3); return;
      case ':': set_pending(4); return;
      case '/':
      case '\\':
        throw ParseError("cis/trans bond marks are not supported", i_);
      case '.':
        throw ParseError("disconnected components are not supported", i_);
      case '*':
        throw ParseError("wildcard atoms are not supported", i_);
      case '%':
      case '0': case '1': case '2': case '3': case '4':
      case '5': case '6': case '7': case '8': case '9':
        ring_token();
        return;
      case '[':
        bracket_atom();
        return;
      default:
        organic_atom();
        return;
    }
  }

  void set_pending(int order) {
    if (pending_order_ != 0) {
      throw ParseError("two consecutive bond symbols", i_);
    }
    if (prev_ < 0) {
      throw ParseError("bond before any atom", i_);
    }
    pending_order_ = order;
    pending_offset_ = i_;
    ++i_;
  }

  void ring_token() {
    if (prev_ < 0) {
      throw ParseError("ring closure before any atom", i_);
    }
    const std::size_t at = i_;
    int num = 0;
    if (s_[i_] == '%') {
      if (i_ + 2 >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(s_[i_ + 2]))) {
        throw ParseError("%% ring closure needs two digits", i_);
      }
      num = (s_[i_ + 1] - '0') * 10 + (s_[i_ + 2] - '0');
      i_ += 3;
    } else {
      num = s_[i_] - '0';
      ++i_;
    }
    const int order = pending_order_;
    pending_order_ = 0;

    auto it = ring_open_.find(num);
    if (it == ring_open_.end()) {
      ring_open_[num] = RingSlot{prev_, order, at};
      return;
    }
    const RingSlot slot = it->second;
    ring_open_.erase(it);
    if (slot.atom == prev_) {
      throw ParseError("ring bond to the same atom", at);
    }
    int resolved = 0;
    if (slot.order != 0 && order != 0 && slot.order != order) {
      throw ParseError("conflicting ring bond orders", at);
    }
    resolved = slot.order != 0 ? slot.order : order;
    add_bond(slot.atom, prev_, resolved, at);
  }

  void organic_atom() {
    const std::size_t at = i_;
    std::string elem;
    bool aromatic = false;
    if (i_ + 1 < s_.size() &&
        ((s_[i_] == 'C' && s_[i_ + 1] == 'l') || (s_[i_] == 'B' && s_[i_ + 1] == 'r'))) {
      elem = s_.substr(i_, 2);
      i_ += 2;
    } else {
      const char c = s_[i_];
      if (c == 'B' || c == 'C' || c == 'N' || c == 'O' || c == 'P' || c == 'S' ||
          c == 'F' || c == 'I') {
        elem = std::string(1, c);
        ++i_;
      } else if (c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's') {
        elem = std::string(1, static_cast<char>(std::toupper(c)));
        aromatic = true;
        ++i_;
      } else {
        throw ParseError("unexpected character", i_);
      }
    }
    Atom atom;
    atom.element = elem;
    atom.aromatic = aromatic;
    atom.offset = at;
    attach(std::move(atom), at);
  }

  void bracket_atom() {
    const std::size_t open = i_;
    ++i_;  // '['
    Atom atom;
    atom.bracket = true;
    atom.offset = open;

    // isotope
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      atom.isotope = atom.isotope * 10 + (s_[i_] - '0');
      ++i_;
    }
    if (i_ >= s_.size()) {
      throw ParseError("unterminated bracket atom", open);
    }
    if (s_[i_] == '*') {
      throw ParseError("wildcard atoms are not supported", i_);
    }

    // element symbol, optionally aromatic lowercase
    const std::size_t sym_at = i_;
    if (std::isupper(static_cast<unsigned char>(s_[i_]))) {
      std::string elem(1, s_[i_]);
      ++i_;
      if (i_ < s_.size() && std::islower(static_cast<unsigned char>(s_[i_])) &&
          known_elements().count(elem + s_[i_])) {
        elem += s_[i_];
        ++i_;
      }
      if (!known_elements().count(elem)) {
        throw ParseError("unknown element symbol", sym_at);
      }
      atom.element = elem;
    } else if (std::islower(static_cast<unsigned char>(s_[i_]))) {
      std::string low(1, s_[i_]);
      if (i_ + 1 < s_.size() &&
          ((s_[i_] == 'a' && s_[i_ + 1] == 's') || (s_[i_] == 's' && s_[i_ + 1] == 'e'))) {
        low += s_[i_ + 1];
      }
      static const std::set<std::string> arom{"b", "c", "n", "o", "p", "s", "as", "se"};
      if (!arom.count(low)) {
        throw ParseError("unknown aromatic symbol", sym_at);
      }
      atom.element = low;
      atom.element[0] = static_cast<char>(std::toupper(atom.element[0]));
      atom.aromatic = true;
      i_ += low.size();
    } else {
      throw ParseError("expected element symbol", i_);
    }

    // tetrahedral marks
    if (i_ < s_.size() && s_[i_] == '@') {
      ++i_;
      if (i_ < s_.size() && s_[i_] == '@') {
        atom.chirality = 2;
        ++i_;
      } else {
        atom.chirality = 1;
      }
      if (i_ + 1 < s_.size() && std::isupper(static_cast<unsigned char>(s_[i_])) &&
          std::isupper(static_cast<unsigned char>(s_[i_ + 1]))) {
        throw ParseError("extended chirality classes are not supported", i_);
      }
    }

    // explicit hydrogen count
    if (i_ < s_.size() && s_[i_] == 'H') {
      ++i_;
      int h = 1;
      if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
        h = 0;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
          h = h * 10 + (s_[i_] - '0');
          ++i_;
        }
      }
      atom.explicit_h = h;
    }

    // charge
    if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) {
      const int sign = s_[i_] == '+' ? 1 : -1;
      const char mark = s_[i_];
      int magnitude = 1;
      ++i_;
      if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
        magnitude = 0;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
          magnitude = magnitude * 10 + (s_[i_] - '0');
          ++i_;
        }
      } else {
        while (i_ < s_.size() && s_[i_] == mark) {
          ++magnitude;
          ++i_;
        }
      }
      if (magnitude > 15) {
        throw ParseError("implausible formal charge", i_ - 1);
      }
      atom.charge = sign * magnitude;
    }

    if (i_ < s_.size() && s_[i_] == ':') {
      throw ParseError("atom classes are not supported", i_);
    }
    if (i_ >= s_.size() || s_[i_] != ']') {
      throw ParseError("expected ]", i_ < s_.size() ? i_ : open);
    }
    ++i_;
    attach(std::move(atom), open);
  }

  void attach(Atom atom, std::size_t at) {
    mol_.atoms.push_back(std::move(atom));
    const int id = static_cast<int>(mol_.atoms.size()) - 1;
    if (prev_ >= 0) {
      const int order = pending_order_;
      pending_order_ = 0;
      add_bond(prev_, id, order, at);
    } else if (pending_order_ != 0) {
      throw ParseError("dangling bond", pending_offset_);
    }
    prev_ = id;
  }

  void add_bond(int a, int b, int order, std::size_t at) {
    const auto key = std::minmax(a, b);
    if (!bond_keys_.insert(key).second) {
      throw ParseError("duplicate bond", at);
    }
    Bond bond;
    bond.a = a;
    bond.b = b;
    if (order == 0) {
      bond.order = (mol_.atoms[static_cast<std::size_t>(a)].aromatic &&
                    mol_.atoms[static_cast<std::size_t>(b)].aromatic)
                       ? BondOrder::kAromatic
                       : BondOrder::kSingle;
      default_aromatic_.push_back(static_cast<int>(mol_.bonds.size()));
    } else {
      bond.order = static_cast<BondOrder>(order);
      if (bond.order == BondOrder::kAromatic) {
        explicit_aromatic_.push_back(static_cast<int>(mol_.bonds.size()));
      }
    }
    bond_offsets_.push_back(at);
    mol_.bonds.push_back(bond);
  }

  void finalize() {
    build_adjacency();
    perceive_rings();
    resolve_aromatic_bonds();
    assign_hydrogens();
  }

  void build_adjacency() {
    const std::size_t n = mol_.atoms.size();
    mol_.neighbors.assign(n, {});
    mol_.adjacency.assign(n, {});
    for (const Bond& b : mol_.bonds) {
      mol_.neighbors[static_cast<std::size_t>(b.a)].push_back(b.b);
      mol_.neighbors[static_cast<std::size_t>(b.b)].push_back(b.a);
    }
    for (std::size_t i = 0; i < n; ++i) {
      mol_.adjacency[i].push_back(static_cast<int>(i));
      mol_.adjacency[i].insert(mol_.adjacency[i].end(), mol_.neighbors[i].begin(),
                               mol_.neighbors[i].end());
    }
  }

  // Shortest cycle through a bond, as the atom path a..b (bond excluded).
  // Empty when the bond is a bridge.
  std::vector<int> shortest_cycle_path(int bond_id) const {
    const Bond& e = mol_.bonds[static_cast<std::size_t>(bond_id)];
    std::vector<int> parent(mol_.atoms.size(), -2);
    std::deque<int> queue;
    parent[static_cast<std::size_t>(e.a)] = -1;
    queue.push_back(e.a);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      if (u == e.b) {
        break;
      }
      for (std::size_t k = 0; k < mol_.neighbors[static_cast<std::size_t>(u)].size(); ++k) {
        const int v = mol_.neighbors[static_cast<std::size_t>(u)][k];
        if (u == e.a && v == e.b) {
          continue;  // skip the bond itself, not a parallel path
        }
        if (parent[static_cast<std::size_t>(v)] == -2) {
          parent[static_cast<std::size_t>(v)] = u;
          queue.push_back(v);
        }
      }
    }
    if (parent[static_cast<std::size_t>(e.b)] == -2) {
      return {};
    }
    std::vector<int> path;
    for (int v = e.b; v != -1; v = parent[static_cast<std::size_t>(v)]) {
      path.push_back(v);
    }
    std::reverse(path.begin(), path.end());  // starts at e.a, ends at e.b
    return path;
  }

  int bond_id_between(int a, int b) const {
    for (std::size_t i = 0; i < mol_.bonds.size(); ++i) {
      const Bond& x = mol_.bonds[i];
      if ((x.a == a && x.b == b) || (x.a == b && x.b == a)) {
        return static_cast<int>(i);
      }
    }
    return -1;
  }

  void perceive_rings() {
    const int m = static_cast<int>(mol_.bonds.size());
    mol_.atom_in_ring.assign(mol_.atoms.size(), 0);

    struct Candidate {
      std::vector<int> atoms;
      std::vector<std::uint64_t> edges;  // bitset over bond ids
    };
    std::vector<Candidate> candidates;
    const std::size_t words = (static_cast<std::size_t>(m) + 63) / 64;

    for (int e = 0; e < m; ++e) {
      std::vector<int> path = shortest_cycle_path(e);
      if (path.empty()) {
        continue;  // bridge
      }
      mol_.bonds[static_cast<std::size_t>(e)].in_ring = true;
      Candidate cand;
      cand.atoms = path;
      cand.edges.assign(words, 0);
      auto set_edge = [&cand](int id) {
        cand.edges[static_cast<std::size_t>(id) / 64] |= 1ULL << (id % 64);
      };
      set_edge(e);
      for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        set_edge(bond_id_between(path[k], path[k + 1]));
      }
      candidates.push_back(std::move(cand));
    }

    for (const Bond& b : mol_.bonds) {
      if (b.in_ring) {
        mol_.atom_in_ring[static_cast<std::size_t>(b.a)] = 1;
        mol_.atom_in_ring[static_cast<std::size_t>(b.b)] = 1;
      }
    }

    // Greedy smallest-first cycle-space basis (GF(2) over bond incidence).
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& x, const Candidate& y) {
                       return x.atoms.size() < y.atoms.size();
                     });
    std::vector<std::vector<std::uint64_t>> basis;
    for (Candidate& cand : candidates) {
      std::vector<std::uint64_t> reduced = cand.edges;
      for (const auto& vec : basis) {
        // reduce by the basis vector's lowest set bit
        std::size_t pivot = 0;
        while (pivot < vec.size() && vec[pivot] == 0) ++pivot;
        if (pivot == vec.size()) continue;
        const std::uint64_t low = vec[pivot] & ~(vec[pivot] - 1);
        if (pivot < reduced.size() && (reduced[pivot] & low)) {
          for (std::size_t w = 0; w < reduced.size(); ++w) {
            reduced[w] ^= vec[w];
          }
        }
      }
      bool zero = true;
      for (std::uint64_t w : reduced) {
        zero = zero && w == 0;
      }
      if (!zero) {
        basis.push_back(std::move(reduced));
        mol_.rings.push_back(cand.atoms);
      }
    }
  }

  void resolve_aromatic_bonds() {
    // A default bond between two aromatic atoms outside any ring (e.g. the
    // biphenyl linker) is single; an explicit ':' outside a ring is an error.
    for (int id : default_aromatic_) {
      Bond& b = mol_.bonds[static_cast<std::size_t>(id)];
      if (b.order == BondOrder::kAromatic && !b.in_ring) {
        b.order = BondOrder::kSingle;
      }
    }
    for (int id : explicit_aromatic_) {
      const Bond& b = mol_.bonds[static_cast<std::size_t>(id)];
      if (!b.in_ring) {
        throw ParseError("aromatic bond outside a ring",
                         bond_offsets_[static_cast<std::size_t>(id)]);
      }
      if (!mol_.atoms[static_cast<std::size_t>(b.a)].aromatic ||
          !mol_.atoms[static_cast<std::size_t>(b.b)].aromatic) {
        throw ParseError("aromatic bond between non-aromatic atoms",
                         bond_offsets_[static_cast<std::size_t>(id)]);
      }
    }
    for (std::size_t i = 0; i < mol_.atoms.size(); ++i) {
      if (mol_.atoms[i].aromatic && !mol_.atom_in_ring[i]) {
        throw ParseError("aromatic atom outside a ring", mol_.atoms[i].offset);
      }
    }
  }

  void assign_hydrogens() {
    for (std::size_t i = 0; i < mol_.atoms.size(); ++i) {
      Atom& atom = mol_.atoms[i];
      int occupancy = atom.explicit_h;
      bool has_multiple_bond = false;
      for (const Bond& b : mol_.bonds) {
        if (b.a == static_cast<int>(i) || b.b == static_cast<int>(i)) {
          occupancy += order_value(b.order);
          has_multiple_bond = has_multiple_bond ||
                              b.order == BondOrder::kDouble ||
                              b.order == BondOrder::kTriple;
        }
      }
      if (atom.aromatic) {
        // Aromatic carbon carries one pi bond in any Kekule structure unless
        // an exocyclic double already supplies it; the heteroatoms of the
        // subset contribute lone pairs instead, so unbracketed aromatic
        // heteroatoms take no implicit hydrogens.
        if (atom.element == "C" && !has_multiple_bond) {
          occupancy += 1;
        }
        if (!atom.bracket) {
          const std::vector<int> vs = charged_valences(atom.element, atom.charge);
          if (vs.empty() || occupancy > vs.back()) {
            throw ParseError("valence violation", atom.offset);
          }
          if (atom.element == "C") {
            auto it = std::lower_bound(vs.begin(), vs.end(), occupancy);
            atom.implicit_h = *it - occupancy;
          } else {
            atom.implicit_h = 0;
          }
        }
        atom.radicals = 0;
        continue;
      }
      if (!atom.bracket) {
        const std::vector<int> vs = charged_valences(atom.element, atom.charge);
        auto it = std::lower_bound(vs.begin(), vs.end(), occupancy);
        if (it == vs.end()) {
          throw ParseError("valence violation", atom.offset);
        }
        atom.implicit_h = *it - occupancy;
      } else {
        const std::vector<int> vs = charged_valences(atom.element, atom.charge);
        if (!vs.empty()) {
          auto it = std::lower_bound(vs.begin(), vs.end(), occupancy);
          if (it == vs.end()) {
            throw ParseError("valence violation", atom.offset);
          }
          atom.radicals = *it - occupancy;
        }
      }
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
  Molecule mol_;
  int prev_ = -1;
  int pending_order_ = 0;  // 0 none, 1..3 orders, 4 aromatic
  std::size_t pending_offset_ = 0;
  std::vector<std::pair<int, std::size_t>> branch_stack_;
  std::map<int, RingSlot> ring_open_;
  std::set<std::pair<int, int>> bond_keys_;
  std::vector<int> default_aromatic_;
  std::vector<int> explicit_aromatic_;
  std::vector<std::size_t> bond_offsets_;
};

}  // namespace

Molecule parse_smiles(const std::string& text) {
  return SmilesParser(text).run();
}

const std::vector<std::string>& atom_feature_elements() {
  static const std::vector<std::string> table{
      "C",  "N",  "O",  "S",  "F",  "Si", "P",  "Cl", "Br", "Mg", "Na",
      "Ca", "Fe", "As", "Al", "I",  "B",  "V",  "K",  "Tl", "Yb", "Sb",
      "Sn", "Ag", "Pd", "Co", "Se", "Ti", "Zn", "H",  "Li", "Ge", "Cu",
      "Au", "Ni", "Cd", "In", "Mn", "Zr", "Cr", "Pt", "Hg", "Pb"};
  return table;
}

namespace {

enum class Hybridization { kSp = 0, kSp2, kSp3, kSp3d, kSp3d2 };

Hybridization infer_hybridization(const Molecule& mol, int atom_id) {
  const Atom& atom = mol.atoms[static_cast<std::size_t>(atom_id)];
  int doubles = 0, triples = 0;
  for (const Bond& b : mol.bonds) {
    if (b.a != atom_id && b.b != atom_id) {
      continue;
    }
    if (b.order == BondOrder::kDouble) ++doubles;
    if (b.order == BondOrder::kTriple) ++triples;
  }
  if (atom.element == "S" || atom.element == "P") {
    const int around = mol.degree(atom_id) + atom.total_h();
    if (around >= 6) return Hybridization::kSp3d2;
    if (around == 5) return Hybridization::kSp3d;
  }
  if (triples >= 1 || doubles >= 2) return Hybridization::kSp;
  if (doubles == 1 || atom.aromatic) return Hybridization::kSp2;
  return Hybridization::kSp3;
}

}  // namespace

std::vector<std::array<std::int32_t, kAtomFeatureDim>> featurize_atoms(
    const Molecule& mol) {
  const auto& elements = atom_feature_elements();
  std::vector<std::array<std::int32_t, kAtomFeatureDim>> out(
      static_cast<std::size_t>(mol.atom_count()));
  for (int i = 0; i < mol.atom_count(); ++i) {
    auto& f = out[static_cast<std::size_t>(i)];
    f.fill(0);
    const Atom& atom = mol.atoms[static_cast<std::size_t>(i)];

    const auto it = std::find(elements.begin(), elements.end(), atom.element);
    if (it != elements.end()) {
      f[static_cast<std::size_t>(it - elements.begin())] = 1;
    }
    const int degree = mol.degree(i);
    if (degree <= 10) {
      f[static_cast<std::size_t>(43 + degree)] = 1;
    }
    if (atom.implicit_h <= 6) {
      f[static_cast<std::size_t>(54 + atom.implicit_h)] = 1;
    }
    f[61] = atom.charge;
    f[62] = atom.radicals;
    f[static_cast<std::size_t>(63 + static_cast<int>(infer_hybridization(mol, i)))] = 1;
    f[68] = atom.aromatic ? 1 : 0;
    if (atom.total_h() <= 4) {
      f[static_cast<std::size_t>(69 + atom.total_h())] = 1;
    }
  }
  return out;
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_symbol(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::vector<std::uint8_t> morgan_fingerprint(const Molecule& mol, int radius,
                                             int nbits) {
  if (radius < 0) {
    throw ContractError("fingerprint radius must be nonnegative");
  }
  if (nbits < 64) {
    throw ContractError("fingerprint width must be at least 64 bits");
  }
  const std::size_t n = static_cast<std::size_t>(mol.atom_count());
  std::vector<std::uint64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Atom& a = mol.atoms[i];
    std::uint64_t h = hash_symbol(a.element);
    h = mix64(h ^ static_cast<std::uint64_t>(mol.degree(static_cast<int>(i))));
    h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(a.charge) + 512));
    h = mix64(h ^ static_cast<std::uint64_t>(a.total_h()));
    h = mix64(h ^ (a.aromatic ? 0x517cc1b727220a95ULL : 0x2545f4914f6cdd1dULL));
    ids[i] = h;
  }

  std::vector<std::uint8_t> bits(static_cast<std::size_t>(nbits), 0);
  auto fold = [&bits, nbits](std::uint64_t id) {
    bits[static_cast<std::size_t>(id % static_cast<std::uint64_t>(nbits))] = 1;
  };
  for (std::uint64_t id : ids) {
    fold(id);
  }

  for (int round = 1; round <= radius; ++round) {
    std::vector<std::uint64_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> env;
      for (const Bond& b : mol.bonds) {
        int other = -1;
        if (b.a == static_cast<int>(i)) other = b.b;
        if (b.b == static_cast<int>(i)) other = b.a;
        if (other < 0) {
          continue;
        }
        env.emplace_back(static_cast<std::uint64_t>(b.order),
                         ids[static_cast<std::size_t>(other)]);
      }
      std::sort(env.begin(), env.end());
      std::uint64_t h = mix64(ids[i] ^ static_cast<std::uint64_t>(round));
      for (const auto& [order, nid] : env) {
        h = mix64(h ^ mix64(order));
        h = mix64(h ^ nid);
      }
      next[i] = h;
      fold(h);
    }
    ids = std::move(next);
  }
  return bits;
}

double jaccard_distance(const std::vector<std::uint8_t>& a,
                        const std::vector<std::uint8_t>& b) {
  if (a.size() != b.size()) {
    throw DimensionError("fingerprint lengths disagree");
  }
  int inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool xa = a[i] != 0, xb = b[i] != 0;
    inter += (xa && xb) ? 1 : 0;
    uni += (xa || xb) ? 1 : 0;
  }
  if (uni == 0) {
    return 0.0;
  }
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

int LigandProperties::descriptor(const std::string& name) const {
  for (const auto& [key, count] : descriptors) {
    if (key == name) {
      return count;
    }
  }
  throw LookupError("unknown descriptor: " + name);
}

std::string LigandProperties::to_text() const {
  std::ostringstream out;
  for (const auto& [key, count] : descriptors) {
    out << key << '\t' << count << '\n';
  }
  for (const auto& tag : features) {
    out << "feature:" << tag << '\t' << 1 << '\n';
  }
  return out.str();
}

LigandProperties extract_ligand_properties(const Molecule& mol) {
  int donors = 0, acceptors = 0, rotatable = 0, stereocenters = 0;
  int heteroatoms = 0, positive = 0, negative = 0;
  bool hydrophobe = false;

  for (int i = 0; i < mol.atom_count(); ++i) {
    const Atom& a = mol.atoms[static_cast<std::size_t>(i)];
    const bool n_or_o = a.element == "N" || a.element == "O";
    if (n_or_o && a.total_h() >= 1) {
      ++donors;
    }
    if (n_or_o && a.charge <= 0) {
      // Lone-pair availability: pyrrole-type aromatic nitrogen donates its
      // pair to the ring; quaternary nitrogen has none.
      int occupancy = a.total_h();
      for (const Bond& b : mol.bonds) {
        if (b.a == i || b.b == i) {
          occupancy += order_value(b.order);
        }
      }
      const int limit = a.element == "O" ? 3 : (a.aromatic ? 2 : 3);
      if (occupancy <= limit) {
        ++acceptors;
      }
    }
    if (a.element != "C" && a.element != "H") {
      ++heteroatoms;
    }
    if (a.charge > 0) ++positive;
    if (a.charge < 0) ++negative;
    if (a.chirality != 0) ++stereocenters;
    if (a.element == "C") {
      bool pure = true;
      for (int nb : mol.neighbors[static_cast<std::size_t>(i)]) {
        pure = pure && mol.atoms[static_cast<std::size_t>(nb)].element == "C";
      }
      hydrophobe = hydrophobe || pure;
    }
  }

  for (const Bond& b : mol.bonds) {
    if (b.order != BondOrder::kSingle || b.in_ring) {
      continue;
    }
    if (mol.degree(b.a) >= 2 && mol.degree(b.b) >= 2) {
      ++rotatable;
    }
  }

  int arom_carbo = 0, arom_hetero = 0, ali_carbo = 0, ali_hetero = 0;
  bool any_aromatic_ring = false;
  for (const auto& ring : mol.rings) {
    bool aromatic = true, carbons_only = true;
    for (int id : ring) {
      aromatic = aromatic && mol.atoms[static_cast<std::size_t>(id)].aromatic;
      carbons_only =
          carbons_only && mol.atoms[static_cast<std::size_t>(id)].element == "C";
    }
    any_aromatic_ring = any_aromatic_ring || aromatic;
    if (aromatic && carbons_only) ++arom_carbo;
    if (aromatic && !carbons_only) ++arom_hetero;
    if (!aromatic && carbons_only) ++ali_carbo;
    if (!aromatic && !carbons_only) ++ali_hetero;
  }

  LigandProperties props;
  props.descriptors = {
      {"h_bond_donors", donors},
      {"h_bond_acceptors", acceptors},
      {"aromatic_carbocycles", arom_carbo},
      {"aromatic_heterocycles", arom_hetero},
      {"aliphatic_carbocycles", ali_carbo},
      {"aliphatic_heterocycles", ali_hetero},
      {"rotatable_bonds", rotatable},
      {"stereocenters", stereocenters},
      {"heteroatoms", heteroatoms},
      {"positive_atoms", positive},
      {"negative_atoms", negative},
  };
  if (hydrophobe) props.features.push_back("hydrophobe");
  if (donors > 0) props.features.push_back("donor");
  if (acceptors > 0) props.features.push_back("acceptor");
  if (any_aromatic_ring) props.features.push_back("aromatic");
  if (positive > 0) props.features.push_back("positive");
  if (negative > 0) props.features.push_back("negative");
  return props;
}

}  // namespace kepla
