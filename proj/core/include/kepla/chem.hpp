#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kepla/errors.hpp"

namespace kepla {

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

struct Atom {
  std::string element;  // canonical symbol, e.g. "C", "Cl"
  int charge = 0;
  bool aromatic = false;
  int implicit_h = 0;
  int explicit_h = 0;  // bracket H count; 0 for organic-subset atoms
  int radicals = 0;
  int isotope = 0;    // recorded, not featurized
  int chirality = 0;  // 0 none, 1 = @, 2 = @@; recorded, not featurized
  bool bracket = false;
  std::size_t offset = 0;  // byte offset in the source text

  int total_h() const { return implicit_h + explicit_h; }
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::kSingle;
  bool in_ring = false;
};

struct Molecule {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::vector<std::vector<int>> neighbors;  // bonded atom ids
  std::vector<std::vector<int>> adjacency;  // self id first, then neighbors
  std::vector<std::vector<int>> rings;      // smallest set of smallest rings
  std::vector<std::uint8_t> atom_in_ring;

  int atom_count() const { return static_cast<int>(atoms.size()); }
  int degree(int atom) const {
    return static_cast<int>(neighbors[static_cast<std::size_t>(atom)].size());
  }
};

// Parses the SMILES subset: organic-subset and bracket atoms, bonds - = # :,
// branches, ring closures (digits and %nn), aromatic lowercase notation.
// Reaction syntax, wildcards, dots, and cis/trans marks are rejected.
// Implicit hydrogens follow standard valence rules; errors carry the byte
// offset of the offending token.
Molecule parse_smiles(const std::string& text);

inline constexpr int kAtomFeatureDim = 74;

// 74 integer slots per atom: element one-hot (43), degree one-hot (0-10),
// implicit-valence one-hot (0-6), formal charge, radical electrons,
// hybridization one-hot (sp, sp2, sp3, sp3d, sp3d2), aromatic flag,
// total-H one-hot (0-4). Out-of-range one-hot lookups leave the block zero.
std::vector<std::array<std::int32_t, kAtomFeatureDim>> featurize_atoms(
    const Molecule& mol);

// Element vocabulary backing the one-hot block, in slot order.
const std::vector<std::string>& atom_feature_elements();

// Circular fingerprint: iterative neighborhood hashing from atom invariants
// (element, degree, charge, total H, aromaticity), identifiers from every
// round folded modulo nbits. Bit positions are stable for this codebase
// only; use the returned vectors for distances, not for toolkit interop.
std::vector<std::uint8_t> morgan_fingerprint(const Molecule& mol,
                                             int radius = 2, int nbits = 2048);

// 1 - |intersection| / |union| over set bits; 0 when both vectors are empty.
double jaccard_distance(const std::vector<std::uint8_t>& a,
                        const std::vector<std::uint8_t>& b);

struct LigandProperties {
  // Fixed descriptor vocabulary in serialization order.
  std::vector<std::pair<std::string, int>> descriptors;
  // Qualitative tags from {hydrophobe, donor, acceptor, aromatic, positive,
  // negative}, in that fixed order.
  std::vector<std::string> features;

  int descriptor(const std::string& name) const;
  // One `name<TAB>count` line per descriptor, then `feature:<tag><TAB>1`
  // lines for the qualitative tags.
  std::string to_text() const;
};

LigandProperties extract_ligand_properties(const Molecule& mol);

}  // namespace kepla
