#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "kepla/chem.hpp"
#include "kepla/embeddings.hpp"
#include "kepla/encoders.hpp"
#include "kepla/errors.hpp"
#include "support.hpp"

using namespace kepla;
using kepla::testing::finite_diff_check;
using kepla::testing::max_abs_diff;
using kepla::testing::random_tensor;

namespace {

std::string temp_path(const char* name) {
  return std::string("kepla_test_") + name;
}

Tensor column2(double a, double b) {
  Tensor t(2, 1);
  t.at(0, 0) = a;
  t.at(1, 0) = b;
  return t;
}

}  // namespace

TEST_CASE("residue alphabet maps 23 symbols and collapses unknowns to X") {
  CHECK(residue_index('A') == 0);
  CHECK(residue_index('C') == 1);
  CHECK(residue_index('Y') == 19);
  CHECK(residue_index('X') == 20);
  CHECK(residue_index('B') == 21);
  CHECK(residue_index('U') == 22);
  CHECK(residue_index('a') == 0);           // case-insensitive
  CHECK(residue_index('Z') == residue_index('X'));
  CHECK(residue_index('J') == residue_index('X'));
  CHECK(residue_index('O') == residue_index('X'));
  CHECK_THROWS_AS((void)residue_index('1'), InputError);
  CHECK_THROWS_AS((void)residue_index(' '), InputError);
  CHECK_THROWS_AS((void)residue_indices("AC-D"), InputError);
  const auto idx = residue_indices("ACdZ");
  CHECK(idx == std::vector<int>{0, 1, 2, 20});
}

TEST_CASE("s-mer pooling with s=1 is the identity") {
  Rng rng(7);
  const Tensor m = random_tensor(rng, 4, 6);
  Tape tape;
  const Var v = tape.constant(m);
  const EncodedLocal out = pool_smers(tape, v, 1, 6);
  CHECK(out.valid == 6);
  CHECK(fully_valid(out.mask));
  CHECK(max_abs_diff(tape.value(out.h), m) == 0.0);
}

TEST_CASE("s-mer pooling averages disjoint windows") {
  // Row [1 2 3 4 5 6] with s=3 pools to [2 5].
  Tensor m(1, 6);
  for (int j = 0; j < 6; ++j) m.at(0, j) = j + 1.0;
  Tape tape;
  const EncodedLocal out = pool_smers(tape, tape.constant(m), 3, 6);
  const Tensor& h = tape.value(out.h);
  CHECK(h.rows == 1);
  CHECK(h.cols == 2);
  CHECK(h.at(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(h.at(0, 1) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("s-mer pooling preserves constant matrices") {
  Tensor m(3, 8, 0.75);
  Tape tape;
  const EncodedLocal out = pool_smers(tape, tape.constant(m), 4, 8);
  const Tensor& h = tape.value(out.h);
  for (double x : h.v) CHECK(x == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("s-mer pooling validates its arguments") {
  Tape tape;
  const Var v = tape.constant(Tensor(2, 6, 1.0));
  CHECK_THROWS_AS((void)pool_smers(tape, v, 0, 6), ContractError);
  CHECK_THROWS_AS((void)pool_smers(tape, v, -3, 6), ContractError);
  CHECK_THROWS_AS((void)pool_smers(tape, v, 4, 6), DimensionError);
  CHECK_THROWS_AS((void)pool_smers(tape, v, 3, 7), ContractError);
  CHECK_THROWS_AS((void)pool_smers(tape, v, 3, -1), ContractError);
}

TEST_CASE("fragment validity is the ceiling of valid_len / s") {
  Tape tape;
  const Var v = tape.constant(Tensor(2, 12, 1.0));
  const EncodedLocal a = pool_smers(tape, v, 3, 7);
  CHECK(a.valid == 3);  // ceil(7/3)
  CHECK(a.mask == Mask{1, 1, 1, 0});
  const EncodedLocal b = pool_smers(tape, v, 3, 12);
  CHECK(b.valid == 4);
  CHECK(fully_valid(b.mask));
  const EncodedLocal c = pool_smers(tape, v, 3, 0);
  CHECK(c.valid == 0);
  CHECK(count_valid(c.mask) == 0);
}

TEST_CASE("pooling gradients match finite differences") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor m = random_tensor(rng, 3, 9);
    const double err = finite_diff_check({m}, [](Tape& t, const auto& vars) {
      const EncodedLocal p = pool_smers(t, vars[0], 3, 7);
      return t.l2_norm(t.mean_masked(p.h, p.mask));
    });
    CHECK(err < 1e-6);
  }
}

TEST_CASE("trainable protein encoder matches a hand computation") {
  // Sequence "AC", s=1. Table columns: A -> (1,2), C -> (3,4).
  Tensor table(2, kResidueCount, 0.0);
  table.at(0, 0) = 1.0;
  table.at(1, 0) = 2.0;
  table.at(0, 1) = 3.0;
  table.at(1, 1) = 4.0;

  Tape tape;
  ProviderBinding provider{tape.param(table), nullptr};
  Tensor w1(2, 2, 0.0);
  w1.at(0, 0) = 1.0;
  w1.at(1, 1) = 1.0;
  Tensor w2(1, 2, 1.0);
  const std::vector<DenseLayer> dnn = {
      {tape.param(w1), tape.param(column2(-2.0, 0.0))},
      {tape.param(w2), tape.param(Tensor(1, 1, 0.5))},
  };
  const EncodedLocal enc =
      encode_protein(tape, "p", "AC", provider, dnn, 1, 1080);
  // Layer 1: relu([1-2, 2], [3-2, 4]) = [(0,2), (1,4)];
  // layer 2 sums rows and adds 0.5 -> [2.5, 5.5].
  const Tensor& h = tape.value(enc.h);
  CHECK(h.rows == 1);
  CHECK(h.cols == 2);
  CHECK(h.at(0, 0) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(h.at(0, 1) == doctest::Approx(5.5).epsilon(1e-12));
  CHECK(enc.valid == 2);
  CHECK(fully_valid(enc.mask));

  // Global projection: 2 * mean(2.5, 5.5) + 1 = 9.
  const Var g = global_project(tape, enc, tape.param(Tensor(1, 1, 2.0)),
                               tape.param(Tensor(1, 1, 1.0)));
  CHECK(tape.value(g).item() == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("zero embedding table yields ReLU(bias) in every valid column") {
  Tape tape;
  ProviderBinding provider{tape.param(Tensor(3, kResidueCount, 0.0)), nullptr};
  Tensor b(2, 1);
  b.at(0, 0) = 0.7;
  b.at(1, 0) = -0.4;
  Rng rng(3);
  const std::vector<DenseLayer> dnn = {
      {tape.param(random_tensor(rng, 2, 3)), tape.param(b)}};
  const EncodedLocal enc =
      encode_protein(tape, "p", "ACDEFG", provider, dnn, 2, 1080);
  const Tensor& h = tape.value(enc.h);
  REQUIRE(h.cols == 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(h.at(0, j) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(h.at(1, j) == 0.0);  // ReLU clamps the negative bias row
  }
}

TEST_CASE("a length-9 sequence with s=9 pools to one fragment") {
  Rng rng(5);
  const Tensor table = random_tensor(rng, 4, kResidueCount);
  Tape tape;
  ProviderBinding provider{tape.param(table), nullptr};
  const std::string seq = "ACDEFGHIK";
  const EncodedLocal enc =
      encode_protein(tape, "p", seq, provider, {}, 9, 1080);
  const Tensor& h = tape.value(enc.h);
  REQUIRE(h.cols == 1);
  CHECK(enc.valid == 1);
  const auto idx = residue_indices(seq);
  for (int i = 0; i < 4; ++i) {
    double mean = 0.0;
    for (int t = 0; t < 9; ++t) mean += table.at(i, idx[(std::size_t)t]) / 9.0;
    CHECK(h.at(i, 0) == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("partial final fragment averages padded zeros over the full width") {
  Rng rng(6);
  const Tensor table = random_tensor(rng, 3, kResidueCount);
  Tape tape;
  ProviderBinding provider{tape.param(table), nullptr};
  const std::string seq = "ACDEFGHIKL";  // 10 residues, s = 9 -> 2 fragments
  const EncodedLocal enc =
      encode_protein(tape, "p", seq, provider, {}, 9, 1080);
  const Tensor& h = tape.value(enc.h);
  REQUIRE(h.cols == 2);
  CHECK(enc.valid == 2);
  CHECK(fully_valid(enc.mask));
  const int last = residue_indices(seq)[9];
  for (int i = 0; i < 3; ++i) {
    CHECK(h.at(i, 1) ==
          doctest::Approx(table.at(i, last) / 9.0).epsilon(1e-12));
  }
}

TEST_CASE("sequences beyond the residue cap are truncated") {
  Rng rng(8);
  const Tensor table = random_tensor(rng, 3, kResidueCount);
  Tape tape;
  ProviderBinding provider{tape.param(table), nullptr};
  const EncodedLocal full =
      encode_protein(tape, "p", "ACDEFGHI", provider, {}, 2, 4);
  const EncodedLocal prefix =
      encode_protein(tape, "p", "ACDE", provider, {}, 2, 4);
  CHECK(max_abs_diff(tape.value(full.h), tape.value(prefix.h)) == 0.0);
  CHECK(full.valid == 2);
}

TEST_CASE("unknown letters encode exactly like X") {
  Rng rng(9);
  const Tensor table = random_tensor(rng, 3, kResidueCount);
  Tape tape;
  ProviderBinding provider{tape.param(table), nullptr};
  const EncodedLocal z = encode_protein(tape, "p", "AZC", provider, {}, 1, 16);
  const EncodedLocal x = encode_protein(tape, "p", "AXC", provider, {}, 1, 16);
  CHECK(max_abs_diff(tape.value(z.h), tape.value(x.h)) == 0.0);
}

TEST_CASE("protein encoder rejects bad input") {
  Tape tape;
  ProviderBinding provider{tape.param(Tensor(2, kResidueCount, 0.1)), nullptr};
  CHECK_THROWS_AS(
      (void)encode_protein(tape, "p", "AC1D", provider, {}, 1, 16), InputError);
  CHECK_THROWS_AS((void)encode_protein(tape, "p", "", provider, {}, 1, 16),
                  InputError);
  CHECK_THROWS_AS((void)encode_protein(tape, "p", "AC", provider, {}, 0, 16),
                  ContractError);
  CHECK_THROWS_AS((void)encode_protein(tape, "p", "AC", provider, {}, 4, 2),
                  ContractError);
}

TEST_CASE("embedding store round-trips records through float32") {
  const std::string path = temp_path("emb.bin");
  Rng rng(12);
  const Tensor a = random_tensor(rng, 3, 4);
  const Tensor b = random_tensor(rng, 3, 7);
  EmbeddingFile::write(path, 3, {{"protA", a}, {"protB", b}});

  EmbeddingFile file(path);
  CHECK(file.d_p() == 3);
  CHECK(file.contains("protA"));
  CHECK(file.contains("protB"));
  CHECK_FALSE(file.contains("protC"));
  CHECK(file.ids() == std::vector<std::string>{"protA", "protB"});

  const Tensor got = file.load("protB");
  REQUIRE(got.rows == 3);
  REQUIRE(got.cols == 7);
  for (int i = 0; i < got.size(); ++i) {
    CHECK(got.v[(std::size_t)i] ==
          static_cast<double>(static_cast<float>(b.v[(std::size_t)i])));
  }
  CHECK_THROWS_AS((void)file.load("missing"), LookupError);

  // The sidecar lists ids with byte offsets; the first record starts right
  // after the 24-byte header.
  std::ifstream idx(path + ".idx");
  std::string line;
  REQUIRE(std::getline(idx, line));
  CHECK(line == "protA\t24");
  REQUIRE(std::getline(idx, line));
  CHECK(line.rfind("protB\t", 0) == 0);

  std::remove(path.c_str());
  std::remove((path + ".idx").c_str());
}

TEST_CASE("embedding store rejects foreign or truncated files") {
  const std::string bad = temp_path("emb_bad.bin");
  {
    std::ofstream out(bad, std::ios::binary);
    out << "NOTKEPLA garbage";
  }
  CHECK_THROWS_AS(EmbeddingFile file(bad), IoError);
  std::remove(bad.c_str());

  const std::string trunc = temp_path("emb_trunc.bin");
  {
    std::ofstream out(trunc, std::ios::binary);
    out << "KEPLAEMB";  // header cut off after the magic
  }
  CHECK_THROWS_AS(EmbeddingFile file(trunc), IoError);
  std::remove(trunc.c_str());
}

TEST_CASE("file-backed protein encoding pools the stored record") {
  const std::string path = temp_path("emb_enc.bin");
  Rng rng(13);
  Tensor rec = random_tensor(rng, 3, 4);
  EmbeddingFile::write(path, 3, {{"prot1", rec}});
  EmbeddingFile file(path);

  Tape tape;
  ProviderBinding provider{Var{}, &file};
  CHECK_FALSE(provider.trainable());
  const EncodedLocal enc =
      encode_protein(tape, "prot1", "", provider, {}, 2, 1080);
  const Tensor& h = tape.value(enc.h);
  REQUIRE(h.cols == 2);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double lo = static_cast<double>(
          static_cast<float>(rec.at(i, 2 * j)));
      const double hi = static_cast<double>(
          static_cast<float>(rec.at(i, 2 * j + 1)));
      CHECK(h.at(i, j) == doctest::Approx((lo + hi) / 2.0).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(
      (void)encode_protein(tape, "prot9", "", provider, {}, 2, 1080),
      LookupError);

  std::remove(path.c_str());
  std::remove((path + ".idx").c_str());
}

TEST_CASE("protein padding columns are exact zeros and do not shift results") {
  Rng rng(14);
  Tape tape;
  ProviderBinding provider{tape.param(random_tensor(rng, 3, kResidueCount)),
                           nullptr};
  const std::vector<DenseLayer> dnn = {
      {tape.param(random_tensor(rng, 4, 3)),
       tape.param(random_tensor(rng, 4, 1))},
      {tape.param(random_tensor(rng, 2, 4)),
       tape.param(random_tensor(rng, 2, 1))},
  };
  const EncodedLocal tight =
      encode_protein(tape, "p", "ACDE", provider, dnn, 2, 1080);
  const EncodedLocal wide =
      encode_protein(tape, "p", "ACDE", provider, dnn, 2, 1080, 5);
  const Tensor& ht = tape.value(tight.h);
  const Tensor& hw = tape.value(wide.h);
  REQUIRE(ht.cols == 2);
  REQUIRE(hw.cols == 5);
  CHECK(wide.valid == 2);
  for (int i = 0; i < ht.rows; ++i) {
    for (int j = 0; j < 2; ++j) CHECK(hw.at(i, j) == ht.at(i, j));
    for (int j = 2; j < 5; ++j) CHECK(hw.at(i, j) == 0.0);
  }

  const Tensor wk = random_tensor(rng, 2, 2);
  const Tensor bk = random_tensor(rng, 2, 1);
  const Var gt =
      global_project(tape, tight, tape.constant(wk), tape.constant(bk));
  const Var gw =
      global_project(tape, wide, tape.constant(wk), tape.constant(bk));
  CHECK(max_abs_diff(tape.value(gt), tape.value(gw)) < 1e-12);
}

TEST_CASE("single-atom ligand reduces the GCN to a dense layer") {
  const Molecule mol = parse_smiles("C");
  Tape tape;
  // Projection picks the carbon slot and the 4-hydrogen slot.
  Tensor wp(2, kAtomFeatureDim, 0.0);
  wp.at(0, 0) = 1.0;
  wp.at(1, 73) = 1.0;
  Tensor wg(2, 2, 0.0);
  wg.at(0, 0) = 2.0;
  wg.at(1, 1) = 3.0;
  Tensor bg(2, 1);
  bg.at(0, 0) = -1.0;
  bg.at(1, 0) = -5.0;
  const std::vector<DenseLayer> gcn = {{tape.param(wg), tape.param(bg)}};
  const EncodedLocal enc =
      encode_ligand(tape, mol, tape.param(wp), gcn, 290);
  const Tensor& h = tape.value(enc.h);
  REQUIRE(h.rows == 2);
  REQUIRE(h.cols == 1);
  // Self-loop degree 1 keeps x = (1,1); relu(W x + b) = (1, 0).
  CHECK(h.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.at(1, 0) == 0.0);
  CHECK(enc.valid == 1);
}

TEST_CASE("message passing uses symmetric degree normalization") {
  // Path C-C-O. Self-loop degrees are 2, 3, 2, so the normalized adjacency
  // has 1/2 on the end diagonals, 1/3 in the middle, 1/sqrt(6) on edges.
  const Molecule mol = parse_smiles("CCO");
  Tape tape;
  Tensor wp(2, kAtomFeatureDim, 0.0);
  wp.at(0, 0) = 1.0;  // carbon one-hot slot
  wp.at(1, 2) = 1.0;  // oxygen one-hot slot
  Tensor eye(2, 2, 0.0);
  eye.at(0, 0) = 1.0;
  eye.at(1, 1) = 1.0;
  const std::vector<DenseLayer> gcn = {
      {tape.param(eye), tape.param(Tensor(2, 1, 0.0))}};
  const EncodedLocal enc =
      encode_ligand(tape, mol, tape.param(wp), gcn, 290);
  const Tensor& h = tape.value(enc.h);
  const double e = 1.0 / std::sqrt(6.0);
  CHECK(h.at(0, 0) == doctest::Approx(0.5 + e).epsilon(1e-12));
  CHECK(h.at(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(h.at(0, 1) == doctest::Approx(e + 1.0 / 3.0).epsilon(1e-12));
  CHECK(h.at(1, 1) == doctest::Approx(e).epsilon(1e-12));
  CHECK(h.at(0, 2) == doctest::Approx(e).epsilon(1e-12));
  CHECK(h.at(1, 2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("oversize molecules are rejected, never truncated") {
  const Molecule mol = parse_smiles("CCCCCC");
  Tape tape;
  const Var wp = tape.param(Tensor(2, kAtomFeatureDim, 0.01));
  CHECK_THROWS_AS((void)encode_ligand(tape, mol, wp, {}, 5), InputError);
  CHECK_NOTHROW((void)encode_ligand(tape, mol, wp, {}, 6));
}

TEST_CASE("ligand encoding is equivariant to atom reordering") {
  // Same molecule written with different atom orders.
  const Molecule a = parse_smiles("OC(F)Cl");
  const Molecule b = parse_smiles("C(O)(F)Cl");
  Rng rng(21);
  const Tensor wp = random_tensor(rng, 3, kAtomFeatureDim);
  const Tensor wg = random_tensor(rng, 3, 3);
  const Tensor bg = random_tensor(rng, 3, 1);
  const Tensor wk = random_tensor(rng, 2, 3);
  const Tensor bk = random_tensor(rng, 2, 1);

  Tape tape;
  const std::vector<DenseLayer> gcn = {{tape.constant(wg), tape.constant(bg)}};
  const EncodedLocal ea =
      encode_ligand(tape, a, tape.constant(wp), gcn, 290);
  const EncodedLocal eb =
      encode_ligand(tape, b, tape.constant(wp), gcn, 290);
  const Var ga =
      global_project(tape, ea, tape.constant(wk), tape.constant(bk));
  const Var gb =
      global_project(tape, eb, tape.constant(wk), tape.constant(bk));
  CHECK(max_abs_diff(tape.value(ga), tape.value(gb)) < 1e-9);

  // Column multisets must match: atom 0 of `a` is atom 1 of `b`.
  const Tensor& ha = tape.value(ea.h);
  const Tensor& hb = tape.value(eb.h);
  const int perm[4] = {1, 0, 2, 3};
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 3; ++i) {
      CHECK(ha.at(i, j) == doctest::Approx(hb.at(i, perm[j])).epsilon(1e-12));
    }
  }
}

TEST_CASE("ligand padding columns are exact zeros and do not shift results") {
  const Molecule mol = parse_smiles("CC(O)N");
  Rng rng(22);
  Tape tape;
  const Var wp = tape.constant(random_tensor(rng, 3, kAtomFeatureDim));
  const std::vector<DenseLayer> gcn = {
      {tape.constant(random_tensor(rng, 3, 3)),
       tape.constant(random_tensor(rng, 3, 1))}};
  const EncodedLocal tight = encode_ligand(tape, mol, wp, gcn, 290);
  const EncodedLocal wide = encode_ligand(tape, mol, wp, gcn, 290, 7);
  const Tensor& ht = tape.value(tight.h);
  const Tensor& hw = tape.value(wide.h);
  REQUIRE(ht.cols == 4);
  REQUIRE(hw.cols == 7);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(std::fabs(hw.at(i, j) - ht.at(i, j)) < 1e-12);
    }
    for (int j = 4; j < 7; ++j) CHECK(hw.at(i, j) == 0.0);
  }
  const Tensor wk = random_tensor(rng, 2, 3);
  const Tensor bk = random_tensor(rng, 2, 1);
  const Var gt =
      global_project(tape, tight, tape.constant(wk), tape.constant(bk));
  const Var gw =
      global_project(tape, wide, tape.constant(wk), tape.constant(bk));
  CHECK(max_abs_diff(tape.value(gt), tape.value(gw)) < 1e-12);
}

TEST_CASE("global projection rejects all-padding input") {
  Tape tape;
  EncodedLocal enc;
  enc.h = tape.constant(Tensor(2, 3, 1.0));
  enc.mask = Mask{0, 0, 0};
  enc.valid = 0;
  const Var wk = tape.constant(Tensor(2, 2, 0.5));
  const Var bk = tape.constant(Tensor(2, 1, 0.0));
  CHECK_THROWS_AS((void)global_project(tape, enc, wk, bk),
                  DegenerateInputError);
}

TEST_CASE("protein encoder gradients match finite differences") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}) {
    Rng rng(seed);
    const std::vector<Tensor> inputs = {
        random_tensor(rng, 2, kResidueCount),  // residue table
        random_tensor(rng, 3, 2),  random_tensor(rng, 3, 1),
        random_tensor(rng, 2, 3),  random_tensor(rng, 2, 1),
        random_tensor(rng, 2, 2),  random_tensor(rng, 2, 1),
    };
    const double err =
        finite_diff_check(inputs,
                          [](Tape& t, const std::vector<Var>& v) {
                            ProviderBinding provider{v[0], nullptr};
                            const std::vector<DenseLayer> dnn = {
                                {v[1], v[2]}, {v[3], v[4]}};
                            const EncodedLocal enc = encode_protein(
                                t, "p", "ACDEFGH", provider, dnn, 3, 1080, 4);
                            return t.l2_norm(
                                global_project(t, enc, v[5], v[6]));
                          },
                          1e-5);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("ligand encoder gradients match finite differences") {
  const Molecule mol = parse_smiles("CC(O)N");
  for (std::uint64_t seed : {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}) {
    Rng rng(seed + 100);
    const std::vector<Tensor> inputs = {
        random_tensor(rng, 2, kAtomFeatureDim, -0.3, 0.3),
        random_tensor(rng, 2, 2), random_tensor(rng, 2, 1),
        random_tensor(rng, 3, 2), random_tensor(rng, 3, 1),
    };
    const double err = finite_diff_check(
        inputs,
        [&mol](Tape& t, const std::vector<Var>& v) {
          const std::vector<DenseLayer> gcn = {{v[1], v[2]}};
          const EncodedLocal enc = encode_ligand(t, mol, v[0], gcn, 290, 6);
          return t.l2_norm(global_project(t, enc, v[3], v[4]));
        },
        1e-5);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("sequence composition features form normalized blocks") {
  const auto uni = psc_features("AAAA");
  REQUIRE(uni.size() == 552);
  CHECK(uni[0] == doctest::Approx(1.0).epsilon(1e-12));     // 1-mer A
  CHECK(uni[23] == doctest::Approx(1.0).epsilon(1e-12));    // 2-mer AA
  double sum1 = 0.0, sum2 = 0.0;
  for (int i = 0; i < 23; ++i) sum1 += uni[(std::size_t)i];
  for (int i = 23; i < 552; ++i) sum2 += uni[(std::size_t)i];
  CHECK(sum1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sum2 == doctest::Approx(1.0).epsilon(1e-12));

  const auto alt = psc_features("ACAC");
  CHECK(alt[0] == doctest::Approx(0.5).epsilon(1e-12));           // A
  CHECK(alt[1] == doctest::Approx(0.5).epsilon(1e-12));           // C
  CHECK(alt[23 + 0 * 23 + 1] ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));               // AC
  CHECK(alt[23 + 1 * 23 + 0] ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));               // CA

  // A single residue has no 2-mers; the second block stays zero.
  const auto single = psc_features("W");
  CHECK(single[18] == doctest::Approx(1.0).epsilon(1e-12));
  double tail = 0.0;
  for (int i = 23; i < 552; ++i) tail += single[(std::size_t)i];
  CHECK(tail == 0.0);

  CHECK_THROWS_AS((void)psc_features(""), InputError);
}

TEST_CASE("cosine distance behaves on the standard cases") {
  const std::vector<double> x = {1.0, 2.0, 3.0};
  const std::vector<double> y = {2.0, 4.0, 6.0};
  const std::vector<double> z = {-2.0, 1.0, 0.0};
  CHECK(cosine_distance(x, x) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cosine_distance(x, y) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cosine_distance(x, z) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine_distance(psc_features("AAAA"), psc_features("AAAA")) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cosine_distance(psc_features("AAAA"), psc_features("CCCC")) > 0.4);
  CHECK_THROWS_AS((void)cosine_distance(x, {1.0}), DimensionError);
}
