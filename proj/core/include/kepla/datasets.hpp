#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace kepla {

// One protein-ligand complex with its measured affinity in pK units.
struct ComplexSample {
  std::string id;
  std::string protein_id;
  std::string sequence;
  std::string ligand_id;
  std::string smiles;
  double affinity = 0.0;
};

// TSV loader. Header must be exactly
// `id<TAB>protein_id<TAB>sequence<TAB>ligand_id<TAB>smiles<TAB>affinity`.
// Rows are validated eagerly: finite affinity, non-empty fields,
// parseable SMILES, unique sample ids.
std::vector<ComplexSample> load_complexes(const std::string& path);

// Named index sets over a dataset. For the cross-domain protocol, `source`
// annotates which train members came from the source domain and `test`
// holds the target-domain test samples.
struct DatasetSplit {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
  std::vector<int> source;
  bool cross_domain = false;
  std::string protocol;
  std::uint64_t seed = 0;
  std::vector<std::string> params;      // header tokens, e.g. "ratio=0.9"
  std::vector<std::string> guarantees;  // header tokens, e.g. "cold-disjoint=pass"
};

// Largest-remainder apportionment of n items over the given positive
// ratios (which must sum to 1): sizes within +-1 of exact proportion,
// ties broken toward earlier ratios.
std::vector<int> apportion_largest_remainder(const std::vector<double>& ratios,
                                             int n);

// Uniform shuffle + apportionment over 1-3 ratios (train[, val[, test]]).
DatasetSplit random_split(const std::vector<ComplexSample>& dataset,
                          const std::vector<double>& ratios,
                          std::uint64_t seed);

// Partition {0..count-1} into connected components of the graph with an
// edge wherever distance(i, j) < gamma (single-linkage cut at height
// gamma). Cluster ids are dense from 0 in order of first occurrence.
struct ClusterAssignment {
  std::vector<int> cluster_of;
  int cluster_count = 0;
  double gamma = 0.0;
};

ClusterAssignment single_linkage_clusters(
    int count, const std::function<double(int, int)>& distance, double gamma);

// Cross-domain split: proteins clustered by cosine distance over sequence
// composition, ligands by Jaccard distance over fingerprints; a fraction
// of each cluster set forms the source domain (pairs with BOTH sides
// selected), pairs with NEITHER side selected form the target domain, and
// mixed pairs are discarded so no cluster spans domains. Target splits
// 80/20 into a train portion (merged 9:1 with source into train/val) and
// the target test set.
DatasetSplit clustering_pair_split(const std::vector<ComplexSample>& dataset,
                                   double gamma_protein = 0.001,
                                   double gamma_ligand = 0.5,
                                   double fraction = 0.6,
                                   std::uint64_t seed = 0);

// Cold-pair split: 70% of protein ids and 70% of ligand ids are "seen";
// both-seen pairs train, both-unseen pairs split 3:7 into validation and
// test, mixed pairs are discarded.
DatasetSplit cold_pair_split(const std::vector<ComplexSample>& dataset,
                             std::uint64_t seed);

// Text manifest: `# ...` header lines (protocol, seed, parameters,
// guarantee results) followed by one `sample_id<TAB>label` line per
// assigned sample, labels from {train, val, test, source, target_test}.
void write_split_manifest(const std::string& path,
                          const std::vector<ComplexSample>& dataset,
                          const DatasetSplit& split);
DatasetSplit read_split_manifest(const std::string& path,
                                 const std::vector<ComplexSample>& dataset);

}  // namespace kepla
