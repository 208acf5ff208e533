#include "kepla/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "kepla/chem.hpp"
#include "kepla/encoders.hpp"
#include "kepla/errors.hpp"
#include "kepla/rng.hpp"

namespace kepla {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

double parse_affinity(const std::string& text, int line_no) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InputError("row " + std::to_string(line_no) +
                     ": affinity '" + text + "' is not a number");
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw InputError("row " + std::to_string(line_no) +
                     ": affinity '" + text + "' is not a finite number");
  }
  return value;
}

std::string format_double(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

}  // namespace

std::vector<ComplexSample> load_complexes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("dataset file is empty (missing header): " + path);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  static const char* kHeader =
      "id\tprotein_id\tsequence\tligand_id\tsmiles\taffinity";
  if (line != kHeader) {
    throw InputError("unexpected dataset header: '" + line + "'");
  }

  std::vector<ComplexSample> out;
  std::set<std::string> seen_ids;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_tabs(line);
    if (f.size() != 6) {
      throw InputError("row " + std::to_string(line_no) + ": expected 6 " +
                       "tab-separated fields, got " + std::to_string(f.size()));
    }
    ComplexSample s;
    s.id = f[0];
    s.protein_id = f[1];
    s.sequence = f[2];
    s.ligand_id = f[3];
    s.smiles = f[4];
    s.affinity = parse_affinity(f[5], line_no);
    if (s.id.empty() || s.protein_id.empty() || s.ligand_id.empty()) {
      throw InputError("row " + std::to_string(line_no) + ": empty id field");
    }
    if (s.sequence.empty()) {
      throw InputError("row " + std::to_string(line_no) + ": empty sequence");
    }
    if (s.smiles.empty()) {
      throw InputError("row " + std::to_string(line_no) + ": empty SMILES");
    }
    if (!seen_ids.insert(s.id).second) {
      throw InputError("duplicate sample id '" + s.id + "' at row " +
                       std::to_string(line_no));
    }
    try {
      (void)parse_smiles(s.smiles);
    } catch (const Error& e) {
      throw InputError("sample '" + s.id + "': unparseable SMILES: " +
                       e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<int> apportion_largest_remainder(const std::vector<double>& ratios,
                                             int n) {
  if (ratios.empty()) throw ContractError("no ratios given");
  double sum = 0.0;
  for (double r : ratios) {
    if (r <= 0.0) throw ContractError("ratios must be positive");
    sum += r;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw ContractError("ratios must sum to 1");
  }
  std::vector<int> sizes(ratios.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double exact = ratios[i] * n;
    sizes[i] = static_cast<int>(std::floor(exact));
    assigned += sizes[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int extra = n - assigned, i = 0; extra > 0; --extra, ++i) {
    sizes[remainders[static_cast<std::size_t>(i)].second] += 1;
  }
  return sizes;
}

DatasetSplit random_split(const std::vector<ComplexSample>& dataset,
                          const std::vector<double>& ratios,
                          std::uint64_t seed) {
  if (dataset.empty()) throw DegenerateInputError("empty dataset");
  if (ratios.empty() || ratios.size() > 3) {
    throw ContractError("random split takes 1 to 3 ratios");
  }
  const int n = static_cast<int>(dataset.size());
  const std::vector<int> sizes = apportion_largest_remainder(ratios, n);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  DatasetSplit split;
  split.protocol = "random";
  split.seed = seed;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    split.params.push_back("ratio" + std::to_string(i) + "=" +
                           format_double(ratios[i]));
  }
  std::vector<int>* sets[3] = {&split.train, &split.val, &split.test};
  int cursor = 0;
  for (std::size_t part = 0; part < sizes.size(); ++part) {
    for (int j = 0; j < sizes[part]; ++j) {
      sets[part]->push_back(order[static_cast<std::size_t>(cursor++)]);
    }
    std::sort(sets[part]->begin(), sets[part]->end());
  }
  return split;
}

ClusterAssignment single_linkage_clusters(
    int count, const std::function<double(int, int)>& distance, double gamma) {
  if (gamma <= 0.0) throw ContractError("distance threshold must be positive");
  if (count < 0) throw ContractError("negative item count");
  // Union-find over the sub-threshold graph.
  std::vector<int> parent(static_cast<std::size_t>(count));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      const double d = distance(i, j);
      if (d < 0.0) throw ContractError("negative pairwise distance");
      if (d < gamma) {
        parent[static_cast<std::size_t>(find(i))] = find(j);
      }
    }
  }
  ClusterAssignment out;
  out.gamma = gamma;
  out.cluster_of.assign(static_cast<std::size_t>(count), -1);
  for (int i = 0; i < count; ++i) {
    const int root = find(i);
    int& label = out.cluster_of[static_cast<std::size_t>(root)];
    if (label < 0) label = out.cluster_count++;  // first member in index order
    out.cluster_of[static_cast<std::size_t>(i)] = label;
  }
  return out;
}

namespace {

// Distinct entities in first-appearance order, with a consistency check
// that one id never carries two different payloads.
struct EntityIndex {
  std::vector<std::string> ids;
  std::vector<std::string> payloads;
  std::map<std::string, int> index;

  int intern(const std::string& id, const std::string& payload,
             const char* what) {
    const auto it = index.find(id);
    if (it != index.end()) {
      if (payloads[static_cast<std::size_t>(it->second)] != payload) {
        throw InputError(std::string(what) + " id '" + id +
                         "' appears with two different definitions");
      }
      return it->second;
    }
    const int slot = static_cast<int>(ids.size());
    ids.push_back(id);
    payloads.push_back(payload);
    index.emplace(id, slot);
    return slot;
  }
};

std::vector<int> pick_clusters(int cluster_count, double fraction, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(cluster_count));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const std::vector<int> sizes =
      apportion_largest_remainder({fraction, 1.0 - fraction}, cluster_count);
  order.resize(static_cast<std::size_t>(sizes[0]));
  return order;
}

}  // namespace

DatasetSplit clustering_pair_split(const std::vector<ComplexSample>& dataset,
                                   double gamma_protein, double gamma_ligand,
                                   double fraction, std::uint64_t seed) {
  if (dataset.empty()) throw DegenerateInputError("empty dataset");
  if (fraction <= 0.0 || fraction >= 1.0) {
    throw ContractError("source fraction must lie in (0, 1)");
  }

  EntityIndex proteins;
  EntityIndex ligands;
  std::vector<int> sample_protein(dataset.size());
  std::vector<int> sample_ligand(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    sample_protein[i] = proteins.intern(dataset[i].protein_id,
                                        dataset[i].sequence, "protein");
    sample_ligand[i] =
        ligands.intern(dataset[i].ligand_id, dataset[i].smiles, "ligand");
  }

  // Protein clusters: cosine distance over sequence-composition features.
  std::vector<std::vector<double>> psc;
  psc.reserve(proteins.ids.size());
  for (const std::string& seq : proteins.payloads) {
    psc.push_back(psc_features(seq));
  }
  const ClusterAssignment protein_clusters = single_linkage_clusters(
      static_cast<int>(psc.size()),
      [&psc](int i, int j) {
        return cosine_distance(psc[static_cast<std::size_t>(i)],
                               psc[static_cast<std::size_t>(j)]);
      },
      gamma_protein);

  // Ligand clusters: Jaccard distance over circular fingerprints.
  std::vector<std::vector<std::uint8_t>> fps;
  fps.reserve(ligands.ids.size());
  for (const std::string& smiles : ligands.payloads) {
    fps.push_back(morgan_fingerprint(parse_smiles(smiles)));
  }
  const ClusterAssignment ligand_clusters = single_linkage_clusters(
      static_cast<int>(fps.size()),
      [&fps](int i, int j) {
        return jaccard_distance(fps[static_cast<std::size_t>(i)],
                                fps[static_cast<std::size_t>(j)]);
      },
      gamma_ligand);

  Rng rng(mix_seed(seed, 0));
  const std::vector<int> sel_p =
      pick_clusters(protein_clusters.cluster_count, fraction, rng);
  const std::vector<int> sel_l =
      pick_clusters(ligand_clusters.cluster_count, fraction, rng);
  std::vector<char> protein_selected(
      static_cast<std::size_t>(protein_clusters.cluster_count), 0);
  for (int c : sel_p) protein_selected[static_cast<std::size_t>(c)] = 1;
  std::vector<char> ligand_selected(
      static_cast<std::size_t>(ligand_clusters.cluster_count), 0);
  for (int c : sel_l) ligand_selected[static_cast<std::size_t>(c)] = 1;

  std::vector<int> source_samples;
  std::vector<int> target_samples;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const bool p_sel = protein_selected[static_cast<std::size_t>(
        protein_clusters.cluster_of[static_cast<std::size_t>(
            sample_protein[i])])] != 0;
    const bool l_sel = ligand_selected[static_cast<std::size_t>(
        ligand_clusters.cluster_of[static_cast<std::size_t>(
            sample_ligand[i])])] != 0;
    if (p_sel && l_sel) {
      source_samples.push_back(static_cast<int>(i));
    } else if (!p_sel && !l_sel) {
      target_samples.push_back(static_cast<int>(i));
    }
    // Pairs mixing a selected and an unselected side are discarded so no
    // cluster can span both domains.
  }
  if (source_samples.empty() || target_samples.empty()) {
    throw ProtocolError(
        "cross-domain split degenerated: " +
        std::to_string(protein_clusters.cluster_count) + " protein / " +
        std::to_string(ligand_clusters.cluster_count) +
        " ligand clusters left " + std::to_string(source_samples.size()) +
        " source and " + std::to_string(target_samples.size()) +
        " target samples");
  }

  // Checked guarantee: no protein or ligand cluster has members in both
  // the source and the target domain.
  bool clean = true;
  {
    std::map<int, int> pc_domain, lc_domain;
    const auto visit = [&](const std::vector<int>& samples, int dom) {
      for (int s : samples) {
        const int pc = protein_clusters.cluster_of[static_cast<std::size_t>(
            sample_protein[static_cast<std::size_t>(s)])];
        const int lc = ligand_clusters.cluster_of[static_cast<std::size_t>(
            sample_ligand[static_cast<std::size_t>(s)])];
        const auto pi = pc_domain.emplace(pc, dom);
        if (!pi.second && pi.first->second != dom) clean = false;
        const auto li = lc_domain.emplace(lc, dom);
        if (!li.second && li.first->second != dom) clean = false;
      }
    };
    visit(source_samples, 0);
    visit(target_samples, 1);
  }

  // 80% of the target domain joins the training pool, 20% is the test set.
  Rng target_rng(mix_seed(seed, 1));
  target_rng.shuffle(target_samples);
  const std::vector<int> target_sizes = apportion_largest_remainder(
      {0.8, 0.2}, static_cast<int>(target_samples.size()));
  std::vector<int> pool(source_samples);
  pool.insert(pool.end(), target_samples.begin(),
              target_samples.begin() + target_sizes[0]);
  std::vector<int> test(target_samples.begin() + target_sizes[0],
                        target_samples.end());

  // The merged pool splits 9:1 into train and validation.
  Rng pool_rng(mix_seed(seed, 2));
  pool_rng.shuffle(pool);
  const std::vector<int> pool_sizes =
      apportion_largest_remainder({0.9, 0.1}, static_cast<int>(pool.size()));

  DatasetSplit split;
  split.protocol = "clustering";
  split.seed = seed;
  split.cross_domain = true;
  split.params = {"gamma_protein=" + format_double(gamma_protein),
                  "gamma_ligand=" + format_double(gamma_ligand),
                  "fraction=" + format_double(fraction)};
  split.train.assign(pool.begin(), pool.begin() + pool_sizes[0]);
  split.val.assign(pool.begin() + pool_sizes[0], pool.end());
  split.test = std::move(test);
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(source_samples.begin(), source_samples.end());
  std::set_intersection(split.train.begin(), split.train.end(),
                        source_samples.begin(), source_samples.end(),
                        std::back_inserter(split.source));

  split.guarantees = {std::string("clusters-single-domain=") +
                      (clean ? "pass" : "FAIL")};
  if (!clean) {
    throw ProtocolError("cross-domain split guarantee violated: a cluster "
                        "spans source and target");
  }
  return split;
}

DatasetSplit cold_pair_split(const std::vector<ComplexSample>& dataset,
                             std::uint64_t seed) {
  if (dataset.empty()) throw DegenerateInputError("empty dataset");

  EntityIndex proteins;
  EntityIndex ligands;
  std::vector<int> sample_protein(dataset.size());
  std::vector<int> sample_ligand(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    sample_protein[i] = proteins.intern(dataset[i].protein_id,
                                        dataset[i].sequence, "protein");
    sample_ligand[i] =
        ligands.intern(dataset[i].ligand_id, dataset[i].smiles, "ligand");
  }

  const auto select = [](int count, Rng& rng) {
    std::vector<int> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    const std::vector<int> sizes =
        apportion_largest_remainder({0.7, 0.3}, count);
    std::vector<char> seen(static_cast<std::size_t>(count), 0);
    for (int i = 0; i < sizes[0]; ++i) {
      seen[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
    }
    return seen;
  };
  Rng protein_rng(mix_seed(seed, 0));
  Rng ligand_rng(mix_seed(seed, 1));
  const std::vector<char> protein_seen =
      select(static_cast<int>(proteins.ids.size()), protein_rng);
  const std::vector<char> ligand_seen =
      select(static_cast<int>(ligands.ids.size()), ligand_rng);

  DatasetSplit split;
  split.protocol = "cold";
  split.seed = seed;
  std::vector<int> unseen_pairs;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const bool p = protein_seen[static_cast<std::size_t>(sample_protein[i])] != 0;
    const bool l = ligand_seen[static_cast<std::size_t>(sample_ligand[i])] != 0;
    if (p && l) {
      split.train.push_back(static_cast<int>(i));
    } else if (!p && !l) {
      unseen_pairs.push_back(static_cast<int>(i));
    }
    // Mixed seen/unseen pairs are discarded.
  }
  Rng pair_rng(mix_seed(seed, 2));
  pair_rng.shuffle(unseen_pairs);
  const std::vector<int> sizes = apportion_largest_remainder(
      {0.3, 0.7}, static_cast<int>(unseen_pairs.size()));
  split.val.assign(unseen_pairs.begin(), unseen_pairs.begin() + sizes[0]);
  split.test.assign(unseen_pairs.begin() + sizes[0], unseen_pairs.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());

  if (split.test.empty()) {
    throw ProtocolError("cold split produced an empty test set (" +
                        std::to_string(proteins.ids.size()) + " proteins, " +
                        std::to_string(ligands.ids.size()) + " ligands)");
  }

  // Checked guarantee: train and test share no protein or ligand ids.
  std::set<int> train_p, train_l;
  for (int s : split.train) {
    train_p.insert(sample_protein[static_cast<std::size_t>(s)]);
    train_l.insert(sample_ligand[static_cast<std::size_t>(s)]);
  }
  bool clean = true;
  for (int s : split.test) {
    if (train_p.count(sample_protein[static_cast<std::size_t>(s)]) != 0 ||
        train_l.count(sample_ligand[static_cast<std::size_t>(s)]) != 0) {
      clean = false;
    }
  }
  split.guarantees = {std::string("cold-train-test-disjoint=") +
                      (clean ? "pass" : "FAIL")};
  if (!clean) {
    throw ProtocolError("cold split guarantee violated: an entity spans "
                        "train and test");
  }
  return split;
}

void write_split_manifest(const std::string& path,
                          const std::vector<ComplexSample>& dataset,
                          const DatasetSplit& split) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write split manifest: " + path);
  out << "# protocol=" << split.protocol << " seed=" << split.seed;
  for (const std::string& p : split.params) out << " " << p;
  out << "\n";
  for (const std::string& g : split.guarantees) {
    out << "# guarantee " << g << "\n";
  }
  std::vector<std::string> label_of(dataset.size());
  const std::set<int> source_set(split.source.begin(), split.source.end());
  for (int s : split.train) {
    label_of[static_cast<std::size_t>(s)] =
        (split.cross_domain && source_set.count(s) != 0) ? "source" : "train";
  }
  for (int s : split.val) label_of[static_cast<std::size_t>(s)] = "val";
  for (int s : split.test) {
    label_of[static_cast<std::size_t>(s)] =
        split.cross_domain ? "target_test" : "test";
  }
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!label_of[i].empty()) {
      out << dataset[i].id << "\t" << label_of[i] << "\n";
    }
  }
}

DatasetSplit read_split_manifest(const std::string& path,
                                 const std::vector<ComplexSample>& dataset) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split manifest: " + path);
  std::map<std::string, int> by_id;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_id.emplace(dataset[i].id, static_cast<int>(i));
  }
  DatasetSplit split;
  std::set<int> assigned;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream header(line.substr(1));
      std::string token;
      while (header >> token) {
        if (token.rfind("protocol=", 0) == 0) {
          split.protocol = token.substr(9);
        } else if (token.rfind("seed=", 0) == 0) {
          split.seed = std::stoull(token.substr(5));
        } else if (token == "guarantee") {
          header >> token;
          split.guarantees.push_back(token);
        } else {
          split.params.push_back(token);
        }
      }
      continue;
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw InputError("malformed manifest line " + std::to_string(line_no));
    }
    const std::string id = line.substr(0, tab);
    const std::string label = line.substr(tab + 1);
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw LookupError("manifest names unknown sample '" + id + "' (line " +
                        std::to_string(line_no) + ")");
    }
    if (!assigned.insert(it->second).second) {
      throw InputError("sample '" + id + "' assigned twice (line " +
                       std::to_string(line_no) + ")");
    }
    if (label == "train") {
      split.train.push_back(it->second);
    } else if (label == "source") {
      split.train.push_back(it->second);
      split.source.push_back(it->second);
      split.cross_domain = true;
    } else if (label == "val") {
      split.val.push_back(it->second);
    } else if (label == "test") {
      split.test.push_back(it->second);
    } else if (label == "target_test") {
      split.test.push_back(it->second);
      split.cross_domain = true;
    } else {
      throw InputError("unknown split label '" + label + "' (line " +
                       std::to_string(line_no) + ")");
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.source.begin(), split.source.end());
  return split;
}

}  // namespace kepla
