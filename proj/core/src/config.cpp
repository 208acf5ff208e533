#include "kepla/config.hpp"

#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "kepla/errors.hpp"

namespace kepla {

namespace {

std::string trim(const std::string& s) {
  const std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            int line) {
  throw InputError("bad value '" + value + "' for config key '" + key +
                   "' (line " + std::to_string(line) + ")");
}

int parse_int(const std::string& key, const std::string& value, int line) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value, line);
  }
  if (used != value.size() || x < INT_MIN || x > INT_MAX) {
    bad_value(key, value, line);
  }
  return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value,
                        int line) {
  std::size_t used = 0;
  std::uint64_t x = 0;
  try {
    x = std::stoull(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value, line);
  }
  if (used != value.size() || value.empty() || value[0] == '-') {
    bad_value(key, value, line);
  }
  return x;
}

double parse_double(const std::string& key, const std::string& value,
                    int line) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value, line);
  }
  if (used != value.size() || !std::isfinite(x)) bad_value(key, value, line);
  return x;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

const char* to_string(KgMode mode) {
  switch (mode) {
    case KgMode::kFull: return "full";
    case KgMode::kProteinOnly: return "protein-only";
    case KgMode::kLigandOnly: return "ligand-only";
    case KgMode::kOff: return "off";
  }
  throw ContractError("unhandled kg mode");
}

const char* to_string(ProviderMode mode) {
  switch (mode) {
    case ProviderMode::kTrainable: return "trainable";
    case ProviderMode::kFile: return "file";
  }
  throw ContractError("unhandled provider mode");
}

const char* to_string(FusionKind kind) {
  switch (kind) {
    case FusionKind::kCross: return "cross";
    case FusionKind::kProteinAttention: return "protein-attn";
    case FusionKind::kLigandAttention: return "ligand-attn";
    case FusionKind::kConcat: return "concat";
  }
  throw ContractError("unhandled fusion kind");
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("expected `key = value` (line " +
                       std::to_string(line_no) + ")");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw InputError("empty config key (line " + std::to_string(line_no) +
                       ")");
    }
    if (!seen.insert(key).second) {
      throw InputError("duplicate config key '" + key + "' (line " +
                       std::to_string(line_no) + ")");
    }

    if (key == "d") {
      config.d = parse_int(key, value, line_no);
    } else if (key == "s") {
      config.s = parse_int(key, value, line_no);
    } else if (key == "k_max") {
      config.k_max = parse_int(key, value, line_no);
    } else if (key == "n_max") {
      config.n_max = parse_int(key, value, line_no);
    } else if (key == "beta") {
      config.beta = parse_double(key, value, line_no);
    } else if (key == "lambda") {
      config.lambda = parse_double(key, value, line_no);
    } else if (key == "lr") {
      config.lr = parse_double(key, value, line_no);
    } else if (key == "batch_size") {
      config.batch_size = parse_int(key, value, line_no);
    } else if (key == "max_epochs") {
      config.max_epochs = parse_int(key, value, line_no);
    } else if (key == "seed") {
      config.seed = parse_u64(key, value, line_no);
    } else if (key == "provider") {
      if (value == "trainable") {
        config.provider = ProviderMode::kTrainable;
      } else if (value == "file") {
        config.provider = ProviderMode::kFile;
      } else {
        bad_value(key, value, line_no);
      }
    } else if (key == "provider_path") {
      config.provider_path = value;
    } else if (key == "kg") {
      if (value == "full") {
        config.kg = KgMode::kFull;
      } else if (value == "protein-only") {
        config.kg = KgMode::kProteinOnly;
      } else if (value == "ligand-only") {
        config.kg = KgMode::kLigandOnly;
      } else if (value == "off") {
        config.kg = KgMode::kOff;
      } else {
        bad_value(key, value, line_no);
      }
    } else if (key == "fusion") {
      if (value == "cross") {
        config.fusion = FusionKind::kCross;
      } else if (value == "protein-attn") {
        config.fusion = FusionKind::kProteinAttention;
      } else if (value == "ligand-attn") {
        config.fusion = FusionKind::kLigandAttention;
      } else if (value == "concat") {
        config.fusion = FusionKind::kConcat;
      } else {
        bad_value(key, value, line_no);
      }
    } else {
      throw InputError("unknown config key '" + key + "' (line " +
                       std::to_string(line_no) + ")");
    }
  }
  validate_run_config(config);
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

std::string serialize_run_config(const RunConfig& config) {
  std::ostringstream out;
  out << "d = " << config.d << "\n";
  out << "s = " << config.s << "\n";
  out << "k_max = " << config.k_max << "\n";
  out << "n_max = " << config.n_max << "\n";
  out << "beta = " << num(config.beta) << "\n";
  out << "lambda = " << num(config.lambda) << "\n";
  out << "lr = " << num(config.lr) << "\n";
  out << "batch_size = " << config.batch_size << "\n";
  out << "max_epochs = " << config.max_epochs << "\n";
  out << "seed = " << config.seed << "\n";
  out << "provider = " << to_string(config.provider) << "\n";
  out << "provider_path = " << config.provider_path << "\n";
  out << "kg = " << to_string(config.kg) << "\n";
  out << "fusion = " << to_string(config.fusion) << "\n";
  return out.str();
}

void validate_run_config(const RunConfig& config) {
  const auto positive = [](int x, const char* name) {
    if (x <= 0) {
      throw ContractError(std::string("config field ") + name +
                          " must be positive");
    }
  };
  positive(config.d, "d");
  positive(config.s, "s");
  positive(config.k_max, "k_max");
  positive(config.n_max, "n_max");
  positive(config.batch_size, "batch_size");
  positive(config.max_epochs, "max_epochs");
  if (config.k_max < config.s) {
    throw ContractError("k_max must be at least the pooling window s");
  }
  if (config.beta < 0.0) throw ContractError("beta must be nonnegative");
  if (config.lambda < 0.0) throw ContractError("lambda must be nonnegative");
  if (config.lr <= 0.0) throw ContractError("lr must be positive");
  if (config.provider == ProviderMode::kFile && config.provider_path.empty()) {
    throw ContractError("provider = file requires provider_path");
  }
}

}  // namespace kepla
