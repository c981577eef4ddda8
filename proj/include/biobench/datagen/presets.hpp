#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "biobench/core/error.hpp"
#include "biobench/core/rng.hpp"
#include "biobench/datagen/generate.hpp"

namespace biobench::datagen {

enum class PresetFamily { syn1, syn2, syn3, syn4, syn5 };
enum class Variant { base, widespread, localized, noise, subtle };

// A named benchmark dataset, e.g. "syn1" or "syn3-widespread-k2-equal".
struct PresetId {
  PresetFamily family = PresetFamily::syn1;
  Variant variant = Variant::base;
  int k = 3;
  bool equal = true;

  static constexpr std::string_view family_name(PresetFamily f) {
    constexpr std::string_view names[] = {"syn1", "syn2", "syn3", "syn4", "syn5"};
    return names[static_cast<int>(f)];
  }
  static constexpr std::string_view variant_name(Variant v) {
    constexpr std::string_view names[] = {"base", "widespread", "localized", "noise", "subtle"};
    return names[static_cast<int>(v)];
  }

  bool is_morphometric() const { return family != PresetFamily::syn1 && family != PresetFamily::syn2; }

  std::string family_str() const { return std::string(family_name(family)); }

  // Variant column of reports: "widespread-equal", or "base" for syn1/syn2.
  std::string variant_str() const {
    if (!is_morphometric()) return "base";
    return std::string(variant_name(variant)) + (equal ? "-equal" : "-unequal");
  }

  std::string name() const {
    if (!is_morphometric()) return family_str();
    std::ostringstream os;
    os << family_name(family) << '-' << variant_name(variant) << "-k" << k << '-' << (equal ? "equal" : "unequal");
    return os.str();
  }

  static PresetId make(std::string_view family, std::string_view variant = "widespread", int k = 3, bool equal = true) {
    PresetId id;
    bool found = false;
    for (int f = 0; f < 5; ++f)
      if (family == family_name(static_cast<PresetFamily>(f))) {
        id.family = static_cast<PresetFamily>(f);
        found = true;
      }
    if (!found) throw ConfigError("unknown preset '" + std::string(family) + "'");
    if (!id.is_morphometric()) return id;
    found = false;
    for (int v = 1; v < 5; ++v)
      if (variant == variant_name(static_cast<Variant>(v))) {
        id.variant = static_cast<Variant>(v);
        found = true;
      }
    if (!found) throw ConfigError("unknown variant '" + std::string(variant) + "'");
    if (k < 2 || k > 6) throw ConfigError("preset cluster count must be 2..6");
    id.k = k;
    id.equal = equal;
    return id;
  }

  static PresetId parse(std::string_view text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
      if (ch == '-' || ch == '/') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    parts.push_back(cur);
    if (parts.size() == 1) {
      PresetId id = make(parts[0]);
      if (id.is_morphometric()) throw ConfigError("preset '" + std::string(text) + "' needs variant, K and balance");
      return id;
    }
    if (parts.size() != 4) throw ConfigError("unknown preset '" + std::string(text) + "'");
    const std::string& ks = parts[2];
    if (ks.size() != 2 || (ks[0] != 'k' && ks[0] != 'K') || ks[1] < '0' || ks[1] > '9')
      throw ConfigError("bad cluster count in preset '" + std::string(text) + "'");
    if (parts[3] != "equal" && parts[3] != "unequal")
      throw ConfigError("balance must be 'equal' or 'unequal' in preset '" + std::string(text) + "'");
    return make(parts[0], parts[1], ks[1] - '0', parts[3] == "equal");
  }

  friend bool operator==(const PresetId&, const PresetId&) = default;
};

// Generation parameters behind a preset.
inline SynthConfig preset_config(const PresetId& id, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = derive_seed(seed, stream::plant);
  switch (id.family) {
    case PresetFamily::syn1:
    case PresetFamily::syn2:
      // Three equal clusters with disjoint 25-variable reductions of
      // 20% +/- Normal(0, 0.02): severity fixed at 1, alpha 0.2, sigma 0.1.
      cfg.n_controls = 600;
      cfg.n_patients = id.family == PresetFamily::syn1 ? 600 : 900;
      cfg.n_variables = id.family == PresetFamily::syn1 ? 145 : 100;
      cfg.n_clusters = 3;
      cfg.cluster_sizes = cluster_sizes(cfg.n_patients, 3, true);
      cfg.direction_mode = Direction::decrease;
      cfg.sigma = 0.1;
      cfg.alpha = 0.2;
      cfg.vars_per_cluster = 25;
      cfg.overlap_count = 0;
      cfg.reference_profile = ReferenceProfile::unit_normal;
      cfg.severity_mode = SeverityMode::fixed;
      return cfg;
    default:
      break;
  }

  cfg.n_controls = 508;
  cfg.n_patients = 600;
  cfg.n_variables = 150;
  cfg.n_clusters = id.k;
  cfg.cluster_sizes = cluster_sizes(600, id.k, id.equal);
  cfg.reference_profile = ReferenceProfile::surrogate_morphometry;
  cfg.direction_mode = id.family == PresetFamily::syn3   ? Direction::increase
                       : id.family == PresetFamily::syn4 ? Direction::decrease
                                                         : Direction::mixed;
  cfg.sigma = 0.05;
  cfg.alpha = 0.3;
  cfg.vars_per_cluster = 21;
  cfg.overlap_count = 6;
  switch (id.variant) {
    case Variant::localized:
      cfg.vars_per_cluster = 6;
      cfg.overlap_count = 0;
      break;
    case Variant::noise: cfg.sigma = 0.2; break;
    case Variant::subtle: cfg.alpha = 0.2; break;
    default: break;
  }
  return cfg;
}

inline LabeledDataset make_preset(const PresetId& id, std::uint64_t seed) {
  const SynthConfig cfg = preset_config(id, seed);
  const int total = cfg.n_controls + cfg.n_patients;
  const CohortMatrix reference = generate_reference(cfg.reference_profile, total, cfg.n_variables, seed);

  std::vector<int> control_idx(cfg.n_controls), patient_idx(cfg.n_patients);
  std::iota(control_idx.begin(), control_idx.end(), 0);
  std::iota(patient_idx.begin(), patient_idx.end(), cfg.n_controls);

  LabeledDataset ds = assemble(reference.subset(control_idx), plant_clusters(reference.subset(patient_idx), cfg));
  ds.provenance.preset = id.name();
  ds.provenance.config = cfg;
  if (!id.is_morphometric())
    ds.provenance.note = "approximation: disjoint 25-variable clusters with 20% +/- 2% multiplicative reductions";
  return ds;
}

inline LabeledDataset make_preset(std::string_view name, std::uint64_t seed) {
  return make_preset(PresetId::parse(name), seed);
}

} // namespace biobench::datagen
