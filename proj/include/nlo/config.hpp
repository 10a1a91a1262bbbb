#pragma once

// JSON analysis configuration. Field names mirror the library types; numbers
// are in the laboratory units named by options.units:
//
// {
//   "material": {"label": "diamond", "n0": 2.4, "alpha": 0.1, "length": 0.3,
//                "m_star_ratio": 0.57, "sellmeier": "diamond"},
//   "beam": {"wavelength": 800, "na": 0.06, "pulse_fwhm": 50, "fluence": 20,
//            "profile": "flat-top"},
//   "inputs": [{"path": "row1.csv", "kind": "zscan", "label": "non-implanted"}],
//   "options": {"units": {"length": "mm", "time": "fs", "fluence": "mJ/cm2",
//                         "beta": "cm/GW", "wavelength": "nm", "alpha": "1/cm"},
//               "fit": {"max_iter": 200}, "deconvolve_known_fwhm": 40,
//               "parallel": true}
// }
//
// "sellmeier" is either the string "diamond" (the shipped default) or a list of
// {"B": ..., "lambda": ...} terms with lambda in the wavelength unit.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlo/fit.hpp"
#include "nlo/optics.hpp"
#include "nlo/trace_io.hpp"

namespace nlo {

struct UnitTags {
  std::string length = "mm";
  std::string time = "fs";
  std::string fluence = "mJ/cm2";
  std::string beta = "cm/GW";
  std::string wavelength = "nm";
  std::string alpha = "1/cm";
};

struct InputSpec {
  std::filesystem::path path;  // as written in the config
  std::filesystem::path resolved;
  TraceKind kind = TraceKind::zscan;
  std::string label;
  std::optional<double> fluence;  // J/m^2, overrides beam.fluence for this input
};

struct AnalysisOptions {
  FitOptions fit;
  UnitTags units;
  std::optional<double> known_fwhm;  // s; defaults to beam.pulse_fwhm
  bool parallel = true;
};

struct AnalysisConfig {
  MaterialSpec material;
  BeamSpec beam;
  std::vector<InputSpec> inputs;
  AnalysisOptions options;
  nlohmann::json echo;  // the document as read
};

/// Throws ConfigError naming the offending field.
AnalysisConfig parse_config(const nlohmann::json& doc,
                            const std::filesystem::path& base_dir = {});

/// Relative input paths resolve against the config file's directory.
AnalysisConfig load_config(const std::filesystem::path& path);

}  // namespace nlo
