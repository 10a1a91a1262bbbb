#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nlo/config.hpp"
#include "nlo/pump_probe.hpp"
#include "nlo/zscan.hpp"

namespace nlo {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolkitVersion = "1.0.0";

// Coherence length quoted for diamond at 800 nm, kept for side-by-side
// comparison with the dispersion-derived value.
inline constexpr double kReferenceCoherenceLength = 16e-6;

/// Beam and material quantities shared by every sample of an analysis.
struct Diagnostics {
  double waist = 0.0;
  double rayleigh_length = 0.0;
  double effective_length = 0.0;
  double intensity = 0.0;  // peak intensity at beam.fluence
  double wave_vector = 0.0;
  double omega = 0.0;
  double kappa = 0.0;
  double reflectivity_coefficient = 0.0;
  std::optional<double> n_at_wavelength;
  std::optional<double> n_at_half_wavelength;
  std::optional<double> coherence_length;
  std::string coherence_length_note;
};

Diagnostics compute_diagnostics(const MaterialSpec& material, const BeamSpec& beam);

struct ZscanSample {
  ZscanTrace trace;
  ZscanFitResult fit;
  PeakValley peak_valley;
  double fluence = 0.0;  // J/m^2
  double intensity = 0.0;
  ZscanCoefficients coefficients;
  Chi3 chi3{};
};

struct PumpProbeSample {
  PumpProbeTrace trace;
  PeakFit peak;
  double known_fwhm = 0.0;
  std::optional<double> deconvolved_fwhm;
};

struct FluenceSample {
  FluenceSeries series;  // intensity abscissa
  FluenceFitResult fit;
  std::optional<Chi3> chi3;
};

struct SampleReport {
  InputSpec input;
  std::variant<ZscanSample, PumpProbeSample, FluenceSample> result;
};

struct InputFailure {
  InputSpec input;
  std::string error;
};

struct AnalysisReport {
  AnalysisConfig config;
  Diagnostics diagnostics;
  std::vector<SampleReport> samples;
  std::vector<InputFailure> errors;
  std::string timestamp;  // UTC, ISO 8601
};

ZscanSample analyze_zscan(const ZscanTrace& trace, const AnalysisConfig& config,
                          std::optional<double> fluence = {});
PumpProbeSample analyze_pumpprobe(const PumpProbeTrace& trace, const AnalysisConfig& config);
FluenceSample analyze_fluence(const FluenceSeries& series, const AnalysisConfig& config);

/// Runs every input through its pipeline. Failures of one input are recorded
/// and do not stop the others. Inputs run concurrently when
/// config.options.parallel is set; the report does not depend on it.
AnalysisReport run_analysis(const AnalysisConfig& config);

nlohmann::json to_json(const ZscanFitResult& fit);
nlohmann::json to_json(const PeakFit& peak);
nlohmann::json to_json(const FluenceFitResult& fit);
nlohmann::json to_json(const Diagnostics& diagnostics);
nlohmann::json to_json(const SampleReport& sample, const Diagnostics& diagnostics,
                       const AnalysisConfig& config);
nlohmann::json provenance_json(const AnalysisConfig& config);
nlohmann::json to_json(const AnalysisReport& report);

/// Writes `<sample>_<kind>_data.tsv` and `<sample>_<kind>_fit.tsv` per sample;
/// the fit file samples the model on a grid ten times denser than the data.
/// Returns the written paths.
std::vector<std::filesystem::path> emit_plot_data(const AnalysisReport& report,
                                                  const std::filesystem::path& out_dir);

std::string utc_timestamp();

}  // namespace nlo
