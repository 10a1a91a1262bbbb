// nlofit: Z-scan and pump-probe nonlinear-optics analysis from the command line.
//
// Exit codes: 0 success, 1 fatal error, 2 usage error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nlo/config.hpp"
#include "nlo/constants.hpp"
#include "nlo/errors.hpp"
#include "nlo/report.hpp"
#include "nlo/trace_io.hpp"
#include "nlo/units.hpp"

namespace {

using nlohmann::json;

constexpr int kExitFatal = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlo::AnyTrace read_input(const std::string& path, nlo::TraceKind kind) {
  if (path.empty() || path == "-") return nlo::parse_trace_csv(std::cin, kind);
  return nlo::read_trace_file(path, kind);
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw nlo::IoError("cannot write '" + out_path + "'");
  out << text;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json envelope(std::string_view kind) {
  return {{"schema_version", nlo::kReportSchemaVersion}, {"kind", kind},
          {"toolkit_version", nlo::kToolkitVersion}};
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear-optics coefficient extraction from Z-scan and pump-probe data"};
  app.require_subcommand(1);

  std::string config_path, out_path, plot_dir, format = "json", input_path = "-";
  std::uint64_t seed = 0;

  // simulate-zscan
  auto* sim = app.add_subcommand("simulate-zscan", "Write a synthetic closed-aperture Z-scan trace as CSV");
  double dphi0 = 0, dpsi0 = 0, z0_mm = 0, zc_mm = 0, baseline = 1, zmin_mm = -1, zmax_mm = 1, noise = 0;
  std::size_t points = 40;
  sim->add_option("--dphi0", dphi0, "On-axis nonlinear phase shift (rad)")->required();
  sim->add_option("--dpsi0", dpsi0, "Nonlinear loss parameter")->required();
  sim->add_option("--z0-mm", z0_mm, "Rayleigh length (mm)")->required();
  sim->add_option("--z-center-mm", zc_mm, "Focal-plane offset (mm)");
  sim->add_option("--baseline", baseline, "Far-field normalisation");
  sim->add_option("--z-min-mm", zmin_mm, "First scan position (mm)");
  sim->add_option("--z-max-mm", zmax_mm, "Last scan position (mm)");
  sim->add_option("--points", points, "Number of scan positions")->check(CLI::Range(2, 1000000));
  sim->add_option("--noise", noise, "Relative multiplicative noise")->check(CLI::NonNegativeNumber);
  sim->add_option("--seed", seed, "Noise seed (mt19937_64 + Box-Muller)");
  sim->add_option("--out", out_path, "Output file (default stdout)");

  auto* fz = app.add_subcommand("fit-zscan", "Fit a Z-scan CSV (z_mm,T)");
  fz->add_option("input", input_path, "CSV path or - for stdin");
  fz->add_option("--config", config_path, "Analysis config (enables n2/beta conversion)");
  fz->add_option("--out", out_path, "Output file (default stdout)");
  fz->add_option("--format", format, "Output format")->check(CLI::IsMember({"json"}));

  auto* fp = app.add_subcommand("fit-peak", "Fit the Gaussian transient of a pump-probe CSV (delay_fs,dRoverR)");
  double known_fwhm_fs = 0;
  fp->add_option("input", input_path, "CSV path or - for stdin");
  fp->add_option("--config", config_path, "Analysis config (supplies the pulse width)");
  fp->add_option("--known-fwhm-fs", known_fwhm_fs, "Known width to deconvolve (fs)");
  fp->add_option("--out", out_path, "Output file (default stdout)");
  fp->add_option("--format", format, "Output format")->check(CLI::IsMember({"json"}));

  auto* ff = app.add_subcommand("fit-fluence", "Fit |dR/R| = a I + b I^2 to a fluence series CSV");
  ff->add_option("input", input_path, "CSV path or - for stdin");
  ff->add_option("--config", config_path, "Analysis config")->required();
  ff->add_option("--out", out_path, "Output file (default stdout)");
  ff->add_option("--format", format, "Output format")->check(CLI::IsMember({"json"}));

  auto* an = app.add_subcommand("analyze", "Run every input of a config and write the JSON report");
  an->add_option("--config", config_path, "Analysis config")->required();
  an->add_option("--out", out_path, "Report file (default stdout)");
  an->add_option("--plot-dir", plot_dir, "Directory for TSV plot data");
  an->add_option("--format", format, "Output format")->check(CLI::IsMember({"json"}));

  auto* cs = app.add_subcommand("constants", "Print physical constants and beam diagnostics");
  cs->add_option("--config", config_path, "Analysis config")->required();
  cs->add_option("--out", out_path, "Output file (default stdout)");
  cs->add_option("--format", format, "Output format (text or json)")->check(CLI::IsMember({"json", "text"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  if (cs->parsed() && cs->count("--format") == 0) format = "text";

  try {
    if (sim->parsed()) {
      if (!(zmax_mm > zmin_mm)) throw UsageError("--z-max-mm must exceed --z-min-mm");
      const nlo::ZscanParams params{dphi0, dpsi0, z0_mm * nlo::units::kMillimetre,
                                    zc_mm * nlo::units::kMillimetre, baseline};
      const auto grid = nlo::linspace(zmin_mm * nlo::units::kMillimetre,
                                      zmax_mm * nlo::units::kMillimetre, points);
      const auto trace = nlo::simulate_zscan(params, grid, noise, seed);
      std::ostringstream os;
      os << "# simulated: dphi0=" << dphi0 << " dpsi0=" << dpsi0 << " z0_mm=" << z0_mm
         << " z_center_mm=" << zc_mm << " baseline=" << baseline << " noise=" << noise
         << " seed=" << seed << "\n";
      nlo::write_zscan_csv(os, trace);
      write_output(out_path, os.str());
      return 0;
    }

    std::optional<nlo::AnalysisConfig> config;
    if (!config_path.empty()) config = nlo::load_config(config_path);

    if (fz->parsed()) {
      const auto trace = std::get<nlo::ZscanTrace>(read_input(input_path, nlo::TraceKind::zscan));
      json doc = envelope("zscan");
      if (config) {
        const auto sample = nlo::analyze_zscan(trace, *config);
        const nlo::SampleReport report{{input_path, input_path, nlo::TraceKind::zscan, "input", {}}, sample};
        const auto diag = nlo::compute_diagnostics(config->material, config->beam);
        doc["sample"] = nlo::to_json(report, diag, *config);
        doc["provenance"] = nlo::provenance_json(*config);
      } else {
        doc["zscan"] = nlo::to_json(nlo::fit_zscan(trace));
      }
      write_output(out_path, dump(doc));
      return 0;
    }

    if (fp->parsed()) {
      const auto trace = std::get<nlo::PumpProbeTrace>(read_input(input_path, nlo::TraceKind::pumpprobe));
      const auto peak = nlo::fit_gaussian_peak(trace, config ? config->options.fit : nlo::FitOptions{});
      json doc = envelope("pumpprobe");
      doc["peak"] = nlo::to_json(peak);
      double known = known_fwhm_fs * nlo::units::kFemtosecond;
      if (known <= 0.0 && config) known = config->options.known_fwhm.value_or(config->beam.pulse_fwhm);
      if (known > 0.0) {
        doc["deconvolution"] = {{"known_fwhm_s", known},
                                {"deconvolved_fwhm_s", peak.fwhm > known
                                                           ? json(nlo::deconvolve_fwhm(peak.fwhm, known))
                                                           : json(nullptr)}};
      }
      write_output(out_path, dump(doc));
      return 0;
    }

    if (ff->parsed()) {
      auto series = std::get<nlo::FluenceSeries>(read_input(input_path, nlo::TraceKind::fluence));
      const auto sample = nlo::analyze_fluence(series, *config);
      const nlo::SampleReport report{{input_path, input_path, nlo::TraceKind::fluence, "input", {}}, sample};
      json doc = envelope("fluence");
      doc["sample"] = nlo::to_json(report, nlo::compute_diagnostics(config->material, config->beam), *config);
      doc["provenance"] = nlo::provenance_json(*config);
      write_output(out_path, dump(doc));
      return 0;
    }

    if (an->parsed()) {
      const auto report = nlo::run_analysis(*config);
      write_output(out_path, dump(nlo::to_json(report)));
      if (!plot_dir.empty()) nlo::emit_plot_data(report, plot_dir);
      return 0;
    }

    if (cs->parsed()) {
      const auto diag = nlo::compute_diagnostics(config->material, config->beam);
      if (format == "json") {
        json doc = envelope("constants");
        doc["diagnostics"] = nlo::to_json(diag);
        doc["constants"] = nlo::provenance_json(*config)["constants"];
        write_output(out_path, dump(doc));
        return 0;
      }
      const auto& c = nlo::constants;
      std::ostringstream os;
      os << "c = " << c.c << " m/s\n"
         << "eps0 = " << c.eps0 << " F/m\n"
         << "e = " << c.e_charge << " C\n"
         << "m_e = " << c.m_e << " kg\n"
         << "hbar = " << c.hbar << " J s\n"
         << "w0 = " << fixed(diag.waist * 1e6, 2) << " μm\n"
         << "z0 = " << fixed(diag.rayleigh_length * 1e3, 3) << " mm\n"
         << "L_eff = " << fixed(diag.effective_length * 1e3, 5) << " mm\n"
         << "I0 = " << diag.intensity << " W/m^2\n"
         << "k = " << diag.wave_vector << " 1/m\n"
         << "omega = " << diag.omega << " rad/s\n"
         << "kappa = " << diag.kappa << " m^3/W\n"
         << "dR/R per dn = " << fixed(diag.reflectivity_coefficient, 4) << "\n";
      if (diag.n_at_wavelength) {
        os << "n(lambda) = " << fixed(*diag.n_at_wavelength, 4) << "\n"
           << "n(lambda/2) = " << fixed(*diag.n_at_half_wavelength, 4) << "\n";
      }
      if (diag.coherence_length)
        os << "L_coh = " << fixed(*diag.coherence_length * 1e6, 2) << " μm (reference "
           << fixed(nlo::kReferenceCoherenceLength * 1e6, 0) << " μm)\n";
      else
        os << "L_coh unavailable: " << diag.coherence_length_note << "\n";
      write_output(out_path, os.str());
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitUsage;
}
