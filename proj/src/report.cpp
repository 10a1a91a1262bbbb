#include "nlo/report.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <set>

#include "nlo/constants.hpp"
#include "nlo/errors.hpp"
#include "nlo/kernels.hpp"
#include "nlo/units.hpp"

namespace nlo {

namespace {

using nlohmann::json;

json value_sigma(double value, double sigma) { return {{"value", value}, {"sigma", sigma}}; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

bool is_diamond_default(const std::vector<SellmeierTerm>& terms) {
  const auto ref = diamond_sellmeier();
  if (terms.size() != ref.size()) return false;
  for (std::size_t i = 0; i < ref.size(); ++i)
    if (terms[i].strength != ref[i].strength ||
        terms[i].resonance_wavelength != ref[i].resonance_wavelength)
      return false;
  return true;
}

json input_json(const InputSpec& in) {
  return {{"path", in.path.generic_string()}, {"kind", to_string(in.kind)}, {"label", in.label}};
}

std::string file_stem(const std::string& label) {
  std::string out;
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "sample" : out;
}

}  // namespace

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Diagnostics compute_diagnostics(const MaterialSpec& material, const BeamSpec& beam) {
  Diagnostics d;
  d.waist = beam_waist(beam);
  d.rayleigh_length = rayleigh_length(d.waist, beam.wavelength);
  d.effective_length = effective_length(material.alpha, material.length);
  d.intensity = peak_intensity(beam.fluence, beam.pulse_fwhm, beam.profile);
  d.wave_vector = vacuum_wave_vector(beam.wavelength);
  d.omega = angular_frequency(beam.wavelength);
  d.kappa = kappa_coefficient(d.omega, beam.pulse_fwhm, material.n0, material.m_star_ratio);
  d.reflectivity_coefficient = reflectivity_coefficient(material.n0);
  if (material.sellmeier.empty()) {
    d.coherence_length_note = "no Sellmeier terms configured; dispersion unavailable";
    return d;
  }
  try {
    d.n_at_wavelength = refractive_index(material, beam.wavelength);
    d.n_at_half_wavelength = refractive_index(material, 0.5 * beam.wavelength);
    d.coherence_length = coherence_length_shg(material, beam.wavelength);
    d.coherence_length_note = "pi / dk with dk = (4 pi / lambda)(n(lambda/2) - n(lambda))";
  } catch (const Error& e) {
    d.coherence_length_note = e.what();
  }
  return d;
}

ZscanSample analyze_zscan(const ZscanTrace& trace, const AnalysisConfig& config,
                          std::optional<double> fluence) {
  ZscanSample s;
  s.trace = trace;
  s.fit = fit_zscan(trace, std::nullopt, config.options.fit);
  s.peak_valley = peak_valley_metrics(s.fit.params);
  const auto& beam = config.beam;
  s.fluence = fluence.value_or(beam.fluence);
  s.intensity = peak_intensity(s.fluence, beam.pulse_fwhm, beam.profile);
  const double k = vacuum_wave_vector(beam.wavelength);
  const double l_eff = effective_length(config.material.alpha, config.material.length);
  s.coefficients = nlo_coefficients_from_zscan(s.fit, s.intensity, l_eff, k);
  s.chi3 = chi3_from_coefficients(config.material.n0, s.coefficients.n2, s.coefficients.beta, k);
  return s;
}

PumpProbeSample analyze_pumpprobe(const PumpProbeTrace& trace, const AnalysisConfig& config) {
  PumpProbeSample s;
  s.trace = trace;
  s.peak = fit_gaussian_peak(trace, config.options.fit);
  s.known_fwhm = config.options.known_fwhm.value_or(config.beam.pulse_fwhm);
  if (s.peak.fwhm > s.known_fwhm) s.deconvolved_fwhm = deconvolve_fwhm(s.peak.fwhm, s.known_fwhm);
  return s;
}

FluenceSample analyze_fluence(const FluenceSeries& series, const AnalysisConfig& config) {
  FluenceSample s;
  s.series = to_intensity_series(series, config.beam.pulse_fwhm, config.beam.profile);
  s.fit = fit_fluence_series(s.series);
  const double omega = angular_frequency(config.beam.wavelength);
  const double kappa = kappa_coefficient(omega, config.beam.pulse_fwhm, config.material.n0,
                                         config.material.m_star_ratio);
  s.fit.derived = nlo_coefficients_from_fluence(s.fit, config.material.n0, kappa);
  s.chi3 = chi3_from_coefficients(config.material.n0, s.fit.derived->n2, s.fit.derived->beta,
                                  vacuum_wave_vector(config.beam.wavelength));
  return s;
}

AnalysisReport run_analysis(const AnalysisConfig& config) {
  AnalysisReport report;
  report.config = config;
  report.timestamp = utc_timestamp();
  report.diagnostics = compute_diagnostics(config.material, config.beam);

  using Outcome = std::variant<SampleReport, InputFailure>;
  const auto exec = config.options.parallel ? kernels::Execution::parallel : kernels::Execution::serial;
  const auto outcomes = kernels::parallel_map(config.inputs.size(), exec, [&](std::size_t i) -> Outcome {
    const InputSpec& in = config.inputs[i];
    try {
      AnyTrace trace = read_trace_file(in.resolved, in.kind);
      if (auto* z = std::get_if<ZscanTrace>(&trace)) {
        z->meta.label = in.label;
        z->meta.fluence = in.fluence.value_or(config.beam.fluence);
        z->meta.wavelength = config.beam.wavelength;
        return SampleReport{in, analyze_zscan(*z, config, in.fluence)};
      }
      if (auto* p = std::get_if<PumpProbeTrace>(&trace)) {
        p->meta.label = in.label;
        p->meta.pump_fluence = in.fluence.value_or(config.beam.fluence);
        return SampleReport{in, analyze_pumpprobe(*p, config)};
      }
      auto& f = std::get<FluenceSeries>(trace);
      f.label = in.label;
      return SampleReport{in, analyze_fluence(f, config)};
    } catch (const std::exception& e) {
      return InputFailure{in, e.what()};
    }
  });
  for (const auto& o : outcomes) {
    if (const auto* s = std::get_if<SampleReport>(&o))
      report.samples.push_back(*s);
    else
      report.errors.push_back(std::get<InputFailure>(o));
  }
  return report;
}

json to_json(const ZscanFitResult& fit) {
  return {{"dphi0", value_sigma(fit.params.dphi0, fit.sigma.dphi0)},
          {"dpsi0", value_sigma(fit.params.dpsi0, fit.sigma.dpsi0)},
          {"z0_m", value_sigma(fit.params.z0, fit.sigma.z0)},
          {"z0_mm", value_sigma(fit.params.z0 / units::kMillimetre, fit.sigma.z0 / units::kMillimetre)},
          {"z_center_m", value_sigma(fit.params.z_center, fit.sigma.z_center)},
          {"baseline", value_sigma(fit.params.baseline, fit.sigma.baseline)},
          {"residual_norm", fit.residual_norm},
          {"iterations", fit.iterations},
          {"converged", fit.converged},
          {"condition", to_string(fit.condition)},
          {"warnings", fit.warnings}};
}

json to_json(const PeakFit& peak) {
  return {{"amplitude", value_sigma(peak.amplitude, peak.sigma_amplitude)},
          {"t0_s", value_sigma(peak.t0, peak.sigma_t0)},
          {"fwhm_s", value_sigma(peak.fwhm, peak.sigma_fwhm)},
          {"fwhm_fs", value_sigma(peak.fwhm / units::kFemtosecond, peak.sigma_fwhm / units::kFemtosecond)},
          {"baseline", value_sigma(peak.baseline, peak.sigma_baseline)},
          {"residual_norm", peak.residual_norm},
          {"converged", peak.converged}};
}

json to_json(const FluenceFitResult& fit) {
  json out = {{"a_m2_per_W", value_sigma(fit.a, fit.sigma_a)},
              {"b_m4_per_W2", value_sigma(fit.b, fit.sigma_b)},
              {"covariance_ab", fit.covariance_ab},
              {"residual_norm", fit.residual_norm},
              {"converged", fit.converged}};
  if (fit.derived) {
    const auto& d = *fit.derived;
    out["derived"] = {{"n2_m2_per_W", value_sigma(d.n2, d.sigma_n2)},
                      {"n2_abs_m2_per_W", value_sigma(d.n2_abs, d.sigma_n2)},
                      {"beta_m_per_W", value_sigma(d.beta, d.sigma_beta)},
                      {"kappa_used_m3_per_W", d.kappa_used}};
  }
  return out;
}

json to_json(const Diagnostics& d) {
  return {{"waist_m", d.waist},
          {"rayleigh_length_m", d.rayleigh_length},
          {"effective_length_m", d.effective_length},
          {"implied_intensity_W_m2", d.intensity},
          {"wave_vector_per_m", d.wave_vector},
          {"omega_rad_per_s", d.omega},
          {"kappa_m3_per_W", d.kappa},
          {"reflectivity_coefficient", d.reflectivity_coefficient},
          {"n_at_wavelength", optional_json(d.n_at_wavelength)},
          {"n_at_half_wavelength", optional_json(d.n_at_half_wavelength)},
          {"coherence_length_m", optional_json(d.coherence_length)},
          {"coherence_length_reference_m", kReferenceCoherenceLength},
          {"coherence_length_note", d.coherence_length_note}};
}

json to_json(const SampleReport& sample, const Diagnostics& diag, const AnalysisConfig& config) {
  const auto& u = config.options.units;
  const double beta_lab = units::beta_factor(u.beta);
  json out = {{"label", sample.input.label},
              {"kind", to_string(sample.input.kind)},
              {"input", input_json(sample.input)}};
  if (const auto* z = std::get_if<ZscanSample>(&sample.result)) {
    const auto& pv = z->peak_valley;
    out["zscan"] = to_json(z->fit);
    out["peak_valley"] = {{"t_peak", pv.t_peak},
                          {"t_valley", pv.t_valley},
                          {"dT_pv", pv.dT_pv},
                          {"z_peak_m", optional_json(pv.z_peak)},
                          {"z_valley_m", pv.z_valley},
                          {"dz_pv_m", optional_json(pv.dz_pv)}};
    const auto& c = z->coefficients;
    out["coefficients"] = {
        {"fluence_J_m2", z->fluence},
        {"fluence_lab", {{"unit", u.fluence}, {"value", z->fluence / units::fluence_factor(u.fluence)}}},
        {"intensity_W_m2", z->intensity},
        {"n2_m2_per_W", value_sigma(c.n2, c.sigma_n2)},
        {"beta_m_per_W", value_sigma(c.beta, c.sigma_beta)},
        {"beta_lab", {{"unit", u.beta}, {"value", c.beta / beta_lab}, {"sigma", c.sigma_beta / beta_lab}}},
        {"derived_from",
         {{"input", sample.input.path.generic_string()},
          {"operations", {"fit_zscan", "peak_intensity", "effective_length", "nlo_coefficients_from_zscan"}},
          {"effective_length_m", diag.effective_length},
          {"wave_vector_per_m", diag.wave_vector}}}};
    out["chi3"] = {{"re", z->chi3.re}, {"im", z->chi3.im}, {"unit", "m^2/V^2"},
                   {"derived_from", {"n2_m2_per_W", "beta_m_per_W", "material.n0", "wave_vector_per_m"}}};
  } else if (const auto* p = std::get_if<PumpProbeSample>(&sample.result)) {
    out["peak"] = to_json(p->peak);
    out["deconvolution"] = {{"known_fwhm_s", p->known_fwhm},
                            {"deconvolved_fwhm_s", optional_json(p->deconvolved_fwhm)},
                            {"derived_from", {{"input", sample.input.path.generic_string()},
                                              {"operations", {"fit_gaussian_peak", "deconvolve_fwhm"}}}}};
  } else {
    const auto& f = std::get<FluenceSample>(sample.result);
    out["fluence"] = to_json(f.fit);
    if (f.fit.derived) {
      const auto& d = *f.fit.derived;
      out["fluence"]["derived"]["beta_lab"] = {
          {"unit", u.beta}, {"value", d.beta / beta_lab}, {"sigma", d.sigma_beta / beta_lab}};
      out["fluence"]["derived"]["derived_from"] = {
          {"input", sample.input.path.generic_string()},
          {"operations", {"to_intensity_series", "fit_fluence_series", "kappa_coefficient",
                          "nlo_coefficients_from_fluence"}},
          {"m_star_ratio", config.material.m_star_ratio},
          {"pulse_fwhm_s", config.beam.pulse_fwhm}};
    }
    if (f.chi3) out["chi3"] = {{"re", f.chi3->re}, {"im", f.chi3->im}, {"unit", "m^2/V^2"}};
  }
  return out;
}

json provenance_json(const AnalysisConfig& config) {
  const auto& m = config.material;
  const auto& b = config.beam;
  std::string sellmeier = "none (constant n0)";
  if (!m.sellmeier.empty())
    sellmeier = is_diamond_default(m.sellmeier) ? "diamond default: F. Peter, Z. Phys. 15, 358 (1923)"
                                                : "user-supplied terms";
  return {
      {"config", config.echo},
      {"constants",
       {{"c", constants.c}, {"eps0", constants.eps0}, {"e_charge", constants.e_charge},
        {"m_e", constants.m_e}, {"hbar", constants.hbar}, {"source", "CODATA 2018"}}},
      {"design",
       {{"wave_vector", "vacuum k = 2 pi / lambda"},
        {"tpa_carrier_density", "N = beta I^2 tau_p / (2 hbar omega), tau_p in the numerator"},
        {"drude_index_change", "SI: dn = -e^2 N / (2 n0 m* eps0 omega^2)"},
        {"intensity_profile", to_string(b.profile)},
        {"pulse_fwhm_s", b.pulse_fwhm},
        {"m_star_ratio", m.m_star_ratio},
        {"sellmeier", sellmeier},
        {"zscan_nuisance_parameters", {"z_center", "baseline"}},
        {"zscan_dpsi0_constraint", "dpsi0 >= 0"},
        {"zscan_aperture", "small-aperture limit; linear aperture transmittance not modelled"},
        {"n2_sign", "fluence fits report signed n2 and |n2|"},
        {"fit",
         {{"max_iter", config.options.fit.max_iter},
          {"step_tol", config.options.fit.step_tol},
          {"grad_tol", config.options.fit.grad_tol},
          {"cost_tol", config.options.fit.cost_tol},
          {"damping_init", config.options.fit.damping_init},
          {"weights", "unit"}}}}},
      {"metadata", {{"band_gap_eV", 5.5}, {"nv_layer_thickness_nm", {60, 70}}}},
      {"toolkit_version", kToolkitVersion}};
}

json to_json(const AnalysisReport& report) {
  json samples = json::array();
  for (const auto& s : report.samples) samples.push_back(to_json(s, report.diagnostics, report.config));
  json errors = json::array();
  for (const auto& e : report.errors) errors.push_back({{"input", input_json(e.input)}, {"error", e.error}});
  return {{"schema_version", kReportSchemaVersion},
          {"timestamp", report.timestamp},
          {"diagnostics", to_json(report.diagnostics)},
          {"samples", samples},
          {"errors", errors},
          {"provenance", provenance_json(report.config)}};
}

std::vector<std::filesystem::path> emit_plot_data(const AnalysisReport& report,
                                                  const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  if (report.samples.empty()) return written;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  std::set<std::string> used;
  auto open = [&](const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    written.push_back(path);
    out.precision(17);
    return out;
  };
  for (const auto& s : report.samples) {
    std::string stem = file_stem(s.input.label) + "_" + std::string(to_string(s.input.kind));
    for (int n = 2; used.count(stem); ++n)
      stem = file_stem(s.input.label) + "-" + std::to_string(n) + "_" + std::string(to_string(s.input.kind));
    used.insert(stem);
    const auto data_path = out_dir / (stem + "_data.tsv");
    const auto fit_path = out_dir / (stem + "_fit.tsv");

    if (const auto* z = std::get_if<ZscanSample>(&s.result)) {
      const auto& pts = z->trace.points;
      auto data = open(data_path);
      data << "# z_mm\tT\n";
      for (const auto& p : pts) data << p.z / units::kMillimetre << '\t' << p.transmittance << '\n';
      auto fit = open(fit_path);
      fit << "# z_mm\tT_fit\n";
      for (double zz : linspace(pts.front().z, pts.back().z, 10 * pts.size()))
        fit << zz / units::kMillimetre << '\t' << zscan_model(z->fit.params, zz) << '\n';
    } else if (const auto* p = std::get_if<PumpProbeSample>(&s.result)) {
      const auto& pts = p->trace.points;
      auto data = open(data_path);
      data << "# delay_fs\tdRoverR\n";
      for (const auto& q : pts) data << q.delay / units::kFemtosecond << '\t' << q.dr_over_r << '\n';
      auto fit = open(fit_path);
      fit << "# delay_fs\tdRoverR_fit\n";
      for (double t : linspace(pts.front().delay, pts.back().delay, 10 * pts.size()))
        fit << t / units::kFemtosecond << '\t' << gaussian_peak(p->peak, t) << '\n';
    } else {
      const auto& f = std::get<FluenceSample>(s.result);
      auto pts = f.series.points;
      std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.intensity < b.intensity; });
      auto data = open(data_path);
      data << "# intensity_W_m2\tabs_dRoverR\n";
      for (const auto& q : pts) data << q.intensity << '\t' << q.abs_dr_over_r << '\n';
      auto fit = open(fit_path);
      fit << "# intensity_W_m2\tabs_dRoverR_fit\n";
      for (double i : linspace(pts.front().intensity, pts.back().intensity, 10 * pts.size()))
        fit << i << '\t' << f.fit.a * i + f.fit.b * i * i << '\n';
    }
  }
  return written;
}

}  // namespace nlo
