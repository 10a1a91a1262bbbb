#include "nlo/config.hpp"

#include <fstream>
#include <set>

#include "nlo/errors.hpp"
#include "nlo/units.hpp"

namespace nlo {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown field '" + std::string(where) + "." + key + "'");
  }
}

const json& object_at(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ConfigError(std::string("missing '") + key + "' section");
  const json& v = doc.at(key);
  if (!v.is_object()) throw ConfigError(std::string("'") + key + "' must be an object");
  return v;
}

double number(const json& obj, std::string_view where, const char* key) {
  if (!obj.contains(key)) throw ConfigError("missing '" + std::string(where) + "." + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("'" + std::string(where) + "." + key + "' must be a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& obj, std::string_view where, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return number(obj, where, key);
}

std::string string_or(const json& obj, std::string_view where, const char* key, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError("'" + std::string(where) + "." + key + "' must be a string");
  return v.get<std::string>();
}

UnitTags parse_units(const json& obj) {
  reject_unknown(obj, "options.units", {"length", "time", "fluence", "beta", "wavelength", "alpha"});
  UnitTags u;
  u.length = string_or(obj, "options.units", "length", u.length);
  u.time = string_or(obj, "options.units", "time", u.time);
  u.fluence = string_or(obj, "options.units", "fluence", u.fluence);
  u.beta = string_or(obj, "options.units", "beta", u.beta);
  u.wavelength = string_or(obj, "options.units", "wavelength", u.wavelength);
  u.alpha = string_or(obj, "options.units", "alpha", u.alpha);
  // Validate every tag up front.
  units::length_factor(u.length);
  units::time_factor(u.time);
  units::fluence_factor(u.fluence);
  units::beta_factor(u.beta);
  units::wavelength_factor(u.wavelength);
  units::alpha_factor(u.alpha);
  return u;
}

std::vector<SellmeierTerm> parse_sellmeier(const json& v, double wl_factor) {
  if (v.is_null()) return {};
  if (v.is_string()) {
    if (v.get<std::string>() == "diamond") return diamond_sellmeier();
    throw ConfigError("unknown Sellmeier dataset '" + v.get<std::string>() + "' (known: diamond)");
  }
  if (!v.is_array()) throw ConfigError("'material.sellmeier' must be \"diamond\" or a list of terms");
  std::vector<SellmeierTerm> terms;
  for (const auto& t : v) {
    if (!t.is_object()) throw ConfigError("Sellmeier terms must be objects {B, lambda}");
    reject_unknown(t, "material.sellmeier[]", {"B", "lambda"});
    terms.push_back({number(t, "material.sellmeier[]", "B"),
                     number(t, "material.sellmeier[]", "lambda") * wl_factor});
  }
  return terms;
}

}  // namespace

AnalysisConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc, "config", {"material", "beam", "inputs", "options"});
  AnalysisConfig cfg;
  cfg.echo = doc;

  try {
    if (doc.contains("options")) {
      const json& opt = object_at(doc, "options");
      reject_unknown(opt, "options", {"units", "fit", "deconvolve_known_fwhm", "parallel"});
      if (opt.contains("units")) cfg.options.units = parse_units(object_at(opt, "units"));
      if (opt.contains("fit")) {
        const json& fit = object_at(opt, "fit");
        reject_unknown(fit, "options.fit", {"max_iter", "step_tol", "grad_tol", "cost_tol", "damping_init"});
        auto& f = cfg.options.fit;
        if (fit.contains("max_iter")) f.max_iter = static_cast<int>(number(fit, "options.fit", "max_iter"));
        f.step_tol = optional_number(fit, "options.fit", "step_tol").value_or(f.step_tol);
        f.grad_tol = optional_number(fit, "options.fit", "grad_tol").value_or(f.grad_tol);
        f.cost_tol = optional_number(fit, "options.fit", "cost_tol").value_or(f.cost_tol);
        f.damping_init = optional_number(fit, "options.fit", "damping_init").value_or(f.damping_init);
        if (f.max_iter <= 0 || !(f.step_tol > 0) || !(f.grad_tol > 0) || !(f.damping_init > 0))
          throw ConfigError("options.fit values must be positive");
        if (!(f.cost_tol >= 0)) throw ConfigError("options.fit.cost_tol must be non-negative");
      }
      if (auto known = optional_number(opt, "options", "deconvolve_known_fwhm"))
        cfg.options.known_fwhm = *known * units::time_factor(cfg.options.units.time);
      if (opt.contains("parallel")) {
        if (!opt.at("parallel").is_boolean()) throw ConfigError("'options.parallel' must be a boolean");
        cfg.options.parallel = opt.at("parallel").get<bool>();
      }
    }
    const UnitTags& u = cfg.options.units;
    const double length = units::length_factor(u.length);
    const double time = units::time_factor(u.time);
    const double fluence = units::fluence_factor(u.fluence);
    const double wavelength = units::wavelength_factor(u.wavelength);

    const json& beam = object_at(doc, "beam");
    reject_unknown(beam, "beam", {"wavelength", "na", "waist", "pulse_fwhm", "fluence", "profile"});
    cfg.beam.wavelength = number(beam, "beam", "wavelength") * wavelength;
    cfg.beam.na = optional_number(beam, "beam", "na");
    if (auto w = optional_number(beam, "beam", "waist")) cfg.beam.waist = *w * length;
    cfg.beam.pulse_fwhm = number(beam, "beam", "pulse_fwhm") * time;
    cfg.beam.fluence = number(beam, "beam", "fluence") * fluence;
    cfg.beam.profile = parse_profile(string_or(beam, "beam", "profile", "flat-top"));
    validate(cfg.beam);

    const json& mat = object_at(doc, "material");
    reject_unknown(mat, "material", {"label", "n0", "alpha", "length", "m_star_ratio", "sellmeier"});
    cfg.material.label = string_or(mat, "material", "label", "");
    cfg.material.n0 = number(mat, "material", "n0");
    cfg.material.alpha = number(mat, "material", "alpha") * units::alpha_factor(u.alpha);
    cfg.material.length = number(mat, "material", "length") * length;
    cfg.material.m_star_ratio = optional_number(mat, "material", "m_star_ratio").value_or(0.57);
    if (mat.contains("sellmeier")) cfg.material.sellmeier = parse_sellmeier(mat.at("sellmeier"), wavelength);
    validate(cfg.material, cfg.beam.wavelength);

    if (doc.contains("inputs")) {
      const json& inputs = doc.at("inputs");
      if (!inputs.is_array()) throw ConfigError("'inputs' must be a list");
      std::set<std::filesystem::path> seen;
      for (const auto& in : inputs) {
        if (!in.is_object()) throw ConfigError("each input must be an object");
        reject_unknown(in, "inputs[]", {"path", "kind", "label", "fluence"});
        InputSpec spec;
        spec.path = string_or(in, "inputs[]", "path", "");
        if (spec.path.empty()) throw ConfigError("input without 'path'");
        spec.resolved = spec.path.is_absolute() ? spec.path : base_dir / spec.path;
        spec.kind = parse_trace_kind(string_or(in, "inputs[]", "kind", ""));
        spec.label = string_or(in, "inputs[]", "label", spec.path.stem().string());
        if (auto f = optional_number(in, "inputs[]", "fluence")) spec.fluence = *f * fluence;
        const auto key = spec.resolved.lexically_normal();
        if (!seen.insert(key).second)
          throw ConfigError("input path '" + spec.path.string() + "' is listed twice");
        cfg.inputs.push_back(std::move(spec));
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

AnalysisConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

}  // namespace nlo
