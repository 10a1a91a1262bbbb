#pragma once

// Scratch directories, synthetic input files and CLI invocation shared by the
// unit and acceptance tests.

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nlo/pump_probe.hpp"
#include "nlo/random.hpp"
#include "nlo/trace_io.hpp"
#include "nlo/zscan.hpp"

namespace support {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("nlo_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_zscan(const fs::path& path, const nlo::ZscanParams& p, double noise, std::uint64_t seed,
                        std::size_t n = 40) {
  std::ofstream out(path);
  nlo::write_zscan_csv(out, nlo::simulate_zscan(p, nlo::linspace(-1e-3, 1e-3, n), noise, seed));
}

inline void write_pumpprobe(const fs::path& path, double amplitude, double fwhm, std::size_t n = 81) {
  nlo::PeakFit truth;
  truth.amplitude = amplitude;
  truth.fwhm = fwhm;
  nlo::PumpProbeTrace trace;
  for (double t : nlo::linspace(-200e-15, 200e-15, n)) trace.points.push_back({t, nlo::gaussian_peak(truth, t)});
  std::ofstream out(path);
  nlo::write_pumpprobe_csv(out, trace);
}

// Fluence series in mJ/cm2 following |dR/R| = a I + b I^2 at 50 fs flat-top.
inline void write_fluence(const fs::path& path, double a, double b, std::size_t n = 13) {
  nlo::FluenceSeries s;
  s.abscissa = nlo::FluenceAbscissa::fluence;
  for (double f : nlo::linspace(100.0, 400.0, n)) {
    const double i = f / 50e-15;
    s.points.push_back({f, std::abs(a * i + b * i * i)});
  }
  std::ofstream out(path);
  nlo::write_fluence_csv(out, s);
}

inline nlohmann::json base_config() {
  return nlohmann::json::parse(R"({
    "material": {"label": "diamond", "n0": 2.4, "alpha": 0.1, "length": 0.3,
                 "m_star_ratio": 0.57, "sellmeier": "diamond"},
    "beam": {"wavelength": 800, "na": 0.06, "pulse_fwhm": 50, "fluence": 19.95,
             "profile": "flat-top"},
    "inputs": [],
    "options": {"deconvolve_known_fwhm": 40}
  })");
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs a shell command line, capturing stdout and stderr through files.
inline RunResult run(const std::string& command, const fs::path& scratch) {
  const auto out = scratch / "stdout.txt";
  const auto err = scratch / "stderr.txt";
  const std::string full = "(" + command + ") >'" + out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(full.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text(out);
  r.err = read_text(err);
  return r;
}

inline std::string nlofit() { return std::string("'") + NLOFIT_PATH + "'"; }

}  // namespace support
