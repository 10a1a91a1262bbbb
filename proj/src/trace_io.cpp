#include "nlo/trace_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "nlo/errors.hpp"
#include "nlo/units.hpp"

namespace nlo {

namespace {

constexpr std::string_view kZscanHeader = "z_mm,T";
constexpr std::string_view kPumpProbeHeader = "delay_fs,dRoverR";
constexpr std::string_view kFluenceHeader = "intensity,abs_dRoverR";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

struct Row {
  std::size_t line;
  double x;
  double y;
};

struct CsvBody {
  std::vector<Row> rows;
  std::vector<std::string> comments;  // text after '#', trimmed
};

double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError(line, "cannot parse '" + std::string(field) + "' as a number");
  if (!std::isfinite(v)) throw ParseError(line, "non-finite value '" + std::string(field) + "'");
  return v;
}

CsvBody read_body(std::istream& in, std::string_view expected_header) {
  CsvBody body;
  std::string raw;
  std::size_t line = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (line == 1 && text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    text = trim(text);
    if (text.empty()) continue;
    if (text.front() == '#') {
      body.comments.emplace_back(trim(text.substr(1)));
      continue;
    }
    if (!have_header) {
      if (text != expected_header)
        throw FormatError("line " + std::to_string(line) + ": expected header '" +
                          std::string(expected_header) + "', found '" + std::string(text) + "'");
      have_header = true;
      continue;
    }
    const auto comma = text.find(',');
    if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(line, "expected exactly two comma-separated values");
    body.rows.push_back(
        {line, parse_number(text.substr(0, comma), line), parse_number(text.substr(comma + 1), line)});
  }
  if (!have_header)
    throw FormatError("missing header; expected '" + std::string(expected_header) + "'");
  return body;
}

void require_increasing(const std::vector<Row>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].x > rows[i - 1].x))
      throw OrderingError(rows[i].line, "abscissa must be strictly increasing");
}

}  // namespace

TraceKind parse_trace_kind(std::string_view tag) {
  if (tag == "zscan") return TraceKind::zscan;
  if (tag == "pumpprobe") return TraceKind::pumpprobe;
  if (tag == "fluence") return TraceKind::fluence;
  throw DomainError("unknown input kind '" + std::string(tag) +
                    "' (expected zscan, pumpprobe or fluence)");
}

std::string_view to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::zscan: return "zscan";
    case TraceKind::pumpprobe: return "pumpprobe";
    case TraceKind::fluence: return "fluence";
  }
  return "unknown";
}

ZscanTrace parse_zscan_csv(std::istream& in) {
  const auto body = read_body(in, kZscanHeader);
  require_increasing(body.rows);
  ZscanTrace trace;
  for (const auto& r : body.rows) trace.points.push_back({r.x * units::kMillimetre, r.y});
  return trace;
}

PumpProbeTrace parse_pumpprobe_csv(std::istream& in) {
  const auto body = read_body(in, kPumpProbeHeader);
  require_increasing(body.rows);
  PumpProbeTrace trace;
  for (const auto& r : body.rows) trace.points.push_back({r.x * units::kFemtosecond, r.y});
  return trace;
}

FluenceSeries parse_fluence_csv(std::istream& in) {
  const auto body = read_body(in, kFluenceHeader);
  std::optional<FluenceAbscissa> abscissa;
  double factor = 1.0;
  for (const auto& c : body.comments) {
    std::string_view text = c;
    if (!text.starts_with("units:")) continue;
    const auto tag = trim(text.substr(6));
    if (tag == "mJ/cm2") {
      abscissa = FluenceAbscissa::fluence;
      factor = units::kMilliJoulePerCm2;
    } else if (tag == "W/m2") {
      abscissa = FluenceAbscissa::intensity;
      factor = 1.0;
    } else {
      throw FormatError("unknown '# units:' value '" + std::string(tag) +
                        "' (expected mJ/cm2 or W/m2)");
    }
  }
  if (!abscissa) throw FormatError("fluence file needs a '# units: mJ/cm2' or '# units: W/m2' line");
  FluenceSeries series;
  series.abscissa = *abscissa;
  for (const auto& r : body.rows) series.points.push_back({r.x * factor, r.y});
  return series;
}

AnyTrace parse_trace_csv(std::istream& in, TraceKind kind) {
  switch (kind) {
    case TraceKind::zscan: return parse_zscan_csv(in);
    case TraceKind::pumpprobe: return parse_pumpprobe_csv(in);
    case TraceKind::fluence: return parse_fluence_csv(in);
  }
  throw DomainError("unknown trace kind");
}

AnyTrace read_trace_file(const std::filesystem::path& path, TraceKind kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return parse_trace_csv(in, kind);
  } catch (const RowError& e) {
    throw Error(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf.data(), ptr);
}

void write_zscan_csv(std::ostream& out, const ZscanTrace& trace) {
  out << kZscanHeader << '\n';
  for (const auto& p : trace.points)
    out << format_double(p.z / units::kMillimetre) << ',' << format_double(p.transmittance) << '\n';
}

void write_pumpprobe_csv(std::ostream& out, const PumpProbeTrace& trace) {
  out << kPumpProbeHeader << '\n';
  for (const auto& p : trace.points)
    out << format_double(p.delay / units::kFemtosecond) << ',' << format_double(p.dr_over_r) << '\n';
}

void write_fluence_csv(std::ostream& out, const FluenceSeries& series) {
  const bool fluence = series.abscissa == FluenceAbscissa::fluence;
  out << "# units: " << (fluence ? "mJ/cm2" : "W/m2") << '\n' << kFluenceHeader << '\n';
  const double factor = fluence ? units::kMilliJoulePerCm2 : 1.0;
  for (const auto& p : series.points)
    out << format_double(p.intensity / factor) << ',' << format_double(p.abs_dr_over_r) << '\n';
}

}  // namespace nlo
