#pragma once

// CSV ingestion of measured traces and the matching writers.
//
//   zscan      header `z_mm,T`
//   pumpprobe  header `delay_fs,dRoverR`
//   fluence    header `intensity,abs_dRoverR` plus a `# units: mJ/cm2` or
//              `# units: W/m2` comment line
//
// Blank lines and `#` comment lines are skipped. Values are converted to SI on
// ingestion.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include "nlo/pump_probe.hpp"
#include "nlo/zscan.hpp"

namespace nlo {

enum class TraceKind { zscan, pumpprobe, fluence };

TraceKind parse_trace_kind(std::string_view tag);
std::string_view to_string(TraceKind kind);

using AnyTrace = std::variant<ZscanTrace, PumpProbeTrace, FluenceSeries>;

AnyTrace parse_trace_csv(std::istream& in, TraceKind kind);
AnyTrace read_trace_file(const std::filesystem::path& path, TraceKind kind);

ZscanTrace parse_zscan_csv(std::istream& in);
PumpProbeTrace parse_pumpprobe_csv(std::istream& in);
FluenceSeries parse_fluence_csv(std::istream& in);

void write_zscan_csv(std::ostream& out, const ZscanTrace& trace);
void write_pumpprobe_csv(std::ostream& out, const PumpProbeTrace& trace);
/// Intensity series are written in W/m2, fluence series in mJ/cm2.
void write_fluence_csv(std::ostream& out, const FluenceSeries& series);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace nlo
