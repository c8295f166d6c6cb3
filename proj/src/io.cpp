#include "avgshadow/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "avgshadow/error.hpp"

namespace avgshadow {

void write_provenance(std::ostream& out, const Provenance& provenance) {
  for (const auto& [key, value] : provenance) out << "# " << key << ": " << value << '\n';
}

void write_pseudo_orbit(std::ostream& out, const IFSystem& ifs, const PseudoOrbit& orbit,
                        const Provenance& provenance) {
  out << "# pseudo-orbit\n";
  out << "# system: " << ifs.name() << '\n';
  out << "# space: " << ifs.space().describe() << '\n';
  write_provenance(out, provenance);
  out << "index,symbol,point,alpha\n";
  for (std::size_t i = 0; i < orbit.points.size(); ++i) {
    out << i << ',';
    if (i < orbit.symbols.size()) out << ifs.label(orbit.symbols[i]);
    out << ',' << format_point(ifs.space(), orbit.points[i]) << ',';
    if (i < orbit.errors.size()) out << format_double(orbit.errors[i]);
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

PseudoOrbit read_pseudo_orbit(std::istream& in, const IFSystem& ifs) {
  std::string line;
  bool header = false;
  std::vector<Point> points;
  SymbolWord symbols;
  std::vector<double> stored;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      require(line == "index,symbol,point,alpha", ErrorCode::parse_error,
              "unexpected pseudo-orbit header: " + line);
      header = true;
      continue;
    }
    const auto f = split_fields(line);
    const std::string where = " (line " + std::to_string(line_no) + ")";
    require(f.size() == 4, ErrorCode::parse_error, "expected 4 fields" + where);
    require(parse_double(f[0]) == static_cast<double>(points.size()), ErrorCode::parse_error,
            "index out of sequence" + where);
    points.push_back(parse_point(ifs.space(), f[2]));
    if (!f[1].empty()) {
      const auto s = ifs.find(f[1]);
      require(s.has_value(), ErrorCode::parse_error, "unknown symbol '" + f[1] + "'" + where);
      require(!f[3].empty(), ErrorCode::parse_error, "missing alpha" + where);
      symbols.push_back(*s);
      stored.push_back(parse_double(f[3]));
    } else {
      require(f[3].empty(), ErrorCode::parse_error, "alpha without symbol" + where);
    }
  }
  require(header && !points.empty(), ErrorCode::parse_error, "no pseudo-orbit records");
  require(points.size() == symbols.size() + 1, ErrorCode::parse_error,
          "only the last record may omit its symbol");
  PseudoOrbit orbit = make_pseudo_orbit(ifs, std::move(points), std::move(symbols));
  for (std::size_t i = 0; i < stored.size(); ++i) {
    require(std::fabs(stored[i] - orbit.errors[i]) <= 1e-12, ErrorCode::parse_error,
            "stored alpha disagrees with the recomputed error at step " + std::to_string(i));
  }
  return orbit;
}

void write_shadow_report(std::ostream& out, const Space& space, const ShadowReport& report,
                         const Provenance& provenance) {
  out << "# shadow report\n";
  out << "# shadow: " << format_point(space, report.shadow) << '\n';
  out << "# horizon: " << report.horizon << '\n';
  out << "# window: " << format_double(report.window) << '\n';
  out << "# tail: " << format_double(report.tail) << '\n';
  out << "# average: " << format_double(report.average()) << '\n';
  if (report.beta) out << "# beta: " << format_double(*report.beta) << '\n';
  if (report.delta) out << "# delta: " << format_double(*report.delta) << '\n';
  if (report.epsilon) out << "# epsilon: " << format_double(*report.epsilon) << '\n';
  write_provenance(out, provenance);
  out << "n,distance,average,bound,cumulative_bound\n";
  for (std::size_t n = 1; n <= report.horizon; ++n) {
    out << n << ',' << format_double(report.distances[n - 1]) << ','
        << format_double(report.profile[n - 1]) << ',';
    if (n <= report.bounds.size()) out << format_double(report.bounds[n - 1]);
    out << ',';
    if (n <= report.cumulative_bounds.size()) out << format_double(report.cumulative_bounds[n - 1]);
    out << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::io_error, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    require(static_cast<bool>(out), ErrorCode::io_error, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::io_error, "cannot rename onto " + path.string());
  }
}

}  // namespace avgshadow
