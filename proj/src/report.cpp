#include "qline/bench.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace qline {

namespace {

const char* kRunsHeader = "problem,solver,run_index,seed,success,iterations,elapsed_seconds,start_point";
const char* kProfileHeader = "solver,tau,fraction";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_real(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw InvalidArgument("malformed number '" + s + "' in CSV");
  }
  return v;
}

long long parse_int(const std::string& s) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw InvalidArgument("malformed integer '" + s + "' in CSV");
  }
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_runs_csv(std::ostream& out, const BenchmarkTable& table) {
  out << kRunsHeader << '\n';
  for (const auto& r : table.rows) {
    out << r.problem << ',' << r.solver << ',' << r.run_index << ',' << r.seed << ','
        << (r.success ? "true" : "false") << ',' << r.iterations << ','
        << format_real(r.elapsed_seconds) << ',';
    for (Eigen::Index i = 0; i < r.start_point.size(); ++i) {
      if (i) out << ';';
      out << format_real(r.start_point[i]);
    }
    out << '\n';
  }
}

BenchmarkTable read_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kRunsHeader) {
    throw InvalidArgument("runs CSV: missing or unexpected header");
  }
  BenchmarkTable table;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw InvalidArgument("runs CSV: expected 8 fields in '" + line + "'");
    BenchmarkRow r;
    r.problem = f[0];
    r.solver = f[1];
    r.run_index = static_cast<int>(parse_int(f[2]));
    char* end = nullptr;
    r.seed = std::strtoull(f[3].c_str(), &end, 10);
    if (f[3].empty() || end != f[3].c_str() + f[3].size()) {
      throw InvalidArgument("runs CSV: malformed seed '" + f[3] + "'");
    }
    if (f[4] != "true" && f[4] != "false") throw InvalidArgument("runs CSV: bad success flag");
    r.success = f[4] == "true";
    r.iterations = static_cast<int>(parse_int(f[5]));
    r.elapsed_seconds = parse_real(f[6]);
    const auto coords = f[7].empty() ? std::vector<std::string>{} : split(f[7], ';');
    r.start_point.resize(static_cast<Eigen::Index>(coords.size()));
    for (size_t i = 0; i < coords.size(); ++i) {
      r.start_point[static_cast<Eigen::Index>(i)] = parse_real(coords[i]);
    }
    table.rows.push_back(std::move(r));
  }
  return table;
}

void write_fc_summary_csv(std::ostream& out, const FcBenchmark& bench) {
  out << 'c';
  for (const auto& s : bench.solvers) out << ",iter_" << s;
  for (const auto& s : bench.solvers) out << ",time_" << s;
  out << '\n';
  for (const auto& row : bench.summary) {
    out << format_real(row.c);
    for (double v : row.mean_iterations) out << ',' << format_real(v);
    for (double v : row.mean_seconds) out << ',' << format_real(v);
    out << '\n';
  }
}

void write_profile_csv(std::ostream& out, const std::vector<ProfileCurve>& curves) {
  out << kProfileHeader << '\n';
  for (const auto& c : curves) {
    for (const auto& [tau, frac] : c.points) {
      out << c.solver << ',' << format_real(tau) << ',' << format_real(frac) << '\n';
    }
  }
}

std::vector<ProfileCurve> read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kProfileHeader) {
    throw InvalidArgument("profile CSV: missing or unexpected header");
  }
  std::vector<ProfileCurve> curves;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 3) throw InvalidArgument("profile CSV: expected 3 fields");
    if (curves.empty() || curves.back().solver != f[0]) curves.push_back({f[0], {}});
    curves.back().points.emplace_back(parse_real(f[1]), parse_real(f[2]));
  }
  return curves;
}

void write_profile_svg(std::ostream& out, const std::vector<ProfileCurve>& curves,
                       const std::string& title) {
  const double w = 640, h = 420, left = 60, right = 130, top = 40, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  double max_log = 1.0;
  for (const auto& c : curves) {
    for (const auto& pt : c.points) max_log = std::max(max_log, std::log2(pt.first));
  }
  max_log = std::ceil(max_log * 1.05);
  auto sx = [&](double tau) { return left + pw * std::log2(tau) / max_log; };
  auto sy = [&](double frac) { return top + ph * (1.0 - frac); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left + pw / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title
      << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= static_cast<int>(max_log); ++i) {
    const double x = left + pw * i / max_log;
    out << "<text x=\"" << x << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << i
        << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    out << "<text x=\"" << left - 6 << "\" y=\"" << sy(f) + 4 << "\" text-anchor=\"end\">" << f
        << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 12
      << "\" text-anchor=\"middle\">log2(tau)</text>\n";
  out << "<text x=\"16\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 16 " << top + ph / 2
      << ")\" text-anchor=\"middle\">P(tau)</text>\n";

  for (size_t k = 0; k < curves.size(); ++k) {
    const char* color = colors[k % (sizeof colors / sizeof *colors)];
    std::ostringstream pts;
    double prev = 0.0;
    for (const auto& [tau, frac] : curves[k].points) {
      pts << sx(tau) << ',' << sy(prev) << ' ' << sx(tau) << ',' << sy(frac) << ' ';
      prev = frac;
    }
    pts << left + pw << ',' << sy(prev);
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
        << pts.str() << "\"/>\n";
    const double ly = top + 16 + 18 * static_cast<double>(k);
    out << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 36
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly << "\">" << curves[k].solver
        << "</text>\n";
  }
  out << "</svg>\n";
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& emit) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing: " + std::strerror(errno));
  emit(out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace qline
