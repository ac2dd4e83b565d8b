// Copyright 2026 The markov-risk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "markov_risk/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>
#include <tuple>

#include "markov_risk/errors.hpp"

namespace mkrisk {

namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// RFC 4180 quoting, only when needed.
std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_record(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ValidationError("csv line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line_no, std::string_view field) {
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ValidationError("csv line " + std::to_string(line_no) + ": bad " + std::string(field) +
                          " '" + s + "'");
  }
  return value;
}

double parse_real(const std::string& s, std::size_t line_no, std::string_view field) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  // from_chars spells infinities "inf"; accept them explicitly.
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return parse_number<double>(s, line_no, field);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out.flush()) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace

std::vector<ResultRow> sorted_rows(std::vector<ResultRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.k, a.n, a.estimator, a.divergence) <
           std::tie(b.k, b.n, b.estimator, b.divergence);
  });
  return rows;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : sorted_rows(rows)) {
    out += quote(r.experiment) + ',' + std::to_string(r.k) + ',' + std::to_string(r.n) + ',' +
           format_double(r.delta) + ',' + quote(r.divergence) + ',' + quote(r.estimator) + ',' +
           std::string(to_string(r.risk_mode)) + ',' + std::to_string(r.trials) + ',' +
           format_double(r.mean_loss) + ',' + format_double(r.std_error) + ',' +
           format_double(r.theory_value) + ',' + std::to_string(r.master_seed) + '\n';
  }
  return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw ValidationError("emit_csv: no rows");
  write_file(path, to_csv(rows));
}

std::vector<ResultRow> parse_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != kCsvHeader) throw ValidationError("csv: unexpected header");
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_record(line, line_no);
    if (f.size() != 12) {
      throw ValidationError("csv line " + std::to_string(line_no) + ": expected 12 fields, got " +
                            std::to_string(f.size()));
    }
    ResultRow r;
    r.experiment = f[0];
    r.k = parse_number<std::uint64_t>(f[1], line_no, "k");
    r.n = parse_number<std::uint64_t>(f[2], line_no, "n");
    r.delta = parse_real(f[3], line_no, "delta");
    r.divergence = f[4];
    r.estimator = f[5];
    r.risk_mode = parse_risk_mode(f[6]);
    r.trials = parse_number<std::size_t>(f[7], line_no, "trials");
    r.mean_loss = parse_real(f[8], line_no, "mean_loss");
    r.std_error = parse_real(f[9], line_no, "stderr");
    r.theory_value = parse_real(f[10], line_no, "theory_value");
    r.master_seed = parse_number<std::uint64_t>(f[11], line_no, "master_seed");
    rows.push_back(std::move(r));
  }
  if (!saw_header) throw ValidationError("csv: empty document");
  return rows;
}

PlotAxes parse_plot_axes(std::string_view token) {
  if (token == "loglog") return PlotAxes::loglog;
  if (token == "semilog") return PlotAxes::semilog;
  throw ValidationError("unknown plot axes '" + std::string(token) + "' (loglog|semilog)");
}

std::string to_svg(const std::vector<ResultRow>& rows, PlotAxes axes) {
  if (rows.empty()) throw ValidationError("plot: no rows");
  for (const auto& r : rows) {
    if (r.experiment != rows.front().experiment) {
      throw ValidationError("plot: rows mix experiments '" + rows.front().experiment + "' and '" +
                            r.experiment + "'");
    }
  }
  bool single_n = true;
  for (const auto& r : rows) single_n = single_n && r.n == rows.front().n;
  bool many_k = false;
  for (const auto& r : rows) many_k = many_k || r.k != rows.front().k;
  const bool x_is_k = single_n && many_k;

  // Curve key: everything except the x variable.
  using Key = std::tuple<std::string, std::string, std::string, std::uint64_t>;
  struct Curve {
    std::vector<std::pair<double, double>> measured;
    std::vector<std::pair<double, double>> theory;
  };
  std::map<Key, Curve> curves;
  for (const auto& r : sorted_rows(rows)) {
    const Key key{r.estimator, r.divergence, std::string(to_string(r.risk_mode)),
                  x_is_k ? r.n : r.k};
    const double x = static_cast<double>(x_is_k ? r.k : r.n);
    auto& c = curves[key];
    c.measured.emplace_back(x, r.mean_loss);
    if (std::isfinite(r.theory_value)) c.theory.emplace_back(x, r.theory_value);
  }

  const bool log_x = axes == PlotAxes::loglog;
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && y > 0.0 && (!log_x || x > 0.0);
  };
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& [key, c] : curves) {
    for (const auto* pts : {&c.measured, &c.theory}) {
      for (const auto& [x, y] : *pts) {
        if (!usable(x, y)) continue;
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
      }
    }
  }
  const bool any = std::isfinite(x_lo);
  if (!any) {
    x_lo = 1.0;
    x_hi = 10.0;
    y_lo = 1.0;
    y_hi = 10.0;
  }
  auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
  auto ty = [](double y) { return std::log10(y); };
  double X0 = tx(x_lo), X1 = tx(x_hi), Y0 = ty(y_lo), Y1 = ty(y_hi);
  if (X1 - X0 < 1e-12) { X0 -= 0.5; X1 += 0.5; }
  if (Y1 - Y0 < 1e-12) { Y0 -= 0.5; Y1 += 0.5; }

  constexpr double W = 800, H = 520, L = 90, R = 230, T = 40, B = 60;
  auto px = [&](double x) { return L + (tx(x) - X0) / (X1 - X0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (ty(y) - Y0) / (Y1 - Y0) * (H - T - B); };

  static constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                             "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::ostringstream svg;
  svg.precision(6);
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
      << "<title>" << xml_escape(rows.front().experiment) << "</title>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
      << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
      << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\"/>\n</g>\n";

  // Decade ticks on log axes, five even ticks otherwise.
  svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  auto tick_label = [](double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
  };
  for (int e = static_cast<int>(std::ceil(Y0 - 1e-9)); e <= static_cast<int>(std::floor(Y1 + 1e-9));
       ++e) {
    const double y = py(std::pow(10.0, e));
    svg << "<text x=\"" << L - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << e
        << "</text>\n";
  }
  if (log_x) {
    for (int e = static_cast<int>(std::ceil(X0 - 1e-9));
         e <= static_cast<int>(std::floor(X1 + 1e-9)); ++e) {
      svg << "<text x=\"" << px(std::pow(10.0, e)) << "\" y=\"" << H - B + 18
          << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
    }
  } else {
    for (int i = 0; i <= 4; ++i) {
      const double v = X0 + (X1 - X0) * i / 4.0;
      svg << "<text x=\"" << px(v) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
          << tick_label(v) << "</text>\n";
    }
  }
  svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\" font-size=\"13\">" << (x_is_k ? "k" : "n") << "</text>\n"
      << "<text x=\"20\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
      << "transform=\"rotate(-90 20 " << (T + H - B) / 2 << ")\">mean loss</text>\n</g>\n";

  auto polyline = [&](const std::vector<std::pair<double, double>>& pts, const char* colour,
                      bool dashed) {
    std::ostringstream p;
    p.precision(6);
    std::size_t used = 0;
    for (const auto& [x, y] : pts) {
      if (!usable(x, y)) continue;
      p << (used++ ? " " : "") << px(x) << ',' << py(y);
    }
    if (used == 0) return;
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\""
        << (dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << p.str() << "\"/>\n";
  };

  std::size_t idx = 0;
  double legend_y = T + 10;
  for (const auto& [key, c] : curves) {
    const char* colour = kPalette[idx++ % std::size(kPalette)];
    polyline(c.measured, colour, false);
    polyline(c.theory, colour, true);
    std::string label = std::get<0>(key) + " " + std::get<1>(key) + " " + std::get<2>(key) +
                        (x_is_k ? " n=" : " k=") + std::to_string(std::get<3>(key));
    svg << "<line x1=\"" << W - R + 10 << "\" y1=\"" << legend_y << "\" x2=\"" << W - R + 30
        << "\" y2=\"" << legend_y << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << W - R + 35 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << xml_escape(label) << "</text>\n";
    legend_y += 16;
    if (!c.theory.empty()) {
      svg << "<line x1=\"" << W - R + 10 << "\" y1=\"" << legend_y << "\" x2=\"" << W - R + 30
          << "\" y2=\"" << legend_y << "\" stroke=\"" << colour
          << "\" stroke-width=\"2\" stroke-dasharray=\"6,4\"/>\n"
          << "<text x=\"" << W - R + 35 << "\" y=\"" << legend_y + 4
          << "\" font-family=\"sans-serif\" font-size=\"10\">theory</text>\n";
      legend_y += 16;
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const std::vector<ResultRow>& rows, const std::filesystem::path& path,
               PlotAxes axes) {
  write_file(path, to_svg(rows, axes));
}

}  // namespace mkrisk
