#pragma once

// Report serialization: canonical CSV (round-trippable, byte-deterministic),
// log-log SVG convergence plots with reference-slope guides, and a JSON run
// manifest keyed by a hash of the generating config.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlifem/studies.hpp"

namespace nlifem {

inline const char* tool_version() { return "nlifem 1.0.0"; }

// "2^-5" or a plain decimal
inline double parse_resolution(const std::string& s) {
  if (s.rfind("2^", 0) == 0) {
    int e = 0;
    try {
      e = std::stoi(s.substr(2));
    } catch (const std::exception&) {
      throw config_error("cannot parse resolution '" + s + "'");
    }
    return std::ldexp(1.0, e);
  }
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    require(pos == s.size(), "trailing characters in resolution '" + s + "'");
    return v;
  } catch (const config_error&) {
    throw;
  } catch (const std::exception&) {
    throw config_error("cannot parse resolution '" + s + "'");
  }
}

namespace detail {

inline std::string sci(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.5e", v);
  return buf;
}

}  // namespace detail

inline std::string csv_header(int nfields) {
  std::string h = "level,h";
  for (int i = 1; i <= nfields; ++i) h += ",delta" + std::to_string(i);
  h += ",err_energy,rate_energy,err_l2,rate_l2,err_max,rate_max";
  return h;
}

inline std::string csv_string(const StudyReport& rep) {
  int nf = rep.rows.empty() ? resolve_example(rep.cfg).n_fields()
                            : int(rep.rows.front().deltas.size());
  std::string out = csv_header(nf) + "\n";
  for (const StudyRow& r : rep.rows) {
    out += std::to_string(r.level);
    out += "," + detail::sci(r.h);
    for (int i = 0; i < nf; ++i)
      out += "," + detail::sci(i < int(r.deltas.size())
                                   ? r.deltas[i]
                                   : std::numeric_limits<double>::quiet_NaN());
    out += "," + detail::sci(r.err_energy) + "," + detail::sci(r.rate_energy);
    out += "," + detail::sci(r.err_l2) + "," + detail::sci(r.rate_l2);
    out += "," + detail::sci(r.err_max) + "," + detail::sci(r.rate_max);
    out += "\n";
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  // NaN for empty cells
};

// parses emitted CSV (comment lines and repeated block headers are skipped)
inline CsvTable parse_csv(std::istream& in) {
  CsvTable t;
  std::string line, header_line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header_line.empty()) {
      header_line = line;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) t.header.push_back(cell);
      continue;
    }
    if (line == header_line) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (cell.empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        try {
          row.push_back(std::stod(cell));
        } catch (const std::exception&) {
          throw config_error("csv: non-numeric cell '" + cell + "'");
        }
      }
    }
    while (row.size() < t.header.size())
      row.push_back(std::numeric_limits<double>::quiet_NaN());
    t.rows.push_back(std::move(row));
  }
  require(!t.header.empty(), "csv: no header line");
  return t;
}

inline CsvTable parse_csv_file(const std::string& path) {
  std::ifstream in(path);
  require(bool(in), "csv: cannot open " + path);
  return parse_csv(in);
}

// log2(h or delta) on x, log10(error) on y; one polyline per norm series plus
// reference-slope guides for orders k and k+1; axes drawn as <line>
inline std::string svg_string(const StudyReport& rep) {
  struct Series {
    const char* name;
    const char* color;
    std::vector<std::pair<double, double>> pts;
  };
  auto xval = [&](const StudyRow& r) {
    double v = (rep.xaxis == "delta" && !r.deltas.empty()) ? r.deltas[0] : r.h;
    return std::log2(v);
  };
  std::vector<Series> series = {{"energy", "#1f77b4", {}},
                                {"l2", "#d62728", {}},
                                {"max", "#2ca02c", {}}};
  for (const StudyRow& r : rep.rows) {
    double errs[3] = {r.err_energy, r.err_l2, r.err_max};
    for (int s = 0; s < 3; ++s)
      if (errs[s] > 0.0 && std::isfinite(xval(r)))
        series[s].pts.push_back({xval(r), std::log10(errs[s])});
  }
  series.erase(std::remove_if(series.begin(), series.end(),
                              [](const Series& s) { return s.pts.size() < 2; }),
               series.end());

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (auto [x, y] : s.pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (series.empty()) {
    xmin = -5, xmax = -2, ymin = -6, ymax = 0;
  }

  // guides for orders k and k+1 anchored above the first series
  const double lg2 = std::log10(2.0);
  struct Guide {
    int order;
    std::pair<double, double> a, b;
  };
  std::vector<Guide> guides;
  if (!series.empty()) {
    auto [x0, y0] = series.front().pts.back();
    for (int ord : {rep.cfg.k, rep.cfg.k + 1}) {
      double c = y0 + 0.35 - ord * lg2 * x0;
      guides.push_back({ord,
                        {xmin, c + ord * lg2 * xmin},
                        {xmax, c + ord * lg2 * xmax}});
      ymin = std::min({ymin, guides.back().a.second, guides.back().b.second});
      ymax = std::max({ymax, guides.back().a.second, guides.back().b.second});
    }
  }
  if (xmax - xmin < 1e-9) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-9) ymax = ymin + 1.0;

  const double W = 640, H = 480, ml = 70, mr = 30, mt = 30, mb = 50;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };
  auto fmt = [](double v) {
    char b[32];
    std::snprintf(b, sizeof(b), "%.2f", v);
    return std::string(b);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(H - mb) + "\" x2=\"" + fmt(W - mr) +
         "\" y2=\"" + fmt(H - mb) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(mt) + "\" x2=\"" + fmt(ml) +
         "\" y2=\"" + fmt(H - mb) + "\" stroke=\"black\"/>\n";
  std::string xlabel = rep.xaxis == "delta" ? "log2(delta)" : "log2(h)";
  svg += "<text x=\"" + fmt(0.5 * W) + "\" y=\"" + fmt(H - 12) +
         "\" font-size=\"14\" text-anchor=\"middle\">" + xlabel + "</text>\n";
  svg += "<text x=\"18\" y=\"" + fmt(0.5 * H) +
         "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fmt(0.5 * H) + ")\">log10(error)</text>\n";

  for (const auto& g : guides) {
    svg += "<polyline fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"6 4\" points=\"";
    svg += fmt(px(g.a.first)) + "," + fmt(py(g.a.second)) + " ";
    svg += fmt(px(g.b.first)) + "," + fmt(py(g.b.second));
    svg += "\"/>\n";
    svg += "<text x=\"" + fmt(px(g.b.first) - 60) + "\" y=\"" +
           fmt(py(g.b.second) - 6) + "\" font-size=\"12\" fill=\"#777777\">order " +
           std::to_string(g.order) + "</text>\n";
  }
  for (const auto& s : series) {
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += s.color;
    svg += "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.pts.size(); ++i) {
      if (i) svg += " ";
      svg += fmt(px(s.pts[i].first)) + "," + fmt(py(s.pts[i].second));
    }
    svg += "\"/>\n";
    for (auto [x, y] : s.pts)
      svg += "<circle cx=\"" + fmt(px(x)) + "\" cy=\"" + fmt(py(y)) +
             "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
    svg += "<text x=\"" + fmt(px(s.pts.front().first) + 6) + "\" y=\"" +
           fmt(py(s.pts.front().second) - 6) + "\" font-size=\"12\" fill=\"" + s.color +
           "\">" + s.name + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline std::string canonical_config_string(const StudyConfig& cfg) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::string s;
  s += "example=" + cfg.example;
  s += ";kind=" + std::string(study_kind_name(cfg.kind));
  s += ";k=" + std::to_string(cfg.k);
  s += ";levels=";
  for (int l : cfg.levels) s += std::to_string(l) + ",";
  s += ";delta=";
  for (double d : cfg.delta) s += num(d) + ",";
  s += ";multiples=";
  for (int m : cfg.multiples) s += std::to_string(m) + ",";
  s += ";coupling=";
  s += (cfg.coupling == Coupling::identified ? "identified" : "decoupled");
  s += ";corrected=" + std::to_string(int(cfg.corrected_bc));
  s += ";halvings=" + std::to_string(cfg.halvings);
  s += ";delta1=" + num(cfg.delta1);
  s += ";ratio=" + num(cfg.delta_ratio);
  s += ";seeds=" + std::to_string(cfg.seeds);
  s += ";rng=" + std::to_string(cfg.rng_seed);
  s += ";quad=" + std::to_string(cfg.quad_stiffness);
  if (!cfg.custom_sig.empty()) s += ";custom=" + cfg.custom_sig;
  return s;
}

inline std::string config_hash(const StudyConfig& cfg) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_config_string(cfg))));
  return buf;
}

struct RunManifest {
  std::string tool = tool_version();
  std::string config_hash;
  std::string timestamp;
  std::vector<std::string> outputs;
  nlohmann::json studies = nlohmann::json::array();
  bool all_pass = true;

  nlohmann::json to_json() const {
    return nlohmann::json{{"tool", tool},
                          {"config_hash", config_hash},
                          {"timestamp", timestamp},
                          {"outputs", outputs},
                          {"studies", studies},
                          {"all_pass", all_pass}};
  }
};

inline std::string iso_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void manifest_add(RunManifest& man, const StudyReport& rep) {
  nlohmann::json js;
  js["kind"] = study_kind_name(rep.cfg.kind);
  js["example"] = rep.cfg.example;
  js["k"] = rep.cfg.k;
  js["pass"] = rep.pass;
  if (std::isfinite(rep.observed_order)) js["observed_order"] = rep.observed_order;
  js["notes"] = rep.notes;
  man.studies.push_back(js);
  man.all_pass = man.all_pass && rep.pass;
}

// writes the CSV (and SVG when a path is given) and returns the manifest entry
inline RunManifest write_report(const StudyReport& rep, const std::string& csv_path,
                                const std::string& svg_path = "") {
  RunManifest man;
  man.config_hash = config_hash(rep.cfg);
  man.timestamp = iso_timestamp();
  {
    std::ofstream out(csv_path, std::ios::binary);
    require(bool(out), "report: cannot write " + csv_path);
    out << csv_string(rep);
  }
  man.outputs.push_back(csv_path);
  if (!svg_path.empty()) {
    std::ofstream out(svg_path, std::ios::binary);
    require(bool(out), "report: cannot write " + svg_path);
    out << svg_string(rep);
    man.outputs.push_back(svg_path);
  }
  manifest_add(man, rep);
  return man;
}

}  // namespace nlifem
