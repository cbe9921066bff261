// Copyright 2026 The rbnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RBNOISE_CSV_HPP
#define RBNOISE_CSV_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbnoise/fitting.hpp"
#include "rbnoise/noise_gen.hpp"
#include "rbnoise/protocols.hpp"
#include "rbnoise/psd.hpp"

// File emission: CSV (comma-separated, header row, 17 significant digits so
// doubles round-trip exactly), human-readable fit reports, and FNV-1a
// checksums for the run manifest.

namespace rbnoise::io {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << content;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline const char* kind_name(proto::DecayCurve::Kind k) {
  switch (k) {
    case proto::DecayCurve::Kind::rb_fidelity: return "rb_fidelity";
    case proto::DecayCurve::Kind::visibility: return "visibility";
    case proto::DecayCurve::Kind::idle_error: return "idle_error";
    case proto::DecayCurve::Kind::p1_decay: return "p1_decay";
  }
  return "unknown";
}

inline proto::DecayCurve::Kind kind_from_name(const std::string& s) {
  if (s == "rb_fidelity") return proto::DecayCurve::Kind::rb_fidelity;
  if (s == "visibility") return proto::DecayCurve::Kind::visibility;
  if (s == "idle_error") return proto::DecayCurve::Kind::idle_error;
  if (s == "p1_decay") return proto::DecayCurve::Kind::p1_decay;
  throw std::invalid_argument("unknown curve kind: " + s);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

// Curve CSV: a "# kind: ..." comment, a header row, then x,y,yerr,n rows.
inline std::string decay_curve_csv(const proto::DecayCurve& c) {
  std::ostringstream out;
  out << "# kind: " << detail::kind_name(c.kind) << "\n";
  out << "x,y,yerr,n\n";
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    out << format_double(c.x[i]) << ',' << format_double(c.y[i]) << ','
        << format_double(c.yerr[i]) << ',' << c.n_trials << "\n";
  }
  return out.str();
}

inline void write_decay_curve_csv(const std::filesystem::path& path,
                                  const proto::DecayCurve& c) {
  write_text_file(path, decay_curve_csv(c));
}

inline proto::DecayCurve read_decay_curve_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path.string());
  }
  proto::DecayCurve c;
  std::string line;
  bool have_kind = false, have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# kind: ", 0) == 0) {
      std::string name = line.substr(8);
      if (!name.empty() && name.back() == '\r') name.pop_back();
      c.kind = detail::kind_from_name(name);
      have_kind = true;
      continue;
    }
    if (!have_header) {
      have_header = true;  // header row
      continue;
    }
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 4) {
      throw std::runtime_error("bad CSV row in " + path.string());
    }
    c.x.push_back(std::stod(cells[0]));
    c.y.push_back(std::stod(cells[1]));
    c.yerr.push_back(std::stod(cells[2]));
    c.n_trials = std::stoi(cells[3]);
  }
  if (!have_kind || !have_header) {
    throw std::runtime_error("malformed curve CSV: " + path.string());
  }
  c.validate();
  return c;
}

// Plot-data CSV with an extra fitted-model column.
inline std::string curve_with_model_csv(const proto::DecayCurve& c,
                                        const std::vector<double>& model) {
  std::ostringstream out;
  out << "# kind: " << detail::kind_name(c.kind) << "\n";
  out << "x,y,yerr,n,model\n";
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    out << format_double(c.x[i]) << ',' << format_double(c.y[i]) << ','
        << format_double(c.yerr[i]) << ',' << c.n_trials << ','
        << format_double(model[i]) << "\n";
  }
  return out.str();
}

inline std::string psd_csv(const psd::PsdEstimate& est,
                           const std::vector<double>* model = nullptr) {
  std::ostringstream out;
  out << (model ? "freq,value,se,n,model\n" : "freq,value,se,n\n");
  for (std::size_t i = 0; i < est.freq.size(); ++i) {
    out << format_double(est.freq[i]) << ',' << format_double(est.value[i])
        << ',' << format_double(est.se[i]) << ',' << est.n_avg[i];
    if (model) out << ',' << format_double((*model)[i]);
    out << "\n";
  }
  return out.str();
}

// Debug dump of a frequency trace as (t, value) rows.
inline std::string trace_csv(const gen::FrequencyTrace& trace,
                             std::size_t max_rows = 1 << 20) {
  std::ostringstream out;
  out << "t,value\n";
  using Kind = gen::FrequencyTrace::Kind;
  switch (trace.kind) {
    case Kind::constant:
      out << "0," << format_double(trace.constant_value) << "\n";
      break;
    case Kind::piecewise: {
      double t0 = 0.0;
      for (std::size_t i = 0; i < trace.levels.size() && i < max_rows; ++i) {
        out << format_double(t0) << ',' << format_double(trace.levels[i])
            << "\n";
        if (i < trace.switch_times.size()) t0 = trace.switch_times[i];
      }
      break;
    }
    case Kind::sampled:
      for (std::size_t i = 0; i < trace.samples.size() && i < max_rows; ++i) {
        out << format_double(i * trace.dt) << ','
            << format_double(trace.samples[i]) << "\n";
      }
      break;
  }
  return out.str();
}

// Human-readable fit report in the "value +- sigma" style.
inline std::string fit_report_text(const fit::FitReport& rep) {
  std::ostringstream out;
  out << "model: " << rep.model_name << "\n";
  for (std::size_t i = 0; i < rep.param_names.size(); ++i) {
    out << "  " << rep.param_names[i] << " = " << format_double(rep.params[i])
        << " +- " << format_double(rep.uncertainties[i]) << "\n";
  }
  out << "  chi2 = " << format_double(rep.chi2) << "  dof = " << rep.dof
      << "\n";
  out << "  converged = " << (rep.converged ? "yes" : "no")
      << "  iterations = " << rep.iterations << "\n";
  out << "  condition_number = " << format_double(rep.condition_number)
      << "\n";
  for (const auto& n : rep.notes) out << "  note: " << n << "\n";
  return out.str();
}

// FNV-1a 64-bit checksum, used by the run manifest.
inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a_file(const std::filesystem::path& path) {
  return fnv1a(read_text_file(path));
}

}  // namespace rbnoise::io

#endif  // RBNOISE_CSV_HPP
