#include "synccool/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "synccool/errors.hpp"

namespace synccool {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream is(line);
  while (std::getline(is, item, sep)) parts.push_back(item);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& text, const std::filesystem::path& path) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0') {
    throw ConsistencyError(path.string() + ": not a number '" + text + "'");
  }
  return v;
}

void write_units_line(std::ostream& out, const std::vector<std::string>& columns) {
  out << "# units:";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const std::string u = column_unit(columns[i]);
    out << (i ? ", " : " ") << columns[i] << " [" << (u.empty() ? "?" : u) << "]";
  }
  out << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string column_unit(const std::string& name) {
  static const std::map<std::string, std::string> units = {
      {"t", "1/omega_R"},
      {"x", "1/k"},
      {"x_lo", "1/k"},
      {"x_hi", "1/k"},
      {"p", "hbar k"},
      {"p_lo", "hbar k"},
      {"p_hi", "hbar k"},
      {"p2_mean", "(hbar k)^2"},
      {"p2_stderr", "(hbar k)^2"},
      {"p4_mean", "(hbar k)^4"},
      {"p2_inf", "(hbar k)^2"},
      {"p2_min", "(hbar k)^2"},
      {"p2", "(hbar k)^2"},
      {"kurtosis", "1"},
      {"kurtosis_stderr", "1"},
      {"xdagx_mean", "1"},
      {"xdagx_stderr", "1"},
      {"xdagx_mf", "1"},
      {"photon_number", "1"},
      {"x_abs2", "1"},
      {"arg_x", "rad"},
      {"cos_arg_x", "1"},
      {"bloch_excess", "1"},
      {"trajectory", "index"},
      {"atom", "index"},
      {"count", "1"},
      {"density", "1/unit"},
      {"omega", "omega_R"},
      {"abs_s", "arb"},
      {"re_s", "arb"},
      {"im_s", "arb"},
      {"magnitude", "arb"},
      {"s0_re", "1"},
      {"s0_im", "1"},
      {"z0", "1"},
      {"v_eff", "hbar omega_R"},
      {"gamma", "omega_R"},
      {"diffusion", "(hbar k)^2 omega_R"},
      {"delta", "omega_R"},
      {"delta_over_half_kappa", "1"},
      {"w", "omega_R"},
      {"w_min", "omega_R"},
      {"w_over_n_gamma_c", "1"},
      {"energy", "hbar omega_R"},
  };
  const auto it = units.find(name);
  return it == units.end() ? "" : it->second;
}

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw ConsistencyError("table row has the wrong width");
  rows.push_back(std::move(row));
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  std::ofstream out = open_out(path);
  write_units_line(out, table.columns);
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameter("cannot open " + path.string());
  Table t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      t.columns = split(line, ',');
      header = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : split(line, ',')) row.push_back(parse_double(cell, path));
    if (row.size() != t.columns.size()) {
      throw ConsistencyError(path.string() + ": row width differs from header");
    }
    t.rows.push_back(std::move(row));
  }
  if (!header) throw ConsistencyError(path.string() + ": no header line");
  return t;
}

void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& series) {
  series.validate();
  Table t;
  t.columns.push_back("t");
  for (const auto& [name, v] : series.channels) t.columns.push_back(name);
  t.rows.reserve(series.times.size());
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    std::vector<double> row{series.times[k]};
    for (const auto& [name, v] : series.channels) row.push_back(v[k]);
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
}

TimeSeries read_timeseries_csv(const std::filesystem::path& path) {
  const Table t = read_csv(path);
  if (t.columns.empty() || t.columns[0] != "t") {
    throw ConsistencyError(path.string() + ": first column must be t");
  }
  TimeSeries ts;
  for (const auto& row : t.rows) ts.times.push_back(row[0]);
  for (std::size_t c = 1; c < t.columns.size(); ++c) {
    std::vector<double> v;
    v.reserve(t.rows.size());
    for (const auto& row : t.rows) v.push_back(row[c]);
    ts.add_channel(t.columns[c], std::move(v));
  }
  return ts;
}

void write_snapshots_csv(const std::filesystem::path& path, const std::vector<Snapshot>& snaps,
                         int n_atoms) {
  Table t;
  t.columns = {"t", "trajectory", "atom", "x", "p"};
  for (const auto& s : snaps) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      t.rows.push_back({s.t, static_cast<double>(i / n_atoms), static_cast<double>(i % n_atoms),
                        s.x[i], s.p[i]});
    }
  }
  write_csv(path, t);
}

void write_histogram1d_csv(const std::filesystem::path& path, const Histogram1D& h,
                           const std::string& variable) {
  Table t;
  const std::string value = h.mode == HistNorm::counts ? "count" : "density";
  t.columns = {variable + "_lo", variable + "_hi", value};
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    t.rows.push_back({h.edges[i], h.edges[i + 1], h.counts[i]});
  }
  write_csv(path, t);
}

void write_histogram2d(const std::filesystem::path& path, const Histogram2D& h) {
  std::ofstream out = open_out(path);
  out << "# rows: x bins [1/k], columns: p bins [hbar k], values: "
      << (h.mode == HistNorm::counts ? "counts" : "density") << '\n';
  out << "# x_edges:";
  for (double e : h.x_edges) out << ' ' << format_double(e);
  out << "\n# p_edges:";
  for (double e : h.p_edges) out << ' ' << format_double(e);
  out << '\n';
  for (Eigen::Index i = 0; i < h.counts.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.counts.cols(); ++j) {
      out << (j ? " " : "") << format_double(h.counts(i, j));
    }
    out << '\n';
  }
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s) {
  Table t;
  t.columns = {"omega", "abs_s", "re_s", "im_s"};
  for (std::size_t i = 0; i < s.omega.size(); ++i) {
    t.rows.push_back({s.omega[i], std::abs(s.values[i]), s.values[i].real(), s.values[i].imag()});
  }
  write_csv(path, t);
}

void write_peaks_csv(const std::filesystem::path& path, const std::vector<Peak>& peaks) {
  Table t;
  t.columns = {"omega", "magnitude"};
  for (const auto& p : peaks) t.rows.push_back({p.omega, p.magnitude});
  write_csv(path, t);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
}

}  // namespace synccool
