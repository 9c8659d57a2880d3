#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nmchain/errors.hpp"
#include "nmchain/run.hpp"

namespace nmchain {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_table(const fs::path& file, const Table& table) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
  if (!out) throw Error("failed while writing " + file.string());
}

double parse_double(std::string_view s, const fs::path& file) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return v;
  // from_chars rejects "inf"/"nan" spellings produced by to_chars on some
  // libraries; fall back to strtod for those.
  const std::string copy(s);
  char* end = nullptr;
  v = std::strtod(copy.c_str(), &end);
  if (end == copy.c_str() || *end != '\0') {
    throw ValidationError("bad number '" + copy + "' in " + file.string());
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Table read_table(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + file.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(file.string() + " is empty");
  for (auto h : split(line)) t.header.emplace_back(h);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw ValidationError(file.string() + ": row with " + std::to_string(cells.size()) +
                            " cells, header has " + std::to_string(t.header.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) row.push_back(parse_double(c, file));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table series_table(const std::vector<double>& times, const std::vector<double>& values) {
  Table t;
  t.header = {"t", "value"};
  t.rows.reserve(times.size());
  for (std::size_t r = 0; r < times.size(); ++r) t.rows.push_back({times[r], values[r]});
  return t;
}

Table amplitude_table(const AmplitudeTrajectory& traj) {
  Table t;
  t.header = {"t"};
  for (int i = 1; i <= traj.n_sites(); ++i) {
    t.header.push_back("re_c" + std::to_string(i));
    t.header.push_back("im_c" + std::to_string(i));
  }
  for (std::size_t r = 0; r < traj.size(); ++r) {
    std::vector<double> row{traj.times[r]};
    for (int i = 0; i < traj.n_sites(); ++i) {
      row.push_back(traj.amplitudes(static_cast<Eigen::Index>(r), i).real());
      row.push_back(traj.amplitudes(static_cast<Eigen::Index>(r), i).imag());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

AmplitudeTrajectory amplitudes_from(const Table& t, const fs::path& file) {
  if (t.header.empty() || t.header[0] != "t" || t.header.size() % 2 != 1) {
    throw ValidationError(file.string() + " is not an amplitude table");
  }
  const int n = static_cast<int>(t.header.size() / 2);
  AmplitudeTrajectory traj;
  traj.frame = Frame::lab;
  traj.amplitudes.resize(static_cast<Eigen::Index>(t.rows.size()), n);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    traj.times.push_back(t.rows[r][0]);
    for (int i = 0; i < n; ++i) {
      traj.amplitudes(static_cast<Eigen::Index>(r), i) = cplx(t.rows[r][1 + 2 * i], t.rows[r][2 + 2 * i]);
    }
  }
  return traj;
}

std::vector<double> values_from(const Table& t, const fs::path& file) {
  if (t.header != std::vector<std::string>{"t", "value"}) {
    throw ValidationError(file.string() + " is not a t,value table");
  }
  std::vector<double> v;
  v.reserve(t.rows.size());
  for (const auto& row : t.rows) v.push_back(row[1]);
  return v;
}

void write_trajectory(const fs::path& dir, const std::string& tag, const AmplitudeTrajectory& traj) {
  write_table(dir / ("amplitudes_" + tag + ".csv"), amplitude_table(traj));
  for (int i = 0; i < traj.n_sites(); ++i) {
    write_table(dir / ("population_" + tag + "_site" + std::to_string(i + 1) + ".csv"),
                series_table(traj.times, traj.population(i)));
  }
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
json number_or_null(std::optional<double> x) { return x ? number_or_null(*x) : json(nullptr); }

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

double number_or_nan(const json& j, const char* key) {
  return optional_number(j, key).value_or(std::numeric_limits<double>::quiet_NaN());
}

}  // namespace

void emit(const RunRecord& record, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

  json meta;
  meta["format"] = 1;
  meta["scenario_hash"] = record.scenario_hash;
  meta["scenario"] = json::parse(to_json(record.scenario));
  meta["reference"] = {{"gamma_m", record.scenario.markovian_gamma},
                       {"half_life", number_or_null(record.reference_half_life)}};
  write_trajectory(dir, "reference", record.reference);

  meta["reservoirs"] = json::array();
  for (const auto& r : record.reservoirs) {
    json m;
    m["name"] = r.name;
    m["family"] = std::string(r.density.family_tag());
    m["status"] = r.ok ? "ok" : "failed";
    if (!r.ok) m["error"] = r.error;
    m["backend"] = r.report.backend;
    m["step"] = number_or_null(r.report.step);
    m["convergence_change"] = number_or_null(r.report.convergence_change);
    m["inversion_method"] = r.report.inversion_method;
    m["half_life"] = number_or_null(r.half_life);
    if (r.warning) m["warning"] = *r.warning;
    if (r.ok) {
      write_trajectory(dir, r.name, r.amplitudes);
      if (r.environment) {
        const auto& env = *r.environment;
        write_table(dir / ("env_population_" + r.name + ".csv"), series_table(r.amplitudes.times, env.values));
        write_table(dir / ("env_population_raw_" + r.name + ".csv"), series_table(r.amplitudes.times, env.raw));
        m["environment"] = {{"max_clamp", env.max_clamp}, {"clamp_exceeded", env.clamp_exceeded}};
      }
      m["measures"] = json::array();
      for (const auto& [measure, series] : r.distances) {
        const std::string tag(qsd::to_string(measure));
        m["measures"].push_back(tag);
        write_table(dir / ("qsd_" + tag + "_" + r.name + ".csv"), series_table(series.times, series.values));
      }
    }
    meta["reservoirs"].push_back(m);
  }
  std::ofstream out(dir / "meta.json", std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / "meta.json").string());
  out << meta.dump(2) << '\n';
}

RunRecord load_record(const fs::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) throw ValidationError("no meta.json in " + dir.string());
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("meta.json: " + std::string(e.what()));
  }
  RunRecord rec;
  rec.scenario = parse_scenario(meta.at("scenario").dump());
  rec.scenario_hash = meta.at("scenario_hash").get<std::string>();
  rec.reference_half_life = optional_number(meta.at("reference"), "half_life");
  const fs::path ref_file = dir / "amplitudes_reference.csv";
  rec.reference = amplitudes_from(read_table(ref_file), ref_file);
  rec.times = rec.reference.times;

  for (const auto& m : meta.at("reservoirs")) {
    ReservoirResult r;
    r.name = m.at("name").get<std::string>();
    r.density = rec.scenario.reservoir(r.name).density;
    r.ok = m.at("status").get<std::string>() == "ok";
    if (m.contains("error")) r.error = m.at("error").get<std::string>();
    r.report.backend = m.value("backend", std::string());
    r.report.step = number_or_nan(m, "step");
    r.report.convergence_change = number_or_nan(m, "convergence_change");
    r.report.inversion_method = m.value("inversion_method", std::string());
    r.half_life = optional_number(m, "half_life");
    if (m.contains("warning")) r.warning = m.at("warning").get<std::string>();
    if (r.ok) {
      const fs::path amp = dir / ("amplitudes_" + r.name + ".csv");
      r.amplitudes = amplitudes_from(read_table(amp), amp);
      if (m.contains("environment")) {
        EnvironmentPopulation env;
        const fs::path vf = dir / ("env_population_" + r.name + ".csv");
        const fs::path rf = dir / ("env_population_raw_" + r.name + ".csv");
        env.values = values_from(read_table(vf), vf);
        env.raw = values_from(read_table(rf), rf);
        env.max_clamp = m.at("environment").at("max_clamp").get<double>();
        env.clamp_exceeded = m.at("environment").at("clamp_exceeded").get<bool>();
        r.environment = std::move(env);
      }
      for (const auto& tag : m.value("measures", json::array())) {
        const auto measure = qsd::measure_from_string(tag.get<std::string>());
        const fs::path f = dir / ("qsd_" + tag.get<std::string>() + "_" + r.name + ".csv");
        const Table t = read_table(f);
        qsd::QsdSeries s;
        s.measure = measure;
        s.values = values_from(t, f);
        for (const auto& row : t.rows) s.times.push_back(row[0]);
        r.distances.emplace(measure, std::move(s));
      }
    }
    rec.reservoirs.push_back(std::move(r));
  }
  return rec;
}

CompareReport compare_runs(const fs::path& a, const fs::path& b, double tol) {
  CompareReport rep;
  auto fail = [&rep](std::string msg) {
    rep.match = false;
    rep.problems.push_back(std::move(msg));
  };
  auto csv_files = [&](const fs::path& dir) {
    std::set<std::string> names;
    if (!fs::is_directory(dir)) throw ValidationError(dir.string() + " is not a directory");
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".csv") names.insert(e.path().filename().string());
    }
    return names;
  };
  const auto files_a = csv_files(a);
  const auto files_b = csv_files(b);
  for (const auto& f : files_a) {
    if (!files_b.count(f)) fail(f + " only in " + a.string());
  }
  for (const auto& f : files_b) {
    if (!files_a.count(f)) fail(f + " only in " + b.string());
  }
  for (const auto& f : files_a) {
    if (!files_b.count(f)) continue;
    const Table ta = read_table(a / f);
    const Table tb = read_table(b / f);
    if (ta.header != tb.header || ta.rows.size() != tb.rows.size()) {
      fail(f + ": table shapes differ");
      continue;
    }
    double worst = 0.0;
    std::size_t worst_row = 0;
    std::size_t worst_col = 0;
    for (std::size_t r = 0; r < ta.rows.size(); ++r) {
      for (std::size_t c = 0; c < ta.header.size(); ++c) {
        const double x = ta.rows[r][c];
        const double y = tb.rows[r][c];
        const double d = (x == y) ? 0.0 : std::abs(x - y);
        if (!(d <= worst)) {
          worst = std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
          worst_row = r;
          worst_col = c;
        }
      }
    }
    rep.max_difference = std::max(rep.max_difference, worst);
    if (worst > tol) {
      fail(f + ": max difference " + format_double(worst) + " in column '" + ta.header[worst_col] +
           "' at row " + std::to_string(worst_row + 1));
    }
  }
  return rep;
}

}  // namespace nmchain
