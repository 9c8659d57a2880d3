#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nmchain/errors.hpp"
#include "nmchain/markovian.hpp"
#include "nmchain/run.hpp"

using namespace nmchain;
namespace fs = std::filesystem;

namespace {

Scenario small_scenario() {
  return parse_scenario(R"({
    "chain": {"n_qubits": 2},
    "markovian_gamma": 0.01,
    "reservoirs": [{"family": "lorentzian"}, {"family": "lorentzian_squared"}, {"family": "ohmic"},
                   {"family": "markovian", "name": "same", "gamma_m": 0.01}],
    "measures": ["trace", "hellinger", "bures", "fidelity-f3"],
    "time": {"t_end": 30, "n_samples": 301}
  })");
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nmchain_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(RunScenario, ProducesEverySeriesOnOneGrid) {
  const RunRecord rec = run_scenario(small_scenario());
  EXPECT_TRUE(rec.all_ok());
  ASSERT_EQ(rec.reservoirs.size(), 4u);
  EXPECT_EQ(rec.times.size(), 301u);
  for (const auto& r : rec.reservoirs) {
    EXPECT_EQ(r.amplitudes.times, rec.times) << r.name;
    EXPECT_EQ(r.distances.size(), 4u);
    for (const auto& [m, s] : r.distances) {
      EXPECT_EQ(s.times, rec.times);
      if (m != qsd::Measure::fidelity_f3) EXPECT_LE(s.values[0], 1e-10);
    }
  }
  // A Markovian "reservoir" equal to the reference has zero distance.
  for (double v : rec.result("same").distances.at(qsd::Measure::trace).values) EXPECT_LE(v, 1e-9);
  EXPECT_FALSE(rec.result("same").environment.has_value());
  EXPECT_TRUE(rec.result("ohmic").environment.has_value());
}

TEST(RunScenario, EmptyMeasureListGivesTrajectoriesOnly) {
  Scenario sc = small_scenario();
  sc.measures.clear();
  const RunRecord rec = run_scenario(sc);
  for (const auto& r : rec.reservoirs) {
    EXPECT_TRUE(r.distances.empty());
    EXPECT_EQ(r.amplitudes.size(), 301u);
  }
}

TEST(RunScenario, OneFailureDoesNotSpoilTheOthers) {
  Scenario sc = small_scenario();
  sc.solver.backend = Backend::laplace;
  sc.solver.inversion = InversionMethod::dehoog;  // cannot resolve these oscillations
  sc.time.t_end = 200.0;
  const RunRecord rec = run_scenario(sc);
  EXPECT_FALSE(rec.all_ok());
  EXPECT_FALSE(rec.result("lorentzian").ok);
  EXPECT_FALSE(rec.result("lorentzian").error.empty());
  EXPECT_TRUE(rec.result("same").ok);
  EXPECT_EQ(rec.result("same").amplitudes.size(), 301u);

  const fs::path dir = temp_dir("isolation");
  emit(rec, dir);
  EXPECT_FALSE(fs::exists(dir / "amplitudes_lorentzian.csv"));
  EXPECT_TRUE(fs::exists(dir / "amplitudes_same.csv"));
  const RunRecord back = load_record(dir);
  EXPECT_FALSE(back.result("lorentzian").ok);
  EXPECT_EQ(back.result("lorentzian").error, rec.result("lorentzian").error);
}

TEST(Emit, NamingContractAndRoundTrip) {
  const RunRecord rec = run_scenario(small_scenario());
  const fs::path dir = temp_dir("roundtrip");
  emit(rec, dir);
  for (const char* f : {"meta.json", "amplitudes_reference.csv", "population_reference_site2.csv",
                        "qsd_trace_ohmic.csv", "qsd_hellinger_lorentzian.csv", "qsd_bures_lorentzian_squared.csv",
                        "qsd_fidelity-f3_same.csv", "env_population_ohmic.csv", "amplitudes_ohmic.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(slurp(dir / "qsd_trace_ohmic.csv").substr(0, 8), "t,value\n");
  EXPECT_EQ(slurp(dir / "amplitudes_ohmic.csv").substr(0, 28), "t,re_c1,im_c1,re_c2,im_c2\n0,");

  const RunRecord back = load_record(dir);
  EXPECT_EQ(back.scenario_hash, rec.scenario_hash);
  EXPECT_EQ(back.times, rec.times);
  EXPECT_EQ(back.reference.amplitudes, rec.reference.amplitudes);
  EXPECT_EQ(back.reference_half_life, rec.reference_half_life);
  for (const auto& r : rec.reservoirs) {
    const auto& b = back.result(r.name);
    EXPECT_EQ(b.amplitudes.amplitudes, r.amplitudes.amplitudes) << r.name;
    EXPECT_EQ(b.half_life, r.half_life);
    ASSERT_EQ(b.distances.size(), r.distances.size());
    for (const auto& [m, s] : r.distances) EXPECT_EQ(b.distances.at(m).values, s.values);
    EXPECT_EQ(b.environment.has_value(), r.environment.has_value());
    if (r.environment) {
      EXPECT_EQ(b.environment->values, r.environment->values);
      EXPECT_EQ(b.environment->raw, r.environment->raw);
    }
  }

  // Emitting the reloaded record reproduces the directory byte for byte.
  const fs::path again = temp_dir("roundtrip_again");
  emit(back, again);
  for (const auto& e : fs::directory_iterator(dir)) {
    EXPECT_EQ(slurp(e.path()), slurp(again / e.path().filename())) << e.path().filename();
  }
}

TEST(Emit, DeterministicAcrossRuns) {
  const fs::path a = temp_dir("det_a");
  const fs::path b = temp_dir("det_b");
  emit(run_scenario(small_scenario()), a);
  emit(run_scenario(small_scenario()), b);
  const auto rep = compare_runs(a, b, 0.0);
  EXPECT_TRUE(rep.match);
  EXPECT_EQ(rep.max_difference, 0.0);
  for (const auto& e : fs::directory_iterator(a)) EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename()));
}

TEST(Compare, ReportsDifferencesAndMissingFiles) {
  const fs::path a = temp_dir("cmp_a");
  const fs::path b = temp_dir("cmp_b");
  Scenario sc = small_scenario();
  emit(run_scenario(sc), a);
  sc.solver.backend = Backend::laplace;
  emit(run_scenario(sc), b);
  const auto loose = compare_runs(a, b, 1e-4);
  EXPECT_TRUE(loose.match) << (loose.problems.empty() ? "" : loose.problems.front());
  EXPECT_GT(loose.max_difference, 0.0);
  EXPECT_FALSE(compare_runs(a, b, 1e-14).match);
  fs::remove(b / "qsd_trace_ohmic.csv");
  const auto missing = compare_runs(a, b, 1e-4);
  EXPECT_FALSE(missing.match);
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-310, 0.0}) {
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(Calibrate, LeavesAMatchingDensityUnchanged) {
  const SpectralDensity m = Markovian{0.01};
  int calls = 0;
  HalfLifeFn fn = [&](const SpectralDensity& sd) -> std::optional<double> {
    ++calls;
    return std::log(2.0) / (2.0 * sd.as<Markovian>()->gamma_m);
  };
  const auto out = calibrate(m, std::log(2.0) / 0.02, "gamma_m", 0.001, 0.1, 0.05, fn);
  EXPECT_EQ(out.density.as<Markovian>()->gamma_m, 0.01);
  EXPECT_EQ(calls, 1);
}

TEST(Calibrate, BisectsAMonotoneResponse) {
  HalfLifeFn fn = [](const SpectralDensity& sd) -> std::optional<double> {
    return 2.0 * std::log(2.0) / sd.as<Lorentzian>()->gamma;
  };
  const auto out = calibrate(Lorentzian{1.0, 0.5, 0.0}, 34.657, "gamma", 0.001, 1.0, 0.01, fn);
  ASSERT_TRUE(out.half_life.has_value());
  EXPECT_NEAR(*out.half_life, 34.657, 0.01 * 34.657);
  EXPECT_NEAR(out.parameter, 0.04, 0.001);
}

TEST(Calibrate, BracketThatMissesTheTargetFails) {
  HalfLifeFn fn = [](const SpectralDensity& sd) -> std::optional<double> {
    return 2.0 * std::log(2.0) / sd.as<Lorentzian>()->gamma;
  };
  EXPECT_THROW(calibrate(Lorentzian{1.0, 0.5, 0.0}, 34.657, "gamma", 10.0, 20.0, 0.05, fn), CalibrationError);
  EXPECT_THROW(calibrate(Lorentzian{}, 34.657, "omega_c", 1.0, 2.0, 0.05, fn), ValidationError);
}

TEST(Calibrate, SingleQubitLorentzianNearTheReferenceWidth) {
  Scenario sc = parse_scenario(R"({
    "reservoirs": [{"family": "lorentzian"}],
    "time": {"t_end": 200, "n_samples": 2048},
    "solver": {"backend": "laplace"},
    "calibration": {"reservoir": "lorentzian", "free_parameter": "gamma", "bracket": [0.005, 0.3]}
  })");
  const auto out = calibrate_reservoir(sc, "lorentzian");
  ASSERT_TRUE(out.half_life.has_value());
  EXPECT_NEAR(*out.half_life, out.target, 0.05 * out.target);
  EXPECT_GT(out.parameter, 0.015);
  EXPECT_LT(out.parameter, 0.06);
}

TEST(Calibrate, ShippedScenarioIsValid) {
  for (const char* f : {"single_qubit.json", "five_qubits.json"}) {
    EXPECT_NO_THROW(load_scenario(fs::path(NMCHAIN_SCENARIO_DIR) / f)) << f;
  }
}
