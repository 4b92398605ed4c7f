#include "qpc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qpc/error.hpp"
#include "qpc/format.hpp"

namespace qpc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw RangeError(what);
}

double draw_poisson(double mean, std::mt19937_64& rng) {
  if (mean <= 0.0) return 0.0;
  std::poisson_distribution<long long> dist(mean);
  return static_cast<double>(dist(rng));
}

std::mt19937_64 point_generator(std::uint64_t seed, std::size_t index) {
  const auto i = static_cast<std::uint64_t>(index);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

void CountingConfig::validate() const {
  require(pair_rate > 0.0, "counting.pair_rate must be > 0");
  require(integration_time > 0.0, "counting.integration_time must be > 0");
  require(coincidence_window > 0.0, "counting.coincidence_window must be > 0");
  for (std::size_t i = 0; i < detectors.size(); ++i) {
    const std::string name = "detector" + std::to_string(i + 1);
    require(detectors[i].efficiency > 0.0 && detectors[i].efficiency <= 1.0,
            name + ".efficiency must be in (0, 1]");
    require(detectors[i].dark_rate >= 0.0, name + ".dark_rate must be >= 0");
  }
  losses.validate();
}

double accidental_rate(double s1, double s2, double window) {
  require(s1 >= 0.0 && s2 >= 0.0 && window >= 0.0, "accidental_rate inputs must be >= 0");
  return s1 * s2 * window;
}

double singles_rate(const CountingConfig& cfg, std::size_t detector) {
  const auto& d = cfg.detectors.at(detector);
  const double eta_c = cfg.losses.facet_transmission();
  const double eta = cfg.losses.chip_transmission();
  return cfg.pair_rate * eta_c * eta_c * eta * d.efficiency + d.dark_rate;
}

double expected_coincidence_rate(double model_prob, const CountingConfig& cfg) {
  require(model_prob >= 0.0 && model_prob <= 1.0, "model probability must be in [0, 1]");
  const double eta_c = cfg.losses.facet_transmission();
  const double eta = cfg.losses.chip_transmission();
  return cfg.pair_rate * std::pow(eta_c, 4) * eta * eta * cfg.detectors[0].efficiency *
         cfg.detectors[1].efficiency * model_prob;
}

SweepRecord simulate_sweep(const std::vector<double>& control, const ProbabilityFn& prob_fn,
                           const CountingConfig& cfg, unsigned threads) {
  cfg.validate();
  const double t = cfg.integration_time;
  const double s1_rate = singles_rate(cfg, 0);
  const double s2_rate = singles_rate(cfg, 1);
  const double true_accidentals = accidental_rate(s1_rate, s2_rate, cfg.coincidence_window);

  // Model probabilities are evaluated up front so prob_fn need not be thread-safe.
  std::vector<double> rates(control.size());
  for (std::size_t i = 0; i < control.size(); ++i) {
    rates[i] = expected_coincidence_rate(prob_fn(control[i]), cfg);
  }

  SweepRecord rec;
  rec.points.resize(control.size());
  auto simulate_point = [&](std::size_t i) {
    auto rng = point_generator(cfg.rng_seed, i);
    SweepPoint& p = rec.points[i];
    p.control = control[i];
    p.singles1 = draw_poisson(s1_rate * t, rng);
    p.singles2 = draw_poisson(s2_rate * t, rng);
    p.raw = draw_poisson((rates[i] + true_accidentals) * t, rng);
    p.accidental = accidental_rate(p.singles1 / t, p.singles2 / t, cfg.coincidence_window) * t;
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(control.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < control.size(); ++i) simulate_point(i);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < control.size(); i += workers) simulate_point(i);
      });
    }
  }
  return subtract_accidentals(std::move(rec));
}

SweepRecord subtract_accidentals(SweepRecord rec) {
  for (auto& p : rec.points) {
    p.corrected = p.raw - p.accidental;
    p.error = std::sqrt(std::max(0.0, p.raw));
  }
  return rec;
}

void write_csv(std::ostream& os, const SweepRecord& rec) {
  os << kSweepCsvHeader << '\n';
  for (const auto& p : rec.points) {
    os << format_double(p.control) << ',' << format_double(p.raw) << ','
       << format_double(p.singles1) << ',' << format_double(p.singles2) << ','
       << format_double(p.accidental) << ',' << format_double(p.corrected) << ','
       << format_double(p.error) << '\n';
  }
}

SweepRecord read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty sweep CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepCsvHeader) {
    throw std::runtime_error("unexpected sweep CSV header '" + line + "', expected '" +
                             kSweepCsvHeader + "'");
  }
  SweepRecord rec;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    try {
      while (std::getline(ss, cell, ',')) fields.push_back(parse_double(cell));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("sweep CSV line " + std::to_string(line_no) + ": " + e.what());
    }
    if (fields.size() != 7) {
      throw std::runtime_error("sweep CSV line " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected 7");
    }
    rec.points.push_back({fields[0], fields[1], fields[2], fields[3], fields[4], fields[5],
                          fields[6]});
  }
  return rec;
}

nlohmann::ordered_json to_json(const SweepRecord& rec) {
  nlohmann::ordered_json j;
  auto column = [&](const char* name, double SweepPoint::*field) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : rec.points) arr.push_back(p.*field);
    j[name] = std::move(arr);
  };
  column("control", &SweepPoint::control);
  column("raw", &SweepPoint::raw);
  column("singles1", &SweepPoint::singles1);
  column("singles2", &SweepPoint::singles2);
  column("accidental", &SweepPoint::accidental);
  column("corrected", &SweepPoint::corrected);
  column("error", &SweepPoint::error);
  return j;
}

SweepRecord sweep_record_from_json(const nlohmann::ordered_json& j) {
  const auto& control = j.at("control");
  SweepRecord rec;
  rec.points.resize(control.size());
  auto column = [&](const char* name, double SweepPoint::*field) {
    const auto& arr = j.at(name);
    if (arr.size() != control.size()) {
      throw std::runtime_error(std::string("sweep JSON column '") + name + "' has wrong length");
    }
    for (std::size_t i = 0; i < arr.size(); ++i) rec.points[i].*field = arr[i].get<double>();
  };
  column("control", &SweepPoint::control);
  column("raw", &SweepPoint::raw);
  column("singles1", &SweepPoint::singles1);
  column("singles2", &SweepPoint::singles2);
  column("accidental", &SweepPoint::accidental);
  column("corrected", &SweepPoint::corrected);
  column("error", &SweepPoint::error);
  return rec;
}

}  // namespace qpc
