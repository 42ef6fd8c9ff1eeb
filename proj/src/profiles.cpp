#include "vvc/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "vvc/error.hpp"
#include "vvc/numfmt.hpp"
#include "vvc/rng.hpp"

namespace vvc {

LoadProfileSet::LoadProfileSet(int n_profiles, int horizon, std::vector<std::string> keys,
                               std::vector<double> values, double scale, std::uint64_t seed)
    : n_profiles_(n_profiles), horizon_(horizon), keys_(std::move(keys)), values_(std::move(values)),
      scale_(scale), seed_(seed) {
  const auto expected = static_cast<std::size_t>(n_profiles_) * keys_.size() * static_cast<std::size_t>(horizon_);
  if (n_profiles_ < 1 || horizon_ < 1 || values_.size() != expected)
    throw Error(ErrorCode::InvalidParameter, "profile set dimensions do not match its values");
  if (std::any_of(values_.begin(), values_.end(), [](double v) { return !(v >= 0.0) || !std::isfinite(v); }))
    throw Error(ErrorCode::InvalidParameter, "profile multipliers must be finite and non-negative");
}

std::size_t LoadProfileSet::key_index(const std::string& key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) throw Error(ErrorCode::InvalidParameter, "no load profile for key '" + key + "'");
  return static_cast<std::size_t>(it - keys_.begin());
}

double LoadProfileSet::multiplier(int profile, std::size_t key, int hour) const {
  const int h = hour % horizon_;
  return values_[(static_cast<std::size_t>(profile) * keys_.size() + key) * static_cast<std::size_t>(horizon_) +
                 static_cast<std::size_t>(h)];
}

namespace {

// Morning and evening peaks over a base level, on a 24 h clock.
double daily_shape(double hour_of_day) {
  auto bump = [](double h, double center, double width) {
    const double d = h - center;
    return std::exp(-0.5 * d * d / (width * width));
  };
  return 0.55 + 0.3 * bump(hour_of_day, 8.0, 2.0) + 0.45 * bump(hour_of_day, 19.0, 2.5);
}

}  // namespace

LoadProfileSet generate_profiles(int n_profiles, int horizon, std::vector<std::string> keys, std::uint64_t seed) {
  if (n_profiles < 2 || horizon < 1)
    throw Error(ErrorCode::InvalidParameter, "generate_profiles: need n_profiles >= 2 and horizon >= 1");
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  if (keys.empty()) throw Error(ErrorCode::InvalidParameter, "generate_profiles: need at least one key");

  Rng rng(mix_seed(seed, 0x70726f66ULL));
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n_profiles) * keys.size() * static_cast<std::size_t>(horizon));
  for (int prof = 0; prof < n_profiles; ++prof) {
    const double level = uniform_real(rng, 0.85, 1.15);
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const double amplitude = uniform_real(rng, 0.8, 1.2);
      const double shift = uniform_real(rng, -1.0, 1.0);  // hours
      for (int h = 0; h < horizon; ++h) {
        const double hour_of_day = 24.0 * h / std::max(horizon, 1) + shift;
        const double noise = uniform_real(rng, 0.95, 1.05);
        values.push_back(std::clamp(daily_shape(hour_of_day) * level * amplitude * noise, 0.2, 1.6));
      }
    }
  }
  return LoadProfileSet(n_profiles, horizon, std::move(keys), std::move(values), 1.0, seed);
}

LoadProfileSet scale_profiles(const LoadProfileSet& set, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw Error(ErrorCode::InvalidParameter, "scale_profiles: scale must be positive");
  std::vector<double> values = set.values();
  for (double& v : values) v *= scale;
  return LoadProfileSet(set.n_profiles(), set.horizon(), set.keys(), std::move(values), set.scale() * scale,
                        set.seed());
}

ProfileSplit split(const LoadProfileSet& set, std::uint64_t seed) {
  const int n = set.n_profiles();
  if (n < 2) throw Error(ErrorCode::InvalidParameter, "split: need at least two profiles");
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  Rng rng(mix_seed(seed, 0x73706c74ULL));
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  const auto n_train = static_cast<std::size_t>((n + 1) / 2);
  ProfileSplit out;
  out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::string profiles_to_csv(const LoadProfileSet& set) {
  std::ostringstream out;
  out << "profile,key,hour,multiplier\n";
  for (int prof = 0; prof < set.n_profiles(); ++prof)
    for (std::size_t k = 0; k < set.keys().size(); ++k)
      for (int h = 0; h < set.horizon(); ++h)
        out << prof << ',' << set.keys()[k] << ',' << h << ',' << format_double(set.multiplier(prof, k, h)) << '\n';
  return out.str();
}

LoadProfileSet profiles_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "profile,key,hour,multiplier")
    throw Error(ErrorCode::SyntaxError, "profile CSV: expected header 'profile,key,hour,multiplier'");
  std::map<std::tuple<int, std::string, int>, double> cells;
  std::set<std::string> keys;
  int max_profile = -1, max_hour = -1;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f_prof, f_key, f_hour, f_val;
    if (!std::getline(row, f_prof, ',') || !std::getline(row, f_key, ',') || !std::getline(row, f_hour, ',') ||
        !std::getline(row, f_val))
      throw Error(ErrorCode::SyntaxError, "profile CSV line " + std::to_string(line_no) + ": expected 4 columns");
    double prof = 0, hour = 0, value = 0;
    if (!parse_number_or_fraction(f_prof, prof) || !parse_number_or_fraction(f_hour, hour) ||
        !parse_number_or_fraction(f_val, value) || prof < 0 || hour < 0 || prof != std::floor(prof) ||
        hour != std::floor(hour) || f_key.empty())
      throw Error(ErrorCode::SyntaxError, "profile CSV line " + std::to_string(line_no) + ": malformed row");
    const int p = static_cast<int>(prof), h = static_cast<int>(hour);
    if (!cells.emplace(std::make_tuple(p, f_key, h), value).second)
      throw Error(ErrorCode::SyntaxError, "profile CSV line " + std::to_string(line_no) + ": duplicate cell");
    keys.insert(f_key);
    max_profile = std::max(max_profile, p);
    max_hour = std::max(max_hour, h);
  }
  const int n_profiles = max_profile + 1, horizon = max_hour + 1;
  std::vector<std::string> key_list(keys.begin(), keys.end());
  std::vector<double> values;
  for (int p = 0; p < n_profiles; ++p)
    for (const auto& k : key_list)
      for (int h = 0; h < horizon; ++h) {
        auto it = cells.find(std::make_tuple(p, k, h));
        if (it == cells.end())
          throw Error(ErrorCode::SyntaxError, "profile CSV: missing cell (" + std::to_string(p) + ", " + k + ", " +
                                                  std::to_string(h) + ")");
        values.push_back(it->second);
      }
  return LoadProfileSet(n_profiles, horizon, std::move(key_list), std::move(values), 1.0, 0);
}

}  // namespace vvc
