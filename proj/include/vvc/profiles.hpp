#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vvc {

// Daily load multipliers: one curve per (profile, key). Keys are the distinct
// load profile_key values, sorted.
class LoadProfileSet {
 public:
  LoadProfileSet() = default;
  LoadProfileSet(int n_profiles, int horizon, std::vector<std::string> keys, std::vector<double> values,
                 double scale, std::uint64_t seed);

  int n_profiles() const { return n_profiles_; }
  int horizon() const { return horizon_; }
  const std::vector<std::string>& keys() const { return keys_; }
  double scale() const { return scale_; }
  std::uint64_t seed() const { return seed_; }

  // Index of `key` in keys(); throws InvalidParameter if absent.
  std::size_t key_index(const std::string& key) const;

  // Scaled multiplier. `hour` wraps modulo horizon() so longer episodes tile
  // the daily curve.
  double multiplier(int profile, std::size_t key, int hour) const;

  const std::vector<double>& values() const { return values_; }

  bool operator==(const LoadProfileSet&) const = default;

 private:
  int n_profiles_ = 0;
  int horizon_ = 0;
  std::vector<std::string> keys_;
  std::vector<double> values_;  // [profile][key][hour], already scaled
  double scale_ = 1.0;
  std::uint64_t seed_ = 0;
};

// Double-peak daily shapes with per-curve amplitude jitter and hourly noise;
// every multiplier lies in [0.2, 1.6].
LoadProfileSet generate_profiles(int n_profiles, int horizon, std::vector<std::string> keys, std::uint64_t seed);

LoadProfileSet scale_profiles(const LoadProfileSet& set, double scale);

struct ProfileSplit {
  std::vector<int> train;
  std::vector<int> test;
};

// Seeded permutation cut in half; train gets the extra profile when odd.
ProfileSplit split(const LoadProfileSet& set, std::uint64_t seed);

// CSV with header "profile,key,hour,multiplier".
std::string profiles_to_csv(const LoadProfileSet& set);
LoadProfileSet profiles_from_csv(const std::string& text);

}  // namespace vvc
