#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vvc {

// Phase index 0, 1 or 2. A set of phases is kept sorted and duplicate-free.
using Phase = int;
using PhaseSet = std::vector<Phase>;

inline constexpr int kMaxPhases = 3;

bool has_phase(const PhaseSet& phases, Phase p);

struct Bus {
  std::string id;
  PhaseSet phases;
  double base_kv = 1.0;  // line-to-neutral kV

  bool operator==(const Bus&) const = default;
};

struct LineKind {
  // Per served phase, aligned with Edge::phases.
  std::vector<double> r_pu;
  std::vector<double> x_pu;

  bool operator==(const LineKind&) const = default;
};

struct TransformerKind {
  double ratio = 1.0;

  bool operator==(const TransformerKind&) const = default;
};

struct RegulatorKind {
  // Regulator device id per served phase, aligned with Edge::phases.
  std::vector<std::string> regulator_ids;

  bool operator==(const RegulatorKind&) const = default;
};

using EdgeKind = std::variant<LineKind, TransformerKind, RegulatorKind>;

struct Edge {
  std::string id;
  std::string from_bus;  // parent
  std::string to_bus;    // child
  PhaseSet phases;
  EdgeKind kind;

  bool is_line() const { return std::holds_alternative<LineKind>(kind); }
  bool is_regulator() const { return std::holds_alternative<RegulatorKind>(kind); }
  bool operator==(const Edge&) const = default;
};

struct Load {
  std::string id;
  std::string bus;
  Phase phase = 0;
  double base_p_kw = 0.0;
  double base_q_kvar = 0.0;
  std::string profile_key;

  bool operator==(const Load&) const = default;
};

struct CapacitorSpec {
  std::string id;
  std::string bus;
  PhaseSet phases;
  double q_rating_kvar = 0.0;  // per phase

  bool operator==(const CapacitorSpec&) const = default;
};

struct RegulatorSpec {
  std::string id;
  std::string edge;
  Phase phase = 0;
  int n_taps = 33;
  double ratio_min = 0.9;
  double ratio_max = 1.1;

  bool operator==(const RegulatorSpec&) const = default;
};

struct BatterySpec {
  std::string id;
  std::string bus;
  PhaseSet phases;
  double e_max_kwh = 0.0;
  double p_max_kw = 0.0;
  double soc0 = 1.0;

  bool operator==(const BatterySpec&) const = default;
};

// A radial multi-phase feeder. Element vectors are kept sorted by id, which
// is the canonical order used by serialization, observations and actions.
struct Circuit {
  std::string source_bus;
  double source_v_pu = 1.0;
  double base_mva = 1.0;

  std::vector<Bus> buses;
  std::vector<Edge> edges;
  std::vector<Load> loads;
  std::vector<CapacitorSpec> capacitors;
  std::vector<RegulatorSpec> regulators;
  std::vector<BatterySpec> batteries;

  std::optional<std::size_t> bus_index(std::string_view id) const;
  std::optional<std::size_t> edge_index(std::string_view id) const;
  std::optional<std::size_t> regulator_index(std::string_view id) const;

  // kW (or kvar) per phase to per-unit on the circuit base.
  double kw_to_pu(double kw) const { return kw / (1000.0 * base_mva); }

  bool operator==(const Circuit&) const = default;
};

// Sorts elements and phase sets into canonical order.
void canonicalize(Circuit& circuit);

enum class ViolationKind {
  DuplicateId,
  DanglingReference,
  PhaseMismatch,
  Cycle,
  Unreachable,
  InvalidValue,
};

std::string_view violation_name(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::string element_id;
  std::string message;
};

// Checks every structural invariant of a circuit; empty result means valid.
std::vector<Violation> validate_radial(const Circuit& circuit);

// Parses the JSON circuit format and validates the result. Throws
// Error(SyntaxError) with line/column or JSON path, or Error(ValidationError)
// naming the first offending element.
Circuit parse_circuit(std::string_view text);
Circuit load_circuit_file(const std::string& path);

// Canonical JSON: sorted keys, elements ordered by id, shortest round-trip
// decimals, two-space indentation, trailing newline.
std::string serialize_circuit(const Circuit& circuit);

struct DeviceDensity {
  double capacitor = 0.03;  // capacitors per bus
  double regulator = 0.03;  // regulator-bearing edges per bus
  double battery = 0.03;    // batteries per bus
};

// Deterministic synthetic radial feeder with n_buses buses (source included).
Circuit generate_radial_system(int n_buses, std::uint64_t seed,
                               const DeviceDensity& density = {});

}  // namespace vvc
