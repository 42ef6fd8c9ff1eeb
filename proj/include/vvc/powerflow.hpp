#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "vvc/circuit.hpp"
#include "vvc/devices.hpp"

namespace vvc {

// Net consumption per (bus, phase) in per-unit. Vectors are indexed by circuit
// bus index; entries for phases a bus does not carry must be zero.
struct InjectionSet {
  std::array<Eigen::VectorXd, kMaxPhases> p;
  std::array<Eigen::VectorXd, kMaxPhases> q;

  static InjectionSet zeros(std::size_t n_buses);
};

// Loads scaled by per-load multipliers, capacitor injections (negative q when
// on) and battery output (negative p when discharging), taken from `state`.
InjectionSet build_injections(const Circuit& circuit, const DeviceState& state,
                              std::span<const double> load_multipliers);

struct SolverConfig {
  double tol = 1e-8;  // max voltage change per iteration (pu)
  int max_iter = 100;
};

enum class SolveStatus { Converged, NotConverged, Collapsed };

struct PhaseSolution {
  Eigen::VectorXd v;  // per circuit bus; NaN where the bus lacks the phase
  Eigen::VectorXd p;  // sending-end flow per circuit edge; NaN where absent
  Eigen::VectorXd q;
  Eigen::VectorXd l;  // squared current magnitude
};

struct PowerFlowSolution {
  std::array<PhaseSolution, kMaxPhases> phases;
  double total_loss_pu = 0.0;
  double substation_p_pu = 0.0;
  int iterations = 0;
  bool converged = false;
  SolveStatus status = SolveStatus::NotConverged;

  // Voltage magnitude of (bus, phase); NaN if absent.
  double voltage(std::size_t bus, Phase phase) const { return phases[phase].v[bus]; }
};

// Per-phase radial topology in breadth-first order, compiled once per circuit.
class Network {
 public:
  explicit Network(const Circuit& circuit);

  struct PhaseTopology {
    bool present = false;
    std::vector<std::size_t> bus;   // local -> circuit bus index; [0] is the source
    std::vector<int> parent;        // local parent index, -1 for the source
    std::vector<std::size_t> edge;  // circuit edge into local bus k (k >= 1)
    Eigen::VectorXd r, x;           // impedance of the edge into local bus k
    std::vector<int> regulator;     // regulator index of that edge, -1 if none
    std::vector<double> fixed_ratio;  // transformer ratio, 0 for lines/regulators
  };

  std::size_t n_buses() const { return n_buses_; }
  std::size_t n_edges() const { return n_edges_; }
  std::size_t source() const { return source_; }
  double source_v() const { return source_v_; }
  const PhaseTopology& phase(int p) const { return phases_[p]; }

  // Voltage ratio of the edge into local bus k on phase p for the given taps.
  double edge_ratio(int p, std::size_t k, const DeviceState& state) const;
  bool is_ratio_edge(int p, std::size_t k) const;

 private:
  std::size_t n_buses_ = 0;
  std::size_t n_edges_ = 0;
  std::size_t source_ = 0;
  double source_v_ = 1.0;
  std::array<PhaseTopology, kMaxPhases> phases_;
  std::vector<RegulatorSpec> regulators_;
};

// Backward/forward sweep on the DistFlow equations. Never throws on numerical
// trouble: status reports non-convergence or voltage collapse (some v^2 fell
// below 1e-4, in which case the last iterate is returned with v^2 floored).
PowerFlowSolution solve_status(const Network& network, const DeviceState& state, const InjectionSet& injections,
                               const SolverConfig& cfg = {});

// As solve_status, but throws Error(SingularOperatingPoint) on collapse.
// Non-convergence is returned with converged=false.
PowerFlowSolution solve(const Network& network, const DeviceState& state, const InjectionSet& injections,
                        const SolverConfig& cfg = {});
PowerFlowSolution solve(const Circuit& circuit, const DeviceState& state, const InjectionSet& injections,
                        const SolverConfig& cfg = {});

// Largest absolute violation of the four branch-flow equations (power balance
// p and q, voltage drop, squared current) over all edges and phases, together
// with the source voltage. Throws DimensionMismatch for mis-shaped solutions.
double residual(const Circuit& circuit, const DeviceState& state, const InjectionSet& injections,
                const PowerFlowSolution& solution);

}  // namespace vvc
