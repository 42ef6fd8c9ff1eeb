#include "vvc/powerflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vvc/error.hpp"

namespace vvc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// v^2 below this is treated as voltage collapse.
constexpr double kCollapseV2 = 1e-4;

}  // namespace

InjectionSet InjectionSet::zeros(std::size_t n_buses) {
  InjectionSet inj;
  for (int p = 0; p < kMaxPhases; ++p) {
    inj.p[p] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_buses));
    inj.q[p] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_buses));
  }
  return inj;
}

InjectionSet build_injections(const Circuit& circuit, const DeviceState& state,
                              std::span<const double> load_multipliers) {
  if (load_multipliers.size() != circuit.loads.size())
    throw Error(ErrorCode::DimensionMismatch, "one multiplier per load required");
  check_device_state(circuit, state);
  InjectionSet inj = InjectionSet::zeros(circuit.buses.size());
  for (std::size_t i = 0; i < circuit.loads.size(); ++i) {
    const auto& load = circuit.loads[i];
    const auto b = static_cast<Eigen::Index>(*circuit.bus_index(load.bus));
    inj.p[load.phase][b] += circuit.kw_to_pu(load.base_p_kw) * load_multipliers[i];
    inj.q[load.phase][b] += circuit.kw_to_pu(load.base_q_kvar) * load_multipliers[i];
  }
  for (std::size_t i = 0; i < circuit.capacitors.size(); ++i) {
    if (state.capacitors[i].status == 0) continue;
    const auto& cap = circuit.capacitors[i];
    const auto b = static_cast<Eigen::Index>(*circuit.bus_index(cap.bus));
    for (Phase p : cap.phases) inj.q[p][b] -= circuit.kw_to_pu(cap.q_rating_kvar);
  }
  for (std::size_t i = 0; i < circuit.batteries.size(); ++i) {
    const auto& bat = circuit.batteries[i];
    const auto b = static_cast<Eigen::Index>(*circuit.bus_index(bat.bus));
    const double per_phase = circuit.kw_to_pu(state.batteries[i].last_p_kw) / static_cast<double>(bat.phases.size());
    for (Phase p : bat.phases) inj.p[p][b] -= per_phase;
  }
  return inj;
}

Network::Network(const Circuit& circuit)
    : n_buses_(circuit.buses.size()), n_edges_(circuit.edges.size()), source_v_(circuit.source_v_pu),
      regulators_(circuit.regulators) {
  const auto violations = validate_radial(circuit);
  if (!violations.empty())
    throw Error(ErrorCode::ValidationError, "network: " + std::string(violation_name(violations.front().kind)) +
                                                " at '" + violations.front().element_id + "'");
  source_ = *circuit.bus_index(circuit.source_bus);

  for (int p = 0; p < kMaxPhases; ++p) {
    auto& ph = phases_[p];
    if (!has_phase(circuit.buses[source_].phases, p)) continue;
    ph.present = true;

    std::vector<std::vector<std::size_t>> out_edges(n_buses_);
    for (std::size_t e = 0; e < n_edges_; ++e) {
      const auto& edge = circuit.edges[e];
      if (has_phase(edge.phases, p)) out_edges[*circuit.bus_index(edge.from_bus)].push_back(e);
    }

    std::vector<double> r, x;
    ph.bus.push_back(source_);
    ph.parent.push_back(-1);
    ph.edge.push_back(0);
    r.push_back(0.0);
    x.push_back(0.0);
    ph.regulator.push_back(-1);
    ph.fixed_ratio.push_back(0.0);
    for (std::size_t k = 0; k < ph.bus.size(); ++k) {
      for (std::size_t e : out_edges[ph.bus[k]]) {
        const auto& edge = circuit.edges[e];
        const auto slot = static_cast<std::size_t>(
            std::find(edge.phases.begin(), edge.phases.end(), p) - edge.phases.begin());
        ph.bus.push_back(*circuit.bus_index(edge.to_bus));
        ph.parent.push_back(static_cast<int>(k));
        ph.edge.push_back(e);
        double re = 0.0, xe = 0.0, ratio = 0.0;
        int reg = -1;
        if (const auto* line = std::get_if<LineKind>(&edge.kind)) {
          re = line->r_pu[slot];
          xe = line->x_pu[slot];
        } else if (const auto* xf = std::get_if<TransformerKind>(&edge.kind)) {
          ratio = xf->ratio;
        } else {
          const auto& ids = std::get<RegulatorKind>(edge.kind).regulator_ids;
          reg = static_cast<int>(*circuit.regulator_index(ids[slot]));
        }
        r.push_back(re);
        x.push_back(xe);
        ph.regulator.push_back(reg);
        ph.fixed_ratio.push_back(ratio);
      }
    }
    ph.r = Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
    ph.x = Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  }
}

bool Network::is_ratio_edge(int p, std::size_t k) const {
  const auto& ph = phases_[p];
  return ph.regulator[k] >= 0 || ph.fixed_ratio[k] > 0.0;
}

double Network::edge_ratio(int p, std::size_t k, const DeviceState& state) const {
  const auto& ph = phases_[p];
  if (ph.regulator[k] >= 0) {
    const auto idx = static_cast<std::size_t>(ph.regulator[k]);
    return regulator_ratio(state.regulators[idx].tap, regulators_[idx]);
  }
  return ph.fixed_ratio[k] > 0.0 ? ph.fixed_ratio[k] : 1.0;
}

namespace {

struct PhaseSweep {
  Eigen::VectorXd v2, P, Q, l;
  int iterations = 0;
  SolveStatus status = SolveStatus::NotConverged;
};

void backward(const Network::PhaseTopology& ph, const Eigen::VectorXd& p_inj, const Eigen::VectorXd& q_inj,
              PhaseSweep& s) {
  const auto n = static_cast<Eigen::Index>(ph.bus.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    s.P[k] = p_inj[static_cast<Eigen::Index>(ph.bus[k])];
    s.Q[k] = q_inj[static_cast<Eigen::Index>(ph.bus[k])];
  }
  // Children come after parents in breadth-first order.
  for (Eigen::Index k = n - 1; k >= 1; --k) {
    s.P[k] += ph.r[k] * s.l[k];
    s.Q[k] += ph.x[k] * s.l[k];
    s.P[ph.parent[k]] += s.P[k];
    s.Q[ph.parent[k]] += s.Q[k];
  }
}

PhaseSweep sweep_phase(const Network& net, int p, const DeviceState& state, const InjectionSet& inj,
                       const SolverConfig& cfg) {
  const auto& ph = net.phase(p);
  const auto n = static_cast<Eigen::Index>(ph.bus.size());
  std::vector<double> ratio(ph.bus.size(), 0.0);
  for (std::size_t k = 1; k < ph.bus.size(); ++k)
    if (net.is_ratio_edge(p, k)) ratio[k] = net.edge_ratio(p, k, state);

  PhaseSweep s;
  const double vs2 = net.source_v() * net.source_v();
  s.v2 = Eigen::VectorXd::Constant(n, vs2);
  s.P = Eigen::VectorXd::Zero(n);
  s.Q = Eigen::VectorXd::Zero(n);
  s.l = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v_prev = s.v2.cwiseSqrt();

  for (int it = 1; it <= cfg.max_iter; ++it) {
    s.iterations = it;
    backward(ph, inj.p[p], inj.q[p], s);
    bool collapsed = false;
    for (Eigen::Index k = 1; k < n; ++k) {
      const Eigen::Index i = ph.parent[k];
      if (ratio[k] > 0.0) {
        s.v2[k] = ratio[k] * ratio[k] * s.v2[i];
      } else {
        const double r = ph.r[k], x = ph.x[k];
        s.v2[k] = s.v2[i] - 2.0 * (r * s.P[k] + x * s.Q[k]) + (r * r + x * x) * s.l[k];
      }
      if (!(s.v2[k] >= kCollapseV2)) {
        s.v2[k] = kCollapseV2;
        collapsed = true;
      }
    }
    for (Eigen::Index k = 1; k < n; ++k)
      s.l[k] = (s.P[k] * s.P[k] + s.Q[k] * s.Q[k]) / s.v2[ph.parent[k]];
    if (collapsed) {
      s.status = SolveStatus::Collapsed;
      break;
    }
    const Eigen::VectorXd v = s.v2.cwiseSqrt();
    const double change = n > 0 ? (v - v_prev).cwiseAbs().maxCoeff() : 0.0;
    v_prev = v;
    if (change < cfg.tol) {
      s.status = SolveStatus::Converged;
      break;
    }
  }
  // Re-accumulate flows against the final squared currents so the balance
  // equations (and the conservation identity) hold to rounding.
  backward(ph, inj.p[p], inj.q[p], s);
  return s;
}

void check_injections(const Network& net, const InjectionSet& inj) {
  for (int p = 0; p < kMaxPhases; ++p) {
    if (static_cast<std::size_t>(inj.p[p].size()) != net.n_buses() ||
        static_cast<std::size_t>(inj.q[p].size()) != net.n_buses())
      throw Error(ErrorCode::DimensionMismatch, "injection vectors must have one entry per bus");
    if (!inj.p[p].allFinite() || !inj.q[p].allFinite())
      throw Error(ErrorCode::InvalidParameter, "injections must be finite");
  }
}

}  // namespace

PowerFlowSolution solve_status(const Network& net, const DeviceState& state, const InjectionSet& inj,
                               const SolverConfig& cfg) {
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1)
    throw Error(ErrorCode::InvalidParameter, "solver config needs tol > 0 and max_iter >= 1");
  check_injections(net, inj);

  PowerFlowSolution sol;
  sol.status = SolveStatus::Converged;
  const auto nb = static_cast<Eigen::Index>(net.n_buses());
  const auto ne = static_cast<Eigen::Index>(net.n_edges());
  for (int p = 0; p < kMaxPhases; ++p) {
    auto& out = sol.phases[p];
    out.v = Eigen::VectorXd::Constant(nb, kNaN);
    out.p = Eigen::VectorXd::Constant(ne, kNaN);
    out.q = Eigen::VectorXd::Constant(ne, kNaN);
    out.l = Eigen::VectorXd::Constant(ne, kNaN);
    const auto& ph = net.phase(p);
    if (!ph.present) continue;

    const PhaseSweep s = sweep_phase(net, p, state, inj, cfg);
    sol.iterations = std::max(sol.iterations, s.iterations);
    if (s.status == SolveStatus::Collapsed) {
      sol.status = SolveStatus::Collapsed;
    } else if (s.status == SolveStatus::NotConverged && sol.status == SolveStatus::Converged) {
      sol.status = SolveStatus::NotConverged;
    }
    for (std::size_t k = 0; k < ph.bus.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      out.v[static_cast<Eigen::Index>(ph.bus[k])] = std::sqrt(s.v2[kk]);
      if (k == 0) continue;
      const auto e = static_cast<Eigen::Index>(ph.edge[k]);
      out.p[e] = s.P[kk];
      out.q[e] = s.Q[kk];
      out.l[e] = s.l[kk];
      sol.total_loss_pu += ph.r[kk] * s.l[kk];
    }
    // P at the source slot holds its own load plus everything downstream.
    sol.substation_p_pu += s.P[0];
  }
  sol.converged = sol.status == SolveStatus::Converged;
  return sol;
}

PowerFlowSolution solve(const Network& net, const DeviceState& state, const InjectionSet& inj,
                        const SolverConfig& cfg) {
  PowerFlowSolution sol = solve_status(net, state, inj, cfg);
  if (sol.status == SolveStatus::Collapsed)
    throw Error(ErrorCode::SingularOperatingPoint, "voltage collapse: v^2 fell below 1e-4 pu^2");
  return sol;
}

PowerFlowSolution solve(const Circuit& circuit, const DeviceState& state, const InjectionSet& inj,
                        const SolverConfig& cfg) {
  check_device_state(circuit, state);
  return solve(Network(circuit), state, inj, cfg);
}

double residual(const Circuit& circuit, const DeviceState& state, const InjectionSet& inj,
                const PowerFlowSolution& sol) {
  const Network net(circuit);
  check_injections(net, inj);
  const auto nb = static_cast<Eigen::Index>(net.n_buses());
  const auto ne = static_cast<Eigen::Index>(net.n_edges());
  double worst = 0.0;
  auto track = [&](double r) { worst = std::max(worst, std::isnan(r) ? std::numeric_limits<double>::infinity() : std::abs(r)); };

  for (int p = 0; p < kMaxPhases; ++p) {
    const auto& s = sol.phases[p];
    if (s.v.size() != nb || s.p.size() != ne || s.q.size() != ne || s.l.size() != ne)
      throw Error(ErrorCode::DimensionMismatch, "solution shape does not match circuit on phase " + std::to_string(p));
    const auto& ph = net.phase(p);
    if (!ph.present) continue;
    for (std::size_t k = 0; k < ph.bus.size(); ++k) {
      const auto b = static_cast<Eigen::Index>(ph.bus[k]);
      if (!std::isfinite(s.v[b]))
        throw Error(ErrorCode::DimensionMismatch, "solution lacks voltage for bus '" + circuit.buses[ph.bus[k]].id + "'");
      if (k > 0 && !std::isfinite(s.p[static_cast<Eigen::Index>(ph.edge[k])]))
        throw Error(ErrorCode::DimensionMismatch, "solution lacks flow for edge '" + circuit.edges[ph.edge[k]].id + "'");
    }

    // Sum of child flows per local bus.
    std::vector<double> child_p(ph.bus.size(), 0.0), child_q(ph.bus.size(), 0.0);
    for (std::size_t k = 1; k < ph.bus.size(); ++k) {
      const auto e = static_cast<Eigen::Index>(ph.edge[k]);
      child_p[ph.parent[k]] += s.p[e];
      child_q[ph.parent[k]] += s.q[e];
    }
    track(s.v[static_cast<Eigen::Index>(ph.bus[0])] - net.source_v());
    for (std::size_t k = 1; k < ph.bus.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const auto e = static_cast<Eigen::Index>(ph.edge[k]);
      const auto j = static_cast<Eigen::Index>(ph.bus[k]);
      const auto i = static_cast<Eigen::Index>(ph.bus[ph.parent[k]]);
      const double r = ph.r[kk], x = ph.x[kk];
      const double P = s.p[e], Q = s.q[e], l = s.l[e];
      const double vi2 = s.v[i] * s.v[i], vj2 = s.v[j] * s.v[j];
      track(inj.p[p][j] - (P - r * l - child_p[k]));
      track(inj.q[p][j] - (Q - x * l - child_q[k]));
      if (net.is_ratio_edge(p, k)) {
        const double a = net.edge_ratio(p, k, state);
        track(vj2 - a * a * vi2);
      } else {
        track(vj2 - (vi2 - 2.0 * (r * P + x * Q) + (r * r + x * x) * l));
      }
      track(l - (P * P + Q * Q) / vi2);
    }
  }
  return worst;
}

}  // namespace vvc
