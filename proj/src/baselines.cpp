#include "vvc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "vvc/error.hpp"
#include "vvc/numfmt.hpp"

namespace vvc {

namespace {

double slot_value(const Action& a, std::size_t slot) {
  if (slot < a.capacitors.size()) return a.capacitors[slot];
  slot -= a.capacitors.size();
  if (slot < a.regulators.size()) return a.regulators[slot];
  slot -= a.regulators.size();
  return a.batteries[slot];
}

void set_slot(Action& a, std::size_t slot, double value) {
  if (slot < a.capacitors.size()) {
    a.capacitors[slot] = static_cast<int>(value);
    return;
  }
  slot -= a.capacitors.size();
  if (slot < a.regulators.size()) {
    a.regulators[slot] = static_cast<int>(value);
    return;
  }
  slot -= a.regulators.size();
  a.batteries[slot] = value;
}

}  // namespace

std::vector<double> GreedyPolicy::candidates(const Env& env, std::size_t slot, const Action& current) const {
  const auto& c = env.circuit();
  const double now = slot_value(current, slot);
  std::vector<double> out;
  if (slot < c.capacitors.size()) {
    out = {0.0, 1.0};
  } else if (slot < c.capacitors.size() + c.regulators.size()) {
    const int n_taps = c.regulators[slot - c.capacitors.size()].n_taps;
    const int tap = static_cast<int>(now);
    for (int t = std::max(0, tap - cfg_.tap_window); t <= std::min(n_taps - 1, tap + cfg_.tap_window); ++t)
      out.push_back(t);
  } else {
    const auto& space = env.config().battery;
    out.push_back(now);
    const int g = std::max(cfg_.battery_grid, 2);
    for (int k = 0; k < g; ++k) {
      const double normalized = -1.0 + 2.0 * k / (g - 1);
      if (space.mode == BatteryMode::Continuous) {
        out.push_back(normalized);
      } else {
        out.push_back(std::round((normalized + 1.0) / 2.0 * (space.n_levels - 1)));
      }
    }
  }
  // Preference order for ties: smallest change, then smallest value.
  std::sort(out.begin(), out.end(), [now](double a, double b) {
    const double da = std::abs(a - now), db = std::abs(b - now);
    return da != db ? da < db : a < b;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Action GreedyPolicy::act(const Env& env) {
  Action current = env.last_action();
  const std::size_t n_slots = env.action_dim();
  for (std::size_t slot = 0; slot < n_slots; ++slot) {
    double best_value = slot_value(current, slot);
    double best_reward = -std::numeric_limits<double>::infinity();
    for (double cand : candidates(env, slot, current)) {
      Action trial = current;
      set_slot(trial, slot, cand);
      const auto look = env.simulate(trial);
      const double reward = look.status == SolveStatus::Collapsed ? -std::numeric_limits<double>::infinity()
                                                                   : look.breakdown.total;
      if (reward > best_reward) {
        best_reward = reward;
        best_value = cand;
      }
    }
    set_slot(current, slot, best_value);
  }
  return current;
}

std::unique_ptr<Policy> make_policy(const std::string& name, std::uint64_t seed) {
  if (name == "random") return std::make_unique<RandomPolicy>(seed);
  if (name == "greedy") return std::make_unique<GreedyPolicy>();
  throw Error(ErrorCode::InvalidParameter, "unknown policy '" + name + "' (expected random or greedy)");
}

void summarize(const std::vector<double>& values, double& mean, double& stddev) {
  mean = 0.0;
  stddev = 0.0;
  if (values.empty()) return;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  stddev = std::sqrt(ss / static_cast<double>(values.size()));
}

EvalReport evaluate(Policy& policy, Env& env, const EvaluationConfig& cfg) {
  if (cfg.episodes < 1) throw Error(ErrorCode::InvalidParameter, "evaluate: episodes must be >= 1");
  if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0)) throw Error(ErrorCode::InvalidParameter, "evaluate: gamma must lie in (0,1]");

  std::vector<int> indices;
  if (cfg.profiles == ProfileSelection::All) {
    for (int i = 0; i < env.profiles().n_profiles(); ++i) indices.push_back(i);
  } else {
    const ProfileSplit s = split(env.profiles(), cfg.split_seed);
    indices = cfg.profiles == ProfileSelection::Train ? s.train : s.test;
  }

  env.seed(cfg.seed);
  policy.seed(cfg.seed);

  EvalReport report;
  report.episodes = cfg.episodes;
  report.seed = cfg.seed;
  double sums[6] = {0, 0, 0, 0, 0, 0};
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const int profile = indices[static_cast<std::size_t>(ep) % indices.size()];
    report.profile_indices.push_back(profile);
    env.reset(profile);
    policy.begin_episode(env);
    double ret = 0.0, discount = 1.0;
    while (!env.done()) {
      const int step = env.step_index();
      const StepResult r = env.step(policy.act(env));
      ret += discount * r.reward;
      discount *= cfg.gamma;
      const auto& b = r.breakdown;
      sums[0] += b.cap_error;
      sums[1] += b.reg_error;
      sums[2] += b.dis_error;
      sums[3] += b.soc_error;
      sums[4] += b.f_volt;
      sums[5] += b.f_power;
      report.steps.push_back({ep, step, r.reward, b, r.converged});
    }
    report.episode_returns.push_back(ret);
  }
  summarize(report.episode_returns, report.mean, report.stddev);
  const double n = static_cast<double>(report.steps.size());
  report.mean_cap_error = sums[0] / n;
  report.mean_reg_error = sums[1] / n;
  report.mean_dis_error = sums[2] / n;
  report.mean_soc_error = sums[3] / n;
  report.mean_f_volt = sums[4] / n;
  report.mean_f_power = sums[5] / n;
  return report;
}

std::string report_to_json(const EvalReport& r, const std::string& env_name, const std::string& policy) {
  nlohmann::json j;
  j["env"] = env_name;
  j["policy"] = policy;
  j["episodes"] = r.episodes;
  j["seed"] = r.seed;
  j["episode_returns"] = r.episode_returns;
  j["profile_indices"] = r.profile_indices;
  j["mean"] = r.mean;
  j["std"] = r.stddev;
  j["mean_errors"] = {{"cap", r.mean_cap_error}, {"reg", r.mean_reg_error}, {"dis", r.mean_dis_error},
                      {"soc", r.mean_soc_error}, {"f_volt", r.mean_f_volt}, {"f_power", r.mean_f_power}};
  return j.dump(2) + "\n";
}

std::string steps_to_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "episode,step,reward,f_volt,f_power,cap_err,reg_err,dis_err,soc_err,converged\n";
  for (const auto& s : r.steps) {
    const auto& b = s.breakdown;
    out << s.episode << ',' << s.step << ',' << format_double(s.reward) << ',' << format_double(b.f_volt) << ','
        << format_double(b.f_power) << ',' << format_double(b.cap_error) << ',' << format_double(b.reg_error) << ','
        << format_double(b.dis_error) << ',' << format_double(b.soc_error) << ',' << (s.converged ? 1 : 0) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Graph

std::string GraphDocument::positions_csv() const {
  std::ostringstream out;
  out << "id,x,y\n";
  for (const auto& p : positions) out << p.id << ',' << format_double(p.x) << ',' << format_double(p.y) << '\n';
  return out.str();
}

std::vector<NodePosition> tree_layout(const Circuit& c) {
  const std::size_t n = c.buses.size();
  std::vector<std::vector<std::size_t>> children(n);
  for (const auto& e : c.edges) children[*c.bus_index(e.from_bus)].push_back(*c.bus_index(e.to_bus));
  for (auto& ch : children) {
    std::sort(ch.begin(), ch.end());
    ch.erase(std::unique(ch.begin(), ch.end()), ch.end());
  }
  std::vector<double> x(n, 0.0), y(n, 0.0);
  std::vector<bool> placed(n, false);
  double next_leaf = 0.0;
  // Iterative post-order so deep feeders do not exhaust the stack.
  struct Frame {
    std::size_t bus;
    std::size_t next_child;
    int depth;
  };
  const std::size_t src = *c.bus_index(c.source_bus);
  std::vector<Frame> stack{{src, 0, 0}};
  placed[src] = true;
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_child < children[f.bus].size()) {
      const std::size_t child = children[f.bus][f.next_child++];
      if (!placed[child]) {
        placed[child] = true;
        stack.push_back({child, 0, f.depth + 1});
      }
      continue;
    }
    y[f.bus] = -static_cast<double>(f.depth);
    double sum = 0.0;
    int count = 0;
    for (std::size_t ch : children[f.bus]) {
      sum += x[ch];
      ++count;
    }
    x[f.bus] = count == 0 ? next_leaf++ : sum / count;
    stack.pop_back();
  }
  std::vector<NodePosition> out;
  for (std::size_t b = 0; b < n; ++b) out.push_back({c.buses[b].id, x[b], y[b]});
  return out;
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

GraphDocument emit_graph(const Env& env, const GraphOptions& opt) {
  const Circuit& c = env.circuit();
  const auto& cfg = env.config();
  GraphDocument doc;
  doc.positions = tree_layout(c);

  std::ostringstream dot;
  dot << "digraph feeder {\n  node [shape=circle, style=filled, fillcolor=white];\n";
  for (std::size_t b = 0; b < c.buses.size(); ++b) {
    const Bus& bus = c.buses[b];
    dot << "  " << quoted(bus.id) << " [pos=\"" << format_double(doc.positions[b].x) << ','
        << format_double(doc.positions[b].y) << "!\"";
    if (bus.id == c.source_bus) dot << ", shape=doublecircle";
    if (opt.show_voltages) {
      double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
      for (Phase p : bus.phases) {
        vmin = std::min(vmin, env.solution().voltage(b, p));
        vmax = std::max(vmax, env.solution().voltage(b, p));
      }
      const double under = cfg.v_lower - vmin, over = vmax - cfg.v_upper;
      const char* band = "ok";
      const char* color = "palegreen";
      if (under > 0.0 && under >= over) {
        band = "under";
        color = "lightblue";
      } else if (over > 0.0) {
        band = "over";
        color = "salmon";
      }
      dot << ", class=\"" << band << "\", fillcolor=" << color << ", xlabel=\"" << format_double(vmin) << '-'
          << format_double(vmax) << "\"";
    }
    dot << "];\n";
  }
  for (const auto& e : c.edges) {
    dot << "  " << quoted(e.from_bus) << " -> " << quoted(e.to_bus) << " [label=" << quoted(e.id);
    if (e.is_regulator()) dot << ", style=bold";
    dot << "];\n";
  }

  const Action& last = env.last_action();
  if (opt.show_controllers) {
    auto marker = [&](const std::string& id, const std::string& kind, const std::string& bus, const std::string& setting) {
      std::string label = kind + " " + id;
      if (opt.show_actions) label += "\\n" + setting;
      dot << "  " << quoted("dev:" + id) << " [shape=box, class=\"controller\", label=" << quoted(label) << "];\n";
      dot << "  " << quoted("dev:" + id) << " -> " << quoted(bus) << " [style=dotted, arrowhead=none];\n";
    };
    for (std::size_t i = 0; i < c.capacitors.size(); ++i)
      marker(c.capacitors[i].id, "cap", c.capacitors[i].bus, "status=" + std::to_string(last.capacitors[i]));
    for (std::size_t i = 0; i < c.regulators.size(); ++i) {
      const auto& edge = c.edges[*c.edge_index(c.regulators[i].edge)];
      marker(c.regulators[i].id, "reg", edge.to_bus, "tap=" + std::to_string(last.regulators[i]));
    }
    for (std::size_t i = 0; i < c.batteries.size(); ++i)
      marker(c.batteries[i].id, "bat", c.batteries[i].bus, "cmd=" + format_double(last.batteries[i]));
  }
  if (opt.show_actions) {
    dot << "  label=\"last action:";
    for (double v : env.encode_action(last)) dot << ' ' << format_double(v);
    dot << "\";\n";
  }
  dot << "}\n";
  doc.dot = dot.str();
  return doc;
}

}  // namespace vvc
