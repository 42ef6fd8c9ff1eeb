#include "vvc/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vvc/error.hpp"

namespace vvc {

using nlohmann::json;

bool has_phase(const PhaseSet& phases, Phase p) {
  return std::find(phases.begin(), phases.end(), p) != phases.end();
}

namespace {

template <typename T>
std::optional<std::size_t> find_by_id(const std::vector<T>& items, std::string_view id) {
  auto it = std::lower_bound(items.begin(), items.end(), id,
                             [](const T& item, std::string_view key) { return item.id < key; });
  if (it != items.end() && it->id == id) return static_cast<std::size_t>(it - items.begin());
  // Not canonical (hand-built circuit); fall back to a scan.
  for (std::size_t i = 0; i < items.size(); ++i)
    if (items[i].id == id) return i;
  return std::nullopt;
}

template <typename T>
void sort_by_id(std::vector<T>& items) {
  std::stable_sort(items.begin(), items.end(),
                   [](const T& a, const T& b) { return a.id < b.id; });
}

// Sorts a phase set and permutes per-phase payloads alongside it.
template <typename... Payload>
void sort_phases(PhaseSet& phases, Payload&... payload) {
  std::vector<std::size_t> order(phases.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return phases[a] < phases[b]; });
  auto apply = [&](auto& vec) {
    if (vec.size() != order.size()) return;
    auto copy = vec;
    for (std::size_t i = 0; i < order.size(); ++i) vec[i] = copy[order[i]];
  };
  (apply(payload), ...);
  apply(phases);
}

}  // namespace

std::optional<std::size_t> Circuit::bus_index(std::string_view id) const {
  return find_by_id(buses, id);
}

std::optional<std::size_t> Circuit::edge_index(std::string_view id) const {
  return find_by_id(edges, id);
}

std::optional<std::size_t> Circuit::regulator_index(std::string_view id) const {
  return find_by_id(regulators, id);
}

void canonicalize(Circuit& circuit) {
  for (auto& bus : circuit.buses) sort_phases(bus.phases);
  for (auto& edge : circuit.edges) {
    if (auto* line = std::get_if<LineKind>(&edge.kind)) {
      sort_phases(edge.phases, line->r_pu, line->x_pu);
    } else if (auto* reg = std::get_if<RegulatorKind>(&edge.kind)) {
      sort_phases(edge.phases, reg->regulator_ids);
    } else {
      sort_phases(edge.phases);
    }
  }
  for (auto& cap : circuit.capacitors) sort_phases(cap.phases);
  for (auto& bat : circuit.batteries) sort_phases(bat.phases);
  sort_by_id(circuit.buses);
  sort_by_id(circuit.edges);
  sort_by_id(circuit.loads);
  sort_by_id(circuit.capacitors);
  sort_by_id(circuit.regulators);
  sort_by_id(circuit.batteries);
}

std::string_view violation_name(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::DuplicateId: return "DuplicateId";
    case ViolationKind::DanglingReference: return "DanglingReference";
    case ViolationKind::PhaseMismatch: return "PhaseMismatch";
    case ViolationKind::Cycle: return "Cycle";
    case ViolationKind::Unreachable: return "Unreachable";
    case ViolationKind::InvalidValue: return "InvalidValue";
  }
  return "Unknown";
}

namespace {

class ViolationSink {
 public:
  void add(ViolationKind kind, const std::string& id, std::string message) {
    out.push_back({kind, id, std::move(message)});
  }
  std::vector<Violation> out;
};

template <typename T>
void check_duplicates(const std::vector<T>& items, const char* what, ViolationSink& sink) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    if (!seen.insert(item.id).second)
      sink.add(ViolationKind::DuplicateId, item.id, std::string("duplicate ") + what + " id");
  }
}

bool valid_phase_set(const PhaseSet& phases) {
  if (phases.empty()) return false;
  std::set<Phase> seen;
  for (Phase p : phases) {
    if (p < 0 || p >= kMaxPhases || !seen.insert(p).second) return false;
  }
  return true;
}

bool subset_of(const PhaseSet& sub, const PhaseSet& super) {
  return std::all_of(sub.begin(), sub.end(), [&](Phase p) { return has_phase(super, p); });
}

}  // namespace

std::vector<Violation> validate_radial(const Circuit& c) {
  ViolationSink sink;
  check_duplicates(c.buses, "bus", sink);
  check_duplicates(c.edges, "edge", sink);
  check_duplicates(c.loads, "load", sink);
  check_duplicates(c.capacitors, "capacitor", sink);
  check_duplicates(c.regulators, "regulator", sink);
  check_duplicates(c.batteries, "battery", sink);

  std::map<std::string, const Bus*> bus_by_id;
  for (const auto& bus : c.buses) {
    bus_by_id.emplace(bus.id, &bus);
    if (!valid_phase_set(bus.phases))
      sink.add(ViolationKind::PhaseMismatch, bus.id, "bus phases must be a nonempty set of distinct 0/1/2");
    if (!(bus.base_kv > 0.0) || !std::isfinite(bus.base_kv))
      sink.add(ViolationKind::InvalidValue, bus.id, "base_kv must be positive");
  }
  auto bus_of = [&](const std::string& id) -> const Bus* {
    auto it = bus_by_id.find(id);
    return it == bus_by_id.end() ? nullptr : it->second;
  };

  const Bus* source = bus_of(c.source_bus);
  if (source == nullptr)
    sink.add(ViolationKind::DanglingReference, c.source_bus, "source bus does not exist");
  if (!(c.source_v_pu > 0.0) || !std::isfinite(c.source_v_pu))
    sink.add(ViolationKind::InvalidValue, c.source_bus, "source v_pu must be positive");
  if (!(c.base_mva > 0.0) || !std::isfinite(c.base_mva))
    sink.add(ViolationKind::InvalidValue, c.source_bus, "base_mva must be positive");

  std::map<std::string, const RegulatorSpec*> reg_by_id;
  for (const auto& reg : c.regulators) reg_by_id.emplace(reg.id, &reg);

  for (const auto& edge : c.edges) {
    const Bus* from = bus_of(edge.from_bus);
    const Bus* to = bus_of(edge.to_bus);
    if (from == nullptr)
      sink.add(ViolationKind::DanglingReference, edge.id, "from bus '" + edge.from_bus + "' does not exist");
    if (to == nullptr)
      sink.add(ViolationKind::DanglingReference, edge.id, "to bus '" + edge.to_bus + "' does not exist");
    if (edge.from_bus == edge.to_bus)
      sink.add(ViolationKind::Cycle, edge.id, "edge is a self-loop");
    if (!valid_phase_set(edge.phases)) {
      sink.add(ViolationKind::PhaseMismatch, edge.id, "edge phases must be a nonempty set of distinct 0/1/2");
    } else if (from != nullptr && to != nullptr &&
               (!subset_of(edge.phases, from->phases) || !subset_of(edge.phases, to->phases))) {
      sink.add(ViolationKind::PhaseMismatch, edge.id, "edge phases not served by both end buses");
    }
    std::visit(
        [&](const auto& kind) {
          using K = std::decay_t<decltype(kind)>;
          if constexpr (std::is_same_v<K, LineKind>) {
            if (kind.r_pu.size() != edge.phases.size() || kind.x_pu.size() != edge.phases.size()) {
              sink.add(ViolationKind::InvalidValue, edge.id, "r_pu/x_pu must have one entry per phase");
              return;
            }
            for (std::size_t k = 0; k < kind.r_pu.size(); ++k) {
              if (!(kind.r_pu[k] >= 0.0) || !(kind.x_pu[k] >= 0.0) || !std::isfinite(kind.r_pu[k]) ||
                  !std::isfinite(kind.x_pu[k]))
                sink.add(ViolationKind::InvalidValue, edge.id, "line impedance must be finite and non-negative");
            }
          } else if constexpr (std::is_same_v<K, TransformerKind>) {
            if (!(kind.ratio > 0.0) || !std::isfinite(kind.ratio))
              sink.add(ViolationKind::InvalidValue, edge.id, "transformer ratio must be positive");
          } else {
            if (kind.regulator_ids.size() != edge.phases.size()) {
              sink.add(ViolationKind::InvalidValue, edge.id, "regulator edge needs one regulator id per phase");
              return;
            }
            for (std::size_t k = 0; k < kind.regulator_ids.size(); ++k) {
              auto it = reg_by_id.find(kind.regulator_ids[k]);
              if (it == reg_by_id.end()) {
                sink.add(ViolationKind::DanglingReference, edge.id,
                         "regulator '" + kind.regulator_ids[k] + "' does not exist");
              } else if (it->second->edge != edge.id || it->second->phase != edge.phases[k]) {
                sink.add(ViolationKind::PhaseMismatch, edge.id,
                         "regulator '" + kind.regulator_ids[k] + "' does not match edge/phase");
              }
            }
          }
        },
        edge.kind);
  }

  // Tree property per phase: every phase-p bus other than the source has
  // exactly one phase-p parent edge and is reachable from the source.
  for (Phase p = 0; p < kMaxPhases; ++p) {
    std::map<std::string, const Edge*> parent;
    std::map<std::string, std::vector<std::string>> children;
    for (const auto& edge : c.edges) {
      if (!has_phase(edge.phases, p) || edge.from_bus == edge.to_bus) continue;
      if (bus_of(edge.from_bus) == nullptr || bus_of(edge.to_bus) == nullptr) continue;
      if (edge.to_bus == c.source_bus) {
        sink.add(ViolationKind::Cycle, edge.id, "edge feeds back into the source bus on phase " + std::to_string(p));
        continue;
      }
      if (!parent.emplace(edge.to_bus, &edge).second) {
        sink.add(ViolationKind::Cycle, edge.id,
                 "bus '" + edge.to_bus + "' already has a parent on phase " + std::to_string(p));
        continue;
      }
      children[edge.from_bus].push_back(edge.to_bus);
    }
    std::set<std::string> reached;
    if (source != nullptr && has_phase(source->phases, p)) {
      std::vector<std::string> stack{c.source_bus};
      reached.insert(c.source_bus);
      while (!stack.empty()) {
        auto id = std::move(stack.back());
        stack.pop_back();
        for (const auto& child : children[id])
          if (reached.insert(child).second) stack.push_back(child);
      }
    }
    std::set<std::string> reported_cycles;
    for (const auto& bus : c.buses) {
      if (!has_phase(bus.phases, p) || reached.count(bus.id) != 0) continue;
      if (bus.id == c.source_bus) continue;  // source lacking phase p: its children report below
      // Detached cycle: walk parents until we repeat or run out.
      std::set<std::string> walk;
      std::string cur = bus.id;
      bool cycle = false;
      while (true) {
        if (!walk.insert(cur).second) {
          cycle = true;
          break;
        }
        auto it = parent.find(cur);
        if (it == parent.end()) break;
        cur = it->second->from_bus;
      }
      if (cycle) {
        const Edge* back = parent.at(cur);
        if (reported_cycles.insert(back->id).second)
          sink.add(ViolationKind::Cycle, back->id, "edges form a cycle on phase " + std::to_string(p));
      }
      sink.add(ViolationKind::Unreachable, bus.id, "bus not reachable from source on phase " + std::to_string(p));
    }
  }

  for (const auto& load : c.loads) {
    const Bus* bus = bus_of(load.bus);
    if (bus == nullptr) {
      sink.add(ViolationKind::DanglingReference, load.id, "load bus '" + load.bus + "' does not exist");
    } else if (!has_phase(bus->phases, load.phase)) {
      sink.add(ViolationKind::PhaseMismatch, load.id, "load phase not present on its bus");
    }
    if (!(load.base_p_kw >= 0.0) || !std::isfinite(load.base_p_kw) || !std::isfinite(load.base_q_kvar))
      sink.add(ViolationKind::InvalidValue, load.id, "load p must be finite and non-negative");
  }
  for (const auto& cap : c.capacitors) {
    const Bus* bus = bus_of(cap.bus);
    if (bus == nullptr) {
      sink.add(ViolationKind::DanglingReference, cap.id, "capacitor bus '" + cap.bus + "' does not exist");
    } else if (!valid_phase_set(cap.phases) || !subset_of(cap.phases, bus->phases)) {
      sink.add(ViolationKind::PhaseMismatch, cap.id, "capacitor phases not present on its bus");
    }
    if (!(cap.q_rating_kvar > 0.0) || !std::isfinite(cap.q_rating_kvar))
      sink.add(ViolationKind::InvalidValue, cap.id, "capacitor kvar must be positive");
  }
  std::map<std::string, const Edge*> edge_by_id;
  for (const auto& edge : c.edges) edge_by_id.emplace(edge.id, &edge);
  for (const auto& reg : c.regulators) {
    auto it = edge_by_id.find(reg.edge);
    if (it == edge_by_id.end()) {
      sink.add(ViolationKind::DanglingReference, reg.id, "regulator edge '" + reg.edge + "' does not exist");
    } else {
      const auto* kind = std::get_if<RegulatorKind>(&it->second->kind);
      if (kind == nullptr) {
        sink.add(ViolationKind::InvalidValue, reg.id, "regulator edge is not a regulator edge");
      } else if (!has_phase(it->second->phases, reg.phase)) {
        sink.add(ViolationKind::PhaseMismatch, reg.id, "regulator phase not served by its edge");
      }
    }
    if (reg.n_taps < 2)
      sink.add(ViolationKind::InvalidValue, reg.id, "n_taps must be at least 2");
    if (!(reg.ratio_min > 0.0) || !(reg.ratio_min < reg.ratio_max) || !std::isfinite(reg.ratio_max))
      sink.add(ViolationKind::InvalidValue, reg.id, "need 0 < ratio_min < ratio_max");
  }
  for (const auto& bat : c.batteries) {
    const Bus* bus = bus_of(bat.bus);
    if (bus == nullptr) {
      sink.add(ViolationKind::DanglingReference, bat.id, "battery bus '" + bat.bus + "' does not exist");
    } else if (!valid_phase_set(bat.phases) || !subset_of(bat.phases, bus->phases)) {
      sink.add(ViolationKind::PhaseMismatch, bat.id, "battery phases not present on its bus");
    }
    if (!(bat.e_max_kwh > 0.0) || !(bat.p_max_kw > 0.0) || !std::isfinite(bat.e_max_kwh) ||
        !std::isfinite(bat.p_max_kw))
      sink.add(ViolationKind::InvalidValue, bat.id, "battery ratings must be positive");
    if (!(bat.soc0 >= 0.0 && bat.soc0 <= 1.0))
      sink.add(ViolationKind::InvalidValue, bat.id, "soc0 must lie in [0,1]");
  }
  return std::move(sink.out);
}

// ---------------------------------------------------------------------------
// JSON format

namespace {

[[noreturn]] void syntax(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SyntaxError, "circuit file " + path + ": " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) syntax(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) syntax(path + "/" + key, "missing key");
  return *it;
}

std::string get_string(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = field(obj, key, path);
  if (!v.is_string()) syntax(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) syntax(path, "expected a number");
  return v.get<double>();
}

double get_number(const json& obj, const std::string& key, const std::string& path) {
  return get_number(field(obj, key, path), path + "/" + key);
}

double get_number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  return get_number(obj, key, path);
}

const json& get_array(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = field(obj, key, path);
  if (!v.is_array()) syntax(path + "/" + key, "expected an array");
  return v;
}

Phase get_phase(const json& v, const std::string& path) {
  if (!v.is_number_integer()) syntax(path, "phase must be an integer");
  return v.get<int>();
}

PhaseSet get_phases(const json& obj, const std::string& key, const std::string& path) {
  const auto& arr = get_array(obj, key, path);
  PhaseSet out;
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(get_phase(arr[i], path + "/" + key + "/" + std::to_string(i)));
  return out;
}

std::vector<double> get_numbers(const json& obj, const std::string& key, const std::string& path) {
  const auto& arr = get_array(obj, key, path);
  std::vector<double> out;
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(get_number(arr[i], path + "/" + key + "/" + std::to_string(i)));
  return out;
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <typename Fn>
void for_each_item(const json& root, const std::string& key, Fn&& fn) {
  const auto& arr = get_array(root, key, "");
  for (std::size_t i = 0; i < arr.size(); ++i) fn(arr[i], "/" + key + "/" + std::to_string(i));
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError,
                "circuit file: malformed JSON at " + line_col(text, e.byte == 0 ? 0 : e.byte - 1));
  }
  if (!root.is_object()) syntax("/", "top level must be an object");

  Circuit c;
  const auto& src = field(root, "source", "");
  c.source_bus = get_string(src, "bus", "/source");
  c.source_v_pu = get_number_or(src, "v_pu", 1.0, "/source");
  c.base_mva = get_number_or(src, "base_mva", 1.0, "/source");

  for_each_item(root, "buses", [&](const json& j, const std::string& path) {
    Bus b;
    b.id = get_string(j, "id", path);
    b.phases = get_phases(j, "phases", path);
    b.base_kv = get_number(j, "base_kv", path);
    c.buses.push_back(std::move(b));
  });
  for_each_item(root, "edges", [&](const json& j, const std::string& path) {
    Edge e;
    e.id = get_string(j, "id", path);
    e.from_bus = get_string(j, "from", path);
    e.to_bus = get_string(j, "to", path);
    e.phases = get_phases(j, "phases", path);
    const auto kind = get_string(j, "kind", path);
    if (kind == "line") {
      e.kind = LineKind{get_numbers(j, "r_pu", path), get_numbers(j, "x_pu", path)};
    } else if (kind == "transformer") {
      e.kind = TransformerKind{get_number_or(j, "ratio", 1.0, path)};
    } else if (kind == "regulator") {
      RegulatorKind reg;
      const auto& ids = get_array(j, "regulators", path);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!ids[i].is_string()) syntax(path + "/regulators/" + std::to_string(i), "expected a string");
        reg.regulator_ids.push_back(ids[i].get<std::string>());
      }
      e.kind = std::move(reg);
    } else {
      syntax(path + "/kind", "unknown edge kind '" + kind + "'");
    }
    c.edges.push_back(std::move(e));
  });
  for_each_item(root, "loads", [&](const json& j, const std::string& path) {
    Load l;
    l.id = get_string(j, "id", path);
    l.bus = get_string(j, "bus", path);
    l.phase = get_phase(field(j, "phase", path), path + "/phase");
    l.base_p_kw = get_number(j, "p_kw", path);
    l.base_q_kvar = get_number(j, "q_kvar", path);
    l.profile_key = j.contains("profile") ? get_string(j, "profile", path) : std::string("default");
    c.loads.push_back(std::move(l));
  });
  for_each_item(root, "capacitors", [&](const json& j, const std::string& path) {
    CapacitorSpec cap;
    cap.id = get_string(j, "id", path);
    cap.bus = get_string(j, "bus", path);
    cap.phases = get_phases(j, "phases", path);
    cap.q_rating_kvar = get_number(j, "kvar", path);
    c.capacitors.push_back(std::move(cap));
  });
  for_each_item(root, "regulators", [&](const json& j, const std::string& path) {
    RegulatorSpec reg;
    reg.id = get_string(j, "id", path);
    reg.edge = get_string(j, "edge", path);
    reg.phase = get_phase(field(j, "phase", path), path + "/phase");
    if (j.contains("n_taps")) {
      if (!j["n_taps"].is_number_integer()) syntax(path + "/n_taps", "expected an integer");
      reg.n_taps = j["n_taps"].get<int>();
    }
    reg.ratio_min = get_number_or(j, "ratio_min", 0.9, path);
    reg.ratio_max = get_number_or(j, "ratio_max", 1.1, path);
    c.regulators.push_back(std::move(reg));
  });
  for_each_item(root, "batteries", [&](const json& j, const std::string& path) {
    BatterySpec bat;
    bat.id = get_string(j, "id", path);
    bat.bus = get_string(j, "bus", path);
    bat.phases = get_phases(j, "phases", path);
    bat.e_max_kwh = get_number(j, "e_max_kwh", path);
    bat.p_max_kw = get_number(j, "p_max_kw", path);
    bat.soc0 = get_number_or(j, "soc0", 1.0, path);
    c.batteries.push_back(std::move(bat));
  });

  const auto violations = validate_radial(c);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw Error(ErrorCode::ValidationError, std::string(violation_name(v.kind)) + " at '" + v.element_id +
                                                "': " + v.message);
  }
  canonicalize(c);
  return c;
}

Circuit load_circuit_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open circuit file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_circuit(ss.str());
}

std::string serialize_circuit(const Circuit& input) {
  Circuit c = input;
  canonicalize(c);
  json root;
  root["source"] = {{"bus", c.source_bus}, {"v_pu", c.source_v_pu}, {"base_mva", c.base_mva}};
  root["buses"] = json::array();
  for (const auto& b : c.buses)
    root["buses"].push_back({{"id", b.id}, {"phases", b.phases}, {"base_kv", b.base_kv}});
  root["edges"] = json::array();
  for (const auto& e : c.edges) {
    json j = {{"id", e.id}, {"from", e.from_bus}, {"to", e.to_bus}, {"phases", e.phases}};
    std::visit(
        [&](const auto& kind) {
          using K = std::decay_t<decltype(kind)>;
          if constexpr (std::is_same_v<K, LineKind>) {
            j["kind"] = "line";
            j["r_pu"] = kind.r_pu;
            j["x_pu"] = kind.x_pu;
          } else if constexpr (std::is_same_v<K, TransformerKind>) {
            j["kind"] = "transformer";
            j["ratio"] = kind.ratio;
          } else {
            j["kind"] = "regulator";
            j["regulators"] = kind.regulator_ids;
          }
        },
        e.kind);
    root["edges"].push_back(std::move(j));
  }
  root["loads"] = json::array();
  for (const auto& l : c.loads)
    root["loads"].push_back({{"id", l.id},
                             {"bus", l.bus},
                             {"phase", l.phase},
                             {"p_kw", l.base_p_kw},
                             {"q_kvar", l.base_q_kvar},
                             {"profile", l.profile_key}});
  root["capacitors"] = json::array();
  for (const auto& cap : c.capacitors)
    root["capacitors"].push_back({{"id", cap.id}, {"bus", cap.bus}, {"phases", cap.phases}, {"kvar", cap.q_rating_kvar}});
  root["regulators"] = json::array();
  for (const auto& r : c.regulators)
    root["regulators"].push_back({{"id", r.id},
                                  {"edge", r.edge},
                                  {"phase", r.phase},
                                  {"n_taps", r.n_taps},
                                  {"ratio_min", r.ratio_min},
                                  {"ratio_max", r.ratio_max}});
  root["batteries"] = json::array();
  for (const auto& b : c.batteries)
    root["batteries"].push_back({{"id", b.id},
                                 {"bus", b.bus},
                                 {"phases", b.phases},
                                 {"e_max_kwh", b.e_max_kwh},
                                 {"p_max_kw", b.p_max_kw},
                                 {"soc0", b.soc0}});
  return root.dump(2) + "\n";
}

}  // namespace vvc
