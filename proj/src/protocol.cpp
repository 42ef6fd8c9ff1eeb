#include "vvc/protocol.hpp"

#include <istream>
#include <ostream>

#include "json.hpp"
#include "vvc/error.hpp"

namespace vvc {

using nlohmann::json;

namespace {

json flat(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json info_json(const Info& info) {
  json out = json::object();
  for (const auto& [key, value] : info) {
    if (const double* d = std::get_if<double>(&value)) {
      out[key] = *d;
    } else {
      out[key] = std::get<bool>(value);
    }
  }
  return out;
}

json spaces_json(const std::vector<SlotSpace>& slots) {
  json out = json::array();
  for (const auto& s : slots) {
    if (s.type == SlotSpace::Type::Discrete) {
      out.push_back({{"type", "discrete"}, {"n", s.n}});
    } else {
      out.push_back({{"type", "box"}, {"low", s.low}, {"high", s.high}});
    }
  }
  return out;
}

int require_int(const json& req, const char* key) {
  if (!req.contains(key) || !req.at(key).is_number_integer())
    throw Error(ErrorCode::ProtocolError, std::string("field '") + key + "' must be an integer");
  return req.at(key).get<int>();
}

}  // namespace

StdioSession::StdioSession(Registry registry) : registry_(std::move(registry)) {}

std::string StdioSession::handle(const std::string& line) {
  json response = json::object();
  try {
    json req;
    try {
      req = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ProtocolError, std::string("malformed frame: ") + e.what());
    }
    if (!req.is_object()) throw Error(ErrorCode::ProtocolError, "request must be a JSON object");
    if (req.contains("id")) response["id"] = req.at("id");
    if (!req.contains("op") || !req.at("op").is_string()) throw Error(ErrorCode::ProtocolError, "missing 'op'");
    const std::string op = req.at("op").get<std::string>();

    if (op == "close") {
      closed_ = true;
      response["closed"] = true;
      return response.dump();
    }
    if (op == "make") {
      if (!req.contains("env") || !req.at("env").is_string())
        throw Error(ErrorCode::ProtocolError, "field 'env' must be a string");
      std::optional<int> worker;
      if (req.contains("worker_idx") && !req.at("worker_idx").is_null()) worker = require_int(req, "worker_idx");
      env_name_ = req.at("env").get<std::string>();
      env_.emplace(registry_.make_env(env_name_, worker));
      response["protocol"] = kProtocolVersion;
      response["env"] = env_name_;
      response["obs_dim"] = env_->obs_dim();
      response["action_dim"] = env_->action_dim();
      response["max_episode_steps"] = env_->config().horizon;
      return response.dump();
    }
    if (!env_) throw Error(ErrorCode::ProtocolError, "no environment; send 'make' first");

    if (op == "reset") {
      Observation obs = req.contains("profile_idx") && !req.at("profile_idx").is_null()
                            ? env_->reset(require_int(req, "profile_idx"))
                            : env_->reset();
      response["obs"] = flat(env_->wrap_obs(obs));
      response["profile_idx"] = env_->profile_index();
    } else if (op == "step") {
      if (!req.contains("action") || !req.at("action").is_array())
        throw Error(ErrorCode::ProtocolError, "field 'action' must be an array of numbers");
      const json& a = req.at("action");
      Eigen::VectorXd flat_action(static_cast<Eigen::Index>(a.size()));
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) throw Error(ErrorCode::ProtocolError, "action entries must be numbers");
        flat_action[static_cast<Eigen::Index>(i)] = a[i].get<double>();
      }
      const StepResult r = env_->step(flat_action);
      response["obs"] = flat(env_->wrap_obs(r.obs));
      response["reward"] = r.reward;
      response["done"] = r.done;
      response["info"] = info_json(r.info);
    } else if (op == "spaces") {
      response["action_space"] = spaces_json(env_->action_space());
      response["observation_space"] = spaces_json(env_->observation_space());
    } else if (op == "seed") {
      if (!req.contains("value") || !req.at("value").is_number_unsigned())
        throw Error(ErrorCode::ProtocolError, "field 'value' must be a non-negative integer");
      env_->seed(req.at("value").get<std::uint64_t>());
      response["seeded"] = true;
    } else {
      throw Error(ErrorCode::ProtocolError, "unknown op '" + op + "'");
    }
  } catch (const Error& e) {
    response["error"] = {{"code", std::string(code_name(e.code()))}, {"message", e.what()}};
  } catch (const std::exception& e) {
    response["error"] = {{"code", "ProtocolError"}, {"message", e.what()}};
  }
  return response.dump();
}

int StdioSession::serve(std::istream& in, std::ostream& out) {
  int served = 0;
  std::string line;
  while (!closed_ && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << handle(line) << '\n' << std::flush;
    ++served;
  }
  return served;
}

}  // namespace vvc
