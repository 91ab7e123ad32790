#include <nlohmann/json.hpp>

#include "aes/error.hpp"
#include "aes/softmdp.hpp"

namespace aes {

using nlohmann::json;

std::string sequence_to_json(const SoftMdpSequence& spec) {
  const auto& b = spec.base;
  json rewards = json::array();
  for (Eigen::Index s = 0; s < b.rewards.rows(); ++s) {
    json row = json::array();
    for (Eigen::Index a = 0; a < b.rewards.cols(); ++a) row.push_back(b.rewards(s, a));
    rewards.push_back(row);
  }
  json transitions = json::array();
  for (std::size_t s = 0; s < b.n_states; ++s) {
    json per_action = json::array();
    for (std::size_t a = 0; a < b.n_actions; ++a) {
      const auto r = b.row(s, a);
      per_action.push_back(std::vector<double>(r.begin(), r.end()));
    }
    transitions.push_back(per_action);
  }
  json doc;
  doc["dims"] = {{"states", b.n_states}, {"actions", b.n_actions}};
  doc["gamma"] = b.gamma;
  doc["mu"] = b.mu;
  doc["r_max"] = b.r_max;
  doc["rho"] = b.rho.probs();
  doc["rewards"] = rewards;
  doc["transitions"] = transitions;
  doc["generator"] = {{"pattern", pattern_name(spec.pattern)},
                      {"horizon", spec.horizon},
                      {"seed", spec.seed},
                      {"change_times", spec.drift.change_times},
                      {"magnitude", spec.drift.magnitude},
                      {"period", spec.drift.period},
                      {"amplitude", spec.drift.amplitude},
                      {"reward_drift", spec.drift.reward_drift},
                      {"transition_drift", spec.drift.transition_drift}};
  return doc.dump(2);
}

SoftMdpSequence sequence_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    SoftMdpSequence spec;
    auto& b = spec.base;
    b.n_states = doc.at("dims").at("states").get<std::size_t>();
    b.n_actions = doc.at("dims").at("actions").get<std::size_t>();
    b.gamma = doc.at("gamma").get<double>();
    b.mu = doc.at("mu").get<double>();
    b.r_max = doc.at("r_max").get<double>();
    b.rho = SimplexVec(doc.at("rho").get<std::vector<double>>());
    const auto& rewards = doc.at("rewards");
    b.rewards.resize(static_cast<Eigen::Index>(b.n_states), static_cast<Eigen::Index>(b.n_actions));
    for (std::size_t s = 0; s < b.n_states; ++s)
      for (std::size_t a = 0; a < b.n_actions; ++a)
        b.rewards(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) =
            rewards.at(s).at(a).get<double>();
    const auto& transitions = doc.at("transitions");
    for (std::size_t s = 0; s < b.n_states; ++s)
      for (std::size_t a = 0; a < b.n_actions; ++a) {
        const auto row = transitions.at(s).at(a).get<std::vector<double>>();
        if (row.size() != b.n_states) throw Error(ErrorCode::InvalidSpec, "transition row length");
        b.transitions.insert(b.transitions.end(), row.begin(), row.end());
      }
    const auto& g = doc.at("generator");
    const auto pattern = parse_pattern(g.at("pattern").get<std::string>());
    if (!pattern) throw Error(ErrorCode::InvalidSpec, "unknown pattern");
    spec.pattern = *pattern;
    spec.horizon = g.at("horizon").get<std::size_t>();
    spec.seed = g.at("seed").get<std::uint64_t>();
    spec.drift.change_times = g.at("change_times").get<std::vector<std::size_t>>();
    spec.drift.magnitude = g.at("magnitude").get<double>();
    spec.drift.period = g.at("period").get<double>();
    spec.drift.amplitude = g.at("amplitude").get<double>();
    spec.drift.reward_drift = g.at("reward_drift").get<bool>();
    spec.drift.transition_drift = g.at("transition_drift").get<bool>();
    validate_sequence(spec);
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("sequence document: ") + e.what());
  }
}

}  // namespace aes
