#pragma once

// Disorder instances as JSON:
//   {"model": "sk", "N": 6, "seed": 17,
//    "couplings": {"indices": [[0,1], ...], "values": [...]},
//    "fields": [...]}
// The Ising chain carries no couplings block.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmcmc/error.hpp"
#include "qmcmc/problems.hpp"

namespace qmcmc {

inline nlohmann::json to_json(const ClassicalHamiltonian& h) {
  nlohmann::json j;
  j["model"] = std::string(to_string(h.model()));
  j["N"] = h.sites();
  if (h.seed()) j["seed"] = *h.seed();
  else j["seed"] = nullptr;
  if (const auto* sk = std::get_if<SkTerms>(&h.terms())) {
    auto idx = nlohmann::json::array();
    auto val = nlohmann::json::array();
    for (const auto& c : sk->couplings) {
      idx.push_back({c.i, c.j});
      val.push_back(c.value);
    }
    j["couplings"] = {{"indices", idx}, {"values", val}};
    j["fields"] = sk->fields;
  } else if (const auto* ts = std::get_if<ThreeSpinTerms>(&h.terms())) {
    auto idx = nlohmann::json::array();
    auto val = nlohmann::json::array();
    for (const auto& c : ts->couplings) {
      idx.push_back({c.i, c.j, c.k});
      val.push_back(c.value);
    }
    j["couplings"] = {{"indices", idx}, {"values", val}};
  }
  return j;
}

inline ClassicalHamiltonian hamiltonian_from_json(const nlohmann::json& j) {
  try {
    const Model model = parse_model(j.at("model").get<std::string>());
    const int n = j.at("N").get<int>();
    std::optional<std::uint64_t> seed;
    if (j.contains("seed") && !j.at("seed").is_null()) seed = j.at("seed").get<std::uint64_t>();
    if (model == Model::IsingChain) return ClassicalHamiltonian::ising_chain(n);

    const auto& c = j.at("couplings");
    const auto& idx = c.at("indices");
    const auto& val = c.at("values");
    require(idx.size() == val.size(), "instance: couplings.indices and couplings.values differ in length");
    if (model == Model::SK) {
      std::vector<PairCoupling> pairs;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        require(idx[i].size() == 2, "instance: SK coupling needs 2 indices");
        pairs.push_back({idx[i][0].get<int>(), idx[i][1].get<int>(), val[i].get<double>()});
      }
      std::vector<double> fields;
      if (j.contains("fields")) fields = j.at("fields").get<std::vector<double>>();
      return ClassicalHamiltonian::sk(n, std::move(pairs), std::move(fields), seed);
    }
    std::vector<TripleCoupling> triples;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      require(idx[i].size() == 3, "instance: 3-spin coupling needs 3 indices");
      triples.push_back({idx[i][0].get<int>(), idx[i][1].get<int>(), idx[i][2].get<int>(),
                         val[i].get<double>()});
    }
    return ClassicalHamiltonian::three_spin(n, std::move(triples), seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("instance: malformed JSON: ") + e.what());
  }
}

inline ClassicalHamiltonian load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open instance file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("instance file '" + path + "': " + e.what());
  }
  return hamiltonian_from_json(j);
}

inline void save_instance(const ClassicalHamiltonian& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write instance file '" + path + "'");
  out << to_json(h).dump(2) << '\n';
}

}  // namespace qmcmc
