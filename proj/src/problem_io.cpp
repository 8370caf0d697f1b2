#include "sinrgp/problem_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sinrgp {

using Eigen::Index;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ParseError(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(field, "must be finite");
  return x;
}

VectorXd vector_field(const json& doc, const std::string& field, Index n) {
  const auto it = doc.find(field);
  if (it == doc.end()) throw ParseError(field, "missing");
  if (!it->is_array()) throw ParseError(field, "expected an array");
  if (static_cast<Index>(it->size()) != n) {
    throw ParseError(field, "expected " + std::to_string(n) + " entries, found " +
                                std::to_string(it->size()));
  }
  VectorXd out(n);
  for (Index i = 0; i < n; ++i) {
    out(i) = number((*it)[static_cast<std::size_t>(i)], field + "[" + std::to_string(i) + "]");
  }
  return out;
}

Eigen::MatrixXd gain_field(const json& doc) {
  const auto it = doc.find("G");
  if (it == doc.end()) throw ParseError("G", "missing");
  if (!it->is_array() || it->empty()) throw ParseError("G", "expected a non-empty array");
  const json& g = *it;
  if (g.front().is_array()) {
    const Index n = static_cast<Index>(g.size());
    Eigen::MatrixXd out(n, n);
    for (Index i = 0; i < n; ++i) {
      const json& row = g[static_cast<std::size_t>(i)];
      const std::string name = "G[" + std::to_string(i) + "]";
      if (!row.is_array() || static_cast<Index>(row.size()) != n) {
        throw ParseError(name, "expected a row of " + std::to_string(n) + " numbers");
      }
      for (Index j = 0; j < n; ++j) {
        out(i, j) = number(row[static_cast<std::size_t>(j)], name + "[" + std::to_string(j) + "]");
      }
    }
    return out;
  }
  const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(g.size()))));
  if (n * n != static_cast<Index>(g.size())) {
    throw ParseError("G", "flat gain array length " + std::to_string(g.size()) + " is not a square");
  }
  Eigen::MatrixXd out(n, n);
  for (Index k = 0; k < n * n; ++k) {
    out(k / n, k % n) = number(g[static_cast<std::size_t>(k)], "G[" + std::to_string(k) + "]");
  }
  return out;
}

// Maps the model's own invalid_argument messages ("field: ...") onto ParseError.
void validate_as_parse(const PowerControlProblem& prob) {
  try {
    prob.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    const auto bracket = msg.find_first_of("[ ");
    const auto end = std::min(colon, bracket);
    throw ParseError(end == std::string::npos ? std::string() : msg.substr(0, end), msg);
  }
}

}  // namespace

PowerControlProblem problem_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "problem file must hold a JSON object");
  PowerControlProblem prob;
  prob.gain = gain_field(doc);
  const Index n = prob.gain.rows();
  prob.noise = vector_field(doc, "n_watts", n);
  prob.weights = vector_field(doc, "w", n);
  prob.p_max = vector_field(doc, "p_max_watts", n);
  prob.p_min = doc.contains("p_min_watts") ? vector_field(doc, "p_min_watts", n)
                                          : VectorXd::Constant(n, kDefaultMinPower);
  if (doc.contains("rate_a")) prob.rate_a = number(doc["rate_a"], "rate_a");
  if (doc.contains("rate_b")) prob.rate_b = number(doc["rate_b"], "rate_b");
  if (doc.contains("gamma_min") && doc.contains("r_min")) {
    throw ParseError("r_min", "give either gamma_min or r_min, not both");
  }
  prob.gamma_min = VectorXd::Zero(n);
  if (doc.contains("gamma_min")) prob.gamma_min = vector_field(doc, "gamma_min", n);
  if (doc.contains("r_min")) {
    const VectorXd r = vector_field(doc, "r_min", n);
    for (Index i = 0; i < n; ++i) {
      if (r(i) < 0.0) throw ParseError("r_min[" + std::to_string(i) + "]", "must be >= 0");
      prob.gamma_min(i) = sinr_for_rate(r(i), prob.rate_a, prob.rate_b);
    }
  }
  validate_as_parse(prob);
  return prob;
}

json problem_to_json(const PowerControlProblem& prob) {
  auto vec = [](const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  json g = json::array();
  for (Index i = 0; i < prob.size(); ++i) {
    json row = json::array();
    for (Index j = 0; j < prob.size(); ++j) row.push_back(prob.gain(i, j));
    g.push_back(std::move(row));
  }
  return json{{"G", std::move(g)},
              {"n_watts", vec(prob.noise)},
              {"w", vec(prob.weights)},
              {"p_min_watts", vec(prob.p_min)},
              {"p_max_watts", vec(prob.p_max)},
              {"gamma_min", vec(prob.gamma_min)},
              {"rate_a", prob.rate_a},
              {"rate_b", prob.rate_b}};
}

PowerControlProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("", path.string() + ": " + e.what());
  }
  return problem_from_json(doc);
}

void save_problem(const PowerControlProblem& prob, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << problem_to_json(prob).dump(2) << '\n';
}

}  // namespace sinrgp
