#pragma once

// JSON problem files.
//
//   {
//     "G": [[...], ...],          // linear gains, row i = transmitter i
//     "n_watts": [...],
//     "w": [...],
//     "p_min_watts": [...],       // optional, default 1e-12 W
//     "p_max_watts": [...],
//     "gamma_min": [...],         // optional, linear SINR floors
//     "r_min": [...],             // optional, bit/s/Hz floors (alternative to gamma_min)
//     "rate_a": 1.0,              // optional
//     "rate_b": 1.0               // optional
//   }
//
// "G" may also be a flat row-major array of N*N numbers.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "sinrgp/power_control.hpp"

namespace sinrgp {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() || message.starts_with(field) ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

PowerControlProblem problem_from_json(const nlohmann::json& doc);
nlohmann::json problem_to_json(const PowerControlProblem& prob);

PowerControlProblem load_problem(const std::filesystem::path& path);
void save_problem(const PowerControlProblem& prob, const std::filesystem::path& path);

}  // namespace sinrgp
