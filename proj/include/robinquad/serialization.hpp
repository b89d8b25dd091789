#pragma once

#include <json.hpp>

#include "robinquad/certificates.hpp"
#include "robinquad/sensitivity.hpp"
#include "robinquad/square_exact.hpp"

namespace robinquad {

inline constexpr int kSchemaVersion = 1;

void to_json(nlohmann::json& j, const QuadParams& p);
void from_json(const nlohmann::json& j, QuadParams& p);

void to_json(nlohmann::json& j, const SquareSolution& s);
void from_json(const nlohmann::json& j, SquareSolution& s);

void to_json(nlohmann::json& j, const SensitivityReport& r);
void from_json(const nlohmann::json& j, SensitivityReport& r);

void to_json(nlohmann::json& j, const Certificate& c);
void from_json(const nlohmann::json& j, Certificate& c);

void to_json(nlohmann::json& j, const LocalMaxVerdict& v);
void from_json(const nlohmann::json& j, LocalMaxVerdict& v);

void to_json(nlohmann::json& j, const Thresholds& t);
void from_json(const nlohmann::json& j, Thresholds& t);

}  // namespace robinquad
