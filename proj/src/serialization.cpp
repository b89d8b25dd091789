#include "robinquad/serialization.hpp"

namespace robinquad {

namespace {

nlohmann::json matrix_json(const Matrix4& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 4; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2), m(i, 3)});
    return rows;
}

Matrix4 matrix_from(const nlohmann::json& j) {
    Matrix4 m;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) m(i, k) = j.at(i).at(k).get<double>();
    return m;
}

}  // namespace

void to_json(nlohmann::json& j, const QuadParams& p) {
    j = {{"a1", p.a1}, {"a2", p.a2}, {"c", p.c}, {"S1", p.S1}, {"S", p.S}};
}

void from_json(const nlohmann::json& j, QuadParams& p) {
    p.a1 = j.at("a1").get<double>();
    p.a2 = j.at("a2").get<double>();
    p.c = j.at("c").get<double>();
    p.S1 = j.at("S1").get<double>();
    p.S = j.at("S").get<double>();
}

void to_json(nlohmann::json& j, const SquareSolution& s) {
    j = {{"alpha", s.alpha},         {"S", s.S},
         {"L", s.L},                 {"t_star", s.t_star},
         {"lambda1", s.lambda1},     {"norm_const", s.norm_const},
         {"boundary_norm_sq", s.boundary_norm_sq}, {"grad_norm_sq", s.grad_norm_sq}};
}

void from_json(const nlohmann::json& j, SquareSolution& s) {
    s.alpha = j.at("alpha").get<double>();
    s.S = j.at("S").get<double>();
    s.L = j.at("L").get<double>();
    s.t_star = j.at("t_star").get<double>();
    s.lambda1 = j.at("lambda1").get<double>();
    s.norm_const = j.at("norm_const").get<double>();
    s.boundary_norm_sq = j.at("boundary_norm_sq").get<double>();
    s.grad_norm_sq = j.at("grad_norm_sq").get<double>();
}

void to_json(nlohmann::json& j, const SensitivityReport& r) {
    nlohmann::json gm = nlohmann::json::array();
    for (Method m : r.gradient_method) gm.push_back(method_name(m));
    nlohmann::json hm = nlohmann::json::array();
    for (const auto& row : r.hessian_method) {
        nlohmann::json jr = nlohmann::json::array();
        for (Method m : row) jr.push_back(method_name(m));
        hm.push_back(jr);
    }
    j = {{"params", r.params},
         {"alpha", r.alpha},
         {"mesh_level", r.mesh_level},
         {"lambda", r.lambda},
         {"gradient", {r.gradient(0), r.gradient(1), r.gradient(2), r.gradient(3)}},
         {"hessian", matrix_json(r.hessian)},
         {"gradient_method", gm},
         {"hessian_method", hm}};
}

void from_json(const nlohmann::json& j, SensitivityReport& r) {
    r.params = j.at("params").get<QuadParams>();
    r.alpha = j.at("alpha").get<double>();
    r.mesh_level = j.at("mesh_level").get<int>();
    r.lambda = j.at("lambda").get<double>();
    for (int i = 0; i < 4; ++i) r.gradient(i) = j.at("gradient").at(i).get<double>();
    r.hessian = matrix_from(j.at("hessian"));
    for (int i = 0; i < 4; ++i) {
        r.gradient_method[i] = method_from_name(j.at("gradient_method").at(i).get<std::string>());
        for (int k = 0; k < 4; ++k)
            r.hessian_method[i][k] = method_from_name(j.at("hessian_method").at(i).at(k).get<std::string>());
    }
}

void to_json(nlohmann::json& j, const Certificate& c) {
    j = {{"kind", kind_name(c.kind)},
         {"params", c.params},
         {"alpha", c.alpha ? nlohmann::json(*c.alpha) : nlohmann::json(nullptr)},
         {"quantities", c.quantities},
         {"verdict", verdict_name(c.verdict)},
         {"notes", c.notes}};
}

void from_json(const nlohmann::json& j, Certificate& c) {
    c.kind = kind_from_name(j.at("kind").get<std::string>());
    c.params = j.at("params").get<QuadParams>();
    c.alpha = j.at("alpha").is_null() ? std::nullopt : std::optional<double>(j.at("alpha").get<double>());
    c.quantities = j.at("quantities").get<std::map<std::string, double>>();
    c.verdict = verdict_from_name(j.at("verdict").get<std::string>());
    c.notes = j.at("notes").get<std::string>();
}

void to_json(nlohmann::json& j, const LocalMaxVerdict& v) {
    j = {{"alpha", v.alpha},
         {"S", v.S},
         {"mesh_level", v.mesh_level},
         {"lambda", v.lambda},
         {"gradient", {v.gradient(0), v.gradient(1), v.gradient(2), v.gradient(3)}},
         {"hessian", matrix_json(v.hessian)},
         {"mu", v.mu},
         {"off_block_max", v.off_block_max},
         {"block_trace", v.block_trace},
         {"block_det", v.block_det},
         {"pure_a", v.pure_a},
         {"g11", v.g11},
         {"g22", v.g22},
         {"g12", v.g12},
         {"cauchy_schwarz_gap", v.cauchy_schwarz_gap},
         {"det_identity_residual", v.det_identity_residual},
         {"pure_part_negative", v.pure_part_negative},
         {"negative_definite", v.negative_definite}};
}

void from_json(const nlohmann::json& j, LocalMaxVerdict& v) {
    v.alpha = j.at("alpha").get<double>();
    v.S = j.at("S").get<double>();
    v.mesh_level = j.at("mesh_level").get<int>();
    v.lambda = j.at("lambda").get<double>();
    for (int i = 0; i < 4; ++i) v.gradient(i) = j.at("gradient").at(i).get<double>();
    v.hessian = matrix_from(j.at("hessian"));
    v.mu = j.at("mu").get<std::array<double, 4>>();
    v.off_block_max = j.at("off_block_max").get<double>();
    v.block_trace = j.at("block_trace").get<double>();
    v.block_det = j.at("block_det").get<double>();
    v.pure_a = j.at("pure_a").get<double>();
    v.g11 = j.at("g11").get<double>();
    v.g22 = j.at("g22").get<double>();
    v.g12 = j.at("g12").get<double>();
    v.cauchy_schwarz_gap = j.at("cauchy_schwarz_gap").get<double>();
    v.det_identity_residual = j.at("det_identity_residual").get<double>();
    v.pure_part_negative = j.at("pure_part_negative").get<bool>();
    v.negative_definite = j.at("negative_definite").get<bool>();
}

void to_json(nlohmann::json& j, const Thresholds& t) {
    j = {{"alpha", t.alpha},
         {"S", t.S},
         {"lambda0", t.lambda0},
         {"target_perimeter", t.target_perimeter},
         {"A", t.A},
         {"c1", t.c1},
         {"c2", t.c2},
         {"S_tilde", t.S_tilde ? nlohmann::json(*t.S_tilde) : nlohmann::json(nullptr)}};
}

void from_json(const nlohmann::json& j, Thresholds& t) {
    t.alpha = j.at("alpha").get<double>();
    t.S = j.at("S").get<double>();
    t.lambda0 = j.at("lambda0").get<double>();
    t.target_perimeter = j.at("target_perimeter").get<double>();
    t.A = j.at("A").get<double>();
    t.c1 = j.at("c1").get<double>();
    t.c2 = j.at("c2").get<double>();
    t.S_tilde = j.at("S_tilde").is_null() ? std::nullopt : std::optional<double>(j.at("S_tilde").get<double>());
}

}  // namespace robinquad
