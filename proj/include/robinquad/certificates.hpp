#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "robinquad/geometry.hpp"

namespace robinquad {

enum class CertificateKind {
    SmallAlpha,
    TrialOne,
    LargeAlphaAsymptotic,
    ThresholdI,
    ThresholdII,
    ThresholdIII,
    ThresholdIV,
    ThresholdV,
    ThresholdVI,
};
const char* kind_name(CertificateKind k);
CertificateKind kind_from_name(const std::string& s);

enum class Verdict { CertifiedLess, Inconclusive };
const char* verdict_name(Verdict v);
Verdict verdict_from_name(const std::string& s);

struct Certificate {
    CertificateKind kind = CertificateKind::SmallAlpha;
    QuadParams params;
    std::optional<double> alpha;  // absent for the asymptotic statement
    std::map<std::string, double> quantities;
    Verdict verdict = Verdict::Inconclusive;
    std::string notes;
};

// sum over the four edges of |Gamma(i,j)| / S_j
double l_value(const QuadParams& p);
// The successive lower bounds l >= b1 >= b2 >= b3 = 4 sqrt(2S) / S.
std::array<double, 3> l_bound_chain(const QuadParams& p);

// Perimeter-weighted and metric averages used by the small-alpha comparison.
//   m = perimeter / (4 sqrt(2S)) >= 1,  Q = mean metric factor >= 1; both equal 1 only at the square.
struct SmallAlphaRatio {
    double numerator = 0.0;    // m - 1
    double denominator = 0.0;  // Q - 1
    std::optional<double> z;   // numerator / denominator, absent when the denominator vanishes
};
SmallAlphaRatio small_alpha_ratio(const QuadParams& p);
// g(alpha) = -|grad psi0|^2 / (alpha |psi0|^2_boundary) for the square eigenfunction.
double g_alpha(double alpha, double S);

Certificate small_alpha_certificate(const QuadParams& p, double alpha);
// Constant trial function: lambda(p) <= alpha * perimeter / (2S).
Certificate trial_one_certificate(const QuadParams& p, double alpha);

double asymptotic_constant(double theta);
Certificate large_alpha_certificate(const QuadParams& p);

// Explicit thresholds past which the constant trial function beats the square.
struct Thresholds {
    double alpha = 0.0;
    double S = 1.0;
    double lambda0 = 0.0;
    double target_perimeter = 0.0;   // 2 S lambda0 / alpha
    double A = 0.0;                  // |a_j| > A
    double c1 = 0.0;                 // c > c1
    double c2 = 0.0;                 // c < c2
    std::optional<double> S_tilde;   // S1 < S_tilde or S2 < S_tilde; absent if none exists
};
Thresholds parameter_thresholds(double alpha, double S);

// Which of the six threshold conditions hold for p (one certificate per condition).
std::vector<Certificate> threshold_certificates(const QuadParams& p, double alpha);

// Radius R with: hausdorff_distance_to_square(p) > R implies some threshold condition holds.
double hausdorff_threshold(double alpha, double S);

// Every certificate for (p, alpha).
std::vector<Certificate> all_certificates(const QuadParams& p, double alpha);

}  // namespace robinquad
