#pragma once

// Synthetic test sets with known structure.
//
// Random numbers come from std::mt19937_64 seeded with the 64-bit seed; the
// engine's output sequence is fixed by the C++ standard. Uniforms use the top
// 53 bits (u = (x >> 11) * 2^-53) and normals use Box-Muller on two uniforms,
// so generated files are identical on every platform. Draw order per row:
// the p regressors, then one uniform for the label.

#include "entproj/dataset.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace entproj {

enum class RegressorLaw { uniform, normal };

enum class SynthClassifier {
  /// 1{sigmoid(beta . x) >= 0.5} with the generating coefficients.
  true_model,
  /// Logistic regression fitted by full-batch gradient ascent
  /// (500 iterations, step 0.1, zero initialization, no intercept).
  trained_logistic,
};

struct SynthSpec {
  std::size_t n = 100000;
  std::vector<double> beta{-4.0, 2.0, 0.0, 2.0, 4.0};
  std::uint64_t seed = 7;
  RegressorLaw law = RegressorLaw::uniform;
  SynthClassifier classifier = SynthClassifier::true_model;
};

/// Binary test set from a logistic model with independent regressors.
TestSet gen_logistic(const SynthSpec& spec);

/// n x p uniform features with independent fair-coin labels and predictions;
/// for timing only.
TestSet gen_scaling(std::size_t n, std::size_t p, std::uint64_t seed);

/// Fits logistic coefficients (no intercept) by full-batch gradient ascent on
/// the mean log-likelihood.
Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             int iterations = 500, double step = 0.1);

double sigmoid(double z);

/// Portable uniform [0, 1) and standard normal draws on top of mt19937_64.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace entproj
