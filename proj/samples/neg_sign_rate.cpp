// Strong-error study for dX = -sign(X) dt + dW + dN, printed to stdout.
#include <cstdio>
#include <cstdlib>

#include <jdsde/study.hpp>

int main(int argc, char** argv) {
  jdsde::JumpDiffusionProblem problem(jdsde::neg_sign_drift(), 0.0, 1.0);
  jdsde::StudySettings s;
  s.scheme = argc > 1 ? jdsde::parse_scheme(argv[1]) : jdsde::Scheme::ja_quasi_milstein;
  s.paths = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 1000;
  s.resolutions = {8, 16, 32, 64, 128, 256, 512};
  s.n_ref = 8192;
  s.reference_bias_check = argc > 3;
  s.threads = 0;
  const auto r = jdsde::run_convergence(problem, s);
  for (std::size_t i = 0; i < r.resolutions.size(); ++i) {
    std::printf("n=%5lld  error=%.6e  stderr=%.3e", static_cast<long long>(r.resolutions[i]),
                r.errors[i], r.std_errors[i]);
    if (!r.bias_shift.empty()) std::printf("  shift=%+.3e", r.bias_shift[i]);
    std::printf("\n");
  }
  std::printf("slope %.4f  95%% CI [%.4f, %.4f]\n", r.slope, r.slope_ci_low, r.slope_ci_high);
}
