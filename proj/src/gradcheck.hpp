#pragma once

namespace stereo {

// Central-difference validation of every analytic backward pass, exposed
// as a product feature so deployments can self-check their numerics.
struct GradcheckReport {
  double max_err_sga = 0.0;         // sga_backward: input + weight grads
  double max_err_sga_logits = 0.0;  // full layer, through the softmax
  double max_err_lga = 0.0;         // lga_backward: input + weight grads
  double max_err_regress = 0.0;     // regression head
  bool pass = false;
};

// Normalized error: |a - fd| / max(|a|, |fd|, abs_tol / rel_tol). A value
// <= rel_tol is exactly the "rel_tol relative or abs_tol absolute" gate.
double graded_error(double analytic, double fd, double abs_tol, double rel_tol);

// `corrupt_backward` is a test hook: it perturbs one analytic gradient so
// the failure path of callers can be exercised on demand.
GradcheckReport run_gradcheck(bool corrupt_backward = false);

}  // namespace stereo
