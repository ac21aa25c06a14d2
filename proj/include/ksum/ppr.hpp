#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ksum/kernel.hpp"
#include "ksum/linalg.hpp"

namespace ksum {

struct PPRComponent {
    std::vector<double> w; // unit-norm projection
    double h;              // final cross-validated bandwidth
    // Nadaraya-Watson sample kept for prediction.
    std::vector<double> train_proj;
    std::vector<double> train_resid;
};

struct PPRModel {
    double mu; // global response mean
    std::vector<PPRComponent> components;
    PolyExpKernel kernel;
};

// Leave-one-out Nadaraya-Watson SSE of the residuals against the projections
// p = X w/||w||; invariant under positive rescaling of w.
double ppr_phi(std::span<const double> w, const Matrix& x, std::span<const double> r,
               double h, const PolyExpKernel& kernel);

// Closed-form gradient of ppr_phi: dphi/dp = (2/h)(T1 - T2 + T3) pulled back
// through D_w p. Derivative sums need no leave-one-out correction (K'(0) = 0).
std::vector<double> ppr_grad(std::span<const double> w, const Matrix& x,
                             std::span<const double> r, double h,
                             const PolyExpKernel& kernel);

struct PPROptions {
    int qn_max_iter = 50;
    double qn_grad_tol = 1e-6;
};

// One component: ridge-initialized direction optimized under an oversmoothing
// pilot bandwidth sqrt(lambda_max(cov X)) / n^(1/5), then the bandwidth
// cross-validated over [pilot/50, pilot].
PPRComponent ppr_fit_component(const Matrix& x, std::span<const double> r,
                               const PolyExpKernel& kernel,
                               std::optional<std::span<const double>> w0 = std::nullopt,
                               const PPROptions& opt = {});

// Forward stagewise fit of nterms components on successive residuals.
PPRModel ppr_fit(const Matrix& x, std::span<const double> y, int nterms,
                 const PolyExpKernel& kernel = PolyExpKernel::default_kernel(),
                 const PPROptions& opt = {});

std::vector<double> ppr_predict(const PPRModel& model, const Matrix& xnew);

// Plain (non-leave-one-out) NW fit of a component at arbitrary projections.
std::vector<double> ppr_component_fit_at(const PPRComponent& comp,
                                         std::span<const double> proj,
                                         const PolyExpKernel& kernel);

} // namespace ksum
