#include "pgt/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace pgt {

GradCheckResult grad_check(const std::function<Tensor<double>()>& loss_fn,
                           std::vector<Tensor<double>> params, double eps, double floor) {
    for (auto& p : params) {
        p.set_requires_grad(true);
        p.zero_grad();
    }
    {
        Tape<double> tape;
        TapeScope<double> scope(tape);
        auto loss = loss_fn();
        tape.backward(loss);
    }

    GradCheckResult result;
    NoGradScope<double> no_grad;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto& p = params[pi];
        std::vector<double> analytic(p.numel(), 0.0);
        if (p.has_grad()) std::copy(p.grad().begin(), p.grad().end(), analytic.begin());
        auto values = p.mutable_data();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double original = values[i];
            values[i] = original + eps;
            const double up = loss_fn().item();
            values[i] = original - eps;
            const double down = loss_fn().item();
            values[i] = original;

            const double numeric = (up - down) / (2.0 * eps);
            const double a = analytic[i];
            const double denom = std::max({std::abs(a), std::abs(numeric), floor});
            const double rel = std::abs(a - numeric) / denom;
            ++result.checked;
            if (rel > result.max_rel_error) {
                result.max_rel_error = rel;
                result.worst_param = pi;
                result.worst_index = i;
                result.analytic = a;
                result.numeric = numeric;
            }
        }
    }
    return result;
}

}  // namespace pgt
