#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "ibs/numerics/io.hpp"
#include "ibs/numerics/types.hpp"

namespace ibs::born {

struct TraceStep {
    int step = 0;
    ParamVector iterate;
    double residual_norm = 0.0;
    double step_norm = 0.0;
    std::int64_t solve_count = 0;
    std::optional<double> error_to_truth;
};

/// Per-step record of an iterative run.  Step 0 is the initial guess.
struct IterationTrace {
    std::vector<TraceStep> steps;

    bool empty() const { return steps.empty(); }
    std::size_t size() const { return steps.size(); }
    const TraceStep& back() const { return steps.back(); }
    const ParamVector& final_iterate() const { return steps.back().iterate; }

    std::vector<double> residuals() const {
        std::vector<double> out;
        for (const auto& s : steps) out.push_back(s.residual_norm);
        return out;
    }

    /// Fills error_to_truth for every step.
    void set_truth(const ParamVector& truth) {
        for (auto& s : steps) s.error_to_truth = param_norm(s.iterate - truth);
    }

    void write_csv(std::ostream& os) const {
        const bool with_truth = !steps.empty() && steps.front().error_to_truth.has_value();
        os << "step,residual_norm,step_norm,solve_count";
        if (with_truth) os << ",error_to_truth";
        os << '\n';
        for (const auto& s : steps) {
            os << s.step << ',' << io::format_double(s.residual_norm) << ',' << io::format_double(s.step_norm) << ','
               << s.solve_count;
            if (with_truth) os << ',' << io::format_double(s.error_to_truth.value_or(0.0));
            os << '\n';
        }
    }
};

}  // namespace ibs::born
