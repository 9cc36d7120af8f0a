#include "levykb/time_matrix.hpp"

#include <algorithm>
#include <cmath>

namespace levykb::sde {

TimeMatrixFunction TimeMatrixFunction::constant(Eigen::MatrixXd m) {
    TimeMatrixFunction f;
    f.variant_ = Variant::Constant;
    f.rows_ = m.rows();
    f.cols_ = m.cols();
    f.base_ = std::move(m);
    return f;
}

TimeMatrixFunction TimeMatrixFunction::exp_decay(Eigen::MatrixXd m, double rate) {
    TimeMatrixFunction f;
    f.variant_ = Variant::ScaledExpDecay;
    f.rows_ = m.rows();
    f.cols_ = m.cols();
    f.base_ = std::move(m);
    f.rate_ = rate;
    return f;
}

TimeMatrixFunction TimeMatrixFunction::scaled_table(Eigen::MatrixXd m,
                                                    std::vector<double> times,
                                                    std::vector<double> scalars) {
    if (times.size() != scalars.size() || times.empty())
        throw model_error("TimeMatrixFunction: scalar table shape mismatch");
    if (!std::is_sorted(times.begin(), times.end()))
        throw model_error("TimeMatrixFunction: scalar table times must be sorted");
    TimeMatrixFunction f;
    f.variant_ = Variant::ScaledTable;
    f.rows_ = m.rows();
    f.cols_ = m.cols();
    f.base_ = std::move(m);
    f.times_ = std::move(times);
    f.scalars_ = std::move(scalars);
    return f;
}

TimeMatrixFunction TimeMatrixFunction::table(std::vector<double> times,
                                             std::vector<Eigen::MatrixXd> values) {
    if (times.size() != values.size() || times.empty())
        throw model_error("TimeMatrixFunction: table shape mismatch");
    if (!std::is_sorted(times.begin(), times.end()))
        throw model_error("TimeMatrixFunction: table times must be sorted");
    for (const auto& v : values)
        if (v.rows() != values.front().rows() || v.cols() != values.front().cols())
            throw model_error("TimeMatrixFunction: table entries must share one shape");
    TimeMatrixFunction f;
    f.variant_ = Variant::Table;
    f.rows_ = values.front().rows();
    f.cols_ = values.front().cols();
    f.times_ = std::move(times);
    f.values_ = std::move(values);
    return f;
}

double TimeMatrixFunction::scalar_at(double t) const {
    // left-continuity: value of the last node with time <= t
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t j = (it == times_.begin()) ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    return scalars_[j];
}

Eigen::MatrixXd TimeMatrixFunction::operator()(double t) const {
    switch (variant_) {
        case Variant::Constant:
            return base_;
        case Variant::ScaledExpDecay:
            return base_ * std::exp(-rate_ * t);
        case Variant::ScaledTable:
            return base_ * scalar_at(t);
        case Variant::Table: {
            auto it = std::upper_bound(times_.begin(), times_.end(), t);
            std::size_t j =
                (it == times_.begin()) ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
            return values_[j];
        }
    }
    return base_;
}

const Eigen::MatrixXd& TimeMatrixFunction::constant_factor() const {
    if (!has_constant_factor())
        throw model_error("TimeMatrixFunction: tabulated matrices have no constant factor");
    return base_;
}

} // namespace levykb::sde
