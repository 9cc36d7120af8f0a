#ifndef LEVYKB_TIME_MATRIX_HPP
#define LEVYKB_TIME_MATRIX_HPP

#include <Eigen/Dense>
#include <vector>

#include "levykb/errors.hpp"

namespace levykb::sde {

// Evaluable time-dependent matrix coefficient on [0, T]. Tabulated variants
// evaluate by left limit (piecewise constant from the left).
class TimeMatrixFunction {
public:
    enum class Variant { Constant, ScaledExpDecay, ScaledTable, Table };

    TimeMatrixFunction() = default;

    static TimeMatrixFunction constant(Eigen::MatrixXd m);
    // m * exp(-rate * t)
    static TimeMatrixFunction exp_decay(Eigen::MatrixXd m, double rate);
    // m * s(t), s tabulated (left-constant)
    static TimeMatrixFunction scaled_table(Eigen::MatrixXd m, std::vector<double> times,
                                           std::vector<double> scalars);
    // fully tabulated matrices (left-constant)
    static TimeMatrixFunction table(std::vector<double> times,
                                    std::vector<Eigen::MatrixXd> values);

    Eigen::MatrixXd operator()(double t) const;

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    Variant variant() const { return variant_; }

    // True when the function factors as M * f(t) with f scalar (includes the
    // constant case, f = 1); the constant factor then drives closed forms.
    bool has_constant_factor() const { return variant_ != Variant::Table; }
    const Eigen::MatrixXd& constant_factor() const;

private:
    Variant variant_ = Variant::Constant;
    Eigen::MatrixXd base_;
    double rate_ = 0.0;
    std::vector<double> times_;
    std::vector<double> scalars_;
    std::vector<Eigen::MatrixXd> values_;
    Eigen::Index rows_ = 0, cols_ = 0;

    double scalar_at(double t) const;
};

} // namespace levykb::sde

#endif
