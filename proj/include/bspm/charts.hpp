#pragma once

#include <cstdint>
#include <variant>

namespace bspm {

struct Limits {
    double lcl;
    double cl;
    double ucl;
};

/// Design constants of an EWMA chart (smoothing tau, width multiplier L).
struct EwmaDesign {
    double tau;
    double L;
    friend bool operator==(EwmaDesign const&, EwmaDesign const&) = default;
};

/// Design constant of a CUSUM chart (decision interval multiplier h).
struct CusumDesign {
    double h;
    friend bool operator==(CusumDesign const&, CusumDesign const&) = default;
};

using ChartDesign = std::variant<EwmaDesign, CusumDesign>;

//---------------------------------------------------------------------------//
/*!
 * EWMA chart with asymptotic limits center +/- L * scale * sqrt(tau / (2 - tau)).
 */
class EwmaSpec {
  public:
    EwmaSpec(double tau, double L, double center, double sigma_ybar);

    double tau() const { return tau_; }
    double L() const { return L_; }
    double center() const { return center_; }
    double sigma_ybar() const { return sigma_ybar_; }
    double half_width() const { return half_width_; }

  private:
    double tau_;
    double L_;
    double center_;
    double sigma_ybar_;
    double half_width_;
};

/*!
 * Two-sided CUSUM without a reference value.
 *
 * The statistic accumulates deviations from the center line and starts at
 * zero, so its limits +/- h * scale are about zero; the center is reported
 * for display only.
 */
class CusumSpec {
  public:
    CusumSpec(double h, double center, double sigma_ybar);

    double h() const { return h_; }
    double center() const { return center_; }
    double sigma_ybar() const { return sigma_ybar_; }

  private:
    double h_;
    double center_;
    double sigma_ybar_;
};

using ChartSpec = std::variant<EwmaSpec, CusumSpec>;

struct ChartState {
    double statistic = 0.0;
    std::uint64_t step = 0;
    bool signaled = false;
};

Limits ewma_limits(EwmaSpec const& spec);
ChartState ewma_start(EwmaSpec const& spec);
ChartState ewma_step(EwmaSpec const& spec, ChartState const& state, double ybar_estimate);

Limits cusum_limits(CusumSpec const& spec);
ChartState cusum_start(CusumSpec const& spec);
ChartState cusum_step(CusumSpec const& spec, ChartState const& state, double ybar_estimate);

ChartSpec make_chart(ChartDesign const& design, double center, double sigma_ybar);
Limits chart_limits(ChartSpec const& spec);
ChartState chart_start(ChartSpec const& spec);
ChartState chart_step(ChartSpec const& spec, ChartState const& state, double ybar_estimate);

//! The calibratable constant of a design (L for EWMA, h for CUSUM).
double design_constant(ChartDesign const& design);
ChartDesign with_constant(ChartDesign design, double constant);

}  // namespace bspm
