#pragma once

#include "polyjet/metric.hpp"
#include "polyjet/report.hpp"
#include "polyjet/semispray.hpp"

namespace polyjet {

/// N1(a, i, b) = N1^(a)_(i)b, shape (m, n, m); N2(a, i, j) = N2^(a)_(i)j,
/// shape (m, n, n).
class NonlinearConnection {
public:
    NonlinearConnection(const JetChart& chart, ExprArray n1, ExprArray n2);
    static NonlinearConnection zero(const JetChart& chart);

    const JetChart& chart() const { return chart_; }
    const ExprArray& n1() const { return n1_; }
    const ExprArray& n2() const { return n2_; }

    /// Copy with N2(a, i, j) shifted by `delta`.
    NonlinearConnection with_n2_offset(std::size_t a, std::size_t i, std::size_t j,
                                       double delta) const;

private:
    JetChart chart_;
    ExprArray n1_;
    ExprArray n2_;
};

struct PolymomentaSemispray {
    Semispray temporal;
    Semispray spatial;
};

/// Residuals of
///   N1~^(b)_(j)d = N1^(c)_(k)a A^b_c Bbar^k_j Abar^a_d - Abar^a_d dp~_j^b/dt^a
///   N2~^(b)_(j)r = N2^(c)_(k)i A^b_c Bbar^k_j Bbar^i_r - Bbar^i_r dp~_j^b/dx^i
VerificationReport verify_connection_law(const NonlinearConnection& N_A,
                                         const NonlinearConnection& N_B,
                                         const InducedTransform& it, const SampleDomain& dom,
                                         double tol = kDefaultLawTolerance);
VerificationReport verify_connection_law(const NonlinearConnection& N_A,
                                         const NonlinearConnection& N_B, const TransitionMap& tm,
                                         const SampleDomain& dom, double tol = kDefaultLawTolerance);

/// N1^(a)_(r)b = phi^jk dG1^(a)_(j)k/dp_i^b phi_ir, N2 = 2 G2. Throws
/// SingularMetric when phi cannot be inverted symbolically.
NonlinearConnection connection_from_semispray(const PolymomentaSemispray& G, const Metric& phi);

/// G1^(a)_(i)j = 1/2 N1^(a)_(i)b p_j^b, G2 = N2 / 2.
PolymomentaSemispray semispray_from_connection(const NonlinearConnection& N);

/// N1 = kappa^a_cb p_i^c, N2 = -gamma^k_ij p_k^a.
NonlinearConnection canonical_metric_connection(const Metric& h, const Metric& phi);

/// Rows delta p_i^a = dp_i^a + N1^(a)_(i)b dt^b + N2^(a)_(i)j dx^j in the
/// natural coframe; row index i*m + a, columns in chart order.
Eigen::MatrixXd adapted_coframe(const NonlinearConnection& N, const JetPoint& q);

/// Checks delta p~_j^b = (dx^i/dx~^j)(dt~^b/dt^a) delta p_i^a, comparing the
/// chart-B adapted rows pulled to the chart-A coframe with the transformed
/// chart-A rows.
VerificationReport verify_adapted_coframe(const NonlinearConnection& N_A,
                                          const NonlinearConnection& N_B,
                                          const InducedTransform& it, const SampleDomain& dom,
                                          double tol = kDefaultLawTolerance);

}  // namespace polyjet
