#pragma once

#include <optional>

#include "polyjet/connection.hpp"
#include "polyjet/dtensor.hpp"
#include "polyjet/metric.hpp"

namespace polyjet {

/// Treated as positive dimensionless parameters.
struct PhysicalConstants {
    double mass = 1.0;
    double light_speed = 1.0;
    double charge = 1.0;
};

inline constexpr double kDefaultRegularityTolerance = 1e-9;

/// G^(i)(j)_(a)(b) = 1/2 d^2 H / dp_i^a dp_j^b, axes (i, a, j, b); (i, a) and
/// (j, b) are doubled pairs.
DTensorField fundamental_vertical_dtensor(const Expr& H, const JetChart& chart);

/// A Hamiltonian together with its temporal metric. G is computed once at
/// construction; regularity is decided separately because it needs a domain.
class HamiltonSpace {
public:
    /// Throws ConfigError when h is not temporal or H uses unknown variables,
    /// and when a constant is not positive.
    HamiltonSpace(Metric h, Expr H, PhysicalConstants constants = {});

    const JetChart& chart() const { return h_.chart(); }
    const Metric& h() const { return h_; }
    const Expr& hamiltonian() const { return H_; }
    const DTensorField& fundamental() const { return G_; }
    const PhysicalConstants& constants() const { return constants_; }

private:
    Metric h_;
    Expr H_;
    PhysicalConstants constants_;
    DTensorField G_;
};

struct RegularityResult {
    bool regular = false;
    /// Candidate g^ij = (1/m) h^ab G^(i)(j)_(a)(b); may depend on p.
    std::vector<std::vector<Expr>> g_upper;
    /// max |G - h (x) g| over the domain, absolute.
    double residual = 0.0;
    /// Pass threshold: tol * max(1, max |G|).
    double threshold = 0.0;
    Assignment worst_point;
    /// For m >= 2, whether dg/dp vanished under equiv.
    bool g_p_independent = true;
    /// Empty when regular.
    std::string reason;
};

/// Decides G = h_ab g^ij on the domain. Throws SingularMetric when h or a
/// factorizing candidate g is singular at a sample.
RegularityResult check_kronecker_regularity(const HamiltonSpace& hs, const SampleDomain& dom,
                                            double tol = kDefaultRegularityTolerance);

/// H = h_ab g^ij p_i^a p_j^b + U^(i)_(a) p_i^a + F with every part free of p.
struct ElectrodynamicForm {
    Metric g;                  ///< g_ij(t, x), lower indices
    std::vector<std::vector<Expr>> g_upper;
    DTensorField U;            ///< axes (i, a)
    Expr F;
};

/// m >= 2 only. Throws NotRegular, ResidualTooLarge (naming the failing part)
/// or DimensionError when m = 1.
ElectrodynamicForm extract_electrodynamic_form(const HamiltonSpace& hs, const SampleDomain& dom,
                                               double tol = kDefaultRegularityTolerance);

/// h_ab g^ij p_i^a p_j^b + U^(i)_(a) p_i^a + F.
Expr assemble_hamiltonian(const Metric& h, const std::vector<std::vector<Expr>>& g_upper,
                          const DTensorField& U, const Expr& F);

/// N1 = kappa^a_cb p_i^c and
///   N2^(a)_(i)j = (h^ab / 4)[d_k g_ij dH/dp_k^b - dg_ij/dp_k^b d_k H
///                            + g_ik d^2H/dx^j dp_k^b + g_jk d^2H/dx^i dp_k^b].
/// For m = 1 the p-dependent g is used as is. Throws NotRegular.
NonlinearConnection canonical_connection_of_hamilton_space(
    const HamiltonSpace& hs, const SampleDomain& dom, double tol = kDefaultRegularityTolerance);

/// T^(a)_(i)j = (h^ab / 4)[d_k g_ij U^(k)_(b) + g_ik d_j U^(k)_(b) + g_jk d_i U^(k)_(b)],
/// axes (a, i, j).
DTensorField electrodynamic_correction(const Metric& g, const DTensorField& U, const Metric& h);

/// N2 = -Gamma^k_ij p_k^a + T^(a)_(i)j.
NonlinearConnection electrodynamic_connection(const Metric& g, const DTensorField& U,
                                              const Metric& h);

/// N2 = -Gamma^k_ij p_k^a + (h^ab / 4)(U_ib.j + U_jb.i) with U_ib = g_ik U^(k)_(b)
/// and U_kb.r = d_r U_kb - U_sb Gamma^s_kr.
NonlinearConnection electrodynamic_connection_closed_form(const Metric& g, const DTensorField& U,
                                                          const Metric& h);

/// Slots of U^(i)_(a): upper spatial i paired with lower temporal a.
std::vector<IndexSlot> potential_slots();

/// H1 = (1 / (m c)) h_ab phi^ij p_i^a p_j^b.
HamiltonSpace gravitational(const Metric& h, const Metric& phi, PhysicalConstants k = {});

/// H2 = H1 - (2e / (m c^2)) A^(i)_(a) p_i^a + (e^2 / (m c^3)) F(t, x) with
/// F = h^ab phi_ij A^(i)_(a) A^(j)_(b). A has axes (i, a) and depends on x only.
HamiltonSpace autonomous_ed(const Metric& h, const Metric& phi, const DTensorField& A,
                            PhysicalConstants k = {});

/// H3 = h_ab g^ij p_i^a p_j^b + U^(i)_(a) p_i^a + F with g given by its lower
/// components g_ij(t, x).
HamiltonSpace nonautonomous_ed(const Metric& h, const Metric& g, const DTensorField& U,
                               const Expr& F);

/// The same space in chart B: H~ = H composed with the inverse induced map and
/// h pulled back.
HamiltonSpace pullback(const HamiltonSpace& hs, const TransitionMap& tm);

}  // namespace polyjet
