#pragma once

#include "polyjet/dtensor.hpp"
#include "polyjet/metric.hpp"
#include "polyjet/report.hpp"

namespace polyjet {

enum class SemisprayKind { temporal, spatial };

const char* to_string(SemisprayKind kind);

/// Components G^(b)_(j)i of a temporal (G1) or spatial (G2) semispray of
/// polymomenta, stored as G(b, j, i) with shape (m, n, n). The leading block
/// (p_i^a for temporal, delta for spatial) is implicit.
class Semispray {
public:
    Semispray(SemisprayKind kind, const JetChart& chart, ExprArray components);

    SemisprayKind kind() const { return kind_; }
    const JetChart& chart() const { return chart_; }
    const ExprArray& components() const { return components_; }
    const Expr& operator()(std::size_t b, std::size_t j, std::size_t i) const {
        return components_(b, j, i);
    }

    /// The components packaged with d-tensor slots (b over j doubled, i lower
    /// spatial). The result is NOT a d-tensor in general; used for checking
    /// the homogeneous law and for differences.
    DTensorField as_dtensor() const;

    /// Adds a d-tensor with the same slot signature as as_dtensor().
    Semispray plus(const DTensorField& T) const;

private:
    SemisprayKind kind_;
    JetChart chart_;
    ExprArray components_;
};

/// Slots (b upper temporal, j lower spatial, doubled; i lower spatial).
std::vector<IndexSlot> semispray_slots();

/// G1^(a)_(j)k = 1/2 kappa^a_bc p_j^b p_k^c.
Semispray canonical_temporal(const Metric& h);
/// G2^(b)_(j)k = -1/2 gamma^i_jk p_i^b.
Semispray canonical_spatial(const Metric& phi);
Semispray canonical(SemisprayKind kind, const Metric& metric);

/// Residual of the inhomogeneous law:
///   temporal: 2 G~^(c)_(k)r = 2 G^(b)_(j)i A^c_b Bbar^i_r Bbar^j_k - Bbar^i_r (dp~_k^c/dt^a) p_i^a
///   spatial:  2 G~^(d)_(s)k = 2 G^(b)_(j)i A^d_b Bbar^i_k Bbar^j_s - Bbar^i_k dp~_s^d/dx^i
/// with A = dt~/dt, Bbar = dx/dx~. Residuals are reported on G (halved).
VerificationReport verify_semispray_law(const Semispray& S_A, const Semispray& S_B,
                                        const InducedTransform& it, const SampleDomain& dom,
                                        double tol = kDefaultLawTolerance);
VerificationReport verify_semispray_law(const Semispray& S_A, const Semispray& S_B,
                                        const TransitionMap& tm, const SampleDomain& dom,
                                        double tol = kDefaultLawTolerance);

/// Contracted identity for a candidate leading block:
///   temporal: J^(i)_(a)bj G1^c_i = L^(c)_(j)ab, block axes (c, i)
///   spatial:  J^(i)_(a)bj G2^k_i = J^(k)_(a)bj, block axes (k, i)
bool check_characterization(const DTensorField& first_block, SemisprayKind kind, const Metric& h,
                            const SampleDomain& dom, double tol = kDefaultEquivTolerance);

/// S minus the canonical semispray of its kind: the unique d-tensor part.
DTensorField decompose(const Semispray& S, const Metric& metric);

}  // namespace polyjet
